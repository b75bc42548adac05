//! Hand-checked instances: the Hirzebruch surface `F_1`, the projective
//! plane and a threefold with a single flipping wall.

use crate::arith::{Rat, Scalar};
use crate::curves::{ample_divisor, mori_generators, CurveClass};
use crate::divisor::{Ghost, TDivisor, ToricPair};
use crate::error::{Error, Result};
use crate::fan::named::{hirzebruch, p2};
use crate::fan::Fan;
use crate::lp::{Lp, LpResult, Sense};
use crate::random::face_fan;

pub fn f1_pair() -> ToricPair {
    ToricPair::plain(hirzebruch(1))
}

pub fn p2_pair() -> ToricPair {
    ToricPair::plain(p2())
}

/// The line class on `P^2`.
pub fn p2_line() -> TDivisor {
    TDivisor::from_ints(&[1, 0, 0])
}

/// Rays `a, b, c, d` with `a + b = c + d` followed by their negatives. The
/// quadrilateral `abcd` is split along `cd`, so the cones `acd` and `bcd`
/// meet in the flipping wall.
pub fn flip_fan() -> Fan {
    let u = [[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, -1]];
    let heights = [1, 1, 2, 2, 2, 1, 1, 1];
    let rays: Vec<[i64; 3]> = u.iter().copied().chain(u.iter().map(|v| v.map(|x| -x))).collect();
    let points: Vec<Vec<i64>> = rays.iter().zip(heights).map(|(v, h)| v.iter().map(|x| x * h).collect()).collect();
    face_fan(&points).expect("flip polytope is simplicial")
}

/// Index of the wall spanned by `c` and `d`.
pub fn flip_wall(fan: &Fan) -> Result<usize> {
    fan.walls()?
        .iter()
        .position(|w| w.cone == [2, 3])
        .ok_or_else(|| Error::Invalid("fan has no wall cd".into()))
}

/// Integral nef divisor vanishing on the curve of `wall` and positive on
/// every other extremal ray: the pullback of an ample class from the
/// contraction.
pub fn contraction_pullback(fan: &Fan, wall: usize) -> Result<TDivisor> {
    let r = CurveClass::of_wall(fan, wall)?;
    let gens = mori_generators(fan)?;
    let n = fan.num_rays();
    let mut lp = Lp::<Rat>::new(n);
    lp.constraint(r.pairing.clone(), Sense::Eq, Rat::zero());
    for c in gens.iter().filter(|c| c.pairing != r.pairing) {
        lp.constraint(c.pairing.clone(), Sense::Ge, Rat::one());
    }
    lp.minimize(vec![Rat::one(); n]);
    let x = match lp.solve() {
        LpResult::Optimal { x, .. } => x,
        _ => return Err(Error::NotExtremal(wall)),
    };
    let den = x.iter().fold(num_bigint::BigInt::from(1), |l, v| num_integer::Integer::lcm(&l, &v.denom()));
    let den = Rat::from_bigint(den);
    Ok(TDivisor::from_rats(&x.iter().map(|v| v * &den).collect::<Vec<_>>()))
}

/// Smallest multiple `m` of the pullback `g` such that `K + B + w m g` is
/// negative on the flipping wall only.
fn isolating_ghost(fan: &Fan, boundary: &TDivisor, wall: usize, w: &Scalar) -> Result<Ghost> {
    let g = contraction_pullback(fan, wall)?;
    let gens = mori_generators(fan)?;
    let kb = &crate::divisor::canonical_divisor(fan) + boundary;
    for m in 1..=64 {
        let class = g.scale(&Scalar::int(m));
        let d = &kb + &class.scale(w);
        if gens.iter().all(|c| c.wall == wall || c.dot(&d).is_positive()) {
            return Ok(Ghost { class, weight: w.clone() });
        }
    }
    Err(Error::Invalid("no multiple isolates the flipping wall".into()))
}

fn flip_pair_with(boundary: TDivisor) -> Result<ToricPair> {
    let fan = flip_fan();
    let wall = flip_wall(&fan)?;
    let ghost = isolating_ghost(&fan, &boundary, wall, &Scalar::frac(1, 2))?;
    ToricPair::new(fan, boundary, vec![ghost])
}

/// Klt pair on [`flip_fan`] with `1/2` on `c`; `K + Delta` is negative on
/// the wall `cd` only.
pub fn flip_pair() -> Result<ToricPair> {
    let mut b = TDivisor::zero(8);
    b.set(2, Scalar::frac(1, 2));
    flip_pair_with(b)
}

/// Plt pair on [`flip_fan`] with `S = D_c` at coefficient one and `1/2`
/// on every other ray except `-c`.
pub fn pl_flip_pair() -> Result<ToricPair> {
    let h = Scalar::frac(1, 2);
    let mut b = TDivisor::new(vec![h.clone(); 8]);
    b.set(2, Scalar::one());
    b.set(6, Scalar::zero());
    flip_pair_with(b)
}

/// Ray index of `S` in [`pl_flip_pair`].
pub const PL_FLIP_S: usize = 2;

/// Ample `H` for scaling on any of the flip pairs.
pub fn flip_scaling_divisor() -> Result<TDivisor> {
    ample_divisor(&flip_fan())
}
