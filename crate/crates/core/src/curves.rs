//! Curve classes, the Mori cone of a complete simplicial fan, and nef
//! thresholds.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::arith::{Rat, Scalar};
use crate::divisor::{TDivisor, ToricPair};
use crate::error::{Error, Result};
use crate::fan::{Fan, Wall};
use crate::linalg::{self, to_rat_matrix, transpose};
use crate::lp::{Lp, LpResult, Sense};

/// Class of the invariant curve of a wall.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveClass {
    /// Index into `fan.walls()`.
    pub wall: usize,
    /// `D_rho . C` for every ray.
    pub pairing: Vec<Rat>,
}

impl CurveClass {
    pub fn of_wall(fan: &Fan, wall: usize) -> Result<CurveClass> {
        let w = &fan.walls()?[wall];
        Ok(CurveClass {
            wall,
            pairing: w.pairing.clone(),
        })
    }

    pub fn dot(&self, d: &TDivisor) -> Scalar {
        d.dot_pairing(&self.pairing)
    }

    pub fn wall_of<'a>(&self, fan: &'a Fan) -> Result<&'a Wall> {
        Ok(&fan.walls()?[self.wall])
    }
}

pub fn intersection(d: &TDivisor, c: &CurveClass) -> Scalar {
    c.dot(d)
}

/// Coordinates of relation vectors in a fixed basis of the relation space:
/// the entries at the non-pivot columns of the ray matrix.
fn relation_coordinates(fan: &Fan) -> Vec<usize> {
    let mut m = to_rat_matrix(&transpose(fan.rays()));
    let pivots = linalg::rref(&mut m);
    (0..fan.num_rays()).filter(|c| !pivots.contains(c)).collect()
}

fn normalized_key(v: &[Rat]) -> Vec<Rat> {
    // scale so the first nonzero entry has absolute value one
    let lead = v.iter().find(|x| !x.is_zero()).cloned().unwrap_or_else(Rat::one);
    let lead = lead.abs();
    v.iter().map(|x| x / &lead).collect()
}

/// Wall indices whose classes span the extremal rays of the Mori cone,
/// one per ray (the smallest wall index is the representative).
pub fn mori_cone(fan: &Fan) -> Result<Vec<usize>> {
    fan.mori.get_or_init(|| compute_mori(fan)).clone()
}

pub fn mori_generators(fan: &Fan) -> Result<Vec<CurveClass>> {
    mori_cone(fan)?
        .into_iter()
        .map(|w| CurveClass::of_wall(fan, w))
        .collect()
}

fn compute_mori(fan: &Fan) -> Result<Vec<usize>> {
    fan.require_complete_simplicial()?;
    let walls = fan.walls()?;
    let coords = relation_coordinates(fan);
    let p = coords.len();
    if p == 0 {
        return Ok(vec![]);
    }
    let mut classes: BTreeMap<Vec<Rat>, usize> = BTreeMap::new();
    for (i, w) in walls.iter().enumerate() {
        let c: Vec<Rat> = coords.iter().map(|&k| w.pairing[k].clone()).collect();
        classes.entry(normalized_key(&c)).or_insert(i);
    }
    let reps: Vec<(Vec<Rat>, usize)> = classes.into_iter().collect();
    // pointedness: some divisor is positive on every class
    let mut lp = Lp::new_free(p);
    for (c, _) in &reps {
        lp.constraint(c.clone(), Sense::Ge, Rat::one());
    }
    if !lp.feasible() {
        return Err(Error::NotProjective);
    }
    let mut out = Vec::new();
    for (i, (ci, wi)) in reps.iter().enumerate() {
        let others: Vec<&Vec<Rat>> = reps
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, (c, _))| c)
            .collect();
        if others.is_empty() {
            out.push(*wi);
            continue;
        }
        let mut lp = Lp::new(others.len());
        for k in 0..p {
            lp.constraint(others.iter().map(|c| c[k].clone()).collect(), Sense::Eq, ci[k].clone());
        }
        if !lp.feasible() {
            out.push(*wi);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Nonnegative combination of Mori generators equal to the class of a
/// wall, if one exists.
pub fn mori_certificate(fan: &Fan, wall: usize) -> Result<Option<Vec<Rat>>> {
    let gens = mori_cone(fan)?;
    let walls = fan.walls()?;
    let n = fan.num_rays();
    let mut lp = Lp::new(gens.len());
    for k in 0..n {
        lp.constraint(
            gens.iter().map(|&g| walls[g].pairing[k].clone()).collect(),
            Sense::Eq,
            walls[wall].pairing[k].clone(),
        );
    }
    Ok(match lp.solve() {
        LpResult::Optimal { x, .. } => Some(x),
        _ => None,
    })
}

/// Extremal rays on which `K + Delta` is negative.
pub fn negative_rays(p: &ToricPair) -> Result<Vec<CurveClass>> {
    let kd = p.log_canonical();
    Ok(mori_generators(&p.fan)?
        .into_iter()
        .filter(|c| c.dot(&kd).is_negative())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Threshold {
    pub t1: Scalar,
    pub critical: Vec<CurveClass>,
}

/// Smallest `t <= t0` with `K + Delta + t H` nef, and the extremal rays
/// that become zero there.
pub fn nef_threshold(p: &ToricPair, h: &TDivisor, t0: &Scalar) -> Result<Threshold> {
    let kd = p.log_canonical();
    let gens = mori_generators(&p.fan)?;
    let at_t0 = &kd + &h.scale(t0);
    if gens.iter().any(|c| c.dot(&at_t0).is_negative()) {
        return Err(Error::NotNefAtT0(t0.to_string()));
    }
    if gens.iter().all(|c| !c.dot(&kd).is_negative()) {
        return Ok(Threshold {
            t1: Scalar::zero(),
            critical: vec![],
        });
    }
    let mut t1 = Scalar::zero();
    for c in &gens {
        let hc = c.dot(h);
        if hc.is_positive() {
            let t = -c.dot(&kd) / hc;
            if t > t1 {
                t1 = t;
            }
        }
    }
    if t1 > *t0 {
        t1 = t0.clone();
    }
    let at_t1 = &kd + &h.scale(&t1);
    let critical = gens
        .into_iter()
        .filter(|c| c.dot(&at_t1).is_zero() && c.dot(h).is_positive())
        .collect();
    Ok(Threshold { t1, critical })
}

/// An integral ample divisor, found by LP and scaled to clear denominators.
pub fn ample_divisor(fan: &Fan) -> Result<TDivisor> {
    fan.require_complete_simplicial()?;
    let walls = fan.walls()?;
    let n = fan.num_rays();
    let mut lp = Lp::new(n);
    for w in walls {
        lp.constraint(w.pairing.clone(), Sense::Ge, Rat::one());
    }
    // keep coefficients small: minimize their sum over nonnegative divisors
    lp.minimize(vec![Rat::one(); n]);
    let x = match lp.solve() {
        LpResult::Optimal { x, .. } => x,
        _ => return Err(Error::NotProjective),
    };
    let den = x.iter().fold(BigInt::one(), |l, v| l.lcm(&v.denom()));
    let den = Rat::from_bigint(den);
    let d: Vec<Rat> = x.iter().map(|v| v * &den).collect();
    Ok(TDivisor::from_rats(&d))
}

/// Least `t >= 0` making `D + t H` nef, for an ample `H`.
pub fn nef_shift(fan: &Fan, d: &TDivisor, h: &TDivisor) -> Result<Scalar> {
    let mut t = Scalar::zero();
    for c in mori_generators(fan)? {
        let dc = c.dot(d);
        if dc.is_negative() {
            let hc = c.dot(h);
            if !hc.is_positive() {
                return Err(Error::Precondition("H is not ample".into()));
            }
            let need = -dc / hc;
            if need > t {
                t = need;
            }
        }
    }
    Ok(t)
}

/// Dimension of the span of a set of curve classes.
pub fn class_rank(classes: &[&CurveClass]) -> usize {
    let m: Vec<Vec<Rat>> = classes.iter().map(|c| c.pairing.clone()).collect();
    if m.is_empty() {
        0
    } else {
        linalg::rank(&m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::canonical_divisor;
    use crate::fan::named::*;

    #[test]
    fn mori_generator_counts() {
        assert_eq!(mori_cone(&p2()).unwrap().len(), 1);
        assert_eq!(mori_cone(&hirzebruch(1)).unwrap().len(), 2);
        assert_eq!(mori_cone(&p1xp1()).unwrap().len(), 2);
        assert_eq!(mori_cone(&p3()).unwrap().len(), 1);
    }

    #[test]
    fn intersections() {
        let f = p2();
        let c = CurveClass::of_wall(&f, 0).unwrap();
        assert_eq!(c.dot(&-&canonical_divisor(&f)), Scalar::int(3));
        assert_eq!(c.dot(&TDivisor::zero(3)), Scalar::zero());
    }

    #[test]
    fn negative_rays_of_f1() {
        let p = ToricPair::plain(hirzebruch(1));
        let neg = negative_rays(&p).unwrap();
        assert_eq!(neg.len(), 2);
        let k = p.log_canonical();
        let mut vals: Vec<Scalar> = neg.iter().map(|c| c.dot(&k)).collect();
        vals.sort();
        assert_eq!(vals, vec![Scalar::int(-2), Scalar::int(-1)]);
        assert!(negative_rays(&ToricPair::plain(p2())).unwrap().len() == 1);
    }

    #[test]
    fn threshold_f1_anticanonical() {
        let p = ToricPair::plain(hirzebruch(1));
        let h = -&canonical_divisor(&p.fan);
        let t = nef_threshold(&p, &h, &Scalar::one()).unwrap();
        assert_eq!(t.t1, Scalar::one());
        assert_eq!(t.critical.len(), 2);
    }

    #[test]
    fn every_wall_in_mori_cone() {
        for f in [p2(), hirzebruch(1), hirzebruch(3), p3()] {
            for w in 0..f.walls().unwrap().len() {
                assert!(mori_certificate(&f, w).unwrap().is_some());
            }
        }
    }

    #[test]
    fn ample_found() {
        for f in [p2(), hirzebruch(2), p3()] {
            let a = ample_divisor(&f).unwrap();
            assert!(crate::divisor::is_ample(&f, &a).unwrap());
            assert!(a.is_integral());
        }
    }
}
