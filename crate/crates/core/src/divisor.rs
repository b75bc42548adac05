//! Torus-invariant divisors, pairs, positivity, mobile/fixed parts and
//! stable base loci.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::arith::{Rat, Scalar};
use crate::error::{Error, Result};
use crate::fan::{Fan, Wall};
use crate::linalg::{self, to_rat_matrix, transpose};
use crate::polytope::SectionPolytope;

/// Invariant divisor: one exact coefficient per ray of a fan.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct TDivisor(Vec<Scalar>);

impl fmt::Debug for TDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

impl fmt::Display for TDivisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl TDivisor {
    pub fn new(coeffs: Vec<Scalar>) -> TDivisor {
        TDivisor(coeffs)
    }

    pub fn zero(n: usize) -> TDivisor {
        TDivisor(vec![Scalar::zero(); n])
    }

    pub fn from_ints(v: &[i64]) -> TDivisor {
        TDivisor(v.iter().map(|&x| Scalar::int(x)).collect())
    }

    pub fn from_rats(v: &[Rat]) -> TDivisor {
        TDivisor(v.iter().cloned().map(Scalar::rational).collect())
    }

    /// The prime divisor of ray `i`.
    pub fn prime(n: usize, i: usize) -> TDivisor {
        let mut d = TDivisor::zero(n);
        d.0[i] = Scalar::one();
        d
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.0
    }

    pub fn coeff(&self, i: usize) -> &Scalar {
        &self.0[i]
    }

    pub fn set(&mut self, i: usize, v: Scalar) {
        self.0[i] = v;
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.0.iter().all(|c| c.is_rational())
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.is_integer())
    }

    /// Coefficient-wise nonnegativity.
    pub fn is_effective_cycle(&self) -> bool {
        self.0.iter().all(|c| !c.is_negative())
    }

    pub fn support(&self) -> BTreeSet<usize> {
        (0..self.0.len()).filter(|&i| !self.0[i].is_zero()).collect()
    }

    pub fn scale(&self, s: &Scalar) -> TDivisor {
        TDivisor(self.0.iter().map(|c| c * s).collect())
    }

    pub fn floor(&self) -> TDivisor {
        TDivisor(self.0.iter().map(|c| Scalar::rational(Rat::from_bigint(c.floor()))).collect())
    }

    pub fn ceil(&self) -> TDivisor {
        TDivisor(self.0.iter().map(|c| Scalar::rational(Rat::from_bigint(c.ceil()))).collect())
    }

    pub fn fract(&self) -> TDivisor {
        TDivisor(self.0.iter().map(|c| c.fract()).collect())
    }

    /// Drop the coefficient of a removed ray.
    pub fn without(&self, ray: usize) -> TDivisor {
        let mut v = self.0.clone();
        v.remove(ray);
        TDivisor(v)
    }

    /// Coefficient-wise comparison `self <= other`.
    pub fn le(&self, other: &TDivisor) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `D . C` for a wall curve.
    pub fn dot(&self, w: &Wall) -> Scalar {
        self.dot_pairing(&w.pairing)
    }

    pub fn dot_pairing(&self, pairing: &[Rat]) -> Scalar {
        self.0
            .iter()
            .zip(pairing)
            .filter(|(_, p)| !p.is_zero())
            .map(|(c, p)| c * &Scalar::rational(p.clone()))
            .sum()
    }

    /// Least common multiple of the denominators; `None` if irrational.
    pub fn denominator(&self) -> Option<BigInt> {
        let mut l = BigInt::one();
        for c in &self.0 {
            l = l.lcm(&c.as_rational()?.denom());
        }
        Some(l)
    }

    /// Split `a + sqrt(s) b` into rational divisors `a`, `b` and the root.
    pub fn split_quadratic(&self) -> (TDivisor, TDivisor, u32) {
        let root = self.0.iter().map(|c| c.root()).max().unwrap_or(0);
        (
            TDivisor(self.0.iter().map(|c| Scalar::rational(c.rational_part().clone())).collect()),
            TDivisor(self.0.iter().map(|c| Scalar::rational(c.irrational_part().clone())).collect()),
            root,
        )
    }

    pub fn to_rats(&self) -> Option<Vec<Rat>> {
        self.0.iter().map(|c| c.as_rational().cloned()).collect()
    }

    pub fn to_ints(&self) -> Option<Vec<i64>> {
        self.0
            .iter()
            .map(|c| c.as_rational().and_then(|r| r.to_i64()))
            .collect()
    }

    /// Divisor of the character `chi^m`: coefficient `<m, u_rho>`.
    pub fn principal(fan: &Fan, m: &[Rat]) -> TDivisor {
        TDivisor(
            fan.rays()
                .iter()
                .map(|u| Scalar::rational(u.iter().zip(m).map(|(&a, x)| x * &Rat::from_int(a)).sum()))
                .collect(),
        )
    }
}

impl Add for &TDivisor {
    type Output = TDivisor;
    fn add(self, o: &TDivisor) -> TDivisor {
        assert_eq!(self.0.len(), o.0.len(), "divisors on different fans");
        TDivisor(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &TDivisor {
    type Output = TDivisor;
    fn sub(self, o: &TDivisor) -> TDivisor {
        assert_eq!(self.0.len(), o.0.len(), "divisors on different fans");
        TDivisor(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }
}

impl Add for TDivisor {
    type Output = TDivisor;
    fn add(self, o: TDivisor) -> TDivisor {
        &self + &o
    }
}

impl Sub for TDivisor {
    type Output = TDivisor;
    fn sub(self, o: TDivisor) -> TDivisor {
        &self - &o
    }
}

impl Neg for &TDivisor {
    type Output = TDivisor;
    fn neg(self) -> TDivisor {
        TDivisor(self.0.iter().map(|c| -c).collect())
    }
}

impl Mul<&Scalar> for &TDivisor {
    type Output = TDivisor;
    fn mul(self, s: &Scalar) -> TDivisor {
        self.scale(s)
    }
}

/// `K = -sum D_rho`.
pub fn canonical_divisor(fan: &Fan) -> TDivisor {
    TDivisor::from_ints(&vec![-1; fan.num_rays()])
}

/// A general member of a free linear system, carried numerically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ghost {
    pub class: TDivisor,
    pub weight: Scalar,
}

/// A pair `(X, Delta)` with invariant boundary and ghost components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToricPair {
    pub fan: Fan,
    pub boundary: TDivisor,
    pub ghosts: Vec<Ghost>,
}

impl ToricPair {
    /// Validated constructor: boundary coefficients in `[0,1]`, ghost
    /// weights in `[0,1)`, ghost classes base-point free.
    pub fn new(fan: Fan, boundary: TDivisor, ghosts: Vec<Ghost>) -> Result<ToricPair> {
        if boundary.len() != fan.num_rays() {
            return Err(Error::Invalid("boundary length differs from ray count".into()));
        }
        for (i, c) in boundary.coeffs().iter().enumerate() {
            if c.is_negative() || *c > Scalar::one() {
                return Err(Error::Invalid(format!("boundary coefficient {c} of ray {i} is outside [0,1]")));
            }
        }
        for g in &ghosts {
            if g.class.len() != fan.num_rays() {
                return Err(Error::Invalid("ghost class length differs from ray count".into()));
            }
            if g.weight.is_negative() || g.weight >= Scalar::one() {
                return Err(Error::Invalid(format!("ghost weight {} is outside [0,1)", g.weight)));
            }
            if !is_free(&fan, &g.class)? {
                return Err(Error::Invalid(format!("ghost class {} is not base-point free", g.class)));
            }
        }
        Ok(ToricPair { fan, boundary, ghosts })
    }

    /// Pair with zero boundary and no ghosts.
    pub fn plain(fan: Fan) -> ToricPair {
        let n = fan.num_rays();
        ToricPair {
            fan,
            boundary: TDivisor::zero(n),
            ghosts: vec![],
        }
    }

    /// Constructor used internally (weights up to 1, classes transported).
    pub(crate) fn raw(fan: Fan, boundary: TDivisor, ghosts: Vec<Ghost>) -> ToricPair {
        ToricPair { fan, boundary, ghosts }
    }

    /// `Delta` as a divisor class: boundary plus weighted ghost classes.
    pub fn delta(&self) -> TDivisor {
        let mut d = self.boundary.clone();
        for g in &self.ghosts {
            d = &d + &g.class.scale(&g.weight);
        }
        d
    }

    /// `K + Delta`.
    pub fn log_canonical(&self) -> TDivisor {
        &canonical_divisor(&self.fan) + &self.delta()
    }

    /// Rays with boundary coefficient exactly 1.
    pub fn reduced_boundary(&self) -> BTreeSet<usize> {
        (0..self.boundary.len())
            .filter(|&i| *self.boundary.coeff(i) == Scalar::one())
            .collect()
    }

    pub fn with_ghost(&self, class: TDivisor, weight: Scalar) -> ToricPair {
        let mut p = self.clone();
        p.ghosts.push(Ghost { class, weight });
        p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Positivity {
    pub effective: bool,
    pub nef: bool,
    pub ample: bool,
    pub big: bool,
    pub semiample: bool,
    pub pseudoeffective: bool,
    pub mobile: bool,
}

pub fn intersection(d: &TDivisor, w: &Wall) -> Scalar {
    d.dot(w)
}

pub fn is_nef(fan: &Fan, d: &TDivisor) -> Result<bool> {
    fan.require_complete_simplicial()?;
    Ok(fan.walls()?.iter().all(|w| !d.dot(w).is_negative()))
}

pub fn is_ample(fan: &Fan, d: &TDivisor) -> Result<bool> {
    fan.require_complete_simplicial()?;
    Ok(fan.walls()?.iter().all(|w| d.dot(w).is_positive()))
}

pub fn is_big(fan: &Fan, d: &TDivisor) -> Result<bool> {
    if !fan.is_complete() {
        return Err(Error::IncompleteFan);
    }
    Ok(SectionPolytope::new(fan, d).is_full_dimensional())
}

/// Pseudo-effective, certified by nonemptiness of the real section polytope
/// (the effective cone of a complete toric variety is closed and spanned by
/// the ray divisors).
pub fn is_pseudoeffective(fan: &Fan, d: &TDivisor) -> Result<bool> {
    if !fan.is_complete() {
        return Err(Error::IncompleteFan);
    }
    Ok(!SectionPolytope::new(fan, d).is_empty())
}

/// Asymptotic fixed part: `N_rho = min_{m in P_D} <m,u_rho> + d_rho`.
/// `None` when `D` is not pseudo-effective.
pub fn sigma_fixed_part(fan: &Fan, d: &TDivisor) -> Result<Option<TDivisor>> {
    if !fan.is_complete() {
        return Err(Error::IncompleteFan);
    }
    let p = SectionPolytope::new(fan, d);
    if p.is_empty() {
        return Ok(None);
    }
    let mut out = Vec::with_capacity(fan.num_rays());
    for i in 0..fan.num_rays() {
        out.push(p.min_slack(i).expect("nonempty"));
    }
    Ok(Some(TDivisor(out)))
}

pub fn positivity(fan: &Fan, d: &TDivisor) -> Result<Positivity> {
    fan.require_complete_simplicial()?;
    let nef = is_nef(fan, d)?;
    let ample = is_ample(fan, d)?;
    let big = is_big(fan, d)?;
    let n_sigma = sigma_fixed_part(fan, d)?;
    let pseff = n_sigma.is_some();
    Ok(Positivity {
        effective: pseff,
        nef,
        ample,
        big,
        semiample: nef,
        pseudoeffective: pseff,
        mobile: n_sigma.map(|n| n.is_zero()).unwrap_or(false),
    })
}

/// `h^0(D)`: lattice points of the section polytope.
pub fn h0(fan: &Fan, d: &TDivisor) -> Result<usize> {
    if !fan.is_complete() {
        return Err(Error::IncompleteFan);
    }
    SectionPolytope::new(fan, d).count()
}

/// Base-point freeness of an integral divisor: on every maximal cone the
/// local character is integral and a section.
pub fn is_free(fan: &Fan, d: &TDivisor) -> Result<bool> {
    if !d.is_integral() {
        return Ok(false);
    }
    let p = SectionPolytope::new(fan, d);
    for cone in fan.cones() {
        let Some(m) = local_character(fan, cone, d) else {
            return Ok(false);
        };
        let Some(mi) = m.iter().map(|x| x.to_i64()).collect::<Option<Vec<i64>>>() else {
            return Ok(false);
        };
        if !p.contains_lattice_point(&mi) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The `m` with `<m, u_rho> = -d_rho` on the rays of a cone, when it is
/// unique and rational.
pub fn local_character(fan: &Fan, cone: &[usize], d: &TDivisor) -> Option<Vec<Rat>> {
    let rows: Vec<Vec<i64>> = cone.iter().map(|&i| fan.ray(i).to_vec()).collect();
    let a = to_rat_matrix(&rows);
    let b: Vec<Rat> = cone
        .iter()
        .map(|&i| d.coeff(i).as_rational().map(|r| -r))
        .collect::<Option<_>>()?;
    if linalg::rank(&a) < fan.rank() {
        return None;
    }
    linalg::solve(&a, &b)
}

/// `Mob(D)` and `Fix(D)` for an integral divisor with sections.
pub fn mobile_fixed(fan: &Fan, d: &TDivisor) -> Result<(TDivisor, TDivisor)> {
    if !d.is_integral() {
        return Err(Error::Precondition(format!("mobile/fixed needs an integral divisor, got {d}")));
    }
    if !fan.is_complete() {
        return Err(Error::IncompleteFan);
    }
    let Some(fix) = SectionPolytope::new(fan, d).lattice_min_slacks()? else {
        return Err(Error::NoSections);
    };
    let fix = TDivisor::from_ints(&fix);
    Ok((d - &fix, fix))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseLocus {
    Rays(BTreeSet<usize>),
    All,
}

/// Divisorial part of the stable base locus.
///
/// Rational `D`: fixed rays at levels `m` and `2m` starting from the
/// denominator, doubling up to `2^cap_log2` before giving up.
/// Quadratic `D`: support of the asymptotic fixed part.
pub fn stable_base_locus(fan: &Fan, d: &TDivisor) -> Result<BaseLocus> {
    stable_base_locus_with_cap(fan, d, 6)
}

pub fn stable_base_locus_with_cap(fan: &Fan, d: &TDivisor, cap_log2: u32) -> Result<BaseLocus> {
    if !fan.is_complete() {
        return Err(Error::IncompleteFan);
    }
    let Some(den) = d.denominator() else {
        return Ok(match sigma_fixed_part(fan, d)? {
            None => BaseLocus::All,
            Some(n) => BaseLocus::Rays(n.support()),
        });
    };
    let m0 = den.to_i64().ok_or_else(|| Error::Invalid("denominator overflow".into()))?;
    let fixed_at = |m: i64| -> Result<Option<BTreeSet<usize>>> {
        let md = d.scale(&Scalar::int(m));
        match mobile_fixed(fan, &md) {
            Ok((_, fix)) => Ok(Some(fix.support())),
            Err(Error::NoSections) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let mut prev = fixed_at(m0)?;
    let mut any = prev.is_some();
    for j in 1..=cap_log2 {
        let cur = fixed_at(m0 << j)?;
        any |= cur.is_some();
        if let (Some(a), Some(b)) = (&prev, &cur) {
            if a == b {
                return Ok(BaseLocus::Rays(b.clone()));
            }
        }
        prev = cur;
    }
    if !any {
        return Ok(BaseLocus::All);
    }
    Err(Error::Unstable(1u64 << cap_log2))
}

pub fn round_down(d: &TDivisor) -> TDivisor {
    d.floor()
}

pub fn fractional_part(d: &TDivisor) -> TDivisor {
    d.fract()
}

/// Class of `D` in `Pic(X) (x) Q`, as the vector of intersection numbers with
/// every wall. Equal vectors mean numerically equivalent divisors.
pub fn numerical_class(fan: &Fan, d: &TDivisor) -> Result<Vec<Scalar>> {
    Ok(fan.walls()?.iter().map(|w| d.dot(w)).collect())
}

/// True if `a - b` is the divisor of a rational character.
pub fn linearly_equivalent(fan: &Fan, a: &TDivisor, b: &TDivisor) -> bool {
    let diff = a - b;
    let Some(target) = diff.to_rats() else {
        // compare rational and irrational parts separately
        let (x, y, _) = diff.split_quadratic();
        return linearly_equivalent(fan, &x, &TDivisor::zero(x.len()))
            && linearly_equivalent(fan, &y, &TDivisor::zero(y.len()));
    };
    let a_mat = to_rat_matrix(fan.rays());
    linalg::solve(&a_mat, &target).is_some()
}

/// Translate `D` by a rational character so that its coefficients on the
/// rays of `cone` vanish.
pub fn normalize_on_cone(fan: &Fan, cone: &[usize], d: &TDivisor) -> Option<TDivisor> {
    let m = local_character(fan, cone, d)?;
    Some(d + &TDivisor::principal(fan, &m))
}

/// The rays of `fan` as columns, handy for callers building relation
/// matrices.
pub fn ray_matrix_transposed(fan: &Fan) -> Vec<Vec<Rat>> {
    to_rat_matrix(&transpose(fan.rays()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::named::*;

    fn div(v: &[i64]) -> TDivisor {
        TDivisor::from_ints(v)
    }

    #[test]
    fn canonical_examples() {
        let f = p2();
        let mk = -&canonical_divisor(&f);
        assert!(is_ample(&f, &mk).unwrap());
        let f2 = hirzebruch(2);
        let mk2 = -&canonical_divisor(&f2);
        assert!(is_nef(&f2, &mk2).unwrap());
        assert!(!is_ample(&f2, &mk2).unwrap());
    }

    #[test]
    fn positivity_examples() {
        let f = p2();
        let p = positivity(&f, &div(&[1, 1, 1])).unwrap();
        assert!(p.ample && p.big && p.nef);
        let p0 = positivity(&f, &div(&[0, 0, 0])).unwrap();
        assert!(p0.nef && p0.semiample && !p0.big);
        let f1 = hirzebruch(1);
        let e = positivity(&f1, &TDivisor::prime(4, 1)).unwrap();
        assert!(e.effective && !e.nef && !e.mobile);
    }

    #[test]
    fn mobile_fixed_examples() {
        let f1 = hirzebruch(1);
        let (mob, fix) = mobile_fixed(&f1, &div(&[0, 2, 0, 0])).unwrap();
        assert!(mob.is_zero());
        assert_eq!(fix, div(&[0, 2, 0, 0]));
        let (_, fix) = mobile_fixed(&f1, &div(&[1, 0, 1, 2])).unwrap();
        assert!(fix.is_zero());
        assert_eq!(mobile_fixed(&p2(), &div(&[-1, 0, 0])).unwrap_err(), Error::NoSections);
    }

    #[test]
    fn base_locus_examples() {
        let f1 = hirzebruch(1);
        assert_eq!(stable_base_locus(&f1, &div(&[1, 0, 0, 1])).unwrap(), BaseLocus::Rays(BTreeSet::new()));
        assert_eq!(
            stable_base_locus(&f1, &div(&[0, 2, 0, 0])).unwrap(),
            BaseLocus::Rays([1].into_iter().collect())
        );
        let f = p2();
        assert_eq!(stable_base_locus(&f, &canonical_divisor(&f)).unwrap(), BaseLocus::All);
    }

    #[test]
    fn rounding() {
        let d = TDivisor::new(vec![Scalar::frac(3, 2), Scalar::frac(-1, 2)]);
        assert_eq!(round_down(&d), div(&[1, -1]));
        assert_eq!(fractional_part(&d), TDivisor::new(vec![Scalar::frac(1, 2), Scalar::frac(1, 2)]));
        let q = TDivisor::new(vec![Scalar::parse("1/2+1/2*sqrt(2)").unwrap()]);
        assert_eq!(round_down(&q), div(&[1]));
    }

    #[test]
    fn freeness() {
        let f1 = hirzebruch(1);
        assert!(is_free(&f1, &div(&[1, 0, 0, 0])).unwrap());
        assert!(!is_free(&f1, &div(&[0, 1, 0, 0])).unwrap());
        assert!(is_free(&f1, &div(&[0, 0, 0, 1])).unwrap());
    }

    #[test]
    fn ghost_rules() {
        let f = p2();
        let ok = ToricPair::new(
            f.clone(),
            TDivisor::zero(3),
            vec![Ghost { class: div(&[7, 0, 0]), weight: Scalar::frac(1, 2) }],
        )
        .unwrap();
        assert_eq!(ok.log_canonical(), TDivisor::new(vec![Scalar::frac(5, 2), Scalar::int(-1), Scalar::int(-1)]));
        let bad = ToricPair::new(
            f,
            TDivisor::zero(3),
            vec![Ghost { class: div(&[1, 0, 0]), weight: Scalar::one() }],
        );
        assert!(bad.is_err());
    }
}
