//! Additive sequences, a-saturation on curves and divisors, the diophantine
//! approximation lemma, truncations and restricted algebras.

mod graded;
mod restricted;

pub use graded::{
    hilbert_basis_2d, minimal_generators, truncation_fg, verify_generators, FgVerdict, GradedSemigroup,
    TruncationReport,
};
pub use restricted::{restricted_algebra, AdjointAlgebraModel, RestrictedDegree};

use num_traits::ToPrimitive;

use crate::arith::{continued_fraction, Scalar};
use crate::divisor::{is_free, is_nef, mobile_fixed, TDivisor};
use crate::error::{Error, Result};
use crate::fan::Fan;

/// `B_1, ..., B_horizon`; each term is a coefficient vector (length one for
/// the curve-point model).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdditiveSequence {
    terms: Vec<TDivisor>,
}

impl AdditiveSequence {
    pub fn from_divisors(terms: Vec<TDivisor>) -> Result<AdditiveSequence> {
        let Some(first) = terms.first() else {
            return Err(Error::Invalid("empty sequence".into()));
        };
        if terms.iter().any(|t| t.len() != first.len()) {
            return Err(Error::Invalid("terms have different lengths".into()));
        }
        Ok(AdditiveSequence { terms })
    }

    /// Curve-point model: `B_i = m_i` times the point.
    pub fn from_multiplicities(m: &[i64]) -> Result<AdditiveSequence> {
        Self::from_divisors(m.iter().map(|&x| TDivisor::from_ints(&[x])).collect())
    }

    /// `B_m = Mob(m D)` for an integral `D` with sections.
    pub fn mobile_parts(fan: &Fan, d: &TDivisor, horizon: usize) -> Result<AdditiveSequence> {
        let terms = (1..=horizon)
            .map(|m| mobile_fixed(fan, &d.scale(&Scalar::int(m as i64))).map(|x| x.0))
            .collect::<Result<Vec<_>>>()?;
        Self::from_divisors(terms)
    }

    pub fn horizon(&self) -> usize {
        self.terms.len()
    }

    /// `B_m`, 1-based.
    pub fn term(&self, m: usize) -> &TDivisor {
        &self.terms[m - 1]
    }

    pub fn terms(&self) -> &[TDivisor] {
        &self.terms
    }
}

/// First `(i, j)` with `B_i + B_j` not below `B_{i+j}`.
pub fn check_additive(seq: &AdditiveSequence) -> Option<(usize, usize)> {
    let n = seq.horizon();
    for s in 2..=n {
        for i in 1..=s / 2 {
            let j = s - i;
            if !(seq.term(i) + seq.term(j)).le(seq.term(s)) {
                return Some((i, j));
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Limit {
    /// The supremum is attained: `B = B_i / i`.
    Exact { value: TDivisor, at: usize },
    /// Largest `B_m / m` seen and the given upper bound.
    Bracket { lower: TDivisor, upper: TDivisor },
}

/// Coefficient-wise supremum of `B_m / m`, given an upper bound for it.
pub fn convex_limit(seq: &AdditiveSequence, upper: &TDivisor) -> Result<Limit> {
    if upper.len() != seq.terms[0].len() {
        return Err(Error::Invalid("upper bound has the wrong length".into()));
    }
    let mut best: Option<(TDivisor, usize)> = None;
    for m in 1..=seq.horizon() {
        let q = seq.term(m).scale(&Scalar::frac(1, m as i64));
        if !q.le(upper) {
            return Err(Error::Unbounded(m));
        }
        let lower = match &best {
            None => q.clone(),
            Some((b, _)) => TDivisor::new(
                b.coeffs()
                    .iter()
                    .zip(q.coeffs())
                    .map(|(x, y)| x.clone().max(y.clone()))
                    .collect(),
            ),
        };
        let at = match &best {
            Some((b, at)) if *b == lower => *at,
            _ => m,
        };
        best = Some((lower, at));
    }
    let (lower, at) = best.expect("nonempty sequence");
    if lower == *upper && *seq.term(at) == upper.scale(&Scalar::int(at as i64)) {
        Ok(Limit::Exact { value: lower, at })
    } else {
        Ok(Limit::Bracket {
            lower,
            upper: upper.clone(),
        })
    }
}

/// Multiplicities `m_i` at a point of an affine curve with
/// `m_i + m_j <= m_{i+j}`, and the boundary coefficient `b < 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveAlgebraInstance {
    pub m: Vec<i64>,
    pub b: Scalar,
    /// Exact `sup m_i / i`, when known.
    pub d: Option<Scalar>,
}

impl CurveAlgebraInstance {
    pub fn new(m: Vec<i64>, b: Scalar, d: Option<Scalar>) -> Result<CurveAlgebraInstance> {
        if m.is_empty() {
            return Err(Error::Invalid("empty multiplicity sequence".into()));
        }
        if b >= Scalar::one() {
            return Err(Error::Invalid(format!("b = {b} is not below 1")));
        }
        let inst = CurveAlgebraInstance { m, b, d };
        if let Some((i, j)) = check_additive(&AdditiveSequence::from_multiplicities(&inst.m)?) {
            return Err(Error::Invalid(format!("m_{i} + m_{j} exceeds m_{}", i + j)));
        }
        if let Some(d) = &inst.d {
            if let Some(i) = (1..=inst.horizon()).find(|&i| inst.d_i(i) > *d) {
                return Err(Error::Invalid(format!("d_{i} exceeds the limit {d}")));
            }
        }
        Ok(inst)
    }

    /// `m_i = floor(i x)` for `i <= horizon`, with limit `x`.
    pub fn floor_multiples(x: &Scalar, b: Scalar, horizon: usize) -> Result<CurveAlgebraInstance> {
        let m = (1..=horizon as i64)
            .map(|i| {
                (x * &Scalar::int(i))
                    .floor()
                    .to_i64()
                    .ok_or_else(|| Error::Invalid("multiplicity overflow".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, b, Some(x.clone()))
    }

    pub fn horizon(&self) -> usize {
        self.m.len()
    }

    pub fn m_i(&self, i: usize) -> i64 {
        self.m[i - 1]
    }

    pub fn d_i(&self, i: usize) -> Scalar {
        Scalar::frac(self.m_i(i), i as i64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Saturation {
    pub saturated: bool,
    /// First `(i, j)` with `i >= j` violating the inequality.
    pub witness: Option<(usize, usize)>,
}

impl Saturation {
    fn from_witness(witness: Option<(usize, usize)>) -> Saturation {
        Saturation {
            saturated: witness.is_none(),
            witness,
        }
    }
}

/// `ceil(j d_i - b) <= j d_j` for `window >= i >= j > 0`.
pub fn saturation_check(inst: &CurveAlgebraInstance, window: usize) -> Result<Saturation> {
    if window > inst.horizon() {
        return Err(Error::Invalid(format!("window {window} exceeds horizon {}", inst.horizon())));
    }
    for i in 1..=window {
        let di = inst.d_i(i);
        for j in 1..=i {
            let lhs = (&di * &Scalar::int(j as i64) - &inst.b).ceil();
            if lhs > inst.m_i(j).into() {
                return Ok(Saturation::from_witness(Some((i, j))));
            }
        }
    }
    Ok(Saturation::from_witness(None))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RationalityCertificate {
    /// `d = d_j` at the least `j` with `j d` integral.
    Rational { d: Scalar, j: usize },
    /// `<j d> > b`, which contradicts saturation.
    IrrationalWitness { j: u64, fractional: Scalar },
}

/// Search bound `4 prod (a_k + 1)` over the first `terms` partial quotients.
fn cf_bound(d: &Scalar, terms: usize) -> (u64, Vec<i64>) {
    let q: Vec<i64> = continued_fraction(d, terms + 1)
        .iter()
        .skip(1)
        .map(|a| a.to_i64().unwrap_or(i64::MAX))
        .collect();
    let prod = q
        .iter()
        .try_fold(4u64, |acc, &a| acc.checked_mul(a.saturating_add(1) as u64))
        .unwrap_or(u64::MAX);
    (prod, q)
}

pub fn rationality_certificate(inst: &CurveAlgebraInstance) -> Result<RationalityCertificate> {
    let d = inst
        .d
        .clone()
        .ok_or_else(|| Error::Precondition("the exact limit d is required".into()))?;
    if let Some(r) = d.as_rational() {
        let j = r.denom().to_usize().ok_or_else(|| Error::Invalid("denominator overflow".into()))?;
        if j > inst.horizon() {
            return Err(Error::BoundExceeded {
                bound: inst.horizon() as u64,
                state: format!("d = {d} needs j = {j}"),
            });
        }
        if inst.d_i(j) != d {
            return Err(Error::Precondition(format!("d_{j} = {} differs from d = {d}: not saturated", inst.d_i(j))));
        }
        return Ok(RationalityCertificate::Rational { d, j });
    }
    let mut tried = 0u64;
    for terms in 1..=12 {
        let (bound, q) = cf_bound(&d, terms);
        for j in tried + 1..=bound.min(1 << 24) {
            let f = (&d * &Scalar::int(j as i64)).fract();
            if f > inst.b {
                return Ok(RationalityCertificate::IrrationalWitness { j, fractional: f });
            }
        }
        tried = bound.min(1 << 24);
        if terms == 12 || tried == 1 << 24 {
            return Err(Error::BoundExceeded {
                bound: tried,
                state: format!("partial quotients {q:?}"),
            });
        }
    }
    unreachable!()
}

/// `Mob ceil(j D_i + F) <= j D_j` for `window >= i >= j > 0`, with
/// `D_i = M_i / i`.
pub fn mob_saturation_divisor(fan: &Fan, mobiles: &[TDivisor], f: &TDivisor, window: usize) -> Result<Saturation> {
    if window > mobiles.len() {
        return Err(Error::Invalid(format!("window {window} exceeds {} terms", mobiles.len())));
    }
    if f.ceil().coeffs().iter().any(|c| c.is_negative()) {
        return Err(Error::Precondition("ceil(F) is not effective".into()));
    }
    for i in 1..=window {
        let di = mobiles[i - 1].scale(&Scalar::frac(1, i as i64));
        for j in 1..=i {
            let x = (&di.scale(&Scalar::int(j as i64)) + f).ceil();
            let mob = match mobile_fixed(fan, &x) {
                Ok((mob, _)) => mob,
                Err(Error::NoSections) => continue,
                Err(e) => return Err(e),
            };
            if !mob.le(&mobiles[j - 1]) {
                return Ok(Saturation::from_witness(Some((i, j))));
            }
        }
    }
    Ok(Saturation::from_witness(None))
}

/// Free integral `M` and `j` with `|j D - M|_sup < eps` and `j D - M` not
/// effective, for a nef `D` with an irrational coefficient.
pub fn diophantine_gap(fan: &Fan, d: &TDivisor, eps: &Scalar) -> Result<(TDivisor, u64)> {
    if d.is_rational() {
        return Err(Error::RationalD);
    }
    if !eps.is_positive() {
        return Err(Error::Invalid("eps must be positive".into()));
    }
    if !is_nef(fan, d)? {
        return Err(Error::Precondition("D is not semiample".into()));
    }
    const CAP: u64 = 1 << 20;
    for j in 1..=CAP {
        let jd = d.scale(&Scalar::int(j as i64));
        // integers within eps of each coefficient
        let mut choices: Vec<Vec<i64>> = Vec::with_capacity(jd.len());
        for c in jd.coeffs() {
            let lo = (c - eps).floor().to_i64().unwrap_or(i64::MIN) + 1;
            let hi = (c + eps).ceil().to_i64().unwrap_or(i64::MAX) - 1;
            let opts: Vec<i64> = (lo..=hi).filter(|&k| (Scalar::int(k) - c).abs() < *eps).collect();
            if opts.is_empty() {
                break;
            }
            choices.push(opts);
        }
        if choices.len() < jd.len() {
            continue;
        }
        let mut idx = vec![0usize; choices.len()];
        loop {
            let m: Vec<i64> = idx.iter().zip(&choices).map(|(&k, c)| c[k]).collect();
            let md = TDivisor::from_ints(&m);
            let gap = &jd - &md;
            if gap.coeffs().iter().any(|c| c.is_negative()) && is_free(fan, &md)? {
                return Ok((md, j));
            }
            let mut k = 0;
            while k < idx.len() {
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == idx.len() {
                break;
            }
        }
    }
    Err(Error::BoundExceeded {
        bound: CAP,
        state: "no approximation found".into(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveFgVerdict {
    Fg { d: Scalar, stabilizes_at: usize, generators: Vec<Vec<i64>> },
    SaturationFails { i: usize, j: usize },
    Unknown { window: usize },
}

/// The semigroup `{(a, i) : 0 <= a <= m_i}` of pole orders.
pub fn pole_order_semigroup(inst: &CurveAlgebraInstance) -> GradedSemigroup {
    let mut table = vec![vec![vec![0]]];
    for i in 1..=inst.horizon() {
        table.push((0..=inst.m_i(i)).map(|a| vec![a]).collect());
    }
    GradedSemigroup::Table(table)
}

/// Saturation and stabilization of `d_i` inside the window give a
/// rational limit attained at some `i`; finite generation is then certified
/// by generators of the pole-order semigroup.
pub fn fg_from_saturation_semiample(inst: &CurveAlgebraInstance, window: usize) -> Result<CurveFgVerdict> {
    let sat = saturation_check(inst, window)?;
    if let Some((i, j)) = sat.witness {
        return Ok(CurveFgVerdict::SaturationFails { i, j });
    }
    let best = (1..=window).map(|i| inst.d_i(i)).max().expect("window is positive");
    let at = (1..=window).find(|&i| inst.d_i(i) == best).expect("maximum is attained");
    let stable = (1..=window / at).all(|k| inst.d_i(k * at) == best);
    if !stable || inst.d.as_ref().is_some_and(|d| *d != best) {
        return Ok(CurveFgVerdict::Unknown { window });
    }
    let alg = pole_order_semigroup(inst);
    match graded::fg_verdict(&alg, 1, window)? {
        FgVerdict::Fg { generators, .. } => Ok(CurveFgVerdict::Fg {
            d: best,
            stabilizes_at: at,
            generators,
        }),
        _ => Ok(CurveFgVerdict::Unknown { window }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::named::*;

    fn half_floor(n: usize) -> CurveAlgebraInstance {
        CurveAlgebraInstance::floor_multiples(&Scalar::frac(1, 2), Scalar::frac(1, 2), n).unwrap()
    }

    #[test]
    fn additivity() {
        assert_eq!(check_additive(&AdditiveSequence::from_multiplicities(&[0, 1, 1, 2, 2]).unwrap()), None);
        assert_eq!(
            check_additive(&AdditiveSequence::from_multiplicities(&[1, 1, 5, 2]).unwrap()),
            Some((1, 1))
        );
        let seq = AdditiveSequence::mobile_parts(&hirzebruch(1), &TDivisor::from_ints(&[0, 0, 0, 1]), 6).unwrap();
        assert_eq!(check_additive(&seq), None);
    }

    #[test]
    fn limits() {
        let seq = AdditiveSequence::from_multiplicities(&half_floor(20).m).unwrap();
        let upper = TDivisor::new(vec![Scalar::frac(1, 2)]);
        assert_eq!(
            convex_limit(&seq, &upper).unwrap(),
            Limit::Exact { value: upper.clone(), at: 2 }
        );
        let sq = AdditiveSequence::from_multiplicities(&[1, 4, 9, 16]).unwrap();
        assert_eq!(convex_limit(&sq, &TDivisor::from_ints(&[3])).unwrap_err(), Error::Unbounded(4));
    }

    #[test]
    fn half_floor_is_saturated_and_rational() {
        let inst = half_floor(50);
        assert!(saturation_check(&inst, 50).unwrap().saturated);
        assert_eq!(
            rationality_certificate(&inst).unwrap(),
            RationalityCertificate::Rational { d: Scalar::frac(1, 2), j: 2 }
        );
        match fg_from_saturation_semiample(&inst, 50).unwrap() {
            CurveFgVerdict::Fg { stabilizes_at, .. } => assert_eq!(stabilizes_at, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn root_two_half_violates() {
        let x = Scalar::sqrt(2) * Scalar::frac(1, 2);
        let inst = CurveAlgebraInstance::floor_multiples(&x, Scalar::frac(9, 10), 60).unwrap();
        assert!(!saturation_check(&inst, 60).unwrap().saturated);
        match rationality_certificate(&inst).unwrap() {
            RationalityCertificate::IrrationalWitness { j, fractional } => {
                assert_eq!(j, 7);
                assert!(fractional > Scalar::frac(9, 10));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn diophantine_rejects_rational() {
        assert_eq!(
            diophantine_gap(&p2(), &TDivisor::from_ints(&[1, 0, 0]), &Scalar::frac(1, 10)).unwrap_err(),
            Error::RationalD
        );
    }

    #[test]
    fn diophantine_eps_one() {
        let d = TDivisor::new(vec![Scalar::sqrt(2) * Scalar::frac(1, 2), Scalar::zero(), Scalar::zero(), Scalar::zero()]);
        let (m, j) = diophantine_gap(&hirzebruch(1), &d, &Scalar::one()).unwrap();
        assert_eq!(j, 1);
        assert_eq!(m, TDivisor::from_ints(&[1, 0, 0, 0]));
    }

    #[test]
    fn constant_free_sequence_saturated() {
        let f1 = hirzebruch(1);
        let m = TDivisor::from_ints(&[1, 0, 0, 0]);
        let mobiles: Vec<TDivisor> = (1..=5).map(|i| m.scale(&Scalar::int(i))).collect();
        assert!(mob_saturation_divisor(&f1, &mobiles, &TDivisor::zero(4), 5).unwrap().saturated);
        let bad = TDivisor::from_ints(&[-1, 0, 0, 0]);
        assert!(matches!(
            mob_saturation_divisor(&f1, &mobiles, &bad, 5),
            Err(Error::Precondition(_))
        ));
    }
}
