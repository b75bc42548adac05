//! Consequences of the existence of minimal models: Mori fiber spaces,
//! finite generation of the canonical ring, the Cox ring.

use num_traits::ToPrimitive;

use crate::arith::Scalar;
use crate::curves::nef_shift;
use crate::divisor::{canonical_divisor, h0, is_ample, is_pseudoeffective, TDivisor, ToricPair};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::linalg::{nullspace, primitive_from_rats, to_rat_matrix, transpose};
use crate::lp::{Lp, LpResult, Sense};
use crate::adjoint::{minimal_generators, verify_generators, GradedSemigroup};

use super::{bending::BendingReport, minimal_model, mmp_with_scaling, Outcome, Trace};

/// Least `c >= 0` with `K + Delta + c H` pseudo-effective, by LP over the
/// effective cone. `None` if no such `c` exists.
pub fn pseudoeffective_threshold(p: &ToricPair, h: &TDivisor) -> Result<Option<Scalar>> {
    let fan = &p.fan;
    let (r, n) = (fan.num_rays(), fan.rank());
    let d = p.log_canonical();
    // variables: c, a_rho (>= 0), m (free)
    let mut lp = Lp::<Scalar>::new(1 + r + n);
    for k in 0..n {
        lp.set_free(1 + r + k, true);
    }
    for rho in 0..r {
        let mut row = vec![Scalar::zero(); 1 + r + n];
        row[0] = h.coeff(rho).clone();
        row[1 + rho] = -Scalar::one();
        for k in 0..n {
            row[1 + r + k] = Scalar::int(fan.ray(rho)[k]);
        }
        lp.constraint(row, Sense::Eq, -d.coeff(rho).clone());
    }
    let mut obj = vec![Scalar::zero(); 1 + r + n];
    obj[0] = Scalar::one();
    lp.minimize(obj);
    Ok(match lp.solve() {
        LpResult::Optimal { value, .. } => Some(value),
        _ => None,
    })
}

/// For `K + Delta` not pseudo-effective: the threshold `c` and a scaling
/// run with `H` ending in a Mori fiber space at `t = c`.
pub fn mori_fiber_space(p: &ToricPair, h: &TDivisor) -> Result<(Scalar, Trace)> {
    if is_pseudoeffective(&p.fan, &p.log_canonical())? {
        return Err(Error::AlreadyPseudoEffective);
    }
    let c = pseudoeffective_threshold(p, h)?
        .ok_or_else(|| Error::Precondition("no multiple of H makes K + Delta pseudo-effective".into()))?;
    let shift = nef_shift(&p.fan, &p.log_canonical(), h)?;
    let t0 = if shift > c { shift } else { c.clone() };
    let trace = mmp_with_scaling(p, h, &t0)?;
    match (&trace.outcome, &trace.t_final) {
        (Outcome::MoriFiberSpace, Some(t)) if *t == c => Ok((c, trace)),
        (Outcome::MoriFiberSpace, t) => Err(Error::Invariant(format!(
            "fibering at t = {} but the threshold is {c}",
            t.as_ref().map(|x| x.to_string()).unwrap_or_default()
        ))),
        (o, _) => Err(Error::Invariant(format!("scaling below the threshold ended with {o}"))),
    }
}

/// `h^0(d L)` for `d = 0..=max_degree`.
pub fn hilbert_function(fan: &Fan, l: &TDivisor, max_degree: usize) -> Result<Vec<usize>> {
    (0..=max_degree)
        .map(|d| h0(fan, &l.scale(&Scalar::int(d as i64))))
        .collect()
}

#[derive(Clone, Debug)]
pub struct RingReport {
    /// `L = k (K + Delta)` is the integral divisor whose section ring is
    /// computed.
    pub k: i64,
    pub l: TDivisor,
    /// Largest degree of a minimal generator found.
    pub bound: usize,
    pub generators: Vec<(usize, Vec<i64>)>,
    /// Generators of degree at most `bound` produce every degree up to
    /// `3 * bound`.
    pub verified: bool,
    pub model: BendingReport,
}

fn sections(fan: &Fan, l: &TDivisor) -> GradedSemigroup {
    GradedSemigroup::Sections {
        normals: fan.rays().to_vec(),
        l: l.coeffs().to_vec(),
    }
}

/// Minimal generators `(degree, m)` of the section semigroup
/// `{(m, d) : m in P_{dL}}` up to degree `cap`.
pub fn section_generators(fan: &Fan, l: &TDivisor, cap: usize) -> Result<Vec<(usize, Vec<i64>)>> {
    minimal_generators(&sections(fan, l), 1, cap)
}

/// True if the given generators produce every lattice point of `P_{dL}`
/// for `d <= up_to`.
pub fn generators_suffice(fan: &Fan, l: &TDivisor, gens: &[(usize, Vec<i64>)], up_to: usize) -> Result<bool> {
    verify_generators(&sections(fan, l), 1, gens, up_to)
}

/// Run the minimal model program, then certify finite generation of the
/// section ring of `k (K + Delta)` on the result.
pub fn canonical_ring_fg(p: &ToricPair) -> Result<RingReport> {
    let model = minimal_model(p)?;
    let fin = model.final_pair().clone();
    let d = fin.log_canonical();
    if !d.is_rational() {
        return Err(Error::Precondition("canonical ring needs rational K + Delta".into()));
    }
    let k = d
        .denominator()
        .and_then(|x| x.to_i64())
        .ok_or_else(|| Error::Invalid("denominator overflow".into()))?;
    let l = d.scale(&Scalar::int(k));
    let cap = 2 * (fin.fan.rank() + 1);
    let gens = section_generators(&fin.fan, &l, cap)?;
    let bound = gens.iter().map(|g| g.0).max().unwrap_or(1).max(1);
    let verified = bound < cap && generators_suffice(&fin.fan, &l, &gens, 3 * bound)?;
    Ok(RingReport {
        k,
        l,
        bound,
        generators: gens,
        verified,
        model,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxRing {
    pub generators: usize,
    pub grading_rank: usize,
    /// Degree of each ray variable in a basis of the (free part of the)
    /// class group.
    pub grading: Vec<Vec<i64>>,
    pub fano: bool,
}

/// The Cox ring of a complete simplicial toric variety: a polynomial ring
/// on the ray variables, graded by the class group.
pub fn cox_ring(fan: &Fan) -> Result<CoxRing> {
    fan.require_complete_simplicial()?;
    let m = to_rat_matrix(&transpose(fan.rays()));
    let basis: Vec<Vec<i64>> = nullspace(&m, fan.num_rays())
        .iter()
        .map(|v| primitive_from_rats(v).expect("nonzero relation"))
        .collect();
    let grading = (0..fan.num_rays())
        .map(|rho| basis.iter().map(|b| b[rho]).collect())
        .collect();
    let fano = is_ample(fan, &-&canonical_divisor(fan))?;
    Ok(CoxRing {
        generators: fan.num_rays(),
        grading_rank: basis.len(),
        grading,
        fano,
    })
}
