//! The roundabout MMP: decompose `K + Delta`, raise the boundary along the
//! base locus, then run nested scaling MMPs whose flips all meet the
//! reduced boundary.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;

use crate::arith::{continued_fraction, convergents, Rat, Scalar};
use crate::birational::{singularity_class, SingClass};
use crate::curves::{ample_divisor, nef_shift};
use crate::divisor::{
    is_big, is_free, is_nef, is_pseudoeffective, mobile_fixed, sigma_fixed_part, stable_base_locus, BaseLocus, Ghost,
    TDivisor, ToricPair,
};
use crate::error::{Error, Result};

use super::{scaling_run, Candidate, Model, Outcome, Strategy, StrategyChooser, Trace};

/// `K + Delta = sum r_i M_i + F` with free integral `M_i`, `r_i` ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    /// Multiple at which the mobile part was read off (rational case).
    pub level: Option<i64>,
    pub r: Vec<Scalar>,
    pub mobile: Vec<TDivisor>,
    pub fixed: TDivisor,
}

#[derive(Clone, Debug)]
pub struct BendingReport {
    pub decomposition: Option<Decomposition>,
    /// Rays raised to coefficient one.
    pub base_locus: BTreeSet<usize>,
    pub stages: Vec<(String, Trace)>,
    /// Final model, boundary restored to the original `Delta`.
    pub last: Model,
}

impl BendingReport {
    pub fn final_pair(&self) -> &ToricPair {
        &self.last.pair
    }

    pub fn step_count(&self) -> usize {
        self.stages.iter().map(|(_, t)| t.steps.len()).sum()
    }
}

fn check_preconditions(p: &ToricPair) -> Result<()> {
    if singularity_class(&p.fan, &p.boundary)? < SingClass::Klt {
        return Err(Error::Precondition("pair is not klt".into()));
    }
    if !is_big(&p.fan, &p.delta())? {
        return Err(Error::NotBig);
    }
    if !is_pseudoeffective(&p.fan, &p.log_canonical())? {
        return Err(Error::NotPseudoEffective);
    }
    Ok(())
}

fn identity(p: &ToricPair) -> BendingReport {
    BendingReport {
        decomposition: None,
        base_locus: BTreeSet::new(),
        stages: vec![],
        last: Model::new(p.clone()),
    }
}

const MAX_LEVEL: i64 = 64;

fn decompose_rational(p: &ToricPair) -> Result<(Decomposition, BTreeSet<usize>)> {
    let d = p.log_canonical();
    let sbl = match stable_base_locus(&p.fan, &d)? {
        BaseLocus::All => return Err(Error::NotPseudoEffective),
        BaseLocus::Rays(r) => r,
    };
    let k = d
        .denominator()
        .and_then(|x| x.to_i64())
        .ok_or_else(|| Error::DecompositionFailed("coefficients are not rational".into()))?;
    for j in 1..=MAX_LEVEL {
        let m = k * j;
        let md = d.scale(&Scalar::int(m));
        let (mob, fix) = match mobile_fixed(&p.fan, &md) {
            Ok(x) => x,
            Err(Error::NoSections) => continue,
            Err(e) => return Err(e),
        };
        if !fix.support().is_subset(&sbl) || !is_free(&p.fan, &mob)? {
            continue;
        }
        let inv = Scalar::frac(1, m);
        let (r, mobile) = if mob.is_zero() { (vec![], vec![]) } else { (vec![inv.clone()], vec![mob]) };
        return Ok((
            Decomposition {
                level: Some(m),
                r,
                mobile,
                fixed: fix.scale(&inv),
            },
            sbl,
        ));
    }
    Err(Error::DecompositionFailed(format!(
        "no level k*j (k = {k}, j <= {MAX_LEVEL}) has a free mobile part with fixed part in the base locus"
    )))
}

/// Smallest multiple of a nef rational divisor that is integral and free.
fn free_multiple(p: &ToricPair, a: &TDivisor) -> Result<Option<(i64, TDivisor)>> {
    let c0 = a.denominator().and_then(|x| x.to_i64()).unwrap_or(1);
    for j in 1..=12 {
        let m = a.scale(&Scalar::int(c0 * j));
        if is_free(&p.fan, &m)? {
            return Ok(Some((c0 * j, m)));
        }
    }
    Ok(None)
}

/// Quadratic coefficients: `F = N_sigma`, `P = D - F` nef, then
/// `P = theta A_1 + (1 - theta) A_2` with rational nef `A_i` obtained by
/// bracketing the square root between continued-fraction convergents.
fn decompose_quadratic(p: &ToricPair) -> Result<(Decomposition, BTreeSet<usize>)> {
    let d = p.log_canonical();
    let f = sigma_fixed_part(&p.fan, &d)?.ok_or(Error::NotPseudoEffective)?;
    let pos = &d - &f;
    if !is_nef(&p.fan, &pos)? {
        return Err(Error::DecompositionFailed("positive part is not nef".into()));
    }
    let sbl = f.support();
    let (pa, pb, root) = pos.split_quadratic();
    let mut parts: Vec<(Scalar, TDivisor)> = Vec::new();
    if pb.is_zero() {
        if !pa.is_zero() {
            let (c, m) = free_multiple(p, &pa)?
                .ok_or_else(|| Error::DecompositionFailed("no free multiple of the positive part".into()))?;
            parts.push((Scalar::frac(1, c), m));
        }
    } else {
        let s = Scalar::sqrt(root);
        let conv = convergents(&continued_fraction(&s, 40));
        let mut found = None;
        for w in conv.windows(2) {
            let x = Rat::from_big(num_rational::BigRational::new(w[0].0.clone(), w[0].1.clone()));
            let y = Rat::from_big(num_rational::BigRational::new(w[1].0.clone(), w[1].1.clone()));
            let (q, q2) = if x < y { (x, y) } else { (y, x) };
            let a1 = &pa + &pb.scale(&Scalar::rational(q.clone()));
            let a2 = &pa + &pb.scale(&Scalar::rational(q2.clone()));
            if is_nef(&p.fan, &a1)? && is_nef(&p.fan, &a2)? {
                found = Some((q, q2, a1, a2));
                break;
            }
        }
        let (q, q2, a1, a2) =
            found.ok_or_else(|| Error::DecompositionFailed("no convergent bracket keeps both parts nef".into()))?;
        let (qs, q2s) = (Scalar::rational(q), Scalar::rational(q2));
        let theta = (q2s.clone() - s) / (q2s - qs);
        for (w, a) in [(theta.clone(), a1), (Scalar::one() - theta, a2)] {
            if a.is_zero() {
                continue;
            }
            let (c, m) = free_multiple(p, &a)?
                .ok_or_else(|| Error::DecompositionFailed(format!("no free multiple of {a}")))?;
            parts.push((w / Scalar::int(c), m));
        }
    }
    parts.sort_by(|a, b| a.0.cmp(&b.0));
    let (r, mobile) = parts.into_iter().unzip();
    Ok((
        Decomposition {
            level: None,
            r,
            mobile,
            fixed: f,
        },
        sbl,
    ))
}

/// Locus condition of the scaling-to-boundary lemma: the negative part of
/// the ray meets `supp(F+)` inside the reduced boundary, or the ray is
/// negative on a boundary ghost `M_i`.
fn locus_in_boundary(model: &Model, cand: &Candidate, ghosts_from: usize) -> Result<()> {
    let f_plus = &model.passengers[0];
    let reduced = model.pair.reduced_boundary();
    let in_f = cand
        .action
        .j_minus
        .iter()
        .any(|&j| f_plus.coeff(j).is_positive() && reduced.contains(&j));
    let on_ghost = model.passengers[2 + ghosts_from..]
        .iter()
        .any(|m| cand.ray.dot(m).is_negative());
    if in_f || on_ghost {
        Ok(())
    } else {
        Err(Error::Invariant(format!(
            "ray of wall {} has locus outside the reduced boundary",
            cand.ray.wall
        )))
    }
}

/// Model for one stage: the first `n_orig` ghosts of `prev` are the
/// original ones, followed by `M_i` for `i >= ghost_from` at weight one.
fn stage_model(prev: &Model, n_orig: usize, ghost_from: usize, h: TDivisor) -> Model {
    let k = prev.passengers.len() - 2;
    let mut ghosts: Vec<Ghost> = prev.pair.ghosts[..n_orig].to_vec();
    for i in ghost_from..k {
        ghosts.push(Ghost {
            class: prev.passengers[2 + i].clone(),
            weight: Scalar::one(),
        });
    }
    Model {
        pair: ToricPair::raw(prev.pair.fan.clone(), prev.pair.boundary.clone(), ghosts),
        labels: prev.labels.clone(),
        h: Some(h),
        passengers: prev.passengers.clone(),
    }
}

fn run_stage(name: &str, model: Model, t_end: &Scalar, ghost_from: usize, stages: &mut Vec<(String, Trace)>) -> Result<Model> {
    let mut chooser = StrategyChooser::new(Strategy::FirstCritical);
    let mut hook = |m: &Model, c: &Candidate, _t: &Scalar| locus_in_boundary(m, c, ghost_from);
    let trace = scaling_run(model, &Scalar::one(), t_end, &mut chooser, &mut hook, None)?;
    match &trace.outcome {
        Outcome::MinimalModel => {}
        Outcome::MoriFiberSpace => {
            return Err(Error::Invariant(format!("stage {name} ended in a Mori fiber space")));
        }
        Outcome::Aborted(_) => return Err(Error::StepCap(trace.steps.len())),
    }
    let last = trace.last.clone();
    stages.push((name.to_string(), trace));
    Ok(last)
}

fn pipeline(p: &ToricPair, dec: Decomposition, sbl: BTreeSet<usize>) -> Result<BendingReport> {
    let n = p.fan.num_rays();
    let mut extra = TDivisor::zero(n);
    for &i in &sbl {
        extra.set(i, Scalar::one() - p.boundary.coeff(i).clone());
    }
    let f_plus = &dec.fixed + &extra;
    let plus = ToricPair::raw(p.fan.clone(), &p.boundary + &extra, p.ghosts.clone());
    let mut rhs = f_plus.clone();
    for (r, m) in dec.r.iter().zip(&dec.mobile) {
        rhs = &rhs + &m.scale(r);
    }
    if plus.log_canonical() != rhs {
        return Err(Error::Invariant("K + Delta+ differs from sum r_i M_i + F+".into()));
    }
    let k = dec.mobile.len();
    let mut passengers = vec![f_plus, extra];
    passengers.extend(dec.mobile.iter().cloned());
    let mut model = Model::new(plus.clone());
    model.passengers = passengers;

    let n_orig = p.ghosts.len();
    let mut stages = Vec::new();
    // add every M_i and scale an ample divisor away
    let start = stage_model(&model, n_orig, 0, TDivisor::zero(n));
    let a = ample_divisor(&p.fan)?;
    let shift = nef_shift(&p.fan, &start.pair.log_canonical(), &a)?;
    let c = shift.ceil().to_i64().unwrap_or(1).max(1);
    let mut start = start;
    start.h = Some(a.scale(&Scalar::int(c)));
    model = run_stage("ample", start, &Scalar::zero(), 0, &mut stages)?;

    for j in 0..k {
        let rj = dec.r[j].clone();
        let mut h = TDivisor::zero(model.pair.fan.num_rays());
        for i in 0..=j {
            h = &h + &model.passengers[2 + i].scale(&(dec.r[i].clone() / rj.clone()));
        }
        let t_end = if j + 1 < k { rj / dec.r[j + 1].clone() } else { Scalar::zero() };
        let m = stage_model(&model, n_orig, j + 1, h);
        model = run_stage(&format!("mobile-{}", j + 1), m, &t_end, j + 1, &mut stages)?;
    }

    // strip the useless divisor
    let boundary = &model.pair.boundary - &model.passengers[1];
    let last = Model {
        pair: ToricPair::raw(model.pair.fan.clone(), boundary, model.pair.ghosts[..n_orig].to_vec()),
        labels: model.labels.clone(),
        h: None,
        passengers: vec![],
    };
    if !is_nef(&last.pair.fan, &last.pair.log_canonical())? {
        return Err(Error::Invariant("K + Delta is not nef on the final model".into()));
    }
    Ok(BendingReport {
        decomposition: Some(dec),
        base_locus: sbl,
        stages,
        last,
    })
}

/// Bending with rational `K + Delta`.
pub fn bending_i(p: &ToricPair) -> Result<BendingReport> {
    check_preconditions(p)?;
    if is_nef(&p.fan, &p.log_canonical())? {
        return Ok(identity(p));
    }
    let (dec, sbl) = decompose_rational(p)?;
    pipeline(p, dec, sbl)
}

/// Bending with quadratic-field `K + Delta`.
pub fn bending_ii(p: &ToricPair) -> Result<BendingReport> {
    check_preconditions(p)?;
    if is_nef(&p.fan, &p.log_canonical())? {
        return Ok(identity(p));
    }
    let (dec, sbl) = if p.log_canonical().is_rational() { decompose_rational(p)? } else { decompose_quadratic(p)? };
    pipeline(p, dec, sbl)
}

pub fn minimal_model(p: &ToricPair) -> Result<BendingReport> {
    if p.log_canonical().is_rational() {
        bending_i(p)
    } else {
        bending_ii(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::named::*;
    use crate::mmp::{mmp_with_scaling, scaling_setup};

    fn f1_pair() -> ToricPair {
        let boundary = TDivisor::new(vec![Scalar::zero(), Scalar::frac(1, 2), Scalar::zero(), Scalar::zero()]);
        let ghost = Ghost {
            class: TDivisor::from_ints(&[0, 0, 0, 8]),
            weight: Scalar::frac(1, 2),
        };
        ToricPair::new(hirzebruch(1), boundary, vec![ghost]).unwrap()
    }

    #[test]
    fn bending_matches_scaling_on_f1() {
        let p = f1_pair();
        let b = bending_i(&p).unwrap();
        assert!(is_nef(&b.last.pair.fan, &b.last.pair.log_canonical()).unwrap());
        let (h, t0) = scaling_setup(&p).unwrap();
        let s = mmp_with_scaling(&p, &h, &t0).unwrap();
        assert!(b.last.pair.fan.is_isomorphic(&s.last.pair.fan));
        assert_eq!(b.base_locus, BTreeSet::from([1]));
    }

    #[test]
    fn nef_input_is_identity() {
        let p = ToricPair::new(
            p2(),
            TDivisor::zero(3),
            vec![Ghost {
                class: TDivisor::from_ints(&[7, 0, 0]),
                weight: Scalar::frac(1, 2),
            }],
        )
        .unwrap();
        let b = bending_i(&p).unwrap();
        assert!(b.stages.is_empty());
        assert!(b.decomposition.is_none());
    }

    #[test]
    fn not_big_rejected() {
        let p = ToricPair::plain(p2());
        assert_eq!(bending_i(&p).unwrap_err(), Error::NotBig);
    }

    #[test]
    fn quadratic_surface_pair() {
        // F1 with boundary sqrt(2)/2 on E and a large ghost
        let boundary = TDivisor::new(vec![
            Scalar::zero(),
            Scalar::quadratic(Rat::zero(), Rat::new(1, 2), 2),
            Scalar::zero(),
            Scalar::zero(),
        ]);
        let ghost = Ghost {
            class: TDivisor::from_ints(&[0, 0, 0, 8]),
            weight: Scalar::frac(1, 2),
        };
        let p = ToricPair::new(hirzebruch(1), boundary, vec![ghost]).unwrap();
        let b = bending_ii(&p).unwrap();
        assert!(is_nef(&b.last.pair.fan, &b.last.pair.log_canonical()).unwrap());
        assert!(b.last.pair.fan.is_isomorphic(&p2()));
    }
}
