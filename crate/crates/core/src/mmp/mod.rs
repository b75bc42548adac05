//! MMP drivers: Mori (free ray choice) and MMP with scaling, traces, special
//! termination and the useless-divisor augmentation.

mod bending;
mod corollaries;
mod finiteness;

pub use bending::{bending_i, bending_ii, minimal_model, BendingReport, Decomposition};
pub use corollaries::{
    canonical_ring_fg, cox_ring, hilbert_function, mori_fiber_space, pseudoeffective_threshold, CoxRing, RingReport,
};
pub use finiteness::{finiteness_explorer, model_at_point, ModelEntry, ModelSet};

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::Scalar;
use crate::birational::{
    analyze_ray, apply_step, center_in_exceptional, log_discrepancy_value, test_valuations, transport, ContractionKind,
    ContractionResult,
};
use crate::curves::{self, CurveClass};
use crate::divisor::{is_nef, stable_base_locus, BaseLocus, TDivisor, ToricPair};
use crate::error::{Error, Result};
use crate::linalg::binomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Default order: fibering, then divisorial, then flipping; smallest
    /// wall index within a kind.
    FirstCritical,
    DivisorialFirst,
    Random(u64),
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Strategy> {
        match s {
            "first-critical" => Ok(Strategy::FirstCritical),
            "divisorial-first" => Ok(Strategy::DivisorialFirst),
            "random" => Ok(Strategy::Random(0)),
            _ => Err(Error::Parse(format!("unknown strategy {s:?}"))),
        }
    }
}

/// A contractible extremal ray offered to a chooser.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub ray: CurveClass,
    pub action: ContractionResult,
}

/// Picks one of the (deterministically sorted) candidates.
pub trait Chooser {
    fn choose(&mut self, pair: &ToricPair, candidates: &[Candidate]) -> Result<usize>;
}

pub struct StrategyChooser {
    strategy: Strategy,
    rng: ChaCha8Rng,
}

impl StrategyChooser {
    pub fn new(strategy: Strategy) -> StrategyChooser {
        let seed = match strategy {
            Strategy::Random(s) => s,
            _ => 0,
        };
        StrategyChooser {
            strategy,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl Chooser for StrategyChooser {
    fn choose(&mut self, _pair: &ToricPair, candidates: &[Candidate]) -> Result<usize> {
        Ok(match self.strategy {
            Strategy::FirstCritical => 0,
            Strategy::DivisorialFirst => {
                let rank = |k: ContractionKind| match k {
                    ContractionKind::Divisorial => 0,
                    ContractionKind::Flipping => 1,
                    ContractionKind::Fibering => 2,
                };
                (0..candidates.len())
                    .min_by_key(|&i| (rank(candidates[i].action.kind), candidates[i].ray.wall))
                    .unwrap_or(0)
            }
            Strategy::Random(_) => self.rng.gen_range(0..candidates.len()),
        })
    }
}

/// A working model: the pair, the original index of every ray, the scaling
/// divisor and extra divisors carried along.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    pub pair: ToricPair,
    pub labels: Vec<usize>,
    pub h: Option<TDivisor>,
    pub passengers: Vec<TDivisor>,
}

impl Model {
    pub fn new(pair: ToricPair) -> Model {
        let labels = (0..pair.fan.num_rays()).collect();
        Model {
            pair,
            labels,
            h: None,
            passengers: vec![],
        }
    }

    pub fn with_h(mut self, h: TDivisor) -> Model {
        self.h = Some(h);
        self
    }

    /// Current index of an original ray.
    pub fn index_of(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    fn advance(&self, action: &ContractionResult) -> Result<Model> {
        let pair = apply_step(&self.pair, action)?;
        let mut labels = self.labels.clone();
        if let Some(e) = action.removed_ray {
            labels.remove(e);
        }
        Ok(Model {
            pair,
            labels,
            h: self.h.as_ref().map(|h| transport(h, action)),
            passengers: self.passengers.iter().map(|d| transport(d, action)).collect(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct Step {
    pub index: usize,
    /// Critical value (scaling runs only).
    pub t: Option<Scalar>,
    pub ray: CurveClass,
    /// Ray indices of the wall spanning the contracted curve.
    pub wall_rays: Vec<usize>,
    pub action: ContractionResult,
    /// Model before the step.
    pub model: Model,
    /// Canonical hash of the fan after the step (unchanged for fibering).
    pub model_hash: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    MinimalModel,
    MoriFiberSpace,
    Aborted(String),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::MinimalModel => f.write_str("MinimalModel"),
            Outcome::MoriFiberSpace => f.write_str("MoriFiberSpace"),
            Outcome::Aborted(r) => write!(f, "Aborted({r})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub steps: Vec<Step>,
    pub outcome: Outcome,
    /// Last model reached (the model before the fibering step for Mori fiber
    /// spaces).
    pub last: Model,
    /// Final value of the scaling parameter.
    pub t_final: Option<Scalar>,
}

impl Trace {
    pub fn final_pair(&self) -> &ToricPair {
        &self.last.pair
    }

    pub fn count(&self, kind: ContractionKind) -> usize {
        self.steps.iter().filter(|s| s.action.kind == kind).count()
    }

    /// Model before step `i` (or the last model when `i == steps.len()`).
    pub fn model_at(&self, i: usize) -> &Model {
        if i < self.steps.len() {
            &self.steps[i].model
        } else {
            &self.last
        }
    }
}

pub fn default_step_cap(p: &ToricPair) -> usize {
    10 * binomial(p.fan.num_rays(), p.fan.rank()).max(1)
}

fn sorted_candidates(p: &ToricPair, rays: Vec<CurveClass>) -> Result<Vec<Candidate>> {
    let mut out = rays
        .into_iter()
        .map(|ray| {
            let action = analyze_ray(&p.fan, ray.wall)?;
            Ok(Candidate { ray, action })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|c| (c.action.kind, c.ray.wall));
    Ok(out)
}

fn record(model: &Model, cand: &Candidate, index: usize, t: Option<Scalar>, next: Option<&Model>) -> Result<Step> {
    let wall_rays = cand.ray.wall_of(&model.pair.fan)?.cone.clone();
    let model_hash = next.map(|m| &m.pair.fan).unwrap_or(&model.pair.fan).canonical_hash();
    Ok(Step {
        index,
        t,
        ray: cand.ray.clone(),
        wall_rays,
        action: cand.action.clone(),
        model: model.clone(),
        model_hash,
    })
}

/// Mori MMP: contract any negative extremal ray until none remains or a
/// fibering contraction appears.
pub fn mori_mmp(p: &ToricPair, chooser: &mut dyn Chooser) -> Result<Trace> {
    mori_mmp_model(Model::new(p.clone()), chooser, None)
}

pub fn mori_mmp_model(start: Model, chooser: &mut dyn Chooser, cap: Option<usize>) -> Result<Trace> {
    start.pair.fan.require_complete_simplicial()?;
    let cap = cap.unwrap_or_else(|| default_step_cap(&start.pair));
    let mut model = start;
    let mut steps = Vec::new();
    loop {
        if steps.len() >= cap {
            return Ok(Trace {
                steps,
                outcome: Outcome::Aborted("StepCap".into()),
                last: model,
                t_final: None,
            });
        }
        let neg = curves::negative_rays(&model.pair)?;
        if neg.is_empty() {
            return Ok(Trace {
                steps,
                outcome: Outcome::MinimalModel,
                last: model,
                t_final: None,
            });
        }
        let cands = sorted_candidates(&model.pair, neg)?;
        let i = chooser.choose(&model.pair, &cands)?;
        let cand = cands.get(i).ok_or_else(|| Error::Invalid(format!("no candidate {i}")))?;
        if cand.action.kind == ContractionKind::Fibering {
            steps.push(record(&model, cand, steps.len(), None, None)?);
            return Ok(Trace {
                steps,
                outcome: Outcome::MoriFiberSpace,
                last: model,
                t_final: None,
            });
        }
        let next = model.advance(&cand.action)?;
        steps.push(record(&model, cand, steps.len(), None, Some(&next))?);
        model = next;
    }
}

/// Hook run on every step of a scaling run, before the step is applied.
pub type StepHook<'a> = &'a mut dyn FnMut(&Model, &Candidate, &Scalar) -> Result<()>;

/// MMP with scaling of `model.h` from `t0` down to `t_end`.
pub fn scaling_run(
    start: Model,
    t0: &Scalar,
    t_end: &Scalar,
    chooser: &mut dyn Chooser,
    hook: StepHook<'_>,
    cap: Option<usize>,
) -> Result<Trace> {
    start.pair.fan.require_complete_simplicial()?;
    if start.h.is_none() {
        return Err(Error::Precondition("scaling run without a scaling divisor".into()));
    }
    let cap = cap.unwrap_or_else(|| default_step_cap(&start.pair));
    let mut model = start;
    let mut t = t0.clone();
    let mut steps = Vec::new();
    loop {
        let h = model.h.clone().expect("scaling divisor");
        let thr = curves::nef_threshold(&model.pair, &h, &t)?;
        if thr.t1 <= *t_end || thr.critical.is_empty() {
            return Ok(Trace {
                steps,
                outcome: Outcome::MinimalModel,
                last: model,
                t_final: Some(t_end.clone()),
            });
        }
        if steps.len() >= cap {
            return Ok(Trace {
                steps,
                outcome: Outcome::Aborted("StepCap".into()),
                last: model,
                t_final: Some(t),
            });
        }
        t = thr.t1;
        let cands = sorted_candidates(&model.pair, thr.critical)?;
        let i = chooser.choose(&model.pair, &cands)?;
        let cand = cands.get(i).ok_or_else(|| Error::Invalid(format!("no candidate {i}")))?;
        hook(&model, cand, &t)?;
        if cand.action.kind == ContractionKind::Fibering {
            steps.push(record(&model, cand, steps.len(), Some(t.clone()), None)?);
            return Ok(Trace {
                steps,
                outcome: Outcome::MoriFiberSpace,
                last: model,
                t_final: Some(t),
            });
        }
        let next = model.advance(&cand.action)?;
        steps.push(record(&model, cand, steps.len(), Some(t.clone()), Some(&next))?);
        model = next;
    }
}

/// MMP with scaling of `h` from `t0` to 0, first-critical tie-break.
pub fn mmp_with_scaling(p: &ToricPair, h: &TDivisor, t0: &Scalar) -> Result<Trace> {
    mmp_with_scaling_using(p, h, t0, &mut StrategyChooser::new(Strategy::FirstCritical))
}

pub fn mmp_with_scaling_using(p: &ToricPair, h: &TDivisor, t0: &Scalar, chooser: &mut dyn Chooser) -> Result<Trace> {
    scaling_run(
        Model::new(p.clone()).with_h(h.clone()),
        t0,
        &Scalar::zero(),
        chooser,
        &mut |_, _, _| Ok(()),
        None,
    )
}

/// Ample `H` and the least `t0 >= 1` with `K + Delta + t0 H` nef.
pub fn scaling_setup(p: &ToricPair) -> Result<(TDivisor, Scalar)> {
    let h = curves::ample_divisor(&p.fan)?;
    let shift = curves::nef_shift(&p.fan, &p.log_canonical(), &h)?;
    let t0 = if shift > Scalar::one() { Scalar::rational(crate::Rat::from_bigint(shift.ceil())) } else { Scalar::one() };
    Ok((h, t0))
}

/// Post-hoc check of a scaling trace: `t` weakly decreasing, every model
/// nef for its `t`, every chosen ray critical, consecutive models linked.
pub fn verify_scaling_trace(trace: &Trace) -> Result<()> {
    let mut prev_t: Option<&Scalar> = None;
    for (i, s) in trace.steps.iter().enumerate() {
        let t = s.t.as_ref().ok_or_else(|| Error::Invariant("scaling step without t".into()))?;
        if let Some(p) = prev_t {
            if t > p {
                return Err(Error::Invariant(format!("t increases at step {i}")));
            }
        }
        prev_t = Some(t);
        let h = s.model.h.as_ref().ok_or_else(|| Error::Invariant("missing H".into()))?;
        let d = &s.model.pair.log_canonical() + &h.scale(t);
        if !is_nef(&s.model.pair.fan, &d)? {
            return Err(Error::Invariant(format!("K+Delta+tH is not nef at step {i}")));
        }
        if !s.ray.dot(&d).is_zero() || !s.ray.dot(h).is_positive() {
            return Err(Error::Invariant(format!("ray of step {i} is not critical")));
        }
        let next = trace.model_at(i + 1);
        if s.action.kind != ContractionKind::Fibering && next.pair.fan.canonical_hash() != s.model_hash {
            return Err(Error::Invariant(format!("step {i} does not lead to the next model")));
        }
    }
    if trace.outcome == Outcome::MinimalModel {
        let h = trace.last.h.as_ref().ok_or_else(|| Error::Invariant("missing H".into()))?;
        let t = trace.t_final.clone().unwrap_or_else(Scalar::zero);
        let d = &trace.last.pair.log_canonical() + &h.scale(&t);
        if !is_nef(&trace.last.pair.fan, &d)? {
            return Err(Error::Invariant("final model is not nef".into()));
        }
    }
    Ok(())
}

/// First valuation violating discrepancy monotonicity across a flip:
/// `A(v)` must not drop, and must rise when the center of `v` lies in the
/// flipping locus.
pub fn discrepancy_violation(before: &ToricPair, after: &ToricPair, action: &ContractionResult) -> Result<Option<Vec<i64>>> {
    let mut vals = test_valuations(&before.fan);
    vals.extend(test_valuations(&after.fan));
    vals.sort();
    vals.dedup();
    for v in vals {
        let a = log_discrepancy_value(&before.fan, &before.boundary, &v)?;
        let b = log_discrepancy_value(&after.fan, &after.boundary, &v)?;
        let strict = center_in_exceptional(&before.fan, &v, &action.j_minus);
        if b < a || (strict && b == a) {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// [`discrepancy_violation`] over every flip of a trace, as `(step, v)`.
pub fn trace_discrepancy_violation(trace: &Trace) -> Result<Option<(usize, Vec<i64>)>> {
    for (i, s) in trace.steps.iter().enumerate() {
        if s.action.kind != ContractionKind::Flipping {
            continue;
        }
        if let Some(v) = discrepancy_violation(&s.model.pair, &trace.model_at(i + 1).pair, &s.action)? {
            return Ok(Some((i, v)));
        }
    }
    Ok(None)
}

/// Per-step incidence of the exceptional locus with `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialTermination {
    /// Smallest `N` with no incidence at steps `i >= N`.
    pub n: usize,
    pub incident: Vec<bool>,
    /// Whether the induced map on `S` is an isomorphism in codimension one.
    pub codim1_iso: Vec<bool>,
}

fn exceptional_sets(action: &ContractionResult) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let minus = action
        .merged
        .iter()
        .map(|m| m.iter().copied().filter(|x| !action.j_plus.contains(x)).collect())
        .collect();
    let plus = action
        .merged
        .iter()
        .map(|m| m.iter().copied().filter(|x| !action.j_minus.contains(x)).collect())
        .collect();
    (minus, plus)
}

/// Codimension in `S` of `S ∩ V(tau)`, or `None` if they do not meet.
fn codim_in_s(fan_cones: &[Vec<usize>], tau: &[usize], s: usize) -> Option<usize> {
    let mut set: Vec<usize> = tau.to_vec();
    if !set.contains(&s) {
        set.push(s);
    }
    fan_cones
        .iter()
        .any(|c| set.iter().all(|x| c.contains(x)))
        .then(|| set.len() - 1)
}

/// Special termination: the last step whose exceptional locus meets `S`.
/// `s` is the original index of the ray of `S`. Fibering steps are not
/// birational and are skipped.
pub fn special_termination_report(trace: &Trace, s: usize) -> Result<SpecialTermination> {
    let mut incident = Vec::new();
    let mut iso = Vec::new();
    for step in &trace.steps {
        let m = &step.model;
        let si = m.index_of(s).ok_or(Error::SNotInModel)?;
        if *m.pair.boundary.coeff(si) != Scalar::one() {
            return Err(Error::SNotInModel);
        }
        if step.action.kind == ContractionKind::Fibering {
            incident.push(false);
            iso.push(true);
            continue;
        }
        let (minus, plus) = exceptional_sets(&step.action);
        let fan = &m.pair.fan;
        let mut hit = false;
        let mut ok = true;
        for tau in &minus {
            if let Some(c) = codim_in_s(fan.cones(), tau, si) {
                hit = true;
                ok &= c >= 2 && step.action.removed_ray != Some(si);
            }
        }
        if step.action.kind == ContractionKind::Flipping {
            let after: Vec<Vec<usize>> = crate::birational::flipped_fan(fan, &step.action)?.cones().to_vec();
            for tau in &plus {
                if let Some(c) = codim_in_s(&after, tau, si) {
                    hit = true;
                    ok &= c >= 2;
                }
            }
        }
        incident.push(hit);
        iso.push(ok);
    }
    let si = trace.last.index_of(s).ok_or(Error::SNotInModel)?;
    if *trace.last.pair.boundary.coeff(si) != Scalar::one() {
        return Err(Error::SNotInModel);
    }
    let n = incident.iter().rposition(|&b| b).map(|i| i + 1).unwrap_or(0);
    Ok(SpecialTermination {
        n,
        incident,
        codim1_iso: iso,
    })
}

/// Raise the boundary to one along the stable base locus of `K + Delta`.
/// Returns the new pair and the added divisor `Delta'`.
pub fn useless_divisor_augment(p: &ToricPair) -> Result<(ToricPair, TDivisor)> {
    let rays = match stable_base_locus(&p.fan, &p.log_canonical())? {
        BaseLocus::All => return Err(Error::AllBaseLocus),
        BaseLocus::Rays(r) => r,
    };
    let mut extra = TDivisor::zero(p.fan.num_rays());
    for &i in &rays {
        extra.set(i, Scalar::one() - p.boundary.coeff(i).clone());
    }
    let q = ToricPair::raw(p.fan.clone(), &p.boundary + &extra, p.ghosts.clone());
    Ok((q, extra))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::canonical_divisor;
    use crate::fan::named::*;

    #[test]
    fn f1_divisorial_first() {
        let p = ToricPair::plain(hirzebruch(1));
        let t = mori_mmp(&p, &mut StrategyChooser::new(Strategy::DivisorialFirst)).unwrap();
        assert_eq!(t.outcome, Outcome::MoriFiberSpace);
        assert_eq!(t.steps.len(), 2);
        assert_eq!(t.steps[0].action.kind, ContractionKind::Divisorial);
        assert!(t.last.pair.fan.is_isomorphic(&p2()));
        assert_eq!(t.last.labels, vec![0, 2, 3]);
    }

    #[test]
    fn p2_scaling_fibers() {
        let p = ToricPair::plain(p2());
        let h = TDivisor::from_ints(&[3, 0, 0]);
        let t = mmp_with_scaling(&p, &h, &Scalar::one()).unwrap();
        assert_eq!(t.outcome, Outcome::MoriFiberSpace);
        assert_eq!(t.steps.len(), 1);
        assert_eq!(t.steps[0].t, Some(Scalar::one()));
        verify_scaling_trace(&t).unwrap();
    }

    #[test]
    fn f1_scaling_anticanonical() {
        let p = ToricPair::plain(hirzebruch(1));
        let h = -&canonical_divisor(&p.fan);
        let t = mmp_with_scaling(&p, &h, &Scalar::one()).unwrap();
        assert_eq!(t.outcome, Outcome::MoriFiberSpace);
        // the fibering ray wins the tie at t = 1
        assert_eq!(t.steps.len(), 1);
        verify_scaling_trace(&t).unwrap();
    }

    #[test]
    fn nef_start_has_no_steps() {
        let f = p2();
        let p = ToricPair::raw(f.clone(), TDivisor::zero(3), vec![crate::divisor::Ghost {
            class: TDivisor::from_ints(&[7, 0, 0]),
            weight: Scalar::frac(1, 2),
        }]);
        let t = mmp_with_scaling(&p, &TDivisor::from_ints(&[1, 0, 0]), &Scalar::one()).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.outcome, Outcome::MinimalModel);
        let t = mori_mmp(&p, &mut StrategyChooser::new(Strategy::FirstCritical)).unwrap();
        assert!(t.steps.is_empty());
    }

    #[test]
    fn not_nef_at_t0() {
        let p = ToricPair::plain(p2());
        let e = mmp_with_scaling(&p, &TDivisor::from_ints(&[1, 0, 0]), &Scalar::one()).unwrap_err();
        assert!(matches!(e, Error::NotNefAtT0(_)));
    }

    #[test]
    fn augment_raises_base_locus() {
        // F1 with K + Delta having E in its base locus
        let f = hirzebruch(1);
        let boundary = TDivisor::new(vec![Scalar::zero(), Scalar::frac(1, 2), Scalar::zero(), Scalar::zero()]);
        let ghost = crate::divisor::Ghost {
            class: TDivisor::from_ints(&[0, 0, 0, 8]),
            weight: Scalar::frac(1, 2),
        };
        let p = ToricPair::new(f, boundary, vec![ghost]).unwrap();
        let (q, extra) = useless_divisor_augment(&p).unwrap();
        assert_eq!(*q.boundary.coeff(1), Scalar::one());
        assert_eq!(*extra.coeff(1), Scalar::frac(1, 2));
        let plain = ToricPair::plain(p2());
        assert_eq!(useless_divisor_augment(&plain).unwrap_err(), Error::AllBaseLocus);
    }
}
