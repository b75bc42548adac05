//! Seeded batch of random pairs run through every driver, with
//! per-case cross checks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::Scalar;
use crate::divisor::{is_nef, ToricPair};
use crate::error::{Error, Result};
use crate::mmp::{
    hilbert_function, minimal_model, mmp_with_scaling, mori_mmp, scaling_setup, trace_discrepancy_violation,
    verify_scaling_trace, Outcome, Strategy, StrategyChooser,
};
use crate::random::{random_fan, random_klt_pair};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteRow {
    pub case: u64,
    pub check: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Command line reproducing this case alone.
    pub repro: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub rows: Vec<SuiteRow>,
}

impl SuiteReport {
    pub fn failures(&self) -> impl Iterator<Item = &SuiteRow> {
        self.rows.iter().filter(|r| !r.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }
}

fn max_rays(dim: usize) -> usize {
    if dim == 2 {
        8
    } else {
        6
    }
}

fn hilbert_degree(dim: usize) -> usize {
    if dim == 2 {
        6
    } else {
        2
    }
}

/// Random klt pair of case `seed`.
pub fn suite_pair(seed: u64, dim: usize) -> Result<ToricPair> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fan = random_fan(&mut rng, dim, max_rays(dim))?;
    random_klt_pair(&mut rng, fan)
}

struct Case {
    rows: Vec<SuiteRow>,
    case: u64,
    repro: String,
}

impl Case {
    fn push(&mut self, check: &'static str, r: Result<String>) -> bool {
        let (passed, detail) = match r {
            Ok(d) => (true, d),
            Err(e) => (false, e.to_string()),
        };
        self.rows.push(SuiteRow {
            case: self.case,
            check,
            passed,
            detail,
            repro: self.repro.clone(),
        });
        passed
    }
}

fn canonical_multiple(pairs: &[&ToricPair]) -> Result<i64> {
    let mut l = BigInt::one();
    for p in pairs {
        let d = p
            .log_canonical()
            .denominator()
            .ok_or_else(|| Error::Precondition("irrational K + Delta".into()))?;
        l = l.lcm(&d);
    }
    l.to_i64().ok_or_else(|| Error::Invalid("denominator overflow".into()))
}

fn hilbert(p: &ToricPair, k: i64, deg: usize) -> Result<Vec<usize>> {
    hilbert_function(&p.fan, &p.log_canonical().scale(&Scalar::int(k)), deg)
}

/// Run `count` cases of dimension `dim`. Case `i` uses seed `seed + i`.
pub fn run_suite(seed: u64, count: usize, dim: usize) -> Result<SuiteReport> {
    if dim != 2 && dim != 3 {
        return Err(Error::UnsupportedDimension(dim));
    }
    let mut report = SuiteReport::default();
    for i in 0..count as u64 {
        let case_seed = seed.wrapping_add(i);
        let mut c = Case {
            rows: vec![],
            case: case_seed,
            repro: format!("torimmp suite --seed {case_seed} --count 1 --dim {dim}"),
        };
        run_case(&mut c, case_seed, dim);
        report.rows.extend(c.rows);
    }
    Ok(report)
}

fn run_case(c: &mut Case, seed: u64, dim: usize) {
    let p = match suite_pair(seed, dim) {
        Ok(p) => p,
        Err(e) => {
            c.push("generate", Err(e));
            return;
        }
    };
    let scale = (|| {
        let (h, t0) = scaling_setup(&p)?;
        let t = mmp_with_scaling(&p, &h, &t0)?;
        verify_scaling_trace(&t)?;
        if let Outcome::Aborted(r) = &t.outcome {
            return Err(Error::Invariant(format!("scaling aborted: {r}")));
        }
        Ok(t)
    })();
    let scale = match scale {
        Ok(t) => {
            c.push("scale", Ok(format!("{} steps, {}", t.steps.len(), t.outcome)));
            t
        }
        Err(e) => {
            c.push("scale", Err(e));
            return;
        }
    };
    c.push(
        "discrepancy",
        trace_discrepancy_violation(&scale).and_then(|v| match v {
            None => Ok("monotone".into()),
            Some((i, v)) => Err(Error::Invariant(format!("A drops at step {i} on {v:?}"))),
        }),
    );
    let mori = mori_mmp(&p, &mut StrategyChooser::new(Strategy::DivisorialFirst)).and_then(|t| {
        if t.outcome != scale.outcome {
            return Err(Error::Invariant(format!("mori ended with {} but scaling with {}", t.outcome, scale.outcome)));
        }
        Ok(t)
    });
    let mori = match mori {
        Ok(t) => {
            c.push("mori", Ok(format!("{} steps, {}", t.steps.len(), t.outcome)));
            Some(t)
        }
        Err(e) => {
            c.push("mori", Err(e));
            None
        }
    };
    let bend = if dim == 2 && scale.outcome == Outcome::MinimalModel {
        let r = minimal_model(&p).and_then(|b| {
            if is_nef(&b.final_pair().fan, &b.final_pair().log_canonical())? {
                Ok(b)
            } else {
                Err(Error::Invariant("bending result is not nef".into()))
            }
        });
        match r {
            Ok(b) => {
                c.push("bend", Ok(format!("{} steps", b.step_count())));
                Some(b)
            }
            Err(e) => {
                c.push("bend", Err(e));
                None
            }
        }
    } else {
        None
    };
    if scale.outcome != Outcome::MinimalModel {
        return;
    }
    let mut finals = vec![scale.final_pair()];
    finals.extend(mori.as_ref().map(|t| t.final_pair()));
    finals.extend(bend.as_ref().map(|b| b.final_pair()));
    let deg = hilbert_degree(dim);
    let r = (|| {
        let k = canonical_multiple(&finals)?;
        let base = hilbert(finals[0], k, deg)?;
        for f in &finals[1..] {
            let other = hilbert(f, k, deg)?;
            if other != base {
                return Err(Error::Invariant(format!("Hilbert functions differ: {base:?} vs {other:?}")));
            }
        }
        Ok(format!("{base:?}"))
    })();
    c.push("hilbert", r);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_passing() {
        let a = run_suite(7, 3, 2).unwrap();
        let b = run_suite(7, 3, 2).unwrap();
        assert_eq!(a, b);
        assert!(a.all_passed(), "{:?}", a.failures().collect::<Vec<_>>());
        assert!(a.rows.iter().any(|r| r.check == "hilbert"));
    }

    #[test]
    fn empty_and_bad_dimension() {
        assert!(run_suite(1, 0, 2).unwrap().rows.is_empty());
        assert_eq!(run_suite(1, 1, 4).unwrap_err(), Error::UnsupportedDimension(4));
    }
}
