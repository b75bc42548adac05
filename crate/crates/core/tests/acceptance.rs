//! Acceptance run: one line per criterion, exit status 1 if any fails.
//! Oracles here are computed from the fan data directly (Cramer's rule,
//! brute-force enumeration) rather than through the library.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use torimmp::adjoint::{
    diophantine_gap, minimal_generators, rationality_certificate, restricted_algebra, truncation_fg,
    verify_generators, CurveAlgebraInstance, FgVerdict, GradedSemigroup, RationalityCertificate,
};
use torimmp::birational::{analyze_ray, classify_pl_flip, flip, ContractionKind};
use torimmp::curves::ample_divisor;
use torimmp::divisor::{stable_base_locus, BaseLocus};
use torimmp::fan::named::{hirzebruch, p2};
use torimmp::instances::{f1_pair, flip_pair, flip_wall, p2_line, p2_pair, pl_flip_pair, PL_FLIP_S};
use torimmp::mmp::{
    cox_ring, default_step_cap, finiteness_explorer, hilbert_function, minimal_model, mmp_with_scaling,
    mori_fiber_space, mori_mmp, scaling_run, scaling_setup, special_termination_report, useless_divisor_augment,
    verify_scaling_trace, Outcome, Strategy, StrategyChooser, Trace,
};
use torimmp::random::{random_fan, random_klt_pair, random_plt_pair};
use torimmp::suite::suite_pair;
use torimmp::{Error, Fan, Ghost, Scalar, TDivisor, ToricPair};

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(format!($($fmt)*));
        }
    };
}

fn lib<T>(r: torimmp::Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

// ---- oracles ----

fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        n => panic!("dimension {n}"),
    }
}

/// Coefficients of `v` in the basis `cols` as fractions `num / den`.
fn cramer(cols: &[Vec<i64>], v: &[i64]) -> (Vec<i64>, i64) {
    let n = v.len();
    let rows = |c: &[Vec<i64>]| (0..n).map(|i| c.iter().map(|x| x[i]).collect()).collect::<Vec<Vec<i64>>>();
    let d = det(&rows(cols));
    let nums = (0..n)
        .map(|j| {
            let mut c = cols.to_vec();
            c[j] = v.to_vec();
            det(&rows(&c))
        })
        .collect();
    (nums, d)
}

/// Max cone containing `v` and the barycentric coefficients `(ray, num, den)`.
fn locate(fan: &Fan, v: &[i64]) -> Vec<(usize, i64, i64)> {
    for cone in fan.cones() {
        let cols: Vec<Vec<i64>> = cone.iter().map(|&i| fan.ray(i).to_vec()).collect();
        let (nums, d) = cramer(&cols, v);
        if nums.iter().all(|x| x * d.signum() >= 0) {
            return cone.iter().zip(nums).map(|(&i, x)| (i, x, d)).collect();
        }
    }
    panic!("{v:?} outside the fan");
}

fn log_discrepancy(fan: &Fan, boundary: &TDivisor, v: &[i64]) -> Scalar {
    locate(fan, v)
        .into_iter()
        .map(|(i, x, d)| Scalar::frac(x, d) * (Scalar::one() - boundary.coeff(i).clone()))
        .sum()
}

fn minimal_face(fan: &Fan, v: &[i64]) -> BTreeSet<usize> {
    locate(fan, v).into_iter().filter(|x| x.1 != 0).map(|x| x.0).collect()
}

fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v.iter().fold(0i64, |a, b| a.gcd(b));
    v.iter().map(|x| x / g).collect()
}

/// Primitive sums of at most three rays, repetition allowed.
fn valuations(fan: &Fan) -> BTreeSet<Vec<i64>> {
    let n = fan.num_rays();
    let mut out = BTreeSet::new();
    for a in 0..n {
        for b in a..n {
            for c in b..n {
                for combo in [&[a][..], &[a, b], &[a, b, c]] {
                    let s: Vec<i64> = (0..fan.rank()).map(|k| combo.iter().map(|&i| fan.ray(i)[k]).sum()).collect();
                    if s.iter().any(|x| *x != 0) {
                        out.insert(primitive(&s));
                    }
                }
            }
        }
    }
    out
}

/// Interior walls with the relation among the `n + 1` rays of the two
/// adjacent cones, positive on the two off-wall rays.
fn walls(fan: &Fan) -> Vec<(Vec<usize>, Vec<i64>)> {
    let cones = fan.cones();
    let mut out = Vec::new();
    for (i, a) in cones.iter().enumerate() {
        for b in &cones[i + 1..] {
            let wall: Vec<usize> = a.iter().filter(|x| b.contains(x)).copied().collect();
            if wall.len() + 1 != a.len() {
                continue;
            }
            let oa = *a.iter().find(|x| !wall.contains(x)).unwrap();
            let ob = *b.iter().find(|x| !wall.contains(x)).unwrap();
            let mut idx = vec![oa, ob];
            idx.extend(&wall);
            let vecs: Vec<Vec<i64>> = idx.iter().map(|&i| fan.ray(i).to_vec()).collect();
            // r_j = (-1)^j det(all but j)
            let mut r: Vec<i64> = (0..vecs.len())
                .map(|j| {
                    let m: Vec<Vec<i64>> = vecs.iter().enumerate().filter(|(k, _)| *k != j).map(|x| x.1.clone()).collect();
                    let d = det(&(0..fan.rank()).map(|row| m.iter().map(|c| c[row]).collect()).collect::<Vec<_>>());
                    if j % 2 == 0 {
                        d
                    } else {
                        -d
                    }
                })
                .collect();
            if r[0] < 0 {
                r.iter_mut().for_each(|x| *x = -*x);
            }
            let mut dense = vec![0; fan.num_rays()];
            for (k, &i) in idx.iter().enumerate() {
                dense[i] = r[k];
            }
            out.push((wall, primitive(&dense)));
        }
    }
    out
}

fn degree_on(rel: &[i64], d: &TDivisor) -> Scalar {
    rel.iter().zip(d.coeffs()).map(|(r, c)| c * &Scalar::int(*r)).sum()
}

fn nef(fan: &Fan, d: &TDivisor) -> bool {
    walls(fan).iter().all(|(_, r)| !degree_on(r, d).is_negative())
}

/// Cone sets as sets of ray vectors, for comparing fans with different
/// ray orders.
fn cone_vectors(fan: &Fan) -> BTreeSet<BTreeSet<Vec<i64>>> {
    fan.cones().iter().map(|c| c.iter().map(|&i| fan.ray(i).to_vec()).collect()).collect()
}

fn big(s: &Scalar) -> (BigRational, BigRational, u32) {
    (s.rational_part().to_big(), s.irrational_part().to_big(), s.root())
}

/// Sign of `a + b sqrt(r)` by squaring.
fn sign_quadratic(a: &BigRational, b: &BigRational, r: u32) -> i32 {
    let sa = a.signum();
    let sb = b.signum();
    if sb.is_zero() || r == 0 {
        return if sa.is_positive() { 1 } else if sa.is_negative() { -1 } else { 0 };
    }
    if !sa.is_negative() && sb.is_positive() {
        return 1;
    }
    if !sa.is_positive() && sb.is_negative() {
        return -1;
    }
    // opposite signs: compare a^2 with r b^2
    let lhs = a * a;
    let rhs = b * b * BigRational::from_integer(BigInt::from(r));
    let dominant = if sa.is_positive() { 1 } else { -1 };
    match lhs.cmp(&rhs) {
        std::cmp::Ordering::Greater => dominant,
        std::cmp::Ordering::Less => -dominant,
        std::cmp::Ordering::Equal => 0,
    }
}

fn hilbert(p: &ToricPair, k: i64, deg: usize) -> torimmp::Result<Vec<usize>> {
    hilbert_function(&p.fan, &p.log_canonical().scale(&Scalar::int(k)), deg)
}

fn denominator_lcm(ps: &[&ToricPair]) -> Option<i64> {
    let mut l = BigInt::one();
    for p in ps {
        l = l.lcm(&p.log_canonical().denominator()?);
    }
    l.to_i64()
}

// ---- shared runs ----

struct Run {
    seed: u64,
    dim: usize,
    pair: ToricPair,
    trace: Trace,
}

fn criterion_one_runs() -> &'static std::result::Result<Vec<Run>, String> {
    static RUNS: OnceLock<std::result::Result<Vec<Run>, String>> = OnceLock::new();
    RUNS.get_or_init(|| {
        let cases = (0..200u64).map(|s| (s, 2)).chain((0..50u64).map(|s| (s, 3)));
        let mut out = Vec::new();
        for (seed, dim) in cases {
            let pair = if dim == 2 {
                lib(suite_pair(seed, dim))?
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let fan = lib(random_fan(&mut rng, 3, 10))?;
                lib(random_klt_pair(&mut rng, fan))?
            };
            ensure!(pair.fan.num_rays() <= 12, "seed {seed}: {} rays", pair.fan.num_rays());
            let (h, t0) = lib(scaling_setup(&pair))?;
            let trace = lib(mmp_with_scaling(&pair, &h, &t0)).map_err(|e| format!("seed {seed} dim {dim}: {e}"))?;
            out.push(Run { seed, dim, pair, trace });
        }
        Ok(out)
    })
}

// ---- criteria ----

fn c1() -> Check {
    let runs = criterion_one_runs().as_ref()?;
    let (mut mm, mut mfs) = (0, 0);
    for (i, r) in runs.iter().enumerate() {
        ensure!(r.trace.steps.len() <= default_step_cap(&r.pair), "case {i}: step cap exceeded");
        lib(verify_scaling_trace(&r.trace)).map_err(|e| format!("case {i}: {e}"))?;
        match &r.trace.outcome {
            Outcome::MinimalModel => {
                let f = r.trace.final_pair();
                ensure!(nef(&f.fan, &f.log_canonical()), "case {i}: final K + Delta not nef");
                mm += 1;
            }
            Outcome::MoriFiberSpace => {
                let last = r.trace.steps.last().map(|s| s.action.kind);
                ensure!(last == Some(ContractionKind::Fibering), "case {i}: no fibering step");
                mfs += 1;
            }
            Outcome::Aborted(why) => return Err(format!("case {i}: aborted ({why})")),
        }
    }
    Ok(format!("{} runs, {mm} minimal models, {mfs} Mori fiber spaces", runs.len()))
}

fn flips_monotone(trace: &Trace, label: &str) -> std::result::Result<(usize, usize), String> {
    let (mut flips, mut strict) = (0, 0);
    for (i, s) in trace.steps.iter().enumerate() {
        if s.action.kind != ContractionKind::Flipping {
            continue;
        }
        flips += 1;
        let before = &s.model.pair;
        let after = &trace.model_at(i + 1).pair;
        let locus: BTreeSet<usize> = s.action.relation.iter().enumerate().filter(|x| *x.1 < 0).map(|x| x.0).collect();
        let mut vals = valuations(&before.fan);
        vals.extend(valuations(&after.fan));
        for v in vals {
            let a = log_discrepancy(&before.fan, &before.boundary, &v);
            let b = log_discrepancy(&after.fan, &after.boundary, &v);
            ensure!(b >= a, "{label} step {i}: A({v:?}) drops from {a} to {b}");
            if minimal_face(&before.fan, &v).is_superset(&locus) {
                ensure!(b > a, "{label} step {i}: A({v:?}) = {a} not strictly increased");
                strict += 1;
            }
        }
    }
    Ok((flips, strict))
}

fn c2() -> Check {
    let runs = criterion_one_runs().as_ref()?;
    let (mut flips, mut strict) = (0, 0);
    for (i, r) in runs.iter().enumerate() {
        let (f, s) = flips_monotone(&r.trace, &format!("case {i}"))?;
        flips += f;
        strict += s;
        if r.dim == 3 {
            let t = lib(mori_mmp(&r.pair, &mut StrategyChooser::new(Strategy::Random(r.seed))))?;
            let (f, s) = flips_monotone(&t, &format!("mori case {i}"))?;
            flips += f;
            strict += s;
        }
    }
    let p = lib(flip_pair())?;
    let (h, t0) = lib(scaling_setup(&p))?;
    let t = lib(mmp_with_scaling(&p, &h, &t0))?;
    let (f, s) = flips_monotone(&t, "flip instance")?;
    ensure!(f > 0, "flip instance produced no flip");
    flips += f;
    strict += s;
    Ok(format!("{flips} flips, {strict} strict increases checked"))
}

fn c3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut runs, mut lost_s, mut max_n) = (0, 0, 0);
    while runs < 25 {
        ensure!(lost_s < 500, "only {runs} runs kept S");
        let dim = if runs % 2 == 0 { 2 } else { 3 };
        let fan = lib(random_fan(&mut rng, dim, if dim == 2 { 8 } else { 6 }))?;
        let s = rng.gen_range(0..fan.num_rays());
        let p = match random_plt_pair(&mut rng, fan, s) {
            Ok(p) => p,
            Err(Error::NotPlt) => continue,
            Err(e) => return Err(e.to_string()),
        };
        let (h, t0) = lib(scaling_setup(&p))?;
        let trace = lib(mmp_with_scaling(&p, &h, &t0))?;
        let rep = match special_termination_report(&trace, s) {
            Ok(r) => r,
            Err(Error::SNotInModel) => {
                lost_s += 1;
                continue;
            }
            Err(e) => return Err(e.to_string()),
        };
        let n = rep.n;
        ensure!(n <= trace.steps.len(), "run {runs}: N = {n} past the end");
        let t_n = if n == 0 { t0.clone() } else { trace.steps[n - 1].t.clone().unwrap() };
        let again = lib(scaling_run(
            trace.model_at(n).clone(),
            &t_n,
            &Scalar::zero(),
            &mut StrategyChooser::new(Strategy::FirstCritical),
            &mut |_, _, _| Ok(()),
            None,
        ))?;
        let rep2 = lib(special_termination_report(&again, s))?;
        ensure!(rep2.n == 0 && rep2.incident.iter().all(|x| !x), "run {runs}: rerun from {n} meets S");
        ensure!(again.outcome == trace.outcome, "run {runs}: rerun ends differently");
        max_n = max_n.max(n);
        runs += 1;
    }
    Ok(format!("25 runs, max N = {max_n}, {lost_s} draws skipped with S contracted"))
}

fn c4() -> Check {
    let mut kept = 0;
    let mut seed = 20_000u64;
    while kept < 50 {
        seed += 1;
        ensure!(seed < 21_000, "only {kept} big pairs found");
        let p = lib(suite_pair(seed, 2))?;
        if !p.log_canonical().is_rational() || !lib(torimmp::divisor::is_big(&p.fan, &p.log_canonical()))? {
            continue;
        }
        let mori = lib(mori_mmp(&p, &mut StrategyChooser::new(Strategy::DivisorialFirst)))?;
        let (h, t0) = lib(scaling_setup(&p))?;
        let scale = lib(mmp_with_scaling(&p, &h, &t0))?;
        let bend = lib(minimal_model(&p))?;
        ensure!(mori.outcome == Outcome::MinimalModel, "seed {seed}: mori ended with {}", mori.outcome);
        ensure!(scale.outcome == Outcome::MinimalModel, "seed {seed}: scale ended with {}", scale.outcome);
        let finals = [mori.final_pair(), scale.final_pair(), bend.final_pair()];
        let k = denominator_lcm(&finals).ok_or("irrational model")?;
        let hs: Vec<Vec<usize>> = finals.iter().map(|f| hilbert(f, k, 20)).collect::<torimmp::Result<_>>().map_err(|e| e.to_string())?;
        ensure!(hs[0] == hs[1] && hs[1] == hs[2], "seed {seed}: Hilbert functions {hs:?}");
        kept += 1;
    }
    Ok(format!("50 pairs agree up to degree 20 (seeds 20001..={seed})"))
}

fn c5() -> Check {
    // F1 -> P2: the ray (0,1) = (1,0) + (-1,1) spans the (-1)-curve.
    let f1 = f1_pair();
    let t = lib(mori_mmp(&f1, &mut StrategyChooser::new(Strategy::DivisorialFirst)))?;
    let first = t.steps.first().ok_or("no step on F1")?;
    ensure!(first.action.kind == ContractionKind::Divisorial, "first F1 step is {:?}", first.action.kind);
    ensure!(first.action.removed_ray == Some(1), "removed ray {:?}", first.action.removed_ray);
    ensure!(t.model_at(1).pair.fan.is_isomorphic(&p2()), "F1 contracts to something other than P2");
    ensure!(cone_vectors(&hirzebruch(1)).len() == 4, "F1 has four cones");

    // P2 -> point: K + c H nef first at c = 3.
    let (c, t) = lib(mori_fiber_space(&p2_pair(), &p2_line()))?;
    ensure!(c == Scalar::int(3), "c = {c}");
    ensure!(t.outcome == Outcome::MoriFiberSpace, "P2 outcome {}", t.outcome);
    let fib = t.steps.last().and_then(|s| s.action.fibration.clone()).ok_or("no fibration")?;
    ensure!(fib.base_rank == 0, "base rank {}", fib.base_rank);

    // Flip: a + b = c + d, wall cd before, ab after.
    let p = lib(flip_pair())?;
    let w = lib(flip_wall(&p.fan))?;
    let action = lib(analyze_ray(&p.fan, w))?;
    ensure!(action.kind == ContractionKind::Flipping, "wall cd is {:?}", action.kind);
    let q = lib(flip(&p, &action))?;
    let before = walls(&p.fan);
    let after = walls(&q.fan);
    let r_before = &before.iter().find(|x| x.0 == [2, 3]).ok_or("no wall cd")?.1;
    let r_after = &after.iter().find(|x| x.0 == [0, 1]).ok_or("no wall ab after the flip")?.1;
    ensure!(r_before[..4] == [1, 1, -1, -1], "relation {r_before:?}");
    ensure!(r_after[..4] == [-1, -1, 1, 1], "flipped relation {r_after:?}");
    ensure!(!after.iter().any(|x| x.0 == [2, 3]), "wall cd survives");
    // (K + Delta).C with Delta = 1/2 D_c; the ghost is pulled back from the base.
    let hand = Scalar::frac(-1, 2);
    let kd_before = degree_on(r_before, &p.log_canonical());
    let kd_after = degree_on(r_after, &q.log_canonical());
    ensure!(kd_before == hand, "(K + Delta).C = {kd_before}");
    ensure!(kd_after == -hand, "(K + Delta).C+ = {kd_after}");
    Ok("F1 -> P2 divisorial; P2 -> point with c = 3; flip degree -1/2 -> 1/2".into())
}

fn c6() -> Check {
    let (mut kept, mut seed) = (0, 30_000u64);
    while kept < 25 {
        seed += 1;
        ensure!(seed < 32_000, "only {kept} pairs with base locus");
        let p = lib(suite_pair(seed, 2))?;
        let rays = match lib(stable_base_locus(&p.fan, &p.log_canonical()))? {
            BaseLocus::Rays(r) if !r.is_empty() => r,
            _ => continue,
        };
        let (q, extra) = match useless_divisor_augment(&p) {
            Ok(x) => x,
            Err(Error::AllBaseLocus) => continue,
            Err(e) => return Err(e.to_string()),
        };
        ensure!(extra.support().into_iter().collect::<BTreeSet<_>>() == rays, "seed {seed}: augmentation off the base locus");
        let (h, t0) = lib(scaling_setup(&p))?;
        let before = lib(mmp_with_scaling(&p, &h, &t0))?;
        let (h, t0) = lib(scaling_setup(&q))?;
        let after = lib(mmp_with_scaling(&q, &h, &t0))?;
        ensure!(before.outcome == Outcome::MinimalModel && after.outcome == Outcome::MinimalModel, "seed {seed}: outcomes {} / {}", before.outcome, after.outcome);
        ensure!(
            before.final_pair().fan.is_isomorphic(&after.final_pair().fan),
            "seed {seed}: models differ"
        );
        kept += 1;
    }
    Ok(format!("25 pairs (seeds 30001..={seed})"))
}

/// `F_1` with `(K + Delta).E = 0` for the (-1)-curve `E = D_1`; the two
/// directions move across that wall.
fn explorer_pair() -> torimmp::Result<(ToricPair, Vec<TDivisor>)> {
    let q = Scalar::frac(1, 4);
    let b = TDivisor::new(vec![q.clone(), Scalar::frac(1, 2), q, Scalar::zero()]);
    let half = Scalar::frac(1, 2);
    let ghosts = vec![
        Ghost { class: TDivisor::from_ints(&[2, 0, 0, 2]), weight: half.clone() },
        Ghost { class: TDivisor::from_ints(&[0, 0, 0, 8]), weight: half },
    ];
    let p = ToricPair::new(hirzebruch(1), b, ghosts)?;
    Ok((p, vec![TDivisor::prime(4, 0), TDivisor::prime(4, 2)]))
}

fn grid_models(p: &ToricPair, dirs: &[TDivisor], eps: &Scalar) -> std::result::Result<Vec<Fan>, String> {
    let step = eps / &Scalar::int(8);
    let mut out: Vec<Fan> = Vec::new();
    for i in 0..=16 {
        for j in 0..=16 {
            let t = [&step * &Scalar::int(i) - eps, &step * &Scalar::int(j) - eps];
            let b = &(&p.boundary + &dirs[0].scale(&t[0])) + &dirs[1].scale(&t[1]);
            let q = lib(ToricPair::new(p.fan.clone(), b, p.ghosts.clone()))?;
            let (h, t0) = lib(scaling_setup(&q))?;
            let tr = lib(mmp_with_scaling(&q, &h, &t0))?;
            ensure!(tr.outcome == Outcome::MinimalModel, "grid point {t:?}: {}", tr.outcome);
            let f = &tr.final_pair();
            ensure!(nef(&f.fan, &f.log_canonical()), "grid point {t:?}: not nef");
            if !out.iter().any(|g| g.is_isomorphic(&f.fan)) {
                out.push(f.fan.clone());
            }
        }
    }
    Ok(out)
}

fn c7() -> Check {
    let (p, dirs) = lib(explorer_pair())?;
    let mut sizes = Vec::new();
    let mut eps = Scalar::frac(1, 10);
    for _ in 0..4 {
        let set = lib(finiteness_explorer(&p, &dirs, &eps))?;
        let grid = grid_models(&p, &dirs, &eps)?;
        ensure!(
            set.len() == grid.len() && grid.iter().all(|g| set.contains_fan(g)),
            "eps = {eps}: explorer has {} models, grid {}",
            set.len(),
            grid.len()
        );
        sizes.push(set.len());
        eps = &eps / &Scalar::int(2);
    }
    ensure!(sizes.windows(2).all(|w| w[1] <= w[0]), "sizes {sizes:?} increase");
    Ok(format!("model counts {sizes:?} for eps = 1/10 .. 1/80"))
}

fn c8() -> Check {
    let half = Scalar::frac(1, 2);
    let inst = lib(CurveAlgebraInstance::floor_multiples(&half, half.clone(), 24))?;
    match lib(rationality_certificate(&inst))? {
        RationalityCertificate::Rational { d, .. } if d == half => {}
        other => return Err(format!("floor(i/2): {other:?}")),
    }
    let x = Scalar::sqrt(2) * Scalar::frac(1, 2);
    let b = Scalar::frac(9, 10);
    let inst = lib(CurveAlgebraInstance::floor_multiples(&x, b, 64))?;
    let j = match lib(rationality_certificate(&inst))? {
        RationalityCertificate::IrrationalWitness { j, .. } => j as i64,
        other => return Err(format!("floor(i sqrt2/2): {other:?}")),
    };
    // <j / sqrt 2> > 9/10 iff 100 j^2 > 2 (10 n + 9)^2 with n = floor(j / sqrt 2)
    let exceeds = |j: i64| {
        let n = (0..).take_while(|n: &i64| 2 * n * n <= j * j).last().unwrap();
        100 * j * j > 2 * (10 * n + 9) * (10 * n + 9)
    };
    ensure!(exceeds(j), "j = {j} is not a witness");
    let least = (1..).find(|&i| exceeds(i)).unwrap();
    ensure!(j == least, "witness {j}, least is {least}");
    Ok(format!("Rational(1/2); irrational witness j = {j}"))
}

fn c9() -> Check {
    let fan = hirzebruch(1);
    let mut d = lib(ample_divisor(&fan))?;
    let alpha = Scalar::sqrt(2) * Scalar::frac(1, 2);
    d.set(0, d.coeff(0) + &alpha);
    let eps = Scalar::frac(1, 100);
    let (m, j) = lib(diophantine_gap(&fan, &d, &eps))?;
    let mi: Vec<i64> = m
        .coeffs()
        .iter()
        .map(|c| c.as_rational().filter(|r| r.is_integer()).and_then(|r| r.to_i64()))
        .collect::<Option<_>>()
        .ok_or("M is not integral")?;
    // freeness: each cone's character is integral and a section
    for cone in fan.cones() {
        let cols: Vec<Vec<i64>> = cone.iter().map(|&i| fan.ray(i).to_vec()).collect();
        // solve <m, u_i> = -a_i on the cone: rows are the rays
        let rhs: Vec<i64> = cone.iter().map(|&i| -mi[i]).collect();
        let rows_t: Vec<Vec<i64>> = (0..2).map(|k| cols.iter().map(|c| c[k]).collect()).collect();
        let (nums, den) = cramer(&rows_t, &rhs);
        ensure!(nums.iter().all(|x| x % den == 0), "character of {cone:?} not integral");
        let mchar: Vec<i64> = nums.iter().map(|x| x / den).collect();
        for (i, u) in fan.rays().iter().enumerate() {
            ensure!(mchar[0] * u[0] + mchar[1] * u[1] >= -mi[i], "M has a base point on {cone:?}");
        }
    }
    let jd = d.scale(&Scalar::int(j as i64));
    let mut negative = false;
    let eps_b = BigRational::new(BigInt::from(1), BigInt::from(100));
    for (c, mk) in jd.coeffs().iter().zip(&mi) {
        let (a, b, r) = big(c);
        let g = a - BigRational::from_integer(BigInt::from(*mk));
        ensure!(sign_quadratic(&(&g - &eps_b), &b, r) < 0 && sign_quadratic(&(&g + &eps_b), &b, r) > 0, "gap not below 1/100");
        negative |= sign_quadratic(&g, &b, r) < 0;
    }
    ensure!(negative, "jD - M is effective");
    Ok(format!("j = {j}, M = {mi:?}"))
}

/// Irreducible elements of `{(x, d) in cone : k | d}` up to degree `max_d`.
fn irreducibles(u: [i64; 2], v: [i64; 2], k: i64, max_d: i64) -> BTreeSet<(i64, i64)> {
    let side = |p: [i64; 2], x: i64, d: i64| p[0] * d - p[1] * x;
    let orient = side(u, v[0], v[1]).signum();
    let inside = |x: i64, d: i64| side(u, x, d) * orient >= 0 && side(v, x, d) * orient <= 0;
    let span = (u[0].abs() + v[0].abs() + 1) * max_d;
    let mut gens: BTreeSet<(i64, i64)> = BTreeSet::new();
    for d in (k..=max_d).step_by(k as usize) {
        for x in -span..=span {
            if !inside(x, d) {
                continue;
            }
            let reducible = gens.iter().any(|&(gx, gd)| gd < d && inside(x - gx, d - gd));
            if !reducible {
                gens.insert((x, d));
            }
        }
    }
    gens
}

fn fg_set(v: &FgVerdict) -> Option<BTreeSet<(i64, i64)>> {
    match v {
        FgVerdict::Fg { generators, .. } => Some(generators.iter().map(|g| (g[0], g[1])).collect()),
        FgVerdict::Unknown { .. } => None,
    }
}

fn c10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut done = 0;
    while done < 50 {
        let u = [rng.gen_range(-3..=3), rng.gen_range(1..=3)];
        let v = [rng.gen_range(-3..=3), rng.gen_range(1..=3)];
        if u[0] * v[1] - u[1] * v[0] == 0 {
            continue;
        }
        let alg = GradedSemigroup::Cone { u, v };
        let horizon = u[1] + v[1];
        let full_oracle = irreducibles(u, v, 1, horizon);
        for k in [2usize, 3, 5] {
            let rep = lib(truncation_fg(&alg, k, 24))?;
            ensure!(rep.agree() && rep.full.is_fg() && rep.integral, "cone {u:?} {v:?} k = {k}: {rep:?}");
            ensure!(fg_set(&rep.full) == Some(full_oracle.clone()), "cone {u:?} {v:?}: full generators differ");
            let trunc_oracle: BTreeSet<(i64, i64)> = irreducibles(u, v, k as i64, k as i64 * horizon)
                .into_iter()
                .map(|(x, d)| (x, d / k as i64))
                .collect();
            ensure!(fg_set(&rep.truncated) == Some(trunc_oracle), "cone {u:?} {v:?} k = {k}: truncated generators differ");
            let gens = lib(minimal_generators(&alg, k, 24))?;
            ensure!(lib(verify_generators(&alg, k, &gens, 3 * horizon as usize))?, "cone {u:?} {v:?} k = {k}: regeneration fails");
        }
        done += 1;
    }
    Ok("50 cones, k in {2, 3, 5}".into())
}

fn c11() -> Check {
    let p = lib(pl_flip_pair())?;
    let pl = lib(classify_pl_flip(&p, PL_FLIP_S))?;
    ensure!(pl.is_pl && pl.p_q.is_some(), "not a pl flip: {pl:?}");
    let m_max = 12;
    let model = lib(restricted_algebra(&p, PL_FLIP_S, m_max))?;
    let gens = match &model.verdict {
        FgVerdict::Fg { generators, .. } => generators.clone(),
        other => return Err(format!("restricted algebra: {other:?}")),
    };
    ensure!(model.full.agree(), "truncation disagrees");
    let table = GradedSemigroup::table(model.degrees.iter().map(|d| d.image.clone()).collect());
    let split: Vec<(usize, Vec<i64>)> = gens
        .iter()
        .map(|g| (g[g.len() - 1] as usize, g[..g.len() - 1].to_vec()))
        .collect();
    ensure!(lib(verify_generators(&table, 1, &split, m_max))?, "restricted generators do not regenerate");

    // Chamber oracle: of the two triangulations of the circuit, the Proj
    // side makes K + Delta positive on its interior wall.
    let w = lib(flip_wall(&p.fan))?;
    let action = lib(analyze_ray(&p.fan, w))?;
    let (wall, rel) = walls(&p.fan).into_iter().find(|x| x.0 == [2, 3]).ok_or("no wall cd")?;
    let kd = degree_on(&rel, &p.log_canonical());
    let circuit: Vec<usize> = (0..rel.len()).filter(|&i| rel[i] != 0).collect();
    let pos: Vec<usize> = circuit.iter().copied().filter(|&i| rel[i] > 0).collect();
    let neg: Vec<usize> = circuit.iter().copied().filter(|&i| rel[i] < 0).collect();
    ensure!(wall == neg, "wall {wall:?} vs negative part {neg:?}");
    // a triangulation of the circuit omits one ray of the side opposite its
    // interior wall
    let omit = if kd.is_positive() { &pos } else { &neg };
    let mut predicted = BTreeSet::new();
    for cone in p.fan.cones() {
        let set: BTreeSet<usize> = cone.iter().copied().collect();
        if !(neg.iter().all(|i| set.contains(i)) && pos.iter().any(|i| set.contains(i))) {
            predicted.insert(set);
        }
    }
    for &off in omit {
        predicted.insert(circuit.iter().copied().filter(|&i| i != off).collect());
    }
    let predicted: BTreeSet<BTreeSet<Vec<i64>>> = predicted
        .into_iter()
        .map(|c| c.into_iter().map(|i| p.fan.ray(i).to_vec()).collect())
        .collect();
    let q = lib(flip(&p, &action))?;
    ensure!(cone_vectors(&q.fan) == predicted, "flipped fan differs from the predicted chamber");
    Ok(format!("restricted algebra fg with {} generators, pl index {:?}; flip matches chamber", gens.len(), pl.p_q.unwrap()))
}

fn c12() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut fano = 0;
    for i in 0..20 {
        let dim = if i < 12 { 2 } else { 3 };
        let fan = lib(random_fan(&mut rng, dim, if dim == 2 { 8 } else { 6 }))?;
        let cox = lib(cox_ring(&fan))?;
        let n = fan.num_rays();
        ensure!(cox.generators == n && cox.grading_rank == n - dim, "fan {i}: {} / {}", cox.generators, cox.grading_rank);
        for k in 0..cox.grading_rank {
            for c in 0..dim {
                let s: i64 = (0..n).map(|r| cox.grading[r][k] * fan.ray(r)[c]).sum();
                ensure!(s == 0, "fan {i}: grading column {k} is not a relation");
            }
        }
        // -K ample: the character m_s with <m_s, u> = 1 on s satisfies
        // <m_s, u> < 1 off s, for every maximal cone s
        let mut ample = true;
        for cone in fan.cones() {
            let rows: Vec<Vec<i64>> = cone.iter().map(|&r| fan.ray(r).to_vec()).collect();
            let cols: Vec<Vec<i64>> = (0..dim).map(|c| rows.iter().map(|r| r[c]).collect()).collect();
            let (nums, den) = cramer(&cols, &vec![1; dim]);
            for (r, u) in fan.rays().iter().enumerate() {
                if cone.contains(&r) {
                    continue;
                }
                let val: i64 = nums.iter().zip(u).map(|(a, b)| a * b).sum();
                // val / den < 1
                if (den - val) * den.signum() <= 0 {
                    ample = false;
                }
            }
        }
        ensure!(cox.fano == ample, "fan {i}: fano flag {} but -K ample is {ample}", cox.fano);
        fano += ample as usize;
    }
    Ok(format!("20 fans, {fano} Fano"))
}

fn main() {
    let criteria: [(usize, fn() -> Check); 12] = [
        (1, c1),
        (2, c2),
        (3, c3),
        (4, c4),
        (5, c5),
        (6, c6),
        (7, c7),
        (8, c8),
        (9, c9),
        (10, c10),
        (11, c11),
        (12, c12),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let results: Vec<(usize, Check, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .filter(|(n, _)| only.is_empty() || only.contains(n))
            .map(|&(n, f)| {
                s.spawn(move || {
                    let start = Instant::now();
                    let r = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
                        Err(e
                            .downcast_ref::<String>()
                            .cloned()
                            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                            .unwrap_or_else(|| "panic".into()))
                    });
                    (n, r, start.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut failed = 0;
    for (n, r, secs) in results {
        match r {
            Ok(d) => println!("criterion {n}: pass ({secs:.1}s) {d}"),
            Err(e) => {
                failed += 1;
                println!("criterion {n}: FAIL ({secs:.1}s) {e}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
