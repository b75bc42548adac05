//! Log discrepancies, singularity classes, extremal contractions and flips.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::ToPrimitive;

use crate::arith::{Rat, Scalar};
use crate::curves::{self, CurveClass};
use crate::divisor::{local_character, TDivisor, ToricPair};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::linalg::{gcd_vec, primitive_i64, rank_i64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ContractionKind {
    Fibering,
    Divisorial,
    Flipping,
}

impl fmt::Display for ContractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ContractionKind::Fibering => "fibering",
            ContractionKind::Divisorial => "divisorial",
            ContractionKind::Flipping => "flipping",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibrationDescriptor {
    /// Dimension of the base.
    pub base_rank: usize,
    /// Rays collapsed onto the base.
    pub fiber_rays: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct ContractionResult {
    pub kind: ContractionKind,
    /// Representative wall of the contracted ray.
    pub wall: usize,
    /// Primitive relation of the ray, dense over rays.
    pub relation: Vec<i64>,
    pub j_plus: Vec<usize>,
    pub j_minus: Vec<usize>,
    pub removed_ray: Option<usize>,
    /// Fan of the target (divisorial: simplicial; flipping: the
    /// non-simplicial base of the flip).
    pub target: Option<Fan>,
    pub fibration: Option<FibrationDescriptor>,
    /// Ray sets `J u K` of the merged cones.
    pub merged: Vec<Vec<usize>>,
    /// Maximal cones (indices into the source fan) that get merged.
    pub components: Vec<Vec<usize>>,
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Combinatorial analysis of the contraction of the ray spanned by a wall,
/// without sign conditions.
pub fn analyze_ray(fan: &Fan, wall: usize) -> Result<ContractionResult> {
    fan.require_complete_simplicial()?;
    let walls = fan.walls()?;
    let n = fan.rank();
    let rel = walls[wall].relation.clone();
    let j_plus: Vec<usize> = (0..rel.len()).filter(|&i| rel[i] > 0).collect();
    let j_minus: Vec<usize> = (0..rel.len()).filter(|&i| rel[i] < 0).collect();
    let j: BTreeSet<usize> = j_plus.iter().chain(&j_minus).copied().collect();

    let mut dsu = Dsu((0..fan.cones().len()).collect());
    let mut involved = BTreeSet::new();
    for w in walls.iter().filter(|w| w.relation == rel) {
        dsu.union(w.adjacent.0, w.adjacent.1);
        involved.insert(w.adjacent.0);
        involved.insert(w.adjacent.1);
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &c in &involved {
        comps.entry(dsu.find(c)).or_default().push(c);
    }
    let mut merged = Vec::new();
    let mut components = Vec::new();
    for (_, cs) in comps {
        let union: BTreeSet<usize> = cs.iter().flat_map(|&c| fan.cones()[c].iter().copied()).collect();
        if !j.is_subset(&union) {
            return Err(Error::NotExtremal(wall));
        }
        let k: Vec<usize> = union.difference(&j).copied().collect();
        if k.len() + j.len() != n + 1 {
            return Err(Error::NotExtremal(wall));
        }
        let expected: BTreeSet<Vec<usize>> = j_plus
            .iter()
            .map(|&jp| {
                let mut c: Vec<usize> = j.iter().copied().filter(|&x| x != jp).chain(k.iter().copied()).collect();
                c.sort_unstable();
                c
            })
            .collect();
        let actual: BTreeSet<Vec<usize>> = cs.iter().map(|&c| fan.cones()[c].clone()).collect();
        if expected != actual {
            return Err(Error::NotExtremal(wall));
        }
        merged.push(union.into_iter().collect::<Vec<_>>());
        components.push(cs);
    }
    let all_merged: BTreeSet<usize> = components.iter().flatten().copied().collect();
    let untouched: Vec<Vec<usize>> = (0..fan.cones().len())
        .filter(|c| !all_merged.contains(c))
        .map(|c| fan.cones()[c].clone())
        .collect();

    let mut res = ContractionResult {
        kind: ContractionKind::Flipping,
        wall,
        relation: rel,
        j_plus: j_plus.clone(),
        j_minus: j_minus.clone(),
        removed_ray: None,
        target: None,
        fibration: None,
        merged: merged.clone(),
        components,
    };
    match j_minus.len() {
        0 => {
            let fiber: Vec<Vec<i64>> = j_plus.iter().map(|&i| fan.ray(i).to_vec()).collect();
            res.kind = ContractionKind::Fibering;
            res.fibration = Some(FibrationDescriptor {
                base_rank: n - rank_i64(&fiber),
                fiber_rays: j_plus,
            });
        }
        1 => {
            let e = j_minus[0];
            res.kind = ContractionKind::Divisorial;
            res.removed_ray = Some(e);
            if untouched.iter().any(|c| c.contains(&e)) {
                return Err(Error::NotExtremal(wall));
            }
            let mut cones = untouched;
            for m in &merged {
                cones.push(m.iter().copied().filter(|&x| x != e).collect());
            }
            let cones: Vec<Vec<usize>> = cones
                .into_iter()
                .map(|c| c.into_iter().map(|x| if x > e { x - 1 } else { x }).collect())
                .collect();
            let mut rays = fan.rays().to_vec();
            rays.remove(e);
            res.target = Some(Fan::trusted(n, rays, cones));
        }
        _ => {
            let mut cones = untouched;
            cones.extend(merged.iter().cloned());
            res.target = Some(Fan::trusted(n, fan.rays().to_vec(), cones));
        }
    }
    Ok(res)
}

fn is_extremal(fan: &Fan, wall: usize) -> Result<bool> {
    let gens = curves::mori_cone(fan)?;
    let walls = fan.walls()?;
    let rel = &walls[wall].relation;
    Ok(gens.iter().any(|&g| walls[g].relation == *rel))
}

/// Contract a `(K+Delta)`-negative extremal ray.
pub fn contract(p: &ToricPair, r: &CurveClass) -> Result<ContractionResult> {
    if !is_extremal(&p.fan, r.wall)? {
        return Err(Error::NotExtremal(r.wall));
    }
    if !r.dot(&p.log_canonical()).is_negative() {
        return Err(Error::NotNegative(r.wall));
    }
    analyze_ray(&p.fan, r.wall)
}

/// Fan obtained by exchanging each merged cone for its other triangulation.
pub fn flipped_fan(fan: &Fan, c: &ContractionResult) -> Result<Fan> {
    if c.kind != ContractionKind::Flipping {
        return Err(Error::NotFlipping);
    }
    let n = fan.rank();
    let all: BTreeSet<usize> = c.components.iter().flatten().copied().collect();
    let mut cones: Vec<Vec<usize>> = (0..fan.cones().len())
        .filter(|i| !all.contains(i))
        .map(|i| fan.cones()[i].clone())
        .collect();
    for m in &c.merged {
        for &jm in &c.j_minus {
            let cone: Vec<usize> = m.iter().copied().filter(|&x| x != jm).collect();
            let vs: Vec<Vec<i64>> = cone.iter().map(|&i| fan.ray(i).to_vec()).collect();
            if rank_i64(&vs) != n {
                return Err(Error::NoOtherChamber(format!("cone {cone:?} is degenerate")));
            }
            cones.push(cone);
        }
    }
    let out = Fan::trusted(n, fan.rays().to_vec(), cones);
    if !out.is_complete() || !out.is_simplicial() {
        return Err(Error::NoOtherChamber("exchanged fan is not a complete simplicial fan".into()));
    }
    Ok(out)
}

/// Perform a flip, transporting the pair (rays are unchanged). Verifies that
/// `K + Delta` is positive on the new walls.
pub fn flip(p: &ToricPair, c: &ContractionResult) -> Result<ToricPair> {
    let fan = flipped_fan(&p.fan, c)?;
    let q = ToricPair::raw(fan, p.boundary.clone(), p.ghosts.clone());
    let neg: Vec<i64> = c.relation.iter().map(|x| -x).collect();
    let kd = q.log_canonical();
    let mut found = false;
    for w in q.fan.walls()? {
        if w.relation == neg {
            found = true;
            if !kd.dot(w).is_positive() {
                return Err(Error::Invariant(format!(
                    "K+Delta is not positive on flipped wall {:?}",
                    w.cone
                )));
            }
        }
    }
    if !found {
        return Err(Error::NoOtherChamber("no flipped wall found".into()));
    }
    Ok(q)
}

/// Transport a divisor across a birational step.
pub fn transport(d: &TDivisor, c: &ContractionResult) -> TDivisor {
    match c.removed_ray {
        Some(e) => d.without(e),
        None => d.clone(),
    }
}

/// Transport a pair across a divisorial contraction or flip.
pub fn apply_step(p: &ToricPair, c: &ContractionResult) -> Result<ToricPair> {
    match c.kind {
        ContractionKind::Fibering => Err(Error::Precondition("fibering contraction has no birational model".into())),
        ContractionKind::Divisorial => {
            let fan = c.target.clone().expect("divisorial target");
            let ghosts = p
                .ghosts
                .iter()
                .map(|g| crate::divisor::Ghost {
                    class: transport(&g.class, c),
                    weight: g.weight.clone(),
                })
                .collect();
            Ok(ToricPair::raw(fan, transport(&p.boundary, c), ghosts))
        }
        ContractionKind::Flipping => flip(p, c),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SingClass {
    NotLc,
    Lc,
    Plt,
    Klt,
    Terminal,
}

impl fmt::Display for SingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SingClass::NotLc => "not-lc",
            SingClass::Lc => "lc",
            SingClass::Plt => "plt",
            SingClass::Klt => "klt",
            SingClass::Terminal => "terminal",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogDiscrepancyReport {
    pub valuation: Vec<i64>,
    pub value: Scalar,
    pub class: SingClass,
}

/// `A(v) = psi(v)`, the piecewise linear function with `psi(u_rho) = 1 -
/// delta_rho` on the boundary (ghosts contribute nothing).
pub fn log_discrepancy_value(fan: &Fan, boundary: &TDivisor, v: &[i64]) -> Result<Scalar> {
    let Some((ci, coeffs)) = fan.locate(v) else {
        return Err(Error::VectorOutsideSupport(v.to_vec()));
    };
    let cone = &fan.cones()[ci];
    let vs: Vec<Vec<i64>> = cone.iter().map(|&i| fan.ray(i).to_vec()).collect();
    if rank_i64(&vs) != cone.len() {
        return Err(Error::NotQCartier);
    }
    Ok(coeffs
        .iter()
        .map(|(r, l)| Scalar::rational(l.clone()) * (Scalar::one() - boundary.coeff(*r).clone()))
        .sum())
}

/// Smallest face (ray set) of the fan containing `v` in its relative
/// interior.
pub fn minimal_cone(fan: &Fan, v: &[i64]) -> Option<Vec<usize>> {
    let (_, coeffs) = fan.locate(v)?;
    Some(coeffs.into_iter().filter(|(_, l)| !l.is_zero()).map(|(r, _)| r).collect())
}

/// Sampled valuations: rays, pairwise sums inside cones, cone barycenters.
fn sample_valuations(fan: &Fan) -> Vec<Vec<i64>> {
    let mut out = BTreeSet::new();
    for c in fan.cones() {
        for (a, &i) in c.iter().enumerate() {
            for &j in &c[a + 1..] {
                let s: Vec<i64> = fan.ray(i).iter().zip(fan.ray(j)).map(|(x, y)| x + y).collect();
                out.insert(primitive_i64(&s));
            }
        }
        let mut s = vec![0i64; fan.rank()];
        for &i in c {
            for (k, x) in fan.ray(i).iter().enumerate() {
                s[k] += x;
            }
        }
        if gcd_vec(&s) != 0 {
            out.insert(primitive_i64(&s));
        }
    }
    out.into_iter().filter(|v| fan.ray_index(v).is_none()).collect()
}

/// Lattice points `v != 0`, not rays, with `A(v) <= 1`; only meaningful
/// for klt boundaries, where the region is bounded.
fn small_discrepancy_points(fan: &Fan, boundary: &TDivisor) -> Vec<Vec<i64>> {
    let n = fan.rank();
    let mut out = Vec::new();
    for c in fan.cones() {
        // vertices u_rho / (1 - delta_rho) and the origin
        let mut lo = vec![Rat::zero(); n];
        let mut hi = vec![Rat::zero(); n];
        for &r in c {
            let w = Scalar::one() - boundary.coeff(r).clone();
            let scale = w.recip();
            for k in 0..n {
                let x = Scalar::int(fan.ray(r)[k]) * scale.clone();
                let f = Rat::from_bigint(x.floor());
                let cc = Rat::from_bigint(x.ceil());
                if f < lo[k] {
                    lo[k] = f;
                }
                if cc > hi[k] {
                    hi[k] = cc;
                }
            }
        }
        let ranges: Vec<(i64, i64)> = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| (a.to_i64().unwrap(), b.to_i64().unwrap()))
            .collect();
        let mut cur = vec![0i64; n];
        scan_box(&ranges, 0, &mut cur, &mut |v| {
            if v.iter().all(|&x| x == 0) || fan.ray_index(v).is_some() {
                return;
            }
            if let Some(coeffs) = crate::fan::cone_coefficients(fan.rays(), c, v) {
                let a: Scalar = coeffs
                    .iter()
                    .map(|(r, l)| Scalar::rational(l.clone()) * (Scalar::one() - boundary.coeff(*r).clone()))
                    .sum();
                if a <= Scalar::one() {
                    out.push(v.to_vec());
                }
            }
        });
    }
    out
}

fn scan_box(ranges: &[(i64, i64)], k: usize, cur: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
    if k == ranges.len() {
        f(cur);
        return;
    }
    for x in ranges[k].0..=ranges[k].1 {
        cur[k] = x;
        scan_box(ranges, k + 1, cur, f);
    }
}

/// Singularity class of `(X, boundary)` for a simplicial fan.
pub fn singularity_class(fan: &Fan, boundary: &TDivisor) -> Result<SingClass> {
    if !fan.is_simplicial() {
        return Err(Error::NotQCartier);
    }
    let one = Scalar::one();
    if boundary.coeffs().iter().any(|c| *c > one) {
        return Ok(SingClass::NotLc);
    }
    if boundary.coeffs().iter().all(|c| *c < one) {
        let small = small_discrepancy_points(fan, boundary);
        return Ok(if small.is_empty() { SingClass::Terminal } else { SingClass::Klt });
    }
    for v in sample_valuations(fan) {
        if !log_discrepancy_value(fan, boundary, &v)?.is_positive() {
            return Ok(SingClass::Lc);
        }
    }
    Ok(SingClass::Plt)
}

pub fn log_discrepancy(p: &ToricPair, v: &[i64]) -> Result<LogDiscrepancyReport> {
    let value = log_discrepancy_value(&p.fan, &p.boundary, v)?;
    Ok(LogDiscrepancyReport {
        valuation: v.to_vec(),
        value,
        class: singularity_class(&p.fan, &p.boundary)?,
    })
}

/// All primitive sums of at most three rays: the monotonicity test set.
pub fn test_valuations(fan: &Fan) -> Vec<Vec<i64>> {
    let r = fan.num_rays();
    let mut out = BTreeSet::new();
    for a in 0..r {
        for b in a..r {
            for c in b..r {
                for combo in [vec![a], vec![a, b], vec![a, b, c]] {
                    let mut s = vec![0i64; fan.rank()];
                    for &i in &combo {
                        for (k, x) in fan.ray(i).iter().enumerate() {
                            s[k] += x;
                        }
                    }
                    if gcd_vec(&s) != 0 {
                        out.insert(primitive_i64(&s));
                    }
                }
            }
        }
    }
    out.into_iter().collect()
}

/// True if the center of `v` lies in `V(cone(J-))`, the exceptional locus
/// of the contraction.
pub fn center_in_exceptional(fan: &Fan, v: &[i64], j_minus: &[usize]) -> bool {
    match minimal_cone(fan, v) {
        Some(tau) => j_minus.iter().all(|j| tau.contains(j)),
        None => false,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlReport {
    pub is_pl: bool,
    /// Wall of the flipping ray, when one was found.
    pub wall: Option<usize>,
    pub p_q: Option<(i64, i64)>,
    pub relative_picard: usize,
}

/// Check the pl-flip conditions for `S` and find `(p, q)` with
/// `p (K + Delta) ~ q S` over the base of the contraction.
pub fn classify_pl_flip(p: &ToricPair, s: usize) -> Result<PlReport> {
    if s >= p.boundary.len() || *p.boundary.coeff(s) != Scalar::one() {
        return Err(Error::NotPlt);
    }
    if singularity_class(&p.fan, &p.boundary)? < SingClass::Plt {
        return Err(Error::NotPlt);
    }
    let kd = p.log_canonical();
    let sd = TDivisor::prime(p.fan.num_rays(), s);
    let cands: Vec<CurveClass> = curves::negative_rays(p)?
        .into_iter()
        .filter(|c| c.dot(&sd).is_negative())
        .collect();
    let refs: Vec<&CurveClass> = cands.iter().collect();
    let rel_pic = curves::class_rank(&refs);
    let none = |rel_pic| PlReport {
        is_pl: false,
        wall: None,
        p_q: None,
        relative_picard: rel_pic,
    };
    if rel_pic != 1 {
        return Ok(none(rel_pic));
    }
    let r = &cands[0];
    let c = analyze_ray(&p.fan, r.wall)?;
    if c.kind != ContractionKind::Flipping {
        return Ok(none(rel_pic));
    }
    let ratio = r.dot(&kd) / r.dot(&sd);
    let Some(ratio) = ratio.as_rational().cloned() else {
        return Ok(PlReport {
            is_pl: true,
            wall: Some(r.wall),
            p_q: None,
            relative_picard: 1,
        });
    };
    // q / p = (K+Delta).R / S.R
    let (p0, q0) = (ratio.denom().to_i64().unwrap(), ratio.numer().to_i64().unwrap());
    let mut p_q = None;
    for k in 1..=1000i64 {
        let (pp, qq) = (p0 * k, q0 * k);
        let d = &kd.scale(&Scalar::int(pp)) - &sd.scale(&Scalar::int(qq));
        if !d.is_integral() {
            continue;
        }
        let cartier = |div: &TDivisor, cone: &[usize]| {
            local_character(&p.fan, cone, div)
                .map(|m| m.iter().all(|x| x.is_integer()))
                .unwrap_or(false)
        };
        let trivial_over_base = c.merged.iter().all(|m| {
            let rows: Vec<Vec<i64>> = m.iter().map(|&i| p.fan.ray(i).to_vec()).collect();
            let a = crate::linalg::to_rat_matrix(&rows);
            let b: Vec<Rat> = m.iter().map(|&i| -d.coeff(i).as_rational().unwrap().clone()).collect();
            crate::linalg::solve(&a, &b)
                .map(|x| x.iter().all(|v| v.is_integer()))
                .unwrap_or(false)
        });
        let kd_p = kd.scale(&Scalar::int(pp));
        let s_q = sd.scale(&Scalar::int(qq));
        let both_cartier = p
            .fan
            .cones()
            .iter()
            .all(|cone| cartier(&kd_p, cone) && cartier(&s_q, cone));
        if trivial_over_base && both_cartier {
            p_q = Some((pp, qq));
            break;
        }
    }
    Ok(PlReport {
        is_pl: true,
        wall: Some(r.wall),
        p_q,
        relative_picard: 1,
    })
}
