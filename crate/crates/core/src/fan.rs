//! Rational polyhedral fans over `Z^n`: validation, classification, walls,
//! star subdivision and lattice isomorphism.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use log::warn;
use num_traits::{One, Signed};
use sha2::{Digest, Sha256};

use crate::arith::Rat;
use crate::error::{Error, Result};
use crate::linalg::{
    self, combinations, dot_i64, gcd_vec, minor_gcd, nullspace, primitive_from_rats, rank_i64,
    to_rat_matrix, transpose,
};
use crate::lp::{Lp, Sense};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct FanFlags {
    pub smooth: bool,
    pub simplicial: bool,
    pub complete: bool,
}

/// Codimension-one cone shared by two simplicial maximal cones, together
/// with the curve class it defines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    /// Ray indices of the wall, sorted.
    pub cone: Vec<usize>,
    /// Indices of the two maximal cones meeting along the wall.
    pub adjacent: (usize, usize),
    /// The off-wall ray of each adjacent cone.
    pub off: (usize, usize),
    /// Primitive integer relation among the rays of both adjacent cones,
    /// positive on the two off-wall rays; dense over all rays.
    pub relation: Vec<i64>,
    /// `D_rho . C` for every ray, dense.
    pub pairing: Vec<Rat>,
}

#[derive(Clone)]
pub struct Fan {
    rank: usize,
    rays: Vec<Vec<i64>>,
    cones: Vec<Vec<usize>>,
    flags: FanFlags,
    walls: OnceLock<Result<Vec<Wall>>>,
    pub(crate) mori: OnceLock<Result<Vec<usize>>>,
}

impl PartialEq for Fan {
    fn eq(&self, other: &Fan) -> bool {
        self.rank == other.rank && self.rays == other.rays && self.cones == other.cones
    }
}

impl Eq for Fan {}

impl fmt::Debug for Fan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Fan")
            .field("rank", &self.rank)
            .field("rays", &self.rays)
            .field("cones", &self.cones)
            .field("flags", &self.flags)
            .finish()
    }
}

/// Lattice isomorphism between two fans: `matrix * u_i = u'_{perm[i]}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Isomorphism {
    pub matrix: Vec<Vec<i64>>,
    pub perm: Vec<usize>,
}

impl Fan {
    /// Validate and build a fan. Non-primitive rays are normalized with a
    /// warning; see [`Fan::build`] to also get the list of normalized rays.
    pub fn new(rank: usize, rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> Result<Fan> {
        Fan::build(rank, rays, cones).map(|(f, _)| f)
    }

    pub fn build(
        rank: usize,
        rays: Vec<Vec<i64>>,
        cones: Vec<Vec<usize>>,
    ) -> Result<(Fan, Vec<usize>)> {
        if rank == 0 {
            return Err(Error::Invalid("rank must be positive".into()));
        }
        let mut normalized = Vec::new();
        let mut prim = Vec::with_capacity(rays.len());
        for (i, r) in rays.into_iter().enumerate() {
            if r.len() != rank {
                return Err(Error::Invalid(format!("ray {i} has length {} != {rank}", r.len())));
            }
            let g = gcd_vec(&r);
            if g == 0 {
                return Err(Error::Invalid(format!("ray {i} is zero")));
            }
            if g != 1 {
                warn!("ray {i} {r:?} is not primitive; dividing by {g}");
                normalized.push(i);
                prim.push(r.iter().map(|x| x / g).collect());
            } else {
                prim.push(r);
            }
        }
        let mut seen = BTreeSet::new();
        for (i, r) in prim.iter().enumerate() {
            if !seen.insert(r.clone()) {
                return Err(Error::Invalid(format!("duplicate ray {i} {r:?}")));
            }
        }
        let mut cs: Vec<Vec<usize>> = Vec::new();
        for c in cones {
            let mut c = c;
            c.sort_unstable();
            c.dedup();
            if c.is_empty() {
                return Err(Error::Invalid("empty cone".into()));
            }
            if let Some(&bad) = c.iter().find(|&&i| i >= prim.len()) {
                return Err(Error::Invalid(format!("cone refers to missing ray {bad}")));
            }
            cs.push(c);
        }
        // drop cones listed as faces of other cones
        let mut keep: Vec<Vec<usize>> = Vec::new();
        cs.sort();
        cs.dedup();
        for (i, c) in cs.iter().enumerate() {
            let contained = cs
                .iter()
                .enumerate()
                .any(|(j, d)| j != i && d.len() > c.len() && c.iter().all(|x| d.contains(x)));
            if !contained {
                keep.push(c.clone());
            }
        }
        for i in 0..prim.len() {
            if !keep.iter().any(|c| c.contains(&i)) {
                return Err(Error::DanglingRay(i));
            }
        }
        for c in &keep {
            check_cone(&prim, c)?;
        }
        for a in 0..keep.len() {
            for b in a + 1..keep.len() {
                if !separated(&prim, &keep[a], &keep[b]) {
                    return Err(Error::OverlappingCones(keep[a].clone(), keep[b].clone()));
                }
            }
        }
        Ok((Fan::trusted(rank, prim, keep), normalized))
    }

    /// Build without the pairwise overlap checks; used for fans produced by
    /// the engine's own step operators.
    pub(crate) fn trusted(rank: usize, rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> Fan {
        let mut cones: Vec<Vec<usize>> = cones
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                c
            })
            .collect();
        cones.sort();
        let flags = compute_flags(rank, &rays, &cones);
        Fan {
            rank,
            rays,
            cones,
            flags,
            walls: OnceLock::new(),
            mori: OnceLock::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn flags(&self) -> FanFlags {
        self.flags
    }

    pub fn is_complete(&self) -> bool {
        self.flags.complete
    }

    pub fn is_simplicial(&self) -> bool {
        self.flags.simplicial
    }

    pub fn is_smooth(&self) -> bool {
        self.flags.smooth
    }

    /// `#rays - rank`, the Picard rank of a complete simplicial fan.
    pub fn picard_rank(&self) -> usize {
        self.rays.len().saturating_sub(self.rank)
    }

    pub fn require_complete_simplicial(&self) -> Result<()> {
        if !self.flags.simplicial {
            return Err(Error::NotSimplicial);
        }
        if !self.flags.complete {
            return Err(Error::IncompleteFan);
        }
        Ok(())
    }

    /// Multiplicity of a simplicial cone: index of the lattice its rays span.
    pub fn multiplicity(&self, cone: &[usize]) -> num_bigint::BigInt {
        let vs: Vec<Vec<i64>> = cone.iter().map(|&i| self.rays[i].clone()).collect();
        minor_gcd(&vs)
    }

    pub fn walls(&self) -> Result<&[Wall]> {
        self.walls
            .get_or_init(|| compute_walls(self))
            .as_ref()
            .map(|w| w.as_slice())
            .map_err(|e| e.clone())
    }

    /// Rays appearing together with `ray` in some maximal cone.
    pub fn star_rays(&self, ray: usize) -> BTreeSet<usize> {
        self.cones
            .iter()
            .filter(|c| c.contains(&ray))
            .flat_map(|c| c.iter().copied())
            .filter(|&r| r != ray)
            .collect()
    }

    /// True if some maximal cone contains all given rays.
    pub fn is_face_set(&self, rays: &[usize]) -> bool {
        self.cones.iter().any(|c| rays.iter().all(|r| c.contains(r)))
    }

    pub fn ray_index(&self, v: &[i64]) -> Option<usize> {
        self.rays.iter().position(|r| r == v)
    }

    /// Coefficients of `v` in the rays of a simplicial maximal cone that
    /// contains it, together with that cone's index.
    pub fn locate(&self, v: &[i64]) -> Option<(usize, Vec<(usize, Rat)>)> {
        for (ci, c) in self.cones.iter().enumerate() {
            if let Some(coeffs) = cone_coefficients(&self.rays, c, v) {
                return Some((ci, coeffs));
            }
        }
        None
    }

    pub fn contains_vector(&self, v: &[i64]) -> bool {
        self.cones.iter().any(|c| in_cone(&self.rays, c, v))
    }

    /// Star subdivision at a primitive vector of the support.
    pub fn star_subdivision(&self, v: &[i64]) -> Result<Fan> {
        if v.len() != self.rank || gcd_vec(v) != 1 {
            return Err(Error::Invalid(format!("{v:?} is not a primitive vector of rank {}", self.rank)));
        }
        if self.ray_index(v).is_some() {
            return Ok(self.clone());
        }
        if !self.contains_vector(v) {
            return Err(Error::VectorOutsideSupport(v.to_vec()));
        }
        let new = self.rays.len();
        let mut rays = self.rays.clone();
        rays.push(v.to_vec());
        let mut cones = Vec::new();
        for c in &self.cones {
            if !in_cone(&self.rays, c, v) {
                cones.push(c.clone());
                continue;
            }
            if rank_i64(&c.iter().map(|&i| self.rays[i].clone()).collect::<Vec<_>>()) < self.rank {
                return Err(Error::Invalid("star subdivision through a lower-dimensional cone".into()));
            }
            for (facet, normal) in facets_with_normals(&self.rays, c, self.rank) {
                if dot_i64(&normal, v) != 0 {
                    let mut nc = facet.clone();
                    nc.push(new);
                    cones.push(nc);
                }
            }
        }
        Ok(Fan::trusted(self.rank, rays, cones))
    }

    /// Lattice isomorphism onto `other`, if one exists.
    pub fn isomorphism(&self, other: &Fan) -> Option<Isomorphism> {
        if self.rank != other.rank
            || self.rays.len() != other.rays.len()
            || self.cones.len() != other.cones.len()
        {
            return None;
        }
        let mut sizes_a: Vec<usize> = self.cones.iter().map(|c| c.len()).collect();
        let mut sizes_b: Vec<usize> = other.cones.iter().map(|c| c.len()).collect();
        sizes_a.sort_unstable();
        sizes_b.sort_unstable();
        if sizes_a != sizes_b {
            return None;
        }
        let n = self.rank;
        // a basis of Q^n chosen among the rays of one maximal cone
        let (src_cone, basis) = self.cones.iter().find_map(|c| {
            combinations(c.len(), n)
                .into_iter()
                .map(|s| s.iter().map(|&k| c[k]).collect::<Vec<_>>())
                .find(|b| {
                    rank_i64(&b.iter().map(|&i| self.rays[i].clone()).collect::<Vec<_>>()) == n
                })
                .map(|b| (c.clone(), b))
        })?;
        let u_src: Vec<Vec<i64>> = basis.iter().map(|&i| self.rays[i].clone()).collect();
        let src_inv = linalg::inverse(&to_rat_matrix(&transpose(&u_src)))?;
        let other_cones: BTreeSet<Vec<usize>> = other.cones.iter().cloned().collect();
        for tc in other.cones.iter().filter(|c| c.len() == src_cone.len()) {
            for sel in combinations(tc.len(), n) {
                let chosen: Vec<usize> = sel.iter().map(|&k| tc[k]).collect();
                for perm in permutations(n) {
                    let images: Vec<Vec<i64>> =
                        perm.iter().map(|&p| other.rays[chosen[p]].clone()).collect();
                    // A = U_tgt * U_src^{-1}, columns are ray vectors
                    let ut = to_rat_matrix(&transpose(&images));
                    let a = mat_mul(&ut, &src_inv);
                    let Some(ai) = integral(&a) else { continue };
                    let d = linalg::det_i64(&ai);
                    if d.abs() != num_bigint::BigInt::one() {
                        continue;
                    }
                    let mut map = Vec::with_capacity(self.rays.len());
                    let mut ok = true;
                    for r in &self.rays {
                        let img: Vec<i64> = ai.iter().map(|row| dot_i64(row, r)).collect();
                        match other.ray_index(&img) {
                            Some(j) => map.push(j),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if !ok {
                        continue;
                    }
                    let mapped: BTreeSet<Vec<usize>> = self
                        .cones
                        .iter()
                        .map(|c| {
                            let mut m: Vec<usize> = c.iter().map(|&i| map[i]).collect();
                            m.sort_unstable();
                            m
                        })
                        .collect();
                    if mapped == other_cones {
                        return Some(Isomorphism { matrix: ai, perm: map });
                    }
                }
            }
        }
        None
    }

    pub fn is_isomorphic(&self, other: &Fan) -> bool {
        self.isomorphism(other).is_some()
    }

    /// SHA-256 of the canonical serialization (rays in order, sorted cones).
    /// SHA-256 of the fan with rays sorted and cones sorted, so that the
    /// hash ignores storage order.
    pub fn canonical_hash(&self) -> String {
        let mut order: Vec<usize> = (0..self.rays.len()).collect();
        order.sort_by(|&a, &b| self.rays[a].cmp(&self.rays[b]));
        let mut pos = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let mut cones: Vec<Vec<usize>> = self
            .cones
            .iter()
            .map(|c| {
                let mut c: Vec<usize> = c.iter().map(|&i| pos[i]).collect();
                c.sort_unstable();
                c
            })
            .collect();
        cones.sort();
        let mut h = Sha256::new();
        h.update(format!("{}|", self.rank));
        for &i in &order {
            h.update(format!("{:?};", self.rays[i]));
        }
        h.update("|");
        for c in &cones {
            h.update(format!("{c:?};"));
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn mat_mul(a: &[Vec<Rat>], b: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| row.iter().zip(b).map(|(x, br)| x * &br[j]).sum())
                .collect()
        })
        .collect()
}

fn integral(a: &[Vec<Rat>]) -> Option<Vec<Vec<i64>>> {
    a.iter()
        .map(|r| r.iter().map(|x| x.to_i64()).collect::<Option<Vec<_>>>())
        .collect()
}

/// Pointedness plus extremality of each listed ray.
fn check_cone(rays: &[Vec<i64>], cone: &[usize]) -> Result<()> {
    let vs: Vec<Vec<i64>> = cone.iter().map(|&i| rays[i].clone()).collect();
    if rank_i64(&vs) == vs.len() {
        return Ok(());
    }
    let n = vs[0].len();
    let mut lp = Lp::new_free(n);
    for v in &vs {
        lp.constraint(v.iter().map(|&x| Rat::from_int(x)).collect(), Sense::Ge, Rat::one());
    }
    if !lp.feasible() {
        return Err(Error::Invalid(format!("cone {cone:?} is not strongly convex")));
    }
    for (k, &i) in cone.iter().enumerate() {
        let others: Vec<usize> = cone.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &r)| r).collect();
        if in_cone(rays, &others, &rays[i]) {
            return Err(Error::Invalid(format!("ray {i} is not extremal in cone {cone:?}")));
        }
    }
    Ok(())
}

/// Separation test: the cones meet exactly in the face spanned by their
/// common rays.
fn separated(rays: &[Vec<i64>], a: &[usize], b: &[usize]) -> bool {
    let n = rays[0].len();
    let mut lp = Lp::new_free(n);
    let row = |i: usize| rays[i].iter().map(|&x| Rat::from_int(x)).collect::<Vec<_>>();
    for &i in a {
        if b.contains(&i) {
            lp.constraint(row(i), Sense::Eq, Rat::zero());
        } else {
            lp.constraint(row(i), Sense::Ge, Rat::one());
        }
    }
    for &i in b {
        if !a.contains(&i) {
            lp.constraint(row(i), Sense::Le, -Rat::one());
        }
    }
    lp.feasible()
}

/// Nonnegative coefficients expressing `v` in the (linearly independent)
/// rays of `cone`, or `None` when `v` is outside it. Falls back to an LP for
/// non-simplicial cones and returns one representation.
pub fn cone_coefficients(rays: &[Vec<i64>], cone: &[usize], v: &[i64]) -> Option<Vec<(usize, Rat)>> {
    let cols: Vec<Vec<i64>> = cone.iter().map(|&i| rays[i].clone()).collect();
    let a = to_rat_matrix(&transpose(&cols));
    let b: Vec<Rat> = v.iter().map(|&x| Rat::from_int(x)).collect();
    if rank_i64(&cols) == cols.len() {
        let x = linalg::solve(&a, &b)?;
        if x.iter().any(|c| c.signum() < 0) {
            return None;
        }
        return Some(cone.iter().copied().zip(x).collect());
    }
    let mut lp = Lp::new(cone.len());
    for (row, rhs) in a.into_iter().zip(b) {
        lp.constraint(row, Sense::Eq, rhs);
    }
    match lp.solve() {
        crate::lp::LpResult::Optimal { x, .. } => Some(cone.iter().copied().zip(x).collect()),
        _ => None,
    }
}

pub fn in_cone(rays: &[Vec<i64>], cone: &[usize], v: &[i64]) -> bool {
    if cone.is_empty() {
        return v.iter().all(|&x| x == 0);
    }
    cone_coefficients(rays, cone, v).is_some()
}

/// Facets of a full-dimensional cone, each with an inward integer normal.
pub fn facets_with_normals(rays: &[Vec<i64>], cone: &[usize], n: usize) -> Vec<(Vec<usize>, Vec<i64>)> {
    let mut out: BTreeMap<Vec<usize>, Vec<i64>> = BTreeMap::new();
    if n == 1 {
        // the only facet of a half-line is the origin
        let normal = vec![rays[cone[0]][0].signum()];
        out.insert(vec![], normal);
        return out.into_iter().collect();
    }
    for sub in combinations(cone.len(), n - 1) {
        let vs: Vec<Vec<i64>> = sub.iter().map(|&k| rays[cone[k]].clone()).collect();
        if rank_i64(&vs) != n - 1 {
            continue;
        }
        let ns = nullspace(&to_rat_matrix(&vs), n);
        let Some(mut normal) = primitive_from_rats(&ns[0]) else { continue };
        let signs: Vec<i64> = cone.iter().map(|&i| dot_i64(&normal, &rays[i]).signum()).collect();
        if signs.iter().any(|&s| s > 0) && signs.iter().any(|&s| s < 0) {
            continue;
        }
        if signs.iter().any(|&s| s < 0) {
            normal = normal.iter().map(|x| -x).collect();
        }
        let facet: Vec<usize> = cone
            .iter()
            .zip(&signs)
            .filter(|(_, &s)| s == 0)
            .map(|(&i, _)| i)
            .collect();
        out.entry(facet).or_insert(normal);
    }
    out.into_iter().collect()
}

fn compute_flags(rank: usize, rays: &[Vec<i64>], cones: &[Vec<usize>]) -> FanFlags {
    let mut simplicial = true;
    let mut smooth = true;
    let mut full = true;
    for c in cones {
        let vs: Vec<Vec<i64>> = c.iter().map(|&i| rays[i].clone()).collect();
        let r = rank_i64(&vs);
        if r != c.len() {
            simplicial = false;
            smooth = false;
        } else if !minor_gcd(&vs).is_one() {
            smooth = false;
        }
        if r != rank {
            full = false;
        }
    }
    let mut complete = full && !cones.is_empty();
    if complete {
        let mut count: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        for c in cones {
            let facets: Vec<Vec<usize>> = if c.len() == rank {
                (0..c.len())
                    .map(|k| c.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &r)| r).collect())
                    .collect()
            } else {
                facets_with_normals(rays, c, rank).into_iter().map(|(f, _)| f).collect()
            };
            for f in facets {
                *count.entry(f).or_default() += 1;
            }
        }
        complete = count.values().all(|&k| k == 2);
    }
    FanFlags {
        smooth: smooth && simplicial,
        simplicial,
        complete,
    }
}

fn compute_walls(f: &Fan) -> Result<Vec<Wall>> {
    if !f.flags.simplicial {
        return Err(Error::NotSimplicial);
    }
    let n = f.rank;
    let mut by_facet: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    for (ci, c) in f.cones.iter().enumerate() {
        if c.len() != n {
            continue;
        }
        for k in 0..c.len() {
            let facet: Vec<usize> = c.iter().enumerate().filter(|&(j, _)| j != k).map(|(_, &r)| r).collect();
            by_facet.entry(facet).or_default().push(ci);
        }
    }
    let mut walls = Vec::new();
    for (facet, cs) in by_facet {
        if cs.len() != 2 {
            continue;
        }
        let (ca, cb) = (cs[0], cs[1]);
        let a = *f.cones[ca].iter().find(|r| !facet.contains(r)).unwrap();
        let b = *f.cones[cb].iter().find(|r| !facet.contains(r)).unwrap();
        let mut idx = facet.clone();
        idx.push(a);
        idx.push(b);
        let vs: Vec<Vec<i64>> = idx.iter().map(|&i| f.rays[i].clone()).collect();
        let ns = nullspace(&to_rat_matrix(&transpose(&vs)), idx.len());
        if ns.len() != 1 {
            return Err(Error::Invariant(format!("wall {facet:?} has a degenerate relation")));
        }
        let mut rel = primitive_from_rats(&ns[0])
            .ok_or_else(|| Error::Invariant("relation overflow".into()))?;
        let pos_a = idx.len() - 2;
        if rel[pos_a] < 0 {
            rel = rel.iter().map(|x| -x).collect();
        }
        if rel[pos_a] <= 0 || rel[pos_a + 1] <= 0 {
            return Err(Error::Invariant(format!("wall {facet:?}: off-wall rays on one side")));
        }
        let mut relation = vec![0i64; f.rays.len()];
        for (k, &i) in idx.iter().enumerate() {
            relation[i] = rel[k];
        }
        let facet_vs: Vec<Vec<i64>> = facet.iter().map(|&i| f.rays[i].clone()).collect();
        let mult_tau = Rat::from_bigint(minor_gcd(&facet_vs));
        let mult_sigma = Rat::from_bigint(f.multiplicity(&f.cones[ca]));
        let da = &mult_tau / &mult_sigma;
        let ba = Rat::from_int(relation[a]);
        let pairing: Vec<Rat> = relation
            .iter()
            .map(|&b| &(&Rat::from_int(b) * &da) / &ba)
            .collect();
        walls.push(Wall {
            cone: facet,
            adjacent: (ca, cb),
            off: (a, b),
            relation,
            pairing,
        });
    }
    Ok(walls)
}

/// Small helpers used by tests and examples.
pub mod named {
    use super::Fan;

    pub fn p2() -> Fan {
        Fan::new(2, vec![vec![1, 0], vec![0, 1], vec![-1, -1]], vec![vec![0, 1], vec![1, 2], vec![2, 0]])
            .expect("P2 fan")
    }

    /// Hirzebruch surface `F_a` with rays (1,0),(0,1),(-1,a),(0,-1).
    pub fn hirzebruch(a: i64) -> Fan {
        Fan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        )
        .expect("Hirzebruch fan")
    }

    pub fn p1xp1() -> Fan {
        hirzebruch(0)
    }

    pub fn p1() -> Fan {
        Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).expect("P1 fan")
    }

    pub fn p3() -> Fan {
        Fan::new(
            3,
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]],
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .expect("P3 fan")
    }
}

impl Fan {
    /// Rays as `i64` vectors converted to rationals; convenience for callers
    /// doing exact linear algebra.
    pub fn ray_rats(&self, i: usize) -> Vec<Rat> {
        self.rays[i].iter().map(|&x| Rat::from_int(x)).collect()
    }

    /// Largest absolute ray coordinate.
    pub fn max_coordinate(&self) -> i64 {
        self.rays.iter().flatten().map(|x| x.abs()).max().unwrap_or(0)
    }
}
