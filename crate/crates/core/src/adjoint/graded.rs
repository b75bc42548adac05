//! Graded semigroups, their minimal generators and truncations.

use std::collections::HashSet;

use num_traits::ToPrimitive;

use crate::arith::Scalar;
use crate::error::{Error, Result};
use crate::linalg::dot_i64;
use crate::polytope::SectionPolytope;

/// A graded affine semigroup. Elements are `(x, degree)`; every degree
/// piece is finite.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GradedSemigroup {
    /// Numerical semigroup generated by the given degrees, one element per
    /// degree.
    Numerical(Vec<u64>),
    /// Lattice points of the plane cone spanned by `u` and `v`, graded by
    /// the second coordinate (positive on both rays).
    Cone { u: [i64; 2], v: [i64; 2] },
    /// `0 <= x <= slope * degree` with an irrational slope.
    IrrationalCone { slope: Scalar },
    /// Points by degree, `table[0]` is degree zero; undefined past the end.
    /// Each degree is sorted; build with [`GradedSemigroup::table`].
    Table(Vec<Vec<Vec<i64>>>),
    /// Lattice points of the section polytopes `P_{dL}` cut out by
    /// `<x, u_i> >= -d l_i`.
    Sections { normals: Vec<Vec<i64>>, l: Vec<Scalar> },
}

impl GradedSemigroup {
    pub fn table(mut t: Vec<Vec<Vec<i64>>>) -> GradedSemigroup {
        for d in &mut t {
            d.sort();
            d.dedup();
        }
        GradedSemigroup::Table(t)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GradedSemigroup::Numerical(g) if g.is_empty() || g.contains(&0) => {
                Err(Error::Invalid("numerical semigroup needs positive generators".into()))
            }
            GradedSemigroup::Cone { u, v } => {
                if u[1] <= 0 || v[1] <= 0 {
                    return Err(Error::Invalid("cone rays must have positive degree".into()));
                }
                if u[0] * v[1] - u[1] * v[0] == 0 {
                    return Err(Error::Invalid("cone is not two-dimensional".into()));
                }
                Ok(())
            }
            GradedSemigroup::IrrationalCone { slope } if slope.is_rational() || !slope.is_positive() => {
                Err(Error::Invalid("slope must be positive and irrational".into()))
            }
            GradedSemigroup::Table(t) if t.iter().any(|d| d.windows(2).any(|w| w[0] >= w[1])) => {
                Err(Error::Invalid("table degrees must be sorted".into()))
            }
            GradedSemigroup::Sections { normals, l } if normals.is_empty() || normals.len() != l.len() => {
                Err(Error::Invalid("section polytope needs one bound per normal".into()))
            }
            _ => Ok(()),
        }
    }

    /// Elements of the given degree, sorted.
    pub fn points(&self, degree: usize) -> Result<Vec<Vec<i64>>> {
        Ok(match self {
            GradedSemigroup::Numerical(g) => {
                if numerical_member(g, degree as u64) {
                    vec![vec![]]
                } else {
                    vec![]
                }
            }
            GradedSemigroup::Cone { u, v } => {
                let d = degree as i64;
                // x / d between u0 / u1 and v0 / v1
                let (a, b) = if u[0] * v[1] <= v[0] * u[1] { (u, v) } else { (v, u) };
                let lo = (d * a[0]).div_euclid(a[1]) + i64::from((d * a[0]).rem_euclid(a[1]) != 0);
                let hi = (d * b[0]).div_euclid(b[1]);
                (lo..=hi).map(|x| vec![x]).collect()
            }
            GradedSemigroup::IrrationalCone { slope } => {
                let hi = (slope * &Scalar::int(degree as i64))
                    .floor()
                    .to_i64()
                    .ok_or_else(|| Error::Invalid("degree too large".into()))?;
                (0..=hi).map(|x| vec![x]).collect()
            }
            GradedSemigroup::Table(t) => t
                .get(degree)
                .cloned()
                .ok_or_else(|| Error::BoundExceeded {
                    bound: t.len().saturating_sub(1) as u64,
                    state: format!("table has no degree {degree}"),
                })?,
            GradedSemigroup::Sections { normals, l } => {
                let d = Scalar::int(degree as i64);
                let mut pts =
                    SectionPolytope::from_parts(normals[0].len(), normals.clone(), l.iter().map(|x| x * &d).collect())
                        .lattice_points()?;
                pts.sort();
                pts
            }
        })
    }

    pub fn contains(&self, x: &[i64], degree: usize) -> Result<bool> {
        Ok(match self {
            GradedSemigroup::Numerical(g) => x.is_empty() && numerical_member(g, degree as u64),
            GradedSemigroup::Cone { u, v } => {
                let p = [x[0], degree as i64];
                let side = |a: &[i64; 2]| a[0] * p[1] - a[1] * p[0];
                let orient = (u[0] * v[1] - u[1] * v[0]).signum();
                side(u) * orient >= 0 && -side(v) * orient >= 0
            }
            GradedSemigroup::IrrationalCone { slope } => {
                x[0] >= 0 && Scalar::int(x[0]) <= slope * &Scalar::int(degree as i64)
            }
            GradedSemigroup::Table(t) => t
                .get(degree)
                .ok_or_else(|| Error::BoundExceeded {
                    bound: t.len().saturating_sub(1) as u64,
                    state: format!("table has no degree {degree}"),
                })?
                .binary_search_by(|p| p.as_slice().cmp(x))
                .is_ok(),
            GradedSemigroup::Sections { normals, l } => {
                let d = Scalar::int(degree as i64);
                normals
                    .iter()
                    .zip(l)
                    .all(|(u, li)| Scalar::int(dot_i64(x, u)) >= -(li * &d))
            }
        })
    }

    /// Largest degree with data, for tables.
    pub fn horizon(&self) -> Option<usize> {
        match self {
            GradedSemigroup::Table(t) => Some(t.len().saturating_sub(1)),
            _ => None,
        }
    }
}

fn numerical_member(g: &[u64], n: u64) -> bool {
    let mut reach = vec![false; n as usize + 1];
    reach[0] = true;
    for i in 1..=n as usize {
        reach[i] = g.iter().any(|&a| a as usize <= i && reach[i - a as usize]);
    }
    reach[n as usize]
}

/// Degree `e` of the `k`-th truncation is degree `k e` of the semigroup.
fn piece(alg: &GradedSemigroup, k: usize, e: usize) -> Result<Vec<Vec<i64>>> {
    alg.points(k * e)
}

/// Minimal generators `(degree, x)` of the `k`-th truncation up to degree
/// `bound`.
pub fn minimal_generators(alg: &GradedSemigroup, k: usize, bound: usize) -> Result<Vec<(usize, Vec<i64>)>> {
    alg.validate()?;
    if k == 0 {
        return Err(Error::Invalid("truncation index must be positive".into()));
    }
    let mut gens: Vec<(usize, Vec<i64>)> = Vec::new();
    for d in 1..=bound {
        let here = piece(alg, k, d)?;
        let mut found = Vec::new();
        for x in &here {
            // any decomposition can start with a generator
            let mut decomposable = false;
            for (e, g) in &gens {
                let z: Vec<i64> = x.iter().zip(g).map(|(a, b)| a - b).collect();
                if alg.contains(&z, k * (d - e))? {
                    decomposable = true;
                    break;
                }
            }
            if !decomposable {
                found.push((d, x.clone()));
            }
        }
        gens.extend(found);
    }
    Ok(gens)
}

/// True if the generators reproduce every element of the `k`-th truncation
/// up to degree `up_to`.
pub fn verify_generators(alg: &GradedSemigroup, k: usize, gens: &[(usize, Vec<i64>)], up_to: usize) -> Result<bool> {
    let zero = piece(alg, k, 0)?;
    let mut made: Vec<HashSet<Vec<i64>>> = vec![zero.into_iter().collect()];
    for d in 1..=up_to {
        let mut cur = HashSet::new();
        for (e, g) in gens {
            if *e == 0 || *e > d {
                continue;
            }
            for y in &made[d - e] {
                cur.insert(y.iter().zip(g).map(|(a, b)| a + b).collect::<Vec<i64>>());
            }
        }
        let full: HashSet<Vec<i64>> = piece(alg, k, d)?.into_iter().collect();
        if cur != full {
            return Ok(false);
        }
        made.push(cur);
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FgVerdict {
    /// Generators (degree appended as the last coordinate) of degree at
    /// most `bound`, re-verified up to `3 * bound`.
    Fg { generators: Vec<Vec<i64>>, bound: usize },
    /// New generators keep appearing; their degrees are reported.
    Unknown { degree_bound: usize, generator_degrees: Vec<usize> },
}

impl FgVerdict {
    pub fn is_fg(&self) -> bool {
        matches!(self, FgVerdict::Fg { .. })
    }
}

pub(crate) fn fg_verdict(alg: &GradedSemigroup, k: usize, degree_bound: usize) -> Result<FgVerdict> {
    let gens = minimal_generators(alg, k, degree_bound)?;
    let g = gens.iter().map(|x| x.0).max().unwrap_or(0);
    if 3 * g <= degree_bound && verify_generators(alg, k, &gens, 3 * g)? {
        return Ok(FgVerdict::Fg {
            generators: gens
                .into_iter()
                .map(|(d, mut x)| {
                    x.push(d as i64);
                    x
                })
                .collect(),
            bound: g,
        });
    }
    Ok(FgVerdict::Unknown {
        degree_bound,
        generator_degrees: gens.iter().map(|x| x.0).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncationReport {
    pub k: usize,
    pub full: FgVerdict,
    pub truncated: FgVerdict,
    /// `k g` lies in the truncation for every generator `g` of the full
    /// semigroup, so the full algebra is integral over the truncation.
    pub integral: bool,
}

impl TruncationReport {
    pub fn agree(&self) -> bool {
        self.full.is_fg() == self.truncated.is_fg()
    }
}

/// Finite generation of `R` and of `R_(k)` side by side. For tables the
/// truncation is searched up to `degree_bound / k`.
pub fn truncation_fg(alg: &GradedSemigroup, k: usize, degree_bound: usize) -> Result<TruncationReport> {
    let full = fg_verdict(alg, 1, degree_bound)?;
    let tb = if alg.horizon().is_some() { degree_bound / k.max(1) } else { degree_bound };
    let truncated = fg_verdict(alg, k, tb)?;
    let integral = match &full {
        FgVerdict::Fg { generators, .. } => {
            let mut ok = true;
            for g in generators {
                let (x, d) = g.split_at(g.len() - 1);
                let kx: Vec<i64> = x.iter().map(|a| a * k as i64).collect();
                let deg = d[0] as usize * k;
                if alg.horizon().is_some_and(|h| deg > h) {
                    continue;
                }
                ok &= alg.contains(&kx, deg)?;
            }
            ok
        }
        FgVerdict::Unknown { .. } => false,
    };
    Ok(TruncationReport {
        k,
        full,
        truncated,
        integral,
    })
}

/// Hilbert basis of the plane cone spanned by primitive `u`, `v`: the
/// irreducible elements among `u`, `v` and the lattice points of the
/// half-open parallelogram they span.
pub fn hilbert_basis_2d(u: [i64; 2], v: [i64; 2]) -> Vec<[i64; 2]> {
    let det = u[0] * v[1] - u[1] * v[0];
    assert!(det != 0, "degenerate cone");
    // x = a u + b v with a = (x0 v1 - x1 v0) / det, b = (u0 x1 - u1 x0) / det
    let coords = |x: [i64; 2]| (x[0] * v[1] - x[1] * v[0], u[0] * x[1] - u[1] * x[0]);
    let in_cone = |x: [i64; 2]| {
        let (a, b) = coords(x);
        a * det.signum() >= 0 && b * det.signum() >= 0
    };
    let xs = [0, u[0], v[0], u[0] + v[0]];
    let ys = [0, u[1], v[1], u[1] + v[1]];
    let mut cand = vec![u, v];
    for x in *xs.iter().min().unwrap()..=*xs.iter().max().unwrap() {
        for y in *ys.iter().min().unwrap()..=*ys.iter().max().unwrap() {
            let (a, b) = coords([x, y]);
            let (a, b) = (a * det.signum(), b * det.signum());
            if (x, y) != (0, 0) && a >= 0 && b >= 0 && a < det.abs() && b < det.abs() {
                cand.push([x, y]);
            }
        }
    }
    cand.sort();
    cand.dedup();
    let basis: Vec<[i64; 2]> = cand
        .iter()
        .copied()
        .filter(|&x| {
            !cand
                .iter()
                .any(|&y| y != x && in_cone([x[0] - y[0], x[1] - y[1]]) && [x[0] - y[0], x[1] - y[1]] != [0, 0])
        })
        .collect();
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numerical_three_five() {
        let alg = GradedSemigroup::Numerical(vec![3, 5]);
        let degs: Vec<usize> = minimal_generators(&alg, 1, 30).unwrap().iter().map(|g| g.0).collect();
        assert_eq!(degs, vec![3, 5]);
        let r = truncation_fg(&alg, 2, 30).unwrap();
        assert!(r.agree() && r.integral && r.full.is_fg());
        let degs: Vec<usize> = minimal_generators(&alg, 2, 30).unwrap().iter().map(|g| g.0).collect();
        assert_eq!(degs, vec![3, 4, 5]);
    }

    #[test]
    fn truncation_by_one_is_identity() {
        let alg = GradedSemigroup::Cone { u: [0, 1], v: [3, 2] };
        let r = truncation_fg(&alg, 1, 24).unwrap();
        assert_eq!(r.full, r.truncated);
    }

    #[test]
    fn cone_generators_match_hilbert_basis() {
        let (u, v) = ([-1, 2], [3, 1]);
        let alg = GradedSemigroup::Cone { u, v };
        let mut g: Vec<[i64; 2]> = minimal_generators(&alg, 1, 30)
            .unwrap()
            .into_iter()
            .map(|(d, x)| [x[0], d as i64])
            .collect();
        g.sort();
        assert_eq!(g, hilbert_basis_2d(u, v));
    }

    #[test]
    fn irrational_slope_is_unknown() {
        let alg = GradedSemigroup::IrrationalCone { slope: Scalar::sqrt(2) };
        match truncation_fg(&alg, 2, 30).unwrap().full {
            FgVerdict::Unknown { generator_degrees, .. } => assert!(*generator_degrees.last().unwrap() > 10),
            other => panic!("{other:?}"),
        }
    }
}
