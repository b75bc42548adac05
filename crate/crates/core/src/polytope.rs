//! Section polytopes `P_D = { m : <m, u_rho> >= -d_rho }` and their lattice
//! points.

use num_traits::ToPrimitive;

use crate::arith::{Rat, Scalar};
use crate::divisor::TDivisor;
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::linalg::dot_i64;
use crate::lp::{Lp, LpResult, Sense};

#[derive(Clone, Debug)]
pub struct SectionPolytope {
    rank: usize,
    normals: Vec<Vec<i64>>,
    d: Vec<Scalar>,
}

impl SectionPolytope {
    pub fn new(fan: &Fan, d: &TDivisor) -> SectionPolytope {
        SectionPolytope {
            rank: fan.rank(),
            normals: fan.rays().to_vec(),
            d: d.coeffs().to_vec(),
        }
    }

    pub fn from_parts(rank: usize, normals: Vec<Vec<i64>>, d: Vec<Scalar>) -> SectionPolytope {
        SectionPolytope { rank, normals, d }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn base_lp(&self) -> Lp<Scalar> {
        let mut lp = Lp::new_free(self.rank);
        for (u, d) in self.normals.iter().zip(&self.d) {
            lp.constraint(u.iter().map(|&x| Scalar::int(x)).collect(), Sense::Ge, -d.clone());
        }
        lp
    }

    pub fn is_empty(&self) -> bool {
        !self.base_lp().feasible()
    }

    /// Exact minimum of `<m, u> + d_u` over the real polytope, or `None`
    /// when empty.
    pub fn min_slack(&self, ray: usize) -> Option<Scalar> {
        let mut lp = self.base_lp();
        lp.minimize(self.normals[ray].iter().map(|&x| Scalar::int(x)).collect());
        match lp.solve() {
            LpResult::Optimal { value, .. } => Some(value + self.d[ray].clone()),
            LpResult::Infeasible => None,
            LpResult::Unbounded => panic!("section polytopes of complete fans are bounded"),
        }
    }

    /// True when the polytope has an interior point.
    pub fn is_full_dimensional(&self) -> bool {
        let n = self.rank;
        let mut lp = Lp::new_free(n + 1);
        for (u, d) in self.normals.iter().zip(&self.d) {
            let mut row: Vec<Scalar> = u.iter().map(|&x| Scalar::int(x)).collect();
            row.push(-Scalar::one());
            lp.constraint(row, Sense::Ge, -d.clone());
        }
        let mut cap = vec![Scalar::zero(); n + 1];
        cap[n] = Scalar::one();
        lp.constraint(cap.clone(), Sense::Le, Scalar::one());
        lp.maximize(cap);
        match lp.solve() {
            LpResult::Optimal { value, .. } => value.is_positive(),
            _ => false,
        }
    }

    /// Per-coordinate real bounds, `None` if empty.
    pub fn bounding_box(&self) -> Result<Option<Vec<(Scalar, Scalar)>>> {
        let mut out = Vec::with_capacity(self.rank);
        for k in 0..self.rank {
            let mut e = vec![Scalar::zero(); self.rank];
            e[k] = Scalar::one();
            let mut lp = self.base_lp();
            lp.minimize(e.clone());
            let lo = match lp.solve() {
                LpResult::Optimal { value, .. } => value,
                LpResult::Infeasible => return Ok(None),
                LpResult::Unbounded => return Err(Error::Invalid("section polytope is unbounded".into())),
            };
            let mut lp = self.base_lp();
            lp.maximize(e);
            let hi = match lp.solve() {
                LpResult::Optimal { value, .. } => value,
                LpResult::Infeasible => return Ok(None),
                LpResult::Unbounded => return Err(Error::Invalid("section polytope is unbounded".into())),
            };
            out.push((lo, hi));
        }
        Ok(Some(out))
    }

    /// Integer right-hand sides: lattice points satisfy `<m,u> >= -floor(d)`.
    fn int_rhs(&self) -> Vec<i64> {
        self.d
            .iter()
            .map(|d| -d.floor().to_i64().expect("coefficient fits in i64"))
            .collect()
    }

    /// All lattice points, in lexicographic order.
    pub fn lattice_points(&self) -> Result<Vec<Vec<i64>>> {
        let mut out = Vec::new();
        self.for_each_column(|prefix, lo, hi| {
            for x in lo..=hi {
                let mut v = prefix.to_vec();
                v.push(x);
                out.push(v);
            }
        })?;
        Ok(out)
    }

    /// Visit the lattice points column by column: `f(prefix, lo, hi)` stands
    /// for the points `prefix ++ [x]` with `lo <= x <= hi`.
    pub fn for_each_column(&self, mut f: impl FnMut(&[i64], i64, i64)) -> Result<()> {
        let Some(bx) = self.bounding_box()? else {
            return Ok(());
        };
        let ranges: Vec<(i64, i64)> = bx
            .iter()
            .map(|(lo, hi)| {
                (
                    lo.ceil().to_i64().expect("box fits"),
                    hi.floor().to_i64().expect("box fits"),
                )
            })
            .collect();
        let rhs = self.int_rhs();
        let mut cur = Vec::with_capacity(self.rank);
        self.enumerate(&ranges, &rhs, &mut cur, &mut f);
        Ok(())
    }

    fn enumerate(&self, ranges: &[(i64, i64)], rhs: &[i64], cur: &mut Vec<i64>, f: &mut dyn FnMut(&[i64], i64, i64)) {
        let k = cur.len();
        if k + 1 == self.rank {
            // exact interval for the last coordinate
            let (mut lo, mut hi) = ranges[k];
            for (u, &b) in self.normals.iter().zip(rhs) {
                let partial: i64 = (0..k).map(|i| u[i] * cur[i]).sum();
                let a = u[k];
                // a * x >= b - partial
                let need = b - partial;
                if a > 0 {
                    lo = lo.max(div_ceil(need, a));
                } else if a < 0 {
                    hi = hi.min(div_floor(need, a));
                } else if need > 0 {
                    return;
                }
            }
            if lo <= hi {
                f(cur, lo, hi);
            }
            return;
        }
        for x in ranges[k].0..=ranges[k].1 {
            cur.push(x);
            self.enumerate(ranges, rhs, cur, f);
            cur.pop();
        }
    }

    pub fn count(&self) -> Result<usize> {
        let mut n = 0usize;
        self.for_each_column(|_, lo, hi| n += (hi - lo + 1) as usize)?;
        Ok(n)
    }

    /// Minimum of `<m, u_rho> + floor(d_rho)` over lattice points, per ray;
    /// `None` when there are none.
    pub fn lattice_min_slacks(&self) -> Result<Option<Vec<i64>>> {
        let rhs = self.int_rhs();
        let mut best: Option<Vec<i64>> = None;
        let k = self.rank - 1;
        self.for_each_column(|prefix, lo, hi| {
            let b = best.get_or_insert_with(|| vec![i64::MAX; rhs.len()]);
            for (i, u) in self.normals.iter().enumerate() {
                let partial: i64 = (0..k).map(|j| u[j] * prefix[j]).sum();
                // linear in x: minimum at an endpoint
                let v = (partial + u[k] * lo).min(partial + u[k] * hi) - rhs[i];
                if v < b[i] {
                    b[i] = v;
                }
            }
        })?;
        Ok(best)
    }

    /// Brute-force membership of an integer point.
    pub fn contains_lattice_point(&self, m: &[i64]) -> bool {
        let rhs = self.int_rhs();
        self.normals.iter().zip(&rhs).all(|(u, &b)| dot_i64(u, m) >= b)
    }

    pub fn contains_rational_point(&self, m: &[Rat]) -> bool {
        self.normals.iter().zip(&self.d).all(|(u, d)| {
            let v: Rat = u.iter().zip(m).map(|(&a, x)| x * &Rat::from_int(a)).sum();
            Scalar::rational(v) >= -d.clone()
        })
    }
}

fn div_floor(a: i64, b: i64) -> i64 {
    num_integer::Integer::div_floor(&a, &b)
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -num_integer::Integer::div_floor(&-a, &b)
}
