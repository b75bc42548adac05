//! The restricted algebra of a pl flip: images of `H^0(X, m L)` in
//! `H^0(S, m L|_S)` for `L = k (K + Delta)`.

use crate::arith::Scalar;
use crate::birational::classify_pl_flip;
use crate::divisor::{local_character, TDivisor, ToricPair};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::linalg::dot_i64;
use crate::polytope::SectionPolytope;

use super::graded::{fg_verdict, truncation_fg, FgVerdict, GradedSemigroup, TruncationReport};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedDegree {
    pub m: usize,
    /// Characters of `H^0(X, m L)` not vanishing on `S`.
    pub image: Vec<Vec<i64>>,
    /// `h^0(S, m L|_S)`.
    pub h0_s: usize,
}

#[derive(Clone, Debug)]
pub struct AdjointAlgebraModel {
    pub s: usize,
    /// `L = k (K + Delta)` is integral and Cartier along `S`.
    pub k: i64,
    pub l: TDivisor,
    pub degrees: Vec<RestrictedDegree>,
    /// Finite generation of the restricted algebra.
    pub verdict: FgVerdict,
    /// The full section algebra of `L` and its truncation by the flip index
    /// `p` with `p (K + Delta) ~ q S`.
    pub full: TruncationReport,
}

/// Least `k` with `k D` integral and Cartier on every cone containing `s`.
fn cartier_index_along(fan: &Fan, d: &TDivisor, s: usize) -> Result<i64> {
    if !d.is_rational() {
        return Err(Error::IrrationalCoefficient(d.to_string()));
    }
    'k: for k in 1..=10_000i64 {
        let kd = d.scale(&Scalar::int(k));
        if !kd.is_integral() {
            continue;
        }
        for cone in fan.cones().iter().filter(|c| c.contains(&s)) {
            match local_character(fan, cone, &kd) {
                Some(m) if m.iter().all(|x| x.is_integer()) => {}
                _ => continue 'k,
            }
        }
        return Ok(k);
    }
    Err(Error::NotQCartier)
}

fn h0_on_s(fan: &Fan, l: &TDivisor, s: usize) -> Result<usize> {
    let us = fan.ray(s).to_vec();
    let mut normals = vec![us.clone(), us.iter().map(|x| -x).collect()];
    let mut d = vec![l.coeff(s).clone(), -l.coeff(s).clone()];
    for r in fan.star_rays(s) {
        normals.push(fan.ray(r).to_vec());
        d.push(l.coeff(r).clone());
    }
    SectionPolytope::from_parts(fan.rank(), normals, d).count()
}

/// Restricted algebra of the pl flip of `(X, Delta)` along `S`, up to
/// degree `m_max`.
pub fn restricted_algebra(p: &ToricPair, s: usize, m_max: usize) -> Result<AdjointAlgebraModel> {
    let report = match classify_pl_flip(p, s) {
        Ok(r) if r.is_pl => r,
        Ok(_) | Err(Error::NotPlt) | Err(Error::NotFlipping) => return Err(Error::NotPlFlip),
        Err(e) => return Err(e),
    };
    let fan = &p.fan;
    let kd = p.log_canonical();
    let k = cartier_index_along(fan, &kd, s)?;
    let l = kd.scale(&Scalar::int(k));
    let us = fan.ray(s);
    let mut degrees = Vec::with_capacity(m_max + 1);
    let mut table = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let ml = l.scale(&Scalar::int(m as i64));
        let pts = SectionPolytope::new(fan, &ml).lattice_points()?;
        let target = -ml.coeff(s).clone();
        let image: Vec<Vec<i64>> = pts
            .iter()
            .filter(|x| Scalar::int(dot_i64(x, us)) == target)
            .cloned()
            .collect();
        let h0_s = h0_on_s(fan, &ml, s)?;
        if image.len() > h0_s {
            return Err(Error::Invariant(format!(
                "restriction in degree {m} has {} sections but h0 on S is {h0_s}",
                image.len()
            )));
        }
        table.push(image.clone());
        degrees.push(RestrictedDegree { m, image, h0_s });
    }
    let verdict = fg_verdict(&GradedSemigroup::table(table), 1, m_max)?;
    let index = report.p_q.map_or(1, |x| x.0).max(1) as usize;
    let sections = GradedSemigroup::Sections {
        normals: fan.rays().to_vec(),
        l: l.coeffs().to_vec(),
    };
    let full = truncation_fg(&sections, index, m_max)?;
    Ok(AdjointAlgebraModel {
        s,
        k,
        l,
        degrees,
        verdict,
        full,
    })
}
