//! Finiteness of minimal models for boundaries moving in a small cube
//! `Delta + sum t_i D_i`, `|t_i| <= eps`.

use crate::arith::Scalar;
use crate::birational::{singularity_class, SingClass};
use crate::divisor::{is_big, is_nef, is_pseudoeffective, TDivisor, ToricPair};
use crate::error::{Error, Result};
use crate::fan::Fan;

use super::{mmp_with_scaling, scaling_setup, Outcome};

#[derive(Clone, Debug)]
pub struct ModelEntry {
    pub fan: Fan,
    pub pair: ToricPair,
    /// Coordinates `t` of the boundary where the model was found.
    pub witness: Vec<Scalar>,
}

#[derive(Clone, Debug, Default)]
pub struct ModelSet {
    pub models: Vec<ModelEntry>,
}

impl ModelSet {
    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// Insert unless an isomorphic fan is already present.
    pub fn insert(&mut self, e: ModelEntry) -> bool {
        if self.models.iter().any(|m| m.fan.is_isomorphic(&e.fan)) {
            return false;
        }
        self.models.push(e);
        true
    }

    pub fn contains_fan(&self, f: &Fan) -> bool {
        self.models.iter().any(|m| m.fan.is_isomorphic(f))
    }

    /// Same models up to isomorphism.
    pub fn same_models(&self, other: &ModelSet) -> bool {
        self.models.iter().all(|m| other.contains_fan(&m.fan)) && other.models.iter().all(|m| self.contains_fan(&m.fan))
    }
}

/// The pair `Delta + sum t_i D_i`, or `None` if a coefficient leaves `[0,1)`.
fn perturbed(p: &ToricPair, dirs: &[TDivisor], t: &[Scalar]) -> Option<ToricPair> {
    let mut b = p.boundary.clone();
    for (d, ti) in dirs.iter().zip(t) {
        b = &b + &d.scale(ti);
    }
    if b.coeffs().iter().any(|c| c.is_negative() || *c >= Scalar::one()) {
        return None;
    }
    Some(ToricPair::raw(p.fan.clone(), b, p.ghosts.clone()))
}

/// Minimal model of the perturbed pair by MMP with scaling.
pub fn model_at_point(p: &ToricPair, dirs: &[TDivisor], t: &[Scalar]) -> Result<ModelEntry> {
    let q = perturbed(p, dirs, t).ok_or(Error::NotKltInCube)?;
    let (h, t0) = scaling_setup(&q)?;
    let trace = mmp_with_scaling(&q, &h, &t0)?;
    if trace.outcome != Outcome::MinimalModel {
        return Err(Error::Invariant(format!("perturbed pair ended with {}", trace.outcome)));
    }
    let pair = trace.last.pair.clone();
    if !is_nef(&pair.fan, &pair.log_canonical())? {
        return Err(Error::Invariant("model is not nef at its witness".into()));
    }
    Ok(ModelEntry {
        fan: pair.fan.clone(),
        pair,
        witness: t.to_vec(),
    })
}

fn corners(r: usize, eps: &Scalar) -> Vec<Vec<Scalar>> {
    (0..1usize << r)
        .map(|mask| {
            (0..r)
                .map(|i| if mask >> i & 1 == 1 { eps.clone() } else { -eps.clone() })
                .collect()
        })
        .collect()
}

/// Recursion over the faces of the cube: the model at the center, then the
/// `2r` facets, each an `(r-1)`-cube with the same `eps` around its center.
fn explore(p: &ToricPair, dirs: &[TDivisor], fixed: &mut Vec<Option<Scalar>>, eps: &Scalar, out: &mut ModelSet) -> Result<()> {
    let t: Vec<Scalar> = fixed.iter().map(|x| x.clone().unwrap_or_else(Scalar::zero)).collect();
    out.insert(model_at_point(p, dirs, &t)?);
    for i in 0..fixed.len() {
        if fixed[i].is_some() {
            continue;
        }
        for sign in [-1i64, 1] {
            fixed[i] = Some(eps.clone() * Scalar::int(sign));
            explore(p, dirs, fixed, eps, out)?;
        }
        fixed[i] = None;
    }
    Ok(())
}

/// Models of `Delta + sum t_i D_i` for `|t_i| <= eps`, deduplicated up to
/// lattice isomorphism.
pub fn finiteness_explorer(p: &ToricPair, dirs: &[TDivisor], eps: &Scalar) -> Result<ModelSet> {
    if !eps.is_positive() && !dirs.is_empty() {
        return Err(Error::Invalid("eps must be positive".into()));
    }
    for c in corners(dirs.len(), eps) {
        let q = perturbed(p, dirs, &c).ok_or(Error::NotKltInCube)?;
        if singularity_class(&q.fan, &q.boundary)? < SingClass::Klt {
            return Err(Error::NotKltInCube);
        }
        if !is_big(&q.fan, &q.delta())? {
            return Err(Error::NotBigInCube);
        }
        if !is_pseudoeffective(&q.fan, &q.log_canonical())? {
            return Err(Error::NotPseudoEffective);
        }
    }
    let mut out = ModelSet::default();
    explore(p, dirs, &mut vec![None; dirs.len()], eps, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisor::Ghost;
    use crate::fan::named::*;

    fn f1_pair() -> ToricPair {
        let boundary = TDivisor::new(vec![Scalar::zero(), Scalar::frac(1, 2), Scalar::zero(), Scalar::zero()]);
        let ghost = Ghost {
            class: TDivisor::from_ints(&[0, 0, 0, 8]),
            weight: Scalar::frac(1, 2),
        };
        ToricPair::new(hirzebruch(1), boundary, vec![ghost]).unwrap()
    }

    #[test]
    fn zero_directions_single_model() {
        let s = finiteness_explorer(&f1_pair(), &[], &Scalar::frac(1, 10)).unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn leaving_klt_is_rejected() {
        let dirs = vec![TDivisor::prime(4, 1)];
        assert_eq!(
            finiteness_explorer(&f1_pair(), &dirs, &Scalar::frac(3, 5)).unwrap_err(),
            Error::NotKltInCube
        );
    }
}
