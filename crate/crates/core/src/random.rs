//! Seeded generators of complete simplicial projective fans and big klt
//! pairs.

use std::cmp::Ordering;

use rand::seq::SliceRandom;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::arith::Scalar;
use crate::curves::ample_divisor;
use crate::divisor::{is_free, Ghost, TDivisor, ToricPair};
use crate::error::{Error, Result};
use crate::fan::Fan;
use crate::linalg::{det_i64, gcd_vec};

fn half(v: &[i64]) -> u8 {
    if v[1] > 0 || (v[1] == 0 && v[0] > 0) {
        0
    } else {
        1
    }
}

/// Counterclockwise order of plane vectors starting from the positive x-axis.
pub fn angle_cmp(a: &[i64], b: &[i64]) -> Ordering {
    half(a).cmp(&half(b)).then_with(|| {
        let cross = a[0] * b[1] - a[1] * b[0];
        0.cmp(&cross)
    })
}

/// Complete fan with the given plane rays as consecutive cones, when every
/// gap is less than a half turn.
pub fn surface_from_rays(mut rays: Vec<Vec<i64>>) -> Option<Fan> {
    if rays.len() < 3 {
        return None;
    }
    rays.sort_by(|a, b| angle_cmp(a, b));
    let n = rays.len();
    for i in 0..n {
        let (a, b) = (&rays[i], &rays[(i + 1) % n]);
        if a[0] * b[1] - a[1] * b[0] <= 0 {
            return None;
        }
    }
    let cones = (0..n).map(|i| vec![i, (i + 1) % n]).collect();
    Fan::new(2, rays, cones).ok()
}

fn random_primitive(rng: &mut impl Rng, dim: usize, bound: i64) -> Vec<i64> {
    loop {
        let v: Vec<i64> = (0..dim).map(|_| rng.gen_range(-bound..=bound)).collect();
        if gcd_vec(&v) == 1 {
            return v;
        }
    }
}

pub fn random_surface(rng: &mut impl Rng, max_rays: usize) -> Fan {
    let max_rays = max_rays.max(3);
    loop {
        let k = rng.gen_range(3..=max_rays);
        let mut rays: Vec<Vec<i64>> = Vec::new();
        while rays.len() < k {
            let v = random_primitive(rng, 2, 3);
            if !rays.contains(&v) {
                rays.push(v);
            }
        }
        if let Some(f) = surface_from_rays(rays) {
            return f;
        }
    }
}

/// Face fan of the convex hull of `points` (rank 3), when the hull is
/// simplicial, every point is a vertex and the origin is interior.
pub fn face_fan(points: &[Vec<i64>]) -> Option<Fan> {
    let n = points.len();
    let sub = |a: &[i64], b: &[i64]| -> Vec<i64> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
    let mut facets = Vec::new();
    let mut is_vertex = vec![false; n];
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let e1 = sub(&points[j], &points[i]);
                let e2 = sub(&points[k], &points[i]);
                let mut pos = 0;
                let mut neg = 0;
                let mut zero = 0;
                for (l, q) in points.iter().enumerate() {
                    if l == i || l == j || l == k {
                        continue;
                    }
                    let d = det_i64(&[e1.clone(), e2.clone(), sub(q, &points[i])]);
                    match d.sign() {
                        num_bigint::Sign::Plus => pos += 1,
                        num_bigint::Sign::Minus => neg += 1,
                        num_bigint::Sign::NoSign => zero += 1,
                    }
                }
                if pos > 0 && neg > 0 {
                    continue;
                }
                if zero > 0 {
                    return None;
                }
                // origin strictly on the inner side
                let o = det_i64(&[e1.clone(), e2.clone(), points[i].iter().map(|x| -x).collect()]);
                let inner = if pos > 0 { num_bigint::Sign::Plus } else { num_bigint::Sign::Minus };
                if o.sign() != inner {
                    return None;
                }
                facets.push(vec![i, j, k]);
                is_vertex[i] = true;
                is_vertex[j] = true;
                is_vertex[k] = true;
            }
        }
    }
    if facets.is_empty() || is_vertex.iter().any(|v| !v) {
        return None;
    }
    let rays: Vec<Vec<i64>> = points.iter().map(|p| crate::linalg::primitive_i64(p)).collect();
    Fan::new(3, rays, facets).ok()
}

pub fn random_threefold(rng: &mut impl Rng, max_rays: usize) -> Fan {
    let max_rays = max_rays.clamp(5, 12);
    loop {
        let k = rng.gen_range(5..=max_rays);
        let mut rays: Vec<Vec<i64>> = Vec::new();
        let mut tries = 0;
        while rays.len() < k && tries < 200 {
            tries += 1;
            let v = random_primitive(rng, 3, 2);
            if !rays.contains(&v) {
                rays.push(v);
            }
        }
        let points: Vec<Vec<i64>> = rays
            .iter()
            .map(|u| {
                let h = rng.gen_range(1..=3);
                u.iter().map(|x| x * h).collect()
            })
            .collect();
        if let Some(f) = face_fan(&points) {
            return f;
        }
    }
}

pub fn random_fan(rng: &mut impl Rng, dim: usize, max_rays: usize) -> Result<Fan> {
    match dim {
        2 => Ok(random_surface(rng, max_rays)),
        3 => Ok(random_threefold(rng, max_rays)),
        d => Err(Error::UnsupportedDimension(d)),
    }
}

const COEFFS: [(i64, i64); 6] = [(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4)];

/// Smallest base-point free multiple of [`ample_divisor`]. Ample Cartier
/// divisors are free, and the Cartier index divides the lcm of the cone
/// multiplicities.
pub fn free_ample(fan: &Fan) -> Result<TDivisor> {
    let a = ample_divisor(fan)?;
    let l = cartier_bound(fan);
    for m in (1..=l).filter(|m| l % m == 0) {
        let d = a.scale(&Scalar::int(m));
        if is_free(fan, &d)? {
            return Ok(d);
        }
    }
    Err(Error::Invariant(format!("{l} times an ample class is not free")))
}

/// Lcm of the multiplicities of the maximal cones.
pub fn cartier_bound(fan: &Fan) -> i64 {
    fan.cones().iter().fold(1i64, |l, c| {
        let m = fan.multiplicity(c).to_i64().expect("multiplicity fits");
        num_integer::Integer::lcm(&l, &m)
    })
}

/// Big klt pair: random boundary below one plus an ample ghost.
pub fn random_klt_pair(rng: &mut impl Rng, fan: Fan) -> Result<ToricPair> {
    let n = fan.num_rays();
    let boundary: Vec<Scalar> = (0..n)
        .map(|_| {
            let (p, q) = if rng.gen_bool(0.5) { (0, 1) } else { *COEFFS.choose(rng).unwrap() };
            Scalar::frac(p, q)
        })
        .collect();
    let a = free_ample(&fan)?;
    let mult = rng.gen_range(1..=3);
    let (wp, wq) = *[(1, 3), (1, 2), (2, 3)].choose(rng).unwrap();
    let ghost = Ghost {
        class: a.scale(&Scalar::int(mult)),
        weight: Scalar::frac(wp, wq),
    };
    ToricPair::new(fan, TDivisor::new(boundary), vec![ghost])
}

/// Plt pair with boundary exactly one on ray `s` and random coefficients
/// below one elsewhere.
pub fn random_plt_pair(rng: &mut impl Rng, fan: Fan, s: usize) -> Result<ToricPair> {
    let mut p = random_klt_pair(rng, fan)?;
    let mut b = p.boundary.clone();
    b.set(s, Scalar::one());
    p = ToricPair::new(p.fan, b, p.ghosts)?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn surfaces_are_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let f = random_surface(&mut rng, 8);
            assert!(f.is_complete() && f.is_simplicial());
        }
    }

    #[test]
    fn threefolds_are_complete_and_projective() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let f = random_threefold(&mut rng, 10);
            assert!(f.is_complete() && f.is_simplicial());
            assert!(ample_divisor(&f).is_ok());
        }
    }

    #[test]
    fn octahedron() {
        let pts = vec![
            vec![1, 0, 0],
            vec![-1, 0, 0],
            vec![0, 1, 0],
            vec![0, -1, 0],
            vec![0, 0, 1],
            vec![0, 0, -1],
        ];
        let f = face_fan(&pts).unwrap();
        assert_eq!(f.cones().len(), 8);
        assert!(f.is_smooth());
    }

    #[test]
    fn seeded_output_repeats() {
        let a = random_surface(&mut ChaCha8Rng::seed_from_u64(11), 7);
        let b = random_surface(&mut ChaCha8Rng::seed_from_u64(11), 7);
        assert_eq!(a, b);
    }
}
