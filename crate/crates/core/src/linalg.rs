//! Dense exact linear algebra over `Rat` or `Scalar`, plus a few integer
//! lattice helpers.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::arith::{Rat, Scalar};

/// Ordered field operations shared by `Rat` and `Scalar`.
pub trait Field: Clone + PartialEq + Ord + Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn signum(&self) -> i32;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
}

impl Field for Rat {
    fn zero() -> Self {
        Rat::zero()
    }
    fn one() -> Self {
        Rat::one()
    }
    fn from_i64(n: i64) -> Self {
        Rat::from_int(n)
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
    fn signum(&self) -> i32 {
        Rat::signum(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Field for Scalar {
    fn zero() -> Self {
        Scalar::zero()
    }
    fn one() -> Self {
        Scalar::one()
    }
    fn from_i64(n: i64) -> Self {
        Scalar::int(n)
    }
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn signum(&self) -> i32 {
        Scalar::signum(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
}

pub type Matrix<F> = Vec<Vec<F>>;

pub fn to_rat_matrix(rows: &[Vec<i64>]) -> Matrix<Rat> {
    rows.iter()
        .map(|r| r.iter().map(|&x| Rat::from_int(x)).collect())
        .collect()
}

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(m: &mut Matrix<F>) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return vec![];
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = F::one().div(&m[r][c]);
        for x in m[r].iter_mut() {
            *x = x.mul(&inv);
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = m[r][j].mul(&f);
                    m[i][j] = m[i][j].sub(&v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<F: Field>(m: &Matrix<F>) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

pub fn rank_i64(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    rank(&to_rat_matrix(rows))
}

/// Basis of the right kernel `{x : m x = 0}`; `cols` is needed when `m` has
/// no rows.
pub fn nullspace<F: Field>(m: &Matrix<F>, cols: usize) -> Vec<Vec<F>> {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(); cols];
            v[f] = F::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = a[r][f].neg();
            }
            v
        })
        .collect()
}

/// Some solution of `a x = b`, if one exists.
pub fn solve<F: Field>(a: &Matrix<F>, b: &[F]) -> Option<Vec<F>> {
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    let mut aug: Matrix<F> = a
        .iter()
        .zip(b)
        .map(|(row, x)| {
            let mut r = row.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![F::zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = aug[r][cols].clone();
    }
    Some(x)
}

pub fn inverse<F: Field>(a: &Matrix<F>) -> Option<Matrix<F>> {
    let n = a.len();
    let mut aug: Matrix<F> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { F::one() } else { F::zero() }));
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|r| r[j].clone()).collect())
        .collect()
}

/// Exact determinant of a square integer matrix (Bareiss).
pub fn det_i64(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::from(1);
    }
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = 1;
    let mut prev = BigInt::from(1);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    a[n - 1][n - 1].clone() * sign
}

pub fn dot_i64(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn gcd_vec(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// gcd of the maximal minors of the given vectors (rows). This is the index
/// of the lattice they span inside its saturation.
pub fn minor_gcd(vectors: &[Vec<i64>]) -> BigInt {
    let k = vectors.len();
    if k == 0 {
        return BigInt::from(1);
    }
    let n = vectors[0].len();
    let mut g = BigInt::zero();
    for cols in combinations(n, k) {
        let sub: Vec<Vec<i64>> = vectors
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect();
        g = g.gcd(&det_i64(&sub));
    }
    g
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r.min(usize::MAX as u128) as usize
}

/// Clear denominators of a rational vector and divide by the content, giving
/// the primitive integer vector on the same ray. Returns `None` for the zero
/// vector or on `i64` overflow.
pub fn primitive_from_rats(v: &[Rat]) -> Option<Vec<i64>> {
    let mut l = BigInt::from(1);
    for x in v {
        l = l.lcm(&x.denom());
    }
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| x.numer() * (&l / x.denom()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return None;
    }
    ints.iter().map(|x| (x / &g).to_i64()).collect()
}

pub fn primitive_i64(v: &[i64]) -> Vec<i64> {
    let g = gcd_vec(v);
    if g == 0 {
        return v.to_vec();
    }
    v.iter().map(|x| x / g.abs()).collect()
}

/// Unimodular integer matrix `U` (rows) with `U u = e_0` for a primitive `u`.
/// The remaining rows of `U` give coordinates on the quotient `Z^n / Z u`.
pub fn unimodular_completion(u: &[i64]) -> Vec<Vec<i64>> {
    let n = u.len();
    // column operations on the row vector u, tracked on V with u V = e_0 * g
    let mut w: Vec<i64> = u.to_vec();
    let mut v: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    loop {
        let nz: Vec<usize> = (0..n).filter(|&i| w[i] != 0).collect();
        if nz.len() <= 1 {
            break;
        }
        let p = *nz.iter().min_by_key(|&&i| w[i].abs()).unwrap();
        for &i in &nz {
            if i != p {
                let q = w[i].div_euclid(w[p]);
                w[i] -= q * w[p];
                for row in v.iter_mut() {
                    row[i] -= q * row[p];
                }
            }
        }
    }
    let p = (0..n).find(|&i| w[i] != 0).expect("zero vector");
    if w[p] < 0 {
        w[p] = -w[p];
        for row in v.iter_mut() {
            row[p] = -row[p];
        }
    }
    assert_eq!(w[p], 1, "vector is not primitive");
    // move column p to the front
    for row in v.iter_mut() {
        row.swap(0, p);
    }
    // u^T V = e_0^T, hence V^T u = e_0
    transpose(&v)
}

pub fn is_zero_vec<F: Field>(v: &[F]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn abs_big(x: &BigInt) -> BigInt {
    x.abs()
}
