//! Exact scalars: rationals with a machine-word fast path, and elements of a
//! real quadratic field `Q(sqrt s)` for a single square-free `s`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
///
/// Values whose reduced numerator and denominator fit in an `i64` are kept
/// inline; anything larger is promoted to a `BigRational`. The representation
/// is canonical: a value that fits is always stored as `Small`.
#[derive(Clone)]
pub enum Rat {
    Small(i64, i64),
    Big(BigRational),
}

fn gcd_i128(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rat {
    pub fn zero() -> Rat {
        Rat::Small(0, 1)
    }

    pub fn one() -> Rat {
        Rat::Small(1, 1)
    }

    pub fn from_int(n: i64) -> Rat {
        Rat::Small(n, 1)
    }

    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Rat {
        let (mut n, mut d) = (num, den);
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = gcd_i128(n, d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        if n == 0 {
            return Rat::Small(0, 1);
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(a), Ok(b)) => Rat::Small(a, b),
            _ => Rat::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d))),
        }
    }

    pub fn from_big(r: BigRational) -> Rat {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(a), Some(b)) => Rat::Small(a, b),
            _ => Rat::Big(r),
        }
    }

    pub fn from_bigint(n: BigInt) -> Rat {
        Rat::from_big(BigRational::from_integer(n))
    }

    pub fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(a, b) => BigRational::new_raw(BigInt::from(*a), BigInt::from(*b)),
            Rat::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match self {
            Rat::Small(a, _) => BigInt::from(*a),
            Rat::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match self {
            Rat::Small(_, b) => BigInt::from(*b),
            Rat::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Rat::Small(0, _))
    }

    pub fn is_integer(&self) -> bool {
        match self {
            Rat::Small(_, b) => *b == 1,
            Rat::Big(r) => r.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match self {
            Rat::Small(a, _) => a.signum() as i32,
            Rat::Big(r) => {
                if r.is_positive() {
                    1
                } else if r.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn abs(&self) -> Rat {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn floor(&self) -> BigInt {
        match self {
            Rat::Small(a, b) => BigInt::from(Integer::div_floor(a, b)),
            Rat::Big(r) => r.floor().to_integer(),
        }
    }

    pub fn ceil(&self) -> BigInt {
        match self {
            Rat::Small(a, b) => BigInt::from(-Integer::div_floor(&-a, b)),
            Rat::Big(r) => r.ceil().to_integer(),
        }
    }

    /// Integer value, if this is an integer that fits in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Rat::Small(a, 1) => Some(*a),
            Rat::Small(..) => None,
            Rat::Big(r) if r.is_integer() => r.numer().to_i64(),
            Rat::Big(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Rat::Small(a, b) => *a as f64 / *b as f64,
            Rat::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    pub fn recip(&self) -> Rat {
        match self {
            Rat::Small(0, _) => panic!("division by zero"),
            Rat::Small(a, b) => Rat::from_i128(*b as i128, *a as i128),
            Rat::Big(r) => Rat::from_big(r.recip()),
        }
    }

    pub fn pow(&self, e: u32) -> Rat {
        let mut out = Rat::one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }
}

impl Default for Rat {
    fn default() -> Self {
        Rat::zero()
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::from_int(n)
    }
}

impl From<i32> for Rat {
    fn from(n: i32) -> Rat {
        Rat::from_int(n as i64)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Rat {
        Rat::from_bigint(n)
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Rat) -> bool {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => a == c && b == d,
            (Rat::Big(x), Rat::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Rat::Small(a, b) => {
                0u8.hash(state);
                a.hash(state);
                b.hash(state);
            }
            Rat::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(a, 1) => write!(f, "{a}"),
            Rat::Small(a, b) => write!(f, "{a}/{b}"),
            Rat::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Rat::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rat> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational number: {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::from_big(BigRational::new(n, d)))
        } else {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Rat::from_bigint(n))
        }
    }
}

macro_rules! rat_binop {
    ($trait:ident, $method:ident, $small:expr, $big:expr) => {
        impl<'a> $trait<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                match (self, rhs) {
                    (Rat::Small(a, b), Rat::Small(c, d)) => {
                        let f: fn(i128, i128, i128, i128) -> (i128, i128) = $small;
                        let (n, m) = f(*a as i128, *b as i128, *c as i128, *d as i128);
                        Rat::from_i128(n, m)
                    }
                    _ => {
                        let f: fn(BigRational, BigRational) -> BigRational = $big;
                        Rat::from_big(f(self.to_big(), rhs.to_big()))
                    }
                }
            }
        }
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                (&self).$method(rhs)
            }
        }
    };
}

rat_binop!(Add, add, |a, b, c, d| (a * d + c * b, b * d), |x, y| x + y);
rat_binop!(Sub, sub, |a, b, c, d| (a * d - c * b, b * d), |x, y| x - y);
rat_binop!(Mul, mul, |a, b, c, d| (a * c, b * d), |x, y| x * y);
rat_binop!(
    Div,
    div,
    |a, b, c, d| {
        assert!(c != 0, "division by zero");
        (a * d, b * c)
    },
    |x, y| x / y
);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match self {
            Rat::Small(a, b) => Rat::from_i128(-(a as i128), b as i128),
            Rat::Big(r) => Rat::from_big(-r),
        }
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -self.clone()
    }
}

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        *self = &*self - rhs;
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

/// Returns true if `s` is square-free and greater than one.
pub fn is_squarefree_root(s: u32) -> bool {
    if s < 2 {
        return false;
    }
    let mut k = 2u32;
    while k * k <= s {
        if s.is_multiple_of(k * k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Element `a + b*sqrt(root)` of a real quadratic field, or a rational when
/// `b == 0` (then `root == 0`).
///
/// All scalars taking part in one computation must share the same root;
/// combining two genuinely irrational scalars over different roots panics.
/// File parsers reject such mixtures before they reach arithmetic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    a: Rat,
    b: Rat,
    root: u32,
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::rational(Rat::zero())
    }

    pub fn one() -> Scalar {
        Scalar::rational(Rat::one())
    }

    pub fn rational(a: Rat) -> Scalar {
        Scalar {
            a,
            b: Rat::zero(),
            root: 0,
        }
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::rational(Rat::from_int(n))
    }

    pub fn frac(n: i64, d: i64) -> Scalar {
        Scalar::rational(Rat::new(n, d))
    }

    /// `a + b*sqrt(root)`. Panics if `root` is not square-free and > 1 while
    /// `b != 0`.
    pub fn quadratic(a: Rat, b: Rat, root: u32) -> Scalar {
        if b.is_zero() {
            return Scalar::rational(a);
        }
        assert!(is_squarefree_root(root), "root {root} is not square-free");
        Scalar { a, b, root }
    }

    pub fn sqrt(root: u32) -> Scalar {
        Scalar::quadratic(Rat::zero(), Rat::one(), root)
    }

    pub fn rational_part(&self) -> &Rat {
        &self.a
    }

    pub fn irrational_part(&self) -> &Rat {
        &self.b
    }

    /// The square-free root, or 0 for rationals.
    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rat> {
        if self.is_rational() {
            Some(&self.a)
        } else {
            None
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.a.is_integer()
    }

    fn join_root(x: u32, y: u32) -> u32 {
        match (x, y) {
            (0, r) | (r, 0) => r,
            (r, q) if r == q => r,
            (r, q) => panic!("mixed quadratic roots sqrt({r}) and sqrt({q})"),
        }
    }

    pub fn signum(&self) -> i32 {
        let sa = self.a.signum();
        let sb = self.b.signum();
        if sb == 0 {
            return sa;
        }
        if sa >= 0 && sb > 0 {
            return 1;
        }
        if sa <= 0 && sb < 0 {
            return -1;
        }
        // opposite signs: compare a^2 with b^2 * root
        let a2 = &self.a * &self.a;
        let b2s = &(&self.b * &self.b) * &Rat::from_int(self.root as i64);
        match a2.cmp(&b2s) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => unreachable!("sqrt of a square-free root is irrational"),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.a.to_f64() + self.b.to_f64() * (self.root as f64).sqrt()
    }

    /// Largest integer not exceeding the value, computed exactly.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.a.floor();
        }
        // b*sqrt(s) = sign(b) * sqrt(b^2 s); floor(sqrt(r)) = isqrt(floor(r))
        let b2s = &(&self.b * &self.b) * &Rat::from_int(self.root as i64);
        let r = b2s.floor().sqrt();
        let mut n = if self.b.signum() > 0 {
            self.a.floor() + r
        } else {
            self.a.floor() - r
        };
        loop {
            let nn = Scalar::rational(Rat::from_bigint(n.clone()));
            if &nn > self {
                n -= 1;
                continue;
            }
            let n1 = Scalar::rational(Rat::from_bigint(&n + 1));
            if &n1 <= self {
                n += 1;
                continue;
            }
            return n;
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(-self.clone()).floor()
    }

    /// Fractional part `x - floor(x)`, in `[0, 1)`.
    pub fn fract(&self) -> Scalar {
        self - &Scalar::rational(Rat::from_bigint(self.floor()))
    }

    pub fn recip(&self) -> Scalar {
        assert!(!self.is_zero(), "division by zero");
        if self.is_rational() {
            return Scalar::rational(self.a.recip());
        }
        // (a - b sqrt s) / (a^2 - b^2 s)
        let norm = &(&self.a * &self.a) - &(&(&self.b * &self.b) * &Rat::from_int(self.root as i64));
        Scalar::quadratic(&self.a / &norm, -(&self.b / &norm), self.root)
    }

    pub fn min(self, other: Scalar) -> Scalar {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Scalar) -> Scalar {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Parse `p/q`, `p/q + r/t*sqrt(s)`, `r/t*sqrt(s)`, `-sqrt(s)` and similar.
    pub fn parse(text: &str) -> Result<Scalar> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("not a scalar: {text:?}"));
        if t.is_empty() {
            return Err(bad());
        }
        let Some(pos) = t.find("sqrt") else {
            return Ok(Scalar::rational(t.parse()?));
        };
        // split the rational part from the irrational term at the last sign
        // that precedes the coefficient of sqrt
        let head = &t[..pos];
        let tail = &t[pos + 4..];
        let root_str = tail.trim_start_matches('(').trim_end_matches(')');
        let root: u32 = root_str.parse().map_err(|_| bad())?;
        if !is_squarefree_root(root) {
            return Err(Error::Parse(format!("sqrt({root}) is not a square-free root")));
        }
        let head = head.strip_suffix('*').unwrap_or(head);
        let split = head
            .char_indices()
            .filter(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i)
            .next_back();
        let (rat_part, coeff) = match split {
            Some(i) => (&head[..i], &head[i..]),
            None => ("", head),
        };
        let a: Rat = if rat_part.is_empty() {
            Rat::zero()
        } else {
            rat_part.parse()?
        };
        let b: Rat = match coeff {
            "" | "+" => Rat::one(),
            "-" => -Rat::one(),
            c => c.trim_start_matches('+').parse()?,
        };
        Ok(Scalar::quadratic(a, b, root))
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<Rat> for Scalar {
    fn from(r: Rat) -> Scalar {
        Scalar::rational(r)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Scalar {
        Scalar::int(n)
    }
}

impl Ord for Scalar {
    fn cmp(&self, other: &Scalar) -> Ordering {
        if self.is_rational() && other.is_rational() {
            return self.a.cmp(&other.a);
        }
        (self - other).signum().cmp(&0)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Scalar) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.a);
        }
        if !self.a.is_zero() {
            write!(f, "{}", self.a)?;
            if self.b.signum() > 0 {
                write!(f, "+")?;
            }
        }
        if self.b == Rat::one() {
            write!(f, "sqrt({})", self.root)
        } else if self.b == -Rat::one() {
            write!(f, "-sqrt({})", self.root)
        } else {
            write!(f, "{}*sqrt({})", self.b, self.root)
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &'a Scalar) -> Scalar {
        if self.is_rational() && rhs.is_rational() {
            return Scalar::rational(&self.a + &rhs.a);
        }
        let root = Scalar::join_root(self.root, rhs.root);
        Scalar::quadratic(&self.a + &rhs.a, &self.b + &rhs.b, root)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &'a Scalar) -> Scalar {
        if self.is_rational() && rhs.is_rational() {
            return Scalar::rational(&self.a - &rhs.a);
        }
        let root = Scalar::join_root(self.root, rhs.root);
        Scalar::quadratic(&self.a - &rhs.a, &self.b - &rhs.b, root)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &'a Scalar) -> Scalar {
        if self.is_rational() && rhs.is_rational() {
            return Scalar::rational(&self.a * &rhs.a);
        }
        if rhs.is_rational() {
            return Scalar::quadratic(&self.a * &rhs.a, &self.b * &rhs.a, self.root);
        }
        if self.is_rational() {
            return Scalar::quadratic(&self.a * &rhs.a, &self.a * &rhs.b, rhs.root);
        }
        let root = Scalar::join_root(self.root, rhs.root);
        let s = Rat::from_int(root as i64);
        let a = &(&self.a * &rhs.a) + &(&(&self.b * &rhs.b) * &s);
        let b = &(&self.a * &rhs.b) + &(&self.b * &rhs.a);
        Scalar::quadratic(a, b, root)
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, rhs: &'a Scalar) -> Scalar {
        if rhs.is_rational() {
            assert!(!rhs.a.is_zero(), "division by zero");
            return Scalar::quadratic(&self.a / &rhs.a, &self.b / &rhs.a, self.root);
        }
        self * &rhs.recip()
    }
}

macro_rules! scalar_owned_ops {
    ($trait:ident, $method:ident) => {
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &'a Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
    };
}

scalar_owned_ops!(Add, add);
scalar_owned_ops!(Sub, sub);
scalar_owned_ops!(Mul, mul);
scalar_owned_ops!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            a: -self.a,
            b: -self.b,
            root: self.root,
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -self.clone()
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |acc, x| acc + x)
    }
}

/// Partial quotients of the regular continued fraction of `x`, at most `n`
/// of them; stops early when `x` is rational and the expansion terminates.
pub fn continued_fraction(x: &Scalar, n: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut cur = x.clone();
    for _ in 0..n {
        let a = cur.floor();
        out.push(a.clone());
        let rest = &cur - &Scalar::rational(Rat::from_bigint(a));
        if rest.is_zero() {
            break;
        }
        cur = rest.recip();
    }
    out
}

/// Convergents `p_k / q_k` of a continued fraction.
pub fn convergents(quotients: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
    let mut out = Vec::with_capacity(quotients.len());
    for a in quotients {
        let p = a * &p0 + &p1;
        let q = a * &q0 + &q1;
        p1 = std::mem::replace(&mut p0, p.clone());
        q1 = std::mem::replace(&mut q0, q.clone());
        out.push((p, q));
    }
    out
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}
