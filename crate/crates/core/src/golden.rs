//! Exact arithmetic in Q(√5), written as p + qφ with φ² = 1 + φ.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub const PHI_F64: f64 = 1.618_033_988_749_895;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GoldenNumber {
    pub p: BigRational,
    pub q: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl GoldenNumber {
    pub fn new(p: BigRational, q: BigRational) -> Self {
        GoldenNumber { p, q }
    }

    pub fn from_ints(p: i64, q: i64) -> Self {
        GoldenNumber { p: rat(p), q: rat(q) }
    }

    /// (p_num/p_den) + (q_num/q_den)φ
    pub fn from_fracs(p_num: i64, p_den: i64, q_num: i64, q_den: i64) -> Self {
        GoldenNumber {
            p: BigRational::new(p_num.into(), p_den.into()),
            q: BigRational::new(q_num.into(), q_den.into()),
        }
    }

    pub fn from_rational(r: BigRational) -> Self {
        GoldenNumber { p: r, q: BigRational::zero() }
    }

    /// a + b√5, using √5 = 2φ − 1.
    pub fn from_sqrt5(a: BigRational, b: BigRational) -> Self {
        GoldenNumber { p: a - &b, q: b * rat(2) }
    }

    pub fn zero() -> Self {
        GoldenNumber::from_ints(0, 0)
    }

    pub fn one() -> Self {
        GoldenNumber::from_ints(1, 0)
    }

    pub fn phi() -> Self {
        GoldenNumber::from_ints(0, 1)
    }

    pub fn sqrt5() -> Self {
        GoldenNumber::from_ints(-1, 2)
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    /// Galois conjugate: φ ↦ 1 − φ.
    pub fn conjugate(&self) -> Self {
        GoldenNumber { p: &self.p + &self.q, q: -self.q.clone() }
    }

    /// Field norm x·x̄ = p² + pq − q², a rational.
    pub fn norm(&self) -> BigRational {
        &self.p * &self.p + &self.p * &self.q - &self.q * &self.q
    }

    pub fn recip(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conjugate();
        Some(GoldenNumber { p: c.p / &n, q: c.q / n })
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = GoldenNumber::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Exact sign of p + qφ.
    pub fn signum(&self) -> Ordering {
        let zero = BigRational::zero();
        if self.q.is_zero() {
            return self.p.cmp(&zero);
        }
        // p + qφ > 0  <=>  q√5 > −2p − q
        let a = self.q.clone();
        let b = -(&self.p * rat(2)) - &self.q;
        let five_a2 = &a * &a * rat(5);
        let b2 = &b * &b;
        if a.is_positive() {
            if b.is_negative() {
                Ordering::Greater
            } else {
                five_a2.cmp(&b2)
            }
        } else if !b.is_negative() {
            Ordering::Less
        } else {
            b2.cmp(&five_a2)
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.p.to_f64().unwrap_or(f64::NAN) + self.q.to_f64().unwrap_or(f64::NAN) * PHI_F64
    }
}

impl PartialOrd for GoldenNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GoldenNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl<'a> Add<&'a GoldenNumber> for &'a GoldenNumber {
    type Output = GoldenNumber;
    fn add(self, o: &GoldenNumber) -> GoldenNumber {
        GoldenNumber { p: &self.p + &o.p, q: &self.q + &o.q }
    }
}

impl<'a> Sub<&'a GoldenNumber> for &'a GoldenNumber {
    type Output = GoldenNumber;
    fn sub(self, o: &GoldenNumber) -> GoldenNumber {
        GoldenNumber { p: &self.p - &o.p, q: &self.q - &o.q }
    }
}

impl<'a> Mul<&'a GoldenNumber> for &'a GoldenNumber {
    type Output = GoldenNumber;
    fn mul(self, o: &GoldenNumber) -> GoldenNumber {
        // (a + bφ)(c + dφ) = ac + bd + (ad + bc + bd)φ
        let bd = &self.q * &o.q;
        GoldenNumber {
            p: &self.p * &o.p + &bd,
            q: &self.p * &o.q + &self.q * &o.p + bd,
        }
    }
}

impl<'a> Div<&'a GoldenNumber> for &'a GoldenNumber {
    type Output = GoldenNumber;
    fn div(self, o: &GoldenNumber) -> GoldenNumber {
        self * &o.recip().expect("division by zero in Q(sqrt 5)")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<GoldenNumber> for GoldenNumber {
            type Output = GoldenNumber;
            fn $m(self, o: GoldenNumber) -> GoldenNumber {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for GoldenNumber {
    type Output = GoldenNumber;
    fn neg(self) -> GoldenNumber {
        GoldenNumber { p: -self.p, q: -self.q }
    }
}

impl fmt::Display for GoldenNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one = BigRational::one();
        if self.q.is_zero() {
            return write!(f, "{}", self.p);
        }
        let q_abs = self.q.abs();
        let q_txt = if q_abs == one { String::new() } else { format!("{}", q_abs) };
        if self.p.is_zero() {
            let sign = if self.q.is_negative() { "-" } else { "" };
            return write!(f, "{sign}{q_txt}φ");
        }
        let sign = if self.q.is_negative() { '-' } else { '+' };
        write!(f, "{}{}{}φ", self.p, sign, q_txt)
    }
}

/// φⁿ = F(n−1) + F(n)φ.
pub fn phi_pow_fibonacci(n: u32) -> GoldenNumber {
    let (mut a, mut b) = (BigInt::one(), BigInt::zero()); // F(-1), F(0)
    for _ in 0..n {
        let c = &a + &b;
        a = b;
        b = c;
    }
    GoldenNumber::new(BigRational::from_integer(a), BigRational::from_integer(b))
}

/// Parse "p/q", an integer, a decimal or scientific notation into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let (a, b): (BigInt, BigInt) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
        return (!b.is_zero()).then(|| BigRational::new(a, b));
    }
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let neg = int.starts_with('-');
    let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let mut n: BigInt = digits.parse().ok()?;
    if neg {
        n = -n;
    }
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Some(if shift >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-shift) as usize))
    })
}
