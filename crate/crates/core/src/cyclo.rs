//! Points of the plane as cyclotomic integers a0 + a1ζ + a2ζ² + a3ζ³, ζ = e^{2πi/5}.
//!
//! ζ⁴ never appears: it is rewritten as −1 − ζ − ζ² − ζ³.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::golden::GoldenNumber;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CycloPoint(pub [BigInt; 4]);

impl CycloPoint {
    pub fn new(a0: i64, a1: i64, a2: i64, a3: i64) -> Self {
        CycloPoint([a0.into(), a1.into(), a2.into(), a3.into()])
    }

    pub fn zero() -> Self {
        CycloPoint::new(0, 0, 0, 0)
    }

    pub fn one() -> Self {
        CycloPoint::new(1, 0, 0, 0)
    }

    /// Reduce a coefficient vector over 1, ζ, …, ζ⁴.
    pub fn from_powers(c: [BigInt; 5]) -> Self {
        let [c0, c1, c2, c3, c4] = c;
        CycloPoint([c0 - &c4, c1 - &c4, c2 - &c4, c3 - c4])
    }

    pub fn mul_zeta(&self) -> Self {
        let [a0, a1, a2, a3] = &self.0;
        CycloPoint([-a3.clone(), a0 - a3, a1 - a3, a2 - a3])
    }

    pub fn mul_zeta_pow(&self, k: u32) -> Self {
        let mut z = self.clone();
        for _ in 0..(k % 5) {
            z = z.mul_zeta();
        }
        z
    }

    /// Multiply by φ = −(ζ² + ζ³).
    pub fn mul_phi(&self) -> Self {
        -(&self.mul_zeta_pow(2) + &self.mul_zeta_pow(3))
    }

    /// Divide by φ, using 1/φ = φ − 1.
    pub fn div_phi(&self) -> Self {
        &self.mul_phi() - self
    }

    /// The unit vector at angle 36°·d.
    pub fn unit(d: u8) -> Self {
        let d = d % 10;
        if d % 2 == 0 {
            CycloPoint::one().mul_zeta_pow((d / 2) as u32)
        } else {
            -CycloPoint::one().mul_zeta_pow(((d as u32 + 5) / 2) % 5)
        }
    }

    /// Rotate by 36°·r about the origin.
    pub fn rotate(&self, r: u8) -> Self {
        let r = r % 10;
        if r % 2 == 0 {
            self.mul_zeta_pow((r / 2) as u32)
        } else {
            -self.mul_zeta_pow(((r as u32 + 5) / 2) % 5)
        }
    }

    /// Direction index d with self = unit(d), if self is a unit edge vector.
    pub fn direction(&self) -> Option<u8> {
        let [a0, a1, a2, a3] = &self.0;
        let small = |x: &BigInt| x.to_i64().filter(|v| v.abs() <= 1);
        let (b0, b1, b2, b3) = (small(a0)?, small(a1)?, small(a2)?, small(a3)?);
        UNIT_TABLE.iter().find(|(v, _)| *v == [b0, b1, b2, b3]).map(|(_, d)| *d)
    }

    pub fn mul(&self, o: &CycloPoint) -> Self {
        let mut c: [BigInt; 5] = Default::default();
        for i in 0..4 {
            for j in 0..4 {
                let k = (i + j) % 5;
                c[k] += &self.0[i] * &o.0[j];
            }
        }
        CycloPoint::from_powers(c)
    }

    /// Complex conjugation, ζ ↦ ζ⁴.
    pub fn conj(&self) -> Self {
        let [a0, a1, a2, a3] = &self.0;
        CycloPoint([a0 - a1, -a1.clone(), a3 - a1, a2 - a1])
    }

    /// |z|² as an element of Z[φ].
    pub fn norm_sq(&self) -> GoldenNumber {
        let r = self.mul(&self.conj());
        let [r0, r1, r2, r3] = &r.0;
        debug_assert!(r1.is_zero() && r2 == r3, "z·z̄ must be real");
        let _ = (r1, r3);
        // r0 + r2(ζ² + ζ³) = r0 − r2φ
        GoldenNumber::new(BigRational::from_integer(r0.clone()), BigRational::from_integer(-r2.clone()))
    }

    pub fn from_golden_integer(p: i64, q: i64) -> Self {
        // p + qφ = p − q(ζ² + ζ³)
        CycloPoint::new(p, 0, -q, -q)
    }

    pub fn to_cartesian(&self) -> (f64, f64) {
        let mut x = 0.0;
        let mut y = 0.0;
        for (k, a) in self.0.iter().enumerate() {
            let a = a.to_f64().unwrap_or(f64::NAN);
            let t = 2.0 * std::f64::consts::PI * k as f64 / 5.0;
            x += a * t.cos();
            y += a * t.sin();
        }
        (x, y)
    }

    pub fn to_i64s(&self) -> [i64; 4] {
        let f = |x: &BigInt| x.to_i64().expect("coordinate fits in i64");
        [f(&self.0[0]), f(&self.0[1]), f(&self.0[2]), f(&self.0[3])]
    }
}

const UNIT_TABLE: [([i64; 4], u8); 10] = [
    ([1, 0, 0, 0], 0),
    ([0, 1, 0, 0], 2),
    ([0, 0, 1, 0], 4),
    ([0, 0, 0, 1], 6),
    ([-1, -1, -1, -1], 8),
    ([-1, 0, 0, 0], 5),
    ([0, -1, 0, 0], 7),
    ([0, 0, -1, 0], 9),
    ([0, 0, 0, -1], 1),
    ([1, 1, 1, 1], 3),
];

impl<'a> Add<&'a CycloPoint> for &'a CycloPoint {
    type Output = CycloPoint;
    fn add(self, o: &CycloPoint) -> CycloPoint {
        CycloPoint(std::array::from_fn(|i| &self.0[i] + &o.0[i]))
    }
}

impl<'a> Sub<&'a CycloPoint> for &'a CycloPoint {
    type Output = CycloPoint;
    fn sub(self, o: &CycloPoint) -> CycloPoint {
        CycloPoint(std::array::from_fn(|i| &self.0[i] - &o.0[i]))
    }
}

impl Neg for CycloPoint {
    type Output = CycloPoint;
    fn neg(self) -> CycloPoint {
        let [a0, a1, a2, a3] = self.0;
        CycloPoint([-a0, -a1, -a2, -a3])
    }
}

impl fmt::Display for CycloPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a0, a1, a2, a3] = &self.0;
        write!(f, "({a0},{a1},{a2},{a3})")
    }
}
