//! Scalar layer: the deformation parameter `q`, q-numbers `[n]`, exact zero
//! tracking at roots of unity, and square roots of bracket products.
//!
//! All q values live on the unit circle, `q = exp(i * angle)`, so every
//! q-number is the real number `sin(n * angle) / sin(angle)`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Angle used for "generic q" when none is supplied.
pub const DEFAULT_GENERIC_ANGLE: f64 = 0.37;

/// Powers `1..=DEFAULT_GENERICITY_DEPTH` of a generic q must stay away from 1.
pub const DEFAULT_GENERICITY_DEPTH: u32 = 64;

const GENERICITY_GAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("root of unity order {0} is even; only odd orders are supported")]
    EvenOrderUnsupported(u32),
    #[error("root of unity order {0} is too small; odd orders m >= 3 are required")]
    OrderTooSmall(u32),
    #[error("q = exp({angle} i) is not generic: q^{power} = 1 within {GENERICITY_GAP:e}")]
    NotGeneric { angle: f64, power: u32 },
    #[error("q angle {0} is not finite")]
    NonFiniteAngle(f64),
}

/// Order `m` of a primitive root of unity; always odd and at least 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct UnityOrder(u32);

impl UnityOrder {
    pub fn new(m: u32) -> Result<Self, QError> {
        if m % 2 == 0 {
            Err(QError::EvenOrderUnsupported(m))
        } else if m < 3 {
            Err(QError::OrderTooSmall(m))
        } else {
            Ok(Self(m))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_i64(self) -> i64 {
        i64::from(self.0)
    }

    /// Whether `[n]` vanishes identically at this order.
    pub fn divides(self, n: i64) -> bool {
        n.rem_euclid(self.as_i64()) == 0
    }
}

impl TryFrom<u32> for UnityOrder {
    type Error = QError;
    fn try_from(m: u32) -> Result<Self, QError> {
        Self::new(m)
    }
}

impl From<UnityOrder> for u32 {
    fn from(m: UnityOrder) -> u32 {
        m.0
    }
}

impl fmt::Display for UnityOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QKind {
    RootOfUnity(UnityOrder),
    Generic,
}

/// A point `q = exp(i * angle)` on the unit circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QPoint {
    angle: f64,
    value: Complex64,
    kind: QKind,
}

impl QPoint {
    /// The primitive root `exp(2 pi i / m)`.
    pub fn root_of_unity(m: UnityOrder) -> Self {
        let angle = 2.0 * PI / f64::from(m.get());
        Self {
            angle,
            value: Complex64::from_polar(1.0, angle),
            kind: QKind::RootOfUnity(m),
        }
    }

    pub fn generic(angle: f64) -> Result<Self, QError> {
        Self::generic_with_depth(angle, DEFAULT_GENERICITY_DEPTH)
    }

    /// Generic q, rejected when `q^n` comes within `1e-9` of 1 for some `n <= depth`.
    pub fn generic_with_depth(angle: f64, depth: u32) -> Result<Self, QError> {
        if !angle.is_finite() {
            return Err(QError::NonFiniteAngle(angle));
        }
        for power in 1..=depth {
            let turn = (f64::from(power) * angle / (2.0 * PI)).rem_euclid(1.0);
            let gap = 2.0 * (PI * turn.min(1.0 - turn)).sin();
            if gap < GENERICITY_GAP {
                return Err(QError::NotGeneric { angle, power });
            }
        }
        Ok(Self {
            angle,
            value: Complex64::from_polar(1.0, angle),
            kind: QKind::Generic,
        })
    }

    /// Generic q given by its value, kept bit for bit; the angle is `arg(value)`.
    pub fn generic_from_value(value: Complex64) -> Result<Self, QError> {
        let mut q = Self::generic(value.arg())?;
        q.value = value;
        Ok(q)
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn kind(&self) -> QKind {
        self.kind
    }

    pub fn order(&self) -> Option<UnityOrder> {
        match self.kind {
            QKind::RootOfUnity(m) => Some(m),
            QKind::Generic => None,
        }
    }

    /// `q^n`, reduced modulo the order at a root of unity.
    pub fn pow(&self, n: i64) -> Complex64 {
        match self.kind {
            QKind::RootOfUnity(m) => {
                let r = n.rem_euclid(m.as_i64());
                Complex64::from_polar(1.0, 2.0 * PI * r as f64 / f64::from(m.get()))
            }
            QKind::Generic => Complex64::from_polar(1.0, n as f64 * self.angle),
        }
    }

    /// Whether `[n]` is identically zero at this q.
    pub fn bracket_vanishes(&self, n: i64) -> bool {
        n == 0 || self.order().is_some_and(|m| m.divides(n))
    }
}

/// The q-number primitive root of order `m`.
pub fn q_from_order(m: UnityOrder) -> QPoint {
    QPoint::root_of_unity(m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketValue {
    pub n: i64,
    pub value: f64,
    pub exactly_zero: bool,
}

/// `[n] = (q^n - q^-n) / (q - q^-1)`, real on the unit circle.
pub fn q_bracket(n: i64, q: &QPoint) -> BracketValue {
    if q.bracket_vanishes(n) {
        return BracketValue {
            n,
            value: 0.0,
            exactly_zero: true,
        };
    }
    let value = match q.kind {
        QKind::RootOfUnity(m) => {
            let r = bracket_periodicity(n, m);
            (2.0 * PI * r as f64 / f64::from(m.get())).sin() / q.angle.sin()
        }
        QKind::Generic => {
            // n * angle carries a rounding error that sin amplifies for large n; fold it back in
            let x = n as f64 * q.angle;
            let dx = (n as f64).mul_add(q.angle, -x);
            (x.sin() + x.cos() * dx) / q.angle.sin()
        }
    };
    BracketValue {
        n,
        value,
        exactly_zero: false,
    }
}

/// Representative of `n` modulo `m` in `[0, m)`; `[n]` only depends on it.
pub fn bracket_periodicity(n: i64, m: UnityOrder) -> i64 {
    n.rem_euclid(m.as_i64())
}

/// `+1` when `i <= j`, `-1` otherwise.
pub fn epsilon(i: usize, j: usize) -> i64 {
    if i <= j {
        1
    } else {
        -1
    }
}

/// Product of the principal square roots of each factor.
///
/// Each factor is rooted separately. A single root of the full product picks
/// inconsistent branches once several factors turn negative near a root of
/// unity, and the resulting matrices violate the algebra relations.
pub fn sqrt_signed_product(factors: &[BracketValue]) -> Complex64 {
    if factors.iter().any(|f| f.exactly_zero) {
        return Complex64::new(0.0, 0.0);
    }
    factors
        .iter()
        .map(|f| Complex64::new(f.value, 0.0).sqrt())
        .product()
}

/// Leading behaviour of a quantity as `q -> root` along `q = root * exp(i d)`,
/// `d -> 0+`: the quantity is `coeff * d^(half_order / 2) + ...`, or
/// identically zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Leading {
    Zero,
    Term { half_order: i32, coeff: Complex64 },
}

/// Result of reading off a [`Leading`] at `d = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitValue {
    Finite(Complex64),
    Divergent { half_order: i32 },
}

impl Leading {
    pub fn one() -> Self {
        Leading::Term {
            half_order: 0,
            coeff: Complex64::new(1.0, 0.0),
        }
    }

    /// Leading term of `[n]`. Soft zeros (`n` a nonzero multiple of the order)
    /// vanish to first order with slope `n / sin(angle)`; `[0]` is identically zero.
    pub fn bracket(n: i64, q: &QPoint) -> Self {
        if n == 0 {
            return Leading::Zero;
        }
        if q.bracket_vanishes(n) {
            return Leading::Term {
                half_order: 2,
                coeff: Complex64::new(n as f64 / q.angle.sin(), 0.0),
            };
        }
        Leading::Term {
            half_order: 0,
            coeff: Complex64::new(q_bracket(n, q).value, 0.0),
        }
    }

    /// Principal square root of the leading coefficient, halving the order.
    pub fn sqrt(self) -> Self {
        match self {
            Leading::Zero => Leading::Zero,
            Leading::Term { half_order, coeff } => {
                assert!(half_order % 2 == 0, "square root of a half-order term");
                Leading::Term {
                    half_order: half_order / 2,
                    coeff: coeff.sqrt(),
                }
            }
        }
    }

    pub fn mul(self, other: Self) -> Self {
        match (self, other) {
            (
                Leading::Term {
                    half_order: a,
                    coeff: x,
                },
                Leading::Term {
                    half_order: b,
                    coeff: y,
                },
            ) => Leading::Term {
                half_order: a + b,
                coeff: x * y,
            },
            _ => Leading::Zero,
        }
    }

    /// Division by an identically-zero quantity is a programming error.
    pub fn div(self, other: Self) -> Self {
        match (self, other) {
            (_, Leading::Zero) => panic!("division by an identically zero quantity"),
            (Leading::Zero, _) => Leading::Zero,
            (
                Leading::Term {
                    half_order: a,
                    coeff: x,
                },
                Leading::Term {
                    half_order: b,
                    coeff: y,
                },
            ) => Leading::Term {
                half_order: a - b,
                coeff: x / y,
            },
        }
    }

    pub fn limit(self) -> LimitValue {
        match self {
            Leading::Zero => LimitValue::Finite(Complex64::new(0.0, 0.0)),
            Leading::Term { half_order, coeff } => match half_order.cmp(&0) {
                std::cmp::Ordering::Greater => LimitValue::Finite(Complex64::new(0.0, 0.0)),
                std::cmp::Ordering::Equal => LimitValue::Finite(coeff),
                std::cmp::Ordering::Less => LimitValue::Divergent { half_order },
            },
        }
    }
}
