//! Truncated Puiseux expansions around a point of the unit circle.
//!
//! Quantities are expanded along `q = q0 * exp(i d)` in the variable
//! `s = d^(1/2)`, so that square roots of brackets vanishing to first order
//! in `d` stay power series. A [`Series`] stores `sum_k c_k s^(start + k)`
//! and is accurate up to, but excluding, `s^(start + len)`.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::qarith::QPoint;

/// Number of `s` coefficients carried by freshly built series.
pub const DEFAULT_LEN: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    start: i32,
    coeffs: Vec<Complex64>,
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

impl Series {
    pub fn new(start: i32, coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        Self { start, coeffs }
    }

    pub fn constant(c: Complex64, len: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
        coeffs[0] = c;
        Self::new(0, coeffs)
    }

    pub fn start(&self) -> i32 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// First exponent that is no longer known.
    pub fn precision(&self) -> i32 {
        self.start + self.coeffs.len() as i32
    }

    /// Coefficient of `s^k`; `None` beyond the known precision.
    pub fn coeff(&self, k: i32) -> Option<Complex64> {
        if k < self.start {
            Some(Complex64::new(0.0, 0.0))
        } else if k < self.precision() {
            Some(self.coeffs[(k - self.start) as usize])
        } else {
            None
        }
    }

    /// `[n]` at `q0 * exp(i d)`, i.e. `sin(n (a + d)) / sin(a + d)` with `q0 = exp(i a)`.
    ///
    /// When `[n]` vanishes at `q0` the constant term is set to an exact zero
    /// and the series starts at `s^2`. `n = 0` is rejected: it is identically zero.
    pub fn bracket(n: i64, q0: &QPoint, len: usize) -> Self {
        assert!(n != 0, "[0] vanishes identically and has no expansion");
        let terms = len.div_ceil(2) + 1;
        let a = q0.angle();
        let taylor = |mult: f64, base: f64, zero_const: bool| -> Vec<f64> {
            (0..terms)
                .map(|k| {
                    if k == 0 && zero_const {
                        0.0
                    } else {
                        mult.powi(k as i32) * (base + k as f64 * std::f64::consts::FRAC_PI_2).sin()
                            / factorial(k)
                    }
                })
                .collect()
        };
        let vanishes = q0.bracket_vanishes(n);
        let base = match q0.order() {
            Some(m) => {
                2.0 * std::f64::consts::PI * n.rem_euclid(m.as_i64()) as f64 / f64::from(m.get())
            }
            None => n as f64 * a,
        };
        let num = taylor(n as f64, base, vanishes);
        let den = taylor(1.0, a, false);
        // power-series division in d
        let mut quot = vec![0.0; terms];
        for k in 0..terms {
            let acc: f64 = (1..=k).map(|i| den[i] * quot[k - i]).sum();
            quot[k] = (num[k] - acc) / den[0];
        }
        let shift = usize::from(vanishes);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); len];
        for (k, c) in quot.iter().enumerate().skip(shift) {
            let idx = 2 * (k - shift);
            if idx < len {
                coeffs[idx] = Complex64::new(*c, 0.0);
            }
        }
        Self::new(2 * shift as i32, coeffs)
    }

    /// Multiplicative inverse; the leading coefficient must be structurally nonzero.
    pub fn inv(&self) -> Self {
        let a0 = self.coeffs[0];
        assert!(a0 != Complex64::new(0.0, 0.0), "inverse of a series with zero leading term");
        let n = self.coeffs.len();
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        b[0] = a0.inv();
        for k in 1..n {
            let acc: Complex64 = (1..=k).map(|i| self.coeffs[i] * b[k - i]).sum();
            b[k] = -acc / a0;
        }
        Self::new(-self.start, b)
    }

    /// Square root with the principal root of the leading coefficient.
    pub fn sqrt(&self) -> Self {
        assert!(self.start % 2 == 0, "square root of an odd-order series");
        let a0 = self.coeffs[0];
        assert!(a0 != Complex64::new(0.0, 0.0), "square root of a series with zero leading term");
        let n = self.coeffs.len();
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        b[0] = a0.sqrt();
        for k in 1..n {
            let acc: Complex64 = (1..k).map(|i| b[i] * b[k - i]).sum();
            b[k] = (self.coeffs[k] - acc) / (b[0] * 2.0);
        }
        Self::new(self.start / 2, b)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.start, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Value at `s = 0` when every negative power vanishes within `tol`
    /// (relative to the largest coefficient up to `s^0`, floored at 1).
    pub fn limit(&self, tol: f64) -> Result<Complex64, Divergence> {
        let scale = (self.start..=0.min(self.precision() - 1))
            .filter_map(|k| self.coeff(k))
            .map(|c| c.norm())
            .fold(1.0, f64::max);
        for k in self.start..0.min(self.precision()) {
            let c = self.coeff(k).expect("within precision");
            if c.norm() > tol * scale {
                return Err(Divergence {
                    order: k,
                    magnitude: c.norm(),
                });
            }
        }
        self.coeff(0).ok_or(Divergence {
            order: self.precision(),
            magnitude: f64::NAN,
        })
    }
}

/// A negative power of `s` with a coefficient above tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Divergence {
    pub order: i32,
    pub magnitude: f64,
}

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        let start = self.start.min(rhs.start);
        let end = self.precision().min(rhs.precision());
        let coeffs = (start..end.max(start + 1))
            .map(|k| self.coeff(k).unwrap_or_default() + rhs.coeff(k).unwrap_or_default())
            .collect();
        Series::new(start, coeffs)
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        self + &(-rhs)
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|k| (0..=k).map(|i| self.coeffs[i] * rhs.coeffs[k - i]).sum())
            .collect();
        Series::new(self.start + rhs.start, coeffs)
    }
}
