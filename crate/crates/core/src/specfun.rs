//! Scalar special functions: log-gamma, associated Laguerre polynomials
//! (plain and overflow-safe weighted forms), upper incomplete gamma for
//! integer and half-integer orders, modified Bessel `I₀`, `erfc`.
//!
//! Weighted Laguerre terms such as `x^b e^{-x} L_n^{(α)}(2x)` leave the
//! range of `f64` long before the product does, so they are carried as
//! [`LogSigned`] values and only collapsed to `f64` when summed.

use std::f64::consts::PI;
use std::ops::{Div, Mul, Neg};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A real number stored as `sign · exp(log_magnitude)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogSigned {
    sign: i8,
    log_magnitude: f64,
}

impl LogSigned {
    pub const ZERO: LogSigned = LogSigned {
        sign: 0,
        log_magnitude: f64::NEG_INFINITY,
    };
    pub const ONE: LogSigned = LogSigned {
        sign: 1,
        log_magnitude: 0.0,
    };

    pub fn new(sign: i8, log_magnitude: f64) -> Self {
        if sign == 0 || log_magnitude == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self {
                sign: sign.signum(),
                log_magnitude,
            }
        }
    }

    pub fn from_f64(v: f64) -> Self {
        if v == 0.0 {
            Self::ZERO
        } else {
            Self::new(if v > 0.0 { 1 } else { -1 }, v.abs().ln())
        }
    }

    /// `exp(log)` with positive sign.
    pub fn exp(log: f64) -> Self {
        Self::new(1, log)
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn log_magnitude(&self) -> f64 {
        self.log_magnitude
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn value(&self) -> f64 {
        match self.sign {
            0 => 0.0,
            s => f64::from(s) * self.log_magnitude.exp(),
        }
    }

    pub fn scale_log(self, log_factor: f64) -> Self {
        if self.sign == 0 {
            self
        } else {
            Self::new(self.sign, self.log_magnitude + log_factor)
        }
    }
}

impl Mul for LogSigned {
    type Output = LogSigned;
    fn mul(self, rhs: LogSigned) -> LogSigned {
        if self.sign == 0 || rhs.sign == 0 {
            LogSigned::ZERO
        } else {
            LogSigned::new(self.sign * rhs.sign, self.log_magnitude + rhs.log_magnitude)
        }
    }
}

impl Div for LogSigned {
    type Output = LogSigned;
    fn div(self, rhs: LogSigned) -> LogSigned {
        assert!(rhs.sign != 0, "division of LogSigned by zero");
        if self.sign == 0 {
            LogSigned::ZERO
        } else {
            LogSigned::new(self.sign * rhs.sign, self.log_magnitude - rhs.log_magnitude)
        }
    }
}

impl Neg for LogSigned {
    type Output = LogSigned;
    fn neg(self) -> LogSigned {
        LogSigned {
            sign: -self.sign,
            log_magnitude: self.log_magnitude,
        }
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

pub(crate) fn lgamma(x: f64) -> f64 {
    libm::lgamma_r(x).0
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(lgamma(x))
}

/// `L_n^{(α)}(x)` by upward three-term recurrence.
pub fn laguerre(n: usize, alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > -1.0) {
        return Err(Error::domain(format!("laguerre requires alpha > -1, got {alpha}")));
    }
    let mut prev = 1.0;
    if n == 0 {
        return Ok(prev);
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

const RESCALE_ABOVE: f64 = 1e200;

/// Successive values `L_0^{(α)}(z), L_1^{(α)}(z), …` as [`LogSigned`].
///
/// The recurrence runs on a rescaled pair, so values far outside the
/// `f64` range are produced without overflow.
#[derive(Debug, Clone)]
pub struct LaguerreSeq {
    alpha: f64,
    z: f64,
    n: usize,
    prev: f64,
    cur: f64,
    log_scale: f64,
}

impl LaguerreSeq {
    pub fn new(alpha: f64, z: f64) -> Self {
        Self {
            alpha,
            z,
            n: 0,
            prev: 0.0,
            cur: 1.0,
            log_scale: 0.0,
        }
    }
}

impl Iterator for LaguerreSeq {
    type Item = LogSigned;

    fn next(&mut self) -> Option<LogSigned> {
        let out = if self.cur == 0.0 {
            LogSigned::ZERO
        } else {
            LogSigned::new(
                if self.cur > 0.0 { 1 } else { -1 },
                self.cur.abs().ln() + self.log_scale,
            )
        };
        let k = self.n as f64;
        let next = if self.n == 0 {
            1.0 + self.alpha - self.z
        } else {
            ((2.0 * k + 1.0 + self.alpha - self.z) * self.cur - (k + self.alpha) * self.prev) / (k + 1.0)
        };
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        let big = self.cur.abs().max(self.prev.abs());
        if big > RESCALE_ABOVE {
            self.prev /= big;
            self.cur /= big;
            self.log_scale += big.ln();
        }
        Some(out)
    }
}

/// `ln w_b(x) = b ln x − x`; `-∞` at the origin for `b > 0`, `+∞` for `b < 0`.
pub(crate) fn ln_weight(b: f64, x: f64) -> f64 {
    if x == 0.0 {
        if b > 0.0 {
            f64::NEG_INFINITY
        } else if b == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        b * x.ln() - x
    }
}

/// `w_b(x) · L_n^{(α)}(2x)` with `w_b(x) = x^b e^{-x}`.
pub fn laguerre_weighted(n: usize, alpha: f64, weight_order: f64, x: f64) -> Result<LogSigned> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("laguerre_weighted requires x >= 0, got {x}")));
    }
    if !(alpha > -1.0) {
        return Err(Error::domain(format!(
            "laguerre_weighted requires alpha > -1, got {alpha}"
        )));
    }
    let lag = LaguerreSeq::new(alpha, 2.0 * x).nth(n).expect("sequence is infinite");
    let w = ln_weight(weight_order, x);
    if w == f64::NEG_INFINITY {
        return Ok(LogSigned::ZERO);
    }
    Ok(lag.scale_log(w))
}

/// Monomial coefficients `c_k` with `L_n^{(α)}(x) = Σ_k c_k x^k`.
pub fn laguerre_coefficients(n: usize, alpha: f64) -> Vec<f64> {
    let top = lgamma(n as f64 + alpha + 1.0);
    (0..=n)
        .map(|k| {
            let kf = k as f64;
            let ln = top - lgamma(alpha + kf + 1.0) - lgamma((n - k) as f64 + 1.0) - lgamma(kf + 1.0);
            let s = if k % 2 == 0 { 1.0 } else { -1.0 };
            s * ln.exp()
        })
        .collect()
}

fn half_integer_order(s: f64) -> Option<u64> {
    let twice = 2.0 * s;
    let r = twice.round();
    if r >= 1.0 && (twice - r).abs() <= 1e-12 * twice.max(1.0) {
        Some(r as u64)
    } else {
        None
    }
}

/// `Γ(s + k, x)` for `k = 0, …, count − 1`, where `s` is a positive integer
/// or half-integer.
pub fn upper_incomplete_gamma_seq(s: f64, x: f64, count: usize) -> Result<Vec<f64>> {
    let twice = half_integer_order(s).ok_or_else(|| {
        Error::domain(format!(
            "upper incomplete gamma is implemented for positive integer or half-integer s, got {s}"
        ))
    })?;
    if !(x >= 0.0) {
        return Err(Error::domain(format!(
            "upper incomplete gamma requires x >= 0, got {x}"
        )));
    }
    // Start from Γ(1, x) = e^{-x} or Γ(1/2, x) = √π erfc(√x).
    let (mut order, mut value) = if twice % 2 == 0 {
        (1.0, (-x).exp())
    } else {
        (0.5, PI.sqrt() * erfc(x.sqrt()))
    };
    let target = twice as f64 / 2.0;
    let ln_x = x.ln();
    let mut out = Vec::with_capacity(count);
    let step = |order: f64, value: f64| -> f64 {
        // Γ(s+1, x) = s Γ(s, x) + x^s e^{-x}
        let tail = if x == 0.0 { 0.0 } else { (order * ln_x - x).exp() };
        order * value + tail
    };
    while order < target - 0.25 {
        value = step(order, value);
        order += 1.0;
    }
    for _ in 0..count {
        out.push(value);
        value = step(order, value);
        order += 1.0;
    }
    Ok(out)
}

/// `Γ(s, x) = ∫ₓ^∞ y^{s−1} e^{−y} dy` for integer or half-integer `s > 0`.
pub fn upper_incomplete_gamma(s: f64, x: f64) -> Result<f64> {
    Ok(upper_incomplete_gamma_seq(s, x, 1)?[0])
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

const I0_SERIES_LIMIT: f64 = 20.0;

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < 1e-17 * sum {
            return sum;
        }
        k += 1.0;
    }
}

// e^{-x} I₀(x) ~ (2πx)^{-1/2} Σ_k [(2k−1)!!]² / (k! (8x)^k)
fn i0_asymptotic_scaled(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    while k < 60.0 {
        let odd = 2.0 * k - 1.0;
        term *= odd * odd / (8.0 * x * k);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
        k += 1.0;
    }
    sum / (2.0 * PI * x).sqrt()
}

/// Modified Bessel function `I₀(x)`; saturates to `+∞` past the `f64` range.
pub fn bessel_i0(x: f64) -> f64 {
    let x = x.abs();
    if x <= I0_SERIES_LIMIT {
        i0_series(x)
    } else {
        let scaled = i0_asymptotic_scaled(x);
        // Split the exponential to delay overflow near x ≈ 709.
        (0.5 * x).exp() * scaled * (0.5 * x).exp()
    }
}

/// `e^{-|x|} I₀(x)`, finite for all `x`.
pub fn bessel_i0_scaled(x: f64) -> f64 {
    let x = x.abs();
    if x <= I0_SERIES_LIMIT {
        i0_series(x) * (-x).exp()
    } else {
        i0_asymptotic_scaled(x)
    }
}
