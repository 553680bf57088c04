use serde::{Deserialize, Serialize};

use super::{check_x, Modes, Series, SeriesControl};
use crate::error::{Error, Result};
use crate::specfun::CompensatedSum;

/// Which index of the double series for `G` runs in the outer loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SummationOrder {
    /// Outer sum over the even-order Laguerre index, inner tail over the
    /// odd-order index `ν ≥ μ`.
    EvenOuter,
    /// Outer sum over the odd-order index, inner finite sum over the even
    /// index `ν ≤ μ`. Streams in `O(K)`; used for production values.
    OddOuter,
}

/// `½ sgn(x − y)` with `sgn(0) = 0`.
pub fn g_zero(x: f64, y: f64) -> f64 {
    if x > y {
        0.5
    } else if x < y {
        -0.5
    } else {
        0.0
    }
}

fn check_common(x: f64, y: f64, a: f64, tau: f64) -> Result<()> {
    check_x(x)?;
    check_x(y)?;
    if !(a > -1.0) {
        return Err(Error::domain(format!("a must exceed -1, got {a}")));
    }
    if !(tau > 0.0) {
        return Err(Error::domain(format!(
            "g_tau needs tau > 0 (got {tau}); use g_zero at tau = 0"
        )));
    }
    Ok(())
}

/// The antisymmetric function `G⁽τ⁾(x, y)` for `τ > 0`.
pub fn g_tau(x: f64, y: f64, a: f64, tau: f64, ctrl: &SeriesControl) -> Result<f64> {
    g_tau_ordered(x, y, a, tau, ctrl, SummationOrder::OddOuter)
}

pub fn g_tau_ordered(x: f64, y: f64, a: f64, tau: f64, ctrl: &SeriesControl, order: SummationOrder) -> Result<f64> {
    check_common(x, y, a, tau)?;
    match order {
        SummationOrder::OddOuter => g_series(x, y, a, tau, ctrl, 0, 0),
        SummationOrder::EvenOuter => g_even_outer(x, y, a, tau, ctrl),
    }
}

/// `2 Σ_{ν ≥ odd_start} [P_ν(x) Xo_ν(y) − Xo_ν(x) P_ν(y)]` where
/// `P_ν = Σ_{μ = even_start}^{ν} Xe_μ`.
///
/// With both starts at zero this is `G`; restricted starts give the pieces
/// of `G` that survive in the kernel `B`.
pub(crate) fn g_series(
    x: f64,
    y: f64,
    a: f64,
    tau: f64,
    ctrl: &SeriesControl,
    even_start: usize,
    odd_start: usize,
) -> Result<f64> {
    let mut px = CompensatedSum::new();
    let mut py = CompensatedSum::new();
    let mut series = Series::new(ctrl, tau);
    for (nu, ((ex, ox), (ey, oy))) in Modes::new(x, a, tau).zip(Modes::new(y, a, tau)).enumerate() {
        if nu >= even_start {
            px.add(ex);
            py.add(ey);
        }
        if nu < odd_start {
            continue;
        }
        let term = px.value() * oy - ox * py.value();
        if series.push(term)? {
            break;
        }
    }
    Ok(2.0 * series.value())
}

fn g_even_outer(x: f64, y: f64, a: f64, tau: f64, ctrl: &SeriesControl) -> Result<f64> {
    let mut mx = Modes::new(x, a, tau);
    let mut my = Modes::new(y, a, tau);
    let mut cache: Vec<((f64, f64), (f64, f64))> = Vec::new();
    let mut at = |k: usize| -> ((f64, f64), (f64, f64)) {
        while cache.len() <= k {
            let vx = mx.next().expect("modes are infinite");
            let vy = my.next().expect("modes are infinite");
            cache.push((vx, vy));
        }
        cache[k]
    };
    let mut outer = Series::new(ctrl, tau);
    let mut mu = 0;
    loop {
        let ((ex, _), (ey, _)) = at(mu);
        let mut inner = Series::new(ctrl, tau);
        let mut nu = mu;
        loop {
            let ((_, ox), (_, oy)) = at(nu);
            if inner.push(ex * oy - ox * ey)? {
                break;
            }
            nu += 1;
        }
        if outer.push(inner.value())? {
            break;
        }
        mu += 1;
    }
    Ok(2.0 * outer.value())
}

/// `ω⁽τ⁾(x)`; exactly `½` at `τ = 0`.
pub fn omega_tau(x: f64, a: f64, tau: f64, ctrl: &SeriesControl) -> Result<f64> {
    check_x(x)?;
    if !(a > -1.0) {
        return Err(Error::domain(format!("a must exceed -1, got {a}")));
    }
    super::check_tau(tau)?;
    if tau == 0.0 {
        return Ok(0.5);
    }
    let mut series = Series::new(ctrl, tau);
    for (e, _) in Modes::new(x, a, tau) {
        if series.push(e)? {
            break;
        }
    }
    Ok(series.value())
}
