use crate::{Error, Result};

/// `ln(e^a - e^b)` for `a > b`, without forming either exponential.
pub fn log_diff_exp(a: f64, b: f64) -> Result<f64> {
    if a.is_nan() || b.is_nan() || !(a > b) {
        return Err(Error::domain(format!("log_diff_exp requires a > b, got a={a}, b={b}")));
    }
    if b == f64::NEG_INFINITY {
        return Ok(a);
    }
    Ok(a + log1m_exp(b - a))
}

/// `ln(1 - e^x)` for `x < 0`.
///
/// Switches between `ln(-expm1(x))` and `ln1p(-exp(x))` at `-ln 2`, the
/// usual crossover that keeps full relative accuracy on both sides.
#[inline]
pub fn log1m_exp(x: f64) -> f64 {
    if x > -std::f64::consts::LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// `ln(e^a + e^b)`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}
