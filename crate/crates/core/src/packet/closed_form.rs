use super::PacketError;
use crate::special::{dawson, erfcx};
use core::f64::consts::{FRAC_PI_4, PI, SQRT_2};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

/// χ(t) for `φ(t) = Θ(t)·e^{−t/2σ}/√σ`, obtained by integrating the defining
/// kernel in closed form. With `x = √(|t|/2σ)`:
///
/// ```text
/// t > 0:  −(1−i)·√(2π)·e^{−x²}/σ − 2(1+i)/√(tσ) + 2√2·(1+i)·D(x)/σ
/// t < 0:  (1−i)·[2/√(|t|σ) − √(2π)·erfcx(x)/σ]
/// ```
///
/// where `D` is the Dawson function.
pub fn chi_closed_form_exponential(sigma_t: f64, t: f64) -> Result<Complex64, PacketError> {
    if !(sigma_t.is_finite() && sigma_t > 0.0) {
        return Err(PacketError::Width(sigma_t));
    }
    if t == 0.0 {
        return Err(PacketError::AtOrigin);
    }
    let s = sigma_t;
    let a = t.abs();
    let x = (a / (2.0 * s)).sqrt();
    let root = 1.0 / (a * s).sqrt();
    let p = Complex64::new(1.0, 1.0);
    let m = Complex64::new(1.0, -1.0);
    let v = if t > 0.0 {
        -m * ((2.0 * PI).sqrt() * (-x * x).exp() / s) - p * (2.0 * root) + p * (2.0 * SQRT_2 * dawson(x) / s)
    } else {
        m * (2.0 * root - (2.0 * PI).sqrt() * erfcx(x) / s)
    };
    Ok(v)
}

/// The supplement's printed expression for the same quantity, evaluated literally:
///
/// ```text
/// (2i√π/σ)·e^{iπ/4 − |t|/2σ} − 2√2·e^{−i·sgn(t)π/4}·[1/√(|t|σ) + (√2·sgn t/σ)·e^{x²}(√π/2)·erf(x)]
/// ```
///
/// It does not agree with the defining integral; kept for comparison.
pub fn chi_closed_form_exponential_as_printed(sigma_t: f64, t: f64) -> Result<Complex64, PacketError> {
    if !(sigma_t.is_finite() && sigma_t > 0.0) {
        return Err(PacketError::Width(sigma_t));
    }
    if t == 0.0 {
        return Err(PacketError::AtOrigin);
    }
    let s = sigma_t;
    let a = t.abs();
    let sg = t.signum();
    let x = (a / (2.0 * s)).sqrt();
    let lead = Complex64::new(0.0, 2.0 * PI.sqrt() / s) * Complex64::from_polar((-a / (2.0 * s)).exp(), FRAC_PI_4);
    let inner = (x * x).exp() * 0.5 * PI.sqrt() * libm::erf(x);
    let bracket = 1.0 / (a * s).sqrt() + SQRT_2 * sg / s * inner;
    Ok(lead - Complex64::from_polar(2.0 * SQRT_2, -sg * FRAC_PI_4) * bracket)
}
