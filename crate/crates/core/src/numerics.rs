//! Numerically stable building blocks: phase-normalized log-polar amplitudes,
//! log-factorials and square-root binomial factors.
//!
//! Factorials are never materialized as integers. Every combinatorial weight
//! is assembled in log space and exponentiated once, so photon numbers in the
//! thousands stay inside double-precision range.

use std::f64::consts::PI;
use std::ops::Mul;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A dimensionless complex probability amplitude or Fresnel coefficient.
pub type ComplexAmplitude = Complex64;

/// Largest argument served from the exact cumulative log-factorial table.
pub const LOG_FACTORIAL_TABLE_MAX: u64 = 1024;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Wraps an angle into (-pi, pi].
pub fn normalize_phase(phase: f64) -> f64 {
    let p = phase.rem_euclid(2.0 * PI);
    if p > PI {
        p - 2.0 * PI
    } else {
        p
    }
}

/// Phase of a complex number, with arg(0) defined as 0.
pub fn phase_of(z: ComplexAmplitude) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        0.0
    } else {
        z.im.atan2(z.re)
    }
}

/// An amplitude stored as (ln|z|, arg z).
///
/// Zero is represented exactly by `log_mag == -inf`, never by a tiny float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMagnitudePhase {
    pub log_mag: f64,
    pub phase: f64,
}

impl LogMagnitudePhase {
    pub const ONE: Self = Self { log_mag: 0.0, phase: 0.0 };
    pub const ZERO: Self = Self { log_mag: f64::NEG_INFINITY, phase: 0.0 };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            Self { log_mag, phase: normalize_phase(phase) }
        }
    }

    pub fn from_complex(z: ComplexAmplitude) -> Self {
        let mag = z.norm();
        if mag == 0.0 {
            Self::ZERO
        } else {
            Self::new(mag.ln(), phase_of(z))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    pub fn magnitude(&self) -> f64 {
        self.log_mag.exp()
    }

    /// Multiplies by the positive real `exp(log_factor)`.
    pub fn scale_log(self, log_factor: f64) -> Self {
        if self.is_zero() {
            self
        } else {
            Self { log_mag: self.log_mag + log_factor, phase: self.phase }
        }
    }

    pub fn to_complex(self) -> ComplexAmplitude {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let mag = self.log_mag.exp();
        let (s, c) = self.phase.sin_cos();
        Complex64::new(mag * c, mag * s)
    }
}

impl Mul for LogMagnitudePhase {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            Self::ZERO
        } else {
            Self::new(self.log_mag + rhs.log_mag, self.phase + rhs.phase)
        }
    }
}

/// `z^k` in log-polar form. `z^0` is exactly one, including `0^0`.
pub fn complex_pow(z: ComplexAmplitude, k: u64) -> LogMagnitudePhase {
    if k == 0 {
        return LogMagnitudePhase::ONE;
    }
    let mag = z.norm();
    if mag == 0.0 {
        return LogMagnitudePhase::ZERO;
    }
    let k = k as f64;
    LogMagnitudePhase::new(k * mag.ln(), k * phase_of(z))
}

fn log_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        // Kahan-compensated running sum of ln k.
        let mut table = Vec::with_capacity(LOG_FACTORIAL_TABLE_MAX as usize + 1);
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        table.push(0.0);
        for k in 1..=LOG_FACTORIAL_TABLE_MAX {
            let y = (k as f64).ln() - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            table.push(sum);
        }
        table
    })
}

/// Remainder of Stirling's series, `ln x! - [(x + 1/2) ln x - x + ln sqrt(2 pi)]`.
fn stirling_remainder(x: u64) -> f64 {
    if x <= 15 {
        let xf = x as f64;
        return log_factorial_table()[x as usize] - ((xf + 0.5) * xf.ln() - xf + HALF_LN_2PI);
    }
    let x = x as f64;
    let x2 = x * x;
    let inv = 1.0 / x;
    let inv2 = 1.0 / x2;
    inv * (1.0 / 12.0
        - inv2
            * (1.0 / 360.0
                - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 * (1.0 / 1188.0)))))
}

/// ln(n!).
pub fn log_factorial(n: u64) -> f64 {
    if n <= LOG_FACTORIAL_TABLE_MAX {
        return log_factorial_table()[n as usize];
    }
    let x = n as f64;
    (x + 0.5) * x.ln() - x + HALF_LN_2PI + stirling_remainder(n)
}

/// ln C(n, m).
///
/// Above small arguments the leading Stirling terms are cancelled
/// analytically, which keeps the absolute error near machine epsilon times
/// the result instead of times ln(n!).
pub fn ln_binomial(n: u64, m: u64) -> Result<f64> {
    if m > n {
        return Err(Error::InvalidArgument(format!("binomial C({n}, {m}) has m > n")));
    }
    let k = m.min(n - m);
    if k == 0 {
        return Ok(0.0);
    }
    if n <= 20 {
        return Ok(log_factorial(n) - log_factorial(k) - log_factorial(n - k));
    }
    let (nf, kf) = (n as f64, k as f64);
    let rest = (n - k) as f64;
    let entropy = kf * (nf / kf).ln() - rest * (-kf / nf).ln_1p();
    let prefactor = 0.5 * (nf / (kf * rest)).ln() - HALF_LN_2PI;
    let remainder = stirling_remainder(n) - stirling_remainder(k) - stirling_remainder(n - k);
    Ok(entropy + prefactor + remainder)
}

/// sqrt(C(n, m)), evaluated through [`ln_binomial`].
pub fn sqrt_binomial(n: u64, m: u64) -> Result<f64> {
    Ok((0.5 * ln_binomial(n, m)?).exp())
}
