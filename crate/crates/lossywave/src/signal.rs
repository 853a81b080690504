//! Time signatures for the excitation term `g(t) = s(t) · g_spatial`.
//!
//! Three source kinds cover the measurement needs of the crate: a windowed
//! tone burst for narrowband attenuation probing, a Gaussian pulse for
//! broadband solver cross-checks, and a Ricker wavelet as a zero-mean
//! broadband alternative.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Envelope applied to a tone burst.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BurstWindow {
    /// Raised-cosine (Hann) envelope over the burst duration; smooth
    /// turn-on/turn-off, narrow spectrum.
    Hann,
    /// Rectangular gate; broader spectral skirts.
    Rect,
}

/// Scalar excitation time signature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExcitationKind {
    /// `w(t) · sin(2π f t)` for `t ∈ [0, n_cycles/f]`, zero outside.
    ToneBurst {
        frequency: f64,
        n_cycles: u32,
        window: BurstWindow,
    },
    /// `exp(−(t−t0)² / (2σ²))` — unit peak at `t0`.
    GaussianPulse { t0: f64, sigma: f64 },
    /// Ricker wavelet `(1 − 2π²f²τ²) · exp(−π²f²τ²)`, `τ = t − t0`, with
    /// spectral peak at `f_peak`.
    Ricker { f_peak: f64, t0: f64 },
}

impl ExcitationKind {
    /// Check parameter domains; the message names the offending field.
    pub fn validate(&self) -> Result<()> {
        match *self {
            ExcitationKind::ToneBurst {
                frequency,
                n_cycles,
                ..
            } => {
                if !(frequency.is_finite() && frequency > 0.0) {
                    return Err(Error::invalid_argument(format!(
                        "tone burst frequency must be positive, got {frequency}"
                    )));
                }
                if n_cycles == 0 {
                    return Err(Error::invalid_argument(
                        "tone burst needs at least 1 cycle".to_string(),
                    ));
                }
            }
            ExcitationKind::GaussianPulse { t0, sigma } => {
                if !t0.is_finite() {
                    return Err(Error::invalid_argument(format!(
                        "gaussian pulse centre t0 must be finite, got {t0}"
                    )));
                }
                if !(sigma.is_finite() && sigma > 0.0) {
                    return Err(Error::invalid_argument(format!(
                        "gaussian pulse width sigma must be positive, got {sigma}"
                    )));
                }
            }
            ExcitationKind::Ricker { f_peak, t0 } => {
                if !(f_peak.is_finite() && f_peak > 0.0) {
                    return Err(Error::invalid_argument(format!(
                        "ricker peak frequency must be positive, got {f_peak}"
                    )));
                }
                if !t0.is_finite() {
                    return Err(Error::invalid_argument(format!(
                        "ricker centre t0 must be finite, got {t0}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Carrier frequency for narrowband sources (`None` for broadband).
    #[must_use]
    pub fn carrier_frequency(&self) -> Option<f64> {
        match *self {
            ExcitationKind::ToneBurst { frequency, .. } => Some(frequency),
            _ => None,
        }
    }

    /// Time after which the source is identically zero, when that exists.
    #[must_use]
    pub fn support_end(&self) -> Option<f64> {
        match *self {
            ExcitationKind::ToneBurst {
                frequency, n_cycles, ..
            } => Some(f64::from(n_cycles) / frequency),
            _ => None,
        }
    }

    /// Evaluate the signature at one instant.
    #[must_use]
    pub fn evaluate(&self, t: f64) -> f64 {
        use std::f64::consts::PI;
        match *self {
            ExcitationKind::ToneBurst {
                frequency,
                n_cycles,
                window,
            } => {
                let duration = f64::from(n_cycles) / frequency;
                if !(0.0..=duration).contains(&t) {
                    return 0.0;
                }
                let envelope = match window {
                    BurstWindow::Hann => 0.5 * (1.0 - (2.0 * PI * t / duration).cos()),
                    BurstWindow::Rect => 1.0,
                };
                envelope * (2.0 * PI * frequency * t).sin()
            }
            ExcitationKind::GaussianPulse { t0, sigma } => {
                let z = (t - t0) / sigma;
                (-0.5 * z * z).exp()
            }
            ExcitationKind::Ricker { f_peak, t0 } => {
                let arg = (PI * f_peak * (t - t0)).powi(2);
                (1.0 - 2.0 * arg) * (-arg).exp()
            }
        }
    }
}

/// Sample a validated excitation signature on a time grid.
pub fn excitation_signal(kind: &ExcitationKind, times: &[f64]) -> Result<Vec<f64>> {
    kind.validate()?;
    Ok(times.iter().map(|&t| kind.evaluate(t)).collect())
}
