//! Measurements on simulated waveforms and recovery of absorption laws.
//!
//! The empirical loop this module closes: excite a medium with a tone
//! burst, record the field at two probes, take the log-amplitude ratio to
//! get a spatial attenuation coefficient at that carrier, repeat over a
//! frequency sweep, and fit `α(ω) = α₀ ωᵞ` (optionally with a constant
//! offset `α₁`) back out of the samples.
//!
//! Amplitudes must be read inside a *clean* window: after the burst has
//! fully passed the probe but before the first boundary reflection
//! returns. Both instants are computed from ray arrival times and violated
//! windows are rejected rather than silently measured.

use nalgebra::DVector;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::AssembledSystem;
use crate::integrate::Trajectory;

/// How the per-probe amplitude is extracted from the windowed series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeMethod {
    /// Largest absolute sample.
    PeakAbs,
    /// Largest magnitude of the analytic (Hilbert) envelope.
    Analytic,
}

/// One attenuation measurement at a single carrier.
#[derive(Debug, Clone, Copy)]
pub struct AttenuationSample {
    /// Carrier frequency `f` (cycles per unit time).
    pub frequency: f64,
    /// Eigen-wavenumber `ω = 2πf / c` (radians per unit length): the
    /// variable the power law is expressed in.
    pub omega: f64,
    /// Probe positions, `x1 < x2`, along propagation.
    pub x1: f64,
    pub x2: f64,
    /// Amplitude ratio `A(x2)/A(x1)`.
    pub amplitude_ratio: f64,
    /// Measured attenuation `−ln(ratio)/(x2 − x1)` in nepers per unit
    /// length.
    pub alpha: f64,
}

/// Context needed to window and convert one attenuation measurement.
#[derive(Debug, Clone, Copy)]
pub struct AttenuationMeasurement {
    /// Tone-burst carrier frequency.
    pub carrier_frequency: f64,
    /// Wave speed of the lossless medium.
    pub c: f64,
    /// Source coordinate; probes must lie downstream (`x ≥ source`).
    pub source_position: f64,
    /// Duration of the excitation's support (time for the burst to clear a
    /// point completely).
    pub burst_duration: f64,
    pub method: EnvelopeMethod,
}

/// Measure spatial attenuation from a two-probe trajectory.
///
/// `probe_pair` indexes into `traj.probe_dofs`. For each probe at `x` the
/// amplitude is read over `[0, t_reflect(x)]` where
/// `t_reflect = (2L − x − x_s)/c` is the first far-end reflection arrival;
/// the burst must have fully passed by then
/// (`(x + x_s)/c + burst_duration ≤ t_reflect`, which for a source at the
/// near boundary reduces to the direct transit plus the burst length) or
/// the window is rejected as invalid.
pub fn measure_attenuation(
    traj: &Trajectory,
    system: &AssembledSystem,
    probe_pair: (usize, usize),
    setup: &AttenuationMeasurement,
) -> Result<AttenuationSample> {
    if !(setup.carrier_frequency.is_finite() && setup.carrier_frequency > 0.0) {
        return Err(Error::invalid_argument(format!(
            "carrier frequency must be positive, got {}",
            setup.carrier_frequency
        )));
    }
    if !(setup.c.is_finite() && setup.c > 0.0) {
        return Err(Error::invalid_argument(format!(
            "wave speed c must be positive, got {}",
            setup.c
        )));
    }
    if !(setup.burst_duration.is_finite() && setup.burst_duration >= 0.0) {
        return Err(Error::invalid_argument(format!(
            "burst duration must be non-negative, got {}",
            setup.burst_duration
        )));
    }
    let length = system.mesh().length();
    if !(0.0..=length).contains(&setup.source_position) {
        return Err(Error::invalid_argument(format!(
            "source position {} outside the domain [0, {length}]",
            setup.source_position
        )));
    }
    let (i1, i2) = probe_pair;
    if i1 == i2 {
        return Err(Error::invalid_argument(
            "attenuation needs two distinct probes".to_string(),
        ));
    }
    let n_probes = traj.probe_dofs.len();
    if i1 >= n_probes || i2 >= n_probes {
        return Err(Error::invalid_argument(format!(
            "probe index out of range: trajectory records {n_probes} probes"
        )));
    }
    let x1 = system.position_of_dof(traj.probe_dofs[i1]);
    let x2 = system.position_of_dof(traj.probe_dofs[i2]);
    if x1 >= x2 {
        return Err(Error::invalid_argument(format!(
            "probes must be ordered along propagation: x1 = {x1} is not below x2 = {x2}"
        )));
    }
    if x1 < setup.source_position {
        return Err(Error::invalid_argument(format!(
            "probe at x = {x1} lies upstream of the source at {}",
            setup.source_position
        )));
    }

    let t_end = *traj.times.last().expect("trajectory is non-empty");
    let mut amplitudes = [0.0_f64; 2];
    for (slot, (&index, &x)) in [i1, i2].iter().zip([&x1, &x2]).enumerate() {
        let t_complete = (x + setup.source_position) / setup.c + setup.burst_duration;
        let t_reflect = (2.0 * length - x - setup.source_position) / setup.c;
        if t_complete > t_reflect {
            return Err(Error::InvalidWindow(format!(
                "no clean window at probe x = {x}: burst clears at t = {t_complete:.6} but \
                 the far-end reflection returns at t = {t_reflect:.6}"
            )));
        }
        if t_end < t_complete {
            return Err(Error::InvalidWindow(format!(
                "trajectory ends at t = {t_end:.6} before the burst clears probe \
                 x = {x} at t = {t_complete:.6}"
            )));
        }
        let series = traj.probe_series(index);
        let cut = traj
            .times
            .iter()
            .position(|&t| t > t_reflect)
            .unwrap_or(series.len());
        let window = &series[..cut];
        amplitudes[slot] = match setup.method {
            EnvelopeMethod::PeakAbs => window.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())),
            EnvelopeMethod::Analytic => analytic_envelope(window)
                .iter()
                .fold(0.0_f64, |acc, &v| acc.max(v)),
        };
    }

    if amplitudes[0] <= 0.0 {
        return Err(Error::DegenerateSignal(format!(
            "zero amplitude at the reference probe x = {x1}; cannot form a ratio"
        )));
    }
    if amplitudes[1] <= 0.0 {
        return Err(Error::DegenerateSignal(format!(
            "zero amplitude at the far probe x = {x2}; cannot form a ratio"
        )));
    }

    let ratio = amplitudes[1] / amplitudes[0];
    let alpha = -ratio.ln() / (x2 - x1);
    Ok(AttenuationSample {
        frequency: setup.carrier_frequency,
        omega: 2.0 * std::f64::consts::PI * setup.carrier_frequency / setup.c,
        x1,
        x2,
        amplitude_ratio: ratio,
        alpha,
    })
}

/// Magnitude of the analytic signal (Hilbert envelope) of a real series.
///
/// Degenerate inputs (fewer than two samples) reduce to `|x|`.
#[must_use]
pub fn analytic_envelope(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    if n < 2 {
        return samples.iter().map(|v| v.abs()).collect();
    }
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    let ifft = planner.plan_fft_inverse(n);

    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.process(&mut buf);
    // Analytic-signal spectrum: keep DC (and Nyquist for even n), double
    // positive frequencies, zero negative ones.
    let half = n / 2;
    for (k, value) in buf.iter_mut().enumerate() {
        if k == 0 || (n.is_multiple_of(2) && k == half) {
            continue;
        } else if k < half || (!n.is_multiple_of(2) && k == half) {
            *value *= 2.0;
        } else {
            *value = Complex64::new(0.0, 0.0);
        }
    }
    ifft.process(&mut buf);
    buf.iter().map(|v| v.norm() / n as f64).collect()
}

/// Which attenuation model to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitForm {
    /// `α(ω) = α₀ ωᵞ`.
    Pure,
    /// `α(ω) = α₁ + α₀ ωᵞ`.
    TwoTerm,
}

impl FitForm {
    /// Stable lowercase label used in reports.
    #[must_use]
    pub fn label(&self) -> &'static str {
        match self {
            FitForm::Pure => "pure",
            FitForm::TwoTerm => "two_term",
        }
    }
}

/// Recovered power-law parameters.
#[derive(Debug, Clone, Copy)]
pub struct PowerLawFit {
    pub form: FitForm,
    /// Constant offset (zero for the pure form).
    pub alpha1_hat: f64,
    pub alpha0_hat: f64,
    pub y_hat: f64,
    /// Root-mean-square misfit of `ln α` over the samples.
    pub residual: f64,
    pub n_samples: usize,
}

/// Fit an attenuation power law to measured samples.
///
/// The pure form is an exact linear least-squares problem in
/// `ln α = ln α₀ + y ln ω`. The two-term form is solved by a
/// Levenberg–Marquardt iteration on `(α₁, ln α₀, y)` in the same log
/// residual, seeded from the pure fit with `α₁ = 0`; `α₁` is kept
/// non-negative and `y` inside `[0, 2]`.
pub fn fit_power_law(samples: &[AttenuationSample], form: FitForm) -> Result<PowerLawFit> {
    let minimum = match form {
        FitForm::Pure => 2,
        FitForm::TwoTerm => 4,
    };
    if samples.len() < minimum {
        return Err(Error::invalid_argument(format!(
            "{} fit needs at least {minimum} samples, got {}",
            form.label(),
            samples.len()
        )));
    }
    for s in samples {
        if !(s.omega.is_finite() && s.omega > 0.0) {
            return Err(Error::invalid_argument(format!(
                "sample frequency must be positive, got omega = {}",
                s.omega
            )));
        }
        if !(s.alpha.is_finite() && s.alpha > 0.0) {
            return Err(Error::invalid_argument(format!(
                "log fit needs positive attenuation, got alpha = {} at omega = {}",
                s.alpha, s.omega
            )));
        }
    }

    match form {
        FitForm::Pure => fit_pure(samples),
        FitForm::TwoTerm => fit_two_term(samples),
    }
}

fn fit_pure(samples: &[AttenuationSample]) -> Result<PowerLawFit> {
    let n = samples.len() as f64;
    let xs: Vec<f64> = samples.iter().map(|s| s.omega.ln()).collect();
    let ys: Vec<f64> = samples.iter().map(|s| s.alpha.ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    if sxx <= 0.0 {
        return Err(Error::invalid_argument(
            "power-law fit needs at least two distinct frequencies".to_string(),
        ));
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let y_hat = sxy / sxx;
    let intercept = y_mean - y_hat * x_mean;
    let alpha0_hat = intercept.exp();
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (intercept + y_hat * x);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(PowerLawFit {
        form: FitForm::Pure,
        alpha1_hat: 0.0,
        alpha0_hat,
        y_hat,
        residual,
        n_samples: samples.len(),
    })
}

fn fit_two_term(samples: &[AttenuationSample]) -> Result<PowerLawFit> {
    // Parameters θ = (α₁, u = ln α₀, y); residuals r_i = ln m_i − ln α_i
    // with m_i = α₁ + e^u ω_iᵞ.
    let n = samples.len();
    let seed = fit_pure(samples)?;
    let mut alpha1 = 0.0_f64;
    let mut u = seed.alpha0_hat.ln();
    let mut y = seed.y_hat.clamp(0.0, 2.0);

    let eval = |alpha1: f64, u: f64, y: f64| -> (Vec<f64>, f64) {
        let mut residuals = Vec::with_capacity(n);
        let mut cost = 0.0;
        for s in samples {
            let model = alpha1 + u.exp() * s.omega.powf(y);
            let r = model.ln() - s.alpha.ln();
            cost += r * r;
            residuals.push(r);
        }
        (residuals, cost)
    };

    let (mut residuals, mut cost) = eval(alpha1, u, y);
    let mut lambda = 1e-3;
    let mut converged = false;

    for _ in 0..200 {
        // Jacobian of the log residuals.
        let mut jtj = nalgebra::Matrix3::<f64>::zeros();
        let mut jtr = nalgebra::Vector3::<f64>::zeros();
        for (s, &r) in samples.iter().zip(&residuals) {
            let wy = s.omega.powf(y);
            let model = alpha1 + u.exp() * wy;
            let row = nalgebra::Vector3::new(
                1.0 / model,
                u.exp() * wy / model,
                u.exp() * wy * s.omega.ln() / model,
            );
            jtj += row * row.transpose();
            jtr += row * r;
        }

        let mut improved = false;
        for _ in 0..12 {
            let mut damped = jtj;
            for i in 0..3 {
                damped[(i, i)] += lambda * jtj[(i, i)].max(1e-30);
            }
            let Some(step) = damped.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial_alpha1 = (alpha1 + step[0]).max(0.0);
            let trial_u = u + step[1];
            let trial_y = (y + step[2]).clamp(0.0, 2.0);
            let (trial_res, trial_cost) = eval(trial_alpha1, trial_u, trial_y);
            if trial_cost <= cost {
                let step_norm = step.norm();
                alpha1 = trial_alpha1;
                u = trial_u;
                y = trial_y;
                residuals = trial_res;
                let relative_drop = (cost - trial_cost) / cost.max(1e-300);
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-12);
                improved = true;
                if step_norm < 1e-12 || cost < 1e-28 || relative_drop < 1e-14 {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if converged {
            break;
        }
        if !improved {
            // Cannot descend further: treat the current point as converged
            // if the gradient is already negligible.
            if jtr.norm() < 1e-10 {
                converged = true;
            }
            break;
        }
    }

    if !converged {
        return Err(Error::ConvergenceFailure {
            context: "two-term power-law fit stalled".to_string(),
            residual: (cost / n as f64).sqrt(),
            iterations: 200,
        });
    }

    Ok(PowerLawFit {
        form: FitForm::TwoTerm,
        alpha1_hat: alpha1,
        alpha0_hat: u.exp(),
        y_hat: y,
        residual: (cost / n as f64).sqrt(),
        n_samples: n,
    })
}

/// Measure the damped angular frequency of a trajectory's oscillation
/// along one mode shape.
///
/// The full state is projected onto the shape and the half-period is read
/// off as the median interval between sign changes; the median makes the
/// estimate robust against a few distorted early cycles. Requires
/// every-step snapshots (`full_stride == 1`) and at least four zero
/// crossings.
pub fn measure_damped_frequency(traj: &Trajectory, shape: &DVector<f64>) -> Result<f64> {
    if traj.full_stride != 1 {
        return Err(Error::invalid_argument(
            "frequency measurement needs full state snapshots at every step \
             (full_state_stride = 1)"
                .to_string(),
        ));
    }
    if traj.full_p.is_empty() {
        return Err(Error::invalid_argument(
            "trajectory carries no state snapshots".to_string(),
        ));
    }
    if shape.len() != traj.full_p[0].len() {
        return Err(Error::invalid_argument(format!(
            "shape length {} does not match state dimension {}",
            shape.len(),
            traj.full_p[0].len()
        )));
    }

    let series: Vec<f64> = traj.full_p.iter().map(|p| shape.dot(p)).collect();
    let peak = series.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if peak == 0.0 {
        return Err(Error::DegenerateSignal(
            "projection onto the mode shape is identically zero".to_string(),
        ));
    }

    let mut crossings = Vec::new();
    for k in 0..series.len() - 1 {
        let (s0, s1) = (series[k], series[k + 1]);
        if s0 == 0.0 {
            crossings.push(traj.times[k]);
        } else if s0 * s1 < 0.0 {
            // Linear interpolation of the crossing instant.
            let frac = s0 / (s0 - s1);
            crossings.push(traj.times[k] + frac * traj.dt);
        }
    }
    if crossings.len() < 4 {
        return Err(Error::InsufficientSignal(format!(
            "only {} zero crossings; need at least 4 to estimate a frequency",
            crossings.len()
        )));
    }

    let mut intervals: Vec<f64> = crossings.windows(2).map(|w| w[1] - w[0]).collect();
    intervals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = intervals.len() / 2;
    let median = if intervals.len() % 2 == 1 {
        intervals[mid]
    } else {
        0.5 * (intervals[mid - 1] + intervals[mid])
    };
    Ok(std::f64::consts::PI / median)
}

/// Viscoelastic stress series `σ(t) = E₀ ε(t) + 2 α₀ c ρ fᵞ ε̇(t)`:
/// elastic response plus a rate term whose coefficient is the power-law
/// damping a narrowband strain at carrier `f` experiences.
#[allow(clippy::too_many_arguments)] // mirrors the constitutive law's parameter list
pub fn constitutive_stress(
    strain: &[f64],
    strain_rate: &[f64],
    e0: f64,
    rho: f64,
    alpha0: f64,
    y: f64,
    c: f64,
    frequency: f64,
) -> Result<Vec<f64>> {
    if strain.len() != strain_rate.len() {
        return Err(Error::invalid_argument(format!(
            "strain and strain-rate series differ in length: {} vs {}",
            strain.len(),
            strain_rate.len()
        )));
    }
    if !(e0.is_finite() && e0 > 0.0) {
        return Err(Error::invalid_argument(format!(
            "elastic modulus must be positive, got {e0}"
        )));
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::invalid_argument(format!(
            "density must be positive, got {rho}"
        )));
    }
    if !(alpha0.is_finite() && alpha0 >= 0.0) {
        return Err(Error::invalid_argument(format!(
            "alpha0 must be non-negative, got {alpha0}"
        )));
    }
    if !(y.is_finite() && (0.0..=2.0).contains(&y)) {
        return Err(Error::invalid_argument(format!(
            "absorption exponent y must lie in [0, 2], got {y}"
        )));
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::invalid_argument(format!(
            "wave speed c must be positive, got {c}"
        )));
    }
    if !(frequency.is_finite() && frequency > 0.0) {
        return Err(Error::invalid_argument(format!(
            "carrier frequency must be positive, got {frequency}"
        )));
    }
    let rate_coeff = 2.0 * alpha0 * c * rho * frequency.powf(y);
    Ok(strain
        .iter()
        .zip(strain_rate)
        .map(|(&e, &edot)| e0 * e + rate_coeff * edot)
        .collect())
}

/// Relative L2 distance `‖a − b‖ / ‖b‖` between equal-length series
/// (absolute distance when `b` is identically zero).
pub fn relative_l2(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid_argument(format!(
            "series differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let scale: f64 = b.iter().map(|y| y * y).sum();
    if scale == 0.0 {
        Ok(diff.sqrt())
    } else {
        Ok((diff / scale).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn synthetic_samples(alpha1: f64, alpha0: f64, y: f64, omegas: &[f64]) -> Vec<AttenuationSample> {
        omegas
            .iter()
            .map(|&omega| {
                let alpha = alpha1 + alpha0 * omega.powf(y);
                AttenuationSample {
                    frequency: omega / (2.0 * std::f64::consts::PI),
                    omega,
                    x1: 0.3,
                    x2: 0.6,
                    amplitude_ratio: (-alpha * 0.3).exp(),
                    alpha,
                }
            })
            .collect()
    }

    #[test]
    fn pure_fit_recovers_exact_samples() {
        let omegas = [20.0, 35.0, 60.0, 110.0, 180.0];
        for (alpha0, y) in [(0.05, 1.3), (1.2, 0.0), (3e-4, 2.0)] {
            let samples = synthetic_samples(0.0, alpha0, y, &omegas);
            let fit = fit_power_law(&samples, FitForm::Pure).unwrap();
            assert_relative_eq!(fit.alpha0_hat, alpha0, max_relative = 1e-8);
            assert!((fit.y_hat - y).abs() < 1e-8, "y_hat {}", fit.y_hat);
            assert!(fit.residual < 1e-12);
        }
    }

    #[test]
    fn two_term_fit_recovers_exact_samples() {
        let omegas = [10.0, 18.0, 30.0, 55.0, 90.0, 150.0, 240.0];
        let (alpha1, alpha0, y) = (0.4, 0.02, 1.45);
        let samples = synthetic_samples(alpha1, alpha0, y, &omegas);
        let fit = fit_power_law(&samples, FitForm::TwoTerm).unwrap();
        assert_relative_eq!(fit.alpha1_hat, alpha1, max_relative = 1e-6);
        assert_relative_eq!(fit.alpha0_hat, alpha0, max_relative = 1e-6);
        assert!((fit.y_hat - y).abs() < 1e-7, "y_hat {}", fit.y_hat);
    }

    #[test]
    fn two_term_fit_tolerates_a_zero_offset_truth() {
        let omegas = [10.0, 20.0, 40.0, 80.0, 160.0];
        let samples = synthetic_samples(0.0, 0.07, 1.1, &omegas);
        let fit = fit_power_law(&samples, FitForm::TwoTerm).unwrap();
        assert!(fit.alpha1_hat.abs() < 1e-6, "alpha1_hat {}", fit.alpha1_hat);
        assert_relative_eq!(fit.alpha0_hat, 0.07, max_relative = 1e-5);
        assert!((fit.y_hat - 1.1).abs() < 1e-5);
    }

    #[test]
    fn fit_rejects_bad_sample_sets() {
        let omegas = [20.0, 35.0, 60.0];
        let samples = synthetic_samples(0.0, 0.05, 1.0, &omegas);
        assert!(fit_power_law(&samples[..1], FitForm::Pure).is_err());
        assert!(fit_power_law(&samples, FitForm::TwoTerm).is_err()); // needs 4

        let mut negative = synthetic_samples(0.0, 0.05, 1.0, &omegas);
        negative[1].alpha = -0.1;
        assert!(fit_power_law(&negative, FitForm::Pure).is_err());

        // All samples at the same frequency: slope is unidentifiable.
        let degenerate = synthetic_samples(0.0, 0.05, 1.0, &[30.0, 30.0, 30.0]);
        assert!(fit_power_law(&degenerate, FitForm::Pure).is_err());
    }

    #[test]
    fn envelope_of_a_modulated_carrier_tracks_the_modulation() {
        // s(t) = env(t)·sin(2π·25t) with a Gaussian envelope.
        let n = 2048;
        let dt = 1e-3;
        let series: Vec<f64> = (0..n)
            .map(|k| {
                let t = dt * k as f64;
                let env = (-((t - 1.0) / 0.18).powi(2)).exp();
                env * (2.0 * std::f64::consts::PI * 25.0 * t).sin()
            })
            .collect();
        let envelope = analytic_envelope(&series);
        // Away from the edges the envelope must match the modulation.
        for k in (600..1400).step_by(50) {
            let t = dt * k as f64;
            let expect = (-((t - 1.0) / 0.18).powi(2)).exp();
            assert_relative_eq!(envelope[k], expect, max_relative = 2e-2);
        }
        // Peak of envelope vs peak of |s|: within 2%.
        let peak_env = envelope.iter().cloned().fold(0.0_f64, f64::max);
        let peak_abs = series.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        assert_relative_eq!(peak_env, peak_abs, max_relative = 2e-2);
    }

    #[test]
    fn stress_law_reduces_to_elasticity_without_rate() {
        let strain = [0.1, -0.2, 0.05];
        let zero_rate = [0.0; 3];
        let stress =
            constitutive_stress(&strain, &zero_rate, 2.5e9, 1000.0, 0.1, 1.5, 1500.0, 1e6)
                .unwrap();
        for (s, e) in stress.iter().zip(&strain) {
            assert_relative_eq!(*s, 2.5e9 * e);
        }

        // Rate term: σ − E₀ε = 2 α₀ c ρ f^y ε̇.
        let rate = [0.0, 1.0, -2.0];
        let stress =
            constitutive_stress(&strain, &rate, 2.5e9, 1000.0, 0.1, 1.5, 1500.0, 1e6).unwrap();
        let coeff = 2.0 * 0.1 * 1500.0 * 1000.0 * 1e6_f64.powf(1.5);
        assert_relative_eq!(stress[1], 2.5e9 * -0.2 + coeff, max_relative = 1e-14);

        assert!(constitutive_stress(&strain, &rate[..2], 1.0, 1.0, 0.1, 1.5, 1.0, 1.0).is_err());
        assert!(constitutive_stress(&strain, &rate, -1.0, 1.0, 0.1, 1.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn relative_l2_basics() {
        assert_eq!(relative_l2(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        let r = relative_l2(&[1.1, 2.0], &[1.0, 2.0]).unwrap();
        assert_relative_eq!(r, 0.1 / 5.0_f64.sqrt(), max_relative = 1e-12);
        assert!(relative_l2(&[1.0], &[1.0, 2.0]).is_err());
    }
}
