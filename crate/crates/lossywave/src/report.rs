//! CSV serialization of run artifacts.
//!
//! Every table uses `.` decimals, comma separators, one header row, and LF
//! line endings. Floats are written with Rust's shortest round-trip
//! representation, which makes repeated runs byte-identical and lets the
//! samples reader reconstruct exactly what was measured.

use std::fmt::Write as _;
use std::path::Path;

use crate::analysis::{AttenuationSample, PowerLawFit};
use crate::error::{Error, Result};
use crate::integrate::Trajectory;
use crate::matfun::BenchRow;
use crate::modal::DispersionPoint;

/// Render a trajectory as `t,probe_<node>_p,probe_<node>_v,...[,energy]`.
///
/// `probe_nodes` labels the columns with mesh node ids and must match the
/// trajectory's probe count.
pub fn trajectory_csv(traj: &Trajectory, probe_nodes: &[usize]) -> Result<String> {
    if probe_nodes.len() != traj.probe_dofs.len() {
        return Err(Error::invalid_argument(format!(
            "{} probe labels for a trajectory with {} probes",
            probe_nodes.len(),
            traj.probe_dofs.len()
        )));
    }
    let mut out = String::from("t");
    for node in probe_nodes {
        write!(out, ",probe_{node}_p,probe_{node}_v").expect("writing to String cannot fail");
    }
    if traj.energy.is_some() {
        out.push_str(",energy");
    }
    out.push('\n');
    for k in 0..traj.n_samples() {
        write!(out, "{}", traj.times[k]).expect("writing to String cannot fail");
        for i in 0..probe_nodes.len() {
            write!(out, ",{},{}", traj.probe_p[i][k], traj.probe_v[i][k])
                .expect("writing to String cannot fail");
        }
        if let Some(energy) = &traj.energy {
            write!(out, ",{}", energy[k]).expect("writing to String cannot fail");
        }
        out.push('\n');
    }
    Ok(out)
}

/// Render a dispersion table as
/// `omega,zeta,regime,damped_freq,phase_velocity`.
///
/// Modes without an oscillatory solution (critical/overdamped) have no
/// damped frequency or phase velocity; those fields are left empty.
#[must_use]
pub fn dispersion_csv(points: &[DispersionPoint]) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from("omega,zeta,regime,damped_freq,phase_velocity\n");
    for p in points {
        writeln!(
            out,
            "{},{},{},{},{}",
            p.omega,
            p.zeta,
            p.regime.label(),
            opt(p.damped_freq),
            opt(p.phase_velocity)
        )
        .expect("writing to String cannot fail");
    }
    out
}

/// Render attenuation samples as `f,omega,x1,x2,ratio,alpha`.
#[must_use]
pub fn samples_csv(samples: &[AttenuationSample]) -> String {
    let mut out = String::from("f,omega,x1,x2,ratio,alpha\n");
    for s in samples {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            s.frequency, s.omega, s.x1, s.x2, s.amplitude_ratio, s.alpha
        )
        .expect("writing to String cannot fail");
    }
    out
}

/// Parse a samples CSV produced by [`samples_csv`] (or by hand).
///
/// Strict about shape — the exact header, six finite numeric fields per
/// row — and reports the first offending line. Value-range checks
/// (positive `omega`, positive `alpha`) belong to the fit, not the
/// reader.
pub fn parse_samples_csv(text: &str) -> Result<Vec<AttenuationSample>> {
    let mut lines = text.lines().enumerate();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config("samples CSV is empty".to_string()))?
        .1;
    if header.trim_end() != "f,omega,x1,x2,ratio,alpha" {
        return Err(Error::Config(format!(
            "samples CSV header must be `f,omega,x1,x2,ratio,alpha`, got `{header}`"
        )));
    }
    let mut samples = Vec::new();
    for (index, line) in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Config(format!(
                "samples CSV line {}: expected 6 fields, got {}",
                index + 1,
                fields.len()
            )));
        }
        let mut values = [0.0_f64; 6];
        for (slot, field) in values.iter_mut().zip(&fields) {
            let parsed: f64 = field.trim().parse().map_err(|_| {
                Error::Config(format!(
                    "samples CSV line {}: `{field}` is not a number",
                    index + 1
                ))
            })?;
            if !parsed.is_finite() {
                return Err(Error::Config(format!(
                    "samples CSV line {}: `{field}` is not finite",
                    index + 1
                )));
            }
            *slot = parsed;
        }
        samples.push(AttenuationSample {
            frequency: values[0],
            omega: values[1],
            x1: values[2],
            x2: values[3],
            amplitude_ratio: values[4],
            alpha: values[5],
        });
    }
    Ok(samples)
}

/// Render a fit report as `form,alpha1_hat,alpha0_hat,y_hat,residual,n_samples`.
#[must_use]
pub fn fit_csv(fit: &PowerLawFit) -> String {
    format!(
        "form,alpha1_hat,alpha0_hat,y_hat,residual,n_samples\n{},{},{},{},{},{}\n",
        fit.form.label(),
        fit.alpha1_hat,
        fit.alpha0_hat,
        fit.y_hat,
        fit.residual,
        fit.n_samples
    )
}

/// Render benchmark rows as `n,method,p,median_seconds,residual`.
#[must_use]
pub fn benchmark_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("n,method,p,median_seconds,residual\n");
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            r.method.label(),
            r.p,
            r.median_seconds,
            r.residual
        )
        .expect("writing to String cannot fail");
    }
    out
}

/// Write a file atomically: the content lands under a temporary name in
/// the same directory and is renamed into place, so concurrent readers
/// never observe a partial file.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::invalid_argument(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp_path = match dir {
        Some(d) => d.join(&tmp_name),
        None => std::path::PathBuf::from(&tmp_name),
    };
    std::fs::write(&tmp_path, content)?;
    std::fs::rename(&tmp_path, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::FitForm;

    fn sample(f: f64, alpha: f64) -> AttenuationSample {
        AttenuationSample {
            frequency: f,
            omega: 2.0 * std::f64::consts::PI * f,
            x1: 0.35,
            x2: 0.6,
            amplitude_ratio: (-alpha * 0.25).exp(),
            alpha,
        }
    }

    #[test]
    fn samples_round_trip_exactly() {
        let samples = vec![sample(14.0, 0.123456789012345), sample(18.0, 3.9e-7)];
        let text = samples_csv(&samples);
        let parsed = parse_samples_csv(&text).unwrap();
        assert_eq!(parsed.len(), 2);
        for (a, b) in parsed.iter().zip(&samples) {
            assert_eq!(a.frequency, b.frequency);
            assert_eq!(a.omega, b.omega);
            assert_eq!(a.x1, b.x1);
            assert_eq!(a.x2, b.x2);
            assert_eq!(a.amplitude_ratio, b.amplitude_ratio);
            assert_eq!(a.alpha, b.alpha);
        }
    }

    #[test]
    fn samples_reader_rejects_malformed_input() {
        assert!(parse_samples_csv("").is_err());
        assert!(parse_samples_csv("wrong,header\n1,2\n").is_err());
        let bad_arity = "f,omega,x1,x2,ratio,alpha\n1,2,3\n";
        let err = parse_samples_csv(bad_arity).unwrap_err();
        assert!(err.to_string().contains("6 fields"), "{err}");
        let bad_number = "f,omega,x1,x2,ratio,alpha\n1,2,3,4,5,abc\n";
        let err = parse_samples_csv(bad_number).unwrap_err();
        assert!(err.to_string().contains("not a number"), "{err}");
        let non_finite = "f,omega,x1,x2,ratio,alpha\n1,2,3,4,5,inf\n";
        assert!(parse_samples_csv(non_finite).is_err());
    }

    #[test]
    fn fit_csv_has_the_pinned_header() {
        let fit = PowerLawFit {
            form: FitForm::TwoTerm,
            alpha1_hat: 0.5,
            alpha0_hat: 0.01,
            y_hat: 1.5,
            residual: 1e-9,
            n_samples: 5,
        };
        let text = fit_csv(&fit);
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "form,alpha1_hat,alpha0_hat,y_hat,residual,n_samples"
        );
        assert_eq!(lines.next().unwrap(), "two_term,0.5,0.01,1.5,0.000000001,5");
    }

    #[test]
    fn trajectory_csv_shape() {
        let traj = Trajectory {
            dt: 0.5,
            times: vec![0.0, 0.5],
            probe_dofs: vec![3, 7],
            probe_p: vec![vec![1.0, 2.0], vec![3.0, 4.0]],
            probe_v: vec![vec![0.1, 0.2], vec![0.3, 0.4]],
            energy: Some(vec![9.0, 8.0]),
            full_stride: 0,
            full_p: vec![],
            full_v: vec![],
        };
        let text = trajectory_csv(&traj, &[3, 7]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "t,probe_3_p,probe_3_v,probe_7_p,probe_7_v,energy"
        );
        assert_eq!(lines[1], "0,1,0.1,3,0.3,9");
        assert_eq!(lines[2], "0.5,2,0.2,4,0.4,8");
        assert!(text.ends_with('\n'));
        assert!(!text.contains('\r'));

        assert!(trajectory_csv(&traj, &[3]).is_err());
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = std::env::temp_dir().join(format!("lossywave-report-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("table.csv");
        write_atomic(&path, "a,b\n1,2\n").unwrap();
        write_atomic(&path, "a,b\n3,4\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,b\n3,4\n");
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
