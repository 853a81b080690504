//! Fractional powers of symmetric positive (semi)definite matrices.
//!
//! The damping operator needs `K^(y/2)` for arbitrary `y ∈ [0, 2]`. Two
//! independent routes are implemented so they can cross-check each other:
//!
//! * [`fractional_power`] with [`PowerMethod::Eigen`] — full symmetric
//!   eigendecomposition, apply the scalar power to the spectrum, reassemble.
//!   Works for any exponent and is the reference route.
//! * [`sqrt_iterative`] — a coupled Denman–Beavers Newton iteration for the
//!   principal square root (`p = 1/2` only). It touches the matrix only
//!   through inverses, so it shares no code path with the eigen route.
//!
//! Near-singular spectra are handled with an explicit eigenvalue floor of
//! `1e-14 * lambda_max` on the eigen route (flagged in the result) and a
//! positive-definiteness precondition on the iterative route.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::spd::SpdMatrix;

/// Relative eigenvalue floor applied on the eigen route: eigenvalues below
/// `EIGENVALUE_FLOOR_REL * lambda_max` are clamped up to it before the
/// scalar power is applied.
pub const EIGENVALUE_FLOOR_REL: f64 = 1e-14;

/// Positive-definiteness guard for the iterative square root: the smallest
/// eigenvalue must exceed `PD_GUARD_REL * lambda_max`.
pub const PD_GUARD_REL: f64 = 1e-12;

/// Default relative-change tolerance for the Denman–Beavers iteration.
pub const DB_DEFAULT_TOL: f64 = 1e-13;

/// Default iteration cap for the Denman–Beavers iteration.
pub const DB_DEFAULT_MAX_ITERS: usize = 80;

/// How a fractional power was (or should be) computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerMethod {
    /// Symmetric eigendecomposition; any exponent.
    Eigen,
    /// Denman–Beavers coupled Newton iteration; square root only.
    IterativeSqrt,
    /// Reserved for a Schur-based route; not implemented.
    Schur,
}

impl PowerMethod {
    /// Stable lowercase label used in reports.
    #[must_use]
    pub fn label(&self) -> &'static str {
        match self {
            PowerMethod::Eigen => "eigen",
            PowerMethod::IterativeSqrt => "iterative_sqrt",
            PowerMethod::Schur => "schur",
        }
    }
}

/// Result of a matrix-power computation, with a self-assessed residual.
#[derive(Debug, Clone)]
pub struct MatrixPowerResult {
    /// The computed power `K^p`.
    pub value: SpdMatrix,
    /// Route that produced it.
    pub method: PowerMethod,
    /// Round-trip residual: with `m` the smallest integer in `1..=8` making
    /// `m*p` integral, this is `‖value^m − K^(m·p)‖_F / ‖K^(m·p)‖_F`; when no
    /// such `m` exists the value is compared against the eigen route instead
    /// (identically zero when the eigen route produced it).
    pub residual: f64,
    /// Whether any eigenvalue was clamped up to the floor.
    pub eigenvalue_floor_applied: bool,
}

/// One benchmark measurement from [`benchmark_power_methods`].
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub n: usize,
    pub method: PowerMethod,
    pub p: f64,
    pub median_seconds: f64,
    pub residual: f64,
}

/// Compute `K^p` for `p ∈ [0, 1]`.
///
/// Errors: `p` outside `[0, 1]` or a non-`Eigen` method with an unsupported
/// exponent → [`Error::InvalidArgument`]; spectrum below the definiteness
/// tolerance of `k` → [`Error::InvalidMatrix`]; [`PowerMethod::Schur`] is
/// reserved and always rejected.
pub fn fractional_power(k: &SpdMatrix, p: f64, method: PowerMethod) -> Result<MatrixPowerResult> {
    if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
        return Err(Error::invalid_argument(format!(
            "exponent must lie in [0, 1], got {p}"
        )));
    }
    match method {
        PowerMethod::Eigen => fractional_power_eigen(k, p),
        PowerMethod::IterativeSqrt => {
            if (p - 0.5).abs() > f64::EPSILON {
                return Err(Error::invalid_argument(format!(
                    "the iterative route only computes the square root (p = 0.5), got p = {p}"
                )));
            }
            sqrt_iterative(k, DB_DEFAULT_TOL, DB_DEFAULT_MAX_ITERS)
        }
        PowerMethod::Schur => Err(Error::invalid_argument(
            "the Schur route is reserved and not implemented; use eigen or iterative_sqrt"
                .to_string(),
        )),
    }
}

fn fractional_power_eigen(k: &SpdMatrix, p: f64) -> Result<MatrixPowerResult> {
    let eig = k.matrix().clone().symmetric_eigen();
    let lambda_max = eig.eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
    let lambda_min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if lambda_min < -k.definiteness_tol() * lambda_max {
        return Err(Error::invalid_matrix(format!(
            "cannot take a fractional power: lambda_min = {lambda_min:.3e} is below \
             -{:.0e} * lambda_max",
            k.definiteness_tol()
        )));
    }

    let floor = EIGENVALUE_FLOOR_REL * lambda_max;
    let mut floored = false;
    let powered: DVector<f64> = eig.eigenvalues.map(|lambda| {
        let clamped = if lambda < floor {
            floored = true;
            floor
        } else {
            lambda
        };
        clamped.powf(p)
    });

    // Phi * diag(lambda^p) * Phi^T, assembled column-scaled to keep it one pass.
    let mut scaled = eig.eigenvectors.clone();
    for (j, factor) in powered.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*factor);
    }
    let value = &scaled * eig.eigenvectors.transpose();
    let value = SpdMatrix::from_symmetric(
        0.5 * (&value + value.transpose()),
        k.definiteness_tol(),
    )?;

    // The eigen route is its own fallback reference, making the residual
    // exactly zero when no integral round trip exists.
    let residual = roundtrip_residual(k, &value, p, Some(&value));
    Ok(MatrixPowerResult {
        value,
        method: PowerMethod::Eigen,
        residual,
        eigenvalue_floor_applied: floored,
    })
}

/// Principal square root by the coupled Denman–Beavers iteration
/// `Y ← (Y + Z⁻¹)/2`, `Z ← (Z + Y⁻¹)/2` from `Y₀ = K`, `Z₀ = I`.
///
/// Converges quadratically to `Y → K^(1/2)`, `Z → K^(-1/2)` for positive
/// definite `K`. The spectrum must be safely positive (smallest eigenvalue
/// above `1e-12 * lambda_max`), otherwise [`Error::InvalidMatrix`] is
/// returned; stagnation past `max_iters` yields
/// [`Error::ConvergenceFailure`] carrying the last defect.
pub fn sqrt_iterative(k: &SpdMatrix, tol: f64, max_iters: usize) -> Result<MatrixPowerResult> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid_argument(format!(
            "iteration tolerance must be positive, got {tol}"
        )));
    }
    if max_iters == 0 {
        return Err(Error::invalid_argument(
            "iteration cap must be at least 1".to_string(),
        ));
    }
    guard_positive_definite(k)?;

    let n = k.n();
    let mut y = k.matrix().clone();
    let mut z = DMatrix::<f64>::identity(n, n);
    let mut converged = false;

    for _ in 0..max_iters {
        let y_inv = spd_inverse(&y).ok_or_else(|| {
            Error::NumericFailure("square-root iterate Y became singular".to_string())
        })?;
        let z_inv = spd_inverse(&z).ok_or_else(|| {
            Error::NumericFailure("square-root iterate Z became singular".to_string())
        })?;
        let y_next = 0.5 * (&y + &z_inv);
        let z_next = 0.5 * (&z + &y_inv);
        let change = (&y_next - &y).norm() / y_next.norm();
        // Re-symmetrize each iterate so inversion rounding cannot accumulate
        // a skew part across iterations.
        y = 0.5 * (&y_next + y_next.transpose());
        z = 0.5 * (&z_next + z_next.transpose());
        if change < tol {
            converged = true;
            break;
        }
    }

    let defect = (&y * &y - k.matrix()).norm() / k.matrix().norm();
    if !converged {
        return Err(Error::ConvergenceFailure {
            context: "Denman–Beavers square root stalled".to_string(),
            residual: defect,
            iterations: max_iters,
        });
    }

    let value = SpdMatrix::from_symmetric(y, k.definiteness_tol())?;
    Ok(MatrixPowerResult {
        value,
        method: PowerMethod::IterativeSqrt,
        residual: defect,
        eigenvalue_floor_applied: false,
    })
}

/// Benchmark the available routes on seeded random SPD instances.
///
/// Each size gets a deterministic test matrix (condition number `1e4`);
/// every (size, method) pair is timed `repetitions` times and the median
/// wall time is reported together with the self-assessed residual. The
/// iterative route is only benchmarked when `p = 0.5`.
pub fn benchmark_power_methods(
    sizes: &[usize],
    p: f64,
    repetitions: usize,
) -> Result<Vec<BenchRow>> {
    if sizes.is_empty() {
        return Err(Error::invalid_argument(
            "benchmark needs at least one matrix size".to_string(),
        ));
    }
    if repetitions == 0 {
        return Err(Error::invalid_argument(
            "benchmark needs at least one repetition".to_string(),
        ));
    }
    if sizes.iter().any(|&n| n < 2) {
        return Err(Error::invalid_argument(
            "benchmark matrix sizes must be at least 2".to_string(),
        ));
    }

    let mut rows = Vec::new();
    for &n in sizes {
        let k = random_spd(n, 1e4, 0x5eed_0000 + n as u64)?;
        let mut methods = vec![PowerMethod::Eigen];
        if (p - 0.5).abs() <= f64::EPSILON {
            methods.push(PowerMethod::IterativeSqrt);
        }
        for method in methods {
            let mut times = Vec::with_capacity(repetitions);
            let mut residual = f64::NAN;
            for _ in 0..repetitions {
                let start = Instant::now();
                let result = fractional_power(&k, p, method)?;
                times.push(start.elapsed().as_secs_f64());
                residual = result.residual;
            }
            times.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let median_seconds = if times.len() % 2 == 1 {
                times[times.len() / 2]
            } else {
                0.5 * (times[times.len() / 2 - 1] + times[times.len() / 2])
            };
            rows.push(BenchRow {
                n,
                method,
                p,
                median_seconds,
                residual,
            });
        }
    }
    Ok(rows)
}

/// Deterministic random SPD test matrix: eigenvalues log-spaced over
/// `[1/cond, 1]` conjugated by a seeded random orthogonal matrix.
pub fn random_spd(n: usize, cond: f64, seed: u64) -> Result<SpdMatrix> {
    if n == 0 {
        return Err(Error::invalid_argument("matrix size must be positive".to_string()));
    }
    if !(cond.is_finite() && cond >= 1.0) {
        return Err(Error::invalid_argument(format!(
            "condition number must be finite and >= 1, got {cond}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let gaussian =
        DMatrix::<f64>::from_fn(n, n, |_, _| Distribution::<f64>::sample(&normal, &mut rng));
    let q = gaussian.qr().q();

    let eigenvalues = DVector::from_fn(n, |i, _| {
        if n == 1 {
            1.0
        } else {
            // log-spaced from 1 down to 1/cond
            (-(i as f64) / (n as f64 - 1.0) * cond.ln()).exp()
        }
    });
    let mut scaled = q.clone();
    for (j, lambda) in eigenvalues.iter().enumerate() {
        scaled.column_mut(j).scale_mut(*lambda);
    }
    let a = &scaled * q.transpose();
    SpdMatrix::from_symmetric(0.5 * (&a + a.transpose()), crate::spd::DEFAULT_DEFINITENESS_TOL)
}

/// Reject matrices whose smallest eigenvalue is not safely positive.
///
/// `lambda_max` is bounded above by the Gershgorin row sum and
/// `lambda_min` is estimated by inverse power iteration on a Cholesky
/// factorization; a failed factorization already proves indefiniteness.
fn guard_positive_definite(k: &SpdMatrix) -> Result<()> {
    let mat = k.matrix();
    let n = k.n();
    let gershgorin = (0..n)
        .map(|i| (0..n).map(|j| mat[(i, j)].abs()).sum::<f64>())
        .fold(0.0_f64, f64::max);

    let Some(chol) = nalgebra::Cholesky::new(mat.clone()) else {
        return Err(Error::invalid_matrix(
            "iterative square root requires a positive definite matrix \
             (Cholesky factorization failed)"
                .to_string(),
        ));
    };

    // Inverse power iteration: repeated solves drive a deterministic start
    // vector towards the eigenvector of the smallest eigenvalue.
    let mut x = DVector::from_fn(n, |i, _| if i % 2 == 0 { 1.0 } else { -0.7 });
    x /= x.norm();
    let mut lambda_min_est = f64::INFINITY;
    for _ in 0..60 {
        let solved = chol.solve(&x);
        let norm = solved.norm();
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        x = solved / norm;
        let kx = mat * &x;
        lambda_min_est = x.dot(&kx);
    }

    if lambda_min_est <= PD_GUARD_REL * gershgorin {
        return Err(Error::invalid_matrix(format!(
            "iterative square root requires lambda_min > {PD_GUARD_REL:.0e} * lambda_max: \
             estimated lambda_min = {lambda_min_est:.3e} against spectral bound {gershgorin:.3e}"
        )));
    }
    Ok(())
}

/// Cholesky-based inverse; `None` when the matrix is not positive definite.
fn spd_inverse(mat: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    nalgebra::Cholesky::new(mat.clone()).map(|c| c.inverse())
}

/// Integer matrix power by repeated multiplication (small exponents only).
fn int_power(mat: &DMatrix<f64>, exp: u32) -> DMatrix<f64> {
    let n = mat.nrows();
    let mut acc = DMatrix::<f64>::identity(n, n);
    for _ in 0..exp {
        acc = &acc * mat;
    }
    acc
}

/// Round-trip residual described on [`MatrixPowerResult::residual`].
fn roundtrip_residual(
    k: &SpdMatrix,
    value: &SpdMatrix,
    p: f64,
    eigen_reference: Option<&SpdMatrix>,
) -> f64 {
    for m in 1_u32..=8 {
        let mp = f64::from(m) * p;
        if (mp - mp.round()).abs() <= 1e-9 {
            let lhs = int_power(value.matrix(), m);
            let rhs = int_power(k.matrix(), mp.round() as u32);
            let scale = rhs.norm();
            let diff = (lhs - &rhs).norm();
            return if scale == 0.0 { diff } else { diff / scale };
        }
    }
    // No small integral multiple: compare against the eigen route.
    let reference = match eigen_reference {
        Some(r) => r.matrix().clone(),
        None => match fractional_power_eigen(k, p) {
            Ok(r) => r.value.into_matrix(),
            Err(_) => return f64::NAN,
        },
    };
    let scale = reference.norm();
    let diff = (value.matrix() - &reference).norm();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn diag_spd(values: &[f64]) -> SpdMatrix {
        SpdMatrix::from_symmetric(
            DMatrix::from_diagonal(&DVector::from_row_slice(values)),
            crate::spd::DEFAULT_DEFINITENESS_TOL,
        )
        .unwrap()
    }

    #[test]
    fn diagonal_square_root_is_exact() {
        let k = diag_spd(&[1.0, 4.0, 9.0]);
        let r = fractional_power(&k, 0.5, PowerMethod::Eigen).unwrap();
        let expect = [1.0, 2.0, 3.0];
        let mut got: Vec<f64> = (0..3).map(|i| r.value.matrix()[(i, i)]).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (g, e) in got.iter().zip(expect) {
            assert_relative_eq!(*g, e, max_relative = 1e-13);
        }
        assert!(r.residual < 1e-12);
        assert!(!r.eigenvalue_floor_applied);
    }

    #[test]
    fn unit_and_zero_exponents_collapse() {
        let k = random_spd(16, 1e3, 7).unwrap();
        let p1 = fractional_power(&k, 1.0, PowerMethod::Eigen).unwrap();
        assert!((p1.value.matrix() - k.matrix()).norm() / k.matrix().norm() < 1e-13);
        let p0 = fractional_power(&k, 0.0, PowerMethod::Eigen).unwrap();
        let eye = DMatrix::<f64>::identity(16, 16);
        assert!((p0.value.matrix() - &eye).norm() < 1e-13);
    }

    #[test]
    fn spectral_mapping_holds() {
        let k = random_spd(12, 1e3, 42).unwrap();
        let p = 0.37;
        let r = fractional_power(&k, p, PowerMethod::Eigen).unwrap();
        let mut before: Vec<f64> = k
            .matrix()
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .map(|l| l.powf(p))
            .collect();
        let mut after: Vec<f64> = r
            .value
            .matrix()
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .collect();
        before.sort_by(|a, b| a.partial_cmp(b).unwrap());
        after.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (b, a) in before.iter().zip(after.iter()) {
            assert_relative_eq!(*a, *b, max_relative = 1e-11, epsilon = 1e-14);
        }
    }

    #[test]
    fn semigroup_property() {
        let k = random_spd(10, 1e2, 3).unwrap();
        let a = fractional_power(&k, 0.3, PowerMethod::Eigen).unwrap();
        let b = fractional_power(&k, 0.4, PowerMethod::Eigen).unwrap();
        let ab = a.value.matrix() * b.value.matrix();
        let c = fractional_power(&k, 0.7, PowerMethod::Eigen).unwrap();
        let rel = (&ab - c.value.matrix()).norm() / c.value.matrix().norm();
        assert!(rel < 1e-10, "semigroup defect {rel:.3e}");
    }

    #[test]
    fn power_commutes_with_the_matrix() {
        let k = random_spd(14, 1e4, 11).unwrap();
        let r = fractional_power(&k, 0.65, PowerMethod::Eigen).unwrap();
        let lhs = k.matrix() * r.value.matrix();
        let rhs = r.value.matrix() * k.matrix();
        let rel = (&lhs - &rhs).norm() / lhs.norm();
        assert!(rel < 1e-12, "commutator {rel:.3e}");
    }

    #[test]
    fn iterative_sqrt_matches_eigen_route() {
        let k = random_spd(30, 1e6, 2024).unwrap();
        let eigen = fractional_power(&k, 0.5, PowerMethod::Eigen).unwrap();
        let db = sqrt_iterative(&k, DB_DEFAULT_TOL, DB_DEFAULT_MAX_ITERS).unwrap();
        let rel =
            (eigen.value.matrix() - db.value.matrix()).norm() / eigen.value.matrix().norm();
        assert!(rel < 1e-8, "route disagreement {rel:.3e}");
        assert!(db.residual < 1e-9, "defect {:.3e}", db.residual);
    }

    #[test]
    fn iterative_sqrt_rejects_near_singular() {
        let k = diag_spd(&[1.0, 1e-16, 0.5]);
        let err = sqrt_iterative(&k, DB_DEFAULT_TOL, DB_DEFAULT_MAX_ITERS).unwrap_err();
        assert!(matches!(err, Error::InvalidMatrix(_)), "got {err}");
    }

    #[test]
    fn iterative_sqrt_reports_stall() {
        let k = random_spd(12, 1e4, 5).unwrap();
        let err = sqrt_iterative(&k, 1e-15, 2).unwrap_err();
        match err {
            Error::ConvergenceFailure { residual, .. } => assert!(residual.is_finite()),
            other => panic!("expected convergence failure, got {other}"),
        }
    }

    #[test]
    fn eigenvalue_floor_is_flagged_and_keeps_values_finite() {
        let k = diag_spd(&[1.0, 1e-20]);
        let r = fractional_power(&k, 0.5, PowerMethod::Eigen).unwrap();
        assert!(r.eigenvalue_floor_applied);
        assert!(r.value.matrix().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn invalid_arguments_are_rejected() {
        let k = SpdMatrix::identity(4);
        assert!(fractional_power(&k, -0.1, PowerMethod::Eigen).is_err());
        assert!(fractional_power(&k, 1.1, PowerMethod::Eigen).is_err());
        assert!(fractional_power(&k, 0.4, PowerMethod::IterativeSqrt).is_err());
        assert!(fractional_power(&k, 0.5, PowerMethod::Schur).is_err());
    }

    #[test]
    fn benchmark_emits_both_routes_at_half() {
        let rows = benchmark_power_methods(&[8, 16], 0.5, 3).unwrap();
        assert_eq!(rows.len(), 4);
        for row in &rows {
            assert!(row.median_seconds >= 0.0);
            assert!(row.residual < 1e-8, "residual {:.3e}", row.residual);
        }
        let rows = benchmark_power_methods(&[8], 0.25, 1).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].method, PowerMethod::Eigen);
        assert!(benchmark_power_methods(&[], 0.5, 3).is_err());
        assert!(benchmark_power_methods(&[8], 0.5, 0).is_err());
        assert!(benchmark_power_methods(&[1], 0.5, 1).is_err());
    }
}
