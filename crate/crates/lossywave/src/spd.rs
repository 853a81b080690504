//! Validated wrapper for symmetric positive (semi)definite matrices.
//!
//! Every operator that enters the equation of motion — stiffness, damping,
//! fractional powers of stiffness — must be symmetric and must not have
//! eigenvalues meaningfully below zero. [`SpdMatrix`] encodes that contract
//! in the type: construction checks symmetry to a relative tolerance, and
//! the permitted amount of negative spectrum is carried alongside the data
//! so spectral consumers can enforce it where the spectrum is actually
//! computed.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative symmetry defect accepted at construction (relative to the
/// largest entry magnitude).
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default definiteness tolerance: eigenvalues are accepted down to
/// `-DEFAULT_DEFINITENESS_TOL * lambda_max`, which admits the exact-zero
/// modes of free/free operators perturbed by rounding.
pub const DEFAULT_DEFINITENESS_TOL: f64 = 1e-12;

/// A square symmetric matrix that is positive definite up to a documented
/// tolerance: eigenvalues must satisfy `lambda >= -tol * lambda_max`.
///
/// Symmetry is validated eagerly (and the stored matrix is exactly
/// symmetrized so downstream algebra never sees a skew part). Definiteness
/// is validated by [`SpdMatrix::new`] via an eigendecomposition; the cheaper
/// [`SpdMatrix::from_symmetric`] defers that check to spectral consumers,
/// which reject violating spectra with [`Error::InvalidMatrix`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    mat: DMatrix<f64>,
    definiteness_tol: f64,
}

impl SpdMatrix {
    /// Fully validated constructor: checks squareness, finiteness, symmetry
    /// (relative defect below [`SYMMETRY_TOL`]) and the eigenvalue bound
    /// `lambda_min >= -definiteness_tol * lambda_max`.
    pub fn new(mat: DMatrix<f64>, definiteness_tol: f64) -> Result<Self> {
        let spd = Self::from_symmetric(mat, definiteness_tol)?;
        let eigenvalues = spd.mat.clone().symmetric_eigenvalues();
        let lambda_max = eigenvalues.iter().cloned().fold(0.0_f64, f64::max);
        let lambda_min = eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if lambda_min < -definiteness_tol * lambda_max {
            return Err(Error::invalid_matrix(format!(
                "matrix is not positive semidefinite within tolerance: \
                 lambda_min = {lambda_min:.3e} < {:.3e}",
                -definiteness_tol * lambda_max
            )));
        }
        Ok(spd)
    }

    /// Symmetry-validated constructor. Callers use this when positive
    /// semidefiniteness is structural (finite-element assembly, congruence
    /// transforms of nonnegative diagonals) or will be established by a
    /// later eigendecomposition.
    pub fn from_symmetric(mat: DMatrix<f64>, definiteness_tol: f64) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::invalid_matrix(format!(
                "matrix must be square, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.is_empty() {
            return Err(Error::invalid_matrix("matrix must be non-empty".to_string()));
        }
        if mat.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid_matrix(
                "matrix contains non-finite entries".to_string(),
            ));
        }
        if !(definiteness_tol.is_finite() && definiteness_tol >= 0.0) {
            return Err(Error::invalid_argument(format!(
                "definiteness tolerance must be finite and non-negative, got {definiteness_tol}"
            )));
        }
        let defect = Self::symmetry_defect(&mat);
        if defect > SYMMETRY_TOL {
            return Err(Error::invalid_matrix(format!(
                "matrix is not symmetric: relative defect {defect:.3e} exceeds {SYMMETRY_TOL:.0e}"
            )));
        }
        // Exact symmetrization so later algebra cannot amplify a rounding-level
        // skew part.
        let mat = 0.5 * (&mat + mat.transpose());
        Ok(SpdMatrix {
            mat,
            definiteness_tol,
        })
    }

    /// The `n x n` identity.
    #[must_use]
    pub fn identity(n: usize) -> Self {
        SpdMatrix {
            mat: DMatrix::identity(n, n),
            definiteness_tol: DEFAULT_DEFINITENESS_TOL,
        }
    }

    /// Largest relative asymmetry `max |a_ij - a_ji| / max |a_ij|` (zero for
    /// the zero matrix).
    #[must_use]
    pub fn symmetry_defect(mat: &DMatrix<f64>) -> f64 {
        let scale = mat.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for i in 0..mat.nrows() {
            for j in (i + 1)..mat.ncols() {
                worst = worst.max((mat[(i, j)] - mat[(j, i)]).abs());
            }
        }
        worst / scale
    }

    /// Dimension of the (square) matrix.
    #[must_use]
    pub fn n(&self) -> usize {
        self.mat.nrows()
    }

    /// Borrow the underlying matrix.
    #[must_use]
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// Consume the wrapper and return the matrix.
    #[must_use]
    pub fn into_matrix(self) -> DMatrix<f64> {
        self.mat
    }

    /// The tolerance against which negative spectrum is judged.
    #[must_use]
    pub fn definiteness_tol(&self) -> f64 {
        self.definiteness_tol
    }

    /// Form `a*I + b*M`, which preserves the invariant for `a, b >= 0`.
    pub fn scaled_with_identity(&self, a: f64, b: f64) -> Result<SpdMatrix> {
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0) {
            return Err(Error::invalid_argument(format!(
                "coefficients of a*I + b*M must be finite and non-negative, got a = {a}, b = {b}"
            )));
        }
        let mut mat = &self.mat * b;
        for i in 0..mat.nrows() {
            mat[(i, i)] += a;
        }
        Ok(SpdMatrix {
            mat,
            definiteness_tol: self.definiteness_tol,
        })
    }

    /// Matrix-vector product `M x`.
    pub fn mul_vec(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.mat * x
    }

    /// Quadratic form `xᵀ M x`.
    #[must_use]
    pub fn quadratic_form(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.mat * x))
    }

    /// Frobenius norm of the matrix.
    #[must_use]
    pub fn frobenius_norm(&self) -> f64 {
        self.mat.norm()
    }
}
