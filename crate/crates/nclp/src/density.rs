//! Densities: positive definite operators in spectral form, and the closed
//! family of scalar functions applied to them by functional calculus.

use num_complex::Complex64;

use crate::mat::{eigh, CMat};
use crate::{tol, Error, Result};

/// Scalar function descriptor for the spectral calculus.
///
/// A closed enumeration rather than arbitrary code, so monotonicity can be
/// checked on the spectrum before the calculus is applied.
#[derive(Clone, Debug)]
pub enum SpectralFn {
    /// `t^alpha` with `alpha >= 0`; `alpha = 0` is the constant weight 1.
    Power(f64),
    /// `c * t` with `c > 0`.
    Scale(f64),
    /// `exp(r * t)` with `r >= 0`.
    Exp(f64),
    /// Explicit values per (ascending) eigenvalue index.
    Table(Vec<f64>),
}

impl SpectralFn {
    pub fn identity() -> Self {
        SpectralFn::Power(1.0)
    }

    /// Evaluates the descriptor on an ascending spectrum, enforcing
    /// positivity and monotonicity (the hypotheses of every result that
    /// consumes a weight function).
    pub fn eval_on(&self, spectrum: &[f64]) -> Result<Vec<f64>> {
        let values: Vec<f64> = match self {
            SpectralFn::Power(a) => {
                if *a < 0.0 || !a.is_finite() {
                    return Err(Error::Invalid(format!("power exponent must be >= 0, got {a}")));
                }
                spectrum.iter().map(|t| t.powf(*a)).collect()
            }
            SpectralFn::Scale(c) => {
                if *c <= 0.0 || !c.is_finite() {
                    return Err(Error::Invalid(format!("scale factor must be > 0, got {c}")));
                }
                spectrum.iter().map(|t| c * t).collect()
            }
            SpectralFn::Exp(r) => {
                if *r < 0.0 || !r.is_finite() {
                    return Err(Error::Invalid(format!("exponential rate must be >= 0, got {r}")));
                }
                spectrum.iter().map(|t| (r * t).exp()).collect()
            }
            SpectralFn::Table(v) => {
                if v.len() != spectrum.len() {
                    return Err(Error::DimMismatch(v.len(), spectrum.len()));
                }
                v.clone()
            }
        };
        for (i, v) in values.iter().enumerate() {
            if !v.is_finite() || *v <= 0.0 {
                return Err(Error::NotPositiveOnSpectrum(i));
            }
        }
        for i in 1..values.len() {
            if values[i] < values[i - 1] {
                return Err(Error::NotMonotone(i));
            }
        }
        Ok(values)
    }
}

/// Positive definite operator stored as (ascending eigenvalues, unitary
/// eigenbasis). The reconstructed matrix is cached because nearly every
/// weighted-norm evaluation needs it.
#[derive(Clone, Debug)]
pub struct Density {
    eigenvalues: Vec<f64>,
    basis: CMat,
    matrix: CMat,
}

impl Density {
    /// Spectral form of a Hermitian positive definite matrix.
    pub fn from_matrix(h: &CMat) -> Result<Self> {
        let e = eigh(h)?;
        if e.values[0] <= 0.0 {
            return Err(Error::NonPositiveSpectrum(e.values[0]));
        }
        Ok(Self::assemble(e.values, e.vectors))
    }

    /// From an ascending positive spectrum and a unitary eigenbasis.
    pub fn from_parts(eigenvalues: Vec<f64>, basis: CMat) -> Result<Self> {
        if eigenvalues.len() != basis.dim() {
            return Err(Error::DimMismatch(eigenvalues.len(), basis.dim()));
        }
        if eigenvalues.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::NonPositiveSpectrum(
                eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min),
            ));
        }
        if eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::NotAscending);
        }
        let gram = &basis.adjoint() * &basis;
        let defect = (&gram - &CMat::identity(basis.dim())).max_abs();
        if defect > 1e-8 {
            return Err(Error::Invalid(format!(
                "eigenbasis is not unitary: defect {defect:.3e}"
            )));
        }
        Ok(Self::assemble(eigenvalues, basis))
    }

    /// Diagonal density; the eigenvalues are sorted ascending and the basis
    /// is the corresponding permutation.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let n = values.len();
        if values.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::NonPositiveSpectrum(
                values.iter().cloned().fold(f64::INFINITY, f64::min),
            ));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let sorted: Vec<f64> = order.iter().map(|&k| values[k]).collect();
        let mut basis = CMat::zeros(n);
        for (col, &k) in order.iter().enumerate() {
            basis[(k, col)] = Complex64::new(1.0, 0.0);
        }
        Ok(Self::assemble(sorted, basis))
    }

    pub fn scalar(n: usize, lambda: f64) -> Result<Self> {
        Self::diagonal(&vec![lambda; n])
    }

    fn assemble(eigenvalues: Vec<f64>, basis: CMat) -> Self {
        let d = CMat::diag_real(&eigenvalues);
        let matrix = &(&basis * &d) * &basis.adjoint();
        Density { eigenvalues, basis, matrix }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Ascending spectrum.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary eigenbasis (columns are eigenvectors, matching the ascending
    /// spectrum).
    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    /// The reconstructed positive definite matrix.
    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn condition_number(&self) -> f64 {
        self.eigenvalues[self.dim() - 1] / self.eigenvalues[0]
    }

    /// Inverse density: eigenvalues `1/lambda_i` in reversed (ascending)
    /// order, same eigenvectors with columns reversed to match.
    pub fn inverse(&self) -> Density {
        let n = self.dim();
        let values: Vec<f64> = self.eigenvalues.iter().rev().map(|v| 1.0 / v).collect();
        let mut basis = CMat::zeros(n);
        for col in 0..n {
            for i in 0..n {
                basis[(i, col)] = self.basis[(i, n - 1 - col)];
            }
        }
        Self::assemble(values, basis)
    }

    /// Functional calculus `f(d)`: same eigenbasis, eigenvalues `f(lambda_i)`.
    /// Rejects descriptors that are not positive nondecreasing on the
    /// spectrum.
    pub fn apply_calculus(&self, f: &SpectralFn) -> Result<Density> {
        let values = f.eval_on(&self.eigenvalues)?;
        Ok(Self::assemble(values, self.basis.clone()))
    }

    /// `d^alpha` for `alpha >= 0`.
    pub fn power(&self, alpha: f64) -> Result<Density> {
        self.apply_calculus(&SpectralFn::Power(alpha))
    }

    /// Conjugates `x` into the eigenbasis: `U* x U`.
    pub fn into_eigenbasis(&self, x: &CMat) -> CMat {
        &(&self.basis.adjoint() * x) * &self.basis
    }

    /// Conjugates back from the eigenbasis: `U y U*`.
    pub fn from_eigenbasis(&self, y: &CMat) -> CMat {
        &(&self.basis * y) * &self.basis.adjoint()
    }

    /// The unitary `exp(i t ln d)`, computed on the eigenvalues.
    pub fn log_unitary(&self, t: f64) -> CMat {
        let phases: Vec<Complex64> = self
            .eigenvalues
            .iter()
            .map(|l| (Complex64::new(0.0, t * l.ln())).exp())
            .collect();
        self.from_eigenbasis(&CMat::diag(&phases))
    }

    /// True when the condition number exceeds the hostile-density guard.
    pub fn is_ill_conditioned(&self) -> bool {
        self.condition_number() > tol::DENSITY_COND_GUARD
    }
}
