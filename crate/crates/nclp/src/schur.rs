//! Schur multipliers: the kernel families generated by positive sequences,
//! entrywise application, and completely bounded norms certified from above
//! (PSD-completion feasibility, Fourier L1 bounds) and below (entry and
//! empirical witnesses), with blockwise transference.
//!
//! The cb norm of a kernel `phi` equals the infimum of
//! `sup_{i,j} ||xi_i|| ||eta_j||` over Hilbert-space factorizations
//! `phi_ij = <xi_i, eta_j>`. Deciding `cb <= t` is the feasibility of a PSD
//! completion `[[A, Phi], [Phi*, B]] >= 0` with `diag(A) <= t`,
//! `diag(B) <= t`, which is solved here by alternating projections between
//! the PSD cone and the affine/box constraint set, wrapped in a bisection
//! over `t`.

use num_complex::Complex64;

use crate::fourier::{KernelFunction, L1Norm};
use crate::mat::{eigh, CMat};
use crate::schatten::{schatten_norm, PNorm};
use crate::{tol, Error, Result};

/// Entrywise multiplier kernel with its generating family, when one exists.
#[derive(Clone, Debug)]
pub struct SchurKernel {
    entries: CMat,
    provenance: Option<KernelFamily>,
}

impl SchurKernel {
    pub fn from_entries(entries: CMat) -> Result<Self> {
        // finiteness is enforced by CMat construction; nothing else to check
        Ok(SchurKernel { entries, provenance: None })
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn provenance(&self) -> Option<&KernelFamily> {
        self.provenance.as_ref()
    }

    /// Largest entry modulus; a valid cb lower bound for every kernel.
    pub fn sup_abs(&self) -> f64 {
        self.entries.max_abs()
    }

    /// Entrywise product of two kernels (composition of the multipliers).
    pub fn compose(&self, other: &SchurKernel) -> Result<SchurKernel> {
        Ok(SchurKernel { entries: self.entries.hadamard(&other.entries)?, provenance: None })
    }

    pub fn principal_submatrix(&self, keep: &[usize]) -> SchurKernel {
        let m = keep.len();
        let entries = CMat::from_fn(m, |i, j| self.entries[(keep[i], keep[j])])
            .expect("submatrix of finite entries");
        SchurKernel { entries, provenance: None }
    }
}

/// Kernel `(f(s_i - s_j))_{ij}` generated by a scalar function and points.
pub fn kernel_from_function(f: &KernelFunction, points: &[f64]) -> Result<SchurKernel> {
    let n = points.len();
    let entries = CMat::from_fn(n, |i, j| Complex64::new(f.eval(points[i] - points[j]), 0.0))?;
    Ok(SchurKernel { entries, provenance: None })
}

/// The kernel families under study, with their parameters.
#[derive(Clone, Debug)]
pub enum KernelFamily {
    /// `min(l_i, l_j) / max(l_i, l_j)`; cb <= 1.
    MinOverMax { lambda: Vec<f64> },
    /// `(l_i + l_j)^theta / max(l_i, l_j)^theta`; cb <= 2^theta.
    SumPowOverMaxPow { lambda: Vec<f64>, theta: f64 },
    /// `max(l_i, l_j)^theta / (l_i + l_j)^theta`; cb <= 2 - 2^{-theta}.
    MaxPowOverSumPow { lambda: Vec<f64>, theta: f64 },
    /// `min(l_i, l_j)^theta / (l_i + l_j)^theta`; cb <= 2 - 2^{-theta}.
    MinPowOverSumPow { lambda: Vec<f64>, theta: f64 },
    /// `(l_i^{1-t} m_i^t + l_j^{1-t} m_j^t) / ((l_i+l_j)^{1-t} (m_i+m_j)^t)`
    /// for nondecreasing `l`, `m`; cb <= 9 - 4 sqrt(2).
    TwoWeightMean { lambda: Vec<f64>, mu: Vec<f64>, theta: f64 },
    /// `((l_i+l_j)^t (m_i+m_j)^{1-t}) / (l_i^t m_i^{1-t} + l_j^t m_j^{1-t})`
    /// for nondecreasing `l`, `m`; cb <= 3.
    TwoWeightRatio { lambda: Vec<f64>, mu: Vec<f64>, theta: f64 },
    /// `l_i^t l_j^{1-t} / (l_i + l_j)`, `0 < t < 1`; cb <= C ln(1/(t(1-t))).
    GeoMeanOverSum { lambda: Vec<f64>, theta: f64 },
    /// `(l_i+l_j)(m_i+m_j) / ((l_i^{1-t}m_i^t + l_j^{1-t}m_j^t)(l_i^t m_i^{1-t} + l_j^t m_j^{1-t}))`
    /// for arbitrary positive sequences; unbounded as the dimension grows
    /// when the sequences have opposite variation.
    OppositeSign { lambda: Vec<f64>, mu: Vec<f64>, theta: f64 },
    /// Same formula as `OppositeSign` but with both sequences nondecreasing
    /// (spectra of commuting weights); cb <= 9 - 4 sqrt(2).
    InterpCorrection { lambda: Vec<f64>, mu: Vec<f64>, theta: f64 },
}

/// The bound attached to a family by the results it comes from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ClaimedBound {
    Value(f64),
    /// `C ln(1/(theta(1-theta)))` with an ineffective constant.
    LogFactor,
    Unbounded,
}

impl KernelFamily {
    pub fn theta(&self) -> Option<f64> {
        match self {
            KernelFamily::MinOverMax { .. } => None,
            KernelFamily::SumPowOverMaxPow { theta, .. }
            | KernelFamily::MaxPowOverSumPow { theta, .. }
            | KernelFamily::MinPowOverSumPow { theta, .. }
            | KernelFamily::TwoWeightMean { theta, .. }
            | KernelFamily::TwoWeightRatio { theta, .. }
            | KernelFamily::GeoMeanOverSum { theta, .. }
            | KernelFamily::OppositeSign { theta, .. }
            | KernelFamily::InterpCorrection { theta, .. } => Some(*theta),
        }
    }

    pub fn claimed_bound(&self) -> ClaimedBound {
        match self {
            KernelFamily::MinOverMax { .. } => ClaimedBound::Value(1.0),
            KernelFamily::SumPowOverMaxPow { theta, .. } => {
                ClaimedBound::Value(2f64.powf(*theta))
            }
            KernelFamily::MaxPowOverSumPow { theta, .. }
            | KernelFamily::MinPowOverSumPow { theta, .. } => {
                ClaimedBound::Value(2.0 - 2f64.powf(-theta))
            }
            KernelFamily::TwoWeightMean { .. } | KernelFamily::InterpCorrection { .. } => {
                ClaimedBound::Value(9.0 - 4.0 * 2f64.sqrt())
            }
            KernelFamily::TwoWeightRatio { .. } => ClaimedBound::Value(3.0),
            KernelFamily::GeoMeanOverSum { .. } => ClaimedBound::LogFactor,
            KernelFamily::OppositeSign { .. } => ClaimedBound::Unbounded,
        }
    }

    fn validate(&self) -> Result<()> {
        let check_positive = |v: &[f64]| -> Result<()> {
            for (i, x) in v.iter().enumerate() {
                if !x.is_finite() || *x <= 0.0 {
                    return Err(Error::NonPositiveSequence(i));
                }
            }
            Ok(())
        };
        let check_nondecreasing = |v: &[f64]| -> Result<()> {
            for i in 1..v.len() {
                if v[i] < v[i - 1] {
                    return Err(Error::NotNondecreasingSequence(i));
                }
            }
            Ok(())
        };
        let check_theta_closed = |t: f64| -> Result<()> {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::ThetaOutOfRange(t, "[0, 1]"));
            }
            Ok(())
        };
        match self {
            KernelFamily::MinOverMax { lambda } => check_positive(lambda),
            KernelFamily::SumPowOverMaxPow { lambda, theta }
            | KernelFamily::MaxPowOverSumPow { lambda, theta }
            | KernelFamily::MinPowOverSumPow { lambda, theta } => {
                check_positive(lambda)?;
                check_theta_closed(*theta)
            }
            KernelFamily::TwoWeightMean { lambda, mu, theta }
            | KernelFamily::TwoWeightRatio { lambda, mu, theta }
            | KernelFamily::InterpCorrection { lambda, mu, theta } => {
                if lambda.len() != mu.len() {
                    return Err(Error::DimMismatch(lambda.len(), mu.len()));
                }
                check_positive(lambda)?;
                check_positive(mu)?;
                check_nondecreasing(lambda)?;
                check_nondecreasing(mu)?;
                check_theta_closed(*theta)
            }
            KernelFamily::GeoMeanOverSum { lambda, theta } => {
                check_positive(lambda)?;
                if !(*theta > 0.0 && *theta < 1.0) {
                    return Err(Error::ThetaOutOfRange(*theta, "(0, 1): bound diverges at the ends"));
                }
                Ok(())
            }
            KernelFamily::OppositeSign { lambda, mu, theta } => {
                if lambda.len() != mu.len() {
                    return Err(Error::DimMismatch(lambda.len(), mu.len()));
                }
                check_positive(lambda)?;
                check_positive(mu)?;
                check_theta_closed(*theta)
            }
        }
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        match self {
            KernelFamily::MinOverMax { lambda } => {
                lambda[i].min(lambda[j]) / lambda[i].max(lambda[j])
            }
            KernelFamily::SumPowOverMaxPow { lambda, theta } => {
                ((lambda[i] + lambda[j]) / lambda[i].max(lambda[j])).powf(*theta)
            }
            KernelFamily::MaxPowOverSumPow { lambda, theta } => {
                (lambda[i].max(lambda[j]) / (lambda[i] + lambda[j])).powf(*theta)
            }
            KernelFamily::MinPowOverSumPow { lambda, theta } => {
                (lambda[i].min(lambda[j]) / (lambda[i] + lambda[j])).powf(*theta)
            }
            KernelFamily::TwoWeightMean { lambda, mu, theta } => {
                let num = lambda[i].powf(1.0 - theta) * mu[i].powf(*theta)
                    + lambda[j].powf(1.0 - theta) * mu[j].powf(*theta);
                let den = (lambda[i] + lambda[j]).powf(1.0 - theta)
                    * (mu[i] + mu[j]).powf(*theta);
                num / den
            }
            KernelFamily::TwoWeightRatio { lambda, mu, theta } => {
                let num = (lambda[i] + lambda[j]).powf(*theta)
                    * (mu[i] + mu[j]).powf(1.0 - theta);
                let den = lambda[i].powf(*theta) * mu[i].powf(1.0 - theta)
                    + lambda[j].powf(*theta) * mu[j].powf(1.0 - theta);
                num / den
            }
            KernelFamily::GeoMeanOverSum { lambda, theta } => {
                lambda[i].powf(*theta) * lambda[j].powf(1.0 - theta) / (lambda[i] + lambda[j])
            }
            KernelFamily::OppositeSign { lambda, mu, theta }
            | KernelFamily::InterpCorrection { lambda, mu, theta } => {
                let a = lambda[i].powf(1.0 - theta) * mu[i].powf(*theta)
                    + lambda[j].powf(1.0 - theta) * mu[j].powf(*theta);
                let b = lambda[i].powf(*theta) * mu[i].powf(1.0 - theta)
                    + lambda[j].powf(*theta) * mu[j].powf(1.0 - theta);
                (lambda[i] + lambda[j]) * (mu[i] + mu[j]) / (a * b)
            }
        }
    }

    fn len(&self) -> usize {
        match self {
            KernelFamily::MinOverMax { lambda }
            | KernelFamily::SumPowOverMaxPow { lambda, .. }
            | KernelFamily::MaxPowOverSumPow { lambda, .. }
            | KernelFamily::MinPowOverSumPow { lambda, .. }
            | KernelFamily::GeoMeanOverSum { lambda, .. }
            | KernelFamily::TwoWeightMean { lambda, .. }
            | KernelFamily::TwoWeightRatio { lambda, .. }
            | KernelFamily::OppositeSign { lambda, .. }
            | KernelFamily::InterpCorrection { lambda, .. } => lambda.len(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::MinOverMax { .. } => "min-over-max",
            KernelFamily::SumPowOverMaxPow { .. } => "sum-pow-over-max-pow",
            KernelFamily::MaxPowOverSumPow { .. } => "max-pow-over-sum-pow",
            KernelFamily::MinPowOverSumPow { .. } => "min-pow-over-sum-pow",
            KernelFamily::TwoWeightMean { .. } => "two-weight-mean",
            KernelFamily::TwoWeightRatio { .. } => "two-weight-ratio",
            KernelFamily::GeoMeanOverSum { .. } => "geo-mean-over-sum",
            KernelFamily::OppositeSign { .. } => "opposite-sign-counterexample",
            KernelFamily::InterpCorrection { .. } => "interp-correction",
        }
    }
}

/// Builds the kernel matrix of a family after validating its hypotheses.
pub fn build_kernel(family: &KernelFamily) -> Result<SchurKernel> {
    family.validate()?;
    let n = family.len();
    let entries = CMat::from_fn(n, |i, j| Complex64::new(family.entry(i, j), 0.0))?;
    Ok(SchurKernel { entries, provenance: Some(family.clone()) })
}

/// Entrywise action `(x_ij) -> (phi_ij x_ij)`.
pub fn apply_multiplier(kernel: &SchurKernel, x: &CMat) -> Result<CMat> {
    kernel.entries.hadamard(x)
}

/// Witness achieving an empirical lower bound.
#[derive(Clone, Debug)]
pub enum Witness {
    /// Matrix unit `e_ij`; valid at every p.
    Entry(usize, usize),
    /// A concrete matrix achieving the ratio.
    Matrix(Box<CMat>),
}

pub struct LowerBound {
    pub value: f64,
    pub witness: Witness,
}

/// Lower bound on the multiplier norm on `S_p`: the best of the largest
/// entry modulus (matrix units are norm-one in every Schatten class) and
/// the ratio on seeded random and structured candidates.
pub fn multiplier_norm_lower(
    kernel: &SchurKernel,
    p: PNorm,
    trials: usize,
    seed: u64,
) -> LowerBound {
    let n = kernel.dim();
    let mut best_i = 0;
    let mut best_j = 0;
    let mut best = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let v = kernel.entries[(i, j)].norm();
            if v > best {
                best = v;
                best_i = i;
                best_j = j;
            }
        }
    }
    let mut out = LowerBound { value: best, witness: Witness::Entry(best_i, best_j) };

    let consider = |x: &CMat, out: &mut LowerBound| {
        let denom = schatten_norm(x, p);
        if denom <= 1e-300 {
            return;
        }
        let ratio = schatten_norm(&kernel.entries.hadamard(x).unwrap(), p) / denom;
        if ratio > out.value {
            out.value = ratio;
            out.witness = Witness::Matrix(Box::new(x.clone()));
        }
    };

    let ones = CMat::from_fn(n, |_, _| Complex64::new(1.0, 0.0)).unwrap();
    consider(&ones, &mut out);

    let candidates = crate::exec::map_trials(trials, |k| {
        let mut rng = crate::sampling::trial_rng(seed, k as u64);
        if k % 4 == 3 {
            // rank-one sign pattern
            use rand::Rng;
            let s: Vec<f64> = (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
            let t: Vec<f64> = (0..n).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
            CMat::from_fn(n, |i, j| Complex64::new(s[i] * t[j], 0.0)).unwrap()
        } else {
            crate::sampling::gaussian_matrix(&mut rng, n)
        }
    });
    for x in &candidates {
        consider(x, &mut out);
    }
    out
}

/// Exact multiplier norm on `S_2`: the matrix units are an orthonormal basis
/// of eigenvectors, so the norm is the largest entry modulus.
pub fn multiplier_norm_s2(kernel: &SchurKernel) -> f64 {
    kernel.sup_abs()
}

/// How a cb upper bound was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpperMethod {
    FourierL1,
    Sdp,
    Composition,
}

/// Hilbert-space factorization extracted from a feasible Gram matrix.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub xi: Vec<Vec<Complex64>>,
    pub eta: Vec<Vec<Complex64>>,
    /// `max_i ||xi_i|| * max_j ||eta_j||`.
    pub max_product: f64,
    /// `max_ij |<xi_i, eta_j> - phi_ij|`.
    pub reconstruction_error: f64,
}

/// Two-sided cb-norm certificate.
#[derive(Clone, Debug)]
pub struct NormCertificate {
    pub lower: f64,
    pub upper: f64,
    pub lower_witness: Witness,
    pub upper_method: UpperMethod,
    pub factorization: Option<Factorization>,
    /// False when the feasibility search hit its iteration cap and the
    /// bracket was left wider than requested. The bounds remain valid.
    pub converged: bool,
}

/// Knobs of the PSD-completion bisection.
#[derive(Clone, Copy, Debug)]
pub struct SdpParams {
    /// Absolute bracket width at which the bisection stops.
    pub bisection_tol: f64,
    /// Frobenius residual at which a completion counts as feasible.
    pub feas_residual: f64,
    /// Iteration cap per feasibility run.
    pub max_iter: usize,
    /// Stop refining once the certified upper bound falls below this value
    /// (the caller's assertion is already settled).
    pub stop_below: Option<f64>,
    /// Dimension cost guard.
    pub dim_guard: usize,
}

impl Default for SdpParams {
    fn default() -> Self {
        SdpParams {
            bisection_tol: tol::SDP_BISECTION_TOL,
            feas_residual: tol::SDP_FEAS_RESIDUAL,
            max_iter: tol::SDP_MAX_ITER,
            stop_below: None,
            dim_guard: 32,
        }
    }
}

/// Certifies `cb(phi)` from both sides.
///
/// Upper bound: bisection on `t` over feasibility of the PSD completion,
/// decided by alternating projections (PSD cone via eigenvalue clipping,
/// affine/box set via direct assignment) with periodic extrapolation and
/// restart. Positive semidefinite kernels short-circuit: the completion
/// `[[Phi, Phi], [Phi, Phi]]` is feasible at `t = max diag`, which matches
/// the entry lower bound exactly.
///
/// The returned upper bound always comes from a verified factorization, so
/// a feasibility run that hits its iteration cap widens the bracket but
/// never produces a false certificate.
pub fn cb_norm_sdp(kernel: &SchurKernel, params: &SdpParams) -> Result<NormCertificate> {
    let n = kernel.dim();
    if n > params.dim_guard {
        return Err(Error::SdpTooLarge(n, params.dim_guard));
    }
    let sup = kernel.sup_abs();
    let lower_entry = multiplier_norm_lower(kernel, PNorm::Infinity, 0, 0);
    if sup == 0.0 {
        return Ok(NormCertificate {
            lower: 0.0,
            upper: 0.0,
            lower_witness: Witness::Entry(0, 0),
            upper_method: UpperMethod::Sdp,
            factorization: Some(Factorization {
                xi: vec![vec![]; n],
                eta: vec![vec![]; n],
                max_product: 0.0,
                reconstruction_error: 0.0,
            }),
            converged: true,
        });
    }

    let phi = &kernel.entries;

    // PSD shortcut: for a positive semidefinite kernel the cb norm is the
    // largest diagonal entry.
    if phi.hermiticity_defect() <= 1e-12 * sup {
        let e = eigh(phi)?;
        if e.values[0] >= -1e-9 * sup {
            let gram = psd_doubling_gram(phi, &e.values, &e.vectors);
            let fact = extract_factorization(phi, &gram);
            let upper = fact.max_product + n as f64 * fact.reconstruction_error;
            return Ok(NormCertificate {
                lower: lower_entry.value,
                upper,
                lower_witness: lower_entry.witness,
                upper_method: UpperMethod::Sdp,
                factorization: Some(fact),
                converged: true,
            });
        }
    }

    // Bisection bracket. Lower end: the largest entry modulus. Upper end:
    // the explicit Gram [[tI, Phi], [Phi*, tI]] is feasible at t = ||Phi||_op,
    // and the Schur-complement completions (A = tI, B = Phi* Phi / t, and its
    // transpose) are feasible at the largest column/row l2 norm.
    let op_norm = schatten_norm(phi, PNorm::Infinity);
    let mut col_max = 0.0f64;
    let mut row_max = 0.0f64;
    for j in 0..n {
        let mut col = 0.0;
        let mut row = 0.0;
        for i in 0..n {
            col += phi[(i, j)].norm_sqr();
            row += phi[(j, i)].norm_sqr();
        }
        col_max = col_max.max(col.sqrt());
        row_max = row_max.max(row.sqrt());
    }
    let mut t_lo = sup;
    let mut t_hi = op_norm.min(col_max).min(row_max).max(sup);
    let mut best_gram = if op_norm <= col_max.min(row_max) {
        explicit_gram(phi, t_hi)
    } else if col_max <= row_max {
        schur_complement_gram(phi, t_hi, false)
    } else {
        schur_complement_gram(phi, t_hi, true)
    };
    let mut converged = true;
    while t_hi - t_lo > params.bisection_tol {
        if let Some(stop) = params.stop_below {
            if t_hi <= stop {
                break;
            }
        }
        let t = 0.5 * (t_lo + t_hi);
        let (feasible, gram, _res, hit_cap) =
            ap_feasible(phi, t, &best_gram, params.feas_residual, params.max_iter);
        if feasible {
            t_hi = t;
            best_gram = gram;
        } else {
            t_lo = t;
            if hit_cap {
                converged = false;
            }
        }
    }

    let fact = extract_factorization(phi, &best_gram);
    let upper = if fact.reconstruction_error <= tol::FACTORIZATION_TOL {
        (fact.max_product + n as f64 * fact.reconstruction_error).min(t_hi.max(fact.max_product))
    } else {
        // should not happen for a feasible Gram; fall back to the crude bound
        n as f64 * sup
    };
    let factorization = if fact.reconstruction_error <= tol::FACTORIZATION_TOL {
        Some(fact)
    } else {
        None
    };
    Ok(NormCertificate {
        lower: lower_entry.value,
        upper,
        lower_witness: lower_entry.witness,
        upper_method: UpperMethod::Sdp,
        factorization,
        converged,
    })
}

/// `[[t I, Phi], [Phi*, t I]]`, positive semidefinite whenever
/// `||Phi||_op <= t`.
fn explicit_gram(phi: &CMat, t: f64) -> CMat {
    let n = phi.dim();
    let mut g = CMat::zeros(2 * n);
    for i in 0..n {
        g[(i, i)] = Complex64::new(t, 0.0);
        g[(n + i, n + i)] = Complex64::new(t, 0.0);
        for j in 0..n {
            g[(i, n + j)] = phi[(i, j)];
            g[(n + j, i)] = phi[(i, j)].conj();
        }
    }
    g
}

/// `[[t I, Phi], [Phi*, Phi* Phi / t]]` (or its transpose variant), a PSD
/// completion whose second diagonal stays below `t` whenever the largest
/// column (row) l2 norm does.
fn schur_complement_gram(phi: &CMat, t: f64, by_rows: bool) -> CMat {
    let n = phi.dim();
    let mut g = CMat::zeros(2 * n);
    let gram = if by_rows {
        phi * &phi.adjoint()
    } else {
        &phi.adjoint() * phi
    };
    for i in 0..n {
        for j in 0..n {
            g[(i, n + j)] = phi[(i, j)];
            g[(n + j, i)] = phi[(i, j)].conj();
            if by_rows {
                g[(i, j)] = gram[(i, j)] / t;
            } else {
                g[(n + i, n + j)] = gram[(i, j)] / t;
            }
        }
    }
    for i in 0..n {
        if by_rows {
            g[(n + i, n + i)] = Complex64::new(t, 0.0);
        } else {
            g[(i, i)] = Complex64::new(t, 0.0);
        }
    }
    g
}

/// `[[Phi, Phi], [Phi, Phi]]` with small negative eigenvalues clipped; the
/// feasible completion of a PSD kernel at `t = max diag`.
fn psd_doubling_gram(phi: &CMat, values: &[f64], vectors: &CMat) -> CMat {
    let n = phi.dim();
    let clipped: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
    let d = CMat::diag_real(&clipped);
    let pos = &(vectors * &d) * &vectors.adjoint();
    let mut g = CMat::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = pos[(i, j)];
            g[(i, n + j)] = pos[(i, j)];
            g[(n + i, j)] = pos[(i, j)];
            g[(n + i, n + j)] = pos[(i, j)];
        }
    }
    g
}

/// Projection onto the affine/box set: off-diagonal block pinned to `Phi`,
/// diagonal entries clipped to `t`, Hermitian structure restored.
fn project_affine(g: &CMat, phi: &CMat, t: f64) -> CMat {
    let n = phi.dim();
    let mut y = CMat::zeros(2 * n);
    // Hermitize the free diagonal blocks
    for i in 0..n {
        for j in 0..n {
            let a = (g[(i, j)] + g[(j, i)].conj()) * 0.5;
            y[(i, j)] = a;
            let b = (g[(n + i, n + j)] + g[(n + j, n + i)].conj()) * 0.5;
            y[(n + i, n + j)] = b;
        }
    }
    for i in 0..n {
        y[(i, i)] = Complex64::new(y[(i, i)].re.min(t), 0.0);
        y[(n + i, n + i)] = Complex64::new(y[(n + i, n + i)].re.min(t), 0.0);
        for j in 0..n {
            y[(i, n + j)] = phi[(i, j)];
            y[(n + j, i)] = phi[(i, j)].conj();
        }
    }
    y
}

/// Projection onto the PSD cone by eigenvalue clipping.
fn project_psd(y: &CMat) -> CMat {
    let e = eigh(y).expect("affine projection output is Hermitian");
    let clipped: Vec<f64> = e.values.iter().map(|v| v.max(0.0)).collect();
    let d = CMat::diag_real(&clipped);
    &(&e.vectors * &d) * &e.vectors.adjoint()
}

/// One feasibility decision, built from the two projections (affine/box by
/// direct assignment, PSD cone by eigenvalue clipping). The plain
/// alternating-projection step is accelerated by averaged alternating
/// reflections: with `a = P_affine(z)` and `b = P_psd(2a - z)`, the update
/// `z += b - a` drives `||b - a||` to zero exactly when the sets intersect,
/// and to the positive gap between them otherwise, which is the
/// infeasibility signal.
///
/// Returns `(feasible, PSD iterate, residual, hit_iteration_cap)`; the PSD
/// iterate `b` violates the affine constraints by at most the residual.
fn ap_feasible(
    phi: &CMat,
    t: f64,
    start: &CMat,
    residual_target: f64,
    max_iter: usize,
) -> (bool, CMat, f64, bool) {
    let mut z = start.clone();
    let mut best = f64::INFINITY;
    let mut window_best = f64::INFINITY;
    let mut last_psd: Option<CMat> = None;
    for it in 0..max_iter {
        let a = project_affine(&z, phi, t);
        let b = project_psd(&(&a.scale_re(2.0) - &z));
        let diff = &b - &a;
        let res = diff.frobenius_norm();
        if res <= residual_target {
            return (true, b, res, false);
        }
        z = &z + &diff;
        last_psd = Some(b);
        best = best.min(res);
        window_best = window_best.min(res);
        // The displacement stabilizes at the inter-set gap when the
        // completion is infeasible; stop once a window brings no progress
        // and the gap is well above the target.
        if it % 256 == 255 {
            if window_best > 0.99 * best && best > 50.0 * residual_target {
                return (false, last_psd.unwrap(), best, false);
            }
            if window_best >= best {
                // no progress this window at small residual: polish with a
                // few plain alternating-projection steps, which are Fejer
                // monotone and settle the near-feasible case
                let mut g = project_affine(&z, phi, t);
                for _ in 0..64 {
                    let p = project_psd(&g);
                    let q = project_affine(&p, phi, t);
                    let r = (&p - &q).frobenius_norm();
                    if r <= residual_target {
                        return (true, p, r, false);
                    }
                    g = q;
                }
            }
            window_best = f64::INFINITY;
        }
    }
    let b = last_psd.unwrap_or_else(|| project_psd(&z));
    let res = (&b - &project_affine(&b, phi, t)).frobenius_norm();
    (res <= residual_target, b, res, true)
}

/// Splits a PSD Gram matrix into factorization vectors and measures how
/// well they reproduce the kernel.
fn extract_factorization(phi: &CMat, gram: &CMat) -> Factorization {
    let n = phi.dim();
    let e = eigh(gram).expect("gram is Hermitian");
    let m = gram.dim();
    // rows of V sqrt(Lambda^+)
    let mut rows: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); m]; m];
    for (k, v) in e.values.iter().enumerate() {
        let s = v.max(0.0).sqrt();
        for (i, row) in rows.iter_mut().enumerate() {
            row[k] = e.vectors[(i, k)] * s;
        }
    }
    let xi: Vec<Vec<Complex64>> = rows[0..n].to_vec();
    let eta: Vec<Vec<Complex64>> = rows[n..2 * n].to_vec();
    let norm = |v: &Vec<Complex64>| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let max_xi = xi.iter().map(norm).fold(0.0, f64::max);
    let max_eta = eta.iter().map(norm).fold(0.0, f64::max);
    let mut err = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let ip: Complex64 = xi[i]
                .iter()
                .zip(&eta[j])
                .map(|(a, b)| a * b.conj())
                .sum();
            err = err.max((ip - phi[(i, j)]).norm());
        }
    }
    Factorization { xi, eta, max_product: max_xi * max_eta, reconstruction_error: err }
}

/// Fourier upper bound: for any points, the kernel `(f(s_i - s_j))` has
/// `cb <= ||fhat||_1` (total variation of the transform measure). Returns
/// the kernel together with the certified bound.
pub fn cb_upper_fourier(f: &KernelFunction, points: &[f64]) -> Result<(SchurKernel, L1Norm)> {
    let l1 = crate::fourier::l1_norm_ft(f)?;
    let kernel = kernel_from_function(f, points)?;
    Ok((kernel, l1))
}

/// Positive-definiteness report for `(f(|s_i - s_j|))`.
pub struct PsdReport {
    pub min_eigenvalue: f64,
    pub threshold: f64,
    pub psd: bool,
}

/// For `f` convex and nonincreasing on the positive axis (checked on a
/// grid), the kernel `(f(|s_i - s_j|))` is positive semidefinite.
pub fn psd_kernel_check(f: &KernelFunction, points: &[f64]) -> Result<PsdReport> {
    if !f.grid_convex_nonincreasing(40.0, 2000) {
        return Err(Error::Invalid(
            "kernel function is not convex nonincreasing on the sampled grid".into(),
        ));
    }
    let n = points.len();
    let k = CMat::from_fn(n, |i, j| {
        Complex64::new(f.eval((points[i] - points[j]).abs()), 0.0)
    })?;
    let e = eigh(&k)?;
    let threshold = -1e-9 * f.eval(0.0);
    Ok(PsdReport { min_eigenvalue: e.values[0], threshold, psd: e.values[0] >= threshold })
}

/// Outcome of one blockwise transference trial.
pub struct TransferenceReport {
    /// `|| (phi_ij x_ij) ||_p` on the block matrix.
    pub lhs: f64,
    /// `cb_upper * || (x_ij) ||_p`.
    pub rhs: f64,
    pub ratio: f64,
    pub ok: bool,
}

/// Applies the scalar kernel blockwise to an `n x n` array of `m x m`
/// blocks and checks the norm inequality against a cb upper bound.
pub fn transference_check(
    kernel: &SchurKernel,
    blocks: &[Vec<CMat>],
    p: PNorm,
    cb_upper: f64,
) -> Result<TransferenceReport> {
    let n = kernel.dim();
    if blocks.len() != n || blocks.iter().any(|row| row.len() != n) {
        return Err(Error::DimMismatch(blocks.len(), n));
    }
    let m = blocks[0][0].dim();
    if n * m > 128 {
        return Err(Error::Invalid(format!(
            "block matrix dimension {} exceeds the guard 128",
            n * m
        )));
    }
    let big = CMat::from_fn(n * m, |r, c| blocks[r / m][c / m][(r % m, c % m)])?;
    let multiplied = CMat::from_fn(n * m, |r, c| {
        kernel.entries[(r / m, c / m)] * blocks[r / m][c / m][(r % m, c % m)]
    })?;
    let lhs = schatten_norm(&multiplied, p);
    let base = schatten_norm(&big, p);
    let rhs = cb_upper * base;
    let ratio = if base > 0.0 { lhs / base } else { 0.0 };
    Ok(TransferenceReport { lhs, rhs, ratio, ok: lhs <= rhs + tol::CERT_SLACK * base.max(1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{gaussian_matrix, trial_rng};
    use crate::Error;

    #[test]
    fn min_over_max_formula() {
        let k = build_kernel(&KernelFamily::MinOverMax { lambda: vec![1.0, 2.0] }).unwrap();
        let expect = [[1.0, 0.5], [0.5, 1.0]];
        for (i, row) in expect.iter().enumerate() {
            for (j, want) in row.iter().enumerate() {
                assert!((k.entries()[(i, j)].re - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn sum_pow_equal_lambdas() {
        let k = build_kernel(&KernelFamily::SumPowOverMaxPow {
            lambda: vec![3.0, 3.0],
            theta: 0.5,
        })
        .unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((k.entries()[(i, j)].re - 2f64.sqrt()).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn opposite_sign_entry() {
        // lambda_i = i, mu_i = 1/i, theta = 1/2: entry (i, j) = (i+j)^2/(4ij)
        let lambda: Vec<f64> = (1..=4).map(|i| i as f64).collect();
        let mu: Vec<f64> = (1..=4).map(|i| 1.0 / i as f64).collect();
        let k = build_kernel(&KernelFamily::OppositeSign { lambda, mu, theta: 0.5 }).unwrap();
        assert!((k.entries()[(0, 3)].re - 25.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn monotonicity_is_enforced() {
        let r = build_kernel(&KernelFamily::TwoWeightMean {
            lambda: vec![2.0, 1.0],
            mu: vec![1.0, 2.0],
            theta: 0.5,
        });
        assert!(matches!(r, Err(Error::NotNondecreasingSequence(_))));
    }

    #[test]
    fn geo_mean_rejects_endpoint_theta() {
        let r = build_kernel(&KernelFamily::GeoMeanOverSum { lambda: vec![1.0, 2.0], theta: 0.0 });
        assert!(matches!(r, Err(Error::ThetaOutOfRange(..))));
        // endpoints allowed for the power families
        assert!(build_kernel(&KernelFamily::MaxPowOverSumPow { lambda: vec![1.0, 2.0], theta: 0.0 })
            .is_ok());
        assert!(build_kernel(&KernelFamily::MaxPowOverSumPow { lambda: vec![1.0, 2.0], theta: 1.0 })
            .is_ok());
    }

    #[test]
    fn apply_multiplier_basics() {
        let n = 4;
        let mut rng = trial_rng(21, 0);
        let x = gaussian_matrix(&mut rng, n);
        let ones =
            SchurKernel::from_entries(CMat::from_fn(n, |_, _| Complex64::new(1.0, 0.0)).unwrap())
                .unwrap();
        assert!((&apply_multiplier(&ones, &x).unwrap() - &x).max_abs() < 1e-15);
        let e11 = SchurKernel::from_entries(CMat::unit(n, 0, 0)).unwrap();
        let projected = apply_multiplier(&e11, &x).unwrap();
        assert_eq!(projected[(0, 0)], x[(0, 0)]);
        assert_eq!(projected[(1, 2)], Complex64::new(0.0, 0.0));
        // linearity
        let y = gaussian_matrix(&mut rng, n);
        let k = build_kernel(&KernelFamily::MinOverMax { lambda: vec![1.0, 2.0, 3.0, 4.0] }).unwrap();
        let lhs = apply_multiplier(&k, &(&x + &y)).unwrap();
        let rhs = &apply_multiplier(&k, &x).unwrap() + &apply_multiplier(&k, &y).unwrap();
        assert!((&lhs - &rhs).max_abs() < 1e-12);
    }

    #[test]
    fn s2_norm_is_sup_entry() {
        let k = build_kernel(&KernelFamily::MinOverMax { lambda: vec![1.0, 3.0] }).unwrap();
        assert!((multiplier_norm_s2(&k) - 1.0).abs() < 1e-15);
        let z = SchurKernel::from_entries(CMat::zeros(3)).unwrap();
        assert_eq!(multiplier_norm_s2(&z), 0.0);
        // agreement with the empirical lower bound at p = 2
        let mut rng = trial_rng(22, 0);
        let lam: Vec<f64> = (0..5).map(|_| crate::sampling::positive_sequence(&mut rng, 1, 50.0)[0]).collect();
        let k = build_kernel(&KernelFamily::MaxPowOverSumPow { lambda: lam, theta: 0.7 }).unwrap();
        let lb = multiplier_norm_lower(&k, PNorm::two(), 60, 7);
        assert!(lb.value <= multiplier_norm_s2(&k) + 1e-9);
        assert!(lb.value >= multiplier_norm_s2(&k) - 1e-9);
    }

    #[test]
    fn all_ones_lower_bound() {
        let n = 5;
        let ones =
            SchurKernel::from_entries(CMat::from_fn(n, |_, _| Complex64::new(1.0, 0.0)).unwrap())
                .unwrap();
        let lb = multiplier_norm_lower(&ones, PNorm::Infinity, 20, 3);
        assert!((lb.value - 1.0).abs() < 1e-9, "value {}", lb.value);
    }

    #[test]
    fn psd_kernel_cb_is_max_diag() {
        let k = SchurKernel::from_entries(
            CMat::from_rows(&[
                vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)],
                vec![Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        let cert = cb_norm_sdp(&k, &SdpParams::default()).unwrap();
        assert!((cert.upper - 1.0).abs() < 1e-8, "upper {}", cert.upper);
        assert!((cert.lower - 1.0).abs() < 1e-12);
        let f = cert.factorization.unwrap();
        assert!(f.reconstruction_error < 1e-8);
    }

    #[test]
    fn all_ones_cb_is_one() {
        let n = 6;
        let ones =
            SchurKernel::from_entries(CMat::from_fn(n, |_, _| Complex64::new(1.0, 0.0)).unwrap())
                .unwrap();
        let cert = cb_norm_sdp(&ones, &SdpParams::default()).unwrap();
        assert!((cert.upper - 1.0).abs() < 1e-8);
    }

    #[test]
    fn antidiagonal_kernel_cb_is_one() {
        // [[b, 1], [1, b]] has cb norm exactly 1 for 0 <= b <= 1 (mixture of
        // the ones kernel and the diagonal-sign conjugation), but it is not
        // PSD, so this exercises the bisection path.
        let k = SchurKernel::from_entries(
            CMat::from_rows(&[
                vec![Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0)],
                vec![Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        let cert = cb_norm_sdp(&k, &SdpParams::default()).unwrap();
        assert!(cert.lower >= 1.0 - 1e-12);
        assert!(cert.upper <= 1.05, "upper {}", cert.upper);
        assert!(cert.upper >= cert.lower - 1e-9);
    }

    #[test]
    fn certificate_invariants_on_random_family() {
        let mut rng = trial_rng(23, 0);
        let lambda = crate::sampling::positive_sequence(&mut rng, 6, 100.0);
        let k = build_kernel(&KernelFamily::MaxPowOverSumPow { lambda, theta: 0.6 }).unwrap();
        let cert = cb_norm_sdp(&k, &SdpParams::default()).unwrap();
        assert!(cert.lower <= cert.upper + 1e-9);
        if let Some(f) = &cert.factorization {
            assert!(f.reconstruction_error <= 1e-6);
            assert!(f.max_product <= cert.upper + 1e-6);
        }
        // claimed bound from the corollary
        assert!(cert.upper <= 2.0 - 2f64.powf(-0.6) + 1e-6, "upper {}", cert.upper);
    }

    #[test]
    fn transference_trivial_cases() {
        let n = 3;
        let k = build_kernel(&KernelFamily::MinOverMax { lambda: vec![1.0, 2.0, 5.0] }).unwrap();
        // m = 1 reduces to apply_multiplier
        let mut rng = trial_rng(24, 0);
        let x = gaussian_matrix(&mut rng, n);
        let blocks: Vec<Vec<CMat>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut b = CMat::zeros(1);
                        b[(0, 0)] = x[(i, j)];
                        b
                    })
                    .collect()
            })
            .collect();
        let rep = transference_check(&k, &blocks, PNorm::Infinity, 1.0).unwrap();
        let direct = schatten_norm(&apply_multiplier(&k, &x).unwrap(), PNorm::Infinity);
        assert!((rep.lhs - direct).abs() < 1e-10);
        assert!(rep.ok);
    }

    #[test]
    fn dimension_guards_and_mismatches() {
        let mut rng = trial_rng(27, 0);
        let lambda = crate::sampling::positive_sequence(&mut rng, 3, 10.0);
        let k = build_kernel(&KernelFamily::MinOverMax { lambda }).unwrap();
        let x = gaussian_matrix(&mut rng, 4);
        assert!(matches!(apply_multiplier(&k, &x), Err(Error::DimMismatch(..))));
        let big = crate::sampling::positive_sequence(&mut rng, 40, 10.0);
        let kb = build_kernel(&KernelFamily::MinOverMax { lambda: big }).unwrap();
        assert!(matches!(
            cb_norm_sdp(&kb, &SdpParams::default()),
            Err(Error::SdpTooLarge(40, 32))
        ));
    }

    #[test]
    fn transference_all_ones_is_exact() {
        let n = 3;
        let ones = SchurKernel::from_entries(
            CMat::from_fn(n, |_, _| Complex64::new(1.0, 0.0)).unwrap(),
        )
        .unwrap();
        let mut rng = trial_rng(28, 0);
        let blocks: Vec<Vec<CMat>> =
            (0..n).map(|_| (0..n).map(|_| gaussian_matrix(&mut rng, 2)).collect()).collect();
        let rep = transference_check(&ones, &blocks, PNorm::Infinity, 1.0).unwrap();
        assert!((rep.ratio - 1.0).abs() < 1e-12);
        assert!(rep.ok);
    }

    #[test]
    fn psd_check_exponential_kernel() {
        let points: Vec<f64> = vec![-1.3, 0.0, 0.4, 2.2, 5.0];
        let rep = psd_kernel_check(&KernelFunction::ExpDecay, &points).unwrap();
        assert!(rep.psd, "min eigenvalue {}", rep.min_eigenvalue);
        let rep2 = psd_kernel_check(&KernelFunction::OneMinusInvSumPow(0.7), &points).unwrap();
        assert!(rep2.psd);
        let rep3 = psd_kernel_check(&KernelFunction::ExpDecay, &[0.7]).unwrap();
        assert!(rep3.psd);
    }

    #[test]
    fn submultiplicative_composition() {
        let mut rng = trial_rng(25, 0);
        for trial in 0..5 {
            let lambda = crate::sampling::positive_sequence(&mut rng, 4, 60.0);
            let mu = crate::sampling::positive_sequence(&mut rng, 4, 60.0);
            let a = build_kernel(&KernelFamily::MaxPowOverSumPow { lambda, theta: 0.4 }).unwrap();
            let b = build_kernel(&KernelFamily::MinOverMax { lambda: mu }).unwrap();
            let ab = a.compose(&b).unwrap();
            let ca = cb_norm_sdp(&a, &SdpParams::default()).unwrap();
            let cb_ = cb_norm_sdp(&b, &SdpParams::default()).unwrap();
            let cab = cb_norm_sdp(&ab, &SdpParams::default()).unwrap();
            assert!(
                cab.lower <= ca.upper * cb_.upper + 1e-6,
                "trial {trial}: {} > {} * {}",
                cab.lower,
                ca.upper,
                cb_.upper
            );
        }
    }

    #[test]
    fn principal_submatrix_monotone() {
        let mut rng = trial_rng(26, 0);
        let lambda = crate::sampling::positive_sequence(&mut rng, 6, 40.0);
        let k = build_kernel(&KernelFamily::MaxPowOverSumPow { lambda, theta: 0.8 }).unwrap();
        let sub = k.principal_submatrix(&[0, 2, 5]);
        let full = cb_norm_sdp(&k, &SdpParams::default()).unwrap();
        let part = cb_norm_sdp(&sub, &SdpParams::default()).unwrap();
        assert!(part.lower <= full.upper + 1e-6);
    }
}
