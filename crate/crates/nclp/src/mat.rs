//! Dense complex matrices and Hermitian spectral decomposition.
//!
//! [`CMat`] is a plain row-major `n x n` complex matrix. Construction from
//! external data rejects non-finite entries; arithmetic assumes (and
//! preserves) finiteness. The eigen/singular decompositions are bridged to
//! nalgebra, which handles `Complex<f64>` Hermitian problems at machine
//! precision; everything else is implemented directly.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{tol, Error, Result};

pub type C64 = Complex64;

/// Dense square complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for CMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CMat {}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat { n, data: vec![C64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Scalar multiple of the identity.
    pub fn scalar(n: usize, c: C64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = c;
        }
        m
    }

    /// Matrix unit `e_ij` (1 in row `i`, column `j`).
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        assert!(i < n && j < n);
        let mut m = Self::zeros(n);
        m[(i, j)] = C64::new(1.0, 0.0);
        m
    }

    /// Builds a matrix entry by entry, rejecting non-finite values.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let z = f(i, j);
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite(i, j));
                }
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        for r in rows {
            if r.len() != n {
                return Err(Error::DimMismatch(r.len(), n));
            }
        }
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn diag(values: &[C64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = values[i];
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(values[i], 0.0);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self[(j, i)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m[(i, j)] = self[(j, i)];
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, c: C64) -> Self {
        CMat { n: self.n, data: self.data.iter().map(|z| z * c) .collect() }
    }

    pub fn scale_re(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// Entrywise (Hadamard) product.
    pub fn hadamard(&self, other: &CMat) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimMismatch(self.n, other.n));
        }
        Ok(CMat {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a * b).collect(),
        })
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        CMat { n: self.n, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max_ij |a_ij - conj(a_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }

    pub fn is_hermitian(&self, rel_tol: f64) -> bool {
        self.hermiticity_defect() <= rel_tol * self.max_abs().max(1e-300)
    }

    /// True when the imaginary part of every entry is negligible.
    pub fn is_real(&self, abs_tol: f64) -> bool {
        self.data.iter().all(|z| z.im.abs() <= abs_tol)
    }

    fn to_na(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self[(i, j)])
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl std::ops::Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix addition");
        CMat {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl std::ops::Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix subtraction");
        CMat {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl std::ops::Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        assert_eq!(self.n, rhs.n, "dimension mismatch in matrix product");
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

/// Ascending Hermitian eigendecomposition `h = U diag(values) U*`.
pub struct Eigh {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the corresponding eigenvectors.
    pub vectors: CMat,
}

/// Cyclic complex Jacobi diagonalization of the Hermitian matrix `a`,
/// accumulating the rotations into `v`. Quadratically convergent and
/// accurate on clustered spectra.
fn jacobi_hermitian(a: &mut CMat, v: &mut CMat, off_target: f64, max_sweeps: usize) {
    let n = a.dim();
    for _ in 0..max_sweeps {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(a[(p, q)].norm());
            }
        }
        if off <= off_target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = a[(p, q)];
                let gn = g.norm();
                if gn <= off_target * 1e-2 {
                    continue;
                }
                let alpha = a[(p, p)].re;
                let beta = a[(q, q)].re;
                let u = g / gn;
                let tau = (beta - alpha) / (2.0 * gn);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sigma = u * (t * c);
                // right-multiply a and v by the rotation
                for i in 0..n {
                    let vip = a[(i, p)];
                    let viq = a[(i, q)];
                    a[(i, p)] = vip * c - viq * sigma.conj();
                    a[(i, q)] = vip * sigma + viq * c;
                    let wip = v[(i, p)];
                    let wiq = v[(i, q)];
                    v[(i, p)] = wip * c - wiq * sigma.conj();
                    v[(i, q)] = wip * sigma + wiq * c;
                }
                // left-multiply a by the adjoint rotation
                for j in 0..n {
                    let vpj = a[(p, j)];
                    let vqj = a[(q, j)];
                    a[(p, j)] = vpj * c - vqj * sigma;
                    a[(q, j)] = vpj * sigma.conj() + vqj * c;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
    }
}

/// Spectral decomposition of a Hermitian matrix.
///
/// Rejects inputs whose Hermiticity defect exceeds `1e-10` relative to the
/// largest entry; the reconstruction `U diag(v) U*` matches the (Hermitized)
/// input to `1e-10 * ||h||` per entry. The fast path is verified against
/// that contract and repaired by Jacobi rotations when it falls short
/// (which happens on strongly clustered spectra).
pub fn eigh(h: &CMat) -> Result<Eigh> {
    let defect = h.hermiticity_defect();
    let scale = h.max_abs().max(1e-300);
    if defect > tol::HERMITICITY_REL * scale {
        return Err(Error::NotHermitian { defect, allowed: tol::HERMITICITY_REL * scale });
    }
    let n = h.dim();
    // Work on the Hermitized matrix so downstream residuals are clean.
    let mut herm = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            herm[(i, j)] = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
        }
    }
    let eig = herm.to_na().symmetric_eigen();
    let mut values: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    let mut vectors = CMat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            vectors[(i, j)] = eig.eigenvectors[(i, j)];
        }
    }

    // Verify the residual contract.
    let recon = &(&vectors * &CMat::diag_real(&values)) * &vectors.adjoint();
    let resid = (&recon - &herm).max_abs();
    if resid > 1e-12 * scale {
        let unitarity = (&(&vectors.adjoint() * &vectors) - &CMat::identity(n)).max_abs();
        let mut a;
        if unitarity <= 1e-10 {
            // basis is fine, eigenvalue split is not: polish from the
            // near-diagonal similarity
            a = &(&vectors.adjoint() * &herm) * &vectors;
        } else {
            a = herm.clone();
            vectors = CMat::identity(n);
        }
        jacobi_hermitian(&mut a, &mut vectors, 1e-15 * scale, 60);
        for k in 0..n {
            values[k] = a[(k, k)].re;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let sorted_values: Vec<f64> = order.iter().map(|&k| values[k]).collect();
    let mut sorted_vectors = CMat::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            sorted_vectors[(i, col)] = vectors[(i, k)];
        }
    }
    Ok(Eigh { values: sorted_values, vectors: sorted_vectors })
}

/// Singular values in descending order.
///
/// The fast path is cross-checked against the Frobenius identity
/// `sum s_k^2 = ||x||_F^2`; a mismatch reroutes through the verified
/// decomposition.
pub fn singular_values(x: &CMat) -> Vec<f64> {
    let dec = x.to_na().svd(false, false);
    let mut s: Vec<f64> = dec.singular_values.iter().cloned().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let fro2 = x.data.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let sum2 = s.iter().map(|v| v * v).sum::<f64>();
    if (sum2 - fro2).abs() > 1e-10 * fro2.max(1e-300) {
        return svd(x).s;
    }
    s
}

/// Full singular value decomposition `x = u diag(s) v_adj`.
pub struct Svd {
    pub u: CMat,
    /// Descending singular values.
    pub s: Vec<f64>,
    pub v_adj: CMat,
}

/// Verified SVD: the fast path must reconstruct the input to `1e-11 ||x||`
/// per entry with near-unitary factors, otherwise the decomposition is
/// recomputed by one-sided Jacobi orthogonalization.
pub fn svd(x: &CMat) -> Svd {
    let n = x.dim();
    let dec = x.to_na().svd(true, true);
    let u = dec.u.expect("left singular vectors requested");
    let v_t = dec.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dec.singular_values[b].partial_cmp(&dec.singular_values[a]).unwrap());
    let s: Vec<f64> = order.iter().map(|&k| dec.singular_values[k]).collect();
    let mut u_out = CMat::zeros(n);
    let mut v_out = CMat::zeros(n);
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            u_out[(i, col)] = u[(i, k)];
            v_out[(col, i)] = v_t[(k, i)];
        }
    }
    let attempt = Svd { u: u_out, s, v_adj: v_out };
    let scale = x.max_abs().max(1e-300);
    let resid = (&attempt.reconstruct() - x).max_abs();
    if resid <= 1e-11 * scale {
        let uu = (&(&attempt.u.adjoint() * &attempt.u) - &CMat::identity(n)).max_abs();
        let vv = (&(&attempt.v_adj * &attempt.v_adj.adjoint()) - &CMat::identity(n)).max_abs();
        if uu <= 1e-10 && vv <= 1e-10 {
            return attempt;
        }
    }
    hestenes_svd(x)
}

/// One-sided Jacobi SVD: rotate column pairs of `w = x v` until they are
/// mutually orthogonal; the column norms are the singular values. Slower
/// than the bidiagonalization path but accurate on clustered spectra.
fn hestenes_svd(x: &CMat) -> Svd {
    let n = x.dim();
    let mut w = x.clone();
    let mut v = CMat::identity(n);
    let scale2: f64 = x.data.iter().map(|z| z.norm_sqr()).sum::<f64>().max(1e-300);
    let col_dot = |m: &CMat, p: usize, q: usize| -> C64 {
        (0..n).map(|i| m[(i, p)].conj() * m[(i, q)]).sum()
    };
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let hpq = col_dot(&w, p, q);
                let hpp = col_dot(&w, p, p).re;
                let hqq = col_dot(&w, q, q).re;
                if hpq.norm() <= 1e-15 * scale2 {
                    continue;
                }
                rotated = true;
                let gn = hpq.norm();
                let u_phase = hpq / gn;
                let tau = (hqq - hpp) / (2.0 * gn);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sigma = u_phase * (t * c);
                for i in 0..n {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = wp * c - wq * sigma.conj();
                    w[(i, q)] = wp * sigma + wq * c;
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * c - vq * sigma.conj();
                    v[(i, q)] = vp * sigma + vq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|k| col_dot(&w, k, k).re.max(0.0).sqrt()).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());
    let s: Vec<f64> = order.iter().map(|&k| norms[k]).collect();
    let mut u = CMat::zeros(n);
    let mut v_adj = CMat::zeros(n);
    // columns with negligible singular value are completed to an
    // orthonormal basis from the standard vectors
    let mut used = Vec::new();
    for (col, &k) in order.iter().enumerate() {
        if norms[k] > 1e-150 {
            for i in 0..n {
                u[(i, col)] = w[(i, k)] / norms[k];
            }
        } else {
            let mut cand = vec![C64::new(0.0, 0.0); n];
            'basis: for b in 0..n {
                let mut e = vec![C64::new(0.0, 0.0); n];
                e[b] = C64::new(1.0, 0.0);
                for &prev in &used {
                    let proj: C64 = (0..n).map(|i| u[(i, prev)].conj() * e[i]).sum();
                    for (i, z) in e.iter_mut().enumerate() {
                        *z -= proj * u[(i, prev)];
                    }
                }
                let nrm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if nrm > 0.5 {
                    for (i, z) in e.iter().enumerate() {
                        cand[i] = z / nrm;
                    }
                    break 'basis;
                }
            }
            for (i, z) in cand.iter().enumerate() {
                u[(i, col)] = *z;
            }
        }
        used.push(col);
        for i in 0..n {
            v_adj[(col, i)] = v[(i, k)].conj();
        }
    }
    Svd { u, s, v_adj }
}

impl Svd {
    pub fn reconstruct(&self) -> CMat {
        let s = CMat::diag_real(&self.s);
        &(&self.u * &s) * &self.v_adj
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_hermitian(n: usize, seed: u64) -> CMat {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        let a = CMat::from_fn(n, |_, _| C64::new(next(), next())).unwrap();
        (&a + &a.adjoint()).scale_re(0.5)
    }

    #[test]
    fn eigh_diagonal_is_sorted() {
        let h = CMat::diag_real(&[2.0, 1.0]);
        let e = eigh(&h).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0]);
        // permutation eigenbasis
        assert!((e.vectors[(0, 1)].norm() - 1.0).abs() < 1e-12);
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigh_identity() {
        let e = eigh(&CMat::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn eigh_reconstruction_residual() {
        let h = sample_hermitian(5, 42);
        let e = eigh(&h).unwrap();
        let d = CMat::diag_real(&e.values);
        let recon = &(&e.vectors * &d) * &e.vectors.adjoint();
        let scale = h.max_abs();
        assert!((&recon - &h).max_abs() <= 1e-10 * scale.max(1.0));
        // eigenbasis is unitary
        let gram = &e.vectors.adjoint() * &e.vectors;
        assert!((&gram - &CMat::identity(5)).max_abs() < 1e-12);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = CMat::from_rows(&[
            vec![C64::new(1.0, 0.0), C64::new(2.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(eigh(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn from_fn_rejects_non_finite() {
        let r = CMat::from_fn(2, |i, j| {
            if i == 1 && j == 0 {
                C64::new(f64::NAN, 0.0)
            } else {
                C64::new(1.0, 0.0)
            }
        });
        assert!(matches!(r, Err(Error::NonFinite(1, 0))));
    }

    #[test]
    fn adjoint_involution() {
        let a = sample_hermitian(4, 7);
        let b = a.map(|z| z * C64::new(0.3, 1.2));
        assert_eq!(b.adjoint().adjoint(), b);
    }

    #[test]
    fn svd_reconstructs() {
        let a = sample_hermitian(4, 3).map(|z| z + C64::new(0.1, 0.2));
        let dec = svd(&a);
        assert!((&dec.reconstruct() - &a).max_abs() < 1e-12);
        assert!(dec.s.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn hestenes_path_handles_clusters_and_rank_deficiency() {
        // clustered singular values
        let a = sample_hermitian(6, 11).map(|z| z + C64::new(0.05, -0.02));
        let dec = hestenes_svd(&a);
        assert!((&dec.reconstruct() - &a).max_abs() < 1e-11 * a.max_abs());
        let uu = &dec.u.adjoint() * &dec.u;
        assert!((&uu - &CMat::identity(6)).max_abs() < 1e-11);
        let vv = &dec.v_adj * &dec.v_adj.adjoint();
        assert!((&vv - &CMat::identity(6)).max_abs() < 1e-11);
        // rank-one input: one singular value, orthonormal completion
        let mut r = CMat::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                r[(i, j)] = C64::new((i + 1) as f64 * (j as f64 - 1.0), 0.0);
            }
        }
        let dec = hestenes_svd(&r);
        assert!((&dec.reconstruct() - &r).max_abs() < 1e-12 * r.max_abs().max(1.0));
        assert!(dec.s[1] < 1e-12 && dec.s[2] < 1e-12);
        let uu = &dec.u.adjoint() * &dec.u;
        assert!((&uu - &CMat::identity(3)).max_abs() < 1e-10);
    }

    #[test]
    fn singular_values_match_gram_route() {
        for seed in 0..10u64 {
            let a = sample_hermitian(5, seed).map(|z| z * C64::new(0.4, 0.9));
            let s = singular_values(&a);
            let gram = &a.adjoint() * &a;
            let e = eigh(&gram).unwrap();
            let mut oracle: Vec<f64> = e.values.iter().map(|v| v.max(0.0).sqrt()).collect();
            oracle.reverse();
            for (x, y) in s.iter().zip(&oracle) {
                assert!((x - y).abs() <= 1e-9 * y.max(1.0));
            }
        }
    }
}
