//! Schatten p-norms, the exponent type and the trace pairing.

use num_complex::Complex64;

use crate::mat::{singular_values, svd, CMat};
use crate::{Error, Result};

/// An exponent `p` in `[1, inf]`. Infinity is an exact token, never a large
/// float, so conjugate-exponent arithmetic stays exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PNorm {
    Finite(f64),
    Infinity,
}

impl PNorm {
    /// Accepts `p` in `[1, inf]`; `f64::INFINITY` maps to the exact token.
    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        if p.is_infinite() {
            Ok(PNorm::Infinity)
        } else {
            Ok(PNorm::Finite(p))
        }
    }

    pub const fn one() -> Self {
        PNorm::Finite(1.0)
    }

    pub const fn two() -> Self {
        PNorm::Finite(2.0)
    }

    pub const fn infinity() -> Self {
        PNorm::Infinity
    }

    pub fn value(&self) -> f64 {
        match self {
            PNorm::Finite(p) => *p,
            PNorm::Infinity => f64::INFINITY,
        }
    }

    /// `1/p`, with `1/inf = 0` exactly.
    pub fn reciprocal(&self) -> f64 {
        match self {
            PNorm::Finite(p) => 1.0 / p,
            PNorm::Infinity => 0.0,
        }
    }

    /// Conjugate exponent: `1/p + 1/p' = 1`, with `1' = inf` and `inf' = 1`.
    pub fn conjugate(&self) -> Self {
        match self {
            PNorm::Infinity => PNorm::Finite(1.0),
            PNorm::Finite(p) if *p == 1.0 => PNorm::Infinity,
            PNorm::Finite(p) => PNorm::Finite(p / (p - 1.0)),
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PNorm::Infinity)
    }
}

/// `l_p` norm of a nonnegative vector (used on singular values).
pub fn lp_norm(values: &[f64], p: PNorm) -> f64 {
    match p {
        PNorm::Infinity => values.iter().cloned().fold(0.0, f64::max),
        PNorm::Finite(1.0) => values.iter().sum(),
        PNorm::Finite(2.0) => values.iter().map(|s| s * s).sum::<f64>().sqrt(),
        PNorm::Finite(p) => {
            // Scale out the maximum so large p cannot overflow/underflow.
            let m = values.iter().cloned().fold(0.0, f64::max);
            if m == 0.0 {
                return 0.0;
            }
            let sum: f64 = values.iter().map(|s| (s / m).powf(p)).sum();
            m * sum.powf(1.0 / p)
        }
    }
}

/// Schatten norm `(sum s_k^p)^(1/p)` over singular values; `p = inf` gives
/// the operator norm.
pub fn schatten_norm(x: &CMat, p: PNorm) -> f64 {
    if let PNorm::Finite(q) = p {
        if q == 2.0 {
            return x.frobenius_norm();
        }
    }
    lp_norm(&singular_values(x), p)
}

/// Duality pairing `tr(y* x)`.
pub fn trace_pairing(x: &CMat, y: &CMat) -> Result<Complex64> {
    if x.dim() != y.dim() {
        return Err(Error::DimMismatch(x.dim(), y.dim()));
    }
    let n = x.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += y[(i, j)].conj() * x[(i, j)];
        }
    }
    Ok(acc)
}

/// Polar-decomposition norming element: returns `w` with `||w||_{p'} = 1` and
/// `tr(w* x) = ||x||_p` (up to rounding). For `x = u diag(s) v*` this is
/// `u diag(s^{p-1}) v* / ||s||_p^{p-1}`, with the usual degenerate forms at
/// `p = 1` and `p = inf`.
pub fn duality_witness(x: &CMat, p: PNorm) -> CMat {
    let dec = svd(x);
    let n = x.dim();
    match p {
        PNorm::Infinity => {
            // rank-one witness from the top singular pair
            let mut u1 = CMat::zeros(n);
            for i in 0..n {
                u1[(i, 0)] = dec.u[(i, 0)];
            }
            let mut v1 = CMat::zeros(n);
            for j in 0..n {
                v1[(0, j)] = dec.v_adj[(0, j)];
            }
            &u1 * &v1
        }
        PNorm::Finite(1.0) => &dec.u * &dec.v_adj,
        PNorm::Finite(p) => {
            let norm = lp_norm(&dec.s, PNorm::Finite(p));
            if norm == 0.0 {
                return CMat::zeros(n);
            }
            let weights: Vec<f64> = dec.s.iter().map(|s| (s / norm).powf(p - 1.0)).collect();
            let d = CMat::diag_real(&weights);
            &(&dec.u * &d) * &dec.v_adj
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat::eigh;
    use num_complex::Complex64 as C64;

    fn lcg_mat(n: usize, seed: u64) -> CMat {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        CMat::from_fn(n, |_, _| C64::new(next(), next())).unwrap()
    }

    #[test]
    fn conjugate_exponents_exact() {
        assert_eq!(PNorm::one().conjugate(), PNorm::Infinity);
        assert_eq!(PNorm::Infinity.conjugate(), PNorm::one());
        assert_eq!(PNorm::two().conjugate(), PNorm::two());
        assert_eq!(PNorm::new(1.5).unwrap().conjugate(), PNorm::Finite(3.0));
    }

    #[test]
    fn rejects_bad_exponent() {
        assert!(PNorm::new(0.5).is_err());
        assert!(PNorm::new(f64::NAN).is_err());
        assert_eq!(PNorm::new(f64::INFINITY).unwrap(), PNorm::Infinity);
    }

    #[test]
    fn identity_norm() {
        for &(p, expect) in
            &[(PNorm::one(), 4.0), (PNorm::two(), 2.0), (PNorm::Infinity, 1.0), (PNorm::Finite(4.0), 4.0f64.powf(0.25))]
        {
            assert!((schatten_norm(&CMat::identity(4), p) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn diag_3_4_two_norm_is_5() {
        let x = CMat::diag_real(&[3.0, 4.0]);
        assert!((schatten_norm(&x, PNorm::two()) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn trace_norm_matches_sqrt_gram_oracle() {
        // Independent oracle: singular values as eigenvalues of sqrt(x* x).
        let x = lcg_mat(4, 99);
        let gram = &x.adjoint() * &x;
        let e = eigh(&gram).unwrap();
        let oracle: f64 = e.values.iter().map(|v| v.max(0.0).sqrt()).sum();
        let got = schatten_norm(&x, PNorm::one());
        assert!((got - oracle).abs() <= 1e-10 * oracle.max(1.0));
    }

    #[test]
    fn pairing_with_self_is_squared_frobenius() {
        let x = lcg_mat(3, 5);
        let v = trace_pairing(&x, &x).unwrap();
        assert!((v.re - x.frobenius_norm().powi(2)).abs() < 1e-12);
        assert!(v.im.abs() < 1e-14);
    }

    #[test]
    fn pairing_of_matrix_units() {
        let e12 = CMat::unit(3, 0, 1);
        let v = trace_pairing(&e12, &e12).unwrap();
        assert!((v - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(trace_pairing(&e12, &CMat::identity(2)).is_err());
    }

    #[test]
    fn duality_witness_attains_norm() {
        for &p in &[PNorm::one(), PNorm::Finite(1.5), PNorm::two(), PNorm::Finite(3.0), PNorm::Infinity] {
            let x = lcg_mat(5, 17);
            let w = duality_witness(&x, p);
            let wp = schatten_norm(&w, p.conjugate());
            assert!((wp - 1.0).abs() < 1e-8, "witness not normalized at p={p:?}: {wp}");
            let attained = trace_pairing(&x, &w).unwrap().re;
            let norm = schatten_norm(&x, p);
            assert!((attained - norm).abs() <= 1e-8 * norm.max(1.0));
        }
    }

    #[test]
    fn hoelder_on_random_pairs() {
        for seed in 0..20u64 {
            let x = lcg_mat(4, seed);
            let y = lcg_mat(4, seed + 1000);
            for &p in &[PNorm::one(), PNorm::Finite(1.5), PNorm::two(), PNorm::Finite(3.0), PNorm::Infinity] {
                let lhs = trace_pairing(&x, &y).unwrap().norm();
                let rhs = schatten_norm(&x, p) * schatten_norm(&y, p.conjugate());
                assert!(lhs <= rhs * (1.0 + 1e-12), "Hoelder violated: {lhs} > {rhs}");
            }
        }
    }
}
