//! Quadrature building blocks: Gauss-Legendre nodes, composite rules on an
//! interval, and an adaptive panel-bisection scheme with an absolute target.

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre polynomial with the Chebyshev initial guess.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[k] = -x;
        nodes[n - 1 - k] = x;
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    if n % 2 == 1 {
        let mid = n / 2;
        nodes[mid] = 0.0;
        let (_, dp) = legendre_and_derivative(n, 0.0);
        weights[mid] = 2.0 / (dp * dp);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]` with `panels`
/// equal panels of the given order.
pub fn integrate_gl(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let mid = lo + 0.5 * h;
        let half = 0.5 * h;
        let mut acc = 0.0;
        for (x, w) in nodes.iter().zip(&weights) {
            acc += w * f(mid + half * x);
        }
        total += acc * half;
    }
    total
}

/// Composite trapezoid rule with `n` nodes (n >= 2).
pub fn integrate_trapezoid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n >= 2);
    let h = (b - a) / (n - 1) as f64;
    let mut acc = 0.5 * (f(a) + f(b));
    for k in 1..n - 1 {
        acc += f(a + k as f64 * h);
    }
    acc * h
}

/// Adaptive panel bisection: integrates `f` over `[a, b]`, splitting panels
/// until the difference between a low- and high-order Gauss estimate falls
/// below the absolute per-panel target. Returns `(value, error_estimate)`.
pub fn integrate_adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    panel_target: f64,
    max_depth: usize,
) -> (f64, f64) {
    fn recurse(
        f: &impl Fn(f64) -> f64,
        a: f64,
        b: f64,
        target: f64,
        depth: usize,
    ) -> (f64, f64) {
        let coarse = integrate_gl(f, a, b, 1, 7);
        let fine = integrate_gl(f, a, b, 2, 7);
        let err = (fine - coarse).abs();
        if err <= target || depth == 0 {
            (fine, err)
        } else {
            let mid = 0.5 * (a + b);
            let (v1, e1) = recurse(f, a, mid, 0.5 * target, depth - 1);
            let (v2, e2) = recurse(f, mid, b, 0.5 * target, depth - 1);
            (v1 + v2, e1 + e2)
        }
    }
    recurse(f, a, b, panel_target, max_depth)
}
