//! Scalar Fourier analysis for the multiplier kernels: numerical transforms
//! with certified truncation tails, L1 norms of transforms, and the closed
//! form for the geometric-mean kernel.
//!
//! Convention: `fhat(xi) = int f(s) exp(-2 pi i xi s) ds`.
//!
//! One wrinkle: the kernel `(1 + e^{-|s|})^theta` does not vanish at
//! infinity, so its transform is the point mass `delta_0` plus an integrable
//! density. Transforms here are therefore reported as a delta mass (the
//! value of `f` at infinity) plus the transform of the decaying remainder;
//! the L1 norm is the total variation of that measure.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::quad::{integrate_adaptive, integrate_gl};
use crate::{tol, Error, Result};

/// `1 / (2 cosh(pi t))`, the weight of the integral representation of the
/// geometric-mean map. Integrates to 1/2 over the line.
pub fn cosh_weight(t: f64) -> f64 {
    // 1 / (e^x + e^-x), computed to avoid overflow for large |x|
    let x = PI * t;
    let a = (-x.abs()).exp();
    a / (1.0 + a * a)
}

/// Kernel functions with certified exponential decay (except `Table`).
#[derive(Clone, Debug)]
pub enum KernelFunction {
    /// `e^{-|s|}`
    ExpDecay,
    /// `(1 + e^{-|s|})^theta`; limit 1 at infinity (delta mass 1).
    SumPow(f64),
    /// `1 - (1 + e^{-|s|})^{-theta}`
    OneMinusInvSumPow(f64),
    /// `1 / (e^{theta s} + e^{(theta-1) s})`, the geometric-mean kernel.
    GMean(f64),
    /// `1 / (2 cosh(pi s))`
    CoshWeight,
    /// Tabulated values without a decay certificate.
    Table { points: Vec<f64>, values: Vec<f64> },
}

/// One-sided exponential envelopes `|f(s)| <= coef * exp(-rate * |s|)`,
/// valid for all `s` of the given sign, for the decaying part of the kernel.
#[derive(Clone, Copy, Debug)]
pub struct DecayCertificate {
    pub coef_pos: f64,
    pub rate_pos: f64,
    pub coef_neg: f64,
    pub rate_neg: f64,
}

impl DecayCertificate {
    /// `int_{|s| > t} |f|`, from the envelopes.
    pub fn tail_mass(&self, t: f64) -> f64 {
        self.coef_pos * (-self.rate_pos * t).exp() / self.rate_pos
            + self.coef_neg * (-self.rate_neg * t).exp() / self.rate_neg
    }
}

impl KernelFunction {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            KernelFunction::ExpDecay => (-s.abs()).exp(),
            KernelFunction::SumPow(theta) => (1.0 + (-s.abs()).exp()).powf(*theta),
            KernelFunction::OneMinusInvSumPow(theta) => {
                1.0 - (1.0 + (-s.abs()).exp()).powf(-theta)
            }
            KernelFunction::GMean(theta) => {
                // stable at both ends: divide through by the dominant term
                if s >= 0.0 {
                    let e = (-s).exp();
                    e.powf(*theta) / (1.0 + e)
                } else {
                    let e = s.exp();
                    e.powf(1.0 - *theta) / (1.0 + e)
                }
            }
            KernelFunction::CoshWeight => cosh_weight(s),
            KernelFunction::Table { points, values } => {
                // linear interpolation, constant extension
                if points.is_empty() {
                    return 0.0;
                }
                if s <= points[0] {
                    return values[0];
                }
                if s >= *points.last().unwrap() {
                    return *values.last().unwrap();
                }
                let k = points.partition_point(|&p| p < s);
                let (p0, p1) = (points[k - 1], points[k]);
                let w = (s - p0) / (p1 - p0);
                values[k - 1] * (1.0 - w) + values[k] * w
            }
        }
    }

    /// Limit at infinity; the delta mass of the transform measure.
    pub fn delta_mass(&self) -> f64 {
        match self {
            KernelFunction::SumPow(_) => 1.0,
            _ => 0.0,
        }
    }

    /// The integrable remainder after subtracting the limit at infinity.
    pub fn decaying_eval(&self, s: f64) -> f64 {
        self.eval(s) - self.delta_mass()
    }

    pub fn is_even(&self) -> bool {
        match self {
            KernelFunction::GMean(theta) => *theta == 0.5,
            KernelFunction::Table { .. } => false,
            _ => true,
        }
    }

    /// Exponential envelopes for the decaying part, or an error for
    /// tabulated kernels (no certificate).
    ///
    /// `(1+x)^t - 1 <= t x` and `1 - (1+x)^{-t} <= t x` for `x >= 0`,
    /// `t in [0, 1]` give the SumPow-type envelopes.
    pub fn decay(&self) -> Result<DecayCertificate> {
        let c = match self {
            KernelFunction::ExpDecay => DecayCertificate {
                coef_pos: 1.0,
                rate_pos: 1.0,
                coef_neg: 1.0,
                rate_neg: 1.0,
            },
            KernelFunction::SumPow(theta) | KernelFunction::OneMinusInvSumPow(theta) => {
                DecayCertificate {
                    coef_pos: theta.max(1e-12),
                    rate_pos: 1.0,
                    coef_neg: theta.max(1e-12),
                    rate_neg: 1.0,
                }
            }
            KernelFunction::GMean(theta) => DecayCertificate {
                coef_pos: 1.0,
                rate_pos: theta.max(1e-12),
                coef_neg: 1.0,
                rate_neg: (1.0 - theta).max(1e-12),
            },
            KernelFunction::CoshWeight => DecayCertificate {
                coef_pos: 1.0,
                rate_pos: PI,
                coef_neg: 1.0,
                rate_neg: PI,
            },
            KernelFunction::Table { .. } => return Err(Error::NoDecayCertificate),
        };
        Ok(c)
    }

    /// Checks convexity and monotone decrease of `s -> f(s)` on a grid of
    /// `R_+` (the hypothesis of the positive-definiteness criterion).
    pub fn grid_convex_nonincreasing(&self, s_max: f64, samples: usize) -> bool {
        let h = s_max / samples as f64;
        let vals: Vec<f64> = (0..=samples).map(|k| self.eval(k as f64 * h)).collect();
        let scale = vals[0].abs().max(1e-300);
        for w in vals.windows(2) {
            if w[1] > w[0] + 1e-12 * scale {
                return false;
            }
        }
        for w in vals.windows(3) {
            if w[0] - 2.0 * w[1] + w[2] < -1e-10 * scale {
                return false;
            }
        }
        true
    }
}

/// Sampled numerical Fourier transform of the decaying part, plus the delta
/// mass and the analytic truncation tail.
pub struct TransformSamples {
    pub values: Vec<Complex64>,
    /// Point mass at frequency zero (nonzero only for kernels with a limit
    /// at infinity).
    pub delta_mass: f64,
    /// Bound on `|error|` per sample from truncating the integral to
    /// `[-T, T]`.
    pub tail_bound: f64,
}

/// One transform sample of the decaying part; the integral is split at the
/// origin so the `|s|` kink always sits on a panel boundary.
fn transform_at(f: &KernelFunction, xi: f64, window: f64) -> Complex64 {
    // panel width of at most 2 resolves every kernel scale in the family;
    // the oscillation term keeps the phase per panel bounded
    let half_panels = (window / 2.0).ceil().max(20.0) as usize + (window * xi.abs()).ceil() as usize;
    let split = |g: &dyn Fn(f64) -> f64| {
        integrate_gl(g, -window, 0.0, half_panels, 12)
            + integrate_gl(g, 0.0, window, half_panels, 12)
    };
    let re = split(&|s| f.decaying_eval(s) * (2.0 * PI * xi * s).cos());
    let im = split(&|s| -f.decaying_eval(s) * (2.0 * PI * xi * s).sin());
    Complex64::new(re, im)
}

/// Quadrature of `int_{-T}^{T} f(s) exp(-2 pi i xi s) ds` at each requested
/// frequency. Panel count scales with the oscillation `2 T |xi|`.
pub fn fourier_transform_num(
    f: &KernelFunction,
    xis: &[f64],
    window: f64,
) -> Result<TransformSamples> {
    let decay = f.decay()?;
    let tail = decay.tail_mass(window);
    let values = xis.iter().map(|&xi| transform_at(f, xi, window)).collect();
    Ok(TransformSamples { values, delta_mass: f.delta_mass(), tail_bound: tail })
}

/// Closed-form transform of the geometric-mean kernel:
/// `fhat(xi) = pi / sin(pi (theta + 2 pi i xi))`, for `0 < theta < 1`.
pub fn gmean_ft_closed(theta: f64, xi: f64) -> Result<Complex64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::ThetaOutOfRange(theta, "(0, 1): the transform has a pole"));
    }
    let z = Complex64::new(PI * theta, 2.0 * PI * PI * xi);
    Ok(Complex64::new(PI, 0.0) / z.sin())
}

/// `|gmean_ft_closed|`, stable for large `|xi|`:
/// `pi / sqrt(sin^2(pi theta) + sinh^2(2 pi^2 xi))`.
pub fn gmean_ft_abs(theta: f64, xi: f64) -> f64 {
    let s = (PI * theta).sin();
    let v = 2.0 * PI * PI * xi;
    if v.abs() > 350.0 {
        return 2.0 * PI * (-v.abs()).exp();
    }
    PI / (s * s + v.sinh().powi(2)).sqrt()
}

/// Certified L1 norm (total variation) of the transform measure.
pub struct L1Norm {
    /// `delta_mass + int |fhat|` including the tail bound.
    pub value: f64,
    /// Width of the certification: quadrature target plus tail bound.
    pub error_bar: f64,
    pub delta_mass: f64,
    /// The part of `int |fhat|` computed inside the frequency window.
    pub window_integral: f64,
    /// Analytic bound on the mass outside the window.
    pub tail_bound: f64,
}

/// `int |fhat|` plus the delta mass, via adaptive quadrature and analytic
/// tails.
///
/// - `ExpDecay`, `CoshWeight`, `GMean`: the transform is known in closed
///   form, so `|fhat|` is integrated directly with an exact tail.
/// - `SumPow`, `OneMinusInvSumPow`: the decaying part is convex and
///   nonincreasing on `R_+` (checked on a grid), hence its transform is
///   nonnegative and integrates to the value at zero; the window integral
///   of the numerical transform is used as the cross-check and the missing
///   mass is reported as the tail.
pub fn l1_norm_ft(f: &KernelFunction) -> Result<L1Norm> {
    match f {
        KernelFunction::ExpDecay => {
            let g = |xi: f64| 2.0 / (1.0 + 4.0 * PI * PI * xi * xi);
            let window = 60.0;
            let (integral, err) =
                integrate_adaptive(&g, -window, window, tol::ADAPTIVE_PANEL_TARGET, 40);
            let tail = (2.0 / PI) * (std::f64::consts::FRAC_PI_2 - (2.0 * PI * window).atan());
            Ok(L1Norm {
                value: integral + tail,
                error_bar: err + tail,
                delta_mass: 0.0,
                window_integral: integral,
                tail_bound: tail,
            })
        }
        KernelFunction::CoshWeight => {
            let g = |xi: f64| cosh_weight(xi);
            let window = 12.0;
            let (integral, err) =
                integrate_adaptive(&g, -window, window, tol::ADAPTIVE_PANEL_TARGET, 40);
            let tail =
                (std::f64::consts::FRAC_PI_2 - (PI * window).sinh().atan()) / PI;
            Ok(L1Norm {
                value: integral + tail,
                error_bar: err + tail,
                delta_mass: 0.0,
                window_integral: integral,
                tail_bound: tail,
            })
        }
        KernelFunction::GMean(theta) => {
            if !(*theta > 0.0 && *theta < 1.0) {
                return Err(Error::ThetaOutOfRange(*theta, "(0, 1): the transform has a pole"));
            }
            let th = *theta;
            let g = move |xi: f64| gmean_ft_abs(th, xi);
            let window = 2.0;
            let (integral, err) =
                integrate_adaptive(&g, -window, window, tol::ADAPTIVE_PANEL_TARGET, 44);
            // int_{xi > X} pi / sinh(2 pi^2 xi) = ln(coth(pi^2 X)) / (2 pi)
            let y = PI * PI * window;
            let tail = 2.0 * (1.0 / y.tanh()).ln() / (2.0 * PI);
            Ok(L1Norm {
                value: integral + tail,
                error_bar: err + tail,
                delta_mass: 0.0,
                window_integral: integral,
                tail_bound: tail,
            })
        }
        KernelFunction::SumPow(_) | KernelFunction::OneMinusInvSumPow(_) => {
            // Decaying part g: convex nonincreasing on R_+ with g(inf) = 0,
            // so ghat >= 0 and ||ghat||_1 = g(0).
            let probe = DecayingPart(f);
            if !probe.grid_convex_nonincreasing(60.0, 4000) {
                return Err(Error::NotIntegrable);
            }
            let g0 = f.decaying_eval(0.0);
            let window = 20.0;
            let (window_integral, quad_err) = integrate_adaptive(
                &|xi: f64| transform_at(f, xi, 40.0).re,
                -window,
                window,
                1e-8,
                30,
            );
            let tail = (g0 - window_integral).max(0.0);
            Ok(L1Norm {
                value: f.delta_mass() + g0,
                error_bar: tail + quad_err + 1e-9,
                delta_mass: f.delta_mass(),
                window_integral,
                tail_bound: tail,
            })
        }
        KernelFunction::Table { .. } => Err(Error::NoDecayCertificate),
    }
}

/// View of the decaying part for the grid convexity check.
struct DecayingPart<'a>(&'a KernelFunction);

impl DecayingPart<'_> {
    fn grid_convex_nonincreasing(&self, s_max: f64, samples: usize) -> bool {
        let h = s_max / samples as f64;
        let vals: Vec<f64> = (0..=samples).map(|k| self.0.decaying_eval(k as f64 * h)).collect();
        let scale = vals[0].abs().max(1e-300);
        for w in vals.windows(2) {
            if w[1] > w[0] + 1e-12 * scale {
                return false;
            }
        }
        for w in vals.windows(3) {
            if w[0] - 2.0 * w[1] + w[2] < -1e-10 * scale {
                return false;
            }
        }
        true
    }
}

pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|k| a + k as f64 * h).collect()
}
