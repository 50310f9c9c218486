//! Acceptance suite: every quantitative claim the library certifies, one
//! test per criterion, each printing a pass/fail line with its measured
//! extremes (visible under `--nocapture`).

use std::time::Instant;

use num_complex::Complex64;

use nclp::density::{Density, SpectralFn};
use nclp::exec::map_trials;
use nclp::fourier::{fourier_transform_num, gmean_ft_closed, l1_norm_ft, uniform_grid, KernelFunction};
use nclp::interp::{sandwich_verify, Couple, SolverParams};
use nclp::mat::CMat;
use nclp::sampling::{
    gaussian_matrix, nondecreasing_sequence, positive_sequence, random_density, random_unitary,
    trial_rng, uniform,
};
use nclp::schatten::{schatten_norm, PNorm};
use nclp::schur::{
    build_kernel, cb_norm_sdp, multiplier_norm_lower, psd_kernel_check, transference_check,
    ClaimedBound, KernelFamily, SdpParams,
};
use nclp::weighted::{
    compa_ratio, geo_mean_map, geo_mean_quadrature, triangular_norm_lower, QuadratureSpec, TriSign,
};

fn report(criterion: &str, pass: bool, detail: &str) {
    println!("acceptance {criterion}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion} failed: {detail}");
}

/// Criterion 1: the cosh-kernel quadrature reproduces the geometric-mean
/// map to 1e-6 relative on 50 seeded densities, and the map contracts by
/// 1/2 in every Schatten norm. Runtime budget 30 s.
#[test]
fn criterion_01_integral_representation() {
    let start = Instant::now();
    let spec = QuadratureSpec::default();
    let ps = [PNorm::one(), PNorm::Finite(1.5), PNorm::two(), PNorm::Finite(4.0), PNorm::Infinity];
    let results = map_trials(50, |k| {
        let mut rng = trial_rng(101, k as u64);
        let n = 2 + k % 7; // dimensions 2..=8
        let d = random_density(&mut rng, n, 1e3);
        let x = gaussian_matrix(&mut rng, n);
        let exact = geo_mean_map(&d, &x);
        let out = geo_mean_quadrature(&d, &x, &spec);
        let rel = (&out.value - &exact).frobenius_norm() / exact.frobenius_norm();
        let contraction = ps
            .iter()
            .map(|p| schatten_norm(&exact, *p) / (0.5 * schatten_norm(&x, *p) + 1e-9))
            .fold(0.0f64, f64::max);
        (rel, contraction)
    });
    let worst_rel = results.iter().map(|r| r.0).fold(0.0f64, f64::max);
    let worst_contraction = results.iter().map(|r| r.1).fold(0.0f64, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "01-prop31-integral-representation",
        worst_rel <= 1e-6 && worst_contraction <= 1.0 && elapsed <= 30.0,
        &format!(
            "max quadrature rel err {worst_rel:.3e}, max contraction ratio {worst_contraction:.9}, {elapsed:.1}s"
        ),
    );
}

/// Criterion 2: SDP-certified cb norms of the four one-sequence kernel
/// families stay below 1, 2^theta, 2 - 2^-theta, 2 - 2^-theta over 100
/// sequences and the full closed theta grid. Runtime budget 5 min.
#[test]
fn criterion_02_correc0_families() {
    let start = Instant::now();
    let thetas: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    let worst = map_trials(100, |k| {
        let mut rng = trial_rng(202, k as u64);
        let n = 2 + k % 9; // dimensions 2..=10
        let lambda = positive_sequence(&mut rng, n, 100.0);
        let mut worst = f64::NEG_INFINITY;
        for &theta in &thetas {
            for fam in [
                KernelFamily::MinOverMax { lambda: lambda.clone() },
                KernelFamily::SumPowOverMaxPow { lambda: lambda.clone(), theta },
                KernelFamily::MaxPowOverSumPow { lambda: lambda.clone(), theta },
                KernelFamily::MinPowOverSumPow { lambda: lambda.clone(), theta },
            ] {
                let ClaimedBound::Value(claimed) = fam.claimed_bound() else { unreachable!() };
                let params =
                    SdpParams { stop_below: Some(claimed + 1e-6), ..SdpParams::default() };
                let cert = cb_norm_sdp(&build_kernel(&fam).unwrap(), &params).unwrap();
                worst = worst.max(cert.upper - claimed);
            }
        }
        worst
    })
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "02-correc0-cb-bounds",
        worst <= 1e-6 && elapsed <= 300.0,
        &format!("max (upper - claimed) = {worst:.3e}, {elapsed:.1}s"),
    );
}

/// Criterion 3: the two-weight mean kernel stays below 9 - 4 sqrt(2), the
/// two-weight ratio below 3, and the interpolation-correction kernel below
/// 9 - 4 sqrt(2), for monotone sequence pairs.
#[test]
fn criterion_03_two_weight_families() {
    let start = Instant::now();
    let thetas: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();
    let worst = map_trials(100, |k| {
        let mut rng = trial_rng(303, k as u64);
        let n = 2 + k % 9;
        let lambda = nondecreasing_sequence(&mut rng, n, 100.0);
        let mu = nondecreasing_sequence(&mut rng, n, 100.0);
        let mut worst = f64::NEG_INFINITY;
        for &theta in &thetas {
            for fam in [
                KernelFamily::TwoWeightMean { lambda: lambda.clone(), mu: mu.clone(), theta },
                KernelFamily::TwoWeightRatio { lambda: lambda.clone(), mu: mu.clone(), theta },
                KernelFamily::InterpCorrection { lambda: lambda.clone(), mu: mu.clone(), theta },
            ] {
                let ClaimedBound::Value(claimed) = fam.claimed_bound() else { unreachable!() };
                let params =
                    SdpParams { stop_below: Some(claimed + 1e-6), ..SdpParams::default() };
                let cert = cb_norm_sdp(&build_kernel(&fam).unwrap(), &params).unwrap();
                worst = worst.max(cert.upper - claimed);
            }
        }
        worst
    })
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "03-two-weight-cb-bounds",
        worst <= 1e-6,
        &format!("max (upper - claimed) = {worst:.3e}, {elapsed:.1}s"),
    );
}

/// Criterion 4: geometric-mean kernel Fourier analysis. Closed form vs
/// numerical transform to 1e-6; L1 norm 1/2 at theta = 1/2 within 1e-8;
/// logarithmic-divergence fit within 10 percent; SDP cb norms below the
/// Fourier bound for exponentially spread points.
#[test]
fn criterion_04_gmean_fourier() {
    let thetas: [f64; 4] = [0.05, 0.1, 0.2, 0.3];
    // (a) closed form vs numerical transform
    let xis = uniform_grid(-0.25, 0.25, 21);
    let mut worst_ft = 0.0f64;
    for &theta in thetas.iter().chain(&[0.5]) {
        // window large enough that the e^{-theta s} tail sits below 1e-10
        // even at theta = 0.05
        let num = fourier_transform_num(&KernelFunction::GMean(theta), &xis, 600.0).unwrap();
        for (xi, v) in xis.iter().zip(&num.values) {
            worst_ft = worst_ft
                .max((v - gmean_ft_closed(theta, *xi).unwrap()).norm() + num.tail_bound);
        }
    }
    // (b) L1 at theta = 1/2
    let half_err = (l1_norm_ft(&KernelFunction::GMean(0.5)).unwrap().value - 0.5).abs();
    // (c) log fit
    let xs: Vec<f64> = thetas.iter().map(|t| (1.0 / (t * (1.0 - t))).ln()).collect();
    let ys: Vec<f64> =
        thetas.iter().map(|t| l1_norm_ft(&KernelFunction::GMean(*t)).unwrap().value).collect();
    let nf = xs.len() as f64;
    let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let b = (nf * sxy - sx * sy) / (nf * sxx - sx * sx);
    let a = (sy - b * sx) / nf;
    let fit_resid = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| ((a + b * x - y) / y).abs())
        .fold(0.0f64, f64::max);
    // (d) SDP below the Fourier bound for lambda_i = e^i
    let lambda: Vec<f64> = (1..=10).map(|i| (i as f64).exp()).collect();
    let mut worst_sdp = f64::NEG_INFINITY;
    for &theta in thetas.iter().chain(&[0.5]) {
        let bound = l1_norm_ft(&KernelFunction::GMean(theta)).unwrap().value;
        let fam = KernelFamily::GeoMeanOverSum { lambda: lambda.clone(), theta };
        let params = SdpParams { stop_below: Some(bound + 1e-6), ..SdpParams::default() };
        let cert = cb_norm_sdp(&build_kernel(&fam).unwrap(), &params).unwrap();
        worst_sdp = worst_sdp.max(cert.upper - bound);
    }
    report(
        "04-gmean-fourier",
        worst_ft <= 1e-6 && half_err <= 1e-8 && fit_resid <= 0.10 && worst_sdp <= 1e-6,
        &format!(
            "transform err {worst_ft:.3e}, |l1(1/2)-1/2| {half_err:.3e}, fit resid {fit_resid:.3}, sdp-fourier gap {worst_sdp:.3e}"
        ),
    );
}

/// Criterion 5: the opposite-variation kernel diverges: the entry witness
/// gives at least (n+1)^2/(4n), hence >= 25 at n = 100 and a 6.25-fold
/// growth over n = 4.
#[test]
fn criterion_05_opposite_sign_divergence() {
    let value_at = |n: usize| {
        let lambda: Vec<f64> = (1..=n).map(|i| i as f64).collect();
        let mu: Vec<f64> = (1..=n).map(|i| 1.0 / i as f64).collect();
        let kernel = build_kernel(&KernelFamily::OppositeSign { lambda, mu, theta: 0.5 }).unwrap();
        multiplier_norm_lower(&kernel, PNorm::Infinity, 0, 0).value
    };
    let v4 = value_at(4);
    let v100 = value_at(100);
    let bound = |n: usize| ((n + 1) * (n + 1)) as f64 / (4.0 * n as f64);
    let pass = v4 >= bound(4) - 1e-12
        && v100 >= bound(100) - 1e-12
        && v100 >= 25.0
        && v100 >= 6.25 * v4;
    report(
        "05-opposite-sign-divergence",
        pass,
        &format!("lower(4) = {v4:.4} (>= {:.4}), lower(100) = {v100:.4} (>= 25)", bound(4)),
    );
}

/// Criterion 6: 500 random triangular comparison ratios inside [2/3, 2].
#[test]
fn criterion_06_comparison_ratios() {
    let descriptors = [
        SpectralFn::identity(),
        SpectralFn::Power(0.5),
        SpectralFn::Power(2.0),
        SpectralFn::Exp(0.25),
    ];
    let ps = [PNorm::one(), PNorm::two(), PNorm::Infinity];
    let ratios = map_trials(500, |k| {
        let mut rng = trial_rng(606, k as u64);
        let n = 2 + k % 9;
        let d = random_density(&mut rng, n, 1e3);
        let x = gaussian_matrix(&mut rng, n);
        let f = &descriptors[k % descriptors.len()];
        let p = ps[(k / descriptors.len()) % ps.len()];
        let sign = if k % 2 == 0 { TriSign::Plus } else { TriSign::Minus };
        compa_ratio(&x, &d, f, p, sign).unwrap()
    });
    let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = ratios.iter().cloned().fold(0.0f64, f64::max);
    report(
        "06-comparison-lemma",
        min >= 2.0 / 3.0 - 1e-9 && max <= 2.0 + 1e-9,
        &format!("500 ratios in [{min:.6}, {max:.6}] vs [2/3, 2]"),
    );
}

/// Criterion 7: kernels of convex nonincreasing functions are positive
/// semidefinite on 100 random point sets.
#[test]
fn criterion_07_psd_kernels() {
    let worst = map_trials(100, |k| {
        let mut rng = trial_rng(707, k as u64);
        let m = 2 + k % 7;
        let points: Vec<f64> = (0..m).map(|_| 8.0 * (uniform(&mut rng) - 0.5)).collect();
        let f = if k % 2 == 0 {
            KernelFunction::ExpDecay
        } else {
            KernelFunction::OneMinusInvSumPow(0.2 + 0.6 * uniform(&mut rng))
        };
        let rep = psd_kernel_check(&f, &points).unwrap();
        rep.min_eigenvalue - rep.threshold
    })
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    report(
        "07-psd-positivity",
        worst >= 0.0,
        &format!("min (eigenvalue - threshold) = {worst:.3e}"),
    );
}

/// Criterion 8: the weighted interpolation sandwich. Scalar and
/// simultaneously-diagonal instances certify within 10 percent; twenty
/// noncommuting instances stay within the budget 8 max(p,2) max(p,p').
/// Runtime budget 10 min.
#[test]
fn criterion_08_interpolation_sandwich() {
    let start = Instant::now();
    let params = SolverParams { iters: 2000, coarse_grid: 80, seed: 808, ..Default::default() };

    // scalar instances
    let scalar_worst = map_trials(3, |k| {
        let mut rng = trial_rng(808, k as u64);
        let a = positive_sequence(&mut rng, 1, 30.0)[0];
        let b = positive_sequence(&mut rng, 1, 30.0)[0];
        let base = Density::diagonal(&[1.0]).unwrap();
        let theta = [0.25, 0.5, 0.75][k];
        let c = Couple::new(
            base,
            &SpectralFn::Table(vec![a]),
            &SpectralFn::Table(vec![b]),
            PNorm::one(),
            PNorm::Infinity,
            theta,
        )
        .unwrap();
        let x = gaussian_matrix(&mut rng, 1);
        let rep = sandwich_verify(&x, &c, 4, &params, None);
        rep.upper_ratio.max(rep.lower_ratio)
    })
    .into_iter()
    .fold(0.0f64, f64::max);

    // simultaneously diagonal instance, p = 2 via (1, inf) at theta = 1/2
    let diag_worst = {
        let base = Density::diagonal(&[1.0, 2.0, 5.0, 10.0]).unwrap();
        let c = Couple::new(
            base,
            &SpectralFn::identity(),
            &SpectralFn::Power(0.0),
            PNorm::one(),
            PNorm::Infinity,
            0.5,
        )
        .unwrap();
        let mut rng = trial_rng(809, 0);
        let g = gaussian_matrix(&mut rng, 4);
        let x = CMat::from_fn(4, |i, j| if i == j { g[(i, j)] } else { Complex64::new(0.0, 0.0) })
            .unwrap();
        let rep = sandwich_verify(&x, &c, 4, &params, None);
        rep.upper_ratio.max(rep.lower_ratio)
    };

    // noncommuting instances over the full parameter grid
    let pairs = [
        (PNorm::one(), PNorm::Infinity),
        (PNorm::two(), PNorm::Infinity),
        (PNorm::one(), PNorm::two()),
    ];
    let thetas = [0.25, 0.5, 0.75];
    let alphas = [(1.0, 0.0), (2.0, 1.0)];
    let outcomes = map_trials(20, |idx| {
        let (p0, p1) = pairs[idx % 3];
        let theta = thetas[(idx / 3) % 3];
        let (a0, a1) = alphas[(idx / 9) % 2];
        let mut rng = trial_rng(810, idx as u64);
        let basis = random_unitary(&mut rng, 4);
        let base = Density::from_parts(vec![1.0, 2.0, 5.0, 10.0], basis).unwrap();
        let c = Couple::new(base, &SpectralFn::Power(a0), &SpectralFn::Power(a1), p0, p1, theta)
            .unwrap();
        let x = gaussian_matrix(&mut rng, 4);
        let rep = sandwich_verify(&x, &c, 4, &params, None);
        let sound = rep.lower <= rep.upper * (1.0 + 1e-9)
            && rep.upper.is_finite()
            && rep.lower > 0.0;
        (rep.upper_ratio.max(rep.lower_ratio) / rep.budget, sound && rep.pass)
    });
    let worst_budget_frac = outcomes.iter().map(|o| o.0).fold(0.0f64, f64::max);
    let all_pass = outcomes.iter().all(|o| o.1);
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "08-weighted-sandwich",
        scalar_worst <= 1.1 && diag_worst <= 1.1 && all_pass && elapsed <= 600.0,
        &format!(
            "scalar worst ratio {scalar_worst:.4}, diagonal worst {diag_worst:.4}, noncommuting worst budget fraction {worst_budget_frac:.3}, {elapsed:.1}s"
        ),
    );
}

/// Criterion 9: triangular truncation growth: the certified lower bound at
/// p = inf is nondecreasing over n in {8, 32, 128} with at least 1.5-fold
/// growth from 8 to 128; at p = 2 the norm is exactly 1.
#[test]
fn criterion_09_triangular_growth() {
    let values: Vec<f64> = [8usize, 32, 128]
        .iter()
        .map(|&n| triangular_norm_lower(n, PNorm::Infinity, 24, 909).0)
        .collect();
    let nondecreasing = values.windows(2).all(|w| w[1] >= w[0]);
    let growth = values[2] / values[0];
    let (s2, _) = triangular_norm_lower(64, PNorm::two(), 24, 909);
    report(
        "09-triangular-growth",
        nondecreasing && growth >= 1.5 && (s2 - 1.0).abs() <= 1e-9,
        &format!("lower bounds {values:?}, growth {growth:.3}, |s2 - 1| = {:.2e}", (s2 - 1.0).abs()),
    );
}

/// Criterion 10: blockwise transference: 100 trials with 2x2 operator
/// blocks never beat the scalar cb certificate by more than 1e-6.
#[test]
fn criterion_10_transference() {
    let failures: usize = map_trials(100, |k| {
        let mut rng = trial_rng(1010, k as u64);
        let n = 2 + k % 7; // n <= 8
        let lambda = positive_sequence(&mut rng, n, 100.0);
        let (kernel, cb_upper) = if k % 2 == 0 {
            let kern = build_kernel(&KernelFamily::MinOverMax { lambda }).unwrap();
            (kern, 1.0)
        } else {
            let kern =
                build_kernel(&KernelFamily::MaxPowOverSumPow { lambda, theta: 0.7 }).unwrap();
            let cert = cb_norm_sdp(&kern, &SdpParams::default()).unwrap();
            (kern, cert.upper)
        };
        let blocks: Vec<Vec<CMat>> =
            (0..n).map(|_| (0..n).map(|_| gaussian_matrix(&mut rng, 2)).collect()).collect();
        let rep = transference_check(&kernel, &blocks, PNorm::Infinity, cb_upper).unwrap();
        usize::from(!rep.ok)
    })
    .into_iter()
    .sum();
    report(
        "10-blockwise-transference",
        failures == 0,
        &format!("{failures} violations out of 100 blockwise trials"),
    );
}
