//! Certification invariants for the multiplier kernels: lower bounds never
//! cross upper bounds, witnesses reproduce their ratios, composition is
//! submultiplicative, and the Fourier route dominates the SDP route where
//! both apply.

use nclp::exec::map_trials;
use nclp::fourier::KernelFunction;
use nclp::sampling::{gaussian_matrix, nondecreasing_sequence, positive_sequence, trial_rng};
use nclp::schatten::{schatten_norm, PNorm};
use nclp::schur::{
    apply_multiplier, build_kernel, cb_norm_sdp, cb_upper_fourier, kernel_from_function,
    multiplier_norm_lower, multiplier_norm_s2, ClaimedBound, KernelFamily, SdpParams, Witness,
};

fn random_family(k: usize, rng: &mut nclp::sampling::ChaCha8Rng) -> KernelFamily {
    let n = 2 + k % 7;
    let lambda = positive_sequence(rng, n, 100.0);
    let mu = nondecreasing_sequence(rng, n, 100.0);
    let theta = 0.1 + 0.8 * (k % 5) as f64 / 4.0;
    match k % 6 {
        0 => KernelFamily::MinOverMax { lambda },
        1 => KernelFamily::SumPowOverMaxPow { lambda, theta },
        2 => KernelFamily::MaxPowOverSumPow { lambda, theta },
        3 => KernelFamily::MinPowOverSumPow { lambda, theta },
        4 => KernelFamily::GeoMeanOverSum { lambda, theta },
        _ => {
            let mut l = lambda;
            l.sort_by(|a, b| a.partial_cmp(b).unwrap());
            KernelFamily::TwoWeightMean { lambda: l, mu, theta }
        }
    }
}

#[test]
fn certificates_are_ordered_and_witnessed() {
    let outcomes = map_trials(60, |k| {
        let mut rng = trial_rng(21, k as u64);
        let fam = random_family(k, &mut rng);
        let kernel = build_kernel(&fam).unwrap();
        let cert = cb_norm_sdp(&kernel, &SdpParams::default()).unwrap();
        assert!(cert.lower <= cert.upper + 1e-6, "{}: {} > {}", fam.name(), cert.lower, cert.upper);
        if let Some(f) = &cert.factorization {
            assert!(f.reconstruction_error <= 1e-6);
            assert!(f.max_product <= cert.upper + 1e-6);
        }
        // the empirical lower bound at p = inf is witnessed
        let lb = multiplier_norm_lower(&kernel, PNorm::Infinity, 20, k as u64);
        let witnessed = match &lb.witness {
            Witness::Entry(i, j) => kernel.entries()[(*i, *j)].norm(),
            Witness::Matrix(x) => {
                schatten_norm(&apply_multiplier(&kernel, x).unwrap(), PNorm::Infinity)
                    / schatten_norm(x, PNorm::Infinity)
            }
        };
        assert!((witnessed - lb.value).abs() <= 1e-9 * lb.value.max(1.0));
        assert!(lb.value <= cert.upper + 1e-6);
        cert.upper
    });
    assert!(outcomes.iter().all(|u| u.is_finite()));
}

#[test]
fn s2_norm_saturated_by_lower_bound() {
    for k in 0..25u64 {
        let mut rng = trial_rng(22, k);
        let fam = random_family(k as usize, &mut rng);
        let kernel = build_kernel(&fam).unwrap();
        let exact = multiplier_norm_s2(&kernel);
        let lb = multiplier_norm_lower(&kernel, PNorm::two(), 40, k);
        assert!(lb.value <= exact + 1e-9);
        assert!(lb.value >= exact - 1e-9, "S2 lower bound {} below max entry {exact}", lb.value);
    }
}

#[test]
fn composition_is_submultiplicative() {
    let worst = map_trials(25, |k| {
        let mut rng = trial_rng(23, k as u64);
        let n = 2 + k % 6;
        let a = build_kernel(&KernelFamily::MaxPowOverSumPow {
            lambda: positive_sequence(&mut rng, n, 80.0),
            theta: 0.3 + 0.1 * (k % 5) as f64,
        })
        .unwrap();
        let b = build_kernel(&KernelFamily::MinPowOverSumPow {
            lambda: positive_sequence(&mut rng, n, 80.0),
            theta: 0.2 + 0.15 * (k % 5) as f64,
        })
        .unwrap();
        let ab = a.compose(&b).unwrap();
        let ca = cb_norm_sdp(&a, &SdpParams::default()).unwrap();
        let cb_ = cb_norm_sdp(&b, &SdpParams::default()).unwrap();
        let cab = cb_norm_sdp(&ab, &SdpParams::default()).unwrap();
        cab.lower - ca.upper * cb_.upper
    })
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    assert!(worst <= 1e-6, "submultiplicativity violated by {worst}");
}

#[test]
fn principal_submatrices_never_exceed() {
    for k in 0..20u64 {
        let mut rng = trial_rng(24, k);
        let fam = random_family(k as usize, &mut rng);
        let kernel = build_kernel(&fam).unwrap();
        let n = kernel.dim();
        if n < 3 {
            continue;
        }
        let keep: Vec<usize> = (0..n).step_by(2).collect();
        let sub = kernel.principal_submatrix(&keep);
        let full = cb_norm_sdp(&kernel, &SdpParams::default()).unwrap();
        let part = cb_norm_sdp(&sub, &SdpParams::default()).unwrap();
        assert!(part.lower <= full.upper + 1e-6);
        // empirical lower of the submatrix stays under the full upper too
        let lb = multiplier_norm_lower(&sub, PNorm::Infinity, 30, k);
        assert!(lb.value <= full.upper + 1e-6);
    }
}

#[test]
fn fourier_bound_dominates_sdp_for_generated_kernels() {
    // For kernels f(s_i - s_j) with integrable transform, the L1 value is an
    // upper bound at every point configuration; the SDP value can only be
    // tighter.
    for k in 0..10u64 {
        let mut rng = trial_rng(25, k);
        let m = 3 + (k as usize) % 5;
        let points: Vec<f64> =
            (0..m).map(|_| 6.0 * (nclp::sampling::uniform(&mut rng) - 0.5)).collect();
        let f = KernelFunction::ExpDecay;
        let (kernel, l1) = cb_upper_fourier(&f, &points).unwrap();
        let cert = cb_norm_sdp(&kernel, &SdpParams::default()).unwrap();
        assert!(cert.upper <= l1.value + l1.error_bar + 1e-6);
        // the generated kernel agrees with the direct construction
        let direct = kernel_from_function(&f, &points).unwrap();
        assert!((&kernel.entries().clone() - direct.entries()).max_abs() < 1e-15);
    }
}

#[test]
fn claimed_bounds_table() {
    let lambda = vec![1.0, 2.0];
    let mu = vec![1.0, 3.0];
    let cases: Vec<(KernelFamily, ClaimedBound)> = vec![
        (KernelFamily::MinOverMax { lambda: lambda.clone() }, ClaimedBound::Value(1.0)),
        (
            KernelFamily::SumPowOverMaxPow { lambda: lambda.clone(), theta: 0.5 },
            ClaimedBound::Value(2f64.sqrt()),
        ),
        (
            KernelFamily::MaxPowOverSumPow { lambda: lambda.clone(), theta: 1.0 },
            ClaimedBound::Value(1.5),
        ),
        (
            KernelFamily::TwoWeightMean { lambda: lambda.clone(), mu: mu.clone(), theta: 0.3 },
            ClaimedBound::Value(9.0 - 4.0 * 2f64.sqrt()),
        ),
        (
            KernelFamily::TwoWeightRatio { lambda: lambda.clone(), mu: mu.clone(), theta: 0.3 },
            ClaimedBound::Value(3.0),
        ),
        (
            KernelFamily::GeoMeanOverSum { lambda: lambda.clone(), theta: 0.5 },
            ClaimedBound::LogFactor,
        ),
        (
            KernelFamily::OppositeSign { lambda, mu, theta: 0.5 },
            ClaimedBound::Unbounded,
        ),
    ];
    for (fam, expect) in cases {
        match (fam.claimed_bound(), expect) {
            (ClaimedBound::Value(a), ClaimedBound::Value(b)) => {
                assert!((a - b).abs() < 1e-12, "{}", fam.name())
            }
            (a, b) => assert!(a == b, "{}: {a:?} vs {b:?}", fam.name()),
        }
    }
}

#[test]
fn gaussian_witnesses_never_beat_min_over_max() {
    // the min/max kernel is a complete contraction; no random witness at
    // p = inf may exceed 1
    let worst = map_trials(30, |k| {
        let mut rng = trial_rng(26, k as u64);
        let n = 2 + k % 8;
        let lambda = positive_sequence(&mut rng, n, 300.0);
        let kernel = build_kernel(&KernelFamily::MinOverMax { lambda }).unwrap();
        let x = gaussian_matrix(&mut rng, n);
        schatten_norm(&apply_multiplier(&kernel, &x).unwrap(), PNorm::Infinity)
            / schatten_norm(&x, PNorm::Infinity)
    })
    .into_iter()
    .fold(0.0f64, f64::max);
    assert!(worst <= 1.0 + 1e-9, "contraction violated: {worst}");
}
