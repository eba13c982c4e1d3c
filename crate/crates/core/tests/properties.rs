//! Property tests for the structural invariants: identities that must hold
//! across the whole parameter space, not just at frozen reference points.

use proptest::prelude::*;

use rdwalk::mc_oracle::{decimate, interpolate, jacobi_eigenvalues, sample_walk, CounterRng};
use rdwalk::schemes::{
    distortion_at_rate, ec_threshold, high_rate_coefficient, interpolated_error_mse,
    test_channel_moments, ChannelMoments, Scheme,
};
use rdwalk::spectra::{
    berger_eigenvalues, bridge_variance, covariance_matrix, interpolation_weights,
    mmse_interpolation, CovKind, SpectralDensity, WalkDims,
};
use rdwalk::waterfill::{asymptotic_rd_point, finite_n_rd_point, rate_to_water_level};

fn small_dims() -> impl Strategy<Value = WalkDims> {
    (1usize..=8, 1usize..=12)
        .prop_map(|(m, n_m)| WalkDims::new(m * n_m, m).expect("n is a multiple of m"))
}

proptest! {
    #[test]
    fn bridge_profile_averages_to_mmse(m in 1usize..=64) {
        let avg: f64 = (0..m)
            .map(|r| bridge_variance(r, m).unwrap())
            .sum::<f64>() / m as f64;
        let mmse = mmse_interpolation(m).unwrap();
        prop_assert!((avg - mmse).abs() <= 1e-12 * mmse.max(1.0));
    }

    #[test]
    fn shifted_density_is_standard_minus_constant(
        phi in 1e-6f64..=1.0,
        m in 1usize..=50,
    ) {
        let shifted = SpectralDensity::Shifted { m };
        let expect = SpectralDensity::Standard.value(phi).unwrap() - shifted.shift();
        let got = shifted.value(phi).unwrap();
        prop_assert!((got - expect).abs() <= 1e-12 * expect.abs().max(1.0));
    }

    #[test]
    fn crossing_inverts_the_density(
        ln_theta in -2f64..=6.0,
        m in 1usize..=20,
    ) {
        let density = SpectralDensity::Shifted { m };
        let theta = ln_theta.exp();
        if let Some(phi) = density.crossing(theta) {
            prop_assert!(phi > 0.0 && phi < 1.0);
            let back = density.value(phi).unwrap();
            prop_assert!((back - theta).abs() <= 1e-9 * theta);
        } else {
            prop_assert!(theta <= density.min_value() + 1e-12);
        }
    }

    #[test]
    fn interpolation_weights_form_a_partition(dims in small_dims(), s_raw in 1usize..=96) {
        let s = 1 + (s_raw - 1) % dims.n();
        let pairs = interpolation_weights(s, dims);
        let sum: f64 = pairs.iter().map(|(_, w)| w).sum();
        prop_assert!((sum - 1.0).abs() < 1e-14);
        for (idx, w) in pairs {
            prop_assert!(idx <= dims.n_m() + 1);
            prop_assert!((0.0..=1.0).contains(&w));
        }
    }

    #[test]
    fn water_filling_is_monotone_in_theta(
        ln_lo in -6f64..=4.0,
        step in 0.1f64..=3.0,
        n in 1usize..=64,
    ) {
        let lam = berger_eigenvalues(n);
        let lo = ln_lo.exp();
        let hi = (ln_lo + step).exp();
        let a = finite_n_rd_point(&lam, lo, n).unwrap();
        let b = finite_n_rd_point(&lam, hi, n).unwrap();
        prop_assert!(b.distortion >= a.distortion - 1e-12);
        prop_assert!(b.rate <= a.rate + 1e-12);
        prop_assert!(a.distortion <= lo * lam.len() as f64 / n as f64 + 1e-12);
        prop_assert!(a.rate >= 0.0);
    }

    #[test]
    fn asymptotic_points_are_monotone_in_theta(
        ln_lo in -4f64..=3.0,
        step in 0.05f64..=2.0,
        m in 1usize..=6,
    ) {
        let density = SpectralDensity::Shifted { m };
        let a = asymptotic_rd_point(density, ln_lo.exp(), m).unwrap();
        let b = asymptotic_rd_point(density, (ln_lo + step).exp(), m).unwrap();
        prop_assert!(b.distortion >= a.distortion - 1e-9);
        prop_assert!(b.rate <= a.rate + 1e-9);
    }

    #[test]
    fn interpolated_error_mse_is_linear_in_the_moments(
        dims in small_dims(),
        theta_y in 0.05f64..=4.0,
        alpha in 0.0f64..=3.0,
    ) {
        let base = test_channel_moments(dims, theta_y).unwrap();
        let scaled = ChannelMoments {
            var: base.var.iter().map(|v| alpha * v).collect(),
            lag1: base.lag1.iter().map(|v| alpha * v).collect(),
        };
        let f_base = interpolated_error_mse(dims, &base).unwrap();
        let f_scaled = interpolated_error_mse(dims, &scaled).unwrap();
        prop_assert!((f_scaled - alpha * f_base).abs() <= 1e-10 * f_base.abs().max(1.0));
    }

    #[test]
    fn interpolation_is_exact_at_kept_samples(dims in small_dims(), seed in 0u64..=500) {
        let mut rng = CounterRng::new(seed, 0, 0);
        let path = sample_walk(&mut rng, dims.n());
        let kept = decimate(&path, dims).unwrap();
        let approx = interpolate(&kept, dims).unwrap();
        for j in 1..=dims.n_m() {
            let s = j * dims.m();
            prop_assert!((approx[s - 1] - path[s - 1]).abs() < 1e-12);
        }
    }

    #[test]
    fn ec_threshold_sits_between_one_and_limit(m in 1usize..=500) {
        let t = ec_threshold(m).unwrap();
        prop_assert!(t >= 1.0 - 1e-12);
        prop_assert!(t < (1.0 + 3f64.sqrt()).log2());
        let ec = high_rate_coefficient(Scheme::EstimateCompress, m).unwrap();
        let ce = high_rate_coefficient(Scheme::CompressEstimate, m).unwrap();
        prop_assert!(ec > 0.0 && ce >= ec - 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn water_level_inversion_round_trips(
        rate in 0.05f64..=2.5,
        m in 1usize..=8,
    ) {
        let density = SpectralDensity::Shifted { m };
        let theta = rate_to_water_level(density, m, rate).unwrap();
        let point = asymptotic_rd_point(density, theta, m).unwrap();
        prop_assert!((point.rate - rate).abs() < 1e-10, "rate {} vs {rate}", point.rate);
    }

    #[test]
    fn compress_first_never_beats_estimate_first(
        m in 1usize..=10,
        rate in 0.02f64..=2.0,
    ) {
        let ec = distortion_at_rate(Scheme::EstimateCompress, m, rate).unwrap();
        let ce = distortion_at_rate(Scheme::CompressEstimate, m, rate).unwrap();
        prop_assert!(ce.total >= ec.total - 1e-9, "M={m} R={rate}: {} < {}", ce.total, ec.total);
        prop_assert!(ec.total >= ec.mmse_term - 1e-12);
    }

    #[test]
    fn jacobi_agrees_with_closed_form_eigenvalues(n in 1usize..=24) {
        let dims = WalkDims::new(n, 1).unwrap();
        let cov = covariance_matrix(CovKind::Source, dims).unwrap();
        let got = jacobi_eigenvalues(cov.entries()).unwrap();
        let expect = berger_eigenvalues(n);
        for (g, e) in got.iter().zip(&expect) {
            prop_assert!((g - e).abs() <= 1e-9 * e, "{g} vs {e}");
        }
    }
}
