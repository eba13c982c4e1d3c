//! Distortion-rate curves for the two sampling-compression orders.
//!
//! Both schemes observe every M-th sample of a standard Gaussian random walk
//! and spend R bits per walk sample. Estimate-compress (EC) first replaces
//! the walk by its best linear interpolation from the kept samples, then
//! compresses that estimate; its curve water-fills the shifted density of
//! the interpolated process. Compress-estimate (CE) first compresses the
//! kept samples as a walk in their own right, then interpolates from the
//! lossy reconstruction; its curve follows from an exact finite-N error
//! decomposition whose limit combines two band integrals of the standard
//! density, one plain and one weighted by cos(pi phi) for the lag-1 error
//! correlation that interpolation picks up.
//!
//! EC is the optimal order, so ce >= ec pointwise; both collapse to the
//! direct distortion-rate function of the walk at M = 1. The finite-N
//! helpers at the bottom evaluate the CE decomposition for an explicit walk
//! length, which is how the asymptotic curve is cross-checked.

use crate::error::{Error, Result};
use crate::spectra::{
    berger_eigenvalues, mmse_interpolation, walk_eigenvector, SpectralDensity, WalkDims,
};
use crate::waterfill::{
    asymptotic_rd_point, integrate, rate_to_water_level, QuadratureSpec, RdPoint,
};

/// Order of estimation and compression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    /// Interpolate first, then compress the interpolated process.
    EstimateCompress,
    /// Compress the kept samples first, then interpolate.
    CompressEstimate,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::EstimateCompress, Scheme::CompressEstimate];

    /// Short label used in CSV output and on the command line.
    pub fn label(&self) -> &'static str {
        match self {
            Scheme::EstimateCompress => "ec",
            Scheme::CompressEstimate => "ce",
        }
    }

    pub fn from_label(label: &str) -> Option<Scheme> {
        match label {
            "ec" => Some(Scheme::EstimateCompress),
            "ce" => Some(Scheme::CompressEstimate),
            _ => None,
        }
    }
}

/// One evaluated point of a scheme's distortion-rate curve, split into the
/// terms that add up to the total distortion.
///
/// For EC the coding term is the water-filling distortion of the shifted
/// density and the cross term is zero. For CE the coding term is
/// (2M^2+1)/(3M) times the clipped band integral and the cross term is
/// (M^2-1)/(3M) times the cos-weighted clipped integral. In both cases
/// total = mmse_term + coding_term + cross_term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionBreakdown {
    pub scheme: Scheme,
    pub m: usize,
    pub rate: f64,
    /// Water level of the scheme's parametrization: on the shifted density
    /// for EC, on the standard density for CE.
    pub theta: f64,
    pub mmse_term: f64,
    pub coding_term: f64,
    pub cross_term: f64,
    pub total: f64,
}

/// Distortion-rate function of the walk itself (no decimation): the
/// water-filling point of the standard density at the given rate.
pub fn source_drf(rate: f64) -> Result<RdPoint> {
    let theta = rate_to_water_level(SpectralDensity::Standard, 1, rate)?;
    asymptotic_rd_point(SpectralDensity::Standard, theta, 1)
}

/// Evaluate one scheme at decimation factor `m` and rate `rate` (bits per
/// walk sample).
pub fn distortion_at_rate(scheme: Scheme, m: usize, rate: f64) -> Result<DistortionBreakdown> {
    if m == 0 {
        return Err(Error::Domain {
            what: "decimation factor M",
            value: 0.0,
        });
    }
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::Domain {
            what: "rate",
            value: rate,
        });
    }
    let mmse = mmse_interpolation(m)?;
    match scheme {
        Scheme::EstimateCompress => {
            let density = SpectralDensity::Shifted { m };
            let theta = rate_to_water_level(density, m, rate)?;
            let point = asymptotic_rd_point(density, theta, m)?;
            let coding = point.distortion;
            Ok(DistortionBreakdown {
                scheme,
                m,
                rate,
                theta,
                mmse_term: mmse,
                coding_term: coding,
                cross_term: 0.0,
                total: mmse + coding,
            })
        }
        Scheme::CompressEstimate => {
            // The kept samples are compressed as their own walk: the water
            // level solves the standard-density rate equation with the M R
            // bits available per kept sample.
            let theta = rate_to_water_level(SpectralDensity::Standard, m, rate)?;
            let (coding, cross) = ce_terms_at_water_level(m, theta)?;
            Ok(DistortionBreakdown {
                scheme,
                m,
                rate,
                theta,
                mmse_term: mmse,
                coding_term: coding,
                cross_term: cross,
                total: mmse + coding + cross,
            })
        }
    }
}

/// Coding and cross terms of the CE distortion at water level `theta` on the
/// standard density.
fn ce_terms_at_water_level(m: usize, theta: f64) -> Result<(f64, f64)> {
    let mf = m as f64;
    let clipped = asymptotic_rd_point(SpectralDensity::Standard, theta, 1)?.distortion;
    let coding = (2.0 * mf * mf + 1.0) / (3.0 * mf) * clipped;
    let cross = (mf * mf - 1.0) / (3.0 * mf) * clipped_cosine_integral(theta)?;
    Ok((coding, cross))
}

/// Large-population limit of the CE distortion when the kept samples are
/// quantized at water level `m * theta` on their own spectrum. The finite-N
/// evaluator `finite_n_ce_distortion(dims, m * theta)` converges to this
/// value as the walk length grows.
pub fn ce_distortion_at_water_level(m: usize, theta: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain {
            what: "decimation factor M",
            value: 0.0,
        });
    }
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::Domain {
            what: "water level",
            value: theta,
        });
    }
    let (coding, cross) = ce_terms_at_water_level(m, theta)?;
    Ok(mmse_interpolation(m)? + coding + cross)
}

/// Band integral of min(theta, S(phi)) cos(pi phi) for the standard density
/// S: the lag-1 autocorrelation of the reconstruction error spectrum. Zero
/// when the whole band is active (the clipped spectrum is flat).
fn clipped_cosine_integral(theta: f64) -> Result<f64> {
    let density = SpectralDensity::Standard;
    match density.crossing(theta) {
        None => Ok(0.0),
        Some(split) => {
            let spec = QuadratureSpec::with_splits(vec![split])?;
            integrate(
                |phi| theta.min(density.value_unchecked(phi)) * (std::f64::consts::PI * phi).cos(),
                &spec,
            )
        }
    }
}

// ---------------------------------------------------------------------------
// high-rate behavior
// ---------------------------------------------------------------------------

/// Leading coefficient of the high-rate expansion
/// D(R) ~ mmse + coeff * 2^(-2MR).
///
/// For CE this is (2M^2+1)/(3M) and the expansion is exact once M R >= 1.
/// For EC it is M 2^(integral of log2 of the shifted density), exact once
/// M R >= `ec_threshold`.
pub fn high_rate_coefficient(scheme: Scheme, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain {
            what: "decimation factor M",
            value: 0.0,
        });
    }
    let mf = m as f64;
    Ok(match scheme {
        Scheme::EstimateCompress => mf * SpectralDensity::Shifted { m }.log2_band_integral().exp2(),
        Scheme::CompressEstimate => (2.0 * mf * mf + 1.0) / (3.0 * mf),
    })
}

/// High-rate approximation mmse + coeff * 2^(-2MR).
pub fn high_rate_distortion(scheme: Scheme, m: usize, rate: f64) -> Result<f64> {
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::Domain {
            what: "rate",
            value: rate,
        });
    }
    let coeff = high_rate_coefficient(scheme, m)?;
    Ok(mmse_interpolation(m)? + coeff * (-2.0 * m as f64 * rate).exp2())
}

/// Gap between the high-rate coefficients, ce minus ec. Positive for every
/// M > 1 and zero at M = 1.
pub fn high_rate_coefficient_gap(m: usize) -> Result<f64> {
    Ok(high_rate_coefficient(Scheme::CompressEstimate, m)?
        - high_rate_coefficient(Scheme::EstimateCompress, m)?)
}

/// Absolute distortion gap ce minus ec at (M, R). Beyond the EC threshold
/// both curves are exact exponentials and the gap collapses to the
/// coefficient gap times 2^(-2MR); below it the two water-filling totals
/// are differenced directly.
pub fn ce_ec_gap(m: usize, rate: f64) -> Result<f64> {
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::Domain {
            what: "rate",
            value: rate,
        });
    }
    let mr = m as f64 * rate;
    if mr >= ec_threshold(m)? {
        Ok(high_rate_coefficient_gap(m)? * (-2.0 * mr).exp2())
    } else {
        let ec = distortion_at_rate(Scheme::EstimateCompress, m, rate)?.total;
        let ce = distortion_at_rate(Scheme::CompressEstimate, m, rate)?.total;
        Ok(ce - ec)
    }
}

/// The normalized rate M R above which the EC water level sits below the
/// shifted density's minimum, so the whole band is active and the curve is
/// exactly mmse + coeff * 2^(-2MR): half of log2(band log integral /
/// band minimum). Grows from 1 at M = 1 toward log2(1 + sqrt(3)) = 1.4500.
pub fn ec_threshold(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain {
            what: "decimation factor M",
            value: 0.0,
        });
    }
    let density = SpectralDensity::Shifted { m };
    Ok(0.5 * (density.log2_band_integral() - density.min_value().log2()))
}

/// Location and height of the largest relative excess of CE over EC.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapPeak {
    /// Normalized rate M R at the peak.
    pub normalized_rate: f64,
    /// (ce - ec) / ec at the peak.
    pub relative_gap: f64,
}

/// Width of the golden-section bracket at which the gap search stops.
const GAP_SEARCH_TOL: f64 = 1e-9;

/// Search the normalized-rate axis for the largest relative gap
/// (ce - ec)/ec. The gap vanishes at both ends (the curves meet as R -> 0
/// and decay at the same exponential rate beyond the EC threshold) and has
/// a single interior peak, so a golden-section search over
/// [0.1, ec_threshold + 6] finds it.
pub fn max_relative_gap(m: usize) -> Result<GapPeak> {
    let gap_at = |mr: f64| -> Result<f64> {
        let rate = mr / m as f64;
        let ec = distortion_at_rate(Scheme::EstimateCompress, m, rate)?.total;
        let ce = distortion_at_rate(Scheme::CompressEstimate, m, rate)?.total;
        Ok((ce - ec) / ec)
    };
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut lo = 0.1;
    let mut hi = ec_threshold(m)? + 6.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let mut fa = gap_at(a)?;
    let mut fb = gap_at(b)?;
    while hi - lo > GAP_SEARCH_TOL {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = gap_at(b)?;
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = gap_at(a)?;
        }
    }
    let mr = 0.5 * (lo + hi);
    Ok(GapPeak {
        normalized_rate: mr,
        relative_gap: gap_at(mr)?,
    })
}

// ---------------------------------------------------------------------------
// finite-N compress-estimate
// ---------------------------------------------------------------------------

/// Second moments of the reconstruction error on the kept samples: var[i] is
/// the error variance at kept sample i+1 and lag1[i] the covariance between
/// errors at kept samples i+1 and i+2. The error at the pinned origin is
/// identically zero and carries no entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMoments {
    pub var: Vec<f64>,
    pub lag1: Vec<f64>,
}

/// Error moments of the optimal Gaussian test channel that compresses the
/// kept samples at water level `theta_y`.
///
/// The kept samples form a walk with step variance M, so its covariance has
/// eigenvalues M times the unit-walk ones with the same eigenvectors; the
/// channel error has variance min(theta_y, eigenvalue) along each
/// eigenvector, and the moments are quadratic forms in the eigenvector
/// entries.
pub fn test_channel_moments(dims: WalkDims, theta_y: f64) -> Result<ChannelMoments> {
    if !theta_y.is_finite() || theta_y <= 0.0 {
        return Err(Error::Domain {
            what: "water level theta_y",
            value: theta_y,
        });
    }
    let n_m = dims.n_m();
    let mf = dims.m() as f64;
    let mut var = vec![0.0; n_m];
    let mut lag1 = vec![0.0; n_m.saturating_sub(1)];
    for (k, lam) in berger_eigenvalues(n_m).iter().enumerate() {
        let clip = theta_y.min(mf * lam);
        let row = walk_eigenvector(k + 1, n_m);
        for i in 0..n_m {
            var[i] += clip * row[i] * row[i];
            if i + 1 < n_m {
                lag1[i] += clip * row[i] * row[i + 1];
            }
        }
    }
    Ok(ChannelMoments { var, lag1 })
}

fn validate_moments(dims: WalkDims, moments: &ChannelMoments) -> Result<()> {
    let n_m = dims.n_m();
    if moments.var.len() != n_m {
        return Err(Error::LengthMismatch {
            what: "channel variance entries",
            expected: n_m,
            got: moments.var.len(),
        });
    }
    if moments.lag1.len() != n_m.saturating_sub(1) {
        return Err(Error::LengthMismatch {
            what: "channel lag-1 entries",
            expected: n_m.saturating_sub(1),
            got: moments.lag1.len(),
        });
    }
    for (i, &v) in moments.var.iter().enumerate() {
        if v.is_nan() || v < 0.0 {
            return Err(Error::InvalidMoments {
                reason: "negative variance",
                index: i,
            });
        }
    }
    for (i, &l) in moments.lag1.iter().enumerate() {
        let bound = (moments.var[i] * moments.var[i + 1]).sqrt();
        if l.abs() > bound + 1e-12 {
            return Err(Error::InvalidMoments {
                reason: "lag-1 covariance violates Cauchy-Schwarz",
                index: i,
            });
        }
    }
    Ok(())
}

/// Per-source-sample MSE contributed by interpolating the channel errors:
///
///   (2M^2+1)/(3NM) sum var + (M^2-1)/(3NM) sum lag1
///                          - (2M^2+3M+1)/(6NM) var[last].
///
/// The average runs over the N samples from the pinned origin through
/// sample N-1: the final kept sample anchors the last stretch but its own
/// error is not part of the average, which is what the boundary term
/// subtracts. The result is a variance, so a value below -1e-12 means the
/// moments were inconsistent.
pub fn interpolated_error_mse(dims: WalkDims, moments: &ChannelMoments) -> Result<f64> {
    validate_moments(dims, moments)?;
    let nf = dims.n() as f64;
    let mf = dims.m() as f64;
    let var_sum: f64 = moments.var.iter().sum();
    let lag_sum: f64 = moments.lag1.iter().sum();
    let last = *moments.var.last().expect("n_m >= 1 by construction");
    let mse = (2.0 * mf * mf + 1.0) / (3.0 * nf * mf) * var_sum
        + (mf * mf - 1.0) / (3.0 * nf * mf) * lag_sum
        - (2.0 * mf * mf + 3.0 * mf + 1.0) / (6.0 * nf * mf) * last;
    if mse < -1e-12 {
        return Err(Error::Inconsistent {
            what: "interpolated error mse",
            value: mse,
        });
    }
    Ok(mse)
}

/// Exact finite-N CE distortion at water level `theta_y` on the kept
/// samples: interpolation mmse plus the interpolated channel error.
pub fn finite_n_ce_distortion(dims: WalkDims, theta_y: f64) -> Result<f64> {
    let moments = test_channel_moments(dims, theta_y)?;
    Ok(mmse_interpolation(dims.m())? + interpolated_error_mse(dims, &moments)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_labels_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(Scheme::from_label(s.label()), Some(s));
        }
        assert_eq!(Scheme::from_label("xx"), None);
    }

    #[test]
    fn source_drf_reference_point() {
        let p = source_drf(0.5).unwrap();
        assert!(
            (p.theta - 0.8730145626442368).abs() < 1e-8,
            "theta {}",
            p.theta
        );
        assert!(
            (p.distortion - 0.5650727071026331).abs() < 1e-8,
            "d {}",
            p.distortion
        );
        assert!((p.rate - 0.5).abs() < 1e-10);
    }

    #[test]
    fn ec_reference_point() {
        // M R = 2 is past the EC threshold, so theta and the total have
        // closed forms: theta = 2^(-4) (3 + 2 sqrt(2))/8.
        let b = distortion_at_rate(Scheme::EstimateCompress, 2, 1.0).unwrap();
        let k = (3.0 + 2.0 * 2f64.sqrt()) / 8.0;
        assert!((b.theta - k / 16.0).abs() < 1e-12, "theta {}", b.theta);
        assert_eq!(b.mmse_term, 0.25);
        assert_eq!(b.cross_term, 0.0);
        assert!(
            (b.total - 0.3410691738241592).abs() < 1e-11,
            "total {}",
            b.total
        );
        assert!((b.total - (b.mmse_term + b.coding_term)).abs() < 1e-15);
    }

    #[test]
    fn ce_reference_point() {
        // M R = 2 >= 1: theta = 2^(-2MR) exactly and the band is fully
        // active, so the cross term vanishes.
        let b = distortion_at_rate(Scheme::CompressEstimate, 2, 1.0).unwrap();
        assert!((b.theta - 0.0625).abs() < 1e-10, "theta {}", b.theta);
        assert_eq!(b.mmse_term, 0.25);
        assert!(b.cross_term.abs() < 1e-12);
        assert!((b.total - 0.34375).abs() < 1e-10, "total {}", b.total);
    }

    #[test]
    fn schemes_coincide_with_source_drf_at_m_one() {
        for rate in [0.3, 0.7, 1.5] {
            let drf = source_drf(rate).unwrap().distortion;
            let ec = distortion_at_rate(Scheme::EstimateCompress, 1, rate).unwrap();
            let ce = distortion_at_rate(Scheme::CompressEstimate, 1, rate).unwrap();
            assert!((ec.total - drf).abs() < 1e-10);
            assert!((ce.total - drf).abs() < 1e-10);
            assert_eq!(ec.mmse_term, 0.0);
            assert!(ce.cross_term.abs() < 1e-12);
        }
    }

    #[test]
    fn ce_dominates_ec() {
        for (m, rate) in [(2, 0.2), (2, 1.0), (4, 0.1), (10, 0.05), (10, 0.13)] {
            let ec = distortion_at_rate(Scheme::EstimateCompress, m, rate)
                .unwrap()
                .total;
            let ce = distortion_at_rate(Scheme::CompressEstimate, m, rate)
                .unwrap()
                .total;
            assert!(ce >= ec - 1e-12, "M={m} R={rate}: ce {ce} < ec {ec}");
        }
    }

    #[test]
    fn high_rate_coefficients_closed_forms() {
        for m in [1usize, 2, 5, 100] {
            let mf = m as f64;
            let s = (3.0 + 6.0 / (mf * mf)).sqrt();
            let ec = high_rate_coefficient(Scheme::EstimateCompress, m).unwrap();
            let ce = high_rate_coefficient(Scheme::CompressEstimate, m).unwrap();
            let ec_expect = (1.0 + (2.0 + s) * mf * mf) / (6.0 * mf);
            let ce_expect = (2.0 * mf * mf + 1.0) / (3.0 * mf);
            assert!((ec - ec_expect).abs() < 1e-12 * ec_expect, "M={m} ec {ec}");
            assert!((ce - ce_expect).abs() < 1e-15 * ce_expect, "M={m} ce {ce}");
            let gap = high_rate_coefficient_gap(m).unwrap();
            let gap_expect = (1.0 + (2.0 - s) * mf * mf) / (6.0 * mf);
            assert!((gap - gap_expect).abs() < 1e-12, "M={m} gap {gap}");
        }
        assert!((high_rate_coefficient(Scheme::EstimateCompress, 1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ec_threshold_reference_values() {
        assert!((ec_threshold(1).unwrap() - 1.0).abs() < 1e-12);
        assert!((ec_threshold(2).unwrap() - 1.271553303163612).abs() < 1e-12);
        assert!((ec_threshold(100).unwrap() - 1.4498928610945685).abs() < 1e-12);
        let limit = (1.0 + 3f64.sqrt()).log2();
        let mut prev = 0.0;
        for m in [1usize, 2, 3, 10, 100, 10_000] {
            let t = ec_threshold(m).unwrap();
            assert!(t > prev && t < limit, "M={m}: {t}");
            prev = t;
        }
    }

    #[test]
    fn high_rate_exact_beyond_threshold() {
        for (m, mr) in [(2usize, 1.5), (3, 2.0), (10, 1.5)] {
            let rate = mr / m as f64;
            for scheme in Scheme::ALL {
                let exact = distortion_at_rate(scheme, m, rate).unwrap().total;
                let approx = high_rate_distortion(scheme, m, rate).unwrap();
                assert!(
                    (exact - approx).abs() < 1e-9,
                    "{} M={m} MR={mr}: {exact} vs {approx}",
                    scheme.label()
                );
            }
        }
    }

    #[test]
    fn gap_narrows_at_low_rate() {
        let ec = distortion_at_rate(Scheme::EstimateCompress, 100, 0.001)
            .unwrap()
            .total;
        let ce = distortion_at_rate(Scheme::CompressEstimate, 100, 0.001)
            .unwrap()
            .total;
        assert!((ec - 292.735859402935).abs() < 1e-6 * ec, "ec {ec}");
        assert!((ce - 292.73626525800034).abs() < 1e-6 * ce, "ce {ce}");
        assert!((ce - ec) / ec < 2e-6);
    }

    #[test]
    fn gap_peak_location_and_height() {
        let peak = max_relative_gap(100).unwrap();
        assert!(
            (peak.normalized_rate - 1.2585676892503856).abs() < 1e-4,
            "MR {}",
            peak.normalized_rate
        );
        assert!(
            (peak.relative_gap - 0.02666950209899255).abs() < 1e-7,
            "gap {}",
            peak.relative_gap
        );
    }

    #[test]
    fn channel_moments_flat_when_fully_active() {
        // theta_y below every eigenvalue of the kept-sample covariance:
        // the error is white with variance theta_y on each kept sample.
        let dims = WalkDims::new(512, 4).unwrap();
        let moments = test_channel_moments(dims, 0.2).unwrap();
        assert_eq!(moments.var.len(), 128);
        assert_eq!(moments.lag1.len(), 127);
        for v in &moments.var {
            assert!((v - 0.2).abs() < 1e-10, "var {v}");
        }
        for l in &moments.lag1 {
            assert!(l.abs() < 1e-10, "lag1 {l}");
        }
    }

    #[test]
    fn finite_n_ce_reference_values() {
        let d = finite_n_ce_distortion(WalkDims::new(512, 4).unwrap(), 0.2).unwrap();
        assert!((d - 0.761767578125).abs() < 1e-10, "{d}");
        let d = finite_n_ce_distortion(WalkDims::new(4096, 4).unwrap(), 0.2).unwrap();
        assert!((d - 0.762408447265625).abs() < 1e-10, "{d}");
        let d = finite_n_ce_distortion(WalkDims::new(512, 4).unwrap(), 4.0).unwrap();
        assert!((d - 2.562197540500198).abs() < 1e-8, "{d}");
        let d = finite_n_ce_distortion(WalkDims::new(4096, 4).unwrap(), 4.0).unwrap();
        assert!((d - 2.570988475471919).abs() < 1e-8, "{d}");
    }

    #[test]
    fn finite_n_ce_approaches_asymptote() {
        // At theta_y = 4 the water level on the standard density is 1.0 and
        // both clipped band integrals have known values.
        let mf = 4.0;
        let d_clip = 1.0 / 3.0 + 3f64.sqrt() / (2.0 * std::f64::consts::PI);
        let c_clip = 3f64.sqrt() / std::f64::consts::PI - 1.0 / 3.0;
        let limit = mmse_interpolation(4).unwrap()
            + (2.0 * mf * mf + 1.0) / (3.0 * mf) * d_clip
            + (mf * mf - 1.0) / (3.0 * mf) * c_clip;
        assert!((limit - 2.572238350482204).abs() < 1e-10);
        let evaluated = ce_distortion_at_water_level(4, 1.0).unwrap();
        assert!((evaluated - limit).abs() < 1e-9, "{evaluated}");
        // Below the band minimum both integrals are exact: theta and zero.
        assert_eq!(ce_distortion_at_water_level(4, 0.05).unwrap(), 0.7625);
        let coarse = finite_n_ce_distortion(WalkDims::new(512, 4).unwrap(), 4.0).unwrap();
        let fine = finite_n_ce_distortion(WalkDims::new(4096, 4).unwrap(), 4.0).unwrap();
        assert!((fine - limit).abs() < (coarse - limit).abs());
        assert!((fine - limit).abs() / limit < 1e-3);
    }

    #[test]
    fn interpolated_error_hand_worked_cases() {
        // N=4, M=2, unit variances: per-sample squared errors after
        // interpolation are 0, 1/4, 1, 1/2 for uncorrelated channel errors
        // and 0, 1/4, 1, 1 for perfectly correlated ones.
        let dims = WalkDims::new(4, 2).unwrap();
        let uncorrelated = ChannelMoments {
            var: vec![1.0, 1.0],
            lag1: vec![0.0],
        };
        assert_eq!(interpolated_error_mse(dims, &uncorrelated).unwrap(), 0.4375);
        let correlated = ChannelMoments {
            var: vec![1.0, 1.0],
            lag1: vec![1.0],
        };
        assert_eq!(interpolated_error_mse(dims, &correlated).unwrap(), 0.5625);
        assert_eq!(
            interpolated_error_mse(
                dims,
                &ChannelMoments {
                    var: vec![0.0, 0.0],
                    lag1: vec![0.0],
                }
            )
            .unwrap(),
            0.0
        );
    }

    #[test]
    fn channel_moments_above_the_water_are_walk_moments() {
        // With the water level above every eigenvalue the channel sends
        // nothing, so the error is the kept walk itself: var[n] = M n and
        // lag1[n] = M min(n, n+1) = M n.
        let dims = WalkDims::new(8, 2).unwrap();
        let moments = test_channel_moments(dims, 1e9).unwrap();
        for (i, v) in moments.var.iter().enumerate() {
            let expect = 2.0 * (i + 1) as f64;
            assert!((v - expect).abs() < 1e-9, "var[{i}] = {v}");
        }
        for (i, l) in moments.lag1.iter().enumerate() {
            let expect = 2.0 * (i + 1) as f64;
            assert!((l - expect).abs() < 1e-9, "lag1[{i}] = {l}");
        }
    }

    #[test]
    fn coding_terms_vanish_at_extreme_rate() {
        for m in [1usize, 4] {
            let rate = 30.0 / m as f64;
            for scheme in Scheme::ALL {
                let b = distortion_at_rate(scheme, m, rate).unwrap();
                assert!(b.total - b.mmse_term < 1e-12, "{} M={m}", scheme.label());
                assert!(b.total >= b.mmse_term);
            }
        }
    }

    #[test]
    fn gap_reference_point_and_consistency() {
        // M=2, R=1 sits beyond the EC threshold, so the gap equals the
        // coefficient gap over 16 and also the difference of the two totals.
        let gap = ce_ec_gap(2, 1.0).unwrap();
        assert!((gap - 0.002681).abs() < 1e-6, "{gap}");
        let ec = distortion_at_rate(Scheme::EstimateCompress, 2, 1.0)
            .unwrap()
            .total;
        let ce = distortion_at_rate(Scheme::CompressEstimate, 2, 1.0)
            .unwrap()
            .total;
        assert!((gap - (ce - ec)).abs() < 1e-8);
        assert_eq!(ce_ec_gap(1, 2.0).unwrap(), 0.0);
        let below = ce_ec_gap(10, 0.05).unwrap();
        assert!(below > 0.0);
    }

    #[test]
    fn moment_validation() {
        let dims = WalkDims::new(8, 2).unwrap();
        let good = test_channel_moments(dims, 0.5).unwrap();
        assert!(interpolated_error_mse(dims, &good).is_ok());
        let mut bad = good.clone();
        bad.var.pop();
        assert!(interpolated_error_mse(dims, &bad).is_err());
        let mut bad = good.clone();
        bad.lag1.push(0.0);
        assert!(interpolated_error_mse(dims, &bad).is_err());
        let mut bad = good.clone();
        bad.var[0] = -0.5;
        assert!(interpolated_error_mse(dims, &bad).is_err());
        let mut bad = good;
        bad.lag1[0] = 100.0;
        assert!(matches!(
            interpolated_error_mse(dims, &bad),
            Err(Error::InvalidMoments { .. })
        ));
    }

    #[test]
    fn input_validation() {
        assert!(distortion_at_rate(Scheme::EstimateCompress, 0, 1.0).is_err());
        assert!(distortion_at_rate(Scheme::EstimateCompress, 2, 0.0).is_err());
        assert!(distortion_at_rate(Scheme::CompressEstimate, 2, -1.0).is_err());
        assert!(test_channel_moments(WalkDims::new(8, 2).unwrap(), 0.0).is_err());
        assert!(high_rate_coefficient(Scheme::CompressEstimate, 0).is_err());
        assert!(ec_threshold(0).is_err());
    }
}
