//! Reverse water-filling: rate-distortion points from spectra, and the
//! inverse map from a target rate back to a water level.
//!
//! Finite-N points are plain sums over eigenvalues. Asymptotic points are
//! band integrals of the spectral densities, computed with adaptive 15-point
//! Gauss-Legendre panels: the densities blow up like phi^-2 at the band edge
//! phi = 0, so the leading segment is integrated over dyadically shrinking
//! panels toward 0, and the water-level crossing is passed in as a split
//! point so every panel sees a smooth integrand.
//!
//! Rates are in bits (base-2 logs) per source sample; distortion and rate
//! are both normalized by the full walk length N, which is why the rate
//! integral carries a 1/(2M) and the shifted-density distortion a leading M.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::spectra::SpectralDensity;

/// A point on a water-filling curve: the parameter theta plus the rate and
/// distortion it produces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPoint {
    pub theta: f64,
    pub rate: f64,
    pub distortion: f64,
}

/// Bisection iteration cap for the rate -> water-level inversion.
const BISECT_MAX_ITER: usize = 200;
/// Early-exit tolerance on the rate, relative to the target.
const BISECT_REL_TOL: f64 = 1e-12;
/// Acceptance tolerance on the final rate residual (absolute); the adaptive
/// quadrature itself moves in steps around 1e-11, so demanding the relative
/// tolerance unconditionally would spin.
const BISECT_ABS_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// quadrature
// ---------------------------------------------------------------------------

/// Controls for the adaptive band quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    /// Absolute tolerance target for the whole integral.
    pub abs_tol: f64,
    /// Maximum dyadic levels toward 0 and maximum bisection depth per
    /// interior segment.
    pub max_subdivisions: u32,
    /// Interior points where the integrand may kink; each becomes a segment
    /// boundary. Must be strictly inside (0, 1) and strictly increasing.
    pub split_points: Vec<f64>,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            max_subdivisions: 60,
            split_points: Vec::new(),
        }
    }
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, max_subdivisions: u32, split_points: Vec<f64>) -> Result<Self> {
        if abs_tol.is_nan() || abs_tol <= 0.0 {
            return Err(Error::Domain {
                what: "quadrature abs_tol",
                value: abs_tol,
            });
        }
        let spec = QuadratureSpec {
            abs_tol,
            max_subdivisions,
            split_points,
        };
        spec.check_splits()?;
        Ok(spec)
    }

    /// Default tolerances with the given split points.
    pub fn with_splits(split_points: Vec<f64>) -> Result<Self> {
        let spec = QuadratureSpec {
            split_points,
            ..QuadratureSpec::default()
        };
        spec.check_splits()?;
        Ok(spec)
    }

    fn check_splits(&self) -> Result<()> {
        for (i, &s) in self.split_points.iter().enumerate() {
            if !(s > 0.0 && s < 1.0) {
                return Err(Error::Domain {
                    what: "split point",
                    value: s,
                });
            }
            if i > 0 && s <= self.split_points[i - 1] {
                return Err(Error::Domain {
                    what: "split point (must increase)",
                    value: s,
                });
            }
        }
        Ok(())
    }
}

/// 15-point Gauss-Legendre nodes and weights on [-1, 1], computed once by
/// Newton iteration on the Legendre recurrence.
fn gl15_table() -> &'static [(f64, f64); 15] {
    static TABLE: OnceLock<[(f64, f64); 15]> = OnceLock::new();
    TABLE.get_or_init(|| {
        const N: usize = 15;
        let mut out = [(0.0f64, 0.0f64); N];
        let mut filled = 0;
        for i in 0..N.div_ceil(2) {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (N as f64 + 0.5)).cos();
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = 1.0f64;
                let mut p2 = 0.0f64;
                for j in 0..N {
                    let p3 = p2;
                    p2 = p1;
                    p1 = (((2 * j + 1) as f64) * z * p2 - j as f64 * p3) / (j as f64 + 1.0);
                }
                pp = N as f64 * (z * p1 - p2) / (z * z - 1.0);
                let z1 = z;
                z -= p1 / pp;
                if (z - z1).abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * pp * pp);
            if i == (N - 1) / 2 {
                // Center node of the odd rule; Newton leaves it within one ulp
                // of zero.
                out[filled] = (0.0, w);
                filled += 1;
            } else {
                out[filled] = (z, w);
                out[filled + 1] = (-z, w);
                filled += 2;
            }
        }
        debug_assert_eq!(filled, N);
        out
    })
}

/// Single 15-point Gauss-Legendre panel over [a, b].
fn gl15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for &(z, w) in gl15_table() {
        acc += w * f(c + h * z);
    }
    acc * h
}

/// Narrower than this, an interval is accepted as-is; the integrands are
/// bounded away from the troublesome endpoint inside every segment, so this
/// only guards against bisecting forever on a rounding-level disagreement.
const MIN_PANEL_WIDTH: f64 = 1e-14;

fn adaptive_segment(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
    let whole = gl15(f, a, b);
    let mid = 0.5 * (a + b);
    let halves = gl15(f, a, mid) + gl15(f, mid, b);
    let err = (halves - whole).abs();
    if err <= tol || b - a <= MIN_PANEL_WIDTH {
        return Ok(halves);
    }
    if depth == 0 {
        return Err(Error::QuadratureBudget {
            estimate: halves,
            error_bound: err,
        });
    }
    Ok(adaptive_segment(f, a, mid, 0.5 * tol, depth - 1)?
        + adaptive_segment(f, mid, b, 0.5 * tol, depth - 1)?)
}

/// Integrate the leading segment (0, b]: Gauss-Legendre on dyadic panels
/// [b/2^{j+1}, b/2^j], stopping once a panel contributes less than
/// abs_tol/4 in magnitude. The integrands this crate meets decay or flatten
/// toward 0 after at most a few panels, so the dropped tail is bounded by
/// the final panel's contribution.
fn dyadic_segment(f: &impl Fn(f64) -> f64, b: f64, abs_tol: f64, max_levels: u32) -> Result<f64> {
    let mut acc = 0.0;
    let mut hi = b;
    let mut last = f64::INFINITY;
    for level in 0..max_levels.max(1) {
        let lo = 0.5 * hi;
        let panel = gl15(f, lo, hi);
        acc += panel;
        last = panel.abs();
        // Require at least two panels so a vanishing outer edge (for example
        // a rate integrand touching zero at its crossing) cannot stop the
        // walk before it sees the interior.
        if level >= 1 && last < 0.25 * abs_tol {
            return Ok(acc);
        }
        hi = lo;
    }
    Err(Error::QuadratureBudget {
        estimate: acc,
        error_bound: last,
    })
}

/// Adaptive integral of `f` over (0, 1) under the given spec.
///
/// The first segment (down to 0) always uses the dyadic walk; interior
/// segments between split points use recursive bisection with the tolerance
/// shared out in proportion to segment length.
pub fn integrate(f: impl Fn(f64) -> f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.check_splits()?;
    let first_end = spec.split_points.first().copied().unwrap_or(1.0);
    let mut total = dyadic_segment(&f, first_end, spec.abs_tol, spec.max_subdivisions)?;
    let mut bounds = Vec::with_capacity(spec.split_points.len() + 1);
    bounds.extend_from_slice(&spec.split_points);
    bounds.push(1.0);
    for pair in bounds.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        total += adaptive_segment(&f, a, b, spec.abs_tol * (b - a), spec.max_subdivisions)?;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// finite-N points
// ---------------------------------------------------------------------------

/// Water-filling point for an explicit spectrum, normalized by the full walk
/// length `n` (the spectrum may be shorter when zero eigenvalues are
/// implicit):
///
/// distortion = (1/n) sum min(theta, lambda_k),
/// rate = (1/2n) sum over lambda_k > theta of log2(lambda_k / theta).
pub fn finite_n_rd_point(eigenvalues: &[f64], theta: f64, n: usize) -> Result<RdPoint> {
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::Domain {
            what: "water level theta",
            value: theta,
        });
    }
    if n == 0 || n < eigenvalues.len() {
        return Err(Error::LengthMismatch {
            what: "normalization length n vs spectrum",
            expected: eigenvalues.len(),
            got: n,
        });
    }
    let mut dist = 0.0;
    let mut rate = 0.0;
    for &lam in eigenvalues {
        if lam < 0.0 {
            return Err(Error::Domain {
                what: "eigenvalue",
                value: lam,
            });
        }
        dist += theta.min(lam);
        if lam > theta {
            rate += (lam / theta).log2();
        }
    }
    let nf = n as f64;
    Ok(RdPoint {
        theta,
        rate: rate / (2.0 * nf),
        distortion: dist / nf,
    })
}

// ---------------------------------------------------------------------------
// asymptotic points
// ---------------------------------------------------------------------------

/// Rate integral for a density at water level theta: the band integral of
/// max(0, log2(density/theta)) divided by 2M. When theta is at or below the
/// band minimum the positive part is the whole log and the integral
/// collapses to the closed form log2_band_integral - log2(theta).
fn band_rate(density: SpectralDensity, m: usize, theta: f64) -> Result<f64> {
    let two_m = 2.0 * m as f64;
    match density.crossing(theta) {
        None => Ok((density.log2_band_integral() - theta.log2()) / two_m),
        Some(split) => {
            let spec = QuadratureSpec::with_splits(vec![split])?;
            let raw = integrate(
                |phi| {
                    let s = density.value_unchecked(phi);
                    if s > theta {
                        (s / theta).log2()
                    } else {
                        0.0
                    }
                },
                &spec,
            )?;
            Ok(raw / two_m)
        }
    }
}

/// Distortion integral for a density at water level theta: the band integral
/// of min(theta, density), times the density's distortion scale. Below the
/// band minimum the integrand is constant and the integral is just theta.
fn band_distortion(density: SpectralDensity, theta: f64) -> Result<f64> {
    match density.crossing(theta) {
        None => Ok(density.distortion_scale() * theta),
        Some(split) => {
            let spec = QuadratureSpec::with_splits(vec![split])?;
            let raw = integrate(|phi| theta.min(density.value_unchecked(phi)), &spec)?;
            Ok(density.distortion_scale() * raw)
        }
    }
}

/// Asymptotic water-filling point for a spectral density at water level
/// theta. `m` is the decimation factor carried by the rate normalization;
/// for a shifted density it must match the density's own factor.
pub fn asymptotic_rd_point(density: SpectralDensity, theta: f64, m: usize) -> Result<RdPoint> {
    if !theta.is_finite() || theta <= 0.0 {
        return Err(Error::Domain {
            what: "water level theta",
            value: theta,
        });
    }
    check_factor(density, m)?;
    Ok(RdPoint {
        theta,
        rate: band_rate(density, m, theta)?,
        distortion: band_distortion(density, theta)?,
    })
}

fn check_factor(density: SpectralDensity, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain {
            what: "decimation factor M",
            value: 0.0,
        });
    }
    if let SpectralDensity::Shifted { m: md } = density {
        if md != m {
            return Err(Error::Domain {
                what: "decimation factor M (does not match shifted density)",
                value: m as f64,
            });
        }
    }
    Ok(())
}

/// Invert the rate map: find theta with band rate equal to `rate`.
///
/// Bisection on log theta. The initial bracket is [2^(-2MR)/16,
/// max(4, 4 x the density's maximum over a 64-point grid)], widened
/// geometrically if the target rate falls outside it.
pub fn rate_to_water_level(density: SpectralDensity, m: usize, rate: f64) -> Result<f64> {
    if !rate.is_finite() || rate <= 0.0 {
        return Err(Error::Domain {
            what: "target rate",
            value: rate,
        });
    }
    check_factor(density, m)?;
    let rate_at = |theta: f64| band_rate(density, m, theta);

    let mut lo = (-2.0 * m as f64 * rate - 4.0).exp2().max(f64::MIN_POSITIVE);
    let grid_max = density.value_unchecked(1.0 / 64.0);
    let mut hi = (4.0 * grid_max).max(4.0);
    for _ in 0..60 {
        if rate_at(lo)? > rate {
            break;
        }
        lo /= 16.0;
        if lo < 1e-300 {
            return Err(Error::BracketFailure { rate });
        }
    }
    for _ in 0..60 {
        if rate_at(hi)? < rate {
            break;
        }
        hi *= 16.0;
        if !hi.is_finite() {
            return Err(Error::BracketFailure { rate });
        }
    }

    let mut log_lo = lo.ln();
    let mut log_hi = hi.ln();
    let mut best = 0.5 * (log_lo + log_hi);
    for _ in 0..BISECT_MAX_ITER {
        best = 0.5 * (log_lo + log_hi);
        let r_mid = rate_at(best.exp())?;
        if (r_mid - rate).abs() <= BISECT_REL_TOL * rate {
            return Ok(best.exp());
        }
        if r_mid > rate {
            // Rate decreases in theta: still above target, move up.
            log_lo = best;
        } else {
            log_hi = best;
        }
    }
    let theta = best.exp();
    if (rate_at(theta)? - rate).abs() <= BISECT_ABS_TOL {
        Ok(theta)
    } else {
        Err(Error::BracketFailure { rate })
    }
}
