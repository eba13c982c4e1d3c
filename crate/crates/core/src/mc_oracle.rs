//! Independent cross-checks for the closed forms: a dense symmetric
//! eigensolver and Monte Carlo estimators driven by a counter-based RNG.
//!
//! Everything here is deliberately built from first principles rather than
//! from the formulas being checked: eigenvalues come out of plain Jacobi
//! sweeps on the explicit covariance, and the sampled paths go through the
//! literal decimate / compress / interpolate pipeline. Estimates carry a
//! standard error so callers can assert agreement in sigma units.
//!
//! Sampling is reproducible by construction: each (seed, trial, stream)
//! triple keys an independent counter RNG, so estimates do not depend on
//! evaluation order and a fixed seed always yields the same bytes.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::spectra::{
    berger_eigenvalues, interpolation_weights, walk_eigenvector, WalkDims, DIM_CAP,
};

/// Stream id for walk increments.
const STREAM_WALK: u64 = 0;
/// Stream id for test-channel noise.
const STREAM_NOISE: u64 = 1;

// ---------------------------------------------------------------------------
// counter-based RNG
// ---------------------------------------------------------------------------

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer: a bijective avalanche mix on 64 bits.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic counter RNG: output i is the SplitMix64 finalizer applied
/// to key + i * gamma, with the key derived by chained mixing of (seed,
/// trial, stream). Draws depend only on the triple and the position in the
/// stream, never on what other streams consumed.
#[derive(Debug, Clone)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64, trial: u64, stream: u64) -> Self {
        let mut key = mix64(seed.wrapping_mul(GOLDEN_GAMMA).wrapping_add(1));
        key = mix64(key ^ trial.wrapping_mul(0xD134_2543_DE82_EF95));
        key = mix64(key ^ stream.wrapping_mul(GOLDEN_GAMMA));
        CounterRng { key, counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        let x = mix64(
            self.key
                .wrapping_add(self.counter.wrapping_mul(GOLDEN_GAMMA)),
        );
        self.counter += 1;
        x
    }

    /// Uniform draw strictly inside (0, 1): the top 53 bits centered on
    /// half-steps of 2^-53, so neither endpoint can occur.
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw via the inverse CDF.
    pub fn next_gaussian(&mut self) -> f64 {
        normal_quantile(self.next_uniform())
    }
}

/// Inverse standard normal CDF (Acklam's rational approximation), absolute
/// error below 1.2e-9 across (0, 1). Accurate far into the tails, which
/// matters because the uniform input can get as close to 0 or 1 as 2^-54.
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    assert!(
        p > 0.0 && p < 1.0,
        "quantile argument must lie strictly in (0, 1)"
    );
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -((((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0))
    }
}

// ---------------------------------------------------------------------------
// dense eigensolver
// ---------------------------------------------------------------------------

const JACOBI_MAX_SWEEPS: usize = 64;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, in
/// descending order. Converges to machine precision; errors out if the
/// input is visibly asymmetric or the sweep budget runs out.
pub fn jacobi_eigenvalues(mat: &Matrix) -> Result<Vec<f64>> {
    if !mat.is_square() {
        return Err(Error::InvalidDims {
            n: mat.rows(),
            m: mat.cols(),
            reason: "eigensolver needs a square matrix",
        });
    }
    let n = mat.rows();
    let scale = mat.max_abs_entry().max(f64::MIN_POSITIVE);
    let asym = mat.max_abs_asymmetry();
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric {
            max_asymmetry: asym,
        });
    }

    // Work on the symmetrized copy so rounding asymmetry cannot accumulate.
    let mut a = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (mat.get(i, j) + mat.get(j, i));
        }
    }
    if n == 1 {
        return Ok(vec![a[0]]);
    }

    let frob: f64 = a
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    let target = 1e-15 * frob;
    // Zeroing an entry below this moves the spectrum by at most the
    // Frobenius norm of everything dropped, which stays under the
    // convergence target even if a full sweep drops at this size.
    let drop = target / (2.0 * n as f64);
    let mut converged = false;
    let mut off = 0.0;
    for sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off_sq = 0.0;
        let mut off_abs = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                let v = a[p * n + q];
                off_sq += v * v;
                off_abs += v.abs();
            }
        }
        off = (2.0 * off_sq).sqrt();
        if off <= target {
            converged = true;
            break;
        }
        // During the opening sweeps, entries well below the current average
        // are left for a later pass; the rotations that would touch them
        // first are the ones doing the real work.
        let tresh = if sweep < 3 {
            0.2 * off_abs / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                if apq.abs() <= drop {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if apq.abs() < tresh {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Left rotation on rows p and q. The right rotation only
                // alters columns p and q, whose final values follow from the
                // rotated 2x2 block and row-column symmetry, so the strided
                // column pass below is write-only.
                let (head, tail) = a.split_at_mut(q * n);
                let row_p = &mut head[p * n..p * n + n];
                let row_q = &mut tail[..n];
                for j in 0..n {
                    let apj = row_p[j];
                    let aqj = row_q[j];
                    row_p[j] = c * apj - s * aqj;
                    row_q[j] = s * apj + c * aqj;
                }
                row_p[p] = app - t * apq;
                row_p[q] = 0.0;
                row_q[p] = 0.0;
                row_q[q] = aqq + t * apq;
                for j in 0..n {
                    a[j * n + p] = a[p * n + j];
                    a[j * n + q] = a[q * n + j];
                }
            }
        }
    }
    if !converged {
        return Err(Error::Inconsistent {
            what: "eigensolver sweep budget",
            value: off,
        });
    }
    let mut values: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    values.sort_by(|x, y| y.partial_cmp(x).expect("diagonal entries are finite"));
    Ok(values)
}

// ---------------------------------------------------------------------------
// path sampling
// ---------------------------------------------------------------------------

/// Sample a standard Gaussian walk of length n: entry s-1 holds the walk
/// value after s unit-variance steps (the pinned origin is implicit).
pub fn sample_walk(rng: &mut CounterRng, n: usize) -> Vec<f64> {
    let mut path = Vec::with_capacity(n);
    let mut acc = 0.0;
    for _ in 0..n {
        acc += rng.next_gaussian();
        path.push(acc);
    }
    path
}

/// Keep every M-th sample of a walk path: entry j-1 holds the walk value at
/// position j M.
pub fn decimate(path: &[f64], dims: WalkDims) -> Result<Vec<f64>> {
    if path.len() != dims.n() {
        return Err(Error::LengthMismatch {
            what: "walk path",
            expected: dims.n(),
            got: path.len(),
        });
    }
    Ok((1..=dims.n_m()).map(|j| path[j * dims.m() - 1]).collect())
}

/// Linear interpolation of the full path from the kept samples, with the
/// origin pinned at zero. Exact at the kept positions.
pub fn interpolate(kept: &[f64], dims: WalkDims) -> Result<Vec<f64>> {
    if kept.len() != dims.n_m() {
        return Err(Error::LengthMismatch {
            what: "kept samples",
            expected: dims.n_m(),
            got: kept.len(),
        });
    }
    let mut out = Vec::with_capacity(dims.n());
    for s in 1..=dims.n() {
        let mut value = 0.0;
        for (idx, weight) in interpolation_weights(s, dims) {
            if idx >= 1 && weight != 0.0 {
                value += weight * kept[idx - 1];
            }
        }
        out.push(value);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// test channel
// ---------------------------------------------------------------------------

/// The optimal Gaussian test channel for compressing the kept samples at
/// water level theta_y, realized in the eigenbasis of their covariance.
///
/// Components with eigenvalue above the water level are scaled and get
/// independent noise so the component error variance is exactly theta_y;
/// components at or below it are dropped entirely (error variance equal to
/// the eigenvalue). This realizes the reverse water-filling error spectrum
/// min(theta_y, eigenvalue).
#[derive(Debug, Clone)]
pub struct TestChannel {
    dims: WalkDims,
    theta_y: f64,
    eigenvalues: Vec<f64>,
    vectors: Vec<Vec<f64>>,
}

impl TestChannel {
    pub fn new(dims: WalkDims, theta_y: f64) -> Result<Self> {
        if !theta_y.is_finite() || theta_y <= 0.0 {
            return Err(Error::Domain {
                what: "water level theta_y",
                value: theta_y,
            });
        }
        let n_m = dims.n_m();
        let mf = dims.m() as f64;
        let eigenvalues: Vec<f64> = berger_eigenvalues(n_m).iter().map(|l| mf * l).collect();
        let vectors: Vec<Vec<f64>> = (1..=n_m).map(|k| walk_eigenvector(k, n_m)).collect();
        Ok(TestChannel {
            dims,
            theta_y,
            eigenvalues,
            vectors,
        })
    }

    pub fn theta_y(&self) -> f64 {
        self.theta_y
    }

    /// Push one block of kept samples through the channel, drawing the
    /// component noises from `rng`. The rng is consumed per component in a
    /// fixed order, so a given (seed, trial) always produces the same
    /// reconstruction.
    pub fn transmit(&self, rng: &mut CounterRng, kept: &[f64]) -> Result<Vec<f64>> {
        let n_m = self.dims.n_m();
        if kept.len() != n_m {
            return Err(Error::LengthMismatch {
                what: "kept samples",
                expected: n_m,
                got: kept.len(),
            });
        }
        let mut recon = vec![0.0; n_m];
        for (lam, u) in self.eigenvalues.iter().zip(&self.vectors) {
            if *lam <= self.theta_y {
                // Component fully below water: reconstruct as zero, burn no
                // randomness so the draw sequence does not depend on theta_y.
                continue;
            }
            let gain = 1.0 - self.theta_y / lam;
            let noise_sd = (self.theta_y * gain).sqrt();
            let coeff: f64 = u.iter().zip(kept).map(|(ui, yi)| ui * yi).sum();
            let sent = gain * coeff + noise_sd * rng.next_gaussian();
            for (slot, ui) in recon.iter_mut().zip(u) {
                *slot += sent * ui;
            }
        }
        Ok(recon)
    }
}

// ---------------------------------------------------------------------------
// Monte Carlo estimates
// ---------------------------------------------------------------------------

/// A Monte Carlo estimate with its standard error across trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
}

impl McEstimate {
    /// Distance from a reference value in standard errors.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.mean - reference;
        if self.std_error > 0.0 {
            diff / self.std_error
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Running mean and standard error over trials.
#[derive(Debug, Clone, Copy, Default)]
struct MeanAccumulator {
    sum: f64,
    sum_sq: f64,
    count: usize,
}

impl MeanAccumulator {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sum_sq += x * x;
        self.count += 1;
    }

    fn estimate(&self) -> McEstimate {
        let n = self.count as f64;
        let mean = self.sum / n;
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        McEstimate {
            mean,
            std_error: (var / n).sqrt(),
        }
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials < 2 {
        return Err(Error::Domain {
            what: "trial count",
            value: trials as f64,
        });
    }
    Ok(())
}

/// Monte Carlo estimate of the per-sample interpolation MSE: sample walks,
/// decimate, linearly interpolate, and average the squared error.
pub fn empirical_mmse(dims: WalkDims, seed: u64, trials: usize) -> Result<McEstimate> {
    check_trials(trials)?;
    let mut acc = MeanAccumulator::default();
    for trial in 0..trials {
        let mut rng = CounterRng::new(seed, trial as u64, STREAM_WALK);
        let path = sample_walk(&mut rng, dims.n());
        let kept = decimate(&path, dims)?;
        let approx = interpolate(&kept, dims)?;
        let mse: f64 = path
            .iter()
            .zip(&approx)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            / dims.n() as f64;
        acc.push(mse);
    }
    Ok(acc.estimate())
}

/// Monte Carlo interpolation error variance by offset inside a decimation
/// block: entry r estimates the squared error at offset r from the previous
/// kept sample, averaged over blocks. Entries 0 and M sit on kept samples
/// and are exactly zero.
pub fn empirical_bridge_profile(
    dims: WalkDims,
    seed: u64,
    trials: usize,
) -> Result<Vec<McEstimate>> {
    check_trials(trials)?;
    let m = dims.m();
    let n_m = dims.n_m();
    let mut accs = vec![MeanAccumulator::default(); m + 1];
    for trial in 0..trials {
        let mut rng = CounterRng::new(seed, trial as u64, STREAM_WALK);
        let path = sample_walk(&mut rng, dims.n());
        let kept = decimate(&path, dims)?;
        let approx = interpolate(&kept, dims)?;
        for (r, acc) in accs.iter_mut().enumerate() {
            let mut sum = 0.0;
            let mut blocks = 0usize;
            for j in 0..n_m {
                let s = j * m + r;
                if s >= 1 && s <= dims.n() {
                    let e = path[s - 1] - approx[s - 1];
                    sum += e * e;
                    blocks += 1;
                }
            }
            acc.push(sum / blocks as f64);
        }
    }
    Ok(accs.iter().map(MeanAccumulator::estimate).collect())
}

/// Monte Carlo estimate of the walk covariance E[X_i X_j] for a walk of
/// length n, averaged over trials.
pub fn empirical_covariance(n: usize, seed: u64, trials: usize) -> Result<Matrix> {
    if n == 0 || n > DIM_CAP {
        return Err(Error::DimCapExceeded { n, cap: DIM_CAP });
    }
    check_trials(trials)?;
    let mut sums = Matrix::zeros(n, n);
    for trial in 0..trials {
        let mut rng = CounterRng::new(seed, trial as u64, STREAM_WALK);
        let path = sample_walk(&mut rng, n);
        for i in 0..n {
            for j in 0..n {
                sums.set(i, j, sums.get(i, j) + path[i] * path[j]);
            }
        }
    }
    let scale = 1.0 / trials as f64;
    Ok(Matrix::from_fn(n, n, |i, j| sums.get(i, j) * scale))
}

/// End-to-end Monte Carlo estimate of the compress-estimate distortion:
/// sample a walk, decimate, push the kept samples through the test channel,
/// interpolate the reconstruction, and average the squared error against
/// the original walk. The average runs over the block anchored at the
/// pinned origin, samples 0 through N-1, matching `finite_n_ce_distortion`;
/// the origin contributes zero error and the final kept sample is excluded.
pub fn empirical_ce_distortion(
    dims: WalkDims,
    theta_y: f64,
    seed: u64,
    trials: usize,
) -> Result<McEstimate> {
    check_trials(trials)?;
    let channel = TestChannel::new(dims, theta_y)?;
    let mut acc = MeanAccumulator::default();
    for trial in 0..trials {
        let mut walk_rng = CounterRng::new(seed, trial as u64, STREAM_WALK);
        let mut noise_rng = CounterRng::new(seed, trial as u64, STREAM_NOISE);
        let path = sample_walk(&mut walk_rng, dims.n());
        let kept = decimate(&path, dims)?;
        let recon = channel.transmit(&mut noise_rng, &kept)?;
        let approx = interpolate(&recon, dims)?;
        let mse: f64 = path[..dims.n() - 1]
            .iter()
            .zip(&approx)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            / dims.n() as f64;
        acc.push(mse);
    }
    Ok(acc.estimate())
}

/// Empirical second moments of the test-channel error on the kept samples,
/// plus the cross moment E[reconstruction * error] that must vanish for the
/// optimal channel.
#[derive(Debug, Clone)]
pub struct EmpiricalChannelMoments {
    /// Per kept sample: error variance E[eps_j^2].
    pub var: Vec<McEstimate>,
    /// Per adjacent pair: error covariance E[eps_j eps_{j+1}].
    pub lag1: Vec<McEstimate>,
    /// Per kept sample: cross moment E[recon_j eps_j].
    pub cross: Vec<McEstimate>,
}

/// Estimate the channel error moments by simulation, for comparison against
/// the closed-form water-filling spectrum.
pub fn empirical_channel_moments(
    dims: WalkDims,
    theta_y: f64,
    seed: u64,
    trials: usize,
) -> Result<EmpiricalChannelMoments> {
    check_trials(trials)?;
    let channel = TestChannel::new(dims, theta_y)?;
    let n_m = dims.n_m();
    let mut var = vec![MeanAccumulator::default(); n_m];
    let mut lag1 = vec![MeanAccumulator::default(); n_m.saturating_sub(1)];
    let mut cross = vec![MeanAccumulator::default(); n_m];
    for trial in 0..trials {
        let mut walk_rng = CounterRng::new(seed, trial as u64, STREAM_WALK);
        let mut noise_rng = CounterRng::new(seed, trial as u64, STREAM_NOISE);
        let path = sample_walk(&mut walk_rng, dims.n());
        let kept = decimate(&path, dims)?;
        let recon = channel.transmit(&mut noise_rng, &kept)?;
        let eps: Vec<f64> = kept.iter().zip(&recon).map(|(y, r)| y - r).collect();
        for j in 0..n_m {
            var[j].push(eps[j] * eps[j]);
            cross[j].push(recon[j] * eps[j]);
            if j + 1 < n_m {
                lag1[j].push(eps[j] * eps[j + 1]);
            }
        }
    }
    Ok(EmpiricalChannelMoments {
        var: var.iter().map(MeanAccumulator::estimate).collect(),
        lag1: lag1.iter().map(MeanAccumulator::estimate).collect(),
        cross: cross.iter().map(MeanAccumulator::estimate).collect(),
    })
}
