//! Covariance models and spectra for the decimated random walk.
//!
//! The source is the Gaussian random walk X_n (variance-1 increments), with
//! Cov(X_i, X_j) = min(i, j). Decimating by M keeps every M-th sample, a
//! random walk with variance-M increments; linearly interpolating the
//! decimated samples back to full length gives the process whose compression
//! behavior this crate studies.
//!
//! Three spectra matter:
//! * the exact eigenvalues of the walk covariance, available in closed form
//!   at every finite N (`berger_eigenvalues`), with explicit sine
//!   eigenvectors;
//! * the closed-form large-N approximation to the nonzero eigenvalues of the
//!   interpolated covariance (`interp_eigenvalues_asymptotic`);
//! * the limiting spectral densities on the normalized frequency band (0, 1]:
//!   `Standard` for the walk itself and `Shifted` for the interpolated
//!   process, which subtracts a constant (1 - M^-2)/6.
//!
//! Everything in this module is a closed form; the matching brute-force
//! routes live in `mc_oracle`.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Default cap on covariance matrix side length (memory guard).
pub const DIM_CAP: usize = 8192;

/// Tiny negative eigenvalues from finite arithmetic are clamped to zero up to
/// this magnitude; anything more negative is an error.
pub const EIGENVALUE_CLAMP: f64 = 1e-10;

// ---------------------------------------------------------------------------
// dimensions
// ---------------------------------------------------------------------------

/// Validated problem dimensions: walk length N and decimation factor M with
/// N divisible by M.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkDims {
    n: usize,
    m: usize,
}

impl WalkDims {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDims {
                n,
                m,
                reason: "M must be at least 1",
            });
        }
        if n == 0 {
            return Err(Error::InvalidDims {
                n,
                m,
                reason: "N must be at least 1",
            });
        }
        if !n.is_multiple_of(m) {
            return Err(Error::InvalidDims {
                n,
                m,
                reason: "N must be divisible by M",
            });
        }
        Ok(WalkDims { n, m })
    }

    /// Full walk length N.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Decimation factor M.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Decimated length N_M = N / M.
    pub fn n_m(&self) -> usize {
        self.n / self.m
    }
}

// ---------------------------------------------------------------------------
// covariance models
// ---------------------------------------------------------------------------

/// Which process a covariance matrix (or spectrum) describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CovKind {
    /// The full-length walk, Cov = min(i, j), size N.
    Source,
    /// Every M-th sample, Cov = M min(i, j), size N_M.
    Decimated,
    /// The linear interpolation of the decimated samples, size N but rank
    /// at most N_M.
    Interpolated,
}

/// A concrete covariance matrix together with its provenance.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    kind: CovKind,
    dims: WalkDims,
    entries: Matrix,
}

impl CovarianceMatrix {
    pub fn kind(&self) -> CovKind {
        self.kind
    }

    pub fn dims(&self) -> WalkDims {
        self.dims
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }
}

/// Build the covariance matrix of the given kind, rejecting sizes above
/// [`DIM_CAP`].
pub fn covariance_matrix(kind: CovKind, dims: WalkDims) -> Result<CovarianceMatrix> {
    covariance_matrix_with_cap(kind, dims, DIM_CAP)
}

/// Same as [`covariance_matrix`] with an explicit size cap.
pub fn covariance_matrix_with_cap(
    kind: CovKind,
    dims: WalkDims,
    cap: usize,
) -> Result<CovarianceMatrix> {
    let side = match kind {
        CovKind::Source | CovKind::Interpolated => dims.n(),
        CovKind::Decimated => dims.n_m(),
    };
    if side > cap {
        return Err(Error::DimCapExceeded { n: side, cap });
    }
    let entries = match kind {
        CovKind::Source => Matrix::from_fn(side, side, |i, j| i.min(j) as f64 + 1.0),
        CovKind::Decimated => {
            let m = dims.m() as f64;
            Matrix::from_fn(side, side, |i, j| m * (i.min(j) as f64 + 1.0))
        }
        CovKind::Interpolated => {
            let weights: Vec<_> = (1..=dims.n())
                .map(|s| interpolation_weights(s, dims))
                .collect();
            let m = dims.m() as f64;
            Matrix::from_fn(side, side, |i, j| {
                let mut acc = 0.0;
                for &(a, wa) in &weights[i] {
                    if a == 0 || wa == 0.0 {
                        continue;
                    }
                    for &(b, wb) in &weights[j] {
                        if b == 0 || wb == 0.0 {
                            continue;
                        }
                        acc += wa * wb * m * a.min(b) as f64;
                    }
                }
                acc
            })
        }
    };
    Ok(CovarianceMatrix {
        kind,
        dims,
        entries,
    })
}

// ---------------------------------------------------------------------------
// eigen system
// ---------------------------------------------------------------------------

/// Eigenvalues (descending) and optionally eigenvectors of a covariance
/// matrix. When vectors are present, row k of the matrix is the unit
/// eigenvector paired with `values[k]`.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    values: Vec<f64>,
    vectors: Option<Matrix>,
    kind: CovKind,
}

impl EigenSystem {
    /// Normalize raw eigensolver output: sort descending (permuting vector
    /// rows alongside) and clamp tiny negative values to zero. Values below
    /// -[`EIGENVALUE_CLAMP`] are rejected.
    pub fn new(values: Vec<f64>, vectors: Option<Matrix>, kind: CovKind) -> Result<Self> {
        if let Some((k, &v)) = values
            .iter()
            .enumerate()
            .find(|(_, &v)| v < -EIGENVALUE_CLAMP)
        {
            return Err(Error::NegativeEigenvalue { k: k + 1, value: v });
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).expect("NaN eigenvalue"));
        let sorted: Vec<f64> = order.iter().map(|&i| values[i].max(0.0)).collect();
        let vectors = vectors.map(|v| {
            assert_eq!(v.rows(), sorted.len(), "eigenvector row count mismatch");
            Matrix::from_fn(v.rows(), v.cols(), |i, j| v.get(order[i], j))
        });
        Ok(EigenSystem {
            values: sorted,
            vectors,
            kind,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> Option<&Matrix> {
        self.vectors.as_ref()
    }

    pub fn kind(&self) -> CovKind {
        self.kind
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

// ---------------------------------------------------------------------------
// interpolation floor
// ---------------------------------------------------------------------------

/// Mean squared error of linear interpolation from the decimated samples,
/// per source sample: (M - 1/M) / 6.
pub fn mmse_interpolation(m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain {
            what: "decimation factor M",
            value: 0.0,
        });
    }
    let mf = m as f64;
    Ok((mf - 1.0 / mf) / 6.0)
}

/// Interpolation error variance at offset r inside a decimation block:
/// r (M - r) / M, the variance of a Brownian bridge pinned at both block
/// ends. Offsets 0 and M are the pinned grid points.
pub fn bridge_variance(r: usize, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain {
            what: "decimation factor M",
            value: 0.0,
        });
    }
    if r > m {
        return Err(Error::Domain {
            what: "block offset r",
            value: r as f64,
        });
    }
    let (rf, mf) = (r as f64, m as f64);
    Ok(rf * (mf - rf) / mf)
}

// ---------------------------------------------------------------------------
// closed-form spectra
// ---------------------------------------------------------------------------

/// Exact eigenvalues of the walk covariance min(i, j) at length n, in
/// descending order: lambda_k = [2 sin((2k-1)/(2n+1) * pi/2)]^-2, k = 1..n.
pub fn berger_eigenvalues(n: usize) -> Vec<f64> {
    let denom = (2 * n + 1) as f64;
    (1..=n)
        .map(|k| {
            let s = 2.0 * ((2 * k - 1) as f64 / denom * std::f64::consts::FRAC_PI_2).sin();
            1.0 / (s * s)
        })
        .collect()
}

/// Entry `idx` (1-based) of the k-th unit eigenvector of the length-n walk
/// covariance: A sin((2k-1)/(2n+1) * pi * idx), with A fixed by explicit
/// normalization over idx = 1..n.
pub fn eigenvector_entry(k: usize, idx: usize, n: usize) -> f64 {
    assert!(k >= 1 && k <= n, "eigenvector index k out of range");
    assert!(idx >= 1 && idx <= n, "component index out of range");
    let tau = (2 * k - 1) as f64 / (2 * n + 1) as f64 * std::f64::consts::PI;
    let norm_sq: f64 = (1..=n).map(|i| (tau * i as f64).sin().powi(2)).sum();
    (tau * idx as f64).sin() / norm_sq.sqrt()
}

/// The full k-th unit eigenvector of the length-n walk covariance.
pub fn walk_eigenvector(k: usize, n: usize) -> Vec<f64> {
    assert!(k >= 1 && k <= n, "eigenvector index k out of range");
    let tau = (2 * k - 1) as f64 / (2 * n + 1) as f64 * std::f64::consts::PI;
    let mut v: Vec<f64> = (1..=n).map(|i| (tau * i as f64).sin()).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}

/// Closed-form large-N approximation to the N_M nonzero eigenvalues of the
/// interpolated covariance, descending:
/// lambda_k = M^2 [2 sin((2k-1) M / (2N+1) * pi/2)]^-2 - (M^2 - 1)/6.
///
/// Rejects any negative value by reporting the offending k.
pub fn interp_eigenvalues_asymptotic(dims: WalkDims) -> Result<Vec<f64>> {
    let m2 = (dims.m() * dims.m()) as f64;
    let shift = (m2 - 1.0) / 6.0;
    let denom = (2 * dims.n() + 1) as f64;
    let mut out = Vec::with_capacity(dims.n_m());
    for k in 1..=dims.n_m() {
        let arg = ((2 * k - 1) * dims.m()) as f64 / denom * std::f64::consts::FRAC_PI_2;
        let s = 2.0 * arg.sin();
        let lam = m2 / (s * s) - shift;
        if lam < 0.0 {
            return Err(Error::NegativeEigenvalue { k, value: lam });
        }
        out.push(lam);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// interpolation operator
// ---------------------------------------------------------------------------

/// Interpolation weights for source sample `s` (1-based): at most two
/// (decimated index, weight) pairs, where decimated index 0 stands for the
/// pinned origin Y_0 = 0 and must be dropped by the caller.
pub fn interpolation_weights(s: usize, dims: WalkDims) -> [(usize, f64); 2] {
    debug_assert!(s >= 1 && s <= dims.n());
    let m = dims.m();
    let block = s / m;
    let mf = m as f64;
    let left = ((block + 1) * m - s) as f64 / mf;
    let right = (s - block * m) as f64 / mf;
    [(block, left), (block + 1, right)]
}

/// The N x N_M matrix W mapping decimated samples to their linear
/// interpolation. Row jM has a single 1 in column j; rows between grid
/// points mix the two neighbors; rows in the first block lose the weight on
/// the pinned origin.
pub fn interpolation_matrix(dims: WalkDims) -> Matrix {
    let mut w = Matrix::zeros(dims.n(), dims.n_m());
    for s in 1..=dims.n() {
        for (idx, wt) in interpolation_weights(s, dims) {
            if idx >= 1 && idx <= dims.n_m() && wt != 0.0 {
                w.set(s - 1, idx - 1, wt);
            }
        }
    }
    w
}

/// The N_M x N_M symmetric matrix whose eigenvalues are exactly the nonzero
/// eigenvalues of the interpolated covariance W Sigma_Y W^T.
///
/// With Sigma_Y = L L^T (L = sqrt(M) times the all-ones lower triangle), the
/// nonzero spectrum of (W L)(W L)^T equals the spectrum of L^T (W^T W) L,
/// which expands to M times the double suffix sum of the Gram matrix W^T W.
pub fn interpolated_spectrum_matrix(dims: WalkDims) -> Matrix {
    let nm = dims.n_m();
    // Gram matrix G = W^T W, accumulated from the two nonzero weights per row.
    let mut g = Matrix::zeros(nm, nm);
    for s in 1..=dims.n() {
        let pairs = interpolation_weights(s, dims);
        for &(a, wa) in &pairs {
            if a == 0 || a > nm || wa == 0.0 {
                continue;
            }
            for &(b, wb) in &pairs {
                if b == 0 || b > nm || wb == 0.0 {
                    continue;
                }
                g.set(a - 1, b - 1, g.get(a - 1, b - 1) + wa * wb);
            }
        }
    }
    // B[i][j] = M * sum_{p >= i, q >= j} G[p][q], via suffix sums in place.
    let mf = dims.m() as f64;
    let mut b = g;
    for j in 0..nm {
        for i in (0..nm.saturating_sub(1)).rev() {
            let v = b.get(i, j) + b.get(i + 1, j);
            b.set(i, j, v);
        }
    }
    for i in 0..nm {
        for j in (0..nm.saturating_sub(1)).rev() {
            let v = b.get(i, j) + b.get(i, j + 1);
            b.set(i, j, v);
        }
    }
    for i in 0..nm {
        for j in 0..nm {
            b.set(i, j, mf * b.get(i, j));
        }
    }
    b
}

// ---------------------------------------------------------------------------
// spectral densities
// ---------------------------------------------------------------------------

/// Limiting spectral density on the normalized frequency band phi in (0, 1].
///
/// `Standard` is S(phi) = [2 sin(pi phi / 2)]^-2, the density of the walk
/// (and, scaled by M, of the decimated walk). `Shifted` subtracts the
/// constant (1 - M^-2)/6 and describes the interpolated process; at M = 1 it
/// coincides with `Standard`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralDensity {
    Standard,
    Shifted { m: usize },
}

impl SpectralDensity {
    /// The constant subtracted from the standard density: 0 or (1 - M^-2)/6.
    pub fn shift(&self) -> f64 {
        match self {
            SpectralDensity::Standard => 0.0,
            SpectralDensity::Shifted { m } => {
                let mf = *m as f64;
                (1.0 - 1.0 / (mf * mf)) / 6.0
            }
        }
    }

    /// Density value at phi in (0, 1].
    pub fn value(&self, phi: f64) -> Result<f64> {
        if !(phi > 0.0 && phi <= 1.0) {
            return Err(Error::Domain {
                what: "frequency phi",
                value: phi,
            });
        }
        Ok(self.value_unchecked(phi))
    }

    /// Density value without the domain check, for quadrature nodes that are
    /// interior to (0, 1) by construction.
    pub fn value_unchecked(&self, phi: f64) -> f64 {
        let s = 2.0 * (std::f64::consts::FRAC_PI_2 * phi).sin();
        1.0 / (s * s) - self.shift()
    }

    /// Minimum of the density over the band, attained at phi = 1:
    /// 1/4 for `Standard`, (1 + 2 M^-2)/12 for `Shifted`.
    pub fn min_value(&self) -> f64 {
        0.25 - self.shift()
    }

    /// The band integral of log2(density), in closed form.
    ///
    /// Writing c for the shift, the density is
    /// ((1 - 2c) + 2c cos(pi phi)) / (2 - 2 cos(pi phi)), and the identity
    /// integral of ln(a + b cos(pi phi)) over (0, 1) = ln((a + sqrt(a^2 -
    /// b^2))/2) gives log2(((1 - 2c) + sqrt(1 - 4c)) / 2). For `Standard`
    /// (c = 0) this is exactly zero: the walk covariance has unit
    /// determinant.
    pub fn log2_band_integral(&self) -> f64 {
        let c = self.shift();
        (((1.0 - 2.0 * c) + (1.0 - 4.0 * c).sqrt()) / 2.0).log2()
    }

    /// Multiplier turning the band integral of min(theta, density) into the
    /// per-source-sample distortion: 1 for `Standard`, M for `Shifted`.
    pub fn distortion_scale(&self) -> f64 {
        match self {
            SpectralDensity::Standard => 1.0,
            SpectralDensity::Shifted { m } => *m as f64,
        }
    }

    /// The frequency where the density crosses level `theta`, strictly inside
    /// (0, 1): phi = (2/pi) asin(1 / (2 sqrt(theta + shift))). `None` when
    /// theta is at or below the band minimum (no crossing: the whole band
    /// sits above the water level).
    pub fn crossing(&self, theta: f64) -> Option<f64> {
        if theta <= self.min_value() {
            return None;
        }
        let arg = (1.0 / (2.0 * (theta + self.shift()).sqrt())).min(1.0);
        let phi = std::f64::consts::FRAC_2_PI * arg.asin();
        if phi < 1.0 {
            Some(phi)
        } else {
            None
        }
    }
}
