//! The validation suite behind the `validate` subcommand.
//!
//! Twelve criteria, each measuring its quantities against a stated
//! requirement. Everything is deterministic for a fixed seed: reports carry
//! no timestamps and the Monte Carlo pieces use the counter RNG, so two runs
//! with the same level and seed produce identical bytes.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rdwalk::mc_oracle::{
    empirical_bridge_profile, empirical_channel_moments, empirical_mmse, jacobi_eigenvalues,
    CounterRng,
};
use rdwalk::schemes::{
    ce_distortion_at_water_level, distortion_at_rate, ec_threshold, finite_n_ce_distortion,
    high_rate_coefficient_gap, high_rate_distortion, interpolated_error_mse, max_relative_gap,
    source_drf, test_channel_moments, ChannelMoments, Scheme,
};
use rdwalk::spectra::{
    berger_eigenvalues, bridge_variance, covariance_matrix, interp_eigenvalues_asymptotic,
    interpolated_spectrum_matrix, interpolation_weights, mmse_interpolation, CovKind,
    SpectralDensity, WalkDims,
};
use rdwalk::waterfill::{asymptotic_rd_point, finite_n_rd_point, integrate, QuadratureSpec};

use crate::curve::{evaluate, CurveMode, CurveRequest, SchemeColumn, Spacing};

/// How much of the suite runs. `Fast` skips the checks that need dimension
/// 4096 state and caps Monte Carlo at 200 trials; `Full` runs everything.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Fast,
    Full,
}

impl Level {
    pub fn label(self) -> &'static str {
        match self {
            Level::Fast => "fast",
            Level::Full => "full",
        }
    }

    fn mc_trials(self, full_trials: usize) -> usize {
        match self {
            Level::Fast => full_trials.min(200),
            Level::Full => full_trials,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        }
    }
}

/// Outcome of one criterion: its measured-vs-required lines and the verdict.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub status: Status,
    pub lines: Vec<String>,
}

pub const CRITERION_COUNT: usize = 12;

/// Measurement lines of a criterion in progress.
struct Checks {
    lines: Vec<String>,
    failed: bool,
}

impl Checks {
    fn new() -> Self {
        Checks {
            lines: Vec::new(),
            failed: false,
        }
    }

    fn require(&mut self, ok: bool, line: String) {
        self.lines
            .push(format!("{line} [{}]", if ok { "ok" } else { "FAIL" }));
        if !ok {
            self.failed = true;
        }
    }

    fn note(&mut self, line: String) {
        self.lines.push(line);
    }
}

fn finish(id: usize, name: &'static str, outcome: rdwalk::Result<Checks>) -> CriterionResult {
    match outcome {
        Ok(checks) => CriterionResult {
            id,
            name,
            status: if checks.failed {
                Status::Fail
            } else {
                Status::Pass
            },
            lines: checks.lines,
        },
        Err(e) => CriterionResult {
            id,
            name,
            status: Status::Fail,
            lines: vec![format!("error: {e}")],
        },
    }
}

/// Run one criterion by id (1 through 12).
pub fn run_criterion(id: usize, level: Level, seed: u64) -> CriterionResult {
    match id {
        1 => {
            let name = "peak relative gap between the schemes at M=100";
            if level == Level::Fast {
                return CriterionResult {
                    id,
                    name,
                    status: Status::Skip,
                    lines: vec!["skipped at level fast".into()],
                };
            }
            finish(id, name, peak_gap())
        }
        2 => finish(
            id,
            "both schemes collapse onto the source curve at M=1",
            m_one_collapse(),
        ),
        3 => finish(id, "distortion ordering across the (M, R) grid", sandwich()),
        4 => finish(
            id,
            "high-rate closed forms against the integral evaluations",
            high_rate(),
        ),
        5 => finish(id, "band quadrature identities", quadrature_identities()),
        6 => finish(
            id,
            "closed-form walk eigenvalues against the dense solver",
            eigen_oracle(),
        ),
        7 => finish(
            id,
            "interpolated-spectrum approximation against the dense solver",
            spectrum_convergence(level),
        ),
        8 => finish(
            id,
            "interpolated-error formula against direct weight expansion",
            moment_formula(seed),
        ),
        9 => finish(
            id,
            "Monte Carlo interpolation error against the closed forms",
            mc_mmse(level, seed),
        ),
        10 => finish(
            id,
            "finite-N compress-estimate convergence and channel moments",
            finite_ce(level, seed),
        ),
        11 => finish(id, "rate inversion round trip", inversion_round_trip()),
        12 => finish(id, "sweep shape properties", curve_shapes()),
        _ => panic!("criterion id {id} out of range 1..={CRITERION_COUNT}"),
    }
}

/// Run the whole suite in order.
pub fn run_suite(level: Level, seed: u64) -> Vec<CriterionResult> {
    (1..=CRITERION_COUNT)
        .map(|id| run_criterion(id, level, seed))
        .collect()
}

pub fn all_passed(results: &[CriterionResult]) -> bool {
    results.iter().all(|r| r.status != Status::Fail)
}

/// Render the suite report. Deterministic: same level, seed, and outcomes
/// give the same bytes.
pub fn render_report(level: Level, seed: u64, results: &[CriterionResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "validation report  level={}  seed={}",
        level.label(),
        seed
    );
    for r in results {
        let _ = writeln!(out, "[{:2}] {}  {}", r.id, r.status.label(), r.name);
        for line in &r.lines {
            let _ = writeln!(out, "       {line}");
        }
    }
    let passed = results.iter().filter(|r| r.status == Status::Pass).count();
    let failed = results.iter().filter(|r| r.status == Status::Fail).count();
    let skipped = results.iter().filter(|r| r.status == Status::Skip).count();
    let _ = writeln!(
        out,
        "result: {passed} passed, {failed} failed, {skipped} skipped"
    );
    out
}

// ---------------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------------

/// Criterion 1: the largest relative excess of CE over EC at M=100 sits at
/// 2.7% within +/- 0.3 percentage points.
fn peak_gap() -> rdwalk::Result<Checks> {
    let mut c = Checks::new();
    let peak = max_relative_gap(100)?;
    let pct = 100.0 * peak.relative_gap;
    c.require(
        (pct - 2.7).abs() <= 0.3,
        format!(
            "peak (D_CE-D_EC)/D_EC at M=100: measured {:.4}% at MR={:.4}, required 2.7% +/- 0.3pp",
            pct, peak.normalized_rate
        ),
    );
    Ok(c)
}

/// Criterion 2: at M=1 both schemes equal the source distortion-rate
/// function to 1e-9.
fn m_one_collapse() -> rdwalk::Result<Checks> {
    let mut c = Checks::new();
    let mut worst = 0.0f64;
    for rate in [0.01, 0.1, 0.5, 1.0, 2.0, 4.0] {
        let dx = source_drf(rate)?.distortion;
        for scheme in Scheme::ALL {
            let d = distortion_at_rate(scheme, 1, rate)?.total;
            worst = worst.max((d - dx).abs());
        }
    }
    c.require(
        worst < 1e-9,
        format!(
            "max |D_scheme(1,R) - D_X(R)| over R in {{0.01,0.1,0.5,1,2,4}}: \
             measured {worst:.3e}, required < 1e-9"
        ),
    );
    Ok(c)
}

/// Criterion 3: D_CE >= D_EC >= max(mmse(M), D_X(R)) - 1e-9 over the
/// evaluation grid.
fn sandwich() -> rdwalk::Result<Checks> {
    let mut c = Checks::new();
    let mut min_order = f64::INFINITY;
    let mut min_floor = f64::INFINITY;
    for m in [1usize, 2, 4, 10, 100] {
        let mmse = mmse_interpolation(m)?;
        for rate in [0.001, 0.01, 0.1, 0.5, 1.0, 2.0, 4.0] {
            let dx = source_drf(rate)?.distortion;
            let ec = distortion_at_rate(Scheme::EstimateCompress, m, rate)?.total;
            let ce = distortion_at_rate(Scheme::CompressEstimate, m, rate)?.total;
            min_order = min_order.min(ce - ec);
            min_floor = min_floor.min(ec - mmse.max(dx));
        }
    }
    c.require(
        min_order >= -1e-9,
        format!("min (D_CE - D_EC) over the 5x7 grid: measured {min_order:.3e}, required >= -1e-9"),
    );
    c.require(
        min_floor >= -1e-9,
        format!(
            "min (D_EC - max(mmse, D_X)) over the 5x7 grid: \
             measured {min_floor:.3e}, required >= -1e-9"
        ),
    );
    Ok(c)
}

/// Criterion 4: beyond the EC threshold the exponential closed forms match
/// the integral evaluations, and the closed-form coefficient gap matches the
/// difference of the scheme coefficients.
fn high_rate() -> rdwalk::Result<Checks> {
    let mut c = Checks::new();
    let ms = [1usize, 2, 4, 10, 100];
    let mut worst_rel = 0.0f64;
    for &m in &ms {
        let threshold = ec_threshold(m)?;
        for extra in [0.1, 0.6, 1.5, 4.0] {
            let rate = (threshold + extra) / m as f64;
            for scheme in Scheme::ALL {
                let exact = distortion_at_rate(scheme, m, rate)?.total;
                let approx = high_rate_distortion(scheme, m, rate)?;
                worst_rel = worst_rel.max((approx - exact).abs() / exact);
            }
        }
    }
    c.require(
        worst_rel < 1e-8,
        format!(
            "max relative |high-rate form - integral total| for MR >= threshold+0.1, \
             M in {{1,2,4,10,100}}: measured {worst_rel:.3e}, required < 1e-8"
        ),
    );
    let mut worst_gap = 0.0f64;
    for &m in &ms {
        let mf = m as f64;
        let s = (3.0 + 6.0 / (mf * mf)).sqrt();
        let closed = (1.0 + (2.0 - s) * mf * mf) / (6.0 * mf);
        worst_gap = worst_gap.max((closed - high_rate_coefficient_gap(m)?).abs());
    }
    c.require(
        worst_gap < 1e-12,
        format!(
            "max |closed-form coefficient gap - (C_ce - C_ec)|: \
             measured {worst_gap:.3e}, required < 1e-12"
        ),
    );
    Ok(c)
}

/// Criterion 5: the band integral of log2 S vanishes and the clipped band
/// integral at water level 1 matches its closed-form antiderivative.
fn quadrature_identities() -> rdwalk::Result<Checks> {
    let mut c = Checks::new();
    let density = SpectralDensity::Standard;
    let log_integral = integrate(
        |phi| density.value_unchecked(phi).log2(),
        &QuadratureSpec::default(),
    )?;
    c.require(
        log_integral.abs() < 1e-8,
        format!(
            "|integral of log2 S over the band|: measured {:.3e}, required < 1e-8",
            log_integral.abs()
        ),
    );
    // S crosses 1 at phi = (2/pi) asin(1/2) = 1/3.
    let clipped = integrate(
        |phi| density.value_unchecked(phi).min(1.0),
        &QuadratureSpec::with_splits(vec![1.0 / 3.0])?,
    )?;
    let reference = 1.0 / 3.0 + 3f64.sqrt() / (2.0 * PI);
    c.require(
        (clipped - reference).abs() < 1e-6,
        format!(
            "|integral of min(S,1) - (1/3 + sqrt(3)/(2 pi))|: \
             measured {:.3e}, required < 1e-6",
            (clipped - reference).abs()
        ),
    );
    Ok(c)
}

/// Criterion 6: the closed-form eigenvalues of the walk covariance agree
/// with the dense Jacobi solver at every size up to 64, and their sum obeys
/// the trace identity at size 1024.
fn eigen_oracle() -> rdwalk::Result<Checks> {
    let mut c = Checks::new();
    let mut worst = 0.0f64;
    for n in 1..=64usize {
        let dims = WalkDims::new(n, 1)?;
        let cov = covariance_matrix(CovKind::Source, dims)?;
        let dense = jacobi_eigenvalues(cov.entries())?;
        let closed = berger_eigenvalues(n);
        for (a, b) in dense.iter().zip(&closed) {
            worst = worst.max((a - b).abs());
        }
    }
    c.require(
        worst < 1e-9,
        format!(
            "max |closed-form eigenvalue - Jacobi eigenvalue| for N in 1..=64: \
             measured {worst:.3e}, required < 1e-9"
        ),
    );
    let n = 1024usize;
    let trace = (n * (n + 1) / 2) as f64;
    let sum: f64 = berger_eigenvalues(n).iter().sum();
    let rel = (sum - trace).abs() / trace;
    c.require(
        rel < 1e-9,
        format!(
            "relative |sum of eigenvalues - N(N+1)/2| at N=1024: \
             measured {rel:.3e}, required < 1e-9"
        ),
    );
    Ok(c)
}

/// Largest relative rate or distortion gap, over the given water levels,
/// between the water-filling points of the closed-form interpolated spectrum
/// and of the dense solver's spectrum of the reduced covariance.
fn spectrum_gap_at(n: usize, thetas: &[f64]) -> rdwalk::Result<f64> {
    let dims = WalkDims::new(n, 4)?;
    let formula = interp_eigenvalues_asymptotic(dims)?;
    let dense = jacobi_eigenvalues(&interpolated_spectrum_matrix(dims))?;
    let mut worst = 0.0f64;
    for &theta in thetas {
        let a = finite_n_rd_point(&formula, theta, n)?;
        let b = finite_n_rd_point(&dense, theta, n)?;
        worst = worst.max((a.rate - b.rate).abs() / b.rate.abs().max(f64::MIN_POSITIVE));
        worst = worst
            .max((a.distortion - b.distortion).abs() / b.distortion.abs().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

/// Criterion 7: at M=4 the water-filling points of the closed-form
/// interpolated spectrum track the dense solver within 1% relative, with the
/// discrepancy shrinking from N=512 to N=4096.
fn spectrum_convergence(level: Level) -> rdwalk::Result<Checks> {
    let mut c = Checks::new();
    let thetas = [0.05, 0.2, 1.0];
    let coarse = spectrum_gap_at(512, &thetas)?;
    c.require(
        coarse < 1e-2,
        format!(
            "max relative rd-point gap over theta in {{0.05,0.2,1.0}} at N=512: \
             measured {coarse:.3e}, required < 1e-2"
        ),
    );
    if level == Level::Fast {
        c.note("N=4096 agreement and decrease: skipped at level fast".into());
        return Ok(c);
    }
    let fine = spectrum_gap_at(4096, &thetas)?;
    c.require(
        fine < 1e-2,
        format!("max relative rd-point gap at N=4096: measured {fine:.3e}, required < 1e-2"),
    );
    c.require(
        fine < coarse,
        format!(
            "gap decreases with N: measured {fine:.3e} at N=4096 vs {coarse:.3e} at N=512, \
             required strictly smaller"
        ),
    );
    Ok(c)
}

/// Direct evaluation of the per-sample interpolated error MSE from the
/// interpolation weights: expand E[(w_a eps_a + w_b eps_b)^2] at every
/// sample of the averaged block and divide by N. The block runs from the
/// pinned origin (error zero) through sample N-1; the final kept sample
/// only anchors the last interior stretch. Adjacent kept samples covary by
/// lag1, farther pairs are uncorrelated.
fn weight_expansion_mse(dims: WalkDims, moments: &ChannelMoments) -> f64 {
    let n_m = dims.n_m();
    let cov = |a: usize, b: usize| -> f64 {
        if a == 0 || b == 0 || a > n_m || b > n_m {
            0.0
        } else if a == b {
            moments.var[a - 1]
        } else if a.abs_diff(b) == 1 {
            moments.lag1[a.min(b) - 1]
        } else {
            0.0
        }
    };
    let mut sum = 0.0;
    for s in 1..dims.n() {
        let [(ia, wa), (ib, wb)] = interpolation_weights(s, dims);
        sum += wa * wa * cov(ia, ia) + 2.0 * wa * wb * cov(ia, ib) + wb * wb * cov(ib, ib);
    }
    sum / dims.n() as f64
}

/// Stream id for the random moment instances of criterion 8.
const STREAM_MOMENTS: u64 = 8;

/// Criterion 8: the interpolated-error formula agrees with the direct
/// weight expansion on 100 random moment instances, and reproduces the two
/// hand-worked values exactly.
fn moment_formula(seed: u64) -> rdwalk::Result<Checks> {
    let mut c = Checks::new();
    let dims = WalkDims::new(4, 2)?;
    let uncorrelated = ChannelMoments {
        var: vec![1.0, 1.0],
        lag1: vec![0.0],
    };
    let correlated = ChannelMoments {
        var: vec![1.0, 1.0],
        lag1: vec![1.0],
    };
    let a = interpolated_error_mse(dims, &uncorrelated)?;
    let b = interpolated_error_mse(dims, &correlated)?;
    c.require(
        a == 0.4375 && b == 0.5625,
        format!("hand-worked values at N=4, M=2: measured ({a}, {b}), required exactly (0.4375, 0.5625)"),
    );
    let mut worst = 0.0f64;
    for trial in 0..100u64 {
        let mut rng = CounterRng::new(seed, trial, STREAM_MOMENTS);
        let m = 1 + (rng.next_u64() % 8) as usize;
        let n_m = 1 + (rng.next_u64() % 16) as usize;
        let dims = WalkDims::new(m * n_m, m)?;
        let var: Vec<f64> = (0..n_m).map(|_| 4.0 * rng.next_uniform()).collect();
        let lag1: Vec<f64> = (0..n_m.saturating_sub(1))
            .map(|i| (2.0 * rng.next_uniform() - 1.0) * (var[i] * var[i + 1]).sqrt())
            .collect();
        let moments = ChannelMoments { var, lag1 };
        let formula = interpolated_error_mse(dims, &moments)?;
        let direct = weight_expansion_mse(dims, &moments);
        worst = worst.max((formula - direct).abs() / direct.abs().max(1.0));
    }
    c.require(
        worst < 1e-12,
        format!(
            "max |formula - weight expansion| over 100 random instances \
             (N_M <= 16, M <= 8): measured {worst:.3e}, required < 1e-12"
        ),
    );
    Ok(c)
}

/// Criterion 9: Monte Carlo interpolation error at M=4, N=4096 agrees with
/// (M - 1/M)/6 within 3 standard errors, and the per-offset profile matches
/// the bridge variance r(M-r)/M within 3 sigma at every offset.
fn mc_mmse(level: Level, seed: u64) -> rdwalk::Result<Checks> {
    let mut c = Checks::new();
    let trials = level.mc_trials(2000);
    let dims = WalkDims::new(4096, 4)?;
    let estimate = empirical_mmse(dims, seed, trials)?;
    let z = estimate.z_score(mmse_interpolation(4)?);
    c.require(
        z.abs() <= 3.0,
        format!(
            "|z| of empirical MSE vs 0.625 ({} trials): measured {:.3}, required <= 3",
            trials,
            z.abs()
        ),
    );
    let profile = empirical_bridge_profile(dims, seed, trials)?;
    let mut worst = 0.0f64;
    for (r, est) in profile.iter().enumerate() {
        worst = worst.max(est.z_score(bridge_variance(r, 4)?).abs());
    }
    c.require(
        worst <= 3.0,
        format!(
            "max per-offset |z| vs r(M-r)/M ({} trials): measured {worst:.3}, required <= 3",
            trials
        ),
    );
    Ok(c)
}

/// Criterion 10: the finite-N compress-estimate evaluator converges to the
/// band-integral value, and the sampled test channel reproduces the
/// closed-form error moments.
fn finite_ce(level: Level, seed: u64) -> rdwalk::Result<Checks> {
    let mut c = Checks::new();
    let m = 4usize;
    let thetas = [0.05, 0.2, 1.0];
    let mut coarse_worst = 0.0f64;
    let mut fine_worst = 0.0f64;
    for &theta in &thetas {
        let limit = ce_distortion_at_water_level(m, theta)?;
        let theta_y = m as f64 * theta;
        let coarse = finite_n_ce_distortion(WalkDims::new(512, m)?, theta_y)?;
        coarse_worst = coarse_worst.max((coarse - limit).abs() / limit);
        if level == Level::Full {
            let fine = finite_n_ce_distortion(WalkDims::new(4096, m)?, theta_y)?;
            fine_worst = fine_worst.max((fine - limit).abs() / limit);
        }
    }
    match level {
        Level::Fast => {
            c.require(
                coarse_worst < 1e-2,
                format!(
                    "max relative |finite-N CE - band integral| at N=512 over \
                     theta in {{0.05,0.2,1.0}}: measured {coarse_worst:.3e}, required < 1e-2"
                ),
            );
            c.note("N=4096 agreement and decrease: skipped at level fast".into());
        }
        Level::Full => {
            c.require(
                fine_worst < 1e-2,
                format!(
                    "max relative |finite-N CE - band integral| at N=4096 over \
                     theta in {{0.05,0.2,1.0}}: measured {fine_worst:.3e}, required < 1e-2"
                ),
            );
            c.require(
                fine_worst < coarse_worst,
                format!(
                    "error decreases with N: measured {fine_worst:.3e} at N=4096 vs \
                     {coarse_worst:.3e} at N=512, required strictly smaller"
                ),
            );
        }
    }

    let trials = level.mc_trials(100_000);
    let dims = WalkDims::new(256, m)?;
    let theta_y = 0.5;
    let exact = test_channel_moments(dims, theta_y)?;
    let sampled = empirical_channel_moments(dims, theta_y, seed, trials)?;
    let mut worst = 0.0f64;
    for (est, reference) in sampled.var.iter().zip(&exact.var) {
        worst = worst.max(est.z_score(*reference).abs());
    }
    for (est, reference) in sampled.lag1.iter().zip(&exact.lag1) {
        worst = worst.max(est.z_score(*reference).abs());
    }
    c.require(
        worst <= 3.0,
        format!(
            "max |z| of sampled channel moments vs closed forms at N_M=64 \
             ({trials} samples): measured {worst:.3}, required <= 3"
        ),
    );
    let cross_rms = (sampled
        .cross
        .iter()
        .map(|e| e.z_score(0.0).powi(2))
        .sum::<f64>()
        / sampled.cross.len() as f64)
        .sqrt();
    c.require(
        cross_rms < 2.0,
        format!(
            "rms z of reconstruction-error cross moments vs 0: \
             measured {cross_rms:.3}, required < 2"
        ),
    );
    Ok(c)
}

/// Criterion 11: inverting the rate map and mapping back reproduces the rate
/// to 1e-10 on the standard and shifted densities.
fn inversion_round_trip() -> rdwalk::Result<Checks> {
    let mut c = Checks::new();
    let cases = [
        (SpectralDensity::Standard, 1usize),
        (SpectralDensity::Shifted { m: 2 }, 2),
        (SpectralDensity::Shifted { m: 10 }, 10),
    ];
    let mut worst = 0.0f64;
    for &(density, m) in &cases {
        for rate in [0.01, 0.1, 0.5, 1.0, 3.0] {
            let theta = rdwalk::waterfill::rate_to_water_level(density, m, rate)?;
            let back = asymptotic_rd_point(density, theta, m)?.rate;
            worst = worst.max((back - rate).abs());
        }
    }
    c.require(
        worst < 1e-10,
        format!(
            "max |R(theta(R)) - R| over both densities and R in {{0.01,0.1,0.5,1,3}}: \
             measured {worst:.3e}, required < 1e-10"
        ),
    );
    Ok(c)
}

/// Criterion 12: sweep rows have the documented shapes: totals fall with
/// rate and rise with M, the gap has a single interior peak over rate, and
/// it vanishes at M=1.
fn curve_shapes() -> rdwalk::Result<Checks> {
    let mut c = Checks::new();
    // The sweep stops at R = 0.2 (normalized rate 20): past that the coding
    // term sinks below the resolution of the mmse floor and successive
    // totals become bitwise equal, so strict decrease is only checkable on
    // the representable part of the curve.
    let vs_rate = CurveRequest {
        mode: CurveMode::VsRate,
        fixed: 100.0,
        min: 1e-3,
        max: 0.2,
        steps: 40,
        spacing: Spacing::Log,
        schemes: vec![SchemeColumn::Ec, SchemeColumn::Ce, SchemeColumn::Gap],
    };
    let rows = match evaluate(&vs_rate) {
        Ok(rows) => rows,
        Err(e) => {
            c.require(false, format!("vs-rate sweep evaluation: {e}"));
            return Ok(c);
        }
    };
    let series = |which: SchemeColumn| -> Vec<f64> {
        rows.iter()
            .filter(|r| r.scheme == which)
            .map(|r| r.total)
            .collect()
    };
    for scheme in [SchemeColumn::Ec, SchemeColumn::Ce] {
        let totals = series(scheme);
        let min_drop = totals
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(f64::INFINITY, f64::min);
        c.require(
            min_drop > 0.0,
            format!(
                "vs-rate at M=100: min successive decrease of {} totals: \
                 measured {min_drop:.3e}, required > 0",
                scheme.label()
            ),
        );
    }
    let gap = series(SchemeColumn::Gap);
    let peak = gap
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("gap values are finite"))
        .map(|(i, _)| i)
        .expect("gap series is nonempty");
    let interior = peak > 0 && peak + 1 < gap.len();
    let rising = gap[..=peak].windows(2).all(|w| w[0] < w[1]);
    let falling = gap[peak..].windows(2).all(|w| w[0] > w[1]);
    c.require(
        interior && rising && falling,
        format!(
            "vs-rate at M=100: gap unimodal with interior peak: \
             measured peak index {peak} of {}, rising {rising}, falling {falling}, \
             required interior/true/true",
            gap.len()
        ),
    );

    let vs_m = CurveRequest {
        mode: CurveMode::VsM,
        fixed: 0.01,
        min: 1.0,
        max: 1000.0,
        steps: 25,
        spacing: Spacing::Log,
        schemes: vec![SchemeColumn::Ec, SchemeColumn::Ce, SchemeColumn::Gap],
    };
    let rows = match evaluate(&vs_m) {
        Ok(rows) => rows,
        Err(e) => {
            c.require(false, format!("vs-m sweep evaluation: {e}"));
            return Ok(c);
        }
    };
    let series = |which: SchemeColumn| -> Vec<f64> {
        rows.iter()
            .filter(|r| r.scheme == which)
            .map(|r| r.total)
            .collect()
    };
    let mut min_rise = f64::INFINITY;
    for scheme in [SchemeColumn::Ec, SchemeColumn::Ce] {
        let totals = series(scheme);
        min_rise = totals
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(min_rise, f64::min);
    }
    c.require(
        min_rise >= -1e-12,
        format!(
            "vs-m at R=0.01: min successive change of totals: \
             measured {min_rise:.3e}, required >= -1e-12 (nondecreasing)"
        ),
    );
    let gap_at_one = rows
        .iter()
        .find(|r| r.scheme == SchemeColumn::Gap && r.m == 1)
        .map(|r| r.total)
        .expect("the M grid starts at 1");
    c.require(
        gap_at_one.abs() <= 1e-12,
        format!(
            "vs-m at R=0.01: |gap| at M=1: measured {:.3e}, required <= 1e-12",
            gap_at_one.abs()
        ),
    );
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suite_passes_and_is_deterministic() {
        let first = run_suite(Level::Fast, 0);
        assert!(
            all_passed(&first),
            "{}",
            render_report(Level::Fast, 0, &first)
        );
        let second = run_suite(Level::Fast, 0);
        assert_eq!(
            render_report(Level::Fast, 0, &first),
            render_report(Level::Fast, 0, &second)
        );
        assert_eq!(first.len(), CRITERION_COUNT);
        assert_eq!(first[0].status, Status::Skip);
    }

    #[test]
    fn weight_expansion_matches_the_hand_worked_values() {
        let dims = WalkDims::new(4, 2).unwrap();
        let uncorrelated = ChannelMoments {
            var: vec![1.0, 1.0],
            lag1: vec![0.0],
        };
        assert_eq!(weight_expansion_mse(dims, &uncorrelated), 0.4375);
        let correlated = ChannelMoments {
            var: vec![1.0, 1.0],
            lag1: vec![1.0],
        };
        assert_eq!(weight_expansion_mse(dims, &correlated), 0.5625);
    }

    #[test]
    fn report_lines_carry_measured_and_required_values() {
        let result = run_criterion(11, Level::Fast, 0);
        assert_eq!(result.status, Status::Pass);
        assert!(result
            .lines
            .iter()
            .all(|l| l.contains("measured") && l.contains("required")));
    }
}
