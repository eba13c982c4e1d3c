//! Curve sweeps: evaluate the schemes over a grid of rates or decimation
//! factors and serialize the rows as CSV.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use rdwalk::schemes::{ce_ec_gap, distortion_at_rate, source_drf, Scheme};
use rdwalk::spectra::mmse_interpolation;

/// Quantity plotted by a sweep; each one contributes a CSV row per grid
/// point. Variants are declared in label order so sorting by variant sorts
/// by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SchemeColumn {
    /// Compress-and-estimate distortion breakdown.
    Ce,
    /// Estimate-and-compress distortion breakdown.
    Ec,
    /// Absolute distortion gap, CE minus EC.
    Gap,
    /// Interpolation MMSE floor (rate-independent).
    Mmse,
    /// Distortion-rate function of the undecimated walk (M-independent).
    SourceDrf,
}

impl SchemeColumn {
    pub const ALL: [SchemeColumn; 5] = [
        SchemeColumn::Ce,
        SchemeColumn::Ec,
        SchemeColumn::Gap,
        SchemeColumn::Mmse,
        SchemeColumn::SourceDrf,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SchemeColumn::Ce => "ce",
            SchemeColumn::Ec => "ec",
            SchemeColumn::Gap => "gap",
            SchemeColumn::Mmse => "mmse",
            SchemeColumn::SourceDrf => "source_drf",
        }
    }

    pub fn from_label(label: &str) -> Option<SchemeColumn> {
        SchemeColumn::ALL
            .iter()
            .copied()
            .find(|s| s.label() == label)
    }
}

/// Which axis the sweep walks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveMode {
    /// Grid over the rate R with the decimation factor fixed.
    VsRate,
    /// Grid over the decimation factor M with the rate fixed.
    VsM,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

/// A sweep request: the grid, the fixed parameter of the other axis, and
/// the schemes to evaluate at every grid point.
#[derive(Debug, Clone)]
pub struct CurveRequest {
    pub mode: CurveMode,
    /// M for a rate sweep, R for an M sweep.
    pub fixed: f64,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub spacing: Spacing,
    pub schemes: Vec<SchemeColumn>,
}

/// One evaluated CSV row. The four value columns always satisfy
/// mmse_term + coding_term + cross_term = total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveRow {
    pub scheme: SchemeColumn,
    pub m: usize,
    pub rate: f64,
    pub theta: f64,
    pub mmse_term: f64,
    pub coding_term: f64,
    pub cross_term: f64,
    pub total: f64,
}

/// Sweep failure. Usage errors are bad requests (exit status 2 at the CLI);
/// evaluation errors name the grid point or path that failed (exit status 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurveError {
    Usage(String),
    Evaluation(String),
}

impl std::fmt::Display for CurveError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CurveError::Usage(msg) => write!(f, "usage error: {msg}"),
            CurveError::Evaluation(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CurveError {}

/// Literal header line of every emitted CSV file.
pub const CSV_HEADER: &str = "scheme,M,R,theta,mmse_term,coding_term,cross_term,total";

fn usage(msg: impl Into<String>) -> CurveError {
    CurveError::Usage(msg.into())
}

fn check_request(req: &CurveRequest) -> Result<(), CurveError> {
    if req.steps < 2 {
        return Err(usage(format!(
            "steps must be at least 2, got {}",
            req.steps
        )));
    }
    if req.min.is_nan() || req.max.is_nan() || req.min >= req.max {
        return Err(usage(format!(
            "min must be below max, got {} >= {}",
            req.min, req.max
        )));
    }
    if req.schemes.is_empty() {
        return Err(usage("at least one scheme is required"));
    }
    if req.spacing == Spacing::Log && (req.min.is_nan() || req.min <= 0.0) {
        return Err(usage(format!(
            "log spacing needs a positive min, got {}",
            req.min
        )));
    }
    match req.mode {
        CurveMode::VsRate => {
            if req.fixed.is_nan() || req.fixed < 1.0 || req.fixed.fract() != 0.0 {
                return Err(usage(format!(
                    "fixed must be an integer decimation factor M >= 1, got {}",
                    req.fixed
                )));
            }
            if req.min.is_nan() || req.min <= 0.0 {
                return Err(usage(format!(
                    "rates must be positive, got min {}",
                    req.min
                )));
            }
        }
        CurveMode::VsM => {
            if !req.fixed.is_finite() || req.fixed <= 0.0 {
                return Err(usage(format!(
                    "fixed must be a positive rate R, got {}",
                    req.fixed
                )));
            }
            if req.min.is_nan() || req.min <= 0.0 {
                return Err(usage(format!(
                    "M grid must be positive, got min {}",
                    req.min
                )));
            }
        }
    }
    Ok(())
}

fn grid_values(req: &CurveRequest) -> Vec<f64> {
    let last = (req.steps - 1) as f64;
    (0..req.steps)
        .map(|i| {
            let frac = i as f64 / last;
            match req.spacing {
                Spacing::Linear => req.min + frac * (req.max - req.min),
                Spacing::Log => (req.min.ln() + frac * (req.max.ln() - req.min.ln())).exp(),
            }
        })
        .collect()
}

/// The (M, R) pairs of a sweep, in grid order. M-sweep values are rounded
/// to integers, clamped to at least 1, and deduplicated.
fn grid_points(req: &CurveRequest) -> Result<Vec<(usize, f64)>, CurveError> {
    check_request(req)?;
    let values = grid_values(req);
    Ok(match req.mode {
        CurveMode::VsRate => {
            let m = req.fixed as usize;
            values.into_iter().map(|r| (m, r)).collect()
        }
        CurveMode::VsM => {
            let mut ms: Vec<usize> = values
                .into_iter()
                .map(|v| v.round().max(1.0) as usize)
                .collect();
            ms.dedup();
            ms.into_iter().map(|m| (m, req.fixed)).collect()
        }
    })
}

/// Evaluate a single scheme at one grid point.
pub fn evaluate_row(scheme: SchemeColumn, m: usize, rate: f64) -> rdwalk::Result<CurveRow> {
    Ok(match scheme {
        SchemeColumn::Ec | SchemeColumn::Ce => {
            let which = match scheme {
                SchemeColumn::Ec => Scheme::EstimateCompress,
                _ => Scheme::CompressEstimate,
            };
            let b = distortion_at_rate(which, m, rate)?;
            CurveRow {
                scheme,
                m,
                rate,
                theta: b.theta,
                mmse_term: b.mmse_term,
                coding_term: b.coding_term,
                cross_term: b.cross_term,
                total: b.total,
            }
        }
        SchemeColumn::SourceDrf => {
            let p = source_drf(rate)?;
            CurveRow {
                scheme,
                m,
                rate,
                theta: p.theta,
                mmse_term: 0.0,
                coding_term: p.distortion,
                cross_term: 0.0,
                total: p.distortion,
            }
        }
        SchemeColumn::Mmse => {
            let floor = mmse_interpolation(m)?;
            CurveRow {
                scheme,
                m,
                rate,
                theta: 0.0,
                mmse_term: floor,
                coding_term: 0.0,
                cross_term: 0.0,
                total: floor,
            }
        }
        SchemeColumn::Gap => {
            let gap = ce_ec_gap(m, rate)?;
            CurveRow {
                scheme,
                m,
                rate,
                theta: 0.0,
                mmse_term: 0.0,
                coding_term: gap,
                cross_term: 0.0,
                total: gap,
            }
        }
    })
}

/// Evaluate the whole sweep. Grid points run concurrently; rows come back
/// sorted by grid value and then by scheme name, independent of completion
/// order.
pub fn evaluate(req: &CurveRequest) -> Result<Vec<CurveRow>, CurveError> {
    let points = grid_points(req)?;
    let mut schemes = req.schemes.clone();
    schemes.sort();
    schemes.dedup();
    let jobs: Vec<(usize, f64, SchemeColumn)> = points
        .iter()
        .flat_map(|&(m, r)| schemes.iter().map(move |&s| (m, r, s)))
        .collect();
    let evaluated: Vec<rdwalk::Result<CurveRow>> = jobs
        .par_iter()
        .map(|&(m, r, s)| evaluate_row(s, m, r))
        .collect();
    let mut rows = Vec::with_capacity(evaluated.len());
    for (job, result) in jobs.iter().zip(evaluated) {
        match result {
            Ok(row) => rows.push(row),
            Err(e) => {
                return Err(CurveError::Evaluation(format!(
                    "evaluation failed at scheme={} M={} R={}: {e}",
                    job.2.label(),
                    job.0,
                    job.1
                )))
            }
        }
    }
    Ok(rows)
}

/// Format a value with 12 significant digits.
fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Serialize rows under the fixed header.
pub fn to_csv(rows: &[CurveRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.scheme.label(),
            r.m,
            sig12(r.rate),
            sig12(r.theta),
            sig12(r.mmse_term),
            sig12(r.coding_term),
            sig12(r.cross_term),
            sig12(r.total)
        )
        .expect("string writes cannot fail");
    }
    out
}

/// Parse a file produced by [`to_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<CurveRow>, CurveError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => {
            return Err(CurveError::Evaluation(format!(
                "bad CSV header: expected {CSV_HEADER:?}, got {other:?}"
            )))
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(CurveError::Evaluation(format!(
                "row {} has {} fields, expected 8",
                idx + 1,
                fields.len()
            )));
        }
        let scheme = SchemeColumn::from_label(fields[0]).ok_or_else(|| {
            CurveError::Evaluation(format!(
                "row {} has unknown scheme {:?}",
                idx + 1,
                fields[0]
            ))
        })?;
        let num = |i: usize| -> Result<f64, CurveError> {
            fields[i].parse().map_err(|e| {
                CurveError::Evaluation(format!("row {} field {}: {e}", idx + 1, i + 1))
            })
        };
        rows.push(CurveRow {
            scheme,
            m: fields[1]
                .parse()
                .map_err(|e| CurveError::Evaluation(format!("row {} field 2: {e}", idx + 1)))?,
            rate: num(2)?,
            theta: num(3)?,
            mmse_term: num(4)?,
            coding_term: num(5)?,
            cross_term: num(6)?,
            total: num(7)?,
        });
    }
    Ok(rows)
}

/// Evaluate a sweep and write it to `path`.
pub fn write_curve(req: &CurveRequest, path: &Path) -> Result<(), CurveError> {
    let rows = evaluate(req)?;
    std::fs::write(path, to_csv(&rows))
        .map_err(|e| CurveError::Evaluation(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(mode: CurveMode, fixed: f64) -> CurveRequest {
        CurveRequest {
            mode,
            fixed,
            min: 0.1,
            max: 1.0,
            steps: 4,
            spacing: Spacing::Log,
            schemes: vec![SchemeColumn::Ec, SchemeColumn::Ce],
        }
    }

    #[test]
    fn rejects_bad_requests() {
        let mut r = request(CurveMode::VsRate, 2.0);
        r.steps = 1;
        assert!(matches!(evaluate(&r), Err(CurveError::Usage(_))));
        let mut r = request(CurveMode::VsRate, 2.0);
        r.min = 2.0;
        assert!(matches!(evaluate(&r), Err(CurveError::Usage(_))));
        let mut r = request(CurveMode::VsRate, 2.5);
        r.fixed = 2.5;
        assert!(matches!(evaluate(&r), Err(CurveError::Usage(_))));
        let mut r = request(CurveMode::VsRate, 2.0);
        r.schemes.clear();
        assert!(matches!(evaluate(&r), Err(CurveError::Usage(_))));
    }

    #[test]
    fn rows_are_sorted_and_additive() {
        let mut r = request(CurveMode::VsRate, 2.0);
        r.schemes = vec![SchemeColumn::SourceDrf, SchemeColumn::Ec, SchemeColumn::Gap];
        let rows = evaluate(&r).unwrap();
        assert_eq!(rows.len(), 12);
        for chunk in rows.chunks(3) {
            assert_eq!(chunk[0].scheme, SchemeColumn::Ec);
            assert_eq!(chunk[1].scheme, SchemeColumn::Gap);
            assert_eq!(chunk[2].scheme, SchemeColumn::SourceDrf);
            assert!(chunk.windows(2).all(|w| w[0].rate == w[1].rate));
        }
        assert!(rows.windows(2).all(|w| w[0].rate <= w[1].rate));
        for row in &rows {
            let sum = row.mmse_term + row.coding_term + row.cross_term;
            assert!((sum - row.total).abs() <= 1e-12 * row.total.abs().max(1.0));
        }
    }

    #[test]
    fn m_sweep_coerces_to_deduplicated_integers() {
        let mut r = request(CurveMode::VsM, 0.01);
        r.min = 1.0;
        r.max = 10.0;
        r.steps = 12;
        r.schemes = vec![SchemeColumn::Ec];
        let rows = evaluate(&r).unwrap();
        let ms: Vec<usize> = rows.iter().map(|row| row.m).collect();
        assert!(ms.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*ms.first().unwrap(), 1);
        assert_eq!(*ms.last().unwrap(), 10);
        assert!(rows.iter().all(|row| row.rate == 0.01));
    }

    #[test]
    fn csv_round_trips_through_the_parser() {
        let mut r = request(CurveMode::VsRate, 4.0);
        r.schemes = vec![SchemeColumn::Ce, SchemeColumn::Mmse];
        let rows = evaluate(&r).unwrap();
        let text = to_csv(&rows);
        assert!(text.starts_with(CSV_HEADER));
        let parsed = parse_csv(&text).unwrap();
        assert_eq!(parsed.len(), rows.len());
        for (a, b) in rows.iter().zip(&parsed) {
            assert_eq!(a.scheme, b.scheme);
            assert_eq!(a.m, b.m);
            assert!((a.total - b.total).abs() <= 1e-11 * a.total.abs().max(1.0));
        }
    }
}
