//! Human-readable report for a single (M, R) evaluation.

use std::fmt::Write as _;

use rdwalk::schemes::{
    ce_ec_gap, distortion_at_rate, ec_threshold, source_drf, DistortionBreakdown, Scheme,
};

fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

fn write_breakdown(out: &mut String, label: &str, b: &DistortionBreakdown) {
    let _ = writeln!(out, "{label}");
    let _ = writeln!(out, "  theta        = {}", sig12(b.theta));
    let _ = writeln!(out, "  mmse_term    = {}", sig12(b.mmse_term));
    let _ = writeln!(out, "  coding_term  = {}", sig12(b.coding_term));
    let _ = writeln!(out, "  cross_term   = {}", sig12(b.cross_term));
    let _ = writeln!(out, "  total        = {}", sig12(b.total));
}

/// Evaluate both schemes and the source curve at (M, R) and format the
/// breakdowns, the gap, the high-rate thresholds, and whether each scheme's
/// high-rate branch is exact at this point.
pub fn point_report(m: usize, rate: f64) -> rdwalk::Result<String> {
    let src = source_drf(rate)?;
    let ec = distortion_at_rate(Scheme::EstimateCompress, m, rate)?;
    let ce = distortion_at_rate(Scheme::CompressEstimate, m, rate)?;
    let gap = ce_ec_gap(m, rate)?;
    let threshold = ec_threshold(m)?;
    let mr = m as f64 * rate;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "point  M={m}  R={}  normalized MR={}",
        sig12(rate),
        sig12(mr)
    );
    let _ = writeln!(out);
    let _ = writeln!(out, "source_drf");
    let _ = writeln!(out, "  theta        = {}", sig12(src.theta));
    let _ = writeln!(out, "  total        = {}", sig12(src.distortion));
    let _ = writeln!(out);
    write_breakdown(&mut out, "estimate_compress", &ec);
    let _ = writeln!(out);
    write_breakdown(&mut out, "compress_estimate", &ce);
    let _ = writeln!(out);
    let _ = writeln!(out, "gap");
    let _ = writeln!(out, "  ce_minus_ec  = {}", sig12(gap));
    let _ = writeln!(out, "  relative     = {}", sig12(gap / ec.total));
    let _ = writeln!(out);
    let _ = writeln!(out, "thresholds (normalized rate MR)");
    let _ = writeln!(out, "  ec_high_rate = {}", sig12(threshold));
    let _ = writeln!(out, "  ce_high_rate = {}", sig12(1.0));
    let _ = writeln!(out);
    let _ = writeln!(out, "high_rate_branch");
    let _ = writeln!(out, "  ec_exact     = {}", mr >= threshold);
    let _ = writeln!(out, "  ce_exact     = {}", mr >= 1.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(report: &str, block: &str, key: &str) -> f64 {
        let mut in_block = false;
        for line in report.lines() {
            if !line.starts_with(' ') {
                in_block = line.starts_with(block);
            } else if in_block {
                if let Some(rest) = line.trim_start().strip_prefix(key) {
                    return rest
                        .trim_start()
                        .strip_prefix('=')
                        .unwrap()
                        .trim()
                        .parse()
                        .unwrap();
                }
            }
        }
        panic!("field {key} not found in block {block}");
    }

    #[test]
    fn identity_factor_matches_the_source_curve() {
        let report = point_report(1, 1.0).unwrap();
        for block in ["source_drf", "estimate_compress", "compress_estimate"] {
            let total = field(&report, block, "total");
            assert!((total - 0.25).abs() < 1e-11, "{block}: {total}");
        }
    }

    #[test]
    fn factor_two_reference_point() {
        let report = point_report(2, 1.0).unwrap();
        let ec = field(&report, "estimate_compress", "total");
        let ce = field(&report, "compress_estimate", "total");
        let gap = field(&report, "gap", "ce_minus_ec");
        assert!((ec - 0.3410691738241592).abs() < 1e-11, "{ec}");
        assert!((ce - 0.34375).abs() < 1e-11, "{ce}");
        assert!((gap - 0.0026808261758408).abs() < 1e-12, "{gap}");
        assert!(report.contains("ec_exact     = true"));
        assert!(report.contains("ce_exact     = true"));
    }
}
