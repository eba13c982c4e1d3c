//! Acceptance gate: every validation criterion at full depth with seed 0.
//!
//! Each test runs one criterion end to end and prints its measurement
//! lines, so the harness output carries one pass/fail line per criterion.
//! Criteria with a wall-clock budget assert it; a shared lock keeps the
//! timed runs from contending with each other.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use rdwalk_cli::validate::{run_criterion, Level, Status};

static SERIAL: Mutex<()> = Mutex::new(());

fn check(id: usize, budget: Option<Duration>) {
    let guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let result = run_criterion(id, Level::Full, 0);
    let elapsed = start.elapsed();
    drop(guard);

    println!(
        "[{:2}] {}  {}  ({elapsed:.2?})",
        result.id,
        result.status.label(),
        result.name
    );
    for line in &result.lines {
        println!("     {line}");
    }
    assert!(
        matches!(result.status, Status::Pass),
        "criterion {id} finished as {}",
        result.status.label()
    );
    if let Some(limit) = budget {
        assert!(
            elapsed <= limit,
            "criterion {id} took {elapsed:.2?} against a {limit:?} budget"
        );
    }
}

#[test]
fn criterion_01_worst_case_gap_at_factor_100() {
    check(1, Some(Duration::from_secs(10)));
}

#[test]
fn criterion_02_identity_factor_collapses_to_source_curve() {
    check(2, Some(Duration::from_secs(5)));
}

#[test]
fn criterion_03_distortion_ordering_across_the_grid() {
    check(3, Some(Duration::from_secs(30)));
}

#[test]
fn criterion_04_high_rate_closed_forms() {
    check(4, None);
}

#[test]
fn criterion_05_density_reference_integrals() {
    check(5, None);
}

#[test]
fn criterion_06_walk_spectrum_against_dense_solver() {
    check(6, None);
}

#[test]
fn criterion_07_interpolated_spectrum_against_dense_solver() {
    check(7, Some(Duration::from_secs(120)));
}

#[test]
fn criterion_08_moment_formula_against_weight_expansion() {
    check(8, None);
}

#[test]
fn criterion_09_monte_carlo_interpolation_error() {
    check(9, Some(Duration::from_secs(60)));
}

#[test]
fn criterion_10_finite_size_ce_distortion_convergence() {
    check(10, None);
}

#[test]
fn criterion_11_water_level_round_trip() {
    check(11, None);
}

#[test]
fn criterion_12_curve_shape_properties() {
    check(12, None);
}
