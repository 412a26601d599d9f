//! End-to-end acceptance checks, one test per criterion.
//!
//! Each test prints a single `criterion N: PASS/FAIL (...)` line (visible
//! with `cargo test --test acceptance -- --nocapture`) and then asserts,
//! so `cargo test` reports the same verdict per criterion.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8};
use std::time::{Duration, Instant};

use num_complex::Complex64;

use detnet::linalg::hermitian_eig;
use detnet::oracle::{product_ps_oracle, run_all};
use detnet::quantum::{outcome_probabilities, w_state, DensityMatrix, FiringPattern};
use detnet::scenarios::{
    crossover, evaluate, m_spectrum_deviation, non_orthogonal_eigen_problem, ScenarioId,
    ScenarioParams,
};
use detnet::strategies::{
    cluster_unambiguous_povm, helstrom_pure_qubit, quartic_characteristic, unambiguous_product,
    ClusterPovmParams,
};
use detnet::sweep::{fixture_rows, fmt_sig15};

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let mut pts: Vec<f64> = (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect();
    pts[n - 1] = b;
    pts
}

fn report(criterion: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {verdict} ({detail})");
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Largest probability of announcing a wrong conclusive outcome under the
/// n-detector unambiguous measurement.
fn worst_misidentification(n: usize, theta: f64) -> f64 {
    let construction = unambiguous_product(n, theta).unwrap();
    let mut worst: f64 = 0.0;
    for pattern in FiringPattern::all(n).unwrap() {
        let mut state = w_state(u8::from(pattern.fired(0)), theta);
        for j in 1..n {
            state = state.tensor(&w_state(u8::from(pattern.fired(j)), theta));
        }
        let rho = DensityMatrix::from_pure(&state);
        for (label, p) in outcome_probabilities(&construction.povm, &rho).unwrap() {
            if label != pattern.label() && label != "fail" {
                worst = worst.max(p.abs());
            }
        }
    }
    worst
}

#[test]
fn criterion_1_two_detector_minimum_error() {
    let start = Instant::now();
    let grid = linspace(0.0, FRAC_PI_2, 181);
    let mut worst: f64 = 0.0;
    for &(p0, p1) in &[(0.5, 0.5), (0.25, 0.75)] {
        let params = ScenarioParams {
            p0,
            p1,
            ..ScenarioParams::default()
        };
        for &theta in &grid {
            let r = evaluate(ScenarioId::TwoDetMinErr, theta, &params).unwrap();
            let gap = (Complex64::from_polar(p1, 2.0 * theta) - p0).norm();
            let closed = 0.5 * (1.0 + gap);
            worst = worst.max((r.numeric["ps2"] - closed * closed).abs());
        }
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-9 && elapsed < Duration::from_secs(1);
    report(
        1,
        pass,
        &format!("max |ps2 - closed| = {worst:.2e} over 181 points x 2 prior sets in {elapsed:.1?}"),
    );
}

#[test]
fn criterion_2_unambiguous_n_detector() {
    let grid = linspace(0.0, FRAC_PI_2, 181);
    let pos = &grid[1..];
    let mut worst: f64 = 0.0;
    let mut zero_error: f64 = 0.0;
    let mut pf_end: f64 = 0.0;
    for n in 1..=3usize {
        let params = ScenarioParams {
            n,
            ..ScenarioParams::default()
        };
        for &theta in pos {
            let r = evaluate(ScenarioId::NDetUnambiguous, theta, &params).unwrap();
            let ratio = theta.sin().powi(2) / (1.0 + theta.cos());
            let closed = 1.0 - ratio.powi(n as i32);
            worst = worst.max((r.numeric["pf"] - closed).abs());
        }
        for &theta in pos.iter().step_by(12) {
            zero_error = zero_error.max(worst_misidentification(n, theta));
        }
        let end = evaluate(ScenarioId::NDetUnambiguous, FRAC_PI_2, &params).unwrap();
        pf_end = pf_end.max(end.numeric["pf"].abs());
    }
    let shape = evaluate(
        ScenarioId::NDetUnambiguous,
        0.2,
        &ScenarioParams {
            n: 2,
            ..ScenarioParams::default()
        },
    )
    .unwrap()
    .numeric["pf"];

    let pass = worst <= 1e-9 && zero_error <= 1e-12 && shape > 0.999 && pf_end <= 1e-12;
    report(
        2,
        pass,
        &format!(
            "max |pf - closed| = {worst:.2e} for n in 1..=3, worst cross term {zero_error:.2e}, pf(0.2) = {shape:.6}, pf(pi/2) = {pf_end:.2e}"
        ),
    );
}

#[test]
fn criterion_3_single_fire_reduction() {
    let grid = linspace(0.0, FRAC_PI_2, 181);
    let params = ScenarioParams::default();
    let mut worst: f64 = 0.0;
    let mut pattern_dev: f64 = 0.0;
    for &theta in &grid {
        let r = evaluate(ScenarioId::GroupedSingleFire, theta, &params).unwrap();
        let closed = 0.5 * (1.0 + (2.0 * theta).sin());
        worst = worst.max((r.numeric["ps"] - closed).abs());
        pattern_dev = pattern_dev.max(r.numeric["pattern_dev"]);
    }
    let pass = worst <= 1e-10 && pattern_dev <= 1e-12;
    report(
        3,
        pass,
        &format!("max |ps - closed| = {worst:.2e}, pattern dependence {pattern_dev:.2e}"),
    );
}

#[test]
fn criterion_4_grouped_entangled() {
    let grid = linspace(0.0, FRAC_PI_2, 181);
    let params = ScenarioParams::default();
    let mut worst: f64 = 0.0;
    for &theta in &grid {
        let r = evaluate(ScenarioId::GroupedMultiFireEntangled, theta, &params).unwrap();
        let closed = 0.5 + (2.0 * theta).sin() / 3.0 + (4.0 * theta).sin() / 6.0;
        worst = worst.max((r.numeric["ps"] - closed).abs());
    }
    let quarter = evaluate(ScenarioId::GroupedMultiFireEntangled, FRAC_PI_4, &params)
        .unwrap()
        .numeric["ps"];
    let eighth = evaluate(ScenarioId::GroupedMultiFireEntangled, FRAC_PI_8, &params)
        .unwrap()
        .numeric["ps"];
    let spot_quarter = (quarter - 5.0 / 6.0).abs();
    let spot_eighth = (eighth - 0.9023689270621824).abs();
    let pass = worst <= 1e-9 && spot_quarter <= 1e-9 && spot_eighth <= 1e-9;
    report(
        4,
        pass,
        &format!(
            "max |ps - closed| = {worst:.2e}, ps(pi/4) off by {spot_quarter:.2e}, ps(pi/8) off by {spot_eighth:.2e}"
        ),
    );
}

#[test]
fn criterion_5_crossover_and_product_fixture() {
    let params = ScenarioParams::default();
    let cross = crossover(
        ScenarioId::GroupedMultiFireEntangled,
        ScenarioId::GroupedMultiFireProduct,
        0.5,
        0.9,
        1e-9,
        &params,
    )
    .unwrap();
    let in_window = (0.65..=0.75).contains(&cross.theta_star);

    let rows = fixture_rows().unwrap();
    let mut reproduced = 0usize;
    for row in &rows {
        let recomputed = product_ps_oracle(row.theta).unwrap();
        if fmt_sig15(recomputed) == row.value_text {
            reproduced += 1;
        }
    }
    let pass = in_window && rows.len() == 16 && reproduced == rows.len();
    report(
        5,
        pass,
        &format!(
            "theta* = {:.6} in [0.65, 0.75], {reproduced}/{} fixture values reproduced to 15 digits",
            cross.theta_star,
            rows.len()
        ),
    );
}

#[test]
fn criterion_6_pgm_three_way() {
    let grid = linspace(0.05, FRAC_PI_2, 181);
    let params = ScenarioParams::default();
    let mut worst: f64 = 0.0;
    let mut strictly_below = true;
    for &theta in &grid {
        let r = evaluate(ScenarioId::GroupedWithNoFirePgm, theta, &params).unwrap();
        worst = worst.max((r.numeric["ps"] - r.closed_form["ps"]).abs());
        let two_way = evaluate(ScenarioId::GroupedMultiFireEntangled, theta, &params)
            .unwrap()
            .numeric["ps"];
        strictly_below &= r.numeric["ps"] < two_way;
    }
    let pass = worst <= 1e-9 && strictly_below;
    report(
        6,
        pass,
        &format!(
            "max |ps - closed| = {worst:.2e} on [0.05, pi/2], below two-hypothesis curve at all 181 points: {strictly_below}"
        ),
    );
}

#[test]
fn criterion_7_cluster_unambiguous() {
    let grid = linspace(0.0, FRAC_PI_2, 181);
    let pos = &grid[1..];
    let params = ScenarioParams::default();

    // Failure-operator positivity, including the degenerate endpoint 0.
    let mut min_eig = f64::INFINITY;
    for &theta in &grid {
        let scales = ClusterPovmParams::new(theta, 0.25, 0.25, 0.25).unwrap();
        let povm = cluster_unambiguous_povm(theta, &scales).unwrap();
        let fail = povm.get("fail").unwrap();
        min_eig = min_eig.min(hermitian_eig(fail).unwrap().eigenvalues[0]);
    }

    let mut quartic_worst: f64 = 0.0;
    for &theta in pos {
        let scales = ClusterPovmParams::new(theta, 0.25, 0.25, 0.25).unwrap();
        quartic_worst = quartic_worst.max(quartic_characteristic(&scales).unwrap().max_root_deviation);
    }

    let single = ScenarioParams {
        n: 1,
        ..ScenarioParams::default()
    };
    let mut collective_dev: f64 = 0.0;
    let mut individual_dev: f64 = 0.0;
    let mut beats = true;
    for &theta in pos {
        let r = evaluate(ScenarioId::ClusterUnambiguous, theta, &params).unwrap();
        let s2 = theta.sin().powi(2);
        let q = 3.0 + theta.cos().powi(2);
        let closed = 0.25 * (s2.powi(4) + 2.0 * s2.powi(3) * q + s2.powi(2) * q * q) / 16.0;
        collective_dev = collective_dev.max((r.numeric["ps_collective"] - closed).abs());

        let pf1 = evaluate(ScenarioId::NDetUnambiguous, theta, &single)
            .unwrap()
            .numeric["pf"];
        let individual = (1.0 - pf1).powi(4);
        individual_dev = individual_dev.max((individual - (1.0 - theta.cos()).powi(4)).abs());
        if theta <= 0.5 {
            beats &= r.numeric["ps_collective"] > individual;
        }
    }

    let spot = evaluate(ScenarioId::ClusterUnambiguous, FRAC_PI_4, &params).unwrap();
    let spot_coll = (spot.numeric["ps_collective"] - 1.0 / 16.0).abs();
    let spot_ind = (spot.closed_form["ps_individual"] - 0.007359312880714849).abs();

    let pass = min_eig >= -1e-10
        && quartic_worst <= 1e-8
        && collective_dev <= 1e-9
        && individual_dev <= 1e-12
        && beats
        && spot_coll <= 1e-9
        && spot_ind <= 1e-9;
    report(
        7,
        pass,
        &format!(
            "fail-operator min eigenvalue {min_eig:.2e}, quartic deviation {quartic_worst:.2e}, |ps - closed| = {collective_dev:.2e}, individual route off by {individual_dev:.2e}, collective beats individual up to 0.5: {beats}, spots off by {spot_coll:.2e} and {spot_ind:.2e}"
        ),
    );
}

#[test]
fn criterion_8_reported_discrepancies() {
    fn spectrum_deviation(spectrum: &[f64], p0: f64, p1: f64, gap: f64) -> f64 {
        let lo = 0.5 * ((p1 - p0) - gap);
        let hi = 0.5 * ((p1 - p0) + gap);
        (spectrum[0] - lo).abs().max((spectrum[1] - hi).abs())
    }

    let mut double_angle_worst: f64 = 0.0;
    let mut single_angle_min = f64::INFINITY;
    for &theta in &[FRAC_PI_6, FRAC_PI_3] {
        for &(p0, p1) in &[(0.5, 0.5), (0.25, 0.75)] {
            let res = helstrom_pure_qubit(p0, p1, theta).unwrap();
            let spectrum = hermitian_eig(&res.lambda_operator).unwrap().eigenvalues;

            let double_angle = (p0 * p0 + p1 * p1 - 2.0 * p0 * p1 * (2.0 * theta).cos()).sqrt();
            let single_angle = (p0 * p0 + p1 * p1 - 2.0 * p0 * p1 * theta.cos()).sqrt();
            double_angle_worst =
                double_angle_worst.max(spectrum_deviation(&spectrum, p0, p1, double_angle));
            single_angle_min =
                single_angle_min.min(spectrum_deviation(&spectrum, p0, p1, single_angle));
        }
    }

    let mut m_dev: f64 = 0.0;
    for &theta in &[FRAC_PI_6, FRAC_PI_3] {
        let problem = non_orthogonal_eigen_problem(theta).unwrap();
        m_dev = m_dev.max(m_spectrum_deviation(&problem).unwrap());
    }

    let pass = double_angle_worst <= 1e-10 && single_angle_min > 1e-3 && m_dev <= 1e-8;
    report(
        8,
        pass,
        &format!(
            "double-angle spectrum off by {double_angle_worst:.2e}, single-angle form off by at least {single_angle_min:.2e}, scaled difference spectrum off by {m_dev:.2e}"
        ),
    );
}

#[test]
fn criterion_9_full_verification_suite() {
    let start = Instant::now();
    let reports = run_all(None).unwrap();
    let elapsed = start.elapsed();

    let failing: Vec<&str> = reports
        .iter()
        .filter(|r| !r.pass)
        .map(|r| r.name.as_str())
        .collect();
    let has = |name: &str| reports.iter().any(|r| r.name == name && r.pass);
    let pass = failing.is_empty()
        && has("povm-validity")
        && has("probability-range")
        && elapsed < Duration::from_secs(30);
    report(
        9,
        pass,
        &format!(
            "{} checks in {elapsed:.1?}, failing: {failing:?}",
            reports.len()
        ),
    );
}
