//! Reproduction scenarios: run a pipeline configuration and compare the
//! result against the embedded reference values, reporting the worst
//! deviation per quantity.

use crate::config::RunConfig;
use crate::output;
use scanopt_core::models::{ActuatorParams, Correction, LinearModel};
use scanopt_core::reference;
use scanopt_core::scan::{self, ScanSource};
use scanopt_core::toc::{self, TocProblem};
use scanopt_core::tracking::{run_tracking, ControllerConfig, DemandSignal, Plant};

/// Outcome of one reproduction scenario.
pub struct Report {
    pub name: String,
    pub passed: bool,
    /// Human-readable per-check lines: (check, worst deviation, tolerance).
    pub checks: Vec<(String, f64, f64)>,
    /// Files written, as (name, contents).
    pub artifacts: Vec<(String, String)>,
}

impl Report {
    fn new(name: &str) -> Self {
        Self { name: name.into(), passed: true, checks: Vec::new(), artifacts: Vec::new() }
    }

    fn check(&mut self, what: impl Into<String>, deviation: f64, tolerance: f64) {
        if !(deviation <= tolerance) {
            self.passed = false;
        }
        self.checks.push((what.into(), deviation, tolerance));
    }
}

pub const TABLE_NAMES: [&str; 9] =
    ["table2", "table3", "table4", "table5", "table6", "table7", "table8", "table9", "table10"];

pub fn reproduce(table: &str, cfg: &RunConfig) -> Result<Report, String> {
    match table {
        "table2" => Ok(ideal_scan_table(cfg)),
        "table3" | "table4" | "table5" | "table6" | "table7" | "table8" => {
            Ok(solver_table(table))
        }
        "table9" => tracked_scan_table(cfg, false),
        "table10" => tracked_scan_table(cfg, true),
        _ => Err(format!("unknown table {table:?}; expected one of {TABLE_NAMES:?}")),
    }
}

/// The ideal scan pattern against the full 101-row reference table.
fn ideal_scan_table(cfg: &RunConfig) -> Report {
    let mut report = Report::new("table2");
    let scan_cfg = cfg.scan_config();
    let passes = match scan::generate_scan(ScanSource::<f64>::Ideal, &scan_cfg, 0.4) {
        Ok(p) => p,
        Err(e) => {
            report.check(format!("scan generation failed: {e}"), f64::INFINITY, 0.0);
            return report;
        }
    };
    let samples: Vec<_> = passes.iter().flat_map(|p| p.samples.iter()).collect();
    report.check("row count", (samples.len() as f64 - 101.0).abs(), 0.0);
    let (mut w_lm, mut w_sm, mut w_x, mut w_y) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (s, r) in samples.iter().zip(reference::IDEAL_SCAN_200M.iter()) {
        w_lm = w_lm.max((s.phi_lm_deg - r[1]).abs());
        w_sm = w_sm.max((s.phi_sm_deg - r[2]).abs());
        w_x = w_x.max((s.x - r[3]).abs());
        w_y = w_y.max((s.y - r[4]).abs());
    }
    report.check("large mirror angle [deg]", w_lm, 0.005);
    report.check("small mirror angle [deg]", w_sm, 0.005);
    report.check("horizontal position [m]", w_x, 0.05);
    report.check("vertical position [m]", w_y, 0.05);
    report.artifacts.push(("table2.csv".into(), output::scan_table_csv(&passes)));
    report.artifacts.push(("table2_full.csv".into(), output::scan_csv(&passes)));
    report
}

/// Build the solver problem for one reference positioning case.
pub fn reference_problem(case: &reference::ReferenceSolution) -> TocProblem<f64> {
    let params = match case.actuator {
        "large" => ActuatorParams::large_mirror(),
        _ => ActuatorParams::small_mirror(),
    };
    let params = match case.correction {
        "damping_x10" => params.corrected(Correction::DampingTimesTen),
        "zero_pivot_stiffness" => params.corrected(Correction::ZeroPivotStiffness),
        _ => params,
    };
    let model = match case.order {
        2 => LinearModel::simplified_second_order(&params).unwrap(),
        _ => LinearModel::third_order(&params).unwrap(),
    };
    let n = model.order();
    let mut target = vec![0.0; n];
    target[0] = case.target_deg.to_radians();
    let mut accuracy: Vec<f64> = case.accuracy.to_vec();
    accuracy[0] = accuracy[0].to_radians();
    accuracy[1] = accuracy[1].to_radians();
    TocProblem::new(model, vec![0.0; n], target, case.control_bound, accuracy).unwrap()
}

/// One positioning table: every reference solution registered under it.
fn solver_table(table: &str) -> Report {
    let mut report = Report::new(table);
    let mut json_lines = Vec::new();
    for case in reference::REFERENCE_SOLUTIONS.iter().filter(|c| c.name == table) {
        let problem = reference_problem(case);
        let solution = toc::solve(&problem);
        let label = format!("order {}", case.order);
        report.check(
            format!("{label}: converged"),
            if solution.converged { 0.0 } else { 1.0 },
            0.0,
        );
        report.check(
            format!("{label}: interval count"),
            (solution.intervals.len() as f64 - case.intervals.len() as f64).abs(),
            0.0,
        );
        for (i, (&got, &want)) in solution.intervals.iter().zip(case.intervals).enumerate() {
            report.check(
                format!("{label}: interval {} [s]", i + 1),
                (got - want).abs(),
                reference::SOLUTION_TIME_TOLERANCE,
            );
        }
        report.check(
            format!("{label}: total time [s]"),
            (solution.total_time - case.total_time).abs(),
            reference::SOLUTION_TIME_TOLERANCE,
        );
        match toc::certify(&problem, &solution) {
            Ok(cert) => {
                report.check(
                    format!("{label}: certificate sign match"),
                    if cert.sign_match { 0.0 } else { 1.0 },
                    0.0,
                );
                let worst = cert
                    .switch_residuals
                    .iter()
                    .fold(0.0f64, |m, r| m.max(r.abs()));
                report.check(format!("{label}: switch residuals"), worst, 1e-10);
            }
            Err(e) => report.check(format!("{label}: certificate failed: {e}"), 1.0, 0.0),
        }
        json_lines.push(serde_json::to_string_pretty(&solution).unwrap_or_default());
    }
    if report.checks.is_empty() {
        report.check("no reference cases registered", 1.0, 0.0);
    }
    report.artifacts.push((format!("{table}_solutions.json"), json_lines.join("\n")));
    report
}

/// Scan-system tracking configuration: large mirror at 4 ms, small mirror at
/// two rates (4 ms demand / 1 ms control), friction plants, 20 V bounds.
fn scan_tracking_runs(
    cfg: &RunConfig,
    with_phase_shift: bool,
    duration: f64,
) -> Result<
    (scanopt_core::TrackingResult64, scanopt_core::TrackingResult64),
    String,
> {
    let tc = cfg.coulomb_torque_nm;
    let lm_params = ActuatorParams::large_mirror()
        .corrected(Correction::ZeroPivotStiffness)
        .with_coulomb_torque(tc);
    let lm_model = LinearModel::third_order(&lm_params).map_err(|e| e.to_string())?;
    let lm_plant = Plant::Friction { model: lm_model, params: lm_params };
    let sm_params = ActuatorParams::small_mirror()
        .corrected(Correction::ZeroPivotStiffness)
        .with_coulomb_torque(tc);
    let sm_model = LinearModel::third_order(&sm_params).map_err(|e| e.to_string())?;
    let sm_plant = Plant::Friction { model: sm_model, params: sm_params };

    let mut lm_cfg = ControllerConfig::new(20.0, 4e-3);
    lm_cfg.record_dt = 4e-3;
    lm_cfg.switch_within_period = cfg.switch_within_period;
    let mut sm_cfg = ControllerConfig::two_rate(20.0, 4e-3, 1e-3);
    sm_cfg.record_dt = 1e-3;
    sm_cfg.switch_within_period = cfg.switch_within_period;
    if with_phase_shift {
        lm_cfg.phase_shift = reference::PHASE_SHIFT_LARGE_DEG.to_radians();
        sm_cfg.phase_shift = reference::PHASE_SHIFT_SMALL_DEG.to_radians();
    }
    let scan_cfg = cfg.scan_config();
    let lm_demand = DemandSignal::scan_cosine(scan_cfg.amplitude_lm, scan_cfg.frequency_lm)
        .map_err(|e| e.to_string())?;
    let sm_demand =
        DemandSignal::scan_negative_sine(scan_cfg.amplitude_sm, scan_cfg.frequency_sm)
            .map_err(|e| e.to_string())?;
    let large =
        run_tracking(&lm_plant, &lm_cfg, &lm_demand, duration).map_err(|e| e.to_string())?;
    let small =
        run_tracking(&sm_plant, &sm_cfg, &sm_demand, duration).map_err(|e| e.to_string())?;
    Ok((large, small))
}

/// Tracked scan against the published t = 1.0 s row, with or without the
/// synchronizing phase shifts.
fn tracked_scan_table(cfg: &RunConfig, with_phase_shift: bool) -> Result<Report, String> {
    let name = if with_phase_shift { "table10" } else { "table9" };
    let mut report = Report::new(name);
    let duration = 1.2;
    let (large, small) = scan_tracking_runs(cfg, with_phase_shift, duration)?;
    let scan_cfg = cfg.scan_config();
    let passes =
        scan::generate_scan(ScanSource::Tracked { large: &large, small: &small }, &scan_cfg, 1.0)
            .map_err(|e| e.to_string())?;
    let sample = passes
        .iter()
        .flat_map(|p| p.samples.iter())
        .find(|s| (s.t - 1.0).abs() < 1e-9)
        .ok_or_else(|| "no sample at t = 1.0 s".to_string())?;
    let reference_row = if with_phase_shift {
        reference::SYNCHRONIZED_SCAN_ROW_1S
    } else {
        reference::TRACKED_SCAN_ROW_1S
    };
    report.check(
        "large mirror at t=1.0 s [deg]",
        (sample.phi_lm_deg - reference_row[0]).abs(),
        reference::TRACKED_SCAN_ANGLE_TOLERANCE_DEG,
    );
    report.check(
        "small mirror at t=1.0 s [deg]",
        (sample.phi_sm_deg - reference_row[1]).abs(),
        reference::TRACKED_SCAN_ANGLE_TOLERANCE_DEG,
    );
    report.artifacts.push((format!("{name}.csv"), output::scan_table_csv(&passes)));
    report.artifacts.push((format!("{name}_full.csv"), output::scan_csv(&passes)));
    Ok(report)
}
