//! CSV emission and re-parsing.
//!
//! Fixed format for reproducible diffs: comma separator, `.` decimal point,
//! LF line endings, one header row with unit-suffixed column names, floats
//! printed with six decimals. Angle channels are emitted in degrees.

use scanopt_core::scan::Pass;
use scanopt_core::tracking::TrackingResult;
use scanopt_core::TimeSeries64;
use std::fmt::Write as _;

pub fn format_float(v: f64) -> String {
    // Normalize values that round to zero so no "-0.000000" leaks out.
    let rounded = (v * 1e6).round() / 1e6;
    let v = if rounded == 0.0 { 0.0 } else { v };
    format!("{v:.6}")
}

fn format_2dp(v: f64) -> String {
    let rounded = (v * 100.0).round() / 100.0;
    let v = if rounded == 0.0 { 0.0 } else { v };
    format!("{v:.2}")
}

/// Wide-format CSV for a simulation series.
pub fn series_csv(series: &TimeSeries64) -> String {
    let mut out = String::new();
    out.push_str("t_s,phi_deg,omega_deg_per_s,i_a,u_v,t_rl_nm,t_cf_nm,t_r_nm,stick\n");
    for k in 0..series.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            format_float(series.time(k)),
            format_float(series.phi[k].to_degrees()),
            format_float(series.omega[k].to_degrees()),
            format_float(series.current[k]),
            format_float(series.input[k]),
            format_float(series.torque_linear[k]),
            format_float(series.torque_friction[k]),
            format_float(series.torque_net[k]),
            series.stick[k],
        );
    }
    out
}

/// Tracking run CSV: plant channels plus the demand channels.
pub fn tracking_csv(result: &TrackingResult<f64>, verbose: bool) -> String {
    let series = &result.series;
    let mut out = String::new();
    out.push_str(
        "t_s,phi_deg,omega_deg_per_s,i_a,u_v,demand_deg,demand_continuous_deg,t_rl_nm,t_cf_nm,t_r_nm,stick",
    );
    if verbose {
        out.push_str(",solver_converged,solver_intervals");
    }
    out.push('\n');
    for k in 0..series.len() {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            format_float(series.time(k)),
            format_float(series.phi[k].to_degrees()),
            format_float(series.omega[k].to_degrees()),
            format_float(series.current[k]),
            format_float(series.input[k]),
            format_float(result.demand_held[k].to_degrees()),
            format_float(result.demand_continuous[k].to_degrees()),
            format_float(series.torque_linear[k]),
            format_float(series.torque_friction[k]),
            format_float(series.torque_net[k]),
            series.stick[k],
        );
        if verbose {
            // Latest control decision in force at this row's time.
            let t = series.time(k);
            let idx = result.diagnostics.partition_point(|d| d.t <= t + 1e-12);
            let d = idx.checked_sub(1).and_then(|i| result.diagnostics.get(i));
            let _ = write!(
                out,
                ",{},{}",
                d.map_or(0, |d| u8::from(d.converged)),
                d.map_or(0, |d| d.interval_count),
            );
        }
        out.push('\n');
    }
    out
}

/// Scan samples in working precision.
pub fn scan_csv(passes: &[Pass<f64>]) -> String {
    let mut out = String::new();
    out.push_str("t_s,pass,parity,phi_lm_deg,phi_sm_deg,x_m,y_m\n");
    for pass in passes {
        let parity = match pass.parity {
            scanopt_core::scan::Parity::Odd => "odd",
            scanopt_core::scan::Parity::Even => "even",
        };
        for s in &pass.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                format_float(s.t),
                pass.index,
                parity,
                format_float(s.phi_lm_deg),
                format_float(s.phi_sm_deg),
                format_float(s.x),
                format_float(s.y),
            );
        }
    }
    out
}

/// Scan samples in the 2-decimal reference-table layout
/// (time, large mirror, small mirror, horizontal, vertical).
pub fn scan_table_csv(passes: &[Pass<f64>]) -> String {
    let mut out = String::new();
    out.push_str("time_s,large_mirror_deg,small_mirror_deg,horizontal_m,vertical_m\n");
    for pass in passes {
        for s in &pass.samples {
            let _ = writeln!(
                out,
                "{:.3},{},{},{},{}",
                s.t,
                format_2dp(s.phi_lm_deg),
                format_2dp(s.phi_sm_deg),
                format_2dp(s.x),
                format_2dp(s.y)
            );
        }
    }
    out
}

/// Long-format CSV for external plotting: one `(t, channel, value)` per row.
pub fn long_csv(series: &TimeSeries64, scenario: &str) -> String {
    let mut out = String::new();
    out.push_str("scenario,t_s,channel,value\n");
    let channels: [(&str, &dyn Fn(usize) -> f64); 8] = [
        ("phi_deg", &|k| series.phi[k].to_degrees()),
        ("omega_deg_per_s", &|k| series.omega[k].to_degrees()),
        ("i_a", &|k| series.current[k]),
        ("u_v", &|k| series.input[k]),
        ("t_rl_nm", &|k| series.torque_linear[k]),
        ("t_cf_nm", &|k| series.torque_friction[k]),
        ("t_r_nm", &|k| series.torque_net[k]),
        ("stick", &|k| series.stick[k] as f64),
    ];
    for k in 0..series.len() {
        for (name, get) in &channels {
            let _ = writeln!(
                out,
                "{scenario},{},{name},{}",
                format_float(series.time(k)),
                format_float(get(k)),
            );
        }
    }
    out
}

/// Parse one of our own CSV files back into header + numeric rows
/// (non-numeric cells come back as NaN).
pub fn parse_csv(text: &str) -> Option<(Vec<String>, Vec<Vec<f64>>)> {
    let mut lines = text.lines();
    let header: Vec<String> = lines.next()?.split(',').map(str::to_string).collect();
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> =
            line.split(',').map(|cell| cell.parse().unwrap_or(f64::NAN)).collect();
        if row.len() != header.len() {
            return None;
        }
        rows.push(row);
    }
    Some((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use scanopt_core::models::{ActuatorParams, LinearModel};
    use scanopt_core::sim::{integrate_linear, InputSignal};

    #[test]
    fn series_csv_round_trips() {
        let p = ActuatorParams::large_mirror();
        let m = LinearModel::third_order(&p).unwrap();
        let s = integrate_linear(&m, &p, &[0.0; 3], &InputSignal::step(1.0), 1e-5, 0.002).unwrap();
        let csv = series_csv(&s);
        let (header, rows) = parse_csv(&csv).unwrap();
        assert_eq!(header[0], "t_s");
        assert_eq!(rows.len(), s.len());
        assert!((rows[10][1] - s.phi[10].to_degrees()).abs() < 1e-6);
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn float_formatting_is_fixed_width() {
        assert_eq!(format_float(1.0), "1.000000");
        assert_eq!(format_float(-0.1234567), "-0.123457");
    }
}
