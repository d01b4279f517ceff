//! Command-line front end: model inspection, open-loop simulation, control
//! synthesis, closed-loop tracking, scan generation, calibration, and
//! reproduction of the reference tables.

pub mod config;
pub mod output;
pub mod scenarios;

use clap::{Args, Parser, Subcommand};
use config::RunConfig;
use scanopt_core::models::{self, LinearModel};
use scanopt_core::reference;
use scanopt_core::scan::{self, ScanSource};
use scanopt_core::sim::{self, InputSignal};
use scanopt_core::toc::{self, TocProblem};
use scanopt_core::tracking::{measure_phase_delay, run_tracking};
use std::path::Path;

#[derive(Parser)]
#[command(name = "scanopt", version, about = "Two-mirror scanner analysis pipeline")]
struct Cli {
    /// Key=value configuration file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<String>,

    /// Extra `key=value` overrides applied after the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    sets: Vec<String>,

    /// Directory for output files.
    #[arg(long, global = true)]
    out_dir: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// Actuator selection: large | small.
    #[arg(long)]
    actuator: Option<String>,
    /// Mechanical correction: none | damping_x10 | zero_pivot_stiffness
    /// (model commands default to the raw actuator).
    #[arg(long, default_value = "none")]
    correction: String,
    /// Model order, 2 or 3.
    #[arg(long, default_value_t = 3)]
    order: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Print matrices, transfer function, eigenvalues and resonance data.
    ModelInfo(ModelArgs),
    /// Open-loop step response to CSV.
    Step {
        #[command(flatten)]
        model: ModelArgs,
        /// Step amplitude [V].
        #[arg(long, default_value_t = 1.0)]
        amplitude_volts: f64,
        #[arg(long)]
        duration_s: Option<f64>,
        #[arg(long)]
        dt_s: Option<f64>,
        /// Simulate the Coulomb friction model instead of the linear one.
        #[arg(long)]
        friction: bool,
        #[arg(long, default_value = "step.csv")]
        out: String,
    },
    /// Open-loop sinusoid response (cosine drive) to CSV.
    Sine {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 5.0)]
        amplitude_volts: f64,
        #[arg(long)]
        frequency_hz: Option<f64>,
        #[arg(long)]
        duration_s: Option<f64>,
        #[arg(long)]
        dt_s: Option<f64>,
        #[arg(long)]
        friction: bool,
        #[arg(long, default_value = "sine.csv")]
        out: String,
    },
    /// Frequency response: one point, or a logarithmic sweep to CSV.
    Bode {
        #[command(flatten)]
        model: ModelArgs,
        /// Single frequency [rad/s]; prints magnitude and phase.
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        from: f64,
        #[arg(long, default_value_t = 1e4)]
        to: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, default_value = "bode.csv")]
        out: String,
    },
    /// Synthesize a near time-optimal positioning control; prints the
    /// solution as JSON plus its optimality certificate.
    TocSolve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        u0: Option<f64>,
        #[arg(long, default_value_t = 8.35)]
        target_deg: f64,
    },
    /// Closed-loop tracking run to CSV with an accuracy summary.
    Track {
        /// Plant: linear2 | linear3 | friction3.
        #[arg(long)]
        plant: Option<String>,
        #[arg(long)]
        u0: Option<f64>,
        #[arg(long)]
        ts_control_s: Option<f64>,
        #[arg(long)]
        ts_demand_s: Option<f64>,
        #[arg(long)]
        duration_s: Option<f64>,
        /// Demand kind: constant | square | sinusoid.
        #[arg(long)]
        demand: Option<String>,
        #[arg(long)]
        amplitude_deg: Option<f64>,
        #[arg(long)]
        frequency_hz: Option<f64>,
        #[arg(long)]
        phase_shift_deg: Option<f64>,
        /// Measure and print the steady phase delay as well.
        #[arg(long)]
        phase: bool,
        /// Add per-sample solver diagnostic columns.
        #[arg(long)]
        verbose: bool,
        #[arg(long, default_value = "track.csv")]
        out: String,
    },
    /// Ideal or tracked scan to table-shaped CSV plus per-pass files.
    Scan {
        /// Source: ideal | tracked.
        #[arg(long, default_value = "ideal")]
        source: String,
        #[arg(long)]
        duration_s: Option<f64>,
        /// Apply the synchronizing phase shifts to the tracked source.
        #[arg(long)]
        synchronized: bool,
        /// Emit the 2-decimal reference-table layout instead of full precision.
        #[arg(long)]
        rounded: bool,
        #[arg(long, default_value = "scan.csv")]
        out: String,
    },
    /// Fit the friction torque or the scan geometry separation.
    Calibrate {
        /// What to fit: friction | geometry.
        #[arg(long)]
        what: String,
    },
    /// Re-run a reference scenario and compare against the embedded values.
    Reproduce {
        /// table2..table10, or `all`.
        table: String,
    },
    /// Long-format CSV (scenario, t, channel, value) for external plotting.
    PlotData {
        #[command(flatten)]
        model: ModelArgs,
        /// Scenario: step | sine.
        #[arg(long, default_value = "step")]
        scenario: String,
        #[arg(long, default_value_t = 5.0)]
        amplitude_volts: f64,
        #[arg(long)]
        frequency_hz: Option<f64>,
        #[arg(long)]
        duration_s: Option<f64>,
        #[arg(long)]
        friction: bool,
        #[arg(long, default_value = "plot.csv")]
        out: String,
    },
}

/// Run the CLI; returns the process exit code (0 ok, 1 validation error,
/// 2 reproduction mismatch).
pub fn cli_main<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own help/version through the error display
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let mut cfg = match &cli.config {
        Some(path) => match RunConfig::load(path) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        },
        None => RunConfig::default(),
    };
    for assignment in &cli.sets {
        let Some((key, value)) = assignment.split_once('=') else {
            eprintln!("error: --set expects KEY=VALUE, got {assignment:?}");
            return 1;
        };
        if let Err(message) = cfg.set(key.trim(), value.trim()) {
            eprintln!("error: {message}");
            return 1;
        }
    }
    if let Some(dir) = &cli.out_dir {
        cfg.output_dir = dir.clone();
    }
    match run_command(&cli.command, &mut cfg) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    }
}

fn apply_model_args(cfg: &mut RunConfig, args: &ModelArgs) -> Result<(), String> {
    if let Some(actuator) = &args.actuator {
        cfg.set("actuator", actuator)?;
    }
    cfg.set("correction", &args.correction)?;
    if args.order != 2 && args.order != 3 {
        return Err(format!("order must be 2 or 3, got {}", args.order));
    }
    Ok(())
}

fn write_file(cfg: &RunConfig, name: &str, contents: &str) -> Result<(), String> {
    let path = Path::new(&cfg.output_dir).join(name);
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| format!("{}: {e}", parent.display()))?;
    }
    std::fs::write(&path, contents).map_err(|e| format!("{}: {e}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn default_linear_dt(model: &LinearModel<f64>) -> f64 {
    // Keep an order of magnitude under the stability guard.
    let fastest = model.fastest_eigenvalue();
    if fastest > 0.0 {
        (0.01 / fastest).min(1e-4)
    } else {
        1e-4
    }
}

fn run_command(command: &Command, cfg: &mut RunConfig) -> Result<i32, String> {
    match command {
        Command::ModelInfo(args) => {
            apply_model_args(cfg, args)?;
            let params = cfg.actuator_params();
            let model = cfg.model(args.order).map_err(|e| e.to_string())?;
            println!("actuator: {:?}, correction: {:?}", cfg.actuator, cfg.correction);
            println!(
                "electrical time constant: {:.4e} s, mechanical: {} s",
                params.electrical_time_constant(),
                params
                    .mechanical_time_constant()
                    .map_or("n/a (zero stiffness)".to_string(), |t| format!("{t:.4e}")),
            );
            println!("A =");
            for i in 0..model.order() {
                let row: Vec<String> =
                    (0..model.order()).map(|j| format!("{:12.5}", model.a()[(i, j)])).collect();
                println!("  [{}]", row.join(", "));
            }
            let b: Vec<String> = model.b().iter().map(|v| format!("{v:.5}")).collect();
            println!("B = [{}]", b.join(", "));
            match models::transfer_function(&params, args.order) {
                Ok(tf) => {
                    let coeffs: Vec<String> =
                        tf.denom.iter().map(|c| format!("{c:.6e}")).collect();
                    println!(
                        "transfer function: K = {:.6e}, denominator [{}]{}",
                        tf.gain,
                        coeffs.join(", "),
                        if tf.integrator { " with integrator factor p" } else { "" },
                    );
                }
                Err(e) => println!("transfer function: {e}"),
            }
            let modal = models::modal_analysis(&model);
            for (k, e) in modal.eigenvalues.iter().enumerate() {
                println!("eigenvalue {}: {:.4} {:+.4}j", k + 1, e.re, e.im);
            }
            if let (Some(wn), Some(xi)) = (modal.natural_frequency, modal.damping_ratio) {
                println!("natural frequency: {wn:.4} rad/s, damping ratio: {xi:.5}");
            }
            match modal.resonant_frequency_hz {
                Some(fr) => println!("resonance at {fr:.4} Hz"),
                None => println!("no resonance peak"),
            }
            Ok(0)
        }
        Command::Step { model, amplitude_volts, duration_s, dt_s, friction, out } => {
            apply_model_args(cfg, model)?;
            let params = cfg.actuator_params();
            let m = cfg.model(model.order).map_err(|e| e.to_string())?;
            let input = InputSignal::step(*amplitude_volts);
            let duration = duration_s.unwrap_or(2.0);
            let series = if *friction {
                let dt = dt_s.unwrap_or(1e-5);
                sim::integrate_friction(&m, &params, &[0.0; 3], &input, dt, duration)
            } else {
                let dt = dt_s.unwrap_or_else(|| default_linear_dt(&m));
                sim::integrate_linear(&m, &params, &vec![0.0; m.order()], &input, dt, duration)
            }
            .map_err(|e| e.to_string())?;
            write_file(cfg, out, &output::series_csv(&series))?;
            println!(
                "final angle: {:.4} deg after {:.3} s",
                series.phi.last().unwrap().to_degrees(),
                duration
            );
            Ok(0)
        }
        Command::Sine { model, amplitude_volts, frequency_hz, duration_s, dt_s, friction, out } => {
            apply_model_args(cfg, model)?;
            let params = cfg.actuator_params();
            let m = cfg.model(model.order).map_err(|e| e.to_string())?;
            let f = frequency_hz.unwrap_or(cfg.demand_frequency_hz);
            let input = InputSignal::cosine(*amplitude_volts, f).map_err(|e| e.to_string())?;
            let duration = duration_s.unwrap_or((10.0 / f).max(2.0));
            let series = if *friction {
                let dt = dt_s.unwrap_or(1e-5);
                sim::integrate_friction(&m, &params, &[0.0; 3], &input, dt, duration)
            } else {
                let dt = dt_s.unwrap_or_else(|| default_linear_dt(&m));
                sim::integrate_linear(&m, &params, &vec![0.0; m.order()], &input, dt, duration)
            }
            .map_err(|e| e.to_string())?;
            let n = series.len();
            let steady =
                series.phi[n / 2..].iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
            write_file(cfg, out, &output::series_csv(&series))?;
            println!("steady amplitude: {:.4} deg at {f} Hz", steady.to_degrees());
            Ok(0)
        }
        Command::Bode { model, omega, from, to, points, out } => {
            apply_model_args(cfg, model)?;
            let m = cfg.model(model.order).map_err(|e| e.to_string())?;
            if let Some(w) = omega {
                let (mag, phase) = models::bode_point(&m, *w).map_err(|e| e.to_string())?;
                println!(
                    "omega {w} rad/s: magnitude {mag:.6}, phase {:.4} deg",
                    phase.to_degrees()
                );
                return Ok(0);
            }
            let mut csv = String::from("omega_rad_per_s,magnitude,phase_deg\n");
            let log_from = from.log10();
            let log_to = to.log10();
            for k in 0..*points {
                let w = 10f64.powf(
                    log_from + (log_to - log_from) * k as f64 / (*points as f64 - 1.0).max(1.0),
                );
                match models::bode_point(&m, w) {
                    Ok((mag, phase)) => {
                        csv.push_str(&format!(
                            "{},{},{}\n",
                            output::format_float(w),
                            output::format_float(mag),
                            output::format_float(phase.to_degrees()),
                        ));
                    }
                    Err(_) => continue, // skip singular frequencies
                }
            }
            write_file(cfg, out, &csv)?;
            Ok(0)
        }
        Command::TocSolve { model, u0, target_deg } => {
            apply_model_args(cfg, model)?;
            let m = cfg.model(model.order).map_err(|e| e.to_string())?;
            let n = m.order();
            let mut target = vec![0.0; n];
            target[0] = target_deg.to_radians();
            let problem = TocProblem::new(
                m,
                vec![0.0; n],
                target,
                u0.unwrap_or(cfg.u0_volts),
                TocProblem::default_accuracy(n),
            )
            .map_err(|e| e.to_string())?;
            if problem.has_complex_eigenvalues() {
                eprintln!(
                    "warning: plant has complex eigenvalues; no optimality claim attaches"
                );
            }
            let solution = toc::solve(&problem);
            println!("{}", serde_json::to_string_pretty(&solution).map_err(|e| e.to_string())?);
            match toc::certify(&problem, &solution) {
                Ok(cert) => {
                    println!(
                        "certificate: sign_match={}, switch residuals {:?}, H(t_f)={:.3e}",
                        cert.sign_match, cert.switch_residuals, cert.hamiltonian_bound
                    );
                }
                Err(e) => println!("certificate: {e}"),
            }
            Ok(if solution.converged { 0 } else { 1 })
        }
        Command::Track {
            plant,
            u0,
            ts_control_s,
            ts_demand_s,
            duration_s,
            demand,
            amplitude_deg,
            frequency_hz,
            phase_shift_deg,
            phase,
            verbose,
            out,
        } => {
            if let Some(p) = plant {
                cfg.set("plant", p)?;
            }
            if let Some(v) = u0 {
                cfg.u0_volts = *v;
            }
            if let Some(v) = ts_control_s {
                cfg.ts_control_s = *v;
            }
            if let Some(v) = ts_demand_s {
                cfg.ts_demand_s = Some(*v);
            }
            if let Some(d) = demand {
                cfg.set("demand.kind", d)?;
            }
            if let Some(v) = amplitude_deg {
                cfg.demand_amplitude_deg = *v;
            }
            if let Some(v) = frequency_hz {
                cfg.demand_frequency_hz = *v;
            }
            if let Some(v) = phase_shift_deg {
                cfg.phase_shift_deg = *v;
            }
            let plant = cfg.plant().map_err(|e| e.to_string())?;
            let controller = cfg.controller();
            let demand_signal = cfg.demand().map_err(|e| e.to_string())?;
            let duration = duration_s.unwrap_or(cfg.duration_s);
            let result = run_tracking(&plant, &controller, &demand_signal, duration)
                .map_err(|e| e.to_string())?;
            write_file(cfg, out, &output::tracking_csv(&result, *verbose))?;
            println!(
                "steady error vs held demand: {:.4} deg; vs continuous: {:.4} deg",
                result.accuracy_achieved.to_degrees(),
                result.accuracy_vs_continuous.to_degrees(),
            );
            if let Some(aligned) = result.accuracy_aligned {
                println!("steady error with lag removed: {:.4} deg", aligned.to_degrees());
            }
            println!("transition time: {:.3} s", result.transition_time);
            let failed = result.diagnostics.iter().filter(|d| !d.converged).count();
            if failed > 0 {
                println!("solver failures: {failed} of {}", result.diagnostics.len());
            }
            if *phase {
                match measure_phase_delay(&plant, &controller, &demand_signal, duration) {
                    Ok(delay) => println!("phase delay: {:.3} deg", delay.to_degrees()),
                    Err(e) => println!("phase delay: {e}"),
                }
            }
            Ok(0)
        }
        Command::Scan { source, duration_s, synchronized, rounded, out } => {
            let scan_cfg = cfg.scan_config();
            let duration = duration_s.unwrap_or(cfg.duration_s);
            let passes = match source.as_str() {
                "ideal" => scan::generate_scan(ScanSource::<f64>::Ideal, &scan_cfg, duration)
                    .map_err(|e| e.to_string())?,
                "tracked" => {
                    let (large, small) =
                        scenarios_tracked_runs(cfg, *synchronized, duration + 0.2)?;
                    scan::generate_scan(
                        ScanSource::Tracked { large: &large, small: &small },
                        &scan_cfg,
                        duration,
                    )
                    .map_err(|e| e.to_string())?
                }
                _ => return Err(format!("unknown scan source {source:?}")),
            };
            let body = if *rounded {
                output::scan_table_csv(&passes)
            } else {
                output::scan_csv(&passes)
            };
            write_file(cfg, out, &body)?;
            // One file per pass alongside the main table.
            let stem = out.trim_end_matches(".csv");
            for pass in &passes {
                let single = std::slice::from_ref(pass);
                let name = format!("{stem}_pass{:02}.csv", pass.index);
                write_file(cfg, &name, &output::scan_csv(single))?;
            }
            println!("passes: {}", passes.len());
            Ok(0)
        }
        Command::Calibrate { what } => match what.as_str() {
            "friction" => {
                let params = match cfg.actuator {
                    config::Actuator::Large => {
                        scanopt_core::models::ActuatorParams::large_mirror()
                    }
                    config::Actuator::Small => {
                        scanopt_core::models::ActuatorParams::small_mirror()
                    }
                };
                let fit = sim::calibrate_coulomb_torque(
                    &params,
                    reference::STEADY_OUTPUT_SLOPE_DEG_PER_V,
                )
                .map_err(|e| e.to_string())?;
                println!(
                    "coulomb torque: {:.6} N·m (worst slope error {:.3}%)",
                    fit.coulomb_torque,
                    fit.worst_relative_error * 100.0
                );
                for (u0, slope) in &fit.slopes {
                    println!("  step +{u0:.0} V: steady slope {slope:.4} deg/V");
                }
                Ok(0)
            }
            "geometry" => {
                let samples: Vec<scanopt_core::ScanSample64> = reference::IDEAL_SCAN_200M
                    .iter()
                    .map(|r| scanopt_core::ScanSample64 {
                        t: r[0],
                        phi_lm_deg: r[1],
                        phi_sm_deg: r[2],
                        x: r[3],
                        y: r[4],
                    })
                    .collect();
                let fit = scan::calibrate_separation(&samples, cfg.scan_range_m)
                    .map_err(|e| e.to_string())?;
                println!(
                    "mirror separation: {:.5} m (residual rms {:.4} m)",
                    fit.separation, fit.residual_rms
                );
                Ok(0)
            }
            _ => Err(format!("unknown calibration {what:?}; expected friction or geometry")),
        },
        Command::Reproduce { table } => {
            let tables: Vec<&str> = if table == "all" {
                scenarios::TABLE_NAMES.to_vec()
            } else {
                vec![table.as_str()]
            };
            let mut all_passed = true;
            for name in tables {
                let report = scenarios::reproduce(name, cfg)?;
                for (check, deviation, tolerance) in &report.checks {
                    println!(
                        "{name}: {} {check}: worst {deviation:.3e} (tolerance {tolerance:.3e})",
                        if *deviation <= *tolerance { "pass" } else { "FAIL" },
                    );
                }
                for (file, contents) in &report.artifacts {
                    write_file(cfg, file, contents)?;
                }
                println!("{name}: {}", if report.passed { "PASS" } else { "FAIL" });
                all_passed &= report.passed;
            }
            Ok(if all_passed { 0 } else { 2 })
        }
        Command::PlotData {
            model,
            scenario,
            amplitude_volts,
            frequency_hz,
            duration_s,
            friction,
            out,
        } => {
            apply_model_args(cfg, model)?;
            let params = cfg.actuator_params();
            let m = cfg.model(model.order).map_err(|e| e.to_string())?;
            let f = frequency_hz.unwrap_or(cfg.demand_frequency_hz);
            let input = match scenario.as_str() {
                "step" => InputSignal::step(*amplitude_volts),
                "sine" => InputSignal::cosine(*amplitude_volts, f).map_err(|e| e.to_string())?,
                _ => return Err(format!("unknown scenario {scenario:?}")),
            };
            let duration = duration_s.unwrap_or(1.0);
            let series = if *friction {
                sim::integrate_friction(&m, &params, &[0.0; 3], &input, 1e-5, duration)
            } else {
                let dt = default_linear_dt(&m);
                sim::integrate_linear(&m, &params, &vec![0.0; m.order()], &input, dt, duration)
            }
            .map_err(|e| e.to_string())?;
            write_file(cfg, out, &output::long_csv(&series, scenario))?;
            Ok(0)
        }
    }
}

/// Tracked scan runs shared by `scan --source tracked`.
fn scenarios_tracked_runs(
    cfg: &RunConfig,
    synchronized: bool,
    duration: f64,
) -> Result<(scanopt_core::TrackingResult64, scanopt_core::TrackingResult64), String> {
    use scanopt_core::models::{ActuatorParams, Correction};
    use scanopt_core::tracking::{ControllerConfig, DemandSignal, Plant};
    let tc = cfg.coulomb_torque_nm;
    let scan_cfg = cfg.scan_config();
    let lm_params = ActuatorParams::large_mirror()
        .corrected(Correction::ZeroPivotStiffness)
        .with_coulomb_torque(tc);
    let lm_plant = Plant::Friction {
        model: LinearModel::third_order(&lm_params).map_err(|e| e.to_string())?,
        params: lm_params,
    };
    let sm_params = ActuatorParams::small_mirror()
        .corrected(Correction::ZeroPivotStiffness)
        .with_coulomb_torque(tc);
    let sm_plant = Plant::Friction {
        model: LinearModel::third_order(&sm_params).map_err(|e| e.to_string())?,
        params: sm_params,
    };
    let mut lm_cfg = ControllerConfig::new(cfg.u0_volts, 4e-3);
    lm_cfg.record_dt = 4e-3;
    let mut sm_cfg = ControllerConfig::two_rate(cfg.u0_volts, 4e-3, 1e-3);
    sm_cfg.record_dt = 1e-3;
    if synchronized {
        lm_cfg.phase_shift = reference::PHASE_SHIFT_LARGE_DEG.to_radians();
        sm_cfg.phase_shift = reference::PHASE_SHIFT_SMALL_DEG.to_radians();
    }
    let lm_demand = DemandSignal::scan_cosine(scan_cfg.amplitude_lm, scan_cfg.frequency_lm)
        .map_err(|e| e.to_string())?;
    let sm_demand =
        DemandSignal::scan_negative_sine(scan_cfg.amplitude_sm, scan_cfg.frequency_sm)
            .map_err(|e| e.to_string())?;
    let large = run_tracking(&lm_plant, &lm_cfg, &lm_demand, duration).map_err(|e| e.to_string())?;
    let small = run_tracking(&sm_plant, &sm_cfg, &sm_demand, duration).map_err(|e| e.to_string())?;
    Ok((large, small))
}
