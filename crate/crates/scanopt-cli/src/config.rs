//! Flat key=value run configuration.
//!
//! One assignment per line, `#` comments, keys namespaced with dots
//! (`controller.u0_volts=20`). Unknown keys are errors so typos cannot
//! silently fall back to defaults. Flags override the file; the file
//! overrides the baseline defaults (large mirror, zero pivot stiffness,
//! 20 V bound, 1 ms sampling, prediction on).

use scanopt_core::models::{ActuatorParams, Correction, LinearModel};
use scanopt_core::reference;
use scanopt_core::tracking::{ControllerConfig, DemandSignal, Plant, TargetMode};
use scanopt_core::ScanConfig64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Actuator {
    Large,
    Small,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrectionChoice {
    None,
    DampingX10,
    ZeroPivotStiffness,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlantChoice {
    Linear2,
    Linear3,
    Friction3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DemandKind {
    Constant,
    Square,
    Sinusoid,
}

/// Fully resolved run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub actuator: Actuator,
    pub correction: CorrectionChoice,
    pub plant: PlantChoice,
    pub coulomb_torque_nm: f64,
    pub u0_volts: f64,
    pub ts_control_s: f64,
    pub ts_demand_s: Option<f64>,
    pub prediction: bool,
    pub target_mode: TargetMode,
    pub phase_shift_deg: f64,
    pub record_dt_s: Option<f64>,
    pub switch_within_period: bool,
    pub demand_kind: DemandKind,
    pub demand_amplitude_deg: f64,
    pub demand_frequency_hz: f64,
    pub demand_phase_deg: f64,
    pub scan_range_m: f64,
    pub scan_separation_m: f64,
    pub scan_sample_period_s: f64,
    pub sim_dt_s: f64,
    pub duration_s: f64,
    pub output_dir: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            actuator: Actuator::Large,
            correction: CorrectionChoice::ZeroPivotStiffness,
            plant: PlantChoice::Friction3,
            coulomb_torque_nm: reference::DEFAULT_COULOMB_TORQUE_NM,
            u0_volts: 20.0,
            ts_control_s: 1e-3,
            ts_demand_s: None,
            prediction: true,
            target_mode: TargetMode::PositionOnly,
            phase_shift_deg: 0.0,
            record_dt_s: None,
            switch_within_period: false,
            demand_kind: DemandKind::Sinusoid,
            demand_amplitude_deg: 8.35,
            demand_frequency_hz: 2.5,
            demand_phase_deg: 90.0,
            scan_range_m: 200.0,
            scan_separation_m: reference::DEFAULT_MIRROR_SEPARATION_M,
            scan_sample_period_s: 4e-3,
            sim_dt_s: 1e-5,
            duration_s: 1.0,
            output_dir: ".".into(),
        }
    }
}

#[derive(Debug)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(line) => write!(f, "config line {line}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl RunConfig {
    /// Parse a config file on top of the defaults.
    pub fn load(path: &str) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError { line: None, message: format!("{path}: {e}") })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let stripped = raw.split('#').next().unwrap_or("").trim();
            if stripped.is_empty() {
                continue;
            }
            let Some((key, value)) = stripped.split_once('=') else {
                return Err(ConfigError {
                    line: Some(line),
                    message: format!("expected key=value, got {stripped:?}"),
                });
            };
            cfg.set(key.trim(), value.trim())
                .map_err(|message| ConfigError { line: Some(line), message })?;
        }
        Ok(cfg)
    }

    /// Apply one assignment; used both by the parser and flag overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        fn num(value: &str) -> Result<f64, String> {
            value.parse().map_err(|_| format!("expected a number, got {value:?}"))
        }
        fn flag(value: &str) -> Result<bool, String> {
            match value {
                "true" | "on" | "1" | "yes" => Ok(true),
                "false" | "off" | "0" | "no" => Ok(false),
                _ => Err(format!("expected a boolean, got {value:?}")),
            }
        }
        match key {
            "actuator" => {
                self.actuator = match value {
                    "large" => Actuator::Large,
                    "small" => Actuator::Small,
                    _ => return Err(format!("unknown actuator {value:?}")),
                }
            }
            "correction" => {
                self.correction = match value {
                    "none" => CorrectionChoice::None,
                    "damping_x10" => CorrectionChoice::DampingX10,
                    "zero_pivot_stiffness" => CorrectionChoice::ZeroPivotStiffness,
                    _ => return Err(format!("unknown correction {value:?}")),
                }
            }
            "plant" => {
                self.plant = match value {
                    "linear2" => PlantChoice::Linear2,
                    "linear3" => PlantChoice::Linear3,
                    "friction3" => PlantChoice::Friction3,
                    _ => return Err(format!("unknown plant {value:?}")),
                }
            }
            "actuator.tc_nm" => self.coulomb_torque_nm = num(value)?,
            "controller.u0_volts" => self.u0_volts = num(value)?,
            "controller.ts_control_s" => self.ts_control_s = num(value)?,
            "controller.ts_demand_s" => self.ts_demand_s = Some(num(value)?),
            "controller.prediction" => self.prediction = flag(value)?,
            "controller.target_mode" => {
                self.target_mode = match value {
                    "position_only" => TargetMode::PositionOnly,
                    "position_velocity" => TargetMode::PositionVelocity,
                    _ => return Err(format!("unknown target mode {value:?}")),
                }
            }
            "controller.phase_shift_deg" => self.phase_shift_deg = num(value)?,
            "controller.record_dt_s" => self.record_dt_s = Some(num(value)?),
            "controller.switch_within_period" => self.switch_within_period = flag(value)?,
            "demand.kind" => {
                self.demand_kind = match value {
                    "constant" => DemandKind::Constant,
                    "square" => DemandKind::Square,
                    "sinusoid" => DemandKind::Sinusoid,
                    _ => return Err(format!("unknown demand kind {value:?}")),
                }
            }
            "demand.amplitude_deg" => self.demand_amplitude_deg = num(value)?,
            "demand.frequency_hz" => self.demand_frequency_hz = num(value)?,
            "demand.phase_deg" => self.demand_phase_deg = num(value)?,
            "scan.range_m" => self.scan_range_m = num(value)?,
            "scan.separation_m" => self.scan_separation_m = num(value)?,
            "scan.sample_period_s" => self.scan_sample_period_s = num(value)?,
            "sim.dt_s" => self.sim_dt_s = num(value)?,
            "sim.duration_s" => self.duration_s = num(value)?,
            "output.dir" => self.output_dir = value.to_string(),
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    pub fn actuator_params(&self) -> ActuatorParams<f64> {
        let base = match self.actuator {
            Actuator::Large => ActuatorParams::large_mirror(),
            Actuator::Small => ActuatorParams::small_mirror(),
        };
        let base = match self.correction {
            CorrectionChoice::None => base,
            CorrectionChoice::DampingX10 => base.corrected(Correction::DampingTimesTen),
            CorrectionChoice::ZeroPivotStiffness => {
                base.corrected(Correction::ZeroPivotStiffness)
            }
        };
        base.with_coulomb_torque(self.coulomb_torque_nm)
    }

    pub fn model(&self, order: usize) -> scanopt_core::Result<LinearModel<f64>> {
        let params = self.actuator_params();
        match order {
            2 => LinearModel::simplified_second_order(&params),
            _ => LinearModel::third_order(&params),
        }
    }

    pub fn plant(&self) -> scanopt_core::Result<Plant<f64>> {
        let params = self.actuator_params();
        Ok(match self.plant {
            PlantChoice::Linear2 => Plant::Linear {
                model: LinearModel::simplified_second_order(&params)?,
                params,
            },
            PlantChoice::Linear3 => {
                Plant::Linear { model: LinearModel::third_order(&params)?, params }
            }
            PlantChoice::Friction3 => {
                Plant::Friction { model: LinearModel::third_order(&params)?, params }
            }
        })
    }

    pub fn controller(&self) -> ControllerConfig<f64> {
        let mut cfg = ControllerConfig::new(self.u0_volts, self.ts_control_s);
        if let Some(ts_d) = self.ts_demand_s {
            cfg.ts_demand = ts_d;
        }
        cfg.prediction = self.prediction;
        cfg.target_mode = self.target_mode;
        cfg.phase_shift = self.phase_shift_deg.to_radians();
        cfg.switch_within_period = self.switch_within_period;
        if let Some(rd) = self.record_dt_s {
            cfg.record_dt = rd;
        }
        cfg
    }

    pub fn demand(&self) -> scanopt_core::Result<DemandSignal<f64>> {
        let amp = self.demand_amplitude_deg.to_radians();
        match self.demand_kind {
            DemandKind::Constant => Ok(DemandSignal::constant(amp)),
            DemandKind::Square => DemandSignal::square(amp, self.demand_frequency_hz),
            DemandKind::Sinusoid => DemandSignal::sinusoid(
                amp,
                self.demand_frequency_hz,
                self.demand_phase_deg.to_radians(),
            ),
        }
    }

    pub fn scan_config(&self) -> ScanConfig64 {
        let mut cfg = ScanConfig64::standard();
        cfg.range = self.scan_range_m;
        cfg.mirror_separation = self.scan_separation_m;
        cfg.sample_period = self.scan_sample_period_s;
        cfg
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = RunConfig::parse("").unwrap();
        assert_eq!(cfg.u0_volts, 20.0);
        assert_eq!(cfg.ts_control_s, 1e-3);
        assert_eq!(cfg.actuator, Actuator::Large);
        assert_eq!(cfg.correction, CorrectionChoice::ZeroPivotStiffness);
        assert!(cfg.prediction);
    }

    #[test]
    fn single_override() {
        let cfg = RunConfig::parse("controller.u0_volts=10\n").unwrap();
        assert_eq!(cfg.u0_volts, 10.0);
        assert_eq!(cfg.ts_control_s, 1e-3);
    }

    #[test]
    fn two_rate_mode() {
        let text = "controller.ts_demand_s=0.004\ncontroller.ts_control_s=0.001\n";
        let cfg = RunConfig::parse(text).unwrap();
        let ctl = cfg.controller();
        assert_eq!(ctl.ts_demand, 0.004);
        assert_eq!(ctl.ts_control, 0.001);
        assert!(ctl.validate().is_ok());
    }

    #[test]
    fn comments_and_whitespace() {
        let text = "# baseline\n  actuator = small  # fast mirror\n\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.actuator, Actuator::Small);
    }

    #[test]
    fn unknown_key_is_an_error_with_line() {
        let err = RunConfig::parse("controller.u0=10\n").unwrap_err();
        assert_eq!(err.line, Some(1));
        assert!(err.message.contains("unknown key"));
    }

    #[test]
    fn malformed_line_is_an_error() {
        let err = RunConfig::parse("\n\njust words\n").unwrap_err();
        assert_eq!(err.line, Some(3));
    }
}
