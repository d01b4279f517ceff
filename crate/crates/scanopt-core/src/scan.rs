//! Projection of the two mirror angles onto the vertical scan plane at range.
//!
//! The optical deflection doubles each mirror angle. The slow (large) mirror
//! steers horizontally; the beam then travels the slanted path to the plane,
//! plus the fixed offset between the two mirror axes, before the fast (small)
//! mirror's vertical deflection applies:
//!
//! ```text
//! x = R·tan(2·φ_lm)
//! y = (R/cos(2·φ_lm) + d)·tan(2·φ_sm)
//! ```
//!
//! The separation `d` is not a data-sheet number; [`calibrate_separation`]
//! recovers it from reference scan samples by linear least squares.

use crate::float::Real;
use crate::tracking::TrackingResult;
use crate::{Error, Result};

/// Geometry and timing of the scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanConfig<T> {
    /// Range to the vertical scan plane [m].
    pub range: T,
    /// Beam-path offset between the two mirror axes [m].
    pub mirror_separation: T,
    /// Scan sampling period [s].
    pub sample_period: T,
    /// Large-mirror oscillation amplitude [rad].
    pub amplitude_lm: T,
    /// Small-mirror oscillation amplitude [rad].
    pub amplitude_sm: T,
    /// Large-mirror frequency [Hz].
    pub frequency_lm: T,
    /// Small-mirror frequency [Hz].
    pub frequency_sm: T,
}

impl<T: Real> ScanConfig<T> {
    /// The studied configuration: 200 m range, 8.35° at 2.5 Hz horizontal,
    /// 3.57° at 20 Hz vertical, 4 ms sampling, calibrated axis separation.
    pub fn standard() -> Self {
        Self {
            range: T::of(200.0),
            mirror_separation: T::of(crate::reference::DEFAULT_MIRROR_SEPARATION_M),
            sample_period: T::of(4e-3),
            amplitude_lm: T::of(8.35).to_radians_from_deg(),
            amplitude_sm: T::of(3.57).to_radians_from_deg(),
            frequency_lm: T::of(2.5),
            frequency_sm: T::of(20.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.range > T::zero()) {
            return Err(Error::InvalidParams("range must be positive".into()));
        }
        if !(self.mirror_separation >= T::zero()) {
            return Err(Error::InvalidParams("mirror separation must be non-negative".into()));
        }
        if !(self.sample_period > T::zero()) {
            return Err(Error::InvalidParams("sample period must be positive".into()));
        }
        Ok(())
    }
}

/// One scan-plane sample in report units (degrees and metres).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanSample<T> {
    pub t: T,
    pub phi_lm_deg: T,
    pub phi_sm_deg: T,
    pub x: T,
    pub y: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

/// One 200 ms half-period sweep of the large mirror.
#[derive(Clone, Debug)]
pub struct Pass<T> {
    /// 1-based pass number.
    pub index: usize,
    pub parity: Parity,
    pub samples: Vec<ScanSample<T>>,
}

/// Angle source for [`generate_scan`].
pub enum ScanSource<'a, T> {
    /// Pure sinusoids, the ideal pattern.
    Ideal,
    /// Outputs of the two tracking control systems.
    Tracked { large: &'a TrackingResult<T>, small: &'a TrackingResult<T> },
}

/// Map mirror angles (radians) to the scan-plane position.
pub fn angles_to_plane<T: Real>(phi_lm: T, phi_sm: T, config: &ScanConfig<T>) -> Result<(T, T)> {
    config.validate()?;
    let quarter = T::pi() / T::of(2.0);
    let two = T::of(2.0);
    if (two * phi_lm).abs() >= quarter || (two * phi_sm).abs() >= quarter {
        return Err(Error::OutOfRange(
            "doubled mirror angle reaches 90 degrees; no plane intersection".into(),
        ));
    }
    let x = config.range * (two * phi_lm).tan();
    let slant = config.range / (two * phi_lm).cos() + config.mirror_separation;
    let y = slant * (two * phi_sm).tan();
    Ok((x, y))
}

/// Least-squares fit of the mirror-axis separation from reference samples.
#[derive(Clone, Copy, Debug)]
pub struct SeparationFit<T> {
    /// Fitted separation d [m].
    pub separation: T,
    /// RMS vertical residual after the fit [m].
    pub residual_rms: T,
}

/// Recover the axis separation `d` from `(angles, plane)` samples.
///
/// The vertical model `y = (R/cos(2φ_lm) + d)·tan(2φ_sm)` is linear in `d`,
/// so the least-squares solution is closed form. Samples with negligible
/// small-mirror deflection carry no information about `d`.
pub fn calibrate_separation<T: Real>(
    samples: &[ScanSample<T>],
    range: T,
) -> Result<SeparationFit<T>> {
    let two = T::of(2.0);
    let mut num = T::zero();
    let mut den = T::zero();
    let mut informative = 0usize;
    for s in samples {
        let lm = s.phi_lm_deg.to_radians_from_deg();
        let sm = s.phi_sm_deg.to_radians_from_deg();
        let b = (two * sm).tan();
        if b.abs() > T::of(1e-9) {
            informative += 1;
        }
        let a = range / (two * lm).cos() * b;
        num = num + b * (s.y - a);
        den = den + b * b;
    }
    if informative < 10 || !(den > T::zero()) {
        return Err(Error::DegenerateFit(
            "separation needs at least 10 samples with nonzero small-mirror angle".into(),
        ));
    }
    let separation = num / den;
    let mut ss = T::zero();
    for s in samples {
        let lm = s.phi_lm_deg.to_radians_from_deg();
        let sm = s.phi_sm_deg.to_radians_from_deg();
        let model = (range / (two * lm).cos() + separation) * (two * sm).tan();
        let r = model - s.y;
        ss = ss + r * r;
    }
    let residual_rms = (ss / T::of(samples.len() as f64)).sqrt();
    Ok(SeparationFit { separation, residual_rms })
}

/// Ideal mirror angles at time `t` (radians): the large mirror runs on a
/// cosine, the small one on a negative sine, as the reference pattern does.
pub fn ideal_angles<T: Real>(t: T, config: &ScanConfig<T>) -> (T, T) {
    let lm = config.amplitude_lm * (T::tau() * config.frequency_lm * t).cos();
    let sm = -config.amplitude_sm * (T::tau() * config.frequency_sm * t).sin();
    (lm, sm)
}

/// Duration of one pass: half the large-mirror period.
fn pass_duration<T: Real>(config: &ScanConfig<T>) -> T {
    T::one() / (T::of(2.0) * config.frequency_lm)
}

/// Sample the scan and cut it into passes.
///
/// Samples run every `config.sample_period` from 0 to `duration` inclusive;
/// a zero or negative duration yields no passes. Tracked sources must cover
/// every sample instant.
pub fn generate_scan<T: Real>(
    source: ScanSource<'_, T>,
    config: &ScanConfig<T>,
    duration: T,
) -> Result<Vec<Pass<T>>> {
    config.validate()?;
    if duration <= T::zero() {
        return Ok(Vec::new());
    }
    let n = (duration / config.sample_period).floor().to_f64().unwrap_or(0.0) as usize;
    let half_period = pass_duration(config);
    let n_passes = (duration / half_period).ceil().to_f64().unwrap_or(1.0).max(1.0) as usize;
    let mut passes: Vec<Pass<T>> = (0..n_passes)
        .map(|i| Pass {
            index: i + 1,
            parity: if i % 2 == 0 { Parity::Odd } else { Parity::Even },
            samples: Vec::new(),
        })
        .collect();
    for k in 0..=n {
        let t = config.sample_period * T::of(k as f64);
        let (phi_lm, phi_sm) = match &source {
            ScanSource::Ideal => ideal_angles(t, config),
            ScanSource::Tracked { large, small } => {
                let lm = large.series.index_at(t).map(|i| large.series.phi[i]);
                let sm = small.series.index_at(t).map(|i| small.series.phi[i]);
                match (lm, sm) {
                    (Some(lm), Some(sm)) => (lm, sm),
                    _ => {
                        return Err(Error::InsufficientData(format!(
                            "tracking output does not cover t = {t}"
                        )))
                    }
                }
            }
        };
        let (x, y) = angles_to_plane(phi_lm, phi_sm, config)?;
        let sample = ScanSample {
            t,
            phi_lm_deg: phi_lm.to_degrees_from_rad(),
            phi_sm_deg: phi_sm.to_degrees_from_rad(),
            x,
            y,
        };
        let pass_idx =
            ((t / half_period).floor().to_f64().unwrap_or(0.0) as usize).min(n_passes - 1);
        passes[pass_idx].samples.push(sample);
    }
    Ok(passes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{DEFAULT_MIRROR_SEPARATION_M, IDEAL_SCAN_200M};

    fn table_samples() -> Vec<ScanSample<f64>> {
        IDEAL_SCAN_200M
            .iter()
            .map(|r| ScanSample { t: r[0], phi_lm_deg: r[1], phi_sm_deg: r[2], x: r[3], y: r[4] })
            .collect()
    }

    #[test]
    fn on_axis_beam_hits_origin() {
        let cfg = ScanConfig::<f64>::standard();
        let (x, y) = angles_to_plane(0.0, 0.0, &cfg).unwrap();
        assert_eq!((x, y), (0.0, 0.0));
    }

    #[test]
    fn horizontal_extreme_matches_reference() {
        let cfg = ScanConfig::<f64>::standard();
        let (x, y) = angles_to_plane(8.35f64.to_radians(), 0.0, &cfg).unwrap();
        assert!((x - 60.0).abs() < 0.05, "x = {x}");
        assert!(y.abs() < 1e-12);
    }

    #[test]
    fn slanted_sample_matches_reference() {
        let cfg = ScanConfig::<f64>::standard();
        let (x, y) = angles_to_plane(8.20f64.to_radians(), (-3.56f64).to_radians(), &cfg).unwrap();
        assert!((x - 58.88).abs() < 0.05, "x = {x}");
        assert!((y - -26.10).abs() < 0.05, "y = {y}");
    }

    #[test]
    fn steep_angle_is_rejected() {
        let cfg = ScanConfig::<f64>::standard();
        assert!(matches!(
            angles_to_plane(46f64.to_radians(), 0.0, &cfg),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn separation_fit_on_reference_table() {
        let fit = calibrate_separation(&table_samples(), 200.0).unwrap();
        assert!(
            (fit.separation - DEFAULT_MIRROR_SEPARATION_M).abs() < 1e-3,
            "d = {}",
            fit.separation
        );
        assert!(fit.residual_rms < 0.05, "rms = {}", fit.residual_rms);
    }

    #[test]
    fn separation_fit_round_trips_synthetic_data() {
        let mut cfg = ScanConfig::<f64>::standard();
        cfg.mirror_separation = 0.3;
        let samples: Vec<ScanSample<f64>> = (0..40)
            .map(|k| {
                let t = k as f64 * 0.004;
                let (lm, sm) = ideal_angles(t, &cfg);
                let (x, y) = angles_to_plane(lm, sm, &cfg).unwrap();
                ScanSample { t, phi_lm_deg: lm.to_degrees(), phi_sm_deg: sm.to_degrees(), x, y }
            })
            .collect();
        let fit = calibrate_separation(&samples, 200.0).unwrap();
        assert!((fit.separation - 0.3).abs() < 1e-9);
        assert!(fit.residual_rms < 1e-9);
    }

    #[test]
    fn separation_fit_needs_vertical_motion() {
        let flat: Vec<ScanSample<f64>> = (0..20)
            .map(|k| ScanSample {
                t: k as f64 * 0.004,
                phi_lm_deg: k as f64 * 0.1,
                phi_sm_deg: 0.0,
                x: 0.0,
                y: 0.0,
            })
            .collect();
        assert!(matches!(calibrate_separation(&flat, 200.0), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn ideal_angles_match_reference_rows() {
        let cfg = ScanConfig::<f64>::standard();
        for row in [0usize, 1, 50, 100] {
            let r = IDEAL_SCAN_200M[row];
            let (lm, sm) = ideal_angles(r[0], &cfg);
            assert!((lm.to_degrees() - r[1]).abs() < 0.005, "row {row} lm");
            assert!((sm.to_degrees() - r[2]).abs() < 0.005, "row {row} sm");
        }
    }

    #[test]
    fn ideal_scan_reproduces_whole_reference_table() {
        let cfg = ScanConfig::<f64>::standard();
        let passes = generate_scan(ScanSource::Ideal, &cfg, 0.4).unwrap();
        assert_eq!(passes.len(), 2);
        let total: usize = passes.iter().map(|p| p.samples.len()).sum();
        assert_eq!(total, 101);
        assert_eq!(passes[0].parity, Parity::Odd);
        assert_eq!(passes[1].parity, Parity::Even);
        let all: Vec<&ScanSample<f64>> = passes.iter().flat_map(|p| p.samples.iter()).collect();
        for (s, r) in all.iter().zip(IDEAL_SCAN_200M.iter()) {
            assert!((s.phi_lm_deg - r[1]).abs() < 0.005);
            assert!((s.phi_sm_deg - r[2]).abs() < 0.005);
            assert!((s.x - r[3]).abs() < 0.05, "t={} x {} vs {}", s.t, s.x, r[3]);
            assert!((s.y - r[4]).abs() < 0.05, "t={} y {} vs {}", s.t, s.y, r[4]);
        }
    }

    #[test]
    fn empty_scan_for_zero_duration() {
        let cfg = ScanConfig::<f64>::standard();
        assert!(generate_scan::<f64>(ScanSource::Ideal, &cfg, 0.0).unwrap().is_empty());
    }

    #[test]
    fn odd_even_symmetry_and_periodicity() {
        let cfg = ScanConfig::<f64>::standard();
        let passes = generate_scan(ScanSource::Ideal, &cfg, 0.8).unwrap();
        let all: Vec<ScanSample<f64>> = passes.into_iter().flat_map(|p| p.samples).collect();
        // x(t) + x(t + 0.2 s) = 0 and the full pattern repeats at 0.4 s.
        for k in 0..50 {
            assert!((all[k].x + all[k + 50].x).abs() < 1e-9);
            assert!((all[k].phi_lm_deg + all[k + 50].phi_lm_deg).abs() < 1e-9);
        }
        for k in 0..100 {
            assert!((all[k].x - all[k + 100].x).abs() < 1e-9);
            assert!((all[k].y - all[k + 100].y).abs() < 1e-9);
        }
    }

    #[test]
    fn horizontal_map_is_monotone_and_scales_with_range() {
        let cfg = ScanConfig::<f64>::standard();
        let mut last = f64::NEG_INFINITY;
        for k in -40..=40 {
            let lm = (k as f64 * 0.5f64).to_radians();
            let (x, _) = angles_to_plane(lm, 0.01, &cfg).unwrap();
            assert!(x > last);
            last = x;
        }
        let mut cfg2 = cfg;
        cfg2.range = 400.0;
        let (x1, y1) = angles_to_plane(0.1, 0.05, &cfg).unwrap();
        let (x2, y2) = angles_to_plane(0.1, 0.05, &cfg2).unwrap();
        assert!((x2 - 2.0 * x1).abs() < 1e-12);
        let slant1 = 200.0 / (0.2f64).cos() + cfg.mirror_separation;
        let slant2 = 400.0 / (0.2f64).cos() + cfg2.mirror_separation;
        assert!((y2 / y1 - slant2 / slant1).abs() < 1e-12);
    }
}
