//! Time-domain simulation: exact constant-input propagation, fixed-step RK4,
//! and the Coulomb stick/slip friction model.
//!
//! The friction torque follows the perfect dry contact law
//!
//! ```text
//! T_CF =  Tc            if ω > 0
//!      ∈ [-Tc, Tc]      if ω = 0   (cancels the load torque while |T_RL| <= Tc)
//!      = -Tc            if ω < 0
//! ```
//!
//! and the equation of motion is `J·dω/dt = T_RL - T_CF = T_R` with
//! `T_RL = Kt·i - c·φ - h·ω`.

use crate::float::Real;
use crate::linalg::{self, Mat};
use crate::models::{ActuatorParams, LinearModel};
use crate::{Error, Result};

/// Velocity band treated as zero for the stick test [rad/s].
pub const OMEGA_EPS: f64 = 1e-9;

/// Drive signal u(t) in volts.
#[derive(Clone, Debug, PartialEq)]
pub enum InputSignal<T> {
    /// `amplitude · 1(t)`.
    Step { amplitude: T },
    /// `offset + amplitude · sin(2π f t + phase)`.
    Sinusoid { amplitude: T, frequency_hz: T, phase: T, offset: T },
    /// 50% duty square wave, high on the first half period at zero phase.
    Square { amplitude: T, frequency_hz: T, phase: T, offset: T },
    /// Zero-order hold over explicit switch times: `values[k]` applies from
    /// `breakpoints[k]` (strictly increasing) to the next breakpoint; zero
    /// before the first.
    PiecewiseConstant { breakpoints: Vec<T>, values: Vec<T> },
    /// Zero-order hold over uniform samples starting at `start`.
    Sampled { start: T, dt: T, values: Vec<T> },
}

impl<T: Real> InputSignal<T> {
    pub fn step(amplitude: T) -> Self {
        Self::Step { amplitude }
    }

    pub fn sinusoid(amplitude: T, frequency_hz: T, phase: T, offset: T) -> Result<Self> {
        if !(frequency_hz > T::zero()) {
            return Err(Error::InvalidParams("sinusoid frequency must be positive".into()));
        }
        Ok(Self::Sinusoid { amplitude, frequency_hz, phase, offset })
    }

    /// `amplitude · cos(2π f t)`, the usual open-loop drive.
    pub fn cosine(amplitude: T, frequency_hz: T) -> Result<Self> {
        Self::sinusoid(amplitude, frequency_hz, T::pi() / T::of(2.0), T::zero())
    }

    pub fn square(amplitude: T, frequency_hz: T, phase: T, offset: T) -> Result<Self> {
        if !(frequency_hz > T::zero()) {
            return Err(Error::InvalidParams("square frequency must be positive".into()));
        }
        Ok(Self::Square { amplitude, frequency_hz, phase, offset })
    }

    pub fn piecewise_constant(breakpoints: Vec<T>, values: Vec<T>) -> Result<Self> {
        if breakpoints.len() != values.len() || breakpoints.is_empty() {
            return Err(Error::InvalidParams(
                "piecewise input needs one value per breakpoint".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParams(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self::PiecewiseConstant { breakpoints, values })
    }

    pub fn value(&self, t: T) -> T {
        match self {
            Self::Step { amplitude } => {
                if t >= T::zero() {
                    *amplitude
                } else {
                    T::zero()
                }
            }
            Self::Sinusoid { amplitude, frequency_hz, phase, offset } => {
                *offset + *amplitude * (T::tau() * *frequency_hz * t + *phase).sin()
            }
            Self::Square { amplitude, frequency_hz, phase, offset } => {
                let cycles = *frequency_hz * t + *phase / T::tau();
                let frac = cycles - cycles.floor();
                let sign = if frac < T::of(0.5) { T::one() } else { -T::one() };
                *offset + *amplitude * sign
            }
            Self::PiecewiseConstant { breakpoints, values } => {
                if t < breakpoints[0] {
                    return T::zero();
                }
                let idx = breakpoints.partition_point(|&b| b <= t) - 1;
                values[idx]
            }
            Self::Sampled { start, dt, values } => {
                if values.is_empty() {
                    return T::zero();
                }
                let idx = ((t - *start) / *dt).floor().to_f64().unwrap_or(0.0).max(0.0) as usize;
                values[idx.min(values.len() - 1)]
            }
        }
    }
}

/// Uniformly sampled simulation record with torque channels.
///
/// `stick` is 1 exactly when the friction model holds the load at rest; at
/// those samples `omega = 0` and `torque_net = 0`.
#[derive(Clone, Debug)]
pub struct TimeSeries<T> {
    pub dt: T,
    pub t0: T,
    pub phi: Vec<T>,
    pub omega: Vec<T>,
    pub current: Vec<T>,
    pub input: Vec<T>,
    /// Linear component of the load torque, `Kt·i - c·φ - h·ω` [N·m].
    pub torque_linear: Vec<T>,
    /// Coulomb friction torque [N·m].
    pub torque_friction: Vec<T>,
    /// Net accelerating torque `J·dω/dt` [N·m].
    pub torque_net: Vec<T>,
    pub stick: Vec<u8>,
}

impl<T: Real> TimeSeries<T> {
    pub(crate) fn with_capacity(dt: T, t0: T, n: usize) -> Self {
        Self {
            dt,
            t0,
            phi: Vec::with_capacity(n),
            omega: Vec::with_capacity(n),
            current: Vec::with_capacity(n),
            input: Vec::with_capacity(n),
            torque_linear: Vec::with_capacity(n),
            torque_friction: Vec::with_capacity(n),
            torque_net: Vec::with_capacity(n),
            stick: Vec::with_capacity(n),
        }
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    pub fn time(&self, k: usize) -> T {
        self.t0 + self.dt * T::of(k as f64)
    }

    /// Index of the sample at time `t`, when `t` falls on the grid.
    pub fn index_at(&self, t: T) -> Option<usize> {
        let raw = ((t - self.t0) / self.dt).to_f64()?;
        let idx = raw.round();
        if (raw - idx).abs() > 1e-6 || idx < 0.0 || idx as usize >= self.len() {
            None
        } else {
            Some(idx as usize)
        }
    }

    pub(crate) fn push(&mut self, x: &[T], u: T, t_rl: T, t_cf: T, sticking: bool) {
        self.phi.push(x[0]);
        self.omega.push(if x.len() > 1 { x[1] } else { T::zero() });
        self.current.push(if x.len() > 2 { x[2] } else { T::zero() });
        self.input.push(u);
        self.torque_linear.push(t_rl);
        self.torque_friction.push(t_cf);
        self.torque_net.push(t_rl - t_cf);
        self.stick.push(u8::from(sticking));
    }
}

/// Exact state propagation under constant input over `tau`:
/// `x(tau) = e^{A·tau} x0 + ∫₀^tau e^{A·s} ds · B·u`.
///
/// Computed through the exponential of the augmented matrix `[[A, B],[0,0]]·tau`
/// so a singular `A` (the zero-stiffness integrator) needs no special case.
pub fn propagate_lti<T: Real>(model: &LinearModel<T>, x0: &[T], u: T, tau: T) -> Vec<T> {
    let (phi, gamma) = discretize(model, tau);
    let mut x = phi.mul_vec(x0);
    for (xi, gi) in x.iter_mut().zip(&gamma) {
        *xi = *xi + *gi * u;
    }
    x
}

/// Transition matrix and input column for a constant-input interval:
/// `x(tau) = Phi x0 + Gamma u`.
pub fn discretize<T: Real>(model: &LinearModel<T>, tau: T) -> (Mat<T>, Vec<T>) {
    let n = model.order();
    let mut aug = Mat::zeros(n + 1, n + 1);
    for i in 0..n {
        for j in 0..n {
            aug[(i, j)] = model.a()[(i, j)] * tau;
        }
        aug[(i, n)] = model.b()[i] * tau;
    }
    let e = linalg::expm(&aug);
    let mut phi = Mat::zeros(n, n);
    let mut gamma = vec![T::zero(); n];
    for i in 0..n {
        for j in 0..n {
            phi[(i, j)] = e[(i, j)];
        }
        gamma[i] = e[(i, n)];
    }
    (phi, gamma)
}

fn stability_guard<T: Real>(model: &LinearModel<T>, dt: T) -> Result<()> {
    let fastest = model.fastest_eigenvalue();
    if fastest > T::zero() {
        let limit = T::of(0.1) / fastest;
        if dt > limit {
            return Err(Error::StepTooLarge {
                dt: dt.to_f64().unwrap_or(f64::NAN),
                limit: limit.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    Ok(())
}

fn deriv_with_extra<T: Real>(model: &LinearModel<T>, x: &[T], u: T, extra: &[T]) -> Vec<T> {
    let mut dx = model.derivative(x, u);
    for (d, e) in dx.iter_mut().zip(extra) {
        *d = *d + *e;
    }
    dx
}

/// One classic RK4 step with an additive constant disturbance (the frozen
/// friction acceleration).
fn rk4_advance<T: Real, F: Fn(T) -> T>(
    model: &LinearModel<T>,
    x: &mut Vec<T>,
    t: T,
    dt: T,
    input: &F,
    extra: &[T],
) {
    let half = dt * T::of(0.5);
    let u0 = input(t);
    let u_mid = input(t + half);
    let u1 = input(t + dt);
    let k1 = deriv_with_extra(model, x, u0, extra);
    let x2: Vec<T> = x.iter().zip(&k1).map(|(&xi, &k)| xi + half * k).collect();
    let k2 = deriv_with_extra(model, &x2, u_mid, extra);
    let x3: Vec<T> = x.iter().zip(&k2).map(|(&xi, &k)| xi + half * k).collect();
    let k3 = deriv_with_extra(model, &x3, u_mid, extra);
    let x4: Vec<T> = x.iter().zip(&k3).map(|(&xi, &k)| xi + dt * k).collect();
    let k4 = deriv_with_extra(model, &x4, u1, extra);
    let sixth = dt / T::of(6.0);
    for i in 0..x.len() {
        x[i] = x[i] + sixth * (k1[i] + T::of(2.0) * (k2[i] + k3[i]) + k4[i]);
    }
}

/// Integrate the frictionless model with fixed-step RK4.
///
/// `params` only feeds the torque bookkeeping channels; the dynamics come
/// entirely from `model`. Output has `floor(duration/dt) + 1` samples.
pub fn integrate_linear<T: Real>(
    model: &LinearModel<T>,
    params: &ActuatorParams<T>,
    x0: &[T],
    input: &InputSignal<T>,
    dt: T,
    duration: T,
) -> Result<TimeSeries<T>> {
    if !(dt > T::zero()) {
        return Err(Error::InvalidParams("dt must be positive".into()));
    }
    stability_guard(model, dt)?;
    let steps = (duration / dt).floor().to_f64().unwrap_or(0.0).max(0.0) as usize;
    let mut series = TimeSeries::with_capacity(dt, T::zero(), steps + 1);
    let mut x = x0.to_vec();
    let extra = vec![T::zero(); model.order()];
    for k in 0..=steps {
        let t = dt * T::of(k as f64);
        let u = input.value(t);
        let t_rl = params.inertia * model.derivative(&x, u)[1];
        series.push(&x, u, t_rl, T::zero(), false);
        if k < steps {
            rk4_advance(model, &mut x, t, dt, &|tt| input.value(tt), &extra);
        }
    }
    Ok(series)
}

/// Coulomb friction torque and the stick decision for one instant.
///
/// Sliding: `T_CF = Tc·sign(ω)`. At rest the friction cancels the load torque
/// while it can (`|T_RL| <= Tc`, sticking), otherwise it saturates at
/// `Tc·sign(T_RL)` and the load breaks away.
pub fn friction_torque<T: Real>(omega: T, t_rl: T, tc: T) -> (T, bool) {
    let eps = T::of(OMEGA_EPS);
    if omega.abs() > eps {
        (tc * omega.signum(), false)
    } else if t_rl.abs() <= tc {
        (t_rl, true)
    } else {
        (tc * t_rl.signum(), false)
    }
}

/// Integrate the third-order model with the Coulomb stick/slip friction model.
///
/// Hybrid stepping: within a step the friction sign is frozen; if the
/// velocity crosses zero the crossing is located by linear interpolation, the
/// state is re-anchored at `ω = 0` and the stick test decides between a
/// sticking phase (position frozen, current keeps evolving) and breakaway.
pub fn integrate_friction<T: Real>(
    model: &LinearModel<T>,
    params: &ActuatorParams<T>,
    x0: &[T],
    input: &InputSignal<T>,
    dt: T,
    duration: T,
) -> Result<TimeSeries<T>> {
    if params.coulomb_torque == T::zero() {
        // Frictionless degeneracy: identical to the linear run, channel for channel.
        return integrate_linear(model, params, x0, input, dt, duration);
    }
    let mut x = x0.to_vec();
    let mut stepper = FrictionStepper::new(model, params, &x)?;
    stability_guard(model, dt)?;
    if !(dt > T::zero()) {
        return Err(Error::InvalidParams("dt must be positive".into()));
    }
    let steps = (duration / dt).floor().to_f64().unwrap_or(0.0).max(0.0) as usize;
    let mut series = TimeSeries::with_capacity(dt, T::zero(), steps + 1);
    for k in 0..=steps {
        let t = dt * T::of(k as f64);
        let u = input.value(t);
        let (t_rl, t_cf, stick_now) = stepper.torques(&x);
        series.push(&x, u, t_rl, t_cf, stick_now);
        if k < steps {
            stepper.step(&mut x, t, dt, &|tt| input.value(tt));
        }
    }
    Ok(series)
}

/// Single-step driver for the stick/slip friction dynamics; keeps the stick
/// regime across steps so a sampled-data loop can advance the plant piecewise.
pub struct FrictionStepper<'a, T> {
    model: &'a LinearModel<T>,
    params: &'a ActuatorParams<T>,
    sticking: bool,
}

impl<'a, T: Real> FrictionStepper<'a, T> {
    pub fn new(
        model: &'a LinearModel<T>,
        params: &'a ActuatorParams<T>,
        x0: &[T],
    ) -> Result<Self> {
        if model.order() != 3 {
            return Err(Error::UnsupportedCombination(
                "friction simulation requires the third-order model".into(),
            ));
        }
        params.validate()?;
        let eps = T::of(OMEGA_EPS);
        let t_rl = params.torque_constant * x0[2] - params.pivot_stiffness * x0[0];
        let sticking = x0[1].abs() <= eps && t_rl.abs() <= params.coulomb_torque;
        Ok(Self { model, params, sticking })
    }

    fn load_torque(&self, x: &[T]) -> T {
        self.params.torque_constant * x[2]
            - self.params.pivot_stiffness * x[0]
            - self.params.damping * x[1]
    }

    /// Torque channels and stick flag at the current state.
    pub fn torques(&self, x: &[T]) -> (T, T, bool) {
        let t_rl = self.load_torque(x);
        if self.sticking {
            (t_rl, t_rl, true)
        } else {
            let (t_cf, stick_now) = friction_torque(x[1], t_rl, self.params.coulomb_torque);
            (t_rl, t_cf, stick_now)
        }
    }

    pub fn sticking(&self) -> bool {
        self.sticking
    }

    /// Advance one step of size `dt` under the drive `input(t)`.
    pub fn step<F: Fn(T) -> T>(&mut self, x: &mut Vec<T>, t: T, dt: T, input: &F) {
        let tc = self.params.coulomb_torque;
        let eps = T::of(OMEGA_EPS);
        let mut remaining = dt;
        let mut t_local = t;
        // At most a few regime changes fit in one step at the default grid.
        for _ in 0..8 {
            if remaining <= T::zero() {
                break;
            }
            if self.sticking {
                advance_stuck(self.params, x, t_local, remaining, input);
                let t_rl_end = self.load_torque(x);
                if t_rl_end.abs() > tc {
                    self.sticking = false; // breakaway; slides from the next step on
                }
                break;
            }
            // Frozen friction sign over the sub-step.
            let sign = if x[1].abs() > eps { x[1].signum() } else { self.load_torque(x).signum() };
            let extra = vec![T::zero(), -tc * sign / self.params.inertia, T::zero()];
            let omega_start = x[1];
            let mut trial = x.clone();
            rk4_advance(self.model, &mut trial, t_local, remaining, input, &extra);
            let crossed = omega_start.abs() > eps
                && (trial[1] * omega_start < T::zero() || trial[1].abs() <= eps);
            if !crossed {
                *x = trial;
                break;
            }
            // Locate the crossing by linear interpolation in ω.
            let theta = omega_start / (omega_start - trial[1]);
            let theta = theta.max(T::of(1e-6)).min(T::one());
            let sub = remaining * theta;
            rk4_advance(self.model, x, t_local, sub, input, &extra);
            x[1] = T::zero();
            t_local = t_local + sub;
            remaining = remaining - sub;
            if self.load_torque(x).abs() <= tc {
                self.sticking = true; // finish the step in the stuck regime
            }
        }
    }
}

/// Stuck-regime dynamics: `ω` clamped to zero, `φ` frozen, the electrical
/// state keeps following `di/dt = (u - Rm·i)/Lm`.
fn advance_stuck<T: Real, F: Fn(T) -> T>(
    params: &ActuatorParams<T>,
    x: &mut [T],
    t: T,
    dt: T,
    input: &F,
) {
    let rm = params.resistance;
    let lm = params.inductance;
    let f = |i: T, u: T| (u - rm * i) / lm;
    let half = dt * T::of(0.5);
    let u0 = input(t);
    let um = input(t + half);
    let u1 = input(t + dt);
    let i0 = x[2];
    let k1 = f(i0, u0);
    let k2 = f(i0 + half * k1, um);
    let k3 = f(i0 + half * k2, um);
    let k4 = f(i0 + dt * k3, u1);
    x[2] = i0 + dt / T::of(6.0) * (k1 + T::of(2.0) * (k2 + k3) + k4);
    x[1] = T::zero();
}

/// Result of fitting the Coulomb torque against the steady step-output slope.
#[derive(Clone, Debug)]
pub struct FrictionCalibration<T> {
    /// Fitted Coulomb torque [N·m].
    pub coulomb_torque: T,
    /// Per-case steady output slope φ(∞)/u0 [deg/V].
    pub slopes: Vec<(T, T)>,
    /// Worst relative deviation from the target slope.
    pub worst_relative_error: T,
}

/// Steady step-response output (degrees) of the friction model for the input
/// `u = (breakaway + u0)·1(t)`.
pub fn friction_steady_output_deg<T: Real>(
    params: &ActuatorParams<T>,
    u0: T,
    dt: T,
    duration: T,
) -> Result<T> {
    let model = LinearModel::third_order(params)?;
    let input = InputSignal::step(params.breakaway_voltage() + u0);
    let series = integrate_friction(&model, params, &[T::zero(); 3], &input, dt, duration)?;
    let n = series.len();
    let tail = (n / 20).max(1);
    let phi_end = series.phi[n - tail..].iter().copied().sum::<T>() / T::of(tail as f64);
    Ok(phi_end.to_degrees_from_rad())
}

/// Fit the Coulomb friction torque against the steady step-output relation
/// `φ(∞) = slope·u0` over `u0 ∈ {1,2,3,4}`.
///
/// The relation is satisfied on an unbounded plateau of torques: once Tc is
/// large enough, the offset input cancels the friction during the forward
/// slide and the load locks at the first overshoot peak, whose height does
/// not depend on Tc. The least-squares error is therefore flat above a sharp
/// edge, and the calibration returns the smallest torque on the plateau (the
/// minimum friction consistent with the observed relation).
pub fn calibrate_coulomb_torque<T: Real>(
    params: &ActuatorParams<T>,
    target_slope_deg_per_v: T,
) -> Result<FrictionCalibration<T>> {
    let cases: [T; 4] = [T::of(1.0), T::of(2.0), T::of(3.0), T::of(4.0)];
    let dt = T::of(2e-5);
    let duration = T::of(3.0);
    let tol = T::of(0.002);
    let worst_err = |tc: T| -> Result<T> {
        let p = params.with_coulomb_torque(tc);
        let mut worst = T::zero();
        for &u0 in &cases {
            let slope = friction_steady_output_deg(&p, u0, dt, duration)? / u0;
            worst = worst.max(((slope - target_slope_deg_per_v) / target_slope_deg_per_v).abs());
        }
        Ok(worst)
    };
    // Coarse scan for the first on-plateau point, then bisect the edge.
    let n = 16usize;
    let lo_bound = T::of(1e-3);
    let hi_bound = T::of(0.16);
    let step = (hi_bound - lo_bound) / T::of(n as f64);
    let mut first_ok: Option<T> = None;
    for k in 0..=n {
        let tc = lo_bound + step * T::of(k as f64);
        if worst_err(tc)? <= tol {
            first_ok = Some(tc);
            break;
        }
    }
    let Some(mut hi) = first_ok else {
        return Err(Error::DegenerateFit(
            "no Coulomb torque reproduces the steady output slope".into(),
        ));
    };
    let mut lo = (hi - step).max(lo_bound);
    for _ in 0..12 {
        let mid = (lo + hi) * T::of(0.5);
        if worst_err(mid)? <= tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // Step inside the plateau so the returned value has margin to the edge.
    let best_tc = hi * T::of(1.02);
    let p = params.with_coulomb_torque(best_tc);
    let mut slopes = Vec::new();
    let mut worst = T::zero();
    for &u0 in &cases {
        let slope = friction_steady_output_deg(&p, u0, dt, duration)? / u0;
        slopes.push((u0, slope));
        worst = worst.max(((slope - target_slope_deg_per_v) / target_slope_deg_per_v).abs());
    }
    Ok(FrictionCalibration { coulomb_torque: best_tc, slopes, worst_relative_error: worst })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ActuatorParams, Correction, LinearModel};

    fn large3() -> LinearModel<f64> {
        LinearModel::third_order(&ActuatorParams::large_mirror()).unwrap()
    }

    #[test]
    fn propagate_pure_integrator() {
        // 1x1 system dx/dt = u
        let tf =
            crate::models::TransferFunction::<f64> { gain: 1.0, denom: vec![1.0, 0.0], integrator: false };
        let m = LinearModel::from_transfer_function(&tf);
        let x = propagate_lti(&m, &[0.0], 1.0, 2.0);
        assert!((x[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn propagate_double_integrator() {
        let tf = crate::models::TransferFunction::<f64> {
            gain: 1.0,
            denom: vec![1.0, 0.0, 0.0],
            integrator: false,
        };
        let m = LinearModel::from_transfer_function(&tf);
        let t = 0.7;
        let x = propagate_lti(&m, &[0.0, 0.0], 1.0, t);
        assert!((x[1] - t).abs() < 1e-12, "driven state integrates u");
        assert!((x[0] - t * t / 2.0).abs() < 1e-12, "chained state integrates twice");
    }

    #[test]
    fn propagate_matches_rk4_stiff_model() {
        let m = large3();
        let p = ActuatorParams::large_mirror();
        let u = 5.0;
        let tau = 0.02;
        let exact = propagate_lti(&m, &[0.0; 3], u, tau);
        let series =
            integrate_linear(&m, &p, &[0.0; 3], &InputSignal::step(u), 1e-6, tau).unwrap();
        let k = series.len() - 1;
        for i in 0..3 {
            let reference = [series.phi[k], series.omega[k], series.current[k]][i];
            let scale = reference.abs().max(1e-9);
            assert!(
                ((exact[i] - reference) / scale).abs() < 1e-8,
                "state {i}: {} vs {}",
                exact[i],
                reference
            );
        }
    }

    #[test]
    fn reference_interval_chain_reaches_target() {
        // Damped large mirror, 2nd order: +10 V then -10 V lands on 8.35 deg.
        let p = ActuatorParams::large_mirror().corrected(Correction::DampingTimesTen);
        let m = LinearModel::simplified_second_order(&p).unwrap();
        let x1 = propagate_lti(&m, &[0.0, 0.0], 10.0, 0.12713);
        let x2 = propagate_lti(&m, &x1, -10.0, 0.00652);
        let target = 8.35f64.to_radians();
        // The interval lengths are display-rounded to 5 decimals; ±5e-6 s on
        // each interval moves the endpoint by up to ~2.6e-4 deg.
        assert!(
            (x2[0] - target).to_degrees().abs() < 3e-4,
            "phi err {} deg",
            (x2[0] - target).to_degrees()
        );
        assert!(x2[1].to_degrees().abs() < 5e-3, "omega err {} deg/s", x2[1].to_degrees());
    }

    #[test]
    fn step_response_settles_to_dc_gain() {
        let p = ActuatorParams::large_mirror();
        let m = large3();
        let series =
            integrate_linear(&m, &p, &[0.0; 3], &InputSignal::step(1.0), 5e-5, 2.5).unwrap();
        let last = *series.phi.last().unwrap();
        assert!((last - 0.0245).abs() < 2e-4, "settled at {last}");
    }

    #[test]
    fn steady_sinusoid_amplitude_matches_frequency_response() {
        let p = ActuatorParams::large_mirror();
        let m = large3();
        let drive = InputSignal::cosine(5.0, 2.5).unwrap();
        let series = integrate_linear(&m, &p, &[0.0; 3], &drive, 5e-5, 6.0).unwrap();
        let n = series.len();
        let steady = &series.phi[n / 2..];
        let amp = steady.iter().fold(0f64, |a, &v| a.max(v.abs()));
        let expected = 5.0 * 0.064444;
        assert!(
            (amp - expected).to_degrees().abs() < 0.05,
            "amplitude {} deg vs {} deg",
            amp.to_degrees(),
            expected.to_degrees()
        );
    }

    #[test]
    fn zero_input_stays_at_equilibrium() {
        let p = ActuatorParams::small_mirror();
        let m = LinearModel::third_order(&p).unwrap();
        let series =
            integrate_linear(&m, &p, &[0.0; 3], &InputSignal::Step { amplitude: 0.0 }, 1e-5, 0.01)
                .unwrap();
        assert!(series.phi.iter().all(|&v| v == 0.0));
        assert!(series.torque_linear.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn step_guard_rejects_coarse_grid() {
        let p = ActuatorParams::large_mirror();
        let m = large3();
        let r = integrate_linear(&m, &p, &[0.0; 3], &InputSignal::step(1.0), 1e-3, 0.1);
        assert!(matches!(r, Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn friction_torque_cases() {
        assert_eq!(friction_torque(1.0, -0.3, 0.05), (0.05, false));
        assert_eq!(friction_torque(0.0, 0.02, 0.05), (0.02, true));
        assert_eq!(friction_torque(0.0, 0.10, 0.05), (0.05, false));
        assert_eq!(friction_torque(-2.0, 0.0, 0.05).0, -0.05);
    }

    #[test]
    fn frictionless_friction_run_matches_linear() {
        let p = ActuatorParams::large_mirror(); // Tc = 0
        let m = large3();
        let input = InputSignal::cosine(5.0, 2.5).unwrap();
        let a = integrate_linear(&m, &p, &[0.0; 3], &input, 1e-5, 0.05).unwrap();
        let b = integrate_friction(&m, &p, &[0.0; 3], &input, 1e-5, 0.05).unwrap();
        for k in 0..a.len() {
            assert!((a.phi[k] - b.phi[k]).abs() < 1e-12);
            assert!((a.omega[k] - b.omega[k]).abs() < 1e-12);
            assert!((a.current[k] - b.current[k]).abs() < 1e-12);
            assert!((a.torque_linear[k] - b.torque_linear[k]).abs() < 1e-12);
            assert_eq!(b.stick[k], 0);
        }
    }

    #[test]
    fn friction_sine_run_sticks_then_slides() {
        let p = ActuatorParams::large_mirror()
            .with_coulomb_torque(crate::reference::DEFAULT_COULOMB_TORQUE_NM);
        let m = large3();
        let input = InputSignal::cosine(5.0, 2.5).unwrap();
        let series = integrate_friction(&m, &p, &[0.0; 3], &input, 1e-5, 2.0).unwrap();
        // Starts in a sticking phase while the torque builds up.
        assert_eq!(series.stick[0], 1);
        // Three sticking phases early on, none once the oscillation is steady.
        let early = &series.stick[..(0.35 / 1e-5) as usize];
        let phases = early.windows(2).filter(|w| w[0] == 0 && w[1] == 1).count()
            + usize::from(early[0] == 1);
        let late: u32 = series.stick[series.len() / 2..].iter().map(|&s| s as u32).sum();
        assert_eq!(phases, 3, "sticking phases at the start");
        assert_eq!(late, 0, "steady oscillation crosses zero sliding");
        // Invariants: stick ⇒ ω = 0 and T_R = 0; sliding ⇒ friction opposes motion.
        for k in 0..series.len() {
            if series.stick[k] == 1 {
                assert_eq!(series.omega[k], 0.0);
                assert_eq!(series.torque_net[k], 0.0);
            } else {
                assert!(series.torque_friction[k] * series.omega[k] >= 0.0);
            }
        }
    }

    #[test]
    fn friction_dissipates_energy_unforced() {
        let p = ActuatorParams::large_mirror().with_coulomb_torque(0.03);
        let m = large3();
        let x0 = [0.1, 0.0, 0.0];
        let input = InputSignal::Step { amplitude: 0.0 };
        let series = integrate_friction(&m, &p, &x0, &input, 1e-5, 1.0).unwrap();
        let energy = |k: usize| {
            0.5 * p.inertia * series.omega[k] * series.omega[k]
                + 0.5 * p.pivot_stiffness * series.phi[k] * series.phi[k]
        };
        for k in 1..series.len() {
            assert!(energy(k) <= energy(k - 1) + 1e-12, "energy grew at sample {k}");
        }
    }

    #[test]
    fn index_lookup() {
        let p = ActuatorParams::large_mirror();
        let m = large3();
        let s = integrate_linear(&m, &p, &[0.0; 3], &InputSignal::step(1.0), 5e-5, 0.01).unwrap();
        assert_eq!(s.index_at(0.0), Some(0));
        assert_eq!(s.index_at(0.004), Some(80));
        assert_eq!(s.index_at(0.004075), None);
        assert_eq!(s.index_at(1.0), None);
    }

    #[test]
    fn square_wave_starts_high() {
        let sq = InputSignal::square(2.0, 2.5, 0.0, 0.0).unwrap();
        assert_eq!(sq.value(0.0), 2.0);
        assert_eq!(sq.value(0.19), 2.0);
        assert_eq!(sq.value(0.21), -2.0);
        assert_eq!(sq.value(0.41), 2.0);
    }

    #[test]
    fn piecewise_input_is_right_continuous() {
        let pw = InputSignal::piecewise_constant(vec![0.0, 1.0], vec![5.0, -5.0]).unwrap();
        assert_eq!(pw.value(-0.1), 0.0);
        assert_eq!(pw.value(0.0), 5.0);
        assert_eq!(pw.value(0.999999), 5.0);
        assert_eq!(pw.value(1.0), -5.0);
    }

    #[test]
    fn sampled_input_holds_values() {
        let sig = InputSignal::Sampled { start: 0.0, dt: 0.5, values: vec![1.0, -2.0, 3.0] };
        assert_eq!(sig.value(-1.0), 1.0, "clamped to the first sample");
        assert_eq!(sig.value(0.25), 1.0);
        assert_eq!(sig.value(0.75), -2.0);
        assert_eq!(sig.value(9.0), 3.0, "clamped to the last sample");
    }

    #[test]
    fn linearity_of_responses() {
        let p = ActuatorParams::large_mirror();
        let m = large3();
        let u1 = InputSignal::step(2.0);
        let u2 = InputSignal::cosine(3.0, 5.0).unwrap();
        let sum = InputSignal::Sinusoid {
            amplitude: 3.0,
            frequency_hz: 5.0,
            phase: std::f64::consts::FRAC_PI_2,
            offset: 2.0,
        };
        let a = integrate_linear(&m, &p, &[0.0; 3], &u1, 1e-5, 0.1).unwrap();
        let b = integrate_linear(&m, &p, &[0.0; 3], &u2, 1e-5, 0.1).unwrap();
        let c = integrate_linear(&m, &p, &[0.0; 3], &sum, 1e-5, 0.1).unwrap();
        for k in 0..a.len() {
            assert!((a.phi[k] + b.phi[k] - c.phi[k]).abs() < 1e-9);
        }
    }
}
