//! Linear models of the limited-angle-torquer mirror actuators.
//!
//! A mirror actuator is a DC limited angle torquer with the mirror mounted on
//! flex pivots. Third-order state `(φ, ω, i)`:
//!
//! ```text
//! dφ/dt = ω
//! dω/dt = (-c φ - h ω + Kt i) / J
//! di/dt = (-Kb ω - Rm i + u) / Lm
//! ```
//!
//! Neglecting the electrical time constant `Lm/Rm` gives the simplified
//! second-order model on `(φ, ω)`. Two mechanical corrections remove the
//! oscillatory pole pair so all eigenvalues become real: ten-fold damping, or
//! zero pivot stiffness (which introduces a pure integrator).

use crate::float::Real;
use crate::linalg::{self, Mat};
use crate::{Error, Result};
use num_complex::Complex;

/// Physical constants of one mirror actuator, SI units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActuatorParams<T> {
    /// Pivot stiffness c [N·m/rad].
    pub pivot_stiffness: T,
    /// Mechanical damping h [N·m·s/rad].
    pub damping: T,
    /// Load inertia J [kg·m²].
    pub inertia: T,
    /// Winding resistance Rm [Ω].
    pub resistance: T,
    /// Torque sensitivity Kt [N·m/A].
    pub torque_constant: T,
    /// Back-EMF constant Kb [V/(rad/s)].
    pub back_emf: T,
    /// Winding inductance Lm [H].
    pub inductance: T,
    /// Coulomb friction torque Tc [N·m]; zero means frictionless.
    pub coulomb_torque: T,
}

/// Mechanical correction that makes the actuator eigenvalues real.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Correction {
    /// Increase the mechanical damping ten-fold.
    DampingTimesTen,
    /// Remove the pivot springs entirely (`c = 0`).
    ZeroPivotStiffness,
}

impl<T: Real> ActuatorParams<T> {
    /// Validated constructor; the argument order follows the data sheets:
    /// `c, h, J, Rm, Kt, Kb, Lm`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(c: T, h: T, j: T, rm: T, kt: T, kb: T, lm: T) -> Result<Self> {
        let p = Self {
            pivot_stiffness: c,
            damping: h,
            inertia: j,
            resistance: rm,
            torque_constant: kt,
            back_emf: kb,
            inductance: lm,
            coulomb_torque: T::zero(),
        };
        p.validate()?;
        Ok(p)
    }

    /// The small (fast) mirror actuator.
    pub fn small_mirror() -> Self {
        Self {
            pivot_stiffness: T::of(12.3),
            damping: T::of(0.03),
            inertia: T::of(0.7e-3),
            resistance: T::of(7.5),
            torque_constant: T::of(0.283),
            back_emf: T::of(0.283),
            inductance: T::of(4.5e-3),
            coulomb_torque: T::zero(),
        }
    }

    /// The large (slow) mirror actuator.
    pub fn large_mirror() -> Self {
        Self {
            pivot_stiffness: T::of(1.54),
            damping: T::of(0.02),
            inertia: T::of(4.9e-3),
            resistance: T::of(7.5),
            torque_constant: T::of(0.283),
            back_emf: T::of(0.283),
            inductance: T::of(4.5e-3),
            coulomb_torque: T::zero(),
        }
    }

    /// Same actuator with the given Coulomb friction torque.
    pub fn with_coulomb_torque(mut self, tc: T) -> Self {
        self.coulomb_torque = tc;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let strict = [
            (self.inertia, "inertia"),
            (self.resistance, "resistance"),
            (self.inductance, "inductance"),
            (self.torque_constant, "torque constant"),
        ];
        for (v, name) in strict {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be positive")));
            }
        }
        let nonneg = [
            (self.back_emf, "back EMF"),
            (self.damping, "damping"),
            (self.pivot_stiffness, "pivot stiffness"),
            (self.coulomb_torque, "Coulomb torque"),
        ];
        for (v, name) in nonneg {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be non-negative")));
            }
        }
        Ok(())
    }

    /// Electrical time constant `Lm/Rm` [s].
    pub fn electrical_time_constant(&self) -> T {
        self.inductance / self.resistance
    }

    /// Mechanical time constant `sqrt(J/c)` [s]; `None` when `c = 0`.
    pub fn mechanical_time_constant(&self) -> Option<T> {
        (self.pivot_stiffness > T::zero())
            .then(|| (self.inertia / self.pivot_stiffness).sqrt())
    }

    /// Apply one of the mechanical corrections, leaving everything else as is.
    pub fn corrected(&self, correction: Correction) -> Self {
        let mut p = *self;
        match correction {
            Correction::DampingTimesTen => p.damping = p.damping * T::of(10.0),
            Correction::ZeroPivotStiffness => p.pivot_stiffness = T::zero(),
        }
        p
    }

    /// Voltage step that exactly balances the Coulomb breakaway torque,
    /// `Tc·Rm/Kt` [V].
    pub fn breakaway_voltage(&self) -> T {
        self.coulomb_torque * self.resistance / self.torque_constant
    }
}

/// LTI state-space model `dx/dt = A x + B u`, `y = C x + D u`, with the output
/// always the mirror angle.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel<T> {
    a: Mat<T>,
    b: Vec<T>,
    c: Vec<T>,
    d: T,
    labels: &'static [&'static str],
}

impl<T: Real> LinearModel<T> {
    /// Full third-order model on `(φ, ω, i)`.
    pub fn third_order(p: &ActuatorParams<T>) -> Result<Self> {
        p.validate()?;
        let j = p.inertia;
        let a = Mat::from_rows(&[
            vec![T::zero(), T::one(), T::zero()],
            vec![
                -p.pivot_stiffness / j,
                -p.damping / j,
                p.torque_constant / j,
            ],
            vec![
                T::zero(),
                -p.back_emf / p.inductance,
                -p.resistance / p.inductance,
            ],
        ]);
        Ok(Self {
            a,
            b: vec![T::zero(), T::zero(), T::one() / p.inductance],
            c: vec![T::one(), T::zero(), T::zero()],
            d: T::zero(),
            labels: &["phi", "omega", "i"],
        })
    }

    /// Simplified second-order model on `(φ, ω)` obtained by neglecting the
    /// electrical time constant. Validity (`Lm/Rm` well below `sqrt(J/c)`) is
    /// the caller's to judge; see [`ActuatorParams::electrical_time_constant`].
    pub fn simplified_second_order(p: &ActuatorParams<T>) -> Result<Self> {
        p.validate()?;
        let j = p.inertia;
        let electromech = p.back_emf * p.torque_constant / (p.resistance * j);
        let a = Mat::from_rows(&[
            vec![T::zero(), T::one()],
            vec![-p.pivot_stiffness / j, -electromech - p.damping / j],
        ]);
        Ok(Self {
            a,
            b: vec![T::zero(), p.torque_constant / (p.resistance * j)],
            c: vec![T::one(), T::zero()],
            d: T::zero(),
            labels: &["phi", "omega"],
        })
    }

    /// Controllable-canonical realization of a transfer function, used to
    /// cross-check step responses of the two representations.
    pub fn from_transfer_function(tf: &TransferFunction<T>) -> Self {
        let denom = tf.expanded_denominator();
        let n = denom.len() - 1;
        let lead = denom[0];
        let mut a = Mat::zeros(n, n);
        for i in 0..n - 1 {
            a[(i, i + 1)] = T::one();
        }
        for j in 0..n {
            a[(n - 1, j)] = -denom[n - j] / lead;
        }
        let mut b = vec![T::zero(); n];
        b[n - 1] = T::one();
        let mut c = vec![T::zero(); n];
        c[0] = tf.gain / lead;
        Self { a, b, c, d: T::zero(), labels: &["x1", "x2", "x3"] }
    }

    pub fn order(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &Mat<T> {
        &self.a
    }

    pub fn b(&self) -> &[T] {
        &self.b
    }

    pub fn c(&self) -> &[T] {
        &self.c
    }

    pub fn d(&self) -> T {
        self.d
    }

    pub fn state_labels(&self) -> &'static [&'static str] {
        self.labels
    }

    /// State derivative `A x + B u`.
    pub fn derivative(&self, x: &[T], u: T) -> Vec<T> {
        let mut dx = self.a.mul_vec(x);
        for (dxi, bi) in dx.iter_mut().zip(&self.b) {
            *dxi = *dxi + *bi * u;
        }
        dx
    }

    /// Output `C x + D u`.
    pub fn output(&self, x: &[T], u: T) -> T {
        self.c.iter().zip(x).map(|(&ci, &xi)| ci * xi).sum::<T>() + self.d * u
    }

    /// Magnitude of the fastest eigenvalue, used for integration step guards.
    pub fn fastest_eigenvalue(&self) -> T {
        linalg::eigenvalues(&self.a)
            .into_iter()
            .map(|e| e.norm())
            .fold(T::zero(), T::max)
    }
}

/// Angle-over-voltage transfer function.
///
/// For `c > 0` the denominator is `a0 p^n + ... + 1`. For zero pivot
/// stiffness only the third-order factored form `p·(a0 p² + a1 p + 1)`
/// exists; `integrator` marks it and `denom` holds the quadratic factor.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferFunction<T> {
    /// Gain [rad/V], or [rad/(V·s)] for the integrator form.
    pub gain: T,
    /// Denominator coefficients, highest power first, constant term one.
    pub denom: Vec<T>,
    /// True when the denominator carries an explicit factor `p`.
    pub integrator: bool,
}

impl<T: Real> TransferFunction<T> {
    /// Denominator written out as a single polynomial, highest power first.
    pub fn expanded_denominator(&self) -> Vec<T> {
        if self.integrator {
            let mut d = self.denom.clone();
            d.push(T::zero());
            d
        } else {
            self.denom.clone()
        }
    }
}

/// Transfer function of the actuator for the requested model order.
///
/// Zero pivot stiffness is only defined for the third-order model, where the
/// position feedback disappears and the plant gains a pure integrator.
pub fn transfer_function<T: Real>(
    p: &ActuatorParams<T>,
    order: usize,
) -> Result<TransferFunction<T>> {
    p.validate()?;
    if order != 2 && order != 3 {
        return Err(Error::UnsupportedCombination(format!("order {order}")));
    }
    let c = p.pivot_stiffness;
    let te = p.electrical_time_constant();
    let electromech = p.torque_constant * p.back_emf / p.resistance;
    if c == T::zero() {
        if order != 3 {
            return Err(Error::UnsupportedCombination(
                "zero pivot stiffness has no second-order transfer function".into(),
            ));
        }
        let h = p.damping;
        if h == T::zero() {
            return Err(Error::UnsupportedCombination(
                "zero stiffness with zero damping leaves a double integrator".into(),
            ));
        }
        let denom_dc = T::one() + electromech / h;
        let gain = (p.torque_constant / (p.resistance * h)) / denom_dc;
        let a0 = te * (p.inertia / h) / denom_dc;
        let a1 = (te + p.inertia / h) / denom_dc;
        return Ok(TransferFunction { gain, denom: vec![a0, a1, T::one()], integrator: true });
    }
    let gain = p.torque_constant / (p.resistance * c);
    let denom = match order {
        3 => vec![
            te * p.inertia / c,
            te * p.damping / c + p.inertia / c,
            te + p.damping / c + electromech / c,
            T::one(),
        ],
        _ => vec![p.inertia / c, p.damping / c + electromech / c, T::one()],
    };
    Ok(TransferFunction { gain, denom, integrator: false })
}

/// Eigenstructure summary of a model.
#[derive(Clone, Debug)]
pub struct ModalAnalysis<T> {
    /// Eigenvalues sorted by ascending |Re|, conjugate pairs adjacent.
    pub eigenvalues: Vec<Complex<T>>,
    /// Undamped natural frequency [rad/s], second-order models only.
    pub natural_frequency: Option<T>,
    /// Damping ratio, second-order models only.
    pub damping_ratio: Option<T>,
    /// Resonance peak frequency [Hz], present only when ξ < 1/√2.
    pub resonant_frequency_hz: Option<T>,
}

pub fn modal_analysis<T: Real>(model: &LinearModel<T>) -> ModalAnalysis<T> {
    let eigenvalues = linalg::eigenvalues(model.a());
    let (mut wn, mut xi, mut fr) = (None, None, None);
    if model.order() == 2 {
        // A = [[0,1],[-wn², -2ξwn]]
        let stiff = -model.a()[(1, 0)];
        let damp = -model.a()[(1, 1)];
        if stiff > T::zero() {
            let w = stiff.sqrt();
            let ratio = damp / (T::of(2.0) * w);
            wn = Some(w);
            xi = Some(ratio);
            let two = T::of(2.0);
            if ratio < T::one() / two.sqrt() {
                let peak = w * (T::one() - two * ratio * ratio).sqrt();
                fr = Some(peak / T::tau());
            }
        }
    }
    ModalAnalysis {
        eigenvalues,
        natural_frequency: wn,
        damping_ratio: xi,
        resonant_frequency_hz: fr,
    }
}

/// One point of the frequency response: `(|G(jω)|, arg G(jω))`.
pub fn bode_point<T: Real>(model: &LinearModel<T>, omega: T) -> Result<(T, T)> {
    if !(omega >= T::zero()) {
        return Err(Error::InvalidParams("omega must be non-negative".into()));
    }
    let n = model.order();
    let eigs = linalg::eigenvalues(model.a());
    let scale = model.a().norm_inf().max(T::one());
    for e in &eigs {
        let dist = (e.re * e.re + (e.im - omega) * (e.im - omega)).sqrt();
        let dist_conj = (e.re * e.re + (e.im + omega) * (e.im + omega)).sqrt();
        if dist.min(dist_conj) < T::of(1e-12) * scale {
            return Err(Error::SingularFrequency { omega: omega.to_f64().unwrap_or(f64::NAN) });
        }
    }
    // Solve (jωI - A) x = B, then G = C x + D.
    let mut m = vec![vec![Complex::new(T::zero(), T::zero()); n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = Complex::new(-model.a()[(i, j)], T::zero());
        }
        m[i][i] = m[i][i] + Complex::new(T::zero(), omega);
    }
    let rhs: Vec<Complex<T>> = model.b().iter().map(|&bi| Complex::new(bi, T::zero())).collect();
    let x = linalg::solve_complex(&m, &rhs)
        .ok_or(Error::SingularFrequency { omega: omega.to_f64().unwrap_or(f64::NAN) })?;
    let mut g = Complex::new(model.d(), T::zero());
    for (ci, xi) in model.c().iter().zip(&x) {
        g = g + Complex::new(*ci, T::zero()) * *xi;
    }
    Ok((g.norm(), g.arg()))
}
