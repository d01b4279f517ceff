//! Near time-optimal bang-bang control synthesis and optimality certification.
//!
//! For a linear plant with interval-bounded scalar control and all-real
//! eigenvalues, the time-optimal control is piecewise constant at ±u0 with at
//! most n intervals of constancy (n the system order). The solver exploits
//! that structure directly: it shoots over the interval lengths with a
//! Levenberg–Marquardt iteration on exactly-propagated segment chains, trying
//! both initial signs, several ladder-shaped starting guesses and every
//! interval count from n down to 1, and keeps the fastest converged transfer.
//!
//! [`certify`] then reconstructs an adjoint trajectory `ψ(t) = e^{-Aᵀt} ψ0`
//! whose switching function `ψᵀB` vanishes at the interior switch instants and
//! checks the maximum condition `u(t) = u0·sign(ψ(t)ᵀB)` on a dense grid.

use crate::float::Real;
use crate::linalg::{self, Mat};
use crate::models::LinearModel;
use crate::sim::{self, InputSignal};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Fixed-endpoint minimum-time transfer problem with symmetric control bound.
#[derive(Clone, Debug)]
pub struct TocProblem<T> {
    model: LinearModel<T>,
    x0: Vec<T>,
    target: Vec<T>,
    control_bound: T,
    accuracy: Vec<T>,
}

impl<T: Real> TocProblem<T> {
    pub fn new(
        model: LinearModel<T>,
        x0: Vec<T>,
        target: Vec<T>,
        control_bound: T,
        accuracy: Vec<T>,
    ) -> Result<Self> {
        let n = model.order();
        if x0.len() != n || target.len() != n || accuracy.len() != n {
            return Err(Error::InvalidParams(format!(
                "state, target and accuracy must have {n} components"
            )));
        }
        if !(control_bound > T::zero()) {
            return Err(Error::InvalidParams("control bound must be positive".into()));
        }
        if accuracy.iter().any(|&a| !(a > T::zero())) {
            return Err(Error::InvalidParams("accuracy components must be positive".into()));
        }
        Ok(Self { model, x0, target, control_bound, accuracy })
    }

    /// Terminal tolerances used throughout the positioning studies:
    /// 1e-7 deg on angle, 2e-5 deg/s on rate, 1e-5 A on current.
    pub fn default_accuracy(order: usize) -> Vec<T> {
        let mut acc =
            vec![T::of(1e-7).to_radians_from_deg(), T::of(2e-5).to_radians_from_deg()];
        if order >= 3 {
            acc.push(T::of(1e-5));
        }
        acc.truncate(order);
        acc
    }

    pub fn model(&self) -> &LinearModel<T> {
        &self.model
    }

    pub fn initial_state(&self) -> &[T] {
        &self.x0
    }

    pub fn target(&self) -> &[T] {
        &self.target
    }

    pub fn control_bound(&self) -> T {
        self.control_bound
    }

    pub fn accuracy(&self) -> &[T] {
        &self.accuracy
    }

    /// The n-intervals theorem assumes real eigenvalues; oscillatory plants
    /// are still accepted but the result carries no optimality claim.
    pub fn has_complex_eigenvalues(&self) -> bool {
        let eigs = linalg::eigenvalues(self.model.a());
        let scale = eigs.iter().map(|e| e.norm()).fold(T::one(), T::max);
        eigs.iter().any(|e| e.im.abs() > T::of(1e-9) * scale)
    }

    fn at_target(&self) -> bool {
        self.x0
            .iter()
            .zip(&self.target)
            .zip(&self.accuracy)
            .all(|((&x, &t), &a)| (x - t).abs() <= a)
    }
}

/// Signed piecewise-constant control: interval `k` carries
/// `initial_sign·(-1)^k·u0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BangBangSolution<T> {
    /// Sign of the control on the first interval, ±1.
    pub initial_sign: i8,
    /// Interval lengths [s]; all non-negative.
    #[serde(rename = "intervals_s")]
    pub intervals: Vec<T>,
    /// Sum of the intervals [s].
    #[serde(rename = "total_time_s")]
    pub total_time: T,
    /// Terminal state minus target, per component.
    pub terminal_error: Vec<T>,
    /// Whether the terminal error meets the problem accuracy componentwise.
    pub converged: bool,
}

impl<T: Real> BangBangSolution<T> {
    /// Control value on interval `k` for the given bound.
    pub fn control_on_interval(&self, k: usize, u0: T) -> T {
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        T::of(self.initial_sign as f64) * sign * u0
    }

    /// Control value at time `t` past the start of the solution (right
    /// continuous at switches; the last value holds beyond the end).
    pub fn control_at(&self, t: T, u0: T) -> T {
        let mut elapsed = T::zero();
        let mut value = self.control_on_interval(0, u0);
        for (k, &tau) in self.intervals.iter().enumerate() {
            value = self.control_on_interval(k, u0);
            elapsed = elapsed + tau;
            if t < elapsed {
                break;
            }
        }
        value
    }

    /// The control as a simulation input signal (zero once complete).
    pub fn to_input(&self, u0: T) -> Result<InputSignal<T>> {
        let mut breakpoints = Vec::new();
        let mut values = Vec::new();
        let mut t = T::zero();
        for (k, &tau) in self.intervals.iter().enumerate() {
            if tau > T::zero() {
                breakpoints.push(t);
                values.push(self.control_on_interval(k, u0));
                t = t + tau;
            }
        }
        if breakpoints.is_empty() {
            return Ok(InputSignal::Step { amplitude: T::zero() });
        }
        breakpoints.push(t);
        values.push(T::zero());
        InputSignal::piecewise_constant(breakpoints, values)
    }
}

/// Adjoint-based optimality certificate for a converged solution.
#[derive(Clone, Debug)]
pub struct PmpCertificate<T> {
    /// Initial adjoint, scaled to unit infinity norm.
    pub initial_adjoint: Vec<T>,
    /// Normalized switching-function values at the interior switches.
    pub switch_residuals: Vec<T>,
    /// `u(t) = u0·sign(ψ(t)ᵀB)` verified on a dense grid.
    pub sign_match: bool,
    /// Hamiltonian at the final time; non-negative for an optimal transfer.
    pub hamiltonian_bound: T,
}

/// End state of the bang-bang chain plus per-segment caches for the Jacobian.
struct ChainEval<T> {
    states: Vec<Vec<T>>,      // x after each segment, states[0] = x0
    transitions: Vec<Mat<T>>, // e^{A·τ_j} per segment
}

fn propagate_chain<T: Real>(
    model: &LinearModel<T>,
    x0: &[T],
    taus: &[T],
    sign: i8,
    u0: T,
) -> ChainEval<T> {
    let mut states = Vec::with_capacity(taus.len() + 1);
    let mut transitions = Vec::with_capacity(taus.len());
    states.push(x0.to_vec());
    for (k, &tau) in taus.iter().enumerate() {
        let u = T::of(sign as f64) * (if k % 2 == 0 { u0 } else { -u0 });
        let (phi, gamma) = sim::discretize(model, tau);
        let prev = states.last().unwrap();
        let mut next = phi.mul_vec(prev);
        for (xi, gi) in next.iter_mut().zip(&gamma) {
            *xi = *xi + *gi * u;
        }
        states.push(next);
        transitions.push(phi);
    }
    ChainEval { states, transitions }
}

/// Weighted residual and its Jacobian with respect to the square-root
/// parameters `s` (τ = s²), for the damped-Newton shooting iteration.
fn residual_jacobian<T: Real>(p: &TocProblem<T>, sign: i8, s: &[T]) -> (Vec<T>, Mat<T>, Vec<T>) {
    let taus: Vec<T> = s.iter().map(|&v| v * v).collect();
    let chain = propagate_chain(&p.model, &p.x0, &taus, sign, p.control_bound);
    let n = p.model.order();
    let k = s.len();
    let x_end = chain.states.last().unwrap().clone();
    let raw: Vec<T> = x_end.iter().zip(&p.target).map(|(&x, &t)| x - t).collect();
    let weighted: Vec<T> = raw.iter().zip(&p.accuracy).map(|(&r, &a)| r / a).collect();

    // ∂x_end/∂τ_j = (Π_{m>j} E_m) · f(x_j, u_j): the vector field at the end
    // of segment j, pushed through the remaining transitions.
    let mut jac = Mat::zeros(n, k);
    let mut push = Mat::identity(n);
    for j in (0..k).rev() {
        let u =
            T::of(sign as f64) * (if j % 2 == 0 { p.control_bound } else { -p.control_bound });
        let f = p.model.derivative(&chain.states[j + 1], u);
        let col = push.mul_vec(&f);
        let two_s = T::of(2.0) * s[j];
        for i in 0..n {
            jac[(i, j)] = col[i] * two_s / p.accuracy[i];
        }
        push = push.mul(&chain.transitions[j]);
    }
    (weighted, jac, raw)
}

fn cost<T: Real>(r: &[T]) -> T {
    r.iter().map(|&v| v * v).sum()
}

/// Levenberg–Marquardt on the square-root interval parameters.
/// Returns `(taus, raw_error, converged)`.
fn shoot<T: Real>(p: &TocProblem<T>, sign: i8, tau0: &[T], max_iter: usize) -> (Vec<T>, Vec<T>, bool) {
    let mut s: Vec<T> = tau0.iter().map(|&t| t.max(T::zero()).sqrt()).collect();
    let k = s.len();
    let (mut r, mut jac, mut raw) = residual_jacobian(p, sign, &s);
    let mut current_cost = cost(&r);
    let mut lambda = T::of(1e-3);
    for _ in 0..max_iter {
        let jt = jac.transpose();
        let mut jtj = jt.mul(&jac);
        let jtr = jt.mul_vec(&r);
        let diag_max = (0..k).map(|i| jtj[(i, i)]).fold(T::of(1e-30), T::max);
        for i in 0..k {
            let d = jtj[(i, i)].max(diag_max * T::of(1e-12));
            jtj[(i, i)] = jtj[(i, i)] + lambda * d;
        }
        let Some(step) = linalg::solve(&jtj, &jtr) else {
            break;
        };
        let trial: Vec<T> = s.iter().zip(&step).map(|(&si, &d)| si - d).collect();
        let (r_t, jac_t, raw_t) = residual_jacobian(p, sign, &trial);
        let trial_cost = cost(&r_t);
        if trial_cost < current_cost {
            let improvement = (current_cost - trial_cost) / current_cost.max(T::of(1e-300));
            s = trial;
            r = r_t;
            jac = jac_t;
            raw = raw_t;
            current_cost = trial_cost;
            lambda = (lambda * T::of(0.33)).max(T::of(1e-12));
            let within = r.iter().all(|&v| v.abs() <= T::one());
            if within && improvement < T::of(1e-9) {
                break;
            }
        } else {
            lambda = lambda * T::of(4.0);
            if lambda > T::of(1e12) {
                break;
            }
        }
    }
    let taus: Vec<T> = s.iter().map(|&v| v * v).collect();
    let converged = r.iter().all(|&v| v.abs() <= T::one());
    (taus, raw, converged)
}

/// Ladder-shaped starting guesses spanning the plausible transfer times.
fn ladder_starts<T: Real>(p: &TocProblem<T>, k: usize) -> Vec<Vec<T>> {
    let eigs = linalg::eigenvalues(p.model.a());
    let scale = eigs.iter().map(|e| e.norm()).fold(T::one(), T::max);
    let slowest_nonzero = eigs
        .iter()
        .map(|e| e.re.abs())
        .filter(|&m| m > T::of(1e-9) * scale)
        .fold(T::infinity(), T::min);
    let t_slow = if slowest_nonzero.is_finite() && slowest_nonzero > T::zero() {
        T::one() / slowest_nonzero
    } else {
        T::one()
    };
    let mut starts = Vec::with_capacity(6);
    for factor in [0.2, 1.0, 5.0] {
        let t_guess = t_slow * T::of(factor);
        // Geometric ladder τ_j = T·2^(-j) and an equal split.
        starts.push((0..k).map(|j| t_guess * T::of(0.5f64.powi(j as i32))).collect());
        starts.push(vec![t_guess / T::of(k as f64); k]);
    }
    starts
}

fn make_solution<T: Real>(sign: i8, taus: Vec<T>, raw: Vec<T>, converged: bool) -> BangBangSolution<T> {
    let total_time = taus.iter().copied().sum();
    BangBangSolution { initial_sign: sign, intervals: taus, total_time, terminal_error: raw, converged }
}

/// Synthesize a near time-optimal bang-bang transfer.
///
/// Never errors: a failed synthesis comes back with `converged = false` and
/// the smallest terminal error found; an already-satisfied target comes back
/// as an empty interval list.
pub fn solve<T: Real>(p: &TocProblem<T>) -> BangBangSolution<T> {
    if p.at_target() {
        let raw: Vec<T> = p.x0.iter().zip(&p.target).map(|(&x, &t)| x - t).collect();
        return make_solution(1, Vec::new(), raw, true);
    }
    let n = p.model.order();
    let mut best: Option<BangBangSolution<T>> = None;
    let mut best_failed: Option<(T, BangBangSolution<T>)> = None;
    for k in (1..=n).rev() {
        for sign in [1i8, -1i8] {
            for start in ladder_starts(p, k) {
                let (taus, raw, converged) = shoot(p, sign, &start, 120);
                let candidate = make_solution(sign, taus, raw.clone(), converged);
                if converged {
                    let better = match &best {
                        None => true,
                        Some(b) => {
                            candidate.total_time < b.total_time - T::of(1e-9)
                                || ((candidate.total_time - b.total_time).abs() <= T::of(1e-9)
                                    && candidate.intervals.len() < b.intervals.len())
                        }
                    };
                    if better {
                        best = Some(candidate);
                    }
                } else {
                    let err = raw
                        .iter()
                        .zip(&p.accuracy)
                        .map(|(&r, &a)| (r / a).abs())
                        .fold(T::zero(), T::max);
                    if best_failed.as_ref().map_or(true, |(e, _)| err < *e) {
                        best_failed = Some((err, candidate));
                    }
                }
            }
        }
    }
    best.or(best_failed.map(|(_, c)| c)).expect("at least one candidate was evaluated")
}

/// [`solve`] with a warm-start candidate tried first (both signs); used by the
/// sampled-data controller where consecutive problems differ only slightly.
pub fn solve_warm<T: Real>(p: &TocProblem<T>, warm: &BangBangSolution<T>) -> BangBangSolution<T> {
    if p.at_target() {
        return solve(p);
    }
    if !warm.intervals.is_empty() {
        for sign in [warm.initial_sign, -warm.initial_sign] {
            let (taus, raw, converged) = shoot(p, sign, &warm.intervals, 60);
            if converged {
                return make_solution(sign, taus, raw, true);
            }
        }
    }
    solve(p)
}

/// Per-sample synthesis under the controller's budget: the warm start (both
/// signs) first, then the 6 ladder starts × 2 signs at the full interval
/// count only, with capped iterations. Returns the fastest converged
/// candidate, or the best failure.
pub fn solve_budgeted<T: Real>(
    p: &TocProblem<T>,
    warm: Option<&BangBangSolution<T>>,
) -> BangBangSolution<T> {
    if p.at_target() {
        let raw: Vec<T> = p.x0.iter().zip(&p.target).map(|(&x, &t)| x - t).collect();
        return make_solution(1, Vec::new(), raw, true);
    }
    if let Some(w) = warm {
        if !w.intervals.is_empty() {
            for sign in [w.initial_sign, -w.initial_sign] {
                let (taus, raw, converged) = shoot(p, sign, &w.intervals, 30);
                if converged {
                    return make_solution(sign, taus, raw, true);
                }
            }
        }
    }
    let n = p.model.order();
    let mut best: Option<BangBangSolution<T>> = None;
    let mut best_failed: Option<(T, BangBangSolution<T>)> = None;
    for sign in [1i8, -1i8] {
        for start in ladder_starts(p, n) {
            let (taus, raw, converged) = shoot(p, sign, &start, 50);
            let candidate = make_solution(sign, taus, raw.clone(), converged);
            if converged {
                let better = best
                    .as_ref()
                    .map_or(true, |b| candidate.total_time < b.total_time - T::of(1e-9));
                if better {
                    best = Some(candidate);
                }
            } else {
                let err = raw
                    .iter()
                    .zip(&p.accuracy)
                    .map(|(&r, &a)| (r / a).abs())
                    .fold(T::zero(), T::max);
                if best_failed.as_ref().map_or(true, |(e, _)| err < *e) {
                    best_failed = Some((err, candidate));
                }
            }
        }
    }
    best.or(best_failed.map(|(_, c)| c)).expect("at least one candidate was evaluated")
}

/// Convenience wrapper: minimum transfer time of the problem.
pub fn reach_time<T: Real>(p: &TocProblem<T>) -> T {
    solve(p).total_time
}

/// Verify a converged solution against the maximum principle.
///
/// Builds the switching function as a real exponential sum over the plant
/// spectrum, pins its zeros at the interior switch instants, and checks the
/// control sign against it on a 1000-point grid. Requires all-real
/// eigenvalues (the corrected actuator models).
pub fn certify<T: Real>(p: &TocProblem<T>, solution: &BangBangSolution<T>) -> Result<PmpCertificate<T>> {
    if !solution.converged {
        return Err(Error::NotConverged);
    }
    // Re-propagate: the handed-in solution must actually hit the target.
    let chain = propagate_chain(
        &p.model,
        &p.x0,
        &solution.intervals,
        solution.initial_sign,
        p.control_bound,
    );
    let x_end = chain.states.last().unwrap();
    let ok = x_end
        .iter()
        .zip(&p.target)
        .zip(&p.accuracy)
        .all(|((&x, &t), &a)| (x - t).abs() <= a);
    if !ok {
        return Err(Error::NotConverged);
    }
    if solution.intervals.is_empty() {
        return Err(Error::CertificationFailed(
            "degenerate transfer has no control to certify".into(),
        ));
    }

    let n = p.model.order();
    let at = p.model.a().transpose();
    let pairs = linalg::real_eigenvectors(&at, T::of(1e-7)).ok_or_else(|| {
        Error::CertificationFailed("plant spectrum is not real; no optimality claim".into())
    })?;
    let k = solution.intervals.len();
    // Switching function g(t) = Σ_i d_i e^{-λ_i (t - t_f)} over the k slowest
    // modes; shifting by t_f keeps every exponent non-positive on [0, t_f].
    let t_f = solution.total_time;
    let modes: Vec<(T, Vec<T>)> = pairs.into_iter().take(k).collect();
    let mut switch_times = Vec::new();
    let mut acc = T::zero();
    for &tau in &solution.intervals[..k - 1] {
        acc = acc + tau;
        switch_times.push(acc);
    }
    // Nullspace system: one row per interior switch, square with zero fill.
    let mut m = Mat::zeros(k, k);
    for (row, &ts) in switch_times.iter().enumerate() {
        for (col, (lam, _)) in modes.iter().enumerate() {
            m[(row, col)] = (-(*lam) * (ts - t_f)).exp();
        }
    }
    let d0 = linalg::nullspace_vector(&m).ok_or_else(|| {
        Error::CertificationFailed("switch conditions leave no adjoint freedom".into())
    })?;

    let eval = |d: &[T], t: T| -> T {
        modes
            .iter()
            .zip(d)
            .map(|((lam, _), &di)| di * (-(*lam) * (t - t_f)).exp())
            .sum()
    };
    // Fix the overall sign from the first interval.
    let probe = solution.intervals[0] * T::of(0.5);
    let flip = if eval(&d0, probe) * T::of(solution.initial_sign as f64) < T::zero() {
        -T::one()
    } else {
        T::one()
    };
    let d: Vec<T> = d0.into_iter().map(|v| v * flip).collect();

    // Sign match on a dense grid, skipping a guard band around each switch.
    let grid = 1000usize;
    let guard = t_f * T::of(1e-9);
    let mut g_max = T::zero();
    for i in 0..grid {
        let t = t_f * T::of((i as f64 + 0.5) / grid as f64);
        g_max = g_max.max(eval(&d, t).abs());
    }
    let mut sign_match = g_max > T::zero();
    for i in 0..grid {
        let t = t_f * T::of((i as f64 + 0.5) / grid as f64);
        if switch_times.iter().any(|&ts| (t - ts).abs() <= guard) {
            continue;
        }
        let expected = solution.control_at(t, T::one());
        if eval(&d, t) * expected < T::zero() {
            sign_match = false;
            break;
        }
    }

    let switch_residuals: Vec<T> =
        switch_times.iter().map(|&ts| eval(&d, ts) / g_max.max(T::of(1e-300))).collect();

    // ψ(t) = Σ_i (d_i e^{-λ_i (t - t_f)} / (wᵢᵀB)) wᵢ, scaled at t = 0.
    let psi_at = |t: T| -> Vec<T> {
        let mut psi = vec![T::zero(); n];
        for ((lam, w), &di) in modes.iter().zip(&d) {
            let wtb: T = w.iter().zip(p.model.b()).map(|(&wi, &bi)| wi * bi).sum();
            let coeff = di * (-(*lam) * (t - t_f)).exp() / wtb;
            for (pi, &wi) in psi.iter_mut().zip(w) {
                *pi = *pi + coeff * wi;
            }
        }
        psi
    };
    let psi0 = psi_at(T::zero());
    let scale = psi0.iter().fold(T::zero(), |a, &v| a.max(v.abs())).max(T::of(1e-300));
    let initial_adjoint: Vec<T> = psi0.iter().map(|&v| v / scale).collect();

    // Hamiltonian at t_f: ψᵀ(A x + B u), constant along an extremal.
    let psi_f = psi_at(t_f);
    let u_f = solution.control_on_interval(k - 1, p.control_bound);
    let dx = p.model.derivative(x_end, u_f);
    let hamiltonian_bound = psi_f.iter().zip(&dx).map(|(&a, &b)| a * b).sum::<T>() / scale;

    Ok(PmpCertificate { initial_adjoint, switch_residuals, sign_match, hamiltonian_bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ActuatorParams, Correction, LinearModel};
    use crate::reference::{ReferenceSolution, REFERENCE_SOLUTIONS, SOLUTION_TIME_TOLERANCE};

    fn problem_for(case: &ReferenceSolution) -> TocProblem<f64> {
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

    #[test]
    fn reference_positioning_solutions() {
        for case in &REFERENCE_SOLUTIONS {
            let p = problem_for(case);
            let sol = solve(&p);
            assert!(sol.converged, "{} order {} did not converge", case.name, case.order);
            assert_eq!(sol.initial_sign, 1, "{} order {}", case.name, case.order);
            assert_eq!(
                sol.intervals.len(),
                case.intervals.len(),
                "{} order {}: got {:?}",
                case.name,
                case.order,
                sol.intervals
            );
            for (i, (&got, &want)) in sol.intervals.iter().zip(case.intervals).enumerate() {
                assert!(
                    (got - want).abs() < SOLUTION_TIME_TOLERANCE,
                    "{} order {} interval {i}: {got} vs {want}",
                    case.name,
                    case.order
                );
            }
            assert!(
                (sol.total_time - case.total_time).abs() < SOLUTION_TIME_TOLERANCE,
                "{} order {} total: {} vs {}",
                case.name,
                case.order,
                sol.total_time,
                case.total_time
            );
        }
    }

    #[test]
    fn degenerate_target_returns_empty() {
        let params = ActuatorParams::large_mirror().corrected(Correction::ZeroPivotStiffness);
        let model = LinearModel::third_order(&params).unwrap();
        let p = TocProblem::new(
            model,
            vec![0.1, 0.0, 0.0],
            vec![0.1, 0.0, 0.0],
            10.0,
            TocProblem::default_accuracy(3),
        )
        .unwrap();
        let sol = solve(&p);
        assert!(sol.converged);
        assert!(sol.intervals.is_empty());
        assert_eq!(sol.total_time, 0.0);
        assert_eq!(reach_time(&p), 0.0);
    }

    #[test]
    fn certificates_for_reference_solutions() {
        for case in &REFERENCE_SOLUTIONS {
            let p = problem_for(case);
            let sol = solve(&p);
            let cert = certify(&p, &sol).unwrap();
            assert!(cert.sign_match, "{} order {}", case.name, case.order);
            assert!(
                cert.switch_residuals.iter().all(|r| r.abs() <= 1e-10),
                "{} order {} residuals {:?}",
                case.name,
                case.order,
                cert.switch_residuals
            );
            assert!(
                cert.hamiltonian_bound >= 0.0,
                "{} order {}: H(t_f) = {}",
                case.name,
                case.order,
                cert.hamiltonian_bound
            );
        }
    }

    #[test]
    fn certify_refuses_perturbed_solution() {
        let case = &REFERENCE_SOLUTIONS[4]; // zero-stiffness large, u0 = 10
        let p = problem_for(case);
        let mut sol = solve(&p);
        sol.intervals[0] *= 1.10;
        assert!(matches!(certify(&p, &sol), Err(Error::NotConverged)));
        sol.converged = false;
        assert!(matches!(certify(&p, &sol), Err(Error::NotConverged)));
    }

    #[test]
    fn single_interval_transfer_certifies() {
        // Pure first-order lag reaches a reachable point with one interval.
        let tf = crate::models::TransferFunction::<f64> {
            gain: 1.0,
            denom: vec![1.0, 1.0],
            integrator: false,
        };
        let model = LinearModel::from_transfer_function(&tf);
        let p = TocProblem::new(model, vec![0.0], vec![0.5], 1.0, vec![1e-10]).unwrap();
        let sol = solve(&p);
        assert!(sol.converged);
        assert_eq!(sol.intervals.len(), 1);
        let cert = certify(&p, &sol).unwrap();
        assert!(cert.sign_match);
        assert!(cert.switch_residuals.is_empty());
    }

    #[test]
    fn control_alternates_and_fits_total_time() {
        let case = &REFERENCE_SOLUTIONS[5];
        let p = problem_for(case);
        let sol = solve(&p);
        for k in 0..sol.intervals.len() {
            let expected = if k % 2 == 0 { 20.0 } else { -20.0 };
            assert_eq!(sol.control_on_interval(k, 20.0), expected);
            assert!(sol.intervals[k] >= 0.0);
            assert!(sol.intervals[k] <= sol.total_time);
        }
    }

    #[test]
    fn higher_bound_is_faster() {
        let slow = problem_for(&REFERENCE_SOLUTIONS[4]);
        let fast = problem_for(&REFERENCE_SOLUTIONS[5]);
        assert!(reach_time(&fast) < reach_time(&slow));
    }

    #[test]
    fn farther_target_is_never_faster() {
        let case = &REFERENCE_SOLUTIONS[5];
        let p_near = problem_for(case);
        let model = p_near.model().clone();
        let mut target = p_near.target().to_vec();
        target[0] *= 2.0;
        let p_far = TocProblem::new(
            model,
            p_near.initial_state().to_vec(),
            target,
            p_near.control_bound(),
            p_near.accuracy().to_vec(),
        )
        .unwrap();
        assert!(reach_time(&p_far) >= reach_time(&p_near));
    }

    #[test]
    fn warm_start_matches_cold_solution() {
        let case = &REFERENCE_SOLUTIONS[7];
        let p = problem_for(case);
        let cold = solve(&p);
        let warm = solve_warm(&p, &cold);
        assert!(warm.converged);
        assert!((warm.total_time - cold.total_time).abs() < 1e-9);
    }

    #[test]
    fn complex_eigenvalue_plant_is_flagged_but_solvable() {
        let params = ActuatorParams::large_mirror(); // uncorrected, oscillatory
        let model = LinearModel::simplified_second_order(&params).unwrap();
        let p = TocProblem::new(
            model,
            vec![0.0, 0.0],
            vec![8.35f64.to_radians(), 0.0],
            10.0,
            vec![1e-6, 1e-4],
        )
        .unwrap();
        assert!(p.has_complex_eigenvalues());
        let sol = solve(&p);
        assert!(sol.converged, "oscillatory plant still admits a two-interval transfer");
    }

    #[test]
    fn solution_serializes_to_contracted_json() {
        let case = &REFERENCE_SOLUTIONS[5];
        let sol = solve(&problem_for(case));
        let json = serde_json::to_value(&sol).unwrap();
        for field in ["initial_sign", "intervals_s", "total_time_s", "terminal_error", "converged"]
        {
            assert!(json.get(field).is_some(), "missing {field}");
        }
    }

    #[test]
    fn repeated_solves_are_identical() {
        let case = &REFERENCE_SOLUTIONS[4];
        let p = problem_for(case);
        let a = serde_json::to_string(&solve(&p)).unwrap();
        let b = serde_json::to_string(&solve(&p)).unwrap();
        assert_eq!(a, b);
    }
}
