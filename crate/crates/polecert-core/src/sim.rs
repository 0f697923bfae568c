//! Method-of-steps integration for the scalar neutral equation in Hale's
//! form and for the delayed-feedback Hopfield plant
//!
//! ```text
//!     d/dt [y(t) + k_d·y(t−τ)] = −ν·y(t) + μ·σ(y(t)) − k_p·y(t−τ),
//! ```
//!
//! plus empirical decay-rate estimation.
//!
//! The substitution z(t) = y(t) + c·y(t−τ) (c = α, respectively k_d) turns
//! each delay interval into an ordinary initial-value problem
//! ż = F(z, y(t−τ)) whose delayed argument is read from the dense output of
//! the previous interval; z is advanced by the classical 4th-order
//! Runge–Kutta scheme and y recovered as z − c·y(t−τ). Steps are snapped so
//! that every multiple of τ is a grid point: derivative discontinuities of
//! neutral equations propagate along t = kτ, and aligning them keeps the
//! one-step order intact. Stage times then fall on half-grid points of the
//! previous interval, where cubic Hermite interpolation of the stored
//! (y, ẏ) samples is O(h⁴) accurate.
//!
//! The derivative samples are produced by the recursion
//! ẏ(t) = ż(t) − c·ẏ(t−τ), so they satisfy the defining equation pointwise
//! by construction.

use crate::placement::ControllerDesign;
use crate::quasipoly::NeutralQuasiPoly;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Cubic Hermite basis evaluation on one interval of width `h`, local
/// coordinate `s` in [0, 1].
#[inline]
fn hermite_value(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h * d1
}

#[inline]
fn hermite_deriv(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, s: f64) -> f64 {
    let s2 = s * s;
    (6.0 * s2 - 6.0 * s) / h * y0
        + (3.0 * s2 - 4.0 * s + 1.0) * d0
        + (6.0 * s - 6.0 * s2) / h * y1
        + (3.0 * s2 - 2.0 * s) * d1
}

/// Initial function y₀ on [−τ, 0], sampled on a uniform grid and
/// interpolated by cubic Hermite polynomials. Derivatives are analytic when
/// supplied, otherwise second-order finite differences of the sampled
/// function; the delayed-derivative recursion needs them on the first
/// interval.
#[derive(Debug, Clone, PartialEq)]
pub struct History {
    tau: f64,
    step: f64,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl History {
    fn validate(tau: f64, n: usize) -> Result<()> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidInput(format!("delay must be positive and finite, got {tau}")));
        }
        if n < 2 {
            return Err(Error::InvalidInput("history grid needs at least 2 intervals".into()));
        }
        Ok(())
    }

    /// Sample `f` on [−τ, 0] with `n` intervals; derivatives by centered
    /// second-order differences (one-sided at the ends), with `f` never
    /// evaluated outside its domain.
    pub fn from_fn(f: impl Fn(f64) -> f64, tau: f64, n: usize) -> Result<Self> {
        Self::validate(tau, n)?;
        let step = tau / n as f64;
        let grid_t = |i: usize| -tau + i as f64 * step;
        let values: Vec<f64> = (0..=n).map(|i| f(grid_t(i))).collect();
        let mut derivs = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let t = grid_t(i);
            let d = (1e-6 * (1.0 + t.abs())).min(0.25 * step);
            let v = if i == 0 {
                (-3.0 * f(t) + 4.0 * f(t + d) - f(t + 2.0 * d)) / (2.0 * d)
            } else if i == n {
                (3.0 * f(t) - 4.0 * f(t - d) + f(t - 2.0 * d)) / (2.0 * d)
            } else {
                (f(t + d) - f(t - d)) / (2.0 * d)
            };
            derivs.push(v);
        }
        Ok(History { tau, step, values, derivs })
    }

    /// Sample `f` and its analytic derivative `df`.
    pub fn from_fn_with_deriv(
        f: impl Fn(f64) -> f64,
        df: impl Fn(f64) -> f64,
        tau: f64,
        n: usize,
    ) -> Result<Self> {
        Self::validate(tau, n)?;
        let step = tau / n as f64;
        let grid_t = |i: usize| -tau + i as f64 * step;
        Ok(History {
            tau,
            step,
            values: (0..=n).map(|i| f(grid_t(i))).collect(),
            derivs: (0..=n).map(|i| df(grid_t(i))).collect(),
        })
    }

    /// Constant history y₀ ≡ c.
    pub fn constant(c: f64, tau: f64) -> Result<Self> {
        Self::from_fn_with_deriv(|_| c, |_| 0.0, tau, 2)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Interpolated value at t ∈ [−τ, 0] (clamped against roundoff
    /// overshoot at the ends).
    pub fn eval(&self, t: f64) -> f64 {
        let (i, s) = self.locate(t);
        if s == 0.0 {
            return self.values[i];
        }
        hermite_value(
            self.values[i],
            self.derivs[i],
            self.values[i + 1],
            self.derivs[i + 1],
            self.step,
            s,
        )
    }

    /// Interpolated derivative at t ∈ [−τ, 0].
    pub fn eval_deriv(&self, t: f64) -> f64 {
        let (i, s) = self.locate(t);
        if s == 0.0 {
            return self.derivs[i];
        }
        hermite_deriv(
            self.values[i],
            self.derivs[i],
            self.values[i + 1],
            self.derivs[i + 1],
            self.step,
            s,
        )
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.values.len() - 1;
        let x = ((t + self.tau) / self.step).clamp(0.0, n as f64);
        let mut i = x.floor() as usize;
        if i >= n {
            return (n, 0.0);
        }
        let s = x - i as f64;
        if s == 0.0 {
            return (i, 0.0);
        }
        if s >= 1.0 {
            i += 1;
            return (i, 0.0);
        }
        (i, s)
    }

    /// ‖y₀‖∞, from the grid samples refined by dense interpolation.
    pub fn sup_norm(&self) -> f64 {
        let n = self.values.len() - 1;
        let mut m: f64 = 0.0;
        for i in 0..n {
            for k in 0..=8 {
                let s = k as f64 / 8.0;
                let v = hermite_value(
                    self.values[i],
                    self.derivs[i],
                    self.values[i + 1],
                    self.derivs[i + 1],
                    self.step,
                    s,
                );
                m = m.max(v.abs());
            }
        }
        m.max(self.values[n].abs())
    }
}

/// Activation of the Hopfield plant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    Tanh,
    Linearized,
}

impl Nonlinearity {
    #[inline]
    fn apply(self, y: f64) -> f64 {
        match self {
            Nonlinearity::Tanh => y.tanh(),
            Nonlinearity::Linearized => y,
        }
    }
}

/// The scalar Hopfield plant ẏ = −ν·y + μ·σ(y) + I with ν, μ > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlantSpec {
    pub nu: f64,
    pub mu: f64,
    pub nonlinearity: Nonlinearity,
}

impl PlantSpec {
    pub fn new(nu: f64, mu: f64, nonlinearity: Nonlinearity) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite() && mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "plant needs ν > 0 and μ > 0, got ν = {nu}, μ = {mu}"
            )));
        }
        Ok(PlantSpec { nu, mu, nonlinearity })
    }
}

/// Sampled solution on a uniform grid from t = 0, with derivative samples
/// and cubic Hermite dense output. `interval` records the delay of the run
/// for envelope-based decay fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub derivs: Vec<f64>,
    pub step: f64,
    pub interval: f64,
}

impl Trajectory {
    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let n = self.times.len() - 1;
        let overshoot = 1e-9 * (1.0 + self.t_end().abs());
        if t < -overshoot || t > self.t_end() + overshoot {
            return Err(Error::InvalidInput(format!(
                "time {t} outside the integrated range [0, {}]",
                self.t_end()
            )));
        }
        let x = (t / self.step).clamp(0.0, n as f64);
        let i = (x.floor() as usize).min(n - 1);
        Ok((i, x - i as f64))
    }

    /// Dense-output value at t ∈ [0, t_end].
    pub fn value_at(&self, t: f64) -> Result<f64> {
        let (i, s) = self.locate(t)?;
        Ok(hermite_value(
            self.values[i],
            self.derivs[i],
            self.values[i + 1],
            self.derivs[i + 1],
            self.step,
            s,
        ))
    }

    /// Dense-output derivative at t ∈ [0, t_end].
    pub fn deriv_at(&self, t: f64) -> Result<f64> {
        let (i, s) = self.locate(t)?;
        Ok(hermite_deriv(
            self.values[i],
            self.derivs[i],
            self.values[i + 1],
            self.derivs[i + 1],
            self.step,
            s,
        ))
    }
}

/// Grid geometry shared by both integrators: the step is snapped to τ/m
/// with m = round(τ/h) ≥ 16, so delay lookbacks land exactly m grid points
/// behind and breaking points are grid-aligned.
fn grid_for(tau: f64, t_end: f64, h: f64) -> Result<(f64, usize, usize)> {
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidInput(format!("horizon must be positive, got {t_end}")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("step must be positive, got {h}")));
    }
    if h > tau / 16.0 * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { h, tau });
    }
    let m = (tau / h).round().max(16.0) as usize;
    let snapped = tau / m as f64;
    let n_steps = (t_end / snapped - 1e-9).ceil().max(1.0) as usize;
    Ok((snapped, m, n_steps))
}

/// Method-of-steps core: advances z(t) = y(t) + c·y(t−τ) with
/// ż = rhs(y, y_d), recovering y and ẏ on the way. Delayed reads are
/// resolved by integer index arithmetic (the grid is delay-aligned), so a
/// stage at t_i + h/2 reads the Hermite midpoint of the previous interval.
fn integrate_steps(
    c: f64,
    rhs: impl Fn(f64, f64) -> f64,
    history: &History,
    tau: f64,
    t_end: f64,
    h: f64,
) -> Result<Trajectory> {
    let (h, m, n_steps) = grid_for(tau, t_end, h)?;
    let mut ys: Vec<f64> = Vec::with_capacity(n_steps + 1);
    let mut dys: Vec<f64> = Vec::with_capacity(n_steps + 1);

    // Delayed value at doubled grid index idx2 = 2j (grid point) or 2j+1
    // (midpoint of [j, j+1]); negative indices fall into the history.
    let delayed = |idx2: i64, ys: &[f64], dys: &[f64]| -> f64 {
        if idx2 % 2 == 0 {
            let j = idx2 / 2;
            if j <= 0 {
                history.eval(j as f64 * h)
            } else {
                ys[j as usize]
            }
        } else {
            let j = idx2.div_euclid(2);
            if j + 1 <= 0 {
                history.eval((j as f64 + 0.5) * h)
            } else {
                let j = j as usize;
                hermite_value(ys[j], dys[j], ys[j + 1], dys[j + 1], h, 0.5)
            }
        }
    };
    // At the t = 0 breaking point ẏ jumps; stored samples carry right
    // limits, so index 0 must read the recovered derivative, not the
    // history's left-limit slope.
    let delayed_deriv = |j: i64, dys: &[f64]| -> f64 {
        if j < 0 {
            history.eval_deriv(j as f64 * h)
        } else {
            dys[j as usize]
        }
    };

    let y0 = history.eval(0.0);
    let mut z = y0 + c * history.eval(-tau);
    ys.push(y0);
    dys.push(rhs(y0, history.eval(-tau)) - c * history.eval_deriv(-tau));

    for i in 0..n_steps {
        let base2 = 2 * (i as i64 - m as i64);
        let yd0 = delayed(base2, &ys, &dys);
        let yd1 = delayed(base2 + 1, &ys, &dys);
        let yd2 = delayed(base2 + 2, &ys, &dys);

        let k1 = rhs(z - c * yd0, yd0);
        let k2 = rhs(z + 0.5 * h * k1 - c * yd1, yd1);
        let k3 = rhs(z + 0.5 * h * k2 - c * yd1, yd1);
        let k4 = rhs(z + h * k3 - c * yd2, yd2);
        z += h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);

        let y_next = z - c * yd2;
        let dy_next = rhs(y_next, yd2) - c * delayed_deriv(i as i64 + 1 - m as i64, &dys);
        ys.push(y_next);
        dys.push(dy_next);
    }

    let times = (0..=n_steps).map(|i| i as f64 * h).collect();
    Ok(Trajectory { times, values: ys, derivs: dys, step: h, interval: tau })
}

/// Integrate the linear neutral equation d/dt[y + αy(t−τ)] = −ay − βy(t−τ)
/// from the given initial function. The step is snapped to an integer
/// fraction of τ, at least τ/16.
pub fn integrate_linear_neutral(
    qp: &NeutralQuasiPoly,
    y0: &History,
    t_end: f64,
    h: f64,
) -> Result<Trajectory> {
    if (y0.tau() - qp.tau).abs() > 1e-9 * qp.tau {
        return Err(Error::InvalidInput(format!(
            "history spans [{}, 0] but the equation delay is {}",
            -y0.tau(),
            qp.tau
        )));
    }
    let (a, beta) = (qp.a, qp.beta);
    integrate_steps(qp.alpha, move |y, yd| -a * y - beta * yd, y0, qp.tau, t_end, h)
}

/// Integrate the closed-loop Hopfield plant
/// d/dt[y + k_d·y(t−τ)] = −νy + μσ(y) − k_p·y(t−τ). Only the gains and
/// delay of the controller are read; zero gains give the open-loop plant.
pub fn integrate_hopfield(
    plant: &PlantSpec,
    ctrl: &ControllerDesign,
    y0: &History,
    t_end: f64,
    h: f64,
) -> Result<Trajectory> {
    if (y0.tau() - ctrl.tau).abs() > 1e-9 * ctrl.tau {
        return Err(Error::InvalidInput(format!(
            "history spans [{}, 0] but the controller delay is {}",
            -y0.tau(),
            ctrl.tau
        )));
    }
    let (nu, mu, sigma) = (plant.nu, plant.mu, plant.nonlinearity);
    let kp = ctrl.kp;
    integrate_steps(
        ctrl.kd,
        move |y, yd| -nu * y + mu * sigma.apply(y) - kp * yd,
        y0,
        ctrl.tau,
        t_end,
        h,
    )
}

/// Least-squares slope of the log of the per-delay-interval sup of |y|
/// over [t_start, t_end]. Envelope points are (argmax time, sup) per
/// interval, which makes the fit insensitive to oscillation phase.
pub fn estimate_decay_rate(traj: &Trajectory, t_start: f64, t_end: f64) -> Result<f64> {
    if !(traj.interval > 0.0) {
        return Err(Error::InvalidInput(
            "trajectory carries no delay interval to build envelopes from".into(),
        ));
    }
    let overshoot = 1e-9 * (1.0 + traj.t_end().abs());
    if t_start < -overshoot || t_end > traj.t_end() + overshoot || !(t_start < t_end) {
        return Err(Error::InvalidInput(format!(
            "window [{t_start}, {t_end}] not covered by the trajectory [0, {}]",
            traj.t_end()
        )));
    }
    let n_intervals = ((t_end - t_start) / traj.interval + 1e-12).floor() as usize;
    if n_intervals < 3 {
        return Err(Error::WindowTooShort);
    }
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(n_intervals);
    for j in 0..n_intervals {
        let w0 = t_start + j as f64 * traj.interval;
        let w1 = w0 + traj.interval;
        let i0 = ((w0 - 1e-12) / traj.step).ceil().max(0.0) as usize;
        let i1 = (((w1 + 1e-12) / traj.step).floor() as usize).min(traj.times.len() - 1);
        let mut best = f64::NEG_INFINITY;
        let mut best_t = w0;
        for i in i0..=i1 {
            let v = traj.values[i].abs();
            if v > best {
                best = v;
                best_t = traj.times[i];
            }
        }
        if !(best > 1e-13) {
            return Err(Error::WindowTooShort);
        }
        pts.push((best_t, best.ln()));
    }
    let n = pts.len() as f64;
    let (mut st, mut sv, mut stt, mut stv) = (0.0, 0.0, 0.0, 0.0);
    for &(t, v) in &pts {
        st += t;
        sv += v;
        stt += t * t;
        stv += t * v;
    }
    let denom = n * stt - st * st;
    if denom.abs() < 1e-300 {
        return Err(Error::WindowTooShort);
    }
    Ok((n * stv - st * sv) / denom)
}
