//! Fixed-step RK4 and Runge-Kutta-Fehlberg 4(5) over fixed-size states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest step either method will take before giving up.
pub const MIN_STEP: f64 = 1e-14;

/// Consecutive near-stationary steps required to declare convergence.
const STATIONARY_STEPS: usize = 10;
const STATIONARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    #[serde(rename = "rk4")]
    Rk4Fixed,
    #[serde(rename = "rkf45")]
    Rkf45Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Fixed step for RK4, initial step for RKF45. Always positive; the sign
    /// of `t_end - t0` picks the direction.
    pub step: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub t_end: f64,
    pub max_steps: usize,
    /// QFlow stops once `min q_i` drops below this.
    pub q_floor: f64,
    /// MFlow/AFlow stop once the largest coordinate exceeds this.
    pub m_ceiling: f64,
    /// Optional cap on the adaptive step.
    #[serde(default)]
    pub max_step: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            method: Method::Rkf45Adaptive,
            step: 1e-3,
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            t_end: 10.0,
            max_steps: 10_000_000,
            q_floor: 1e-9,
            m_ceiling: 1e9,
            max_step: None,
        }
    }
}

impl IntegratorConfig {
    pub fn rk4(step: f64, t_end: f64) -> Self {
        Self {
            method: Method::Rk4Fixed,
            step,
            t_end,
            ..Self::default()
        }
    }

    pub fn rkf45(tol: f64, t_end: f64) -> Self {
        Self {
            abs_tol: tol,
            rel_tol: tol,
            t_end,
            ..Self::default()
        }
    }

    pub fn with_t_end(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.to_string()));
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad("step must be positive");
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !self.t_end.is_finite() {
            return bad("t_end must be finite");
        }
        if self.max_steps == 0 {
            return bad("max_steps must be at least 1");
        }
        if !(self.q_floor > 0.0 && self.m_ceiling > 0.0) {
            return bad("q_floor and m_ceiling must be positive");
        }
        if matches!(self.max_step, Some(h) if h.is_nan() || h <= 0.0) {
            return bad("max_step must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    ReachedTEnd,
    ExtinctionFloor,
    BlowUpCeiling,
    FixedPointConverged,
    MaxSteps,
    /// A caller-supplied stop predicate fired (internal tracing only).
    StopCondition,
}

/// Autonomous ODE with state-dependent validity and stopping rules.
pub(crate) struct Problem<'a, const N: usize> {
    pub rhs: &'a dyn Fn(&[f64; N]) -> [f64; N],
    /// Trial states failing this are rejected and the step is halved.
    pub admissible: &'a dyn Fn(&[f64; N]) -> bool,
    /// Checked on every accepted state.
    pub guard: &'a dyn Fn(&[f64; N]) -> Option<Termination>,
}

#[allow(dead_code)] // t and steps are diagnostics, read in tests
pub(crate) struct Outcome<const N: usize> {
    pub termination: Termination,
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

fn norm<const N: usize>(y: &[f64; N]) -> f64 {
    y.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn rk4_step<const N: usize>(f: &dyn Fn(&[f64; N]) -> [f64; N], y: &[f64; N], h: f64) -> [f64; N] {
    let k1 = f(y);
    let k2 = f(&axpy(y, h, &[(0.5, &k1)]));
    let k3 = f(&axpy(y, h, &[(0.5, &k2)]));
    let k4 = f(&axpy(y, h, &[(1.0, &k3)]));
    axpy(y, h, &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)])
}

/// One Fehlberg step; returns the fifth-order solution and the embedded
/// error estimate.
fn rkf45_step<const N: usize>(
    f: &dyn Fn(&[f64; N]) -> [f64; N],
    y: &[f64; N],
    h: f64,
) -> ([f64; N], [f64; N]) {
    let k1 = f(y);
    let k2 = f(&axpy(y, h, &[(0.25, &k1)]));
    let k3 = f(&axpy(y, h, &[(3.0 / 32.0, &k1), (9.0 / 32.0, &k2)]));
    let k4 = f(&axpy(
        y,
        h,
        &[(1932.0 / 2197.0, &k1), (-7200.0 / 2197.0, &k2), (7296.0 / 2197.0, &k3)],
    ));
    let k5 = f(&axpy(
        y,
        h,
        &[
            (439.0 / 216.0, &k1),
            (-8.0, &k2),
            (3680.0 / 513.0, &k3),
            (-845.0 / 4104.0, &k4),
        ],
    ));
    let k6 = f(&axpy(
        y,
        h,
        &[
            (-8.0 / 27.0, &k1),
            (2.0, &k2),
            (-3544.0 / 2565.0, &k3),
            (1859.0 / 4104.0, &k4),
            (-11.0 / 40.0, &k5),
        ],
    ));
    let y5 = axpy(
        y,
        h,
        &[
            (16.0 / 135.0, &k1),
            (6656.0 / 12825.0, &k3),
            (28561.0 / 56430.0, &k4),
            (-9.0 / 50.0, &k5),
            (2.0 / 55.0, &k6),
        ],
    );
    // b5 - b4
    let err = axpy(
        &[0.0; N],
        h,
        &[
            (1.0 / 360.0, &k1),
            (-128.0 / 4275.0, &k3),
            (-2197.0 / 75240.0, &k4),
            (1.0 / 50.0, &k5),
            (2.0 / 55.0, &k6),
        ],
    );
    (y5, err)
}

/// Integrates from `(t0, y0)` toward `cfg.t_end`, calling `observe` on the
/// initial state and on every accepted state.
pub(crate) fn solve<const N: usize>(
    problem: &Problem<'_, N>,
    t0: f64,
    y0: [f64; N],
    cfg: &IntegratorConfig,
    mut observe: impl FnMut(f64, &[f64; N]),
) -> Result<Outcome<N>> {
    cfg.validate()?;
    let f = problem.rhs;
    observe(t0, &y0);
    let done = |termination, t, y, steps| Ok(Outcome { termination, t, y, steps });

    if let Some(term) = (problem.guard)(&y0) {
        return done(term, t0, y0, 0);
    }
    if f(&y0).iter().all(|&d| d == 0.0) {
        return done(Termination::FixedPointConverged, t0, y0, 0);
    }

    let dir = if cfg.t_end >= t0 { 1.0 } else { -1.0 };
    let span = (cfg.t_end - t0).abs();
    let end_eps = 1e-12 * span.max(1.0);
    let cap = cfg.max_step.unwrap_or(f64::INFINITY);
    let mut h = cfg.step.min(cap);
    let (mut t, mut y) = (t0, y0);
    let mut steps = 0;
    let mut stationary = 0;

    while steps < cfg.max_steps {
        let remaining = (cfg.t_end - t) * dir;
        if remaining <= end_eps {
            return done(Termination::ReachedTEnd, t, y, steps);
        }
        // stretch the last step rather than leave a round-off sliver
        let last = remaining <= h + end_eps;
        let h_try = if last { remaining } else { h };
        if h_try < MIN_STEP {
            return Err(Error::StepUnderflow { t, h: h_try });
        }

        let (trial, accept, next_h) = match cfg.method {
            Method::Rk4Fixed => {
                let trial = rk4_step(f, &y, dir * h_try);
                (trial, true, h)
            }
            Method::Rkf45Adaptive => {
                let (trial, err) = rkf45_step(f, &y, dir * h_try);
                let mut ratio: f64 = 0.0;
                for i in 0..N {
                    let scale = cfg.abs_tol + cfg.rel_tol * y[i].abs().max(trial[i].abs());
                    ratio = ratio.max(err[i].abs() / scale);
                }
                if !ratio.is_finite() {
                    (trial, false, 0.25 * h_try)
                } else {
                    let factor = if ratio == 0.0 {
                        5.0
                    } else {
                        (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    let accept = ratio <= 1.0;
                    // a step clipped to land on t_end says nothing about the next one
                    let next = if accept && h_try < h { h } else { h_try * factor };
                    (trial, accept, next.min(cap))
                }
            }
        };

        let valid = trial.iter().all(|x| x.is_finite()) && (problem.admissible)(&trial);
        if !valid {
            h = 0.5 * h_try;
            continue;
        }
        if !accept {
            h = next_h;
            continue;
        }

        t = if last { cfg.t_end } else { t + dir * h_try };
        y = trial;
        steps += 1;
        observe(t, &y);
        h = next_h;

        if let Some(term) = (problem.guard)(&y) {
            return done(term, t, y, steps);
        }
        let speed = norm(&f(&y));
        if speed < STATIONARY_TOL * (1.0 + norm(&y)) {
            stationary += 1;
            if stationary >= STATIONARY_STEPS {
                return done(Termination::FixedPointConverged, t, y, steps);
            }
        } else {
            stationary = 0;
        }
    }
    done(Termination::MaxSteps, t, y, steps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn always(_: &[f64; 1]) -> bool {
        true
    }

    fn never(_: &[f64; 1]) -> Option<Termination> {
        None
    }

    #[test]
    fn exponential_decay_rkf45() {
        let rhs = |y: &[f64; 1]| [-y[0]];
        let p = Problem { rhs: &rhs, admissible: &always, guard: &never };
        let cfg = IntegratorConfig::rkf45(1e-12, 3.0);
        let out = solve(&p, 0.0, [1.0], &cfg, |_, _| {}).unwrap();
        assert_eq!(out.termination, Termination::ReachedTEnd);
        assert!((out.t - 3.0).abs() < 1e-12);
        assert!((out.y[0] - (-3.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn backward_rk4() {
        let rhs = |y: &[f64; 1]| [y[0]];
        let p = Problem { rhs: &rhs, admissible: &always, guard: &never };
        let cfg = IntegratorConfig::rk4(1e-3, -2.0);
        let mut times = Vec::new();
        let out = solve(&p, 0.0, [1.0], &cfg, |t, _| times.push(t)).unwrap();
        assert!((out.y[0] - (-2.0f64).exp()).abs() < 1e-12);
        assert!(times.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn fixed_point_start_is_immediate() {
        let rhs = |_: &[f64; 1]| [0.0];
        let p = Problem { rhs: &rhs, admissible: &always, guard: &never };
        let mut n = 0;
        let out = solve(&p, 0.0, [3.0], &IntegratorConfig::default(), |_, _| n += 1).unwrap();
        assert_eq!(out.termination, Termination::FixedPointConverged);
        assert_eq!(n, 1);
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = IntegratorConfig { step: 0.0, ..IntegratorConfig::default() };
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
        let cfg = IntegratorConfig { max_steps: 0, ..IntegratorConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn max_steps_reported() {
        let rhs = |_: &[f64; 1]| [1.0];
        let p = Problem { rhs: &rhs, admissible: &always, guard: &never };
        let cfg = IntegratorConfig { max_steps: 5, ..IntegratorConfig::rk4(0.1, 10.0) };
        let out = solve(&p, 0.0, [0.0], &cfg, |_, _| {}).unwrap();
        assert_eq!(out.termination, Termination::MaxSteps);
        assert_eq!(out.steps, 5);
    }

    #[test]
    fn finite_time_blowup_underflows_without_ceiling() {
        let rhs = |y: &[f64; 1]| [y[0] * y[0] * y[0]];
        let p = Problem { rhs: &rhs, admissible: &always, guard: &never };
        let r = solve(&p, 0.0, [1.0], &IntegratorConfig::rkf45(1e-9, 1.0), |_, _| {});
        assert!(matches!(r, Err(Error::StepUnderflow { .. })));
    }
}
