//! Ricci flow of three-dimensional unimodular metric Lie algebras.
//!
//! Three equivalent formulations are provided:
//!
//! * `QFlow`: brackets `lambda` fixed, diagonal metric `q` evolves by
//!   `d log q1/dt = -a1^2 + (a2 - a3)^2` and cyclically.
//! * `AFlow`: the Milnor-frame constants evolve by `da_i/dt = 2 K(e_j^e_k) a_i`.
//! * `MFlow*`: the projective ratios `m = (a2/a1, a3/a1)`, either with the
//!   physical time (`MFlowScaled`, carrying `a1^2` along) or in the
//!   reparametrized autonomous form (`MFlowAutonomous`).

pub mod integrator;

use serde::{Deserialize, Serialize};

use crate::algebra::{constants_from_parts, MetricState, StructureConstants};
use crate::curvature::{mu_raw, sectional_raw};
use crate::error::{Error, Result};
pub use integrator::{IntegratorConfig, Method, Termination};
use integrator::{solve, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlowFormulation {
    QFlow,
    AFlow,
    MFlowScaled,
    MFlowAutonomous,
}

impl FlowFormulation {
    pub fn state_labels(&self) -> &'static [&'static str] {
        match self {
            FlowFormulation::QFlow => &["q1", "q2", "q3"],
            FlowFormulation::AFlow => &["a1", "a2", "a3"],
            FlowFormulation::MFlowScaled => &["m2", "m3", "a1_sq"],
            FlowFormulation::MFlowAutonomous => &["m2", "m3"],
        }
    }
}

fn q_rhs_raw(lambda: &[f64; 3], q: &[f64; 3]) -> [f64; 3] {
    let [a1, a2, a3] = constants_from_parts(lambda, q);
    [
        q[0] * (-a1 * a1 + (a2 - a3).powi(2)),
        q[1] * (-a2 * a2 + (a3 - a1).powi(2)),
        q[2] * (-a3 * a3 + (a1 - a2).powi(2)),
    ]
}

pub fn q_flow_rhs(s: &MetricState) -> [f64; 3] {
    q_rhs_raw(&s.lambda, &s.q)
}

pub(crate) fn a_rhs_raw(a: &[f64; 3]) -> [f64; 3] {
    let k = sectional_raw(&mu_raw(a));
    [2.0 * k[0] * a[0], 2.0 * k[1] * a[1], 2.0 * k[2] * a[2]]
}

pub fn a_flow_rhs(a: &StructureConstants) -> [f64; 3] {
    a_rhs_raw(&a.as_array())
}

/// Right-hand side of the autonomous system.
pub(crate) fn m_rhs_raw(m2: f64, m3: f64) -> [f64; 2] {
    [
        m2 * (1.0 - m2) * (1.0 + m2 - m3),
        m3 * (1.0 - m3) * (1.0 - m2 + m3),
    ]
}

/// `(dm2/dt, dm3/dt)`. In physical time the ratios move at `2 a1^2` times
/// the autonomous field; `a1_sq` is ignored when `autonomous` is set.
pub fn m_flow_rhs(p: (f64, f64), a1_sq: f64, autonomous: bool) -> (f64, f64) {
    let [d2, d3] = m_rhs_raw(p.0, p.1);
    let s = if autonomous { 1.0 } else { 2.0 * a1_sq };
    (s * d2, s * d3)
}

/// `K(e2^e3)` for `a = (1, m2, m3)`.
fn k23_unit(m2: f64, m3: f64) -> f64 {
    sectional_raw(&mu_raw(&[1.0, m2, m3]))[0]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum InitialState {
    Metric(MetricState),
    Constants(StructureConstants),
    Moduli { m2: f64, m3: f64 },
    ScaledModuli { m2: f64, m3: f64, a1_sq: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub formulation: FlowFormulation,
    /// Fixed brackets for `QFlow`, absent otherwise.
    pub lambda: Option<[f64; 3]>,
    pub samples: Vec<Sample>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("a trajectory always holds its initial sample")
    }
}

fn run<const N: usize>(
    formulation: FlowFormulation,
    lambda: Option<[f64; 3]>,
    problem: Problem<'_, N>,
    t0: f64,
    y0: [f64; N],
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    let mut samples = Vec::new();
    let out = solve(&problem, t0, y0, cfg, |t, y| {
        samples.push(Sample { t, state: y.to_vec() })
    })?;
    Ok(Trajectory { formulation, lambda, samples, termination: out.termination })
}

fn mismatch(f: FlowFormulation, init: &InitialState) -> Error {
    Error::InvalidState(format!("{f:?} cannot start from {init:?}"))
}

/// Integrates one formulation from `init` until `cfg.t_end` or a guard
/// fires. `t_end` below the start time integrates backward.
pub fn integrate(
    formulation: FlowFormulation,
    init: &InitialState,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    cfg.validate()?;
    let ceiling = cfg.m_ceiling;
    let above = move |y: &[f64]| y.iter().any(|x| x.abs() > ceiling);
    match (formulation, *init) {
        (FlowFormulation::QFlow, InitialState::Metric(s)) => {
            let lambda = s.lambda;
            let rhs = move |q: &[f64; 3]| q_rhs_raw(&lambda, q);
            let admissible = move |q: &[f64; 3]| {
                q.iter().all(|&x| x > 0.0)
                    && constants_from_parts(&lambda, q).iter().all(|x| x.is_finite())
            };
            let floor = cfg.q_floor;
            let guard = move |q: &[f64; 3]| {
                (q.iter().cloned().fold(f64::INFINITY, f64::min) < floor)
                    .then_some(Termination::ExtinctionFloor)
            };
            let p = Problem { rhs: &rhs, admissible: &admissible, guard: &guard };
            run(formulation, Some(lambda), p, s.t, s.q, cfg)
        }
        (FlowFormulation::AFlow, InitialState::Constants(a)) => {
            let guard = move |y: &[f64; 3]| above(y).then_some(Termination::BlowUpCeiling);
            let p = Problem { rhs: &a_rhs_raw, admissible: &|_| true, guard: &guard };
            run(formulation, None, p, 0.0, a.as_array(), cfg)
        }
        (FlowFormulation::MFlowAutonomous, InitialState::Moduli { m2, m3 }) => {
            check_finite(&[m2, m3])?;
            let rhs = |y: &[f64; 2]| m_rhs_raw(y[0], y[1]);
            let guard = move |y: &[f64; 2]| above(y).then_some(Termination::BlowUpCeiling);
            let p = Problem { rhs: &rhs, admissible: &|_| true, guard: &guard };
            run(formulation, None, p, 0.0, [m2, m3], cfg)
        }
        (FlowFormulation::MFlowScaled, InitialState::ScaledModuli { m2, m3, a1_sq }) => {
            check_finite(&[m2, m3, a1_sq])?;
            if a1_sq <= 0.0 {
                return Err(Error::InvalidState("a1_sq must be positive".into()));
            }
            let rhs = |y: &[f64; 3]| {
                let [m2, m3, s] = *y;
                let [d2, d3] = m_rhs_raw(m2, m3);
                [2.0 * s * d2, 2.0 * s * d3, 4.0 * s * s * k23_unit(m2, m3)]
            };
            let admissible = |y: &[f64; 3]| y[2] > 0.0;
            let guard = move |y: &[f64; 3]| above(y).then_some(Termination::BlowUpCeiling);
            let p = Problem { rhs: &rhs, admissible: &admissible, guard: &guard };
            run(formulation, None, p, 0.0, [m2, m3, a1_sq], cfg)
        }
        (f, init) => Err(mismatch(f, &init)),
    }
}

fn check_finite(v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("initial state"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    /// Max-norm residual between finite-differenced ratios and the scaled field.
    pub max_residual: f64,
    pub samples_checked: usize,
    /// Samples skipped because the flow was too close to extinction for the
    /// step to resolve it.
    pub samples_excluded: usize,
    pub termination: Termination,
}

/// Samples whose extinction time scale is below this many steps are not
/// differenced.
const RESOLUTION_STEPS: f64 = 50.0;

/// Integrates the metric flow with fixed-step RK4 at `cfg.step`, maps every
/// sample to `(a2/a1, a3/a1)`, and compares a five-point centered
/// difference of those ratios with the scaled ratio field.
pub fn cross_check_formulations(s0: &MetricState, cfg: &IntegratorConfig) -> Result<CrossCheckReport> {
    if s0.lambda[0] == 0.0 {
        return Err(Error::ChartUndefined);
    }
    let cfg = IntegratorConfig { method: Method::Rk4Fixed, ..*cfg };
    let traj = integrate(FlowFormulation::QFlow, &InitialState::Metric(*s0), &cfg)?;
    let lambda = s0.lambda;

    let mut ratios = Vec::with_capacity(traj.samples.len());
    let mut a1_sq = Vec::with_capacity(traj.samples.len());
    for s in &traj.samples {
        let q = [s.state[0], s.state[1], s.state[2]];
        let a = constants_from_parts(&lambda, &q);
        if a[0] == 0.0 {
            return Err(Error::ChartUndefined);
        }
        ratios.push([a[1] / a[0], a[2] / a[0]]);
        a1_sq.push(a[0] * a[0]);
    }

    let h = cfg.step;
    let uniform = |w: &[Sample]| {
        w.windows(2).all(|p| ((p[1].t - p[0].t).abs() - h).abs() <= 1e-9 * h)
    };
    let (mut max_residual, mut checked, mut excluded) = (0.0_f64, 0, 0);
    for i in 2..traj.samples.len().saturating_sub(2) {
        let window = &traj.samples[i - 2..=i + 2];
        if !uniform(window) {
            excluded += 1;
            continue;
        }
        let q = [window[2].state[0], window[2].state[1], window[2].state[2]];
        let dq = q_rhs_raw(&lambda, &q);
        let tau = (0..3)
            .map(|k| if dq[k] == 0.0 { f64::INFINITY } else { q[k] / dq[k].abs() })
            .fold(f64::INFINITY, f64::min);
        if tau < RESOLUTION_STEPS * h {
            excluded += 1;
            continue;
        }
        let dt = window[3].t - window[2].t;
        let (r, c) = (&ratios[i - 2..=i + 2], ratios[i]);
        let (e2, e3) = m_flow_rhs((c[0], c[1]), a1_sq[i], false);
        let expected = [e2, e3];
        for k in 0..2 {
            let fd = (r[0][k] - 8.0 * r[1][k] + 8.0 * r[3][k] - r[4][k]) / (12.0 * dt);
            max_residual = max_residual.max((fd - expected[k]).abs());
        }
        checked += 1;
    }
    Ok(CrossCheckReport {
        max_residual,
        samples_checked: checked,
        samples_excluded: excluded,
        termination: traj.termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(lambda: [f64; 3], q: [f64; 3]) -> MetricState {
        MetricState::new(lambda, q).unwrap()
    }

    #[test]
    fn q_rhs_examples() {
        assert_eq!(q_flow_rhs(&ms([1.0, 0.0, 0.0], [1.0; 3])), [-1.0, 1.0, 1.0]);
        assert_eq!(q_flow_rhs(&ms([1.0; 3], [1.0; 3])), [-1.0, -1.0, -1.0]);
        assert_eq!(q_flow_rhs(&ms([1.0, 1.0, 0.0], [1.0; 3])), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn a_rhs_examples() {
        let a = |x, y, z| StructureConstants::new(x, y, z).unwrap();
        assert_eq!(a_flow_rhs(&a(1.0, 1.0, 0.0)), [0.0, 0.0, 0.0]);
        assert_eq!(a_flow_rhs(&a(1.0, 1.0, 1.0)), [0.5, 0.5, 0.5]);
        assert_eq!(a_flow_rhs(&a(1.0, 0.0, 0.0)), [-1.5, 0.0, 0.0]);
    }

    #[test]
    fn m_rhs_examples() {
        assert_eq!(m_flow_rhs((0.5, 0.0), 0.0, true), (0.375, 0.0));
        assert_eq!(m_flow_rhs((1.0, 1.0), 0.0, true), (0.0, 0.0));
        assert_eq!(m_flow_rhs((0.5, -0.5), 0.0, true), (0.5, 0.0));
        assert_eq!(m_flow_rhs((0.5, 0.0), 2.0, false), (1.5, 0.0));
    }

    #[test]
    fn fixed_points_are_exact_zeros() {
        for (m2, m3) in [(0.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 0.0), (-1.0, 0.0), (1.0, 1.0)] {
            assert_eq!(m_rhs_raw(m2, m3), [0.0, 0.0]);
        }
    }

    #[test]
    fn autonomous_reaches_p4() {
        for start in [(0.5, 0.5), (0.5, 0.2)] {
            let init = InitialState::Moduli { m2: start.0, m3: start.1 };
            let cfg = IntegratorConfig::default().with_t_end(50.0);
            let tr = integrate(FlowFormulation::MFlowAutonomous, &init, &cfg).unwrap();
            let s = &tr.last().state;
            assert!((s[0] - 1.0).abs() < 1e-6 && (s[1] - 1.0).abs() < 1e-6, "{s:?}");
        }
    }

    #[test]
    fn flat_metric_is_constant() {
        let init = InitialState::Metric(ms([1.0, 1.0, 0.0], [1.0; 3]));
        let tr = integrate(FlowFormulation::QFlow, &init, &IntegratorConfig::default()).unwrap();
        assert_eq!(tr.termination, Termination::FixedPointConverged);
        assert!(tr.samples.iter().all(|s| s.state == vec![1.0, 1.0, 1.0]));
    }

    #[test]
    fn round_sphere_goes_extinct() {
        let init = InitialState::Metric(ms([1.0; 3], [1.0; 3]));
        let cfg = IntegratorConfig::default().with_t_end(5.0);
        let tr = integrate(FlowFormulation::QFlow, &init, &cfg).unwrap();
        assert_eq!(tr.termination, Termination::ExtinctionFloor);
        assert!(tr.last().t < 1.0);
    }

    #[test]
    fn formulation_mismatch() {
        let init = InitialState::Moduli { m2: 0.5, m3: 0.5 };
        let r = integrate(FlowFormulation::QFlow, &init, &IntegratorConfig::default());
        assert!(matches!(r, Err(Error::InvalidState(_))));
    }

    fn segment_distance(a: &[f64], b: &[f64], p: &[f64]) -> f64 {
        let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
        let len2 = dx * dx + dy * dy;
        let t = if len2 > 0.0 {
            (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        (a[0] + t * dx - p[0]).hypot(a[1] + t * dy - p[1])
    }

    #[test]
    fn scaled_and_autonomous_trace_the_same_curve() {
        let cfg = IntegratorConfig::rkf45(1e-11, 3.0);
        let scaled = integrate(
            FlowFormulation::MFlowScaled,
            &InitialState::ScaledModuli { m2: 0.5, m3: -0.6, a1_sq: 1.0 },
            &cfg,
        )
        .unwrap();
        let auto = integrate(
            FlowFormulation::MFlowAutonomous,
            &InitialState::Moduli { m2: 0.5, m3: -0.6 },
            &IntegratorConfig { max_step: Some(1e-3), ..cfg.with_t_end(40.0) },
        )
        .unwrap();
        for s in &scaled.samples {
            let d = auto
                .samples
                .windows(2)
                .map(|w| segment_distance(&w[0].state, &w[1].state, &s.state))
                .fold(f64::INFINITY, f64::min);
            assert!(d < 1e-6, "{d}");
        }
    }

    #[test]
    fn cross_check_fixed_point_is_zero() {
        let r = cross_check_formulations(&ms([1.0, 1.0, 0.0], [1.0; 3]), &IntegratorConfig::rk4(1e-3, 1.0))
            .unwrap();
        assert_eq!(r.max_residual, 0.0);
    }

    #[test]
    fn cross_check_requires_chart() {
        let r = cross_check_formulations(&ms([0.0, 1.0, 1.0], [1.0; 3]), &IntegratorConfig::rk4(1e-3, 1.0));
        assert_eq!(r, Err(Error::ChartUndefined));
    }
}
