//! Long-time behaviour of the metric flow on SL2(R) and E(2).
//!
//! On SL2(R) two metric coefficients grow like `2t` and the third tends to
//! a constant. On E(2) with brackets `(l, l, 0)` the flow converges to a
//! flat metric: `q1, q2 -> E1`, `q3 -> E2`, and `q1 - q2 ~ E4 exp(-E3 t)`.
//! Rescaling the metric by `exp(-E3 t)` makes `|D Rc|^2` grow like
//! `exp(E3 t)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{classify, constants_from_parts, structure_constants_from_metric, BianchiClass, MetricState};
use crate::curvature::profile_raw;
use crate::error::{Error, Result};
use crate::flow::{integrate, FlowFormulation, InitialState, IntegratorConfig, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FitModel {
    LinearGrowth,
    ConstantLimit,
    ExponentialDecay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub quantity: String,
    pub model: FitModel,
    pub constants: BTreeMap<String, f64>,
    /// RMS residual of the fit (log-space for exponentials, relative for
    /// the others).
    pub residual: f64,
}

impl AsymptoticFit {
    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.get(name).copied()
    }
}

/// Fraction of the usable window treated as transient.
const TRANSIENT: f64 = 0.2;
/// Differences below this fraction of the metric scale are round-off.
const NOISE_FLOOR: f64 = 1e-9;

/// Ordinary least squares `y = slope * x + intercept`; returns
/// `(slope, intercept, rms residual)`.
fn line_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    (slope, intercept, (ss / n).sqrt())
}

fn constants(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

fn run(s0: &MetricState, cfg: &IntegratorConfig) -> Result<Trajectory> {
    integrate(FlowFormulation::QFlow, &InitialState::Metric(*s0), cfg)
}

fn signs(s0: &MetricState) -> [i8; 3] {
    let a = structure_constants_from_metric(s0);
    let cutoff = crate::algebra::DEFAULT_ZERO_THRESHOLD * a.max_abs();
    a.as_array().map(|x| if x.abs() < cutoff { 0 } else if x > 0.0 { 1 } else { -1 })
}

fn wrong_class(expected: &str, found: BianchiClass) -> Error {
    Error::WrongClass { expected: expected.into(), found: found.to_string() }
}

/// Samples after the initial transient.
fn tail_window(tr: &Trajectory) -> &[crate::flow::Sample] {
    let t0 = tr.samples[0].t;
    let t_cut = t0 + TRANSIENT * (tr.last().t - t0);
    let start = tr.samples.partition_point(|s| s.t < t_cut);
    &tr.samples[start.min(tr.samples.len() - 1)..]
}

fn constant_fit(name: &str, tag: &str, values: &[f64]) -> AsymptoticFit {
    let limit = *values.last().unwrap();
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    AsymptoticFit {
        quantity: name.into(),
        model: FitModel::ConstantLimit,
        constants: constants(&[(tag, limit)]),
        residual: (hi - lo) / limit.abs().max(f64::MIN_POSITIVE),
    }
}

/// The E(2) pair indices and the decaying combination `|l_i| q_i - |l_j| q_j`.
struct E2Frame {
    pair: (usize, usize),
    flat_axis: usize,
    weights: (f64, f64),
}

impl E2Frame {
    fn new(s0: &MetricState) -> Self {
        let k = signs(s0).iter().position(|&s| s == 0).expect("E(2) has one zero constant");
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let (i, j) = (i.min(j), i.max(j));
        E2Frame { pair: (i, j), flat_axis: k, weights: (s0.lambda[i].abs(), s0.lambda[j].abs()) }
    }

    fn diff(&self, q: &[f64]) -> f64 {
        self.weights.0 * q[self.pair.0] - self.weights.1 * q[self.pair.1]
    }

    fn diff_name(&self) -> String {
        let (i, j) = (self.pair.0 + 1, self.pair.1 + 1);
        if self.weights.0 == self.weights.1 {
            format!("q{i}-q{j}")
        } else {
            format!("|l{i}|q{i}-|l{j}|q{j}")
        }
    }

    /// Samples where the difference is still above round-off, minus the
    /// transient.
    fn usable<'a>(&self, tr: &'a Trajectory) -> &'a [crate::flow::Sample] {
        let scale = |q: &[f64]| q.iter().cloned().fold(0.0, f64::max);
        let end = tr
            .samples
            .iter()
            .position(|s| self.diff(&s.state).abs() <= NOISE_FLOOR * scale(&s.state))
            .unwrap_or(tr.samples.len());
        let live = &tr.samples[..end];
        if live.len() < 8 {
            return &[];
        }
        let t0 = live[0].t;
        let t_cut = t0 + TRANSIENT * (live[live.len() - 1].t - t0);
        let start = live.partition_point(|s| s.t < t_cut);
        &live[start..]
    }
}

/// Integrates the metric flow and fits the long-time model for its class.
pub fn fit_asymptotics(s0: &MetricState, cfg: &IntegratorConfig) -> Result<Vec<AsymptoticFit>> {
    let a = structure_constants_from_metric(s0);
    match classify(&a) {
        BianchiClass::SL2R => {
            let sg = signs(s0);
            let pos = sg.iter().filter(|&&s| s > 0).count();
            let odd_sign = if pos == 1 { 1 } else { -1 };
            let odd = sg.iter().position(|&s| s == odd_sign).expect("mixed signs");
            let tr = run(s0, cfg)?;
            let window = tail_window(&tr);
            let ts: Vec<f64> = window.iter().map(|s| s.t).collect();
            let end = tr.last();
            let mut out = Vec::new();
            for i in (0..3).filter(|&i| i != odd) {
                let qs: Vec<f64> = window.iter().map(|s| s.state[i]).collect();
                let (slope, intercept, rms) = line_fit(&ts, &qs);
                out.push(AsymptoticFit {
                    quantity: format!("q{}", i + 1),
                    model: FitModel::LinearGrowth,
                    constants: constants(&[
                        ("slope", slope),
                        ("intercept", intercept),
                        ("ratio_at_end", end.state[i] / end.t),
                    ]),
                    residual: rms / end.state[i].abs(),
                });
            }
            let qs: Vec<f64> = window.iter().map(|s| s.state[odd]).collect();
            out.push(constant_fit(&format!("q{}", odd + 1), "limit", &qs));
            Ok(out)
        }
        BianchiClass::E2 => {
            let frame = E2Frame::new(s0);
            let tr = run(s0, cfg)?;
            let window = tail_window(&tr);
            let (i, j) = frame.pair;
            let k = frame.flat_axis;
            let col = |c: usize| window.iter().map(|s| s.state[c]).collect::<Vec<_>>();
            let mut out = vec![
                constant_fit(&format!("q{}", i + 1), "E1", &col(i)),
                constant_fit(&format!("q{}", j + 1), "E1", &col(j)),
                constant_fit(&format!("q{}", k + 1), "E2", &col(k)),
            ];
            let usable = frame.usable(&tr);
            if usable.is_empty() {
                let diffs: Vec<f64> = tr.samples.iter().map(|s| frame.diff(&s.state)).collect();
                out.push(AsymptoticFit {
                    quantity: frame.diff_name(),
                    model: FitModel::ConstantLimit,
                    constants: constants(&[("limit", *diffs.last().unwrap())]),
                    residual: 0.0,
                });
            } else {
                let ts: Vec<f64> = usable.iter().map(|s| s.t).collect();
                let ls: Vec<f64> = usable.iter().map(|s| frame.diff(&s.state).abs().ln()).collect();
                let (slope, intercept, rms) = line_fit(&ts, &ls);
                out.push(AsymptoticFit {
                    quantity: frame.diff_name(),
                    model: FitModel::ExponentialDecay,
                    constants: constants(&[("E3", -slope), ("E4", intercept.exp())]),
                    residual: rms,
                });
            }
            Ok(out)
        }
        other => Err(wrong_class("SL2R or E2", other)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    /// Fitted exponential growth rate of the rescaled `|D Rc|^2`.
    pub rate: f64,
    /// Decay rate of the metric difference used for the rescaling.
    pub e3: f64,
    pub relative_error: f64,
    pub residual: f64,
    pub samples_used: usize,
}

/// Fits the growth of `|D Rc|^2` along the flow after rescaling the metric
/// by `exp(-E3 t)`, which multiplies `|D Rc|^2` by `exp(3 E3 t)`.
pub fn rescaled_drc_growth(s0: &MetricState, cfg: &IntegratorConfig) -> Result<GrowthReport> {
    let class = classify(&structure_constants_from_metric(s0));
    if class != BianchiClass::E2 {
        return Err(wrong_class("E2", class));
    }
    if profile_raw(&s0.raw_constants()).d_ricci_norm_sq == 0.0 {
        return Err(Error::DegenerateFlat);
    }
    let frame = E2Frame::new(s0);
    let tr = run(s0, cfg)?;
    let usable = frame.usable(&tr);
    if usable.len() < 8 {
        return Err(Error::DegenerateFlat);
    }
    let ts: Vec<f64> = usable.iter().map(|s| s.t).collect();
    let ls: Vec<f64> = usable.iter().map(|s| frame.diff(&s.state).abs().ln()).collect();
    let e3 = -line_fit(&ts, &ls).0;

    let mut xs = Vec::with_capacity(usable.len());
    let mut ys = Vec::with_capacity(usable.len());
    for s in usable {
        let q = [s.state[0], s.state[1], s.state[2]];
        let drc = profile_raw(&constants_from_parts(&s0.lambda, &q)).d_ricci_norm_sq;
        if drc > 0.0 {
            xs.push(s.t);
            ys.push(drc.ln() + 3.0 * e3 * s.t);
        }
    }
    let (rate, _, residual) = line_fit(&xs, &ys);
    Ok(GrowthReport {
        rate,
        e3,
        relative_error: (rate - e3).abs() / e3.abs(),
        residual,
        samples_used: xs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(lambda: [f64; 3], q: [f64; 3]) -> MetricState {
        MetricState::new(lambda, q).unwrap()
    }

    fn find<'a>(fits: &'a [AsymptoticFit], q: &str) -> &'a AsymptoticFit {
        fits.iter().find(|f| f.quantity == q).unwrap()
    }

    #[test]
    fn line_fit_exact() {
        let (m, b, r) = line_fit(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
        assert!((m - 2.0).abs() < 1e-15 && (b - 1.0).abs() < 1e-15 && r < 1e-15);
    }

    #[test]
    fn e2_limits() {
        let fits = fit_asymptotics(&ms([1.0, 1.0, 0.0], [2.0, 1.0, 1.0]), &IntegratorConfig::rkf45(1e-10, 40.0))
            .unwrap();
        // q1 q2 is conserved, so both tend to sqrt(2)
        assert!((find(&fits, "q1").constant("E1").unwrap() - 2f64.sqrt()).abs() < 1e-6);
        let q3 = find(&fits, "q3").constant("E2").unwrap();
        assert!((q3 - 1.06066).abs() < 1e-4, "{q3}");
        let d = find(&fits, "q1-q2");
        assert_eq!(d.model, FitModel::ExponentialDecay);
        // linearized rate 4 l^2 / q3
        let rate = d.constant("E3").unwrap();
        assert!((rate - 4.0 / q3).abs() / rate < 0.01, "{rate}");
    }

    #[test]
    fn e2_flat_is_constant() {
        let fits = fit_asymptotics(&ms([1.0, 1.0, 0.0], [1.0; 3]), &IntegratorConfig::rkf45(1e-10, 10.0)).unwrap();
        assert_eq!(find(&fits, "q1-q2").model, FitModel::ConstantLimit);
        assert_eq!(
            rescaled_drc_growth(&ms([1.0, 1.0, 0.0], [1.0; 3]), &IntegratorConfig::default()),
            Err(Error::DegenerateFlat)
        );
    }

    #[test]
    fn wrong_class_rejected() {
        let r = fit_asymptotics(&ms([1.0; 3], [1.0; 3]), &IntegratorConfig::default());
        assert!(matches!(r, Err(Error::WrongClass { .. })));
    }

    #[test]
    fn growth_rate_tracks_decay() {
        let r = rescaled_drc_growth(&ms([1.0, 1.0, 0.0], [2.0, 1.0, 1.0]), &IntegratorConfig::rkf45(1e-10, 40.0))
            .unwrap();
        assert!(r.relative_error < 0.1, "{r:?}");
    }
}
