//! The trajectory from the saddle `(0, -1)` to the flat point `(1, 0)`.
//!
//! It is the unstable manifold of the saddle inside the strip `0 < m2 < 1`
//! and can be written as a graph `m3 = f(m2)` with `f` increasing.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::integrator::{solve, IntegratorConfig, Problem, Termination};
use crate::flow::m_rhs_raw;

/// Series coefficients of `f` at `m2 = 0`, constant term first.
pub const TAYLOR_COEFFS: [f64; 8] = [
    -1.0,
    0.5,
    0.0,
    3.0 / 64.0,
    3.0 / 128.0,
    9.0 / 512.0,
    57.0 / 4096.0,
    1461.0 / 131072.0,
];

/// The series is only evaluated on `[0, SEED_RANGE_MAX]`.
pub const SEED_RANGE_MAX: f64 = 0.2;

fn taylor(x: f64) -> f64 {
    TAYLOR_COEFFS.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub fn separatrix_taylor_seed(m2: f64) -> Result<f64> {
    if !(0.0..=SEED_RANGE_MAX).contains(&m2) {
        return Err(Error::OutOfSeedRange(m2));
    }
    Ok(taylor(m2))
}

/// Near `(1, 0)` the curve satisfies `u = K (1 - v) / |v| * exp(2 / v)` to
/// leading order, with `u = 1 - m2` and `v = m3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct Tail {
    u_switch: f64,
    v_switch: f64,
}

impl Tail {
    fn ln_g(v: f64) -> f64 {
        (1.0 - v).ln() - (-v).ln() + 2.0 / v
    }

    fn u(&self, v: f64) -> f64 {
        if v >= 0.0 {
            return 0.0;
        }
        (self.u_switch.ln() + Self::ln_g(v) - Self::ln_g(self.v_switch)).exp()
    }

    /// Inverse of `u`, by bisection on `[v_switch, 0)`.
    fn v(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let (mut lo, mut hi) = (self.v_switch, 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            // u decreases toward 0 as v increases toward 0
            if self.u(mid) > u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Separatrix {
    /// Points `(m2, m3)` from the saddle end to the flat end.
    pub samples: Vec<(f64, f64)>,
    pub taylor_coeffs: [f64; 8],
    pub tol: f64,
    #[serde(skip)]
    seed_m2: f64,
    /// Integrated part, before the tail law takes over.
    #[serde(skip)]
    dense: Vec<[f64; 2]>,
    #[serde(skip)]
    tables: Tables,
    #[serde(skip)]
    tail: Tail,
}

/// Columns of the integrated part with their exact slopes.
#[derive(Debug, Clone, PartialEq, Default)]
struct Tables {
    m2: Vec<f64>,
    m3: Vec<f64>,
    dm3_dm2: Vec<f64>,
    dm2_dm3: Vec<f64>,
}

impl Tables {
    fn new(dense: &[[f64; 2]]) -> Self {
        let mut t = Tables::default();
        for p in dense {
            let [d2, d3] = m_rhs_raw(p[0], p[1]);
            t.m2.push(p[0]);
            t.m3.push(p[1]);
            t.dm3_dm2.push(d3 / d2);
            t.dm2_dm3.push(d2 / d3);
        }
        t
    }
}

/// Cubic Hermite interpolation on increasing `keys`.
fn hermite(keys: &[f64], vals: &[f64], slopes: &[f64], x: f64) -> f64 {
    let n = keys.len();
    let i = keys.partition_point(|&k| k <= x).clamp(1, n - 1) - 1;
    let (k0, k1) = (keys[i], keys[i + 1]);
    let h = k1 - k0;
    if h <= 0.0 {
        return vals[i];
    }
    let s = (x - k0) / h;
    let (s2, s3) = (s * s, s * s * s);
    (2.0 * s3 - 3.0 * s2 + 1.0) * vals[i]
        + (s3 - 2.0 * s2 + s) * h * slopes[i]
        + (-2.0 * s3 + 3.0 * s2) * vals[i + 1]
        + (s3 - s2) * h * slopes[i + 1]
}

impl Separatrix {
    pub fn seed_m2(&self) -> f64 {
        self.seed_m2
    }

    /// `f(m2)` for `m2` in `[0, 1]`.
    pub fn m3_at(&self, m2: f64) -> f64 {
        if m2 <= self.seed_m2 {
            return taylor(m2.max(0.0));
        }
        let last = self.dense[self.dense.len() - 1];
        if m2 <= last[0] {
            let t = &self.tables;
            return hermite(&t.m2, &t.m3, &t.dm3_dm2, m2);
        }
        self.tail.v(1.0 - m2)
    }

    /// `f^{-1}(m3)` for `m3` in `[-1, 0]`.
    pub fn m2_at(&self, m3: f64) -> f64 {
        let first = self.dense[0];
        if m3 <= first[1] {
            let (mut lo, mut hi) = (0.0, self.seed_m2);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if taylor(mid) < m3 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        if m3 <= self.tail.v_switch {
            let t = &self.tables;
            return hermite(&t.m3, &t.m2, &t.dm2_dm3, m3);
        }
        1.0 - self.tail.u(m3)
    }

    /// Where `(m2, m3)` sits relative to the curve: `Less` means below.
    pub fn side(&self, m2: f64, m3: f64) -> Ordering {
        m3.total_cmp(&self.m3_at(m2.clamp(0.0, 1.0)))
    }

    /// Approximate distance to the curve, from the vertical and horizontal
    /// offsets (exact for a locally straight curve).
    pub fn distance(&self, m2: f64, m3: f64) -> f64 {
        let dv = (m3 - self.m3_at(m2.clamp(0.0, 1.0))).abs();
        if !(-1.0..=0.0).contains(&m3) {
            return dv;
        }
        let dh = (m2 - self.m2_at(m3)).abs();
        if dv == 0.0 || dh == 0.0 {
            return 0.0;
        }
        dv * dh / dv.hypot(dh)
    }
}

fn pick_by_arclength(points: &[[f64; 2]], n: usize) -> Vec<(f64, f64)> {
    let mut cum = vec![0.0];
    for w in points.windows(2) {
        let d = (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
        cum.push(cum.last().unwrap() + d);
    }
    let total = *cum.last().unwrap();
    let len = points.len();
    let mut idx = Vec::with_capacity(n);
    for j in 0..n {
        let target = total * j as f64 / (n - 1) as f64;
        let mut i = cum.partition_point(|&c| c < target).min(len - 1);
        if let Some(&prev) = idx.last() {
            i = i.max(prev + 1);
        }
        idx.push(i.min(len - (n - j)));
    }
    idx.into_iter().map(|i| (points[i][0], points[i][1])).collect()
}

/// Traces the curve by seeding on the series very close to the saddle and
/// integrating forward, then resamples `n_samples` points evenly in
/// arclength.
pub fn trace_separatrix(n_samples: usize, tol: f64) -> Result<Separatrix> {
    if n_samples < 16 {
        return Err(Error::InvalidConfig("at least 16 separatrix samples are required".into()));
    }
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::InvalidConfig("separatrix tolerance must lie in (0, 1e-3]".into()));
    }
    let int_tol = tol.max(1e-13);
    let seed_m2 = tol.clamp(1e-12, 1e-7);
    // below a few integration tolerances 1 - m2 is noise, so hand over to the tail law
    let u_switch = (1e-3 * tol).max(10.0 * int_tol);
    let y0 = [seed_m2, taylor(seed_m2)];

    let rhs = |y: &[f64; 2]| m_rhs_raw(y[0], y[1]);
    let admissible = |_: &[f64; 2]| true;
    let guard = |y: &[f64; 2]| {
        if !(y[0] > 0.0 && y[0] <= 1.0 && y[1] >= -1.0 && y[1] < 0.0) {
            Some(Termination::BlowUpCeiling)
        } else if 1.0 - y[0] < u_switch {
            Some(Termination::StopCondition)
        } else {
            None
        }
    };
    let problem = Problem { rhs: &rhs, admissible: &admissible, guard: &guard };

    let mut max_step = 5e-3;
    loop {
        let cfg = IntegratorConfig {
            max_step: Some(max_step),
            ..IntegratorConfig::rkf45(int_tol, 1e4)
        };
        let mut dense: Vec<[f64; 2]> = Vec::new();
        let out = solve(&problem, 0.0, y0, &cfg, |_, y| dense.push(*y))?;
        if out.termination != Termination::StopCondition {
            return Err(Error::TraceDiverged(format!(
                "integration ended with {:?} at ({}, {})",
                out.termination, out.y[0], out.y[1]
            )));
        }
        for w in dense.windows(2) {
            if !(w[1][1] > w[0][1] && w[1][0] >= w[0][0]) {
                return Err(Error::TraceDiverged(format!(
                    "monotonicity lost between {:?} and {:?}",
                    w[0], w[1]
                )));
            }
        }

        let last = dense[dense.len() - 1];
        let tail = Tail { u_switch: 1.0 - last[0], v_switch: last[1] };
        let mut all = dense.clone();
        let v_end = -0.5 * tol;
        let mut v = last[1];
        loop {
            v = (v + 1e-3).min(0.95 * v);
            if v >= v_end {
                break;
            }
            all.push([1.0 - tail.u(v), v]);
        }
        all.push([1.0 - tail.u(v_end), v_end]);

        if all.len() >= 4 * n_samples {
            let samples = pick_by_arclength(&all, n_samples);
            return Ok(Separatrix {
                samples,
                taylor_coeffs: TAYLOR_COEFFS,
                tol,
                seed_m2,
                tables: Tables::new(&dense),
                dense,
                tail,
            });
        }
        max_step *= 0.25;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_values() {
        assert_eq!(separatrix_taylor_seed(0.0).unwrap(), -1.0);
        assert!((separatrix_taylor_seed(0.1).unwrap() + 0.9499505904380798).abs() < 1e-15);
        assert!((separatrix_taylor_seed(0.2).unwrap() + 0.8995808416992187).abs() < 1e-15);
        assert_eq!(separatrix_taylor_seed(0.3), Err(Error::OutOfSeedRange(0.3)));
    }

    #[test]
    fn traced_curve_matches_series() {
        let sep = trace_separatrix(256, 1e-10).unwrap();
        assert_eq!(sep.samples.len(), 256);
        for x in [0.05, 0.1, 0.15, 0.2] {
            let err = (sep.m3_at(x) - taylor(x)).abs();
            assert!(err < 1e-6, "{x}: {err}");
        }
        assert!(sep.samples.windows(2).all(|w| w[1].1 > w[0].1 && w[1].0 >= w[0].0));
        let (a, b) = (sep.samples[0], *sep.samples.last().unwrap());
        assert!(a.0.hypot(a.1 + 1.0) < 1e-6);
        assert!((b.0 - 1.0).hypot(b.1) < 1e-6);
    }

    #[test]
    fn inverse_and_side() {
        let sep = trace_separatrix(64, 1e-10).unwrap();
        let f = sep.m3_at(0.5);
        assert!((f + 0.74176).abs() < 1e-4, "{f}");
        assert!((sep.m2_at(f) - 0.5).abs() < 1e-9);
        assert_eq!(sep.side(0.5, -0.95), Ordering::Less);
        assert_eq!(sep.side(0.5, -0.5), Ordering::Greater);
        assert!(sep.distance(0.5, f) < 1e-12);
        // deep in the tail the two lookups invert each other
        let m2 = 1.0 - 1e-14;
        let g = sep.m3_at(m2);
        assert!(g < 0.0 && g > sep.tail.v_switch);
        assert!((sep.m2_at(g) - m2).abs() < 1e-16);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(matches!(trace_separatrix(8, 1e-10), Err(Error::InvalidConfig(_))));
        assert!(trace_separatrix(64, 0.0).is_err());
    }
}
