//! Decomposition of the fundamental domain into fixed points, invariant
//! curves and open basins, each with its limits in both time directions.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{FixedPoint, Separatrix};
use crate::error::{Error, Result};
use crate::flow::{integrate, FlowFormulation, InitialState, IntegratorConfig, Termination, Trajectory};
use crate::moduli::{reduce, ModuliPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionTag {
    P1,
    P2,
    P3,
    P4,
    T12,
    T13,
    T13p,
    T14,
    T23,
    T34,
    B14,
    B13,
    B13p,
}

impl RegionTag {
    /// `(alpha, omega)` limits.
    pub fn limits(&self) -> (FixedPoint, FixedPoint) {
        use FixedPoint::*;
        match self {
            RegionTag::P1 => (P1, P1),
            RegionTag::P2 => (P2, P2),
            RegionTag::P3 => (P3, P3),
            RegionTag::P4 => (P4, P4),
            RegionTag::T12 => (P1, P2),
            RegionTag::T13 | RegionTag::T13p | RegionTag::B13 | RegionTag::B13p => (P1, P3),
            RegionTag::T14 | RegionTag::B14 => (P1, P4),
            RegionTag::T23 => (P2, P3),
            RegionTag::T34 => (P3, P4),
        }
    }

    pub fn geometry_note(&self) -> &'static str {
        match self {
            RegionTag::P1 => "Heisenberg soliton",
            RegionTag::P2 => "Sol soliton on E(1,1)",
            RegionTag::P3 => "flat metric on E(2)",
            RegionTag::P4 => "round metric",
            RegionTag::T12 => "E(1,1) metrics fibering as Riemannian submersions over R",
            RegionTag::T13 => "E(2) metrics fibering as Riemannian submersions over R",
            RegionTag::T13p => "SL2(R) metrics fibering over the hyperbolic plane",
            RegionTag::T14 => "Berger spheres with fibers larger than round",
            RegionTag::T34 => "Berger spheres with fibers smaller than round",
            RegionTag::T23 => "SL2(R) metrics on the separatrix",
            RegionTag::B14 => "SU(2) metrics",
            RegionTag::B13 | RegionTag::B13p => "SL2(R) metrics",
        }
    }

    fn fixed(p: FixedPoint) -> Self {
        match p {
            FixedPoint::P1 => RegionTag::P1,
            FixedPoint::P2 => RegionTag::P2,
            FixedPoint::P3 => RegionTag::P3,
            FixedPoint::P4 => RegionTag::P4,
        }
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionLabel {
    pub tag: RegionTag,
    pub alpha_limit: FixedPoint,
    pub omega_limit: FixedPoint,
    pub geometry_note: String,
}

impl From<RegionTag> for RegionLabel {
    fn from(tag: RegionTag) -> Self {
        let (alpha_limit, omega_limit) = tag.limits();
        RegionLabel { tag, alpha_limit, omega_limit, geometry_note: tag.geometry_note().into() }
    }
}

/// Distances to the invariant curves that could contain `(m2, m3)`.
fn curve_distances(m2: f64, m3: f64, sep: &Separatrix) -> Vec<(RegionTag, f64)> {
    let mut out = Vec::new();
    let strip = m2 > 0.0 && m2 < 1.0;
    if m3 < 0.0 {
        out.push((RegionTag::T12, m2));
        out.push((RegionTag::T13p, 1.0 - m2));
        if (0.0..=1.0).contains(&m2) {
            out.push((RegionTag::T23, sep.distance(m2, m3)));
        }
    }
    if strip {
        out.push((RegionTag::T13, m3.abs()));
    }
    if m3 > 0.0 {
        out.push((RegionTag::T14, (m2 - m3) / std::f64::consts::SQRT_2));
        if m3 < 1.0 {
            out.push((RegionTag::T34, 1.0 - m2));
        }
    }
    out
}

fn open_set(m2: f64, m3: f64, sep: &Separatrix) -> RegionTag {
    if m3 > 0.0 {
        RegionTag::B14
    } else if sep.side(m2, m3) == Ordering::Greater {
        RegionTag::B13
    } else {
        RegionTag::B13p
    }
}

/// Assigns the piece of the decomposition containing `p`. Points within
/// `tol` of a piece they do not lie on exactly are reported as ambiguous
/// rather than guessed, except for the traced separatrix, which can only
/// ever be matched within `tol`.
pub fn classify_region(p: &ModuliPoint, sep: &Separatrix, tol: f64) -> Result<RegionLabel> {
    let (m2, m3) = reduce(*p)?.coords()?;
    let (nearest, d) = FixedPoint::nearest(m2, m3);
    if d <= tol {
        return Ok(RegionTag::fixed(nearest).into());
    }
    let curves = curve_distances(m2, m3, sep);
    if let Some((tag, _)) = curves.iter().find(|(t, d)| *d == 0.0 && *t != RegionTag::T23) {
        return Ok((*tag).into());
    }
    let near: Vec<RegionTag> = curves.iter().filter(|(_, d)| *d <= tol).map(|(t, _)| *t).collect();
    match near.as_slice() {
        [] => Ok(open_set(m2, m3, sep).into()),
        [RegionTag::T23] => Ok(RegionTag::T23.into()),
        _ => {
            let mut candidates: Vec<String> = near.iter().map(|t| t.to_string()).collect();
            if !near.contains(&RegionTag::T23) {
                candidates.push(open_set(m2, m3, sep).to_string());
            }
            Err(Error::AmbiguousNearBoundary { m2, m3, candidates })
        }
    }
}

/// Convergence threshold for empirical limits.
pub const LIMIT_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitVerdict {
    pub predicted: RegionLabel,
    pub backward: Option<FixedPoint>,
    pub forward: Option<FixedPoint>,
    pub backward_distance: f64,
    pub forward_distance: f64,
    pub backward_termination: Termination,
    pub forward_termination: Termination,
    pub matches: bool,
}

/// Nearest fixed point of the trajectory's end, if it is within
/// [`LIMIT_TOL`] and no further away than it was a little earlier.
fn empirical_limit(tr: &Trajectory) -> (Option<FixedPoint>, f64) {
    let end = &tr.last().state;
    let (p, d) = FixedPoint::nearest(end[0], end[1]);
    let earlier = &tr.samples[tr.samples.len() * 9 / 10].state;
    let shrinking = d <= p.distance(earlier[0], earlier[1]);
    ((d < LIMIT_TOL && shrinking).then_some(p), d)
}

/// Integrates the autonomous flow from `p` for `|cfg.t_end|` in both
/// directions and compares the observed limits with [`classify_region`].
pub fn verify_limits(
    p: &ModuliPoint,
    sep: &Separatrix,
    cfg: &IntegratorConfig,
    tol: f64,
) -> Result<LimitVerdict> {
    let predicted = classify_region(p, sep, tol)?;
    if predicted.alpha_limit == predicted.omega_limit {
        return Err(Error::InvalidState(format!("{p} is a fixed point")));
    }
    let (m2, m3) = reduce(*p)?.coords()?;
    let init = InitialState::Moduli { m2, m3 };
    let span = cfg.t_end.abs();
    let fwd = integrate(FlowFormulation::MFlowAutonomous, &init, &cfg.with_t_end(span))?;
    let bwd = integrate(FlowFormulation::MFlowAutonomous, &init, &cfg.with_t_end(-span))?;
    let (forward, forward_distance) = empirical_limit(&fwd);
    let (backward, backward_distance) = empirical_limit(&bwd);
    let matches =
        forward == Some(predicted.omega_limit) && backward == Some(predicted.alpha_limit);
    Ok(LimitVerdict {
        predicted,
        backward,
        forward,
        backward_distance,
        forward_distance,
        backward_termination: bwd.termination,
        forward_termination: fwd.termination,
        matches,
    })
}

/// Integration settings suited to limit detection: a long horizon for the
/// algebraic approach to `p3` and a ceiling low enough to catch the
/// finite-time escape to infinity before the step size collapses.
pub fn limit_config() -> IntegratorConfig {
    IntegratorConfig { m_ceiling: 1e4, ..IntegratorConfig::rkf45(1e-10, 5e3) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::trace_separatrix;

    fn sep() -> Separatrix {
        trace_separatrix(128, 1e-10).unwrap()
    }

    fn tag(sep: &Separatrix, m2: f64, m3: f64) -> RegionTag {
        classify_region(&ModuliPoint::new(m2, m3), sep, 1e-4).unwrap().tag
    }

    #[test]
    fn labels() {
        let s = sep();
        let l = classify_region(&ModuliPoint::new(0.0, 0.0), &s, 1e-4).unwrap();
        assert_eq!((l.tag, l.geometry_note.as_str()), (RegionTag::P1, "Heisenberg soliton"));
        let l = classify_region(&ModuliPoint::new(0.5, 0.2), &s, 1e-4).unwrap();
        assert_eq!((l.tag, l.alpha_limit, l.omega_limit), (RegionTag::B14, FixedPoint::P1, FixedPoint::P4));
        assert_eq!(tag(&s, 0.5, -0.95), RegionTag::B13p);
        assert_eq!(tag(&s, 0.5, -0.5), RegionTag::B13);
        assert_eq!(tag(&s, 0.0, -0.5), RegionTag::T12);
        assert_eq!(tag(&s, 0.5, 0.0), RegionTag::T13);
        assert_eq!(tag(&s, 1.0, -3.0), RegionTag::T13p);
        assert_eq!(tag(&s, 0.3, 0.3), RegionTag::T14);
        assert_eq!(tag(&s, 1.0, 0.5), RegionTag::T34);
        assert_eq!(tag(&s, 0.5, s.m3_at(0.5)), RegionTag::T23);
        assert_eq!(tag(&s, 1.0, 1.0), RegionTag::P4);
        assert_eq!(classify_region(&ModuliPoint::Infinity, &s, 1e-4).unwrap().tag, RegionTag::P1);
    }

    #[test]
    fn ambiguous_band() {
        let s = sep();
        let r = classify_region(&ModuliPoint::new(0.5, -1e-5), &s, 1e-4);
        assert!(matches!(r, Err(Error::AmbiguousNearBoundary { .. })), "{r:?}");
    }

    #[test]
    fn limits_on_curves() {
        let s = sep();
        let cfg = limit_config();
        for (m2, m3) in [(0.9, 0.9), (0.0, -0.5), (1.0, -1.0), (0.5, -0.95), (0.5, -0.5), (0.5, 0.2)] {
            let v = verify_limits(&ModuliPoint::new(m2, m3), &s, &cfg, 1e-4).unwrap();
            assert!(v.matches, "{v:?}");
        }
    }
}
