//! Phase plane of the autonomous flow on the ratios `(m2, m3)`.

pub mod asymptotics;
pub mod fixed_points;
pub mod regions;
pub mod separatrix;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use asymptotics::{fit_asymptotics, rescaled_drc_growth, AsymptoticFit, FitModel, GrowthReport};
pub use fixed_points::{fixed_points, jacobian, FixedPointReport, Stability};
pub use regions::{classify_region, verify_limits, LimitVerdict, RegionLabel, RegionTag};
pub use separatrix::{separatrix_taylor_seed, trace_separatrix, Separatrix, TAYLOR_COEFFS};

/// The four fixed points lying in the fundamental domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FixedPoint {
    P1,
    P2,
    P3,
    P4,
}

impl FixedPoint {
    pub const ALL: [FixedPoint; 4] = [FixedPoint::P1, FixedPoint::P2, FixedPoint::P3, FixedPoint::P4];

    pub fn location(&self) -> (f64, f64) {
        match self {
            FixedPoint::P1 => (0.0, 0.0),
            FixedPoint::P2 => (0.0, -1.0),
            FixedPoint::P3 => (1.0, 0.0),
            FixedPoint::P4 => (1.0, 1.0),
        }
    }

    pub fn at(loc: (f64, f64)) -> Option<FixedPoint> {
        Self::ALL.into_iter().find(|p| p.location() == loc)
    }

    /// Distance in the compactified domain, where `m3 -> -inf` is `P1`.
    pub fn distance(&self, m2: f64, m3: f64) -> f64 {
        match self {
            FixedPoint::P1 => crate::moduli::compactified_distance_to_p1(m2, m3),
            _ => crate::moduli::chart_distance((m2, m3), self.location()),
        }
    }

    /// Nearest fixed point in the compactified distance.
    pub fn nearest(m2: f64, m3: f64) -> (FixedPoint, f64) {
        Self::ALL
            .into_iter()
            .map(|p| (p, p.distance(m2, m3)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("four candidates")
    }
}

impl fmt::Display for FixedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FixedPoint::P1 => "p1",
            FixedPoint::P2 => "p2",
            FixedPoint::P3 => "p3",
            FixedPoint::P4 => "p4",
        };
        f.write_str(s)
    }
}
