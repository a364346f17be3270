//! Three-dimensional unimodular metric Lie algebras in a Milnor frame.
//!
//! A Milnor frame `{e1, e2, e3}` is orthonormal and brackets as
//! `[e2, e3] = a1 e1`, `[e3, e1] = a2 e2`, `[e1, e2] = a3 e3`.
//! The triple `(a1, a2, a3)` determines the metric Lie algebra; its sign
//! pattern determines the underlying Lie algebra (Bianchi class).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moduli::ModuliPoint;

/// Relative threshold below which a structure constant counts as zero when
/// reading off a sign pattern.
pub const DEFAULT_ZERO_THRESHOLD: f64 = 1e-12;

/// Bracket coefficients `(a1, a2, a3)` in a Milnor frame. Never all zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct StructureConstants([f64; 3]);

impl StructureConstants {
    pub fn new(a1: f64, a2: f64, a3: f64) -> Result<Self> {
        Self::from_array([a1, a2, a3])
    }

    pub fn from_array(a: [f64; 3]) -> Result<Self> {
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("structure constants"));
        }
        if a.iter().all(|&x| x == 0.0) {
            return Err(Error::AbelianInput);
        }
        Ok(Self(a))
    }

    pub fn a1(&self) -> f64 {
        self.0[0]
    }

    pub fn a2(&self) -> f64 {
        self.0[1]
    }

    pub fn a3(&self) -> f64 {
        self.0[2]
    }

    pub fn as_array(&self) -> [f64; 3] {
        self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Rescales by a nonzero factor. A negative factor is a global sign flip.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::from_array(self.0.map(|x| c * x))
    }

    /// Relabels the frame: component `i` of the result is `a[perm[i]]`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        Self(perm.map(|i| self.0[i]))
    }
}

impl TryFrom<[f64; 3]> for StructureConstants {
    type Error = Error;

    fn try_from(a: [f64; 3]) -> Result<Self> {
        Self::from_array(a)
    }
}

impl From<StructureConstants> for [f64; 3] {
    fn from(a: StructureConstants) -> Self {
        a.0
    }
}

/// Formulation-1 state: fixed brackets `lambda` on a frame that stays
/// orthogonal, with evolving diagonal metric coefficients `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricState {
    pub lambda: [f64; 3],
    pub q: [f64; 3],
    pub t: f64,
}

impl MetricState {
    pub fn new(lambda: [f64; 3], q: [f64; 3]) -> Result<Self> {
        Self::at_time(lambda, q, 0.0)
    }

    pub fn at_time(lambda: [f64; 3], q: [f64; 3], t: f64) -> Result<Self> {
        if lambda.iter().chain(q.iter()).any(|x| !x.is_finite()) || !t.is_finite() {
            return Err(Error::NonFinite("metric state"));
        }
        if lambda.iter().all(|&x| x == 0.0) {
            return Err(Error::AbelianInput);
        }
        if q.iter().any(|&x| x <= 0.0) {
            return Err(Error::InvalidState(format!(
                "metric coefficients must be positive, got {q:?}"
            )));
        }
        let s = Self { lambda, q, t };
        if s.raw_constants().iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("derived structure constants"));
        }
        Ok(s)
    }

    /// `a_i = sqrt(q_i / (q_j q_k)) * lambda_i` without validation; used on
    /// the integrator's hot path.
    pub(crate) fn raw_constants(&self) -> [f64; 3] {
        constants_from_parts(&self.lambda, &self.q)
    }
}

pub(crate) fn constants_from_parts(lambda: &[f64; 3], q: &[f64; 3]) -> [f64; 3] {
    let [q1, q2, q3] = *q;
    [
        (q1 / (q2 * q3)).sqrt() * lambda[0],
        (q2 / (q1 * q3)).sqrt() * lambda[1],
        (q3 / (q1 * q2)).sqrt() * lambda[2],
    ]
}

/// The five nonabelian unimodular Lie algebras.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BianchiClass {
    SU2,
    SL2R,
    E2,
    E11,
    H3,
}

impl BianchiClass {
    pub fn lie_algebra(&self) -> &'static str {
        match self {
            BianchiClass::SU2 => "su(2)",
            BianchiClass::SL2R => "sl(2,R)",
            BianchiClass::E2 => "e(2)",
            BianchiClass::E11 => "e(1,1)",
            BianchiClass::H3 => "h(3)",
        }
    }

    pub fn lie_group(&self) -> &'static str {
        match self {
            BianchiClass::SU2 => "SU(2)",
            BianchiClass::SL2R => "SL2(R)",
            BianchiClass::E2 => "E(2)",
            BianchiClass::E11 => "E(1,1) = Sol",
            BianchiClass::H3 => "H(3) = Nil",
        }
    }
}

impl fmt::Display for BianchiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self {
            BianchiClass::SU2 => "SU2",
            BianchiClass::SL2R => "SL2R",
            BianchiClass::E2 => "E2",
            BianchiClass::E11 => "E11",
            BianchiClass::H3 => "H3",
        };
        f.write_str(tag)
    }
}

pub fn classify(a: &StructureConstants) -> BianchiClass {
    classify_with_threshold(a, DEFAULT_ZERO_THRESHOLD)
}

/// Sign-pattern classification; entries with `|a_i| < threshold * max|a|`
/// count as zero.
pub fn classify_with_threshold(a: &StructureConstants, threshold: f64) -> BianchiClass {
    let cutoff = threshold * a.max_abs();
    let (mut pos, mut neg) = (0, 0);
    for x in a.as_array() {
        if x.abs() < cutoff {
            continue;
        }
        if x > 0.0 {
            pos += 1;
        } else {
            neg += 1;
        }
    }
    // global sign flip: only the unordered pair {pos, neg} matters
    let (major, minor) = if pos >= neg { (pos, neg) } else { (neg, pos) };
    match (major, minor) {
        (3, 0) => BianchiClass::SU2,
        (2, 1) => BianchiClass::SL2R,
        (2, 0) => BianchiClass::E2,
        (1, 1) => BianchiClass::E11,
        (1, 0) => BianchiClass::H3,
        _ => unreachable!("a nonzero triple has at least one entry above the cutoff"),
    }
}

pub fn structure_constants_from_metric(s: &MetricState) -> StructureConstants {
    // MetricState construction already rejected zero lambda and non-finite a.
    StructureConstants(s.raw_constants())
}

/// Raw chart `(a2/a1, a3/a1)`. Not the canonical representative; see
/// [`crate::moduli::canonicalize`].
pub fn moduli_coordinates(a: &StructureConstants) -> Result<ModuliPoint> {
    if a.a1() == 0.0 {
        return Err(Error::ChartUndefined);
    }
    Ok(ModuliPoint::Coords {
        m2: a.a2() / a.a1(),
        m3: a.a3() / a.a1(),
    })
}
