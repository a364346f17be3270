//! The fundamental domain of the moduli space and its isometry invariants.
//!
//! Structure constants up to frame permutation, global sign and scaling are
//! parametrized by `S_m = {0 <= m2 <= 1, m3 <= m2}` with the seam
//! identification `(0, m3) ~ (0, 1/m3)` and `infinity ~ (0, 0)`. Canonical
//! representatives on the seam are taken in `-1 <= m3 <= 0`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::StructureConstants;
use crate::curvature::{profile_raw, CurvatureProfile};
use crate::error::{Error, Result};

/// Radius of the chart ball around `(1, 0)` treated as the flat class.
pub const FLAT_BALL: f64 = 1e-9;

/// Default chart tolerance for [`isometry_equivalent`].
pub const DEFAULT_EQUIV_TOL: f64 = 1e-9;

/// Agreement threshold used by [`separating_check`].
pub const INVARIANT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModuliPoint {
    Coords { m2: f64, m3: f64 },
    Infinity,
}

impl ModuliPoint {
    pub fn new(m2: f64, m3: f64) -> Self {
        ModuliPoint::Coords { m2, m3 }
    }

    pub fn coords(&self) -> Result<(f64, f64)> {
        match *self {
            ModuliPoint::Coords { m2, m3 } => Ok((m2, m3)),
            ModuliPoint::Infinity => Err(Error::InfinityInput),
        }
    }

    pub fn in_domain(&self) -> bool {
        match *self {
            ModuliPoint::Coords { m2, m3 } => (0.0..=1.0).contains(&m2) && m3 <= m2,
            ModuliPoint::Infinity => true,
        }
    }

    pub fn is_canonical(&self) -> bool {
        match *self {
            ModuliPoint::Coords { m2, m3 } => {
                self.in_domain() && (m2 != 0.0 || (-1.0..=0.0).contains(&m3))
            }
            ModuliPoint::Infinity => false,
        }
    }

    /// Structure constants `(1, m2, m3)` representing this point.
    pub fn to_constants(&self) -> Result<StructureConstants> {
        let (m2, m3) = self.coords()?;
        StructureConstants::new(1.0, m2, m3)
    }
}

impl fmt::Display for ModuliPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuliPoint::Coords { m2, m3 } => write!(f, "({m2}, {m3})"),
            ModuliPoint::Infinity => f.write_str("inf"),
        }
    }
}

/// Reduces a point of the closed domain to its canonical representative:
/// infinity goes to `(0, 0)` and seam points with `m3 < -1` are reflected.
pub fn reduce(p: ModuliPoint) -> Result<ModuliPoint> {
    match p {
        ModuliPoint::Infinity => Ok(ModuliPoint::new(0.0, 0.0)),
        ModuliPoint::Coords { m2, m3 } => {
            if !(m2.is_finite() && m3.is_finite()) {
                return Err(Error::NonFinite("moduli point"));
            }
            if !p.in_domain() {
                return Err(Error::InvalidState(format!(
                    "({m2}, {m3}) lies outside 0 <= m2 <= 1, m3 <= m2"
                )));
            }
            if m2 == 0.0 && m3 < -1.0 {
                Ok(ModuliPoint::new(0.0, 1.0 / m3))
            } else {
                Ok(p)
            }
        }
    }
}

/// Canonical representative of the class of `a` under frame permutation,
/// global sign flip, scaling and the seam identification.
pub fn canonicalize(a: &StructureConstants) -> ModuliPoint {
    let sorted_desc = |v: [f64; 3]| {
        let mut v = v;
        v.sort_by(|x, y| y.total_cmp(x));
        v
    };
    let mut v = sorted_desc(a.as_array());
    if v[1] < 0.0 || v[0] <= 0.0 {
        v = sorted_desc(v.map(|x| -x));
    }
    let [x, y, z] = v;
    // `+ 0.0` turns a negative zero into a positive one.
    let m2 = y / x + 0.0;
    let mut m3 = z / x + 0.0;
    if m2 == 0.0 && m3 < -1.0 {
        m3 = 1.0 / m3;
    }
    ModuliPoint::new(m2, m3)
}

pub fn chart_distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).hypot(p.1 - q.1)
}

/// Distance to `p1 = (0, 0)` in the compactification where `m3 -> -inf`
/// also approaches `p1`.
pub fn compactified_distance_to_p1(m2: f64, m3: f64) -> f64 {
    m2.hypot(m3).min(1.0 / m3.abs().max(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuTriple {
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
}

impl NuTriple {
    pub fn as_array(&self) -> [f64; 3] {
        [self.nu1, self.nu2, self.nu3]
    }
}

/// `nu = (m2 + m3 - 1, 1 + m3 - m2, 1 + m2 - m3)`; for `a = (1, m2, m3)`
/// these are twice the `mu_i`.
pub fn nu(p: &ModuliPoint) -> Result<NuTriple> {
    let (m2, m3) = p.coords()?;
    Ok(NuTriple {
        nu1: m2 + m3 - 1.0,
        nu2: 1.0 + m3 - m2,
        nu3: 1.0 + m2 - m3,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PartitionCell {
    S0,
    S1,
    S2,
    Spp,
    Smp,
    Smm,
}

pub fn partition_cell(p: &ModuliPoint) -> Result<PartitionCell> {
    let (m2, m3) = p.coords()?;
    if !p.in_domain() {
        return Err(Error::InvalidState(format!("({m2}, {m3}) lies outside S_m")));
    }
    if m2 == 1.0 && m3 == 0.0 {
        return Ok(PartitionCell::S0);
    }
    let NuTriple { nu1, nu2, .. } = nu(p)?;
    let cell = if nu1 == 0.0 {
        PartitionCell::S1
    } else if nu2 == 0.0 {
        PartitionCell::S2
    } else if nu1 > 0.0 {
        PartitionCell::Spp
    } else if nu2 > 0.0 {
        PartitionCell::Smp
    } else {
        PartitionCell::Smm
    };
    Ok(cell)
}

/// Sorted normalized Ricci spectrum together with `|D Rc|^2 / |Rc|^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsometryInvariants {
    pub ricci_direction: [f64; 3],
    pub drc_ratio: f64,
    pub is_flat: bool,
}

impl IsometryInvariants {
    /// Max-norm distance, with the ratio measured relative to its size.
    pub fn distance(&self, other: &Self) -> f64 {
        let dir = (0..3)
            .map(|i| (self.ricci_direction[i] - other.ricci_direction[i]).abs())
            .fold(0.0, f64::max);
        let scale = 1.0_f64.max(self.drc_ratio.abs()).max(other.drc_ratio.abs());
        dir.max((self.drc_ratio - other.drc_ratio).abs() / scale)
    }
}

/// The piecewise closed form of the invariant map on `S_m` minus `(1, 0)`.
pub fn invariant_map(p: &ModuliPoint) -> Result<IsometryInvariants> {
    let cell = partition_cell(p)?;
    let NuTriple { nu1, nu2, nu3 } = nu(p)?;
    let (p12, p13, p23) = (nu1 * nu2, nu1 * nu3, nu2 * nu3);
    let nn = (p12 * p12 + p13 * p13 + p23 * p23).sqrt();
    let star = || {
        let n = (nu1 - nu3).powi(2) * nu2.powi(4)
            + (nu1 - nu2).powi(2) * nu3.powi(4)
            + (nu2 - nu3).powi(2) * nu1.powi(4);
        n / nn.powi(3)
    };
    let (ricci_direction, drc_ratio) = match cell {
        PartitionCell::S0 => return Err(Error::FlatPoint),
        PartitionCell::S1 => ([0.0, 0.0, 1.0], (nu2 * nu2 + nu3 * nu3) / (nu2 * nu3)),
        PartitionCell::S2 => ([-1.0, 0.0, 0.0], (nu1 * nu1 + nu3 * nu3) / (nu1 * nu3).abs()),
        PartitionCell::Spp => ([p12 / nn, p13 / nn, p23 / nn], star()),
        PartitionCell::Smp => ([p13 / nn, p12 / nn, p23 / nn], star()),
        PartitionCell::Smm => ([p13 / nn, p23 / nn, p12 / nn], star()),
    };
    Ok(IsometryInvariants { ricci_direction, drc_ratio, is_flat: false })
}

/// The same invariants computed straight from the curvature of `a`, with
/// no reference to the partition. Serves as an independent oracle for
/// [`invariant_map`].
pub fn invariants_from_curvature(a: &StructureConstants) -> IsometryInvariants {
    let CurvatureProfile { ricci_eigs, ricci_norm_sq, d_ricci_norm_sq, .. } =
        profile_raw(&a.as_array());
    let norm = ricci_norm_sq.sqrt();
    // relative to the size of a, since curvature scales like a^2
    if norm <= 1e-14 * a.max_abs().powi(2) {
        return IsometryInvariants { ricci_direction: [0.0; 3], drc_ratio: 0.0, is_flat: true };
    }
    let mut dir = ricci_eigs.map(|x| x / norm);
    dir.sort_by(f64::total_cmp);
    IsometryInvariants {
        ricci_direction: dir,
        drc_ratio: d_ricci_norm_sq / norm.powi(3),
        is_flat: false,
    }
}

fn is_flat_class(p: (f64, f64)) -> bool {
    chart_distance(p, (1.0, 0.0)) <= FLAT_BALL
}

/// Decides equivalence up to isometry and scaling by comparing canonical
/// representatives in the chart.
pub fn isometry_equivalent(a: &StructureConstants, b: &StructureConstants, tol: f64) -> bool {
    let pa = canonicalize(a).coords().expect("canonical points have coordinates");
    let pb = canonicalize(b).coords().expect("canonical points have coordinates");
    let (fa, fb) = (is_flat_class(pa), is_flat_class(pb));
    if fa || fb {
        return fa && fb;
    }
    if compactified_distance_to_p1(pa.0, pa.1) <= tol
        && compactified_distance_to_p1(pb.0, pb.1) <= tol
    {
        return true;
    }
    let mut d = chart_distance(pa, pb);
    if pa.0 <= tol && pb.0 <= tol {
        let reflect = |p: (f64, f64)| if p.1 != 0.0 { (p.0, 1.0 / p.1) } else { p };
        d = d
            .min(chart_distance(reflect(pa), pb))
            .min(chart_distance(pa, reflect(pb)));
    }
    d <= tol
}

/// Compares the invariant map at the two canonical points.
pub fn separating_check(a: &StructureConstants, b: &StructureConstants) -> Result<bool> {
    let ia = invariant_map(&canonicalize(a))?;
    let ib = invariant_map(&canonicalize(b))?;
    Ok(ia.distance(&ib) <= INVARIANT_TOL)
}
