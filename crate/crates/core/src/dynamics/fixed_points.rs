//! Fixed points of the autonomous system and their linearizations.

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use super::FixedPoint;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stability {
    Unstable,
    Stable,
    Saddle,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    /// `None` for the two points outside the fundamental domain.
    pub tag: Option<FixedPoint>,
    pub location: (f64, f64),
    pub jacobian: [[f64; 2]; 2],
    pub jacobian_exact: [[Rational64; 2]; 2],
    /// Saddles list the unstable eigenvalue first; otherwise ascending.
    pub eigenvalues: (f64, f64),
    pub stability: Stability,
    /// Unit eigenvectors matching `eigenvalues`, when those are distinct.
    pub eigenvectors: Option<[[f64; 2]; 2]>,
    pub note: Option<String>,
}

/// Linearization of the autonomous field at `(m2, m3)`.
pub fn jacobian(m2: f64, m3: f64) -> [[f64; 2]; 2] {
    [
        [2.0 * m2 * m3 - m3 - 3.0 * m2 * m2 + 1.0, m2 * (m2 - 1.0)],
        [m3 * (m3 - 1.0), 2.0 * m2 * m3 - m2 - 3.0 * m3 * m3 + 1.0],
    ]
}

fn r(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

/// Location and integer Jacobian of each fixed point.
type Entry = ((i64, i64), [[i64; 2]; 2]);

// Worked out by hand from the partial derivatives.
fn table() -> [Entry; 6] {
    [
        ((0, 0), [[1, 0], [0, 1]]),
        ((1, 1), [[-1, 0], [0, -1]]),
        ((0, -1), [[2, 0], [2, -2]]),
        ((-1, 0), [[-2, 2], [0, 2]]),
        ((0, 1), [[0, 0], [0, -2]]),
        ((1, 0), [[-2, 0], [0, 0]]),
    ]
}

fn eigenvector(j: &[[f64; 2]; 2], lambda: f64) -> [f64; 2] {
    let v = if j[0][1] != 0.0 {
        [j[0][1], lambda - j[0][0]]
    } else if j[1][0] != 0.0 {
        [lambda - j[1][1], j[1][0]]
    } else if (j[0][0] - lambda).abs() < (j[1][1] - lambda).abs() {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    };
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

fn report(loc: (i64, i64), exact: [[i64; 2]; 2]) -> FixedPointReport {
    let location = (loc.0 as f64, loc.1 as f64);
    let j = jacobian(location.0, location.1);
    let tr = j[0][0] + j[1][1];
    let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
    // every Jacobian here is triangular, so the discriminant is a square
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    let (lo, hi) = (0.5 * tr - disc, 0.5 * tr + disc);
    let stability = if lo == 0.0 || hi == 0.0 {
        Stability::Degenerate
    } else if lo > 0.0 {
        Stability::Unstable
    } else if hi < 0.0 {
        Stability::Stable
    } else {
        Stability::Saddle
    };
    let eigenvalues = if stability == Stability::Saddle { (hi, lo) } else { (lo, hi) };
    let eigenvectors = (lo != hi)
        .then(|| [eigenvector(&j, eigenvalues.0), eigenvector(&j, eigenvalues.1)]);
    let note = match loc {
        (1, 0) => Some(
            "degenerate: points near (1,0) below the m2-axis approach it, points above leave"
                .to_string(),
        ),
        (0, 1) => Some("degenerate: outside the fundamental domain".to_string()),
        _ => None,
    };
    FixedPointReport {
        tag: FixedPoint::at(location),
        location,
        jacobian: j,
        jacobian_exact: exact.map(|row| row.map(r)),
        eigenvalues,
        stability,
        eigenvectors,
        note,
    }
}

/// The six fixed points `(0,0), (1,1), (0,-1), (-1,0), (0,1), (1,0)`.
pub fn fixed_points() -> Vec<FixedPointReport> {
    table().into_iter().map(|(loc, j)| report(loc, j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::m_flow_rhs;

    #[test]
    fn numeric_matches_exact() {
        for fp in fixed_points() {
            for i in 0..2 {
                for k in 0..2 {
                    let e = fp.jacobian_exact[i][k];
                    assert_eq!(fp.jacobian[i][k], *e.numer() as f64 / *e.denom() as f64);
                }
            }
            let (d2, d3) = m_flow_rhs(fp.location, 0.0, true);
            assert_eq!((d2, d3), (0.0, 0.0));
        }
    }

    #[test]
    fn classifications() {
        let fps = fixed_points();
        let kinds: Vec<_> = fps.iter().map(|f| f.stability).collect();
        use Stability::*;
        assert_eq!(kinds, [Unstable, Stable, Saddle, Saddle, Degenerate, Degenerate]);
        assert_eq!(fps[2].eigenvalues, (2.0, -2.0));
        let v = fps[2].eigenvectors.unwrap()[0];
        assert!((v[0] * 1.0 - v[1] * 2.0).abs() < 1e-15);
        let v = fps[3].eigenvectors.unwrap()[0];
        assert!((v[0] * 2.0 - v[1] * 1.0).abs() < 1e-15);
        assert_eq!(fps[5].eigenvalues, (-2.0, 0.0));
    }

    #[test]
    fn finite_difference_jacobian() {
        let h = 1e-6;
        for (m2, m3) in [(0.3, -0.7), (0.5, 0.2), (1.2, -2.0)] {
            let j = jacobian(m2, m3);
            let f = |a: f64, b: f64| {
                let (x, y) = m_flow_rhs((a, b), 0.0, true);
                [x, y]
            };
            for i in 0..2 {
                let d_m2 = (f(m2 + h, m3)[i] - f(m2 - h, m3)[i]) / (2.0 * h);
                let d_m3 = (f(m2, m3 + h)[i] - f(m2, m3 - h)[i]) / (2.0 * h);
                assert!((d_m2 - j[i][0]).abs() < 1e-8);
                assert!((d_m3 - j[i][1]).abs() < 1e-8);
            }
        }
    }
}
