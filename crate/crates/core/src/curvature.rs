//! Closed-form curvature of a Milnor frame.
//!
//! With `mu_i = (a1 + a2 + a3)/2 - a_i`, the Ricci endomorphism is
//! `2 diag(mu2 mu3, mu1 mu3, mu1 mu2)` and every other quantity here is a
//! polynomial in the `mu_i`.

use serde::{Deserialize, Serialize};

use crate::algebra::StructureConstants;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProfile {
    pub mu: [f64; 3],
    /// Frame order: `(2 mu2 mu3, 2 mu1 mu3, 2 mu1 mu2)`.
    pub ricci_eigs: [f64; 3],
    /// `(K(e2^e3), K(e3^e1), K(e1^e2))`.
    pub sectional: [f64; 3],
    pub scalar: f64,
    pub ricci_norm_sq: f64,
    pub d_ricci_norm_sq: f64,
}

pub fn mu(a: &StructureConstants) -> [f64; 3] {
    mu_raw(&a.as_array())
}

pub(crate) fn mu_raw(a: &[f64; 3]) -> [f64; 3] {
    let half = 0.5 * (a[0] + a[1] + a[2]);
    [half - a[0], half - a[1], half - a[2]]
}

/// Sectional curvatures of the three coordinate planes, frame order.
pub(crate) fn sectional_raw(mu: &[f64; 3]) -> [f64; 3] {
    let [m1, m2, m3] = *mu;
    let (p23, p13, p12) = (m2 * m3, m1 * m3, m1 * m2);
    [-p23 + p13 + p12, p23 - p13 + p12, p23 + p13 - p12]
}

/// `|D Rc|^2 = 8((mu1-mu3)^2 mu2^4 + (mu1-mu2)^2 mu3^4 + (mu2-mu3)^2 mu1^4)`.
pub(crate) fn d_ricci_norm_sq_raw(mu: &[f64; 3]) -> f64 {
    let [m1, m2, m3] = *mu;
    8.0 * ((m1 - m3).powi(2) * m2.powi(4)
        + (m1 - m2).powi(2) * m3.powi(4)
        + (m2 - m3).powi(2) * m1.powi(4))
}

pub fn curvature_profile(a: &StructureConstants) -> CurvatureProfile {
    profile_raw(&a.as_array())
}

pub(crate) fn profile_raw(a: &[f64; 3]) -> CurvatureProfile {
    let mu = mu_raw(a);
    let [m1, m2, m3] = mu;
    let ricci_eigs = [2.0 * m2 * m3, 2.0 * m1 * m3, 2.0 * m1 * m2];
    let scalar = 2.0 * (m2 * m3 + m1 * m3 + m1 * m2);
    // Rc is diagonal in the Milnor frame, so |Rc|^2 is the sum of squared eigenvalues.
    let ricci_norm_sq = ricci_eigs.iter().map(|x| x * x).sum();
    CurvatureProfile {
        mu,
        ricci_eigs,
        sectional: sectional_raw(&mu),
        scalar,
        ricci_norm_sq,
        d_ricci_norm_sq: d_ricci_norm_sq_raw(&mu),
    }
}

pub fn ricci_spectrum_sorted(a: &StructureConstants) -> [f64; 3] {
    let mut eigs = curvature_profile(a).ricci_eigs;
    eigs.sort_by(f64::total_cmp);
    eigs
}
