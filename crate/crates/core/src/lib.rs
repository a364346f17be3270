//! Ricci flow on three-dimensional unimodular Lie groups.
//!
//! Left-invariant metrics are handled through their Milnor-frame structure
//! constants. The crate covers curvature, the flow in three equivalent
//! forms, the moduli space of metrics up to isometry and scaling, and the
//! phase plane of the projectivized flow.

pub mod algebra;
pub mod cli;
pub mod curvature;
pub mod dynamics;
pub mod error;
pub mod flow;
pub mod moduli;

pub use error::{Error, Result};
