use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("structure constants (0, 0, 0) describe the abelian algebra, which is excluded")]
    AbelianInput,

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("moduli chart undefined: a1 = 0")]
    ChartUndefined,

    #[error("the point at infinity has no chart coordinates")]
    InfinityInput,

    #[error("the flat class (1, 0) has |Rc| = 0 and no normalized invariants")]
    FlatPoint,

    #[error("m2 = {0} lies outside the Taylor seed range [0, 0.2]")]
    OutOfSeedRange(f64),

    #[error("separatrix trace diverged: {0}")]
    TraceDiverged(String),

    #[error("point ({m2}, {m3}) lies within tolerance of several pieces: {candidates:?}")]
    AmbiguousNearBoundary {
        m2: f64,
        m3: f64,
        candidates: Vec<String>,
    },

    #[error("expected a {expected} metric, found {found}")]
    WrongClass { expected: String, found: String },

    #[error("flat initial metric: |D Rc|^2 vanishes identically")]
    DegenerateFlat,

    #[error("adaptive step {h:e} underflowed at t = {t}")]
    StepUnderflow { t: f64, h: f64 },
}
