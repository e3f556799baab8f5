use thiserror::Error;

use crate::subgroups::SubgroupId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("group parameter a must be a nonzero finite real, got {0}")]
    InvalidParameter(f64),

    #[error("subgroup {sub:?} is not admissible for a = {a}")]
    InadmissibleSubgroup { sub: SubgroupId, a: f64 },

    #[error("case {case} requires a != 1")]
    InadmissibleCase { case: char, a: f64 },

    #[error("automorphism parameters for a = 1 cannot act on the algebra with a = {0}")]
    VariantMismatch(f64),

    #[error("automorphism is singular ({0})")]
    SingularAutomorphism(&'static str),

    #[error("subalgebra generator is zero")]
    ZeroGenerator,

    #[error("element lies in the commutator subgroup (x4 = 0); no fixed point is claimed")]
    NoFixedPoint,

    #[error("function arity {found} does not match case {case}")]
    ArityMismatch { case: char, found: &'static str },

    #[error("base-point constraint violated: value at the origin is {0}")]
    BasePoint(f64),

    #[error("no root found in search box [{lo}, {hi}]")]
    NoRootInBox { lo: f64, hi: f64 },

    #[error("{count} roots found in search box; the section is not sharply transitive here")]
    MultipleRoots { count: usize },

    #[error("solver did not converge from any start")]
    SolverDivergence,

    #[error("need at least {needed} usable samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("operation not defined for case {0}")]
    UnsupportedCase(char),

    #[error("invalid search box: {0}")]
    InvalidBox(String),

    #[error("{0}")]
    InvalidPreset(String),

    #[error(transparent)]
    Parse(#[from] crate::expr::ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
