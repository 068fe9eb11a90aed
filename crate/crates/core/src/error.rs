use std::fmt;

use serde::{Deserialize, Serialize};

use crate::sets::Subset;

/// Reason an instance admits no degree-specified cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `m(set) < p(set)`.
    Uncovered { set: Subset, requirement: i64, degree: i64 },
    /// `m(vertex) > K_p`.
    DegreeAboveMax { vertex: usize, degree: i64, max_value: i64 },
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certificate::Uncovered { set, requirement, degree } => write!(
                f,
                "set {set:?} has requirement {requirement} but total degree {degree}"
            ),
            Certificate::DegreeAboveMax { vertex, degree, max_value } => write!(
                f,
                "vertex {vertex} has degree {degree} above the maximum function value {max_value}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("element {0} is not in the ground set")]
    OutsideGround(usize),
    #[error("unknown element label `{0}`")]
    UnknownLabel(String),
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("ground set has {n} elements but the enumeration cap is {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("value {0} is outside the supported range of +-2^48")]
    ValueOutOfRange(i128),
    #[error("ground sets differ")]
    GroundMismatch,
    #[error("invalid hyperedge: {0}")]
    InvalidEdge(String),
    #[error("weight {0} is not positive")]
    InvalidWeight(i64),
    #[error("required set {required:?} meets forbidden set {forbidden:?}")]
    EmptyFeasibleFamily { required: Subset, forbidden: Subset },
    #[error("minimal maximizers {0:?} and {1:?} intersect; the function is not skew-supermodular")]
    NotDisjoint(Subset, Subset),
    #[error("family contains the empty set")]
    EmptyMember,
    #[error("denominator {value} at {set:?} is not positive")]
    NonPositiveDenominator { set: Subset, value: i64 },
    #[error("instance is infeasible: {0}")]
    Infeasible(Certificate),
    #[error("the polyhedron Q(p,m) is empty")]
    QInfeasible,
    #[error("function is not symmetric at {0:?}")]
    NotSymmetric(Subset),
    #[error("maximum connectivity gaps differ: {first} vs {second}")]
    GapMismatch { first: i64, second: i64 },
    #[error("algorithm hypothesis broken: {0}")]
    Hypothesis(String),
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
