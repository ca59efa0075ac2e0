use std::fmt;

use serde::Serialize;

/// Which of the eigenfunction conditions a polynomial failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FailedCondition {
    #[serde(rename = "homogeneity")]
    Homogeneity,
    #[serde(rename = "laplacian_P")]
    LaplacianP,
    #[serde(rename = "laplacian_P2")]
    LaplacianP2,
}

impl fmt::Display for FailedCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FailedCondition::Homogeneity => "homogeneity",
            FailedCondition::LaplacianP => "laplacian_P",
            FailedCondition::LaplacianP2 => "laplacian_P2",
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} variables, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the zero polynomial has no degree")]
    ZeroPolynomial,
    #[error("division by the zero polynomial")]
    DivisionByZeroPolynomial,
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("variable {name} is out of range for {nvars} variables")]
    VariableOutOfRange { name: String, nvars: usize },
    #[error("negative exponent at position {position}")]
    NegativeExponent { position: usize },
    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },
    #[error("sphere dimension {0} is too small (need n >= 2)")]
    SphereDimensionTooSmall(usize),
    #[error("family members have different degrees ({0} and {1})")]
    MixedDegrees(u32, u32),
    #[error("empty family")]
    EmptyFamily,
    #[error("not a (lambda, mu)-eigenfunction: {0} condition fails")]
    NotAnEigenfunction(FailedCondition),
    #[error("constraint {0} has non-real coefficients")]
    NonRealConstraint(usize),
    #[error("invalid variety: {0}")]
    InvalidVariety(String),
    #[error("Newton projection did not converge within {0} iterations")]
    NonConvergence(usize),
    #[error("constraint Jacobian is singular (smallest singular value {0:e})")]
    SingularJacobian(f64),
    #[error("point is off the variety (residual {0:e})")]
    OffVariety(f64),
    #[error("gradient vanishes at the point (|grad P| = {0:e})")]
    DegeneratePoint(f64),
    #[error("point coincides with the projection pole")]
    PoleSingularity,
    #[error("only {found} of {requested} samples converged")]
    InsufficientYield { requested: usize, found: usize },
    #[error("sample count must be positive")]
    EmptySampleRequest,
    #[error("the line coefficients (a, b) are both zero")]
    ZeroLine,
    #[error("no point of the fiber was found on the sphere")]
    EmptyFiber,
    #[error("every sampled fiber point is singular ({0} samples)")]
    SingularFiber(usize),
    #[error("(n, m) = (0, 0) does not define a surface")]
    BothZero,
    #[error("malformed point cloud file: {0}")]
    MalformedCloud(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
