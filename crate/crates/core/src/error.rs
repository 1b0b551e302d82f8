use thiserror::Error;

/// Errors raised by the projection, classification and ensemble routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid projection dimensions d={d}, p={p}: need 1 <= d <= p")]
    InvalidDims { d: usize, p: usize },

    #[error("invalid sparsity {0}: need s >= 1")]
    InvalidSparsity(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("points {i} and {j} coincide")]
    DuplicatePoints { i: usize, j: usize },

    #[error("invalid Johnson-Lindenstrauss parameters: {0}")]
    InvalidJlParams(String),

    #[error("class {0} has no observations")]
    MissingClass(u8),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("covariance matrix is numerically singular{}", class_suffix(*.class))]
    SingularCovariance { class: Option<u8> },

    #[error("invalid k={k} for {n} training points")]
    InvalidK { k: usize, n: usize },

    #[error("leaving out observation {index} empties its class")]
    FoldDegenerate { index: usize },

    #[error("every candidate projection in group {group} failed to fit")]
    UntrainableEnsemble { group: usize },

    #[error("projected covariance of sketch {index} is numerically singular")]
    SingularSketch { index: usize },

    #[error("classes have zero Mahalanobis separation")]
    DegenerateSeparation,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid data: {0}")]
    InvalidData(String),
}

fn class_suffix(class: Option<u8>) -> String {
    match class {
        Some(r) => format!(" for class {r}"),
        None => String::new(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;
