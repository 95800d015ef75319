use thiserror::Error;

/// Errors raised across the grid pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line} has {len} cells, expected {expected}")]
    NonSquare { line: usize, len: usize, expected: usize },

    #[error("unexpected character {ch:?} at line {line}, column {column}")]
    BadCharacter { line: usize, column: usize, ch: char },

    #[error("{axis} {index} carries {count} {marking} markings, expected exactly one")]
    NotPermutation {
        axis: &'static str,
        index: usize,
        marking: char,
        count: usize,
    },

    #[error("cell (column {column}, row {row}) carries both an X and an O")]
    SharedCell { column: usize, row: usize },

    #[error("diagram describes a link with {components} components, not a knot")]
    MultiComponent { components: usize },

    #[error("grid index {n} is too small (need at least 2)")]
    IndexTooSmall { n: usize },

    #[error("{what} limit exceeded: {actual} > {limit}")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("the interval is empty: bottom is not below top")]
    EmptyInterval,

    #[error("domain has a negative multiplicity")]
    NotPositive,

    #[error("internal contradiction: {0}")]
    InternalContradiction(String),

    #[error("differential does not square to zero at Maslov grading {maslov}")]
    NotAComplex { maslov: i64 },

    #[error("poset is not graded")]
    NotGraded,

    #[error("simplicial complex is not pure")]
    NotPure,
}

pub type Result<T> = std::result::Result<T, Error>;
