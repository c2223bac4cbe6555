use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("symmetric eigensolver did not converge on a {rows}x{cols} matrix")]
    NonConvergence { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix dimension {n} outside supported range [{min}, {max}]")]
    Dimension { n: usize, min: usize, max: usize },

    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },

    #[error("stable pole required: |h| < 1, got h = {h}")]
    UnstablePole { h: f64 },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("deviation is zero; the construction requires a nonzero deviation")]
    DegenerateDeviation,

    #[error("brute-force oracle supports n <= 3, got n = {n}")]
    UnsupportedSize { n: usize },

    #[error("grid is incomplete: {missing} missing cell(s), first at (h1 = {first_h1}, h2 = {first_h2})")]
    IncompleteGrid {
        missing: usize,
        first_h1: f64,
        first_h2: f64,
    },

    #[error("cell (h1 = {h1}, h2 = {h2}): {source}")]
    Cell {
        h1: f64,
        h2: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_cell(self, h1: f64, h2: f64) -> Self {
        Error::Cell {
            h1,
            h2,
            source: Box::new(self),
        }
    }
}
