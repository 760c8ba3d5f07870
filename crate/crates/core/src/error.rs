use std::fmt;

/// Errors produced anywhere in the reduction toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{format} parse error{}: {message}", line_suffix(*.line))]
    Parse {
        format: Format,
        line: usize,
        message: String,
    },

    /// A brute-force or exponential-time step was asked to exceed its limit.
    #[error("{what}: requested {requested} exceeds limit {limit}{}", cost_suffix(.estimate))]
    Budget {
        what: &'static str,
        requested: u64,
        limit: u64,
        estimate: Option<String>,
    },

    /// A value that must be real carried an imaginary part above tolerance.
    #[error("imaginary residue {residue:e} at {location} exceeds tolerance 2^-{tolerance_exp}")]
    ImaginaryResidue {
        location: String,
        residue: f64,
        tolerance_exp: i64,
    },

    #[error("matrix is not unitary: max |M^dag M - I| = {deviation:e}")]
    NotUnitary { deviation: f64 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn line_suffix(line: usize) -> String {
    match line {
        0 => String::new(),
        l => format!(" at line {l}"),
    }
}

fn cost_suffix(estimate: &Option<String>) -> String {
    match estimate {
        Some(e) => format!(" (estimated cost {e})"),
        None => String::new(),
    }
}

/// Text and JSON formats the toolkit reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    BoolFunc,
    QCircuit,
    PlainMatrix,
    Instance,
    Precision,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::BoolFunc => ".bf",
            Format::QCircuit => ".qc",
            Format::PlainMatrix => "matrix",
            Format::Instance => ".pm.json",
            Format::Precision => "precision",
        })
    }
}

impl Error {
    pub(crate) fn parse(format: Format, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            format,
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }

    pub(crate) fn budget(what: &'static str, requested: u64, limit: u64) -> Self {
        Error::Budget {
            what,
            requested,
            limit,
            estimate: None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
