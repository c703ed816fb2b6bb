use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong inside the core crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument fell outside its admissible range.
    OutOfRange { name: &'static str, value: f64 },
    /// A node degree below the admissible minimum.
    InvalidDegree { degree: usize, min: usize },
    InvalidQuantizer(&'static str),
    InvalidDistribution(String),
    /// Both ends of a search bracket behave the same way.
    Bracket { low: f64, high: f64 },
    /// Golden-section search saw an endpoint beat the interior.
    NotUnimodal { at: f64 },
    LpInfeasible { row: Option<usize> },
    LpUnbounded,
    LpNumerical(&'static str),
    /// The code-design LP has no solution; `binding` names the constraint family.
    DesignInfeasible { binding: &'static str },
    /// The optimized distribution failed density evolution, even after a retry.
    DesignNotConverged,
    InvalidGraph(String),
    InfeasibleDegreeSequence(String),
    /// No admissible check node keeps the degree-2/3 subgraph acyclic.
    WeakCycleUnavoidable { variable: usize },
    ScheduleTooShort { needed: usize, got: usize },
    ObservationLength { expected: usize, got: usize },
    SubchannelOutOfRange { variable: usize, index: usize },
    /// Unparseable alist token or missing line (1-based line number).
    AlistParse { line: usize },
    /// Header counts disagree with the body.
    AlistDimension(String),
    /// A node index outside `1..=count`.
    AlistIndex { line: usize, index: usize },
    /// Zero padding in the wrong place or of the wrong width.
    AlistPadding { line: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OutOfRange { name, value } => write!(f, "{name} out of range: {value}"),
            Error::InvalidDegree { degree, min } => {
                write!(f, "degree {degree} is below the minimum {min}")
            }
            Error::InvalidQuantizer(msg) => write!(f, "invalid quantizer: {msg}"),
            Error::InvalidDistribution(msg) => write!(f, "invalid degree distribution: {msg}"),
            Error::Bracket { low, high } => write!(
                f,
                "bracket [{low}, {high}] does not straddle the decoding threshold"
            ),
            Error::NotUnimodal { at } => write!(f, "objective is not unimodal near {at}"),
            Error::LpInfeasible { row: Some(r) } => write!(f, "LP infeasible (row {r} binding)"),
            Error::LpInfeasible { row: None } => write!(f, "LP infeasible"),
            Error::LpUnbounded => write!(f, "LP unbounded"),
            Error::LpNumerical(msg) => write!(f, "LP numerical failure: {msg}"),
            Error::DesignInfeasible { binding } => {
                write!(f, "design LP infeasible, binding constraint: {binding}")
            }
            Error::DesignNotConverged => {
                write!(f, "optimized distribution does not converge under density evolution")
            }
            Error::InvalidGraph(msg) => write!(f, "invalid Tanner graph: {msg}"),
            Error::InfeasibleDegreeSequence(msg) => write!(f, "infeasible degree sequence: {msg}"),
            Error::WeakCycleUnavoidable { variable } => write!(
                f,
                "cannot place edges of variable node {variable} without closing a weak cycle"
            ),
            Error::ScheduleTooShort { needed, got } => {
                write!(f, "reliability schedule too short: need {needed}, got {got}")
            }
            Error::ObservationLength { expected, got } => {
                write!(f, "expected {expected} observations, got {got}")
            }
            Error::SubchannelOutOfRange { variable, index } => write!(
                f,
                "variable {variable}: sub-channel index {index} outside the decomposition"
            ),
            Error::AlistParse { line } => write!(f, "alist line {line}: malformed or missing"),
            Error::AlistDimension(msg) => write!(f, "alist dimension mismatch: {msg}"),
            Error::AlistIndex { line, index } => {
                write!(f, "alist line {line}: index {index} out of range")
            }
            Error::AlistPadding { line } => write!(f, "alist line {line}: bad zero padding"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
