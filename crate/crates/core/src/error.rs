use alloc::string::String;
use core::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    InvalidGraph(String),
    InvalidDemand(String),
    InvalidFlow(String),
    InvalidParameter(String),
    PathFormRequired,
    MuNotPowerOfTwo(u64),
    CycleDetected,
    Conservation { vertex: usize },
    NonIntegralIncrease { vertex: usize },
    NoSeparatedDemand,
    OracleBoundExceeded { size: usize, limit: usize },
    NotARespecting { vertex: usize },
    InconsistentWitness(String),
    CoverIncomplete,
    PremiseViolated { achieved: String },
    ContractViolation(String),
    Infeasible,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGraph(m) => write!(f, "invalid graph: {m}"),
            Error::InvalidDemand(m) => write!(f, "invalid demand: {m}"),
            Error::InvalidFlow(m) => write!(f, "invalid flow: {m}"),
            Error::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            Error::PathFormRequired => write!(f, "path-form-required"),
            Error::MuNotPowerOfTwo(mu) => write!(f, "mu {mu} is not a power of two"),
            Error::CycleDetected => write!(f, "cycle detected"),
            Error::Conservation { vertex } => {
                write!(f, "flow conservation violated at vertex {vertex}")
            }
            Error::NonIntegralIncrease { vertex } => {
                write!(f, "length increase at vertex {vertex} is not integral")
            }
            Error::NoSeparatedDemand => write!(f, "no-separated-demand"),
            Error::OracleBoundExceeded { size, limit } => {
                write!(f, "oracle-bound-exceeded: size {size} over limit {limit}")
            }
            Error::NotARespecting { vertex } => {
                write!(f, "non-A-respecting demand at vertex {vertex}")
            }
            Error::InconsistentWitness(m) => write!(f, "inconsistent input witness: {m}"),
            Error::CoverIncomplete => write!(f, "cover does not cover all edges"),
            Error::PremiseViolated { achieved } => {
                write!(f, "premise-violated: achieved value {achieved}")
            }
            Error::ContractViolation(m) => write!(f, "oracle contract violation: {m}"),
            Error::Infeasible => write!(f, "infeasible"),
        }
    }
}
