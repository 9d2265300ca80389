use thiserror::Error;

/// Errors raised by the aggregation toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("arity {0} outside the supported range 1..=24")]
    ArityOutOfRange(u32),
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: u32, right: u32 },
    #[error("input {input} out of range for arity {arity}")]
    InputOutOfRange { input: u64, arity: u32 },
    #[error("voter {voter} out of range for arity {arity}")]
    VoterOutOfRange { voter: u32, arity: u32 },
    #[error("coalition mask {mask:#x} has members above voter {arity}")]
    CoalitionOutOfRange { mask: u32, arity: u32 },
    #[error("majority needs an odd number of voters, got {0}")]
    EvenMajority(u32),
    #[error("issue budget exceeded: {0} issues (max 16)")]
    IssueBudget(u32),
    #[error("issue {issue} out of range for {issues} issues")]
    IssueOutOfRange { issue: u32, issues: u32 },
    #[error("empty agenda")]
    EmptyAgenda,
    #[error("invalid agenda: {0}")]
    InvalidAgenda(String),
    #[error("constraint matrix is rank deficient (rank {rank}, rows {rows})")]
    RankDeficient { rank: usize, rows: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("enumeration budget exceeded: {what} needs 2^{log2_size} steps (cap 2^{cap}){hint}")]
    Budget {
        what: &'static str,
        log2_size: u32,
        cap: u32,
        hint: &'static str,
    },
    #[error("inconsistent opinion {0:#b} in profile")]
    InconsistentProfile(u32),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("function depends on voter {0} outside the junta")]
    OutsideJunta(u32),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
