use alloc::string::String;
use core::fmt;

/// Errors raised by the core stack.
#[derive(Clone, Debug, PartialEq)]
pub enum NavError {
    InvalidPose,
    GoalAbsent(String),
    GenerationFailed(String),
    SamplingFailed(String),
    GridMismatch,
    NoHistory,
    Unreachable,
    ControllerStuck,
    TooManyChoices { frontiers: usize, letters: usize },
    SkippedTrajectory(String),
    EmptyBenchmark,
    InvalidConfig(String),
    Policy(PolicyError),
}

/// Failures of a frontier-selection policy. The runtime recovers from all of
/// them by falling back to the nearest frontier for that step.
#[derive(Clone, Debug, PartialEq)]
pub enum PolicyError {
    /// Transport failure or non-2xx reply.
    Endpoint(String),
    /// Reply letter not among the presented choices.
    InvalidChoice(String),
    Timeout,
    /// Reply body did not parse.
    Format(String),
}

impl fmt::Display for NavError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NavError::InvalidPose => f.write_str("pose is off-grid or not on a free cell"),
            NavError::GoalAbsent(c) => write!(f, "goal category {c:?} absent from scene"),
            NavError::GenerationFailed(m) => write!(f, "scene generation failed: {m}"),
            NavError::SamplingFailed(m) => write!(f, "episode sampling failed: {m}"),
            NavError::GridMismatch => f.write_str("grid geometry does not match the scan"),
            NavError::NoHistory => f.write_str("empty view history"),
            NavError::Unreachable => f.write_str("target unreachable"),
            NavError::ControllerStuck => f.write_str("waypoint unreachable in belief map"),
            NavError::TooManyChoices { frontiers, letters } => {
                write!(f, "{frontiers} frontiers exceed the {letters}-letter alphabet")
            }
            NavError::SkippedTrajectory(m) => write!(f, "trajectory skipped: {m}"),
            NavError::EmptyBenchmark => f.write_str("no episode results"),
            NavError::InvalidConfig(m) => write!(f, "invalid configuration: {m}"),
            NavError::Policy(e) => write!(f, "policy error: {e}"),
        }
    }
}

impl fmt::Display for PolicyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicyError::Endpoint(m) => write!(f, "endpoint error: {m}"),
            PolicyError::InvalidChoice(l) => write!(f, "invalid choice {l:?}"),
            PolicyError::Timeout => f.write_str("deadline exceeded"),
            PolicyError::Format(m) => write!(f, "malformed reply: {m}"),
        }
    }
}

impl core::error::Error for NavError {}
impl core::error::Error for PolicyError {}

impl From<PolicyError> for NavError {
    fn from(e: PolicyError) -> Self {
        NavError::Policy(e)
    }
}

pub type Result<T, E = NavError> = core::result::Result<T, E>;
