use thiserror::Error;

use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid case: {}", join_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("demand calibration failed at bus {bus}, period {period}: {reason}")]
    Calibration {
        bus: u32,
        period: usize,
        reason: String,
    },

    #[error("network is disconnected: bus {bus} is unreachable from the reference bus")]
    Topology { bus: u32 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("injections do not balance in period {period} (sum = {sum:e})")]
    Unbalanced { period: usize, sum: f64 },

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("forward baseline has no quantity for generator {generator} to bus {bus} in period {period}")]
    MissingBaseline {
        generator: String,
        bus: u32,
        period: usize,
    },

    #[error("pivot breakdown: row {row} is not satisfied at the final basis")]
    PivotBreakdown { row: usize },

    #[error("solver stopped with status {status:?} after {pivots} pivots")]
    Solver {
        status: crate::solver::SolveStatus,
        pivots: usize,
    },

    #[error("batch load {load} exceeds deliverable throughput {limit} in period {period}")]
    Infeasible { period: usize, load: f64, limit: f64 },

    #[error("ex ante intensities did not converge after {iterations} iterations (last step {last_step:e})")]
    NoConvergence {
        iterations: usize,
        last_step: f64,
        trajectory: Vec<Vec<f64>>,
    },

    #[error("case file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Invalid(_) => "invalid-case",
            Error::Calibration { .. } => "calibration",
            Error::Topology { .. } => "topology",
            Error::Numerical(_) => "numerical",
            Error::Unbalanced { .. } => "unbalanced",
            Error::Assembly(_) => "assembly",
            Error::MissingBaseline { .. } => "missing-baseline",
            Error::PivotBreakdown { .. } => "pivot-breakdown",
            Error::Solver { .. } => "solver",
            Error::Infeasible { .. } => "infeasible",
            Error::NoConvergence { .. } => "no-convergence",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }

    /// True when the input was at fault rather than the solve.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            Error::Numerical(_)
                | Error::PivotBreakdown { .. }
                | Error::Solver { .. }
                | Error::Infeasible { .. }
                | Error::NoConvergence { .. }
        )
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_failures_are_not_input_errors() {
        let e = Error::Infeasible {
            period: 0,
            load: 60.0,
            limit: 50.0,
        };
        assert_eq!(e.code(), "infeasible");
        assert!(!e.is_input_error());
        assert!(e.to_string().contains("60") && e.to_string().contains("50"));
        assert!(Error::Parse("x".into()).is_input_error());
        assert!(Error::Assembly("x".into()).is_input_error());
    }

    #[test]
    fn violations_are_joined() {
        let v = vec![
            Violation {
                field: "a".into(),
                message: "bad".into(),
            },
            Violation {
                field: "b".into(),
                message: "worse".into(),
            },
        ];
        assert_eq!(Error::Invalid(v).to_string(), "invalid case: a: bad; b: worse");
    }
}
