//! Command-line plumbing for kodaira-core: problem files, the bundled example
//! corpus, table rendering and the subcommand bodies.
//!
//! Exit codes: 0 success, 1 I/O or usage error, 2 schema error, 3 invariant
//! violation, 4 mismatch against bundled reference data.

pub mod commands;
pub mod corpus;
pub mod output;
pub mod schema;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Io(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("golden mismatch:\n{0}")]
    Golden(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Io(_) => 1,
            Failure::Schema(_) => 2,
            Failure::Invariant(_) => 3,
            Failure::Golden(_) => 4,
        }
    }

    pub fn context(self, what: &str) -> Failure {
        match self {
            Failure::Io(m) => Failure::Io(format!("{}: {}", what, m)),
            Failure::Schema(m) => Failure::Schema(format!("{}: {}", what, m)),
            Failure::Invariant(m) => Failure::Invariant(format!("{}: {}", what, m)),
            Failure::Golden(m) => Failure::Golden(format!("{}: {}", what, m)),
        }
    }
}
