use std::fmt;

use thiserror::Error;

use crate::cds::{Cell, State, Value};

/// A single reason why a structure, state or algorithm was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("unknown cell `{0}`")]
    UnknownCell(Cell),
    #[error("unknown value `{0}`")]
    UnknownValue(Value),
    #[error("cell `{0}` has no enabling precondition")]
    NoPrecondition(Cell),
    #[error("identifier `{0}` declared more than once")]
    DuplicateId(String),
    #[error("`{cell}={value}` is not an event of the structure")]
    NotAnEvent { cell: Cell, value: Value },
    #[error("cell `{cell}` filled twice ({first} and {second})")]
    NotFunctional { cell: Cell, first: Value, second: Value },
    #[error("cell `{0}` is not justified by the enabling relation")]
    NotSafe(Cell),
    #[error("`{cell}` asks for `{asked}`, which is already filled in its input state")]
    ValofFilledCell { cell: Cell, asked: Cell },
    #[error("no row for input state {0}")]
    MissingRow(State),
    #[error("row for {0}, which is not a state of the input structure")]
    UnknownRow(State),
    #[error("image of {input} is not a state of the output structure: {reason}")]
    BadImage { input: State, reason: Box<Violation> },
}

/// Wrapper used to display a violation list on one line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violations(pub Vec<Violation>);

impl fmt::Display for Violations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid: {0}")]
    Invalid(Violations),
    #[error("`err` is already a value of `{0}`")]
    ErrAlreadyPresent(String),
    #[error("state budget of {0} exceeded")]
    BudgetExceeded(usize),
    #[error("`{0}` is not a cell of the output structure")]
    RequestUnknownCell(Cell),
    #[error("argument answered `{cell}={value}`, which is not an event of the input structure")]
    ArgumentAnswerIllTyped { cell: Cell, value: Value },
    #[error("no pending valof to answer")]
    WrongPhase,
    #[error("a dialogue is waiting for an answer")]
    DialoguePending,
    #[error("middle structures of the composition differ")]
    MiddleMismatch,
    #[error("table is not monotone")]
    NotMonotone,
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("`{0}` is not a field of the record structure")]
    UnknownField(Cell),
}

impl Error {
    pub fn invalid(violations: Vec<Violation>) -> Self {
        Error::Invalid(Violations(violations))
    }

    /// The violation list when this is a validation failure.
    pub fn violations(&self) -> &[Violation] {
        match self {
            Error::Invalid(v) => &v.0,
            _ => &[],
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
