//! Concrete data structures and sequential algorithms.
//!
//! Data are states of a [`Cds`]; functions are sequential algorithms, i.e.
//! states of an exponential structure whose values are `valof c` and
//! `output v`. Applying an algorithm is a dialogue ([`interaction`]) in
//! which control passes back and forth between function and argument.
//! On top of that sit the classifiers of [`analysis`] (monotone, stable,
//! sequential) and the test-based types of [`behaviours`].

pub mod analysis;
pub mod behaviours;
pub mod budget;
pub mod cds;
pub mod error;
pub mod fixtures;
pub mod interaction;
pub mod seqalg;
pub mod syntax;

pub use budget::Budget;
pub use cds::{
    accessible_cells, check_state, enumerate_states, lift_err, make_cds, product, product_n, Cds, Cell, Event,
    Precondition, State, Value,
};
pub use error::{Error, Result, Violation};
pub use interaction::{apply, compose, fun_of, Answer, ArgumentProcess, Move, Outcome, Session, Trace};
pub use seqalg::{enumerate_algorithms, exponential, identity_algorithm, validate_algorithm, SeqAlg};
