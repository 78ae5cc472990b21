//! Text format for structures, algorithms, tables and behaviours.

pub mod lexer;
pub mod parser;
pub mod printer;
pub mod workspace;

pub use parser::{parse_cell, parse_definitions, parse_events, parse_type, parse_value, DefError, DefErrorKind};
pub use printer::{print_cds, print_workspace};
pub use workspace::{AlgDecl, BehaviourDecl, Kind, ResolveError, TableDecl, TypeExpr, Workspace};
