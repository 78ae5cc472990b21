use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::analysis::FunTable;
use crate::behaviours::Behaviour;
use crate::budget::Budget;
use crate::cds::{product_n, Cds};
use crate::error::Error;
use crate::seqalg::{exponential, SeqAlg};

use super::parser::{self, DefError};

/// A type expression over named structures: names, products `*`, arrows `->`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeExpr {
    Name(String),
    Product(Vec<TypeExpr>),
    Arrow(Box<TypeExpr>, Box<TypeExpr>),
}

impl TypeExpr {
    pub fn arrow(from: TypeExpr, to: TypeExpr) -> Self {
        TypeExpr::Arrow(Box::new(from), Box::new(to))
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeExpr::Name(n) => f.write_str(n),
            TypeExpr::Product(items) => {
                for (i, t) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" * ")?;
                    }
                    match t {
                        TypeExpr::Name(_) => write!(f, "{t}")?,
                        _ => write!(f, "({t})")?,
                    }
                }
                Ok(())
            }
            TypeExpr::Arrow(a, b) => match **a {
                TypeExpr::Arrow(..) => write!(f, "({a}) -> {b}"),
                _ => write!(f, "{a} -> {b}"),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Cds,
    Alg,
    Table,
    Behaviour,
}

impl Kind {
    pub fn keyword(self) -> &'static str {
        match self {
            Kind::Cds => "cds",
            Kind::Alg => "alg",
            Kind::Table => "table",
            Kind::Behaviour => "behaviour",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgDecl {
    pub from: TypeExpr,
    pub to: TypeExpr,
    pub alg: SeqAlg,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableDecl {
    pub from: TypeExpr,
    pub to: TypeExpr,
    pub table: FunTable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BehaviourDecl {
    pub from: TypeExpr,
    pub to: TypeExpr,
    pub tests: Vec<String>,
    pub behaviour: Behaviour,
}

/// Named structures, algorithms, tables and behaviours loaded from definition files.
#[derive(Clone, Debug, Default)]
pub struct Workspace {
    pub(crate) cds: IndexMap<String, Arc<Cds>>,
    pub(crate) algs: IndexMap<String, AlgDecl>,
    pub(crate) tables: IndexMap<String, TableDecl>,
    pub(crate) behaviours: IndexMap<String, BehaviourDecl>,
    pub(crate) order: Vec<(Kind, String)>,
    pub(crate) budget: Budget,
}

/// Entries and declaration order; the budget is not part of the contents.
impl PartialEq for Workspace {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.cds == other.cds
            && self.algs == other.algs
            && self.tables == other.tables
            && self.behaviours == other.behaviours
    }
}

impl Workspace {
    pub fn new() -> Self {
        Workspace::default()
    }

    pub fn with_budget(budget: Budget) -> Self {
        Workspace {
            budget,
            ..Workspace::default()
        }
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    /// Parses `text` against the current contents and adds its definitions.
    ///
    /// Either every definition is added or none is. Returns the new names in
    /// declaration order. Re-declaring a name with identical contents is a no-op.
    pub fn load(&mut self, text: &str) -> Result<Vec<(Kind, String)>, Vec<DefError>> {
        let mut next = self.clone();
        let added = parser::parse_into(&mut next, text)?;
        *self = next;
        Ok(added)
    }

    pub fn cds(&self, name: &str) -> Option<&Arc<Cds>> {
        self.cds.get(name)
    }

    pub fn alg(&self, name: &str) -> Option<&AlgDecl> {
        self.algs.get(name)
    }

    pub fn table(&self, name: &str) -> Option<&TableDecl> {
        self.tables.get(name)
    }

    pub fn behaviour(&self, name: &str) -> Option<&BehaviourDecl> {
        self.behaviours.get(name)
    }

    pub fn names(&self, kind: Kind) -> Vec<&str> {
        self.order
            .iter()
            .filter(|(k, _)| *k == kind)
            .map(|(_, n)| n.as_str())
            .collect()
    }

    pub fn order(&self) -> &[(Kind, String)] {
        &self.order
    }

    /// Builds the structure denoted by a type expression.
    pub fn resolve(&self, ty: &TypeExpr) -> Result<Arc<Cds>, ResolveError> {
        match ty {
            TypeExpr::Name(n) => self.cds.get(n).cloned().ok_or_else(|| ResolveError::UnknownName(n.clone())),
            TypeExpr::Product(items) => {
                let parts = items.iter().map(|t| self.resolve(t)).collect::<Result<Vec<_>, _>>()?;
                let refs: Vec<&Cds> = parts.iter().map(|p| &**p).collect();
                Ok(Arc::new(product_n(&refs)))
            }
            TypeExpr::Arrow(a, b) => {
                let (a, b) = (self.resolve(a)?, self.resolve(b)?);
                Ok(Arc::new(exponential(&a, &b, self.budget).map_err(ResolveError::Engine)?))
            }
        }
    }

    /// Pretty-prints every definition in declaration order.
    pub fn to_text(&self) -> String {
        super::printer::print_workspace(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResolveError {
    UnknownName(String),
    Engine(Error),
}

impl fmt::Display for ResolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResolveError::UnknownName(n) => write!(f, "unknown structure `{n}`"),
            ResolveError::Engine(e) => write!(f, "{e}"),
        }
    }
}
