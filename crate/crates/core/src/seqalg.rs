//! Function spaces and sequential algorithms.
//!
//! The exponential `M -> N` is itself a [`Cds`]: its cells are `<x|-c'>` for
//! every state `x` of `M` and cell `c'` of `N`, its values are `valof c` and
//! `output v'`. A sequential algorithm is a state of that structure.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::budget::Budget;
use crate::cds::{
    accessible_cells, check_state, enumerate_states, make_cds, safe_closure, Cds, Cell, Event,
    Precondition, State, Value,
};
use crate::error::{Error, Result, Violation};

pub use crate::cds::FunCell;

/// The function space `m -> n`, restricted to reachable input states.
pub fn exponential(m: &Cds, n: &Cds, budget: Budget) -> Result<Cds> {
    let inputs = enumerate_states(m, budget)?;
    budget.check(inputs.len() * n.cells().len().max(1))?;

    let mut cells = Vec::new();
    let mut events = Vec::new();
    let mut enabling = Vec::new();
    for x in &inputs {
        let acc = accessible_cells(m, x);
        for out in n.cells() {
            let cell = Cell::fun(x.clone(), out.clone());
            cells.push(cell.clone());
            for c in &acc {
                let ev = Event::new(cell.clone(), Value::Valof(c.clone()));
                events.push(ev.clone());
                for v in m.values_of(c) {
                    let next = Cell::fun(x.with(c.clone(), v.clone()), out.clone());
                    enabling.push((next, Precondition::Event(ev.clone())));
                }
            }
            for v in n.values_of(out) {
                events.push(Event::new(cell.clone(), Value::output(v.clone())));
            }
            for p in n.preconditions(out) {
                match p {
                    Precondition::Initial if x.is_empty() => {
                        enabling.push((cell.clone(), Precondition::Initial));
                    }
                    Precondition::Initial => {}
                    Precondition::Event(e) => {
                        let from = Cell::fun(x.clone(), e.cell.clone());
                        let ev = Event::new(from, Value::output(e.value.clone()));
                        enabling.push((cell.clone(), Precondition::Event(ev)));
                    }
                }
            }
        }
    }
    let values = m
        .cells()
        .iter()
        .map(|c| Value::Valof(c.clone()))
        .chain(n.values().iter().map(|v| Value::output(v.clone())));
    make_cds(format!("({} -> {})", m.name(), n.name()), cells, values, events, enabling)
}

/// A validated sequential algorithm from `from` to `to`.
#[derive(Clone)]
pub struct SeqAlg {
    from: Arc<Cds>,
    to: Arc<Cds>,
    space: Arc<Cds>,
    state: State,
}

impl PartialEq for SeqAlg {
    fn eq(&self, other: &Self) -> bool {
        self.state == other.state && self.from == other.from && self.to == other.to
    }
}

impl Eq for SeqAlg {}

impl fmt::Debug for SeqAlg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SeqAlg({} : {})", self.state, self.space.name())
    }
}

impl SeqAlg {
    pub fn from_cds(&self) -> &Arc<Cds> {
        &self.from
    }

    pub fn to_cds(&self) -> &Arc<Cds> {
        &self.to
    }

    /// The exponential this algorithm is a state of.
    pub fn space(&self) -> &Arc<Cds> {
        &self.space
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn len(&self) -> usize {
        self.state.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state.is_empty()
    }

    /// The move at `<input|-out>`, if any.
    pub fn move_at(&self, input: &State, out: &Cell) -> Option<&Value> {
        self.state.get(&Cell::fun(input.clone(), out.clone()))
    }

    /// Events as `(input, output cell, move)` triples in canonical order.
    pub fn moves(&self) -> impl Iterator<Item = (&State, &Cell, &Value)> {
        self.state.iter().filter_map(|(c, v)| c.as_fun().map(|fc| (&fc.input, &fc.output, v)))
    }

    /// Wraps a state already known to belong to `space = exponential(from, to)`.
    pub(crate) fn from_parts(from: Arc<Cds>, to: Arc<Cds>, space: Arc<Cds>, state: State) -> Self {
        SeqAlg {
            from,
            to,
            space,
            state,
        }
    }
}

/// Validates `evs` as a state of `space`, which must be `exponential(from, to)`.
pub fn validate_in(
    from: &Arc<Cds>,
    to: &Arc<Cds>,
    space: &Arc<Cds>,
    evs: impl IntoIterator<Item = Event>,
) -> Result<SeqAlg> {
    match check_state(space, evs) {
        Ok(state) => Ok(SeqAlg::from_parts(from.clone(), to.clone(), space.clone(), state)),
        Err(Error::Invalid(vs)) => {
            let refined = vs.0.into_iter().map(refine_violation).collect();
            Err(Error::invalid(refined))
        }
        Err(e) => Err(e),
    }
}

fn refine_violation(v: Violation) -> Violation {
    if let Violation::NotAnEvent { cell, value: Value::Valof(asked) } = &v {
        if let Some(fc) = cell.as_fun() {
            if fc.input.is_filled(asked) {
                return Violation::ValofFilledCell {
                    cell: cell.clone(),
                    asked: asked.clone(),
                };
            }
        }
    }
    v
}

pub fn validate_algorithm(
    from: &Arc<Cds>,
    to: &Arc<Cds>,
    evs: impl IntoIterator<Item = Event>,
    budget: Budget,
) -> Result<SeqAlg> {
    let space = Arc::new(exponential(from, to, budget)?);
    validate_in(from, to, &space, evs)
}

/// Every algorithm from `from` to `to`, in the canonical state order.
pub fn enumerate_algorithms(from: &Arc<Cds>, to: &Arc<Cds>, budget: Budget) -> Result<Vec<SeqAlg>> {
    let space = Arc::new(exponential(from, to, budget)?);
    Ok(enumerate_states(&space, budget)?
        .into_iter()
        .map(|s| SeqAlg::from_parts(from.clone(), to.clone(), space.clone(), s))
        .collect())
}

/// The copycat algorithm on `m`: ask the requested cell, echo its value.
pub fn identity_algorithm(m: &Arc<Cds>, budget: Budget) -> Result<SeqAlg> {
    let space = Arc::new(exponential(m, m, budget)?);
    let mut candidates = BTreeMap::new();
    for x in enumerate_states(m, budget)? {
        for c in accessible_cells(m, &x) {
            candidates.insert(Cell::fun(x.clone(), c.clone()), Value::Valof(c));
        }
        for (c, v) in x.iter() {
            candidates.insert(Cell::fun(x.clone(), c.clone()), Value::output(v.clone()));
        }
    }
    let state = safe_closure(&space, &candidates);
    Ok(SeqAlg::from_parts(m.clone(), m.clone(), space, state))
}

/// The algorithm that outputs `y` without reading its input.
pub fn constant_algorithm(from: &Arc<Cds>, to: &Arc<Cds>, y: &State, budget: Budget) -> Result<SeqAlg> {
    let evs = y
        .iter()
        .map(|(c, v)| Event::new(Cell::fun(State::new(), c.clone()), Value::output(v.clone())));
    validate_algorithm(from, to, evs, budget)
}
