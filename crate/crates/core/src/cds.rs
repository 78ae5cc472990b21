//! Concrete data structures: cells, values, events, enabling, and states.
//!
//! A [`Cds`] is a finite set of cells, each of which can be filled with one
//! of a finite set of values. Which `(cell, value)` pairs are allowed is given
//! by its events, and when a cell may be filled is given by its enabling
//! preconditions: either the cell is initial, or some single event enables it.
//! A [`State`] is a functional, safely-enabled set of events.
//!
//! Cells and values are structured terms so that products (tagged cells) and
//! function spaces (cells `<x|-c>`, values `valof c` / `output v`) are
//! ordinary structures handled by the same machinery.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::budget::Budget;
use crate::error::{Error, Result, Violation};

/// Reserved name of the error value.
pub const ERR: &str = "err";

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(s: &str) -> Self {
        Symbol(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// A cell of a function space: the question "what do you do at output cell
/// `output` once you have read `input`?".
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunCell {
    pub input: State,
    pub output: Cell,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cell {
    Name(Symbol),
    /// Coordinate `tag` of a product, written `tag.cell`.
    Tagged(u32, Arc<Cell>),
    /// Function-space cell, written `<{..}|-c>`.
    Fun(Arc<FunCell>),
}

impl Cell {
    pub fn name(s: &str) -> Self {
        Cell::Name(Symbol::new(s))
    }

    pub fn tagged(tag: u32, cell: Cell) -> Self {
        Cell::Tagged(tag, Arc::new(cell))
    }

    pub fn fun(input: State, output: Cell) -> Self {
        Cell::Fun(Arc::new(FunCell { input, output }))
    }

    pub fn as_fun(&self) -> Option<&FunCell> {
        match self {
            Cell::Fun(fc) => Some(fc),
            _ => None,
        }
    }

    /// Strips the product tag when it equals `tag`.
    pub fn untag(&self, tag: u32) -> Option<&Cell> {
        match self {
            Cell::Tagged(t, c) if *t == tag => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Name(s) => write!(f, "{s}"),
            Cell::Tagged(t, c) => write!(f, "{t}.{c}"),
            Cell::Fun(fc) => write!(f, "<{}|-{}>", fc.input, fc.output),
        }
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Name(Symbol),
    /// Function-space value: the algorithm needs input cell `c`.
    Valof(Cell),
    /// Function-space value: the algorithm emits `v` at its output cell.
    Output(Arc<Value>),
}

impl Value {
    pub fn name(s: &str) -> Self {
        Value::Name(Symbol::new(s))
    }

    pub fn err() -> Self {
        Value::name(ERR)
    }

    pub fn output(v: Value) -> Self {
        Value::Output(Arc::new(v))
    }

    pub fn is_err(&self) -> bool {
        matches!(self, Value::Name(s) if s.as_str() == ERR)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Name(s) => write!(f, "{s}"),
            Value::Valof(c) => write!(f, "valof {c}"),
            Value::Output(v) => write!(f, "output {v}"),
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Event {
    pub cell: Cell,
    pub value: Value,
}

impl Event {
    pub fn new(cell: Cell, value: Value) -> Self {
        Event { cell, value }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.cell, self.value)
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A finite set of events with at most one value per cell.
///
/// Constructing a `State` directly (through `FromIterator` or [`State::with`])
/// does not check safety against any structure; use [`check_state`] for that.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(BTreeMap<Cell, Value>);

impl State {
    pub fn new() -> Self {
        State(BTreeMap::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, cell: &Cell) -> Option<&Value> {
        self.0.get(cell)
    }

    pub fn is_filled(&self, cell: &Cell) -> bool {
        self.0.contains_key(cell)
    }

    pub fn contains(&self, event: &Event) -> bool {
        self.0.get(&event.cell) == Some(&event.value)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Cell, &Value)> {
        self.0.iter()
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.0.keys()
    }

    pub fn events(&self) -> impl Iterator<Item = Event> + '_ {
        self.0.iter().map(|(c, v)| Event::new(c.clone(), v.clone()))
    }

    /// `self ∪ {(cell, value)}`.
    pub fn with(&self, cell: Cell, value: Value) -> State {
        let mut next = self.clone();
        next.0.insert(cell, value);
        next
    }

    pub(crate) fn insert(&mut self, cell: Cell, value: Value) {
        self.0.insert(cell, value);
    }

    pub fn remove(&self, cell: &Cell) -> State {
        let mut next = self.clone();
        next.0.remove(cell);
        next
    }

    pub fn is_subset(&self, other: &State) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().all(|(c, v)| other.0.get(c) == Some(v))
    }

    /// Event-set intersection.
    pub fn meet(&self, other: &State) -> State {
        self.0
            .iter()
            .filter(|(c, v)| other.0.get(*c) == Some(*v))
            .map(|(c, v)| (c.clone(), v.clone()))
            .collect()
    }

    /// Event-set union, or `None` when the two disagree on some cell.
    pub fn join(&self, other: &State) -> Option<State> {
        let mut out = self.clone();
        for (c, v) in &other.0 {
            match out.0.get(c) {
                Some(w) if w != v => return None,
                _ => {
                    out.0.insert(c.clone(), v.clone());
                }
            }
        }
        Some(out)
    }

    pub fn has_err(&self) -> bool {
        self.0.values().any(Value::is_err)
    }

    /// Events of coordinate `tag`, with the tag stripped.
    pub fn project(&self, tag: u32) -> State {
        self.0
            .iter()
            .filter_map(|(c, v)| c.untag(tag).map(|c| (c.clone(), v.clone())))
            .collect()
    }

    /// Tags every cell with `tag`.
    pub fn inject(&self, tag: u32) -> State {
        self.0
            .iter()
            .map(|(c, v)| (Cell::tagged(tag, c.clone()), v.clone()))
            .collect()
    }
}

impl FromIterator<(Cell, Value)> for State {
    fn from_iter<I: IntoIterator<Item = (Cell, Value)>>(iter: I) -> Self {
        State(iter.into_iter().collect())
    }
}

impl FromIterator<Event> for State {
    fn from_iter<I: IntoIterator<Item = Event>>(iter: I) -> Self {
        State(iter.into_iter().map(|e| (e.cell, e.value)).collect())
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (c, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}={v}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Precondition {
    Initial,
    Event(Event),
}

/// A finite concrete data structure with single-event enablings.
#[derive(Clone, Debug)]
pub struct Cds {
    name: String,
    cells: BTreeSet<Cell>,
    values: BTreeSet<Value>,
    events: BTreeMap<Cell, BTreeSet<Value>>,
    enabling: BTreeMap<Cell, BTreeSet<Precondition>>,
    initial: BTreeSet<Cell>,
    enables: BTreeMap<Event, BTreeSet<Cell>>,
}

/// Structural equality; the display name is ignored.
impl PartialEq for Cds {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other)
            || self.cells == other.cells
            && self.values == other.values
            && self.events == other.events
            && self.enabling == other.enabling
    }
}

impl Eq for Cds {}

impl Cds {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn cells(&self) -> &BTreeSet<Cell> {
        &self.cells
    }

    pub fn values(&self) -> &BTreeSet<Value> {
        &self.values
    }

    pub fn has_cell(&self, cell: &Cell) -> bool {
        self.cells.contains(cell)
    }

    pub fn values_of(&self, cell: &Cell) -> impl Iterator<Item = &Value> {
        self.events.get(cell).into_iter().flatten()
    }

    pub fn has_event(&self, cell: &Cell, value: &Value) -> bool {
        self.events.get(cell).is_some_and(|vs| vs.contains(value))
    }

    pub fn events(&self) -> impl Iterator<Item = Event> + '_ {
        self.events
            .iter()
            .flat_map(|(c, vs)| vs.iter().map(move |v| Event::new(c.clone(), v.clone())))
    }

    pub fn event_count(&self) -> usize {
        self.events.values().map(BTreeSet::len).sum()
    }

    pub fn preconditions(&self, cell: &Cell) -> impl Iterator<Item = &Precondition> {
        self.enabling.get(cell).into_iter().flatten()
    }

    pub fn is_initial(&self, cell: &Cell) -> bool {
        self.initial.contains(cell)
    }

    /// Cells enabled by `event`.
    pub fn enabled_by(&self, event: &Event) -> impl Iterator<Item = &Cell> {
        self.enables.get(event).into_iter().flatten()
    }

    /// True when `cell` has a precondition that is initial or an event of `x`.
    pub fn is_enabled_in(&self, cell: &Cell, x: &State) -> bool {
        self.preconditions(cell).any(|p| match p {
            Precondition::Initial => true,
            Precondition::Event(e) => x.contains(e),
        })
    }

    fn build(
        name: String,
        cells: BTreeSet<Cell>,
        values: BTreeSet<Value>,
        events: BTreeMap<Cell, BTreeSet<Value>>,
        enabling: BTreeMap<Cell, BTreeSet<Precondition>>,
    ) -> Cds {
        let mut initial = BTreeSet::new();
        let mut enables: BTreeMap<Event, BTreeSet<Cell>> = BTreeMap::new();
        for (cell, pres) in &enabling {
            for p in pres {
                match p {
                    Precondition::Initial => {
                        initial.insert(cell.clone());
                    }
                    Precondition::Event(e) => {
                        enables.entry(e.clone()).or_default().insert(cell.clone());
                    }
                }
            }
        }
        Cds {
            name,
            cells,
            values,
            events,
            enabling,
            initial,
            enables,
        }
    }
}

/// Builds a structure, reporting every violated invariant at once.
pub fn make_cds(
    name: impl Into<String>,
    cells: impl IntoIterator<Item = Cell>,
    values: impl IntoIterator<Item = Value>,
    events: impl IntoIterator<Item = Event>,
    enabling: impl IntoIterator<Item = (Cell, Precondition)>,
) -> Result<Cds> {
    let mut violations = Vec::new();

    let mut cell_set = BTreeSet::new();
    for c in cells {
        if !cell_set.insert(c.clone()) {
            violations.push(Violation::DuplicateId(c.to_string()));
        }
    }
    let mut value_set = BTreeSet::new();
    for v in values {
        if !value_set.insert(v.clone()) {
            violations.push(Violation::DuplicateId(v.to_string()));
        }
    }
    let cell_names: BTreeSet<String> = cell_set.iter().map(Cell::to_string).collect();
    for v in &value_set {
        let s = v.to_string();
        if cell_names.contains(&s) {
            violations.push(Violation::DuplicateId(s));
        }
    }

    let mut event_map: BTreeMap<Cell, BTreeSet<Value>> =
        cell_set.iter().map(|c| (c.clone(), BTreeSet::new())).collect();
    let check_event = |e: &Event, violations: &mut Vec<Violation>| -> bool {
        let mut ok = true;
        if !cell_set.contains(&e.cell) {
            violations.push(Violation::UnknownCell(e.cell.clone()));
            ok = false;
        }
        if !value_set.contains(&e.value) {
            violations.push(Violation::UnknownValue(e.value.clone()));
            ok = false;
        }
        ok
    };
    for e in events {
        if check_event(&e, &mut violations) {
            event_map.entry(e.cell).or_default().insert(e.value);
        }
    }

    let mut enabling_map: BTreeMap<Cell, BTreeSet<Precondition>> = BTreeMap::new();
    for (cell, pre) in enabling {
        if !cell_set.contains(&cell) {
            violations.push(Violation::UnknownCell(cell));
            continue;
        }
        if let Precondition::Event(e) = &pre {
            if !check_event(e, &mut violations) {
                continue;
            }
            if !event_map.get(&e.cell).is_some_and(|vs| vs.contains(&e.value)) {
                violations.push(Violation::NotAnEvent {
                    cell: e.cell.clone(),
                    value: e.value.clone(),
                });
                continue;
            }
        }
        enabling_map.entry(cell).or_default().insert(pre);
    }
    for c in &cell_set {
        if !enabling_map.contains_key(c) {
            violations.push(Violation::NoPrecondition(c.clone()));
        }
    }

    if violations.is_empty() {
        Ok(Cds::build(name.into(), cell_set, value_set, event_map, enabling_map))
    } else {
        Err(Error::invalid(violations))
    }
}

/// Largest subset of `candidates` that is justified from the initial cells.
///
/// Candidates that are not events of `d` are dropped.
pub fn safe_closure(d: &Cds, candidates: &BTreeMap<Cell, Value>) -> State {
    let mut out = State::new();
    let mut queue: VecDeque<&Cell> = candidates
        .keys()
        .filter(|c| d.is_initial(c))
        .collect();
    while let Some(c) = queue.pop_front() {
        if out.is_filled(c) {
            continue;
        }
        let v = &candidates[c];
        if !d.has_event(c, v) {
            continue;
        }
        out.insert(c.clone(), v.clone());
        let e = Event::new(c.clone(), v.clone());
        for next in d.enabled_by(&e) {
            if let Some((k, _)) = candidates.get_key_value(next) {
                if !out.is_filled(k) {
                    queue.push_back(k);
                }
            }
        }
    }
    out
}

/// Validates a set of events as a state of `d`.
pub fn check_state(d: &Cds, evs: impl IntoIterator<Item = Event>) -> Result<State> {
    let mut violations = Vec::new();
    let mut map: BTreeMap<Cell, Value> = BTreeMap::new();
    let mut seen = BTreeSet::new();
    for e in evs {
        if !seen.insert(e.clone()) {
            continue;
        }
        if !d.has_cell(&e.cell) {
            violations.push(Violation::UnknownCell(e.cell));
            continue;
        }
        if !d.has_event(&e.cell, &e.value) {
            violations.push(Violation::NotAnEvent {
                cell: e.cell,
                value: e.value,
            });
            continue;
        }
        match map.get(&e.cell) {
            Some(first) => violations.push(Violation::NotFunctional {
                cell: e.cell.clone(),
                first: first.clone(),
                second: e.value,
            }),
            None => {
                map.insert(e.cell, e.value);
            }
        }
    }
    let closed = safe_closure(d, &map);
    for c in map.keys() {
        if !closed.is_filled(c) {
            violations.push(Violation::NotSafe(c.clone()));
        }
    }
    if violations.is_empty() {
        Ok(closed)
    } else {
        Err(Error::invalid(violations))
    }
}

/// Cells unfilled in `x` with a precondition that is initial or an event of `x`.
pub fn accessible_cells(d: &Cds, x: &State) -> BTreeSet<Cell> {
    let mut out: BTreeSet<Cell> = d.initial.iter().filter(|c| !x.is_filled(c)).cloned().collect();
    for e in x.events() {
        for c in d.enabled_by(&e) {
            if !x.is_filled(c) {
                out.insert(c.clone());
            }
        }
    }
    out
}

/// All states of `d`, breadth-first by size; within one size, in canonical order.
pub fn enumerate_states(d: &Cds, budget: Budget) -> Result<Vec<State>> {
    let mut out = vec![State::new()];
    let mut level = vec![State::new()];
    while !level.is_empty() {
        let mut next = BTreeSet::new();
        for x in &level {
            for c in accessible_cells(d, x) {
                for v in d.values_of(&c) {
                    next.insert(x.with(c.clone(), v.clone()));
                    budget.check(out.len() + next.len())?;
                }
            }
        }
        level = next.into_iter().collect();
        out.extend(level.iter().cloned());
    }
    Ok(out)
}

/// Product of several structures; coordinate `i` (1-based) has its cells tagged `i.`.
pub fn product_n(ds: &[&Cds]) -> Cds {
    let name = ds
        .iter()
        .map(|d| d.name.as_str())
        .collect::<Vec<_>>()
        .join("*");
    let mut cells = BTreeSet::new();
    let mut values = BTreeSet::new();
    let mut events: BTreeMap<Cell, BTreeSet<Value>> = BTreeMap::new();
    let mut enabling: BTreeMap<Cell, BTreeSet<Precondition>> = BTreeMap::new();
    for (i, d) in ds.iter().enumerate() {
        let tag = i as u32 + 1;
        values.extend(d.values.iter().cloned());
        for c in &d.cells {
            cells.insert(Cell::tagged(tag, c.clone()));
        }
        for (c, vs) in &d.events {
            events.insert(Cell::tagged(tag, c.clone()), vs.clone());
        }
        for (c, pres) in &d.enabling {
            let tagged = pres
                .iter()
                .map(|p| match p {
                    Precondition::Initial => Precondition::Initial,
                    Precondition::Event(e) => Precondition::Event(Event::new(
                        Cell::tagged(tag, e.cell.clone()),
                        e.value.clone(),
                    )),
                })
                .collect();
            enabling.insert(Cell::tagged(tag, c.clone()), tagged);
        }
    }
    Cds::build(name, cells, values, events, enabling)
}

pub fn product(d1: &Cds, d2: &Cds) -> Cds {
    product_n(&[d1, d2])
}

/// Adds the value `err`, fillable in every cell; enabling is unchanged.
pub fn lift_err(d: &Cds) -> Result<Cds> {
    let err = Value::err();
    if d.values.contains(&err) {
        return Err(Error::ErrAlreadyPresent(d.name.clone()));
    }
    let mut values = d.values.clone();
    values.insert(err.clone());
    let mut events = d.events.clone();
    for c in &d.cells {
        events.entry(c.clone()).or_default().insert(err.clone());
    }
    Ok(Cds::build(
        format!("{}+err", d.name),
        d.cells.clone(),
        values,
        events,
        d.enabling.clone(),
    ))
}

/// `d` itself when it already carries `err`, otherwise [`lift_err`]`(d)`.
pub fn with_err(d: &Cds) -> Cds {
    lift_err(d).unwrap_or_else(|_| d.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Cell {
        Cell::name(s)
    }

    fn v(s: &str) -> Value {
        Value::name(s)
    }

    fn flat(name: &str, cells: &[&str], values: &[&str]) -> Cds {
        let cs: Vec<Cell> = cells.iter().map(|c| n(c)).collect();
        make_cds(
            name,
            cs.clone(),
            values.iter().map(|x| v(x)),
            cs.iter()
                .flat_map(|c| values.iter().map(move |x| Event::new(c.clone(), v(x)))),
            cs.iter().map(|c| (c.clone(), Precondition::Initial)),
        )
        .unwrap()
    }

    /// q is enabled only by p=tt.
    fn chain() -> Cds {
        make_cds(
            "chain",
            [n("p"), n("q")],
            [v("tt"), v("ff")],
            [
                Event::new(n("p"), v("tt")),
                Event::new(n("p"), v("ff")),
                Event::new(n("q"), v("tt")),
            ],
            [
                (n("p"), Precondition::Initial),
                (n("q"), Precondition::Event(Event::new(n("p"), v("tt")))),
            ],
        )
        .unwrap()
    }

    fn o() -> Cds {
        make_cds("o", [n("?")], [], [], [(n("?"), Precondition::Initial)]).unwrap()
    }

    fn st(pairs: &[(&str, &str)]) -> Vec<Event> {
        pairs.iter().map(|(c, x)| Event::new(n(c), v(x))).collect()
    }

    #[test]
    fn flat_b3_accepts_partial_tuple() {
        let b3 = flat("B3", &["a", "b", "c"], &["tt", "ff"]);
        let x = check_state(&b3, st(&[("a", "tt"), ("b", "ff")])).unwrap();
        assert_eq!(x.to_string(), "{a=tt,b=ff}");
    }

    #[test]
    fn undeclared_value_is_reported() {
        let err = make_cds(
            "bad",
            [n("a")],
            [v("tt")],
            [Event::new(n("a"), v("zz"))],
            [(n("a"), Precondition::Initial)],
        )
        .unwrap_err();
        assert_eq!(err.violations(), &[Violation::UnknownValue(v("zz"))]);
    }

    #[test]
    fn missing_precondition_and_duplicates() {
        let err = make_cds("bad", [n("a"), n("a"), n("b")], [v("b")], [], [(n("a"), Precondition::Initial)])
            .unwrap_err();
        let vs = err.violations();
        assert!(vs.contains(&Violation::DuplicateId("a".into())));
        assert!(vs.contains(&Violation::DuplicateId("b".into())));
        assert!(vs.contains(&Violation::NoPrecondition(n("b"))));
    }

    #[test]
    fn same_cell_twice_is_not_functional() {
        let b3 = flat("B3", &["a", "b", "c"], &["tt", "ff"]);
        let err = check_state(&b3, st(&[("a", "tt"), ("a", "ff")])).unwrap_err();
        assert!(matches!(err.violations(), [Violation::NotFunctional { .. }]));
    }

    #[test]
    fn missing_justifier_is_not_safe() {
        let err = check_state(&chain(), st(&[("q", "tt")])).unwrap_err();
        assert_eq!(err.violations(), &[Violation::NotSafe(n("q"))]);
        assert!(check_state(&chain(), st(&[("p", "tt"), ("q", "tt")])).is_ok());
        // p=ff does not enable q
        assert!(check_state(&chain(), st(&[("p", "ff"), ("q", "tt")])).is_err());
    }

    #[test]
    fn accessible_cells_examples() {
        let b3 = flat("B3", &["a", "b", "c"], &["tt", "ff"]);
        let all: BTreeSet<Cell> = [n("a"), n("b"), n("c")].into();
        assert_eq!(accessible_cells(&b3, &State::new()), all);
        let x = check_state(&b3, st(&[("b", "tt")])).unwrap();
        assert_eq!(accessible_cells(&b3, &x), [n("a"), n("c")].into());
        assert_eq!(accessible_cells(&chain(), &State::new()), [n("p")].into());
    }

    #[test]
    fn state_counts() {
        let b = flat("B", &["out"], &["tt", "ff"]);
        assert_eq!(enumerate_states(&b, Budget::default()).unwrap().len(), 3);
        assert_eq!(enumerate_states(&o(), Budget::default()).unwrap().len(), 1);
        let oo = product(&o(), &o());
        assert_eq!(oo.cells().len(), 2);
        assert_eq!(oo.cells().iter().map(|c| c.to_string()).collect::<Vec<_>>(), ["1.?", "2.?"]);
        assert_eq!(enumerate_states(&oo, Budget::default()).unwrap(), vec![State::new()]);
        assert_eq!(enumerate_states(&product(&b, &b), Budget::default()).unwrap().len(), 9);
        assert_eq!(enumerate_states(&lift_err(&b).unwrap(), Budget::default()).unwrap().len(), 4);
        assert_eq!(enumerate_states(&chain(), Budget::default()).unwrap().len(), 4);
    }

    #[test]
    fn product_with_empty_is_unit() {
        let b = flat("B", &["out"], &["tt", "ff"]);
        let empty = make_cds("E", [], [], [], []).unwrap();
        let states = enumerate_states(&product(&b, &empty), Budget::default()).unwrap();
        let projected: Vec<State> = states.iter().map(|z| z.project(1)).collect();
        assert_eq!(projected, enumerate_states(&b, Budget::default()).unwrap());
    }

    #[test]
    fn lift_err_on_o_and_twice() {
        let lo = lift_err(&o()).unwrap();
        assert!(lo.has_event(&n("?"), &Value::err()));
        assert_eq!(lo.event_count(), 1);
        assert!(matches!(lift_err(&lo), Err(Error::ErrAlreadyPresent(_))));
    }

    #[test]
    fn enumeration_respects_budget() {
        let b3 = flat("B3", &["a", "b", "c"], &["tt", "ff"]);
        assert_eq!(enumerate_states(&b3, Budget::default()).unwrap().len(), 27);
        assert!(matches!(enumerate_states(&b3, Budget::new(10)), Err(Error::BudgetExceeded(10))));
    }

    #[test]
    fn display_forms() {
        let x: State = [(n("b"), v("tt")), (n("a"), v("tt"))].into_iter().collect();
        let c = Cell::fun(x, n("out"));
        assert_eq!(c.to_string(), "<{a=tt,b=tt}|-out>");
        assert_eq!(Value::Valof(Cell::tagged(2, n("in"))).to_string(), "valof 2.in");
        assert_eq!(Value::output(v("tt")).to_string(), "output tt");
    }
}
