//! Application as a dialogue between an algorithm and its argument.
//!
//! Presented with a request `c'`, the algorithm is asked `<y|-c'>` where `y`
//! is the internal table (the part of the argument read so far). A `valof c`
//! move hands control to the argument; its answer `v` extends the table to
//! `y ∪ {(c,v)}` and the loop repeats until the algorithm outputs, the
//! argument answers `err`, or somebody has nothing to say.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::analysis::FunTable;
use crate::budget::Budget;
use crate::cds::{enumerate_states, Cds, Cell, Precondition, State, Value};
use crate::error::{Error, Result};
use crate::seqalg::{exponential, validate_in, SeqAlg};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Answer {
    Value(Value),
    Err,
    NoAnswer,
}

/// The argument side of a dialogue.
///
/// Implementations must answer the same cell the same way for the duration
/// of one dialogue.
pub trait ArgumentProcess {
    fn answer(&mut self, cell: &Cell) -> Answer;
}

/// A fixed datum, possibly containing `err`.
#[derive(Clone, Debug)]
pub struct StaticArg(pub State);

impl ArgumentProcess for StaticArg {
    fn answer(&mut self, cell: &Cell) -> Answer {
        match self.0.get(cell) {
            Some(v) if v.is_err() => Answer::Err,
            Some(v) => Answer::Value(v.clone()),
            None => Answer::NoAnswer,
        }
    }
}

/// An algorithm used as argument: asking `<x|-c>` returns its move there.
#[derive(Clone, Debug)]
pub struct AlgorithmArg(pub SeqAlg);

impl ArgumentProcess for AlgorithmArg {
    fn answer(&mut self, cell: &Cell) -> Answer {
        match self.0.state().get(cell) {
            Some(v) => Answer::Value(v.clone()),
            None => Answer::NoAnswer,
        }
    }
}

/// Defers every question to a callback (typically a human), remembering answers.
pub struct InteractiveOracle<F> {
    ask: F,
    memo: BTreeMap<Cell, Answer>,
}

impl<F: FnMut(&Cell) -> Answer> InteractiveOracle<F> {
    pub fn new(ask: F) -> Self {
        InteractiveOracle {
            ask,
            memo: BTreeMap::new(),
        }
    }
}

impl<F: FnMut(&Cell) -> Answer> ArgumentProcess for InteractiveOracle<F> {
    fn answer(&mut self, cell: &Cell) -> Answer {
        if let Some(a) = self.memo.get(cell) {
            return a.clone();
        }
        let a = (self.ask)(cell);
        self.memo.insert(cell.clone(), a.clone());
        a
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarity {
    Player,
    Opponent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Move {
    Request(Cell),
    Valof(Cell),
    Answer(Value),
    Output(Value),
}

impl Move {
    pub fn polarity(&self) -> Polarity {
        match self {
            Move::Request(_) | Move::Answer(_) => Polarity::Opponent,
            Move::Valof(_) | Move::Output(_) => Polarity::Player,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Request(c) => write!(f, "REQ {c}"),
            Move::Valof(c) => write!(f, "VALOF {c}"),
            Move::Answer(v) => write!(f, "ANS {v}"),
            Move::Output(v) => write!(f, "OUT {v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Value(Value),
    Err,
    Stuck,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Value(v) => write!(f, "value:{v}"),
            Outcome::Err => f.write_str("err"),
            Outcome::Stuck => f.write_str("stuck"),
        }
    }
}

/// The move log of one dialogue.
///
/// `start` is the table the dialogue began from and `tables[i]` the internal
/// table after the `i`-th answered round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub request: Cell,
    pub start: State,
    pub moves: Vec<Move>,
    pub outcome: Outcome,
    pub tables: Vec<State>,
}

impl Trace {
    /// One line per move, `RESULT` last. Verbose mode adds a `TABLE` line after each answer.
    pub fn to_text(&self, verbose: bool) -> String {
        render_lines(&self.request, &self.moves, Some(&self.outcome), verbose.then_some(&self.tables[..]))
            .into_iter()
            .map(|l| l + "\n")
            .collect()
    }

    /// The unanswered `valof` the dialogue ended on, if any.
    pub fn dangling_valof(&self) -> Option<&Cell> {
        match self.moves.last() {
            Some(Move::Valof(c)) => Some(c),
            _ => None,
        }
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(false))
    }
}

pub(crate) fn render_lines(
    request: &Cell,
    moves: &[Move],
    outcome: Option<&Outcome>,
    tables: Option<&[State]>,
) -> Vec<String> {
    let mut out = vec![Move::Request(request.clone()).to_string()];
    let mut round = 0;
    for m in moves {
        out.push(m.to_string());
        if let (Move::Answer(_), Some(tables)) = (m, tables) {
            if let Some(t) = tables.get(round) {
                out.push(format!("TABLE {t}"));
            }
            round += 1;
        }
    }
    if let Some(o) = outcome {
        out.push(format!("RESULT {o}"));
    }
    out
}

/// Where a dialogue stands after [`Dialogue::advance`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Progress {
    Ask(Cell),
    Done(Outcome),
}

/// A resumable application dialogue.
#[derive(Clone, Debug)]
pub struct Dialogue {
    request: Cell,
    start: State,
    table: State,
    moves: Vec<Move>,
    tables: Vec<State>,
    pending: Option<Cell>,
    outcome: Option<Outcome>,
}

impl Dialogue {
    pub fn start(f: &SeqAlg, request: Cell) -> Result<Self> {
        Dialogue::start_at(f, request, State::new())
    }

    /// Starts from `table`, where the request became enabled.
    pub fn start_at(f: &SeqAlg, request: Cell, table: State) -> Result<Self> {
        if !f.to_cds().has_cell(&request) {
            return Err(Error::RequestUnknownCell(request));
        }
        Ok(Dialogue {
            request,
            start: table.clone(),
            table,
            moves: Vec::new(),
            tables: Vec::new(),
            pending: None,
            outcome: None,
        })
    }

    pub fn table(&self) -> &State {
        &self.table
    }

    pub fn pending(&self) -> Option<&Cell> {
        self.pending.as_ref()
    }

    pub fn outcome(&self) -> Option<&Outcome> {
        self.outcome.as_ref()
    }

    pub fn moves(&self) -> &[Move] {
        &self.moves
    }

    /// Trace lines produced so far.
    pub fn lines(&self, verbose: bool) -> Vec<String> {
        render_lines(&self.request, &self.moves, self.outcome.as_ref(), verbose.then_some(&self.tables[..]))
    }

    fn finish(&mut self, outcome: Outcome) -> Progress {
        self.outcome = Some(outcome.clone());
        Progress::Done(outcome)
    }

    /// Runs the algorithm until it needs an answer it cannot find in `memo`.
    ///
    /// Answers found in `memo` are consumed silently: they extend the table
    /// without adding moves to the trace.
    pub fn advance(&mut self, f: &SeqAlg, memo: &State) -> Progress {
        if let Some(o) = &self.outcome {
            return Progress::Done(o.clone());
        }
        if let Some(c) = &self.pending {
            return Progress::Ask(c.clone());
        }
        loop {
            match f.move_at(&self.table, &self.request) {
                None => return self.finish(Outcome::Stuck),
                Some(Value::Output(v)) => {
                    let v = (**v).clone();
                    self.moves.push(Move::Output(v.clone()));
                    return self.finish(Outcome::Value(v));
                }
                Some(Value::Valof(c)) => match memo.get(c) {
                    Some(v) if v.is_err() => return self.finish(Outcome::Err),
                    Some(v) => self.table.insert(c.clone(), v.clone()),
                    None => {
                        self.moves.push(Move::Valof(c.clone()));
                        self.pending = Some(c.clone());
                        return Progress::Ask(c.clone());
                    }
                },
                Some(Value::Name(_)) => return self.finish(Outcome::Stuck),
            }
        }
    }

    /// Supplies the argument's answer to the pending `valof`.
    ///
    /// An ill-typed answer is rejected and the `valof` stays pending.
    pub fn supply(&mut self, f: &SeqAlg, answer: Answer) -> Result<()> {
        let Some(c) = self.pending.clone() else {
            return Err(Error::WrongPhase);
        };
        match answer {
            Answer::NoAnswer => {
                self.pending = None;
                self.finish(Outcome::Stuck);
            }
            Answer::Err => {
                self.pending = None;
                self.moves.push(Move::Answer(Value::err()));
                self.table.insert(c, Value::err());
                self.tables.push(self.table.clone());
                self.finish(Outcome::Err);
            }
            Answer::Value(v) => {
                if v.is_err() {
                    return self.supply(f, Answer::Err);
                }
                if !f.from_cds().has_event(&c, &v) {
                    return Err(Error::ArgumentAnswerIllTyped { cell: c, value: v });
                }
                self.pending = None;
                self.moves.push(Move::Answer(v.clone()));
                self.table.insert(c, v);
                self.tables.push(self.table.clone());
            }
        }
        Ok(())
    }

    /// The finished trace, once an outcome is known.
    pub fn trace(&self) -> Option<Trace> {
        self.outcome.as_ref().map(|o| Trace {
            request: self.request.clone(),
            start: self.start.clone(),
            moves: self.moves.clone(),
            outcome: o.clone(),
            tables: self.tables.clone(),
        })
    }
}

/// Applies `f` to `arg` on request `request`.
///
/// The dialogue starts from the empty table when `request` is initial, and
/// otherwise from the table at which `f` produced the output enabling it.
pub fn apply(f: &SeqAlg, arg: &mut dyn ArgumentProcess, request: &Cell) -> Result<(Outcome, Trace)> {
    if !f.to_cds().has_cell(request) {
        return Err(Error::RequestUnknownCell(request.clone()));
    }
    let start = locate(f, arg, request)?.unwrap_or_default();
    run(f, arg, Dialogue::start_at(f, request.clone(), start)?)
}

fn run(f: &SeqAlg, arg: &mut dyn ArgumentProcess, mut d: Dialogue) -> Result<(Outcome, Trace)> {
    let empty = State::new();
    loop {
        match d.advance(f, &empty) {
            Progress::Done(o) => {
                let trace = d.trace().expect("finished dialogue has a trace");
                return Ok((o, trace));
            }
            Progress::Ask(c) => {
                let a = arg.answer(&c);
                d.supply(f, a)?;
            }
        }
    }
}

/// The table from which a dialogue on `request` starts, if the request gets enabled.
fn locate(f: &SeqAlg, arg: &mut dyn ArgumentProcess, request: &Cell) -> Result<Option<State>> {
    if f.to_cds().is_initial(request) {
        return Ok(Some(State::new()));
    }
    let preconditions: Vec<Precondition> = f.to_cds().preconditions(request).cloned().collect();
    for p in preconditions {
        match p {
            Precondition::Initial => return Ok(Some(State::new())),
            Precondition::Event(e) => {
                let Some(y) = locate(f, arg, &e.cell)? else { continue };
                let d = Dialogue::start_at(f, e.cell.clone(), y)?;
                let (o, t) = run(f, arg, d)?;
                if o == Outcome::Value(e.value.clone()) {
                    return Ok(Some(t.tables.last().cloned().unwrap_or(t.start)));
                }
            }
        }
    }
    Ok(None)
}

/// What a session request or answer led to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SessionStep {
    Finished(Trace),
    /// The argument is played by hand and must answer this cell.
    Waiting { valof: Cell },
}

/// A sequence of requests against one algorithm and one argument.
///
/// The internal table persists across requests: answers already obtained are
/// reused without asking the argument again.
pub struct Session {
    alg: SeqAlg,
    arg: Option<Box<dyn ArgumentProcess + Send>>,
    table: State,
    log: Vec<(Cell, Value)>,
    current: Option<Dialogue>,
    history: Vec<Trace>,
    outputs: BTreeMap<Cell, (Value, State)>,
}

impl Session {
    /// Opens a session; `arg = None` means every answer comes through [`Session::answer`].
    pub fn open(alg: SeqAlg, arg: Option<Box<dyn ArgumentProcess + Send>>) -> Self {
        Session {
            alg,
            arg,
            table: State::new(),
            log: Vec::new(),
            current: None,
            history: Vec::new(),
            outputs: BTreeMap::new(),
        }
    }

    pub fn algorithm(&self) -> &SeqAlg {
        &self.alg
    }

    pub fn is_manual(&self) -> bool {
        self.arg.is_none()
    }

    pub fn table(&self) -> &State {
        &self.table
    }

    /// Table events in the order they were obtained.
    pub fn table_log(&self) -> &[(Cell, Value)] {
        &self.log
    }

    pub fn current(&self) -> Option<&Dialogue> {
        self.current.as_ref()
    }

    pub fn last_trace(&self) -> Option<&Trace> {
        self.history.last()
    }

    pub fn history(&self) -> &[Trace] {
        &self.history
    }

    pub fn request(&mut self, cell: &Cell) -> Result<SessionStep> {
        if self.current.is_some() {
            return Err(Error::DialoguePending);
        }
        let start = self.root(cell).unwrap_or_default();
        self.current = Some(Dialogue::start_at(&self.alg, cell.clone(), start)?);
        self.drive()
    }

    /// Answers the pending `valof` of a manual session.
    pub fn answer(&mut self, answer: Answer) -> Result<SessionStep> {
        let d = self.current.as_mut().ok_or(Error::WrongPhase)?;
        let Some(c) = d.pending().cloned() else {
            return Err(Error::WrongPhase);
        };
        d.supply(&self.alg, answer)?;
        if let Some(v) = d.table().get(&c) {
            if !self.table.is_filled(&c) {
                self.table.insert(c.clone(), v.clone());
                self.log.push((c, v.clone()));
            }
        }
        self.drive()
    }

    /// Clears the table and abandons any dialogue in progress.
    pub fn reset(&mut self) {
        self.table = State::new();
        self.log.clear();
        self.current = None;
        self.outputs.clear();
    }

    /// Output cells obtained so far, with their values.
    pub fn outputs(&self) -> State {
        self.outputs.iter().map(|(c, (v, _))| (c.clone(), v.clone())).collect()
    }

    fn root(&self, cell: &Cell) -> Option<State> {
        if self.alg.to_cds().is_initial(cell) {
            return Some(State::new());
        }
        self.alg.to_cds().preconditions(cell).find_map(|p| match p {
            Precondition::Initial => Some(State::new()),
            Precondition::Event(e) => match self.outputs.get(&e.cell) {
                Some((v, y)) if *v == e.value => Some(y.clone()),
                _ => None,
            },
        })
    }

    fn drive(&mut self) -> Result<SessionStep> {
        loop {
            let d = self.current.as_mut().expect("drive needs a dialogue");
            match d.advance(&self.alg, &self.table) {
                Progress::Done(o) => {
                    let trace = d.trace().expect("finished dialogue has a trace");
                    if let Outcome::Value(v) = o {
                        self.outputs.insert(trace.request.clone(), (v, d.table().clone()));
                    }
                    self.current = None;
                    self.history.push(trace.clone());
                    return Ok(SessionStep::Finished(trace));
                }
                Progress::Ask(c) => {
                    let Some(arg) = self.arg.as_mut() else {
                        return Ok(SessionStep::Waiting { valof: c });
                    };
                    let a = arg.answer(&c);
                    d.supply(&self.alg, a)?;
                    if let Some(v) = d.table().get(&c) {
                        self.table.insert(c.clone(), v.clone());
                        self.log.push((c, v.clone()));
                    }
                }
            }
        }
    }
}

/// The input-output function of `f` on err-free inputs.
pub fn fun_of(f: &SeqAlg, budget: Budget) -> Result<FunTable> {
    let inputs = enumerate_states(f.from_cds(), budget)?;
    let mut rows = BTreeMap::new();
    for x in inputs {
        let y = output_of(f, &x)?;
        rows.insert(x, y);
    }
    FunTable::new(f.from_cds().clone(), f.to_cds().clone(), rows, budget)
}

/// The output of `f` on the static input `x`.
pub fn output_of(f: &SeqAlg, x: &State) -> Result<State> {
    let mut out = State::new();
    for c in f.to_cds().cells() {
        if let Walk::Output(v, _) = walk(f, c, &mut |c: &Cell| read_static(x, c)) {
            out.insert(c.clone(), v);
        }
    }
    Ok(out)
}

enum Read {
    Known(Value),
    Blocked(Cell),
    Stuck,
}

enum Walk {
    Output(Value, State),
    Blocked(Cell),
    Stuck,
}

fn read_static(x: &State, c: &Cell) -> Read {
    match x.get(c) {
        Some(v) if v.is_err() => Read::Stuck,
        Some(v) => Read::Known(v.clone()),
        None => Read::Blocked(c.clone()),
    }
}

/// Follows the moves of `f` for `request` from its root table, reading the input through `read`.
fn walk(f: &SeqAlg, request: &Cell, read: &mut dyn FnMut(&Cell) -> Read) -> Walk {
    let Some(mut y) = root(f, request, read) else {
        return Walk::Stuck;
    };
    loop {
        match f.move_at(&y, request) {
            Some(Value::Output(v)) => return Walk::Output((**v).clone(), y),
            Some(Value::Valof(c)) => match read(c) {
                Read::Known(v) => y.insert(c.clone(), v),
                Read::Blocked(c) => return Walk::Blocked(c),
                Read::Stuck => return Walk::Stuck,
            },
            _ => return Walk::Stuck,
        }
    }
}

fn root(f: &SeqAlg, request: &Cell, read: &mut dyn FnMut(&Cell) -> Read) -> Option<State> {
    if f.to_cds().is_initial(request) {
        return Some(State::new());
    }
    let preconditions: Vec<Precondition> = f.to_cds().preconditions(request).cloned().collect();
    for p in preconditions {
        match p {
            Precondition::Initial => return Some(State::new()),
            Precondition::Event(e) => {
                if let Walk::Output(v, y) = walk(f, &e.cell, read) {
                    if v == e.value {
                        return Some(y);
                    }
                }
            }
        }
    }
    None
}

/// `g ∘ f`, built by running `g` against "`f` applied to `x`" for every reachable cell `<x|-c''>`.
pub fn compose(f: &SeqAlg, g: &SeqAlg, budget: Budget) -> Result<SeqAlg> {
    if f.to_cds() != g.from_cds() {
        return Err(Error::MiddleMismatch);
    }
    let m: &Arc<Cds> = f.from_cds();
    let p: &Arc<Cds> = g.to_cds();
    let space = Arc::new(exponential(m, p, budget)?);
    let mut candidates = BTreeMap::new();
    for x in enumerate_states(m, budget)? {
        let mut middle = |mid: &Cell| match walk(f, mid, &mut |c: &Cell| read_static(&x, c)) {
            Walk::Output(v, _) => Read::Known(v),
            Walk::Blocked(c) => Read::Blocked(c),
            Walk::Stuck => Read::Stuck,
        };
        for out in p.cells() {
            let mv = match walk(g, out, &mut middle) {
                Walk::Output(v, _) => Value::output(v),
                Walk::Blocked(c) => Value::Valof(c),
                Walk::Stuck => continue,
            };
            candidates.insert(Cell::fun(x.clone(), out.clone()), mv);
        }
    }
    let state = crate::cds::safe_closure(&space, &candidates);
    validate_in(m, p, &space, state.events())
}
