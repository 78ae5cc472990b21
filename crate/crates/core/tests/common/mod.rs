#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use cdslab_core::behaviours::{observation_cds, Taster};
use cdslab_core::fixtures;
use cdslab_core::interaction::{Polarity, StaticArg};
use cdslab_core::seqalg::constant_algorithm;
use cdslab_core::{apply, compose, enumerate_algorithms, fun_of, identity_algorithm, Move, Outcome};
use cdslab_core::seqalg::validate_in;
use cdslab_core::{accessible_cells, exponential, Budget, Cds, Cell, Event, SeqAlg, State, Value};

pub fn budget() -> Budget {
    Budget::default()
}

/// Number of algorithms from a flat structure with `cells` cells of `arity`
/// values each into a flat one-cell structure with `outs` values, counted as
/// decision trees: stop, output, or read an unread cell and branch on it.
pub fn count_decision_trees(cells: u32, arity: u32, outs: u64) -> u64 {
    if cells == 0 {
        return 1 + outs;
    }
    1 + outs + cells as u64 * count_decision_trees(cells - 1, arity, outs).pow(arity)
}

/// Every partial assignment of a flat structure, listed independently of the engine.
pub fn flat_states(d: &Cds) -> Vec<State> {
    let mut out = vec![State::new()];
    for c in d.cells() {
        let mut next = Vec::new();
        for x in &out {
            next.push(x.clone());
            for v in d.values_of(c) {
                next.push(x.with(c.clone(), v.clone()));
            }
        }
        out = next;
    }
    out
}

/// Flat states where each cell may also hold `err`.
pub fn flat_err_states(d: &Cds) -> Vec<State> {
    let mut out = vec![State::new()];
    for c in d.cells() {
        let mut next = Vec::new();
        for x in &out {
            next.push(x.clone());
            next.push(x.with(c.clone(), Value::err()));
            for v in d.values_of(c) {
                next.push(x.with(c.clone(), v.clone()));
            }
        }
        out = next;
    }
    out
}

pub fn st(pairs: &[(&str, &str)]) -> State {
    pairs.iter().map(|(c, v)| (Cell::name(c), Value::name(v))).collect()
}

pub fn arc(d: Cds) -> Arc<Cds> {
    Arc::new(d)
}

/// Evaluates `f` at `x` on `out` by walking its moves directly.
pub fn run_moves(f: &SeqAlg, x: &State, out: &Cell) -> Option<Value> {
    let mut y = State::new();
    loop {
        match f.move_at(&y, out)? {
            Value::Output(v) => return Some((**v).clone()),
            Value::Valof(c) => y = y.with(c.clone(), x.get(c)?.clone()),
            Value::Name(_) => return None,
        }
    }
}

/// Argument structure, result structure, their exponential, and its algorithms.
pub type Space = (Arc<Cds>, Arc<Cds>, Arc<Cds>, Vec<SeqAlg>);

/// The candidate space of the neededness tasters and its algorithms.
pub fn candidate_space() -> &'static Space {
    static SPACE: OnceLock<Space> = OnceLock::new();
    SPACE.get_or_init(|| {
        let (from, to) = fixtures::taster_type();
        let e = Arc::new(exponential(&from, &to, budget()).unwrap());
        (from, to, e, fixtures::taster_candidates())
    })
}

/// Grows a taster over the candidate space from a vector of choices.
///
/// At each table the taster stops, answers `err`, answers `ok` or asks one of
/// the accessible cells, then continues on every possible answer.
pub fn taster_from_choices(choices: &[u8]) -> Taster {
    let (_, _, e, _) = candidate_space();
    let mut evs = Vec::new();
    let mut k = 0usize;
    grow(e, &State::new(), choices, &mut k, 0, &mut evs);
    static TASTERS: OnceLock<Arc<Cds>> = OnceLock::new();
    let space = TASTERS.get_or_init(|| Arc::new(exponential(e, &observation_cds(), budget()).unwrap()));
    let alg = validate_in(e, &observation_cds(), space, evs).expect("grown taster is valid");
    Taster::new(alg).unwrap()
}

fn grow(e: &Cds, y: &State, choices: &[u8], k: &mut usize, depth: usize, evs: &mut Vec<Event>) {
    let pick = if choices.is_empty() {
        0
    } else {
        let c = choices[*k % choices.len()] as usize;
        *k += 1;
        c
    };
    let asks: Vec<Cell> = if depth < 3 { accessible_cells(e, y).into_iter().collect() } else { Vec::new() };
    let here = Cell::fun(y.clone(), Cell::name("ans"));
    match pick % (3 + asks.len()) {
        0 => {}
        1 => evs.push(Event::new(here, Value::output(Value::err()))),
        2 => evs.push(Event::new(here, Value::output(Value::name("ok")))),
        i => {
            let c = asks[i - 3].clone();
            evs.push(Event::new(here, Value::Valof(c.clone())));
            let answers: Vec<Value> = e.values_of(&c).cloned().collect();
            for v in answers {
                grow(e, &y.with(c.clone(), v), choices, k, depth + 1, evs);
            }
        }
    }
}

/// Pointwise composition of two function tables given as maps.
pub fn compose_tables(f: &BTreeMap<State, State>, g: &BTreeMap<State, State>) -> BTreeMap<State, State> {
    f.iter().map(|(x, y)| (x.clone(), g[y].clone())).collect()
}

pub fn b2_algs() -> Vec<SeqAlg> {
    enumerate_algorithms(&arc(fixtures::b2()), &arc(fixtures::bool_cds()), budget()).unwrap()
}

/// Checks the shape of a finished dialogue against the argument it ran on.
pub fn check_trace(f: &SeqAlg, x: &State, out: &Cell) {
    let (o, t) = apply(f, &mut StaticArg(x.clone()), out).unwrap();
    let (o2, t2) = apply(f, &mut StaticArg(x.clone()), out).unwrap();
    assert_eq!((&o, &t), (&o2, &t2), "determinism");
    assert_eq!(t.outcome, o);

    // player and opponent alternate, the player moving first
    for (i, m) in t.moves.iter().enumerate() {
        let expect = if i % 2 == 0 { Polarity::Player } else { Polarity::Opponent };
        assert_eq!(m.polarity(), expect, "{f:?} at {x}: {t}");
    }
    // each answered round adds exactly one event, the one just answered
    let answers: Vec<(&Cell, &Value)> = t
        .moves
        .windows(2)
        .filter_map(|w| match w {
            [Move::Valof(c), Move::Answer(v)] => Some((c, v)),
            _ => None,
        })
        .collect();
    assert_eq!(answers.len(), t.tables.len());
    let mut prev = t.start.clone();
    for ((c, v), table) in answers.iter().zip(&t.tables) {
        assert_eq!(table.len(), prev.len() + 1);
        assert!(prev.is_subset(table));
        assert_eq!(table.get(c), Some(*v));
        assert_eq!(x.get(c), Some(*v));
        prev = table.clone();
    }
    // err short-circuits: nothing follows it and it is the outcome
    let err_at = t.moves.iter().position(|m| matches!(m, Move::Answer(v) if v.is_err()));
    match err_at {
        Some(i) => {
            assert_eq!(i, t.moves.len() - 1);
            assert_eq!(o, Outcome::Err);
        }
        None => assert_ne!(o, Outcome::Err),
    }
    // a value is an output move, stuck ends on an unanswerable valof or no move
    match &o {
        Outcome::Value(v) => assert_eq!(t.moves.last(), Some(&Move::Output(v.clone()))),
        Outcome::Stuck => match t.dangling_valof() {
            Some(c) => assert!(!x.is_filled(c)),
            None => assert!(f.move_at(t.tables.last().unwrap_or(&t.start), out).is_none()),
        },
        Outcome::Err => {}
    }
    if !x.has_err() {
        assert_eq!(run_moves(f, x, out).map(Outcome::Value).unwrap_or(Outcome::Stuck), o);
    }
}

pub fn check_compose(f: &SeqAlg, g: &SeqAlg) {
    let h = compose(f, g, budget()).unwrap();
    let tf = fun_of(f, budget()).unwrap();
    let tg = fun_of(g, budget()).unwrap();
    let th = fun_of(&h, budget()).unwrap();
    assert_eq!(*th.rows(), compose_tables(tf.rows(), tg.rows()), "{} ; {}", f.state(), g.state());
}

pub fn fixture_algs() -> Vec<SeqAlg> {
    let b = arc(fixtures::bool_cds());
    let b2 = arc(fixtures::b2());
    let mut out = vec![
        fixtures::alg_a(),
        fixtures::alg_a_prime(),
        fixtures::not_alg(),
        identity_algorithm(&b, budget()).unwrap(),
        identity_algorithm(&b2, budget()).unwrap(),
    ];
    for y in flat_states(&b) {
        out.push(constant_algorithm(&b, &b, &y, budget()).unwrap());
        out.push(constant_algorithm(&b2, &b, &y, budget()).unwrap());
    }
    for y in flat_states(&b2) {
        out.push(constant_algorithm(&b, &b2, &y, budget()).unwrap());
    }
    out
}

