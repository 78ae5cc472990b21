//! Named structures, algorithms, tables and tasters used across the crate.
//!
//! Each fixture is also shipped as a definition file under `fixtures/`; the
//! test suite checks that both forms agree.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::analysis::FunTable;
use crate::behaviours::{neededness_taster, presence_taster, Behaviour, Taster};
use crate::budget::Budget;
use crate::cds::{make_cds, product, product_n, Cds, Cell, Event, Precondition, State, Value};
use crate::error::Result;
use crate::interaction::fun_of;
use crate::seqalg::{enumerate_algorithms, validate_algorithm, SeqAlg};
use crate::syntax::Workspace;

macro_rules! fixture_file {
    ($name:literal) => {
        ($name, include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures/", $name)))
    };
}

/// The definition files under `fixtures/`, in load order.
pub const FILES: [(&str, &str); 17] = [
    fixture_file!("o.cds"),
    fixture_file!("B.cds"),
    fixture_file!("B2.cds"),
    fixture_file!("B3.cds"),
    fixture_file!("unit.cds"),
    fixture_file!("sigma.cds"),
    fixture_file!("O.cds"),
    fixture_file!("Rec.cds"),
    fixture_file!("A.alg"),
    fixture_file!("A_prime.alg"),
    fixture_file!("A3.alg"),
    fixture_file!("not.alg"),
    fixture_file!("and.table"),
    fixture_file!("por.table"),
    fixture_file!("bk.table"),
    fixture_file!("tasters.alg"),
    fixture_file!("records.alg"),
];

/// A workspace holding every fixture file.
pub fn prelude(budget: Budget) -> Workspace {
    let mut ws = Workspace::with_budget(budget);
    for (name, text) in FILES {
        if let Err(errs) = ws.load(text) {
            panic!("fixture {name}: {}", errs[0]);
        }
    }
    ws
}

/// All cells initial, every cell takes every value.
pub fn flat_cds(name: &str, cells: &[&str], values: &[&str]) -> Result<Cds> {
    let cs: Vec<Cell> = cells.iter().map(|c| Cell::name(c)).collect();
    let vs: Vec<Value> = values.iter().map(|v| Value::name(v)).collect();
    let events: Vec<Event> = cs
        .iter()
        .flat_map(|c| vs.iter().map(move |v| Event::new(c.clone(), v.clone())))
        .collect();
    let enabling: Vec<(Cell, Precondition)> = cs.iter().map(|c| (c.clone(), Precondition::Initial)).collect();
    make_cds(name, cs, vs, events, enabling)
}

fn flat(name: &str, cells: &[&str], values: &[&str]) -> Cds {
    flat_cds(name, cells, values).expect("fixture structure is valid")
}

/// One cell `?`, no values.
pub fn game_o() -> Cds {
    flat("o", &["?"], &[])
}

/// Flat booleans on a single cell `out`.
pub fn bool_cds() -> Cds {
    flat("B", &["out"], &["tt", "ff"])
}

pub fn b2() -> Cds {
    flat("B2", &["a", "b"], &["tt", "ff"])
}

pub fn b3() -> Cds {
    flat("B3", &["a", "b", "c"], &["tt", "ff"])
}

pub fn unit_cds() -> Cds {
    flat("unit", &["u"], &["star"])
}

/// One-value coordinate used for taster candidates.
pub fn sigma_in() -> Cds {
    flat("Sin", &["in"], &["u"])
}

pub fn sigma_out() -> Cds {
    flat("Sout", &["out"], &["u"])
}

/// Records with fields year, price and colour.
pub fn record_cds() -> Cds {
    let fields: [(&str, [&str; 2]); 3] = [
        ("year", ["y2001", "y2002"]),
        ("price", ["cheap", "dear"]),
        ("colour", ["red", "blue"]),
    ];
    let cells: Vec<Cell> = fields.iter().map(|(f, _)| Cell::name(f)).collect();
    let values: Vec<Value> = fields.iter().flat_map(|(_, vs)| vs.iter().map(|v| Value::name(v))).collect();
    let events: Vec<Event> = fields
        .iter()
        .flat_map(|(f, vs)| vs.iter().map(move |v| Event::new(Cell::name(f), Value::name(v))))
        .collect();
    let enabling: Vec<(Cell, Precondition)> = cells.iter().map(|c| (c.clone(), Precondition::Initial)).collect();
    make_cds("Rec", cells, values, events, enabling).expect("record structure is valid")
}

/// `{year=y2001, price=cheap}`
pub fn sample_record() -> State {
    [
        (Cell::name("year"), Value::name("y2001")),
        (Cell::name("price"), Value::name("cheap")),
    ]
    .into_iter()
    .collect()
}

/// A move in fixture notation: `Ask(cell)` or `Put(value)`.
enum Mv<'a> {
    Ask(&'a str),
    Put(&'a str),
}

/// Input events, output cell, move.
type Line<'a> = (&'a [(&'a str, &'a str)], &'a str, Mv<'a>);

fn scheduled(from: Cds, to: Cds, lines: &[Line]) -> SeqAlg {
    let evs = lines.iter().map(|(input, out, mv)| {
        let x: State = input.iter().map(|(c, v)| (Cell::name(c), Value::name(v))).collect();
        let value = match mv {
            Mv::Ask(c) => Value::Valof(Cell::name(c)),
            Mv::Put(v) => Value::output(Value::name(v)),
        };
        Event::new(Cell::fun(x, Cell::name(out)), value)
    });
    validate_algorithm(&Arc::new(from), &Arc::new(to), evs, Budget::default()).expect("fixture algorithm is valid")
}

/// if b = tt then if a = tt then tt
pub fn alg_a() -> SeqAlg {
    scheduled(
        b2(),
        bool_cds(),
        &[
            (&[], "out", Mv::Ask("b")),
            (&[("b", "tt")], "out", Mv::Ask("a")),
            (&[("a", "tt"), ("b", "tt")], "out", Mv::Put("tt")),
        ],
    )
}

/// if a = tt then if b = tt then tt
pub fn alg_a_prime() -> SeqAlg {
    scheduled(
        b2(),
        bool_cds(),
        &[
            (&[], "out", Mv::Ask("a")),
            (&[("a", "tt")], "out", Mv::Ask("b")),
            (&[("a", "tt"), ("b", "tt")], "out", Mv::Put("tt")),
        ],
    )
}

/// [`alg_a`] with an unused third coordinate `c`.
pub fn alg_a3() -> SeqAlg {
    scheduled(
        b3(),
        bool_cds(),
        &[
            (&[], "out", Mv::Ask("b")),
            (&[("b", "tt")], "out", Mv::Ask("a")),
            (&[("a", "tt"), ("b", "tt")], "out", Mv::Put("tt")),
        ],
    )
}

/// Boolean negation on `B`.
pub fn not_alg() -> SeqAlg {
    scheduled(
        bool_cds(),
        bool_cds(),
        &[
            (&[], "out", Mv::Ask("out")),
            (&[("out", "tt")], "out", Mv::Put("ff")),
            (&[("out", "ff")], "out", Mv::Put("tt")),
        ],
    )
}

/// The function part of [`alg_a`].
pub fn and_table() -> FunTable {
    fun_of(&alg_a(), Budget::default()).expect("and table")
}

fn st(pairs: &[(&str, &str)]) -> State {
    pairs.iter().map(|(c, v)| (Cell::name(c), Value::name(v))).collect()
}

/// Least monotone table sending everything above a minimal point to its image.
fn upward(from: Cds, to: Cds, points: &[(State, State)]) -> FunTable {
    FunTable::tabulate(Arc::new(from), Arc::new(to), Budget::default(), |x| {
        points
            .iter()
            .filter(|(p, _)| p.is_subset(x))
            .fold(State::new(), |acc, (_, y)| acc.join(y).expect("consistent images"))
    })
    .expect("fixture table is valid")
}

/// Parallel or, closed by `por(ff,ff) = ff`.
pub fn por_table() -> FunTable {
    upward(
        b2(),
        bool_cds(),
        &[
            (st(&[("a", "tt")]), st(&[("out", "tt")])),
            (st(&[("b", "tt")]), st(&[("out", "tt")])),
            (st(&[("a", "ff"), ("b", "ff")]), st(&[("out", "ff")])),
        ],
    )
}

/// Parallel or with only the two characteristic rows (everything else below them is empty).
pub fn por_table_bottom() -> FunTable {
    upward(
        b2(),
        bool_cds(),
        &[
            (st(&[("a", "tt")]), st(&[("out", "tt")])),
            (st(&[("b", "tt")]), st(&[("out", "tt")])),
        ],
    )
}

/// Berry's function: (tt,ff,⊥), (ff,⊥,tt), (⊥,tt,ff) ↦ tt, least monotone completion.
pub fn bk_table() -> FunTable {
    let tt = st(&[("out", "tt")]);
    upward(
        b3(),
        bool_cds(),
        &[
            (st(&[("a", "tt"), ("b", "ff")]), tt.clone()),
            (st(&[("a", "ff"), ("c", "tt")]), tt.clone()),
            (st(&[("b", "tt"), ("c", "ff")]), tt),
        ],
    )
}

/// Candidate type of the neededness tasters: `Sin * Sin * Sin -> Sout`.
pub fn taster_type() -> (Arc<Cds>, Arc<Cds>) {
    let s = sigma_in();
    (Arc::new(product_n(&[&s, &s, &s])), Arc::new(sigma_out()))
}

/// Taster succeeding when the candidate's first move is `valof i.in`.
pub fn taster_needs(i: u32) -> Taster {
    let (from, to) = taster_type();
    neededness_taster(&from, &to, &Cell::name("out"), &Cell::tagged(i, Cell::name("in")), Budget::default())
        .expect("fixture taster is valid")
}

/// The taster observing "needs its second argument".
pub fn taster_t2() -> Taster {
    taster_needs(2)
}

/// Every algorithm of [`taster_type`].
pub fn taster_candidates() -> Vec<SeqAlg> {
    let (from, to) = taster_type();
    enumerate_algorithms(&from, &to, Budget::default()).expect("candidate space is small")
}

pub fn record_taster(field: &str) -> Taster {
    presence_taster(&Arc::new(record_cds()), &Cell::name(field), Budget::default()).expect("fixture taster is valid")
}

/// Records tested for the presence of `fields`.
pub fn record_behaviour(fields: &[&str]) -> Behaviour {
    Behaviour::new(
        crate::behaviours::empty_cds(),
        Arc::new(record_cds()),
        fields.iter().map(|f| record_taster(f)),
        Budget::default(),
    )
    .expect("fixture behaviour is valid")
}

/// The correspondence between flat booleans and the algorithms of `o * o -> o`.
#[derive(Clone, Debug)]
pub struct BooleanIso {
    pub pairs: Vec<(State, SeqAlg)>,
}

impl BooleanIso {
    /// Images pairwise distinct and exactly the enumerated algorithms.
    pub fn is_bijection(&self, budget: Budget) -> Result<bool> {
        let o = Arc::new(game_o());
        let oo = Arc::new(product(&o, &o));
        let all: BTreeSet<State> = enumerate_algorithms(&oo, &o, budget)?
            .into_iter()
            .map(|f| f.state().clone())
            .collect();
        let images: BTreeSet<State> = self.pairs.iter().map(|(_, f)| f.state().clone()).collect();
        let domain: BTreeSet<&State> = self.pairs.iter().map(|(x, _)| x).collect();
        Ok(images.len() == self.pairs.len() && domain.len() == self.pairs.len() && images == all)
    }

    pub fn image(&self, x: &State) -> Option<&SeqAlg> {
        self.pairs.iter().find(|(y, _)| y == x).map(|(_, f)| f)
    }
}

/// ⊥ ↦ the empty algorithm, tt ↦ "ask the first argument", ff ↦ "ask the second".
pub fn boolean_iso() -> BooleanIso {
    let o = Arc::new(game_o());
    let oo = Arc::new(product(&o, &o));
    let q = Cell::name("?");
    let first = |tag: u32| {
        vec![Event::new(
            Cell::fun(State::new(), q.clone()),
            Value::Valof(Cell::tagged(tag, q.clone())),
        )]
    };
    let alg = |evs: Vec<Event>| validate_algorithm(&oo, &o, evs, Budget::default()).expect("valid scheduler");
    BooleanIso {
        pairs: vec![
            (State::new(), alg(Vec::new())),
            (st(&[("out", "tt")]), alg(first(1))),
            (st(&[("out", "ff")]), alg(first(2))),
        ],
    }
}
