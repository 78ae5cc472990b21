mod common;

use cdslab_core::fixtures::{self, FILES};
use cdslab_core::syntax::{parse_cell, parse_definitions, parse_events, parse_type, parse_value, Workspace};
use cdslab_core::{enumerate_algorithms, fun_of, SeqAlg, Value};
use common::*;
use proptest::prelude::*;

const WORDS: &[&str] = &[
    "cds", "alg", "table", "behaviour", "cells", "values", "events", "enable", "initial", "at", "ask", "put",
    "tests", "default", "empty", "valof", "output", "{", "}", "(", ")", "<", ">", "|-", "<-", "->", "=>", "=",
    ";", ":", ",", ".", "*", "a", "b", "out", "tt", "ff", "B", "B2", "1", "2", "#", "\n", " ", "$", "'",
];

fn soup() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(WORDS), 0..80).prop_map(|ws| ws.join(" "))
}

/// A fixture file with a few tokens dropped or duplicated.
fn mutated_fixture() -> impl Strategy<Value = String> {
    (0..FILES.len(), prop::collection::vec((any::<u16>(), any::<bool>()), 1..4)).prop_map(|(i, edits)| {
        let mut toks: Vec<&str> = FILES[i].1.split_whitespace().collect();
        for (at, dup) in edits {
            if toks.is_empty() {
                break;
            }
            let k = at as usize % toks.len();
            if dup {
                toks.insert(k, toks[k]);
            } else {
                toks.remove(k);
            }
        }
        toks.join(" ")
    })
}

fn state_text(x: &cdslab_core::State) -> String {
    let parts: Vec<String> = x.iter().map(|(c, v)| format!("{c}={v}")).collect();
    format!("{{{}}}", parts.join(", "))
}

/// Writes an algorithm in definition syntax without going through the printer.
fn alg_text(name: &str, ty: &str, f: &SeqAlg) -> String {
    let mut s = format!("alg {name} : {ty} {{\n");
    for (x, c, v) in f.moves() {
        match v {
            Value::Valof(a) => s += &format!("  at {} {c} ask {a};\n", state_text(x)),
            Value::Output(w) => s += &format!("  at {} {c} put {w};\n", state_text(x)),
            Value::Name(_) => unreachable!(),
        }
    }
    s + "}\n"
}

fn random_cds() -> impl Strategy<Value = String> {
    // cells c0..cn, values v0..vm, each event present or not, each cell
    // initial or enabled by an event of an earlier cell
    (1usize..4, 1usize..4)
        .prop_flat_map(|(n, m)| {
            (
                Just(n),
                Just(m),
                prop::collection::vec(any::<bool>(), n * m),
                prop::collection::vec(any::<u8>(), n),
            )
        })
        .prop_map(|(n, m, present, enables)| {
            let cells: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
            let values: Vec<String> = (0..m).map(|j| format!("v{j}")).collect();
            let mut events = Vec::new();
            for i in 0..n {
                for j in 0..m {
                    if present[i * m + j] {
                        events.push((i, j));
                    }
                }
            }
            let mut s = format!(
                "cds R {{ cells {}; values {}; events {};",
                cells.join(" "),
                values.join(" "),
                events.iter().map(|(i, j)| format!("c{i}:v{j}")).collect::<Vec<_>>().join(" ")
            );
            for (i, e) in enables.iter().enumerate() {
                let earlier: Vec<&(usize, usize)> = events.iter().filter(|(k, _)| *k < i).collect();
                if *e % 2 == 1 && !earlier.is_empty() {
                    let (k, j) = earlier[*e as usize % earlier.len()];
                    s += &format!(" enable c{i} <- c{k}:v{j};");
                }
            }
            s + " }\n"
        })
}

fn b2_algs() -> &'static Vec<SeqAlg> {
    static ALGS: std::sync::OnceLock<Vec<SeqAlg>> = std::sync::OnceLock::new();
    ALGS.get_or_init(|| {
        enumerate_algorithms(&arc(fixtures::b2()), &arc(fixtures::bool_cds()), budget()).unwrap()
    })
}

fn base() -> String {
    [FILES[1].1, FILES[2].1].concat()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn parsing_is_total_on_token_soup(text in soup()) {
        let _ = parse_definitions(&text);
        let _ = parse_cell(&text);
        let _ = parse_value(&text);
        let _ = parse_events(&text);
        let _ = parse_type(&text);
    }

    #[test]
    fn parsing_is_total_on_arbitrary_text(text in "\\PC{0,120}") {
        let _ = parse_definitions(&text);
    }

    #[test]
    fn damaged_fixtures_give_positioned_errors(text in mutated_fixture()) {
        let mut ws = fixtures::prelude(budget());
        let before = ws.clone();
        if let Err(errs) = ws.load(&text) {
            prop_assert!(!errs.is_empty());
            for e in &errs {
                prop_assert!(e.line >= 1 && e.col >= 1);
            }
            prop_assert_eq!(ws, before);
        }
    }

    #[test]
    fn random_structures_round_trip(text in random_cds()) {
        if let Ok(ws) = parse_definitions(&text) {
            let printed = ws.to_text();
            let again = parse_definitions(&printed).unwrap();
            prop_assert_eq!(&again, &ws);
            prop_assert_eq!(again.to_text(), printed);
        }
    }

    #[test]
    fn random_algorithms_and_tables_round_trip(picks in prop::collection::vec(0usize..291, 1..4)) {
        let mut text = base();
        for (k, i) in picks.iter().enumerate() {
            let f = &b2_algs()[*i];
            text += &alg_text(&format!("f{k}"), "B2 -> B", f);
            let t = fun_of(f, budget()).unwrap();
            text += &format!("table t{k} : B2 -> B {{\n");
            for (x, y) in t.rows() {
                text += &format!("  {} => {};\n", state_text(x), state_text(y));
            }
            text += "}\n";
        }
        let ws = parse_definitions(&text).unwrap();
        for (k, i) in picks.iter().enumerate() {
            prop_assert_eq!(&ws.alg(&format!("f{k}")).unwrap().alg, &b2_algs()[*i]);
        }
        let again = parse_definitions(&ws.to_text()).unwrap();
        prop_assert_eq!(again, ws);
    }
}

#[test]
fn empty_and_comment_only_files() {
    assert_eq!(parse_definitions("").unwrap(), Workspace::new());
    assert_eq!(parse_definitions("# nothing\n\n# here\n").unwrap(), Workspace::new());
}

#[test]
fn fixture_a_file_loads_algorithm_a() {
    let mut ws = Workspace::new();
    ws.load(&base()).unwrap();
    ws.load(FILES.iter().find(|(n, _)| *n == "A.alg").unwrap().1).unwrap();
    assert_eq!(ws.alg("A").unwrap().alg, fixtures::alg_a());
}
