mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use cdslab_core::analysis::{classify, is_monotone, is_stable, sequential_realizers, FunTable};
use cdslab_core::fixtures;
use cdslab_core::{enumerate_algorithms, fun_of, Cds, SeqAlg, State};
use common::*;

fn all_tables(from: &Arc<Cds>, to: &Arc<Cds>) -> Vec<BTreeMap<State, State>> {
    let xs = flat_states(from);
    let ys = flat_states(to);
    let mut out = vec![BTreeMap::new()];
    for x in &xs {
        out = out
            .into_iter()
            .flat_map(|t| {
                ys.iter().map(move |y| {
                    let mut t = t.clone();
                    t.insert(x.clone(), y.clone());
                    t
                })
            })
            .collect();
    }
    out
}

fn oracle_monotone(t: &BTreeMap<State, State>) -> bool {
    t.iter()
        .all(|(x, y)| t.iter().all(|(x2, y2)| !x.is_subset(x2) || y.is_subset(y2)))
}

/// Brute-force stability: images of compatible pairs meet correctly.
fn oracle_stable(t: &BTreeMap<State, State>) -> bool {
    t.iter().all(|(x, y)| {
        t.iter().all(|(x2, y2)| match x.join(x2) {
            Some(j) if t.contains_key(&j) => t[&x.meet(x2)] == y.meet(y2),
            _ => true,
        })
    })
}

fn realizer_states(rs: &[SeqAlg]) -> BTreeSet<State> {
    rs.iter().map(|f| f.state().clone()).collect()
}

fn check_against_brute_force(from: Arc<Cds>, to: Arc<Cds>) -> usize {
    let algs = enumerate_algorithms(&from, &to, budget()).unwrap();
    let funs: Vec<(FunTable, State)> = algs
        .iter()
        .map(|f| (fun_of(f, budget()).unwrap(), f.state().clone()))
        .collect();
    let mut monotone = 0;
    for rows in all_tables(&from, &to) {
        let t = FunTable::new(from.clone(), to.clone(), rows.clone(), budget()).unwrap();
        let mono = oracle_monotone(&rows);
        assert_eq!(is_monotone(&t).holds(), mono);
        if !mono {
            continue;
        }
        monotone += 1;
        let stable = oracle_stable(&rows);
        assert_eq!(is_stable(&t).unwrap().is_stable(), stable, "{rows:?}");
        let expected: BTreeSet<State> = funs.iter().filter(|(ft, _)| *ft == t).map(|(_, s)| s.clone()).collect();
        let got = realizer_states(&sequential_realizers(&t, budget()).unwrap());
        assert_eq!(got, expected, "{rows:?}");
        // sequential implies stable implies monotone
        assert!(expected.is_empty() || stable);
    }
    monotone
}

#[test]
fn realizers_are_complete_on_flat_bool_endomorphisms() {
    let b = arc(fixtures::bool_cds());
    assert_eq!(all_tables(&b, &b).len(), 27);
    assert!(check_against_brute_force(b.clone(), b) > 0);
}

#[test]
fn realizers_are_complete_on_flat_bool_pairs() {
    let n = check_against_brute_force(arc(fixtures::b2()), arc(fixtures::bool_cds()));
    assert!(n > 27);
}

#[test]
fn berry_hierarchy_on_fixtures() {
    let por = fixtures::por_table();
    assert!(is_monotone(&por).holds());
    let report = is_stable(&por).unwrap();
    assert!(!report.is_stable());
    let w = report.verdict.witness().unwrap();
    assert!(w.image_of_meet != w.meet_of_images);
    assert!(sequential_realizers(&por, budget()).unwrap().is_empty());

    let bottom = fixtures::por_table_bottom();
    assert!(is_monotone(&bottom).holds());
    assert!(!oracle_stable(bottom.rows()));
    assert!(!is_stable(&bottom).unwrap().is_stable());
    assert!(sequential_realizers(&bottom, budget()).unwrap().is_empty());

    let bk = fixtures::bk_table();
    assert!(oracle_stable(bk.rows()));
    assert!(is_stable(&bk).unwrap().is_stable());
    assert!(sequential_realizers(&bk, budget()).unwrap().is_empty());

    let and = fixtures::and_table();
    let rs = realizer_states(&sequential_realizers(&and, budget()).unwrap());
    assert!(rs.contains(fixtures::alg_a().state()));
    assert!(rs.contains(fixtures::alg_a_prime().state()));

    let c = classify(&bk, budget()).unwrap();
    assert!(c.is_stable() && !c.is_sequential());
}

#[test]
fn realizers_into_a_structure_with_enablings() {
    let mut ws = cdslab_core::syntax::Workspace::new();
    ws.load("cds chain { cells p q; values tt ff; events p:tt p:ff q:tt q:ff; enable q <- p:tt; }")
        .unwrap();
    let chain = ws.cds("chain").unwrap().clone();
    let b = arc(fixtures::bool_cds());
    let algs = enumerate_algorithms(&b, &chain, budget()).unwrap();
    let mut seen = BTreeSet::new();
    for f in &algs {
        let t = fun_of(f, budget()).unwrap();
        if !seen.insert(t.rows().clone()) {
            continue;
        }
        let expected: BTreeSet<State> = algs
            .iter()
            .filter(|g| fun_of(g, budget()).unwrap() == t)
            .map(|g| g.state().clone())
            .collect();
        assert_eq!(realizer_states(&sequential_realizers(&t, budget()).unwrap()), expected);
    }
}
