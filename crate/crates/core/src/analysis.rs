//! Classification of finite function tables: monotone, stable, sequential.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::budget::Budget;
use crate::cds::{accessible_cells, check_state, enumerate_states, Cds, Cell, State, Value};
use crate::error::{Error, Result, Violation};
use crate::interaction::fun_of;
use crate::seqalg::{exponential, validate_in, SeqAlg};

/// A total map from the states of `from` to states of `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunTable {
    from: Arc<Cds>,
    to: Arc<Cds>,
    rows: BTreeMap<State, State>,
}

impl FunTable {
    /// Checks totality and that every image is a state of `to`.
    pub fn new(from: Arc<Cds>, to: Arc<Cds>, rows: BTreeMap<State, State>, budget: Budget) -> Result<Self> {
        let inputs: BTreeSet<State> = enumerate_states(&from, budget)?.into_iter().collect();
        let mut violations = Vec::new();
        for x in &inputs {
            if !rows.contains_key(x) {
                violations.push(Violation::MissingRow(x.clone()));
            }
        }
        for (x, y) in &rows {
            if !inputs.contains(x) {
                violations.push(Violation::UnknownRow(x.clone()));
            }
            if let Err(e) = check_state(&to, y.events()) {
                for v in e.violations() {
                    violations.push(Violation::BadImage {
                        input: x.clone(),
                        reason: Box::new(v.clone()),
                    });
                }
            }
        }
        if violations.is_empty() {
            Ok(FunTable { from, to, rows })
        } else {
            Err(Error::invalid(violations))
        }
    }

    /// Tabulates `f` over every state of `from`.
    pub fn tabulate(from: Arc<Cds>, to: Arc<Cds>, budget: Budget, f: impl Fn(&State) -> State) -> Result<Self> {
        let rows = enumerate_states(&from, budget)?
            .into_iter()
            .map(|x| {
                let y = f(&x);
                (x, y)
            })
            .collect();
        FunTable::new(from, to, rows, budget)
    }

    /// Fills every state missing from `rows` with the empty state.
    pub fn with_default_empty(
        from: Arc<Cds>,
        to: Arc<Cds>,
        mut rows: BTreeMap<State, State>,
        budget: Budget,
    ) -> Result<Self> {
        for x in enumerate_states(&from, budget)? {
            rows.entry(x).or_default();
        }
        FunTable::new(from, to, rows, budget)
    }

    pub fn from_cds(&self) -> &Arc<Cds> {
        &self.from
    }

    pub fn to_cds(&self) -> &Arc<Cds> {
        &self.to
    }

    pub fn rows(&self) -> &BTreeMap<State, State> {
        &self.rows
    }

    pub fn get(&self, x: &State) -> Option<&State> {
        self.rows.get(x)
    }
}

/// Outcome of a property check, carrying a witness on failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check<W> {
    Holds,
    Fails(W),
}

impl<W> Check<W> {
    pub fn holds(&self) -> bool {
        matches!(self, Check::Holds)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Check::Holds => None,
            Check::Fails(w) => Some(w),
        }
    }
}

/// `smaller ⊆ larger` but `t(smaller) ⊄ t(larger)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneWitness {
    pub smaller: State,
    pub larger: State,
}

pub fn is_monotone(t: &FunTable) -> Check<MonotoneWitness> {
    for (x, tx) in &t.rows {
        for (y, ty) in &t.rows {
            if x != y && x.is_subset(y) && !tx.is_subset(ty) {
                return Check::Fails(MonotoneWitness {
                    smaller: x.clone(),
                    larger: y.clone(),
                });
            }
        }
    }
    Check::Holds
}

/// Two compatible inputs whose meet is not preserved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityWitness {
    pub x: State,
    pub y: State,
    /// `t(x ∩ y)`
    pub image_of_meet: State,
    /// `t(x) ∩ t(y)`
    pub meet_of_images: State,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityReport {
    pub verdict: Check<StabilityWitness>,
    /// Compatible pairs whose intersection was not a state (left unchecked).
    pub skipped: Vec<(State, State)>,
}

impl StabilityReport {
    pub fn is_stable(&self) -> bool {
        self.verdict.holds()
    }
}

/// Checks `t(x ∩ y) = t(x) ∩ t(y)` for every pair bounded above by a state.
pub fn is_stable(t: &FunTable) -> Result<StabilityReport> {
    if !is_monotone(t).holds() {
        return Err(Error::NotMonotone);
    }
    let mut skipped = Vec::new();
    let rows: Vec<(&State, &State)> = t.rows.iter().collect();
    for (i, (x, tx)) in rows.iter().enumerate() {
        for (y, ty) in &rows[i + 1..] {
            let Some(upper) = x.join(y) else { continue };
            if check_state(&t.from, upper.events()).is_err() {
                continue;
            }
            let meet = x.meet(y);
            let Some(image_of_meet) = t.rows.get(&meet) else {
                skipped.push(((*x).clone(), (*y).clone()));
                continue;
            };
            let meet_of_images = tx.meet(ty);
            if *image_of_meet != meet_of_images {
                return Ok(StabilityReport {
                    verdict: Check::Fails(StabilityWitness {
                        x: (*x).clone(),
                        y: (*y).clone(),
                        image_of_meet: image_of_meet.clone(),
                        meet_of_images,
                    }),
                    skipped,
                });
            }
        }
    }
    Ok(StabilityReport {
        verdict: Check::Holds,
        skipped,
    })
}

/// Decision trees for one output cell, each a set of exponential events.
type Trees = Vec<BTreeMap<Cell, Value>>;

struct Search<'a> {
    t: &'a FunTable,
    out: &'a Cell,
    /// Inputs on which a dialogue for `out` may be started by `fun_of`.
    relevant: Vec<&'a State>,
    budget: Budget,
    nodes: usize,
}

impl Search<'_> {
    /// Requirement on `t(x)` at `out` for one relevant input.
    fn expected(&self, x: &State) -> Option<&Value> {
        self.t.rows[x].get(self.out)
    }

    fn trees(&mut self, y: &State) -> Result<Trees> {
        self.nodes += 1;
        self.budget.check(self.nodes)?;
        let reaching: Vec<&State> = self.relevant.iter().copied().filter(|x| y.is_subset(x)).collect();
        let mut found = Trees::new();

        if reaching.iter().all(|x| self.expected(x).is_none()) {
            found.push(BTreeMap::new());
        }
        let here = Cell::fun(y.clone(), self.out.clone());
        for v in self.t.to.values_of(self.out) {
            if reaching.iter().all(|x| self.expected(x) == Some(v)) {
                found.push([(here.clone(), Value::output(v.clone()))].into());
            }
        }
        let m = self.t.from.clone();
        for c in accessible_cells(&m, y) {
            // inputs leaving c unfilled stop here and must expect nothing
            if reaching.iter().any(|x| !x.is_filled(&c) && self.expected(x).is_some()) {
                continue;
            }
            let mut partial: Trees = vec![[(here.clone(), Value::Valof(c.clone()))].into()];
            for v in m.values_of(&c) {
                let children = self.trees(&y.with(c.clone(), v.clone()))?;
                let mut next = Trees::new();
                for p in &partial {
                    for ch in &children {
                        let mut merged = p.clone();
                        merged.extend(ch.iter().map(|(k, v)| (k.clone(), v.clone())));
                        next.push(merged);
                    }
                }
                self.budget.check(self.nodes + next.len())?;
                partial = next;
                if partial.is_empty() {
                    break;
                }
            }
            found.extend(partial);
        }
        Ok(found)
    }
}

/// Every sequential algorithm whose function is exactly `t`.
///
/// When every output cell is initial the search builds, per output cell, all
/// decision trees rooted at `<{}|-c'>` that agree with `t`. Otherwise every
/// algorithm of the type is enumerated and filtered. An empty result means no
/// schedule exists.
pub fn sequential_realizers(t: &FunTable, budget: Budget) -> Result<Vec<SeqAlg>> {
    if !t.to.cells().iter().all(|c| t.to.is_initial(c)) {
        let mut out = Vec::new();
        for f in crate::seqalg::enumerate_algorithms(&t.from, &t.to, budget)? {
            if fun_of(&f, budget)? == *t {
                out.push(f);
            }
        }
        out.sort_by(|a, b| (a.len(), a.state()).cmp(&(b.len(), b.state())));
        return Ok(out);
    }
    let space = Arc::new(exponential(&t.from, &t.to, budget)?);
    let mut per_cell: Vec<Trees> = Vec::new();
    for out in t.to.cells() {
        let relevant: Vec<&State> = t
            .rows
            .iter()
            .filter(|(_, tx)| tx.is_filled(out) || t.to.is_enabled_in(out, tx))
            .map(|(x, _)| x)
            .collect();
        let mut search = Search {
            t,
            out,
            relevant,
            budget,
            nodes: 0,
        };
        let trees = search.trees(&State::new())?;
        if trees.is_empty() {
            return Ok(Vec::new());
        }
        per_cell.push(trees);
    }

    let mut combos: Trees = vec![BTreeMap::new()];
    for trees in &per_cell {
        let mut next = Trees::new();
        for c in &combos {
            for tr in trees {
                let mut merged = c.clone();
                merged.extend(tr.iter().map(|(k, v)| (k.clone(), v.clone())));
                next.push(merged);
            }
        }
        budget.check(next.len())?;
        combos = next;
    }

    let mut out = Vec::new();
    for evs in combos {
        let Ok(f) = validate_in(&t.from, &t.to, &space, evs.into_iter().map(|(c, v)| crate::cds::Event::new(c, v)))
        else {
            continue;
        };
        if fun_of(&f, budget)? == *t {
            out.push(f);
        }
    }
    out.sort_by(|a, b| (a.len(), a.state()).cmp(&(b.len(), b.state())));
    out.dedup();
    Ok(out)
}

/// Monotone / stable / sequential verdicts for one table.
#[derive(Clone, Debug)]
pub struct Classification {
    pub monotone: Check<MonotoneWitness>,
    pub stable: Option<StabilityReport>,
    pub realizers: Vec<SeqAlg>,
}

impl Classification {
    pub fn is_sequential(&self) -> bool {
        !self.realizers.is_empty()
    }

    pub fn is_stable(&self) -> bool {
        self.stable.as_ref().is_some_and(StabilityReport::is_stable)
    }
}

pub fn classify(t: &FunTable, budget: Budget) -> Result<Classification> {
    let monotone = is_monotone(t);
    let stable = if monotone.holds() { Some(is_stable(t)?) } else { None };
    let realizers = if monotone.holds() {
        sequential_realizers(t, budget)?
    } else {
        Vec::new()
    };
    Ok(Classification {
        monotone,
        stable,
        realizers,
    })
}
