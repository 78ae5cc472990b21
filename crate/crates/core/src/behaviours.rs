//! Types as sets of tests: tasters, orthogonality, behaviours.
//!
//! A taster is an algorithm whose argument is the candidate algorithm itself.
//! It observes the candidate's moves by asking its function-space cells, and
//! signals success by outputting `err` on the observation cell `ans`.

use std::collections::BTreeSet;
use std::sync::{Arc, OnceLock};

use crate::budget::Budget;
use crate::cds::{enumerate_states, Cds, Cell, Event, State, Value};
use crate::error::{Error, Result};
use crate::fixtures::flat_cds;
use crate::interaction::{apply, AlgorithmArg, Outcome, Trace};
use crate::seqalg::{exponential, validate_algorithm, SeqAlg};

/// Observation structure: one cell `ans` holding `ok` or `err`.
pub fn observation_cds() -> Arc<Cds> {
    static O: OnceLock<Arc<Cds>> = OnceLock::new();
    O.get_or_init(|| Arc::new(flat_cds("O", &["ans"], &["ok", "err"]).expect("valid observation structure")))
        .clone()
}

pub fn ans_cell() -> Cell {
    Cell::name("ans")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Taster(SeqAlg);

impl Taster {
    pub fn new(alg: SeqAlg) -> Result<Self> {
        if **alg.to_cds() != *observation_cds() {
            return Err(Error::TypeMismatch(format!(
                "a taster must output into O, not `{}`",
                alg.to_cds().name()
            )));
        }
        Ok(Taster(alg))
    }

    pub fn algorithm(&self) -> &SeqAlg {
        &self.0
    }

    /// The function space its candidates live in.
    pub fn candidate_space(&self) -> &Arc<Cds> {
        self.0.from_cds()
    }
}

fn check_candidate(space: &Cds, s: &SeqAlg) -> Result<()> {
    if **s.space() == *space {
        Ok(())
    } else {
        Err(Error::TypeMismatch(format!(
            "candidate of type `{}` tested against tasters over `{}`",
            s.space().name(),
            space.name()
        )))
    }
}

/// Runs the taster against the candidate; orthogonal iff the taster outputs `err`.
pub fn orthogonal(t: &Taster, s: &SeqAlg) -> Result<(bool, Trace)> {
    check_candidate(t.candidate_space(), s)?;
    let (o, trace) = apply(&t.0, &mut AlgorithmArg(s.clone()), &ans_cell())?;
    Ok((matches!(o, Outcome::Value(ref v) if v.is_err()), trace))
}

/// A finite set of tasters over the algorithms of one type `from -> to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Behaviour {
    from: Arc<Cds>,
    to: Arc<Cds>,
    space: Arc<Cds>,
    tests: Vec<Taster>,
}

impl Behaviour {
    pub fn new(from: Arc<Cds>, to: Arc<Cds>, tests: impl IntoIterator<Item = Taster>, budget: Budget) -> Result<Self> {
        let space = Arc::new(exponential(&from, &to, budget)?);
        Behaviour {
            from,
            to,
            space,
            tests: Vec::new(),
        }
        .with_tests(tests)
    }

    /// The behaviour over the same type tested by `tests` instead.
    pub fn with_tests(&self, tests: impl IntoIterator<Item = Taster>) -> Result<Self> {
        let mut out: Vec<Taster> = Vec::new();
        for t in tests {
            if **t.candidate_space() != *self.space {
                return Err(Error::TypeMismatch(format!(
                    "taster over `{}` in a behaviour over `{}`",
                    t.candidate_space().name(),
                    self.space.name()
                )));
            }
            if !out.contains(&t) {
                out.push(t);
            }
        }
        Ok(Behaviour { tests: out, ..self.clone() })
    }

    pub fn from_cds(&self) -> &Arc<Cds> {
        &self.from
    }

    pub fn to_cds(&self) -> &Arc<Cds> {
        &self.to
    }

    pub fn space(&self) -> &Arc<Cds> {
        &self.space
    }

    pub fn tests(&self) -> &[Taster] {
        &self.tests
    }

    /// The behaviour tested by both test sets.
    pub fn intersect(&self, other: &Behaviour) -> Result<Behaviour> {
        if *self.space != *other.space {
            return Err(Error::TypeMismatch("behaviours over different candidate spaces".into()));
        }
        let mut tests = self.tests.clone();
        for t in &other.tests {
            if !tests.contains(t) {
                tests.push(t.clone());
            }
        }
        Ok(Behaviour { tests, ..self.clone() })
    }

    /// Every algorithm of the candidate type.
    pub fn candidates(&self, budget: Budget) -> Result<Vec<SeqAlg>> {
        Ok(enumerate_states(&self.space, budget)?
            .into_iter()
            .map(|s| SeqAlg::from_parts(self.from.clone(), self.to.clone(), self.space.clone(), s))
            .collect())
    }
}

pub fn member(b: &Behaviour, s: &SeqAlg) -> Result<bool> {
    check_candidate(&b.space, s)?;
    for t in &b.tests {
        if !orthogonal(t, s)?.0 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Indices of the members of `b` among `candidates`.
pub fn member_set(b: &Behaviour, candidates: &[SeqAlg]) -> Result<BTreeSet<usize>> {
    let mut out = BTreeSet::new();
    for (i, s) in candidates.iter().enumerate() {
        if member(b, s)? {
            out.insert(i);
        }
    }
    Ok(out)
}

fn taster_from(space_from: &Arc<Cds>, space_to: &Arc<Cds>, evs: Vec<Event>, budget: Budget) -> Result<Taster> {
    let space = Arc::new(exponential(space_from, space_to, budget)?);
    let alg = validate_algorithm(&space, &observation_cds(), evs, budget)?;
    Taster::new(alg)
}

/// Taster accepting candidates whose first move at `out` is `valof needed`.
pub fn neededness_taster(
    from: &Arc<Cds>,
    to: &Arc<Cds>,
    out: &Cell,
    needed: &Cell,
    budget: Budget,
) -> Result<Taster> {
    let first = Cell::fun(State::new(), out.clone());
    let seen = State::new().with(first.clone(), Value::Valof(needed.clone()));
    let evs = vec![
        Event::new(Cell::fun(State::new(), ans_cell()), Value::Valof(first)),
        Event::new(Cell::fun(seen, ans_cell()), Value::output(Value::err())),
    ];
    taster_from(from, to, evs, budget)
}

/// The empty structure, domain of constant algorithms.
pub fn empty_cds() -> Arc<Cds> {
    static E: OnceLock<Arc<Cds>> = OnceLock::new();
    E.get_or_init(|| Arc::new(flat_cds("Empty", &[], &[]).expect("valid empty structure")))
        .clone()
}

/// Taster accepting records (as constant algorithms `Empty -> record`) with `field` filled.
pub fn presence_taster(record: &Arc<Cds>, field: &Cell, budget: Budget) -> Result<Taster> {
    if !record.has_cell(field) {
        return Err(Error::UnknownField(field.clone()));
    }
    let asked = Cell::fun(State::new(), field.clone());
    let mut evs = vec![Event::new(Cell::fun(State::new(), ans_cell()), Value::Valof(asked.clone()))];
    for v in record.values_of(field) {
        let seen = State::new().with(asked.clone(), Value::output(v.clone()));
        evs.push(Event::new(Cell::fun(seen, ans_cell()), Value::output(Value::err())));
    }
    taster_from(&empty_cds(), record, evs, budget)
}

/// A record datum wrapped as a constant algorithm, the candidate form of presence tasters.
pub fn record_candidate(record: &Arc<Cds>, r: &State, budget: Budget) -> Result<SeqAlg> {
    crate::seqalg::constant_algorithm(&empty_cds(), record, r, budget)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubtypeMode {
    Syntactic,
    Semantic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtypeVerdict {
    /// `sup.tests ⊆ sub.tests`, a sufficient condition.
    pub syntactic: bool,
    /// Member-set inclusion over every candidate, when requested.
    pub semantic: Option<bool>,
}

impl SubtypeVerdict {
    pub fn holds(&self) -> bool {
        self.semantic.unwrap_or(self.syntactic)
    }
}

pub fn subtype(sub: &Behaviour, sup: &Behaviour, mode: SubtypeMode, budget: Budget) -> Result<SubtypeVerdict> {
    if *sub.space != *sup.space {
        return Err(Error::TypeMismatch("behaviours over different candidate spaces".into()));
    }
    let syntactic = sup.tests.iter().all(|t| sub.tests.contains(t));
    let semantic = match mode {
        SubtypeMode::Syntactic => None,
        SubtypeMode::Semantic => {
            let all = sub.candidates(budget)?;
            Some(member_set(sub, &all)?.is_subset(&member_set(sup, &all)?))
        }
    };
    Ok(SubtypeVerdict { syntactic, semantic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn t2_observes_second_coordinate() {
        let t2 = fixtures::taster_t2();
        let cands = fixtures::taster_candidates();
        assert_eq!(cands.len(), 32);
        let asks2 = cands
            .iter()
            .find(|s| s.move_at(&State::new(), &Cell::name("out")) == Some(&Value::Valof(Cell::tagged(2, Cell::name("in")))))
            .unwrap();
        let (yes, trace) = orthogonal(&t2, asks2).unwrap();
        assert!(yes);
        assert_eq!(
            trace.to_text(false),
            "REQ ans\nVALOF <{}|-out>\nANS valof 2.in\nOUT err\nRESULT value:err\n"
        );
        let outputs = cands
            .iter()
            .find(|s| matches!(s.move_at(&State::new(), &Cell::name("out")), Some(Value::Output(_))))
            .unwrap();
        let (no, trace) = orthogonal(&t2, outputs).unwrap();
        assert!(!no);
        assert_eq!(trace.outcome, Outcome::Stuck);
        assert!(!orthogonal(&t2, &cands[0]).unwrap().0);
    }

    #[test]
    fn empty_behaviour_accepts_everything() {
        let s0 = &fixtures::taster_candidates()[0];
        let b = Behaviour::new(s0.from_cds().clone(), s0.to_cds().clone(), [], Budget::default()).unwrap();
        for s in fixtures::taster_candidates() {
            assert!(member(&b, &s).unwrap());
        }
    }

    #[test]
    fn type_mismatch_is_reported() {
        let t2 = fixtures::taster_t2();
        assert!(matches!(orthogonal(&t2, &fixtures::alg_a()), Err(Error::TypeMismatch(_))));
    }

    #[test]
    fn presence_tasters_on_records() {
        let rec = Arc::new(fixtures::record_cds());
        let year = presence_taster(&rec, &Cell::name("year"), Budget::default()).unwrap();
        assert_eq!(year.algorithm().len(), 3);
        let filled = record_candidate(&rec, &fixtures::sample_record(), Budget::default()).unwrap();
        assert!(orthogonal(&year, &filled).unwrap().0);
        let blank = record_candidate(&rec, &State::new(), Budget::default()).unwrap();
        let (ok, trace) = orthogonal(&year, &blank).unwrap();
        assert!(!ok);
        assert_eq!(trace.outcome, Outcome::Stuck);
        assert!(matches!(
            presence_taster(&rec, &Cell::name("weight"), Budget::default()),
            Err(Error::UnknownField(_))
        ));
    }

    #[test]
    fn subtype_is_reflexive() {
        let b = fixtures::record_behaviour(&["year", "price"]);
        let v = subtype(&b, &b, SubtypeMode::Semantic, Budget::default()).unwrap();
        assert!(v.syntactic);
        assert_eq!(v.semantic, Some(true));
    }
}
