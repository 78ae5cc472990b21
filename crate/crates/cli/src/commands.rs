//! Engine calls shared by the REPL, the batch commands and the server.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use cdslab_core::analysis::{classify, Classification};
use cdslab_core::behaviours::{self, orthogonal, SubtypeMode, SubtypeVerdict, Taster};
use cdslab_core::cds::with_err;
use cdslab_core::interaction::{AlgorithmArg, ArgumentProcess, Session, SessionStep, StaticArg};
use cdslab_core::syntax::{parse_cell, parse_events, parse_type, parse_value, Kind, TypeExpr, Workspace};
use cdslab_core::{check_state, enumerate_algorithms, Answer, Cell, Cds, Outcome, SeqAlg, State, Trace};

use crate::error::{CliError, CliResult};

/// How the argument of a session is played.
#[derive(Clone, Debug)]
pub enum ArgSpec {
    Static(State),
    Algorithm(String, SeqAlg),
    Manual,
}

impl ArgSpec {
    pub fn describe(&self) -> String {
        match self {
            ArgSpec::Static(x) => x.to_string(),
            ArgSpec::Algorithm(name, _) => name.clone(),
            ArgSpec::Manual => "manual".into(),
        }
    }

    pub fn process(&self) -> Option<Box<dyn ArgumentProcess + Send>> {
        match self {
            ArgSpec::Static(x) => Some(Box::new(StaticArg(x.clone()))),
            ArgSpec::Algorithm(_, f) => Some(Box::new(AlgorithmArg(f.clone()))),
            ArgSpec::Manual => None,
        }
    }
}

pub fn alg<'a>(ws: &'a Workspace, name: &str) -> CliResult<&'a SeqAlg> {
    ws.alg(name).map(|d| &d.alg).ok_or_else(|| CliError::unknown("algorithm", name))
}

/// Reads a definition file, or every file of a directory in dependency order.
pub fn load_path(ws: &mut Workspace, path: &Path) -> CliResult<Vec<(Kind, String)>> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if !path.is_dir() {
        let text = fs::read_to_string(path).map_err(io)?;
        return ws.load(&text).map_err(CliError::Definitions);
    }
    let mut pending: Vec<(String, String)> = Vec::new();
    let mut entries: Vec<_> = fs::read_dir(path)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    entries.sort();
    for p in entries {
        let text = fs::read_to_string(&p).map_err(|source| CliError::Io { path: p.clone(), source })?;
        pending.push((p.display().to_string(), text));
    }
    // files may refer to each other: retry until nothing more loads
    let mut added = Vec::new();
    loop {
        let mut failures = Vec::new();
        let before = pending.len();
        for (name, text) in pending {
            match ws.load(&text) {
                Ok(names) => added.extend(names),
                Err(errs) => failures.push((name, text, errs)),
            }
        }
        if failures.is_empty() {
            return Ok(added);
        }
        if failures.len() == before {
            let (name, _, errs) = failures.swap_remove(0);
            let first = errs.into_iter().next().map(|e| e.to_string()).unwrap_or_default();
            return Err(CliError::Invalid(format!("{name}:{first}")));
        }
        pending = failures.into_iter().map(|(n, t, _)| (n, t)).collect();
    }
}

/// `{c=v, ...}` checked against the input structure with `err` added,
/// `manual`, or the name of an algorithm.
pub fn parse_arg(ws: &Workspace, f: &SeqAlg, text: &str) -> CliResult<ArgSpec> {
    let text = text.trim();
    if text == "manual" {
        return Ok(ArgSpec::Manual);
    }
    if !text.starts_with('{') {
        let g = alg(ws, text)?;
        if **f.from_cds() != **g.space() {
            return Err(CliError::Invalid(format!("`{text}` is not an argument of type {}", f.from_cds().name())));
        }
        return Ok(ArgSpec::Algorithm(text.to_string(), g.clone()));
    }
    let evs = parse_events(text).map_err(|e| CliError::Invalid(format!("argument {e}")))?;
    let x = check_state(&with_err(f.from_cds()), evs)
        .map_err(|e| CliError::Invalid(format!("argument is not a state of {}: {e}", f.from_cds().name())))?;
    Ok(ArgSpec::Static(x))
}

pub fn cell(text: &str) -> CliResult<Cell> {
    parse_cell(text.trim()).map_err(|e| CliError::Usage(format!("cell {e}")))
}

pub fn answer(text: &str) -> CliResult<Answer> {
    let v = parse_value(text.trim()).map_err(|e| CliError::Usage(format!("value {e}")))?;
    Ok(if v.is_err() { Answer::Err } else { Answer::Value(v) })
}

pub fn open(ws: &Workspace, name: &str, arg: &str) -> CliResult<(Session, ArgSpec)> {
    let f = alg(ws, name)?;
    let spec = parse_arg(ws, f, arg)?;
    Ok((Session::open(f.clone(), spec.process()), spec))
}

/// `out = tt`, `err` or `stuck`.
pub fn summary(trace: &Trace) -> String {
    match &trace.outcome {
        Outcome::Value(v) => format!("{} = {v}", trace.request),
        Outcome::Err => "err".into(),
        Outcome::Stuck => "stuck".into(),
    }
}

/// Runs one request on a fresh session; the text `eval` prints.
pub fn eval(ws: &Workspace, name: &str, arg: &ArgSpec, request: &str, trace: bool, verbose: bool) -> CliResult<String> {
    let f = alg(ws, name)?;
    let mut s = Session::open(f.clone(), arg.process());
    let step = s.request(&cell(request)?)?;
    let SessionStep::Finished(t) = step else {
        return Err(CliError::Usage("a manual argument needs the repl or the server".into()));
    };
    Ok(result_text(&t, trace, verbose))
}

pub fn result_text(t: &Trace, trace: bool, verbose: bool) -> String {
    let mut out = if trace { t.to_text(verbose) } else { String::new() };
    out.push_str(&summary(t));
    out.push('\n');
    out
}

pub fn table_classification(ws: &Workspace, name: &str) -> CliResult<Classification> {
    let t = ws.table(name).ok_or_else(|| CliError::unknown("table", name))?;
    Ok(classify(&t.table, ws.budget())?)
}

pub fn classification_text(name: &str, c: &Classification) -> String {
    let mut s = format!("table {name}\n");
    match c.monotone.witness() {
        None => s.push_str("monotone: yes\n"),
        Some(w) => s.push_str(&format!("monotone: no  {} below {}\n", w.smaller, w.larger)),
    }
    match &c.stable {
        None => s.push_str("stable: no  (not monotone)\n"),
        Some(r) => match r.verdict.witness() {
            None => s.push_str("stable: yes\n"),
            Some(w) => s.push_str(&format!(
                "stable: no  x={} y={} f(x^y)={} f(x)^f(y)={}\n",
                w.x, w.y, w.image_of_meet, w.meet_of_images
            )),
        },
    }
    if c.realizers.is_empty() {
        s.push_str("sequential: no\n");
    } else {
        s.push_str(&format!("sequential: yes  {} realizers\n", c.realizers.len()));
        for f in &c.realizers {
            s.push_str(&format!("  {}\n", f.state()));
        }
    }
    s
}

/// `M N` or `M -> N`.
pub fn split_type(text: &str) -> CliResult<(TypeExpr, TypeExpr)> {
    if let Ok(TypeExpr::Arrow(a, b)) = parse_type(text) {
        return Ok((*a, *b));
    }
    let parts: Vec<&str> = text.split_whitespace().collect();
    let [m, n] = parts[..] else {
        return Err(CliError::Usage("expected two types, `M N` or `M -> N`".into()));
    };
    let ty = |s: &str| parse_type(s).map_err(|e| CliError::Usage(format!("type {e}")));
    Ok((ty(m)?, ty(n)?))
}

pub fn resolve(ws: &Workspace, ty: &TypeExpr) -> CliResult<Arc<Cds>> {
    ws.resolve(ty).map_err(|e| match e {
        cdslab_core::syntax::ResolveError::UnknownName(n) => CliError::unknown("structure", &n),
        cdslab_core::syntax::ResolveError::Engine(e) => CliError::Engine(e),
    })
}

pub fn enumerate(ws: &Workspace, from: &TypeExpr, to: &TypeExpr) -> CliResult<Vec<SeqAlg>> {
    let (m, n) = (resolve(ws, from)?, resolve(ws, to)?);
    Ok(enumerate_algorithms(&m, &n, ws.budget())?)
}

pub fn enumeration_text(from: &TypeExpr, to: &TypeExpr, algs: &[SeqAlg]) -> String {
    let mut s = format!("{} algorithms {}\n", algs.len(), TypeExpr::arrow(from.clone(), to.clone()));
    for f in algs {
        s.push_str(&format!("  {}\n", f.state()));
    }
    s
}

pub fn taster(ws: &Workspace, name: &str) -> CliResult<Taster> {
    Ok(Taster::new(alg(ws, name)?.clone())?)
}

pub fn ortho(ws: &Workspace, t: &str, s: &str) -> CliResult<(bool, Trace)> {
    Ok(orthogonal(&taster(ws, t)?, alg(ws, s)?)?)
}

pub fn behaviour<'a>(ws: &'a Workspace, name: &str) -> CliResult<&'a behaviours::Behaviour> {
    ws.behaviour(name)
        .map(|d| &d.behaviour)
        .ok_or_else(|| CliError::unknown("behaviour", name))
}

pub fn member(ws: &Workspace, b: &str, s: &str) -> CliResult<bool> {
    Ok(behaviours::member(behaviour(ws, b)?, alg(ws, s)?)?)
}

pub fn subtype(ws: &Workspace, sub: &str, sup: &str) -> CliResult<SubtypeVerdict> {
    Ok(behaviours::subtype(
        behaviour(ws, sub)?,
        behaviour(ws, sup)?,
        SubtypeMode::Semantic,
        ws.budget(),
    )?)
}

pub fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn subtype_text(sub: &str, sup: &str, v: &SubtypeVerdict) -> String {
    format!(
        "{sub} <: {sup}\nsyntactic: {}\nsemantic: {}\n",
        yes(v.syntactic),
        v.semantic.map(yes).unwrap_or("unchecked")
    )
}
