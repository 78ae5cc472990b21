use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::analysis::FunTable;
use crate::behaviours::{Behaviour, Taster};
use crate::cds::{make_cds, Cell, Event, Precondition, State, Value};
use crate::error::{Error, Violation};
use crate::seqalg::validate_algorithm;

use super::lexer::{tokenize, Tok, Token};
use super::workspace::{AlgDecl, BehaviourDecl, Kind, ResolveError, TableDecl, TypeExpr, Workspace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DefErrorKind {
    Syntax { expected: String, found: String },
    Validation(Error),
    DuplicateName { kind: Kind, name: String },
    UnknownName(String),
}

/// A positioned syntax or validation error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefError {
    pub line: usize,
    pub col: usize,
    pub kind: DefErrorKind,
}

impl fmt::Display for DefError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.col)?;
        match &self.kind {
            DefErrorKind::Syntax { expected, found } => write!(f, "expected {expected}, found {found}"),
            DefErrorKind::Validation(e) => write!(f, "{e}"),
            DefErrorKind::DuplicateName { kind, name } => {
                write!(f, "{} `{name}` is already defined differently", kind.keyword())
            }
            DefErrorKind::UnknownName(n) => write!(f, "unknown name `{n}`"),
        }
    }
}

impl std::error::Error for DefError {}

type PResult<T> = Result<T, DefError>;

#[derive(Clone, Copy)]
struct Pos {
    line: usize,
    col: usize,
}

impl Pos {
    fn err(self, kind: DefErrorKind) -> DefError {
        DefError {
            line: self.line,
            col: self.col,
            kind,
        }
    }
}

struct CdsItem {
    cells: Vec<Cell>,
    values: Vec<Value>,
    events: Vec<Event>,
    enables: Vec<(Cell, Precondition)>,
}

enum Body {
    Cds(CdsItem),
    Alg(TypeExpr, Vec<(Vec<Event>, Cell, Value)>),
    Table(TypeExpr, Vec<(Vec<Event>, Vec<Event>)>, bool),
    Behaviour(TypeExpr, Vec<(String, Pos)>),
}

struct Item {
    name: String,
    pos: Pos,
    body: Body,
}

const TOP_LEVEL: [&str; 4] = ["cds", "alg", "table", "behaviour"];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        let toks = tokenize(text).map_err(|e| DefError {
            line: e.line,
            col: e.col,
            kind: DefErrorKind::Syntax {
                expected: "a name or punctuation".into(),
                found: format!("`{}`", e.found),
            },
        })?;
        Ok(Parser { toks, pos: 0 })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> Pos {
        let t = self.peek();
        Pos { line: t.line, col: t.col }
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &str) -> PResult<T> {
        Err(self.here().err(DefErrorKind::Syntax {
            expected: expected.to_string(),
            found: self.peek().tok.to_string(),
        }))
    }

    fn is_punct(&self, p: &str) -> bool {
        matches!(&self.peek().tok, Tok::Punct(q) if *q == p)
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    fn punct(&mut self, p: &str) -> PResult<()> {
        if self.is_punct(p) {
            self.bump();
            Ok(())
        } else {
            self.fail(&format!("`{p}`"))
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            self.fail(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Pos)> {
        let pos = self.here();
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok((s, pos))
            }
            _ => self.fail(what),
        }
    }

    fn cell(&mut self) -> PResult<Cell> {
        if self.is_punct("<") {
            self.bump();
            let input = self.state()?;
            self.punct("|-")?;
            let out = self.cell()?;
            self.punct(">")?;
            return Ok(Cell::fun(input, out));
        }
        let (name, pos) = self.ident("a cell")?;
        if self.is_punct(".") && name.chars().all(|c| c.is_ascii_digit()) {
            self.bump();
            let tag = name.parse::<u32>().map_err(|_| {
                pos.err(DefErrorKind::Syntax {
                    expected: "a small coordinate number".into(),
                    found: format!("`{name}`"),
                })
            })?;
            return Ok(Cell::tagged(tag, self.cell()?));
        }
        Ok(Cell::name(&name))
    }

    fn value(&mut self) -> PResult<Value> {
        if self.is_keyword("valof") {
            self.bump();
            return Ok(Value::Valof(self.cell()?));
        }
        if self.is_keyword("output") {
            self.bump();
            return Ok(Value::output(self.value()?));
        }
        let (name, _) = self.ident("a value")?;
        Ok(Value::name(&name))
    }

    /// `{c=v, ...}` as written, duplicates kept.
    fn events(&mut self) -> PResult<(Vec<Event>, Pos)> {
        let pos = self.here();
        self.punct("{")?;
        let mut out = Vec::new();
        if !self.is_punct("}") {
            loop {
                let c = self.cell()?;
                self.punct("=")?;
                let v = self.value()?;
                out.push(Event::new(c, v));
                if self.is_punct(",") {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.punct("}")?;
        Ok((out, pos))
    }

    fn state(&mut self) -> PResult<State> {
        let (evs, pos) = self.events()?;
        functional(evs, pos)
    }

    fn type_expr(&mut self) -> PResult<TypeExpr> {
        let lhs = self.type_product()?;
        if self.is_punct("->") {
            self.bump();
            let rhs = self.type_expr()?;
            return Ok(TypeExpr::arrow(lhs, rhs));
        }
        Ok(lhs)
    }

    fn type_product(&mut self) -> PResult<TypeExpr> {
        let first = self.type_atom()?;
        if !self.is_punct("*") {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.is_punct("*") {
            self.bump();
            items.push(self.type_atom()?);
        }
        Ok(TypeExpr::Product(items))
    }

    fn type_atom(&mut self) -> PResult<TypeExpr> {
        if self.is_punct("(") {
            self.bump();
            let t = self.type_expr()?;
            self.punct(")")?;
            return Ok(t);
        }
        let (n, _) = self.ident("a structure name or `(`")?;
        Ok(TypeExpr::Name(n))
    }

    fn item(&mut self) -> PResult<Item> {
        let (kw, _) = self.ident("`cds`, `alg`, `table` or `behaviour`")?;
        let (name, pos) = self.ident("a name")?;
        let body = match kw.as_str() {
            "cds" => Body::Cds(self.cds_body()?),
            "alg" => {
                self.punct(":")?;
                let ty = self.type_expr()?;
                Body::Alg(ty, self.alg_body()?)
            }
            "table" => {
                self.punct(":")?;
                let ty = self.type_expr()?;
                let (rows, default_empty) = self.table_body()?;
                Body::Table(ty, rows, default_empty)
            }
            "behaviour" => {
                self.punct(":")?;
                let ty = self.type_expr()?;
                Body::Behaviour(ty, self.behaviour_body()?)
            }
            _ => {
                return Err(pos.err(DefErrorKind::Syntax {
                    expected: "`cds`, `alg`, `table` or `behaviour`".into(),
                    found: format!("`{kw}`"),
                }))
            }
        };
        Ok(Item { name, pos, body })
    }

    fn cds_body(&mut self) -> PResult<CdsItem> {
        let mut item = CdsItem {
            cells: Vec::new(),
            values: Vec::new(),
            events: Vec::new(),
            enables: Vec::new(),
        };
        self.punct("{")?;
        while !self.is_punct("}") {
            let (clause, _) = self.ident("`cells`, `values`, `events` or `enable`")?;
            match clause.as_str() {
                "cells" => {
                    while !self.is_punct(";") {
                        item.cells.push(self.cell()?);
                    }
                }
                "values" => {
                    while !self.is_punct(";") {
                        item.values.push(self.value()?);
                    }
                }
                "events" => {
                    while !self.is_punct(";") {
                        let c = self.cell()?;
                        self.punct(":")?;
                        let v = self.value()?;
                        item.events.push(Event::new(c, v));
                    }
                }
                "enable" => {
                    let c = self.cell()?;
                    self.punct("<-")?;
                    let pre = if self.is_keyword("initial") && *self.peek_at(1) == Tok::Punct(";") {
                        self.bump();
                        Precondition::Initial
                    } else {
                        let pc = self.cell()?;
                        self.punct(":")?;
                        Precondition::Event(Event::new(pc, self.value()?))
                    };
                    item.enables.push((c, pre));
                }
                _ => return self.fail_at_prev("`cells`, `values`, `events` or `enable`", &clause),
            }
            self.punct(";")?;
        }
        self.punct("}")?;
        Ok(item)
    }

    fn fail_at_prev<T>(&self, expected: &str, found: &str) -> PResult<T> {
        let t = &self.toks[self.pos.saturating_sub(1)];
        Err(DefError {
            line: t.line,
            col: t.col,
            kind: DefErrorKind::Syntax {
                expected: expected.into(),
                found: format!("`{found}`"),
            },
        })
    }

    fn alg_body(&mut self) -> PResult<Vec<(Vec<Event>, Cell, Value)>> {
        let mut lines = Vec::new();
        self.punct("{")?;
        while !self.is_punct("}") {
            self.keyword("at")?;
            let (input, _) = self.events()?;
            let out = self.cell()?;
            let mv = if self.is_keyword("ask") {
                self.bump();
                Value::Valof(self.cell()?)
            } else if self.is_keyword("put") {
                self.bump();
                Value::output(self.value()?)
            } else {
                return self.fail("`ask` or `put`");
            };
            self.punct(";")?;
            lines.push((input, out, mv));
        }
        self.punct("}")?;
        Ok(lines)
    }

    #[allow(clippy::type_complexity)]
    fn table_body(&mut self) -> PResult<(Vec<(Vec<Event>, Vec<Event>)>, bool)> {
        let mut rows = Vec::new();
        let mut default_empty = false;
        self.punct("{")?;
        while !self.is_punct("}") {
            if self.is_keyword("default") {
                self.bump();
                self.keyword("empty")?;
                default_empty = true;
            } else {
                let (x, _) = self.events()?;
                self.punct("=>")?;
                let (y, _) = self.events()?;
                rows.push((x, y));
            }
            self.punct(";")?;
        }
        self.punct("}")?;
        Ok((rows, default_empty))
    }

    fn behaviour_body(&mut self) -> PResult<Vec<(String, Pos)>> {
        let mut tests = Vec::new();
        self.punct("{")?;
        while !self.is_punct("}") {
            self.keyword("tests")?;
            while !self.is_punct(";") {
                tests.push(self.ident("a taster name")?);
            }
            self.punct(";")?;
        }
        self.punct("}")?;
        Ok(tests)
    }

    /// Skips the rest of the item that started at `start`.
    fn recover(&mut self, start: usize) {
        let mut i = start + 1;
        let mut depth = 0usize;
        while i < self.toks.len() - 1 {
            match &self.toks[i].tok {
                Tok::Punct("{") => depth += 1,
                Tok::Punct("}") => {
                    depth = depth.saturating_sub(1);
                    if depth == 0 {
                        i += 1;
                        break;
                    }
                }
                Tok::Ident(s) if depth == 0 && TOP_LEVEL.contains(&s.as_str()) => break,
                _ => {}
            }
            i += 1;
        }
        self.pos = i.min(self.toks.len() - 1);
    }

    fn finish(&mut self) -> PResult<()> {
        if self.at_eof() {
            Ok(())
        } else {
            self.fail("end of input")
        }
    }
}

fn functional(evs: Vec<Event>, pos: Pos) -> PResult<State> {
    let mut map: BTreeMap<Cell, Value> = BTreeMap::new();
    for e in evs {
        if let Some(first) = map.get(&e.cell) {
            if *first != e.value {
                return Err(pos.err(DefErrorKind::Validation(Error::invalid(vec![Violation::NotFunctional {
                    cell: e.cell,
                    first: first.clone(),
                    second: e.value,
                }]))));
            }
        }
        map.insert(e.cell, e.value);
    }
    Ok(map.into_iter().collect())
}

fn resolve_err(pos: Pos, e: ResolveError) -> DefError {
    match e {
        ResolveError::UnknownName(n) => pos.err(DefErrorKind::UnknownName(n)),
        ResolveError::Engine(e) => pos.err(DefErrorKind::Validation(e)),
    }
}

fn split_arrow(ty: TypeExpr, pos: Pos) -> PResult<(TypeExpr, TypeExpr)> {
    match ty {
        TypeExpr::Arrow(a, b) => Ok((*a, *b)),
        other => Err(pos.err(DefErrorKind::Syntax {
            expected: "a function type `M -> N`".into(),
            found: format!("`{other}`"),
        })),
    }
}

fn elaborate(ws: &mut Workspace, item: Item) -> PResult<Option<(Kind, String)>> {
    let Item { name, pos, body } = item;
    let invalid = |e: Error| pos.err(DefErrorKind::Validation(e));
    let budget = ws.budget;
    match body {
        Body::Cds(c) => {
            let explicit: BTreeSet<Cell> = c.enables.iter().map(|(c, _)| c.clone()).collect();
            let mut enabling = c.enables;
            enabling.extend(
                c.cells
                    .iter()
                    .filter(|cell| !explicit.contains(*cell))
                    .map(|cell| (cell.clone(), Precondition::Initial)),
            );
            let d = make_cds(name.clone(), c.cells, c.values, c.events, enabling).map_err(invalid)?;
            insert(ws, pos, Kind::Cds, name, Arc::new(d), |ws| &mut ws.cds)
        }
        Body::Alg(ty, lines) => {
            let (from_ty, to_ty) = split_arrow(ty, pos)?;
            let from = ws.resolve(&from_ty).map_err(|e| resolve_err(pos, e))?;
            let to = ws.resolve(&to_ty).map_err(|e| resolve_err(pos, e))?;
            let mut evs = Vec::new();
            for (input, out, mv) in lines {
                let x = functional(input, pos)?;
                evs.push(Event::new(Cell::fun(x, out), mv));
            }
            let alg = validate_algorithm(&from, &to, evs, budget).map_err(invalid)?;
            let decl = AlgDecl {
                from: from_ty,
                to: to_ty,
                alg,
            };
            insert(ws, pos, Kind::Alg, name, decl, |ws| &mut ws.algs)
        }
        Body::Table(ty, rows, default_empty) => {
            let (from_ty, to_ty) = split_arrow(ty, pos)?;
            let from = ws.resolve(&from_ty).map_err(|e| resolve_err(pos, e))?;
            let to = ws.resolve(&to_ty).map_err(|e| resolve_err(pos, e))?;
            let mut map = BTreeMap::new();
            for (x, y) in rows {
                let x = functional(x, pos)?;
                let y = functional(y, pos)?;
                if let Some(prev) = map.insert(x.clone(), y.clone()) {
                    if prev != y {
                        return Err(invalid(Error::invalid(vec![Violation::NotFunctional {
                            cell: Cell::name(&x.to_string()),
                            first: Value::name(&prev.to_string()),
                            second: Value::name(&y.to_string()),
                        }])));
                    }
                }
            }
            let table = if default_empty {
                FunTable::with_default_empty(from, to, map, budget)
            } else {
                FunTable::new(from, to, map, budget)
            }
            .map_err(invalid)?;
            let decl = TableDecl {
                from: from_ty,
                to: to_ty,
                table,
            };
            insert(ws, pos, Kind::Table, name, decl, |ws| &mut ws.tables)
        }
        Body::Behaviour(ty, tests) => {
            let (from_ty, to_ty) = split_arrow(ty, pos)?;
            let from = ws.resolve(&from_ty).map_err(|e| resolve_err(pos, e))?;
            let to = ws.resolve(&to_ty).map_err(|e| resolve_err(pos, e))?;
            let mut tasters = Vec::new();
            for (t, tpos) in &tests {
                let alg = ws.algs.get(t).ok_or_else(|| tpos.err(DefErrorKind::UnknownName(t.clone())))?;
                tasters.push(Taster::new(alg.alg.clone()).map_err(|e| tpos.err(DefErrorKind::Validation(e)))?);
            }
            let behaviour = Behaviour::new(from, to, tasters, budget).map_err(invalid)?;
            let decl = BehaviourDecl {
                from: from_ty,
                to: to_ty,
                tests: tests.into_iter().map(|(t, _)| t).collect(),
                behaviour,
            };
            insert(ws, pos, Kind::Behaviour, name, decl, |ws| &mut ws.behaviours)
        }
    }
}

fn insert<T: PartialEq>(
    ws: &mut Workspace,
    pos: Pos,
    kind: Kind,
    name: String,
    value: T,
    map: impl Fn(&mut Workspace) -> &mut indexmap::IndexMap<String, T>,
) -> PResult<Option<(Kind, String)>> {
    if let Some(existing) = map(ws).get(&name) {
        return if *existing == value {
            Ok(None)
        } else {
            Err(pos.err(DefErrorKind::DuplicateName { kind, name }))
        };
    }
    map(ws).insert(name.clone(), value);
    ws.order.push((kind, name.clone()));
    Ok(Some((kind, name)))
}

/// Parses `text` and adds its definitions to `ws`, which is left partially
/// updated on error (callers work on a copy).
pub(crate) fn parse_into(ws: &mut Workspace, text: &str) -> Result<Vec<(Kind, String)>, Vec<DefError>> {
    let mut p = Parser::new(text).map_err(|e| vec![e])?;
    let mut errors = Vec::new();
    let mut added = Vec::new();
    while !p.at_eof() {
        let start = p.pos;
        match p.item() {
            Ok(item) => match elaborate(ws, item) {
                Ok(Some(n)) => added.push(n),
                Ok(None) => {}
                Err(e) => errors.push(e),
            },
            Err(e) => {
                errors.push(e);
                p.recover(start);
            }
        }
    }
    if errors.is_empty() {
        Ok(added)
    } else {
        Err(errors)
    }
}

/// Parses a whole definition file into a fresh workspace.
pub fn parse_definitions(text: &str) -> Result<Workspace, Vec<DefError>> {
    let mut ws = Workspace::new();
    ws.load(text)?;
    Ok(ws)
}

fn parse_whole<T>(text: &str, f: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
    let mut p = Parser::new(text)?;
    let out = f(&mut p)?;
    p.finish()?;
    Ok(out)
}

pub fn parse_cell(text: &str) -> PResult<Cell> {
    parse_whole(text, Parser::cell)
}

pub fn parse_value(text: &str) -> PResult<Value> {
    parse_whole(text, Parser::value)
}

/// A literal `{c=v, ...}`; repeated cells are kept so validation can report them.
pub fn parse_events(text: &str) -> PResult<Vec<Event>> {
    parse_whole(text, |p| p.events().map(|(evs, _)| evs))
}

pub fn parse_type(text: &str) -> PResult<TypeExpr> {
    parse_whole(text, Parser::type_expr)
}

#[cfg(test)]
mod tests {
    use super::*;

    const B: &str = "cds B { cells out; values tt ff; events out:tt out:ff; }\n";
    const B2: &str = "cds B2 { cells a b; values tt ff; events a:tt a:ff b:tt b:ff; }\n";

    #[test]
    fn empty_file_is_empty_delta() {
        assert_eq!(parse_definitions("").unwrap(), Workspace::new());
        assert_eq!(parse_definitions("  # only a comment\n").unwrap(), Workspace::new());
    }

    #[test]
    fn algorithm_a_loads() {
        let text = format!(
            "{B}{B2}alg A : B2 -> B {{\n  at {{}} out ask b;\n  at {{b=tt}} out ask a;\n  at {{b=tt, a=tt}} out put tt;\n}}\n"
        );
        let ws = parse_definitions(&text).unwrap();
        assert_eq!(ws.alg("A").unwrap().alg, crate::fixtures::alg_a());
    }

    #[test]
    fn valof_on_filled_cell_is_rejected() {
        let text = format!("{B}{B2}alg bad : B2 -> B {{ at {{}} out ask b; at {{b=tt}} out ask b; }}");
        let errs = parse_definitions(&text).unwrap_err();
        assert_eq!(errs.len(), 1);
        let DefErrorKind::Validation(e) = &errs[0].kind else { panic!("{:?}", errs[0]) };
        assert!(matches!(e.violations(), [Violation::ValofFilledCell { .. }]));
        assert_eq!((errs[0].line, errs[0].col), (3, 5));
    }

    #[test]
    fn syntax_errors_are_positioned_and_recovered() {
        let errs = parse_definitions("cds X { cells a; values ; events a:tt }\ncds Y { cells = ; }\nalg").unwrap_err();
        assert_eq!(errs.len(), 3);
        assert_eq!((errs[0].line, errs[0].col), (1, 39));
        assert!(matches!(&errs[0].kind, DefErrorKind::Syntax { expected, .. } if expected == "a cell"));
        assert!(matches!(&errs[1].kind, DefErrorKind::Syntax { .. }));
        assert_eq!(errs[1].line, 2);
    }

    #[test]
    fn enable_lines_and_unknown_names() {
        let ws = parse_definitions(
            "cds chain { cells p q; values tt ff; events p:tt p:ff q:tt; enable q <- p:tt; }",
        )
        .unwrap();
        let d = ws.cds("chain").unwrap();
        assert!(d.is_initial(&Cell::name("p")));
        assert!(!d.is_initial(&Cell::name("q")));
        let errs = parse_definitions("alg f : Nope -> Nope { }").unwrap_err();
        assert_eq!(errs[0].kind, DefErrorKind::UnknownName("Nope".into()));
    }

    #[test]
    fn literals() {
        assert_eq!(parse_cell("<{<{}|-out>=valof 2.in}|-ans>").unwrap().to_string(), "<{<{}|-out>=valof 2.in}|-ans>");
        assert_eq!(parse_value("output output tt").unwrap().to_string(), "output output tt");
        assert_eq!(parse_events("{a=err, a=tt}").unwrap().len(), 2);
        assert_eq!(parse_type("(A * B -> C) -> O").unwrap().to_string(), "(A * B -> C) -> O");
        assert!(parse_cell("a b").is_err());
    }
}
