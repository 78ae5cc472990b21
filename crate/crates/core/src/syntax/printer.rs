use std::fmt::Write;

use crate::cds::{Cds, Precondition, Value};

use super::workspace::{Kind, TypeExpr, Workspace};

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn print_cds(name: &str, d: &Cds) -> String {
    let mut s = format!("cds {name} {{\n");
    writeln!(s, "  cells {};", join(d.cells())).unwrap();
    writeln!(s, "  values {};", join(d.values())).unwrap();
    let events = join(d.events().map(|e| format!("{}:{}", e.cell, e.value)));
    writeln!(s, "  events {events};").unwrap();
    for c in d.cells() {
        let pres: Vec<&Precondition> = d.preconditions(c).collect();
        if matches!(pres.as_slice(), [Precondition::Initial]) {
            continue;
        }
        for p in pres {
            match p {
                Precondition::Initial => writeln!(s, "  enable {c} <- initial;").unwrap(),
                Precondition::Event(e) => writeln!(s, "  enable {c} <- {}:{};", e.cell, e.value).unwrap(),
            }
        }
    }
    s.push_str("}\n");
    s
}

fn signature(from: &TypeExpr, to: &TypeExpr) -> TypeExpr {
    TypeExpr::arrow(from.clone(), to.clone())
}

/// Prints every definition in declaration order, in the form `load` accepts.
pub fn print_workspace(ws: &Workspace) -> String {
    let mut out = String::new();
    for (i, (kind, name)) in ws.order().iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match kind {
            Kind::Cds => out.push_str(&print_cds(name, &ws.cds[name])),
            Kind::Alg => {
                let decl = &ws.algs[name];
                writeln!(out, "alg {name} : {} {{", signature(&decl.from, &decl.to)).unwrap();
                for (x, c, v) in decl.alg.moves() {
                    match v {
                        Value::Valof(a) => writeln!(out, "  at {x} {c} ask {a};").unwrap(),
                        Value::Output(w) => writeln!(out, "  at {x} {c} put {w};").unwrap(),
                        Value::Name(_) => unreachable!("algorithm moves are valof or output"),
                    }
                }
                out.push_str("}\n");
            }
            Kind::Table => {
                let decl = &ws.tables[name];
                writeln!(out, "table {name} : {} {{", signature(&decl.from, &decl.to)).unwrap();
                for (x, y) in decl.table.rows() {
                    writeln!(out, "  {x} => {y};").unwrap();
                }
                out.push_str("}\n");
            }
            Kind::Behaviour => {
                let decl = &ws.behaviours[name];
                write!(out, "behaviour {name} : {} {{", signature(&decl.from, &decl.to)).unwrap();
                if decl.tests.is_empty() {
                    out.push_str(" }\n");
                } else {
                    writeln!(out, "\n  tests {};\n}}", join(&decl.tests)).unwrap();
                }
            }
        }
    }
    out
}
