//! The line-oriented interpreter: pick an algorithm and an argument, then
//! ask for output cells one at a time.

use std::path::Path;

use cdslab_core::interaction::{Session, SessionStep};
use cdslab_core::syntax::{Kind, Workspace};

use crate::commands::{self as cmd, ArgSpec};
use crate::error::{CliError, CliResult};

pub const HELP: &str = "\
load FILE|DIR          add definitions
alg NAME arg ARG       select an algorithm; ARG is {c=v, ...}, manual, or an algorithm
request CELL           ask for an output cell
answer VALUE           answer the pending valof (manual argument)
trace [verbose]        show the last finished dialogue
table                  show the internal table
reset                  clear the internal table
verbose on|off         include TABLE lines in request output
classify TABLE         monotone, stable, sequential
enum M N               list the algorithms of M -> N
ortho TASTER ALG       run a taster against a candidate
member BEHAVIOUR ALG   membership in a behaviour
subtype B1 B2          inclusion of behaviours
names                  list loaded definitions
print                  print every definition
quit
";

struct Active {
    name: String,
    arg: ArgSpec,
    session: Session,
    /// Trace lines of the current dialogue already printed.
    shown: usize,
}

pub struct Repl {
    ws: Workspace,
    active: Option<Active>,
    verbose: bool,
}

fn split_word(s: &str) -> (&str, &str) {
    let s = s.trim();
    match s.find(char::is_whitespace) {
        Some(i) => (&s[..i], s[i..].trim()),
        None => (s, ""),
    }
}

fn two_names<'a>(rest: &'a str, usage: &str) -> CliResult<(&'a str, &'a str)> {
    match rest.split_whitespace().collect::<Vec<_>>()[..] {
        [a, b] => Ok((a, b)),
        _ => Err(CliError::Usage(format!("usage: {usage}"))),
    }
}

impl Repl {
    pub fn new(ws: Workspace) -> Self {
        Repl {
            ws,
            active: None,
            verbose: false,
        }
    }

    pub fn workspace(&self) -> &Workspace {
        &self.ws
    }

    /// Runs one command and returns what it prints.
    pub fn exec(&mut self, line: &str) -> CliResult<String> {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            return Ok(String::new());
        }
        let (command, rest) = split_word(line);
        match command {
            "help" => Ok(HELP.to_string()),
            "load" => self.load(rest),
            "alg" => self.select(rest),
            "request" => self.request(rest),
            "answer" => self.answer(rest),
            "trace" => self.trace(rest),
            "table" => self.table(),
            "reset" => {
                let a = self.active_mut()?;
                a.session.reset();
                a.shown = 0;
                Ok("table cleared\n".into())
            }
            "verbose" => {
                self.verbose = match rest {
                    "on" => true,
                    "off" => false,
                    _ => return Err(CliError::Usage("usage: verbose on|off".into())),
                };
                Ok(String::new())
            }
            "classify" => {
                let c = cmd::table_classification(&self.ws, rest)?;
                Ok(cmd::classification_text(rest, &c))
            }
            "enum" => {
                let (m, n) = cmd::split_type(rest)?;
                let algs = cmd::enumerate(&self.ws, &m, &n)?;
                Ok(cmd::enumeration_text(&m, &n, &algs))
            }
            "ortho" => {
                let (t, s) = two_names(rest, "ortho TASTER ALG")?;
                let (yes, trace) = cmd::ortho(&self.ws, t, s)?;
                Ok(format!("{}orthogonal: {}\n", trace.to_text(self.verbose), cmd::yes(yes)))
            }
            "member" => {
                let (b, s) = two_names(rest, "member BEHAVIOUR ALG")?;
                Ok(format!("member: {}\n", cmd::yes(cmd::member(&self.ws, b, s)?)))
            }
            "subtype" => {
                let (b1, b2) = two_names(rest, "subtype B1 B2")?;
                Ok(cmd::subtype_text(b1, b2, &cmd::subtype(&self.ws, b1, b2)?))
            }
            "names" => Ok(self.names()),
            "print" => Ok(self.ws.to_text()),
            _ => Err(CliError::Usage(format!("unknown command `{command}`, try `help`"))),
        }
    }

    fn load(&mut self, rest: &str) -> CliResult<String> {
        if rest.is_empty() {
            return Err(CliError::Usage("usage: load FILE|DIR".into()));
        }
        let added = cmd::load_path(&mut self.ws, Path::new(rest))?;
        if added.is_empty() {
            return Ok("nothing new\n".into());
        }
        let names: Vec<String> = added.iter().map(|(k, n)| format!("{} {n}", k.keyword())).collect();
        Ok(format!("loaded {}\n", names.join(", ")))
    }

    fn select(&mut self, rest: &str) -> CliResult<String> {
        let (name, rest) = split_word(rest);
        let (kw, arg) = split_word(rest);
        if name.is_empty() || kw != "arg" || arg.is_empty() {
            return Err(CliError::Usage("usage: alg NAME arg ARG".into()));
        }
        let (session, arg) = cmd::open(&self.ws, name, arg)?;
        let msg = format!("{name} applied to {}\n", arg.describe());
        self.active = Some(Active {
            name: name.to_string(),
            arg,
            session,
            shown: 0,
        });
        Ok(msg)
    }

    fn active_mut(&mut self) -> CliResult<&mut Active> {
        self.active
            .as_mut()
            .ok_or_else(|| CliError::Usage("no algorithm selected, use `alg NAME arg ARG`".into()))
    }

    fn request(&mut self, rest: &str) -> CliResult<String> {
        let c = cmd::cell(rest)?;
        let a = self.active_mut()?;
        let step = a.session.request(&c)?;
        a.shown = 0;
        Ok(self.report(step))
    }

    fn answer(&mut self, rest: &str) -> CliResult<String> {
        let ans = cmd::answer(rest)?;
        let a = self.active_mut()?;
        let step = a.session.answer(ans)?;
        Ok(self.report(step))
    }

    /// The dialogue lines not yet printed, then the result or the pending question.
    fn report(&mut self, step: SessionStep) -> String {
        let verbose = self.verbose;
        let a = self.active.as_mut().expect("report needs a session");
        let (lines, tail) = match &step {
            SessionStep::Finished(t) => {
                let lines: Vec<String> = t.to_text(verbose).lines().map(str::to_string).collect();
                (lines, cmd::summary(t))
            }
            SessionStep::Waiting { valof } => {
                let d = a.session.current().expect("waiting session has a dialogue");
                (d.lines(verbose), format!("waiting: valof {valof}"))
            }
        };
        let mut out = String::new();
        for l in lines.iter().skip(a.shown) {
            out.push_str(l);
            out.push('\n');
        }
        a.shown = match step {
            SessionStep::Finished(_) => 0,
            SessionStep::Waiting { .. } => lines.len(),
        };
        out.push_str(&tail);
        out.push('\n');
        out
    }

    fn trace(&mut self, rest: &str) -> CliResult<String> {
        let verbose = match rest {
            "" => false,
            "verbose" => true,
            _ => return Err(CliError::Usage("usage: trace [verbose]".into())),
        };
        let a = self.active_mut()?;
        match a.session.last_trace() {
            Some(t) => Ok(t.to_text(verbose)),
            None => Ok("no finished dialogue yet\n".into()),
        }
    }

    fn table(&mut self) -> CliResult<String> {
        let a = self.active_mut()?;
        let mut out = format!("{} on {}\n", a.name, a.arg.describe());
        for (c, v) in a.session.table_log() {
            out.push_str(&format!("  {c} = {v}\n"));
        }
        Ok(out)
    }

    fn names(&self) -> String {
        let mut out = String::new();
        for kind in [Kind::Cds, Kind::Alg, Kind::Table, Kind::Behaviour] {
            let names = self.ws.names(kind);
            if !names.is_empty() {
                out.push_str(&format!("{}: {}\n", kind.keyword(), names.join(" ")));
            }
        }
        out
    }
}
