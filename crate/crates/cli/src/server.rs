//! Newline-delimited JSON sessions over TCP.
//!
//! Each connection gets its own workspace and numbered sessions. Every reply
//! carries `ok`; failures add `error` (a category) and `detail`.

use std::collections::BTreeMap;
use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream, ToSocketAddrs};
use std::thread;

use cdslab_core::interaction::{Session, SessionStep};
use cdslab_core::syntax::{Kind, Workspace};
use cdslab_core::{Outcome, Trace};
use serde_json::{json, Map, Value};

use crate::commands as cmd;
use crate::error::CliError;

enum Failure {
    Parse(String),
    BadRequest(String),
    Cli(CliError),
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        Failure::Cli(e)
    }
}

impl From<cdslab_core::Error> for Failure {
    fn from(e: cdslab_core::Error) -> Self {
        Failure::Cli(e.into())
    }
}

type Reply = Result<Value, Failure>;

/// One client's workspace and sessions.
pub struct Connection {
    ws: Workspace,
    sessions: BTreeMap<u64, Session>,
    next_id: u64,
}

fn str_field<'a>(req: &'a Value, key: &str) -> Result<&'a str, Failure> {
    req.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| Failure::BadRequest(format!("missing string field `{key}`")))
}

fn lines(text: &str) -> Value {
    Value::Array(text.lines().map(|l| Value::String(l.to_string())).collect())
}

impl Connection {
    pub fn new(ws: Workspace) -> Self {
        Connection {
            ws,
            sessions: BTreeMap::new(),
            next_id: 1,
        }
    }

    /// Answers one protocol line with one reply line (without the newline).
    pub fn handle_line(&mut self, line: &str) -> String {
        let reply = match serde_json::from_str::<Value>(line) {
            Ok(req) if req.is_object() => self.handle(&req),
            Ok(_) => Err(Failure::Parse("a request must be a JSON object".into())),
            Err(e) => Err(Failure::Parse(e.to_string())),
        };
        let value = match reply {
            Ok(Value::Object(mut m)) => {
                m.insert("ok".into(), Value::Bool(true));
                Value::Object(m)
            }
            Ok(other) => json!({ "ok": true, "result": other }),
            Err(f) => {
                let (error, detail) = match f {
                    Failure::Parse(d) => ("parse", d),
                    Failure::BadRequest(d) => ("bad-request", d),
                    Failure::Cli(e) => (e.category(), e.to_string()),
                };
                json!({ "ok": false, "error": error, "detail": detail })
            }
        };
        value.to_string()
    }

    fn handle(&mut self, req: &Value) -> Reply {
        let op = str_field(req, "op")?;
        match op {
            "load" => {
                let added = self.ws.load(str_field(req, "text")?).map_err(|errs| {
                    let detail: Vec<String> = errs.iter().map(|e| e.to_string()).collect();
                    Failure::Cli(CliError::Invalid(detail.join("\n")))
                })?;
                let names: Vec<&str> = added.iter().map(|(_, n)| n.as_str()).collect();
                Ok(json!({ "names": names }))
            }
            "names" => {
                let mut m = Map::new();
                for kind in [Kind::Cds, Kind::Alg, Kind::Table, Kind::Behaviour] {
                    m.insert(kind.keyword().into(), json!(self.ws.names(kind)));
                }
                Ok(Value::Object(m))
            }
            "open" => {
                let (session, arg) = cmd::open(&self.ws, str_field(req, "alg")?, str_field(req, "arg")?)?;
                let id = self.next_id;
                self.next_id += 1;
                let manual = session.is_manual();
                self.sessions.insert(id, session);
                Ok(json!({ "session": id, "arg": arg.describe(), "manual": manual }))
            }
            "request" => {
                let c = cmd::cell(str_field(req, "cell")?)?;
                let verbose = req.get("verbose").and_then(Value::as_bool).unwrap_or(false);
                let s = self.session(req)?;
                let step = s.request(&c)?;
                Ok(step_reply(s, step, verbose))
            }
            "answer" => {
                let a = cmd::answer(str_field(req, "value")?)?;
                let verbose = req.get("verbose").and_then(Value::as_bool).unwrap_or(false);
                let s = self.session(req)?;
                let step = s.answer(a)?;
                Ok(step_reply(s, step, verbose))
            }
            "trace" => {
                let verbose = req.get("verbose").and_then(Value::as_bool).unwrap_or(false);
                let s = self.session(req)?;
                match s.last_trace() {
                    Some(t) => Ok(json!({ "trace": lines(&t.to_text(verbose)) })),
                    None => Ok(json!({ "trace": [] })),
                }
            }
            "reset" => {
                self.session(req)?.reset();
                Ok(json!({}))
            }
            "close" => {
                let id = session_id(req)?;
                self.sessions
                    .remove(&id)
                    .ok_or_else(|| Failure::Cli(CliError::unknown("session", &id.to_string())))?;
                Ok(json!({}))
            }
            "classify" => {
                let name = str_field(req, "table")?;
                let c = cmd::table_classification(&self.ws, name)?;
                let mut m = Map::new();
                m.insert("monotone".into(), json!(c.monotone.holds()));
                m.insert("stable".into(), json!(c.is_stable()));
                m.insert("sequential".into(), json!(c.is_sequential()));
                let realizers: Vec<String> = c.realizers.iter().map(|f| f.state().to_string()).collect();
                m.insert("realizers".into(), json!(realizers));
                if let Some(w) = c.stable.as_ref().and_then(|r| r.verdict.witness()) {
                    m.insert(
                        "witness".into(),
                        json!({
                            "x": w.x.to_string(),
                            "y": w.y.to_string(),
                            "image_of_meet": w.image_of_meet.to_string(),
                            "meet_of_images": w.meet_of_images.to_string(),
                        }),
                    );
                }
                Ok(Value::Object(m))
            }
            "enum" => {
                let ty = |k| {
                    cdslab_core::syntax::parse_type(str_field(req, k)?)
                        .map_err(|e| Failure::Cli(CliError::Usage(format!("type {e}"))))
                };
                let algs = cmd::enumerate(&self.ws, &ty("from")?, &ty("to")?)?;
                let states: Vec<String> = algs.iter().map(|f| f.state().to_string()).collect();
                Ok(json!({ "count": algs.len(), "algorithms": states }))
            }
            "ortho" => {
                let (yes, t) = cmd::ortho(&self.ws, str_field(req, "taster")?, str_field(req, "candidate")?)?;
                Ok(json!({ "orthogonal": yes, "trace": lines(&t.to_text(false)) }))
            }
            "member" => {
                let yes = cmd::member(&self.ws, str_field(req, "behaviour")?, str_field(req, "candidate")?)?;
                Ok(json!({ "member": yes }))
            }
            "subtype" => {
                let v = cmd::subtype(&self.ws, str_field(req, "sub")?, str_field(req, "sup")?)?;
                Ok(json!({ "syntactic": v.syntactic, "semantic": v.semantic }))
            }
            other => Err(Failure::BadRequest(format!("unknown op `{other}`"))),
        }
    }

    fn session(&mut self, req: &Value) -> Result<&mut Session, Failure> {
        let id = session_id(req)?;
        self.sessions
            .get_mut(&id)
            .ok_or_else(|| Failure::Cli(CliError::unknown("session", &id.to_string())))
    }
}

fn session_id(req: &Value) -> Result<u64, Failure> {
    req.get("session")
        .and_then(Value::as_u64)
        .ok_or_else(|| Failure::BadRequest("missing integer field `session`".into()))
}

fn table_json(s: &Session) -> Value {
    Value::Array(
        s.table_log()
            .iter()
            .map(|(c, v)| json!({ "cell": c.to_string(), "value": v.to_string() }))
            .collect(),
    )
}

fn finished(t: &Trace, verbose: bool) -> Map<String, Value> {
    let mut m = Map::new();
    let outcome = match &t.outcome {
        Outcome::Value(v) => {
            m.insert("value".into(), json!(v.to_string()));
            "value"
        }
        Outcome::Err => "err",
        Outcome::Stuck => "stuck",
    };
    m.insert("outcome".into(), json!(outcome));
    if let Some(c) = t.dangling_valof() {
        m.insert("pending".into(), json!({ "valof": c.to_string() }));
    }
    m.insert("trace".into(), lines(&t.to_text(verbose)));
    m
}

fn step_reply(s: &Session, step: SessionStep, verbose: bool) -> Value {
    let mut m = match step {
        SessionStep::Finished(t) => finished(&t, verbose),
        SessionStep::Waiting { valof } => {
            let d = s.current().expect("waiting session has a dialogue");
            let mut m = Map::new();
            m.insert("outcome".into(), json!("pending"));
            m.insert("pending".into(), json!({ "valof": valof.to_string() }));
            m.insert("trace".into(), json!(d.lines(verbose)));
            m
        }
    };
    m.insert("table".into(), table_json(s));
    Value::Object(m)
}

fn serve_connection(stream: TcpStream, ws: Workspace) -> io::Result<()> {
    let mut conn = Connection::new(ws);
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = stream;
    let mut buf = Vec::new();
    loop {
        buf.clear();
        if reader.read_until(b'\n', &mut buf)? == 0 {
            return Ok(());
        }
        let reply = match std::str::from_utf8(&buf) {
            Ok(line) if line.trim().is_empty() => continue,
            Ok(line) => conn.handle_line(line.trim_end()),
            Err(e) => json!({ "ok": false, "error": "parse", "detail": e.to_string() }).to_string(),
        };
        writer.write_all(reply.as_bytes())?;
        writer.write_all(b"\n")?;
        writer.flush()?;
    }
}

/// Accepts connections forever, one thread each, every one starting from `ws`.
pub fn serve_on(listener: TcpListener, ws: Workspace) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let ws = ws.clone();
        thread::spawn(move || {
            let peer = stream.peer_addr().ok();
            if let Err(e) = serve_connection(stream, ws) {
                eprintln!("connection {peer:?}: {e}");
            }
        });
    }
    Ok(())
}

pub fn serve(addr: impl ToSocketAddrs, ws: Workspace) -> io::Result<()> {
    let listener = TcpListener::bind(addr)?;
    eprintln!("listening on {}", listener.local_addr()?);
    serve_on(listener, ws)
}
