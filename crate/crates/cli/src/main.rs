use std::io::{self, BufRead, IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use cdslab_cli::commands as cmd;
use cdslab_cli::{server, CliError, CliResult, Repl};
use cdslab_core::fixtures;
use cdslab_core::syntax::Workspace;
use cdslab_core::Budget;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cdslab", version, about = "Concrete data structures and sequential algorithms")]
struct Cli {
    /// Definition file or directory to load (repeatable)
    #[arg(short = 'f', long = "file", global = true)]
    files: Vec<PathBuf>,
    /// Start from an empty workspace instead of the bundled examples
    #[arg(long, global = true)]
    no_prelude: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Interactive interpreter (the default)
    Repl { files: Vec<PathBuf> },
    /// Apply an algorithm to an argument and request one output cell
    Eval {
        #[arg(long)]
        alg: String,
        /// A state such as {a=tt,b=ff}, or the name of an algorithm
        #[arg(long)]
        arg: String,
        #[arg(long)]
        request: String,
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        verbose: bool,
    },
    /// Report whether a function table is monotone, stable and sequential
    Classify {
        #[arg(long)]
        table: String,
    },
    /// List every sequential algorithm between two structures
    Enum {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Run a taster against a candidate algorithm
    Ortho { taster: String, candidate: String },
    /// Test membership of an algorithm in a behaviour
    Member { behaviour: String, candidate: String },
    /// Test inclusion between two behaviours
    Subtype { sub: String, sup: String },
    /// Print every loaded definition
    Print,
    /// Serve the JSON session protocol over TCP
    Serve {
        #[arg(long, default_value = "127.0.0.1:7878")]
        listen: String,
    },
}

fn workspace(cli: &Cli, extra: &[PathBuf]) -> CliResult<Workspace> {
    let budget = Budget::from_env();
    let mut ws = if cli.no_prelude { Workspace::with_budget(budget) } else { fixtures::prelude(budget) };
    for path in cli.files.iter().chain(extra) {
        cmd::load_path(&mut ws, path)?;
    }
    Ok(ws)
}

fn repl(ws: Workspace) -> CliResult<()> {
    let mut repl = Repl::new(ws);
    let interactive = io::stdin().is_terminal();
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    loop {
        if interactive {
            print!("cds> ");
            io::stdout().flush().ok();
        }
        let Some(line) = lines.next() else { return Ok(()) };
        let line = line.map_err(|source| CliError::Io {
            path: "<stdin>".into(),
            source,
        })?;
        if matches!(line.trim(), "quit" | "exit") {
            return Ok(());
        }
        match repl.exec(&line) {
            Ok(out) => print!("{out}"),
            Err(e) => println!("error: {e}"),
        }
    }
}

fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        None => repl(workspace(cli, &[])?).map(|_| String::new()),
        Some(Command::Repl { files }) => repl(workspace(cli, files)?).map(|_| String::new()),
        Some(Command::Eval {
            alg,
            arg,
            request,
            trace,
            verbose,
        }) => {
            let ws = workspace(cli, &[])?;
            let f = cmd::alg(&ws, alg)?;
            let spec = cmd::parse_arg(&ws, f, arg)?;
            if matches!(spec, cmd::ArgSpec::Manual) {
                return Err(CliError::Usage("a manual argument needs the repl".into()));
            }
            cmd::eval(&ws, alg, &spec, request, *trace, *verbose)
        }
        Some(Command::Classify { table }) => {
            let ws = workspace(cli, &[])?;
            Ok(cmd::classification_text(table, &cmd::table_classification(&ws, table)?))
        }
        Some(Command::Enum { from, to }) => {
            let ws = workspace(cli, &[])?;
            let (m, n) = cmd::split_type(&format!("{from} -> {to}"))?;
            let algs = cmd::enumerate(&ws, &m, &n)?;
            Ok(cmd::enumeration_text(&m, &n, &algs))
        }
        Some(Command::Ortho { taster, candidate }) => {
            let ws = workspace(cli, &[])?;
            let (yes, t) = cmd::ortho(&ws, taster, candidate)?;
            Ok(format!("{}orthogonal: {}\n", t.to_text(false), cmd::yes(yes)))
        }
        Some(Command::Member { behaviour, candidate }) => {
            let ws = workspace(cli, &[])?;
            Ok(format!("member: {}\n", cmd::yes(cmd::member(&ws, behaviour, candidate)?)))
        }
        Some(Command::Subtype { sub, sup }) => {
            let ws = workspace(cli, &[])?;
            Ok(cmd::subtype_text(sub, sup, &cmd::subtype(&ws, sub, sup)?))
        }
        Some(Command::Print) => Ok(workspace(cli, &[])?.to_text()),
        Some(Command::Serve { listen }) => {
            let ws = workspace(cli, &[])?;
            server::serve(listen.as_str(), ws).map_err(|source| CliError::Io {
                path: listen.into(),
                source,
            })?;
            Ok(String::new())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
