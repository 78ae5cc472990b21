use std::io::Write;
use std::process::{Command, Output, Stdio};

fn cdslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdslab")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_prints_trace_and_result() {
    let o = cdslab(&["eval", "--alg", "A", "--arg", "{a=tt,b=tt}", "--request", "out", "--trace"]);
    assert_eq!(o.status.code(), Some(0));
    let golden = include_str!("../../core/tests/golden/A_tt_tt.trace");
    assert_eq!(stdout(&o), format!("{golden}out = tt\n"));
    let o = cdslab(&["eval", "--alg", "A", "--arg", "{a=tt,b=tt}", "--request", "out"]);
    assert_eq!(stdout(&o), "out = tt\n");
}

#[test]
fn exit_codes() {
    let cases: [(&[&str], i32); 7] = [
        (&["eval", "--alg", "A", "--arg", "{a=err}", "--request", "out"], 0),
        (&["eval", "--alg", "Nope", "--arg", "{}", "--request", "out"], 2),
        (&["eval", "--alg", "A", "--arg", "{a=tt}", "--request", "zz"], 2),
        (&["eval", "--alg", "A", "--arg", "{a=tt,a=ff}", "--request", "out"], 1),
        (&["classify", "--table", "nope"], 2),
        (&["--no-prelude", "classify", "--table", "por"], 2),
        (&["frobnicate"], 2),
    ];
    for (args, code) in cases {
        let o = cdslab(args);
        assert_eq!(o.status.code(), Some(code), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn batch_commands() {
    let o = cdslab(&["classify", "--table", "bk"]);
    let text = stdout(&o);
    assert!(text.contains("stable: yes") && text.contains("sequential: no"), "{text}");
    let o = cdslab(&["enum", "--from", "B", "--to", "B"]);
    assert!(stdout(&o).starts_with("12 algorithms B -> B\n"));
    assert_eq!(stdout(&cdslab(&["member", "Dated", "offer"])), "member: yes\n");
    assert!(stdout(&cdslab(&["ortho", "has_year", "bare"])).ends_with("orthogonal: no\n"));
    assert!(stdout(&cdslab(&["subtype", "Priced", "Dated"])).contains("semantic: yes"));
}

#[test]
fn definition_files_and_errors() {
    let dir = std::env::temp_dir().join(format!("cdslab-bin-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.cds");
    std::fs::write(&good, "cds Bool { cells out; values tt ff; events out:tt out:ff; }\n").unwrap();
    let bad = dir.join("bad.cds");
    std::fs::write(&bad, "cds Bad { cells a; values tt; events a:zz; }\n").unwrap();
    let o = cdslab(&["--no-prelude", "-f", good.to_str().unwrap(), "print"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("cds Bool"));
    let o = cdslab(&["-f", bad.to_str().unwrap(), "print"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("1:"));
    let o = cdslab(&["-f", dir.join("missing").to_str().unwrap(), "print"]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn repl_reads_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cdslab"))
        .arg("repl")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"alg A arg manual\nrequest out\nanswer tt\nanswer tt\nbogus\nquit\nrequest out\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "A applied to manual\nREQ out\nVALOF b\nwaiting: valof b\nANS tt\nVALOF a\nwaiting: valof a\n\
         ANS tt\nOUT tt\nRESULT value:tt\nout = tt\nerror: unknown command `bogus`, try `help`\n"
    );
}
