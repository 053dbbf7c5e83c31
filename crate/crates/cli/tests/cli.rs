use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::path::Path;
use std::process::{Child, Command, Output, Stdio};

use serde_json::{json, Value};

use circle_gather::angles::Angle;
use circle_gather::oracle::taxonomy::taxonomy_classify;
use circle_gather::oracle::Class;
use circle_gather::configuration::Configuration;
use circle_gather::runconfig::RunConfig;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_circle-gather"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fair_random_run_gathers() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let o = run(&["run", "--positions", "0,1/5,1/2", "--adversary", "fair-random", "--seed", "7", "--trace-out", path(&trace)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("outcome: gathered at"));
    let text = fs::read_to_string(&trace).unwrap();
    let last: Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(last["annotations"]["gathered"], json!(true));
    assert!(text.lines().next().unwrap().contains("header"));
}

#[test]
fn rejections_use_the_input_code() {
    let o = run(&["run", "--positions", "0,1/4,1/2,3/4"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("rotation by 1/4"), "{}", stderr(&o));

    let o = run(&["run", "--positions", "0,1/5,1/2", "--delta", "0"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("delta must be positive"), "{}", stderr(&o));

    let o = run(&["run", "--positions", "0,1/5,1/2", "--adversary", "nobody"]);
    assert_eq!(o.status.code(), Some(4));

    let o = run(&["run", "--no-such-flag"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn malformed_run_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let rc = dir.path().join("rc.json");
    fs::write(
        &rc,
        r#"{"protocol": "gathering-fcom", "initial": {"robots": [{"pos": "0"}, {"pos": "1/5"}]},
            "adversary": {"name": "round-robin"}, "delta": "a fifth"}"#,
    )
    .unwrap();
    let o = run(&["run", path(&rc)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("`delta`"), "{}", stderr(&o));
}

#[test]
fn run_config_with_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("start.json"), r#"{"robots": [{"pos": "0"}, {"pos": "1/5"}, {"pos": "1/2"}]}"#)
        .unwrap();
    let rc = dir.path().join("rc.json");
    fs::write(
        &rc,
        r#"{"protocol": "gathering-fcom", "initial": "start.json", "adversary": {"name": "ssync"},
            "delta": "1/24", "seed": 3, "trace_out": "out.jsonl"}"#,
    )
    .unwrap();
    let o = run(&["run", path(&rc)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(dir.path().join("out.jsonl").exists());
}

#[test]
fn traces_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut traces = Vec::new();
    for k in 0..2 {
        let t = dir.path().join(format!("t{k}.jsonl"));
        let o = run(&[
            "run", "--positions", "0,1/7,2/5,3/5", "--adversary", "antipodal-hunter", "--seed", "11",
            "--delta", "1/36", "--trace-out", path(&t),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        traces.push(fs::read(&t).unwrap());
    }
    assert_eq!(traces[0], traces[1]);
}

#[test]
fn budget_and_quiescence_codes() {
    let o = run(&["run", "--positions", "0,1/5,1/2", "--budget", "3"]);
    assert_eq!(o.status.code(), Some(2), "{}", stdout(&o));
    assert!(stdout(&o).contains("budget_exhausted"));

    let o = run(&["run", "--protocol", "3to7-fsta", "--positions", "0,1/4", "--adversary", "round-robin"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("r0: 0/1, r1: 7/12"), "{}", stdout(&o));
}

#[test]
fn gen_instances_and_unsatisfiable_filters() {
    let o = run(&["gen", "--n", "4", "--den", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unsatisfiable"), "{}", stderr(&o));

    for (n, class) in [("3", Class::A), ("4", Class::BII)] {
        let o = run(&["gen", "--n", n, "--class", class.name(), "--count", "2"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
        assert_eq!(lines.len(), 2);
        for l in lines {
            let c = Configuration::from_json(&l).unwrap();
            assert_eq!(taxonomy_classify(&c.point_set().unwrap()), Ok(class));
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gen", "--n", "5", "--count", "3", "--out", path(dir.path())]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 3);

    assert_eq!(run(&["gen", "--n", "1"]).status.code(), Some(4));
}

#[test]
fn verify_passes_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = run(&["verify", "--propositions", "--exhaustive", "--n", "3", "--den", "12", "--report", path(&report)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let reports: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 12);

    let o = run(&["verify", "--separation"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("snapshots equal under all 36 light pairs: true"));
}

#[test]
fn broken_classifier_writes_replayable_counterexamples() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cx");
    let o = run(&[
        "verify", "--propositions", "--exhaustive", "--n", "3", "--den", "12", "--variant", "leading-angle-only",
        "--out", path(&out),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    let cx = out.join("leader_unique.json");
    let rc = RunConfig::load(&cx).unwrap();
    assert!(rc.initial_configuration(None).is_ok());
    assert!(out.join("leader_unique.witness.txt").exists());
    let o = run(&["run", path(&cx)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    assert_eq!(run(&["verify", "--variant", "bogus"]).status.code(), Some(4));
}

struct Server {
    child: Child,
    addr: String,
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

fn serve(args: &[&str]) -> Server {
    let mut child = bin()
        .arg("serve")
        .args(args)
        .args(["--bind", "127.0.0.1:0"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut line = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
    let addr = line.trim().strip_prefix("listening on ").expect("address line").to_string();
    Server { child, addr }
}

struct Client {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl Client {
    fn connect(addr: &str) -> Self {
        let s = TcpStream::connect(addr).unwrap();
        Client { reader: BufReader::new(s.try_clone().unwrap()), writer: s }
    }

    fn recv(&mut self) -> Value {
        let mut line = String::new();
        self.reader.read_line(&mut line).unwrap();
        serde_json::from_str(&line).unwrap()
    }

    fn recv_n(&mut self, n: usize) -> Vec<Value> {
        (0..n).map(|_| self.recv()).collect()
    }

    fn send(&mut self, msg: Value) {
        writeln!(self.writer, "{msg}").unwrap();
    }
}

fn kinds(msgs: &[Value]) -> Vec<&str> {
    msgs.iter().map(|m| m["type"].as_str().unwrap()).collect()
}

fn half(a: &str) -> String {
    let a: Angle = a.parse().unwrap();
    a.scaled(1, 2).unwrap().to_string()
}

#[test]
fn serve_session_replays_through_run() {
    let positions = "0,1/5,1/2";
    let server = serve(&["--positions", positions, "--delta", "1/24"]);
    let mut c = Client::connect(&server.addr);
    let hello = c.recv_n(2);
    assert_eq!(kinds(&hello), ["state", "legal"]);
    let robots = hello[0]["payload"]["robots"].as_array().unwrap();
    assert_eq!(robots.len(), 3);
    assert_eq!(robots[1]["pos"], json!("1/5"));
    assert_eq!(robots[1]["light"], json!("off"));
    assert_eq!(robots[1]["phase"], json!("idle"));
    let initial_hash = hello[0]["payload"]["hash"].clone();
    assert_eq!(hello[1]["payload"]["commands"].as_array().unwrap().len(), 3);

    c.send(json!({"type": "command", "payload": {"cmd": "activate", "robot": 0}}));
    let reply = c.recv_n(3);
    assert_eq!(kinds(&reply), ["event", "state", "legal"]);
    assert_eq!(reply[0]["payload"]["seq"], json!(1));
    let legal = reply[2]["payload"]["commands"].as_array().unwrap();
    let adv = legal.iter().find(|l| l["cmd"] == "advance").expect("r0 is moving");
    assert_eq!(adv["robot"], json!(0));
    assert!(adv["min_stop"].is_string());
    let after_activate = reply[1]["payload"]["hash"].clone();

    c.send(json!({"type": "command", "payload": {"cmd": "stop_move", "robot": 0}}));
    let err = c.recv();
    assert_eq!(err["type"], json!("error"));
    assert_eq!(err["payload"]["reason"], json!("delta_floor"));
    c.send(json!({"type": "state"}));
    let s = c.recv_n(2);
    assert_eq!(s[0]["payload"]["hash"], after_activate);

    c.send(json!({"type": "undo"}));
    let s = c.recv_n(2);
    assert_eq!(s[0]["payload"]["hash"], initial_hash);
    c.send(json!({"type": "undo"}));
    assert_eq!(c.recv()["payload"]["reason"], json!("nothing_to_undo"));
    c.send(json!({"type": "bogus"}));
    assert_eq!(c.recv()["payload"]["reason"], json!("unknown_type"));
    writeln!(c.writer, "not json").unwrap();
    assert_eq!(c.recv()["payload"]["reason"], json!("malformed"));

    // a deterministic walk over the legal lists
    let mut log: Vec<Value> = Vec::new();
    let mut legal = s[1]["payload"]["commands"].as_array().unwrap().clone();
    let mut hash = initial_hash.clone();
    let mut undone = false;
    for k in 0..200 {
        let pick = &legal[(k * 7 + 3) % legal.len()];
        let robot = pick["robot"].clone();
        let cmd = match pick["cmd"].as_str().unwrap() {
            "activate" => json!({"cmd": "activate", "robot": robot}),
            "advance" => json!({"cmd": "advance", "robot": robot, "amount": half(pick["max_amount"].as_str().unwrap())}),
            _ => json!({"cmd": "stop_move", "robot": robot}),
        };
        c.send(json!({"type": "command", "payload": cmd.clone()}));
        let reply = c.recv_n(3);
        assert_eq!(kinds(&reply), ["event", "state", "legal"], "{cmd}");
        log.push(cmd);
        if log.len() == 10 && !undone {
            // undo then redo the same command
            undone = true;
            c.send(json!({"type": "undo"}));
            let back = c.recv_n(2);
            assert_eq!(back[0]["payload"]["hash"], hash);
            c.send(json!({"type": "command", "payload": log.last().unwrap().clone()}));
            assert_eq!(c.recv_n(3)[1]["payload"]["hash"], reply[1]["payload"]["hash"]);
        }
        hash = reply[1]["payload"]["hash"].clone();
        legal = reply[2]["payload"]["commands"].as_array().unwrap().clone();
        if reply[1]["payload"]["gathered"] == json!(true) || (log.len() >= 40 && legal.is_empty()) || log.len() >= 60 {
            break;
        }
    }
    assert!(log.len() >= 30, "session too short: {}", log.len());

    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("script.json");
    fs::write(&script, json!({"name": "scripted", "commands": log}).to_string()).unwrap();
    let o = run(&["run", "--positions", positions, "--delta", "1/24", "--adversary", &format!("@{}", path(&script))]);
    assert!(matches!(o.status.code(), Some(0) | Some(5)), "{}", stderr(&o));
    let want = format!("final hash: {}", hash.as_str().unwrap());
    assert!(stdout(&o).contains(&want), "{}\nwanted {want}", stdout(&o));

    // a second connection starts fresh; reset returns to the start
    let mut c2 = Client::connect(&server.addr);
    assert_eq!(c2.recv_n(2)[0]["payload"]["hash"], initial_hash);
    c.send(json!({"type": "reset"}));
    let s = c.recv_n(2);
    assert_eq!(s[0]["payload"]["hash"], initial_hash);
    assert_eq!(s[0]["payload"]["undo_depth"], json!(0));
}
