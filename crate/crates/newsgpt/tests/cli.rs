use std::path::Path;
use std::process::{Command, Output};

use newsgpt::session_log::{Direction, LogEntry, SessionLog};
use newsgpt_core::gateway::WireMessage;

fn newsgpt(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_newsgpt"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .unwrap();
    out
}

fn ok(args: &[&str]) -> String {
    let out = newsgpt(args);
    assert!(
        out.status.success(),
        "{args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn toy_csv(path: &Path) {
    let mut s = String::from("title,label\n");
    for i in 0..30 {
        s += &format!("SHOCKING!!! THEY HID {i} SECRETS FROM YOU,fake\n");
        s += &format!("council approves budget for district {i},real\n");
    }
    std::fs::write(path, s).unwrap();
}

#[test]
fn train_predict_eval_and_bit_exact_params() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("titles.csv");
    toy_csv(&data);
    let a = dir.path().join("a.bin");
    let b = dir.path().join("b.bin");
    let a_s = a.to_str().unwrap();
    let common = ["--data", data.to_str().unwrap(), "--seed", "3", "--epochs", "2", "--batch-size", "8"];

    let out = ok(&[&["train", "--out", a_s][..], &common[..]].concat());
    assert!(out.contains("train 48 / validation 12"), "{out}");
    assert!(out.contains("accuracy"));
    ok(&[&["train", "--out", b.to_str().unwrap()][..], &common[..]].concat());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let pred = ok(&["predict", "--params", a_s, "--title", "council approves new park"]);
    let (label, p) = pred.trim().split_once(' ').unwrap();
    let p: f64 = p.parse().unwrap();
    assert!((0.0..=1.0).contains(&p));
    assert_eq!(label, if p >= 0.5 { "real" } else { "fake" });

    let eval = ok(&["eval", "--data", data.to_str().unwrap(), "--params", a_s]);
    assert!(eval.starts_with("60 titles"), "{eval}");
    let eval = ok(&[
        "eval", "--data", data.to_str().unwrap(), "--params", a_s, "--validation-split", "0.8", "--seed", "3",
    ]);
    assert!(eval.starts_with("12 titles"), "{eval}");
}

#[test]
fn bad_inputs_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.bin");
    std::fs::write(&junk, b"nope").unwrap();
    let out = newsgpt(&["predict", "--params", junk.to_str().unwrap(), "--title", "x"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad magic"));

    let out = newsgpt(&["serve", "--llm", "local"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("scripted:<fixture>"));
}

#[test]
fn report_is_regenerated_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let logs = dir.path().join("sessions");
    let mut log = SessionLog::create(&logs, "s1").unwrap();
    for (t, dir_, msg) in [
        (1, Direction::In, WireMessage::TextUtterance { text: "What is the capital of France?".into() }),
        (2, Direction::Out, WireMessage::Answer { text: "The capital of France is Paris".into(), latency_ms: 2900.0 }),
        (3, Direction::Out, WireMessage::Transcript { text: "What's the news in the USA?".into() }),
        (4, Direction::Out, WireMessage::Answer { text: "Headlines follow.".into(), latency_ms: 7000.0 }),
    ] {
        log.append(&LogEntry::message(t, dir_, &msg)).unwrap();
    }
    let ratings = dir.path().join("ratings.csv");
    std::fs::write(
        &ratings,
        "criterion,value\nrelevance,3\ncontext,-2\nbias,2\nengaging,3\nfluency,1\n\
         error_resilience,3\ndomain_orientation,2\nsatisfaction,2\ncreativity,2\n",
    )
    .unwrap();
    let sd = dir.path().join("sd.csv");
    std::fs::write(&sd, "respondent,item,rating\np1,q3,3\np2,q3,-1\np1,q5,0\n").unwrap();
    let accuracy = dir.path().join("accuracy.csv");
    std::fs::write(&accuracy, "index,accuracy,note\n1,+1,\n2,0,vague\n").unwrap();

    let run = |out: &Path| {
        ok(&[
            "report",
            "--session", logs.to_str().unwrap(),
            "--ratings", ratings.to_str().unwrap(),
            "--sd", sd.to_str().unwrap(),
            "--accuracy", accuracy.to_str().unwrap(),
            "--out", out.to_str().unwrap(),
        ])
    };
    let (x, y) = (dir.path().join("x"), dir.path().join("y"));
    run(&x);
    run(&y);
    for name in ["records.csv", "criteria.csv", "sd.csv", "summary.txt"] {
        assert_eq!(std::fs::read(x.join(name)).unwrap(), std::fs::read(y.join(name)).unwrap(), "{name}");
    }
    let records = std::fs::read_to_string(x.join("records.csv")).unwrap();
    assert_eq!(
        records,
        "index,question,answer,response_speed_s,speed_class,accuracy,note\n\
         1,What is the capital of France?,The capital of France is Paris,2.90,good,+1,\n\
         2,What's the news in the USA?,Headlines follow.,7.00,poor,0,vague\n"
    );
    let sd_out = std::fs::read_to_string(x.join("sd.csv")).unwrap();
    assert_eq!(sd_out, "item,count,mean\nq3,2,1.00\nq5,1,0.00\n");
    let criteria = std::fs::read_to_string(x.join("criteria.csv")).unwrap();
    assert!(criteria.contains("context,1,-2.00\n"));
    assert!(criteria.contains("response_time,0,\n"));
}
