//! Criterion 12: two runs of the full acceptance table are byte-identical.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_widthlab"))
        .args(args)
        .env("WIDTHLAB_LOG", "error")
        .output()
        .expect("spawn widthlab")
}

fn acceptance_table() -> Vec<Vec<&'static str>> {
    vec![
        vec!["grid-count", "--shape", "pball", "--p", "2", "--r", "5.5", "--d", "3"],
        vec!["grid-count", "--shape", "pball", "--p", "inf", "--r", "4", "--d", "6"],
        vec!["grid-count", "--shape", "hyperbolic", "--r", "64", "--d", "4"],
        vec!["approx", "--spec", r#"{"kind":"Isotropic","d":2,"s":1,"p":1}"#, "--n", "6"],
        vec![
            "approx",
            "--spec",
            r#"{"kind":"Gevrey","d":2,"alpha":0.5,"beta":1,"p":1}"#,
            "--n-range",
            "1:2000:199",
        ],
        vec![
            "approx",
            "--spec",
            r#"{"kind":"Mixed","d":3,"s":2,"p":1}"#,
            "--n-range",
            "1:50:7",
            "--output",
            "csv",
        ],
        vec![
            "approx",
            "--spec",
            r#"{"kind":"Isotropic","d":1,"s":2,"p":2}"#,
            "--n",
            "3",
            "--target",
            "linf",
            "--tolerance",
            "1e-8",
        ],
        vec!["entropy", "--n", "1000000", "--d", "2", "--p", "1"],
        vec!["entropy", "--n", "4096", "--d", "4", "--p", "inf"],
        vec![
            "bounds",
            "--spec",
            r#"{"kind":"Isotropic","d":3,"s":2,"p":2}"#,
            "--n",
            "100",
            "--theorem",
            "regime",
        ],
        vec![
            "bounds",
            "--spec",
            r#"{"kind":"Gevrey","d":2,"alpha":1,"beta":1,"p":2}"#,
            "--n",
            "64",
        ],
        vec!["gevrey-compare", "--s", "1", "--d", "4", "--n-max", "40", "--output", "csv"],
        vec!["tract", "--problem", "iso", "--params", "s=1,p=inf"],
        vec!["tract", "--problem", "iso", "--params", "s=3,p=2"],
        vec!["tract", "--problem", "gevrey", "--params", "alpha=2,beta=1,p=2"],
        vec![
            "info-complexity",
            "--spec",
            r#"{"kind":"Isotropic","d":2,"s":1,"p":1}"#,
            "--eps",
            "0.4",
        ],
        vec![
            "info-complexity",
            "--spec",
            r#"{"kind":"Isotropic","d":10,"s":2,"p":1}"#,
            "--eps",
            "0.25",
            "--lemma",
        ],
        vec![
            "limits",
            "--spec",
            r#"{"kind":"Isotropic","d":2,"s":1,"p":2}"#,
            "--n-max",
            "100000",
        ],
    ]
}

#[test]
fn criterion_12_determinism() {
    let mut transcripts = Vec::new();
    for _ in 0..2 {
        let mut all = Vec::new();
        for args in acceptance_table() {
            let out = run(&args);
            assert!(out.status.success(), "failed: {args:?}: {}", String::from_utf8_lossy(&out.stderr));
            all.extend_from_slice(&out.stdout);
        }
        transcripts.push(all);
    }
    let identical = transcripts[0] == transcripts[1];
    println!(
        "criterion 12 [CLI determinism]: {} ({} bytes per run)",
        if identical { "PASS" } else { "FAIL" },
        transcripts[0].len()
    );
    assert!(identical, "criterion 12 [CLI determinism] failed");
}

#[test]
fn paper_examples_and_exit_codes() {
    let out = run(&["approx", "--spec", r#"{"kind":"Isotropic","d":2,"s":1,"p":1}"#, "--n", "6"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("3.3333333333333331e-1"), "{text}");

    let out = run(&["grid-count", "--shape", "hyperbolic", "--r", "4", "--d", "2"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"count\":\"17\""));

    let out = run(&["tract", "--problem", "iso", "--params", "s=1,p=inf"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"class\":\"curse\""));

    // precondition failures exit 2
    let out = run(&["approx", "--spec", r#"{"kind":"Isotropic","d":2,"s":1,"p":1}"#]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["entropy", "--n", "0", "--d", "2", "--p", "1"]);
    assert_eq!(out.status.code(), Some(2));

    // counting ceiling exits 3
    let out = run(&[
        "grid-count", "--shape", "pball", "--p", "inf", "--r", "2.0", "--d", "100",
        "--count-ceiling-log2", "20",
    ]);
    assert_eq!(out.status.code(), Some(3));

    // emitted specs re-parse to an equivalent spec
    let out = run(&["approx", "--spec", r#"{"kind":"Gevrey","d":3,"alpha":0.5,"beta":2,"p":1}"#, "--n", "9"]);
    let line = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    let echoed = v["spec"].as_str().unwrap();
    let reparsed = run(&["approx", "--spec", echoed, "--n", "9"]);
    let line2 = String::from_utf8(reparsed.stdout).unwrap();
    let v2: serde_json::Value = serde_json::from_str(line2.trim()).unwrap();
    assert_eq!(v["value"], v2["value"]);
}
