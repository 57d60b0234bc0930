use std::process::{Command, Output};

fn modframe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_modframe"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn golay_pair_lines() {
    let out = modframe(&["golay", "--d", "2", "--emit", "both"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "1,1\n1,1\n1,-1\n-1,1\n");
    let a = modframe(&["golay", "--d", "3"]);
    assert_eq!(stdout(&a).lines().count(), 8);
}

#[test]
fn golay_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.txt");
    let out = modframe(&[
        "golay",
        "--d",
        "4",
        "--emit",
        "b",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 16);
    assert!(text.lines().all(|l| l == "1" || l == "-1"));
}

#[test]
fn coherence_csv_layout() {
    let out = modframe(&["coherence", "--d", "3,4", "--basis", "identity,fourier"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# {\"config\":"));
    assert!(lines[1].starts_with("experiment,"));
    assert_eq!(lines.len(), 2 + 4);
    let header: Vec<&str> = lines[1].split(',').collect();
    let mu = header.iter().position(|&h| h == "mu").unwrap();
    let first: Vec<&str> = lines[2].split(',').collect();
    assert_eq!(first[mu].parse::<f64>().unwrap(), 0.353553391);
}

#[test]
fn recover_to_file_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = |p: &str| {
        vec![
            "recover", "--n", "64", "--m", "32", "--s", "3", "--trials", "8", "--snr-db", "-5,inf",
            "--seed", "3", "--out", p,
        ]
        .into_iter()
        .map(String::from)
        .collect::<Vec<_>>()
    };
    let mut bytes = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let p = dir.path().join(name);
        let a = args(p.to_str().unwrap());
        let out = modframe(&a.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        bytes.push(std::fs::read(p).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    let text = String::from_utf8(bytes.remove(0)).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    let snr = lines[1].split(',').position(|h| h == "snr_db").unwrap();
    let values: Vec<f64> = lines[2..]
        .iter()
        .map(|l| l.split(',').nth(snr).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values, [-5.0, f64::INFINITY]);
}

#[test]
fn ric_method_flag() {
    let out = modframe(&[
        "ric", "--model", "rd", "--n", "16", "--m", "8", "--s", "2", "--trials", "2", "--method",
        "exact",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).lines().nth(2).unwrap().contains("exact"));
}

#[test]
fn config_errors_exit_2() {
    for args in [
        vec!["ofdm", "--n", "1000"],
        vec!["golay", "--d", "99"],
        vec!["recover", "--n", "64", "--d", "6"],
        vec!["recover", "--model", "nope"],
        vec!["phase-transition", "--n", "64", "--m", "16", "--s", "40"],
        vec!["no-such-command"],
        vec!["coherence", "--basis", "wavelet9"],
    ] {
        let out = modframe(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn help_lists_subcommands() {
    let out = modframe(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for sub in [
        "golay",
        "coherence",
        "ric",
        "recover",
        "phase-transition",
        "basis-compat",
        "ofdm",
    ] {
        assert!(text.contains(sub), "{sub}");
    }
}
