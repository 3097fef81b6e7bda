//! The command-line binary and the scenario layer behind it.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use nmbath::cli::{self, parse_scenario, serialize_scenario, RATES_HEADER, TRAJECTORY_HEADER};
use nmbath::spectra::SpectrumFamily;

fn nmbath(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nmbath")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// A markov1 scenario small enough for the test suite.
const SHORT_MARKOV1: &str = r#"
[system]
eps1 = 0.95
eps2 = 1.05

[spectrum]
family = "ohmic"
strength1 = 0.0005
strength2 = 0.0005
cutoff = 20.0
p = 1.0

[temperature]
profile = "two_step"
t1 = 1.0
t2 = 500.0

[generator]
mode = "markov1"

[integrator]
dt = 0.01
t_max = 20.0
record_every = 25
"#;

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn presets_round_trip_and_match_their_documents() {
    for (name, _) in cli::PRESETS {
        let scenario = cli::preset(name).unwrap();
        let text = serialize_scenario(&scenario);
        assert_eq!(parse_scenario(&text).unwrap(), scenario, "{name}");
        let dumped = nmbath(&["dump-preset", name]);
        assert!(dumped.status.success());
        assert_eq!(parse_scenario(&stdout(&dumped)).unwrap(), scenario, "{name}");
    }
    let s = cli::preset("fig5-thermal").unwrap();
    assert_eq!(s.spectrum.family, SpectrumFamily::Ohmic { lambda1: 0.01, lambda2: 0.01, cutoff: 20.0 });
}

#[test]
fn run_writes_all_outputs_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(dir.path(), "short.toml", SHORT_MARKOV1);
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let status = nmbath(&["run", "--config", &config, "--out", out.to_str().unwrap()]);
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    }
    for file in ["trajectory.csv", "rates.csv", "report.txt"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }

    let trajectory = fs::read_to_string(a.join("trajectory.csv")).unwrap();
    let mut lines = trajectory.lines();
    assert_eq!(lines.next(), Some(TRAJECTORY_HEADER));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    // t = 0 and every 25th of the 2000 steps.
    assert_eq!(rows.len(), 81);
    assert!(rows.iter().all(|r| r.len() == 12));
    for (got, want) in rows[0][..4].iter().zip([0.0, 0.0, 0.5, 0.5]) {
        assert!((got - want).abs() < 1e-15);
    }
    assert!((rows.last().unwrap()[0] - 20.0).abs() < 1e-12);

    let rates = fs::read_to_string(a.join("rates.csv")).unwrap();
    assert_eq!(rates.lines().next(), Some(RATES_HEADER));
    assert_eq!(rates.lines().count(), 82);
    let first: Vec<f64> = rates.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[..5], [0.0; 5]);

    let report = fs::read_to_string(a.join("report.txt")).unwrap();
    for key in [
        "[positivity]",
        "violation_measure =",
        "[markovianity]",
        "is_markovian =",
        "p_crit_plus =",
        "p_crit_unrooted =",
    ] {
        assert!(report.contains(key), "missing {key}");
    }
}

#[test]
fn rates_subcommand_works_for_constant_generators() {
    let dir = tempfile::tempdir().unwrap();
    let text = SHORT_MARKOV1.replace("markov1", "markov2");
    let config = write(dir.path(), "m2.toml", &text);
    let out = dir.path().join("rates");
    let status = nmbath(&["rates", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    assert!(out.join("rates.csv").exists());
    assert!(!out.join("trajectory.csv").exists());
}

#[test]
fn pc_prints_both_bounds() {
    let out = nmbath(&["pc", "--eps1", "0.95", "--eps2", "1.05", "--profile", "two_step:1,500,1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value = |key: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(key)).unwrap();
        line.split_whitespace().last().unwrap().parse().unwrap()
    };
    assert!((value("p_crit_plus") - 0.0727).abs() < 5e-5);
    assert!((value("unrooted") - 0.00529).abs() < 5e-6);
    assert!((value("p_crit ") - 0.0727).abs() < 5e-5);

    let degenerate = stdout(&nmbath(&["pc", "--eps1", "1", "--eps2", "1", "--profile", "constant:5"]));
    let line = degenerate.lines().find(|l| l.starts_with("p_crit ")).unwrap();
    assert_eq!(line.split_whitespace().last().unwrap().parse::<f64>().unwrap(), 1.0);
}

#[test]
fn exit_codes_follow_the_error_kind() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();

    let unknown_key = write(dir.path(), "bad.toml", &SHORT_MARKOV1.replace("p = 1.0", "p = 1.0\nq = 2.0"));
    assert_eq!(nmbath(&["run", "--config", &unknown_key, "--out", out]).status.code(), Some(2));
    assert_eq!(nmbath(&["run", "--preset", "fig9", "--out", out]).status.code(), Some(2));
    assert_eq!(nmbath(&["dump-preset", "fig9"]).status.code(), Some(2));
    assert_eq!(nmbath(&["pc", "--eps1", "1", "--eps2", "1", "--profile", "warm:3"]).status.code(), Some(2));

    let blowup = SHORT_MARKOV1
        .replace("markov1", "markov2")
        .replace("family = \"ohmic\"", "family = \"flat_band\"")
        .replace("strength1 = 0.0005", "strength1 = 1e300");
    let blowup = write(dir.path(), "blowup.toml", &blowup);
    let failed = nmbath(&["run", "--config", &blowup, "--out", out]);
    assert_eq!(failed.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&failed.stderr).contains("t ="));

    assert_eq!(nmbath(&["run", "--config", "/nonexistent/x.toml", "--out", out]).status.code(), Some(4));
    let file = write(dir.path(), "plain", "");
    let inside_file = format!("{file}/sub");
    let config = write(dir.path(), "ok.toml", SHORT_MARKOV1);
    assert_eq!(nmbath(&["run", "--config", &config, "--out", &inside_file]).status.code(), Some(4));
}

#[test]
fn batch_runs_each_entry_into_its_own_directory() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "short.toml", SHORT_MARKOV1);
    write(dir.path(), "broken.toml", "[system]\neps1 = 2.0\neps2 = 1.0\n");
    let list = write(dir.path(), "list.txt", "# one entry\nshort.toml\n");
    let out = dir.path().join("runs");
    let status = nmbath(&["batch", &list, "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    assert!(out.join("short").join("trajectory.csv").exists());

    let list = write(dir.path(), "list2.txt", "short.toml\nbroken.toml\n");
    let status = nmbath(&["batch", &list, "--out", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(2));
}
