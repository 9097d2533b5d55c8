mod common;

use std::path::Path;
use std::process::{Command, Output};

use coinmirror::config::CONFIG_KEYS;
use coinmirror::report::read_team_metrics_csv;

use common::{data_dir, fixture_dir, fixture_truth, sha256_of_dir_files};

fn coinmirror(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coinmirror"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn fixture_config() -> String {
    fixture_dir().join("config.toml").display().to_string()
}

fn analyze_into(out: &Path) -> Output {
    coinmirror(&[
        "analyze",
        "--config",
        &fixture_config(),
        "--output-dir",
        &out.display().to_string(),
    ])
}

const REPORT_FILES: [&str; 13] = [
    "team_metrics.csv",
    "correlations.csv",
    "correlations.txt",
    "manifest.json",
    "leaders.csv",
    "contribution.csv",
    "surfaces/team_1.csv",
    "surfaces/team_10.csv",
    "charts/volume.svg",
    "charts/leadership.svg",
    "charts/sentiment.svg",
    "surfaces/team_5.csv",
    "surfaces/team_7.csv",
];

#[test]
fn analyze_fixture_writes_every_report() {
    let out = tempfile::tempdir().unwrap();
    let run = analyze_into(out.path());
    assert!(run.status.success(), "{}", text(&run.stderr));
    assert_eq!(run.status.code(), Some(0));
    for f in REPORT_FILES {
        assert!(out.path().join(f).is_file(), "missing {f}");
    }
}

#[test]
fn analyze_twice_gives_identical_hashes() {
    let out = tempfile::tempdir().unwrap();
    assert!(analyze_into(out.path()).status.success());
    let first = sha256_of_dir_files(out.path(), &REPORT_FILES);
    assert!(analyze_into(out.path()).status.success());
    assert_eq!(first, sha256_of_dir_files(out.path(), &REPORT_FILES));
}

#[test]
fn fixture_metrics_match_truth() {
    let out = tempfile::tempdir().unwrap();
    assert!(analyze_into(out.path()).status.success());
    let rows = read_team_metrics_csv(std::fs::File::open(out.path().join("team_metrics.csv")).unwrap()).unwrap();
    let truth = fixture_truth();
    assert_eq!(rows.len(), truth.teams.len());
    for t in &truth.teams {
        let row = rows.iter().find(|r| r.team.as_str() == t.team).unwrap();
        assert_eq!(row.creativity, t.creativity);
        assert_eq!(row.bc_oscillations, t.handovers as u64, "team {}", t.team);
        assert!(
            (row.art_norm_min.unwrap() - t.mean_latency_minutes).abs() < 0.5,
            "team {}",
            t.team
        );
        assert!((row.pos_sent.unwrap() - t.pos_sent).abs() < 0.05, "team {}", t.team);
        assert!((row.awvci.unwrap() - t.awvci).abs() < 1e-6, "team {}", t.team);
        assert!((row.group_dc - t.group_dc).abs() < 1e-6, "team {}", t.team);
        assert_eq!(row.msg_recvd, t.msg_recvd, "team {}", t.team);
        assert_eq!(row.num_actors, t.num_actors, "team {}", t.team);
    }
}

#[test]
fn missing_roster_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    let mbox = fixture_dir().join("course.mbox");
    std::fs::write(
        &config,
        format!(
            "messages = {:?}\nrosters = \"no_such_rosters.csv\"\n",
            mbox.display().to_string()
        ),
    )
    .unwrap();
    let run = coinmirror(&["analyze", "--config", &config.display().to_string()]);
    assert_eq!(run.status.code(), Some(2));
    let err = text(&run.stderr);
    assert!(
        err.contains(&dir.path().join("no_such_rosters.csv").display().to_string()),
        "{err}"
    );
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(
        &config,
        "messages = \"a.mbox\"\nrosters = \"r.csv\"\nlookbak_days = 3\n",
    )
    .unwrap();
    let run = coinmirror(&["analyze", "--config", &config.display().to_string()]);
    assert_eq!(run.status.code(), Some(2));
    assert!(text(&run.stderr).contains("lookbak_days"));
}

#[test]
fn help_documents_every_config_key() {
    let run = coinmirror(&["analyze", "--help"]);
    assert!(run.status.success());
    let help = text(&run.stdout);
    for (key, _) in CONFIG_KEYS {
        assert!(help.contains(key), "--help lacks {key}");
    }
    assert!(help.contains("COINMIRROR_LOG"));
    let top = text(&coinmirror(&["--help"]).stdout);
    for sub in ["analyze", "correlate", "export-graphs", "surface", "generate"] {
        assert!(top.contains(sub));
    }
}

fn reference_path() -> String {
    data_dir().join("reference_metrics.csv").display().to_string()
}

#[test]
fn correlate_reference_table() {
    let out = tempfile::tempdir().unwrap();
    let run = coinmirror(&[
        "correlate",
        &reference_path(),
        "--out",
        &out.path().display().to_string(),
    ]);
    assert!(run.status.success(), "{}", text(&run.stderr));
    let table = std::fs::read_to_string(out.path().join("correlations.txt")).unwrap();
    let line = table.lines().find(|l| l.starts_with("creativity")).unwrap();
    assert!(line.contains("-.830**"), "{line}");
    assert!(out.path().join("correlations.csv").is_file());
}

#[test]
fn correlate_needs_two_columns() {
    let run = coinmirror(&["correlate", &reference_path(), "--columns", "creativity"]);
    assert_eq!(run.status.code(), Some(2));
    assert!(text(&run.stderr).contains("need ≥ 2 columns"), "{}", text(&run.stderr));
    let run = coinmirror(&["correlate", &reference_path(), "--columns", "creativity,shoe_size"]);
    assert_eq!(run.status.code(), Some(2));
    assert!(text(&run.stderr).contains("shoe_size"));
}

#[test]
fn correlate_ignores_row_order() {
    let original = std::fs::read_to_string(data_dir().join("reference_metrics.csv")).unwrap();
    let (comments_header, rows): (Vec<&str>, Vec<&str>) = original
        .lines()
        .partition(|l| l.starts_with('#') || l.starts_with("team"));
    let mut shuffled = rows.clone();
    shuffled.reverse();
    shuffled.swap(0, 4);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("shuffled.csv");
    std::fs::write(&path, [comments_header, shuffled].concat().join("\n") + "\n").unwrap();
    let a = coinmirror(&["correlate", &reference_path()]);
    let b = coinmirror(&["correlate", &path.display().to_string()]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn export_graphs_and_surface() {
    let out = tempfile::tempdir().unwrap();
    let o = out.path().display().to_string();
    let run = coinmirror(&["export-graphs", "--config", &fixture_config(), "--out", &o]);
    assert!(run.status.success(), "{}", text(&run.stderr));
    for f in ["course.csv", "course.dot", "team_1.csv", "team_1.dot"] {
        assert!(out.path().join(f).is_file(), "missing {f}");
    }

    let surface = out.path().join("t3.csv");
    let run = coinmirror(&[
        "surface",
        "--config",
        &fixture_config(),
        "--team",
        "3",
        "--out",
        &surface.display().to_string(),
    ]);
    assert!(run.status.success(), "{}", text(&run.stderr));
    let csv = std::fs::read_to_string(surface).unwrap();
    assert!(csv.starts_with("actor,day_0,day_1,"));

    let run = coinmirror(&["surface", "--config", &fixture_config(), "--team", "99"]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn generate_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().display().to_string();
    let run = coinmirror(&[
        "generate",
        "--out",
        &d,
        "--teams",
        "3",
        "--days",
        "21",
        "--handovers",
        "0,1,2",
        "--seed",
        "5",
    ]);
    assert!(run.status.success(), "{}", text(&run.stderr));
    let config = dir.path().join("config.toml").display().to_string();
    let run = coinmirror(&["analyze", "--config", &config]);
    assert!(run.status.success(), "{}", text(&run.stderr));
    let rows = read_team_metrics_csv(std::fs::File::open(dir.path().join("out/team_metrics.csv")).unwrap()).unwrap();
    let osc: Vec<u64> = rows.iter().map(|r| r.bc_oscillations).collect();
    assert_eq!(osc, [0, 1, 2]);

    let run = coinmirror(&["generate", "--out", &d, "--days", "14", "--handovers", "9"]);
    assert_eq!(run.status.code(), Some(2));
}
