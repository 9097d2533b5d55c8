#![allow(dead_code)]

pub mod props;

use std::path::{Path, PathBuf};

use coinmirror::config::RunConfig;
use coinmirror::pipeline::{load_corpus, Corpus};
use coinmirror::synth::{generate, SynthConfig, SynthCorpus};

pub struct Generated {
    pub dir: tempfile::TempDir,
    pub corpus: SynthCorpus,
}

impl Generated {
    pub fn config_path(&self) -> PathBuf {
        self.dir.path().join("config.toml")
    }

    pub fn config(&self) -> RunConfig {
        RunConfig::load(self.config_path()).expect("generated config loads")
    }

    pub fn load(&self) -> Corpus {
        load_corpus(&self.config()).expect("generated corpus loads")
    }
}

pub fn generated(cfg: &SynthConfig) -> Generated {
    let dir = tempfile::tempdir().expect("tempdir");
    let corpus = generate(cfg).expect("generate");
    corpus.write(dir.path()).expect("write corpus");
    Generated { dir, corpus }
}

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/course")
}

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn sha256_of_dir_files(dir: &Path, names: &[&str]) -> Vec<String> {
    names
        .iter()
        .map(|n| coinmirror::report::file_sha256(&dir.join(n)).expect("hash"))
        .collect()
}

pub fn fixture_truth() -> coinmirror::synth::GroundTruth {
    let text = std::fs::read_to_string(fixture_dir().join("truth.json")).expect("fixture truth");
    serde_json::from_str(&text).expect("truth parses")
}

pub fn fixture_config() -> RunConfig {
    RunConfig::load(fixture_dir().join("config.toml")).expect("fixture config loads")
}

pub fn reference_rows() -> Vec<coinmirror::metrics::TeamMetricsRow> {
    let file = std::fs::File::open(data_dir().join("reference_metrics.csv")).expect("reference_metrics.csv");
    coinmirror::report::read_team_metrics_csv(file).expect("reference metrics parse")
}

/// Reference correlations: column pair, r, p, significance mark. The
/// `ART`/`AWVCI` p is reported as .000, i.e. below 0.0005.
pub const REFERENCE_CORRELATIONS: [(&str, &str, f64, f64, &str); 9] = [
    ("creativity", "bc_oscillations", -0.830, 0.003, "**"),
    ("creativity", "art_norm_min", 0.656, 0.039, "*"),
    ("creativity", "pos_sent", -0.684, 0.029, "*"),
    ("creativity", "awvci", 0.612, 0.060, ""),
    ("creativity", "msg_recvd", -0.652, 0.041, "*"),
    ("art_norm_min", "awvci", 0.930, 0.000, "**"),
    ("gbc_strong_tie", "group_dc", 0.776, 0.008, "**"),
    ("group_dc", "num_actors", 0.768, 0.010, "**"),
    ("num_actors", "msg_recvd", 0.801, 0.005, "**"),
];

pub fn column(rows: &[coinmirror::metrics::TeamMetricsRow], name: &str) -> Vec<f64> {
    rows.iter().map(|r| r.get(name).expect("column value")).collect()
}

/// Two-sided permutation p-value of the correlation of `xs` and `ys`:
/// the share of shuffles of `ys` whose |r| reaches the observed |r|.
pub fn permutation_p(xs: &[f64], ys: &[f64], shuffles: usize, seed: u64) -> f64 {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    let center = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        v.iter().map(|x| x - m).collect::<Vec<f64>>()
    };
    let (x, mut y) = (center(xs), center(ys));
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let syy: f64 = y.iter().map(|v| v * v).sum();
    let norm = (sxx * syy).sqrt();
    let r = |y: &[f64]| x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / norm;
    let observed = r(&y).abs() - 1e-12;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..shuffles {
        y.shuffle(&mut rng);
        if r(&y).abs() >= observed {
            hits += 1;
        }
    }
    hits as f64 / shuffles as f64
}
