use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use coinmirror::config::{RunConfig, CONFIG_KEYS};
use coinmirror::graph::WindowMode;
use coinmirror::ingest::TeamId;
use coinmirror::metrics::{team_analysis, StrongTie, TeamMetricsRow, METRIC_COLUMNS};
use coinmirror::report::{correlations_csv, correlations_text, read_team_metrics_csv, surface_csv, write_file};
use coinmirror::stats::correlation_matrix;
use coinmirror::synth::{generate, SynthConfig};
use coinmirror::{pipeline, Error, Result};

const LOG_ENV: &str = "COINMIRROR_LOG";

fn config_help() -> String {
    let width = CONFIG_KEYS.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::from("Config file keys (TOML; unknown keys are rejected):\n");
    for (key, what) in CONFIG_KEYS {
        out.push_str(&format!("  {key:width$}  {what}\n"));
    }
    out.push_str(&format!(
        "\nRelative paths resolve against the config file's directory.\n\
         Log verbosity: {LOG_ENV}=error|warn|info|debug (default warn), logs go to stderr.\n\
         Exit status: 0 success, 1 runtime failure, 2 configuration error."
    ));
    out
}

#[derive(Parser, Debug)]
#[command(
    name = "coinmirror",
    version,
    about = "Team communication metrics from course email archives"
)]
#[command(after_long_help = config_help())]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Sliding,
    Cumulative,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full pipeline described by a config file.
    #[command(after_long_help = config_help())]
    Analyze {
        #[arg(long, short)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Correlate the columns of a team metrics CSV.
    Correlate {
        metrics_csv: PathBuf,
        /// Comma-separated column names; default all metric columns.
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
        /// Write correlations.csv and correlations.txt here instead of
        /// printing the table.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write course and team graphs as edge CSV and DOT.
    ExportGraphs {
        #[arg(long, short)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write one team's betweenness surface (actors by days) as CSV.
    Surface {
        #[arg(long, short)]
        config: PathBuf,
        #[arg(long)]
        team: String,
        /// Output file; default standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic course corpus with its ground truth.
    Generate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2006)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        teams: usize,
        #[arg(long, default_value_t = 42)]
        days: u32,
        #[arg(long, default_value_t = 7)]
        lookback_days: u32,
        /// Comma-separated handover counts, cycled over teams.
        #[arg(long, value_delimiter = ',')]
        handovers: Vec<u32>,
        #[arg(long, default_value_t = 0.35)]
        thread_rate: f64,
        /// Skip aliases, encodings and other archive noise.
        #[arg(long)]
        clean: bool,
    },
}

/// Flags that override config file values.
#[derive(Args, Debug, Default)]
struct Overrides {
    /// Override `output_dir`.
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    step_days: Option<u32>,
    #[arg(long)]
    lookback_days: Option<u32>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Betweenness on the directed graph.
    #[arg(long)]
    directed: bool,
    /// "mean" or a positive number.
    #[arg(long)]
    strong_tie: Option<String>,
    #[arg(long)]
    art_cutoff_minutes: Option<f64>,
}

impl Overrides {
    fn apply(self, cfg: &mut RunConfig) -> Result<()> {
        if let Some(d) = self.output_dir {
            cfg.output_dir = d;
        }
        if let Some(s) = self.step_days {
            cfg.window.step_days = s;
        }
        if let Some(l) = self.lookback_days {
            cfg.window.lookback_days = l;
        }
        if let Some(m) = self.mode {
            cfg.window.mode = match m {
                ModeArg::Sliding => WindowMode::Sliding,
                ModeArg::Cumulative => WindowMode::Cumulative,
            };
        }
        if self.directed {
            cfg.directed = true;
        }
        if let Some(s) = self.strong_tie {
            cfg.strong_tie = if s.eq_ignore_ascii_case("mean") {
                StrongTie::Mean
            } else {
                StrongTie::Fixed(
                    s.parse()
                        .map_err(|_| Error::Config(format!("--strong-tie must be \"mean\" or a number, got {s:?}")))?,
                )
            };
        }
        if let Some(c) = self.art_cutoff_minutes {
            cfg.art_cutoff_minutes = c;
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze { config, overrides } => {
            let mut cfg = RunConfig::load(&config)?;
            overrides.apply(&mut cfg)?;
            let started = Instant::now();
            let outcome = pipeline::run(&cfg)?;
            log::info!(
                "analyzed {} teams in {:.2?}; {} files in {}",
                outcome.rows.len(),
                started.elapsed(),
                outcome.files.len(),
                cfg.output_dir.display()
            );
            Ok(())
        }
        Command::Correlate {
            metrics_csv,
            columns,
            out,
        } => {
            let file = std::fs::File::open(&metrics_csv).map_err(|e| Error::io(&metrics_csv, e))?;
            let mut rows = read_team_metrics_csv(file)?;
            rows.sort_by(|a, b| a.team.cmp(&b.team));
            let columns: Vec<&str> = if columns.is_empty() {
                METRIC_COLUMNS.to_vec()
            } else {
                columns.iter().map(String::as_str).collect()
            };
            if columns.len() < 2 {
                return Err(Error::Config("need ≥ 2 columns".into()));
            }
            if let Some(bad) = columns.iter().find(|c| !TeamMetricsRow::is_column(c)) {
                return Err(Error::Config(format!(
                    "unknown column {bad:?}; known columns: {}",
                    METRIC_COLUMNS.join(", ")
                )));
            }
            let table = correlation_matrix(&rows, &columns)?;
            match out {
                Some(dir) => {
                    write_file(&dir.join("correlations.csv"), &correlations_csv(&table))?;
                    write_file(&dir.join("correlations.txt"), &correlations_text(&table))?;
                }
                None => {
                    let mut stdout = std::io::stdout().lock();
                    stdout
                        .write_all(correlations_text(&table).as_bytes())
                        .map_err(|e| Error::io("<stdout>", e))?;
                }
            }
            Ok(())
        }
        Command::ExportGraphs { config, out } => {
            let cfg = RunConfig::load(&config)?;
            let files = pipeline::export_graphs(&cfg, &out)?;
            log::info!("wrote {} graph files to {}", files.len(), out.display());
            Ok(())
        }
        Command::Surface { config, team, out } => {
            let cfg = RunConfig::load(&config)?;
            cfg.validate()?;
            let corpus = pipeline::load_corpus(&cfg)?;
            let id = TeamId::new(team);
            let roster = corpus
                .rosters
                .iter()
                .find(|r| r.team == id)
                .ok_or_else(|| Error::Config(format!("team {id} is not in the roster file")))?;
            let analysis = team_analysis(&corpus.messages, roster, &cfg.metrics_config(), &corpus.lexicon)
                .map_err(|e| e.in_stage("metrics"))?;
            let text = surface_csv(&analysis.surface);
            match out {
                Some(p) => write_file(&p, &text),
                None => std::io::stdout()
                    .lock()
                    .write_all(text.as_bytes())
                    .map_err(|e| Error::io("<stdout>", e)),
            }
        }
        Command::Generate {
            out,
            seed,
            teams,
            days,
            lookback_days,
            handovers,
            thread_rate,
            clean,
        } => {
            let cfg = SynthConfig {
                seed,
                teams,
                days,
                lookback_days,
                handovers,
                thread_rate,
                noise: !clean,
                ..SynthConfig::default()
            };
            let corpus = generate(&cfg).map_err(|e| match e {
                Error::Invalid(m) => Error::Config(m),
                other => other,
            })?;
            corpus.write(&out)?;
            log::info!("generated corpus in {}", out.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or(LOG_ENV, "warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
