use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use newsgpt::config::Config;
use newsgpt::dataset::{load_dataset, OneMeans};
use newsgpt::params_io::{load_params, save_params};
use newsgpt::report::{build_report, write_report, ReportInputs};
use newsgpt::server::{serve, AppState, LlmChoice};
use newsgpt_core::classifier::{
    encode_title, evaluate, predict_label, stratified_split, train_with, AdamConfig, Label, MetricsReport,
    ModelConfig, TrainConfig,
};

#[derive(Parser)]
#[command(name = "newsgpt", version, about = "Robot-reporter backend and evaluation tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the headline classifier and write a parameter file.
    Train {
        /// CSV with `title,label` columns, or a directory with Fake.csv and True.csv.
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long, default_value_t = 64)]
        batch_size: usize,
        #[arg(long, default_value_t = 1e-3)]
        learning_rate: f64,
        /// Fraction of each class used for training.
        #[arg(long, default_value_t = 0.8)]
        split: f64,
        /// Meaning of a numeric `1` label.
        #[arg(long, value_enum, default_value_t = OneMeans::Real)]
        one_means: OneMeans,
    },
    /// Score a parameter file on labelled titles.
    Eval {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        params: PathBuf,
        #[arg(long, value_enum, default_value_t = OneMeans::Real)]
        one_means: OneMeans,
        /// Score only the validation part of the split `train` would make.
        #[arg(long)]
        validation_split: Option<f64>,
        #[arg(long, default_value_t = 42, requires = "validation_split")]
        seed: u64,
    },
    /// Classify one headline.
    Predict {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        title: String,
    },
    /// Run the WebSocket gateway.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// `remote`, or `scripted:<fixture.json>` to replay completions.
        #[arg(long, default_value = "remote")]
        llm: LlmChoice,
        /// Do not stream trace events to robot clients.
        #[arg(long)]
        suppress_trace: bool,
    },
    /// Build the evaluation report from session logs and rating sheets.
    Report {
        /// A session log, or a directory of them.
        #[arg(long)]
        session: PathBuf,
        /// `criterion,value` sheet.
        #[arg(long)]
        ratings: Option<PathBuf>,
        /// `respondent,item,rating` sheet.
        #[arg(long)]
        sd: Option<PathBuf>,
        /// `index,accuracy[,note]` sheet tagging answers.
        #[arg(long)]
        accuracy: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn metrics_table(r: &MetricsReport) -> String {
    let mut s = format!("{:<8} {:>9} {:>9} {:>9} {:>9}\n", "class", "precision", "recall", "f1", "support");
    for (name, m) in [("fake", &r.fake), ("real", &r.real)] {
        s += &format!(
            "{name:<8} {:>9.4} {:>9.4} {:>9.4} {:>9}\n",
            m.precision, m.recall, m.f1, m.support
        );
    }
    s += &format!("accuracy {:.4}\n", r.accuracy);
    match r.auc {
        Some(a) => s += &format!("auc      {a:.4}\n"),
        None => s += "auc      n/a (one class)\n",
    }
    s
}

fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();

    match Cli::parse().command {
        Command::Train {
            data,
            out,
            seed,
            epochs,
            batch_size,
            learning_rate,
            split,
            one_means,
        } => {
            let (rows, stats) = load_dataset(&data, one_means)?;
            let real = rows.iter().filter(|r| r.label == Label::Real).count();
            eprintln!(
                "{} titles ({} real, {} fake), {} blank rows skipped",
                rows.len(),
                real,
                rows.len() - real,
                stats.skipped
            );
            let config = TrainConfig {
                epochs,
                batch_size,
                split_ratio: split,
                adam: AdamConfig {
                    learning_rate,
                    ..AdamConfig::default()
                },
                seed,
            };
            let outcome = train_with(&rows, &ModelConfig::default(), &config, |e| {
                eprintln!(
                    "epoch {:>3}  train loss {:.5}  validation loss {:.5}",
                    e.epoch, e.train_loss, e.validation_loss
                );
            })?;
            save_params(&out, &outcome.params).with_context(|| format!("writing {}", out.display()))?;
            println!(
                "train {} / validation {}\n{}",
                outcome.train_size,
                outcome.validation_size,
                metrics_table(&outcome.report)
            );
        }
        Command::Eval {
            data,
            params,
            one_means,
            validation_split,
            seed,
        } => {
            let params = load_params(&params).with_context(|| format!("reading {}", params.display()))?;
            let (rows, _) = load_dataset(&data, one_means)?;
            let rows = match validation_split {
                Some(ratio) => stratified_split(&rows, ratio, seed)?.1,
                None => rows,
            };
            let set: Vec<_> = rows
                .iter()
                .map(|r| (encode_title(&r.text, &params.config), r.label))
                .collect();
            println!("{} titles\n{}", set.len(), metrics_table(&evaluate(&params, &set)?));
        }
        Command::Predict { params, title } => {
            let params = load_params(&params).with_context(|| format!("reading {}", params.display()))?;
            let (label, p) = predict_label(&params, &title)?;
            let name = match label {
                Label::Real => "real",
                Label::Fake => "fake",
            };
            println!("{name} {p:.4}");
        }
        Command::Serve {
            config,
            port,
            llm,
            suppress_trace,
        } => {
            let mut config = match config {
                Some(p) => Config::load(&p)?,
                None => Config::default(),
            };
            if suppress_trace {
                config.server.suppress_robot_trace = true;
            }
            let host = config.server.host.clone();
            let state = Arc::new(AppState::from_config(&config, &llm)?);
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async move {
                let listener = tokio::net::TcpListener::bind((host.as_str(), port))
                    .await
                    .with_context(|| format!("binding {host}:{port}"))?;
                tracing::info!("listening on ws://{}/ws", listener.local_addr()?);
                serve(listener, state).await?;
                anyhow::Ok(())
            })?;
        }
        Command::Report {
            session,
            ratings,
            sd,
            accuracy,
            out,
        } => {
            let (report, unmatched) = build_report(&ReportInputs {
                session: &session,
                ratings: ratings.as_deref(),
                sd: sd.as_deref(),
                accuracy: accuracy.as_deref(),
            })?;
            if !unmatched.is_empty() {
                eprintln!("{} unmatched question/answer entries", unmatched.len());
            }
            for p in write_report(&report, &out)? {
                println!("{}", p.display());
            }
            print!("{}", report.summary);
        }
    }
    Ok(())
}
