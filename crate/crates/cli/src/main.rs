use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use chainprover::harness::{self, HarnessError, Overrides, RunConfig};
use chainprover::verifier::Category;
use clap::{Args, Parser, Subcommand};

/// Verify LLM reasoning chains against first-order premises.
#[derive(Debug, Parser)]
#[command(name = "chainprover", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// `internal` or `external`.
    #[arg(long, global = true)]
    engine: Option<String>,
    /// External prover command; `{timeout_s}` is substituted.
    #[arg(long, global = true)]
    prover_cmd: Option<String>,
    #[arg(long, global = true)]
    timeout_ms: Option<String>,
    #[arg(long, global = true)]
    workers: Option<String>,
    /// `lenient` or `strict`.
    #[arg(long, global = true)]
    policy: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    llm_endpoint: Option<String>,
    #[arg(long, global = true)]
    llm_model: Option<String>,
    /// Replay canned LLM responses from a JSON file instead of calling an endpoint.
    #[arg(long, global = true)]
    llm_script: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify instances; writes reports.jsonl and summary.json.
    Verify {
        input: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Generate labeled fixtures.
    Mutate {
        #[arg(long, value_delimiter = ',', default_value = "T1,T2,T3,T4")]
        kinds: Vec<String>,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value = "fixtures.jsonl")]
        out: PathBuf,
    },
    /// Score reports against gold records.
    Metrics {
        reports: PathBuf,
        gold: PathBuf,
        /// Write the metric report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write TPTP problems for each instance and step query.
    TptpExport {
        input: PathBuf,
        #[arg(long, default_value = "tptp")]
        out: PathBuf,
    },
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            engine: self.engine.clone(),
            prover_cmd: self.prover_cmd.clone(),
            timeout_ms: self.timeout_ms.clone(),
            workers: self.workers.clone(),
            policy: self.policy.clone(),
            seed: self.seed.clone(),
            llm_endpoint: self.llm_endpoint.clone(),
            llm_model: self.llm_model.clone(),
            llm_script: self.llm_script.clone(),
        }
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let env = Overrides::from_env(std::env::vars());
    let cfg = RunConfig::load(cli.common.config.as_deref(), &env, &cli.common.overrides())?;
    match cli.command {
        Command::Verify { input, out } => {
            let summary = harness::run_verify(&cfg, &input, &out)?;
            eprintln!(
                "verified {} instances -> {}",
                summary.total,
                out.join("reports.jsonl").display()
            );
        }
        Command::Mutate { kinds, count, out } => {
            let kinds = kinds
                .iter()
                .map(|k| k.trim().parse::<Category>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            let n = harness::run_mutate(&cfg, &kinds, count, &out)?;
            eprintln!("wrote {n} instances -> {}", out.display());
        }
        Command::Metrics { reports, gold, out } => {
            let report = harness::run_metrics(&cfg, &reports, &gold)?;
            let text = serde_json::to_string_pretty(&report)
                .map_err(|e| HarnessError::Io(e.to_string()))?;
            match out {
                Some(p) => std::fs::write(&p, text + "\n")
                    .map_err(|e| HarnessError::Io(format!("{}: {e}", p.display())))?,
                None => {
                    let mut stdout = std::io::stdout().lock();
                    match writeln!(stdout, "{text}") {
                        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                            return Err(HarnessError::Io(e.to_string()))
                        }
                        _ => {}
                    }
                }
            }
        }
        Command::TptpExport { input, out } => {
            let n = harness::run_tptp_export(&input, &out)?;
            eprintln!("wrote {n} files -> {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
