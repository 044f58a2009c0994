use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qbench_cli::{run_campaign, write_report, CampaignConfig, CliError, ReportKind};
use qbench_core::store::{query_records, Field, Filter, JobStore, DEFAULT_COLUMNS};
use serde_json::json;

/// Multi-provider QFT benchmark harness over simulated clouds.
#[derive(Debug, Parser)]
#[command(name = "qbench", version)]
struct Cli {
    /// Job store (JSONL); overrides the campaign config.
    #[arg(long, global = true, env = "QBENCH_STORE")]
    store: Option<PathBuf>,
    /// Print a single-line JSON summary on stdout.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run benchmark campaigns.
    Campaign {
        #[command(subcommand)]
        action: CampaignAction,
    },
    /// Inspect job states in the store.
    Jobs {
        #[command(subcommand)]
        action: JobsAction,
    },
    /// Write a CSV report from the store.
    Report {
        /// fidelity_vs_qubits, fidelity_vs_time, cost_vs_fidelity, availability,
        /// queue_prediction, table6, error_vs_target or job_status.
        kind: ReportKind,
        /// Record filter such as `qubits=10` or `fidelity>=0.37`; repeatable.
        #[arg(long = "filter", short = 'f')]
        filters: Vec<String>,
        #[arg(long, short = 'o')]
        out: PathBuf,
    },
    /// Export store records.
    Store {
        #[command(subcommand)]
        action: StoreAction,
    },
}

#[derive(Debug, Subcommand)]
enum CampaignAction {
    Run {
        #[arg(long, short = 'c')]
        config: PathBuf,
        /// Overrides the campaign seed.
        #[arg(long, env = "QBENCH_SEED")]
        seed: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
enum JobsAction {
    /// Counts of jobs per target and status.
    Poll {
        #[arg(long = "filter", short = 'f')]
        filters: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
enum StoreAction {
    /// Write matching records as CSV.
    Export {
        #[arg(long = "filter", short = 'f')]
        filters: Vec<String>,
        /// Comma-separated column names; defaults to every scalar field.
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
        #[arg(long, short = 'o')]
        out: PathBuf,
    },
}

fn store_path(cli_store: Option<PathBuf>) -> Result<PathBuf, CliError> {
    cli_store
        .ok_or_else(|| CliError::Config("no store given; pass --store or set QBENCH_STORE".into()))
}

fn load(
    cli_store: Option<PathBuf>,
    filters: &[String],
) -> Result<Vec<qbench_core::JobRecord>, CliError> {
    let filter = Filter::parse(filters).map_err(|e| CliError::Config(e.to_string()))?;
    let records = JobStore::load(store_path(cli_store)?)?;
    Ok(query_records(&records, &filter))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Campaign {
            action: CampaignAction::Run { config, seed },
        } => {
            let mut cfg = CampaignConfig::load(&config)?;
            if let Some(seed) = seed {
                cfg.campaign.seed = seed;
            }
            let path = cli
                .store
                .or_else(|| cfg.campaign.store.clone())
                .ok_or_else(|| {
                    CliError::Config("no store path in config, --store or QBENCH_STORE".into())
                })?;
            let mut store = JobStore::open(&path)?;
            let summary = run_campaign(&cfg, &mut store)?;
            if cli.json {
                println!(
                    "{}",
                    json!({ "command": "campaign run", "store": path.display().to_string(), "summary": summary })
                );
            } else {
                println!(
                    "{} jobs, total cost ${}, store {}",
                    summary.jobs,
                    summary.cost,
                    path.display()
                );
                for t in &summary.targets {
                    let states: Vec<String> =
                        t.statuses.iter().map(|(s, n)| format!("{s}={n}")).collect();
                    println!(
                        "  {:<9} {:<22} {:<48} ${}",
                        t.cloud,
                        t.target,
                        states.join(" "),
                        t.cost
                    );
                }
            }
        }
        Command::Jobs {
            action: JobsAction::Poll { filters },
        } => {
            let records = load(cli.store, &filters)?;
            let mut by_target: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
            let mut totals: BTreeMap<String, u64> = BTreeMap::new();
            for r in &records {
                let key = format!("{}/{}", r.cloud, r.target);
                *by_target
                    .entry(key)
                    .or_default()
                    .entry(r.status.to_string())
                    .or_insert(0) += 1;
                *totals.entry(r.status.to_string()).or_insert(0) += 1;
            }
            if cli.json {
                println!(
                    "{}",
                    json!({ "command": "jobs poll", "jobs": records.len(), "by_status": totals, "by_target": by_target })
                );
            } else {
                println!("{} jobs", records.len());
                for (target, states) in &by_target {
                    let s: Vec<String> = states.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    println!("  {target:<32} {}", s.join(" "));
                }
            }
        }
        Command::Report { kind, filters, out } => {
            let records = load(cli.store, &filters)?;
            let summary = write_report(kind, &records, &out)?;
            if cli.json {
                println!("{}", json!({ "command": "report", "report": summary }));
            } else {
                print!("{}: {} rows -> {}", summary.kind, summary.rows, summary.out);
                match summary.fraction_overestimated {
                    Some(f) => println!(" (overestimated {:.1}%)", 100.0 * f),
                    None => println!(),
                }
            }
        }
        Command::Store {
            action:
                StoreAction::Export {
                    filters,
                    columns,
                    out,
                },
        } => {
            let columns: Vec<Field> = if columns.is_empty() {
                DEFAULT_COLUMNS.to_vec()
            } else {
                columns
                    .iter()
                    .map(|c| c.parse::<Field>())
                    .collect::<Result<_, _>>()
                    .map_err(|e| CliError::Config(e.to_string()))?
            };
            let records = load(cli.store, &filters)?;
            let file = std::fs::File::create(&out)?;
            qbench_core::store::write_csv(&records, &columns, file)?;
            if cli.json {
                println!(
                    "{}",
                    json!({ "command": "store export", "rows": records.len(), "out": out.display().to_string() })
                );
            } else {
                println!("{} records -> {}", records.len(), out.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if json {
                println!(
                    "{}",
                    json!({ "error": e.to_string(), "exit_code": e.exit_code() })
                );
            }
            eprintln!("qbench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
