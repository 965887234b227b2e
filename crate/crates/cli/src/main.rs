use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use positional::experiment::{audit_path, play_session, run_experiment, ExperimentConfig};
use positional::oracle::{minimax_solve, Verdict};
use positional::potential::{beck_sum, criterion_holds};
use positional::{Bias, Error, Hypergraph, Side};

const CONFIG_ERROR: u8 = 2;
const INVARIANT_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(name = "positional", version, about = "Maker-Breaker experiments: run, audit, play, solve")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (maker, breaker, seed) of a TOML config and audit the transcripts.
    Run {
        config: PathBuf,
        /// Overrides `out_dir` from the config and POSITIONAL_OUT_DIR.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Replay transcripts and re-check their invariants.
    Audit {
        #[arg(required = true)]
        transcripts: Vec<PathBuf>,
    },
    /// Play Breaker by hand against the config's Maker.
    Play {
        config: PathBuf,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Solve a small hypergraph game exactly.
    Solve {
        hypergraph: PathBuf,
        #[arg(long, default_value = "1:1")]
        bias: String,
        #[arg(long, default_value = "maker")]
        first: String,
        #[arg(long, default_value_t = 50_000_000)]
        node_cap: u64,
    },
    /// Evaluate Beck's criterion on a hypergraph.
    Beck {
        hypergraph: PathBuf,
        #[arg(long, default_value = "1:1")]
        bias: String,
    },
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse { .. } | Error::Io(_) | Error::InvalidBias(_) | Error::InvalidTree(_) | Error::InvalidBoard(_) => {
            CONFIG_ERROR
        }
        _ => INVARIANT_VIOLATION,
    }
}

fn load(path: &PathBuf, out_dir: Option<PathBuf>) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(d) = out_dir {
        cfg.out_dir = Some(std::env::current_dir().map(|c| c.join(&d)).unwrap_or(d));
    }
    Ok(cfg)
}

fn read_hypergraph(path: &PathBuf) -> Result<Hypergraph, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Hypergraph::parse(&text)
}

fn run(cmd: Command) -> Result<u8, Error> {
    match cmd {
        Command::Run { config, out_dir } => {
            let cfg = load(&config, out_dir)?;
            let out = run_experiment(&cfg)?;
            let mut failed = 0;
            for p in &out.transcripts {
                let r = audit_path(p)?;
                if !r.passed() {
                    failed += 1;
                    eprint!("{}", r.render());
                }
            }
            let wins = out.rows.iter().filter(|r| r.outcome == "maker_win").count();
            let forfeits = out.rows.iter().filter(|r| r.outcome == "forfeit").count();
            println!(
                "{} runs written to {} ({wins} Maker wins, {forfeits} forfeits, {failed} failed audits)",
                out.rows.len(),
                out.out_dir.display()
            );
            Ok(if failed == 0 { 0 } else { INVARIANT_VIOLATION })
        }
        Command::Audit { transcripts } => {
            let mut failed = false;
            for p in &transcripts {
                let r = audit_path(p)?;
                print!("{}", r.render());
                failed |= !r.passed();
            }
            Ok(if failed { INVARIANT_VIOLATION } else { 0 })
        }
        Command::Play { config, out_dir } => {
            let cfg = load(&config, out_dir)?;
            let stdin = io::stdin();
            let mut input: Box<dyn BufRead> = Box::new(stdin.lock());
            let mut output = io::stdout();
            play_session(&cfg, &mut input, &mut output)?;
            output.flush().ok();
            Ok(0)
        }
        Command::Solve { hypergraph, bias, first, node_cap } => {
            let h = read_hypergraph(&hypergraph)?;
            let bias: Bias = bias.parse()?;
            let first: Side = first.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
            match minimax_solve(&h, bias, first, node_cap)? {
                Verdict::Solved(r) => {
                    print!("winner: {}", r.winner);
                    if let Some(len) = r.maker_win_length {
                        print!(" in {len} Maker moves");
                    }
                    println!(" ({} nodes)", r.nodes);
                }
                Verdict::Inconclusive { nodes } => println!("inconclusive after {nodes} nodes"),
            }
            Ok(0)
        }
        Command::Beck { hypergraph, bias } => {
            let h = read_hypergraph(&hypergraph)?;
            let bias: Bias = bias.parse()?;
            let sum = beck_sum(&h, bias);
            let holds = criterion_holds(&h, bias);
            println!("beck sum: {sum}");
            println!("criterion holds: {holds}");
            if holds {
                println!("Breaker wins as either first mover");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
