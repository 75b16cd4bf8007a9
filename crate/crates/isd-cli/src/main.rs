//! `isd` — parse, enumerate, check and cross-validate interaction documents.
//!
//! Exit codes form the machine API: 0 success or positive verdict, 1
//! analysis-negative (trace rejected, predicate false, pruning collision),
//! 2 usage or parse error, 3 internal invariant violation (the differential
//! tester found the two semantics disagreeing). Results go to standard
//! output, diagnostics to standard error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use isd::denotational::{self, DenotationRequest};
use isd::dsl::{self, SourceDocument};
use isd::harness::{self, SuiteConfig};
use isd::operational;
use isd::syntax::Ident;

const NEGATIVE: u8 = 1;
const USAGE: u8 = 2;
const INVARIANT: u8 = 3;

/// Bounds above this need --allow-large; trace counts grow combinatorially.
const MAX_LEN_GUARDRAIL: usize = 10;

#[derive(Parser)]
#[command(name = "isd", version, about = "Interaction language tooling for sequence diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical form of an interaction document
    Fmt {
        /// Interaction document (.isd)
        file: PathBuf,
    },
    /// List accepted traces up to a length bound, one per line
    Traces {
        /// Interaction document (.isd)
        file: PathBuf,
        /// Maximum trace length to enumerate
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Which semantics to enumerate (both print identical output)
        #[arg(long, value_enum, default_value_t = Semantics::Op)]
        semantics: Semantics,
        /// Permit bounds beyond 10 despite the combinatorial growth
        #[arg(long)]
        allow_large: bool,
    },
    /// Check whether a trace is accepted by the interaction
    Check {
        /// Interaction document (.isd)
        file: PathBuf,
        /// The trace, e.g. `l1!m1.l2?m1` or `eps`
        #[arg(long)]
        trace: String,
        /// On acceptance, print the accepting step sequence
        #[arg(long)]
        witness: bool,
    },
    /// List the immediately executable steps of an interaction
    Frontier {
        /// Interaction document (.isd)
        file: PathBuf,
    },
    /// Remove every behavior involving a lifeline
    Prune {
        /// Interaction document (.isd)
        file: PathBuf,
        /// The lifeline to avoid
        #[arg(long)]
        lifeline: String,
    },
    /// Evaluate the termination or evasion predicate
    Eval {
        /// Interaction document (.isd)
        file: PathBuf,
        /// Which predicate to evaluate
        #[arg(long, value_enum)]
        query: Query,
        /// The lifeline an evasion query is about
        #[arg(long)]
        lifeline: Option<String>,
    },
    /// Cross-check the two semantics on random interactions
    Equiv {
        /// Root seed; per-case seeds derive from it
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Number of random interactions to test
        #[arg(long, default_value_t = 500)]
        cases: usize,
        /// Maximum depth of generated terms
        #[arg(long, default_value_t = 4)]
        max_depth: usize,
        /// Trace length bound for both semantics
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Semantics {
    /// Small-step enumeration
    Op,
    /// Compositional trace sets
    Den,
}

#[derive(Clone, Copy, ValueEnum)]
enum Query {
    Terminates,
    Evades,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(code) => ExitCode::from(code),
    }
}

fn run(command: Command) -> Result<u8, u8> {
    match command {
        Command::Fmt { file } => {
            let doc = load(&file)?;
            println!("{}", doc.interaction);
            Ok(0)
        }
        Command::Traces {
            file,
            max_len,
            semantics,
            allow_large,
        } => {
            if max_len > MAX_LEN_GUARDRAIL && !allow_large {
                eprintln!(
                    "error: --max-len {max_len} exceeds {MAX_LEN_GUARDRAIL}; \
                     pass --allow-large to confirm"
                );
                return Err(USAGE);
            }
            let doc = load(&file)?;
            let traces = match semantics {
                Semantics::Op => operational::traces_up_to(&doc.interaction, max_len),
                Semantics::Den => {
                    denotational::traces(&DenotationRequest::new(doc.interaction, max_len))
                }
            };
            let mut out = String::new();
            for trace in traces.iter() {
                out.push_str(&trace.to_string());
                out.push('\n');
            }
            print!("{out}");
            Ok(0)
        }
        Command::Check {
            file,
            trace,
            witness,
        } => {
            let doc = load(&file)?;
            let trace = match dsl::parse_trace(&trace) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: invalid trace: {e}");
                    return Err(USAGE);
                }
            };
            let verdict = operational::accepts(&doc.interaction, &trace);
            if verdict.accepted {
                println!("accepted");
                if witness {
                    for step in verdict.witness.iter().flatten() {
                        println!("{} → {}", step.action, step.successor);
                    }
                }
                Ok(0)
            } else {
                println!("rejected");
                Ok(NEGATIVE)
            }
        }
        Command::Frontier { file } => {
            let doc = load(&file)?;
            for step in operational::next_steps(&doc.interaction) {
                println!("{} → {}", step.action, step.successor);
            }
            Ok(0)
        }
        Command::Prune { file, lifeline } => {
            let doc = load(&file)?;
            let lifeline = Ident::new(&lifeline);
            match operational::prune(&doc.interaction, &lifeline) {
                Some(pruned) => {
                    println!("{pruned}");
                    Ok(0)
                }
                None => {
                    println!("collision on lifeline {lifeline}");
                    Ok(NEGATIVE)
                }
            }
        }
        Command::Eval {
            file,
            query,
            lifeline,
        } => {
            let doc = load(&file)?;
            let holds = match query {
                Query::Terminates => operational::terminates(&doc.interaction),
                Query::Evades => {
                    let Some(lifeline) = lifeline else {
                        eprintln!("error: --query evades needs --lifeline");
                        return Err(USAGE);
                    };
                    operational::evades(&doc.interaction, &Ident::new(&lifeline))
                }
            };
            println!("{holds}");
            Ok(if holds { 0 } else { NEGATIVE })
        }
        Command::Equiv {
            seed,
            cases,
            max_depth,
            max_len,
        } => {
            if cases == 0 {
                eprintln!("error: --cases must be at least 1");
                return Err(USAGE);
            }
            let cfg = SuiteConfig {
                seed,
                cases,
                max_depth,
                max_len,
            };
            let report = harness::run_suite(&cfg);
            let mut out = String::new();
            for case in &report.cases {
                match &case.discrepancy {
                    None => out.push_str(&format!(
                        "case {:>4}: ok ({} traces)\n",
                        case.index, case.trace_count
                    )),
                    Some(d) => {
                        let record = serde_json::to_string(d)
                            .expect("discrepancy records always serialize");
                        out.push_str(&format!("case {:>4}: DISCREPANCY {record}\n", case.index));
                    }
                }
            }
            out.push_str(&format!("{}/{} equivalent\n", report.agreed(), report.total()));
            print!("{out}");
            if report.all_agreed() {
                Ok(0)
            } else {
                Err(INVARIANT)
            }
        }
    }
}

fn load(path: &Path) -> Result<SourceDocument, u8> {
    let text = fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        USAGE
    })?;
    dsl::parse_document(&text).map_err(|e| {
        eprintln!("{}:{e}", path.display());
        USAGE
    })
}
