use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use spr_core::dot::{pc_graph_dot, reduction_graph_dot};
use spr_core::legal_string::parse_legal_string;
use spr_core::pc_graph::{
    build_pc_graph, check_snr_order, enumerate_snr_domains, eventually_parallel_condition,
    parallel_now, parallel_tree_condition, realize_snr_order,
};
use spr_core::reduction::{apply_reduction, reduction_domain};
use spr_core::reduction_graph::build_reduction_graph;
use spr_core::report::{analyze, format_set};
use spr_core::verify::{eventually_parallel_oracle, run_verification, Execution, VerifyOptions};
use spr_core::{Label, LegalString, Reduction, ReductionError};

/// Analyse legal strings of the string pointer reduction system.
///
/// Strings are whitespace-separated pointers with `-` marking a barred
/// pointer, e.g. "5 4 3 7 2 5 6 2 -7 3 4 6". Pass `-` (or omit the string
/// where it is the only argument) to read it from standard input.
#[derive(Parser)]
#[command(name = "spr", version)]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Directory for DOT files written by `analyze`.
    #[arg(long, global = true, value_name = "DIR")]
    dot: Option<PathBuf>,
    /// Largest label count enumerated by `verify`.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    max_labels: u64,
    /// Cap on enumerated reductions per string in `verify`.
    #[arg(long, global = true)]
    limit: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report: domains, components, PC edges, snr domains and orders.
    Analyze { string: Option<String> },
    /// Apply a reduction such as "sdr(5,3); snr(4)".
    Reduce { string: String, reduction: String },
    /// List every set of labels some successful reduction can use for snr.
    SnrDomains { string: Option<String> },
    /// Decide whether snr rules can run in the given order, e.g. "3,2,5".
    CheckOrder { string: String, order: String },
    /// Parallelism conditions for the snr rules on two labels.
    Parallel { string: String, p: Label, q: Label },
    /// Replay every property over all legal strings up to --max-labels.
    Verify {
        /// Run single-threaded.
        #[arg(long)]
        sequential: bool,
    },
    /// Print DOT for the reduction graph and/or the pointer-component graph.
    Dot {
        string: Option<String>,
        #[arg(long, value_enum, default_value_t = GraphKind::Both)]
        graph: GraphKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphKind {
    Reduction,
    Pc,
    Both,
}

const EXIT_COUNTEREXAMPLE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_RULE: u8 = 3;

struct Failure {
    code: u8,
    message: String,
}

fn input_error(e: impl std::fmt::Display) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: e.to_string(),
    }
}

fn read_string(arg: Option<&str>) -> Result<LegalString, Failure> {
    let text = match arg {
        Some(t) if t != "-" => t.to_string(),
        _ => {
            let mut buf = String::new();
            io::stdin().read_to_string(&mut buf).map_err(input_error)?;
            buf
        }
    };
    parse_legal_string(text.trim()).map_err(input_error)
}

fn display(u: &LegalString) -> String {
    if u.is_empty() {
        "(empty)".to_string()
    } else {
        u.to_string()
    }
}

fn parse_order(text: &str) -> Result<Vec<Label>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<Label>()
                .map_err(|_| input_error(format!("malformed label {t:?} in order")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Analyze { string } => {
            let u = read_string(string.as_deref())?;
            if let Some(dir) = &cli.dot {
                fs::create_dir_all(dir).map_err(input_error)?;
                fs::write(
                    dir.join("reduction_graph.dot"),
                    reduction_graph_dot(&build_reduction_graph(&u)),
                )
                .map_err(input_error)?;
                fs::write(dir.join("pc_graph.dot"), pc_graph_dot(&build_pc_graph(&u)))
                    .map_err(input_error)?;
            }
            let report = analyze(&u);
            Ok(if cli.json {
                serde_json::to_string_pretty(&report).expect("serializable")
            } else {
                report.to_string()
            })
        }
        Command::Reduce { string, reduction } => {
            let u = read_string(Some(&string))?;
            let phi: Reduction = reduction.parse().map_err(input_error)?;
            let v = apply_reduction(&u, &phi).map_err(|e| match e {
                ReductionError::NotApplicable { .. } => Failure {
                    code: EXIT_RULE,
                    message: e.to_string(),
                },
                other => input_error(other),
            })?;
            let removed = reduction_domain(&phi);
            let remaining = v.domain();
            Ok(if cli.json {
                json!({
                    "result": v.to_string(),
                    "reduction_domain": removed,
                    "remaining_domain": remaining,
                })
                .to_string()
            } else {
                format!(
                    "{}\nreduction domain: {}\nremaining domain: {}",
                    display(&v),
                    format_set(&removed),
                    format_set(&remaining)
                )
            })
        }
        Command::SnrDomains { string } => {
            let u = read_string(string.as_deref())?;
            let mut domains = enumerate_snr_domains(&build_pc_graph(&u));
            domains.sort();
            Ok(if cli.json {
                json!({ "snr_domains": domains }).to_string()
            } else {
                domains
                    .iter()
                    .map(format_set)
                    .collect::<Vec<_>>()
                    .join("\n")
            })
        }
        Command::CheckOrder { string, order } => {
            let u = read_string(Some(&string))?;
            let order = parse_order(&order)?;
            let verdict = check_snr_order(&u, &order);
            let witness = verdict
                .as_ref()
                .ok()
                .map(|_| realize_snr_order(&u, &order).expect("valid orders are realizable"));
            Ok(if cli.json {
                json!({
                    "order": order,
                    "valid": verdict.is_ok(),
                    "reason": verdict.as_ref().err().map(ToString::to_string),
                    "witness": witness.as_ref().map(ToString::to_string),
                })
                .to_string()
            } else {
                match (verdict, witness) {
                    (Ok(()), Some(w)) if w.is_empty() => {
                        "yes\nwitness: (empty reduction)".to_string()
                    }
                    (Ok(()), Some(w)) => format!("yes\nwitness: {w}"),
                    (Err(e), _) => format!("no: {e}"),
                    (Ok(()), None) => unreachable!(),
                }
            })
        }
        Command::Parallel { string, p, q } => {
            let u = read_string(Some(&string))?;
            let now = parallel_now(&u, p, q).map_err(input_error)?;
            let leaves = parallel_tree_condition(&u, p, q).map_err(input_error)?;
            let eventual = eventually_parallel_condition(&u, p, q).map_err(input_error)?;
            let oracle = eventually_parallel_oracle(&u, p, q);
            Ok(if cli.json {
                json!({
                    "pair": [p, q],
                    "parallel_now": now,
                    "leaf_tree_condition": leaves,
                    "eventually_parallel_condition": eventual,
                    "eventually_parallel_oracle": oracle,
                })
                .to_string()
            } else {
                format!(
                    "parallel now:                  {now}\n\
                     leaf spanning-tree condition:  {leaves}\n\
                     eventual (tree condition):     {eventual}\n\
                     eventual (exhaustive search):  {oracle}"
                )
            })
        }
        Command::Verify { sequential } => {
            let report = run_verification(&VerifyOptions {
                max_labels: cli.max_labels as usize,
                limit: cli.limit,
                execution: if sequential {
                    Execution::Sequential
                } else {
                    Execution::Parallel
                },
                ..VerifyOptions::default()
            });
            let text = if cli.json {
                serde_json::to_string_pretty(&report).expect("serializable")
            } else {
                report.to_string()
            };
            if report.is_success() {
                Ok(text)
            } else {
                Err(Failure {
                    code: EXIT_COUNTEREXAMPLE,
                    message: text,
                })
            }
        }
        Command::Dot { string, graph } => {
            let u = read_string(string.as_deref())?;
            let mut out = Vec::new();
            if matches!(graph, GraphKind::Reduction | GraphKind::Both) {
                out.push(reduction_graph_dot(&build_reduction_graph(&u)));
            }
            if matches!(graph, GraphKind::Pc | GraphKind::Both) {
                out.push(pc_graph_dot(&build_pc_graph(&u)));
            }
            Ok(out.concat().trim_end().to_string())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(text) => {
            println!("{}", text.trim_end());
            ExitCode::SUCCESS
        }
        Err(Failure { code, message }) => {
            if code == EXIT_COUNTEREXAMPLE {
                println!("{}", message.trim_end());
            } else {
                eprintln!("error: {message}");
            }
            ExitCode::from(code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_parsing() {
        assert_eq!(parse_order("3, 2,5").ok(), Some(vec![3, 2, 5]));
        assert_eq!(parse_order("").ok(), Some(vec![]));
        assert!(parse_order("3,x").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
