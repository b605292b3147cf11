//! Command-line front end.

use std::io::{Read, Write};
use std::path::PathBuf;

use clap::Parser;
use serde_json::{json, Value};

use crate::model::{certify, check_model_detailed};
use crate::oracle::brute_force_sat;
use crate::search::{decide, SearchConfig, Verdict};
use crate::syntax::parse_problem;

pub const EXIT_SAT: i32 = 0;
pub const EXIT_UNSAT: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_ABORTED: i32 = 3;
pub const EXIT_AUDIT: i32 = 4;

/// Decide satisfiability of a graded hybrid logic problem.
#[derive(Debug, Parser)]
#[command(name = "gradtab", version)]
pub struct CliOptions {
    /// Problem file; reads standard input when absent or `-`.
    pub input: Option<PathBuf>,
    /// Print the extracted model as JSON on SAT.
    #[arg(long)]
    pub model: bool,
    /// Print search statistics as JSON.
    #[arg(long)]
    pub stats: bool,
    /// Print one JSON record per rule application.
    #[arg(long)]
    pub trace: bool,
    /// Certify a SAT verdict by building and checking a model.
    #[arg(long)]
    pub check: bool,
    /// Cross-check the verdict by enumerating models up to N states.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub oracle_bound: Option<u64>,
    /// Give up after N rule applications.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub max_steps: Option<u64>,
    /// Print a single JSON object instead of lines.
    #[arg(long)]
    pub json: bool,
}

/// Runs the front end; returns the exit status.
pub fn run(opts: &CliOptions, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut source = String::new();
    let read = match &opts.input {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path).map(|s| source = s),
        _ => stdin.read_to_string(&mut source).map(|_| ()),
    };
    if let Err(e) = read {
        let _ = writeln!(err, "error: cannot read input: {e}");
        return EXIT_ERROR;
    }
    let problem = match parse_problem(&source) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_ERROR;
        }
    };
    let cfg = SearchConfig {
        max_steps: opts.max_steps,
        trace: opts.trace,
        collect_stats: opts.stats,
    };
    let result = decide(&problem, &cfg);
    let mut code = match result.verdict {
        Verdict::Sat(_) => EXIT_SAT,
        Verdict::Unsat => EXIT_UNSAT,
        Verdict::Aborted => EXIT_ABORTED,
    };
    let mut doc = serde_json::Map::new();
    doc.insert("verdict".into(), json!(result.verdict.label()));
    let mut lines = vec![result.verdict.label().to_string()];

    if let Verdict::Sat(b) = &result.verdict {
        if opts.model || opts.check {
            match certify(b) {
                Ok(cert) => {
                    if opts.check {
                        let outcome = match check_model_detailed(&cert.model, &problem) {
                            Ok(()) => "ok".to_string(),
                            Err(detail) => {
                                let _ = writeln!(err, "audit failure: model check: {detail}");
                                code = EXIT_AUDIT;
                                detail
                            }
                        };
                        doc.insert("check".into(), json!(outcome));
                    }
                    if opts.model {
                        lines.push(cert.model.to_json());
                        doc.insert("model".into(), serde_json::to_value(&cert.model).unwrap());
                    }
                }
                Err(e) => {
                    let _ = writeln!(err, "audit failure: {}: {e}", e.condition());
                    doc.insert("check".into(), json!(e.to_string()));
                    code = EXIT_AUDIT;
                }
            }
        }
    }
    if let Some(bound) = opts.oracle_bound {
        match brute_force_sat(&problem, bound as usize) {
            Ok(v) => {
                let states = v.found.as_ref().map(|m| m.states.len());
                if matches!(result.verdict, Verdict::Unsat) && states.is_some() {
                    let _ = writeln!(err, "audit failure: oracle found a model of an UNSAT problem");
                    code = EXIT_AUDIT;
                }
                if matches!(result.verdict, Verdict::Sat(_)) && states.is_none() && opts.check {
                    // the certified model bounds the size of the smallest one
                    if let Ok(cert) = certify(result.verdict.branch().unwrap()) {
                        if cert.model.states.len() <= bound as usize {
                            let _ = writeln!(err, "audit failure: oracle found no model of a SAT problem");
                            code = EXIT_AUDIT;
                        }
                    }
                }
                let note = match states {
                    Some(k) => format!("oracle: model with {k} state{}", if k == 1 { "" } else { "s" }),
                    None => format!("oracle: no model up to {bound} states"),
                };
                lines.push(note);
                doc.insert("oracle".into(), json!({ "bound": bound, "model_states": states }));
            }
            Err(e) => {
                let _ = writeln!(err, "error: oracle: {e}");
                return EXIT_ERROR;
            }
        }
    }
    if opts.stats {
        let stats = serde_json::to_value(&result.stats).unwrap();
        lines.push(stats.to_string());
        doc.insert("stats".into(), stats);
    }
    if opts.trace {
        let records: Vec<Value> = result.trace.iter().map(|r| serde_json::to_value(r).unwrap()).collect();
        lines.extend(records.iter().map(Value::to_string));
        doc.insert("trace".into(), Value::Array(records));
    }
    if opts.json {
        let _ = writeln!(out, "{}", Value::Object(doc));
    } else {
        for l in lines {
            let _ = writeln!(out, "{l}");
        }
    }
    code
}

pub fn main() -> i32 {
    let opts = CliOptions::parse();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(&opts, &mut std::io::stdin(), &mut stdout.lock(), &mut stderr.lock())
}
