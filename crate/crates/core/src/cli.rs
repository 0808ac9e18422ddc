//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::code::{verify_linear, LinearIndexCode};
use crate::error::{Error, Result};
use crate::instance::{validate, Instance};
use crate::multi::{bound_multi, run_append_prune, BoundReport, LowerBoundReport, SearchCaps, StepDetail};
use crate::oracle::{oracle_min_linear, OracleCaps, DEFAULT_MAX_BITS, DEFAULT_MAX_LEN};
use crate::single::{encode_single, solve_single};
use crate::graph::WorkGraph;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "uniprior-ic", version, about = "Bounds and codes for single-uniprior index coding")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an instance file.
    Validate { file: PathBuf },
    /// Optimal code for a single-sender instance.
    Solve { file: PathBuf },
    /// Lower and upper bounds for a binary instance.
    Bound {
        file: PathBuf,
        /// Also search every admissible step sequence.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = crate::multi::DEFAULT_MAX_STATES, value_parser = positive)]
        max_states: usize,
    },
    /// Write a code for the instance to a file.
    Encode {
        file: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Check that a code lets every receiver decode.
    Verify { file: PathBuf, code: PathBuf },
    /// Shortest linear code by exhaustive search (small instances).
    Oracle {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_LEN, value_parser = positive)]
        max_len: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_BITS, value_parser = positive)]
        max_bits: usize,
    },
    /// Step-by-step log of the appending-pruning procedure.
    Trace { file: PathBuf },
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Serialize)]
struct EncodeReport<'a> {
    length: usize,
    output: &'a Path,
    code: &'a LinearIndexCode,
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path)?;
    Instance::from_json(&text)
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

/// Parses `args` (including the program name) and runs the command. Returns
/// the process exit status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let shown = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{shown}");
                EXIT_INVALID
            } else {
                let _ = write!(out, "{shown}");
                EXIT_OK
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::CapExceeded(_) => EXIT_CAP,
                _ => EXIT_INVALID,
            }
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let as_json = cli.format == Format::Json;
    match &cli.command {
        Command::Validate { file } => {
            let inst = read_instance(file)?;
            let report = validate(&inst);
            if as_json {
                writeln!(out, "{}", json(&report))?;
            } else {
                writeln!(out, "{}", if report.ok { "valid" } else { "invalid" })?;
                for v in &report.violations {
                    writeln!(out, "  violation: {v}")?;
                }
                for note in &report.notes {
                    writeln!(out, "  note: {note}")?;
                }
            }
            Ok(if report.ok { EXIT_OK } else { EXIT_INVALID })
        }
        Command::Solve { file } => {
            let sol = solve_single(&read_instance(file)?)?;
            if as_json {
                writeln!(out, "{}", json(&sol))?;
            } else {
                writeln!(out, "optimal length: {}", sol.optimal_length)?;
                writeln!(out, "{}", sol.breakdown.formula())?;
                for step in &sol.trace.steps {
                    writeln!(out, "prune {:?}: vertex {} loses {:?}", step.scc, step.selected, step.removed_arcs)?;
                }
                writeln!(out, "code ({} symbols):", sol.code.len())?;
                write!(out, "{}", sol.code)?;
            }
            Ok(EXIT_OK)
        }
        Command::Bound {
            file,
            exhaustive,
            max_states,
        } => {
            let inst = read_instance(file)?;
            let caps = SearchCaps {
                exhaustive: *exhaustive,
                max_states: *max_states,
                ..SearchCaps::default()
            };
            let report = bound_multi(&inst, caps)?;
            if as_json {
                writeln!(out, "{}", json(&report))?;
            } else {
                write_bound(out, &report)?;
            }
            let partial = report.exhaustive.is_some_and(|e| !e.complete) || !report.trees_exact;
            Ok(if partial { EXIT_CAP } else { EXIT_OK })
        }
        Command::Encode { file, output } => {
            let inst = read_instance(file)?;
            inst.check()?;
            let code = if inst.sender_count() == 1 {
                encode_single(&WorkGraph::from_instance(&inst))
            } else {
                bound_multi(&inst, SearchCaps::default())?.code
            };
            std::fs::write(output, code.to_json() + "\n")?;
            if as_json {
                let report = EncodeReport {
                    length: code.len(),
                    output,
                    code: &code,
                };
                writeln!(out, "{}", json(&report))?;
            } else {
                writeln!(out, "wrote {} symbols to {}", code.len(), output.display())?;
                write!(out, "{code}")?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { file, code } => {
            let inst = read_instance(file)?;
            inst.check()?;
            let code = LinearIndexCode::from_json(&std::fs::read_to_string(code)?)?;
            let report = verify_linear(&inst, &code)?;
            if as_json {
                writeln!(out, "{}", json(&report))?;
            } else if report.valid {
                writeln!(out, "valid: every receiver decodes ({} symbols)", code.len())?;
            } else {
                writeln!(out, "invalid: {} undecodable wanted bits", report.failures.len())?;
                for f in &report.failures {
                    writeln!(out, "  receiver {} cannot decode x{}[{}]", f.receiver, f.message, f.bit)?;
                }
            }
            Ok(if report.valid { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        Command::Oracle {
            file,
            max_len,
            max_bits,
        } => {
            let inst = read_instance(file)?;
            let result = oracle_min_linear(
                &inst,
                OracleCaps {
                    max_len: *max_len,
                    max_bits: *max_bits,
                },
            )?;
            if as_json {
                writeln!(out, "{}", json(&result))?;
            } else {
                if result.exact {
                    writeln!(out, "{} = {}", result.label, result.value)?;
                } else {
                    writeln!(out, "{} <= {} (cap reached, uncoded fallback)", result.label, result.value)?;
                }
                write!(out, "{}", result.code)?;
            }
            Ok(if result.exact { EXIT_OK } else { EXIT_CAP })
        }
        Command::Trace { file } => {
            let report = run_append_prune(&read_instance(file)?)?;
            if as_json {
                writeln!(out, "{}", json(&report))?;
            } else {
                write_trace(out, &report)?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn write_bound(out: &mut dyn Write, r: &BoundReport) -> Result<()> {
    let lr = &r.lower_report;
    writeln!(out, "{}", lr.formula())?;
    if let Some(e) = &r.exhaustive {
        writeln!(
            out,
            "exhaustive lower = {} ({} states, {})",
            e.bound,
            e.states,
            if e.complete { "complete" } else { "partial" }
        )?;
    }
    writeln!(
        out,
        "upper = V_out - (connected + trees) = {} - ({} + {}) = {}{}",
        lr.v_out_original,
        lr.connected_count,
        r.trees.len(),
        r.upper,
        if r.trees_exact { "" } else { " (greedy trees)" }
    )?;
    writeln!(out, "lower {} upper {}", r.lower, r.upper)?;
    match r.tight_reason {
        Some(reason) => writeln!(out, "tight: yes ({reason:?})")?,
        None => writeln!(out, "tight: no")?,
    }
    for t in &r.trees {
        writeln!(out, "tree {:?} edges {:?}", t.vertices, t.edges)?;
    }
    writeln!(out, "code ({} symbols):", r.code.len())?;
    write!(out, "{}", r.code)?;
    Ok(())
}

fn write_trace(out: &mut dyn Write, r: &LowerBoundReport) -> Result<()> {
    for (k, step) in r.steps.iter().enumerate() {
        let phase = if step.iteration == 0 {
            "init".to_string()
        } else {
            format!("iter {}", step.iteration)
        };
        let detail = match &step.detail {
            StepDetail::Pruned { vertex, removed_arcs } => format!("prune vertex {vertex}, removed {removed_arcs:?}"),
            StepDetail::Dummy { arc } => format!("add dummy {} with arc {} -> {}", arc.1, arc.0, arc.1),
            StepDetail::Witness { arc, witness } => format!(
                "add arc {} -> {} (inside {:?}, outside {:?})",
                arc.0, arc.1, witness.s_inside, witness.s_outside
            ),
        };
        writeln!(out, "{:>3}. [{phase}] {:?} {:?}: {detail}", k + 1, step.kind, step.scc)?;
    }
    writeln!(out, "{}", r.formula())?;
    Ok(())
}
