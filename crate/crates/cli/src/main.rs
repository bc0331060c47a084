use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bsr_core::decide::{ModelDocument, SolveError};
use bsr_core::frontend::{basify, complete, parse_raw, FrontendError};
use bsr_core::ground::GroundOptions;
use bsr_core::tcm::SimOutcome;
use bsr_core::{
    ap_classes, check_fragment, ground_all, inst_points, normalize, print, purify, solve_text, stats, ClauseSet,
    DecideOptions, Decision, EncodingStyle, FragmentClass, TwoCounterMachine,
};
use clap::{Parser, Subcommand};
use serde::Serialize;

const EXIT_SAT: u8 = 10;
const EXIT_UNSAT: u8 = 20;
const EXIT_UNKNOWN: u8 = 30;
const EXIT_ERROR: u8 = 1;

const GROUND_CAP_VAR: &str = "BSRSB_MAX_GROUND_LEN";

#[derive(Parser)]
#[command(name = "bsr", version, about = "Decide BSR clause sets with simple bounds over the reals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide satisfiability
    Check {
        file: PathBuf,
        /// Print the model on sat
        #[arg(long)]
        model: bool,
        /// Print one JSON document instead of text
        #[arg(long)]
        json: bool,
        /// Also write the ground instances and axioms to this path
        #[arg(long, value_name = "PATH")]
        emit_ground: Option<PathBuf>,
        #[arg(long, value_name = "N")]
        max_arrangements: Option<u64>,
        #[arg(long, value_name = "N")]
        max_partitions: Option<u64>,
        #[arg(long, value_name = "N", default_value_t = 1)]
        threads: usize,
    },
    /// Write the ground instances and axioms
    Ground {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write the normal form
    Normalize {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print statistics, argument position classes and instantiation points
    Info { file: PathBuf },
    /// Two-counter machines
    Tcm {
        #[command(subcommand)]
        command: TcmCommand,
    },
}

#[derive(Subcommand)]
enum TcmCommand {
    /// Run a machine for a bounded number of steps
    Simulate {
        machine: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        steps: u64,
    },
    /// Encode a machine as a clause set
    Encode {
        machine: PathBuf,
        #[arg(long, value_parser = parse_style)]
        style: EncodingStyle,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_style(s: &str) -> Result<EncodingStyle, String> {
    s.parse()
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure(format!("cannot read {}: {}", path.display(), e)))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure(format!("cannot write {}: {}", p.display(), e))),
        None => {
            print!("{}", text);
            Ok(())
        }
    }
}

fn ground_cap() -> Result<Option<u128>, Failure> {
    match std::env::var(GROUND_CAP_VAR) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Failure(format!("{} must be a number, got `{}`", GROUND_CAP_VAR, v))),
        Err(_) => Ok(None),
    }
}

/// Parses problem text, refusing anything outside the fragment.
fn load(path: &Path) -> Result<ClauseSet, Failure> {
    let raw = parse_raw(&read(path)?).map_err(FrontendError::from)?;
    if let FragmentClass::OutOfFragment { reason, offending } = check_fragment(&raw) {
        return Err(Failure(format!("outside the decidable fragment: {} in `{}`", reason, offending)));
    }
    Ok(complete(basify(&raw).map_err(FrontendError::from)?))
}

#[derive(Serialize)]
struct Report {
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<ModelDocument>,
}

fn check(
    file: &Path,
    show_model: bool,
    json: bool,
    emit_ground: Option<&Path>,
    opts: DecideOptions,
) -> Result<u8, Failure> {
    let text = read(file)?;
    let solution = solve_text(&text, &opts).map_err(|e| match e {
        SolveError::Fragment { reason, offending } => {
            Failure(format!("outside the decidable fragment: {} in `{}`", reason, offending))
        }
        e => Failure(e.to_string()),
    })?;
    if let Some(path) = emit_ground {
        write_out(Some(path), &solution.grounding.to_text())?;
    }
    let code = match &solution.decision {
        Decision::Sat(_) => EXIT_SAT,
        Decision::Unsat => EXIT_UNSAT,
        Decision::Unknown(_) => EXIT_UNKNOWN,
    };
    if json {
        let report = Report {
            verdict: solution.decision.verdict(),
            reason: match &solution.decision {
                Decision::Unknown(r) => Some(r.clone()),
                _ => None,
            },
            model: match &solution.decision {
                Decision::Sat(m) => Some(ModelDocument::from_model(m)),
                _ => None,
            },
        };
        println!("{}", serde_json::to_string_pretty(&report)?);
        return Ok(code);
    }
    println!("{}", solution.decision.verdict());
    match &solution.decision {
        Decision::Sat(m) if show_model => print!("{}", m),
        Decision::Unknown(reason) => eprintln!("{}", reason),
        _ => {}
    }
    Ok(code)
}

fn info(file: &Path) -> Result<String, Failure> {
    let raw = parse_raw(&read(file)?).map_err(FrontendError::from)?;
    let fragment = check_fragment(&raw);
    let mut out = String::new();
    let _ = writeln!(out, "fragment: {}", fragment);
    if let FragmentClass::OutOfFragment { reason, offending } = &fragment {
        let _ = writeln!(out, "reason: {} in `{}`", reason, offending);
        return Ok(out);
    }
    let set = purify(&complete(basify(&raw).map_err(FrontendError::from)?));
    let join = |it: &mut dyn Iterator<Item = String>| {
        let items: Vec<String> = it.collect();
        if items.is_empty() {
            "none".to_string()
        } else {
            items.join(", ")
        }
    };
    let st = stats(&set);
    let _ = writeln!(out, "clauses: {}", set.clauses.len());
    let _ = writeln!(out, "length: {}", st.len);
    let _ = writeln!(out, "variables: {}", join(&mut st.vars.iter().map(|v| v.to_string())));
    let _ = writeln!(out, "base constants: {}", join(&mut st.bconsts.iter().map(|c| c.to_string())));
    let _ = writeln!(out, "free constants: {}", join(&mut st.fconsts.iter().map(|c| c.to_string())));
    let normal = normalize(&set)?;
    let classes = ap_classes(&normal);
    let points = inst_points(&normal, &classes);
    let _ = writeln!(out, "alpha constants: {}", join(&mut points.alpha_consts().iter().map(|c| c.to_string())));
    for (rep, members) in classes.classes() {
        let sort = classes.sort_of(&rep).map_or_else(|| "?".to_string(), |s| s.to_string());
        let _ = write!(out, "class {} : {} = {{{}}}", rep, sort, join(&mut members.iter().map(|p| p.to_string())));
        if let Some(pts) = points.get(&rep) {
            let _ = write!(out, " points {{{}}}", join(&mut pts.iter().map(|c| c.to_string())));
        }
        out.push('\n');
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Check { file, model, json, emit_ground, max_arrangements, max_partitions, threads } => {
            let opts = DecideOptions { max_arrangements, max_partitions, threads, max_ground_len: ground_cap()? };
            check(&file, model, json, emit_ground.as_deref(), opts)
        }
        Command::Ground { file, output } => {
            let normal = normalize(&purify(&load(&file)?))?;
            let g = ground_all(&normal, &GroundOptions { max_len: ground_cap()? })?;
            write_out(output.as_deref(), &g.to_text())?;
            Ok(0)
        }
        Command::Normalize { file, output } => {
            let normal = normalize(&purify(&load(&file)?))?;
            write_out(output.as_deref(), &print(&normal))?;
            Ok(0)
        }
        Command::Info { file } => {
            print!("{}", info(&file)?);
            Ok(0)
        }
        Command::Tcm { command: TcmCommand::Simulate { machine, steps } } => {
            let m: TwoCounterMachine = read(&machine)?.parse()?;
            match m.simulate(steps) {
                SimOutcome::Halted { steps, counters: (a, b) } => {
                    println!("halted after {} steps with counters ({}, {})", steps, a, b)
                }
                SimOutcome::Running { label, counters: (a, b) } => {
                    println!("running at {} after {} steps with counters ({}, {})", label, steps, a, b)
                }
            }
            Ok(0)
        }
        Command::Tcm { command: TcmCommand::Encode { machine, style, output } } => {
            let m: TwoCounterMachine = read(&machine)?.parse()?;
            eprintln!("note: {} encodings lie outside the decidable fragment; `check` rejects them", style);
            write_out(output.as_deref(), &m.encode(style))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("{}", msg.lines().next().unwrap_or("invalid arguments"));
            return ExitCode::from(EXIT_ERROR);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(EXIT_ERROR)
        }
    }
}
