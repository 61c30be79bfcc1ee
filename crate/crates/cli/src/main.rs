//! `xagmc`: multiplicative complexity and XOR-optimized XAGs from the command line.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use xagmc::affine5::{self, ClassTableEntry};
use xagmc::encoder::{ConstraintFamily, EncodingOptions, McInstance};
use xagmc::slp::{slp_minimize, LinearMatrix, SlpOptions};
use xagmc::strategies::{
    degree_lower_bound, enumerate_optimum, find_mc, minimize, Minimized, RoundOutcome, Strategy,
    SweepLimits, SynthesisConfig, XorMode,
};
use xagmc::{AbstractXag, TruthTable};

const EXIT_ERROR: u8 = 1;
const EXIT_UNPROVEN: u8 = 2;
const EXIT_MISMATCH: u8 = 3;

#[derive(Parser)]
#[command(name = "xagmc", version, about = "Exact multiplicative complexity synthesis of XOR-AND graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize one function given as a hex truth table.
    Mc {
        hex: String,
        #[arg(long)]
        vars: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Format::Netlist)]
        format: Format,
    },
    /// Synthesize every hex truth table in a file, one per line.
    Batch {
        file: PathBuf,
        #[arg(long)]
        vars: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Format::Netlist)]
        format: Format,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Check the embedded table of optimum XAGs for the 48 affine classes
    /// of 5-variable functions.
    VerifyTable {
        #[command(flatten)]
        run: RunArgs,
        /// Only these class ids.
        #[arg(long, value_delimiter = ',')]
        classes: Vec<usize>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Shortest linear program for a matrix file (`m n`, then m rows of n bits).
    Slp {
        file: PathBuf,
        #[arg(long)]
        cancellation_free: bool,
        /// Treat the matrix as extracted from an abstract XAG and forbid
        /// cyclic dependencies on AND outputs.
        #[arg(long)]
        ordering: bool,
        #[arg(long, env = "XAGMC_LINEAR_CONFLICTS", default_value_t = 500_000)]
        conflict_limit: u32,
    },
    /// List optimum XAGs of one function.
    Enumerate {
        hex: String,
        #[arg(long)]
        vars: Option<usize>,
        #[command(flatten)]
        run: RunArgs,
        /// Print only the solution with the fewest XOR gates.
        #[arg(long)]
        best_xor: bool,
    },
    /// Write the CNF of the decision instance with `steps` AND gates.
    Dimacs {
        hex: String,
        #[arg(long)]
        vars: Option<usize>,
        #[arg(long)]
        steps: usize,
        /// Also write the structure-variable map here.
        #[arg(long)]
        map: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        disable: Vec<Family>,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Experiment preset; explicit flags override it.
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    #[arg(long, value_enum)]
    xor: Option<XorArg>,
    /// Optima considered by the XOR modes.
    #[arg(long, default_value_t = 50)]
    limit: usize,
    #[arg(long, env = "XAGMC_ABSTRACT_CONFLICTS", default_value_t = 50_000)]
    abstract_conflicts: u32,
    #[arg(long, env = "XAGMC_LINEAR_CONFLICTS", default_value_t = 500_000)]
    linear_conflicts: u32,
    /// Conflict budget for the MC sweep itself (unlimited if absent).
    #[arg(long)]
    sweep_conflicts: Option<u32>,
    #[arg(long)]
    r_low: Option<usize>,
    #[arg(long)]
    r_high: Option<usize>,
    /// Constraint families to turn off.
    #[arg(long, value_delimiter = ',')]
    disable: Vec<Family>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Run1,
    Run2,
    Run3,
    Run4,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Direct,
    Cegar,
}

#[derive(Clone, Copy, ValueEnum)]
enum XorArg {
    None,
    Enumerate,
    Heuristic,
    #[value(name = "heuristic+sat")]
    HeuristicSat,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Nonconstant,
    Commutativity,
    Symmetric,
    AllUsed,
    SubsetFree,
    Multilevel,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Netlist,
    Dot,
    JsonLines,
}

fn options_without(disable: &[Family]) -> EncodingOptions {
    let mut opts = EncodingOptions::all();
    for f in disable {
        let family = match f {
            Family::Nonconstant => ConstraintFamily::NonconstantFanin,
            Family::Commutativity => ConstraintFamily::Commutativity,
            Family::Symmetric => ConstraintFamily::SymmetricVariables,
            Family::AllUsed => ConstraintFamily::AllUsed,
            Family::SubsetFree => ConstraintFamily::SubsetFree,
            Family::Multilevel => ConstraintFamily::MultilevelSubset,
            Family::All => {
                opts = EncodingOptions::none();
                continue;
            }
        };
        opts = opts.with(family, false);
    }
    opts
}

impl RunArgs {
    fn config(&self) -> SynthesisConfig {
        let mut cfg = match self.preset {
            Some(Preset::Run2) => SynthesisConfig::run2(),
            Some(Preset::Run3) => SynthesisConfig::run3(),
            Some(Preset::Run4) => SynthesisConfig::run4(),
            Some(Preset::Run1) | None => SynthesisConfig::run1(),
        };
        if let Some(s) = self.strategy {
            cfg.strategy = match s {
                StrategyArg::Direct => Strategy::Direct,
                StrategyArg::Cegar => Strategy::Cegar,
            };
        }
        if let Some(x) = self.xor {
            cfg.xor_mode = match x {
                XorArg::None => XorMode::None,
                XorArg::Enumerate => XorMode::Enumerate,
                XorArg::Heuristic => XorMode::Heuristic,
                XorArg::HeuristicSat => XorMode::HeuristicSat,
            };
        }
        cfg.options = options_without(&self.disable);
        cfg.enumeration_limit = self.limit;
        cfg.abstract_conflict_limit = Some(self.abstract_conflicts);
        cfg.linear_conflict_limit = Some(self.linear_conflicts);
        cfg.sweep_conflict_limit = self.sweep_conflicts;
        cfg.r_low = self.r_low;
        cfg.r_high = self.r_high;
        cfg
    }
}

/// Parses a hex truth table, inferring the variable count from its length.
fn parse_function(hex: &str, vars: Option<usize>) -> Result<TruthTable, String> {
    let digits = hex.trim().trim_start_matches("0x").trim_start_matches("0X");
    let n = match vars {
        Some(n) => n,
        None if digits.len() == 1 => {
            return Err(format!("{hex}: one hex digit fits 1 or 2 variables; pass --vars"))
        }
        None => TruthTable::vars_for_digits(digits.len())
            .ok_or_else(|| format!("{hex}: {} hex digits is not a truth-table length", digits.len()))?,
    };
    TruthTable::from_hex(digits, n).map_err(|e| format!("{hex}: {e}"))
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    hex: &'a str,
    vars: usize,
    mc: usize,
    xor: usize,
    status: &'static str,
    millis: u128,
}

fn status_word(m: &Minimized) -> &'static str {
    if m.result.is_proven() {
        "proven"
    } else {
        "upper-bound"
    }
}

fn print_result(out: &mut impl Write, f: &TruthTable, m: &Minimized, millis: u128, format: Format) -> io::Result<()> {
    match format {
        Format::Netlist => {
            writeln!(out, "# MC = {}", m.mc())?;
            writeln!(out, "# XOR = {}", m.xor_count())?;
            writeln!(out, "# status = {}", status_word(m))?;
            for r in &m.result.rounds {
                writeln!(
                    out,
                    "# r = {}: {} ({} assignments, {} solves, {} ms)",
                    r.r,
                    round_word(r.outcome),
                    r.constrained,
                    r.solve_calls,
                    r.elapsed.as_millis()
                )?;
            }
            write!(out, "{}", m.network.to_netlist())
        }
        Format::Dot => {
            writeln!(out, "// MC = {} ({}), XOR = {}", m.mc(), status_word(m), m.xor_count())?;
            write!(out, "{}", m.network.to_dot())
        }
        Format::JsonLines => {
            let rec = JsonRecord {
                hex: &f.to_hex(),
                vars: f.num_vars(),
                mc: m.mc(),
                xor: m.xor_count(),
                status: status_word(m),
                millis,
            };
            writeln!(out, "{}", serde_json::to_string(&rec).unwrap())
        }
    }
}

fn round_word(o: RoundOutcome) -> &'static str {
    match o {
        RoundOutcome::Sat => "sat",
        RoundOutcome::Unsat => "unsat",
        RoundOutcome::Limit => "limit",
    }
}

fn thread_pool(jobs: Option<usize>) -> rayon::ThreadPool {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        b = b.num_threads(j);
    }
    b.build().expect("thread pool")
}

fn cmd_mc(hex: &str, vars: Option<usize>, run: &RunArgs, format: Format) -> Result<u8, String> {
    let f = parse_function(hex, vars)?;
    let start = Instant::now();
    let m = minimize(&f, &run.config()).map_err(|e| e.to_string())?;
    let mut out = io::stdout().lock();
    print_result(&mut out, &f, &m, start.elapsed().as_millis(), format).map_err(|e| e.to_string())?;
    Ok(if m.result.is_proven() { 0 } else { EXIT_UNPROVEN })
}

enum BatchLine {
    Done { f: TruthTable, m: Minimized, millis: u128 },
    Failed { input: String, error: String },
}

fn cmd_batch(file: &PathBuf, vars: Option<usize>, run: &RunArgs, format: Format, jobs: Option<usize>) -> Result<u8, String> {
    let text = fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let inputs: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let cfg = run.config();
    let results: Vec<BatchLine> = thread_pool(jobs).install(|| {
        inputs
            .par_iter()
            .map(|&input| {
                let start = Instant::now();
                match parse_function(input, vars).and_then(|f| minimize(&f, &cfg).map(|m| (f, m)).map_err(|e| e.to_string())) {
                    Ok((f, m)) => BatchLine::Done {
                        f,
                        m,
                        millis: start.elapsed().as_millis(),
                    },
                    Err(error) => BatchLine::Failed {
                        input: input.to_string(),
                        error,
                    },
                }
            })
            .collect()
    });
    let mut out = io::stdout().lock();
    let (mut ands, mut xors, mut errors, mut unproven) = (0, 0, 0, 0);
    for r in &results {
        let res = match r {
            BatchLine::Done { f, m, millis } => {
                ands += m.mc();
                xors += m.xor_count();
                if !m.result.is_proven() {
                    unproven += 1;
                }
                match format {
                    Format::JsonLines => print_result(&mut out, f, m, *millis, format),
                    _ => writeln!(
                        out,
                        "{} mc={} xor={} {} {}ms",
                        f.to_hex(),
                        m.mc(),
                        m.xor_count(),
                        status_word(m),
                        millis
                    ),
                }
            }
            BatchLine::Failed { input, error } => {
                errors += 1;
                match format {
                    Format::JsonLines => writeln!(
                        out,
                        "{}",
                        serde_json::json!({ "input": input, "error": error })
                    ),
                    _ => writeln!(out, "{input} error: {error}"),
                }
            }
        };
        res.map_err(|e| e.to_string())?;
    }
    let done = results.len() - errors;
    let summary = match format {
        Format::JsonLines => serde_json::json!({
            "functions": done, "and": ands, "xor": xors, "errors": errors, "unproven": unproven
        })
        .to_string(),
        _ => format!("total: {done} functions, AND {ands}, XOR {xors}, {errors} errors, {unproven} unproven"),
    };
    writeln!(out, "{summary}").map_err(|e| e.to_string())?;
    Ok(if errors > 0 {
        EXIT_ERROR
    } else if unproven > 0 {
        EXIT_UNPROVEN
    } else {
        0
    })
}

struct Verdict {
    netlist_ok: bool,
    mc: Option<usize>,
    /// Whether `r = MC - 1` is UNSAT; `None` for MC 0.
    unsat_below: Option<bool>,
    error: Option<String>,
}

fn verify_entry(e: &ClassTableEntry, cfg: &SynthesisConfig) -> Verdict {
    let netlist_ok = e.simulate().map(|t| t == e.function).unwrap_or(false);
    let m = match minimize(&e.function, cfg) {
        Ok(m) => m,
        Err(err) => {
            return Verdict {
                netlist_ok,
                mc: None,
                unsat_below: None,
                error: Some(err.to_string()),
            }
        }
    };
    let (f, _) = e.function.normalize();
    let unsat_below = (m.mc() >= 1).then(|| {
        let below = m.mc() - 1;
        let swept = m
            .result
            .rounds
            .iter()
            .any(|r| r.r == below && r.outcome == RoundOutcome::Unsat);
        swept || {
            McInstance::new(f, below, cfg.options)
                .and_then(|mut inst| {
                    inst.constrain_all()?;
                    Ok(inst.solve(&[]).is_unsat())
                })
                .unwrap_or(false)
        }
    });
    Verdict {
        netlist_ok,
        mc: Some(m.mc()),
        unsat_below,
        error: None,
    }
}

fn cmd_verify_table(run: &RunArgs, classes: &[usize], jobs: Option<usize>) -> Result<u8, String> {
    let cfg = run.config();
    let entries: Vec<ClassTableEntry> = affine5::table()
        .into_iter()
        .filter(|e| classes.is_empty() || classes.contains(&e.class))
        .collect();
    let verdicts: Vec<Verdict> = thread_pool(jobs).install(|| entries.par_iter().map(|e| verify_entry(e, &cfg)).collect());
    let mut out = io::stdout().lock();
    let mut passed = 0;
    for (e, v) in entries.iter().zip(&verdicts) {
        let mc_ok = v.mc == Some(e.mc);
        let unsat_ok = v.unsat_below.unwrap_or(true);
        let ok = v.netlist_ok && mc_ok && unsat_ok;
        passed += usize::from(ok);
        let mc_text = v.mc.map_or("-".to_string(), |m| m.to_string());
        let unsat_text = match v.unsat_below {
            None => "n/a",
            Some(true) => "ok",
            Some(false) => "FAIL",
        };
        writeln!(
            out,
            "class {:2} {} netlist {} mc {}/{} unsat {}{}{}",
            e.class,
            e.function,
            if v.netlist_ok { "ok" } else { "FAIL" },
            mc_text,
            e.mc,
            unsat_text,
            if ok { "" } else { "  MISMATCH" },
            v.error.as_ref().map_or(String::new(), |s| format!(" ({s})")),
        )
        .map_err(|e| e.to_string())?;
    }
    writeln!(out, "{passed}/{} passed", entries.len()).map_err(|e| e.to_string())?;
    Ok(if passed == entries.len() { 0 } else { EXIT_MISMATCH })
}

fn cmd_slp(file: &PathBuf, cancellation_free: bool, ordering: bool, limit: u32) -> Result<u8, String> {
    let text = fs::read_to_string(file).map_err(|e| format!("{}: {e}", file.display()))?;
    let matrix: LinearMatrix = text.parse().map_err(|e| format!("{}: {e}", file.display()))?;
    let opts = SlpOptions {
        ordering,
        cancellation_free,
    };
    let res = slp_minimize(&matrix, opts, Some(limit)).map_err(|e| e.to_string())?;
    let mut out = io::stdout().lock();
    writeln!(out, "steps = {}", res.network.num_steps()).map_err(|e| e.to_string())?;
    writeln!(out, "status = {}", if res.proven { "proven" } else { "upper-bound" }).map_err(|e| e.to_string())?;
    write!(out, "{}", res.network).map_err(|e| e.to_string())?;
    Ok(if res.proven { 0 } else { EXIT_UNPROVEN })
}

fn cmd_enumerate(hex: &str, vars: Option<usize>, run: &RunArgs, best_xor: bool) -> Result<u8, String> {
    let raw = parse_function(hex, vars)?;
    let cfg = run.config();
    let mut out = io::stdout().lock();
    if matches!(cfg.xor_mode, XorMode::Heuristic | XorMode::HeuristicSat) {
        let start = Instant::now();
        let m = minimize(&raw, &cfg).map_err(|e| e.to_string())?;
        print_result(&mut out, &raw, &m, start.elapsed().as_millis(), Format::Netlist).map_err(|e| e.to_string())?;
        return Ok(if m.result.is_proven() { 0 } else { EXIT_UNPROVEN });
    }
    let (f, inverted) = raw.normalize();
    let r_low = cfg.r_low.unwrap_or_else(|| degree_lower_bound(&f));
    let limits = SweepLimits {
        conflict_limit: cfg.sweep_conflict_limit,
        r_high: cfg.r_high,
    };
    let res = find_mc(&f, r_low, &cfg.options, cfg.strategy, limits).map_err(|e| e.to_string())?;
    let e = enumerate_optimum(&f, res.mc, cfg.enumeration_limit.max(1), &cfg.options, cfg.abstract_conflict_limit)
        .map_err(|e| e.to_string())?;
    let mut sols: Vec<AbstractXag> = e.solutions;
    for s in &mut sols {
        s.set_output_inverted(inverted);
    }
    let w = |out: &mut io::StdoutLock, s: String| write!(out, "{s}").map_err(|e| e.to_string());
    w(&mut out, format!("# MC = {}\n# solutions = {}{}\n", res.mc, sols.len(), if e.exhausted { " (all)" } else { "" }))?;
    if best_xor {
        let best = sols.iter().min_by_key(|s| s.xor_cost()).ok_or("no solution")?;
        let x = best.to_xag().or_else(|_| best.prune_linear_steps().to_xag()).map_err(|e| e.to_string())?;
        w(&mut out, format!("# XOR = {}\n{}", x.xor_count(), x.to_netlist()))?;
    } else {
        for (i, s) in sols.iter().enumerate() {
            w(&mut out, format!("# solution {} (xor cost {})\n{s}\n", i + 1, s.xor_cost()))?;
        }
    }
    Ok(if res.is_proven() { 0 } else { EXIT_UNPROVEN })
}

fn cmd_dimacs(hex: &str, vars: Option<usize>, steps: usize, map: Option<&PathBuf>, disable: &[Family]) -> Result<u8, String> {
    let (f, _) = parse_function(hex, vars)?.normalize();
    let mut inst = McInstance::new(f, steps, options_without(disable)).map_err(|e| e.to_string())?;
    inst.constrain_all().map_err(|e| e.to_string())?;
    if let Some(p) = map {
        fs::write(p, inst.variable_map()).map_err(|e| format!("{}: {e}", p.display()))?;
    }
    write!(io::stdout().lock(), "{}", inst.to_dimacs()).map_err(|e| e.to_string())?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Mc { hex, vars, run, format } => cmd_mc(hex, *vars, run, *format),
        Command::Batch {
            file,
            vars,
            run,
            format,
            jobs,
        } => cmd_batch(file, *vars, run, *format, *jobs),
        Command::VerifyTable { run, classes, jobs } => cmd_verify_table(run, classes, *jobs),
        Command::Slp {
            file,
            cancellation_free,
            ordering,
            conflict_limit,
        } => cmd_slp(file, *cancellation_free, *ordering, *conflict_limit),
        Command::Enumerate {
            hex,
            vars,
            run,
            best_xor,
        } => cmd_enumerate(hex, *vars, run, *best_xor),
        Command::Dimacs {
            hex,
            vars,
            steps,
            map,
            disable,
        } => cmd_dimacs(hex, *vars, *steps, map.as_ref(), disable),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
