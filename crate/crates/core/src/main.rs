use std::error::Error;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use muxopt::aig::{self, EquivMethod, EquivVerdict};
use muxopt::json;
use muxopt::pipeline::{format_cex, optimize, PassConfig, PassKind, PipelineError};

#[derive(Parser)]
#[command(
    name = "muxopt",
    version,
    about = "Multiplexer-tree optimization for Yosys JSON netlists"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Optimize a module and write the result.
    Opt(OptArgs),
    /// Report gate-level area, optionally against a baseline.
    Stats(StatsArgs),
    /// Map a module to an and-inverter graph in ASCII AIGER form.
    Aig(AigArgs),
    /// Check two modules for combinational equivalence.
    Equiv(EquivArgs),
}

fn parse_pass(s: &str) -> Result<PassKind, String> {
    s.parse()
}

#[derive(Args)]
struct OptArgs {
    /// Input netlist (Yosys JSON).
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Output netlist path.
    #[arg(long = "out", value_name = "FILE")]
    output: PathBuf,
    /// Passes to run, in order, each round.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "classic,sat,rebuild",
        value_parser = parse_pass
    )]
    passes: Vec<PassKind>,
    /// Pruning depth for sub-graph extraction.
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Input count at or below which queries are settled by simulation.
    #[arg(long, default_value_t = 12)]
    sim_threshold: usize,
    /// Input count above which a sub-graph query is skipped.
    #[arg(long, default_value_t = 64)]
    sat_input_max: usize,
    /// Conflict budget per SAT query.
    #[arg(long = "conflicts", default_value_t = 100_000)]
    conflicts: u64,
    /// Tallest case function the rebuild pass accepts.
    #[arg(long, default_value_t = 8)]
    height_cap: usize,
    /// Skip the per-pass equivalence check.
    #[arg(long)]
    no_equiv_check: bool,
    /// Worker thread count; default lets the scheduler decide.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// Module to optimize when the design holds several.
    #[arg(long, value_name = "NAME")]
    module: Option<String>,
    /// Directory for DIMACS dumps of every SAT query.
    #[arg(long, value_name = "DIR")]
    dump_cnf: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    /// Netlist to measure (Yosys JSON).
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Unoptimized netlist to compare against.
    #[arg(long, value_name = "FILE")]
    baseline: Option<PathBuf>,
    /// Module to measure when the design holds several.
    #[arg(long, value_name = "NAME")]
    module: Option<String>,
}

#[derive(Args)]
struct AigArgs {
    /// Input netlist (Yosys JSON).
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Output AIGER path.
    #[arg(long = "out", value_name = "FILE")]
    output: PathBuf,
    /// Module to map when the design holds several.
    #[arg(long, value_name = "NAME")]
    module: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Sim,
    Sat,
}

#[derive(Args)]
struct EquivArgs {
    /// Reference netlist (Yosys JSON).
    #[arg(long, value_name = "FILE")]
    golden: PathBuf,
    /// Netlist under test (Yosys JSON).
    #[arg(long, value_name = "FILE")]
    revised: PathBuf,
    /// Force one method; default picks by joint input count.
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Joint input bound for exhaustive simulation.
    #[arg(long, default_value_t = 20)]
    max_inputs: usize,
    /// Module to compare when a design holds several.
    #[arg(long, value_name = "NAME")]
    module: Option<String>,
}

fn load(path: &PathBuf, module: Option<&str>) -> Result<json::Design, Box<dyn Error>> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Ok(json::parse_design(&text, module)?)
}

fn cmd_opt(a: OptArgs) -> Result<ExitCode, Box<dyn Error>> {
    let mut design = load(&a.input, a.module.as_deref())?;
    let cfg = PassConfig {
        passes: a.passes,
        k: a.k,
        sim_threshold: a.sim_threshold,
        sat_input_max: a.sat_input_max,
        conflict_cap: a.conflicts,
        height_cap: a.height_cap,
        check_equivalence: !a.no_equiv_check,
        jobs: a.jobs,
        dump_cnf: a.dump_cnf,
        ..PassConfig::default()
    };
    match optimize(&mut design.netlist, &cfg) {
        Ok(report) => {
            fs::write(&a.output, json::write_design(&design))
                .map_err(|e| format!("cannot write {}: {e}", a.output.display()))?;
            print!("{}", report.render());
            Ok(ExitCode::SUCCESS)
        }
        Err(e @ PipelineError::Verification { .. }) => {
            eprintln!("error: {e}");
            Ok(ExitCode::from(1))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_stats(a: StatsArgs) -> Result<ExitCode, Box<dyn Error>> {
    let design = load(&a.input, a.module.as_deref())?;
    let area = aig::area(&design.netlist)?;
    match &a.baseline {
        None => println!("area: {area}"),
        Some(path) => {
            let base_design = load(path, a.module.as_deref())?;
            let base = aig::area(&base_design.netlist)?;
            println!("baseline area: {base}");
            println!("area: {area}");
            let pct = if base == 0 {
                0.0
            } else {
                (base as f64 - area as f64) * 100.0 / base as f64
            };
            println!("reduction: {pct:.2}%");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_aig(a: AigArgs) -> Result<ExitCode, Box<dyn Error>> {
    let design = load(&a.input, a.module.as_deref())?;
    let aig = aig::map_to_aig(&design.netlist)?;
    fs::write(&a.output, aig.write_aiger())
        .map_err(|e| format!("cannot write {}: {e}", a.output.display()))?;
    println!(
        "{} inputs, {} latches, {} outputs, {} ands",
        aig.inputs.len(),
        aig.latches.len(),
        aig.outputs.len(),
        aig.area()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_equiv(a: EquivArgs) -> Result<ExitCode, Box<dyn Error>> {
    let golden = load(&a.golden, a.module.as_deref())?;
    let revised = load(&a.revised, a.module.as_deref())?;
    let method = match a.method {
        None => EquivMethod::Auto,
        Some(MethodArg::Sim) => EquivMethod::Sim,
        Some(MethodArg::Sat) => EquivMethod::Sat,
    };
    match aig::check_equiv(&golden.netlist, &revised.netlist, method, a.max_inputs)? {
        EquivVerdict::Equivalent => {
            println!("equivalent");
            Ok(ExitCode::SUCCESS)
        }
        EquivVerdict::Inequivalent(cex) => {
            println!("not equivalent: {}", format_cex(&cex));
            Ok(ExitCode::from(1))
        }
        EquivVerdict::Undecided { output } => {
            println!("undecided: {output}");
            Ok(ExitCode::from(1))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.cmd {
        Cmd::Opt(a) => cmd_opt(a),
        Cmd::Stats(a) => cmd_stats(a),
        Cmd::Aig(a) => cmd_aig(a),
        Cmd::Equiv(a) => cmd_equiv(a),
    };
    match run {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
