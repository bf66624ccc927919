use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ylab_core::analysis::{find_crossings, loop_rate_experiment, LoopRateReport};
use ylab_core::branching::{enumerate_runs, BranchReport, EnumerateOptions, DEFAULT_MAX_NODES};
use ylab_core::formats::{
    emit_native, emit_tour_json, emit_tsplib, emit_tsplib_tour, parse_instance, parse_tour, TourFile, TraceDocument,
};
use ylab_core::generators::{fixture, gen_grid, gen_random_uniform, validated_fixture, FIXTURE_NAMES};
use ylab_core::heuristic::{inverse_correspondence, run_adding};
use ylab_core::instance::{tour_length, validate_tour};
use ylab_core::oracle::{gap, optimal};
use ylab_core::svg::render_svg;
use ylab_core::{Instance, Variant, DEFAULT_EPS};

/// Exit status classes.
enum Failure {
    /// The checked tour is invalid.
    Verification(anyhow::Error),
    /// Unreadable or malformed input.
    Input(anyhow::Error),
    /// The solver or an output write failed.
    Internal(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Input(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Verification(e) | Failure::Input(e) | Failure::Internal(e) => e,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn input<T>(r: anyhow::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Input)
}

fn internal<T>(r: anyhow::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Internal)
}

#[derive(Parser)]
#[command(name = "ylab", version, about = "Max-min / min-min insertion counterexamples for the TSP")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the adding procedure and write the resulting tour.
    Solve(SolveArgs),
    /// Enumerate every tie resolution and report the branch counts.
    Enumerate(EnumerateArgs),
    /// Check a tour: validity, length, crossings, optional optimality gap.
    Verify(VerifyArgs),
    /// Loop-rate experiment on uniform random instances; writes CSV.
    Experiment(ExperimentArgs),
    /// Write a fixture, grid or random instance.
    Generate(GenerateArgs),
    /// Compare the cut order of the optimum with both adding orders.
    Correspond(CorrespondArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = VariantArg::Maxmin)]
    variant: VariantArg,
    /// Tie tolerance on disturbance values.
    #[arg(long, env = "YLAB_EPS", default_value_t = DEFAULT_EPS)]
    eps: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Maxmin,
    Minmin,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Maxmin => Variant::MaxMin,
            VariantArg::Minmin => Variant::MinMin,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TourFormat {
    Json,
    Tsplib,
}

#[derive(Clone, Copy, ValueEnum)]
enum InstanceFormat {
    Native,
    Tsplib,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[command(flatten)]
    common: Common,
    /// Tour output path; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TourFormat::Json)]
    format: TourFormat,
    /// Write the run trace as JSON.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write an SVG drawing of the tour.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct EnumerateArgs {
    instance: PathBuf,
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = DEFAULT_MAX_NODES)]
    max_nodes: usize,
    #[arg(long)]
    max_depth: Option<usize>,
    /// Merge partial routes equal up to rotation and reflection.
    #[arg(long)]
    dedup: bool,
    /// Write the branch report as JSON ("-" for standard output instead of the table).
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    tour: PathBuf,
    /// Compute the exact optimum (at most 20 points) and report the gap.
    #[arg(long)]
    oracle: bool,
    /// Report the gap against a published optimal length.
    #[arg(long)]
    known_optimal: Option<f64>,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Instance sizes, comma separated.
    #[arg(long = "n", value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    common: Common,
    /// CSV output path; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// A fixture name, `grid K`, or `random N SEED`.
    #[arg(required = true, num_args = 1..=3)]
    what: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = InstanceFormat::Native)]
    format: InstanceFormat,
}

#[derive(Args)]
struct CorrespondArgs {
    instance: PathBuf,
    #[arg(long, env = "YLAB_EPS", default_value_t = DEFAULT_EPS)]
    eps: f64,
}

fn read_instance(path: &Path) -> Result<Instance, Failure> {
    let text = input(fs::read_to_string(path).with_context(|| format!("reading {}", path.display())))?;
    input(parse_instance(&text).with_context(|| format!("parsing {}", path.display())))
}

fn write_output(path: Option<&Path>, text: &str) -> CmdResult {
    internal(match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing standard output"),
    })
}

fn solve(args: SolveArgs) -> CmdResult {
    let inst = read_instance(&args.instance)?;
    let variant = args.common.variant.into();
    let run = internal(run_adding(&inst, variant, args.common.eps).map_err(Into::into))?;
    if run.initial_pair.is_tie() || run.initial_third.is_tie() {
        eprintln!(
            "warning: initial route is tied ({} farthest pairs, {} third points); taking the first of each",
            run.initial_pair.len(),
            run.initial_third.len()
        );
    }
    let tied_steps = run.steps.iter().filter(|s| s.is_tie()).count();
    if tied_steps > 0 {
        eprintln!("warning: {tied_steps} insertion steps were tied; lowest edge position, then lowest id taken");
    }
    let text = match args.format {
        TourFormat::Json => emit_tour_json(&TourFile {
            instance_name: inst.name().to_string(),
            order: run.final_tour.order().to_vec(),
            length: run.final_length,
        }),
        TourFormat::Tsplib => emit_tsplib_tour(inst.name(), &run.final_tour),
    };
    write_output(args.out.as_deref(), &text)?;
    if let Some(svg_path) = &args.svg {
        let crossings = internal(find_crossings(&inst, &run.final_tour).map_err(Into::into))?;
        let svg = internal(render_svg(&inst, &run.final_tour, &crossings).map_err(Into::into))?;
        write_output(Some(svg_path), &svg)?;
    }
    if let Some(trace_path) = &args.trace {
        write_output(Some(trace_path), &TraceDocument::new(&inst, run).to_json())?;
    }
    Ok(())
}

fn branch_table(r: &BranchReport) -> String {
    let mut s = format!("variant {}  n {}  eps {:e}\n", r.variant, r.n, r.eps);
    s += "depth  nodes\n";
    for (d, c) in r.nodes_per_depth.iter().enumerate() {
        s += &format!("{d:>5}  {c}\n");
    }
    s += &format!("root branches          {}\n", r.root_branches());
    s += &format!("total nodes            {}\n", r.total_nodes);
    s += &format!("leaves                 {}\n", r.leaves);
    s += &format!("distinct final tours   {}\n", r.distinct_final_tours);
    if let (Some(b), Some(w)) = (r.best_final_length, r.worst_final_length) {
        s += &format!("final length range     {b} .. {w}\n");
    }
    s += &format!("dedup                  {} ({} hits)\n", if r.dedup_enabled { "on" } else { "off" }, r.dedup_hits);
    s += &format!("truncated              {}\n", r.truncated);
    s
}

fn enumerate(args: EnumerateArgs) -> CmdResult {
    let inst = read_instance(&args.instance)?;
    let opts = EnumerateOptions {
        max_nodes: args.max_nodes,
        max_depth: args.max_depth,
        dedup: args.dedup,
        record_leaves: false,
    };
    let e = internal(enumerate_runs(&inst, args.common.variant.into(), args.common.eps, opts).map_err(Into::into))?;
    let json = serde_json::to_string_pretty(&e.report).expect("report serializes") + "\n";
    match args.json.as_deref() {
        Some(p) if p == Path::new("-") => write_output(None, &json),
        Some(p) => {
            write_output(None, &branch_table(&e.report))?;
            write_output(Some(p), &json)
        }
        None => write_output(None, &branch_table(&e.report)),
    }
}

#[derive(Serialize)]
struct VerifyReport {
    instance_name: String,
    valid: bool,
    violations: Vec<String>,
    length: Option<f64>,
    crossings: Option<usize>,
    optimal_length: Option<f64>,
    gap: Option<f64>,
}

fn verify(args: VerifyArgs) -> CmdResult {
    let inst = read_instance(&args.instance)?;
    let text = input(fs::read_to_string(&args.tour).with_context(|| format!("reading {}", args.tour.display())))?;
    let (_, tour) = input(parse_tour(&text).with_context(|| format!("parsing {}", args.tour.display())))?;
    let mut rep = VerifyReport {
        instance_name: inst.name().to_string(),
        valid: true,
        violations: Vec::new(),
        length: None,
        crossings: None,
        optimal_length: None,
        gap: None,
    };
    if let Err(v) = validate_tour(&inst, &tour, true) {
        rep.valid = false;
        rep.violations = v.iter().map(ToString::to_string).collect();
    } else {
        let length = tour_length(&inst, &tour).expect("validated");
        rep.length = Some(length);
        rep.crossings = inst.coords().map(|_| find_crossings(&inst, &tour).map(|c| c.len()).expect("validated"));
        let reference = if args.oracle {
            Some(internal(optimal(&inst).map_err(Into::into))?.length)
        } else {
            args.known_optimal
        };
        if let Some(opt) = reference {
            rep.optimal_length = Some(opt);
            rep.gap = Some(internal(gap(length, opt).map_err(Into::into))?);
        }
    }
    let out = if args.json {
        serde_json::to_string_pretty(&rep).expect("report serializes") + "\n"
    } else {
        let mut s = format!("instance   {}\nvalid      {}\n", rep.instance_name, rep.valid);
        for v in &rep.violations {
            s += &format!("violation  {v}\n");
        }
        if let Some(l) = rep.length {
            s += &format!("length     {l}\n");
        }
        match rep.crossings {
            Some(c) => s += &format!("crossings  {c}\n"),
            None if rep.valid => s += "crossings  n/a (no coordinates)\n",
            None => {}
        }
        if let (Some(o), Some(g)) = (rep.optimal_length, rep.gap) {
            s += &format!("optimal    {o}\ngap        {g}\n");
        }
        s
    };
    write_output(None, &out)?;
    if rep.valid {
        Ok(())
    } else {
        Err(Failure::Verification(anyhow!("tour is not a valid complete tour")))
    }
}

fn experiment_csv(reports: &[LoopRateReport]) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "trials", "with_crossings", "rate", "mean_uncross_improvement", "seed"])?;
    for r in reports {
        w.write_record([
            r.n.to_string(),
            r.trials.to_string(),
            r.with_crossings.to_string(),
            r.rate.to_string(),
            r.mean_uncross_improvement.to_string(),
            r.seed.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn experiment(args: ExperimentArgs) -> CmdResult {
    if args.trials == 0 {
        return Err(Failure::Input(anyhow!("--trials must be at least 1")));
    }
    if let Some(&n) = args.sizes.iter().find(|&&n| n < 3) {
        return Err(Failure::Input(anyhow!("instance size {n} is below 3")));
    }
    let mut reports = Vec::new();
    for &n in &args.sizes {
        let r = internal(
            loop_rate_experiment(n, args.trials, args.common.variant.into(), args.seed, args.common.eps)
                .map_err(Into::into),
        )?;
        eprintln!("n {n}: {}/{} tours cross themselves", r.with_crossings, r.trials);
        reports.push(r);
    }
    let csv = internal(experiment_csv(&reports))?;
    write_output(args.out.as_deref(), &csv)
}

fn generate(args: GenerateArgs) -> CmdResult {
    let what: Vec<&str> = args.what.iter().map(String::as_str).collect();
    let number = |s: &str, what: &str| -> Result<u64, Failure> {
        s.parse().map_err(|_| Failure::Input(anyhow!("{what} must be a non-negative integer, got `{s}`")))
    };
    let inst = match what.as_slice() {
        ["grid", k] => input(gen_grid(number(k, "grid side")? as usize).map_err(Into::into))?,
        ["random", n, seed] => {
            input(gen_random_uniform(number(n, "point count")? as usize, number(seed, "seed")?).map_err(Into::into))?
        }
        [name] if fixture(name).is_ok() => internal(validated_fixture(name).map_err(Into::into))?,
        _ => {
            return Err(Failure::Input(anyhow!(
                "unknown instance `{}`; expected one of {}, `grid K`, `random N SEED`",
                what.join(" "),
                FIXTURE_NAMES.join(", ")
            )))
        }
    };
    let text = match args.format {
        InstanceFormat::Native => emit_native(&inst),
        InstanceFormat::Tsplib => input(emit_tsplib(&inst).map_err(Into::into))?,
    };
    write_output(args.out.as_deref(), &text)
}

fn correspond(args: CorrespondArgs) -> CmdResult {
    let inst = read_instance(&args.instance)?;
    let rep = internal(inverse_correspondence(&inst, args.eps).map_err(Into::into))?;
    write_output(None, &(serde_json::to_string_pretty(&rep).expect("report serializes") + "\n"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Verify(a) => verify(a),
        Command::Experiment(a) => experiment(a),
        Command::Generate(a) => generate(a),
        Command::Correspond(a) => correspond(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error());
            ExitCode::from(f.code())
        }
    }
}

