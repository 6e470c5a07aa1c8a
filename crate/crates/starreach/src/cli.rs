//! Command-line front end.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use starreach_core::nn::Ffnn;
use starreach_core::nncs::{falsify, ncs_reach_approx, ncs_reach_exact, ClosedLoopResult, LoopOptions, Nncs};
use starreach_core::reach::{net_reach, ReachMethod, ReachOptions, DEFAULT_STAR_BUDGET};
use starreach_core::safety::{check_with, falsify_network, SafetySpec, Status, Verdict};
use starreach_core::set::{HalfspacePolytope, Star};

use crate::error::{Error, Result};
use crate::nnet::{parse_nnet, NnetFile};
use crate::output::{method_tag, summarize_all, ReachOutput, StepSummary, VerdictJson};
use crate::parallel::{default_workers, RayonExecutor};
use crate::schema::{parse_model_json, parse_nncs_json, parse_spec_file, SpecFile};
use crate::trajectory::write_trajectory_csv;

/// Exit code for bad arguments.
pub const EXIT_USAGE: i32 = 3;
/// Exit code for unreadable or malformed input files.
pub const EXIT_INPUT: i32 = 4;
/// Exit code for failures during analysis.
pub const EXIT_ANALYSIS: i32 = 5;

#[derive(Debug, Parser)]
#[command(name = "starreach", version, about = "Reachability analysis and safety verification for ReLU networks and neural feedback loops")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a network against a safety spec.
    VerifyFfnn(RunArgs),
    /// Check a closed-loop system over `--steps` control periods.
    VerifyNncs(RunArgs),
    /// Search for a violation by simulation.
    Falsify(RunArgs),
    /// Compute reachable sets without checking a spec.
    Reach(RunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    ExactStar,
    ApproxStar,
    Zonotope,
    Absdom,
}

impl From<MethodArg> for ReachMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::ExactStar => ReachMethod::ExactStar,
            MethodArg::ApproxStar => ReachMethod::ApproxStar,
            MethodArg::Zonotope => ReachMethod::Zonotope,
            MethodArg::Absdom => ReachMethod::AbstractDomain,
        }
    }
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    /// Network file (`.nnet` or JSON). For closed loops, the controller.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Spec JSON: input (or initial) set and unsafe region.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    /// Plant JSON, or a closed-loop JSON with plant, controller and spec.
    #[arg(long)]
    pub plant: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = MethodArg::ExactStar)]
    pub method: MethodArg,
    /// Control periods to analyse.
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    /// Worker threads; defaults to the available cores.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Simulation trials for the falsifier; 0 disables the automatic
    /// falsifier after an inconclusive closed-loop check.
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = DEFAULT_STAR_BUDGET)]
    pub star_budget: usize,
    /// Map the spec from raw to normalized network coordinates (NNet only).
    #[arg(long)]
    pub normalize_input: bool,
    /// Add 2-D projection polygons over coordinates `i,j`.
    #[arg(long, value_name = "I,J", num_args = 0..=1, default_missing_value = "0,1", value_parser = parse_dims)]
    pub emit_polygons: Option<(usize, usize)>,
    /// Stop closed-loop reach at the first step meeting the unsafe region.
    #[arg(long)]
    pub early_exit: bool,
    /// Result file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected `i,j`, got `{s}`"))?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
    Ok((p(a)?, p(b)?))
}

/// Outcome of a run: the result file and the process exit code.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub output: ReachOutput,
    pub exit_code: i32,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn require<'a>(p: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    p.as_deref().ok_or_else(|| Error::Usage(format!("{flag} is required for this command")))
}

struct Model {
    net: Ffnn,
    nnet: Option<NnetFile>,
}

fn load_model(path: &Path) -> Result<Model> {
    let text = read(path)?;
    let with_path = |e: Error| match e {
        Error::Schema { path: p, message } => Error::Schema { path: format!("{}: {p}", path.display()), message },
        Error::Parse { line, message } => Error::Parse { line, message: format!("{}: {message}", path.display()) },
        other => other,
    };
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("nnet")) {
        let f = parse_nnet(&text).map_err(with_path)?;
        Ok(Model { net: f.network.clone(), nnet: Some(f) })
    } else {
        Ok(Model { net: parse_model_json(&text).map_err(with_path)?, nnet: None })
    }
}

fn load_spec(path: &Path) -> Result<SpecFile> {
    parse_spec_file(&read(path)?).map_err(|e| match e {
        Error::Schema { path: p, message } => Error::Schema { path: format!("{}: {p}", path.display()), message },
        other => other,
    })
}

fn normalize(args: &RunArgs, model: &Model, spec: SpecFile) -> Result<SpecFile> {
    if !args.normalize_input {
        return Ok(spec);
    }
    let f = model.nnet.as_ref().ok_or_else(|| Error::Usage("--normalize-input needs an NNet model".into()))?;
    Ok(SpecFile {
        description: spec.description,
        input: f.normalize_input(&spec.input)?,
        unsafe_region: spec.unsafe_region.map(|r| f.normalize_output_region(&r)).transpose()?,
    })
}

fn executor(args: &RunArgs) -> Result<RayonExecutor> {
    match args.workers {
        Some(0) => Err(Error::Usage("--workers must be at least 1".into())),
        w => RayonExecutor::new(w.unwrap_or_else(default_workers)),
    }
}

fn reach_options(args: &RunArgs) -> ReachOptions {
    ReachOptions { star_budget: args.star_budget, ..ReachOptions::default() }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn exit_for(v: &Verdict) -> i32 {
    v.status.exit_code()
}

/// Budget exhaustion and solver trouble leave the question open rather than
/// aborting the run.
fn inconclusive(e: &starreach_core::Error) -> Option<Verdict> {
    match e {
        starreach_core::Error::StarBudgetExceeded(_) | starreach_core::Error::NumericalFailure(_) => {
            Some(Verdict::unknown(e.to_string()))
        }
        _ => None,
    }
}

fn run_ffnn(args: &RunArgs, check: bool, start: Instant) -> Result<RunOutcome> {
    let model = load_model(require(&args.model, "--model")?)?;
    let spec = normalize(args, &model, load_spec(require(&args.spec, "--spec")?)?)?;
    let method = ReachMethod::from(args.method);
    let exec = executor(args)?;
    let opts = reach_options(args);
    let mut output = ReachOutput {
        command: if check { "verify-ffnn" } else { "reach" }.into(),
        method: method_tag(method).into(),
        verdict: None,
        sets: vec![],
        steps: vec![],
        lp_count: 0,
        elapsed_ms: 0.0,
    };
    let safety = if check { Some(spec.clone().into_safety_spec()?) } else { None };
    let verdict = match net_reach(&model.net, &spec.input, method, &opts, &exec) {
        Ok(mut r) => {
            r.canonicalize();
            output.lp_count = r.lp_count;
            output.sets = summarize_all(&r.sets, args.emit_polygons)?;
            safety.as_ref().map(|s| check_with(&model.net, &r, s, &opts.lp)).transpose()?
        }
        Err(e) => match inconclusive(&e) {
            Some(v) if check => Some(v),
            _ => return Err(e.into()),
        },
    };
    output.elapsed_ms = elapsed_ms(start);
    let exit_code = verdict.as_ref().map_or(0, exit_for);
    output.verdict = verdict.as_ref().map(VerdictJson::from);
    Ok(RunOutcome { output, exit_code })
}

struct LoopSetup {
    sys: Nncs,
    x0: Star,
    region: Option<HalfspacePolytope>,
}

fn load_loop(args: &RunArgs) -> Result<LoopSetup> {
    let controller = args.model.as_deref().map(load_model).transpose()?.map(|m| m.net);
    let path = require(&args.plant, "--plant")?;
    let file = parse_nncs_json(&read(path)?, controller).map_err(|e| match e {
        Error::Schema { path: p, message } => Error::Schema { path: format!("{}: {p}", path.display()), message },
        other => other,
    })?;
    let spec = match &args.spec {
        Some(p) => load_spec(p)?,
        None => file.spec.ok_or_else(|| Error::Usage("--spec is required when the plant file has no spec".into()))?,
    };
    if args.normalize_input {
        return Err(Error::Usage("--normalize-input applies to network commands only".into()));
    }
    if args.steps == 0 {
        return Err(Error::Usage("--steps must be at least 1 for closed-loop commands".into()));
    }
    Ok(LoopSetup { sys: file.system, x0: spec.input, region: spec.unsafe_region })
}

fn loop_steps(sys: &Nncs, r: &ClosedLoopResult, dims: Option<(usize, usize)>) -> Result<Vec<StepSummary>> {
    let period = sys.control_period();
    let mut steps = Vec::with_capacity(r.state_sets.len());
    for (k, sets) in r.state_sets.iter().enumerate() {
        let controls = r.control_sets.get(k).map(|c| summarize_all(c, None)).transpose()?.unwrap_or_default();
        steps.push(StepSummary { k, t: k as f64 * period, sets: summarize_all(sets, dims)?, controls });
    }
    Ok(steps)
}

fn run_nncs(args: &RunArgs, check: bool, start: Instant) -> Result<RunOutcome> {
    let setup = load_loop(args)?;
    let region = if check {
        Some(setup.region.clone().ok_or_else(|| Error::Usage("the spec has no unsafe region".into()))?)
    } else {
        None
    };
    let method = ReachMethod::from(args.method);
    if !matches!(method, ReachMethod::ExactStar | ReachMethod::ApproxStar) {
        return Err(Error::Usage("closed-loop commands support --method exact-star or approx-star".into()));
    }
    let exec = executor(args)?;
    let opts = LoopOptions { reach: reach_options(args), early_exit: args.early_exit };
    let mut output = ReachOutput {
        command: if check { "verify-nncs" } else { "reach" }.into(),
        method: method_tag(method).into(),
        verdict: None,
        sets: vec![],
        steps: vec![],
        lp_count: 0,
        elapsed_ms: 0.0,
    };
    let run = if setup.sys.plant().as_linear().is_none() {
        Err(starreach_core::Error::InvalidModel("set-based closed-loop reach needs a discrete linear plant".into()))
    } else if method.is_exact() {
        ncs_reach_exact(&setup.sys, &setup.x0, args.steps, region.as_ref(), &opts, &exec)
    } else {
        ncs_reach_approx(&setup.sys, &setup.x0, args.steps, region.as_ref(), &opts)
    };
    let mut verdict = match run {
        Ok(r) => {
            output.lp_count = r.lp_count;
            output.steps = loop_steps(&setup.sys, &r, args.emit_polygons)?;
            r.verdict
        }
        Err(e) if check => match (inconclusive(&e), e) {
            (Some(v), _) => v,
            (None, starreach_core::Error::InvalidModel(m)) => Verdict::unknown(m),
            (None, e) => return Err(e.into()),
        },
        Err(e) => return Err(e.into()),
    };
    if let Some(region) = region.as_ref().filter(|_| verdict.status == Status::Unknown && args.trials > 0) {
        let sim = falsify(&setup.sys, &setup.x0, args.steps, region, args.trials, args.seed, &exec)?;
        if sim.status == Status::Unsafe {
            verdict = sim;
        } else {
            let prior = verdict.diagnostic.take().unwrap_or_default();
            let found = sim.diagnostic.unwrap_or_default();
            verdict.diagnostic = Some(if prior.is_empty() { found } else { format!("{prior}; {found}") });
        }
    }
    output.elapsed_ms = elapsed_ms(start);
    let exit_code = if check { exit_for(&verdict) } else { 0 };
    if check {
        output.verdict = Some(VerdictJson::from(&verdict));
    }
    Ok(RunOutcome { output, exit_code })
}

fn run_falsify(args: &RunArgs, start: Instant) -> Result<RunOutcome> {
    if args.trials == 0 {
        return Err(Error::Usage("--trials must be at least 1 for falsify".into()));
    }
    let verdict = if args.plant.is_some() {
        let setup = load_loop(args)?;
        let region = setup.region.ok_or_else(|| Error::Usage("the spec has no unsafe region".into()))?;
        let exec = executor(args)?;
        falsify(&setup.sys, &setup.x0, args.steps, &region, args.trials, args.seed, &exec)?
    } else {
        let model = load_model(require(&args.model, "--model")?)?;
        let spec: SafetySpec =
            normalize(args, &model, load_spec(require(&args.spec, "--spec")?)?)?.into_safety_spec()?;
        falsify_network(&model.net, &spec, args.trials, args.seed)?
    };
    let output = ReachOutput {
        command: "falsify".into(),
        method: "simulation".into(),
        verdict: Some(VerdictJson::from(&verdict)),
        sets: vec![],
        steps: vec![],
        lp_count: 0,
        elapsed_ms: elapsed_ms(start),
    };
    Ok(RunOutcome { output, exit_code: exit_for(&verdict) })
}

/// Runs a parsed command. Writes nothing; see [`main_with_args`].
pub fn run(cli: &Cli) -> Result<RunOutcome> {
    let start = Instant::now();
    match &cli.command {
        Command::VerifyFfnn(a) => run_ffnn(a, true, start),
        Command::Reach(a) if a.plant.is_some() => run_nncs(a, false, start),
        Command::Reach(a) => run_ffnn(a, false, start),
        Command::VerifyNncs(a) => run_nncs(a, true, start),
        Command::Falsify(a) => run_falsify(a, start),
    }
}

fn args_of(cli: &Cli) -> &RunArgs {
    match &cli.command {
        Command::VerifyFfnn(a) | Command::VerifyNncs(a) | Command::Falsify(a) | Command::Reach(a) => a,
    }
}

fn error_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) => EXIT_USAGE,
        Error::Parse { .. } | Error::Shape(_) | Error::Schema { .. } | Error::Io { .. } => EXIT_INPUT,
        Error::Csv(_) | Error::Core(_) => EXIT_ANALYSIS,
    }
}

fn emit(cli: &Cli, outcome: &RunOutcome) -> Result<()> {
    let args = args_of(cli);
    let text = outcome.output.to_json();
    match &args.out {
        Some(p) => {
            std::fs::write(p, format!("{text}\n")).map_err(|e| Error::io(p, e))?;
            if let Some(t) = outcome.output.verdict.as_ref().and_then(|v| v.trace.as_ref()) {
                let csv_path = p.with_extension("csv");
                let file = std::fs::File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
                let traj = starreach_core::nncs::Trajectory {
                    times: t.times.clone(),
                    states: t.states.clone(),
                    controls: t.controls.clone(),
                };
                write_trajectory_csv(&traj, file)?;
            }
        }
        None => println!("{text}"),
    }
    Ok(())
}

/// Parses `argv`, runs the command, writes the result and returns the exit
/// code: 0 safe, 1 unsafe, 2 unknown, above 2 on error.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return error_code(&e);
        }
    };
    if let Err(e) = emit(&cli, &outcome) {
        eprintln!("error: {e}");
        return error_code(&e);
    }
    if let Some(v) = &outcome.output.verdict {
        match &v.diagnostic {
            Some(d) => eprintln!("{}: {d}", v.status),
            None => eprintln!("{}", v.status),
        }
    }
    outcome.exit_code
}
