use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use rearrange::harness::{
    library, out_dir, render_svg, run_experiment, run_trial, summarize, write_summary_csv, write_traces,
    write_trials_csv, ExperimentSpec, Scenario, SummaryRow,
};
use rearrange::physics::{parse_trace, replay};
use rearrange::planner::{PlanEvent, Perturbation, PlannerRegistry};

#[derive(Parser)]
#[command(name = "rearrange", about = "Kinodynamic rearrangement planning experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a batch of seeded trials for one planner.
    Run(RunArgs),
    /// Run every planner across perturbation intervals or reduce rates.
    Sweep(SweepArgs),
    /// Render a scenario, or the end of a trace, as SVG.
    Render(RenderArgs),
    /// Check that a scenario loads and builds (and optionally a trace replays).
    Validate(ValidateArgs),
    /// Write the built-in scenarios as TOML files.
    Export {
        #[arg(long, default_value = "scenarios")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario file, or the name of a built-in scenario.
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Planning time budget per trial in seconds.
    #[arg(long)]
    budget: Option<f64>,
    #[arg(long)]
    perturb_speed: Option<f64>,
    /// Budget clock: `sim` (deterministic, work-based) or `wall`.
    #[arg(long, default_value = "sim")]
    clock: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value = "dhrrt")]
    planner: String,
    /// Seconds of execution between perturbations; omit for none.
    #[arg(long)]
    perturb_interval: Option<f64>,
    /// Fraction of vertices kept in the planner's object model.
    #[arg(long)]
    reduce_rate: Option<f64>,
    /// Also write one execution trace per trial.
    #[arg(long)]
    trace: bool,
    /// Print emitted segments and replans to stderr.
    #[arg(long)]
    events: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated planner names; all registered planners by default.
    #[arg(long, value_delimiter = ',')]
    planner: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    perturb_interval: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    reduce_rate: Vec<f64>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    scenario: String,
    /// Trace to replay; the final state and gripper path are drawn.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, default_value = "scene.svg")]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    scenario: String,
    #[arg(long)]
    trace: Option<PathBuf>,
}

fn load_scenario(s: &str) -> Result<Scenario> {
    let p = Path::new(s);
    if p.exists() {
        return Scenario::load(p).with_context(|| format!("loading {s}"));
    }
    library::by_name(s).with_context(|| {
        format!("`{s}` is neither a file nor a built-in scenario ({})", library::NAMES.join(", "))
    })
}

fn perturbation(interval: Option<f64>, speed: Option<f64>) -> Option<Perturbation> {
    interval.map(|interval| Perturbation {
        interval,
        speed: speed.unwrap_or(0.4),
        duration: Perturbation::DEFAULT_DURATION,
    })
}

fn spec(c: &Common, planner: &str) -> Result<ExperimentSpec> {
    let mut spec = ExperimentSpec::new(load_scenario(&c.scenario)?, planner, c.trials, c.seed);
    spec.time_budget = c.budget;
    spec.clock = c.clock.clone();
    Ok(spec)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{v:.2}"))
}

fn run(a: RunArgs) -> Result<()> {
    let mut spec = spec(&a.common, &a.planner)?;
    spec.perturb = perturbation(a.perturb_interval, a.common.perturb_speed);
    spec.reduce_rate = a.reduce_rate;
    spec.record_traces = a.trace;
    let (records, summary) = if a.events {
        let mut records = Vec::new();
        for k in 0..spec.trials {
            let mut sink = |e: &PlanEvent| match e {
                PlanEvent::NodeAdded { .. } => {}
                other => eprintln!("trial {k}: {other:?}"),
            };
            records.push(run_trial(&spec, k, &mut sink)?.0);
        }
        let s = summarize(&records);
        (records, s)
    } else {
        run_experiment(&spec)?
    };
    let dir = out_dir(&a.common.out);
    std::fs::create_dir_all(&dir)?;
    let csv = dir.join("trials.csv");
    write_trials_csv(File::create(&csv)?, &records)?;
    if a.trace {
        write_traces(&dir.join("traces"), &records)?;
    }
    println!(
        "{} {}: {}/{} succeeded, time {} ± {} s, {:.2} nodes/s -> {}",
        spec.scenario.name,
        a.planner,
        summary.successes,
        summary.trials,
        fmt_opt(summary.time_mean),
        fmt_opt(summary.time_std),
        summary.nodes_per_s,
        csv.display()
    );
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    let planners = if a.planner.is_empty() {
        PlannerRegistry::default().names().iter().map(|s| s.to_string()).collect()
    } else {
        a.planner.clone()
    };
    let intervals: Vec<Option<f64>> = if a.perturb_interval.is_empty() {
        vec![None]
    } else {
        a.perturb_interval.iter().map(|&x| Some(x)).collect()
    };
    let rates: Vec<Option<f64>> = if a.reduce_rate.is_empty() {
        vec![None]
    } else {
        a.reduce_rate.iter().map(|&x| Some(x)).collect()
    };
    let mut rows = Vec::new();
    for &interval in &intervals {
        for &rate in &rates {
            for p in &planners {
                let mut spec = spec(&a.common, p)?;
                spec.perturb = perturbation(interval, a.common.perturb_speed);
                spec.reduce_rate = rate;
                let (_, summary) = run_experiment(&spec)?;
                println!(
                    "interval {:>6} rate {:>6} {:>8}: {:>2}/{} nodes/s {:.2}",
                    fmt_opt(interval),
                    fmt_opt(rate),
                    p,
                    summary.successes,
                    summary.trials,
                    summary.nodes_per_s
                );
                rows.push(SummaryRow::new(&spec.scenario.name, p, interval, rate, &summary));
            }
        }
    }
    let dir = out_dir(&a.common.out);
    std::fs::create_dir_all(&dir)?;
    let csv = dir.join("summary.csv");
    write_summary_csv(File::create(&csv)?, &rows)?;
    println!("wrote {}", csv.display());
    Ok(())
}

fn render(a: RenderArgs) -> Result<()> {
    let scenario = load_scenario(&a.scenario)?;
    let setup = scenario.build()?;
    let target = scenario.task.target();
    let (state, path) = match &a.trace {
        Some(t) => {
            let events = parse_trace(&std::fs::read_to_string(t)?)?;
            let end = replay(&setup.world, &events)?;
            let mut rec = rearrange::physics::TraceRecorder::default();
            rec.events = events;
            (end, rec.gripper_path())
        }
        None => (setup.start.clone(), Vec::new()),
    };
    let svg = render_svg(&setup.world, &state, &setup.classes, target, &path);
    std::fs::write(&a.out, svg)?;
    println!("wrote {}", a.out.display());
    Ok(())
}

fn validate(a: ValidateArgs) -> Result<()> {
    let scenario = load_scenario(&a.scenario)?;
    let setup = scenario.build()?;
    if !setup.start.valid {
        bail!("start state of `{}` is not valid", scenario.name);
    }
    println!(
        "{}: {} objects, {} obstacles, task {}, start valid, h {:.4}, goal {}",
        scenario.name,
        setup.world.object_count(),
        setup.world.obstacles.len(),
        setup.task.name(),
        setup.task.heuristic(&setup.planner_world, &setup.start),
        setup.task.goal(&setup.world, &setup.start)
    );
    if let Some(t) = &a.trace {
        let events = parse_trace(&std::fs::read_to_string(t)?)?;
        let end = replay(&setup.world, &events)?;
        println!(
            "trace replays: {} events, final state {}, goal {}",
            events.len(),
            if end.valid { "valid" } else { "invalid" },
            setup.task.goal(&setup.world, &end)
        );
    }
    Ok(())
}

fn export(out: &Path) -> Result<()> {
    std::fs::create_dir_all(out)?;
    for name in library::NAMES {
        let s = library::by_name(name).expect("listed scenario exists");
        let p = out.join(format!("{name}.toml"));
        s.save(&p)?;
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().cmd {
        Cmd::Run(a) => run(a),
        Cmd::Sweep(a) => sweep(a),
        Cmd::Render(a) => render(a),
        Cmd::Validate(a) => validate(a),
        Cmd::Export { out } => export(&out),
    }
}

