//! `carplan`: plan single scenarios, run seeded benchmarks, render trajectories.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use carplan::harness::svg::{render_svg, RenderInput, RenderOptions};
use carplan::harness::{run_bench, run_scenario, RunConfig, Scenario, TrajectoryFile};
use carplan::sweep::Zone;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "carplan", version, about = "B-spline trajectory planner for car-like vehicles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one scenario; writes trajectory.json, record.json and optionally plan.svg.
    Plan {
        scenario: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write an SVG rendering.
        #[arg(long)]
        svg: bool,
        /// Continuous-coverage zones checked, e.g. z1,z2,z3 (overrides the scenario).
        #[arg(long, value_delimiter = ',')]
        zones: Option<Vec<String>>,
        /// Draw the swept-volume discs in the SVG.
        #[arg(long)]
        discs: bool,
    },
    /// Seeded random-obstacle benchmark; writes records.csv, timings.csv, summary.json.
    Bench {
        #[arg(short = 'n', long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(short, long)]
        output: PathBuf,
        /// Worker threads; defaults to all cores.
        #[arg(long)]
        jobs: Option<usize>,
        /// JSON file with configuration overrides, in scenario `overrides` form.
        #[arg(long)]
        overrides: Option<PathBuf>,
    },
    /// Render a saved trajectory against its scenario.
    Render {
        trajectory: PathBuf,
        scenario: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        discs: bool,
    },
}

enum Failure {
    Input(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))
}

fn input<T>(r: carplan::Result<T>, what: &Path) -> CliResult<T> {
    r.map_err(|e| Failure::Input(format!("{}: {e}", what.display())))
}

fn load_scenario(path: &Path) -> CliResult<(Scenario, RunConfig)> {
    let scenario = input(Scenario::parse(&read(path)?), path)?;
    let cfg = input(scenario.config(), path)?;
    Ok((scenario, cfg))
}

fn parse_zones(names: &[String]) -> CliResult<Vec<Zone>> {
    names
        .iter()
        .map(|n| n.parse::<Zone>().map_err(|e| Failure::Input(e.to_string())))
        .collect()
}

fn plan(scenario_path: &Path, out: &Path, svg: bool, zones: Option<Vec<String>>, discs: bool) -> CliResult<()> {
    let (scenario, mut cfg) = load_scenario(scenario_path)?;
    if let Some(z) = zones {
        cfg.plan.enabled_zones = parse_zones(&z)?;
    }
    let id = scenario_path
        .file_stem()
        .map_or_else(|| "scenario".to_string(), |s| s.to_string_lossy().into_owned());
    let run = run_scenario(&id, &scenario, &cfg, None).map_err(|e| Failure::Input(e.to_string()))?;
    ensure_dir(out)?;
    let record = serde_json::json!({ "record": run.record, "timings": run.timings });
    write(&out.join("record.json"), &serde_json::to_string_pretty(&record).expect("record serializes"))?;
    if let Some(result) = &run.result {
        let traj = TrajectoryFile::from_spline(&result.trajectory).map_err(|e| Failure::Input(e.to_string()))?;
        write(&out.join("trajectory.json"), &serde_json::to_string_pretty(&traj).expect("trajectory serializes"))?;
        if svg {
            let rects = input(scenario.rects(), scenario_path)?;
            let doc = render_svg(
                &RenderInput {
                    obstacles: &rects,
                    reference: run.reference.as_ref().map(|r| &r.spline),
                    trajectory: &result.trajectory,
                    vehicle: &cfg.plan.vehicle,
                },
                &RenderOptions {
                    discs,
                    zones: cfg.plan.enabled_zones.clone(),
                },
            )
            .map_err(|e| Failure::Input(e.to_string()))?;
            write(&out.join("plan.svg"), &doc)?;
        }
    }
    println!(
        "{}: success={} failure={} max|kappa|={:.4} horizon={:.2}s total={:.1}ms",
        run.record.id,
        run.record.success,
        if run.record.failure.is_empty() { "-" } else { &run.record.failure },
        run.record.max_abs_curvature,
        run.record.horizon,
        run.timings.t_total
    );
    Ok(())
}

fn bench(count: usize, seed: u64, out: &Path, jobs: Option<usize>, overrides: Option<PathBuf>) -> CliResult<()> {
    if count == 0 {
        return Err(Failure::Input("count must be at least 1".into()));
    }
    let cfg = match overrides {
        None => RunConfig::default(),
        Some(path) => {
            let value: serde_json::Value = serde_json::from_str(&read(&path)?)
                .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            input(RunConfig::default().with_overrides(&value), &path)?
        }
    };
    let result = run_bench(count, seed, &cfg, jobs).map_err(|e| Failure::Input(e.to_string()))?;
    ensure_dir(out)?;
    let csv = |r: carplan::Result<String>| r.map_err(|e| Failure::Io(e.to_string()));
    write(&out.join("records.csv"), &csv(result.records_csv())?)?;
    write(&out.join("timings.csv"), &csv(result.timings_csv())?)?;
    write(&out.join("summary.json"), &result.summary_json())?;
    let s = &result.summary;
    println!(
        "{} runs, success {:.1}%, violations v={} a_s={} a_d={} kappa-runs={}, total ms min/avg/max {:.1}/{:.1}/{:.1}",
        s.count,
        100.0 * s.success_rate,
        s.viol_v_s,
        s.viol_a_s,
        s.viol_a_d,
        s.curvature_violating_runs,
        s.t_total_ms.min,
        s.t_total_ms.avg,
        s.t_total_ms.max
    );
    Ok(())
}

fn render(traj_path: &Path, scenario_path: &Path, out: &Path, discs: bool) -> CliResult<()> {
    let (scenario, cfg) = load_scenario(scenario_path)?;
    let file: TrajectoryFile = serde_json::from_str(&read(traj_path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", traj_path.display())))?;
    let traj = input(file.spline(), traj_path)?;
    let rects = input(scenario.rects(), scenario_path)?;
    let doc = render_svg(
        &RenderInput {
            obstacles: &rects,
            reference: None,
            trajectory: &traj,
            vehicle: &cfg.plan.vehicle,
        },
        &RenderOptions {
            discs,
            zones: cfg.plan.enabled_zones.clone(),
        },
    )
    .map_err(|e| Failure::Input(e.to_string()))?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        ensure_dir(parent)?;
    }
    write(out, &doc)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.command {
        Command::Plan {
            scenario,
            output,
            svg,
            zones,
            discs,
        } => plan(&scenario, &output, svg, zones, discs),
        Command::Bench {
            count,
            seed,
            output,
            jobs,
            overrides,
        } => bench(count, seed, &output, jobs, overrides),
        Command::Render {
            trajectory,
            scenario,
            output,
            discs,
        } => render(&trajectory, &scenario, &output, discs),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(m) | Failure::Io(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}
