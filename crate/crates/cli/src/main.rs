use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use corridor_planner::bench::{run_suite, summarize, write_bench_csv};
use corridor_planner::scenario::{
    load_scenario, load_world, parts_from_provenance, read_path_csv, render_svg, write_path_csv,
};
use corridor_planner::{validate_roadmap, Error, Planner};
use log::info;
use serde_json::json;

#[derive(Parser)]
#[command(name = "corridor-planner", version, about = "Plan vehicle paths between machines over a corridor roadmap")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan every request of a scenario; writes CSV, SVG and metrics JSON per request.
    Plan {
        #[arg(long)]
        world: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Skip roadmap validation when loading the world.
        #[arg(long)]
        no_validate: bool,
    },
    /// Check the roadmap for collisions, curvature and tangent breaks.
    Validate {
        #[arg(long)]
        world: PathBuf,
    },
    /// Run every request with all three planners and write a CSV report.
    Bench {
        #[arg(long)]
        world: PathBuf,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
    },
    /// Draw the world, optionally with a path CSV, as SVG.
    Render {
        #[arg(long)]
        world: PathBuf,
        #[arg(long)]
        path: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) => 1,
        Error::Parse(_)
        | Error::ValidationFailed(_)
        | Error::InvalidInput(_)
        | Error::DegenerateTangent(_)
        | Error::UnknownNode(_) => 3,
        Error::NoPathFound { .. }
        | Error::NoRoute { .. }
        | Error::StartBlocked
        | Error::GoalBlocked(..)
        | Error::RoadmapIncomplete(_)
        | Error::OutsideAllZones(..)
        | Error::DiscontinuousJoin { .. } => 4,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn plan(world: &Path, scenario: &Path, out: &Path, validate: bool) -> Result<u8, Error> {
    let (world, grid) = load_world(world, validate)?;
    let scenario = load_scenario(scenario)?;
    scenario.check_nodes(&world)?;
    fs::create_dir_all(out)?;
    let planner = Planner::new(&world, &grid);
    let mut code = 0;
    for named in scenario.named_requests() {
        match planner.plan(&named.request) {
            Ok(result) => {
                let mut csv = create(&out.join(format!("{}.csv", named.id)))?;
                write_path_csv(&result.path, &mut csv)?;
                csv.flush()?;
                let parts: Vec<_> = result
                    .parts
                    .iter()
                    .map(|p| (p.kind, result.part_path(p)))
                    .collect();
                let mut svg = create(&out.join(format!("{}.svg", named.id)))?;
                render_svg(&world, &grid, &parts, &mut svg)?;
                svg.flush()?;
                let doc = json!({
                    "id": named.id,
                    "request": named.request,
                    "metrics": result.metrics,
                    "parts": result.parts,
                    "joins": result.joins,
                });
                let mut js = create(&out.join(format!("{}.json", named.id)))?;
                serde_json::to_writer_pretty(&mut js, &doc).map_err(io::Error::from)?;
                writeln!(js)?;
                js.flush()?;
                println!(
                    "{}: {:.3} m, {} switches, {} expansions",
                    named.id, result.metrics.length, result.metrics.direction_switches, result.metrics.expansions
                );
            }
            Err(e) => {
                eprintln!("{}: {e}", named.id);
                code = code.max(exit_code(&e));
            }
        }
    }
    Ok(code)
}

fn validate(world: &Path) -> Result<u8, Error> {
    let (world, grid) = load_world(world, false)?;
    let report = validate_roadmap(&world, &grid);
    print!("{report}");
    Ok(if report.passed() { 0 } else { 3 })
}

fn bench(world: &Path, scenario: &Path, out: &Path, repetitions: usize) -> Result<u8, Error> {
    let (world, grid) = load_world(world, true)?;
    let scenario = load_scenario(scenario)?;
    scenario.check_nodes(&world)?;
    let rows = run_suite(&world, &grid, &scenario, repetitions)?;
    let mut f = create(out)?;
    write_bench_csv(&rows, &mut f)?;
    f.flush()?;
    for s in summarize(&rows) {
        println!(
            "{}: solved {}/{}, median expansions {}, median time {} s",
            s.planner.as_str(),
            s.solved,
            s.rows,
            s.expansions.map_or("-".into(), |v| format!("{v:.1}")),
            s.planning_time.map_or("-".into(), |v| format!("{v:.4}")),
        );
    }
    info!("wrote {}", out.display());
    Ok(0)
}

fn render(world: &Path, path: Option<&Path>, out: &Path) -> Result<u8, Error> {
    let (world, grid) = load_world(world, false)?;
    let parts = match path {
        Some(p) => parts_from_provenance(&read_path_csv(File::open(p)?)?),
        None => Vec::new(),
    };
    let mut f = create(out)?;
    render_svg(&world, &grid, &parts, &mut f)?;
    f.flush()?;
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CORRIDOR_PLANNER_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Plan {
            world,
            scenario,
            out,
            no_validate,
        } => plan(world, scenario, out, !no_validate),
        Command::Validate { world } => validate(world),
        Command::Bench {
            world,
            scenario,
            out,
            repetitions,
        } => bench(world, scenario, out, *repetitions),
        Command::Render { world, path, out } => render(world, path.as_deref(), out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
