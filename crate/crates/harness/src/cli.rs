//! `armpa` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use armpa_core::graph::TaskGraph;
use armpa_core::opt::EngineKind;
use armpa_core::synchron::MissionReport;
use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{io_err, Error, Result};
use crate::experiments::{armpa_run, build_world, motion_run, plan_on, rng};
use crate::monte_carlo::{monte_carlo, Mode};
use crate::plots;

#[derive(Debug, Parser)]
#[command(name = "armpa", version, about = "Mission and motion planning experiments for underwater vehicles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Run configuration file (TOML sections).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Shipped preset: ch5_mission, ch6_scenario1, ch6_scenario2 or ch7_armpa.
    #[arg(long, global = true, conflicts_with = "config")]
    preset: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_parser = parse_engine)]
    engine: Option<EngineKind>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

fn parse_engine(s: &str) -> std::result::Result<EngineKind, String> {
    s.parse().map_err(|e: armpa_core::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classified map and current field.
    GenEnv,
    /// Task graph over a generated map.
    GenGraph,
    /// Route over a generated graph, or over `--graph`.
    PlanMission {
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Single leg in the configured motion scenario.
    PlanPath,
    /// Full executive run.
    RunArmpa,
    /// Batch of independent runs.
    MonteCarlo {
        /// Defaults to the configured run count for the mode.
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long, value_enum, default_value = "mission")]
        mode: Mode,
    },
    /// Figures for the artifacts in a directory.
    Plot {
        #[arg(long)]
        input: PathBuf,
    },
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(files) => {
            let stdout = std::io::stdout();
            let mut w = stdout.lock();
            for f in files {
                let _ = writeln!(w, "{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("armpa: {e}");
            e.exit_code()
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match (&cli.config, &cli.preset) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(name)) => RunConfig::preset(name)?,
        (None, None) => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.run.seed = s;
    }
    if let Some(e) = cli.engine {
        cfg.run.engine = e;
    }
    if let Some(o) = &cli.out {
        cfg.run.out = o.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.flush().map_err(io_err(path))?;
    Ok(())
}

fn write_graph(out: &Path, g: &TaskGraph<f64>) -> Result<Vec<PathBuf>> {
    let json = out.join("graph.json");
    g.write_json(create(&json)?)?;
    let edges = out.join("graph_edges.csv");
    let mut w = csv::Writer::from_path(&edges)?;
    w.write_record(["edge", "a", "b", "task", "length", "time", "duration", "weight"])?;
    for (k, e) in g.edges().iter().enumerate() {
        let task = e.task.map_or(String::new(), |t| t.to_string());
        w.write_record([
            k.to_string(),
            e.a.to_string(),
            e.b.to_string(),
            task,
            e.length.to_string(),
            e.time.to_string(),
            e.duration.to_string(),
            e.weight.to_string(),
        ])?;
    }
    w.flush().map_err(io_err(&edges))?;
    Ok(vec![json, edges])
}

fn write_env(out: &Path, env: &armpa_core::env::Environment<f64>) -> Result<Vec<PathBuf>> {
    let grid = out.join("grid.csv");
    let mut w = create(&grid)?;
    env.grid.raster.write_csv(&mut w)?;
    w.flush().map_err(io_err(&grid))?;
    let state = out.join("env_state.json");
    env.state.write_json(create(&state)?)?;
    Ok(vec![grid, state])
}

fn write_report(out: &Path, r: &MissionReport<f64>) -> Result<Vec<PathBuf>> {
    let json = out.join("report.json");
    let mut w = create(&json)?;
    r.write_json(&mut w)?;
    w.flush().map_err(io_err(&json))?;
    let summary = out.join("report_summary.csv");
    let mut w = create(&summary)?;
    writeln!(w, "{}\n{}", MissionReport::<f64>::CSV_HEADER, r.csv_row()).map_err(io_err(&summary))?;
    w.flush().map_err(io_err(&summary))?;
    Ok(vec![json, summary])
}

fn execute(cli: Cli) -> Result<Vec<PathBuf>> {
    if let Command::Plot { input } = &cli.command {
        return plots::render_dir(input, cli.out.as_deref().unwrap_or(input));
    }
    let cfg = resolve_config(&cli)?;
    let out = cfg.run.out.clone();
    std::fs::create_dir_all(&out).map_err(io_err(&out))?;
    let seed = cfg.run.seed;
    match cli.command {
        Command::GenEnv => {
            let w = build_world(&cfg, None, &mut rng(seed))?;
            write_env(&out, &w.env)
        }
        Command::GenGraph => {
            let w = build_world(&cfg, None, &mut rng(seed))?;
            write_graph(&out, &w.graph)
        }
        Command::PlanMission { graph } => {
            let mut r = rng(seed);
            let g = match graph {
                Some(p) => {
                    let f = File::open(&p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                    TaskGraph::read_json(std::io::BufReader::new(f)).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
                }
                None => build_world(&cfg, None, &mut r)?.graph,
            };
            let (plan, trace) = plan_on(&cfg, &g, &mut r)?;
            let plan_file = out.join("plan.json");
            write_json(&plan_file, &plan)?;
            let trace_file = out.join("trace.csv");
            trace.write_csv(create(&trace_file)?)?;
            if plan.violation > 0.0 {
                return Err(Error::Infeasible(format!("best route takes {} s of a {} s budget", plan.time, plan.budget)));
            }
            Ok(vec![plan_file, trace_file])
        }
        Command::PlanPath => {
            let m = motion_run(&cfg, seed)?;
            let mut files = write_env(&out, &m.scenario.env)?;
            let path = out.join("path.json");
            write_json(&path, &m.solution)?;
            let states = out.join("path_states.csv");
            m.solution.write_states_csv(create(&states)?)?;
            let trace = out.join("trace.csv");
            m.trace.write_csv(create(&trace)?)?;
            files.extend([path, states, trace]);
            if !m.solution.violations.is_clear() {
                return Err(Error::Infeasible(format!("path violates constraints: {:?}", m.solution.violations)));
            }
            Ok(files)
        }
        Command::RunArmpa => {
            let (g, report) = armpa_run(&cfg, seed)?;
            let mut files = write_report(&out, &report)?;
            files.extend(write_graph(&out, &g)?);
            if !report.success() {
                return Err(Error::Infeasible(format!("mission ended with {:?}", report.outcome)));
            }
            Ok(files)
        }
        Command::MonteCarlo { runs, mode } => {
            let runs = runs.unwrap_or(match mode {
                Mode::Armpa => cfg.armpa.runs,
                Mode::Scaling => cfg.scaling.runs,
                Mode::Mission | Mode::Motion => cfg.run.runs,
            });
            let batch = monte_carlo(&cfg, runs, mode)?;
            batch.write(&cfg, &out)
        }
        Command::Plot { .. } => unreachable!("handled before the configuration is read"),
    }
}
