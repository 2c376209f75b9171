use std::ffi::OsString;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::verify::Suite;
use crate::{kernel_cmd, shape, simulate, verify};

#[derive(Debug, Parser)]
#[command(name = "wallgrowth", version, about = "Surface growth with a reflecting wall")]
pub struct Cli {
    /// key = value file; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, env = "WALLGROWTH_JOBS")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the growth process from the packed state.
    Simulate(SimulateArgs),
    /// Correlation kernel matrix and determinant at given points.
    Kernel(KernelArgs),
    /// Limit shape, regions and frozen boundary on a (d, l) grid.
    Shape(ShapeArgs),
    /// Run acceptance suites; exits 1 if any criterion fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub time: Option<f64>,
    #[arg(long)]
    pub levels: Option<usize>,
    #[arg(long)]
    pub replicas: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Extra rows simulated and dropped; the row truncation is already exact.
    #[arg(long)]
    pub margin: Option<usize>,
    /// Final rows, one JSON line per replica (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub events: Option<PathBuf>,
    /// SVG tiling of replica 0.
    #[arg(long)]
    pub snapshot: Option<PathBuf>,
    #[arg(long)]
    pub histogram: Option<PathBuf>,
    #[arg(long)]
    pub record: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Points as n,a,s triples separated by ';', e.g. "1,-1/2,0;2,+1/2,3".
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Comma-separated alpha parameters.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    /// ellipse or circle.
    #[arg(long)]
    pub contour: Option<String>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub u_nodes: Option<usize>,
    #[arg(long)]
    pub x_nodes: Option<usize>,
    /// Evaluate the hole kernel instead.
    #[arg(long)]
    pub hole: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ShapeArgs {
    #[arg(long)]
    pub time: Option<f64>,
    #[arg(long)]
    pub d_min: Option<f64>,
    #[arg(long)]
    pub d_max: Option<f64>,
    #[arg(long)]
    pub d_steps: Option<usize>,
    #[arg(long)]
    pub l_min: Option<f64>,
    #[arg(long)]
    pub l_max: Option<f64>,
    #[arg(long)]
    pub l_steps: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Replicas for the kernel Monte Carlo comparison.
    #[arg(long)]
    pub replicas: Option<u64>,
    /// Replicas for the bottom-particle law.
    #[arg(long)]
    pub bottom_replicas: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

fn s<T: ToString>(v: &Option<T>) -> Option<String> {
    v.as_ref().map(ToString::to_string)
}

fn p(v: &Option<PathBuf>) -> Option<String> {
    v.as_ref().map(|x| x.to_string_lossy().into_owned())
}

/// Resolves the configuration of a parsed command line.
pub fn resolve(cli: &Cli) -> Result<RunConfig> {
    let file = cli.config.as_deref();
    let jobs = ("jobs", s(&cli.jobs));
    match &cli.command {
        Command::Simulate(a) => RunConfig::resolve(
            "simulate",
            simulate::DEFAULTS,
            file,
            vec![
                ("time", s(&a.time)),
                ("levels", s(&a.levels)),
                ("replicas", s(&a.replicas)),
                ("seed", s(&a.seed)),
                ("margin", s(&a.margin)),
                ("out", p(&a.out)),
                ("events", p(&a.events)),
                ("snapshot", p(&a.snapshot)),
                ("histogram", p(&a.histogram)),
                ("record", p(&a.record)),
                jobs,
            ],
        ),
        Command::Kernel(a) => RunConfig::resolve(
            "kernel",
            kernel_cmd::DEFAULTS,
            file,
            vec![
                ("points", a.points.clone()),
                ("gamma", s(&a.gamma)),
                ("alpha", a.alpha.clone()),
                ("beta", a.beta.clone()),
                ("contour", a.contour.clone()),
                ("radius", s(&a.radius)),
                ("u_nodes", s(&a.u_nodes)),
                ("x_nodes", s(&a.x_nodes)),
                ("hole", a.hole.then(|| "true".to_string())),
                ("out", p(&a.out)),
                jobs,
            ],
        ),
        Command::Shape(a) => RunConfig::resolve(
            "shape",
            shape::DEFAULTS,
            file,
            vec![
                ("time", s(&a.time)),
                ("d_min", s(&a.d_min)),
                ("d_max", s(&a.d_max)),
                ("d_steps", s(&a.d_steps)),
                ("l_min", s(&a.l_min)),
                ("l_max", s(&a.l_max)),
                ("l_steps", s(&a.l_steps)),
                ("out", p(&a.out)),
                ("csv", p(&a.csv)),
                jobs,
            ],
        ),
        Command::Verify(a) => RunConfig::resolve(
            "verify",
            verify::DEFAULTS,
            file,
            vec![
                ("suite", a.suite.to_possible_value().map(|v| v.get_name().to_string())),
                ("replicas", s(&a.replicas)),
                ("bottom_replicas", s(&a.bottom_replicas)),
                ("seed", s(&a.seed)),
                ("report", p(&a.report)),
                jobs,
            ],
        ),
    }
}

/// Exit status: 0 success, 1 runtime error or failed verification,
/// 2 usage error.
pub fn run_cli(cli: &Cli) -> Result<i32> {
    let cfg = resolve(cli)?;
    let jobs: usize = cfg.get("jobs")?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    pool.install(|| match &cli.command {
        Command::Simulate(_) => simulate::run(&cfg).map(|_| 0),
        Command::Kernel(_) => kernel_cmd::run(&cfg).map(|_| 0),
        Command::Shape(_) => shape::run(&cfg).map(|_| 0),
        Command::Verify(a) => verify::run(&cfg, a.suite).map(|(_, ok)| if ok { 0 } else { 1 }),
    })
}

pub fn run_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run_cli(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
