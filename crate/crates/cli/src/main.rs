use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use geoblock::harness::{
    cmd_block, cmd_count, cmd_entropy, cmd_recursion, cmd_report, cmd_transform, cmd_verify, json_text,
    ExperimentConfig, HarnessError, PairSpec, Render, TGrid,
};

#[derive(Parser)]
#[command(name = "geoblock", version, about = "Count and block connecting geodesics on flat and hyperbolic surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Geodesic counts n_t and m_t per pair, or orbit counts N(t).
    Count,
    /// Incidence instances and minimal blocking sets.
    Block,
    /// Recursive splitting through blocking sets, with level checks.
    RecursionCheck,
    /// Dyadic product transform of a growth function.
    Transform,
    /// Exponential growth rate of the counts.
    Entropy,
    /// Counting and blocking inequalities on computed data.
    Verify,
    /// Growth summary with a consistency verdict.
    Report,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Count => "count",
            Command::Block => "block",
            Command::RecursionCheck => "recursion-check",
            Command::Transform => "transform",
            Command::Entropy => "entropy",
            Command::Verify => "verify",
            Command::Report => "report",
        }
    }

    fn default_format(self) -> Format {
        match self {
            Command::Count | Command::Transform | Command::Entropy => Format::Csv,
            _ => Format::Json,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct Common {
    /// JSON or key = value config file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write `<command>.<format>` into this directory instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// `a:b:step`, `a:b:*ratio` or a comma-separated list.
    #[arg(long = "t-grid", global = true, allow_hyphen_values = true)]
    t_grid: Option<String>,
    /// File with one `x1 x2 y1 y2` pair per line.
    #[arg(long, global = true)]
    pairs: Option<PathBuf>,
    #[arg(long, global = true)]
    geometry: Option<String>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Extra `key=value` config entries, applied last.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn config(common: &Common) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(grid) = &common.t_grid {
        cfg.t_grid = grid.parse::<TGrid>()?;
    }
    if let Some(path) = &common.pairs {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        cfg.pairs = PairSpec::parse_list(&text)?;
    }
    if let Some(g) = &common.geometry {
        cfg.geometry = g.clone();
    }
    if common.workers.is_some() {
        cfg.workers = common.workers;
    }
    if !common.set.is_empty() {
        cfg = cfg.with_overrides(&common.set)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(command: Command, cfg: &ExperimentConfig) -> Result<Box<dyn Render>, HarnessError> {
    Ok(match command {
        Command::Count => Box::new(cmd_count(cfg)?),
        Command::Block => Box::new(cmd_block(cfg)?),
        Command::RecursionCheck => Box::new(cmd_recursion(cfg)?),
        Command::Transform => Box::new(cmd_transform(cfg)?),
        Command::Entropy => Box::new(cmd_entropy(cfg)?),
        Command::Verify => Box::new(cmd_verify(cfg)?),
        Command::Report => Box::new(cmd_report(cfg)?),
    })
}

fn run(cli: &Cli) -> Result<bool, HarnessError> {
    let cfg = config(&cli.common)?;
    let format = cli.common.format.unwrap_or(cli.command.default_format());
    let output = execute(cli.command, &cfg)?;
    let (text, ext) = match format {
        Format::Json => (json_text(&output.to_json()), "json"),
        Format::Csv => match output.to_csv() {
            Some(csv) => (csv, "csv"),
            None => {
                return Err(HarnessError::Config(format!("`{}` has no csv output; use --format json", cli.command.name())))
            }
        },
    };
    match &cli.common.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join(format!("{}.{ext}", cli.command.name())), text)?;
        }
        None => print!("{text}"),
    }
    Ok(output.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("geoblock: hard check failures, see the report");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("geoblock: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
