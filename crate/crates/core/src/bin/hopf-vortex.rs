use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hopf_vortex::harness::{
    convergence_study, error_line, run_simulation, summary_path, IntegratorKind, Reference, SimConfig,
};
use hopf_vortex::scenarios::SCENARIO_NAMES;
use hopf_vortex::{Result, VortexError};

/// Point-vortex simulator on the sphere.
#[derive(Parser)]
#[command(name = "hopf-vortex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation.
    Run(RunArgs),
    /// Measure the order of accuracy over a list of step sizes.
    Order(OrderArgs),
    ListScenarios,
    ListIntegrators,
}

#[derive(Args)]
struct Overrides {
    /// Configuration file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    integrator: Option<String>,
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    #[arg(long = "t-max", alias = "t_max")]
    t_max: Option<String>,
    #[arg(long = "output-every", alias = "output_every")]
    output_every: Option<String>,
    #[arg(long)]
    tolerance: Option<String>,
    #[arg(long = "max-iterations", alias = "max_iterations")]
    max_iterations: Option<String>,
    #[arg(long)]
    output: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Any config key, e.g. `--set scenario.theta0=0.3`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Overrides {
    fn load(&self) -> Result<SimConfig> {
        let mut cfg = match &self.config {
            Some(path) => SimConfig::from_file(path)?,
            None => SimConfig::default(),
        };
        let named = [
            ("scenario", &self.scenario),
            ("integrator", &self.integrator),
            ("h", &self.h),
            ("sigma", &self.sigma),
            ("t_max", &self.t_max),
            ("output_every", &self.output_every),
            ("tolerance", &self.tolerance),
            ("max_iterations", &self.max_iterations),
            ("output", &self.output),
            ("alpha", &self.alpha),
        ];
        for (key, value) in named {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for entry in &self.set {
            let (key, value) = entry
                .split_once('=')
                .ok_or_else(|| VortexError::Config(format!("--set expects KEY=VALUE, got '{entry}'")))?;
            cfg.set(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Args)]
struct OrderArgs {
    #[command(flatten)]
    overrides: Overrides,
    /// Comma-separated step sizes.
    #[arg(long = "h-list", value_delimiter = ',', required = true)]
    h_list: Vec<f64>,
    /// `exact` (pd-ring only) or `fine-step`.
    #[arg(long, default_value = "exact")]
    reference: String,
    /// Fine reference step is the smallest h divided by this.
    #[arg(long = "fine-factor", default_value_t = 10)]
    fine_factor: usize,
}

fn run(args: RunArgs) -> Result<()> {
    let cfg = args.overrides.load()?;
    let summary = run_simulation(&cfg)?;
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    if let Some(path) = &cfg.output {
        eprintln!("wrote {} and {}", path.display(), summary_path(path).display());
    }
    Ok(())
}

fn order(args: OrderArgs) -> Result<()> {
    let cfg = args.overrides.load()?;
    let reference = match args.reference.parse()? {
        Reference::FineStep { .. } => Reference::FineStep { factor: args.fine_factor },
        r => r,
    };
    let table = convergence_study(&cfg, &args.h_list, reference)?;
    println!("h,error,iterations");
    for row in &table.rows {
        println!("{:.16e},{:.16e},{}", row.h, row.error, row.iterations);
    }
    for (h, line) in &table.failures {
        eprintln!("failed h={h}: {line}");
    }
    println!("slope,{:.6}", table.slope);
    if let Some(path) = &cfg.output {
        let json = serde_json::to_string_pretty(&table).expect("table serializes");
        std::fs::write(path, json + "\n").map_err(|source| VortexError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Order(args) => order(args),
        Command::ListScenarios => {
            SCENARIO_NAMES.iter().for_each(|name| println!("{name}"));
            Ok(())
        }
        Command::ListIntegrators => {
            IntegratorKind::ALL.iter().for_each(|k| println!("{k}"));
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error {}", error_line(&e));
            ExitCode::FAILURE
        }
    }
}
