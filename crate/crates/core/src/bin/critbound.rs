use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use critbound::campaign::{
    parse_counts, parse_dims, parse_exponents, run_campaign, CampaignError, Command, ConfigLayer,
    OutputFormat,
};

/// Batch checks and radial solves for critical-exponent problems with
/// nonlinear boundary conditions.
#[derive(Parser, Debug)]
#[command(name = "critbound", version)]
struct Cli {
    /// Config file with `key = value` lines under section headers; flags
    /// override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Sub>,

    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Sobolev constants, thresholds and the doubly critical level.
    Constants(Flags),
    /// Residuals and energies of the half-space bubbles.
    Bubbles(Flags),
    /// Moment identities and curvature sign conditions.
    Identities(Flags),
    /// Curvature expansions of the bubble energies.
    Lemmas(Flags),
    /// Energy gaps below the compactness thresholds.
    Thresholds(Flags),
    /// Radial ground and nodal states on a ball.
    Solve(Flags),
}

#[derive(Args, Debug, Default, Clone)]
struct Flags {
    /// Dimensions: `4..10`, `3,4,5` or a mixture.
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    eps_min: Option<f64>,
    #[arg(long)]
    eps_max: Option<f64>,
    #[arg(long)]
    eps_points: Option<usize>,
    /// Scale of the threshold gaps.
    #[arg(long)]
    gap_eps: Option<f64>,
    /// Principal curvature of the boundary model.
    #[arg(long)]
    curvature: Option<f64>,
    /// Radius of the curved boundary patch.
    #[arg(long)]
    patch_radius: Option<f64>,
    /// Radius of the solver ball.
    #[arg(long)]
    radius: Option<f64>,
    /// Volume exponents, comma separated; `crit` for the critical one.
    #[arg(long)]
    r: Option<String>,
    /// Boundary exponents, comma separated; `crit` for the critical one.
    #[arg(long)]
    q: Option<String>,
    /// Sign-change counts of the solved states.
    #[arg(long)]
    nodes: Option<String>,
    /// Mesh cells of the radial solver.
    #[arg(long)]
    mesh: Option<usize>,
    /// Gradient-norm tolerance of the radial solver.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    coeff_tol: Option<f64>,
    #[arg(long)]
    c0_tol: Option<f64>,
    #[arg(long)]
    power_tol: Option<f64>,
}

impl Flags {
    fn layer(self, command: Option<Command>) -> Result<ConfigLayer, CampaignError> {
        let format = match self.format {
            Some(f) => Some(
                OutputFormat::parse(&f)
                    .ok_or_else(|| CampaignError::Config(format!("unknown format `{f}`")))?,
            ),
            None => None,
        };
        Ok(ConfigLayer {
            command,
            dims: self.dims.as_deref().map(parse_dims).transpose()?,
            r_values: self.r.as_deref().map(parse_exponents).transpose()?,
            q_values: self.q.as_deref().map(parse_exponents).transpose()?,
            nodes: self.nodes.as_deref().map(parse_counts).transpose()?,
            curvature: self.curvature,
            patch_radius: self.patch_radius,
            ball_radius: self.radius,
            eps_min: self.eps_min,
            eps_max: self.eps_max,
            eps_points: self.eps_points,
            gap_eps: self.gap_eps,
            mesh: self.mesh,
            tol: self.tol,
            out_dir: self.out,
            format,
            coeff_tol: self.coeff_tol,
            c0_tol: self.c0_tol,
            power_tol: self.power_tol,
            ..ConfigLayer::default()
        })
    }
}

fn run(cli: Cli) -> Result<i32, CampaignError> {
    let base = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CampaignError::Config(format!("cannot read {}: {e}", path.display()))
            })?;
            ConfigLayer::from_ini_str(&text)?
        }
        None => ConfigLayer::default(),
    };
    let (command, flags) = match cli.command {
        Some(Sub::Constants(f)) => (Some(Command::Constants), f),
        Some(Sub::Bubbles(f)) => (Some(Command::Bubbles), f),
        Some(Sub::Identities(f)) => (Some(Command::Identities), f),
        Some(Sub::Lemmas(f)) => (Some(Command::Lemmas), f),
        Some(Sub::Thresholds(f)) => (Some(Command::Thresholds), f),
        Some(Sub::Solve(f)) => (Some(Command::Solve), f),
        None => (None, cli.flags),
    };
    let cfg = base.overridden_by(flags.layer(command)?).resolve()?;
    let verdict = run_campaign(&cfg)?;
    for c in verdict.checks.iter().filter(|c| !c.passed) {
        let dim = c.dim.map_or(String::new(), |d| format!(" N={d}"));
        eprintln!("FAIL {}{dim}: {}", c.name, c.detail);
    }
    println!(
        "{}: {} passed, {} failed; output in {}",
        verdict.command.name(),
        verdict.passed,
        verdict.failed,
        cfg.out_dir.display()
    );
    Ok(verdict.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("critbound: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
