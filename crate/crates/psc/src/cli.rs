//! Argument parsing and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use psc_core::dynamics::FlowVariant;

use crate::commands::{self, Datum, Outcome, SimMode};
use crate::config::{thread_cap, Overrides, RunConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "psc", version, about = "Equivariant bifurcation and blow-up toolkit for the parabolic scalar curvature equation on S²")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON run configuration; flags below override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long = "lmax", global = true)]
    pub l_max: Option<usize>,
    #[arg(long, global = true)]
    pub newton_tol: Option<f64>,
    #[arg(long, global = true)]
    pub zero_tol: Option<f64>,
    #[arg(long, global = true)]
    pub classify_tol: Option<f64>,
    #[arg(long = "smax", global = true)]
    pub s_max: Option<f64>,
    #[arg(long, global = true)]
    pub ds: Option<f64>,
    /// Output directory.
    #[arg(long = "out", global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form derivative rows and Morse indices at bifurcating equilibria.
    VerifyTables,
    /// Continue one equivariant branch and write its CSV and λ–s diagram.
    Branch {
        #[arg(long)]
        group: String,
        #[arg(long)]
        ell: usize,
    },
    /// Branch coefficients, the cubic-equivariant fit and expansion checks.
    Coeffs {
        /// Triple-product cache file; read if present, written otherwise.
        #[arg(long)]
        triple_cache: Option<PathBuf>,
    },
    /// Connecting orbits near λ_ℓ on one side.
    Heteroclinic {
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        side: String,
    },
    /// Integrate the rescaled flow or the original radial equation.
    Simulate(SimulateArgs),
    /// Metric reconstruction along a branch profile or the trivial solution.
    Geometry {
        /// `trivial` or `<group>:<ell>:<s>`.
        #[arg(long)]
        profile: String,
        /// Required for the trivial profile.
        #[arg(long)]
        lambda: Option<f64>,
        /// Number of sample radii in (0, 1).
        #[arg(long, default_value_t = 9)]
        radii: usize,
    },
    /// Fixed-space dimensions of the isotropy lattice.
    Lattice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Rescaled,
    Original,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Quasilinear,
    Semilinear,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Start from the constant field `--amplitude` (zero by default).
    #[arg(long, conflicts_with_all = ["group", "ell"])]
    pub isotropic: bool,
    /// Start from the branch equilibrium at `--s`.
    #[arg(long, requires = "ell")]
    pub group: Option<String>,
    #[arg(long, requires = "group")]
    pub ell: Option<usize>,
    #[arg(long, default_value_t = 0.2)]
    pub s: f64,
    /// Constant value, or sup bound of the seeded random field.
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long, value_enum, default_value_t = Variant::Quasilinear)]
    pub variant: Variant,
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub dt: f64,
    #[arg(long, default_value_t = 0.5)]
    pub r_start: f64,
    #[arg(long, default_value_t = 1.5)]
    pub r_end: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub dr: f64,
}

impl GlobalArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            l_max: self.l_max,
            newton_tol: self.newton_tol,
            zero_tol: self.zero_tol,
            classify_tol: self.classify_tol,
            s_max: self.s_max,
            ds: self.ds,
            output_dir: self.output_dir.clone(),
            seed: self.seed,
        }
    }

    pub fn config(&self, table_command: bool) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        cfg.apply(&self.overrides());
        cfg.validate(table_command)?;
        Ok(cfg)
    }
}

fn simulation(a: &SimulateArgs) -> Result<(SimMode, Datum)> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(CliError::Config(format!("--{name} must be positive, got {v}")))
        }
    };
    let datum = match (&a.group, a.ell) {
        (Some(g), Some(ell)) => Datum::Branch(commands::parse_group(g)?, ell, a.s),
        _ if a.isotropic => Datum::Isotropic(a.amplitude.unwrap_or(0.0)),
        _ => Datum::Random(a.amplitude.unwrap_or(0.1)),
    };
    let mode = match a.mode {
        Mode::Rescaled => {
            let lambda = match (a.lambda, &datum) {
                (Some(l), _) => l,
                (None, Datum::Branch(_, ell, _)) => psc_core::lambda_ell(*ell),
                (None, _) => return Err(CliError::Config("--lambda is required".into())),
            };
            let variant = match a.variant {
                Variant::Quasilinear => FlowVariant::Quasilinear,
                Variant::Semilinear => FlowVariant::Semilinear,
            };
            SimMode::Rescaled { variant, t_end: positive("t-end", a.t_end)?, dt: positive("dt", a.dt)?, lambda: positive("lambda", lambda)? }
        }
        Mode::Original => {
            if !(a.r_start > 0.0 && a.r_start < 1.0 && a.r_end > a.r_start) {
                return Err(CliError::Config(format!("need 0 < r-start < 1 and r-end > r-start, got {} and {}", a.r_start, a.r_end)));
            }
            let lambda = a.lambda.map(|l| positive("lambda", l)).transpose()?;
            SimMode::Original { lambda, r_start: a.r_start, r_end: a.r_end, dr: positive("dr", a.dr)? }
        }
    };
    Ok((mode, datum))
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::VerifyTables => commands::verify_tables(&g.config(true)?),
        Command::Branch { group, ell } => commands::branch(&g.config(false)?, commands::parse_group(group)?, *ell),
        Command::Coeffs { triple_cache } => commands::coeffs(&g.config(true)?, triple_cache.as_deref()),
        Command::Heteroclinic { ell, side } => commands::heteroclinic(&g.config(false)?, *ell, commands::parse_side(side)?),
        Command::Simulate(a) => {
            let (mode, datum) = simulation(a)?;
            commands::simulate(&g.config(false)?, &mode, &datum)
        }
        Command::Geometry { profile, lambda, radii } => commands::geometry(&g.config(false)?, commands::parse_profile(profile)?, *lambda, *radii),
        Command::Lattice => commands::lattice(&g.config(false)?),
    }
}

/// Parses `argv`, runs the subcommand and prints its JSON report; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let threads = match thread_cap(std::env::var("PSC_THREADS").ok().as_deref()) {
        Ok(t) => t,
        Err(e) => return report_error(&e),
    };
    if let Some(n) = threads {
        // Fails only if a global pool already exists (repeated calls in one process).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match execute(&cli) {
        Ok(out) => {
            println!("{}", crate::formats::json(&out.report).trim_end());
            if out.ok {
                0
            } else {
                1
            }
        }
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &CliError) -> i32 {
    let code = e.exit_code();
    println!("{}", crate::formats::json(&serde_json::json!({"error": e.to_string(), "exit_code": code})).trim_end());
    eprintln!("error: {e}");
    code
}
