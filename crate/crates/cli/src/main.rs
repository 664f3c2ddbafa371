mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hodgelim::asymptotics::StripGrid;
use hodgelim::normal_functions::PolarGrid;

use commands::{Code, CliError, LimitArgs, ProviderArg};

/// Limits of mixed Hodge structures along nilpotent orbits and normal functions.
#[derive(Parser)]
#[command(name = "hodgelim", version)]
struct Cli {
    /// seed for sampled checks (cone samples)
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// worker threads for parallel scans
    #[arg(long, global = true, env = "HODGELIM_THREADS")]
    threads: Option<usize>,
    /// rank threshold for floating point linear algebra
    #[arg(long, global = true)]
    svd_tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Admissibility, relative weight and Γ checks
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "cks")]
        provider: ProviderArg,
    },
    /// Deligne bigrading of (F, W) and of the limit (F, M)
    Bigrading {
        file: PathBuf,
        /// evaluate at e^{iN(y)} F instead, y given as comma separated rationals
        #[arg(long)]
        at: Option<String>,
    },
    /// δ- and sl2-splittings of (F, W) and (F, M)
    Splittings {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "cks")]
        provider: ProviderArg,
    },
    /// Deligne gradings Y(N_j, Y_(F,M)) and the nested grading
    Gradings { file: PathBuf },
    /// Grading chain, sl2 data and the twist fit
    Chain {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "cks")]
        provider: ProviderArg,
    },
    /// Limit of the Deligne grading along an sl2 sequence
    Limit {
        file: PathBuf,
        /// metadata sequence name, shorthand "m^3, m; x = 0.3, 0.7" or JSON
        #[arg(long)]
        sequence: String,
        #[arg(long, default_value_t = 1)]
        m_min: usize,
        #[arg(long, default_value_t = 40)]
        m_max: usize,
        #[arg(long, default_value_t = 1)]
        m_step: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// CSV with columns m, y_j, t_j, error, norm
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "zero")]
        provider: ProviderArg,
    },
    /// Sup of the split grading over a strip grid
    Bounded {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "0,0.25,0.5")]
        xs: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1,2,5,10,20,50,100")]
        ys: Vec<f64>,
        /// only sample y_1 >= y_2 >= ...
        #[arg(long)]
        ordered: bool,
        #[arg(long, value_enum, default_value = "cks")]
        provider: ProviderArg,
        /// CSV with columns min_y, norm
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distinct integral Deligne gradings over a sample grid
    Census {
        file: PathBuf,
        #[arg(long, default_value_t = 40)]
        size: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// CSV with columns point, grading, x_j, y_j, residual
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Zero test of a normal function over a polar grid in the punctured polydisc
    ZeroLocus {
        file: PathBuf,
        /// radii as min:max:count
        #[arg(long, default_value = "0.1:0.8:4")]
        radii: String,
        #[arg(long, default_value_t = 12)]
        angles: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// refine one hit per cluster by Newton's method
        #[arg(long)]
        certify: bool,
        /// CSV with columns kind, cluster, re/im s_j, residual
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Density analysis for an integral grading Y_Z
    Analyze {
        file: PathBuf,
        /// Y_Z as a JSON matrix of scalar strings; found by a scan when omitted
        #[arg(long)]
        grading: Option<String>,
        /// limits of the real parts, comma separated
        #[arg(long, default_value = "")]
        mu: String,
        #[arg(long, value_enum, default_value = "cks")]
        provider: ProviderArg,
    },
    /// Print a scenario file in canonical form
    Fmt {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// exit 1 if the file is not canonical
        #[arg(long)]
        check: bool,
        /// rewrite the file in place
        #[arg(long, conflicts_with = "check")]
        write: bool,
    },
}

fn polar_grid(radii: &str, angles: usize) -> Result<PolarGrid, CliError> {
    let parts: Vec<&str> = radii.split(':').collect();
    let bad = || CliError::input(format!("--radii: expected min:max:count, got {radii}"));
    if parts.len() != 3 || angles == 0 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !(0.0 < lo && lo <= hi && hi < 1.0) {
        return Err(CliError::input("--radii must satisfy 0 < min <= max < 1 and count >= 1"));
    }
    Ok(PolarGrid::uniform(n, lo, hi, angles))
}

fn run(cli: Cli) -> Result<(report::Report, Code), CliError> {
    if let Some(t) = cli.svd_tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::input("--svd-tol must be positive"));
        }
        hodgelim::scalar::set_float_tolerance(t);
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::input(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Validate { file, provider } => commands::validate(&file, cli.seed, provider),
        Command::Bigrading { file, at } => {
            let at = at.map(|t| commands::parse_scalars(&t)).transpose()?;
            commands::bigrading_cmd(&file, at)
        }
        Command::Splittings { file, provider } => commands::splittings(&file, provider),
        Command::Gradings { file } => commands::gradings(&file),
        Command::Chain { file, provider } => commands::chain(&file, provider),
        Command::Limit { file, sequence, m_min, m_max, m_step, tol, out, provider } => {
            commands::limit(&file, &LimitArgs { sequence, m_min, m_max, m_step, tol, out, provider })
        }
        Command::Bounded { file, xs, ys, ordered, provider, out } => {
            if ys.iter().any(|&y| y <= 0.0) {
                return Err(CliError::input("--ys must be positive"));
            }
            commands::bounded(&file, &StripGrid { xs, ys, ordered }, provider, out.as_deref())
        }
        Command::Census { file, size, tol, out } => commands::census(&file, size, tol, out.as_deref()),
        Command::ZeroLocus { file, radii, angles, tol, certify, out } => {
            let grid = polar_grid(&radii, angles)?;
            commands::zero_locus(&file, &grid, tol, certify, out.as_deref())
        }
        Command::Analyze { file, grading, mu, provider } => {
            let mu = commands::parse_scalars(&mu)?;
            commands::analyze(&file, grading.as_deref(), &mu, provider)
        }
        Command::Fmt { files, check, write } => commands::fmt(&files, check, write),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((rep, code)) => {
            print!("{}", rep.finish());
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
