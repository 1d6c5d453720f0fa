//! Command line for the chemcomp solver.
//!
//! Exit codes: 0 on success, 1 for configuration/usage errors, 2 for
//! numerical failures (undershoot, non-convergence, singular systems).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use chemcomp::io;
use chemcomp::scenario::RunError;
use chemcomp_core::amplitude::{solve_amplitude_ode, steady_amplitude, AmplitudeCoefficients};
use chemcomp_core::stability::{self, Classification, ModeIndex};
use chemcomp_core::Dim;

#[derive(Parser)]
#[command(name = "chemcomp", version, about = "Two-species chemotaxis-competition solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a configuration file.
    Simulate {
        /// Path to the scenario configuration.
        config: PathBuf,
    },
    /// Linear stability of the coexistence state (symmetric coefficients).
    Stability {
        /// Competition coefficient, 0 < a < 1.
        #[arg(long)]
        a: f64,
        /// Domain edge length.
        #[arg(long = "L")]
        length: f64,
        /// Spatial dimension, 1 or 2.
        #[arg(long, default_value_t = 1)]
        dim: u8,
        /// Classify at this chemotaxis strength (optional).
        #[arg(long)]
        chi: Option<f64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Amplitude-equation coefficients and trajectory at (a, L).
    Amplitude {
        #[arg(long)]
        a: f64,
        #[arg(long = "L")]
        length: f64,
        /// Distance to threshold, chi = chi* + eps.
        #[arg(long)]
        eps: f64,
        /// Initial amplitude.
        #[arg(long = "A0", default_value_t = 1e-2)]
        a0: f64,
        #[arg(long, default_value_t = 200.0)]
        t_end: f64,
        /// Fixed integrator step.
        #[arg(long, default_value_t = 1e-3)]
        dt_ode: f64,
        /// Write the (t, A) series here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one near-onset simulation per epsilon and tabulate the plateaus.
    Sweep {
        /// Amplitude-verify base configuration.
        config: PathBuf,
        /// Comma-separated distances to threshold.
        #[arg(long, value_delimiter = ',', required = true)]
        eps: Vec<f64>,
        /// Write the table here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap help/version are not errors
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

enum CliError {
    Config(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) | CliError::Numerical(m) => write!(f, "{m}"),
        }
    }
}

impl From<chemcomp::ConfigError> for CliError {
    fn from(e: chemcomp::ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Numerical(_) => CliError::Numerical(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<chemcomp_core::CoreError> for CliError {
    fn from(e: chemcomp_core::CoreError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o: {e}"))
    }
}

fn parse_dim(dim: u8) -> Result<Dim, CliError> {
    match dim {
        1 => Ok(Dim::One),
        2 => Ok(Dim::Two),
        other => Err(CliError::Config(format!("--dim must be 1 or 2, got {other}"))),
    }
}

fn mode_cells(mode: ModeIndex) -> (String, String) {
    match mode {
        ModeIndex::OneD(k) => (k.to_string(), String::new()),
        ModeIndex::TwoD(k, j) => (k.to_string(), j.to_string()),
    }
}

fn mode_label(mode: ModeIndex) -> String {
    match mode {
        ModeIndex::OneD(k) => format!("k = {k}"),
        ModeIndex::TwoD(k, j) => format!("(k, j) = ({k}, {j})"),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config } => {
            let cfg = chemcomp::load_config_file(&config)?;
            let artifacts = chemcomp::run_scenario(&cfg)?;
            print!("{}", artifacts.summary);
            println!("series = {}", artifacts.series_path.display());
            for p in &artifacts.snapshot_paths {
                println!("snapshot = {}", p.display());
            }
            Ok(())
        }
        Command::Stability {
            a,
            length,
            dim,
            chi,
            format,
        } => {
            let report = stability::analyze(a, length, parse_dim(dim)?, chi)?;
            match format {
                Format::Text => {
                    println!("a = {a}, L = {length}, dim = {dim}");
                    println!("chi_star = {}", report.chi_star);
                    let crit: Vec<String> =
                        report.critical.iter().map(|m| mode_label(*m)).collect();
                    println!("critical_modes = {}", crit.join("; "));
                    if let (Some(chi), Some(class)) = (report.query_chi, &report.classification) {
                        match class {
                            Classification::Stable => println!("at chi = {chi}: stable"),
                            Classification::Unstable { growing } => {
                                let g: Vec<String> =
                                    growing.iter().map(|m| mode_label(*m)).collect();
                                println!("at chi = {chi}: unstable, growing {}", g.join("; "));
                            }
                        }
                    }
                    println!("eigenvalues evaluated at chi = {}", report.query_chi.unwrap_or(report.chi_star));
                    println!("mode\tlambda\tchi_star_k\teig_along(1,1)\teig_along(1,-1)");
                    for e in &report.modes {
                        println!(
                            "{}\t{}\t{}\t{}\t{}",
                            mode_label(e.mode),
                            e.lambda,
                            e.chi_star_k,
                            e.eig_sum,
                            e.eig_diff
                        );
                    }
                }
                Format::Csv => {
                    println!("# chi_star = {}", report.chi_star);
                    let crit: Vec<String> =
                        report.critical.iter().map(|m| mode_label(*m)).collect();
                    println!("# critical_modes = {}", crit.join("; "));
                    println!("k,j,lambda,chi_star_k,eig_sum,eig_diff");
                    for e in &report.modes {
                        let (k, j) = mode_cells(e.mode);
                        println!("{k},{j},{},{},{},{}", e.lambda, e.chi_star_k, e.eig_sum, e.eig_diff);
                    }
                }
            }
            Ok(())
        }
        Command::Amplitude {
            a,
            length,
            eps,
            a0,
            t_end,
            dt_ode,
            out,
        } => {
            let coeffs = AmplitudeCoefficients::compute(a, length)?;
            println!("a = {a}, L = {length}");
            println!("k_star = {}", coeffs.k_star);
            println!("chi_star = {}", coeffs.chi_star);
            println!("c1 = {}", coeffs.c1);
            println!("c2 = {}", coeffs.c2);
            println!("lambda1 = {}", coeffs.lambda1);
            println!("lambda2 = {}", coeffs.lambda2);
            if coeffs.lambda1 < 0.0 {
                println!("predicted_amplitude = {}", steady_amplitude(&coeffs, eps)?);
            }
            let trace = solve_amplitude_ode(&coeffs, eps, a0, t_end, dt_ode);
            let mut csv = String::from("t,A\n");
            for (t, amp) in trace {
                csv.push_str(&format!("{t},{amp}\n"));
            }
            match out {
                Some(path) => io::write_file(&path, &csv)?,
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Sweep { config, eps, out } => {
            let cfg = chemcomp::load_config_file(&config)?;
            let rows = chemcomp::sweep_epsilon(&cfg, &eps)?;
            let csv = io::sweep_csv(&rows);
            match out {
                Some(path) => io::write_file(&path, &csv)?,
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}
