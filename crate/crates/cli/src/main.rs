mod config;
mod error;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hiqe::dynamics::Method;
use hiqe::extraction::{CoefficientSource, FConvention};
use hiqe::protocols::{DeutschMode, ThetaMode};

use config::{parse_bits, parse_keyword, parse_theta_final, RunConfig, ThetaFinal};
use error::CliError;

/// Inverse-engineered Hamiltonians for two-level quantum algorithms.
#[derive(Parser, Debug)]
#[command(name = "hiqe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Deutsch's algorithm by direct Schrödinger integration
    Deutsch {
        #[command(flatten)]
        common: Common,
        /// Function bits f(0),f(1)
        #[arg(long, value_parser = parse_bits)]
        f: Option<[u8; 2]>,
        /// phase_ramp or rotation_paper_literal
        #[arg(long, value_parser = parse_keyword::<DeutschMode>)]
        mode: Option<DeutschMode>,
        #[command(flatten)]
        series: Series,
    },
    /// Single-evolution Grover search
    Grover {
        #[command(flatten)]
        common: Common,
        /// Number of qubits (N = 2^n)
        #[arg(long)]
        n: Option<u32>,
        /// Marked basis index
        #[arg(long)]
        marked: Option<u64>,
        /// "auto" or θ(τ) in radians
        #[arg(long, value_parser = parse_theta_final)]
        theta_final: Option<ThetaFinal>,
        /// Branch integer used by --theta-final auto
        #[arg(long, allow_hyphen_values = true)]
        a: Option<i64>,
        /// constant or linear
        #[arg(long, value_parser = parse_keyword::<ThetaMode>)]
        theta_mode: Option<ThetaMode>,
        /// Two-level model instead of the full register
        #[arg(long)]
        reduced: bool,
    },
    /// Pauli coefficients of the Hamiltonian behind a path
    Extract {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        series: Series,
        #[arg(long, value_parser = parse_bits)]
        f: Option<[u8; 2]>,
    },
    /// Integrate the extracted Hamiltonian of a path
    Evolve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        fd_step: Option<f64>,
        /// Basis indices written as population columns of the CSV
        #[arg(long, value_delimiter = ',')]
        populations: Option<Vec<usize>>,
    },
    /// Check unitarity and U(0) = 1 for a path
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        samples: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct Common {
    /// JSON run configuration
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// rk4 or exp_midpoint
    #[arg(long, value_parser = parse_keyword::<Method>)]
    method: Option<Method>,
    #[arg(long)]
    record_every: Option<usize>,
    /// Report JSON path (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV output path
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Series {
    #[arg(long)]
    samples: Option<usize>,
    /// finite_difference, closed_form_eq8, closed_form_grover or closed_form_deutsch
    #[arg(long, value_parser = parse_keyword::<CoefficientSource>)]
    source: Option<CoefficientSource>,
    #[arg(long)]
    fd_step: Option<f64>,
    /// corrected or paper_literal
    #[arg(long, value_parser = parse_keyword::<FConvention>)]
    f_convention: Option<FConvention>,
}

impl Common {
    fn into_config(self, name: &str) -> (Option<PathBuf>, RunConfig) {
        let cfg = RunConfig {
            command: Some(name.to_string()),
            tau: self.tau,
            steps: self.steps,
            method: self.method,
            record_every: self.record_every,
            out: self.out,
            csv: self.csv,
            ..Default::default()
        };
        (self.config, cfg)
    }
}

impl Series {
    fn apply(self, cfg: RunConfig) -> RunConfig {
        RunConfig {
            samples: self.samples,
            source: self.source,
            fd_step: self.fd_step,
            f_convention: self.f_convention,
            ..cfg
        }
    }
}

type Runner = fn(&RunConfig) -> Result<(), CliError>;

fn resolve(command: Command) -> (Option<PathBuf>, RunConfig, Runner) {
    match command {
        Command::Deutsch {
            common,
            f,
            mode,
            series,
        } => {
            let (file, cfg) = common.into_config("deutsch");
            (
                file,
                series.apply(RunConfig { f, mode, ..cfg }),
                run::deutsch,
            )
        }
        Command::Grover {
            common,
            n,
            marked,
            theta_final,
            a,
            theta_mode,
            reduced,
        } => {
            let (file, cfg) = common.into_config("grover");
            let reduced = reduced.then_some(true);
            let cfg = RunConfig {
                n,
                marked,
                theta_final,
                a,
                theta_mode,
                reduced,
                ..cfg
            };
            (file, cfg, run::grover)
        }
        Command::Extract { common, series, f } => {
            let (file, cfg) = common.into_config("extract");
            (file, series.apply(RunConfig { f, ..cfg }), run::extract)
        }
        Command::Evolve {
            common,
            fd_step,
            populations,
        } => {
            let (file, cfg) = common.into_config("evolve");
            (
                file,
                RunConfig {
                    fd_step,
                    populations,
                    ..cfg
                },
                run::evolve,
            )
        }
        Command::Validate { common, samples } => {
            let (file, cfg) = common.into_config("validate");
            (file, RunConfig { samples, ..cfg }, run::validate)
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (file, flags, runner) = resolve(cli.command);
    let cfg = match file {
        Some(path) => RunConfig::load(&path)?.overlay(flags),
        None => flags,
    };
    runner(&cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Parse(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code());
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition() {
        Cli::command().debug_assert();
    }

    #[test]
    fn every_flag_parses() {
        for args in [
            &[
                "hiqe",
                "evolve",
                "--populations",
                "0,1",
                "--fd-step",
                "1e-5",
            ][..],
            &[
                "hiqe",
                "grover",
                "--n",
                "3",
                "--a",
                "-1",
                "--theta-mode",
                "linear",
                "--reduced",
            ],
            &[
                "hiqe",
                "extract",
                "--source",
                "closed_form_deutsch",
                "--f",
                "1,1",
                "--samples",
                "3",
            ],
            &["hiqe", "validate", "--samples", "5", "--method", "rk4"],
        ] {
            let cli = Cli::try_parse_from(args).unwrap();
            let _ = resolve(cli.command);
        }
    }
}
