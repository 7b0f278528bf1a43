//! Command-line front end for the `genpoly` library.
//!
//! # Key operations
//!
//! * [`run`] parses an argument vector, dispatches to the library, and
//!   returns the process exit code.
//! * Subcommands: `check` (decide the defining identity, exit 0/1),
//!   `classify` (canonical form or failure report, exit 0/2), `generate`
//!   (seeded or parameterized instance synthesis), `enumerate` (grid
//!   sweeps with optional catalogue output), and `fourier` (print a
//!   function's multilinear expansion).
//!
//! Machine-readable output goes to standard output; diagnostics go to
//! standard error. Parse and validation problems exit with 64, resource
//! limits with 65, and internal invariant violations with 70. Output
//! bytes are deterministic for fixed flags and inputs, including the
//! `--threads` setting.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use genpoly::enumerator::DEFAULT_BUDGET;
use genpoly::{
    check_auto, check_fourier, check_pointwise, classify, enumerate_exhaustive, enumerate_sampled,
    generate, sample_params, write_catalogue, BooleanFunction, EnumOptions, Error, GenParams,
    MultilinearPoly, PolymorphismInstance, Profile, Result,
};

/// Top-level command-line configuration.
#[derive(Debug, Parser)]
#[command(
    name = "genpoly",
    about = "Analyze, check, classify, generate, and enumerate Boolean generalized polymorphisms",
    version
)]
pub struct CliConfig {
    /// Subcommand to run.
    #[command(subcommand)]
    pub command: Command,
}

/// Identity-checking routine selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Pointwise when the grid fits its budget, Fourier otherwise.
    Auto,
    /// Exhaustive scan over all grid points.
    Pointwise,
    /// Comparison of composed multilinear expansions.
    Fourier,
    /// Run both routines and require agreement.
    Both,
}

/// Generator profile selection (mirrors the library's profiles).
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    /// Multi-cell blocks use only the parity shape.
    XorOnly,
    /// Multi-cell blocks use only the conjunction shape.
    AndOrOnly,
    /// Blocks mix both shapes.
    Mixed,
    /// Forces at least one single-cell block.
    WithDictators,
    /// Adds constant and irrelevant coordinates.
    WithDegenerates,
}

impl From<ProfileArg> for Profile {
    fn from(arg: ProfileArg) -> Profile {
        match arg {
            ProfileArg::XorOnly => Profile::XorOnly,
            ProfileArg::AndOrOnly => Profile::AndOrOnly,
            ProfileArg::Mixed => Profile::Mixed,
            ProfileArg::WithDictators => Profile::WithDictators,
            ProfileArg::WithDegenerates => Profile::WithDegenerates,
        }
    }
}

/// Available subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether an instance satisfies the defining identity.
    Check {
        /// Instance file ("-" for standard input).
        instance: PathBuf,
        /// Checking routine.
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Compute the canonical form of an instance.
    Classify {
        /// Instance file ("-" for standard input).
        instance: PathBuf,
        /// Write the canonical JSON here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate an instance from explicit parameters or a seed.
    Generate {
        /// Generation-parameter JSON file ("-" for standard input);
        /// mutually exclusive with the sampling flags.
        #[arg(long, conflicts_with_all = ["seed", "n", "m", "profile"])]
        params: Option<PathBuf>,
        /// Sampling seed.
        #[arg(long, required_unless_present = "params")]
        seed: Option<u64>,
        /// Number of rows (inner g functions).
        #[arg(long, required_unless_present = "params")]
        n: Option<usize>,
        /// Number of columns (inner f functions).
        #[arg(long, required_unless_present = "params")]
        m: Option<usize>,
        /// Structural profile to sample.
        #[arg(long, value_enum, required_unless_present = "params")]
        profile: Option<ProfileArg>,
        /// Write the instance here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Enumerate function tuples on a grid and report statistics.
    Enumerate {
        /// Number of rows.
        #[arg(long)]
        n: usize,
        /// Number of columns.
        #[arg(long)]
        m: usize,
        /// Sample this many random tuples instead of sweeping exhaustively.
        #[arg(long, value_name = "COUNT")]
        sampled: Option<u64>,
        /// Seed for sampled mode.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the catalogue of canonical forms to this file.
        #[arg(long)]
        catalogue: Option<PathBuf>,
        /// Size of the thread pool (defaults to the number of cores).
        #[arg(long)]
        threads: Option<usize>,
        /// Exhaustive-mode budget on the combined truth-table bits.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Print the multilinear expansion of one function line.
    Fourier {
        /// Function text, e.g. "n=2 tt=0x8".
        function: String,
    },
}

/// Parses `argv` and runs the selected subcommand, returning the process
/// exit code.
pub fn run<I>(argv: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    let config = match CliConfig::try_parse_from(argv) {
        Ok(config) => config,
        Err(err) => {
            // Help and version requests are successful output, not errors.
            let code = if err.use_stderr() { 64 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(config.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

/// Maps library errors to exit codes: user input problems to 64, resource
/// limits to 65, classification failures to 2, a failed check to 1, and
/// internal invariant violations to 70.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) | Error::Validation(_) | Error::Io(_) | Error::Json(_) => 64,
        Error::Resource(_) => 65,
        Error::NotPolymorphism => 1,
        Error::Classify(_) => 2,
        Error::Internal(_) => 70,
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => {
            fs::write(path, text)?;
            Ok(())
        }
        None => {
            print!("{text}");
            std::io::stdout().flush()?;
            Ok(())
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Check { instance, method } => {
            let p = PolymorphismInstance::parse(&read_input(&instance)?)?;
            let holds = match method {
                Method::Auto => check_auto(&p)?,
                Method::Pointwise => check_pointwise(&p)?,
                Method::Fourier => check_fourier(&p)?,
                Method::Both => {
                    let pointwise = check_pointwise(&p)?;
                    let fourier = check_fourier(&p)?;
                    if pointwise != fourier {
                        return Err(Error::Internal(
                            "pointwise and Fourier checkers disagree".into(),
                        ));
                    }
                    pointwise
                }
            };
            println!("{holds}");
            Ok(if holds { 0 } else { 1 })
        }
        Command::Classify { instance, output } => {
            let p = PolymorphismInstance::parse(&read_input(&instance)?)?;
            match classify(&p) {
                Ok(form) => {
                    let mut json = form.to_json();
                    json.push('\n');
                    write_output(output.as_deref(), &json)?;
                    Ok(0)
                }
                Err(err @ (Error::NotPolymorphism | Error::Classify(_))) => {
                    let (stage, detail) = match &err {
                        Error::Classify(failure) => {
                            (failure.stage.as_str(), failure.detail.clone())
                        }
                        _ => ("identity", "the defining identity does not hold".into()),
                    };
                    let report = serde_json::json!({
                        "failure": { "stage": stage, "detail": detail }
                    });
                    let mut json = serde_json::to_string(&report)?;
                    json.push('\n');
                    write_output(output.as_deref(), &json)?;
                    eprintln!("error: {err}");
                    Ok(2)
                }
                Err(err) => Err(err),
            }
        }
        Command::Generate {
            params,
            seed,
            n,
            m,
            profile,
            output,
        } => {
            let gen_params: GenParams = match params {
                Some(path) => serde_json::from_str(&read_input(&path)?)?,
                None => {
                    // clap enforces presence of all four flags here.
                    let (seed, n, m, profile) = (
                        seed.expect("required by clap"),
                        n.expect("required by clap"),
                        m.expect("required by clap"),
                        profile.expect("required by clap"),
                    );
                    sample_params(seed, n, m, profile.into())?
                }
            };
            let p = generate(&gen_params)?;
            write_output(output.as_deref(), &p.to_text())?;
            Ok(0)
        }
        Command::Enumerate {
            n,
            m,
            sampled,
            seed,
            catalogue,
            threads,
            budget,
        } => {
            let opts = EnumOptions {
                budget,
                catalogue: catalogue.is_some(),
                ..EnumOptions::default()
            };
            let enumerate = || match sampled {
                Some(count) => enumerate_sampled(n, m, count, seed, &opts),
                None => enumerate_exhaustive(n, m, &opts),
            };
            let outcome = match threads {
                Some(threads) => {
                    let pool = rayon::ThreadPoolBuilder::new()
                        .num_threads(threads)
                        .build()
                        .map_err(|e| Error::Resource(format!("cannot build thread pool: {e}")))?;
                    pool.install(enumerate)?
                }
                None => enumerate()?,
            };
            if let Some(path) = catalogue {
                let file = fs::File::create(&path)?;
                let mut writer = BufWriter::new(file);
                write_catalogue(&outcome.records, &mut writer)?;
                writer.flush()?;
            }
            let mut json = serde_json::to_string(&outcome.report)?;
            json.push('\n');
            write_output(None, &json)?;
            Ok(0)
        }
        Command::Fourier { function } => {
            let f = BooleanFunction::parse(function.trim())?;
            let poly = MultilinearPoly::expand(&f);
            write_output(None, &poly.to_text())?;
            Ok(0)
        }
    }
}
