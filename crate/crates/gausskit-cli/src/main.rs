//! `gausskit` command-line front end.
//!
//! Every subcommand reads a JSON file (`-` for stdin), calls one library
//! operation and prints JSON (or CSV where offered) on stdout. Exit status:
//! 0 on success, 2 when the input is well formed but fails validation, and 1
//! for usage errors and malformed input.

use std::io::Read;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use gausskit::fock::{density_matrix, state_vector};
use gausskit::io;
use gausskit::params::{cov_to_e2, e2_to_cov, is_pure, trace_of_positive, validity_margin, E2Params};
use gausskit::states::{
    characteristic_function, entanglement_report, marginal, GaussianState, ModeBipartition,
};
use gausskit::tomography::{estimate, extended_battery, simulate, standard_battery};
use gausskit::{C64, CVec, Error};

#[derive(Parser, Debug)]
#[command(name = "gausskit", version, about = "Gaussian states in E2 parameters")]
struct Cli {
    /// Positivity and structure tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Battery {
    Standard,
    Extended,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Converts E2 parameters to mean/covariance form and back.
    Convert {
        #[arg(long)]
        state: String,
    },
    /// Checks Λ ⪰ 0, M(A,Λ) ≻ 0 and unit trace.
    Validate {
        #[arg(long)]
        state: String,
    },
    /// Density matrix on the window of total number ≤ cutoff.
    Dmf {
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 20)]
        cutoff: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// State vector of a pure state on the window of total number ≤ cutoff.
    Statevec {
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 20)]
        cutoff: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Reduced state on the listed modes (1-based, comma separated).
    Marginal {
        #[arg(long)]
        state: String,
        #[arg(long)]
        split: String,
    },
    /// Separability of a pure state across one split or all of them.
    Entanglement {
        #[arg(long)]
        state: String,
        #[arg(long)]
        split: Option<String>,
    },
    /// Quantum characteristic function tr ρW(z).
    Charfn {
        #[arg(long)]
        state: String,
        /// Point z as `re,im;re,im;...`, one pair per mode.
        #[arg(long)]
        z: String,
    },
    /// Simulates the tomography battery.
    TomoSimulate {
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 1_000_000)]
        shots: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Battery::Extended)]
        battery: Battery,
    },
    /// Estimates parameters from simulated or recorded counts.
    TomoEstimate {
        /// Measurement records; defaults to stdin.
        #[arg(long, default_value = "-")]
        state: String,
    },
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Usage(String),
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::Shape(_) | Error::NotSymmetric(_) | Error::NotHermitian(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Invalid(other.to_string()),
        }
    }
}

fn read_input(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
    }
    Ok(text)
}

fn read_json(path: &str) -> Result<Value, Failure> {
    Ok(io::parse(&read_input(path)?)?)
}

/// Reads a state given either as E2 parameters or as mean/covariance.
fn read_state_params(path: &str, tol: f64) -> Result<E2Params, Failure> {
    match io::params_from_json(&read_json(path)?, tol)? {
        io::ParamsFile::State(p) => Ok(p),
        io::ParamsFile::Covariance(c) => Ok(cov_to_e2(&c, tol)?),
        io::ParamsFile::Operator(g) => Ok(g.to_positive(tol)?),
    }
}

fn read_state(path: &str, tol: f64) -> Result<GaussianState, Failure> {
    Ok(GaussianState::new(read_state_params(path, tol)?, tol)?)
}

fn parse_modes(list: &str, n: usize) -> Result<ModeBipartition, Failure> {
    let modes = list
        .split(',')
        .map(|s| match s.trim().parse::<usize>() {
            Ok(j) if j >= 1 => Ok(j - 1),
            _ => Err(Failure::Usage(format!("--split: `{s}` is not a mode number (1-based)"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    ModeBipartition::new(modes, n).map_err(|e| Failure::Usage(format!("--split: {e}")))
}

fn parse_point(text: &str, n: usize) -> Result<CVec, Failure> {
    let bad = |s: &str| Failure::Usage(format!("--z: `{s}` is not `re,im`"));
    let z = text
        .split(';')
        .map(|pair| {
            let parts: Vec<&str> = pair.split(',').collect();
            match parts.as_slice() {
                [re, im] => Ok(C64::new(re.trim().parse().map_err(|_| bad(pair))?, im.trim().parse().map_err(|_| bad(pair))?)),
                _ => Err(bad(pair)),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    if z.len() != n {
        return Err(Failure::Usage(format!("--z: expected {n} pairs, found {}", z.len())));
    }
    Ok(CVec::from_vec(z))
}

enum Output {
    Json(Value),
    Text(String),
    /// JSON output together with a validation failure.
    Rejected(Value),
}

fn run(cli: Cli) -> Result<Output, Failure> {
    let tol = cli.tol;
    if !(tol > 0.0) {
        return Err(Failure::Usage("--tol must be positive".into()));
    }
    match cli.command {
        Command::Convert { state } => match io::params_from_json(&read_json(&state)?, tol)? {
            io::ParamsFile::State(p) => Ok(Output::Json(io::cov_to_json(&e2_to_cov(&p, tol)?))),
            io::ParamsFile::Covariance(c) => Ok(Output::Json(io::e2_to_json(&cov_to_e2(&c, tol)?))),
            io::ParamsFile::Operator(g) => Ok(Output::Json(io::cov_to_json(&e2_to_cov(&g.to_positive(tol)?, tol)?))),
        },
        Command::Validate { state } => {
            let p = read_state_params(&state, tol)?;
            let margin = validity_margin(&p.a, &p.lambda)?;
            let checked = GaussianState::new(p.clone(), tol);
            let trace = trace_of_positive(&p, tol).ok();
            let mut report = json!({
                "valid": checked.is_ok(),
                "min_eig_M": margin,
                "trace": trace,
                "pure": is_pure(&p, tol),
            });
            match checked {
                Ok(s) => {
                    report["min_eig_uncertainty"] = json!(s.cov().uncertainty_min_eigenvalue());
                    Ok(Output::Json(report))
                }
                Err(e) => {
                    report["reason"] = json!(e.to_string());
                    Ok(Output::Rejected(report))
                }
            }
        }
        Command::Dmf { state, cutoff, format } => {
            let s = read_state(&state, tol)?;
            let rho = density_matrix(s.params(), cutoff);
            match format {
                Format::Csv => Ok(Output::Text(io::operator_to_csv(&rho)?)),
                Format::Json => {
                    let mut v = io::operator_to_json(&rho);
                    let tail = rho.tail();
                    v["tail"] = json!({ "deficit": tail.deficit, "extrapolated": tail.extrapolated });
                    Ok(Output::Json(v))
                }
            }
        }
        Command::Statevec { state, cutoff, format } => {
            let s = read_state(&state, tol)?;
            let psi = state_vector(s.params(), cutoff, tol)?;
            match format {
                Format::Csv => Ok(Output::Text(io::vector_to_csv(&psi)?)),
                Format::Json => {
                    let mut v = io::vector_to_json(&psi);
                    let tail = psi.tail();
                    v["tail"] = json!({ "deficit": tail.deficit, "extrapolated": tail.extrapolated });
                    Ok(Output::Json(v))
                }
            }
        }
        Command::Marginal { state, split } => {
            let s = read_state(&state, tol)?;
            let keep = parse_modes(&split, s.n())?;
            Ok(Output::Json(io::e2_to_json(marginal(&s, &keep, tol)?.params())))
        }
        Command::Entanglement { state, split } => {
            let s = read_state(&state, tol)?;
            let splits = match split {
                Some(list) => vec![parse_modes(&list, s.n())?],
                None => Vec::new(),
            };
            let report = entanglement_report(&s, &splits, tol)?;
            let mut map = Map::new();
            for v in &report.splits {
                map.insert(v.split.label(), json!({ "separable": v.separable, "offdiag_norm": v.offdiag_norm }));
            }
            Ok(Output::Json(json!({ "splits": map, "completely_entangled": report.completely_entangled })))
        }
        Command::Charfn { state, z } => {
            let s = read_state(&state, tol)?;
            let point = parse_point(&z, s.n())?;
            let value = characteristic_function(&s, &point)?;
            Ok(Output::Json(json!({ "value": [value.re, value.im] })))
        }
        Command::TomoSimulate { state, shots, seed, battery } => {
            let s = read_state(&state, tol)?;
            let specs = match battery {
                Battery::Standard => standard_battery(s.n()),
                Battery::Extended => extended_battery(s.n()),
            };
            let records = simulate(s.params(), &specs, shots, seed, tol)?;
            Ok(Output::Json(io::records_to_json(&records)))
        }
        Command::TomoEstimate { state } => {
            let records = io::records_from_json(&read_json(&state)?)?;
            Ok(Output::Json(io::report_to_json(&estimate(&records)?)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = std::env::var("GAUSSKIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // Only fails if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    match run(cli) {
        Ok(Output::Json(v)) => {
            println!("{}", io::to_string(&v));
            ExitCode::SUCCESS
        }
        Ok(Output::Text(t)) => {
            print!("{t}");
            ExitCode::SUCCESS
        }
        Ok(Output::Rejected(v)) => {
            println!("{}", io::to_string(&v));
            ExitCode::from(2)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
