//! `mdpcert` — certifying model checking for finite MDPs.
//!
//! Three commands: `certify` computes two-sided bounds and writes
//! self-contained fixed-point certificates, `check` re-validates a
//! certificate with exact rational arithmetic (no solver code on that path),
//! and `oracle` prints brute-force reference values for small models.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mdpcert_cli::{cert_format, model_format, query, rational};
use mdpcert_core::certificate::{check_certificate, BoundDir, Certificate};
use mdpcert_core::model::Mdp;
use mdpcert_solvers::{BoundReq, GenerateError, Method, Rounding, SolverConfig, SolverError};

// Exit codes are part of the external interface.
const EXIT_USAGE: u8 = 1;
const EXIT_SOLVER: u8 = 2;
const EXIT_INVALID_GENERATED: u8 = 3;
const EXIT_INVALID_CERTIFICATE: u8 = 4;
const EXIT_CAP_EXCEEDED: u8 = 5;

#[derive(Parser)]
#[command(name = "mdpcert", about = "Fixed-point certificates for MDP model checking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute bounds and write certificate file(s).
    Certify(CertifyArgs),
    /// Validate a certificate against a model.
    Check(CheckArgs),
    /// Print exact reference values by strategy enumeration.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long)]
    model: PathBuf,
    /// Property, e.g. "Pmin=? [F target]" or "Emax=? [F goal] semantics=rho".
    #[arg(long)]
    query: String,
    #[arg(long, default_value = "both")]
    bound: String,
    #[arg(long, default_value = "pi")]
    method: String,
    /// Relative gap target (rational or decimal).
    #[arg(long, default_value = "1/1000000")]
    epsilon: String,
    /// Smoothing parameter in [0,1); defaults to 1/20 with safe rounding and
    /// 9/10 without.
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long, default_value = "safe")]
    rounding: String,
    /// Significand bits of the emulated binary arithmetic.
    #[arg(long, default_value_t = 53)]
    precision_bits: u32,
    /// Output path; `--bound both` writes `<out>.lower` and `<out>.upper`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    certificate: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    query: String,
    /// Strategy enumeration cap.
    #[arg(long, default_value_t = 100_000)]
    cap: u128,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version are successful outputs, anything else is a
            // usage error with the documented exit code.
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match cli.command {
        Command::Certify(args) => cmd_certify(args),
        Command::Check(args) => cmd_check(args),
        Command::Oracle(args) => cmd_oracle(args),
    }
}

/// Prints to stdout, tolerating a closed pipe (e.g. `mdpcert ... | head`).
fn emit(message: std::fmt::Arguments<'_>) {
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{message}");
}

macro_rules! out {
    ($($arg:tt)*) => { emit(format_args!($($arg)*)) };
}

fn usage_error(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(EXIT_USAGE)
}

fn load_model(path: &Path) -> Result<Mdp, ExitCode> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage_error(format_args!("cannot read {}: {e}", path.display())))?;
    model_format::parse_model(&text).map_err(usage_error)
}

fn cmd_certify(args: CertifyArgs) -> ExitCode {
    let model = match load_model(&args.model) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let parsed = match query::parse_query(&args.query) {
        Ok(q) => q,
        Err(e) => return usage_error(e),
    };
    let req = match args.bound.as_str() {
        "lower" => BoundReq::Lower,
        "upper" => BoundReq::Upper,
        "both" => BoundReq::Both,
        other => return usage_error(format_args!("unknown bound '{other}'")),
    };
    let method = match args.method.as_str() {
        "pi" => Method::Pi,
        "ii" => Method::Ii,
        other => return usage_error(format_args!("unknown method '{other}'")),
    };
    let rounding = match args.rounding.as_str() {
        "safe" => Rounding::Safe,
        "none" => Rounding::None,
        other => return usage_error(format_args!("unknown rounding '{other}'")),
    };
    let epsilon = match rational::parse_rat(&args.epsilon) {
        Ok(r) => r,
        Err(e) => return usage_error(e),
    };
    let gamma = match &args.gamma {
        Some(text) => match rational::parse_rat(text) {
            Ok(r) => r,
            Err(e) => return usage_error(e),
        },
        None => SolverConfig::default_gamma(rounding),
    };
    let cfg = SolverConfig {
        epsilon,
        gamma,
        rounding,
        precision_bits: args.precision_bits,
        method,
        ..SolverConfig::default()
    };
    if let Err(e) = cfg.validate() {
        return usage_error(e);
    }

    let certificates = match mdpcert_solvers::generate_certificates(
        &model,
        parsed.objective,
        parsed.semantics,
        &parsed.target_label,
        req,
        &cfg,
    ) {
        Ok(certs) => certs,
        Err(GenerateError::UnknownLabel(l)) => {
            return usage_error(format_args!("unknown label '{l}'"))
        }
        Err(e @ GenerateError::Reverify { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID_GENERATED);
        }
        Err(GenerateError::Solver(e @ SolverError::FloatBreakage { .. })) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID_GENERATED);
        }
        Err(GenerateError::Solver(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_SOLVER);
        }
        Err(GenerateError::Check(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_SOLVER);
        }
    };

    for cert in &certificates {
        let path = certificate_path(&args.out, req, cert.query.bound);
        if let Err(e) = std::fs::write(&path, cert_format::write_certificate(cert)) {
            return usage_error(format_args!("cannot write {}: {e}", path.display()));
        }
        out!("{} certificate written to {}", cert.query.bound, path.display());
        print_summary(cert);
    }
    ExitCode::SUCCESS
}

fn certificate_path(out: &Path, req: BoundReq, bound: BoundDir) -> PathBuf {
    match req {
        BoundReq::Both => {
            let mut name = out.as_os_str().to_owned();
            name.push(match bound {
                BoundDir::Lower => ".lower",
                BoundDir::Upper => ".upper",
            });
            PathBuf::from(name)
        }
        _ => out.to_path_buf(),
    }
}

fn print_summary(cert: &Certificate) {
    for (s, v) in cert.x.iter().enumerate() {
        out!("{}: s{} = {}", cert.query.bound, s, v);
    }
}

fn cmd_check(args: CheckArgs) -> ExitCode {
    let model = match load_model(&args.model) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let text = match std::fs::read_to_string(&args.certificate) {
        Ok(t) => t,
        Err(e) => return usage_error(format_args!("cannot read {}: {e}", args.certificate.display())),
    };
    let cert = match cert_format::parse_certificate(&text) {
        Ok(c) => c,
        Err(e) => return usage_error(e),
    };
    if cert.x.len() != model.num_states() {
        return usage_error(format_args!(
            "dimension mismatch: certificate has {} states, model has {}",
            cert.x.len(),
            model.num_states()
        ));
    }
    match check_certificate(&model, &cert) {
        Ok(verdict) if verdict.is_valid() => {
            out!("valid");
            ExitCode::SUCCESS
        }
        Ok(verdict) => {
            for failure in &verdict.failures {
                eprintln!("{failure}");
            }
            out!("invalid");
            ExitCode::from(EXIT_INVALID_CERTIFICATE)
        }
        Err(e) => usage_error(e),
    }
}

fn cmd_oracle(args: OracleArgs) -> ExitCode {
    let model = match load_model(&args.model) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let parsed = match query::parse_query(&args.query) {
        Ok(q) => q,
        Err(e) => return usage_error(e),
    };
    if model.label(&parsed.target_label).is_none() {
        return usage_error(format_args!("unknown label '{}'", parsed.target_label));
    }
    let q = mdpcert_core::certificate::Query {
        objective: parsed.objective,
        semantics: parsed.semantics,
        target_label: parsed.target_label,
        bound: BoundDir::Lower,
        epsilon: mdpcert_core::numeric::rat(1, 1_000_000),
    };
    match mdpcert_oracle::optimal_exact_capped(&model, &q, args.cap) {
        Ok(result) => {
            for (s, v) in result.values.iter().enumerate() {
                out!("s{s} = {v}");
            }
            let choices: Vec<String> = result
                .arg_strategy
                .choice
                .iter()
                .enumerate()
                .map(|(s, a)| format!("s{s}->a{a}"))
                .collect();
            out!("strategy: {}", choices.join(" "));
            ExitCode::SUCCESS
        }
        Err(e @ mdpcert_oracle::OracleError::CapExceeded { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_CAP_EXCEEDED)
        }
        Err(e) => usage_error(e),
    }
}
