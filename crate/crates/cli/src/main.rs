//! `klyachko`: command-line front end.
//!
//! Exit codes: 0 success, 1 the Gelfand property failed, 2 resource
//! refusal, 3 internal invariant violation, 4 invalid input.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Outcome;

#[derive(Debug, Parser)]
#[command(name = "klyachko", version, about = "Klyachko models: finite-field verification and symbolic calculus")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Worker threads for the parallel engine (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Debug, Args)]
struct GroupArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: u32,
    /// Override the arena prime (must be ≡ 1 mod the root order and > 2|G|).
    #[arg(long)]
    ell: Option<u64>,
    #[arg(long, env = "KLYACHKO_MAX_ELEMENTS", default_value_t = klyachko_core::gl::DEFAULT_MAX_ELEMENTS)]
    max_elements: u64,
    /// Largest admissible field order.
    #[arg(long, default_value_t = klyachko_core::field::DEFAULT_MAX_ORDER)]
    max_q: u32,
    #[arg(long, env = "KLYACHKO_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Seed for the eigenspace splitting.
    #[arg(long, default_value_t = klyachko_core::character::DEFAULT_EIGEN_SEED)]
    seed: u64,
    /// Run everything on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Multiplicity of every irreducible of GL_n(F_q) in each Klyachko model.
    VerifyGelfand {
        #[command(flatten)]
        group: GroupArgs,
        /// ψ = ζ_p^{psi · Tr}, for psi in [1, p).
        #[arg(long, default_value_t = 1)]
        psi: u32,
    },
    /// Dump conjugacy classes and the character table (values mod ℓ).
    Table {
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Model type κ of a unitary parameter such as "U(rho:1,1,3)@0".
    Kappa {
        param: String,
        /// Expected total degree.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Chain of highest derivatives of a parameter.
    Derive { param: String },
    /// Period formula of L(σ, t).
    Period {
        #[arg(long)]
        t: u32,
        /// Evaluate with L(j) = ζ(j), Res = 1 and Alpha = 1.
        #[arg(long)]
        zeta: bool,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Which constant-term summands survive the residue at Λ_t.
    ResidueSurvival {
        #[arg(long)]
        t: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => commands::EXIT_INPUT,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(commands::EXIT_INPUT);
        }
        klyachko_core::parallel::configure_threads(t);
    }
    let result = match cli.command {
        Command::VerifyGelfand { group, psi } => commands::verify_gelfand(&group.into(), psi),
        Command::Table { group } => commands::table(&group.into()),
        Command::Kappa { param, n } => commands::kappa(&param, n),
        Command::Derive { param } => commands::derive(&param),
        Command::Period { t, zeta, tol } => commands::period(t, zeta, tol),
        Command::ResidueSurvival { t } => commands::residue_survival(t),
    };
    match result {
        Ok(Outcome { json, text, code }) => {
            let body = match cli.format {
                Format::Json => format!("{}\n", serde_json::to_string_pretty(&json).unwrap()),
                Format::Text => text,
            };
            // A closed pipe downstream is not an error of ours.
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(body.as_bytes()).and_then(|_| out.flush());
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

impl From<GroupArgs> for commands::GroupConfig {
    fn from(a: GroupArgs) -> Self {
        commands::GroupConfig {
            n: a.n,
            q: a.q,
            ell: a.ell,
            max_elements: a.max_elements,
            max_q: a.max_q,
            cache_dir: a.cache_dir,
            seed: a.seed,
            sequential: a.sequential,
        }
    }
}
