use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mtpga_cli::commands::{self, FitOptions};
use mtpga_cli::manifest::PreprocessingOverrides;
use mtpga_cli::service::{self, ServiceState};
use mtpga_cli::{CliError, Result};
use mtpga_core::pga::PgaParams;
use mtpga_core::EnsembleKind;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "mtpga", version, about = "Principal geodesic analysis of merge tree ensembles")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Join,
    Split,
    Diagram,
}

impl From<Kind> for EnsembleKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Join => EnsembleKind::Join,
            Kind::Split => EnsembleKind::Split,
            Kind::Diagram => EnsembleKind::Diagram,
        }
    }
}

#[derive(Args)]
struct PreFlags {
    /// Persistence simplification threshold, fraction of the range.
    #[arg(long)]
    simplify: Option<f64>,
    /// Saddle merging threshold; 1 gives persistence diagrams.
    #[arg(long)]
    eps1: Option<f64>,
    /// Branch reattachment threshold (relative to the parent).
    #[arg(long)]
    eps2: Option<f64>,
    /// Branch reattachment threshold (relative to the root).
    #[arg(long)]
    eps3: Option<f64>,
    #[arg(long, value_enum)]
    tree_kind: Option<Kind>,
}

impl PreFlags {
    fn overrides(&self) -> PreprocessingOverrides {
        PreprocessingOverrides {
            simplify: self.simplify,
            eps1: self.eps1,
            eps2: self.eps2,
            eps3: self.eps3,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fit a basis to the ensemble listed in a manifest.
    Fit {
        #[arg(short, long)]
        manifest: PathBuf,
        #[arg(short, long, default_value = "basis.json")]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        dmax: usize,
        #[arg(long, default_value_t = PgaParams::DEFAULT_N1_RATIO)]
        n1_ratio: f64,
        #[arg(long, default_value_t = PgaParams::DEFAULT_N2)]
        n2: usize,
        #[command(flatten)]
        pre: PreFlags,
    },
    /// Print the BDT and merge tree at the given coordinates.
    Reconstruct {
        basis: PathBuf,
        /// Comma-separated coordinates, e.g. `0.3,0.7`.
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
    },
    /// Print the 2D layout of the members.
    Layout {
        basis: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Print projected variances, SIM, correlations and compression.
    Stats {
        basis: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Serve the basis over HTTP.
    Serve {
        basis: PathBuf,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Directory with the explorer's static assets.
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
    /// W^T_2 distance between two members (`.grid` or BDT JSON).
    Distance {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        pre: PreFlags,
    },
}

fn emit<T: Serialize>(value: &T, out: Option<&PathBuf>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    match out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| CliError::Data(e.to_string()))
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Data(e.to_string()))?;
    }
    match cli.command {
        Command::Fit {
            manifest,
            out,
            dmax,
            n1_ratio,
            n2,
            pre,
        } => {
            let summary = commands::fit(&FitOptions {
                manifest,
                out,
                d_max: dmax,
                n1_ratio,
                n2,
                tree_kind: pre.tree_kind.map(Into::into),
                preprocessing: pre.overrides(),
            })?;
            emit(&summary, None)
        }
        Command::Reconstruct { basis, alpha } => {
            let alpha = commands::parse_alpha(&alpha)?;
            emit(&commands::cmd_reconstruct(&basis, &alpha)?, None)
        }
        Command::Layout { basis, out } => emit(&commands::cmd_layout(&basis)?, out.as_ref()),
        Command::Stats { basis, out } => emit(&commands::cmd_stats(&basis)?, out.as_ref()),
        Command::Serve {
            basis,
            port,
            static_dir,
        } => {
            let archive = commands::load_archive(&basis)?;
            let ensemble = commands::load_ensemble_file(&basis).ok().map(|e| e.members);
            let state = ServiceState::new(archive, ensemble)?;
            let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Data(e.to_string()))?;
            runtime.block_on(service::serve(state, port, static_dir))
        }
        Command::Distance { a, b, pre } => {
            let kind = pre.tree_kind.map(Into::into).unwrap_or(EnsembleKind::Join);
            emit(&commands::cmd_distance(&a, &b, kind, &pre.overrides())?, None)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
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
