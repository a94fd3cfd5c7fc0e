use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qspectra::Quaternion;
use qspectra_cli::{run, Command, RunConfig};

#[derive(Parser)]
#[command(name = "qspectra", version, about = "Right spectrum and S-spectrum of quaternionic operators")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Matrix JSON or operator spec JSON.
    #[arg(long)]
    input: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Relative membership tolerance.
    #[arg(long, default_value_t = qspectra::spectral::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Spheres of the spectrum, confirmed by both routes and classified.
    Spectrum(Common),
    /// CSV of both smallest singular values over a window of the upper half-slice.
    Scan {
        #[command(flatten)]
        common: Common,
        /// x0,x1,y0,y1
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        window: Option<Vec<f64>>,
        /// W,H
        #[arg(long, value_delimiter = ',', default_value = "64,64")]
        res: Vec<usize>,
    },
    /// Factorization, slide identity, circularity and ball containment checks.
    Verify(Common),
    /// sigma_min of T_lambda over growing finite sections.
    Trend {
        #[command(flatten)]
        common: Common,
        /// a0,a1,a2,a3
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Vec<f64>,
        /// N1,N2,... strictly increasing
        #[arg(long, value_delimiter = ',', default_value = "16,32,64")]
        sizes: Vec<usize>,
    },
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(qspectra_cli::EXIT_INPUT as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Ok(v) = std::env::var("QSPECTRA_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => return usage_error(&format!("QSPECTRA_THREADS must be a positive integer, got {v:?}")),
        }
    }

    let (common, command) = match cli.command {
        Cmd::Spectrum(c) => (c, Command::Spectrum),
        Cmd::Verify(c) => (c, Command::Verify),
        Cmd::Scan { common, window, res } => {
            let window = match window.as_deref() {
                None => None,
                Some(&[x0, x1, y0, y1]) => Some([x0, x1, y0, y1]),
                Some(_) => return usage_error("--window takes four values x0,x1,y0,y1"),
            };
            let resolution = match res.as_slice() {
                &[w, h] => (w, h),
                _ => return usage_error("--res takes two values W,H"),
            };
            (common, Command::Scan { window, resolution })
        }
        Cmd::Trend { common, lambda, sizes } => {
            let lambda = match lambda.as_slice() {
                &[a0, a1, a2, a3] => Quaternion::new(a0, a1, a2, a3),
                _ => return usage_error("--lambda takes four values a0,a1,a2,a3"),
            };
            (common, Command::Trend { lambda, sizes })
        }
    };

    let config = RunConfig {
        command,
        input: common.input,
        output: common.output,
        tol: common.tol,
        seed: common.seed,
    };
    let (outcome, err) = run(&config);
    if let Some(e) = err {
        eprintln!("error: {e}");
    }
    ExitCode::from(outcome.code as u8)
}
