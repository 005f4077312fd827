//! `kronseq`: construct digital sequences over F_b((z^-1)) and verify
//! their equidistribution structure with exact arithmetic.
//!
//! Exit codes: 0 on success, 1 on validation or input errors, 2 when a
//! run completed but an internal consistency assertion failed (the two
//! oracles disagreed or a verified identity missed its tolerance — a bug,
//! not a property of the input).

mod commands;
mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::CmdOutput;
use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "kronseq",
    version,
    about = "Exact digital Kronecker sequences: generation, discrepancy, and spectral verification"
)]
struct Cli {
    /// JSON run configuration (field, bijections, series).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for all randomized spot checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads; outputs are identical for every value.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Output path (default: the config's "out", else stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit the first `count` points as CSV (digit strings and exact values).
    Gen {
        /// Number of points.
        #[arg(long)]
        count: u64,
        /// Digits per coordinate (default: config point_precision).
        #[arg(long)]
        prec: Option<usize>,
        /// Generate through the Hankel matrices instead of series arithmetic.
        #[arg(long)]
        digital: bool,
    },
    /// Exact counting error against a box, or exhaustive star discrepancy.
    Disc {
        /// Prefix length N.
        #[arg(long)]
        count: u64,
        /// Digits per coordinate (default: config point_precision).
        #[arg(long)]
        prec: Option<usize>,
        /// Box edge digits, one per coordinate (e.g. 0.11).
        #[arg(long)]
        gamma: Vec<String>,
        /// Repeating digit tail for the matching --gamma (empty = finite).
        #[arg(long = "gamma-periodic")]
        gamma_periodic: Vec<String>,
        /// Compute the star discrepancy over all boxes instead.
        #[arg(long)]
        star: bool,
    },
    /// Cross-check block quality: exhaustive interval counting vs matrix ranks.
    NetCheck {
        /// Block depth: checks the first b^m points.
        #[arg(long)]
        m: usize,
        /// Also test this specific quality parameter.
        #[arg(long)]
        t: Option<usize>,
    },
    /// Weak-admissibility report at block depth m.
    Admissibility {
        #[arg(long)]
        m: u32,
    },
    /// Basis of the block character sum's support.
    Dual {
        /// Block depth.
        #[arg(long)]
        m: usize,
        /// Spatial digit depth (default: derived from admissibility).
        #[arg(long)]
        tau: Option<usize>,
    },
    /// Seeded comparison of direct counting with the character expansion.
    WalshVerify {
        /// Block depth.
        #[arg(long)]
        m: usize,
        /// Spatial digit depth (default: derived from admissibility).
        #[arg(long)]
        tau: Option<usize>,
        /// Number of seeded trials.
        #[arg(long, default_value_t = 5)]
        trials: usize,
        /// Blocks are drawn from A in [1, block-max].
        #[arg(long = "block-max", default_value_t = 8)]
        block_max: u64,
    },
    /// PASS/FAIL table of the block-decomposition identities.
    LemmaSuite {
        /// Block depth.
        #[arg(long)]
        m: usize,
    },
    /// Counting-error growth profile over base-b ranges, with verdict.
    Brs {
        /// Box edge digits, one per coordinate.
        #[arg(long)]
        gamma: Vec<String>,
        /// Repeating digit tail for the matching --gamma (empty = finite).
        #[arg(long = "gamma-periodic")]
        gamma_periodic: Vec<String>,
        /// Largest prefix length to scan.
        #[arg(long, default_value_t = 65536)]
        nmax: u64,
        /// Points are generated in chunks of b^block_m.
        #[arg(long = "block-m", default_value_t = 10)]
        block_m: usize,
        /// Digits per coordinate for membership tests (default: config point_precision).
        #[arg(long)]
        prec: Option<usize>,
    },
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            return 1;
        }
    };
    let config_path = match &cli.config {
        Some(p) => p.clone(),
        None => {
            eprintln!("error: --config is required");
            return 1;
        }
    };
    let cfg = match RunConfig::load(&config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let threads = cli.threads.max(1);
    let result = dispatch(&cli, &cfg, threads);
    match result {
        Ok(out) => {
            if let Err(e) = write_output(&out.text, cli.out.as_deref(), cfg.out.as_deref()) {
                eprintln!("error: {e}");
                return 1;
            }
            if out.ok {
                0
            } else {
                2
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: &Cli, cfg: &RunConfig, threads: usize) -> kronseq::Result<CmdOutput> {
    match &cli.cmd {
        Cmd::Gen { count, prec, digital } => {
            let prec = prec.unwrap_or(cfg.point_precision);
            commands::cmd_gen(cfg, *count, prec, *digital).map(CmdOutput::clean)
        }
        Cmd::Disc { count, prec, gamma, gamma_periodic, star } => {
            let prec = prec.unwrap_or(cfg.point_precision);
            commands::cmd_disc(cfg, *count, prec, gamma, gamma_periodic, *star)
                .map(CmdOutput::clean)
        }
        Cmd::NetCheck { m, t } => commands::cmd_net_check(cfg, *m, *t),
        Cmd::Admissibility { m } => commands::cmd_admissibility(cfg, *m).map(CmdOutput::clean),
        Cmd::Dual { m, tau } => commands::cmd_dual(cfg, *m, *tau).map(CmdOutput::clean),
        Cmd::WalshVerify { m, tau, trials, block_max } => commands::cmd_walsh_verify(
            cfg, *m, *tau, *trials, *block_max, cli.seed, threads,
        ),
        Cmd::LemmaSuite { m } => commands::cmd_lemma_suite(cfg, *m, cli.seed, threads),
        Cmd::Brs { gamma, gamma_periodic, nmax, block_m, prec } => {
            let prec = prec.unwrap_or(cfg.point_precision);
            commands::cmd_brs(cfg, gamma, gamma_periodic, *nmax, *block_m, prec, threads)
                .map(CmdOutput::clean)
        }
    }
}

fn write_output(
    text: &str,
    flag: Option<&std::path::Path>,
    cfg_out: Option<&str>,
) -> kronseq::Result<()> {
    let target = flag
        .map(PathBuf::from)
        .or_else(|| cfg_out.map(PathBuf::from));
    match target {
        Some(path) => std::fs::write(&path, text).map_err(|e| {
            kronseq::Error::validation(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
