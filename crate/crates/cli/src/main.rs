//! `syzmirror` command line: mirror families, superpotentials, fibration
//! bases and verification suites for semi-projective toric Calabi-Yau input.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use syzmirror::pipeline::{run_pipeline, Command, Flags};

#[derive(Parser)]
#[command(
    name = "syzmirror",
    version,
    about = "SYZ mirror construction for semi-projective toric Calabi-Yau manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct CommonFlags {
    /// Fan input file (TOML-style .fan document)
    fan: PathBuf,
    /// Gauge cone as comma-separated 1-based ray indices, e.g. 1,2,4
    #[arg(long, value_delimiter = ',')]
    gauge_cone: Option<Vec<usize>>,
    /// Wall height |eps| (overrides the fan file value)
    #[arg(long)]
    eps: Option<f64>,
    /// RNG seed for sampling checks
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample count for sampling checks
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Newton / verification tolerance
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Write an SVG rendering to this path (discriminant command)
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Emit the full JSON report instead of plain text
    #[arg(long)]
    json: bool,
    /// Bypass the result cache
    #[arg(long)]
    no_cache: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validate Calabi-Yau, smoothness and semi-projectivity
    Check(CommonFlags),
    /// Solve the mirror family and print its equation
    Mirror(CommonFlags),
    /// Superpotential terms at the canonical interior fiber
    Superpotential(CommonFlags),
    /// Discriminant graph in the wall of the Gross base
    Discriminant(CommonFlags),
    /// Embedding into the mirror of flat space, with residual relations
    Embed(CommonFlags),
    /// Random-disk area/index verification batch
    Disks(CommonFlags),
    /// Critical points of the mirror curve at the numeric parameters
    CriticalPoints(CommonFlags),
    /// Run the full invariant suite
    Verify(CommonFlags),
}

fn split(cmd: Cmd) -> (Command, CommonFlags) {
    match cmd {
        Cmd::Check(f) => (Command::Check, f),
        Cmd::Mirror(f) => (Command::Mirror, f),
        Cmd::Superpotential(f) => (Command::Superpotential, f),
        Cmd::Discriminant(f) => (Command::Discriminant, f),
        Cmd::Embed(f) => (Command::Embed, f),
        Cmd::Disks(f) => (Command::Disks, f),
        Cmd::CriticalPoints(f) => (Command::CriticalPoints, f),
        Cmd::Verify(f) => (Command::Verify, f),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common) = split(cli.command);
    let flags = Flags {
        gauge_cone: common.gauge_cone,
        eps: common.eps,
        seed: common.seed,
        samples: common.samples,
        tol: common.tol,
        svg: common.svg,
        json: common.json,
        no_cache: common.no_cache,
    };
    let out = run_pipeline(command, &common.fan, &flags);
    std::io::stdout()
        .write_all(&out.stdout)
        .expect("stdout write");
    ExitCode::from(out.exit_code as u8)
}
