use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gridshell::cli_io::{run, Command, Flavor, LinePlacement, RunConfig, EXIT_INPUT};

/// Knot Floer homology, EL-shellability and flow-category checks on grid diagrams.
#[derive(Parser)]
#[command(name = "gridshell", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Bigraded dimensions of the tilde or truncated minus complex.
    Homology(Opts),
    /// Sweep closed intervals and check the EL-labeling.
    Shelling(Opts),
    /// Certify morphism spaces as balls and check compositions.
    Flowcat(Opts),
    /// Run the invariant suite; `corpus` verifies every built-in grid.
    Verify(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Tilde,
    Minus,
}

#[derive(Args)]
struct Opts {
    /// Grid file, or a corpus name (unknot-2, unknot-3, trefoil-5a, trefoil-5b, figure8-7).
    grid: String,
    #[arg(long, value_enum, default_value = "tilde")]
    flavor: FlavorArg,
    /// Maslov floor for the minus flavor.
    #[arg(long, allow_hyphen_values = true)]
    floor: Option<i64>,
    /// Restrict to one Alexander grading.
    #[arg(long, allow_hyphen_values = true)]
    sector: Option<i64>,
    /// x-coordinate of l, a half-integer such as 4.5, or `all`.
    #[arg(long)]
    line_pos: Option<String>,
    /// Largest interval length swept by `shelling`.
    #[arg(long, default_value_t = 4)]
    interval_cap: usize,
    /// Largest Maslov gap for `flowcat`.
    #[arg(long, default_value_t = 4)]
    gap_cap: usize,
    /// Chain enumeration and shelling search budget.
    #[arg(long, default_value_t = 1_000_000)]
    budget: usize,
    #[arg(long)]
    json: bool,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, hide = true)]
    inject_fault: bool,
}

fn parse_line(s: &str) -> Result<LinePlacement, String> {
    if s == "all" {
        return Ok(LinePlacement::All);
    }
    s.strip_suffix(".5")
        .and_then(|k| k.parse::<usize>().ok())
        .map(LinePlacement::Column)
        .ok_or_else(|| format!("--line-pos {s}: expected a half-integer like 2.5, or `all`"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, o) = match cli.command {
        Cmd::Homology(o) => (Command::Homology, o),
        Cmd::Shelling(o) => (Command::Shelling, o),
        Cmd::Flowcat(o) => (Command::Flowcat, o),
        Cmd::Verify(o) => (Command::Verify, o),
    };
    let line = match o.line_pos.as_deref().map(parse_line).transpose() {
        Ok(l) => l.unwrap_or(LinePlacement::Default),
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_INPUT as u8);
        }
    };
    let cfg = RunConfig {
        flavor: match o.flavor {
            FlavorArg::Tilde => Flavor::Tilde,
            FlavorArg::Minus => Flavor::Minus,
        },
        sector: o.sector,
        m_floor: o.floor,
        line,
        interval_cap: o.interval_cap,
        gap_cap: o.gap_cap,
        budget: o.budget,
        json: o.json,
        threads: o.threads,
        inject_fault: o.inject_fault,
        ..RunConfig::new(command, o.grid)
    };
    let out = run(&cfg);
    print!("{}", out.stdout);
    let _ = std::io::stdout().flush();
    if !out.stderr.is_empty() {
        eprintln!("error: {}", out.stderr);
    }
    ExitCode::from(out.code as u8)
}
