//! `fmpartners`: Fourier-Mukai partners of `P(O_E ⊕ L)` from the command
//! line.
//!
//! Exit codes: 0 success, 1 a verification assertion failed, 2 bad input.

mod commands;
mod input;
mod report;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fmpartners_core::CurveClass;

use commands::{AutoeqArgs, HSpec, Outcome};
use input::{InputError, InputResult};

#[derive(Parser)]
#[command(
    name = "fmpartners",
    version,
    about = "Fourier-Mukai partners of elliptic ruled surfaces"
)]
struct Cli {
    /// Emit the report as JSON instead of a table.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PointArgs {
    /// Curve class: generic, square (j = 1728) or hexagonal (j = 0).
    #[arg(long)]
    class: CurveClass,

    /// Order of the torsion point.
    #[arg(long)]
    m: u64,

    /// Point `x,y` meaning `(x + yτ)/m`; defaults to `1,0`.
    #[arg(long, default_value = "1,0", allow_hyphen_values = true)]
    point: String,
}

impl PointArgs {
    fn point(&self) -> InputResult<(i64, i64)> {
        input::parse_point(&self.point)
    }
}

#[derive(Subcommand)]
enum Command {
    /// List the partner orbits and the cardinality phi(m)/|H|.
    Partners(PointArgs),
    /// Decide which of the three cases holds.
    Classify(PointArgs),
    /// Compute H by unit action, with the dual-curve check for CM classes.
    Hgroup(PointArgs),
    /// Roots of n^2+1 and n^2+n+1 modulo m.
    Roots {
        #[arg(long)]
        m: u64,
        /// Restrict to one congruence (square or hexagonal).
        #[arg(long)]
        class: Option<CurveClass>,
    },
    /// Sweep the oracle, cardinality, transfer and small-m suites.
    Verify {
        #[arg(long, default_value_t = 4)]
        min_m: u64,
        #[arg(long, default_value_t = 100)]
        max_m: u64,
        /// Comma-separated classes.
        #[arg(long, default_value = "generic,square,hexagonal")]
        classes: String,
        /// Worker threads; 0 picks the available parallelism.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Membership of a matrix in the subgroup of Γ₀(m) with residue in H.
    Autoeq {
        #[arg(long)]
        m: Option<u64>,
        /// Residues generating H, e.g. `1,4`.
        #[arg(
            long,
            conflicts_with = "from_point",
            required_unless_present = "from_point"
        )]
        h: Option<String>,
        /// Take H from a point: `class,m,x,y`.
        #[arg(long)]
        from_point: Option<String>,
        /// Matrix entries `c,a,d,b`.
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        /// Also print the canonical lift of the residue.
        #[arg(long)]
        lift: bool,
        /// Random product/inverse checks on lifts of H.
        #[arg(long, default_value_t = 0)]
        closure_samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cmd: Command) -> InputResult<Outcome> {
    match cmd {
        Command::Partners(p) => commands::partners(p.class, p.m, p.point()?),
        Command::Classify(p) => commands::classify(p.class, p.m, p.point()?),
        Command::Hgroup(p) => commands::hgroup(p.class, p.m, p.point()?),
        Command::Roots { m, class } => commands::roots(m, class),
        Command::Verify {
            min_m,
            max_m,
            classes,
            threads,
        } => {
            let threads = match threads {
                0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
                n => n,
            };
            commands::verify(min_m, max_m, &input::parse_classes(&classes)?, threads)
        }
        Command::Autoeq {
            m,
            h,
            from_point,
            matrix,
            lift,
            closure_samples,
            seed,
        } => {
            let h = match (h, from_point) {
                (Some(h), _) => HSpec::Residues(input::parse_residues(&h)?),
                (None, Some(p)) => {
                    let (c, pm, x, y) = input::parse_from_point(&p)?;
                    HSpec::FromPoint(c, pm, x, y)
                }
                (None, None) => {
                    return Err(InputError("one of --h or --from-point is required".into()))
                }
            };
            commands::autoeq(AutoeqArgs {
                m,
                h,
                matrix: input::parse_matrix(&matrix)?,
                lift,
                closure_samples,
                seed,
            })
        }
    }
}

fn exit_code(result: &InputResult<Outcome>) -> u8 {
    match result {
        Ok(o) if o.passed => 0,
        Ok(_) => 1,
        Err(_) => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli.command);
    let code = exit_code(&result);
    match result {
        Ok(outcome) if cli.json => print!("{}", outcome.report.to_json()),
        Ok(outcome) => print!("{}", outcome.report.to_table()),
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(code)
}
