use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use uframe::extremal::{constants, necessary_condition};
use uframe::frames::{format, lift, verify_uframe, whiten, DEFAULT_TOL};
use uframe::geometry::{self, mc_volume, svg, SvgOptions};
use uframe::optimize::{multi_start, Direction, Objective, ObjectiveKind, SearchParams};
use uframe::sections::bounds_report;
use uframe::{Error, Frame64, UFrame64};

#[derive(Parser)]
#[command(name = "uframe", version, about = "Unit decompositions, cross-polytope projections and cube sections")]
struct Cli {
    /// Indent JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Volume of co{±v_i}: exact for k ≤ 3, Monte Carlo otherwise.
    Volume {
        #[arg(long)]
        frame: PathBuf,
        /// Force a Monte Carlo estimate with this many samples.
        #[arg(long)]
        mc: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cube section volume with Vaaler and Ball bounds.
    Section {
        #[arg(long)]
        frame: PathBuf,
    },
    /// Whiten a frame into a unit decomposition.
    Normalize {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Certify a unit decomposition; exits 1 if it fails.
    Verify {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Extremal constants for (n, k).
    Constants {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Multi-start local search for extremal frames.
    Optimize {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        objective: ObjectiveArg,
        #[arg(long, value_enum)]
        direction: DirectionArg,
        #[arg(long, default_value_t = 20)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the best final frame here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = SearchParams::default().max_iters)]
        max_iters: usize,
        /// Keep at most this many trajectory points (first and last kept).
        #[arg(long)]
        trajectory_limit: Option<usize>,
    },
    /// Local optimality diagnostics for a unit decomposition.
    Necessary {
        #[arg(long)]
        frame: PathBuf,
    },
    /// Append e_{k+1}.
    Lift {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// SVG drawing of a planar frame.
    Plot {
        #[arg(long)]
        frame: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Shade the star of v_i (zero-based).
        #[arg(long)]
        shade_star: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Proj,
    Section,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Max,
    Min,
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (code, kind) = match &e {
            Error::NotIsotropic { .. } => (1, "certification"),
            Error::Io(_) => (2, "io"),
            Error::Format(_) | Error::InvalidFrame(_) => (2, "format"),
            Error::Dimension { .. } => (3, "dimension"),
            Error::Range(_) | Error::Precondition(_) | Error::NotAVertex => (2, "input"),
            Error::Conditioning(_) | Error::Numerical(_) => (2, "numerical"),
        };
        Failure {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(Value, u8), Failure>;

fn load(path: &Path) -> Result<Frame64, Failure> {
    Ok(format::load(path)?)
}

fn load_uframe(path: &Path) -> Result<UFrame64, Failure> {
    Ok(UFrame64::certify_default(load(path)?)?)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialise")
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Volume { frame, mc, seed } => {
            let s = load(&frame)?;
            let exact = mc.is_none() && s.k() <= 3;
            let out = if exact {
                json!({ "volume": geometry::volume(&s)?, "method": "exact", "k": s.k(), "n": s.n() })
            } else {
                let samples = mc.unwrap_or(100_000);
                let e = mc_volume(&s, samples, seed)?;
                json!({
                    "volume": e.estimate,
                    "stderr": e.stderr,
                    "samples": e.samples,
                    "seed": seed,
                    "method": "monte_carlo",
                    "k": s.k(),
                    "n": s.n(),
                })
            };
            Ok((out, 0))
        }
        Command::Section { frame } => Ok((to_value(&bounds_report(&load_uframe(&frame)?)?), 0)),
        Command::Normalize { frame, out } => {
            let u = whiten(&load(&frame)?)?;
            format::save(&out, &u)?;
            Ok((to_value(&verify_uframe(&u, DEFAULT_TOL)), 0))
        }
        Command::Verify { frame, tol } => {
            let cert = verify_uframe(&load(&frame)?, tol);
            let code = if cert.pass { 0 } else { 1 };
            Ok((to_value(&cert), code))
        }
        Command::Constants { n, k } => Ok((to_value(&constants(n, k)?), 0)),
        Command::Optimize {
            n,
            k,
            objective,
            direction,
            starts,
            seed,
            out,
            max_iters,
            trajectory_limit,
        } => {
            let obj = Objective::new(
                match objective {
                    ObjectiveArg::Proj => ObjectiveKind::ProjectionVolume,
                    ObjectiveArg::Section => ObjectiveKind::SectionVolume,
                },
                match direction {
                    DirectionArg::Max => Direction::Max,
                    DirectionArg::Min => Direction::Min,
                },
            );
            let params = SearchParams {
                max_iters,
                ..SearchParams::default()
            };
            let report = multi_start::<f64>(n, k, &obj, starts, seed, &params)?;
            if let Some(w) = &report.warning {
                eprintln!("{}", json!({ "warning": w }));
            }
            let mut best = report.best_report().clone();
            if let Some(limit) = trajectory_limit {
                truncate(&mut best.trajectory, limit);
            }
            if let Some(path) = out {
                format::save(&path, &best.final_frame)?;
            }
            let mut value = to_value(&best);
            value["best_value"] = json!(best.final_value);
            value["run_values"] = json!(report.reports.iter().map(|r| r.final_value).collect::<Vec<_>>());
            value["best_run"] = json!(report.best);
            value["starts"] = json!(starts);
            value["seed"] = json!(seed);
            Ok((value, 0))
        }
        Command::Necessary { frame } => Ok((to_value(&necessary_condition(&load_uframe(&frame)?)?), 0)),
        Command::Lift { frame, out } => {
            let lifted = lift(&load_uframe(&frame)?);
            format::save(&out, &lifted)?;
            Ok((json!({ "out": out, "n": lifted.n(), "k": lifted.k() }), 0))
        }
        Command::Plot { frame, out, shade_star } => {
            let s = load(&frame)?;
            let text = svg(&s, &SvgOptions { shade_star })?;
            std::fs::write(&out, text).map_err(Error::from)?;
            Ok((json!({ "out": out }), 0))
        }
    }
}

/// Keeps the first and the last `limit - 1` points.
fn truncate<T: Clone>(points: &mut Vec<T>, limit: usize) {
    if points.len() <= limit || limit == 0 {
        if limit == 0 {
            points.clear();
        }
        return;
    }
    let tail = points.split_off(points.len() - (limit - 1));
    points.truncate(1);
    points.extend(tail);
}

fn render(value: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(value).expect("json")
    } else {
        serde_json::to_string(value).expect("json")
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or_default().trim_start_matches("error: ");
            eprintln!("{}", json!({ "error": "usage", "message": first }));
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok((value, code)) => {
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout(), "{}", render(&value, cli.pretty));
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
            ExitCode::from(f.code)
        }
    }
}
