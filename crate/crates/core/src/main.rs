use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use fractal_image::certifier::Verdict;
use fractal_image::demo::run_demo;
use fractal_image::job::{cmd_certify, cmd_image, cmd_oracle, Job, JobError, Prepared, EXIT_ERROR};

/// `println!` that tolerates a closed stdout (e.g. piping into `head`).
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

/// Certify that f(E1, E2) is a closed interval for fractal sets E1, E2, and
/// compute finite-level images.
#[derive(Parser)]
#[command(name = "fimage", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the sufficient conditions for the job's function and sets.
    Certify {
        #[arg(long)]
        job: PathBuf,
        /// Box budget per condition.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute f(C_k, D_k) for k = 0..kmax.
    Image {
        #[arg(long)]
        job: PathBuf,
        #[arg(long)]
        kmax: Option<usize>,
        /// Compute even when uncertified (corner values, not rigorous).
        #[arg(long)]
        force: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force image from points of the sets.
    Oracle {
        #[arg(long)]
        job: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named built-in demo.
    Demo {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<Prepared, JobError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| JobError::Unsupported(format!("cannot read {}: {e}", path.display())))?;
    Job::from_json(&text)?.prepare()
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), JobError> {
    if let Some(path) = out {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(path, text)
            .map_err(|e| JobError::Unsupported(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn print_verdict(v: &Verdict) {
    out!("status: {:?}", v.status);
    if let Some(sc) = v.sign_case {
        out!("sign case: {sc}");
    }
    for c in &v.conditions {
        out!("  [{:?}] {} ({} boxes)", c.status, c.description, c.stats.boxes);
    }
    for (k, val) in &v.constants {
        out!("  {k} = {val}");
    }
    if let Some(w) = &v.witness {
        out!("witness: {} at ({}, {}): {}", w.condition, w.x, w.y, w.reason);
    }
    if let Some(c) = &v.conclusion {
        out!("conclusion: {c:?}");
    }
}

fn run(cli: Cli) -> Result<i32, JobError> {
    match cli.command {
        Command::Certify { job, budget, out } => {
            let p = load(&job)?;
            let r = cmd_certify(&p, budget)?;
            out!("f = {} ({})", r.function, r.setting);
            print_verdict(&r.verdict);
            if let Some(l) = &r.linear {
                out!("linear check: {:?}", l.status);
                if let Some(c) = &l.conclusion {
                    out!("  {c:?}");
                }
            }
            write_json(out.as_deref(), &r)?;
            Ok(r.exit_code)
        }
        Command::Image { job, kmax, force, out } => {
            let p = load(&job)?;
            let r = cmd_image(&p, kmax, force)?;
            if r.forced {
                out!("WARNING: not certified; corner-value images are not rigorous");
            }
            for l in &r.report.levels {
                out!("k={:<2} components={:<6} {}", l.k, l.components, l.image);
            }
            out!("stabilized: {}  nested: {}", r.report.stabilized, r.report.nested);
            write_json(out.as_deref(), &r)?;
            Ok(r.exit_code)
        }
        Command::Oracle { job, depth, out } => {
            let p = load(&job)?;
            let r = cmd_oracle(&p, depth)?;
            out!(
                "depth {}: {} components, hull {}, largest gap {:.3e}",
                r.depth,
                r.components,
                r.image.hull(),
                r.max_gap
            );
            out!(
                "within level image: {} (hausdorff {:.3e})",
                r.comparison.passed, r.comparison.hausdorff
            );
            write_json(out.as_deref(), &r)?;
            Ok(r.exit_code)
        }
        Command::Demo { name, out } => {
            let d = run_demo(&name)?;
            for c in &d.checks {
                let mark = if c.passed { "ok  " } else { "FAIL" };
                out!("{mark} {} {}", c.name, c.detail);
            }
            out!("{}: {} ({:.2}s)", d.name, if d.passed { "passed" } else { "failed" }, d.seconds);
            write_json(out.as_deref(), &d)?;
            Ok(d.exit_code())
        }
    }
}

fn main() -> ExitCode {
    // clap's own usage-error code (2) would collide with the Unknown verdict
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    };
    ExitCode::from(code as u8)
}
