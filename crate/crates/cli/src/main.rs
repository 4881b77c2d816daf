use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use streamplify::records::{read_curve, write_point, Reader};
use streamplify::{free_space_decide, frechet_distance, Error, Event, Format, Point, RunPool, SimplifierState};

/// Streaming polyline simplification under the Fréchet distance.
#[derive(Parser)]
#[command(name = "streamplify", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Simplify to within (1+ε)δ, emitting finalized vertices as they appear.
    Delta {
        #[arg(long, short = 'e')]
        epsilon: f64,
        #[arg(long, short = 'd')]
        delta: f64,
        #[command(flatten)]
        io: Io,
    },
    /// Keep at most 2k−2 vertices with near-optimal error; prints the curve at EOF.
    K {
        #[arg(long, short = 'k')]
        k: usize,
        #[arg(long, short = 'e')]
        epsilon: f64,
        /// Working-storage budget in MiB, shared by all runs. Exceeding it
        /// stops with exit code 3 instead of exhausting memory.
        #[arg(long, default_value_t = 2048)]
        max_memory: usize,
        #[command(flatten)]
        io: Io,
    },
    /// Check d_F(original, simplified) ≤ (1+ε)δ.
    Verify {
        #[arg(long, short = 'd')]
        delta: f64,
        #[arg(long, short = 'e')]
        epsilon: f64,
        original: PathBuf,
        simplified: PathBuf,
        #[arg(long)]
        format: Option<Format>,
    },
}

#[derive(clap::Args)]
struct Io {
    /// Input file, or `-` for stdin.
    #[arg(long, short = 'i', default_value = "-")]
    input: PathBuf,
    /// Record format; defaults to the input extension (CSV for stdin).
    #[arg(long)]
    format: Option<Format>,
    /// Load the whole input and check the result with the exact oracle.
    /// Gives up the bounded-memory guarantee.
    #[arg(long)]
    verify: bool,
}

enum Failure {
    Input(String),
    Param(String),
    Rejected,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Precondition(_) => Failure::Param(e.to_string()),
            Error::Budget(_) => Failure::Param(format!("{e}; raise --max-memory or epsilon")),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn format_of(path: &Path, explicit: Option<Format>) -> Format {
    explicit.unwrap_or_else(|| Format::from_path(path))
}

fn open(path: &Path) -> Result<Box<dyn BufRead>, Failure> {
    if path == Path::new("-") {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let f = File::open(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(Box::new(BufReader::new(f)))
}

fn warn_verify() {
    eprintln!("warning: --verify keeps the whole input in memory; the bounded-storage guarantee does not apply");
}

fn scale(a: &[Point], b: &[Point]) -> f64 {
    a.iter().chain(b).fold(0.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()))
}

fn cmd_delta(eps: f64, delta: f64, io: Io) -> Result<(), Failure> {
    let start = Instant::now();
    let mut state = SimplifierState::new(eps, delta)?.without_retained_output();
    let format = format_of(&io.input, io.format);
    if io.verify {
        warn_verify();
    }
    let mut kept = Vec::new();
    let mut out = BufWriter::new(io::stdout().lock());
    let (mut n, mut emitted, mut peak) = (0usize, Vec::new(), 0usize);
    for v in Reader::new(open(&io.input)?, format) {
        let v = v?;
        n += 1;
        if io.verify {
            kept.push(v);
        }
        if let Event::SegmentFinalized(p, q) = state.push(v)? {
            for z in [p, q] {
                write_point(&mut out, z, format)?;
                if io.verify {
                    emitted.push(z);
                }
            }
            // Anything on disk is a valid prefix of the output.
            out.flush()?;
        }
        peak = peak.max(state.state_bytes());
    }
    if n == 0 {
        return Err(Failure::Input("empty input".into()));
    }
    for &z in state.buffer() {
        write_point(&mut out, z, format)?;
        if io.verify {
            emitted.push(z);
        }
    }
    out.flush()?;
    let output_vertices = state.emitted_count() + state.buffer().len();
    let mut summary = json!({
        "input_vertices": n,
        "output_vertices": output_vertices,
        "epsilon": eps,
        "delta": delta,
        "wall_time": start.elapsed().as_secs_f64(),
        "peak_state_bytes": peak,
    });
    let mut ok = true;
    if io.verify {
        let bound = (1.0 + eps) * delta;
        ok = free_space_decide(&emitted, &kept, bound)?;
        summary["verified"] = json!(ok);
        summary["verified_bound"] = json!(bound);
    }
    eprintln!("{summary}");
    if ok {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn cmd_k(k: usize, eps: f64, max_memory: usize, io: Io) -> Result<(), Failure> {
    let start = Instant::now();
    let mut pool = RunPool::new(eps, k)?.with_memory_budget(max_memory.saturating_mul(1 << 20));
    let format = format_of(&io.input, io.format);
    if io.verify {
        warn_verify();
    }
    let mut kept = Vec::new();
    let (mut n, mut peak) = (0usize, 0usize);
    for v in Reader::new(open(&io.input)?, format) {
        let v = v?;
        n += 1;
        if io.verify {
            kept.push(v);
        }
        pool.push(v)?;
        peak = peak.max(pool.state_bytes());
    }
    if n == 0 {
        return Err(Failure::Input("empty input".into()));
    }
    let best = pool.finish()?;
    let mut out = BufWriter::new(io::stdout().lock());
    for &z in &best.curve {
        write_point(&mut out, z, format)?;
    }
    out.flush()?;
    let mut summary = json!({
        "input_vertices": n,
        "output_vertices": best.curve.len(),
        "epsilon": eps,
        "k": k,
        "delta_estimate": best.delta,
        "wall_time": start.elapsed().as_secs_f64(),
        "peak_state_bytes": peak,
    });
    if io.verify {
        let tol = (1e-6 * scale(&best.curve, &kept)).max(1e-12);
        summary["frechet_distance"] = json!(frechet_distance(&best.curve, &kept, tol)?);
    }
    eprintln!("{summary}");
    Ok(())
}

fn cmd_verify(delta: f64, eps: f64, a: &Path, b: &Path, format: Option<Format>) -> Result<(), Failure> {
    if !(eps > 0.0 && delta >= 0.0 && delta.is_finite() && eps.is_finite()) {
        return Err(Failure::Param(format!("need epsilon > 0 and delta ≥ 0, got {eps} and {delta}")));
    }
    let read = |p: &Path| -> Result<Vec<Point>, Failure> {
        read_curve(open(p)?, format_of(p, format)).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
    };
    let (ca, cb) = (read(a)?, read(b)?);
    let tol = (1e-6 * scale(&ca, &cb)).max(1e-12);
    let d = frechet_distance(&ca, &cb, tol).map_err(|e| Failure::Input(e.to_string()))?;
    let bound = (1.0 + eps) * delta;
    let pass = d <= bound + tol;
    let summary: Value = json!({ "distance": d, "tolerance": tol, "bound": bound, "pass": pass });
    println!("{summary}");
    if pass {
        Ok(())
    } else {
        Err(Failure::Rejected)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // Bad flags are parameter errors; help and version are not errors.
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let res = match cli.cmd {
        Cmd::Delta { epsilon, delta, io } => cmd_delta(epsilon, delta, io),
        Cmd::K { k, epsilon, max_memory, io } => cmd_k(k, epsilon, max_memory, io),
        Cmd::Verify { delta, epsilon, original, simplified, format } => {
            cmd_verify(delta, epsilon, &original, &simplified, format)
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Rejected) => {
            eprintln!("verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Param(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
