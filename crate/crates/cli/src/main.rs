use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use polymoment::continuation::{
    evaluators, initial_bundle, plan_path, track_from, FContext, TrackerConfig,
};
use polymoment::growth::{bound_check, conjecture_check, default_window, estimate_growth_by_name};
use polymoment::lab::{
    run_sweep, write_csv_summary, write_report, GeneratorConfig, ReportHeader, SweepConfig,
};
use polymoment::moments::{moment_sequence_with, MomentConfig, DEFAULT_BIT_CAP};
use polymoment::{critical_set, parse_poly, Error, Result};

#[derive(Parser)]
#[command(
    name = "polymoment",
    version,
    about = "Moments of polynomials on [0,1] and their generating function"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact moments M_0..M_N.
    Moments {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value_t = 200)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = MomentFormat::Exact)]
        out: MomentFormat,
        #[arg(long, default_value_t = DEFAULT_BIT_CAP)]
        bit_cap: u64,
    },
    /// Singular set as JSON.
    CriticalSet {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
    },
    /// Growth-rate estimate with bound and conjecture checks.
    Growth {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, default_value_t = 200)]
        n_max: usize,
        #[arg(long, default_value = "slope")]
        method: String,
        /// `LO,HI`; defaults to `N/4,N`.
        #[arg(long, value_parser = parse_window)]
        window: Option<(usize, usize)>,
        #[arg(long, default_value_t = polymoment::growth::DEFAULT_BOUND_TOL)]
        bound_tol: f64,
        #[arg(long, default_value_t = polymoment::growth::DEFAULT_CONJECTURE_TOL)]
        conjecture_tol: f64,
        #[arg(long, default_value_t = DEFAULT_BIT_CAP)]
        bit_cap: u64,
    },
    /// Evaluate F(t).
    EvalF {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        /// `RE,IM`
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        t: Complex64,
        #[arg(long, default_value = "pf")]
        method: String,
        #[arg(long)]
        clearance: Option<f64>,
        #[arg(long, default_value_t = 200)]
        n_max: usize,
        #[arg(long, default_value_t = polymoment::continuation::evaluators::DEFAULT_SERIES_MARGIN)]
        series_margin: f64,
    },
    /// Track the roots of f − τ along a planned path.
    Trace {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        tau_start: Complex64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        tau_end: Complex64,
        #[arg(long)]
        clearance: Option<f64>,
        /// Write every accepted bundle as JSON lines.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long)]
        max_log_jump: Option<f64>,
        #[arg(long)]
        max_root_move: Option<f64>,
        #[arg(long)]
        residual_tol: Option<f64>,
        #[arg(long)]
        min_step: Option<f64>,
    },
    /// Run the pipeline over a seeded random corpus.
    Sweep {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        /// `MIN,MAX`
        #[arg(long, value_parser = parse_window, default_value = "1,5")]
        degree: (usize, usize),
        #[arg(long, default_value_t = 200)]
        n_max: usize,
        #[arg(long)]
        complex: bool,
        #[arg(long)]
        out: PathBuf,
        /// CSV summary path; defaults to the report path with a `.csv` extension.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        num_bound: i64,
        #[arg(long, default_value_t = 4)]
        den_bound: i64,
        #[arg(long, default_value = "slope")]
        method: String,
        #[arg(long, value_parser = parse_window)]
        window: Option<(usize, usize)>,
        #[arg(long, default_value_t = polymoment::growth::DEFAULT_BOUND_TOL)]
        bound_tol: f64,
        #[arg(long, default_value_t = polymoment::growth::DEFAULT_CONJECTURE_TOL)]
        conjecture_tol: f64,
        #[arg(long, default_value_t = DEFAULT_BIT_CAP)]
        bit_cap: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MomentFormat {
    Exact,
    Csv,
}

fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let re: f64 = re.trim().parse().map_err(|e| format!("real part: {e}"))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|e| format!("imaginary part: {e}"))?;
    Ok(Complex64::new(re, im))
}

fn parse_window(s: &str) -> std::result::Result<(usize, usize), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let lo = lo.trim().parse().map_err(|e| format!("{e}"))?;
    let hi = hi.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

fn io_error(e: io::Error) -> Error {
    Error::InvalidInput(format!("i/o: {e}"))
}

fn emit(value: serde_json::Value) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &value).map_err(|e| io_error(e.into()))?;
    writeln!(out).map_err(io_error)
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Moments {
            poly: text,
            n_max,
            out,
            bit_cap,
        } => {
            let seq = moment_sequence_with(&parse_poly(&text)?, n_max, MomentConfig { bit_cap })?;
            let body = match out {
                MomentFormat::Exact => seq.to_exact_dump(),
                MomentFormat::Csv => seq.to_csv(),
            };
            io::stdout()
                .lock()
                .write_all(body.as_bytes())
                .map_err(io_error)
        }
        Command::CriticalSet { poly: text } => {
            let s = critical_set(&parse_poly(&text)?)?;
            println!("{}", s.to_json());
            Ok(())
        }
        Command::Growth {
            poly: text,
            n_max,
            method,
            window,
            bound_tol,
            conjecture_tol,
            bit_cap,
        } => {
            let f = parse_poly(&text)?;
            let seq = moment_sequence_with(&f, n_max, MomentConfig { bit_cap })?;
            let est =
                estimate_growth_by_name(&seq, &method, window.unwrap_or(default_window(n_max)))?;
            let s = critical_set(&f)?;
            let (bound_holds, slack) = bound_check(&est, &s, bound_tol);
            let (conjecture_holds, gap) = conjecture_check(&est, &s, conjecture_tol);
            emit(serde_json::json!({
                "poly": f.to_string(),
                "estimate": est,
                "max_modulus_S": s.max_modulus,
                "bound_holds": bound_holds,
                "slack": slack,
                "conjecture_holds": conjecture_holds,
                "conjecture_gap": gap,
                "first_nonzero_after": seq.first_nonzero_index(1),
            }))
        }
        Command::EvalF {
            poly: text,
            t,
            method,
            clearance,
            n_max,
            series_margin,
        } => {
            let evaluator = evaluators().get(&method)?;
            let mut ctx = FContext::new(parse_poly(&text)?)?.with_n_max(n_max);
            ctx.series_margin = series_margin;
            if let Some(c) = clearance {
                ctx = ctx.with_clearance(c);
            }
            let value = evaluator.evaluate(&ctx, t)?;
            emit(serde_json::to_value(value).map_err(|e| io_error(e.into()))?)
        }
        Command::Trace {
            poly: text,
            tau_start,
            tau_end,
            clearance,
            dump,
            max_log_jump,
            max_root_move,
            residual_tol,
            min_step,
        } => {
            let f = parse_poly(&text)?;
            let s = critical_set(&f)?;
            let path = plan_path(
                &s,
                tau_start,
                tau_end,
                clearance.unwrap_or(s.default_clearance()),
            )?;
            let mut cfg = TrackerConfig::default();
            cfg.max_log_jump = max_log_jump.unwrap_or(cfg.max_log_jump);
            cfg.max_root_move = max_root_move.unwrap_or(cfg.max_root_move);
            cfg.residual_tol = residual_tol.unwrap_or(cfg.residual_tol);
            cfg.min_step = min_step.unwrap_or(cfg.min_step);
            let trace = track_from(&f, &initial_bundle(&f, tau_start)?, &path, cfg)?;
            if let Some(p) = dump {
                std::fs::write(&p, trace.to_json_lines(&f)).map_err(io_error)?;
            }
            let last = trace.last();
            emit(serde_json::json!({
                "poly": f.to_string(),
                "waypoints": path.waypoints().len(),
                "clearance": path.clearance(),
                "bundles": trace.bundles.len(),
                "rejected_steps": trace.rejected_steps,
                "permutation": trace.permutation(),
                "start": serde_json::from_str::<serde_json::Value>(&trace.first().to_json_line()).unwrap(),
                "end": serde_json::from_str::<serde_json::Value>(&last.to_json_line()).unwrap(),
            }))
        }
        Command::Sweep {
            seed,
            count,
            degree,
            n_max,
            complex,
            out,
            csv,
            num_bound,
            den_bound,
            method,
            window,
            bound_tol,
            conjecture_tol,
            bit_cap,
        } => {
            let gen = GeneratorConfig {
                seed,
                degree_range: degree,
                num_bound,
                den_bound,
                allow_complex: complex,
                count,
            };
            let cfg = SweepConfig {
                n_max,
                estimator: method,
                window,
                bound_tol,
                conjecture_tol,
                bit_cap,
            };
            let records = run_sweep(&gen, &cfg)?;
            let header = ReportHeader::new(&gen, &cfg, records.len());
            let file = File::create(&out).map_err(io_error)?;
            write_report(BufWriter::new(file), &header, &records).map_err(io_error)?;
            let csv_path = csv.unwrap_or_else(|| out.with_extension("csv"));
            write_csv_summary(File::create(&csv_path).map_err(io_error)?, &records)
                .map_err(io_error)?;

            let failed = records.iter().filter(|r| r.error.is_some()).count();
            let violations = records
                .iter()
                .filter(|r| r.bound_holds == Some(false))
                .count();
            let off = records
                .iter()
                .filter(|r| r.conjecture_holds == Some(false))
                .count();
            eprintln!(
                "{} records ({failed} errors, {violations} bound violations, {off} conjecture gaps) -> {}",
                records.len(),
                out.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
