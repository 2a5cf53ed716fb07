mod format;
mod svg;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use cmc_torus::oracle::{self, Direction, ModeVerification, VariationSpec};
use cmc_torus::spectrum::{morse_index, spectrum_table, thresholds, ModeFamily};
use cmc_torus::verify::Verifier;
use cmc_torus::{make_torus, Error, TorusParameter};

use format::{csv, f, to_json};

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFICATION: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "cmc-torus", version, about = "Constrained-Willmore stability of the CMC Clifford tori in S^3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Write to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Shorthand for --format json.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Multipliers of every mode with k ≤ kmax, l ≤ lmax.
    Spectrum {
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
        #[arg(long, default_value_t = 4)]
        kmax: u32,
        #[arg(long, default_value_t = 4)]
        lmax: u32,
    },
    /// Stability and Morse index of one torus.
    Classify {
        #[arg(long, allow_negative_numbers = true)]
        r: f64,
    },
    /// Classification over a grid of radii.
    Sweep {
        /// start:stop:count
        #[arg(long, value_parser = parse_grid)]
        grid: Grid,
    },
    /// Radii where the (0,l) and (k,0) families change sign.
    Thresholds {
        #[arg(long, default_value_t = 6)]
        kmax: u32,
    },
    /// Finite-difference second variation along sin(lv) and cos(lv).
    Oracle {
        #[arg(long, allow_negative_numbers = true, conflicts_with = "grid", required_unless_present = "grid")]
        r: Option<f64>,
        #[arg(long, value_parser = parse_grid)]
        grid: Option<Grid>,
        /// Frequency l; repeat for several.
        #[arg(long, required = true)]
        l: Vec<u32>,
        #[arg(long, default_value_t = oracle::DEFAULT_SAMPLES)]
        n: usize,
        /// Largest Richardson step; defaults to min(1e-2, 0.05·min(ρ, π/2 − ρ)).
        #[arg(long)]
        step: Option<f64>,
        #[arg(long, default_value_t = oracle::DEFAULT_LEVELS)]
        levels: usize,
        #[arg(long, default_value_t = oracle::DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Invariant suite and acceptance criteria.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Grid {
    start: f64,
    stop: f64,
    count: usize,
}

impl Grid {
    fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let i = i as f64;
                (self.start * (last - i) + self.stop * i) / last
            })
            .collect()
    }
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(format!("expected start:stop:count, got {s:?}"));
    };
    let start: f64 = a.parse().map_err(|e| format!("start: {e}"))?;
    let stop: f64 = b.parse().map_err(|e| format!("stop: {e}"))?;
    let count: usize = n.parse().map_err(|e| format!("count: {e}"))?;
    if count == 0 {
        return Err("count must be at least 1".into());
    }
    if !(start <= stop) {
        return Err(format!("start {start} exceeds stop {stop}"));
    }
    Ok(Grid { start, stop, count })
}

enum Failure {
    Usage(String),
    Verification(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::InvalidProfile(_) | Error::ZeroMode => Failure::Usage(e.to_string()),
            Error::VerificationFailed(_) => Failure::Verification(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Numeric(format!("output: {e}"))
    }
}

struct Output {
    text: String,
    failed: Option<String>,
}

impl Output {
    fn ok(text: String) -> Self {
        Self { text, failed: None }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(out) => {
            let written = match &cli.output.out {
                Some(path) => fs::write(path, &out.text),
                None => {
                    print!("{}", out.text);
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: output: {e}");
                return ExitCode::from(EXIT_NUMERIC);
            }
            match out.failed {
                Some(msg) => {
                    eprintln!("verification failed: {msg}");
                    ExitCode::from(EXIT_VERIFICATION)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(EXIT_VERIFICATION)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
    }
}

fn format_of(cli: &Cli, allowed: &[Format], default: Format) -> Result<Format, Failure> {
    let fmt = if cli.output.json { Format::Json } else { cli.output.format.unwrap_or(default) };
    if cli.output.json && cli.output.format.is_some_and(|f| f != Format::Json) {
        return Err(Failure::Usage("--json conflicts with --format".into()));
    }
    if !allowed.contains(&fmt) {
        return Err(Failure::Usage(format!("format {fmt:?} is not available for this command")));
    }
    Ok(fmt)
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Spectrum { r, kmax, lmax } => {
            let fmt = format_of(cli, &[Format::Json, Format::Csv], Format::Json)?;
            let t = make_torus(*r)?;
            let rows = spectrum_table(&t, *kmax, *lmax);
            Ok(Output::ok(match fmt {
                Format::Csv => csv(
                    &["k", "l", "multiplicity", "c", "laplace_symbol", "lw", "lb", "lambda", "N", "E", "operator_eigenvalue", "sign"],
                    rows.iter().map(|e| {
                        vec![
                            e.mode.k.to_string(),
                            e.mode.l.to_string(),
                            e.multiplicity.to_string(),
                            f(e.c),
                            f(e.laplace_symbol),
                            f(e.lw),
                            f(e.lb),
                            f(e.lambda),
                            f(e.big_n),
                            f(e.e),
                            f(e.operator_eigenvalue),
                            format!("{:?}", e.sign).to_lowercase(),
                        ]
                    }),
                ),
                _ => {
                    #[derive(Serialize)]
                    struct Table<'a> {
                        torus: TorusParameter,
                        entries: &'a [cmc_torus::SpectrumEntry],
                    }
                    to_json(&Table { torus: t, entries: &rows })
                }
            }))
        }
        Command::Classify { r } => {
            let fmt = format_of(cli, &[Format::Json, Format::Csv], Format::Json)?;
            let rep = morse_index(&make_torus(*r)?);
            Ok(Output::ok(match fmt {
                Format::Csv => sweep_csv(std::slice::from_ref(&rep)),
                _ => to_json(&rep),
            }))
        }
        Command::Sweep { grid } => {
            let fmt = format_of(cli, &[Format::Json, Format::Csv, Format::Svg], Format::Json)?;
            let tori: Vec<TorusParameter> = grid.points().into_iter().map(make_torus).collect::<Result<_, _>>()?;
            let reports: Vec<_> = tori.par_iter().map(morse_index).collect();
            Ok(Output::ok(match fmt {
                Format::Csv => sweep_csv(&reports),
                Format::Svg => svg::stability_diagram(&reports),
                Format::Json => to_json(&reports),
            }))
        }
        Command::Thresholds { kmax } => {
            let fmt = format_of(cli, &[Format::Json, Format::Csv], Format::Json)?;
            let th = thresholds(*kmax)?;
            Ok(Output::ok(match fmt {
                Format::Csv => csv(
                    &["family", "k", "l", "closed_form", "bisected"],
                    th.iter().map(|t| {
                        let family = match t.family {
                            ModeFamily::U(_) => "u",
                            ModeFamily::V(_) => "v",
                        };
                        vec![family.into(), t.mode.k.to_string(), t.mode.l.to_string(), f(t.closed_form), f(t.bisected)]
                    }),
                ),
                _ => to_json(&th),
            }))
        }
        Command::Oracle { r, grid, l, n, step, levels, tol } => {
            let fmt = format_of(cli, &[Format::Json, Format::Csv], Format::Json)?;
            if !(*tol > 0.0) {
                return Err(Failure::Usage(format!("tolerance {tol} is not positive")));
            }
            let radii = match (r, grid) {
                (Some(r), _) => vec![*r],
                (None, Some(g)) => g.points(),
                (None, None) => return Err(Failure::Usage("one of --r or --grid is required".into())),
            };
            let mut jobs = Vec::new();
            for &r in &radii {
                let t = make_torus(r)?;
                for &l in l {
                    if l == 0 {
                        return Err(Failure::Usage("--l must be at least 1".into()));
                    }
                    let spec = VariationSpec {
                        step: step.unwrap_or_else(|| oracle::default_step(&t)),
                        levels: *levels,
                        samples: *n,
                        tolerance: *tol,
                        ..VariationSpec::new(t, Direction::Sin(l))
                    };
                    spec.validate()?;
                    jobs.push((spec, l));
                }
            }
            let results: Vec<ModeVerification> = jobs
                .par_iter()
                .map(|(spec, l)| match oracle::verify_mode(spec, *l) {
                    Ok(rep) => Ok(rep),
                    Err(Error::VerificationFailed(rep)) => Ok(*rep),
                    Err(e) => Err(e),
                })
                .collect::<Result<_, _>>()?;
            let failed: Vec<String> = results
                .iter()
                .filter(|m| !m.passed)
                .map(|m| format!("r = {}, l = {}: {}", m.r, m.l, m.failures.join("; ")))
                .collect();
            let text = match fmt {
                Format::Csv => csv(
                    &["r", "l", "direction", "predicted", "measured", "rel_error", "operator_predicted", "converged", "passed"],
                    results.iter().flat_map(|m| {
                        [(&m.sin, "sin"), (&m.cos, "cos")].map(|(rep, dir)| {
                            vec![
                                f(m.r),
                                m.l.to_string(),
                                dir.into(),
                                f(rep.predicted),
                                f(rep.measured),
                                f(rep.rel_error),
                                f(rep.operator_predicted),
                                rep.converged.to_string(),
                                m.passed.to_string(),
                            ]
                        })
                    }),
                ),
                _ if results.len() == 1 => to_json(&results[0]),
                _ => to_json(&results),
            };
            Ok(Output { text, failed: (!failed.is_empty()).then(|| failed.join(" | ")) })
        }
        Command::Verify => {
            let fmt = cli.output.json.then_some(Format::Json).or(cli.output.format);
            if matches!(fmt, Some(Format::Csv | Format::Svg)) {
                return Err(Failure::Usage("verify supports --json only".into()));
            }
            let report = Verifier::default().run();
            let text = if fmt == Some(Format::Json) {
                to_json(&report)
            } else {
                let mut s = String::new();
                for c in &report.checks {
                    let status = if c.passed { "PASS" } else { "FAIL" };
                    s.push_str(&format!("[{status}] {:<28} {:<10} {:>6.2}s  {}\n", c.id, c.module, c.seconds, c.detail));
                }
                let failed = report.failed().count();
                s.push_str(&format!(
                    "{} of {} checks passed in {:.2} s; DΠ constant: {:?}\n",
                    report.checks.len() - failed,
                    report.checks.len(),
                    report.seconds,
                    report.db_verdict
                ));
                s
            };
            let failed: Vec<String> = report.failed().map(|c| c.id.clone()).collect();
            Ok(Output { text, failed: (!failed.is_empty()).then(|| failed.join(", ")) })
        }
    }
}

fn sweep_csv(reports: &[cmc_torus::StabilityReport]) -> String {
    csv(
        &["r", "b", "stable", "morse_index", "morse_index_weighted"],
        reports.iter().map(|s| {
            vec![f(s.r), f(s.b), s.stable.to_string(), s.morse_index.to_string(), s.morse_index_weighted.to_string()]
        }),
    )
}
