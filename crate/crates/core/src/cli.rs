//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when `verify` finds a failing check, 2 on
//! usage errors (unknown flags, out-of-range values, unwritable output).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::distribution::{float_pmf, FloatDistTable, MasterEquation};
use crate::genfun::{egf_closed_eval, egf_expand};
use crate::montecarlo::{compare, simulate_parallel, ReferencePmf, SimConfig, DEFAULT_BLOCK_SIZE};
use crate::numeric::to_f64;
use crate::output::fmt_f64;
use crate::stirling::stirling_table;
use crate::verify::{run_verify, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "collector-lab",
    version,
    about = "Exact and floating-point coupon collector distributions, cross-checked"
)]
struct Cli {
    /// Output format; `verify` prints a table unless json is requested.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,

    /// Write output to PATH instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Law of the number of distinct coupons after each draw.
    Pmf(PmfArgs),
    /// Stirling numbers of the second kind.
    Stirling(StirlingArgs),
    /// Bivariate exponential generating function.
    Egf(EgfArgs),
    /// Monte Carlo simulation of the drawing process.
    Simulate(SimulateArgs),
    /// Run the cross-route equivalence suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct PmfArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    m: u64,
    #[arg(long)]
    n_max: u64,
    /// Exact rationals (default).
    #[arg(long, conflicts_with = "float")]
    exact: bool,
    /// Float master equation only.
    #[arg(long)]
    float: bool,
}

#[derive(Debug, Args)]
struct StirlingArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n_max: u64,
}

#[derive(Debug, Args)]
struct EgfArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    m: u64,
    #[arg(long)]
    order: u64,
    /// Evaluate the closed form at the point X,Y instead of listing terms.
    #[arg(long, value_name = "X,Y", value_parser = parse_point)]
    at: Option<(f64, f64)>,
}

#[derive(Debug, Args)]
struct WorkerArgs {
    /// Worker threads for the simulator; results do not depend on it.
    #[arg(
        long,
        env = "COLLECTOR_LAB_WORKERS",
        default_value_t = 1,
        value_parser = clap::value_parser!(u64).range(1..=1024)
    )]
    workers: u64,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    m: u64,
    #[arg(long)]
    n: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Trials per independently seeded block.
    #[arg(long, default_value_t = DEFAULT_BLOCK_SIZE, value_parser = clap::value_parser!(u64).range(1..))]
    block_size: u64,
    /// Append a goodness-of-fit block against the exact law.
    #[arg(long)]
    compare_exact: bool,
    #[command(flatten)]
    workers: WorkerArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..=64))]
    m_max: u64,
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..=512))]
    n_max: u64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[arg(long, default_value_t = VerifyConfig::default().seed)]
    seed: u64,
    #[command(flatten)]
    workers: WorkerArgs,
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| format!("expected X,Y, got {s:?}"))?;
    let parse = |v: &str| -> Result<f64, String> {
        let f: f64 = v.trim().parse().map_err(|e| format!("{v:?}: {e}"))?;
        if f.is_finite() {
            Ok(f)
        } else {
            Err(format!("{v:?} is not finite"))
        }
    };
    Ok((parse(x)?, parse(y)?))
}

/// Parses `args` (program name first) and runs the command against the
/// process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };

    let mut file_sink;
    let sink: &mut dyn Write = match &cli.output {
        Some(path) => match File::create(path) {
            Ok(f) => {
                file_sink = BufWriter::new(f);
                &mut file_sink
            }
            Err(e) => {
                let _ = writeln!(err, "error: cannot open {}: {e}", path.display());
                return EXIT_USAGE;
            }
        },
        None => out,
    };

    let result = dispatch(&cli, sink).and_then(|code| sink.flush().map(|_| code));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> io::Result<i32> {
    match &cli.command {
        Command::Pmf(a) => write_pmf(a, cli.format, out).map(|_| EXIT_OK),
        Command::Stirling(a) => write_stirling(a, cli.format, out).map(|_| EXIT_OK),
        Command::Egf(a) => write_egf(a, cli.format, out).map(|_| EXIT_OK),
        Command::Simulate(a) => write_simulate(a, cli.format, out),
        Command::Verify(a) => {
            let cfg = VerifyConfig {
                m_max: a.m_max,
                n_max: a.n_max,
                trials: a.trials,
                seed: a.seed,
                workers: a.workers.workers as usize,
            };
            let report = run_verify(&cfg);
            match cli.format {
                Format::Json => write_json_line(out, &report)?,
                Format::Csv => out.write_all(report.to_table().as_bytes())?,
            }
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAILED
            })
        }
    }
}

fn write_json_line<T: Serialize>(out: &mut dyn Write, value: &T) -> io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    out.write_all(b"\n")
}

/// Writes `[`, one serialized row per line, then `]`.
struct JsonArray<'a> {
    out: &'a mut dyn Write,
    first: bool,
}

impl<'a> JsonArray<'a> {
    fn start(out: &'a mut dyn Write) -> io::Result<Self> {
        out.write_all(b"[")?;
        Ok(JsonArray { out, first: true })
    }

    fn push<T: Serialize>(&mut self, row: &T) -> io::Result<()> {
        self.out
            .write_all(if self.first { b"\n" } else { b",\n" })?;
        self.first = false;
        serde_json::to_writer(&mut *self.out, row)?;
        Ok(())
    }

    fn finish(self) -> io::Result<()> {
        self.out.write_all(b"\n]\n")
    }
}

#[derive(Serialize)]
struct PmfRow {
    m: u64,
    n: u64,
    k: u64,
    p_num: Option<String>,
    p_den: Option<String>,
    p_float: f64,
}

fn for_each_pmf_row(a: &PmfArgs, emit: &mut dyn FnMut(PmfRow) -> io::Result<()>) -> io::Result<()> {
    let m = a.m;
    if a.float {
        let table: FloatDistTable = float_pmf(m, a.n_max);
        for n in 0..=a.n_max {
            for (k, &p) in table.row(n).iter().enumerate() {
                emit(PmfRow {
                    m,
                    n,
                    k: k as u64,
                    p_num: None,
                    p_den: None,
                    p_float: p,
                })?;
            }
        }
    } else {
        let mut chain = MasterEquation::new(m);
        for n in 0..=a.n_max {
            for (k, p) in chain.advance_to(n).iter().enumerate() {
                emit(PmfRow {
                    m,
                    n,
                    k: k as u64,
                    p_num: Some(p.numer().to_string()),
                    p_den: Some(p.denom().to_string()),
                    p_float: to_f64(p),
                })?;
            }
        }
    }
    Ok(())
}

fn write_pmf(a: &PmfArgs, format: Format, out: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "m,n,k,p_num,p_den,p_float")?;
            for_each_pmf_row(a, &mut |r| {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.m,
                    r.n,
                    r.k,
                    r.p_num.as_deref().unwrap_or(""),
                    r.p_den.as_deref().unwrap_or(""),
                    fmt_f64(r.p_float)
                )
            })
        }
        Format::Json => {
            let mut arr = JsonArray::start(out)?;
            for_each_pmf_row(a, &mut |r| arr.push(&r))?;
            arr.finish()
        }
    }
}

fn write_stirling(a: &StirlingArgs, format: Format, out: &mut dyn Write) -> io::Result<()> {
    let table = stirling_table(a.n_max);
    match format {
        Format::Csv => {
            writeln!(out, "n,k,a")?;
            for (n, k, v) in table.entries() {
                writeln!(out, "{n},{k},{v}")?;
            }
            Ok(())
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                n: u64,
                k: u64,
                a: String,
            }
            let mut arr = JsonArray::start(out)?;
            for (n, k, v) in table.entries() {
                arr.push(&Row {
                    n,
                    k,
                    a: v.to_string(),
                })?;
            }
            arr.finish()
        }
    }
}

fn write_egf(a: &EgfArgs, format: Format, out: &mut dyn Write) -> io::Result<()> {
    if let Some((x, y)) = a.at {
        let value = egf_closed_eval(a.m, x, y);
        return match format {
            Format::Csv => {
                writeln!(out, "m,x,y,value")?;
                writeln!(
                    out,
                    "{},{},{},{}",
                    a.m,
                    fmt_f64(x),
                    fmt_f64(y),
                    fmt_f64(value)
                )
            }
            Format::Json => {
                #[derive(Serialize)]
                struct Point {
                    m: u64,
                    x: f64,
                    y: f64,
                    value: f64,
                }
                write_json_line(
                    out,
                    &Point {
                        m: a.m,
                        x,
                        y,
                        value,
                    },
                )
            }
        };
    }
    #[derive(Serialize)]
    struct Row {
        n: u64,
        k: u64,
        coeff_num: String,
        coeff_den: String,
    }
    let series = egf_expand(a.m, a.order);
    let rows = series.terms().iter().enumerate().flat_map(|(n, g)| {
        g.coeffs().iter().enumerate().map(move |(k, c)| Row {
            n: n as u64,
            k: k as u64,
            coeff_num: c.numer().to_string(),
            coeff_den: c.denom().to_string(),
        })
    });
    match format {
        Format::Csv => {
            writeln!(out, "n,k,coeff_num,coeff_den")?;
            for r in rows {
                writeln!(out, "{},{},{},{}", r.n, r.k, r.coeff_num, r.coeff_den)?;
            }
            Ok(())
        }
        Format::Json => {
            let mut arr = JsonArray::start(out)?;
            for r in rows {
                arr.push(&r)?;
            }
            arr.finish()
        }
    }
}

fn write_simulate(a: &SimulateArgs, format: Format, out: &mut dyn Write) -> io::Result<i32> {
    let config = SimConfig {
        m: a.m,
        n: a.n,
        trials: a.trials,
        seed: a.seed,
        block_size: a.block_size,
    };
    let emp = simulate_parallel(&config, a.workers.workers as usize)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e.to_string()))?;
    let fit = if a.compare_exact {
        let mut chain = MasterEquation::new(a.m);
        let reference = ReferencePmf {
            m: a.m,
            n: a.n,
            probs: chain.advance_to(a.n).iter().map(to_f64).collect(),
        };
        Some(compare(&emp, &reference).map_err(|e| io::Error::other(e.to_string()))?)
    } else {
        None
    };
    match format {
        Format::Csv => {
            writeln!(out, "k,count,freq")?;
            for (k, (c, f)) in emp.counts.iter().zip(&emp.freqs).enumerate() {
                writeln!(out, "{k},{c},{}", fmt_f64(*f))?;
            }
            if let Some(fit) = &fit {
                writeln!(out)?;
                writeln!(out, "metric,value")?;
                writeln!(out, "max_abs_deviation,{}", fmt_f64(fit.max_abs_deviation))?;
                writeln!(out, "total_variation,{}", fmt_f64(fit.total_variation))?;
                writeln!(out, "chi_square,{}", fmt_f64(fit.chi_square))?;
                writeln!(out, "bins,{}", fit.bins)?;
                writeln!(out, "degrees_of_freedom,{}", fit.degrees_of_freedom)?;
                writeln!(
                    out,
                    "chi_square_critical_999,{}",
                    fmt_f64(fit.chi_square_critical_999)
                )?;
            }
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Row {
                k: usize,
                count: u64,
                freq: f64,
            }
            #[derive(Serialize)]
            struct Doc<'a> {
                config: &'a SimConfig,
                rows: Vec<Row>,
                #[serde(skip_serializing_if = "Option::is_none")]
                comparison: Option<&'a crate::montecarlo::FitReport>,
            }
            let rows = emp
                .counts
                .iter()
                .zip(&emp.freqs)
                .enumerate()
                .map(|(k, (&count, &freq))| Row { k, count, freq })
                .collect();
            write_json_line(
                out,
                &Doc {
                    config: &emp.config,
                    rows,
                    comparison: fit.as_ref(),
                },
            )?;
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("collector-lab").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn pmf_exact_csv_contains_known_row() {
        let (code, out, _) = run_capture(&[
            "pmf", "--m", "2", "--n-max", "2", "--exact", "--format", "csv",
        ]);
        assert_eq!(code, 0);
        assert!(out.lines().any(|l| l == "2,2,1,1,2,0.5"), "{out}");
        assert_eq!(out.lines().next(), Some("m,n,k,p_num,p_den,p_float"));
        assert_eq!(out.lines().count(), 1 + 3 * 3);
    }

    #[test]
    fn pmf_float_leaves_exact_columns_empty() {
        let (code, out, _) = run_capture(&["pmf", "--m", "2", "--n-max", "2", "--float"]);
        assert_eq!(code, 0);
        assert!(out.lines().any(|l| l == "2,2,1,,,0.5"), "{out}");
    }

    #[test]
    fn usage_errors_exit_two() {
        for args in [
            &["pmf", "--m", "0", "--n-max", "3"][..],
            &["pmf", "--m", "2", "--n-max", "3", "--exact", "--float"],
            &["pmf", "--m", "2", "--n-max", "3", "--bogus"],
            &["egf", "--m", "2", "--order", "3", "--at", "1"],
            &[
                "simulate", "--m", "2", "--n", "3", "--trials", "0", "--seed", "1",
            ],
            &["frobnicate"],
        ] {
            let (code, out, err) = run_capture(args);
            assert_eq!(code, 2, "{args:?}");
            assert!(out.is_empty());
            assert!(!err.is_empty());
        }
    }

    #[test]
    fn pmf_json_rows() {
        let (code, out, _) = run_capture(&["pmf", "--m", "1", "--n-max", "1", "--format", "json"]);
        assert_eq!(code, 0);
        let rows: serde_json::Value = serde_json::from_str(&out).unwrap();
        let rows = rows.as_array().unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[3]["p_num"], "1");
        assert_eq!(rows[3]["p_float"], 1.0);
    }

    #[test]
    fn egf_at_point() {
        let (code, out, _) = run_capture(&["egf", "--m", "3", "--order", "4", "--at", "0,0.5"]);
        assert_eq!(code, 0);
        assert_eq!(out, "m,x,y,value\n3,0,0.5,1\n");
    }

    #[test]
    fn parse_point_rejects_garbage() {
        assert_eq!(parse_point("1.5,-2"), Ok((1.5, -2.0)));
        assert!(parse_point("1.5").is_err());
        assert!(parse_point("inf,0").is_err());
        assert!(parse_point("a,b").is_err());
    }
}
