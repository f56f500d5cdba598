use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use gridlease::io::{resolve_case_file, write_report_dir, write_summary_csv, CaseFile};
use gridlease::kkt::{assemble, write_dump, IntensityVector};
use gridlease::model::{ForwardPolicy, MarketCase, Scheme};
use gridlease::scenario::{delta_sweep, forward_sweep, solve_case, EquilibriumReport};
use gridlease::solver::check_batch_feasibility;
use gridlease::Error;
use serde_json::json;

/// Power market equilibria with a hyperscaler leasing GPU capacity from
/// modular datacenters.
#[derive(Parser)]
#[command(name = "gridlease", version)]
struct Cli {
    /// Directory (or file, for dump-mlcp) receiving the output.
    #[arg(long, global = true, env = "GRIDLEASE_OUT")]
    out: Option<PathBuf>,
    /// Print errors to stderr as a JSON object.
    #[arg(long, global = true)]
    error_json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CaseArgs {
    /// Bundled case name (rts24, micro1, micro-overload) or path to a TOML file.
    case: String,
    /// Disclosure scheme, expost or exante. Defaults to the case's own.
    #[arg(long)]
    scheme: Option<Scheme>,
    /// Hyperscaler weight on processing cost, in [0, 1].
    #[arg(long)]
    delta: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one equilibrium and print its report as JSON.
    Solve {
        #[command(flatten)]
        case: CaseArgs,
        /// Forward contract fraction; 0 disables forward bounds.
        #[arg(long)]
        forward: Option<f64>,
    },
    /// Solve over a range of δ, optionally for several forward fractions.
    Sweep {
        #[command(flatten)]
        case: CaseArgs,
        /// `start:stop:step` or a comma-separated list.
        #[arg(long, default_value = "0.1:1.0:0.1")]
        deltas: String,
        /// Comma-separated forward fractions; 0 means no forward bounds.
        #[arg(long)]
        forward: Option<String>,
    },
    /// Compare the batch load with the deliverable throughput.
    Feascheck {
        case: String,
    },
    /// Write the assembled complementarity problem as text triplets.
    DumpMlcp {
        #[command(flatten)]
        case: CaseArgs,
    },
}

#[derive(Debug)]
struct Failure(anyhow::Error);

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(Failure(e)) => {
            let lib = e.downcast_ref::<Error>();
            if cli.error_json {
                eprintln!("{}", error_json(&e, lib));
            } else {
                eprintln!("error: {e:#}");
            }
            match lib {
                Some(err) if !err.is_input_error() => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn error_json(e: &anyhow::Error, lib: Option<&Error>) -> serde_json::Value {
    let mut v = json!({
        "error": lib.map_or("input", |l| l.code()),
        "message": format!("{e:#}"),
    });
    match lib {
        Some(Error::Invalid(violations)) => v["violations"] = json!(violations),
        Some(Error::Infeasible { period, load, limit }) => {
            v["period"] = json!(period);
            v["load"] = json!(load);
            v["limit"] = json!(limit);
        }
        Some(Error::NoConvergence {
            iterations,
            last_step,
            trajectory,
        }) => {
            v["iterations"] = json!(iterations);
            v["last_step"] = json!(last_step);
            v["trajectory"] = json!(trajectory);
        }
        Some(Error::PivotBreakdown { row }) => v["row"] = json!(row),
        _ => {}
    }
    v
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.into())
    }
}

fn load(args: &CaseArgs) -> Result<(CaseFile, MarketCase), Failure> {
    let file = resolve_case_file(&args.case)?;
    let mut case = file.to_case()?;
    if let Some(s) = args.scheme {
        case = case.with_scheme(s);
    }
    if let Some(d) = args.delta {
        if !(0.0..=1.0).contains(&d) {
            return Err(anyhow::anyhow!("--delta must lie in [0, 1], got {d}").into());
        }
        if case.hyperscaler.is_none() {
            return Err(anyhow::anyhow!("--delta given but the case has no hyperscaler").into());
        }
        case = case.with_delta(d);
    }
    Ok((file, case))
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    match &cli.command {
        Command::Solve { case, forward } => {
            let (file, mut market) = load(case)?;
            if let Some(f) = forward {
                market.forward = forward_policy(*f)?;
            }
            let report = solve_case(&market, &file.solver_config(), &file.fixed_point_config())?;
            let reports = [report];
            if let Some(dir) = &cli.out {
                write_report_dir(&reports, dir)?;
            }
            let stdout = std::io::stdout();
            serde_json::to_writer_pretty(stdout.lock(), &reports[0])?;
            println!();
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { case, deltas, forward } => {
            let (file, market) = load(case)?;
            if market.hyperscaler.is_none() {
                return Err(anyhow::anyhow!("sweeping δ needs a hyperscaler").into());
            }
            let deltas = parse_deltas(deltas)?;
            let (cfg, fp) = (file.solver_config(), file.fixed_point_config());
            let points: Vec<gridlease::Result<EquilibriumReport>> = match forward {
                None => delta_sweep(&market, &deltas, &cfg, &fp),
                Some(list) => {
                    let fractions = parse_list(list)?;
                    forward_sweep(&market, &fractions, &deltas, &cfg, &fp)?
                        .into_iter()
                        .flat_map(|row| row.points)
                        .collect()
                }
            };
            let mut ok = Vec::new();
            let mut failed = 0;
            for p in points {
                match p {
                    Ok(r) => ok.push(r),
                    Err(e) => {
                        failed += 1;
                        eprintln!("warning: point skipped: {e}");
                    }
                }
            }
            if let Some(dir) = &cli.out {
                write_report_dir(&ok, dir)?;
            }
            write_summary_csv(&ok, std::io::stdout().lock())?;
            Ok(if failed > 0 { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
        Command::Feascheck { case } => {
            let file = resolve_case_file(case)?;
            let market = file.to_case()?;
            let verdicts = check_batch_feasibility(&market, &file.solver_config())?;
            let all = verdicts.iter().all(|v| v.feasible);
            let text = serde_json::to_string_pretty(&verdicts)?;
            match &cli.out {
                Some(p) => write_file(p, &text)?,
                None => println!("{text}"),
            }
            Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::DumpMlcp { case } => {
            let (_, market) = load(case)?;
            // ex ante instances are dumped at zero disclosed intensity
            let zeros = IntensityVector::zeros(market.mdcs.len(), market.periods);
            let inst = match market.scheme {
                Scheme::ExPost => assemble(&market, None)?,
                Scheme::ExAnte => assemble(&market, Some(&zeros))?,
            };
            match &cli.out {
                Some(p) => {
                    let f = std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
                    write_dump(&inst, std::io::BufWriter::new(f))?;
                }
                None => write_dump(&inst, std::io::stdout().lock())?,
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn forward_policy(f: f64) -> anyhow::Result<Option<ForwardPolicy>> {
    if !(0.0..=1.0).contains(&f) {
        bail!("--forward must lie in [0, 1], got {f}");
    }
    Ok((f > 0.0).then_some(ForwardPolicy {
        fraction: f,
        baseline: None,
    }))
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    let mut f = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    writeln!(f, "{text}")?;
    Ok(())
}

fn parse_list(s: &str) -> anyhow::Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().with_context(|| format!("bad number `{x}`")))
        .collect()
}

/// `start:stop:step` (inclusive) or a comma-separated list.
fn parse_deltas(s: &str) -> anyhow::Result<Vec<f64>> {
    if !s.contains(':') {
        return parse_list(s);
    }
    let parts = parse_list(&s.replace(':', ","))?;
    let [a, b, step] = parts[..] else {
        bail!("expected start:stop:step, got `{s}`");
    };
    if step.is_nan() || step <= 0.0 || b < a {
        bail!("range `{s}` is empty");
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    // round to the step's precision so 0.1 + 0.2 prints as 0.3
    Ok((0..=n).map(|k| ((a + k as f64 * step) * 1e9).round() / 1e9).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_ranges() {
        assert_eq!(parse_deltas("0.1:0.3:0.1").unwrap(), vec![0.1, 0.2, 0.3]);
        assert_eq!(parse_deltas("0.5,1").unwrap(), vec![0.5, 1.0]);
        assert_eq!(parse_deltas("0.1:1:0.1").unwrap().len(), 10);
        assert!(parse_deltas("1:0:0.1").is_err());
    }
}
