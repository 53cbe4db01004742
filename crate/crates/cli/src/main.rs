//! `verify`: runs a named verification suite and writes one JSON report per
//! check.
//!
//! Exit status is 0 when every check passes, 1 when any check fails and 2
//! for usage, configuration or parameter errors.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use cs_embed::report::CheckReport;
use cs_embed::suites::{chain_table_csv, run_suite, Grid, SuiteConfig, SUITES};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "verify", version, about = "Run cs-embed verification suites")]
struct Cli {
    /// Suite to run, or `all`.
    suite: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    i: Option<usize>,
    #[arg(long)]
    u: Option<f64>,
    /// Exponent for the functional-equation suite.
    #[arg(long)]
    s: Option<f64>,
    /// Overrides every check's tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// `default` or `smoke`.
    #[arg(long)]
    grid: Option<String>,
    /// Starting radial quadrature nodes.
    #[arg(long)]
    quad_nodes: Option<usize>,
    /// JSON file with any of the options above; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write reports here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Record wall-clock times in the reports.
    #[arg(long)]
    timings: bool,
}

fn config(cli: &Cli) -> Result<SuiteConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => SuiteConfig::default(),
    };
    cfg.n = cli.n.or(cfg.n);
    cfg.i = cli.i.or(cfg.i);
    cfg.u = cli.u.or(cfg.u);
    cfg.s = cli.s.or(cfg.s);
    cfg.tol = cli.tol.or(cfg.tol);
    cfg.seed = cli.seed.unwrap_or(cfg.seed);
    cfg.quad_nodes = cli.quad_nodes.or(cfg.quad_nodes);
    cfg.timings |= cli.timings;
    if let Some(g) = &cli.grid {
        cfg.grid = serde_json::from_value::<Grid>(serde_json::Value::String(g.clone()))
            .map_err(|_| format!("unknown grid `{g}`, expected `default` or `smoke`"))?;
    }
    Ok(cfg)
}

fn reports_csv(reports: &[CheckReport]) -> Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header = [
        "check_name", "params", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "abs_err", "rel_err", "tol", "pass", "wall_time_ms", "paper_ref",
    ];
    w.write_record(header).map_err(|e| e.to_string())?;
    for r in reports {
        let params = serde_json::to_string(&r.params).map_err(|e| e.to_string())?;
        w.write_record([
            r.check_name.clone(),
            params,
            r.lhs[0].to_string(),
            r.lhs[1].to_string(),
            r.rhs[0].to_string(),
            r.rhs[1].to_string(),
            r.abs_err.to_string(),
            r.rel_err.to_string(),
            r.tol.to_string(),
            r.pass.to_string(),
            r.wall_time_ms.to_string(),
            r.paper_ref.clone(),
        ])
        .map_err(|e| e.to_string())?;
    }
    String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())
}

fn render(cli: &Cli, cfg: &SuiteConfig, reports: &[CheckReport]) -> Result<String, String> {
    match cli.format {
        Format::Json => {
            let mut out = String::new();
            for r in reports {
                out.push_str(&serde_json::to_string(r).map_err(|e| e.to_string())?);
                out.push('\n');
            }
            Ok(out)
        }
        Format::Csv if cli.suite == "chain" => match (cfg.n, cfg.i, cfg.u) {
            (Some(n), Some(i), Some(u)) => Ok(chain_table_csv(n, i, u)),
            _ => Err("the chain table needs --n, --i and --u".into()),
        },
        Format::Csv => reports_csv(reports),
    }
}

fn run(cli: &Cli) -> Result<bool, String> {
    if cli.suite != "all" && !SUITES.contains(&cli.suite.as_str()) {
        return Err(format!("unknown suite `{}`; expected one of all, {}", cli.suite, SUITES.join(", ")));
    }
    let cfg = config(cli)?;
    let reports = run_suite(&cli.suite, &cfg).map_err(|e| e.to_string())?;
    let text = render(cli, &cfg, &reports)?;
    match &cli.report {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string())?,
    }
    let failed: Vec<&CheckReport> = reports.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        let params = serde_json::to_string(&r.params).unwrap_or_default();
        eprintln!("FAIL {} rel_err={:e} tol={:e} params={params}", r.check_name, r.rel_err, r.tol);
    }
    eprintln!("{}: {} checks, {} failed", cli.suite, reports.len(), failed.len());
    Ok(failed.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
