//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid configuration or arguments, 2 simulation
//! or output error, 3 failed verification.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::offload::Scheme;
use crate::simulator::{self, output, MetricsReport, Scenario, SimError};
use crate::verify::{run_suites, Fault, VerifyOptions};

pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_SIM: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "leo-offload", version, about = "Adaptive task offloading over LEO constellations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one scenario and write per-task and summary outputs.
    Run {
        #[command(flatten)]
        common: Common,
        /// Scheme to simulate; `all` runs each scheme on the same workload.
        #[arg(long, value_enum)]
        scheme: Option<SchemeArg>,
    },
    /// Mean delay over a grid of data sizes and compute requirements.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Data sizes in GB: `a,b,c`, `lin:start:stop:n` or `log:start:stop:n`.
        #[arg(long)]
        data_gb: Option<String>,
        /// Compute requirements in GFLO, same syntax as `--data-gb`.
        #[arg(long)]
        compute_gflo: Option<String>,
        #[arg(long, value_enum, default_value = "all")]
        scheme: SchemeArg,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Improvement of adaptive offloading for several compute capabilities.
    Table {
        #[command(flatten)]
        common: Common,
        /// Satellite capabilities in GFLOPS, same syntax as sweep grids.
        #[arg(long)]
        capabilities: Option<String>,
        #[arg(long, default_value_t = 0)]
        jobs: usize,
    },
    /// Run the built-in property suites.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
    /// Print the default scenario file.
    DumpDefault {
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario file; the built-in defaults when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override the scenario's seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Adaptive,
    Ground,
    Onehop,
    All,
}

impl SchemeArg {
    fn schemes(self) -> Vec<Scheme> {
        match self {
            SchemeArg::Adaptive => vec![Scheme::Adaptive],
            SchemeArg::Ground => vec![Scheme::Ground],
            SchemeArg::Onehop => vec![Scheme::OneHop],
            SchemeArg::All => Scheme::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FaultArg {
    NegateWeight,
}

struct Failure {
    code: i32,
    message: String,
}

fn config_err(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_CONFIG, message: message.into() }
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure { code: EXIT_SIM, message: format!("writing {}: {e}", path.display()) }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Config(c) => config_err(c.to_string()),
            other => Failure { code: EXIT_SIM, message: other.to_string() },
        }
    }
}

/// Parses a list of positive numbers: `a,b,c`, `lin:start:stop:n` or
/// `log:start:stop:n` (both inclusive of the end points).
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
    let values = match spec.split(':').collect::<Vec<_>>().as_slice() {
        [kind @ ("lin" | "log"), a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|_| format!("`{n}` is not a count"))?;
            if n == 0 {
                return Err("a range needs at least one point".into());
            }
            if *kind == "log" && !(a > 0.0 && b > 0.0) {
                return Err("log ranges need positive end points".into());
            }
            (0..n)
                .map(|i| {
                    let f = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                    if i + 1 == n && n > 1 {
                        b
                    } else if *kind == "lin" {
                        a + (b - a) * f
                    } else {
                        (a.ln() + (b.ln() - a.ln()) * f).exp()
                    }
                })
                .collect()
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("malformed grid `{spec}`")),
    };
    if values.is_empty() {
        return Err("empty grid".into());
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(format!("grid value {v} must be finite and nonnegative"));
    }
    Ok(values)
}

fn load(common: &Common) -> Result<Scenario, Failure> {
    let mut s = match &common.scenario {
        Some(path) => Scenario::load(path).map_err(|e| config_err(e.to_string()))?,
        None => Scenario::default(),
    };
    if let Some(seed) = common.seed {
        s.simulation.seed = seed;
    }
    Ok(s)
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| io_err(path, e))
}

fn out_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

fn print_report(r: &MetricsReport) {
    let b = r.mean_breakdown;
    println!(
        "{:<8} tasks={} dropped={} mean_delay_s={:.6} isl_tx_s={:.6} sgl_tx_s={:.6} compute_s={:.6}",
        r.scheme,
        r.records.len(),
        r.dropped.len(),
        r.mean_delay_s,
        b.isl_tx_s,
        b.sgl_tx_s,
        b.compute_s
    );
}

fn cmd_run(common: &Common, scheme: Option<SchemeArg>) -> Result<(), Failure> {
    let base = load(common)?;
    let schemes = scheme.map_or_else(|| vec![base.simulation.scheme], SchemeArg::schemes);
    out_dir(&common.out)?;
    let mut reports = Vec::new();
    for s in schemes {
        let report = simulator::run(&base.with_scheme(s))?;
        print_report(&report);
        let tasks = common.out.join(format!("tasks_{s}.csv"));
        output::write_tasks_csv(&report, create(&tasks)?).map_err(|e| io_err(&tasks, e))?;
        let json = common.out.join(format!("report_{s}.json"));
        output::write_report_json(&report, create(&json)?).map_err(|e| io_err(&json, e))?;
        reports.push(report);
    }
    let summary = common.out.join("summary.csv");
    output::write_summary_csv(&reports.iter().collect::<Vec<_>>(), create(&summary)?).map_err(|e| io_err(&summary, e))?;
    Ok(())
}

fn cmd_sweep(common: &Common, data_gb: Option<&str>, compute_gflo: Option<&str>, scheme: SchemeArg, jobs: usize) -> Result<(), Failure> {
    let base = load(common)?;
    let grid = |spec: Option<&str>, default: &[f64], key: &str| match spec {
        Some(s) => parse_grid(s).map_err(|e| config_err(format!("--{key}: {e}"))),
        None => Ok(default.to_vec()),
    };
    let n = grid(data_gb, &base.grid.data_in_gb, "data-gb")?;
    if n.iter().any(|&v| v <= 0.0) {
        return Err(config_err("--data-gb: data sizes must be positive"));
    }
    let c = grid(compute_gflo, &base.grid.compute_gflo, "compute-gflo")?;
    let rows = simulator::sweep(&base, &n, &c, &scheme.schemes(), jobs)?;
    out_dir(&common.out)?;
    let path = common.out.join("sweep.csv");
    output::write_sweep_csv(&rows, create(&path)?).map_err(|e| io_err(&path, e))?;
    let cells = n.len() * c.len();
    println!("{} cells x {} schemes -> {}", cells, rows.len() / cells.max(1), path.display());
    for r in rows.iter().filter(|r| r.scheme == r.argmin_scheme) {
        println!("N={:.4e} bits C={} GFLO best={} delay_s={:.6}", r.n_bits, r.c_gflo, r.argmin_scheme, r.mean_delay_s);
    }
    Ok(())
}

fn cmd_table(common: &Common, capabilities: Option<&str>, jobs: usize) -> Result<(), Failure> {
    let base = load(common)?;
    let caps = match capabilities {
        Some(s) => parse_grid(s).map_err(|e| config_err(format!("--capabilities: {e}")))?,
        None => base.grid.capabilities_gflops.clone(),
    };
    if caps.iter().any(|&c| c <= 0.0) {
        return Err(config_err("--capabilities: capabilities must be positive"));
    }
    let rows = simulator::platform_table(&base, &caps, jobs)?;
    out_dir(&common.out)?;
    let path = common.out.join("table.csv");
    output::write_table_csv(&rows, create(&path)?).map_err(|e| io_err(&path, e))?;
    println!("{:>10} {:>14} {:>14}", "GFLOPS", "vs ground %", "vs one-hop %");
    for r in &rows {
        println!("{:>10} {:>+14.2} {:>+14.2}", r.capability_gflops, r.impr_vs_ground_pct, r.impr_vs_onehop_pct);
    }
    Ok(())
}

fn cmd_verify(seed: u64, fault: Option<FaultArg>) -> Result<(), Failure> {
    let opts = VerifyOptions { seed, fault: fault.map(|FaultArg::NegateWeight| Fault::NegateWeight) };
    let results = run_suites(&opts);
    for r in &results {
        let status = if r.passed() { "pass" } else { "FAIL" };
        println!("{status} {:<20} {} cases", r.name, r.cases);
    }
    match results.iter().find(|r| !r.passed()) {
        Some(r) => Err(Failure {
            code: EXIT_VERIFY,
            message: format!("{} failed: {}", r.name, r.failure.as_deref().unwrap_or("")),
        }),
        None => Ok(()),
    }
}

fn cmd_dump_default(out: Option<&Path>) -> Result<(), Failure> {
    let text = Scenario::default().to_toml_string();
    match out {
        Some(path) => fs::write(path, text).map_err(|e| io_err(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| io_err(Path::new("<stdout>"), e))
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Run { common, scheme } => cmd_run(common, *scheme),
        Command::Sweep { common, data_gb, compute_gflo, scheme, jobs } => {
            cmd_sweep(common, data_gb.as_deref(), compute_gflo.as_deref(), *scheme, *jobs)
        }
        Command::Table { common, capabilities, jobs } => cmd_table(common, capabilities.as_deref(), *jobs),
        Command::Verify { seed, inject_fault } => cmd_verify(*seed, *inject_fault),
        Command::DumpDefault { out } => cmd_dump_default(out.as_deref()),
    };
    match result {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_lists_and_ranges() {
        assert_eq!(parse_grid("1,2.5,3").unwrap(), vec![1.0, 2.5, 3.0]);
        assert_eq!(parse_grid("lin:0:10:3").unwrap(), vec![0.0, 5.0, 10.0]);
        let log = parse_grid("log:1:100:3").unwrap();
        assert!((log[1] - 10.0).abs() < 1e-12);
        assert_eq!(log[2], 100.0);
        assert_eq!(parse_grid("lin:4:8:1").unwrap(), vec![4.0]);
    }

    #[test]
    fn malformed_grids_rejected() {
        for bad in ["", "a,b", "lin:1:2", "lin:1:2:0", "log:0:1:3", "cube:1:2:3", "1,-2", "1,,2"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
