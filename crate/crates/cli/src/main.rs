use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qriccati::scenario::{run_scenario, OutputFormat, ScenarioConfig, SCENARIOS};

#[derive(Parser)]
#[command(name = "qriccati", version, about = "Scenario runner for the quaternionic Riccati toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its report.
    ///
    /// Exit status: 0 if every check passes, 1 if a check fails (the report
    /// is still written), 2 for configuration errors.
    Run(Box<RunArgs>),
    /// Print the scenario names.
    List,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    scenario: Option<String>,
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Box bounds x0,x1,y0,y1,z0,z1.
    #[arg(long = "box", value_name = "x0,x1,y0,y1,z0,z1", allow_hyphen_values = true)]
    bounds: Option<String>,
    /// Grid node count n or n,n,n.
    #[arg(long)]
    grid: Option<String>,
    /// Resolutions for transport-convergence, e.g. 9,17,33.
    #[arg(long)]
    grids: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    /// key=value, repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE", allow_hyphen_values = true)]
    params: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Report path (json) or grid dump path (csv). Without it the report goes
    /// to stdout.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_parser = ["json", "csv"])]
    format: Option<String>,
}

fn parse_list<T: std::str::FromStr>(flag: &str, s: &str) -> Result<Vec<T>, String> {
    s.split(',').map(|t| t.trim().parse::<T>().map_err(|_| format!("--{flag}: cannot parse {t:?} in {s:?}"))).collect()
}

fn build_config(args: &RunArgs) -> Result<ScenarioConfig, String> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("--config {}: {e}", path.display()))?;
            serde_json::from_str::<ScenarioConfig>(&text).map_err(|e| format!("--config {}: {e}", path.display()))?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(s) = &args.scenario {
        cfg.scenario = s.clone();
    }
    if cfg.scenario.is_empty() {
        return Err("no scenario given (use --scenario or a config file)".into());
    }
    if let Some(b) = &args.bounds {
        let v: Vec<f64> = parse_list("box", b)?;
        cfg.bounds = Some(v.try_into().map_err(|_| "--box needs six numbers".to_string())?);
    }
    if let Some(g) = &args.grid {
        cfg.grid = Some(parse_list("grid", g)?);
    }
    if let Some(g) = &args.grids {
        cfg.grids = Some(parse_list("grids", g)?);
    }
    if let Some(t) = args.tol {
        cfg.tol = Some(t);
    }
    for kv in &args.params {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("--param {kv:?} is not key=value"))?;
        cfg.params.insert(k.trim().to_string(), v.trim().to_string());
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.samples {
        cfg.samples = n;
    }
    if let Some(o) = &args.out {
        cfg.out = Some(o.clone());
    }
    match args.format.as_deref() {
        Some("csv") => cfg.format = OutputFormat::Csv,
        Some(_) => cfg.format = OutputFormat::Json,
        None => {}
    }
    if cfg.format == OutputFormat::Csv && cfg.out.is_none() {
        return Err("--format csv needs --out".into());
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn report_path_for(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "grid".into());
    csv.with_file_name(format!("{stem}.report.json"))
}

fn run(args: &RunArgs) -> Result<bool, (u8, String)> {
    let cfg = build_config(args).map_err(|e| (2, e))?;
    let outcome = run_scenario(&cfg).map_err(|e| (2, e.to_string()))?;
    let report = &outcome.report;
    let json = report.to_json();
    let io = |p: &Path, e: std::io::Error| (2, format!("{}: {e}", p.display()));
    match (&cfg.out, cfg.format) {
        (None, _) => print!("{json}"),
        (Some(out), OutputFormat::Json) => fs::write(out, &json).map_err(|e| io(Path::new(out), e))?,
        (Some(out), OutputFormat::Csv) => {
            let out = Path::new(out);
            if let Some(grid) = &outcome.grid {
                let mut buf = Vec::new();
                grid.write_csv(&mut buf).map_err(|e| io(out, e))?;
                fs::write(out, buf).map_err(|e| io(out, e))?;
            }
            let rp = report_path_for(out);
            fs::write(&rp, &json).map_err(|e| io(&rp, e))?;
        }
    }
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    eprintln!(
        "{}: {} ({} checks, {} failed)",
        report.scenario,
        if report.passed { "PASS" } else { "FAIL" },
        report.checks.len(),
        failed.len()
    );
    for name in failed {
        eprintln!("  failed: {name}");
    }
    if let Some(e) = &report.error {
        eprintln!("  error: {e}");
    }
    Ok(report.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::List => {
            for s in SCENARIOS {
                println!("{s}");
            }
            ExitCode::SUCCESS
        }
        Command::Run(args) => match run(&args) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err((code, msg)) => {
                eprintln!("error: {msg}");
                ExitCode::from(code)
            }
        },
    }
}
