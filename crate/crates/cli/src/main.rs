use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mrnls::lab::{self, LabError, RunRecord, ScenarioConfig, EXIT_CONFIG, EXIT_FAIL, EXIT_PASS};

#[derive(Parser)]
#[command(name = "mrnls", version, about = "Numerical lab for the quadratic NLS system in four dimensions")]
struct Cli {
    /// Directory that all outputs (and the ground-state registry) live under
    #[arg(long, global = true, default_value = "mrnls-out")]
    output_root: PathBuf,
    /// Print the full run record as JSON instead of the verdict lines
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario config
    Run { config: PathBuf },
    /// Run a template config once per value of a numeric field
    Scan {
        template: PathBuf,
        /// dotted path such as `kappa`, `grid.n` or `params.c_values`
        #[arg(long)]
        axis: String,
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true, allow_negative_numbers = true)]
        values: Vec<f64>,
    },
    /// Solve and register the ground state for one kappa
    Groundstate {
        #[arg(long)]
        kappa: f64,
        #[arg(long, default_value_t = 256)]
        n: usize,
        #[arg(long, default_value_t = 20.0)]
        radius: f64,
        /// also re-solve on a grid with twice the points and 1.5x the radius
        #[arg(long)]
        refine: bool,
    },
    /// Run one inequality audit
    Audit {
        kind: AuditArg,
        #[arg(long, default_value_t = 0.5)]
        kappa: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AuditArg {
    Gn,
    Strichartz,
    Bilinear,
    Weights,
}

impl AuditArg {
    fn name(self) -> &'static str {
        match self {
            Self::Gn => "gn",
            Self::Strichartz => "strichartz",
            Self::Bilinear => "bilinear",
            Self::Weights => "weights",
        }
    }
}

fn read_json(path: &Path) -> Result<Value, LabError> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
}

fn report(rec: &RunRecord, as_json: bool) {
    if as_json {
        println!("{}", serde_json::to_string_pretty(rec).unwrap_or_default());
        return;
    }
    for v in &rec.verdicts {
        let tag = if v.pass { "PASS" } else { "FAIL" };
        let kind = match v.kind {
            lab::VerdictKind::Assertion => "",
            lab::VerdictKind::Expectation => " (expectation)",
        };
        println!("{tag} {}: {:.6e} [{}]{kind}", v.name, v.value, v.rule);
    }
    for (k, v) in &rec.summary {
        println!("  {k} = {v}");
    }
    for n in &rec.notes {
        println!("  note: {n}");
    }
    println!("{} in {:.2}s", if rec.passed { "passed" } else { "failed" }, rec.wall_time_s);
}

fn run_value(cfg: Value, root: &Path, as_json: bool) -> Result<i32, LabError> {
    let cfg = ScenarioConfig::from_value(cfg)?;
    let rec = lab::run(&cfg, root)?;
    report(&rec, as_json);
    Ok(rec.exit_code())
}

fn dispatch(cli: &Cli) -> Result<i32, LabError> {
    let root = cli.output_root.as_path();
    match &cli.command {
        Command::Run { config } => run_value(read_json(config)?, root, cli.json),
        Command::Scan { template, axis, values } => {
            let rows = lab::scan(&read_json(template)?, axis, values, root)?;
            print!("{}", lab::scan_csv(axis, &rows));
            Ok(if rows.iter().all(|r| r.exit_code == EXIT_PASS) { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Groundstate { kappa, n, radius, refine } => {
            let cfg = json!({
                "schema_version": lab::SCHEMA_VERSION,
                "scenario": "ground_state",
                "kappa": kappa,
                "grid": { "kind": "radial4d", "n": n, "extent": radius, "dims": 4 },
                "params": { "refinement_check": refine },
                "output": format!("ground_state_kappa{kappa}"),
            });
            run_value(cfg, root, cli.json)
        }
        Command::Audit { kind, kappa, seed } => {
            let cfg = json!({
                "schema_version": lab::SCHEMA_VERSION,
                "scenario": "inequality_audit",
                "kappa": kappa,
                "seed": seed,
                "grid": { "kind": "radial4d", "n": 256, "extent": 20.0, "dims": 4 },
                "params": { "audits": [kind.name()] },
                "output": format!("audit_{}", kind.name()),
            });
            run_value(cfg, root, cli.json)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            return ExitCode::from(code as u8);
        }
    };
    let code = match dispatch(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
