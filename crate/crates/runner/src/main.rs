use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bec_runner::config::{AnalyticSection, Kind, ScenarioConfig};
use bec_runner::{parse_config, run_with_jobs, verify_dir, Parsed};

#[derive(Parser)]
#[command(name = "bec", version, about = "Affine BEC dynamics in rotating traps")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a parameter sweep on a worker pool.
    Sweep {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Isotropic free expansion: ODE against the exact λ(t), CSV on stdout.
    Analytic {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        d: u8,
        #[arg(long)]
        omega0: f64,
        #[arg(long)]
        tmax: f64,
    },
    /// Re-check manifest checksums and acceptance assertions.
    Verify { dir: PathBuf },
}

fn load(path: &PathBuf) -> Result<Parsed, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn report(m: &bec_runner::RunManifest) {
    for (k, v) in &m.results {
        println!("{k} = {v}");
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Run { config, out } => load(&config).and_then(|p| {
            if p.config.kind == Kind::Sweep {
                log::info!("sweep config given to run; using one worker");
            }
            run_with_jobs(&p, &out, 1).map(|m| report(&m)).map_err(|e| e.to_string())
        }),
        Cmd::Sweep { config, out, jobs } => load(&config).and_then(|p| {
            if p.config.kind != Kind::Sweep {
                return Err(format!("{}: kind must be sweep", config.display()));
            }
            run_with_jobs(&p, &out, jobs).map(|m| report(&m)).map_err(|e| e.to_string())
        }),
        Cmd::Analytic { d, omega0, tmax } => analytic(d as usize, omega0, tmax),
        Cmd::Verify { dir } => match verify_dir(&dir) {
            Ok(checks) => {
                for c in &checks {
                    println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                }
                if checks.iter().all(|c| c.passed) {
                    Ok(())
                } else {
                    Err("verification failed".into())
                }
            }
            Err(e) => Err(e.to_string()),
        },
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn analytic(d: usize, omega0: f64, tmax: f64) -> Result<(), String> {
    let cfg = ScenarioConfig {
        kind: Kind::FreeExpansionAnalytic,
        trap: Default::default(),
        schedule: Default::default(),
        grid: Default::default(),
        numerics: Default::default(),
        outputs: Default::default(),
        analytic: Some(AnalyticSection { d, omega0, t_max: tmax, ..Default::default() }),
        sweep: None,
    };
    let warnings = cfg.validate().map_err(|e| e.to_string())?;
    let dir = std::env::temp_dir().join(format!("bec-analytic-{}", std::process::id()));
    let res = run_with_jobs(&Parsed { config: cfg, warnings }, &dir, 1);
    let out = res.map_err(|e| e.to_string()).and_then(|m| {
        let csv = fs::read_to_string(dir.join("lambda.csv")).map_err(|e| e.to_string())?;
        print!("{csv}");
        for (k, v) in &m.results {
            eprintln!("{k} = {v}");
        }
        Ok(())
    });
    let _ = fs::remove_dir_all(&dir);
    out
}
