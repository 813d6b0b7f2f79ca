//! `shapeflow` command line: configured geodesic runs, validation suites
//! and the concentric-sphere ODE.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use shapeflow::io::RunConfig;
use shapeflow::oracles::{sphere_ode_solve, SphereState};
use shapeflow::runner::{is_config_error, run};
use shapeflow::validation::{run_suites, SUITES};
use shapeflow::ShapeError;

const EXIT_CONFIG: u8 = 1;
const EXIT_ABORT: u8 = 2;
const EXIT_CHECKS: u8 = 3;

#[derive(Parser)]
#[command(name = "shapeflow", version, about = "Geodesics of Sobolev metrics on curves and surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the geodesic described by a JSON config.
    Run { config: PathBuf },
    /// Run validation suites and print one PASS/FAIL line per property.
    Validate {
        /// Comma-separated suites (operators, variations, geodesics).
        #[arg(long, value_delimiter = ',', default_values_t = SUITES.map(String::from))]
        suite: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print JSON instead of text lines.
        #[arg(long)]
        json: bool,
    },
    /// Integrate the radius ODE of concentric spheres and print `t,r,r_t`.
    SphereOde {
        #[arg(long)]
        r0: f64,
        #[arg(long)]
        rt: f64,
        /// Ambient dimension.
        #[arg(long, default_value_t = 2)]
        n: u32,
        #[arg(long = "a", default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1)]
        p: u32,
        #[arg(long)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn error_code(e: &ShapeError) -> u8 {
    if is_config_error(e) {
        EXIT_CONFIG
    } else {
        EXIT_ABORT
    }
}

fn cmd_run(path: &std::path::Path) -> ExitCode {
    let cfg = match RunConfig::from_path(path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    match run(&cfg) {
        Ok(outcome) => {
            for c in &outcome.checks {
                println!(
                    "{} {} lhs={:.6e} rhs={:.6e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.lhs,
                    c.rhs
                );
            }
            if let Some(e) = &outcome.abort {
                eprintln!("{e}");
            }
            println!(
                "{:?}: {} frames, {} accepted / {} rejected steps, {:.2}s, output in {}",
                outcome.status,
                outcome.frames.len(),
                outcome.trajectory.accepted,
                outcome.trajectory.rejected,
                outcome.wall_seconds,
                cfg.output.dir.display()
            );
            ExitCode::from(outcome.status.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(error_code(&e))
        }
    }
}

fn cmd_validate(suites: &[String], seed: u64, json: bool) -> ExitCode {
    let suites: Vec<String> = suites.iter().filter(|s| !s.trim().is_empty()).cloned().collect();
    let results = match run_suites(&suites, seed) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(error_code(&e));
        }
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&results).expect("plain data serializes"));
    } else {
        for r in &results {
            println!("{}", r.line());
        }
    }
    if results.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECKS)
    }
}

fn cmd_sphere(s: SphereState, dt: f64, t_end: f64, out: Option<PathBuf>) -> anyhow::Result<ExitCode> {
    let samples = match sphere_ode_solve(&s, dt, t_end) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return Ok(ExitCode::from(error_code(&e)));
        }
    };
    let mut text = String::from("t,r,r_t\n");
    for x in samples {
        text.push_str(&format!("{:?},{:?},{:?}\n", x.t, x.r, x.r_t));
    }
    match out {
        Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> anyhow::Result<ExitCode> {
    // usage errors count as configuration errors
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return Ok(ExitCode::from(code));
        }
    };
    match cli.command {
        Command::Run { config } => Ok(cmd_run(&config)),
        Command::Validate { suite, seed, json } => Ok(cmd_validate(&suite, seed, json)),
        Command::SphereOde { r0, rt, n, a, p, t_end, dt, out } => {
            cmd_sphere(SphereState { r: r0, r_t: rt, n, a, p }, dt, t_end, out)
        }
    }
}
