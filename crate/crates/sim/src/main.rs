use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use wildfront::config::{CheckKind, GridConfig};
use wildfront::{fixtures, load_scenario, output, run_scenario, svg, RunReport, Scenario};
use wildfront_core::{Plane, SphereGrid, Vec3};

/// Wildfire front propagation under wind.
#[derive(Parser)]
#[command(name = "wildfront", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write fronts, rays, report and slice plot.
    Run {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Output directory (defaults to the scenario's `output.dir`, then `out/<name>`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario's invariant checks and print the outcomes.
    Check {
        #[command(flatten)]
        scenario: ScenarioArgs,
        /// Checks to run instead of the scenario's list.
        #[arg(long, value_delimiter = ',', value_parser = parse_check)]
        only: Vec<CheckKind>,
    },
    /// Render a slice of a JSON report as SVG.
    Render {
        report: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Slice plane `z=<c>`, `y=<c>` or `x=<c>` (defaults to the report's plane).
        #[arg(long)]
        plane: Option<String>,
    },
    /// List the built-in fixtures, or print one as a scenario file.
    Fixtures { name: Option<String> },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file, or `fixture:<name>` for a built-in one.
    scenario: String,
    /// Output grid resolution (nodes per side).
    #[arg(long)]
    grid: Option<usize>,
    /// Number of launch directions around a point source.
    #[arg(long)]
    fan: Option<usize>,
    /// Ray integration step.
    #[arg(long)]
    dt: Option<f64>,
}

fn parse_check(s: &str) -> Result<CheckKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("unknown check `{s}`"))
}

fn parse_plane(s: &str) -> Result<Plane> {
    let (axis, c) = s.split_once('=').context("expected <axis>=<value>")?;
    let c: f64 = c.trim().parse().context("plane offset is not a number")?;
    let n = match axis.trim() {
        "x" => Vec3::X,
        "y" => Vec3::Y,
        "z" => Vec3::Z,
        a => bail!("unknown axis `{a}`"),
    };
    Ok(Plane::new(n * c, n)?)
}

impl ScenarioArgs {
    fn load(&self) -> Result<Scenario> {
        let mut s = match self.scenario.strip_prefix("fixture:") {
            Some(name) => fixtures::fixture(name).with_context(|| format!("no fixture named `{name}`"))?,
            None => load_scenario(Path::new(&self.scenario))?,
        };
        if let Some(n) = self.grid {
            let g = s.output.grid.get_or_insert(GridConfig { u: [-5.0, 5.0], v: [-5.0, 5.0], n: [n, n] });
            g.n = [n, n];
        }
        if let Some(n) = self.fan {
            s.sampling.fan = SphereGrid::with_count(n);
        }
        if let Some(dt) = self.dt {
            s.sampling.dt = Some(dt);
        }
        s.validate()?;
        Ok(s)
    }
}

fn print_checks(report: &RunReport) {
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        println!("{status} {:?}: {:.3e} (tolerance {:.1e}) {}", c.check, c.value, c.tolerance, c.detail);
    }
    for e in &report.errors {
        println!("ERROR {e}");
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, out } => {
            let s = scenario.load()?;
            let dir = out.or_else(|| s.output.dir.as_ref().map(|d| s.resolve_path(d))).unwrap_or_else(|| Path::new("out").join(&s.name));
            let mut report = run_scenario(&s)?;
            let files = output::write_outputs(&mut report, &dir)?;
            for f in files {
                println!("wrote {}", f.display());
            }
            print_checks(&report);
            for (stage, d) in &report.timing.stages {
                eprintln!("{stage}: {:.3} s", d.as_secs_f64());
            }
            eprintln!("total: {:.3} s", report.timing.total.as_secs_f64());
            Ok(report.checks_passed() && report.errors.is_empty())
        }
        Command::Check { scenario, only } => {
            let mut s = scenario.load()?;
            if !only.is_empty() {
                s.checks = only;
                s.validate()?;
            }
            if s.checks.is_empty() {
                bail!("the scenario requests no checks");
            }
            let report = run_scenario(&s)?;
            print_checks(&report);
            Ok(report.checks_passed())
        }
        Command::Render { report, out, plane } => {
            let r = output::read_report_json(&report)?;
            let plane = match plane {
                Some(p) => parse_plane(&p)?,
                None => r.plane,
            };
            let slices = svg::render_slice(&r, &plane, &out)?;
            println!("wrote {} ({} fronts)", out.display(), slices.len());
            Ok(true)
        }
        Command::Fixtures { name } => {
            match name {
                Some(n) => print!("{}", fixtures::fixture(&n).with_context(|| format!("no fixture named `{n}`"))?.to_toml()),
                None => fixtures::NAMES.iter().for_each(|n| println!("{n}")),
            }
            Ok(true)
        }
    }
}
