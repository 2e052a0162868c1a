use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use symwrap_cli::spec::{parse_count, parse_grid, parse_reals};
use symwrap_cli::{run, CliError, Command, Format, RunSpec, Tolerances};

/// Verify the wrapped-shear cube embedding and the derived ball embedding.
#[derive(Parser, Debug)]
#[command(name = "symwrap", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Sub {
    /// Symplecticity, containment, injectivity and volume of the maps.
    Verify,
    /// Section areas over a z-grid, Monte Carlo spot checks and Fubini integral.
    Sections,
    /// Complement connectivity, slit witnesses, fixtures and bounded hulls.
    Topology,
    /// SVG figures of one section.
    Plot,
}

#[derive(Args, Debug)]
struct Opts {
    /// Half the phase-space dimension.
    #[arg(long = "n", global = true, default_value_t = 2, env = "SYMWRAP_N")]
    n: usize,
    /// Length of the long factor (0, c); defaults to 1/a or 2.
    #[arg(long = "c", global = true, env = "SYMWRAP_C")]
    c: Option<f64>,
    /// Hull bound for the ball embedding; implies c = 1/a.
    #[arg(long = "a", global = true, env = "SYMWRAP_A")]
    a: Option<f64>,
    #[arg(long, global = true, default_value_t = 0, env = "SYMWRAP_SEED")]
    seed: u64,
    /// Monte Carlo sample count (accepts 1e6).
    #[arg(long, global = true, value_parser = parse_count, default_value = "1e6", env = "SYMWRAP_SAMPLES")]
    samples: usize,
    #[arg(long, global = true, value_parser = parse_count, default_value = "1e4", env = "SYMWRAP_SYMPLECTIC_SAMPLES")]
    symplectic_samples: usize,
    /// Monte Carlo samples per z-grid cell for the Fubini integral.
    #[arg(long, global = true, value_parser = parse_count, default_value = "1e4", env = "SYMWRAP_CELL_SAMPLES")]
    cell_samples: usize,
    #[arg(long, global = true, default_value_t = 20, env = "SYMWRAP_SPOT_CHECKS")]
    spot_checks: usize,
    /// Raster resolutions, comma separated.
    #[arg(long = "N", global = true, env = "SYMWRAP_RESOLUTIONS")]
    resolutions: Option<String>,
    /// z-grid as WxH.
    #[arg(long, global = true, value_parser = parse_grid, env = "SYMWRAP_GRID")]
    grid: Option<[usize; 2]>,
    /// Section parameter as X,Y.
    #[arg(long, global = true, env = "SYMWRAP_Z")]
    z: Option<String>,
    #[arg(long, global = true, default_value = "symwrap-out", env = "SYMWRAP_OUT")]
    out: PathBuf,
    /// Synthetic raster fixture for the topology command.
    #[arg(long, global = true, env = "SYMWRAP_FIXTURE")]
    fixture: Option<String>,
    /// Artifact formats, comma separated: json, csv, svg, pgm.
    #[arg(long, global = true, env = "SYMWRAP_FORMAT")]
    format: Option<String>,
    /// Bounded-hull mode for the topology command (needs --a).
    #[arg(long, global = true, env = "SYMWRAP_HULL")]
    hull: bool,
    #[arg(long, global = true, default_value_t = 1000, env = "SYMWRAP_WITNESS_STEPS")]
    witness_steps: usize,
    /// Add wall-clock timings to the report (breaks byte-identical output).
    #[arg(long, global = true, env = "SYMWRAP_TIMINGS")]
    timings: bool,
}

fn resolve(cli: Cli) -> Result<RunSpec, CliError> {
    let command = match cli.command {
        Sub::Verify => Command::Verify,
        Sub::Sections => Command::Sections,
        Sub::Topology => Command::Topology,
        Sub::Plot => Command::Plot,
    };
    let o = cli.opts;
    let c = match (o.c, o.a) {
        (Some(c), _) => c,
        (None, Some(a)) if a > 0.0 => 1.0 / a,
        (None, Some(a)) => return Err(CliError::Usage(format!("a = {a}, need 0 < a <= 1"))),
        (None, None) => 2.0,
    };
    let hull_mode = command == Command::Topology && o.hull;
    let resolutions = match &o.resolutions {
        Some(s) => s
            .split(',')
            .map(|t| t.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad resolution {t:?}"))))
            .collect::<Result<Vec<_>, _>>()?,
        None => match command {
            Command::Plot => vec![256],
            Command::Topology if hull_mode => vec![1024],
            _ => vec![256, 512, 1024],
        },
    };
    let grid = o.grid.unwrap_or(match command {
        Command::Sections => [50, 100],
        Command::Topology if hull_mode => [20, 20],
        _ => [10, 10],
    });
    let mut formats = vec![Format::Json];
    match &o.format {
        Some(list) => {
            for f in list.split(',') {
                formats.push(Format::parse(f)?);
            }
        }
        None => match command {
            Command::Sections | Command::Topology => formats.push(Format::Csv),
            Command::Plot => formats.push(Format::Svg),
            Command::Verify => {}
        },
    }
    formats.sort_unstable();
    formats.dedup();
    Ok(RunSpec {
        command,
        n: o.n,
        c,
        a: o.a,
        seed: o.seed,
        samples: o.samples,
        symplectic_samples: o.symplectic_samples,
        cell_samples: o.cell_samples,
        spot_checks: o.spot_checks,
        resolutions,
        grid,
        z: o.z.as_deref().map(parse_reals).transpose().map_err(CliError::Usage)?,
        fixture: o.fixture,
        hull: o.hull,
        witness_steps: o.witness_steps,
        formats,
        out: o.out,
        tolerances: Tolerances::default(),
        timings: o.timings,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = resolve(cli).and_then(|spec| {
        let out = spec.out.clone();
        let outcome = run(spec)?;
        outcome.write(&out)?;
        Ok((outcome, out))
    });
    match result {
        Ok((outcome, out)) => {
            for check in &outcome.report.checks {
                println!("{} {} {}", if check.passed { "PASS" } else { "FAIL" }, check.name, check.measured);
            }
            println!("report: {}", out.join(outcome.report_name()).display());
            ExitCode::from(if outcome.report.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("symwrap: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
