use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cauchy_wave::experiments::ensemble::{generate_data, prepare_inverse, run_prepared};
use cauchy_wave::experiments::output::{self, CachedData};
use cauchy_wave::experiments::{sweep, ExampleId, ExperimentConfig, Setup, SweepAxis};
use cauchy_wave::geometry::SpaceTimePoint;
use cauchy_wave::inverse::reconstruct;
use cauchy_wave::linsolve::{RegMethod, Spectral};
use cauchy_wave::{Exec, Result};

/// Recover stochastic wave fields from noisy lateral Cauchy data.
#[derive(Parser)]
#[command(name = "cauchy-wave", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate forward fields and cache the noisy Cauchy data.
    Forward(Common),
    /// Reconstruct a single path and write its field and regularization trace.
    Invert {
        #[command(flatten)]
        common: Common,
        /// Path index to reconstruct.
        #[arg(long, default_value_t = 0)]
        path: u64,
    },
    /// Run a full ensemble and write fields, metrics and a manifest.
    Ensemble(Common),
    /// Repeat the ensemble over values of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// delta, c, R or n_paths.
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
    },
    /// Run an example with its default settings.
    Reproduce {
        #[arg(value_name = "EXAMPLE")]
        id: ExampleId,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value = "1d-b")]
    example: ExampleId,
    /// Number of sample paths.
    #[arg(long)]
    paths: Option<usize>,
    /// Relative noise level.
    #[arg(long)]
    delta: Option<f64>,
    /// Multiquadric shape parameter.
    #[arg(long)]
    c: Option<f64>,
    /// Source offset.
    #[arg(long = "R")]
    r: Option<f64>,
    /// gcv, lcurve or fixed:<gamma>.
    #[arg(long)]
    reg: Option<RegMethod>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// JSON config file; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Run paths on one thread.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn build(&self, example: ExampleId) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
            None => ExperimentConfig::default_for(example),
        };
        if let Some(v) = self.paths {
            c.n_paths = v;
        }
        if let Some(v) = self.delta {
            c.delta = v;
        }
        if let Some(v) = self.c {
            c.inverse.c = v;
        }
        if let Some(v) = self.r {
            c.inverse.sources.r = v;
        }
        if let Some(v) = self.reg {
            c.inverse.reg = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        c.validate()?;
        Ok(c)
    }

    fn exec(&self) -> Exec {
        if self.sequential {
            Exec::Sequential
        } else {
            Exec::Parallel
        }
    }
}

fn print_written(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn run_ensemble_command(cfg: &ExperimentConfig, out: &Path, exec: Exec) -> Result<()> {
    let setup = Setup::new(cfg)?;
    let inverse = prepare_inverse(&setup)?;
    let run = run_prepared(&setup, &inverse, exec)?;
    let s = run.report.metrics.summary;
    println!(
        "{} paths ok, {} failed; E1 mean {:.4e}; E2 mean {:.4e} max {:.4e}; E3 mean {:.4e} max {:.4e}",
        run.outcomes.len(),
        run.report.failures.len(),
        s.e1.mean,
        s.e2.mean,
        s.e2.max,
        s.e3.mean,
        s.e3.max
    );
    print_written(&output::write_ensemble(out, &run)?);
    Ok(())
}

fn forward(common: &Common) -> Result<()> {
    let cfg = common.build(common.example)?;
    let data: CachedData =
        generate_data(&cfg, common.exec())?.into_iter().map(|r| r.map_err(|e| e.to_string())).collect();
    let ok: Vec<_> = data.iter().filter_map(|d| d.as_ref().ok()).cloned().collect();
    println!("{} of {} paths generated", ok.len(), data.len());
    let cache = output::save_cache(&common.out, &cfg, &data)?;
    let table = output::write_table(&common.out, &cfg, "data", &output::data_csv(&ok))?;
    print_written(&[cache, table]);
    Ok(())
}

fn invert(common: &Common, k: u64) -> Result<()> {
    let mut cfg = common.build(common.example)?;
    cfg.n_paths = cfg.n_paths.max(k as usize + 1);
    let setup = Setup::new(&cfg)?;
    let field = setup.forward(k)?;
    let cached = output::load_cache(&common.out, &cfg)?.and_then(|d| d.into_iter().nth(k as usize)?.ok());
    let data = match cached {
        Some(d) => {
            println!("using cached data for path {k}");
            d
        }
        None => setup.data(&field, k)?,
    };
    let inverse = prepare_inverse(&setup)?;
    let f = &*setup.problem.f;
    let sol = inverse.solve(&data, f)?;
    let grid = setup.eval_grid(&field);
    let (idx, levels) = setup.selection(&field);
    let points: Vec<SpaceTimePoint> =
        grid.times.iter().flat_map(|&t| grid.nodes.iter().map(move |&x| SpaceTimePoint { x, t })).collect();
    let rec = reconstruct(&sol.coefficients, &inverse.basis, &points);
    let mut table = String::from("x,y,t,reference,reconstruction\n");
    let mut j = 0;
    for &l in &levels {
        let z = field.level(l);
        for &i in &idx {
            let p = &points[j];
            table.push_str(&format!("{},{},{},{},{}\n", p.x[0], p.x[1], p.t, z[i], rec[j]));
            j += 1;
        }
    }
    let spectral = Spectral::new(&inverse.svd, &inverse.rhs(&data, f)?);
    let kind = format!("path{k}");
    let files = [
        output::write_table(&common.out, &cfg, &format!("{kind}-field"), &table)?,
        output::write_table(&common.out, &cfg, &format!("{kind}-regtrace"), &output::reg_trace_csv(&spectral, &inverse.grid, sol.report.gamma))?,
    ];
    println!("{}", serde_json::to_string_pretty(&sol.report)?);
    print_written(&files);
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Forward(common) => forward(&common),
        Command::Invert { common, path } => invert(&common, path),
        Command::Ensemble(common) => run_ensemble_command(&common.build(common.example)?, &common.out, common.exec()),
        Command::Sweep { common, axis, values } => {
            let cfg = common.build(common.example)?;
            let rows = sweep(&cfg, axis, &values, common.exec())?;
            for r in &rows {
                match &r.error {
                    None => println!("{axis} = {}: E2 mean {:.4e}, E3 mean {:.4e}", r.value, r.mean_e2, r.mean_e3),
                    Some(e) => println!("{axis} = {}: failed: {e}", r.value),
                }
            }
            print_written(&output::write_sweep(&common.out, &cfg, axis, &rows)?);
            Ok(())
        }
        Command::Reproduce { id, common } => {
            let cfg = common.build(id)?;
            run_ensemble_command(&cfg, &common.out, common.exec())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
