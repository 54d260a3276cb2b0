//! `rydcp` — batch calculations of thermal Casimir-Polder potentials of Rb
//! Rydberg nS atoms above planar stacks (graphene sheets, dielectric slabs,
//! metals), with parameter scans, fits, and bundled experiment presets.

mod config;
mod fits;
mod plot;
mod presets;
mod scan;
mod single;
mod stackfile;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use rydcp::atomic::Atom;
use rydcp::cp::CpSolver;
use rydcp::materials::MaterialPresets;

use config::ScanConfig;
use stackfile::StackSpec;

/// Shared context: the atom (with its caches) and the material presets,
/// honoring the data-directory override.
pub struct Ctx {
    pub atom: Arc<Atom>,
    pub presets: MaterialPresets,
}

/// Environment variable pointing at a directory with `rb87.toml` and
/// `materials.toml` overriding the embedded data files.
pub const DATA_DIR_ENV: &str = "RYDCP_DATA_DIR";

impl Ctx {
    fn new() -> Result<Self> {
        match std::env::var_os(DATA_DIR_ENV) {
            Some(dir) => {
                let dir = PathBuf::from(dir);
                Ok(Ctx {
                    atom: Arc::new(
                        Atom::from_data_dir(&dir)
                            .with_context(|| format!("{DATA_DIR_ENV}={}", dir.display()))?,
                    ),
                    presets: MaterialPresets::from_dir(&dir)
                        .with_context(|| format!("{DATA_DIR_ENV}={}", dir.display()))?,
                })
            }
            None => Ok(Ctx {
                atom: Arc::new(Atom::rb87()),
                presets: MaterialPresets::embedded(),
            }),
        }
    }

    pub fn solver(&self, tol: f64) -> CpSolver {
        CpSolver::new(Arc::clone(&self.atom)).with_tolerances(tol, (tol * 0.1).max(1e-11))
    }
}

#[derive(Parser)]
#[command(
    name = "rydcp",
    about = "Thermal Casimir-Polder potentials of Rb Rydberg atoms above layered stacks",
    version
)]
struct Cli {
    /// worker threads for scans (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the potential and its decomposition at one point
    Potential {
        /// stack description file
        #[arg(long)]
        stack: PathBuf,
        /// principal quantum number of the nS_1/2 state
        #[arg(long)]
        n: u32,
        /// atom-surface distance in metres
        #[arg(long)]
        z0: f64,
        /// environment temperature in kelvin
        #[arg(long)]
        temp: f64,
        /// force the graphene model (kubo|nonlocal)
        #[arg(long)]
        model: Option<String>,
        /// override the sheet Fermi energies (eV)
        #[arg(long)]
        ef: Option<f64>,
        /// Matsubara truncation tolerance
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// machine-readable output
        #[arg(long)]
        json: bool,
        /// report energies in joules instead of Hz
        #[arg(long)]
        joules: bool,
    },
    /// Run a declarative scan from a config file
    Scan {
        /// scan configuration file
        #[arg(long)]
        config: PathBuf,
        /// override the output path of the config
        #[arg(long)]
        out: Option<PathBuf>,
        /// also emit the plot script
        #[arg(long)]
        plot: bool,
    },
    /// Fit a result table (power law, C3 scaling, empirical model, wavelength)
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// power-law | c3-vs-n | empirical | wavelength
        #[arg(long)]
        kind: String,
        /// c3-vs-n form: two-term | single-power
        #[arg(long)]
        form: Option<String>,
        /// starting wavelength (um) for the wavelength fit
        #[arg(long)]
        lambda_start_um: Option<f64>,
        /// write the JSON report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate graphene sheet conductivity
    Conductivity {
        /// material preset (graphene-kubo | graphene-nonlocal)
        #[arg(long, default_value = "graphene-kubo")]
        material: String,
        #[arg(long)]
        ef: Option<f64>,
        /// relaxation rate override (rad/s)
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 300.0)]
        temp: f64,
        /// fixed angular frequency (rad/s) for an E_F sweep
        #[arg(long)]
        omega: Option<f64>,
        #[arg(long)]
        omega_min: Option<f64>,
        #[arg(long)]
        omega_max: Option<f64>,
        /// E_F sweep bounds (eV)
        #[arg(long)]
        ef_min: Option<f64>,
        #[arg(long)]
        ef_max: Option<f64>,
        #[arg(long, default_value_t = 41)]
        points: usize,
        /// wavevector for the non-local model (1/m)
        #[arg(long)]
        q: Option<f64>,
        /// evaluate on the imaginary frequency axis
        #[arg(long)]
        imag_axis: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Probe the scattering Green's tensor of a stack
    Greens {
        #[arg(long)]
        stack: PathBuf,
        #[arg(long)]
        z0: f64,
        #[arg(long, default_value_t = 300.0)]
        temp: f64,
        /// real angular frequency (rad/s)
        #[arg(long)]
        omega: Option<f64>,
        /// imaginary-axis frequency (rad/s)
        #[arg(long)]
        xi: Option<f64>,
        #[arg(long)]
        json: bool,
    },
    /// Summarize a stack file, optionally with the regime table
    Describe {
        #[arg(long)]
        stack: PathBuf,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        z0: Option<f64>,
        #[arg(long)]
        temp: Option<f64>,
    },
    /// Materialize and run a bundled experiment
    Preset {
        /// preset name; use `list` to enumerate
        name: String,
        #[arg(long, default_value = "preset-out")]
        out_dir: PathBuf,
        /// write the config files without running
        #[arg(long)]
        dry_run: bool,
        /// grid density multiplier (0.5 = coarser, 2.0 = finer)
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .expect("worker pool is built once");
    }
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx::new()?;
    match cli.command {
        Command::Potential {
            stack,
            n,
            z0,
            temp,
            model,
            ef,
            tol,
            json,
            joules,
        } => {
            let spec = StackSpec::from_file(&stack, &ctx.presets)?;
            let solver = ctx.solver(tol);
            single::potential(
                &solver,
                &single::PotentialArgs {
                    spec: &spec,
                    n,
                    z0,
                    temp,
                    ef_ev: ef,
                    model: model.as_deref(),
                    json,
                    joules,
                },
            )
        }
        Command::Scan { config, out, plot } => {
            let mut cfg = ScanConfig::from_file(&config)?;
            // stack path is relative to the config file
            let base = config.parent().unwrap_or(Path::new("."));
            let stack_path = base.join(&cfg.stack.file);
            if let Some(out) = out {
                cfg.out = out;
            }
            if plot {
                cfg.plot = true;
            }
            let spec = StackSpec::from_file(&stack_path, &ctx.presets)?;
            let solver = ctx.solver(cfg.tol);
            let failures = scan::run(&solver, &spec, &cfg)?;
            if failures > 0 {
                bail!("{failures} scan point(s) failed; see the error column");
            }
            Ok(())
        }
        Command::Fit {
            input,
            kind,
            form,
            lambda_start_um,
            out,
        } => fits::run_fit(
            &input,
            &kind,
            form.as_deref(),
            lambda_start_um,
            out.as_deref(),
        ),
        Command::Conductivity {
            material,
            ef,
            gamma,
            temp,
            omega,
            omega_min,
            omega_max,
            ef_min,
            ef_max,
            points,
            q,
            imag_axis,
            out,
        } => single::conductivity(
            &ctx.presets,
            &single::ConductivityArgs {
                preset: &material,
                ef_ev: ef,
                gamma,
                temp,
                omega,
                omega_min,
                omega_max,
                ef_min_ev: ef_min,
                ef_max_ev: ef_max,
                points,
                q,
                imag_axis,
                out: &out,
            },
        ),
        Command::Greens {
            stack,
            z0,
            temp,
            omega,
            xi,
            json,
        } => {
            let spec = StackSpec::from_file(&stack, &ctx.presets)?;
            single::greens(&spec, z0, temp, omega, xi, json)
        }
        Command::Describe { stack, n, z0, temp } => {
            let spec = StackSpec::from_file(&stack, &ctx.presets)?;
            let solver = ctx.solver(1e-8);
            single::describe(&solver, &spec, n, z0, temp)
        }
        Command::Preset {
            name,
            out_dir,
            dry_run,
            scale,
        } => {
            if name == "list" {
                for (name, blurb) in presets::PRESETS {
                    println!("{name:8} {blurb}");
                }
                return Ok(());
            }
            let failures = presets::run_preset(&ctx, &name, &out_dir, dry_run, scale)?;
            if failures > 0 {
                bail!("{failures} point(s) failed inside preset {name}");
            }
            Ok(())
        }
    }
}
