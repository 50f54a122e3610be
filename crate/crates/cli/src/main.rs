use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use optiphase::input::{build_prior, fixed_probe, PriorArg, Probe, StateArg};
use optiphase::report::{output, write_json, OptimizerJson, StrategyJson};
use optiphase::sweep::{run_sweep, write_csv, SweepConfig, TGrid};
use optiphase::{optimize_parallel, profile, thread_pool, verify, CliError, Result};
use optiphase_core::prior::DEFAULT_TRUNCATION_TOL;
use optiphase_core::{optimal_strategy, CircularPrior, OptimizerConfig, ProbeState};

#[derive(Parser)]
#[command(
    name = "optiphase",
    version,
    about = "Optimal single-shot phase estimation with circular priors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PriorOpts {
    /// diffusive, uniform or fourier-file:<path>
    #[arg(long, default_value = "diffusive")]
    prior: PriorArg,
    /// Diffusion time of the diffusive prior
    #[arg(long)]
    t: Option<f64>,
    /// Truncation tolerance for diffusive Fourier coefficients
    #[arg(long, default_value_t = DEFAULT_TRUNCATION_TOL)]
    prior_tol: f64,
}

#[derive(Args)]
struct OptimizerOpts {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optimizer stops once the fidelity gains less than this per step
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1000)]
    max_iter: usize,
    /// Starting states; the first four are BW, N00N, flat and binomial
    #[arg(long, default_value_t = 4)]
    restarts: usize,
    /// Worker threads (default: one per logical CPU)
    #[arg(long)]
    jobs: Option<usize>,
}

impl OptimizerOpts {
    fn config(&self) -> OptimizerConfig {
        OptimizerConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            restarts: self.restarts,
            seed: self.seed,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Optimal measurement and cost for one probe (JSON)
    Optimal {
        /// noon, bw, binomial, flat, optimal or file:<path>
        #[arg(long)]
        state: StateArg,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        prior: PriorOpts,
        #[command(flatten)]
        opt: OptimizerOpts,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimize the probe state (JSON)
    Optimize {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        prior: PriorOpts,
        #[command(flatten)]
        opt: OptimizerOpts,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cost against diffusion time for several probes (CSV)
    Sweep {
        #[arg(long)]
        n: usize,
        /// min:max:log|lin:count
        #[arg(long, default_value = "0.001:30:log:40")]
        t_grid: TGrid,
        #[arg(long, value_delimiter = ',', default_value = "noon,bw,binomial,optimal")]
        states: Vec<StateArg>,
        #[arg(long, default_value_t = DEFAULT_TRUNCATION_TOL)]
        prior_tol: f64,
        #[command(flatten)]
        opt: OptimizerOpts,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Outcome probabilities p(k|phi) of the optimal measurement (CSV + JSON sidecar)
    Profile {
        #[arg(long)]
        state: StateArg,
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        prior: PriorOpts,
        /// Number of equally spaced phases in [-pi, pi)
        #[arg(long, default_value_t = 720)]
        points: usize,
        #[command(flatten)]
        opt: OptimizerOpts,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sidecar JSON path (default: --out with a .json extension)
        #[arg(long)]
        sidecar: Option<PathBuf>,
    },
    /// Run the oracle cross-checks
    #[command(hide = true)]
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        instances: usize,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn prior_of(p: &PriorOpts) -> Result<CircularPrior> {
    build_prior(&p.prior, p.t, p.prior_tol)
}

/// Fixed states are read before the prior so that a bad state file is
/// reported even when the prior arguments are also incomplete.
fn probe_of(
    state: &StateArg,
    n: Option<usize>,
    prior: &PriorOpts,
    opt: &OptimizerOpts,
) -> Result<(Probe, CircularPrior)> {
    let fixed = match state {
        StateArg::Optimal => None,
        other => Some(fixed_probe(other, n)?),
    };
    let prior = prior_of(prior)?;
    let probe = match fixed {
        Some(p) => p,
        None => {
            let n = n.ok_or_else(|| CliError::Usage("--state optimal needs --n".into()))?;
            let pool = thread_pool(opt.jobs)?;
            Probe::Pure(pool.install(|| optimize_parallel(n, &prior, &opt.config()))?.state)
        }
    };
    Ok((probe, prior))
}

fn sidecar_path(out: Option<&Path>, explicit: Option<&Path>) -> Option<PathBuf> {
    explicit.map(Path::to_path_buf).or_else(|| {
        out.map(|o| {
            let p = o.with_extension("json");
            if p == o {
                o.with_extension("sidecar.json")
            } else {
                p
            }
        })
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Optimal {
            state,
            n,
            prior,
            opt,
            out,
        } => {
            let (probe, prior) = probe_of(&state, n, &prior, &opt)?;
            let report = optimal_strategy(&probe.density(), &prior);
            write_json(&StrategyJson::from(&report), out.as_deref())
        }
        Command::Optimize { n, prior, opt, out } => {
            let prior = prior_of(&prior)?;
            let pool = thread_pool(opt.jobs)?;
            let best = pool.install(|| optimize_parallel(n, &prior, &opt.config()))?;
            write_json(&OptimizerJson::from(&best), out.as_deref())
        }
        Command::Sweep {
            n,
            t_grid,
            states,
            prior_tol,
            opt,
            out,
        } => {
            let cfg = SweepConfig {
                n,
                prior_tol,
                optimizer: opt.config(),
            };
            let pool = thread_pool(opt.jobs)?;
            let records = pool.install(|| run_sweep(&t_grid.values(), &states, &cfg))?;
            write_csv(&records, output(out.as_deref())?)
        }
        Command::Profile {
            state,
            n,
            prior,
            points,
            opt,
            out,
            sidecar,
        } => {
            let (probe, prior) = probe_of(&state, n, &prior, &opt)?;
            let psi: ProbeState = match probe {
                Probe::Pure(s) => s,
                Probe::Mixed(_) => return Err(CliError::Usage("profile needs a pure state".into())),
            };
            let prof = profile::profile(&psi, &prior, points)?;
            prof.write_csv(output(out.as_deref())?)?;
            if let Some(path) = sidecar_path(out.as_deref(), sidecar.as_deref()) {
                write_json(&prof.sidecar(), Some(&path))?;
            }
            Ok(())
        }
        Command::Verify { seed, instances, jobs } => {
            if instances == 0 {
                return Err(CliError::Usage("--instances must be positive".into()));
            }
            let checks = thread_pool(jobs)?.install(|| verify::run(seed, instances))?;
            let mut failed = 0;
            for c in &checks {
                println!(
                    "{} {}: worst {:.3e} (tolerance {:.0e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.worst,
                    c.tolerance
                );
                failed += usize::from(!c.passed);
            }
            if failed > 0 {
                return Err(CliError::ChecksFailed(failed));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("optiphase: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
