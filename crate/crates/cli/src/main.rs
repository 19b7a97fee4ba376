use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nondarcy_cli::error::{CliError, CliResult};
use nondarcy_cli::sweep::{self, Axis, SweepRow, SweepSpec};
use nondarcy_cli::{fit, report, tables, validate, RunConfig};
use nondarcy_core::{compute_pi, SolverOptions};

/// Productivity index of a well under pre-Darcy, Darcy and Forchheimer flow.
#[derive(Debug, Parser)]
#[command(name = "nondarcy", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Scenario file of `key = value` lines.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override one config key, e.g. `--set params.s=0.3`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Write CSV output to PATH instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Report the PI in m^3/(Pa s) instead of the dimensionless value.
    #[arg(long, global = true)]
    raw: bool,

    /// Replace lambda by alpha * v_D^s so the resistance is continuous at v_D.
    #[arg(long, global = true)]
    continuous_predarcy: bool,

    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, global = true, value_name = "X", default_value_t = 1e-10)]
    rel_tol: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Productivity index of the configured scenario.
    Pi,

    /// PI over a grid of one parameter for several regimes, as CSV.
    Sweep {
        /// Parameter to vary: q_over_h, s, v_D or v_F.
        #[arg(long)]
        axis: Axis,

        /// Comma-separated axis values.
        #[arg(long, conflicts_with = "range", required_unless_present = "range")]
        values: Option<String>,

        /// Log-spaced values START:STOP:POINTS.
        #[arg(long)]
        range: Option<String>,

        /// Comma-separated regimes (D, F, FDD, DDpD, FDpD, FpDpD, pD or a
        /// triple such as F-D-pD). Defaults to the configured regime.
        #[arg(long)]
        regimes: Option<String>,
    },

    /// Recompute a published table (1-4, or `all`) and report deviations.
    Table {
        #[arg(value_name = "ID")]
        id: String,
    },

    /// Run the self-check suites; exits 1 if any property fails.
    Validate {
        /// Perturb every Forchheimer zone integral by 1e-3 to exercise the harness.
        #[arg(long, hide = true)]
        inject_fault: bool,
    },

    /// Fit pre-Darcy parameters to a `v_m_per_s,grad_p_pa_per_m` CSV file.
    Fit {
        #[arg(value_name = "CSV")]
        input: PathBuf,

        /// Write the fitted curve, sampled over the data's velocity range.
        #[arg(long, value_name = "PATH")]
        emit_model: Option<PathBuf>,

        /// Number of samples in the emitted curve.
        #[arg(long, default_value_t = 100)]
        model_points: usize,
    },
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::io(path, e))
}

/// Runs `write` against `--out` or standard output.
fn emit<F>(out: Option<&Path>, write: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> CliResult<()>,
{
    match out {
        Some(path) => {
            let mut file = create(path)?;
            write(&mut file)?;
            file.flush().map_err(|e| CliError::io(path, e))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)
        }
    }
}

fn load_config(global: &GlobalArgs) -> CliResult<RunConfig> {
    let mut cfg = match &global.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    for o in &global.overrides {
        cfg.apply_override(o)?;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    if !(g.rel_tol > 0.0 && g.rel_tol < 1.0) {
        return Err(CliError::Config(format!("`--rel-tol` must lie in (0, 1), got {}", g.rel_tol)));
    }
    let opts = SolverOptions::with_rel_tol(g.rel_tol);
    let out = g.out.as_deref();

    match cli.command {
        Command::Pi => {
            let cfg = load_config(g)?;
            let scn = cfg.scenario(g.continuous_predarcy)?;
            let pi = compute_pi(&scn, &opts)?;
            print!("{}", report::render_pi(&scn, &pi, g.raw));
            if let Some(path) = out {
                let p = scn.params();
                let row = SweepRow {
                    axis: Axis::QOverH,
                    axis_value: scn.q_over_h(),
                    regime: scn.regime(),
                    s: p.s,
                    v_d: p.v_d,
                    v_f: p.v_f,
                    q_over_h: scn.q_over_h(),
                    r_f: pi.zone_partition.r_f,
                    r_d: pi.zone_partition.r_d,
                    j_raw: pi.j_raw,
                    j_dimensionless: pi.j_dimensionless,
                };
                emit(Some(path), |w| sweep::write_csv(&[row], w))?;
            }
        }
        Command::Sweep {
            axis,
            values,
            range,
            regimes,
        } => {
            let cfg = load_config(g)?;
            let values = match (values, range) {
                (Some(v), _) => sweep::parse_values(&v)?,
                (None, Some(r)) => sweep::parse_log_range(&r)?,
                (None, None) => unreachable!("clap requires --values or --range"),
            };
            let regimes = match regimes {
                Some(list) => sweep::parse_regimes(&list)?,
                None => vec![cfg.regime],
            };
            let spec = SweepSpec {
                axis,
                values,
                regimes,
            };
            let rows = sweep::run_sweep(&cfg, &spec, &opts, g.continuous_predarcy)?;
            emit(out, |w| sweep::write_csv(&rows, w))?;
        }
        Command::Table { id } => {
            let ids: Vec<u8> = if id == "all" {
                vec![1, 2, 3, 4]
            } else {
                vec![id
                    .parse()
                    .map_err(|_| CliError::Config(format!("unknown table `{id}` (expected 1-4 or all)")))?]
            };
            let reports = ids
                .iter()
                .map(|&t| tables::run_table(t, &opts, g.continuous_predarcy))
                .collect::<CliResult<Vec<_>>>()?;
            emit(out, |w| {
                for r in &reports {
                    r.write_csv(&mut *w)?;
                }
                Ok(())
            })?;
            for r in &reports {
                if out.is_some() {
                    print!("{}", r.summary());
                } else {
                    eprint!("{}", r.summary());
                }
            }
        }
        Command::Validate { inject_fault } => {
            let opts = SolverOptions {
                forchheimer_fault: if inject_fault { 1.001 } else { 1.0 },
                ..opts
            };
            let checks = validate::run_validation(&opts)?;
            for c in &checks {
                println!("{c}");
            }
            if let Some(err) = validate::failures(&checks) {
                return Err(err);
            }
            println!("all {} properties passed", checks.len());
        }
        Command::Fit {
            input,
            emit_model,
            model_points,
        } => {
            let (data, result) = fit::run_fit(&input)?;
            print!("{}", fit::render(&result));
            if let Some(path) = out {
                emit(Some(path), |w| fit::write_result_csv(&result, w))?;
            }
            if let Some(path) = emit_model {
                emit(Some(&path), |w| fit::write_model_csv(&result, &data, model_points, w))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
