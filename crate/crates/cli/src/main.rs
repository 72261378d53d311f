use std::path::PathBuf;
use std::process::ExitCode;

use blockade_cli::config::{parse_config, parse_orders, SweepSpec, SweptParameter};
use blockade_cli::spectrum::{analytic_manifolds, frame_frequency, manifold_spectrum};
use blockade_cli::sweep::{
    emit_csv, find_blockade_windows, run_sweep, solve_operating_point, SweepRow,
};
use blockade_core::models::{coupled_kerr, jc, kerr, DriveSpec, ModelSpec};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "blockade",
    version,
    about = "Steady-state photon statistics of parametrically driven nonlinear cavities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep one parameter over a grid and write per-mode statistics as CSV.
    Sweep {
        config: PathBuf,
        /// Output path; overrides `output.path` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cap on solver threads; default shares the process-wide pool.
        #[arg(long)]
        workers: Option<usize>,
        /// Override every cavity dimension.
        #[arg(long)]
        dim: Option<usize>,
        /// Override the recorded correlation orders, e.g. `2,3`.
        #[arg(long)]
        orders: Option<String>,
    },
    /// Solve the configured operating point and print its statistics.
    Point {
        config: PathBuf,
        /// Override every cavity dimension.
        #[arg(long)]
        dim: Option<usize>,
        /// Override the recorded correlation orders, e.g. `2,3`.
        #[arg(long)]
        orders: Option<String>,
    },
    /// Print the analytic blockade detunings for the configured model.
    Conditions { config: PathBuf },
    /// Compare numeric and closed-form levels of the undriven Hamiltonian.
    Spectrum {
        config: PathBuf,
        /// Highest total-excitation manifold to list.
        #[arg(long, default_value_t = 4)]
        excitation: usize,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn load_spec(
    path: &PathBuf,
    dim: Option<usize>,
    orders: Option<&str>,
) -> Result<SweepSpec, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut spec = parse_config(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    if let Some(d) = dim {
        let dims = vec![d; spec.model.cavity_dims().len()];
        spec.model = spec.model.with_cavity_dims(&dims);
        spec.model.validate().map_err(|e| format!("--dim {d}: {e}"))?;
        spec.truncation.max_dim = spec.truncation.max_dim.max(d);
    }
    if let Some(o) = orders {
        spec.orders = parse_orders("--orders", o).map_err(|e| e.to_string())?;
    }
    Ok(spec)
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Sweep { config, out, workers, dim, orders } => {
            let spec = load_spec(&config, dim, orders.as_deref())?;
            let result = run_sweep(&spec, workers);
            let path = out
                .or_else(|| spec.output.clone())
                .unwrap_or_else(|| PathBuf::from("sweep.csv"));
            emit_csv(&result, &path).map_err(|e| e.to_string())?;
            println!("wrote {} rows to {}", result.rows.len(), path.display());

            for &n in &spec.orders {
                if !spec.orders.contains(&(n + 1)) {
                    continue;
                }
                let windows = find_blockade_windows(&result, n).map_err(|e| e.to_string())?;
                for w in &windows {
                    println!(
                        "{}-photon blockade, mode {}: [{:.6}, {:.6}], peak g({}) at {:.6}",
                        w.order, w.mode, w.start, w.stop, w.order, w.peak
                    );
                }
            }

            let invalid = result.invalid_fraction();
            if invalid > 0.0 {
                let failed: Vec<&SweepRow> =
                    result.rows.iter().filter(|r| !r.valid).take(3).collect();
                for row in &failed {
                    eprintln!(
                        "failed point {} (mode {}): {}",
                        row.value,
                        row.mode,
                        row.note.as_deref().unwrap_or("unknown")
                    );
                }
                eprintln!(
                    "{:.1}% of rows invalid; see the valid column",
                    100.0 * invalid
                );
            }
            Ok(if invalid > 0.10 { ExitCode::from(2) } else { ExitCode::SUCCESS })
        }

        Command::Point { config, dim, orders } => {
            let spec = load_spec(&config, dim, orders.as_deref())?;
            let rows = solve_operating_point(&spec);
            let mut any_invalid = false;
            for row in &rows {
                println!(
                    "mode {} at {} = {}: dim {}, mean photon number {:.6e}",
                    row.mode,
                    match spec.axis.parameter {
                        SweptParameter::Delta => "delta",
                        SweptParameter::Amplitude => "amplitude",
                    },
                    row.value,
                    row.dim,
                    row.mean
                );
                for (&n, g) in &row.g {
                    match g {
                        Some(v) => println!("  g({n}) = {v:.6e}"),
                        None => println!("  g({n}) undefined (vanishing mean)"),
                    }
                }
                println!(
                    "  fock tail {:.3e}, residual {:.3e}, gap ratio {:.3e}",
                    row.tail, row.residual, row.gap_ratio
                );
                if !row.valid {
                    any_invalid = true;
                    println!("  INVALID: {}", row.note.as_deref().unwrap_or("unknown"));
                }
            }
            Ok(if any_invalid { ExitCode::from(2) } else { ExitCode::SUCCESS })
        }

        Command::Conditions { config } => {
            let spec = load_spec(&config, None, None)?;
            let drive = spec.model.drive();
            if matches!(drive, DriveSpec::Coherent { .. }) {
                return Err(
                    "analytic blockade conditions apply to parametric drives only".into()
                );
            }
            let n = drive.order();
            match &spec.model {
                ModelSpec::Jc(p) => {
                    let (lo, hi) = jc::blockade_detunings(n, p.g);
                    println!(
                        "{n}-photon blockade detunings (units of kappa): {lo:.6} and {hi:.6}"
                    );
                }
                ModelSpec::Kerr(p) => {
                    let d = kerr::blockade_detuning(n, p.u);
                    println!("{n}-photon blockade detuning (units of kappa): {d:.6}");
                }
                ModelSpec::CoupledKerr(p) => {
                    if n != 2 {
                        return Err(format!(
                            "coupled cavities only have closed-form conditions for a \
                             two-photon drive; the {n}-photon manifold does not \
                             diagonalize in closed form"
                        ));
                    }
                    let (detunings, gaps) = coupled_kerr::blockade_detunings(p.u, p.j);
                    println!(
                        "two-photon blockade detunings (units of kappa): {:.6}, {:.6}, {:.6}",
                        detunings[0], detunings[1], detunings[2]
                    );
                    println!(
                        "two-photon level gaps d: {:.6} and {:.6} \
                         (adjacent detunings sit d/2 apart)",
                        gaps[0], gaps[1]
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }

        Command::Spectrum { config, excitation } => {
            let spec = load_spec(&config, None, None)?;
            let numeric = manifold_spectrum(&spec.model, excitation).map_err(|e| e.to_string())?;
            let analytic = analytic_manifolds(&spec.model, excitation);
            println!(
                "undriven spectrum, rotating frame at delta = {}",
                frame_frequency(&spec.model)
            );
            println!("{:>10} {:>18} {:>18} {:>12}", "excitation", "numeric", "analytic", "|diff|");
            let mut worst = 0.0f64;
            for num in &numeric {
                let ana = analytic.iter().find(|m| m.excitation == num.excitation);
                for (i, &x) in num.frequencies.iter().enumerate() {
                    match ana.and_then(|m| m.frequencies.get(i)) {
                        Some(&y) => {
                            let diff = (x - y).abs();
                            worst = worst.max(diff);
                            println!("{:>10} {:>18.10} {:>18.10} {:>12.3e}", num.excitation, x, y, diff);
                        }
                        None => {
                            println!("{:>10} {:>18.10} {:>18} {:>12}", num.excitation, x, "-", "-");
                        }
                    }
                }
            }
            println!("largest deviation where closed forms exist: {worst:.3e}");
            Ok(ExitCode::SUCCESS)
        }
    }
}
