//! Command-line front end for the quasi-photon model: single-point
//! computation, parameter sweeps, root inspection and oracle verification
//! runs.
//!
//! Exit codes: 0 success, 1 error, 2 usage (clap), 3 sweep produced no
//! rows (every grid point guarded), 4 oracle budget violated.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use quasiphoton::bogoliubov;
use quasiphoton::entangle;
use quasiphoton::fock::{
    self, build_hk_magnetic, build_hph, free_level_predictions, magnetic_level_predictions,
    spectrum_check, two_photon_projection, OperatorMatrix, ProjectionTarget,
};
use quasiphoton::params::{self, ModelParams, PhysicalInput, ValidateOptions};
use quasiphoton::spectrum::{self, ElectronKinematics};
use quasiphoton::sweep::{self, fmt_f64, SweepSpec, SweptParam};

#[derive(Parser)]
#[command(
    name = "quasiphoton",
    about = "Quasi-photon spectra and photon-pair entanglement in an electron medium",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full single-point report: parameters, roots, coefficients,
    /// entanglement measures and asymptotic predictions.
    Compute {
        /// Plain-text key=value configuration file.
        #[arg(long)]
        config: PathBuf,
        /// Relative resonance guard band around each wavenumber.
        #[arg(long, default_value_t = params::DEFAULT_RESONANCE_GUARD)]
        guard_band: f64,
    },
    /// Quasi-photon frequencies and characteristic-equation residuals.
    Roots {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = params::DEFAULT_RESONANCE_GUARD)]
        guard_band: f64,
    },
    /// Sweep one laboratory parameter and emit one CSV row per grid point.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// One of: magnetic_field, electron_density, np, wavelength_2.
        #[arg(long)]
        sweep_param: String,
        #[arg(long)]
        min: f64,
        #[arg(long)]
        max: f64,
        #[arg(long)]
        points: usize,
        /// Logarithmic grid spacing (default linear).
        #[arg(long)]
        log: bool,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = params::DEFAULT_RESONANCE_GUARD)]
        guard_band: f64,
    },
    /// Truncated-Fock-space verification: spectrum and entanglement
    /// residuals per cutoff, as CSV.
    Oracle {
        /// Laboratory configuration; scaled test units (kappa = 1, 2) when
        /// omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Increasing list of per-mode occupation cutoffs.
        #[arg(long, value_delimiter = ',')]
        cutoffs: Option<Vec<usize>>,
        /// Which Hamiltonian to verify: free or magnetic.
        #[arg(long, default_value = "free")]
        case: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = params::DEFAULT_RESONANCE_GUARD)]
        guard_band: f64,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Compute { config, guard_band } => {
            let params = load_params(&config)?;
            cmd_compute(&params, guard_band)?;
            Ok(0)
        }
        Command::Roots { config, guard_band } => {
            let params = load_params(&config)?;
            cmd_roots(&params, guard_band)?;
            Ok(0)
        }
        Command::Sweep { config, sweep_param, min, max, points, log, out, guard_band } => {
            let input = load_input(&config)?;
            let param = SweptParam::parse(&sweep_param)
                .with_context(|| format!("unknown sweep parameter {sweep_param:?}"))?;
            let spec = SweepSpec { param, min, max, points, log_spacing: log };
            let opts =
                ValidateOptions { resonance_guard: guard_band, ..ValidateOptions::default() };
            let outcome = sweep::run_sweep(&input, &spec, &opts)?;
            for point in &outcome.skipped {
                eprintln!("skipped {} = {:.6e}: {}", param.key(), point.value, point.reason);
            }
            let mut csv = Vec::new();
            sweep::write_csv(&mut csv, &outcome)?;
            write_output(out.as_deref(), &csv)?;
            if outcome.rows.is_empty() {
                eprintln!("all {points} grid points were excluded by the resonance guard");
                return Ok(3);
            }
            Ok(0)
        }
        Command::Oracle { config, cutoffs, case, out, guard_band } => {
            let params = match config {
                Some(path) => load_params(&path)?,
                None => scaled_defaults(&case)?,
            };
            cmd_oracle(&params, cutoffs, &case, out.as_deref(), guard_band)
        }
    }
}

fn load_input(path: &std::path::Path) -> Result<PhysicalInput> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let input = params::parse_config(&text)?;
    Ok(input)
}

fn load_params(path: &std::path::Path) -> Result<ModelParams> {
    let input = load_input(path)?;
    Ok(params::from_physical(&input)?)
}

fn scaled_defaults(case: &str) -> Result<ModelParams> {
    // Scaled test units: kappa = (1, 2) with epsilon = 0.1 in the free
    // case and epsilon = 0.05, omega = 0.3 in the magnetic one.
    Ok(match case {
        "magnetic" => ModelParams::scaled(1.0, 2.0, 0.05, 0.3)?,
        _ => ModelParams::scaled(1.0, 2.0, 0.1, 0.0)?,
    })
}

fn write_output(path: Option<&std::path::Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => {
            fs::write(p, bytes).with_context(|| format!("cannot write {}", p.display()))?
        }
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn print_params(params: &ModelParams) {
    println!("model parameters (inverse meters, hbar = c = 1):");
    println!("  kappa_1 = {}", fmt_f64(params.kappa_1));
    println!("  kappa_2 = {}", fmt_f64(params.kappa_2));
    println!("  epsilon = {}", fmt_f64(params.epsilon));
    println!("  omega   = {}", fmt_f64(params.omega));
    if let Some(input) = &params.provenance {
        println!(
            "  from: wavelengths {} / {} nm, B = {} T, np = {} 1/m, rho = {} 1/m^3, alpha = {}",
            input.wavelength_1 * 1e9,
            input.wavelength_2 * 1e9,
            input.magnetic_field,
            input.np,
            input.electron_density,
            input.alpha
        );
    }
}

fn print_diagnostics(params: &ModelParams, guard: f64) {
    let opts = ValidateOptions { resonance_guard: guard, ..ValidateOptions::default() };
    let diag = params::validate(params, &opts);
    println!("diagnostics:");
    println!(
        "  smallness ratio eps/(kbar*dk) = {:.6e}{}",
        diag.smallness_ratio,
        if diag.smallness_flagged { "  [FLAGGED]" } else { "" }
    );
    println!(
        "  resonance proximity min|omega-kappa|/kappa = {:.6e}{}",
        diag.resonance_proximity,
        if diag.resonance_flagged { "  [FLAGGED]" } else { "" }
    );
}

fn cmd_roots(params: &ModelParams, guard: f64) -> Result<()> {
    print_params(params);
    print_diagnostics(params, guard);
    let closed = spectrum::free_roots_closed(params);
    let numeric = spectrum::free_roots_numeric(params)?;
    println!("free quasi-photon roots:");
    for s in 1..=2 {
        println!(
            "  tau_{s} = {}  (numeric {}, residual {:.3e})",
            fmt_f64(closed.tau(s)),
            fmt_f64(numeric.tau(s)),
            spectrum::free_residual(params, numeric.tau(s)),
        );
    }
    println!("  H0 = {}", fmt_f64(closed.h0));
    if params.omega > 0.0 {
        let roots = spectrum::magnetic_roots(params, guard)?;
        println!("magnetic quasi-photon roots:");
        for k in 1..=2 {
            for lambda in 1..=2 {
                println!(
                    "  tau_{k},{lambda} = {}  (residual {:.3e})",
                    fmt_f64(roots.tau(k, lambda)),
                    roots.residual(k, lambda)
                );
            }
        }
        if let Some(tau0) = roots.tau_landau() {
            println!(
                "  tau_0   = {}  (residual {:.3e})",
                fmt_f64(tau0),
                roots.tau_landau_residual()
            );
        }
    }
    Ok(())
}

fn cmd_compute(params: &ModelParams, guard: f64) -> Result<()> {
    print_params(params);
    print_diagnostics(params, guard);

    let roots = spectrum::free_roots_closed(params);
    println!("free case:");
    println!(
        "  tau = ({}, {})  H0 = {}",
        fmt_f64(roots.tau_1),
        fmt_f64(roots.tau_2),
        fmt_f64(roots.h0)
    );
    if params.epsilon == 0.0 {
        println!("  epsilon = 0: identity transformation, all measures vanish");
    }
    let coeffs = bogoliubov::free_coeffs(params, &roots);
    println!(
        "  canonical residuals (uu+ - vv+ - 1, vuT - uvT) = ({:.3e}, {:.3e})",
        coeffs.canonical_residuals.0, coeffs.canonical_residuals.1
    );
    println!("  entanglement measures per polarization pair:");
    for (l1, l2) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let m = entangle::free_measures(params, l1, l2);
        println!(
            "    |{l1},{l2}>: y = {}  E = {}  E_S = {}",
            fmt_f64(m.y),
            fmt_f64(m.e),
            fmt_f64(m.e_s)
        );
    }
    let asym = entangle::free_asymptotics(params);
    let exact = entangle::free_measures(params, 2, 1);
    println!(
        "  asymptotics: Phi_0 = {}  E_asym = {}  E_S_asym = {}",
        fmt_f64(asym.phi),
        fmt_f64(asym.e_asym),
        fmt_f64(asym.e_s_asym)
    );
    if asym.e_asym > 0.0 {
        println!(
            "  exact/asymptotic ratios: E {:.6}  E_S {:.6}",
            exact.e / asym.e_asym,
            exact.e_s / asym.e_s_asym
        );
    }

    println!("magnetic case:");
    match spectrum::magnetic_roots(params, guard) {
        Ok(mroots) => {
            for k in 1..=2 {
                for lambda in 1..=2 {
                    println!("  tau_{k},{lambda} = {}", fmt_f64(mroots.tau(k, lambda)));
                }
            }
            if let Some(tau0) = mroots.tau_landau() {
                println!("  tau_0   = {}", fmt_f64(tau0));
            }
            if params.epsilon > 0.0 {
                let mcoeffs = bogoliubov::magnetic_coeffs(params, &mroots)?;
                println!(
                    "  photon-block canonical residuals (reported only; Landau column unprinted): ({:.3e}, {:.3e})",
                    mcoeffs.canonical_residuals.0, mcoeffs.canonical_residuals.1
                );
            }
            for (l1, l2) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
                let m = entangle::magnetic_measures(params, l1, l2, guard)?;
                println!(
                    "    |{l1},{l2}>: y = {}  E = {}  E_S = {}",
                    fmt_f64(m.y),
                    fmt_f64(m.e),
                    fmt_f64(m.e_s)
                );
            }
            let masym = entangle::phi_omega(params)?;
            let mexact = entangle::magnetic_measures(params, 2, 1, guard)?;
            println!(
                "  asymptotics: Phi_omega = {}  E_asym = {}  E_S_asym = {}",
                fmt_f64(masym.phi),
                fmt_f64(masym.e_asym),
                fmt_f64(masym.e_s_asym)
            );
            if masym.e_asym > 0.0 {
                println!(
                    "  exact/asymptotic ratios: E {:.6}  E_S {:.6}",
                    mexact.e / masym.e_asym,
                    mexact.e_s / masym.e_s_asym
                );
            }
        }
        Err(e) => println!("  skipped: {e}"),
    }
    Ok(())
}

const ORACLE_CSV_HEADER: &str = "check,cutoff,level,predicted,observed,deviation";

fn cmd_oracle(
    params: &ModelParams,
    cutoffs: Option<Vec<usize>>,
    case: &str,
    out: Option<&std::path::Path>,
    guard: f64,
) -> Result<i32> {
    let magnetic = match case {
        "free" => false,
        "magnetic" => true,
        other => bail!("unknown case {other:?}; expected free or magnetic"),
    };
    let cutoffs = cutoffs.unwrap_or_else(|| if magnetic { vec![3, 4, 5] } else { vec![4, 6, 8] });
    if cutoffs.is_empty() || cutoffs.windows(2).any(|w| w[0] >= w[1]) {
        bail!("cutoffs must be a non-empty increasing list");
    }
    let n_levels = 6;
    let kin = ElectronKinematics::default();
    let predicted = if magnetic {
        let roots = spectrum::magnetic_roots(params, guard)?;
        magnetic_level_predictions(params, &roots, &kin, n_levels)?
    } else {
        let roots = spectrum::free_roots_closed(params);
        free_level_predictions(params, &roots, n_levels)
    };

    let mut csv = String::new();
    csv.push_str(ORACLE_CSV_HEADER);
    csv.push('\n');
    let mut spectrum_devs = Vec::new();
    let mut ent_devs = Vec::new();
    for &cutoff in &cutoffs {
        let op: OperatorMatrix = if magnetic {
            build_hk_magnetic(params, cutoff, &kin)?
        } else {
            build_hph(params, cutoff)?
        };
        let report = spectrum_check(&op, &predicted, n_levels)?;
        for row in &report.rows {
            csv.push_str(&format!(
                "spectrum,{cutoff},{},{},{},{}\n",
                row.level,
                fmt_f64(row.predicted),
                fmt_f64(row.observed),
                fmt_f64(row.deviation)
            ));
        }
        spectrum_devs.push(report.max_abs_deviation);

        if params.epsilon > 0.0 {
            let target = if magnetic {
                ProjectionTarget::Magnetic { lambda_1: 2, lambda_2: 1 }
            } else {
                ProjectionTarget::Free { lambda_1: 2, lambda_2: 1 }
            };
            let proj = two_photon_projection(&op, target)?;
            let oracle = fock::entanglement_oracle(&proj.amplitudes)?;
            let analytic = if magnetic {
                entangle::magnetic_measures(params, 2, 1, guard)?
            } else {
                entangle::free_measures(params, 2, 1)
            };
            csv.push_str(&format!(
                "entanglement,{cutoff},0,{},{},{}\n",
                fmt_f64(analytic.e),
                fmt_f64(oracle.e),
                fmt_f64(oracle.e - analytic.e)
            ));
            csv.push_str(&format!(
                "remainder,{cutoff},0,{},{},{}\n",
                fmt_f64(0.0),
                fmt_f64(proj.remainder_norm),
                fmt_f64(proj.remainder_norm)
            ));
            ent_devs.push(((oracle.e - analytic.e).abs(), proj.same_frequency_weight));
        }
    }
    write_output(out, csv.as_bytes())?;

    // The truncation budget is the change between consecutive cutoffs; the
    // final deviation must sit within a generous multiple of it or at the
    // solver noise floor.
    let mut violated = false;
    if spectrum_devs.len() >= 2 {
        let last = spectrum_devs[spectrum_devs.len() - 1];
        let prev = spectrum_devs[spectrum_devs.len() - 2];
        let budget = (prev - last).abs().max(1e-12);
        if last > 100.0 * budget && last > 1e-9 {
            eprintln!(
                "spectrum budget violated: final deviation {last:.3e} vs budget {budget:.3e}"
            );
            violated = true;
        }
    }
    if let Some(&(dev, same_freq)) = ent_devs.last() {
        let trunc = if ent_devs.len() >= 2 {
            (ent_devs[ent_devs.len() - 2].0 - dev).abs()
        } else {
            0.0
        };
        let budget = trunc + same_freq + 1e-12;
        if dev > budget {
            eprintln!("entanglement budget violated: |dE| = {dev:.3e} vs budget {budget:.3e}");
            violated = true;
        }
    }
    eprintln!(
        "oracle summary: case = {case}, cutoffs = {cutoffs:?}, max spectrum deviations = {spectrum_devs:?}"
    );
    Ok(if violated { 4 } else { 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_defaults_parse() {
        assert_eq!(scaled_defaults("free").unwrap().omega, 0.0);
        assert_eq!(scaled_defaults("magnetic").unwrap().omega, 0.3);
    }
}
