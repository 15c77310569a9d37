//! Parameter sweeps over laboratory inputs with deterministic CSV output.
//!
//! Each grid point converts the modified laboratory input, checks the
//! resonance guard, and evaluates the anti-parallel |2,1⟩ entanglement
//! measures together with the Φ_ω prediction. Points inside the guard band
//! are skipped and logged, never silently dropped.

use std::io::{self, Write};

use crate::entangle;
use crate::params::{self, ModelParams, PhysicalInput, ValidateOptions};
use crate::{Error, Result};

/// Which laboratory input the sweep varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweptParam {
    /// Magnetic field in tesla.
    MagneticField,
    /// Electron density in m⁻³.
    ElectronDensity,
    /// Light-cone momentum np in m⁻¹.
    Np,
    /// Second wavelength in nanometers.
    Wavelength2,
}

impl SweptParam {
    pub fn key(&self) -> &'static str {
        match self {
            SweptParam::MagneticField => "magnetic_field",
            SweptParam::ElectronDensity => "electron_density",
            SweptParam::Np => "np",
            SweptParam::Wavelength2 => "wavelength_2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "magnetic_field" => Some(SweptParam::MagneticField),
            "electron_density" => Some(SweptParam::ElectronDensity),
            "np" => Some(SweptParam::Np),
            "wavelength_2" => Some(SweptParam::Wavelength2),
            _ => None,
        }
    }
}

/// Sweep definition: which parameter, over which grid.
#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub param: SweptParam,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub log_spacing: bool,
}

impl SweepSpec {
    fn check(&self) -> Result<()> {
        if !self.min.is_finite() || !self.max.is_finite() || self.min >= self.max {
            return Err(Error::InvalidInput(format!(
                "sweep requires min < max, got {}..{}",
                self.min, self.max
            )));
        }
        if self.points < 2 {
            return Err(Error::InvalidInput(format!(
                "sweep requires at least 2 points, got {}",
                self.points
            )));
        }
        if self.log_spacing && self.min <= 0.0 {
            return Err(Error::InvalidInput("log spacing requires min > 0".into()));
        }
        Ok(())
    }

    /// Deterministic grid values.
    pub fn grid(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if self.log_spacing {
                    (self.min.ln() + t * (self.max.ln() - self.min.ln())).exp()
                } else {
                    self.min + t * (self.max - self.min)
                }
            })
            .collect()
    }
}

/// One computed grid point.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub value: f64,
    pub omega: f64,
    pub epsilon: f64,
    pub y: f64,
    pub e: f64,
    pub e_s: f64,
    pub phi_omega: f64,
    /// Diagnostic flags, semicolon separated ("smallness" when the
    /// validity ratio is exceeded); empty when clean.
    pub flags: String,
}

/// A grid point excluded by the resonance guard.
#[derive(Clone, Debug)]
pub struct SkippedPoint {
    pub value: f64,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<SkippedPoint>,
}

fn apply_value(base: &PhysicalInput, param: SweptParam, value: f64) -> PhysicalInput {
    let mut input = base.clone();
    match param {
        SweptParam::MagneticField => input.magnetic_field = value,
        SweptParam::ElectronDensity => input.electron_density = value,
        SweptParam::Np => input.np = value,
        SweptParam::Wavelength2 => input.wavelength_2 = value * 1e-9,
    }
    input
}

/// Evaluate the |2,1⟩ measures at one parameter point.
fn evaluate_point(params: &ModelParams, opts: &ValidateOptions) -> Result<SweepRow> {
    let diag = params::validate(params, opts);
    if diag.resonance_flagged {
        let (s, kappa) = if (params.omega - params.kappa_1).abs() / params.kappa_1
            <= (params.omega - params.kappa_2).abs() / params.kappa_2
        {
            (1, params.kappa_1)
        } else {
            (2, params.kappa_2)
        };
        return Err(Error::ResonanceGuard {
            s,
            omega: params.omega,
            kappa,
            guard: opts.resonance_guard,
        });
    }
    let report = entangle::magnetic_measures(params, 2, 1, opts.resonance_guard)?;
    let phi = entangle::phi_omega(params)?;
    Ok(SweepRow {
        value: f64::NAN,
        omega: params.omega,
        epsilon: params.epsilon,
        y: report.y,
        e: report.e,
        e_s: report.e_s,
        phi_omega: phi.phi,
        flags: if diag.smallness_flagged { "smallness".into() } else { String::new() },
    })
}

/// Run a sweep over the grid. Guard-violating points are recorded in
/// `skipped`; any other error aborts the sweep.
pub fn run_sweep(
    base: &PhysicalInput,
    spec: &SweepSpec,
    opts: &ValidateOptions,
) -> Result<SweepOutcome> {
    spec.check()?;
    let mut rows = Vec::with_capacity(spec.points);
    let mut skipped = Vec::new();
    for value in spec.grid() {
        let input = apply_value(base, spec.param, value);
        let params = params::from_physical(&input)?;
        match evaluate_point(&params, opts) {
            Ok(mut row) => {
                row.value = value;
                rows.push(row);
            }
            Err(Error::ResonanceGuard { s, omega, kappa, guard }) => {
                skipped.push(SkippedPoint {
                    value,
                    reason: format!(
                        "resonance guard: omega = {omega:.6e} within {guard} of kappa_{s} = {kappa:.6e}"
                    ),
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(SweepOutcome { spec: spec.clone(), rows, skipped })
}

/// Round-trip-safe decimal formatting (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const SWEEP_CSV_HEADER: &str = "swept_param,swept_value,omega,epsilon,y,E,E_S,phi_omega,flags";

/// Write the outcome as CSV: fixed header, fixed column order, LF line
/// endings, deterministic formatting.
pub fn write_csv<W: Write>(out: &mut W, outcome: &SweepOutcome) -> io::Result<()> {
    out.write_all(SWEEP_CSV_HEADER.as_bytes())?;
    out.write_all(b"\n")?;
    let key = outcome.spec.param.key();
    for row in &outcome.rows {
        let line = format!(
            "{},{},{},{},{},{},{},{},{}\n",
            key,
            fmt_f64(row.value),
            fmt_f64(row.omega),
            fmt_f64(row.epsilon),
            fmt_f64(row.y),
            fmt_f64(row.e),
            fmt_f64(row.e_s),
            fmt_f64(row.phi_omega),
            row.flags,
        );
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::reference_input;

    fn b_sweep(points: usize, max_t: f64) -> SweepSpec {
        SweepSpec {
            param: SweptParam::MagneticField,
            min: 0.0,
            max: max_t,
            points,
            log_spacing: false,
        }
    }

    #[test]
    fn grid_is_deterministic_and_ordered() {
        let spec = b_sweep(5, 0.1);
        let g = spec.grid();
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[4], 0.1);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn guarded_points_are_skipped_with_reasons() {
        // B up to 0.25 T crosses both resonances (≈ 0.165 T and 0.184 T).
        let outcome =
            run_sweep(&reference_input(0.0), &b_sweep(26, 0.25), &ValidateOptions::default())
                .unwrap();
        assert!(!outcome.skipped.is_empty());
        assert_eq!(outcome.rows.len() + outcome.skipped.len(), 26);
        for s in &outcome.skipped {
            assert!(s.reason.contains("resonance guard"));
        }
    }

    #[test]
    fn csv_is_byte_identical_across_runs() {
        let spec = b_sweep(12, 0.1);
        let mut a = Vec::new();
        let mut b = Vec::new();
        let o1 = run_sweep(&reference_input(0.0), &spec, &ValidateOptions::default()).unwrap();
        let o2 = run_sweep(&reference_input(0.0), &spec, &ValidateOptions::default()).unwrap();
        write_csv(&mut a, &o1).unwrap();
        write_csv(&mut b, &o2).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with(SWEEP_CSV_HEADER));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn formatted_floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.5e7, 7.591e10, f64::MIN_POSITIVE] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn wavelength_sweep_varies_kappa_only() {
        let spec = SweepSpec {
            param: SweptParam::Wavelength2,
            min: 500.0,
            max: 600.0,
            points: 5,
            log_spacing: false,
        };
        let outcome =
            run_sweep(&reference_input(0.0), &spec, &ValidateOptions::default()).unwrap();
        assert_eq!(outcome.rows.len(), 5);
        // epsilon and omega depend only on the medium, not on wavelength_2.
        for w in outcome.rows.windows(2) {
            assert_eq!(w[0].epsilon, w[1].epsilon);
            assert_eq!(w[0].omega, w[1].omega);
            assert_ne!(w[0].e, w[1].e);
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let mut spec = b_sweep(5, 0.1);
        spec.min = 0.2;
        assert!(run_sweep(&reference_input(0.0), &spec, &ValidateOptions::default()).is_err());
        let mut spec = b_sweep(1, 0.1);
        spec.points = 1;
        assert!(run_sweep(&reference_input(0.0), &spec, &ValidateOptions::default()).is_err());
    }
}
