use std::fmt;
use std::str::FromStr;

use pass_core::baselines::{fixed_uniform_layout, upa_channel, upa_crb, UpaConfig};
use pass_core::optimizer::{optimize_covariance, pso_optimize_positions};
use pass_core::{
    assemble_fim_blocks, crb_matrix, CrbReport, Error, PinchingLayout, PsoConfig, SensingChannel,
    TargetScene, WaveformSpec,
};

use crate::config::UpaSettings;
use crate::Resolved;

/// A system under comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Method {
    /// Two-stage optimized pinching antennas.
    PassPso,
    /// Pinching antennas at the evenly spaced layout.
    PassFixed,
    /// Fully digital planar array with the given side length, m.
    Mimo { aperture: f64 },
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::PassPso => f.write_str("pass-pso"),
            Method::PassFixed => f.write_str("pass-fixed"),
            Method::Mimo { aperture } => write!(f, "mimo-{aperture}x{aperture}"),
        }
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pass-pso" => return Ok(Method::PassPso),
            "pass-fixed" => return Ok(Method::PassFixed),
            _ => {}
        }
        let bad = || format!("unknown method {s:?}; expected pass-pso, pass-fixed or mimo-<a>x<a>");
        let dims = s.strip_prefix("mimo-").ok_or_else(bad)?;
        let (a, b) = dims.split_once('x').ok_or_else(bad)?;
        let a: f64 = a.parse().map_err(|_| bad())?;
        let b: f64 = b.parse().map_err(|_| bad())?;
        if a != b || !(a.is_finite() && a > 0.0) {
            return Err(format!(
                "{s:?}: the array aperture must be square and positive"
            ));
        }
        Ok(Method::Mimo { aperture: a })
    }
}

/// Design produced by a method for one scene, evaluated at a (possibly
/// different) true scene.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodOutcome {
    pub report: CrbReport,
    /// `Tr(CRB)` at the design scene with the isotropic waveform, m².
    pub stage1_trace: f64,
    /// `Tr(CRB)` at the design scene with the optimized waveform, m².
    pub stage2_trace: Option<f64>,
    pub stage2_converged: bool,
}

fn stage2<F>(run: F) -> Result<(WaveformSpec, bool), Error>
where
    F: FnOnce() -> Result<WaveformSpec, Error>,
{
    match run() {
        Ok(w) => Ok((w, true)),
        Err(Error::NotConverged { best, .. }) => Ok((*best, false)),
        Err(e) => Err(e),
    }
}

pub fn upa_config(settings: &UpaSettings, aperture: f64, wavelength: f64) -> UpaConfig {
    UpaConfig {
        n_x: settings.n_x,
        n_y: settings.n_y,
        aperture,
        center: settings.center_m,
        wavelength,
    }
}

/// Designs against `design` and reports the bound at `truth`.
pub fn run_method(
    method: Method,
    resolved: &Resolved,
    upa: &UpaSettings,
    pso: &PsoConfig,
    optimize_waveform: bool,
    design: &TargetScene,
    truth: &TargetScene,
) -> Result<MethodOutcome, Error> {
    let g = &resolved.geometry;
    let pm = &resolved.power_model;
    let budget = &resolved.budget;
    let noise = g.noise_power();
    match method {
        Method::PassPso | Method::PassFixed => {
            let (layout, stage1_trace): (PinchingLayout, f64) = if method == Method::PassPso {
                let out = pso_optimize_positions(g, pm, design, budget, pso)?;
                (out.layout, out.objective)
            } else {
                let layout = fixed_uniform_layout(g);
                let iso = budget.isotropic(g.n_waveguides())?;
                let trace = crb_matrix(&assemble_fim_blocks(g, pm, &layout, design, &iso)?)?.trace;
                (layout, trace)
            };
            let (waveform, stage2_trace, converged) = if optimize_waveform {
                let channel = SensingChannel::pass(g, pm, &layout, design)?;
                let (w, ok) = stage2(|| {
                    optimize_covariance(
                        &channel,
                        design.reflections(),
                        budget,
                        noise,
                        &resolved.sdp,
                    )
                    .map(|o| o.waveform)
                })?;
                let t = crb_matrix(&assemble_fim_blocks(g, pm, &layout, design, &w)?)?.trace;
                (w, Some(t), ok)
            } else {
                (budget.isotropic(g.n_waveguides())?, None, true)
            };
            let report = crb_matrix(&assemble_fim_blocks(g, pm, &layout, truth, &waveform)?)?;
            Ok(MethodOutcome {
                report,
                stage1_trace,
                stage2_trace,
                stage2_converged: converged,
            })
        }
        Method::Mimo { aperture } => {
            let cfg = upa_config(upa, aperture, g.wavelength());
            let iso = budget.isotropic(cfg.n_elements())?;
            let stage1_trace = upa_crb(&cfg, design, &iso, noise)?.trace;
            let (waveform, stage2_trace, converged) = if optimize_waveform {
                let channel = upa_channel(&cfg, design)?;
                let (w, ok) = stage2(|| {
                    optimize_covariance(
                        &channel,
                        design.reflections(),
                        budget,
                        noise,
                        &resolved.sdp,
                    )
                    .map(|o| o.waveform)
                })?;
                let t = upa_crb(&cfg, design, &w, noise)?.trace;
                (w, Some(t), ok)
            } else {
                (iso, None, true)
            };
            let report = upa_crb(&cfg, truth, &waveform, noise)?;
            Ok(MethodOutcome {
                report,
                stage1_trace,
                stage2_trace,
                stage2_converged: converged,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_ids_round_trip() {
        for s in ["pass-pso", "pass-fixed", "mimo-2x2", "mimo-0.5x0.5"] {
            assert_eq!(s.parse::<Method>().unwrap().to_string(), s);
        }
        assert_eq!(
            "mimo-4.0x4".parse::<Method>().unwrap(),
            Method::Mimo { aperture: 4.0 }
        );
    }

    #[test]
    fn bad_method_ids_are_rejected() {
        for s in ["pass", "mimo-2x3", "mimo-0x0", "mimo-ax2", "mimo-2"] {
            assert!(s.parse::<Method>().is_err(), "{s}");
        }
    }
}
