use alloc::vec::Vec;

use super::objective::TransmitBudget;
use super::pso::{pso_optimize_positions, PsoConfig};
use super::sdp::{optimize_covariance, SdpConfig};
use crate::fim::{assemble_fim_blocks, crb_matrix, CrbReport, SensingChannel, WaveformSpec};
use crate::model::{PinchingLayout, PowerModel, SystemGeometry, TargetScene};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub layout: PinchingLayout,
    pub waveform: WaveformSpec,
    /// `Tr(CRB)` at the returned layout and waveform, m².
    pub objective_trace: f64,
    /// `Tr(CRB)` after stage 1 (isotropic waveform), m².
    pub stage1_trace: f64,
    pub iteration_log: Vec<(usize, f64)>,
    pub report: CrbReport,
    /// False when stage 2 hit its iteration cap and its best iterate was kept.
    pub stage2_converged: bool,
}

/// Positions by PSO under an isotropic waveform, then the covariance by
/// SDP at those positions. With `sdp == None` the waveform stays isotropic.
pub fn two_stage_optimize(
    geometry: &SystemGeometry,
    power_model: &PowerModel,
    scene: &TargetScene,
    budget: &TransmitBudget,
    pso: &PsoConfig,
    sdp: Option<&SdpConfig>,
) -> Result<OptimizationResult> {
    let stage1 = pso_optimize_positions(geometry, power_model, scene, budget, pso)?;
    let isotropic = budget.isotropic(geometry.n_waveguides())?;
    let (waveform, stage2_converged) = match sdp {
        None => (isotropic, true),
        Some(config) => {
            let channel = SensingChannel::pass(geometry, power_model, &stage1.layout, scene)?;
            match optimize_covariance(
                &channel,
                scene.reflections(),
                budget,
                geometry.noise_power(),
                config,
            ) {
                Ok(outcome) => (outcome.waveform, true),
                Err(Error::NotConverged { best, .. }) => (*best, false),
                Err(e) => return Err(e),
            }
        }
    };
    let blocks = assemble_fim_blocks(geometry, power_model, &stage1.layout, scene, &waveform)?;
    let report = crb_matrix(&blocks)?;
    Ok(OptimizationResult {
        layout: stage1.layout,
        waveform,
        objective_trace: report.trace,
        stage1_trace: stage1.objective,
        iteration_log: stage1.iteration_log,
        report,
        stage2_converged,
    })
}
