use nalgebra::DMatrix;

use crate::fim::{crb_matrix, CrbReport, FimBlocks, Projection, SensingChannel, WaveformSpec};
use crate::linalg::C64;
use crate::model::{PinchingLayout, PowerModel, SystemGeometry, TargetScene};
use crate::Result;

/// Transmit power and snapshot count shared by both stages.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmitBudget {
    /// W.
    pub power_budget: f64,
    pub snapshots: u32,
}

impl TransmitBudget {
    pub fn isotropic(&self, n: usize) -> Result<WaveformSpec> {
        WaveformSpec::isotropic(n, self.power_budget, self.snapshots)
    }
}

/// `Tr(CRB)` as a function of the antenna layout for a fixed scene and
/// covariance. The receive side depends only on the scene and is computed
/// once.
#[derive(Debug, Clone)]
pub struct PassObjective<'a> {
    geometry: &'a SystemGeometry,
    power_model: &'a PowerModel,
    scene: &'a TargetScene,
    receive: Projection,
    covariance: DMatrix<C64>,
    snapshots: f64,
}

impl<'a> PassObjective<'a> {
    pub fn new(
        geometry: &'a SystemGeometry,
        power_model: &'a PowerModel,
        scene: &'a TargetScene,
        waveform: &WaveformSpec,
    ) -> Result<Self> {
        Ok(Self {
            geometry,
            power_model,
            scene,
            receive: Projection::pass_receive(geometry, scene)?,
            covariance: waveform.covariance().clone(),
            snapshots: waveform.snapshots() as f64,
        })
    }

    pub fn channel(&self, layout: &PinchingLayout) -> Result<SensingChannel> {
        Ok(SensingChannel {
            transmit: Projection::pass_transmit(
                self.geometry,
                self.power_model,
                layout,
                self.scene,
            )?,
            receive: self.receive.clone(),
        })
    }

    pub fn blocks(&self, layout: &PinchingLayout) -> Result<FimBlocks> {
        let transmit =
            Projection::pass_transmit(self.geometry, self.power_model, layout, self.scene)?;
        let channel = SensingChannel {
            transmit,
            receive: self.receive.clone(),
        };
        FimBlocks::from_channel(
            &channel,
            self.scene.reflections(),
            &self.covariance,
            self.snapshots,
            self.geometry.noise_power(),
        )
    }

    pub fn report(&self, layout: &PinchingLayout) -> Result<CrbReport> {
        crb_matrix(&self.blocks(layout)?)
    }

    pub fn trace(&self, layout: &PinchingLayout) -> Result<f64> {
        Ok(self.report(layout)?.trace)
    }
}
