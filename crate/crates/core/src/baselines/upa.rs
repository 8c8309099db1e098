use alloc::vec::Vec;

use crate::fim::{crb_matrix, CrbReport, FimBlocks, Projection, SensingChannel, WaveformSpec};
use crate::model::{TargetScene, SPEED_OF_LIGHT};
use crate::optimizer::{optimize_covariance, SdpConfig, SdpOutcome, TransmitBudget};
use crate::{Error, Result};

/// Fully digital uniform planar array parallel to the floor.
#[derive(Debug, Clone, PartialEq)]
pub struct UpaConfig {
    pub n_x: usize,
    pub n_y: usize,
    /// Side length, m.
    pub aperture: f64,
    /// m.
    pub center: [f64; 3],
    /// m.
    pub wavelength: f64,
}

impl Default for UpaConfig {
    fn default() -> Self {
        Self {
            n_x: 10,
            n_y: 10,
            aperture: 1.0,
            center: [15.0, 15.0, 3.0],
            wavelength: SPEED_OF_LIGHT / 15e9,
        }
    }
}

fn grid(n: usize, aperture: f64, center: f64) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![center];
    }
    let step = aperture / (n - 1) as f64;
    (0..n)
        .map(|i| center - aperture / 2.0 + i as f64 * step)
        .collect()
}

impl UpaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_x == 0 || self.n_y == 0 {
            return Err(Error::InvalidConfig(
                "UPA needs at least one element per axis".into(),
            ));
        }
        if !(self.aperture > 0.0) || !(self.wavelength > 0.0) {
            return Err(Error::InvalidConfig(
                "UPA aperture and wavelength must be positive".into(),
            ));
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfig("UPA center must be finite".into()));
        }
        Ok(())
    }

    pub fn n_elements(&self) -> usize {
        self.n_x * self.n_y
    }

    /// Element positions, x index varying fastest.
    pub fn element_positions(&self) -> Vec<[f64; 3]> {
        let xs = grid(self.n_x, self.aperture, self.center[0]);
        let ys = grid(self.n_y, self.aperture, self.center[1]);
        let mut out = Vec::with_capacity(self.n_elements());
        for &y in &ys {
            for &x in &xs {
                out.push([x, y, self.center[2]]);
            }
        }
        out
    }
}

/// Same array on transmit and receive, one RF chain per element.
pub fn upa_channel(config: &UpaConfig, scene: &TargetScene) -> Result<SensingChannel> {
    config.validate()?;
    let elements = config.element_positions();
    let direct = Projection::direct(config.wavelength, &elements, scene)?;
    Ok(SensingChannel {
        transmit: direct.clone(),
        receive: direct,
    })
}

pub fn upa_crb(
    config: &UpaConfig,
    scene: &TargetScene,
    waveform: &WaveformSpec,
    noise_power: f64,
) -> Result<CrbReport> {
    let channel = upa_channel(config, scene)?;
    let blocks = FimBlocks::from_channel(
        &channel,
        scene.reflections(),
        waveform.covariance(),
        waveform.snapshots() as f64,
        noise_power,
    )?;
    crb_matrix(&blocks)
}

/// UPA with its transmit covariance chosen by the same SDP as the pinching
/// system.
pub fn upa_optimized_crb(
    config: &UpaConfig,
    scene: &TargetScene,
    budget: &TransmitBudget,
    noise_power: f64,
    sdp: &SdpConfig,
) -> Result<SdpOutcome> {
    let channel = upa_channel(config, scene)?;
    optimize_covariance(&channel, scene.reflections(), budget, noise_power, sdp)
}
