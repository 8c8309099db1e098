use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{PinchingLayout, PowerModel, PropagationMatrices, SystemGeometry, TargetScene};
use crate::linalg::{c64, C64};
use crate::{Error, Result};

/// Noise-free echo `V^T B Φ A^T G S` for waveform samples `S` (`N × T`).
pub fn echo_mean(
    geometry: &SystemGeometry,
    power_model: &PowerModel,
    layout: &PinchingLayout,
    scene: &TargetScene,
    waveform_samples: &DMatrix<C64>,
) -> Result<DMatrix<C64>> {
    if waveform_samples.nrows() != geometry.n_waveguides() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "waveform has {} rows, expected {}",
            waveform_samples.nrows(),
            geometry.n_waveguides()
        )));
    }
    let m = PropagationMatrices::new(geometry, power_model, layout, scene)?;
    Ok(m.system_matrix(scene.reflections()) * waveform_samples)
}

/// Echo with i.i.d. circular complex Gaussian noise of variance σ² per entry,
/// deterministic in `noise_seed`.
pub fn simulate_echo(
    geometry: &SystemGeometry,
    power_model: &PowerModel,
    layout: &PinchingLayout,
    scene: &TargetScene,
    waveform_samples: &DMatrix<C64>,
    noise_seed: u64,
) -> Result<DMatrix<C64>> {
    let mut y = echo_mean(geometry, power_model, layout, scene, waveform_samples)?;
    add_noise(&mut y, geometry.noise_power(), noise_seed);
    Ok(y)
}

pub(crate) fn add_noise(y: &mut DMatrix<C64>, noise_power: f64, seed: u64) {
    if noise_power == 0.0 {
        return;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let std = libm::sqrt(noise_power / 2.0);
    // column-major: snapshot by snapshot
    for z in y.iter_mut() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *z += c64(std * re, std * im);
    }
}
