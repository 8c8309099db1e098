use core::f64::consts::PI;

use nalgebra::DVector;

use super::Axis;
use crate::linalg::{c64, phasor, C64};
use crate::model::{element_distance, PinchingLayout, SystemGeometry, TargetScene};
use crate::{Error, Result};

/// Derivative of `η e^{-j2πr/λ}/r` with respect to the target coordinate
/// along `axis`:
///
/// `η κ (j2πr/λ + 1) e^{-j2πr/λ} / r³`, with `κ` the element-minus-target
/// offset along `axis`.
pub fn steering_derivative(
    wavelength: f64,
    element: [f64; 3],
    target: [f64; 2],
    axis: Axis,
    k: usize,
) -> Result<C64> {
    let r = element_distance(element, target);
    if r <= 0.0 {
        return Err(Error::Singularity { target: k });
    }
    let kappa = element[axis.index()] - target[axis.index()];
    let eta = wavelength / (4.0 * PI);
    let wave = 2.0 * PI * r / wavelength;
    Ok(c64(1.0, wave) * phasor(eta * kappa / (r * r * r), wave))
}

pub fn tx_steering_derivative(
    geometry: &SystemGeometry,
    layout: &PinchingLayout,
    scene: &TargetScene,
    k: usize,
    n: usize,
    axis: Axis,
) -> Result<DVector<C64>> {
    scene.check_target(k)?;
    geometry.check_waveguide(n)?;
    if layout.n_waveguides() != geometry.n_waveguides()
        || layout.n_pas_per_waveguide() != geometry.n_pas_per_waveguide()
    {
        return Err(Error::DimensionMismatch(
            "layout does not match geometry".into(),
        ));
    }
    let target = scene.position(k);
    let mut out = DVector::zeros(geometry.n_pas_per_waveguide());
    for m in 0..out.len() {
        let element = [layout.get(n, m), geometry.tx_y(n), geometry.tx_z(n)];
        out[m] = steering_derivative(geometry.wavelength(), element, target, axis, k)?;
    }
    Ok(out)
}

pub fn rx_steering_derivative(
    geometry: &SystemGeometry,
    scene: &TargetScene,
    k: usize,
    n: usize,
    axis: Axis,
) -> Result<DVector<C64>> {
    scene.check_target(k)?;
    geometry.check_waveguide(n)?;
    let target = scene.position(k);
    let mut out = DVector::zeros(geometry.n_slots_per_cable());
    for m in 0..out.len() {
        let element = [geometry.slot_x(m), geometry.rx_y(n), geometry.rx_z(n)];
        out[m] = steering_derivative(geometry.wavelength(), element, target, axis, k)?;
    }
    Ok(out)
}

/// `∂a(θ_k, X)/∂θ_{axis,k}`: per-waveguide derivatives stacked.
pub fn tx_steering_derivative_stacked(
    geometry: &SystemGeometry,
    layout: &PinchingLayout,
    scene: &TargetScene,
    k: usize,
    axis: Axis,
) -> Result<DVector<C64>> {
    let mt = geometry.n_pas_per_waveguide();
    let mut out = DVector::zeros(geometry.n_waveguides() * mt);
    for n in 0..geometry.n_waveguides() {
        out.rows_mut(n * mt, mt).copy_from(&tx_steering_derivative(
            geometry, layout, scene, k, n, axis,
        )?);
    }
    Ok(out)
}

/// `∂b(θ_k)/∂θ_{axis,k}`: per-cable derivatives stacked.
pub fn rx_steering_derivative_stacked(
    geometry: &SystemGeometry,
    scene: &TargetScene,
    k: usize,
    axis: Axis,
) -> Result<DVector<C64>> {
    let mr = geometry.n_slots_per_cable();
    let mut out = DVector::zeros(geometry.n_waveguides() * mr);
    for n in 0..geometry.n_waveguides() {
        out.rows_mut(n * mr, mr)
            .copy_from(&rx_steering_derivative(geometry, scene, k, n, axis)?);
    }
    Ok(out)
}
