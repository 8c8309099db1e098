use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::{PinchingLayout, PowerModel, SystemGeometry, TargetScene};
use crate::linalg::{phasor, C64};
use crate::{Error, Result};

/// Distance from an element at `element` to a ground target at `target`.
pub fn element_distance(element: [f64; 3], target: [f64; 2]) -> f64 {
    let dx = element[0] - target[0];
    let dy = element[1] - target[1];
    libm::sqrt(dx * dx + dy * dy + element[2] * element[2])
}

/// Spherical-wave gain `η e^{-j2πr/λ} / r`.
pub fn spherical_steering(wavelength: f64, distance: f64) -> C64 {
    let eta = wavelength / (4.0 * PI);
    phasor(eta / distance, 2.0 * PI * distance / wavelength)
}

pub(crate) fn pa_position(
    geometry: &SystemGeometry,
    layout: &PinchingLayout,
    n: usize,
    m: usize,
) -> [f64; 3] {
    [layout.get(n, m), geometry.tx_y(n), geometry.tx_z(n)]
}

pub(crate) fn slot_position(geometry: &SystemGeometry, n: usize, m: usize) -> [f64; 3] {
    [geometry.slot_x(m), geometry.rx_y(n), geometry.rx_z(n)]
}

fn check_layout(geometry: &SystemGeometry, layout: &PinchingLayout) -> Result<()> {
    if layout.n_waveguides() != geometry.n_waveguides()
        || layout.n_pas_per_waveguide() != geometry.n_pas_per_waveguide()
    {
        return Err(Error::DimensionMismatch(alloc::format!(
            "layout is {}x{}, geometry expects {}x{}",
            layout.n_waveguides(),
            layout.n_pas_per_waveguide(),
            geometry.n_waveguides(),
            geometry.n_pas_per_waveguide()
        )));
    }
    Ok(())
}

fn check_pa(geometry: &SystemGeometry, m: usize) -> Result<()> {
    if m >= geometry.n_pas_per_waveguide() {
        return Err(Error::IndexOutOfRange {
            what: "antenna",
            index: m,
            len: geometry.n_pas_per_waveguide(),
        });
    }
    Ok(())
}

/// Distance between target `k` and antenna `m` on waveguide `n`.
pub fn tx_distance(
    geometry: &SystemGeometry,
    layout: &PinchingLayout,
    scene: &TargetScene,
    k: usize,
    n: usize,
    m: usize,
) -> Result<f64> {
    check_layout(geometry, layout)?;
    scene.check_target(k)?;
    geometry.check_waveguide(n)?;
    check_pa(geometry, m)?;
    Ok(element_distance(
        pa_position(geometry, layout, n, m),
        scene.position(k),
    ))
}

/// Distance between target `k` and slot `m` on cable `n`.
pub fn rx_distance(
    geometry: &SystemGeometry,
    scene: &TargetScene,
    k: usize,
    n: usize,
    m: usize,
) -> Result<f64> {
    scene.check_target(k)?;
    geometry.check_waveguide(n)?;
    if m >= geometry.n_slots_per_cable() {
        return Err(Error::IndexOutOfRange {
            what: "slot",
            index: m,
            len: geometry.n_slots_per_cable(),
        });
    }
    Ok(element_distance(
        slot_position(geometry, n, m),
        scene.position(k),
    ))
}

pub(crate) fn steering_at(
    wavelength: f64,
    element: [f64; 3],
    target: [f64; 2],
    k: usize,
) -> Result<C64> {
    let r = element_distance(element, target);
    if r <= 0.0 {
        return Err(Error::Singularity { target: k });
    }
    Ok(spherical_steering(wavelength, r))
}

/// Free-space vector from the antennas of waveguide `n` to target `k`.
pub fn tx_steering(
    geometry: &SystemGeometry,
    layout: &PinchingLayout,
    scene: &TargetScene,
    k: usize,
    n: usize,
) -> Result<DVector<C64>> {
    check_layout(geometry, layout)?;
    scene.check_target(k)?;
    geometry.check_waveguide(n)?;
    let target = scene.position(k);
    let mut out = DVector::zeros(geometry.n_pas_per_waveguide());
    for m in 0..out.len() {
        out[m] = steering_at(
            geometry.wavelength(),
            pa_position(geometry, layout, n, m),
            target,
            k,
        )?;
    }
    Ok(out)
}

/// Free-space vector from target `k` to the slots of cable `n`.
pub fn rx_steering(
    geometry: &SystemGeometry,
    scene: &TargetScene,
    k: usize,
    n: usize,
) -> Result<DVector<C64>> {
    scene.check_target(k)?;
    geometry.check_waveguide(n)?;
    let target = scene.position(k);
    let mut out = DVector::zeros(geometry.n_slots_per_cable());
    for m in 0..out.len() {
        out[m] = steering_at(
            geometry.wavelength(),
            slot_position(geometry, n, m),
            target,
            k,
        )?;
    }
    Ok(out)
}

/// In-waveguide vector `g(x_n)`: entry m is `α_m e^{-j2π n_t x_{n,m}/λ}`.
pub fn in_waveguide_vector(
    geometry: &SystemGeometry,
    power_model: &PowerModel,
    layout: &PinchingLayout,
    n: usize,
) -> Result<DVector<C64>> {
    check_layout(geometry, layout)?;
    geometry.check_waveguide(n)?;
    if power_model.len() != geometry.n_pas_per_waveguide() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "power model has {} coefficients, geometry has {} antennas per waveguide",
            power_model.len(),
            geometry.n_pas_per_waveguide()
        )));
    }
    let k0 = 2.0 * PI * geometry.refractive_index_tx() / geometry.wavelength();
    Ok(DVector::from_fn(geometry.n_pas_per_waveguide(), |m, _| {
        phasor(power_model.alphas()[m], k0 * layout.get(n, m))
    }))
}

/// In-cable phase progression `[1, e^{-j2π n_r d/λ}, …]` shared by every cable.
pub fn rx_phase_vector(geometry: &SystemGeometry) -> DVector<C64> {
    let step =
        2.0 * PI * geometry.refractive_index_rx() * geometry.slot_spacing() / geometry.wavelength();
    DVector::from_fn(geometry.n_slots_per_cable(), |m, _| {
        phasor(1.0, step * m as f64)
    })
}

/// Stacked transmit matrices: `A` is `(N·M_t) × K`, `G` is block diagonal
/// `(N·M_t) × N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TxMatrices {
    pub a: DMatrix<C64>,
    pub g: DMatrix<C64>,
}

/// Stacked receive matrices: `B` is `(N·M_r) × K`, `V = I_N ⊗ v` is
/// `(N·M_r) × N`.
#[derive(Debug, Clone, PartialEq)]
pub struct RxMatrices {
    pub b: DMatrix<C64>,
    pub v: DMatrix<C64>,
}

pub fn assemble_tx(
    geometry: &SystemGeometry,
    power_model: &PowerModel,
    layout: &PinchingLayout,
    scene: &TargetScene,
) -> Result<TxMatrices> {
    let n_wg = geometry.n_waveguides();
    let mt = geometry.n_pas_per_waveguide();
    let k_count = scene.n_targets();
    let mut a = DMatrix::zeros(n_wg * mt, k_count);
    let mut g = DMatrix::zeros(n_wg * mt, n_wg);
    for n in 0..n_wg {
        let gn = in_waveguide_vector(geometry, power_model, layout, n)?;
        g.view_mut((n * mt, n), (mt, 1)).copy_from(&gn);
        for k in 0..k_count {
            let an = tx_steering(geometry, layout, scene, k, n)?;
            a.view_mut((n * mt, k), (mt, 1)).copy_from(&an);
        }
    }
    Ok(TxMatrices { a, g })
}

pub fn assemble_rx(geometry: &SystemGeometry, scene: &TargetScene) -> Result<RxMatrices> {
    let n_wg = geometry.n_waveguides();
    let mr = geometry.n_slots_per_cable();
    let mut b = DMatrix::zeros(n_wg * mr, scene.n_targets());
    for n in 0..n_wg {
        for k in 0..scene.n_targets() {
            let bn = rx_steering(geometry, scene, k, n)?;
            b.view_mut((n * mr, k), (mr, 1)).copy_from(&bn);
        }
    }
    let phase = rx_phase_vector(geometry);
    let mut v = DMatrix::zeros(n_wg * mr, n_wg);
    for n in 0..n_wg {
        v.view_mut((n * mr, n), (mr, 1)).copy_from(&phase);
    }
    Ok(RxMatrices { b, v })
}

/// All four stacked matrices of the signal model.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationMatrices {
    pub a: DMatrix<C64>,
    pub g: DMatrix<C64>,
    pub b: DMatrix<C64>,
    pub v: DMatrix<C64>,
}

impl PropagationMatrices {
    pub fn new(
        geometry: &SystemGeometry,
        power_model: &PowerModel,
        layout: &PinchingLayout,
        scene: &TargetScene,
    ) -> Result<Self> {
        let TxMatrices { a, g } = assemble_tx(geometry, power_model, layout, scene)?;
        let RxMatrices { b, v } = assemble_rx(geometry, scene)?;
        Ok(Self { a, g, b, v })
    }

    /// `V^T B Φ A^T G`, the `N × N` map from waveguide feeds to cable outputs.
    pub fn system_matrix(&self, reflections: &[C64]) -> DMatrix<C64> {
        system_matrix(self, reflections)
    }
}

pub fn system_matrix(m: &PropagationMatrices, reflections: &[C64]) -> DMatrix<C64> {
    let phi = DMatrix::from_diagonal(&DVector::from_column_slice(reflections));
    m.v.transpose() * &m.b * phi * m.a.transpose() * &m.g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, modulus};
    use crate::model::{GeometryParams, PowerModelKind};
    use alloc::vec;

    fn one_guide() -> SystemGeometry {
        SystemGeometry::new(GeometryParams {
            n_waveguides: 1,
            n_pas_per_waveguide: 1,
            tx_y: vec![4.5],
            tx_z: vec![3.0],
            rx_y: vec![5.5],
            rx_z: vec![3.0],
            ..Default::default()
        })
        .unwrap()
    }

    fn scene(p: [f64; 2]) -> TargetScene {
        TargetScene::new(vec![p], vec![c64(1.0, 0.0)]).unwrap()
    }

    #[test]
    fn tx_distance_examples() {
        let g = one_guide();
        let layout = PinchingLayout::from_rows(&[vec![3.0]], &g).unwrap();
        let r = tx_distance(&g, &layout, &scene([3.0, 7.5]), 0, 0, 0).unwrap();
        assert!((r - 4.242640687).abs() < 1e-9);
        let r = tx_distance(&g, &layout, &scene([3.0, 4.5]), 0, 0, 0).unwrap();
        assert_eq!(r, 3.0);
        let layout = PinchingLayout::from_rows(&[vec![0.0]], &g).unwrap();
        let r = tx_distance(&g, &layout, &scene([30.0, 30.0]), 0, 0, 0).unwrap();
        // 900 + 25.5² + 9 computed by hand: 1559.25
        assert!((r - libm::sqrt(1559.25)).abs() < 1e-12);
        assert!((r - 39.4873).abs() < 1e-4);
        assert!(matches!(
            tx_distance(&g, &layout, &scene([0.0, 0.0]), 0, 1, 0),
            Err(Error::IndexOutOfRange {
                what: "waveguide",
                ..
            })
        ));
        assert!(tx_distance(&g, &layout, &scene([0.0, 0.0]), 3, 0, 0).is_err());
    }

    #[test]
    fn rx_distance_examples() {
        let g = one_guide();
        assert_eq!(rx_distance(&g, &scene([0.0, 5.5]), 0, 0, 0).unwrap(), 3.0);
        assert_eq!(rx_distance(&g, &scene([8.0, 5.5]), 0, 0, 100).unwrap(), 3.0);
        assert!(rx_distance(&g, &scene([8.0, 5.5]), 0, 0, 376).is_err());
    }

    #[test]
    fn steering_modulus_and_phase() {
        let g = one_guide();
        let layout = PinchingLayout::from_rows(&[vec![3.0]], &g).unwrap();
        let a = tx_steering(&g, &layout, &scene([3.0, 7.5]), 0, 0).unwrap();
        assert!((modulus(a[0]) - 3.7514e-4).abs() < 1e-8);
        // r = 3 m = 150 λ: the phase wraps to zero.
        let a = tx_steering(&g, &layout, &scene([3.0, 4.5]), 0, 0).unwrap();
        assert!(a[0].im.abs() < 1e-9 * modulus(a[0]));
        assert!(a[0].re > 0.0);
    }

    #[test]
    fn coincident_target_is_singular() {
        let g = SystemGeometry::new(GeometryParams {
            n_waveguides: 1,
            n_pas_per_waveguide: 1,
            tx_y: vec![4.5],
            tx_z: vec![0.0],
            rx_y: vec![5.5],
            rx_z: vec![3.0],
            ..Default::default()
        })
        .unwrap();
        let layout = PinchingLayout::from_rows(&[vec![3.0]], &g).unwrap();
        assert!(matches!(
            tx_steering(&g, &layout, &scene([3.0, 4.5]), 0, 0),
            Err(Error::Singularity { target: 0 })
        ));
    }

    #[test]
    fn in_waveguide_integer_cycles() {
        let g = one_guide();
        let pm = PowerModel::new(PowerModelKind::EqualPower, 1).unwrap();
        let layout = PinchingLayout::from_rows(&[vec![3.0]], &g).unwrap();
        let gv = in_waveguide_vector(&g, &pm, &layout, 0).unwrap();
        // n_t x / λ = 210 cycles
        assert!((gv[0].re - pm.alphas()[0]).abs() < 1e-9);
        assert!(gv[0].im.abs() < 1e-9);
    }

    #[test]
    fn rx_phase_increment() {
        let g = SystemGeometry::reference();
        let v = rx_phase_vector(&g);
        assert_eq!(v[0], c64(1.0, 0.0));
        let expected = -2.0 * PI * 4.4;
        let got = libm::atan2(v[1].im, v[1].re);
        let diff = libm::remainder(got - expected, 2.0 * PI);
        assert!(diff.abs() < 1e-9);
        // −4.4 cycles ≡ −0.4 cycles
        assert!((got - (-0.4 * 2.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn single_waveguide_stacking_is_identity() {
        let g = one_guide();
        let pm = PowerModel::new(PowerModelKind::EqualPower, 1).unwrap();
        let layout = PinchingLayout::from_rows(&[vec![12.0]], &g).unwrap();
        let s = scene([10.0, 10.0]);
        let tx = assemble_tx(&g, &pm, &layout, &s).unwrap();
        assert_eq!(
            tx.a.column(0).clone_owned(),
            tx_steering(&g, &layout, &s, 0, 0).unwrap()
        );
        assert_eq!(
            tx.g.column(0).clone_owned(),
            in_waveguide_vector(&g, &pm, &layout, 0).unwrap()
        );
    }
}
