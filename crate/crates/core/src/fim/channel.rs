use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::{derivative::steering_derivative, Axis};
use crate::linalg::C64;
use crate::model::{
    in_waveguide_vector, rx_phase_vector, spherical_steering, PinchingLayout, PowerModel,
    SystemGeometry, TargetScene,
};
use crate::{Error, Result};

/// Steering matrix seen through a feed or combining network.
///
/// For the pinching transmitter `value = G^T A` and `derivative = G^T Ȧ_d`;
/// for the LCX receiver `value = V^T B` and `derivative = V^T Ḃ_d`. For a
/// fully digital array the network is the identity. `derivative` holds two
/// columns per target, x then y.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub value: DMatrix<C64>,
    pub derivative: DMatrix<C64>,
}

impl Projection {
    pub fn n_ports(&self) -> usize {
        self.value.nrows()
    }

    pub fn n_targets(&self) -> usize {
        self.value.ncols()
    }

    /// `Σ_m w_m · s(element_m, θ_k)` for each port, where `elements(port)`
    /// yields the `(weight, element position)` pairs feeding that port.
    fn combine<F>(
        wavelength: f64,
        n_ports: usize,
        scene: &TargetScene,
        mut elements: F,
    ) -> Result<Self>
    where
        F: FnMut(usize) -> Result<Vec<(C64, [f64; 3])>>,
    {
        let k_count = scene.n_targets();
        let mut value = DMatrix::zeros(n_ports, k_count);
        let mut derivative = DMatrix::zeros(n_ports, 2 * k_count);
        for port in 0..n_ports {
            for (weight, element) in elements(port)? {
                for k in 0..k_count {
                    let target = scene.position(k);
                    let r = crate::model::element_distance(element, target);
                    if r <= 0.0 {
                        return Err(Error::Singularity { target: k });
                    }
                    value[(port, k)] += weight * spherical_steering(wavelength, r);
                    for axis in Axis::BOTH {
                        derivative[(port, 2 * k + axis.index())] +=
                            weight * steering_derivative(wavelength, element, target, axis, k)?;
                    }
                }
            }
        }
        Ok(Self { value, derivative })
    }

    /// `G^T A` and `G^T Ȧ_d` for the pinching antennas.
    pub fn pass_transmit(
        geometry: &SystemGeometry,
        power_model: &PowerModel,
        layout: &PinchingLayout,
        scene: &TargetScene,
    ) -> Result<Self> {
        let feeds = (0..geometry.n_waveguides())
            .map(|n| in_waveguide_vector(geometry, power_model, layout, n))
            .collect::<Result<Vec<_>>>()?;
        Self::combine(geometry.wavelength(), geometry.n_waveguides(), scene, |n| {
            Ok((0..geometry.n_pas_per_waveguide())
                .map(|m| {
                    (
                        feeds[n][m],
                        [layout.get(n, m), geometry.tx_y(n), geometry.tx_z(n)],
                    )
                })
                .collect())
        })
    }

    /// `V^T B` and `V^T Ḃ_d` for the LCX cables.
    pub fn pass_receive(geometry: &SystemGeometry, scene: &TargetScene) -> Result<Self> {
        let phase = rx_phase_vector(geometry);
        Self::combine(geometry.wavelength(), geometry.n_waveguides(), scene, |n| {
            Ok((0..geometry.n_slots_per_cable())
                .map(|m| {
                    (
                        phase[m],
                        [geometry.slot_x(m), geometry.rx_y(n), geometry.rx_z(n)],
                    )
                })
                .collect())
        })
    }

    /// Direct steering of an array where every element has its own chain.
    pub fn direct(wavelength: f64, elements: &[[f64; 3]], scene: &TargetScene) -> Result<Self> {
        let one = C64::new(1.0, 0.0);
        Self::combine(wavelength, elements.len(), scene, |i| {
            Ok(alloc::vec![(one, elements[i])])
        })
    }
}

/// Transmit and receive projections of one sensing configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct SensingChannel {
    pub transmit: Projection,
    pub receive: Projection,
}

impl SensingChannel {
    pub fn pass(
        geometry: &SystemGeometry,
        power_model: &PowerModel,
        layout: &PinchingLayout,
        scene: &TargetScene,
    ) -> Result<Self> {
        Ok(Self {
            transmit: Projection::pass_transmit(geometry, power_model, layout, scene)?,
            receive: Projection::pass_receive(geometry, scene)?,
        })
    }

    pub fn n_targets(&self) -> usize {
        self.transmit.n_targets()
    }

    /// Number of transmit chains, i.e. the covariance dimension.
    pub fn n_transmit(&self) -> usize {
        self.transmit.n_ports()
    }
}
