use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::{Error, Result};

/// Propagation speed used to derive the wavelength from the carrier.
pub const SPEED_OF_LIGHT: f64 = 3.0e8;

/// Raw geometry inputs. [`Default`] gives the 5-waveguide, 30 m reference
/// deployment at 15 GHz.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryParams {
    /// Hz.
    pub carrier_frequency: f64,
    pub n_waveguides: usize,
    pub n_pas_per_waveguide: usize,
    /// Length of every waveguide and cable, m.
    pub waveguide_length: f64,
    /// Minimum spacing between neighbouring antennas on one waveguide, m.
    pub min_pa_spacing: f64,
    /// LCX slot spacing, m.
    pub slot_spacing: f64,
    pub tx_y: Vec<f64>,
    pub tx_z: Vec<f64>,
    pub rx_y: Vec<f64>,
    pub rx_z: Vec<f64>,
    pub refractive_index_tx: f64,
    pub refractive_index_rx: f64,
    /// Noise power per receive channel, W. Zero is allowed for noise-free
    /// simulation but makes the Fisher information undefined.
    pub noise_power: f64,
}

impl Default for GeometryParams {
    fn default() -> Self {
        let n = 5;
        Self {
            carrier_frequency: 15e9,
            n_waveguides: n,
            n_pas_per_waveguide: 4,
            waveguide_length: 30.0,
            min_pa_spacing: 0.3,
            slot_spacing: 0.08,
            tx_y: (1..=n).map(|i| 5.0 * i as f64 - 0.5).collect(),
            tx_z: alloc::vec![3.0; n],
            rx_y: (1..=n).map(|i| 5.0 * i as f64 + 0.5).collect(),
            rx_z: alloc::vec![3.0; n],
            refractive_index_tx: 1.4,
            refractive_index_rx: 1.1,
            noise_power: 1e-11,
        }
    }
}

/// Validated waveguide/LCX deployment with the derived wavelength, pathloss
/// factor and slot count.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemGeometry {
    params: GeometryParams,
    wavelength: f64,
    pathloss_factor: f64,
    n_slots: usize,
}

impl SystemGeometry {
    pub fn new(params: GeometryParams) -> Result<Self> {
        let p = &params;
        let positive = [
            ("carrier_frequency", p.carrier_frequency),
            ("waveguide_length", p.waveguide_length),
            ("slot_spacing", p.slot_spacing),
            ("refractive_index_tx", p.refractive_index_tx),
            ("refractive_index_rx", p.refractive_index_rx),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidGeometry(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if !(p.min_pa_spacing.is_finite() && p.min_pa_spacing >= 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "min_pa_spacing must be >= 0, got {}",
                p.min_pa_spacing
            )));
        }
        if !(p.noise_power.is_finite() && p.noise_power >= 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "noise_power must be >= 0, got {}",
                p.noise_power
            )));
        }
        if p.n_waveguides == 0 || p.n_pas_per_waveguide == 0 {
            return Err(Error::InvalidGeometry(
                "need at least one waveguide and one antenna per waveguide".into(),
            ));
        }
        for (name, v) in [
            ("tx_y", &p.tx_y),
            ("tx_z", &p.tx_z),
            ("rx_y", &p.rx_y),
            ("rx_z", &p.rx_z),
        ] {
            if v.len() != p.n_waveguides {
                return Err(Error::InvalidGeometry(format!(
                    "{name} has {} entries, expected {}",
                    v.len(),
                    p.n_waveguides
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidGeometry(format!(
                    "{name} has non-finite entries"
                )));
            }
        }
        if (p.n_pas_per_waveguide - 1) as f64 * p.min_pa_spacing > p.waveguide_length {
            return Err(Error::InvalidGeometry(format!(
                "{} antennas at spacing {} do not fit on a {} m waveguide",
                p.n_pas_per_waveguide, p.min_pa_spacing, p.waveguide_length
            )));
        }

        // The slot grid must tile the cable exactly: L/d integral within 1e-9 relative.
        let ratio = p.waveguide_length / p.slot_spacing;
        let rounded = libm::round(ratio);
        if (ratio - rounded).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidGeometry(format!(
                "waveguide_length / slot_spacing = {ratio} is not an integer"
            )));
        }

        let wavelength = SPEED_OF_LIGHT / p.carrier_frequency;
        Ok(Self {
            wavelength,
            pathloss_factor: wavelength / (4.0 * PI),
            n_slots: rounded as usize + 1,
            params,
        })
    }

    pub fn reference() -> Self {
        Self::new(GeometryParams::default()).expect("reference geometry is valid")
    }

    pub fn params(&self) -> &GeometryParams {
        &self.params
    }

    /// Same deployment with a different noise power.
    pub fn with_noise_power(&self, noise_power: f64) -> Result<Self> {
        Self::new(GeometryParams {
            noise_power,
            ..self.params.clone()
        })
    }

    pub fn carrier_frequency(&self) -> f64 {
        self.params.carrier_frequency
    }
    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }
    /// `λ / 4π`.
    pub fn pathloss_factor(&self) -> f64 {
        self.pathloss_factor
    }
    pub fn n_waveguides(&self) -> usize {
        self.params.n_waveguides
    }
    pub fn n_pas_per_waveguide(&self) -> usize {
        self.params.n_pas_per_waveguide
    }
    /// Slots per cable, `L/d + 1`.
    pub fn n_slots_per_cable(&self) -> usize {
        self.n_slots
    }
    pub fn waveguide_length(&self) -> f64 {
        self.params.waveguide_length
    }
    pub fn min_pa_spacing(&self) -> f64 {
        self.params.min_pa_spacing
    }
    pub fn slot_spacing(&self) -> f64 {
        self.params.slot_spacing
    }
    pub fn refractive_index_tx(&self) -> f64 {
        self.params.refractive_index_tx
    }
    pub fn refractive_index_rx(&self) -> f64 {
        self.params.refractive_index_rx
    }
    pub fn noise_power(&self) -> f64 {
        self.params.noise_power
    }
    pub fn tx_y(&self, n: usize) -> f64 {
        self.params.tx_y[n]
    }
    pub fn tx_z(&self, n: usize) -> f64 {
        self.params.tx_z[n]
    }
    pub fn rx_y(&self, n: usize) -> f64 {
        self.params.rx_y[n]
    }
    pub fn rx_z(&self, n: usize) -> f64 {
        self.params.rx_z[n]
    }

    /// x-coordinate of slot `m` (0-based); every cable starts at x = 0.
    pub fn slot_x(&self, m: usize) -> f64 {
        m as f64 * self.params.slot_spacing
    }

    pub(crate) fn check_waveguide(&self, n: usize) -> Result<()> {
        if n >= self.n_waveguides() {
            return Err(Error::IndexOutOfRange {
                what: "waveguide",
                index: n,
                len: self.n_waveguides(),
            });
        }
        Ok(())
    }
}
