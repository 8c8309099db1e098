use nalgebra::{DMatrix, DVector};

use super::{SensingChannel, WaveformSpec};
use crate::linalg::{duplicate_columns, C64};
use crate::model::{PinchingLayout, PowerModel, SystemGeometry, TargetScene};
use crate::{Error, Result};

/// Complex Fisher information blocks.
///
/// `f11` is `2K × 2K` (positions), `f12` is `2K × K` and `f22` is `K × K`
/// (reflection coefficients). The real FIM is these tiled by real and
/// imaginary parts and multiplied by `scale = 2T/σ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct FimBlocks {
    pub f11: DMatrix<C64>,
    pub f12: DMatrix<C64>,
    pub f22: DMatrix<C64>,
    /// `2T/σ²`.
    pub scale: f64,
    pub snapshots: f64,
    pub noise_power: f64,
    /// `G^T A_d` with `A_d = A ⊗ [1, 1]`.
    pub tx_expanded: DMatrix<C64>,
    /// `G^T Ȧ_d`.
    pub tx_dot: DMatrix<C64>,
    /// `V^T B_d` with `B_d = B ⊗ [1, 1]`.
    pub rx_expanded: DMatrix<C64>,
    /// `V^T Ḃ_d`.
    pub rx_dot: DMatrix<C64>,
    /// `Φ_d = Φ ⊗ I_2`.
    pub reflections_expanded: DMatrix<C64>,
}

impl FimBlocks {
    /// Evaluates the Hadamard-product block formulas for an arbitrary
    /// (not necessarily PSD) covariance; the blocks are linear in it.
    pub fn from_channel(
        channel: &SensingChannel,
        reflections: &[C64],
        covariance: &DMatrix<C64>,
        snapshots: f64,
        noise_power: f64,
    ) -> Result<Self> {
        let k = channel.n_targets();
        let nt = channel.n_transmit();
        if reflections.len() != k || channel.receive.n_targets() != k {
            return Err(Error::DimensionMismatch(alloc::format!(
                "channel has {k} targets, {} reflection coefficients",
                reflections.len()
            )));
        }
        if covariance.shape() != (nt, nt) {
            return Err(Error::DimensionMismatch(alloc::format!(
                "covariance is {}x{}, channel has {nt} transmit chains",
                covariance.nrows(),
                covariance.ncols()
            )));
        }

        let beta = DVector::from_column_slice(reflections);
        let phi_d = DMatrix::from_diagonal(&DVector::from_fn(2 * k, |i, _| beta[i / 2]));
        let phi_d_conj = phi_d.conjugate();
        let r_conj = covariance.conjugate();

        let c = &channel.transmit.value;
        let c_d = duplicate_columns(c);
        let c_dot = &channel.transmit.derivative;
        let w = &channel.receive.value;
        let w_d = duplicate_columns(w);
        let w_dot = &channel.receive.derivative;

        // Transmit-side Gram factors Φ_d* X^H R* Y Φ_d.
        let rc_d = &r_conj * &c_d;
        let rc_dot = &r_conj * c_dot;
        let t_dd = &phi_d_conj * c_d.adjoint() * &rc_d * &phi_d;
        let t_dp = &phi_d_conj * c_d.adjoint() * &rc_dot * &phi_d;
        let t_pd = &phi_d_conj * c_dot.adjoint() * &rc_d * &phi_d;
        let t_pp = &phi_d_conj * c_dot.adjoint() * &rc_dot * &phi_d;

        let f11 = (w_dot.adjoint() * w_dot).component_mul(&t_dd)
            + (w_dot.adjoint() * &w_d).component_mul(&t_dp)
            + (w_d.adjoint() * w_dot).component_mul(&t_pd)
            + (w_d.adjoint() * &w_d).component_mul(&t_pp);

        let rc = &r_conj * c;
        let f12 = (w_dot.adjoint() * w).component_mul(&(&phi_d_conj * c_d.adjoint() * &rc))
            + (w_d.adjoint() * w).component_mul(&(&phi_d_conj * c_dot.adjoint() * &rc));

        let f22 = (w.adjoint() * w).component_mul(&(c.adjoint() * &rc));

        Ok(Self {
            f11,
            f12,
            f22,
            scale: 2.0 * snapshots / noise_power,
            snapshots,
            noise_power,
            tx_expanded: c_d,
            tx_dot: c_dot.clone(),
            rx_expanded: w_d,
            rx_dot: w_dot.clone(),
            reflections_expanded: phi_d,
        })
    }

    pub fn n_targets(&self) -> usize {
        self.f22.nrows()
    }

    /// `F̃12 = [Re F12, -Im F12]`, `2K × 2K`.
    pub fn f12_tilde(&self) -> DMatrix<f64> {
        let (r, c) = self.f12.shape();
        DMatrix::from_fn(r, 2 * c, |i, j| {
            if j < c {
                self.f12[(i, j)].re
            } else {
                -self.f12[(i, j - c)].im
            }
        })
    }

    /// `F̃22 = [[Re F22, -Im F22], [-Im F22^T, Re F22]]`, `2K × 2K`.
    pub fn f22_tilde(&self) -> DMatrix<f64> {
        let k = self.f22.nrows();
        DMatrix::from_fn(2 * k, 2 * k, |i, j| match (i < k, j < k) {
            (true, true) => self.f22[(i, j)].re,
            (false, false) => self.f22[(i - k, j - k)].re,
            (true, false) => -self.f22[(i, j - k)].im,
            (false, true) => -self.f22[(j, i - k)].im,
        })
    }

    /// `Re F11`, `2K × 2K`.
    pub fn f11_real(&self) -> DMatrix<f64> {
        self.f11.map(|z| z.re)
    }
}

/// FIM blocks of a pinching-antenna deployment.
pub fn assemble_fim_blocks(
    geometry: &SystemGeometry,
    power_model: &PowerModel,
    layout: &PinchingLayout,
    scene: &TargetScene,
    waveform: &WaveformSpec,
) -> Result<FimBlocks> {
    if waveform.dim() != geometry.n_waveguides() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "covariance is {0}x{0}, geometry has {1} waveguides",
            waveform.dim(),
            geometry.n_waveguides()
        )));
    }
    let channel = SensingChannel::pass(geometry, power_model, layout, scene)?;
    FimBlocks::from_channel(
        &channel,
        scene.reflections(),
        waveform.covariance(),
        waveform.snapshots() as f64,
        geometry.noise_power(),
    )
}

/// Real `4K × 4K` FIM:
///
/// ```text
/// (2T/σ²) [ Re F11     Re F12     -Im F12 ]
///         [ Re F12^T   Re F22     -Im F22 ]
///         [ -Im F12^T  -Im F22^T   Re F22 ]
/// ```
pub fn assemble_fim(blocks: &FimBlocks) -> DMatrix<f64> {
    let k = blocks.n_targets();
    let f11 = blocks.f11_real();
    let f12 = blocks.f12_tilde();
    let f22 = blocks.f22_tilde();
    let mut out = DMatrix::zeros(4 * k, 4 * k);
    out.view_mut((0, 0), (2 * k, 2 * k)).copy_from(&f11);
    out.view_mut((0, 2 * k), (2 * k, 2 * k)).copy_from(&f12);
    out.view_mut((2 * k, 0), (2 * k, 2 * k))
        .copy_from(&f12.transpose());
    out.view_mut((2 * k, 2 * k), (2 * k, 2 * k)).copy_from(&f22);
    out * blocks.scale
}
