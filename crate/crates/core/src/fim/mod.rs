//! Fisher information of the target parameters and the position CRB.
//!
//! Parameter order is `[θx1, θy1, …, θxK, θyK, Re β1..K, Im β1..K]`.

mod blocks;
mod channel;
mod crb;
mod derivative;
mod waveform;

pub use blocks::{assemble_fim, assemble_fim_blocks, FimBlocks};
pub use channel::{Projection, SensingChannel};
pub use crb::{crb_matrix, peb, schur_complement, CrbReport};
pub use derivative::{
    rx_steering_derivative, rx_steering_derivative_stacked, steering_derivative,
    tx_steering_derivative, tx_steering_derivative_stacked,
};
pub use waveform::WaveformSpec;

/// Ground-plane coordinate a derivative is taken along.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub const BOTH: [Axis; 2] = [Axis::X, Axis::Y];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}
