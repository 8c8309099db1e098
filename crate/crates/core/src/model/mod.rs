//! Deterministic propagation model: geometry, antenna layout, targets,
//! steering vectors and the stacked transmit/receive matrices.

mod echo;
mod geometry;
mod layout;
mod power;
mod propagation;
mod scene;

pub use echo::{echo_mean, simulate_echo};
pub use geometry::{GeometryParams, SystemGeometry, SPEED_OF_LIGHT};
pub use layout::{PinchingLayout, LAYOUT_TOLERANCE};
pub use power::{PowerModel, PowerModelKind, RADIATED_FRACTION};
pub use propagation::{
    assemble_rx, assemble_tx, element_distance, in_waveguide_vector, rx_distance, rx_phase_vector,
    rx_steering, spherical_steering, system_matrix, tx_distance, tx_steering, PropagationMatrices,
    RxMatrices, TxMatrices,
};
pub use scene::TargetScene;
