//! Two-stage design: swarm search over antenna positions with an isotropic
//! waveform, then convex covariance design at the chosen positions.

mod objective;
mod projection;
mod pso;
mod sdp;
mod two_stage;

pub use objective::{PassObjective, TransmitBudget};
pub use projection::{project_row, project_to_feasible};
pub use pso::{pso_minimize, pso_optimize_positions, ConstraintMode, PsoConfig, PsoOutcome};
pub use sdp::{lmi_matrix, optimize_covariance, sdp_optimize_waveform, SdpConfig, SdpOutcome};
pub use two_stage::{two_stage_optimize, OptimizationResult};
