//! Signal model, Fisher information and Cramér-Rao bound machinery for
//! pinching-antenna (PASS) sensing with leaky-coaxial-cable reception, plus
//! the two-stage optimizer (swarm search over antenna positions, convex
//! waveform-covariance design) and the comparison baselines.
//!
//! The crate is `no_std` and only needs `alloc`; file formats, experiment
//! drivers and the command line live in `pass-lab`.

#![no_std]
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod baselines;
mod error;
pub mod fim;
pub mod linalg;
pub mod model;
pub mod optimizer;

pub use error::{Error, Result};
pub use fim::{
    assemble_fim, assemble_fim_blocks, crb_matrix, peb, Axis, CrbReport, FimBlocks, SensingChannel,
    WaveformSpec,
};
pub use linalg::C64;
pub use model::{
    GeometryParams, PinchingLayout, PowerModel, PowerModelKind, PropagationMatrices,
    SystemGeometry, TargetScene,
};
pub use optimizer::{
    project_to_feasible, pso_optimize_positions, sdp_optimize_waveform, two_stage_optimize,
    OptimizationResult, PsoConfig, SdpConfig, TransmitBudget,
};
