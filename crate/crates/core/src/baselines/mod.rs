//! Comparison systems: pinching antennas at fixed, evenly spaced positions
//! and a fully digital uniform planar array.

mod fixed;
mod upa;

pub use fixed::fixed_uniform_layout;
pub use upa::{upa_channel, upa_crb, upa_optimized_crb, UpaConfig};
