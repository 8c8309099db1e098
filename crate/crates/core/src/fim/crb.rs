use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::FimBlocks;
use crate::linalg::{spd_inverse, symmetrize};
use crate::{Error, Result};

/// Position CRB and the derived error bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct CrbReport {
    /// `2K × 2K`, ordered `[x1, y1, x2, y2, …]`, m².
    pub crb_matrix: DMatrix<f64>,
    pub per_coordinate: Vec<f64>,
    /// Sum of the diagonal, m².
    pub trace: f64,
    /// `sqrt(CRB_x,k + CRB_y,k)`, m.
    pub peb_per_target: Vec<f64>,
    /// Mean of `peb_per_target`, m.
    pub peb_average: f64,
}

impl CrbReport {
    pub fn from_matrix(crb_matrix: DMatrix<f64>) -> Self {
        let per_coordinate: Vec<f64> = crb_matrix.diagonal().iter().copied().collect();
        let trace = per_coordinate.iter().sum();
        let peb_per_target: Vec<f64> = per_coordinate
            .chunks(2)
            .map(|c| libm::sqrt(c[0] + c[1]))
            .collect();
        let peb_average = peb_per_target.iter().sum::<f64>() / peb_per_target.len() as f64;
        Self {
            crb_matrix,
            per_coordinate,
            trace,
            peb_per_target,
            peb_average,
        }
    }
}

/// Unscaled Schur complement `Re F11 − F̃12 F̃22⁻¹ F̃12^T`.
pub fn schur_complement(blocks: &FimBlocks) -> Result<DMatrix<f64>> {
    let f12 = blocks.f12_tilde();
    let f22_inv = spd_inverse(&blocks.f22_tilde())?;
    Ok(symmetrize(
        &(blocks.f11_real() - &f12 * f22_inv * f12.transpose()),
    ))
}

/// `CRB(θ) = (σ²/2T) (Re F11 − F̃12 F̃22⁻¹ F̃12^T)⁻¹`, the position block of
/// the inverse FIM.
pub fn crb_matrix(blocks: &FimBlocks) -> Result<CrbReport> {
    if !(blocks.noise_power > 0.0) || !(blocks.snapshots > 0.0) {
        return Err(Error::InvalidGeometry(
            "the CRB needs a positive noise power and snapshot count".into(),
        ));
    }
    let schur = schur_complement(blocks)?;
    let crb = symmetrize(&(spd_inverse(&schur)? / blocks.scale));
    Ok(CrbReport::from_matrix(crb))
}

/// Average position error bound of a report.
pub fn peb(report: &CrbReport) -> f64 {
    report.peb_average
}
