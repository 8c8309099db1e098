use alloc::format;
use alloc::vec::Vec;
use nalgebra::DMatrix;

use super::SystemGeometry;
use crate::{Error, Result};

/// Absolute slack (m) allowed on the ordering and box constraints; floating
/// point cannot represent `x + Δx - x == Δx` exactly.
pub const LAYOUT_TOLERANCE: f64 = 1e-9;

/// Antenna x-coordinates, one row per waveguide. Rows are ordered with at
/// least the minimum spacing and stay inside `[0, L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PinchingLayout {
    positions: DMatrix<f64>,
}

impl PinchingLayout {
    pub fn new(positions: DMatrix<f64>, geometry: &SystemGeometry) -> Result<Self> {
        let layout = Self { positions };
        layout.validate(geometry)?;
        Ok(layout)
    }

    pub fn from_rows(rows: &[Vec<f64>], geometry: &SystemGeometry) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidLayout("ragged rows".into()));
        }
        let m = DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]);
        Self::new(m, geometry)
    }

    pub(crate) fn from_projected(positions: DMatrix<f64>) -> Self {
        Self { positions }
    }

    pub fn validate(&self, geometry: &SystemGeometry) -> Result<()> {
        let (n, m) = self.positions.shape();
        if n != geometry.n_waveguides() || m != geometry.n_pas_per_waveguide() {
            return Err(Error::InvalidLayout(format!(
                "layout is {n}x{m}, geometry expects {}x{}",
                geometry.n_waveguides(),
                geometry.n_pas_per_waveguide()
            )));
        }
        let length = geometry.waveguide_length();
        let spacing = geometry.min_pa_spacing();
        for i in 0..n {
            for j in 0..m {
                let x = self.positions[(i, j)];
                if !x.is_finite() || x < -LAYOUT_TOLERANCE || x > length + LAYOUT_TOLERANCE {
                    return Err(Error::InvalidLayout(format!(
                        "x[{i},{j}] = {x} outside [0, {length}]"
                    )));
                }
                if j > 0 && x - self.positions[(i, j - 1)] < spacing - LAYOUT_TOLERANCE {
                    return Err(Error::InvalidLayout(format!(
                        "x[{i},{j}] - x[{i},{}] = {} < {spacing}",
                        j - 1,
                        x - self.positions[(i, j - 1)]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn positions(&self) -> &DMatrix<f64> {
        &self.positions
    }

    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.positions[(n, m)]
    }

    pub fn n_waveguides(&self) -> usize {
        self.positions.nrows()
    }

    pub fn n_pas_per_waveguide(&self) -> usize {
        self.positions.ncols()
    }

    pub fn row(&self, n: usize) -> Vec<f64> {
        self.positions.row(n).iter().copied().collect()
    }
}
