use alloc::format;
use alloc::vec::Vec;

use crate::fim::Axis;
use crate::linalg::C64;
use crate::{Error, Result};

/// Ground targets (z = 0) with their complex reflection coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetScene {
    positions: Vec<[f64; 2]>,
    reflections: Vec<C64>,
}

impl TargetScene {
    pub fn new(positions: Vec<[f64; 2]>, reflections: Vec<C64>) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::InvalidScene(
                "at least one target is required".into(),
            ));
        }
        if positions.len() != reflections.len() {
            return Err(Error::InvalidScene(format!(
                "{} positions but {} reflection coefficients",
                positions.len(),
                reflections.len()
            )));
        }
        if positions.iter().flatten().any(|v| !v.is_finite())
            || reflections
                .iter()
                .any(|b| !b.re.is_finite() || !b.im.is_finite())
        {
            return Err(Error::InvalidScene("non-finite target data".into()));
        }
        Ok(Self {
            positions,
            reflections,
        })
    }

    pub fn n_targets(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[[f64; 2]] {
        &self.positions
    }

    pub fn position(&self, k: usize) -> [f64; 2] {
        self.positions[k]
    }

    pub fn reflections(&self) -> &[C64] {
        &self.reflections
    }

    /// Every target shifted by `offset` metres along `axis`.
    pub fn shifted(&self, axis: Axis, offset: f64) -> Self {
        let mut out = self.clone();
        for p in &mut out.positions {
            p[axis.index()] += offset;
        }
        out
    }

    /// Single-target sub-scene.
    pub fn target(&self, k: usize) -> Self {
        Self {
            positions: alloc::vec![self.positions[k]],
            reflections: alloc::vec![self.reflections[k]],
        }
    }

    pub(crate) fn check_target(&self, k: usize) -> Result<()> {
        if k >= self.n_targets() {
            return Err(Error::IndexOutOfRange {
                what: "target",
                index: k,
                len: self.n_targets(),
            });
        }
        Ok(())
    }
}
