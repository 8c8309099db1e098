use alloc::format;

use nalgebra::DMatrix;

use crate::linalg::{c64, hermitian_eigenvalues, max_abs_anti_hermitian, trace_c, C64};
use crate::{Error, Result};

/// Transmit covariance `R_s` with its power budget and snapshot count.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveformSpec {
    covariance: DMatrix<C64>,
    power_budget: f64,
    snapshots: u32,
}

impl WaveformSpec {
    /// Checks that `covariance` is Hermitian PSD with trace equal to
    /// `power_budget`.
    pub fn new(covariance: DMatrix<C64>, power_budget: f64, snapshots: u32) -> Result<Self> {
        if !covariance.is_square() {
            return Err(Error::InvalidWaveform("covariance must be square".into()));
        }
        if !(power_budget.is_finite() && power_budget >= 0.0) {
            return Err(Error::InvalidWaveform(format!(
                "power budget {power_budget} must be >= 0"
            )));
        }
        if snapshots == 0 {
            return Err(Error::InvalidWaveform("need at least one snapshot".into()));
        }
        let trace = trace_c(&covariance).re;
        let scale = trace.abs().max(power_budget);
        if max_abs_anti_hermitian(&covariance) > 1e-12 * scale.max(1.0) {
            return Err(Error::InvalidWaveform("covariance is not Hermitian".into()));
        }
        if (trace - power_budget).abs() > 1e-9 * power_budget {
            return Err(Error::InvalidWaveform(format!(
                "trace {trace} differs from the power budget {power_budget}"
            )));
        }
        if covariance.nrows() > 0 {
            let min = hermitian_eigenvalues(&covariance)[0];
            if min < -1e-10 * trace {
                return Err(Error::InvalidWaveform(format!(
                    "covariance is not PSD (min eigenvalue {min:e})"
                )));
            }
        }
        Ok(Self {
            covariance,
            power_budget,
            snapshots,
        })
    }

    /// `(P/N) I_N`.
    pub fn isotropic(n: usize, power_budget: f64, snapshots: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidWaveform(
                "covariance dimension must be >= 1".into(),
            ));
        }
        let diag = c64(power_budget / n as f64, 0.0);
        Self::new(
            DMatrix::from_diagonal_element(n, n, diag),
            power_budget,
            snapshots,
        )
    }

    pub fn covariance(&self) -> &DMatrix<C64> {
        &self.covariance
    }

    pub fn power_budget(&self) -> f64 {
        self.power_budget
    }

    pub fn snapshots(&self) -> u32 {
        self.snapshots
    }

    pub fn dim(&self) -> usize {
        self.covariance.nrows()
    }

    pub fn with_snapshots(&self, snapshots: u32) -> Result<Self> {
        Self::new(self.covariance.clone(), self.power_budget, snapshots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_covariances() {
        let not_herm = DMatrix::from_row_slice(
            2,
            2,
            &[c64(1.0, 0.0), c64(0.5, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)],
        );
        assert!(WaveformSpec::new(not_herm, 2.0, 1).is_err());
        let indefinite = DMatrix::from_row_slice(
            2,
            2,
            &[c64(1.0, 0.0), c64(2.0, 0.0), c64(2.0, 0.0), c64(1.0, 0.0)],
        );
        assert!(WaveformSpec::new(indefinite, 2.0, 1).is_err());
        let wrong_trace = DMatrix::from_diagonal_element(2, 2, c64(1.0, 0.0));
        assert!(WaveformSpec::new(wrong_trace.clone(), 3.0, 1).is_err());
        assert!(WaveformSpec::new(wrong_trace, 2.0, 0).is_err());
    }

    #[test]
    fn isotropic_trace() {
        let w = WaveformSpec::isotropic(5, 0.1, 256).unwrap();
        assert!((trace_c(w.covariance()).re - 0.1).abs() < 1e-15);
        assert!(WaveformSpec::new(DMatrix::zeros(3, 3), 0.0, 1).is_ok());
    }
}
