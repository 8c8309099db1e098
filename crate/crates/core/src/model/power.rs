use alloc::vec::Vec;

use crate::{Error, Result};

/// Fraction of the feed power radiated by all antennas of one waveguide.
pub const RADIATED_FRACTION: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerModelKind {
    /// Every antenna radiates the same share.
    EqualPower,
    /// Each antenna radiates the same fraction of what reaches it, so the
    /// shares decay geometrically along the waveguide.
    ProportionalPower,
}

/// Per-antenna amplitude coefficients `α_m` with `Σ α_m² = 0.9`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerModel {
    kind: PowerModelKind,
    alphas: Vec<f64>,
}

impl PowerModel {
    pub fn new(kind: PowerModelKind, n_pas: usize) -> Result<Self> {
        if n_pas == 0 {
            return Err(Error::InvalidConfig(
                "power model needs at least one antenna".into(),
            ));
        }
        let alphas = match kind {
            PowerModelKind::EqualPower => {
                alloc::vec![libm::sqrt(RADIATED_FRACTION / n_pas as f64); n_pas]
            }
            PowerModelKind::ProportionalPower => {
                // 1 - (1 - ε)^M = 0.9
                let eps = Self::proportional_ratio(n_pas);
                (0..n_pas)
                    .map(|m| libm::sqrt(eps * libm::pow(1.0 - eps, m as f64)))
                    .collect()
            }
        };
        Ok(Self { kind, alphas })
    }

    /// The per-antenna radiated fraction `ε` of the proportional model.
    pub fn proportional_ratio(n_pas: usize) -> f64 {
        1.0 - libm::pow(1.0 - RADIATED_FRACTION, 1.0 / n_pas as f64)
    }

    pub fn kind(&self) -> PowerModelKind {
        self.kind
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_power_amplitudes() {
        let p = PowerModel::new(PowerModelKind::EqualPower, 4).unwrap();
        for &a in p.alphas() {
            assert!((a - 0.474341649).abs() < 1e-9);
        }
    }

    #[test]
    fn proportional_power_amplitudes() {
        let eps = PowerModel::proportional_ratio(4);
        assert!((eps - 0.437659).abs() < 1e-6);
        let p = PowerModel::new(PowerModelKind::ProportionalPower, 4).unwrap();
        let total: f64 = p.alphas().iter().map(|a| a * a).sum();
        assert!((total - 0.9).abs() < 1e-12);
        assert!(p.alphas().windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn both_models_radiate_ninety_percent() {
        for kind in [
            PowerModelKind::EqualPower,
            PowerModelKind::ProportionalPower,
        ] {
            for m in 1..10 {
                let p = PowerModel::new(kind, m).unwrap();
                let total: f64 = p.alphas().iter().map(|a| a * a).sum();
                assert!((total - RADIATED_FRACTION).abs() < 1e-12, "{kind:?} {m}");
                assert!(p.alphas().iter().all(|&a| a > 0.0));
            }
        }
    }
}
