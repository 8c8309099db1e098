use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::model::{PinchingLayout, SystemGeometry};
use crate::{Error, Result};

/// Pool-adjacent-violators: least-squares non-decreasing fit.
fn isotonic_fit(values: &[f64]) -> Vec<f64> {
    // (sum, count) per pooled block
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(values.len());
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (s1, c1) = blocks[blocks.len() - 1];
            let (s0, c0) = blocks[blocks.len() - 2];
            if s0 / c0 as f64 <= s1 / c1 as f64 {
                break;
            }
            blocks.pop();
            *blocks.last_mut().unwrap() = (s0 + s1, c0 + c1);
        }
    }
    let mut out = Vec::with_capacity(values.len());
    for (s, c) in blocks {
        out.extend(core::iter::repeat(s / c as f64).take(c));
    }
    out
}

/// Euclidean projection of one row onto
/// `{0 ≤ x_1, x_m − x_{m−1} ≥ Δx, x_M ≤ L}`.
///
/// Substituting `u_m = x_m − (m−1)Δx` turns the set into non-decreasing
/// sequences in `[0, L − (M−1)Δx]`; the projection there is the isotonic fit
/// clipped to the box.
pub fn project_row(row: &[f64], length: f64, spacing: f64) -> Result<Vec<f64>> {
    if row.is_empty() {
        return Ok(Vec::new());
    }
    let span = (row.len() - 1) as f64 * spacing;
    if span > length {
        return Err(Error::InvalidConfig(alloc::format!(
            "{} antennas at spacing {spacing} do not fit in {length} m",
            row.len()
        )));
    }
    let upper = length - span;
    let shifted: Vec<f64> = row
        .iter()
        .enumerate()
        .map(|(m, &x)| x - m as f64 * spacing)
        .collect();
    Ok(isotonic_fit(&shifted)
        .into_iter()
        .enumerate()
        .map(|(m, u)| (u.clamp(0.0, upper) + m as f64 * spacing).clamp(0.0, length))
        .collect())
}

/// Row-wise projection of raw positions onto the feasible set.
pub fn project_to_feasible(
    raw: &DMatrix<f64>,
    geometry: &SystemGeometry,
) -> Result<PinchingLayout> {
    if raw.shape() != (geometry.n_waveguides(), geometry.n_pas_per_waveguide()) {
        return Err(Error::DimensionMismatch(alloc::format!(
            "raw positions are {}x{}, geometry expects {}x{}",
            raw.nrows(),
            raw.ncols(),
            geometry.n_waveguides(),
            geometry.n_pas_per_waveguide()
        )));
    }
    if raw.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidLayout("non-finite raw position".into()));
    }
    let mut out = raw.clone();
    for n in 0..raw.nrows() {
        let row: Vec<f64> = raw.row(n).iter().copied().collect();
        let projected = project_row(&row, geometry.waveguide_length(), geometry.min_pa_spacing())?;
        for (m, x) in projected.into_iter().enumerate() {
            out[(n, m)] = x;
        }
    }
    Ok(PinchingLayout::from_projected(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn feasible_rows_are_fixed_points() {
        let row = [0.0, 10.0, 20.0, 30.0];
        assert_eq!(project_row(&row, 30.0, 0.3).unwrap(), row.to_vec());
    }

    #[test]
    fn collapsed_row_spreads_around_its_mean() {
        let got = project_row(&[5.0; 4], 30.0, 0.3).unwrap();
        let want = [4.55, 4.85, 5.15, 5.45];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{got:?}");
        }
    }

    #[test]
    fn clamps_to_the_box() {
        let got = project_row(&[-1.0, -1.0, 40.0], 30.0, 0.3).unwrap();
        assert_eq!(got[0], 0.0);
        assert!((got[1] - 0.3).abs() < 1e-12);
        assert_eq!(got[2], 30.0);
    }

    #[test]
    fn infeasible_spacing_is_an_error() {
        assert!(project_row(&[0.0; 4], 0.5, 0.3).is_err());
    }

    #[test]
    fn pav_pools_violators() {
        assert_eq!(isotonic_fit(&[3.0, 1.0, 2.0]), vec![2.0, 2.0, 2.0]);
        assert_eq!(
            isotonic_fit(&[1.0, 3.0, 2.0, 4.0]),
            vec![1.0, 2.5, 2.5, 4.0]
        );
    }
}
