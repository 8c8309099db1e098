use nalgebra::DMatrix;

use crate::model::{PinchingLayout, SystemGeometry};

/// `x_{n,m} = (m−1)L/(M_t−1)` on every waveguide; a single antenna sits at
/// `L/2`.
pub fn fixed_uniform_layout(geometry: &SystemGeometry) -> PinchingLayout {
    let n = geometry.n_waveguides();
    let m = geometry.n_pas_per_waveguide();
    let length = geometry.waveguide_length();
    let positions = DMatrix::from_fn(n, m, |_, j| {
        if m == 1 {
            length / 2.0
        } else {
            j as f64 * length / (m - 1) as f64
        }
    });
    PinchingLayout::from_projected(positions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GeometryParams;

    fn geometry(m: usize) -> SystemGeometry {
        SystemGeometry::new(GeometryParams {
            n_pas_per_waveguide: m,
            ..GeometryParams::default()
        })
        .unwrap()
    }

    #[test]
    fn four_antennas_on_thirty_metres() {
        let g = geometry(4);
        let layout = fixed_uniform_layout(&g);
        for n in 0..g.n_waveguides() {
            assert_eq!(layout.row(n), alloc::vec![0.0, 10.0, 20.0, 30.0]);
        }
        layout.validate(&g).unwrap();
    }

    #[test]
    fn endpoints_and_midpoint() {
        assert_eq!(
            fixed_uniform_layout(&geometry(2)).row(0),
            alloc::vec![0.0, 30.0]
        );
        assert_eq!(fixed_uniform_layout(&geometry(1)).row(0), alloc::vec![15.0]);
    }

    #[test]
    fn reference_layout_is_feasible() {
        let g = SystemGeometry::reference();
        fixed_uniform_layout(&g).validate(&g).unwrap();
    }
}
