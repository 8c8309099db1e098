//! Reference computations that share no code with the fast paths they check:
//! a Jacobian-based Fisher information, a brute-force quadratic program for
//! the layout projection, and random scenario generators.

use nalgebra::{DMatrix, DVector};
use pass_core::model::{PropagationMatrices, SystemGeometry, TargetScene};
use pass_core::{PinchingLayout, PowerModel, C64};
use rand::Rng;

pub fn polar(r: f64, phase: f64) -> C64 {
    C64::new(r * phase.cos(), r * phase.sin())
}

/// `η e^{-j2πr/λ}/r`, written out independently of the model code.
pub fn steering(wavelength: f64, element: [f64; 3], target: [f64; 2]) -> C64 {
    let dx = element[0] - target[0];
    let dy = element[1] - target[1];
    let r = (dx * dx + dy * dy + element[2] * element[2]).sqrt();
    let eta = wavelength / (4.0 * std::f64::consts::PI);
    polar(eta / r, -2.0 * std::f64::consts::PI * r / wavelength)
}

/// `H = B Φ A^T` for a fully digital array that transmits and receives on
/// the same elements.
pub fn direct_system_matrix(
    wavelength: f64,
    elements: &[[f64; 3]],
    scene: &TargetScene,
) -> DMatrix<C64> {
    let n = elements.len();
    let k = scene.n_targets();
    let a = DMatrix::from_fn(n, k, |i, j| {
        steering(wavelength, elements[i], scene.position(j))
    });
    let phi = DMatrix::from_diagonal(&DVector::from_column_slice(scene.reflections()));
    &a * phi * a.transpose()
}

/// `H = V^T B Φ A^T G` for a pinching deployment.
pub fn pass_system_matrix(
    geometry: &SystemGeometry,
    power_model: &PowerModel,
    layout: &PinchingLayout,
    scene: &TargetScene,
) -> DMatrix<C64> {
    PropagationMatrices::new(geometry, power_model, layout, scene)
        .expect("valid scenario")
        .system_matrix(scene.reflections())
}

/// Real parameter vector `[x1, y1, …, xK, yK, Re β1, …, Re βK, Im β1, …]`.
pub fn parameters(scene: &TargetScene) -> Vec<f64> {
    let mut p: Vec<f64> = scene
        .positions()
        .iter()
        .flat_map(|t| [t[0], t[1]])
        .collect();
    p.extend(scene.reflections().iter().map(|b| b.re));
    p.extend(scene.reflections().iter().map(|b| b.im));
    p
}

pub fn scene_from_parameters(p: &[f64]) -> TargetScene {
    let k = p.len() / 4;
    let positions = (0..k).map(|i| [p[2 * i], p[2 * i + 1]]).collect();
    let reflections = (0..k)
        .map(|i| C64::new(p[2 * k + i], p[3 * k + i]))
        .collect();
    TargetScene::new(positions, reflections).expect("valid scene")
}

/// `F_pq = (2T/σ²) Re Tr(∂H/∂ξ_p^H ∂H/∂ξ_q R_s)`, with the partials of the
/// system matrix taken by fourth-order central differences of step `h`.
pub fn jacobian_fim<H>(
    system: H,
    scene: &TargetScene,
    covariance: &DMatrix<C64>,
    snapshots: f64,
    noise_power: f64,
    h: f64,
) -> DMatrix<f64>
where
    H: Fn(&TargetScene) -> DMatrix<C64>,
{
    let base = parameters(scene);
    let partials: Vec<DMatrix<C64>> = (0..base.len())
        .map(|i| {
            let at = |d: f64| {
                let mut p = base.clone();
                p[i] += d;
                system(&scene_from_parameters(&p))
            };
            (at(-2.0 * h) - at(-h) * C64::new(8.0, 0.0) + at(h) * C64::new(8.0, 0.0) - at(2.0 * h))
                / C64::new(12.0 * h, 0.0)
        })
        .collect();
    let n = base.len();
    let scale = 2.0 * snapshots / noise_power;
    DMatrix::from_fn(n, n, |p, q| {
        scale
            * (partials[p].adjoint() * &partials[q] * covariance)
                .trace()
                .re
    })
}

/// Euclidean projection of `row` onto
/// `{x : 0 ≤ x_1, x_{m+1} − x_m ≥ spacing, x_M ≤ length}` by enumerating
/// every active set of the `M + 1` inequalities.
pub fn qp_project_row(row: &[f64], length: f64, spacing: f64) -> Vec<f64> {
    let m = row.len();
    // Constraints as a_i^T x ≥ b_i.
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut e = vec![0.0; m];
    e[0] = 1.0;
    a.push(e);
    b.push(0.0);
    for i in 0..m.saturating_sub(1) {
        let mut e = vec![0.0; m];
        e[i] = -1.0;
        e[i + 1] = 1.0;
        a.push(e);
        b.push(spacing);
    }
    let mut e = vec![0.0; m];
    e[m - 1] = -1.0;
    a.push(e);
    b.push(-length);

    let nc = a.len();
    let y = DVector::from_column_slice(row);
    let feasible = |x: &DVector<f64>| {
        (0..nc).all(|i| (0..m).map(|j| a[i][j] * x[j]).sum::<f64>() >= b[i] - 1e-9)
    };
    let mut best: Option<(f64, DVector<f64>)> = None;
    for mask in 0u32..(1 << nc) {
        let active: Vec<usize> = (0..nc).filter(|i| mask & (1 << i) != 0).collect();
        let s = active.len();
        let mut kkt = DMatrix::zeros(m + s, m + s);
        let mut rhs = DVector::zeros(m + s);
        for j in 0..m {
            kkt[(j, j)] = 1.0;
            rhs[j] = y[j];
        }
        for (r, &i) in active.iter().enumerate() {
            for j in 0..m {
                kkt[(j, m + r)] = a[i][j];
                kkt[(m + r, j)] = a[i][j];
            }
            rhs[m + r] = b[i];
        }
        let lu = kkt.full_piv_lu();
        if !lu.is_invertible() {
            continue;
        }
        let Some(sol) = lu.solve(&rhs) else { continue };
        let x = sol.rows(0, m).into_owned();
        if !feasible(&x) {
            continue;
        }
        let cost = (&x - &y).norm_squared();
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, x));
        }
    }
    best.expect("feasible set is non-empty")
        .1
        .iter()
        .copied()
        .collect()
}

/// `K` targets uniform on `[lo, hi]²` with unit-modulus random-phase
/// reflections and at least `min_separation` between targets.
pub fn random_scene<R: Rng>(
    rng: &mut R,
    k: usize,
    lo: f64,
    hi: f64,
    min_separation: f64,
) -> TargetScene {
    let mut positions: Vec<[f64; 2]> = Vec::with_capacity(k);
    while positions.len() < k {
        let p = [rng.random_range(lo..hi), rng.random_range(lo..hi)];
        if positions
            .iter()
            .all(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt() >= min_separation)
        {
            positions.push(p);
        }
    }
    let reflections = (0..k)
        .map(|_| polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    TargetScene::new(positions, reflections).expect("valid scene")
}

/// Random feasible layout: sorted uniform draws pushed apart to the minimum
/// spacing.
pub fn random_layout<R: Rng>(rng: &mut R, geometry: &SystemGeometry) -> PinchingLayout {
    let n = geometry.n_waveguides();
    let m = geometry.n_pas_per_waveguide();
    let spacing = geometry.min_pa_spacing();
    let free = geometry.waveguide_length() - (m as f64 - 1.0) * spacing;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut u: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..free)).collect();
            u.sort_by(f64::total_cmp);
            u.iter()
                .enumerate()
                .map(|(i, v)| v + i as f64 * spacing)
                .collect()
        })
        .collect();
    PinchingLayout::from_rows(&rows, geometry).expect("feasible by construction")
}

/// Random positive semidefinite covariance of the given rank and trace.
pub fn random_covariance<R: Rng>(rng: &mut R, n: usize, rank: usize, trace: f64) -> DMatrix<C64> {
    let w = DMatrix::from_fn(n, rank, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let r = &w * w.adjoint();
    let t = r.trace().re;
    let r = r * C64::new(trace / t, 0.0);
    (&r + r.adjoint()) * C64::new(0.5, 0.0)
}

pub fn relative_frobenius(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm()
}

/// Reference deployment cut down to `n` waveguides of `m` antennas.
pub fn geometry(n: usize, m: usize) -> SystemGeometry {
    let mut p = pass_core::GeometryParams {
        n_waveguides: n,
        n_pas_per_waveguide: m,
        ..Default::default()
    };
    p.tx_y.truncate(n);
    p.tx_z.truncate(n);
    p.rx_y.truncate(n);
    p.rx_z.truncate(n);
    SystemGeometry::new(p).expect("valid geometry")
}
