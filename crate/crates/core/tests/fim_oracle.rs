use nalgebra::DMatrix;
use pass_core::baselines::{upa_channel, upa_crb, UpaConfig};
use pass_core::fim::schur_complement;
use pass_core::linalg::symmetric_eigenvalues;
use pass_core::{
    assemble_fim, assemble_fim_blocks, crb_matrix, FimBlocks, PowerModel, PowerModelKind,
    TargetScene, WaveformSpec, C64,
};
use pass_testkit::{
    direct_system_matrix, geometry, jacobian_fim, pass_system_matrix, random_covariance,
    random_layout, random_scene, relative_frobenius,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn hadamard_fim_matches_jacobian_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for kind in [
        PowerModelKind::EqualPower,
        PowerModelKind::ProportionalPower,
    ] {
        for k in [1, 2] {
            for n in [2, 3] {
                for m in [1, 2] {
                    let g = geometry(n, m);
                    let pm = PowerModel::new(kind, m).unwrap();
                    let layout = random_layout(&mut rng, &g);
                    let scene = random_scene(&mut rng, k, 0.0, 30.0, 1.0);
                    let cov = random_covariance(&mut rng, n, n, 0.1);
                    let w = WaveformSpec::new(cov.clone(), 0.1, 16).unwrap();
                    let fast =
                        assemble_fim(&assemble_fim_blocks(&g, &pm, &layout, &scene, &w).unwrap());
                    let oracle = jacobian_fim(
                        |s: &TargetScene| pass_system_matrix(&g, &pm, &layout, s),
                        &scene,
                        &cov,
                        16.0,
                        g.noise_power(),
                        1e-4,
                    );
                    let err = relative_frobenius(&fast, &oracle);
                    assert!(err < 1e-4, "{kind:?} K={k} N={n} M={m}: {err:e}");
                }
            }
        }
    }
}

#[test]
fn upa_fim_matches_jacobian_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let cfg = UpaConfig {
        n_x: 3,
        n_y: 2,
        aperture: 2.0,
        ..UpaConfig::default()
    };
    let elements = cfg.element_positions();
    for k in [1, 2] {
        let scene = random_scene(&mut rng, k, 0.0, 30.0, 1.0);
        let cov = random_covariance(&mut rng, 6, 6, 0.1);
        let channel = upa_channel(&cfg, &scene).unwrap();
        let blocks =
            FimBlocks::from_channel(&channel, scene.reflections(), &cov, 8.0, 1e-11).unwrap();
        let oracle = jacobian_fim(
            |s: &TargetScene| direct_system_matrix(cfg.wavelength, &elements, s),
            &scene,
            &cov,
            8.0,
            1e-11,
            1e-4,
        );
        assert!(relative_frobenius(&assemble_fim(&blocks), &oracle) < 1e-4);
    }
}

fn reference_blocks(rng: &mut ChaCha8Rng, snapshots: u32, noise: f64) -> (FimBlocks, DMatrix<f64>) {
    let g = geometry(5, 4).with_noise_power(noise).unwrap();
    let pm = PowerModel::new(PowerModelKind::EqualPower, 4).unwrap();
    let layout = random_layout(rng, &g);
    let scene = random_scene(rng, 2, 0.0, 30.0, 1.0);
    let w = WaveformSpec::new(random_covariance(rng, 5, 5, 0.1), 0.1, snapshots).unwrap();
    let blocks = assemble_fim_blocks(&g, &pm, &layout, &scene, &w).unwrap();
    let fim = assemble_fim(&blocks);
    (blocks, fim)
}

#[test]
fn crb_is_the_position_block_of_the_inverse_fim() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let (blocks, fim) = reference_blocks(&mut rng, 256, 1e-11);
        let crb = crb_matrix(&blocks).unwrap().crb_matrix;
        let inv = fim.clone().try_inverse().unwrap();
        let block = inv.view((0, 0), (4, 4)).into_owned();
        assert!(relative_frobenius(&crb, &block) < 1e-8);
    }
}

#[test]
fn fim_is_symmetric_positive_semidefinite() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..10 {
        let (_, fim) = reference_blocks(&mut rng, 256, 1e-11);
        assert!((&fim - fim.transpose()).amax() <= 1e-12 * fim.amax());
        let ev = symmetric_eigenvalues(&fim);
        assert!(ev[0] >= -1e-10 * ev[ev.len() - 1]);
    }
}

#[test]
fn crb_scales_with_noise_over_snapshots() {
    let g = geometry(5, 4);
    let pm = PowerModel::new(PowerModelKind::EqualPower, 4).unwrap();
    let layout = pass_core::baselines::fixed_uniform_layout(&g);
    let scene =
        TargetScene::new(vec![[5.0, 7.5], [25.0, 12.5]], vec![C64::new(1.0, 0.0); 2]).unwrap();
    let at = |t: u32, noise: f64| {
        let g = g.with_noise_power(noise).unwrap();
        let w = WaveformSpec::isotropic(5, 0.1, t).unwrap();
        crb_matrix(&assemble_fim_blocks(&g, &pm, &layout, &scene, &w).unwrap())
            .unwrap()
            .crb_matrix
    };
    let base = at(256, 1e-11);
    let more_snapshots = at(512, 1e-11);
    let more_noise = at(256, 2e-11);
    for i in 0..base.len() {
        assert!((more_snapshots[i] * 2.0 - base[i]).abs() <= 1e-12 * base[i].abs());
        assert!((more_noise[i] - 2.0 * base[i]).abs() <= 1e-12 * base[i].abs());
    }
}

#[test]
fn adding_a_waveguide_never_hurts() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let pm = PowerModel::new(PowerModelKind::EqualPower, 2).unwrap();
    for _ in 0..10 {
        let small = geometry(3, 2);
        let big = geometry(4, 2);
        let layout_big = random_layout(&mut rng, &big);
        let rows: Vec<Vec<f64>> = (0..3).map(|n| layout_big.row(n)).collect();
        let layout_small = pass_core::PinchingLayout::from_rows(&rows, &small).unwrap();
        let scene = random_scene(&mut rng, 2, 0.0, 30.0, 1.0);
        let cov = random_covariance(&mut rng, 3, 3, 0.1);
        let mut cov_big = DMatrix::zeros(4, 4);
        cov_big.view_mut((0, 0), (3, 3)).copy_from(&cov);
        cov_big[(3, 3)] = C64::new(0.02, 0.0);
        let w_small = WaveformSpec::new(cov, 0.1, 64).unwrap();
        let w_big = WaveformSpec::new(cov_big, 0.12, 64).unwrap();
        let small =
            crb_matrix(&assemble_fim_blocks(&small, &pm, &layout_small, &scene, &w_small).unwrap())
                .unwrap()
                .per_coordinate;
        let big = crb_matrix(&assemble_fim_blocks(&big, &pm, &layout_big, &scene, &w_big).unwrap())
            .unwrap()
            .per_coordinate;
        for (b, s) in big.iter().zip(&small) {
            assert!(*b <= s * (1.0 + 1e-10), "{b} > {s}");
        }
    }
}

#[test]
fn upa_mirror_symmetric_scene_gives_equal_bounds() {
    let cfg = UpaConfig::default();
    let scene = TargetScene::new(
        vec![[10.0, 12.0], [20.0, 18.0]],
        vec![C64::new(1.0, 0.0); 2],
    )
    .unwrap();
    let w = WaveformSpec::isotropic(100, 0.1, 256).unwrap();
    let report = upa_crb(&cfg, &scene, &w, 1e-11).unwrap();
    let (a, b) = (report.peb_per_target[0], report.peb_per_target[1]);
    assert!((a - b).abs() <= 1e-8 * a, "{a} vs {b}");
}

#[test]
fn upa_larger_aperture_does_not_hurt() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let w = WaveformSpec::isotropic(100, 0.1, 256).unwrap();
    for _ in 0..5 {
        let scene = random_scene(&mut rng, 2, 0.0, 30.0, 1.0);
        let traces: Vec<f64> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&a| {
                upa_crb(
                    &UpaConfig {
                        aperture: a,
                        ..UpaConfig::default()
                    },
                    &scene,
                    &w,
                    1e-11,
                )
                .unwrap()
                .trace
            })
            .collect();
        assert!(
            traces[1] <= traces[0] && traces[2] <= traces[1],
            "{traces:?}"
        );
    }
}

#[test]
fn upa_obeys_the_same_scale_laws() {
    let scene =
        TargetScene::new(vec![[5.0, 7.5], [25.0, 12.5]], vec![C64::new(1.0, 0.0); 2]).unwrap();
    let cfg = UpaConfig::default();
    let a = upa_crb(
        &cfg,
        &scene,
        &WaveformSpec::isotropic(100, 0.1, 256).unwrap(),
        1e-11,
    )
    .unwrap();
    let b = upa_crb(
        &cfg,
        &scene,
        &WaveformSpec::isotropic(100, 0.1, 512).unwrap(),
        2e-11,
    )
    .unwrap();
    for i in 0..a.crb_matrix.len() {
        assert!((a.crb_matrix[i] - b.crb_matrix[i]).abs() <= 1e-12 * a.crb_matrix[i].abs());
    }
}

#[test]
fn schur_complement_agrees_with_the_scaled_fim() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (blocks, _) = reference_blocks(&mut rng, 256, 1e-11);
    let u = schur_complement(&blocks).unwrap();
    let crb = crb_matrix(&blocks).unwrap().crb_matrix;
    let prod = &u * &crb * blocks.scale;
    assert!((prod - DMatrix::identity(4, 4)).amax() < 1e-8);
}

#[test]
fn blocks_vanish_with_the_waveform_or_the_reflections() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let g = geometry(3, 2);
    let pm = PowerModel::new(PowerModelKind::EqualPower, 2).unwrap();
    let layout = random_layout(&mut rng, &g);
    let scene = random_scene(&mut rng, 2, 0.0, 30.0, 1.0);
    let channel = pass_core::SensingChannel::pass(&g, &pm, &layout, &scene).unwrap();
    let cov = random_covariance(&mut rng, 3, 3, 0.1);

    let silent = DMatrix::<C64>::zeros(3, 3);
    let b = FimBlocks::from_channel(&channel, scene.reflections(), &silent, 16.0, 1e-11).unwrap();
    assert!(b
        .f11
        .iter()
        .chain(b.f12.iter())
        .chain(b.f22.iter())
        .all(|z| *z == C64::new(0.0, 0.0)));

    let dark = [C64::new(0.0, 0.0); 2];
    let lit = FimBlocks::from_channel(&channel, scene.reflections(), &cov, 16.0, 1e-11).unwrap();
    let b = FimBlocks::from_channel(&channel, &dark, &cov, 16.0, 1e-11).unwrap();
    assert!(b
        .f11
        .iter()
        .chain(b.f12.iter())
        .all(|z| *z == C64::new(0.0, 0.0)));
    let diff = (&b.f22 - &lit.f22)
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let size = lit.f22.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    assert!(diff <= 1e-12 * size);
}
