use pass_core::baselines::{fixed_uniform_layout, upa_optimized_crb, UpaConfig};
use pass_core::fim::schur_complement;
use pass_core::linalg::{hermitian_eigenvalues, symmetric_eigenvalues};
use pass_core::optimizer::{
    lmi_matrix, optimize_covariance, project_row, pso_minimize, pso_optimize_positions,
    ConstraintMode, PassObjective,
};
use pass_core::{
    crb_matrix, two_stage_optimize, FimBlocks, PinchingLayout, PowerModel, PowerModelKind,
    PsoConfig, SdpConfig, SensingChannel, TargetScene, TransmitBudget, WaveformSpec, C64,
};
use pass_testkit::{geometry, qp_project_row, random_covariance, random_layout, random_scene};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn budget() -> TransmitBudget {
    TransmitBudget {
        power_budget: 0.1,
        snapshots: 256,
    }
}

fn reference_scene() -> TargetScene {
    TargetScene::new(vec![[5.0, 7.5], [25.0, 12.5]], vec![C64::new(1.0, 0.0); 2]).unwrap()
}

proptest! {
    #[test]
    fn projection_matches_dense_qp(
        row in prop::collection::vec(-10.0f64..40.0, 1..6),
        spacing in 0.0f64..2.0,
    ) {
        let fast = project_row(&row, 30.0, spacing).unwrap();
        let oracle = qp_project_row(&row, 30.0, spacing);
        for (a, b) in fast.iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-6, "{fast:?} vs {oracle:?}");
        }
    }

    #[test]
    fn projection_is_idempotent(row in prop::collection::vec(-10.0f64..40.0, 1..8)) {
        let once = project_row(&row, 30.0, 0.3).unwrap();
        let twice = project_row(&once, 30.0, 0.3).unwrap();
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn pso_is_deterministic_and_stays_feasible() {
    let g = geometry(3, 2);
    let pm = PowerModel::new(PowerModelKind::EqualPower, 2).unwrap();
    let scene = reference_scene();
    let cfg = PsoConfig {
        max_iterations: 20,
        n_particles: 10,
        seed: 9,
        ..PsoConfig::default()
    };
    let w = budget().isotropic(3).unwrap();
    let objective = PassObjective::new(&g, &pm, &scene, &w).unwrap();
    let run = || {
        pso_minimize(&g, &cfg, &[], |layout: &PinchingLayout| {
            layout.validate(&g).unwrap();
            objective.trace(layout)
        })
        .unwrap()
    };
    let (a, b) = (run(), run());
    assert_eq!(a.layout, b.layout);
    assert_eq!(a.objective.to_bits(), b.objective.to_bits());
    assert_eq!(a.iteration_log, b.iteration_log);
    let fixed = objective.trace(&fixed_uniform_layout(&g)).unwrap();
    assert!(a.objective <= fixed);
    assert!(a.iteration_log.windows(2).all(|w| w[1].1 <= w[0].1));
}

#[test]
fn pso_indicator_mode_rejects_infeasible_particles() {
    let g = geometry(2, 3);
    let cfg = PsoConfig {
        max_iterations: 15,
        n_particles: 8,
        constraint_mode: ConstraintMode::Indicator,
        ..PsoConfig::default()
    };
    let out = pso_minimize(&g, &cfg, &[], |layout: &PinchingLayout| {
        layout.validate(&g).unwrap();
        Ok(layout.positions().iter().map(|x| (x - 12.0).powi(2)).sum())
    })
    .unwrap();
    out.layout.validate(&g).unwrap();
}

#[test]
fn pso_surfaces_total_failure() {
    let g = geometry(2, 1);
    let cfg = PsoConfig {
        max_iterations: 3,
        n_particles: 4,
        ..PsoConfig::default()
    };
    let err = pso_minimize(&g, &cfg, &[], |_: &PinchingLayout| {
        Err(pass_core::Error::OptimizationFailed("boom".into()))
    })
    .unwrap_err();
    assert!(matches!(err, pass_core::Error::OptimizationFailed(_)));
}

#[test]
fn pso_improves_on_the_uniform_layout_for_most_seeds() {
    let g = geometry(5, 4);
    let pm = PowerModel::new(PowerModelKind::EqualPower, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut wins = 0;
    for seed in 0..10 {
        let scene = random_scene(&mut rng, 2, 0.0, 30.0, 1.0);
        let w = budget().isotropic(5).unwrap();
        let fixed = PassObjective::new(&g, &pm, &scene, &w)
            .unwrap()
            .trace(&fixed_uniform_layout(&g))
            .unwrap();
        let cfg = PsoConfig {
            max_iterations: 30,
            seed,
            ..PsoConfig::default()
        };
        let out = pso_optimize_positions(&g, &pm, &scene, &budget(), &cfg).unwrap();
        if out.objective <= fixed {
            wins += 1;
        }
    }
    assert!(wins >= 9);
}

#[test]
fn sdp_dominates_isotropic_and_passes_a_random_audit() {
    let g = geometry(5, 4);
    let pm = PowerModel::new(PowerModelKind::EqualPower, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..4 {
        let layout = random_layout(&mut rng, &g);
        let scene = random_scene(&mut rng, 2, 0.0, 30.0, 1.0);
        let channel = SensingChannel::pass(&g, &pm, &layout, &scene).unwrap();
        let out = optimize_covariance(
            &channel,
            scene.reflections(),
            &budget(),
            g.noise_power(),
            &SdpConfig::default(),
        )
        .unwrap();
        assert!(hermitian_eigenvalues(out.waveform.covariance())[0] >= -1e-10 * 0.1);
        assert!(out.report.trace < out.isotropic_trace);
        for i in 0..300 {
            let rank = 1 + rng.random_range(0..5);
            let random = random_covariance(&mut rng, 5, rank, 0.1);
            let cov = if i % 2 == 0 {
                random
            } else {
                let eps = 10f64.powf(-rng.random_range(1.0..4.0));
                out.waveform.covariance() * C64::new(1.0 - eps, 0.0) + random * C64::new(eps, 0.0)
            };
            let blocks = FimBlocks::from_channel(
                &channel,
                scene.reflections(),
                &cov,
                256.0,
                g.noise_power(),
            )
            .unwrap();
            if let Ok(r) = crb_matrix(&blocks) {
                assert!(
                    r.trace >= out.report.trace * (1.0 - 1e-6),
                    "{} < {}",
                    r.trace,
                    out.report.trace
                );
            }
        }
    }
}

#[test]
fn sdp_auxiliary_matrix_satisfies_the_lmi() {
    let g = geometry(5, 4);
    let pm = PowerModel::new(PowerModelKind::ProportionalPower, 4).unwrap();
    let scene = reference_scene();
    let layout = fixed_uniform_layout(&g);
    let channel = SensingChannel::pass(&g, &pm, &layout, &scene).unwrap();
    let out = optimize_covariance(
        &channel,
        scene.reflections(),
        &budget(),
        g.noise_power(),
        &SdpConfig::default(),
    )
    .unwrap();
    let blocks = FimBlocks::from_channel(
        &channel,
        scene.reflections(),
        out.waveform.covariance(),
        256.0,
        g.noise_power(),
    )
    .unwrap();
    let lmi = lmi_matrix(&blocks, &schur_complement(&blocks).unwrap());
    let ev = symmetric_eigenvalues(&lmi);
    assert!(ev[0] >= -1e-9 * ev[ev.len() - 1]);
    assert!(out.lmi_min_eigenvalue.abs() < 1e-9);
    let u_inv_trace = out.auxiliary.clone().try_inverse().unwrap().trace() / blocks.scale;
    assert!((u_inv_trace - out.report.trace).abs() < 1e-8 * out.report.trace);
}

#[test]
fn single_chain_cannot_localize() {
    // One transmit chain and one combined receive port give a single complex
    // observation per snapshot, too little for position plus reflection.
    let scene = TargetScene::new(vec![[14.0, 13.0]], vec![C64::new(1.0, 0.0)]).unwrap();
    let cfg = UpaConfig {
        n_x: 1,
        n_y: 1,
        ..UpaConfig::default()
    };
    let err = upa_optimized_crb(&cfg, &scene, &budget(), 1e-11, &SdpConfig::default()).unwrap_err();
    assert!(matches!(err, pass_core::Error::UnidentifiableScene { .. }));
    let g = geometry(1, 2);
    let pm = PowerModel::new(PowerModelKind::EqualPower, 2).unwrap();
    let channel = SensingChannel::pass(&g, &pm, &fixed_uniform_layout(&g), &scene).unwrap();
    let err = optimize_covariance(
        &channel,
        scene.reflections(),
        &budget(),
        1e-11,
        &SdpConfig::default(),
    )
    .unwrap_err();
    assert!(matches!(err, pass_core::Error::UnidentifiableScene { .. }));
}

#[test]
fn sdp_improves_the_upa() {
    let out = upa_optimized_crb(
        &UpaConfig {
            aperture: 2.0,
            ..UpaConfig::default()
        },
        &reference_scene(),
        &budget(),
        1e-11,
        &SdpConfig::default(),
    )
    .unwrap();
    assert!(out.report.trace < out.isotropic_trace);
    assert_eq!(out.waveform.dim(), 100);
}

#[test]
fn two_stage_never_loses_to_stage_one() {
    let g = geometry(5, 4);
    let pm = PowerModel::new(PowerModelKind::EqualPower, 4).unwrap();
    let cfg = PsoConfig {
        max_iterations: 20,
        seed: 4,
        ..PsoConfig::default()
    };
    let res = two_stage_optimize(
        &g,
        &pm,
        &reference_scene(),
        &budget(),
        &cfg,
        Some(&SdpConfig::default()),
    )
    .unwrap();
    res.layout.validate(&g).unwrap();
    assert!(res.objective_trace <= res.stage1_trace);
    let iso = two_stage_optimize(&g, &pm, &reference_scene(), &budget(), &cfg, None).unwrap();
    assert_eq!(iso.objective_trace, iso.stage1_trace);
    assert_eq!(iso.waveform, WaveformSpec::isotropic(5, 0.1, 256).unwrap());
}

#[test]
fn sdp_respects_a_waveguide_swap_symmetry() {
    let g = pass_core::SystemGeometry::new(pass_core::GeometryParams {
        n_waveguides: 2,
        n_pas_per_waveguide: 2,
        tx_y: vec![4.5, 10.5],
        tx_z: vec![3.0, 3.0],
        rx_y: vec![5.5, 9.5],
        rx_z: vec![3.0, 3.0],
        ..Default::default()
    })
    .unwrap();
    let pm = PowerModel::new(PowerModelKind::EqualPower, 2).unwrap();
    let layout = PinchingLayout::from_rows(&[vec![8.0, 21.0], vec![8.0, 21.0]], &g).unwrap();
    let scenes = [
        TargetScene::new(vec![[6.0, 5.0], [6.0, 10.0]], vec![C64::new(1.0, 0.0); 2]).unwrap(),
        TargetScene::new(vec![[13.0, 3.0], [13.0, 12.0]], vec![C64::new(0.6, 0.8); 2]).unwrap(),
    ];
    for scene in scenes {
        let channel = SensingChannel::pass(&g, &pm, &layout, &scene).unwrap();
        let out = optimize_covariance(
            &channel,
            scene.reflections(),
            &budget(),
            g.noise_power(),
            &SdpConfig::default(),
        )
        .unwrap();
        assert!(out.report.trace < out.isotropic_trace);
        let r = out.waveform.covariance();
        assert!((r[(0, 0)].re - r[(1, 1)].re).abs() < 1e-6 * 0.1, "{r}");
    }
}
