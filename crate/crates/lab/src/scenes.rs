use pass_core::{TargetScene, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::SceneConfig;

/// Independent scenes: targets uniform on the region with a minimum pairwise
/// separation, unit-modulus reflections with uniform phase.
pub fn sample_scenes(config: &SceneConfig, seed: u64) -> Vec<TargetScene> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [lo, hi] = config.region_m;
    (0..config.n_scenes)
        .map(|_| {
            let mut positions: Vec<[f64; 2]> = Vec::with_capacity(config.n_targets);
            while positions.len() < config.n_targets {
                let p = [rng.random_range(lo..=hi), rng.random_range(lo..=hi)];
                let clear = positions
                    .iter()
                    .all(|q| (p[0] - q[0]).hypot(p[1] - q[1]) >= config.min_separation_m);
                if clear {
                    positions.push(p);
                }
            }
            let reflections = (0..config.n_targets)
                .map(|_| {
                    let phase = rng.random_range(0.0..std::f64::consts::TAU);
                    C64::new(phase.cos(), phase.sin())
                })
                .collect();
            TargetScene::new(positions, reflections).expect("sampled scene is valid")
        })
        .collect()
}

/// Per-scene seed for the swarm, decorrelated from the scene sampler.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_scenes() {
        let c = SceneConfig {
            n_scenes: 5,
            ..SceneConfig::default()
        };
        assert_eq!(sample_scenes(&c, 3), sample_scenes(&c, 3));
        assert_ne!(sample_scenes(&c, 3), sample_scenes(&c, 4));
    }

    #[test]
    fn scenes_respect_region_separation_and_unit_reflections() {
        let c = SceneConfig {
            n_scenes: 500,
            n_targets: 3,
            ..SceneConfig::default()
        };
        for s in sample_scenes(&c, 1) {
            for (k, p) in s.positions().iter().enumerate() {
                assert!((0.0..=30.0).contains(&p[0]) && (0.0..=30.0).contains(&p[1]));
                assert!((s.reflections()[k].norm_sqr() - 1.0).abs() < 1e-12);
                for q in &s.positions()[k + 1..] {
                    assert!((p[0] - q[0]).hypot(p[1] - q[1]) >= 1.0);
                }
            }
        }
    }

    #[test]
    fn mean_abscissa_is_centered() {
        let c = SceneConfig {
            n_scenes: 10_000,
            n_targets: 1,
            ..SceneConfig::default()
        };
        let mean = sample_scenes(&c, 2)
            .iter()
            .map(|s| s.position(0)[0])
            .sum::<f64>()
            / 1e4;
        assert!((mean - 15.0).abs() < 0.5, "{mean}");
    }
}
