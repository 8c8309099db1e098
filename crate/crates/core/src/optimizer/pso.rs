use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::objective::{PassObjective, TransmitBudget};
use super::project_to_feasible;
use crate::baselines::fixed_uniform_layout;
use crate::model::{PinchingLayout, PowerModel, SystemGeometry, TargetScene};
use crate::{Error, Result};

/// How particles that leave the feasible set are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintMode {
    /// Project every particle back onto the feasible set before evaluating.
    Repair,
    /// Leave particles where they are and score infeasible ones as +∞.
    Indicator,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoConfig {
    pub n_particles: usize,
    pub max_iterations: usize,
    pub inertia: f64,
    pub cognitive_coeff: f64,
    pub social_coeff: f64,
    /// Velocity clamp as a fraction of the waveguide length.
    pub velocity_clamp: f64,
    pub seed: u64,
    /// Relative improvement of the global best that resets the stall counter.
    pub stall_tolerance: f64,
    pub stall_iterations: usize,
    pub constraint_mode: ConstraintMode,
    /// Start one particle at the uniformly spaced layout.
    pub seed_uniform_layout: bool,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            n_particles: 30,
            max_iterations: 200,
            inertia: 0.729,
            cognitive_coeff: 1.49445,
            social_coeff: 1.49445,
            velocity_clamp: 0.2,
            seed: 0,
            stall_tolerance: 1e-6,
            stall_iterations: 30,
            constraint_mode: ConstraintMode::Repair,
            seed_uniform_layout: true,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if self.n_particles < 2 {
            return bad("pso needs at least 2 particles");
        }
        if !(self.inertia > 0.0 && self.inertia < 1.0) {
            return bad("pso inertia must lie in (0, 1)");
        }
        if !(self.cognitive_coeff > 0.0 && self.social_coeff > 0.0 && self.velocity_clamp > 0.0) {
            return bad("pso coefficients must be positive");
        }
        if !(self.stall_tolerance >= 0.0) {
            return bad("pso stall tolerance must be >= 0");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoOutcome {
    pub layout: PinchingLayout,
    pub objective: f64,
    /// `(iteration, global best)`; iteration 0 is the initial swarm.
    pub iteration_log: Vec<(usize, f64)>,
    pub evaluations: usize,
    pub failed_evaluations: usize,
}

struct Particle {
    position: DMatrix<f64>,
    velocity: DMatrix<f64>,
    best_position: DMatrix<f64>,
    best_value: f64,
}

/// Particle swarm minimization of `objective` over feasible layouts.
///
/// Objective errors score as +∞. `starts` seeds the first particles; the
/// rest start at projected uniform draws on `[0, L]`. Particles move
/// synchronously and the global best is reduced in particle order, so the
/// result depends only on the inputs and `config.seed`.
pub fn pso_minimize<F>(
    geometry: &SystemGeometry,
    config: &PsoConfig,
    starts: &[PinchingLayout],
    mut objective: F,
) -> Result<PsoOutcome>
where
    F: FnMut(&PinchingLayout) -> Result<f64>,
{
    config.validate()?;
    let (rows, cols) = (geometry.n_waveguides(), geometry.n_pas_per_waveguide());
    let length = geometry.waveguide_length();
    let vmax = config.velocity_clamp * length;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut evaluations = 0usize;
    let mut failed = 0usize;
    let mut last_error: Option<String> = None;
    let mut evaluate = |position: &DMatrix<f64>, objective: &mut F| -> f64 {
        let layout = match config.constraint_mode {
            ConstraintMode::Repair => PinchingLayout::from_projected(position.clone()),
            ConstraintMode::Indicator => match PinchingLayout::new(position.clone(), geometry) {
                Ok(l) => l,
                Err(_) => return f64::INFINITY,
            },
        };
        evaluations += 1;
        match objective(&layout) {
            Ok(v) if v.is_finite() => v,
            Ok(_) => {
                failed += 1;
                f64::INFINITY
            }
            Err(e) => {
                failed += 1;
                last_error = Some(alloc::format!("{e}"));
                f64::INFINITY
            }
        }
    };

    let mut swarm: Vec<Particle> = Vec::with_capacity(config.n_particles);
    let mut seeds: Vec<DMatrix<f64>> = starts.iter().map(|l| l.positions().clone()).collect();
    if config.seed_uniform_layout && geometry.n_pas_per_waveguide() >= 1 {
        seeds.push(fixed_uniform_layout(geometry).positions().clone());
    }
    for i in 0..config.n_particles {
        let raw = DMatrix::from_fn(rows, cols, |_, _| rng.random::<f64>() * length);
        let velocity =
            DMatrix::from_fn(rows, cols, |_, _| (2.0 * rng.random::<f64>() - 1.0) * vmax);
        let position = match seeds.get(i) {
            Some(p) => p.clone(),
            None => project_to_feasible(&raw, geometry)?.positions().clone(),
        };
        let value = evaluate(&position, &mut objective);
        swarm.push(Particle {
            best_position: position.clone(),
            best_value: value,
            position,
            velocity,
        });
    }

    let argmin = |swarm: &[Particle]| {
        let mut best = 0;
        for (i, p) in swarm.iter().enumerate() {
            if p.best_value < swarm[best].best_value {
                best = i;
            }
        }
        best
    };
    let mut g = argmin(&swarm);
    let mut global_position = swarm[g].best_position.clone();
    let mut global_value = swarm[g].best_value;
    let mut log = alloc::vec![(0usize, global_value)];

    let mut reference = global_value;
    let mut stalled = 0usize;
    for iteration in 1..=config.max_iterations {
        for particle in swarm.iter_mut() {
            for idx in 0..rows * cols {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let x = particle.position[idx];
                let v = config.inertia * particle.velocity[idx]
                    + config.cognitive_coeff * r1 * (particle.best_position[idx] - x)
                    + config.social_coeff * r2 * (global_position[idx] - x);
                particle.velocity[idx] = v.clamp(-vmax, vmax);
                particle.position[idx] = x + particle.velocity[idx];
            }
            if config.constraint_mode == ConstraintMode::Repair {
                particle.position = project_to_feasible(&particle.position, geometry)?
                    .positions()
                    .clone();
            }
            let value = evaluate(&particle.position, &mut objective);
            if value < particle.best_value {
                particle.best_value = value;
                particle.best_position = particle.position.clone();
            }
        }
        g = argmin(&swarm);
        if swarm[g].best_value < global_value {
            global_value = swarm[g].best_value;
            global_position = swarm[g].best_position.clone();
        }
        log.push((iteration, global_value));

        let improved = if reference.is_finite() {
            reference - global_value > config.stall_tolerance * reference.abs()
        } else {
            global_value.is_finite()
        };
        if improved {
            reference = global_value;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= config.stall_iterations {
                break;
            }
        }
    }

    if !global_value.is_finite() {
        return Err(Error::OptimizationFailed(alloc::format!(
            "all {evaluations} evaluated layouts failed ({failed} errors); last error: {}",
            last_error.as_deref().unwrap_or("none")
        )));
    }
    Ok(PsoOutcome {
        layout: PinchingLayout::new(global_position, geometry)?,
        objective: global_value,
        iteration_log: log,
        evaluations,
        failed_evaluations: failed,
    })
}

/// Stage 1: minimize `Tr(CRB)` over layouts with `R_s = (P/N) I`.
pub fn pso_optimize_positions(
    geometry: &SystemGeometry,
    power_model: &PowerModel,
    scene: &TargetScene,
    budget: &TransmitBudget,
    config: &PsoConfig,
) -> Result<PsoOutcome> {
    let waveform = budget.isotropic(geometry.n_waveguides())?;
    let objective = PassObjective::new(geometry, power_model, scene, &waveform)?;
    pso_minimize(geometry, config, &[], |layout| objective.trace(layout))
}
