use std::time::Instant;

use pass_core::{Axis, TargetScene, C64};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Stage2Config};
use crate::error::LabError;
use crate::method::{run_method, Method};
use crate::results::ResultRow;
use crate::scenes::{derive_seed, sample_scenes};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Record wall-clock time per row. Off by default so that repeated runs
    /// produce identical tables.
    pub timing: bool,
}

fn stage2_enabled(flags: &Stage2Config, method: Method) -> bool {
    match method {
        Method::PassPso => flags.pass_pso,
        Method::PassFixed => flags.pass_fixed,
        Method::Mimo { .. } => flags.mimo,
    }
}

fn status_text(e: &pass_core::Error) -> String {
    format!("failed: {e}").replace(['\n', '\r'], " ")
}

#[allow(clippy::too_many_arguments)]
fn evaluate(
    config: &ExperimentConfig,
    resolved: &crate::Resolved,
    method: Method,
    stage2: bool,
    scene_id: usize,
    pso_seed: u64,
    design: &TargetScene,
    truth: &TargetScene,
    options: RunOptions,
) -> ResultRow {
    let start = Instant::now();
    let pso = config.pso.to_core(pso_seed);
    let outcome = run_method(method, resolved, &config.upa, &pso, stage2, design, truth);
    let wall_s = options.timing.then(|| start.elapsed().as_secs_f64());
    let mut row = ResultRow {
        method: method.to_string(),
        scene_id,
        seed: config.seed,
        axis: None,
        offset_m: None,
        peb_m: None,
        stage1_trace: None,
        stage2_trace: None,
        wall_s,
        status: String::new(),
    };
    match outcome {
        Ok(o) => {
            row.peb_m = Some(o.report.peb_average);
            row.stage1_trace = Some(o.stage1_trace);
            row.stage2_trace = o.stage2_trace;
            row.status = if o.stage2_converged {
                "ok".into()
            } else {
                "ok-stage2-capped".into()
            };
        }
        Err(e) => row.status = status_text(&e),
    }
    row
}

/// Average PEB of every method on independently sampled scenes. Rows are
/// ordered by scene, then by method as listed in the configuration.
pub fn run_cdf_experiment(
    config: &ExperimentConfig,
    options: RunOptions,
) -> Result<Vec<ResultRow>, LabError> {
    let resolved = config.resolve()?;
    let scenes = sample_scenes(&config.scenes, config.seed);
    let rows: Vec<Vec<ResultRow>> = scenes
        .par_iter()
        .enumerate()
        .map(|(id, scene)| {
            let pso_seed = derive_seed(config.seed, id as u64);
            resolved
                .methods
                .iter()
                .map(|&m| {
                    let stage2 = stage2_enabled(&config.stage2, m);
                    evaluate(
                        config, &resolved, m, stage2, id, pso_seed, scene, scene, options,
                    )
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// Designs against the targets shifted by each offset along each axis and
/// reports the bound at the true targets. Every design uses the same swarm
/// seed, so the offset is the only thing that changes.
pub fn run_robustness_experiment(
    config: &ExperimentConfig,
    options: RunOptions,
) -> Result<Vec<ResultRow>, LabError> {
    let resolved = config.resolve()?;
    let r = &config.robustness;
    let truth = TargetScene::new(
        r.targets_m.clone(),
        vec![C64::new(1.0, 0.0); r.targets_m.len()],
    )
    .map_err(|e| LabError::Config(format!("robustness.targets_m: {e}")))?;
    let pso_seed = derive_seed(config.seed, 0);
    let mut jobs = Vec::new();
    for &axis in &r.axes {
        for &method in &resolved.methods {
            for &offset in &r.offsets_m {
                jobs.push((axis, method, offset));
            }
        }
    }
    let rows = jobs
        .par_iter()
        .map(|&(axis, method, offset)| {
            let core_axis = axis.to_core();
            let design = truth.shifted(core_axis, offset);
            let stage2 = stage2_enabled(&r.stage2, method);
            let mut row = evaluate(
                config, &resolved, method, stage2, 0, pso_seed, &design, &truth, options,
            );
            row.axis = Some(match core_axis {
                Axis::X => "x",
                Axis::Y => "y",
            });
            row.offset_m = Some(offset);
            row
        })
        .collect();
    Ok(rows)
}
