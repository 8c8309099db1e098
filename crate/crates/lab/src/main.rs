use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nalgebra::DMatrix;
use pass_core::baselines::fixed_uniform_layout;
use pass_core::model::simulate_echo;
use pass_core::{two_stage_optimize, C64};
use pass_lab::config::dbm_to_watts;
use pass_lab::scenes::{derive_seed, sample_scenes};
use pass_lab::{
    run_cdf_experiment, run_method, run_robustness_experiment, write_csv, write_manifest,
    ExperimentConfig, LabError, Manifest, ResultRow, RunOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::json;

#[derive(Debug, Parser)]
#[command(
    name = "pass-lab",
    version,
    about = "Pinching-antenna sensing experiments"
)]
struct Cli {
    /// JSON configuration; unset keys take the reference values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configuration seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for tables and manifests.
    #[arg(long, global = true, default_value = "results")]
    out: PathBuf,
    /// Comma-separated method ids, e.g. pass-pso,pass-fixed,mimo-2x2.
    #[arg(long, global = true, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Overrides the number of sampled scenes.
    #[arg(long, global = true)]
    scenes: Option<usize>,
    /// Record per-row wall time (makes tables differ between runs).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bound for every method on one sampled scene, printed as JSON.
    Crb,
    /// Two-stage design for one sampled scene, printed as JSON.
    Optimize,
    /// PEB of every method over sampled scenes; writes cdf.csv.
    Cdf,
    /// PEB versus error in the prior target positions; writes robustness.csv.
    Robustness,
    /// Noisy echoes of the evenly spaced deployment; writes echo.csv.
    Simulate,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, LabError> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(methods) = &cli.methods {
        config.methods = methods.clone();
    }
    if let Some(n) = cli.scenes {
        config.scenes.n_scenes = n;
    }
    config.resolve()?;
    Ok(config)
}

fn report_json(report: &pass_core::CrbReport) -> serde_json::Value {
    let k2 = report.crb_matrix.nrows();
    let matrix: Vec<Vec<f64>> = (0..k2)
        .map(|i| (0..k2).map(|j| report.crb_matrix[(i, j)]).collect())
        .collect();
    json!({
        "peb_average_m": report.peb_average,
        "peb_per_target_m": report.peb_per_target,
        "trace_m2": report.trace,
        "crb_m2": matrix,
    })
}

fn scene_json(scene: &pass_core::TargetScene) -> serde_json::Value {
    json!({
        "targets_m": scene.positions(),
        "reflections": scene.reflections().iter().map(|b| [b.re, b.im]).collect::<Vec<_>>(),
    })
}

fn one_scene(config: &ExperimentConfig) -> pass_core::TargetScene {
    let mut sc = config.scenes.clone();
    sc.n_scenes = 1;
    sample_scenes(&sc, config.seed).remove(0)
}

fn emit(
    out: &Path,
    name: &'static str,
    experiment: &'static str,
    config: &ExperimentConfig,
    rows: &[ResultRow],
) -> Result<(), LabError> {
    std::fs::create_dir_all(out)?;
    let table = format!("{name}.csv");
    write_csv(&out.join(&table), rows)?;
    let manifest = Manifest {
        tool: "pass-lab",
        version: env!("CARGO_PKG_VERSION"),
        experiment,
        seed: config.seed,
        rows: rows.len(),
        failed_rows: rows.iter().filter(|r| r.peb_m.is_none()).count(),
        table: &table,
        transmit_power_w: dbm_to_watts(config.waveform.transmit_power_dbm),
        noise_power_w: dbm_to_watts(config.waveform.noise_power_dbm),
        config,
    };
    write_manifest(&out.join(format!("{name}.manifest.json")), &manifest)?;
    say(&format!(
        "wrote {} rows to {}",
        rows.len(),
        out.join(&table).display()
    ))?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), LabError> {
    let config = load(cli)?;
    let options = RunOptions { timing: cli.timing };
    match cli.command {
        Command::Crb => {
            let resolved = config.resolve()?;
            let scene = one_scene(&config);
            let pso = config.pso.to_core(derive_seed(config.seed, 0));
            let mut results = Vec::new();
            for &m in &resolved.methods {
                let stage2 = match m {
                    pass_lab::Method::PassPso => config.stage2.pass_pso,
                    pass_lab::Method::PassFixed => config.stage2.pass_fixed,
                    pass_lab::Method::Mimo { .. } => config.stage2.mimo,
                };
                let o = run_method(m, &resolved, &config.upa, &pso, stage2, &scene, &scene)?;
                let mut v = report_json(&o.report);
                v["method"] = json!(m.to_string());
                results.push(v);
            }
            let doc =
                json!({ "seed": config.seed, "scene": scene_json(&scene), "results": results });
            say(&serde_json::to_string_pretty(&doc)?)?;
        }
        Command::Optimize => {
            let resolved = config.resolve()?;
            let scene = one_scene(&config);
            let pso = config.pso.to_core(derive_seed(config.seed, 0));
            let sdp = config.stage2.pass_pso.then_some(&resolved.sdp);
            let res = two_stage_optimize(
                &resolved.geometry,
                &resolved.power_model,
                &scene,
                &resolved.budget,
                &pso,
                sdp,
            )?;
            let n = res.layout.n_waveguides();
            let cov = res.waveform.covariance();
            let doc = json!({
                "seed": config.seed,
                "scene": scene_json(&scene),
                "layout_m": (0..n).map(|i| res.layout.row(i)).collect::<Vec<_>>(),
                "covariance_re_w": (0..n).map(|i| (0..n).map(|j| cov[(i, j)].re).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "covariance_im_w": (0..n).map(|i| (0..n).map(|j| cov[(i, j)].im).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "stage1_trace_m2": res.stage1_trace,
                "stage2_trace_m2": res.objective_trace,
                "stage2_converged": res.stage2_converged,
                "pso_iterations": res.iteration_log.len() - 1,
                "report": report_json(&res.report),
            });
            say(&serde_json::to_string_pretty(&doc)?)?;
        }
        Command::Cdf => {
            let rows = run_cdf_experiment(&config, options)?;
            emit(&cli.out, "cdf", "cdf", &config, &rows)?;
        }
        Command::Robustness => {
            let rows = run_robustness_experiment(&config, options)?;
            emit(&cli.out, "robustness", "robustness", &config, &rows)?;
        }
        Command::Simulate => {
            let resolved = config.resolve()?;
            let g = &resolved.geometry;
            let scene = one_scene(&config);
            let layout = fixed_uniform_layout(g);
            let n = g.n_waveguides();
            let t = config.waveform.snapshots as usize;
            let std = (resolved.budget.power_budget / n as f64 / 2.0).sqrt();
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 1));
            let mut gauss = || {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                C64::new(re * std, im * std)
            };
            let samples = DMatrix::from_fn(n, t, |_, _| gauss());
            let y = simulate_echo(
                g,
                &resolved.power_model,
                &layout,
                &scene,
                &samples,
                derive_seed(config.seed, 2),
            )?;
            std::fs::create_dir_all(&cli.out)?;
            let path = cli.out.join("echo.csv");
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["snapshot", "port", "re", "im"])?;
            for s in 0..t {
                for p in 0..n {
                    let z = y[(p, s)];
                    w.write_record([
                        s.to_string(),
                        p.to_string(),
                        z.re.to_string(),
                        z.im.to_string(),
                    ])?;
                }
            }
            w.flush()?;
            say(&format!("wrote {n}x{t} echo samples to {}", path.display()))?;
        }
    }
    Ok(())
}

fn say(text: &str) -> Result<(), LabError> {
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pass-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
