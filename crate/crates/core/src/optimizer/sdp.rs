//! Stage 2: `min Tr(CRB(R_s))` over `{R_s ⪰ 0, Tr R_s = P}`.
//!
//! This is the convex program `min Tr(U⁻¹)` subject to
//! `[[Re F11 − U, F̃12], [F̃12^T, F̃22]] ⪰ 0`: at the optimum `U` is the Schur
//! complement, so the solver works directly on `Tr(E^T F(R)⁻¹ E)`, with `F`
//! the real FIM (affine in `R_s`) and `E` selecting the position block.
//!
//! The FIM only sees `R_s` through `D^H R_s D` with `D = conj([C, Ċ])`, so
//! the search runs over Hermitian `S` on an orthonormal basis `Q` of
//! `range(D)`, `R_s = P·Q S Q^H`, `Tr S = 1`. Each outer step minimizes
//! `t·f(S)/f(S₀) − log det S` by equality-constrained Newton with
//! backtracking; `t` grows until the duality-gap bound `r/t` is below the
//! tolerance.

use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector};

use super::objective::TransmitBudget;
use crate::fim::CrbReport;
use crate::fim::{
    assemble_fim, crb_matrix, schur_complement, FimBlocks, SensingChannel, WaveformSpec,
};
use crate::linalg::{
    c64, hermitize, real_embedding, symmetric_eigenvalues, symmetrize, trace_c, C64,
};
use crate::model::{PinchingLayout, PowerModel, SystemGeometry, TargetScene};
use crate::{Error, Result};

const CENTERING_STEPS: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct SdpConfig {
    /// Relative duality-gap target.
    pub tolerance: f64,
    /// Total Newton steps across all barrier stages.
    pub max_iterations: usize,
    /// Factor by which the barrier weight grows per stage.
    pub barrier_growth: f64,
    /// Singular values of `D` below this fraction of the largest are dropped.
    pub rank_tolerance: f64,
}

impl Default for SdpConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 500,
            barrier_growth: 20.0,
            rank_tolerance: 1e-10,
        }
    }
}

impl SdpConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || !(self.barrier_growth > 1.0) || self.max_iterations == 0 {
            return Err(Error::InvalidConfig(
                "sdp tolerance must be > 0, barrier growth > 1 and max_iterations >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpOutcome {
    pub waveform: WaveformSpec,
    /// Auxiliary matrix `U` (the unscaled Schur complement at the solution).
    pub auxiliary: DMatrix<f64>,
    pub report: CrbReport,
    pub isotropic_trace: f64,
    pub newton_steps: usize,
    /// Smallest eigenvalue of the LMI matrix at `(U, R_s)`, relative to its
    /// largest.
    pub lmi_min_eigenvalue: f64,
}

/// `[[Re F11 − U, F̃12], [F̃12^T, F̃22]]`.
pub fn lmi_matrix(blocks: &FimBlocks, auxiliary: &DMatrix<f64>) -> DMatrix<f64> {
    let k2 = 2 * blocks.n_targets();
    let f12 = blocks.f12_tilde();
    let mut m = DMatrix::zeros(2 * k2, 2 * k2);
    m.view_mut((0, 0), (k2, k2))
        .copy_from(&(blocks.f11_real() - auxiliary));
    m.view_mut((0, k2), (k2, k2)).copy_from(&f12);
    m.view_mut((k2, 0), (k2, k2)).copy_from(&f12.transpose());
    m.view_mut((k2, k2), (k2, k2))
        .copy_from(&blocks.f22_tilde());
    m
}

/// Hermitian basis of `r × r` matrices: diagonal units, then symmetric and
/// antisymmetric-imaginary off-diagonal pairs.
fn hermitian_basis(r: usize) -> Vec<DMatrix<C64>> {
    let mut basis = Vec::with_capacity(r * r);
    for i in 0..r {
        let mut e = DMatrix::zeros(r, r);
        e[(i, i)] = c64(1.0, 0.0);
        basis.push(e);
    }
    for i in 0..r {
        for j in (i + 1)..r {
            let mut e = DMatrix::zeros(r, r);
            e[(i, j)] = c64(1.0, 0.0);
            e[(j, i)] = c64(1.0, 0.0);
            basis.push(e);
            let mut e = DMatrix::zeros(r, r);
            e[(i, j)] = c64(0.0, 1.0);
            e[(j, i)] = c64(0.0, -1.0);
            basis.push(e);
        }
    }
    basis
}

/// Orthonormal basis of the subspace the FIM can see.
fn visible_subspace(channel: &SensingChannel, rank_tolerance: f64) -> DMatrix<C64> {
    let n = channel.n_transmit();
    let k = channel.n_targets();
    if 3 * k >= n {
        return DMatrix::identity(n, n);
    }
    let mut d = DMatrix::zeros(n, 3 * k);
    d.view_mut((0, 0), (n, k))
        .copy_from(&channel.transmit.value.conjugate());
    d.view_mut((0, k), (n, 2 * k))
        .copy_from(&channel.transmit.derivative.conjugate());
    let svd = d.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rank_tolerance * smax)
        .collect();
    DMatrix::from_fn(n, keep.len(), |i, j| u[(i, keep[j])])
}

struct Problem {
    /// `F(E_p)` for each basis element, normalized.
    fim_basis: Vec<DMatrix<f64>>,
    basis: Vec<DMatrix<C64>>,
    positions: usize,
    r: usize,
}

struct Eval {
    value: f64,
    fim_inv: DMatrix<f64>,
}

impl Problem {
    fn fim(&self, s: &DVector<f64>) -> DMatrix<f64> {
        let mut f = DMatrix::zeros(self.fim_basis[0].nrows(), self.fim_basis[0].ncols());
        for (p, fp) in self.fim_basis.iter().enumerate() {
            if s[p] != 0.0 {
                f += fp * s[p];
            }
        }
        f
    }

    fn covariance(&self, s: &DVector<f64>) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.r, self.r);
        for (p, e) in self.basis.iter().enumerate() {
            m += e * c64(s[p], 0.0);
        }
        m
    }

    /// `Tr(E^T F⁻¹ E)`, or `None` outside the domain.
    fn objective(&self, s: &DVector<f64>) -> Option<Eval> {
        let f = symmetrize(&self.fim(s));
        let chol = Cholesky::new(f)?;
        let fim_inv = chol.inverse();
        let value = (0..self.positions).map(|i| fim_inv[(i, i)]).sum();
        Some(Eval { value, fim_inv })
    }

    /// `-log det S` and `S⁻¹`, or `None` when `S` is not positive definite.
    /// Definiteness is decided on the real embedding, whose determinant is
    /// `det(S)²`.
    fn barrier(&self, s: &DVector<f64>) -> Option<(f64, DMatrix<C64>)> {
        let chol = Cholesky::new(real_embedding(&self.covariance(s)))?;
        let r = self.r;
        let logdet: f64 = (0..2 * r).map(|i| libm::log(chol.l_dirty()[(i, i)])).sum();
        let inv = chol.inverse();
        let s_inv = DMatrix::from_fn(r, r, |i, j| c64(inv[(i, j)], inv[(i + r, j)]));
        Some((-logdet, s_inv))
    }
}

/// Stage-2 solve on an arbitrary channel. Returns the isotropic covariance
/// when it cannot be improved.
pub fn optimize_covariance(
    channel: &SensingChannel,
    reflections: &[C64],
    budget: &TransmitBudget,
    noise_power: f64,
    config: &SdpConfig,
) -> Result<SdpOutcome> {
    config.validate()?;
    let n = channel.n_transmit();
    let snapshots = budget.snapshots as f64;
    let power = budget.power_budget;
    let isotropic = budget.isotropic(n)?;
    let blocks_at =
        |r: &DMatrix<C64>| FimBlocks::from_channel(channel, reflections, r, snapshots, noise_power);
    let iso_blocks = blocks_at(isotropic.covariance())?;
    let iso_report = crb_matrix(&iso_blocks)?;
    let finish = |waveform: WaveformSpec, steps: usize| -> Result<SdpOutcome> {
        let blocks = blocks_at(waveform.covariance())?;
        let report = crb_matrix(&blocks)?;
        let auxiliary = schur_complement(&blocks)?;
        let lmi = lmi_matrix(&blocks, &auxiliary);
        let ev = symmetric_eigenvalues(&lmi);
        let top = ev
            .last()
            .copied()
            .unwrap_or(1.0)
            .abs()
            .max(f64::MIN_POSITIVE);
        Ok(SdpOutcome {
            waveform,
            auxiliary,
            report,
            isotropic_trace: iso_report.trace,
            newton_steps: steps,
            lmi_min_eigenvalue: ev[0] / top,
        })
    };
    if n == 1 {
        return finish(isotropic, 0);
    }

    let q = visible_subspace(channel, config.rank_tolerance);
    let r = q.ncols();
    let basis = hermitian_basis(r);
    let mut fim_basis = Vec::with_capacity(basis.len());
    for e in &basis {
        let cov = &q * e * q.adjoint() * c64(power, 0.0);
        fim_basis.push(assemble_fim(&blocks_at(&cov)?));
    }
    // Normalize so the FIM at the start has unit-scale entries.
    let mut problem = Problem {
        fim_basis,
        basis,
        positions: 2 * channel.n_targets(),
        r,
    };
    let s0 = DVector::from_fn(r * r, |p, _| if p < r { 1.0 / r as f64 } else { 0.0 });
    let scale = problem.fim(&s0).amax();
    for f in &mut problem.fim_basis {
        *f /= scale;
    }
    let start = problem.objective(&s0).ok_or(Error::UnidentifiableScene {
        min_eigenvalue: 0.0,
        condition: f64::INFINITY,
    })?;
    let f0 = start.value;

    let constraint = DVector::from_fn(r * r, |p, _| if p < r { 1.0 } else { 0.0 });
    let dim = r as f64;
    let mut t = 10.0 * dim;
    let mut s = s0.clone();
    let mut steps = 0usize;
    let mut converged = false;

    let phi = |s: &DVector<f64>, t: f64| -> Option<f64> {
        let (b, _) = problem.barrier(s)?;
        let eval = problem.objective(s)?;
        Some(t * eval.value / f0 + b)
    };

    'outer: loop {
        // Centering.
        let mut centering = 0usize;
        loop {
            if steps >= config.max_iterations {
                break 'outer;
            }
            let eval = problem.objective(&s).expect("iterate stays in the domain");
            let (_, s_inv) = problem
                .barrier(&s)
                .expect("iterate stays positive definite");
            let m = &eval.fim_inv;
            let sel = m.columns(0, problem.positions).into_owned();
            let z = &sel * sel.transpose();

            let np = problem.basis.len();
            let zf: Vec<DMatrix<f64>> = problem.fim_basis.iter().map(|fp| &z * fp).collect();
            let mf: Vec<DMatrix<f64>> = problem.fim_basis.iter().map(|fp| m * fp).collect();
            let se: Vec<DMatrix<C64>> = problem.basis.iter().map(|e| &s_inv * e).collect();

            let mut grad = DVector::zeros(np);
            let mut hess = DMatrix::zeros(np, np);
            for p in 0..np {
                grad[p] = -t / f0 * zf[p].trace() - trace_c(&se[p]).re;
                for qd in 0..=p {
                    let hf = 2.0 * zf[p].component_mul(&mf[qd].transpose()).sum();
                    let hb = se[p].component_mul(&se[qd].transpose()).sum().re;
                    hess[(p, qd)] = t / f0 * hf + hb;
                    hess[(qd, p)] = hess[(p, qd)];
                }
            }

            // Equality-constrained Newton step.
            let mut kkt = DMatrix::zeros(np + 1, np + 1);
            kkt.view_mut((0, 0), (np, np)).copy_from(&hess);
            kkt.view_mut((0, np), (np, 1)).copy_from(&constraint);
            kkt.view_mut((np, 0), (1, np))
                .copy_from(&constraint.transpose());
            let mut rhs = DVector::zeros(np + 1);
            rhs.rows_mut(0, np).copy_from(&(-&grad));
            let sol = match kkt.lu().solve(&rhs) {
                Some(x) => x,
                None => break 'outer,
            };
            let delta = sol.rows(0, np).into_owned();
            let decrement = -grad.dot(&delta);
            steps += 1;
            centering += 1;
            if !(decrement > 2e-8) || centering > CENTERING_STEPS {
                break;
            }

            let current = phi(&s, t).expect("iterate stays in the domain");
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let trial = &s + &delta * step;
                if let Some(v) = phi(&trial, t) {
                    if v <= current - 0.25 * step * decrement {
                        s = trial;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if dim / t < config.tolerance {
            converged = true;
            break;
        }
        t *= config.barrier_growth;
    }

    let mut cov = &q * problem.covariance(&s) * q.adjoint() * c64(power, 0.0);
    cov = hermitize(&cov);
    let tr = trace_c(&cov).re;
    cov *= c64(power / tr, 0.0);
    let candidate = WaveformSpec::new(cov, power, budget.snapshots)?;
    let improved = crb_matrix(&blocks_at(candidate.covariance())?)
        .map(|rep| rep.trace <= iso_report.trace)
        .unwrap_or(false);
    let best = if improved { candidate } else { isotropic };
    if !converged {
        return Err(Error::NotConverged {
            iterations: steps,
            best: alloc::boxed::Box::new(best),
        });
    }
    finish(best, steps)
}

/// Stage 2 for a pinching deployment at fixed antenna positions.
pub fn sdp_optimize_waveform(
    geometry: &SystemGeometry,
    power_model: &PowerModel,
    layout: &PinchingLayout,
    scene: &TargetScene,
    budget: &TransmitBudget,
    config: &SdpConfig,
) -> Result<WaveformSpec> {
    let channel = SensingChannel::pass(geometry, power_model, layout, scene)?;
    optimize_covariance(
        &channel,
        scene.reflections(),
        budget,
        geometry.noise_power(),
        config,
    )
    .map(|o| o.waveform)
}
