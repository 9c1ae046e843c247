//! ADMM solver for the non-negative ℓ2+ℓ1 coding problem.
//!
//! Minimizes ‖y − Xc‖² + α‖c‖² + β·1ᵀc subject to c ≥ 0 by splitting c from
//! a constrained copy z: a closed-form ridge c-update solved against a cached
//! factorization, an entrywise projection z-update, and dual ascent on the
//! multiplier δ. The same skeleton with a soft-threshold z-update solves the
//! ℓ1 (lasso) problem used by the sparse baseline coder.
//!
//! The factorization depends only on (X, α, ρ), so one precompute serves
//! every query and every β value. For N > D it factors the D×D Woodbury
//! form instead of the N×N Gram matrix.

use std::path::Path;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::Error;
use crate::Result;

/// Knobs of the ADMM iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// ℓ2 (collaborative) weight α ≥ 0.
    pub alpha: f64,
    /// ℓ1 (sparsity) weight β ≥ 0.
    pub beta: f64,
    /// Augmented-Lagrangian penalty ρ > 0.
    pub rho: f64,
    /// Convergence tolerance on all three residual norms. 0 disables early
    /// stopping so the solver always runs `max_iter` iterations (used to
    /// record full-length convergence curves).
    pub tol: f64,
    /// Iteration cap T ≥ 1.
    pub max_iter: usize,
}

impl Default for SolverConfig {
    /// α=β=0.01 with the standard iteration settings ρ=10, Tol=0.001, T=20.
    fn default() -> Self {
        Self {
            alpha: 0.01,
            beta: 0.01,
            rho: 10.0,
            tol: 1e-3,
            max_iter: 20,
        }
    }
}

impl SolverConfig {
    /// Checks field ranges: α, β ≥ 0; ρ > 0; tol ≥ 0; max_iter ≥ 1.
    pub fn validate(&self) -> Result<()> {
        let ok = self.alpha.is_finite()
            && self.alpha >= 0.0
            && self.beta.is_finite()
            && self.beta >= 0.0
            && self.rho.is_finite()
            && self.rho > 0.0
            && self.tol.is_finite()
            && self.tol >= 0.0
            && self.max_iter >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("{self:?}")))
        }
    }

    /// Same iteration settings with different regularization weights.
    pub fn with_weights(&self, alpha: f64, beta: f64) -> Self {
        Self {
            alpha,
            beta,
            ..self.clone()
        }
    }
}

/// Which matrix the cached factorization holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GramMode {
    /// N×N factorization of XᵀX + ((2α+ρ)/2)·I.
    Direct,
    /// D×D factorization of I + (2/(2α+ρ))·XXᵀ, applied through the
    /// Woodbury identity; preferable when N > D.
    Woodbury,
}

/// Cholesky factorization of the regularized Gram matrix, reusable across
/// queries and across β values at fixed (X, α, ρ).
#[derive(Debug, Clone)]
pub struct PrecomputedGram {
    mode: GramMode,
    factor: Cholesky<f64, Dyn>,
    /// s = 2/(2α+ρ), the inverse of the ridge shift τ = (2α+ρ)/2.
    scale: f64,
    alpha: f64,
    rho: f64,
    dim: usize,
    n: usize,
}

impl PrecomputedGram {
    /// The factored form in use.
    pub fn mode(&self) -> GramMode {
        self.mode
    }

    /// ℓ2 weight the factorization was built with.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Penalty ρ the factorization was built with.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Lower-triangular Cholesky factor of the stored matrix.
    pub fn factor_l(&self) -> DMatrix<f64> {
        self.factor.l()
    }

    /// Applies (XᵀX + ((2α+ρ)/2)·I)^{-1} to `rhs` via two triangular solves;
    /// in Woodbury mode this routes through the D×D factor as
    /// s·rhs − s²·Xᵀ(I + s·XXᵀ)^{-1}X·rhs.
    pub fn apply_inverse(&self, x: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
        match self.mode {
            GramMode::Direct => self.factor.solve(rhs),
            GramMode::Woodbury => {
                let inner = self.factor.solve(&(x * rhs));
                rhs * self.scale - x.tr_mul(&inner) * (self.scale * self.scale)
            }
        }
    }

    fn check_matches(&self, x: &DMatrix<f64>, alpha: f64, rho: f64) -> Result<()> {
        if self.dim != x.nrows() || self.n != x.ncols() {
            return Err(Error::GramMismatch(format!(
                "factored for a {}x{} dictionary, applied to {}x{}",
                self.dim,
                self.n,
                x.nrows(),
                x.ncols()
            )));
        }
        if self.alpha != alpha || self.rho != rho {
            return Err(Error::GramMismatch(format!(
                "factored with alpha={}, rho={}, solve uses alpha={alpha}, rho={rho}",
                self.alpha, self.rho
            )));
        }
        Ok(())
    }
}

fn factor_shifted(
    x: &DMatrix<f64>,
    tau: f64,
    mode_override: Option<GramMode>,
) -> Result<(GramMode, Cholesky<f64, Dyn>, f64)> {
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("dictionary".into()));
    }
    let (dim, n) = x.shape();
    let scale = 1.0 / tau;
    let mode = mode_override.unwrap_or(if n > dim {
        GramMode::Woodbury
    } else {
        GramMode::Direct
    });

    let matrix = match mode {
        GramMode::Direct => {
            let mut gram = x.tr_mul(x);
            for i in 0..n {
                gram[(i, i)] += tau;
            }
            gram
        }
        GramMode::Woodbury => {
            let mut small = x * x.transpose();
            small.scale_mut(scale);
            for i in 0..dim {
                small[(i, i)] += 1.0;
            }
            small
        }
    };
    let factor = Cholesky::new(matrix).ok_or(Error::FactorizationFailed)?;
    Ok((mode, factor, scale))
}

/// Factors the regularized Gram matrix for repeated solves against any query.
///
/// Chooses the Woodbury form iff N > D unless `mode_override` is given.
pub fn precompute(
    x: &DMatrix<f64>,
    alpha: f64,
    rho: f64,
    mode_override: Option<GramMode>,
) -> Result<PrecomputedGram> {
    if !(alpha.is_finite() && alpha >= 0.0 && rho.is_finite() && rho > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "precompute needs alpha >= 0 and rho > 0, got alpha={alpha}, rho={rho}"
        )));
    }
    let (dim, n) = x.shape();
    let (mode, factor, scale) = factor_shifted(x, alpha + rho / 2.0, mode_override)?;
    Ok(PrecomputedGram {
        mode,
        factor,
        scale,
        alpha,
        rho,
        dim,
        n,
    })
}

/// Factors XᵀX + λI for the ridge (collaborative) coder, with the same
/// Woodbury-iff-N>D mode rule.
///
/// The result serves [`PrecomputedGram::apply_inverse`] only; it never
/// matches an ADMM solve, which requires ρ > 0.
pub fn precompute_ridge(
    x: &DMatrix<f64>,
    lambda: f64,
    mode_override: Option<GramMode>,
) -> Result<PrecomputedGram> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "ridge precompute needs lambda > 0, got {lambda}"
        )));
    }
    let (dim, n) = x.shape();
    let (mode, factor, scale) = factor_shifted(x, lambda, mode_override)?;
    Ok(PrecomputedGram {
        mode,
        factor,
        scale,
        alpha: lambda,
        rho: 0.0,
        dim,
        n,
    })
}

/// Mutable iteration state of one solve.
#[derive(Debug, Clone)]
pub struct SolverWorkspace {
    /// Unconstrained coding iterate c.
    pub c: DVector<f64>,
    /// Constrained copy z (nonnegative after every projection update).
    pub z: DVector<f64>,
    /// Lagrangian multiplier δ.
    pub delta: DVector<f64>,
    /// Completed iterations.
    pub iter: usize,
}

impl SolverWorkspace {
    /// All-zero initial state for an N-atom dictionary.
    pub fn zeros(n: usize) -> Self {
        Self {
            c: DVector::zeros(n),
            z: DVector::zeros(n),
            delta: DVector::zeros(n),
            iter: 0,
        }
    }
}

/// Result of one ADMM run.
#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Final constrained iterate z; exactly nonnegative entrywise for the
    /// non-negative solver, signed for the lasso variant.
    pub coding: DVector<f64>,
    /// Final unconstrained iterate c.
    pub c_final: DVector<f64>,
    /// Iterations completed.
    pub iterations: usize,
    /// ‖z−c‖₂ after each iteration.
    pub zc_gap: Vec<f64>,
    /// ‖c_{t+1}−c_t‖₂ after each iteration.
    pub dc: Vec<f64>,
    /// ‖z_{t+1}−z_t‖₂ after each iteration.
    pub dz: Vec<f64>,
    /// Whether the three-residual test passed before the iteration cap.
    pub converged: bool,
}

impl SolveResult {
    /// Writes the residual histories as CSV rows `iter,zc_gap,dc,dz` with
    /// iterations numbered from 1.
    pub fn write_history_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut writer = csv::Writer::from_path(path.as_ref())?;
        writer.write_record(["iter", "zc_gap", "dc", "dz"])?;
        for i in 0..self.iterations {
            writer.write_record([
                (i + 1).to_string(),
                self.zc_gap[i].to_string(),
                self.dc[i].to_string(),
                self.dz[i].to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
enum ZStep {
    /// z = max(0, v): projection onto the nonnegative orthant.
    Project,
    /// z = sign(v)·max(0, |v|−κ): entrywise soft threshold.
    SoftThreshold(f64),
}

fn step_z(v: f64, step: ZStep) -> f64 {
    match step {
        ZStep::Project => v.max(0.0),
        ZStep::SoftThreshold(k) => {
            if v > k {
                v - k
            } else if v < -k {
                v + k
            } else {
                0.0
            }
        }
    }
}

/// Right-hand side of the c-update: Xᵀy + (ρ/2)z + (1/2)δ − (β/2)·1.
fn c_rhs(
    xty: &DVector<f64>,
    z: &DVector<f64>,
    delta: &DVector<f64>,
    beta: f64,
    rho: f64,
) -> DVector<f64> {
    let mut rhs = xty + z * (rho / 2.0) + delta * 0.5;
    rhs.add_scalar_mut(-beta / 2.0);
    rhs
}

/// One c-update: c ← (XᵀX + ((2α+ρ)/2)I)^{-1}(Xᵀy + (ρ/2)z + (1/2)δ − (β/2)·1).
pub fn update_c(
    workspace: &mut SolverWorkspace,
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    config: &SolverConfig,
    gram: &PrecomputedGram,
) -> Result<()> {
    gram.check_matches(x, config.alpha, config.rho)?;
    if y.len() != x.nrows() {
        return Err(Error::DimensionMismatch {
            context: "query length vs dictionary rows",
            expected: x.nrows(),
            got: y.len(),
        });
    }
    let xty = x.tr_mul(y);
    let rhs = c_rhs(
        &xty,
        &workspace.z,
        &workspace.delta,
        config.beta,
        config.rho,
    );
    workspace.c = gram.apply_inverse(x, &rhs);
    Ok(())
}

/// One z-update: z ← max(0, c − δ/ρ) entrywise, using the current multiplier.
pub fn update_z(workspace: &mut SolverWorkspace, config: &SolverConfig) {
    workspace.z = workspace
        .c
        .zip_map(&workspace.delta, |c, d| (c - d / config.rho).max(0.0));
}

/// One dual ascent step: δ ← δ + ρ(z − c).
pub fn update_dual(workspace: &mut SolverWorkspace, config: &SolverConfig) {
    workspace.delta += (&workspace.z - &workspace.c) * config.rho;
}

/// True iff all three residual norms are ≤ tol (inclusive).
pub fn check_convergence(zc_gap: f64, dc: f64, dz: f64, tol: f64) -> bool {
    zc_gap <= tol && dc <= tol && dz <= tol
}

fn run_admm(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    gram: &PrecomputedGram,
    beta: f64,
    rho: f64,
    tol: f64,
    max_iter: usize,
    zstep: ZStep,
) -> Result<SolveResult> {
    if y.len() != x.nrows() {
        return Err(Error::DimensionMismatch {
            context: "query length vs dictionary rows",
            expected: x.nrows(),
            got: y.len(),
        });
    }
    let xty = x.tr_mul(y);
    let mut ws = SolverWorkspace::zeros(x.ncols());
    let mut zc_gap = Vec::with_capacity(max_iter);
    let mut dc = Vec::with_capacity(max_iter);
    let mut dz = Vec::with_capacity(max_iter);
    let mut converged = false;

    for t in 0..max_iter {
        let c_prev = std::mem::replace(&mut ws.c, DVector::zeros(0));
        let z_prev = ws.z.clone();

        let rhs = c_rhs(&xty, &ws.z, &ws.delta, beta, rho);
        ws.c = gram.apply_inverse(x, &rhs);
        ws.z = ws.c.zip_map(&ws.delta, |c, d| step_z(c - d / rho, zstep));
        ws.delta += (&ws.z - &ws.c) * rho;
        ws.iter = t + 1;

        let gap = (&ws.z - &ws.c).norm();
        let step_c = (&ws.c - &c_prev).norm();
        let step_z = (&ws.z - &z_prev).norm();
        if !(gap.is_finite() && step_c.is_finite() && step_z.is_finite()) {
            return Err(Error::NonFiniteIterate { iteration: ws.iter });
        }
        zc_gap.push(gap);
        dc.push(step_c);
        dz.push(step_z);

        // tol = 0 means "record the full trajectory": never stop early.
        if tol > 0.0 && check_convergence(gap, step_c, step_z, tol) {
            converged = true;
            break;
        }
    }

    Ok(SolveResult {
        coding: ws.z.clone(),
        c_final: ws.c,
        iterations: ws.iter,
        zc_gap,
        dc,
        dz,
        converged,
    })
}

/// Runs the non-negative coder from the all-zero start, stopping at
/// convergence or the iteration cap; never errors on non-convergence.
///
/// Callers are responsible for unit-normalizing the dictionary columns and
/// the query; `gram` must have been built from the same (X, α, ρ).
pub fn solve(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    config: &SolverConfig,
    gram: &PrecomputedGram,
) -> Result<SolveResult> {
    config.validate()?;
    gram.check_matches(x, config.alpha, config.rho)?;
    run_admm(
        x,
        y,
        gram,
        config.beta,
        config.rho,
        config.tol,
        config.max_iter,
        ZStep::Project,
    )
}

/// Solves min ‖y−Xc‖² + λ‖c‖₁ with the same splitting, replacing the
/// projection by an entrywise soft threshold at λ/ρ; signs unconstrained.
///
/// `gram` must have been built with α = 0 (the lasso c-update has no ℓ2
/// term); `config.alpha` and `config.beta` are ignored.
pub fn solve_lasso(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    lambda: f64,
    config: &SolverConfig,
    gram: &PrecomputedGram,
) -> Result<SolveResult> {
    config.validate()?;
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    gram.check_matches(x, 0.0, config.rho)?;
    run_admm(
        x,
        y,
        gram,
        0.0,
        config.rho,
        config.tol,
        config.max_iter,
        ZStep::SoftThreshold(lambda / config.rho),
    )
}
