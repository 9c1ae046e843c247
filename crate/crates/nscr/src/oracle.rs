//! Slow, independent reference solvers used to validate the ADMM coder.
//!
//! Two oracles, built deliberately unlike the production solver so a bug in
//! one cannot silently validate the other: an accelerated projected-gradient
//! descent with backtracking line search, and an exhaustive enumeration of
//! all 2^N supports with KKT feasibility checks (exact up to linear-solve
//! precision, N ≤ 12 only). Both minimize
//! ‖y − Xc‖² + α‖c‖² + β·1ᵀc over c ≥ 0.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::Error;
use crate::Result;

/// Upper limit on atoms for the exhaustive support enumeration.
pub const ACTIVE_SET_MAX_ATOMS: usize = 12;

/// Iteration accounting hidden behind a KKT stopping rule.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    /// Stop once ‖c − max(0, c − ∇f(c))‖∞ falls to this value.
    pub step_tol: f64,
    /// Hard cap on gradient steps before giving up.
    pub max_steps: usize,
    /// Step-size shrink factor in (0, 1) for the backtracking line search.
    pub backtrack: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            step_tol: 1e-10,
            max_steps: 1_000_000,
            backtrack: 0.5,
        }
    }
}

impl OracleConfig {
    /// Checks field ranges: tolerances positive and finite, factor in (0,1).
    pub fn validate(&self) -> Result<()> {
        let ok = self.step_tol.is_finite()
            && self.step_tol > 0.0
            && self.max_steps >= 1
            && self.backtrack > 0.0
            && self.backtrack < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("{self:?}")))
        }
    }
}

/// The objective ‖y − Xc‖² + α‖c‖² + β·1ᵀc, exactly as written.
pub fn objective_value(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    c: &DVector<f64>,
    alpha: f64,
    beta: f64,
) -> f64 {
    let residual = y - x * c;
    residual.norm_squared() + alpha * c.norm_squared() + beta * c.sum()
}

/// Solves the unconstrained problem restricted to `support`, i.e.
/// (X_SᵀX_S + αI)c_S = X_Sᵀy − (β/2)·1; None if the restricted Gram matrix
/// is not positive definite.
fn solve_on_support(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    alpha: f64,
    beta: f64,
    support: &[usize],
) -> Option<DVector<f64>> {
    let xs = x.select_columns(support);
    let mut gram = xs.tr_mul(&xs);
    for i in 0..support.len() {
        gram[(i, i)] += alpha;
    }
    let mut rhs = xs.tr_mul(y);
    rhs.add_scalar_mut(-beta / 2.0);
    Cholesky::new(gram).map(|factor| factor.solve(&rhs))
}

/// Reference minimizer by accelerated projected gradient descent.
///
/// Runs momentum steps with a backtracking line search, a gradient-based
/// adaptive restart, and a periodic exact re-solve on the current support,
/// but terminates only on the projected-gradient test
/// ‖c − max(0, c − ∇f(c))‖∞ ≤ `step_tol`. Unique minimizer for α > 0; one
/// of the minimizers for α = 0. Intended for small instances (N ≤ 200).
pub fn reference_nscr(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    alpha: f64,
    beta: f64,
    config: &OracleConfig,
) -> Result<DVector<f64>> {
    config.validate()?;
    if !(alpha.is_finite() && alpha >= 0.0 && beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "weights must be nonnegative, got alpha={alpha}, beta={beta}"
        )));
    }
    if y.len() != x.nrows() {
        return Err(Error::DimensionMismatch {
            context: "query length vs dictionary rows",
            expected: x.nrows(),
            got: y.len(),
        });
    }

    let n = x.ncols();
    let xtx = x.tr_mul(x);
    let xty = x.tr_mul(y);
    let grad = |c: &DVector<f64>| -> DVector<f64> {
        let mut g = (&xtx * c - &xty) * 2.0 + c * (2.0 * alpha);
        g.add_scalar_mut(beta);
        g
    };
    let objective = |c: &DVector<f64>| objective_value(x, y, c, alpha, beta);

    let mut c = DVector::zeros(n);
    let mut v = c.clone();
    let mut momentum = 1.0f64;
    // Frobenius norm upper-bounds the spectral norm, so this step size is
    // conservative; the line search grows it back when it can.
    let mut eta = 1.0 / (2.0 * (xtx.norm() + alpha) + 1e-12);

    for step in 0..config.max_steps {
        let g_c = grad(&c);
        let projected_gap = c.zip_map(&g_c, |ci, gi| ci - (ci - gi).max(0.0));
        if projected_gap.abs().max() <= config.step_tol {
            return Ok(c);
        }

        let g_v = grad(&v);
        let f_v = objective(&v);
        let mut next;
        loop {
            next = v.zip_map(&g_v, |vi, gi| (vi - eta * gi).max(0.0));
            let diff = &next - &v;
            let quad = f_v + g_v.dot(&diff) + diff.norm_squared() / (2.0 * eta);
            if objective(&next) <= quad + 1e-12 * (1.0 + f_v.abs()) || eta <= 1e-18 {
                break;
            }
            eta *= config.backtrack;
        }

        // Gradient-scheme adaptive restart: momentum is discarded when the
        // extrapolation points against the direction of progress.
        if (&v - &next).dot(&(&next - &c)) > 0.0 {
            momentum = 1.0;
            v = next.clone();
        } else {
            let momentum_next = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
            v = &next + (&next - &c) * ((momentum - 1.0) / momentum_next);
            momentum = momentum_next;
        }
        c = next;
        eta *= 1.05;

        // Periodic exact re-solve on the current support: a feasible solution
        // that does not increase the objective snaps c onto the face the
        // iteration is converging to.
        if (step + 1) % 25 == 0 {
            let support: Vec<usize> = (0..n).filter(|&i| c[i] > 0.0).collect();
            if !support.is_empty() {
                if let Some(on_support) = solve_on_support(x, y, alpha, beta, &support) {
                    if on_support.min() >= 0.0 {
                        let mut candidate = DVector::zeros(n);
                        for (slot, &i) in support.iter().enumerate() {
                            candidate[i] = on_support[slot];
                        }
                        if objective(&candidate) <= objective(&c) {
                            c = candidate;
                            v = c.clone();
                            momentum = 1.0;
                        }
                    }
                }
            }
        }
    }
    Err(Error::OracleExhausted {
        steps: config.max_steps,
    })
}

/// Reference minimizer by exhaustive support enumeration (N ≤ 12, α > 0).
///
/// For every support set, solves the equality-constrained quadratic, keeps
/// candidates that are primal feasible (support entries ≥ 0) and dual
/// feasible (gradient ≥ 0 off support), and returns the one with least
/// objective. Falls back to the best primal-feasible candidate if rounding
/// leaves no candidate passing the dual check (c = 0 is always feasible).
pub fn reference_active_set(
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    alpha: f64,
    beta: f64,
) -> Result<DVector<f64>> {
    let n = x.ncols();
    if n > ACTIVE_SET_MAX_ATOMS {
        return Err(Error::ActiveSetTooLarge {
            n,
            max: ACTIVE_SET_MAX_ATOMS,
        });
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "support enumeration needs alpha > 0 for unique restricted solves, got {alpha}"
        )));
    }
    if y.len() != x.nrows() {
        return Err(Error::DimensionMismatch {
            context: "query length vs dictionary rows",
            expected: x.nrows(),
            got: y.len(),
        });
    }

    const PRIMAL_SLACK: f64 = 1e-10;
    const DUAL_SLACK: f64 = 1e-8;
    let mut best_kkt: Option<(f64, DVector<f64>)> = None;
    let mut best_feasible: Option<(f64, DVector<f64>)> = None;

    for mask in 0u32..(1u32 << n) {
        let support: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let mut candidate = DVector::zeros(n);
        if !support.is_empty() {
            let Some(on_support) = solve_on_support(x, y, alpha, beta, &support) else {
                continue;
            };
            if on_support.min() < -PRIMAL_SLACK {
                continue;
            }
            for (slot, &i) in support.iter().enumerate() {
                candidate[i] = on_support[slot].max(0.0);
            }
        }

        let value = objective_value(x, y, &candidate, alpha, beta);
        if best_feasible.as_ref().is_none_or(|(b, _)| value < *b) {
            best_feasible = Some((value, candidate.clone()));
        }

        let mut gradient = (x.tr_mul(&(x * &candidate - y)) + &candidate * alpha) * 2.0;
        gradient.add_scalar_mut(beta);
        let dual_ok = (0..n)
            .filter(|i| mask & (1 << i) == 0)
            .all(|i| gradient[i] >= -DUAL_SLACK);
        if dual_ok && best_kkt.as_ref().is_none_or(|(b, _)| value < *b) {
            best_kkt = Some((value, candidate));
        }
    }

    Ok(best_kkt
        .or(best_feasible)
        .expect("the empty support always yields a feasible candidate")
        .1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthetic::{gaussian_matrix, gaussian_vector};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn kkt_residuals(
        x: &DMatrix<f64>,
        y: &DVector<f64>,
        c: &DVector<f64>,
        alpha: f64,
        beta: f64,
    ) -> (f64, f64) {
        let mut gradient = (x.tr_mul(&(x * c - y)) + c * alpha) * 2.0;
        gradient.add_scalar_mut(beta);
        let worst_dual = gradient.min();
        let worst_slack = c
            .iter()
            .zip(gradient.iter())
            .map(|(ci, gi)| (ci * gi).abs())
            .fold(0.0, f64::max);
        (worst_dual, worst_slack)
    }

    #[test]
    fn recovers_indicator_on_orthonormal_atoms() {
        let x = DMatrix::identity(2, 2);
        let y = nalgebra::dvector![1.0, 0.0];
        let c = reference_nscr(&x, &y, 0.0, 0.0, &OracleConfig::default()).unwrap();
        assert!((c[0] - 1.0).abs() <= 1e-8);
        assert!(c[1].abs() <= 1e-8);
    }

    #[test]
    fn large_shift_clips_scalar_problem_to_zero() {
        let x = DMatrix::identity(1, 1);
        let y = nalgebra::dvector![1.0];
        let c = reference_nscr(&x, &y, 0.0, 4.0, &OracleConfig::default()).unwrap();
        assert!(c[0].abs() <= 1e-10);
    }

    #[test]
    fn scalar_stationarity_matches_closed_form() {
        let x = DMatrix::identity(1, 1);
        let y = nalgebra::dvector![1.0];
        // 2(c−1) + 2αc + β = 0 at α=β=0.5 gives c = 0.5.
        let c = reference_nscr(&x, &y, 0.5, 0.5, &OracleConfig::default()).unwrap();
        assert!((c[0] - 0.5).abs() <= 1e-9);
    }

    #[test]
    fn oracles_agree_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        let alphas = [0.01, 0.05, 0.1];
        let betas = [0.0, 0.01, 0.1];
        for trial in 0..50 {
            let d = rng.random_range(3..=8);
            let n = rng.random_range(2..=10);
            let x = gaussian_matrix(d, n, &mut rng);
            let y = gaussian_vector(d, &mut rng);
            let alpha = alphas[trial % alphas.len()];
            let beta = betas[(trial / 3) % betas.len()];

            let descent = reference_nscr(&x, &y, alpha, beta, &OracleConfig::default()).unwrap();
            let enumerated = reference_active_set(&x, &y, alpha, beta).unwrap();
            let gap = (&descent - &enumerated).abs().max();
            assert!(
                gap <= 1e-8,
                "trial {trial}: oracle disagreement {gap:.3e} at alpha={alpha}, beta={beta}"
            );
        }
    }

    #[test]
    fn huge_shift_empties_the_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let x = gaussian_matrix(5, 8, &mut rng);
        let y = gaussian_vector(5, &mut rng);
        let beta = 2.0 * x.tr_mul(&y).abs().max() + 2.0;
        let c = reference_active_set(&x, &y, 0.05, beta).unwrap();
        assert_eq!(c, DVector::zeros(8));
    }

    #[test]
    fn single_atom_matches_scalar_kkt_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        for _ in 0..20 {
            let x = gaussian_matrix(4, 1, &mut rng);
            let y = gaussian_vector(4, &mut rng);
            let (alpha, beta) = (0.2, 0.3);
            let c = reference_active_set(&x, &y, alpha, beta).unwrap();
            let col = x.column(0);
            let expected =
                (0.0f64).max((2.0 * col.dot(&y) - beta) / (2.0 * col.norm_squared() + 2.0 * alpha));
            assert!((c[0] - expected).abs() <= 1e-10);
        }
    }

    #[test]
    fn objective_matches_hand_values() {
        let x = DMatrix::identity(2, 2);
        let y = nalgebra::dvector![0.6, 0.8];
        assert!((objective_value(&x, &y, &DVector::zeros(2), 0.1, 0.2) - 1.0).abs() <= 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let square = gaussian_matrix(4, 4, &mut rng);
        let target = gaussian_vector(4, &mut rng);
        let exact = square.clone().lu().solve(&target).unwrap();
        assert!(objective_value(&square, &target, &exact, 0.0, 0.0) <= 1e-12);
    }

    #[test]
    fn oracle_solutions_certify_kkt() {
        let mut rng = ChaCha8Rng::seed_from_u64(104);
        for trial in 0..10 {
            let x = gaussian_matrix(6, 9, &mut rng);
            let y = gaussian_vector(6, &mut rng);
            let (alpha, beta) = (0.05, 0.05);
            let c = reference_nscr(&x, &y, alpha, beta, &OracleConfig::default()).unwrap();
            let (worst_dual, worst_slack) = kkt_residuals(&x, &y, &c, alpha, beta);
            assert!(worst_dual >= -1e-8, "trial {trial}: dual {worst_dual:.3e}");
            assert!(
                worst_slack <= 1e-8,
                "trial {trial}: slack {worst_slack:.3e}"
            );
        }
    }

    #[test]
    fn no_random_feasible_point_beats_the_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(105);
        let x = gaussian_matrix(7, 10, &mut rng);
        let y = gaussian_vector(7, &mut rng);
        let (alpha, beta) = (0.05, 0.01);
        let c = reference_nscr(&x, &y, alpha, beta, &OracleConfig::default()).unwrap();
        let best = objective_value(&x, &y, &c, alpha, beta);
        for _ in 0..500 {
            let candidate = gaussian_vector(10, &mut rng).map(f64::abs);
            assert!(objective_value(&x, &y, &candidate, alpha, beta) >= best - 1e-9);
        }
    }

    #[test]
    fn descent_oracle_handles_flat_directions() {
        // alpha = 0 on a wide dictionary: not strictly convex, but the
        // projected-gradient test must still be reachable.
        let mut rng = ChaCha8Rng::seed_from_u64(106);
        let x = gaussian_matrix(8, 12, &mut rng);
        let y = gaussian_vector(8, &mut rng);
        let c = reference_nscr(&x, &y, 0.0, 0.01, &OracleConfig::default()).unwrap();
        let (worst_dual, worst_slack) = kkt_residuals(&x, &y, &c, 0.0, 0.01);
        assert!(worst_dual >= -1e-8);
        assert!(worst_slack <= 1e-8);
    }

    #[test]
    fn enumeration_rejects_oversized_and_unregularized_problems() {
        let x = DMatrix::identity(13, 13);
        let y = DVector::zeros(13);
        assert!(matches!(
            reference_active_set(&x, &y, 0.1, 0.0),
            Err(Error::ActiveSetTooLarge { n: 13, max: 12 })
        ));
        let x = DMatrix::identity(2, 2);
        let y = DVector::zeros(2);
        assert!(reference_active_set(&x, &y, 0.0, 0.0).is_err());
    }
}
