//! Independent reference solvers used to certify the greedy algorithm.
//!
//! Two routes that share no code with the solver module: an enumerate-all-
//! cutoffs closed-form search, and projected subgradient descent on the
//! simplex. Both are deliberately simple and slow; they exist so the fast
//! path can be checked against something that cannot share its bugs.

use crate::solver::BetaVector;

/// Which reference route produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMethod {
    Enumeration,
    Gradient,
}

/// A reference solution to the weighted-estimation objective.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Simplex weights over original dataset indices.
    pub weights: Vec<f64>,
    /// `‖α‖₂ + α·β` evaluated directly on the weights.
    pub objective: f64,
    pub method: OracleMethod,
    /// False when gradient descent exhausted its step budget while still
    /// improving; enumeration always converges.
    pub converged: bool,
}

/// Evaluates `‖α‖₂ + α·β` for weights indexed by original dataset position.
pub fn objective_value(beta: &BetaVector, weights: &[f64]) -> f64 {
    let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    let bias = beta
        .beta()
        .iter()
        .zip(beta.order())
        .map(|(b, &i)| b * weights[i])
        .sum::<f64>();
    norm + bias
}

/// Closed-form search over every cutoff k.
///
/// For each k the stationarity equation gives a candidate multiplier
/// `λ_k = (S + sqrt(k + S² − kQ))/k`; a candidate is kept only if it
/// passes full KKT feasibility — `λ_k > β_k` (all k weights positive) and
/// `λ_k ≤ β_{k+1}` (excluded points satisfy complementary slackness) — which
/// discards the spurious quadratic root. The feasible candidate with the
/// smallest λ wins. O(n²) worst case and fine with that.
pub fn solve_by_enumeration(beta: &BetaVector) -> OracleResult {
    let bs = beta.beta();
    let n = bs.len();
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut best: Option<(f64, usize)> = None;
    for k in 1..=n {
        let b = bs[k - 1];
        sum += b;
        sumsq += b * b;
        let kf = k as f64;
        let disc = kf + sum * sum - kf * sumsq;
        if disc < 0.0 {
            continue;
        }
        let lambda = (sum + disc.sqrt()) / kf;
        let positive = lambda > bs[k - 1];
        let slack = k == n || lambda <= bs[k];
        if positive && slack && best.is_none_or(|(l, _)| lambda < l) {
            best = Some((lambda, k));
        }
    }
    // A fully feasible cutoff exists in exact arithmetic; if rounding at a
    // boundary ever hides it, fall back to the positivity-only minimum
    // (k = 1 always qualifies: lambda_1 = beta_1 + 1).
    let (lambda, k) = best.unwrap_or_else(|| {
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        let mut fallback: Option<(f64, usize)> = None;
        for k in 1..=n {
            let b = bs[k - 1];
            sum += b;
            sumsq += b * b;
            let kf = k as f64;
            let disc = kf + sum * sum - kf * sumsq;
            if disc < 0.0 {
                continue;
            }
            let lambda = (sum + disc.sqrt()) / kf;
            if lambda > bs[k - 1] && fallback.is_none_or(|(l, _)| lambda < l) {
                fallback = Some((lambda, k));
            }
        }
        fallback.expect("k=1 candidate is always feasible")
    });

    let mut weights = vec![0.0; n];
    let total: f64 = bs[..k].iter().map(|b| lambda - b).sum();
    for (s, b) in bs[..k].iter().enumerate() {
        weights[beta.order()[s]] = (lambda - b) / total;
    }
    let objective = objective_value(beta, &weights);
    OracleResult {
        weights,
        objective,
        method: OracleMethod::Enumeration,
        converged: true,
    }
}

/// Optimum value of the objective restricted to weights supported on the
/// `k` nearest entries (all later coordinates pinned to zero).
///
/// Same closed-form-per-cutoff search as [`solve_by_enumeration`], but the
/// inner cutoff `j` ranges over `1..=k` and slackness is only required for
/// the free coordinates `j+1..=k`; coordinates beyond `k` are excluded by
/// the restriction itself, not by a multiplier.
pub fn solve_restricted(beta: &BetaVector, k: usize) -> f64 {
    assert!(k >= 1, "support size k must be >= 1");
    let bs = &beta.beta()[..k.min(beta.len())];
    let k = bs.len();
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut best: Option<f64> = None;
    let mut fallback: Option<f64> = None;
    for j in 1..=k {
        let b = bs[j - 1];
        sum += b;
        sumsq += b * b;
        let jf = j as f64;
        let disc = jf + sum * sum - jf * sumsq;
        if disc < 0.0 {
            continue;
        }
        let lambda = (sum + disc.sqrt()) / jf;
        if lambda <= bs[j - 1] {
            continue;
        }
        if fallback.is_none_or(|l| lambda < l) {
            fallback = Some(lambda);
        }
        if (j == k || lambda <= bs[j]) && best.is_none_or(|l| lambda < l) {
            best = Some(lambda);
        }
    }
    best
        .or(fallback)
        .expect("j=1 candidate is always feasible")
}

/// Euclidean projection onto the probability simplex by sort-and-threshold.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Projected subgradient descent on the simplex with step size `1/sqrt(t)`.
///
/// Starts from the uniform vector and keeps the best iterate seen. Every
/// 100 steps the best objective is compared with its value at the previous
/// checkpoint; an improvement below `tolerance` stops early and counts as
/// converged. Iterates never reach the origin (the simplex keeps
/// `‖α‖₂ ≥ 1/sqrt(n)`), but the subgradient of `‖·‖₂` at zero is handled
/// by substituting a unit direction anyway.
pub fn solve_by_projected_gradient(
    beta: &BetaVector,
    steps: usize,
    tolerance: f64,
) -> OracleResult {
    const CHECK_EVERY: usize = 100;

    let bs = beta.beta();
    let n = bs.len();
    let mut alpha = vec![1.0 / n as f64; n];

    let eval = |a: &[f64]| -> f64 {
        let norm = a.iter().map(|w| w * w).sum::<f64>().sqrt();
        norm + a.iter().zip(bs).map(|(w, b)| w * b).sum::<f64>()
    };

    let mut best = alpha.clone();
    let mut best_obj = eval(&alpha);
    let mut checkpoint_obj = best_obj;
    let mut converged = false;

    let mut grad = vec![0.0; n];
    for t in 1..=steps.max(1) {
        let norm = alpha.iter().map(|w| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            for i in 0..n {
                grad[i] = alpha[i] / norm + bs[i];
            }
        } else {
            grad[0] = 1.0 + bs[0];
            grad[1..n].copy_from_slice(&bs[1..n]);
        }
        let eta = 1.0 / (t as f64).sqrt();
        for i in 0..n {
            alpha[i] -= eta * grad[i];
        }
        alpha = project_to_simplex(&alpha);
        let obj = eval(&alpha);
        if obj < best_obj {
            best_obj = obj;
            best.copy_from_slice(&alpha);
        }
        if t % CHECK_EVERY == 0 {
            if checkpoint_obj - best_obj < tolerance {
                converged = true;
                break;
            }
            checkpoint_obj = best_obj;
        }
    }

    // scatter from sorted positions to original dataset indices
    let mut weights = vec![0.0; n];
    for (s, &i) in beta.order().iter().enumerate() {
        weights[i] = best[s];
    }
    OracleResult {
        weights,
        objective: best_obj,
        method: OracleMethod::Gradient,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn beta(values: &[f64]) -> BetaVector {
        BetaVector::from_unsorted(values.to_vec()).unwrap()
    }

    // Same frozen instance as the solver tests.
    const ORACLE_LAMBDA: f64 = 0.9782329983125269;

    #[test]
    fn enumeration_frozen_instance() {
        let r = solve_by_enumeration(&beta(&[0.1, 0.5, 2.0]));
        assert!((r.objective - ORACLE_LAMBDA).abs() < 1e-12);
        assert_eq!(r.weights.iter().filter(|w| **w > 0.0).count(), 2);
    }

    #[test]
    fn enumeration_all_zero_beta() {
        let r = solve_by_enumeration(&beta(&[0.0; 4]));
        assert!((r.objective - 0.5).abs() < 1e-15);
        for w in &r.weights {
            assert!((w - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn enumeration_single_point() {
        let r = solve_by_enumeration(&beta(&[0.7]));
        assert!((r.objective - 1.7).abs() < 1e-15);
        assert_eq!(r.weights, vec![1.0]);
    }

    #[test]
    fn restricted_optimum_shrinks_as_k_grows() {
        let b = beta(&[0.1, 0.5, 2.0]);
        let l1 = solve_restricted(&b, 1);
        let l2 = solve_restricted(&b, 2);
        let l3 = solve_restricted(&b, 3);
        assert!((l1 - 1.1).abs() < 1e-15);
        assert!((l2 - ORACLE_LAMBDA).abs() < 1e-12);
        // k* = 2: widening the support further cannot improve the optimum
        assert!((l3 - l2).abs() < 1e-12);
        assert!(l1 >= l2 && l2 >= l3 - 1e-12);
    }

    #[test]
    fn gradient_frozen_instance() {
        let r = solve_by_projected_gradient(&beta(&[0.1, 0.5, 2.0]), 100_000, 1e-12);
        assert!(
            (r.objective - ORACLE_LAMBDA).abs() < 1e-4,
            "objective {} vs {}",
            r.objective,
            ORACLE_LAMBDA
        );
    }

    #[test]
    fn gradient_symmetric_case_converges_to_uniform() {
        let r = solve_by_projected_gradient(&beta(&[0.0, 0.0, 0.0]), 20_000, 1e-12);
        for w in &r.weights {
            assert!((w - 1.0 / 3.0).abs() < 1e-3, "weight {w}");
        }
    }

    #[test]
    fn gradient_single_dominant_neighbor() {
        let r = solve_by_projected_gradient(&beta(&[0.0, 10.0]), 20_000, 1e-12);
        assert!((r.weights[0] - 1.0).abs() < 1e-3);
        assert!(r.weights[1].abs() < 1e-3);
    }

    #[test]
    fn projection_handles_boundary_inputs() {
        assert_eq!(project_to_simplex(&[0.0, 0.0]), vec![0.5, 0.5]);
        assert_eq!(project_to_simplex(&[5.0]), vec![1.0]);
        let p = project_to_simplex(&[2.0, -1.0]);
        assert_eq!(p, vec![1.0, 0.0]);
    }

    proptest! {
        #[test]
        fn projection_is_idempotent_and_feasible(
            v in prop::collection::vec(-3.0..3.0f64, 1..8),
        ) {
            let p = project_to_simplex(&v);
            let sum: f64 = p.iter().sum();
            prop_assert!((sum - 1.0).abs() < 1e-9);
            prop_assert!(p.iter().all(|x| *x >= 0.0));
            let pp = project_to_simplex(&p);
            for (a, b) in p.iter().zip(&pp) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        // Quadratic-program brute force: no grid point on the simplex is
        // closer to v than the sort-and-threshold projection.
        #[test]
        fn projection_is_closest_point_on_small_grids(
            v in prop::collection::vec(-2.0..2.0f64, 2..5),
        ) {
            let p = project_to_simplex(&v);
            let dist = |w: &[f64]| -> f64 {
                w.iter().zip(&v).map(|(a, b)| (a - b) * (a - b)).sum()
            };
            let proj_dist = dist(&p);
            let m = 40usize;
            let n = v.len();
            // enumerate lattice points of the simplex with denominator m
            let mut stack = vec![(vec![], m)];
            while let Some((prefix, rem)) = stack.pop() {
                if prefix.len() == n - 1 {
                    let mut w: Vec<f64> = prefix.iter().map(|&c: &usize| c as f64 / m as f64).collect();
                    w.push(rem as f64 / m as f64);
                    prop_assert!(proj_dist <= dist(&w) + 1e-9);
                } else {
                    for c in 0..=rem {
                        let mut next = prefix.clone();
                        next.push(c);
                        stack.push((next, rem - c));
                    }
                }
            }
        }
    }
}
