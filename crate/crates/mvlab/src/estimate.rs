//! Method-of-moments parameter recovery for k-mixtures.
//!
//! Given target moments `m_1..m_d`, the solver looks for mixture parameters
//! whose first d moments match: closed-form inversion for a single
//! component, multi-start damped Newton on the square system `d = 3k-1`,
//! and Levenberg-Marquardt least squares when overdetermined. Positivity of
//! the distribution parameters is enforced by iterating in log-parameters;
//! the last weight is eliminated through `alpha_k = 1 - sum alpha_j` and
//! solutions with weights outside (0, 1) are discarded. Residuals are
//! scaled per equation by `max(1, |m_r|)` because raw moments grow fast
//! enough to stall an unscaled iteration.
//!
//! Converged solutions are canonicalized by sorting components, deduplicated
//! into clusters, and summarized by an empirical uniqueness verdict. The
//! verdict is evidence, not proof.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::moments::{ComponentSymbolics, Family};
use crate::rng::rng_for;

#[derive(Debug, Error, PartialEq)]
pub enum EstimateError {
    #[error("infeasible moments: {0} violated")]
    Infeasible(String),
    #[error("need at least 3k-1 = {need} target moments, got {got}")]
    TooFewMoments { need: usize, got: usize },
}

/// Solver knobs. The defaults match the ranges the estimator is tested on.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub starts: usize,
    pub max_iter: usize,
    /// Convergence threshold on the scaled residual sup-norm.
    pub tol: f64,
    /// Componentwise distance under which two canonicalized solutions are
    /// the same cluster.
    pub merge_tol: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            starts: 200,
            max_iter: 100,
            tol: 1e-10,
            merge_tol: 1e-6,
            seed: 0,
        }
    }
}

/// A moment-matching problem: family, mixture size, and scaled targets.
#[derive(Debug, Clone)]
pub struct MomentSystem {
    pub family: Family,
    pub k: usize,
    pub d: usize,
    /// Target moments `m_1..m_d`.
    pub target: Vec<f64>,
    /// Per-equation normalizers `max(1, |m_r|)`.
    pub scaling: Vec<f64>,
    symbolics: ComponentSymbolics,
}

impl MomentSystem {
    /// Build a system from the target moments `m_1..m_d` (no leading `m_0`).
    pub fn new(family: Family, k: usize, target: Vec<f64>) -> Result<Self, EstimateError> {
        let d = target.len();
        let need = 3 * k - 1;
        if d < need {
            return Err(EstimateError::TooFewMoments { need, got: d });
        }
        let scaling = target.iter().map(|m| m.abs().max(1.0)).collect();
        Ok(MomentSystem {
            family,
            k,
            d,
            target,
            scaling,
            symbolics: ComponentSymbolics::new(family, d),
        })
    }

    fn n_params(&self) -> usize {
        3 * self.k - 1
    }

    /// Scaled residual and Jacobian at a solver state
    /// `(log a_1, log b_1, ..., log a_k, log b_k, alpha_1..alpha_{k-1})`.
    fn residual_jacobian(&self, x: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let k = self.k;
        let d = self.d;
        let mut tables = Vec::with_capacity(k);
        for i in 0..k {
            let a = x[2 * i].exp();
            let b = x[2 * i + 1].exp();
            tables.push((a, b, self.symbolics.eval_f64(a, b)));
        }
        let mut weights: Vec<f64> = x[2 * k..].to_vec();
        weights.push(1.0 - weights.iter().sum::<f64>());

        let mut res = vec![0.0; d];
        let mut jac = vec![vec![0.0; self.n_params()]; d];
        for r in 1..=d {
            let mut m = 0.0;
            for i in 0..k {
                let (a, b, table) = &tables[i];
                let (mr, da, db) = table[r];
                m += weights[i] * mr;
                // Chain rule for the log reparametrization.
                jac[r - 1][2 * i] = weights[i] * da * a / self.scaling[r - 1];
                jac[r - 1][2 * i + 1] = weights[i] * db * b / self.scaling[r - 1];
            }
            for j in 0..k - 1 {
                let mj = tables[j].2[r].0;
                let mk = tables[k - 1].2[r].0;
                jac[r - 1][2 * k + j] = (mj - mk) / self.scaling[r - 1];
            }
            res[r - 1] = (m - self.target[r - 1]) / self.scaling[r - 1];
        }
        (res, jac)
    }
}

/// One recovered mixture, components in canonical (sorted) order.
#[derive(Debug, Clone, Serialize)]
pub struct RecoveredMixture {
    /// `(mu, lambda)` or `(theta, shape)` per component.
    pub components: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    /// Scaled residual sup-norm at the solution.
    pub residual: f64,
    /// Number of starts that converged into this cluster.
    pub basin_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UniquenessVerdict {
    /// Exactly one cluster, corroborated by at least two independently
    /// converged starts. An empirical verdict, not a proof.
    UniqueUpToPermutation,
    MultipleFound,
    NoneFound,
}

/// All distinct solutions found by the multi-start solver.
#[derive(Debug, Clone, Serialize)]
pub struct SolutionSet {
    pub family: Family,
    pub k: usize,
    pub d: usize,
    pub solutions: Vec<RecoveredMixture>,
    pub verdict: UniquenessVerdict,
    pub converged_starts: usize,
    pub total_starts: usize,
}

/// Closed-form single-component inversion from `(m_1, m_2)`.
///
/// Inverse Gaussian: `mu = m_1`, `lambda = mu^3 / (m_2 - mu^2)`.
/// Gamma: `theta = (m_2 - m_1^2) / m_1`, `shape = m_1^2 / (m_2 - m_1^2)`.
pub fn invert_single(family: Family, m1: f64, m2: f64) -> Result<[f64; 2], EstimateError> {
    if !(m1 * m1 > 0.0) {
        return Err(EstimateError::Infeasible("m1^2 > 0".into()));
    }
    if !(m2 > m1 * m1) {
        return Err(EstimateError::Infeasible("m2 > m1^2".into()));
    }
    let variance = m2 - m1 * m1;
    Ok(match family {
        Family::InverseGaussian => [m1, m1 * m1 * m1 / variance],
        Family::Gamma => [variance / m1, m1 * m1 / variance],
    })
}

/// Solve a small dense linear system by Gaussian elimination with partial
/// pivoting. Returns `None` on a (numerically) singular matrix.
fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for i in col + 1..n {
            let f = m[i][col] / m[col][col];
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m[i][j] -= f * m[col][j];
            }
            rhs[i] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = rhs[i];
        for j in i + 1..n {
            acc -= m[i][j] * x[j];
        }
        x[i] = acc / m[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

fn cost(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// One damped Newton run (square systems).
fn newton_run(sys: &MomentSystem, x0: &[f64], config: &SolverConfig) -> Option<Vec<f64>> {
    let mut x = x0.to_vec();
    for _ in 0..config.max_iter {
        let (res, jac) = sys.residual_jacobian(&x);
        if !res.iter().all(|v| v.is_finite()) {
            return None;
        }
        if sup_norm(&res) <= config.tol {
            return Some(x);
        }
        let neg: Vec<f64> = res.iter().map(|v| -v).collect();
        let delta = solve_dense(&jac, &neg)?;
        let c0 = cost(&res);
        let mut t = 1.0;
        let mut accepted = false;
        while t >= 1e-6 {
            let trial: Vec<f64> = x
                .iter()
                .zip(&delta)
                .map(|(xi, di)| clamp_log(xi + t * di))
                .collect();
            let (tres, _) = sys.residual_jacobian(&trial);
            if tres.iter().all(|v| v.is_finite()) && cost(&tres) < c0 {
                x = trial;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            return None;
        }
    }
    let (res, _) = sys.residual_jacobian(&x);
    (sup_norm(&res) <= config.tol).then_some(x)
}

/// One Levenberg-Marquardt run (overdetermined systems).
fn lm_run(sys: &MomentSystem, x0: &[f64], config: &SolverConfig) -> Option<Vec<f64>> {
    let n = sys.n_params();
    let mut x = x0.to_vec();
    let mut lambda = 1e-3;
    let (mut res, mut jac) = sys.residual_jacobian(&x);
    if !res.iter().all(|v| v.is_finite()) {
        return None;
    }
    for _ in 0..config.max_iter {
        if sup_norm(&res) <= config.tol {
            return Some(x);
        }
        // Normal equations J^T J + lambda * diag(J^T J).
        let mut jtj = vec![vec![0.0; n]; n];
        let mut jtr = vec![0.0; n];
        for r in 0..res.len() {
            for i in 0..n {
                jtr[i] += jac[r][i] * res[r];
                for j in 0..n {
                    jtj[i][j] += jac[r][i] * jac[r][j];
                }
            }
        }
        let mut improved = false;
        for _ in 0..25 {
            let mut damped = jtj.clone();
            for (i, row) in damped.iter_mut().enumerate() {
                row[i] += lambda * jtj[i][i].max(1e-12);
            }
            let neg: Vec<f64> = jtr.iter().map(|v| -v).collect();
            if let Some(delta) = solve_dense(&damped, &neg) {
                let trial: Vec<f64> = x
                    .iter()
                    .zip(&delta)
                    .map(|(xi, di)| clamp_log(xi + di))
                    .collect();
                let (tres, tjac) = sys.residual_jacobian(&trial);
                if tres.iter().all(|v| v.is_finite()) && cost(&tres) < cost(&res) {
                    x = trial;
                    res = tres;
                    jac = tjac;
                    lambda = (lambda / 3.0).max(1e-12);
                    improved = true;
                    break;
                }
            }
            lambda *= 4.0;
            if lambda > 1e12 {
                break;
            }
        }
        if !improved {
            break;
        }
    }
    (sup_norm(&res) <= config.tol).then_some(x)
}

/// Keep log-parameters inside a generous numeric box; weights are only
/// sanity-bounded to avoid runaway iterates.
fn clamp_log(v: f64) -> f64 {
    v.clamp(-60.0, 60.0)
}

/// Turn a converged solver state into a canonical mixture, rejecting
/// solutions whose weights leave (0, 1).
fn canonicalize(sys: &MomentSystem, x: &[f64], residual: f64) -> Option<RecoveredMixture> {
    let k = sys.k;
    let mut weights: Vec<f64> = x[2 * k..].to_vec();
    weights.push(1.0 - weights.iter().sum::<f64>());
    // Mixture weights must stay strictly inside the simplex; a single
    // component has the exact weight 1.
    if k > 1 && weights.iter().any(|w| !(0.0 < *w && *w < 1.0)) {
        return None;
    }
    let mut comps: Vec<([f64; 2], f64)> = (0..k)
        .map(|i| {
            (
                [x[2 * i].exp(), x[2 * i + 1].exp()],
                weights[i],
            )
        })
        .collect();
    comps.sort_by(|a, b| {
        (a.0[0], a.0[1])
            .partial_cmp(&(b.0[0], b.0[1]))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Some(RecoveredMixture {
        components: comps.iter().map(|c| c.0).collect(),
        weights: comps.iter().map(|c| c.1).collect(),
        residual,
        basin_count: 1,
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// Componentwise closeness of two canonical mixtures.
pub fn mixtures_close(a: &RecoveredMixture, b: &RecoveredMixture, tol: f64) -> bool {
    a.components.len() == b.components.len()
        && a.components
            .iter()
            .zip(&b.components)
            .all(|(x, y)| close(x[0], y[0], tol) && close(x[1], y[1], tol))
        && a.weights
            .iter()
            .zip(&b.weights)
            .all(|(x, y)| close(*x, *y, tol))
}

/// A random point of the probability simplex.
fn random_simplex(k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut cuts: Vec<f64> = (0..k - 1).map(|_| rng.gen_range(0.0..1.0)).collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.push(1.0);
    let mut prev = 0.0;
    cuts.iter()
        .map(|c| {
            let v = c - prev;
            prev = *c;
            v
        })
        .collect()
}

/// Weights that match the leading moments exactly for the given components:
/// the moment map is linear in the weights, so `m_1..m_{k-1}` plus the
/// sum-to-one constraint pin them by a k×k solve. Falls back to a random
/// simplex point on degeneracy; the result is clamped into the open simplex.
fn matched_weights(sys: &MomentSystem, comps: &[[f64; 2]], rng: &mut impl Rng) -> Vec<f64> {
    let k = sys.k;
    if k == 1 {
        return vec![1.0];
    }
    let tables: Vec<Vec<(f64, f64, f64)>> = comps
        .iter()
        .map(|c| sys.symbolics.eval_f64(c[0], c[1]))
        .collect();
    let mut a = vec![vec![0.0; k]; k];
    let mut b = vec![0.0; k];
    for r in 1..k {
        for i in 0..k {
            a[r - 1][i] = tables[i][r].0;
        }
        b[r - 1] = sys.target[r - 1];
    }
    a[k - 1] = vec![1.0; k];
    b[k - 1] = 1.0;
    let mut w = match solve_dense(&a, &b) {
        Some(w) => w,
        None => random_simplex(k, rng),
    };
    for v in &mut w {
        *v = v.clamp(0.02, 0.98);
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// Starting points for the multi-start solver.
///
/// Most starts are informed: the closed-form single-component inversion of
/// `(m_1, m_2)` anchors the scale, components are log-jittered around it
/// (alternating tight and wide jitter), and weights come from the linear
/// leading-moment match above. A fixed share of raw starts, log-uniform in
/// `[0.1, 10]` with random simplex weights, keeps the sweep covering the
/// whole box. Cold raw starts alone stall far from the moment locus, which
/// is why the anchored construction carries the load.
fn generate_starts<R: Rng>(sys: &MomentSystem, config: &SolverConfig, rng: &mut R) -> Vec<Vec<f64>> {
    let k = sys.k;
    let anchor = invert_single(sys.family, sys.target[0], sys.target[1])
        .map(|[a, b]| [a.ln(), b.ln()])
        .unwrap_or([0.0, 0.0]);
    // Jitter widths cycle through tight and wide tiers per component, so
    // starts cover both balanced mixtures and mixtures with one component
    // far from the single-component anchor.
    const TIERS: [f64; 4] = [0.5, 1.0, 1.8, 2.6];
    let jittered = |idx: usize, ci: usize, rng: &mut R| -> [f64; 2] {
        let sigma = TIERS[(idx + ci * 2) % TIERS.len()];
        [
            anchor[0] + rng.gen_range(-sigma..sigma),
            anchor[1] + rng.gen_range(-sigma..sigma),
        ]
    };
    (0..config.starts)
        .map(|idx| {
            // Cycle through three start kinds: anchored jitter, moment
            // completion (last component solved in closed form from the
            // residual first two moments), and raw box samples.
            let kind = idx % 5;
            let mut comps_log: Vec<[f64; 2]>;
            let mut weights: Vec<f64>;
            match kind {
                4 => {
                    comps_log = (0..k)
                        .map(|_| {
                            [
                                rng.gen_range(-1.0f64..1.0) * std::f64::consts::LN_10,
                                rng.gen_range(-1.0f64..1.0) * std::f64::consts::LN_10,
                            ]
                        })
                        .collect();
                    weights = random_simplex(k, rng);
                }
                1 | 2 | 3 => {
                    // Moment completion: jitter all but the last component,
                    // draw weights, then solve the last component from what
                    // is left of m_1 and m_2.
                    comps_log = (0..k - 1).map(|ci| jittered(idx / 5, ci, rng)).collect();
                    weights = random_simplex(k, rng);
                    for w in &mut weights {
                        *w = w.clamp(0.05, 0.95);
                    }
                    let total: f64 = weights.iter().sum();
                    weights.iter_mut().for_each(|w| *w /= total);
                    let mut rest1 = sys.target[0];
                    let mut rest2 = sys.target[1];
                    for (c, w) in comps_log.iter().zip(&weights) {
                        let table = sys.symbolics.eval_f64(c[0].exp(), c[1].exp());
                        rest1 -= w * table[1].0;
                        rest2 -= w * table[2].0;
                    }
                    let wk = weights[k - 1];
                    let last =
                        invert_single(sys.family, rest1 / wk, rest2 / wk)
                            .map(|[a, b]| [a.ln(), b.ln()])
                            .unwrap_or_else(|_| jittered(idx / 5, k - 1, rng));
                    comps_log.push(last);
                }
                _ => {
                    comps_log = (0..k).map(|ci| jittered(idx / 5, ci, rng)).collect();
                    let comps: Vec<[f64; 2]> = comps_log
                        .iter()
                        .map(|c| [c[0].exp(), c[1].exp()])
                        .collect();
                    weights = matched_weights(sys, &comps, rng);
                }
            }
            let mut x = Vec::with_capacity(sys.n_params());
            for c in &comps_log {
                x.push(c[0]);
                x.push(c[1]);
            }
            x.extend(weights.iter().take(k - 1));
            x
        })
        .collect()
}

/// Multi-start solve: damped Newton on the square system `d = 3k-1`; for
/// overdetermined systems each start first solves the leading square
/// subsystem with Newton (its fibers are finite) and then runs
/// Levenberg-Marquardt on the full scaled residuals, which either polishes
/// the point to a genuine solution or rejects a spurious fiber point.
pub fn solve(sys: &MomentSystem, config: &SolverConfig) -> SolutionSet {
    let k = sys.k;
    let n = sys.n_params();
    // Draw all starts up front so parallel execution stays deterministic.
    let mut rng = rng_for(config.seed, &format!("estimate/{}/k{}/d{}", sys.family.tag(), k, sys.d));
    let starts = generate_starts(sys, config, &mut rng);

    let square = sys.d == n;
    let head = if square {
        None
    } else {
        Some(
            MomentSystem::new(sys.family, k, sys.target[..n].to_vec())
                .expect("leading subsystem is square"),
        )
    };
    let mut runs: Vec<(usize, Vec<f64>)> = starts
        .par_iter()
        .enumerate()
        .filter_map(|(idx, x0)| {
            let solved = if square {
                // Levenberg damping rescues starts where the plain Newton
                // direction fails (near-singular Jacobians at almost
                // coincident components).
                newton_run(sys, x0, config).or_else(|| lm_run(sys, x0, config))
            } else {
                let head_sys = head.as_ref().expect("overdetermined");
                newton_run(head_sys, x0, config)
                    .or_else(|| lm_run(head_sys, x0, config))
                    .and_then(|x| lm_run(sys, &x, config))
                    .or_else(|| lm_run(sys, x0, config))
            };
            solved.map(|x| (idx, x))
        })
        .collect();
    runs.sort_by_key(|(idx, _)| *idx);

    let mut converged = Vec::new();
    for (_, x) in runs {
        let (res, _) = sys.residual_jacobian(&x);
        let residual = sup_norm(&res);
        if let Some(mix) = canonicalize(sys, &x, residual) {
            converged.push(mix);
        }
    }
    let converged_starts = converged.len();
    // Sort before clustering so the outcome does not depend on start order.
    converged.sort_by(|a, b| {
        a.residual
            .partial_cmp(&b.residual)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| {
                a.components
                    .iter()
                    .flatten()
                    .partial_cmp(b.components.iter().flatten())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });
    let mut clusters: Vec<RecoveredMixture> = Vec::new();
    for mix in converged {
        match clusters
            .iter_mut()
            .find(|c| mixtures_close(c, &mix, config.merge_tol))
        {
            Some(c) => c.basin_count += 1,
            None => clusters.push(mix),
        }
    }
    // Uniqueness needs a single cluster corroborated by at least two
    // independently converged starts. (A share-of-all-starts threshold is
    // not workable here: across random planted mixtures the basin of the
    // true solution captures anywhere from a couple to half of the starts.)
    let verdict = match clusters.len() {
        0 => UniquenessVerdict::NoneFound,
        1 if clusters[0].basin_count >= 2 => UniquenessVerdict::UniqueUpToPermutation,
        _ => UniquenessVerdict::MultipleFound,
    };
    SolutionSet {
        family: sys.family,
        k,
        d: sys.d,
        solutions: clusters,
        verdict,
        converged_starts,
        total_starts: config.starts,
    }
}

/// One row of an identifiability report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub d: usize,
    pub trials: usize,
    /// Fraction of trials whose planted mixture appears among the clusters.
    pub recovery_rate: f64,
    /// Fraction of trials with verdict `UniqueUpToPermutation`.
    pub unique_rate: f64,
    pub mean_clusters: f64,
    pub none_found: usize,
}

/// Summary of planted-mixture experiments at `d = 3k-1, 3k, 3k+2`.
///
/// The verdicts are empirical: they count solver outcomes on random planted
/// mixtures and prove nothing beyond the trials run.
#[derive(Debug, Clone, Serialize)]
pub struct IdentifiabilityReport {
    pub family: Family,
    pub k: usize,
    pub seed: u64,
    pub rows: Vec<ReportRow>,
}

/// A random planted mixture: parameters log-uniform in `[0.2, 5]`, weights
/// inside `[0.2, 0.8]`.
pub fn plant_mixture(family: Family, k: usize, rng: &mut impl Rng) -> (Vec<[f64; 2]>, Vec<f64>) {
    let _ = family;
    let span = (5.0f64 / 0.2).ln();
    let comps: Vec<[f64; 2]> = (0..k)
        .map(|_| {
            [
                0.2 * (rng.gen_range(0.0..1.0) * span).exp(),
                0.2 * (rng.gen_range(0.0..1.0) * span).exp(),
            ]
        })
        .collect();
    let weights: Vec<f64> = loop {
        let mut cuts: Vec<f64> = (0..k - 1).map(|_| rng.gen_range(0.0..1.0)).collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.push(1.0);
        let mut prev = 0.0;
        let w: Vec<f64> = cuts
            .iter()
            .map(|c| {
                let v = c - prev;
                prev = *c;
                v
            })
            .collect();
        if w.iter().all(|v| (0.2..=0.8).contains(v)) || k == 1 {
            break w;
        }
    };
    (comps, weights)
}

/// Forward moments `m_1..m_d` of a float mixture.
pub fn forward_moments(
    family: Family,
    components: &[[f64; 2]],
    weights: &[f64],
    d: usize,
) -> Vec<f64> {
    let mut acc = vec![0.0; d];
    for (c, w) in components.iter().zip(weights) {
        let m = match family {
            Family::InverseGaussian => crate::moments::ig_moments_f64(c[0], c[1], d),
            Family::Gamma => crate::moments::gamma_moments_f64(c[0], c[1], d),
        };
        for r in 1..=d {
            acc[r - 1] += w * m[r];
        }
    }
    acc
}

/// Does the planted mixture appear among the clusters (componentwise within
/// `tol`, after canonical sorting)?
pub fn planted_recovered(
    solutions: &SolutionSet,
    components: &[[f64; 2]],
    weights: &[f64],
    tol: f64,
) -> bool {
    let mut planted: Vec<([f64; 2], f64)> = components
        .iter()
        .cloned()
        .zip(weights.iter().cloned())
        .collect();
    planted.sort_by(|a, b| {
        (a.0[0], a.0[1])
            .partial_cmp(&(b.0[0], b.0[1]))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let target = RecoveredMixture {
        components: planted.iter().map(|c| c.0).collect(),
        weights: planted.iter().map(|c| c.1).collect(),
        residual: 0.0,
        basin_count: 0,
    };
    solutions
        .solutions
        .iter()
        .any(|s| mixtures_close(s, &target, tol))
}

/// Run planted-mixture trials at `d = 3k-1, 3k, 3k+2` and tabulate recovery
/// and uniqueness rates.
pub fn identifiability_report(
    family: Family,
    k: usize,
    trials: usize,
    seed: u64,
    config: &SolverConfig,
) -> IdentifiabilityReport {
    assert!((1..=3).contains(&k), "reports cover k = 1, 2, 3");
    let mut rng = rng_for(seed, &format!("report/{}/k{}", family.tag(), k));
    let planted: Vec<(Vec<[f64; 2]>, Vec<f64>)> =
        (0..trials).map(|_| plant_mixture(family, k, &mut rng)).collect();
    let depths = [3 * k - 1, 3 * k, 3 * k + 2];
    let mut rows = Vec::new();
    for d in depths {
        let mut recovered = 0usize;
        let mut unique = 0usize;
        let mut none = 0usize;
        let mut cluster_total = 0usize;
        for (trial, (comps, weights)) in planted.iter().enumerate() {
            let target = forward_moments(family, comps, weights, d);
            let sys = MomentSystem::new(family, k, target).expect("d >= 3k-1");
            let mut cfg = config.clone();
            cfg.seed = crate::rng::derive_seed(seed, &format!("trial{trial}/d{d}"));
            let set = solve(&sys, &cfg);
            if planted_recovered(&set, comps, weights, 1e-6) {
                recovered += 1;
            }
            if set.verdict == UniquenessVerdict::UniqueUpToPermutation {
                unique += 1;
            }
            if set.verdict == UniquenessVerdict::NoneFound {
                none += 1;
            }
            cluster_total += set.solutions.len();
        }
        rows.push(ReportRow {
            d,
            trials,
            recovery_rate: recovered as f64 / trials as f64,
            unique_rate: unique as f64 / trials as f64,
            mean_clusters: cluster_total as f64 / trials as f64,
            none_found: none,
        });
    }
    IdentifiabilityReport {
        family,
        k,
        seed,
        rows,
    }
}
