//! Certified dimension checks for the mixture moment varieties.
//!
//! The moment variety of a k-mixture is the k-th secant variety of the
//! moment surface, so its dimension equals the generic rank of the Jacobian
//! of the mixture moment map. Rank is lower-semicontinuous: a single rational
//! point where the exact Jacobian rank hits the expected dimension
//! `min(3k-1, d)` certifies nondefectivity. A rank deficit at finitely many
//! random points certifies nothing, so the only other verdict is
//! `Inconclusive`.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::RationalMatrix;
use crate::moments::{mixture_param_names, ComponentSymbolics, Family};
use crate::rng::rng_for;

/// Sampling box for the random integer parameters.
pub const SAMPLE_BOUND: i64 = 100;
/// Default number of sampled points before giving up.
pub const DEFAULT_RETRIES: usize = 5;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SecantError {
    #[error("inverse Gaussian Jacobians need lambda_i != 0; resample the point")]
    ZeroLambda,
    #[error("point must assign all 3k-1 parameters (expected {expected}, got {got})")]
    BadPointLength { expected: usize, got: usize },
}

/// Verdict of a dimension certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Nondefective,
    Inconclusive,
}

/// Outcome of one certified rank computation.
#[derive(Debug, Clone)]
pub struct DimensionCertificate {
    pub family: Family,
    pub d: usize,
    pub k: usize,
    pub seed: u64,
    /// The sampled parameter assignment of the successful attempt (or the
    /// last attempt when inconclusive). Empty when no samples were drawn.
    pub point: Vec<(String, BigRational)>,
    pub jacobian_rank: usize,
    pub expected_dim: usize,
    pub verdict: Verdict,
    pub elapsed_ms: u64,
}

impl Serialize for DimensionCertificate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Assignment<'a> {
            name: &'a str,
            value: String,
        }
        let mut st = s.serialize_struct("DimensionCertificate", 9)?;
        st.serialize_field("family", &self.family)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("k", &self.k)?;
        st.serialize_field("seed", &self.seed)?;
        let point: Vec<Assignment> = self
            .point
            .iter()
            .map(|(name, v)| Assignment {
                name,
                value: format!("{}/{}", v.numer(), v.denom()),
            })
            .collect();
        st.serialize_field("point", &point)?;
        st.serialize_field("jacobian_rank", &self.jacobian_rank)?;
        st.serialize_field("expected_dim", &self.expected_dim)?;
        st.serialize_field("verdict", &self.verdict)?;
        st.serialize_field("elapsed_ms", &self.elapsed_ms)?;
        st.end()
    }
}

/// `min(3k-1, d)`: the expected dimension of the k-th secant variety of a
/// surface in projective d-space.
pub fn expected_dim(d: usize, k: usize) -> usize {
    (3 * k - 1).min(d)
}

/// The exact d×(3k-1) Jacobian of the mixture moment map `(m_1, ..., m_d)`
/// at a parameter point `(a_1, b_1, ..., a_k, b_k, alpha_1, ..., alpha_{k-1})`.
pub fn jacobian_at(
    family: Family,
    d: usize,
    k: usize,
    point: &[BigRational],
) -> Result<RationalMatrix, SecantError> {
    let n = 3 * k - 1;
    if point.len() != n {
        return Err(SecantError::BadPointLength {
            expected: n,
            got: point.len(),
        });
    }
    let symbolics = ComponentSymbolics::new(family, d);
    // Per-component moment values and gradients.
    let mut tables = Vec::with_capacity(k);
    for i in 0..k {
        let a = &point[2 * i];
        let b = &point[2 * i + 1];
        let table = symbolics
            .eval_exact(a, b)
            .map_err(|_| SecantError::ZeroLambda)?;
        tables.push(table);
    }
    // Weights, with alpha_k eliminated.
    let mut weights: Vec<BigRational> = point[2 * k..].to_vec();
    let mut last = BigRational::from_integer(BigInt::from(1));
    for w in &weights {
        last -= w;
    }
    weights.push(last);

    let mut jac = RationalMatrix::zeros(d, n);
    for r in 1..=d {
        for i in 0..k {
            let (_, da, db) = &tables[i][r];
            jac.set(r - 1, 2 * i, &weights[i] * da);
            jac.set(r - 1, 2 * i + 1, &weights[i] * db);
        }
        for j in 0..k - 1 {
            let mj = &tables[j][r].0;
            let mk = &tables[k - 1][r].0;
            jac.set(r - 1, 2 * k + j, mj - mk);
        }
    }
    Ok(jac)
}

/// Draw a random parameter point: integer distribution parameters in
/// `[-SAMPLE_BOUND, SAMPLE_BOUND]` (nonzero `lambda_i` for the inverse
/// Gaussian) and weights `c_i / sum c_j` with `c_j` uniform in
/// `1..=SAMPLE_BOUND`.
fn sample_point(family: Family, k: usize, rng: &mut impl Rng) -> Vec<BigRational> {
    let rat = |n: i64| BigRational::from_integer(BigInt::from(n));
    let mut point = Vec::with_capacity(3 * k - 1);
    for _ in 0..k {
        let a = rng.gen_range(-SAMPLE_BOUND..=SAMPLE_BOUND);
        let mut b = rng.gen_range(-SAMPLE_BOUND..=SAMPLE_BOUND);
        if family == Family::InverseGaussian {
            while b == 0 {
                b = rng.gen_range(-SAMPLE_BOUND..=SAMPLE_BOUND);
            }
        }
        point.push(rat(a));
        point.push(rat(b));
    }
    let counts: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=SAMPLE_BOUND)).collect();
    let total: i64 = counts.iter().sum();
    for &c in counts.iter().take(k - 1) {
        point.push(BigRational::new(BigInt::from(c), BigInt::from(total)));
    }
    point
}

/// Certify `dim Sec_k = min(3k-1, d)` by exact Jacobian rank at up to
/// `retries` seeded random points. Deterministic in `(family, d, k, seed)`.
pub fn certify(
    family: Family,
    d: usize,
    k: usize,
    seed: u64,
    retries: usize,
) -> DimensionCertificate {
    assert!(d >= 2 && k >= 1, "certify needs d >= 2 and k >= 1");
    let start = std::time::Instant::now();
    let mut rng = rng_for(seed, &format!("secant/{}/d{}/k{}", family.tag(), d, k));
    let names = mixture_param_names(family, k);
    let expected = expected_dim(d, k);
    let mut last_point = Vec::new();
    let mut last_rank = 0;
    for _ in 0..retries {
        let point = sample_point(family, k, &mut rng);
        let jac = jacobian_at(family, d, k, &point).expect("sampled lambda is nonzero");
        let rank = jac.rank_exact();
        debug_assert!(rank <= expected);
        last_point = names.iter().cloned().zip(point).collect();
        last_rank = rank;
        if rank == expected {
            return DimensionCertificate {
                family,
                d,
                k,
                seed,
                point: last_point,
                jacobian_rank: rank,
                expected_dim: expected,
                verdict: Verdict::Nondefective,
                elapsed_ms: start.elapsed().as_millis() as u64,
            };
        }
    }
    DimensionCertificate {
        family,
        d,
        k,
        seed,
        point: last_point,
        jacobian_rank: last_rank,
        expected_dim: expected,
        verdict: Verdict::Inconclusive,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

/// The `(d, k)` grid of the base-case sweep: `2 <= d <= 8`,
/// `1 <= k <= ceil((d+1)/3)`.
pub fn sweep_grid() -> Vec<(usize, usize)> {
    let mut grid = Vec::new();
    for d in 2..=8usize {
        for k in 1..=(d + 1).div_ceil(3) {
            grid.push((d, k));
        }
    }
    grid
}

/// Run the base-case sweep for one family. Certificates for distinct
/// `(d, k)` pairs run as independent parallel tasks and are merged in
/// `(d, k)` order; each task derives its own seed, so the result does not
/// depend on scheduling.
pub fn base_case_sweep(family: Family, seed: u64, retries: usize) -> Vec<DimensionCertificate> {
    let mut certs: Vec<DimensionCertificate> = sweep_grid()
        .into_par_iter()
        .map(|(d, k)| certify(family, d, k, seed, retries))
        .collect();
    certs.sort_by_key(|c| (c.d, c.k));
    certs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn gamma_single_component_jacobian_by_hand() {
        // m_1 = theta*s, m_2 = theta^2 s (s+1); at (1, 1) the Jacobian is
        // [[1, 1], [4, 3]].
        let j = jacobian_at(Family::Gamma, 2, 1, &[rat(1), rat(1)]).unwrap();
        assert_eq!(j.get(0, 0), &rat(1));
        assert_eq!(j.get(0, 1), &rat(1));
        assert_eq!(j.get(1, 0), &rat(4));
        assert_eq!(j.get(1, 1), &rat(3));
    }

    #[test]
    fn ig_first_moment_is_mu() {
        // m_1 = mu: the 1x2 Jacobian is [[1, 0]] at any point.
        for (mu, lambda) in [(1, 1), (5, -3), (-2, 7)] {
            let j = jacobian_at(Family::InverseGaussian, 1, 1, &[rat(mu), rat(lambda)]).unwrap();
            assert_eq!(j.get(0, 0), &rat(1));
            assert_eq!(j.get(0, 1), &rat(0));
        }
    }

    #[test]
    fn ig_zero_lambda_signals_resample() {
        let err = jacobian_at(Family::InverseGaussian, 3, 1, &[rat(1), rat(0)]).unwrap_err();
        assert_eq!(err, SecantError::ZeroLambda);
    }

    #[test]
    fn certify_base_cases() {
        let c = certify(Family::InverseGaussian, 5, 2, 7, DEFAULT_RETRIES);
        assert_eq!(c.jacobian_rank, 5);
        assert_eq!(c.expected_dim, 5);
        assert_eq!(c.verdict, Verdict::Nondefective);

        let c = certify(Family::Gamma, 2, 1, 0, DEFAULT_RETRIES);
        assert_eq!(c.jacobian_rank, 2);
        assert_eq!(c.verdict, Verdict::Nondefective);

        let c = certify(Family::InverseGaussian, 9, 3, 1, DEFAULT_RETRIES);
        assert_eq!(c.jacobian_rank, 8);
        assert_eq!(c.expected_dim, 8);
        assert_eq!(c.verdict, Verdict::Nondefective);
    }

    #[test]
    fn certificates_are_deterministic() {
        let a = certify(Family::Gamma, 6, 2, 99, DEFAULT_RETRIES);
        let b = certify(Family::Gamma, 6, 2, 99, DEFAULT_RETRIES);
        assert_eq!(a.point, b.point);
        assert_eq!(a.jacobian_rank, b.jacobian_rank);
        let json_a = serde_json::to_string(&a).unwrap();
        // Different seeds give different sample points.
        let c = certify(Family::Gamma, 6, 2, 100, DEFAULT_RETRIES);
        assert_ne!(a.point, c.point);
        assert!(json_a.contains("\"verdict\":\"Nondefective\""));
    }

    #[test]
    fn rank_bounded_by_expected_dim_and_monotone_in_rows() {
        let mut rng = rng_for(3, "tests/rank-bounds");
        for family in [Family::InverseGaussian, Family::Gamma] {
            for (d, k) in [(4usize, 2usize), (6, 2), (7, 3)] {
                let point = sample_point(family, k, &mut rng);
                let jac = jacobian_at(family, d, k, &point).unwrap();
                let rank = jac.rank_exact();
                assert!(rank <= expected_dim(d, k));
                // Dropping the last row can only reduce the rank.
                let rows: Vec<usize> = (0..d - 1).collect();
                let sub = jac.take_rows(&rows);
                assert!(sub.rank_exact() <= rank);
                // Scaling the last row by a nonzero rational never changes it.
                let scaled = jac.scale_row(d - 1, &BigRational::new(7.into(), 3.into()));
                assert_eq!(scaled.rank_exact(), rank);
            }
        }
    }

    #[test]
    fn sweep_grid_matches_bound() {
        let grid = sweep_grid();
        assert_eq!(grid.len(), 16);
        assert!(grid.contains(&(2, 1)));
        assert!(grid.contains(&(8, 3)));
        assert!(!grid.contains(&(5, 3)));
    }

    #[test]
    fn sweep_with_zero_retries_is_inconclusive() {
        let certs = base_case_sweep(Family::Gamma, 0, 0);
        assert_eq!(certs.len(), 16);
        assert!(certs.iter().all(|c| c.verdict == Verdict::Inconclusive));
    }
}
