//! The 3×d moment matrices and their maximal minors.
//!
//! The degree-d moment variety of each family is cut out by the maximal
//! minors of a 3×d matrix of linear and quadratic forms in the coordinates
//! `x_0..x_d`. This module builds those matrices, enumerates and expands
//! the minors, classifies them by degree, and verifies exact vanishing on
//! moment points.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::algebra::MultiPoly;
use crate::moments::{Family, MomentVector};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MinorError {
    #[error("moment matrices need d >= 3 (got d = {0})")]
    DegreeTooSmall(usize),
    #[error("moment vector family/degree does not match the minor set")]
    Mismatch,
    #[error("vanishing checks need an exact-mode moment vector")]
    NotExact,
}

/// The 3×d matrix of coordinate forms whose maximal minors generate the
/// moment ideal.
#[derive(Debug, Clone)]
pub struct MomentMatrix {
    pub family: Family,
    pub d: usize,
    /// Row-major 3×d grid of polynomials in `x_0..x_d`.
    pub entries: Vec<MultiPoly>,
}

/// All maximal minors of a moment matrix with their degree histogram.
#[derive(Debug, Clone)]
pub struct MinorSet {
    pub family: Family,
    pub d: usize,
    pub minors: Vec<MultiPoly>,
    pub degree_histogram: BTreeMap<u32, usize>,
}

/// JSON shape of the `minors` subcommand output.
#[derive(Debug, Serialize)]
pub struct MinorReport {
    pub family: Family,
    pub d: usize,
    pub count: usize,
    pub degree_histogram: BTreeMap<u32, usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub polynomials: Option<Vec<String>>,
}

/// Variable names `x0..xd` of the ambient projective space.
pub fn coordinate_vars(d: usize) -> Vec<String> {
    (0..=d).map(|i| format!("x{i}")).collect()
}

/// Build the family's 3×d moment matrix.
///
/// Inverse Gaussian columns: `(x_0^2, 0, x_1^2)` followed by
/// `(x_{j-1}, (2j-1) x_j, x_{j+1})` for `j = 1..d-1`.
/// Gamma columns: `(j x_j, x_j, x_{j+1})` for `j = 0..d-1`.
pub fn build_matrix(family: Family, d: usize) -> Result<MomentMatrix, MinorError> {
    if d < 3 {
        return Err(MinorError::DegreeTooSmall(d));
    }
    let names = coordinate_vars(d);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let x = |i: usize| MultiPoly::var(&refs, &format!("x{i}"));
    let scaled = |c: i64, i: usize| {
        x(i).scale(&BigRational::from_integer(c.into()))
    };
    let mut rows: [Vec<MultiPoly>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    match family {
        Family::InverseGaussian => {
            rows[0].push(&x(0) * &x(0));
            rows[1].push(MultiPoly::zero(&refs));
            rows[2].push(&x(1) * &x(1));
            for j in 1..d {
                rows[0].push(x(j - 1));
                rows[1].push(scaled(2 * j as i64 - 1, j));
                rows[2].push(x(j + 1));
            }
        }
        Family::Gamma => {
            for j in 0..d {
                rows[0].push(scaled(j as i64, j));
                rows[1].push(x(j));
                rows[2].push(x(j + 1));
            }
        }
    }
    let mut entries = Vec::with_capacity(3 * d);
    for row in rows {
        entries.extend(row);
    }
    Ok(MomentMatrix { family, d, entries })
}

impl MomentMatrix {
    pub fn entry(&self, row: usize, col: usize) -> &MultiPoly {
        &self.entries[row * self.d + col]
    }
}

/// Expand all `binom(d, 3)` maximal minors by cofactor expansion along the
/// column of lowest total degree.
pub fn maximal_minors(matrix: &MomentMatrix) -> MinorSet {
    let d = matrix.d;
    let mut minors = Vec::new();
    for a in 0..d {
        for b in a + 1..d {
            for c in b + 1..d {
                minors.push(det3(matrix, [a, b, c]));
            }
        }
    }
    let mut degree_histogram = BTreeMap::new();
    for m in &minors {
        *degree_histogram.entry(m.total_degree()).or_insert(0) += 1;
    }
    MinorSet {
        family: matrix.family,
        d,
        minors,
        degree_histogram,
    }
}

fn det3(matrix: &MomentMatrix, cols: [usize; 3]) -> MultiPoly {
    // Pick the selected column with the lowest total degree to expand along.
    let col_degree = |c: usize| -> u32 {
        (0..3).map(|r| matrix.entry(r, c).total_degree()).sum()
    };
    let (pos, _) = cols
        .iter()
        .enumerate()
        .min_by_key(|(_, &c)| col_degree(c))
        .expect("three columns");
    let order: [usize; 3] = match pos {
        0 => [cols[0], cols[1], cols[2]],
        1 => [cols[1], cols[0], cols[2]],
        _ => [cols[2], cols[0], cols[1]],
    };
    let sign_flip = pos == 1; // one column transposition flips the sign
    let e = |r: usize, c: usize| -> &MultiPoly { matrix.entry(r, c) };
    let minor2 = |r1: usize, r2: usize| -> MultiPoly {
        let a = e(r1, order[1]) * e(r2, order[2]);
        let b = e(r1, order[2]) * e(r2, order[1]);
        &a - &b
    };
    let t0 = e(0, order[0]) * &minor2(1, 2);
    let t1 = e(1, order[0]) * &minor2(0, 2);
    let t2 = e(2, order[0]) * &minor2(0, 1);
    let mut det = &(&t0 - &t1) + &t2;
    if sign_flip {
        det = -&det;
    }
    det
}

impl MinorSet {
    pub fn report(&self, with_polynomials: bool) -> MinorReport {
        MinorReport {
            family: self.family,
            d: self.d,
            count: self.minors.len(),
            degree_histogram: self.degree_histogram.clone(),
            polynomials: with_polynomials
                .then(|| self.minors.iter().map(MultiPoly::to_text).collect()),
        }
    }
}

/// True iff every minor vanishes exactly at `(x_0, ..., x_d) = (m_0, ..., m_d)`.
pub fn verify_vanishing(minors: &MinorSet, mv: &MomentVector) -> Result<bool, MinorError> {
    if minors.family != mv.family || minors.d != mv.d {
        return Err(MinorError::Mismatch);
    }
    let values = mv.exact_values().ok_or(MinorError::NotExact)?;
    let point: BTreeMap<String, BigRational> = values
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("x{i}"), v.clone()))
        .collect();
    for m in &minors.minors {
        if !m.eval(&point).expect("all coordinates assigned").is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Evaluate all minors at an arbitrary exact point of projective space.
pub fn any_minor_nonzero(minors: &MinorSet, point_values: &[BigRational]) -> bool {
    assert_eq!(point_values.len(), minors.d + 1);
    let point: BTreeMap<String, BigRational> = point_values
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("x{i}"), v.clone()))
        .collect();
    minors
        .minors
        .iter()
        .any(|m| !m.eval(&point).expect("all coordinates assigned").is_zero())
}

#[cfg(test)]
fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc = 1usize;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{
        gamma_moments, ig_moments, mixture_moments, ComponentParams, GammaParams, IGParams,
        MixtureParams,
    };
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn matrix_templates_d3() {
        let m = build_matrix(Family::InverseGaussian, 3).unwrap();
        let names = coordinate_vars(3);
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let p = |s: &str| MultiPoly::parse(&refs, s).unwrap();
        // Columns (x0^2, 0, x1^2), (x0, x1, x2), (x1, 3x2, x3).
        assert_eq!(m.entry(0, 0), &p("x0^2"));
        assert_eq!(m.entry(1, 0), &MultiPoly::zero(&refs));
        assert_eq!(m.entry(2, 0), &p("x1^2"));
        assert_eq!(m.entry(0, 1), &p("x0"));
        assert_eq!(m.entry(1, 1), &p("x1"));
        assert_eq!(m.entry(2, 1), &p("x2"));
        assert_eq!(m.entry(0, 2), &p("x1"));
        assert_eq!(m.entry(1, 2), &p("3*x2"));
        assert_eq!(m.entry(2, 2), &p("x3"));

        let m = build_matrix(Family::Gamma, 3).unwrap();
        assert_eq!(m.entry(0, 0), &MultiPoly::zero(&refs));
        assert_eq!(m.entry(1, 0), &p("x0"));
        assert_eq!(m.entry(2, 0), &p("x1"));
        assert_eq!(m.entry(0, 1), &p("x1"));
        assert_eq!(m.entry(1, 1), &p("x1"));
        assert_eq!(m.entry(2, 1), &p("x2"));
        assert_eq!(m.entry(0, 2), &p("2*x2"));
        assert_eq!(m.entry(1, 2), &p("x2"));
        assert_eq!(m.entry(2, 2), &p("x3"));

        assert_eq!(
            build_matrix(Family::InverseGaussian, 2).unwrap_err(),
            MinorError::DegreeTooSmall(2)
        );
    }

    #[test]
    fn minor_counts_and_degrees() {
        // IG d=3: a single quartic.
        let ms = maximal_minors(&build_matrix(Family::InverseGaussian, 3).unwrap());
        assert_eq!(ms.minors.len(), 1);
        assert_eq!(ms.degree_histogram.get(&4), Some(&1));

        // IG d=5: 4 cubics + 6 quartics.
        let ms = maximal_minors(&build_matrix(Family::InverseGaussian, 5).unwrap());
        assert_eq!(ms.minors.len(), 10);
        assert_eq!(ms.degree_histogram.get(&3), Some(&binom(4, 3)));
        assert_eq!(ms.degree_histogram.get(&4), Some(&binom(4, 2)));

        // Gamma d=4: 4 cubics.
        let ms = maximal_minors(&build_matrix(Family::Gamma, 4).unwrap());
        assert_eq!(ms.minors.len(), 4);
        assert_eq!(ms.degree_histogram.get(&3), Some(&4));
    }

    #[test]
    fn histogram_identity_for_ig() {
        for d in 3..=8 {
            let ms = maximal_minors(&build_matrix(Family::InverseGaussian, d).unwrap());
            let cubics = ms.degree_histogram.get(&3).copied().unwrap_or(0);
            let quartics = ms.degree_histogram.get(&4).copied().unwrap_or(0);
            assert_eq!(cubics, binom(d - 1, 3));
            assert_eq!(quartics, binom(d - 1, 2));
            assert_eq!(cubics + quartics, binom(d, 3));
        }
    }

    #[test]
    fn vanishing_on_moment_points() {
        let ig4 = maximal_minors(&build_matrix(Family::InverseGaussian, 4).unwrap());
        let mv = ig_moments(
            &IGParams {
                mu: rat(1),
                lambda: rat(1),
            },
            4,
        )
        .unwrap();
        assert_eq!(mv.exact_values().unwrap(), &[rat(1), rat(1), rat(2), rat(7), rat(37)]);
        assert!(verify_vanishing(&ig4, &mv).unwrap());

        let g4 = maximal_minors(&build_matrix(Family::Gamma, 4).unwrap());
        let mv = gamma_moments(
            &GammaParams {
                theta: rat(1),
                shape: rat(1),
            },
            4,
        );
        assert_eq!(
            mv.exact_values().unwrap(),
            &[rat(1), rat(1), rat(2), rat(6), rat(24)]
        );
        assert!(verify_vanishing(&g4, &mv).unwrap());

        // A non-moment point leaves at least one minor nonzero.
        let bad = MomentVector::exact(
            Family::InverseGaussian,
            vec![rat(1), rat(1), rat(1), rat(1), rat(2)],
        );
        assert!(!verify_vanishing(&ig4, &bad).unwrap());

        // Family mismatch is an error.
        assert!(verify_vanishing(&g4, &bad).is_err());
    }

    #[test]
    fn random_moment_points_vanish() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for family in [Family::InverseGaussian, Family::Gamma] {
            for d in 3..=8usize {
                let ms = maximal_minors(&build_matrix(family, d).unwrap());
                for _ in 0..25 {
                    let mv = match family {
                        Family::InverseGaussian => {
                            let mu = rat(rng.gen_range(-9i64..=9));
                            let mut lam = rat(rng.gen_range(-9i64..=9));
                            if lam.is_zero() {
                                lam = rat(2);
                            }
                            ig_moments(&IGParams { mu, lambda: lam }, d).unwrap()
                        }
                        Family::Gamma => gamma_moments(
                            &GammaParams {
                                theta: rat(rng.gen_range(-9i64..=9)),
                                shape: rat(rng.gen_range(-9i64..=9)),
                            },
                            d,
                        ),
                    };
                    assert!(verify_vanishing(&ms, &mv).unwrap());
                }
            }
        }
    }

    #[test]
    fn random_ambient_points_do_not_vanish() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(32);
        for family in [Family::InverseGaussian, Family::Gamma] {
            for d in 3..=8usize {
                let ms = maximal_minors(&build_matrix(family, d).unwrap());
                for _ in 0..25 {
                    let point: Vec<BigRational> =
                        (0..=d).map(|_| rat(rng.gen_range(1i64..=20))).collect();
                    assert!(any_minor_nonzero(&ms, &point));
                }
            }
        }
    }

    #[test]
    fn mixtures_leave_the_surface() {
        // For random IG 2-mixtures at d=5, some cubic minor is nonzero in at
        // least one of 100 trials (random-point methodology; in practice
        // nearly all trials are nonzero).
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        let ms = maximal_minors(&build_matrix(Family::InverseGaussian, 5).unwrap());
        let mut nonzero_trials = 0;
        for _ in 0..100 {
            let comp = |rng: &mut rand_chacha::ChaCha8Rng| {
                ComponentParams::InverseGaussian(IGParams {
                    mu: rat(rng.gen_range(1i64..=9)),
                    lambda: rat(rng.gen_range(1i64..=9)),
                })
            };
            let c1 = comp(&mut rng);
            let c2 = comp(&mut rng);
            let mix = MixtureParams::new(
                Family::InverseGaussian,
                vec![c1, c2],
                vec![
                    BigRational::new(BigInt::from(1), BigInt::from(3)),
                    BigRational::new(BigInt::from(2), BigInt::from(3)),
                ],
            )
            .unwrap();
            let mv = mixture_moments(&mix, 5).unwrap();
            let values = mv.exact_values().unwrap();
            let point: BTreeMap<String, BigRational> = values
                .iter()
                .enumerate()
                .map(|(i, v)| (format!("x{i}"), v.clone()))
                .collect();
            let cubic_nonzero = ms
                .minors
                .iter()
                .filter(|m| m.total_degree() == 3)
                .any(|m| !m.eval(&point).unwrap().is_zero());
            if cubic_nonzero {
                nonzero_trials += 1;
            }
        }
        assert!(nonzero_trials >= 1);
    }
}
