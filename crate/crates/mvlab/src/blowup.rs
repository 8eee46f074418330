//! Resolution of the indeterminacy loci of the moment-surface
//! parametrizations by chains of point blowups.
//!
//! Each parametrization is a rational map from the projective plane given by
//! the coordinate polynomials of [`crate::moments::homogeneous_parametrization`].
//! Its base points are resolved one chain at a time: blow up, substitute both
//! standard charts, strip the common factor, locate the new base point on
//! the exceptional line, repeat until the lift has empty base locus. Along
//! the way the multiplicity of a generic coordinate combination at every
//! center is recorded; those multiplicities are exactly the coefficients of
//! the hyperplane class in the Picard lattice.
//!
//! All chart arithmetic is exact. The conjugate families of base points cut
//! out by a Bessel polynomial are handled modulo their minimal polynomial
//! instead of by chart blowups (the chart machinery only accepts rational
//! centers); simple-ness of the roots makes every check uniform across the
//! family.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::algebra::{common_factor, rational_roots, univariate_gcd, AlgebraError, MultiPoly};
use crate::moments::{
    bessel_poly, embed_renamed, homogeneous_parametrization, Family,
};
use crate::picard::{named_class, BasisLabel, ClassName, DivisorClass, SurfaceDescriptor};

#[derive(Debug, Error)]
pub enum BlowupError {
    #[error("base point template failed exact verification: {0}")]
    Verify(String),
    #[error("common zero on the chart overlap of an exceptional divisor: {0}")]
    OverlapBasePoint(String),
    #[error("irrational common zero on an exceptional divisor: {0}")]
    IrrationalBasePoint(String),
    #[error("more than one new base point on an exceptional divisor")]
    MultipleNewPoints,
    #[error("blowup chain exceeded {0} steps")]
    Runaway(usize),
    #[error("class from the resolution disagrees with the closed form: {got} vs {want}")]
    ClassMismatch { got: String, want: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A rational map to projective space restricted to a two-variable affine
/// chart. After a blowup the first variable is the kept coordinate and the
/// exceptional locus of the most recent blowup is `{first variable = 0}`.
#[derive(Debug, Clone)]
pub struct ChartMap {
    pub vars: [String; 2],
    pub coords: Vec<MultiPoly>,
    /// Human-readable trail of the substitutions applied so far.
    pub provenance: Vec<String>,
}

impl ChartMap {
    fn var_refs(&self) -> [&str; 2] {
        [&self.vars[0], &self.vars[1]]
    }

    /// Value of every coordinate at a rational point of the chart.
    pub fn eval(&self, point: &[BigRational; 2]) -> Vec<BigRational> {
        let assign: BTreeMap<String, BigRational> = self
            .vars
            .iter()
            .cloned()
            .zip(point.iter().cloned())
            .collect();
        self.coords
            .iter()
            .map(|c| c.eval(&assign).expect("chart point assigns both variables"))
            .collect()
    }
}

/// Location of a base point inside a named affine chart.
#[derive(Debug, Clone)]
pub enum BaseLocus {
    /// An exact rational point.
    Rational([BigRational; 2]),
    /// The conjugate family of points cut out by a squarefree monic minimal
    /// polynomial in the first chart variable, second variable pinned.
    Algebraic {
        min_poly: MultiPoly,
        second: BigRational,
        count: usize,
    },
}

/// A base (indeterminacy) point of the parametrization.
#[derive(Debug, Clone)]
pub struct BasePoint {
    pub label: String,
    /// Ambient chart, e.g. `s=1`.
    pub chart: String,
    pub chart_vars: [String; 2],
    pub locus: BaseLocus,
}

/// Which of the two blowup charts a point was found in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    KeepFirst,
    KeepSecond,
}

/// A common zero of the lifted coordinates on the exceptional line.
#[derive(Debug, Clone)]
pub struct ExceptionalPoint {
    pub side: Side,
    /// Chart coordinates; the first entry is always 0 (the exceptional line).
    pub coords: [BigRational; 2],
}

/// Result of lifting a chart map through one blowup.
#[derive(Debug, Clone)]
pub struct BlowupLift {
    pub chart_first: ChartMap,
    pub factor_first: MultiPoly,
    pub chart_second: ChartMap,
    pub factor_second: MultiPoly,
    pub points: Vec<ExceptionalPoint>,
}

/// Restriction of the homogeneous parametrization to a named affine chart.
pub fn initial_chart(family: Family, d: usize, chart: &str) -> ChartMap {
    let coords = homogeneous_parametrization(family, d);
    let one = BigRational::one();
    let (vars, set_var): ([&str; 2], &str) = match (family, chart) {
        (Family::InverseGaussian, "s=1") => (["lambda", "mu"], "s"),
        (Family::InverseGaussian, "lambda=1") => (["mu", "s"], "lambda"),
        (Family::InverseGaussian, "mu=1") => (["lambda", "s"], "mu"),
        (Family::Gamma, "y=1") => (["x", "z"], "y"),
        _ => panic!("unknown chart `{chart}` for {family}"),
    };
    let coords = coords
        .iter()
        .map(|f| {
            f.subs_value(set_var, &one)
                .expect("chart variable exists")
                .embed(&vars)
                .expect("restricted map uses only chart variables")
        })
        .collect();
    ChartMap {
        vars: [vars[0].to_string(), vars[1].to_string()],
        coords,
        provenance: vec![format!("chart {chart}")],
    }
}

/// The base points of the parametrization, verified exactly.
pub fn base_points(family: Family, d: usize) -> Result<Vec<BasePoint>, BlowupError> {
    assert!(d >= 2);
    let mut points = Vec::new();
    match family {
        Family::InverseGaussian => {
            points.push(BasePoint {
                label: "P1".to_string(),
                chart: "s=1".to_string(),
                chart_vars: ["lambda".to_string(), "mu".to_string()],
                locus: BaseLocus::Rational([BigRational::zero(), BigRational::zero()]),
            });
            points.push(BasePoint {
                label: "P2".to_string(),
                chart: "lambda=1".to_string(),
                chart_vars: ["mu".to_string(), "s".to_string()],
                locus: BaseLocus::Rational([BigRational::zero(), BigRational::zero()]),
            });
            // The d-1 roots of the Bessel polynomial on the line s = 0.
            let vars = ["lambda", "s"];
            let min_poly = bessel_poly(d - 1)
                .subs_value("mu", &BigRational::one())
                .expect("bessel ring has mu")
                .embed(&vars)
                .expect("univariate in lambda");
            points.push(BasePoint {
                label: format!("P3..P{}", d + 1),
                chart: "mu=1".to_string(),
                chart_vars: ["lambda".to_string(), "s".to_string()],
                locus: BaseLocus::Algebraic {
                    min_poly,
                    second: BigRational::zero(),
                    count: d - 1,
                },
            });
        }
        Family::Gamma => {
            for i in 0..d {
                points.push(BasePoint {
                    label: format!("P{i}"),
                    chart: "y=1".to_string(),
                    chart_vars: ["x".to_string(), "z".to_string()],
                    locus: BaseLocus::Rational([
                        BigRational::zero(),
                        -BigRational::from_integer(BigInt::from(i as i64)),
                    ]),
                });
            }
        }
    }
    for p in &points {
        verify_base_point(family, d, p)?;
    }
    Ok(points)
}

/// Check that every coordinate of the ambient map vanishes at the point
/// (modulo the minimal polynomial for an algebraic family).
fn verify_base_point(family: Family, d: usize, point: &BasePoint) -> Result<(), BlowupError> {
    let chart = initial_chart(family, d, &point.chart);
    match &point.locus {
        BaseLocus::Rational(coords) => {
            let values = chart.eval(coords);
            if values.iter().any(|v| !v.is_zero()) {
                return Err(BlowupError::Verify(format!(
                    "{} does not annihilate all coordinates",
                    point.label
                )));
            }
        }
        BaseLocus::Algebraic {
            min_poly, second, ..
        } => {
            let first = chart.vars[0].clone();
            for coord in &chart.coords {
                let restricted = coord.subs_value(&chart.vars[1], second)?;
                let reduced = restricted.reduce_mod_univariate(&first, min_poly)?;
                if !reduced.is_zero() {
                    return Err(BlowupError::Verify(format!(
                        "{} does not annihilate all coordinates modulo its minimal polynomial",
                        point.label
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Multiplicity at a rational chart point of a generic linear combination of
/// the coordinates: the minimum of the per-coordinate multiplicities.
pub fn multiplicity_at(m: &ChartMap, center: &[BigRational; 2]) -> Result<u32, BlowupError> {
    let shift: BTreeMap<String, BigRational> = m
        .vars
        .iter()
        .cloned()
        .zip(center.iter().cloned())
        .collect();
    let mut best: Option<u32> = None;
    for c in &m.coords {
        if c.is_zero() {
            continue;
        }
        let mult = c.translate(&shift).multiplicity_at_origin()?;
        best = Some(best.map_or(mult, |b| b.min(mult)));
    }
    best.ok_or_else(|| BlowupError::Verify("all chart coordinates vanish".into()))
}

/// Blow up a rational center and lift the chart map through both standard
/// charts with the common factor removed, reporting all common zeros found
/// on the exceptional line `{first chart variable = 0}` of each chart.
///
/// Naming convention: in the chart keeping the first variable `p`, the old
/// second variable becomes `p * new_first`; in the chart keeping the second
/// variable `q`, the old first variable becomes `q * new_second`.
pub fn blowup_lift(
    m: &ChartMap,
    center: &[BigRational; 2],
    new_first: &str,
    new_second: &str,
) -> Result<BlowupLift, BlowupError> {
    let shift: BTreeMap<String, BigRational> = m
        .vars
        .iter()
        .cloned()
        .zip(center.iter().cloned())
        .collect();
    let translated: Vec<MultiPoly> = m.coords.iter().map(|c| c.translate(&shift)).collect();
    let center_note = if center.iter().all(Zero::is_zero) {
        String::new()
    } else {
        format!(" after translating ({}, {}) to the origin", center[0], center[1])
    };

    let [p, q] = m.var_refs();
    let lift_one = |kept: &str, replaced: &str, new_var: &str| -> Result<(ChartMap, MultiPoly), BlowupError> {
        let work_vars = [p, q, new_var];
        let kept_poly = MultiPoly::var(&work_vars, kept);
        let new_poly = MultiPoly::var(&work_vars, new_var);
        let replacement = &kept_poly * &new_poly;
        let chart_vars = [kept, new_var];
        let substituted: Vec<MultiPoly> = translated
            .iter()
            .map(|c| {
                c.embed(&work_vars)
                    .expect("same variables")
                    .subs(replaced, &replacement)
                    .expect("replaced variable exists")
                    .embed(&chart_vars)
                    .expect("replaced variable eliminated")
            })
            .collect();
        let (factor, coords) = common_factor(&substituted)?;
        let mut provenance = m.provenance.clone();
        provenance.push(format!(
            "blowup{center_note}: {replaced} = {kept}*{new_var}, removed factor {factor}"
        ));
        Ok((
            ChartMap {
                vars: [kept.to_string(), new_var.to_string()],
                coords,
                provenance,
            },
            factor,
        ))
    };

    let (chart_first, factor_first) = lift_one(p, q, new_first)?;
    let (chart_second, factor_second) = lift_one(q, p, new_second)?;

    let mut points = Vec::new();
    for (side, chart) in [
        (Side::KeepFirst, &chart_first),
        (Side::KeepSecond, &chart_second),
    ] {
        for root in exceptional_zeros(chart)? {
            if side == Side::KeepSecond && root.is_zero() {
                points.push(ExceptionalPoint {
                    side,
                    coords: [BigRational::zero(), root],
                });
            } else if side == Side::KeepFirst {
                points.push(ExceptionalPoint {
                    side,
                    coords: [BigRational::zero(), root],
                });
            }
            // Nonzero roots in the second chart lie on the overlap and were
            // already reported by the first chart.
        }
    }
    Ok(BlowupLift {
        chart_first,
        factor_first,
        chart_second,
        factor_second,
        points,
    })
}

/// Common zeros of the chart coordinates on the exceptional line
/// `{first variable = 0}`, as values of the second variable. Zeros are found
/// as rational roots of the gcd of the restricted coordinates; an
/// irrational residue is an error.
fn exceptional_zeros(chart: &ChartMap) -> Result<Vec<BigRational>, BlowupError> {
    let names = chart.var_refs();
    let mut gcd: Option<MultiPoly> = None;
    for c in &chart.coords {
        let restricted = c.subs_value(&chart.vars[0], &BigRational::zero())?;
        if restricted.is_zero() {
            continue;
        }
        gcd = Some(match gcd {
            None => restricted,
            Some(g) => univariate_gcd(&g, &restricted)?,
        });
    }
    let Some(g) = gcd else {
        return Err(BlowupError::Verify(
            "all coordinates vanish on the exceptional line".into(),
        ));
    };
    if g.total_degree() == 0 {
        return Ok(Vec::new());
    }
    let coeffs = g.univar_coeffs(&chart.vars[1])?;
    let roots = rational_roots(&coeffs);
    // Deflate to make sure no irrational common zero hides in the gcd.
    let mut rest = g.clone();
    let second = MultiPoly::var(&names, &chart.vars[1]);
    for r in &roots {
        let lin = &second - &MultiPoly::constant(&names, r.clone());
        while let Some(q) = rest.div_exact(&lin) {
            rest = q;
        }
    }
    if rest.total_degree() > 0 {
        return Err(BlowupError::IrrationalBasePoint(format!(
            "gcd residue {rest} on the exceptional line of ({}, {})",
            chart.vars[0], chart.vars[1]
        )));
    }
    Ok(roots)
}

/// One step of a resolution chain.
#[derive(Debug, Clone)]
pub struct BlowupStep {
    /// 1-based position within its chain: this step produces `E_{i,j}`.
    pub j: usize,
    /// Multiplicity of a generic coordinate combination at the center.
    pub multiplicity: u32,
    /// The chart along the chain (the next center lives here; on the final
    /// step this is the display chart).
    pub chart: ChartMap,
    /// Factor removed in `chart`.
    pub factor: MultiPoly,
    pub other_chart: ChartMap,
    pub other_factor: MultiPoly,
    /// Next center in `chart` coordinates; `None` ends the chain.
    pub next_center: Option<[BigRational; 2]>,
}

/// A full chain of blowups over one base point (or conjugate family).
#[derive(Debug, Clone)]
pub struct Chain {
    pub base: BasePoint,
    /// First Picard index `i` of the exceptional classes `E_{i,j}` this
    /// chain produces (a conjugate family covers `count` consecutive `i`).
    pub base_index: usize,
    pub kind: ChainKind,
}

#[derive(Debug, Clone)]
pub enum ChainKind {
    Blowups(Vec<BlowupStep>),
    /// Conjugate family handled modulo the minimal polynomial: `count`
    /// simple base points, one blowup each, no new base points.
    AlgebraicFamily { count: usize, multiplicity: u32 },
}

impl Chain {
    pub fn len(&self) -> usize {
        match &self.kind {
            ChainKind::Blowups(steps) => steps.len(),
            ChainKind::AlgebraicFamily { .. } => 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The resolved indeterminacy locus of one parametrization.
#[derive(Debug, Clone)]
pub struct ResolutionTree {
    pub family: Family,
    pub d: usize,
    pub chains: Vec<Chain>,
}

/// Variable naming for the two blowup charts of step `j`, following the
/// worked examples: `v_j`/`w_j` charts for the inverse Gaussian,
/// `u_j`/`v_j` charts for the gamma family.
fn step_var_names(family: Family, j: usize) -> (String, String) {
    match family {
        Family::InverseGaussian => (format!("w{j}"), format!("v{j}")),
        Family::Gamma => (format!("v{j}"), format!("u{j}")),
    }
}

/// Run one chain of blowups from a rational center until the lift has no
/// further base points on the exceptional divisor.
fn run_chain(
    family: Family,
    d: usize,
    start: ChartMap,
    center0: [BigRational; 2],
) -> Result<Vec<BlowupStep>, BlowupError> {
    let cap = 2 * d + 2;
    let mut chart = start;
    let mut center = center0;
    let mut steps: Vec<BlowupStep> = Vec::new();
    loop {
        if steps.len() >= cap {
            return Err(BlowupError::Runaway(cap));
        }
        let j = steps.len() + 1;
        let multiplicity = multiplicity_at(&chart, &center)?;
        let (name_first, name_second) = step_var_names(family, j);
        let lift = blowup_lift(&chart, &center, &name_first, &name_second)?;
        for p in &lift.points {
            if !p.coords[1].is_zero() {
                return Err(BlowupError::OverlapBasePoint(format!(
                    "({}, {})",
                    p.coords[0], p.coords[1]
                )));
            }
        }
        match lift.points.as_slice() {
            [] => {
                steps.push(BlowupStep {
                    j,
                    multiplicity,
                    chart: lift.chart_first,
                    factor: lift.factor_first,
                    other_chart: lift.chart_second,
                    other_factor: lift.factor_second,
                    next_center: None,
                });
                return Ok(steps);
            }
            [p] => {
                let origin = [BigRational::zero(), BigRational::zero()];
                let (next_chart, factor, other_chart, other_factor) = match p.side {
                    Side::KeepFirst => (
                        lift.chart_first,
                        lift.factor_first,
                        lift.chart_second,
                        lift.factor_second,
                    ),
                    Side::KeepSecond => (
                        lift.chart_second,
                        lift.factor_second,
                        lift.chart_first,
                        lift.factor_first,
                    ),
                };
                steps.push(BlowupStep {
                    j,
                    multiplicity,
                    chart: next_chart.clone(),
                    factor,
                    other_chart,
                    other_factor,
                    next_center: Some(origin.clone()),
                });
                chart = next_chart;
                center = origin;
            }
            _ => return Err(BlowupError::MultipleNewPoints),
        }
    }
}

/// Certify the conjugate family of base points on the line `s = 0`: each
/// point has multiplicity 1 and its blowup introduces no new base points.
/// All arithmetic runs in Q[t]/(min_poly), with gcd checks guaranteeing the
/// conclusions hold at every root simultaneously.
fn certify_algebraic_family(
    chart: &ChartMap,
    min_poly: &MultiPoly,
    second: &BigRational,
) -> Result<u32, BlowupError> {
    let first = chart.vars[0].clone();
    let sec_name = chart.vars[1].clone();
    let work_vars = [first.as_str(), sec_name.as_str(), "t"];
    let modulus = embed_renamed(min_poly, &work_vars, &[(first.as_str(), "t".to_string())]);
    let t_shift = {
        let v = MultiPoly::var(&work_vars, &first);
        let t = MultiPoly::var(&work_vars, "t");
        &v + &t
    };
    let shift_second: BTreeMap<String, BigRational> =
        [(sec_name.clone(), second.clone())].into_iter().collect();

    // Reduced coordinates around the family: substitute first -> first + t,
    // second -> second + pinned value, then reduce t modulo the minimal
    // polynomial. Collect each coordinate's surviving terms by (first,
    // second) degree.
    let mut reduced = Vec::with_capacity(chart.coords.len());
    for c in &chart.coords {
        let moved = c
            .translate(&shift_second)
            .embed(&work_vars)
            .expect("chart vars embed")
            .subs(&first, &t_shift)
            .expect("first var exists")
            .reduce_mod_univariate("t", &modulus)?;
        reduced.push(moved);
    }

    // Per-coordinate multiplicity: minimal (first, second)-degree among
    // surviving terms.
    let mult_of = |p: &MultiPoly| -> Option<u32> {
        p.terms().map(|(e, _)| e[0] + e[1]).min()
    };
    let mults: Vec<Option<u32>> = reduced.iter().map(mult_of).collect();
    let m_star = mults
        .iter()
        .flatten()
        .min()
        .copied()
        .ok_or_else(|| BlowupError::Verify("all coordinates reduce to zero".into()))?;

    // The minimal multiplicity must be achieved at every root: no root of
    // the minimal polynomial may kill all lowest-degree coefficients.
    let mut content: Option<MultiPoly> = None;
    for (p, m) in reduced.iter().zip(&mults) {
        if *m != Some(m_star) {
            continue;
        }
        for (e, coeff) in p.terms() {
            if e[0] + e[1] != m_star {
                continue;
            }
            let mut t_exps = vec![0u32; 3];
            t_exps[2] = e[2];
            let c_poly = MultiPoly::from_terms(&work_vars, &[(&t_exps, coeff.clone())]);
            content = Some(match content {
                None => c_poly,
                Some(g) => univariate_gcd(&g, &c_poly)?,
            });
        }
    }
    let content = content.expect("minimal degree is achieved");
    if content.total_degree() != 0 {
        let g = univariate_gcd(&content, &modulus)?;
        if g.total_degree() != 0 {
            return Err(BlowupError::Verify(
                "multiplicity is not uniform across the conjugate family".into(),
            ));
        }
    }

    if m_star != 1 {
        return Err(BlowupError::Verify(format!(
            "conjugate base points should be simple, found multiplicity {m_star}"
        )));
    }

    // No new base points after one blowup: two of the degree-1 leading
    // forms must stay linearly independent at every root. Extract the
    // linear forms a(t)*first + b(t)*second of the multiplicity-1
    // coordinates and look for a pair whose determinant is a unit modulo
    // the minimal polynomial.
    let coeff_at = |p: &MultiPoly, e0: u32, e1: u32| -> MultiPoly {
        let mut acc = MultiPoly::zero(&work_vars);
        for (e, c) in p.terms() {
            if e[0] == e0 && e[1] == e1 {
                let t_exps = [0, 0, e[2]];
                acc = &acc + &MultiPoly::from_terms(&work_vars, &[(&t_exps, c.clone())]);
            }
        }
        acc
    };
    let forms: Vec<(MultiPoly, MultiPoly)> = reduced
        .iter()
        .zip(&mults)
        .filter(|(_, m)| **m == Some(1))
        .map(|(p, _)| (coeff_at(p, 1, 0), coeff_at(p, 0, 1)))
        .collect();
    let independent_pair = forms.iter().enumerate().any(|(idx, (a1, b1))| {
        forms.iter().skip(idx + 1).any(|(a2, b2)| {
            let det = &(a1 * b2) - &(a2 * b1);
            if det.is_zero() {
                return false;
            }
            let det = det
                .reduce_mod_univariate("t", &modulus)
                .expect("univariate reduction");
            if det.is_zero() {
                return false;
            }
            univariate_gcd(&det, &modulus)
                .map(|g| g.total_degree() == 0)
                .unwrap_or(false)
        })
    });
    if !independent_pair {
        return Err(BlowupError::Verify(
            "no uniformly independent tangent forms at the conjugate family".into(),
        ));
    }
    Ok(m_star)
}

/// Resolve the full indeterminacy locus of the degree-d parametrization.
pub fn resolve(family: Family, d: usize) -> Result<ResolutionTree, BlowupError> {
    let points = base_points(family, d)?;
    let mut chains = Vec::new();
    match family {
        Family::InverseGaussian => {
            for (idx, point) in points.iter().enumerate() {
                match &point.locus {
                    BaseLocus::Rational(center) => {
                        let chart = initial_chart(family, d, &point.chart);
                        let steps = run_chain(family, d, chart, center.clone())?;
                        chains.push(Chain {
                            base: point.clone(),
                            base_index: idx + 1,
                            kind: ChainKind::Blowups(steps),
                        });
                    }
                    BaseLocus::Algebraic {
                        min_poly,
                        second,
                        count,
                    } => {
                        let chart = initial_chart(family, d, &point.chart);
                        let multiplicity = certify_algebraic_family(&chart, min_poly, second)?;
                        chains.push(Chain {
                            base: point.clone(),
                            base_index: 3,
                            kind: ChainKind::AlgebraicFamily {
                                count: *count,
                                multiplicity,
                            },
                        });
                    }
                }
            }
        }
        Family::Gamma => {
            for (idx, point) in points.iter().enumerate() {
                let BaseLocus::Rational(center) = &point.locus else {
                    unreachable!("gamma base points are rational")
                };
                let chart = initial_chart(family, d, &point.chart);
                let steps = run_chain(family, d, chart, center.clone())?;
                chains.push(Chain {
                    base: point.clone(),
                    base_index: idx,
                    kind: ChainKind::Blowups(steps),
                });
            }
        }
    }
    let tree = ResolutionTree { family, d, chains };
    check_chain_lengths(&tree)?;
    Ok(tree)
}

/// Chain lengths forced by the construction: `(d+1, 1, ..., 1)` for the
/// inverse Gaussian, `d - i` over `P_i` for the gamma family.
fn check_chain_lengths(tree: &ResolutionTree) -> Result<(), BlowupError> {
    let bad = |msg: String| Err(BlowupError::Verify(msg));
    match tree.family {
        Family::InverseGaussian => {
            if tree.chains.len() != 3 {
                return bad(format!("expected 3 chains, found {}", tree.chains.len()));
            }
            if tree.chains[0].len() != tree.d + 1 {
                return bad(format!(
                    "first chain has length {}, expected {}",
                    tree.chains[0].len(),
                    tree.d + 1
                ));
            }
            if tree.chains[1].len() != 1 {
                return bad("second chain should be a single blowup".into());
            }
        }
        Family::Gamma => {
            if tree.chains.len() != tree.d {
                return bad(format!(
                    "expected {} chains, found {}",
                    tree.d,
                    tree.chains.len()
                ));
            }
            for (i, chain) in tree.chains.iter().enumerate() {
                if chain.len() != tree.d - i {
                    return bad(format!(
                        "chain over P{i} has length {}, expected {}",
                        chain.len(),
                        tree.d - i
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Assemble the hyperplane class from the recorded blowup multiplicities:
/// `deg(f) L - sum m_{i,j} E_{i,j}`. Must agree with the closed-form class.
pub fn hyperplane_class_from_resolution(
    tree: &ResolutionTree,
) -> Result<DivisorClass, BlowupError> {
    let surface = SurfaceDescriptor::new(tree.family, tree.d);
    let degree = match tree.family {
        Family::InverseGaussian => 2 * tree.d as i64 - 1,
        Family::Gamma => tree.d as i64,
    };
    let mut class = surface.zero();
    class.coeffs[0] = degree;
    for chain in &tree.chains {
        match &chain.kind {
            ChainKind::Blowups(steps) => {
                for step in steps {
                    let idx = surface
                        .index_of(BasisLabel::E(chain.base_index, step.j))
                        .ok_or_else(|| {
                            BlowupError::Verify(format!(
                                "no basis class E_{{{},{}}}",
                                chain.base_index, step.j
                            ))
                        })?;
                    class.coeffs[idx] = -(step.multiplicity as i64);
                }
            }
            ChainKind::AlgebraicFamily {
                count,
                multiplicity,
            } => {
                for i in 0..*count {
                    let idx = surface
                        .index_of(BasisLabel::E(chain.base_index + i, 1))
                        .ok_or_else(|| {
                            BlowupError::Verify(format!(
                                "no basis class E_{{{},1}}",
                                chain.base_index + i
                            ))
                        })?;
                    class.coeffs[idx] = -(*multiplicity as i64);
                }
            }
        }
    }
    let want = named_class(&surface, ClassName::H).expect("H exists");
    if class != want {
        return Err(BlowupError::ClassMismatch {
            got: class.to_string(),
            want: want.to_string(),
        });
    }
    Ok(class)
}

// --- JSON shapes -----------------------------------------------------------

impl Serialize for ResolutionTree {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct StepDto {
            exceptional: String,
            multiplicity: u32,
            chart_vars: [String; 2],
            removed_factor: String,
            other_chart_vars: [String; 2],
            other_removed_factor: String,
            coordinates: Vec<String>,
            next_center: Option<[String; 2]>,
        }
        #[derive(Serialize)]
        struct ChainDto {
            base: String,
            chart: String,
            steps: Vec<StepDto>,
            #[serde(skip_serializing_if = "Option::is_none")]
            conjugate_count: Option<usize>,
            #[serde(skip_serializing_if = "Option::is_none")]
            multiplicity: Option<u32>,
        }
        let chains: Vec<ChainDto> = self
            .chains
            .iter()
            .map(|chain| match &chain.kind {
                ChainKind::Blowups(steps) => ChainDto {
                    base: chain.base.label.clone(),
                    chart: chain.base.chart.clone(),
                    steps: steps
                        .iter()
                        .map(|st| StepDto {
                            exceptional: format!("E_{{{},{}}}", chain.base_index, st.j),
                            multiplicity: st.multiplicity,
                            chart_vars: st.chart.vars.clone(),
                            removed_factor: st.factor.to_text(),
                            other_chart_vars: st.other_chart.vars.clone(),
                            other_removed_factor: st.other_factor.to_text(),
                            coordinates: st.chart.coords.iter().map(MultiPoly::to_text).collect(),
                            next_center: st
                                .next_center
                                .as_ref()
                                .map(|c| [c[0].to_string(), c[1].to_string()]),
                        })
                        .collect(),
                    conjugate_count: None,
                    multiplicity: None,
                },
                ChainKind::AlgebraicFamily {
                    count,
                    multiplicity,
                } => ChainDto {
                    base: chain.base.label.clone(),
                    chart: chain.base.chart.clone(),
                    steps: Vec::new(),
                    conjugate_count: Some(*count),
                    multiplicity: Some(*multiplicity),
                },
            })
            .collect();
        let mut st = s.serialize_struct("ResolutionTree", 3)?;
        st.serialize_field("family", &self.family)?;
        st.serialize_field("d", &self.d)?;
        st.serialize_field("chains", &chains)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn gamma_base_points_d4() {
        let points = base_points(Family::Gamma, 4).unwrap();
        assert_eq!(points.len(), 4);
        for (i, p) in points.iter().enumerate() {
            let BaseLocus::Rational(c) = &p.locus else {
                panic!("gamma points are rational")
            };
            assert_eq!(c[0], rat(0));
            assert_eq!(c[1], rat(-(i as i64)));
            assert_eq!(p.chart, "y=1");
        }
    }

    #[test]
    fn ig_base_points_d4_and_d2() {
        let points = base_points(Family::InverseGaussian, 4).unwrap();
        assert_eq!(points.len(), 3);
        assert_eq!(points[0].label, "P1");
        assert_eq!(points[0].chart, "s=1");
        assert_eq!(points[1].chart, "lambda=1");
        let BaseLocus::Algebraic {
            min_poly, count, ..
        } = &points[2].locus
        else {
            panic!("expected the conjugate family")
        };
        assert_eq!(*count, 3);
        let vars = ["lambda", "s"];
        assert_eq!(
            min_poly,
            &MultiPoly::parse(&vars, "lambda^3 + 6*lambda^2 + 15*lambda + 15").unwrap()
        );

        // d = 2: the family degenerates to the single rational root -1 of
        // lambda + 1, still encoded through its minimal polynomial.
        let points = base_points(Family::InverseGaussian, 2).unwrap();
        let BaseLocus::Algebraic {
            min_poly, count, ..
        } = &points[2].locus
        else {
            panic!("expected the conjugate family")
        };
        assert_eq!(*count, 1);
        assert_eq!(
            min_poly,
            &MultiPoly::parse(&vars, "lambda + 1").unwrap()
        );
    }

    #[test]
    fn ig_d4_first_blowup_matches_worked_example() {
        let chart = initial_chart(Family::InverseGaussian, 4, "s=1");
        let origin = [rat(0), rat(0)];
        let lift = blowup_lift(&chart, &origin, "w1", "v1").unwrap();
        // The new base point sits at the corner of the second chart.
        assert_eq!(lift.points.len(), 1);
        assert_eq!(lift.points[0].side, Side::KeepSecond);
        assert_eq!(lift.points[0].coords, [rat(0), rat(0)]);
        // Factor mu^3 removed in the (mu, v1) chart.
        let v = ["mu", "v1"];
        assert_eq!(
            lift.factor_second,
            MultiPoly::parse(&v, "mu^3").unwrap()
        );
        let expect = [
            "v1^3",
            "mu*v1^3",
            "mu^2*v1^3 + mu^2*v1^2",
            "mu^3*v1^3 + 3*mu^3*v1^2 + 3*mu^3*v1",
            "mu^4*v1^3 + 6*mu^4*v1^2 + 15*mu^4*v1 + 15*mu^4",
        ];
        for (c, e) in lift.chart_second.coords.iter().zip(expect) {
            assert_eq!(c, &MultiPoly::parse(&v, e).unwrap());
        }
        // The other chart has no base points at all.
        assert_eq!(
            lift.chart_first.coords[0],
            MultiPoly::constant_i64(&["lambda", "w1"], 1)
        );
    }

    #[test]
    fn gamma_d4_first_blowup_matches_worked_example() {
        let chart = initial_chart(Family::Gamma, 4, "y=1");
        let center = [rat(0), rat(-1)];
        let lift = blowup_lift(&chart, &center, "v1", "u1").unwrap();
        assert_eq!(lift.points.len(), 1);
        assert_eq!(lift.points[0].side, Side::KeepFirst);
        let v = ["x", "v1"];
        assert_eq!(lift.factor_first, MultiPoly::parse(&v, "x").unwrap());
        // x^3, x^2(xv1 - 1), x^2(xv1 - 1)v1, x(xv1 - 1)v1(xv1 + 1),
        // (xv1 - 1)v1(xv1 + 1)(xv1 + 2)
        let x = MultiPoly::var(&v, "x");
        let v1 = MultiPoly::var(&v, "v1");
        let xv = &x * &v1;
        let shifted = |n: i64| &xv + &MultiPoly::constant_i64(&v, n);
        let expect = vec![
            x.pow(3),
            &x.pow(2) * &shifted(-1),
            &(&x.pow(2) * &shifted(-1)) * &v1,
            &(&(&x * &shifted(-1)) * &v1) * &shifted(1),
            &(&(&shifted(-1) * &v1) * &shifted(1)) * &shifted(2),
        ];
        assert_eq!(lift.chart_first.coords, expect);
    }

    #[test]
    fn reconstruction_after_factor_removal() {
        // factor * lifted coordinates = substituted coordinates, exactly.
        let chart = initial_chart(Family::Gamma, 4, "y=1");
        let center = [rat(0), rat(-2)];
        let lift = blowup_lift(&chart, &center, "v1", "u1").unwrap();
        let shift: BTreeMap<String, BigRational> = [
            ("x".to_string(), rat(0)),
            ("z".to_string(), rat(-2)),
        ]
        .into_iter()
        .collect();
        let work = ["x", "z", "v1"];
        let x = MultiPoly::var(&work, "x");
        let v1 = MultiPoly::var(&work, "v1");
        let replacement = &x * &v1;
        for (orig, lifted) in chart.coords.iter().zip(&lift.chart_first.coords) {
            let substituted = orig
                .translate(&shift)
                .embed(&work)
                .unwrap()
                .subs("z", &replacement)
                .unwrap()
                .embed(&["x", "v1"])
                .unwrap();
            let back = &lift.factor_first * lifted;
            assert_eq!(back, substituted);
        }
    }

    #[test]
    fn resolve_ig_d4_chain_shape() {
        let tree = resolve(Family::InverseGaussian, 4).unwrap();
        assert_eq!(tree.chains.len(), 3);
        let ChainKind::Blowups(steps) = &tree.chains[0].kind else {
            panic!()
        };
        assert_eq!(steps.len(), 5);
        let mults: Vec<u32> = steps.iter().map(|s| s.multiplicity).collect();
        assert_eq!(mults, vec![3, 3, 1, 1, 1]);
        // Chart walk: (mu, v1), (mu, w2), (w2, v3), (w2, w4), (w2, w5).
        let walks: Vec<[&str; 2]> = steps
            .iter()
            .map(|s| [s.chart.vars[0].as_str(), s.chart.vars[1].as_str()])
            .collect();
        assert_eq!(
            walks,
            vec![
                ["mu", "v1"],
                ["mu", "w2"],
                ["w2", "v3"],
                ["w2", "w4"],
                ["w2", "w5"]
            ]
        );
        // P2: one blowup of multiplicity d, no new points.
        let ChainKind::Blowups(steps) = &tree.chains[1].kind else {
            panic!()
        };
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0].multiplicity, 4);
        assert!(steps[0].next_center.is_none());
        // Conjugate family: 3 points of multiplicity 1.
        let ChainKind::AlgebraicFamily {
            count,
            multiplicity,
        } = &tree.chains[2].kind
        else {
            panic!()
        };
        assert_eq!((*count, *multiplicity), (3, 1));
    }

    #[test]
    fn resolve_gamma_d4_chain_shape() {
        let tree = resolve(Family::Gamma, 4).unwrap();
        let lengths: Vec<usize> = tree.chains.iter().map(Chain::len).collect();
        assert_eq!(lengths, vec![4, 3, 2, 1]);
        for chain in &tree.chains {
            let ChainKind::Blowups(steps) = &chain.kind else {
                panic!()
            };
            for step in steps {
                assert_eq!(step.multiplicity, 1);
            }
        }
    }

    #[test]
    fn final_lifts_have_empty_base_locus() {
        for (family, d) in [
            (Family::InverseGaussian, 3),
            (Family::InverseGaussian, 4),
            (Family::Gamma, 4),
        ] {
            let tree = resolve(family, d).unwrap();
            for chain in &tree.chains {
                let ChainKind::Blowups(steps) = &chain.kind else {
                    continue;
                };
                let last = steps.last().unwrap();
                assert!(last.next_center.is_none());
                for chart in [&last.chart, &last.other_chart] {
                    assert!(exceptional_zeros(chart).unwrap().is_empty());
                    let origin = [rat(0), rat(0)];
                    let values = chart.eval(&origin);
                    assert!(values.iter().any(|v| !v.is_zero()));
                }
            }
        }
    }

    #[test]
    fn chart_maps_have_no_removable_factor() {
        let tree = resolve(Family::Gamma, 4).unwrap();
        for chain in &tree.chains {
            let ChainKind::Blowups(steps) = &chain.kind else {
                continue;
            };
            for step in steps {
                let (factor, _) = common_factor(&step.chart.coords).unwrap();
                assert_eq!(factor.total_degree(), 0, "chart retains factor {factor}");
            }
        }
    }

    #[test]
    fn hyperplane_classes_match_closed_forms() {
        for d in 2..=6 {
            for family in [Family::InverseGaussian, Family::Gamma] {
                let tree = resolve(family, d).unwrap();
                let class = hyperplane_class_from_resolution(&tree).unwrap();
                let surface = SurfaceDescriptor::new(family, d);
                assert_eq!(class, named_class(&surface, ClassName::H).unwrap());
            }
        }
    }

    #[test]
    fn chart_overlap_agreement() {
        // Points with nonzero exceptional coordinate would be visible in
        // both charts; the resolutions only ever produce corner points, and
        // the two charts of every lift agree about that.
        let chart = initial_chart(Family::Gamma, 5, "y=1");
        let lift = blowup_lift(&chart, &[rat(0), rat(-1)], "v1", "u1").unwrap();
        for p in &lift.points {
            assert!(p.coords[1].is_zero());
        }
        // The second chart restricted to its exceptional line has a
        // constant gcd (no zeros at all, matching the worked example).
        assert!(exceptional_zeros(&lift.chart_second).unwrap().is_empty());
    }
}
