//! Exact and symbolic moments of the inverse Gaussian and gamma
//! distributions, their mixtures, and the homogeneous parametrizations of
//! the moment surfaces.
//!
//! The inverse Gaussian moments satisfy the recursion
//! `m_0 = 1`, `m_1 = mu`, `m_i = ((2i-3)/lambda) mu^2 m_{i-1} + mu^2 m_{i-2}`,
//! which factors as `m_i = mu^i p_{i-1}(lambda, mu) / lambda^{i-1}` where
//! `p_i` is the homogenized degree-i Bessel polynomial. The gamma moments are
//! the products `m_r = theta^r (k)(k+1)...(k+r-1)` in the shape/scale
//! parameters. Everything here is computed over `BigRational`; the `*_f64`
//! entry points used by the numeric estimator mirror the same formulas.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::MultiPoly;

/// The two distribution families handled by this crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    InverseGaussian,
    Gamma,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::InverseGaussian => "ig",
            Family::Gamma => "gamma",
        }
    }

    pub fn parse(s: &str) -> Option<Family> {
        match s {
            "ig" | "inverse-gaussian" | "inverse_gaussian" => Some(Family::InverseGaussian),
            "gamma" => Some(Family::Gamma),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.tag())
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Family::parse(&s).ok_or_else(|| D::Error::custom(format!("unknown family `{s}`")))
    }
}

/// Inverse Gaussian parameters: mean `mu` and shape `lambda`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IGParams {
    pub mu: BigRational,
    pub lambda: BigRational,
}

/// Gamma parameters: scale `theta` and shape (named `shape` to avoid a
/// clash with the mixture count `k`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GammaParams {
    pub theta: BigRational,
    pub shape: BigRational,
}

/// A single mixture component of either family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentParams {
    InverseGaussian(IGParams),
    Gamma(GammaParams),
}

impl ComponentParams {
    pub fn family(&self) -> Family {
        match self {
            ComponentParams::InverseGaussian(_) => Family::InverseGaussian,
            ComponentParams::Gamma(_) => Family::Gamma,
        }
    }

    /// The `(first, second)` parameter pair in canonical order:
    /// `(mu, lambda)` or `(theta, shape)`.
    pub fn pair(&self) -> (&BigRational, &BigRational) {
        match self {
            ComponentParams::InverseGaussian(p) => (&p.mu, &p.lambda),
            ComponentParams::Gamma(p) => (&p.theta, &p.shape),
        }
    }
}

/// Exact parameters of a k-mixture with weights summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixtureParams {
    pub family: Family,
    pub components: Vec<ComponentParams>,
    pub weights: Vec<BigRational>,
}

impl MixtureParams {
    pub fn new(
        family: Family,
        components: Vec<ComponentParams>,
        weights: Vec<BigRational>,
    ) -> Result<Self, MomentError> {
        if components.len() != weights.len() || components.is_empty() {
            return Err(MomentError::LengthMismatch);
        }
        if components.iter().any(|c| c.family() != family) {
            return Err(MomentError::FamilyMismatch);
        }
        let sum: BigRational = weights.iter().sum();
        if !sum.is_one() {
            return Err(MomentError::BadWeightSum(sum.to_string()));
        }
        Ok(MixtureParams {
            family,
            components,
            weights,
        })
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }
}

/// Moment values, exact or floating.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentValues {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

/// The first `d` moments of a distribution (plus `m_0`), tagged by family.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector {
    pub family: Family,
    pub d: usize,
    pub values: MomentValues,
}

impl MomentVector {
    pub fn exact(family: Family, values: Vec<BigRational>) -> Self {
        assert!(!values.is_empty(), "a moment vector stores m_0..m_d");
        assert!(values[0].is_one(), "m_0 must be 1 in exact mode");
        MomentVector {
            family,
            d: values.len() - 1,
            values: MomentValues::Exact(values),
        }
    }

    pub fn float(family: Family, values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "a moment vector stores m_0..m_d");
        MomentVector {
            family,
            d: values.len() - 1,
            values: MomentValues::Float(values),
        }
    }

    pub fn exact_values(&self) -> Option<&[BigRational]> {
        match &self.values {
            MomentValues::Exact(v) => Some(v),
            MomentValues::Float(_) => None,
        }
    }

    pub fn float_values(&self) -> Vec<f64> {
        match &self.values {
            MomentValues::Exact(v) => v
                .iter()
                .map(|r| rational_to_f64(r))
                .collect(),
            MomentValues::Float(v) => v.clone(),
        }
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Serialize, Deserialize)]
struct MomentVectorDto {
    family: Family,
    d: usize,
    mode: String,
    values: Vec<serde_json::Value>,
}

impl Serialize for MomentVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let (mode, values) = match &self.values {
            MomentValues::Exact(v) => (
                "exact",
                v.iter()
                    .map(|r| serde_json::Value::String(format!("{}/{}", r.numer(), r.denom())))
                    .collect(),
            ),
            MomentValues::Float(v) => (
                "float",
                v.iter()
                    .map(|x| serde_json::json!(x))
                    .collect::<Vec<serde_json::Value>>(),
            ),
        };
        MomentVectorDto {
            family: self.family,
            d: self.d,
            mode: mode.to_string(),
            values,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MomentVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let dto = MomentVectorDto::deserialize(d)?;
        if dto.values.len() != dto.d + 1 {
            return Err(D::Error::custom(format!(
                "expected {} values for d = {}, got {}",
                dto.d + 1,
                dto.d,
                dto.values.len()
            )));
        }
        match dto.mode.as_str() {
            "exact" => {
                let mut values = Vec::with_capacity(dto.values.len());
                for v in &dto.values {
                    let s = v
                        .as_str()
                        .ok_or_else(|| D::Error::custom("exact values must be strings"))?;
                    values.push(parse_rational(s).map_err(D::Error::custom)?);
                }
                if !values[0].is_one() {
                    return Err(D::Error::custom("m_0 must be 1 in exact mode"));
                }
                Ok(MomentVector::exact(dto.family, values))
            }
            "float" => {
                let mut values = Vec::with_capacity(dto.values.len());
                for v in &dto.values {
                    let x = v
                        .as_f64()
                        .ok_or_else(|| D::Error::custom("float values must be numbers"))?;
                    values.push(x);
                }
                Ok(MomentVector::float(dto.family, values))
            }
            other => Err(D::Error::custom(format!("unknown mode `{other}`"))),
        }
    }
}

/// Parse `num/den` (or a plain integer) into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| format!("bad numerator in `{s}`"))?;
    let d: BigInt = den.parse().map_err(|_| format!("bad denominator in `{s}`"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in `{s}`"));
    }
    Ok(BigRational::new(n, d))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MomentError {
    #[error("lambda must be nonzero for exact inverse Gaussian moments")]
    ZeroLambda,
    #[error("mixture weights must sum to 1 exactly (got {0})")]
    BadWeightSum(String),
    #[error("mixture component family does not match the declared family")]
    FamilyMismatch,
    #[error("mixtures need matching, non-empty component and weight lists")]
    LengthMismatch,
}

fn rat_i64(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact inverse Gaussian moments `m_0..m_d` via the moment recursion.
pub fn ig_moments(params: &IGParams, d: usize) -> Result<MomentVector, MomentError> {
    if params.lambda.is_zero() {
        return Err(MomentError::ZeroLambda);
    }
    let mut m = Vec::with_capacity(d + 1);
    m.push(BigRational::one());
    if d >= 1 {
        m.push(params.mu.clone());
    }
    let mu2 = &params.mu * &params.mu;
    for i in 2..=d {
        let c = rat_i64(2 * i as i64 - 3) / &params.lambda;
        let v = c * &mu2 * &m[i - 1] + &mu2 * &m[i - 2];
        m.push(v);
    }
    Ok(MomentVector::exact(Family::InverseGaussian, m))
}

/// Exact gamma moments `m_r = theta^r prod_{i=0}^{r-1} (shape + i)`.
pub fn gamma_moments(params: &GammaParams, d: usize) -> MomentVector {
    let mut m = Vec::with_capacity(d + 1);
    m.push(BigRational::one());
    for r in 1..=d {
        let prev = m[r - 1].clone();
        m.push(prev * &params.theta * (&params.shape + rat_i64(r as i64 - 1)));
    }
    MomentVector::exact(Family::Gamma, m)
}

/// Floating-point inverse Gaussian moments (same recursion as [`ig_moments`]).
pub fn ig_moments_f64(mu: f64, lambda: f64, d: usize) -> Vec<f64> {
    let mut m = vec![1.0];
    if d >= 1 {
        m.push(mu);
    }
    let mu2 = mu * mu;
    for i in 2..=d {
        let v = (2.0 * i as f64 - 3.0) / lambda * mu2 * m[i - 1] + mu2 * m[i - 2];
        m.push(v);
    }
    m
}

/// Floating-point gamma moments.
pub fn gamma_moments_f64(theta: f64, shape: f64, d: usize) -> Vec<f64> {
    let mut m = vec![1.0];
    for r in 1..=d {
        m.push(m[r - 1] * theta * (shape + r as f64 - 1.0));
    }
    m
}

/// Moments of a single component in either family.
pub fn component_moments(c: &ComponentParams, d: usize) -> Result<MomentVector, MomentError> {
    match c {
        ComponentParams::InverseGaussian(p) => ig_moments(p, d),
        ComponentParams::Gamma(p) => Ok(gamma_moments(p, d)),
    }
}

/// Exact mixture moments: the weighted combination of component moments.
pub fn mixture_moments(mix: &MixtureParams, d: usize) -> Result<MomentVector, MomentError> {
    let sum: BigRational = mix.weights.iter().sum();
    if !sum.is_one() {
        return Err(MomentError::BadWeightSum(sum.to_string()));
    }
    let mut acc = vec![BigRational::zero(); d + 1];
    for (c, w) in mix.components.iter().zip(&mix.weights) {
        let mv = component_moments(c, d)?;
        let values = mv.exact_values().expect("component moments are exact");
        for (slot, v) in acc.iter_mut().zip(values) {
            *slot += w * v;
        }
    }
    Ok(MomentVector::exact(mix.family, acc))
}

/// Variable ring of the Bessel polynomials.
pub const BESSEL_VARS: [&str; 2] = ["lambda", "mu"];

/// Numerators `n_r` of the symbolic inverse Gaussian moments,
/// `m_r = n_r(lambda, mu) / lambda^{max(r-1, 0)}`, for `r = 0..=d`.
pub fn ig_symbolic_numerators(d: usize) -> Vec<MultiPoly> {
    let lambda = MultiPoly::var(&BESSEL_VARS, "lambda");
    let mu = MultiPoly::var(&BESSEL_VARS, "mu");
    let mu2 = &mu * &mu;
    let lambda2 = &lambda * &lambda;
    let mut n = vec![MultiPoly::constant_i64(&BESSEL_VARS, 1)];
    if d >= 1 {
        n.push(mu.clone());
    }
    for i in 2..=d {
        // Denominator exponents are e_{i-1} = i-2 and e_{i-2} = max(i-3, 0);
        // over the common denominator lambda^{i-1} the second addend picks up
        // lambda^2 (lambda^1 when i = 2).
        let shift = if i == 2 { lambda.clone() } else { lambda2.clone() };
        let v = &(&n[i - 1] * &mu2).scale(&rat_i64(2 * i as i64 - 3)) + &(&(&n[i - 2] * &mu2) * &shift);
        n.push(v);
    }
    n
}

/// Exponent of the `lambda` denominator of the symbolic moment `m_r`.
pub fn ig_denominator_exponent(r: usize) -> u32 {
    r.saturating_sub(1) as u32
}

/// The homogenized degree-`i` Bessel polynomial `p_i(lambda, mu)`, defined
/// through the factorization `m_{i+1} = mu^{i+1} p_i(lambda, mu) / lambda^i`
/// of the inverse Gaussian moments.
pub fn bessel_poly(i: usize) -> MultiPoly {
    let n = ig_symbolic_numerators(i + 1);
    let mu_pow = MultiPoly::var(&BESSEL_VARS, "mu").pow(i as u32 + 1);
    n[i + 1]
        .div_exact(&mu_pow)
        .expect("moment numerator divisible by mu^(i+1)")
}

/// Symbolic gamma moments `m_r(theta, shape)` for `r = 0..=d` (polynomials).
pub const GAMMA_COMPONENT_VARS: [&str; 2] = ["theta", "shape"];

pub fn gamma_symbolic_moments(d: usize) -> Vec<MultiPoly> {
    let theta = MultiPoly::var(&GAMMA_COMPONENT_VARS, "theta");
    let shape = MultiPoly::var(&GAMMA_COMPONENT_VARS, "shape");
    let mut m = vec![MultiPoly::constant_i64(&GAMMA_COMPONENT_VARS, 1)];
    for r in 1..=d {
        let factor = &theta * &(&shape + &MultiPoly::constant_i64(&GAMMA_COMPONENT_VARS, r as i64 - 1));
        let v = &m[r - 1] * &factor;
        m.push(v);
    }
    m
}

/// Variable rings of the homogeneous parametrizations.
pub const IG_PROJ_VARS: [&str; 3] = ["lambda", "mu", "s"];
pub const GAMMA_PROJ_VARS: [&str; 3] = ["x", "y", "z"];

/// The `d+1` homogeneous coordinate polynomials of the parametrization of
/// the degree-`d` moment surface.
///
/// Inverse Gaussian (total degree `2d-1` in `(lambda, mu, s)`):
/// `f_0 = lambda^{d-1} s^d`, `f_r = lambda^{d-r} s^{d-r} mu^r p_{r-1}`.
///
/// Gamma (total degree `d` in `(x, y, z)` after the coordinate change
/// `x = s^2`, `y = theta s`, `z = theta k`):
/// `f_r = x^{d-r} prod_{i=0}^{r-1} (z + i y)`.
pub fn homogeneous_parametrization(family: Family, d: usize) -> Vec<MultiPoly> {
    assert!(d >= 2, "the moment surface parametrization needs d >= 2");
    match family {
        Family::InverseGaussian => {
            let lambda = MultiPoly::var(&IG_PROJ_VARS, "lambda");
            let mu = MultiPoly::var(&IG_PROJ_VARS, "mu");
            let s = MultiPoly::var(&IG_PROJ_VARS, "s");
            let mut coords = vec![&lambda.pow(d as u32 - 1) * &s.pow(d as u32)];
            for r in 1..=d {
                let p = bessel_poly(r - 1)
                    .embed(&IG_PROJ_VARS)
                    .expect("bessel vars embed");
                let f = &(&(&lambda.pow((d - r) as u32) * &s.pow((d - r) as u32))
                    * &mu.pow(r as u32))
                    * &p;
                coords.push(f);
            }
            coords
        }
        Family::Gamma => {
            let x = MultiPoly::var(&GAMMA_PROJ_VARS, "x");
            let y = MultiPoly::var(&GAMMA_PROJ_VARS, "y");
            let z = MultiPoly::var(&GAMMA_PROJ_VARS, "z");
            (0..=d)
                .map(|r| {
                    let mut f = x.pow((d - r) as u32);
                    for i in 0..r {
                        f = &f * &(&z + &y.scale(&rat_i64(i as i64)));
                    }
                    f
                })
                .collect()
        }
    }
}

/// The symbolic moment map of a k-mixture in the `3k-1` parameters
/// `(a_1, b_1, ..., a_k, b_k, alpha_1, ..., alpha_{k-1})` where `(a, b)` is
/// `(mu, lambda)` or `(theta, shape)` and `alpha_k = 1 - sum alpha_j`.
///
/// Inverse Gaussian entries are cleared of their `lambda_i` denominators:
/// the polynomials returned are `m_r * denominator` with the cleared factor
/// `prod_i lambda_i^{d-1}` recorded in `denominator` (the gamma map needs no
/// clearing and records 1).
#[derive(Debug, Clone)]
pub struct SymbolicMixtureMap {
    pub family: Family,
    pub d: usize,
    pub k: usize,
    /// Parameter names, in Jacobian column order.
    pub vars: Vec<String>,
    /// Cleared numerators of `m_1..m_d`.
    pub numerators: Vec<MultiPoly>,
    /// The factor the moments were multiplied by (1 for gamma).
    pub denominator: MultiPoly,
}

/// Parameter names of the k-mixture map, in Jacobian column order.
pub fn mixture_param_names(family: Family, k: usize) -> Vec<String> {
    let (a, b) = match family {
        Family::InverseGaussian => ("mu", "lambda"),
        Family::Gamma => ("theta", "shape"),
    };
    let mut names = Vec::with_capacity(3 * k - 1);
    for i in 1..=k {
        names.push(format!("{a}{i}"));
        names.push(format!("{b}{i}"));
    }
    for j in 1..k {
        names.push(format!("alpha{j}"));
    }
    names
}

/// Re-express a polynomial in a different ring, renaming variables.
pub(crate) fn embed_renamed(
    p: &MultiPoly,
    target: &[&str],
    rename: &[(&str, String)],
) -> MultiPoly {
    let target_poly = MultiPoly::zero(target);
    let mut out = MultiPoly::zero(target);
    let map: Vec<usize> = p
        .vars()
        .iter()
        .map(|v| {
            let new_name = rename
                .iter()
                .find(|(old, _)| old == v)
                .map(|(_, n)| n.clone())
                .unwrap_or_else(|| v.clone());
            target_poly
                .var_index(&new_name)
                .unwrap_or_else(|| panic!("target ring lacks `{new_name}`"))
        })
        .collect();
    for (exps, c) in p.terms() {
        let mut new_exps = vec![0u32; target.len()];
        for (i, &e) in exps.iter().enumerate() {
            new_exps[map[i]] += e;
        }
        out = &out + &MultiPoly::from_terms(target, &[(&new_exps, c.clone())]);
    }
    out
}

pub fn symbolic_mixture_map(family: Family, d: usize, k: usize) -> SymbolicMixtureMap {
    assert!(k >= 1, "mixtures need at least one component");
    let names = mixture_param_names(family, k);
    let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let one = MultiPoly::constant_i64(&name_refs, 1);

    // alpha_i as polynomials, with alpha_k eliminated.
    let mut alphas: Vec<MultiPoly> = (1..k)
        .map(|j| MultiPoly::var(&name_refs, &format!("alpha{j}")))
        .collect();
    let mut last = one.clone();
    for a in &alphas {
        last = &last - a;
    }
    alphas.push(last);

    let (numerators, denominator) = match family {
        Family::InverseGaussian => {
            let n = ig_symbolic_numerators(d);
            let lambdas: Vec<MultiPoly> = (1..=k)
                .map(|i| MultiPoly::var(&name_refs, &format!("lambda{i}")))
                .collect();
            let mut denominator = one.clone();
            for l in &lambdas {
                denominator = &denominator * &l.pow(d as u32 - 1);
            }
            let numerators = (1..=d)
                .map(|r| {
                    let mut acc = MultiPoly::zero(&name_refs);
                    for i in 1..=k {
                        let renamed = embed_renamed(
                            &n[r],
                            &name_refs,
                            &[
                                ("lambda", format!("lambda{i}")),
                                ("mu", format!("mu{i}")),
                            ],
                        );
                        // Multiply by lambda_i^{(d-1)-(r-1)} and the other
                        // components' full lambda_j^{d-1}.
                        let mut term = &renamed * &lambdas[i - 1].pow((d - r) as u32);
                        for (j, l) in lambdas.iter().enumerate() {
                            if j != i - 1 {
                                term = &term * &l.pow(d as u32 - 1);
                            }
                        }
                        acc = &acc + &(&alphas[i - 1] * &term);
                    }
                    acc
                })
                .collect();
            (numerators, denominator)
        }
        Family::Gamma => {
            let m = gamma_symbolic_moments(d);
            let numerators = (1..=d)
                .map(|r| {
                    let mut acc = MultiPoly::zero(&name_refs);
                    for i in 1..=k {
                        let renamed = embed_renamed(
                            &m[r],
                            &name_refs,
                            &[("theta", format!("theta{i}")), ("shape", format!("shape{i}"))],
                        );
                        acc = &acc + &(&alphas[i - 1] * &renamed);
                    }
                    acc
                })
                .collect();
            (numerators, one)
        }
    };

    SymbolicMixtureMap {
        family,
        d,
        k,
        vars: names,
        numerators,
        denominator,
    }
}

/// Precomputed single-component symbolic moments and their parameter
/// gradients, shared by the exact Jacobian certifier and the numeric solver.
#[derive(Debug, Clone)]
pub struct ComponentSymbolics {
    pub family: Family,
    pub d: usize,
    /// Numerators of `m_0..m_d` in the component ring.
    numerators: Vec<MultiPoly>,
    /// d/d(first param) and d/d(second param) of each numerator.
    da: Vec<MultiPoly>,
    db: Vec<MultiPoly>,
}

impl ComponentSymbolics {
    pub fn new(family: Family, d: usize) -> Self {
        let (numerators, a_name, b_name) = match family {
            Family::InverseGaussian => (ig_symbolic_numerators(d), "mu", "lambda"),
            Family::Gamma => (gamma_symbolic_moments(d), "theta", "shape"),
        };
        let da = numerators.iter().map(|p| p.diff(a_name).unwrap()).collect();
        let db = numerators.iter().map(|p| p.diff(b_name).unwrap()).collect();
        ComponentSymbolics {
            family,
            d,
            numerators,
            da,
            db,
        }
    }

    /// Exact `(m_r, dm_r/da, dm_r/db)` for `r = 0..=d`, where `(a, b)` is
    /// `(mu, lambda)` or `(theta, shape)`.
    pub fn eval_exact(
        &self,
        a: &BigRational,
        b: &BigRational,
    ) -> Result<Vec<(BigRational, BigRational, BigRational)>, MomentError> {
        let point: BTreeMap<String, BigRational> = match self.family {
            Family::InverseGaussian => {
                if b.is_zero() {
                    return Err(MomentError::ZeroLambda);
                }
                [("mu".to_string(), a.clone()), ("lambda".to_string(), b.clone())]
                    .into_iter()
                    .collect()
            }
            Family::Gamma => [
                ("theta".to_string(), a.clone()),
                ("shape".to_string(), b.clone()),
            ]
            .into_iter()
            .collect(),
        };
        let mut out = Vec::with_capacity(self.d + 1);
        for r in 0..=self.d {
            let n = self.numerators[r].eval(&point).expect("point is complete");
            let na = self.da[r].eval(&point).expect("point is complete");
            let nb = self.db[r].eval(&point).expect("point is complete");
            match self.family {
                Family::Gamma => out.push((n, na, nb)),
                Family::InverseGaussian => {
                    // m_r = n_r / lambda^e with e = max(r-1, 0):
                    // dm/dmu = n_a / lambda^e,
                    // dm/dlambda = (n_b * lambda - e * n_r) / lambda^{e+1}.
                    let e = ig_denominator_exponent(r);
                    let le = pow_rat(b, e);
                    let m = &n / &le;
                    let dmu = &na / &le;
                    let dlam = (&nb * b - &n * rat_i64(e as i64)) / (&le * b);
                    out.push((m, dmu, dlam));
                }
            }
        }
        Ok(out)
    }

    /// Floating-point `(m_r, dm_r/da, dm_r/db)` for `r = 0..=d`.
    pub fn eval_f64(&self, a: f64, b: f64) -> Vec<(f64, f64, f64)> {
        let values = match self.family {
            Family::InverseGaussian => [b, a], // ring order (lambda, mu)
            Family::Gamma => [a, b],           // ring order (theta, shape)
        };
        (0..=self.d)
            .map(|r| {
                let n = self.numerators[r].eval_f64(&values);
                let na = self.da[r].eval_f64(&values);
                let nb = self.db[r].eval_f64(&values);
                match self.family {
                    Family::Gamma => (n, na, nb),
                    Family::InverseGaussian => {
                        let e = ig_denominator_exponent(r) as f64;
                        let le = b.powf(e);
                        (n / le, na / le, (nb * b - e * n) / (le * b))
                    }
                }
            })
            .collect()
    }
}

fn pow_rat(base: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..e {
        acc *= base;
    }
    acc
}
