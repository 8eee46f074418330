//! Sparse multivariate polynomials over arbitrary-precision rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent tuples under graded
//! lexicographic order (with the ring-declared variable order), which gives a
//! canonical term order for equality testing and printing. No zero
//! coefficients are ever stored.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::AlgebraError;

/// Exponent tuple of a single term, ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// A sparse multivariate polynomial with `BigRational` coefficients.
///
/// Binary operations require both operands to live in the same variable
/// ring (same names, same order); mixing rings is a programming error and
/// panics. Use [`MultiPoly::embed`] to move a polynomial into a larger ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Arc<Vec<String>>,
    terms: BTreeMap<Monomial, BigRational>,
}

fn rat_i64(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl MultiPoly {
    /// The zero polynomial in the given variable ring.
    pub fn zero(vars: &[&str]) -> Self {
        MultiPoly {
            vars: Arc::new(vars.iter().map(|s| s.to_string()).collect()),
            terms: BTreeMap::new(),
        }
    }

    fn zero_like(&self) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// A constant polynomial.
    pub fn constant(vars: &[&str], c: BigRational) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial(vec![0; p.vars.len()]), c);
        }
        p
    }

    /// A constant polynomial from an integer.
    pub fn constant_i64(vars: &[&str], c: i64) -> Self {
        Self::constant(vars, rat_i64(c))
    }

    /// The polynomial `name`, which must be one of the ring variables.
    pub fn var(vars: &[&str], name: &str) -> Self {
        let mut p = Self::zero(vars);
        let idx = p
            .var_index(name)
            .unwrap_or_else(|| panic!("variable `{name}` not in ring {:?}", p.vars));
        let mut exps = vec![0; p.vars.len()];
        exps[idx] = 1;
        p.terms.insert(Monomial(exps), BigRational::one());
        p
    }

    /// Build a polynomial from explicit `(exponents, coefficient)` terms.
    pub fn from_terms(vars: &[&str], terms: &[(&[u32], BigRational)]) -> Self {
        let mut p = Self::zero(vars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), p.vars.len(), "exponent tuple length mismatch");
            p.add_term(Monomial(exps.to_vec()), c.clone());
        }
        p
    }

    /// The ordered variable names of the ring.
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Maximum total degree over the support; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::total_degree).max().unwrap_or(0)
    }

    /// Iterate terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigRational)> {
        self.terms.iter().map(|(m, c)| (m.0.as_slice(), c))
    }

    /// Coefficient of the given exponent tuple (zero if absent).
    pub fn coeff(&self, exps: &[u32]) -> BigRational {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                let sum = e.get() + &c;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    fn assert_same_ring(&self, other: &Self) {
        assert_eq!(
            self.vars, other.vars,
            "polynomials from different variable rings"
        );
    }

    /// Indices of variables that actually occur in some term.
    pub fn active_vars(&self) -> Vec<usize> {
        let n = self.vars.len();
        let mut seen = vec![false; n];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    seen[i] = true;
                }
            }
        }
        (0..n).filter(|&i| seen[i]).collect()
    }

    /// Total degree of every term if the polynomial is homogeneous.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Monomial::total_degree);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// The sum of all terms of the given total degree.
    pub fn terms_of_degree(&self, degree: u32) -> MultiPoly {
        let mut p = self.zero_like();
        for (m, c) in &self.terms {
            if m.total_degree() == degree {
                p.terms.insert(m.clone(), c.clone());
            }
        }
        p
    }

    /// Exact value at a point assigning rationals to (at least) every
    /// variable that occurs in the polynomial.
    pub fn eval(
        &self,
        point: &BTreeMap<String, BigRational>,
    ) -> Result<BigRational, AlgebraError> {
        let n = self.vars.len();
        let mut values: Vec<Option<&BigRational>> = Vec::with_capacity(n);
        for v in self.vars.iter() {
            values.push(point.get(v));
        }
        for &i in &self.active_vars() {
            if values[i].is_none() {
                return Err(AlgebraError::MissingAssignment(self.vars[i].clone()));
            }
        }
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    let v = values[i].expect("checked above");
                    t *= pow_rat(v, e);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Floating-point value at a point given positionally (one value per
    /// ring variable). Used by the numeric estimator.
    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.vars.len(), "positional value count");
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().expect("coefficient out of f64 range");
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= values[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Formal partial derivative with respect to a ring variable.
    pub fn diff(&self, var: &str) -> Result<MultiPoly, AlgebraError> {
        let idx = self
            .var_index(var)
            .ok_or_else(|| AlgebraError::UnknownVariable(var.to_string()))?;
        let mut out = self.zero_like();
        for (m, c) in &self.terms {
            let e = m.0[idx];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[idx] = e - 1;
            out.add_term(Monomial(exps), c * rat_i64(e as i64));
        }
        Ok(out)
    }

    /// Substitute a polynomial (in the same ring) for a variable.
    pub fn subs(&self, var: &str, replacement: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
        self.assert_same_ring(replacement);
        let idx = self
            .var_index(var)
            .ok_or_else(|| AlgebraError::UnknownVariable(var.to_string()))?;
        let mut powers: Vec<MultiPoly> = vec![Self::constant_i64(
            &self.vars.iter().map(String::as_str).collect::<Vec<_>>(),
            1,
        )];
        let max_e = self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0);
        for e in 1..=max_e as usize {
            let next = &powers[e - 1] * replacement;
            powers.push(next);
        }
        let mut out = self.zero_like();
        for (m, c) in &self.terms {
            let e = m.0[idx];
            let mut exps = m.0.clone();
            exps[idx] = 0;
            let mut base = self.zero_like();
            base.terms.insert(Monomial(exps), c.clone());
            out = &out + &(&base * &powers[e as usize]);
        }
        Ok(out)
    }

    /// Substitute an exact constant for a variable.
    pub fn subs_value(&self, var: &str, value: &BigRational) -> Result<MultiPoly, AlgebraError> {
        let names: Vec<&str> = self.vars.iter().map(String::as_str).collect();
        self.subs(var, &Self::constant(&names, value.clone()))
    }

    /// Shift of coordinates: returns `q` with `q(v) = p(v + point)`.
    /// Variables absent from `point` are left unshifted.
    pub fn translate(&self, point: &BTreeMap<String, BigRational>) -> MultiPoly {
        let names: Vec<&str> = self.vars.iter().map(String::as_str).collect();
        let mut out = self.clone();
        for (name, value) in point {
            if self.var_index(name).is_none() || value.is_zero() {
                continue;
            }
            let shifted = &Self::var(&names, name) + &Self::constant(&names, value.clone());
            out = out.subs(name, &shifted).expect("var checked");
        }
        out
    }

    /// Minimum total degree over the support: the multiplicity of the origin
    /// as a zero of the polynomial.
    pub fn multiplicity_at_origin(&self) -> Result<u32, AlgebraError> {
        self.terms
            .keys()
            .map(Monomial::total_degree)
            .min()
            .ok_or(AlgebraError::ZeroPolynomial)
    }

    /// Per-variable minimum exponent over the support (the monomial content).
    /// Returns all-zero exponents for the zero polynomial.
    pub fn monomial_content(&self) -> Vec<u32> {
        let n = self.vars.len();
        let mut content = vec![u32::MAX; n];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                content[i] = content[i].min(e);
            }
        }
        if self.terms.is_empty() {
            content = vec![0; n];
        }
        content
    }

    /// Divide by a monomial given as an exponent tuple; the division must be
    /// exact on every term.
    pub fn divide_by_monomial(&self, exps: &[u32]) -> MultiPoly {
        let mut out = self.zero_like();
        for (m, c) in &self.terms {
            let new: Vec<u32> = m
                .0
                .iter()
                .zip(exps)
                .map(|(&e, &d)| {
                    assert!(e >= d, "monomial division not exact");
                    e - d
                })
                .collect();
            out.terms.insert(Monomial(new), c.clone());
        }
        out
    }

    /// Leading term under graded-lex order.
    fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Exact polynomial division; `None` when the divisor does not divide
    /// `self` exactly.
    pub fn div_exact(&self, divisor: &MultiPoly) -> Option<MultiPoly> {
        self.assert_same_ring(divisor);
        if divisor.is_zero() {
            return None;
        }
        let (dm, dc) = divisor.leading().expect("nonzero");
        let dm = dm.clone();
        let dc = dc.clone();
        let mut rem = self.clone();
        let mut quot = self.zero_like();
        while !rem.is_zero() {
            let (rm, rc) = rem.leading().expect("nonzero");
            if !dm.divides(rm) {
                return None;
            }
            let exps: Vec<u32> = rm.0.iter().zip(&dm.0).map(|(a, b)| a - b).collect();
            let c = rc / &dc;
            let mono = Monomial(exps);
            quot.add_term(mono.clone(), c.clone());
            let mut t = self.zero_like();
            t.terms.insert(mono, c);
            rem = &rem - &(&t * divisor);
        }
        Some(quot)
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, e: u32) -> MultiPoly {
        let names: Vec<&str> = self.vars.iter().map(String::as_str).collect();
        let mut result = Self::constant_i64(&names, 1);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Multiply every coefficient by a rational scalar.
    pub fn scale(&self, c: &BigRational) -> MultiPoly {
        let mut out = self.zero_like();
        if c.is_zero() {
            return out;
        }
        for (m, k) in &self.terms {
            out.terms.insert(m.clone(), k * c);
        }
        out
    }

    /// Move the polynomial into a (typically larger) ring that contains all
    /// of its active variables, matching variables by name.
    pub fn embed(&self, vars: &[&str]) -> Result<MultiPoly, AlgebraError> {
        let target = MultiPoly::zero(vars);
        let mut index_map = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            match target.var_index(v) {
                Some(j) => index_map.push(Some(j)),
                None => {
                    let used = self.terms.keys().any(|m| m.0[i] > 0);
                    if used {
                        return Err(AlgebraError::UnknownVariable(v.clone()));
                    }
                    index_map.push(None);
                }
            }
        }
        let mut out = target;
        for (m, c) in &self.terms {
            let mut exps = vec![0u32; out.vars.len()];
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    exps[index_map[i].expect("active var is mapped")] = e;
                }
            }
            out.add_term(Monomial(exps), c.clone());
        }
        Ok(out)
    }

    /// Coefficient vector of a univariate polynomial, lowest degree first.
    /// Fails when more than one variable is active; a constant is reported
    /// in the requested variable.
    pub fn univar_coeffs(&self, var: &str) -> Result<Vec<BigRational>, AlgebraError> {
        let idx = self
            .var_index(var)
            .ok_or_else(|| AlgebraError::UnknownVariable(var.to_string()))?;
        let active = self.active_vars();
        if active.iter().any(|&i| i != idx) {
            let names = active.iter().map(|&i| self.vars[i].clone()).collect();
            return Err(AlgebraError::NotUnivariate(names));
        }
        let deg = self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0) as usize;
        let mut coeffs = vec![BigRational::zero(); deg + 1];
        for (m, c) in &self.terms {
            coeffs[m.0[idx] as usize] = c.clone();
        }
        Ok(coeffs)
    }

    /// Build a univariate polynomial in `var` from coefficients (lowest
    /// degree first).
    pub fn from_univar_coeffs(vars: &[&str], var: &str, coeffs: &[BigRational]) -> Self {
        let mut p = Self::zero(vars);
        let idx = p
            .var_index(var)
            .unwrap_or_else(|| panic!("variable `{var}` not in ring"));
        for (e, c) in coeffs.iter().enumerate() {
            let mut exps = vec![0u32; p.vars.len()];
            exps[idx] = e as u32;
            p.add_term(Monomial(exps), c.clone());
        }
        p
    }

    /// Reduce all powers of `var` modulo a monic univariate polynomial in
    /// `var`. Used for exact arithmetic over Q[x]/(modulus).
    pub fn reduce_mod_univariate(
        &self,
        var: &str,
        modulus: &MultiPoly,
    ) -> Result<MultiPoly, AlgebraError> {
        let idx = self
            .var_index(var)
            .ok_or_else(|| AlgebraError::UnknownVariable(var.to_string()))?;
        let mcoeffs = modulus.univar_coeffs(var)?;
        let mdeg = mcoeffs.len() - 1;
        assert!(
            mdeg >= 1 && mcoeffs[mdeg].is_one(),
            "modulus must be monic of positive degree"
        );
        let max_e = self.terms.keys().map(|m| m.0[idx]).max().unwrap_or(0) as usize;
        // x^e mod m as coefficient vectors, for e = 0..=max_e
        let mut reductions: Vec<Vec<BigRational>> = Vec::with_capacity(max_e + 1);
        let mut cur = vec![BigRational::zero(); mdeg];
        if mdeg > 0 {
            cur[0] = BigRational::one();
        }
        reductions.push(cur.clone());
        for _ in 1..=max_e {
            let mut next = vec![BigRational::zero(); mdeg];
            let top = cur[mdeg - 1].clone();
            for i in (1..mdeg).rev() {
                next[i] = cur[i - 1].clone();
            }
            if !top.is_zero() {
                for i in 0..mdeg {
                    next[i] -= &top * &mcoeffs[i];
                }
            }
            reductions.push(next.clone());
            cur = next;
        }
        let mut out = self.zero_like();
        for (m, c) in &self.terms {
            let e = m.0[idx] as usize;
            if e < mdeg {
                out.add_term(m.clone(), c.clone());
                continue;
            }
            for (p, r) in reductions[e].iter().enumerate() {
                if r.is_zero() {
                    continue;
                }
                let mut exps = m.0.clone();
                exps[idx] = p as u32;
                out.add_term(Monomial(exps), c * r);
            }
        }
        Ok(out)
    }

    /// Canonical text form; see the module parser for the grammar.
    pub fn to_text(&self) -> String {
        format!("{self}")
    }

    /// Parse the canonical text format: a sum of `num/den*v1^e1*v2^e2`
    /// terms. Whitespace is ignored, `-` is accepted both as a separator and
    /// as a coefficient sign, and `/den` and `^e` may be omitted.
    pub fn parse(vars: &[&str], text: &str) -> Result<MultiPoly, AlgebraError> {
        let mut p = Self::zero(vars);
        let toks = tokenize(text)?;
        if toks.is_empty() {
            return Err(AlgebraError::Parse("empty input".into()));
        }
        let mut pos = 0usize;
        loop {
            // Each term may carry any number of leading signs.
            let mut sign = BigRational::one();
            while let Some(tok) = toks.get(pos) {
                match tok {
                    Tok::Plus => pos += 1,
                    Tok::Minus => {
                        sign = -sign;
                        pos += 1;
                    }
                    _ => break,
                }
            }
            let (term_coeff, term_exps, next) = parse_term(&p, &toks, pos)?;
            p.add_term(Monomial(term_exps), &sign * term_coeff);
            pos = next;
            match toks.get(pos) {
                None => break,
                Some(Tok::Plus | Tok::Minus) => continue,
                Some(t) => {
                    return Err(AlgebraError::Parse(format!("unexpected token {t:?}")));
                }
            }
        }
        Ok(p)
    }
}

fn pow_rat(base: &BigRational, e: u32) -> BigRational {
    let mut acc = BigRational::one();
    let mut b = base.clone();
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0/1");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if first {
                first = false;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}/{}", c.numer(), c.denom())?;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    write!(f, "*{}^{}", self.vars[i], e)?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
    Int(BigInt),
    Ident(String),
}

fn tokenize(text: &str) -> Result<Vec<Tok>, AlgebraError> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        match ch {
            c if c.is_whitespace() => {
                chars.next();
            }
            '+' => {
                chars.next();
                toks.push(Tok::Plus);
            }
            '-' => {
                chars.next();
                toks.push(Tok::Minus);
            }
            '*' => {
                chars.next();
                toks.push(Tok::Star);
            }
            '^' => {
                chars.next();
                toks.push(Tok::Caret);
            }
            '/' => {
                chars.next();
                toks.push(Tok::Slash);
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                let n: BigInt = s.parse().expect("digits");
                toks.push(Tok::Int(n));
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        s.push(d);
                        chars.next();
                    } else {
                        break;
                    }
                }
                toks.push(Tok::Ident(s));
            }
            other => {
                return Err(AlgebraError::Parse(format!("unexpected character `{other}`")));
            }
        }
    }
    Ok(toks)
}

/// Parse one term starting at `pos`; returns (coefficient, exponents, next position).
fn parse_term(
    ring: &MultiPoly,
    toks: &[Tok],
    mut pos: usize,
) -> Result<(BigRational, Vec<u32>, usize), AlgebraError> {
    let mut coeff = BigRational::one();
    let mut exps = vec![0u32; ring.vars().len()];
    loop {
        match toks.get(pos) {
            Some(Tok::Int(n)) => {
                pos += 1;
                let mut c = BigRational::from_integer(n.clone());
                if let Some(Tok::Slash) = toks.get(pos) {
                    pos += 1;
                    match toks.get(pos) {
                        Some(Tok::Int(d)) if !d.is_zero() => {
                            pos += 1;
                            c /= BigRational::from_integer(d.clone());
                        }
                        _ => return Err(AlgebraError::Parse("expected denominator".into())),
                    }
                }
                coeff *= c;
            }
            Some(Tok::Ident(name)) => {
                pos += 1;
                let idx = ring.var_index(name).ok_or_else(|| {
                    AlgebraError::Parse(format!("unknown variable `{name}`"))
                })?;
                let mut e: u32 = 1;
                if let Some(Tok::Caret) = toks.get(pos) {
                    pos += 1;
                    match toks.get(pos) {
                        Some(Tok::Int(n)) => {
                            pos += 1;
                            e = n.to_u32().ok_or_else(|| {
                                AlgebraError::Parse("exponent out of range".into())
                            })?;
                        }
                        _ => return Err(AlgebraError::Parse("expected exponent".into())),
                    }
                }
                exps[idx] += e;
            }
            _ => return Err(AlgebraError::Parse("expected a term".into())),
        }
        if let Some(Tok::Star) = toks.get(pos) {
            pos += 1;
            continue;
        }
        break;
    }
    Ok((coeff, exps, pos))
}

impl std::ops::Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: Self) -> MultiPoly {
        self.assert_same_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: Self) -> MultiPoly {
        self.assert_same_ring(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        let mut out = self.zero_like();
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: Self) -> MultiPoly {
        self.assert_same_ring(rhs);
        let mut out = self.zero_like();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let exps: Vec<u32> = m1.0.iter().zip(&m2.0).map(|(a, b)| a + b).collect();
                out.add_term(Monomial(exps), c1 * c2);
            }
        }
        out
    }
}

/// All rational roots of a univariate polynomial given by its coefficient
/// vector (lowest degree first).
pub fn rational_roots(coeffs: &[BigRational]) -> Vec<BigRational> {
    let deg = match coeffs.iter().rposition(|c| !c.is_zero()) {
        Some(d) => d,
        None => return Vec::new(),
    };
    let low = coeffs.iter().position(|c| !c.is_zero()).expect("nonzero");
    let mut roots = Vec::new();
    if low > 0 {
        roots.push(BigRational::zero());
    }
    if deg == low {
        return roots;
    }
    // Clear denominators to get a primitive integer polynomial on
    // coefficients low..=deg.
    let mut denom_lcm = BigInt::one();
    for c in &coeffs[low..=deg] {
        denom_lcm = num_integer::lcm(denom_lcm, c.denom().clone());
    }
    let ints: Vec<BigInt> = coeffs[low..=deg]
        .iter()
        .map(|c| (c * BigRational::from_integer(denom_lcm.clone())).to_integer())
        .collect();
    let c0 = ints[0].abs();
    let clead = ints[ints.len() - 1].abs();
    for a in divisors(&c0) {
        for b in divisors(&clead) {
            for sign in [1i64, -1] {
                let cand = BigRational::new(&a * BigInt::from(sign), b.clone());
                if roots.contains(&cand) {
                    continue;
                }
                let mut acc = BigRational::zero();
                for c in ints.iter().rev() {
                    acc = acc * &cand + BigRational::from_integer(c.clone());
                }
                if acc.is_zero() {
                    roots.push(cand);
                }
            }
        }
    }
    roots.sort();
    roots
}

/// Positive divisors of |n|, n nonzero. Trial division with a bound; any
/// remaining cofactor is treated as prime, which can only under-enumerate
/// candidates for astronomically large inputs.
fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut m = n.abs();
    assert!(!m.is_zero(), "divisors of zero requested");
    let mut primes: Vec<(BigInt, u32)> = Vec::new();
    let push = |p: BigInt, primes: &mut Vec<(BigInt, u32)>| {
        if let Some(last) = primes.last_mut() {
            if last.0 == p {
                last.1 += 1;
                return;
            }
        }
        primes.push((p, 1));
    };
    let mut d = BigInt::from(2);
    let bound = BigInt::from(1_000_000u64);
    while &d * &d <= m && d <= bound {
        while (&m % &d).is_zero() {
            m /= &d;
            push(d.clone(), &mut primes);
        }
        d += if d == BigInt::from(2) { 1 } else { 2 };
    }
    if !m.is_one() {
        push(m, &mut primes);
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in primes {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs.dedup();
    divs
}

/// Monic gcd of two univariate polynomials in the same variable. Constants
/// count as univariate in any variable; gcd with a nonzero constant is 1.
pub fn univariate_gcd(p: &MultiPoly, q: &MultiPoly) -> Result<MultiPoly, AlgebraError> {
    p.assert_same_ring(q);
    if p.is_zero() && q.is_zero() {
        return Err(AlgebraError::GcdOfZeros);
    }
    let mut active: Vec<usize> = p.active_vars();
    for i in q.active_vars() {
        if !active.contains(&i) {
            active.push(i);
        }
    }
    if active.len() > 1 {
        let names = active.iter().map(|&i| p.vars()[i].clone()).collect();
        return Err(AlgebraError::NotUnivariate(names));
    }
    let names: Vec<&str> = p.vars().iter().map(String::as_str).collect();
    let var = match active.first() {
        Some(&i) => p.vars()[i].clone(),
        // Both constants, at least one nonzero.
        None => return Ok(MultiPoly::constant_i64(&names, 1)),
    };
    let mut a = p.univar_coeffs(&var)?;
    let mut b = q.univar_coeffs(&var)?;
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    // Normalize monic.
    let lead = a.last().cloned().unwrap_or_else(BigRational::one);
    for c in &mut a {
        *c /= &lead;
    }
    Ok(MultiPoly::from_univar_coeffs(&names, &var, &a))
}

fn trim(coeffs: &mut Vec<BigRational>) {
    while coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
}

/// Remainder of univariate division (coefficient vectors, lowest first).
fn poly_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = &r[dr] / lead;
        for i in 0..=db {
            let v = &b[i] * &factor;
            r[dr - db + i] -= v;
        }
        trim(&mut r);
        if r.len() == dr + 1 {
            // Leading term did not cancel exactly; force it (guards against
            // a bookkeeping bug rather than a numeric issue).
            r.pop();
            trim(&mut r);
        }
    }
    r
}

/// Extract the largest factor common to the whole family under the
/// restricted factoring strategy: monomial content first, then repeated
/// trial division by monomial and linear factors of the lowest-degree
/// quotient.
///
/// Returns `(factor, quotients)` with `polys[i] = factor * quotients[i]`
/// exactly.
pub fn common_factor(
    polys: &[MultiPoly],
) -> Result<(MultiPoly, Vec<MultiPoly>), AlgebraError> {
    let first = polys.first().expect("non-empty family");
    if polys.iter().all(MultiPoly::is_zero) {
        return Err(AlgebraError::AllZeroFamily);
    }
    let names: Vec<&str> = first.vars().iter().map(String::as_str).collect();
    let mut factor = MultiPoly::constant_i64(&names, 1);
    let mut quots: Vec<MultiPoly> = polys.to_vec();

    loop {
        let mut progressed = false;

        // Monomial content across the whole family.
        let n = first.vars().len();
        let mut content = vec![u32::MAX; n];
        for q in quots.iter().filter(|q| !q.is_zero()) {
            for (slot, e) in content.iter_mut().zip(q.monomial_content()) {
                *slot = (*slot).min(e);
            }
        }
        if content.iter().any(|&e| e > 0) {
            let mono = MultiPoly::from_terms(&names, &[(&content, BigRational::one())]);
            factor = &factor * &mono;
            for q in &mut quots {
                *q = q.divide_by_monomial(&content);
            }
            progressed = true;
        }

        // Candidate linear factors from the lowest-degree nonzero quotient.
        let pivot = quots
            .iter()
            .filter(|q| !q.is_zero())
            .min_by_key(|q| (q.total_degree(), q.num_terms()))
            .expect("family has a nonzero member")
            .clone();
        for cand in linear_factor_candidates(&pivot) {
            loop {
                let divided: Option<Vec<MultiPoly>> =
                    quots.iter().map(|q| q.div_exact(&cand)).collect();
                match divided {
                    Some(new_quots) => {
                        quots = new_quots;
                        factor = &factor * &cand;
                        progressed = true;
                    }
                    None => break,
                }
            }
        }

        if !progressed {
            break;
        }
    }
    Ok((factor, quots))
}

/// Monomial-free linear factors of `p`: the polynomial itself when linear,
/// rational-root factors when univariate, and `v - r*w` factors when
/// bivariate homogeneous. Higher-degree irreducible content is left intact.
fn linear_factor_candidates(p: &MultiPoly) -> Vec<MultiPoly> {
    let content = p.monomial_content();
    let core = p.divide_by_monomial(&content);
    let names: Vec<&str> = core.vars().iter().map(String::as_str).collect();
    if core.total_degree() == 1 {
        return vec![make_monic_linear(core)];
    }
    let active = core.active_vars();
    match active.len() {
        1 => {
            let var = core.vars()[active[0]].clone();
            let coeffs = core.univar_coeffs(&var).expect("single active var");
            rational_roots(&coeffs)
                .into_iter()
                .map(|r| {
                    let v = MultiPoly::var(&names, &var);
                    &v - &MultiPoly::constant(&names, r)
                })
                .collect()
        }
        2 if core.homogeneous_degree().is_some() => {
            let (va, vb) = (
                core.vars()[active[0]].clone(),
                core.vars()[active[1]].clone(),
            );
            // Dehomogenize with respect to vb; roots r give factors va - r*vb.
            let dehom = core
                .subs_value(&vb, &BigRational::one())
                .expect("var exists");
            let coeffs = match dehom.univar_coeffs(&va) {
                Ok(c) => c,
                Err(_) => return Vec::new(),
            };
            rational_roots(&coeffs)
                .into_iter()
                .map(|r| {
                    let a = MultiPoly::var(&names, &va);
                    let b = MultiPoly::var(&names, &vb);
                    &a - &b.scale(&r)
                })
                .collect()
        }
        _ => Vec::new(),
    }
}

fn make_monic_linear(p: MultiPoly) -> MultiPoly {
    let lead = p
        .terms
        .iter()
        .next_back()
        .map(|(_, c)| c.clone())
        .unwrap_or_else(BigRational::one);
    p.scale(&lead.recip())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn point(assigns: &[(&str, i64)]) -> BTreeMap<String, BigRational> {
        assigns
            .iter()
            .map(|(k, v)| (k.to_string(), rat(*v)))
            .collect()
    }

    #[test]
    fn eval_linear() {
        let vars = ["lambda", "mu"];
        let p = &MultiPoly::var(&vars, "lambda") + &MultiPoly::var(&vars, "mu");
        assert_eq!(p.eval(&point(&[("lambda", 1), ("mu", 1)])).unwrap(), rat(2));
    }

    #[test]
    fn eval_bessel_p3_at_ones() {
        // p_3 = lambda^3 + 6 lambda^2 mu + 15 lambda mu^2 + 15 mu^3
        let vars = ["lambda", "mu"];
        let p = MultiPoly::parse(
            &vars,
            "1/1*lambda^3 + 6/1*lambda^2*mu^1 + 15/1*lambda^1*mu^2 + 15/1*mu^3",
        )
        .unwrap();
        assert_eq!(
            p.eval(&point(&[("lambda", 1), ("mu", 1)])).unwrap(),
            rat(37)
        );
    }

    #[test]
    fn eval_zero_poly() {
        let p = MultiPoly::zero(&["x"]);
        assert_eq!(p.eval(&point(&[("x", 3)])).unwrap(), rat(0));
    }

    #[test]
    fn eval_missing_assignment() {
        let vars = ["lambda", "mu"];
        let p = &MultiPoly::var(&vars, "lambda") + &MultiPoly::var(&vars, "mu");
        let err = p.eval(&point(&[("lambda", 1)])).unwrap_err();
        assert_eq!(err, AlgebraError::MissingAssignment("mu".into()));
    }

    #[test]
    fn diff_power_rule() {
        let vars = ["lambda", "mu"];
        // d/dlambda (lambda^2 mu) = 2 lambda mu
        let p = MultiPoly::parse(&vars, "1/1*lambda^2*mu^1").unwrap();
        let expect = MultiPoly::parse(&vars, "2/1*lambda^1*mu^1").unwrap();
        assert_eq!(p.diff("lambda").unwrap(), expect);
        // d/dmu (lambda + mu) = 1
        let q = MultiPoly::parse(&vars, "1/1*lambda^1 + 1/1*mu^1").unwrap();
        assert_eq!(q.diff("mu").unwrap(), MultiPoly::constant_i64(&vars, 1));
        assert!(q.diff("nu").is_err());
    }

    #[test]
    fn diff_bessel_p3() {
        let vars = ["lambda", "mu"];
        let p3 = MultiPoly::parse(
            &vars,
            "1/1*lambda^3 + 6/1*lambda^2*mu^1 + 15/1*lambda^1*mu^2 + 15/1*mu^3",
        )
        .unwrap();
        let expect = MultiPoly::parse(
            &vars,
            "3/1*lambda^2 + 12/1*lambda^1*mu^1 + 15/1*mu^2",
        )
        .unwrap();
        assert_eq!(p3.diff("lambda").unwrap(), expect);
    }

    #[test]
    fn translate_examples() {
        let vars = ["lambda"];
        let p = MultiPoly::var(&vars, "lambda");
        let shifted = p.translate(&point(&[("lambda", 1)]));
        assert_eq!(
            shifted,
            MultiPoly::parse(&vars, "1/1*lambda^1 + 1/1").unwrap()
        );

        let vars = ["z"];
        let q = MultiPoly::parse(&vars, "1/1*z^1 + 1/1").unwrap();
        assert_eq!(
            q.translate(&point(&[("z", -1)])),
            MultiPoly::var(&vars, "z")
        );
    }

    #[test]
    fn translate_round_trip() {
        let vars = ["x", "y"];
        let p = MultiPoly::parse(&vars, "3/2*x^2*y^1 + 1/1*x^1 + 7/5").unwrap();
        let a = point(&[("x", 4), ("y", -9)]);
        let back: BTreeMap<String, BigRational> =
            a.iter().map(|(k, v)| (k.clone(), -v.clone())).collect();
        assert_eq!(p.translate(&a).translate(&back), p);
    }

    #[test]
    fn multiplicity_examples() {
        let vars = ["lambda", "mu"];
        let p = MultiPoly::parse(&vars, "1/1*lambda^2*mu^1 + 1/1*mu^4").unwrap();
        assert_eq!(p.multiplicity_at_origin().unwrap(), 3);
        let q = MultiPoly::parse(&vars, "1/1 + 1/1*lambda^1").unwrap();
        assert_eq!(q.multiplicity_at_origin().unwrap(), 0);
        assert!(MultiPoly::zero(&vars).multiplicity_at_origin().is_err());
    }

    #[test]
    fn multiplicity_additive_under_product() {
        let vars = ["x", "y"];
        let p = MultiPoly::parse(&vars, "1/1*x^2*y^1 + 1/1*y^4").unwrap();
        let q = MultiPoly::parse(&vars, "5/1*x^1 + 2/1*y^2").unwrap();
        let prod = &p * &q;
        assert_eq!(
            prod.multiplicity_at_origin().unwrap(),
            p.multiplicity_at_origin().unwrap() + q.multiplicity_at_origin().unwrap()
        );
    }

    #[test]
    fn common_factor_monomial_content() {
        let vars = ["lambda", "mu"];
        let polys = [
            MultiPoly::parse(&vars, "1/1*lambda^3").unwrap(),
            MultiPoly::parse(&vars, "1/1*lambda^3*mu^1").unwrap(),
            MultiPoly::parse(&vars, "1/1*lambda^3*mu^2 + 1/1*lambda^2*mu^3").unwrap(),
        ];
        let (factor, quots) = common_factor(&polys).unwrap();
        assert_eq!(factor, MultiPoly::parse(&vars, "1/1*lambda^2").unwrap());
        for (p, q) in polys.iter().zip(&quots) {
            assert_eq!(&(&factor * q), p);
        }
        assert_eq!(quots[0], MultiPoly::var(&vars, "lambda"));
    }

    #[test]
    fn common_factor_coprime_cofactors() {
        let vars = ["x", "a", "b"];
        let x = MultiPoly::var(&vars, "x");
        let a = MultiPoly::parse(&vars, "1/1*a^1 + 1/1").unwrap();
        let b = MultiPoly::parse(&vars, "1/1*b^1 + 2/1").unwrap();
        let polys = [&x * &a, &x * &b];
        let (factor, quots) = common_factor(&polys).unwrap();
        assert_eq!(factor, x);
        assert_eq!(quots, vec![a, b]);
    }

    #[test]
    fn common_factor_all_zero_is_error() {
        let vars = ["x"];
        let polys = [MultiPoly::zero(&vars), MultiPoly::zero(&vars)];
        assert!(matches!(
            common_factor(&polys),
            Err(AlgebraError::AllZeroFamily)
        ));
    }

    #[test]
    fn common_factor_linear_over_two_vars() {
        // A shared (z + 1) among polynomials in (z, u).
        let vars = ["z", "u"];
        let zp1 = MultiPoly::parse(&vars, "1/1*z^1 + 1/1").unwrap();
        let a = MultiPoly::parse(&vars, "1/1*u^2").unwrap();
        let b = MultiPoly::parse(&vars, "1/1*z^1 + 3/1").unwrap();
        let polys = [&zp1 * &a, &zp1 * &b, zp1.pow(2)];
        let (factor, quots) = common_factor(&polys).unwrap();
        assert_eq!(factor, zp1);
        for (p, q) in polys.iter().zip(&quots) {
            assert_eq!(&(&factor * q), p);
        }
    }

    #[test]
    fn div_exact_detects_non_divisor() {
        let vars = ["x", "y"];
        let p = MultiPoly::parse(&vars, "1/1*x^2 + 1/1*y^2").unwrap();
        let q = MultiPoly::parse(&vars, "1/1*x^1 + 1/1*y^1").unwrap();
        assert!(p.div_exact(&q).is_none());
        let prod = &p * &q;
        assert_eq!(prod.div_exact(&q).unwrap(), p);
    }

    #[test]
    fn univariate_gcd_examples() {
        let vars = ["x"];
        let a = MultiPoly::parse(&vars, "1/1*x^2 + -1/1").unwrap();
        let b = MultiPoly::parse(&vars, "1/1*x^1 + -1/1").unwrap();
        assert_eq!(univariate_gcd(&a, &b).unwrap(), b);
        // gcd(p, p) is the monic normalization of p.
        let c = MultiPoly::parse(&vars, "2/1*x^2 + 4/1").unwrap();
        let monic = MultiPoly::parse(&vars, "1/1*x^2 + 2/1").unwrap();
        assert_eq!(univariate_gcd(&c, &c).unwrap(), monic);
        assert!(matches!(
            univariate_gcd(&MultiPoly::zero(&vars), &MultiPoly::zero(&vars)),
            Err(AlgebraError::GcdOfZeros)
        ));
    }

    #[test]
    fn univariate_gcd_separable_quadratic() {
        // p_2(lambda, 1) = lambda^2 + 3 lambda + 3 has discriminant -3, so
        // it is coprime to its derivative.
        let vars = ["lambda"];
        let p = MultiPoly::parse(&vars, "1/1*lambda^2 + 3/1*lambda^1 + 3/1").unwrap();
        let dp = p.diff("lambda").unwrap();
        let g = univariate_gcd(&p, &dp).unwrap();
        assert_eq!(g, MultiPoly::constant_i64(&vars, 1));
    }

    #[test]
    fn rational_roots_finds_all() {
        // (x - 1)(x + 2)(2x - 3) = 2x^3 + ... with roots 1, -2, 3/2.
        let vars = ["x"];
        let p = {
            let x = MultiPoly::var(&vars, "x");
            let one = MultiPoly::constant_i64(&vars, 1);
            let two = MultiPoly::constant_i64(&vars, 2);
            let three = MultiPoly::constant_i64(&vars, 3);
            &(&(&x - &one) * &(&x + &two)) * &(&x.scale(&rat(2)) - &three)
        };
        let roots = rational_roots(&p.univar_coeffs("x").unwrap());
        assert_eq!(
            roots,
            vec![rat(-2), rat(1), BigRational::new(BigInt::from(3), BigInt::from(2))]
        );
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let vars = ["lambda", "mu", "s"];
        let p = MultiPoly::parse(
            &vars,
            "-7/3*lambda^2*s^1 + 1/1*mu^5 + 2/9*lambda^1*mu^1*s^1 + -4/1",
        )
        .unwrap();
        let text = p.to_text();
        let q = MultiPoly::parse(&vars, &text).unwrap();
        assert_eq!(p, q);
        assert_eq!(text, q.to_text());
        // Whitespace and '-' separators are accepted.
        let r = MultiPoly::parse(&vars, " - 7/3 * lambda^2*s - 4 + mu^5+2/9*lambda*mu*s").unwrap();
        assert_eq!(r, p);
    }

    #[test]
    fn eval_is_multiplicative() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let vars = ["x", "y", "z"];
        for _ in 0..1000 {
            let mut rand_poly = || {
                let mut p = MultiPoly::zero(&vars);
                for _ in 0..rng.gen_range(1..5) {
                    let exps = [
                        rng.gen_range(0..4u32),
                        rng.gen_range(0..4u32),
                        rng.gen_range(0..3u32),
                    ];
                    let c = BigRational::new(
                        BigInt::from(rng.gen_range(-9i64..=9)),
                        BigInt::from(rng.gen_range(1i64..=9)),
                    );
                    p = &p + &MultiPoly::from_terms(&vars, &[(&exps, c)]);
                }
                p
            };
            let p = rand_poly();
            let q = rand_poly();
            let pt = point(&[
                ("x", rng.gen_range(-10..=10)),
                ("y", rng.gen_range(-10..=10)),
                ("z", rng.gen_range(-10..=10)),
            ]);
            let lhs = (&p * &q).eval(&pt).unwrap();
            let rhs = p.eval(&pt).unwrap() * q.eval(&pt).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn reduce_mod_univariate_quotient_ring() {
        // Work modulo m(x) = x^2 + 3x + 3: then x^2 = -3x - 3.
        let vars = ["x", "s"];
        let m = MultiPoly::parse(&vars, "1/1*x^2 + 3/1*x^1 + 3/1").unwrap();
        let p = MultiPoly::parse(&vars, "1/1*x^2*s^1").unwrap();
        let red = p.reduce_mod_univariate("x", &m).unwrap();
        let expect = MultiPoly::parse(&vars, "-3/1*x^1*s^1 + -3/1*s^1").unwrap();
        assert_eq!(red, expect);
        // The modulus itself reduces to zero.
        assert!(m.reduce_mod_univariate("x", &m).unwrap().is_zero());
    }
}
