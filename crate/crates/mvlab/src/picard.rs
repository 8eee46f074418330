//! Integer lattice model of the Picard group of the resolved moment
//! surfaces, with the diagonal intersection pairing `L^2 = 1`,
//! `E_{i,j}^2 = -1`, mixed products 0.
//!
//! The basis consists of the pullback `L` of a line and the exceptional
//! classes `E_{i,j}` of the blowup chains: for the inverse Gaussian surface
//! the chains have lengths `(d+1, 1, ..., 1)` over `d+1` base points (the
//! single-blowup classes are written `E_i = E_{i,1}` for `i >= 2`), and for
//! the gamma surface lengths `d-i` over the base points `P_0..P_{d-1}`.
//!
//! Only intersection numbers are modeled here; effectivity of a class is a
//! geometric input that the lattice cannot decide.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::moments::Family;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PicardError {
    #[error("divisor classes live on different surfaces")]
    SurfaceMismatch,
    #[error("unknown class name `{0}`")]
    UnknownClass(String),
    #[error("no exceptional divisor {0} on this surface")]
    NoSuchExceptional(String),
    #[error("component reduction exceeded the iteration cap ({0})")]
    IterationCap(usize),
}

/// A basis element of the Picard lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisLabel {
    /// Pullback of a line in the plane.
    L,
    /// Exceptional class of the j-th blowup over base point i.
    E(usize, usize),
}

impl BasisLabel {
    fn display(self, family: Family) -> String {
        match self {
            BasisLabel::L => "L".to_string(),
            BasisLabel::E(i, j) => {
                if family == Family::InverseGaussian && i >= 2 {
                    format!("E_{i}")
                } else {
                    format!("E_{{{i},{j}}}")
                }
            }
        }
    }
}

/// The surface on which divisor classes live: family, degree, and the
/// ordered lattice basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceDescriptor {
    pub family: Family,
    pub d: usize,
    pub basis: Vec<BasisLabel>,
}

impl SurfaceDescriptor {
    pub fn new(family: Family, d: usize) -> Self {
        assert!(d >= 2, "surfaces are defined for d >= 2");
        let mut basis = vec![BasisLabel::L];
        match family {
            Family::InverseGaussian => {
                for j in 1..=d + 1 {
                    basis.push(BasisLabel::E(1, j));
                }
                for i in 2..=d + 1 {
                    basis.push(BasisLabel::E(i, 1));
                }
                debug_assert_eq!(basis.len(), 2 * d + 2);
            }
            Family::Gamma => {
                for i in 0..d {
                    for j in 1..=d - i {
                        basis.push(BasisLabel::E(i, j));
                    }
                }
                debug_assert_eq!(basis.len(), 1 + d * (d + 1) / 2);
            }
        }
        SurfaceDescriptor { family, d, basis }
    }

    pub fn index_of(&self, label: BasisLabel) -> Option<usize> {
        self.basis.iter().position(|&b| b == label)
    }

    /// The zero class.
    pub fn zero(&self) -> DivisorClass {
        DivisorClass {
            surface: self.clone(),
            coeffs: vec![0; self.basis.len()],
        }
    }

    /// The class of a single basis element.
    pub fn basis_class(&self, label: BasisLabel) -> Result<DivisorClass, PicardError> {
        let idx = self
            .index_of(label)
            .ok_or_else(|| PicardError::NoSuchExceptional(label.display(self.family)))?;
        let mut c = self.zero();
        c.coeffs[idx] = 1;
        Ok(c)
    }
}

/// An integer divisor class in the basis `(L, E_{i,j}, ...)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorClass {
    pub surface: SurfaceDescriptor,
    pub coeffs: Vec<i64>,
}

impl DivisorClass {
    pub fn coeff(&self, label: BasisLabel) -> i64 {
        self.surface
            .index_of(label)
            .map(|i| self.coeffs[i])
            .unwrap_or(0)
    }

    pub fn add(&self, other: &DivisorClass) -> Result<DivisorClass, PicardError> {
        if self.surface != other.surface {
            return Err(PicardError::SurfaceMismatch);
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(DivisorClass {
            surface: self.surface.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &DivisorClass) -> Result<DivisorClass, PicardError> {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, c: i64) -> DivisorClass {
        DivisorClass {
            surface: self.surface.clone(),
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (label, &c) in self.surface.basis.iter().zip(&self.coeffs) {
            if c == 0 {
                continue;
            }
            let name = label.display(self.surface.family);
            if !wrote {
                if c == 1 {
                    write!(f, "{name}")?;
                } else if c == -1 {
                    write!(f, "-{name}")?;
                } else {
                    write!(f, "{c}{name}")?;
                }
            } else if c > 0 {
                if c == 1 {
                    write!(f, " + {name}")?;
                } else {
                    write!(f, " + {c}{name}")?;
                }
            } else if c == -1 {
                write!(f, " - {name}")?;
            } else {
                write!(f, " - {}{name}", -c)?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// The intersection number `c1 . c2` under the diagonal pairing.
pub fn intersect(c1: &DivisorClass, c2: &DivisorClass) -> Result<i64, PicardError> {
    if c1.surface != c2.surface {
        return Err(PicardError::SurfaceMismatch);
    }
    let mut acc = 0i64;
    for (idx, label) in c1.surface.basis.iter().enumerate() {
        let prod = c1.coeffs[idx] * c2.coeffs[idx];
        match label {
            BasisLabel::L => acc += prod,
            BasisLabel::E(_, _) => acc -= prod,
        }
    }
    Ok(acc)
}

/// Catalog names of closed-form classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassName {
    /// Hyperplane class: strict transform of a generic member of the linear
    /// system spanned by the coordinate polynomials.
    H,
    /// Pullback of a line.
    L,
    /// Inverse Gaussian: line through the first two base points.
    Line1,
    /// Inverse Gaussian: line through the first base point with the tangent
    /// direction of the first chain.
    Line2,
    /// Inverse Gaussian: line through the collinear base points 3..=d+1.
    Line3,
    /// Gamma: the line `x = 0` through all base points.
    LineX,
    /// A raw exceptional class `E_{i,j}`.
    Exceptional(usize, usize),
    /// Strict transform of `E_{i,j}` on the fully resolved surface.
    StrictExceptional(usize, usize),
}

impl ClassName {
    /// Parse a catalog name: `H`, `L`, `L1`, `L2`, `L3`, `Lx`,
    /// `E_{i,j}` / `E_i_j` / `E_i` (shorthand for `E_{i,1}`), and the same
    /// exceptional forms prefixed with `strict` for strict transforms.
    pub fn parse(name: &str) -> Option<ClassName> {
        let name = name.trim();
        match name {
            "H" => return Some(ClassName::H),
            "L" => return Some(ClassName::L),
            "L1" => return Some(ClassName::Line1),
            "L2" => return Some(ClassName::Line2),
            "L3" => return Some(ClassName::Line3),
            "Lx" => return Some(ClassName::LineX),
            _ => {}
        }
        let (strict, rest) = match name.strip_prefix("strict") {
            Some(r) => (true, r.trim_start_matches([' ', ':', '_'])),
            None => (false, name),
        };
        let rest = rest.strip_prefix('E')?;
        let digits: Vec<usize> = rest
            .split(|c: char| !c.is_ascii_digit())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().ok())
            .collect::<Option<_>>()?;
        let (i, j) = match digits.as_slice() {
            [i] => (*i, 1),
            [i, j] => (*i, *j),
            _ => return None,
        };
        Some(if strict {
            ClassName::StrictExceptional(i, j)
        } else {
            ClassName::Exceptional(i, j)
        })
    }
}

/// The closed-form class catalog of a surface.
pub fn named_class(surface: &SurfaceDescriptor, name: ClassName) -> Result<DivisorClass, PicardError> {
    let d = surface.d;
    let family = surface.family;
    let bad = |label: &str| PicardError::UnknownClass(format!("{label} ({family}, d = {d})"));
    match name {
        ClassName::L => surface.basis_class(BasisLabel::L),
        ClassName::Exceptional(i, j) => surface.basis_class(BasisLabel::E(i, j)),
        ClassName::H => {
            let mut c = surface.zero();
            match family {
                Family::InverseGaussian => {
                    // (2d-1)L - (d-1)E_{1,1} - (d-1)E_{1,2} - E_{1,3} - ...
                    // - E_{1,d+1} - dE_2 - E_3 - ... - E_{d+1}
                    c.coeffs[0] = 2 * d as i64 - 1;
                    for j in 1..=d + 1 {
                        let idx = surface.index_of(BasisLabel::E(1, j)).expect("basis");
                        c.coeffs[idx] = if j <= 2 { -(d as i64 - 1) } else { -1 };
                    }
                    let idx = surface.index_of(BasisLabel::E(2, 1)).expect("basis");
                    c.coeffs[idx] = -(d as i64);
                    for i in 3..=d + 1 {
                        let idx = surface.index_of(BasisLabel::E(i, 1)).expect("basis");
                        c.coeffs[idx] = -1;
                    }
                }
                Family::Gamma => {
                    // dL - sum_{i,j} E_{i,j}
                    c.coeffs[0] = d as i64;
                    for v in c.coeffs[1..].iter_mut() {
                        *v = -1;
                    }
                }
            }
            Ok(c)
        }
        ClassName::Line1 => {
            if family != Family::InverseGaussian {
                return Err(bad("L1"));
            }
            let mut c = surface.basis_class(BasisLabel::L)?;
            c = c.sub(&surface.basis_class(BasisLabel::E(1, 1))?)?;
            c.sub(&surface.basis_class(BasisLabel::E(2, 1))?)
        }
        ClassName::Line2 => {
            if family != Family::InverseGaussian {
                return Err(bad("L2"));
            }
            let mut c = surface.basis_class(BasisLabel::L)?;
            c = c.sub(&surface.basis_class(BasisLabel::E(1, 1))?)?;
            c.sub(&surface.basis_class(BasisLabel::E(1, 2))?)
        }
        ClassName::Line3 => {
            if family != Family::InverseGaussian {
                return Err(bad("L3"));
            }
            let mut c = surface.basis_class(BasisLabel::L)?;
            for i in 3..=d + 1 {
                c = c.sub(&surface.basis_class(BasisLabel::E(i, 1))?)?;
            }
            Ok(c)
        }
        ClassName::LineX => {
            if family != Family::Gamma {
                return Err(bad("Lx"));
            }
            let mut c = surface.basis_class(BasisLabel::L)?;
            for i in 0..d {
                c = c.sub(&surface.basis_class(BasisLabel::E(i, 1))?)?;
            }
            Ok(c)
        }
        ClassName::StrictExceptional(i, j) => {
            let own = surface.basis_class(BasisLabel::E(i, j))?;
            // The next center of a chain lies on the previous exceptional
            // divisor, so the strict transform drops by the successor class;
            // the final divisor of a chain is untouched.
            match surface.index_of(BasisLabel::E(i, j + 1)) {
                Some(_) => own.sub(&surface.basis_class(BasisLabel::E(i, j + 1))?),
                None => Ok(own),
            }
        }
    }
}

/// `H . H` against the closed-form degree of the moment surface.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DegreeCheck {
    pub hsq: i64,
    pub expected: i64,
    pub ok: bool,
}

pub fn degree_check(family: Family, d: usize) -> DegreeCheck {
    let surface = SurfaceDescriptor::new(family, d);
    let h = named_class(&surface, ClassName::H).expect("H exists");
    let hsq = intersect(&h, &h).expect("same surface");
    let expected = match family {
        Family::InverseGaussian => (d as i64 - 1) * (d as i64 - 1),
        Family::Gamma => (d as i64) * (d as i64 - 1) / 2,
    };
    DegreeCheck {
        hsq,
        expected,
        ok: hsq == expected,
    }
}

/// One removal step of a negative-intersection reduction.
#[derive(Debug, Clone, Serialize)]
pub struct LedgerEntry {
    pub component: String,
    /// Intersection of the remainder with the component before removal.
    pub intersection: i64,
    pub multiplicity_removed: i64,
    pub remainder: String,
}

/// The full reduction ledger.
#[derive(Debug, Clone, Serialize)]
pub struct Ledger {
    pub start: String,
    pub entries: Vec<LedgerEntry>,
    pub terminal: String,
}

/// Repeatedly remove one copy of the first catalog component that meets the
/// current remainder negatively; a class with negative intersection against
/// an effective class must contain it as a component, so each entry records
/// a forced component of the original class.
///
/// Degree guard: a plane curve has non-negative degree, so once removing a
/// component would make the `L`-coefficient negative the remainder is
/// already non-effective and the forcing argument has concluded; such
/// removals are skipped. This is what makes the single-copy schedule
/// terminate instead of trading `L`-degree for exceptional mass forever.
pub fn ledger_reduce(
    a: &DivisorClass,
    components: &[(String, DivisorClass)],
) -> Result<Ledger, PicardError> {
    for (_, c) in components {
        if c.surface != a.surface {
            return Err(PicardError::SurfaceMismatch);
        }
    }
    let cap = 10 * a.surface.basis.len();
    let mut current = a.clone();
    let mut entries = Vec::new();
    loop {
        let mut removed = false;
        for (name, comp) in components {
            if current.coeffs[0] - comp.coeffs[0] < 0 {
                continue;
            }
            let inter = intersect(&current, comp)?;
            if inter < 0 {
                current = current.sub(comp)?;
                entries.push(LedgerEntry {
                    component: name.clone(),
                    intersection: inter,
                    multiplicity_removed: 1,
                    remainder: current.to_string(),
                });
                removed = true;
                break;
            }
        }
        if !removed {
            break;
        }
        if entries.len() > cap {
            return Err(PicardError::IterationCap(cap));
        }
    }
    Ok(Ledger {
        start: a.to_string(),
        entries,
        terminal: current.to_string(),
    })
}

/// The standard component catalog used in the nondefectivity reductions,
/// in removal order.
pub fn reduction_catalog(surface: &SurfaceDescriptor) -> Vec<(String, DivisorClass)> {
    let d = surface.d;
    let mut catalog = Vec::new();
    match surface.family {
        Family::InverseGaussian => {
            for name in [ClassName::Line1, ClassName::Line2] {
                let label = if name == ClassName::Line1 { "L1" } else { "L2" };
                catalog.push((
                    label.to_string(),
                    named_class(surface, name).expect("catalog"),
                ));
            }
            catalog.push((
                "strict E_{1,1}".to_string(),
                named_class(surface, ClassName::StrictExceptional(1, 1)).expect("catalog"),
            ));
        }
        Family::Gamma => {
            catalog.push((
                "Lx".to_string(),
                named_class(surface, ClassName::LineX).expect("catalog"),
            ));
            for j in 1..d {
                for i in 0..d {
                    if j < d - i {
                        catalog.push((
                            format!("strict E_{{{i},{j}}}"),
                            named_class(surface, ClassName::StrictExceptional(i, j))
                                .expect("catalog"),
                        ));
                    }
                }
            }
            for i in 0..d {
                catalog.push((
                    format!("E_{{{i},{}}}", d - i),
                    named_class(surface, ClassName::Exceptional(i, d - i)).expect("catalog"),
                ));
            }
        }
    }
    catalog
}

/// The residual class `A = H - 2k L` arising when the k-secant variety were
/// contained in a cone: the hyperplane class minus 2k degree-one moving
/// classes (the all-zero exceptional-coefficient configuration).
pub fn cone_residual_class(surface: &SurfaceDescriptor, k: usize) -> DivisorClass {
    let h = named_class(surface, ClassName::H).expect("H exists");
    let l = named_class(surface, ClassName::L).expect("L exists");
    h.sub(&l.scale(2 * k as i64)).expect("same surface")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn pairing_axioms() {
        let s = SurfaceDescriptor::new(Family::InverseGaussian, 4);
        let l = named_class(&s, ClassName::L).unwrap();
        assert_eq!(intersect(&l, &l).unwrap(), 1);
        let e11 = named_class(&s, ClassName::Exceptional(1, 1)).unwrap();
        let e12 = named_class(&s, ClassName::Exceptional(1, 2)).unwrap();
        assert_eq!(intersect(&e11, &e12).unwrap(), 0);
        assert_eq!(intersect(&e11, &e11).unwrap(), -1);
        assert_eq!(intersect(&l, &e11).unwrap(), 0);

        let h = named_class(&s, ClassName::H).unwrap();
        assert_eq!(intersect(&h, &h).unwrap(), 9);
    }

    #[test]
    fn surface_mismatch_is_an_error() {
        let s4 = SurfaceDescriptor::new(Family::InverseGaussian, 4);
        let s5 = SurfaceDescriptor::new(Family::InverseGaussian, 5);
        let a = named_class(&s4, ClassName::H).unwrap();
        let b = named_class(&s5, ClassName::H).unwrap();
        assert_eq!(intersect(&a, &b), Err(PicardError::SurfaceMismatch));
    }

    #[test]
    fn basis_sizes() {
        for d in 2..=8 {
            let ig = SurfaceDescriptor::new(Family::InverseGaussian, d);
            assert_eq!(ig.basis.len(), 2 * d + 2);
            let g = SurfaceDescriptor::new(Family::Gamma, d);
            assert_eq!(g.basis.len(), 1 + d * (d + 1) / 2);
        }
    }

    #[test]
    fn named_classes_ig() {
        let s = SurfaceDescriptor::new(Family::InverseGaussian, 5);
        let l1 = named_class(&s, ClassName::Line1).unwrap();
        assert_eq!(l1.coeff(BasisLabel::L), 1);
        assert_eq!(l1.coeff(BasisLabel::E(1, 1)), -1);
        assert_eq!(l1.coeff(BasisLabel::E(2, 1)), -1);
        assert_eq!(l1.coeff(BasisLabel::E(1, 2)), 0);
        assert_eq!(l1.to_string(), "L - E_{1,1} - E_2");

        let l3 = named_class(&s, ClassName::Line3).unwrap();
        assert_eq!(l3.coeff(BasisLabel::L), 1);
        for i in 3..=6 {
            assert_eq!(l3.coeff(BasisLabel::E(i, 1)), -1);
        }
        assert_eq!(l3.coeff(BasisLabel::E(2, 1)), 0);
    }

    #[test]
    fn named_classes_gamma() {
        let s = SurfaceDescriptor::new(Family::Gamma, 4);
        let lx = named_class(&s, ClassName::LineX).unwrap();
        for i in 0..4 {
            assert_eq!(lx.coeff(BasisLabel::E(i, 1)), -1);
            assert_eq!(lx.coeff(BasisLabel::E(i, 2)), 0);
        }
        let strict = named_class(&s, ClassName::StrictExceptional(0, 2)).unwrap();
        assert_eq!(strict.coeff(BasisLabel::E(0, 2)), 1);
        assert_eq!(strict.coeff(BasisLabel::E(0, 3)), -1);
        // Final exceptional divisor of a chain has no successor.
        let last = named_class(&s, ClassName::StrictExceptional(3, 1)).unwrap();
        assert_eq!(last.coeff(BasisLabel::E(3, 1)), 1);
        assert_eq!(last.coeffs.iter().map(|c| c.abs()).sum::<i64>(), 1);
    }

    #[test]
    fn class_name_parsing() {
        assert_eq!(ClassName::parse("H"), Some(ClassName::H));
        assert_eq!(ClassName::parse("Lx"), Some(ClassName::LineX));
        assert_eq!(ClassName::parse("E_{1,2}"), Some(ClassName::Exceptional(1, 2)));
        assert_eq!(ClassName::parse("E_3"), Some(ClassName::Exceptional(3, 1)));
        assert_eq!(
            ClassName::parse("strict E_{0,2}"),
            Some(ClassName::StrictExceptional(0, 2))
        );
        assert_eq!(ClassName::parse("bogus"), None);
    }

    #[test]
    fn degree_checks_across_range() {
        for d in 2..=12 {
            let c = degree_check(Family::InverseGaussian, d);
            assert!(c.ok, "IG d={d}: {} != {}", c.hsq, c.expected);
            let c = degree_check(Family::Gamma, d);
            assert!(c.ok, "Gamma d={d}: {} != {}", c.hsq, c.expected);
        }
        assert_eq!(degree_check(Family::InverseGaussian, 4).hsq, 9);
        assert_eq!(degree_check(Family::Gamma, 4).hsq, 6);
        assert_eq!(degree_check(Family::Gamma, 2).hsq, 1);
    }

    #[test]
    fn h_meets_lines_in_the_map_degree() {
        for d in 2..=9 {
            let s = SurfaceDescriptor::new(Family::InverseGaussian, d);
            let h = named_class(&s, ClassName::H).unwrap();
            let l = named_class(&s, ClassName::L).unwrap();
            assert_eq!(intersect(&h, &l).unwrap(), 2 * d as i64 - 1);
            let s = SurfaceDescriptor::new(Family::Gamma, d);
            let h = named_class(&s, ClassName::H).unwrap();
            let l = named_class(&s, ClassName::L).unwrap();
            assert_eq!(intersect(&h, &l).unwrap(), d as i64);
        }
    }

    #[test]
    fn bilinear_and_symmetric() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let s = SurfaceDescriptor::new(Family::Gamma, 5);
        for _ in 0..100 {
            let mut rand_class = || {
                let mut c = s.zero();
                for v in &mut c.coeffs {
                    *v = rng.gen_range(-10..=10);
                }
                c
            };
            let a = rand_class();
            let b = rand_class();
            let c = rand_class();
            assert_eq!(
                intersect(&a.add(&b).unwrap(), &c).unwrap(),
                intersect(&a, &c).unwrap() + intersect(&b, &c).unwrap()
            );
            assert_eq!(intersect(&a, &b).unwrap(), intersect(&b, &a).unwrap());
        }
    }

    #[test]
    fn residual_meets_line_in_expected_degree() {
        // (H - 2kD) . L = 2d - 1 - 2ka for the inverse Gaussian surface,
        // independent of the exceptional part of D.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for k in 2..=5usize {
            for a in 1..=3usize {
                let dmin = (2 * k * a).div_ceil(2).max(2);
                for d in dmin..=20 {
                    let s = SurfaceDescriptor::new(Family::InverseGaussian, d);
                    let l = named_class(&s, ClassName::L).unwrap();
                    let mut dd = l.scale(a as i64);
                    for idx in 1..s.basis.len() {
                        let mut delta = s.zero();
                        delta.coeffs[idx] = -rng.gen_range(0..=2);
                        dd = dd.add(&delta).unwrap();
                    }
                    let h = named_class(&s, ClassName::H).unwrap();
                    let res = h.sub(&dd.scale(2 * k as i64)).unwrap();
                    assert_eq!(
                        intersect(&res, &l).unwrap(),
                        2 * d as i64 - 1 - 2 * (k * a) as i64
                    );
                }
            }
        }
    }

    #[test]
    fn gamma_ledger_first_entry() {
        // d=8, k=2: A = 4L - sum E_{i,j}; A . Lx = (d-2k) - d = -4.
        let s = SurfaceDescriptor::new(Family::Gamma, 8);
        let a = cone_residual_class(&s, 2);
        assert_eq!(a.coeff(BasisLabel::L), 4);
        let ledger = ledger_reduce(&a, &reduction_catalog(&s)).unwrap();
        assert!(!ledger.entries.is_empty());
        assert_eq!(ledger.entries[0].component, "Lx");
        assert_eq!(ledger.entries[0].intersection, -4);
    }

    #[test]
    fn trivial_ledger_is_empty() {
        let s = SurfaceDescriptor::new(Family::Gamma, 4);
        let l = named_class(&s, ClassName::L).unwrap();
        let e = named_class(&s, ClassName::Exceptional(1, 1)).unwrap();
        let ledger = ledger_reduce(&l, &[("E_{1,1}".to_string(), e)]).unwrap();
        assert!(ledger.entries.is_empty());
        assert_eq!(ledger.terminal, "L");
    }

    #[test]
    fn ig_ledger_residual_intersection() {
        // d=7, k=2, all-zero exceptional coefficients in D:
        // A . (L - E_{1,1} - E_2) = (2d-1-2k) - (d-1) - d = -2k.
        let s = SurfaceDescriptor::new(Family::InverseGaussian, 7);
        let a = cone_residual_class(&s, 2);
        let l1 = named_class(&s, ClassName::Line1).unwrap();
        assert_eq!(intersect(&a, &l1).unwrap(), -4);
        let ledger = ledger_reduce(&a, &reduction_catalog(&s)).unwrap();
        assert_eq!(ledger.entries[0].component, "L1");
        assert_eq!(ledger.entries[0].intersection, -4);
    }
}
