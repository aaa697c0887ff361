//! The rank-2 Picard lattice of a blow-up `X → Y` of a rank-1 Fano threefold.
//!
//! `N¹(X)` is spanned by `H` (pullback of the fundamental class of `Y`) and
//! the exceptional divisor `E`. The trilinear intersection form is fixed by
//! four numbers `(H³, H²E, HE², E³)`; `H²E` vanishes for every extremal type.
//! The anticanonical class is `−K_X = pH − qE`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::rational::{int, ratio, show, Rational};

/// Mori type of the extremal contraction `X → Y`.
///
/// Only `E1` (blow-up of a smooth curve of degree `d` and genus `g` on a
/// Fano threefold of index `r`) carries curve data; the point types are
/// distinguished by their discrepancy and `E³`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HostKind {
    E1 { r: u32, d: u32, g: u32 },
    E2,
    E3E4,
    E5,
}

impl HostKind {
    /// `−K_Y³ − (−K_X³)`, the anticanonical degree lost by blowing up.
    pub fn degree_drop(&self) -> Rational {
        match *self {
            HostKind::E1 { r, d, g } => {
                let (r, d, g) = (r as i64, d as i64, g as i64);
                int(2 * r * d - 2 * g + 2)
            }
            HostKind::E2 => int(8),
            HostKind::E3E4 => int(2),
            HostKind::E5 => ratio(1, 2),
        }
    }

    /// Coefficient of `E` in `−K_X = pH − qE`.
    pub fn discrepancy(&self) -> Rational {
        match self {
            HostKind::E1 { .. } | HostKind::E3E4 => int(1),
            HostKind::E2 => int(2),
            HostKind::E5 => ratio(1, 2),
        }
    }

    pub fn is_point(&self) -> bool {
        !matches!(self, HostKind::E1 { .. })
    }

    pub fn validate(&self) -> Result<(), LatticeError> {
        if let HostKind::E1 { r, d, .. } = *self {
            if !(1..=4).contains(&r) {
                return Err(LatticeError::InvalidIndex(r));
            }
            if d == 0 {
                return Err(LatticeError::ZeroCurveDegree);
            }
        }
        Ok(())
    }
}

impl fmt::Display for HostKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HostKind::E1 { r, d, g } => write!(f, "E1(r={r},d={d},g={g})"),
            HostKind::E2 => f.write_str("E2"),
            HostKind::E3E4 => f.write_str("E3/E4"),
            HostKind::E5 => f.write_str("E5"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("index r = {0} is not the index of a rank-1 Fano threefold (expected 1..=4)")]
    InvalidIndex(u32),
    #[error("curve degree must be positive")]
    ZeroCurveDegree,
    #[error("anticanonical degree must be positive, got {0}")]
    NonPositiveDegree(String),
    #[error("H^3 = {minus_ky3} / {r}^3 is not an integer")]
    NonIntegralH3 { minus_ky3: String, r: u32 },
    #[error("point blow-up of a Gorenstein host needs an integral -K_Y^3, got {0}")]
    NonIntegralPointHost(String),
    #[error("blow-up has -K_X^3 = {0}, which is not positive")]
    NotBig(String),
}

/// A divisor class `aH + bE`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DivisorClass {
    pub a: Rational,
    pub b: Rational,
}

impl DivisorClass {
    pub fn new(a: Rational, b: Rational) -> Self {
        DivisorClass { a, b }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        DivisorClass::new(int(a), int(b))
    }

    pub fn zero() -> Self {
        DivisorClass::from_ints(0, 0)
    }

    pub fn h() -> Self {
        DivisorClass::from_ints(1, 0)
    }

    pub fn e() -> Self {
        DivisorClass::from_ints(0, 1)
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    pub fn scale(&self, k: &Rational) -> Self {
        DivisorClass::new(&self.a * k, &self.b * k)
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", show(&self.a), show(&self.b))
    }
}

impl Add for &DivisorClass {
    type Output = DivisorClass;
    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        DivisorClass::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl Sub for &DivisorClass {
    type Output = DivisorClass;
    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        DivisorClass::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl Neg for &DivisorClass {
    type Output = DivisorClass;
    fn neg(self) -> DivisorClass {
        DivisorClass::new(-&self.a, -&self.b)
    }
}

impl Mul<&DivisorClass> for &Rational {
    type Output = DivisorClass;
    fn mul(self, rhs: &DivisorClass) -> DivisorClass {
        rhs.scale(self)
    }
}

/// `((−K)³, (−K)²E, (−K)E²)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalDegrees {
    pub k3: Rational,
    pub kke: Rational,
    pub kee: Rational,
}

/// Intersection data of one blow-up. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HostModel {
    kind: HostKind,
    h3: Rational,
    p: Rational,
    q: Rational,
    h2e: Rational,
    he2: Rational,
    e3: Rational,
}

/// Builds the intersection model of `Bl Y` from the extremal type and `−K_Y³`.
///
/// For `E1` the host has index `r`, so `H³ = −K_Y³ / r³` must be integral.
/// Point blow-ups take `H = −K_Y` (so `p = 1`); `E5` hosts are allowed a
/// fractional degree since `Y` then carries a non-Gorenstein point.
pub fn make_host_model(kind: HostKind, minus_ky3: &Rational) -> Result<HostModel, LatticeError> {
    kind.validate()?;
    if !minus_ky3.is_positive() {
        return Err(LatticeError::NonPositiveDegree(show(minus_ky3)));
    }
    let model = match kind {
        HostKind::E1 { r, d, g } => {
            let h3 = minus_ky3 / int(r as i64).pow(3);
            if !h3.is_integer() {
                return Err(LatticeError::NonIntegralH3 { minus_ky3: show(minus_ky3), r });
            }
            let (ri, di, gi) = (r as i64, d as i64, g as i64);
            HostModel {
                kind,
                h3,
                p: int(ri),
                q: int(1),
                h2e: Rational::zero(),
                he2: int(-di),
                e3: int(-ri * di + 2 - 2 * gi),
            }
        }
        HostKind::E2 | HostKind::E3E4 | HostKind::E5 => {
            if kind != HostKind::E5 && !minus_ky3.is_integer() {
                return Err(LatticeError::NonIntegralPointHost(show(minus_ky3)));
            }
            let e3 = match kind {
                HostKind::E2 => int(1),
                HostKind::E3E4 => int(2),
                _ => int(4),
            };
            HostModel {
                kind,
                h3: minus_ky3.clone(),
                p: Rational::one(),
                q: kind.discrepancy(),
                h2e: Rational::zero(),
                he2: Rational::zero(),
                e3,
            }
        }
    };
    let k3 = model.minus_k3();
    if !k3.is_positive() {
        return Err(LatticeError::NotBig(show(&k3)));
    }
    Ok(model)
}

impl HostModel {
    pub fn kind(&self) -> HostKind {
        self.kind
    }
    pub fn h3(&self) -> &Rational {
        &self.h3
    }
    pub fn p(&self) -> &Rational {
        &self.p
    }
    pub fn q(&self) -> &Rational {
        &self.q
    }
    pub fn h2e(&self) -> &Rational {
        &self.h2e
    }
    pub fn he2(&self) -> &Rational {
        &self.he2
    }
    pub fn e3(&self) -> &Rational {
        &self.e3
    }

    /// `−K_Y³ = p³H³`.
    pub fn minus_ky3(&self) -> Rational {
        self.p.pow(3) * &self.h3
    }

    /// Symmetric trilinear form `D₁·D₂·D₃`.
    pub fn triple_product(&self, x: &DivisorClass, y: &DivisorClass, z: &DivisorClass) -> Rational {
        let hhh = &x.a * &y.a * &z.a;
        let hhe = &x.a * &y.a * &z.b + &x.a * &y.b * &z.a + &x.b * &y.a * &z.a;
        let hee = &x.a * &y.b * &z.b + &x.b * &y.a * &z.b + &x.b * &y.b * &z.a;
        let eee = &x.b * &y.b * &z.b;
        hhh * &self.h3 + hhe * &self.h2e + hee * &self.he2 + eee * &self.e3
    }

    pub fn cube(&self, d: &DivisorClass) -> Rational {
        self.triple_product(d, d, d)
    }

    /// `−K_X = pH − qE`.
    pub fn anticanonical(&self) -> DivisorClass {
        DivisorClass::new(self.p.clone(), -&self.q)
    }

    pub fn minus_k3(&self) -> Rational {
        let k = self.anticanonical();
        self.cube(&k)
    }

    pub fn canonical_degrees(&self) -> CanonicalDegrees {
        let k = self.anticanonical();
        let e = DivisorClass::e();
        CanonicalDegrees {
            k3: self.triple_product(&k, &k, &k),
            kke: self.triple_product(&k, &k, &e),
            kee: self.triple_product(&k, &e, &e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1(r: u32, d: u32, g: u32, ky3: i64) -> HostModel {
        make_host_model(HostKind::E1 { r, d, g }, &int(ky3)).unwrap()
    }

    #[test]
    fn case_10_host() {
        let m = e1(1, 4, 1, 10);
        assert_eq!(m.h3(), &int(10));
        assert_eq!(m.he2(), &int(-4));
        assert_eq!(m.e3(), &int(-4));
        assert_eq!((m.p(), m.q()), (&int(1), &int(1)));
        assert_eq!(m.minus_k3(), int(2));
    }

    #[test]
    fn case_39_host() {
        let m = e1(2, 10, 6, 32);
        assert_eq!(m.h3(), &int(4));
        assert_eq!(m.he2(), &int(-10));
        assert_eq!(m.e3(), &int(-30));
        assert_eq!(m.anticanonical(), DivisorClass::from_ints(2, -1));
        let k = m.anticanonical();
        assert_eq!(m.triple_product(&k, &k, &DivisorClass::from_ints(5, -3)), int(0));
    }

    #[test]
    fn point_hosts() {
        let m = make_host_model(HostKind::E2, &int(10)).unwrap();
        assert_eq!((m.h3(), m.e3(), m.q()), (&int(10), &int(1), &int(2)));
        assert_eq!(m.minus_k3(), int(2));

        let m = make_host_model(HostKind::E5, &ratio(5, 2)).unwrap();
        assert_eq!((m.h3(), m.e3(), m.q()), (&ratio(5, 2), &int(4), &ratio(1, 2)));
        assert_eq!(m.minus_k3(), int(2));
        assert_eq!(m.anticanonical(), DivisorClass::new(int(1), ratio(-1, 2)));

        let m = make_host_model(HostKind::E3E4, &int(6)).unwrap();
        assert_eq!(m.minus_k3(), int(4));
    }

    #[test]
    fn canonical_degrees_match_closed_forms() {
        // case 67 and case 102 hosts
        assert_eq!(e1(2, 8, 3, 32).canonical_degrees(), CanonicalDegrees { k3: int(4), kke: int(12), kee: int(4) });
        assert_eq!(e1(3, 8, 3, 54).canonical_degrees(), CanonicalDegrees { k3: int(10), kke: int(20), kee: int(4) });
        assert_eq!(e1(3, 10, 6, 54).canonical_degrees(), CanonicalDegrees { k3: int(4), kke: int(20), kee: int(10) });
    }

    #[test]
    fn zero_class_kills_everything() {
        let m = e1(1, 4, 1, 10);
        let z = DivisorClass::zero();
        let d = DivisorClass::from_ints(3, -7);
        assert_eq!(m.triple_product(&z, &d, &d), int(0));
    }

    #[test]
    fn construction_errors() {
        let bad_r = make_host_model(HostKind::E1 { r: 5, d: 1, g: 0 }, &int(125));
        assert_eq!(bad_r, Err(LatticeError::InvalidIndex(5)));
        let frac = make_host_model(HostKind::E1 { r: 2, d: 3, g: 0 }, &int(31));
        assert!(matches!(frac, Err(LatticeError::NonIntegralH3 { .. })));
        let neg = make_host_model(HostKind::E2, &int(-2));
        assert!(matches!(neg, Err(LatticeError::NonPositiveDegree(_))));
        let zero_d = make_host_model(HostKind::E1 { r: 1, d: 0, g: 0 }, &int(10));
        assert_eq!(zero_d, Err(LatticeError::ZeroCurveDegree));
        let gor = make_host_model(HostKind::E2, &ratio(5, 2));
        assert!(matches!(gor, Err(LatticeError::NonIntegralPointHost(_))));
        // conic on a quartic double solid is not big enough: 2 - 8 < 0
        let small = make_host_model(HostKind::E2, &int(2));
        assert!(matches!(small, Err(LatticeError::NotBig(_))));
    }

    #[test]
    fn degree_drops() {
        assert_eq!(HostKind::E1 { r: 2, d: 5, g: 1 }.degree_drop(), int(20));
        assert_eq!(HostKind::E2.degree_drop(), int(8));
        assert_eq!(HostKind::E3E4.degree_drop(), int(2));
        assert_eq!(HostKind::E5.degree_drop(), ratio(1, 2));
    }
}
