//! Certificates that the anticanonical morphism of a curve blow-up is small.
//!
//! Suppose `ψ` contracted a prime divisor `D ~ aH + bE`. Then `K²·D = 0`,
//! which pins `D` to a single primitive ray. Restricting to the strict
//! transform `S̃ ∈ |−K_X|` of a K3 section through the curve gives an even
//! binary lattice spanned by `H|S̃` and `C`, and:
//!
//! * if `D` goes to a point, `(D|S̃)² = −K·D² = 0`;
//! * if `D` goes to a curve, `D` is a conic bundle and `D|S̃ = k·l` for a
//!   single fibre `l`, a −2 curve (two disjoint rational curves are ruled
//!   out on a Picard-rank-2 K3), so `(D|S̃)² = −2k²` and `k` divides `D`.
//!
//! A certificate records which of these cases the numbers rule out. It is
//! only ever a sufficient test: failing to exclude a case yields
//! [`Verdict::Inconclusive`], never a claim that `ψ` is divisorial.

use std::collections::HashSet;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::lattice::{CanonicalDegrees, DivisorClass, HostKind, HostModel};
use crate::rational::{int, show, to_i64, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmallnessError {
    #[error("smallness certificates need a curve blow-up (E1), got {0}")]
    NotCurveBlowUp(HostKind),
    #[error("K^2.H = K^2.E = 0: no unique contracted ray")]
    Degenerate,
    #[error("K^2.H = {c1} and K^2.E = {c2} are both nonpositive; -K is not nef and big on this model")]
    NotNef { c1: i64, c2: i64 },
    #[error("K3 lattice must be even with positive H^2, got ({hh}, {hc}, {cc})")]
    BadGram { hh: i64, hc: i64, cc: i64 },
    #[error("class {0} is not integral")]
    NonIntegral(String),
    #[error("intersection number {0} does not fit the integer lattice")]
    Overflow(String),
}

/// `(K²·H, K²·E)`: the linear form whose kernel holds any contracted divisor.
pub fn contraction_coefficients(model: &HostModel) -> (Rational, Rational) {
    let k = model.anticanonical();
    (model.triple_product(&k, &k, &DivisorClass::h()), model.triple_product(&k, &k, &DivisorClass::e()))
}

/// `K²·H` from the canonical degrees, using `H = (−K + qE)/p`.
pub fn c1_from_degrees(deg: &CanonicalDegrees, p: &Rational, q: &Rational) -> Rational {
    (&deg.k3 + q * &deg.kke) / p
}

fn primitive_kernel(c1: i64, c2: i64) -> Result<(i64, i64), SmallnessError> {
    if c1 == 0 && c2 == 0 {
        return Err(SmallnessError::Degenerate);
    }
    let g = c1.gcd(&c2);
    let (mut a, mut b) = (c2 / g, -c1 / g);
    if a < 0 || (a == 0 && b < 0) {
        a = -a;
        b = -b;
    }
    Ok((a, b))
}

/// The primitive integral class `D = aH + bE` with `K²·D = 0`, `a > 0`.
pub fn contracted_class(c1: i64, c2: i64) -> Result<DivisorClass, SmallnessError> {
    primitive_kernel(c1, c2).map(|(a, b)| DivisorClass::from_ints(a, b))
}

/// Gram matrix of `⟨H|S̃, C⟩` on the K3 section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct K3Gram {
    pub hh: i64,
    pub hc: i64,
    pub cc: i64,
}

impl K3Gram {
    pub fn new(hh: i64, hc: i64, cc: i64) -> Result<Self, SmallnessError> {
        if hh <= 0 || hh % 2 != 0 || cc % 2 != 0 {
            return Err(SmallnessError::BadGram { hh, hc, cc });
        }
        Ok(K3Gram { hh, hc, cc })
    }

    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (x, y) = (x as i128, y as i128);
        self.hh as i128 * x * x + 2 * self.hc as i128 * x * y + self.cc as i128 * y * y
    }

    /// `hc² − hh·cc`; positive for a hyperbolic lattice.
    pub fn discriminant(&self) -> i128 {
        let (hh, hc, cc) = (self.hh as i128, self.hc as i128, self.cc as i128);
        hc * hc - hh * cc
    }
}

/// `(r·H³, d, 2g − 2)` for a curve blow-up on an index-`r` host.
pub fn k3_gram(model: &HostModel) -> Result<K3Gram, SmallnessError> {
    let HostKind::E1 { r, d, g } = model.kind() else {
        return Err(SmallnessError::NotCurveBlowUp(model.kind()));
    };
    let hh = int(r as i64) * model.h3();
    let hh = to_i64(&hh).ok_or_else(|| SmallnessError::Overflow(show(&hh)))?;
    K3Gram::new(hh, d as i64, 2 * g as i64 - 2)
}

/// `(D|S̃)²` for `D = aH + bE`, which restricts to `aH|S̃ + bC`.
pub fn restriction_square(gram: &K3Gram, d: &DivisorClass) -> Result<i64, SmallnessError> {
    let (Some(a), Some(b)) = (to_i64(&d.a), to_i64(&d.b)) else {
        return Err(SmallnessError::NonIntegral(d.to_string()));
    };
    i64::try_from(gram.eval(a, b)).map_err(|_| SmallnessError::Overflow(d.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Obstruction {
    /// `−2` is not a value of the form modulo this integer.
    Modulus(u32),
    /// The form is positive semidefinite.
    NonNegativeForm,
}

/// Whether the K3 lattice contains a class of square `−2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MinusTwo {
    Yes { x: i64, y: i64 },
    No(Obstruction),
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Moduli `2..=max_modulus` are tried for a local obstruction.
    pub max_modulus: u32,
    /// Witnesses are searched over `|y| ≤ search_bound`, every `x`.
    pub search_bound: i64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { max_modulus: 64, search_bound: 10_000 }
    }
}

fn isqrt(n: i128) -> Option<i128> {
    if n < 0 {
        return None;
    }
    let mut s = (n as f64).sqrt() as i128;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    (s * s == n).then_some(s)
}

fn find_minus_two(gram: &K3Gram, bound: i64) -> Option<(i64, i64)> {
    let hh = gram.hh as i128;
    let hc = gram.hc as i128;
    let disc = gram.discriminant();
    let ys = (0..=bound).flat_map(|y| if y == 0 { vec![0] } else { vec![y, -y] });
    for y in ys {
        let yy = y as i128;
        // hh x^2 + 2 hc y x + cc y^2 + 2 = 0 has quarter-discriminant disc*y^2 - 2hh
        let Some(s) = isqrt(disc * yy * yy - 2 * hh) else { continue };
        for num in [-hc * yy + s, -hc * yy - s] {
            if num % hh == 0 {
                let x = (num / hh) as i64;
                debug_assert_eq!(gram.eval(x, y), -2);
                return Some((x, y));
            }
        }
    }
    None
}

fn obstructing_modulus(gram: &K3Gram, max_modulus: u32) -> Option<u32> {
    (2..=max_modulus).find(|&m| {
        let m = m as i64;
        let target = (-2i64).rem_euclid(m);
        let mut seen = HashSet::new();
        for x in 0..m {
            for y in 0..m {
                seen.insert((gram.eval(x, y).rem_euclid(m as i128)) as i64);
            }
        }
        !seen.contains(&target)
    })
}

/// Three-valued: a witness, a proof of absence, or neither.
pub fn represents_minus_two(gram: &K3Gram, opts: &SearchOptions) -> MinusTwo {
    if let Some((x, y)) = find_minus_two(gram, opts.search_bound) {
        return MinusTwo::Yes { x, y };
    }
    if gram.discriminant() <= 0 {
        return MinusTwo::No(Obstruction::NonNegativeForm);
    }
    match obstructing_modulus(gram, opts.max_modulus) {
        Some(m) => MinusTwo::No(Obstruction::Modulus(m)),
        None => MinusTwo::Unknown,
    }
}

/// Why a conic-bundle contraction is impossible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CurveReason {
    /// `(D|S̃)²` is not of the form `−2k²`.
    #[serde(rename = "nonminus2square")]
    NonMinusTwoSquare,
    /// The K3 lattice has no class of square `−2`, hence no fibre class.
    #[serde(rename = "no_minus2_class")]
    NoMinusTwoClass,
    /// `(D|S̃)² = −2k²` with `k > 1`, but `D` is primitive.
    #[serde(rename = "primitivity")]
    Primitivity,
}

impl CurveReason {
    pub fn token(&self) -> &'static str {
        match self {
            CurveReason::NonMinusTwoSquare => "nonminus2square",
            CurveReason::NoMinusTwoClass => "no_minus2_class",
            CurveReason::Primitivity => "primitivity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    SmallCertified,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallnessCertificate {
    pub case_id: Option<String>,
    pub c1: i64,
    pub c2: i64,
    pub d_class: DivisorClass,
    pub gram: K3Gram,
    pub square: i64,
    pub point_excluded: bool,
    /// Every curve-case exclusion that holds, in reporting order.
    pub curve_routes: Vec<CurveReason>,
    pub minus_two: MinusTwo,
    pub verdict: Verdict,
}

impl SmallnessCertificate {
    pub fn curve_excluded(&self) -> bool {
        !self.curve_routes.is_empty()
    }

    pub fn curve_reason(&self) -> Option<CurveReason> {
        self.curve_routes.first().copied()
    }

    pub fn point_reason(&self) -> &'static str {
        if self.point_excluded {
            "restriction square is nonzero"
        } else {
            "restriction square is zero"
        }
    }

    pub fn record(&self) -> CertificateRecord {
        CertificateRecord {
            case_id: self.case_id.clone(),
            c1: self.c1,
            c2: self.c2,
            d: [to_i64(&self.d_class.a).unwrap_or_default(), to_i64(&self.d_class.b).unwrap_or_default()],
            gram: [self.gram.hh, self.gram.hc, self.gram.cc],
            square: self.square,
            point_excluded: self.point_excluded,
            curve_reason: self.curve_reason(),
            verdict: self.verdict,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.record()).expect("plain data serializes")
    }
}

/// Serialized certificate. Field names and order are part of the output format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CertificateRecord {
    pub case_id: Option<String>,
    pub c1: i64,
    pub c2: i64,
    #[serde(rename = "D")]
    pub d: [i64; 2],
    pub gram: [i64; 3],
    pub square: i64,
    pub point_excluded: bool,
    pub curve_reason: Option<CurveReason>,
    pub verdict: Verdict,
}

/// `Some(k)` if `square = −2k²` with `k ≥ 1`.
fn minus_two_multiple(square: i64) -> Option<i64> {
    if square >= 0 || square % 2 != 0 {
        return None;
    }
    let kk = -square / 2;
    isqrt(kk as i128).map(|k| k as i64)
}

pub fn certify_smallness(
    model: &HostModel,
    case_id: Option<String>,
    opts: &SearchOptions,
) -> Result<SmallnessCertificate, SmallnessError> {
    let gram = k3_gram(model)?;
    let (c1, c2) = contraction_coefficients(model);
    let (c1, c2) = match (to_i64(&c1), to_i64(&c2)) {
        (Some(c1), Some(c2)) => (c1, c2),
        _ => return Err(SmallnessError::NonIntegral(format!("({}, {})", show(&c1), show(&c2)))),
    };
    if c1 <= 0 && c2 <= 0 {
        return Err(if c1 == 0 && c2 == 0 { SmallnessError::Degenerate } else { SmallnessError::NotNef { c1, c2 } });
    }
    let (a, b) = primitive_kernel(c1, c2)?;
    let d_class = DivisorClass::from_ints(a, b);
    let square = restriction_square(&gram, &d_class)?;
    let point_excluded = square != 0;

    let minus_two = represents_minus_two(&gram, opts);
    let mut curve_routes = Vec::new();
    let multiple = minus_two_multiple(square);
    if multiple.is_none() {
        curve_routes.push(CurveReason::NonMinusTwoSquare);
    }
    if matches!(minus_two, MinusTwo::No(_)) {
        curve_routes.push(CurveReason::NoMinusTwoClass);
    }
    if let Some(k) = multiple {
        // D|S = k·l forces k | gcd(a, b)
        if a.gcd(&b) % k != 0 {
            curve_routes.push(CurveReason::Primitivity);
        }
    }

    let verdict =
        if point_excluded && !curve_routes.is_empty() { Verdict::SmallCertified } else { Verdict::Inconclusive };
    Ok(SmallnessCertificate {
        case_id,
        c1,
        c2,
        d_class,
        gram,
        square,
        point_excluded,
        curve_routes,
        minus_two,
        verdict,
    })
}
