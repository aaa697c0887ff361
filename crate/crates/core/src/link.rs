//! Numerics of the second extremal leg of a two-ray link.
//!
//! The anticanonical morphism of `X` induces a flop `X ⇢ X⁺`, an isomorphism
//! in codimension one, so `N¹(X) = N¹(X⁺)` and the exceptional divisor of
//! `X⁺ → Y⁺` is some class `E⁺ = α(−K) + βE`. Pairings with `−K` survive the
//! flop unchanged; the cube of a class `D` changes by `t(D)³·e`, where
//! `t(D) = aq + bp` is proportional to `D·Γ` on the flopping curves.
//!
//! Given the target type, `α` and `β` come from the two pairings
//! `(−K)²E⁺` and `(−K)E⁺²`, and `e` from `E⁺³`.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::catalog::{self, CatalogError, TableRow};
use crate::lattice::{make_host_model, CanonicalDegrees, DivisorClass, HostKind, HostModel, LatticeError};
use crate::rational::{int, show, sqrt_exact, Rational};

/// Type of `X⁺ → Y⁺`. Mirrors [`HostKind`] on the `X⁺` side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CompletionKind {
    E1 { r: u32, d: u32, g: u32 },
    E2,
    E3E4,
    E5,
}

impl From<CompletionKind> for HostKind {
    fn from(k: CompletionKind) -> HostKind {
        match k {
            CompletionKind::E1 { r, d, g } => HostKind::E1 { r, d, g },
            CompletionKind::E2 => HostKind::E2,
            CompletionKind::E3E4 => HostKind::E3E4,
            CompletionKind::E5 => HostKind::E5,
        }
    }
}

impl From<HostKind> for CompletionKind {
    fn from(k: HostKind) -> CompletionKind {
        match k {
            HostKind::E1 { r, d, g } => CompletionKind::E1 { r, d, g },
            HostKind::E2 => CompletionKind::E2,
            HostKind::E3E4 => CompletionKind::E3E4,
            HostKind::E5 => CompletionKind::E5,
        }
    }
}

impl std::fmt::Display for CompletionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        HostKind::from(*self).fmt(f)
    }
}

impl CompletionKind {
    /// Index of `Y⁺` in the normalization `−K_{Y⁺} = p⁺H⁺`.
    pub fn index(&self) -> Rational {
        match self {
            CompletionKind::E1 { r, .. } => int(*r as i64),
            _ => Rational::one(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("(-K)^3 = {0} is not positive")]
    NonPositiveDegree(String),
    #[error("pairings do not determine E+ (every beta solves the system)")]
    Underdetermined,
    #[error("t(E+) = 0: the flop does not see E+, so e is undetermined")]
    DegenerateFlop,
}

/// `((−K)²E⁺, (−K)E⁺², E⁺³)` computed on `X⁺`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSignature {
    pub s1: Rational,
    pub s2: Rational,
    pub s3: Rational,
    pub kind: CompletionKind,
}

pub fn target_signature(kind: CompletionKind) -> Result<TargetSignature, LinkError> {
    HostKind::from(kind).validate()?;
    let (s1, s2, s3) = match kind {
        CompletionKind::E1 { r, d, g } => {
            let (r, d, g) = (r as i64, d as i64, g as i64);
            (int(r * d + 2 - 2 * g), int(2 * g - 2), int(-r * d + 2 - 2 * g))
        }
        CompletionKind::E2 => (int(4), int(-2), int(1)),
        CompletionKind::E3E4 => (int(2), int(-2), int(2)),
        CompletionKind::E5 => (int(1), int(-2), int(4)),
    };
    Ok(TargetSignature { s1, s2, s3, kind })
}

/// `t(D) = aq + bp`; vanishes on `−K`.
pub fn gamma_coefficient(model: &HostModel, d: &DivisorClass) -> Rational {
    &d.a * model.q() + &d.b * model.p()
}

/// Triple product on `X⁺` of the transforms of `D₁, D₂, D₃`.
pub fn flopped_triple(
    model: &HostModel,
    d1: &DivisorClass,
    d2: &DivisorClass,
    d3: &DivisorClass,
    e: &Rational,
) -> Rational {
    let t = gamma_coefficient(model, d1) * gamma_coefficient(model, d2) * gamma_coefficient(model, d3);
    model.triple_product(d1, d2, d3) - t * e
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlphaBeta {
    pub alpha: Rational,
    pub beta: Rational,
}

impl AlphaBeta {
    pub fn new(alpha: Rational, beta: Rational) -> Self {
        AlphaBeta { alpha, beta }
    }

    pub fn is_normalized(&self) -> bool {
        self.alpha.is_positive() && self.beta.is_negative()
    }
}

/// Every rational `(α, β)` with `(−K)²E⁺ = s1` and `(−K)E⁺² = s2`,
/// ascending in `β`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AlphaBetaRoots {
    pub roots: Vec<AlphaBeta>,
}

impl AlphaBetaRoots {
    /// Roots with `α > 0, β < 0`; the identity root `E⁺ = E` never passes.
    pub fn normalized(&self) -> impl Iterator<Item = &AlphaBeta> {
        self.roots.iter().filter(|r| r.is_normalized())
    }

    pub fn discarded(&self) -> impl Iterator<Item = &AlphaBeta> {
        self.roots.iter().filter(|r| !r.is_normalized())
    }
}

/// Solves `α·k3 + β·kkE = s1`, `α²k3 + 2αβ·kkE + β²kEE = s2`.
///
/// Eliminating `α` leaves `β²(k3·kEE − kkE²) = k3·s2 − s1²`, so there are at
/// most two rational roots, symmetric in `β`.
pub fn solve_alpha_beta(deg: &CanonicalDegrees, sig: &TargetSignature) -> Result<AlphaBetaRoots, LinkError> {
    if !deg.k3.is_positive() {
        return Err(LinkError::NonPositiveDegree(show(&deg.k3)));
    }
    let lead = &deg.k3 * &deg.kee - &deg.kke * &deg.kke;
    let rhs = &deg.k3 * &sig.s2 - &sig.s1 * &sig.s1;
    if lead.is_zero() {
        return if rhs.is_zero() { Err(LinkError::Underdetermined) } else { Ok(AlphaBetaRoots::default()) };
    }
    let Some(root) = sqrt_exact(&(rhs / lead)) else {
        return Ok(AlphaBetaRoots::default());
    };
    let mut betas = vec![-root.clone()];
    if !root.is_zero() {
        betas.push(root);
    }
    let roots = betas
        .into_iter()
        .map(|beta| {
            let alpha = (&sig.s1 - &beta * &deg.kke) / &deg.k3;
            AlphaBeta { alpha, beta }
        })
        .collect();
    Ok(AlphaBetaRoots { roots })
}

/// `E⁺ = α(−K) + βE` in the `(H, E)` basis.
pub fn e_plus_class(model: &HostModel, alpha: &Rational, beta: &Rational) -> DivisorClass {
    let k = model.anticanonical();
    &k.scale(alpha) + &DivisorClass::new(Rational::zero(), beta.clone())
}

/// Solves `s3 = E⁺³ − t(E⁺)³·e` for `e`.
pub fn compute_e(
    model: &HostModel,
    alpha: &Rational,
    beta: &Rational,
    sig: &TargetSignature,
) -> Result<Rational, LinkError> {
    let e_plus = e_plus_class(model, alpha, beta);
    let t = gamma_coefficient(model, &e_plus);
    if t.is_zero() {
        return Err(LinkError::DegenerateFlop);
    }
    Ok((model.cube(&e_plus) - &sig.s3) / t.pow(3))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkCandidate {
    pub alpha: Rational,
    pub beta: Rational,
    pub e: Rational,
    pub completion: CompletionKind,
    pub e_plus_class: DivisorClass,
    pub minus_ky_plus3: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchBounds {
    pub d_max: u32,
    pub g_max: u32,
    pub r_values: Vec<u32>,
    pub include_points: bool,
    /// Require `(H⁺, E⁺)` to span the same integral lattice as `(H, E)`.
    pub lattice_check: bool,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { d_max: 20, g_max: 20, r_values: vec![1, 2, 3, 4], include_points: true, lattice_check: true }
    }
}

impl SearchBounds {
    pub fn kinds(&self) -> Vec<CompletionKind> {
        let mut kinds = Vec::new();
        for &r in &self.r_values {
            for d in 1..=self.d_max {
                for g in 0..=self.g_max {
                    kinds.push(CompletionKind::E1 { r, d, g });
                }
            }
        }
        if self.include_points {
            kinds.extend([CompletionKind::E2, CompletionKind::E3E4, CompletionKind::E5]);
        }
        kinds
    }
}

/// Is `x(−K) + yE` an integral class on `X`?
fn in_host_lattice(model: &HostModel, x: &Rational, y: &Rational) -> bool {
    if model.kind() == HostKind::E5 {
        // H is only Q-Cartier here; Pic X is spanned by -K and E
        return x.is_integer() && y.is_integer();
    }
    (x * model.p()).is_integer() && (y - x * model.q()).is_integer()
}

/// `Pic X⁺ = Pic X` check for a solved `(α, β)`.
pub fn lattice_compatible(model: &HostModel, kind: CompletionKind, ab: &AlphaBeta) -> bool {
    if !in_host_lattice(model, &ab.alpha, &ab.beta) {
        return false;
    }
    let host_covolume = if model.kind() == HostKind::E5 { Rational::one() } else { model.p().recip() };
    let target_covolume = if kind == CompletionKind::E5 {
        ab.beta.abs()
    } else {
        let p_plus = kind.index();
        let q_plus = HostKind::from(kind).discrepancy();
        let hx = (Rational::one() + &q_plus * &ab.alpha) / &p_plus;
        let hy = &q_plus * &ab.beta / &p_plus;
        if !in_host_lattice(model, &hx, &hy) {
            return false;
        }
        ab.beta.abs() / p_plus
    };
    host_covolume == target_covolume
}

/// All numerically admissible second legs within `bounds`, sorted by
/// completion kind, then `α`.
pub fn enumerate_completions(model: &HostModel, bounds: &SearchBounds) -> Vec<LinkCandidate> {
    let deg = model.canonical_degrees();
    let minus_kx3 = deg.k3.clone();
    let mut out = Vec::new();
    for kind in bounds.kinds() {
        let Ok(sig) = target_signature(kind) else { continue };
        let target = HostKind::from(kind);
        let minus_ky_plus3 = &minus_kx3 + target.degree_drop();
        if !catalog::admissible_base(target, &minus_ky_plus3) {
            continue;
        }
        // the mirrored model rejects non-integral H+^3 and must give the same -K^3
        match make_host_model(target, &minus_ky_plus3) {
            Ok(mirror) if mirror.minus_k3() == minus_kx3 => {}
            _ => continue,
        }
        let Ok(roots) = solve_alpha_beta(&deg, &sig) else { continue };
        for ab in roots.normalized() {
            if bounds.lattice_check && !lattice_compatible(model, kind, ab) {
                continue;
            }
            let Ok(e) = compute_e(model, &ab.alpha, &ab.beta, &sig) else { continue };
            if !(e.is_positive() && e.is_integer()) {
                continue;
            }
            out.push(LinkCandidate {
                e_plus_class: e_plus_class(model, &ab.alpha, &ab.beta),
                alpha: ab.alpha.clone(),
                beta: ab.beta.clone(),
                e,
                completion: kind,
                minus_ky_plus3: minus_ky_plus3.clone(),
            });
        }
    }
    out.sort_by(|x, y| (x.completion, &x.alpha).cmp(&(y.completion, &y.alpha)));
    out
}

/// One recomputed quantity against its expected value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnCheck {
    pub column: &'static str,
    /// Printed value, or the value the mirrored `X⁺` model demands.
    pub expected: Option<Rational>,
    pub computed: Option<Rational>,
}

impl ColumnCheck {
    pub fn passed(&self) -> bool {
        match (&self.expected, &self.computed) {
            (Some(x), Some(y)) => x == y,
            (None, _) => true,
            (Some(_), None) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkVerification {
    pub checks: Vec<ColumnCheck>,
    /// Raw root set for the row's completion type.
    pub roots: AlphaBetaRoots,
    pub chosen: Option<AlphaBeta>,
}

impl LinkVerification {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(ColumnCheck::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ColumnCheck> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn computed(&self, column: &str) -> Option<&Rational> {
        self.checks.iter().find(|c| c.column == column)?.computed.as_ref()
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("row {row}: {source}")]
    Lattice {
        row: String,
        #[source]
        source: LatticeError,
    },
    #[error("row {row}: {source}")]
    Link {
        row: String,
        #[source]
        source: LinkError,
    },
}

/// Host model of the row's `X → Y` leg.
pub fn row_host_model(row: &TableRow) -> Result<HostModel, VerifyError> {
    let kind = row.host_kind()?;
    make_host_model(kind, &row.ky3.value).map_err(|source| VerifyError::Lattice { row: row.id(), source })
}

/// Recomputes `−K_X³`, `−K_{Y⁺}³`, `α`, `β`, `e` for a printed row, plus the
/// `X⁺`-side consistency checks, and compares them exactly.
pub fn verify_link(model: &HostModel, row: &TableRow) -> Result<LinkVerification, VerifyError> {
    let link_err = |source| VerifyError::Link { row: row.id(), source };
    let target_kind = row.target_kind()?;
    let kind = CompletionKind::from(target_kind);
    let sig = target_signature(kind).map_err(link_err)?;
    let deg = model.canonical_degrees();
    let minus_kx3 = deg.k3.clone();
    let minus_ky_plus3 = &minus_kx3 + target_kind.degree_drop();

    let mut checks = vec![
        ColumnCheck { column: "kx3", expected: Some(row.kx3.value.clone()), computed: Some(minus_kx3.clone()) },
        ColumnCheck {
            column: "kyp3",
            expected: row.printed_target_degree().map(|p| p.value.clone()),
            computed: Some(minus_ky_plus3),
        },
    ];

    // X+ leg read off its own printed degree must give the same -K^3
    let mirror = row
        .printed_target_degree()
        .map(|p| make_host_model(target_kind, &p.value))
        .transpose()
        .map_err(|source| VerifyError::Lattice { row: row.id(), source })?;
    checks.push(ColumnCheck {
        column: "kx3_plus",
        expected: Some(minus_kx3.clone()),
        computed: mirror.as_ref().map(HostModel::minus_k3),
    });

    let roots = solve_alpha_beta(&deg, &sig).map_err(link_err)?;
    let printed = AlphaBeta::new(row.alpha.value.clone(), row.beta.value.clone());
    let chosen = roots.normalized().find(|r| **r == printed).or_else(|| roots.normalized().next()).cloned();
    let e = match &chosen {
        Some(ab) => Some(compute_e(model, &ab.alpha, &ab.beta, &sig).map_err(link_err)?),
        None => None,
    };
    checks.push(ColumnCheck {
        column: "alpha",
        expected: Some(row.alpha.value.clone()),
        computed: chosen.as_ref().map(|c| c.alpha.clone()),
    });
    checks.push(ColumnCheck {
        column: "beta",
        expected: Some(row.beta.value.clone()),
        computed: chosen.as_ref().map(|c| c.beta.clone()),
    });
    checks.push(ColumnCheck { column: "e", expected: Some(row.e.value.clone()), computed: e.clone() });

    // (H+^3, H+^2E+, H+E+^2, E+^3) after the flop against the mirrored model
    if let (Some(mirror), Some(ab), Some(e)) = (&mirror, &chosen, &e) {
        let e_plus = e_plus_class(model, &ab.alpha, &ab.beta);
        let h_plus = (&model.anticanonical() + &e_plus.scale(mirror.q())).scale(&mirror.p().recip());
        let flop = |x: &DivisorClass, y: &DivisorClass, z: &DivisorClass| flopped_triple(model, x, y, z, e);
        checks.extend([
            ColumnCheck {
                column: "h+^3",
                expected: Some(mirror.h3().clone()),
                computed: Some(flop(&h_plus, &h_plus, &h_plus)),
            },
            ColumnCheck {
                column: "h+^2e+",
                expected: Some(mirror.h2e().clone()),
                computed: Some(flop(&h_plus, &h_plus, &e_plus)),
            },
            ColumnCheck {
                column: "h+e+^2",
                expected: Some(mirror.he2().clone()),
                computed: Some(flop(&h_plus, &e_plus, &e_plus)),
            },
            ColumnCheck {
                column: "e+^3",
                expected: Some(mirror.e3().clone()),
                computed: Some(flop(&e_plus, &e_plus, &e_plus)),
            },
        ]);
    }

    Ok(LinkVerification { checks, roots, chosen })
}

/// `verify_link` on the row's own host model.
pub fn verify_row(row: &TableRow) -> Result<LinkVerification, VerifyError> {
    let model = row_host_model(row)?;
    verify_link(&model, row)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn e1(r: u32, d: u32, g: u32, ky3: i64) -> HostModel {
        make_host_model(HostKind::E1 { r, d, g }, &int(ky3)).unwrap()
    }

    fn sig(kind: CompletionKind) -> TargetSignature {
        target_signature(kind).unwrap()
    }

    #[test]
    fn signatures() {
        let s = sig(CompletionKind::E1 { r: 1, d: 4, g: 1 });
        assert_eq!((s.s1, s.s2, s.s3), (int(4), int(0), int(-4)));
        let s = sig(CompletionKind::E2);
        assert_eq!((s.s1, s.s2, s.s3), (int(4), int(-2), int(1)));
        assert!(target_signature(CompletionKind::E1 { r: 7, d: 1, g: 0 }).is_err());
    }

    #[test]
    fn signature_mirrors_host_degrees() {
        // any H^3 works: the pairings with -K do not involve it
        for (r, d, g, ky3) in [(1, 4, 1, 10), (2, 7, 3, 32), (3, 9, 2, 54), (4, 5, 0, 64)] {
            let m = e1(r, d, g, ky3);
            let deg = m.canonical_degrees();
            let s = sig(CompletionKind::E1 { r, d, g });
            assert_eq!((&s.s1, &s.s2, &s.s3), (&deg.kke, &deg.kee, m.e3()));
        }
        let m = make_host_model(HostKind::E2, &int(22)).unwrap();
        let deg = m.canonical_degrees();
        assert_eq!((deg.kke, deg.kee), (int(4), int(-2)));
    }

    #[test]
    fn gamma_values() {
        let m = e1(2, 10, 6, 32);
        assert_eq!(gamma_coefficient(&m, &m.anticanonical()), int(0));
        assert_eq!(gamma_coefficient(&m, &DivisorClass::from_ints(5, -3)), int(-1));
        let m = make_host_model(HostKind::E2, &int(10)).unwrap();
        assert_eq!(gamma_coefficient(&m, &DivisorClass::from_ints(4, -9)), int(-1));
    }

    #[test]
    fn flop_correction_on_row_10() {
        let m = e1(1, 4, 1, 10);
        let e = int(56);
        let ep = DivisorClass::from_ints(4, -5);
        let hp = DivisorClass::from_ints(5, -6);
        assert_eq!(m.cube(&ep), int(-60));
        assert_eq!(flopped_triple(&m, &ep, &ep, &ep, &e), int(-4));
        assert_eq!(flopped_triple(&m, &hp, &hp, &ep, &e), int(0));
        assert_eq!(flopped_triple(&m, &hp, &ep, &ep, &e), int(-4));
        assert_eq!(flopped_triple(&m, &hp, &hp, &hp, &e), int(10));
        let k = m.anticanonical();
        assert_eq!(flopped_triple(&m, &k, &k, &k, &int(999)), int(2));
    }

    #[test]
    fn alpha_beta_examples() {
        let deg = CanonicalDegrees { k3: int(2), kke: int(4), kee: int(0) };
        let roots = solve_alpha_beta(&deg, &sig(CompletionKind::E1 { r: 1, d: 4, g: 1 })).unwrap();
        let betas: Vec<_> = roots.roots.iter().map(|r| r.beta.clone()).collect();
        assert_eq!(betas, vec![int(-1), int(1)]);
        let norm: Vec<_> = roots.normalized().cloned().collect();
        assert_eq!(norm, vec![AlphaBeta::new(int(4), int(-1))]);
        // identity root E+ = E
        assert!(roots.discarded().any(|r| *r == AlphaBeta::new(int(0), int(1))));

        let deg = e1(2, 3, 0, 24).canonical_degrees();
        assert_eq!(deg, CanonicalDegrees { k3: int(10), kke: int(8), kee: int(-2) });
        let roots = solve_alpha_beta(&deg, &sig(CompletionKind::E5)).unwrap();
        let norm: Vec<_> = roots.normalized().cloned().collect();
        assert_eq!(norm, vec![AlphaBeta::new(ratio(1, 2), ratio(-1, 2))]);
    }

    #[test]
    fn identity_root_always_present() {
        let m = e1(3, 9, 4, 54);
        let deg = m.canonical_degrees();
        let s = TargetSignature { s1: deg.kke.clone(), s2: deg.kee.clone(), s3: int(0), kind: CompletionKind::E2 };
        let roots = solve_alpha_beta(&deg, &s).unwrap();
        assert!(roots.roots.contains(&AlphaBeta::new(int(0), int(1))));
    }

    #[test]
    fn degenerate_systems() {
        // k3*kee = kke^2 with matching right-hand side
        let deg = CanonicalDegrees { k3: int(1), kke: int(1), kee: int(1) };
        let s = TargetSignature { s1: int(1), s2: int(1), s3: int(0), kind: CompletionKind::E2 };
        assert_eq!(solve_alpha_beta(&deg, &s), Err(LinkError::Underdetermined));
        let s = TargetSignature { s1: int(1), s2: int(2), s3: int(0), kind: CompletionKind::E2 };
        assert!(solve_alpha_beta(&deg, &s).unwrap().roots.is_empty());
        let deg = CanonicalDegrees { k3: int(0), kke: int(1), kee: int(1) };
        assert!(matches!(solve_alpha_beta(&deg, &s), Err(LinkError::NonPositiveDegree(_))));
        // irrational beta
        let deg = CanonicalDegrees { k3: int(2), kke: int(4), kee: int(0) };
        let s = TargetSignature { s1: int(4), s2: int(1), s3: int(0), kind: CompletionKind::E2 };
        assert!(solve_alpha_beta(&deg, &s).unwrap().roots.is_empty());
    }

    #[test]
    fn e_examples() {
        let m = e1(1, 2, 0, 8);
        assert_eq!(compute_e(&m, &int(4), &int(-1), &sig(CompletionKind::E1 { r: 1, d: 2, g: 0 })), Ok(int(88)));
        let m = e1(2, 5, 1, 24);
        assert_eq!(
            compute_e(&m, &ratio(5, 2), &ratio(-1, 2), &sig(CompletionKind::E1 { r: 1, d: 5, g: 1 })),
            Ok(int(25))
        );
        let m = make_host_model(HostKind::E2, &int(10)).unwrap();
        assert_eq!(compute_e(&m, &int(4), &int(-1), &sig(CompletionKind::E2)), Ok(int(90)));
        // beta = 0 means E+ is a multiple of -K
        assert_eq!(compute_e(&m, &int(4), &int(0), &sig(CompletionKind::E2)), Err(LinkError::DegenerateFlop));
    }

    fn has(cands: &[LinkCandidate], kind: CompletionKind, a: Rational, b: Rational, e: i64) -> bool {
        cands.iter().any(|c| c.completion == kind && c.alpha == a && c.beta == b && c.e == int(e))
    }

    #[test]
    fn enumeration_finds_printed_completions() {
        let b = SearchBounds::default();
        let c = enumerate_completions(&e1(1, 4, 1, 10), &b);
        assert!(has(&c, CompletionKind::E1 { r: 1, d: 4, g: 1 }, int(4), int(-1), 56));
        let c = enumerate_completions(&e1(2, 4, 0, 24), &b);
        assert!(has(&c, CompletionKind::E2, ratio(3, 2), ratio(-1, 2), 16));
        let cand = c.iter().find(|c| c.completion == CompletionKind::E2).unwrap();
        assert_eq!(cand.minus_ky_plus3, int(14));
        let c = enumerate_completions(&e1(4, 5, 0, 64), &b);
        assert_eq!(c.len(), 1);
        assert!(has(&c, CompletionKind::E1 { r: 4, d: 5, g: 0 }, int(2), int(-1), 1));
    }

    #[test]
    fn enumeration_is_sorted() {
        let c = enumerate_completions(&e1(1, 2, 0, 8), &SearchBounds::default());
        let keys: Vec<_> = c.iter().map(|c| c.completion).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn lattice_filter_rejects_fractional_h_plus() {
        // E1(2,1,0) solves the pairings for the conic-on-V8 host, but H+ = (5/2, -3)
        let m = e1(1, 2, 0, 8);
        let ab = AlphaBeta::new(int(4), int(-1));
        assert!(!lattice_compatible(&m, CompletionKind::E1 { r: 2, d: 1, g: 0 }, &ab));
        assert!(lattice_compatible(&m, CompletionKind::E1 { r: 1, d: 2, g: 0 }, &ab));
    }
}
