//! Descent via the 2-isogenies phi, phi-hat on E: y^2 = x^3 + ax.
//!
//! The phi-Selmer group of E (resp. phi-hat-Selmer group of the dual curve
//! E': y^2 = x^3 - 4ax) is cut out of the field Selmer group Q(S,2) by local
//! solvability of the torsor d y^2 = d^2 + e x^4 (e = -4a on the phi side,
//! e = 16a on the phi-hat side) at every place of the bad set S. The reports
//! retain every local certificate, and dim_F2 Sha(E/Q)[2] is bounded by
//! e + f - dim E'(Q)[phi-hat]/phi(E(Q)[2]) - dim E(Q)/2E(Q), rounded down to
//! an even integer when finiteness of Sha is assumed.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, is_perfect_square, ArithError, SquareClass};
use crate::localfield::{
    torsor_solvable, LocalError, Place, QuarticTorsor, SolvabilityCertificate, Verdict,
};

#[derive(Debug, Error, Clone)]
pub enum DescentError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Local(#[from] LocalError),
    #[error(
        "local solvability undecided for d = {d} at {place} (depth {depth}); raise the depth cap"
    )]
    Undecided { d: i64, place: String, depth: u32 },
    #[error("internal consistency violation: Selmer members do not form a subgroup ({0})")]
    SubgroupViolation(String),
}

/// The curve y^2 = x^3 + ax with its 2-isogeny structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonicIsogenyCurve {
    a: i64,
}

impl MonicIsogenyCurve {
    pub fn new(a: i64) -> Result<Self, ArithError> {
        if a == 0 {
            return Err(ArithError::ZeroInput);
        }
        Ok(MonicIsogenyCurve { a })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    /// Coefficient of the 2-isogenous curve E': y^2 = x^3 - 4ax.
    pub fn dual_coefficient(&self) -> i64 {
        -4 * self.a
    }

    pub fn discriminant(&self) -> i128 {
        -64 * (self.a as i128).pow(3)
    }

    /// E(Q)[2] is full iff x^2 + a splits over Q, i.e. -a is a square.
    pub fn has_full_rational_two_torsion(&self) -> bool {
        is_perfect_square(-self.a)
    }

    /// dim_F2 E(Q)[2]: the point (0,0) is always rational.
    pub fn two_torsion_dim(&self) -> u32 {
        1 + u32::from(self.has_full_rational_two_torsion())
    }
}

/// Which side of the isogeny pair a Selmer computation runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IsogenySide {
    Phi,
    PhiHat,
}

impl IsogenySide {
    /// Torsor coefficient e in d y^2 = d^2 + e x^4.
    pub fn torsor_coefficient(&self, curve: &MonicIsogenyCurve) -> i64 {
        match self {
            IsogenySide::Phi => -4 * curve.a,
            IsogenySide::PhiHat => 16 * curve.a,
        }
    }
}

impl std::fmt::Display for IsogenySide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            IsogenySide::Phi => write!(f, "phi"),
            IsogenySide::PhiHat => write!(f, "phi_hat"),
        }
    }
}

/// Finite set of places containing the real place and 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceSet {
    places: BTreeSet<Place>,
}

impl PlaceSet {
    pub fn places(&self) -> impl Iterator<Item = &Place> {
        self.places.iter()
    }

    pub fn finite_primes(&self) -> Vec<u64> {
        self.places.iter().filter_map(|p| p.prime()).collect()
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always holds the real place and 2
    }

    pub fn contains(&self, v: &Place) -> bool {
        self.places.contains(v)
    }

    pub fn insert_prime(&mut self, p: u64) -> Result<(), LocalError> {
        self.places.insert(Place::finite(p)?);
        Ok(())
    }
}

/// Bad set of y^2 = x^3 + ax: the real place, 2, and the odd primes dividing a.
pub fn bad_set(curve: &MonicIsogenyCurve) -> PlaceSet {
    let mut places = BTreeSet::new();
    places.insert(Place::real());
    places.insert(Place::Finite(2));
    for p in arith::odd_prime_divisors(curve.a).expect("a is nonzero") {
        places.insert(Place::Finite(p));
    }
    PlaceSet { places }
}

/// The field Selmer group Q(S,2): classes with even valuation outside S,
/// generated by -1 and the finite primes of S.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSelmerGroup {
    pub generators: Vec<SquareClass>,
    pub elements: Vec<SquareClass>,
}

pub fn field_selmer(s: &PlaceSet) -> FieldSelmerGroup {
    let mut generators = vec![SquareClass::new(-1).expect("nonzero")];
    for p in s.finite_primes() {
        generators.push(SquareClass::new(p as i64).expect("prime"));
    }
    let mut elements = vec![SquareClass::ONE];
    for g in &generators {
        let snapshot = elements.clone();
        for x in snapshot {
            elements.push(x.mul(g).expect("small product"));
        }
    }
    elements.sort();
    FieldSelmerGroup {
        generators,
        elements,
    }
}

impl FieldSelmerGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// One retained local certificate, keyed by the class and the place.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub d: i64,
    pub place: Place,
    pub certificate: SolvabilityCertificate,
}

/// A computed phi- or phi-hat-Selmer group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelmerReport {
    pub side: IsogenySide,
    pub curve_a: i64,
    pub torsor_e: i64,
    pub ambient: FieldSelmerGroup,
    pub members: Vec<SquareClass>,
    pub dimension: u32,
    pub certificates: Vec<CertificateEntry>,
}

impl SelmerReport {
    pub fn contains(&self, d: i64) -> bool {
        self.members.iter().any(|m| m.rep() == d)
    }

    pub fn certificate(&self, d: i64, place: &Place) -> Option<&SolvabilityCertificate> {
        self.certificates
            .iter()
            .find(|c| c.d == d && c.place == *place)
            .map(|c| &c.certificate)
    }
}

struct ClassScan {
    class: SquareClass,
    certificates: Vec<CertificateEntry>,
    member: bool,
    undecided: Option<(Place, u32)>,
}

fn solve_with_retry(t: &QuarticTorsor, v: &Place, depth_cap: u32) -> SolvabilityCertificate {
    let mut cert = torsor_solvable(t, v, depth_cap);
    for factor in [2u32, 4] {
        if cert.verdict != Verdict::Undecided {
            break;
        }
        cert = torsor_solvable(t, v, depth_cap.saturating_mul(factor));
    }
    cert
}

/// Compute the Selmer group on one side of the isogeny pair.
///
/// Membership of d in Q(S,2) requires local solvability of the torsor
/// (d, e_side) at every v in S. Per-class work is independent and runs on the
/// rayon pool; assembly is a deterministic reduction in canonical (d, place)
/// order, so reports are bit-identical across thread counts.
pub fn phi_selmer(
    curve: &MonicIsogenyCurve,
    side: IsogenySide,
    depth_cap: u32,
) -> Result<SelmerReport, DescentError> {
    phi_selmer_extended(curve, side, &[], depth_cap)
}

/// Same as [`phi_selmer`] with extra finite primes added to the bad set
/// (adding a good odd prime never changes the members).
pub fn phi_selmer_extended(
    curve: &MonicIsogenyCurve,
    side: IsogenySide,
    extra_primes: &[u64],
    depth_cap: u32,
) -> Result<SelmerReport, DescentError> {
    let mut s = bad_set(curve);
    for &p in extra_primes {
        s.insert_prime(p)?;
    }
    let ambient = field_selmer(&s);
    let e = side.torsor_coefficient(curve);
    let places: Vec<Place> = s.places().copied().collect();

    let per_class: Vec<ClassScan> = ambient
        .elements
        .par_iter()
        .map(|&d| {
            let torsor = QuarticTorsor::new(d, e).expect("e nonzero");
            let mut scan = ClassScan {
                class: d,
                certificates: Vec::new(),
                member: true,
                undecided: None,
            };
            for v in &places {
                let cert = solve_with_retry(&torsor, v, depth_cap);
                match cert.verdict {
                    Verdict::Solvable => {}
                    Verdict::Unsolvable => scan.member = false,
                    Verdict::Undecided => {
                        scan.member = false;
                        if scan.undecided.is_none() {
                            scan.undecided = Some((*v, cert.depth_used));
                        }
                    }
                }
                scan.certificates.push(CertificateEntry {
                    d: d.rep(),
                    place: *v,
                    certificate: cert,
                });
            }
            scan
        })
        .collect();

    let mut members = Vec::new();
    let mut certificates = Vec::new();
    for scan in per_class {
        if let Some((place, depth)) = scan.undecided {
            return Err(DescentError::Undecided {
                d: scan.class.rep(),
                place: place.to_string(),
                depth,
            });
        }
        if scan.member {
            members.push(scan.class);
        }
        certificates.extend(scan.certificates);
    }
    members.sort();

    if !members.contains(&SquareClass::ONE) {
        return Err(DescentError::SubgroupViolation(
            "the trivial class is missing".into(),
        ));
    }
    if !members.len().is_power_of_two() {
        return Err(DescentError::SubgroupViolation(format!(
            "member count {} is not a power of two",
            members.len()
        )));
    }
    for x in &members {
        for y in &members {
            let xy = x.mul(y)?;
            if !members.contains(&xy) {
                return Err(DescentError::SubgroupViolation(format!(
                    "{} * {} = {} escapes the member set",
                    x, y, xy
                )));
            }
        }
    }

    Ok(SelmerReport {
        side,
        curve_a: curve.a,
        torsor_e: e,
        ambient,
        members: members.clone(),
        dimension: members.len().trailing_zeros(),
        certificates,
    })
}

/// dim_F2 of E'(Q)[phi-hat] / phi(E(Q)[2]): 1 unless -a is a rational square
/// (full 2-torsion maps onto the kernel; then the quotient is trivial).
pub fn kernel_quotient_dim(curve: &MonicIsogenyCurve) -> u32 {
    if curve.has_full_rational_two_torsion() {
        0
    } else {
        1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundAssumptions {
    pub finiteness_assumed: bool,
    pub rank_provided: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundComponents {
    pub selmer_phi_dim: u32,
    pub selmer_phi_hat_dim: u32,
    pub kernel_quotient_dim: u32,
    pub weak_mordell_weil_lower: u32,
}

/// Upper bound on dim_F2 Sha(E/Q)[2] with its assumption ledger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sha2Bound {
    pub upper_dim_raw: u32,
    /// Raw bound rounded down to an even integer; present only when
    /// finiteness of Sha is assumed (the pairing argument needs it).
    pub upper_dim_parity: Option<u32>,
    pub assumptions: BoundAssumptions,
    pub components: BoundComponents,
}

impl Sha2Bound {
    /// The best bound available under the recorded assumptions.
    pub fn effective_dim(&self) -> u32 {
        self.upper_dim_parity.unwrap_or(self.upper_dim_raw)
    }

    pub fn order_bound(&self) -> u64 {
        1u64 << self.effective_dim()
    }
}

/// dim Sha(E/Q)[2] <= e + f - dim kernel quotient - dim E(Q)/2E(Q), floored
/// at zero. dim E(Q)/2E(Q) = rank + dim E(Q)[2] when the rank is supplied;
/// without it the torsion part alone keeps the bound unconditional.
pub fn sha2_upper_bound(
    curve: &MonicIsogenyCurve,
    e_dim: u32,
    f_dim: u32,
    rank: Option<u32>,
    assume_finite: bool,
) -> Sha2Bound {
    let kernel = kernel_quotient_dim(curve);
    let wmw = rank.unwrap_or(0) + curve.two_torsion_dim();
    let raw = (e_dim + f_dim).saturating_sub(kernel + wmw);
    Sha2Bound {
        upper_dim_raw: raw,
        upper_dim_parity: assume_finite.then_some(raw - raw % 2),
        assumptions: BoundAssumptions {
            finiteness_assumed: assume_finite,
            rank_provided: rank,
        },
        components: BoundComponents {
            selmer_phi_dim: e_dim,
            selmer_phi_hat_dim: f_dim,
            kernel_quotient_dim: kernel,
            weak_mordell_weil_lower: wmw,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(a: i64) -> MonicIsogenyCurve {
        MonicIsogenyCurve::new(a).unwrap()
    }

    #[test]
    fn bad_set_examples() {
        let primes = |a: i64| bad_set(&curve(a)).finite_primes();
        assert_eq!(primes(17), vec![2, 17]);
        assert_eq!(primes(45), vec![2, 3, 5]); // twist p = 5 by D = -3
        assert_eq!(primes(1), vec![2]);
        assert!(bad_set(&curve(17)).contains(&Place::real()));
    }

    #[test]
    fn field_selmer_counts_and_elements() {
        let s = bad_set(&curve(45)); // {inf, 2, 3, 5}
        let g = field_selmer(&s);
        assert_eq!(g.order(), 16);
        let reps: Vec<i64> = g.elements.iter().map(|c| c.rep()).collect();
        for want in [1, -1, 2, -2, 3, -3, 5, -5, 6, -6, 10, -10, 15, -15, 30, -30] {
            assert!(reps.contains(&want), "missing {}", want);
        }
        assert_eq!(field_selmer(&bad_set(&curve(17))).order(), 8);
        assert_eq!(field_selmer(&bad_set(&curve(1))).order(), 4);
    }

    #[test]
    fn kernel_quotient_examples() {
        assert_eq!(kernel_quotient_dim(&curve(17)), 1);
        assert_eq!(kernel_quotient_dim(&curve(-1)), 0); // -a = 1 is a square
        assert_eq!(kernel_quotient_dim(&curve(45)), 1);
        assert_eq!(kernel_quotient_dim(&curve(-4)), 0);
    }

    #[test]
    fn torsor_coefficients_per_side() {
        let c = curve(45);
        assert_eq!(IsogenySide::Phi.torsor_coefficient(&c), -180);
        assert_eq!(IsogenySide::PhiHat.torsor_coefficient(&c), 720);
        assert_eq!(c.dual_coefficient(), -180);
        assert_eq!(curve(17).discriminant(), -64 * 17i128.pow(3));
    }

    #[test]
    fn sha2_bound_examples() {
        // e = 2, f = 1, rank 0, finiteness: raw 1, parity 0
        let b = sha2_upper_bound(&curve(45), 2, 1, Some(0), true);
        assert_eq!(b.upper_dim_raw, 1);
        assert_eq!(b.upper_dim_parity, Some(0));
        // e = 3, f = 2, rank absent, kernel 1, torsion 1: raw 3, parity 2
        let b = sha2_upper_bound(&curve(17), 3, 2, None, true);
        assert_eq!(b.upper_dim_raw, 3);
        assert_eq!(b.upper_dim_parity, Some(2));
        assert_eq!(b.order_bound(), 4);
        // floor at zero
        let b = sha2_upper_bound(&curve(45), 1, 0, Some(0), true);
        assert_eq!(b.upper_dim_raw, 0);
        assert_eq!(b.upper_dim_parity, Some(0));
        // no parity adjustment without the finiteness flag
        let b = sha2_upper_bound(&curve(45), 2, 1, Some(0), false);
        assert_eq!(b.upper_dim_parity, None);
        assert_eq!(b.effective_dim(), 1);
    }

    #[test]
    fn sha2_bound_monotone_and_parity_invariants() {
        let c = curve(17);
        for e in 0..5u32 {
            for f in 0..5u32 {
                for rank in 0..4u32 {
                    let b = sha2_upper_bound(&c, e, f, Some(rank), true);
                    let b_next = sha2_upper_bound(&c, e, f, Some(rank + 1), true);
                    assert!(b_next.upper_dim_raw <= b.upper_dim_raw);
                    let parity = b.upper_dim_parity.unwrap();
                    assert_eq!(parity % 2, 0);
                    assert!(parity <= b.upper_dim_raw);
                }
            }
        }
    }
}
