//! Quadratic twists of y^2 = x^3 + px: condition gates for Sha[2]-vanishing
//! twists, twist-parameter searches, genus theory for imaginary quadratic
//! fields, and the imaginary-quadratic #K(S,2) = 8 pipeline with its 2-adic
//! exclusion certificate over the unramified quadratic extension.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, jacobi, ArithError, SquareClass};
use crate::descent::{self, DescentError, IsogenySide, MonicIsogenyCurve, SelmerReport, Sha2Bound};
use crate::localfield::{
    torsor_solvable_unramified_2ext, LocalError, QuarticTorsor, SolvabilityCertificate, Verdict,
    DEFAULT_REVALIDATION_BUDGET,
};

#[derive(Debug, Error, Clone)]
pub enum TwistError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Local(#[from] LocalError),
    #[error(transparent)]
    Descent(#[from] DescentError),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("twist conditions failed for p = {p}, D = {d_twist} ({variant})")]
    ConditionsFailed {
        p: u64,
        d_twist: i64,
        variant: TwistVariant,
    },
    #[error("search bound {0} exhausted")]
    SearchExhausted(u64),
    #[error("descent contradicts the expected bound: {0}")]
    BoundAssertionFailed(String),
    #[error("genus theory covers imaginary quadratic fields only; got D = {0}")]
    PositiveTwist(i64),
    #[error("2-adic certificate undecided at depth {0}; raise the depth cap")]
    UndecidedCertificate(u32),
    #[error("certificate failed revalidation: {0}")]
    RevalidationFailed(String),
    #[error(
        "an order-4 element of Sha(E/Q) forbids a vanishing Sha(E/K)[2]; inputs are inconsistent"
    )]
    InconsistentOrderFourFlag,
    #[error("unknown twist variant '{0}'")]
    UnknownVariant(String),
}

/// The three condition gates on a twist parameter D = -l.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TwistVariant {
    /// p = 1 mod 4, D = 1 mod 4, p inert in Q(sqrt D): forces Sha(E_D/Q)[2] = 0.
    #[serde(rename = "vanish-1mod4")]
    Vanish1Mod4,
    /// p = 3 mod 4, D = 3 mod 4, p split in Q(sqrt D): forces Sha(E_D/Q)[2] = 0.
    #[serde(rename = "vanish-3mod4")]
    Vanish3Mod4,
    /// D = 5 mod 8, p not split: the imaginary-quadratic #K(S,2) = 8 pipeline.
    #[serde(rename = "imquad")]
    Imquad,
}

impl TwistVariant {
    /// The vanishing gate matching the congruence class of p.
    pub fn vanishing_for(p: u64) -> Result<TwistVariant, TwistError> {
        if p < 3 || !arith::is_prime(p) {
            return Err(TwistError::NotOddPrime(p));
        }
        Ok(if p % 4 == 1 {
            TwistVariant::Vanish1Mod4
        } else {
            TwistVariant::Vanish3Mod4
        })
    }
}

impl std::fmt::Display for TwistVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TwistVariant::Vanish1Mod4 => "vanish-1mod4",
            TwistVariant::Vanish3Mod4 => "vanish-3mod4",
            TwistVariant::Imquad => "imquad",
        };
        write!(f, "{}", s)
    }
}

impl std::str::FromStr for TwistVariant {
    type Err = TwistError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "vanish-1mod4" => Ok(TwistVariant::Vanish1Mod4),
            "vanish-3mod4" => Ok(TwistVariant::Vanish3Mod4),
            "imquad" => Ok(TwistVariant::Imquad),
            other => Err(TwistError::UnknownVariant(other.to_string())),
        }
    }
}

/// A squarefree twist parameter; `l` is |D| when |D| is prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistParameter {
    pub d_twist: i64,
    pub l: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Full evaluation record of a condition gate; every Legendre symbol used is
/// written down.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionTrace {
    pub variant: TwistVariant,
    pub p: u64,
    pub d_twist: i64,
    pub checks: Vec<ConditionCheck>,
}

impl ConditionTrace {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Twisting y^2 = x^3 + ax by D gives y^2 = x^3 + a D^2 x.
pub fn twist_coefficient(a: i64, d_twist: i64) -> Result<i64, TwistError> {
    let f = arith::factor(d_twist)?;
    if !f.is_squarefree() {
        return Err(TwistError::Arith(ArithError::NotSquarefree(d_twist)));
    }
    let out = (a as i128) * (d_twist as i128) * (d_twist as i128);
    i64::try_from(out).map_err(|_| TwistError::Arith(ArithError::Overflow(a, d_twist)))
}

/// Evaluate a condition gate. Failures are recorded in the trace, not thrown.
pub fn check_conditions(
    p: u64,
    d_twist: i64,
    variant: TwistVariant,
) -> Result<ConditionTrace, TwistError> {
    if p < 3 || !arith::is_prime(p) {
        return Err(TwistError::NotOddPrime(p));
    }
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, detail: String| {
        checks.push(ConditionCheck {
            name: name.to_string(),
            passed,
            detail,
        });
    };

    let l = d_twist.unsigned_abs();
    push("twist_negative", d_twist < 0, format!("D = {}", d_twist));
    push(
        "abs_twist_prime",
        arith::is_prime(l),
        format!("|D| = {}", l),
    );
    push(
        "twist_differs_from_p",
        l != p,
        format!("|D| = {}, p = {}", l, p),
    );

    // splitting of p in Q(sqrt D) is read off the Legendre symbol (D/p)
    let symbol = jacobi(d_twist, p as i64)?;
    match variant {
        TwistVariant::Vanish1Mod4 => {
            push(
                "p_is_1_mod_4",
                p % 4 == 1,
                format!("p = {} = {} mod 4", p, p % 4),
            );
            push(
                "twist_is_1_mod_4",
                d_twist.rem_euclid(4) == 1,
                format!("D = {} = {} mod 4", d_twist, d_twist.rem_euclid(4)),
            );
            push(
                "p_not_split",
                symbol == -1,
                format!("(D/p) = ({}/{}) = {}", d_twist, p, symbol),
            );
        }
        TwistVariant::Vanish3Mod4 => {
            push(
                "p_is_3_mod_4",
                p % 4 == 3,
                format!("p = {} = {} mod 4", p, p % 4),
            );
            push(
                "twist_is_3_mod_4",
                d_twist.rem_euclid(4) == 3,
                format!("D = {} = {} mod 4", d_twist, d_twist.rem_euclid(4)),
            );
            push(
                "p_split",
                symbol == 1,
                format!("(D/p) = ({}/{}) = {}", d_twist, p, symbol),
            );
        }
        TwistVariant::Imquad => {
            push(
                "twist_is_5_mod_8",
                d_twist.rem_euclid(8) == 5,
                format!("D = {} = {} mod 8", d_twist, d_twist.rem_euclid(8)),
            );
            push(
                "p_not_split",
                symbol != 1,
                format!("(D/p) = ({}/{}) = {}", d_twist, p, symbol),
            );
        }
    }
    Ok(ConditionTrace {
        variant,
        p,
        d_twist,
        checks,
    })
}

/// First `count` twist parameters D = -l with l prime ascending that pass
/// the gate, scanning l <= bound.
pub fn search_twists(
    p: u64,
    variant: TwistVariant,
    count: usize,
    bound: u64,
) -> Result<Vec<TwistParameter>, TwistError> {
    let mut found = Vec::new();
    if count == 0 {
        return Ok(found);
    }
    let mut l = 3u64;
    while l <= bound {
        if arith::is_prime(l) && l != p {
            let trace = check_conditions(p, -(l as i64), variant)?;
            if trace.passed() {
                found.push(TwistParameter {
                    d_twist: -(l as i64),
                    l: Some(l),
                });
                if found.len() == count {
                    return Ok(found);
                }
            }
        }
        l += 2;
    }
    Err(TwistError::SearchExhausted(bound))
}

/// Result of running the full descent on a gate-passing twist.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VanishingReport {
    pub trace: ConditionTrace,
    pub twisted_coefficient: i64,
    pub phi: SelmerReport,
    pub phi_hat: SelmerReport,
    pub bound: Sha2Bound,
}

/// Run descent on the twisted curve y^2 = x^3 + p D^2 x and confirm the
/// gate's promise: dim Sel^phi <= 2, dim Sel^phi-hat <= 1, and the
/// parity-adjusted Sha[2] bound is 0. A violation is surfaced loudly since it
/// would falsify the pipeline.
pub fn verify_twist_vanishing(
    p: u64,
    d_twist: i64,
    rank: Option<u32>,
    depth_cap: u32,
) -> Result<VanishingReport, TwistError> {
    let variant = TwistVariant::vanishing_for(p)?;
    let trace = check_conditions(p, d_twist, variant)?;
    if !trace.passed() {
        return Err(TwistError::ConditionsFailed {
            p,
            d_twist,
            variant,
        });
    }
    let a = twist_coefficient(p as i64, d_twist)?;
    let curve = MonicIsogenyCurve::new(a)?;
    let phi = descent::phi_selmer(&curve, IsogenySide::Phi, depth_cap)?;
    let phi_hat = descent::phi_selmer(&curve, IsogenySide::PhiHat, depth_cap)?;
    let bound = descent::sha2_upper_bound(&curve, phi.dimension, phi_hat.dimension, rank, true);
    if phi.dimension > 2 {
        return Err(TwistError::BoundAssertionFailed(format!(
            "dim Sel^phi = {} > 2 for p = {}, D = {}",
            phi.dimension, p, d_twist
        )));
    }
    if phi_hat.dimension > 1 {
        return Err(TwistError::BoundAssertionFailed(format!(
            "dim Sel^phi_hat = {} > 1 for p = {}, D = {}",
            phi_hat.dimension, p, d_twist
        )));
    }
    if bound.upper_dim_parity != Some(0) {
        return Err(TwistError::BoundAssertionFailed(format!(
            "parity-adjusted bound {:?} is not 0 for p = {}, D = {}",
            bound.upper_dim_parity, p, d_twist
        )));
    }
    Ok(VanishingReport {
        trace,
        twisted_coefficient: a,
        phi,
        phi_hat,
        bound,
    })
}

/// #Cl_K[2] = 2^(r-1) for the imaginary quadratic field of squarefree D < 0,
/// where r counts the distinct primes of the field discriminant.
pub fn genus_two_torsion(d_twist: i64) -> Result<u64, TwistError> {
    if d_twist >= 0 {
        return Err(TwistError::PositiveTwist(d_twist));
    }
    let disc = arith::fundamental_discriminant(d_twist)?;
    let r = arith::factor(disc)?.omega() as u32;
    Ok(1u64 << (r - 1))
}

/// The closed-form order count of K(S,2) under the imaginary-quadratic gate:
/// S holds one place over 2, one over p and the infinite place; the S-units
/// contribute 2^#S through Dirichlet's theorem with mu(K) = {+-1}; genus
/// theory kills the 2-part of the class group since |D| is prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImQuadSelmerOrderReport {
    pub p: u64,
    pub d_twist: i64,
    pub place_count: u32,
    pub unit_square_dim: u32,
    pub class_2_dim: u32,
    pub total_order: u64,
}

pub fn imquad_field_selmer_order(
    p: u64,
    d_twist: i64,
) -> Result<ImQuadSelmerOrderReport, TwistError> {
    let trace = check_conditions(p, d_twist, TwistVariant::Imquad)?;
    if !trace.passed() {
        return Err(TwistError::ConditionsFailed {
            p,
            d_twist,
            variant: TwistVariant::Imquad,
        });
    }
    let unit_square_dim = 3u32; // Dirichlet rank #S - 1 = 2, plus {+-1}
    let class_2_dim = 0u32; // prime |D|: odd class number by genus theory
    Ok(ImQuadSelmerOrderReport {
        p,
        d_twist,
        place_count: 3,
        unit_square_dim,
        class_2_dim,
        total_order: 1u64 << (unit_square_dim + class_2_dim),
    })
}

/// The imaginary-quadratic Sha bound: #K(S,2) = 8 caps both Selmer dimensions
/// at 3; the 2-adic exclusion of the class of 2 over the unramified quadratic
/// extension lowers the phi-hat side to 2; parity then gives dim <= 2, i.e.
/// #Sha(E/K)[2] <= 4.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImQuadShaReport {
    pub selmer_order: ImQuadSelmerOrderReport,
    pub two_adic_certificate: SolvabilityCertificate,
    pub certificate_revalidated: bool,
    pub phi_dim_bound: u32,
    pub phi_hat_dim_bound: u32,
    pub bound: Sha2Bound,
}

pub fn imquad_sha_bound(
    p: u64,
    d_twist: i64,
    depth_cap: u32,
) -> Result<ImQuadShaReport, TwistError> {
    let selmer_order = imquad_field_selmer_order(p, d_twist)?;
    let torsor = QuarticTorsor::new(SquareClass::new(2)?, p as i64)?;
    let cert = torsor_solvable_unramified_2ext(&torsor, d_twist, depth_cap)?;
    let b_bound = match cert.verdict {
        Verdict::Unsolvable => 2,
        Verdict::Solvable => 3,
        Verdict::Undecided => return Err(TwistError::UndecidedCertificate(cert.depth_used)),
    };
    cert.revalidate(DEFAULT_REVALIDATION_BUDGET)
        .map_err(TwistError::RevalidationFailed)?;
    let raw = 3 + b_bound - 1 - 1;
    let bound = Sha2Bound {
        upper_dim_raw: raw,
        upper_dim_parity: Some(raw - raw % 2),
        assumptions: descent::BoundAssumptions {
            finiteness_assumed: true,
            rank_provided: None,
        },
        components: descent::BoundComponents {
            selmer_phi_dim: 3,
            selmer_phi_hat_dim: b_bound,
            kernel_quotient_dim: 1,
            weak_mordell_weil_lower: 1,
        },
    };
    Ok(ImQuadShaReport {
        selmer_order,
        two_adic_certificate: cert,
        certificate_revalidated: true,
        phi_dim_bound: 3,
        phi_hat_dim_bound: b_bound,
        bound,
    })
}

/// Advisory attached when the user asserts (from external computation) that
/// Sha(E/Q) has an element of order 4: no quadratic field can then trivialize
/// Sha(E/K)[2], since the period 4 would have to divide the index 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionAdvisory {
    pub message: String,
}

pub fn order4_obstruction(
    asserted: bool,
    vanishing_bound: Option<&Sha2Bound>,
) -> Result<Option<ObstructionAdvisory>, TwistError> {
    if !asserted {
        return Ok(None);
    }
    if let Some(b) = vanishing_bound {
        if b.effective_dim() == 0 {
            return Err(TwistError::InconsistentOrderFourFlag);
        }
    }
    Ok(Some(ObstructionAdvisory {
        message: "Sha(E/Q) contains an element of order 4: Sha(E/K)[2] != 0 for every \
                  quadratic field K, so no vanishing report for this curve can be right"
            .to_string(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twist_coefficient_examples() {
        assert_eq!(twist_coefficient(5, -3).unwrap(), 45);
        assert_eq!(twist_coefficient(7, 1).unwrap(), 7);
        assert_eq!(twist_coefficient(17, -11).unwrap(), 2057);
        assert!(twist_coefficient(5, 12).is_err()); // 12 not squarefree
                                                    // identity twist is idempotent
        let a = twist_coefficient(5, -3).unwrap();
        assert_eq!(twist_coefficient(a, 1).unwrap(), a);
    }

    #[test]
    fn condition_gate_examples() {
        assert!(check_conditions(5, -3, TwistVariant::Vanish1Mod4)
            .unwrap()
            .passed());
        assert!(check_conditions(7, -5, TwistVariant::Vanish3Mod4)
            .unwrap()
            .passed());
        assert!(check_conditions(17, -11, TwistVariant::Imquad)
            .unwrap()
            .passed());
        // (-11/5) = (4/5) = +1: p splits, imquad gate rejects
        assert!(!check_conditions(5, -11, TwistVariant::Imquad)
            .unwrap()
            .passed());
        // wrong congruence class of p
        assert!(!check_conditions(7, -3, TwistVariant::Vanish1Mod4)
            .unwrap()
            .passed());
        // p itself must be an odd prime
        assert!(check_conditions(2, -3, TwistVariant::Imquad).is_err());
        assert!(check_conditions(9, -3, TwistVariant::Imquad).is_err());
    }

    #[test]
    fn condition_trace_records_symbols() {
        let t = check_conditions(5, -3, TwistVariant::Vanish1Mod4).unwrap();
        let split_check = t.checks.iter().find(|c| c.name == "p_not_split").unwrap();
        assert!(split_check.detail.contains("= -1"));
    }

    #[test]
    fn search_twists_examples() {
        let found = search_twists(5, TwistVariant::Vanish1Mod4, 1, 1000).unwrap();
        assert_eq!(found[0].d_twist, -3);
        assert_eq!(found[0].l, Some(3));
        assert!(search_twists(5, TwistVariant::Vanish1Mod4, 0, 1000)
            .unwrap()
            .is_empty());
        // ascending and all re-pass the gate
        let many = search_twists(13, TwistVariant::Vanish1Mod4, 5, 10_000).unwrap();
        for w in many.windows(2) {
            assert!(w[0].l.unwrap() < w[1].l.unwrap());
        }
        for t in &many {
            assert!(check_conditions(13, t.d_twist, TwistVariant::Vanish1Mod4)
                .unwrap()
                .passed());
        }
        // (-3/17) = -1 and -3 = 5 mod 8, so the first imquad twist for 17 is -3
        let found = search_twists(17, TwistVariant::Imquad, 2, 1000).unwrap();
        assert_eq!(found[0].d_twist, -3);
        assert_eq!(found[1].d_twist, -11);
        // exhaustion is an error
        assert!(matches!(
            search_twists(5, TwistVariant::Vanish1Mod4, 50, 20),
            Err(TwistError::SearchExhausted(20))
        ));
    }

    #[test]
    fn genus_two_torsion_examples() {
        assert_eq!(genus_two_torsion(-11).unwrap(), 1);
        assert_eq!(genus_two_torsion(-5).unwrap(), 2); // disc -20
        assert_eq!(genus_two_torsion(-30).unwrap(), 4); // disc -120
        assert!(genus_two_torsion(5).is_err());
        assert!(genus_two_torsion(-12).is_err());
    }

    #[test]
    fn imquad_order_report() {
        let r = imquad_field_selmer_order(17, -11).unwrap();
        assert_eq!(r.total_order, 8);
        assert_eq!(r.place_count, 3);
        assert_eq!(r.unit_square_dim, 3);
        assert_eq!(r.class_2_dim, 0);
        // gate rejection: (-11/5) = +1
        assert!(matches!(
            imquad_field_selmer_order(5, -11),
            Err(TwistError::ConditionsFailed { .. })
        ));
        // (-19/3): -19 = 5 mod 8 and 3 does not split
        let r = imquad_field_selmer_order(3, -19).unwrap();
        assert_eq!(r.total_order, 8);
    }

    #[test]
    fn order4_obstruction_cases() {
        assert!(order4_obstruction(false, None).unwrap().is_none());
        assert!(order4_obstruction(true, None).unwrap().is_some());
        let curve = MonicIsogenyCurve::new(45).unwrap();
        let vanishing = descent::sha2_upper_bound(&curve, 2, 1, Some(0), true);
        assert!(matches!(
            order4_obstruction(true, Some(&vanishing)),
            Err(TwistError::InconsistentOrderFourFlag)
        ));
        let nonzero = descent::sha2_upper_bound(&curve, 3, 2, Some(0), true);
        assert!(order4_obstruction(true, Some(&nonzero)).unwrap().is_some());
    }

    #[test]
    fn variant_round_trip() {
        for v in [
            TwistVariant::Vanish1Mod4,
            TwistVariant::Vanish3Mod4,
            TwistVariant::Imquad,
        ] {
            assert_eq!(v.to_string().parse::<TwistVariant>().unwrap(), v);
        }
        assert!("vanish-7mod8".parse::<TwistVariant>().is_err());
    }
}
