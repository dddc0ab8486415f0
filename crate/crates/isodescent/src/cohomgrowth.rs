//! Computable local/global cohomology growth machinery.
//!
//! At an odd prime v of good reduction that ramifies in Q(sqrt D)/Q, the
//! local cohomology of the Galois group of the completion acting on the
//! curve's points has order #E~(F_v)[2]; unramified good places contribute
//! trivially, and bad places are reported unknown and conservatively omitted
//! from every lower bound. The global cohomology is capped by
//! 2^rank(E_D) * #E(Q)[2], which turns the product of local orders into the
//! certified growth ratio g(D) and the Sha-growth lower bound. The
//! Tamagawa-ratio apparatus does the same for y^2 = x^3 + ax^2 + bx through
//! the local 2-torsion case table. All ratios are exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, is_perfect_square, jacobi, ArithError};
use crate::descent::MonicIsogenyCurve;
use crate::localfield::Place;

#[derive(Debug, Error, Clone)]
pub enum GrowthError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("place {0} is rejected here (need an odd prime of good reduction)")]
    BadPlace(String),
    #[error("curve y^2 = x^3 + {a}x^2 + {b}x is singular")]
    SingularCurve { a: i64, b: i64 },
    #[error("b/(a^2-4b) is a rational square; the 2-division fields coincide")]
    GateFailed,
    #[error("search bound {0} exhausted")]
    SearchExhausted(u64),
    #[error("strict mode needs an imaginary 2-division field Q(sqrt -a); got a = {0}")]
    StrictModeUnsupported(i64),
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
}

/// The curve y^2 = x^3 + a x^2 + b x with full 2-isogeny structure; its dual
/// is y^2 = x^3 - 2a x^2 + (a^2 - 4b) x. The 2-division fields are
/// Q(sqrt(a^2 - 4b)) and Q(sqrt b) respectively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneralCurve {
    a: i64,
    b: i64,
}

impl GeneralCurve {
    pub fn new(a: i64, b: i64) -> Result<Self, GrowthError> {
        let disc_factor = (a as i128) * (a as i128) - 4 * b as i128;
        if b == 0 || disc_factor == 0 {
            return Err(GrowthError::SingularCurve { a, b });
        }
        Ok(GeneralCurve { a, b })
    }

    pub fn from_monic(curve: &MonicIsogenyCurve) -> Self {
        GeneralCurve { a: 0, b: curve.a() }
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn quadratic_discriminant(&self) -> i128 {
        (self.a as i128) * (self.a as i128) - 4 * self.b as i128
    }

    pub fn discriminant(&self) -> i128 {
        16 * (self.b as i128) * (self.b as i128) * self.quadratic_discriminant()
    }

    pub fn is_good_odd_prime(&self, q: u64) -> bool {
        q != 2 && arith::is_prime(q) && self.discriminant() % q as i128 != 0
    }

    /// #E(Q)[2]: 4 iff the quadratic factor splits over Q.
    pub fn rational_two_torsion_order(&self) -> u32 {
        let disc = self.quadratic_discriminant();
        let split = i64::try_from(disc).map(is_perfect_square).unwrap_or(false);
        if split {
            4
        } else {
            2
        }
    }
}

/// #E~(F_v)[2] at an odd good prime: one more than the number of roots of
/// x (x^2 + ax + b) mod v.
pub fn reduction_two_torsion(curve: &GeneralCurve, v: u64) -> Result<u32, GrowthError> {
    if !curve.is_good_odd_prime(v) {
        return Err(GrowthError::BadPlace(v.to_string()));
    }
    let disc = curve.quadratic_discriminant().rem_euclid(v as i128) as i64;
    // good reduction keeps the three roots distinct and nonzero
    let extra = match jacobi(disc, v as i64)? {
        1 => 2,
        _ => 0,
    };
    Ok(2 + extra)
}

/// Order of the local cohomology group at v for the extension Q(sqrt D)/Q,
/// when the in-scope theory pins it down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LocalH1 {
    Exact {
        order: u32,
    },
    /// Bad reduction (or a ramified archimedean place): only finiteness is
    /// known; the order is omitted from every bound.
    Unknown,
}

pub fn local_h1_order(
    curve: &GeneralCurve,
    v: &Place,
    d_twist: i64,
) -> Result<LocalH1, GrowthError> {
    let f = arith::factor(d_twist)?;
    if !f.is_squarefree() {
        return Err(GrowthError::NotSquarefree(d_twist));
    }
    match v {
        Place::RealInfinite => {
            if d_twist > 0 {
                // the real place splits: trivial decomposition group
                Ok(LocalH1::Exact { order: 1 })
            } else {
                Ok(LocalH1::Unknown)
            }
        }
        Place::Finite(2) => Err(GrowthError::BadPlace("2".into())),
        Place::Finite(q) => {
            if !curve.is_good_odd_prime(*q) {
                return Ok(LocalH1::Unknown);
            }
            let disc = arith::fundamental_discriminant(d_twist)?;
            if disc % *q as i64 == 0 {
                Ok(LocalH1::Exact {
                    order: reduction_two_torsion(curve, *q)?,
                })
            } else {
                Ok(LocalH1::Exact { order: 1 })
            }
        }
    }
}

fn ratio_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Lower bound on the local/global cohomology ratio g(D) and on the induced
/// Sha growth ratio, for y^2 = x^3 + ax twisted by D.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub curve_a: i64,
    pub d_twist: i64,
    /// (prime, #E~(F_v)[2]) over the good odd primes of D ramified in Q(sqrt D).
    pub ramified_good_factors: Vec<(u64, u32)>,
    pub numerator: String,
    pub denominator_bound: String,
    pub g_lower: String,
    pub sha_growth_lower: String,
    pub rank_twisted: u32,
    pub rank_base: Option<u32>,
    pub conditional_on: Vec<String>,
}

impl GrowthReport {
    pub fn g_lower_ratio(&self) -> BigRational {
        parse_ratio(&self.g_lower)
    }

    pub fn sha_growth_ratio(&self) -> BigRational {
        parse_ratio(&self.sha_growth_lower)
    }
}

fn parse_ratio(s: &str) -> BigRational {
    match s.split_once('/') {
        Some((n, d)) => BigRational::new(n.parse().unwrap(), d.parse().unwrap()),
        None => BigRational::from_integer(s.parse().unwrap()),
    }
}

/// g(D) >= (product of ramified good local orders) / (2^rank(E_D) #E(Q)[2]);
/// bad-place contributions are omitted, so the bound is valid as stated.
/// The Sha growth bound divides further by #E(Q)[2]^3 * 2^(3 rank E), with
/// the base-curve rank an optional input defaulting to 0 (flagged).
pub fn g_lower_bound(
    curve: &MonicIsogenyCurve,
    d_twist: i64,
    rank_twisted: u32,
    rank_base: Option<u32>,
) -> Result<GrowthReport, GrowthError> {
    let f = arith::factor(d_twist)?;
    if !f.is_squarefree() {
        return Err(GrowthError::NotSquarefree(d_twist));
    }
    let gc = GeneralCurve::from_monic(curve);
    let mut factors = Vec::new();
    let mut numerator = BigInt::one();
    for (q, _) in &f.factors {
        if *q == 2 || !gc.is_good_odd_prime(*q) {
            continue;
        }
        // odd q | D always divides the field discriminant, hence ramifies
        let order = reduction_two_torsion(&gc, *q)?;
        factors.push((*q, order));
        numerator *= BigInt::from(order);
    }
    let torsion = BigInt::from(gc.rational_two_torsion_order());
    let denominator = BigInt::from(2u32).pow(rank_twisted) * &torsion;
    let g_lower = BigRational::new(numerator.clone(), denominator.clone());
    let rb = rank_base.unwrap_or(0);
    let sha_div = BigRational::from_integer(torsion.pow(3) * BigInt::from(2u32).pow(3 * rb));
    let sha_growth = &g_lower / sha_div;
    let mut conditional_on = vec!["rank_twisted_input".to_string()];
    if rank_base.is_none() {
        conditional_on.push("rank_base_defaulted_to_0".to_string());
    } else {
        conditional_on.push("rank_base_input".to_string());
    }
    Ok(GrowthReport {
        curve_a: curve.a(),
        d_twist,
        ramified_good_factors: factors,
        numerator: numerator.to_string(),
        denominator_bound: denominator.to_string(),
        g_lower: ratio_string(&g_lower),
        sha_growth_lower: ratio_string(&sha_growth),
        rank_twisted,
        rank_base,
        conditional_on,
    })
}

/// Ascending odd good primes v that split in Q(E[2]) = Q(sqrt -a), i.e.
/// (-a/v) = +1; each is verified to carry full reduced 2-torsion. With
/// `strict_hcf` the prime must additionally be representable by the
/// principal form of the fundamental discriminant of Q(sqrt -a) (imaginary
/// case only), the splitting condition in the Hilbert class field.
pub fn split_prime_search(
    curve: &MonicIsogenyCurve,
    count: usize,
    bound: u64,
    strict_hcf: bool,
) -> Result<Vec<u64>, GrowthError> {
    let gc = GeneralCurve::from_monic(curve);
    let strict_disc = if strict_hcf {
        let class = arith::squarefree_class(-curve.a())?;
        if class.rep() > 0 {
            return Err(GrowthError::StrictModeUnsupported(curve.a()));
        }
        Some(arith::fundamental_discriminant(class.rep())?)
    } else {
        None
    };
    let mut out = Vec::new();
    if count == 0 {
        return Ok(out);
    }
    let mut v = 3u64;
    while v <= bound {
        if gc.is_good_odd_prime(v) && jacobi(-curve.a(), v as i64)? == 1 {
            let strict_ok = match strict_disc {
                None => true,
                Some(disc) => represented_by_principal_form(disc, v),
            };
            if strict_ok {
                debug_assert_eq!(reduction_two_torsion(&gc, v)?, 4);
                out.push(v);
                if out.len() == count {
                    return Ok(out);
                }
            }
        }
        v += 2;
    }
    Err(GrowthError::SearchExhausted(bound))
}

/// Is the prime v represented by the principal binary quadratic form of the
/// negative fundamental discriminant disc? Exhaustive over the finite box.
fn represented_by_principal_form(disc: i64, v: u64) -> bool {
    debug_assert!(disc < 0);
    let v = v as i64;
    if disc % 4 == 0 {
        // x^2 + (|disc|/4) y^2 = v
        let c = -disc / 4;
        let mut y = 0i64;
        while c * y * y <= v {
            if is_perfect_square(v - c * y * y) {
                return true;
            }
            y += 1;
        }
        false
    } else {
        // x^2 + xy + ((1-disc)/4) y^2 = v, i.e. (2x+y)^2 + |disc| y^2 = 4v
        let c = -disc;
        let mut y = 0i64;
        while c * y * y <= 4 * v {
            let rest = 4 * v - c * y * y;
            if is_perfect_square(rest) {
                let t = (rest as f64).sqrt().round() as i64;
                if (t - y).rem_euclid(2) == 0 || (t + y).rem_euclid(2) == 0 {
                    return true;
                }
            }
            y += 1;
        }
        false
    }
}

/// Local 2-torsion dimensions at an odd good prime and the induced factor
/// (1/2) * #(E'_D(Q_q)[2] / phi(E_D(Q_q)[2])) of the Tamagawa-ratio bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TamagawaFactor {
    pub prime: u64,
    pub dim_local_two_torsion: u32,
    pub dim_dual_local_two_torsion: u32,
    /// #(E'_D(Q_q)[2] / phi(E_D(Q_q)[2])) per the case table: 4 when the dims
    /// are (1, 2), 1 when (2, 1), 2 when equal.
    pub quotient: u32,
    pub factor: String,
}

impl TamagawaFactor {
    pub fn factor_ratio(&self) -> BigRational {
        BigRational::new(BigInt::from(self.quotient), BigInt::from(2))
    }
}

pub fn tamagawa_factor(curve: &GeneralCurve, q: u64) -> Result<TamagawaFactor, GrowthError> {
    if !curve.is_good_odd_prime(q) {
        return Err(GrowthError::BadPlace(q.to_string()));
    }
    let disc = curve.quadratic_discriminant().rem_euclid(q as i128) as i64;
    let dim_e = 1 + u32::from(jacobi(disc, q as i64)? == 1);
    let dim_dual = 1 + u32::from(jacobi(curve.b, q as i64)? == 1);
    let quotient = match (dim_e, dim_dual) {
        (1, 2) => 4,
        (2, 1) => 1,
        _ => 2,
    };
    let factor = BigRational::new(BigInt::from(quotient), BigInt::from(2));
    Ok(TamagawaFactor {
        prime: q,
        dim_local_two_torsion: dim_e,
        dim_dual_local_two_torsion: dim_dual,
        quotient,
        factor: ratio_string(&factor),
    })
}

/// Ascending odd good primes q with (a^2-4b/q) = -1 and (b/q) = +1: each
/// contributes the maximal quotient 4 to the Tamagawa ratio. Requires the
/// 2-division fields to differ (b/(a^2-4b) not a rational square).
pub fn cor_prime_search(
    curve: &GeneralCurve,
    count: usize,
    bound: u64,
) -> Result<Vec<TamagawaFactor>, GrowthError> {
    let gate = (curve.b as i128) * curve.quadratic_discriminant();
    let gate_square = i64::try_from(gate).map(is_perfect_square).unwrap_or(false);
    if gate_square {
        return Err(GrowthError::GateFailed);
    }
    let mut out = Vec::new();
    if count == 0 {
        return Ok(out);
    }
    let mut q = 3u64;
    while q <= bound {
        if curve.is_good_odd_prime(q) {
            let disc = curve.quadratic_discriminant().rem_euclid(q as i128) as i64;
            if jacobi(disc, q as i64)? == -1 && jacobi(curve.b, q as i64)? == 1 {
                let factor = tamagawa_factor(curve, q)?;
                debug_assert_eq!(factor.quotient, 4);
                out.push(factor);
                if out.len() == count {
                    return Ok(out);
                }
            }
        }
        q += 2;
    }
    Err(GrowthError::SearchExhausted(bound))
}

/// h(D) and the induced Sha[2] order lower bound
/// h(D) / (2 * 2^rank(E_D) * #E(Q)[2]), conditional on the rank input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TamagawaReport {
    pub d_twist: i64,
    pub factors: Vec<TamagawaFactor>,
    pub h: String,
    pub sha_order_lower: String,
    pub rank_twisted: u32,
    pub conditional_on: Vec<String>,
}

impl TamagawaReport {
    pub fn h_ratio(&self) -> BigRational {
        parse_ratio(&self.h)
    }

    pub fn sha_order_ratio(&self) -> BigRational {
        parse_ratio(&self.sha_order_lower)
    }
}

pub fn tamagawa_lower_bound(
    curve: &GeneralCurve,
    d_twist: i64,
    rank_twisted: u32,
) -> Result<TamagawaReport, GrowthError> {
    let f = arith::factor(d_twist)?;
    if !f.is_squarefree() {
        return Err(GrowthError::NotSquarefree(d_twist));
    }
    let mut factors = Vec::new();
    let mut h = BigRational::one();
    for (q, _) in &f.factors {
        // the product runs over p | D with p not dividing the discriminant
        if *q == 2 || !curve.is_good_odd_prime(*q) {
            continue;
        }
        let factor = tamagawa_factor(curve, *q)?;
        h *= factor.factor_ratio();
        factors.push(factor);
    }
    let denom = BigRational::from_integer(
        BigInt::from(2u32)
            * BigInt::from(2u32).pow(rank_twisted)
            * BigInt::from(curve.rational_two_torsion_order()),
    );
    let bound = &h / denom;
    Ok(TamagawaReport {
        d_twist,
        factors,
        h: ratio_string(&h),
        sha_order_lower: ratio_string(&bound),
        rank_twisted,
        conditional_on: vec![
            "rank_twisted_input".to_string(),
            "finiteness_for_interpretation".to_string(),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monic(a: i64) -> MonicIsogenyCurve {
        MonicIsogenyCurve::new(a).unwrap()
    }

    /// Independent oracle: count points of y^2 = x^3 + ax^2 + bx over F_v
    /// killed by 2, by brute-force root counting of the 2-division cubic.
    fn brute_two_torsion(a: i64, b: i64, v: u64) -> u32 {
        let vi = v as i64;
        let mut roots = 0;
        for x in 0..vi {
            if (x * x * x + a * x * x + b * x).rem_euclid(vi) == 0 {
                roots += 1;
            }
        }
        1 + roots as u32
    }

    #[test]
    fn reduction_two_torsion_examples() {
        let c17 = GeneralCurve::from_monic(&monic(17));
        assert_eq!(reduction_two_torsion(&c17, 13).unwrap(), 4);
        // -17 = 1 mod 3 is a square mod 3: full two-torsion, pinned by the
        // brute-force count
        assert_eq!(
            reduction_two_torsion(&c17, 3).unwrap(),
            brute_two_torsion(0, 17, 3)
        );
        assert_eq!(reduction_two_torsion(&c17, 3).unwrap(), 4);
        let c1 = GeneralCurve::from_monic(&monic(1));
        assert_eq!(reduction_two_torsion(&c1, 3).unwrap(), 2);
        // rejected places
        assert!(reduction_two_torsion(&c17, 2).is_err());
        assert!(reduction_two_torsion(&c17, 17).is_err());
    }

    #[test]
    fn reduction_two_torsion_matches_brute_force() {
        for (a, b) in [(0i64, 17i64), (0, 1), (0, 45), (3, 2), (-1, 6), (5, -7)] {
            let curve = GeneralCurve::new(a, b).unwrap();
            for v in (3u64..50).filter(|&v| curve.is_good_odd_prime(v)) {
                assert_eq!(
                    reduction_two_torsion(&curve, v).unwrap(),
                    brute_two_torsion(a, b, v),
                    "a={} b={} v={}",
                    a,
                    b,
                    v
                );
            }
        }
    }

    #[test]
    fn local_h1_order_examples() {
        let c = GeneralCurve::from_monic(&monic(17));
        assert_eq!(
            local_h1_order(&c, &Place::Finite(7), -11).unwrap(),
            LocalH1::Exact { order: 1 }
        );
        assert_eq!(
            local_h1_order(&c, &Place::Finite(11), -11).unwrap(),
            LocalH1::Exact { order: 4 }
        );
        assert_eq!(
            local_h1_order(&c, &Place::Finite(17), -11).unwrap(),
            LocalH1::Unknown
        );
        assert!(local_h1_order(&c, &Place::Finite(2), -11).is_err());
        assert_eq!(
            local_h1_order(&c, &Place::RealInfinite, 5).unwrap(),
            LocalH1::Exact { order: 1 }
        );
        assert_eq!(
            local_h1_order(&c, &Place::RealInfinite, -5).unwrap(),
            LocalH1::Unknown
        );
        // exactly the good unramified places give order 1
        for q in (3u64..60).filter(|&q| c.is_good_odd_prime(q)) {
            let h = local_h1_order(&c, &Place::Finite(q), -11).unwrap();
            let disc = arith::fundamental_discriminant(-11).unwrap();
            if disc % q as i64 != 0 {
                assert_eq!(h, LocalH1::Exact { order: 1 });
            } else {
                assert_ne!(h, LocalH1::Exact { order: 1 });
            }
        }
    }

    #[test]
    fn g_lower_bound_examples() {
        // a = 17, D = -11: numerator #E~(F_11)[2] = 4, denominator 2
        let r = g_lower_bound(&monic(17), -11, 0, None).unwrap();
        assert_eq!(r.ramified_good_factors, vec![(11, 4)]);
        assert_eq!(r.numerator, "4");
        assert_eq!(r.denominator_bound, "2");
        assert_eq!(r.g_lower, "2");
        // no good ramified primes: empty product
        let r = g_lower_bound(&monic(17), -34, 0, None).unwrap();
        assert_eq!(r.numerator, "1");
        assert!(r.ramified_good_factors.is_empty());
        // three ramified good primes multiply
        let d = -11 * 13 * 29;
        let r = g_lower_bound(&monic(17), d, 0, Some(0)).unwrap();
        let c = GeneralCurve::from_monic(&monic(17));
        let expected: u32 = [11u64, 13, 29]
            .iter()
            .map(|&q| reduction_two_torsion(&c, q).unwrap())
            .product();
        assert_eq!(r.numerator, expected.to_string());
        assert_eq!(
            r.g_lower_ratio(),
            BigRational::new(BigInt::from(expected), BigInt::from(2))
        );
    }

    #[test]
    fn g_lower_numerator_multiplicative() {
        let curve = monic(17);
        let (d1, d2) = (-11i64, 13 * 29);
        let r1 = g_lower_bound(&curve, d1, 0, None).unwrap();
        let r2 = g_lower_bound(&curve, d2, 0, None).unwrap();
        let r12 = g_lower_bound(&curve, d1 * d2, 0, None).unwrap();
        let n1: u64 = r1.numerator.parse().unwrap();
        let n2: u64 = r2.numerator.parse().unwrap();
        let n12: u64 = r12.numerator.parse().unwrap();
        assert_eq!(n12, n1 * n2);
    }

    #[test]
    fn split_prime_search_examples() {
        // -17 = 1 mod 3 is a square mod 3, so 3 splits in Q(sqrt -17)
        let found = split_prime_search(&monic(17), 3, 1000, false).unwrap();
        assert_eq!(found, vec![3, 7, 11]);
        // (-1/v) = +1 iff v = 1 mod 4
        let found = split_prime_search(&monic(1), 1, 1000, false).unwrap();
        assert_eq!(found, vec![5]);
        assert!(split_prime_search(&monic(1), 0, 10, false)
            .unwrap()
            .is_empty());
        let c = GeneralCurve::from_monic(&monic(17));
        for v in split_prime_search(&monic(17), 6, 1000, false).unwrap() {
            assert_eq!(reduction_two_torsion(&c, v).unwrap(), 4);
        }
    }

    #[test]
    fn split_prime_search_strict_mode() {
        // disc(Q(sqrt -17)) = -68: principal form x^2 + 17 y^2; the first
        // represented prime is 53 = 36 + 17
        let found = split_prime_search(&monic(17), 1, 1000, true).unwrap();
        assert_eq!(found, vec![53]);
        // strict primes split in the plain sense too
        for v in &found {
            assert_eq!(jacobi(-17, *v as i64).unwrap(), 1);
        }
        // real quadratic 2-division field is unsupported in strict mode
        assert!(matches!(
            split_prime_search(&monic(-5), 1, 1000, true),
            Err(GrowthError::StrictModeUnsupported(-5))
        ));
    }

    #[test]
    fn cor_prime_search_examples() {
        // a = 0, b = 1: need (-4/q) = -1 and (1/q) = +1, i.e. q = 3 mod 4
        let c = GeneralCurve::new(0, 1).unwrap();
        let found = cor_prime_search(&c, 3, 1000).unwrap();
        let primes: Vec<u64> = found.iter().map(|f| f.prime).collect();
        assert_eq!(primes, vec![3, 7, 11]);
        for f in &found {
            assert_eq!(f.quotient, 4);
            assert_eq!(f.dim_local_two_torsion, 1);
            assert_eq!(f.dim_dual_local_two_torsion, 2);
        }
        // gate failure: a = 0, b = -4 makes b/(a^2-4b) = -4/16 = -1/4... not
        // a square; use b(a^2-4b) a perfect square instead: a = 0, b = -1:
        // b(a^2-4b) = -1 * 4 = -4, not square; a = 3, b = 2: 2 * 1 = 2, no.
        // a = 5, b = 4: 4 * 9 = 36 is a square, so the fields coincide.
        let bad = GeneralCurve::new(5, 4).unwrap();
        assert!(matches!(
            cor_prime_search(&bad, 1, 100),
            Err(GrowthError::GateFailed)
        ));
    }

    #[test]
    fn cor_factors_match_brute_force_roots() {
        // quotient 4 iff the curve's quadratic is irreducible mod q while the
        // dual's splits; verified by counting roots of both cubics mod q
        let c = GeneralCurve::new(0, 1).unwrap();
        for f in cor_prime_search(&c, 5, 1000).unwrap() {
            let q = f.prime;
            let count_e = super::tests::brute_two_torsion(0, 1, q);
            let dual = GeneralCurve::new(0 - 2 * 0, 0 * 0 - 4 * 1).unwrap();
            let count_dual = brute_two_torsion(dual.a, dual.b, q);
            assert_eq!(count_e, 2, "E must have Z/2 locally at {}", q);
            assert_eq!(count_dual, 4, "E' must be full locally at {}", q);
        }
    }

    #[test]
    fn tamagawa_lower_bound_examples() {
        let c = GeneralCurve::new(0, 1).unwrap();
        // D = 3 * 7 * 11: three quotient-4 factors, h = 8
        let r = tamagawa_lower_bound(&c, 3 * 7 * 11, 0).unwrap();
        assert_eq!(r.h, "8");
        assert_eq!(r.sha_order_lower, "2"); // 8 / (2 * 1 * 2)
                                            // empty product
        let r = tamagawa_lower_bound(&c, 1, 0).unwrap();
        assert_eq!(r.h, "1");
        // D = 5: (-4/5) = +1 and (1/5) = +1, equal dims, factor 1
        let r = tamagawa_lower_bound(&c, 5, 0).unwrap();
        assert_eq!(r.factors.len(), 1);
        assert_eq!(r.factors[0].quotient, 2);
        assert_eq!(r.h, "1");
        assert_eq!(r.sha_order_lower, "1/4");
    }

    #[test]
    fn tamagawa_bound_grows_with_cor_primes() {
        let c = GeneralCurve::new(0, 1).unwrap();
        let factors = cor_prime_search(&c, 6, 1000).unwrap();
        let mut d: i64 = 1;
        let mut previous = BigRational::new(BigInt::from(0), BigInt::from(1));
        for f in factors {
            d *= f.prime as i64;
            let r = tamagawa_lower_bound(&c, d, 0).unwrap();
            let bound = r.sha_order_ratio();
            assert!(bound > previous);
            previous = bound;
        }
        // six quotient-4 factors: h = 2^6, bound = 2^6 / 4 = 16
        assert_eq!(previous, BigRational::from_integer(BigInt::from(16)));
    }
}
