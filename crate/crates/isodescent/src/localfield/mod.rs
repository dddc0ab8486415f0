//! p-adic and real local arithmetic: square classes in completions, Hilbert
//! symbols, and the certified local-solvability oracle for the quartic
//! torsors d y^2 = d^2 + e x^4 in P(1, 2, 1).
//!
//! Every verdict is proof-carrying: a solvable certificate holds a witness
//! that re-substitutes (exact rational x, y past its Hensel margin), an
//! unsolvable one records the exhaustion depth at which every residue disc is
//! excluded, and a depth-cap hit is the explicit `Undecided` outcome, never a
//! silent failure.

mod ext2;
mod padic;
mod solve;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, SquareClass};
use padic::*;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum LocalError {
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("torsor coefficient e must be nonzero")]
    ZeroTorsorCoefficient,
    #[error("extension field parameter {0} must be squarefree and 5 mod 8")]
    BadExtensionField(i64),
}

/// A place of Q: the real place or a finite prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    RealInfinite,
    Finite(u64),
}

impl Serialize for Place {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Place {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl Place {
    pub fn real() -> Place {
        Place::RealInfinite
    }

    pub fn finite(p: u64) -> Result<Place, LocalError> {
        if arith::is_prime(p) {
            Ok(Place::Finite(p))
        } else {
            Err(LocalError::NotPrime(p))
        }
    }

    pub fn is_real(&self) -> bool {
        matches!(self, Place::RealInfinite)
    }

    pub fn prime(&self) -> Option<u64> {
        match self {
            Place::RealInfinite => None,
            Place::Finite(p) => Some(*p),
        }
    }
}

impl std::fmt::Display for Place {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Place::RealInfinite => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{}", p),
        }
    }
}

impl std::str::FromStr for Place {
    type Err = LocalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "inf" || s == "oo" || s == "infinity" {
            return Ok(Place::RealInfinite);
        }
        let p: u64 = s.parse().map_err(|_| LocalError::NotPrime(0))?;
        Place::finite(p)
    }
}

/// The genus-1 curve d y^2 = d^2 + e x^4, glued with d v^2 = d^2 u^4 + e in
/// the weighted projective plane P(1, 2, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuarticTorsor {
    d: SquareClass,
    e: i64,
}

impl QuarticTorsor {
    pub fn new(d: SquareClass, e: i64) -> Result<Self, LocalError> {
        if e == 0 {
            return Err(LocalError::ZeroTorsorCoefficient);
        }
        Ok(QuarticTorsor { d, e })
    }

    pub fn d(&self) -> SquareClass {
        self.d
    }

    pub fn e(&self) -> i64 {
        self.e
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Solvable,
    Unsolvable,
    Undecided,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Verdict::Solvable => "solvable",
            Verdict::Unsolvable => "unsolvable",
            Verdict::Undecided => "undecided",
        };
        write!(f, "{}", s)
    }
}

/// Which completion a certificate speaks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "completion", rename_all = "snake_case")]
pub enum Completion {
    Real,
    Finite {
        p: u64,
    },
    /// The unramified quadratic extension of Q_2, presented as Q_2(sqrt(d_field))
    /// for a squarefree d_field = 5 mod 8.
    UnramifiedQuadratic2 {
        d_field: i64,
    },
}

impl std::fmt::Display for Completion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Completion::Real => write!(f, "inf"),
            Completion::Finite { p } => write!(f, "{}", p),
            Completion::UnramifiedQuadratic2 { d_field } => write!(f, "2(sqrt {})", d_field),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RealPointKind {
    /// d > 0: the point (0, sqrt d)
    XZero,
    /// e < 0: a real zero of d^2 + e x^4 gives a point with y = 0
    YZero,
}

/// Proof payload of a certificate. Unit parts and valuations are carried as
/// decimal strings (extension-ring values as "a+b*w").
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// Exact rational (or ring) x; y given past the recorded Hensel margin
    /// k > 2 v(2 d y).
    AffineWitness {
        x_num: String,
        x_den: String,
        y_val: i64,
        y_unit: String,
        precision: u32,
        hensel_margin: u32,
    },
    /// A point with y = 0: x is a fourth root of -d^2/e to the stated precision.
    QuarticRootWitness {
        x_val: i64,
        x_unit: String,
        precision: u32,
    },
    /// Points at infinity [1 : +-sqrt(e/d) : 0] exist; the root is given to the
    /// stated precision.
    InfinityWitness {
        sqrt_val: i64,
        sqrt_unit: String,
        precision: u32,
    },
    RealWitness {
        at: RealPointKind,
    },
    RealSignObstruction,
    /// Every residue disc is excluded by a square-class argument at or below
    /// this depth.
    ResidueExhaustion {
        max_depth: u32,
        parity_note: Option<String>,
    },
    DepthCapReached,
}

/// Proof-carrying verdict of local solvability at one completion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolvabilityCertificate {
    pub d: i64,
    pub e: i64,
    #[serde(flatten)]
    pub completion: Completion,
    pub verdict: Verdict,
    pub evidence: Evidence,
    pub depth_used: u32,
}

pub const DEFAULT_DEPTH_CAP: u32 = 64;
pub const MAX_DEPTH_CAP: u32 = 256;
pub const DEFAULT_REVALIDATION_BUDGET: u64 = 10_000_000;

/// Is x a square in the completion at v? Exact: even valuation plus a unit
/// residue square (mod p for odd p, 1 mod 8 for p = 2, positivity at the real
/// place).
pub fn local_square(x: Ratio<i64>, v: &Place) -> Result<bool, LocalError> {
    if x.is_zero() {
        return Err(LocalError::ZeroInput);
    }
    match v {
        Place::RealInfinite => Ok(x.numer() * x.denom() > 0),
        Place::Finite(p) => {
            let num = BigInt::from(*x.numer());
            let den = BigInt::from(*x.denom());
            Ok(rat_is_square(&num, &den, *p))
        }
    }
}

/// Hilbert symbol (a, b)_v: +1 iff a x^2 + b y^2 = 1 has a solution over the
/// completion at v.
pub fn hilbert_symbol(a: Ratio<i64>, b: Ratio<i64>, v: &Place) -> Result<i32, LocalError> {
    if a.is_zero() || b.is_zero() {
        return Err(LocalError::ZeroInput);
    }
    match v {
        Place::RealInfinite => {
            if a.numer().is_negative() && b.numer().is_negative() {
                Ok(-1)
            } else {
                Ok(1)
            }
        }
        Place::Finite(2) => {
            let (alpha, u) = rat_val_unit_mod8(&a);
            let (beta, w) = rat_val_unit_mod8(&b);
            let eps = |x: u64| (x as i64 - 1) / 2 % 2; // 1 iff x = 3 mod 4
            let om = |x: u64| i64::from(x == 3 || x == 5); // (x^2-1)/8 mod 2
            let exp = eps(u) * eps(w) + alpha * om(w) + beta * om(u);
            Ok(if exp % 2 == 0 { 1 } else { -1 })
        }
        Place::Finite(p) => {
            let (alpha, u) = rat_val_unit_mod_p(&a, *p);
            let (beta, w) = rat_val_unit_mod_p(&b, *p);
            let mut s = 1i32;
            if (alpha * beta) % 2 != 0 && legendre_u64(p - 1, *p) == -1 {
                s = -s;
            }
            if beta % 2 != 0 && legendre_u64(u, *p) == -1 {
                s = -s;
            }
            if alpha % 2 != 0 && legendre_u64(w, *p) == -1 {
                s = -s;
            }
            Ok(s)
        }
    }
}

fn rat_val_unit_mod_p(x: &Ratio<i64>, p: u64) -> (i64, u64) {
    let num = BigInt::from(*x.numer());
    let den = BigInt::from(*x.denom());
    let s = rat_split(&num, &den, p);
    let n = big_mod_u64(&s.num_unit, p);
    let d = big_mod_u64(&s.den_unit, p);
    // d^(p-2) inverts d mod p
    let mut inv = 1u64;
    let mut base = d % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            inv = ((inv as u128 * base as u128) % p as u128) as u64;
        }
        base = ((base as u128 * base as u128) % p as u128) as u64;
        e >>= 1;
    }
    (s.val, ((n as u128 * inv as u128) % p as u128) as u64)
}

fn rat_val_unit_mod8(x: &Ratio<i64>) -> (i64, u64) {
    let num = BigInt::from(*x.numer());
    let den = BigInt::from(*x.denom());
    let s = rat_split(&num, &den, 2);
    let n = big_mod_u64(&s.num_unit, 8);
    let d = big_mod_u64(&s.den_unit, 8);
    // odd squares are 1 mod 8, so d is its own inverse
    (s.val, (n * d) % 8)
}

/// Local solvability of the projective torsor at a place of Q.
///
/// The affine chart is searched over the finite valuation window outside of
/// which the value class stabilizes to the x = 0 or infinity tests; an
/// `Undecided` verdict (cap hit) asks the caller to raise `depth_cap`.
pub fn torsor_solvable(t: &QuarticTorsor, v: &Place, depth_cap: u32) -> SolvabilityCertificate {
    let d = t.d.rep();
    let e = t.e;
    let (completion, out) = match v {
        Place::RealInfinite => (Completion::Real, solve::solve_real(d, e)),
        Place::Finite(p) => (
            Completion::Finite { p: *p },
            solve::solve_finite(d, e, *p, depth_cap),
        ),
    };
    SolvabilityCertificate {
        d,
        e,
        completion,
        verdict: out.verdict,
        evidence: out.evidence,
        depth_used: out.depth_used,
    }
}

/// Local solvability over the unramified quadratic extension of Q_2,
/// presented as Q_2(sqrt(d_field)) for squarefree d_field = 5 mod 8.
pub fn torsor_solvable_unramified_2ext(
    t: &QuarticTorsor,
    d_field: i64,
    depth_cap: u32,
) -> Result<SolvabilityCertificate, LocalError> {
    let squarefree = arith::factor(d_field)
        .map(|f| f.is_squarefree())
        .unwrap_or(false);
    if !squarefree || d_field.rem_euclid(8) != 5 {
        return Err(LocalError::BadExtensionField(d_field));
    }
    let out = ext2::solve_ext2(t.d.rep(), t.e, depth_cap);
    Ok(SolvabilityCertificate {
        d: t.d.rep(),
        e: t.e,
        completion: Completion::UnramifiedQuadratic2 { d_field },
        verdict: out.verdict,
        evidence: out.evidence,
        depth_used: out.depth_used,
    })
}

impl SolvabilityCertificate {
    /// Independent re-check: witnesses are re-substituted against their
    /// recorded Hensel margins; exclusions are re-established by an
    /// exhaustive sweep one depth level deeper (up to `budget` discs).
    pub fn revalidate(&self, budget: u64) -> Result<(), String> {
        match (&self.completion, &self.verdict, &self.evidence) {
            (Completion::Real, Verdict::Solvable, Evidence::RealWitness { at }) => {
                let ok = match at {
                    RealPointKind::XZero => self.d > 0,
                    RealPointKind::YZero => self.e < 0,
                };
                if ok {
                    Ok(())
                } else {
                    Err("real witness contradicts the sign rule".into())
                }
            }
            (Completion::Real, Verdict::Unsolvable, Evidence::RealSignObstruction) => {
                if self.d < 0 && self.e > 0 {
                    Ok(())
                } else {
                    Err("real obstruction contradicts the sign rule".into())
                }
            }
            (Completion::Finite { p }, Verdict::Solvable, ev) => {
                self.revalidate_finite_witness(*p, ev)
            }
            (
                Completion::Finite { p },
                Verdict::Unsolvable,
                Evidence::ResidueExhaustion { max_depth, .. },
            ) => solve::revalidate_exhaustion_finite(self.d, self.e, *p, *max_depth, budget),
            (Completion::UnramifiedQuadratic2 { .. }, Verdict::Solvable, ev) => {
                self.revalidate_ext_witness(ev)
            }
            (
                Completion::UnramifiedQuadratic2 { .. },
                Verdict::Unsolvable,
                Evidence::ResidueExhaustion { max_depth, .. },
            ) => ext2::revalidate_exhaustion_ext2(self.d, self.e, *max_depth, budget),
            (_, Verdict::Undecided, _) => Err("an undecided verdict carries no proof".into()),
            _ => Err("evidence does not match the verdict".into()),
        }
    }

    fn revalidate_finite_witness(&self, p: u64, ev: &Evidence) -> Result<(), String> {
        let d = BigInt::from(self.d);
        let e = BigInt::from(self.e);
        match ev {
            Evidence::AffineWitness {
                x_num,
                x_den,
                y_val,
                y_unit,
                precision,
                hensel_margin,
            } => {
                let xn: BigInt = x_num.parse().map_err(|_| "bad x_num")?;
                let xd: BigInt = x_den.parse().map_err(|_| "bad x_den")?;
                if xd.is_zero() {
                    return Err("zero denominator".into());
                }
                let t_num = (&d * &d * xd.pow(4) + &e * xn.pow(4)) * &d;
                let t_den = &d * &d * xd.pow(4);
                if t_num.is_zero() {
                    return Err("witness lies on y = 0; expected quartic-root evidence".into());
                }
                if !rat_is_square(&t_num, &t_den, p) {
                    return Err("witness value is not a local square".into());
                }
                let s = rat_split(&t_num, &t_den, p);
                if s.val != 2 * y_val {
                    return Err("y valuation mismatch".into());
                }
                let ew: i64 = if p == 2 { 1 } else { 0 };
                let needed = 2 * (ew + val_of(&d, p) as i64 + y_val);
                if (*hensel_margin as i64) <= needed {
                    return Err("hensel margin too small".into());
                }
                let yu: BigInt = y_unit.parse().map_err(|_| "bad y_unit")?;
                let unit = rat_unit_mod(&t_num, &t_den, p, *precision);
                let m = big_pow(p, *precision);
                if !mod_pos(&(&yu * &yu - unit), &m).is_zero() {
                    return Err("y unit does not square to the witness value".into());
                }
                Ok(())
            }
            Evidence::InfinityWitness {
                sqrt_val,
                sqrt_unit,
                precision,
            } => {
                if !rat_is_square(&e, &d, p) {
                    return Err("e/d is not a local square".into());
                }
                let s = rat_split(&e, &d, p);
                if s.val != 2 * sqrt_val {
                    return Err("sqrt valuation mismatch".into());
                }
                let su: BigInt = sqrt_unit.parse().map_err(|_| "bad sqrt_unit")?;
                let unit = rat_unit_mod(&e, &d, p, *precision);
                let m = big_pow(p, *precision);
                if !mod_pos(&(&su * &su - unit), &m).is_zero() {
                    return Err("sqrt unit does not square to e/d".into());
                }
                Ok(())
            }
            Evidence::QuarticRootWitness {
                x_val,
                x_unit,
                precision,
            } => {
                let md2 = -(&d * &d);
                if !rat_is_fourth(&md2, &e, p) {
                    return Err("-d^2/e is not a local fourth power".into());
                }
                let s = rat_split(&md2, &e, p);
                if s.val != 4 * x_val {
                    return Err("root valuation mismatch".into());
                }
                let xu: BigInt = x_unit.parse().map_err(|_| "bad x_unit")?;
                let unit = rat_unit_mod(&md2, &e, p, *precision);
                let m = big_pow(p, *precision);
                if !mod_pos(&(xu.pow(4) - unit), &m).is_zero() {
                    return Err("x unit is not a fourth root of -d^2/e".into());
                }
                Ok(())
            }
            _ => Err("evidence does not match the completion".into()),
        }
    }

    fn revalidate_ext_witness(&self, ev: &Evidence) -> Result<(), String> {
        use ext2::E2;
        let d = BigInt::from(self.d);
        let e = BigInt::from(self.e);
        match ev {
            Evidence::AffineWitness {
                x_num,
                x_den,
                y_val,
                y_unit,
                precision,
                hensel_margin,
            } => {
                let xe = parse_e2(x_num).ok_or("bad x_num")?;
                let xd: BigInt = x_den.parse().map_err(|_| "bad x_den")?;
                let xd4 = xd.pow(4);
                let num = E2::from_int(&(&d * &d * &xd4))
                    .add(&xe.pow4().scale(&e))
                    .scale(&d);
                let den = &d * &d * xd4;
                if num.is_zero() {
                    return Err("witness lies on y = 0".into());
                }
                if !ext2::is_square_ext(&num, &den) {
                    return Err("witness value is not a square in the extension".into());
                }
                let vt = num.val2().unwrap() as i64 - val_of(&den, 2) as i64;
                if vt != 2 * y_val {
                    return Err("y valuation mismatch".into());
                }
                let needed = 2 * (1 + val_of(&d, 2) as i64 + y_val);
                if (*hensel_margin as i64) <= needed {
                    return Err("hensel margin too small".into());
                }
                let yu = parse_e2(y_unit).ok_or("bad y_unit")?;
                let m = big_pow(2, *precision);
                let num_unit = num.shr2(num.val2().unwrap());
                let den_odd = &den / big_pow(2, val_of(&den, 2));
                let dinv = mod_inv(&mod_pos(&den_odd, &m), &m).ok_or("den not invertible")?;
                let unit = num_unit.scale(&dinv).reduce_mod(*precision);
                if yu.mul(&yu).reduce_mod(*precision) != unit {
                    return Err("y unit does not square to the witness value".into());
                }
                Ok(())
            }
            Evidence::InfinityWitness {
                sqrt_val,
                sqrt_unit,
                precision,
            } => {
                if !ext2::is_square_ext(&ext2::E2::from_int(&e), &d) {
                    return Err("e/d is not a square in the extension".into());
                }
                let v = val_of(&e, 2) as i64 - val_of(&d, 2) as i64;
                if v != 2 * sqrt_val {
                    return Err("sqrt valuation mismatch".into());
                }
                let su = parse_e2(sqrt_unit).ok_or("bad sqrt_unit")?;
                let m = big_pow(2, *precision);
                let num_odd = &e / big_pow(2, val_of(&e, 2));
                let den_odd = &d / big_pow(2, val_of(&d, 2));
                let dinv = mod_inv(&mod_pos(&den_odd, &m), &m).ok_or("den not invertible")?;
                let unit = E2::from_int(&num_odd).scale(&dinv).reduce_mod(*precision);
                if su.mul(&su).reduce_mod(*precision) != unit {
                    return Err("sqrt unit does not square to e/d".into());
                }
                Ok(())
            }
            Evidence::QuarticRootWitness {
                x_val,
                x_unit,
                precision,
            } => {
                let md2 = -(&d * &d);
                if !ext2::is_fourth_ext(&E2::from_int(&md2), &e) {
                    return Err("-d^2/e is not a fourth power in the extension".into());
                }
                let v = val_of(&md2, 2) as i64 - val_of(&e, 2) as i64;
                if v != 4 * x_val {
                    return Err("root valuation mismatch".into());
                }
                let xu = parse_e2(x_unit).ok_or("bad x_unit")?;
                let m = big_pow(2, *precision);
                let num_odd = &md2 / big_pow(2, val_of(&md2, 2));
                let den_odd = &e / big_pow(2, val_of(&e, 2));
                let dinv = mod_inv(&mod_pos(&den_odd, &m), &m).ok_or("den not invertible")?;
                let unit = E2::from_int(&num_odd).scale(&dinv).reduce_mod(*precision);
                if xu.pow4().reduce_mod(*precision) != unit {
                    return Err("x unit is not a fourth root of -d^2/e".into());
                }
                Ok(())
            }
            _ => Err("evidence does not match the completion".into()),
        }
    }
}

/// Independent exhaustive unsolvability sweep at an explicit depth (deeper
/// than any certificate), for oracle-style rechecks. Verifies that no special
/// point exists and no residue disc at `sweep_depth` carries an exactly
/// square value.
pub fn exhaustive_unsolvability_recheck(
    t: &QuarticTorsor,
    v: &Place,
    sweep_depth: u32,
    budget: u64,
) -> Result<(), String> {
    match v {
        Place::RealInfinite => {
            if t.d().rep() < 0 && t.e() > 0 {
                Ok(())
            } else {
                Err("torsor is solvable over the reals".into())
            }
        }
        Place::Finite(p) => solve::revalidate_exhaustion_finite(
            t.d().rep(),
            t.e(),
            *p,
            sweep_depth.saturating_sub(1),
            budget,
        ),
    }
}

fn parse_e2(s: &str) -> Option<ext2::E2> {
    let body = s.strip_suffix("*w")?;
    let split_at = body[1..].find('+')? + 1;
    let a: BigInt = body[..split_at].parse().ok()?;
    let b: BigInt = body[split_at + 1..].parse().ok()?;
    Some(ext2::E2 { a, b })
}

#[cfg(test)]
mod tests;
