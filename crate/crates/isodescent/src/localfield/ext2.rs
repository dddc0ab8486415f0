//! Arithmetic and torsor solvability over the unramified quadratic extension
//! of Q_2, realized as Q_2(w) with w^2 = w + 1 (residue field F_4). For
//! squarefree D = 5 mod 8 this field is Q_2(sqrt(D)): D/5 = 1 mod 8 is a
//! 2-adic square, and sqrt(5) = 2w - 1.
//!
//! Elements are pairs a + b w with exact BigInt coordinates; the valuation is
//! min(v_2(a), v_2(b)) since the extension is unramified. Unit squares are
//! decided mod 8 and unit fourth powers mod 32 against enumerated tables,
//! which is the Hensel-exact criterion at the wild prime.

use std::collections::HashSet;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::padic::{big_pow, mod_inv, mod_pos, val_of};
use super::{Evidence, Verdict};
use crate::localfield::solve::strip_fourth;

/// a + b w with w^2 = w + 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct E2 {
    pub a: BigInt,
    pub b: BigInt,
}

impl E2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Self {
        E2 {
            a: a.into(),
            b: b.into(),
        }
    }

    pub fn zero() -> Self {
        E2::new(0, 0)
    }

    pub fn from_int(n: &BigInt) -> Self {
        E2 {
            a: n.clone(),
            b: BigInt::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn add(&self, rhs: &E2) -> E2 {
        E2 {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
        }
    }

    pub fn mul(&self, rhs: &E2) -> E2 {
        // (a + bw)(c + dw) = ac + bd + (ad + bc + bd) w
        let ac = &self.a * &rhs.a;
        let bd = &self.b * &rhs.b;
        let ad_bc = &self.a * &rhs.b + &self.b * &rhs.a;
        E2 {
            a: &ac + &bd,
            b: ad_bc + bd,
        }
    }

    pub fn scale(&self, n: &BigInt) -> E2 {
        E2 {
            a: &self.a * n,
            b: &self.b * n,
        }
    }

    pub fn pow4(&self) -> E2 {
        let sq = self.mul(self);
        sq.mul(&sq)
    }

    /// 2-adic valuation: min of coordinate valuations. None for zero.
    pub fn val2(&self) -> Option<u32> {
        if self.is_zero() {
            return None;
        }
        let va = if self.a.is_zero() {
            u32::MAX
        } else {
            val_of(&self.a, 2)
        };
        let vb = if self.b.is_zero() {
            u32::MAX
        } else {
            val_of(&self.b, 2)
        };
        Some(va.min(vb))
    }

    pub fn shr2(&self, k: u32) -> E2 {
        let m = big_pow(2, k);
        E2 {
            a: &self.a / &m,
            b: &self.b / &m,
        }
    }

    pub fn reduce_mod(&self, k: u32) -> E2 {
        let m = big_pow(2, k);
        E2 {
            a: mod_pos(&self.a, &m),
            b: mod_pos(&self.b, &m),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.a.is_odd() || self.b.is_odd()
    }

    /// Inverse of a unit mod 2^k via the conjugate a + b(1 - w) and the odd
    /// norm a^2 + ab - b^2.
    #[cfg(test)]
    pub fn inv_mod(&self, k: u32) -> E2 {
        let norm = &self.a * &self.a + &self.a * &self.b - &self.b * &self.b;
        debug_assert!(norm.is_odd());
        let m = big_pow(2, k);
        let ninv = mod_inv(&mod_pos(&norm, &m), &m).expect("odd norm invertible");
        let conj = E2 {
            a: &self.a + &self.b,
            b: -self.b.clone(),
        };
        conj.scale(&ninv).reduce_mod(k)
    }

    pub fn to_string_compact(&self) -> String {
        format!("{}+{}*w", self.a, self.b)
    }
}

fn unit_squares_mod8() -> &'static HashSet<(u8, u8)> {
    static SET: OnceLock<HashSet<(u8, u8)>> = OnceLock::new();
    SET.get_or_init(|| {
        let mut s = HashSet::new();
        for a in 0u8..8 {
            for b in 0u8..8 {
                if a % 2 == 1 || b % 2 == 1 {
                    let u = E2::new(a as i64, b as i64);
                    let sq = u.mul(&u).reduce_mod(3);
                    s.insert((u8::try_from(&sq.a).unwrap(), u8::try_from(&sq.b).unwrap()));
                }
            }
        }
        s
    })
}

fn unit_fourths_mod32() -> &'static HashSet<(u8, u8)> {
    static SET: OnceLock<HashSet<(u8, u8)>> = OnceLock::new();
    SET.get_or_init(|| {
        let mut s = HashSet::new();
        for a in 0u8..32 {
            for b in 0u8..32 {
                if a % 2 == 1 || b % 2 == 1 {
                    let u = E2::new(a as i64, b as i64);
                    let f = u.pow4().reduce_mod(5);
                    s.insert((u8::try_from(&f.a).unwrap(), u8::try_from(&f.b).unwrap()));
                }
            }
        }
        s
    })
}

fn pair_mod(x: &E2, k: u32) -> (u8, u8) {
    let r = x.reduce_mod(k);
    (u8::try_from(&r.a).unwrap(), u8::try_from(&r.b).unwrap())
}

/// Unit of the extension ring: square iff its mod-8 image is a unit square.
pub(crate) fn unit_is_square_e2(u: &E2) -> bool {
    debug_assert!(u.is_unit());
    unit_squares_mod8().contains(&pair_mod(u, 3))
}

pub(crate) fn unit_is_fourth_e2(u: &E2) -> bool {
    debug_assert!(u.is_unit());
    unit_fourths_mod32().contains(&pair_mod(u, 5))
}

/// Exact squareness in the extension field of a nonzero element x / den with
/// x in the ring and den a nonzero rational integer.
pub(crate) fn is_square_ext(x: &E2, den: &BigInt) -> bool {
    if x.is_zero() {
        return true;
    }
    let vx = x.val2().unwrap();
    let vd = val_of(den, 2);
    if (vx as i64 - vd as i64).rem_euclid(2) != 0 {
        return false;
    }
    let ux = x.shr2(vx);
    let den_odd = den / big_pow(2, vd);
    let m = big_pow(2, 3);
    let dinv = mod_inv(&mod_pos(&den_odd, &m), &m).expect("odd");
    unit_is_square_e2(&ux.scale(&dinv).reduce_mod(3))
}

pub(crate) fn is_fourth_ext(x: &E2, den: &BigInt) -> bool {
    if x.is_zero() {
        return true;
    }
    let vx = x.val2().unwrap();
    let vd = val_of(den, 2);
    if (vx as i64 - vd as i64).rem_euclid(4) != 0 {
        return false;
    }
    let ux = x.shr2(vx);
    let den_odd = den / big_pow(2, vd);
    let m = big_pow(2, 5);
    let dinv = mod_inv(&mod_pos(&den_odd, &m), &m).expect("odd");
    unit_is_fourth_e2(&ux.scale(&dinv).reduce_mod(5))
}

/// Square root of a unit square mod 2^k, lifted digit by digit from mod 8.
pub(crate) fn sqrt_unit_e2(u: &E2, k: u32) -> Option<E2> {
    if !unit_is_square_e2(u) {
        return None;
    }
    let mut y = 'seed: {
        for a in 0i64..8 {
            for b in 0i64..8 {
                let c = E2::new(a, b);
                if c.is_unit() && pair_mod(&c.mul(&c), 3) == pair_mod(u, 3) {
                    break 'seed c;
                }
            }
        }
        return None;
    };
    let mut j = 3u32;
    while j < k {
        let target = pair_mod_big(u, j + 1);
        let step = big_pow(2, j - 1);
        let mut found = false;
        for (ea, eb) in [(0i64, 0i64), (1, 0), (0, 1), (1, 1)] {
            let cand = y.add(&E2::new(ea, eb).scale(&step));
            if pair_mod_big(&cand.mul(&cand), j + 1) == target {
                y = cand.reduce_mod(j + 1);
                found = true;
                break;
            }
        }
        if !found {
            return None;
        }
        j += 1;
    }
    Some(y.reduce_mod(k))
}

fn pair_mod_big(x: &E2, k: u32) -> (BigInt, BigInt) {
    let r = x.reduce_mod(k);
    (r.a, r.b)
}

/// Fourth root of a unit fourth power mod 2^k. Of the two square roots +-s of
/// the element, exactly one is itself a square (-1 is not a square here).
pub(crate) fn fourth_root_unit_e2(u: &E2, k: u32) -> Option<E2> {
    if !unit_is_fourth_e2(u) {
        return None;
    }
    let kk = k.max(5);
    let s = sqrt_unit_e2(&u.reduce_mod(kk), kk)?;
    let neg_s = E2::zero().add(&s.scale(&BigInt::from(-1))).reduce_mod(kk);
    let cand = if unit_is_square_e2(&s) { s } else { neg_s };
    let r = sqrt_unit_e2(&cand, kk)?;
    Some(r.reduce_mod(k))
}

pub(crate) struct OutcomeExt {
    pub verdict: Verdict,
    pub evidence: Evidence,
    pub depth_used: u32,
}

/// Solvability of d y^2 = d^2 + e x^4 over the unramified quadratic
/// extension of Q_2. Same window-and-refinement scheme as the rational case
/// with the wild margin 3; unit discs live in the ring of pairs mod 2^j.
pub(crate) fn solve_ext2(d: i64, e: i64, cap: u32) -> OutcomeExt {
    let (e0, f) = strip_fourth(e);
    let d_big = BigInt::from(d);
    let e_big = BigInt::from(e);
    let e0_big = BigInt::from(e0);
    let scale = BigInt::from(f);

    // x = 0: d a square in the extension
    if is_square_ext(&E2::from_int(&d_big), &BigInt::one()) {
        return OutcomeExt {
            verdict: Verdict::Solvable,
            evidence: affine_witness_ext(d, e, &E2::zero(), &BigInt::one()),
            depth_used: 0,
        };
    }
    // infinity: e/d a square in the extension
    if is_square_ext(&E2::from_int(&e_big), &d_big) {
        let vx = val_of(&e_big, 2) as i64 - val_of(&d_big, 2) as i64;
        let prec = 10u32;
        let den_odd = &d_big / big_pow(2, val_of(&d_big, 2));
        let num_odd = &e_big / big_pow(2, val_of(&e_big, 2));
        let m = big_pow(2, prec);
        let dinv = mod_inv(&mod_pos(&den_odd, &m), &m).unwrap();
        let unit = E2::from_int(&num_odd).scale(&dinv).reduce_mod(prec);
        let root = sqrt_unit_e2(&unit, prec).expect("certified square");
        return OutcomeExt {
            verdict: Verdict::Solvable,
            evidence: Evidence::InfinityWitness {
                sqrt_val: vx / 2,
                sqrt_unit: root.to_string_compact(),
                precision: prec,
            },
            depth_used: 0,
        };
    }
    // y = 0: -d^2/e a fourth power in the extension
    let md2 = -(&d_big * &d_big);
    if is_fourth_ext(&E2::from_int(&md2), &e_big) {
        let v = val_of(&md2, 2) as i64 - val_of(&e_big, 2) as i64;
        let prec = 10u32;
        let m = big_pow(2, prec);
        let num_odd = &md2 / big_pow(2, val_of(&md2, 2));
        let den_odd = &e_big / big_pow(2, val_of(&e_big, 2));
        let dinv = mod_inv(&mod_pos(&den_odd, &m), &m).unwrap();
        let unit = E2::from_int(&num_odd).scale(&dinv).reduce_mod(prec);
        let root = fourth_root_unit_e2(&unit, prec).expect("certified fourth power");
        return OutcomeExt {
            verdict: Verdict::Solvable,
            evidence: Evidence::QuarticRootWitness {
                x_val: v / 4,
                x_unit: root.to_string_compact(),
                precision: prec,
            },
            depth_used: 0,
        };
    }

    let mu = 3i64;
    let vd = val_of(&d_big, 2) as i64;
    let ve = val_of(&e0_big, 2) as i64;
    let center = 2 * vd - ve;
    let m_lo = (center - mu).div_euclid(4) + i64::from((center - mu).rem_euclid(4) != 0);
    let m_hi = (center + mu).div_euclid(4);

    let mut max_depth = 0u32;
    let mut all_odd = true;
    for m in m_lo..=m_hi {
        let (a_c, b_c) = coefficients_ext(&d_big, &e0_big, m);
        let vb = val_of(&b_c, 2);
        // breadth-first over unit residue discs of the ring
        let mut queue: Vec<(E2, u32)> =
            vec![(E2::new(1, 0), 1), (E2::new(0, 1), 1), (E2::new(1, 1), 1)];
        while let Some((u0, j)) = queue.pop() {
            max_depth = max_depth.max(j);
            let value = E2::from_int(&a_c).add(&u0.pow4().scale(&b_c));
            if value.is_zero() {
                return OutcomeExt {
                    verdict: Verdict::Solvable,
                    evidence: Evidence::QuarticRootWitness {
                        x_val: m,
                        x_unit: u0.to_string_compact(),
                        precision: j,
                    },
                    depth_used: max_depth,
                };
            }
            if is_square_ext(&value, &BigInt::one()) {
                let (xe, xd) = search_x_ext(&scale, m, &u0);
                return OutcomeExt {
                    verdict: Verdict::Solvable,
                    evidence: affine_witness_ext(d, e, &xe, &xd),
                    depth_used: max_depth,
                };
            }
            let w = value.val2().unwrap();
            if vb + j + 2 >= w + 3 {
                all_odd &= w % 2 == 1;
                continue;
            }
            if j + 1 > cap {
                return OutcomeExt {
                    verdict: Verdict::Undecided,
                    evidence: Evidence::DepthCapReached,
                    depth_used: j,
                };
            }
            let step = big_pow(2, j);
            for (ea, eb) in [(0i64, 0i64), (1, 0), (0, 1), (1, 1)] {
                queue.push((u0.add(&E2::new(ea, eb).scale(&step)), j + 1));
            }
        }
    }
    let parity_note = if all_odd && m_lo <= m_hi {
        Some("every residue disc gives a value of odd valuation".to_string())
    } else {
        None
    };
    OutcomeExt {
        verdict: Verdict::Unsolvable,
        evidence: Evidence::ResidueExhaustion {
            max_depth,
            parity_note,
        },
        depth_used: max_depth,
    }
}

fn coefficients_ext(d: &BigInt, e0: &BigInt, m: i64) -> (BigInt, BigInt) {
    let d3 = d * d * d;
    if m >= 0 {
        (d3, d * e0 * big_pow(2, 4 * m as u32))
    } else {
        (d3 * big_pow(2, (-4 * m) as u32), d * e0)
    }
}

fn search_x_ext(scale: &BigInt, m: i64, u: &E2) -> (E2, BigInt) {
    if m >= 0 {
        (u.scale(&big_pow(2, m as u32)), scale.clone())
    } else {
        (u.clone(), big_pow(2, (-m) as u32) * scale)
    }
}

/// y^2 = (d^2 + e x^4)/d for exact x = xe/xd in the extension.
fn affine_witness_ext(d: i64, e: i64, xe: &E2, xd: &BigInt) -> Evidence {
    let d_big = BigInt::from(d);
    let e_big = BigInt::from(e);
    let xd4 = xd.pow(4);
    let num = E2::from_int(&(&d_big * &d_big * &xd4))
        .add(&xe.pow4().scale(&e_big))
        .scale(&d_big);
    let den = &d_big * &d_big * xd4;
    debug_assert!(is_square_ext(&num, &den));
    let vt = num.val2().unwrap() as i64 - val_of(&den, 2) as i64;
    debug_assert!(vt % 2 == 0);
    let y_val = vt / 2;
    let margin = (2 * (1 + val_of(&d_big, 2) as i64 + y_val) + 1).max(1) as u32;
    let prec = margin.max(3) + 2;
    let m = big_pow(2, prec);
    let num_unit = num.shr2(num.val2().unwrap());
    let den_odd = &den / big_pow(2, val_of(&den, 2));
    let dinv = mod_inv(&mod_pos(&den_odd, &m), &m).unwrap();
    let unit = num_unit.scale(&dinv).reduce_mod(prec);
    let y_unit = sqrt_unit_e2(&unit, prec).expect("certified square");
    Evidence::AffineWitness {
        x_num: xe.to_string_compact(),
        x_den: xd.to_string(),
        y_val,
        y_unit: y_unit.to_string_compact(),
        precision: prec,
        hensel_margin: margin,
    }
}

/// Exhaustive deeper re-check of an extension-field exclusion.
pub(crate) fn revalidate_exhaustion_ext2(
    d: i64,
    e: i64,
    depth: u32,
    budget: u64,
) -> Result<(), String> {
    let (e0, _) = strip_fourth(e);
    let d_big = BigInt::from(d);
    let e_big = BigInt::from(e);
    let e0_big = BigInt::from(e0);
    if is_square_ext(&E2::from_int(&d_big), &BigInt::one()) {
        return Err("x = 0 gives a point".into());
    }
    if is_square_ext(&E2::from_int(&e_big), &d_big) {
        return Err("points at infinity exist".into());
    }
    let md2 = -(&d_big * &d_big);
    if is_fourth_ext(&E2::from_int(&md2), &e_big) {
        return Err("a y = 0 point exists".into());
    }
    let mu = 3i64;
    let vd = val_of(&d_big, 2) as i64;
    let ve = val_of(&e0_big, 2) as i64;
    let center = 2 * vd - ve;
    let m_lo = (center - mu).div_euclid(4) + i64::from((center - mu).rem_euclid(4) != 0);
    let m_hi = (center + mu).div_euclid(4);
    let j = depth + 1;
    let count = 3u128 * 4u128.pow(j - 1) * (m_hi - m_lo + 1).max(0) as u128;
    if count > budget as u128 {
        return Err(format!(
            "revalidation sweep of {} discs exceeds budget {}",
            count, budget
        ));
    }
    let modulus = big_pow(2, j);
    for m in m_lo..=m_hi {
        let (a_c, b_c) = coefficients_ext(&d_big, &e0_big, m);
        let mut a = BigInt::zero();
        while a < modulus {
            let mut b = BigInt::zero();
            while b < modulus {
                let u = E2 {
                    a: a.clone(),
                    b: b.clone(),
                };
                if u.is_unit() {
                    let value = E2::from_int(&a_c).add(&u.pow4().scale(&b_c));
                    if value.is_zero() || is_square_ext(&value, &BigInt::one()) {
                        return Err(format!(
                            "residue u = {} at valuation {} yields a square value",
                            u.to_string_compact(),
                            m
                        ));
                    }
                }
                b += 1;
            }
            a += 1;
        }
    }
    Ok(())
}
