//! BigInt p-adic helpers: valuations, unit parts, squareness and fourth-power
//! tests with their Hensel-certified moduli, and square-root lifting for
//! witness construction.
//!
//! A unit of Z_p is a square iff it is a square mod p^(2e+1) where e = v_p(2),
//! i.e. mod p for odd p and mod 8 for p = 2. Fourth powers need mod p
//! (odd p) resp. mod 16 (p = 2). All tests here take exact integers or exact
//! rationals, so a positive answer is a genuine statement about Q_p.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub(crate) fn big_pow(p: u64, k: u32) -> BigInt {
    BigInt::from(p).pow(k)
}

/// p-adic valuation of a nonzero integer.
pub(crate) fn val_of(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut v = 0u32;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(&p);
        if r.is_zero() {
            v += 1;
            m = q;
        } else {
            return v;
        }
    }
}

pub(crate) fn split_unit(n: &BigInt, p: u64) -> (u32, BigInt) {
    let v = val_of(n, p);
    (v, n / big_pow(p, v))
}

pub(crate) fn mod_pos(n: &BigInt, m: &BigInt) -> BigInt {
    let r = n % m;
    if r.is_negative() {
        r + m
    } else {
        r
    }
}

pub(crate) fn mod_inv(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if e.gcd.is_one() {
        Some(mod_pos(&e.x, m))
    } else {
        None
    }
}

fn powmod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = ((acc as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Legendre symbol of a unit mod an odd prime, by Euler's criterion.
pub(crate) fn legendre_u64(a: u64, p: u64) -> i32 {
    let a = a % p;
    debug_assert!(a != 0);
    if powmod_u64(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

pub(crate) fn big_mod_u64(n: &BigInt, m: u64) -> u64 {
    let r = mod_pos(n, &BigInt::from(m));
    let digits = r.to_u64_digits().1;
    digits.first().copied().unwrap_or(0)
}

/// Is this unit of Z_p a square? Decided mod p (odd p) or mod 8 (p = 2).
pub(crate) fn unit_is_square(u: &BigInt, p: u64) -> bool {
    if p == 2 {
        big_mod_u64(u, 8) == 1
    } else {
        legendre_u64(big_mod_u64(u, p), p) == 1
    }
}

/// Is this unit of Z_p a fourth power? Decided mod p (odd p) or mod 16 (p = 2).
pub(crate) fn unit_is_fourth(u: &BigInt, p: u64) -> bool {
    if p == 2 {
        big_mod_u64(u, 16) == 1
    } else {
        let g = num_integer::gcd(4u64, p - 1);
        powmod_u64(big_mod_u64(u, p), (p - 1) / g, p) == 1
    }
}

/// Exact valuation and unit data of a nonzero rational num/den at p.
pub(crate) struct RatSplit {
    pub val: i64,
    pub num_unit: BigInt,
    pub den_unit: BigInt,
}

pub(crate) fn rat_split(num: &BigInt, den: &BigInt, p: u64) -> RatSplit {
    let (vn, nu) = split_unit(num, p);
    let (vd, du) = split_unit(den, p);
    RatSplit {
        val: vn as i64 - vd as i64,
        num_unit: nu,
        den_unit: du,
    }
}

/// Unit part of num/den modulo p^k (both inputs nonzero).
pub(crate) fn rat_unit_mod(num: &BigInt, den: &BigInt, p: u64, k: u32) -> BigInt {
    let s = rat_split(num, den, p);
    let m = big_pow(p, k);
    let inv = mod_inv(&mod_pos(&s.den_unit, &m), &m).expect("den unit invertible");
    mod_pos(&(s.num_unit * inv), &m)
}

/// Is the exact rational num/den a square in Q_p?
pub(crate) fn rat_is_square(num: &BigInt, den: &BigInt, p: u64) -> bool {
    if num.is_zero() {
        return true;
    }
    let s = rat_split(num, den, p);
    if s.val.rem_euclid(2) != 0 {
        return false;
    }
    let k = if p == 2 { 3 } else { 1 };
    let m = big_pow(p, k);
    let inv = mod_inv(&mod_pos(&s.den_unit, &m), &m).expect("den unit invertible");
    unit_is_square(&mod_pos(&(s.num_unit * inv), &m), p)
}

/// Is the exact rational num/den a fourth power in Q_p?
pub(crate) fn rat_is_fourth(num: &BigInt, den: &BigInt, p: u64) -> bool {
    if num.is_zero() {
        return true;
    }
    let s = rat_split(num, den, p);
    if s.val.rem_euclid(4) != 0 {
        return false;
    }
    let k = if p == 2 { 4 } else { 1 };
    let m = big_pow(p, k);
    let inv = mod_inv(&mod_pos(&s.den_unit, &m), &m).expect("den unit invertible");
    unit_is_fourth(&mod_pos(&(s.num_unit * inv), &m), p)
}

/// Tonelli–Shanks square root mod an odd prime.
pub(crate) fn sqrt_mod_p(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if legendre_u64(a, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(powmod_u64(a, (p + 1) / 4, p));
    }
    // write p - 1 = q * 2^s with q odd
    let mut q = p - 1;
    let mut s = 0u32;
    while q & 1 == 0 {
        q >>= 1;
        s += 1;
    }
    // find a quadratic non-residue
    let mut z = 2u64;
    while legendre_u64(z, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = powmod_u64(z, q, p);
    let mut t = powmod_u64(a, q, p);
    let mut r = powmod_u64(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0u32;
        let mut t2 = t;
        while t2 != 1 {
            t2 = ((t2 as u128 * t2 as u128) % p as u128) as u64;
            i += 1;
            if i == m {
                return None;
            }
        }
        let mut b = c;
        for _ in 0..(m - i - 1) {
            b = ((b as u128 * b as u128) % p as u128) as u64;
        }
        m = i;
        c = ((b as u128 * b as u128) % p as u128) as u64;
        t = ((t as u128 * c as u128) % p as u128) as u64;
        r = ((r as u128 * b as u128) % p as u128) as u64;
    }
    Some(r)
}

/// Square root of a unit square mod p^k, by Tonelli–Shanks then Hensel lifting.
pub(crate) fn lift_sqrt(u: &BigInt, p: u64, k: u32) -> Option<BigInt> {
    if !unit_is_square(u, p) {
        return None;
    }
    if p == 2 {
        // u = 1 mod 8; lift bit by bit from y = 1
        let mut y = BigInt::one();
        let mut j = 3u32;
        while j < k {
            let m_next = big_pow(2, j + 1);
            if mod_pos(&(&y * &y - u), &m_next).is_zero() {
                j += 1;
                continue;
            }
            y += big_pow(2, j - 1);
            debug_assert!(mod_pos(&(&y * &y - u), &m_next).is_zero());
            j += 1;
        }
        Some(mod_pos(&y, &big_pow(2, k)))
    } else {
        let y0 = sqrt_mod_p(big_mod_u64(u, p), p)?;
        // Newton iteration y <- y - (y^2 - u) / (2y), doubling precision
        let mut y = BigInt::from(y0);
        let mut prec = 1u32;
        while prec < k {
            let next = (prec * 2).min(k);
            let m = big_pow(p, next);
            let inv2y = mod_inv(&mod_pos(&(BigInt::from(2) * &y), &m), &m)?;
            y = mod_pos(&(&y - (&y * &y - u) * inv2y), &m);
            prec = next;
        }
        debug_assert!(mod_pos(&(&y * &y - u), &big_pow(p, k)).is_zero());
        Some(y)
    }
}

/// Fourth root of a unit fourth-power mod p^k, as two nested square roots.
pub(crate) fn lift_fourth_root(u: &BigInt, p: u64, k: u32) -> Option<BigInt> {
    if !unit_is_fourth(u, p) {
        return None;
    }
    let kk = k.max(5);
    let t = lift_sqrt(u, p, kk)?;
    let m = big_pow(p, kk);
    // one of +-t is itself a unit square
    let cand = if unit_is_square(&t, p) {
        t
    } else {
        mod_pos(&(-t), &m)
    };
    let r = lift_sqrt(&cand, p, kk)?;
    Some(mod_pos(&r, &big_pow(p, k)))
}
