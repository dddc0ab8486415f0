//! Exact integer number theory kernel: primality, factorization, squarefree
//! decomposition, Jacobi/Legendre symbols, fundamental discriminants.
//!
//! Everything here is deterministic. Primality below 2^64 is decided exactly
//! by Miller–Rabin with the 12-witness set {2, 3, ..., 37}; since the public
//! API takes `u64`, every input is decided exactly, never probabilistically.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum ArithError {
    #[error("input must be nonzero")]
    ZeroInput,
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("modulus {0} must be odd and positive")]
    BadModulus(i64),
    #[error("square-class multiplication overflowed i64: {0} * {1}")]
    Overflow(i64, i64),
    #[error("input {0} out of range for this operation")]
    OutOfRange(i64),
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality for all `u64` inputs.
///
/// Miller–Rabin with the witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37},
/// which is known to be exact below 2^64. Returns false for 0 and 1.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Sign and exact prime factorization of a nonzero integer.
///
/// Primes are strictly increasing and each passes [`is_prime`]; the signed
/// product of prime powers reconstructs the input exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactoredInteger {
    pub sign: i8,
    pub factors: Vec<(u64, u32)>,
}

impl FactoredInteger {
    pub fn reconstruct(&self) -> i64 {
        let mut acc: i64 = self.sign as i64;
        for &(p, e) in &self.factors {
            for _ in 0..e {
                acc *= p as i64;
            }
        }
        acc
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

fn pollard_brent(n: u64, c: u64) -> Option<u64> {
    // Brent's cycle variant of Pollard rho with fixed parameters, so the
    // whole factorization is deterministic.
    let f = |x: u64| (mulmod(x, x, n) + c) % n;
    let mut y = 2u64;
    let mut r = 1u64;
    let mut q = 1u64;
    let (mut x, mut ys) = (0u64, 0u64);
    let mut g = 1u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0u64;
        while k < r && g == 1 {
            ys = y;
            let lim = 128.min(r - k);
            for _ in 0..lim {
                y = f(y);
                q = mulmod(q, x.abs_diff(y), n);
            }
            g = gcd_u64(q, n);
            k += lim;
        }
        r *= 2;
        if r > 1 << 24 {
            return None;
        }
    }
    if g == n {
        // backtrack
        loop {
            ys = f(ys);
            g = gcd_u64(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n {
        None
    } else {
        Some(g)
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd_u64(a.unsigned_abs(), b.unsigned_abs()) as i64
}

fn factor_u64_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let mut m = n;
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while m.is_multiple_of(p) {
            out.push(p);
            m /= p;
        }
    }
    // trial division up to 2^16, enough that rho only ever sees semiprime-ish
    // leftovers of size up to ~10^12 in this artifact
    let mut d = 49u64;
    while d <= 1 << 16 && d * d <= m {
        while m.is_multiple_of(d) {
            out.push(d);
            m /= d;
        }
        d += 2;
    }
    if m == 1 {
        return;
    }
    if is_prime(m) {
        out.push(m);
        return;
    }
    if d * d > m {
        // composite smaller than d^2 cannot survive trial division
        out.push(m);
        return;
    }
    for c in 1..64 {
        if let Some(g) = pollard_brent(m, c) {
            factor_u64_into(g, out);
            factor_u64_into(m / g, out);
            return;
        }
    }
    // unreachable for inputs below 2^63; keep the factor rather than lose it
    out.push(m);
}

/// Exact factorization of a nonzero integer. Deterministic.
pub fn factor(n: i64) -> Result<FactoredInteger, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroInput);
    }
    let sign: i8 = if n < 0 { -1 } else { 1 };
    let mut primes = Vec::new();
    factor_u64_into(n.unsigned_abs(), &mut primes);
    primes.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some(last) if last.0 == p => last.1 += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(FactoredInteger { sign, factors })
}

/// A nonzero squarefree integer representing a class in Q^x / (Q^x)^2.
///
/// The sign is part of the class: -1 is a nontrivial class. Two classes are
/// equal iff their representatives are equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SquareClass(i64);

impl SquareClass {
    /// Canonicalize a nonzero integer into its square class.
    pub fn new(n: i64) -> Result<Self, ArithError> {
        squarefree_class(n)
    }

    /// The unit class.
    pub const ONE: SquareClass = SquareClass(1);

    pub fn rep(&self) -> i64 {
        self.0
    }

    /// Class multiplication: the squarefree part of the product.
    ///
    /// Both inputs are squarefree, so after cancelling the shared part the
    /// remaining cofactors are coprime and the product is squarefree again.
    pub fn mul(&self, other: &SquareClass) -> Result<SquareClass, ArithError> {
        let g = gcd_i64(self.0, other.0);
        let a = self.0 / g;
        let b = other.0 / g;
        let prod = (a as i128) * (b as i128);
        let rep = i64::try_from(prod).map_err(|_| ArithError::Overflow(self.0, other.0))?;
        Ok(SquareClass(rep))
    }

    pub fn is_one(&self) -> bool {
        self.0 == 1
    }
}

impl std::fmt::Display for SquareClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl PartialOrd for SquareClass {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SquareClass {
    /// Canonical listing order: 1, -1, 2, -2, 3, -3, ...
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.0.unsigned_abs(), self.0 < 0).cmp(&(other.0.unsigned_abs(), other.0 < 0))
    }
}

/// Squarefree part of a nonzero integer, with sign. Idempotent.
pub fn squarefree_class(n: i64) -> Result<SquareClass, ArithError> {
    let f = factor(n)?;
    let mut rep: i64 = f.sign as i64;
    for &(p, e) in &f.factors {
        if e & 1 == 1 {
            rep = rep
                .checked_mul(p as i64)
                .ok_or(ArithError::Overflow(n, p as i64))?;
        }
    }
    Ok(SquareClass(rep))
}

/// True iff n is a perfect square of an integer (0 and 1 count).
pub fn is_perfect_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = (n as f64).sqrt().round() as i64;
    for c in [r - 1, r, r + 1] {
        if c >= 0 && c.checked_mul(c) == Some(n) {
            return true;
        }
    }
    false
}

/// Jacobi symbol (a/n) for odd positive n.
///
/// Equals the Legendre symbol when n is an odd prime; 0 iff gcd(a, n) > 1.
pub fn jacobi(a: i64, n: i64) -> Result<i32, ArithError> {
    if n <= 0 || n & 1 == 0 {
        return Err(ArithError::BadModulus(n));
    }
    let mut n = n as u64;
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut t: i32 = 1;
    while a != 0 {
        while a & 1 == 0 {
            a >>= 1;
            let r = n & 7;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a & 3 == 3 && n & 3 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        Ok(t)
    } else {
        Ok(0)
    }
}

/// Discriminant of Q(sqrt(D)) for squarefree D != 0, 1: D if D = 1 mod 4, else 4D.
pub fn fundamental_discriminant(d: i64) -> Result<i64, ArithError> {
    if d == 0 {
        return Err(ArithError::ZeroInput);
    }
    if d == 1 {
        return Err(ArithError::OutOfRange(1));
    }
    if !factor(d)?.is_squarefree() {
        return Err(ArithError::NotSquarefree(d));
    }
    if d.rem_euclid(4) == 1 {
        Ok(d)
    } else {
        Ok(4 * d)
    }
}

/// Odd prime divisors of n, ascending.
pub fn odd_prime_divisors(n: i64) -> Result<Vec<u64>, ArithError> {
    Ok(factor(n)?
        .factors
        .into_iter()
        .map(|(p, _)| p)
        .filter(|&p| p != 2)
        .collect())
}
