//! Exact modular arithmetic primitives: deterministic primality, the Jacobi
//! symbol, square roots modulo an odd prime, and root finding for small
//! integer polynomials mod p.
//!
//! Everything here is pure and overflow-checked; 64-bit inputs are widened to
//! 128 bits before multiplication.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Below this bound, polynomial roots mod p are found by exhaustive
/// evaluation of all residues.
pub const POLY_EXHAUSTIVE_LIMIT: u64 = 1 << 20;

/// A positive integer that passed the deterministic primality check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Prime(u64);

impl Prime {
    /// Validate `value` with the deterministic Miller-Rabin test.
    pub fn new(value: u64) -> Result<Prime> {
        if is_prime(value) {
            Ok(Prime(value))
        } else {
            Err(Error::NotPrime(value))
        }
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_odd(self) -> bool {
        self.0 % 2 == 1
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, base, m);
        }
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Modular inverse of `a` mod prime `p` by Fermat's little theorem.
fn mod_inv(a: u64, p: u64) -> u64 {
    mod_pow(a, p - 2, p)
}

/// (a - b) mod m without intermediate overflow; inputs already reduced.
fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + (m - b)
    }
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Deterministic primality test for the full u64 range.
///
/// Miller-Rabin with the witness set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29,
/// 31, 37}, which is known to be exact for all inputs below 3.3 * 10^24, so
/// there are no probabilistic false positives at this width.
pub fn is_prime(m: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if m < 2 {
        return false;
    }
    for w in WITNESSES {
        if m == w {
            return true;
        }
        if m % w == 0 {
            return false;
        }
    }
    let s = (m - 1).trailing_zeros();
    let d = (m - 1) >> s;
    'witness: for w in WITNESSES {
        let mut x = mod_pow(w, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, m);
            if x == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The Jacobi symbol (a / m) for odd positive m.
///
/// Equals the Legendre symbol when m is an odd prime; 0 iff gcd(a, m) > 1.
/// Completely multiplicative in the top argument.
pub fn jacobi(a: i64, m: u64) -> Result<i32> {
    if m == 0 || m % 2 == 0 {
        return Err(Error::BadJacobiModulus(m));
    }
    let mut num = (a as i128).rem_euclid(m as i128) as u64;
    let mut den = m;
    let mut sign = 1i32;
    while num != 0 {
        while num % 2 == 0 {
            num /= 2;
            if matches!(den % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut num, &mut den);
        if num % 4 == 3 && den % 4 == 3 {
            sign = -sign;
        }
        num %= den;
    }
    Ok(if den == 1 { sign } else { 0 })
}

/// A square root of `a` modulo the odd prime `p`, if one exists.
///
/// Uses the p = 3 mod 4 shortcut and Tonelli-Shanks otherwise. The returned
/// root is canonical: the smaller of the two, so 0 <= r <= (p-1)/2.
pub fn sqrt_mod_p(a: i64, p: Prime) -> Option<u64> {
    let p = p.value();
    assert!(p % 2 == 1, "sqrt_mod_p requires an odd prime");
    sqrt_mod_p_u64((a as i128).rem_euclid(p as i128) as u64, p)
}

fn sqrt_mod_p_u64(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if mod_pow(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    let root = if p % 4 == 3 {
        mod_pow(a, (p + 1) / 4, p)
    } else {
        tonelli_shanks(a, p)
    };
    debug_assert_eq!(mod_mul(root, root, p), a);
    Some(root.min(p - root))
}

fn tonelli_shanks(a: u64, p: u64) -> u64 {
    // p - 1 = q * 2^s with q odd; a is a known residue.
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    // Smallest quadratic non-residue; the scan is deterministic and short.
    let mut z = 2;
    while mod_pow(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(a, q, p);
    let mut r = mod_pow(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mod_mul(t2, t2, p);
            i += 1;
        }
        let mut b = c;
        for _ in 0..m - i - 1 {
            b = mod_mul(b, b, p);
        }
        m = i;
        c = mod_mul(b, b, p);
        t = mod_mul(t, c, p);
        r = mod_mul(r, b, p);
    }
    r
}

/// An integer polynomial stored by ascending-degree coefficients.
///
/// The leading coefficient is nonzero unless the polynomial is identically
/// zero (the constructor trims).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    /// Build from ascending-degree coefficients; trailing zeros are dropped.
    pub fn new(mut coeffs: Vec<i64>) -> IntPolynomial {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Evaluate at `x` modulo `m` by Horner's rule.
    pub fn eval_mod(&self, x: u64, m: u64) -> u64 {
        let x = x % m;
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            let c = (c as i128).rem_euclid(m as i128) as u64;
            acc = (mod_mul(acc, x, m) + c) % m;
        }
        acc
    }

    fn coeffs_mod(&self, m: u64) -> Vec<u64> {
        self.coeffs
            .iter()
            .map(|&c| (c as i128).rem_euclid(m as i128) as u64)
            .collect()
    }

    /// The polynomial discriminant, computed exactly as
    /// (-1)^(d(d-1)/2) * Res(f, f') / lc(f) with the resultant evaluated as a
    /// Sylvester determinant (fraction-free elimination in 128-bit integers).
    pub fn discriminant(&self) -> Result<i128> {
        let d = self.degree().filter(|&d| d >= 1).ok_or(Error::ConstantPolynomial)?;
        let f: Vec<i128> = self.coeffs.iter().map(|&c| c as i128).collect();
        let mut fp: Vec<i128> = Vec::with_capacity(d);
        for (k, &c) in f.iter().enumerate().skip(1) {
            fp.push(
                c.checked_mul(k as i128)
                    .ok_or(Error::Overflow("polynomial derivative"))?,
            );
        }
        while fp.last() == Some(&0) {
            fp.pop();
        }
        if fp.is_empty() {
            // f' = 0 forces a repeated root, so the discriminant vanishes.
            return Ok(0);
        }
        let e = fp.len() - 1;
        let size = d + e;
        // Sylvester matrix: e shifted rows of f, then d shifted rows of f',
        // coefficients in descending order.
        let mut mat = vec![vec![0i128; size]; size];
        for row in 0..e {
            for (k, &c) in f.iter().rev().enumerate() {
                mat[row][row + k] = c;
            }
        }
        for row in 0..d {
            for (k, &c) in fp.iter().rev().enumerate() {
                mat[e + row][row + k] = c;
            }
        }
        let res = bareiss_determinant(mat)?;
        let lead = f[d];
        if res % lead != 0 {
            return Err(Error::Consistency(
                "resultant not divisible by leading coefficient".into(),
            ));
        }
        let sign = if (d * (d - 1) / 2) % 2 == 0 { 1 } else { -1 };
        Ok(sign * (res / lead))
    }
}

/// Exact determinant by Bareiss fraction-free elimination.
fn bareiss_determinant(mut m: Vec<Vec<i128>>) -> Result<i128> {
    let n = m.len();
    if n == 0 {
        return Ok(1);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            let Some(swap) = (k + 1..n).find(|&i| m[i][k] != 0) else {
                return Ok(0);
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let lhs = m[i][j]
                    .checked_mul(m[k][k])
                    .ok_or(Error::Overflow("determinant"))?;
                let rhs = m[i][k]
                    .checked_mul(m[k][j])
                    .ok_or(Error::Overflow("determinant"))?;
                let num = lhs.checked_sub(rhs).ok_or(Error::Overflow("determinant"))?;
                m[i][j] = num / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    Ok(sign * m[n - 1][n - 1])
}

/// The complete set of roots of `f` modulo the odd prime `p`, each in
/// [0, p-1].
///
/// Below [`POLY_EXHAUSTIVE_LIMIT`] every residue is evaluated. Above it only
/// quartics of the shape a(x^2+1)^2 + e are supported; these decompose into
/// two nested square root extractions. Anything else is rejected with a
/// bound error rather than silently left incomplete.
pub fn poly_roots_mod_p(f: &IntPolynomial, p: Prime) -> Result<BTreeSet<u64>> {
    let pv = p.value();
    assert!(pv % 2 == 1, "poly_roots_mod_p requires an odd prime");
    let cm = f.coeffs_mod(pv);
    if cm.iter().all(|&c| c == 0) {
        return Err(Error::ZeroPolynomialMod(pv));
    }
    if pv < POLY_EXHAUSTIVE_LIMIT {
        return Ok((0..pv).filter(|&x| f.eval_mod(x, pv) == 0).collect());
    }
    // a(x^2+1)^2 + e has reduced coefficients (a+e, 0, 2a, 0, a).
    if cm.len() == 5 && cm[1] == 0 && cm[3] == 0 && cm[2] == mod_mul(2, cm[4], pv) {
        let a = cm[4];
        let e = sub_mod(cm[0], a, pv);
        // Roots satisfy (x^2+1)^2 = -e/a mod p.
        let target = mod_mul(sub_mod(0, e, pv), mod_inv(a, pv), pv);
        let mut roots = BTreeSet::new();
        if let Some(s) = sqrt_mod_p_u64(target, pv) {
            let mut inner = vec![s];
            if s != 0 {
                inner.push(pv - s);
            }
            for t in inner {
                // x^2 = t - 1 mod p.
                if let Some(r) = sqrt_mod_p_u64(sub_mod(t, 1, pv), pv) {
                    roots.insert(r);
                    roots.insert(sub_mod(0, r, pv));
                }
            }
        }
        debug_assert!(roots.iter().all(|&r| f.eval_mod(r, pv) == 0));
        return Ok(roots);
    }
    Err(Error::RootBoundExceeded { p: pv })
}

/// All primes up to and including `n`, by a plain sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(i, &keep)| keep.then_some(i as u64))
        .collect()
}
