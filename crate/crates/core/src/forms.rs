//! Integral binary quadratic forms ax^2 + bxy + cy^2 in the positive
//! definite regime (negative discriminant, a > 0).
//!
//! Provides Gauss reduction to the unique reduced representative of each
//! proper equivalence class, enumeration of all reduced forms of a
//! discriminant, representation search with canonical witnesses, and the
//! represented-residue sets that drive genus theory.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numtheory::gcd_u64;

/// A negative discriminant congruent to 0 or 1 mod 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(d: i64) -> Result<Discriminant> {
        if d < 0 && matches!(d.rem_euclid(4), 0 | 1) {
            Ok(Discriminant(d))
        } else {
            Err(Error::BadDiscriminant(d))
        }
    }

    /// The discriminant -4n of the principal form x^2 + ny^2.
    pub fn from_n(n: u64) -> Result<Discriminant> {
        if n == 0 {
            return Err(Error::BadDiscriminant(0));
        }
        let d = (n as i128) * -4;
        if d < i64::MIN as i128 {
            return Err(Error::Overflow("discriminant -4n"));
        }
        Ok(Discriminant(d as i64))
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn unsigned_abs(self) -> u64 {
        self.0.unsigned_abs()
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A positive definite integral binary quadratic form (a, b, c).
///
/// Construction enforces a > 0 and b^2 - 4ac < 0; primitivity is a queryable
/// predicate rather than an invariant, so imprimitive forms are constructible
/// but rejected by reduction and enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuadForm {
    a: i64,
    b: i64,
    c: i64,
}

impl Serialize for QuadForm {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        (self.a, self.b, self.c).serialize(serializer)
    }
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<QuadForm> {
        let disc = (b as i128) * (b as i128) - 4 * (a as i128) * (c as i128);
        if a <= 0 || disc >= 0 {
            return Err(Error::NotPositiveDefinite { a, b, c });
        }
        if disc < i64::MIN as i128 {
            return Err(Error::Overflow("form discriminant"));
        }
        Ok(QuadForm { a, b, c })
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    /// b^2 - 4ac; always negative here.
    pub fn discriminant(&self) -> Discriminant {
        let d = (self.b as i128) * (self.b as i128) - 4 * (self.a as i128) * (self.c as i128);
        Discriminant(d as i64)
    }

    /// gcd(a, b, c) = 1.
    pub fn is_primitive(&self) -> bool {
        gcd_u64(
            gcd_u64(self.a.unsigned_abs(), self.b.unsigned_abs()),
            self.c.unsigned_abs(),
        ) == 1
    }

    /// |b| <= a <= c, with b >= 0 whenever |b| = a or a = c.
    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && (b >= 0 || (b.abs() != a && a != c))
    }

    /// Evaluate the form at (x, y) in 128-bit arithmetic.
    ///
    /// Callers keep |x|, |y| within the representation search bounds, so the
    /// products stay far below 128 bits.
    pub fn eval(&self, x: i64, y: i64) -> i128 {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let (x, y) = (x as i128, y as i128);
        a * x * x + b * x * y + c * y * y
    }

    fn eval_mod(&self, x: u64, y: u64, m: u64) -> u64 {
        let red = |v: i64| (v as i128).rem_euclid(m as i128) as u128;
        let m128 = m as u128;
        let (x, y) = (x as u128 % m128, y as u128 % m128);
        let t1 = red(self.a) * (x * x % m128) % m128;
        let t2 = red(self.b) * (x * y % m128) % m128;
        let t3 = red(self.c) * (y * y % m128) % m128;
        ((t1 + t2 + t3) % m128) as u64
    }

    /// The form f(px + qy, rx + sy) obtained by substituting `map`.
    pub fn transform(&self, map: &UnimodularMap) -> Result<QuadForm> {
        let (a, b, c) = (self.a as i128, self.b as i128, self.c as i128);
        let (p, q, r, s) = (
            map.p as i128,
            map.q as i128,
            map.r as i128,
            map.s as i128,
        );
        let a2 = a * p * p + b * p * r + c * r * r;
        let b2 = 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s;
        let c2 = a * q * q + b * q * s + c * s * s;
        let into = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("form transform"));
        QuadForm::new(into(a2)?, into(b2)?, into(c2)?)
    }

    /// Gauss-reduce to the unique reduced form properly equivalent to `self`,
    /// together with the determinant +1 map that carries the reduced form
    /// back to `self`.
    ///
    /// Steps: translate b into (-a, a], swap a and c via (x, y) -> (-y, x)
    /// while a > c, then normalize the sign on the boundary cases |b| = a and
    /// a = c. Each swap strictly decreases a, so the loop terminates.
    pub fn reduce(&self) -> Result<(QuadForm, UnimodularMap)> {
        if !self.is_primitive() {
            return Err(Error::Imprimitive {
                a: self.a,
                b: self.b,
                c: self.c,
            });
        }
        let d = self.discriminant().value() as i128;
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        // Accumulates the substitutions applied so far, as self = f_cur o acc.
        let mut acc = UnimodularMap::identity();
        loop {
            if !(-a < b && b <= a) {
                // Translate: b -> b + 2ak lands in (-a, a].
                let k = (a - b).div_euclid(2 * a);
                let b2 = b + 2 * a * k;
                let c2 = (b2 * b2 - d) / (4 * a);
                debug_assert_eq!((b2 * b2 - d) % (4 * a), 0);
                (b, c) = (b2, c2);
                acc = acc.compose_i128(1, k, 0, 1)?;
            } else if a > c {
                (a, b, c) = (c, -b, a);
                acc = acc.compose_i128(0, -1, 1, 0)?;
            } else if b < 0 && (-b == a || a == c) {
                if -b == a {
                    // b = -a translates to b = a with c unchanged.
                    (b, c) = (a, c);
                    acc = acc.compose_i128(1, 1, 0, 1)?;
                } else {
                    (a, b, c) = (c, -b, a);
                    acc = acc.compose_i128(0, -1, 1, 0)?;
                }
            } else {
                break;
            }
        }
        let into = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("reduction"));
        let reduced = QuadForm::new(into(a)?, into(b)?, into(c)?)?;
        debug_assert!(reduced.is_reduced());
        let map = acc.inverse();
        debug_assert_eq!(reduced.transform(&map).as_ref(), Ok(self));
        Ok((reduced, map))
    }
}

impl fmt::Display for QuadForm {
    /// Renders as a polynomial, e.g. `2x^2 + 2xy + 3y^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeff = |v: i64| if v == 1 { String::new() } else { v.to_string() };
        write!(f, "{}x^2", coeff(self.a))?;
        if self.b != 0 {
            let sign = if self.b > 0 { '+' } else { '-' };
            write!(f, " {sign} {}xy", coeff(self.b.abs()))?;
        }
        write!(f, " + {}y^2", coeff(self.c))
    }
}

/// An element of GL2(Z): the substitution (x, y) -> (px + qy, rx + sy).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct UnimodularMap {
    p: i64,
    q: i64,
    r: i64,
    s: i64,
}

impl UnimodularMap {
    pub fn new(p: i64, q: i64, r: i64, s: i64) -> Result<UnimodularMap> {
        let det = (p as i128) * (s as i128) - (q as i128) * (r as i128);
        if det == 1 || det == -1 {
            Ok(UnimodularMap { p, q, r, s })
        } else {
            Err(Error::NotUnimodular(det))
        }
    }

    pub fn identity() -> UnimodularMap {
        UnimodularMap { p: 1, q: 0, r: 0, s: 1 }
    }

    pub fn entries(&self) -> (i64, i64, i64, i64) {
        (self.p, self.q, self.r, self.s)
    }

    pub fn determinant(&self) -> i64 {
        ((self.p as i128) * (self.s as i128) - (self.q as i128) * (self.r as i128)) as i64
    }

    /// Proper equivalence requires determinant +1.
    pub fn is_proper(&self) -> bool {
        self.determinant() == 1
    }

    /// Matrix product self * other.
    pub fn compose(&self, other: &UnimodularMap) -> Result<UnimodularMap> {
        self.compose_i128(
            other.p as i128,
            other.q as i128,
            other.r as i128,
            other.s as i128,
        )
    }

    fn compose_i128(&self, p: i128, q: i128, r: i128, s: i128) -> Result<UnimodularMap> {
        let (sp, sq, sr, ss) = (
            self.p as i128,
            self.q as i128,
            self.r as i128,
            self.s as i128,
        );
        let into = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("matrix product"));
        UnimodularMap::new(
            into(sp * p + sq * r)?,
            into(sp * q + sq * s)?,
            into(sr * p + ss * r)?,
            into(sr * q + ss * s)?,
        )
    }

    /// The inverse map; entries negate according to the determinant.
    pub fn inverse(&self) -> UnimodularMap {
        let det = self.determinant();
        UnimodularMap {
            p: self.s * det,
            q: -self.q * det,
            r: -self.r * det,
            s: self.p * det,
        }
    }
}

/// A witness that `form` takes the value `m` at (x, y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Representation {
    m: u64,
    x: i64,
    y: i64,
    form: QuadForm,
    proper: bool,
}

impl Representation {
    pub fn new(m: u64, x: i64, y: i64, form: QuadForm) -> Result<Representation> {
        if form.eval(x, y) != m as i128 {
            return Err(Error::Consistency(format!(
                "({x}, {y}) does not represent {m} in {form}"
            )));
        }
        let proper = gcd_u64(x.unsigned_abs(), y.unsigned_abs()) == 1;
        Ok(Representation { m, x, y, form, proper })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn x(&self) -> i64 {
        self.x
    }

    pub fn y(&self) -> i64 {
        self.y
    }

    pub fn form(&self) -> &QuadForm {
        &self.form
    }

    /// gcd(x, y) = 1.
    pub fn proper(&self) -> bool {
        self.proper
    }
}

/// All primitive reduced forms of discriminant `d`, sorted by (a, b, c).
///
/// The list length is the class number h(d). Scans a <= sqrt(|d|/3) and
/// b in (-a, a], with c fixed by the discriminant.
pub fn enumerate_reduced(d: Discriminant) -> Vec<QuadForm> {
    let dv = d.value() as i128;
    let mut out = Vec::new();
    let mut a: i64 = 1;
    while 3 * (a as i128) * (a as i128) <= -dv {
        for b in (-a + 1)..=a {
            let num = (b as i128) * (b as i128) - dv;
            let den = 4 * (a as i128);
            if num % den != 0 {
                continue;
            }
            let c = num / den;
            if c < a as i128 || c > i64::MAX as i128 {
                continue;
            }
            let f = QuadForm { a, b, c: c as i64 };
            if f.is_reduced() && f.is_primitive() {
                // D = 0 mod 4 forces even b.
                debug_assert!(d.value() % 4 != 0 || b % 2 == 0);
                out.push(f);
            }
        }
        a += 1;
    }
    out.sort();
    out
}

/// Search for a representation m = f(x, y); None when no witness exists.
///
/// From 4c f(x, y) = (2cy + bx)^2 + |D| x^2 every solution has
/// |x| <= sqrt(4cm/|D|), and (x, y) may be negated jointly, so scanning
/// x >= 0 and solving the quadratic in y is exhaustive. The canonical
/// witness minimizes x >= 0, then |y|, preferring y > 0 on ties.
pub fn represent(m: u64, f: &QuadForm) -> Result<Option<Representation>> {
    assert!(m >= 1, "represent requires m >= 1");
    let (a, b, c) = (f.a as i128, f.b as i128, f.c as i128);
    let abs_d = -(f.discriminant().value() as i128);
    let m128 = m as i128;
    let four_cm = (4 * c)
        .checked_mul(m128)
        .ok_or(Error::Overflow("representation bound"))?;
    let xmax = isqrt_i128(four_cm / abs_d);
    for x in 0..=xmax {
        // c y^2 + bx y + (a x^2 - m) = 0 over the integers.
        let disc_y = four_cm - x * x * abs_d;
        if disc_y < 0 {
            break;
        }
        let root = isqrt_i128(disc_y);
        if root * root != disc_y {
            continue;
        }
        let mut best: Option<i128> = None;
        for num in [-b * x + root, -b * x - root] {
            if num % (2 * c) != 0 {
                continue;
            }
            let y = num / (2 * c);
            debug_assert_eq!(a * x * x + b * x * y + c * y * y, m128);
            best = match best {
                Some(old) if (old.abs(), -old) <= (y.abs(), -y) => Some(old),
                _ => Some(y),
            };
        }
        if let Some(y) = best {
            let x = i64::try_from(x).map_err(|_| Error::Overflow("witness x"))?;
            let y = i64::try_from(y).map_err(|_| Error::Overflow("witness y"))?;
            return represent_witness(m, x, y, f).map(Some);
        }
    }
    Ok(None)
}

fn represent_witness(m: u64, x: i64, y: i64, f: &QuadForm) -> Result<Representation> {
    // Normalize (0, y) to y > 0; a lone sign on x is already fixed by x >= 0.
    if x == 0 && y < 0 {
        Representation::new(m, 0, -y, *f)
    } else {
        Representation::new(m, x, y, *f)
    }
}

fn isqrt_i128(v: i128) -> i128 {
    debug_assert!(v >= 0);
    (v as u128).isqrt() as i128
}

/// The values f takes in (Z/|D|Z)^x, found by scanning one full period
/// [0, |D|) x [0, |D|); f mod |D| is periodic in both arguments.
///
/// `modulus` must equal |D|; genus theory only samples at the discriminant.
pub fn represented_residues(f: &QuadForm, modulus: u64) -> BTreeSet<u64> {
    assert_eq!(
        modulus,
        f.discriminant().unsigned_abs(),
        "modulus must equal |D|"
    );
    let mut out = BTreeSet::new();
    for x in 0..modulus {
        for y in 0..modulus {
            let v = f.eval_mod(x, y, modulus);
            if gcd_u64(v, modulus) == 1 {
                out.insert(v);
            }
        }
    }
    out
}
