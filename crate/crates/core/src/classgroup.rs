//! The form class group C(D): Dirichlet composition of proper equivalence
//! classes, the full composition table with verified group axioms, genus
//! partitioning by represented residues, and the convenient-number test.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{enumerate_reduced, represented_residues, Discriminant, QuadForm, UnimodularMap};
use crate::numtheory::{gcd_i128, gcd_u64};

/// The principal form x^2 + ny^2, the identity class of C(-4n).
pub fn principal_form(n: u64) -> Result<QuadForm> {
    let c = i64::try_from(n).map_err(|_| Error::Overflow("principal form"))?;
    QuadForm::new(1, 0, c)
}

/// Dirichlet composition: the reduced representative of the product of the
/// classes of `f` and `g`.
///
/// The middle coefficient B solves B = b1 (mod 2a1), B = b2 (mod 2a2) and
/// B^2 = D (mod 4 a1 a2), taking the smallest nonnegative solution; the
/// composite (a1 a2, B, (B^2 - D)/(4 a1 a2)) is then reduced. When
/// gcd(a1, a2, (b1 + b2)/2) > 1 those congruences need not be solvable, so
/// `g` is first replaced by an equivalent form whose leading coefficient is
/// coprime to a1, found among its small proper representations.
pub fn compose(f: &QuadForm, g: &QuadForm) -> Result<QuadForm> {
    let d = f.discriminant();
    if d != g.discriminant() {
        return Err(Error::MismatchedDiscriminants(
            d.value(),
            g.discriminant().value(),
        ));
    }
    for h in [f, g] {
        if !h.is_primitive() {
            return Err(Error::Imprimitive {
                a: h.a(),
                b: h.b(),
                c: h.c(),
            });
        }
    }
    let dv = d.value() as i128;
    let (a1, b1) = (f.a() as i128, f.b() as i128);
    let g = {
        let s = (b1 + g.b() as i128) / 2;
        if gcd_i128(gcd_i128(a1, g.a() as i128), s) != 1 {
            coprime_equivalent(g, f.a())?
        } else {
            *g
        }
    };
    let (a2, b2) = (g.a() as i128, g.b() as i128);

    let m1 = 2 * a1;
    let m2 = 2 * a2;
    let common = gcd_i128(m1, m2);
    if (b2 - b1) % common != 0 {
        return Err(Error::Consistency(
            "composition congruences are incompatible".into(),
        ));
    }
    // Smallest nonnegative B with B = b1 (mod 2a1) and B = b2 (mod 2a2).
    let m2r = m2 / common;
    let lcm = m1 * m2r;
    let t = (((b2 - b1) / common) % m2r * inv_mod(m1 / common, m2r)?) % m2r;
    let b0 = (b1 + m1 * t).rem_euclid(lcm);

    // Among B = b0 + k lcm below 2 a1 a2, keep the first with B^2 = D
    // (mod 4 a1 a2); one exists whenever the gcd condition above held.
    let a3 = a1
        .checked_mul(a2)
        .ok_or(Error::Overflow("composition leading coefficient"))?;
    let quad_mod = 4 * a3;
    let mut b3 = None;
    let mut cand = b0;
    while cand < 2 * a3 {
        let sq = cand
            .checked_mul(cand)
            .ok_or(Error::Overflow("composition middle coefficient"))?;
        if (sq - dv).rem_euclid(quad_mod) == 0 {
            b3 = Some(cand);
            break;
        }
        cand += lcm;
    }
    let b3 = b3.ok_or_else(|| {
        Error::Consistency("no middle coefficient satisfies the composition congruences".into())
    })?;
    let c3 = (b3 * b3 - dv) / quad_mod;
    let into = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("composition"));
    let composite = QuadForm::new(into(a3)?, into(b3)?, into(c3)?)?;
    Ok(composite.reduce()?.0)
}

/// Replace `g` by a properly equivalent form whose leading coefficient is
/// coprime to `lead`. Searches proper representations g(x, y) over
/// |x|, |y| <= 10; that radius covers every discriminant this crate
/// exercises, and a miss is a hard error rather than a wrong answer.
fn coprime_equivalent(g: &QuadForm, lead: i64) -> Result<QuadForm> {
    for x in -10i64..=10 {
        for y in -10i64..=10 {
            if gcd_u64(x.unsigned_abs(), y.unsigned_abs()) != 1 {
                continue;
            }
            let value = g.eval(x, y);
            if gcd_i128(value, lead as i128) != 1 {
                continue;
            }
            // Complete (x, y) to a determinant +1 matrix: x*s - y*(-t) = 1.
            let (_, s, t) = ext_gcd(x as i128, y as i128);
            let map = UnimodularMap::new(x, -t as i64, y, s as i64)?;
            let replaced = g.transform(&map)?;
            debug_assert_eq!(replaced.a() as i128, value);
            return Ok(replaced);
        }
    }
    Err(Error::NoCoprimeRepresentative(lead))
}

/// Extended gcd: returns (g, s, t) with g = s*a + t*b and g >= 0.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        return (a.abs(), a.signum(), 0);
    }
    let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
    (g, t, s - a.div_euclid(b) * t)
}

fn inv_mod(a: i128, m: i128) -> Result<i128> {
    if m == 1 {
        return Ok(0);
    }
    let (g, s, _) = ext_gcd(a.rem_euclid(m), m);
    if g != 1 {
        return Err(Error::Consistency(format!("{a} is not invertible mod {m}")));
    }
    Ok(s.rem_euclid(m))
}

/// The form class group of a discriminant: canonical reduced representatives
/// and the full composition table, with the abelian group axioms checked at
/// construction.
#[derive(Debug, Clone, Serialize)]
pub struct FormClassGroup {
    #[serde(rename = "D")]
    d: Discriminant,
    classes: Vec<QuadForm>,
    table: Vec<Vec<usize>>,
}

/// Build C(D) and verify closure, identity, inverses, associativity and
/// commutativity; any failure is an internal-consistency fault.
pub fn class_group(d: Discriminant) -> Result<FormClassGroup> {
    let classes = enumerate_reduced(d);
    let h = classes.len();
    if h == 0 {
        return Err(Error::Consistency(format!("no reduced forms of discriminant {d}")));
    }
    let index_of = |f: &QuadForm| -> Result<usize> {
        classes
            .binary_search(f)
            .map_err(|_| Error::Consistency(format!("composite {f} is not a reduced class of {d}")))
    };
    let mut table = vec![vec![0usize; h]; h];
    for i in 0..h {
        for j in 0..=i {
            let k = index_of(&compose(&classes[i], &classes[j])?)?;
            table[i][j] = k;
            table[j][i] = k;
        }
    }
    let group = FormClassGroup { d, classes, table };
    group.verify_axioms()?;
    Ok(group)
}

impl FormClassGroup {
    pub fn discriminant(&self) -> Discriminant {
        self.d
    }

    /// The class number h(D).
    pub fn order(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[QuadForm] {
        &self.classes
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn compose_indices(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    /// Index of the principal class, the unique reduced form with a = 1.
    pub fn identity_index(&self) -> usize {
        self.classes
            .iter()
            .position(|f| f.a() == 1)
            .expect("a discriminant always has its principal class")
    }

    /// Index of the class of an arbitrary primitive form of discriminant D.
    pub fn class_index(&self, f: &QuadForm) -> Result<usize> {
        if f.discriminant() != self.d {
            return Err(Error::MismatchedDiscriminants(
                self.d.value(),
                f.discriminant().value(),
            ));
        }
        let (reduced, _) = f.reduce()?;
        self.classes
            .binary_search(&reduced)
            .map_err(|_| Error::Consistency(format!("{reduced} missing from the class list")))
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        let e = self.identity_index();
        (0..self.order())
            .find(|&j| self.table[i][j] == e)
            .expect("inverses exist; axioms were verified at construction")
    }

    /// Multiplicative order of class `i` in the group.
    pub fn element_order(&self, i: usize) -> u64 {
        let e = self.identity_index();
        let mut cur = i;
        let mut k = 1u64;
        while cur != e {
            cur = self.table[cur][i];
            k += 1;
        }
        k
    }

    /// Invariant factors d1 | d2 | ... | dk with product h(D), so e.g. [2, 4]
    /// names Z/2 x Z/4 and the empty list is the trivial group.
    ///
    /// Works from the counts N(m) = #{classes with g^m = identity}: the
    /// group exponent is the smallest m with N(m) = order, it is the largest
    /// invariant factor, and splitting off that cyclic part divides every
    /// count by gcd(exponent, m). No structure theorem machinery; the groups
    /// here are tiny.
    pub fn structure(&self) -> Vec<u64> {
        let h = self.order() as u64;
        let orders: Vec<u64> = (0..self.order()).map(|i| self.element_order(i)).collect();
        let mut order = h;
        let mut counts: BTreeMap<u64, u64> = divisors(h)
            .into_iter()
            .map(|m| (m, orders.iter().filter(|&&o| m % o == 0).count() as u64))
            .collect();
        let mut factors = Vec::new();
        while order > 1 {
            let exponent = *counts
                .iter()
                .find(|&(_, &count)| count == order)
                .expect("the group exponent divides the order")
                .0;
            factors.push(exponent);
            order /= exponent;
            counts = divisors(order)
                .into_iter()
                .map(|m| (m, counts[&m] / gcd_u64(exponent, m)))
                .collect();
        }
        factors.reverse();
        factors
    }

    fn verify_axioms(&self) -> Result<()> {
        let h = self.order();
        let fail = |msg: String| Err(Error::Consistency(msg));
        let e = match self.classes.iter().position(|f| f.a() == 1) {
            Some(e) => e,
            None => return fail(format!("no principal class for {}", self.d)),
        };
        for j in 0..h {
            if self.table[e][j] != j {
                return fail(format!("identity law fails at class {j} for {}", self.d));
            }
        }
        for i in 0..h {
            let inverse = (0..h).filter(|&j| self.table[i][j] == e).count();
            if inverse != 1 {
                return fail(format!("class {i} of {} has {inverse} inverses", self.d));
            }
            // The inverse class is represented by the coefficient-negated form.
            let negated = QuadForm::new(self.classes[i].a(), -self.classes[i].b(), self.classes[i].c())?;
            let j = self.classes.binary_search(&negated.reduce()?.0).map_err(|_| {
                Error::Consistency(format!("negated class of {} escapes {}", self.classes[i], self.d))
            })?;
            if self.table[i][j] != e {
                return fail(format!(
                    "(a, -b, c) is not inverse to class {i} for {}",
                    self.d
                ));
            }
        }
        for i in 0..h {
            for j in 0..h {
                if self.table[i][j] != self.table[j][i] {
                    return fail(format!("commutativity fails at ({i}, {j}) for {}", self.d));
                }
                for k in 0..h {
                    if self.table[self.table[i][j]][k] != self.table[i][self.table[j][k]] {
                        return fail(format!(
                            "associativity fails at ({i}, {j}, {k}) for {}",
                            self.d
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}

/// One genus: the forms sharing a represented-residue set in (Z/|D|Z)^x.
#[derive(Debug, Clone, Serialize)]
pub struct GenusBlock {
    pub residues: BTreeSet<u64>,
    pub forms: Vec<QuadForm>,
}

/// The partition of the reduced forms of a discriminant into genera,
/// ordered by smallest represented residue.
#[derive(Debug, Clone, Serialize)]
pub struct GenusPartition {
    #[serde(rename = "D")]
    d: Discriminant,
    blocks: Vec<GenusBlock>,
}

impl GenusPartition {
    pub fn discriminant(&self) -> Discriminant {
        self.d
    }

    pub fn blocks(&self) -> &[GenusBlock] {
        &self.blocks
    }

    /// The block whose residues contain `residue`, if any.
    pub fn block_of_residue(&self, residue: u64) -> Option<usize> {
        self.blocks.iter().position(|b| b.residues.contains(&residue))
    }
}

/// Group the reduced forms of `d` by their represented residues.
pub fn genus_partition(d: Discriminant) -> GenusPartition {
    let modulus = d.unsigned_abs();
    let mut grouped: BTreeMap<BTreeSet<u64>, Vec<QuadForm>> = BTreeMap::new();
    for f in enumerate_reduced(d) {
        grouped
            .entry(represented_residues(&f, modulus))
            .or_default()
            .push(f);
    }
    // Distinct genera have disjoint residue sets, so the BTreeMap order is
    // exactly the order by smallest residue.
    let blocks = grouped
        .into_iter()
        .map(|(residues, forms)| GenusBlock { residues, forms })
        .collect();
    GenusPartition { d, blocks }
}

/// n is convenient iff every genus of discriminant -4n is a single class.
pub fn is_convenient(n: u64) -> Result<bool> {
    let d = Discriminant::from_n(n)?;
    Ok(genus_partition(d).blocks.iter().all(|b| b.forms.len() == 1))
}

impl fmt::Display for FormClassGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self
            .structure()
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect();
        if names.is_empty() {
            write!(f, "trivial")
        } else {
            write!(f, "{}", names.join(" x "))
        }
    }
}
