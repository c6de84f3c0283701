//! Decision procedures for representing primes and products of two primes.
//!
//! The central operation is [`decide_pq`]: for distinct odd primes p, q not
//! dividing n, the product pq is x^2 + ny^2 for some integers x, y exactly
//! when one reduced form of discriminant -4n represents both primes. The
//! forward direction is constructive through [`lagrange_compose`];
//! [`brute_force_pq`] is the independent oracle used to verify the
//! equivalence exhaustively.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::classgroup::principal_form;
use crate::error::{Error, Result};
use crate::forms::{enumerate_reduced, represent, Discriminant, QuadForm, Representation};
use crate::numtheory::{jacobi, poly_roots_mod_p, primes_up_to, IntPolynomial, Prime};

/// Discriminant of [`criterion_poly_14`], namely -2^14 * 7.
pub const CRITERION_POLY_14_DISC: i128 = -114_688;

/// The quartic (x^2 + 1)^2 - 8 used by the principal-form criterion for
/// n = 14: an odd prime p coprime to 14 is x^2 + 14y^2 exactly when
/// (-14/p) = 1 and this polynomial has a root mod p.
pub fn criterion_poly_14() -> IntPolynomial {
    IntPolynomial::new(vec![-7, 0, 2, 0, 1])
}

/// How a prime relates to the reduced forms of discriminant -4n.
#[derive(Debug, Clone, Serialize)]
pub struct PrimeClassification {
    pub p: Prime,
    pub n: u64,
    /// The Jacobi symbol (-n/p).
    pub symbol: i32,
    /// Every reduced form of discriminant -4n representing p, as witnesses.
    pub forms: Vec<Representation>,
    /// p mod 4n.
    pub residue: u64,
}

/// An explicit solution of pq = x^2 + ny^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PqWitness {
    pub x: i64,
    pub y: i64,
}

/// Outcome of the pq = x^2 + ny^2 query.
#[derive(Debug, Clone, Serialize)]
pub struct PairDecision {
    pub p: Prime,
    pub q: Prime,
    pub n: u64,
    pub representable: bool,
    /// The lexicographically least reduced form representing both primes.
    pub common_form: Option<QuadForm>,
    pub witness: Option<PqWitness>,
}

/// The identity (a x1^2 + 2b x1 y1 + c y1^2)(a x2^2 + 2b x2 y2 + c y2^2)
/// = X^2 + n Y^2 with n = -b^2 + ac, where
/// X = a x1 x2 + b x1 y2 + b y1 x2 + c y1 y2 and Y = x1 y2 - y1 x2.
///
/// Holds unconditionally over the integers; note the half-middle-coefficient
/// convention in (a, b, c).
pub fn lagrange_compose(
    a: i64,
    b: i64,
    c: i64,
    x1: i64,
    y1: i64,
    x2: i64,
    y2: i64,
) -> Result<(i64, i64)> {
    let mul3 = |u: i64, v: i64, w: i64| -> Result<i128> {
        (u as i128)
            .checked_mul(v as i128)
            .and_then(|t| t.checked_mul(w as i128))
            .ok_or(Error::Overflow("lagrange composition"))
    };
    let mut x: i128 = 0;
    for term in [
        mul3(a, x1, x2)?,
        mul3(b, x1, y2)?,
        mul3(b, y1, x2)?,
        mul3(c, y1, y2)?,
    ] {
        x = x
            .checked_add(term)
            .ok_or(Error::Overflow("lagrange composition"))?;
    }
    let y = (x1 as i128) * (y2 as i128) - (y1 as i128) * (x2 as i128);
    let into = |v: i128| i64::try_from(v).map_err(|_| Error::Overflow("lagrange composition"));
    Ok((into(x)?, into(y)?))
}

fn require_odd(p: Prime) -> Result<()> {
    if p.is_odd() {
        Ok(())
    } else {
        Err(Error::EvenPrime(p.value()))
    }
}

fn require_coprime_to_n(p: Prime, n: u64) -> Result<()> {
    if n % p.value() == 0 {
        Err(Error::PrimeDividesN { p: p.value(), n })
    } else {
        Ok(())
    }
}

/// Classify `p` against the reduced forms of discriminant -4n: the symbol
/// (-n/p), the residue p mod 4n, and a witness for every form representing p.
pub fn classify_prime(p: Prime, n: u64) -> Result<PrimeClassification> {
    require_odd(p)?;
    require_coprime_to_n(p, n)?;
    let neg_n = i64::try_from(n)
        .map(|v| -v)
        .map_err(|_| Error::Overflow("(-n/p)"))?;
    let symbol = jacobi(neg_n, p.value())?;
    let d = Discriminant::from_n(n)?;
    let mut forms = Vec::new();
    for f in enumerate_reduced(d) {
        if let Some(witness) = represent(p.value(), &f)? {
            forms.push(witness);
        }
    }
    let modulus = n.checked_mul(4).ok_or(Error::Overflow("residue modulus 4n"))?;
    // (-n/p) = 1 exactly when some reduced form represents p.
    debug_assert_eq!(symbol == 1, !forms.is_empty());
    Ok(PrimeClassification {
        p,
        n,
        symbol,
        forms,
        residue: p.value() % modulus,
    })
}

fn validate_pair(p: Prime, q: Prime, n: u64) -> Result<u64> {
    require_odd(p)?;
    require_odd(q)?;
    if p == q {
        return Err(Error::EqualPrimes(p.value()));
    }
    require_coprime_to_n(p, n)?;
    require_coprime_to_n(q, n)?;
    p.value()
        .checked_mul(q.value())
        .ok_or(Error::Overflow("product pq"))
}

/// Decide whether pq = x^2 + ny^2 has an integer solution.
///
/// Scans the reduced forms of discriminant -4n in lexicographic order for
/// one representing both p and q. On success the composed identity witness
/// is checked internally, and the reported witness is the canonical
/// representation of pq by the principal form, so repeated runs and
/// differently-chosen prime witnesses cannot change the output.
pub fn decide_pq(p: Prime, q: Prime, n: u64) -> Result<PairDecision> {
    let pq = validate_pair(p, q, n)?;
    let d = Discriminant::from_n(n)?;
    for f in enumerate_reduced(d) {
        let (Some(wp), Some(wq)) = (represent(p.value(), &f)?, represent(q.value(), &f)?) else {
            continue;
        };
        // Reduced forms of discriminant -4n have even b.
        let (x, y) = lagrange_compose(
            f.a(),
            f.b() / 2,
            f.c(),
            wp.x(),
            wp.y(),
            wq.x(),
            wq.y(),
        )?;
        let (x, y) = (x.abs(), y.abs());
        let composed = (x as i128) * (x as i128) + (n as i128) * (y as i128) * (y as i128);
        if composed != pq as i128 {
            return Err(Error::Consistency(format!(
                "composed witness ({x}, {y}) misses {p} * {q} for n = {n}"
            )));
        }
        let canonical = represent(pq, &principal_form(n)?)?.ok_or_else(|| {
            Error::Consistency(format!(
                "{f} represents both {p} and {q} but {pq} has no principal witness"
            ))
        })?;
        return Ok(PairDecision {
            p,
            q,
            n,
            representable: true,
            common_form: Some(f),
            witness: Some(PqWitness {
                x: canonical.x(),
                y: canonical.y(),
            }),
        });
    }
    Ok(PairDecision {
        p,
        q,
        n,
        representable: false,
        common_form: None,
        witness: None,
    })
}

/// Exhaustive oracle for pq = x^2 + ny^2, independent of the form machinery:
/// test pq - ny^2 for a perfect square over the whole range of y.
///
/// Scans y downward so the witness matches the canonical (minimal x) one.
pub fn brute_force_pq(p: Prime, q: Prime, n: u64) -> Result<Option<PqWitness>> {
    let pq = validate_pair(p, q, n)? as u128;
    let n = n as u128;
    let mut y = (pq / n).isqrt();
    loop {
        let rest = pq - n * y * y;
        let x = rest.isqrt();
        if x * x == rest {
            return Ok(Some(PqWitness {
                x: x as i64,
                y: y as i64,
            }));
        }
        if y == 0 {
            return Ok(None);
        }
        y -= 1;
    }
}

/// The principal-form criterion: p = x^2 + ny^2 iff (-n/p) = 1 and f_n has a
/// root mod p, valid whenever f_n generates the right field extension (the
/// caller's responsibility; [`criterion_poly_14`] is the built-in instance).
///
/// Requires p odd and coprime to both n and the discriminant of f_n.
pub fn principal_criterion(
    p: Prime,
    n: u64,
    f_n: &IntPolynomial,
    disc_f: i128,
) -> Result<bool> {
    require_odd(p)?;
    require_coprime_to_n(p, n)?;
    if disc_f % p.value() as i128 == 0 {
        return Err(Error::PrimeDividesDisc {
            p: p.value(),
            disc: disc_f,
        });
    }
    let neg_n = i64::try_from(n)
        .map(|v| -v)
        .map_err(|_| Error::Overflow("(-n/p)"))?;
    if jacobi(neg_n, p.value())? != 1 {
        return Ok(false);
    }
    Ok(!poly_roots_mod_p(f_n, p)?.is_empty())
}

/// Scan all odd primes up to `bound` coprime to 14 and report every one
/// represented by both x^2 + 14y^2 and 2x^2 + 7y^2. The list is empty; the
/// two forms never share a prime.
pub fn mutual_exclusion_check(bound: u64) -> Result<Vec<u64>> {
    let principal = QuadForm::new(1, 0, 14)?;
    let other = QuadForm::new(2, 0, 7)?;
    let mut violations = Vec::new();
    for p in primes_up_to(bound) {
        if p == 2 || p == 7 {
            continue;
        }
        if represent(p, &principal)?.is_some() && represent(p, &other)?.is_some() {
            violations.push(p);
        }
    }
    Ok(violations)
}

/// One row of [`PairTable`]: a reduced form, the congruence classes mod 4n
/// of the primes it represents, and (n = 14 only) how those primes split on
/// solvability of (x^2+1)^2 = 8 mod p.
#[derive(Debug, Clone, Serialize)]
pub struct PairTableRow {
    pub form: QuadForm,
    pub residues: BTreeSet<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primes_in_s: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub primes_not_in_s: Option<u64>,
}

/// Congruence classes of represented primes per reduced form of -4n.
#[derive(Debug, Clone, Serialize)]
pub struct PairTable {
    pub n: u64,
    pub bound: u64,
    pub modulus: u64,
    pub rows: Vec<PairTableRow>,
}

/// For each reduced form of discriminant -4n, collect the residues mod 4n of
/// the odd primes p <= bound (p not dividing n) it represents; for n = 14
/// each row also counts represented primes inside and outside the root set
/// of [`criterion_poly_14`].
pub fn classify_pair_table(n: u64, bound: u64) -> Result<PairTable> {
    let d = Discriminant::from_n(n)?;
    let modulus = n.checked_mul(4).ok_or(Error::Overflow("residue modulus 4n"))?;
    let split_s = n == 14;
    let poly = criterion_poly_14();
    let mut rows: Vec<PairTableRow> = enumerate_reduced(d)
        .into_iter()
        .map(|form| PairTableRow {
            form,
            residues: BTreeSet::new(),
            primes_in_s: split_s.then_some(0),
            primes_not_in_s: split_s.then_some(0),
        })
        .collect();
    for p in primes_up_to(bound) {
        if p == 2 || n % p == 0 {
            continue;
        }
        let in_s = if split_s {
            !poly_roots_mod_p(&poly, Prime::new(p)?)?.is_empty()
        } else {
            false
        };
        for row in &mut rows {
            if represent(p, &row.form)?.is_some() {
                row.residues.insert(p % modulus);
                if split_s {
                    let slot = if in_s {
                        row.primes_in_s.as_mut()
                    } else {
                        row.primes_not_in_s.as_mut()
                    };
                    *slot.expect("populated when split_s") += 1;
                }
            }
        }
    }
    Ok(PairTable {
        n,
        bound,
        modulus,
        rows,
    })
}

/// A disagreement between [`decide_pq`] and [`brute_force_pq`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SweepMismatch {
    pub n: u64,
    pub p: u64,
    pub q: u64,
    pub decided: bool,
    pub brute_force: bool,
}

/// Result of the exhaustive equivalence sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub n_max: u64,
    pub p_max: u64,
    pub pairs_tested: u64,
    pub representable: u64,
    pub mismatches: Vec<SweepMismatch>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Compare decide_pq with brute_force_pq for every n <= n_max and every pair
/// of distinct odd primes p < q <= p_max with p, q coprime to n.
///
/// Work is parallel over n; results merge in (n, p, q) order regardless of
/// scheduling. `inject_fault` flips the decided answer of the first tested
/// pair, a self-test that the harness actually reports mismatches.
pub fn verify_sweep(n_max: u64, p_max: u64, inject_fault: bool) -> SweepReport {
    let odd_primes: Vec<Prime> = primes_up_to(p_max)
        .into_iter()
        .filter(|&p| p > 2)
        .map(|p| Prime::new(p).expect("sieve yields primes"))
        .collect();
    let first_triple = (1..=n_max)
        .find_map(|n| first_pair(&odd_primes, n).map(|(p, q)| (n, p, q)));
    let per_n: Vec<(u64, Vec<SweepMismatch>, u64, u64)> = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            let mut mismatches = Vec::new();
            let mut tested = 0;
            let mut representable = 0;
            for (i, &p) in odd_primes.iter().enumerate() {
                if n % p.value() == 0 {
                    continue;
                }
                for &q in &odd_primes[i + 1..] {
                    if n % q.value() == 0 {
                        continue;
                    }
                    let decision = decide_pq(p, q, n).expect("hypotheses hold by construction");
                    let oracle = brute_force_pq(p, q, n).expect("hypotheses hold by construction");
                    let mut decided = decision.representable;
                    if inject_fault && first_triple == Some((n, p.value(), q.value())) {
                        decided = !decided;
                    }
                    tested += 1;
                    if oracle.is_some() {
                        representable += 1;
                    }
                    if decided != oracle.is_some() {
                        mismatches.push(SweepMismatch {
                            n,
                            p: p.value(),
                            q: q.value(),
                            decided,
                            brute_force: oracle.is_some(),
                        });
                    }
                }
            }
            (n, mismatches, tested, representable)
        })
        .collect();
    let mut report = SweepReport {
        n_max,
        p_max,
        pairs_tested: 0,
        representable: 0,
        mismatches: Vec::new(),
    };
    // par_iter over a range preserves order, so this concatenation is the
    // (n, p, q) lexicographic merge.
    for (_, mismatches, tested, representable) in per_n {
        report.pairs_tested += tested;
        report.representable += representable;
        report.mismatches.extend(mismatches);
    }
    report
}

fn first_pair(odd_primes: &[Prime], n: u64) -> Option<(u64, u64)> {
    let mut eligible = odd_primes.iter().filter(|p| n % p.value() != 0);
    let first = eligible.next()?;
    let second = eligible.next()?;
    Some((first.value(), second.value()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prime(v: u64) -> Prime {
        Prime::new(v).unwrap()
    }

    fn form(a: i64, b: i64, c: i64) -> QuadForm {
        QuadForm::new(a, b, c).unwrap()
    }

    #[test]
    fn lagrange_examples() {
        // 2x^2 + 2xy + 3y^2 in half-b convention is (2, 1, 3), n = -1 + 6 = 5.
        assert_eq!(lagrange_compose(2, 1, 3, 0, 1, 1, 1).unwrap(), (4, -1));
        assert_eq!(4 * 4 + 5 * 1, 21);
        assert_eq!(lagrange_compose(2, 1, 3, 1, 0, 1, 0).unwrap(), (2, 0));
        assert_eq!(lagrange_compose(1, 0, 5, 1, 2, 1, 2).unwrap(), (21, 0));
    }

    #[test]
    fn classify_prime_examples() {
        let c = classify_prime(prime(3), 5).unwrap();
        assert_eq!(c.symbol, 1);
        assert_eq!(c.residue, 3);
        assert_eq!(c.forms.len(), 1);
        assert_eq!(*c.forms[0].form(), form(2, 2, 3));
        assert_eq!((c.forms[0].x(), c.forms[0].y()), (0, 1));

        let c = classify_prime(prime(11), 5).unwrap();
        assert_eq!(c.symbol, -1);
        assert!(c.forms.is_empty());

        let c = classify_prime(prime(23), 14).unwrap();
        assert_eq!(c.residue, 23);
        let forms: Vec<&QuadForm> = c.forms.iter().map(|r| r.form()).collect();
        assert_eq!(forms, vec![&form(1, 0, 14)]);
    }

    #[test]
    fn classify_prime_rejects_hypothesis_violations() {
        assert_eq!(
            classify_prime(prime(2), 5).unwrap_err(),
            Error::EvenPrime(2)
        );
        assert_eq!(
            classify_prime(prime(5), 5).unwrap_err(),
            Error::PrimeDividesN { p: 5, n: 5 }
        );
        assert_eq!(
            classify_prime(prime(7), 14).unwrap_err(),
            Error::PrimeDividesN { p: 7, n: 14 }
        );
    }

    #[test]
    fn decide_pq_examples() {
        let d = decide_pq(prime(3), prime(7), 5).unwrap();
        assert!(d.representable);
        assert_eq!(d.common_form, Some(form(2, 2, 3)));
        assert_eq!(d.witness, Some(PqWitness { x: 1, y: 2 }));

        let d = decide_pq(prime(23), prime(71), 14).unwrap();
        assert!(!d.representable);
        assert_eq!(d.common_form, None);
        assert_eq!(d.witness, None);

        let d = decide_pq(prime(71), prime(79), 14).unwrap();
        assert!(d.representable);
        assert_eq!(d.common_form, Some(form(2, 0, 7)));
        assert_eq!(d.witness, Some(PqWitness { x: 3, y: 20 }));
    }

    #[test]
    fn decide_pq_distinct_errors() {
        assert_eq!(
            decide_pq(prime(3), prime(3), 5).unwrap_err(),
            Error::EqualPrimes(3)
        );
        assert_eq!(
            decide_pq(prime(2), prime(7), 5).unwrap_err(),
            Error::EvenPrime(2)
        );
        assert_eq!(
            decide_pq(prime(5), prime(7), 5).unwrap_err(),
            Error::PrimeDividesN { p: 5, n: 5 }
        );
        assert_eq!(
            decide_pq(prime(3), prime(7), 7).unwrap_err(),
            Error::PrimeDividesN { p: 7, n: 7 }
        );
        assert_eq!(Prime::new(1633).unwrap_err(), Error::NotPrime(1633));
    }

    #[test]
    fn brute_force_examples() {
        assert_eq!(
            brute_force_pq(prime(3), prime(7), 5).unwrap(),
            Some(PqWitness { x: 1, y: 2 })
        );
        assert_eq!(brute_force_pq(prime(3), prime(29), 5).unwrap(), None);
        assert_eq!(
            brute_force_pq(prime(3), prime(5), 14).unwrap(),
            Some(PqWitness { x: 1, y: 1 })
        );
    }

    #[test]
    fn principal_criterion_examples() {
        let f = criterion_poly_14();
        assert!(principal_criterion(prime(23), 14, &f, CRITERION_POLY_14_DISC).unwrap());
        assert!(!principal_criterion(prime(71), 14, &f, CRITERION_POLY_14_DISC).unwrap());
        assert!(!principal_criterion(prime(3), 14, &f, CRITERION_POLY_14_DISC).unwrap());
    }

    #[test]
    fn principal_criterion_hypotheses() {
        let f = criterion_poly_14();
        assert_eq!(
            principal_criterion(prime(7), 14, &f, CRITERION_POLY_14_DISC).unwrap_err(),
            Error::PrimeDividesN { p: 7, n: 14 }
        );
        assert_eq!(
            principal_criterion(prime(3), 14, &f, -21).unwrap_err(),
            Error::PrimeDividesDisc { p: 3, disc: -21 }
        );
        assert_eq!(
            principal_criterion(prime(2), 14, &f, CRITERION_POLY_14_DISC).unwrap_err(),
            Error::EvenPrime(2)
        );
    }

    #[test]
    fn criterion_poly_disc_matches_computed_value() {
        assert_eq!(
            criterion_poly_14().discriminant().unwrap(),
            CRITERION_POLY_14_DISC
        );
    }

    #[test]
    fn mutual_exclusion_small_bounds() {
        assert!(mutual_exclusion_check(3).unwrap().is_empty());
        assert!(mutual_exclusion_check(100).unwrap().is_empty());
        assert!(mutual_exclusion_check(10_000).unwrap().is_empty());
    }

    #[test]
    fn pair_table_n5() {
        let t = classify_pair_table(5, 1000).unwrap();
        assert_eq!(t.modulus, 20);
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].form, form(1, 0, 5));
        assert_eq!(t.rows[0].residues, BTreeSet::from([1, 9]));
        assert_eq!(t.rows[1].form, form(2, 2, 3));
        assert_eq!(t.rows[1].residues, BTreeSet::from([3, 7]));
        assert_eq!(t.rows[0].primes_in_s, None);
    }

    #[test]
    fn pair_table_n14_splits_on_s() {
        let t = classify_pair_table(14, 1000).unwrap();
        assert_eq!(t.rows.len(), 4);
        let principal = BTreeSet::from([1, 9, 15, 23, 25, 39]);
        let other = BTreeSet::from([3, 5, 13, 19, 27, 45]);
        assert_eq!(t.rows[0].residues, principal);
        assert_eq!(t.rows[1].residues, principal);
        assert_eq!(t.rows[2].residues, other);
        assert_eq!(t.rows[3].residues, other);
        // x^2 + 14y^2 represents only primes in S; 2x^2 + 7y^2 only primes
        // outside S. Counts fixed by an independent scan.
        assert_eq!(t.rows[0].primes_in_s, Some(18));
        assert_eq!(t.rows[0].primes_not_in_s, Some(0));
        assert_eq!(t.rows[1].primes_in_s, Some(0));
        assert_eq!(t.rows[1].primes_not_in_s, Some(20));
        assert_eq!(t.rows[2].primes_in_s, Some(0));
        assert_eq!(t.rows[3].primes_in_s, Some(0));
    }

    #[test]
    fn pair_table_n1() {
        let t = classify_pair_table(1, 100).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].form, form(1, 0, 1));
        assert_eq!(t.rows[0].residues, BTreeSet::from([1]));
    }

    #[test]
    fn sweep_small_range_is_clean() {
        let report = verify_sweep(5, 100, false);
        assert!(report.passed());
        assert!(report.pairs_tested > 0);
        assert!(report.representable > 0);
    }

    #[test]
    fn sweep_fault_injection_reports_one_mismatch() {
        let report = verify_sweep(5, 100, true);
        assert_eq!(report.mismatches.len(), 1);
        let m = report.mismatches[0];
        assert_eq!((m.n, m.p, m.q), (1, 3, 5));
        assert!(!report.passed());
    }
}
