//! Acceptance suite: one test per exit criterion, each printing a PASS line
//! with the counts it verified. Run with
//! `cargo test -p pqforms --test acceptance -- --nocapture` to see them.

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use pqforms::*;

fn form(a: i64, b: i64, c: i64) -> QuadForm {
    QuadForm::new(a, b, c).unwrap()
}

fn disc(d: i64) -> Discriminant {
    Discriminant::new(d).unwrap()
}

fn odd_primes_coprime_to(bound: u64, n: u64) -> Vec<Prime> {
    primes_up_to(bound)
        .into_iter()
        .filter(|&p| p != 2 && n % p != 0)
        .map(|p| Prime::new(p).unwrap())
        .collect()
}

#[test]
fn criterion_01_reduced_form_fixtures() {
    let start = Instant::now();
    let forms20 = enumerate_reduced(disc(-20));
    let elapsed20 = start.elapsed();
    assert_eq!(forms20, vec![form(1, 0, 5), form(2, 2, 3)]);

    let start = Instant::now();
    let forms56 = enumerate_reduced(disc(-56));
    let elapsed56 = start.elapsed();
    assert_eq!(
        forms56,
        vec![form(1, 0, 14), form(2, 0, 7), form(3, -2, 5), form(3, 2, 5)]
    );

    assert!(elapsed20.as_micros() < 1000, "D = -20 took {elapsed20:?}");
    assert!(elapsed56.as_micros() < 1000, "D = -56 took {elapsed56:?}");
    println!(
        "criterion 1 PASS: reduced forms of -20 and -56 exact ({elapsed20:?}, {elapsed56:?})"
    );
}

#[test]
fn criterion_02_genus_tables_and_convenient_verdicts() {
    assert_eq!(
        represented_residues(&form(1, 0, 5), 20),
        BTreeSet::from([1, 9])
    );
    assert_eq!(
        represented_residues(&form(2, 2, 3), 20),
        BTreeSet::from([3, 7])
    );
    let principal = BTreeSet::from([1, 9, 15, 23, 25, 39]);
    let other = BTreeSet::from([3, 5, 13, 19, 27, 45]);
    assert_eq!(represented_residues(&form(1, 0, 14), 56), principal);
    assert_eq!(represented_residues(&form(2, 0, 7), 56), principal);
    assert_eq!(represented_residues(&form(3, -2, 5), 56), other);
    assert_eq!(represented_residues(&form(3, 2, 5), 56), other);
    assert!(is_convenient(5).unwrap());
    assert!(!is_convenient(14).unwrap());
    println!("criterion 2 PASS: residue tables mod 20 and mod 56 exact; n=5 convenient, n=14 not");
}

#[test]
fn criterion_03_fermat_claim_biconditional() {
    let primes = odd_primes_coprime_to(10_000, 5);
    // Residue class mod 20: principal {1, 9}, non-principal {3, 7}, or
    // unrepresented.
    let class = |p: Prime| match p.value() % 20 {
        1 | 9 => Some(0u8),
        3 | 7 => Some(1u8),
        _ => None,
    };
    let (pairs, violations): (u64, u64) = primes
        .par_iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut pairs = 0u64;
            let mut bad = 0u64;
            for &q in &primes[i + 1..] {
                let expected = matches!(
                    (class(p), class(q)),
                    (Some(a), Some(b)) if a == b
                );
                let got = brute_force_pq(p, q, 5).unwrap().is_some();
                pairs += 1;
                if got != expected {
                    bad += 1;
                }
            }
            (pairs, bad)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    assert_eq!(violations, 0);
    println!(
        "criterion 3 PASS: pq = x^2 + 5y^2 solvable exactly on matching residue pairs \
         ({pairs} pairs of primes <= 10^4)"
    );
}

#[test]
fn criterion_04_equivalence_sweep() {
    let start = Instant::now();
    let report = verify_sweep(30, 1000, false);
    let elapsed = start.elapsed();
    assert!(
        report.mismatches.is_empty(),
        "mismatches: {:?}",
        report.mismatches
    );
    assert!(elapsed.as_secs() < 60, "sweep took {elapsed:?}");
    println!(
        "criterion 4 PASS: decide_pq == brute_force_pq on {} pairs ({} representable) in {elapsed:?}",
        report.pairs_tested, report.representable
    );
}

#[test]
fn criterion_05_n14_three_case_classification() {
    let primes = odd_primes_coprime_to(10_000, 14);
    let principal = BTreeSet::from([1u64, 9, 15, 23, 25, 39]);
    let other = BTreeSet::from([3u64, 5, 13, 19, 27, 45]);
    let poly = criterion_poly_14();
    struct Info {
        p: Prime,
        principal: bool,
        other: bool,
        in_s: bool,
    }
    let infos: Vec<Info> = primes
        .par_iter()
        .map(|&p| {
            let r = p.value() % 56;
            Info {
                p,
                principal: principal.contains(&r),
                other: other.contains(&r),
                in_s: !poly_roots_mod_p(&poly, p).unwrap().is_empty(),
            }
        })
        .collect();
    let (pairs, violations): (u64, u64) = infos
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let mut pairs = 0u64;
            let mut bad = 0u64;
            for b in &infos[i + 1..] {
                let case1 = a.principal && b.principal && a.in_s && b.in_s;
                let case2 = a.principal && b.principal && !a.in_s && !b.in_s;
                let case3 = a.other && b.other;
                assert!(u8::from(case1) + u8::from(case2) + u8::from(case3) <= 1);
                let expected = case1 || case2 || case3;
                let got = brute_force_pq(a.p, b.p, 14).unwrap().is_some();
                pairs += 1;
                if got != expected {
                    bad += 1;
                }
            }
            (pairs, bad)
        })
        .reduce(|| (0, 0), |x, y| (x.0 + y.0, x.1 + y.1));
    assert_eq!(violations, 0);
    println!(
        "criterion 5 PASS: pq = x^2 + 14y^2 matches the three-case classification \
         ({pairs} pairs of primes <= 10^4)"
    );
}

#[test]
fn criterion_06_mutual_exclusion_to_1e5() {
    let violations = mutual_exclusion_check(100_000).unwrap();
    assert!(violations.is_empty(), "violations: {violations:?}");
    println!(
        "criterion 6 PASS: no odd prime <= 10^5 is represented by both x^2 + 14y^2 and 2x^2 + 7y^2"
    );
}

#[test]
fn criterion_07_product_identity_random_tuples() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7142_5d01);
    let trials = 100_000;
    for _ in 0..trials {
        let v: Vec<i128> = (0..7).map(|_| rng.gen_range(-1000i64..=1000) as i128).collect();
        let (a, b, c, x, y, z, w) = (v[0], v[1], v[2], v[3], v[4], v[5], v[6]);
        let n = -b * b + a * c;
        let lhs = (a * x * x + 2 * b * x * y + c * y * y)
            * (a * z * z + 2 * b * z * w + c * w * w);
        let big_x = a * x * z + b * x * w + b * y * z + c * y * w;
        let big_y = x * w - y * z;
        assert_eq!(lhs, big_x * big_x + n * big_y * big_y);
        // The library routine computes the same pair.
        let (lx, ly) = lagrange_compose(
            a as i64, b as i64, c as i64, x as i64, y as i64, z as i64, w as i64,
        )
        .unwrap();
        assert_eq!((lx as i128, ly as i128), (big_x, big_y));
    }
    println!("criterion 7 PASS: product identity exact on {trials} random tuples");
}

#[test]
fn criterion_08_class_group_axioms_and_representation_compatibility() {
    let primes = primes_up_to(200);
    let failures: Vec<String> = (1..=100u64)
        .into_par_iter()
        .flat_map(|n| {
            let mut out = Vec::new();
            // class_group verifies closure, identity, inverses,
            // associativity and commutativity before returning.
            let group = match class_group(Discriminant::from_n(n).unwrap()) {
                Ok(g) => g,
                Err(e) => {
                    out.push(format!("n = {n}: {e}"));
                    return out;
                }
            };
            let classes = group.classes().to_vec();
            let reps: Vec<Vec<u64>> = classes
                .iter()
                .map(|f| {
                    primes
                        .iter()
                        .copied()
                        .filter(|&p| represent(p, f).unwrap().is_some())
                        .collect()
                })
                .collect();
            for (i, f) in classes.iter().enumerate() {
                for (j, g) in classes.iter().enumerate() {
                    let composite = compose(f, g).unwrap();
                    for &p in &reps[i] {
                        for &q in &reps[j] {
                            if represent(p * q, &composite).unwrap().is_none() {
                                out.push(format!("n = {n}: {composite} misses {p} * {q}"));
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();
    assert!(failures.is_empty(), "{failures:?}");
    println!(
        "criterion 8 PASS: group axioms and representation compatibility for every n <= 100"
    );
}

#[test]
fn criterion_09_symbol_iff_represented() {
    let checked: u64 = (1..=30u64)
        .into_par_iter()
        .map(|n| {
            let mut count = 0;
            for p in odd_primes_coprime_to(10_000, n) {
                let c = classify_prime(p, n).unwrap();
                assert_eq!(
                    c.symbol == 1,
                    !c.forms.is_empty(),
                    "n = {n}, p = {p}: symbol {} with {} forms",
                    c.symbol,
                    c.forms.len()
                );
                count += 1;
            }
            count
        })
        .sum();
    println!(
        "criterion 9 PASS: (-n/p) = 1 iff some reduced form represents p ({checked} classifications)"
    );
}

#[test]
fn criterion_10_polynomial_criterion_matches_representability() {
    let poly = criterion_poly_14();
    let principal = form(1, 0, 14);
    let primes = odd_primes_coprime_to(10_000, 14);
    primes.par_iter().for_each(|&p| {
        let criterion = principal_criterion(p, 14, &poly, CRITERION_POLY_14_DISC).unwrap();
        let represented = represent(p.value(), &principal).unwrap().is_some();
        assert_eq!(criterion, represented, "p = {p}");
    });
    println!(
        "criterion 10 PASS: polynomial criterion equals x^2 + 14y^2 representability \
         for {} primes <= 10^4",
        primes.len()
    );
}
