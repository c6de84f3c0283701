//! Decision procedures for the Diophantine equation pq = x^2 + ny^2.
//!
//! Given a positive integer n and distinct odd primes p, q not dividing n,
//! the product pq is of the form x^2 + ny^2 exactly when a single reduced
//! binary quadratic form of discriminant -4n represents both primes. This
//! crate implements that equivalence constructively, along with the
//! machinery it rests on:
//!
//! - [`numtheory`] — deterministic primality, Jacobi symbols, square roots
//!   and polynomial roots modulo a prime;
//! - [`forms`] — binary quadratic forms: reduction, enumeration of reduced
//!   forms, representation search with witnesses, represented residues;
//! - [`classgroup`] — Dirichlet composition, the form class group, genus
//!   partitions and the convenient-number test;
//! - [`represent`] — prime classification, the pair decision with an
//!   explicit (x, y) witness, the brute-force oracle, the polynomial
//!   criterion for x^2 + 14y^2, and the exhaustive verification sweep.

pub mod classgroup;
pub mod error;
pub mod forms;
pub mod numtheory;
pub mod represent;

pub use classgroup::{
    class_group, compose, genus_partition, is_convenient, principal_form, FormClassGroup,
    GenusBlock, GenusPartition,
};
pub use error::{Error, Result};
pub use forms::{
    enumerate_reduced, represent, represented_residues, Discriminant, QuadForm, Representation,
    UnimodularMap,
};
pub use numtheory::{
    is_prime, jacobi, poly_roots_mod_p, primes_up_to, sqrt_mod_p, IntPolynomial, Prime,
};
pub use represent::{
    brute_force_pq, classify_pair_table, classify_prime, criterion_poly_14, decide_pq,
    lagrange_compose, mutual_exclusion_check, principal_criterion, verify_sweep, PairDecision,
    PairTable, PairTableRow, PqWitness, PrimeClassification, SweepMismatch, SweepReport,
    CRITERION_POLY_14_DISC,
};
