//! Find explicit congruence transforms between forms modulo prime powers,
//! and confirm a negative verdict with the exhaustive oracle.
//!
//! Run with: cargo run --example equivalence_search

use genus::forms::QuadForm;
use genus::generate::find_equivalence_mod_pk;
use genus::oracle::brute_force_equivalence;
use genus::zmod::LocalContext;
use num_bigint::BigInt;

fn diag(entries: &[i64]) -> QuadForm {
    QuadForm::from_diagonal(&entries.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>())
}

fn main() {
    // Same class modulo 9.
    let ctx = LocalContext::new(BigInt::from(3), 2).unwrap();
    let a = QuadForm::identity(2);
    let b = diag(&[2, 2]);
    let u = find_equivalence_mod_pk(&a, &b, &ctx).unwrap();
    println!("I2 ~ diag(2,2) mod 9 via U with det {}", u.det_mod(&ctx.modulus));

    // Different normalized symbols, same 2-adic class: the cross-scale
    // walk finds the transform.
    let ctx = LocalContext::new(BigInt::from(2), 6).unwrap();
    let a = diag(&[1, 2]);
    let b = diag(&[3, 6]);
    let u = find_equivalence_mod_pk(&a, &b, &ctx).unwrap();
    let conj = a.conjugate(&u, &ctx.modulus).unwrap();
    println!("diag(1,2) ~ diag(3,6) mod 64: {}", conj == b.reduce_mod(&ctx.modulus));

    // Genuinely inequivalent forms get a definitive refusal.
    let ctx = LocalContext::new(BigInt::from(3), 1).unwrap();
    let verdict = brute_force_equivalence(&QuadForm::identity(2), &diag(&[1, 2]), &ctx).unwrap();
    println!("I2 ~ diag(1,2) mod 3: {}", verdict.is_some());
}
