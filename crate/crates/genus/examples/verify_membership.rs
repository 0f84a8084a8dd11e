//! Decide genus membership, including a case where two members have
//! different normalized 2-adic symbols.
//!
//! Run with: cargo run --example verify_membership

use genus::forms::{Mat, QuadForm};
use genus::generate::verify_membership;
use genus::symbol::genus_symbol;
use num_bigint::BigInt;

fn main() {
    let s = genus_symbol(&QuadForm::from_diagonal(&[1, 12].map(BigInt::from).to_vec())).unwrap();

    // Same determinant, same genus, different Jordan normalization.
    let mut m = Mat::zero(2, 2);
    *m.at_mut(0, 0) = BigInt::from(13);
    *m.at_mut(0, 1) = BigInt::from(1);
    *m.at_mut(1, 0) = BigInt::from(1);
    *m.at_mut(1, 1) = BigInt::from(1);
    let q = QuadForm::new(m).unwrap();
    let report = verify_membership(&q, &s).unwrap();
    println!(
        "[[13,1],[1,1]] vs diag(1,12): member = {}, via equivalence search = {}",
        report.member, report.used_equivalence_fallback
    );

    // A determinant mismatch is definitive.
    let other = QuadForm::from_diagonal(&[1, 3].map(BigInt::from).to_vec());
    let report = verify_membership(&other, &s).unwrap();
    println!("diag(1,3) vs diag(1,12): member = {}", report.member);
    for r in &report.reasons {
        println!("  reason: {r}");
    }
}
