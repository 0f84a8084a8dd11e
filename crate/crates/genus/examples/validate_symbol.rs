//! Validate symbols: a realized symbol passes, a tampered one reports
//! exactly which condition broke.
//!
//! Run with: cargo run --example validate_symbol

use genus::forms::QuadForm;
use genus::jordan::TwoData;
use genus::symbol::{genus_symbol, validate_symbol};
use num_bigint::BigInt;

fn main() {
    let q = QuadForm::from_diagonal(&[1, 2, 15].map(BigInt::from).to_vec());
    let s = genus_symbol(&q).expect("nonsingular");
    let report = validate_symbol(&s);
    println!("realized symbol valid: {}", report.valid());

    // Forcing an impossible oddity breaks the oddity condition.
    let mut bad = s.clone();
    let comp = bad.components.get_mut(&BigInt::from(2)).unwrap();
    comp[0].two = Some(TwoData { type_ii: false, oddity: 5 });
    let report = validate_symbol(&bad);
    println!("tampered symbol valid: {}", report.valid());
    for v in &report.violations {
        println!("  violation: {v}");
    }

    // Flipping one sign breaks the determinant condition.
    let mut bad = s;
    let comp = bad.components.get_mut(&BigInt::from(3)).unwrap();
    comp[0].sign = -comp[0].sign;
    let report = validate_symbol(&bad);
    println!("sign-flipped symbol: determinant_ok = {}", report.determinant_ok);
}
