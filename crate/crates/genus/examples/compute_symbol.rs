//! Compute and print the genus symbol of a few quadratic forms.
//!
//! Run with: cargo run --example compute_symbol

use genus::forms::QuadForm;
use genus::symbol::{det_of_symbol, genus_symbol, symbol_to_json};
use num_bigint::BigInt;

fn diag(entries: &[i64]) -> QuadForm {
    QuadForm::from_diagonal(&entries.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>())
}

fn show(label: &str, q: &QuadForm) {
    let s = genus_symbol(q).expect("nonsingular");
    println!("{label}:");
    println!("  symbol = {}", symbol_to_json(&s));
    println!("  det    = {}", det_of_symbol(&s));
    println!();
}

fn main() {
    show("identity of rank 4", &QuadForm::identity(4));
    show("diag(1, 3)", &diag(&[1, 3]));
    show("diag(2, 6)", &diag(&[2, 6]));
    show("indefinite diag(1, -1, 5)", &diag(&[1, -1, 5]));

    // An even 2 x 2 block: no odd diagonal entry survives 2-adically.
    let mut even = QuadForm::from_diagonal(&[BigInt::from(2), BigInt::from(4)]);
    even.set(0, 1, BigInt::from(1));
    show("even block [[2,1],[1,4]]", &even);
}
