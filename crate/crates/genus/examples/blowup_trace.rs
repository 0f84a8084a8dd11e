//! Watch the determinant ledger across recursion levels: the child
//! determinant is exactly t^(n-2) times the reduced determinant, odd-prime
//! valuations stay flat, and only even-block steps grow the power of two.
//!
//! Run with: cargo run --release --example blowup_trace

use genus::forms::QuadForm;
use genus::generate::{generate_form, GenerateOptions};
use genus::symbol::genus_symbol;
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    let q = QuadForm::identity(6);
    let s = genus_symbol(&q).unwrap();
    let opts = GenerateOptions { retries: 16, collect_trace: true };
    let (out, trace) = generate_form(&s, &mut rng, &opts).unwrap();
    println!("generated a rank-6 unimodular form, det = {}", out.det());
    println!("{:<4} {:<12} {:<14} {:<10} even-block", "n", "t", "det(Sym*)", "gcd");
    for level in &trace.levels {
        println!(
            "{:<4} {:<12} {:<14} {:<10} {}",
            level.n,
            level.t.to_string(),
            level.det_reduced.to_string(),
            level.gcd.to_string(),
            level.used_even_block
        );
        assert_eq!(
            level.child_det,
            level.t.pow(level.n as u32 - 2) * &level.det_reduced,
            "determinant ledger must balance"
        );
    }
    let _ = BigInt::from(0);
}
