//! Construct an integral quadratic form in a given genus and verify the
//! result.
//!
//! Run with: cargo run --example generate_form

use genus::forms::QuadForm;
use genus::generate::{generate_form, verify_membership, GenerateOptions};
use genus::symbol::{genus_symbol, matrix_to_json, symbol_to_json};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let target = QuadForm::from_diagonal(&[2, 3, 5, 7].map(BigInt::from).to_vec());
    let s = genus_symbol(&target).expect("nonsingular");
    println!("target genus: {}", symbol_to_json(&s));

    let opts = GenerateOptions { retries: 16, collect_trace: true };
    let (q, trace) = generate_form(&s, &mut rng, &opts).expect("valid genus");
    println!("generated member: {}", matrix_to_json(&q));
    println!("det = {} (target {})", q.det(), target.det());

    for level in &trace.levels {
        println!(
            "level n={}: t={}, gcd={}, child det={}",
            level.n, level.t, level.gcd, level.child_det
        );
    }

    let report = verify_membership(&q, &s).unwrap();
    println!("member of the genus: {}", report.member);
}
