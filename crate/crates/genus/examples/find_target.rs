//! Find an integer with a primitive representation in a genus, across the
//! dimension cases (high dimension, three, and the three two-dimensional
//! shapes).
//!
//! Run with: cargo run --example find_target

use genus::findt::find_t;
use genus::forms::QuadForm;
use genus::localform::t_plus;
use genus::symbol::{genus_symbol, reduce_symbol};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn diag(entries: &[i64]) -> QuadForm {
    QuadForm::from_diagonal(&entries.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>())
}

fn show(label: &str, q: &QuadForm, rng: &mut ChaCha20Rng) {
    let s = genus_symbol(q).expect("nonsingular");
    let (s, _) = reduce_symbol(&s);
    let plan = find_t(&s, rng).expect("valid symbol");
    println!("{label}: t = {}", plan.t);
    if let Some(w) = &plan.aux_prime {
        println!("  auxiliary prime = {w}");
    }
    for (p, case) in &plan.cases {
        println!("  case at {p}: {case:?}");
    }
    println!();
}

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(42);
    show("rank 5 identity", &QuadForm::identity(5), &mut rng);
    show("diag(1, 3, 3, 9)", &diag(&[1, 3, 3, 9]), &mut rng);
    show("rank 3 identity", &QuadForm::identity(3), &mut rng);
    show("even 2x2 block", &t_plus(), &mut rng);
    show("diag(3, 5)", &diag(&[3, 5]), &mut rng);
    show("diag(1, 2)", &diag(&[1, 2]), &mut rng);
}
