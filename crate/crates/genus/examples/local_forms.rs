//! Realize a symbol locally: per-prime block forms and a glued form
//! congruent to the symbol modulo a composite modulus.
//!
//! Run with: cargo run --example local_forms

use genus::localform::{local_form_p, local_form_q};
use genus::symbol::{genus_symbol, matrix_to_json, p_symbol, two_symbol};
use genus::forms::QuadForm;
use genus::zmod::Factorization;
use num_bigint::BigInt;

fn main() {
    let q = QuadForm::from_diagonal(&[1, 3, 12].map(BigInt::from).to_vec());
    let s = genus_symbol(&q).expect("nonsingular");

    for p in s.primes() {
        let lf = local_form_p(&s, &p).unwrap();
        println!("local form at {p}: {}", matrix_to_json(&lf));
        let roundtrip = if p == BigInt::from(2) {
            two_symbol(&lf).unwrap() == *s.component(&p).unwrap()
        } else {
            p_symbol(&lf, &p).unwrap() == *s.component(&p).unwrap()
        };
        println!("  reproduces the component: {roundtrip}");
    }

    // Glue the local forms modulo 2^5 * 3^3.
    let modulus = BigInt::from(32 * 27);
    let fact = Factorization::from([(BigInt::from(2), 5), (BigInt::from(3), 3)]);
    let glued = local_form_q(&s, &modulus, &fact).unwrap();
    println!("glued form mod {modulus}: {}", matrix_to_json(&glued));
}
