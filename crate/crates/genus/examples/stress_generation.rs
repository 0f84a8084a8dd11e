//! Robustness sweep: generate members for adversarial genera with deep
//! 2-adic structure and report the certification rate.
//!
//! Two-adically equivalent forms can normalize to different symbols; the
//! certifier bridges most presentations (within-scale rewrites and
//! cross-scale unit walks) but deliberately excludes sign walks through
//! even blocks, so a small fraction of adversarial runs surface as the
//! retryable "could not be certified" error rather than as output.
//!
//! Run with: cargo run --release --example stress_generation

use genus::forms::{Mat, QuadForm};
use genus::generate::{generate_form, verify_membership, GenerateOptions};
use genus::localform::{t_minus, t_plus};
use genus::symbol::genus_symbol;
use genus::zmod::big;
use genus::Error;
use num_traits::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn main() {
    let mut rng = ChaCha20Rng::seed_from_u64(777);
    let mut done = 0usize;
    let mut certified = 0usize;
    let mut uncertified = 0usize;
    let mut fallbacks = 0usize;
    while done < 1000 {
        let style = rng.gen_range(0..3);
        let q = match style {
            // Dense with even-biased entries: deep 2-adic scales.
            0 => {
                let n = rng.gen_range(2..=6usize);
                let mut m = Mat::zero(n, n);
                for i in 0..n {
                    for j in 0..=i {
                        let base = rng.gen_range(-6..=6i64);
                        let mult = [1i64, 2, 2, 4][rng.gen_range(0..4)];
                        let v = big(base * mult);
                        *m.at_mut(i, j) = v.clone();
                        *m.at_mut(j, i) = v;
                    }
                }
                match QuadForm::new(m) {
                    Ok(q) => q,
                    Err(_) => continue,
                }
            }
            // Scaled even blocks mixed with scaled odd entries.
            1 => {
                let mut parts = Vec::new();
                let mut dims = 0;
                let n = rng.gen_range(2..=6usize);
                while dims < n {
                    if dims + 2 <= n && rng.gen_bool(0.4) {
                        let b = if rng.gen_bool(0.5) { t_plus() } else { t_minus() };
                        parts.push(b.scale(&big(1 << rng.gen_range(0..3))));
                        dims += 2;
                    } else {
                        let u = [1i64, 3, 5, 7, -1, -3][rng.gen_range(0..6)];
                        let s = 1i64 << rng.gen_range(0..4);
                        parts.push(QuadForm::from_diagonal(&[big(u * s)]));
                        dims += 1;
                    }
                }
                QuadForm::direct_sum(&parts)
            }
            // Dense with one row forced to high 2-adic order.
            _ => {
                let n = rng.gen_range(3..=5usize);
                let mut m = Mat::zero(n, n);
                for i in 0..n {
                    for j in 0..=i {
                        let v = big(rng.gen_range(-12..=12i64) * if i == 0 { 8 } else { 1 });
                        *m.at_mut(i, j) = v.clone();
                        *m.at_mut(j, i) = v;
                    }
                }
                match QuadForm::new(m) {
                    Ok(q) => q,
                    Err(_) => continue,
                }
            }
        };
        let det = q.det();
        if det.is_zero() || det.abs() > big(80_000_000) {
            continue;
        }
        let s = match genus_symbol(&q) {
            Ok(s) => s,
            Err(_) => continue,
        };
        done += 1;
        let opts = GenerateOptions { retries: 16, collect_trace: false };
        match generate_form(&s, &mut rng, &opts) {
            Ok((out, _)) => {
                let check = verify_membership(&out, &s).expect("nonsingular");
                assert!(check.member, "verified output must be a member");
                certified += 1;
                if check.used_equivalence_fallback {
                    fallbacks += 1;
                }
            }
            Err(Error::EquivalenceNotFound(_)) | Err(Error::GenerationFailed(_)) => {
                uncertified += 1;
            }
            Err(e) => panic!("hard failure: {e}"),
        }
    }
    println!(
        "{done} adversarial genera: {certified} certified ({fallbacks} via the \
equivalence fallback), {uncertified} hit the documented even-block walk limit"
    );
}
