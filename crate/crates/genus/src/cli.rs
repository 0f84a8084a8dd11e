//! Command implementations behind the `qfgenus` binary: JSON file I/O,
//! seed handling, and a stable exit-code contract.
//!
//! Exit codes: 0 success; 1 definitive negative (invalid input, failed
//! verification, inequivalence); 2 exhausted randomized search (retry
//! with another seed); 3 broken internal invariant.

use std::path::Path;

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::findt::{find_t, TargetPlan};
use crate::forms::QuadForm;
use crate::generate::{
    find_equivalence_mod_pk, generate_form, verify_membership, GenerateOptions, GenerateTrace,
};
use crate::localform::{local_form_p, local_form_q};
use crate::oracle;
use crate::represent::LocalCase;
use crate::symbol::{
    genus_symbol_with_hints, matrix_from_json, matrix_to_json, symbol_from_json, symbol_to_json,
    validate_symbol, GenusSymbol,
};
use crate::zmod::{self, Factorization, LocalContext};

/// A parsed command, ready to run.
#[derive(Debug, Clone)]
pub enum Command {
    Symbol { form: Value, hints: Factorization },
    Validate { symbol: Value },
    LocalForm { symbol: Value, prime: Option<BigInt>, modulus: Option<BigInt> },
    FindT { symbol: Value, seed: u64 },
    Generate { symbol: Value, seed: u64, retries: u32, trace: bool },
    Verify { form: Value, symbol: Value },
    OracleCaseGrids { which: Option<oracle::CaseGrid> },
    OracleRepDim4,
    OracleEquiv { a: Value, b: Value, p: BigInt, k: u32 },
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Parse "p:e,p:e" factorization hints.
pub fn parse_hints(s: &str) -> Result<Factorization> {
    let mut out = Factorization::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (p, e) = part
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("bad hint `{part}`, expected p:e")))?;
        let p: BigInt =
            p.trim().parse().map_err(|_| Error::Parse(format!("bad prime `{p}`")))?;
        let e: u32 =
            e.trim().parse().map_err(|_| Error::Parse(format!("bad exponent `{e}`")))?;
        out.insert(p, e);
    }
    Ok(out)
}

fn case_json(case: &LocalCase) -> Value {
    match case {
        LocalCase::UnitFirst { index } => json!({"kind": "unit-first", "index": index}),
        LocalCase::TwoEntry { hi, lo } => json!({"kind": "two-entry", "hi": hi, "lo": lo}),
        LocalCase::TypeTwo { index } => json!({"kind": "even-block", "index": index}),
        LocalCase::FourEntry => json!({"kind": "four-entry"}),
        LocalCase::Generic => json!({"kind": "generic"}),
    }
}

fn plan_json(plan: &TargetPlan) -> Value {
    let mut exps = Map::new();
    for (p, e) in &plan.exponents {
        exps.insert(p.to_string(), json!(e));
    }
    let mut cases = Map::new();
    for (p, c) in &plan.cases {
        cases.insert(p.to_string(), case_json(c));
    }
    let mut out = Map::new();
    out.insert("t".into(), json!(plan.t.to_string()));
    out.insert("negative".into(), json!(plan.negative));
    out.insert("exponents".into(), Value::Object(exps));
    out.insert(
        "aux_prime".into(),
        plan.aux_prime.as_ref().map(|w| json!(w.to_string())).unwrap_or(Value::Null),
    );
    out.insert("square_part".into(), json!(plan.square_part.to_string()));
    out.insert("cases".into(), Value::Object(cases));
    if let Some(stats) = &plan.dim2 {
        out.insert(
            "dim2".into(),
            json!({
                "rho": stats.rho,
                "eps": stats.eps,
                "counts": stats.counts,
                "sum_excess": stats.sum_excess,
            }),
        );
    }
    Value::Object(out)
}

fn trace_json(trace: &GenerateTrace) -> Value {
    Value::Array(
        trace
            .levels
            .iter()
            .map(|l| {
                let mut orders = Map::new();
                for (p, o) in &l.orders {
                    orders.insert(p.to_string(), json!(o));
                }
                json!({
                    "n": l.n,
                    "gcd": l.gcd.to_string(),
                    "det_reduced": l.det_reduced.to_string(),
                    "t": l.t.to_string(),
                    "used_even_block": l.used_even_block,
                    "orders": Value::Object(orders),
                    "child_det": l.child_det.to_string(),
                })
            })
            .collect(),
    )
}

fn load_symbol(v: &Value) -> Result<GenusSymbol> {
    symbol_from_json(v)
}

fn load_form(v: &Value) -> Result<QuadForm> {
    matrix_from_json(v)
}

/// Run one command; returns (exit code, JSON written to stdout).
pub fn run(cmd: &Command) -> (i32, Value) {
    match execute(cmd) {
        Ok((code, v)) => (code, v),
        Err(e) => {
            let code = match e {
                Error::SearchExhausted(_) | Error::GenerationFailed(_) => 2,
                Error::Internal(_)
                | Error::ChildSymbolInvalid(_)
                | Error::NonIntegralAssembly
                | Error::ScaleOverflow => 3,
                _ => 1,
            };
            (code, json!({"error": e.to_string()}))
        }
    }
}

fn execute(cmd: &Command) -> Result<(i32, Value)> {
    match cmd {
        Command::Symbol { form, hints } => {
            let q = load_form(form)?;
            let s = genus_symbol_with_hints(&q, hints)?;
            Ok((0, symbol_to_json(&s)))
        }
        Command::Validate { symbol } => {
            let s = load_symbol(symbol)?;
            let report = validate_symbol(&s);
            let v = json!({
                "valid": report.valid(),
                "determinant_ok": report.determinant_ok,
                "oddity_ok": report.oddity_ok,
                "jordan_ok": report.jordan_ok,
                "violations": report.violations,
            });
            Ok((if report.valid() { 0 } else { 1 }, v))
        }
        Command::LocalForm { symbol, prime, modulus } => {
            let s = load_symbol(symbol)?;
            match (prime, modulus) {
                (Some(p), None) => {
                    if !zmod::is_probable_prime(p) {
                        return Err(Error::Parse(format!("{p} is not prime")));
                    }
                    let q = local_form_p(&s, p)?;
                    Ok((0, matrix_to_json(&q)))
                }
                (None, Some(m)) => {
                    let fact = zmod::factorize(m, &Factorization::new())?;
                    let q = local_form_q(&s, m, &fact)?;
                    Ok((0, matrix_to_json(&q)))
                }
                _ => Err(Error::Parse("pass exactly one of --prime or --modulus".into())),
            }
        }
        Command::FindT { symbol, seed } => {
            let s = load_symbol(symbol)?;
            let (reduced, _) = crate::symbol::reduce_symbol(&s);
            let mut rng = ChaCha20Rng::seed_from_u64(*seed);
            let plan = find_t(&reduced, &mut rng)?;
            Ok((0, plan_json(&plan)))
        }
        Command::Generate { symbol, seed, retries, trace } => {
            let s = load_symbol(symbol)?;
            let mut rng = ChaCha20Rng::seed_from_u64(*seed);
            let opts = GenerateOptions { retries: *retries, collect_trace: *trace };
            let (q, tr) = generate_form(&s, &mut rng, &opts)?;
            let mut out = matrix_to_json(&q);
            if *trace {
                out.as_object_mut()
                    .unwrap()
                    .insert("trace".into(), trace_json(&tr));
            }
            Ok((0, out))
        }
        Command::Verify { form, symbol } => {
            let q = load_form(form)?;
            let s = load_symbol(symbol)?;
            let report = verify_membership(&q, &s)?;
            let v = json!({
                "member": report.member,
                "used_equivalence_fallback": report.used_equivalence_fallback,
                "reasons": report.reasons,
            });
            Ok((if report.member { 0 } else { 1 }, v))
        }
        Command::OracleCaseGrids { which } => {
            let failures = oracle::appendix_case_failures(*which);
            Ok((if failures == 0 { 0 } else { 1 }, json!({"failures": failures})))
        }
        Command::OracleRepDim4 => {
            let failures = oracle::rep_dim4_failures();
            Ok((if failures == 0 { 0 } else { 1 }, json!({"failures": failures})))
        }
        Command::OracleEquiv { a, b, p, k } => {
            let a = load_form(a)?;
            let b = load_form(b)?;
            let ctx = LocalContext::new(p.clone(), *k)?;
            match oracle::brute_force_equivalence(&a, &b, &ctx)? {
                Some(t) => {
                    let rows: Vec<Value> = (0..t.mat.rows)
                        .map(|i| {
                            Value::Array(
                                (0..t.mat.cols)
                                    .map(|j| Value::String(t.mat.at(i, j).to_string()))
                                    .collect(),
                            )
                        })
                        .collect();
                    Ok((0, json!({"equivalent": true, "transform": rows})))
                }
                None => Ok((1, json!({"equivalent": false}))),
            }
        }
    }
}

/// Seed from a flag, the environment, or 0.
pub fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| std::env::var("QFGENUS_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0)
}

/// An equivalence probe usable from examples: constructive first, then
/// exhaustive.
pub fn equivalence_probe(a: &QuadForm, b: &QuadForm, p: &BigInt, k: u32) -> Result<bool> {
    let ctx = LocalContext::new(p.clone(), k)?;
    match find_equivalence_mod_pk(a, b, &ctx) {
        Ok(_) => Ok(true),
        Err(Error::EquivalenceNotFound(_)) => Ok(false),
        Err(e) => Err(e),
    }
}

pub fn parse_prime(s: &str) -> Result<BigInt> {
    let p: BigInt = s.parse().map_err(|_| Error::Parse(format!("bad integer `{s}`")))?;
    if !zmod::is_probable_prime(&p) {
        return Err(Error::Parse(format!("{p} is not prime")));
    }
    Ok(p)
}
