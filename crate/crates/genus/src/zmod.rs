//! Exact modular and integer number theory: p-adic valuations,
//! Legendre/Kronecker symbols, square detection and square roots modulo
//! prime powers, Chinese remaindering, and prime search in arithmetic
//! progressions.
//!
//! Everything is arbitrary precision. Randomized routines take an explicit
//! RNG handle so a fixed seed reproduces the whole pipeline.

use std::collections::BTreeMap;

use num_bigint::{BigInt, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use once_cell::sync::Lazy;
use rand::RngCore;

use crate::error::{Error, Result};

/// Exponent map of a factored positive integer.
pub type Factorization = BTreeMap<BigInt, u32>;

pub fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

/// Canonical residue in `[0, m)`.
pub fn mod_reduce(a: &BigInt, m: &BigInt) -> BigInt {
    a.mod_floor(m)
}

pub fn mod_mul(a: &BigInt, b: &BigInt, m: &BigInt) -> BigInt {
    (a * b).mod_floor(m)
}

pub fn mod_pow(base: &BigInt, exp: &BigInt, m: &BigInt) -> BigInt {
    base.mod_floor(m).modpow(exp, m)
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inv(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let a = a.mod_floor(m);
    let eg = a.extended_gcd(m);
    if eg.gcd.is_one() {
        Some(eg.x.mod_floor(m))
    } else {
        None
    }
}

static SMALL_PRIMES: Lazy<Vec<u64>> = Lazy::new(|| {
    let mut sieve = vec![true; 1 << 16];
    sieve[0] = false;
    sieve[1] = false;
    for i in 2..sieve.len() {
        if sieve[i] {
            let mut j = i * i;
            while j < sieve.len() {
                sieve[j] = false;
                j += i;
            }
        }
    }
    (0..sieve.len()).filter(|&i| sieve[i]).map(|i| i as u64).collect()
});

/// Miller-Rabin with 64 fixed prime bases. Composites slip through with
/// probability well below 2^-128, which is already dominated by the
/// Las Vegas failure budget of the callers.
pub fn is_probable_prime(n: &BigInt) -> bool {
    if n <= &BigInt::one() {
        return false;
    }
    for &sp in SMALL_PRIMES.iter().take(64) {
        let p = BigInt::from(sp);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let n_minus_1: BigInt = n - 1;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &sp in SMALL_PRIMES.iter().take(64) {
        let mut x = mod_pow(&BigInt::from(sp), &d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = mod_mul(&x, &x, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A prime `p`, an exponent `k`, the working modulus `p^k`, and the
/// precision pad `k_p` (3 for p = 2, 1 otherwise).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalContext {
    pub p: BigInt,
    pub k: u32,
    pub modulus: BigInt,
    pub kp: u32,
}

impl LocalContext {
    pub fn new(p: BigInt, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::Internal("LocalContext needs k >= 1".into()));
        }
        if !is_probable_prime(&p) {
            return Err(Error::Internal(format!("{p} is not prime")));
        }
        let kp = if p == big(2) { 3 } else { 1 };
        let modulus = p.pow(k);
        Ok(LocalContext { p, k, modulus, kp })
    }

    pub fn is_two(&self) -> bool {
        self.p == big(2)
    }
}

/// `kp` pad for a prime: 3 at p = 2, else 1.
pub fn kp_of(p: &BigInt) -> u32 {
    if p == &big(2) {
        3
    } else {
        1
    }
}

/// p-adic valuation with an explicit infinity for 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(u64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn expect_finite(self) -> u64 {
        self.finite().expect("valuation of zero")
    }
}

/// `a = p^ord * cop` with `gcd(cop, p) = 1`; `ord_p(0)` is infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdCop {
    pub ord: Valuation,
    pub cop: BigInt,
}

pub fn ord_cop(a: &BigInt, p: &BigInt) -> OrdCop {
    if a.is_zero() {
        return OrdCop { ord: Valuation::Infinite, cop: BigInt::zero() };
    }
    // Divide out p, doubling the power while it keeps dividing.
    let mut current = a.clone();
    let mut valuation: u64 = 0;
    loop {
        let (q, r) = current.div_rem(p);
        if !r.is_zero() {
            break;
        }
        valuation += 1;
        current = q;
        let mut power = p * p;
        let mut step = 2u64;
        loop {
            let (q2, r2) = current.div_rem(&power);
            if !r2.is_zero() {
                break;
            }
            current = q2;
            valuation += step;
            power = &power * &power;
            step *= 2;
        }
    }
    OrdCop { ord: Valuation::Finite(valuation), cop: current }
}

pub fn ord_p(a: &BigInt, p: &BigInt) -> Valuation {
    ord_cop(a, p).ord
}

/// Legendre symbol for odd `p` (0 when p | t); Kronecker symbol at p = 2,
/// which requires odd `t`.
pub fn legendre(t: &BigInt, p: &BigInt) -> i8 {
    if p == &big(2) {
        let r = t.mod_floor(&big(8)).to_i64().unwrap();
        assert!(r % 2 == 1, "Kronecker symbol at 2 needs an odd argument");
        if r == 1 || r == 7 {
            1
        } else {
            -1
        }
    } else {
        let tm = t.mod_floor(p);
        if tm.is_zero() {
            return 0;
        }
        let e = (p - 1) >> 1;
        let r = mod_pow(&tm, &e, p);
        if r.is_one() {
            1
        } else {
            -1
        }
    }
}

/// p-sign of `t`: 0 at 0; the Legendre symbol of the p-coprime part for odd
/// p; the coprime part mod 8 (one of 1,3,5,7) at p = 2.
pub fn sgn_p(t: &BigInt, p: &BigInt) -> i8 {
    if t.is_zero() {
        return 0;
    }
    let oc = ord_cop(t, p);
    if p == &big(2) {
        oc.cop.mod_floor(&big(8)).to_i8().unwrap()
    } else {
        legendre(&oc.cop, p)
    }
}

/// Is `t` a square modulo `p^k`? Zero counts as a square. For nonzero `t`
/// this is: even valuation and trivial p-sign of the coprime part.
pub fn is_square_mod_pk(t: &BigInt, ctx: &LocalContext) -> bool {
    let t = mod_reduce(t, &ctx.modulus);
    if t.is_zero() {
        return true;
    }
    let oc = ord_cop(&t, &ctx.p);
    let ord = oc.ord.expect_finite();
    if ord % 2 != 0 {
        return false;
    }
    if ctx.is_two() {
        // cop < 2^(k-ord); classes other than 1 mod min(8, 2^(k-ord)) are
        // obstructed, and cop ≡ 1 mod 8 is always liftable.
        oc.cop.mod_floor(&big(8)).is_one() || oc.cop.is_one()
    } else {
        legendre(&oc.cop, &ctx.p) == 1
    }
}

/// Square root of a unit mod an odd prime, via Tonelli-Shanks.
fn tonelli_shanks(c: &BigInt, p: &BigInt) -> BigInt {
    let c = c.mod_floor(p);
    if c.is_zero() || c.is_one() {
        return c;
    }
    debug_assert_eq!(legendre(&c, p), 1);
    if p.mod_floor(&big(4)) == big(3) {
        let e = (p + 1) >> 2;
        return mod_pow(&c, &e, p);
    }
    let p_minus_1: BigInt = p - 1;
    let s = p_minus_1.trailing_zeros().unwrap();
    let q = &p_minus_1 >> s;
    let z = deterministic_nonresidue(p).expect("nonresidue exists for odd p");
    let mut m = s;
    let mut cc = mod_pow(&z, &q, p);
    let mut tt = mod_pow(&c, &q, p);
    let mut r = mod_pow(&c, &((&q + 1) >> 1), p);
    while !tt.is_one() {
        let mut i = 0u64;
        let mut t2 = tt.clone();
        while !t2.is_one() {
            t2 = mod_mul(&t2, &t2, p);
            i += 1;
        }
        let mut b = cc.clone();
        for _ in 0..(m - i - 1) {
            b = mod_mul(&b, &b, p);
        }
        m = i;
        cc = mod_mul(&b, &b, p);
        tt = mod_mul(&tt, &cc, p);
        r = mod_mul(&r, &b, p);
    }
    r
}

/// Lift `r0^2 ≡ c (mod p)` to a root mod `p^k`, odd p.
fn hensel_sqrt_odd(r0: &BigInt, c: &BigInt, p: &BigInt, k: u32) -> BigInt {
    let mut r = r0.clone();
    let mut m = 1u32;
    let mut pm = p.clone();
    while m < k {
        let pm_next = &pm * p;
        let f = (&r * &r - c).mod_floor(&pm_next);
        if !f.is_zero() {
            let delta = (&f / &pm).mod_floor(p);
            let inv = mod_inv(&(big(2) * &r), p).expect("2r is a unit");
            let adj = mod_mul(&delta, &inv, p);
            r = (&r - adj * &pm).mod_floor(&pm_next);
        }
        pm = pm_next;
        m += 1;
    }
    r.mod_floor(&p.pow(k))
}

/// Root of `c ≡ 1 (mod 8)` modulo `2^m`.
fn two_adic_sqrt(c: &BigInt, m: u32) -> BigInt {
    if m <= 3 {
        return BigInt::one();
    }
    let mut r = BigInt::one();
    for j in 3..m {
        let modulus = BigInt::one() << (j + 1);
        let f = (&r * &r - c).mod_floor(&modulus);
        if !f.is_zero() {
            r += BigInt::one() << (j - 1);
        }
    }
    r.mod_floor(&(BigInt::one() << m))
}

/// A square root of nonzero `t` modulo `p^k`. Any valid root may be
/// returned.
pub fn sqrt_mod_pk(t: &BigInt, ctx: &LocalContext) -> Result<BigInt> {
    let t = mod_reduce(t, &ctx.modulus);
    if t.is_zero() || !is_square_mod_pk(&t, ctx) {
        return Err(Error::NotASquare);
    }
    let oc = ord_cop(&t, &ctx.p);
    let ord = oc.ord.expect_finite() as u32;
    let rem = ctx.k - ord;
    let unit_root = if ctx.is_two() {
        two_adic_sqrt(&oc.cop, rem)
    } else {
        let r0 = tonelli_shanks(&oc.cop, &ctx.p);
        hensel_sqrt_odd(&r0, &oc.cop, &ctx.p, rem)
    };
    let x = ctx.p.pow(ord / 2) * unit_root;
    let x = mod_reduce(&x, &ctx.modulus);
    debug_assert_eq!(mod_reduce(&(&x * &x), &ctx.modulus), t);
    Ok(x)
}

fn deterministic_nonresidue(p: &BigInt) -> Option<BigInt> {
    // Scan 2..3(ln p)^2/2; under GRH the least nonresidue lies below this.
    let bits = p.bits() as f64;
    let lnp = bits * std::f64::consts::LN_2;
    let bound = (1.5 * lnp * lnp).ceil() as u64 + 2;
    let mut cand = big(2);
    for _ in 0..bound {
        if legendre(&cand, p) == -1 {
            return Some(cand);
        }
        cand += 1;
        if &cand >= p {
            return None;
        }
    }
    None
}

/// Least quadratic nonresidue modulo an odd prime; falls back to rejection
/// sampling if the deterministic scan somehow fails.
pub fn find_nonresidue(p: &BigInt, rng: &mut dyn RngCore) -> Result<BigInt> {
    debug_assert!(p > &big(2));
    if let Some(t) = deterministic_nonresidue(p) {
        return Ok(t);
    }
    for _ in 0..256 {
        let cand = rng.gen_bigint_range(&big(2), p);
        if legendre(&cand, p) == -1 {
            return Ok(cand);
        }
    }
    Err(Error::SearchExhausted(format!("no quadratic nonresidue found modulo {p}")))
}

/// Solve the simultaneous congruences `x ≡ vᵢ (mod mᵢ)` for pairwise
/// coprime moduli. Returns `(x, ∏ mᵢ)`.
pub fn crt(pairs: &[(BigInt, BigInt)]) -> Result<(BigInt, BigInt)> {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for (v, mi) in pairs {
        if mi <= &BigInt::zero() {
            return Err(Error::NonCoprimeModuli);
        }
        let g = m.gcd(mi);
        if !g.is_one() {
            return Err(Error::NonCoprimeModuli);
        }
        // x + m*s ≡ v (mod mi)
        let inv = mod_inv(&m, mi).ok_or(Error::NonCoprimeModuli)?;
        let s = mod_mul(&(v - &x), &inv, mi);
        x += &m * s;
        m *= mi;
        x = x.mod_floor(&m);
    }
    Ok((x, m))
}

/// Is `num/den` a p-antisquare: odd valuation and an obstructed unit class
/// (nonresidue for odd p; ±3 mod 8 at p = 2)?
pub fn is_antisquare(num: &BigInt, den: &BigInt, p: &BigInt) -> bool {
    assert!(!den.is_zero());
    if num.is_zero() {
        return false;
    }
    let on = ord_cop(num, p);
    let od = ord_cop(den, p);
    let alpha = on.ord.expect_finite() as i64 - od.ord.expect_finite() as i64;
    if alpha.rem_euclid(2) == 0 {
        return false;
    }
    if p == &big(2) {
        let inv = mod_inv(&od.cop, &big(8)).unwrap();
        let u = mod_mul(&on.cop, &inv, &big(8)).to_i64().unwrap();
        u == 3 || u == 5
    } else {
        legendre(&on.cop, p) != legendre(&od.cop, p)
    }
}

/// Find a prime `℘ ≡ a (mod q)` (merged with any extra congruences),
/// sampled from the lowest q^3-sized window as the progression density
/// bound prescribes.
pub fn find_prime_in_ap(
    a: &BigInt,
    q: &BigInt,
    rng: &mut dyn RngCore,
    extra: &[(BigInt, BigInt)],
) -> Result<BigInt> {
    let mut pairs = vec![(a.clone(), q.clone())];
    pairs.extend_from_slice(extra);
    let (a0, m) = crt(&pairs)?;
    if !a0.gcd(&m).is_one() {
        return Err(Error::SearchExhausted(format!(
            "residue {a0} shares a factor with modulus {m}; no primes in this class"
        )));
    }
    let window = &m * &m;
    let bound_bits = (3 * m.bits()).max(8);
    let retries = 16u64.saturating_mul(bound_bits * bound_bits).min(4_000_000);
    for _ in 0..retries {
        let z = rng.gen_bigint_range(&BigInt::zero(), &window);
        let cand = &a0 + z * &m;
        if cand < big(3) {
            continue;
        }
        if is_probable_prime(&cand) {
            return Ok(cand);
        }
    }
    Err(Error::SearchExhausted(format!("no prime ≡ {a0} mod {m} found in {retries} samples")))
}

/// Multiply `q` by `p^{k_p}` for every prime `p | 2q`: the working modulus
/// that pads each prime with enough precision for symbol extraction.
pub fn make_qbar(q: &BigInt, fact: &Factorization) -> Result<(BigInt, Factorization)> {
    if q.sign() == num_bigint::Sign::Minus || q.is_zero() {
        return Err(Error::BadFactorization);
    }
    let mut prod = BigInt::one();
    for (p, e) in fact {
        prod *= p.pow(*e);
    }
    if &prod != q {
        return Err(Error::BadFactorization);
    }
    let mut out = fact.clone();
    let two = big(2);
    *out.entry(two.clone()).or_insert(0) += 3;
    for (p, e) in out.iter_mut() {
        if p != &two && fact.contains_key(p) {
            *e += 1;
        }
    }
    let mut qbar = BigInt::one();
    for (p, e) in &out {
        qbar *= p.pow(*e);
    }
    Ok((qbar, out))
}

/// Factor `n > 0` by trial division up to 10^6, then accept a prime
/// cofactor; anything harder needs caller-supplied hints.
pub fn factorize(n: &BigInt, hints: &Factorization) -> Result<Factorization> {
    if n.is_zero() || n.sign() == num_bigint::Sign::Minus {
        return Err(Error::BadFactorization);
    }
    let mut rest = n.clone();
    let mut out = Factorization::new();
    for (p, _) in hints {
        if !is_probable_prime(p) {
            return Err(Error::BadFactorization);
        }
        loop {
            let (q, r) = rest.div_rem(p);
            if r.is_zero() {
                *out.entry(p.clone()).or_insert(0) += 1;
                rest = q;
            } else {
                break;
            }
        }
    }
    for &sp in SMALL_PRIMES.iter() {
        let p = BigInt::from(sp);
        if &(&p * &p) > &rest {
            break;
        }
        while (&rest % &p).is_zero() {
            *out.entry(p.clone()).or_insert(0) += 1;
            rest /= &p;
        }
    }
    // SMALL_PRIMES stops at 2^16; continue trial division up to 10^6.
    let mut d = big(65537);
    let million = big(1_000_000);
    while &(&d * &d) <= &rest && d <= million {
        while (&rest % &d).is_zero() {
            *out.entry(d.clone()).or_insert(0) += 1;
            rest /= &d;
        }
        d += 2;
    }
    if rest.is_one() {
        return Ok(out);
    }
    if &rest <= &(&million * &million) || is_probable_prime(&rest) {
        if is_probable_prime(&rest) {
            *out.entry(rest).or_insert(0) += 1;
            return Ok(out);
        }
        // rest <= 10^12 composite means a factor <= 10^6 was missed: cannot happen.
    }
    Err(Error::FactorizationNeeded(rest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng() -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(7)
    }

    #[test]
    fn ord_cop_basics() {
        let oc = ord_cop(&big(18), &big(3));
        assert_eq!(oc.ord, Valuation::Finite(2));
        assert_eq!(oc.cop, big(2));
        let oc = ord_cop(&big(7), &big(2));
        assert_eq!(oc.ord, Valuation::Finite(0));
        assert_eq!(oc.cop, big(7));
        let oc = ord_cop(&BigInt::zero(), &big(5));
        assert_eq!(oc.ord, Valuation::Infinite);
        assert!(oc.cop.is_zero());
    }

    #[test]
    fn ord_cop_reconstructs() {
        for p in [2i64, 3, 5, 7] {
            for a in -300i64..=300 {
                if a == 0 {
                    continue;
                }
                let oc = ord_cop(&big(a), &big(p));
                let v = oc.ord.expect_finite();
                assert_eq!(big(p).pow(v as u32) * &oc.cop, big(a));
                assert!(oc.cop.gcd(&big(p)).is_one());
            }
        }
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre(&big(2), &big(7)), 1);
        assert_eq!(legendre(&big(1), &big(11)), 1);
        assert_eq!(legendre(&big(3), &big(2)), -1);
        assert_eq!(legendre(&big(7), &big(2)), 1);
        assert_eq!(legendre(&big(0), &big(5)), 0);
    }

    #[test]
    fn legendre_multiplicative() {
        let mut r = rng();
        for p in [3i64, 7, 11, 101] {
            let p = big(p);
            for _ in 0..50 {
                let a = r.gen_bigint_range(&big(1), &p);
                let b = r.gen_bigint_range(&big(1), &p);
                assert_eq!(legendre(&(&a * &b), &p), legendre(&a, &p) * legendre(&b, &p));
            }
        }
    }

    #[test]
    fn quadratic_reciprocity_small() {
        let odd_primes: Vec<i64> =
            SMALL_PRIMES.iter().skip(1).map(|&p| p as i64).take_while(|&p| p < 200).collect();
        for &p1 in &odd_primes {
            for &p2 in &odd_primes {
                if p1 == p2 {
                    continue;
                }
                let lhs = legendre(&big(p1), &big(p2));
                let rhs = legendre(&big(p2), &big(p1));
                if p1 % 4 == 3 && p2 % 4 == 3 {
                    assert_eq!(lhs, -rhs);
                } else {
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn sgn_p_values() {
        assert_eq!(sgn_p(&big(40), &big(2)), 5);
        assert_eq!(sgn_p(&BigInt::zero(), &big(3)), 0);
        assert_eq!(sgn_p(&big(12), &big(3)), 1);
    }

    #[test]
    fn squares_match_exhaustive() {
        for p in [2i64, 3, 5] {
            for k in 1..=6u32 {
                let ctx = LocalContext::new(big(p), k).unwrap();
                let m = big(p).pow(k);
                let mut squares = std::collections::HashSet::new();
                let mut x = BigInt::zero();
                while &x < &m {
                    squares.insert(mod_reduce(&(&x * &x), &m));
                    x += 1;
                }
                let mut t = BigInt::zero();
                while &t < &m {
                    assert_eq!(
                        is_square_mod_pk(&t, &ctx),
                        squares.contains(&t),
                        "p={p} k={k} t={t}"
                    );
                    t += 1;
                }
            }
        }
    }

    #[test]
    fn sqrt_examples() {
        let ctx = LocalContext::new(big(2), 5).unwrap();
        let x = sqrt_mod_pk(&big(17), &ctx).unwrap();
        assert_eq!(mod_reduce(&(&x * &x), &big(32)), big(17));
        assert!(sqrt_mod_pk(&big(5), &LocalContext::new(big(2), 3).unwrap()).is_err());

        let ctx = LocalContext::new(big(3), 3).unwrap();
        let x = sqrt_mod_pk(&big(4), &ctx).unwrap();
        assert_eq!(mod_reduce(&(&x * &x), &big(27)), big(4));

        let ctx = LocalContext::new(big(3), 4).unwrap();
        let x = sqrt_mod_pk(&big(63), &ctx).unwrap();
        assert_eq!(mod_reduce(&(&x * &x), &big(81)), big(63));
    }

    #[test]
    fn sqrt_roundtrip_exhaustive() {
        for p in [2i64, 3, 5, 7] {
            for k in 1..=5u32 {
                let ctx = LocalContext::new(big(p), k).unwrap();
                let m = big(p).pow(k);
                let mut t = big(1);
                while &t < &m {
                    if is_square_mod_pk(&t, &ctx) {
                        let x = sqrt_mod_pk(&t, &ctx).unwrap();
                        assert_eq!(mod_reduce(&(&x * &x), &m), t, "p={p} k={k} t={t}");
                    }
                    t += 1;
                }
            }
        }
    }

    #[test]
    fn nonresidue_small() {
        let mut r = rng();
        assert_eq!(find_nonresidue(&big(7), &mut r).unwrap(), big(3));
        assert_eq!(find_nonresidue(&big(3), &mut r).unwrap(), big(2));
        assert_eq!(find_nonresidue(&big(17), &mut r).unwrap(), big(3));
    }

    #[test]
    fn residue_sums() {
        // Every residue is a sum of two nonresidues and vice versa, p < 100.
        for &p in SMALL_PRIMES.iter().skip(1).take_while(|&&p| p < 100) {
            let p = big(p as i64);
            let mut t = big(1);
            while &t < &p {
                let want = -legendre(&t, &p);
                let mut found = false;
                let mut a = big(1);
                while &a < &p {
                    let b = mod_reduce(&(&t - &a), &p);
                    if !b.is_zero() && legendre(&a, &p) == want && legendre(&b, &p) == want {
                        found = true;
                        break;
                    }
                    a += 1;
                }
                assert!(found, "p={p} t={t}");
                t += 1;
            }
        }
    }

    #[test]
    fn crt_examples() {
        let (x, m) = crt(&[(big(2), big(9)), (big(3), big(4))]).unwrap();
        assert_eq!(m, big(36));
        assert_eq!(x, big(11));
        let (x, _) = crt(&[(BigInt::zero(), big(77))]).unwrap();
        assert!(x.is_zero());
        let (x, m) = crt(&[(big(1), big(3)), (big(1), big(5)), (big(1), big(7))]).unwrap();
        assert_eq!((x, m), (big(1), big(105)));
        assert!(crt(&[(big(1), big(4)), (big(1), big(6))]).is_err());
    }

    #[test]
    fn antisquare_examples() {
        assert!(!is_antisquare(&big(3), &big(1), &big(3)));
        assert!(is_antisquare(&big(6), &big(1), &big(3)));
        assert!(is_antisquare(&big(1), &big(6), &big(3)));
        // At 2 only unit classes ±3 mod 8 obstruct.
        assert!(!is_antisquare(&big(2), &big(1), &big(2)));
        assert!(is_antisquare(&big(6), &big(1), &big(2)));
        assert!(!is_antisquare(&big(14), &big(1), &big(2)));
    }

    #[test]
    fn prime_in_ap() {
        let mut r = rng();
        for (a, q) in [(1i64, 8i64), (2, 3), (3, 4), (5, 6)] {
            let p = find_prime_in_ap(&big(a), &big(q), &mut r, &[]).unwrap();
            assert!(is_probable_prime(&p));
            assert_eq!(p.mod_floor(&big(q)), big(a));
        }
    }

    #[test]
    fn qbar_examples() {
        let f = Factorization::from([(big(3), 1)]);
        let (qb, _) = make_qbar(&big(3), &f).unwrap();
        assert_eq!(qb, big(72));
        let (qb, _) = make_qbar(&big(1), &Factorization::new()).unwrap();
        assert_eq!(qb, big(8));
        let f = Factorization::from([(big(2), 2), (big(3), 1)]);
        let (qb, _) = make_qbar(&big(12), &f).unwrap();
        assert_eq!(qb, big(288));
    }

    #[test]
    fn factorize_basics() {
        let f = factorize(&big(360), &Factorization::new()).unwrap();
        assert_eq!(f, Factorization::from([(big(2), 3), (big(3), 2), (big(5), 1)]));
        // Prime cofactor above the trial bound is accepted...
        let p = big(1_000_003);
        let f = factorize(&(&p * 4), &Factorization::new()).unwrap();
        assert_eq!(f, Factorization::from([(big(2), 2), (p.clone(), 1)]));
        // ...but a composite one is an error unless hinted.
        assert!(factorize(&(&p * &p), &Factorization::new()).is_err());
        let hints = Factorization::from([(p.clone(), 1)]);
        let f = factorize(&(&p * &p), &hints).unwrap();
        assert_eq!(f, Factorization::from([(p, 2)]));
    }
}
