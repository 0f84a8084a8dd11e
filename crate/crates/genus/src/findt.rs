//! Construct an integer `t` with a primitive representation in a valid
//! reduced genus, together with the per-prime case tags the representation
//! builder consumes.
//!
//! Dimension >= 4 needs no auxiliary prime: the valuations of `t` are read
//! off the first few diagonal entries of each local form. Dimension 3
//! manufactures a prime in a residue class mod 8 unless an even 2-adic
//! block is present, and dimension 2 splits into three cases (even block,
//! odd block with even scale gap, odd scale gap) whose congruence systems
//! are solvable for every valid symbol.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use rand::RngCore;

use crate::error::{Error, Result};
use crate::jordan::Block;
use crate::localform::local_blocks_p;
use crate::represent::{build_local_representation, LocalCase};
use crate::symbol::{
    det_of_symbol, reduce_symbol, validate_symbol, GenusSymbol,
};
use crate::zmod::{self, big, Factorization, LocalContext};

/// The constructed target: its sign, per-prime valuations, optional
/// auxiliary prime, square part, and one representation case per prime
/// that will divide the working modulus.
#[derive(Debug, Clone)]
pub struct TargetPlan {
    pub t: BigInt,
    pub negative: bool,
    pub exponents: BTreeMap<BigInt, u32>,
    pub aux_prime: Option<BigInt>,
    pub square_part: BigInt,
    pub cases: BTreeMap<BigInt, LocalCase>,
    pub dim2: Option<Dim2Stats>,
}

impl TargetPlan {
    /// Factorization of |t|.
    pub fn t_factorization(&self) -> Factorization {
        let mut f = Factorization::new();
        for (p, e) in &self.exponents {
            if *e > 0 {
                f.insert(p.clone(), *e);
            }
        }
        if let Some(w) = &self.aux_prime {
            *f.entry(w.clone()).or_insert(0) += 1;
        }
        f
    }
}

/// Shape data of a reduced 2-dimensional symbol: the sign of the
/// determinant, the definiteness sign, the counts of odd-gap primes per
/// (residue class mod 8, leading-unit class), and the closed-form sum of
/// the odd-prime excesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dim2Stats {
    pub rho: i8,
    pub eps: i8,
    /// counts[d][b]: primes p ≡ (2d+1) mod 8 with leading unit class b
    /// (index 0 = +1, index 1 = -1), over the odd-gap primes only.
    pub counts: [[u32; 2]; 4],
    pub sum_excess: u8,
}

impl Dim2Stats {
    fn count(&self, ds: &[u8], b: Option<usize>) -> u32 {
        let mut acc = 0;
        for d in ds {
            let row = self.counts[(*d as usize - 1) / 2];
            acc += match b {
                Some(i) => row[i],
                None => row[0] + row[1],
            };
        }
        acc
    }

    pub fn s_minus(&self) -> u32 {
        self.count(&[1, 3, 5, 7], Some(1))
    }

    pub fn s35(&self) -> u32 {
        self.count(&[3, 5], None)
    }

    pub fn s37(&self) -> u32 {
        self.count(&[3, 7], None)
    }

    pub fn s57(&self) -> u32 {
        self.count(&[5, 7], None)
    }
}

/// 1 when x(x-1)/2 is odd.
pub fn xi(x: u32) -> u32 {
    if matches!(x % 4, 2 | 3) {
        1
    } else {
        0
    }
}

fn maj(a: u32, b: u32, c: u32) -> u32 {
    if a + b + c >= 2 {
        1
    } else {
        0
    }
}

fn sign_pow(s: i8, e: u32) -> i8 {
    if s == 1 || e % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Diagonal data of the local form at an odd stored prime.
struct OddLocal {
    p: BigInt,
    scales: Vec<u32>,
    units: Vec<BigInt>,
}

fn odd_local(s: &GenusSymbol, p: &BigInt) -> Result<OddLocal> {
    let blocks = local_blocks_p(s, p)?;
    let mut scales = Vec::new();
    let mut units = Vec::new();
    for b in blocks {
        match b {
            Block::TypeI { scale, unit } => {
                scales.push(scale);
                units.push(unit);
            }
            Block::TypeII { .. } => {
                return Err(Error::Internal("odd-prime local form must be diagonal".into()))
            }
        }
    }
    Ok(OddLocal { p: p.clone(), scales, units })
}

/// Two-adic diagonal data (requires an all-odd-type 2-component).
fn two_local_diagonal(s: &GenusSymbol) -> Result<(Vec<u32>, Vec<BigInt>)> {
    let blocks = local_blocks_p(s, &big(2))?;
    let mut scales = Vec::new();
    let mut units = Vec::new();
    for b in blocks {
        match b {
            Block::TypeI { scale, unit } => {
                scales.push(scale);
                units.push(unit);
            }
            Block::TypeII { .. } => {
                return Err(Error::Internal("expected an odd-type 2-adic form".into()))
            }
        }
    }
    Ok((scales, units))
}

/// Representation case at an odd prime: a single matching entry if one
/// exists at the right scale, otherwise the two-entry shape.
fn odd_prime_case(data: &OddLocal, t: &BigInt) -> Result<LocalCase> {
    let e = zmod::ord_p(t, &data.p).expect_finite() as u32;
    let cls = zmod::legendre(&zmod::ord_cop(t, &data.p).cop, &data.p);
    for (j, sc) in data.scales.iter().enumerate() {
        if *sc == e && zmod::legendre(&data.units[j], &data.p) == cls {
            return Ok(LocalCase::UnitFirst { index: j });
        }
    }
    let hi = data
        .scales
        .iter()
        .position(|&sc| sc == e)
        .ok_or_else(|| Error::Internal(format!("no entry of scale {e} at p={}", data.p)))?;
    let lo = data
        .scales
        .iter()
        .enumerate()
        .position(|(j, &sc)| {
            j != hi
                && sc <= e
                && (e - sc) % 2 == 0
                && zmod::legendre(&data.units[j], &data.p) != cls
        })
        .ok_or_else(|| Error::Internal(format!("no partner entry at p={}", data.p)))?;
    Ok(LocalCase::TwoEntry { hi, lo })
}

/// Matching single entry at p = 2 (valuation and mod-8 class).
fn two_unit_case(scales: &[u32], units: &[BigInt], t: &BigInt) -> Result<LocalCase> {
    let e = zmod::ord_p(t, &big(2)).expect_finite() as u32;
    let cls = zmod::ord_cop(t, &big(2)).cop.mod_floor(&big(8));
    for (j, sc) in scales.iter().enumerate() {
        if *sc == e && units[j].mod_floor(&big(8)) == cls {
            return Ok(LocalCase::UnitFirst { index: j });
        }
    }
    Err(Error::Internal("no matching 2-adic entry for the target".into()))
}

fn first_even_block(s: &GenusSymbol) -> Option<u32> {
    s.component(&big(2))?
        .iter()
        .filter(|c| c.two.map(|t| t.type_ii).unwrap_or(false))
        .map(|c| c.scale)
        .min()
}

fn even_block_index(blocks: &[Block]) -> Option<usize> {
    blocks.iter().position(|b| matches!(b, Block::TypeII { .. }))
}

/// Assemble t from its sign and valuations times an optional prime.
fn assemble_t(
    negative: bool,
    exponents: &BTreeMap<BigInt, u32>,
    aux: Option<&BigInt>,
) -> BigInt {
    let mut t = BigInt::one();
    for (p, e) in exponents {
        t *= p.pow(*e);
    }
    if let Some(w) = aux {
        t *= w;
    }
    if negative {
        -t
    } else {
        t
    }
}

fn square_part(negative: bool, exponents: &BTreeMap<BigInt, u32>, aux: Option<&BigInt>) -> BigInt {
    let mut r = BigInt::one();
    for (p, e) in exponents {
        if e % 2 == 1 {
            r *= p;
        }
    }
    if let Some(w) = aux {
        r *= w;
    }
    if negative {
        -r
    } else {
        r
    }
}

/// Refine the valuation at an odd prime: among the three smallest entries,
/// pick the parity-matched pair and choose the member whose unit class
/// matches the square part.
fn refine_odd_exponent(data: &OddLocal, r: &BigInt) -> u32 {
    let i = &data.scales;
    let (a, b) = if i[0] % 2 == i[1] % 2 {
        (0, 1)
    } else if i[1] % 2 == i[2] % 2 {
        (1, 2)
    } else {
        (0, 2)
    };
    let cls = zmod::legendre(&zmod::ord_cop(r, &data.p).cop, &data.p);
    if zmod::legendre(&data.units[a], &data.p) == cls {
        i[a]
    } else {
        i[b]
    }
}

/// Sample a prime in the merged congruence class that avoids the stored
/// primes of the symbol.
fn sample_aux_prime(
    s: &GenusSymbol,
    congruences: &[(BigInt, BigInt)],
    rng: &mut dyn RngCore,
) -> Result<BigInt> {
    let (a0, m) = zmod::crt(congruences)?;
    for _ in 0..64 {
        let w = zmod::find_prime_in_ap(&a0, &m, rng, &[])?;
        if !s.components.contains_key(&w) {
            return Ok(w);
        }
    }
    Err(Error::SearchExhausted("auxiliary prime kept colliding with the symbol".into()))
}

/// Valuation parities for every stored odd prime, by majority of the three
/// smallest scales.
fn odd_parities(locals: &[OddLocal]) -> BTreeMap<BigInt, u32> {
    locals
        .iter()
        .map(|d| {
            let m = maj(d.scales[0] % 2, d.scales[1] % 2, d.scales[2] % 2);
            (d.p.clone(), m)
        })
        .collect()
}

fn find_t_high_dim(s: &GenusSymbol, even_scale: Option<u32>) -> Result<TargetPlan> {
    let negative = s.sig == -(s.n as i64);
    let mut locals = Vec::new();
    for p in s.primes() {
        if p != big(2) {
            locals.push(odd_local(s, &p)?);
        }
    }
    let mut exponents = odd_parities(&locals);
    let two_diag = if even_scale.is_none() { Some(two_local_diagonal(s)?) } else { None };
    let e2 = match even_scale {
        Some(l) => l + 1,
        None => two_diag.as_ref().unwrap().0[3],
    };
    exponents.insert(big(2), e2);
    let r = square_part(negative, &exponents, None);
    for d in &locals {
        let e = refine_odd_exponent(d, &r);
        exponents.insert(d.p.clone(), e);
    }
    let t = assemble_t(negative, &exponents, None);
    let mut cases = BTreeMap::new();
    for d in &locals {
        cases.insert(d.p.clone(), odd_prime_case(d, &t)?);
    }
    let two_case = match even_scale {
        Some(_) => {
            let blocks = local_blocks_p(s, &big(2))?;
            let index = even_block_index(&blocks)
                .ok_or_else(|| Error::Internal("even block disappeared".into()))?;
            LocalCase::TypeTwo { index }
        }
        None => LocalCase::FourEntry,
    };
    cases.insert(big(2), two_case);
    Ok(TargetPlan {
        t,
        negative,
        exponents,
        aux_prime: None,
        square_part: r,
        cases,
        dim2: None,
    })
}

fn find_t_dim3(s: &GenusSymbol, rng: &mut dyn RngCore) -> Result<TargetPlan> {
    let negative = s.sig == -3;
    let mut locals = Vec::new();
    for p in s.primes() {
        if p != big(2) {
            locals.push(odd_local(s, &p)?);
        }
    }
    let mut exponents = odd_parities(&locals);
    let (scales2, units2) = two_local_diagonal(s)?;
    let j1 = scales2[0];
    exponents.insert(big(2), j1);
    // The auxiliary prime fixes the 2-adic class of t to the smallest
    // entry: (sign * odd-part-parities) * w ≡ tau_1 mod 8.
    let eight = big(8);
    let mut c = if negative { big(-1) } else { big(1) };
    for (p, e) in &exponents {
        if p != &big(2) && e % 2 == 1 {
            c *= p;
        }
    }
    let c_inv = zmod::mod_inv(&c, &eight).expect("odd");
    let target8 = zmod::mod_mul(&units2[0], &c_inv, &eight);
    let w = sample_aux_prime(s, &[(target8, eight.clone())], rng)?;
    let r = square_part(negative, &exponents, Some(&w));
    for d in &locals {
        let e = refine_odd_exponent(d, &r);
        exponents.insert(d.p.clone(), e);
    }
    let t = assemble_t(negative, &exponents, Some(&w));
    let mut cases = BTreeMap::new();
    for d in &locals {
        cases.insert(d.p.clone(), odd_prime_case(d, &t)?);
    }
    cases.insert(big(2), two_unit_case(&scales2, &units2, &t)?);
    cases.insert(w.clone(), LocalCase::Generic);
    Ok(TargetPlan {
        t,
        negative,
        exponents,
        aux_prime: Some(w),
        square_part: r,
        cases,
        dim2: None,
    })
}

/// Shape data of a reduced dimension-2 symbol, with the closed-form
/// odd-prime excess sum.
pub fn dim2_statistics(s: &GenusSymbol) -> Result<Dim2Stats> {
    if s.n != 2 {
        return Err(Error::InvalidSymbol("statistics need dimension 2".into()));
    }
    let det = det_of_symbol(s);
    let eps: i8 = if det.is_negative() { -1 } else { 1 };
    let rho: i8 = if s.sig == -2 { -1 } else { 1 };
    let mut counts = [[0u32; 2]; 4];
    for p in s.primes() {
        if p == big(2) {
            continue;
        }
        let d = odd_local(s, &p)?;
        let gap = d.scales[1] - d.scales[0];
        if gap % 2 == 0 {
            continue;
        }
        let dcls = p.mod_floor(&big(8)).to_u32().unwrap() as usize;
        let b = if zmod::legendre(&d.units[0], &p) == 1 { 0 } else { 1 };
        counts[(dcls - 1) / 2][b] += 1;
    }
    let stats = Dim2Stats { rho, eps, counts, sum_excess: 0 };
    let s3 = stats.count(&[3], None);
    let s5 = stats.count(&[5], None);
    let s7 = stats.count(&[7], None);
    let s37 = s3 + s7;
    let s35 = s3 + s5;
    let sm = stats.s_minus();
    let base = (-1i64).pow(sm % 2 + 2) * (-1i64).pow(xi(s37) % 2 + 2) * (eps as i64).pow(s37 % 2 + 2);
    let m_sign = if s.ord_p(&big(2)) % 2 == 0 {
        base
    } else {
        base * (-1i64).pow(s35 % 2 + 2)
    };
    let sum = (2 * s3 as i64 + 4 * s5 as i64 + 6 * s7 as i64 + 2 * (1 - m_sign)).rem_euclid(8);
    Ok(Dim2Stats { sum_excess: sum as u8, ..stats })
}

/// Dimension-2 shape at p = 2: the unit classes a2, b2 and I scale gap.
struct TwoShape {
    a2: BigInt,
    b2: BigInt,
    gap: u32,
}

fn two_shape(s: &GenusSymbol) -> Result<TwoShape> {
    let (scales, units) = two_local_diagonal(s)?;
    Ok(TwoShape { a2: units[0].clone(), b2: units[1].clone(), gap: scales[1] - scales[0] })
}

fn no_case() -> Error {
    Error::Internal(
        "no congruence case applies to a valid dimension-2 symbol; this cannot happen".into(),
    )
}

fn find_t_dim2_type_ii(s: &GenusSymbol, rng: &mut dyn RngCore) -> Result<TargetPlan> {
    let stats = dim2_statistics(s)?;
    let (rho, eps) = (stats.rho, stats.eps);
    let sm = stats.s_minus();
    let sm35 = sm + stats.s35();
    let sm57 = sm + stats.s57();
    let mod4 = if (rho == 1 && sm35 % 2 == 0) || (rho == -1 && sm57 % 2 == 0) {
        1i64
    } else if (rho == 1 && eps == 1 && sm57 % 2 == 1)
        || (rho == 1 && eps == -1 && sm57 % 2 == 0)
        || (rho == -1 && eps == -1 && sm35 % 2 == 0)
        || (rho == -1 && eps == 1 && sm35 % 2 == 1)
    {
        3
    } else {
        return Err(no_case());
    };
    let mut congruences = vec![(big(mod4), big(4))];
    let mut odd_locals = Vec::new();
    for p in s.primes() {
        if p == big(2) {
            continue;
        }
        let d = odd_local(s, &p)?;
        if (d.scales[1] - d.scales[0]) % 2 == 1 {
            let target = zmod::mod_reduce(&(big(2) * big(rho as i64) * &d.units[0]), &p);
            congruences.push((target, p.clone()));
        }
        odd_locals.push(d);
    }
    let w = sample_aux_prime(s, &congruences, rng)?;
    // Square-part valuations at the even-gap primes.
    let negative = rho == -1;
    let mut exponents = BTreeMap::from([(big(2), 1u32)]);
    let two_rho_w = big(2) * big(rho as i64) * &w;
    for d in &odd_locals {
        let gap = d.scales[1] - d.scales[0];
        let e = if gap % 2 == 1 {
            0
        } else if zmod::legendre(&d.units[0], &d.p) == zmod::legendre(&two_rho_w, &d.p) {
            0
        } else {
            gap
        };
        exponents.insert(d.p.clone(), e);
    }
    let t = assemble_t(negative, &exponents, Some(&w));
    // Representability at the auxiliary prime itself.
    let det = det_of_symbol(s);
    if zmod::legendre(&zmod::mod_reduce(&-&det, &w), &w) != 1 {
        return Err(Error::Internal("auxiliary prime fails the determinant class test".into()));
    }
    let blocks = local_blocks_p(s, &big(2))?;
    let index = even_block_index(&blocks).ok_or_else(no_case)?;
    let mut cases = BTreeMap::from([(big(2), LocalCase::TypeTwo { index })]);
    for d in &odd_locals {
        cases.insert(d.p.clone(), odd_prime_case(d, &t)?);
    }
    cases.insert(w.clone(), LocalCase::Generic);
    let square = square_part(negative, &BTreeMap::new(), Some(&w));
    Ok(TargetPlan {
        t,
        negative,
        exponents,
        aux_prime: Some(w),
        square_part: square,
        cases,
        dim2: Some(stats),
    })
}

fn find_t_dim2_type_i_even(s: &GenusSymbol, rng: &mut dyn RngCore) -> Result<TargetPlan> {
    let stats = dim2_statistics(s)?;
    let shape = two_shape(s)?;
    let (rho, eps) = (stats.rho, stats.eps);
    let rho_big = big(rho as i64);
    let eight = big(8);
    let sm = stats.s_minus();
    let sm37 = sm + stats.s37();
    let x_set: Vec<BigInt> = [&shape.a2, &shape.b2]
        .iter()
        .map(|u| zmod::mod_mul(&rho_big, u, &eight))
        .filter(|x| matches!(x.to_i64().unwrap(), 1 | 5))
        .collect();
    let y_set: Vec<BigInt> = [&shape.a2, &shape.b2]
        .iter()
        .map(|u| zmod::mod_mul(&rho_big, u, &eight))
        .filter(|x| matches!(x.to_i64().unwrap(), 3 | 7))
        .collect();
    let class8 = if (rho == 1 && sm % 2 == 0 && !x_set.is_empty())
        || (rho == -1 && sm37 % 2 == 0 && !x_set.is_empty())
    {
        x_set[0].clone()
    } else if ((rho == 1 && eps == 1 && sm37 % 2 == 1)
        || (rho == 1 && eps == -1 && sm37 % 2 == 0)
        || (rho == -1 && eps == -1 && sm % 2 == 0)
        || (rho == -1 && eps == 1 && sm % 2 == 1))
        && !y_set.is_empty()
    {
        y_set[0].clone()
    } else {
        return Err(no_case());
    };
    let mut congruences = vec![(class8, eight.clone())];
    let mut odd_locals = Vec::new();
    for p in s.primes() {
        if p == big(2) {
            continue;
        }
        let d = odd_local(s, &p)?;
        if (d.scales[1] - d.scales[0]) % 2 == 1 {
            let target = zmod::mod_reduce(&(&rho_big * &d.units[0]), &p);
            congruences.push((target, p.clone()));
        }
        odd_locals.push(d);
    }
    let w = sample_aux_prime(s, &congruences, rng)?;
    let negative = rho == -1;
    let rho_w = &rho_big * &w;
    let e2 = if zmod::mod_reduce(&rho_w, &eight) == shape.a2.mod_floor(&eight) {
        0
    } else {
        shape.gap
    };
    let mut exponents = BTreeMap::from([(big(2), e2)]);
    for d in &odd_locals {
        let gap = d.scales[1] - d.scales[0];
        let e = if gap % 2 == 1 {
            0
        } else if zmod::legendre(&d.units[0], &d.p) == zmod::legendre(&rho_w, &d.p) {
            0
        } else {
            gap
        };
        exponents.insert(d.p.clone(), e);
    }
    let t = assemble_t(negative, &exponents, Some(&w));
    let det = det_of_symbol(s);
    if zmod::legendre(&zmod::mod_reduce(&-&det, &w), &w) != 1 {
        return Err(Error::Internal("auxiliary prime fails the determinant class test".into()));
    }
    let (scales2, units2) = two_local_diagonal(s)?;
    let mut cases = BTreeMap::from([(big(2), two_unit_case(&scales2, &units2, &t)?)]);
    for d in &odd_locals {
        cases.insert(d.p.clone(), odd_prime_case(d, &t)?);
    }
    cases.insert(w.clone(), LocalCase::Generic);
    let square = square_part(negative, &BTreeMap::new(), Some(&w));
    Ok(TargetPlan {
        t,
        negative,
        exponents,
        aux_prime: Some(w),
        square_part: square,
        cases,
        dim2: Some(stats),
    })
}

fn find_t_dim2_type_i_odd(s: &GenusSymbol, rng: &mut dyn RngCore) -> Result<TargetPlan> {
    let stats = dim2_statistics(s)?;
    let shape = two_shape(s)?;
    let (rho, eps) = (stats.rho, stats.eps);
    let rho_big = big(rho as i64);
    let eight = big(8);
    let four = big(4);
    let sm = stats.s_minus();
    let s37 = stats.s37();
    let sm37 = sm + s37;
    let sm35 = sm + stats.s35();
    let sm57 = sm + stats.s57();
    let lega = zmod::legendre(&shape.a2, &big(2));
    let legb = zmod::legendre(&shape.b2, &big(2));
    let sgn = |e: u32| if e % 2 == 0 { 1i8 } else { -1 };
    let rho_a = zmod::mod_mul(&rho_big, &shape.a2, &four).to_i64().unwrap();
    let rho_b = zmod::mod_mul(&rho_big, &shape.b2, &four).to_i64().unwrap();
    let guard_a = (rho_a == 1 && sgn(sm) * sign_pow(rho, s37) * lega == 1)
        || (rho_a == 3 && sgn(sm37 + 1) * sign_pow(rho, s37) * eps * lega == 1);
    let guard_b = (rho_b == 1 && sgn(sm35) * sign_pow(rho, s37) * legb == 1)
        || (rho_b == 3 && sgn(sm57 + 1) * sign_pow(rho, s37) * eps * legb == 1);

    let negative = rho == -1;
    let (class8, odd_mult, e2) = if guard_a {
        (zmod::mod_mul(&rho_big, &shape.a2, &eight), big(1), 0u32)
    } else if guard_b {
        (zmod::mod_mul(&rho_big, &shape.b2, &eight), big(2), shape.gap)
    } else {
        return Err(no_case());
    };
    let mut congruences = vec![(class8, eight.clone())];
    let mut odd_locals = Vec::new();
    for p in s.primes() {
        if p == big(2) {
            continue;
        }
        let d = odd_local(s, &p)?;
        if (d.scales[1] - d.scales[0]) % 2 == 1 {
            let target = zmod::mod_reduce(&(&odd_mult * &rho_big * &d.units[0]), &p);
            congruences.push((target, p.clone()));
        }
        odd_locals.push(d);
    }
    let w = sample_aux_prime(s, &congruences, rng)?;
    let cls_ref = &odd_mult * &rho_big * &w;
    let mut exponents = BTreeMap::from([(big(2), e2)]);
    for d in &odd_locals {
        let gap = d.scales[1] - d.scales[0];
        let e = if gap % 2 == 1 {
            0
        } else if zmod::legendre(&d.units[0], &d.p) == zmod::legendre(&cls_ref, &d.p) {
            0
        } else {
            gap
        };
        exponents.insert(d.p.clone(), e);
    }
    let t = assemble_t(negative, &exponents, Some(&w));
    let det = det_of_symbol(s);
    if zmod::legendre(&zmod::mod_reduce(&-&det, &w), &w) != 1 {
        return Err(Error::Internal("auxiliary prime fails the determinant class test".into()));
    }
    let (scales2, units2) = two_local_diagonal(s)?;
    let mut cases = BTreeMap::from([(big(2), two_unit_case(&scales2, &units2, &t)?)]);
    for d in &odd_locals {
        cases.insert(d.p.clone(), odd_prime_case(d, &t)?);
    }
    cases.insert(w.clone(), LocalCase::Generic);
    let square = square_part(negative, &BTreeMap::new(), Some(&w));
    Ok(TargetPlan {
        t,
        negative,
        exponents,
        aux_prime: Some(w),
        square_part: square,
        cases,
        dim2: Some(stats),
    })
}

/// Verify the plan by actually constructing every local representation at
/// the precision the existence theorem prescribes.
fn verify_plan(s: &GenusSymbol, plan: &TargetPlan) -> Result<()> {
    for (p, case) in &plan.cases {
        let kp = zmod::kp_of(p);
        let ord_t = zmod::ord_p(&plan.t, p).expect_finite() as u32;
        let k = s.max_scale(p).max(ord_t) + kp + 1;
        let ctx = LocalContext { p: p.clone(), k, modulus: p.pow(k), kp };
        let blocks = local_blocks_p(s, p)?;
        build_local_representation(&blocks, &plan.t, &ctx, case)?;
    }
    Ok(())
}

/// Find an integer primitively represented by a valid reduced genus of
/// dimension >= 2, with per-prime case tags. The construction is verified
/// by building each local representation before returning.
pub fn find_t(s: &GenusSymbol, rng: &mut dyn RngCore) -> Result<TargetPlan> {
    if s.n < 2 {
        return Err(Error::InvalidSymbol("target construction needs dimension >= 2".into()));
    }
    let report = validate_symbol(s);
    if !report.valid() {
        return Err(Error::InvalidSymbol(format!("symbol is not valid: {:?}", report.violations)));
    }
    let (reduced, gcd) = reduce_symbol(s);
    if !gcd.is_one() || &reduced != s {
        return Err(Error::InvalidSymbol("target construction needs a reduced symbol".into()));
    }
    let even_scale = first_even_block(s);
    let plan = if s.n >= 4 || (s.n == 3 && even_scale.is_some()) {
        find_t_high_dim(s, even_scale)?
    } else if s.n == 3 {
        find_t_dim3(s, rng)?
    } else if even_scale.is_some() {
        find_t_dim2_type_ii(s, rng)?
    } else {
        let shape = two_shape(s)?;
        if shape.gap % 2 == 0 {
            find_t_dim2_type_i_even(s, rng)?
        } else {
            find_t_dim2_type_i_odd(s, rng)?
        }
    };
    verify_plan(s, &plan)?;
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::QuadForm;
    use crate::symbol::{excess_of_symbol, genus_symbol};
    use num_traits::Zero;
    use num_bigint::BigInt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng() -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(5)
    }

    fn diag(d: &[i64]) -> QuadForm {
        QuadForm::from_diagonal(&d.iter().map(|&v| big(v)).collect::<Vec<_>>())
    }

    #[test]
    fn xi_values() {
        assert_eq!(xi(3), 1);
        assert_eq!(xi(0), 0);
        assert_eq!(xi(1), 0);
        assert_eq!(xi(2), 1);
        assert_eq!(xi(4), 0);
    }

    #[test]
    fn identity_dims() {
        let mut r = rng();
        for n in 2..=6usize {
            let s = genus_symbol(&QuadForm::identity(n)).unwrap();
            let plan = find_t(&s, &mut r).unwrap();
            if n >= 4 {
                assert_eq!(plan.t, BigInt::from(1));
            } else {
                // Low dimensions use an auxiliary prime ≡ 1 mod 8.
                let w = plan.aux_prime.clone().unwrap();
                assert_eq!(plan.t, w);
                assert_eq!(w.mod_floor(&big(8)), big(1));
            }
        }
    }

    #[test]
    fn negative_definite_sign() {
        let mut r = rng();
        let s = genus_symbol(&diag(&[-1, -1, -1])).unwrap();
        let plan = find_t(&s, &mut r).unwrap();
        assert!(plan.negative);
        assert!(plan.t.is_negative());
    }

    #[test]
    fn high_dim_even_block_valuation() {
        let mut r = rng();
        // An even 2 x 2 block at scale 1 (with only scale-0 odd entries
        // next to it) forces ord_2(t) = 2.
        let q = QuadForm::direct_sum(&[
            crate::localform::t_plus().scale(&big(2)),
            QuadForm::identity(2),
        ]);
        let s = genus_symbol(&q).unwrap();
        let plan = find_t(&s, &mut r).unwrap();
        assert_eq!(plan.exponents[&big(2)], 2);
        assert!(matches!(plan.cases[&big(2)], LocalCase::TypeTwo { .. }));
    }

    #[test]
    fn odd_prime_parity_by_majority() {
        let mut r = rng();
        let s = genus_symbol(&diag(&[1, 3, 3, 9])).unwrap();
        let plan = find_t(&s, &mut r).unwrap();
        // Scales at 3 are (0, 1, 1, 2): majority of the first three is odd.
        assert_eq!(plan.exponents[&big(3)] % 2, 1);

        let s = genus_symbol(&diag(&[1, 5, 3, 9])).unwrap();
        let plan = find_t(&s, &mut r).unwrap();
        // Scales at 3 are (0, 0, 1, 2): majority of the first three is even.
        assert_eq!(plan.exponents[&big(3)] % 2, 0);
    }

    #[test]
    fn dim2_stats_match_symbol_excess() {
        let mut count = 0;
        let mut rng = ChaCha20Rng::seed_from_u64(23);
        use rand::Rng;
        while count < 200 {
            let a = rng.gen_range(1..=40i64);
            let b = rng.gen_range(-40..=40i64);
            let q = diag(&[a, if b == 0 { 1 } else { b }]);
            let Ok(s) = genus_symbol(&q) else { continue };
            let (s, g) = crate::symbol::reduce_symbol(&s);
            if g != BigInt::from(1) {
                continue;
            }
            count += 1;
            let stats = dim2_statistics(&s).unwrap();
            let mut direct = 0i64;
            for p in s.primes() {
                if p != big(2) {
                    direct += excess_of_symbol(&s, &p) as i64;
                }
            }
            assert_eq!(
                stats.sum_excess as i64,
                direct.rem_euclid(8),
                "q=diag({a},{b}) stats={stats:?}"
            );
        }
    }

    #[test]
    fn aux_prime_determinant_class_closed_form() {
        // The Kronecker/Legendre class of -det at a fresh prime w has a
        // closed form in the shape statistics, split on the parity of the
        // 2-adic valuation of the determinant.
        let mut rng = ChaCha20Rng::seed_from_u64(71);
        use rand::Rng;
        let mut done = 0;
        while done < 120 {
            let a = rng.gen_range(1..=30i64);
            let b = rng.gen_range(1..=60i64);
            let q = diag(&[a, b]);
            let Ok(s) = genus_symbol(&q) else { continue };
            let (s, g) = crate::symbol::reduce_symbol(&s);
            if g != BigInt::from(1) {
                continue;
            }
            let Ok(stats) = dim2_statistics(&s) else { continue };
            done += 1;
            let det = det_of_symbol(&s);
            let two_odd = s.ord_p(&big(2)) % 2 == 1;
            // Collect the odd-gap primes and their leading units.
            let mut odd_gap: Vec<(BigInt, BigInt)> = Vec::new();
            for p in s.primes() {
                if p == big(2) {
                    continue;
                }
                let d = odd_local(&s, &p).unwrap();
                if (d.scales[1] - d.scales[0]) % 2 == 1 {
                    odd_gap.push((p.clone(), d.units[0].clone()));
                }
            }
            for _ in 0..4 {
                let w = zmod::find_prime_in_ap(
                    &big([1, 3, 5, 7][rng.gen_range(0..4)]),
                    &big(8),
                    &mut rng,
                    &[],
                )
                .unwrap();
                if (&det % &w).is_zero() {
                    continue;
                }
                let direct = zmod::legendre(&zmod::mod_reduce(&-&det, &w), &w);
                let mut prod = 1i8;
                for (p, _) in &odd_gap {
                    prod *= zmod::legendre(&w, p);
                }
                if two_odd {
                    prod *= zmod::legendre(&w, &big(2));
                }
                let expect = if w.mod_floor(&big(4)) == big(1) {
                    prod
                } else {
                    let sign = if (stats.s37() + 1) % 2 == 1 { -1 } else { 1 };
                    sign * stats.eps * prod
                };
                assert_eq!(direct, expect, "det={det} w={w}");
            }
        }
    }

    #[test]
    fn dim2_type_ii_paths() {
        let mut r = rng();
        for q in [crate::localform::t_plus(), crate::localform::t_minus()] {
            let s = genus_symbol(&q).unwrap();
            let plan = find_t(&s, &mut r).unwrap();
            let w = plan.aux_prime.clone().unwrap();
            assert_eq!(plan.t, big(2) * &w);
            assert_eq!(w.mod_floor(&big(4)), big(1));
            // Negative-definite variant flips the sign.
            let sneg = genus_symbol(&q.scale(&big(-1))).unwrap();
            let plan = find_t(&sneg, &mut r).unwrap();
            assert!(plan.t.is_negative());
        }
    }

    #[test]
    fn dim2_type_i_paths() {
        let mut r = rng();
        // Even gap.
        let s = genus_symbol(&diag(&[3, 5])).unwrap();
        let plan = find_t(&s, &mut r).unwrap();
        assert!(plan.aux_prime.is_some());

        // Odd gap.
        let s = genus_symbol(&diag(&[1, 2])).unwrap();
        let plan = find_t(&s, &mut r).unwrap();
        let w = plan.aux_prime.clone().unwrap();
        assert_eq!(plan.t, w);
        assert_eq!(w.mod_floor(&big(8)), big(1));

        let s = genus_symbol(&diag(&[3, 6])).unwrap();
        let (s, _) = crate::symbol::reduce_symbol(&s);
        find_t(&s, &mut r).unwrap();
    }

    #[test]
    fn random_symbols_get_verified_plans() {
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        use rand::Rng;
        let mut done = 0;
        while done < 60 {
            let n = rng.gen_range(2..=6usize);
            let mut m = crate::forms::Mat::zero(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = big(rng.gen_range(-6..=6));
                    *m.at_mut(i, j) = v.clone();
                    *m.at_mut(j, i) = v;
                }
            }
            let q = QuadForm::new(m).unwrap();
            if q.det().is_zero() || q.det().abs() > big(1_000_000) {
                continue;
            }
            let Ok(s) = genus_symbol(&q) else { continue };
            let (reduced, _) = crate::symbol::reduce_symbol(&s);
            done += 1;
            // find_t runs its own construction check on every prime.
            find_t(&reduced, &mut rng).unwrap();
        }
    }
}
