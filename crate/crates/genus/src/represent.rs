//! Explicit primitive vectors representing a target value modulo p^k in
//! the block shapes the generator needs, together with the invertible
//! completions `[x | A]`.
//!
//! Only the special cases that actually arise are implemented: a single
//! diagonal entry, two diagonal entries at an odd prime, one even 2 x 2
//! block, the first four diagonal entries at p = 2, and a rank-one-plus-
//! identity fallback for an auxiliary prime outside the determinant.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::forms::{extend_primitive, Mat, QuadForm};
use crate::jordan::Block;
use crate::zmod::{self, big, LocalContext};

fn ctx_at(p: &BigInt, k: u32) -> LocalContext {
    LocalContext { p: p.clone(), k, modulus: p.pow(k), kp: zmod::kp_of(p) }
}

/// 2-adic lifting for a polynomial with odd derivative at the root:
/// given f(x) ≡ 0 mod 2^m0, returns x' with f(x') ≡ 0 mod 2^target.
fn lift2_odd_derivative(
    f: impl Fn(&BigInt) -> BigInt,
    x0: &BigInt,
    m0: u32,
    target: u32,
) -> BigInt {
    let mut x = x0.clone();
    for m in m0..target {
        let v = f(&x).mod_floor(&(BigInt::one() << (m + 1)));
        if !(v >> m).is_zero() {
            x += BigInt::one() << m;
        }
    }
    x
}

/// Lift a solution of `tau * x^2 ≡ rhs (mod 2^m0)` with x odd, starting
/// from a mod-8 solution.
pub fn lift_square_two_adic(tau: &BigInt, rhs: &BigInt, x0: &BigInt, target: u32) -> BigInt {
    lift2_square(tau, rhs, x0, 3, target)
}

/// Lift a solution of `tau * x^2 ≡ rhs (mod 2^m0)` with x odd, m0 >= 3.
fn lift2_square(tau: &BigInt, rhs: &BigInt, x0: &BigInt, m0: u32, target: u32) -> BigInt {
    let mut x = x0.clone();
    for m in m0..target {
        let v = (tau * &x * &x - rhs).mod_floor(&(BigInt::one() << (m + 1)));
        if !(v >> m).is_zero() {
            x += BigInt::one() << (m - 1);
        }
    }
    x
}

/// Newton lifting at an odd prime for `a y^2 ≡ c` with y a unit.
pub fn lift_odd_p_square(a: &BigInt, c: &BigInt, y0: &BigInt, p: &BigInt, target: u32) -> BigInt {
    let mut y = y0.clone();
    let mut m = 1u32;
    let mut pm = p.clone();
    while m < target {
        let pm2 = &pm * p;
        let f = (a * &y * &y - c).mod_floor(&pm2);
        if !f.is_zero() {
            let delta = (&f / &pm).mod_floor(p);
            let d_inv = zmod::mod_inv(&(big(2) * a * &y), p).expect("2ay is a unit");
            y = (&y - delta * d_inv * &pm).mod_floor(&pm2);
        }
        pm = pm2;
        m += 1;
    }
    y
}

/// Solve `d * x^2 ≡ t (mod p^k)` where `d = p^scale * unit`. The
/// valuations must agree in parity and the unit classes must match.
pub fn represent_unit_scaled(
    scale: u32,
    unit: &BigInt,
    t: &BigInt,
    ctx: &LocalContext,
) -> Result<BigInt> {
    let t_red = zmod::mod_reduce(t, &ctx.modulus);
    if t_red.is_zero() {
        return Err(Error::NotRepresentable("target vanishes mod p^k".into()));
    }
    let oc = zmod::ord_cop(&t_red, &ctx.p);
    let e = oc.ord.expect_finite() as u32;
    if e < scale || (e - scale) % 2 != 0 {
        return Err(Error::NotRepresentable(format!(
            "valuation mismatch: entry at scale {scale}, target at {e}"
        )));
    }
    let sub = ctx_at(&ctx.p, ctx.k - e);
    let u_inv = zmod::mod_inv(unit, &sub.modulus)
        .ok_or_else(|| Error::NotRepresentable("entry unit not invertible".into()))?;
    let c = zmod::mod_mul(&oc.cop, &u_inv, &sub.modulus);
    let y = zmod::sqrt_mod_pk(&c, &sub)
        .map_err(|_| Error::NotRepresentable("unit classes differ".into()))?;
    let x = zmod::mod_reduce(&(ctx.p.pow((e - scale) / 2) * y), &ctx.modulus);
    debug_assert_eq!(
        zmod::mod_reduce(&(ctx.p.pow(scale) * unit * &x * &x), &ctx.modulus),
        t_red
    );
    Ok(x)
}

/// Split a unit `t` mod an odd prime as `a + b` where both summands have
/// the opposite residue class to `t` (residues split into nonresidue
/// pairs and vice versa).
pub fn two_nonresidue_split(t: &BigInt, p: &BigInt) -> Result<(BigInt, BigInt)> {
    let want = -zmod::legendre(t, p);
    let mut a = BigInt::one();
    for _ in 0..4096 {
        if &a >= p {
            break;
        }
        let b = zmod::mod_reduce(&(t - &a), p);
        if !b.is_zero() && zmod::legendre(&a, p) == want && zmod::legendre(&b, p) == want {
            return Ok((a, b));
        }
        a += 1;
    }
    Err(Error::SearchExhausted(format!("no opposite-class split of {t} mod {p}")))
}

/// Units (y1, y2) with `c1 y1^2 + c2 y2^2 ≡ t (mod p)`.
pub fn solve_two_units(c1: &BigInt, c2: &BigInt, t: &BigInt, p: &BigInt) -> Result<(BigInt, BigInt)> {
    let c2_inv = zmod::mod_inv(c2, p).expect("unit");
    let mut y1 = BigInt::one();
    for _ in 0..4096 {
        if &y1 >= p {
            break;
        }
        let z = zmod::mod_mul(&(t - c1 * &y1 * &y1), &c2_inv, p);
        if !z.is_zero() && zmod::legendre(&z, p) == 1 {
            let sub = ctx_at(p, 1);
            let y2 = zmod::sqrt_mod_pk(&z, &sub)?;
            return Ok((y1, y2));
        }
        y1 += 1;
    }
    Err(Error::SearchExhausted(format!("no two-unit solution of {c1}x²+{c2}y²={t} mod {p}")))
}

/// Primitive (x1, x2) with `tau1 x1^2 + p^gap tau2 x2^2 ≡ p^gap t (mod p^k)`
/// for an odd prime, even `gap`, and a unit target `t` whose class differs
/// from tau1. The second coordinate is a unit.
pub fn represent_dim2_oddp(
    tau1: &BigInt,
    gap: u32,
    tau2: &BigInt,
    t: &BigInt,
    ctx: &LocalContext,
) -> Result<(BigInt, BigInt)> {
    if gap % 2 != 0 {
        return Err(Error::NotRepresentable("scale gap must be even".into()));
    }
    if ctx.k <= gap {
        return Err(Error::NotRepresentable("not enough precision".into()));
    }
    let p = &ctx.p;
    if zmod::legendre(t, p) == zmod::legendre(tau2, p) {
        // The scaled entry alone represents p^gap t.
        let sub = ctx_at(p, ctx.k - gap);
        let c = zmod::mod_mul(t, &zmod::mod_inv(tau2, &sub.modulus).unwrap(), &sub.modulus);
        let x2 = zmod::sqrt_mod_pk(&c, &sub)?;
        return Ok((BigInt::zero(), x2));
    }
    if zmod::legendre(t, p) == zmod::legendre(tau1, p) {
        return Err(Error::CaseMismatch(
            "target class matches the leading entry; use the one-entry case".into(),
        ));
    }
    let (y1, y2) = solve_two_units(tau1, tau2, t, p)?;
    // Fix y1, lift y2: tau2 y2^2 = t - tau1 y1^2 has a unit solution.
    let c = t - tau1 * &y1 * &y1;
    let y2 = lift_odd_p_square(tau2, &c, &y2, p, ctx.k - gap);
    let x1 = zmod::mod_reduce(&(p.pow(gap / 2) * y1), &ctx.modulus);
    let x2 = zmod::mod_reduce(&y2, &ctx.modulus);
    debug_assert_eq!(
        zmod::mod_reduce(&(tau1 * &x1 * &x1 + p.pow(gap) * tau2 * &x2 * &x2), &ctx.modulus),
        zmod::mod_reduce(&(p.pow(gap) * t), &ctx.modulus)
    );
    Ok((x1, x2))
}

/// Primitive (x1, x2) with `x' B x ≡ t (mod 2^k)` for an even block
/// `B = 2^scale [[2a, b], [b, 2c]]` and a target of valuation scale + 1.
/// The first coordinate of the returned vector is odd.
pub fn represent_type_ii(
    a: &BigInt,
    b: &BigInt,
    c: &BigInt,
    scale: u32,
    t: &BigInt,
    ctx: &LocalContext,
) -> Result<(BigInt, BigInt)> {
    let t_red = zmod::mod_reduce(t, &ctx.modulus);
    let oc = zmod::ord_cop(&t_red, &ctx.p);
    if oc.ord.finite() != Some(scale as u64 + 1) {
        return Err(Error::NotRepresentable(format!(
            "even block at scale {scale} represents only valuation {}",
            scale + 1
        )));
    }
    let u = oc.cop;
    let target = ctx.k - scale - 1;
    let probe = target.min(3);
    let small = BigInt::one() << probe;
    let value = |x1: &BigInt, x2: &BigInt| a * x1 * x1 + b * x1 * x2 + c * x2 * x2;
    let mut seed: Option<(BigInt, BigInt)> = None;
    'search: for x1 in (1..16i64).step_by(2) {
        for x2 in 0..16i64 {
            let (x1b, x2b) = (big(x1), big(x2));
            if value(&x1b, &x2b).mod_floor(&small) == u.mod_floor(&small) {
                seed = Some((x1b, x2b));
                break 'search;
            }
        }
    }
    let (x1, x2) = seed.ok_or_else(|| {
        Error::NotRepresentable("no odd-first solution modulo 8 for the even block".into())
    })?;
    // Lift x2; the derivative b x1 + 2 c x2 is odd because x1 is.
    let x2 = lift2_odd_derivative(|x2| value(&x1, x2) - &u, &x2, probe, target);
    let full = big(2).pow(scale + 1) * value(&x1, &x2);
    debug_assert_eq!(zmod::mod_reduce(&full, &ctx.modulus), t_red);
    Ok((x1, zmod::mod_reduce(&x2, &ctx.modulus)))
}

type Dim4Key = (u8, u8, u8, u8, u8, u8, u8, u8);
type Dim4Val = (u8, u8, u8, u8);

/// Exhaustive mod-16 solution table for four scaled odd entries: for every
/// unit tuple, gap-parity pattern and odd target there is a solution with
/// the last coordinate odd.
static DIM4_TABLE: Lazy<HashMap<Dim4Key, Dim4Val>> = Lazy::new(|| {
    let mut table = HashMap::new();
    let squares: Vec<i64> = (0..4i64).map(|y| (y * y) % 16).collect();
    for t1 in [1i64, 3, 5, 7] {
        for t2 in [1i64, 3, 5, 7] {
            for t3 in [1i64, 3, 5, 7] {
                for t4 in [1i64, 3, 5, 7] {
                    for g in 0..8u8 {
                        let (g1, g2, g3) = (g & 1, (g >> 1) & 1, (g >> 2) & 1);
                        for t in (1..16i64).step_by(2) {
                            let mut found = None;
                            'inner: for y1 in 0..4i64 {
                                for y2 in 0..4i64 {
                                    for y3 in 0..4i64 {
                                        for x4 in [1i64, 3] {
                                            let v = (1 << g1) * t1 * squares[y1 as usize]
                                                + (1 << g2) * t2 * squares[y2 as usize]
                                                + (1 << g3) * t3 * squares[y3 as usize]
                                                + t4 * x4 * x4;
                                            if v.rem_euclid(16) == t {
                                                found = Some((
                                                    y1 as u8, y2 as u8, y3 as u8, x4 as u8,
                                                ));
                                                break 'inner;
                                            }
                                        }
                                    }
                                }
                            }
                            let key =
                                (t1 as u8, t2 as u8, t3 as u8, t4 as u8, g1, g2, g3, t as u8);
                            if let Some(sol) = found {
                                table.insert(key, sol);
                            }
                        }
                    }
                }
            }
        }
    }
    table
});

/// Number of unsolvable cells in the mod-16 table (expected 0).
pub fn dim4_table_misses() -> usize {
    4usize.pow(4) * 8 * 8 - DIM4_TABLE.len()
}

/// Represent `2^{i4} t` (t odd) by four scaled odd diagonal entries
/// `2^{i_j} tau_j`, i1 <= i2 <= i3 <= i4; the last coordinate is odd and
/// every term has valuation at least i4.
pub fn represent_dim4_mod2k(
    scales: [u32; 4],
    units: [&BigInt; 4],
    t_odd: &BigInt,
    ctx: &LocalContext,
) -> Result<[BigInt; 4]> {
    let [i1, i2, i3, i4] = scales;
    if !(i1 <= i2 && i2 <= i3 && i3 <= i4) {
        return Err(Error::CaseMismatch("entries must be sorted by scale".into()));
    }
    let eight = big(8);
    let cls = |u: &BigInt| u.mod_floor(&eight).to_u8().unwrap();
    let gap = |i: u32| ((i4 - i) % 2) as u8;
    let key = (
        cls(units[0]),
        cls(units[1]),
        cls(units[2]),
        cls(units[3]),
        gap(i1),
        gap(i2),
        gap(i3),
        t_odd.mod_floor(&big(16)).to_u8().unwrap(),
    );
    let &(y1, y2, y3, x4) = DIM4_TABLE
        .get(&key)
        .ok_or_else(|| Error::Internal(format!("dim-4 table miss at {key:?}")))?;
    let ys = [big(y1 as i64), big(y2 as i64), big(y3 as i64)];
    let target = if ctx.k > i4 { ctx.k - i4 } else { 1 };
    // Residual after the three fixed terms, to be matched by tau4 x4^2.
    let mut rhs = t_odd.clone();
    for (j, y) in ys.iter().enumerate() {
        rhs -= (BigInt::one() << gap([i1, i2, i3][j]) as u32) * units[j] * y * y;
    }
    let x4 = if target > 4 {
        lift2_square(units[3], &rhs, &big(x4 as i64), 4, target)
    } else {
        big(x4 as i64)
    };
    let half = |i: u32| (i4 - i).div_ceil(2);
    let out = [
        zmod::mod_reduce(&((BigInt::one() << half(i1)) * &ys[0]), &ctx.modulus),
        zmod::mod_reduce(&((BigInt::one() << half(i2)) * &ys[1]), &ctx.modulus),
        zmod::mod_reduce(&((BigInt::one() << half(i3)) * &ys[2]), &ctx.modulus),
        zmod::mod_reduce(&x4, &ctx.modulus),
    ];
    #[cfg(debug_assertions)]
    {
        let mut acc = BigInt::zero();
        for j in 0..4 {
            acc += big(2).pow(scales[j]) * units[j] * &out[j] * &out[j];
        }
        let m = big(2).pow(i4 + target.min(4));
        debug_assert_eq!(
            zmod::mod_reduce(&acc, &m),
            zmod::mod_reduce(&(big(2).pow(i4) * t_odd), &m)
        );
    }
    Ok(out)
}

/// Which shape of representation a prime uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalCase {
    /// A single diagonal entry (moved to the front).
    UnitFirst { index: usize },
    /// Two diagonal entries at an odd prime; `hi` carries the unit
    /// coordinate and has the larger scale.
    TwoEntry { hi: usize, lo: usize },
    /// One even 2 x 2 block (moved to the front).
    TypeTwo { index: usize },
    /// The first four diagonal entries at p = 2, in reversed order.
    FourEntry,
    /// Auxiliary prime outside the determinant: det ⊕ I^(n-1) with a
    /// generic completion.
    Generic,
}

/// A verified local representation: the (possibly reordered) local form S,
/// a primitive vector x with x'Sx ≡ t, and an invertible completion
/// [x | A], all modulo p^k.
#[derive(Debug, Clone)]
pub struct LocalRepresentation {
    pub ctx: LocalContext,
    pub s_matrix: QuadForm,
    pub x: Vec<BigInt>,
    pub completion: Mat,
    pub t_mod: BigInt,
}

fn reorder_blocks(blocks: &[Block], front: &[usize]) -> Vec<Block> {
    let mut out: Vec<Block> = front.iter().map(|&i| blocks[i].clone()).collect();
    for (i, b) in blocks.iter().enumerate() {
        if !front.contains(&i) {
            out.push(b.clone());
        }
    }
    out
}

fn blocks_matrix(blocks: &[Block], ctx: &LocalContext) -> QuadForm {
    let parts: Vec<QuadForm> = blocks.iter().map(|b| b.matrix(&ctx.p)).collect();
    QuadForm::direct_sum(&parts).reduce_mod(&ctx.modulus)
}

/// Completion with x1 on the diagonal and x2 below it:
/// [[x1, 0], [x2, x1^{-1}]] ⊕ I^(n-2).
fn two_coordinate_completion(x1: &BigInt, x2: &BigInt, n: usize, ctx: &LocalContext) -> Mat {
    let mut m = Mat::identity(n);
    *m.at_mut(0, 0) = x1.clone();
    *m.at_mut(1, 0) = x2.clone();
    *m.at_mut(1, 1) = zmod::mod_inv(x1, &ctx.modulus).expect("unit coordinate");
    m
}

impl LocalRepresentation {
    fn checked(
        ctx: LocalContext,
        s_matrix: QuadForm,
        x: Vec<BigInt>,
        completion: Mat,
        t: &BigInt,
    ) -> Result<Self> {
        let t_mod = zmod::mod_reduce(t, &ctx.modulus);
        let value = zmod::mod_reduce(&s_matrix.eval(&x), &ctx.modulus);
        if value != t_mod {
            return Err(Error::Internal(format!(
                "local representation check failed: x'Sx = {value}, t = {t_mod}"
            )));
        }
        let det = completion.det_mod(&ctx.modulus);
        if zmod::mod_inv(&det, &ctx.modulus).is_none() {
            return Err(Error::Internal("completion is not invertible".into()));
        }
        let primitive = x.iter().any(|v| v.gcd(&ctx.p).is_one());
        if !primitive {
            return Err(Error::Internal("representation vector is not primitive".into()));
        }
        for (i, v) in x.iter().enumerate() {
            if completion.at(i, 0) != v {
                return Err(Error::Internal("completion first column must be x".into()));
            }
        }
        Ok(LocalRepresentation { ctx, s_matrix, x, completion, t_mod })
    }
}

/// Build the representation of `t` prescribed by `case` inside the local
/// form given by `blocks` (ascending scales). All invariants are checked.
pub fn build_local_representation(
    blocks: &[Block],
    t: &BigInt,
    ctx: &LocalContext,
    case: &LocalCase,
) -> Result<LocalRepresentation> {
    let n: usize = blocks.iter().map(|b| b.dim()).sum();
    let t_ord = zmod::ord_p(&zmod::mod_reduce(t, &ctx.modulus), &ctx.p)
        .finite()
        .ok_or_else(|| Error::NotRepresentable("target vanishes mod p^k".into()))?
        as u32;
    match case {
        LocalCase::UnitFirst { index } => {
            let Block::TypeI { scale, unit } = &blocks[*index] else {
                return Err(Error::CaseMismatch("one-entry case needs a diagonal entry".into()));
            };
            if *scale != t_ord {
                return Err(Error::CaseMismatch(format!(
                    "one-entry case needs matching valuations ({scale} vs {t_ord})"
                )));
            }
            let x0 = represent_unit_scaled(*scale, unit, t, ctx)?;
            let reordered = reorder_blocks(blocks, &[*index]);
            let s = blocks_matrix(&reordered, ctx);
            let mut xvec = vec![BigInt::zero(); n];
            xvec[0] = x0.clone();
            let mut m = Mat::identity(n);
            *m.at_mut(0, 0) = x0.clone();
            if n > 1 {
                *m.at_mut(1, 1) = zmod::mod_inv(&x0, &ctx.modulus).expect("unit");
            }
            LocalRepresentation::checked(ctx.clone(), s, xvec, m, t)
        }
        LocalCase::TwoEntry { hi, lo } => {
            let (Block::TypeI { scale: sh, unit: uh }, Block::TypeI { scale: sl, unit: ul }) =
                (&blocks[*hi], &blocks[*lo])
            else {
                return Err(Error::CaseMismatch("two-entry case needs diagonal entries".into()));
            };
            if sh < sl || *sh != t_ord {
                return Err(Error::CaseMismatch("two-entry case scale layout is wrong".into()));
            }
            let gap = sh - sl;
            let sub = ctx_at(&ctx.p, ctx.k - sl);
            let t_unit = zmod::ord_cop(&zmod::mod_reduce(t, &ctx.modulus), &ctx.p).cop;
            let (x_lo, x_hi) = represent_dim2_oddp(ul, gap, uh, &t_unit, &sub)?;
            let reordered = reorder_blocks(blocks, &[*hi, *lo]);
            let s = blocks_matrix(&reordered, ctx);
            let mut xvec = vec![BigInt::zero(); n];
            xvec[0] = x_hi.clone();
            xvec[1] = x_lo.clone();
            let m = two_coordinate_completion(&x_hi, &x_lo, n, ctx);
            LocalRepresentation::checked(ctx.clone(), s, xvec, m, t)
        }
        LocalCase::TypeTwo { index } => {
            let Block::TypeII { scale, a, b, c } = &blocks[*index] else {
                return Err(Error::CaseMismatch("even-block case needs a 2 x 2 block".into()));
            };
            let (x1, x2) = represent_type_ii(a, b, c, *scale, t, ctx)?;
            let reordered = reorder_blocks(blocks, &[*index]);
            let s = blocks_matrix(&reordered, ctx);
            let mut xvec = vec![BigInt::zero(); n];
            xvec[0] = x1.clone();
            xvec[1] = x2.clone();
            let m = two_coordinate_completion(&x1, &x2, n, ctx);
            LocalRepresentation::checked(ctx.clone(), s, xvec, m, t)
        }
        LocalCase::FourEntry => {
            if blocks.len() < 4 {
                return Err(Error::CaseMismatch("four-entry case needs four blocks".into()));
            }
            let mut scales = [0u32; 4];
            let mut units: Vec<BigInt> = Vec::with_capacity(4);
            for (j, slot) in scales.iter_mut().enumerate() {
                let Block::TypeI { scale, unit } = &blocks[j] else {
                    return Err(Error::CaseMismatch(
                        "four-entry case needs diagonal entries".into(),
                    ));
                };
                *slot = *scale;
                units.push(unit.clone());
            }
            if scales[3] != t_ord {
                return Err(Error::CaseMismatch("four-entry case valuation mismatch".into()));
            }
            let t_unit = zmod::ord_cop(&zmod::mod_reduce(t, &ctx.modulus), &ctx.p).cop;
            let xs = represent_dim4_mod2k(
                scales,
                [&units[0], &units[1], &units[2], &units[3]],
                &t_unit,
                ctx,
            )?;
            let reordered = reorder_blocks(blocks, &[3, 2, 1, 0]);
            let s = blocks_matrix(&reordered, ctx);
            let mut xvec = vec![BigInt::zero(); n];
            xvec[0] = xs[3].clone();
            xvec[1] = xs[2].clone();
            xvec[2] = xs[1].clone();
            xvec[3] = xs[0].clone();
            let mut m = Mat::identity(n);
            *m.at_mut(0, 0) = xs[3].clone();
            *m.at_mut(1, 0) = xs[2].clone();
            *m.at_mut(1, 1) = zmod::mod_inv(&xs[3], &ctx.modulus).expect("odd coordinate");
            *m.at_mut(2, 0) = xs[1].clone();
            *m.at_mut(3, 0) = xs[0].clone();
            LocalRepresentation::checked(ctx.clone(), s, xvec, m, t)
        }
        LocalCase::Generic => {
            // blocks encode det ⊕ I^(n-1); solve det + y^2 (+ z^2) ≡ t.
            let s = blocks_matrix(blocks, ctx);
            let d = s.at(0, 0).clone();
            let c = zmod::mod_reduce(&(t - &d), &ctx.modulus);
            let mut xvec = vec![BigInt::zero(); n];
            xvec[0] = BigInt::one();
            if n == 1 {
                return Err(Error::CaseMismatch("generic case needs n >= 2".into()));
            }
            if zmod::is_square_mod_pk(&c, ctx) {
                xvec[1] = zmod::sqrt_mod_pk(&c, ctx).unwrap_or_else(|_| BigInt::zero());
            } else if n >= 3 {
                let (a, _) = two_nonresidue_split(&c, &ctx.p).map_err(|_| {
                    Error::NotRepresentable("no square split at the auxiliary prime".into())
                })?;
                // a is a residue here since the split flips the class of c.
                let z = zmod::sqrt_mod_pk(&zmod::mod_reduce(&a, &ctx.p), &ctx_at(&ctx.p, 1))?;
                let rest = zmod::mod_reduce(&(&c - &z * &z), &ctx.modulus);
                xvec[1] = zmod::sqrt_mod_pk(&rest, ctx).map_err(|_| {
                    Error::NotRepresentable("square residual failed to lift".into())
                })?;
                xvec[2] = z;
            } else {
                return Err(Error::NotRepresentable(
                    "auxiliary-prime case needs t - det to be a square when n = 2".into(),
                ));
            }
            let completion = extend_primitive(&xvec, ctx)?;
            LocalRepresentation::checked(ctx.clone(), s, xvec, completion.mat, t)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_scaled_examples() {
        let ctx = ctx_at(&big(3), 3);
        let x = represent_unit_scaled(0, &big(1), &big(4), &ctx).unwrap();
        assert_eq!(zmod::mod_reduce(&(&x * &x), &big(27)), big(4));

        let ctx = ctx_at(&big(5), 3);
        let x = represent_unit_scaled(1, &big(1), &big(20), &ctx).unwrap();
        assert_eq!(zmod::mod_reduce(&(big(5) * &x * &x), &big(125)), big(20));

        let ctx = ctx_at(&big(2), 5);
        let x = represent_unit_scaled(0, &big(1), &big(17), &ctx).unwrap();
        assert_eq!(zmod::mod_reduce(&(&x * &x), &big(32)), big(17));

        // Valuation parity mismatch: unit entry cannot hit ord 1.
        assert!(represent_unit_scaled(0, &big(1), &big(3), &ctx_at(&big(3), 3)).is_err());
    }

    #[test]
    fn split_examples() {
        let (a, b) = two_nonresidue_split(&big(3), &big(7)).unwrap();
        assert_eq!(zmod::mod_reduce(&(&a + &b), &big(7)), big(3));
        assert_eq!(zmod::legendre(&a, &big(7)), 1);
        assert_eq!(zmod::legendre(&b, &big(7)), 1);

        let (a, b) = two_nonresidue_split(&big(2), &big(5)).unwrap();
        assert_eq!(zmod::legendre(&a, &big(5)), 1);
        assert_eq!(zmod::mod_reduce(&(&a + &b), &big(5)), big(2));

        for p in [3i64, 5, 7, 11, 13] {
            for t in 1..p {
                let (a, b) = two_nonresidue_split(&big(t), &big(p)).unwrap();
                assert_eq!(zmod::mod_reduce(&(&a + &b), &big(p)), big(t));
                assert_eq!(zmod::legendre(&a, &big(p)), -zmod::legendre(&big(t), &big(p)));
                assert_eq!(zmod::legendre(&a, &big(p)), zmod::legendre(&b, &big(p)));
            }
        }
    }

    #[test]
    fn dim2_oddp_examples() {
        // Mixed-class case with a genuine two-unit split.
        let ctx = ctx_at(&big(5), 3);
        let (x1, x2) = represent_dim2_oddp(&big(1), 2, &big(1), &big(2), &ctx).unwrap();
        let value = &x1 * &x1 + big(25) * &x2 * &x2;
        assert_eq!(zmod::mod_reduce(&value, &big(125)), zmod::mod_reduce(&big(50), &big(125)));
        assert!(x2.gcd(&big(5)).is_one());

        // Second-entry-only case.
        let ctx = ctx_at(&big(5), 2);
        let (x1, x2) = represent_dim2_oddp(&big(1), 0, &big(2), &big(2), &ctx).unwrap();
        assert!(x1.is_zero());
        assert_eq!(zmod::mod_reduce(&(big(2) * &x2 * &x2), &big(25)), big(2));

        let ctx = ctx_at(&big(7), 3);
        let (x1, x2) = represent_dim2_oddp(&big(1), 2, &big(3), &big(3), &ctx).unwrap();
        let value = &x1 * &x1 + big(49) * big(3) * &x2 * &x2;
        assert_eq!(
            zmod::mod_reduce(&value, &big(343)),
            zmod::mod_reduce(&(big(49) * big(3)), &big(343))
        );
    }

    #[test]
    fn type_ii_examples() {
        let ctx = ctx_at(&big(2), 4);
        let (x1, _x2) = represent_type_ii(&big(1), &big(1), &big(2), 0, &big(2), &ctx).unwrap();
        assert!(x1.is_odd());

        let (x1, x2) = represent_type_ii(&big(1), &big(1), &big(1), 0, &big(6), &ctx).unwrap();
        let v = big(2) * (&x1 * &x1 + &x1 * &x2 + &x2 * &x2);
        assert_eq!(zmod::mod_reduce(&v, &big(16)), big(6));

        let ctx = ctx_at(&big(2), 5);
        let (x1, x2) = represent_type_ii(&big(1), &big(1), &big(2), 0, &big(10), &ctx).unwrap();
        let v = big(2) * (&x1 * &x1 + &x1 * &x2 + big(2) * &x2 * &x2);
        assert_eq!(zmod::mod_reduce(&v, &big(32)), big(10));

        assert!(represent_type_ii(&big(1), &big(1), &big(2), 0, &big(4), &ctx).is_err());
    }

    #[test]
    fn dim4_table_complete() {
        assert_eq!(dim4_table_misses(), 0);
    }

    #[test]
    fn dim4_examples() {
        let ctx = ctx_at(&big(2), 8);
        let one = big(1);
        let xs =
            represent_dim4_mod2k([0, 0, 0, 0], [&one, &one, &one, &one], &big(7), &ctx).unwrap();
        let acc: BigInt = xs.iter().map(|x| x * x).sum();
        assert_eq!(zmod::mod_reduce(&acc, &big(256)), big(7));
        assert!(xs[3].is_odd());

        let xs =
            represent_dim4_mod2k([0, 0, 0, 0], [&one, &one, &one, &one], &big(1), &ctx).unwrap();
        let acc: BigInt = xs.iter().map(|x| x * x).sum();
        assert_eq!(zmod::mod_reduce(&acc, &big(256)), big(1));

        let three = big(3);
        let xs = represent_dim4_mod2k([0, 0, 1, 1], [&one, &three, &one, &one], &big(3), &ctx)
            .unwrap();
        let mut acc = BigInt::zero();
        for (j, s) in [0u32, 0, 1, 1].iter().enumerate() {
            let u = if j == 1 { &three } else { &one };
            acc += big(2).pow(*s) * u * &xs[j] * &xs[j];
        }
        assert_eq!(zmod::mod_reduce(&acc, &big(256)), zmod::mod_reduce(&big(6), &big(256)));
    }

    #[test]
    fn build_cases() {
        // One entry in the identity.
        let ctx = ctx_at(&big(5), 3);
        let blocks = vec![
            Block::TypeI { scale: 0, unit: big(1) },
            Block::TypeI { scale: 0, unit: big(1) },
        ];
        let rep =
            build_local_representation(&blocks, &big(1), &ctx, &LocalCase::UnitFirst { index: 0 })
                .unwrap();
        assert_eq!(rep.x[0], big(1));

        // Two entries, diag(1, 25), target 50.
        let blocks = vec![
            Block::TypeI { scale: 0, unit: big(1) },
            Block::TypeI { scale: 2, unit: big(1) },
        ];
        let rep = build_local_representation(
            &blocks,
            &big(50),
            &ctx,
            &LocalCase::TwoEntry { hi: 1, lo: 0 },
        )
        .unwrap();
        assert_eq!(rep.s_matrix.at(0, 0), &big(25));

        // Even block first.
        let ctx2 = ctx_at(&big(2), 6);
        let blocks = vec![
            Block::TypeII { scale: 0, a: big(1), b: big(1), c: big(2) },
            Block::TypeI { scale: 1, unit: big(3) },
        ];
        build_local_representation(&blocks, &big(2), &ctx2, &LocalCase::TypeTwo { index: 0 })
            .unwrap();

        // Four entries at 2.
        let blocks = vec![
            Block::TypeI { scale: 0, unit: big(1) },
            Block::TypeI { scale: 0, unit: big(3) },
            Block::TypeI { scale: 1, unit: big(1) },
            Block::TypeI { scale: 2, unit: big(7) },
            Block::TypeI { scale: 3, unit: big(1) },
        ];
        let rep = build_local_representation(&blocks, &big(4 * 5), &ctx2, &LocalCase::FourEntry)
            .unwrap();
        assert!(rep.x[0].is_odd());

        // Generic auxiliary-prime case.
        let ctx3 = ctx_at(&big(11), 3);
        let blocks = vec![
            Block::TypeI { scale: 0, unit: big(7) },
            Block::TypeI { scale: 0, unit: big(1) },
            Block::TypeI { scale: 0, unit: big(1) },
        ];
        build_local_representation(&blocks, &big(11 * 5), &ctx3, &LocalCase::Generic).unwrap();
    }
}
