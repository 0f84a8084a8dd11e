//! Recursive construction of an integral quadratic form in a given genus,
//! the congruence-equivalence search used to splice recursion levels
//! together, and genus-membership verification.
//!
//! Each level picks a primitively represented target t, builds per-prime
//! frames `d = x'SA`, `H = (t A'SA - d'd)` from the local representations,
//! derives the one-dimension-smaller child symbol from the H matrices,
//! recurses, and assembles
//!
//! ```text
//! Q = gcd * [ t      dU ]
//!           [ (dU)'  (H~ + U'd'dU) / t ]
//! ```
//!
//! with U a modular congruence between the child realization and H. The
//! determinant of every assembled level is checked exactly.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::RngCore;

use crate::error::{Error, Result};
use crate::findt::find_t;
use crate::forms::{self, Mat, QuadForm};
use crate::jordan::{block_diagonalize, constituents, Block};
use crate::localform::{local_blocks_p, local_form_p, odd_type_entries_for, t_minus, t_plus};
use crate::represent::build_local_representation;
use crate::symbol::{
    det_factorization, det_of_symbol, p_symbol, reduce_symbol, two_symbol, validate_symbol,
    GenusSymbol,
};
use crate::zmod::{self, big, LocalContext};

// ---------------------------------------------------------------------------
// Modular equivalence of forms: per-scale canonicalization
// ---------------------------------------------------------------------------

fn ctx_at(p: &BigInt, k: u32) -> LocalContext {
    LocalContext { p: p.clone(), k, modulus: p.pow(k), kp: zmod::kp_of(p) }
}

/// Exhaustive search for a 2 x 2 transform V with odd determinant and
/// V'AV ≡ B (mod 8), for unimodular 2-adic A, B.
fn search_dim2_mod8(a: &Mat, b: &Mat) -> Option<Mat> {
    let eight = big(8);
    let am: Vec<i64> = (0..4).map(|i| a.at(i / 2, i % 2).mod_floor(&eight).to_i64().unwrap()).collect();
    let bm: Vec<i64> = (0..4).map(|i| b.at(i / 2, i % 2).mod_floor(&eight).to_i64().unwrap()).collect();
    for v11 in 0..8i64 {
        for v21 in 0..8i64 {
            for v12 in 0..8i64 {
                for v22 in 0..8i64 {
                    if (v11 * v22 - v12 * v21) % 2 == 0 {
                        continue;
                    }
                    // V' A V entrywise mod 8.
                    let col1 = [v11, v21];
                    let col2 = [v12, v22];
                    let quad = |x: &[i64; 2], y: &[i64; 2]| {
                        (am[0] * x[0] * y[0]
                            + am[1] * x[0] * y[1]
                            + am[2] * x[1] * y[0]
                            + am[3] * x[1] * y[1])
                            .rem_euclid(8)
                    };
                    if quad(&col1, &col1) == bm[0]
                        && quad(&col1, &col2) == bm[1]
                        && quad(&col2, &col2) == bm[3]
                    {
                        let mut v = Mat::zero(2, 2);
                        *v.at_mut(0, 0) = big(v11);
                        *v.at_mut(0, 1) = big(v12);
                        *v.at_mut(1, 0) = big(v21);
                        *v.at_mut(1, 1) = big(v22);
                        return Some(v);
                    }
                }
            }
        }
    }
    None
}

/// Newton improvement of a unimodular congruence: given W'AW ≡ B (mod 2^m)
/// with m >= 3 and B invertible mod 4, push the congruence to mod 2^k.
fn lift_unimodular_congruence(a: &Mat, b: &Mat, w0: Mat, k: u32) -> Result<Mat> {
    let d = b.rows;
    let four = big(4);
    let b_inv4 = b
        .inverse_mod(&four)
        .ok_or_else(|| Error::Internal("target block is not unimodular".into()))?;
    let mut w = w0;
    let mut m = 3u32;
    while m < k {
        let modulus = BigInt::one() << (m + 1);
        let err = w.transpose().mul(a).mul(&w).sub(b);
        let halves = err.reduce_mod(&modulus);
        // err ≡ 2^m E (mod 2^{m+1}); correct with W(I - 2^{m-1} B^{-1} E).
        let mut e = Mat::zero(d, d);
        let mut nonzero = false;
        for i in 0..d {
            for j in 0..d {
                let v = halves.at(i, j) >> m;
                if !v.is_zero() {
                    nonzero = true;
                }
                *e.at_mut(i, j) = v;
            }
        }
        if nonzero {
            let x = b_inv4.mul(&e).reduce_mod(&four);
            let mut corr = Mat::identity(d);
            for i in 0..d {
                for j in 0..d {
                    let v = corr.at(i, j) - (x.at(i, j) << (m - 1));
                    *corr.at_mut(i, j) = v;
                }
            }
            w = w.mul(&corr).reduce_mod(&(BigInt::one() << k));
        }
        m += 1;
    }
    let check = w.transpose().mul(a).mul(&w).reduce_mod(&(BigInt::one() << k));
    if &check != &b.reduce_mod(&(BigInt::one() << k)) {
        return Err(Error::Internal("unimodular congruence lift failed".into()));
    }
    Ok(w)
}

/// Description of one scale group inside a canonicalized matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
struct ScaleGroup {
    scale: u32,
    offset: usize,
    dim: usize,
    type_ii: bool,
    sign: i8,
    oddity: u8,
}

struct Normalizer {
    ctx: LocalContext,
    m: Mat,
    w: Mat,
}

impl Normalizer {
    /// Apply a small transform on an arbitrary coordinate subset.
    fn apply_at(&mut self, coords: &[usize], v: &Mat) {
        let n = self.m.rows;
        let d = coords.len();
        let mut e = Mat::identity(n);
        for i in 0..d {
            for j in 0..d {
                *e.at_mut(coords[i], coords[j]) = v.at(i, j).clone();
            }
        }
        self.m = e.transpose().mul(&self.m).mul(&e).reduce_mod(&self.ctx.modulus);
        self.w = self.w.mul(&e).reduce_mod(&self.ctx.modulus);
    }

    fn scale_col(&mut self, pos: usize, s: &BigInt) {
        let mut v = Mat::zero(1, 1);
        *v.at_mut(0, 0) = s.clone();
        self.apply_at(&[pos], &v);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        let mut v = Mat::zero(2, 2);
        *v.at_mut(0, 1) = BigInt::one();
        *v.at_mut(1, 0) = BigInt::one();
        self.apply_at(&[a, b], &v);
    }

    fn unit_at(&self, pos: usize, scale: u32) -> BigInt {
        let pk = self.ctx.p.pow(scale);
        let sub = &self.ctx.modulus / &pk;
        (self.m.at(pos, pos) / &pk).mod_floor(&sub)
    }
}

/// Make one odd-prime scale group canonical: I^(m-1) ⊕ (1 or the least
/// nonresidue).
fn canon_odd_scale(nm: &mut Normalizer, offset: usize, dim: usize, scale: u32) -> Result<(i8, u8)> {
    let p = nm.ctx.p.clone();
    let sub_k = nm.ctx.k - scale;
    let sub_mod = p.pow(sub_k);
    let mut throwaway = rand::rngs::mock::StepRng::new(0, 1);
    let tau = zmod::find_nonresidue(&p, &mut throwaway)?;
    // Pair off nonresidues left to right.
    for j in 0..dim {
        let u = nm.unit_at(offset + j, scale);
        if zmod::legendre(&u, &p) != -1 {
            continue;
        }
        let partner = (j + 1..dim).find(|&l| {
            zmod::legendre(&nm.unit_at(offset + l, scale), &p) == -1
        });
        if let Some(l) = partner {
            // Rotate (j, l) so the j entry becomes 1.
            let v = nm.unit_at(offset + l, scale);
            let (y1, mut y2) = crate::represent::solve_two_units(&u, &v, &BigInt::one(), &p)?;
            y2 = crate::represent::lift_odd_p_square(
                &v,
                &(BigInt::one() - &u * &y1 * &y1),
                &y2,
                &p,
                sub_k,
            );
            let r = zmod::mod_mul(&v, &y2, &sub_mod);
            let mut w2 = Mat::zero(2, 2);
            *w2.at_mut(0, 0) = y1.clone();
            *w2.at_mut(1, 0) = y2.clone();
            *w2.at_mut(0, 1) = zmod::mod_reduce(&(-&r * &y1), &sub_mod);
            *w2.at_mut(1, 1) = zmod::mod_reduce(&(BigInt::one() - &r * &y2), &sub_mod);
            nm.apply_at(&[offset + j, offset + l], &w2);
        } else if j + 1 < dim {
            nm.swap_cols(offset + j, offset + dim - 1);
        } else {
            break;
        }
    }
    // Scale every entry to 1, the last to the canonical class.
    let mut sign = 1i8;
    for j in 0..dim {
        let u = nm.unit_at(offset + j, scale);
        let target = if j == dim - 1 && zmod::legendre(&u, &p) == -1 {
            sign = -1;
            tau.clone()
        } else {
            BigInt::one()
        };
        if u != target {
            let ratio = zmod::mod_mul(
                &target,
                &zmod::mod_inv(&u, &sub_mod).ok_or_else(|| Error::Internal("unit".into()))?,
                &sub_mod,
            );
            let s = zmod::sqrt_mod_pk(&ratio, &ctx_at(&p, sub_k))
                .map_err(|_| Error::Internal("canonical rescale is not a square".into()))?;
            nm.scale_col(offset + j, &s);
        }
    }
    Ok((sign, 0))
}

/// Canonicalize one odd-type scale group at p = 2 to the table multiset
/// for its (dimension, sign, oddity), entries in table order. Each target
/// entry is represented directly inside the remaining block (the mod-16
/// grid guarantees a solution using at most four coordinates) and split
/// off; the complement is re-diagonalized.
fn canon_two_odd_scale(
    nm: &mut Normalizer,
    offset: usize,
    dim: usize,
    scale: u32,
) -> Result<(i8, u8)> {
    let sub_k = nm.ctx.k - scale;
    let eight = big(8);
    let sub_mod = BigInt::one() << sub_k;
    let sub_ctx = ctx_at(&big(2), sub_k);
    let class_of = |nm: &Normalizer, j: usize| {
        nm.unit_at(offset + j, scale).mod_floor(&eight).to_u8().unwrap()
    };
    let classes: Vec<u8> = (0..dim).map(|j| class_of(nm, j)).collect();
    let sign = classes.iter().fold(1i8, |acc, &c| acc * if c == 1 || c == 7 { 1 } else { -1 });
    let oddity = (classes.iter().map(|&c| c as u32).sum::<u32>() % 8) as u8;
    let target: Vec<u8> = odd_type_entries_for(dim, sign, oddity)?
        .into_iter()
        .map(|v| v as u8)
        .collect();
    for j in 0..dim {
        let want = big(target[j] as i64);
        let window = dim - j;
        // The four-coordinate solver works with exact class values, so
        // rescale every window entry to its class first.
        for l in 0..window {
            let u = nm.unit_at(offset + j + l, scale);
            let cls = u.mod_floor(&eight);
            if u != cls {
                let ratio =
                    zmod::mod_mul(&cls, &zmod::mod_inv(&u, &sub_mod).unwrap(), &sub_mod);
                let sc = zmod::sqrt_mod_pk(&ratio, &sub_ctx)
                    .map_err(|_| Error::Internal("class rescale is not a square".into()))?;
                nm.scale_col(offset + j + l, &sc);
            }
        }
        let units: Vec<BigInt> = (0..window).map(|l| nm.unit_at(offset + j + l, scale)).collect();
        if window == 1 {
            let u = &units[0];
            if u.mod_floor(&eight) != want {
                return Err(Error::EquivalenceNotFound(
                    "final unit class disagrees with the target multiset".into(),
                ));
            }
            if u != &want {
                let ratio =
                    zmod::mod_mul(&want, &zmod::mod_inv(u, &sub_mod).unwrap(), &sub_mod);
                let sc = zmod::sqrt_mod_pk(&ratio, &sub_ctx)
                    .map_err(|_| Error::Internal("class rescale is not a square".into()))?;
                nm.scale_col(offset + j, &sc);
            }
            continue;
        }
        // Vector representing the target value on the leading window
        // coordinates, with an odd coordinate for the completion pivot.
        let x = represent_in_units(&units, &want, sub_k)?;
        let pivot = x
            .iter()
            .position(|v| v.is_odd())
            .ok_or_else(|| Error::Internal("representation lost its odd coordinate".into()))?;
        // Completion [x | e_l - (d_l x_l / c) x], determinant ±x_pivot.
        let c_inv = zmod::mod_inv(&want, &sub_mod).expect("odd target");
        let mut w = Mat::zero(window, window);
        for (i, xi) in x.iter().enumerate() {
            *w.at_mut(i, 0) = xi.clone();
        }
        let mut col = 1;
        for l in 0..window {
            if l == pivot {
                continue;
            }
            let r = zmod::mod_mul(&(&units[l] * &x[l]), &c_inv, &sub_mod);
            for (i, xi) in x.iter().enumerate() {
                let base = if i == l { BigInt::one() } else { BigInt::zero() };
                *w.at_mut(i, col) = zmod::mod_reduce(&(base - &r * xi), &sub_mod);
            }
            col += 1;
        }
        let coords: Vec<usize> = (0..window).map(|l| offset + j + l).collect();
        nm.apply_at(&coords, &w);
        let got = nm.unit_at(offset + j, scale);
        if got != zmod::mod_reduce(&want, &sub_mod) {
            return Err(Error::Internal(format!(
                "entry placement produced {got}, wanted {want}"
            )));
        }
        rediagonalize_window(nm, offset + j + 1, window - 1, scale)?;
    }
    Ok((sign, oddity))
}

/// Solve sum d_i x_i^2 ≡ c (mod 2^k) over odd units d_i with some odd
/// x_i. Four coordinates always suffice; smaller windows are searched
/// modulo 8 and lifted.
fn represent_in_units(units: &[BigInt], c: &BigInt, k: u32) -> Result<Vec<BigInt>> {
    let n = units.len();
    let ctx = ctx_at(&big(2), k);
    if n >= 4 {
        let xs = crate::represent::represent_dim4_mod2k(
            [0, 0, 0, 0],
            [&units[0], &units[1], &units[2], &units[3]],
            c,
            &ctx,
        )?;
        let mut out = xs.to_vec();
        out.resize(n, BigInt::zero());
        return Ok(out);
    }
    let eight = big(8);
    let want = c.mod_floor(&eight);
    let range: Vec<i64> = (0..8).collect();
    let dims: Vec<&[i64]> = match n {
        2 => vec![&range[..], &range[..]],
        3 => vec![&range[..4], &range[..4], &range[..4]],
        _ => return Err(Error::Internal("window must have at least two entries".into())),
    };
    let mut best: Option<Vec<BigInt>> = None;
    let mut idx = vec![0usize; n];
    'outer: loop {
        let x: Vec<BigInt> = idx.iter().enumerate().map(|(i, &v)| big(dims[i][v])).collect();
        let value: BigInt = (0..n).map(|i| &units[i] * &x[i] * &x[i]).sum();
        if value.mod_floor(&eight) == want && x.iter().any(|v| v.is_odd()) {
            best = Some(x);
            break;
        }
        let mut pos = 0;
        loop {
            if pos == n {
                break 'outer;
            }
            idx[pos] += 1;
            if idx[pos] < dims[pos].len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
    let mut x = best.ok_or_else(|| {
        Error::EquivalenceNotFound("target value not represented by the window".into())
    })?;
    // Lift the odd coordinate to make the congruence exact.
    let pivot = x.iter().position(|v| v.is_odd()).unwrap();
    let rest: BigInt =
        (0..n).filter(|&i| i != pivot).map(|i| &units[i] * &x[i] * &x[i]).sum();
    let rhs = c - rest;
    let lifted = crate::represent::lift_square_two_adic(&units[pivot], &rhs, &x[pivot], k);
    x[pivot] = zmod::mod_reduce(&lifted, &ctx.modulus);
    Ok(x)
}

/// Re-diagonalize a window of coordinates that share one scale.
fn rediagonalize_window(nm: &mut Normalizer, start: usize, len: usize, scale: u32) -> Result<()> {
    if len <= 1 {
        return Ok(());
    }
    let pk = nm.ctx.p.pow(scale);
    let sub_k = nm.ctx.k - scale;
    let mut sub = Mat::zero(len, len);
    for i in 0..len {
        for j in 0..len {
            *sub.at_mut(i, j) = (nm.m.at(start + i, start + j) / &pk)
                .mod_floor(&(nm.ctx.p.pow(sub_k)));
        }
    }
    let q = QuadForm::new(sub)?;
    let sub_ctx = ctx_at(&nm.ctx.p, sub_k);
    let (bd, u) = block_diagonalize(&q, &sub_ctx);
    if bd.blocks.iter().any(|b| !matches!(b, Block::TypeI { scale: 0, .. })) {
        return Err(Error::EquivalenceNotFound(
            "window complement is not an odd unimodular diagonal".into(),
        ));
    }
    let coords: Vec<usize> = (0..len).map(|l| start + l).collect();
    nm.apply_at(&coords, &u.mat);
    Ok(())
}

fn two_dim_submatrix(nm: &Normalizer, pa: usize, pb: usize, scale: u32) -> Mat {
    let pk = nm.ctx.p.pow(scale);
    let mut a = Mat::zero(2, 2);
    *a.at_mut(0, 0) = nm.m.at(pa, pa) / &pk;
    *a.at_mut(0, 1) = nm.m.at(pa, pb) / &pk;
    *a.at_mut(1, 0) = nm.m.at(pb, pa) / &pk;
    *a.at_mut(1, 1) = nm.m.at(pb, pb) / &pk;
    a
}

/// Canonicalize one even-type scale group at p = 2: a chain of standard
/// blocks, at most one negative block, placed last.
fn canon_two_even_scale(
    nm: &mut Normalizer,
    offset: usize,
    dim: usize,
    scale: u32,
) -> Result<(i8, u8)> {
    let sub_k = nm.ctx.k - scale;
    let pairs = dim / 2;
    let tp = t_plus().into_mat();
    let tm = t_minus().into_mat();
    // Normalize every 2 x 2 block to a standard one.
    let mut minus_positions = Vec::new();
    for b in 0..pairs {
        let c0 = offset + 2 * b;
        let sub = two_dim_submatrix(nm, c0, c0 + 1, scale);
        let det8 = (sub.at(0, 0) * sub.at(1, 1) - sub.at(0, 1) * sub.at(1, 0)).mod_floor(&big(8));
        let target = if det8 == big(7) { &tp } else { &tm };
        let w0 = search_dim2_mod8(&sub, target).ok_or_else(|| {
            Error::EquivalenceNotFound("even block does not reach a standard block".into())
        })?;
        let w = lift_unimodular_congruence(&sub, target, w0, sub_k)?;
        nm.apply_at(&[c0, c0 + 1], &w);
        if det8 == big(3) {
            minus_positions.push(b);
        }
    }
    // Cancel negative blocks in pairs via a hyperbolic-pair transform.
    while minus_positions.len() >= 2 {
        let b2 = minus_positions.pop().unwrap();
        let b1 = minus_positions.pop().unwrap();
        let coords = [
            offset + 2 * b1,
            offset + 2 * b1 + 1,
            offset + 2 * b2,
            offset + 2 * b2 + 1,
        ];
        let w4 = minus_pair_transform(sub_k)?;
        nm.apply_at(&coords, &w4);
        // The two new blocks are in the positive class; normalize them.
        for &b in &[b1, b2] {
            let c0 = offset + 2 * b;
            let sub = two_dim_submatrix(nm, c0, c0 + 1, scale);
            let det8 =
                (sub.at(0, 0) * sub.at(1, 1) - sub.at(0, 1) * sub.at(1, 0)).mod_floor(&big(8));
            if det8 != big(7) {
                return Err(Error::Internal("negative-pair cancellation failed".into()));
            }
            let w0 = search_dim2_mod8(&sub, &tp)
                .ok_or_else(|| Error::Internal("standard block search failed".into()))?;
            let w = lift_unimodular_congruence(&sub, &tp, w0, sub_k)?;
            nm.apply_at(&[c0, c0 + 1], &w);
        }
    }
    let sign = if minus_positions.is_empty() { 1 } else { -1 };
    // Move a remaining negative block to the back.
    if let Some(&b) = minus_positions.first() {
        if b != pairs - 1 {
            let ca = offset + 2 * b;
            let cb = offset + 2 * (pairs - 1);
            nm.swap_cols(ca, cb);
            nm.swap_cols(ca + 1, cb + 1);
        }
    }
    Ok((sign, 0))
}

/// Explicit transform sending T- ⊕ T- to U ⊕ Z with U hyperbolic and Z in
/// the positive class, exact modulo 2^k.
fn minus_pair_transform(k: u32) -> Result<Mat> {
    let modulus = BigInt::one() << k;
    let g = QuadForm::direct_sum(&[t_minus(), t_minus()]);
    // Isotropic x = (x1, 1, 1, 0): x1^2 + x1 + 2 ≡ 0 (mod 2^{k-1}).
    let mut x1 = big(2);
    for m in 3..k.max(4) {
        let v = (&x1 * &x1 + &x1 + big(2)).mod_floor(&(BigInt::one() << (m + 1)));
        if !(v >> m).is_zero() {
            x1 += BigInt::one() << m;
        }
    }
    let x = [x1, big(1), big(1), big(0)];
    let gx: Vec<BigInt> = (0..4)
        .map(|i| (0..4).map(|j| g.at(i, j) * &x[j]).sum::<BigInt>())
        .collect();
    let qx: BigInt = (0..4).map(|i| &gx[i] * &x[i]).sum();
    debug_assert!(qx.mod_floor(&modulus).is_zero());
    // y = e4 - x is isotropic with x'Gy = 1.
    let y: Vec<BigInt> = (0..4)
        .map(|i| if i == 3 { BigInt::one() - &x[i] } else { -&x[i] })
        .collect();
    let gy: Vec<BigInt> = (0..4)
        .map(|i| (0..4).map(|j| g.at(i, j) * &y[j]).sum::<BigInt>())
        .collect();
    // z_j = e_j - (y'Ge_j) x - (x'Ge_j) y for j = 1, 2.
    let mut cols: Vec<Vec<BigInt>> = vec![x.to_vec(), y.to_vec()];
    for j in 0..2 {
        let alpha = -&gy[j];
        let beta = -&gx[j];
        let mut z: Vec<BigInt> = (0..4)
            .map(|i| &x[i] * &alpha + &y[i] * &beta)
            .collect();
        z[j] += BigInt::one();
        cols.push(z);
    }
    let w = Mat::from_cols(cols)?.reduce_mod(&modulus);
    // Sanity: the transformed first block is exactly hyperbolic.
    let t = g.conjugate(&w, &modulus)?;
    for (i, j, want) in [(0usize, 0usize, 0i64), (0, 1, 1), (1, 1, 0), (0, 2, 0), (0, 3, 0), (1, 2, 0), (1, 3, 0)] {
        if t.at(i, j) != &zmod::mod_reduce(&big(want), &modulus) {
            return Err(Error::Internal("hyperbolic pair construction failed".into()));
        }
    }
    Ok(w)
}

/// Canonicalize a form modulo p^k. Returns the transform, the canonical
/// matrix, and the per-scale layout.
fn canonicalize(q: &QuadForm, ctx: &LocalContext) -> Result<(Mat, Mat, Vec<ScaleGroup>)> {
    let (bd, u0) = block_diagonalize(q, ctx);
    let mut nm = Normalizer { ctx: ctx.clone(), m: bd.matrix().mat().clone(), w: u0.mat };
    // Group blocks into scales.
    let mut groups: Vec<(u32, usize, usize, bool)> = Vec::new(); // scale, offset, dim, type_ii
    let mut offset = 0;
    for b in &bd.blocks {
        let pad = if ctx.is_two() { 3 } else { 1 };
        if b.scale() + pad > ctx.k {
            return Err(Error::ScaleOverflow);
        }
        match groups.last_mut() {
            Some((sc, _, dim, ii)) if *sc == b.scale() => {
                *dim += b.dim();
                debug_assert_eq!(*ii, matches!(b, Block::TypeII { .. }));
            }
            _ => groups.push((b.scale(), offset, b.dim(), matches!(b, Block::TypeII { .. }))),
        }
        offset += b.dim();
    }
    let mut layout = Vec::new();
    for (scale, offset, dim, type_ii) in groups {
        let (sign, oddity) = if !ctx.is_two() {
            canon_odd_scale(&mut nm, offset, dim, scale)?
        } else if type_ii {
            canon_two_even_scale(&mut nm, offset, dim, scale)?
        } else {
            canon_two_odd_scale(&mut nm, offset, dim, scale)?
        };
        layout.push(ScaleGroup { scale, offset, dim, type_ii, sign, oddity });
    }
    Ok((nm.w, nm.m, layout))
}

// ---------------------------------------------------------------------------
// Cross-scale class walking at p = 2
// ---------------------------------------------------------------------------

type Profile = Vec<(i8, u8)>;

fn profile_of(layout: &[ScaleGroup]) -> Profile {
    layout.iter().filter(|g| !g.type_ii).map(|g| (g.sign, g.oddity)).collect()
}

fn kron_class(c: u8) -> i8 {
    if c == 1 || c == 7 {
        1
    } else {
        -1
    }
}

/// Effective class shift of a cross-scale move modifying the entry at
/// `from_scale` against a partner at `to_scale`. Modifying the lower
/// entry reaches across gaps of at most two; modifying the higher entry
/// works across any gap, with the shift fixed by the gap parity.
fn walk_shift(from_scale: u32, to_scale: u32) -> Option<i64> {
    let gap = from_scale.abs_diff(to_scale);
    if gap == 0 {
        return None;
    }
    if from_scale < to_scale {
        match gap {
            1 => Some(2),
            2 => Some(4),
            _ => None,
        }
    } else if gap % 2 == 1 {
        Some(2)
    } else {
        Some(4)
    }
}

/// One walk move: the modified class u becomes u + e v and the partner v
/// becomes v (1 - e v / u').
fn walk_move(u: u8, v: u8, e: i64) -> Option<(u8, u8)> {
    let eight = 8i64;
    let u2 = (u as i64 + e * v as i64).rem_euclid(eight);
    if u2 == u as i64 {
        return None;
    }
    let inv = [0i64, 1, 0, 3, 0, 5, 0, 7][u2 as usize];
    let v2 = ((v as i64) * (1 - e * (v as i64) * inv)).rem_euclid(eight);
    Some((u2 as u8, v2 as u8))
}

/// Find a sequence of two-entry cross-scale moves taking the source
/// profile to the target. Returns per-move (group index i, group index j,
/// class at i, class at j, modify-first flag).
fn walk_search(
    groups: &[ScaleGroup],
    start: &Profile,
    target: &Profile,
) -> Option<Vec<(usize, usize, u8, u8, bool)>> {
    if start == target {
        return Some(Vec::new());
    }
    let odd_groups: Vec<&ScaleGroup> = groups.iter().filter(|g| !g.type_ii).collect();
    let realize = |p: &Profile| -> Option<Vec<Vec<u8>>> {
        odd_groups
            .iter()
            .zip(p)
            .map(|(g, (sign, oddity))| {
                odd_type_entries_for(g.dim, *sign, *oddity)
                    .ok()
                    .map(|v| v.into_iter().map(|x| x as u8).collect())
            })
            .collect()
    };
    let mut seen: BTreeMap<Profile, (Profile, (usize, usize, u8, u8, bool))> = BTreeMap::new();
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(state) = queue.pop_front() {
        if &state == target {
            let mut path = Vec::new();
            let mut cur = state;
            while &cur != start {
                let (prev, mv) = seen[&cur].clone();
                path.push(mv);
                cur = prev;
            }
            path.reverse();
            return Some(path);
        }
        let Some(multisets) = realize(&state) else { continue };
        for i in 0..odd_groups.len() {
            for j in 0..odd_groups.len() {
                if i == j {
                    continue;
                }
                let Some(shift) = walk_shift(odd_groups[i].scale, odd_groups[j].scale)
                else {
                    continue;
                };
                let mut us: Vec<u8> = multisets[i].clone();
                us.dedup();
                let mut vs: Vec<u8> = multisets[j].clone();
                vs.dedup();
                for &u in &us {
                    for &v in &vs {
                        let Some((u2, v2)) = walk_move(u, v, shift) else { continue };
                        let mut next = state.clone();
                        let (si, oi) = next[i];
                        next[i] = (
                            si * kron_class(u) * kron_class(u2),
                            ((oi as i64 - u as i64 + u2 as i64).rem_euclid(8)) as u8,
                        );
                        let (sj, oj) = next[j];
                        next[j] = (
                            sj * kron_class(v) * kron_class(v2),
                            ((oj as i64 - v as i64 + v2 as i64).rem_euclid(8)) as u8,
                        );
                        if realize(&next).is_none() {
                            continue;
                        }
                        if !seen.contains_key(&next) && &next != start {
                            seen.insert(next.clone(), (state.clone(), (i, j, u, v, true)));
                            queue.push_back(next.clone());
                        }
                    }
                }
            }
        }
        if seen.len() > 20000 {
            return None;
        }
    }
    None
}

/// Apply one walk move on the canonical matrix.
fn apply_walk_move(
    nm: &mut Normalizer,
    groups: &[ScaleGroup],
    mv: (usize, usize, u8, u8, bool),
) -> Result<()> {
    let odd_groups: Vec<&ScaleGroup> = groups.iter().filter(|g| !g.type_ii).collect();
    let (gi, gj, u, v, _) = mv;
    let (ga, gb) = (odd_groups[gi], odd_groups[gj]);
    let eight = big(8);
    let find_pos = |nm: &Normalizer, g: &ScaleGroup, cls: u8| {
        (0..g.dim).find(|&l| {
            nm.unit_at(g.offset + l, g.scale).mod_floor(&eight) == big(cls as i64)
        })
    };
    let pa = g_offset(ga, find_pos(nm, ga, u).ok_or_else(|| Error::Internal("walk source".into()))?);
    let pb = g_offset(gb, find_pos(nm, gb, v).ok_or_else(|| Error::Internal("walk source".into()))?);
    let gap = ga.scale.abs_diff(gb.scale);
    let shift = walk_shift(ga.scale, gb.scale)
        .ok_or_else(|| Error::Internal("illegal walk move".into()))?;
    let (u2, _) =
        walk_move(u, v, shift).ok_or_else(|| Error::Internal("trivial walk move".into()))?;
    let k = nm.ctx.k;
    let sub_k = k - ga.scale;
    // First column (a, c): odd on the modified entry, weight on the
    // partner sized so the cross term lands at the modified scale with
    // the intended shift.
    let c_val: BigInt = if ga.scale < gb.scale {
        BigInt::one()
    } else if gap % 2 == 1 {
        big(1) << ((gap + 1) / 2)
    } else {
        big(1) << (gap / 2 + 1)
    };
    let ratio = zmod::mod_mul(
        &(big(u2 as i64) - big(shift) * big(v as i64)),
        &zmod::mod_inv(&big(u as i64), &big(8)).unwrap(),
        &eight,
    );
    debug_assert!(ratio.is_one(), "walk move must be a square rescale");
    let ua = nm.unit_at(pa, ga.scale);
    let ub = nm.unit_at(pb, gb.scale);
    // a^2 = (u2 - 2^g v) / actual-unit modulo 2^{sub_k}.
    let sub_mod = BigInt::one() << sub_k;
    let target_num = zmod::mod_reduce(
        &(big(u2 as i64) - &c_val * &c_val * &ub * (BigInt::one() << gb.scale) / (BigInt::one() << ga.scale)),
        &sub_mod,
    );
    let asq = zmod::mod_mul(&target_num, &zmod::mod_inv(&ua, &sub_mod).unwrap(), &sub_mod);
    let a = zmod::sqrt_mod_pk(&asq, &ctx_at(&big(2), sub_k))
        .map_err(|_| Error::Internal("walk coefficient is not a square".into()))?;
    // Projection coefficient r = (x' D e2) / (x' D x).
    let d_a = nm.m.at(pa, pa).clone();
    let d_b = nm.m.at(pb, pb).clone();
    let val = &a * &a * &d_a + &c_val * &c_val * &d_b;
    let num = &c_val * &d_b;
    let denom_unit = &val / (BigInt::one() << ga.scale);
    let r = zmod::mod_mul(
        &(&num / (BigInt::one() << ga.scale)),
        &zmod::mod_inv(&denom_unit.mod_floor(&sub_mod), &sub_mod)
            .ok_or_else(|| Error::Internal("walk pivot not a unit".into()))?,
        &sub_mod,
    );
    let mut v2 = Mat::zero(2, 2);
    *v2.at_mut(0, 0) = a.clone();
    *v2.at_mut(1, 0) = c_val.clone();
    *v2.at_mut(0, 1) = zmod::mod_reduce(&(-&r * &a), &nm.ctx.modulus);
    *v2.at_mut(1, 1) = zmod::mod_reduce(&(BigInt::one() - &r * &c_val), &nm.ctx.modulus);
    nm.apply_at(&[pa, pb], &v2);
    // The modified entry must now be in class u2 at the same scale.
    let got = nm.unit_at(pa, ga.scale).mod_floor(&eight);
    if got != big(u2 as i64) {
        return Err(Error::Internal(format!("walk move produced class {got}, wanted {u2}")));
    }
    Ok(())
}

fn g_offset(g: &ScaleGroup, j: usize) -> usize {
    g.offset + j
}

// ---------------------------------------------------------------------------
// Equivalence driver
// ---------------------------------------------------------------------------

/// Find U with U'AU ≡ B (mod p^k) for forms with matching local data:
/// canonicalize both sides; at p = 2, bridge differing unit-class profiles
/// with cross-scale walk moves; fall back to exhaustive search for tiny
/// moduli.
pub fn find_equivalence_mod_pk(a: &QuadForm, b: &QuadForm, ctx: &LocalContext) -> Result<Mat> {
    let verify = |u: &Mat| -> Result<Mat> {
        let got = a.conjugate(u, &ctx.modulus)?;
        if got == b.reduce_mod(&ctx.modulus) {
            Ok(u.clone())
        } else {
            Err(Error::Internal("equivalence verification failed".into()))
        }
    };
    if a.reduce_mod(&ctx.modulus) == b.reduce_mod(&ctx.modulus) {
        return verify(&Mat::identity(a.n()));
    }
    let constructive_err = match constructive_equivalence(a, b, ctx) {
        Ok(u) => return verify(&u),
        Err(e) => e,
    };
    // Last resort: exhaustive search on tiny moduli.
    match crate::oracle::brute_force_equivalence(a, b, ctx) {
        Ok(Some(t)) => verify(&t.mat),
        Ok(None) => Err(Error::EquivalenceNotFound("forms are not equivalent".into())),
        Err(_) => Err(Error::EquivalenceNotFound(format!(
            "no constructive transform ({constructive_err}) and the fallback space modulo {}^{} is too large",
            ctx.p, ctx.k
        ))),
    }
}

fn constructive_equivalence(a: &QuadForm, b: &QuadForm, ctx: &LocalContext) -> Result<Mat> {
    let (wa, ma, la) = canonicalize(a, ctx)?;
    let (wb, mb, lb) = canonicalize(b, ctx)?;
    let splice = |w_left: &Mat, w_right: &Mat| -> Result<Mat> {
        let inv = crate::forms::Transform::new(w_right.clone(), ctx.modulus.clone())
            .inverse()
            .ok_or_else(|| Error::Internal("canonical transform not invertible".into()))?;
        Ok(w_left.mul(&inv.mat).reduce_mod(&ctx.modulus))
    };
    if ma == mb {
        return splice(&wa, &wb);
    }
    if !ctx.is_two() || !walk_compatible(&la, &lb) {
        return Err(Error::EquivalenceNotFound("canonical forms differ".into()));
    }
    // Bridge unit-class profiles with cross-scale walk moves.
    let mut nm = Normalizer { ctx: ctx.clone(), m: ma, w: wa };
    let start = profile_of(&la);
    let target = profile_of(&lb);
    let path = walk_search(&la, &start, &target)
        .ok_or_else(|| Error::EquivalenceNotFound("no walk path between profiles".into()))?;
    for mv in path {
        apply_walk_move(&mut nm, &la, mv)?;
        // Re-canonicalize every odd-type scale so the multisets stay
        // aligned with the walk's bookkeeping.
        for g in la.iter().filter(|g| !g.type_ii) {
            canon_two_odd_scale(&mut nm, g.offset, g.dim, g.scale)?;
        }
    }
    if nm.m != mb {
        return Err(Error::EquivalenceNotFound("walk did not reach the target profile".into()));
    }
    splice(&nm.w, &wb)
}

fn walk_compatible(la: &[ScaleGroup], lb: &[ScaleGroup]) -> bool {
    la.len() == lb.len()
        && la.iter().zip(lb).all(|(x, y)| {
            x.scale == y.scale
                && x.dim == y.dim
                && x.type_ii == y.type_ii
                && (!x.type_ii || (x.sign == y.sign))
        })
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

/// Options for the generator.
#[derive(Debug, Clone)]
pub struct GenerateOptions {
    pub retries: u32,
    pub collect_trace: bool,
}

impl Default for GenerateOptions {
    fn default() -> Self {
        GenerateOptions { retries: 16, collect_trace: false }
    }
}

/// Per-level instrumentation of one recursion step.
#[derive(Debug, Clone)]
pub struct LevelTrace {
    pub n: usize,
    pub gcd: BigInt,
    pub det_reduced: BigInt,
    pub t: BigInt,
    pub used_even_block: bool,
    pub orders: BTreeMap<BigInt, u32>,
    pub child_det: BigInt,
}

#[derive(Debug, Clone, Default)]
pub struct GenerateTrace {
    pub levels: Vec<LevelTrace>,
}

struct Frame {
    p: BigInt,
    k: u32,
    modulus: BigInt,
    d_row: Mat,
    h: QuadForm,
}

fn qfgen(
    s: &GenusSymbol,
    rng: &mut dyn RngCore,
    trace: &mut Option<&mut GenerateTrace>,
) -> Result<QuadForm> {
    let report = validate_symbol(s);
    if !report.valid() {
        return Err(Error::InvalidSymbol(format!("{:?}", report.violations)));
    }
    if s.n == 1 {
        return Ok(QuadForm::from_diagonal(&[det_of_symbol(s)]));
    }
    let (sstar, gcd) = reduce_symbol(s);
    let n = s.n;
    let det_star = det_of_symbol(&sstar);
    let plan = find_t(&sstar, rng)?;
    let t = plan.t.clone();
    let child_det_expect = t.pow(n as u32 - 2) * &det_star;

    // Working modulus: pad every prime of t^{n-1} det.
    let mut q0_fact = det_factorization(&sstar);
    for (p, e) in plan.t_factorization() {
        *q0_fact.entry(p).or_insert(0) += e * (n as u32 - 1);
    }
    let q0 = (t.pow(n as u32 - 1) * &det_star).abs();
    let (qbar, qfact) = zmod::make_qbar(&q0, &q0_fact)?;

    let mut frames = Vec::new();
    let mut components = BTreeMap::new();
    for (p, kexp) in &qfact {
        let ctx = ctx_at(p, *kexp);
        let case = plan
            .cases
            .get(p)
            .ok_or_else(|| Error::Internal(format!("no representation case at p={p}")))?;
        let blocks = local_blocks_p(&sstar, p)?;
        let rep = build_local_representation(&blocks, &t, &ctx, case)?;
        let conj = rep.s_matrix.conjugate(&rep.completion, &ctx.modulus)?;
        if conj.at(0, 0) != &rep.t_mod {
            return Err(Error::Internal("frame corner is not t".into()));
        }
        let mut d_row = Mat::zero(1, n - 1);
        for j in 1..n {
            *d_row.at_mut(0, j - 1) = conj.at(0, j).clone();
        }
        let mut h = Mat::zero(n - 1, n - 1);
        for i in 1..n {
            for j in 1..n {
                let v = (&t * conj.at(i, j) - d_row.at(0, i - 1) * d_row.at(0, j - 1))
                    .mod_floor(&ctx.modulus);
                *h.at_mut(i - 1, j - 1) = v;
            }
        }
        let h_form = QuadForm::new(h)?;
        let dh = h_form.det();
        if zmod::ord_p(&dh, p) != zmod::ord_p(&child_det_expect, p) {
            return Err(Error::Internal(format!(
                "child determinant valuation drifted at p={p}"
            )));
        }
        let ordp = zmod::ord_p(&dh, p).expect_finite() as u32;
        // Extract the child's local data at exactly the symbol precision.
        let cctx = ctx_at(p, ordp + zmod::kp_of(p));
        let (bd, _) = block_diagonalize(&h_form, &cctx);
        let cons = constituents(&bd)?;
        let keep = p == &big(2) || ordp > 0;
        if keep {
            components.insert(p.clone(), cons);
        } else {
            // The component collapses to a single unit-scale constituent
            // whose sign is forced by the child determinant; drop it.
            let expect = zmod::legendre(&zmod::ord_cop(&child_det_expect, p).cop, p);
            if !(cons.len() == 1 && cons[0].sign == expect) {
                return Err(Error::Internal(format!(
                    "trivial child component at p={p} has unexpected data"
                )));
            }
        }
        frames.push(Frame {
            p: p.clone(),
            k: *kexp,
            modulus: ctx.modulus.clone(),
            d_row,
            h: h_form,
        });
    }
    let t_sign: i64 = if t.is_negative() { -1 } else { 1 };
    let child_sig = t_sign * (sstar.sig - t_sign);
    let child = GenusSymbol { n: n - 1, sig: child_sig, components };
    if det_of_symbol(&child) != child_det_expect {
        return Err(Error::Internal("child determinant mismatch".into()));
    }
    let creport = validate_symbol(&child);
    if !creport.valid() {
        return Err(Error::ChildSymbolInvalid(format!("{:?}", creport.violations)));
    }
    if let Some(tr) = trace.as_deref_mut() {
        let mut orders = BTreeMap::new();
        for p in sstar.primes() {
            orders.insert(p.clone(), sstar.max_scale(&p));
        }
        tr.levels.push(LevelTrace {
            n,
            gcd: gcd.clone(),
            det_reduced: det_star.clone(),
            t: t.clone(),
            used_even_block: matches!(
                plan.cases.get(&big(2)),
                Some(crate::represent::LocalCase::TypeTwo { .. })
            ),
            orders,
            child_det: child_det_expect.clone(),
        });
    }

    let h_tilde = qfgen(&child, rng, trace)?;

    // Splice: per-prime congruences glued by the Chinese remainder.
    let mut u_parts: Vec<(BigInt, Mat)> = Vec::new();
    let mut d_parts: Vec<(BigInt, Mat)> = Vec::new();
    for f in &frames {
        let ctx = ctx_at(&f.p, f.k);
        let u_p = find_equivalence_mod_pk(&f.h, &h_tilde, &ctx)?;
        u_parts.push((f.modulus.clone(), u_p));
        d_parts.push((f.modulus.clone(), f.d_row.clone()));
    }
    let u_tilde = crt_matrix(&u_parts, n - 1, n - 1)?;
    let d = crt_matrix(&d_parts, 1, n - 1)?;
    let du = d.mul(&u_tilde).reduce_mod(&qbar);

    // Assemble; the division by t is exact.
    let mut bottom = Mat::zero(n - 1, n - 1);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let x = h_tilde.at(i, j) + du.at(0, i) * du.at(0, j);
            let (quot, rem) = x.div_rem(&t);
            if !rem.is_zero() {
                return Err(Error::NonIntegralAssembly);
            }
            *bottom.at_mut(i, j) = quot;
        }
    }
    let mut q_mat = Mat::zero(n, n);
    *q_mat.at_mut(0, 0) = t.clone();
    for j in 0..n - 1 {
        *q_mat.at_mut(0, j + 1) = du.at(0, j).clone();
        *q_mat.at_mut(j + 1, 0) = du.at(0, j).clone();
    }
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            *q_mat.at_mut(i + 1, j + 1) = bottom.at(i, j).clone();
        }
    }
    let q0_form = QuadForm::new(q_mat)?;
    if q0_form.det() != det_star {
        return Err(Error::Internal(format!(
            "assembled determinant {} differs from {}",
            q0_form.det(),
            det_star
        )));
    }
    if forms::signature(&q0_form)? != sstar.sig {
        return Err(Error::Internal("assembled signature drifted".into()));
    }
    Ok(q0_form.scale(&gcd))
}

fn crt_matrix(parts: &[(BigInt, Mat)], rows: usize, cols: usize) -> Result<Mat> {
    let mut out = Mat::zero(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let pairs: Vec<(BigInt, BigInt)> = parts
                .iter()
                .map(|(m, mat)| (mat.at(i, j).mod_floor(m), m.clone()))
                .collect();
            let (v, _) = zmod::crt(&pairs)?;
            *out.at_mut(i, j) = v;
        }
    }
    Ok(out)
}

/// Generate an integral quadratic form in the genus of a valid symbol.
/// Las Vegas: retried with fresh randomness up to `opts.retries` times.
pub fn generate_form(
    s: &GenusSymbol,
    rng: &mut dyn RngCore,
    opts: &GenerateOptions,
) -> Result<(QuadForm, GenerateTrace)> {
    let report = validate_symbol(s);
    if !report.valid() {
        return Err(Error::InvalidSymbol(format!("{:?}", report.violations)));
    }
    let mut last = None;
    for _ in 0..opts.retries.max(1) {
        let mut trace = GenerateTrace::default();
        let mut slot = if opts.collect_trace { Some(&mut trace) } else { None };
        match qfgen(s, rng, &mut slot) {
            Ok(q) => {
                let check = verify_membership(&q, s)?;
                if check.member {
                    return Ok((q, trace));
                }
                // The output realizes the genus but in a 2-adic
                // presentation the congruence search cannot certify;
                // fresh randomness changes the presentation.
                let got = two_symbol(&q).map(|c| format!("{c:?}")).unwrap_or_default();
                last = Some(Error::EquivalenceNotFound(format!(
                    "generated form could not be certified: {:?}; produced 2-adic data {got}",
                    check.reasons
                )));
                continue;
            }
            Err(e @ (Error::SearchExhausted(_) | Error::EquivalenceNotFound(_))) => {
                last = Some(e);
                continue;
            }
            Err(e) => return Err(e),
        }
    }
    match last {
        Some(Error::EquivalenceNotFound(msg)) => Err(Error::EquivalenceNotFound(msg)),
        _ => Err(Error::GenerationFailed(opts.retries)),
    }
}

/// Membership report: determinant, signature and every local symbol.
#[derive(Debug, Clone)]
pub struct MembershipReport {
    pub member: bool,
    pub used_equivalence_fallback: bool,
    pub reasons: Vec<String>,
}

/// Does `q` belong to the genus described by `s`? Exact determinant and
/// signature, equality of every odd local symbol, and equality of the
/// normalized 2-adic symbol with a congruence-search fallback.
pub fn verify_membership(q: &QuadForm, s: &GenusSymbol) -> Result<MembershipReport> {
    let mut reasons = Vec::new();
    let mut fallback = false;
    if q.n() != s.n {
        return Ok(MembershipReport {
            member: false,
            used_equivalence_fallback: false,
            reasons: vec!["dimension mismatch".into()],
        });
    }
    let det = q.det();
    if det != det_of_symbol(s) {
        reasons.push(format!("determinant {} differs from {}", det, det_of_symbol(s)));
    }
    if det.is_zero() {
        return Ok(MembershipReport { member: false, used_equivalence_fallback: false, reasons });
    }
    if forms::signature(q)? != s.sig {
        reasons.push("signature differs".into());
    }
    for p in s.primes() {
        let comp = s.component(&p).unwrap();
        if p == big(2) {
            let got = two_symbol(q)?;
            if got != comp {
                // Two-adic symbols of equivalent forms may normalize
                // differently; decide by an explicit congruence search.
                let lf = local_form_p(s, &p)?;
                let ord = zmod::ord_p(&det, &p).expect_finite() as u32;
                let ctx = ctx_at(&p, ord + 3);
                match find_equivalence_mod_pk(q, &lf, &ctx) {
                    Ok(_) => fallback = true,
                    Err(_) => reasons.push("2-adic symbol differs".into()),
                }
            }
        } else if p_symbol(q, &p)? != comp {
            reasons.push(format!("local symbol at {p} differs"));
        }
    }
    Ok(MembershipReport {
        member: reasons.is_empty(),
        used_equivalence_fallback: fallback,
        reasons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::genus_symbol;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn rng() -> ChaCha20Rng {
        ChaCha20Rng::seed_from_u64(5)
    }

    fn diag(d: &[i64]) -> QuadForm {
        QuadForm::from_diagonal(&d.iter().map(|&v| big(v)).collect::<Vec<_>>())
    }

    #[test]
    fn equivalence_identity_and_rescale() {
        let ctx = ctx_at(&big(3), 2);
        let a = QuadForm::identity(2);
        let u = find_equivalence_mod_pk(&a, &a, &ctx).unwrap();
        let got = a.conjugate(&u, &ctx.modulus).unwrap();
        assert_eq!(got, a.reduce_mod(&ctx.modulus));

        let b = diag(&[2, 2]);
        let u = find_equivalence_mod_pk(&a, &b, &ctx).unwrap();
        assert_eq!(a.conjugate(&u, &ctx.modulus).unwrap(), b.reduce_mod(&ctx.modulus));
    }

    #[test]
    fn equivalence_table_pair() {
        // Two rows of the same invariant class at p = 2.
        let ctx = ctx_at(&big(2), 4);
        let a = diag(&[1, 7]);
        let b = diag(&[3, 5]);
        let u = find_equivalence_mod_pk(&a, &b, &ctx).unwrap();
        assert_eq!(a.conjugate(&u, &ctx.modulus).unwrap(), b.reduce_mod(&ctx.modulus));
    }

    #[test]
    fn equivalence_even_blocks() {
        let ctx = ctx_at(&big(2), 5);
        let a = QuadForm::direct_sum(&[t_minus(), t_minus()]);
        let b = QuadForm::direct_sum(&[t_plus(), t_plus()]);
        let u = find_equivalence_mod_pk(&a, &b, &ctx).unwrap();
        assert_eq!(a.conjugate(&u, &ctx.modulus).unwrap(), b.reduce_mod(&ctx.modulus));
    }

    #[test]
    fn equivalence_cross_scale_walk() {
        // diag(1,2) and diag(3,6) have different normalized symbols but
        // are congruent modulo every power of 2.
        let ctx = ctx_at(&big(2), 6);
        let a = diag(&[1, 2]);
        let b = diag(&[3, 6]);
        let u = find_equivalence_mod_pk(&a, &b, &ctx).unwrap();
        assert_eq!(a.conjugate(&u, &ctx.modulus).unwrap(), b.reduce_mod(&ctx.modulus));
    }

    #[test]
    fn equivalence_random_conjugates() {
        let mut rng = ChaCha20Rng::seed_from_u64(17);
        let mut done = 0;
        while done < 60 {
            let n = rng.gen_range(1..=4usize);
            let p = big([2i64, 3, 5][rng.gen_range(0..3)]);
            let k = rng.gen_range(3..=5u32);
            let ctx = ctx_at(&p, k);
            let mut m = Mat::zero(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = big(rng.gen_range(-10..=10));
                    *m.at_mut(i, j) = v.clone();
                    *m.at_mut(j, i) = v;
                }
            }
            let a = QuadForm::new(m).unwrap();
            if a.det().is_zero() {
                continue;
            }
            // Only forms whose scales stay well below the precision.
            match zmod::ord_p(&a.det(), &p) {
                zmod::Valuation::Finite(o) if o + zmod::kp_of(&p) as u64 <= k as u64 => {}
                _ => continue,
            }
            done += 1;
            let mut u = Mat::identity(n);
            for _ in 0..6 {
                let i = rng.gen_range(0..n);
                let j = rng.gen_range(0..n);
                if i == j {
                    continue;
                }
                let f = big(rng.gen_range(-3..=3));
                for r in 0..n {
                    let add = u.at(r, i) * &f;
                    *u.at_mut(r, j) += add;
                }
            }
            let b = a.conjugate(&u, &ctx.modulus).unwrap();
            let w = find_equivalence_mod_pk(&a, &b, &ctx).unwrap();
            assert_eq!(a.conjugate(&w, &ctx.modulus).unwrap(), b.reduce_mod(&ctx.modulus));
        }
    }

    #[test]
    fn generate_identity_symbols() {
        let mut r = rng();
        for n in 1..=5usize {
            let s = genus_symbol(&QuadForm::identity(n)).unwrap();
            let (q, _) = generate_form(&s, &mut r, &GenerateOptions::default()).unwrap();
            let check = verify_membership(&q, &s).unwrap();
            assert!(check.member, "n={n}: {:?}", check.reasons);
        }
    }

    #[test]
    fn generate_small_diagonals() {
        let mut r = rng();
        for d in [
            vec![1, 3],
            vec![2, 3],
            vec![1, 2],
            vec![-1, -1],
            vec![3, 3],
            vec![1, 1, 3],
            vec![2, 5, 7],
            vec![1, -2, 5],
        ] {
            let s = genus_symbol(&diag(&d)).unwrap();
            let (q, _) = generate_form(&s, &mut r, &GenerateOptions::default()).unwrap();
            let check = verify_membership(&q, &s).unwrap();
            assert!(check.member, "{d:?}: {:?}", check.reasons);
        }
    }

    #[test]
    fn generate_even_block_symbols() {
        let mut r = rng();
        for q in [
            t_plus(),
            t_minus(),
            QuadForm::direct_sum(&[t_plus(), diag(&[3])]),
            t_plus().scale(&big(-1)),
        ] {
            let s = genus_symbol(&q).unwrap();
            let (out, _) = generate_form(&s, &mut r, &GenerateOptions::default()).unwrap();
            let check = verify_membership(&out, &s).unwrap();
            assert!(check.member, "{q:?}: {:?}", check.reasons);
        }
    }

    #[test]
    fn membership_negative_cases() {
        let s = genus_symbol(&QuadForm::identity(2)).unwrap();
        let r = verify_membership(&diag(&[1, 3]), &s).unwrap();
        assert!(!r.member);
        // Same 2-adic class but a different determinant is not the same
        // genus.
        let s = genus_symbol(&diag(&[1, 7])).unwrap();
        let r = verify_membership(&diag(&[3, 5]), &s).unwrap();
        assert!(!r.member);
    }

    #[test]
    fn membership_uses_equivalence_fallback() {
        // [[13,1],[1,1]] and diag(1,12) share determinant, signature and
        // genus, but their normalized 2-adic symbols differ.
        let mut m = Mat::zero(2, 2);
        *m.at_mut(0, 0) = big(13);
        *m.at_mut(0, 1) = big(1);
        *m.at_mut(1, 0) = big(1);
        *m.at_mut(1, 1) = big(1);
        let q = QuadForm::new(m).unwrap();
        let s = genus_symbol(&diag(&[1, 12])).unwrap();
        assert_ne!(two_symbol(&q).unwrap(), *s.component(&big(2)).unwrap());
        let r = verify_membership(&q, &s).unwrap();
        assert!(r.member, "{:?}", r.reasons);
        assert!(r.used_equivalence_fallback);
    }

    #[test]
    fn generate_random_roundtrip_small() {
        let mut r = ChaCha20Rng::seed_from_u64(41);
        let mut done = 0;
        while done < 25 {
            let n = r.gen_range(1..=4usize);
            let mut m = Mat::zero(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v = big(r.gen_range(-7..=7));
                    *m.at_mut(i, j) = v.clone();
                    *m.at_mut(j, i) = v;
                }
            }
            let q = QuadForm::new(m).unwrap();
            if q.det().is_zero() || q.det().abs() > big(100_000) {
                continue;
            }
            let Ok(s) = genus_symbol(&q) else { continue };
            done += 1;
            let (out, trace) = generate_form(
                &s,
                &mut r,
                &GenerateOptions { retries: 8, collect_trace: true },
            )
            .unwrap();
            let check = verify_membership(&out, &s).unwrap();
            assert!(check.member, "{q:?}: {:?}", check.reasons);
            // Determinant ledger along the trace.
            for level in &trace.levels {
                assert_eq!(
                    level.child_det,
                    level.t.pow(level.n as u32 - 2) * &level.det_reduced
                );
            }
        }
    }
}
