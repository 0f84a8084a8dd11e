//! Block diagonalization of a quadratic form over Z/p^k and extraction of
//! Jordan constituents (scale, dimension, sign, and type/oddity at p = 2).
//!
//! For odd p the result is diagonal. For p = 2 it is a direct sum of
//! 1 x 1 blocks `2^i * u` (u odd) and 2 x 2 blocks
//! `[[2^{l+1} a, 2^l b], [2^l b, 2^{l+1} c]]` with `b` odd. A final pass
//! keeps every scale homogeneous: a scale that contains both an odd
//! diagonal entry and a 2 x 2 block is rewritten as purely diagonal, so
//! the per-scale type is well defined.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::forms::{Mat, QuadForm, Transform};
use crate::zmod::{self, big, LocalContext, Valuation};

/// One block of the decomposition. `unit` and `a, b, c` are residues of
/// the unimodular part, i.e. the block value is `p^scale * unit` resp.
/// `2^scale * [[2a, b], [b, 2c]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Block {
    TypeI { scale: u32, unit: BigInt },
    TypeII { scale: u32, a: BigInt, b: BigInt, c: BigInt },
}

impl Block {
    pub fn dim(&self) -> usize {
        match self {
            Block::TypeI { .. } => 1,
            Block::TypeII { .. } => 2,
        }
    }

    pub fn scale(&self) -> u32 {
        match self {
            Block::TypeI { scale, .. } => *scale,
            Block::TypeII { scale, .. } => *scale,
        }
    }

    /// The block as an integer matrix (value, not unit part).
    pub fn matrix(&self, p: &BigInt) -> QuadForm {
        match self {
            Block::TypeI { scale, unit } => {
                QuadForm::from_diagonal(&[p.pow(*scale) * unit])
            }
            Block::TypeII { scale, a, b, c } => {
                let s = big(2).pow(*scale);
                let mut m = Mat::zero(2, 2);
                *m.at_mut(0, 0) = &s * big(2) * a;
                *m.at_mut(0, 1) = &s * b;
                *m.at_mut(1, 0) = &s * b;
                *m.at_mut(1, 1) = &s * big(2) * c;
                QuadForm::new(m).unwrap()
            }
        }
    }

    /// Determinant of the unimodular part (a unit mod p).
    pub fn unit_det(&self) -> BigInt {
        match self {
            Block::TypeI { unit, .. } => unit.clone(),
            Block::TypeII { a, b, c, .. } => big(4) * a * c - b * b,
        }
    }
}

/// Output of [`block_diagonalize`]: blocks in ascending scale order plus an
/// instrumentation counter of ring multiplications.
#[derive(Debug, Clone)]
pub struct BlockDiagForm {
    pub p: BigInt,
    pub k: u32,
    pub blocks: Vec<Block>,
    pub ring_ops: u64,
}

impl BlockDiagForm {
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim()).sum()
    }

    pub fn matrix(&self) -> QuadForm {
        let parts: Vec<QuadForm> = self.blocks.iter().map(|b| b.matrix(&self.p)).collect();
        QuadForm::direct_sum(&parts).reduce_mod(&self.p.pow(self.k))
    }

    /// Diagonal entry values (errors if a 2 x 2 block is present).
    pub fn diagonal_values(&self) -> Result<Vec<BigInt>> {
        self.blocks
            .iter()
            .map(|b| match b {
                Block::TypeI { scale, unit } => Ok(self.p.pow(*scale) * unit),
                Block::TypeII { .. } => {
                    Err(Error::Internal("expected a diagonal local form".into()))
                }
            })
            .collect()
    }
}

struct Sweep {
    p: BigInt,
    k: u32,
    modulus: BigInt,
    m: Mat,
    u: Mat,
    ops: u64,
}

impl Sweep {
    fn ord(&self, v: &BigInt) -> u64 {
        match zmod::ord_p(v, &self.p) {
            Valuation::Finite(o) => o.min(self.k as u64),
            Valuation::Infinite => self.k as u64,
        }
    }

    /// Column rotation i <- j, j <- -i (and matching rows), determinant 1.
    fn rot_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        let n = self.m.rows;
        for r in 0..n {
            let a = self.m.at(r, i).clone();
            let b = self.m.at(r, j).clone();
            *self.m.at_mut(r, i) = b;
            *self.m.at_mut(r, j) = (-a).mod_floor(&self.modulus);
        }
        for c in 0..n {
            let a = self.m.at(i, c).clone();
            let b = self.m.at(j, c).clone();
            *self.m.at_mut(i, c) = b;
            *self.m.at_mut(j, c) = (-a).mod_floor(&self.modulus);
        }
        for r in 0..n {
            let a = self.u.at(r, i).clone();
            let b = self.u.at(r, j).clone();
            *self.u.at_mut(r, i) = b;
            *self.u.at_mut(r, j) = (-a).mod_floor(&self.modulus);
        }
    }

    /// col_j += f * col_i symmetrically.
    fn shear(&mut self, i: usize, j: usize, f: &BigInt) {
        if f.is_zero() {
            return;
        }
        let n = self.m.rows;
        for r in 0..n {
            let add = f * self.m.at(r, i);
            let v = (self.m.at(r, j) + add).mod_floor(&self.modulus);
            *self.m.at_mut(r, j) = v;
            self.ops += 1;
        }
        let row: Vec<BigInt> = (0..n).map(|c| self.m.at(i, c).clone()).collect();
        for c in 0..n {
            let add = f * &row[c];
            let v = (self.m.at(j, c) + add).mod_floor(&self.modulus);
            *self.m.at_mut(j, c) = v;
            self.ops += 1;
        }
        for r in 0..n {
            let add = f * self.u.at(r, i);
            let v = (self.u.at(r, j) + add).mod_floor(&self.modulus);
            *self.u.at_mut(r, j) = v;
            self.ops += 1;
        }
    }

    /// Minimum-order entry of the trailing block starting at `s`:
    /// diagonal entries win ties, then lexicographic (i, j).
    fn find_pivot(&mut self, s: usize) -> (u64, usize, usize) {
        let n = self.m.rows;
        let mut best = (self.k as u64, s, s);
        for d in s..n {
            let o = self.ord(self.m.at(d, d));
            self.ops += self.k.ilog2().max(1) as u64;
            if o < best.0 {
                best = (o, d, d);
            }
        }
        for i in s..n {
            for j in i + 1..n {
                let o = self.ord(self.m.at(i, j));
                self.ops += self.k.ilog2().max(1) as u64;
                if o < best.0 {
                    best = (o, i, j);
                }
            }
        }
        best
    }

    /// Clear row/column `s` against the diagonal pivot at (s, s).
    fn clear_against_diagonal(&mut self, s: usize) {
        let n = self.m.rows;
        let piv = self.m.at(s, s).clone();
        let oc = zmod::ord_cop(&piv, &self.p);
        let o = oc.ord.expect_finite() as u32;
        let inv = zmod::mod_inv(&oc.cop, &self.modulus).expect("unit part invertible");
        for j in s + 1..n {
            let v = self.m.at(s, j).clone();
            if v.is_zero() {
                continue;
            }
            let quotient = &v / self.p.pow(o);
            let f = (-quotient * &inv).mod_floor(&self.modulus);
            self.shear(s, j, &f);
        }
    }

    /// Clear rows/columns s, s+1 against a 2 x 2 block with odd reduced
    /// determinant (p = 2 only), via Cramer's rule.
    fn clear_against_block(&mut self, s: usize, scale: u32) {
        let n = self.m.rows;
        let pl = big(2).pow(scale);
        let sub_mod = &self.modulus / &pl;
        let b11 = self.m.at(s, s) / &pl;
        let b12 = self.m.at(s, s + 1) / &pl;
        let b22 = self.m.at(s + 1, s + 1) / &pl;
        let det = (&b11 * &b22 - &b12 * &b12).mod_floor(&sub_mod);
        let dinv = zmod::mod_inv(&det, &sub_mod).expect("block determinant is odd");
        for j in s + 2..n {
            let r1 = self.m.at(s, j) / &pl;
            let r2 = self.m.at(s + 1, j) / &pl;
            if r1.is_zero() && r2.is_zero() {
                continue;
            }
            let alpha = ((&b22 * &r1 - &b12 * &r2) * &dinv).mod_floor(&sub_mod);
            let beta = ((&b11 * &r2 - &b12 * &r1) * &dinv).mod_floor(&sub_mod);
            self.ops += 6;
            self.shear(s, j, &(-alpha).mod_floor(&self.modulus));
            self.shear(s + 1, j, &(-beta).mod_floor(&self.modulus));
        }
    }

    fn run(&mut self, start: usize) -> Vec<Block> {
        let n = self.m.rows;
        let mut blocks = Vec::new();
        let mut s = start;
        while s < n {
            let (o, i, j) = self.find_pivot(s);
            if o >= self.k as u64 {
                // Remaining block vanishes mod p^k: sentinel scale-k blocks.
                for _ in s..n {
                    blocks.push(Block::TypeI { scale: self.k, unit: BigInt::one() });
                }
                break;
            }
            if i == j {
                self.rot_swap(s, i);
                self.clear_against_diagonal(s);
                let oc = zmod::ord_cop(self.m.at(s, s), &self.p);
                let scale = oc.ord.expect_finite() as u32;
                let unit = oc.cop.mod_floor(&(&self.modulus / self.p.pow(scale)));
                blocks.push(Block::TypeI { scale, unit });
                s += 1;
                continue;
            }
            // Off-diagonal minimum.
            if self.p != big(2) {
                // Mixing column j into i gives a diagonal entry of the
                // minimal order (2 Q_ij + even higher-order terms).
                self.shear(j, i, &BigInt::one());
                continue;
            }
            // p = 2: keep the 2 x 2 block. j > i >= s, so the rotations
            // below do not disturb each other.
            self.rot_swap(s, i);
            self.rot_swap(s + 1, j);
            let scale = o as u32;
            self.clear_against_block(s, scale);
            let pl = big(2).pow(scale);
            let sub_mod = &self.modulus / &pl;
            let half_mod = (&sub_mod / big(2)).max(BigInt::one());
            let a = (self.m.at(s, s) / (&pl * big(2))).mod_floor(&half_mod);
            let b = (self.m.at(s, s + 1) / &pl).mod_floor(&sub_mod);
            let c = (self.m.at(s + 1, s + 1) / (&pl * big(2))).mod_floor(&half_mod);
            blocks.push(Block::TypeII { scale, a, b, c });
            s += 2;
        }
        blocks
    }
}

/// Decompose `q` modulo p^k as `U' q U = direct sum of scaled unimodular
/// blocks`, U in SL_n(Z/p^k). Blocks come out in ascending scale order and
/// every scale is purely diagonal or purely 2 x 2 blocks.
pub fn block_diagonalize(q: &QuadForm, ctx: &LocalContext) -> (BlockDiagForm, Transform) {
    let n = q.n();
    let mut sweep = Sweep {
        p: ctx.p.clone(),
        k: ctx.k,
        modulus: ctx.modulus.clone(),
        m: q.mat().reduce_mod(&ctx.modulus),
        u: Mat::identity(n),
        ops: 0,
    };
    let mut blocks = sweep.run(0);
    if ctx.is_two() {
        merge_mixed_scales(&mut sweep, &mut blocks);
    }
    blocks.sort_by_key(|b| b.scale());
    let form = BlockDiagForm { p: ctx.p.clone(), k: ctx.k, blocks, ring_ops: sweep.ops };
    debug_assert_eq!(form.matrix().mat(), &sweep.m, "blocks must reassemble the work matrix");
    let u = Transform::new(sweep.u, ctx.modulus.clone());
    debug_assert_eq!(
        q.conjugate(&u.mat, &ctx.modulus).unwrap().mat(),
        &sweep.m,
        "decomposition must match the transformed matrix"
    );
    (form, u)
}

/// Rewrite scales containing both an odd diagonal entry and 2 x 2 blocks
/// into purely diagonal form. An odd entry mixed into a 2 x 2 block makes
/// one of its diagonal entries odd, after which the plain sweep
/// diagonalizes the whole scale.
fn merge_mixed_scales(sweep: &mut Sweep, blocks: &mut Vec<Block>) {
    let mut budget = 4 * sweep.m.rows + 8;
    loop {
        budget -= 1;
        assert!(budget > 0, "mixed-scale merge did not converge");
        // Locate a scale with both kinds.
        let mut offset = 0usize;
        let mut found: Option<(u32, usize, usize)> = None; // scale, typeI pos, typeII pos
        let mut pos_of_scale: Vec<(u32, usize, usize, bool)> = Vec::new(); // scale, offset, idx, is_ii
        for (idx, b) in blocks.iter().enumerate() {
            pos_of_scale.push((b.scale(), offset, idx, matches!(b, Block::TypeII { .. })));
            offset += b.dim();
        }
        'outer: for (scale, off_i, _, is_ii_i) in &pos_of_scale {
            if *is_ii_i {
                continue;
            }
            for (scale2, off_j, _, is_ii_j) in &pos_of_scale {
                if scale2 == scale && *is_ii_j {
                    found = Some((*scale, *off_i, *off_j));
                    break 'outer;
                }
            }
        }
        let Some((_, type_i_off, type_ii_off)) = found else {
            return;
        };
        // Mix the block's first coordinate into the odd entry: the odd
        // diagonal keeps its order and picks up a coupling to the block,
        // and clearing against it leaves a remainder with an odd diagonal.
        // Re-run the sweep on the trailing segment.
        let start = type_i_off.min(type_ii_off);
        sweep.shear(type_ii_off, type_i_off, &BigInt::one());
        let tail = sweep.run(start);
        blocks.truncate(
            pos_of_scale
                .iter()
                .position(|&(_, off, _, _)| off == start)
                .expect("offset exists"),
        );
        blocks.extend(tail);
        blocks.sort_by_key(|b| b.scale());
    }
}

/// Scale/dimension/sign data of one Jordan constituent; `two` carries the
/// type and oddity at p = 2.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct JordanConstituent {
    pub scale: u32,
    pub dim: usize,
    pub sign: i8,
    pub two: Option<TwoData>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct TwoData {
    pub type_ii: bool,
    pub oddity: u8,
}

/// Group blocks by scale into constituents. Requires every present scale
/// to sit strictly below the precision (scale + k_p <= k), otherwise the
/// symbol would be ambiguous.
pub fn constituents(form: &BlockDiagForm) -> Result<Vec<JordanConstituent>> {
    let two = form.p == big(2);
    let eight = big(8);
    let mut out: Vec<JordanConstituent> = Vec::new();
    let mut i = 0;
    while i < form.blocks.len() {
        let scale = form.blocks[i].scale();
        let pad = if two { 3 } else { 1 };
        if scale + pad > form.k {
            return Err(Error::ScaleOverflow);
        }
        let mut dim = 0usize;
        let mut det = BigInt::one();
        let mut any_type_i = false;
        let mut any_type_ii = false;
        let mut trace = BigInt::zero();
        while i < form.blocks.len() && form.blocks[i].scale() == scale {
            let b = &form.blocks[i];
            dim += b.dim();
            det *= b.unit_det();
            match b {
                Block::TypeI { unit, .. } => {
                    any_type_i = true;
                    trace += unit;
                }
                Block::TypeII { .. } => any_type_ii = true,
            }
            i += 1;
        }
        let sign = zmod::legendre(&det, &form.p);
        let two_data = if two {
            debug_assert!(!(any_type_i && any_type_ii), "scales must be homogeneous");
            let oddity = if any_type_i {
                trace.mod_floor(&eight).to_u8().unwrap()
            } else {
                0
            };
            Some(TwoData { type_ii: !any_type_i, oddity })
        } else {
            None
        };
        out.push(JordanConstituent { scale, dim, sign, two: two_data });
    }
    Ok(out)
}
