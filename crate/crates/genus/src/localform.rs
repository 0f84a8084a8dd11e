//! Construct a quadratic form realizing a symbol locally at one prime,
//! and glue the per-prime forms into a single form congruent to the
//! symbol modulo a composite q.
//!
//! At an odd prime each constituent becomes I^(n_i) or I^(n_i - 1) ⊕ τ
//! with τ the least nonresidue. At 2, even-type constituents are chains
//! of the standard 2 x 2 blocks and odd-type constituents come from the
//! exhaustive dimension-2 and dimension-3 tables, padded by ones with a
//! shifted oddity.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::forms::QuadForm;
use crate::jordan::{Block, JordanConstituent};
use crate::symbol::{det_of_symbol, GenusSymbol};
use crate::zmod::{self, big, crt, Factorization};

/// The two standard even 2 x 2 blocks.
pub fn t_plus() -> QuadForm {
    let mut q = QuadForm::from_diagonal(&[big(2), big(4)]);
    q.set(0, 1, big(1));
    q
}

pub fn t_minus() -> QuadForm {
    let mut q = QuadForm::from_diagonal(&[big(2), big(2)]);
    q.set(0, 1, big(1));
    q
}

/// Exhaustive list of odd unimodular 2-dimensional forms by
/// (sign, oddity); the combinations (+, 4) and (-, 0) do not occur.
pub fn table_dim2(sign: i8, oddity: u8) -> Option<[i64; 2]> {
    match (sign, oddity) {
        (1, 0) => Some([1, 7]),
        (1, 2) => Some([1, 1]),
        (1, 6) => Some([3, 3]),
        (-1, 2) => Some([3, 7]),
        (-1, 4) => Some([1, 3]),
        (-1, 6) => Some([1, 5]),
        _ => None,
    }
}

/// Odd unimodular 3-dimensional forms: all eight (sign, odd oddity)
/// combinations occur.
pub fn table_dim3(sign: i8, oddity: u8) -> Option<[i64; 3]> {
    match (sign, oddity) {
        (1, 1) => Some([1, 1, 7]),
        (1, 3) => Some([1, 1, 1]),
        (1, 5) => Some([7, 7, 7]),
        (1, 7) => Some([1, 7, 7]),
        (-1, 1) => Some([3, 3, 3]),
        (-1, 3) => Some([3, 3, 5]),
        (-1, 5) => Some([1, 1, 3]),
        (-1, 7) => Some([1, 1, 5]),
        _ => None,
    }
}

/// Unimodular diagonal entries for an odd-type 2-adic constituent of any
/// dimension >= 1.
pub fn odd_type_entries_for(dim: usize, sign: i8, oddity: u8) -> Result<Vec<i64>> {
    odd_type_entries(dim, sign, oddity)
}

fn odd_type_entries(dim: usize, sign: i8, oddity: u8) -> Result<Vec<i64>> {
    let bad = || {
        Error::InvalidSymbol(format!(
            "no odd-type block of dimension {dim} with sign {sign} and oddity {oddity}"
        ))
    };
    match dim {
        0 => Err(bad()),
        1 => {
            let expected_sign = if oddity == 1 || oddity == 7 { 1 } else { -1 };
            if oddity % 2 == 1 && sign == expected_sign {
                Ok(vec![oddity as i64])
            } else {
                Err(bad())
            }
        }
        2 => table_dim2(sign, oddity).map(|e| e.to_vec()).ok_or_else(bad),
        3 => table_dim3(sign, oddity).map(|e| e.to_vec()).ok_or_else(bad),
        _ => {
            let shifted = (oddity as i64 - (dim as i64 - 3)).rem_euclid(8) as u8;
            let tail = table_dim3(sign, shifted).ok_or_else(bad)?;
            let mut out = vec![1i64; dim - 3];
            out.extend_from_slice(&tail);
            Ok(out)
        }
    }
}

fn local_blocks_at_two(comp: &[JordanConstituent]) -> Result<Vec<Block>> {
    let mut parts = Vec::new();
    for c in comp {
        let t = c
            .two
            .ok_or_else(|| Error::InvalidSymbol("missing 2-adic data".into()))?;
        if t.type_ii {
            if c.dim == 0 || c.dim % 2 != 0 {
                return Err(Error::InvalidSymbol(format!(
                    "even-type block of odd dimension {}",
                    c.dim
                )));
            }
            let pairs = c.dim / 2;
            for j in 0..pairs {
                let minus = c.sign == -1 && j == pairs - 1;
                parts.push(Block::TypeII {
                    scale: c.scale,
                    a: big(1),
                    b: big(1),
                    c: if minus { big(1) } else { big(2) },
                });
            }
        } else {
            for u in odd_type_entries(c.dim, c.sign, t.oddity)? {
                parts.push(Block::TypeI { scale: c.scale, unit: big(u) });
            }
        }
    }
    Ok(parts)
}

fn local_blocks_at_odd(comp: &[JordanConstituent], p: &BigInt) -> Result<Vec<Block>> {
    // The deterministic scan makes the local form reproducible.
    let mut throwaway = rand::rngs::mock::StepRng::new(0, 1);
    let tau = zmod::find_nonresidue(p, &mut throwaway)?;
    let mut parts = Vec::new();
    for c in comp {
        for j in 0..c.dim {
            let unit = if c.sign == -1 && j == c.dim - 1 { tau.clone() } else { big(1) };
            parts.push(Block::TypeI { scale: c.scale, unit });
        }
    }
    Ok(parts)
}

/// Block list of the local form at `p`: each block is a scaled unit entry
/// or a scaled standard 2 x 2 block, scales ascending. For odd p outside
/// the determinant this is det(s) ⊕ I^(n-1).
pub fn local_blocks_p(s: &GenusSymbol, p: &BigInt) -> Result<Vec<Block>> {
    if p == &big(2) {
        let comp = s
            .component(p)
            .ok_or_else(|| Error::InvalidSymbol("symbol must store p=2".into()))?;
        local_blocks_at_two(comp)
    } else {
        match s.component(p) {
            Some(comp) => local_blocks_at_odd(comp, p),
            None => {
                let mut blocks = vec![Block::TypeI { scale: 0, unit: det_of_symbol(s) }];
                blocks.extend(
                    std::iter::repeat(Block::TypeI { scale: 0, unit: big(1) }).take(s.n - 1),
                );
                Ok(blocks)
            }
        }
    }
}

/// A block-diagonal form whose p-symbol equals the p-component of `s`.
/// For odd p outside the determinant this is det(s) ⊕ I^(n-1).
pub fn local_form_p(s: &GenusSymbol, p: &BigInt) -> Result<QuadForm> {
    let blocks = local_blocks_p(s, p)?;
    let parts: Vec<QuadForm> = blocks.iter().map(|b| b.matrix(p)).collect();
    Ok(QuadForm::direct_sum(&parts))
}

/// Entrywise Chinese remainder of the local forms over the primes of `q`:
/// the result is congruent to each local form mod p^(ord_p q).
pub fn local_form_q(s: &GenusSymbol, q: &BigInt, fact: &Factorization) -> Result<QuadForm> {
    let mut prod = BigInt::one();
    for (p, e) in fact {
        prod *= p.pow(*e);
    }
    if &prod != q {
        return Err(Error::BadFactorization);
    }
    let locals: Vec<(BigInt, QuadForm)> = fact
        .iter()
        .map(|(p, e)| {
            let lf = local_form_p(s, p)?;
            Ok((p.pow(*e), lf))
        })
        .collect::<Result<_>>()?;
    let n = s.n;
    let mut out = QuadForm::identity(n).scale(&BigInt::from(0));
    for i in 0..n {
        for j in i..n {
            let pairs: Vec<(BigInt, BigInt)> = locals
                .iter()
                .map(|(m, lf)| (lf.at(i, j).mod_floor(m), m.clone()))
                .collect();
            let (v, _) = crt(&pairs)?;
            out.set(i, j, v);
        }
    }
    Ok(out)
}
