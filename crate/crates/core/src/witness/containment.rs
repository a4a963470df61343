//! Does a linear code contain a matrix of a profile with pairwise-distinct columns?
//!
//! Matrices with columns in `C` are parametrized by `b` messages
//! `m_0..m_{b-1}` for the generator `G`; column `r` is `m_r G`. The unknown
//! vector has length `k b` with entry `r k + t` holding `m_r[t]`, the same
//! layout as polynomial coefficient space for Reed-Solomon codes.

use alloc::vec;
use alloc::vec::Vec;

use crate::code::Code;
use crate::error::{Error, Result};
use crate::field::Elem;
use crate::matrix::Matrix;
use crate::profile::Profile;
use crate::subspace::Subspace;

/// Message vectors whose matrix has every row `i` in `V_i`, as a subspace of
/// `F_q^{kb}` where `k` is the number of generator rows.
pub fn profile_solution_space(code: &Code, profile: &Profile) -> Result<Subspace> {
    check(code, profile)?;
    let g = code.generator();
    let k = g.rows();
    let b = profile.b();
    let field = code.field();
    let mut rows: Vec<Vec<Elem>> = Vec::new();
    for i in 0..code.n() {
        let ann = profile.space(i).annihilator();
        for h in 0..ann.rows() {
            let mut row = vec![0; k * b];
            for r in 0..b {
                let hr = ann.get(h, r);
                if hr == 0 {
                    continue;
                }
                for t in 0..k {
                    row[r * k + t] = field.mul(hr, g.get(t, i));
                }
            }
            rows.push(row);
        }
    }
    Ok(Subspace::from_constraints(&Matrix::from_rows(field, k * b, &rows)?))
}

fn check(code: &Code, profile: &Profile) -> Result<()> {
    if code.n() != profile.n() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "code of length {} against a profile of length {}",
            code.n(),
            profile.n()
        )));
    }
    if code.field() != profile.field() {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

/// The `n x b` matrix with columns `m_r G` for a message vector.
pub fn matrix_of(code: &Code, b: usize, msg: &[Elem]) -> Matrix {
    let g = code.generator();
    let k = g.rows();
    let mut a = Matrix::zeros(code.field(), code.n(), b);
    for r in 0..b {
        let col = g.left_mul_vec(&msg[r * k..(r + 1) * k]);
        for (i, x) in col.into_iter().enumerate() {
            a.set(i, r, x);
        }
    }
    a
}

fn columns_differ(code: &Code, msg: &[Elem], r: usize, s: usize) -> bool {
    let g = code.generator();
    let k = g.rows();
    let field = code.field();
    let diff: Vec<Elem> = (0..k).map(|t| field.sub(msg[r * k + t], msg[s * k + t])).collect();
    g.left_mul_vec(&diff).iter().any(|&x| x != 0)
}

fn all_columns_differ(code: &Code, b: usize, msg: &[Elem]) -> bool {
    (0..b).all(|r| (r + 1..b).all(|s| columns_differ(code, msg, r, s)))
}

/// A matrix of the profile with columns in the code and pairwise distinct, if any.
///
/// Each pair `(r, s)` cuts out a subspace `E_rs` of solutions with equal
/// columns. When `q > C(b, 2)` a solution outside every `E_rs` exists as soon
/// as no single `E_rs` contains the whole solution space: extend a point along
/// a direction leaving the next `E_rs`; each earlier `E_rs` rules out at most
/// one scalar, so a nonzero scalar remains. Smaller fields enumerate.
pub fn code_contains_profile(code: &Code, profile: &Profile, cap: u128) -> Result<Option<Matrix>> {
    let s = profile_solution_space(code, profile)?;
    let b = profile.b();
    let field = code.field();
    let pairs: Vec<(usize, usize)> = (0..b).flat_map(|r| (r + 1..b).map(move |t| (r, t))).collect();
    if pairs.is_empty() {
        return Ok(Some(Matrix::zeros(field, code.n(), b)));
    }
    let basis = s.basis().row_vecs();
    if (field.order() as usize) > pairs.len() {
        let mut x: Vec<Elem> = vec![0; s.ambient()];
        for (j, &(r, t)) in pairs.iter().enumerate() {
            if columns_differ(code, &x, r, t) {
                continue;
            }
            let Some(y) = basis.iter().find(|y| columns_differ(code, y, r, t)) else {
                return Ok(None);
            };
            let ok = (1..field.order()).find_map(|lambda| {
                let cand: Vec<Elem> = x.iter().zip(y).map(|(&a, &c)| field.add(a, field.mul(lambda, c))).collect();
                pairs[..=j].iter().all(|&(u, v)| columns_differ(code, &cand, u, v)).then_some(cand)
            });
            match ok {
                Some(c) => x = c,
                None => {
                    return Err(Error::InvariantViolation(alloc::format!(
                        "no scalar avoids {} pair subspaces over F_{}",
                        j + 1,
                        field.order()
                    )))
                }
            }
        }
        return Ok(Some(matrix_of(code, b, &x)));
    }
    for msg in s.elements(cap)? {
        if all_columns_differ(code, b, &msg) {
            return Ok(Some(matrix_of(code, b, &msg)));
        }
    }
    Ok(None)
}
