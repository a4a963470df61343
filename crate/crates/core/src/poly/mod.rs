//! Polynomials over `F_q`, matrices of polynomials, and exact ranks over the
//! rational function field `F_q(X)`.

pub mod process;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::Matrix;
use crate::subspace::combinations;

pub use process::{
    constrain_step, eval_map, gamma, lcl_to_poly_profile, run_process, solve, span_dim, PolyProfile, PolySpace, Trace,
    TraceStep, Watch,
};

/// Coefficients from the constant term up, with no trailing zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Poly(Vec<Elem>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }
    pub fn constant(c: Elem) -> Self {
        Self::new(vec![c])
    }
    /// `X`.
    pub fn x() -> Self {
        Poly(vec![0, 1])
    }
    pub fn new(mut coeffs: Vec<Elem>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly(coeffs)
    }
    pub fn coeffs(&self) -> &[Elem] {
        &self.0
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }
    pub fn coeff(&self, t: usize) -> Elem {
        self.0.get(t).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Poly, f: &Field) -> Poly {
        let len = self.0.len().max(other.0.len());
        Poly::new((0..len).map(|t| f.add(self.coeff(t), other.coeff(t))).collect())
    }
    pub fn sub(&self, other: &Poly, f: &Field) -> Poly {
        let len = self.0.len().max(other.0.len());
        Poly::new((0..len).map(|t| f.sub(self.coeff(t), other.coeff(t))).collect())
    }
    pub fn neg(&self, f: &Field) -> Poly {
        Poly(self.0.iter().map(|&c| f.neg(c)).collect())
    }
    pub fn scale(&self, c: Elem, f: &Field) -> Poly {
        Poly::new(self.0.iter().map(|&a| f.mul(a, c)).collect())
    }
    pub fn mul(&self, other: &Poly, f: &Field) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![0; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(out)
    }
    pub fn eval(&self, x: Elem, f: &Field) -> Elem {
        self.0.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn divrem(&self, d: &Poly, f: &Field) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = f.inv(d.0[dd]);
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quo = vec![0; rem.len() - dd];
        for s in (0..quo.len()).rev() {
            let c = f.mul(rem[s + dd], lead_inv);
            quo[s] = c;
            if c != 0 {
                for (t, &dc) in d.0.iter().enumerate() {
                    rem[s + t] = f.sub(rem[s + t], f.mul(c, dc));
                }
            }
        }
        (Poly::new(quo), Poly::new(rem))
    }

    fn exact_div(&self, d: &Poly, f: &Field) -> Result<Poly> {
        let (q, r) = self.divrem(d, f);
        if !r.is_zero() {
            return Err(Error::InvariantViolation("inexact division in fraction-free elimination".into()));
        }
        Ok(q)
    }
}

/// A matrix over `F_q[X]`, standing for an `F_q(X)`-linear map.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<Poly>,
}

impl PolyMatrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        PolyMatrix { rows, cols, field: field.clone(), data: vec![Poly::zero(); rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Poly::constant(1));
        }
        m
    }

    pub fn from_constant(m: &Matrix) -> Self {
        let mut p = Self::zeros(m.field(), m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                p.set(i, j, Poly::constant(m.get(i, j)));
            }
        }
        p
    }

    /// From rows of coefficient lists, validating entries.
    pub fn from_rows(field: &Field, cols: usize, rows: &[Vec<Vec<Elem>>]) -> Result<Self> {
        let mut m = Self::zeros(field, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!("row of length {} with {cols} columns", r.len())));
            }
            for (j, c) in r.iter().enumerate() {
                for &x in c {
                    field.check(u64::from(x))?;
                }
                m.set(i, j, Poly::new(c.clone()));
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.data[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, p: Poly) {
        self.data[i * self.cols + j] = p;
    }

    /// Largest entry degree; `None` when every entry is zero.
    pub fn max_degree(&self) -> Option<usize> {
        self.data.iter().filter_map(Poly::degree).max()
    }

    pub fn transpose(&self) -> PolyMatrix {
        let mut t = Self::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = Poly::zero();
                for t in 0..self.cols {
                    acc = acc.add(&self.get(i, t).mul(other.get(t, j), f), f);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn select_rows(&self, rows: &[usize]) -> PolyMatrix {
        let mut out = Self::zeros(&self.field, rows.len(), self.cols);
        for (a, &i) in rows.iter().enumerate() {
            for j in 0..self.cols {
                out.set(a, j, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn select_columns(&self, cols: &[usize]) -> PolyMatrix {
        self.transpose().select_rows(cols).transpose()
    }

    /// Entrywise evaluation at `x`.
    pub fn eval(&self, x: Elem) -> Matrix {
        let mut m = Matrix::zeros(&self.field, self.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j).eval(x, &self.field));
            }
        }
        m
    }

    /// Fraction-free elimination. Every intermediate entry is a minor of the
    /// input, so each division by the previous pivot is exact. Returns the
    /// rank, the eliminated matrix and the number of row swaps.
    fn bareiss(&self) -> Result<(usize, PolyMatrix, usize)> {
        let f = &self.field;
        let mut m = self.clone();
        let mut prev = Poly::constant(1);
        let mut r = 0;
        let mut swaps = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    m.data.swap(p * self.cols + j, r * self.cols + j);
                }
                swaps += 1;
            }
            let piv = m.get(r, c).clone();
            for i in r + 1..self.rows {
                let lead = m.get(i, c).clone();
                for j in c + 1..self.cols {
                    let v = piv.mul(m.get(i, j), f).sub(&lead.mul(m.get(r, j), f), f);
                    m.set(i, j, v.exact_div(&prev, f)?);
                }
                m.set(i, c, Poly::zero());
            }
            prev = piv;
            r += 1;
        }
        Ok((r, m, swaps))
    }

    /// Rank over `F_q(X)`.
    pub fn fqx_rank(&self) -> Result<usize> {
        Ok(self.bareiss()?.0)
    }

    pub fn det(&self) -> Result<Poly> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!("determinant of a {}x{} matrix", self.rows, self.cols)));
        }
        if self.rows == 0 {
            return Ok(Poly::constant(1));
        }
        let (rank, m, swaps) = self.bareiss()?;
        if rank < self.rows {
            return Ok(Poly::zero());
        }
        let d = m.get(self.rows - 1, self.cols - 1).clone();
        Ok(if swaps % 2 == 1 { d.neg(&self.field) } else { d })
    }

    /// `adj(M)` with `M adj(M) = det(M) I`, by cofactors.
    pub fn adjugate(&self) -> Result<PolyMatrix> {
        let n = self.rows;
        if n != self.cols {
            return Err(Error::DimensionMismatch(format!("adjugate of a {}x{} matrix", self.rows, self.cols)));
        }
        let f = &self.field;
        let mut adj = Self::zeros(f, n, n);
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let minor = self.select_rows(&rows).select_columns(&cols).det()?;
                adj.set(i, j, if (i + j) % 2 == 1 { minor.neg(f) } else { minor });
            }
        }
        Ok(adj)
    }
}

/// For `T` (`b x D`) with `F_q(X)`-independent columns, a polynomial matrix `Z`
/// (`(b-D) x b`) with kernel exactly the column span of `T`.
///
/// With rows permuted so that the top `D x D` block `T_1` is invertible,
/// `Z = [ -T_2 adj(T_1) | det(T_1) I ]`, i.e. `det(T_1) [ -T_2 T_1^{-1} | I ]`.
/// Entries have degree at most `D` times the largest entry degree of `T`.
pub fn kernel_clearing_matrix(t: &PolyMatrix) -> Result<PolyMatrix> {
    let (b, d) = (t.rows(), t.cols());
    let f = t.field().clone();
    if d == 0 {
        return Ok(PolyMatrix::identity(&f, b));
    }
    let top = combinations(b, d)
        .into_iter()
        .find(|rows| t.select_rows(rows).det().is_ok_and(|p| !p.is_zero()))
        .ok_or_else(|| Error::InvalidParameter("columns are dependent over F_q(X)".into()))?;
    let rest: Vec<usize> = (0..b).filter(|r| !top.contains(r)).collect();
    let t1 = t.select_rows(&top);
    let det = t1.det()?;
    let cleared = t.select_rows(&rest).mul(&t1.adjugate()?)?;
    let mut z = PolyMatrix::zeros(&f, b - d, b);
    for (a, _) in rest.iter().enumerate() {
        for (c, &r) in top.iter().enumerate() {
            z.set(a, r, cleared.get(a, c).neg(&f));
        }
        z.set(a, rest[a], det.clone());
    }
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::RngStream;
    use proptest::prelude::*;
    use rand::Rng;

    fn f(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    fn random_poly_matrix<R: Rng>(field: &Field, rows: usize, cols: usize, deg: usize, rng: &mut R) -> PolyMatrix {
        let q = field.order();
        let mut m = PolyMatrix::zeros(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, Poly::new((0..=deg).map(|_| rng.gen_range(0..q)).collect()));
            }
        }
        m
    }

    #[test]
    fn poly_arithmetic() {
        let f5 = f(5);
        let a = Poly::new(vec![1, 2]); // 1 + 2X
        let b = Poly::new(vec![4, 0, 1]); // 4 + X^2
        let p = a.mul(&b, &f5);
        assert_eq!(p.coeffs(), &[4, 3, 1, 2]);
        let (q, r) = p.divrem(&b, &f5);
        assert_eq!((q, r), (a.clone(), Poly::zero()));
        assert_eq!(Poly::new(vec![0, 0, 0]).degree(), None);
        for x in 0..5 {
            assert_eq!(p.eval(x, &f5), f5.mul(a.eval(x, &f5), b.eval(x, &f5)));
        }
    }

    #[test]
    fn rank_examples() {
        let f5 = f(5);
        let m = PolyMatrix::from_rows(&f5, 2, &[vec![vec![0, 1], vec![0, 0, 1]], vec![vec![1], vec![0, 1]]]).unwrap();
        assert_eq!(m.fqx_rank().unwrap(), 1);
        assert_eq!(PolyMatrix::identity(&f5, 3).fqx_rank().unwrap(), 3);
        assert_eq!(PolyMatrix::zeros(&f5, 2, 3).fqx_rank().unwrap(), 0);
    }

    #[test]
    fn rank_dominates_every_evaluation() {
        let f64_ = f(64);
        let mut rng = RngStream::new(7, 0).rng();
        for _ in 0..30 {
            let m = random_poly_matrix(&f64_, 3, 3, 3, &mut rng);
            let exact = m.fqx_rank().unwrap();
            let best = (0..20).map(|_| m.eval(rng.gen_range(0..64)).rank()).max().unwrap();
            assert!(exact >= best);
            // 3x3 minors have degree at most 9 < 64, so some point attains the rank
            assert_eq!(exact, (0..64).map(|x| m.eval(x).rank()).max().unwrap());
        }
    }

    #[test]
    fn determinant_and_adjugate() {
        let f7 = f(7);
        let mut rng = RngStream::new(8, 0).rng();
        for n in 1..=3 {
            let m = random_poly_matrix(&f7, n, n, 2, &mut rng);
            let d = m.det().unwrap();
            for x in 0..7 {
                let e = m.eval(x);
                // evaluation commutes with the determinant
                let mut ev = e.clone();
                let rank = ev.rank();
                if rank < n {
                    assert_eq!(d.eval(x, &f7), 0);
                }
                ev = m.adjugate().unwrap().eval(x);
                let prod = e.mul(&ev).unwrap();
                for i in 0..n {
                    for j in 0..n {
                        assert_eq!(prod.get(i, j), if i == j { d.eval(x, &f7) } else { 0 });
                    }
                }
            }
        }
    }

    #[test]
    fn kernel_clearing_examples() {
        let f5 = f(5);
        // T = first two columns of the identity
        let t = PolyMatrix::identity(&f5, 3).select_columns(&[0, 1]);
        let z = kernel_clearing_matrix(&t).unwrap();
        assert_eq!(z, PolyMatrix::from_rows(&f5, 3, &[vec![vec![], vec![], vec![1]]]).unwrap());
        // T = (1, X)^T
        let t = PolyMatrix::from_rows(&f5, 1, &[vec![vec![1]], vec![vec![0, 1]]]).unwrap();
        let z = kernel_clearing_matrix(&t).unwrap();
        assert_eq!(z, PolyMatrix::from_rows(&f5, 2, &[vec![vec![0, 4], vec![1]]]).unwrap());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn kernel_clearing_is_exact(seed in 0u64..10_000, d in 1usize..=2) {
            let f8 = f(8);
            let mut rng = RngStream::new(seed, 0).rng();
            let t = random_poly_matrix(&f8, 3, d, 2, &mut rng);
            prop_assume!(t.fqx_rank().unwrap() == d);
            let z = kernel_clearing_matrix(&t).unwrap();
            prop_assert_eq!(z.rows(), 3 - d);
            let zt = z.mul(&t).unwrap();
            prop_assert!(zt.max_degree().is_none());
            prop_assert_eq!(z.fqx_rank().unwrap(), 3 - d);
            prop_assert!(z.max_degree().unwrap_or(0) <= d * 2);
        }

        #[test]
        fn rank_is_transpose_invariant(seed in 0u64..10_000, r in 1usize..4, c in 1usize..4) {
            let m = random_poly_matrix(&f(4), r, c, 2, &mut RngStream::new(seed, 1).rng());
            prop_assert_eq!(m.fqx_rank().unwrap(), m.transpose().fqx_rank().unwrap());
        }
    }
}
