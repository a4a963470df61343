//! Spaces of polynomial tuples, polynomial profiles and the process that
//! reveals evaluation points one at a time.
//!
//! A tuple `(P_0..P_{b-1})` of polynomials of degree `< k` is a vector of
//! length `k b`; entry `j k + t` is the coefficient of `X^t` in `P_j`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::{kernel_clearing_matrix, Poly, PolyMatrix};
use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::Matrix;
use crate::profile::Profile;
use crate::subspace::Subspace;

/// An `F_q`-subspace of `Q_{k,b}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolySpace {
    k: usize,
    b: usize,
    space: Subspace,
}

impl PolySpace {
    /// `Q_{k,b}` itself.
    pub fn full(field: &Field, k: usize, b: usize) -> Self {
        PolySpace { k, b, space: Subspace::full(field, k * b) }
    }

    pub fn from_subspace(k: usize, b: usize, space: Subspace) -> Result<Self> {
        if space.ambient() != k * b {
            return Err(Error::DimensionMismatch(format!(
                "subspace of F^{} is not a space of {b}-tuples of degree < {k}",
                space.ambient()
            )));
        }
        Ok(PolySpace { k, b, space })
    }

    pub fn k(&self) -> usize {
        self.k
    }
    pub fn b(&self) -> usize {
        self.b
    }
    pub fn dim(&self) -> usize {
        self.space.dim()
    }
    pub fn field(&self) -> &Field {
        self.space.field()
    }
    pub fn subspace(&self) -> &Subspace {
        &self.space
    }

    /// The basis tuples as rows of a `dim x b` polynomial matrix.
    pub fn tuples(&self) -> PolyMatrix {
        let (k, b) = (self.k, self.b);
        let basis = self.space.basis();
        let mut m = PolyMatrix::zeros(self.field(), basis.rows(), b);
        for r in 0..basis.rows() {
            for j in 0..b {
                m.set(r, j, Poly::new(basis.row(r)[j * k..(j + 1) * k].to_vec()));
            }
        }
        m
    }

    fn intersect_kernel(&self, constraints: &Matrix) -> Result<PolySpace> {
        let basis = self.space.basis();
        let keep = basis.mul(&constraints.transpose())?.left_kernel();
        Ok(PolySpace { k: self.k, b: self.b, space: Subspace::span(&keep.mul(basis)?) })
    }
}

/// `dim_{F_q(X)} span_{F_q(X)} S`.
pub fn span_dim(s: &PolySpace) -> Result<usize> {
    s.tuples().fqx_rank()
}

/// `(kb) x b` matrix of `(P_0..P_{b-1}) -> (P_0(α)..P_{b-1}(α))`.
fn eval_matrix(field: &Field, k: usize, b: usize, alpha: Elem) -> Matrix {
    let mut e = Matrix::zeros(field, k * b, b);
    let mut p = 1;
    for t in 0..k {
        for j in 0..b {
            e.set(j * k + t, j, p);
        }
        p = field.mul(p, alpha);
    }
    e
}

/// `eval_α(S)` as a subspace of `F_q^b`. Its dimension never exceeds the
/// dimension of the `F_q(X)`-span of `S`, which is checked.
pub fn eval_map(s: &PolySpace, alpha: Elem) -> Result<Subspace> {
    s.field().check(u64::from(alpha))?;
    let image = Subspace::span(&s.space.basis().mul(&eval_matrix(s.field(), s.k, s.b, alpha))?);
    let d = span_dim(s)?;
    if image.dim() > d {
        return Err(Error::InvariantViolation(format!(
            "eval at {alpha} has dimension {} above the span dimension {d}",
            image.dim()
        )));
    }
    Ok(image)
}

/// `F_q(X)`-linear maps `ψ_1..ψ_n` out of `F_q(X)^b`, each an `m_i x b` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyProfile {
    b: usize,
    steps: Vec<PolyMatrix>,
}

impl PolyProfile {
    pub fn new(b: usize, steps: Vec<PolyMatrix>) -> Result<Self> {
        if let Some(s) = steps.iter().find(|s| s.cols() != b) {
            return Err(Error::DimensionMismatch(format!("map on {} coordinates in a width-{b} profile", s.cols())));
        }
        Ok(PolyProfile { b, steps })
    }
    pub fn b(&self) -> usize {
        self.b
    }
    pub fn n(&self) -> usize {
        self.steps.len()
    }
    pub fn steps(&self) -> &[PolyMatrix] {
        &self.steps
    }
}

/// `ψ_i` is the constant matrix whose kernel is `V_i`: the annihilator rows.
pub fn lcl_to_poly_profile(v: &Profile) -> PolyProfile {
    let steps = v.spaces().map(|s| PolyMatrix::from_constant(&s.annihilator())).collect();
    PolyProfile { b: v.b(), steps }
}

/// Rows over `F_q` of the condition `eval_α(ψ(P)) = 0` on coefficient vectors.
fn step_constraints(psi: &PolyMatrix, k: usize, alpha: Elem) -> Matrix {
    let f = psi.field();
    let b = psi.cols();
    let at = psi.eval(alpha);
    let mut c = Matrix::zeros(f, psi.rows(), k * b);
    for r in 0..psi.rows() {
        for j in 0..b {
            let mut p = at.get(r, j);
            for t in 0..k {
                c.set(r, j * k + t, p);
                p = f.mul(p, alpha);
            }
        }
    }
    c
}

/// `{P ∈ S : eval_α(ψ(P)) = 0}`. The dimension drops by at most the
/// `F_q(X)`-rank of `ψ` on the span of `S`, which is checked.
pub fn constrain_step(s: &PolySpace, psi: &PolyMatrix, alpha: Elem) -> Result<PolySpace> {
    if psi.cols() != s.b {
        return Err(Error::DimensionMismatch(format!("map on {} coordinates, tuples of width {}", psi.cols(), s.b)));
    }
    s.field().check(u64::from(alpha))?;
    let next = s.intersect_kernel(&step_constraints(psi, s.k, alpha))?;
    let bound = s.tuples().mul(&psi.transpose())?.fqx_rank()?;
    if s.dim() - next.dim() > bound {
        return Err(Error::InvariantViolation(format!(
            "dimension fell from {} to {} at α = {alpha}, more than the rank {bound} of ψ on span S",
            s.dim(),
            next.dim()
        )));
    }
    Ok(next)
}

/// An `F_q(X)`-subspace `W ⊆ F_q(X)^b` watched along a process.
#[derive(Clone, Debug)]
pub struct Watch {
    pub label: String,
    basis: PolyMatrix,
}

impl Watch {
    /// Spanned by the rows of `rows`; dependent rows are dropped.
    pub fn new(label: &str, rows: &PolyMatrix) -> Result<Self> {
        let mut keep: Vec<usize> = Vec::new();
        for r in 0..rows.rows() {
            let mut trial = keep.clone();
            trial.push(r);
            if rows.select_rows(&trial).fqx_rank()? == trial.len() {
                keep = trial;
            }
        }
        Ok(Watch { label: label.into(), basis: rows.select_rows(&keep) })
    }

    pub fn full(field: &Field, b: usize) -> Self {
        Watch { label: "full".into(), basis: PolyMatrix::identity(field, b) }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
    pub fn basis(&self) -> &PolyMatrix {
        &self.basis
    }

    /// `dim_{F_q(X)} ψ(W)`.
    pub fn image_rank(&self, psi: &PolyMatrix) -> Result<usize> {
        self.basis.mul(&psi.transpose())?.fqx_rank()
    }

    /// Coefficient-space conditions for `P ∈ W`: `Z P = 0` for a polynomial
    /// `Z` with kernel `W`, imposed on every coefficient of the product.
    pub fn membership(&self, k: usize) -> Result<Matrix> {
        let f = self.basis.field().clone();
        let b = self.basis.cols();
        let z = kernel_clearing_matrix(&self.basis.transpose())?;
        let top = z.max_degree().map_or(0, |d| d + k);
        let mut rows = Vec::new();
        for r in 0..z.rows() {
            for e in 0..top {
                let mut row = vec![0; k * b];
                for j in 0..b {
                    let zc = z.get(r, j);
                    for t in 0..k.min(e + 1) {
                        row[j * k + t] = zc.coeff(e - t);
                    }
                }
                rows.push(row);
            }
        }
        Matrix::from_rows(&f, k * b, &rows)
    }
}

/// `d_W(S) = dim_{F_q}(S ∩ W)`.
fn d_w(s: &PolySpace, membership: &Matrix) -> Result<usize> {
    Ok(s.intersect_kernel(membership)?.dim())
}

/// `γ = Σ_j dim ψ_j(W) - dim_{F_q}(S ∩ W)` over the maps in `suffix`.
pub fn gamma(suffix: &[PolyMatrix], w: &Watch, s: &PolySpace) -> Result<i64> {
    let mut r = 0;
    for psi in suffix {
        r += w.image_rank(psi)?;
    }
    Ok(r as i64 - d_w(s, &w.membership(s.k)?)? as i64)
}

/// One state of the process; step `i` has revealed `α_1..α_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub i: usize,
    pub dim: usize,
    pub span_dim: usize,
    /// `dim eval_{α_i}(S_{i-1})`; absent for `i = 0`.
    pub eval_dim: Option<usize>,
    /// `γ_i` for every watched space, in watch order.
    pub gamma: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub labels: Vec<String>,
    pub k: usize,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn final_dim(&self) -> usize {
        self.steps.last().map_or(0, |s| s.dim)
    }
}

/// Runs `S_0 ⊇ S_1 ⊇ ... ⊇ S_n`, checking at each step that the chain is
/// monotone, that `dim eval_{α_i}(S_{i-1})` is at most the span dimension, and
/// that `0 <= γ_{i-1} - γ_i <= dim ψ_i(W)` for every watched `W`.
pub fn run_process(s0: &PolySpace, psi: &PolyProfile, alphas: &[Elem], watches: &[Watch]) -> Result<Trace> {
    let n = psi.n();
    if alphas.len() != n || psi.b() != s0.b {
        return Err(Error::DimensionMismatch(format!(
            "{} points for {n} maps; widths {} and {}",
            alphas.len(),
            psi.b(),
            s0.b
        )));
    }
    let mut ranks: Vec<Vec<usize>> = Vec::with_capacity(watches.len());
    let mut members = Vec::with_capacity(watches.len());
    for w in watches {
        if w.basis.cols() != s0.b {
            return Err(Error::DimensionMismatch(format!("watched space in F(X)^{}", w.basis.cols())));
        }
        ranks.push(psi.steps.iter().map(|p| w.image_rank(p)).collect::<Result<_>>()?);
        members.push(w.membership(s0.k)?);
    }
    let gammas = |s: &PolySpace, i: usize| -> Result<Vec<i64>> {
        (0..watches.len())
            .map(|w| Ok(ranks[w][i..].iter().sum::<usize>() as i64 - d_w(s, &members[w])? as i64))
            .collect()
    };
    let mut s = s0.clone();
    let mut steps = vec![TraceStep { i: 0, dim: s.dim(), span_dim: span_dim(&s)?, eval_dim: None, gamma: gammas(&s, 0)? }];
    for (i, (p, &alpha)) in psi.steps.iter().zip(alphas).enumerate() {
        let eval_dim = eval_map(&s, alpha)?.dim();
        let next = constrain_step(&s, p, alpha)?;
        let g = gammas(&next, i + 1)?;
        let prev = steps.last().expect("nonempty");
        for (w, (&before, &after)) in prev.gamma.iter().zip(&g).enumerate() {
            let drop = before - after;
            if drop < 0 || drop > ranks[w][i] as i64 {
                return Err(Error::InvariantViolation(format!(
                    "γ for {} went from {before} to {after} at step {} (α = {alpha}, rank {}); dims {} -> {}",
                    watches[w].label,
                    i + 1,
                    ranks[w][i],
                    s.dim(),
                    next.dim()
                )));
            }
        }
        steps.push(TraceStep { i: i + 1, dim: next.dim(), span_dim: span_dim(&next)?, eval_dim: Some(eval_dim), gamma: g });
        s = next;
    }
    Ok(Trace { labels: watches.iter().map(|w| w.label.clone()).collect(), k: s0.k, steps })
}

/// Final solution space `S_n`.
pub fn solve(s0: &PolySpace, psi: &PolyProfile, alphas: &[Elem]) -> Result<PolySpace> {
    let mut s = s0.clone();
    for (p, &a) in psi.steps.iter().zip(alphas) {
        s = constrain_step(&s, p, a)?;
    }
    Ok(s)
}
