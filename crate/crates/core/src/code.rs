//! Explicit linear codes and the random ensembles: random linear codes in the
//! kernel and uniform-subspace models, random Reed-Solomon codes with and
//! without repeated evaluation points, and the coupling between the two
//! Reed-Solomon models.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::Matrix;

/// Iteration cap for rejection sampling of full-rank parity matrices.
pub const REJECTION_CAP: usize = 1000;

/// Where a code came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Kernel of `parity`; `requested_k` is the nominal dimension `n - rows`.
    RlcParity { parity: Matrix, requested_k: usize },
    /// Kernel of a full-rank `parity`, a uniform subspace of dimension `n - rows`.
    RlcUniform { parity: Matrix },
    /// Evaluations of polynomials of degree `< k` at `points`.
    ReedSolomon { points: Vec<Elem>, repetition: bool },
    Explicit,
}

impl Provenance {
    pub fn model(&self) -> &'static str {
        match self {
            Provenance::RlcParity { .. } => "rlc",
            Provenance::RlcUniform { .. } => "rlc-uniform",
            Provenance::ReedSolomon { repetition: true, .. } => "rs",
            Provenance::ReedSolomon { repetition: false, .. } => "rs-norep",
            Provenance::Explicit => "explicit",
        }
    }
}

/// A linear code given by a generator matrix whose rows span it.
///
/// For Reed-Solomon codes the generator is the raw evaluation matrix, which is
/// rank deficient when fewer than `k` distinct points occur; `dim` is always
/// the true dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Code {
    generator: Matrix,
    dim: usize,
    provenance: Provenance,
}

impl Code {
    pub fn new(generator: Matrix, provenance: Provenance) -> Self {
        let dim = generator.rank();
        Code { generator, dim, provenance }
    }

    pub fn explicit(generator: Matrix) -> Self {
        Self::new(generator, Provenance::Explicit)
    }

    /// The kernel of a parity-check matrix.
    pub fn from_parity(parity: &Matrix) -> Self {
        let requested_k = parity.cols().saturating_sub(parity.rows());
        Self::new(parity.kernel(), Provenance::RlcParity { parity: parity.clone(), requested_k })
    }

    pub fn n(&self) -> usize {
        self.generator.cols()
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn field(&self) -> &Field {
        self.generator.field()
    }
    pub fn generator(&self) -> &Matrix {
        &self.generator
    }
    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// A basis of the code, `dim x n`, in RREF.
    pub fn basis(&self) -> Matrix {
        let r = self.generator.rref();
        r.matrix.select_rows(&(0..r.rank).collect::<Vec<_>>())
    }

    pub fn encode(&self, msg: &[Elem]) -> Vec<Elem> {
        self.generator.left_mul_vec(msg)
    }

    pub fn contains(&self, word: &[Elem]) -> bool {
        crate::subspace::Subspace::span(&self.generator).contains(word)
    }

    /// All `q^dim` codewords, in lexicographic order of messages over the RREF basis.
    pub fn codewords(&self, cap: u128) -> Result<Vec<Vec<Elem>>> {
        let q = u128::from(self.field().order());
        let needed = q.checked_pow(self.dim as u32).unwrap_or(u128::MAX);
        if needed > cap {
            return Err(Error::cap("codeword enumeration", needed, cap));
        }
        Ok(crate::matrix::row_span(&self.basis()))
    }

    /// Minimum weight of a nonzero codeword, `None` for the zero code.
    pub fn min_distance(&self, cap: u128) -> Result<Option<usize>> {
        Ok(self
            .codewords(cap)?
            .iter()
            .map(|w| w.iter().filter(|&&x| x != 0).count())
            .filter(|&w| w > 0)
            .min())
    }
}

/// A reproducible random stream: `(seed, index)` selects a ChaCha8 stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub index: u64,
}

impl RngStream {
    pub fn new(seed: u64, index: u64) -> Self {
        RngStream { seed, index }
    }
    pub fn rng(&self) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.seed);
        r.set_stream(self.index);
        r
    }
}

pub fn random_matrix<R: Rng + ?Sized>(field: &Field, rows: usize, cols: usize, rng: &mut R) -> Matrix {
    let q = field.order();
    let data = (0..rows * cols).map(|_| rng.gen_range(0..q)).collect();
    Matrix::from_raw(field, rows, cols, data)
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    Ok(())
}

/// Kernel of a uniform `(n-k) x n` parity matrix. The dimension may exceed `k`.
pub fn sample_rlc<R: Rng + ?Sized>(n: usize, k: usize, field: &Field, rng: &mut R) -> Result<Code> {
    check_k(n, k)?;
    Ok(Code::from_parity(&random_matrix(field, n - k, n, rng)))
}

fn full_rank_matrix<R: Rng + ?Sized>(field: &Field, rows: usize, cols: usize, rng: &mut R) -> Result<Matrix> {
    for _ in 0..REJECTION_CAP {
        let p = random_matrix(field, rows, cols, rng);
        if p.rank() == rows {
            return Ok(p);
        }
    }
    Err(Error::InvariantViolation(format!(
        "no full-rank {rows}x{cols} matrix in {REJECTION_CAP} draws"
    )))
}

/// A uniformly random subspace of dimension exactly `k`.
pub fn sample_rlc_uniform<R: Rng + ?Sized>(n: usize, k: usize, field: &Field, rng: &mut R) -> Result<Code> {
    check_k(n, k)?;
    let p = full_rank_matrix(field, n - k, n, rng)?;
    Ok(Code::new(p.kernel(), Provenance::RlcUniform { parity: p }))
}

/// One parity matrix shared across rates: the code of dimension `k` is the
/// kernel of the first `n - k` rows, so codes grow with `k`.
#[derive(Clone, Debug)]
pub struct NestedRlc {
    parity: Matrix,
    uniform: bool,
}

impl NestedRlc {
    pub fn sample<R: Rng + ?Sized>(n: usize, field: &Field, rng: &mut R) -> Self {
        NestedRlc { parity: random_matrix(field, n, n, rng), uniform: false }
    }

    /// Full-rank parity, so every level is a uniform subspace of dimension exactly `k`.
    pub fn sample_uniform<R: Rng + ?Sized>(n: usize, field: &Field, rng: &mut R) -> Result<Self> {
        Ok(NestedRlc { parity: full_rank_matrix(field, n, n, rng)?, uniform: true })
    }

    pub fn code(&self, k: usize) -> Result<Code> {
        let n = self.parity.cols();
        check_k(n, k)?;
        let p = self.parity.select_rows(&(0..n - k).collect::<Vec<_>>());
        Ok(if self.uniform {
            Code::new(p.kernel(), Provenance::RlcUniform { parity: p })
        } else {
            Code::from_parity(&p)
        })
    }
}

/// Evaluation generator: row `j` holds `α_i^j` for `j < k`.
pub fn rs_generator(field: &Field, points: &[Elem], k: usize) -> Matrix {
    let n = points.len();
    let mut g = Matrix::zeros(field, k, n);
    for (i, &a) in points.iter().enumerate() {
        let mut p = 1;
        for j in 0..k {
            g.set(j, i, p);
            p = field.mul(p, a);
        }
    }
    g
}

pub fn rs_code(field: &Field, points: &[Elem], k: usize, repetition: bool) -> Result<Code> {
    check_k(points.len(), k)?;
    Ok(Code::new(
        rs_generator(field, points, k),
        Provenance::ReedSolomon { points: points.to_vec(), repetition },
    ))
}

/// Evaluation points: i.i.d. uniform, or a uniform `n`-prefix of a random
/// permutation of the field.
pub fn sample_points<R: Rng + ?Sized>(n: usize, field: &Field, with_repetition: bool, rng: &mut R) -> Result<Vec<Elem>> {
    let q = field.order();
    if with_repetition {
        return Ok((0..n).map(|_| rng.gen_range(0..q)).collect());
    }
    if n > q as usize {
        return Err(Error::InvalidParameter(format!(
            "{n} distinct evaluation points do not exist in F_{q}"
        )));
    }
    let mut all: Vec<Elem> = (0..q).collect();
    let (head, _) = all.partial_shuffle(rng, n);
    Ok(head.to_vec())
}

pub fn sample_rs<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    field: &Field,
    with_repetition: bool,
    rng: &mut R,
) -> Result<Code> {
    check_k(n, k)?;
    let pts = sample_points(n, field, with_repetition, rng)?;
    rs_code(field, &pts, k, with_repetition)
}

/// The two Reed-Solomon models on one probability space.
#[derive(Clone, Debug)]
pub struct CoupledRs {
    pub with_repetition: Code,
    pub without_repetition: Code,
    /// Coordinates whose point repeats an earlier one.
    pub repeats: Vec<usize>,
}

impl CoupledRs {
    /// `φ`: re-evaluate the message at the repetition-free points.
    pub fn map(&self, msg: &[Elem]) -> (Vec<Elem>, Vec<Elem>) {
        (self.with_repetition.encode(msg), self.without_repetition.encode(msg))
    }
}

/// `α` i.i.d.; `β` keeps `α` off the repeat set and fills the repeat
/// coordinates, in order, with fresh points drawn uniformly from those unused.
pub fn coupled_rs_pair<R: Rng + ?Sized>(n: usize, k: usize, field: &Field, rng: &mut R) -> Result<CoupledRs> {
    check_k(n, k)?;
    let q = field.order() as usize;
    if n > q {
        return Err(Error::InvalidParameter(format!("n = {n} exceeds q = {q}")));
    }
    let alpha = sample_points(n, field, true, rng)?;
    let mut used = vec![false; q];
    let mut repeats = Vec::new();
    for (i, &a) in alpha.iter().enumerate() {
        if used[a as usize] {
            repeats.push(i);
        }
        used[a as usize] = true;
    }
    let mut beta = alpha.clone();
    for &i in &repeats {
        let free: Vec<Elem> = (0..q as Elem).filter(|&x| !used[x as usize]).collect();
        let x = free[rng.gen_range(0..free.len())];
        used[x as usize] = true;
        beta[i] = x;
    }
    Ok(CoupledRs {
        with_repetition: rs_code(field, &alpha, k, true)?,
        without_repetition: rs_code(field, &beta, k, false)?,
        repeats,
    })
}
