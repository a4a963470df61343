//! Slow reference implementations. Each one works from the definitions with
//! plain enumeration and shares no decision code with the module it checks:
//! subspaces are explicit element sets, codes are explicit codeword sets and
//! witnesses are found by trying every center or list.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::lr::RecoveryParams;
use crate::matrix::Matrix;
use crate::profile::Profile;
use crate::rational::Rational;
use crate::subspace::Subspace;

/// Default number of objects an oracle may enumerate.
pub const ORACLE_BUDGET: u128 = 1_000_000;

fn odometer(d: &mut [u32], base: u32) -> bool {
    for x in d.iter_mut() {
        *x += 1;
        if *x < base {
            return true;
        }
        *x = 0;
    }
    false
}

fn budget(what: &'static str, needed: Option<u128>, cap: u128) -> Result<()> {
    match needed {
        Some(n) if n <= cap => Ok(()),
        _ => Err(Error::cap(what, needed.unwrap_or(u128::MAX), cap)),
    }
}

fn pow(q: u64, e: usize) -> Option<u128> {
    u128::from(q).checked_pow(e as u32)
}

/// Exact probability, over all `q^{(n-k)n}` parity matrices `P`, that `pred(P)`.
pub fn exhaustive_rlc_law<F>(n: usize, k: usize, field: &Field, cap: u128, mut pred: F) -> Result<Rational>
where
    F: FnMut(&Matrix) -> bool,
{
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let q = field.order();
    let total = pow(q as u64, (n - k) * n);
    budget("parity matrices", total, cap)?;
    let mut d = vec![0u32; (n - k) * n];
    let mut hits: u128 = 0;
    loop {
        let p = Matrix::from_vec(field, n - k, n, d.clone())?;
        if pred(&p) {
            hits += 1;
        }
        if !odometer(&mut d, q) {
            break;
        }
    }
    Ok(Rational::new(BigInt::from(hits), BigInt::from(total.expect("budget checked"))))
}

/// `P A = 0`, i.e. every column of `A` lies in the kernel code.
pub fn annihilates(p: &Matrix, a: &Matrix) -> bool {
    let f = p.field();
    (0..p.rows()).all(|i| {
        (0..a.cols()).all(|j| (0..p.cols()).fold(0, |acc, t| f.add(acc, f.mul(p.get(i, t), a.get(t, j)))) == 0)
    })
}

/// `prod_{i=k+1}^{n} (1 - q^{-i})`, the probability that the kernel of a
/// uniform `(n-k) x n` matrix has dimension exactly `k`.
pub fn full_rank_probability(n: usize, k: usize, q: u64) -> Rational {
    let mut p = Rational::one();
    for i in k + 1..=n {
        let qi = BigInt::from(q).pow(i as u32);
        p *= Rational::new(qi.clone() - 1, qi);
    }
    p
}

/// `E|{i : α_i = α_j for some j < i}| = n - q(1 - (1 - 1/q)^n)` for `n`
/// i.i.d. uniform points.
pub fn balls_in_bins_expectation(n: usize, q: u64) -> Rational {
    let q_r = Rational::from_integer(BigInt::from(q));
    let miss = (Rational::one() - Rational::new(BigInt::one(), BigInt::from(q))).pow(n as i32);
    Rational::from_integer(BigInt::from(n)) - q_r * (Rational::one() - miss)
}

/// Codewords `m G` for every message over the raw generator, deduplicated.
pub fn naive_codewords(generator: &Matrix, cap: u128) -> Result<Vec<Vec<Elem>>> {
    let f = generator.field();
    let q = f.order();
    budget("messages", pow(q as u64, generator.rows()), cap)?;
    let mut m = vec![0u32; generator.rows()];
    let mut out = BTreeSet::new();
    loop {
        let w: Vec<Elem> = (0..generator.cols())
            .map(|j| (0..generator.rows()).fold(0, |acc, t| f.add(acc, f.mul(m[t], generator.get(t, j)))))
            .collect();
        out.insert(w);
        if !odometer(&mut m, q) {
            return Ok(out.into_iter().collect());
        }
    }
}

fn dist(x: &[Elem], y: &[Elem]) -> usize {
    x.iter().zip(y).filter(|(a, b)| a != b).count()
}

/// Tries every center in `F_q^n`.
pub fn naive_is_clustered(words: &[Vec<Elem>], field: &Field, radius: usize, cap: u128) -> Result<bool> {
    let n = words.first().map_or(0, Vec::len);
    let q = field.order();
    budget("centers", pow(q as u64, n), cap)?;
    let mut z = vec![0u32; n];
    loop {
        if words.iter().all(|w| dist(w, &z) <= radius) {
            return Ok(true);
        }
        if !odometer(&mut z, q) {
            return Ok(false);
        }
    }
}

/// Every nonempty subset of `F_q` of size at most `ell`, as bitmasks.
fn small_sets(q: u32, ell: usize) -> Vec<u64> {
    (1u64..(1 << q)).filter(|m| m.count_ones() as usize <= ell).collect()
}

/// Tries every sequence of lists of size at most `ell`. With `average`, the
/// total escape count is compared with `avg_budget` instead.
fn naive_lists(
    words: &[Vec<Elem>],
    field: &Field,
    radius: usize,
    ell: usize,
    average: Option<&Rational>,
    cap: u128,
) -> Result<bool> {
    let n = words.first().map_or(0, Vec::len);
    let q = field.order();
    if q > 16 {
        return Err(Error::InvalidParameter("list enumeration supports q <= 16".into()));
    }
    let sets = small_sets(q, ell);
    budget("list sequences", pow(sets.len() as u64, n), cap)?;
    let mut idx = vec![0u32; n];
    loop {
        let esc: Vec<usize> = words
            .iter()
            .map(|w| (0..n).filter(|&i| sets[idx[i] as usize] >> w[i] & 1 == 0).count())
            .collect();
        let ok = match average {
            Some(b) => Rational::from_integer(BigInt::from(esc.iter().sum::<usize>())) <= *b,
            None => esc.iter().all(|&e| e <= radius),
        };
        if ok {
            return Ok(true);
        }
        if !odometer(&mut idx, sets.len() as u32) {
            return Ok(false);
        }
    }
}

pub fn naive_is_recovery_clustered(
    words: &[Vec<Elem>],
    field: &Field,
    radius: usize,
    ell: usize,
    cap: u128,
) -> Result<bool> {
    naive_lists(words, field, radius, ell, None, cap)
}

/// `min over lists of total escapes <= ρ n |X|`, by trying every list sequence.
pub fn naive_is_avg_recovery_clustered(
    words: &[Vec<Elem>],
    field: &Field,
    rho: &Rational,
    ell: usize,
    cap: u128,
) -> Result<bool> {
    let n = words.first().map_or(0, Vec::len);
    let b = rho * Rational::from_integer(BigInt::from(n * words.len()));
    naive_lists(words, field, 0, ell, Some(&b), cap)
}

fn naive_violates(words: &[Vec<Elem>], field: &Field, params: &RecoveryParams, cap: u128) -> Result<bool> {
    let n = words[0].len();
    if params.average_weight {
        return naive_is_avg_recovery_clustered(words, field, &params.rho, params.ell, cap);
    }
    let r = params.radius(n)?;
    if params.ell == 1 {
        naive_is_clustered(words, field, r, cap)
    } else {
        naive_is_recovery_clustered(words, field, r, params.ell, cap)
    }
}

/// Whether the code spanned by `generator` is `(ρ, ℓ, L)`-list-recoverable:
/// every `(L+1)`-subset of codewords is tested with the naive predicates.
pub fn naive_list_recoverable(generator: &Matrix, params: &RecoveryParams, cap: u128) -> Result<bool> {
    let words = naive_codewords(generator, cap)?;
    let b = params.b();
    if words.len() < b {
        return Ok(true);
    }
    let mut idx: Vec<usize> = (0..b).collect();
    loop {
        let set: Vec<Vec<Elem>> = idx.iter().map(|&i| words[i].clone()).collect();
        if naive_violates(&set, generator.field(), params, cap)? {
            return Ok(false);
        }
        // next b-subset
        let mut i = b;
        loop {
            if i == 0 {
                return Ok(true);
            }
            i -= 1;
            if idx[i] < words.len() - b + i {
                idx[i] += 1;
                for j in i + 1..b {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// All partitions of `0..b` as label vectors, by trying every labelling.
fn all_labelings(b: usize) -> Vec<Vec<u32>> {
    let mut out = BTreeSet::new();
    let mut d = vec![0u32; b];
    loop {
        // canonical relabelling by first occurrence
        let mut map: Vec<Option<u32>> = vec![None; b];
        let mut next = 0;
        let canon: Vec<u32> = d
            .iter()
            .map(|&x| {
                *map[x as usize].get_or_insert_with(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect();
        out.insert(canon);
        if !odometer(&mut d, b as u32) {
            return out.into_iter().collect();
        }
    }
}

/// The list-recovery family straight from its definition: every choice of
/// sets `I_1..I_{L+1}` (each of size at least `(1-ρ)n`, or total size at least
/// `(1-ρ)n(L+1)` for the average variant) and relations `∼_i` on `[L+1]` with at
/// most `ℓ` classes, deduplicated.
pub fn naive_lr_family(field: &Field, n: usize, params: &RecoveryParams, cap: u128) -> Result<BTreeSet<Profile>> {
    let b = params.b();
    let m = params.min_active(n)?;
    let rels: Vec<Vec<u32>> =
        all_labelings(b).into_iter().filter(|l| l.iter().max().map_or(0, |&x| x + 1) as usize <= params.ell).collect();
    let subsets = 1u64 << n;
    let needed = pow(subsets, b).and_then(|a| pow(rels.len() as u64, n).and_then(|r| a.checked_mul(r)));
    budget("family choices", needed, cap)?;
    let mut out = BTreeSet::new();
    let mut sets = vec![0u32; b];
    loop {
        let sizes: Vec<usize> = sets.iter().map(|s| s.count_ones() as usize).collect();
        let ok = if params.average_weight { sizes.iter().sum::<usize>() >= b * m } else { sizes.iter().all(|&s| s >= m) };
        if ok {
            let mut rel = vec![0u32; n];
            loop {
                let mut spaces = Vec::with_capacity(n);
                for (i, &ri) in rel.iter().enumerate() {
                    let lab = &rels[ri as usize];
                    let mut rows = Vec::new();
                    for r in 0..b {
                        for s in r + 1..b {
                            if sets[r] >> i & 1 == 1 && sets[s] >> i & 1 == 1 && lab[r] == lab[s] {
                                let mut row = vec![0; b];
                                row[r] = 1;
                                row[s] = field.neg(1);
                                rows.push(row);
                            }
                        }
                    }
                    spaces.push(Subspace::from_constraints(&Matrix::from_rows(field, b, &rows)?));
                }
                out.insert(Profile::new(&spaces)?);
                if !odometer(&mut rel, rels.len() as u32) {
                    break;
                }
            }
        }
        if !odometer(&mut sets, subsets as u32) {
            return Ok(out);
        }
    }
}

/// Subspaces of `F_q^b` as explicit sorted element sets, from the span of every
/// tuple of at most `b` vectors.
pub fn naive_subspaces(field: &Field, b: usize, cap: u128) -> Result<Vec<BTreeSet<Vec<Elem>>>> {
    let q = field.order();
    budget("generator tuples", pow(q as u64, b * b), cap)?;
    let mut out = BTreeSet::new();
    let mut d = vec![0u32; b * b];
    loop {
        out.insert(span_set(field, b, &d));
        if !odometer(&mut d, q) {
            return Ok(out.into_iter().collect());
        }
    }
}

/// Span of the rows of a `b x b` row-major list, by closing under addition
/// and scaling.
fn span_set(field: &Field, b: usize, rows: &[u32]) -> BTreeSet<Vec<Elem>> {
    let mut set: BTreeSet<Vec<Elem>> = BTreeSet::new();
    set.insert(vec![0; b]);
    for g in rows.chunks(b) {
        let mut grown = BTreeSet::new();
        for v in &set {
            for c in 0..field.order() {
                grown.insert(v.iter().zip(g).map(|(&a, &x)| field.add(a, field.mul(c, x))).collect::<Vec<_>>());
            }
        }
        set = grown;
    }
    set
}

fn log_q(size: usize, q: u64) -> usize {
    let mut d = 0;
    let mut s = 1usize;
    while s < size {
        s *= q as usize;
        d += 1;
    }
    d
}

/// `R_V` from the definition, over explicit element sets:
/// the minimum over distinct-type `U` of the maximum over `W ⊊ U` of
/// `1 - (S(U) - S(W)) / (n (dim U - dim W))`. Profiles with no distinct-type
/// `U` other than `{0}` get `1`, and `b = 1` gives `0`.
pub fn naive_threshold(profile: &Profile, cap: u128) -> Result<Rational> {
    let field = profile.field();
    let q = field.order() as u64;
    let b = profile.b();
    let n = profile.n();
    if b <= 1 {
        // a single column is always distinct, and the zero word is in every code
        return Ok(Rational::zero());
    }
    let all = naive_subspaces(field, b, cap)?;
    let spaces: Vec<BTreeSet<Vec<Elem>>> =
        profile.spaces().map(|v| v.elements(cap).map(|e| e.into_iter().collect())).collect::<Result<_>>()?;
    let s_of = |u: &BTreeSet<Vec<Elem>>| -> usize {
        spaces.iter().map(|v| log_q(v.intersection(u).count(), q)).sum()
    };
    let distinct = |u: &BTreeSet<Vec<Elem>>| (0..b).all(|i| (i + 1..b).all(|j| u.iter().any(|x| x[i] != x[j])));
    let mut best: Option<Rational> = None;
    for u in all.iter().filter(|u| u.len() > 1 && distinct(u)) {
        let du = log_q(u.len(), q);
        let su = s_of(u);
        let mut inner: Option<Rational> = None;
        for w in all.iter().filter(|w| w.len() < u.len() && w.is_subset(u)) {
            let dw = log_q(w.len(), q);
            let r = Rational::one()
                - Rational::new(BigInt::from(su - s_of(w)), BigInt::from(n * (du - dw)));
            if inner.as_ref().map_or(true, |x| r > *x) {
                inner = Some(r);
            }
        }
        let r = inner.expect("{0} is a proper subspace");
        if best.as_ref().map_or(true, |x| r < *x) {
            best = Some(r);
        }
    }
    Ok(match best {
        Some(r) => r,
        None => Rational::one(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn f(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn rlc_law_examples() {
        let f2 = f(2);
        let zero = Matrix::zeros(&f2, 2, 1);
        assert_eq!(exhaustive_rlc_law(2, 1, &f2, 100, |p| annihilates(p, &zero)).unwrap(), ratio(1, 1));
        let e1 = Matrix::from_rows(&f2, 1, &[vec![1], vec![0]]).unwrap();
        assert_eq!(exhaustive_rlc_law(2, 1, &f2, 100, |p| annihilates(p, &e1)).unwrap(), ratio(1, 2));
        let exact = exhaustive_rlc_law(3, 1, &f2, 100, |p| p.rank() == 2).unwrap();
        assert_eq!(exact, full_rank_probability(3, 1, 2));
        assert_eq!(exact, ratio(21, 32));
    }

    #[test]
    fn balls_in_bins() {
        assert_eq!(balls_in_bins_expectation(1, 5), ratio(0, 1));
        assert_eq!(balls_in_bins_expectation(3, 1), ratio(2, 1));
        assert_eq!(balls_in_bins_expectation(2, 2), ratio(1, 2));
    }

    #[test]
    fn subspace_counts() {
        assert_eq!(naive_subspaces(&f(2), 4, ORACLE_BUDGET).unwrap().len(), 67);
        assert_eq!(naive_subspaces(&f(3), 2, ORACLE_BUDGET).unwrap().len(), 6);
    }

    #[test]
    fn naive_predicates() {
        let f2 = f(2);
        let anti = vec![vec![0, 0, 0], vec![1, 1, 1]];
        assert!(!naive_is_clustered(&anti, &f2, 1, 100).unwrap());
        assert!(naive_is_avg_recovery_clustered(&anti, &f2, &ratio(1, 2), 1, 100).unwrap());
        assert!(!naive_is_avg_recovery_clustered(&anti, &f2, &ratio(1, 3), 1, 100).unwrap());
        assert!(naive_is_recovery_clustered(&anti, &f2, 0, 2, 100).unwrap());
    }

    #[test]
    fn half_diagonal_threshold() {
        let p = crate::profile::tests::half_diagonal(2, 4);
        assert_eq!(naive_threshold(&p, ORACLE_BUDGET).unwrap(), ratio(1, 2));
    }
}
