//! Clustered and recovery-clustered word sets.
//!
//! The searches only look at symbols that occur in a column. A candidate
//! center symbol (or list) at coordinate `i` matters only through the set of
//! words it matches there, and
//! - an absent symbol matches no word, so every present symbol dominates it;
//! - a list gains nothing from absent symbols, and a list containing every
//!   present symbol matches all words; otherwise only `ℓ`-subsets of the
//!   present symbols need to be tried.
//!
//! For the average-weight variants the optimum is forced column by column: the
//! plurality symbol (or the `ℓ` most frequent symbols) minimizes the escapes
//! of that column independently of the others.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::lr::RecoveryParams;
use crate::matrix::Matrix;
use crate::rational::{scale_to_integer, Rational};
use crate::subspace::combinations;

/// Words of a common length `n`; the columns of a candidate witness matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordSet {
    field: Field,
    n: usize,
    words: Vec<Vec<Elem>>,
}

impl WordSet {
    pub fn new(field: &Field, n: usize, words: Vec<Vec<Elem>>) -> Result<Self> {
        for w in &words {
            if w.len() != n {
                return Err(Error::DimensionMismatch(format!("word of length {} in a set of length {n}", w.len())));
            }
            for &x in w {
                field.check(u64::from(x))?;
            }
        }
        Ok(WordSet { field: field.clone(), n, words })
    }

    /// The columns of an `n x b` matrix.
    pub fn from_columns(m: &Matrix) -> Self {
        WordSet { field: m.field().clone(), n: m.rows(), words: (0..m.cols()).map(|j| m.column(j)).collect() }
    }

    /// The `n x |X|` matrix whose columns are the words.
    pub fn to_matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(&self.field, self.n, self.words.len());
        for (j, w) in self.words.iter().enumerate() {
            for (i, &x) in w.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn len(&self) -> usize {
        self.words.len()
    }
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn words(&self) -> &[Vec<Elem>] {
        &self.words
    }

    pub fn has_distinct_words(&self) -> bool {
        let mut w = self.words.clone();
        w.sort();
        w.windows(2).all(|p| p[0] != p[1])
    }

    /// `(symbol, count)` for symbols present in column `i`, by symbol code.
    fn column_counts(&self, i: usize) -> Vec<(Elem, usize)> {
        let mut col: Vec<Elem> = self.words.iter().map(|w| w[i]).collect();
        col.sort_unstable();
        let mut out: Vec<(Elem, usize)> = Vec::new();
        for x in col {
            match out.last_mut() {
                Some((s, c)) if *s == x => *c += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }

    fn mask_of(&self, i: usize, symbols: &[Elem]) -> u64 {
        self.words
            .iter()
            .enumerate()
            .filter(|(_, w)| symbols.contains(&w[i]))
            .fold(0, |m, (j, _)| m | (1 << j))
    }
}

/// Number of coordinates where `x` and `y` differ.
pub fn hamming_distance(x: &[Elem], y: &[Elem]) -> usize {
    x.iter().zip(y).filter(|(a, b)| a != b).count()
}

pub fn weight(x: &[Elem]) -> usize {
    x.iter().filter(|&&a| a != 0).count()
}

fn radius(rho: &Rational, n: usize) -> Result<usize> {
    scale_to_integer(rho, n)
        .filter(|&r| r >= 0)
        .map(|r| r as usize)
        .ok_or_else(|| Error::InvalidParameter(format!("rho * n = {rho} * {n} is not a nonnegative integer")))
}

/// Depth-first search for one candidate per coordinate such that every word
/// misses at most `budget` chosen candidates. `cands[i]` lists the match masks
/// at coordinate `i`; returns the chosen indices.
fn search(cands: &[Vec<u64>], words: usize, budget: usize) -> Option<Vec<usize>> {
    let n = cands.len();
    // least number of misses each coordinate forces, summed over words
    let forced: Vec<usize> =
        cands.iter().map(|c| words - c.iter().map(|m| m.count_ones() as usize).max().unwrap_or(0)).collect();
    let mut suffix = vec![0usize; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + forced[i];
    }
    let mut left = vec![budget; words];
    let mut choice = vec![0usize; n];
    fn go(
        i: usize,
        cands: &[Vec<u64>],
        suffix: &[usize],
        left: &mut [usize],
        choice: &mut [usize],
    ) -> bool {
        if i == cands.len() {
            return true;
        }
        if left.iter().sum::<usize>() < suffix[i] {
            return false;
        }
        'cand: for (c, &mask) in cands[i].iter().enumerate() {
            let mut j = 0;
            while j < left.len() {
                if mask >> j & 1 == 0 {
                    if left[j] == 0 {
                        for k in 0..j {
                            if mask >> k & 1 == 0 {
                                left[k] += 1;
                            }
                        }
                        continue 'cand;
                    }
                    left[j] -= 1;
                }
                j += 1;
            }
            choice[i] = c;
            if go(i + 1, cands, suffix, left, choice) {
                return true;
            }
            for (k, l) in left.iter_mut().enumerate() {
                if mask >> k & 1 == 0 {
                    *l += 1;
                }
            }
        }
        false
    }
    if go(0, cands, &suffix, &mut left, &mut choice) {
        Some(choice)
    } else {
        None
    }
}

fn check_mask_width(x: &WordSet) -> Result<()> {
    if x.len() > 64 {
        return Err(Error::InvalidParameter(format!("{} words; at most 64 are supported", x.len())));
    }
    Ok(())
}

/// A center within distance `radius` of every word, if one exists.
pub fn clustered_within(x: &WordSet, radius: usize) -> Result<Option<Vec<Elem>>> {
    check_mask_width(x)?;
    if x.is_empty() {
        return Ok(Some(vec![0; x.n]));
    }
    let mut syms = Vec::with_capacity(x.n);
    let mut cands = Vec::with_capacity(x.n);
    for i in 0..x.n {
        let mut counts = x.column_counts(i);
        counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        cands.push(counts.iter().map(|&(s, _)| x.mask_of(i, &[s])).collect());
        syms.push(counts.into_iter().map(|(s, _)| s).collect::<Vec<_>>());
    }
    Ok(search(&cands, x.len(), radius).map(|ch| ch.iter().enumerate().map(|(i, &c)| syms[i][c]).collect()))
}

/// `∃ z : wt(x - z) <= ρn` for every word; returns such a `z`.
pub fn is_clustered(x: &WordSet, rho: &Rational) -> Result<Option<Vec<Elem>>> {
    clustered_within(x, radius(rho, x.n)?)
}

/// Lists `Z_i` of size at most `ell` such that every word escapes them in at
/// most `radius` coordinates.
pub fn recovery_clustered_within(x: &WordSet, radius: usize, ell: usize) -> Result<Option<Vec<Vec<Elem>>>> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ell must be positive".into()));
    }
    check_mask_width(x)?;
    let mut lists = Vec::with_capacity(x.n);
    let mut cands = Vec::with_capacity(x.n);
    for i in 0..x.n {
        let present: Vec<Elem> = x.column_counts(i).into_iter().map(|(s, _)| s).collect();
        let options: Vec<Vec<Elem>> = if present.len() <= ell {
            vec![present]
        } else {
            combinations(present.len(), ell).into_iter().map(|c| c.iter().map(|&j| present[j]).collect()).collect()
        };
        let mut scored: Vec<(u64, Vec<Elem>)> = options.into_iter().map(|o| (x.mask_of(i, &o), o)).collect();
        scored.sort_by(|a, b| b.0.count_ones().cmp(&a.0.count_ones()));
        cands.push(scored.iter().map(|s| s.0).collect());
        lists.push(scored.into_iter().map(|s| s.1).collect::<Vec<_>>());
    }
    Ok(search(&cands, x.len(), radius).map(|ch| ch.iter().enumerate().map(|(i, &c)| lists[i][c].clone()).collect()))
}

pub fn is_recovery_clustered(x: &WordSet, rho: &Rational, ell: usize) -> Result<Option<Vec<Vec<Elem>>>> {
    recovery_clustered_within(x, radius(rho, x.n)?, ell)
}

/// Outcome of an average-weight test; the lists are the forced optimum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AverageVerdict {
    pub clustered: bool,
    pub lists: Vec<Vec<Elem>>,
    pub total_escapes: usize,
}

impl AverageVerdict {
    /// The center when every list has one symbol.
    pub fn center(&self) -> Vec<Elem> {
        self.lists.iter().map(|l| l.first().copied().unwrap_or(0)).collect()
    }
}

/// Total escapes `Σ_x |{i : x_i ∉ Z_i}|` against the `ell` most frequent
/// symbols per column (ties by symbol code), compared with `ρn|X|`.
pub fn avg_recovery_verdict(x: &WordSet, rho: &Rational, ell: usize) -> Result<AverageVerdict> {
    if ell == 0 {
        return Err(Error::InvalidParameter("ell must be positive".into()));
    }
    let mut lists = Vec::with_capacity(x.n);
    let mut escapes = 0;
    for i in 0..x.n {
        let mut counts = x.column_counts(i);
        counts.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        counts.truncate(ell);
        escapes += x.len() - counts.iter().map(|c| c.1).sum::<usize>();
        let mut l: Vec<Elem> = counts.into_iter().map(|c| c.0).collect();
        if l.is_empty() {
            l.push(0);
        }
        lists.push(l);
    }
    let bound = rho * Rational::from_integer(BigInt::from(x.n * x.len()));
    let clustered = Rational::from_integer(BigInt::from(escapes)) <= bound;
    Ok(AverageVerdict { clustered, lists, total_escapes: escapes })
}

pub fn is_avg_clustered(x: &WordSet, rho: &Rational) -> Result<AverageVerdict> {
    avg_recovery_verdict(x, rho, 1)
}

pub fn is_avg_recovery_clustered(x: &WordSet, rho: &Rational, ell: usize) -> Result<AverageVerdict> {
    avg_recovery_verdict(x, rho, ell)
}

/// The witness predicate selected by `params`: lists `Z_1..Z_n` (singletons
/// when `ℓ = 1`) certifying that the words violate list recovery.
pub fn violates(x: &WordSet, params: &RecoveryParams) -> Result<Option<Vec<Vec<Elem>>>> {
    if params.average_weight {
        let v = avg_recovery_verdict(x, &params.rho, params.ell)?;
        return Ok(v.clustered.then_some(v.lists));
    }
    let r = radius(&params.rho, x.n)?;
    if params.ell == 1 {
        Ok(clustered_within(x, r)?.map(|z| z.into_iter().map(|s| vec![s]).collect()))
    } else {
        recovery_clustered_within(x, r, params.ell)
    }
}

/// Escapes of one word against lists.
pub fn escapes(word: &[Elem], lists: &[Vec<Elem>]) -> usize {
    word.iter().zip(lists).filter(|(s, l)| !l.contains(s)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use proptest::prelude::*;

    fn ws(q: u64, words: &[&[u32]]) -> WordSet {
        let f = Field::of_order(q).unwrap();
        WordSet::new(&f, words[0].len(), words.iter().map(|w| w.to_vec()).collect()).unwrap()
    }

    // every center in F_q^n
    fn best_center_radius(x: &WordSet) -> usize {
        let q = x.field().order();
        let mut z = vec![0u32; x.n()];
        let mut best = usize::MAX;
        loop {
            let r = x.words().iter().map(|w| hamming_distance(w, &z)).max().unwrap_or(0);
            best = best.min(r);
            if !crate::subspace::increment(&mut z, q) {
                return best;
            }
        }
    }

    #[test]
    fn single_word_is_its_own_center() {
        let x = ws(3, &[&[2, 0, 1]]);
        assert_eq!(is_clustered(&x, &ratio(0, 1)).unwrap(), Some(vec![2, 0, 1]));
    }

    #[test]
    fn antipodal_pair() {
        let x = ws(2, &[&[0, 0, 0], &[1, 1, 1]]);
        assert_eq!(is_clustered(&x, &ratio(1, 3)).unwrap(), None);
        assert_eq!(best_center_radius(&x), 2);
        let y = ws(2, &[&[0, 0, 0], &[1, 1, 0]]);
        let z = is_clustered(&y, &ratio(1, 3)).unwrap().unwrap();
        assert!(z == vec![1, 0, 0] || z == vec![0, 1, 0]);
    }

    #[test]
    fn radius_must_be_integral() {
        let x = ws(2, &[&[0, 0, 0]]);
        assert!(is_clustered(&x, &ratio(1, 2)).is_err());
    }

    #[test]
    fn recovery_examples() {
        let all = ws(2, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        assert!(is_recovery_clustered(&all, &ratio(0, 1), 1).unwrap().is_none());
        assert!(is_recovery_clustered(&all, &ratio(0, 1), 2).unwrap().is_some());
    }

    #[test]
    fn average_examples() {
        let same = ws(2, &[&[1, 0, 1], &[1, 0, 1]]);
        assert!(is_avg_clustered(&same, &ratio(0, 1)).unwrap().clustered);
        let anti = ws(2, &[&[0, 0, 0], &[1, 1, 1]]);
        let v = is_avg_clustered(&anti, &ratio(1, 2)).unwrap();
        assert!(v.clustered);
        assert_eq!(v.total_escapes, 3);
        assert_eq!(v.center(), vec![0, 0, 0]);
        assert!(!is_avg_clustered(&anti, &ratio(1, 3)).unwrap().clustered);
        let all = ws(2, &[&[0, 0], &[0, 1], &[1, 0], &[1, 1]]);
        let v = is_avg_recovery_clustered(&all, &ratio(1, 4), 1).unwrap();
        assert_eq!(v.total_escapes, 4);
        // 4 escapes against a budget of rho*n*|X| = 2
        assert!(!v.clustered);
        assert!(is_avg_recovery_clustered(&all, &ratio(1, 2), 1).unwrap().clustered);
        assert!(is_avg_recovery_clustered(&all, &ratio(0, 1), 2).unwrap().clustered);
    }

    fn arb_wordset(q: u64, n: usize, max_words: usize) -> impl Strategy<Value = WordSet> {
        proptest::collection::vec(proptest::collection::vec(0..q as u32, n), 1..=max_words)
            .prop_map(move |w| WordSet::new(&Field::of_order(q).unwrap(), n, w).unwrap())
    }

    proptest! {
        #[test]
        fn center_search_is_exact(x in arb_wordset(3, 4, 4), r in 0usize..=4) {
            let found = clustered_within(&x, r).unwrap();
            prop_assert_eq!(found.is_some(), best_center_radius(&x) <= r);
            if let Some(z) = found {
                prop_assert!(x.words().iter().all(|w| hamming_distance(w, &z) <= r));
            }
        }

        #[test]
        fn max_dominates_mean(x in arb_wordset(4, 4, 5), r in 0i64..=4, ell in 1usize..=3) {
            let rho = ratio(r, 4);
            let plain = is_recovery_clustered(&x, &rho, ell).unwrap();
            let avg = is_avg_recovery_clustered(&x, &rho, ell).unwrap();
            if let Some(lists) = &plain {
                prop_assert!(lists.iter().all(|l| l.len() <= ell));
                prop_assert!(x.words().iter().all(|w| escapes(w, lists) <= r as usize));
                prop_assert!(avg.clustered);
            }
            let total: usize = x.words().iter().map(|w| escapes(w, &avg.lists)).sum();
            prop_assert_eq!(total, avg.total_escapes);
        }

        #[test]
        fn singleton_lists_are_centers(x in arb_wordset(3, 4, 4), r in 0usize..=4) {
            prop_assert_eq!(
                clustered_within(&x, r).unwrap().is_some(),
                recovery_clustered_within(&x, r, 1).unwrap().is_some()
            );
        }
    }
}
