//! Brute-force certification of list decoding and list recovery for explicit codes.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::cluster::{escapes, hamming_distance, violates, weight, WordSet};
use crate::code::Code;
use crate::error::{Error, Result};
use crate::field::Elem;
use crate::lr::RecoveryParams;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Every `(L+1)`-subset of codewords against the witness predicate.
    Subsets,
    /// Every center (or list sequence) against the codewords it captures.
    Balls,
    /// Linear codes with `ℓ = 1`: translate one witness word to zero and
    /// search the low-weight codewords only.
    LowWeight,
}

/// Words violating list recovery, with the lists (singletons for `ℓ = 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub words: WordSet,
    pub lists: Vec<Vec<Elem>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub witness: Option<Violation>,
    /// Candidates examined, in the unit of the strategy.
    pub examined: u128,
}

impl Certificate {
    pub fn is_recoverable(&self) -> bool {
        self.witness.is_none()
    }
}

/// Lexicographic `k`-subsets of `0..n`, generated lazily.
struct Subsets {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Subsets {
    fn new(n: usize, k: usize) -> Self {
        Subsets { n, cur: (k <= n).then(|| (0..k).collect()) }
    }
}

impl Iterator for Subsets {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let c = self.cur.as_mut().expect("checked above");
        let k = c.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            if c[i] < self.n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

pub fn certify_list_recoverable(
    code: &Code,
    params: &RecoveryParams,
    strategy: Strategy,
    cap: u128,
) -> Result<Certificate> {
    params.radius(code.n())?;
    match strategy {
        Strategy::Subsets => by_subsets(code, params, cap),
        Strategy::Balls => by_balls(code, params, cap),
        Strategy::LowWeight => by_low_weight(code, params, cap),
    }
}

fn word_set(code: &Code, words: Vec<Vec<Elem>>) -> WordSet {
    WordSet::new(code.field(), code.n(), words).expect("codewords have the code's length")
}

fn by_subsets(code: &Code, params: &RecoveryParams, cap: u128) -> Result<Certificate> {
    let words = code.codewords(cap)?;
    let b = params.b();
    let needed = binomial(words.len() as u128, b as u128);
    if needed > cap {
        return Err(Error::cap("codeword subsets", needed, cap));
    }
    let mut examined = 0;
    for idx in Subsets::new(words.len(), b) {
        examined += 1;
        let x = word_set(code, idx.iter().map(|&i| words[i].clone()).collect());
        if let Some(lists) = violates(&x, params)? {
            return Ok(Certificate { witness: Some(Violation { words: x, lists }), examined });
        }
    }
    Ok(Certificate { witness: None, examined })
}

/// Per-coordinate lists: all of `F_q` when `ℓ >= q`, else every `ℓ`-subset.
fn list_options(q: u32, ell: usize) -> Vec<Vec<Elem>> {
    if ell as u64 >= u64::from(q) {
        return vec![(0..q).collect()];
    }
    Subsets::new(q as usize, ell).map(|s| s.into_iter().map(|x| x as Elem).collect()).collect()
}

fn by_balls(code: &Code, params: &RecoveryParams, cap: u128) -> Result<Certificate> {
    let n = code.n();
    let q = code.field().order();
    let options = list_options(q, params.ell);
    let needed = (options.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > cap {
        return Err(Error::cap("centers", needed, cap));
    }
    let words = code.codewords(cap)?;
    let b = params.b();
    let r = params.radius(n)?;
    let avg_budget = (&params.rho * Rational::from_integer(BigInt::from(n * b))).floor().to_integer();
    let mut idx = vec![0u32; n];
    let mut examined = 0;
    loop {
        examined += 1;
        let lists: Vec<Vec<Elem>> = idx.iter().map(|&j| options[j as usize].clone()).collect();
        let mut esc: Vec<(usize, usize)> = words.iter().enumerate().map(|(w, x)| (escapes(x, &lists), w)).collect();
        esc.sort();
        let hit = if esc.len() < b {
            false
        } else if params.average_weight {
            BigInt::from(esc[..b].iter().map(|e| e.0).sum::<usize>()) <= avg_budget
        } else {
            esc[b - 1].0 <= r
        };
        if hit {
            let x = word_set(code, esc[..b].iter().map(|e| words[e.1].clone()).collect());
            return Ok(Certificate { witness: Some(Violation { words: x, lists }), examined });
        }
        if !crate::subspace::increment_lex(&mut idx, options.len() as u32) {
            return Ok(Certificate { witness: None, examined });
        }
    }
}

/// Witness sets of a linear code can be translated so that one word is zero.
/// The others then have weight at most `2ρn` (both within `ρn` of the
/// center), or `ρn(L+1)` in the average-weight variant. Words of weight at
/// most `w` are those vanishing on some `n - w` coordinates, found as the
/// subcode cut out by those columns; levels `w = 1, 2, ...` are searched in
/// turn so that abundant low-weight words end the search early.
fn by_low_weight(code: &Code, params: &RecoveryParams, cap: u128) -> Result<Certificate> {
    if params.ell != 1 {
        return Err(Error::InvalidParameter("the low-weight search needs ell = 1".into()));
    }
    let n = code.n();
    let b = params.b();
    let r = params.radius(n)?;
    let reach = if params.average_weight {
        (&params.rho * Rational::from_integer(BigInt::from(n * b))).floor().to_integer().to_usize().unwrap_or(n)
    } else {
        2 * r
    }
    .min(n);
    let g = code.basis();
    let q = code.field().order();
    let zero = vec![0; n];
    let mut seen: BTreeSet<Vec<Elem>> = BTreeSet::new();
    let mut found: Vec<Vec<Elem>> = Vec::new();
    let mut examined: u128 = 0;
    if b == 1 {
        let x = word_set(code, vec![zero]);
        return Ok(Certificate { witness: violates(&x, params)?.map(|lists| Violation { words: x, lists }), examined });
    }
    for level in 1..=reach {
        for z in Subsets::new(n, n - level) {
            let sub = g.select_columns(&z).left_kernel();
            if sub.rows() == 0 {
                examined += 1;
                continue;
            }
            let gen = sub.mul(&g)?;
            let mut coeffs = vec![0; gen.rows()];
            while crate::subspace::increment_lex(&mut coeffs, q) {
                examined += 1;
                if examined > cap {
                    return Err(Error::cap("low-weight codewords", examined, cap));
                }
                let x = gen.left_mul_vec(&coeffs);
                if weight(&x) == 0 || seen.contains(&x) {
                    continue;
                }
                let near: Vec<&Vec<Elem>> = found.iter().filter(|y| hamming_distance(&x, y) <= reach).collect();
                for rest in Subsets::new(near.len(), b - 2) {
                    if !rest.iter().enumerate().all(|(a, &i)| {
                        rest[a + 1..].iter().all(|&j| hamming_distance(near[i], near[j]) <= reach)
                    }) {
                        continue;
                    }
                    examined += 1;
                    let mut words = vec![zero.clone(), x.clone()];
                    words.extend(rest.iter().map(|&i| near[i].clone()));
                    let set = word_set(code, words);
                    if let Some(lists) = violates(&set, params)? {
                        return Ok(Certificate { witness: Some(Violation { words: set, lists }), examined });
                    }
                }
                if examined > cap {
                    return Err(Error::cap("low-weight witness candidates", examined, cap));
                }
                seen.insert(x.clone());
                found.push(x);
            }
        }
    }
    Ok(Certificate { witness: None, examined })
}

/// Re-checks a witness against the definition: distinct codewords, lists of
/// size at most `ℓ`, and the escape bound.
pub fn check_violation(code: &Code, params: &RecoveryParams, v: &Violation) -> Result<bool> {
    let n = code.n();
    if v.words.len() != params.b() || !v.words.has_distinct_words() || v.lists.len() != n {
        return Ok(false);
    }
    if v.lists.iter().any(|l| l.len() > params.ell) || !v.words.words().iter().all(|w| code.contains(w)) {
        return Ok(false);
    }
    let esc: Vec<usize> = v.words.words().iter().map(|w| escapes(w, &v.lists)).collect();
    if params.average_weight {
        let total = Rational::from_integer(BigInt::from(esc.iter().sum::<usize>()));
        Ok(total <= &params.rho * Rational::from_integer(BigInt::from(n * params.b())))
    } else {
        let r = params.radius(n)?;
        Ok(esc.iter().all(|&e| e <= r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{sample_rlc, RngStream};
    use crate::field::Field;
    use crate::matrix::Matrix;
    use crate::rational::ratio;

    fn params(rho: (i64, i64), ell: usize, l: usize, avg: bool) -> RecoveryParams {
        RecoveryParams::new(ratio(rho.0, rho.1), ell, l, avg).unwrap()
    }

    fn all_strategies(code: &Code, p: &RecoveryParams) -> Vec<bool> {
        let mut out = vec![
            certify_list_recoverable(code, p, Strategy::Subsets, 1 << 24).unwrap().is_recoverable(),
            certify_list_recoverable(code, p, Strategy::Balls, 1 << 24).unwrap().is_recoverable(),
        ];
        if p.ell == 1 {
            out.push(certify_list_recoverable(code, p, Strategy::LowWeight, 1 << 24).unwrap().is_recoverable());
        }
        out
    }

    #[test]
    fn zero_code_is_list_decodable() {
        let f2 = Field::of_order(2).unwrap();
        let zero = Code::explicit(Matrix::zeros(&f2, 0, 4));
        for l in 1..=3 {
            for r in 0..=4 {
                let p = params((r, 4), 1, l, false);
                assert!(all_strategies(&zero, &p).iter().all(|&ok| ok));
            }
        }
    }

    #[test]
    fn full_code_of_length_two() {
        let f2 = Field::of_order(2).unwrap();
        let full = Code::explicit(Matrix::identity(&f2, 2));
        let p = params((1, 2), 1, 2, false);
        let cert = certify_list_recoverable(&full, &p, Strategy::Balls, 1 << 10).unwrap();
        let v = cert.witness.unwrap();
        assert_eq!(v.words.len(), 3);
        assert!(check_violation(&full, &p, &v).unwrap());
        assert_eq!(all_strategies(&full, &p), vec![false; 3]);
    }

    #[test]
    fn strategies_agree_on_random_codes() {
        for q in [2u64, 3, 4] {
            let fq = Field::of_order(q).unwrap();
            for t in 0..30 {
                let mut rng = RngStream::new(q, t).rng();
                let code = sample_rlc(4, 2, &fq, &mut rng).unwrap();
                for (rho, ell, l, avg) in [((1, 4), 1, 1, false), ((1, 4), 1, 2, false), ((1, 2), 1, 2, true), ((1, 4), 2, 2, false), ((1, 2), 2, 3, true)] {
                    let p = params(rho, ell, l, avg);
                    let v = all_strategies(&code, &p);
                    assert!(v.iter().all(|&x| x == v[0]), "q={q} t={t} {p:?}: {v:?}");
                    for s in [Strategy::Subsets, Strategy::Balls] {
                        if let Some(w) = certify_list_recoverable(&code, &p, s, 1 << 24).unwrap().witness {
                            assert!(check_violation(&code, &p, &w).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn low_weight_needs_ell_one() {
        let f2 = Field::of_order(2).unwrap();
        let code = Code::explicit(Matrix::identity(&f2, 2));
        assert!(certify_list_recoverable(&code, &params((1, 2), 2, 2, false), Strategy::LowWeight, 100).is_err());
    }

    #[test]
    fn lazy_subsets_match_the_eager_list() {
        for n in 0..6 {
            for k in 0..=n + 1 {
                assert_eq!(Subsets::new(n, k).collect::<Vec<_>>(), crate::subspace::combinations(n, k));
            }
        }
    }
}
