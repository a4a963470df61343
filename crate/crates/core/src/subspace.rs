//! Subspaces of `F_q^b` in canonical form, and enumeration of the subspace lattice.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::field::{Elem, Field};
use crate::matrix::Matrix;

/// A linear subspace of `F_q^b`, stored as the RREF of a basis with no zero rows.
///
/// Two values are equal exactly when their bases are equal, so derived hashing
/// and ordering are canonical.
#[derive(Clone, PartialEq, Eq)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    pub fn zero(field: &Field, b: usize) -> Self {
        Subspace { basis: Matrix::zeros(field, 0, b) }
    }

    pub fn full(field: &Field, b: usize) -> Self {
        Subspace { basis: Matrix::identity(field, b) }
    }

    /// Span of the rows of `m`.
    pub fn span(m: &Matrix) -> Self {
        let r = m.rref();
        let keep: Vec<usize> = (0..r.rank).collect();
        Subspace { basis: r.matrix.select_rows(&keep) }
    }

    pub fn from_generators(field: &Field, b: usize, rows: &[Vec<Elem>]) -> Result<Self> {
        Ok(Self::span(&Matrix::from_rows(field, b, rows)?))
    }

    /// The subspace cut out by `constraints * x^T = 0`.
    pub fn from_constraints(constraints: &Matrix) -> Self {
        Self::span(&constraints.kernel())
    }

    /// The span of the all-ones vector.
    pub fn diagonal(field: &Field, b: usize) -> Self {
        Self::span(&Matrix::from_raw(field, 1, b, vec![1; b]))
    }

    /// Vectors that are constant on each block of a partition of `0..b`.
    /// `labels[j]` names the block of coordinate `j`.
    pub fn constant_on_blocks(field: &Field, labels: &[usize]) -> Self {
        let b = labels.len();
        let blocks = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut m = Matrix::zeros(field, blocks, b);
        for (j, &l) in labels.iter().enumerate() {
            m.set(l, j, 1);
        }
        Self::span(&m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.rows()
    }
    #[inline]
    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }
    #[inline]
    pub fn field(&self) -> &Field {
        self.basis.field()
    }
    /// RREF basis, `dim x b`.
    #[inline]
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }
    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient()
    }

    fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.dim()).map(move |i| self.basis.row(i).iter().position(|&x| x != 0).unwrap())
    }

    fn compatible(&self, other: &Subspace) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        if self.ambient() != other.ambient() {
            return Err(Error::DimensionMismatch(format!(
                "subspaces of F^{} and F^{}",
                self.ambient(),
                other.ambient()
            )));
        }
        Ok(())
    }

    /// Coefficients of `v` in the RREF basis, or `None` when `v` is outside.
    pub fn coordinates(&self, v: &[Elem]) -> Option<Vec<Elem>> {
        assert_eq!(v.len(), self.ambient());
        let coeffs: Vec<Elem> = self.pivots().map(|p| v[p]).collect();
        (self.basis.left_mul_vec(&coeffs) == v).then_some(coeffs)
    }

    pub fn contains(&self, v: &[Elem]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.compatible(other)?;
        Ok(Self::span(&self.basis.vstack(&other.basis)?))
    }

    /// `U ∩ W` from the left kernel of the stacked bases: `(a, c)` with
    /// `a B_U = c B_W` gives the element `a B_U`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.compatible(other)?;
        let f = self.field();
        let mut neg = other.basis.clone();
        for i in 0..neg.rows() {
            for j in 0..neg.cols() {
                neg.set(i, j, f.neg(neg.get(i, j)));
            }
        }
        let stacked = self.basis.vstack(&neg)?;
        let lk = stacked.left_kernel();
        let d = self.dim();
        let a = lk.select_columns(&(0..d).collect::<Vec<_>>());
        Ok(Self::span(&a.mul(&self.basis)?))
    }

    /// `dim(U ∩ W) = dim U + dim W - dim(U + W)`.
    pub fn intersection_dim(&self, other: &Subspace) -> usize {
        debug_assert!(self.compatible(other).is_ok());
        if self.is_zero() || other.is_zero() {
            return 0;
        }
        if self.is_full() {
            return other.dim();
        }
        if other.is_full() {
            return self.dim();
        }
        let s = self.basis.vstack(&other.basis).expect("compatible subspaces").rank();
        self.dim() + other.dim() - s
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.intersection_dim(other) == self.dim()
    }

    /// True when no hyperplane `x_i = x_j` (`i < j`) contains the subspace. For
    /// `b = 1` there are no pairs, so every subspace qualifies.
    pub fn is_distinct_type(&self) -> bool {
        let b = self.ambient();
        (0..b).all(|i| {
            (i + 1..b).all(|j| (0..self.dim()).any(|r| self.basis.get(r, i) != self.basis.get(r, j)))
        })
    }

    /// Rows spanning the annihilator `{a : a . v = 0 for all v in U}`.
    /// The matrix has `b - dim U` rows and kernel exactly `U`.
    pub fn annihilator(&self) -> Matrix {
        self.basis.kernel()
    }

    /// Every element, in message-lexicographic order of the RREF coefficients.
    pub fn elements(&self, cap: u128) -> Result<Vec<Vec<Elem>>> {
        let q = u128::from(self.field().order());
        let needed = q.checked_pow(self.dim() as u32).unwrap_or(u128::MAX);
        if needed > cap {
            return Err(Error::cap("subspace elements", needed, cap));
        }
        Ok(crate::matrix::row_span(&self.basis))
    }

    /// Image of a subspace of `F_q^{dim U}` under the coordinate map of `U`.
    pub fn lift(&self, coords: &Subspace) -> Result<Subspace> {
        if coords.ambient() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "coordinate subspace of F^{} lifted through a {}-dimensional space",
                coords.ambient(),
                self.dim()
            )));
        }
        Ok(Self::span(&coords.basis.mul(&self.basis)?))
    }

    /// Image under the linear map `x -> x M^T`, i.e. rows `M v` for `v` in the space.
    pub fn image(&self, m: &Matrix) -> Result<Subspace> {
        Ok(Self::span(&self.basis.mul(&m.transpose())?))
    }
}

impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.ambient(), self.dim())
            .cmp(&(other.ambient(), other.dim()))
            .then_with(|| self.basis.data().cmp(other.basis.data()))
    }
}
impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl core::hash::Hash for Subspace {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.ambient().hash(state);
        self.basis.data().hash(state);
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "span{{")?;
        for i in 0..self.dim() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:?}", self.basis.row(i))?;
        }
        write!(f, "}} <= F^{}", self.ambient())
    }
}

/// Gaussian binomial `[n choose k]_q`, saturating at `u128::MAX`.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    // [n, k] = [n-1, k-1] + q^k [n-1, k]
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for m in 1..=n {
        for j in (1..=k.min(m)).rev() {
            let qj = u128::from(q).checked_pow(j as u32).unwrap_or(u128::MAX);
            row[j] = row[j - 1].saturating_add(qj.saturating_mul(row[j]));
        }
    }
    row[k]
}

/// Number of subspaces of `F_q^b`.
pub fn count_subspaces(q: u64, b: usize) -> u128 {
    (0..=b).fold(0u128, |acc, k| acc.saturating_add(gaussian_binomial(b, k, q)))
}

/// Every subspace of `F_q^b` (optionally of one dimension), ordered by
/// dimension and then lexicographically by RREF entries.
pub fn enumerate_subspaces(
    field: &Field,
    b: usize,
    dim_filter: Option<usize>,
    cap: u128,
) -> Result<Vec<Subspace>> {
    let q = u64::from(field.order());
    let dims: Vec<usize> = match dim_filter {
        Some(d) if d > b => return Ok(Vec::new()),
        Some(d) => vec![d],
        None => (0..=b).collect(),
    };
    let needed = dims
        .iter()
        .fold(0u128, |acc, &d| acc.saturating_add(gaussian_binomial(b, d, q)));
    if needed > cap {
        return Err(Error::cap("subspace enumeration", needed, cap));
    }
    let mut out = Vec::with_capacity(needed as usize);
    for d in dims {
        let start = out.len();
        for pivots in combinations(b, d) {
            // free slots: entries right of a row's pivot that are not pivot columns
            let mut slots = Vec::new();
            for (i, &p) in pivots.iter().enumerate() {
                for j in p + 1..b {
                    if !pivots.contains(&j) {
                        slots.push(i * b + j);
                    }
                }
            }
            let mut template = vec![0u32; d * b];
            for (i, &p) in pivots.iter().enumerate() {
                template[i * b + p] = 1;
            }
            let mut digits = vec![0u32; slots.len()];
            loop {
                let mut data = template.clone();
                for (s, &v) in slots.iter().zip(&digits) {
                    data[*s] = v;
                }
                out.push(Subspace { basis: Matrix::from_raw(field, d, b, data) });
                if !increment(&mut digits, field.order()) {
                    break;
                }
            }
        }
        out[start..].sort();
    }
    Ok(out)
}

/// All subspaces of `U` (or only the proper ones), enumerated in `U`'s own
/// coordinates and lifted back, so the cost depends on `dim U` only.
pub fn enumerate_subspaces_of(u: &Subspace, proper: bool, cap: u128) -> Result<Vec<Subspace>> {
    let coords = enumerate_subspaces(u.field(), u.dim(), None, cap)?;
    let mut out = Vec::with_capacity(coords.len());
    for c in &coords {
        if proper && c.dim() == u.dim() {
            continue;
        }
        out.push(u.lift(c)?);
    }
    Ok(out)
}

/// Lexicographic `k`-subsets of `0..n`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if c[i] < n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Little-endian odometer over `0..base`. Returns false after the last value.
pub(crate) fn increment(digits: &mut [u32], base: u32) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Big-endian odometer: the last digit moves fastest.
pub(crate) fn increment_lex(digits: &mut [u32], base: u32) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::row_span;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn f(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    fn sp(q: u64, b: usize, rows: &[&[u32]]) -> Subspace {
        let rows: Vec<Vec<u32>> = rows.iter().map(|r| r.to_vec()).collect();
        Subspace::from_generators(&f(q), b, &rows).unwrap()
    }

    fn element_set(u: &Subspace) -> BTreeSet<Vec<u32>> {
        u.elements(u128::MAX).unwrap().into_iter().collect()
    }

    #[test]
    fn axes_meet_in_zero_and_sum_to_everything() {
        let x = sp(2, 2, &[&[1, 0]]);
        let y = sp(2, 2, &[&[0, 1]]);
        assert!(x.intersect(&y).unwrap().is_zero());
        assert!(x.sum(&y).unwrap().is_full());
        assert_eq!(x.intersect(&x).unwrap(), x);
        assert_eq!(x.sum(&Subspace::zero(&f(2), 2)).unwrap(), x);
    }

    #[test]
    fn lattice_sizes() {
        assert_eq!(enumerate_subspaces(&f(2), 2, None, 100).unwrap().len(), 5);
        assert_eq!(enumerate_subspaces(&f(2), 3, None, 100).unwrap().len(), 16);
        assert_eq!(enumerate_subspaces(&f(3), 1, None, 100).unwrap().len(), 2);
        assert_eq!(enumerate_subspaces(&f(2), 4, None, 100).unwrap().len(), 67);
        assert!(matches!(
            enumerate_subspaces(&f(2), 4, None, 10),
            Err(Error::CapExceeded { needed: 67, .. })
        ));
    }

    #[test]
    fn lattice_sizes_match_gaussian_binomials() {
        for q in [2u64, 3, 4] {
            for b in 0..=4 {
                let all = enumerate_subspaces(&f(q), b, None, u128::MAX).unwrap();
                assert_eq!(all.len() as u128, count_subspaces(q, b));
                let distinct: BTreeSet<Subspace> = all.iter().cloned().collect();
                assert_eq!(distinct.len(), all.len());
                assert!(all.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn lattice_by_grouping_all_small_matrices() {
        // every 2x2 matrix over F_2 spans some subspace; group by span
        let f2 = f(2);
        let mut spans = BTreeSet::new();
        for code in 0..16u32 {
            let data = (0..4).map(|i| (code >> i) & 1).collect();
            let m = Matrix::from_vec(&f2, 2, 2, data).unwrap();
            spans.insert(row_span(&m).into_iter().collect::<BTreeSet<_>>());
        }
        assert_eq!(spans.len(), 5);
    }

    #[test]
    fn proper_subspaces_of() {
        let line = sp(2, 3, &[&[1, 1, 0]]);
        let sub = enumerate_subspaces_of(&line, true, 100).unwrap();
        assert_eq!(sub, vec![Subspace::zero(&f(2), 3)]);
        assert_eq!(enumerate_subspaces_of(&Subspace::full(&f(2), 2), true, 100).unwrap().len(), 4);
        let plane = sp(3, 4, &[&[1, 2, 0, 1], &[0, 1, 1, 1]]);
        let sub = enumerate_subspaces_of(&plane, true, 100).unwrap();
        assert_eq!(sub.len(), 5);
        assert!(sub.iter().all(|w| w.is_subspace_of(&plane) && w.dim() < 2));
    }

    #[test]
    fn distinct_type_examples() {
        assert!(Subspace::full(&f(2), 2).is_distinct_type());
        assert!(!sp(2, 2, &[&[1, 1]]).is_distinct_type());
        assert!(!Subspace::zero(&f(2), 3).is_distinct_type());
        assert!(Subspace::zero(&f(2), 1).is_distinct_type());
    }

    #[test]
    fn distinct_type_matches_pairwise_element_search() {
        for (q, b) in [(2u64, 2usize), (2, 3), (3, 3), (4, 3), (3, 4), (5, 3)] {
            let all = enumerate_subspaces(&f(q), b, None, u128::MAX).unwrap();
            for u in all {
                let elems = u.elements(100_000).unwrap();
                let per_pair = (0..b).all(|i| (i + 1..b).all(|j| elems.iter().any(|v| v[i] != v[j])));
                assert_eq!(u.is_distinct_type(), per_pair, "{u:?}");
                // a single separating element exists once q exceeds the number of pairs
                if q as usize > b * (b - 1) / 2 {
                    let single = elems.iter().any(|v| (0..b).all(|i| (i + 1..b).all(|j| v[i] != v[j])));
                    assert_eq!(u.is_distinct_type(), single, "{u:?}");
                }
            }
        }
    }

    #[test]
    fn small_fields_can_be_covered_by_the_pair_hyperplanes() {
        // F_2^3 separates every pair, yet no binary vector has three distinct entries
        let full = Subspace::full(&f(2), 3);
        assert!(full.is_distinct_type());
        let elems = full.elements(100).unwrap();
        assert!(!elems.iter().any(|v| v[0] != v[1] && v[0] != v[2] && v[1] != v[2]));
    }

    #[test]
    fn annihilator_has_kernel_u() {
        let u = sp(3, 4, &[&[1, 2, 0, 1]]);
        let a = u.annihilator();
        assert_eq!(a.rows(), 3);
        assert_eq!(Subspace::from_constraints(&a), u);
        assert_eq!(Subspace::full(&f(3), 2).annihilator().rows(), 0);
    }

    #[test]
    fn constant_on_blocks() {
        let e = Subspace::constant_on_blocks(&f(2), &[0, 1, 0]);
        assert_eq!(e, sp(2, 3, &[&[1, 0, 1], &[0, 1, 0]]));
        assert_eq!(Subspace::constant_on_blocks(&f(2), &[0, 0]), Subspace::diagonal(&f(2), 2));
    }

    #[test]
    fn gaussian_binomials() {
        assert_eq!(gaussian_binomial(4, 2, 2), 35);
        assert_eq!(gaussian_binomial(3, 1, 2), 7);
        assert_eq!(gaussian_binomial(2, 1, 3), 4);
        assert_eq!(count_subspaces(2, 4), 67);
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }

    fn arb_subspace(q: u64, b: usize) -> impl Strategy<Value = Subspace> {
        (0..=b).prop_flat_map(move |r| {
            proptest::collection::vec(0..q as u32, r * b).prop_map(move |d| {
                Subspace::span(&Matrix::from_vec(&f(q), r, b, d).unwrap())
            })
        })
    }

    proptest! {
        #[test]
        fn intersection_matches_membership_filter(u in arb_subspace(3, 4), w in arb_subspace(3, 4)) {
            let expected: BTreeSet<Vec<u32>> =
                element_set(&u).into_iter().filter(|v| w.contains(v)).collect();
            let cap = u.intersect(&w).unwrap();
            prop_assert_eq!(element_set(&cap), expected);
            prop_assert_eq!(cap.dim(), u.intersection_dim(&w));
            let s = u.sum(&w).unwrap();
            prop_assert_eq!(s.dim() + cap.dim(), u.dim() + w.dim());
        }

        #[test]
        fn lattice_laws(u in arb_subspace(2, 4), v in arb_subspace(2, 4), w in arb_subspace(2, 4)) {
            prop_assert_eq!(u.intersect(&v).unwrap(), v.intersect(&u).unwrap());
            prop_assert_eq!(u.sum(&v).unwrap(), v.sum(&u).unwrap());
            prop_assert_eq!(
                u.intersect(&v).unwrap().intersect(&w).unwrap(),
                u.intersect(&v.intersect(&w).unwrap()).unwrap()
            );
            prop_assert_eq!(
                u.sum(&v).unwrap().sum(&w).unwrap(),
                u.sum(&v.sum(&w).unwrap()).unwrap()
            );
            prop_assert_eq!(u.intersect(&u.sum(&w).unwrap()).unwrap(), u.clone());
            // modular law with W' = W ∩ U ⊆ U: U ∩ (V + W') = (U ∩ V) + W'
            let wp = w.intersect(&u).unwrap();
            prop_assert_eq!(
                u.intersect(&v.sum(&wp).unwrap()).unwrap(),
                u.intersect(&v).unwrap().sum(&wp).unwrap()
            );
        }

        #[test]
        fn lifted_subspaces_stay_inside(u in arb_subspace(3, 3)) {
            let subs = enumerate_subspaces_of(&u, false, 1000).unwrap();
            prop_assert_eq!(subs.len() as u128, count_subspaces(3, u.dim()));
            prop_assert!(subs.iter().all(|w| w.is_subspace_of(&u)));
            let distinct: BTreeSet<Subspace> = subs.into_iter().collect();
            prop_assert_eq!(distinct.len() as u128, count_subspaces(3, u.dim()));
        }
    }
}
