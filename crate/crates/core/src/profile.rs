//! Local profiles, the degree function and exact threshold rates.
//!
//! For a profile `V = (V_1, ..., V_n)` of subspaces of `F_q^b` write
//! `S(U) = sum_i dim(V_i ∩ U)`. Then
//!
//! ```text
//! deg(V, U, R) = S(U) - (1 - R) n dim U
//! R_{V,U}      = max_{W ⊊ U} 1 - (S(U) - S(W)) / (n (dim U - dim W))
//! R_V          = min_{U ∈ L_distinct} R_{V,U}
//! ```
//!
//! Everything is computed with integers and exact rationals.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::rational::Rational;
use crate::subspace::{enumerate_subspaces, enumerate_subspaces_of, Subspace};

/// A `b`-local profile, run-length encoded: each distinct space is stored once.
#[derive(Clone, Debug)]
pub struct Profile {
    field: Field,
    b: usize,
    classes: Vec<Subspace>,
    mult: Vec<usize>,
    coords: Vec<usize>,
}

impl Profile {
    pub fn new(spaces: &[Subspace]) -> Result<Self> {
        let first = spaces.first().ok_or_else(|| {
            Error::InvalidParameter("a profile needs at least one coordinate".into())
        })?;
        let field = first.field().clone();
        let b = first.ambient();
        let mut classes: Vec<Subspace> = Vec::new();
        let mut mult = Vec::new();
        let mut coords = Vec::with_capacity(spaces.len());
        let mut index: BTreeMap<&Subspace, usize> = BTreeMap::new();
        for s in spaces {
            if s.field() != &field {
                return Err(Error::FieldMismatch);
            }
            if s.ambient() != b {
                return Err(Error::DimensionMismatch(format!(
                    "profile mixes ambient dimensions {b} and {}",
                    s.ambient()
                )));
            }
            let c = *index.entry(s).or_insert_with(|| {
                classes.push(s.clone());
                mult.push(0);
                classes.len() - 1
            });
            mult[c] += 1;
            coords.push(c);
        }
        Ok(Profile { field, b, classes, mult, coords })
    }

    /// Builds from `(space, multiplicity)` runs laid out in coordinate order.
    pub fn from_runs(runs: &[(Subspace, usize)]) -> Result<Self> {
        let mut spaces = Vec::new();
        for (s, m) in runs {
            spaces.extend(core::iter::repeat(s.clone()).take(*m));
        }
        Self::new(&spaces)
    }

    /// The same space at every coordinate.
    pub fn constant(space: &Subspace, n: usize) -> Result<Self> {
        Self::from_runs(&[(space.clone(), n)])
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.coords.len()
    }
    #[inline]
    pub fn b(&self) -> usize {
        self.b
    }
    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn space(&self, i: usize) -> &Subspace {
        &self.classes[self.coords[i]]
    }
    pub fn spaces(&self) -> impl Iterator<Item = &Subspace> + '_ {
        self.coords.iter().map(move |&c| &self.classes[c])
    }
    /// Distinct spaces in order of first appearance, with multiplicities.
    pub fn classes(&self) -> impl Iterator<Item = (&Subspace, usize)> + '_ {
        self.classes.iter().zip(self.mult.iter().copied())
    }
    /// Maximal runs of equal consecutive spaces.
    pub fn runs(&self) -> Vec<(&Subspace, usize)> {
        let mut out: Vec<(&Subspace, usize)> = Vec::new();
        for (i, &c) in self.coords.iter().enumerate() {
            match out.last_mut() {
                Some((_, m)) if i > 0 && self.coords[i - 1] == c => *m += 1,
                _ => out.push((&self.classes[c], 1)),
            }
        }
        out
    }

    fn check_ambient(&self, u: &Subspace) -> Result<()> {
        if u.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        if u.ambient() != self.b {
            return Err(Error::DimensionMismatch(format!(
                "subspace of F^{} against a {}-local profile",
                u.ambient(),
                self.b
            )));
        }
        Ok(())
    }

    /// `S(U) = sum_i dim(V_i ∩ U)`.
    pub fn constraint_dim(&self, u: &Subspace) -> Result<usize> {
        self.check_ambient(u)?;
        Ok(self.constraint_dim_unchecked(u))
    }

    fn constraint_dim_unchecked(&self, u: &Subspace) -> usize {
        self.classes
            .iter()
            .zip(&self.mult)
            .map(|(v, &m)| m * v.intersection_dim(u))
            .sum()
    }

    pub fn deg(&self, u: &Subspace, rate: &Rational) -> Result<Rational> {
        let s = self.constraint_dim(u)?;
        Ok(deg_from_parts(s, u.dim(), self.n(), rate))
    }

    /// `R_{V,U}` and the first maximizing `W` in enumeration order.
    pub fn threshold_rate_vu(&self, u: &Subspace, cap: u128) -> Result<(Rational, Subspace)> {
        self.check_ambient(u)?;
        if u.is_zero() {
            return Err(Error::ZeroSubspace);
        }
        let su = self.constraint_dim_unchecked(u);
        let mut best: Option<(Frac, Subspace)> = None;
        for w in enumerate_subspaces_of(u, true, cap)? {
            let sw = self.constraint_dim_unchecked(&w);
            let cand = Frac { num: (su - sw) as u128, den: (self.n() * (u.dim() - w.dim())) as u128 };
            if best.as_ref().map_or(true, |(b, _)| cand < *b) {
                best = Some((cand, w));
            }
        }
        let (frac, w) = best.expect("a nonzero space has the zero subspace below it");
        Ok((frac.one_minus(), w))
    }

    pub fn threshold_rate_v(&self, cap: u128) -> Result<Threshold> {
        ThresholdEngine::new(&self.field, self.b, cap)?.threshold(self)
    }
}

/// `S - (1 - R) n d` as an exact rational.
pub fn deg_from_parts(s: usize, dim_u: usize, n: usize, rate: &Rational) -> Rational {
    let one = Rational::one();
    Rational::from_integer(BigInt::from(s))
        - (one - rate) * Rational::from_integer(BigInt::from(n * dim_u))
}

impl PartialEq for Profile {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Profile {}

impl Ord for Profile {
    /// Lexicographic on the per-coordinate spaces.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n().cmp(&other.n()).then_with(|| self.spaces().cmp(other.spaces()))
    }
}
impl PartialOrd for Profile {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Nonnegative fraction compared by cross multiplication.
#[derive(Clone, Copy, Debug)]
struct Frac {
    num: u128,
    den: u128,
}

impl Frac {
    fn one_minus(self) -> Rational {
        Rational::new(BigInt::from(self.den) - BigInt::from(self.num), BigInt::from(self.den))
    }
}
impl PartialEq for Frac {
    fn eq(&self, o: &Self) -> bool {
        self.num * o.den == o.num * self.den
    }
}
impl PartialOrd for Frac {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some((self.num * o.den).cmp(&(o.num * self.den)))
    }
}

/// The threshold rate of a profile together with the witnessing pair: `u`
/// attains the minimum over `L_distinct` and `w ⊊ u` attains the maximum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Threshold {
    pub rate: Rational,
    pub u: Subspace,
    pub w: Subspace,
}

/// The whole lattice of `F_q^b` with, for every member, the indices of its
/// proper subspaces. Built once and reused across the profiles of a family.
pub struct ThresholdEngine {
    field: Field,
    b: usize,
    lattice: Vec<Subspace>,
    below: Vec<Vec<usize>>,
}

impl ThresholdEngine {
    pub fn new(field: &Field, b: usize, cap: u128) -> Result<Self> {
        let lattice = enumerate_subspaces(field, b, None, cap)?;
        let index: BTreeMap<&Subspace, usize> =
            lattice.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut below = Vec::with_capacity(lattice.len());
        for u in &lattice {
            let ws = enumerate_subspaces_of(u, true, cap)?;
            below.push(ws.iter().map(|w| index[w]).collect());
        }
        Ok(ThresholdEngine { field: field.clone(), b, lattice, below })
    }

    pub fn lattice(&self) -> &[Subspace] {
        &self.lattice
    }

    fn check(&self, v: &Profile) -> Result<()> {
        if v.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        if v.b() != self.b {
            return Err(Error::DimensionMismatch(format!(
                "{}-local profile against a lattice of F^{}",
                v.b(),
                self.b
            )));
        }
        Ok(())
    }

    /// `S(U)` for every lattice member, in lattice order.
    pub fn constraint_dims(&self, v: &Profile) -> Result<Vec<usize>> {
        self.check(v)?;
        Ok(self.lattice.iter().map(|u| v.constraint_dim_unchecked(u)).collect())
    }

    /// `deg(V, U, R)` for every lattice member, in lattice order.
    pub fn degrees(&self, v: &Profile, rate: &Rational) -> Result<Vec<Rational>> {
        let s = self.constraint_dims(v)?;
        Ok(self
            .lattice
            .iter()
            .zip(s)
            .map(|(u, s)| deg_from_parts(s, u.dim(), v.n(), rate))
            .collect())
    }

    /// `R_V` with ties broken by lattice order. For `b = 1` the zero space is
    /// distinct-type and the all-zero matrix lies in every code, so the
    /// threshold is 0 with `U = W = {0}`.
    pub fn threshold(&self, v: &Profile) -> Result<Threshold> {
        let s = self.constraint_dims(v)?;
        let n = v.n() as u128;
        if self.b == 1 {
            let z = self.lattice[0].clone();
            return Ok(Threshold { rate: Rational::from_integer(0.into()), u: z.clone(), w: z });
        }
        let mut best: Option<(Frac, usize, usize)> = None;
        for (ui, u) in self.lattice.iter().enumerate() {
            if u.is_zero() || !u.is_distinct_type() {
                continue;
            }
            // R_{V,U} = 1 - min_W ratio, so minimizing R_{V,U} maximizes that min.
            let mut inner: Option<(Frac, usize)> = None;
            for &wi in &self.below[ui] {
                let w = &self.lattice[wi];
                let cand = Frac {
                    num: (s[ui] - s[wi]) as u128,
                    den: n * (u.dim() - w.dim()) as u128,
                };
                if inner.as_ref().map_or(true, |(b, _)| cand < *b) {
                    inner = Some((cand, wi));
                }
            }
            let (frac, wi) = inner.expect("nonzero space");
            if best.as_ref().map_or(true, |(b, _, _)| frac > *b) {
                best = Some((frac, ui, wi));
            }
        }
        let (frac, ui, wi) = best.ok_or_else(|| {
            Error::InvalidParameter("no distinct-type subspace in the lattice".into())
        })?;
        Ok(Threshold { rate: frac.one_minus(), u: self.lattice[ui].clone(), w: self.lattice[wi].clone() })
    }
}

/// `R_P` over a finite family: the minimum threshold and the first index attaining it.
pub fn threshold_rate_family<'a, I>(family: I, cap: u128) -> Result<(Threshold, usize)>
where
    I: IntoIterator<Item = &'a Profile>,
{
    let mut engine: Option<ThresholdEngine> = None;
    let mut best: Option<(Threshold, usize)> = None;
    for (idx, v) in family.into_iter().enumerate() {
        if !engine.as_ref().is_some_and(|e| e.field == *v.field() && e.b == v.b()) {
            engine = Some(ThresholdEngine::new(v.field(), v.b(), cap)?);
        }
        let t = engine.as_ref().expect("engine just built").threshold(v)?;
        if best.as_ref().map_or(true, |(b, _)| t.rate < b.rate) {
            best = Some((t, idx));
        }
    }
    best.ok_or(Error::EmptyFamily)
}
