//! List-recovery profile families.
//!
//! A profile in the family is described, coordinate by coordinate, by the
//! partition `σ_i` of `[L+1]` whose blocks are the classes of `∼_i` restricted
//! to the active set `A_i = {r : i ∈ I_r}`, with inactive indices as
//! singletons. Then `V_i = E_{σ_i}`, the vectors constant on every block.
//! Distinct partitions give distinct spaces, so enumerating feasible partition
//! sequences enumerates the family without repetition.
//!
//! A sequence is feasible when active sets can be chosen so that:
//! - every non-singleton block of `σ_i` is active (write `M_i` for their union),
//! - `∼_i` has at most `ℓ` classes on `A_i`, so at most `ℓ - nb_i` singleton
//!   indices may be active, where `nb_i` counts non-singleton blocks,
//! - plain variant: every `r` is active in at least `(1-ρ)n` coordinates,
//! - average variant: the active sets have total size at least `(L+1)(1-ρ)n`.
//!
//! The plain condition is a bipartite supply/demand problem, solved by max flow.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;
use crate::profile::Profile;
use crate::rational::{scale_to_integer, Rational};
use crate::subspace::{combinations, Subspace};

/// `(ρ, ℓ, L)` list-recovery parameters; `ℓ = 1` is list decoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoveryParams {
    pub rho: Rational,
    pub ell: usize,
    pub list_size: usize,
    pub average_weight: bool,
}

impl RecoveryParams {
    pub fn new(rho: Rational, ell: usize, list_size: usize, average_weight: bool) -> Result<Self> {
        if rho.is_negative() || rho > Rational::one() {
            return Err(Error::InvalidParameter(format!("rho = {rho} is outside [0, 1]")));
        }
        if ell == 0 || list_size == 0 {
            return Err(Error::InvalidParameter("ell and L must be positive".into()));
        }
        Ok(RecoveryParams { rho, ell, list_size, average_weight })
    }

    /// Number of words in a witness, `L + 1`.
    pub fn b(&self) -> usize {
        self.list_size + 1
    }

    /// `ℓ >= L + 1` makes every code trivially recovery-clustered.
    pub fn is_degenerate(&self) -> bool {
        self.ell > self.list_size
    }

    /// `ρn`, which must be an integer.
    pub fn radius(&self, n: usize) -> Result<usize> {
        scale_to_integer(&self.rho, n)
            .map(|r| r as usize)
            .ok_or_else(|| Error::InvalidParameter(format!("rho * n = {} * {n} is not an integer", self.rho)))
    }

    /// Minimum active count per index, `(1-ρ)n`.
    pub fn min_active(&self, n: usize) -> Result<usize> {
        Ok(n - self.radius(n)?)
    }

    /// `max(((1-ρ)(L+1) - ℓ) / L, 0)`, the exact threshold of the family when
    /// the divisibility condition holds. For `ℓ = 1` this is `1 - ρ(1 + 1/L)`.
    pub fn closed_form_threshold(&self) -> Rational {
        let l = Rational::from_integer(BigInt::from(self.list_size));
        let v = ((Rational::one() - &self.rho) * (l.clone() + Rational::one())
            - Rational::from_integer(BigInt::from(self.ell)))
            / l;
        if v.is_negative() {
            Rational::zero()
        } else {
            v
        }
    }
}

/// A partition of `0..b` as a restricted growth string: `labels[0] = 0` and
/// each label is at most one more than every earlier label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EquivRelation {
    labels: Vec<usize>,
}

impl EquivRelation {
    /// Canonicalizes arbitrary block names.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut map: Vec<(usize, usize)> = Vec::new();
        let labels = raw
            .iter()
            .map(|&x| match map.iter().find(|(k, _)| *k == x) {
                Some(&(_, v)) => v,
                None => {
                    map.push((x, map.len()));
                    map.len() - 1
                }
            })
            .collect();
        EquivRelation { labels }
    }

    pub fn from_blocks(b: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        let mut raw = vec![usize::MAX; b];
        for (k, blk) in blocks.iter().enumerate() {
            if blk.is_empty() {
                return Err(Error::InvalidParameter("empty block".into()));
            }
            for &x in blk {
                if x >= b || raw[x] != usize::MAX {
                    return Err(Error::InvalidParameter(format!(
                        "blocks do not partition 0..{b}"
                    )));
                }
                raw[x] = k;
            }
        }
        if raw.contains(&usize::MAX) {
            return Err(Error::InvalidParameter(format!("blocks do not cover 0..{b}")));
        }
        Ok(Self::from_labels(&raw))
    }

    pub fn discrete(b: usize) -> Self {
        EquivRelation { labels: (0..b).collect() }
    }

    pub fn full(b: usize) -> Self {
        EquivRelation { labels: vec![0; b] }
    }

    /// One block `z`, everything else singletons.
    pub fn merging(b: usize, z: &[usize]) -> Self {
        let raw: Vec<usize> = (0..b).map(|j| if z.contains(&j) { b } else { j }).collect();
        Self::from_labels(&raw)
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
    pub fn related(&self, r: usize, s: usize) -> bool {
        self.labels[r] == self.labels[s]
    }
    pub fn num_blocks(&self) -> usize {
        self.labels.iter().copied().max().map_or(0, |m| m + 1)
    }
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_blocks()];
        for (j, &l) in self.labels.iter().enumerate() {
            out[l].push(j);
        }
        out
    }

    /// Restriction to `active`, with every inactive index made a singleton.
    pub fn restrict(&self, active: &[bool]) -> Self {
        let b = self.size();
        let raw: Vec<usize> = (0..b)
            .map(|j| if active[j] { self.labels[j] } else { b + j })
            .collect();
        Self::from_labels(&raw)
    }

    /// `E_∼`: vectors constant on every block.
    pub fn space(&self, field: &Field) -> Subspace {
        Subspace::constant_on_blocks(field, &self.labels)
    }

    fn non_singleton(&self) -> (usize, Vec<bool>) {
        let blocks = self.blocks();
        let mut covered = vec![false; self.size()];
        let mut nb = 0;
        for blk in blocks.iter().filter(|b| b.len() > 1) {
            nb += 1;
            for &j in blk {
                covered[j] = true;
            }
        }
        (nb, covered)
    }

    /// Every partition of `0..b`, in lexicographic order of growth strings.
    pub fn all(b: usize) -> Vec<EquivRelation> {
        let mut out = Vec::new();
        if b == 0 {
            out.push(EquivRelation { labels: Vec::new() });
            return out;
        }
        let mut labels = vec![0usize; b];
        loop {
            out.push(EquivRelation { labels: labels.clone() });
            // advance the rightmost position that can grow
            let mut j = b - 1;
            loop {
                if j == 0 {
                    return out;
                }
                let max_before = labels[..j].iter().copied().max().unwrap();
                if labels[j] <= max_before {
                    labels[j] += 1;
                    for x in labels[j + 1..].iter_mut() {
                        *x = 0;
                    }
                    break;
                }
                j -= 1;
            }
        }
    }
}

/// `V^{I,∼}`: at coordinate `i`, `x_r = x_s` for every active pair `r ∼_i s`.
/// Sets in `active_sets` are 0-based coordinate lists, one per index `r`.
pub fn build_lr_profile(
    field: &Field,
    n: usize,
    active_sets: &[Vec<usize>],
    sims: &[EquivRelation],
    params: &RecoveryParams,
) -> Result<Profile> {
    let b = params.b();
    if active_sets.len() != b || sims.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected {b} coordinate sets and {n} relations, got {} and {}",
            active_sets.len(),
            sims.len()
        )));
    }
    let m = params.min_active(n)?;
    let mut active = vec![vec![false; b]; n];
    for (r, set) in active_sets.iter().enumerate() {
        for &i in set {
            if i >= n {
                return Err(Error::InvalidParameter(format!("coordinate {i} out of 0..{n}")));
            }
            active[i][r] = true;
        }
    }
    let sizes: Vec<usize> = (0..b).map(|r| (0..n).filter(|&i| active[i][r]).count()).collect();
    if params.average_weight {
        if sizes.iter().sum::<usize>() < b * m {
            return Err(Error::InvalidParameter(format!(
                "active sets have total size {}, need {}",
                sizes.iter().sum::<usize>(),
                b * m
            )));
        }
    } else if let Some(r) = (0..b).find(|&r| sizes[r] < m) {
        return Err(Error::InvalidParameter(format!(
            "set {r} has {} coordinates, need at least {m}",
            sizes[r]
        )));
    }
    let mut spaces = Vec::with_capacity(n);
    for (i, sim) in sims.iter().enumerate() {
        if sim.size() != b {
            return Err(Error::DimensionMismatch(format!("relation on {} points, need {b}", sim.size())));
        }
        let restricted: Vec<usize> = (0..b).filter(|&r| active[i][r]).map(|r| sim.labels()[r]).collect();
        let classes = EquivRelation::from_labels(&restricted).num_blocks();
        if classes > params.ell {
            return Err(Error::InvalidParameter(format!(
                "relation at coordinate {i} has {classes} active classes, more than ell = {}",
                params.ell
            )));
        }
        // difference constraints x_r - x_s for consecutive members of each active class
        let mut rows: Vec<Vec<u32>> = Vec::new();
        for blk in sim.blocks() {
            let act: Vec<usize> = blk.into_iter().filter(|&r| active[i][r]).collect();
            for w in act.windows(2) {
                let mut row = vec![0u32; b];
                row[w[0]] = 1;
                row[w[1]] = field.neg(1);
                rows.push(row);
            }
        }
        let cons = Matrix::from_rows(field, b, &rows)?;
        spaces.push(Subspace::from_constraints(&cons));
    }
    Profile::new(&spaces)
}

/// Partitions allowed at a single coordinate: at most `ℓ` non-singleton blocks.
fn local_partitions(params: &RecoveryParams) -> Vec<EquivRelation> {
    EquivRelation::all(params.b())
        .into_iter()
        .filter(|p| p.non_singleton().0 <= params.ell)
        .collect()
}

/// Whether active sets exist that realize the partition sequence.
pub fn partition_sequence_feasible(seq: &[EquivRelation], params: &RecoveryParams) -> Result<bool> {
    let n = seq.len();
    let b = params.b();
    let m = params.min_active(n)?;
    let mut supply = Vec::with_capacity(n);
    let mut covered = Vec::with_capacity(n);
    for p in seq {
        let (nb, cov) = p.non_singleton();
        if nb > params.ell {
            return Ok(false);
        }
        supply.push(params.ell - nb);
        covered.push(cov);
    }
    if params.average_weight {
        let total: usize = (0..n)
            .map(|i| {
                let forced = covered[i].iter().filter(|&&c| c).count();
                forced + supply[i].min(b - forced)
            })
            .sum();
        return Ok(total >= b * m);
    }
    let demand: Vec<usize> = (0..b)
        .map(|r| m.saturating_sub((0..n).filter(|&i| covered[i][r]).count()))
        .collect();
    let need: usize = demand.iter().sum();
    if need == 0 {
        return Ok(true);
    }
    // source 0, coordinates 1..=n, indices n+1..=n+b, sink n+b+1
    let nodes = n + b + 2;
    let sink = n + b + 1;
    let mut g = FlowGraph::new(nodes);
    for i in 0..n {
        g.edge(0, 1 + i, supply[i]);
        for r in 0..b {
            if !covered[i][r] {
                g.edge(1 + i, 1 + n + r, 1);
            }
        }
    }
    for r in 0..b {
        g.edge(1 + n + r, sink, demand[r]);
    }
    Ok(g.max_flow(0, sink) == need)
}

/// Every profile of the family for length `n`, without repetition, in
/// lexicographic order of partition sequences.
pub fn enumerate_lr_family(field: &Field, n: usize, params: &RecoveryParams, cap: u128) -> Result<Vec<Profile>> {
    let local = local_partitions(params);
    let needed = (local.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > cap {
        return Err(Error::cap("list-recovery family", needed, cap));
    }
    params.min_active(n)?;
    let spaces: Vec<Subspace> = local.iter().map(|p| p.space(field)).collect();
    let mut idx = vec![0u32; n];
    let mut out = Vec::new();
    loop {
        // big-endian so the first coordinate varies slowest
        let seq: Vec<EquivRelation> = idx.iter().map(|&k| local[k as usize].clone()).collect();
        if partition_sequence_feasible(&seq, params)? {
            let sp: Vec<Subspace> = idx.iter().map(|&k| spaces[k as usize].clone()).collect();
            out.push(Profile::new(&sp)?);
        }
        let mut j = n;
        loop {
            if j == 0 {
                return Ok(out);
            }
            j -= 1;
            idx[j] += 1;
            if (idx[j] as usize) < local.len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// A random member of the family: partitions drawn uniformly per coordinate
/// until the sequence is feasible.
pub fn sample_lr_profile<R: Rng + ?Sized>(
    field: &Field,
    n: usize,
    params: &RecoveryParams,
    rng: &mut R,
    max_tries: usize,
) -> Result<Profile> {
    let local = local_partitions(params);
    for _ in 0..max_tries {
        let seq: Vec<EquivRelation> = (0..n).map(|_| local[rng.gen_range(0..local.len())].clone()).collect();
        if partition_sequence_feasible(&seq, params)? {
            let sp: Vec<Subspace> = seq.iter().map(|p| p.space(field)).collect();
            return Profile::new(&sp);
        }
    }
    Err(Error::cap("feasible partition sampling", max_tries as u128 + 1, max_tries as u128))
}

/// The tight instance: every `s`-subset `Z` of `[L+1]` with
/// `s = (1-ρ)(L+1) - ℓ + 1` appears `n/t` times in a row, `t = C(L+1, s)`, and
/// `V_i = E_{∼_{Z_i}}`.
pub fn build_extremal_lr_profile(field: &Field, n: usize, params: &RecoveryParams) -> Result<Profile> {
    let b = params.b();
    let s = (Rational::one() - &params.rho) * Rational::from_integer(BigInt::from(b))
        - Rational::from_integer(BigInt::from(params.ell))
        + Rational::one();
    if !s.is_integer() || !s.is_positive() || s > Rational::from_integer(BigInt::from(b)) {
        return Err(Error::InvalidParameter(format!("s = {s} is not an integer in 1..={b}")));
    }
    let s: usize = s.to_integer().try_into().expect("bounded by b");
    let subsets = combinations(b, s);
    let t = subsets.len();
    if n == 0 || n % t != 0 {
        return Err(Error::InvalidParameter(format!("n = {n} is not a positive multiple of t = {t}")));
    }
    let mut spaces = Vec::with_capacity(n);
    for z in &subsets {
        let e = EquivRelation::merging(b, z).space(field);
        spaces.extend(core::iter::repeat(e).take(n / t));
    }
    Profile::new(&spaces)
}

/// Adjacency-matrix max flow with BFS augmenting paths; graphs here are tiny.
struct FlowGraph {
    n: usize,
    cap: Vec<usize>,
}

impl FlowGraph {
    fn new(n: usize) -> Self {
        FlowGraph { n, cap: vec![0; n * n] }
    }
    fn edge(&mut self, u: usize, v: usize, c: usize) {
        self.cap[u * self.n + v] += c;
    }
    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let n = self.n;
        let mut flow = 0;
        loop {
            let mut prev = vec![usize::MAX; n];
            prev[s] = s;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for v in 0..n {
                    if prev[v] == usize::MAX && self.cap[u * n + v] > 0 {
                        prev[v] = u;
                        queue.push_back(v);
                    }
                }
            }
            if prev[t] == usize::MAX {
                return flow;
            }
            let mut bottleneck = usize::MAX;
            let mut v = t;
            while v != s {
                let u = prev[v];
                bottleneck = bottleneck.min(self.cap[u * n + v]);
                v = u;
            }
            let mut v = t;
            while v != s {
                let u = prev[v];
                self.cap[u * n + v] -= bottleneck;
                self.cap[v * n + u] += bottleneck;
                v = u;
            }
            flow += bottleneck;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::threshold_rate_family;
    use crate::rational::{int, ratio};
    use crate::DEFAULT_CAP;
    use rand::SeedableRng;

    fn f2() -> Field {
        Field::of_order(2).unwrap()
    }

    fn params(rho: Rational, ell: usize, l: usize) -> RecoveryParams {
        RecoveryParams::new(rho, ell, l, false).unwrap()
    }

    #[test]
    fn partitions_are_counted_by_bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52];
        for (b, &count) in bell.iter().enumerate() {
            assert_eq!(EquivRelation::all(b).len(), count);
        }
        assert_eq!(EquivRelation::from_labels(&[7, 3, 7]).labels(), &[0, 1, 0]);
    }

    #[test]
    fn build_examples() {
        let f = f2();
        let p = params(int(0), 1, 1);
        let all: Vec<usize> = (0..3).collect();
        let v = build_lr_profile(&f, 3, &[all.clone(), all.clone()], &vec![EquivRelation::full(2); 3], &p).unwrap();
        assert!(v.spaces().all(|s| *s == Subspace::diagonal(&f, 2)));

        let v = build_lr_profile(&f, 3, &[all.clone(), all], &vec![EquivRelation::discrete(2); 3], &params(int(0), 2, 1))
            .unwrap();
        assert!(v.spaces().all(|s| s.is_full()));

        let p = params(ratio(1, 2), 1, 1);
        let v = build_lr_profile(
            &f,
            2,
            &[vec![0, 1], vec![0]],
            &[EquivRelation::full(2), EquivRelation::discrete(2)],
            &p,
        );
        // only index 0 is active at the second coordinate, so ∼_2 has one active class
        let v = v.unwrap();
        assert_eq!(v.space(0), &Subspace::diagonal(&f, 2));
        assert!(v.space(1).is_full());
    }

    #[test]
    fn build_rejects_small_sets_and_large_relations() {
        let f = f2();
        let p = params(int(0), 1, 1);
        assert!(build_lr_profile(&f, 2, &[vec![0], vec![0, 1]], &vec![EquivRelation::full(2); 2], &p).is_err());
        assert!(build_lr_profile(&f, 2, &[vec![0, 1], vec![0, 1]], &vec![EquivRelation::discrete(2); 2], &p).is_err());
    }

    #[test]
    fn rho_zero_list_decoding_family_is_the_diagonal() {
        let fam = enumerate_lr_family(&f2(), 2, &params(int(0), 1, 1), DEFAULT_CAP).unwrap();
        assert_eq!(fam.len(), 1);
        assert!(fam[0].spaces().all(|s| *s == Subspace::diagonal(&f2(), 2)));
    }

    #[test]
    fn rho_one_family_contains_the_free_profile() {
        let p = params(int(1), 1, 2);
        let fam = enumerate_lr_family(&f2(), 3, &p, DEFAULT_CAP).unwrap();
        assert!(fam.iter().any(|v| v.spaces().all(|s| s.is_full())));
        assert_eq!(threshold_rate_family(&fam, DEFAULT_CAP).unwrap().0.rate, int(0));
    }

    #[test]
    fn extremal_instances() {
        let f = f2();
        let p = params(ratio(1, 2), 1, 3);
        let v = build_extremal_lr_profile(&f, 6, &p).unwrap();
        assert_eq!(v.classes().count(), 6);
        assert!(v.spaces().all(|s| s.dim() == 3));
        assert_eq!(v.threshold_rate_v(DEFAULT_CAP).unwrap().rate, ratio(1, 3));
        assert_eq!(p.closed_form_threshold(), ratio(1, 3));

        let v = build_extremal_lr_profile(&f, 3, &params(int(0), 1, 1)).unwrap();
        assert!(v.spaces().all(|s| *s == Subspace::diagonal(&f, 2)));

        assert!(build_extremal_lr_profile(&f, 5, &p).is_err());
        assert!(build_extremal_lr_profile(&f, 6, &params(ratio(1, 3), 1, 3)).is_err());
    }

    #[test]
    fn extremal_threshold_follows_the_closed_form_for_larger_lists() {
        // ℓ = 2, L = 3, ρ = 0: s = 3, t = 4
        let p = params(int(0), 2, 3);
        let v = build_extremal_lr_profile(&f2(), 4, &p).unwrap();
        assert_eq!(v.threshold_rate_v(DEFAULT_CAP).unwrap().rate, ratio(2, 3));
        assert_eq!(p.closed_form_threshold(), ratio(2, 3));
    }

    #[test]
    fn sampled_profiles_respect_the_lower_bound() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let p = params(ratio(1, 2), 1, 3);
        for _ in 0..10 {
            let v = sample_lr_profile(&f2(), 6, &p, &mut rng, 10_000).unwrap();
            assert!(v.threshold_rate_v(DEFAULT_CAP).unwrap().rate >= p.closed_form_threshold());
        }
    }

    #[test]
    fn flow_feasibility_handles_supply_limits() {
        // n = 2, L = 1, ℓ = 1, ρ = 0: discrete partitions force both indices active
        // at both coordinates, which needs two active classes
        let p = params(int(0), 1, 1);
        let seq = vec![EquivRelation::discrete(2); 2];
        assert!(!partition_sequence_feasible(&seq, &p).unwrap());
        let p = params(ratio(1, 2), 1, 1);
        assert!(partition_sequence_feasible(&seq, &p).unwrap());
    }
}
