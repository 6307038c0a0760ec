//! Index-tuple arithmetic.
//!
//! Index sets `I(l, m)` are the strictly increasing `l`-tuples over `[m] = {1, ..., m}`.
//! They are always enumerated in lexicographic order, which fixes the row and
//! column numbering of every matrix built by this crate.
//!
//! For a symplectic space of dimension `2n` the basis indices split into the `n`
//! pairs `P_i = (i, 2n - i + 1)`. Every tuple decomposes into the complete pairs
//! it contains and a *free part* holding the remaining entries.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binomial coefficient `C(m, k)`; zero when `k > m`.
pub fn binomial(m: usize, k: usize) -> u64 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (m - k + i) as u128 / i as u128;
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

/// A strictly increasing tuple of 1-based indices.
///
/// Equality is equality of supports; the ambient bound is checked at
/// construction but not stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexTuple(Vec<usize>);

impl IndexTuple {
    /// Builds a tuple over `[m]`. Entries must already be strictly increasing.
    pub fn new(entries: Vec<usize>, m: usize) -> Result<Self> {
        if let Some(&bad) = entries.iter().find(|&&e| e == 0 || e > m) {
            return Err(Error::domain(format!("entry {bad} outside [1, {m}]")));
        }
        if entries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain(format!(
                "entries {entries:?} are not strictly increasing"
            )));
        }
        Ok(IndexTuple(entries))
    }

    /// Sorts arbitrary entries over `[m]`, returning the tuple together with the
    /// sign of the sorting permutation. Repeated entries give `None`: the
    /// corresponding exterior basis element is zero.
    pub fn from_unsorted(entries: &[usize], m: usize) -> Result<Option<(Self, i8)>> {
        if let Some(&bad) = entries.iter().find(|&&e| e == 0 || e > m) {
            return Err(Error::domain(format!("entry {bad} outside [1, {m}]")));
        }
        Ok(sort_with_sign(entries).map(|(v, s)| (IndexTuple(v), s)))
    }

    pub(crate) fn from_sorted_unchecked(entries: Vec<usize>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0] < w[1]));
        IndexTuple(entries)
    }

    pub fn empty() -> Self {
        IndexTuple(Vec::new())
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn is_subset_of(&self, other: &IndexTuple) -> bool {
        self.0.iter().all(|&x| other.contains(x))
    }

    pub fn is_disjoint_from(&self, other: &IndexTuple) -> bool {
        self.0.iter().all(|&x| !other.contains(x))
    }

    /// Sorted union of two disjoint tuples, or `None` if they overlap.
    pub fn disjoint_union(&self, other: &IndexTuple) -> Option<IndexTuple> {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => return None,
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Some(IndexTuple(out))
    }

    /// Entries of `self` not in `other`.
    pub fn difference(&self, other: &IndexTuple) -> IndexTuple {
        IndexTuple(
            self.0
                .iter()
                .copied()
                .filter(|&x| !other.contains(x))
                .collect(),
        )
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Insertion sort counting transpositions. `None` on a repeated entry.
pub(crate) fn sort_with_sign(entries: &[usize]) -> Option<(Vec<usize>, i8)> {
    let mut v = entries.to_vec();
    let mut sign = 1i8;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && v[j - 1] == v[j] {
            return None;
        }
    }
    Some((v, sign))
}

/// All of `I(l, m)` in lexicographic order.
pub fn enumerate_index_set(l: usize, m: usize) -> Result<Vec<IndexTuple>> {
    if l > m {
        return Err(Error::domain(format!(
            "cannot choose {l} indices from [{m}]"
        )));
    }
    Ok(KSubsets::new(l, m).map(IndexTuple).collect())
}

/// Lexicographic iterator over the `l`-subsets of `[m]`.
struct KSubsets {
    m: usize,
    current: Option<Vec<usize>>,
}

impl KSubsets {
    fn new(l: usize, m: usize) -> Self {
        KSubsets {
            m,
            current: (l <= m).then(|| (1..=l).collect()),
        }
    }
}

impl Iterator for KSubsets {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.take()?;
        let mut next = out.clone();
        let l = next.len();
        let mut k = l;
        while k > 0 {
            // largest value allowed at position k-1
            if next[k - 1] < self.m - (l - k) {
                next[k - 1] += 1;
                for j in k..l {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
            k -= 1;
        }
        Some(out)
    }
}

/// Position of `t` in the lexicographic order of `I(|t|, m)`.
pub fn rank_tuple(t: &IndexTuple, m: usize) -> Result<u64> {
    let l = t.len();
    if t.0.last().is_some_and(|&x| x > m) {
        return Err(Error::domain(format!("{t} is not a tuple over [{m}]")));
    }
    let mut rank = 0u64;
    let mut prev = 0usize;
    for (i, &a) in t.0.iter().enumerate() {
        for v in prev + 1..a {
            rank += binomial(m - v, l - i - 1);
        }
        prev = a;
    }
    Ok(rank)
}

/// Inverse of [`rank_tuple`].
pub fn unrank_tuple(mut rank: u64, l: usize, m: usize) -> Result<IndexTuple> {
    let total = binomial(m, l);
    if l > m || rank >= total {
        return Err(Error::domain(format!(
            "rank {rank} out of range for I({l}, {m}) of size {total}"
        )));
    }
    let mut out = Vec::with_capacity(l);
    let mut v = 1usize;
    for i in 0..l {
        loop {
            let count = binomial(m - v, l - i - 1);
            if rank < count {
                out.push(v);
                v += 1;
                break;
            }
            rank -= count;
            v += 1;
        }
    }
    Ok(IndexTuple(out))
}

/// The pair `P_i = (i, 2n - i + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairSymbol {
    pub low: usize,
    pub high: usize,
}

impl PairSymbol {
    pub fn as_tuple(&self) -> IndexTuple {
        IndexTuple(vec![self.low, self.high])
    }
}

impl fmt::Display for PairSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}=({},{})", self.low, self.low, self.high)
    }
}

/// The pair containing index `i` in dimension `2n`.
pub fn pair_of(i: usize, n: usize) -> Result<PairSymbol> {
    if i == 0 || i > 2 * n {
        return Err(Error::domain(format!("index {i} outside [1, {}]", 2 * n)));
    }
    let low = i.min(2 * n + 1 - i);
    Ok(PairSymbol {
        low,
        high: 2 * n + 1 - low,
    })
}

/// All pairs `P_1, ..., P_n`.
pub fn all_pairs(n: usize) -> Vec<PairSymbol> {
    (1..=n)
        .map(|low| PairSymbol {
            low,
            high: 2 * n + 1 - low,
        })
        .collect()
}

/// A tuple split into its complete pairs and its free remainder.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FreePartLabel {
    pub free: IndexTuple,
    pub pairs: Vec<PairSymbol>,
}

impl FreePartLabel {
    /// Rebuilds the support the label was taken from.
    pub fn reconstruct(&self) -> IndexTuple {
        let mut v = self.free.0.clone();
        for p in &self.pairs {
            v.push(p.low);
            v.push(p.high);
        }
        v.sort_unstable();
        IndexTuple(v)
    }

    /// Pairs neither contained in the tuple nor touched by its free part.
    pub fn available_pairs(&self, n: usize) -> Vec<PairSymbol> {
        all_pairs(n)
            .into_iter()
            .filter(|p| !self.pairs.contains(p))
            .filter(|p| !self.free.contains(p.low) && !self.free.contains(p.high))
            .collect()
    }
}

/// Splits `alpha` (a tuple over `[2n]`) into complete pairs and free entries.
pub fn free_pair_decomposition(alpha: &IndexTuple, n: usize) -> FreePartLabel {
    let m = 2 * n + 1;
    let mut free = Vec::new();
    let mut pairs = Vec::new();
    for &a in &alpha.0 {
        let partner = m - a;
        if alpha.contains(partner) {
            if a < partner {
                pairs.push(PairSymbol {
                    low: a,
                    high: partner,
                });
            }
        } else {
            free.push(a);
        }
    }
    FreePartLabel {
        free: IndexTuple(free),
        pairs,
    }
}

/// Groups `I(n-2, 2n)` by free part. Within a class only the pairs vary.
pub fn partition_rows(n: usize) -> Result<BTreeMap<IndexTuple, Vec<IndexTuple>>> {
    if n < 2 {
        return Err(Error::domain(format!(
            "row partition needs n >= 2, got {n}"
        )));
    }
    let mut classes: BTreeMap<IndexTuple, Vec<IndexTuple>> = BTreeMap::new();
    for alpha in enumerate_index_set(n - 2, 2 * n)? {
        let label = free_pair_decomposition(&alpha, n);
        classes.entry(label.free).or_default().push(alpha);
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(v: &[usize]) -> IndexTuple {
        IndexTuple(v.to_vec())
    }

    #[test]
    fn enumerate_small_sets() {
        let s = enumerate_index_set(2, 4).unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(s[0], t(&[1, 2]));
        assert_eq!(s[5], t(&[3, 4]));
        assert_eq!(
            enumerate_index_set(0, 4).unwrap(),
            vec![IndexTuple::empty()]
        );
        assert_eq!(enumerate_index_set(2, 8).unwrap().len(), 28);
        assert!(matches!(enumerate_index_set(5, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn enumeration_is_strictly_lexicographic() {
        let s = enumerate_index_set(3, 7).unwrap();
        assert_eq!(s.len() as u64, binomial(7, 3));
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rank_unrank_examples() {
        assert_eq!(rank_tuple(&t(&[1, 2]), 4).unwrap(), 0);
        assert_eq!(unrank_tuple(0, 2, 4).unwrap(), t(&[1, 2]));
        assert_eq!(rank_tuple(&t(&[3, 4]), 4).unwrap(), 5);
        assert!(unrank_tuple(6, 2, 4).is_err());
        assert_eq!(rank_tuple(&IndexTuple::empty(), 4).unwrap(), 0);
    }

    #[test]
    fn rank_round_trip_i_4_12() {
        for (r, tup) in enumerate_index_set(4, 12).unwrap().iter().enumerate() {
            assert_eq!(rank_tuple(tup, 12).unwrap(), r as u64);
            assert_eq!(&unrank_tuple(r as u64, 4, 12).unwrap(), tup);
        }
    }

    #[test]
    fn rank_unrank_all_small() {
        for m in 0..=14 {
            for l in 0..=m {
                let total = binomial(m, l);
                for r in 0..total {
                    let tup = unrank_tuple(r, l, m).unwrap();
                    assert_eq!(rank_tuple(&tup, m).unwrap(), r);
                }
            }
        }
    }

    #[test]
    fn pairs() {
        assert_eq!(pair_of(1, 2).unwrap(), PairSymbol { low: 1, high: 4 });
        assert_eq!(pair_of(2, 2).unwrap(), PairSymbol { low: 2, high: 3 });
        assert_eq!(pair_of(5, 5).unwrap(), PairSymbol { low: 5, high: 6 });
        assert_eq!(pair_of(3, 2).unwrap(), pair_of(2, 2).unwrap());
        assert!(pair_of(0, 2).is_err());
        assert!(pair_of(5, 2).is_err());
        for n in 1..=7 {
            for i in 1..=2 * n {
                let p = pair_of(i, n).unwrap();
                assert_eq!(p.low + p.high, 2 * n + 1);
                assert!(p.low < p.high);
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let d = free_pair_decomposition(&t(&[1, 8]), 4);
        assert_eq!(d.pairs, vec![PairSymbol { low: 1, high: 8 }]);
        assert!(d.free.is_empty());

        let d = free_pair_decomposition(&t(&[1, 2]), 4);
        assert!(d.pairs.is_empty());
        assert_eq!(d.free, t(&[1, 2]));

        let d = free_pair_decomposition(&t(&[1, 2, 9, 10]), 5);
        assert_eq!(
            d.pairs,
            vec![
                PairSymbol { low: 1, high: 10 },
                PairSymbol { low: 2, high: 9 }
            ]
        );
        assert!(d.free.is_empty());
    }

    #[test]
    fn decomposition_reconstructs_and_is_injective() {
        for n in 1..=6 {
            for l in 0..=2 * n {
                let mut seen = std::collections::HashSet::new();
                for alpha in enumerate_index_set(l, 2 * n).unwrap() {
                    let d = free_pair_decomposition(&alpha, n);
                    assert_eq!(d.reconstruct(), alpha);
                    for (i, &a) in d.free.entries().iter().enumerate() {
                        for &b in &d.free.entries()[i + 1..] {
                            assert_ne!(a + b, 2 * n + 1);
                        }
                    }
                    assert!(seen.insert(d));
                }
            }
        }
    }

    #[test]
    fn partition_censuses() {
        let p2 = partition_rows(2).unwrap();
        assert_eq!(p2.len(), 1);
        assert_eq!(p2[&IndexTuple::empty()], vec![IndexTuple::empty()]);

        let p4 = partition_rows(4).unwrap();
        assert_eq!(p4.len(), 25);
        assert_eq!(p4[&IndexTuple::empty()].len(), 4);
        assert_eq!(p4.values().filter(|c| c.len() == 1).count(), 24);

        let p5 = partition_rows(5).unwrap();
        assert_eq!(p5.len(), 90);
        assert_eq!(
            p5.iter()
                .filter(|(k, v)| k.len() == 1 && v.len() == 4)
                .count(),
            10
        );
        assert_eq!(
            p5.iter()
                .filter(|(k, v)| k.len() == 3 && v.len() == 1)
                .count(),
            80
        );
        assert!(partition_rows(1).is_err());
    }

    #[test]
    fn partition_covers_rows_exactly_once() {
        for n in 2..=6 {
            let classes = partition_rows(n).unwrap();
            let mut all: Vec<IndexTuple> = classes.values().flatten().cloned().collect();
            assert_eq!(all.len() as u64, binomial(2 * n, n - 2));
            all.sort();
            all.dedup();
            assert_eq!(all.len() as u64, binomial(2 * n, n - 2));
        }
    }

    #[test]
    fn unsorted_construction_tracks_sign() {
        let (tup, s) = IndexTuple::from_unsorted(&[3, 1, 4], 6).unwrap().unwrap();
        assert_eq!(tup, t(&[1, 3, 4]));
        assert_eq!(s, -1);
        let (_, s) = IndexTuple::from_unsorted(&[3, 4, 1], 6).unwrap().unwrap();
        assert_eq!(s, 1);
        let (_, s) = IndexTuple::from_unsorted(&[2, 1], 6).unwrap().unwrap();
        assert_eq!(s, -1);
        assert!(IndexTuple::from_unsorted(&[2, 2], 6).unwrap().is_none());
        assert!(IndexTuple::from_unsorted(&[7], 6).is_err());
        assert!(IndexTuple::new(vec![2, 1], 6).is_err());
    }
}
