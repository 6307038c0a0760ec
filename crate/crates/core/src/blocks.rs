//! Incidence configurations on pair sets and the block structure of the
//! Plücker matrix.
//!
//! For an even `m`, the configuration `L_{r_m}` has as ground set the
//! `(m/2)`-subsets of `m` pairs and one row per `((m-2)/2)`-subset `A`, whose
//! member set is every ground element containing `A`. Its incidence matrix is
//! regular with `r_m = (m+2)/2` ones per row and `r_m - 1` per column.
//!
//! Rows of the Plücker matrix sharing a free part `F` with `|F| = t` only touch
//! columns with the same free part. Relabeling the `n - t` pairs left free of
//! `F` in increasing order turns that block into `L_{r_{n-t}}`. Columns with no
//! pair at all are identically zero and stay outside every block.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::combinatorics::{
    binomial, enumerate_index_set, free_pair_decomposition, partition_rows, IndexTuple,
};
use crate::error::{Error, Result};
use crate::formats::BinaryMatrix;
use crate::frlc::PlueckerMatrix;
use crate::linalg::r_of;

/// Subsets of pair symbols, each a tuple of pair numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceConfiguration {
    pub m: usize,
    pub ground: Vec<IndexTuple>,
    /// `(row label, indices into ground)` for every row.
    pub subsets: Vec<(IndexTuple, Vec<usize>)>,
}

/// Largest number of pairs an incidence configuration is built for.
pub const ATLAS_CAP: usize = 14;

/// Largest `n` accepted by [`decompose`].
pub const DECOMPOSE_CAP: usize = 6;

pub fn build_incidence_config(m: usize) -> Result<IncidenceConfiguration> {
    if m > ATLAS_CAP {
        return Err(Error::Resource(format!(
            "incidence configurations are capped at m <= {ATLAS_CAP}, got {m}"
        )));
    }
    if m < 2 || m % 2 == 1 {
        return Err(Error::domain(format!(
            "incidence configurations need an even m >= 2, got {m}"
        )));
    }
    let ground = enumerate_index_set(m / 2, m)?;
    let subsets = enumerate_index_set((m - 2) / 2, m)?
        .into_iter()
        .map(|a| {
            let members = ground
                .iter()
                .enumerate()
                .filter(|(_, g)| a.is_subset_of(g))
                .map(|(k, _)| k)
                .collect();
            (a, members)
        })
        .collect();
    Ok(IncidenceConfiguration { m, ground, subsets })
}

/// A dense bit-packed `(0,1)` matrix whose rows and columns are labeled by
/// subsets of `pair_symbols`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix {
    pair_symbols: Vec<usize>,
    row_labels: Vec<IndexTuple>,
    col_labels: Vec<IndexTuple>,
    words: usize,
    bits: Vec<u64>,
}

impl IncidenceMatrix {
    fn new(
        pair_symbols: Vec<usize>,
        row_labels: Vec<IndexTuple>,
        col_labels: Vec<IndexTuple>,
        supports: &[Vec<usize>],
    ) -> Self {
        let words = col_labels.len().div_ceil(64);
        let mut bits = vec![0u64; words * row_labels.len()];
        for (i, s) in supports.iter().enumerate() {
            for &j in s {
                bits[i * words + j / 64] |= 1 << (j % 64);
            }
        }
        IncidenceMatrix {
            pair_symbols,
            row_labels,
            col_labels,
            words,
            bits,
        }
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    /// Number of pairs the labels range over.
    pub fn m(&self) -> usize {
        self.pair_symbols.len()
    }

    pub fn pair_symbols(&self) -> &[usize] {
        &self.pair_symbols
    }

    pub fn row_labels(&self) -> &[IndexTuple] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[IndexTuple] {
        &self.col_labels
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let w = &mut self.bits[i * self.words + j / 64];
        if value {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    pub fn row_support(&self, i: usize) -> Vec<usize> {
        (0..self.cols()).filter(|&j| self.get(i, j)).collect()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.rows())
            .map(|i| {
                self.row_words(i)
                    .iter()
                    .map(|w| w.count_ones() as usize)
                    .sum()
            })
            .collect()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        (0..self.cols())
            .map(|j| (0..self.rows()).filter(|&i| self.get(i, j)).count())
            .collect()
    }

    /// Number of columns where rows `a` and `b` both have a one.
    pub fn overlap(&self, a: usize, b: usize) -> usize {
        self.row_words(a)
            .iter()
            .zip(self.row_words(b))
            .map(|(x, y)| (x & y).count_ones() as usize)
            .sum()
    }

    pub fn to_binary(&self) -> BinaryMatrix {
        BinaryMatrix::new(
            self.rows(),
            self.cols(),
            (0..self.rows()).map(|i| self.row_support(i)).collect(),
        )
        .expect("supports are sorted and in range")
    }
}

pub fn incidence_matrix(cfg: &IncidenceConfiguration) -> IncidenceMatrix {
    let supports: Vec<Vec<usize>> = cfg.subsets.iter().map(|(_, s)| s.clone()).collect();
    IncidenceMatrix::new(
        (1..=cfg.m).collect(),
        cfg.subsets.iter().map(|(a, _)| a.clone()).collect(),
        cfg.ground.clone(),
        &supports,
    )
}

/// The atlas member `L_{r_m}` on pairs `1..=m`.
pub fn atlas_member(m: usize) -> Result<IncidenceMatrix> {
    Ok(incidence_matrix(&build_incidence_config(m)?))
}

/// `[L_{r_n}, ..., L_2]`: one member for each even `m` from the largest even
/// value `<= n` down to 2.
pub fn atlas(n: usize) -> Result<Vec<IncidenceMatrix>> {
    if n < 2 {
        return Err(Error::domain(format!("the atlas needs n >= 2, got {n}")));
    }
    let top = n - n % 2;
    (1..=top / 2).rev().map(|k| atlas_member(2 * k)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegularityReport {
    pub m: usize,
    pub r: usize,
    pub rows: usize,
    pub cols: usize,
    pub row_weight: usize,
    pub col_weight: usize,
    pub max_overlap: usize,
    /// `r_m / C(m, m/2)` as numerator and denominator.
    pub density: (u64, u64),
}

impl RegularityReport {
    pub fn density_f64(&self) -> f64 {
        self.density.0 as f64 / self.density.1 as f64
    }
}

/// Checks row weight `r_m`, column weight `r_m - 1`, pairwise row overlap at
/// most one, and density `r_m / C(m, m/2)`.
pub fn check_regularity(l: &IncidenceMatrix) -> Result<RegularityReport> {
    let m = l.m();
    let r = r_of(m);
    for (i, s) in l.row_sums().into_iter().enumerate() {
        if s != r {
            return Err(Error::Verification(format!(
                "row {i} {} of L_{r} has weight {s}, expected {r}",
                l.row_labels[i]
            )));
        }
    }
    for (j, s) in l.col_sums().into_iter().enumerate() {
        if s != r - 1 {
            return Err(Error::Verification(format!(
                "column {j} {} of L_{r} has weight {s}, expected {}",
                l.col_labels[j],
                r - 1
            )));
        }
    }
    let mut max_overlap = 0;
    for a in 0..l.rows() {
        for b in a + 1..l.rows() {
            let o = l.overlap(a, b);
            if o > 1 {
                return Err(Error::Verification(format!(
                    "rows {a} and {b} of L_{r} share {o} ones"
                )));
            }
            max_overlap = max_overlap.max(o);
        }
    }
    let expected_cols = binomial(m, m / 2);
    if l.cols() as u64 != expected_cols {
        return Err(Error::Verification(format!(
            "L_{r} has {} columns, expected {expected_cols}",
            l.cols()
        )));
    }
    Ok(RegularityReport {
        m,
        r,
        rows: l.rows(),
        cols: l.cols(),
        row_weight: r,
        col_weight: r - 1,
        max_overlap,
        density: (r as u64, expected_cols),
    })
}

/// Row and column permutations carrying a block onto a reference matrix:
/// row `i` of the block is row `row_perm[i]` of the reference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockEquivalence {
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
}

fn relabel_positions(
    labels: &[IndexTuple],
    relabel: &HashMap<usize, usize>,
    reference: &[IndexTuple],
    what: &str,
) -> Result<Vec<usize>> {
    let lookup: HashMap<&IndexTuple, usize> =
        reference.iter().enumerate().map(|(k, t)| (t, k)).collect();
    let mut seen = vec![false; reference.len()];
    labels
        .iter()
        .map(|t| {
            let mapped: Vec<usize> = t.entries().iter().map(|x| relabel[x]).collect();
            let mapped = IndexTuple::from_sorted_unchecked(mapped);
            let k = *lookup.get(&mapped).ok_or_else(|| {
                Error::Verification(format!("{what} {t} has no counterpart {mapped}"))
            })?;
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::Verification(format!(
                    "{what} {t} maps onto a used label"
                )));
            }
            Ok(k)
        })
        .collect()
}

/// Finds the permutations induced by renumbering the block's pair symbols
/// in increasing order, then checks the two matrices agree bit for bit.
pub fn verify_block_equiv(
    block: &IncidenceMatrix,
    reference: &IncidenceMatrix,
) -> Result<BlockEquivalence> {
    if (block.rows(), block.cols(), block.m())
        != (reference.rows(), reference.cols(), reference.m())
    {
        return Err(Error::Verification(format!(
            "block is {}x{} on {} pairs, reference is {}x{} on {} pairs",
            block.rows(),
            block.cols(),
            block.m(),
            reference.rows(),
            reference.cols(),
            reference.m()
        )));
    }
    let relabel: HashMap<usize, usize> = block
        .pair_symbols
        .iter()
        .copied()
        .zip(reference.pair_symbols.iter().copied())
        .collect();
    let row_perm = relabel_positions(&block.row_labels, &relabel, &reference.row_labels, "row")?;
    let col_perm = relabel_positions(&block.col_labels, &relabel, &reference.col_labels, "column")?;
    for i in 0..block.rows() {
        for j in 0..block.cols() {
            if block.get(i, j) != reference.get(row_perm[i], col_perm[j]) {
                return Err(Error::Verification(format!(
                    "bit mismatch at block row {} {}, column {}",
                    i, block.row_labels[i], block.col_labels[j]
                )));
            }
        }
    }
    Ok(BlockEquivalence { row_perm, col_perm })
}

#[derive(Clone, Debug)]
pub struct Block {
    /// The common free part of every row and column in the block.
    pub free: IndexTuple,
    /// Row indices into the Plücker matrix.
    pub rows: Vec<usize>,
    /// Column indices into the Plücker matrix.
    pub cols: Vec<usize>,
    pub matrix: IncidenceMatrix,
    pub equivalence: BlockEquivalence,
    pub regularity: RegularityReport,
}

impl Block {
    /// Subscript `r` of the atlas member this block copies.
    pub fn r(&self) -> usize {
        self.regularity.r
    }
}

#[derive(Clone, Debug)]
pub struct BlockDecomposition {
    pub n: usize,
    pub blocks: Vec<Block>,
    pub zero_columns: Vec<usize>,
}

/// Splits the Plücker matrix into copies of atlas members plus zero columns.
pub fn decompose(b: &PlueckerMatrix) -> Result<BlockDecomposition> {
    let n = b.n();
    if n > DECOMPOSE_CAP {
        return Err(Error::Resource(format!(
            "decomposition is capped at n <= {DECOMPOSE_CAP}, got {n}"
        )));
    }
    let support = b.support();
    let col_supports = support.col_supports();
    let mut covered = vec![false; b.shape().1];
    let mut references: BTreeMap<usize, IncidenceMatrix> = BTreeMap::new();
    let mut blocks = Vec::new();

    for (free, class) in partition_rows(n)? {
        let label = free_pair_decomposition(&free, n);
        let pair_symbols: Vec<usize> = label.available_pairs(n).iter().map(|p| p.low).collect();
        let rows: Vec<usize> = class
            .iter()
            .map(|a| b.row_index(a))
            .collect::<Result<_>>()?;
        let mut cols: Vec<usize> = rows
            .iter()
            .flat_map(|&i| support.row_supports()[i].iter().copied())
            .collect();
        cols.sort_unstable();
        cols.dedup();

        let pair_label = |t: &IndexTuple| {
            let d = free_pair_decomposition(t, n);
            if d.free != free {
                return Err(Error::Verification(format!(
                    "{t} has free part {} inside the block of {free}",
                    d.free
                )));
            }
            Ok(IndexTuple::from_sorted_unchecked(
                d.pairs.iter().map(|p| p.low).collect(),
            ))
        };
        let row_labels: Vec<IndexTuple> = rows
            .iter()
            .map(|&i| pair_label(&b.row_labels()[i]))
            .collect::<Result<_>>()?;
        let col_labels: Vec<IndexTuple> = cols
            .iter()
            .map(|&j| pair_label(&b.col_labels()[j]))
            .collect::<Result<_>>()?;
        let local: HashMap<usize, usize> = cols.iter().enumerate().map(|(k, &j)| (j, k)).collect();
        let supports: Vec<Vec<usize>> = rows
            .iter()
            .map(|&i| support.row_supports()[i].iter().map(|j| local[j]).collect())
            .collect();
        for &j in &cols {
            if std::mem::replace(&mut covered[j], true) {
                return Err(Error::Verification(format!(
                    "column {} lies in two blocks",
                    b.col_labels()[j]
                )));
            }
            if col_supports[j].iter().any(|i| !rows.contains(i)) {
                return Err(Error::Verification(format!(
                    "column {} has ones outside the block of {free}",
                    b.col_labels()[j]
                )));
            }
        }

        let m = pair_symbols.len();
        let matrix = IncidenceMatrix::new(pair_symbols, row_labels, col_labels, &supports);
        if let std::collections::btree_map::Entry::Vacant(e) = references.entry(m) {
            e.insert(atlas_member(m)?);
        }
        let equivalence = verify_block_equiv(&matrix, &references[&m])
            .map_err(|e| Error::Verification(format!("block of free part {free}: {e}")))?;
        let regularity = check_regularity(&matrix)?;
        blocks.push(Block {
            free,
            rows,
            cols,
            matrix,
            equivalence,
            regularity,
        });
    }

    let zero_columns: Vec<usize> = (0..b.shape().1).filter(|&j| !covered[j]).collect();
    if let Some(&j) = zero_columns.iter().find(|&&j| !col_supports[j].is_empty()) {
        return Err(Error::Verification(format!(
            "uncovered column {} is not zero",
            b.col_labels()[j]
        )));
    }
    Ok(BlockDecomposition {
        n,
        blocks,
        zero_columns,
    })
}

impl BlockDecomposition {
    /// Block count per atlas subscript, largest subscript first.
    pub fn census(&self) -> Vec<(usize, usize)> {
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for blk in &self.blocks {
            *counts.entry(blk.r()).or_default() += 1;
        }
        counts.into_iter().rev().collect()
    }

    /// e.g. `1×L3, 24×L2, zero-cols 16`
    pub fn census_line(&self) -> String {
        let mut parts: Vec<String> = self
            .census()
            .iter()
            .map(|(r, k)| format!("{k}×L{r}"))
            .collect();
        parts.push(format!("zero-cols {}", self.zero_columns.len()));
        parts.join(", ")
    }

    /// For odd `n` there is one `L_{r_n}` block per free singleton, so `2n` of
    /// them, while the commonly quoted multiplicity is `n`. Returns a note
    /// whenever the count differs from `n`.
    pub fn multiplicity_note(&self) -> Option<String> {
        if self.n.is_multiple_of(2) {
            return None;
        }
        let r = r_of(self.n);
        let found = self
            .census()
            .iter()
            .find(|(k, _)| *k == r)
            .map_or(0, |c| c.1);
        (found != self.n).then(|| {
            format!(
                "NOTE: L{r} appears {found} times for n={}; the commonly quoted multiplicity is n={}",
                self.n, self.n
            )
        })
    }

    /// Rows in block order, columns in block order followed by zero columns.
    pub fn permutation(&self) -> (Vec<usize>, Vec<usize>) {
        let rows = self
            .blocks
            .iter()
            .flat_map(|b| b.rows.iter().copied())
            .collect();
        let cols = self
            .blocks
            .iter()
            .flat_map(|b| b.cols.iter().copied())
            .chain(self.zero_columns.iter().copied())
            .collect();
        (rows, cols)
    }

    /// The support of `b` with rows and columns permuted into block order.
    pub fn reassemble(&self, b: &PlueckerMatrix) -> BinaryMatrix {
        let (rows, cols) = self.permutation();
        let support = b.support();
        let mut pos = vec![0; cols.len()];
        for (k, &j) in cols.iter().enumerate() {
            pos[j] = k;
        }
        let supports = rows
            .iter()
            .map(|&i| {
                let mut s: Vec<usize> = support.row_supports()[i].iter().map(|&j| pos[j]).collect();
                s.sort_unstable();
                s
            })
            .collect();
        BinaryMatrix::new(rows.len(), cols.len(), supports).expect("permutation of a valid matrix")
    }

    /// Block-diagonal matrix assembled from the block matrices alone, with the
    /// zero columns appended.
    pub fn direct_sum(&self) -> BinaryMatrix {
        let total_cols: usize =
            self.blocks.iter().map(|b| b.cols.len()).sum::<usize>() + self.zero_columns.len();
        let mut supports = Vec::new();
        let mut offset = 0;
        for blk in &self.blocks {
            for i in 0..blk.matrix.rows() {
                supports.push(
                    blk.matrix
                        .row_support(i)
                        .iter()
                        .map(|j| j + offset)
                        .collect(),
                );
            }
            offset += blk.matrix.cols();
        }
        BinaryMatrix::new(supports.len(), total_cols, supports).expect("block supports are valid")
    }
}
