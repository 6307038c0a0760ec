//! Exact linear algebra over ℚ and prime fields.
//!
//! Ranks over ℚ are computed without fractions: dense matrices go through
//! Bareiss elimination, sparse ones through integer row elimination with
//! content removal. Over `F_p` and for nullspaces, plain elimination on sparse
//! rows. Pivots are always the first nonzero entry in column order.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::field::{check_field, FieldSpec, Scalar};
use crate::frlc::build_pluecker_matrix;

/// Matrices with at least this fraction of nonzero entries use dense storage.
pub const DENSE_THRESHOLD: f64 = 0.05;

pub(crate) type SparseRow = Vec<(usize, Scalar)>;

#[derive(Clone, Debug, PartialEq)]
enum Backing {
    Dense(Vec<Vec<Scalar>>),
    Sparse(Vec<SparseRow>),
}

/// A matrix with exact entries over a single field.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    backing: Backing,
}

impl ExactMatrix {
    pub fn from_rows(field: FieldSpec, cols: usize, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::domain(format!(
                    "row {i} has length {} instead of {cols}",
                    r.len()
                )));
            }
            check_field(field, r)?;
        }
        let sparse = rows
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .collect()
            })
            .collect();
        Ok(Self::with_backing(field, cols, sparse))
    }

    /// Rows given as `(column, value)` lists; zeros are dropped, duplicates summed.
    pub fn from_sparse_rows(
        field: FieldSpec,
        cols: usize,
        rows: Vec<Vec<(usize, Scalar)>>,
    ) -> Result<Self> {
        let mut clean = Vec::with_capacity(rows.len());
        for r in rows {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (c, x) in r {
                if c >= cols {
                    return Err(Error::domain(format!("column {c} out of range {cols}")));
                }
                check_field(field, [&x])?;
                let e = acc.entry(c).or_insert_with(|| field.zero());
                *e = &*e + &x;
            }
            clean.push(acc.into_iter().filter(|(_, x)| !x.is_zero()).collect());
        }
        Ok(Self::with_backing(field, cols, clean))
    }

    fn with_backing(field: FieldSpec, cols: usize, sparse: Vec<SparseRow>) -> Self {
        let rows = sparse.len();
        let nnz: usize = sparse.iter().map(Vec::len).sum();
        let cells = rows * cols;
        let dense = cells > 0 && nnz as f64 >= DENSE_THRESHOLD * cells as f64;
        let backing = if dense {
            Backing::Dense(
                sparse
                    .into_iter()
                    .map(|r| {
                        let mut d = vec![field.zero(); cols];
                        for (c, x) in r {
                            d[c] = x;
                        }
                        d
                    })
                    .collect(),
            )
        } else {
            Backing::Sparse(sparse)
        };
        ExactMatrix {
            field,
            rows,
            cols,
            backing,
        }
    }

    pub fn identity(field: FieldSpec, k: usize) -> Self {
        let rows = (0..k).map(|i| vec![(i, field.one())]).collect();
        Self::with_backing(field, k, rows)
    }

    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        Self::with_backing(field, cols, vec![Vec::new(); rows])
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.backing, Backing::Dense(_))
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        match &self.backing {
            Backing::Dense(d) => d[i][j].clone(),
            Backing::Sparse(s) => s[i]
                .binary_search_by_key(&j, |(c, _)| *c)
                .map(|k| s[i][k].1.clone())
                .unwrap_or_else(|_| self.field.zero()),
        }
    }

    /// Nonzero entries of row `i` in column order.
    pub fn sparse_row(&self, i: usize) -> SparseRow {
        match &self.backing {
            Backing::Dense(d) => d[i]
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(c, x)| (c, x.clone()))
                .collect(),
            Backing::Sparse(s) => s[i].clone(),
        }
    }

    fn sparse_rows(&self) -> Vec<SparseRow> {
        (0..self.rows).map(|i| self.sparse_row(i)).collect()
    }

    pub fn dense_row(&self, i: usize) -> Vec<Scalar> {
        match &self.backing {
            Backing::Dense(d) => d[i].clone(),
            Backing::Sparse(s) => {
                let mut d = vec![self.field.zero(); self.cols];
                for (c, x) in &s[i] {
                    d[*c] = x.clone();
                }
                d
            }
        }
    }

    pub fn nnz(&self) -> usize {
        (0..self.rows).map(|i| self.sparse_row(i).len()).sum()
    }

    pub fn transpose(&self) -> ExactMatrix {
        let mut t: Vec<SparseRow> = vec![Vec::new(); self.cols];
        for i in 0..self.rows {
            for (c, x) in self.sparse_row(i) {
                t[c].push((i, x));
            }
        }
        Self::with_backing(self.field, self.rows, t)
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn stack(&self, other: &ExactMatrix) -> Result<ExactMatrix> {
        if self.cols != other.cols || self.field != other.field {
            return Err(Error::domain(format!(
                "cannot stack {}x{} over {} with {}x{} over {}",
                self.rows, self.cols, self.field, other.rows, other.cols, other.field
            )));
        }
        let mut rows = self.sparse_rows();
        rows.extend(other.sparse_rows());
        Ok(Self::with_backing(self.field, self.cols, rows))
    }

    pub fn mul_vec(&self, x: &[Scalar]) -> Result<Vec<Scalar>> {
        if x.len() != self.cols {
            return Err(Error::domain(format!(
                "vector length {} does not match {} columns",
                x.len(),
                self.cols
            )));
        }
        check_field(self.field, x)?;
        Ok((0..self.rows)
            .map(|i| {
                self.sparse_row(i)
                    .iter()
                    .fold(self.field.zero(), |acc, (c, a)| acc + a * &x[*c])
            })
            .collect())
    }
}

/// `a - c * b` on sorted sparse rows.
fn axpy(a: &[(usize, Scalar)], c: &Scalar, b: &[(usize, Scalar)]) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i == a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, -(c * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - &(c * &b[j].1);
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Row echelon form over a field: pivot column -> normalized pivot row.
fn echelon(rows: Vec<SparseRow>) -> BTreeMap<usize, SparseRow> {
    let mut pivots: BTreeMap<usize, SparseRow> = BTreeMap::new();
    for mut r in rows {
        while let Some(&(lead, ref x)) = r.first() {
            match pivots.get(&lead) {
                Some(p) => {
                    let x = x.clone();
                    r = axpy(&r, &x, p);
                }
                None => {
                    let inv = x.inv().expect("leading entry is nonzero");
                    let normalized = r.into_iter().map(|(c, v)| (c, &v * &inv)).collect();
                    pivots.insert(lead, normalized);
                    break;
                }
            }
        }
    }
    pivots
}

/// Reduced row echelon form: pivots eliminated from every other pivot row.
fn reduced_echelon(rows: Vec<SparseRow>) -> BTreeMap<usize, SparseRow> {
    let mut pivots = echelon(rows);
    let cols: Vec<usize> = pivots.keys().rev().copied().collect();
    for &c in &cols {
        let pivot = pivots[&c].clone();
        for (&other, row) in pivots.range_mut(..c) {
            debug_assert!(other < c);
            if let Ok(k) = row.binary_search_by_key(&c, |(col, _)| *col) {
                let factor = row[k].1.clone();
                *row = axpy(row, &factor, &pivot);
            }
        }
    }
    pivots
}

fn integer_rows(m: &ExactMatrix) -> Vec<Vec<(usize, BigInt)>> {
    (0..m.rows)
        .map(|i| {
            let row = m.sparse_row(i);
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, (_, x)| acc.lcm(x.rational().denom()));
            row.into_iter()
                .map(|(c, x)| {
                    let r = x.rational();
                    (c, r.numer() * (&lcm / r.denom()))
                })
                .collect()
        })
        .collect()
}

fn make_primitive(row: &mut [(usize, BigInt)]) {
    let g = row.iter().fold(BigInt::zero(), |acc, (_, x)| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for (_, x) in row.iter_mut() {
            *x /= &g;
        }
    }
    if row.first().is_some_and(|(_, x)| x.is_negative()) {
        for (_, x) in row.iter_mut() {
            *x = -&*x;
        }
    }
}

/// Fraction-free sparse elimination: `r <- p_lead * r - r_lead * p`, then
/// divide out the row content.
fn rank_integer_sparse(rows: Vec<Vec<(usize, BigInt)>>) -> usize {
    let mut pivots: BTreeMap<usize, Vec<(usize, BigInt)>> = BTreeMap::new();
    for mut r in rows {
        make_primitive(&mut r);
        while let Some((lead, x)) = r.first().cloned() {
            let Some(p) = pivots.get(&lead) else {
                pivots.insert(lead, r);
                break;
            };
            let pl = &p[0].1;
            let mut out = Vec::with_capacity(r.len() + p.len());
            let (mut i, mut j) = (0, 0);
            while i < r.len() || j < p.len() {
                let (c, v) = if j == p.len() || (i < r.len() && r[i].0 < p[j].0) {
                    i += 1;
                    (r[i - 1].0, pl * &r[i - 1].1)
                } else if i == r.len() || p[j].0 < r[i].0 {
                    j += 1;
                    (p[j - 1].0, -(&x * &p[j - 1].1))
                } else {
                    i += 1;
                    j += 1;
                    (r[i - 1].0, pl * &r[i - 1].1 - &x * &p[j - 1].1)
                };
                if !v.is_zero() {
                    out.push((c, v));
                }
            }
            make_primitive(&mut out);
            r = out;
        }
    }
    pivots.len()
}

/// Bareiss fraction-free elimination on a dense integer matrix.
fn rank_bareiss(mut a: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let rows = a.len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                debug_assert!((&num % &prev).is_zero());
                a[i][j] = num / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Rank over the matrix's own field.
pub fn rank(m: &ExactMatrix) -> usize {
    match m.field {
        FieldSpec::Prime(_) => echelon(m.sparse_rows()).len(),
        FieldSpec::Rationals => {
            let ints = integer_rows(m);
            if m.is_dense() {
                let dense = ints
                    .into_iter()
                    .map(|r| {
                        let mut d = vec![BigInt::zero(); m.cols];
                        for (c, x) in r {
                            d[c] = x;
                        }
                        d
                    })
                    .collect();
                rank_bareiss(dense, m.cols)
            } else {
                rank_integer_sparse(ints)
            }
        }
    }
}

/// Rank over ℚ by plain rational elimination. Used to cross-check the
/// fraction-free routes.
pub fn rank_by_rational_elimination(m: &ExactMatrix) -> usize {
    echelon(m.sparse_rows()).len()
}

/// A basis of `{x : M x = 0}`, one vector per free column.
pub fn nullspace_basis(m: &ExactMatrix) -> Vec<Vec<Scalar>> {
    let field = m.field;
    let pivots = reduced_echelon(m.sparse_rows());
    (0..m.cols)
        .filter(|c| !pivots.contains_key(c))
        .map(|free| {
            let mut x = vec![field.zero(); m.cols];
            x[free] = field.one();
            for (&pc, row) in &pivots {
                if let Ok(k) = row.binary_search_by_key(&free, |(c, _)| *c) {
                    x[pc] = -&row[k].1;
                }
            }
            x
        })
        .collect()
}

/// Whether two matrices with the same column count span the same row space.
pub fn row_space_equal(a: &ExactMatrix, b: &ExactMatrix) -> Result<bool> {
    if a.cols != b.cols || a.field != b.field {
        return Err(Error::domain(format!(
            "row spaces of {}x{} over {} and {}x{} over {} are not comparable",
            a.rows, a.cols, a.field, b.rows, b.cols, b.field
        )));
    }
    let ra = rank(a);
    let rb = rank(b);
    Ok(ra == rb && rank(&a.stack(b)?) == ra)
}

/// `r_n = floor((n + 2) / 2)`.
pub fn r_of(n: usize) -> usize {
    (n + 2) / 2
}

/// Rank of the Plücker matrix over one field, with the surjectivity verdict.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    pub n: usize,
    pub characteristic: u64,
    pub rank: u64,
    pub expected: u64,
    pub surjective: bool,
    pub embedding_rank: u64,
    pub r_n: usize,
    /// What the characteristic criterion predicts: `p = 0` or `p >= r_n`.
    pub predicted_surjective: bool,
}

impl RankReport {
    pub fn deficiency(&self) -> u64 {
        self.expected - self.rank
    }
}

/// Largest `n` for which rank queries are accepted.
pub const RANK_CAP: usize = 6;

pub fn rank_report(n: usize, field: FieldSpec) -> Result<RankReport> {
    if n > RANK_CAP {
        return Err(Error::Resource(format!(
            "rank queries are capped at n <= {RANK_CAP}, got {n}"
        )));
    }
    let b = build_pluecker_matrix(n)?;
    let rank = rank(&b.to_exact(field)) as u64;
    let expected = binomial(2 * n, n - 2);
    let p = field.characteristic();
    Ok(RankReport {
        n,
        characteristic: p,
        rank,
        expected,
        surjective: rank == expected,
        embedding_rank: binomial(2 * n, n) - rank,
        r_n: r_of(n),
        predicted_surjective: p == 0 || p >= r_of(n) as u64,
    })
}

/// Computes the rank in characteristic `p` (0 for ℚ) and asserts that the
/// matrix has full row rank exactly when `p = 0` or `p >= r_n`.
pub fn rank_check_char(n: usize, characteristic: u64) -> Result<RankReport> {
    let field = FieldSpec::from_characteristic(characteristic)?;
    let report = rank_report(n, field)?;
    if report.surjective != report.predicted_surjective {
        return Err(Error::Verification(format!(
            "characteristic criterion falsified at n={n}, p={characteristic}: rank {} of {}",
            report.rank, report.expected
        )));
    }
    Ok(report)
}

/// `C(2n, n) - rank B` over `field`.
pub fn embedding_rank(n: usize, field: FieldSpec) -> Result<u64> {
    Ok(rank_report(n, field)?.embedding_rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn int_matrix(field: FieldSpec, rows: &[&[i64]]) -> ExactMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        ExactMatrix::from_rows(
            field,
            cols,
            rows.iter()
                .map(|r| r.iter().map(|&v| field.from_i64(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, field: FieldSpec) -> ExactMatrix {
        let r = rng.gen_range(1..7);
        let c = rng.gen_range(1..7);
        let density = rng.gen_range(0.0..1.0);
        let rows = (0..r)
            .map(|_| {
                (0..c)
                    .map(|_| {
                        if rng.gen_bool(density) {
                            field.random(rng, 3)
                        } else {
                            field.zero()
                        }
                    })
                    .collect()
            })
            .collect();
        ExactMatrix::from_rows(field, c, rows).unwrap()
    }

    #[test]
    fn identity_rank() {
        for f in [
            FieldSpec::Rationals,
            FieldSpec::Prime(2),
            FieldSpec::Prime(7),
        ] {
            assert_eq!(rank(&ExactMatrix::identity(f, 5)), 5);
        }
    }

    #[test]
    fn rank_depends_on_characteristic() {
        // det = 2
        let rows: &[&[i64]] = &[&[1, 1], &[1, -1]];
        assert_eq!(rank(&int_matrix(FieldSpec::Rationals, rows)), 2);
        assert_eq!(rank(&int_matrix(FieldSpec::Prime(2), rows)), 1);
        assert_eq!(rank(&int_matrix(FieldSpec::Prime(3), rows)), 2);
    }

    #[test]
    fn rank_equals_transpose_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for k in 0..100 {
            let f = [
                FieldSpec::Rationals,
                FieldSpec::Prime(2),
                FieldSpec::Prime(5),
            ][k % 3];
            let m = random_matrix(&mut rng, f);
            assert_eq!(rank(&m), rank(&m.transpose()));
        }
    }

    #[test]
    fn fraction_free_routes_agree_with_rational_elimination() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let q = FieldSpec::Rationals;
        for _ in 0..200 {
            let m = random_matrix(&mut rng, q);
            let expected = rank_by_rational_elimination(&m);
            assert_eq!(rank(&m), expected);
            let ints = integer_rows(&m);
            assert_eq!(rank_integer_sparse(ints.clone()), expected);
            let dense = ints
                .into_iter()
                .map(|r| {
                    let mut d = vec![BigInt::zero(); m.cols];
                    for (c, x) in r {
                        d[c] = x;
                    }
                    d
                })
                .collect();
            assert_eq!(rank_bareiss(dense, m.cols), expected);
        }
    }

    #[test]
    fn rational_entries_are_cleared() {
        let q = FieldSpec::Rationals;
        let half = q.from_i64(2).inv().unwrap();
        let m = ExactMatrix::from_rows(
            q,
            2,
            vec![vec![half.clone(), q.one()], vec![q.one(), q.from_i64(2)]],
        )
        .unwrap();
        assert_eq!(rank(&m), 1);
    }

    #[test]
    fn nullspace_of_zero_matrix() {
        let m = ExactMatrix::zeros(FieldSpec::Rationals, 2, 3);
        assert_eq!(nullspace_basis(&m).len(), 3);
    }

    #[test]
    fn nullspace_vectors_are_annihilated() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for k in 0..100 {
            let f = [FieldSpec::Rationals, FieldSpec::Prime(3)][k % 2];
            let m = random_matrix(&mut rng, f);
            let ns = nullspace_basis(&m);
            assert_eq!(ns.len(), m.shape().1 - rank(&m));
            for x in &ns {
                assert!(m.mul_vec(x).unwrap().iter().all(Scalar::is_zero));
            }
            if !ns.is_empty() {
                let k = ExactMatrix::from_rows(f, m.shape().1, ns).unwrap();
                assert_eq!(rank(&k), m.shape().1 - rank(&m));
            }
        }
    }

    #[test]
    fn row_space_comparisons() {
        let f = FieldSpec::Rationals;
        let a = int_matrix(f, &[&[1, 2, 3], &[0, 1, 1]]);
        let shuffled = int_matrix(f, &[&[0, 3, 3], &[2, 4, 6]]);
        assert!(row_space_equal(&a, &shuffled).unwrap());
        let dropped = int_matrix(f, &[&[1, 2, 3], &[0, 0, 0]]);
        assert!(!row_space_equal(&a, &dropped).unwrap());
        let wide = int_matrix(f, &[&[1, 2, 3, 4]]);
        assert!(row_space_equal(&a, &wide).is_err());
    }

    #[test]
    fn storage_follows_density() {
        let f = FieldSpec::Prime(2);
        assert!(ExactMatrix::identity(f, 5).is_dense());
        assert!(!ExactMatrix::identity(f, 40).is_dense());
        let m = ExactMatrix::identity(f, 40);
        assert_eq!(m.get(3, 3), f.one());
        assert_eq!(m.get(3, 4), f.zero());
    }

    #[test]
    fn mismatched_input_is_rejected() {
        let f = FieldSpec::Prime(3);
        assert!(ExactMatrix::from_rows(f, 2, vec![vec![f.one()]]).is_err());
        assert!(ExactMatrix::from_rows(f, 1, vec![vec![FieldSpec::Rationals.one()]]).is_err());
        assert!(ExactMatrix::from_sparse_rows(f, 2, vec![vec![(2, f.one())]]).is_err());
    }
}
