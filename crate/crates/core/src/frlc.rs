//! The linear relations of contraction and the Plücker matrix they form.
//!
//! For every `α ∈ I(n-2, 2n)` the functional `Π_α` collects the coordinates
//! `X_{α ∪ P_i}` over the pairs `P_i` disjoint from `α`. Stacking them gives
//! the Plücker matrix `B`, whose support is a `(0,1)` incidence pattern.
//!
//! In standard Plücker coordinates the coefficients carry the sign
//! [`contraction_sign`], so that `B w` is exactly the coordinate vector of
//! `f(w)`. The sign pattern factors as `row_twist(α) * col_twist(β)`: after
//! flipping the signs of some basis tensors `e_β` and `e_α`, `B` becomes its
//! own `(0,1)` support. Ranks, row-space dimensions and the block structure
//! are therefore identical for the signed matrix and its support.

use std::collections::{BTreeMap, HashMap};

use crate::combinatorics::{
    all_pairs, binomial, enumerate_index_set, free_pair_decomposition, rank_tuple, IndexTuple,
};
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Scalar};
use crate::formats::BinaryMatrix;
use crate::linalg::{nullspace_basis, ExactMatrix};
use crate::symplectic::{contraction_sign, ExteriorVector};

/// A linear form on `∧^n E`, written in the dual basis `X_β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearFunctional {
    n: usize,
    field: FieldSpec,
    coeffs: BTreeMap<IndexTuple, Scalar>,
}

impl LinearFunctional {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &BTreeMap<IndexTuple, Scalar> {
        &self.coeffs
    }

    pub fn evaluate(&self, w: &ExteriorVector) -> Result<Scalar> {
        if w.n() != self.n || w.grade() != self.n || w.field() != self.field {
            return Err(Error::domain(
                "functional and vector live in different spaces",
            ));
        }
        Ok(self
            .coeffs
            .iter()
            .fold(self.field.zero(), |acc, (t, c)| acc + c * &w.coefficient(t)))
    }

    /// Coefficients in the canonical order of `I(n, 2n)`.
    pub fn dense(&self) -> Vec<Scalar> {
        enumerate_index_set(self.n, 2 * self.n)
            .expect("n <= 2n")
            .iter()
            .map(|t| {
                self.coeffs
                    .get(t)
                    .cloned()
                    .unwrap_or_else(|| self.field.zero())
            })
            .collect()
    }

    fn from_dense(n: usize, field: FieldSpec, values: Vec<Scalar>) -> Self {
        let coeffs = enumerate_index_set(n, 2 * n)
            .expect("n <= 2n")
            .into_iter()
            .zip(values)
            .filter(|(_, x)| !x.is_zero())
            .collect();
        LinearFunctional { n, field, coeffs }
    }
}

fn check_row_index(alpha: &IndexTuple, n: usize) -> Result<()> {
    if n < 2 || alpha.len() != n - 2 || alpha.entries().last().is_some_and(|&e| e > 2 * n) {
        return Err(Error::domain(format!(
            "{alpha} is not an element of I(n-2, 2n) for n={n}"
        )));
    }
    Ok(())
}

/// `(α, sign)` pairs: every `α ∪ P_i` with `P_i` disjoint from `α`.
fn pi_terms(alpha: &IndexTuple, n: usize) -> Vec<(IndexTuple, i8)> {
    all_pairs(n)
        .into_iter()
        .filter_map(|p| {
            alpha
                .disjoint_union(&p.as_tuple())
                .map(|beta| (beta, contraction_sign(alpha, p)))
        })
        .collect()
}

/// The relation `Π_α`.
pub fn functional_pi(alpha: &IndexTuple, n: usize, field: FieldSpec) -> Result<LinearFunctional> {
    check_row_index(alpha, n)?;
    let coeffs = pi_terms(alpha, n)
        .into_iter()
        .map(|(beta, s)| (beta, field.from_i64(s as i64)))
        .collect();
    Ok(LinearFunctional { n, field, coeffs })
}

/// Product over the pairs of `t` of `(-1)^s`, where `s` counts the free
/// entries of `t` strictly inside the pair.
pub fn sign_twist(t: &IndexTuple, n: usize) -> i8 {
    let label = free_pair_decomposition(t, n);
    label
        .pairs
        .iter()
        .map(|&p| contraction_sign(&label.free, p))
        .product()
}

/// Largest `n` for which the matrix is built.
pub const BUILD_CAP: usize = 7;

/// The Plücker matrix: rows `I(n-2, 2n)`, columns `I(n, 2n)`, both in
/// lexicographic order, entries in `{0, 1, -1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlueckerMatrix {
    n: usize,
    row_labels: Vec<IndexTuple>,
    col_labels: Vec<IndexTuple>,
    rows: Vec<Vec<(usize, i8)>>,
}

pub fn build_pluecker_matrix(n: usize) -> Result<PlueckerMatrix> {
    if n < 2 {
        return Err(Error::domain(format!(
            "the Plücker matrix needs n >= 2, got {n}"
        )));
    }
    if n > BUILD_CAP {
        return Err(Error::Resource(format!(
            "matrix build is capped at n <= {BUILD_CAP}, got {n}"
        )));
    }
    let row_labels = enumerate_index_set(n - 2, 2 * n)?;
    let col_labels = enumerate_index_set(n, 2 * n)?;
    let rows = row_labels
        .iter()
        .map(|alpha| {
            let mut r: Vec<(usize, i8)> = pi_terms(alpha, n)
                .into_iter()
                .map(|(beta, s)| {
                    (
                        rank_tuple(&beta, 2 * n).expect("beta over [2n]") as usize,
                        s,
                    )
                })
                .collect();
            r.sort_unstable();
            r
        })
        .collect();
    Ok(PlueckerMatrix {
        n,
        row_labels,
        col_labels,
        rows,
    })
}

impl PlueckerMatrix {
    pub(crate) fn from_parts(n: usize, rows: Vec<Vec<(usize, i8)>>) -> Result<PlueckerMatrix> {
        let row_labels = enumerate_index_set(n - 2, 2 * n)?;
        let col_labels = enumerate_index_set(n, 2 * n)?;
        if rows.len() != row_labels.len() {
            return Err(Error::domain("row count does not match I(n-2, 2n)"));
        }
        Ok(PlueckerMatrix {
            n,
            row_labels,
            col_labels,
            rows,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.row_labels.len(), self.col_labels.len())
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn row_labels(&self) -> &[IndexTuple] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[IndexTuple] {
        &self.col_labels
    }

    /// Nonzero entries of row `i` as `(column, sign)`.
    pub fn row(&self, i: usize) -> &[(usize, i8)] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> i8 {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map(|k| self.rows[i][k].1)
            .unwrap_or(0)
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    /// Incidence rule straight from the labels: `α ⊂ β` and `β \ α` is a pair.
    pub fn is_incident(&self, alpha: &IndexTuple, beta: &IndexTuple) -> bool {
        if !alpha.is_subset_of(beta) {
            return false;
        }
        let rest = beta.difference(alpha);
        rest.len() == 2 && rest.entries()[0] + rest.entries()[1] == 2 * self.n + 1
    }

    pub fn row_index(&self, alpha: &IndexTuple) -> Result<usize> {
        check_row_index(alpha, self.n)?;
        Ok(rank_tuple(alpha, 2 * self.n)? as usize)
    }

    pub fn col_index(&self, beta: &IndexTuple) -> Result<usize> {
        if beta.len() != self.n {
            return Err(Error::domain(format!("{beta} is not in I(n, 2n)")));
        }
        Ok(rank_tuple(beta, 2 * self.n)? as usize)
    }

    pub fn row_twist(&self, i: usize) -> i8 {
        sign_twist(&self.row_labels[i], self.n)
    }

    pub fn col_twist(&self, j: usize) -> i8 {
        sign_twist(&self.col_labels[j], self.n)
    }

    /// The `(0,1)` support.
    pub fn support(&self) -> BinaryMatrix {
        let supports = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&(c, _)| c).collect())
            .collect();
        BinaryMatrix::new(self.row_labels.len(), self.col_labels.len(), supports)
            .expect("rows are sorted and in range")
    }

    /// The signed matrix over `field`.
    pub fn to_exact(&self, field: FieldSpec) -> ExactMatrix {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&(c, s)| (c, field.from_i64(s as i64)))
                    .collect()
            })
            .collect();
        ExactMatrix::from_sparse_rows(field, self.col_labels.len(), rows).expect("entries in range")
    }

    /// The `(0,1)` support over `field`.
    pub fn support_exact(&self, field: FieldSpec) -> ExactMatrix {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&(c, _)| (c, field.one())).collect())
            .collect();
        ExactMatrix::from_sparse_rows(field, self.col_labels.len(), rows).expect("entries in range")
    }

    /// The `Π_α` of every row, in row order.
    pub fn functionals(&self, field: FieldSpec) -> Vec<LinearFunctional> {
        self.row_labels
            .iter()
            .map(|a| functional_pi(a, self.n, field).expect("row labels are valid"))
            .collect()
    }
}

/// `B w`, indexed by `I(n-2, 2n)` in canonical order.
pub fn apply_matrix(b: &PlueckerMatrix, w: &ExteriorVector) -> Result<Vec<Scalar>> {
    if w.n() != b.n || w.grade() != b.n {
        return Err(Error::domain(format!(
            "matrix for n={} applied to a grade-{} vector with n={}",
            b.n,
            w.grade(),
            w.n()
        )));
    }
    let field = w.field();
    let mut by_col: HashMap<usize, &Scalar> = HashMap::with_capacity(w.coords().len());
    for (t, x) in w.coords() {
        by_col.insert(b.col_index(t)?, x);
    }
    Ok(b.rows
        .iter()
        .map(|r| {
            r.iter()
                .fold(field.zero(), |acc, &(c, s)| match by_col.get(&c) {
                    Some(&x) if s > 0 => acc + x,
                    Some(&x) => acc - x,
                    None => acc,
                })
        })
        .collect())
}

/// All linear forms vanishing on the given points, as a basis.
pub fn vanishing_space(
    points: &[ExteriorVector],
    field: FieldSpec,
) -> Result<Vec<LinearFunctional>> {
    let first = points
        .first()
        .ok_or_else(|| Error::domain("vanishing space of an empty point set"))?;
    let n = first.n();
    if let Some(bad) = points
        .iter()
        .find(|p| p.n() != n || p.grade() != n || p.field() != field)
    {
        return Err(Error::domain(format!(
            "point of grade {} over {} in a list of grade-{n} points over {field}",
            bad.grade(),
            bad.field()
        )));
    }
    let cols = binomial(2 * n, n) as usize;
    let m = ExactMatrix::from_rows(
        field,
        cols,
        points.iter().map(ExteriorVector::dense).collect(),
    )?;
    Ok(nullspace_basis(&m)
        .into_iter()
        .map(|v| LinearFunctional::from_dense(n, field, v))
        .collect())
}

/// The matrix whose rows are the given functionals.
pub fn functionals_matrix(
    fs: &[LinearFunctional],
    n: usize,
    field: FieldSpec,
) -> Result<ExactMatrix> {
    let cols = binomial(2 * n, n) as usize;
    ExactMatrix::from_rows(
        field,
        cols,
        fs.iter().map(LinearFunctional::dense).collect(),
    )
}
