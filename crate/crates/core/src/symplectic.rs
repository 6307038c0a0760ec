//! The symplectic space `E = F^{2n}` with basis `e_1, ..., e_{2n}` paired as
//! `<e_i, e_{2n-i+1}> = 1` for `i <= n` (and `-1` the other way round), its
//! exterior powers, the contraction map `f: ∧^n E -> ∧^{n-2} E`, and the
//! Lagrangian subspaces.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{
    all_pairs, binomial, enumerate_index_set, rank_tuple, sort_with_sign, IndexTuple, PairSymbol,
};
use crate::error::{Error, Result};
use crate::field::{check_field, FieldSpec, Scalar};
use crate::linalg::{nullspace_basis, rank, ExactMatrix};

/// Pairing of basis vectors: `+1` if `j = 2n-i+1` and `i < j`, `-1` if
/// `j = 2n-i+1` and `i > j`, `0` otherwise.
pub fn symplectic_pairing(i: usize, j: usize, n: usize) -> Result<i8> {
    for k in [i, j] {
        if k == 0 || k > 2 * n {
            return Err(Error::domain(format!("index {k} outside [1, {}]", 2 * n)));
        }
    }
    Ok(if i + j != 2 * n + 1 {
        0
    } else if i < j {
        1
    } else {
        -1
    })
}

fn check_vector(x: &[Scalar], n: usize, field: FieldSpec) -> Result<()> {
    if x.len() != 2 * n {
        return Err(Error::domain(format!(
            "vector of length {} in a space of dimension {}",
            x.len(),
            2 * n
        )));
    }
    check_field(field, x)
}

/// The bilinear extension of [`symplectic_pairing`].
pub fn pairing_vectors(x: &[Scalar], y: &[Scalar], n: usize) -> Result<Scalar> {
    let field = x
        .first()
        .map(Scalar::field)
        .ok_or_else(|| Error::domain("empty vector"))?;
    check_vector(x, n, field)?;
    check_vector(y, n, field)?;
    let mut acc = field.zero();
    for i in 0..2 * n {
        let j = 2 * n - 1 - i;
        let term = &x[i] * &y[j];
        acc = if i < j { acc + term } else { acc - term };
    }
    Ok(acc)
}

/// A homogeneous element of `∧^g E`, stored sparsely by sorted index tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExteriorVector {
    n: usize,
    grade: usize,
    field: FieldSpec,
    coords: BTreeMap<IndexTuple, Scalar>,
}

impl ExteriorVector {
    pub fn zero(n: usize, grade: usize, field: FieldSpec) -> Self {
        ExteriorVector {
            n,
            grade,
            field,
            coords: BTreeMap::new(),
        }
    }

    /// The basis element `e_t`.
    pub fn basis(n: usize, t: IndexTuple, field: FieldSpec) -> Result<Self> {
        let grade = t.len();
        Self::from_terms(n, grade, field, [(t, field.one())])
    }

    pub fn from_terms(
        n: usize,
        grade: usize,
        field: FieldSpec,
        terms: impl IntoIterator<Item = (IndexTuple, Scalar)>,
    ) -> Result<Self> {
        let mut w = Self::zero(n, grade, field);
        for (t, x) in terms {
            if t.len() != grade || t.entries().last().is_some_and(|&e| e > 2 * n) {
                return Err(Error::domain(format!(
                    "{t} is not a grade-{grade} index over [{}]",
                    2 * n
                )));
            }
            check_field(field, [&x])?;
            w.add_term(t, &x);
        }
        Ok(w)
    }

    /// Coordinates listed in the canonical order of `I(grade, 2n)`.
    pub fn from_dense(n: usize, grade: usize, field: FieldSpec, values: &[Scalar]) -> Result<Self> {
        let index = enumerate_index_set(grade, 2 * n)?;
        if values.len() != index.len() {
            return Err(Error::domain(format!(
                "{} coordinates given for a space of dimension {}",
                values.len(),
                index.len()
            )));
        }
        Self::from_terms(
            n,
            grade,
            field,
            index.into_iter().zip(values.iter().cloned()),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn coords(&self) -> &BTreeMap<IndexTuple, Scalar> {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub(crate) fn add_term(&mut self, t: IndexTuple, x: &Scalar) {
        if x.is_zero() {
            return;
        }
        match self.coords.get_mut(&t) {
            Some(v) => {
                *v = &*v + x;
                if v.is_zero() {
                    self.coords.remove(&t);
                }
            }
            None => {
                self.coords.insert(t, x.clone());
            }
        }
    }

    /// Adds `x * e_{i_1} ∧ ... ∧ e_{i_g}` for indices in any order.
    pub fn add_unsorted(&mut self, entries: &[usize], x: &Scalar) -> Result<()> {
        if entries.len() != self.grade {
            return Err(Error::domain("index length does not match grade"));
        }
        if let Some((t, s)) = IndexTuple::from_unsorted(entries, 2 * self.n)? {
            self.add_term(t, &x.scale_i64(s as i64));
        }
        Ok(())
    }

    pub fn coefficient(&self, t: &IndexTuple) -> Scalar {
        self.coords
            .get(t)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Coordinate addressed by an unsorted index: the sorted coordinate times
    /// the sign of the sorting permutation, zero on repeated indices.
    pub fn coefficient_unsorted(&self, entries: &[usize]) -> Result<Scalar> {
        Ok(match IndexTuple::from_unsorted(entries, 2 * self.n)? {
            Some((t, s)) => self.coefficient(&t).scale_i64(s as i64),
            None => self.field.zero(),
        })
    }

    /// All coordinates in canonical order.
    pub fn dense(&self) -> Vec<Scalar> {
        enumerate_index_set(self.grade, 2 * self.n)
            .expect("grade <= 2n")
            .iter()
            .map(|t| self.coefficient(t))
            .collect()
    }

    pub fn add(&self, other: &ExteriorVector) -> Result<ExteriorVector> {
        if (self.n, self.grade, self.field) != (other.n, other.grade, other.field) {
            return Err(Error::domain("adding exterior vectors of different spaces"));
        }
        let mut out = self.clone();
        for (t, x) in &other.coords {
            out.add_term(t.clone(), x);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> ExteriorVector {
        let mut out = Self::zero(self.n, self.grade, self.field);
        for (t, x) in &self.coords {
            out.add_term(t.clone(), &(x * c));
        }
        out
    }

    /// A random vector with each coordinate nonzero with probability `density`.
    pub fn random<R: rand::Rng + ?Sized>(
        n: usize,
        grade: usize,
        field: FieldSpec,
        rng: &mut R,
        density: f64,
    ) -> Self {
        let mut w = Self::zero(n, grade, field);
        for t in enumerate_index_set(grade, 2 * n).expect("grade <= 2n") {
            if rng.gen_bool(density) {
                let x = field.random(rng, 5);
                w.add_term(t, &x);
            }
        }
        w
    }
}

fn determinant(mut a: Vec<Vec<Scalar>>, field: FieldSpec) -> Scalar {
    let k = a.len();
    let mut det = field.one();
    for c in 0..k {
        let Some(p) = (c..k).find(|&i| !a[i][c].is_zero()) else {
            return field.zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det = &det * &a[c][c];
        let inv = a[c][c].inv().expect("pivot is nonzero");
        for i in c + 1..k {
            if a[i][c].is_zero() {
                continue;
            }
            let factor = &a[i][c] * &inv;
            for j in c..k {
                let v = &a[i][j] - &(&factor * &a[c][j]);
                a[i][j] = v;
            }
        }
    }
    det
}

/// `v_1 ∧ ... ∧ v_k`: the coordinate at `α` is the minor on columns `α`.
pub fn wedge(vectors: &[Vec<Scalar>], n: usize, field: FieldSpec) -> Result<ExteriorVector> {
    let k = vectors.len();
    if k > 2 * n {
        return Err(Error::domain(format!("{k} vectors in dimension {}", 2 * n)));
    }
    for v in vectors {
        check_vector(v, n, field)?;
    }
    let mut w = ExteriorVector::zero(n, k, field);
    for alpha in enumerate_index_set(k, 2 * n)? {
        let minor = vectors
            .iter()
            .map(|v| alpha.entries().iter().map(|&c| v[c - 1].clone()).collect())
            .collect();
        let d = determinant(minor, field);
        w.add_term(alpha, &d);
    }
    Ok(w)
}

/// `(-1)^s` where `s` counts entries of `alpha` strictly between the two
/// members of `pair`: the sign with which `e_{alpha ∪ pair}` contributes to
/// `e_alpha` under contraction.
pub fn contraction_sign(alpha: &IndexTuple, pair: PairSymbol) -> i8 {
    let inside = alpha
        .entries()
        .iter()
        .filter(|&&a| pair.low < a && a < pair.high)
        .count();
    if inside % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Contraction in coordinates: the output at `α` sums the coordinates of `w`
/// at `α ∪ P_i` over the pairs disjoint from `α`, each with its
/// [`contraction_sign`].
pub fn contract(w: &ExteriorVector) -> Result<ExteriorVector> {
    let n = w.n;
    if n < 2 || w.grade != n {
        return Err(Error::domain(format!(
            "contraction needs a grade-n vector with n >= 2 (n={n}, grade={})",
            w.grade
        )));
    }
    let mut out = ExteriorVector::zero(n, n - 2, w.field);
    for alpha in enumerate_index_set(n - 2, 2 * n)? {
        let mut acc = w.field.zero();
        for pair in all_pairs(n) {
            if let Some(beta) = alpha.disjoint_union(&pair.as_tuple()) {
                let r = w.coefficient(&beta);
                acc = if contraction_sign(&alpha, pair) == 1 {
                    acc + r
                } else {
                    acc - r
                };
            }
        }
        out.add_term(alpha, &acc);
    }
    Ok(out)
}

/// Contraction straight from its definition on a decomposable tensor:
/// `f(w_1 ∧ ... ∧ w_n) = Σ_{r<s} <w_r, w_s> (-1)^{r+s-1} w_1 ∧ ..ŵ_r..ŵ_s.. ∧ w_n`.
pub fn contract_definitional(
    vectors: &[Vec<Scalar>],
    n: usize,
    field: FieldSpec,
) -> Result<ExteriorVector> {
    if n < 2 || vectors.len() != n {
        return Err(Error::domain(format!(
            "contraction takes n >= 2 vectors, got {} with n={n}",
            vectors.len()
        )));
    }
    let mut out = ExteriorVector::zero(n, n - 2, field);
    for r in 0..n {
        for s in r + 1..n {
            let pairing = pairing_vectors(&vectors[r], &vectors[s], n)?;
            if pairing.is_zero() {
                continue;
            }
            // 1-based (r+1)+(s+1)-1 has the parity of r+s+1
            let coeff = if (r + s + 1) % 2 == 0 {
                pairing
            } else {
                -pairing
            };
            let rest: Vec<Vec<Scalar>> = vectors
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != r && k != s)
                .map(|(_, v)| v.clone())
                .collect();
            out = out.add(&wedge(&rest, n, field)?.scale(&coeff))?;
        }
    }
    Ok(out)
}

/// A basis of a subspace of `E`, independent by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    n: usize,
    field: FieldSpec,
    rows: Vec<Vec<Scalar>>,
}

impl SubspaceBasis {
    pub fn new(n: usize, field: FieldSpec, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        for r in &rows {
            check_vector(r, n, field)?;
        }
        let m = ExactMatrix::from_rows(field, 2 * n, rows.clone())?;
        if rank(&m) != rows.len() {
            return Err(Error::domain("basis rows are linearly dependent"));
        }
        Ok(SubspaceBasis { n, field, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn rows(&self) -> &[Vec<Scalar>] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Plücker vector of the subspace.
    pub fn pluecker_vector(&self) -> ExteriorVector {
        wedge(&self.rows, self.n, self.field).expect("rows validated at construction")
    }
}

pub fn is_isotropic(w: &SubspaceBasis) -> bool {
    w.rows.iter().enumerate().all(|(i, x)| {
        w.rows[i + 1..]
            .iter()
            .all(|y| pairing_vectors(x, y, w.n).expect("validated").is_zero())
    })
}

/// A random Lagrangian subspace, deterministic in `seed`. Each new basis
/// vector is drawn from the symplectic complement of the span so far.
pub fn sample_lagrangian(n: usize, field: FieldSpec, seed: u64) -> Result<SubspaceBasis> {
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<Vec<Scalar>> = Vec::with_capacity(n);
    while rows.len() < n {
        // <r, x> = Σ_j x_j <r, e_j>, and <r, e_j> = ± r_{2n+1-j}
        let constraints: Vec<Vec<Scalar>> = rows
            .iter()
            .map(|r| {
                (0..2 * n)
                    .map(|j| {
                        let i = 2 * n - 1 - j;
                        if i < j {
                            r[i].clone()
                        } else {
                            -&r[i]
                        }
                    })
                    .collect()
            })
            .collect();
        let perp = if constraints.is_empty() {
            (0..2 * n)
                .map(|k| {
                    let mut e = vec![field.zero(); 2 * n];
                    e[k] = field.one();
                    e
                })
                .collect()
        } else {
            nullspace_basis(&ExactMatrix::from_rows(field, 2 * n, constraints)?)
        };
        let candidate: Vec<Scalar> = perp.iter().fold(vec![field.zero(); 2 * n], |acc, b| {
            let c = field.random(&mut rng, 3);
            acc.iter().zip(b).map(|(a, x)| a + &(&c * x)).collect()
        });
        let mut trial = rows.clone();
        trial.push(candidate);
        if rank(&ExactMatrix::from_rows(field, 2 * n, trial.clone())?) == trial.len() {
            rows = trial;
        }
    }
    SubspaceBasis::new(n, field, rows)
}

/// `Π_{i=1}^{n} (1 + q^i)`, the number of `F_q`-rational Lagrangians.
pub fn lagrangian_count_formula(n: usize, q: u64) -> u128 {
    (1..=n as u32).map(|i| 1 + (q as u128).pow(i)).product()
}

/// Largest point count [`enumerate_lagrangians`] will attempt.
pub const ENUMERATION_CAP: u128 = 1_000_000;

/// Streams every `F_q`-rational Lagrangian once, as its reduced row echelon basis.
pub fn enumerate_lagrangians(n: usize, q: u64) -> Result<LagrangianEnumerator> {
    let field = FieldSpec::prime(q)?;
    if n == 0 {
        return Err(Error::domain("n must be positive"));
    }
    let expected = lagrangian_count_formula(n, q);
    if expected > ENUMERATION_CAP {
        return Err(Error::Resource(format!(
            "L({n}) over F_{q} has {expected} points, above the enumeration cap \
             {ENUMERATION_CAP}; use sample_lagrangian instead"
        )));
    }
    let pivot_sets = enumerate_index_set(n, 2 * n)?
        .into_iter()
        .map(|t| t.entries().iter().map(|&c| c - 1).collect())
        .collect();
    Ok(LagrangianEnumerator {
        n,
        p: q,
        field,
        pivot_sets,
        next_set: 0,
        active: false,
        free_cols: Vec::new(),
        limits: Vec::new(),
        counters: vec![0; n],
        rows: vec![vec![0; 2 * n]; n],
        pivots: Vec::new(),
        depth: 0,
    })
}

/// Depth-first search over reduced row echelon matrices, one pivot set at a
/// time, pruning as soon as a new row pairs nontrivially with an earlier one.
pub struct LagrangianEnumerator {
    n: usize,
    p: u64,
    field: FieldSpec,
    pivot_sets: Vec<Vec<usize>>,
    next_set: usize,
    active: bool,
    free_cols: Vec<Vec<usize>>,
    limits: Vec<u64>,
    counters: Vec<u64>,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
    depth: usize,
}

impl LagrangianEnumerator {
    fn load_pivot_set(&mut self) -> bool {
        let Some(pivots) = self.pivot_sets.get(self.next_set).cloned() else {
            return false;
        };
        self.next_set += 1;
        let dim = 2 * self.n;
        self.free_cols = pivots
            .iter()
            .map(|&c| (c + 1..dim).filter(|j| !pivots.contains(j)).collect())
            .collect();
        self.limits = self
            .free_cols
            .iter()
            .map(|f: &Vec<usize>| self.p.pow(f.len() as u32))
            .collect();
        self.pivots = pivots;
        self.counters.iter_mut().for_each(|c| *c = 0);
        self.depth = 0;
        self.active = true;
        true
    }

    fn fill_row(&mut self, k: usize, mut code: u64) {
        let row = &mut self.rows[k];
        row.iter_mut().for_each(|x| *x = 0);
        row[self.pivots[k]] = 1;
        for &c in &self.free_cols[k] {
            row[c] = code % self.p;
            code /= self.p;
        }
    }

    fn pairs_to_zero(&self, a: &[u64], b: &[u64]) -> bool {
        let dim = 2 * self.n;
        let p = self.p;
        let mut acc = 0u64;
        for i in 0..dim {
            let j = dim - 1 - i;
            let t = a[i] * b[j] % p;
            acc = if i < j {
                (acc + t) % p
            } else {
                (acc + p - t) % p
            };
        }
        acc == 0
    }

    fn emit(&self) -> SubspaceBasis {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&v| self.field.from_i64(v as i64)).collect())
            .collect();
        SubspaceBasis {
            n: self.n,
            field: self.field,
            rows,
        }
    }
}

impl Iterator for LagrangianEnumerator {
    type Item = SubspaceBasis;

    fn next(&mut self) -> Option<SubspaceBasis> {
        loop {
            if !self.active && !self.load_pivot_set() {
                return None;
            }
            if self.depth == self.n {
                self.depth -= 1;
                return Some(self.emit());
            }
            let d = self.depth;
            if self.counters[d] == self.limits[d] {
                if d == 0 {
                    self.active = false;
                } else {
                    self.depth -= 1;
                }
                continue;
            }
            let code = self.counters[d];
            self.counters[d] += 1;
            self.fill_row(d, code);
            if (0..d).all(|k| self.pairs_to_zero(&self.rows[k], &self.rows[d])) {
                self.depth += 1;
                if self.depth < self.n {
                    self.counters[self.depth] = 0;
                }
            }
        }
    }
}

/// `Q_{α,β}(w) = Σ_i (-1)^i P_{α β_i} P_{β \ β_i}` with `β_i` appended after `α`.
pub fn plucker_relation_value(
    w: &ExteriorVector,
    alpha: &IndexTuple,
    beta: &IndexTuple,
) -> Result<Scalar> {
    let g = w.grade;
    if g == 0 || alpha.len() != g - 1 || beta.len() != g + 1 {
        return Err(Error::domain(format!(
            "relation indices of lengths {} and {} for grade {g}",
            alpha.len(),
            beta.len()
        )));
    }
    let mut acc = w.field.zero();
    for (i, &b) in beta.entries().iter().enumerate() {
        let mut left = alpha.entries().to_vec();
        left.push(b);
        let p_left = w.coefficient_unsorted(&left)?;
        if p_left.is_zero() {
            continue;
        }
        let right: Vec<usize> = beta
            .entries()
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, &x)| x)
            .collect();
        let term = &p_left * &w.coefficient_unsorted(&right)?;
        // (-1)^{i+1} for 0-based i
        acc = if i % 2 == 0 { acc - term } else { acc + term };
    }
    Ok(acc)
}

/// `(α, β)` and its terms `(sign, left index, right index)`.
type CompiledRelation = (IndexTuple, IndexTuple, Vec<(i8, usize, usize)>);

/// Every quadratic Plücker relation of one grade, compiled to index triples
/// over the dense coordinate vector. Relations whose terms all vanish
/// identically are dropped.
#[derive(Clone, Debug)]
pub struct RelationPlan {
    n: usize,
    grade: usize,
    relations: Vec<CompiledRelation>,
}

impl RelationPlan {
    pub fn new(n: usize, grade: usize) -> Result<Self> {
        let m = 2 * n;
        if grade == 0 || grade >= m {
            return Ok(RelationPlan {
                n,
                grade,
                relations: Vec::new(),
            });
        }
        let mut relations = Vec::new();
        for alpha in enumerate_index_set(grade - 1, m)? {
            for beta in enumerate_index_set(grade + 1, m)? {
                let mut terms = Vec::new();
                for (i, &b) in beta.entries().iter().enumerate() {
                    let mut left = alpha.entries().to_vec();
                    left.push(b);
                    let Some((sorted, s)) = sort_with_sign(&left) else {
                        continue;
                    };
                    let right = beta.difference(&IndexTuple::from_sorted_unchecked(vec![b]));
                    let l = rank_tuple(&IndexTuple::from_sorted_unchecked(sorted), m)? as usize;
                    let r = rank_tuple(&right, m)? as usize;
                    // (-1)^{i+1} for 0-based i
                    let sign = if i % 2 == 0 { -s } else { s };
                    terms.push((sign, l, r));
                }
                if !terms.is_empty() {
                    relations.push((alpha.clone(), beta, terms));
                }
            }
        }
        Ok(RelationPlan {
            n,
            grade,
            relations,
        })
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// The first `(α, β)` with `Q_{α,β}(w) != 0`, if any.
    pub fn first_violation(&self, w: &ExteriorVector) -> Result<Option<(IndexTuple, IndexTuple)>> {
        if (w.n, w.grade) != (self.n, self.grade) {
            return Err(Error::domain(format!(
                "relation plan for n={}, grade {} applied to n={}, grade {}",
                self.n, self.grade, w.n, w.grade
            )));
        }
        let x = w.dense();
        for (alpha, beta, terms) in &self.relations {
            let mut acc = w.field.zero();
            for &(sign, l, r) in terms {
                if x[l].is_zero() || x[r].is_zero() {
                    continue;
                }
                let term = &x[l] * &x[r];
                acc = if sign > 0 { acc + term } else { acc - term };
            }
            if !acc.is_zero() {
                return Ok(Some((alpha.clone(), beta.clone())));
            }
        }
        Ok(None)
    }

    pub fn holds(&self, w: &ExteriorVector) -> Result<bool> {
        Ok(self.first_violation(w)?.is_none())
    }
}

/// Whether `w` satisfies every quadratic Plücker relation.
pub fn plucker_relations_check(w: &ExteriorVector) -> Result<bool> {
    RelationPlan::new(w.n, w.grade)?.holds(w)
}

/// Dimension of `∧^g E`.
pub fn exterior_dimension(n: usize, grade: usize) -> u64 {
    binomial(2 * n, grade)
}
