//! Sparse `(0,1)` matrices and their text serializations.
//!
//! * **alist**: line 1 `N M` (columns, rows); line 2 `max_col_w max_row_w`;
//!   line 3 the `N` column weights; line 4 the `M` row weights; then `N` lines
//!   of 1-based row indices per column, zero-padded to `max_col_w`; then `M`
//!   lines of 1-based column indices per row.
//! * **coord**: header `rows cols nnz`, then one `row col` line per nonzero,
//!   1-based, sorted.
//! * **json**: the Plücker matrix with labels and signs, see [`PlueckerMatrixFile`].

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::combinatorics::IndexTuple;
use crate::error::{Error, Result};
use crate::frlc::PlueckerMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    row_supports: Vec<Vec<usize>>,
}

impl BinaryMatrix {
    /// `row_supports[i]` lists the 0-based columns holding a one in row `i`.
    pub fn new(rows: usize, cols: usize, row_supports: Vec<Vec<usize>>) -> Result<Self> {
        if row_supports.len() != rows {
            return Err(Error::domain(format!(
                "{} row supports for {rows} rows",
                row_supports.len()
            )));
        }
        for (i, s) in row_supports.iter().enumerate() {
            if s.windows(2).any(|w| w[0] >= w[1]) || s.last().is_some_and(|&c| c >= cols) {
                return Err(Error::domain(format!("row {i} support {s:?} is invalid")));
            }
        }
        Ok(BinaryMatrix {
            rows,
            cols,
            row_supports,
        })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row_supports(&self) -> &[Vec<usize>] {
        &self.row_supports
    }

    pub fn col_supports(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.cols];
        for (i, s) in self.row_supports.iter().enumerate() {
            for &c in s {
                cols[c].push(i);
            }
        }
        cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.row_supports[i].binary_search(&j).is_ok()
    }

    pub fn nnz(&self) -> usize {
        self.row_supports.iter().map(Vec::len).sum()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.row_supports.iter().map(Vec::len).collect()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        self.col_supports().iter().map(Vec::len).collect()
    }

    pub fn to_alist(&self) -> String {
        let cols = self.col_supports();
        let col_w: Vec<usize> = cols.iter().map(Vec::len).collect();
        let row_w = self.row_weights();
        let max_col = col_w.iter().copied().max().unwrap_or(0);
        let max_row = row_w.iter().copied().max().unwrap_or(0);
        let mut out = String::new();
        writeln!(out, "{} {}", self.cols, self.rows).unwrap();
        writeln!(out, "{max_col} {max_row}").unwrap();
        writeln!(out, "{}", join(col_w.iter().copied())).unwrap();
        writeln!(out, "{}", join(row_w.iter().copied())).unwrap();
        for c in &cols {
            let padded = c
                .iter()
                .map(|&r| r + 1)
                .chain(std::iter::repeat_n(0, max_col - c.len()));
            writeln!(out, "{}", join(padded)).unwrap();
        }
        for r in &self.row_supports {
            writeln!(out, "{}", join(r.iter().map(|&c| c + 1))).unwrap();
        }
        out
    }

    /// Parses an alist file. Zero entries in either index section are padding.
    pub fn from_alist(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next_nums = |what: &str| -> Result<(usize, Vec<usize>)> {
            let (no, line) = lines
                .next()
                .ok_or_else(|| Error::parse(0, format!("missing {what}")))?;
            let nums = parse_nums(line, no)?;
            Ok((no, nums))
        };
        let (no, dims) = next_nums("dimensions")?;
        let [n_cols, n_rows] = dims[..] else {
            return Err(Error::parse(no, "expected `N M`"));
        };
        let (no, maxw) = next_nums("max weights")?;
        if maxw.len() != 2 {
            return Err(Error::parse(no, "expected `max_col_w max_row_w`"));
        }
        let (no, col_w) = next_nums("column weights")?;
        if col_w.len() != n_cols {
            return Err(Error::parse(no, "column weight count mismatch"));
        }
        let (no, row_w) = next_nums("row weights")?;
        if row_w.len() != n_rows {
            return Err(Error::parse(no, "row weight count mismatch"));
        }
        let mut from_cols: Vec<Vec<usize>> = vec![Vec::new(); n_rows];
        for (c, &w) in col_w.iter().enumerate() {
            let (no, entries) = next_nums("column list")?;
            let entries: Vec<usize> = entries.into_iter().filter(|&x| x != 0).collect();
            if entries.len() != w || entries.iter().any(|&r| r > n_rows) {
                return Err(Error::parse(
                    no,
                    format!("column {} list is inconsistent", c + 1),
                ));
            }
            for r in entries {
                from_cols[r - 1].push(c);
            }
        }
        let mut supports = Vec::with_capacity(n_rows);
        for (r, &w) in row_w.iter().enumerate() {
            let (no, entries) = next_nums("row list")?;
            let mut entries: Vec<usize> = entries
                .into_iter()
                .filter(|&x| x != 0)
                .map(|c| c - 1)
                .collect();
            entries.sort_unstable();
            if entries.len() != w || entries != from_cols[r] {
                return Err(Error::parse(
                    no,
                    format!("row {} list disagrees with the column lists", r + 1),
                ));
            }
            supports.push(entries);
        }
        BinaryMatrix::new(n_rows, n_cols, supports)
    }

    pub fn to_coord(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {} {}", self.rows, self.cols, self.nnz()).unwrap();
        for (i, s) in self.row_supports.iter().enumerate() {
            for &c in s {
                writeln!(out, "{} {}", i + 1, c + 1).unwrap();
            }
        }
        out
    }

    pub fn from_coord(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.trim().is_empty());
        let (no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty file"))?;
        let [rows, cols, nnz] = parse_nums(header, no)?[..] else {
            return Err(Error::parse(no, "expected `rows cols nnz`"));
        };
        let mut supports = vec![Vec::new(); rows];
        let mut count = 0;
        let mut last = (0, 0);
        for (no, line) in lines {
            let [r, c] = parse_nums(line, no)?[..] else {
                return Err(Error::parse(no, "expected `row col`"));
            };
            if r == 0 || c == 0 || r > rows || c > cols {
                return Err(Error::parse(no, format!("entry ({r}, {c}) out of range")));
            }
            if (r, c) <= last {
                return Err(Error::parse(no, "entries are not strictly sorted"));
            }
            last = (r, c);
            supports[r - 1].push(c - 1);
            count += 1;
        }
        if count != nnz {
            return Err(Error::parse(
                no,
                format!("header says {nnz} entries, found {count}"),
            ));
        }
        BinaryMatrix::new(rows, cols, supports)
    }
}

fn join(it: impl Iterator<Item = usize>) -> String {
    it.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn parse_nums(line: &str, no: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| Error::parse(no, format!("`{tok}` is not a non-negative integer")))
        })
        .collect()
}

/// JSON form of the Plücker matrix. Entries are `[row, col, sign]`, 0-based,
/// in row-major order; labels are 1-based index tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlueckerMatrixFile {
    pub n: usize,
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
    pub row_labels: Vec<IndexTuple>,
    pub col_labels: Vec<IndexTuple>,
    pub entries: Vec<(usize, usize, i8)>,
}

impl From<&PlueckerMatrix> for PlueckerMatrixFile {
    fn from(b: &PlueckerMatrix) -> Self {
        let (rows, cols) = b.shape();
        PlueckerMatrixFile {
            n: b.n(),
            rows,
            cols,
            nnz: b.nnz(),
            row_labels: b.row_labels().to_vec(),
            col_labels: b.col_labels().to_vec(),
            entries: (0..rows)
                .flat_map(|i| b.row(i).iter().map(move |&(c, s)| (i, c, s)))
                .collect(),
        }
    }
}

pub fn pluecker_to_json(b: &PlueckerMatrix) -> String {
    serde_json::to_string_pretty(&PlueckerMatrixFile::from(b)).expect("plain data serializes")
}

pub fn pluecker_from_json(text: &str) -> Result<PlueckerMatrix> {
    let file: PlueckerMatrixFile =
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    if file.n < 2 {
        return Err(Error::parse(0, "n must be at least 2"));
    }
    let mut rows = vec![Vec::new(); file.rows];
    for &(r, c, s) in &file.entries {
        if r >= file.rows || c >= file.cols || !(s == 1 || s == -1) {
            return Err(Error::parse(0, format!("bad entry ({r}, {c}, {s})")));
        }
        rows[r].push((c, s));
    }
    for r in rows.iter_mut() {
        r.sort_unstable();
    }
    let b = PlueckerMatrix::from_parts(file.n, rows).map_err(|e| Error::parse(0, e.to_string()))?;
    if b.row_labels() != file.row_labels
        || b.col_labels() != file.col_labels
        || b.nnz() != file.nnz
        || b.shape() != (file.rows, file.cols)
    {
        return Err(Error::parse(0, "labels or counts disagree with n"));
    }
    Ok(b)
}
