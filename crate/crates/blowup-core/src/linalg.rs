//! Dense Gaussian elimination over GF(p).

use crate::field::FieldSpec;

/// A matrix kept in reduced row-echelon form as rows are inserted.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: FieldSpec,
    ncols: usize,
    /// Rows in RREF with their pivot column.
    rows: Vec<(usize, Vec<u64>)>,
}

impl Echelon {
    pub fn new(field: FieldSpec, ncols: usize) -> Self {
        Echelon {
            field,
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current rows; returns the remainder.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let f = self.field;
        let mut v = v.to_vec();
        for (piv, row) in &self.rows {
            let c = v[*piv];
            if c != 0 {
                for (a, b) in v.iter_mut().zip(row.iter()) {
                    *a = f.sub(*a, f.mul(c, *b));
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Inserts `v`; returns `true` when the rank grew.
    pub fn insert(&mut self, v: &[u64]) -> bool {
        assert_eq!(v.len(), self.ncols);
        let f = self.field;
        let mut r = self.reduce(v);
        let Some(piv) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(r[piv]);
        for x in r.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[piv];
            if c != 0 {
                for (a, b) in row.iter_mut().zip(r.iter()) {
                    *a = f.sub(*a, f.mul(c, *b));
                }
            }
        }
        let pos = self.rows.partition_point(|(p, _)| *p < piv);
        self.rows.insert(pos, (piv, r));
        true
    }

    /// Rows in RREF order.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &Vec<u64>)> {
        self.rows.iter().map(|(p, r)| (*p, r))
    }
}

/// Solves `Σ_j x_j · columns[j] = target`; returns one solution if it exists.
pub fn solve(field: FieldSpec, columns: &[Vec<u64>], target: &[u64]) -> Option<Vec<u64>> {
    let n = columns.len();
    let m = target.len();
    // Augmented rows: equation i reads Σ_j columns[j][i] x_j = target[i].
    let mut rows: Vec<Vec<u64>> = (0..m)
        .map(|i| {
            let mut r: Vec<u64> = columns.iter().map(|c| c[i]).collect();
            r.push(target[i]);
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(sel) = (rank..m).find(|&i| rows[i][col] != 0) else {
            continue;
        };
        rows.swap(rank, sel);
        let inv = field.inv(rows[rank][col]);
        for x in rows[rank].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[col] != 0 {
                let c = row[col];
                for (a, b) in row.iter_mut().zip(pivot_row.iter()) {
                    *a = field.sub(*a, field.mul(c, *b));
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    if rows[rank..].iter().any(|r| r[n] != 0) {
        return None;
    }
    let mut x = vec![0u64; n];
    for (i, &col) in pivots.iter().enumerate() {
        x[col] = rows[i][n];
    }
    Some(x)
}

/// Inverse of a square matrix given by rows, or `None` when it is singular.
pub fn invert(field: FieldSpec, rows: &[Vec<u64>]) -> Option<Vec<Vec<u64>>> {
    let n = rows.len();
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| u64::from(i == j)));
            row
        })
        .collect();
    for col in 0..n {
        let sel = (col..n).find(|&i| a[i][col] != 0)?;
        a.swap(col, sel);
        let inv = field.inv(a[col][col]);
        for x in a[col].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = a[col].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != col && row[col] != 0 {
                let c = row[col];
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = field.sub(*x, field.mul(c, *y));
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}
