//! Dense matrices over a [`ValuedField`], stored row-major.

use alloc::vec::Vec;

use super::field::ValuedField;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Mat<E> {
    pub fn from_rows(rows: Vec<Vec<E>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(cols: &[Vec<E>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |col| col.len());
        assert!(cols.iter().all(|col| col.len() == r), "ragged matrix");
        let data = (0..r).flat_map(|i| cols.iter().map(move |col| col[i].clone())).collect();
        Self { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: E) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<E> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<E>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }
}

pub fn identity<F: ValuedField>(f: &F, n: usize) -> Mat<F::Elem> {
    Mat::from_fn(n, n, |i, j| if i == j { f.one() } else { f.zero() })
}

pub fn mat_mul<F: ValuedField>(f: &F, a: &Mat<F::Elem>, b: &Mat<F::Elem>) -> Mat<F::Elem> {
    assert_eq!(a.ncols(), b.nrows(), "shape mismatch");
    Mat::from_fn(a.nrows(), b.ncols(), |i, j| {
        let mut acc = f.zero();
        for k in 0..a.ncols() {
            let x = a.get(i, k);
            if !f.is_zero(x) {
                acc = f.add(&acc, &f.mul(x, b.get(k, j)));
            }
        }
        acc
    })
}

pub fn mat_vec<F: ValuedField>(f: &F, a: &Mat<F::Elem>, x: &[F::Elem]) -> Vec<F::Elem> {
    assert_eq!(a.ncols(), x.len(), "shape mismatch");
    (0..a.nrows())
        .map(|i| {
            let mut acc = f.zero();
            for (k, xk) in x.iter().enumerate() {
                if !f.is_zero(xk) {
                    acc = f.add(&acc, &f.mul(a.get(i, k), xk));
                }
            }
            acc
        })
        .collect()
}

/// `a - c b` entrywise.
pub fn axpy<F: ValuedField>(f: &F, a: &[F::Elem], c: &F::Elem, b: &[F::Elem]) -> Vec<F::Elem> {
    a.iter()
        .zip(b)
        .map(|(x, y)| if f.is_zero(y) { x.clone() } else { f.sub(x, &f.mul(c, y)) })
        .collect()
}

pub fn scale_vec<F: ValuedField>(f: &F, c: &F::Elem, v: &[F::Elem]) -> Vec<F::Elem> {
    v.iter().map(|x| f.mul(c, x)).collect()
}

/// Gauss-Jordan elimination of `[a | b]`; returns `a^{-1} b`, or `None` if
/// `a` is singular.
pub fn solve<F: ValuedField>(f: &F, a: &Mat<F::Elem>, b: &Mat<F::Elem>) -> Option<Mat<F::Elem>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "square matrix required");
    assert_eq!(n, b.nrows(), "shape mismatch");
    let m = b.ncols();
    let mut rows: Vec<Vec<F::Elem>> = (0..n)
        .map(|i| {
            let mut r = a.row(i);
            r.extend(b.row(i));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| !f.is_zero(&rows[i][col]))?;
        rows.swap(col, piv);
        let inv = f.inv(&rows[col][col]).expect("nonzero pivot");
        rows[col] = scale_vec(f, &inv, &rows[col]);
        for i in 0..n {
            if i != col && !f.is_zero(&rows[i][col]) {
                let c = rows[i][col].clone();
                rows[i] = axpy(f, &rows[i], &c, &rows[col]);
            }
        }
    }
    Some(Mat::from_fn(n, m, |i, j| rows[i][n + j].clone()))
}

pub fn inverse<F: ValuedField>(f: &F, a: &Mat<F::Elem>) -> Option<Mat<F::Elem>> {
    solve(f, a, &identity(f, a.nrows()))
}

pub fn det<F: ValuedField>(f: &F, a: &Mat<F::Elem>) -> F::Elem {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "square matrix required");
    let mut rows: Vec<Vec<F::Elem>> = (0..n).map(|i| a.row(i)).collect();
    let mut acc = f.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&i| !f.is_zero(&rows[i][col])) else {
            return f.zero();
        };
        if piv != col {
            rows.swap(col, piv);
            acc = f.neg(&acc);
        }
        acc = f.mul(&acc, &rows[col][col]);
        let inv = f.inv(&rows[col][col]).expect("nonzero pivot");
        for i in col + 1..n {
            if !f.is_zero(&rows[i][col]) {
                let c = f.mul(&rows[i][col], &inv);
                rows[i] = axpy(f, &rows[i], &c, &rows[col]);
            }
        }
    }
    acc
}

/// Rank together with the pivot rows of a column echelon form of `a`.
pub fn column_pivots<F: ValuedField>(f: &F, a: &Mat<F::Elem>) -> Vec<usize> {
    let mut cols = a.columns();
    let mut pivots = Vec::new();
    let mut remaining: Vec<usize> = (0..cols.len()).collect();
    for row in 0..a.nrows() {
        let Some(pos) = remaining.iter().position(|&j| !f.is_zero(&cols[j][row])) else {
            continue;
        };
        let j = remaining.remove(pos);
        pivots.push(row);
        let inv = f.inv(&cols[j][row]).expect("nonzero pivot");
        let pivot_col = scale_vec(f, &inv, &cols[j]);
        for &k in &remaining {
            if !f.is_zero(&cols[k][row]) {
                let c = cols[k][row].clone();
                cols[k] = axpy(f, &cols[k], &c, &pivot_col);
            }
        }
        cols[j] = pivot_col;
    }
    pivots
}

pub fn rank<F: ValuedField>(f: &F, a: &Mat<F::Elem>) -> usize {
    column_pivots(f, a).len()
}

/// Kronecker product.
pub fn kron<F: ValuedField>(f: &F, a: &Mat<F::Elem>, b: &Mat<F::Elem>) -> Mat<F::Elem> {
    let (ra, ca, rb, cb) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    Mat::from_fn(ra * rb, ca * cb, |i, j| f.mul(a.get(i / rb, j / cb), b.get(i % rb, j % cb)))
}
