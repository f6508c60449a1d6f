//! Small dense linear algebra: a row-major matrix and a column-pivoted
//! Householder QR used for every least-squares solve in the crate.

use crate::scalar::{dot, Real};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    /// Builds a matrix from row-major storage.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix storage size mismatch");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Copy of the listed rows, in the order given.
    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// Copy of the listed columns, in the order given.
    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]))
    }

    /// `A v`.
    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `Aᵀ v`.
    pub fn tr_mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (i, &vi) in v.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * vi;
            }
        }
        out
    }

    /// `AᵀA`, symmetric `cols × cols`.
    pub fn gram(&self) -> Self {
        let p = self.cols;
        let mut g = Self::zeros(p, p);
        for i in 0..self.rows {
            let r = self.row(i);
            for a in 0..p {
                let ra = r[a];
                if ra == T::zero() {
                    continue;
                }
                for b in a..p {
                    g.data[a * p + b] += ra * r[b];
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                g.data[a * p + b] = g.data[b * p + a];
            }
        }
        g
    }
}

/// Column-pivoted Householder QR of an `n × k` design, `A Π = Q R`.
///
/// Keeps the thin `Q` explicitly: leverages and pointwise smoothing weights
/// are read straight from its rows.
#[derive(Debug, Clone)]
pub struct QrLeastSquares<T> {
    q: Matrix<T>,
    r: Matrix<T>,
    perm: Vec<usize>,
}

impl<T: Real> QrLeastSquares<T> {
    /// Factorizes `a`; returns `None` when the smallest pivot falls at or
    /// below `rel_tol` times the largest one.
    pub fn new(a: &Matrix<T>, rel_tol: T) -> Option<Self> {
        let (n, k) = (a.rows(), a.cols());
        if k == 0 || n < k {
            return None;
        }
        // Column-major working copy: column j is work[j*n..(j+1)*n].
        let mut work = vec![T::zero(); n * k];
        for i in 0..n {
            for j in 0..k {
                work[j * n + i] = a.get(i, j);
            }
        }
        let mut perm: Vec<usize> = (0..k).collect();
        let mut reflectors: Vec<Vec<T>> = Vec::with_capacity(k);
        let mut r = Matrix::zeros(k, k);
        let mut first_pivot = T::zero();

        for step in 0..k {
            // Pivot: remaining column with the largest trailing norm.
            let mut best = step;
            let mut best_norm = T::neg_infinity();
            for j in step..k {
                let col = &work[j * n + step..(j + 1) * n];
                let nrm = dot(col, col);
                if nrm > best_norm {
                    best_norm = nrm;
                    best = j;
                }
            }
            if best != step {
                for i in 0..n {
                    work.swap(step * n + i, best * n + i);
                }
                perm.swap(step, best);
                for i in 0..step {
                    let tmp = r.get(i, step);
                    r.set(i, step, r.get(i, best));
                    r.set(i, best, tmp);
                }
            }

            let col = &work[step * n + step..(step + 1) * n];
            let norm = dot(col, col).sqrt();
            if step == 0 {
                first_pivot = norm;
                if first_pivot == T::zero() {
                    return None;
                }
            }
            if !(norm > rel_tol * first_pivot) {
                return None;
            }
            let alpha = if col[0] > T::zero() { -norm } else { norm };
            let mut v: Vec<T> = col.to_vec();
            v[0] -= alpha;
            let vnorm2 = dot(&v, &v);
            r.set(step, step, alpha);
            if vnorm2 > T::zero() {
                let scale = T::lit(2.0) / vnorm2;
                for j in step + 1..k {
                    let cj = &mut work[j * n + step..(j + 1) * n];
                    let s = dot(&v, cj) * scale;
                    for (c, &vi) in cj.iter_mut().zip(&v) {
                        *c -= s * vi;
                    }
                }
            }
            for j in step + 1..k {
                r.set(step, j, work[j * n + step]);
            }
            reflectors.push(v);
        }

        // Thin Q: apply the reflectors in reverse to the first k unit columns.
        let mut qcols = vec![T::zero(); n * k];
        for j in 0..k {
            qcols[j * n + j] = T::one();
        }
        for step in (0..k).rev() {
            let v = &reflectors[step];
            let vnorm2 = dot(v, v);
            if vnorm2 == T::zero() {
                continue;
            }
            let scale = T::lit(2.0) / vnorm2;
            for j in 0..k {
                let cj = &mut qcols[j * n + step..(j + 1) * n];
                let s = dot(v, cj) * scale;
                for (c, &vi) in cj.iter_mut().zip(v) {
                    *c -= s * vi;
                }
            }
        }
        let q = Matrix::from_fn(n, k, |i, j| qcols[j * n + i]);
        Some(Self { q, r, perm })
    }

    pub fn nrows(&self) -> usize {
        self.q.rows()
    }

    pub fn ncols(&self) -> usize {
        self.r.rows()
    }

    pub fn q(&self) -> &Matrix<T> {
        &self.q
    }

    /// Least-squares coefficients in the original column order.
    pub fn solve(&self, y: &[T]) -> Vec<T> {
        let qty = self.q.tr_mul_vec(y);
        let z = self.back_substitute(&qty);
        let mut beta = vec![T::zero(); z.len()];
        for (j, &pj) in self.perm.iter().enumerate() {
            beta[pj] = z[j];
        }
        beta
    }

    /// `Q Qᵀ y`.
    pub fn project(&self, y: &[T]) -> Vec<T> {
        let qty = self.q.tr_mul_vec(y);
        self.q.mul_vec(&qty)
    }

    /// Diagonal of the projection matrix.
    pub fn leverages(&self) -> Vec<T> {
        (0..self.q.rows())
            .map(|i| {
                let r = self.q.row(i);
                dot(r, r)
            })
            .collect()
    }

    /// For a design row `p0`, returns `u` with `p0ᵀ (AᵀA)⁻¹ a_i = uᵀ q_i`
    /// where `a_i`, `q_i` are the i-th rows of the design and of `Q`.
    pub fn row_functional(&self, p0: &[T]) -> Vec<T> {
        let k = self.ncols();
        let permuted: Vec<T> = self.perm.iter().map(|&j| p0[j]).collect();
        // Forward substitution with Rᵀ (lower triangular).
        let mut u = vec![T::zero(); k];
        for i in 0..k {
            let mut s = permuted[i];
            for j in 0..i {
                s -= self.r.get(j, i) * u[j];
            }
            u[i] = s / self.r.get(i, i);
        }
        u
    }

    fn back_substitute(&self, rhs: &[T]) -> Vec<T> {
        let k = self.ncols();
        let mut z = vec![T::zero(); k];
        for i in (0..k).rev() {
            let mut s = rhs[i];
            for j in i + 1..k {
                s -= self.r.get(i, j) * z[j];
            }
            z[i] = s / self.r.get(i, i);
        }
        z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_matches_explicit_product() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]);
        let g = a.gram();
        assert_eq!(g.row(0), &[35.0, 44.0]);
        assert_eq!(g.row(1), &[44.0, 56.0]);
    }

    #[test]
    fn qr_solves_square_system() {
        let a = Matrix::from_rows(&[vec![2.0f64, 1.0], vec![1.0, 3.0]]);
        let qr = QrLeastSquares::new(&a, 1e-12).unwrap();
        let beta = qr.solve(&[3.0, 5.0]);
        assert!((beta[0] - 0.8).abs() < 1e-14);
        assert!((beta[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn qr_flags_collinear_columns() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 6.0]]);
        assert!(QrLeastSquares::new(&a, 1e-10).is_none());
    }

    #[test]
    fn row_functional_reproduces_hat_entries() {
        let a = Matrix::from_rows(&[
            vec![1.0f64, 0.0, 0.0],
            vec![1.0, 0.5, 0.25],
            vec![1.0, 1.0, 1.0],
            vec![1.0, 0.2, 0.04],
            vec![1.0, 0.7, 0.49],
        ]);
        let qr = QrLeastSquares::new(&a, 1e-12).unwrap();
        // Row functional of design row i gives row i of the hat matrix.
        let u = qr.row_functional(a.row(1));
        let h11 = dot(&u, qr.q().row(1));
        assert!((h11 - qr.leverages()[1]).abs() < 1e-13);
    }
}
