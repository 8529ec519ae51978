//! Dense exact linear algebra over [`QScalar`]: products, Kronecker products,
//! row reduction, kernels, rank and inverses. All pivots are exact field
//! elements; there is no pivot-size heuristics beyond preferring short
//! representations.

use crate::scalar::{QScalar, ScalarContext};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<QScalar>,
    ctx: ScalarContext,
}

impl std::fmt::Debug for Matrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| self.at(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize, ctx: &ScalarContext) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![ctx.zero(); rows * cols],
            ctx: ctx.clone(),
        }
    }

    pub fn identity(n: usize, ctx: &ScalarContext) -> Matrix {
        let mut m = Matrix::zero(n, n, ctx);
        for i in 0..n {
            m.set(i, i, ctx.one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, ctx: &ScalarContext, f: impl Fn(usize, usize) -> QScalar) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data, ctx: ctx.clone() }
    }

    pub fn diagonal(entries: &[QScalar], ctx: &ScalarContext) -> Matrix {
        let n = entries.len();
        let mut m = Matrix::zero(n, n, ctx);
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn context(&self) -> &ScalarContext {
        &self.ctx
    }

    pub fn at(&self, r: usize, c: usize) -> &QScalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: QScalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, &self.ctx, |r, c| self.at(c, r).clone())
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, &self.ctx, |r, c| {
            self.at(r, c).add(other.at(r, c))
        })
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, &self.ctx, |r, c| {
            self.at(r, c).sub(other.at(r, c))
        })
    }

    pub fn neg(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, &self.ctx, |r, c| self.at(r, c).neg())
    }

    pub fn scale(&self, s: &QScalar) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, &self.ctx, |r, c| self.at(r, c).mul(s))
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matrix dimension mismatch");
        let mut out = Matrix::zero(self.rows, other.cols, &self.ctx);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.at(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let t = out.at(r, c).add(&a.mul(b));
                    out.set(r, c, t);
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[QScalar]) -> Vec<QScalar> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| {
                let mut acc = self.ctx.zero();
                for c in 0..self.cols {
                    if !self.at(r, c).is_zero() && !v[c].is_zero() {
                        acc = acc.add(&self.at(r, c).mul(&v[c]));
                    }
                }
                acc
            })
            .collect()
    }

    /// Kronecker product with the usual (row-major) index convention:
    /// `(A (x) B)[(i,j),(k,l)] = A[i,k] B[j,l]` and `(i,j) = i*B.rows + j`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zero(self.rows * other.rows, self.cols * other.cols, &self.ctx);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.at(j, l);
                        if b.is_zero() {
                            continue;
                        }
                        out.set(i * other.rows + j, k * other.cols + l, a.mul(b));
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &Matrix) -> Matrix {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn pow(&self, e: u32) -> Matrix {
        assert_eq!(self.rows, self.cols);
        let mut acc = Matrix::identity(self.rows, &self.ctx);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Reduced row echelon form; returns (rref, pivot column indices).
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            // Prefer a pivot with a short canonical form to slow coefficient growth.
            let mut best: Option<(usize, usize)> = None;
            for r in row..m.rows {
                if !m.at(r, col).is_zero() {
                    let len = m.at(r, col).canonical_string().len();
                    if best.map_or(true, |(_, l)| len < l) {
                        best = Some((r, len));
                    }
                }
            }
            let Some((piv, _)) = best else { continue };
            m.swap_rows(row, piv);
            let inv = m.at(row, col).invert().expect("pivot nonzero");
            for c in col..m.cols {
                let v = m.at(row, c).mul(&inv);
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r != row && !m.at(r, col).is_zero() {
                    let f = m.at(r, col).clone();
                    for c in col..m.cols {
                        let v = m.at(r, c).sub(&f.mul(m.at(row, c)));
                        m.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel {x : A x = 0}, as column vectors.
    pub fn kernel_basis(&self) -> Vec<Vec<QScalar>> {
        let (r, pivots) = self.rref();
        let mut basis = Vec::new();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![self.ctx.zero(); self.cols];
            v[free] = self.ctx.one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = r.at(i, free).neg();
            }
            basis.push(v);
        }
        basis
    }

    /// Basis of the left kernel {x : x^T A = 0}.
    pub fn left_kernel_basis(&self) -> Vec<Vec<QScalar>> {
        self.transpose().kernel_basis()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::zero(n, 2 * n, &self.ctx);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.at(r, c).clone());
            }
            aug.set(r, n + r, self.ctx.one());
        }
        let (rr, pivots) = aug.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
            return None;
        }
        Some(Matrix::from_fn(n, n, &self.ctx, |r, c| rr.at(r, n + c).clone()))
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Column-span comparison: do the columns of `self` and `other` span the
    /// same subspace?
    pub fn same_column_span(&self, other: &Matrix) -> bool {
        assert_eq!(self.rows, other.rows);
        let ra = self.rank();
        let rb = other.rank();
        if ra != rb {
            return false;
        }
        let joined = self.hstack(other);
        joined.rank() == ra
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        Matrix::from_fn(self.rows, self.cols + other.cols, &self.ctx, |r, c| {
            if c < self.cols {
                self.at(r, c).clone()
            } else {
                other.at(r, c - self.cols).clone()
            }
        })
    }

    pub fn from_columns(cols: &[Vec<QScalar>], rows: usize, ctx: &ScalarContext) -> Matrix {
        Matrix::from_fn(rows, cols.len(), ctx, |r, c| cols[c][r].clone())
    }

    /// Submatrix on the given row and column index sets (in order).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), &self.ctx, |r, c| {
            self.at(rows[r], cols[c]).clone()
        })
    }

    pub fn column(&self, c: usize) -> Vec<QScalar> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn to_canonical_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.at(r, c).canonical_string()).collect())
            .collect()
    }

    pub fn from_canonical_strings(
        rows: &[Vec<String>],
        ctx: &ScalarContext,
    ) -> Result<Matrix, crate::scalar::ScalarError> {
        let nr = rows.len();
        let nc = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(nr * nc);
        for row in rows {
            assert_eq!(row.len(), nc, "ragged matrix");
            for s in row {
                data.push(QScalar::parse(ctx, s)?);
            }
        }
        Ok(Matrix { rows: nr, cols: nc, data, ctx: ctx.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q_number;

    fn ctx() -> ScalarContext {
        ScalarContext::generic(1)
    }

    #[test]
    fn rref_and_kernel() {
        let ctx = ctx();
        // rows (1, 2), (2, 4): rank 1, kernel spanned by (-2, 1).
        let m = Matrix::from_fn(2, 2, &ctx, |r, c| {
            ctx.from_int([[1, 2], [2, 4]][r][c])
        });
        assert_eq!(m.rank(), 1);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        let v = &k[0];
        let img = m.apply(v);
        assert!(img.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn inverse_over_function_field() {
        let ctx = ctx();
        let q2 = q_number(2, &ctx);
        let m = Matrix::from_fn(2, 2, &ctx, |r, c| match (r, c) {
            (0, 0) => ctx.one(),
            (0, 1) => q2.clone(),
            (1, 0) => ctx.q(),
            (1, 1) => ctx.one(),
        _ => unreachable!(),
        });
        let inv = m.inverse().expect("invertible for generic q");
        assert_eq!(m.mul(&inv), Matrix::identity(2, &ctx));
    }

    #[test]
    fn kron_convention() {
        let ctx = ctx();
        let a = Matrix::from_fn(2, 2, &ctx, |r, c| ctx.from_int([[1, 2], [3, 4]][r][c]));
        let b = Matrix::identity(2, &ctx);
        let k = a.kron(&b);
        assert_eq!(k.at(0, 0), &ctx.from_int(1));
        assert_eq!(k.at(0, 2), &ctx.from_int(2));
        assert_eq!(k.at(1, 3), &ctx.from_int(2));
    }
}
