//! The braided category of graded vector spaces underlying both boson models.
//!
//! Objects are finite sums of lines graded by rational multiples of a fixed
//! constant omega; the braiding of two lines of degrees a*omega and b*omega is
//! the scalar Q^{a b}, where Q = e^{kappa omega^2} = q^{-2}. Neither kappa nor
//! omega is ever stored on its own: only Q enters any formula.

use crate::linalg::Matrix;
use crate::scalar::{QScalar, Rat, ScalarContext, ScalarError};

/// A graded object: the i-th basis line carries degree `degrees[i]` (in units
/// of omega). The entry order fixes the basis ordering for all matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedObject {
    pub degrees: Vec<Rat>,
}

impl GradedObject {
    pub fn new(degrees: Vec<Rat>) -> Self {
        GradedObject { degrees }
    }

    pub fn line(a: Rat) -> Self {
        GradedObject { degrees: vec![a] }
    }

    pub fn from_ints(degrees: &[i64]) -> Self {
        GradedObject {
            degrees: degrees.iter().map(|&d| Rat::from_integer(d)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    /// Degrees of the tensor product: sums, ordered with `self` major.
    pub fn tensor(&self, other: &GradedObject) -> GradedObject {
        let mut degrees = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.degrees {
            for b in &other.degrees {
                degrees.push(a + b);
            }
        }
        GradedObject { degrees }
    }
}

/// Braiding data: Q = e^{kappa omega^2}, expressed as q^{-2}.
#[derive(Debug, Clone)]
pub struct BraidingContext {
    ctx: ScalarContext,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

impl BraidingContext {
    pub fn new(ctx: &ScalarContext) -> Self {
        BraidingContext { ctx: ctx.clone() }
    }

    pub fn scalar_context(&self) -> &ScalarContext {
        &self.ctx
    }

    /// Q = q^{-2}.
    pub fn q_cap(&self) -> QScalar {
        self.ctx.q_int_pow(-2)
    }

    /// Q^e for a rational exponent; errs if the power leaves the q^(1/D) lattice.
    pub fn q_cap_pow(&self, e: Rat) -> Result<QScalar, ScalarError> {
        self.ctx.q_pow(e * Rat::from_integer(-2))
    }

    /// The braiding c_{V,W}: V (x) W -> W (x) V, sending basis vector (i,j)
    /// to Q^{a_i b_j} (j,i).
    pub fn braiding_matrix(&self, v: &GradedObject, w: &GradedObject) -> Result<Matrix, ScalarError> {
        let (dv, dw) = (v.dim(), w.dim());
        let mut m = Matrix::zero(dv * dw, dv * dw, &self.ctx);
        for (i, a) in v.degrees.iter().enumerate() {
            for (j, b) in w.degrees.iter().enumerate() {
                let s = self.q_cap_pow(a * b)?;
                // column (i,j) in V(x)W, row (j,i) in W(x)V
                m.set(j * dv + i, i * dw + j, s);
            }
        }
        Ok(m)
    }

    /// Inverse braiding c_{V,W}^{-1}: W (x) V -> V (x) W.
    pub fn inverse_braiding_matrix(&self, v: &GradedObject, w: &GradedObject) -> Result<Matrix, ScalarError> {
        let (dv, dw) = (v.dim(), w.dim());
        let mut m = Matrix::zero(dv * dw, dv * dw, &self.ctx);
        for (i, a) in v.degrees.iter().enumerate() {
            for (j, b) in w.degrees.iter().enumerate() {
                let s = self.q_cap_pow(-(a * b))?;
                m.set(i * dw + j, j * dv + i, s);
            }
        }
        Ok(m)
    }

    /// Half-braiding of iota^{+-}(V) against W:
    /// plus gives c_{V,W}, minus gives c_{W,V}^{-1} (both V (x) W -> W (x) V).
    pub fn half_braiding(&self, side: Side, v: &GradedObject, w: &GradedObject) -> Result<Matrix, ScalarError> {
        match side {
            Side::Plus => self.braiding_matrix(v, w),
            Side::Minus => {
                let (dv, dw) = (v.dim(), w.dim());
                let mut m = Matrix::zero(dv * dw, dv * dw, &self.ctx);
                for (i, a) in v.degrees.iter().enumerate() {
                    for (j, b) in w.degrees.iter().enumerate() {
                        let s = self.q_cap_pow(-(a * b))?;
                        m.set(j * dv + i, i * dw + j, s);
                    }
                }
                Ok(m)
            }
        }
    }

    /// Mutual transparency test: c_{W,V} o c_{V,W} = id, which holds iff
    /// Q^{2 a_i b_j} = 1 for all cross-products of degrees.
    pub fn mutually_transparent(&self, v: &GradedObject, w: &GradedObject) -> Result<bool, ScalarError> {
        let c_vw = self.braiding_matrix(v, w)?;
        let c_wv = self.braiding_matrix(w, v)?;
        Ok(c_wv.mul(&c_vw) == Matrix::identity(v.dim() * w.dim(), &self.ctx))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bctx() -> BraidingContext {
        BraidingContext::new(&ScalarContext::generic(2))
    }

    #[test]
    fn braiding_on_single_lines() {
        let b = bctx();
        let one = GradedObject::from_ints(&[1]);
        let m = b.braiding_matrix(&one, &one).unwrap();
        assert_eq!(m.at(0, 0), &b.q_cap());

        let zero = GradedObject::from_ints(&[0]);
        let any = GradedObject::from_ints(&[3]);
        let m = b.braiding_matrix(&zero, &any).unwrap();
        assert!(m.at(0, 0).is_one());
    }

    #[test]
    fn braiding_two_dim_flip() {
        let b = bctx();
        let v = GradedObject::from_ints(&[1, -1]);
        let w = GradedObject::from_ints(&[1]);
        let m = b.braiding_matrix(&v, &w).unwrap();
        // (i=0,j=0) -> (j=0,i=0) with Q; (i=1,j=0) -> (0,1) with Q^{-1}
        assert_eq!(m.at(0, 0), &b.q_cap());
        assert_eq!(m.at(1, 1), &b.q_cap().invert().unwrap());
    }

    #[test]
    fn half_braidings() {
        let b = bctx();
        let one = GradedObject::from_ints(&[1]);
        let two = GradedObject::from_ints(&[2]);
        let zero = GradedObject::from_ints(&[0]);

        let m = b.half_braiding(Side::Minus, &one, &one).unwrap();
        assert_eq!(m.at(0, 0), &b.q_cap().invert().unwrap());

        let m = b.half_braiding(Side::Plus, &one, &two).unwrap();
        assert_eq!(m.at(0, 0), &b.q_cap().pow(2).unwrap());

        let m = b.half_braiding(Side::Minus, &one, &zero).unwrap();
        assert!(m.at(0, 0).is_one());
    }

    #[test]
    fn inverse_braiding_is_inverse() {
        let b = bctx();
        let v = GradedObject::new(vec![Rat::new(1, 2), Rat::new(-3, 2)]);
        let w = GradedObject::from_ints(&[1, 2]);
        let c = b.braiding_matrix(&v, &w).unwrap();
        let ci = b.inverse_braiding_matrix(&v, &w).unwrap();
        assert_eq!(ci.mul(&c), Matrix::identity(4, b.scalar_context()));
    }

    #[test]
    fn hexagon_scalar_identity() {
        // Q^{a(b+c)} = Q^{ab} Q^{ac} for rational triples in the lattice.
        let b = bctx();
        let samples = [
            (Rat::new(1, 2), Rat::new(3, 2), Rat::new(-1, 1)),
            (Rat::new(2, 1), Rat::new(-1, 2), Rat::new(5, 2)),
            (Rat::new(-3, 2), Rat::new(1, 1), Rat::new(1, 2)),
        ];
        for (a, x, y) in samples {
            let lhs = b.q_cap_pow(a * (x + y)).unwrap();
            let rhs = b.q_cap_pow(a * x).unwrap().mul(&b.q_cap_pow(a * y).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn transparency_iff_degree_products_vanish_generically() {
        let b = bctx();
        let v = GradedObject::from_ints(&[1]);
        let w0 = GradedObject::from_ints(&[0]);
        let w1 = GradedObject::from_ints(&[2]);
        assert!(b.mutually_transparent(&v, &w0).unwrap());
        assert!(!b.mutually_transparent(&v, &w1).unwrap());
    }
}
