//! Presentations of U_q(sl2), U_q(Lsl2) and their hbar-variants, the
//! representations used throughout (finite-dimensional irreducibles,
//! evaluation pullbacks, one-dimensional winding modules, truncated
//! q-oscillators, cyclic root-of-unity modules), tensor products, duals,
//! central characters and exact relation checking.
//!
//! Weight data comes in two forms. The k-form stores the diagonal
//! k-eigenvalue per basis vector. The hbar-form stores a pair (s, m): the
//! group-like e^{hbar h} acts by q^s, and m is the winding integer of the
//! 2 pi i m / hbar part of the h-eigenvalue. Raising/lowering generators
//! shift s by +-2 and never change m.

use crate::linalg::Matrix;
use crate::scalar::{QScalar, Rat, ScalarContext, ScalarError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RepError {
    #[error("flavor mismatch: {0:?} vs {1:?}")]
    FlavorMismatch(Flavor, Flavor),
    #[error("operation requires flavor {expected:?}, got {got:?}")]
    WrongFlavor { expected: Flavor, got: Flavor },
    #[error("dimension {0} clashes with the root of unity order (need n+1 <= ord q^2 = {1})")]
    DimensionRootClash(usize, u32),
    #[error("operation requires root-of-unity mode")]
    NotRootMode,
    #[error("operation requires generic mode")]
    NotGenericMode,
    #[error("spectral parameter must be invertible")]
    NonInvertibleParameter,
    #[error("inconsistent cyclic parameters: {0}")]
    InconsistentParameters(String),
    #[error("central element is not scalar on this representation")]
    NonScalarCentral,
    #[error("weight is not an integer power of q")]
    NonPowerOfQWeight,
    #[error("truncation depth must be at least 2")]
    TruncationTooShallow,
    #[error("scalar error: {0}")]
    Scalar(#[from] ScalarError),
    #[error("serialization error: {0}")]
    Serde(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flavor {
    /// U_q(sl2): generators e+, e-, k.
    UqSl2,
    /// U_q(Lsl2): generators e0+-, e1+-, k = k0 = k1^{-1}.
    UqLSl2,
    /// hbar-form of the loop algebra: h0 instead of k, weights are (s, m) pairs.
    UhbarLSl2,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightData {
    /// k-eigenvalue per basis vector (k = k0 for the loop flavor).
    K(Vec<QScalar>),
    /// (s, winding m) per basis vector; e^{hbar h0} acts by q^s.
    H(Vec<(Rat, i64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum RepMatrices {
    Finite { e_plus: Matrix, e_minus: Matrix },
    Loop { e0_plus: Matrix, e0_minus: Matrix, e1_plus: Matrix, e1_minus: Matrix },
}

/// A finite-dimensional representation with diagonal Cartan action.
///
/// `borel_only` marks modules of the positive Borel subalgebra (only the
/// plus generators and the Cartan act; minus matrices are stored as zero and
/// not subject to relations). `safe_descent` is the truncation bookkeeping
/// for cut-off oscillators: entry j is how many lowering steps from basis
/// vector j stay inside the retained window (`None` when untruncated).
#[derive(Debug, Clone)]
pub struct QGroupRep {
    pub flavor: Flavor,
    pub dim: usize,
    pub weights: WeightData,
    pub matrices: RepMatrices,
    pub borel_only: bool,
    pub safe_descent: Option<Vec<u32>>,
    ctx: ScalarContext,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub flavor: Flavor,
    pub checked: usize,
    pub skipped_boundary_columns: usize,
    pub failures: Vec<String>,
}

impl RelationReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Eigenvalues of the central elements x, y, z, c at a root of unity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CentralCharacter {
    pub x: QScalar,
    pub y: QScalar,
    pub z: QScalar,
    pub c: QScalar,
}

impl QGroupRep {
    pub fn context(&self) -> &ScalarContext {
        &self.ctx
    }

    /// Diagonal matrix of k (k0 in the loop flavor); for the hbar-form this
    /// is the group-like e^{hbar h0} = diag(q^s).
    pub fn k_matrix(&self) -> Matrix {
        let entries = self.k_eigenvalues();
        Matrix::diagonal(&entries, &self.ctx)
    }

    pub fn k_eigenvalues(&self) -> Vec<QScalar> {
        match &self.weights {
            WeightData::K(v) => v.clone(),
            WeightData::H(pairs) => pairs
                .iter()
                .map(|(s, _)| self.ctx.q_pow(*s).expect("weight in lattice"))
                .collect(),
        }
    }

    pub fn h_pairs(&self) -> Option<&[(Rat, i64)]> {
        match &self.weights {
            WeightData::H(p) => Some(p),
            WeightData::K(_) => None,
        }
    }

    pub fn e_plus(&self) -> &Matrix {
        match &self.matrices {
            RepMatrices::Finite { e_plus, .. } => e_plus,
            RepMatrices::Loop { .. } => panic!("finite-form generator on loop representation"),
        }
    }

    pub fn e_minus(&self) -> &Matrix {
        match &self.matrices {
            RepMatrices::Finite { e_minus, .. } => e_minus,
            RepMatrices::Loop { .. } => panic!("finite-form generator on loop representation"),
        }
    }

    pub fn loop_matrices(&self) -> (&Matrix, &Matrix, &Matrix, &Matrix) {
        match &self.matrices {
            RepMatrices::Loop { e0_plus, e0_minus, e1_plus, e1_minus } => {
                (e0_plus, e0_minus, e1_plus, e1_minus)
            }
            RepMatrices::Finite { .. } => panic!("loop generator on finite representation"),
        }
    }

    /// Generator matrices relevant for intertwiner equations, with names.
    pub fn generator_matrices(&self) -> Vec<(&'static str, Matrix)> {
        let mut gens = vec![("k", self.k_matrix())];
        match &self.matrices {
            RepMatrices::Finite { e_plus, e_minus } => {
                gens.push(("e+", e_plus.clone()));
                if !self.borel_only {
                    gens.push(("e-", e_minus.clone()));
                }
            }
            RepMatrices::Loop { e0_plus, e0_minus, e1_plus, e1_minus } => {
                gens.push(("e0+", e0_plus.clone()));
                gens.push(("e1+", e1_plus.clone()));
                if !self.borel_only {
                    gens.push(("e0-", e0_minus.clone()));
                    gens.push(("e1-", e1_minus.clone()));
                }
            }
        }
        gens
    }
}

/// Multiplicative order of q^2 in root-of-unity mode.
pub fn order_of_q_squared(ctx: &ScalarContext) -> Result<u32, RepError> {
    ctx.order_of_q_squared().ok_or(RepError::NotRootMode)
}

/// The (n+1)-dimensional irreducible of U_q(sl2): k = diag(q^n, ..., q^{-n}),
/// e+ superdiagonal ([n]_q, [n-1]_q, ..., 1), e- subdiagonal (1, ..., [n]_q).
pub fn make_vn(n: u32, ctx: &ScalarContext) -> Result<QGroupRep, RepError> {
    if let Some(npr) = ctx.order_of_q_squared() {
        if n + 1 > npr {
            return Err(RepError::DimensionRootClash(n as usize + 1, npr));
        }
    }
    let dim = n as usize + 1;
    let weights: Vec<QScalar> = (0..dim)
        .map(|i| ctx.q_int_pow(n as i64 - 2 * i as i64))
        .collect();
    let mut e_plus = Matrix::zero(dim, dim, ctx);
    let mut e_minus = Matrix::zero(dim, dim, ctx);
    // e+ v_i = [n-i+1]_q v_{i-1}, e- v_i = [i+1]_q v_{i+1}
    for i in 1..dim {
        e_plus.set(i - 1, i, crate::scalar::q_number(n as i64 - i as i64 + 1, ctx));
    }
    for i in 0..dim - 1 {
        e_minus.set(i + 1, i, crate::scalar::q_number(i as i64 + 1, ctx));
    }
    Ok(QGroupRep {
        flavor: Flavor::UqSl2,
        dim,
        weights: WeightData::K(weights),
        matrices: RepMatrices::Finite { e_plus, e_minus },
        borel_only: false,
        safe_descent: None,
        ctx: ctx.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopForm {
    K,
    Hbar,
}

/// Pullback along the evaluation homomorphism ev_z:
/// e0+- = q^{-+1} z^{+-1} e-+, e1+- = e+-, k0 = k^{-1} (h0 = -h).
pub fn evaluation_pullback(
    v: &QGroupRep,
    z: &QScalar,
    form: LoopForm,
) -> Result<QGroupRep, RepError> {
    if v.flavor != Flavor::UqSl2 {
        return Err(RepError::WrongFlavor { expected: Flavor::UqSl2, got: v.flavor });
    }
    if z.is_zero() {
        return Err(RepError::NonInvertibleParameter);
    }
    let ctx = &v.ctx;
    let z_inv = z.invert()?;
    let e0_plus = v.e_minus().scale(&ctx.q_int_pow(-1).mul(z));
    let e0_minus = v.e_plus().scale(&ctx.q().mul(&z_inv));
    let e1_plus = v.e_plus().clone();
    let e1_minus = v.e_minus().clone();
    let weights = match form {
        LoopForm::K => WeightData::K(
            v.k_eigenvalues()
                .iter()
                .map(|k| k.invert().expect("k eigenvalues invertible"))
                .collect(),
        ),
        LoopForm::Hbar => {
            let mut pairs = Vec::with_capacity(v.dim);
            for k in v.k_eigenvalues() {
                let s = k.as_q_power().map_err(|_| RepError::NonPowerOfQWeight)?;
                pairs.push((Rat::from_integer(-s), 0));
            }
            WeightData::H(pairs)
        }
    };
    Ok(QGroupRep {
        flavor: match form {
            LoopForm::K => Flavor::UqLSl2,
            LoopForm::Hbar => Flavor::UhbarLSl2,
        },
        dim: v.dim,
        weights,
        matrices: RepMatrices::Loop { e0_plus, e0_minus, e1_plus, e1_minus },
        borel_only: false,
        safe_descent: None,
        ctx: ctx.clone(),
    })
}

/// The one-dimensional module X_m: all generators act by zero, h0 acts by
/// 2 pi i m / hbar (weight pair (0, m)), so e^{hbar h0} = 1.
pub fn make_xm(m: i64, ctx: &ScalarContext) -> QGroupRep {
    let z = Matrix::zero(1, 1, ctx);
    QGroupRep {
        flavor: Flavor::UhbarLSl2,
        dim: 1,
        weights: WeightData::H(vec![(Rat::from_integer(0), m)]),
        matrices: RepMatrices::Loop {
            e0_plus: z.clone(),
            e0_minus: z.clone(),
            e1_plus: z.clone(),
            e1_minus: z,
        },
        borel_only: false,
        safe_descent: None,
        ctx: ctx.clone(),
    }
}

/// Depth-N truncation of the q-oscillator Borel module Q_{+,m}(z) on basis
/// v_0, v_{-1}, ..., v_{-(N-1)}:
/// e1+ . v_j = v_{j-1} (cut below the window),
/// e0+ . v_j = z (1 - q^{2j}) / (q - q^{-1})^2 v_{j+1},
/// h0-weight of v_j is (2j + m, winding 0).
pub fn make_q_oscillator(
    m: i64,
    z: &QScalar,
    truncation: u32,
    ctx: &ScalarContext,
) -> Result<QGroupRep, RepError> {
    if truncation < 2 {
        return Err(RepError::TruncationTooShallow);
    }
    if z.is_zero() {
        return Err(RepError::NonInvertibleParameter);
    }
    let n = truncation as usize;
    let mut e1_plus = Matrix::zero(n, n, ctx);
    let mut e0_plus = Matrix::zero(n, n, ctx);
    let denom = ctx
        .q()
        .sub(&ctx.q_int_pow(-1))
        .pow(2)?
        .invert()
        .expect("q - q^{-1} invertible");
    for idx in 0..n {
        let j = -(idx as i64);
        if idx + 1 < n {
            e1_plus.set(idx + 1, idx, ctx.one());
        }
        if idx >= 1 {
            let factor = z
                .mul(&ctx.one().sub(&ctx.q_int_pow(2 * j)))
                .mul(&denom);
            e0_plus.set(idx - 1, idx, factor);
        }
    }
    let pairs: Vec<(Rat, i64)> = (0..n)
        .map(|idx| (Rat::from_integer(-2 * (idx as i64) + m), 0))
        .collect();
    let zero = Matrix::zero(n, n, ctx);
    Ok(QGroupRep {
        flavor: Flavor::UhbarLSl2,
        dim: n,
        weights: WeightData::H(pairs),
        matrices: RepMatrices::Loop {
            e0_plus,
            e0_minus: zero.clone(),
            e1_plus,
            e1_minus: zero,
        },
        borel_only: true,
        safe_descent: Some((0..n).map(|idx| (n - 1 - idx) as u32).collect()),
        ctx: ctx.clone(),
    })
}

/// Cyclic / semi-cyclic module at a root of unity, in the normal form
/// k = diag(lambda q^{-2j}), e- the cyclic lowering operator with corner a,
/// e+ determined by the commutation relation with corner b.
pub fn make_cyclic(
    a: &QScalar,
    b: &QScalar,
    lambda: &QScalar,
    ctx: &ScalarContext,
) -> Result<QGroupRep, RepError> {
    let npr = order_of_q_squared(ctx)? as usize;
    if lambda.is_zero() {
        return Err(RepError::InconsistentParameters("lambda must be invertible".into()));
    }
    let lam_inv = lambda.invert()?;
    let qdiff_inv = ctx.q().sub(&ctx.q_int_pow(-1)).invert()?;
    let weights: Vec<QScalar> = (0..npr)
        .map(|j| lambda.mul(&ctx.q_int_pow(-2 * j as i64)))
        .collect();
    let mut e_minus = Matrix::zero(npr, npr, ctx);
    for j in 0..npr - 1 {
        e_minus.set(j + 1, j, ctx.one());
    }
    e_minus.set(0, npr - 1, a.clone());
    // d_j = (lambda q^{-2j} - lambda^{-1} q^{2j}) / (q - q^{-1});
    // c_1 = a b + d_0, c_{j+1} = c_j + d_j; the closing equation
    // a b - c_{N'-1} = d_{N'-1} holds automatically since sum_j d_j = 0.
    let d = |j: i64| {
        lambda
            .mul(&ctx.q_int_pow(-2 * j))
            .sub(&lam_inv.mul(&ctx.q_int_pow(2 * j)))
            .mul(&qdiff_inv)
    };
    let mut e_plus = Matrix::zero(npr, npr, ctx);
    e_plus.set(npr - 1, 0, b.clone());
    let mut c = a.mul(b).add(&d(0));
    for j in 1..npr {
        e_plus.set(j - 1, j, c.clone());
        c = c.add(&d(j as i64));
    }
    let rep = QGroupRep {
        flavor: Flavor::UqSl2,
        dim: npr,
        weights: WeightData::K(weights),
        matrices: RepMatrices::Finite { e_plus, e_minus },
        borel_only: false,
        safe_descent: None,
        ctx: ctx.clone(),
    };
    let report = check_relations(&rep);
    if !report.pass() {
        return Err(RepError::InconsistentParameters(report.failures.join("; ")));
    }
    Ok(rep)
}

/// Eigenvalues of the central elements x = ((q-q^{-1}) e-)^{N'},
/// y = ((q-q^{-1}) e+)^{N'}, z = k^{-N'},
/// c = q k^{-1} + q^{-1} k + (q-q^{-1})^2 e+ e-.
pub fn central_character(v: &QGroupRep) -> Result<CentralCharacter, RepError> {
    if v.flavor != Flavor::UqSl2 {
        return Err(RepError::WrongFlavor { expected: Flavor::UqSl2, got: v.flavor });
    }
    let npr = order_of_q_squared(&v.ctx)?;
    let ctx = &v.ctx;
    let qdiff = ctx.q().sub(&ctx.q_int_pow(-1));
    let x_mat = v.e_minus().scale(&qdiff).pow(npr);
    let y_mat = v.e_plus().scale(&qdiff).pow(npr);
    let k = v.k_matrix();
    let k_inv = k.inverse().ok_or(RepError::NonScalarCentral)?;
    let z_mat = k_inv.pow(npr);
    let c_mat = k_inv
        .scale(&ctx.q())
        .add(&k.scale(&ctx.q_int_pow(-1)))
        .add(&v.e_plus().mul(v.e_minus()).scale(&qdiff.pow(2)?));
    Ok(CentralCharacter {
        x: scalar_of(&x_mat)?,
        y: scalar_of(&y_mat)?,
        z: scalar_of(&z_mat)?,
        c: scalar_of(&c_mat)?,
    })
}

/// Central character read through the loop action: the subalgebra generated
/// by e1+-, k1 acts as the underlying U_q(sl2)-module of an evaluation
/// representation.
pub fn central_character_via_e1(v: &QGroupRep) -> Result<CentralCharacter, RepError> {
    if v.flavor != Flavor::UqLSl2 {
        return Err(RepError::WrongFlavor { expected: Flavor::UqLSl2, got: v.flavor });
    }
    let (_, _, e1p, e1m) = v.loop_matrices();
    let k1: Vec<QScalar> = v
        .k_eigenvalues()
        .iter()
        .map(|x| x.invert().expect("k invertible"))
        .collect();
    let finite = QGroupRep {
        flavor: Flavor::UqSl2,
        dim: v.dim,
        weights: WeightData::K(k1),
        matrices: RepMatrices::Finite { e_plus: e1p.clone(), e_minus: e1m.clone() },
        borel_only: false,
        safe_descent: None,
        ctx: v.ctx.clone(),
    };
    central_character(&finite)
}

fn scalar_of(m: &Matrix) -> Result<QScalar, RepError> {
    let n = m.rows();
    let first = m.at(0, 0).clone();
    for r in 0..n {
        for c in 0..n {
            if r == c {
                if m.at(r, c) != &first {
                    return Err(RepError::NonScalarCentral);
                }
            } else if !m.at(r, c).is_zero() {
                return Err(RepError::NonScalarCentral);
            }
        }
    }
    Ok(first)
}

/// Tensor product via the coproduct of the flavor; weights add
/// (k-eigenvalues multiply), truncation bookkeeping combines by minimum.
pub fn tensor(v: &QGroupRep, w: &QGroupRep) -> Result<QGroupRep, RepError> {
    if v.flavor != w.flavor {
        return Err(RepError::FlavorMismatch(v.flavor, w.flavor));
    }
    assert!(v.ctx == w.ctx, "context mismatch in tensor");
    let ctx = &v.ctx;
    let dim = v.dim * w.dim;
    let id_v = Matrix::identity(v.dim, ctx);
    let id_w = Matrix::identity(w.dim, ctx);
    let borel = v.borel_only || w.borel_only;

    let weights = match (&v.weights, &w.weights) {
        (WeightData::K(a), WeightData::K(b)) => {
            let mut out = Vec::with_capacity(dim);
            for x in a {
                for y in b {
                    out.push(x.mul(y));
                }
            }
            WeightData::K(out)
        }
        (WeightData::H(a), WeightData::H(b)) => {
            let mut out = Vec::with_capacity(dim);
            for (sa, ma) in a {
                for (sb, mb) in b {
                    out.push((sa + sb, ma + mb));
                }
            }
            WeightData::H(out)
        }
        _ => return Err(RepError::FlavorMismatch(v.flavor, w.flavor)),
    };

    let k_v = v.k_matrix();
    let k_w = w.k_matrix();
    let k_v_inv = k_v.inverse().expect("k invertible");
    let k_w_inv = k_w.inverse().expect("k invertible");

    let matrices = match (&v.matrices, &w.matrices) {
        (
            RepMatrices::Finite { e_plus: ep_v, e_minus: em_v },
            RepMatrices::Finite { e_plus: ep_w, e_minus: em_w },
        ) => RepMatrices::Finite {
            // Delta(e+) = e+ (x) k + 1 (x) e+, Delta(e-) = e- (x) 1 + k^{-1} (x) e-
            e_plus: ep_v.kron(&k_w).add(&id_v.kron(ep_w)),
            e_minus: em_v.kron(&id_w).add(&k_v_inv.kron(em_w)),
        },
        (
            RepMatrices::Loop { e0_plus: e0p_v, e0_minus: e0m_v, e1_plus: e1p_v, e1_minus: e1m_v },
            RepMatrices::Loop { e0_plus: e0p_w, e0_minus: e0m_w, e1_plus: e1p_w, e1_minus: e1m_w },
        ) => {
            // k_0 is the stored k; k_1 = k_0^{-1}
            RepMatrices::Loop {
                e0_plus: e0p_v.kron(&k_w).add(&id_v.kron(e0p_w)),
                e0_minus: e0m_v.kron(&id_w).add(&k_v_inv.kron(e0m_w)),
                e1_plus: e1p_v.kron(&k_w_inv).add(&id_v.kron(e1p_w)),
                e1_minus: e1m_v.kron(&id_w).add(&k_v.kron(e1m_w)),
            }
        }
        _ => unreachable!("flavor equality fixes the matrix shape"),
    };

    let safe_descent = match (&v.safe_descent, &w.safe_descent) {
        (None, None) => None,
        (sv, sw) => {
            let mut out = Vec::with_capacity(dim);
            for i in 0..v.dim {
                for j in 0..w.dim {
                    let a = sv.as_ref().map_or(u32::MAX, |s| s[i]);
                    let b = sw.as_ref().map_or(u32::MAX, |s| s[j]);
                    out.push(a.min(b));
                }
            }
            Some(out)
        }
    };

    Ok(QGroupRep {
        flavor: v.flavor,
        dim,
        weights,
        matrices,
        borel_only: borel,
        safe_descent,
        ctx: ctx.clone(),
    })
}

/// Dual representation on the dual basis: rho*(g) = rho(S(g))^T with the
/// antipode of the k-form presentation.
pub fn dual(v: &QGroupRep) -> Result<QGroupRep, RepError> {
    let ctx = &v.ctx;
    let k = v.k_matrix();
    let k_inv = k.inverse().expect("k invertible");
    let weights = WeightData::K(
        v.k_eigenvalues()
            .iter()
            .map(|x| x.invert().expect("k eigenvalue invertible"))
            .collect(),
    );
    let matrices = match (&v.flavor, &v.matrices) {
        (Flavor::UqSl2, RepMatrices::Finite { e_plus, e_minus }) => RepMatrices::Finite {
            // S(e+) = -e+ k^{-1}, S(e-) = -k e-
            e_plus: e_plus.mul(&k_inv).neg().transpose(),
            e_minus: k.mul(e_minus).neg().transpose(),
        },
        (Flavor::UqLSl2, RepMatrices::Loop { e0_plus, e0_minus, e1_plus, e1_minus }) => {
            // S(e_i+) = -e_i+ k_i^{-1}, S(e_i-) = -k_i e_i-; k_0 = k, k_1 = k^{-1}
            RepMatrices::Loop {
                e0_plus: e0_plus.mul(&k_inv).neg().transpose(),
                e0_minus: k.mul(e0_minus).neg().transpose(),
                e1_plus: e1_plus.mul(&k).neg().transpose(),
                e1_minus: k_inv.mul(e1_minus).neg().transpose(),
            }
        }
        _ => {
            return Err(RepError::WrongFlavor { expected: Flavor::UqSl2, got: v.flavor });
        }
    };
    Ok(QGroupRep {
        flavor: v.flavor,
        dim: v.dim,
        weights,
        matrices,
        borel_only: v.borel_only,
        safe_descent: v.safe_descent.clone(),
        ctx: ctx.clone(),
    })
}

/// Reduction functor: hbar-form -> k-form, k_j := e^{hbar h_j}
/// (drops the winding integers).
pub fn reduce(v: &QGroupRep) -> Result<QGroupRep, RepError> {
    if v.flavor != Flavor::UhbarLSl2 {
        return Err(RepError::WrongFlavor { expected: Flavor::UhbarLSl2, got: v.flavor });
    }
    Ok(QGroupRep {
        flavor: Flavor::UqLSl2,
        dim: v.dim,
        weights: WeightData::K(v.k_eigenvalues()),
        matrices: v.matrices.clone(),
        borel_only: v.borel_only,
        safe_descent: v.safe_descent.clone(),
        ctx: v.ctx.clone(),
    })
}

/// Section functor: k-form -> hbar-form on modules whose k-eigenvalues are
/// integer powers of q; windings are set to zero.
pub fn section(v: &QGroupRep) -> Result<QGroupRep, RepError> {
    if v.flavor != Flavor::UqLSl2 {
        return Err(RepError::WrongFlavor { expected: Flavor::UqLSl2, got: v.flavor });
    }
    if v.ctx.mode() != crate::scalar::ScalarMode::Generic {
        return Err(RepError::NotGenericMode);
    }
    let mut pairs = Vec::with_capacity(v.dim);
    for k in v.k_eigenvalues() {
        let n = k.as_q_power().map_err(|_| RepError::NonPowerOfQWeight)?;
        pairs.push((Rat::from_integer(n), 0));
    }
    Ok(QGroupRep {
        flavor: Flavor::UhbarLSl2,
        dim: v.dim,
        weights: WeightData::H(pairs),
        matrices: v.matrices.clone(),
        borel_only: v.borel_only,
        safe_descent: v.safe_descent.clone(),
        ctx: v.ctx.clone(),
    })
}

/// Restrict a full loop representation to its positive Borel part (used when
/// tensoring with oscillator modules, whose category is Borel modules).
pub fn restrict_to_borel(v: &QGroupRep) -> QGroupRep {
    let mut out = v.clone();
    if let RepMatrices::Loop { e0_minus, e1_minus, .. } = &mut out.matrices {
        *e0_minus = Matrix::zero(v.dim, v.dim, &v.ctx);
        *e1_minus = Matrix::zero(v.dim, v.dim, &v.ctx);
    }
    out.borel_only = true;
    out
}

// --------------------------------------------------------------------------
// Relation checking
// --------------------------------------------------------------------------

/// Maximum number of lowering steps (towards the oscillator cut) a relation
/// word can take below its starting column. Columns of truncated modules
/// whose safe descent is smaller are skipped.
fn descent_margin(kind: &str) -> u32 {
    match kind {
        "cartan-e1+" => 1,
        "serre+(1,0)" => 3,
        "serre+(0,1)" => 1,
        _ => 0,
    }
}

struct RelationChecker<'a> {
    rep: &'a QGroupRep,
    report: RelationReport,
}

impl<'a> RelationChecker<'a> {
    fn new(rep: &'a QGroupRep) -> Self {
        RelationChecker {
            rep,
            report: RelationReport {
                flavor: rep.flavor,
                checked: 0,
                skipped_boundary_columns: 0,
                failures: Vec::new(),
            },
        }
    }

    /// Assert lhs == rhs on all columns whose truncation allows `margin`
    /// descent steps.
    fn assert_eq(&mut self, name: &str, lhs: &Matrix, rhs: &Matrix, margin: u32) {
        self.report.checked += 1;
        let dim = lhs.cols();
        for col in 0..dim {
            if let Some(sd) = &self.rep.safe_descent {
                if sd[col] < margin {
                    self.report.skipped_boundary_columns += 1;
                    continue;
                }
            }
            for row in 0..lhs.rows() {
                if lhs.at(row, col) != rhs.at(row, col) {
                    self.report.failures.push(format!(
                        "{name}: entry ({row},{col}): {} != {}",
                        lhs.at(row, col),
                        rhs.at(row, col)
                    ));
                    return;
                }
            }
        }
    }

    /// Weight-shift relation [h, e] = +-2 e in the exact sense: every nonzero
    /// entry of `e` connects weights with s-difference `shift` and equal
    /// winding (hbar-form), or k-eigenvalue ratio q^{shift} (k-form).
    fn check_weight_shift(&mut self, name: &str, e: &Matrix, shift: i64) {
        self.report.checked += 1;
        let ctx = &self.rep.ctx;
        match &self.rep.weights {
            WeightData::K(k) => {
                for r in 0..e.rows() {
                    for c in 0..e.cols() {
                        if e.at(r, c).is_zero() {
                            continue;
                        }
                        let expect = k[c].mul(&ctx.q_int_pow(shift));
                        if k[r] != expect {
                            self.report.failures.push(format!(
                                "{name}: entry ({r},{c}) violates k-weight shift by q^{shift}"
                            ));
                            return;
                        }
                    }
                }
            }
            WeightData::H(pairs) => {
                for r in 0..e.rows() {
                    for c in 0..e.cols() {
                        if e.at(r, c).is_zero() {
                            continue;
                        }
                        let (sr, mr) = pairs[r];
                        let (sc, mc) = pairs[c];
                        if sr - sc != Rat::from_integer(shift) || mr != mc {
                            self.report.failures.push(format!(
                                "{name}: entry ({r},{c}) violates h-weight shift by {shift}"
                            ));
                            return;
                        }
                    }
                }
            }
        }
    }
}

/// (K - K^{-1})/(q - q^{-1}) as a diagonal matrix.
fn cartan_quotient(k: &Matrix, ctx: &ScalarContext) -> Matrix {
    let k_inv = k.inverse().expect("k invertible");
    let qdiff_inv = ctx
        .q()
        .sub(&ctx.q_int_pow(-1))
        .invert()
        .expect("q - q^{-1} invertible (N >= 3)");
    k.sub(&k_inv).scale(&qdiff_inv)
}

fn serre_combination(a: &Matrix, b: &Matrix, ctx: &ScalarContext) -> Matrix {
    // a^3 b - [3]_q a^2 b a + [3]_q a b a^2 - b a^3
    let three = crate::scalar::q_number(3, ctx);
    let a2 = a.mul(a);
    let a3 = a2.mul(a);
    a3.mul(b)
        .sub(&a2.mul(b).mul(a).scale(&three))
        .add(&a.mul(b).mul(&a2).scale(&three))
        .sub(&b.mul(&a3))
}

/// Evaluate every defining relation of the flavor's presentation as an exact
/// matrix identity. Borel-only modules are checked on the Borel subset, and
/// truncated oscillators skip relation instances that touch the cut.
pub fn check_relations(v: &QGroupRep) -> RelationReport {
    let ctx = &v.ctx;
    let mut ck = RelationChecker::new(v);
    let k = v.k_matrix();
    match (&v.flavor, &v.matrices) {
        (Flavor::UqSl2, RepMatrices::Finite { e_plus, e_minus }) => {
            ck.check_weight_shift("k e+ k^{-1} = q^2 e+", e_plus, 2);
            if !v.borel_only {
                ck.check_weight_shift("k e- k^{-1} = q^{-2} e-", e_minus, -2);
                let comm = e_plus.commutator(e_minus);
                ck.assert_eq(
                    "[e+,e-] = (k - k^{-1})/(q - q^{-1})",
                    &comm,
                    &cartan_quotient(&k, ctx),
                    0,
                );
            }
        }
        (Flavor::UqLSl2, RepMatrices::Loop { e0_plus, e0_minus, e1_plus, e1_minus })
        | (Flavor::UhbarLSl2, RepMatrices::Loop { e0_plus, e0_minus, e1_plus, e1_minus }) => {
            // h1 = -h0, k1 = k0^{-1}: e0 shifts the stored weight by +2/-2,
            // e1 by the opposite.
            ck.check_weight_shift("[h0,e0+] = 2 e0+", e0_plus, 2);
            ck.check_weight_shift("[h0,e1+] = -2 e1+", e1_plus, -2);
            let zero = Matrix::zero(v.dim, v.dim, ctx);
            let cq0 = cartan_quotient(&k, ctx);
            if !v.borel_only {
                ck.check_weight_shift("[h0,e0-] = -2 e0-", e0_minus, -2);
                ck.check_weight_shift("[h0,e1-] = 2 e1-", e1_minus, 2);
                ck.assert_eq(
                    "[e0+,e0-] = (k0 - k0^{-1})/(q - q^{-1})",
                    &e0_plus.commutator(e0_minus),
                    &cq0,
                    0,
                );
                ck.assert_eq(
                    "[e1+,e1-] = (k1 - k1^{-1})/(q - q^{-1})",
                    &e1_plus.commutator(e1_minus),
                    &cq0.neg(),
                    0,
                );
                ck.assert_eq("[e0+,e1-] = 0", &e0_plus.commutator(e1_minus), &zero, 0);
                ck.assert_eq("[e1+,e0-] = 0", &e1_plus.commutator(e0_minus), &zero, 0);
                ck.assert_eq("serre-(0,1)", &serre_combination(e0_minus, e1_minus, ctx), &zero, 0);
                ck.assert_eq("serre-(1,0)", &serre_combination(e1_minus, e0_minus, ctx), &zero, 0);
            }
            ck.assert_eq(
                "serre+(0,1)",
                &serre_combination(e0_plus, e1_plus, ctx),
                &zero,
                descent_margin("serre+(0,1)"),
            );
            ck.assert_eq(
                "serre+(1,0)",
                &serre_combination(e1_plus, e0_plus, ctx),
                &zero,
                descent_margin("serre+(1,0)"),
            );
        }
        _ => unreachable!("flavor fixes the matrix shape"),
    }
    ck.report
}

// --------------------------------------------------------------------------
// Serialization
// --------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct RepDto {
    flavor: Flavor,
    dim: usize,
    weights: WeightsDto,
    matrices: MatricesDto,
    borel_only: bool,
    safe_descent: Option<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
enum WeightsDto {
    K(Vec<String>),
    H(Vec<(String, i64)>),
}

#[derive(Serialize, Deserialize)]
enum MatricesDto {
    Finite {
        e_plus: Vec<Vec<String>>,
        e_minus: Vec<Vec<String>>,
    },
    Loop {
        e0_plus: Vec<Vec<String>>,
        e0_minus: Vec<Vec<String>>,
        e1_plus: Vec<Vec<String>>,
        e1_minus: Vec<Vec<String>>,
    },
}

impl QGroupRep {
    pub fn to_json(&self) -> serde_json::Value {
        let weights = match &self.weights {
            WeightData::K(v) => WeightsDto::K(v.iter().map(|x| x.canonical_string()).collect()),
            WeightData::H(p) => WeightsDto::H(
                p.iter()
                    .map(|(s, m)| (format!("{}/{}", s.numer(), s.denom()), *m))
                    .collect(),
            ),
        };
        let matrices = match &self.matrices {
            RepMatrices::Finite { e_plus, e_minus } => MatricesDto::Finite {
                e_plus: e_plus.to_canonical_strings(),
                e_minus: e_minus.to_canonical_strings(),
            },
            RepMatrices::Loop { e0_plus, e0_minus, e1_plus, e1_minus } => MatricesDto::Loop {
                e0_plus: e0_plus.to_canonical_strings(),
                e0_minus: e0_minus.to_canonical_strings(),
                e1_plus: e1_plus.to_canonical_strings(),
                e1_minus: e1_minus.to_canonical_strings(),
            },
        };
        serde_json::to_value(RepDto {
            flavor: self.flavor,
            dim: self.dim,
            weights,
            matrices,
            borel_only: self.borel_only,
            safe_descent: self.safe_descent.clone(),
        })
        .expect("serializable")
    }

    pub fn from_json(value: &serde_json::Value, ctx: &ScalarContext) -> Result<QGroupRep, RepError> {
        let dto: RepDto =
            serde_json::from_value(value.clone()).map_err(|e| RepError::Serde(e.to_string()))?;
        let weights = match dto.weights {
            WeightsDto::K(v) => WeightData::K(
                v.iter()
                    .map(|s| QScalar::parse(ctx, s))
                    .collect::<Result<_, _>>()?,
            ),
            WeightsDto::H(p) => WeightData::H(
                p.iter()
                    .map(|(s, m)| {
                        let (num, den) = s
                            .split_once('/')
                            .ok_or_else(|| RepError::Serde("bad weight fraction".into()))?;
                        let n: i64 =
                            num.parse().map_err(|_| RepError::Serde("bad weight".into()))?;
                        let d: i64 =
                            den.parse().map_err(|_| RepError::Serde("bad weight".into()))?;
                        Ok((Rat::new(n, d), *m))
                    })
                    .collect::<Result<_, RepError>>()?,
            ),
        };
        let parse_mat = |rows: &Vec<Vec<String>>| Matrix::from_canonical_strings(rows, ctx);
        let matrices = match &dto.matrices {
            MatricesDto::Finite { e_plus, e_minus } => RepMatrices::Finite {
                e_plus: parse_mat(e_plus)?,
                e_minus: parse_mat(e_minus)?,
            },
            MatricesDto::Loop { e0_plus, e0_minus, e1_plus, e1_minus } => RepMatrices::Loop {
                e0_plus: parse_mat(e0_plus)?,
                e0_minus: parse_mat(e0_minus)?,
                e1_plus: parse_mat(e1_plus)?,
                e1_minus: parse_mat(e1_minus)?,
            },
        };
        Ok(QGroupRep {
            flavor: dto.flavor,
            dim: dto.dim,
            weights,
            matrices,
            borel_only: dto.borel_only,
            safe_descent: dto.safe_descent,
            ctx: ctx.clone(),
        })
    }

    /// Build a representation from raw parts (used by submodule extraction).
    pub fn from_parts(
        flavor: Flavor,
        weights: WeightData,
        matrices: RepMatrices,
        borel_only: bool,
        safe_descent: Option<Vec<u32>>,
        ctx: &ScalarContext,
    ) -> QGroupRep {
        let dim = match &weights {
            WeightData::K(v) => v.len(),
            WeightData::H(v) => v.len(),
        };
        QGroupRep {
            flavor,
            dim,
            weights,
            matrices,
            borel_only,
            safe_descent,
            ctx: ctx.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q_number;

    fn gctx() -> ScalarContext {
        ScalarContext::generic(1)
    }

    #[test]
    fn vn_matches_printed_matrices() {
        let ctx = gctx();
        let v0 = make_vn(0, &ctx).unwrap();
        assert_eq!(v0.dim, 1);
        assert!(v0.e_plus().is_zero() && v0.e_minus().is_zero());
        assert!(v0.k_eigenvalues()[0].is_one());

        let v1 = make_vn(1, &ctx).unwrap();
        assert_eq!(v1.e_plus().at(0, 1), &ctx.one());
        assert!(v1.e_plus().at(1, 0).is_zero());
        assert_eq!(v1.e_minus().at(1, 0), &ctx.one());
        assert_eq!(v1.k_eigenvalues(), vec![ctx.q(), ctx.q_int_pow(-1)]);

        let v2 = make_vn(2, &ctx).unwrap();
        assert_eq!(v2.e_plus().at(0, 1), &q_number(2, &ctx));
        assert_eq!(v2.e_plus().at(1, 2), &ctx.one());
    }

    #[test]
    fn vn_relations_pass_up_to_six() {
        let ctx = gctx();
        for n in 0..=6 {
            let rep = make_vn(n, &ctx).unwrap();
            let report = check_relations(&rep);
            assert!(report.pass(), "V_{n} failed: {:?}", report.failures);
        }
    }

    #[test]
    fn vn_root_clash() {
        let ctx = ScalarContext::root_of_unity(6).unwrap(); // N' = 3
        assert!(make_vn(2, &ctx).is_ok());
        assert!(matches!(make_vn(3, &ctx), Err(RepError::DimensionRootClash(4, 3))));
    }

    #[test]
    fn evaluation_pullback_formulas() {
        let ctx = gctx();
        let v1 = make_vn(1, &ctx).unwrap();
        let l = evaluation_pullback(&v1, &ctx.one(), LoopForm::K).unwrap();
        let (e0p, e0m, e1p, e1m) = l.loop_matrices();
        assert_eq!(e0p, &v1.e_minus().scale(&ctx.q_int_pow(-1)));
        assert_eq!(e0m, &v1.e_plus().scale(&ctx.q()));
        assert_eq!(e1p, v1.e_plus());
        assert_eq!(e1m, v1.e_minus());
        // k0 = k^{-1}
        assert_eq!(l.k_eigenvalues(), vec![ctx.q_int_pow(-1), ctx.q()]);
        let report = check_relations(&l);
        assert!(report.pass(), "{:?}", report.failures);
    }

    #[test]
    fn evaluation_pullback_serre_passes() {
        let ctx = gctx();
        for n in 0..=3u32 {
            let v = make_vn(n, &ctx).unwrap();
            let z = ctx.from_rat(Rat::new(3, 2));
            let l = evaluation_pullback(&v, &z, LoopForm::K).unwrap();
            let report = check_relations(&l);
            assert!(report.pass(), "V_{n}(3/2) failed: {:?}", report.failures);
        }
    }

    #[test]
    fn trivial_rep_pullback_is_zero() {
        let ctx = gctx();
        let v0 = make_vn(0, &ctx).unwrap();
        let l = evaluation_pullback(&v0, &ctx.from_int(5), LoopForm::K).unwrap();
        let (a, b, c, d) = l.loop_matrices();
        assert!(a.is_zero() && b.is_zero() && c.is_zero() && d.is_zero());
    }

    #[test]
    fn xm_weights_and_fusion() {
        let ctx = gctx();
        let x1 = make_xm(1, &ctx);
        assert_eq!(x1.dim, 1);
        assert!(x1.k_eigenvalues()[0].is_one());
        assert_eq!(x1.h_pairs().unwrap()[0], (Rat::from_integer(0), 1));
        let x2 = make_xm(2, &ctx);
        let x3 = tensor(&x1, &x2).unwrap();
        assert_eq!(x3.h_pairs().unwrap()[0], (Rat::from_integer(0), 3));
        assert!(check_relations(&x3).pass());
    }

    #[test]
    fn oscillator_action_and_weights() {
        let ctx = gctx();
        let z = ctx.from_int(1);
        let q = make_q_oscillator(0, &z, 4, &ctx).unwrap();
        let (e0p, _, e1p, _) = q.loop_matrices();
        // e0+ annihilates v_0 (index 0): column 0 is zero
        assert!((0..4).all(|r| e0p.at(r, 0).is_zero()));
        // e1+ v_{-1} = v_{-2}
        assert_eq!(e1p.at(2, 1), &ctx.one());
        // h0-weight of v_{-2} is m - 4 = -4
        assert_eq!(q.h_pairs().unwrap()[2].0, Rat::from_integer(-4));
        let report = check_relations(&q);
        assert!(report.pass(), "{:?}", report.failures);
        assert!(report.skipped_boundary_columns > 0);
    }

    #[test]
    fn cyclic_rep_relations_and_character() {
        let ctx = ScalarContext::root_of_unity(6).unwrap(); // N' = 3
        let a = ctx.from_int(1);
        let b = ctx.from_int(1);
        let lam = ctx.from_int(2);
        let rep = make_cyclic(&a, &b, &lam, &ctx).unwrap();
        assert_eq!(rep.dim, 3);
        let cc = central_character(&rep).unwrap();
        assert!(!cc.x.is_zero() && !cc.y.is_zero());
        // x = (q - q^{-1})^{N'} a
        let qdiff = ctx.q().sub(&ctx.q_int_pow(-1));
        assert_eq!(cc.x, qdiff.pow(3).unwrap());
        // z = lambda^{-N'}
        assert_eq!(cc.z, lam.pow(-3).unwrap());
    }

    #[test]
    fn highest_weight_cyclic_degenerates() {
        let ctx = ScalarContext::root_of_unity(6).unwrap();
        let zero = ctx.zero();
        let lam = ctx.q_int_pow(2); // lambda = q^{N'-1}
        let rep = make_cyclic(&zero, &zero, &lam, &ctx).unwrap();
        let cc = central_character(&rep).unwrap();
        assert!(cc.x.is_zero() && cc.y.is_zero());
    }

    #[test]
    fn semicyclic_has_y_zero() {
        let ctx = ScalarContext::root_of_unity(6).unwrap();
        let a = ctx.from_int(1);
        let zero = ctx.zero();
        let lam = ctx.q_int_pow(2);
        let rep = make_cyclic(&a, &zero, &lam, &ctx).unwrap();
        let cc = central_character(&rep).unwrap();
        assert!(!cc.x.is_zero());
        assert!(cc.y.is_zero());
    }

    #[test]
    fn vn_central_character_at_third_root() {
        let ctx = ScalarContext::root_of_unity(3).unwrap(); // N' = 3
        let v1 = make_vn(1, &ctx).unwrap();
        let cc = central_character(&v1).unwrap();
        assert!(cc.x.is_zero() && cc.y.is_zero());
        // z = k^{-3} = 1 since k = diag(q, q^{-1}) and q^3 = 1
        assert!(cc.z.is_one());
        // c = q^2 + q^{-2}
        let expected = ctx.q_int_pow(2).add(&ctx.q_int_pow(-2));
        assert_eq!(cc.c, expected);
    }

    #[test]
    fn tensor_dimensions_and_weights() {
        let ctx = gctx();
        let v1 = make_vn(1, &ctx).unwrap();
        let z = ctx.from_int(2);
        let w = ctx.from_int(3);
        let a = evaluation_pullback(&v1, &z, LoopForm::K).unwrap();
        let b = evaluation_pullback(&v1, &w, LoopForm::K).unwrap();
        let t = tensor(&a, &b).unwrap();
        assert_eq!(t.dim, 4);
        // k1 = k0^{-1}-eigenvalues on V1(z) (x) V1(w): {q^2, 1, 1, q^{-2}}
        let k1: Vec<QScalar> = t
            .k_eigenvalues()
            .iter()
            .map(|x| x.invert().unwrap())
            .collect();
        assert_eq!(k1[0], ctx.q_int_pow(2));
        assert!(k1[1].is_one() && k1[2].is_one());
        assert_eq!(k1[3], ctx.q_int_pow(-2));
        assert!(check_relations(&t).pass());
    }

    #[test]
    fn tensor_with_trivial_is_identity_action() {
        let ctx = gctx();
        let v0 = make_vn(0, &ctx).unwrap();
        let v2 = make_vn(2, &ctx).unwrap();
        let t = tensor(&v0, &v2).unwrap();
        assert_eq!(t.dim, v2.dim);
        assert_eq!(t.e_plus(), v2.e_plus());
        assert_eq!(t.e_minus(), v2.e_minus());
    }

    #[test]
    fn dual_preserves_relations_and_dimension() {
        let ctx = gctx();
        let v2 = make_vn(2, &ctx).unwrap();
        let d = dual(&v2).unwrap();
        assert_eq!(d.dim, 3);
        assert!(check_relations(&d).pass());
        let v0 = make_vn(0, &ctx).unwrap();
        let d0 = dual(&v0).unwrap();
        assert!(d0.e_plus().is_zero() && d0.k_eigenvalues()[0].is_one());
    }

    #[test]
    fn dual_central_character_transform() {
        // x -> -x/z, y -> -yz, z -> z^{-1}, c -> c on cyclic duals.
        let ctx = ScalarContext::root_of_unity(6).unwrap();
        let rep = make_cyclic(&ctx.from_int(1), &ctx.from_int(2), &ctx.from_int(3), &ctx).unwrap();
        let cc = central_character(&rep).unwrap();
        let dd = dual(&rep).unwrap();
        assert!(check_relations(&dd).pass());
        let cd = central_character(&dd).unwrap();
        assert_eq!(cd.x, cc.x.neg().checked_div(&cc.z).unwrap());
        assert_eq!(cd.y, cc.y.neg().mul(&cc.z));
        assert_eq!(cd.z, cc.z.invert().unwrap());
        assert_eq!(cd.c, cc.c);
    }

    #[test]
    fn corrupting_a_matrix_entry_fails_relations() {
        let ctx = gctx();
        let mut rep = make_vn(3, &ctx).unwrap();
        if let RepMatrices::Finite { e_plus, .. } = &mut rep.matrices {
            let bad = e_plus.at(0, 1).mul(&ctx.from_int(2));
            e_plus.set(0, 1, bad);
        }
        let report = check_relations(&rep);
        assert!(!report.pass());
    }

    #[test]
    fn reduce_section_round_trips() {
        let ctx = gctx();
        let v1 = make_vn(1, &ctx).unwrap();
        let l = evaluation_pullback(&v1, &ctx.from_int(2), LoopForm::K).unwrap();
        let s = section(&l).unwrap();
        let back = reduce(&s).unwrap();
        assert_eq!(back.k_eigenvalues(), l.k_eigenvalues());
        assert_eq!(back.matrices, l.matrices);

        // section o reduce = id when all windings are zero
        let h = evaluation_pullback(&v1, &ctx.from_int(2), LoopForm::Hbar).unwrap();
        let rt = section(&reduce(&h).unwrap()).unwrap();
        assert_eq!(rt.weights, h.weights);

        // reduce(X_m) is the trivial k-form line
        let xm = make_xm(5, &ctx);
        let r = reduce(&xm).unwrap();
        assert!(r.k_eigenvalues()[0].is_one());
    }

    #[test]
    fn reduce_is_monoidal() {
        let ctx = gctx();
        let v1 = make_vn(1, &ctx).unwrap();
        let a = evaluation_pullback(&v1, &ctx.from_int(2), LoopForm::Hbar).unwrap();
        let b = tensor(&make_xm(1, &ctx), &a).unwrap();
        let lhs = reduce(&tensor(&a, &b).unwrap()).unwrap();
        let rhs = tensor(&reduce(&a).unwrap(), &reduce(&b).unwrap()).unwrap();
        assert_eq!(lhs.matrices, rhs.matrices);
        assert_eq!(lhs.k_eigenvalues(), rhs.k_eigenvalues());
    }

    #[test]
    fn serialization_round_trip() {
        let ctx = gctx();
        let v2 = make_vn(2, &ctx).unwrap();
        let json = v2.to_json();
        let back = QGroupRep::from_json(&json, &ctx).unwrap();
        assert_eq!(back.matrices, v2.matrices);
        assert_eq!(back.weights, v2.weights);
        assert_eq!(json, back.to_json());

        let osc = make_q_oscillator(1, &ctx.from_int(3), 4, &ctx).unwrap();
        let back = QGroupRep::from_json(&osc.to_json(), &ctx).unwrap();
        assert_eq!(back.matrices, osc.matrices);
        assert_eq!(back.safe_descent, osc.safe_descent);
    }
}
