//! Exact linear algebra between representations: spaces of intertwiners,
//! isomorphism search, invariant subspaces, submodule/quotient extraction and
//! short-exact-sequence certificates.
//!
//! For truncated oscillator modules the intertwiner equations are asserted
//! away from the cut: equation entries whose row or column sits on the
//! truncation boundary are excluded and recorded in the certificate.

use crate::linalg::Matrix;
use crate::qrep::{QGroupRep, RepMatrices, WeightData};
use crate::scalar::{QScalar, ScalarContext};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IntertwineError {
    #[error("flavor mismatch")]
    FlavorMismatch,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dim A + dim C = {0} does not match dim B = {1}")]
    SequenceDimensionMismatch(usize, usize),
    #[error("subspace is not invariant")]
    NotInvariant,
    #[error("scalar error: {0}")]
    Scalar(#[from] crate::scalar::ScalarError),
}

/// Basis of the space of intertwiners source -> target.
#[derive(Debug, Clone)]
pub struct HomSpace {
    pub source_dim: usize,
    pub target_dim: usize,
    pub basis: Vec<Matrix>,
    /// True when truncation masking excluded some equations.
    pub truncated: bool,
}

impl HomSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

fn weights_match(v: &QGroupRep, w: &QGroupRep, col: usize, row: usize) -> bool {
    match (&v.weights, &w.weights) {
        (WeightData::K(a), WeightData::K(b)) => a[col] == b[row],
        (WeightData::H(a), WeightData::H(b)) => a[col] == b[row],
        _ => false,
    }
}

fn interior_mask(rep: &QGroupRep, margin: u32) -> Vec<bool> {
    match &rep.safe_descent {
        None => vec![true; rep.dim],
        Some(sd) => sd.iter().map(|&d| d >= margin).collect(),
    }
}

/// Indices of basis vectors at least `margin` lowering steps away from a
/// truncation cut (all indices for untruncated representations).
pub fn interior_indices(rep: &QGroupRep, margin: u32) -> Vec<usize> {
    interior_mask(rep, margin)
        .iter()
        .enumerate()
        .filter_map(|(i, &ok)| if ok { Some(i) } else { None })
        .collect()
}

/// Exact solution of the commutant system T rho_V(g) = rho_W(g) T for all
/// generators g of the common flavor. Cartan generators are imposed through
/// the weight filter; the remaining generator equations are solved as one
/// linear system over the weight-compatible unknowns.
pub fn hom_space(v: &QGroupRep, w: &QGroupRep) -> Result<HomSpace, IntertwineError> {
    if v.flavor != w.flavor {
        return Err(IntertwineError::FlavorMismatch);
    }
    let ctx = v.context().clone();
    let borel = v.borel_only || w.borel_only;
    let truncated = v.safe_descent.is_some() || w.safe_descent.is_some();
    let col_ok = interior_mask(v, 1);
    let row_ok = interior_mask(w, 1);

    // Unknowns: weight-compatible entries of T.
    let mut unknown_index = vec![vec![None; v.dim]; w.dim];
    let mut unknowns = Vec::new();
    for r in 0..w.dim {
        for c in 0..v.dim {
            if weights_match(v, w, c, r) {
                unknown_index[r][c] = Some(unknowns.len());
                unknowns.push((r, c));
            }
        }
    }
    if unknowns.is_empty() {
        return Ok(HomSpace { source_dim: v.dim, target_dim: w.dim, basis: Vec::new(), truncated });
    }

    let gen_pairs: Vec<(Matrix, Matrix)> = generator_pairs(v, w, borel);

    let mut rows: Vec<Vec<QScalar>> = Vec::new();
    for (gv, gw) in &gen_pairs {
        for r in 0..w.dim {
            if !row_ok[r] {
                continue;
            }
            for c in 0..v.dim {
                if !col_ok[c] {
                    continue;
                }
                // (T gv - gw T)[r, c] = sum_i T[r,i] gv[i,c] - sum_j gw[r,j] T[j,c]
                let mut row = vec![ctx.zero(); unknowns.len()];
                let mut nonzero = false;
                for i in 0..v.dim {
                    if let Some(u) = unknown_index[r][i] {
                        let a = gv.at(i, c);
                        if !a.is_zero() {
                            row[u] = row[u].add(a);
                            nonzero = true;
                        }
                    }
                }
                for j in 0..w.dim {
                    if let Some(u) = unknown_index[j][c] {
                        let b = gw.at(r, j);
                        if !b.is_zero() {
                            row[u] = row[u].sub(b);
                            nonzero = true;
                        }
                    }
                }
                if nonzero {
                    rows.push(row);
                }
            }
        }
    }

    let basis = if rows.is_empty() {
        // only the weight constraints: every weight-compatible entry is free
        (0..unknowns.len())
            .map(|u| {
                let mut m = Matrix::zero(w.dim, v.dim, &ctx);
                let (r, c) = unknowns[u];
                m.set(r, c, ctx.one());
                m
            })
            .collect()
    } else {
        let system = Matrix::from_fn(rows.len(), unknowns.len(), &ctx, |r, c| rows[r][c].clone());
        system
            .kernel_basis()
            .into_iter()
            .map(|sol| {
                let mut m = Matrix::zero(w.dim, v.dim, &ctx);
                for (u, (r, c)) in unknowns.iter().enumerate() {
                    m.set(*r, *c, sol[u].clone());
                }
                m
            })
            .collect()
    };

    Ok(HomSpace { source_dim: v.dim, target_dim: w.dim, basis, truncated })
}

fn generator_pairs(v: &QGroupRep, w: &QGroupRep, borel: bool) -> Vec<(Matrix, Matrix)> {
    match (&v.matrices, &w.matrices) {
        (
            RepMatrices::Finite { e_plus: pv, e_minus: mv },
            RepMatrices::Finite { e_plus: pw, e_minus: mw },
        ) => {
            let mut out = vec![(pv.clone(), pw.clone())];
            if !borel {
                out.push((mv.clone(), mw.clone()));
            }
            out
        }
        (
            RepMatrices::Loop { e0_plus: p0v, e0_minus: m0v, e1_plus: p1v, e1_minus: m1v },
            RepMatrices::Loop { e0_plus: p0w, e0_minus: m0w, e1_plus: p1w, e1_minus: m1w },
        ) => {
            let mut out = vec![(p0v.clone(), p0w.clone()), (p1v.clone(), p1w.clone())];
            if !borel {
                out.push((m0v.clone(), m0w.clone()));
                out.push((m1v.clone(), m1w.clone()));
            }
            out
        }
        _ => panic!("flavor equality fixes the matrix shape"),
    }
}

/// Outcome of an isomorphism search. Absence through `NoHom` is a
/// certificate (the commutant system has no nonzero solution); absence
/// through `NoInvertibleFound` is a semi-decision after sampling.
#[derive(Debug, Clone)]
pub enum IsoSearch {
    Found(Matrix),
    NoHom,
    NoInvertibleFound { hom_dim: usize, samples_tried: usize },
}

pub fn find_isomorphism(
    v: &QGroupRep,
    w: &QGroupRep,
    seed: u64,
) -> Result<IsoSearch, IntertwineError> {
    if v.dim != w.dim {
        return Err(IntertwineError::DimensionMismatch(v.dim, w.dim));
    }
    let hom = hom_space(v, w)?;
    if hom.dim() == 0 {
        return Ok(IsoSearch::NoHom);
    }
    let ctx = v.context().clone();
    let interior_rows = interior_indices(w, 1);
    let interior_cols = interior_indices(v, 1);
    let full_rank = |m: &Matrix| -> bool {
        if hom.truncated {
            let sub = m.submatrix(&interior_rows, &interior_cols);
            sub.rank() == interior_rows.len().min(interior_cols.len())
        } else {
            m.is_invertible()
        }
    };
    for m in &hom.basis {
        if full_rank(m) {
            return Ok(IsoSearch::Found(normalize_map(m)));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tries = hom.dim() + 3;
    for _ in 0..tries {
        let mut cand = Matrix::zero(w.dim, v.dim, &ctx);
        for m in &hom.basis {
            let c = ctx.from_int(rng.gen_range(-4i64..=4));
            cand = cand.add(&m.scale(&c));
        }
        if full_rank(&cand) {
            return Ok(IsoSearch::Found(normalize_map(&cand)));
        }
    }
    Ok(IsoSearch::NoInvertibleFound { hom_dim: hom.dim(), samples_tried: tries })
}

/// Scale a map so its first nonzero entry (row-major) is 1.
fn normalize_map(m: &Matrix) -> Matrix {
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if !m.at(r, c).is_zero() {
                let inv = m.at(r, c).invert().expect("nonzero");
                return m.scale(&inv);
            }
        }
    }
    m.clone()
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceCertificate {
    pub f: Vec<Vec<String>>,
    pub g: Vec<Vec<String>>,
    pub rank_f: usize,
    pub rank_g: usize,
    pub dim_b: usize,
    pub truncated: bool,
    /// Basis indices excluded from the rank bookkeeping (per object A, B, C).
    pub excluded: (Vec<usize>, Vec<usize>, Vec<usize>),
}

#[derive(Debug, Clone)]
pub struct ExactSequence {
    pub f: Matrix,
    pub g: Matrix,
    pub certificate: SequenceCertificate,
}

#[derive(Debug, Error)]
pub enum SequenceFailure {
    #[error("{0}")]
    Structural(#[from] IntertwineError),
    #[error("no injective intertwiner A -> B found (hom dim {0})")]
    NoInjection(usize),
    #[error("no surjective intertwiner B -> C with g f = 0 found (constrained dim {0})")]
    NoSurjection(usize),
    #[error("exactness failed: rank f {rank_f} + rank g {rank_g} != dim B {dim_b}")]
    NotExact { rank_f: usize, rank_g: usize, dim_b: usize },
    #[error("image of f differs from kernel of g")]
    ImageKernelMismatch,
}

/// Certify 0 -> A -f-> B -g-> C -> 0: find an injective f and a surjective g
/// with g f = 0 and image f = kernel g. For truncated modules the conditions
/// are asserted on the interior and the certificate is marked truncated.
pub fn verify_exact_sequence(
    a: &QGroupRep,
    b: &QGroupRep,
    c: &QGroupRep,
    seed: u64,
) -> Result<ExactSequence, SequenceFailure> {
    if a.dim + c.dim != b.dim {
        return Err(SequenceFailure::Structural(IntertwineError::SequenceDimensionMismatch(
            a.dim + c.dim,
            b.dim,
        )));
    }
    let ctx = a.context().clone();
    let truncated =
        a.safe_descent.is_some() || b.safe_descent.is_some() || c.safe_descent.is_some();
    let int_a = interior_indices(a, 1);
    let int_b = interior_indices(b, 1);
    let int_c = interior_indices(c, 1);

    let hom_ab = hom_space(a, b)?;
    if hom_ab.dim() == 0 {
        return Err(SequenceFailure::NoInjection(0));
    }
    let f_rank = |m: &Matrix| -> usize {
        if truncated {
            m.submatrix(&int_b, &int_a).rank()
        } else {
            m.rank()
        }
    };
    let f_target_rank = if truncated { int_a.len() } else { a.dim };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = search_in_span(&hom_ab.basis, &ctx, &mut rng, |m| f_rank(m) == f_target_rank)
        .ok_or(SequenceFailure::NoInjection(hom_ab.dim()))?;

    let hom_bc = hom_space(b, c)?;
    // restrict to the subspace { g : g f = 0 } of the hom space
    let constrained = constrain_to_annihilator(&hom_bc.basis, &f, &int_c, &int_a, truncated, &ctx);
    if constrained.is_empty() {
        return Err(SequenceFailure::NoSurjection(0));
    }
    let g_rank = |m: &Matrix| -> usize {
        if truncated {
            m.submatrix(&int_c, &int_b).rank()
        } else {
            m.rank()
        }
    };
    let g_target_rank = if truncated { int_c.len() } else { c.dim };
    let g = search_in_span(&constrained, &ctx, &mut rng, |m| g_rank(m) == g_target_rank)
        .ok_or(SequenceFailure::NoSurjection(constrained.len()))?;

    let rank_f = f_rank(&f);
    let rank_g = g_rank(&g);
    let dim_b_eff = if truncated { int_b.len() } else { b.dim };
    if rank_f + rank_g != dim_b_eff {
        return Err(SequenceFailure::NotExact { rank_f, rank_g, dim_b: dim_b_eff });
    }
    if !truncated {
        // exact subspace equality: image(f) = kernel(g)
        let ker_g = Matrix::from_columns(&g.kernel_basis(), b.dim, &ctx);
        if !f.same_column_span(&ker_g) {
            return Err(SequenceFailure::ImageKernelMismatch);
        }
    }

    let excluded = (
        complement(a.dim, &int_a),
        complement(b.dim, &int_b),
        complement(c.dim, &int_c),
    );
    let certificate = SequenceCertificate {
        f: f.to_canonical_strings(),
        g: g.to_canonical_strings(),
        rank_f,
        rank_g,
        dim_b: dim_b_eff,
        truncated,
        excluded,
    };
    Ok(ExactSequence { f, g, certificate })
}

fn complement(n: usize, kept: &[usize]) -> Vec<usize> {
    let set: std::collections::HashSet<usize> = kept.iter().copied().collect();
    (0..n).filter(|i| !set.contains(i)).collect()
}

/// Elements g of span(basis) with g f = 0 (on interior columns when
/// truncated), as a basis of the constrained subspace.
fn constrain_to_annihilator(
    basis: &[Matrix],
    f: &Matrix,
    int_c: &[usize],
    int_a: &[usize],
    truncated: bool,
    ctx: &ScalarContext,
) -> Vec<Matrix> {
    if basis.is_empty() {
        return Vec::new();
    }
    let products: Vec<Matrix> = basis.iter().map(|g| g.mul(f)).collect();
    let rows_idx: Vec<usize> = if truncated { int_c.to_vec() } else { (0..products[0].rows()).collect() };
    let cols_idx: Vec<usize> = if truncated { int_a.to_vec() } else { (0..products[0].cols()).collect() };
    let mut rows: Vec<Vec<QScalar>> = Vec::new();
    for &r in &rows_idx {
        for &c in &cols_idx {
            let row: Vec<QScalar> = products.iter().map(|p| p.at(r, c).clone()).collect();
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        return basis.to_vec();
    }
    let system = Matrix::from_fn(rows.len(), basis.len(), ctx, |r, c| rows[r][c].clone());
    system
        .kernel_basis()
        .into_iter()
        .map(|coeffs| {
            let mut m = Matrix::zero(basis[0].rows(), basis[0].cols(), ctx);
            for (i, g) in basis.iter().enumerate() {
                if !coeffs[i].is_zero() {
                    m = m.add(&g.scale(&coeffs[i]));
                }
            }
            m
        })
        .collect()
}

fn search_in_span(
    basis: &[Matrix],
    ctx: &ScalarContext,
    rng: &mut ChaCha8Rng,
    good: impl Fn(&Matrix) -> bool,
) -> Option<Matrix> {
    for m in basis {
        if good(m) {
            return Some(normalize_map(m));
        }
    }
    for _ in 0..basis.len() + 3 {
        let mut cand = Matrix::zero(basis[0].rows(), basis[0].cols(), ctx);
        for m in basis {
            let c = ctx.from_int(rng.gen_range(-4i64..=4));
            cand = cand.add(&m.scale(&c));
        }
        if good(&cand) {
            return Some(normalize_map(&cand));
        }
    }
    None
}

/// Smallest invariant subspace containing `v`, by closure under all
/// generator matrices (including the Cartan, which is diagonal and therefore
/// preserves any coordinate-filtered span). Returns a column basis.
pub fn invariant_subspace_from(v: &[QScalar], rep: &QGroupRep) -> Matrix {
    let ctx = rep.context().clone();
    let gens: Vec<Matrix> = rep.generator_matrices().into_iter().map(|(_, m)| m).collect();
    let mut span: Vec<Vec<QScalar>> = vec![v.to_vec()];
    loop {
        let mat = Matrix::from_columns(&span, rep.dim, &ctx);
        let rank = mat.rank();
        let mut new_vecs = Vec::new();
        for g in &gens {
            for col in &span {
                new_vecs.push(g.apply(col));
            }
        }
        let mut all = span.clone();
        all.extend(new_vecs);
        let bigger = Matrix::from_columns(&all, rep.dim, &ctx);
        if bigger.rank() == rank {
            // reduce to a clean basis
            let (rref, pivots) = mat.transpose().rref();
            let basis: Vec<Vec<QScalar>> = (0..pivots.len())
                .map(|r| (0..rep.dim).map(|c| rref.at(r, c).clone()).collect())
                .collect();
            return Matrix::from_columns(&basis, rep.dim, &ctx);
        }
        // re-extract an independent generating set
        let (rref, pivots) = bigger.transpose().rref();
        span = (0..pivots.len())
            .map(|r| (0..rep.dim).map(|c| rref.at(r, c).clone()).collect())
            .collect();
    }
}

/// Extract the subrepresentation on an invariant column-span. The span must
/// be invariant under all generators; the basis is first refined to be
/// weight-homogeneous (possible because the Cartan acts diagonally).
pub fn sub_representation(
    rep: &QGroupRep,
    span: &Matrix,
) -> Result<(QGroupRep, Matrix), IntertwineError> {
    let ctx = rep.context().clone();
    let dim = rep.dim;
    // Refine to weight vectors: for each distinct ambient weight, intersect
    // the span with the corresponding coordinate subspace.
    let weight_key: Vec<String> = match &rep.weights {
        WeightData::K(v) => v.iter().map(|x| x.canonical_string()).collect(),
        WeightData::H(p) => p.iter().map(|(s, m)| format!("{s}|{m}")).collect(),
    };
    let mut homogeneous: Vec<(usize, Vec<QScalar>)> = Vec::new(); // (ambient weight idx, vector)
    let mut seen = std::collections::BTreeSet::new();
    for i in 0..dim {
        if !seen.insert(weight_key[i].clone()) {
            continue;
        }
        let outside: Vec<usize> = (0..dim).filter(|&j| weight_key[j] != weight_key[i]).collect();
        let restricted = span.submatrix(&outside, &(0..span.cols()).collect::<Vec<_>>());
        for alpha in restricted.kernel_basis() {
            let vec = span.apply(&alpha);
            if vec.iter().any(|x| !x.is_zero()) {
                homogeneous.push((i, vec));
            }
        }
    }
    // Independent subset
    let all: Vec<Vec<QScalar>> = homogeneous.iter().map(|(_, v)| v.clone()).collect();
    let mat = Matrix::from_columns(&all, dim, &ctx);
    if mat.rank() != span.rank() {
        return Err(IntertwineError::NotInvariant);
    }
    let mut chosen: Vec<(usize, Vec<QScalar>)> = Vec::new();
    let mut current = Matrix::zero(dim, 0, &ctx);
    for (wi, v) in homogeneous {
        let cand = current.hstack(&Matrix::from_columns(&[v.clone()], dim, &ctx));
        if cand.rank() > current.rank() {
            current = cand;
            chosen.push((wi, v));
        }
    }
    let inclusion = current;
    let k = chosen.len();

    // Action matrices: solve inclusion * X = g * inclusion columnwise.
    let express = |target: &Matrix| -> Result<Matrix, IntertwineError> {
        // least-structure solve: [inclusion | target] rref
        let aug = inclusion.hstack(target);
        let (rref, pivots) = aug.rref();
        // all pivots must be within the first k columns
        if pivots.iter().any(|&p| p >= k) {
            return Err(IntertwineError::NotInvariant);
        }
        let mut x = Matrix::zero(k, target.cols(), &ctx);
        for (ri, &p) in pivots.iter().enumerate() {
            for c in 0..target.cols() {
                x.set(p, c, rref.at(ri, k + c).clone());
            }
        }
        Ok(x)
    };

    let weights = match &rep.weights {
        WeightData::K(v) => WeightData::K(chosen.iter().map(|(wi, _)| v[*wi].clone()).collect()),
        WeightData::H(p) => WeightData::H(chosen.iter().map(|(wi, _)| p[*wi]).collect()),
    };
    let sub_action = |g: &Matrix| -> Result<Matrix, IntertwineError> {
        express(&g.mul(&inclusion))
    };
    let matrices = match &rep.matrices {
        RepMatrices::Finite { e_plus, e_minus } => RepMatrices::Finite {
            e_plus: sub_action(e_plus)?,
            e_minus: sub_action(e_minus)?,
        },
        RepMatrices::Loop { e0_plus, e0_minus, e1_plus, e1_minus } => RepMatrices::Loop {
            e0_plus: sub_action(e0_plus)?,
            e0_minus: sub_action(e0_minus)?,
            e1_plus: sub_action(e1_plus)?,
            e1_minus: sub_action(e1_minus)?,
        },
    };
    let sub = QGroupRep::from_parts(rep.flavor, weights, matrices, rep.borel_only, None, &ctx);
    Ok((sub, inclusion))
}

/// Quotient representation by an invariant column-span, with the projection
/// onto a coordinate complement of the span.
pub fn quotient_representation(
    rep: &QGroupRep,
    span: &Matrix,
) -> Result<(QGroupRep, Matrix), IntertwineError> {
    let ctx = rep.context().clone();
    let dim = rep.dim;
    let (_, pivots) = span.transpose().rref();
    // pivot coordinates of the row space = coordinates spanned; complement:
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let comp: Vec<usize> = (0..dim).filter(|i| !pivot_set.contains(i)).collect();
    let k = span.rank();
    assert_eq!(comp.len(), dim - k);

    // Projection: pi = last rows of [span | E_comp]^{-1}
    let mut full = span.clone();
    for &c in &comp {
        let mut e = Matrix::zero(dim, 1, &ctx);
        e.set(c, 0, ctx.one());
        full = full.hstack(&e);
    }
    let inv = full.inverse().ok_or(IntertwineError::NotInvariant)?;
    let proj = inv.submatrix(&(k..dim).collect::<Vec<_>>(), &(0..dim).collect::<Vec<_>>());

    let embed = Matrix::from_fn(dim, comp.len(), &ctx, |r, c| {
        if r == comp[c] { ctx.one() } else { ctx.zero() }
    });
    let q_action = |g: &Matrix| proj.mul(g).mul(&embed);

    let weights = match &rep.weights {
        WeightData::K(v) => WeightData::K(comp.iter().map(|&i| v[i].clone()).collect()),
        WeightData::H(p) => WeightData::H(comp.iter().map(|&i| p[i]).collect()),
    };
    let matrices = match &rep.matrices {
        RepMatrices::Finite { e_plus, e_minus } => RepMatrices::Finite {
            e_plus: q_action(e_plus),
            e_minus: q_action(e_minus),
        },
        RepMatrices::Loop { e0_plus, e0_minus, e1_plus, e1_minus } => RepMatrices::Loop {
            e0_plus: q_action(e0_plus),
            e0_minus: q_action(e0_minus),
            e1_plus: q_action(e1_plus),
            e1_minus: q_action(e1_minus),
        },
    };
    let quot = QGroupRep::from_parts(rep.flavor, weights, matrices, rep.borel_only, None, &ctx);
    // sanity: the projection must intertwine (the span must be invariant)
    for (ga, gq) in generator_pairs(rep, &quot, rep.borel_only) {
        if proj.mul(&ga) != gq.mul(&proj) {
            return Err(IntertwineError::NotInvariant);
        }
    }
    Ok((quot, proj))
}

impl ExactSequence {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.certificate).expect("serializable certificate")
    }
}
