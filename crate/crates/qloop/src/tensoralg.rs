//! Graded components of the tensor algebras on the two-line object
//! F = C_omega (+) C_{-omega}, braid-group symmetrisers, the Hopf pairing
//! built from the degree-one pairing b_{zeta,xi}, its radical, and checks of
//! the pairing axioms.
//!
//! Basis words at degree n are strings over {+,-} ('+' is the C_omega line,
//! '-' the C_{-omega} line), ordered lexicographically with '+' < '-'.

use crate::braidcat::BraidingContext;
use crate::linalg::Matrix;
use crate::scalar::{QScalar, Rat, ScalarContext};
use thiserror::Error;

/// Degree bound for symmetriser-based computations (matrices up to 2^6).
pub const DEFAULT_DEGREE_BOUND: usize = 6;

#[derive(Debug, Error)]
pub enum TensorAlgError {
    #[error("degree {0} exceeds the configured bound {1}")]
    DegreeBoundExceeded(usize, usize),
    #[error("braiding power left the root lattice: {0}")]
    Scalar(#[from] crate::scalar::ScalarError),
}

/// The fixed word basis of F^{(x) n} for a two-letter alphabet.
#[derive(Debug, Clone)]
pub struct WordBasis {
    pub n: usize,
    /// Letter degrees (in omega units); index 0 is '+', index 1 is '-'.
    pub letter_degrees: Vec<Rat>,
}

impl WordBasis {
    pub fn standard(n: usize) -> Self {
        WordBasis {
            n,
            letter_degrees: vec![Rat::from_integer(1), Rat::from_integer(-1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.letter_degrees.len().pow(self.n as u32)
    }

    pub fn word(&self, index: usize) -> Vec<usize> {
        let l = self.letter_degrees.len();
        let mut w = vec![0usize; self.n];
        let mut r = index;
        for k in (0..self.n).rev() {
            w[k] = r % l;
            r /= l;
        }
        w
    }

    pub fn index(&self, word: &[usize]) -> usize {
        let l = self.letter_degrees.len();
        word.iter().fold(0, |acc, &d| acc * l + d)
    }

    pub fn word_string(&self, index: usize) -> String {
        self.word(index)
            .iter()
            .map(|&d| if d == 0 { '+' } else { '-' })
            .collect()
    }

    pub fn plus_count(&self, index: usize) -> usize {
        self.word(index).iter().filter(|&&d| d == 0).count()
    }
}

/// Apply the positive braid generator sigma_i to (word, scalar): swap the
/// letters at positions i, i+1 and multiply by Q^{a b}.
fn apply_sigma(
    bc: &BraidingContext,
    basis: &WordBasis,
    word: &mut [usize],
    scalar: &mut QScalar,
    i: usize,
) {
    let a = basis.letter_degrees[word[i]];
    let b = basis.letter_degrees[word[i + 1]];
    *scalar = scalar.mul(&bc.q_cap_pow(a * b).expect("letter degrees stay in the lattice"));
    word.swap(i, i + 1);
}

/// Reduced word (as adjacent-transposition indices) for a permutation given
/// in one-line notation, by bubble sorting it to the identity.
fn reduced_word(perm: &[usize]) -> Vec<usize> {
    let mut p = perm.to_vec();
    let mut swaps = Vec::new();
    loop {
        let mut done = true;
        for i in 0..p.len().saturating_sub(1) {
            if p[i] > p[i + 1] {
                p.swap(i, i + 1);
                swaps.push(i);
                done = false;
            }
        }
        if done {
            return swaps;
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    use itertools::Itertools;
    if n == 0 {
        return vec![Vec::new()];
    }
    (0..n).permutations(n).collect()
}

/// The braid-group symmetriser S_n = sum over S_n of the Matsumoto lifts,
/// acting on the word basis of letters^{(x) n}.
pub fn symmetriser(
    n: usize,
    letters: &[Rat],
    bc: &BraidingContext,
) -> Result<Matrix, TensorAlgError> {
    symmetriser_bounded(n, letters, bc, DEFAULT_DEGREE_BOUND)
}

pub fn symmetriser_bounded(
    n: usize,
    letters: &[Rat],
    bc: &BraidingContext,
    bound: usize,
) -> Result<Matrix, TensorAlgError> {
    if n > bound {
        return Err(TensorAlgError::DegreeBoundExceeded(n, bound));
    }
    let basis = WordBasis {
        n,
        letter_degrees: letters.to_vec(),
    };
    let ctx = bc.scalar_context();
    let dim = basis.dim();
    let mut m = Matrix::zero(dim, dim, ctx);
    for perm in permutations(n) {
        let word_swaps = reduced_word(&perm);
        for col in 0..dim {
            let mut w = basis.word(col);
            let mut s = ctx.one();
            for &i in &word_swaps {
                apply_sigma(bc, &basis, &mut w, &mut s, i);
            }
            let row = basis.index(&w);
            let v = m.at(row, col).add(&s);
            m.set(row, col, v);
        }
    }
    Ok(m)
}

/// The matrix of b^{* n}: rows index words of F^{+(x)n}, columns words of
/// F^{-(x)n}; the entry pairs letter k of the row against letter n+1-k of the
/// column, middle-out: b(+,-) = zeta, b(-,+) = xi, 0 otherwise.
pub fn b_power(n: usize, zeta: &QScalar, xi: &QScalar, ctx: &ScalarContext) -> Matrix {
    let basis = WordBasis::standard(n);
    let dim = basis.dim();
    let mut m = Matrix::zero(dim, dim, ctx);
    for row in 0..dim {
        let v = basis.word(row);
        // the unique pairable column is the reversed complement of the row
        let w: Vec<usize> = v.iter().rev().map(|&d| 1 - d).collect();
        let col = basis.index(&w);
        let mut s = ctx.one();
        for &d in &v {
            s = if d == 0 { s.mul(zeta) } else { s.mul(xi) };
        }
        m.set(row, col, s);
    }
    m
}

/// The Hopf pairing at one degree: Gram = b^{*n} o (S_n (x) id), together
/// with the defining parameters.
#[derive(Debug, Clone)]
pub struct PairingForm {
    pub degree: usize,
    pub gram: Matrix,
    pub zeta: QScalar,
    pub xi: QScalar,
}

impl PairingForm {
    /// Charge conservation: entries vanish unless the '+'-count of the row
    /// word and the '+'-count of the column word add up to the degree.
    pub fn charge_conserving(&self) -> bool {
        let basis = WordBasis::standard(self.degree);
        for r in 0..self.gram.rows() {
            for c in 0..self.gram.cols() {
                if !self.gram.at(r, c).is_zero()
                    && basis.plus_count(r) + basis.plus_count(c) != self.degree
                {
                    return false;
                }
            }
        }
        true
    }

    pub fn gram_json(&self) -> serde_json::Value {
        serde_json::json!(self.gram.to_canonical_strings())
    }
}

pub fn hopf_pairing(
    n: usize,
    zeta: &QScalar,
    xi: &QScalar,
    bc: &BraidingContext,
) -> Result<PairingForm, TensorAlgError> {
    hopf_pairing_bounded(n, zeta, xi, bc, DEFAULT_DEGREE_BOUND)
}

pub fn hopf_pairing_bounded(
    n: usize,
    zeta: &QScalar,
    xi: &QScalar,
    bc: &BraidingContext,
    bound: usize,
) -> Result<PairingForm, TensorAlgError> {
    let basis = WordBasis::standard(n);
    let s = symmetriser_bounded(n, &basis.letter_degrees, bc, bound)?;
    let b = b_power(n, zeta, xi, bc.scalar_context());
    // Gram[v, w] = sum_u S[u, v] * B[u, w]
    let gram = s.transpose().mul(&b);
    Ok(PairingForm {
        degree: n,
        gram,
        zeta: zeta.clone(),
        xi: xi.clone(),
    })
}

/// Exact basis of the left radical of the Gram form: vectors x with
/// x^T Gram = 0, i.e. elements of T(F^+) that pair to zero with everything.
pub fn radical(form: &PairingForm) -> Vec<Vec<QScalar>> {
    form.gram.left_kernel_basis()
}

/// Component Delta_{k, n-k} of the braided coproduct on a word: all ways to
/// split the letters into a left part of size k and a right part of size n-k
/// (order preserved), with the braiding scalar Q^{deg_j deg_i} for every
/// pair (j right, i left, j < i).
pub fn coproduct_component(
    word: &[usize],
    k: usize,
    letters: &[Rat],
    bc: &BraidingContext,
) -> Vec<(Vec<usize>, Vec<usize>, QScalar)> {
    use itertools::Itertools;
    let n = word.len();
    let mut out = Vec::new();
    for left_set in (0..n).combinations(k) {
        let mut exp = Rat::from_integer(0);
        let in_left = {
            let mut mask = vec![false; n];
            for &i in &left_set {
                mask[i] = true;
            }
            mask
        };
        for i in &left_set {
            for j in 0..*i {
                if !in_left[j] {
                    exp += letters[word[j]] * letters[word[*i]];
                }
            }
        }
        let scalar = bc.q_cap_pow(exp).expect("letter degrees stay in the lattice");
        let left: Vec<usize> = left_set.iter().map(|&i| word[i]).collect();
        let right: Vec<usize> = (0..n).filter(|i| !in_left[*i]).map(|i| word[i]).collect();
        out.push((left, right, scalar));
    }
    out
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct PairingAxiomReport {
    /// (degree, multiplication-side axiom holds, comultiplication-side axiom holds)
    pub per_degree: Vec<(usize, bool, bool)>,
    pub pass: bool,
}

/// Verify the two Hopf-pairing axioms on all graded pieces up to `n_max`:
/// rho o (mu (x) id) = rho o (id (x) rho (x) id) o (id (x) id (x) Delta)
/// and its mirror, as exact identities of matrices on word bases.
pub fn check_pairing_axioms(
    n_max: usize,
    zeta: &QScalar,
    xi: &QScalar,
    bc: &BraidingContext,
) -> Result<PairingAxiomReport, TensorAlgError> {
    let grams: Vec<Matrix> = (0..=n_max)
        .map(|n| hopf_pairing(n, zeta, xi, bc).map(|f| f.gram))
        .collect::<Result<_, _>>()?;
    Ok(axioms_report_for(&grams, bc))
}

/// Axiom verification against a caller-supplied tower of Gram matrices
/// (degree 0..=n_max). Exposed so negative controls can corrupt one entry.
pub fn axioms_report_for(grams: &[Matrix], bc: &BraidingContext) -> PairingAxiomReport {
    let n_max = grams.len() - 1;
    let mut per_degree = Vec::new();
    let mut pass = true;
    for n in 1..=n_max {
        let a_ok = axiom_mul_side(grams, n, bc);
        let b_ok = axiom_comul_side(grams, n, bc);
        pass &= a_ok && b_ok;
        per_degree.push((n, a_ok, b_ok));
    }
    PairingAxiomReport { per_degree, pass }
}

/// rho(x y (x) w) = sum rho(y (x) w_(1)) rho(x (x) w_(2)) over Delta_{b,a}(w),
/// for all degree splits a + b = n.
fn axiom_mul_side(grams: &[Matrix], n: usize, bc: &BraidingContext) -> bool {
    let basis_n = WordBasis::standard(n);
    let letters = &basis_n.letter_degrees;
    for a in 1..n {
        let b = n - a;
        let basis_a = WordBasis::standard(a);
        let basis_b = WordBasis::standard(b);
        for xi_idx in 0..basis_a.dim() {
            let x = basis_a.word(xi_idx);
            for yi_idx in 0..basis_b.dim() {
                let y = basis_b.word(yi_idx);
                let xy: Vec<usize> = x.iter().chain(y.iter()).copied().collect();
                let xy_idx = basis_n.index(&xy);
                for w_idx in 0..basis_n.dim() {
                    let w = basis_n.word(w_idx);
                    let lhs = grams[n].at(xy_idx, w_idx).clone();
                    let mut rhs = grams[n].context().zero();
                    for (w1, w2, s) in coproduct_component(&w, b, letters, bc) {
                        let g1 = grams[b].at(yi_idx, basis_b.index(&w1));
                        let g2 = grams[a].at(xi_idx, basis_a.index(&w2));
                        if !g1.is_zero() && !g2.is_zero() {
                            rhs = rhs.add(&s.mul(g1).mul(g2));
                        }
                    }
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// rho(x (x) w u) = sum rho(x_(1) (x) u) rho(x_(2) (x) w) over Delta_{d,c}(x),
/// for all degree splits c + d = n.
fn axiom_comul_side(grams: &[Matrix], n: usize, bc: &BraidingContext) -> bool {
    let basis_n = WordBasis::standard(n);
    let letters = &basis_n.letter_degrees;
    for c in 1..n {
        let d = n - c;
        let basis_c = WordBasis::standard(c);
        let basis_d = WordBasis::standard(d);
        for x_idx in 0..basis_n.dim() {
            let x = basis_n.word(x_idx);
            let splits = coproduct_component(&x, d, letters, bc);
            for w_idx in 0..basis_c.dim() {
                for u_idx in 0..basis_d.dim() {
                    let wu: Vec<usize> = basis_c
                        .word(w_idx)
                        .iter()
                        .chain(basis_d.word(u_idx).iter())
                        .copied()
                        .collect();
                    let lhs = grams[n].at(x_idx, basis_n.index(&wu)).clone();
                    let mut rhs = grams[n].context().zero();
                    for (x1, x2, s) in &splits {
                        let g1 = grams[d].at(basis_d.index(x1), u_idx);
                        let g2 = grams[c].at(basis_c.index(x2), w_idx);
                        if !g1.is_zero() && !g2.is_zero() {
                            rhs = rhs.add(&s.mul(g1).mul(g2));
                        }
                    }
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// The degree-4 Serre vector th0^3 th1 - [3]_q th0^2 th1 th0
/// + [3]_q th0 th1 th0^2 - th1 th0^3, with '+' = th0 and '-' = th1,
/// as a coefficient vector over the degree-4 word basis.
pub fn serre_vector(ctx: &ScalarContext) -> Vec<QScalar> {
    let basis = WordBasis::standard(4);
    let three = crate::scalar::q_number(3, ctx);
    let mut v = vec![ctx.zero(); basis.dim()];
    v[basis.index(&[0, 0, 0, 1])] = ctx.one();
    v[basis.index(&[0, 0, 1, 0])] = three.neg();
    v[basis.index(&[0, 1, 0, 0])] = three;
    v[basis.index(&[1, 0, 0, 0])] = ctx.one().neg();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q_factorial, q_number};

    fn setup() -> (ScalarContext, BraidingContext) {
        let ctx = ScalarContext::generic(1);
        let bc = BraidingContext::new(&ctx);
        (ctx, bc)
    }

    #[test]
    fn symmetriser_degree_one_is_identity() {
        let (ctx, bc) = setup();
        let s = symmetriser(1, &[Rat::from_integer(1), Rat::from_integer(-1)], &bc).unwrap();
        assert_eq!(s, Matrix::identity(2, &ctx));
    }

    #[test]
    fn symmetriser_single_letter_scalar() {
        // On the single-letter line, S_2 acts by 1 + Q = q^{-1} [2]_q.
        let (ctx, bc) = setup();
        let s = symmetriser(2, &[Rat::from_integer(1)], &bc).unwrap();
        let expected = ctx.one().add(&bc.q_cap());
        assert_eq!(s.at(0, 0), &expected);
        let alt = ctx.q_int_pow(-1).mul(&q_number(2, &ctx));
        assert_eq!(s.at(0, 0), &alt);
    }

    #[test]
    fn symmetriser_single_letter_diagonal_formula() {
        // Sym restricted to the single-letter subalgebra is
        // q^{-n(n-1)/2} [n]_q! for all n up to 5.
        let (ctx, bc) = setup();
        for n in 1..=5usize {
            let s = symmetriser(n, &[Rat::from_integer(1)], &bc).unwrap();
            let expected = ctx
                .q_int_pow(-((n as i64) * (n as i64 - 1) / 2))
                .mul(&q_factorial(n as u32, &ctx));
            assert_eq!(s.at(0, 0), &expected, "failed at n = {n}");
        }
    }

    /// Independent oracle: enumerate the braid lifts of S_3 with
    /// insertion-style reduced words rather than bubble sort.
    #[test]
    fn symmetriser_degree_three_against_insertion_oracle() {
        let (ctx, bc) = setup();
        let letters = vec![Rat::from_integer(1), Rat::from_integer(-1)];
        let basis = WordBasis { n: 3, letter_degrees: letters.clone() };
        let dim = basis.dim();
        let mut oracle = Matrix::zero(dim, dim, &ctx);
        // S_3 = { id, s0, s1, s0 s1, s1 s0, s0 s1 s0 } via insertion words.
        let words: Vec<Vec<usize>> = vec![
            vec![],
            vec![0],
            vec![1],
            vec![0, 1],
            vec![1, 0],
            vec![0, 1, 0],
        ];
        for word_swaps in words {
            for col in 0..dim {
                let mut w = basis.word(col);
                let mut s = ctx.one();
                for &i in &word_swaps {
                    apply_sigma(&bc, &basis, &mut w, &mut s, i);
                }
                let row = basis.index(&w);
                let v = oracle.at(row, col).add(&s);
                oracle.set(row, col, v);
            }
        }
        let s3 = symmetriser(3, &letters, &bc).unwrap();
        assert_eq!(s3, oracle);
    }

    #[test]
    fn symmetriser_recursion_against_brute_force() {
        // S_n = (S_{n-1} (x) id) * (sum of insertion braids), n <= 4.
        let (ctx, bc) = setup();
        let letters = vec![Rat::from_integer(1), Rat::from_integer(-1)];
        for n in 2..=4usize {
            let basis = WordBasis { n, letter_degrees: letters.clone() };
            let dim = basis.dim();
            let prev = symmetriser(n - 1, &letters, &bc).unwrap();
            let prev_ext = prev.kron(&Matrix::identity(2, &ctx));
            let mut shuffle = Matrix::zero(dim, dim, &ctx);
            for j in 0..n {
                // moves the last strand left to position j
                let swaps: Vec<usize> = (j..n - 1).rev().collect();
                for col in 0..dim {
                    let mut w = basis.word(col);
                    let mut s = ctx.one();
                    for &i in &swaps {
                        apply_sigma(&bc, &basis, &mut w, &mut s, i);
                    }
                    let row = basis.index(&w);
                    let v = shuffle.at(row, col).add(&s);
                    shuffle.set(row, col, v);
                }
            }
            let composed = shuffle.mul(&prev_ext);
            let direct = symmetriser(n, &letters, &bc).unwrap();
            assert_eq!(composed, direct, "recursion failed at n = {n}");
        }
    }

    #[test]
    fn b_power_small_degrees() {
        let (ctx, _) = setup();
        let zeta = ctx.from_int(2);
        let xi = ctx.from_int(3);
        let b0 = b_power(0, &zeta, &xi, &ctx);
        assert!(b0.at(0, 0).is_one());

        let b1 = b_power(1, &zeta, &xi, &ctx);
        assert_eq!(b1.at(0, 1), &zeta);
        assert_eq!(b1.at(1, 0), &xi);
        assert!(b1.at(0, 0).is_zero() && b1.at(1, 1).is_zero());

        // entry at (+-, +-): inner pair (-,+) -> xi, outer (+,-) -> zeta
        let b2 = b_power(2, &zeta, &xi, &ctx);
        let basis = WordBasis::standard(2);
        let pm = basis.index(&[0, 1]);
        assert_eq!(b2.at(pm, pm), &zeta.mul(&xi));
    }

    #[test]
    fn hopf_pairing_degree_two_diagonal() {
        let (ctx, bc) = setup();
        let zeta = ctx.from_int(2);
        let xi = ctx.from_int(3);
        let form = hopf_pairing(2, &zeta, &xi, &bc).unwrap();
        let basis = WordBasis::standard(2);
        let pp = basis.index(&[0, 0]);
        let mm = basis.index(&[1, 1]);
        // Gram[++, --] = zeta^2 (1 + Q)
        let expected = zeta.mul(&zeta).mul(&ctx.one().add(&bc.q_cap()));
        assert_eq!(form.gram.at(pp, mm), &expected);
        // degree mismatch entries vanish
        let pm = basis.index(&[0, 1]);
        assert!(form.gram.at(pp, pm).is_zero());
        assert!(form.charge_conserving());
    }

    #[test]
    fn pairing_equals_right_symmetrised_form() {
        // b^{*n} o (S_n (x) id) = b^{*n} o (id (x) S_n)
        let (ctx, bc) = setup();
        let zeta = ctx.from_int(2);
        let xi = ctx.from_int(5);
        for n in 1..=4usize {
            let basis = WordBasis::standard(n);
            let s = symmetriser(n, &basis.letter_degrees, &bc).unwrap();
            let b = b_power(n, &zeta, &xi, &ctx);
            let left = s.transpose().mul(&b);
            let right = b.mul(&s);
            assert_eq!(left, right, "failed at degree {n}");
        }
    }

    #[test]
    fn radical_degree_one_empty() {
        let (ctx, bc) = setup();
        let form = hopf_pairing(1, &ctx.from_int(1), &ctx.from_int(1), &bc).unwrap();
        assert!(radical(&form).is_empty());
    }

    #[test]
    fn radical_contains_serre_vector_at_degree_four() {
        let (ctx, bc) = setup();
        let zeta = ctx.from_int(1);
        let xi = ctx.from_int(1);
        let form = hopf_pairing(4, &zeta, &xi, &bc).unwrap();
        let v = serre_vector(&ctx);
        // v^T Gram = 0
        let prod = Matrix::from_columns(&[v], 16, &ctx).transpose().mul(&form.gram);
        assert!(prod.is_zero(), "Serre vector not in the radical");
        // and the mirror Serre vector (swap + and -) as well
        let basis = WordBasis::standard(4);
        let three = q_number(3, &ctx);
        let mut w = vec![ctx.zero(); 16];
        w[basis.index(&[1, 1, 1, 0])] = ctx.one();
        w[basis.index(&[1, 1, 0, 1])] = three.neg();
        w[basis.index(&[1, 0, 1, 1])] = three;
        w[basis.index(&[0, 1, 1, 1])] = ctx.one().neg();
        let prod = Matrix::from_columns(&[w], 16, &ctx).transpose().mul(&form.gram);
        assert!(prod.is_zero());
    }

    #[test]
    fn radical_at_root_of_unity_degree_two() {
        // when [2]_q = 0 (q^2 = -1, N = 4), the diagonal zeta^2 (1 + Q)
        // vanishes and the word ++ enters the radical.
        let ctx = ScalarContext::root_of_unity(4).unwrap();
        let bc = BraidingContext::new(&ctx);
        let form = hopf_pairing(2, &ctx.from_int(1), &ctx.from_int(1), &bc).unwrap();
        let rad = radical(&form);
        let basis = WordBasis::standard(2);
        let pp = basis.index(&[0, 0]);
        assert!(
            rad.iter().any(|v| !v[pp].is_zero()),
            "++ should lie in the radical when [2]_q = 0"
        );
    }

    #[test]
    fn pairing_axioms_hold_up_to_degree_three() {
        let (ctx, bc) = setup();
        let report = check_pairing_axioms(3, &ctx.from_int(2), &ctx.from_int(3), &bc).unwrap();
        assert!(report.pass, "axioms failed: {:?}", report.per_degree);
    }

    #[test]
    fn pairing_axioms_negative_control() {
        // corrupt the degree-2 Gram: the axiom check must fail at degree 2.
        let (ctx, bc) = setup();
        let zeta = ctx.from_int(2);
        let xi = ctx.from_int(3);
        let mut grams: Vec<Matrix> = (0..=3usize)
            .map(|n| hopf_pairing(n, &zeta, &xi, &bc).unwrap().gram)
            .collect();
        let bad = grams[2].at(0, 3).add(&ctx.one());
        grams[2].set(0, 3, bad);
        let report = axioms_report_for(&grams, &bc);
        assert!(!report.pass);
        let deg2 = report.per_degree.iter().find(|(n, _, _)| *n == 2).unwrap();
        assert!(!deg2.1 || !deg2.2, "corruption must surface at degree 2");
    }

    #[test]
    fn left_and_right_radical_dimensions_agree() {
        let (ctx, bc) = setup();
        for n in 1..=4usize {
            let form = hopf_pairing(n, &ctx.from_int(1), &ctx.from_int(1), &bc).unwrap();
            let left = form.gram.left_kernel_basis().len();
            let right = form.gram.kernel_basis().len();
            assert_eq!(left, right, "radical dimensions differ at degree {n}");
        }
    }
}
