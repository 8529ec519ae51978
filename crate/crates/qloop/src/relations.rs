//! Scenario orchestration for the named relations: the T-system exact
//! sequences, the truncated T-Q sequences, the cyclic T-Q-like relations and
//! (non)commutativity at roots of unity, and the reduction/section checks on
//! Grothendieck classes.
//!
//! Every verified report embeds the exact certificates it relied on and is
//! replayable: the same seed reproduces identical output.

use crate::intertwine::{
    find_isomorphism, hom_space, quotient_representation, sub_representation,
    verify_exact_sequence, IsoSearch,
};
use crate::linalg::Matrix;
use crate::qrep::{
    central_character_via_e1, check_relations, evaluation_pullback, make_cyclic,
    make_q_oscillator, make_vn, make_xm, reduce, restrict_to_borel, section, tensor,
    CentralCharacter, LoopForm, QGroupRep, RepError,
};
use crate::scalar::{QScalar, Rat, ScalarContext, ScalarMode};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RelationError {
    #[error("operation requires generic mode")]
    NotGenericMode,
    #[error("operation requires root-of-unity mode")]
    NotRootMode,
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Intertwine(#[from] crate::intertwine::IntertwineError),
    #[error(transparent)]
    Scalar(#[from] crate::scalar::ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Verified,
    Refuted,
    TruncatedVerified,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationReport {
    pub name: String,
    pub inputs: serde_json::Value,
    pub certificates: Vec<serde_json::Value>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl RelationReport {
    pub fn ok(&self) -> bool {
        matches!(self.verdict, Verdict::Verified | Verdict::TruncatedVerified)
    }
}

/// The T-system step at level n: certify the exact sequence
/// 0 -> V_{n-1}(q^{n+2} z) -> V_1(z) (x) V_n(q^{n+1} z) -> V_{n+1}(q^n z) -> 0.
pub fn t_system(
    n: u32,
    z: &QScalar,
    ctx: &ScalarContext,
    seed: u64,
) -> Result<RelationReport, RelationError> {
    if ctx.mode() != ScalarMode::Generic {
        return Err(RelationError::NotGenericMode);
    }
    let ni = n as i64;
    let a = evaluation_pullback(
        &make_vn(n - 1, ctx)?,
        &ctx.q_int_pow(ni + 2).mul(z),
        LoopForm::K,
    )?;
    let b = tensor(
        &evaluation_pullback(&make_vn(1, ctx)?, z, LoopForm::K)?,
        &evaluation_pullback(&make_vn(n, ctx)?, &ctx.q_int_pow(ni + 1).mul(z), LoopForm::K)?,
    )?;
    let c = evaluation_pullback(&make_vn(n + 1, ctx)?, &ctx.q_int_pow(ni).mul(z), LoopForm::K)?;
    let inputs = serde_json::json!({
        "n": n,
        "z": z.canonical_string(),
        "seed": seed,
    });
    match verify_exact_sequence(&a, &b, &c, seed) {
        Ok(seq) => Ok(RelationReport {
            name: format!("t-system n={n}"),
            inputs,
            certificates: vec![seq.to_json()],
            verdict: Verdict::Verified,
            notes: vec![],
        }),
        Err(e) => Ok(RelationReport {
            name: format!("t-system n={n}"),
            inputs,
            certificates: vec![],
            verdict: Verdict::Refuted,
            notes: vec![e.to_string()],
        }),
    }
}

/// The truncated T-Q step: certify the two short exact sequences that
/// interleave the oscillator modules with the fundamental evaluation module,
/// plus the off-resonance commutation Q (x) V_1(w) = V_1(w) (x) Q.
///
/// In this crate's evaluation convention (the one fixed by the T-system
/// sequences) the resonance pairs Q_{+,m}(z) with V_1(q z), and the exact
/// parameter alignment is
///   0 -> Q_{+,m-1}(z q^{-2}) -> Q_{+,m}(z) (x) V_1(q z) -> Q_{+,m+1}(z q^2) -> 0,
///   0 -> Q_{+,m+1}(z q^2) -> V_1(q z) (x) Q_{+,m}(z) -> Q_{+,m-1}(z q^{-2}) -> 0.
/// This is the printed relation up to the evaluation-parameter convention of
/// the sources; the shifts were determined by exact computation.
pub fn t_q_relation(
    m: i64,
    z: &QScalar,
    truncation: u32,
    ctx: &ScalarContext,
    seed: u64,
) -> Result<RelationReport, RelationError> {
    if ctx.mode() != ScalarMode::Generic {
        return Err(RelationError::NotGenericMode);
    }
    let name = format!("t-q m={m}");
    let inputs = serde_json::json!({
        "m": m,
        "z": z.canonical_string(),
        "truncation": truncation,
        "seed": seed,
    });
    if truncation < 4 {
        return Ok(RelationReport {
            name,
            inputs,
            certificates: vec![],
            verdict: Verdict::Inconclusive,
            notes: vec![format!(
                "truncation depth {truncation} leaves no interior after boundary exclusion"
            )],
        });
    }
    let n = truncation;
    let q_mid = make_q_oscillator(m, z, n, ctx)?;
    let q_down = make_q_oscillator(m - 1, &ctx.q_int_pow(-2).mul(z), n, ctx)?;
    let q_up = make_q_oscillator(m + 1, &ctx.q_int_pow(2).mul(z), n, ctx)?;
    let resonance_w = ctx.q().mul(z);
    let v1 = restrict_to_borel(&evaluation_pullback(&make_vn(1, ctx)?, &resonance_w, LoopForm::Hbar)?);

    let mut certificates = Vec::new();
    let mut notes = vec![format!(
        "resonance pairing point for V_1 is q z = {}",
        resonance_w.canonical_string()
    )];
    let seq1 = verify_exact_sequence(&q_down, &tensor(&q_mid, &v1)?, &q_up, seed);
    let seq2 = verify_exact_sequence(&q_up, &tensor(&v1, &q_mid)?, &q_down, seed ^ 1);
    let mut ok = true;
    match seq1 {
        Ok(s) => certificates.push(s.to_json()),
        Err(e) => {
            ok = false;
            notes.push(format!("first sequence: {e}"));
        }
    }
    match seq2 {
        Ok(s) => certificates.push(s.to_json()),
        Err(e) => {
            ok = false;
            notes.push(format!("second sequence: {e}"));
        }
    }

    // off-resonance isomorphism at w away from the pairing point q z
    let w = ctx.from_int(3).mul(z);
    let v1w = restrict_to_borel(&evaluation_pullback(&make_vn(1, ctx)?, &w, LoopForm::Hbar)?);
    let left = tensor(&q_mid, &v1w)?;
    let right = tensor(&v1w, &q_mid)?;
    match find_isomorphism(&left, &right, seed ^ 2)? {
        IsoSearch::Found(t) => {
            certificates.push(serde_json::json!({
                "off_resonance_iso": t.to_canonical_strings(),
                "w": w.canonical_string(),
            }));
        }
        other => {
            ok = false;
            notes.push(format!("off-resonance isomorphism not found: {other:?}"));
        }
    }

    Ok(RelationReport {
        name,
        inputs,
        certificates,
        verdict: if ok { Verdict::TruncatedVerified } else { Verdict::Refuted },
        notes,
    })
}

/// Expected central characters of the resonant subquotients,
/// p1 ... p4 in terms of p = (x, y, z, c) and u = w'/w.
struct ExpectedCharacters {
    p1: CentralCharacter,
    p2: CentralCharacter,
    p3: CentralCharacter,
    p4: CentralCharacter,
}

fn expected_characters(
    p: &CentralCharacter,
    u: &QScalar,
    npr: u32,
    ctx: &ScalarContext,
) -> ExpectedCharacters {
    let qn = ctx.q_int_pow(npr as i64);
    let u_inv = u.invert().expect("w'/w invertible");
    // c1 = q w/w' + q^{-1} w'/w, c2 = q^{-1} w/w' + q w'/w
    let c1 = ctx.q().mul(&u_inv).add(&ctx.q_int_pow(-1).mul(u));
    let c2 = ctx.q_int_pow(-1).mul(&u_inv).add(&ctx.q().mul(u));
    ExpectedCharacters {
        p1: CentralCharacter {
            x: p.x.clone(),
            y: qn.mul(&p.y),
            z: qn.mul(&p.z),
            c: c1.clone(),
        },
        p2: CentralCharacter {
            x: p.x.clone(),
            y: qn.mul(&p.y),
            z: qn.mul(&p.z),
            c: c2.clone(),
        },
        p3: CentralCharacter {
            x: qn.mul(&p.x),
            y: p.y.clone(),
            z: qn.mul(&p.z),
            c: c2,
        },
        p4: CentralCharacter {
            x: qn.mul(&p.x),
            y: p.y.clone(),
            z: qn.mul(&p.z),
            c: c1,
        },
    }
}

fn character_json(cc: &CentralCharacter) -> serde_json::Value {
    serde_json::json!({
        "x": cc.x.canonical_string(),
        "y": cc.y.canonical_string(),
        "z": cc.z.canonical_string(),
        "c": cc.c.canonical_string(),
    })
}

/// Casimir q k1^{-1} + q^{-1} k1 + (q-q^{-1})^2 e1+ e1- through the loop
/// action (k1 = k0^{-1}).
fn casimir_via_e1(rep: &QGroupRep) -> Matrix {
    let ctx = rep.context().clone();
    let (_, _, e1p, e1m) = rep.loop_matrices();
    let k0 = rep.k_matrix();
    let k1 = k0.inverse().expect("k invertible");
    let qdiff = ctx.q().sub(&ctx.q_int_pow(-1));
    k0.scale(&ctx.q())
        .add(&k1.scale(&ctx.q_int_pow(-1)))
        .add(&e1p.mul(e1m).scale(&qdiff.mul(&qdiff)))
}

fn match_note(name: &str, got: &CentralCharacter, want: &CentralCharacter) -> (bool, String) {
    let ok = got == want;
    (
        ok,
        format!(
            "{name}: computed {} expected {}",
            serde_json::to_string(&character_json(got)).unwrap(),
            serde_json::to_string(&character_json(want)).unwrap()
        ),
    )
}

/// Solve for the cyclic parameter b so that the Casimir eigenvalue equals
/// u + u^{-1} (the resonance value for w'/w = u), given a and lambda.
pub fn solve_b_for_resonance(
    a: &QScalar,
    lambda: &QScalar,
    u: &QScalar,
    ctx: &ScalarContext,
) -> Result<QScalar, RelationError> {
    // c = (q - q^{-1})^2 a b + q lambda + q^{-1} lambda^{-1}
    let c_target = u.add(&u.invert()?);
    let qdiff2 = ctx.q().sub(&ctx.q_int_pow(-1)).pow(2)?;
    let rest = ctx
        .q()
        .mul(lambda)
        .add(&ctx.q_int_pow(-1).mul(&lambda.invert()?));
    Ok(c_target.sub(&rest).checked_div(&qdiff2.mul(a))?)
}

/// Cyclic T-Q relations at a root of unity. Off resonance
/// (w'/w + w/w' != c): at q^{N'} = 1 an isomorphism
/// V^p(w) (x) V_1(w') = V_1(w') (x) V^p(w) must exist; at q^{N'} = -1 the
/// hom space must vanish. At resonance both sequences are certified and the
/// subquotient central characters must match the p1..p4 formulas.
pub fn cyclic_tq(
    a: &QScalar,
    b: &QScalar,
    lambda: &QScalar,
    w: &QScalar,
    w_prime: &QScalar,
    ctx: &ScalarContext,
    seed: u64,
) -> Result<RelationReport, RelationError> {
    let npr = ctx.order_of_q_squared().ok_or(RelationError::NotRootMode)?;
    let vp = make_cyclic(a, b, lambda, ctx)?;
    let cc = crate::qrep::central_character(&vp)?;
    let u = w_prime.checked_div(w)?;
    let resonant = u.add(&u.invert()?) == cc.c;
    let q_to_npr = ctx.q_int_pow(npr as i64);
    let odd_type = q_to_npr.is_one();

    let vp_w = evaluation_pullback(&vp, w, LoopForm::K)?;
    let v1_wp = evaluation_pullback(&make_vn(1, ctx)?, w_prime, LoopForm::K)?;
    let left = tensor(&vp_w, &v1_wp)?;
    let right = tensor(&v1_wp, &vp_w)?;

    let mut notes = vec![
        format!("N' = {npr}, q^N' = {}", q_to_npr.canonical_string()),
        format!("central character: {}", serde_json::to_string(&character_json(&cc)).unwrap()),
        format!("resonant: {resonant}"),
    ];
    let inputs = serde_json::json!({
        "a": a.canonical_string(),
        "b": b.canonical_string(),
        "lambda": lambda.canonical_string(),
        "w": w.canonical_string(),
        "w_prime": w_prime.canonical_string(),
        "seed": seed,
    });
    let mut certificates = Vec::new();

    if !resonant {
        let verdict = if odd_type {
            match find_isomorphism(&left, &right, seed)? {
                IsoSearch::Found(t) => {
                    certificates.push(serde_json::json!({
                        "isomorphism": t.to_canonical_strings(),
                    }));
                    notes.push("odd case: isomorphism found".to_string());
                    Verdict::Verified
                }
                other => {
                    notes.push(format!("odd case but no isomorphism: {other:?}"));
                    Verdict::Refuted
                }
            }
        } else {
            let hom = hom_space(&left, &right)?;
            if hom.dim() == 0 {
                certificates.push(serde_json::json!({ "hom_dimension": 0 }));
                notes.push("even case: certified absence of intertwiners".to_string());
                Verdict::Verified
            } else {
                notes.push(format!("even case but hom dimension {}", hom.dim()));
                Verdict::Refuted
            }
        };
        return Ok(RelationReport { name: "cyclic-tq".into(), inputs, certificates, verdict, notes });
    }

    // Resonant branch: extract the submodule as the Casimir eigenspace for
    // the expected eigenvalue, certify both sequences, and compare the
    // subquotient characters with the p1..p4 formulas.
    let expected = expected_characters(&cc, &u, npr, ctx);
    let mut all_ok = true;
    for (label, big, sub_c, quot_c) in [
        ("V^p(w) (x) V_1(w')", &left, &expected.p1, &expected.p2),
        ("V_1(w') (x) V^p(w)", &right, &expected.p3, &expected.p4),
    ] {
        let cas = casimir_via_e1(big);
        let id = Matrix::identity(big.dim, ctx);
        let shifted = cas.sub(&id.scale(&sub_c.c));
        let kernel = shifted.kernel_basis();
        if kernel.len() != npr as usize {
            all_ok = false;
            notes.push(format!(
                "{label}: Casimir eigenspace for the expected eigenvalue has dimension {}, want {npr}",
                kernel.len()
            ));
            continue;
        }
        let span = Matrix::from_columns(&kernel, big.dim, ctx);
        let (sub, incl) = sub_representation(big, &span)?;
        let (quot, proj) = quotient_representation(big, &span)?;
        if !proj.mul(&incl).is_zero() {
            all_ok = false;
            notes.push(format!("{label}: projection does not annihilate the submodule"));
            continue;
        }
        let sub_cc = central_character_via_e1(&sub)?;
        let quot_cc = central_character_via_e1(&quot)?;
        let (ok_sub, note_sub) = match_note(&format!("{label} sub"), &sub_cc, sub_c);
        let (ok_quot, note_quot) = match_note(&format!("{label} quotient"), &quot_cc, quot_c);
        notes.push(note_sub);
        notes.push(note_quot);
        all_ok &= ok_sub && ok_quot;
        certificates.push(serde_json::json!({
            "sequence": label,
            "f": incl.to_canonical_strings(),
            "g": proj.to_canonical_strings(),
            "rank_f": incl.rank(),
            "rank_g": proj.rank(),
            "dim_b": big.dim,
            "sub_character": character_json(&sub_cc),
            "quotient_character": character_json(&quot_cc),
        }));
    }
    // p5 bookkeeping: pulling T_1 past Q_p multiplies (x, y, z) by q^{N'}
    notes.push(format!(
        "p5 = (q^N' x, q^N' y, q^N' z, c); classes on the two sides {} (q^N' = {})",
        if odd_type { "agree" } else { "differ" },
        q_to_npr.canonical_string()
    ));

    Ok(RelationReport {
        name: "cyclic-tq".into(),
        inputs,
        certificates,
        verdict: if all_ok { Verdict::Verified } else { Verdict::Refuted },
        notes,
    })
}

/// Reduction/section suite: reduce o section = id on sampled k-form modules,
/// X_m-centrality by explicit identity intertwiners, and monoidality of the
/// reduction on samples.
pub fn grothendieck_reduction_suite(
    samples: u32,
    ctx: &ScalarContext,
    seed: u64,
) -> Result<RelationReport, RelationError> {
    if ctx.mode() != ScalarMode::Generic {
        return Err(RelationError::NotGenericMode);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut notes = Vec::new();
    let mut ok = true;

    let sample_z = |rng: &mut ChaCha8Rng| -> QScalar {
        let num = loop {
            let n = rng.gen_range(-9i64..=9);
            if n != 0 {
                break n;
            }
        };
        let den = rng.gen_range(1i64..=9);
        ctx.from_rat(Rat::new(num, den))
    };

    for i in 0..samples {
        let n = rng.gen_range(0u32..=3);
        let z = sample_z(&mut rng);
        let v = evaluation_pullback(&make_vn(n, ctx)?, &z, LoopForm::K)?;
        let v = if rng.gen_bool(0.3) {
            let w = sample_z(&mut rng);
            tensor(&v, &evaluation_pullback(&make_vn(1, ctx)?, &w, LoopForm::K)?)?
        } else {
            v
        };
        // reduce o section = id
        let back = reduce(&section(&v)?)?;
        if back.k_eigenvalues() != v.k_eigenvalues() || back.matrices != v.matrices {
            ok = false;
            notes.push(format!("sample {i}: reduce o section != id"));
        }
        // X_m centrality: the identity intertwines X_m (x) V and V (x) X_m
        let m = rng.gen_range(-3i64..=3);
        let xm = make_xm(m, ctx);
        let h = section(&v)?;
        let lhs = tensor(&xm, &h)?;
        let rhs = tensor(&h, &xm)?;
        if lhs.matrices != rhs.matrices || lhs.weights != rhs.weights {
            ok = false;
            notes.push(format!("sample {i}: X_m does not commute with the sample"));
        }
        if !reduce(&lhs)?.k_eigenvalues().iter().zip(v.k_eigenvalues()).all(|(p, q)| *p == q) {
            ok = false;
            notes.push(format!("sample {i}: reduce(X_m (x) V) has wrong weights"));
        }
        // monoidality of reduce on a pair
        let w = sample_z(&mut rng);
        let other = section(&evaluation_pullback(&make_vn(1, ctx)?, &w, LoopForm::K)?)?;
        let red_of_tensor = reduce(&tensor(&h, &other)?)?;
        let tensor_of_red = tensor(&reduce(&h)?, &reduce(&other)?)?;
        if red_of_tensor.matrices != tensor_of_red.matrices
            || red_of_tensor.k_eigenvalues() != tensor_of_red.k_eigenvalues()
        {
            ok = false;
            notes.push(format!("sample {i}: reduce is not monoidal"));
        }
        // relations stay intact through the round trip
        if !check_relations(&back).pass() {
            ok = false;
            notes.push(format!("sample {i}: relations broken after round trip"));
        }
    }
    Ok(RelationReport {
        name: "grothendieck-reduction".into(),
        inputs: serde_json::json!({ "samples": samples, "seed": seed }),
        certificates: vec![],
        verdict: if ok { Verdict::Verified } else { Verdict::Refuted },
        notes,
    })
}

/// Negative control for the T-system: the wrong spectral shift must be
/// refuted (no certificate exists).
pub fn t_system_wrong_shift(
    n: u32,
    z: &QScalar,
    ctx: &ScalarContext,
    seed: u64,
) -> Result<RelationReport, RelationError> {
    if ctx.mode() != ScalarMode::Generic {
        return Err(RelationError::NotGenericMode);
    }
    let ni = n as i64;
    let a = evaluation_pullback(&make_vn(n - 1, ctx)?, &ctx.q_int_pow(ni + 2).mul(z), LoopForm::K)?;
    // deliberately V_n(z) instead of V_n(q^{n+1} z)
    let b = tensor(
        &evaluation_pullback(&make_vn(1, ctx)?, z, LoopForm::K)?,
        &evaluation_pullback(&make_vn(n, ctx)?, z, LoopForm::K)?,
    )?;
    let c = evaluation_pullback(&make_vn(n + 1, ctx)?, &ctx.q_int_pow(ni).mul(z), LoopForm::K)?;
    let verdict = match verify_exact_sequence(&a, &b, &c, seed) {
        Ok(_) => Verdict::Verified,
        Err(_) => Verdict::Refuted,
    };
    Ok(RelationReport {
        name: format!("t-system wrong-shift n={n}"),
        inputs: serde_json::json!({ "n": n, "z": z.canonical_string(), "seed": seed }),
        certificates: vec![],
        verdict,
        notes: vec!["negative control: expected verdict is refuted".into()],
    })
}
