//! Scenario file schema and check execution.
//!
//! A scenario is a JSON document fixing the scalar context, a seed, and a
//! list of named checks. Unknown keys are rejected so that typos fail fast.

use qloop::boson::{self, CExact, CoboundaryOutcome, SimpleBimoduleLabel};
use qloop::braidcat::BraidingContext;
use qloop::commcheck;
use qloop::intertwine;
use qloop::qrep::{self, LoopForm, QGroupRep};
use qloop::relations::{self, RelationReport, Verdict};
use qloop::scalar::{QScalar, Rat, ScalarContext};
use qloop::tensoralg;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub context: ContextSpec,
    #[serde(default)]
    pub seed: u64,
    pub checks: Vec<CheckSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContextSpec {
    Generic {
        #[serde(default = "default_root_denominator")]
        root_denominator: u32,
    },
    Root { order: u32 },
}

fn default_root_denominator() -> u32 {
    2
}

impl ContextSpec {
    pub fn build(&self) -> Result<ScalarContext, String> {
        match self {
            ContextSpec::Generic { root_denominator } => {
                if *root_denominator == 0 {
                    return Err("root_denominator must be positive".into());
                }
                Ok(ScalarContext::generic(*root_denominator))
            }
            ContextSpec::Root { order } => {
                ScalarContext::root_of_unity(*order).map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "constructor", rename_all = "snake_case", deny_unknown_fields)]
pub enum RepSpec {
    Vn { n: u32 },
    VnEval { n: u32, z: String, form: FormSpec },
    Xm { m: i64 },
    Oscillator { m: i64, z: String, truncation: u32 },
    Cyclic { a: String, b: String, lambda: String },
    Tensor { left: Box<RepSpec>, right: Box<RepSpec> },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormSpec {
    K,
    Hbar,
}

impl RepSpec {
    pub fn build(&self, ctx: &ScalarContext) -> Result<QGroupRep, String> {
        let parse = |s: &str| QScalar::parse(ctx, s).map_err(|e| e.to_string());
        match self {
            RepSpec::Vn { n } => qrep::make_vn(*n, ctx).map_err(|e| e.to_string()),
            RepSpec::VnEval { n, z, form } => {
                let v = qrep::make_vn(*n, ctx).map_err(|e| e.to_string())?;
                let z = parse(z)?;
                let form = match form {
                    FormSpec::K => LoopForm::K,
                    FormSpec::Hbar => LoopForm::Hbar,
                };
                qrep::evaluation_pullback(&v, &z, form).map_err(|e| e.to_string())
            }
            RepSpec::Xm { m } => Ok(qrep::make_xm(*m, ctx)),
            RepSpec::Oscillator { m, z, truncation } => {
                qrep::make_q_oscillator(*m, &parse(z)?, *truncation, ctx).map_err(|e| e.to_string())
            }
            RepSpec::Cyclic { a, b, lambda } => {
                qrep::make_cyclic(&parse(a)?, &parse(b)?, &parse(lambda)?, ctx)
                    .map_err(|e| e.to_string())
            }
            RepSpec::Tensor { left, right } => {
                let l = left.build(ctx)?;
                let r = right.build(ctx)?;
                qrep::tensor(&l, &r).map_err(|e| e.to_string())
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    TSystem {
        name: Option<String>,
        n: u32,
        z: String,
    },
    TQ {
        name: Option<String>,
        m: i64,
        z: String,
        truncation: u32,
    },
    CyclicTq {
        name: Option<String>,
        a: String,
        #[serde(default)]
        b: Option<String>,
        /// When `b` is absent, solve for b so that the Casimir equals
        /// u + 1/u at u = w'/w (resonant input).
        #[serde(default)]
        resonant: bool,
        lambda: String,
        w: String,
        w_prime: String,
    },
    Commutation {
        name: Option<String>,
        setting: SettingSpec,
        rep: RepSpec,
        zeta: String,
        xi: String,
    },
    PairingAxioms {
        name: Option<String>,
        n_max: usize,
        zeta: String,
        xi: String,
    },
    Radical {
        name: Option<String>,
        degree: usize,
        zeta: String,
        xi: String,
    },
    Cocycles {
        name: Option<String>,
        samples: u32,
        r: String,
    },
    ChargeLattice {
        name: Option<String>,
        r: String,
        range: i64,
    },
    GrothReduction {
        name: Option<String>,
        samples: u32,
    },
    Relations {
        name: Option<String>,
        rep: RepSpec,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SettingSpec {
    Uncompactified,
    Compactified,
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    if let Some((a, b)) = s.split_once('/') {
        let n: i64 = a.trim().parse().map_err(|_| format!("bad rational '{s}'"))?;
        let d: i64 = b.trim().parse().map_err(|_| format!("bad rational '{s}'"))?;
        if d == 0 {
            return Err(format!("bad rational '{s}'"));
        }
        Ok(Rat::new(n, d))
    } else {
        let n: i64 = s.trim().parse().map_err(|_| format!("bad rational '{s}'"))?;
        Ok(Rat::from_integer(n))
    }
}

fn report(name: String, verdict: Verdict, notes: Vec<String>, inputs: serde_json::Value) -> RelationReport {
    RelationReport { name, inputs, certificates: vec![], verdict, notes }
}

impl CheckSpec {
    pub fn name(&self, index: usize) -> String {
        let given = match self {
            CheckSpec::TSystem { name, .. }
            | CheckSpec::TQ { name, .. }
            | CheckSpec::CyclicTq { name, .. }
            | CheckSpec::Commutation { name, .. }
            | CheckSpec::PairingAxioms { name, .. }
            | CheckSpec::Radical { name, .. }
            | CheckSpec::Cocycles { name, .. }
            | CheckSpec::ChargeLattice { name, .. }
            | CheckSpec::GrothReduction { name, .. }
            | CheckSpec::Relations { name, .. } => name.clone(),
        };
        given.unwrap_or_else(|| format!("check-{index}"))
    }

    pub fn run(&self, ctx: &ScalarContext, seed: u64, index: usize) -> RelationReport {
        match self.run_inner(ctx, seed) {
            Ok(mut r) => {
                r.name = self.name(index);
                r
            }
            Err(e) => report(
                self.name(index),
                Verdict::Refuted,
                vec![format!("error: {e}")],
                serde_json::json!({}),
            ),
        }
    }

    fn run_inner(&self, ctx: &ScalarContext, seed: u64) -> Result<RelationReport, String> {
        let parse = |s: &str| QScalar::parse(ctx, s).map_err(|e| e.to_string());
        match self {
            CheckSpec::TSystem { n, z, .. } => {
                relations::t_system(*n, &parse(z)?, ctx, seed).map_err(|e| e.to_string())
            }
            CheckSpec::TQ { m, z, truncation, .. } => {
                relations::t_q_relation(*m, &parse(z)?, *truncation, ctx, seed)
                    .map_err(|e| e.to_string())
            }
            CheckSpec::CyclicTq { a, b, resonant, lambda, w, w_prime, .. } => {
                let a = parse(a)?;
                let lambda = parse(lambda)?;
                let w = parse(w)?;
                let wp = parse(w_prime)?;
                let b = match (b, resonant) {
                    (Some(b), _) => parse(b)?,
                    (None, true) => {
                        let u = wp.checked_div(&w).map_err(|e| e.to_string())?;
                        relations::solve_b_for_resonance(&a, &lambda, &u, ctx)
                            .map_err(|e| e.to_string())?
                    }
                    (None, false) => return Err("cyclic_tq needs b or resonant: true".into()),
                };
                relations::cyclic_tq(&a, &b, &lambda, &w, &wp, ctx, seed).map_err(|e| e.to_string())
            }
            CheckSpec::Commutation { setting, rep, zeta, xi, .. } => {
                let v = rep.build(ctx)?;
                let zeta = parse(zeta)?;
                let xi = parse(xi)?;
                let module = match setting {
                    SettingSpec::Uncompactified => {
                        commcheck::pullback_uncompactified(&v, &zeta, &xi)
                    }
                    SettingSpec::Compactified => {
                        commcheck::pullback_compactified(&v, &zeta, &xi, -2)
                    }
                }
                .map_err(|e| e.to_string())?;
                let comm = commcheck::check_commutation(&module);
                let yd = commcheck::check_yd_generators(&module);
                let ok = comm.pass && yd.pass && yd.agrees_with_commutation;
                Ok(RelationReport {
                    name: String::new(),
                    inputs: serde_json::json!({
                        "zeta": zeta.canonical_string(),
                        "xi": xi.canonical_string(),
                    }),
                    certificates: vec![
                        serde_json::to_value(&comm).unwrap(),
                        serde_json::to_value(&yd).unwrap(),
                    ],
                    verdict: if ok { Verdict::Verified } else { Verdict::Refuted },
                    notes: vec![],
                })
            }
            CheckSpec::PairingAxioms { n_max, zeta, xi, .. } => {
                let bc = BraidingContext::new(ctx);
                let rep = tensoralg::check_pairing_axioms(*n_max, &parse(zeta)?, &parse(xi)?, &bc)
                    .map_err(|e| e.to_string())?;
                Ok(RelationReport {
                    name: String::new(),
                    inputs: serde_json::json!({ "n_max": n_max }),
                    certificates: vec![serde_json::to_value(&rep).unwrap()],
                    verdict: if rep.pass { Verdict::Verified } else { Verdict::Refuted },
                    notes: vec![],
                })
            }
            CheckSpec::Radical { degree, zeta, xi, .. } => {
                let bc = BraidingContext::new(ctx);
                let form = tensoralg::hopf_pairing(*degree, &parse(zeta)?, &parse(xi)?, &bc)
                    .map_err(|e| e.to_string())?;
                let rad = tensoralg::radical(&form);
                let right = form.gram.kernel_basis().len();
                let mut ok = rad.len() == right && form.charge_conserving();
                let mut notes = vec![format!("radical dimension {} at degree {}", rad.len(), degree)];
                if *degree == 4 && ctx.root_order().is_none() {
                    let serre = tensoralg::serre_vector(ctx);
                    let mut residual_zero = true;
                    for col in 0..form.gram.cols() {
                        let mut acc = ctx.zero();
                        for row in 0..form.gram.rows() {
                            if !serre[row].is_zero() {
                                acc = acc.add(&serre[row].mul(form.gram.at(row, col)));
                            }
                        }
                        if !acc.is_zero() {
                            residual_zero = false;
                        }
                    }
                    ok &= residual_zero;
                    notes.push(format!("serre vector in radical: {residual_zero}"));
                }
                Ok(RelationReport {
                    name: String::new(),
                    inputs: serde_json::json!({ "degree": degree }),
                    certificates: vec![form.gram_json()],
                    verdict: if ok { Verdict::Verified } else { Verdict::Refuted },
                    notes,
                })
            }
            CheckSpec::Cocycles { samples, r, .. } => {
                let r = parse_rat(r)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut ok = true;
                let mut notes = Vec::new();
                for _ in 0..*samples {
                    let angle = |rng: &mut ChaCha8Rng| {
                        Rat::new(rng.gen_range(0i64..48), rng.gen_range(1i64..48))
                    };
                    let a = CExact::unit(angle(&mut rng));
                    let b = CExact::unit(angle(&mut rng));
                    let c = CExact::unit(angle(&mut rng));
                    let s = |x: &CExact, y: &CExact| {
                        boson::sigma_cocycle(x, y, r).expect("unit modulus") as i64
                    };
                    if s(&a, &b) + s(&a.mul(&b), &c) != s(&b, &c) + s(&a, &b.mul(&c)) {
                        ok = false;
                        notes.push("sigma 2-cocycle identity failed".into());
                    }
                    let lbl = |rng: &mut ChaCha8Rng| {
                        SimpleBimoduleLabel::new(
                            CExact::unit(angle(rng)),
                            CExact::unit(angle(rng)),
                            r,
                        )
                        .expect("valid label")
                    };
                    let (g1, g2, g3, g4) = (lbl(&mut rng), lbl(&mut rng), lbl(&mut rng), lbl(&mut rng));
                    let p = |x: &SimpleBimoduleLabel, y: &SimpleBimoduleLabel, z: &SimpleBimoduleLabel| {
                        boson::psi_cocycle(x, y, z).expect("same radius")
                    };
                    let d = p(&g2, &g3, &g4)
                        .mul(&p(&boson::fuse(&g1, &g2).unwrap(), &g3, &g4).inv())
                        .mul(&p(&g1, &boson::fuse(&g2, &g3).unwrap(), &g4))
                        .mul(&p(&g1, &g2, &boson::fuse(&g3, &g4).unwrap()).inv())
                        .mul(&p(&g1, &g2, &g3));
                    if !d.is_one() {
                        ok = false;
                        notes.push("psi 3-cocycle identity failed".into());
                    }
                }
                let g = SimpleBimoduleLabel::new(CExact::minus_one(), CExact::minus_one(), r)
                    .map_err(|e| e.to_string())?;
                if boson::psi_cocycle(&g, &g, &g).map_err(|e| e.to_string())? != CExact::minus_one() {
                    ok = false;
                    notes.push("psi((-1,-1)^3) != -1".into());
                }
                match boson::coboundary_test(&[g], r).map_err(|e| e.to_string())? {
                    CoboundaryOutcome::NontrivialWitness { .. } => {}
                    other => {
                        ok = false;
                        notes.push(format!("coboundary test on <(-1,-1)> returned {other:?}"));
                    }
                }
                let h = SimpleBimoduleLabel::new(CExact::unit(Rat::new(1, 5)), CExact::one(), r)
                    .map_err(|e| e.to_string())?;
                match boson::coboundary_test(&[h], r).map_err(|e| e.to_string())? {
                    CoboundaryOutcome::Trivial => {}
                    other => {
                        ok = false;
                        notes.push(format!("psi restricted to eta-only subgroup: {other:?}"));
                    }
                }
                Ok(report(
                    String::new(),
                    if ok { Verdict::Verified } else { Verdict::Refuted },
                    notes,
                    serde_json::json!({ "samples": samples, "seed": seed }),
                ))
            }
            CheckSpec::ChargeLattice { r, range, .. } => {
                let r = parse_rat(r)?;
                let mut ok = true;
                let mut count = 0usize;
                for pn in -(2 * range)..=(2 * range) {
                    for qn in -(2 * range)..=(2 * range) {
                        let p = Rat::new(pn, 2);
                        let q = Rat::new(qn, 2);
                        let got = boson::charge_lattice(p, q, r).map_err(|e| e.to_string())?;
                        let expect = ((p + q) / r).is_integer()
                            && ((p - q) * r / Rat::from_integer(2)).is_integer();
                        if got != expect {
                            ok = false;
                        }
                        if got {
                            count += 1;
                        }
                    }
                }
                Ok(report(
                    String::new(),
                    if ok { Verdict::Verified } else { Verdict::Refuted },
                    vec![format!("{count} lattice points on the grid")],
                    serde_json::json!({ "range": range }),
                ))
            }
            CheckSpec::GrothReduction { samples, .. } => {
                relations::grothendieck_reduction_suite(*samples, ctx, seed)
                    .map_err(|e| e.to_string())
            }
            CheckSpec::Relations { rep, .. } => {
                let v = rep.build(ctx)?;
                let r = qrep::check_relations(&v);
                let ok = r.pass();
                Ok(RelationReport {
                    name: String::new(),
                    inputs: serde_json::json!({ "dim": v.dim }),
                    certificates: vec![serde_json::to_value(&r).unwrap()],
                    verdict: if ok { Verdict::Verified } else { Verdict::Refuted },
                    notes: r.failures.clone(),
                })
            }
        }
    }
}

/// Human-readable description of a constructed object: weights and matrices
/// in canonical scalar text.
pub fn describe(spec: &RepSpec, ctx: &ScalarContext) -> Result<String, String> {
    let rep = spec.build(ctx)?;
    let mut out = String::new();
    out.push_str(&format!("flavor: {:?}\ndim: {}\n", rep.flavor, rep.dim));
    match rep.h_pairs() {
        Some(pairs) => {
            out.push_str("h-weights (s, winding):\n");
            for (s, m) in pairs {
                out.push_str(&format!("  ({s}, {m})\n"));
            }
        }
        None => {
            out.push_str("k-eigenvalues:\n");
            for k in rep.k_eigenvalues() {
                out.push_str(&format!("  {k}\n"));
            }
        }
    }
    let mats: Vec<(&str, &qloop::linalg::Matrix)> = match &rep.matrices {
        qloop::qrep::RepMatrices::Finite { e_plus, e_minus } => {
            vec![("e+", e_plus), ("e-", e_minus)]
        }
        qloop::qrep::RepMatrices::Loop { e0_plus, e0_minus, e1_plus, e1_minus } => vec![
            ("e0+", e0_plus),
            ("e0-", e0_minus),
            ("e1+", e1_plus),
            ("e1-", e1_minus),
        ],
    };
    for (name, m) in mats {
        out.push_str(&format!("{name}:\n"));
        for row in m.to_canonical_strings() {
            out.push_str(&format!("  [{}]\n", row.join(", ")));
        }
    }
    if let RepSpec::Cyclic { .. } = spec {
        match qrep::central_character(&rep) {
            Ok(cc) => out.push_str(&format!(
                "central character: x = {}, y = {}, z = {}, c = {}\n",
                cc.x, cc.y, cc.z, cc.c
            )),
            Err(e) => out.push_str(&format!("central character: {e}\n")),
        }
        let report = qrep::check_relations(&rep);
        out.push_str(&format!("relations pass: {}\n", report.pass()));
    }
    // sanity footer used by tests
    let _ = intertwine::interior_indices(&rep, 0);
    Ok(out)
}
