//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//!
//! Everything here is exact arithmetic — there are no tolerances anywhere,
//! only equality of matrices, relations, and rational coefficients. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use std::time::Instant;

use codiff::dsl;
use codiff::finrel::FinRelModel;
use codiff::fvec::FvecModel;
use codiff::gf2ext::Gf2ExtModel;
use codiff::matrix::ExactMatrix;
use codiff::model::{
    axiom_registry, run_suite, Model, SampleSpec, SuiteKind,
};
use codiff::polysym::PolySymModel;
use codiff::scalar::{Domain, Scalar};
use codiff::theorem;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0xC0D1FF;

fn report(criterion: &str, passed: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    assert!(passed, "criterion {criterion} failed: {detail}");
}

fn suite_failures(model: &Model, kind: SuiteKind, spec: &SampleSpec) -> Vec<String> {
    run_suite(model, kind, spec, false)
        .into_iter()
        .filter(|r| !r.passed())
        .map(|r| {
            format!(
                "{} [{}] {}",
                r.equation,
                r.instantiation,
                r.first_failure
                    .and_then(|v| v.witness.map(|w| w.to_string()))
                    .unwrap_or_default()
            )
        })
        .collect()
}

/// Criterion 1, as stated: every codifferential-suite equation holds by
/// exact GF(2) matrix equality in the exterior model for base dims 0..=3
/// (monad associativity at dim 3 is verified exactly on sampled basis
/// elements, since its domain object has dimension 2^256), in under 60
/// seconds.
///
/// This criterion is genuinely unattainable, and the failure is the tool
/// working: `am1_assoc` and `am3_mult` are violated by the exterior
/// construction itself. Writing `[1]` for the image of the algebra unit
/// `1 in SA` under `eta_SA`, the unit laws force `mu([1]) = 1`, while the
/// wedge gives `m([1] (x) [1]) = [1] ^ [1] = 0`; hence
/// `(mu (x) mu) ; m = 1 != 0 = m ; mu` on that input, at every base
/// dimension, whatever `mu` is chosen to be. The analogous input breaks
/// monad associativity. The remaining 18 equations (and both other models
/// on all 20) hold exactly; see `gf2ext_suite_excluding_forced_failures`.
#[test]
fn criterion_1_gf2ext_full_suite() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for dim in 0..=3usize {
        let model = Model::Gf2Ext(Gf2ExtModel::new(dim));
        let spec = SampleSpec { seed: SEED, instances: 50 };
        for kind in [SuiteKind::Codifferential, SuiteKind::Traced, SuiteKind::Additive] {
            for f in suite_failures(&model, kind, &spec) {
                failures.push(format!("dim {dim}: {f}"));
            }
        }
    }
    let elapsed = start.elapsed();
    for f in &failures {
        println!("  {f}");
    }
    let forced_only = failures
        .iter()
        .all(|f| f.contains("am1_assoc") || f.contains("am3_mult"));
    if !failures.is_empty() && forced_only {
        println!(
            "  note: every failure above is one of the two forced by the exterior \
             unit-generator nilpotency ([1]^[1] = 0); witnesses are exact"
        );
    }
    report(
        "1",
        failures.is_empty() && elapsed.as_secs() < 60,
        &format!(
            "exterior model dims 0-3, all suites, {} failures, {:.1?}",
            failures.len(),
            elapsed
        ),
    );
}

/// Supplementary (green) counterpart of criterion 1: everything except the
/// two equations whose failure is forced holds by exact matrix equality for
/// dims 0..=3, and the two forced failures fail with exact witnesses on
/// every dimension.
#[test]
fn gf2ext_suite_excluding_forced_failures() {
    let start = Instant::now();
    let mut unexpected = Vec::new();
    let mut forced_seen = 0usize;
    for dim in 0..=3usize {
        let model = Model::Gf2Ext(Gf2ExtModel::new(dim));
        let spec = SampleSpec { seed: SEED, instances: 50 };
        for kind in [SuiteKind::Codifferential, SuiteKind::Traced, SuiteKind::Additive] {
            for r in run_suite(&model, kind, &spec, false) {
                let forced = r.equation == "am1_assoc" || r.equation == "am3_mult";
                match (r.passed(), forced) {
                    (true, false) => {}
                    (false, true) => forced_seen += 1,
                    (true, true) => unexpected.push(format!(
                        "dim {dim}: {} unexpectedly passed",
                        r.equation
                    )),
                    (false, false) => unexpected.push(format!(
                        "dim {dim}: {} failed: {:?}",
                        r.equation,
                        r.first_failure.and_then(|v| v.witness)
                    )),
                }
            }
        }
    }
    let elapsed = start.elapsed();
    for u in &unexpected {
        println!("  {u}");
    }
    report(
        "1-supplementary",
        unexpected.is_empty() && forced_seen == 8 && elapsed.as_secs() < 60,
        &format!(
            "18 of 20 codifferential equations plus both other suites exact on dims 0-3; \
             the 2 forced failures each fail with witnesses on all 4 dims ({forced_seen}/8), {:.1?}",
            elapsed
        ),
    );
}

/// Criterion 2: the polynomial model passes every codifferential equation
/// pointwise on at least 200 seeded samples per equation, 4 variables,
/// degree <= 5, exact rationals, in under 60 seconds.
#[test]
fn criterion_2_polysym_pointwise() {
    let start = Instant::now();
    let model = Model::PolySym(PolySymModel::new(4));
    let spec = SampleSpec { seed: SEED, instances: 200 };
    let mut failures = suite_failures(&model, SuiteKind::Codifferential, &spec);
    failures.extend(suite_failures(&model, SuiteKind::Additive, &spec));
    let reports = run_suite(&model, SuiteKind::Codifferential, &spec, false);
    let min_instances = reports.iter().map(|r| r.instances).min().unwrap_or(0);
    let elapsed = start.elapsed();
    for f in &failures {
        println!("  {f}");
    }
    report(
        "2",
        failures.is_empty() && min_instances >= 200 && elapsed.as_secs() < 60,
        &format!(
            "polynomial model, >= {min_instances} samples per equation, {} failures, {:.1?}",
            failures.len(),
            elapsed
        ),
    );
}

/// Criterion 3: the relation model passes the traced suite on random
/// relations over sets of size <= 5, and the codifferential suite on the
/// documented safe window (bound 4, base size <= 3), in under 60 seconds.
#[test]
fn criterion_3_finrel_suites() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for size in 1..=5usize {
        let model = Model::FinRel(FinRelModel::new(size, 4));
        let spec = SampleSpec { seed: SEED, instances: 40 };
        for f in suite_failures(&model, SuiteKind::Traced, &spec) {
            failures.push(format!("traced, size {size}: {f}"));
        }
    }
    for size in 1..=3usize {
        let model = Model::FinRel(FinRelModel::new(size, 4));
        let spec = SampleSpec { seed: SEED, instances: 25 };
        for kind in [SuiteKind::Codifferential, SuiteKind::Additive] {
            for f in suite_failures(&model, kind, &spec) {
                failures.push(format!("{}, size {size}: {f}", kind.name()));
            }
        }
    }
    let elapsed = start.elapsed();
    for f in &failures {
        println!("  {f}");
    }
    report(
        "3",
        failures.is_empty() && elapsed.as_secs() < 60,
        &format!(
            "relations: traced to size 5, safe window N=4 base<=3, {} failures, {:.1?}",
            failures.len(),
            elapsed
        ),
    );
}

/// Criterion 4: all traced axioms hold exactly for the partial trace over
/// GF(2) and the rationals, dims <= 4, at least 100 random instantiations.
#[test]
fn criterion_4_traced_axioms_fvec() {
    let mut failures = Vec::new();
    for domain in [Domain::Gf2, Domain::Rational] {
        for dim in 1..=4usize {
            let model = Model::Fvec(FvecModel::new(domain, dim));
            let spec = SampleSpec { seed: SEED, instances: 100 };
            let reports = run_suite(&model, SuiteKind::Traced, &spec, false);
            for r in &reports {
                // axioms quantified over morphisms get 100 random
                // instantiations; yanking and trace-of-zero are closed
                // equations, so their single exact check is already complete
                let deterministic = matches!(r.equation.as_str(), "yanking" | "trace_zero");
                if !deterministic && r.instances < 100 {
                    failures.push(format!(
                        "{domain} dim {dim}: {} ran {} times",
                        r.equation, r.instances
                    ));
                }
                if !r.passed() {
                    failures.push(format!("{domain} dim {dim}: {}", r.equation));
                }
            }
        }
    }
    for f in &failures {
        println!("  {f}");
    }
    report(
        "4",
        failures.is_empty(),
        &format!(
            "tightening/sliding/vanishing x2/superposition/yanking/additivity, GF2 + rationals, dims 1-4, 100 instances each; {} failures",
            failures.len()
        ),
    );
}

/// Criterion 5: the commutation identity holds exactly in the exterior model
/// (matrix equality, n <= 3) and the polynomial model (pointwise), and the
/// zeroed-d negative control fails with a witness in both.
#[test]
fn criterion_5_commutation_identity() {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 0..=3usize {
        let model = Model::Gf2Ext(Gf2ExtModel::new(n));
        let spec = SampleSpec { seed: SEED, instances: 1 };
        for v in theorem::commutation_check(&model, &spec) {
            if !v.passed {
                ok = false;
                notes.push(format!("gf2ext dim {n}: {:?}", v.witness));
            }
        }
    }
    let poly = Model::PolySym(PolySymModel::new(3));
    let spec = SampleSpec { seed: SEED, instances: 200 };
    for v in theorem::commutation_check(&poly, &spec) {
        if !v.passed {
            ok = false;
            notes.push(format!("polysym: {:?}", v.witness));
        }
    }
    // negative controls: a zeroed deriving transformation must fail loudly
    let corrupted_ext = Model::Gf2Ext(Gf2ExtModel::with_zeroed_deriving(2));
    let ext_fails = theorem::commutation_check(&corrupted_ext, &SampleSpec { seed: SEED, instances: 1 })
        .iter()
        .any(|v| !v.passed && v.witness.is_some());
    let corrupted_poly = Model::PolySym(PolySymModel::with_zeroed_deriving(2));
    let poly_fails = theorem::commutation_check(&corrupted_poly, &SampleSpec { seed: SEED, instances: 50 })
        .iter()
        .any(|v| !v.passed && v.witness.is_some());
    if !ext_fails || !poly_fails {
        ok = false;
        notes.push("negative control did not fail".to_string());
    }
    for n in &notes {
        println!("  {n}");
    }
    report(
        "5",
        ok,
        "commutation identity exact in gf2ext (n<=3) and polysym (pointwise); zeroed-d control fails with witness",
    );
}

/// Criterion 6: each displayed equality of the trace argument verifies as an
/// exact matrix identity in the exterior model (n <= 2), and the scalar
/// obstruction reports contradiction over the rationals but consistency
/// over GF(2).
#[test]
fn criterion_6_theorem_chain_and_obstruction() {
    let mut ok = true;
    let mut notes = Vec::new();
    for n in 0..=2usize {
        for v in theorem::theorem_chain_check(n, SEED) {
            if !v.passed {
                ok = false;
                notes.push(format!("dim {n}, {}: {:?}", v.equation, v.witness));
            }
        }
    }
    let (rational_value, rational_verdict) =
        theorem::trace_obstruction(2, 1, Domain::Rational).unwrap();
    let (gf2_value, gf2_verdict) = theorem::trace_obstruction(2, 1, Domain::Gf2).unwrap();
    if rational_value != Scalar::from_int(2)
        || rational_verdict != theorem::ObstructionVerdict::Contradiction
    {
        ok = false;
        notes.push(format!("rational obstruction: {rational_value} {rational_verdict:?}"));
    }
    if !gf2_value.is_zero() || gf2_verdict != theorem::ObstructionVerdict::Consistent {
        ok = false;
        notes.push(format!("gf2 obstruction: {gf2_value} {gf2_verdict:?}"));
    }
    for n in &notes {
        println!("  {n}");
    }
    report(
        "6",
        ok,
        "proof chain exact in gf2ext (n<=2); obstruction(2,1): rational 2 != 0 contradiction, gf2 0 consistent",
    );
}

/// Criterion 7: the matrix-trace obstruction makes `xy - yx = 1`
/// representable exactly at dimension 0; for 100 random rational pairs per
/// n in 1..=3, `Tr(XY - YX)` is exactly zero, certifying `XY - YX != I_n`.
#[test]
fn criterion_7_weyl_obstruction() {
    let mut ok = theorem::weyl_obstruction(0).representable;
    let mut notes = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for n in 1..=3usize {
        let report = theorem::weyl_obstruction(n);
        if report.representable || report.identity_trace != Scalar::from_natural(Domain::Rational, n as u64) {
            ok = false;
            notes.push(format!("dim {n}: representable={}", report.representable));
        }
        for i in 0..100 {
            let x = ExactMatrix::random(n, n, Domain::Rational, &mut rng);
            let y = ExactMatrix::random(n, n, Domain::Rational, &mut rng);
            let t = theorem::commutator_trace(&x, &y).unwrap();
            if !t.is_zero() {
                ok = false;
                notes.push(format!("dim {n}, pair {i}: commutator trace {t}"));
            }
        }
    }
    for n in &notes {
        println!("  {n}");
    }
    report(
        "7",
        ok,
        "representable iff n=0; 100 random pairs per n in 1..=3 give Tr(XY-YX) = 0 exactly",
    );
}

/// Criterion 8: the no-go reports reach the documented conclusions with the
/// documented witnesses.
#[test]
fn criterion_8_nogo_reports() {
    use theorem::{nogo_report, NogoTarget, ObstructionConclusion};
    let mut ok = true;
    let mut notes = Vec::new();

    let q = nogo_report(NogoTarget::FvecRational).unwrap();
    if q.conclusion != ObstructionConclusion::ForcedTrivial {
        ok = false;
        notes.push(format!("fvec-q concluded {:?}", q.conclusion));
    }

    let gf2 = nogo_report(NogoTarget::FvecGf2).unwrap();
    if gf2.conclusion != ObstructionConclusion::EscapeViaAssumptionII
        || !gf2.obstruction_value.is_zero()
        || gf2.assumption_dim_as_trace.witness.is_none()
    {
        ok = false;
        notes.push(format!("fvec-gf2 concluded {:?}", gf2.conclusion));
    }

    let rel = nogo_report(NogoTarget::Rel).unwrap();
    let witness_ok = rel
        .assumption_cancellative
        .witness
        .as_deref()
        .is_some_and(|w| w.contains("+") && w.contains("!="));
    if rel.conclusion != ObstructionConclusion::EscapeViaAssumptionI || !witness_ok {
        ok = false;
        notes.push(format!("rel concluded {:?}", rel.conclusion));
    }

    for n in &notes {
        println!("  {n}");
    }
    report(
        "8",
        ok,
        "fvec-q forced-trivial; fvec-gf2 escape-via-assumption-ii (trace-0 witness); rel escape-via-assumption-i (union witness)",
    );
}

/// Criterion 9: the term language round-trips the whole registry, rejects
/// `d ; d`, and evaluates the yanking term to an identity matrix in every
/// traced matrix-backed model.
#[test]
fn criterion_9_dsl() {
    let mut ok = true;
    let mut notes = Vec::new();
    for eq in axiom_registry() {
        for side in [&eq.lhs, &eq.rhs] {
            match dsl::parse(&side.to_string()) {
                Ok(reparsed) if reparsed == *side => {}
                other => {
                    ok = false;
                    notes.push(format!("{} failed round-trip: {other:?}", eq.name));
                }
            }
        }
    }
    if dsl::signature(&dsl::parse("d ; d").unwrap()).is_ok() {
        ok = false;
        notes.push("d ; d was not rejected".to_string());
    }
    let yanking = dsl::parse("tr[A](sym[A, A])").unwrap();
    let bindings = std::collections::BTreeMap::new();
    let mut check_yanking = |backend: &dyn codiff::model::MatrixBackend, label: &str| {
        match codiff::model::eval_matrix(backend, &yanking, &bindings) {
            Ok(m) => {
                let n = backend.base_dim();
                if m != ExactMatrix::identity(n, backend.domain()) {
                    ok = false;
                    notes.push(format!("yanking not identity in {label}"));
                }
            }
            Err(e) => {
                ok = false;
                notes.push(format!("yanking failed in {label}: {e}"));
            }
        }
    };
    for dim in 1..=3 {
        check_yanking(&Gf2ExtModel::new(dim), &format!("gf2ext dim {dim}"));
        check_yanking(&FinRelModel::new(dim, 2), &format!("finrel size {dim}"));
    }
    for dim in 1..=4 {
        check_yanking(&FvecModel::rational(dim), &format!("fvec-q dim {dim}"));
        check_yanking(&FvecModel::gf2(dim), &format!("fvec-gf2 dim {dim}"));
    }
    for n in &notes {
        println!("  {n}");
    }
    report(
        "9",
        ok,
        "registry round-trips; `d ; d` rejected; yanking evaluates to the identity in gf2ext, finrel, fvec-q, fvec-gf2",
    );
}

/// Criterion 10 (optional oracle, not gating CI): the exhaustive GF(2)
/// search at base dimension 1 recovers the exterior structure as a solution
/// of the axiom constraints.
#[test]
#[ignore = "optional brute-force oracle; run with --ignored"]
fn criterion_10_dim1_search() {
    use codiff::dsl::{GenName, NormObj};
    use codiff::model::MatrixBackend;
    let solutions = theorem::dim1_exhaustive_search();
    let model = Gf2ExtModel::new(1);
    let base = NormObj::base();
    let expected = theorem::Dim1Candidate {
        eta: model.gen_matrix(GenName::Eta, &base).unwrap(),
        unit: model.gen_matrix(GenName::Unit, &base).unwrap(),
        mult: model.gen_matrix(GenName::Mult, &base).unwrap(),
        deriving: model.gen_matrix(GenName::Deriving, &base).unwrap(),
    };
    report(
        "10",
        solutions.contains(&expected),
        &format!(
            "exhaustive search found {} solutions including the exterior structure",
            solutions.len()
        ),
    );
}
