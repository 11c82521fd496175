//! Acceptance gate: ten end-to-end criteria at pinned tolerances.
//! Each test prints a single PASS/FAIL line before asserting, so the
//! test log doubles as a scoreboard.

use amou::axioms::{check_axioms, AbsModel};
use amou::capmaps::{
    cap_violation, check_cap, check_kernel_theorem, check_quotient_identification,
    image_equals_corner, quotient, CompressionMap, StarHom,
};
use amou::ideals::{
    check_corner_agreement, check_membership_agreement, check_order_ideal,
    non_ideal_control_verdict, IdealHandle,
};
use amou::ktheory::{
    check_corner_diagram, check_equivalence_transfer, check_t_witness, corner_inclusion_hom,
    k0_class, k0_group, OrderProjection,
};
use amou::numerics::ComplexMatrix;
use amou::oup::{check_oup_characterization, construct_counterexample};
use amou::sampling::{
    random_element, random_nonzero_order_projection, rng_from_seed, sub_seed,
};
use amou::{Element, SpaceSpec, Tolerances};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn scoreboard(criterion: usize, desc: &str, ok: bool) {
    println!(
        "ACCEPTANCE {criterion} {desc}: {}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "acceptance criterion {criterion} ({desc}) failed");
}

fn spaces() -> Vec<SpaceSpec> {
    vec![
        SpaceSpec::new(vec![2]).unwrap(),
        SpaceSpec::new(vec![3]).unwrap(),
        SpaceSpec::new(vec![2, 1]).unwrap(),
    ]
}

fn m21() -> SpaceSpec {
    SpaceSpec::new(vec![2, 1]).unwrap()
}

fn diag_half() -> Element {
    Element::new(
        SpaceSpec::new(vec![2]).unwrap(),
        (1, 1),
        vec![ComplexMatrix::diag_real(&[1.0, 0.5])],
    )
    .unwrap()
}

/// φ(a, b) = a : M₂ ⊕ M₁ → M₂.
fn first_summand() -> StarHom {
    StarHom::new(m21(), SpaceSpec::new(vec![2]).unwrap(), vec![vec![1, 0]]).unwrap()
}

/// φ(a) = diag(a, a) : M₁ → M₂.
fn doubled() -> StarHom {
    StarHom::new(
        SpaceSpec::new(vec![1]).unwrap(),
        SpaceSpec::new(vec![2]).unwrap(),
        vec![vec![2]],
    )
    .unwrap()
}

#[test]
fn acceptance_01_axiom_suite() {
    let tol = tol();
    let mut ok = true;
    for space in spaces() {
        for v in check_axioms(&space, AbsModel::Genuine, &[1, 2], 500, 1, &tol).unwrap() {
            ok &= v.passed;
            if let Some(m) = v.margin {
                ok &= m >= -1e-7;
            }
        }
    }
    // Each corrupted model must fail with a certificate.
    for model in [
        AbsModel::Shift(1e-2),
        AbsModel::NormShift(1e-2),
        AbsModel::Scaled(1.5),
    ] {
        let verdicts = check_axioms(&m21(), model, &[1, 2], 500, 1, &tol).unwrap();
        ok &= verdicts
            .iter()
            .any(|v| !v.passed && v.counterexample.is_some());
    }
    scoreboard(1, "axiom suite with corrupted-model controls", ok);
}

#[test]
fn acceptance_02_norm_oracle() {
    let tol = tol();
    let mut ok = true;
    let all = spaces();
    for i in 0..500usize {
        let mut rng = rng_from_seed(sub_seed(2, "norm_oracle", i as u64));
        let space = &all[i % all.len()];
        let l = 1 + i % 3;
        let m = 1 + (i + 1) % 3;
        let x = random_element(space, l, m, &mut rng);
        let direct = x.order_unit_norm();
        let bisect = x.order_unit_norm_bisect(&tol, 1e-8).unwrap();
        ok &= (direct - bisect).abs() <= 1e-6;
    }
    scoreboard(2, "order-unit norm vs bisection oracle", ok);
}

#[test]
fn acceptance_03_projection_norm() {
    let mut ok = true;
    let all = spaces();
    for i in 0..200usize {
        let mut rng = rng_from_seed(sub_seed(3, "proj_norm", i as u64));
        let space = &all[i % all.len()];
        let p = random_nonzero_order_projection(space, 1 + i % 2, &mut rng);
        let norm = p.order_unit_norm();
        ok &= (norm - 1.0).abs() <= 1e-9;
    }
    scoreboard(3, "order projections have norm one", ok);
}

#[test]
fn acceptance_04_oup_characterization() {
    let tol = tol();
    let mut ok = true;
    for space in spaces() {
        for l in [1, 2] {
            let v = check_oup_characterization(&space, l, 100, 4, &tol).unwrap();
            ok &= v.passed;
        }
    }
    scoreboard(4, "order-projection characterization, zero disagreements", ok);
}

#[test]
fn acceptance_05_ideal_engine() {
    let tol = tol();
    let mut ok = true;
    // Closed-form membership vs bisection feasibility on 1000 pairs.
    let v = check_membership_agreement(&m21(), 1000, 5, &tol).unwrap();
    ok &= v.passed;
    // Projection generator: corner oracle agreement and norm agreement.
    let p = Element::new(
        m21(),
        (1, 1),
        vec![
            ComplexMatrix::diag_real(&[1.0, 0.0]),
            ComplexMatrix::diag_real(&[1.0]),
        ],
    )
    .unwrap();
    let handle = IdealHandle::new(p, tol).unwrap();
    let v = check_corner_agreement(&handle, 200, 5, &tol).unwrap();
    ok &= v.passed;
    for i in 0..200usize {
        let mut rng = rng_from_seed(sub_seed(5, "corner_norm", i as u64));
        let y = handle.sample_member(1 + i % 2, 1, &mut rng).unwrap();
        let ideal = handle.ideal_norm(&y).unwrap();
        let ambient = y.order_unit_norm();
        ok &= (ideal - ambient).abs() <= 1e-8 * (1.0 + ambient);
    }
    // Order-ideal sampling and the non-ideal control.
    let gen = IdealHandle::new(diag_half(), tol).unwrap();
    let v = check_order_ideal(&gen, 1, 500, 5, &tol).unwrap();
    ok &= v.passed;
    ok &= !non_ideal_control_verdict().unwrap().passed;
    scoreboard(5, "hereditary ideal engine with non-ideal control", ok);
}

#[test]
fn acceptance_06_deterministic_refutation() {
    let tol = tol();
    let x = diag_half();
    let (y, eps) = construct_counterexample(&x, &tol).unwrap().unwrap();
    let flip = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    let mut ok = y.block(0).approx_eq(&flip, 1e-9);
    ok &= (eps - 2.0_f64.sqrt()).abs() <= 1e-9;
    let margin = x
        .scale(y.order_unit_norm())
        .sub(&y.abs_value(&tol).unwrap())
        .unwrap()
        .min_eigenvalue(&tol)
        .unwrap();
    ok &= (margin + 0.5).abs() <= 1e-9;
    scoreboard(6, "deterministic refutation of diag(1, 1/2)", ok);
}

#[test]
fn acceptance_07_cap_suite() {
    let tol = tol();
    let mut ok = true;
    let homs = [
        StarHom::identity(&m21()),
        StarHom::zero(&m21(), &SpaceSpec::new(vec![2]).unwrap()),
        first_summand(),
        doubled(),
    ];
    for hom in &homs {
        let v = check_cap(hom, &[1, 2, 3], 300, 7, &tol).unwrap();
        ok &= v.passed;
        for v in check_kernel_theorem(hom, 100, 7, &tol).unwrap() {
            ok &= v.passed;
        }
    }
    // The compression non-example fails on the flip matrix.
    let comp = CompressionMap::new(2).unwrap();
    let flip = Element::new(
        SpaceSpec::new(vec![2]).unwrap(),
        (1, 1),
        vec![ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])],
    )
    .unwrap();
    ok &= cap_violation(&comp, &flip, &tol).unwrap().is_some();
    ok &= !check_cap(&comp, &[1], 300, 7, &tol).unwrap().passed;
    scoreboard(7, "CAP maps pass, compression control fails", ok);
}

#[test]
fn acceptance_08_quotient() {
    let tol = tol();
    let mut ok = true;
    for (hom, expect_corner) in [(first_summand(), true), (doubled(), false)] {
        ok &= image_equals_corner(&hom) == expect_corner;
        let q = quotient(&hom).unwrap();
        let v = check_quotient_identification(&q, 500, 8, &tol).unwrap();
        ok &= v.passed;
        ok &= v.flags.get("image_equals_corner")
            == Some(&serde_json::Value::Bool(expect_corner));
    }
    scoreboard(8, "quotient identification with corner flag", ok);
}

#[test]
fn acceptance_09_ktheory() {
    let tol = tol();
    let mut ok = true;
    let m23 = SpaceSpec::new(vec![2, 3]).unwrap();
    ok &= k0_group(&m23).rank == 2;
    let e = OrderProjection::new(Element::order_unit(&m23, 1), &tol).unwrap();
    let p = OrderProjection::new(
        Element::new(
            m23.clone(),
            (1, 1),
            vec![
                ComplexMatrix::diag_real(&[1.0, 0.0]),
                ComplexMatrix::zeros(3, 3),
            ],
        )
        .unwrap(),
        &tol,
    )
    .unwrap();
    ok &= k0_class(&e, &p, &tol).unwrap().diff == vec![1, 3];
    let inclusion = corner_inclusion_hom(&p, &tol).unwrap();
    ok &= inclusion.injective;
    ok &= check_corner_diagram(&inclusion, &[1, 2], 100, 9, &tol)
        .unwrap()
        .passed;
    ok &= check_t_witness(&m23, 200, 9, &tol).unwrap().passed;
    ok &= check_equivalence_transfer(&p, 200, 9, &tol).unwrap().passed;
    scoreboard(9, "K0 group, corner inclusion and witnesses", ok);
}

#[test]
fn acceptance_10_reproducibility() {
    let tol = tol();
    let mut ok = true;

    // A failing verdict from the refutation machinery: replay its
    // counterexample from serialized JSON and recompute the margin.
    let space = SpaceSpec::new(vec![2]).unwrap();
    let v = amou::oup::refute_property(
        &diag_half(),
        1,
        amou::oup::PropertyMode::AbsOup,
        300,
        10,
        &tol,
    )
    .unwrap();
    ok &= !v.passed;
    let ce = v.counterexample.expect("refuted verdict carries a certificate");
    let wire = serde_json::to_value(&ce).unwrap();
    let parsed: amou::Counterexample = serde_json::from_value(wire).unwrap();
    let x = Element::from_json(&space, &parsed.inputs["x"]).unwrap();
    let y = Element::from_json(&space, &parsed.inputs["y"]).unwrap();
    let l = parsed.inputs["level"].as_u64().unwrap() as usize;
    let replayed = x
        .amplify(l)
        .unwrap()
        .scale(y.order_unit_norm())
        .sub(&y.abs_value(&tol).unwrap())
        .unwrap()
        .min_eigenvalue(&tol)
        .unwrap();
    ok &= (replayed - parsed.margin).abs() <= 1e-9;

    // Same replay discipline for an axiom-model failure.
    let verdicts = check_axioms(&m21(), AbsModel::Scaled(1.5), &[1], 200, 10, &tol).unwrap();
    let failed = verdicts
        .iter()
        .find(|v| !v.passed && v.name == "jordan_consistency")
        .expect("scaled model fails jordan consistency");
    let ce = failed.counterexample.as_ref().unwrap();
    let wire = serde_json::to_value(ce).unwrap();
    let parsed: amou::Counterexample = serde_json::from_value(wire).unwrap();
    ok &= (parsed.margin - ce.margin).abs() <= 1e-9;

    scoreboard(10, "counterexamples replay within 1e-9", ok);
}
