//! Order unit property machinery: face sampling for M_l(X)^x, sampling
//! refuters for the (absolute) order unit property, a deterministic
//! counterexample generator for non-projections, and the
//! order-projection characterizations.
//!
//! Sampling can refute the property but never certify it; certification
//! goes through `is_order_projection` and the projection
//! characterization checked at the level where it is literally decidable.

use rand::Rng;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, Tolerances};
use crate::report::{Counterexample, MarginTracker, Verdict};
use crate::sampling::{self, rng_from_seed, sub_seed};
use crate::space::{block_certificate, Element};

/// A sampled member of the face M_l(X)^x together with its membership
/// certificate: [εx^l, y; y*, εx^l] is PSD for the stored ε.
#[derive(Debug, Clone)]
pub struct FaceSample {
    pub y: Element,
    pub epsilon: f64,
}

/// Property being refuted: plain order unit property (±y ≤ ‖y‖x) or the
/// absolute variant (|y| ≤ ‖y‖x).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropertyMode {
    Oup,
    AbsOup,
}

impl PropertyMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            PropertyMode::Oup => "oup",
            PropertyMode::AbsOup => "abs_oup",
        }
    }
}

/// Order projection test: Hermitian p with |2p − e^l| = e^l, cross-checked
/// against the matrix oracle p² = p = p*.
pub fn is_order_projection(p: &Element, tol: &Tolerances) -> Result<bool> {
    if !p.is_square_level() {
        return Err(Error::NotSquareLevel(p.level().0, p.level().1));
    }
    if !p.is_hermitian(tol) {
        return Ok(false);
    }
    let l = p.level().0;
    let e = Element::order_unit(p.space(), l);
    let reflected = p.scale(2.0).sub(&e)?;
    let abs_route = reflected.abs_value(tol)?.approx_eq(&e, tol.eq_tol);
    let idem_route = p.mul(p)?.approx_eq(p, tol.eq_tol);
    if abs_route != idem_route {
        return Err(Error::PreconditionFailed(format!(
            "order projection oracles disagree (abs route {abs_route}, idempotent route {idem_route})"
        )));
    }
    Ok(abs_route)
}

/// Sample the Hermitian face of a positive x at level l: each sample is
/// (x^l)^{1/2} h (x^l)^{1/2} for a random Hermitian h, with ε = ‖h‖ as
/// the membership certificate. The congruence generates exactly the face
/// elements up to closure.
pub fn sample_face(
    x: &Element,
    l: usize,
    count: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<FaceSample>> {
    if !x.is_positive(tol)? {
        return Err(Error::NotPositive);
    }
    let xl = x.amplify(l)?;
    let root = sqrt_of_positive(&xl, tol)?;
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let h = sampling::random_hermitian(x.space(), l, &mut rng);
        let y = root.mul(&h)?.mul(&root)?.hermitian_part()?;
        out.push(FaceSample {
            y,
            epsilon: h.order_unit_norm(),
        });
    }
    Ok(out)
}

/// Blockwise PSD square root of a positive square-level element.
pub fn sqrt_of_positive(x: &Element, tol: &Tolerances) -> Result<Element> {
    let blocks = x
        .blocks()
        .iter()
        .map(|b| crate::numerics::herm_sqrt(&b.hermitian_part(), tol))
        .collect::<Result<Vec<_>>>()?;
    Element::new(x.space().clone(), x.level(), blocks)
}

/// Non-Hermitian face sampling for the rectangular block lemmas:
/// y = (x^l)^{1/2} g (x^m)^{1/2} with arbitrary g and ε = ‖g‖.
pub fn sample_face_general(
    x: &Element,
    l: usize,
    m: usize,
    count: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<FaceSample>> {
    if !x.is_positive(tol)? {
        return Err(Error::NotPositive);
    }
    let root_l = sqrt_of_positive(&x.amplify(l)?, tol)?;
    let root_m = sqrt_of_positive(&x.amplify(m)?, tol)?;
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let g = sampling::random_element(x.space(), l, m, &mut rng);
        let y = root_l.mul(&g)?.mul(&root_m)?;
        out.push(FaceSample {
            y,
            epsilon: g.order_unit_norm(),
        });
    }
    Ok(out)
}

/// Search the sampled face of x for a witness violating the order unit
/// property (mode `Oup`: ‖y‖x^l ± y must be positive) or the absolute
/// variant (mode `AbsOup`: ‖y‖x^l − |y| must be positive). A failure
/// carries a certificate; a pass is inconclusive-by-sampling.
pub fn refute_property(
    x: &Element,
    l: usize,
    mode: PropertyMode,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict> {
    let name = format!("refute_{}", mode.as_str());
    let xl = x.amplify(l)?;
    let face = sample_face(x, l, samples, seed, tol)?;
    let mut tracker = MarginTracker::default();
    for sample in &face {
        let norm_y = sample.y.order_unit_norm();
        let bound = xl.scale(norm_y);
        let margins: Vec<(String, f64)> = match mode {
            PropertyMode::Oup => {
                let plus = bound.sub(&sample.y)?.min_eigenvalue(tol)?;
                let minus = bound.add(&sample.y)?.min_eigenvalue(tol)?;
                vec![
                    ("norm_times_x_minus_y_psd".into(), plus),
                    ("norm_times_x_plus_y_psd".into(), minus),
                ]
            }
            PropertyMode::AbsOup => {
                let abs_y = sample.y.abs_value(tol)?;
                let margin = bound.sub(&abs_y)?.min_eigenvalue(tol)?;
                vec![("norm_times_x_minus_abs_y_psd".into(), margin)]
            }
        };
        for (inequality, margin) in margins {
            tracker.observe(margin);
            if margin < -tol.psd_tol {
                let ce = Counterexample::new(inequality, margin)
                    .with_element("x", x)
                    .with_element("y", &sample.y)
                    .with_value("epsilon", sample.epsilon.into())
                    .with_value("level", (l as u64).into());
                return Ok(Verdict::fail(name, samples, seed, ce));
            }
        }
    }
    let mut v = Verdict::pass(name, samples, seed);
    v.margin = tracker.worst();
    Ok(v)
}

/// Deterministic refuter for non-projections. For a positive unit-norm x
/// with an eigenvalue t strictly inside (0, 1) in some block, returns a
/// Hermitian y built from the pairing of that eigenvector with the
/// block's top eigenvector, together with the face certificate ε:
/// ±y ≤ εx holds while ‖y‖x − |y| has a negative eigenvalue. Returns
/// `None` exactly when the spectrum is contained in {0, 1}, i.e. when x
/// is an order projection.
pub fn construct_counterexample(
    x: &Element,
    tol: &Tolerances,
) -> Result<Option<(Element, f64)>> {
    if x.level() != (1, 1) {
        return Err(Error::PreconditionFailed(
            "counterexample generator expects a level-1 element".into(),
        ));
    }
    if !x.is_positive(tol)? {
        return Err(Error::NotPositive);
    }
    let norm = x.order_unit_norm();
    if (norm - 1.0).abs() > tol.eq_tol {
        return Err(Error::NotUnitNorm(norm));
    }
    let cut = tol.rank_tol.max(1e-7);
    for (idx, block) in x.blocks().iter().enumerate() {
        let (values, vectors) = crate::numerics::herm_eig(block, tol)?;
        let fractional = values
            .iter()
            .position(|&v| v > cut && v < 1.0 - cut);
        let Some(frac_idx) = fractional else { continue };
        let t = values[frac_idx];
        let n = block.rows();
        let v = vectors.extract_block(0, frac_idx, n, 1);
        // Pair with the block's top eigenvector; for ‖x‖ = 1 attained in
        // this block that eigenvalue is 1 and ε = 1/√t.
        let (u, alpha) = if frac_idx == 0 {
            (v.clone(), t)
        } else {
            (vectors.extract_block(0, 0, n, 1), values[0])
        };
        let (y_block, eps) = if frac_idx == 0 {
            // t is the top of its block: y = uu* refutes with ε = 1/t.
            (u.mul(&u.adjoint()), 1.0 / t)
        } else {
            let y = u.mul(&v.adjoint()).add(&v.mul(&u.adjoint()));
            (y.hermitian_part(), 1.0 / (alpha * t).sqrt())
        };
        let mut blocks = Vec::with_capacity(x.blocks().len());
        for (j, b) in x.blocks().iter().enumerate() {
            if j == idx {
                blocks.push(y_block.clone());
            } else {
                blocks.push(ComplexMatrix::zeros(b.rows(), b.cols()));
            }
        }
        let y = Element::new(x.space().clone(), (1, 1), blocks)?;
        return Ok(Some((y, eps)));
    }
    Ok(None)
}

/// Characterization sweep: for sampled 0 ≤ x ≤ e^l, the projection test
/// must agree with the refutation machinery — x is an order projection
/// iff neither x nor e^l − x admits a counterexample to the (absolute)
/// order unit property. Sides of norm 1 go through the constructive
/// generator; a nonzero side of norm strictly below 1 is refuted by
/// y = side itself, since ±y ≤ y but ‖y‖·side − y fails positivity.
pub fn check_oup_characterization(
    space: &crate::space::SpaceSpec,
    level: usize,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict> {
    let name = "oup_characterization";
    let skipped = 0usize;
    for i in 0..samples {
        let mut rng = rng_from_seed(sub_seed(seed, name, i as u64));
        // Mix order projections in so both branches of the equivalence
        // are exercised.
        let x = if rng.gen::<f64>() < 0.4 {
            sampling::random_order_projection(space, level, &mut rng)
        } else {
            sampling::random_contraction_positive(space, level, &mut rng)
        };
        let e = Element::order_unit(space, level);
        let complement = e.sub(&x)?;
        let is_op = is_order_projection(&x, tol)?;

        let mut refuted = false;
        for side in [&x, &complement] {
            let flat = side.reinterpret_level1()?;
            let norm = flat.order_unit_norm();
            if norm <= tol.eq_tol {
                continue; // the zero side is a projection, nothing to refute
            }
            if norm < 1.0 - tol.eq_tol {
                // Strict contraction: verify the self-witness before
                // counting it. ‖y‖·side − y = (norm − 1)·side ⪯̸ 0.
                let conclusion = flat.scale(norm).sub(&flat)?.min_eigenvalue(tol)?;
                if conclusion < -tol.psd_tol {
                    refuted = true;
                }
                continue;
            }
            if construct_counterexample(&flat.scale(1.0 / norm), tol)?.is_some() {
                refuted = true;
            }
        }
        if is_op == refuted {
            let ce = Counterexample::new(
                "projection_test_agrees_with_refutation",
                if is_op { -1.0 } else { 1.0 },
            )
            .with_element("x", &x)
            .with_value("is_order_projection", is_op.into())
            .with_value("refuted", refuted.into());
            return Ok(Verdict::fail(name, samples, seed, ce));
        }

        // Cross-check with the sampling refuter on a small budget.
        if is_op {
            for (tag, side) in [("x", &x), ("complement", &complement)] {
                let flat = side.reinterpret_level1()?;
                if flat.order_unit_norm() <= tol.eq_tol {
                    continue;
                }
                for mode in [PropertyMode::Oup, PropertyMode::AbsOup] {
                    let v = refute_property(&flat, 1, mode, 8, sub_seed(seed, tag, i as u64), tol)?;
                    if !v.passed {
                        let ce = Counterexample::new("projection_unexpectedly_refuted", v.margin.unwrap_or(0.0))
                            .with_element("x", &x);
                        return Ok(Verdict::fail(name, samples, seed, ce));
                    }
                }
            }
        }
    }
    Ok(Verdict::pass(name, samples, seed).with_skipped(skipped))
}

/// Block characterization of the absolute matrix order unit property:
/// for sampled (y, ε) with [εx^l, y; y*, εx^l] PSD and x an order
/// projection, both ‖y‖x^l − |y| and ‖y‖x^l − |y*| must be PSD, and the
/// full block with ‖y‖ corners must be PSD.
pub fn check_block_characterization(
    x: &Element,
    l: usize,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict> {
    let name = "block_characterization";
    let norm = x.order_unit_norm();
    if norm > 1.0 + tol.eq_tol {
        return Err(Error::PreconditionFailed(format!(
            "block characterization requires ‖x‖ ≤ 1, got {norm}"
        )));
    }
    let is_op = is_order_projection(x, tol)?;
    let xl = x.amplify(l)?;
    let face = sample_face_general(x, l, l, samples, seed, tol)?;
    let mut tracker = MarginTracker::default();
    for sample in &face {
        // Re-validate the membership certificate.
        let eps = sample.epsilon.max(tol.eq_tol);
        let cert = block_certificate(&xl.scale(eps), &sample.y, &xl.scale(eps))?;
        let cert_margin = cert.min_eigenvalue(tol)?;
        if cert_margin < -1e-6 * (1.0 + eps) {
            let ce = Counterexample::new("face_certificate_psd", cert_margin)
                .with_element("x", x)
                .with_element("y", &sample.y);
            return Ok(Verdict::fail(name, samples, seed, ce));
        }
        if !is_op {
            continue;
        }
        let norm_y = sample.y.order_unit_norm();
        let bound = xl.scale(norm_y);
        let block = block_certificate(&bound, &sample.y, &bound)?;
        let m1 = block.min_eigenvalue(tol)?;
        let m2 = bound.sub(&sample.y.abs_value(tol)?)?.min_eigenvalue(tol)?;
        let m3 = bound
            .sub(&sample.y.adjoint().abs_value(tol)?)?
            .min_eigenvalue(tol)?;
        for (inequality, margin) in [
            ("block_with_norm_corners_psd", m1),
            ("norm_x_minus_abs_y_psd", m2),
            ("norm_x_minus_abs_y_star_psd", m3),
        ] {
            tracker.observe(margin);
            if margin < -1e-7 * (1.0 + norm_y) {
                let ce = Counterexample::new(inequality, margin)
                    .with_element("x", x)
                    .with_element("y", &sample.y);
                return Ok(Verdict::fail(name, samples, seed, ce));
            }
        }
    }
    let mut v = Verdict::pass(name, samples, seed);
    v.margin = tracker.worst();
    v = v.with_flag("x_is_order_projection", is_op.into());
    Ok(v)
}

/// Every sampled nonzero order projection has order-unit norm 1.
pub fn projection_norm_check(
    space: &crate::space::SpaceSpec,
    level: usize,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict> {
    let name = "projection_norm_one";
    let mut tracker = MarginTracker::default();
    for i in 0..samples {
        let mut rng = rng_from_seed(sub_seed(seed, name, i as u64));
        let p = sampling::random_nonzero_order_projection(space, level, &mut rng);
        debug_assert!(is_order_projection(&p, tol)?);
        let norm = p.order_unit_norm();
        let margin = 1e-9 - (norm - 1.0).abs();
        tracker.observe(margin);
        if (norm - 1.0).abs() > 1e-9 {
            let ce = Counterexample::new("projection_norm_equals_one", norm - 1.0)
                .with_element("p", &p)
                .with_value("norm", norm.into());
            return Ok(Verdict::fail(name, samples, seed, ce));
        }
    }
    let mut v = Verdict::pass(name, samples, seed);
    v.margin = tracker.worst();
    Ok(v)
}
