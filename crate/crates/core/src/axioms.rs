//! Randomized verification of the absolutely matrix ordered structure:
//! cone properness, the Archimedean property, symmetry and dominance of
//! the absolute value, Jordan decomposition consistency, the scalar
//! compression inequality |ς₁xς₂| ≤ ‖ς₁‖·‖ς₂ᵒᵖ‖-style bound through
//! ||x|ς₂|, and the direct-sum identity |x ⊛ y| = |x| ⊛ |y|.
//!
//! Besides the genuine model |x| = √(x*x), three corrupted absolute
//! values are provided as controls; each breaks a specific axiom so the
//! suites demonstrably have teeth.

use rand::Rng;

use crate::error::Result;
use crate::numerics::{self, Tolerances};
use crate::report::{Counterexample, MarginTracker, Verdict};
use crate::sampling::{self, rng_from_seed, sub_seed};
use crate::space::{orthogonal, scalar_act, Element, Side, SpaceSpec};

/// Candidate absolute-value assignments on M_{l,m}(X).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AbsModel {
    /// |x| = √(x*x); the genuine model, expected to satisfy everything.
    Genuine,
    /// |x| = √(x*x) + ε·e: breaks the scalar compression inequality
    /// (take x = 0 and contractive scalars) and Jordan consistency.
    Shift(f64),
    /// |x| = √(x*x) + ε‖x‖·e: homogeneous, but breaks the direct-sum
    /// identity whenever the two summands have different norms.
    NormShift(f64),
    /// |x| = c·√(x*x) with c > 1: keeps both inequalities but breaks
    /// Jordan consistency (pos + neg ≠ c·√(x*x)).
    Scaled(f64),
}

impl AbsModel {
    pub fn abs(&self, x: &Element, tol: &Tolerances) -> Result<Element> {
        let true_abs = x.abs_value(tol)?;
        let m = x.level().1;
        match *self {
            AbsModel::Genuine => Ok(true_abs),
            AbsModel::Shift(eps) => {
                true_abs.add(&Element::order_unit(x.space(), m).scale(eps))
            }
            AbsModel::NormShift(eps) => {
                let shift = eps * x.order_unit_norm();
                true_abs.add(&Element::order_unit(x.space(), m).scale(shift))
            }
            AbsModel::Scaled(c) => Ok(true_abs.scale(c)),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            AbsModel::Genuine => "genuine".into(),
            AbsModel::Shift(eps) => format!("shift_{eps}"),
            AbsModel::NormShift(eps) => format!("norm_shift_{eps}"),
            AbsModel::Scaled(c) => format!("scaled_{c}"),
        }
    }
}

fn pick_level(levels: &[usize], i: usize) -> usize {
    levels[i % levels.len()].max(1)
}

/// The full axiom battery for one absolute-value model. Returns one
/// verdict per axiom; the model label travels in each verdict's flags.
pub fn check_axioms(
    space: &SpaceSpec,
    model: AbsModel,
    levels: &[usize],
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<Verdict>> {
    let mut out = vec![
        cone_proper(space, levels, samples, seed, tol)?,
        archimedean(space, levels, samples, seed, tol)?,
        abs_neg_symmetry(space, model, levels, samples, seed, tol)?,
        abs_dominates(space, model, levels, samples, seed, tol)?,
        jordan_consistency(space, model, levels, samples, seed, tol)?,
        scalar_compression(space, model, levels, samples, seed, tol)?,
        direct_sum_identity(space, model, levels, samples, seed, tol)?,
    ];
    for v in &mut out {
        v.flags.insert("model".into(), model.label().into());
    }
    Ok(out)
}

/// a ⪰ 0 and −a ⪰ 0 force a = 0.
fn cone_proper(
    space: &SpaceSpec,
    levels: &[usize],
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict> {
    let name = "cone_proper";
    for i in 0..samples {
        let mut rng = rng_from_seed(sub_seed(seed, name, i as u64));
        let l = pick_level(levels, i);
        let h = sampling::random_hermitian(space, l, &mut rng);
        let scale = 1.0 + h.max_abs();
        if h.is_positive(tol)? && h.scale(-1.0).is_positive(tol)? && h.max_abs() > tol.eq_tol * scale
        {
            let ce = Counterexample::new("both_signs_positive_forces_zero", h.max_abs())
                .with_element("a", &h);
            return Ok(Verdict::fail(name, samples, seed, ce));
        }
    }
    Ok(Verdict::pass(name, samples, seed))
}

/// If z + εe ⪰ 0 along the whole ε-grid down to 1e-8, then z ⪰ 0 up to
/// the grid resolution.
fn archimedean(
    space: &SpaceSpec,
    levels: &[usize],
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict> {
    let name = "archimedean";
    let grid: [f64; 5] = [1.0, 1e-2, 1e-4, 1e-6, 1e-8];
    let mut tracker = MarginTracker::default();
    let mut skipped = 0usize;
    for i in 0..samples {
        let mut rng = rng_from_seed(sub_seed(seed, name, i as u64));
        let l = pick_level(levels, i);
        // Positives nudged just below the cone boundary stress the grid.
        let p = sampling::random_contraction_positive(space, l, &mut rng);
        let nudge: f64 = rng.gen::<f64>() * 2e-9;
        let z = p.sub(&Element::order_unit(space, l).scale(nudge))?;
        let e = Element::order_unit(space, l);
        let mut along_grid = true;
        for &eps in &grid {
            if !z.add(&e.scale(eps))?.is_positive(tol)? {
                along_grid = false;
                break;
            }
        }
        if !along_grid {
            skipped += 1;
            continue;
        }
        let margin = z.min_eigenvalue(tol)?;
        tracker.observe(margin + 1e-8 + tol.psd_tol);
        if margin < -(1e-8 + tol.psd_tol) {
            let ce = Counterexample::new("grid_positive_implies_positive", margin)
                .with_element("z", &z);
            return Ok(Verdict::fail(name, samples, seed, ce));
        }
    }
    let mut v = Verdict::pass(name, samples, seed).with_skipped(skipped);
    v.margin = tracker.worst();
    Ok(v)
}

/// |−x| = |x|.
fn abs_neg_symmetry(
    space: &SpaceSpec,
    model: AbsModel,
    levels: &[usize],
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict> {
    let name = "abs_neg_symmetry";
    for i in 0..samples {
        let mut rng = rng_from_seed(sub_seed(seed, name, i as u64));
        let l = pick_level(levels, i);
        let m = pick_level(levels, i + 1);
        let x = sampling::random_element(space, l, m, &mut rng);
        let a = model.abs(&x, tol)?;
        let b = model.abs(&x.scale(-1.0), tol)?;
        let scale = 1.0 + x.max_abs() + x.max_abs() * x.max_abs();
        if !a.approx_eq(&b, tol.eq_tol * scale) {
            let diff = a.sub(&b)?.max_abs();
            let ce = Counterexample::new("abs_of_negation_equals_abs", diff)
                .with_element("x", &x)
                .with_element("abs_x", &a)
                .with_element("abs_neg_x", &b);
            return Ok(Verdict::fail(name, samples, seed, ce));
        }
    }
    Ok(Verdict::pass(name, samples, seed))
}

/// |x| ± x ⪰ 0 for Hermitian x.
fn abs_dominates(
    space: &SpaceSpec,
    model: AbsModel,
    levels: &[usize],
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict> {
    let name = "abs_dominates";
    let mut tracker = MarginTracker::default();
    for i in 0..samples {
        let mut rng = rng_from_seed(sub_seed(seed, name, i as u64));
        let l = pick_level(levels, i);
        let x = sampling::random_hermitian(space, l, &mut rng);
        let a = model.abs(&x, tol)?;
        let scale = 1.0 + x.max_abs() + x.max_abs() * x.max_abs();
        for (inequality, z) in [
            ("abs_minus_x_psd", a.sub(&x)?),
            ("abs_plus_x_psd", a.add(&x)?),
        ] {
            let margin = z.min_eigenvalue(tol)? / scale;
            tracker.observe(margin);
            if margin < -1e-7 {
                let ce = Counterexample::new(inequality, margin)
                    .with_element("x", &x)
                    .with_element("abs_x", &a);
                return Ok(Verdict::fail(name, samples, seed, ce));
            }
        }
    }
    let mut v = Verdict::pass(name, samples, seed);
    v.margin = tracker.worst();
    Ok(v)
}

/// x = pos − neg with pos ⊥ neg and |x| = pos + neg, where (pos, neg) are
/// the spectral Jordan parts and |x| is the model under test.
fn jordan_consistency(
    space: &SpaceSpec,
    model: AbsModel,
    levels: &[usize],
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict> {
    let name = "jordan_consistency";
    for i in 0..samples {
        let mut rng = rng_from_seed(sub_seed(seed, name, i as u64));
        let l = pick_level(levels, i);
        let x = sampling::random_hermitian(space, l, &mut rng);
        let (pos, neg) = x.jordan_parts(tol)?;
        let scale = 1.0 + x.max_abs() + x.max_abs() * x.max_abs();
        let recomposed = pos.sub(&neg)?;
        if !recomposed.approx_eq(&x, tol.eq_tol * scale) {
            let ce = Counterexample::new("pos_minus_neg_equals_x", recomposed.sub(&x)?.max_abs())
                .with_element("x", &x);
            return Ok(Verdict::fail(name, samples, seed, ce));
        }
        if !orthogonal(&pos, &neg, tol)? {
            let ce = Counterexample::new("jordan_parts_orthogonal", pos.mul(&neg)?.max_abs())
                .with_element("x", &x);
            return Ok(Verdict::fail(name, samples, seed, ce));
        }
        let a = model.abs(&x, tol)?;
        let sum = pos.add(&neg)?;
        if !a.approx_eq(&sum, tol.eq_tol * scale) {
            let ce = Counterexample::new("abs_equals_pos_plus_neg", a.sub(&sum)?.max_abs())
                .with_element("x", &x)
                .with_element("abs_x", &a)
                .with_element("pos_plus_neg", &sum);
            return Ok(Verdict::fail(name, samples, seed, ce));
        }
    }
    Ok(Verdict::pass(name, samples, seed))
}

/// |ς₁ x ς₂| ≤ ‖ς₁‖ · ||x| ς₂| for scalar matrices acting on both sides.
fn scalar_compression(
    space: &SpaceSpec,
    model: AbsModel,
    levels: &[usize],
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict> {
    let name = "scalar_compression";
    let mut tracker = MarginTracker::default();
    for i in 0..samples {
        let mut rng = rng_from_seed(sub_seed(seed, name, i as u64));
        let l = pick_level(levels, i);
        let m = pick_level(levels, i + 1);
        let p = 1 + (rng.gen::<usize>() % 2);
        let q = 1 + (rng.gen::<usize>() % 2);
        // Mix small-norm scalars in; they expose additive corruptions.
        let mut s1 = sampling::random_matrix(p, l, &mut rng);
        let mut s2 = sampling::random_matrix(m, q, &mut rng);
        if rng.gen::<f64>() < 0.3 {
            s1 = s1.scale(0.05);
            s2 = s2.scale(0.05);
        }
        let x = if rng.gen::<f64>() < 0.2 {
            Element::zero(space, l, m)
        } else {
            sampling::random_element(space, l, m, &mut rng)
        };
        let lhs = model.abs(&scalar_act(&s2, &scalar_act(&s1, &x, Side::Left)?, Side::Right)?, tol)?;
        let abs_x = model.abs(&x, tol)?;
        let inner = model.abs(&scalar_act(&s2, &abs_x, Side::Right)?, tol)?;
        let rhs = inner.scale(numerics::op_norm(&s1));
        let z = rhs.sub(&lhs)?;
        let scale = 1.0 + rhs.max_abs() + lhs.max_abs();
        let margin = z.min_eigenvalue(tol)? / scale;
        tracker.observe(margin);
        if margin < -1e-7 {
            let ce = Counterexample::new("scalar_compression_bound", margin)
                .with_element("x", &x)
                .with_value("s1", serde_json::to_value(&s1).unwrap())
                .with_value("s2", serde_json::to_value(&s2).unwrap());
            return Ok(Verdict::fail(name, samples, seed, ce));
        }
    }
    let mut v = Verdict::pass(name, samples, seed);
    v.margin = tracker.worst();
    Ok(v)
}

/// |x ⊛ y| = |x| ⊛ |y|.
fn direct_sum_identity(
    space: &SpaceSpec,
    model: AbsModel,
    levels: &[usize],
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict> {
    let name = "direct_sum_identity";
    for i in 0..samples {
        let mut rng = rng_from_seed(sub_seed(seed, name, i as u64));
        let l = pick_level(levels, i);
        let m = pick_level(levels, i + 1);
        let x = sampling::random_element(space, l, m, &mut rng);
        // Different norms on the two legs expose norm-dependent shifts.
        let y = sampling::random_element(space, m, l, &mut rng).scale(0.3);
        let lhs = model.abs(&x.direct_sum(&y)?, tol)?;
        let rhs = model.abs(&x, tol)?.direct_sum(&model.abs(&y, tol)?)?;
        let scale = 1.0 + lhs.max_abs() + rhs.max_abs();
        if !lhs.approx_eq(&rhs, tol.eq_tol * scale) {
            let diff = lhs.sub(&rhs)?.max_abs();
            let ce = Counterexample::new("abs_of_direct_sum_splits", diff)
                .with_element("x", &x)
                .with_element("y", &y)
                .with_element("lhs", &lhs)
                .with_element("rhs", &rhs);
            return Ok(Verdict::fail(name, samples, seed, ce));
        }
    }
    Ok(Verdict::pass(name, samples, seed))
}

/// Order projections are closed under ⊛, and p ⊛ y fails the projection
/// test whenever y does.
pub fn check_block_lemma(
    space: &SpaceSpec,
    levels: &[usize],
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict> {
    let name = "projection_direct_sum";
    for i in 0..samples {
        let mut rng = rng_from_seed(sub_seed(seed, name, i as u64));
        let l = pick_level(levels, i);
        let m = pick_level(levels, i + 1);
        let p = sampling::random_order_projection(space, l, &mut rng);
        let q = sampling::random_order_projection(space, m, &mut rng);
        let sum = p.direct_sum(&q)?;
        if !crate::oup::is_order_projection(&sum, tol)? {
            let ce = Counterexample::new("projection_direct_sum_is_projection", -1.0)
                .with_element("p", &p)
                .with_element("q", &q);
            return Ok(Verdict::fail(name, samples, seed, ce));
        }
        // Halving a nonzero projection leaves the projection set.
        if q.order_unit_norm() > 0.5 {
            let bad = p.direct_sum(&q.scale(0.5))?;
            if crate::oup::is_order_projection(&bad, tol)? {
                let ce = Counterexample::new("halved_leg_is_not_projection", 1.0)
                    .with_element("p", &p)
                    .with_element("q", &q);
                return Ok(Verdict::fail(name, samples, seed, ce));
            }
        }
    }
    Ok(Verdict::pass(name, samples, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn m21() -> SpaceSpec {
        SpaceSpec::new(vec![2, 1]).unwrap()
    }

    fn run(model: AbsModel) -> Vec<Verdict> {
        check_axioms(&m21(), model, &[1, 2], 60, 29, &tol()).unwrap()
    }

    fn by_name<'a>(vs: &'a [Verdict], name: &str) -> &'a Verdict {
        vs.iter().find(|v| v.name == name).unwrap()
    }

    #[test]
    fn genuine_model_satisfies_everything() {
        for v in run(AbsModel::Genuine) {
            assert!(v.passed, "{} failed: {:?}", v.name, v.counterexample);
            if let Some(m) = v.margin {
                assert!(m > -1e-7, "{} margin {}", v.name, m);
            }
        }
    }

    #[test]
    fn shift_model_breaks_scalar_compression() {
        let vs = run(AbsModel::Shift(1e-2));
        assert!(!by_name(&vs, "scalar_compression").passed);
        assert!(!by_name(&vs, "jordan_consistency").passed);
    }

    #[test]
    fn norm_shift_model_breaks_direct_sum_identity() {
        let vs = run(AbsModel::NormShift(1e-2));
        assert!(!by_name(&vs, "direct_sum_identity").passed);
    }

    #[test]
    fn scaled_model_breaks_only_jordan_consistency() {
        let vs = run(AbsModel::Scaled(1.5));
        for v in &vs {
            if v.name == "jordan_consistency" {
                assert!(!v.passed);
            } else {
                assert!(v.passed, "{} unexpectedly failed", v.name);
            }
        }
    }

    #[test]
    fn block_lemma_accepts_projections_and_rejects_halved_leg() {
        let v = check_block_lemma(&m21(), &[1, 2], 40, 31, &tol()).unwrap();
        assert!(v.passed, "{:?}", v.counterexample);
    }
}
