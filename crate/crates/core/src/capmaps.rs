//! Completely absolute value preserving maps between the concrete
//! spaces, modeled exactly as multiplicity-matrix *-homomorphisms
//! (Bratteli embeddings); their kernels, the quotient X/Ker(φ), and the
//! identification of the quotient with the corner of φ(e) in the target.
//!
//! Arbitrary linear maps are accepted only for refutation testing — see
//! [`CompressionMap`], which preserves positivity but not absolute
//! values.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideals::IdealHandle;
use crate::numerics::{ComplexMatrix, Tolerances};
use crate::oup::is_order_projection;
use crate::report::{Counterexample, MarginTracker, Verdict};
use crate::sampling::{self, rng_from_seed, sub_seed};
use crate::space::{Element, SpaceSpec};

/// Multiplicity-matrix *-homomorphism φ: ⊕ᵢ M_{nᵢ} → ⊕ⱼ M_{Nⱼ}. Each
/// target summand j receives `mult[j][i]` diagonally stacked copies of
/// source summand i (ascending i), zero-filled on the complement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "StarHomWire", into = "StarHomWire")]
pub struct StarHom {
    source: SpaceSpec,
    target: SpaceSpec,
    mult: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct StarHomWire {
    source: Vec<usize>,
    target: Vec<usize>,
    mult: Vec<Vec<usize>>,
}

impl TryFrom<StarHomWire> for StarHom {
    type Error = Error;

    fn try_from(w: StarHomWire) -> Result<StarHom> {
        StarHom::new(SpaceSpec::new(w.source)?, SpaceSpec::new(w.target)?, w.mult)
    }
}

impl From<StarHom> for StarHomWire {
    fn from(h: StarHom) -> StarHomWire {
        StarHomWire {
            source: h.source.summands,
            target: h.target.summands,
            mult: h.mult,
        }
    }
}

impl StarHom {
    pub fn new(source: SpaceSpec, target: SpaceSpec, mult: Vec<Vec<usize>>) -> Result<StarHom> {
        if mult.len() != target.summand_count()
            || mult.iter().any(|row| row.len() != source.summand_count())
        {
            return Err(Error::Validation(format!(
                "multiplicity matrix must be {}x{}",
                target.summand_count(),
                source.summand_count()
            )));
        }
        for (j, row) in mult.iter().enumerate() {
            let used: usize = row.iter().zip(&source.summands).map(|(m, n)| m * n).sum();
            if used > target.summands[j] {
                return Err(Error::Validation(format!(
                    "target summand {j} (dim {}) cannot hold {} embedded dimensions",
                    target.summands[j], used
                )));
            }
        }
        Ok(StarHom { source, target, mult })
    }

    pub fn identity(space: &SpaceSpec) -> StarHom {
        let k = space.summand_count();
        let mult = (0..k)
            .map(|j| (0..k).map(|i| usize::from(i == j)).collect())
            .collect();
        StarHom {
            source: space.clone(),
            target: space.clone(),
            mult,
        }
    }

    pub fn zero(source: &SpaceSpec, target: &SpaceSpec) -> StarHom {
        StarHom {
            source: source.clone(),
            target: target.clone(),
            mult: vec![vec![0; source.summand_count()]; target.summand_count()],
        }
    }

    pub fn source(&self) -> &SpaceSpec {
        &self.source
    }

    pub fn target(&self) -> &SpaceSpec {
        &self.target
    }

    pub fn mult(&self) -> &[Vec<usize>] {
        &self.mult
    }

    /// Unital iff the embedded dimensions exactly fill every target summand.
    pub fn is_unital(&self) -> bool {
        self.mult.iter().zip(&self.target.summands).all(|(row, &cap)| {
            row.iter().zip(&self.source.summands).map(|(m, n)| m * n).sum::<usize>() == cap
        })
    }

    pub fn is_zero_map(&self) -> bool {
        self.mult.iter().flatten().all(|&m| m == 0)
    }

    /// Source summand indices some target summand actually uses.
    pub fn retained(&self) -> Vec<usize> {
        (0..self.source.summand_count())
            .filter(|&i| self.mult.iter().any(|row| row[i] > 0))
            .collect()
    }

    /// Source summand indices mapped to zero: the kernel support.
    pub fn dropped(&self) -> Vec<usize> {
        (0..self.source.summand_count())
            .filter(|&i| self.mult.iter().all(|row| row[i] == 0))
            .collect()
    }

    /// Apply the amplified map φ_{l,m} to an element of the source.
    pub fn apply(&self, x: &Element) -> Result<Element> {
        if x.space() != &self.source {
            return Err(Error::SpaceMismatch);
        }
        let (l, m) = x.level();
        let mut out_blocks = Vec::with_capacity(self.target.summand_count());
        for (j, &cap) in self.target.summands.iter().enumerate() {
            let mut out = ComplexMatrix::zeros(l * cap, m * cap);
            let mut offset = 0usize;
            for (i, &n) in self.source.summands.iter().enumerate() {
                for _copy in 0..self.mult[j][i] {
                    for r in 0..l {
                        for s in 0..m {
                            let entry = x.block(i).extract_block(r * n, s * n, n, n);
                            out.insert_block(r * cap + offset, s * cap + offset, &entry);
                        }
                    }
                    offset += n;
                }
            }
            out_blocks.push(out);
        }
        Element::new(self.target.clone(), (l, m), out_blocks)
    }

    /// φ(e): an order projection of the target, the unit of the corner
    /// the quotient identifies with.
    pub fn unit_image(&self) -> Result<Element> {
        self.apply(&Element::order_unit(&self.source, 1))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.clone()).expect("hom wire form is serializable")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<StarHom> {
        serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// A linear map between spaces, as far as the CAP checker cares.
pub trait LinearMap {
    fn source(&self) -> &SpaceSpec;
    fn target(&self) -> &SpaceSpec;
    fn apply(&self, x: &Element) -> Result<Element>;
}

impl LinearMap for StarHom {
    fn source(&self) -> &SpaceSpec {
        &self.source
    }

    fn target(&self) -> &SpaceSpec {
        &self.target
    }

    fn apply(&self, x: &Element) -> Result<Element> {
        StarHom::apply(self, x)
    }
}

/// The (1,1)-corner compression M_n → M₁, a ↦ a₁₁, amplified entrywise.
/// Unital and positive but not absolute value preserving: the checker
/// must refute it (witness a = [[0,1],[1,0]] for n = 2).
#[derive(Debug, Clone)]
pub struct CompressionMap {
    source: SpaceSpec,
    target: SpaceSpec,
}

impl CompressionMap {
    pub fn new(n: usize) -> Result<CompressionMap> {
        if n < 2 {
            return Err(Error::Validation("compression needs n >= 2".into()));
        }
        Ok(CompressionMap {
            source: SpaceSpec::new(vec![n])?,
            target: SpaceSpec::new(vec![1])?,
        })
    }
}

impl LinearMap for CompressionMap {
    fn source(&self) -> &SpaceSpec {
        &self.source
    }

    fn target(&self) -> &SpaceSpec {
        &self.target
    }

    fn apply(&self, x: &Element) -> Result<Element> {
        if x.space() != &self.source {
            return Err(Error::SpaceMismatch);
        }
        let (l, m) = x.level();
        let n = self.source.summands[0];
        let out = ComplexMatrix::from_fn(l, m, |r, s| x.block(0).get(r * n, s * n));
        Element::new(self.target.clone(), (l, m), vec![out])
    }
}

/// Sampled check that |φ(x)| = φ(|x|) at the requested levels. A pass is
/// inconclusive-by-sampling; a fail carries the witness.
pub fn check_cap(
    map: &dyn LinearMap,
    levels: &[usize],
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict> {
    let name = "cap_preserves_abs";
    for i in 0..samples {
        let mut rng = rng_from_seed(sub_seed(seed, name, i as u64));
        let l = levels[i % levels.len()].max(1);
        let m = levels[(i + 1) % levels.len()].max(1);
        let x = sampling::random_element(map.source(), l, m, &mut rng);
        if cap_violation(map, &x, tol)?.is_some() {
            let image_abs = map.apply(&x)?.abs_value(tol)?;
            let abs_image = map.apply(&x.abs_value(tol)?)?;
            let ce = Counterexample::new(
                "abs_commutes_with_map",
                image_abs.sub(&abs_image)?.max_abs(),
            )
            .with_element("x", &x)
            .with_element("abs_of_image", &image_abs)
            .with_element("image_of_abs", &abs_image);
            return Ok(Verdict::fail(name, samples, seed, ce));
        }
    }
    Ok(Verdict::pass(name, samples, seed))
}

/// Returns the defect ‖|φ(x)| − φ(|x|)‖_max when it exceeds tolerance.
pub fn cap_violation(map: &dyn LinearMap, x: &Element, tol: &Tolerances) -> Result<Option<f64>> {
    let image_abs = map.apply(x)?.abs_value(tol)?;
    let abs_image = map.apply(&x.abs_value(tol)?)?;
    let scale = 1.0 + x.max_abs() + x.max_abs() * x.max_abs();
    let defect = image_abs.sub(&abs_image)?.max_abs();
    Ok(if defect > tol.eq_tol * scale { Some(defect) } else { None })
}

/// Basis of Ker(φ) = ⊕_{dropped} M_{nᵢ} as level-1 matrix units.
pub fn kernel_basis(hom: &StarHom) -> Vec<Element> {
    let mut out = Vec::new();
    for i in hom.dropped() {
        let n = hom.source().summands[i];
        for a in 0..n {
            for b in 0..n {
                let mut unit = Element::zero(hom.source(), 1, 1);
                let mut blocks: Vec<ComplexMatrix> = unit.blocks().to_vec();
                blocks[i].set(a, b, num_complex::Complex64::new(1.0, 0.0));
                unit = Element::new(hom.source().clone(), (1, 1), blocks)
                    .expect("matrix unit shapes are consistent");
                out.push(unit);
            }
        }
    }
    out
}

/// Whether x is supported only on the dropped summands (kernel support).
fn kernel_supported(hom: &StarHom, x: &Element, tol: &Tolerances) -> bool {
    let dropped = hom.dropped();
    let scale = 1.0 + x.max_abs();
    (0..hom.source().summand_count())
        .filter(|i| !dropped.contains(i))
        .all(|i| x.block(i).max_abs() <= tol.eq_tol * scale)
}

/// Random element supported on the dropped summands.
fn random_kernel_element(
    hom: &StarHom,
    l: usize,
    m: usize,
    rng: &mut impl rand::RngCore,
) -> Element {
    let dropped = hom.dropped();
    let blocks = hom
        .source()
        .summands
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            if dropped.contains(&i) {
                sampling::random_matrix(l * n, m * n, rng)
            } else {
                ComplexMatrix::zeros(l * n, m * n)
            }
        })
        .collect();
    Element::new(hom.source().clone(), (l, m), blocks).expect("sampled shapes are consistent")
}

/// The five-part kernel suite: entrywise vs amplified kernels, closure
/// under adjoints, the absolutely-order-ideal property, the φ = 0
/// characterizations through Ker = X and through φ(e) = 0.
pub fn check_kernel_theorem(
    hom: &StarHom,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Vec<Verdict>> {
    let mut verdicts = Vec::new();
    let is_zero = |e: &Element| e.max_abs() <= tol.eq_tol * (1.0 + e.max_abs());

    // Item 1: φ_{l,m}(y) = 0 iff every grid entry of y is in the kernel.
    {
        let name = "kernel_entrywise_vs_amplified";
        let mut verdict = Verdict::pass(name, samples, seed);
        for i in 0..samples {
            let mut rng = rng_from_seed(sub_seed(seed, name, i as u64));
            let (l, m) = (1 + i % 2, 1 + (i + 1) % 2);
            let y = if rng.gen::<bool>() {
                random_kernel_element(hom, l, m, &mut rng)
            } else {
                sampling::random_element(hom.source(), l, m, &mut rng)
            };
            let amplified_zero = is_zero(&hom.apply(&y)?);
            let mut entrywise = true;
            for r in 0..l {
                for s in 0..m {
                    let entry = crate::ideals::extract_grid_entry(&y, r, s)?;
                    if !is_zero(&hom.apply(&entry)?) {
                        entrywise = false;
                    }
                }
            }
            if amplified_zero != entrywise {
                let ce = Counterexample::new("entrywise_iff_amplified_kernel", -1.0)
                    .with_element("y", &y);
                verdict = Verdict::fail(name, samples, seed, ce);
                break;
            }
        }
        verdicts.push(verdict);
    }

    // Item 2: the kernel is closed under adjoints.
    {
        let name = "kernel_self_adjoint";
        let mut verdict = Verdict::pass(name, samples, seed);
        for i in 0..samples {
            let mut rng = rng_from_seed(sub_seed(seed, name, i as u64));
            let y = random_kernel_element(hom, 1 + i % 2, 1 + (i + 1) % 2, &mut rng);
            if !is_zero(&hom.apply(&y.adjoint())?) {
                let ce = Counterexample::new("adjoint_stays_in_kernel", -1.0).with_element("y", &y);
                verdict = Verdict::fail(name, samples, seed, ce);
                break;
            }
        }
        verdicts.push(verdict);
    }

    // Item 3: Ker is an absolutely matrix order ideal: squeezed positives
    // stay inside, and |y| of a kernel element has kernel support.
    {
        let name = "kernel_absolute_order_ideal";
        let mut verdict = Verdict::pass(name, samples, seed);
        for i in 0..samples {
            let mut rng = rng_from_seed(sub_seed(seed, name, i as u64));
            let l = 1 + i % 2;
            let g = random_kernel_element(hom, l, l, &mut rng);
            let b = g.adjoint().mul(&g)?.hermitian_part()?;
            let c = sampling::random_contraction_positive(hom.source(), l, &mut rng);
            let b_root = crate::oup::sqrt_of_positive(&b, tol)?;
            let a = b_root.mul(&c)?.mul(&b_root)?.hermitian_part()?;
            if !kernel_supported(hom, &a, tol) {
                let ce = Counterexample::new("squeezed_positive_in_kernel", -1.0)
                    .with_element("a", &a)
                    .with_element("b", &b);
                verdict = Verdict::fail(name, samples, seed, ce);
                break;
            }
            let y = random_kernel_element(hom, l, 1 + (i + 1) % 2, &mut rng);
            if !kernel_supported(hom, &y.abs_value(tol)?, tol) {
                let ce = Counterexample::new("abs_of_kernel_in_kernel", -1.0).with_element("y", &y);
                verdict = Verdict::fail(name, samples, seed, ce);
                break;
            }
        }
        verdicts.push(verdict);
    }

    // Item 4: φ = 0 ⟺ Ker = X, tested on sampled positives.
    {
        let name = "zero_map_iff_kernel_everything";
        let mut verdict = Verdict::pass(name, samples, seed);
        let zero_map = hom.is_zero_map();
        for i in 0..samples {
            let mut rng = rng_from_seed(sub_seed(seed, name, i as u64));
            let x = sampling::random_positive_unit(hom.source(), 1 + i % 2, &mut rng);
            let killed = is_zero(&hom.apply(&x)?);
            if killed != (zero_map || kernel_supported(hom, &x, tol)) {
                let ce = Counterexample::new("positive_killed_iff_kernel_supported", -1.0)
                    .with_element("x", &x)
                    .with_value("zero_map", zero_map.into());
                verdict = Verdict::fail(name, samples, seed, ce);
                break;
            }
        }
        verdicts.push(verdict);
    }

    // Item 5: φ = 0 ⟺ φ(e) = 0.
    {
        let name = "zero_map_iff_unit_killed";
        let unit_killed = is_zero(&hom.unit_image()?);
        let verdict = if unit_killed == hom.is_zero_map() {
            Verdict::pass(name, 1, seed)
        } else {
            let ce = Counterexample::new("unit_killed_iff_zero_map", -1.0)
                .with_value("unit_killed", unit_killed.into())
                .with_value("zero_map", hom.is_zero_map().into());
            Verdict::fail(name, 1, seed, ce)
        };
        verdicts.push(verdict);
    }

    Ok(verdicts)
}

/// The quotient X₀ = X/Ker(φ), identified with the retained summands.
#[derive(Debug, Clone)]
pub struct QuotientSpace {
    hom: StarHom,
    retained: Vec<usize>,
    quotient: SpaceSpec,
}

/// Build the quotient of φ; the zero map quotients everything away, which
/// the empty-space invariant rejects.
pub fn quotient(hom: &StarHom) -> Result<QuotientSpace> {
    let retained = hom.retained();
    if retained.is_empty() {
        return Err(Error::Validation(
            "the zero map has trivial quotient; nothing to identify".into(),
        ));
    }
    let quotient = SpaceSpec::new(retained.iter().map(|&i| hom.source().summands[i]).collect())?;
    Ok(QuotientSpace {
        hom: hom.clone(),
        retained,
        quotient,
    })
}

impl QuotientSpace {
    pub fn hom(&self) -> &StarHom {
        &self.hom
    }

    pub fn retained(&self) -> &[usize] {
        &self.retained
    }

    pub fn quotient_space(&self) -> &SpaceSpec {
        &self.quotient
    }

    /// Canonical coset representative: x with the dropped summands zeroed.
    pub fn coset_representative(&self, x: &Element) -> Result<Element> {
        if x.space() != self.hom.source() {
            return Err(Error::SpaceMismatch);
        }
        let blocks = x
            .blocks()
            .iter()
            .enumerate()
            .map(|(i, b)| {
                if self.retained.contains(&i) {
                    b.clone()
                } else {
                    ComplexMatrix::zeros(b.rows(), b.cols())
                }
            })
            .collect();
        Element::new(x.space().clone(), x.level(), blocks)
    }

    /// Coset positivity: Ker + x ⪰ 0 iff φ(x) ⪰ 0.
    pub fn coset_positive(&self, x: &Element, tol: &Tolerances) -> Result<bool> {
        self.hom.apply(x)?.is_positive(tol)
    }

    /// Representative of the coset absolute value |Ker + x| = Ker + |x|.
    pub fn coset_abs(&self, x: &Element, tol: &Tolerances) -> Result<Element> {
        self.coset_representative(&x.abs_value(tol)?)
    }

    /// Quotient norm ‖Ker + x‖⁰: minimal ε with the φ(e)-cornered block
    /// certificate PSD in the target, i.e. the ideal norm of φ(x) inside
    /// the corner of φ(e).
    pub fn quotient_norm(&self, x: &Element, tol: &Tolerances) -> Result<f64> {
        let unit = self.hom.unit_image()?;
        let norm = unit.order_unit_norm();
        if (norm - 1.0).abs() > tol.eq_tol {
            return Err(Error::HypothesisUnmet(format!(
                "image of the unit must have norm 1, got {norm}"
            )));
        }
        let handle = IdealHandle::new(unit, *tol)?;
        handle.ideal_norm(&self.hom.apply(x)?)
    }
}

/// Quotient identification suite: coset positivity matches image
/// positivity both ways, the coset absolute value is well defined under
/// kernel perturbations, the quotient norm equals ‖φ(x)‖, and the
/// set-equality question φ(X) = Y_{φ(e)} is answered as a flag without
/// being asserted.
pub fn check_quotient_identification(
    q: &QuotientSpace,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<Verdict> {
    let name = "quotient_identification";
    let unit = q.hom().unit_image()?;
    let unit_norm = unit.order_unit_norm();
    if (unit_norm - 1.0).abs() > tol.eq_tol {
        return Err(Error::HypothesisUnmet(format!(
            "image of the unit must have norm 1, got {unit_norm}"
        )));
    }
    if !is_order_projection(&unit, tol)? {
        return Err(Error::HypothesisUnmet(
            "image of the unit is not an order projection".into(),
        ));
    }
    let mut tracker = MarginTracker::default();
    for i in 0..samples {
        let mut rng = rng_from_seed(sub_seed(seed, name, i as u64));
        let l = 1 + i % 2;

        // Positivity transfers both ways through the representative.
        let x = if rng.gen::<bool>() {
            sampling::random_hermitian(q.hom().source(), l, &mut rng)
        } else {
            sampling::random_positive_unit(q.hom().source(), l, &mut rng)
        };
        let rep = q.coset_representative(&x)?;
        let rep_positive = rep.is_positive(tol)?;
        let image_positive = q.coset_positive(&x, tol)?;
        if rep_positive != image_positive {
            let ce = Counterexample::new("representative_positive_iff_image_positive", -1.0)
                .with_element("x", &x)
                .with_value("representative_positive", rep_positive.into())
                .with_value("image_positive", image_positive.into());
            return Ok(Verdict::fail(name, samples, seed, ce));
        }

        // Coset absolute value is invariant under kernel perturbations.
        let y = sampling::random_element(q.hom().source(), l, 1 + (i + 1) % 2, &mut rng);
        let base = q.coset_abs(&y, tol)?;
        for _ in 0..3 {
            let z = random_kernel_element(q.hom(), y.level().0, y.level().1, &mut rng);
            let shifted = q.coset_abs(&y.add(&z)?, tol)?;
            let scale = 1.0 + y.max_abs() + z.max_abs();
            let defect = base.sub(&shifted)?.max_abs();
            if defect > tol.eq_tol * scale * scale {
                let ce = Counterexample::new("coset_abs_well_defined", defect)
                    .with_element("y", &y)
                    .with_element("z", &z);
                return Ok(Verdict::fail(name, samples, seed, ce));
            }
        }

        // Quotient norm matches the target order-unit norm of the image.
        let qnorm = q.quotient_norm(&y, tol)?;
        let inorm = q.hom().apply(&y)?.order_unit_norm();
        let diff = (qnorm - inorm).abs();
        tracker.observe(1e-8 * (1.0 + inorm) - diff);
        if diff > 1e-8 * (1.0 + inorm) {
            let ce = Counterexample::new("quotient_norm_equals_image_norm", diff)
                .with_element("y", &y)
                .with_value("quotient_norm", qnorm.into())
                .with_value("image_norm", inorm.into());
            return Ok(Verdict::fail(name, samples, seed, ce));
        }
    }
    let mut v = Verdict::pass(name, samples, seed);
    v.margin = tracker.worst();
    v = v.with_flag("image_equals_corner", image_equals_corner(q.hom()).into());
    Ok(v)
}

/// Whether φ(X) fills the whole corner Y_{φ(e)}: dimension count
/// Σ_{retained} nᵢ² versus Σⱼ rⱼ² with rⱼ = Σᵢ mult[j][i]·nᵢ. Strict
/// inequality happens exactly when some multiplicity exceeds 1 or a
/// summand lands in several target summands.
pub fn image_equals_corner(hom: &StarHom) -> bool {
    let image_dim: usize = hom
        .retained()
        .iter()
        .map(|&i| hom.source().summands[i] * hom.source().summands[i])
        .sum();
    let corner_dim: usize = hom
        .mult()
        .iter()
        .map(|row| {
            let r: usize = row.iter().zip(&hom.source().summands).map(|(m, n)| m * n).sum();
            r * r
        })
        .sum();
    image_dim == corner_dim
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;
    use num_complex::Complex64;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn m21() -> SpaceSpec {
        SpaceSpec::new(vec![2, 1]).unwrap()
    }

    fn m2() -> SpaceSpec {
        SpaceSpec::new(vec![2]).unwrap()
    }

    /// φ(a, b) = a : M₂ ⊕ M₁ → M₂.
    fn first_summand() -> StarHom {
        StarHom::new(m21(), m2(), vec![vec![1, 0]]).unwrap()
    }

    /// φ(a, b) = diag(a, a) : M₁ → M₂, multiplicity 2.
    fn doubled() -> StarHom {
        StarHom::new(SpaceSpec::new(vec![1]).unwrap(), m2(), vec![vec![2]]).unwrap()
    }

    #[test]
    fn apply_projects_first_summand() {
        let hom = first_summand();
        let x = Element::new(
            m21(),
            (1, 1),
            vec![
                ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]),
                ComplexMatrix::from_real(1, 1, &[9.0]),
            ],
        )
        .unwrap();
        let y = hom.apply(&x).unwrap();
        assert!(y.block(0).approx_eq(&x.block(0), 0.0));
        assert_eq!(hom.retained(), vec![0]);
        assert_eq!(hom.dropped(), vec![1]);
        assert!(hom.is_unital());
        assert!(image_equals_corner(&hom));
    }

    #[test]
    fn apply_doubles_scalar_summand() {
        let hom = doubled();
        let x = Element::new(
            SpaceSpec::new(vec![1]).unwrap(),
            (1, 1),
            vec![ComplexMatrix::from_real(1, 1, &[3.0])],
        )
        .unwrap();
        let y = hom.apply(&x).unwrap();
        assert!(y.block(0).approx_eq(&ComplexMatrix::diag_real(&[3.0, 3.0]), 0.0));
        assert!(hom.is_unital());
        assert!(!image_equals_corner(&hom));
    }

    #[test]
    fn apply_acts_entrywise_on_grids() {
        // At level (l, m) the map is applied to each level-1 grid entry.
        let hom = first_summand();
        let mut rng = sampling::rng_from_seed(61);
        let x = sampling::random_element(&m21(), 2, 3, &mut rng);
        let y = hom.apply(&x).unwrap();
        for r in 0..2 {
            for s in 0..3 {
                let entry = crate::ideals::extract_grid_entry(&x, r, s).unwrap();
                let image_entry = crate::ideals::extract_grid_entry(&y, r, s).unwrap();
                assert!(hom.apply(&entry).unwrap().approx_eq(&image_entry, 1e-12));
            }
        }
    }

    #[test]
    fn star_homs_preserve_structure() {
        let mut rng = sampling::rng_from_seed(67);
        for hom in [first_summand(), doubled(), StarHom::identity(&m21())] {
            for _ in 0..50 {
                let x = sampling::random_element(hom.source(), 1, 1, &mut rng);
                let y = sampling::random_element(hom.source(), 1, 1, &mut rng);
                let fx = hom.apply(&x).unwrap();
                let fy = hom.apply(&y).unwrap();
                assert!(hom
                    .apply(&x.mul(&y).unwrap())
                    .unwrap()
                    .approx_eq(&fx.mul(&fy).unwrap(), 1e-10));
                assert!(hom.apply(&x.adjoint()).unwrap().approx_eq(&fx.adjoint(), 1e-12));
                assert!(hom
                    .apply(&x.add(&y.scale(2.5)).unwrap())
                    .unwrap()
                    .approx_eq(&fx.add(&fy.scale(2.5)).unwrap(), 1e-12));
            }
        }
    }

    #[test]
    fn star_homs_pass_cap_check() {
        for hom in [first_summand(), doubled()] {
            let v = check_cap(&hom, &[1, 2], 60, 71, &tol()).unwrap();
            assert!(v.passed, "{:?}", v.counterexample);
        }
    }

    #[test]
    fn compression_violates_cap_with_flip_witness() {
        // a ↦ a₁₁ on M₂ is positive but not CAP; the flip matrix
        // witnesses it: |φ(x)| = 0 while φ(|x|) = 1.
        let comp = CompressionMap::new(2).unwrap();
        let flip = Element::new(
            m2(),
            (1, 1),
            vec![ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])],
        )
        .unwrap();
        let defect = cap_violation(&comp, &flip, &tol()).unwrap().unwrap();
        assert!((defect - 1.0).abs() < 1e-9);
        let v = check_cap(&comp, &[1], 200, 73, &tol()).unwrap();
        assert!(!v.passed);
    }

    #[test]
    fn kernel_basis_spans_dropped_summands() {
        assert_eq!(kernel_basis(&first_summand()).len(), 1);
        assert_eq!(kernel_basis(&StarHom::identity(&m21())).len(), 0);
        let zero = StarHom::zero(&m21(), &m2());
        assert_eq!(kernel_basis(&zero).len(), 5); // 2² + 1²
        assert!(zero.is_zero_map());
    }

    #[test]
    fn kernel_theorem_on_reference_maps() {
        for hom in [
            StarHom::identity(&m21()),
            StarHom::zero(&m21(), &m2()),
            first_summand(),
            doubled(),
        ] {
            for v in check_kernel_theorem(&hom, 40, 79, &tol()).unwrap() {
                assert!(v.passed, "{}: {:?}", v.name, v.counterexample);
            }
        }
    }

    #[test]
    fn quotient_norm_matches_image_norm() {
        let q = quotient(&first_summand()).unwrap();
        let mut rng = sampling::rng_from_seed(83);
        for _ in 0..30 {
            let x = sampling::random_element(&m21(), 1, 1, &mut rng);
            let qn = q.quotient_norm(&x, &tol()).unwrap();
            let direct = q.hom().apply(&x).unwrap().order_unit_norm();
            assert!((qn - direct).abs() < 1e-8 * (1.0 + direct), "{qn} vs {direct}");
        }
        assert!(quotient(&StarHom::zero(&m21(), &m2())).is_err());
    }

    #[test]
    fn coset_positivity_ignores_kernel() {
        let q = quotient(&first_summand()).unwrap();
        // Positive first block, wildly negative dropped block: the coset
        // is still positive.
        let x = Element::new(
            m21(),
            (1, 1),
            vec![
                ComplexMatrix::diag_real(&[1.0, 2.0]),
                ComplexMatrix::from_real(1, 1, &[-5.0]),
            ],
        )
        .unwrap();
        assert!(q.coset_positive(&x, &tol()).unwrap());
        let y = Element::new(
            m21(),
            (1, 1),
            vec![
                ComplexMatrix::diag_real(&[1.0, -2.0]),
                ComplexMatrix::from_real(1, 1, &[5.0]),
            ],
        )
        .unwrap();
        assert!(!q.coset_positive(&y, &tol()).unwrap());
        let _ = Complex64::new(0.0, 0.0);
    }

    #[test]
    fn quotient_identification_verdicts_pass() {
        for hom in [first_summand(), doubled()] {
            let corner = image_equals_corner(&hom);
            let q = quotient(&hom).unwrap();
            let v = check_quotient_identification(&q, 40, 89, &tol()).unwrap();
            assert!(v.passed, "{:?}", v.counterexample);
            if let Some(flag) = v.flags.get("image_equals_corner") {
                assert_eq!(flag, &serde_json::Value::Bool(corner));
            }
        }
    }

    #[test]
    fn wire_roundtrip_and_validation() {
        let hom = first_summand();
        let json = hom.to_json();
        let back = StarHom::from_json(&json).unwrap();
        assert_eq!(back.mult(), hom.mult());
        assert_eq!(back.source(), hom.source());
        // Multiplicities exceeding the target capacity are rejected.
        assert!(StarHom::new(m21(), m2(), vec![vec![2, 0]]).is_err());
        // Wrong shape rejected.
        assert!(StarHom::new(m21(), m2(), vec![vec![1]]).is_err());
    }
}
