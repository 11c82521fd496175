//! The concrete model: X = ⊕ᵢ M_{nᵢ}(ℂ) with its rectangular
//! amplifications M_{l,m}(X), positivity, absolute values |x| = √(x*x),
//! order-unit norms, scalar bimodule actions and Jordan decomposition.
//!
//! An element at level (l, m) stores one (l·nᵢ)×(m·nᵢ) scalar matrix per
//! summand; grid position (r, s) of the l×m block grid holds the
//! (r, s)-entry of the amplified element.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, ComplexMatrix, Tolerances};

/// A finite-dimensional C*-algebra given by its summand dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub summands: Vec<usize>,
}

impl SpaceSpec {
    pub fn new(summands: Vec<usize>) -> Result<Self> {
        if summands.is_empty() {
            return Err(Error::Validation("a space needs at least one summand".into()));
        }
        if summands.iter().any(|&n| n == 0) {
            return Err(Error::Validation("summand dimensions must be positive".into()));
        }
        Ok(SpaceSpec { summands })
    }

    pub fn summand_count(&self) -> usize {
        self.summands.len()
    }

    /// Total scalar dimension Σ nᵢ of the level-1 representation.
    pub fn total_dim(&self) -> usize {
        self.summands.iter().sum()
    }
}

/// Element of M_{l,m}(X): one rectangular scalar matrix per summand.
#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    space: SpaceSpec,
    level: (usize, usize),
    blocks: Vec<ComplexMatrix>,
}

/// Serialized form of an [`Element`] (space spec travels separately).
#[derive(Debug, Serialize, Deserialize)]
pub struct ElementWire {
    pub level: [usize; 2],
    pub blocks: Vec<ComplexMatrix>,
}

impl Element {
    pub fn new(space: SpaceSpec, level: (usize, usize), blocks: Vec<ComplexMatrix>) -> Result<Self> {
        if level.0 == 0 || level.1 == 0 {
            return Err(Error::Validation("levels must be positive".into()));
        }
        if blocks.len() != space.summand_count() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} blocks, got {}",
                space.summand_count(),
                blocks.len()
            )));
        }
        for (n, b) in space.summands.iter().zip(&blocks) {
            if b.rows() != level.0 * n || b.cols() != level.1 * n {
                return Err(Error::ShapeMismatch(format!(
                    "summand dim {n} at level {:?}: block is {}x{}",
                    level,
                    b.rows(),
                    b.cols()
                )));
            }
            if !b.is_finite() {
                return Err(Error::Validation("element entries must be finite".into()));
            }
        }
        Ok(Element { space, level, blocks })
    }

    pub fn zero(space: &SpaceSpec, l: usize, m: usize) -> Element {
        let blocks = space
            .summands
            .iter()
            .map(|&n| ComplexMatrix::zeros(l * n, m * n))
            .collect();
        Element {
            space: space.clone(),
            level: (l, m),
            blocks,
        }
    }

    /// The order unit e^l: identity blocks at level (l, l).
    pub fn order_unit(space: &SpaceSpec, l: usize) -> Element {
        let blocks = space.summands.iter().map(|&n| ComplexMatrix::identity(l * n)).collect();
        Element {
            space: space.clone(),
            level: (l, l),
            blocks,
        }
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn level(&self) -> (usize, usize) {
        self.level
    }

    pub fn is_square_level(&self) -> bool {
        self.level.0 == self.level.1
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> &ComplexMatrix {
        &self.blocks[i]
    }

    fn map_blocks(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix, level: (usize, usize)) -> Element {
        Element {
            space: self.space.clone(),
            level,
            blocks: self.blocks.iter().map(f).collect(),
        }
    }

    fn zip_blocks(
        &self,
        other: &Element,
        f: impl Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix,
        level: (usize, usize),
    ) -> Result<Element> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        Ok(Element {
            space: self.space.clone(),
            level,
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn adjoint(&self) -> Element {
        self.map_blocks(|b| b.adjoint(), (self.level.1, self.level.0))
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        if self.level != other.level {
            return Err(Error::ShapeMismatch(format!(
                "levels {:?} vs {:?}",
                self.level, other.level
            )));
        }
        self.zip_blocks(other, |a, b| a.add(b), self.level)
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        if self.level != other.level {
            return Err(Error::ShapeMismatch(format!(
                "levels {:?} vs {:?}",
                self.level, other.level
            )));
        }
        self.zip_blocks(other, |a, b| a.sub(b), self.level)
    }

    pub fn scale(&self, s: f64) -> Element {
        self.map_blocks(|b| b.scale(s), self.level)
    }

    pub fn scale_complex(&self, s: Complex64) -> Element {
        self.map_blocks(|b| b.scale_complex(s), self.level)
    }

    /// Blockwise matrix product; levels must be composable (l,m)·(m,s).
    pub fn mul(&self, other: &Element) -> Result<Element> {
        if self.level.1 != other.level.0 {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply levels {:?} and {:?}",
                self.level, other.level
            )));
        }
        self.zip_blocks(other, |a, b| a.mul(b), (self.level.0, other.level.1))
    }

    pub fn is_hermitian(&self, tol: &Tolerances) -> bool {
        self.is_square_level() && self.blocks.iter().all(|b| b.is_hermitian(tol.eq_tol))
    }

    pub fn hermitian_part(&self) -> Result<Element> {
        if !self.is_square_level() {
            return Err(Error::NotSquareLevel(self.level.0, self.level.1));
        }
        Ok(self.map_blocks(|b| b.hermitian_part(), self.level))
    }

    /// Cone membership: every block Hermitian and PSD.
    pub fn is_positive(&self, tol: &Tolerances) -> Result<bool> {
        if !self.is_square_level() {
            return Err(Error::NotSquareLevel(self.level.0, self.level.1));
        }
        for b in &self.blocks {
            if !b.is_hermitian(tol.eq_tol) {
                return Ok(false);
            }
            if !numerics::is_psd(b, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Smallest per-block eigenvalue; the PSD margin reported in verdicts.
    pub fn min_eigenvalue(&self, tol: &Tolerances) -> Result<f64> {
        if !self.is_square_level() {
            return Err(Error::NotSquareLevel(self.level.0, self.level.1));
        }
        let mut min = f64::INFINITY;
        for b in &self.blocks {
            let defect = b.hermitian_defect();
            if defect > tol.eq_tol {
                return Err(Error::NotHermitian(defect));
            }
            min = min.min(numerics::min_eigenvalue(b, tol)?);
        }
        Ok(min)
    }

    /// The model absolute value |x| = √(x*x), landing at level (m, m).
    pub fn abs_value(&self, tol: &Tolerances) -> Result<Element> {
        let m = self.level.1;
        let mut blocks = Vec::with_capacity(self.blocks.len());
        if self.level.0 == m && self.is_hermitian(tol) {
            // Spectral route |x| = Σ|λ|vv*: squaring first would push
            // small genuine eigenvalues under the root's noise cutoff.
            for b in &self.blocks {
                blocks.push(numerics::spectral_map(
                    &b.hermitian_part(),
                    tol,
                    f64::abs,
                )?);
            }
            return Ok(Element {
                space: self.space.clone(),
                level: (m, m),
                blocks,
            });
        }
        for b in &self.blocks {
            let gram = b.adjoint().mul(b).hermitian_part();
            blocks.push(numerics::herm_sqrt(&gram, tol)?);
        }
        Ok(Element {
            space: self.space.clone(),
            level: (m, m),
            blocks,
        })
    }

    /// Direct sum x ⊛ y: blockwise diagonal assembly, levels add.
    pub fn direct_sum(&self, other: &Element) -> Result<Element> {
        let level = (self.level.0 + other.level.0, self.level.1 + other.level.1);
        self.zip_blocks(other, numerics::direct_sum, level)
    }

    /// Order-unit norm ‖y‖ = inf{ε : [εe, y; y*, εe] ⪰ 0}; in this model
    /// it is the max over summands of the largest singular value.
    pub fn order_unit_norm(&self) -> f64 {
        self.blocks.iter().map(numerics::op_norm).fold(0.0, f64::max)
    }

    /// Independent route to the order-unit norm: bisection over the
    /// block-PSD feasibility predicate ε ↦ [εe, y; y*, εe] ⪰ 0.
    pub fn order_unit_norm_bisect(&self, tol: &Tolerances, abs_err: f64) -> Result<f64> {
        let feasible = |eps: f64| -> Result<bool> {
            for b in &self.blocks {
                let el = ComplexMatrix::identity(b.rows()).scale(eps);
                let em = ComplexMatrix::identity(b.cols()).scale(eps);
                let cert = numerics::assemble([[Some(&el), Some(b)], [Some(&b.adjoint()), Some(&em)]])?;
                if !numerics::is_psd(&cert, tol)? {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        let mut hi = 1.0f64.max(2.0 * self.blocks.iter().map(|b| b.frobenius_norm()).fold(0.0, f64::max));
        while !feasible(hi)? {
            hi *= 2.0;
            if hi > 1e12 {
                return Err(Error::PreconditionFailed("norm bisection diverged".into()));
            }
        }
        let mut lo = 0.0f64;
        while hi - lo > abs_err {
            let mid = 0.5 * (lo + hi);
            if feasible(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// Jordan decomposition x = pos − neg with pos·neg = 0 and
    /// |x| = pos + neg, via per-block spectral calculus.
    pub fn jordan_parts(&self, tol: &Tolerances) -> Result<(Element, Element)> {
        if !self.is_hermitian(tol) {
            let defect = self
                .blocks
                .iter()
                .map(|b| if b.rows() == b.cols() { b.hermitian_defect() } else { f64::INFINITY })
                .fold(0.0, f64::max);
            return Err(Error::NotHermitian(defect));
        }
        let mut pos_blocks = Vec::with_capacity(self.blocks.len());
        let mut neg_blocks = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let (values, vectors) = numerics::herm_eig(b, tol)?;
            let n = b.rows();
            let mut pos = ComplexMatrix::zeros(n, n);
            let mut neg = ComplexMatrix::zeros(n, n);
            for k in 0..n {
                let v = values[k];
                let (target, w) = if v >= 0.0 { (&mut pos, v) } else { (&mut neg, -v) };
                if w == 0.0 {
                    continue;
                }
                for i in 0..n {
                    let vik = vectors.get(i, k);
                    for j in 0..n {
                        let x = target.get(i, j) + vik * vectors.get(j, k).conj() * w;
                        target.set(i, j, x);
                    }
                }
            }
            pos_blocks.push(pos.hermitian_part());
            neg_blocks.push(neg.hermitian_part());
        }
        let pos = Element {
            space: self.space.clone(),
            level: self.level,
            blocks: pos_blocks,
        };
        let neg = Element {
            space: self.space.clone(),
            level: self.level,
            blocks: neg_blocks,
        };
        Ok((pos, neg))
    }

    /// Amplification x^l = I_l ⊗ x of a level-1 element.
    pub fn amplify(&self, l: usize) -> Result<Element> {
        if self.level != (1, 1) {
            return Err(Error::PreconditionFailed(
                "amplification is defined on level-1 elements".into(),
            ));
        }
        let il = ComplexMatrix::identity(l);
        Ok(self.map_blocks(|b| il.kron(b), (l, l)))
    }

    /// Reinterpret a square-level element of X as a level-1 element of the
    /// amplified space ⊕ᵢ M_{l·nᵢ}.
    pub fn reinterpret_level1(&self) -> Result<Element> {
        if !self.is_square_level() {
            return Err(Error::NotSquareLevel(self.level.0, self.level.1));
        }
        let l = self.level.0;
        let space = SpaceSpec::new(self.space.summands.iter().map(|&n| l * n).collect())?;
        Ok(Element {
            space,
            level: (1, 1),
            blocks: self.blocks.clone(),
        })
    }

    pub fn approx_eq(&self, other: &Element, tol: f64) -> bool {
        self.space == other.space
            && self.level == other.level
            && self
                .blocks
                .iter()
                .zip(&other.blocks)
                .all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(|b| b.max_abs()).fold(0.0, f64::max)
    }

    pub fn to_wire(&self) -> ElementWire {
        ElementWire {
            level: [self.level.0, self.level.1],
            blocks: self.blocks.clone(),
        }
    }

    pub fn from_wire(space: &SpaceSpec, wire: ElementWire) -> Result<Element> {
        Element::new(space.clone(), (wire.level[0], wire.level[1]), wire.blocks)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_wire()).expect("element wire form is serializable")
    }

    pub fn from_json(space: &SpaceSpec, value: &serde_json::Value) -> Result<Element> {
        let wire: ElementWire =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        Element::from_wire(space, wire)
    }
}

/// Side of a scalar bimodule action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Scalar action ς·x (left) or x·ς (right): blockwise (ς ⊗ Iₙ)·block.
///
/// A left ς ∈ M_{p,l} takes level (l,m) to (p,m); a right ς ∈ M_{m,q}
/// takes it to (l,q).
pub fn scalar_act(scalar: &ComplexMatrix, x: &Element, side: Side) -> Result<Element> {
    let (l, m) = x.level();
    match side {
        Side::Left => {
            if scalar.cols() != l {
                return Err(Error::ShapeMismatch(format!(
                    "left scalar is {}x{} but element level rows = {l}",
                    scalar.rows(),
                    scalar.cols()
                )));
            }
            let p = scalar.rows();
            let blocks = x
                .space()
                .summands
                .iter()
                .zip(x.blocks())
                .map(|(&n, b)| scalar.kron(&ComplexMatrix::identity(n)).mul(b))
                .collect();
            Element::new(x.space().clone(), (p, m), blocks)
        }
        Side::Right => {
            if scalar.rows() != m {
                return Err(Error::ShapeMismatch(format!(
                    "right scalar is {}x{} but element level cols = {m}",
                    scalar.rows(),
                    scalar.cols()
                )));
            }
            let q = scalar.cols();
            let blocks = x
                .space()
                .summands
                .iter()
                .zip(x.blocks())
                .map(|(&n, b)| b.mul(&scalar.kron(&ComplexMatrix::identity(n))))
                .collect();
            Element::new(x.space().clone(), (l, q), blocks)
        }
    }
}

/// Block assembly [a b; c d] of four optional elements over one space.
pub fn assemble_element(
    blocks: [[Option<&Element>; 2]; 2],
) -> Result<Element> {
    let probe = blocks
        .iter()
        .flatten()
        .flatten()
        .next()
        .ok_or_else(|| Error::ShapeMismatch("all assembly blocks absent".into()))?;
    let space = probe.space().clone();
    for e in blocks.iter().flatten().flatten() {
        if *e.space() != space {
            return Err(Error::SpaceMismatch);
        }
    }
    let rows0 = blocks[0][0].or(blocks[0][1]).map(|e| e.level().0);
    let rows1 = blocks[1][0].or(blocks[1][1]).map(|e| e.level().0);
    let cols0 = blocks[0][0].or(blocks[1][0]).map(|e| e.level().1);
    let cols1 = blocks[0][1].or(blocks[1][1]).map(|e| e.level().1);
    let (rows0, rows1, cols0, cols1) = (
        rows0.ok_or_else(|| Error::ShapeMismatch("assembly row 0 absent".into()))?,
        rows1.ok_or_else(|| Error::ShapeMismatch("assembly row 1 absent".into()))?,
        cols0.ok_or_else(|| Error::ShapeMismatch("assembly column 0 absent".into()))?,
        cols1.ok_or_else(|| Error::ShapeMismatch("assembly column 1 absent".into()))?,
    );
    for (r, heights) in [(0usize, rows0), (1, rows1)] {
        for (c, widths) in [(0usize, cols0), (1, cols1)] {
            if let Some(e) = blocks[r][c] {
                if e.level() != (heights, widths) {
                    return Err(Error::ShapeMismatch(format!(
                        "assembly block ({r},{c}) has level {:?}, expected ({heights},{widths})",
                        e.level()
                    )));
                }
            }
        }
    }
    let level = (rows0 + rows1, cols0 + cols1);
    let mut out_blocks = Vec::with_capacity(space.summand_count());
    for (idx, &n) in space.summands.iter().enumerate() {
        let mut out = ComplexMatrix::zeros(level.0 * n, level.1 * n);
        for (r, row_off) in [(0usize, 0usize), (1, rows0 * n)] {
            for (c, col_off) in [(0usize, 0usize), (1, cols0 * n)] {
                if let Some(e) = blocks[r][c] {
                    out.insert_block(row_off, col_off, e.block(idx));
                }
            }
        }
        out_blocks.push(out);
    }
    Element::new(space, level, out_blocks)
}

/// Certificate matrix [d0 y; y* d1] used all over the block lemmas.
pub fn block_certificate(diag0: &Element, y: &Element, diag1: &Element) -> Result<Element> {
    let y_adj = y.adjoint();
    assemble_element([[Some(diag0), Some(y)], [Some(&y_adj), Some(diag1)]])
}

/// Orthogonality of positives: |a − b| = a + b, cross-checked against the
/// matrix-model ground truth a·b = 0.
pub fn orthogonal(a: &Element, b: &Element, tol: &Tolerances) -> Result<bool> {
    if !a.is_positive(tol)? || !b.is_positive(tol)? {
        return Err(Error::NotPositive);
    }
    if a.level() != b.level() {
        return Err(Error::ShapeMismatch("orthogonality needs equal levels".into()));
    }
    let diff_abs = a.sub(b)?.abs_value(tol)?;
    let sum = a.add(b)?;
    let scale = 1.0 + sum.max_abs();
    let abs_route = diff_abs.approx_eq(&sum, tol.eq_tol * scale);
    let product_route = a.mul(b)?.max_abs() <= tol.eq_tol * scale * scale;
    if abs_route != product_route {
        return Err(Error::PreconditionFailed(format!(
            "orthogonality oracles disagree (abs route {abs_route}, product route {product_route})"
        )));
    }
    Ok(abs_route)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn m2() -> SpaceSpec {
        SpaceSpec::new(vec![2]).unwrap()
    }

    fn m21() -> SpaceSpec {
        SpaceSpec::new(vec![2, 1]).unwrap()
    }

    fn e12() -> Element {
        Element::new(
            m2(),
            (1, 1),
            vec![ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0])],
        )
        .unwrap()
    }

    #[test]
    fn construction_validates_shapes() {
        assert!(Element::new(m2(), (1, 1), vec![ComplexMatrix::identity(3)]).is_err());
        assert!(Element::new(m21(), (1, 1), vec![ComplexMatrix::identity(2)]).is_err());
        assert!(Element::new(m2(), (0, 1), vec![ComplexMatrix::identity(2)]).is_err());
        assert!(SpaceSpec::new(vec![]).is_err());
        assert!(SpaceSpec::new(vec![2, 0]).is_err());
    }

    #[test]
    fn abs_of_shift_unit() {
        // |e12| = sqrt(e21 e12) = diag(0, 1).
        let abs = e12().abs_value(&tol()).unwrap();
        let expected = Element::new(
            m2(),
            (1, 1),
            vec![ComplexMatrix::diag_real(&[0.0, 1.0])],
        )
        .unwrap();
        assert!(abs.approx_eq(&expected, 1e-12));
    }

    #[test]
    fn norm_matches_bisection_oracle() {
        let y = Element::new(
            m21(),
            (1, 2),
            vec![
                ComplexMatrix::from_real(2, 4, &[0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]),
                ComplexMatrix::from_real(1, 2, &[3.0, 0.0]),
            ],
        )
        .unwrap();
        assert!((y.order_unit_norm() - 3.0).abs() < 1e-12);
        let bis = y.order_unit_norm_bisect(&tol(), 1e-8).unwrap();
        assert!((bis - 3.0).abs() < 1e-6);
    }

    #[test]
    fn jordan_of_indefinite_diagonal() {
        let x = Element::new(
            m2(),
            (1, 1),
            vec![ComplexMatrix::diag_real(&[1.0, -2.0])],
        )
        .unwrap();
        let (pos, neg) = x.jordan_parts(&tol()).unwrap();
        assert!(pos.block(0).approx_eq(&ComplexMatrix::diag_real(&[1.0, 0.0]), 1e-12));
        assert!(neg.block(0).approx_eq(&ComplexMatrix::diag_real(&[0.0, 2.0]), 1e-12));
        let abs = x.abs_value(&tol()).unwrap();
        assert!(abs.approx_eq(&pos.add(&neg).unwrap(), 1e-12));
    }

    #[test]
    fn amplify_and_reinterpret() {
        let x = e12();
        let x2 = x.amplify(2).unwrap();
        assert_eq!(x2.level(), (2, 2));
        assert_eq!(x2.block(0).get(2, 3), Complex64::new(1.0, 0.0));
        assert_eq!(x2.block(0).get(0, 3), Complex64::new(0.0, 0.0));
        let flat = x2.reinterpret_level1().unwrap();
        assert_eq!(flat.space().summands, vec![4]);
        assert_eq!(flat.level(), (1, 1));
    }

    #[test]
    fn scalar_action_compresses_levels() {
        // Left action by the row (1 0) picks the first grid row.
        let x = Element::order_unit(&m2(), 2);
        let s = ComplexMatrix::from_real(1, 2, &[1.0, 0.0]);
        let y = scalar_act(&s, &x, Side::Left).unwrap();
        assert_eq!(y.level(), (1, 2));
        assert_eq!(y.block(0).get(0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(y.block(0).get(0, 2), Complex64::new(0.0, 0.0));
        let z = scalar_act(&s.adjoint(), &y, Side::Right).unwrap();
        assert_eq!(z.level(), (1, 1));
        assert!(z.approx_eq(&Element::order_unit(&m2(), 1), 1e-12));
    }

    #[test]
    fn orthogonality_routes_agree() {
        let a = Element::new(m2(), (1, 1), vec![ComplexMatrix::diag_real(&[1.0, 0.0])]).unwrap();
        let b = Element::new(m2(), (1, 1), vec![ComplexMatrix::diag_real(&[0.0, 2.0])]).unwrap();
        assert!(orthogonal(&a, &b, &tol()).unwrap());
        assert!(!orthogonal(&a, &a, &tol()).unwrap());
        assert!(orthogonal(&a, &e12(), &tol()).is_err()); // e12 not positive
    }

    #[test]
    fn block_certificate_detects_norm() {
        // [εe, y; y*, εe] is PSD exactly when ε ≥ ‖y‖.
        let y = e12();
        let e = Element::order_unit(&m2(), 1);
        let above = block_certificate(&e.scale(1.0 + 1e-6), &y, &e.scale(1.0 + 1e-6)).unwrap();
        assert!(above.is_positive(&tol()).unwrap());
        let below = block_certificate(&e.scale(0.9), &y, &e.scale(0.9)).unwrap();
        assert!(!below.is_positive(&tol()).unwrap());
    }

    #[test]
    fn assemble_element_places_blocks() {
        let y = e12();
        let e = Element::order_unit(&m2(), 1);
        let c = assemble_element([[Some(&e), Some(&y)], [Some(&y.adjoint()), Some(&e)]]).unwrap();
        assert_eq!(c.level(), (2, 2));
        assert_eq!(c.block(0).get(0, 3), Complex64::new(1.0, 0.0));
        assert_eq!(c.block(0).get(3, 0), Complex64::new(1.0, 0.0));
        assert!(assemble_element([[None, None], [None, None]]).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let x = Element::new(
            m21(),
            (1, 2),
            vec![
                ComplexMatrix::from_fn(2, 4, |i, j| Complex64::new(i as f64, j as f64)),
                ComplexMatrix::from_real(1, 2, &[7.0, 0.0]),
            ],
        )
        .unwrap();
        let json = x.to_json();
        let back = Element::from_json(&m21(), &json).unwrap();
        assert!(x.approx_eq(&back, 0.0));
        // Wrong space rejects.
        assert!(Element::from_json(&m2(), &json).is_err());
    }

    #[test]
    fn direct_sum_stacks_levels() {
        let x = e12();
        let s = x.direct_sum(&x.adjoint()).unwrap();
        assert_eq!(s.level(), (2, 2));
        let abs = s.abs_value(&tol()).unwrap();
        assert!(abs.approx_eq(
            &x.abs_value(&tol())
                .unwrap()
                .direct_sum(&x.adjoint().abs_value(&tol()).unwrap())
                .unwrap(),
            1e-12
        ));
    }

    #[test]
    fn positivity_and_min_eigenvalue() {
        let x = Element::new(
            m21(),
            (1, 1),
            vec![ComplexMatrix::diag_real(&[1.0, 0.5]), ComplexMatrix::diag_real(&[-0.25])],
        )
        .unwrap();
        assert!(!x.is_positive(&tol()).unwrap());
        assert!((x.min_eigenvalue(&tol()).unwrap() + 0.25).abs() < 1e-12);
        assert!(!e12().is_positive(&tol()).unwrap());
    }
}
