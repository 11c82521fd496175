//! Seed-deterministic random generators for elements, unitaries, order
//! projections and partial isometries. Complex entries have independent
//! standard normal real and imaginary parts; every suite derives
//! per-sample sub-seeds so sampling can be sharded order-independently.

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::numerics::{self, ComplexMatrix, Tolerances};
use crate::space::{Element, SpaceSpec};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stable sub-seed for sample `index` of the suite named `tag`.
pub fn sub_seed(seed: u64, tag: &str, index: u64) -> u64 {
    // FNV-1a over (seed, tag, index); cheap and stable across platforms.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |byte: u8| {
        h ^= byte as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    };
    for b in seed.to_le_bytes() {
        eat(b);
    }
    for b in tag.as_bytes() {
        eat(*b);
    }
    for b in index.to_le_bytes() {
        eat(b);
    }
    h
}

/// Standard normal via Box-Muller; deterministic given the RNG stream.
pub fn standard_normal(rng: &mut impl RngCore) -> f64 {
    let u1: f64 = loop {
        let u: f64 = rng.gen();
        if u > 1e-300 {
            break u;
        }
    };
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn complex_normal(rng: &mut impl RngCore) -> Complex64 {
    Complex64::new(standard_normal(rng), standard_normal(rng))
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut impl RngCore) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

pub fn random_hermitian_matrix(n: usize, rng: &mut impl RngCore) -> ComplexMatrix {
    random_matrix(n, n, rng).hermitian_part()
}

/// Deterministic random unitary: eigenvectors of a random Hermitian.
pub fn random_unitary(n: usize, rng: &mut impl RngCore) -> ComplexMatrix {
    let h = random_hermitian_matrix(n, rng);
    let (_, v) = numerics::herm_eig(&h, &Tolerances::default()).expect("random Hermitian eig");
    v
}

/// First `cols` columns of a random unitary: an isometry ς with ς*ς = I.
pub fn random_isometry(rows: usize, cols: usize, rng: &mut impl RngCore) -> ComplexMatrix {
    assert!(rows >= cols);
    let u = random_unitary(rows, rng);
    u.extract_block(0, 0, rows, cols)
}

pub fn random_element(space: &SpaceSpec, l: usize, m: usize, rng: &mut impl RngCore) -> Element {
    let blocks = space
        .summands
        .iter()
        .map(|&n| random_matrix(l * n, m * n, rng))
        .collect();
    Element::new(space.clone(), (l, m), blocks).expect("sampled shapes are consistent")
}

pub fn random_hermitian(space: &SpaceSpec, l: usize, rng: &mut impl RngCore) -> Element {
    let x = random_element(space, l, l, rng);
    x.hermitian_part().expect("square level")
}

/// Random positive element x*x, normalized to unit order-unit norm.
pub fn random_positive_unit(space: &SpaceSpec, l: usize, rng: &mut impl RngCore) -> Element {
    let g = random_element(space, l, l, rng);
    let p = g.adjoint().mul(&g).expect("level conformable");
    let norm = p.order_unit_norm();
    if norm > 0.0 {
        p.scale(1.0 / norm)
    } else {
        p
    }
}

/// Random positive element with 0 ≤ x ≤ e^l: a random Hermitian squeezed
/// through the spectral map λ ↦ (1 + tanh λ)/2 would do, but conjugating a
/// uniform diagonal by a random unitary keeps the spectrum explicit.
pub fn random_contraction_positive(space: &SpaceSpec, l: usize, rng: &mut impl RngCore) -> Element {
    let blocks = space
        .summands
        .iter()
        .map(|&n| {
            let dim = l * n;
            let u = random_unitary(dim, rng);
            let d = ComplexMatrix::diag_real(
                &(0..dim).map(|_| rng.gen::<f64>()).collect::<Vec<_>>(),
            );
            u.mul(&d).mul(&u.adjoint()).hermitian_part()
        })
        .collect();
    Element::new(space.clone(), (l, l), blocks).expect("sampled shapes are consistent")
}

/// Random order projection at level l: per block, a random unitary
/// conjugating a random 0/1 diagonal.
pub fn random_order_projection(space: &SpaceSpec, l: usize, rng: &mut impl RngCore) -> Element {
    let blocks = space
        .summands
        .iter()
        .map(|&n| {
            let dim = l * n;
            let u = random_unitary(dim, rng);
            let d = ComplexMatrix::diag_real(
                &(0..dim)
                    .map(|_| if rng.gen::<bool>() { 1.0 } else { 0.0 })
                    .collect::<Vec<_>>(),
            );
            u.mul(&d).mul(&u.adjoint()).hermitian_part()
        })
        .collect();
    Element::new(space.clone(), (l, l), blocks).expect("sampled shapes are consistent")
}

/// Random nonzero order projection (resamples on the zero draw).
pub fn random_nonzero_order_projection(
    space: &SpaceSpec,
    l: usize,
    rng: &mut impl RngCore,
) -> Element {
    loop {
        let p = random_order_projection(space, l, rng);
        if p.order_unit_norm() > 0.5 {
            return p;
        }
    }
}

/// Random partial isometry at level (l, m): per block, random matrix with
/// singular values snapped to {0, 1} at threshold 1/2.
pub fn random_partial_isometry(
    space: &SpaceSpec,
    l: usize,
    m: usize,
    rng: &mut impl RngCore,
) -> Element {
    let tol = Tolerances::default();
    let blocks = space
        .summands
        .iter()
        .map(|&n| {
            let a = random_matrix(l * n, m * n, rng);
            snap_to_partial_isometry(&a, &tol)
        })
        .collect();
    Element::new(space.clone(), (l, m), blocks).expect("sampled shapes are consistent")
}

/// Replace singular values by 1 (above 1/2) or 0 (below): v = Σ uᵢvᵢ*.
pub fn snap_to_partial_isometry(a: &ComplexMatrix, tol: &Tolerances) -> ComplexMatrix {
    let gram = a.adjoint().mul(a).hermitian_part();
    let (values, vectors) = numerics::herm_eig(&gram, tol).expect("gram eig");
    let mut out = ComplexMatrix::zeros(a.rows(), a.cols());
    for (k, &lam) in values.iter().enumerate() {
        let sigma = lam.max(0.0).sqrt();
        if sigma <= 0.5 {
            continue;
        }
        // u_k = a v_k / sigma
        let vk = vectors.extract_block(0, k, vectors.rows(), 1);
        let uk = a.mul(&vk).scale(1.0 / sigma);
        out = out.add(&uk.mul(&vk.adjoint()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Tolerances;
    use crate::oup::is_order_projection;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn m21() -> SpaceSpec {
        SpaceSpec::new(vec![2, 1]).unwrap()
    }

    #[test]
    fn seeding_is_deterministic() {
        let mut a = rng_from_seed(sub_seed(7, "tag", 3));
        let mut b = rng_from_seed(sub_seed(7, "tag", 3));
        let x = random_element(&m21(), 2, 1, &mut a);
        let y = random_element(&m21(), 2, 1, &mut b);
        assert!(x.approx_eq(&y, 0.0));
        let mut c = rng_from_seed(sub_seed(7, "tag", 4));
        let z = random_element(&m21(), 2, 1, &mut c);
        assert!(!x.approx_eq(&z, 1e-12));
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = rng_from_seed(1);
        for n in 1..=5 {
            let u = random_unitary(n, &mut rng);
            let gram = u.adjoint().mul(&u);
            assert!(gram.approx_eq(&ComplexMatrix::identity(n), 1e-12));
        }
    }

    #[test]
    fn isometry_has_orthonormal_columns() {
        let mut rng = rng_from_seed(2);
        let v = random_isometry(5, 2, &mut rng);
        let gram = v.adjoint().mul(&v);
        assert!(gram.approx_eq(&ComplexMatrix::identity(2), 1e-12));
    }

    #[test]
    fn positive_unit_has_norm_one() {
        let mut rng = rng_from_seed(3);
        for _ in 0..20 {
            let x = random_positive_unit(&m21(), 1, &mut rng);
            assert!(x.is_positive(&tol()).unwrap());
            assert!((x.order_unit_norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_projections_are_projections() {
        let mut rng = rng_from_seed(4);
        for _ in 0..20 {
            let p = random_order_projection(&m21(), 1, &mut rng);
            assert!(is_order_projection(&p, &tol()).unwrap());
        }
    }

    #[test]
    fn sampled_partial_isometries_are_partial_isometries() {
        let mut rng = rng_from_seed(5);
        for _ in 0..20 {
            let v = random_partial_isometry(&m21(), 1, 1, &mut rng);
            // v v* v = v is the defining identity.
            let vvv = v.mul(&v.adjoint()).unwrap().mul(&v).unwrap();
            assert!(vvv.approx_eq(&v, 1e-10));
        }
    }

    #[test]
    fn contraction_positive_stays_inside_unit_interval() {
        let mut rng = rng_from_seed(6);
        for _ in 0..20 {
            let x = random_contraction_positive(&m21(), 1, &mut rng);
            assert!(x.is_positive(&tol()).unwrap());
            let gap = Element::order_unit(&m21(), 1).sub(&x).unwrap();
            assert!(gap.min_eigenvalue(&tol()).unwrap() > -1e-12);
        }
    }
}
