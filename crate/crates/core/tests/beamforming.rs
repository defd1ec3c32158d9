use std::f64::consts::PI;

use broadbeam_core::beamforming::{
    dbf_weights, ostbc_matrix, radiated_power_pattern, random_phase_weights, slot_precoder,
    slot_weights, steering_vector, two_antenna_pair, DualPolWeights, OstbcMatrix, PrecoderKind,
};
use broadbeam_core::linalg::CMatrix;
use broadbeam_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LAM: f64 = 0.115_304_791_538_461_54;

fn unit(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))
}

#[test]
fn broad_beams_are_flat() {
    for k in [1, 2, 4, 8, 16] {
        let w = dbf_weights(k).unwrap();
        assert!(w.is_unit_modulus());
        let target = 2.0 * k as f64;
        for it in 0..19 {
            let theta = (-90.0 + 10.0 * it as f64).to_radians();
            for ip in 0..3601 {
                let phi = (-180.0 + 0.1 * ip as f64).to_radians();
                let p = radiated_power_pattern(&w, LAM / 2.0, LAM, phi, theta, 1.0);
                assert!((p - target).abs() / target < 1e-9, "K={k}");
            }
        }
    }
}

#[test]
fn flat_for_any_spacing_and_gain() {
    let w = dbf_weights(8).unwrap();
    for spacing in [0.01, 0.06, 0.3, 1.7] {
        for ip in 0..721 {
            let phi = (ip as f64 * 0.5).to_radians();
            let p = radiated_power_pattern(&w, spacing, LAM, phi, 0.2, 2.5);
            assert!((p - 40.0).abs() < 1e-9);
        }
    }
}

#[test]
fn uniform_weights_have_a_null() {
    let ones = vec![Complex64::new(1.0, 0.0); 2];
    let w = DualPolWeights::new(ones.clone(), ones).unwrap();
    assert!(radiated_power_pattern(&w, LAM / 2.0, LAM, PI / 2.0, 0.0, 1.0) < 1e-28);
    let zero = vec![Complex64::new(0.0, 0.0); 4];
    let z = DualPolWeights::new(zero.clone(), zero).unwrap();
    assert_eq!(
        radiated_power_pattern(&z, LAM / 2.0, LAM, 0.3, 0.1, 1.0),
        0.0
    );
}

#[test]
fn pair_outputs_are_orthogonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1000 {
        let w = two_antenna_pair(unit(&mut rng), unit(&mut rng)).unwrap();
        for _ in 0..100 {
            let phi = rng.random_range(-PI..PI);
            let theta = rng.random_range(-PI / 2.0..PI / 2.0);
            let a = steering_vector(2, LAM / 2.0, LAM, phi, theta);
            // e_χ = [aᵀw_V, aᵀw_H] seen from antenna χ
            let e1 = [a.0[0] * w.w_v[0], a.0[0] * w.w_h[0]];
            let e2 = [a.0[1] * w.w_v[1], a.0[1] * w.w_h[1]];
            let inner = e1[0].conj() * e2[0] + e1[1].conj() * e2[1];
            assert!(inner.norm() < 1e-12);
            let p = radiated_power_pattern(&w, LAM / 2.0, LAM, phi, theta, 1.0);
            assert!((p - 4.0).abs() < 1e-12);
        }
    }
}

#[test]
fn precoder_preserves_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (t, l, kind) in [
        (4, 4, PrecoderKind::Hadamard),
        (4, 4, PrecoderKind::Dft),
        (8, 3, PrecoderKind::Hadamard),
        (7, 5, PrecoderKind::Dft),
        (1, 1, PrecoderKind::Dft),
    ] {
        let phi = slot_precoder(t, l, kind).unwrap();
        let gram = phi.matrix().adjoint().matmul(phi.matrix());
        assert!(gram.max_abs_diff(&CMatrix::identity(l)) < 1e-12);
        for _ in 0..1000 {
            let c: Vec<Complex64> = (0..l)
                .map(|_| Complex64::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)))
                .collect();
            let lhs: f64 = phi.matrix().mul_vec(&c).iter().map(|z| z.norm_sqr()).sum();
            let rhs: f64 = c.iter().map(|z| z.norm_sqr()).sum();
            assert!((lhs - rhs).abs() <= 1e-12 * rhs);
        }
    }
    assert!(slot_precoder(2, 3, PrecoderKind::Dft).is_err());
}

#[test]
fn slot_energy_adds_up_to_base_energy() {
    let base = vec![dbf_weights(2).unwrap(); 4];
    for kind in [PrecoderKind::Hadamard, PrecoderKind::Dft] {
        let phi = slot_precoder(4, 4, kind).unwrap();
        for l in 0..4 {
            let e: f64 = (0..4)
                .map(|t| slot_weights(&base, &phi, t, l).unwrap().energy())
                .sum();
            assert!((e - base[l].energy()).abs() < 1e-12);
        }
        assert!(slot_weights(&base, &phi, 4, 0).is_err());
        assert!(slot_weights(&base, &phi, 0, 4).is_err());
    }
    let id = slot_precoder(4, 4, PrecoderKind::Hadamard).unwrap();
    for t in 0..4 {
        assert!((slot_weights(&base, &id, t, 0).unwrap().w_v[0].norm() - 0.5).abs() < 1e-15);
    }
}

#[test]
fn ostbc_choice_does_not_matter() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for k in [1, 2, 4, 8] {
        let a = ostbc_matrix(k).unwrap();
        let b = OstbcMatrix::hadamard(k).unwrap();
        for w in [&a, &b] {
            let m = w.matrix();
            assert!(m.matmul(&m.adjoint()).max_abs_diff(&CMatrix::identity(k)) < 1e-12);
        }
        for _ in 0..200 {
            let g: Vec<Complex64> = (0..k)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let norm: f64 = g.iter().map(|z| z.norm_sqr()).sum();
            for w in [&a, &b] {
                let gw: f64 = (0..k)
                    .map(|s| {
                        w.slot(s)
                            .iter()
                            .zip(&g)
                            .map(|(x, y)| x * y)
                            .sum::<Complex64>()
                            .norm_sqr()
                    })
                    .sum();
                assert!((gw - norm).abs() <= 1e-12 * norm);
            }
        }
    }
}

#[test]
fn random_phase_baseline() {
    let w = random_phase_weights(8, 99);
    assert_eq!(w, random_phase_weights(8, 99));
    assert_ne!(w, random_phase_weights(8, 100));
    assert!(w
        .w_v
        .iter()
        .chain(&w.w_h)
        .all(|z| (z.norm() - 1.0).abs() < 1e-12));
}

proptest! {
    #[test]
    fn doubling_keeps_flatness(exp in 0u32..6, phi in -PI..PI, theta in -PI / 2.0..PI / 2.0, spacing in 0.01..0.5f64) {
        let k = 1usize << exp;
        let w = dbf_weights(k).unwrap();
        let p = radiated_power_pattern(&w, spacing, LAM, phi, theta, 1.0);
        prop_assert!((p - 2.0 * k as f64).abs() / (2.0 * k as f64) < 1e-9);
    }

    #[test]
    fn non_powers_of_two_are_rejected(k in 3usize..1000) {
        prop_assume!(!k.is_power_of_two());
        prop_assert!(dbf_weights(k).is_err());
    }
}
