use std::f64::consts::PI;

use mflow_core::contraction::{contract_point, same_fiber, same_normal_form, star_action};
use mflow_core::flow::{integrate_flow, vfield_power, FlowConfig};
use mflow_core::gt::{gt_pattern, random_orbit_point, OrbitFunction};
use mflow_core::matrix::{
    eig_hermitian, eigenvalues_hermitian, max_norm, momentum_right, polar_decompose, random_complex, random_hermitian,
    random_sl, random_special_unitary, random_unitary, section_sqrt, CMat,
};
use mflow_core::polygon::{bend, build_polygon, diagonal_lengths, fan_feasible, Triangulation, Vec3};
use mflow_core::{Complex64, ComplexMatrix, CotangentPoint, HermitianMatrix, Spectrum, Tolerances, UnitaryMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn diag(values: &[f64]) -> CMat {
    CMat::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&x| Complex64::new(x, 0.0)),
    ))
}

/// Differences of squared singular values, `σ_1² - σ_k²`.
fn gaps(b: &ComplexMatrix) -> Vec<f64> {
    let s = eigenvalues_hermitian(&momentum_right(b, false));
    s.iter().map(|x| s[0] - x).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eig_and_polar_reconstruct(seed in any::<u64>(), n in 1usize..=8) {
        let mut rng = rng(seed);
        let tol = Tolerances::default();
        let a = random_hermitian(n, &mut rng);
        let (w, u) = eig_hermitian(&a);
        let back = u.as_mat() * diag(w.values()) * u.as_mat().adjoint();
        prop_assert!(max_norm(&(back - a.as_mat())) <= tol.eig * a.spectral_norm().max(1.0));
        prop_assert!(w.values().windows(2).all(|p| p[0] >= p[1]));
        // Bit-identical on repeat.
        prop_assert_eq!(eig_hermitian(&a), (w, u));

        let b = random_complex(n, &mut rng);
        let (u, p) = polar_decompose(&b);
        let scale = b.frobenius_norm();
        prop_assert!(max_norm(&(u.as_mat() * p.as_mat() - b.as_mat())) <= tol.polar * scale);
        prop_assert!(eigenvalues_hermitian(&p).iter().all(|&x| x >= -tol.psd * scale));
    }

    #[test]
    fn section_inverts_momentum(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = rng(seed);
        let b = random_complex(n, &mut rng);
        let h = momentum_right(&b, false);
        let s = section_sqrt(&h).unwrap();
        let back = momentum_right(&s, false);
        prop_assert!(max_norm(&(back.as_mat() - h.as_mat())) < 1e-9 * (1.0 + h.spectral_norm()));
    }

    #[test]
    fn contraction_fibers_form_equivalence_classes(seed in any::<u64>(), n in 2usize..=4) {
        let mut rng = rng(seed);
        let q = random_unitary(n, &mut rng);
        // Two eigenvalue blocks when n > 2.
        let values: Vec<f64> = (0..n).map(|i| if i < n / 2 { 2.0 } else { -1.0 }).collect();
        let v = HermitianMatrix::new(ComplexMatrix::new(q.as_mat() * diag(&values) * q.as_mat().adjoint()).unwrap()).unwrap();
        let k = random_unitary(n, &mut rng);
        let in_fiber = |rng: &mut ChaCha8Rng| {
            let mut r = CMat::zeros(n, n);
            let split = n / 2;
            for (lo, len) in [(0, split), (split, n - split)] {
                if len > 0 {
                    r.view_mut((lo, lo), (len, len)).copy_from(random_special_unitary(len, rng).as_mat());
                }
            }
            let k2 = UnitaryMatrix::new(ComplexMatrix::new(k.as_mat() * q.as_mat() * r * q.as_mat().adjoint()).unwrap()).unwrap();
            CotangentPoint::new(k2, v.clone()).unwrap()
        };
        let mut points: Vec<CotangentPoint> = (0..3).map(|_| in_fiber(&mut rng)).collect();
        points.push(CotangentPoint::new(random_unitary(n, &mut rng), v.clone()).unwrap());
        let tol = 1e-9;
        for x in &points {
            prop_assert!(same_fiber(x, x, tol));
            for y in &points {
                let related = same_fiber(x, y, tol);
                prop_assert_eq!(related, same_fiber(y, x, tol));
                prop_assert_eq!(related, same_normal_form(&contract_point(x), &contract_point(y), tol));
                for z in &points {
                    if related && same_fiber(y, z, tol) {
                        prop_assert!(same_fiber(x, z, 3.0 * tol));
                    }
                }
            }
        }
        prop_assert!(same_fiber(&points[0], &points[2], tol));
        prop_assert!(!same_fiber(&points[0], &points[3], tol));
    }

    #[test]
    fn star_action_is_a_torus_action(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = rng(seed);
        let mut x = 0.0;
        let values: Vec<f64> = (0..n).map(|_| { x -= rng.gen_range(0.5..2.0); x }).collect();
        let a = random_orbit_point(&Spectrum::new(values).unwrap(), rng.gen());
        let level = rng.gen_range(1..n);
        let t1: Vec<f64> = (0..level).map(|_| rng.gen_range(-PI..PI)).collect();
        let t2: Vec<f64> = (0..level).map(|_| rng.gen_range(-PI..PI)).collect();
        let sum: Vec<f64> = t1.iter().zip(&t2).map(|(a, b)| a + b).collect();
        let twice = star_action(&star_action(&a, level, &t1).unwrap(), level, &t2).unwrap();
        let once = star_action(&a, level, &sum).unwrap();
        prop_assert!(max_norm(&(twice.as_mat() - once.as_mat())) < 1e-7);
        let (p, q) = (gt_pattern(&a), gt_pattern(&once));
        for (r0, r1) in p.rows.iter().zip(&q.rows) {
            for (u, w) in r0.iter().zip(r1) {
                prop_assert!((u - w).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn gt_gradients_match_finite_differences(seed in any::<u64>(), n in 2usize..=5) {
        let mut rng = rng(seed);
        let mut x = 0.0;
        let values: Vec<f64> = (0..n).map(|_| { x -= rng.gen_range(0.5..2.0); x }).collect();
        let a = random_orbit_point(&Spectrum::new(values).unwrap(), rng.gen());
        let h = random_hermitian(n, &mut rng);
        let j = rng.gen_range(1..=n);
        let i = rng.gen_range(1..=j);
        let f = OrbitFunction::GtMomentum { i, j };
        let grad = f.gradient(&a, &Tolerances::default()).unwrap();
        let step = 1e-6;
        let shift = |s: f64| HermitianMatrix::new(ComplexMatrix::new(a.as_mat() + h.as_mat() * Complex64::new(s, 0.0)).unwrap()).unwrap();
        let fd = (f.value(&shift(step)).unwrap() - f.value(&shift(-step)).unwrap()) / (2.0 * step);
        prop_assert!((grad.pairing(&h) - fd).abs() < 1e-5, "{} vs {}", grad.pairing(&h), fd);
    }

    #[test]
    fn polygon_bending_invariants(seed in any::<u64>(), n in 4usize..=8) {
        let mut rng = rng(seed);
        let mut edges: Vec<Vec3> = (0..n - 1)
            .map(|_| Vec3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        edges.push(-edges.iter().sum::<Vec3>());
        let r: Vec<f64> = edges.iter().map(|e| e.norm()).collect();
        let mut partial = edges[0];
        let d: Vec<f64> = (1..n - 2).map(|k| { partial += edges[k]; partial.norm() }).collect();
        prop_assert!(fan_feasible(&r, &d).is_ok());
        let angles: Vec<f64> = (0..n - 3).map(|_| rng.gen_range(-PI..PI)).collect();
        let p = build_polygon(&r, &d, &angles).unwrap();
        let t = Triangulation::caterpillar(n).unwrap();
        for (x, y) in diagonal_lengths(&p, &t).iter().zip(&d) {
            prop_assert!((x - y).abs() < 1e-10);
        }
        let e = t.diagonals[rng.gen_range(0..t.diagonals.len())];
        let (a, b) = (rng.gen_range(-PI..PI), rng.gen_range(-PI..PI));
        let twice = bend(&bend(&p, &e, a).unwrap(), &e, b).unwrap();
        let once = bend(&p, &e, a + b).unwrap();
        for (x, y) in twice.edges.iter().zip(&once.edges) {
            prop_assert!((x - y).amax() < 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn flow_conserves_singular_value_gaps(seed in any::<u64>(), n in 2usize..=4) {
        let b = random_sl(n, &mut rng(seed));
        let traj = integrate_flow(&b, &FlowConfig::default()).unwrap();
        let g0 = gaps(&b);
        for s in &traj.samples {
            for (x, y) in gaps(&s.b).iter().zip(&g0) {
                prop_assert!((x - y).abs() < 1e-6, "t = {}: {x} vs {y}", s.t);
            }
        }
    }

    #[test]
    fn normalizations_agree(seed in any::<u64>(), n in 2usize..=4, scale in 0.5f64..2.0) {
        let mut rng = rng(seed);
        let b = ComplexMatrix::new(random_sl(n, &mut rng).as_mat() * Complex64::new(scale, 0.0)).unwrap();
        let end1 = integrate_flow(&b, &FlowConfig::default()).unwrap().terminal;
        for m in [2u32, 3] {
            let end = integrate_flow(&b, &FlowConfig::with_m(m)).unwrap().terminal;
            prop_assert!(max_norm(&(end.as_mat() - end1.as_mat())) < 1e-6);
            let v1 = vfield_power(&b, 1, 1, 1e-12).unwrap();
            let vm = vfield_power(&b, m, m, 1e-12).unwrap();
            prop_assert!(max_norm(&(v1.as_mat() - vm.as_mat())) < 1e-8 * (1.0 + max_norm(v1.as_mat())));
        }
    }
}
