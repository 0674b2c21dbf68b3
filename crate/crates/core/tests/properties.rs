// Structural invariants on random inputs.

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use liftkit::certificate::tangent_direction;
use liftkit::designs::{haar_ensemble, mub_maximal};
use liftkit::io::{parse_int_list, read_design, read_record, write_design, write_record};
use liftkit::linalg::{
    coords_to_herm, frobenius_inner, herm_to_coords, lift, psd_project, psd_trace_project, simplex_project,
    tangent_complement_project, tangent_project, HermMat,
};
use liftkit::measurement::{apply_a, apply_a_adjoint, measure, sample_vectors};
use liftkit::rng::{gaussian_hermitian, gaussian_reals, haar_vector, stream};
use liftkit::solver::phase_distance;
use liftkit::tensor::{ptrace_sym2_closed, ptrace_sym3_closed, ptrace_sym_bruteforce};
use liftkit::C64;

fn herm(d: usize, seed: u64, tag: u64) -> HermMat {
    gaussian_hermitian(d, &mut stream(seed, &[tag]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tangent_projector_is_an_orthogonal_projection(d in 2usize..7, seed in any::<u64>()) {
        let x = haar_vector(d, &mut stream(seed, &[0]));
        let z = herm(d, seed, 1);
        let pt = tangent_project(&x, &z).unwrap();
        let perp = tangent_complement_project(&x, &z).unwrap();
        prop_assert!(tangent_project(&x, &pt).unwrap().max_abs_diff(&pt) < 1e-12);
        prop_assert!((&pt + &perp).max_abs_diff(&z) < 1e-12);
        prop_assert!(frobenius_inner(&pt, &perp).unwrap().abs() < 1e-10);
        // X itself lies in T, and T^⊥ kills x
        prop_assert!(tangent_project(&x, &lift(&x)).unwrap().max_abs_diff(&lift(&x)) < 1e-12);
        prop_assert!(perp.apply(&x).norm() < 1e-10);
    }

    #[test]
    fn tangent_direction_rebuilds_tangent_matrices(d in 2usize..7, seed in any::<u64>()) {
        let x = haar_vector(d, &mut stream(seed, &[0]));
        let q = tangent_project(&x, &herm(d, seed, 1)).unwrap();
        let (zeta, z) = tangent_direction(&x, &q);
        let xz = x.as_dvector() * z.as_dvector().adjoint();
        let rebuilt = HermMat::from_matrix(&xz + xz.adjoint()).scale(zeta);
        prop_assert!(rebuilt.max_abs_diff(&q) < 1e-10);
    }

    #[test]
    fn psd_projections(d in 2usize..7, seed in any::<u64>(), target in 0.1f64..5.0) {
        let z = herm(d, seed, 2);
        let p = psd_project(&z);
        prop_assert!(p.min_eigenvalue() > -1e-10);
        prop_assert!(psd_project(&p).max_abs_diff(&p) < 1e-10);
        let q = psd_trace_project(&z, target);
        prop_assert!(q.min_eigenvalue() > -1e-10);
        assert_abs_diff_eq!(q.trace(), target, epsilon = 1e-10);
        // trace norm equals trace on the PSD cone
        assert_abs_diff_eq!(q.trace_norm(), q.trace(), epsilon = 1e-10);
    }

    #[test]
    fn simplex_projection_lands_on_the_simplex(vals in prop::collection::vec(-5.0f64..5.0, 1..12), target in 0.0f64..4.0) {
        let p = simplex_project(&vals, target);
        prop_assert!(p.iter().all(|&v| v >= 0.0));
        assert_abs_diff_eq!(p.iter().sum::<f64>(), target, epsilon = 1e-10);
    }

    #[test]
    fn hermitian_coordinates_are_isometric(d in 1usize..7, seed in any::<u64>()) {
        let a = herm(d, seed, 3);
        let b = herm(d, seed, 4);
        let ca = herm_to_coords(&a);
        prop_assert!(coords_to_herm(&ca, d).max_abs_diff(&a) < 1e-14);
        assert_abs_diff_eq!(ca.dot(&herm_to_coords(&b)), frobenius_inner(&a, &b).unwrap(), epsilon = 1e-10);
    }

    #[test]
    fn measurement_map_adjoint(d in 2usize..6, m in 1usize..30, seed in any::<u64>()) {
        let e = haar_ensemble(d, 40, seed).unwrap();
        let vs = sample_vectors(&e, m, seed);
        let z = herm(d, seed, 5);
        let u = gaussian_reals(m, &mut stream(seed, &[6]));
        let az = apply_a(&vs, &z).unwrap();
        let lhs: f64 = az.iter().zip(&u).map(|(a, b)| a * b).sum();
        let rhs = frobenius_inner(&z, &apply_a_adjoint(&vs, &u).unwrap()).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn measurements_ignore_global_phase(d in 2usize..6, seed in any::<u64>(), theta in 0.0f64..6.3) {
        let e = mub_maximal(if d == 4 { 5 } else { d }).unwrap();
        let x = haar_vector(e.dim(), &mut stream(seed, &[7]));
        let y = x.scale(C64::from_polar(1.0, theta));
        let a = measure(&x, e.vectors()).unwrap();
        let b = measure(&y, e.vectors()).unwrap();
        for (p, q) in a.amplitudes.iter().zip(&b.amplitudes) {
            assert_abs_diff_eq!(p, q, epsilon = 1e-14);
        }
        prop_assert!(phase_distance(&x, &y).unwrap() < 1e-12);
        prop_assert!((x.phase_canonical().as_dvector() - y.phase_canonical().as_dvector()).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_closed_forms(d in 2usize..4, seed in any::<u64>()) {
        let a = herm(d, seed, 8);
        let b = herm(d, seed, 9);
        let c = herm(d, seed, 10);
        let e2 = (ptrace_sym2_closed(&a, &b).unwrap() - ptrace_sym_bruteforce(&[&a, &b]).unwrap()).camax();
        let e3 = (ptrace_sym3_closed(&a, &b, &c).unwrap() - ptrace_sym_bruteforce(&[&a, &b, &c]).unwrap()).camax();
        prop_assert!(e2 < 1e-12 && e3 < 1e-12);
    }

    #[test]
    fn record_csv_round_trip(d in 2usize..6, m in 1usize..20, seed in any::<u64>()) {
        let e = haar_ensemble(d, 30, seed).unwrap();
        let x = haar_vector(d, &mut stream(seed, &[11]));
        let rec = measure(&x, &sample_vectors(&e, m, seed)).unwrap().with_provenance(seed, "haar");
        let mut buf = Vec::new();
        write_record(&rec, &mut buf).unwrap();
        prop_assert_eq!(read_record(buf.as_slice()).unwrap(), rec);
    }

    #[test]
    fn design_file_round_trip(d in 2usize..6, n in 1usize..20, seed in any::<u64>()) {
        let e = haar_ensemble(d, n, seed).unwrap();
        let mut buf = Vec::new();
        write_design(&e, &mut buf).unwrap();
        let back = read_design(buf.as_slice(), "back").unwrap();
        prop_assert_eq!(back.vectors(), e.vectors());
        prop_assert_eq!(back.weights(), e.weights());
    }

    #[test]
    fn int_ranges(lo in 1usize..50, len in 0usize..30, step in 1usize..5) {
        let hi = lo + len;
        let v = parse_int_list(&format!("{lo}:{hi}:{step}")).unwrap();
        prop_assert_eq!(v, (lo..=hi).step_by(step).collect::<Vec<_>>());
    }
}
