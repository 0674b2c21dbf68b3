// End-to-end runs and values frozen from independent formulas.

use liftkit::certificate::{golfing_certificate, guarantee_check, GolfingParams};
use liftkit::designs::{frame_potential, mub_maximal, stabilizer_count, stabilizer_states, stabilizer_states_large};
use liftkit::experiments::{converse_min_measurements, EnsembleKind};
use liftkit::measurement::{measure, sample_vectors};
use liftkit::rng::{haar_vector, stream};
use liftkit::solver::{extract_signal, phase_distance, recover, SolverConfig};
use liftkit::tensor::dim_sym;

fn binomial(n: u64, k: u64) -> u64 {
    (1..=k).fold(1, |acc, i| acc * (n + 1 - i) / i)
}

#[test]
fn stabilizer_counts_match_the_product_formula() {
    // 2^n prod_{k=1..n} (2^k + 1)
    let oracle = |n: u32| 2u64.pow(n) * (1..=n).map(|k| 2u64.pow(k) + 1).product::<u64>();
    assert_eq!([oracle(1), oracle(2), oracle(3), oracle(4)], [6, 60, 1080, 36720]);
    for n in 1..=3 {
        assert_eq!(stabilizer_count(n) as u64, oracle(n as u32));
        assert_eq!(stabilizer_states(n).unwrap().len() as u64, oracle(n as u32));
    }
    assert_eq!(stabilizer_states_large(4).unwrap().len() as u64, oracle(4));
}

#[test]
fn symmetric_dimensions_and_frame_potentials() {
    for d in 2..6u64 {
        for k in 1..4u64 {
            assert_eq!(dim_sym(d as usize, k as usize) as u64, binomial(d + k - 1, k));
        }
    }
    // a t-design attains 1 / dim Sym^t
    let e = stabilizer_states(2).unwrap();
    assert!((frame_potential(&e, 3) - 1.0 / 20.0).abs() < 1e-12);
    let e = mub_maximal(5).unwrap();
    assert!((frame_potential(&e, 2) - 1.0 / 15.0).abs() < 1e-12);
}

#[test]
fn converse_thresholds_by_linear_search() {
    for d in [3usize, 5, 7] {
        let p = 2.0 / ((d * (d + 1)) as f64);
        for omega in [1.0f64, 2.0, 3.0] {
            let m = (1..).find(|&m| (1.0 - p).powi(m) <= (-omega).exp()).unwrap() as usize;
            assert_eq!(converse_min_measurements(d, omega), m);
        }
    }
    assert_eq!(converse_min_measurements(3, 1.0), 6);
    assert_eq!(converse_min_measurements(5, 3.0), 44);
}

#[test]
fn sample_measure_recover() {
    let d = 5;
    let e = EnsembleKind::ProjectedStabilizer.build(d, 0).unwrap();
    let x = haar_vector(d, &mut stream(31, &[0]));
    let rec = measure(&x, &sample_vectors(&e, 6 * d, 31)).unwrap();
    let res = recover(&rec, &SolverConfig::default()).unwrap();
    assert!(res.converged);
    assert!(phase_distance(&extract_signal(&res).0, &x).unwrap() < 1e-6);
}

#[test]
fn certificate_then_recovery_on_the_same_measurements() {
    let d = 4;
    let e = stabilizer_states(2).unwrap();
    let x = haar_vector(d, &mut stream(13, &[1]));
    let run = golfing_certificate(&x, &e, &GolfingParams::for_dim(d, 3, 13)).unwrap();
    assert!(run.succeeded && run.report.is_valid);
    assert!(guarantee_check(&x, &run.vectors, &run.report.y).unwrap());
    let rec = measure(&x, &run.vectors).unwrap();
    let res = recover(&rec, &SolverConfig::default()).unwrap();
    assert!(phase_distance(&extract_signal(&res).0, &x).unwrap() <= 1e-5);
}
