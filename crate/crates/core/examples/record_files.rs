// Write a measurement record to CSV, read it back, and solve from the file.

use liftkit::designs::mub_maximal;
use liftkit::io::{load_record, save_record};
use liftkit::measurement::{measure, sample_vectors};
use liftkit::rng::{haar_vector, stream};
use liftkit::solver::{extract_signal, phase_distance, recover, SolverConfig};

pub fn run_example() -> liftkit::Result<()> {
    let d = 5;
    let x = haar_vector(d, &mut stream(8, &[]));
    let rec = measure(&x, &sample_vectors(&mub_maximal(d)?, 40, 8))?.with_provenance(8, "mub(d=5)");
    let path = std::env::temp_dir().join(format!("liftkit_record_{}.csv", std::process::id()));
    save_record(&rec, &path)?;
    let back = load_record(&path)?;
    std::fs::remove_file(&path)?;
    assert_eq!(back, rec);

    let res = recover(&back, &SolverConfig::default())?;
    println!(
        "{} measurements from {}: converged={} phase distance {:.2e}",
        back.len(),
        back.source_label,
        res.converged,
        phase_distance(&extract_signal(&res).0, &x)?
    );
    Ok(())
}

fn main() -> liftkit::Result<()> {
    run_example()
}
