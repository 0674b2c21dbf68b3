// Measure a random signal with stabilizer-design vectors and recover it
// from the lifted feasibility program.

use liftkit::designs::projected_stabilizer_design;
use liftkit::measurement::{measure, sample_vectors};
use liftkit::rng::{haar_vector, stream};
use liftkit::solver::{extract_signal, lifted_error, phase_distance, recover, SolverConfig, SolverVariant};

pub fn run_example() -> liftkit::Result<()> {
    let d = 6;
    let e = projected_stabilizer_design(d)?;
    let x = haar_vector(d, &mut stream(1, &[]));

    for m in [2 * d, 4 * d - 4, 6 * d] {
        let rec = measure(&x, &sample_vectors(&e, m, 5))?;
        for variant in [SolverVariant::Feasibility, SolverVariant::TraceMin] {
            let cfg = SolverConfig {
                variant,
                max_iters: 20_000,
                ..SolverConfig::default()
            };
            let res = recover(&rec, &cfg)?;
            let (x_hat, gap) = extract_signal(&res);
            println!(
                "m={m:>3} {:<12} converged={:<5} iters={:>5} |X^-xx*|={:.2e} phase dist={:.2e} gap={gap:.3}",
                format!("{variant:?}"),
                res.converged,
                res.iterations,
                lifted_error(&res.x_hat, &x),
                phase_distance(&x_hat, &x)?,
            );
        }
    }
    Ok(())
}

fn main() -> liftkit::Result<()> {
    run_example()
}
