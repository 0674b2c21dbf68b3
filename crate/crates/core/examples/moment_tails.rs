// Moments of the overlap ξ = |<a, x>|² under a 3-design, and how often it
// exceeds the truncation threshold.

use liftkit::designs::stabilizer_states;
use liftkit::experiments::{run_moments, EnsembleKind};
use liftkit::measurement::moment_tail_experiment;
use liftkit::ComplexVec;

pub fn run_example() -> liftkit::Result<()> {
    for (d, kind) in [(4, EnsembleKind::Stabilizer), (8, EnsembleKind::Stabilizer), (6, EnsembleKind::ProjectedStabilizer)] {
        for gamma in [1.0 / 3.0, 1.0] {
            let r = run_moments(d, kind, gamma, 3, 100_000, 1)?;
            let rows: Vec<String> = r
                .rows
                .iter()
                .map(|row| format!("E[xi^{}]={:.5}<={:.5}", row.k, row.exact, row.bound))
                .collect();
            println!("{kind} d={d} gamma={gamma:.3}: {}", rows.join(" "));
            println!(
                "    threshold {:.3}: exact tail {:.2e}, sampled {:.2e} +- {:.1e}, bound {:.2e}",
                r.threshold, r.exact_tail_probability, r.empirical_tail_frequency, r.tail_sigma, r.tail_bound
            );
        }
    }

    // At these sizes 5t d^{-γ} > 1 for t ≥ 2, so nothing is ever truncated.
    // With t = 1, γ = 1 and a signal that is itself a design vector the
    // threshold 5/d bites.
    let e = stabilizer_states(3)?;
    let r = moment_tail_experiment(&e, &ComplexVec::basis(8, 0), 1, 1.0, 100_000, 3)?;
    println!(
        "stabilizer d=8, x=e_0, t=1, gamma=1: threshold {:.3}, exact tail {:.2e}, sampled {:.2e}, bound {:.2e}",
        r.threshold, r.exact_tail_probability, r.empirical_tail_frequency, r.tail_bound
    );
    Ok(())
}

fn main() -> liftkit::Result<()> {
    run_example()
}
