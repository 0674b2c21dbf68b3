// Two orthogonal basis vectors look identical to every MUB measurement
// except the two that hit them, so the failure probability decays only as
// (1 - 2/(d(d+1)))^m.

use liftkit::experiments::{run_converse, ConverseSpec};

pub fn run_example() -> liftkit::Result<()> {
    for d in [3, 5] {
        let spec = ConverseSpec {
            d,
            m_values: vec![1, 3, 6, 12, 24],
            omegas: vec![1.0, 2.0, 3.0],
            trials: 10_000,
            seed: d as u64,
        };
        let rep = run_converse(&spec)?;
        println!("d={d}, p={:.4}", rep.p);
        for r in &rep.rows {
            println!(
                "  m={:>3} indistinguishable {:.4} vs (1-p)^m {:.4}  ({:+.1} sigma)",
                r.m,
                r.empirical,
                r.predicted,
                if r.sigma > 0.0 { (r.empirical - r.predicted) / r.sigma } else { 0.0 }
            );
        }
        for w in &rep.omegas {
            println!(
                "  omega={} needs m >= {} for failure <= e^-omega; lower bound (omega/4)d(d+1) = {}",
                w.omega, w.m_star, w.lower_bound
            );
        }
    }
    Ok(())
}

fn main() -> liftkit::Result<()> {
    run_example()
}
