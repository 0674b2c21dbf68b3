// The frame operator of a 2-design averages to I + Π_Id; sampled versions
// approach it at the Monte-Carlo rate.

use liftkit::designs::{mub_maximal, stabilizer_states};
use liftkit::measurement::{isotropy_defect, isotropy_residual};

pub fn run_example() -> liftkit::Result<()> {
    for e in [mub_maximal(3)?, mub_maximal(5)?, stabilizer_states(2)?] {
        println!("{:<20} exact |E[R] - (I + Pi_Id)|_max = {:.2e}", e.label(), isotropy_defect(&e));
    }

    let e = stabilizer_states(2)?;
    println!("\nsampled residual for {} with m = 20 per batch", e.label());
    println!("{:>8} {:>12} {:>16}", "batches", "residual", "residual*sqrt(n)");
    for trials in [4, 16, 64, 256] {
        let r = isotropy_residual(&e, trials, 20, 11)?;
        println!("{trials:>8} {r:>12.5} {:>16.4}", r * ((trials * 20) as f64).sqrt());
    }
    Ok(())
}

fn main() -> liftkit::Result<()> {
    run_example()
}
