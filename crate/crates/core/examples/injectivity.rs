// Smallest eigenvalue of P_T (R - I - Π_Id) P_T as the number of sampled
// measurements grows, and the frame bounds it implies.

use liftkit::certificate::{check_upper_bound, injectivity_spectrum};
use liftkit::designs::{mub_maximal, stabilizer_states};
use liftkit::measurement::sample_vectors;
use liftkit::rng::{haar_vector, stream};

pub fn run_example() -> liftkit::Result<()> {
    let full = mub_maximal(3)?;
    let x3 = haar_vector(3, &mut stream(2, &[]));
    let inj = injectivity_spectrum(&x3, full.vectors())?;
    println!("all 12 MUB vectors in d=3: lambda_min = {:.2e}", inj.lambda_min);

    let e = stabilizer_states(3)?;
    let x = haar_vector(8, &mut stream(3, &[]));
    println!("\n{}: lambda_min over 10 draws (injective at delta=1/2 when > -1/2)", e.label());
    for m in [10, 40, 160, 640, 2560] {
        let lams: Vec<f64> = (0..10)
            .map(|s| injectivity_spectrum(&x, &sample_vectors(&e, m, s)).map(|r| r.lambda_min))
            .collect::<liftkit::Result<_>>()?;
        let mean = lams.iter().sum::<f64>() / lams.len() as f64;
        let ok = lams.iter().filter(|&&l| l > -0.5).count();
        println!("m={m:>5} mean {mean:>8.4} injective in {ok}/10");
    }
    println!("\nupper frame bound m^-1 |A(Z)|^2 <= |Z|^2 on 100 random Z: {}", check_upper_bound(&sample_vectors(&e, 50, 1), 100, 9)?);
    Ok(())
}

fn main() -> liftkit::Result<()> {
    run_example()
}
