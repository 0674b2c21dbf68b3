// Build an approximate dual certificate with the golfing scheme, check the
// uniqueness conditions, and confirm the solver finds the signal.

use liftkit::certificate::{golfing_certificate, guarantee_details, oneshot_certificate, verify_certificate, GolfingParams};
use liftkit::designs::stabilizer_states;
use liftkit::measurement::{measure, sample_vectors};
use liftkit::rng::{haar_vector, stream};
use liftkit::solver::{extract_signal, phase_distance, recover, SolverConfig};

pub fn run_example() -> liftkit::Result<()> {
    let d = 8;
    let e = stabilizer_states(3)?;
    let x = haar_vector(d, &mut stream(4, &[]));

    let vs = sample_vectors(&e, 200, 1);
    let one = verify_certificate(&oneshot_certificate(&x, &vs)?, &x)?;
    println!(
        "one-shot Y = R X - tr(X) Id from 200 samples: |Y_T - X| = {:.3} (need {:.4}), |Y_T^perp| = {:.3}",
        one.tangent_error,
        1.0 / (4.0 * d as f64),
        one.complement_norm
    );

    let params = GolfingParams::for_dim(d, 3, 21);
    println!("golfing: r={} l={} m_per_leg={} gamma={:.3}", params.r, params.l, params.m_per_leg, params.gamma);
    let run = golfing_certificate(&x, &e, &params)?;
    for leg in &run.legs {
        println!(
            "  leg {:>2}: golf1 {:.3} (<= {}) golf2 {:.3} (<= {}) {}",
            leg.index,
            leg.golf1_ratio,
            params.b,
            leg.golf2_ratio,
            params.c,
            if leg.success { "accepted" } else { "rejected" }
        );
    }
    let norms: Vec<String> = run.q_sequence.iter().map(|q| format!("{:.4}", q.frobenius_norm())).collect();
    println!("  |Q_i|: {}", norms.join(" -> "));
    println!(
        "  succeeded={} tangent_error={:.2e} complement_norm={:.3} valid={}",
        run.succeeded, run.report.tangent_error, run.report.complement_norm, run.report.is_valid
    );

    let g = guarantee_details(&x, &run.vectors, &run.report.y)?;
    println!(
        "guarantee: lambda_min={:.3} span residual={:.1e} holds={}",
        g.lambda_min, g.span_residual, g.holds
    );
    if g.holds {
        let res = recover(&measure(&x, &run.vectors)?, &SolverConfig::default())?;
        println!(
            "recovery from all {} sampled vectors: phase distance {:.2e}",
            run.vectors.len(),
            phase_distance(&extract_signal(&res).0, &x)?
        );
    }
    Ok(())
}

fn main() -> liftkit::Result<()> {
    run_example()
}
