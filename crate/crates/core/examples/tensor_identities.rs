// The partial-trace identities for the symmetrizer, checked against the
// explicit tensor-space computation.

use liftkit::rng::{gaussian_hermitian, stream};
use liftkit::tensor::{dim_sym, ptrace_sym2_closed, ptrace_sym3_closed, ptrace_sym_bruteforce, symmetrizer};

pub fn run_example() -> liftkit::Result<()> {
    for (d, k) in [(2, 2), (3, 2), (2, 3), (3, 3)] {
        let p = symmetrizer(d, k)?;
        let (idem, herm) = p.projector_defects();
        println!(
            "P_Sym^{k} on (C^{d})^{k}: trace {:.1} = binom = {}, |P^2 - P| {idem:.1e}, |P - P*| {herm:.1e}",
            p.trace().re,
            dim_sym(d, k)
        );
    }

    let mut rng = stream(7, &[]);
    let mut worst2 = 0.0_f64;
    for d in 2..=4 {
        let (a, b) = (gaussian_hermitian(d, &mut rng), gaussian_hermitian(d, &mut rng));
        let diff = ptrace_sym2_closed(&a, &b)? - ptrace_sym_bruteforce(&[&a, &b])?;
        worst2 = worst2.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    let mut worst3 = 0.0_f64;
    for d in 2..=3 {
        let a = gaussian_hermitian(d, &mut rng);
        let b = gaussian_hermitian(d, &mut rng);
        let c = gaussian_hermitian(d, &mut rng);
        let diff = ptrace_sym3_closed(&a, &b, &c)? - ptrace_sym_bruteforce(&[&a, &b, &c])?;
        worst3 = worst3.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    println!("tr_2 P_Sym2 (A x B):      closed form vs tensor oracle, max deviation {worst2:.2e}");
    println!("tr_23 P_Sym3 (A x B x C): closed form vs tensor oracle, max deviation {worst3:.2e}");
    Ok(())
}

fn main() -> liftkit::Result<()> {
    run_example()
}
