// Builds the shipped designs, checks their order, and round-trips one
// through the text format.

use liftkit::designs::{frame_potential, mub_maximal, projected_stabilizer_design, stabilizer_states, verify_design};
use liftkit::io::{read_design, write_design};
use liftkit::tensor::dim_sym;

pub fn run_example() -> liftkit::Result<()> {
    let mut catalog = Vec::new();
    for d in [2, 3, 5, 7] {
        catalog.push(mub_maximal(d)?);
    }
    for n in 1..=3 {
        catalog.push(stabilizer_states(n)?);
    }
    for d in [3, 5, 6, 7] {
        catalog.push(projected_stabilizer_design(d)?);
    }

    println!("{:<28} {:>5} {:>5}  t=1..4 (frame potential vs 1/dim Sym^t)", "ensemble", "d", "N");
    for e in &catalog {
        let mut cols = Vec::new();
        for t in 1..=4 {
            let r = verify_design(e, t, 1e-8)?;
            cols.push(format!("{}{}", t, if r.passed { "+" } else { "-" }));
        }
        println!("{:<28} {:>5} {:>5}  {}", e.label(), e.dim(), e.len(), cols.join(" "));
    }

    // Welch-type bound: any ensemble sits at or above 1/dim Sym^t.
    let e = mub_maximal(5)?;
    println!(
        "mub(5): frame potential at t=3 is {:.6} against the floor {:.6}",
        frame_potential(&e, 3),
        1.0 / dim_sym(5, 3) as f64
    );

    let mut buf = Vec::new();
    write_design(&catalog[5], &mut buf)?;
    let back = read_design(buf.as_slice(), "reloaded")?;
    assert_eq!(back.vectors(), catalog[5].vectors());
    println!("round trip of {} through LIFTKIT-DESIGN v1: {} bytes, exact", catalog[5].label(), buf.len());
    Ok(())
}

fn main() -> liftkit::Result<()> {
    run_example()
}
