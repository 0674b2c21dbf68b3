// A small recovery phase diagram. Pass a path prefix to keep the CSV and
// SVG; by default they go to the temp directory.

use std::path::PathBuf;

use liftkit::experiments::{run_phase_diagram, EnsembleKind, PhaseDiagramSpec};

pub fn run_example() -> liftkit::Result<()> {
    run_to(std::env::temp_dir().join("liftkit_phase"))
}

fn run_to(prefix: PathBuf) -> liftkit::Result<()> {
    let mut spec = PhaseDiagramSpec::new((2..=8).collect(), (1..=40).collect(), EnsembleKind::ProjectedStabilizer, 2);
    spec.trials_per_cell = 10;
    let res = run_phase_diagram(&spec)?;

    for &d in &spec.d_range {
        let row: String = spec
            .m_range
            .iter()
            .map(|&m| match res.frequency(d, m).unwrap_or(0.0) {
                f if f >= 0.9 => '#',
                f if f >= 0.5 => '+',
                f if f > 0.0 => '.',
                _ => ' ',
            })
            .collect();
        println!("d={d:>2} |{row}|  4d-4 = {}", 4 * d - 4);
    }

    let csv = prefix.with_extension("csv");
    let svg = prefix.with_extension("svg");
    res.write_csv(std::fs::File::create(&csv)?)?;
    std::fs::write(&svg, res.to_svg())?;
    println!("wrote {} and {}", csv.display(), svg.display());
    Ok(())
}

fn main() -> liftkit::Result<()> {
    match std::env::args().nth(1) {
        Some(p) => run_to(PathBuf::from(p)),
        None => run_example(),
    }
}
