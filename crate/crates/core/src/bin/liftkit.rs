use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use liftkit::certificate::{golfing_certificate, guarantee_details, GolfingParams};
use liftkit::designs::verify_design;
use liftkit::experiments::{
    run_certificate_suite, run_converse, run_moments, run_phase_diagram, write_moments_csv, ConverseSpec, EnsembleKind,
    PhaseDiagramSpec, Sampler,
};
use liftkit::io::{
    certificate_to_json, load_design, load_record, parse_config, parse_int_list, save_design, save_record,
    write_record,
};
use liftkit::measurement::measure;
use liftkit::rng::{haar_vector, stream};
use liftkit::solver::{extract_signal, phase_distance, recover, SolverConfig};
use liftkit::{ComplexVec, Error};

const SCHEMAS: &str = "\
Outputs:
  design gen      LIFTKIT-DESIGN v1 text: line 'd N t', then per vector: weight re_0 im_0 ... (17 digits)
  measure         CSV: 'd,m,seed,label' + values, then 'i,re_0..,im_0..,y'; row i=0 carries y0 = |x|^2
  recover         JSON: converged, residuals, iterations, x_hat (re/im), eig_gap
  phasediagram    <out>.csv 'd,m,trials,successes,frequency,mean_iterations' and <out>.svg heatmap
  converse        CSV 'm,indistinguishable,trials,empirical,predicted,sigma,within_5_sigma'
  moments         CSV 'k,exact_moment,moment_bound,within_bound,tail_frequency,tail_sigma,tail_bound'
  certify         JSON report; one trial prints the certificate itself

Config file (--config): 'key = value' lines using the flag names (d, m, t, gamma, trials, seed, ensemble, out).
Exit codes: 0 success, 1 a checked property failed, 2 usage error. LIFTKIT_THREADS caps the worker pool.";

#[derive(Parser)]
#[command(name = "liftkit", version, about = "Phase retrieval from design measurements", after_help = SCHEMAS)]
struct Cli {
    /// Optional `key = value` file; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default, Debug)]
struct Opts {
    /// Dimension, or a list/range such as 2:16 or 4,8,16.
    #[arg(long)]
    d: Option<String>,
    /// Measurement count, or a list/range.
    #[arg(long)]
    m: Option<String>,
    /// Design order.
    #[arg(long)]
    t: Option<usize>,
    /// Truncation rate (default 1 - 2/t).
    #[arg(long)]
    gamma: Option<f64>,
    /// Trials (or samples, for `moments`).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// stabilizer | projected_stabilizer | mub | haar
    #[arg(long)]
    ensemble: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate or verify a design.
    Design {
        #[command(subcommand)]
        action: DesignCmd,
    },
    /// Sample measurements of a Haar-random signal and write the record CSV.
    Measure(Opts),
    /// Run the lifted solver on a record CSV (or on fresh measurements).
    Recover {
        record: Option<PathBuf>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Empirical success-probability grid with CSV and SVG output.
    Phasediagram(Opts),
    /// Indistinguishability frequencies against (1 - p)^m for prime d.
    Converse(Opts),
    /// Overlap moments and tail frequency against their bounds.
    Moments(Opts),
    /// Golfing-scheme certificates, checked against the solver.
    Certify(Opts),
}

#[derive(Subcommand)]
enum DesignCmd {
    Gen(Opts),
    Verify {
        /// Design file; omit to verify a built-in ensemble.
        file: Option<PathBuf>,
        #[command(flatten)]
        opts: Opts,
    },
}

enum Failure {
    Assertion(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotADesign { .. } => Failure::Assertion(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

impl Opts {
    fn merge(mut self, cfg: &[(String, String)]) -> std::result::Result<Self, Failure> {
        for (k, v) in cfg {
            let bad = || Failure::Usage(format!("config: bad value '{v}' for '{k}'"));
            match k.as_str() {
                "d" => self.d = self.d.or(Some(v.clone())),
                "m" => self.m = self.m.or(Some(v.clone())),
                "t" => self.t = self.t.or(Some(v.parse().map_err(|_| bad())?)),
                "gamma" => self.gamma = self.gamma.or(Some(v.parse().map_err(|_| bad())?)),
                "trials" => self.trials = self.trials.or(Some(v.parse().map_err(|_| bad())?)),
                "seed" => self.seed = self.seed.or(Some(v.parse().map_err(|_| bad())?)),
                "ensemble" => self.ensemble = self.ensemble.or(Some(v.clone())),
                "out" => self.out = self.out.or(Some(PathBuf::from(v))),
                _ => return Err(Failure::Usage(format!("config: unknown key '{k}'"))),
            }
        }
        Ok(self)
    }

    fn ints(&self, field: Option<&String>, name: &str, default: &str) -> std::result::Result<Vec<usize>, Failure> {
        parse_int_list(field.map(String::as_str).unwrap_or(default))
            .map_err(|_| Failure::Usage(format!("--{name}: expected an integer, list or range")))
    }

    fn one(&self, field: Option<&String>, name: &str, default: usize) -> std::result::Result<usize, Failure> {
        match self.ints(field, name, &default.to_string())?.as_slice() {
            [v] => Ok(*v),
            _ => Err(Failure::Usage(format!("--{name} takes a single value here"))),
        }
    }

    fn d(&self, default: usize) -> std::result::Result<usize, Failure> {
        self.one(self.d.as_ref(), "d", default)
    }

    fn m(&self, default: usize) -> std::result::Result<usize, Failure> {
        self.one(self.m.as_ref(), "m", default)
    }

    fn ensemble(&self, default: EnsembleKind) -> std::result::Result<EnsembleKind, Failure> {
        match &self.ensemble {
            Some(s) => Ok(s.parse()?),
            None => Ok(default),
        }
    }

    fn t(&self, default: usize) -> usize {
        self.t.unwrap_or(default)
    }

    fn gamma(&self, t: usize) -> f64 {
        self.gamma.unwrap_or(if t >= 2 { 1.0 - 2.0 / t as f64 } else { 0.0 })
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }
}

fn open_out(path: Option<&Path>) -> std::result::Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) if p.as_os_str() != "-" => Box::new(BufWriter::new(File::create(p)?)),
        _ => Box::new(std::io::stdout().lock()),
    })
}

fn emit_json(value: &serde_json::Value, path: Option<&Path>) -> Outcome {
    let mut w = open_out(path)?;
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

fn vec_json(v: &ComplexVec) -> serde_json::Value {
    json!({
        "re": v.entries().iter().map(|z| z.re).collect::<Vec<_>>(),
        "im": v.entries().iter().map(|z| z.im).collect::<Vec<_>>(),
    })
}

fn signal(d: usize, seed: u64) -> ComplexVec {
    haar_vector(d, &mut stream(seed, &[0x5349_474e, d as u64]))
}

fn design_gen(o: &Opts) -> Outcome {
    let kind = o.ensemble(EnsembleKind::Mub)?;
    let e = kind.build(o.d(3)?, o.seed())?;
    match &o.out {
        Some(p) => save_design(&e, p)?,
        None => liftkit::io::write_design(&e, std::io::stdout().lock())?,
    }
    eprintln!("{}: {} vectors in dimension {}", e.label(), e.len(), e.dim());
    Ok(())
}

fn design_verify(file: Option<&Path>, o: &Opts) -> Outcome {
    let e = match file {
        Some(p) => load_design(p)?,
        None => o.ensemble(EnsembleKind::Mub)?.build(o.d(3)?, o.seed())?,
    };
    let t = o.t(e.order_claim().max(1));
    let report = verify_design(&e, t, 1e-8)?;
    emit_json(&json!({ "label": e.label(), "dim": e.dim(), "size": e.len(), "report": report }), o.out.as_deref())?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Assertion(format!("{} is not a {t}-design", e.label())))
    }
}

fn measure_cmd(o: &Opts) -> Outcome {
    let d = o.d(4)?;
    let m = o.m(4 * d)?;
    let kind = o.ensemble(EnsembleKind::ProjectedStabilizer)?;
    let seed = o.seed();
    let x = signal(d, seed);
    let vectors = Sampler::new(kind, d)?.sample(m, &mut stream(seed, &[0x4d45_4153, d as u64, m as u64]));
    let rec = measure(&x, &vectors)?.with_provenance(seed, kind.name());
    match &o.out {
        Some(p) => save_record(&rec, p)?,
        None => write_record(&rec, std::io::stdout().lock())?,
    }
    eprintln!("signal: {}", serde_json::to_string(&vec_json(&x)).unwrap_or_default());
    Ok(())
}

fn recover_cmd(file: Option<&Path>, o: &Opts) -> Outcome {
    let (rec, truth) = match file {
        Some(p) => (load_record(p)?, None),
        None => {
            let d = o.d(4)?;
            let m = o.m(6 * d)?;
            let kind = o.ensemble(EnsembleKind::ProjectedStabilizer)?;
            let x = signal(d, o.seed());
            let vectors = Sampler::new(kind, d)?.sample(m, &mut stream(o.seed(), &[0x4d45_4153, d as u64, m as u64]));
            (measure(&x, &vectors)?, Some(x))
        }
    };
    let cfg = SolverConfig {
        seed: o.seed(),
        ..SolverConfig::default()
    };
    let res = recover(&rec, &cfg)?;
    let (x_hat, gap) = extract_signal(&res);
    let distance = match &truth {
        Some(x) => Some(phase_distance(&x_hat, x)?),
        None => None,
    };
    emit_json(
        &json!({
            "d": rec.signal_dim,
            "m": rec.len(),
            "converged": res.converged,
            "iterations": res.iterations,
            "affine_residual": res.affine_residual,
            "cone_residual": res.cone_residual,
            "trace_gap": res.trace_gap,
            "eig_gap": gap,
            "x_hat": vec_json(&x_hat),
            "phase_distance": distance,
        }),
        o.out.as_deref(),
    )?;
    if res.converged {
        Ok(())
    } else {
        Err(Failure::Assertion(format!("solver did not converge in {} iterations", res.iterations)))
    }
}

fn phasediagram_cmd(o: &Opts) -> Outcome {
    let mut spec = PhaseDiagramSpec::new(
        o.ints(o.d.as_ref(), "d", "2:12")?,
        o.ints(o.m.as_ref(), "m", "1:48")?,
        o.ensemble(EnsembleKind::ProjectedStabilizer)?,
        o.seed(),
    );
    if let Some(t) = o.trials {
        spec.trials_per_cell = t;
    }
    let res = run_phase_diagram(&spec)?;
    let base = o.out.clone().unwrap_or_else(|| PathBuf::from("phasediagram"));
    let base = if base.extension().is_some_and(|e| e == "csv" || e == "svg") {
        base.with_extension("")
    } else {
        base
    };
    let csv_path = base.with_extension("csv");
    let svg_path = base.with_extension("svg");
    res.write_csv(BufWriter::new(File::create(&csv_path)?))?;
    std::fs::write(&svg_path, res.to_svg())?;
    eprintln!("wrote {} and {}", csv_path.display(), svg_path.display());
    Ok(())
}

fn converse_cmd(o: &Opts) -> Outcome {
    let spec = ConverseSpec {
        d: o.d(3)?,
        m_values: o.ints(o.m.as_ref(), "m", "0,1,2,4,6,8,12,16,24,32")?,
        omegas: vec![1.0, 2.0, 3.0],
        trials: o.trials.unwrap_or(10_000),
        seed: o.seed(),
    };
    let rep = run_converse(&spec)?;
    rep.write_csv(open_out(o.out.as_deref())?)?;
    for w in &rep.omegas {
        eprintln!(
            "omega={} m*={} (omega/4)d(d+1)={} bound_ok={}",
            w.omega, w.m_star, w.lower_bound, w.satisfies_bound
        );
    }
    let bad_rows = rep.rows.iter().filter(|r| !r.within_5_sigma).count();
    let bad_omegas = rep.omegas.iter().filter(|w| !w.satisfies_bound).count();
    if bad_rows + bad_omegas == 0 {
        Ok(())
    } else {
        Err(Failure::Assertion(format!("{bad_rows} rows outside 5 sigma, {bad_omegas} omega bounds violated")))
    }
}

fn moments_cmd(o: &Opts) -> Outcome {
    let t = o.t(3);
    let rep = run_moments(
        o.d(4)?,
        o.ensemble(EnsembleKind::Stabilizer)?,
        o.gamma(t),
        t,
        o.trials.unwrap_or(100_000),
        o.seed(),
    )?;
    write_moments_csv(&rep, open_out(o.out.as_deref())?)?;
    if rep.rows.iter().all(|r| r.within_bound) && rep.tail_within_bound && rep.mean_error <= 1e-12 {
        Ok(())
    } else {
        Err(Failure::Assertion("moment or tail bound violated".into()))
    }
}

fn certify_cmd(o: &Opts) -> Outcome {
    let d = o.d(4)?;
    let t = o.t(3);
    let kind = o.ensemble(EnsembleKind::ProjectedStabilizer)?;
    let mut params = GolfingParams::for_dim(d, t, o.seed());
    if let Some(g) = o.gamma {
        params.gamma = g;
    }
    if o.m.is_some() {
        params.m_per_leg = o.m(params.m_per_leg)?;
    } else {
        params.m_per_leg = GolfingParams::default_m_per_leg(d, t, params.gamma);
    }
    let trials = o.trials.unwrap_or(1);
    if trials == 1 {
        let e = kind.build(d, o.seed())?;
        let x = signal(d, o.seed());
        let run = golfing_certificate(&x, &e, &params)?;
        let g = guarantee_details(&x, &run.vectors, &run.report.y)?;
        let distance = if g.holds {
            let res = recover(&measure(&x, &run.vectors)?, &SolverConfig::default())?;
            Some(phase_distance(&extract_signal(&res).0, &x)?)
        } else {
            None
        };
        emit_json(
            &json!({
                "params": run.params,
                "succeeded": run.succeeded,
                "legs": run.legs,
                "certificate": certificate_to_json(&run.report),
                "guarantee": g,
                "recovery_distance": distance,
            }),
            o.out.as_deref(),
        )?;
        if run.succeeded && !run.report.is_valid {
            return Err(Failure::Assertion("successful run produced an invalid certificate".into()));
        }
        if distance.is_some_and(|dist| !(dist <= 1e-5)) {
            return Err(Failure::Assertion("guarantee held but recovery missed".into()));
        }
        return Ok(());
    }
    let rep = run_certificate_suite(d, kind, &params, trials, o.seed(), 1e-5)?;
    emit_json(&serde_json::to_value(&rep).map_err(|e| Failure::Usage(e.to_string()))?, o.out.as_deref())?;
    let broken = rep
        .trials
        .iter()
        .filter(|t| t.succeeded && !(t.is_valid && t.contraction_holds))
        .count();
    if broken == 0 && rep.cross_validation_failures == 0 {
        Ok(())
    } else {
        Err(Failure::Assertion(format!(
            "{broken} successful runs broke the certificate bounds, {} recoveries missed",
            rep.cross_validation_failures
        )))
    }
}

fn run(cli: Cli) -> Outcome {
    let cfg = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))?;
            parse_config(&text)?
        }
        None => Vec::new(),
    };
    match cli.cmd {
        Cmd::Design { action: DesignCmd::Gen(o) } => design_gen(&o.merge(&cfg)?),
        Cmd::Design {
            action: DesignCmd::Verify { file, opts },
        } => design_verify(file.as_deref(), &opts.merge(&cfg)?),
        Cmd::Measure(o) => measure_cmd(&o.merge(&cfg)?),
        Cmd::Recover { record, opts } => recover_cmd(record.as_deref(), &opts.merge(&cfg)?),
        Cmd::Phasediagram(o) => phasediagram_cmd(&o.merge(&cfg)?),
        Cmd::Converse(o) => converse_cmd(&o.merge(&cfg)?),
        Cmd::Moments(o) => moments_cmd(&o.merge(&cfg)?),
        Cmd::Certify(o) => certify_cmd(&o.merge(&cfg)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Assertion(msg)) => {
            eprintln!("liftkit: check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("liftkit: {msg}");
            ExitCode::from(2)
        }
    }
}
