//! Desk-scale experiments: the recovery phase diagram, the converse bound,
//! the moment/tail table and the certificate suite.
//!
//! Every trial draws from its own stream keyed by `(seed, d, m, trial)`, and
//! results are collected in index order, so output is identical for any
//! worker count. `LIFTKIT_THREADS` caps the pool.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::certificate::{golfing_certificate, guarantee_details, span_residual, GolfingParams};
use crate::designs::{haar_ensemble, is_prime, mub_maximal, projected_stabilizer_design, stabilizer_states_large, DesignEnsemble};
use crate::error::{Error, Result};
use crate::linalg::ComplexVec;
use crate::measurement::{measure, moment_tail_experiment, sample_vectors_with, MomentReport};
use crate::rng::{haar_vector, stream, stream_id};
use crate::solver::{extract_signal, lifted_error, phase_distance, recover, SolverConfig};

/// Worker count from `LIFTKIT_THREADS` (unset or invalid means rayon's default).
pub fn configured_threads() -> Option<usize> {
    std::env::var("LIFTKIT_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs `f` on a pool capped by `LIFTKIT_THREADS`.
pub fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = configured_threads() {
        b = b.num_threads(n);
    }
    match b.build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    Stabilizer,
    ProjectedStabilizer,
    Mub,
    Haar,
}

impl EnsembleKind {
    pub const ALL: [EnsembleKind; 4] = [Self::Stabilizer, Self::ProjectedStabilizer, Self::Mub, Self::Haar];

    pub fn name(self) -> &'static str {
        match self {
            Self::Stabilizer => "stabilizer",
            Self::ProjectedStabilizer => "projected_stabilizer",
            Self::Mub => "mub",
            Self::Haar => "haar",
        }
    }

    /// The finite ensemble for dimension `d`. Haar gets `20 d²` fixed vectors
    /// from `seed`; use [`Sampler`] for fresh Haar draws.
    pub fn build(self, d: usize, seed: u64) -> Result<DesignEnsemble> {
        match self {
            Self::Stabilizer => {
                if d < 2 || !d.is_power_of_two() {
                    return Err(Error::out_of_range("d", d, "a power of two for stabilizer states"));
                }
                stabilizer_states_large(d.trailing_zeros() as usize)
            }
            Self::ProjectedStabilizer if d.is_power_of_two() && d > 8 => {
                stabilizer_states_large(d.trailing_zeros() as usize)
            }
            Self::ProjectedStabilizer => projected_stabilizer_design(d),
            Self::Mub => mub_maximal(d),
            Self::Haar => haar_ensemble(d, 20 * d * d, seed),
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "stabilizer" | "stab" => Ok(Self::Stabilizer),
            "projected_stabilizer" | "projected" => Ok(Self::ProjectedStabilizer),
            "mub" => Ok(Self::Mub),
            "haar" | "gaussian" => Ok(Self::Haar),
            _ => Err(Error::InvalidEnsemble(format!(
                "unknown ensemble '{s}' (stabilizer, projected_stabilizer, mub, haar)"
            ))),
        }
    }
}

/// Source of measurement vectors: a weighted finite ensemble, or fresh Haar
/// vectors.
#[derive(Clone, Debug)]
pub enum Sampler {
    Finite(DesignEnsemble),
    Haar(usize),
}

impl Sampler {
    pub fn new(kind: EnsembleKind, d: usize) -> Result<Self> {
        match kind {
            EnsembleKind::Haar => Ok(Self::Haar(d)),
            k => Ok(Self::Finite(k.build(d, 0)?)),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, m: usize, rng: &mut R) -> Vec<ComplexVec> {
        match self {
            Self::Finite(e) => sample_vectors_with(e, m, rng),
            Self::Haar(d) => (0..m).map(|_| haar_vector(*d, rng)).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseDiagramSpec {
    pub d_range: Vec<usize>,
    pub m_range: Vec<usize>,
    pub trials_per_cell: usize,
    pub success_threshold: f64,
    pub ensemble_kind: EnsembleKind,
    pub seed: u64,
    pub solver: SolverConfig,
}

impl PhaseDiagramSpec {
    pub fn new(d_range: Vec<usize>, m_range: Vec<usize>, ensemble_kind: EnsembleKind, seed: u64) -> Self {
        Self {
            d_range,
            m_range,
            trials_per_cell: 30,
            success_threshold: 1e-3,
            ensemble_kind,
            seed,
            solver: SolverConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials_per_cell == 0 {
            return Err(Error::out_of_range("trials", 0, ">= 1"));
        }
        if !(self.success_threshold > 0.0) {
            return Err(Error::out_of_range("threshold", self.success_threshold, "> 0"));
        }
        if self.d_range.is_empty() || self.m_range.is_empty() {
            return Err(Error::out_of_range("grid", 0, "nonempty d and m ranges"));
        }
        if let Some(&m) = self.m_range.iter().find(|&&m| m == 0) {
            return Err(Error::out_of_range("m", m, ">= 1"));
        }
        if let Some(&d) = self.d_range.iter().find(|&&d| d < 2) {
            return Err(Error::out_of_range("d", d, ">= 2"));
        }
        self.solver.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellResult {
    pub d: usize,
    pub m: usize,
    pub trials: usize,
    pub successes: usize,
    pub frequency: f64,
    pub mean_iterations: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseDiagramResult {
    pub spec: PhaseDiagramSpec,
    /// Row-major: all `m` for the first `d`, then the next `d`.
    pub cells: Vec<CellResult>,
}

/// One recovery trial of the phase diagram: `(success, iterations)`.
pub fn phase_trial(sampler: &Sampler, d: usize, m: usize, trial: usize, spec: &PhaseDiagramSpec) -> Result<(bool, usize)> {
    let path = [d as u64, m as u64, trial as u64];
    let mut rng = stream(spec.seed, &path);
    let x = haar_vector(d, &mut rng);
    let vectors = sampler.sample(m, &mut rng);
    let rec = measure(&x, &vectors)?;
    let cfg = SolverConfig {
        seed: stream_id(&[spec.seed, d as u64, m as u64, trial as u64]),
        ..spec.solver.clone()
    };
    let res = recover(&rec, &cfg)?;
    Ok((lifted_error(&res.x_hat, &x) < spec.success_threshold, res.iterations))
}

pub fn run_phase_diagram(spec: &PhaseDiagramSpec) -> Result<PhaseDiagramResult> {
    spec.validate()?;
    let samplers: Vec<Sampler> = spec
        .d_range
        .iter()
        .map(|&d| Sampler::new(spec.ensemble_kind, d))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize, usize)> = (0..spec.d_range.len())
        .flat_map(|di| {
            spec.m_range
                .iter()
                .flat_map(move |&m| (0..spec.trials_per_cell).map(move |t| (di, m, t)))
        })
        .collect();
    let outcomes: Vec<(bool, usize)> = with_pool(|| {
        jobs.par_iter()
            .map(|&(di, m, t)| phase_trial(&samplers[di], spec.d_range[di], m, t, spec))
            .collect::<Result<Vec<_>>>()
    })?;
    let cells = outcomes
        .chunks(spec.trials_per_cell)
        .zip(jobs.chunks(spec.trials_per_cell))
        .map(|(out, job)| {
            let (di, m, _) = job[0];
            let successes = out.iter().filter(|o| o.0).count();
            let iters: usize = out.iter().map(|o| o.1).sum();
            CellResult {
                d: spec.d_range[di],
                m,
                trials: out.len(),
                successes,
                frequency: successes as f64 / out.len() as f64,
                mean_iterations: iters as f64 / out.len() as f64,
            }
        })
        .collect();
    Ok(PhaseDiagramResult {
        spec: spec.clone(),
        cells,
    })
}

impl PhaseDiagramResult {
    pub fn cell(&self, d: usize, m: usize) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.d == d && c.m == m)
    }

    pub fn frequency(&self, d: usize, m: usize) -> Option<f64> {
        self.cell(d, m).map(|c| c.frequency)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for c in &self.cells {
            w.serialize(c)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Grayscale heatmap (black = 0, white = 1), `d` increasing downwards and
    /// `m` to the right, with the line `m = 4d − 4` in red.
    pub fn to_svg(&self) -> String {
        const CELL: usize = 12;
        const MARGIN: usize = 40;
        let ds = &self.spec.d_range;
        let ms = &self.spec.m_range;
        let width = 2 * MARGIN + CELL * ms.len();
        let height = 2 * MARGIN + CELL * ds.len();
        let mut s = String::new();
        s.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
        ));
        s.push_str(&format!("<rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"));
        for c in &self.cells {
            let (Some(row), Some(col)) = (ds.iter().position(|&d| d == c.d), ms.iter().position(|&m| m == c.m)) else {
                continue;
            };
            let v = (c.frequency * 255.0).round() as u8;
            s.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"rgb({v},{v},{v})\"><title>d={} m={} p={}</title></rect>\n",
                MARGIN + col * CELL,
                MARGIN + row * CELL,
                c.d,
                c.m,
                c.frequency
            ));
        }
        let points: Vec<String> = ds
            .iter()
            .enumerate()
            .filter_map(|(row, &d)| {
                let target = (4 * d) as f64 - 4.0;
                let col = fractional_index(ms, target)?;
                let x = MARGIN as f64 + (col + 0.5) * CELL as f64;
                let y = MARGIN as f64 + (row as f64 + 0.5) * CELL as f64;
                Some(format!("{x:.1},{y:.1}"))
            })
            .collect();
        if !points.is_empty() {
            s.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"red\" stroke-width=\"2\"/>\n",
                points.join(" ")
            ));
        }
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">m</text>\n",
            width / 2,
            height - MARGIN / 3
        ));
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">d</text>\n",
            MARGIN / 3,
            height / 2
        ));
        s.push_str("</svg>\n");
        s
    }
}

/// Position of `target` along `values` (assumed increasing), interpolating
/// between neighbouring entries. `None` outside the range.
fn fractional_index(values: &[usize], target: f64) -> Option<f64> {
    let first = *values.first()? as f64;
    let last = *values.last()? as f64;
    if target < first || target > last {
        return None;
    }
    for (k, w) in values.windows(2).enumerate() {
        let (a, b) = (w[0] as f64, w[1] as f64);
        if target >= a && target <= b {
            return Some(k as f64 + if b > a { (target - a) / (b - a) } else { 0.0 });
        }
    }
    Some(0.0)
}

/// Probability that one draw from a maximal MUB set hits `u₁` or `u₂`.
pub fn converse_hit_probability(d: usize) -> f64 {
    2.0 / ((d + 1) * d) as f64
}

/// Smallest `m` with `−m log(1 − p) ≥ ω`.
pub fn converse_min_measurements(d: usize, omega: f64) -> usize {
    let p = converse_hit_probability(d);
    let rate = -(1.0 - p).ln();
    let m = (omega / rate).ceil();
    // Guard against the ceiling landing one short through rounding.
    if m * rate < omega {
        m as usize + 1
    } else {
        m as usize
    }
}

/// `(ω/4) d (d+1)`.
pub fn converse_lower_bound(d: usize, omega: f64) -> f64 {
    omega / 4.0 * (d * (d + 1)) as f64
}

#[derive(Clone, Debug, Serialize)]
pub struct ConverseSpec {
    pub d: usize,
    pub m_values: Vec<usize>,
    pub omegas: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConverseRow {
    pub m: usize,
    pub indistinguishable: usize,
    pub trials: usize,
    pub empirical: f64,
    /// `(1 − p)^m`.
    pub predicted: f64,
    pub sigma: f64,
    pub within_5_sigma: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaRow {
    pub omega: f64,
    pub m_star: usize,
    pub lower_bound: f64,
    pub satisfies_bound: bool,
    /// `(1 − p)^{m*}`, which must not exceed `e^{−ω}`.
    pub failure_at_m_star: f64,
    /// `(1 − p)^{m*−1}`, which must exceed `e^{−ω}` (minimality).
    pub failure_before_m_star: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConverseReport {
    pub d: usize,
    pub p: f64,
    pub rows: Vec<ConverseRow>,
    pub omegas: Vec<OmegaRow>,
}

/// `x = u₁`, `z = u₂` from the standard basis of the maximal MUB set; counts
/// trials in which every sampled `a` has `|⟨a,x⟩|² = |⟨a,z⟩|²`.
pub fn run_converse(spec: &ConverseSpec) -> Result<ConverseReport> {
    let d = spec.d;
    if !is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    if spec.trials == 0 {
        return Err(Error::out_of_range("trials", 0, ">= 1"));
    }
    let e = mub_maximal(d)?;
    let x = ComplexVec::basis(d, 0);
    let z = ComplexVec::basis(d, 1);
    // Overlaps are 0, 1 or 1/d; the tolerance only absorbs rounding in 1/d.
    let same: Vec<bool> = e
        .vectors()
        .iter()
        .map(|a| (a.inner(&x).norm_sqr() - a.inner(&z).norm_sqr()).abs() < 1e-12)
        .collect();
    let p = converse_hit_probability(d);
    let rows = with_pool(|| {
        spec.m_values
            .iter()
            .map(|&m| {
                let hits: usize = (0..spec.trials)
                    .into_par_iter()
                    .map(|t| {
                        let mut rng = stream(spec.seed, &[d as u64, m as u64, t as u64]);
                        let idx = crate::measurement::sample_indices_with(&e, m, &mut rng);
                        usize::from(idx.iter().all(|&i| same[i]))
                    })
                    .sum();
                let empirical = hits as f64 / spec.trials as f64;
                let predicted = (1.0 - p).powi(m as i32);
                let sigma = (predicted * (1.0 - predicted) / spec.trials as f64).sqrt();
                ConverseRow {
                    m,
                    indistinguishable: hits,
                    trials: spec.trials,
                    empirical,
                    predicted,
                    sigma,
                    within_5_sigma: (empirical - predicted).abs() <= 5.0 * sigma.max(1.0 / spec.trials as f64),
                }
            })
            .collect()
    });
    let omegas = spec
        .omegas
        .iter()
        .map(|&omega| {
            let m_star = converse_min_measurements(d, omega);
            let lower_bound = converse_lower_bound(d, omega);
            OmegaRow {
                omega,
                m_star,
                lower_bound,
                satisfies_bound: m_star as f64 >= lower_bound,
                failure_at_m_star: (1.0 - p).powi(m_star as i32),
                failure_before_m_star: (1.0 - p).powi(m_star as i32 - 1),
            }
        })
        .collect();
    Ok(ConverseReport { d, p, rows, omegas })
}

impl ConverseReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_omega_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.omegas {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Moment and tail table for a random signal (stream keyed by `seed`).
pub fn run_moments(d: usize, kind: EnsembleKind, gamma: f64, t: usize, samples: usize, seed: u64) -> Result<MomentReport> {
    let e = kind.build(d, seed)?;
    let x = haar_vector(d, &mut stream(seed, &[0x4d4f_4d, d as u64]));
    moment_tail_experiment(&e, &x, t, gamma, samples, seed)
}

#[derive(Serialize)]
struct MomentCsvRow {
    k: usize,
    exact_moment: f64,
    moment_bound: f64,
    within_bound: bool,
    tail_frequency: f64,
    tail_sigma: f64,
    tail_bound: f64,
}

/// `k,exact_moment,moment_bound,within_bound,tail_frequency,tail_sigma,tail_bound`.
pub fn write_moments_csv<W: Write>(r: &MomentReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in &r.rows {
        w.serialize(MomentCsvRow {
            k: row.k,
            exact_moment: row.exact,
            moment_bound: row.bound,
            within_bound: row.within_bound,
            tail_frequency: r.empirical_tail_frequency,
            tail_sigma: r.tail_sigma,
            tail_bound: r.tail_bound,
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateTrial {
    pub trial: usize,
    pub succeeded: bool,
    pub legs_used: usize,
    pub leg_successes: usize,
    pub measurements: usize,
    pub tangent_error: f64,
    pub complement_norm: f64,
    pub is_valid: bool,
    /// Every recorded `‖Q_i‖₂ ≤ ½ ‖Q_{i−1}‖₂`.
    pub contraction_holds: bool,
    pub span_residual: f64,
    pub lambda_min: f64,
    pub guarantee: bool,
    /// `phase_distance` after [`recover`] on all sampled vectors; only run
    /// when the guarantee holds.
    pub recovery_distance: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateSuiteReport {
    pub d: usize,
    pub ensemble: EnsembleKind,
    pub r: usize,
    pub l: usize,
    pub m_per_leg: usize,
    pub gamma: f64,
    pub success_rate: f64,
    pub leg_success_rate: f64,
    pub cross_validations: usize,
    pub cross_validation_failures: usize,
    pub trials: Vec<CertificateTrial>,
}

/// Runs the golfing scheme `trials` times on random signals and, whenever the
/// combined guarantee holds, checks that the solver recovers the signal to
/// `recovery_tol`.
pub fn run_certificate_suite(
    d: usize,
    kind: EnsembleKind,
    params: &GolfingParams,
    trials: usize,
    seed: u64,
    recovery_tol: f64,
) -> Result<CertificateSuiteReport> {
    params.validate()?;
    let e = kind.build(d, seed)?;
    let results: Vec<CertificateTrial> = with_pool(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let x = haar_vector(d, &mut stream(seed, &[0x4345_5254, d as u64, t as u64]));
                let p = GolfingParams {
                    seed: stream_id(&[params.seed, t as u64]),
                    ..params.clone()
                };
                let run = golfing_certificate(&x, &e, &p)?;
                let g = guarantee_details(&x, &run.vectors, &run.report.y)?;
                let contraction_holds = run
                    .q_sequence
                    .windows(2)
                    .all(|w| w[1].frobenius_norm() <= 0.5 * w[0].frobenius_norm() * (1.0 + 1e-12));
                let recovery_distance = if g.holds {
                    let rec = measure(&x, &run.vectors)?;
                    let res = recover(&rec, &SolverConfig::default())?;
                    Some(phase_distance(&extract_signal(&res).0, &x)?)
                } else {
                    None
                };
                Ok(CertificateTrial {
                    trial: t,
                    succeeded: run.succeeded,
                    legs_used: run.legs.len(),
                    leg_successes: run.legs.iter().filter(|l| l.success).count(),
                    measurements: run.vectors.len(),
                    tangent_error: run.report.tangent_error,
                    complement_norm: run.report.complement_norm,
                    is_valid: run.report.is_valid,
                    contraction_holds,
                    span_residual: span_residual(&run.report.y, &run.vectors),
                    lambda_min: g.lambda_min,
                    guarantee: g.holds,
                    recovery_distance,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let n = results.len().max(1) as f64;
    let legs: usize = results.iter().map(|t| t.legs_used).sum();
    let leg_ok: usize = results.iter().map(|t| t.leg_successes).sum();
    let cross: Vec<f64> = results.iter().filter_map(|t| t.recovery_distance).collect();
    Ok(CertificateSuiteReport {
        d,
        ensemble: kind,
        r: params.r,
        l: params.l,
        m_per_leg: params.m_per_leg,
        gamma: params.gamma,
        success_rate: results.iter().filter(|t| t.succeeded).count() as f64 / n,
        leg_success_rate: leg_ok as f64 / legs.max(1) as f64,
        cross_validations: cross.len(),
        cross_validation_failures: cross.iter().filter(|&&dist| !(dist <= recovery_tol)).count(),
        trials: results,
    })
}

impl CertificateSuiteReport {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "trial",
            "r",
            "succeeded",
            "legs_used",
            "leg_successes",
            "measurements",
            "tangent_error",
            "complement_norm",
            "is_valid",
            "contraction_holds",
            "span_residual",
            "lambda_min",
            "guarantee",
            "recovery_distance",
        ])?;
        for t in &self.trials {
            w.write_record([
                t.trial.to_string(),
                self.r.to_string(),
                t.succeeded.to_string(),
                t.legs_used.to_string(),
                t.leg_successes.to_string(),
                t.measurements.to_string(),
                t.tangent_error.to_string(),
                t.complement_norm.to_string(),
                t.is_valid.to_string(),
                t.contraction_holds.to_string(),
                t.span_residual.to_string(),
                t.lambda_min.to_string(),
                t.guarantee.to_string(),
                t.recovery_distance.map(|v| v.to_string()).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ensemble_kind_parsing() {
        for k in EnsembleKind::ALL {
            assert_eq!(k.name().parse::<EnsembleKind>().unwrap(), k);
        }
        assert_eq!("Projected-Stabilizer".parse::<EnsembleKind>().unwrap(), EnsembleKind::ProjectedStabilizer);
        assert!("fourier".parse::<EnsembleKind>().is_err());
        assert!(EnsembleKind::Stabilizer.build(6, 0).is_err());
        assert_eq!(EnsembleKind::ProjectedStabilizer.build(16, 0).unwrap().len(), 36720);
        assert!(EnsembleKind::Stabilizer.build(32, 0).is_err());
    }

    #[test]
    fn qubit_cell_matches_axis_coverage() {
        // Recovery at d = 2 from octahedron states succeeds exactly when all
        // three Bloch axes are sampled: P = 1 − 3(2/3)^m + 3(1/3)^m.
        let mut spec = PhaseDiagramSpec::new(vec![2], vec![1, 6], EnsembleKind::Stabilizer, 3);
        spec.trials_per_cell = 300;
        let res = run_phase_diagram(&spec).unwrap();
        assert_eq!(res.frequency(2, 1), Some(0.0));
        let p = 1.0 - 3.0 * (2.0f64 / 3.0).powi(6) + 3.0 * (1.0f64 / 3.0).powi(6);
        let sigma = (p * (1.0 - p) / 300.0).sqrt();
        let f = res.frequency(2, 6).unwrap();
        assert!((f - p).abs() <= 5.0 * sigma, "{f} vs {p}");
    }

    #[test]
    fn phase_diagram_csv_is_reproducible_and_sized() {
        let mut spec = PhaseDiagramSpec::new(vec![2, 3], vec![2, 4, 8], EnsembleKind::ProjectedStabilizer, 11);
        spec.trials_per_cell = 4;
        let a = run_phase_diagram(&spec).unwrap();
        let b = run_phase_diagram(&spec).unwrap();
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        a.write_csv(&mut ca).unwrap();
        b.write_csv(&mut cb).unwrap();
        assert_eq!(ca, cb);
        let text = String::from_utf8(ca).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "d,m,trials,successes,frequency,mean_iterations");
        assert_eq!(lines.len(), 1 + 6);
        for c in &a.cells {
            assert_eq!(c.frequency, c.successes as f64 / c.trials as f64);
        }
    }

    #[test]
    fn svg_has_cells_and_red_line() {
        let mut spec = PhaseDiagramSpec::new(vec![2, 3], (1..=10).collect(), EnsembleKind::ProjectedStabilizer, 1);
        spec.trials_per_cell = 1;
        let svg = run_phase_diagram(&spec).unwrap().to_svg();
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<rect x=").count(), 20);
        assert!(svg.contains("stroke=\"red\""));
        // 4d − 4 = 4 and 8, i.e. columns 3 and 7.
        assert!(svg.contains("points=\"82.0,46.0 130.0,58.0\""), "{svg}");
    }

    #[test]
    fn fractional_index_interpolates() {
        assert_eq!(fractional_index(&[4, 8, 16], 12.0), Some(1.5));
        assert_eq!(fractional_index(&[4, 8, 16], 3.0), None);
        assert_eq!(fractional_index(&[4], 4.0), Some(0.0));
    }

    #[test]
    fn converse_arithmetic() {
        assert_eq!(converse_lower_bound(3, 1.0), 3.0);
        for d in [2usize, 3, 5, 7, 11] {
            for omega in [0.5, 1.0, 2.0, 3.0] {
                let m = converse_min_measurements(d, omega);
                let p = converse_hit_probability(d);
                assert!((m as f64) * -(1.0 - p).ln() >= omega);
                assert!(((m - 1) as f64) * -(1.0 - p).ln() < omega);
                assert!(m as f64 >= converse_lower_bound(d, omega));
            }
        }
        assert!(matches!(
            run_converse(&ConverseSpec { d: 4, m_values: vec![1], omegas: vec![], trials: 1, seed: 0 }),
            Err(Error::NotPrime(4))
        ));
    }

    #[test]
    fn converse_matches_geometric_law() {
        let spec = ConverseSpec {
            d: 3,
            m_values: vec![0, 1, 6, 20],
            omegas: vec![1.0, 2.0, 3.0],
            trials: 10_000,
            seed: 5,
        };
        let r = run_converse(&spec).unwrap();
        assert_eq!(r.rows[0].empirical, 1.0);
        for row in &r.rows {
            assert!(row.within_5_sigma, "{row:?}");
        }
        for o in &r.omegas {
            assert!(o.satisfies_bound);
            assert!(o.failure_at_m_star <= (-o.omega).exp());
            assert!(o.failure_before_m_star > (-o.omega).exp());
        }
    }

    #[test]
    fn moments_table() {
        let r = run_moments(4, EnsembleKind::Stabilizer, 1.0 / 3.0, 3, 1000, 2).unwrap();
        assert!(r.mean_error < 1e-12);
        assert!(r.rows.iter().all(|row| row.within_bound));
        let mut buf = Vec::new();
        write_moments_csv(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("k,exact_moment,moment_bound,within_bound,tail_frequency,tail_sigma,tail_bound\n"));
        // γ = 1 − 2/t turns the tail bound into 4^{−t} d^{−2}.
        assert!((r.tail_bound - 4f64.powi(-3) / 16.0).abs() < 1e-15);
        assert!(run_moments(4, EnsembleKind::Haar, 0.0, 2, 10, 1).is_err());
    }

    #[test]
    fn certificate_suite_small() {
        let params = GolfingParams::for_dim(4, 3, 9);
        let rep = run_certificate_suite(4, EnsembleKind::Stabilizer, &params, 3, 1, 1e-5).unwrap();
        assert_eq!(rep.r, 4);
        assert_eq!(rep.trials.len(), 3);
        assert_eq!(rep.cross_validation_failures, 0);
        for t in &rep.trials {
            assert!(t.span_residual <= 1e-8);
            if t.succeeded {
                assert!(t.is_valid && t.contraction_holds);
            }
        }
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 4);
    }
}
