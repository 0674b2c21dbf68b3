//! Sampling from a design and the measurement operators built on the samples.
//!
//! With `A_i = a_i a_i*` the measurement map is `A(Z)_i = tr(A_i Z)`, and the
//! renormalised frame operator is `R = ((d+1)d/m) A*A`, which averages to
//! `I + Π_Id` whenever the `a_i` come from a 2-design.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::designs::{verify_design, DesignEnsemble};
use crate::error::{Error, Result};
use crate::linalg::{herm_to_coords, lift_coords, ComplexVec, HermMat, C64};
use crate::rng::{gaussian_hermitian, stream};

/// Tolerance used when a routine requires its ensemble to be a design.
pub const DESIGN_PRECONDITION_TOL: f64 = 1e-8;

/// Sampled measurement vectors together with the data they produce.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub signal_dim: usize,
    pub vectors: Vec<ComplexVec>,
    /// `y_i = |⟨a_i, x⟩|²`.
    pub amplitudes: Vec<f64>,
    /// `y₀ = ‖x‖²`.
    pub intensity: f64,
    pub seed: u64,
    pub source_label: String,
}

impl MeasurementRecord {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn with_provenance(mut self, seed: u64, label: impl Into<String>) -> Self {
        self.seed = seed;
        self.source_label = label.into();
        self
    }
}

/// Indicators of the events `E_i` and `G_i` (overlap below `5 t d^{−γ}`).
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationFlags {
    pub gamma: f64,
    pub t_order: usize,
    pub threshold: f64,
    pub e_flags: Vec<bool>,
    pub g_flags: Vec<bool>,
}

impl TruncationFlags {
    pub fn kept(&self, i: usize) -> bool {
        self.e_flags[i] && self.g_flags[i]
    }
}

/// `5 t d^{−γ}`.
pub fn truncation_threshold(d: usize, t_order: usize, gamma: f64) -> f64 {
    5.0 * t_order as f64 * (d as f64).powf(-gamma)
}

/// Draws `m` i.i.d. indices with probabilities given by the ensemble weights
/// (inverse CDF over the cumulative weights).
pub fn sample_indices_with<R: Rng + ?Sized>(e: &DesignEnsemble, m: usize, rng: &mut R) -> Vec<usize> {
    let mut cumulative = Vec::with_capacity(e.len());
    let mut acc = 0.0;
    for &w in e.weights() {
        acc += w;
        cumulative.push(acc);
    }
    let total = acc;
    (0..m)
        .map(|_| {
            let u: f64 = rng.random::<f64>() * total;
            cumulative.partition_point(|&c| c <= u).min(e.len() - 1)
        })
        .collect()
}

pub fn sample_indices(e: &DesignEnsemble, m: usize, seed: u64) -> Vec<usize> {
    sample_indices_with(e, m, &mut stream(seed, &[0x5341_4d50]))
}

pub fn sample_vectors_with<R: Rng + ?Sized>(e: &DesignEnsemble, m: usize, rng: &mut R) -> Vec<ComplexVec> {
    sample_indices_with(e, m, rng)
        .into_iter()
        .map(|i| e.vectors()[i].clone())
        .collect()
}

/// `m` vectors drawn i.i.d. (weight-proportional) from `e`.
pub fn sample_vectors(e: &DesignEnsemble, m: usize, seed: u64) -> Vec<ComplexVec> {
    sample_vectors_with(e, m, &mut stream(seed, &[0x5341_4d50]))
}

fn check_vectors(vectors: &[ComplexVec], d: usize) -> Result<()> {
    if vectors.is_empty() {
        return Err(Error::out_of_range("m", 0, ">= 1"));
    }
    match vectors.iter().find(|a| a.dim() != d) {
        Some(a) => Err(Error::DimensionMismatch {
            expected: d,
            found: a.dim(),
        }),
        None => Ok(()),
    }
}

/// Intensity and squared overlaps of the unit signal `x`.
pub fn measure(x: &ComplexVec, vectors: &[ComplexVec]) -> Result<MeasurementRecord> {
    x.ensure_unit()?;
    check_vectors(vectors, x.dim())?;
    let amplitudes = vectors.iter().map(|a| a.inner(x).norm_sqr()).collect();
    Ok(MeasurementRecord {
        signal_dim: x.dim(),
        vectors: vectors.to_vec(),
        amplitudes,
        intensity: x.norm_sqr(),
        seed: 0,
        source_label: String::new(),
    })
}

/// `A(Z)_i = tr(A_i Z) = a_i* Z a_i`.
pub fn apply_a(vectors: &[ComplexVec], z: &HermMat) -> Result<Vec<f64>> {
    check_vectors(vectors, z.dim())?;
    Ok(vectors.iter().map(|a| z.quadratic_form(a)).collect())
}

/// `A*(u) = Σ_i u_i A_i`.
pub fn apply_a_adjoint(vectors: &[ComplexVec], u: &[f64]) -> Result<HermMat> {
    let d = vectors.first().map(|a| a.dim()).unwrap_or(0);
    check_vectors(vectors, d)?;
    if u.len() != vectors.len() {
        return Err(Error::DimensionMismatch {
            expected: vectors.len(),
            found: u.len(),
        });
    }
    let mut acc = DMatrix::<C64>::zeros(d, d);
    for (a, &ui) in vectors.iter().zip(u) {
        if ui != 0.0 {
            let col = a.as_dvector();
            acc.gerc(C64::new(ui, 0.0), col, col, C64::new(1.0, 0.0));
        }
    }
    Ok(HermMat::from_matrix(acc))
}

fn r_scale(d: usize, m: usize) -> f64 {
    ((d + 1) * d) as f64 / m as f64
}

/// `R Z = m⁻¹ Σ_i (d+1)d A_i tr(A_i Z)`.
pub fn apply_r(vectors: &[ComplexVec], z: &HermMat) -> Result<HermMat> {
    let y = apply_a(vectors, z)?;
    let adj = apply_a_adjoint(vectors, &y)?;
    Ok(adj.scale(r_scale(z.dim(), vectors.len())))
}

/// Truncated operator `R_Z`: as [`apply_r`] with term `i` kept only when both
/// `E_i` and `G_i` hold.
pub fn apply_r_truncated(vectors: &[ComplexVec], flags: &TruncationFlags, z: &HermMat) -> Result<HermMat> {
    if flags.e_flags.len() != vectors.len() || flags.g_flags.len() != vectors.len() {
        return Err(Error::DimensionMismatch {
            expected: vectors.len(),
            found: flags.e_flags.len(),
        });
    }
    let mut y = apply_a(vectors, z)?;
    for (i, yi) in y.iter_mut().enumerate() {
        if !flags.kept(i) {
            *yi = 0.0;
        }
    }
    let adj = apply_a_adjoint(vectors, &y)?;
    Ok(adj.scale(r_scale(z.dim(), vectors.len())))
}

/// Flags the events `E_i = {|⟨a_i,x⟩|² < 5 t d^{−γ}}` and
/// `G_i = {|⟨z,a_i⟩|² < 5 t d^{−γ}}`.
pub fn truncation_flags(
    x: &ComplexVec,
    z: &ComplexVec,
    vectors: &[ComplexVec],
    gamma: f64,
    t_order: usize,
) -> Result<TruncationFlags> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::out_of_range("gamma", gamma, "[0, 1]"));
    }
    if t_order == 0 {
        return Err(Error::out_of_range("t", t_order, ">= 1"));
    }
    check_vectors(vectors, x.dim())?;
    if z.dim() != x.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: z.dim(),
        });
    }
    let threshold = truncation_threshold(x.dim(), t_order, gamma);
    Ok(TruncationFlags {
        gamma,
        t_order,
        threshold,
        e_flags: vectors.iter().map(|a| a.inner(x).norm_sqr() < threshold).collect(),
        g_flags: vectors.iter().map(|a| z.inner(a).norm_sqr() < threshold).collect(),
    })
}

/// Requires `e` to pass the `t`-design check at [`DESIGN_PRECONDITION_TOL`].
pub fn require_design(e: &DesignEnsemble, t: usize) -> Result<()> {
    let report = verify_design(e, t, DESIGN_PRECONDITION_TOL)?;
    if report.passed {
        Ok(())
    } else {
        Err(Error::NotADesign {
            label: e.label().to_string(),
            order: t,
            deviation: (report.frame_potential - report.target_potential)
                .abs()
                .max(report.operator_deviation.unwrap_or(0.0)),
        })
    }
}

/// `E[R]` over the ensemble weights, as a `d² × d²` matrix in the
/// orthonormal Hermitian coordinates of [`herm_to_coords`].
pub fn expected_r_superoperator(e: &DesignEnsemble) -> DMatrix<f64> {
    let d = e.dim();
    let n = d * d;
    let scale = ((d + 1) * d) as f64;
    let mut acc = DMatrix::<f64>::zeros(n, n);
    for (w, &p) in e.vectors().iter().zip(e.weights()) {
        let c = lift_coords(w);
        acc.ger(scale * p, &c, &c, 1.0);
    }
    acc
}

/// `I + Π_Id` in the same coordinates.
pub fn isotropic_superoperator(d: usize) -> DMatrix<f64> {
    let id = herm_to_coords(&HermMat::identity(d));
    let mut m = DMatrix::<f64>::identity(d * d, d * d);
    m.ger(1.0, &id, &id, 1.0);
    m
}

/// Largest entry of `E[R] − (I + Π_Id)` (exact weighted average).
pub fn isotropy_defect(e: &DesignEnsemble) -> f64 {
    (expected_r_superoperator(e) - isotropic_superoperator(e.dim())).amax()
}

/// Relative residual `‖E[R]Z − (Z + tr(Z) Id)‖₂ / ‖Z‖₂` for the exact weighted
/// average over the ensemble.
pub fn exact_isotropy_residual(e: &DesignEnsemble, z: &HermMat) -> f64 {
    let d = e.dim();
    let scale = ((d + 1) * d) as f64;
    let mut acc = HermMat::zeros(d);
    for (w, &p) in e.vectors().iter().zip(e.weights()) {
        let coeff = scale * p * z.quadratic_form(w);
        acc += &crate::linalg::lift(w).scale(coeff);
    }
    let target = z + &z.pi_id();
    (&acc - &target).frobenius_norm() / z.frobenius_norm()
}

/// Monte-Carlo near-isotropy check: averages `R Z` over `trials` independent
/// batches of `m` samples for a random probe `Z` and returns
/// `‖avg − (Z + tr(Z) Id)‖₂ / ‖Z‖₂`.
pub fn isotropy_residual(e: &DesignEnsemble, trials: usize, m: usize, seed: u64) -> Result<f64> {
    require_design(e, 2)?;
    let mut probe_rng = stream(seed, &[0x5052_4f42]);
    let z = gaussian_hermitian(e.dim(), &mut probe_rng);
    isotropy_residual_for(e, &z, trials, m, seed)
}

/// [`isotropy_residual`] for a caller-chosen probe.
pub fn isotropy_residual_for(e: &DesignEnsemble, z: &HermMat, trials: usize, m: usize, seed: u64) -> Result<f64> {
    if trials == 0 || m == 0 {
        return Err(Error::out_of_range("trials*m", trials * m, ">= 1"));
    }
    let d = e.dim();
    let mut acc = HermMat::zeros(d);
    for trial in 0..trials {
        let mut rng = stream(seed, &[0x4953_4f, trial as u64]);
        let vs = sample_vectors_with(e, m, &mut rng);
        acc += &apply_r(&vs, z)?;
    }
    let avg = acc.scale(1.0 / trials as f64);
    let target = z + &z.pi_id();
    Ok((&avg - &target).frobenius_norm() / z.frobenius_norm())
}

/// `‖E[R_Z − R]‖_op` for the exact weighted ensemble average, where `R_Z` is
/// truncated with respect to `x` and the direction `z`.
pub fn truncation_bias(e: &DesignEnsemble, x: &ComplexVec, z: &ComplexVec, gamma: f64, t_order: usize) -> Result<f64> {
    let flags = truncation_flags(x, z, e.vectors(), gamma, t_order)?;
    let d = e.dim();
    let scale = ((d + 1) * d) as f64;
    let mut acc = DMatrix::<f64>::zeros(d * d, d * d);
    for (i, (w, &p)) in e.vectors().iter().zip(e.weights()).enumerate() {
        if !flags.kept(i) {
            let c = lift_coords(w);
            acc.ger(scale * p, &c, &c, 1.0);
        }
    }
    Ok(psd_operator_norm(acc))
}

/// Sampled estimate of `‖E[R_Z − R]‖_op` from `samples` draws, with a
/// one-sigma scale `(d+1)d √(f(1−f)/n)` where `f` is the truncated fraction.
pub fn truncation_bias_sampled(
    e: &DesignEnsemble,
    x: &ComplexVec,
    z: &ComplexVec,
    gamma: f64,
    t_order: usize,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let vs = sample_vectors(e, samples, seed);
    let flags = truncation_flags(x, z, &vs, gamma, t_order)?;
    let d = e.dim();
    let scale = ((d + 1) * d) as f64;
    let mut acc = DMatrix::<f64>::zeros(d * d, d * d);
    let mut dropped = 0usize;
    for (i, w) in vs.iter().enumerate() {
        if !flags.kept(i) {
            dropped += 1;
            let c = lift_coords(w);
            acc.ger(scale / samples as f64, &c, &c, 1.0);
        }
    }
    let f = dropped as f64 / samples as f64;
    let sigma = scale * (f * (1.0 - f) / samples as f64).sqrt();
    Ok((psd_operator_norm(acc), sigma))
}

fn psd_operator_norm(m: DMatrix<f64>) -> f64 {
    m.symmetric_eigenvalues().iter().fold(0.0_f64, |a, &l| a.max(l.abs()))
}

/// One row of the moment table.
#[derive(Clone, Debug, Serialize)]
pub struct MomentRow {
    pub k: usize,
    /// `E[ξ^k]` from the weighted ensemble sum.
    pub exact: f64,
    /// `k!/d^k`.
    pub bound: f64,
    pub within_bound: bool,
}

/// Moments and tail of `ξ = |⟨a, x⟩|²` for `a` drawn from a design.
#[derive(Clone, Debug, Serialize)]
pub struct MomentReport {
    pub d: usize,
    pub t_order: usize,
    pub gamma: f64,
    pub rows: Vec<MomentRow>,
    /// `|E[ξ] − 1/d|`.
    pub mean_error: f64,
    /// `5 t d^{−γ}`.
    pub threshold: f64,
    /// `4^{−t} d^{−t(1−γ)}`.
    pub tail_bound: f64,
    pub exact_tail_probability: f64,
    pub samples: usize,
    pub empirical_tail_frequency: f64,
    pub tail_sigma: f64,
    pub tail_within_bound: bool,
}

/// `4^{−t} d^{−t(1−γ)}`.
pub fn tail_bound(d: usize, t_order: usize, gamma: f64) -> f64 {
    let t = t_order as f64;
    4f64.powf(-t) * (d as f64).powf(-t * (1.0 - gamma))
}

/// Exact moments `E[ξ^k]` (`k ≤ t`) by weighted sum, plus the empirical
/// frequency of `ξ ≥ 5 t d^{−γ}` over `samples` draws.
pub fn moment_tail_experiment(
    e: &DesignEnsemble,
    x: &ComplexVec,
    t_order: usize,
    gamma: f64,
    samples: usize,
    seed: u64,
) -> Result<MomentReport> {
    x.ensure_unit()?;
    if x.dim() != e.dim() {
        return Err(Error::DimensionMismatch {
            expected: e.dim(),
            found: x.dim(),
        });
    }
    if t_order == 0 {
        return Err(Error::out_of_range("t", t_order, ">= 1"));
    }
    require_design(e, t_order)?;
    let d = e.dim();
    let df = d as f64;
    let overlaps: Vec<f64> = e.vectors().iter().map(|a| a.inner(x).norm_sqr()).collect();
    let rows: Vec<MomentRow> = (1..=t_order)
        .map(|k| {
            let exact: f64 = overlaps
                .iter()
                .zip(e.weights())
                .map(|(xi, p)| p * xi.powi(k as i32))
                .sum();
            let factorial: f64 = (1..=k).map(|j| j as f64).product();
            let bound = factorial / df.powi(k as i32);
            MomentRow {
                k,
                exact,
                bound,
                within_bound: exact <= bound * (1.0 + 1e-12),
            }
        })
        .collect();
    let mean_error = (rows[0].exact - 1.0 / df).abs();
    let threshold = truncation_threshold(d, t_order, gamma);
    let bound = tail_bound(d, t_order, gamma);
    let exact_tail_probability: f64 = overlaps
        .iter()
        .zip(e.weights())
        .filter(|(xi, _)| **xi >= threshold)
        .fold(0.0, |acc, (_, p)| acc + p);
    let idx = sample_indices(e, samples, seed);
    let hits = idx.iter().filter(|&&i| overlaps[i] >= threshold).count();
    let n = samples.max(1) as f64;
    let freq = hits as f64 / n;
    let sigma = (freq * (1.0 - freq) / n).sqrt();
    Ok(MomentReport {
        d,
        t_order,
        gamma,
        rows,
        mean_error,
        threshold,
        tail_bound: bound,
        exact_tail_probability,
        samples,
        empirical_tail_frequency: freq,
        tail_sigma: sigma,
        tail_within_bound: freq <= bound + 5.0 * sigma,
    })
}

/// `m⁻¹ ‖A(Z)‖²`.
pub fn sampling_energy(vectors: &[ComplexVec], z: &HermMat) -> Result<f64> {
    let y = apply_a(vectors, z)?;
    Ok(y.iter().map(|v| v * v).sum::<f64>() / vectors.len() as f64)
}

/// Real `m × d²` matrix whose rows are the coordinates of `A_i`.
pub fn measurement_matrix(vectors: &[ComplexVec]) -> DMatrix<f64> {
    let d = vectors.first().map(|a| a.dim()).unwrap_or(0);
    let mut phi = DMatrix::<f64>::zeros(vectors.len(), d * d);
    for (i, a) in vectors.iter().enumerate() {
        let c: DVector<f64> = lift_coords(a);
        phi.set_row(i, &c.transpose());
    }
    phi
}
