//! The lifted convex program and signal extraction.
//!
//! Recovery looks for `X ⪰ 0` with `tr(A_i X) = y_i` and `tr X = y₀`. For a
//! PSD matrix `‖X‖₁ = tr X`, so once the trace is pinned the trace-norm
//! objective is constant and the program is a pure feasibility problem: find
//! a point in the intersection of an affine subspace and the trace-slice of
//! the PSD cone. Both sets have cheap projections, and we combine them with
//! relaxed Douglas–Rachford splitting (averaged reflections).
//!
//! The `TraceMin` variant drops the intensity constraint and minimises
//! `tr X` over `{A(X) = y, X ⪰ 0}` with the same splitting.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    coords_to_herm, herm_to_coords, leading_eigpair, lift, lift_coords, psd_trace_project, ComplexVec, HermMat,
};
use crate::measurement::MeasurementRecord;
use crate::rng::{gaussian_hermitian, stream};

/// Relative pseudo-inverse cutoff for the constraint Gram matrix.
pub const PINV_CUTOFF: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SolverVariant {
    /// `A(X) = y`, `tr X = y₀`, `X ⪰ 0`.
    Feasibility,
    /// `min tr X` subject to `A(X) = y`, `X ⪰ 0`.
    TraceMin,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverConfig {
    pub variant: SolverVariant,
    pub max_iters: usize,
    /// Relative residual tolerance.
    pub tol: f64,
    /// Douglas–Rachford relaxation, in `(0, 2)`.
    pub relaxation: f64,
    /// Seed for the random initial point.
    pub seed: u64,
    /// Proximal step on the trace objective (`TraceMin` only).
    pub objective_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            variant: SolverVariant::Feasibility,
            max_iters: 5000,
            tol: 1e-9,
            relaxation: 1.0,
            seed: 0,
            objective_step: 0.1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::out_of_range("max_iters", self.max_iters, ">= 1"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::out_of_range("tol", self.tol, "> 0"));
        }
        if !(self.relaxation > 0.0 && self.relaxation < 2.0) {
            return Err(Error::out_of_range("relaxation", self.relaxation, "(0, 2)"));
        }
        if !(self.objective_step > 0.0) {
            return Err(Error::out_of_range("objective_step", self.objective_step, "> 0"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub x_hat: HermMat,
    /// `‖A(X̂) − y‖ / ‖y‖`.
    pub affine_residual: f64,
    /// Mass of negative eigenvalues of `X̂`.
    pub cone_residual: f64,
    /// `|tr X̂ − y₀|`.
    pub trace_gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Largest normalised residual after each iteration.
    pub residual_history: Vec<f64>,
}

/// Projection onto `{X : Φ(X) = b}` in Hermitian coordinates,
/// `v ↦ N v + x₀` with `N = I − Φ⁺Φ` and `x₀ = Φ⁺ b`.
struct AffineProjector {
    null_proj: DMatrix<f64>,
    offset: DVector<f64>,
}

fn symmetric_pinv(g: DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(g);
    let max = eig.eigenvalues.iter().fold(0.0_f64, |a, &l| a.max(l.abs()));
    let cutoff = PINV_CUTOFF * max;
    let inv = eig
        .eigenvalues
        .map(|l| if l.abs() > cutoff && l.abs() > 0.0 { 1.0 / l } else { 0.0 });
    let scaled = DMatrix::from_fn(eig.eigenvectors.nrows(), eig.eigenvectors.ncols(), |i, j| {
        eig.eigenvectors[(i, j)] * inv[j]
    });
    scaled * eig.eigenvectors.transpose()
}

impl AffineProjector {
    fn new(phi: &DMatrix<f64>, rhs: &DVector<f64>) -> Self {
        let n = phi.ncols();
        let pinv = if phi.nrows() <= n {
            phi.transpose() * symmetric_pinv(phi * phi.transpose())
        } else {
            symmetric_pinv(phi.transpose() * phi) * phi.transpose()
        };
        let null_proj = DMatrix::<f64>::identity(n, n) - &pinv * phi;
        let offset = &pinv * rhs;
        Self { null_proj, offset }
    }

    fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.null_proj * v + &self.offset
    }
}

struct Problem {
    d: usize,
    phi_meas: DMatrix<f64>,
    y: DVector<f64>,
    y_norm: f64,
    intensity: f64,
}

impl Problem {
    fn new(record: &MeasurementRecord) -> Result<Self> {
        let d = record.signal_dim;
        if d == 0 {
            return Err(Error::out_of_range("d", d, ">= 1"));
        }
        if record.amplitudes.len() != record.vectors.len() {
            return Err(Error::DimensionMismatch {
                expected: record.vectors.len(),
                found: record.amplitudes.len(),
            });
        }
        let mut phi = DMatrix::<f64>::zeros(record.vectors.len(), d * d);
        for (i, a) in record.vectors.iter().enumerate() {
            if a.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: a.dim(),
                });
            }
            phi.set_row(i, &lift_coords(a).transpose());
        }
        let y = DVector::from_column_slice(&record.amplitudes);
        let y_norm = y.norm();
        Ok(Self {
            d,
            phi_meas: phi,
            y,
            y_norm,
            intensity: record.intensity,
        })
    }

    fn affine_set(&self, with_trace: bool) -> AffineProjector {
        if !with_trace {
            return AffineProjector::new(&self.phi_meas, &self.y);
        }
        let m = self.phi_meas.nrows();
        let n = self.phi_meas.ncols();
        let mut phi = DMatrix::<f64>::zeros(m + 1, n);
        phi.set_row(0, &herm_to_coords(&HermMat::identity(self.d)).transpose());
        phi.view_mut((1, 0), (m, n)).copy_from(&self.phi_meas);
        let mut rhs = DVector::<f64>::zeros(m + 1);
        rhs[0] = self.intensity;
        rhs.rows_mut(1, m).copy_from(&self.y);
        AffineProjector::new(&phi, &rhs)
    }

    fn affine_residual(&self, v: &DVector<f64>) -> f64 {
        let r = (&self.phi_meas * v - &self.y).norm();
        if self.y_norm > 0.0 {
            r / self.y_norm
        } else {
            r
        }
    }
}

fn negative_mass(values: &[f64]) -> f64 {
    values.iter().filter(|&&l| l < 0.0).fold(0.0, |acc, l| acc - l)
}

/// Shrinks eigenvalues by `step` and clips at zero: the prox of
/// `step·tr(X) + ι_{X ⪰ 0}`.
fn shrink_psd(m: &HermMat, step: f64) -> HermMat {
    let (values, vectors) = m.eigh();
    let shrunk: Vec<f64> = values.iter().map(|&l| (l - step).max(0.0)).collect();
    HermMat::from_spectrum(&shrunk, &vectors)
}

/// Solves the lifted program for `record`. Non-convergence is reported
/// through `converged = false`, not as an error.
pub fn recover(record: &MeasurementRecord, cfg: &SolverConfig) -> Result<SolverResult> {
    cfg.validate()?;
    let problem = Problem::new(record)?;
    let d = problem.d;
    let y0 = problem.intensity;
    let with_trace = cfg.variant == SolverVariant::Feasibility;
    let affine = problem.affine_set(with_trace);

    let mut init_rng = stream(cfg.seed, &[0x494e_4954, d as u64]);
    let start = gaussian_hermitian(d, &mut init_rng);
    let start = start.scale(y0.max(1e-3) / start.frobenius_norm().max(1e-300));
    let mut z = herm_to_coords(&start);

    let scale = y0.abs().max(1.0);
    let mut history = Vec::new();
    let mut last = None;
    for iter in 1..=cfg.max_iters {
        let xa = affine.project(&z);
        let reflected = coords_to_herm(&(&xa * 2.0 - &z), d);
        let xc_mat = match cfg.variant {
            SolverVariant::Feasibility => psd_trace_project(&reflected, y0),
            SolverVariant::TraceMin => shrink_psd(&reflected, cfg.objective_step),
        };
        let xc = herm_to_coords(&xc_mat);
        let step = &xc - &xa;
        z += &step * cfg.relaxation;

        let affine_residual = problem.affine_residual(&xc);
        let trace_gap = (xc_mat.trace() - y0).abs();
        let worst = match cfg.variant {
            SolverVariant::Feasibility => affine_residual.max(trace_gap / scale),
            SolverVariant::TraceMin => affine_residual.max(step.norm() / scale),
        };
        history.push(worst);
        let done = worst <= cfg.tol;
        last = Some((xc_mat, affine_residual, trace_gap, iter));
        if done {
            break;
        }
    }

    let (x_hat, affine_residual, trace_gap, iterations) = last.expect("max_iters >= 1");
    let cone_residual = negative_mass(&x_hat.eigenvalues());
    let converged = affine_residual <= cfg.tol
        && cone_residual <= cfg.tol * x_hat.operator_norm().max(1e-300)
        && (!with_trace || trace_gap <= cfg.tol * scale)
        && history.last().is_some_and(|&w| w <= cfg.tol);
    Ok(SolverResult {
        x_hat,
        affine_residual,
        cone_residual,
        trace_gap,
        iterations,
        converged,
        residual_history: history,
    })
}

/// `x̂ = √λ₁ v₁` (phase-canonical) and the eigengap `λ₁ − λ₂`.
pub fn extract_signal(res: &SolverResult) -> (ComplexVec, f64) {
    extract_from_matrix(&res.x_hat)
}

pub fn extract_from_matrix(x_hat: &HermMat) -> (ComplexVec, f64) {
    let values = x_hat.eigenvalues();
    let (l1, v1) = leading_eigpair(x_hat);
    let gap = if values.len() > 1 { values[0] - values[1] } else { values[0] };
    let amp = l1.max(0.0).sqrt();
    (v1.scale(amp.into()), gap)
}

/// `‖uu* − vv*‖₂`, computed on the lifted matrices.
pub fn phase_distance(u: &ComplexVec, v: &ComplexVec) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    Ok((&lift(u) - &lift(v)).frobenius_norm())
}

/// `‖X̂ − xx*‖₂`.
pub fn lifted_error(x_hat: &HermMat, x: &ComplexVec) -> f64 {
    (x_hat - &lift(x)).frobenius_norm()
}
