//! Executable versions of the uniqueness argument: injectivity on the tangent
//! space, approximate dual certificates (one-shot and golfing), and the
//! combined predicate that certifies `xx*` as the unique feasible point.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::designs::DesignEnsemble;
use crate::error::{Error, Result};
use crate::linalg::{
    herm_to_coords, lift, lift_coords, tangent_basis, tangent_complement_project, tangent_project, ComplexVec, HermMat,
};
use crate::measurement::{
    apply_a, apply_r, apply_r_truncated, require_design, sample_vectors_with, truncation_flags,
};
use crate::rng::{gaussian_hermitian, stream};

/// Residual allowed in the span-membership test.
pub const SPAN_TOL: f64 = 1e-8;

/// Per-leg sample constant: `m_per_leg = C₁ t d^{2−γ} ln d`. Chosen so that a
/// leg succeeds about 90% of the time at `d = 8`, `t = 3` (measured 0.93).
pub const LEG_CONSTANT: f64 = 12.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GolfingParams {
    pub b: f64,
    pub c: f64,
    /// Required number of successful legs.
    pub r: usize,
    /// Maximum number of legs.
    pub l: usize,
    pub m_per_leg: usize,
    pub gamma: f64,
    pub t_order: usize,
    pub seed: u64,
    /// Skip the design-order and `γ ≤ 1 − 2/t` checks (ablations).
    pub allow_out_of_scope: bool,
}

impl GolfingParams {
    /// `r = ⌈log₂ d⌉ + 2`.
    pub fn default_r(d: usize) -> usize {
        ceil_log2(d) + 2
    }

    /// `C₁ t d^{2−γ} ln d`, at least `2d`.
    pub fn default_m_per_leg(d: usize, t_order: usize, gamma: f64) -> usize {
        let df = d as f64;
        let m = LEG_CONSTANT * t_order as f64 * df.powf(2.0 - gamma) * df.ln().max(1.0);
        (m.ceil() as usize).max(2 * d)
    }

    pub fn for_dim(d: usize, t_order: usize, seed: u64) -> Self {
        let gamma = if t_order >= 2 { 1.0 - 2.0 / t_order as f64 } else { 0.0 };
        let r = Self::default_r(d);
        Self {
            b: 0.125,
            c: 0.5,
            r,
            l: 10 * r,
            m_per_leg: Self::default_m_per_leg(d, t_order, gamma),
            gamma,
            t_order,
            seed,
            allow_out_of_scope: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0 && self.b <= 1.0) {
            return Err(Error::out_of_range("b", self.b, "(0, 1]"));
        }
        if !(self.c >= std::f64::consts::SQRT_2 * self.b) {
            return Err(Error::out_of_range("c", self.c, ">= sqrt(2) b"));
        }
        if self.r == 0 || self.r > self.l {
            return Err(Error::out_of_range("r", self.r, "1 <= r <= l"));
        }
        if self.m_per_leg == 0 {
            return Err(Error::out_of_range("m_per_leg", self.m_per_leg, ">= 1"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::out_of_range("gamma", self.gamma, "[0, 1]"));
        }
        if self.t_order == 0 {
            return Err(Error::out_of_range("t", self.t_order, ">= 1"));
        }
        if !self.allow_out_of_scope {
            if self.t_order < 3 {
                return Err(Error::out_of_range("t", self.t_order, ">= 3"));
            }
            let cap = 1.0 - 2.0 / self.t_order as f64;
            if self.gamma > cap + 1e-15 {
                return Err(Error::out_of_range("gamma", self.gamma, "<= 1 - 2/t"));
            }
        }
        Ok(())
    }
}

fn ceil_log2(d: usize) -> usize {
    let mut k = 0;
    while (1usize << k) < d {
        k += 1;
    }
    k
}

#[derive(Clone, Debug)]
pub struct CertificateReport {
    pub y: HermMat,
    /// `‖P_T Y − X‖₂`.
    pub tangent_error: f64,
    /// `‖P_T^⊥ Y‖_∞`.
    pub complement_norm: f64,
    pub legs_used: usize,
    /// `ξ_i` per leg actually run.
    pub success_flags: Vec<bool>,
    pub is_valid: bool,
}

/// Spectrum of `P_T (R − I − Π_Id) P_T` in an orthonormal tangent basis.
#[derive(Clone, Debug)]
pub struct InjectivitySpectrum {
    pub lambda_min: f64,
    /// Ascending.
    pub spectrum: Vec<f64>,
    /// The `(2d−1) × (2d−1)` matrix itself.
    pub matrix: DMatrix<f64>,
}

pub fn injectivity_spectrum(x: &ComplexVec, vectors: &[ComplexVec]) -> Result<InjectivitySpectrum> {
    x.ensure_unit()?;
    let d = x.dim();
    let tb = tangent_basis(x)?;
    let n = tb.len();
    let m = vectors.len();
    let mut f = DMatrix::<f64>::zeros(m, n);
    for (j, b) in tb.basis.iter().enumerate() {
        let col = apply_a(vectors, b)?;
        f.set_column(j, &DVector::from_vec(col));
    }
    let traces = DVector::from_iterator(n, tb.basis.iter().map(|b| b.trace()));
    let scale = ((d + 1) * d) as f64 / m as f64;
    let mut mat = f.transpose() * &f * scale;
    mat -= DMatrix::<f64>::identity(n, n);
    mat.ger(-1.0, &traces, &traces, 1.0);
    let mut spectrum: Vec<f64> = SymmetricEigen::new(mat.clone()).eigenvalues.iter().copied().collect();
    spectrum.sort_by(f64::total_cmp);
    Ok(InjectivitySpectrum {
        lambda_min: spectrum[0],
        spectrum,
        matrix: mat,
    })
}

/// Checks `m⁻¹ ‖A(Z)‖² ≤ ‖Z‖₂²` on `trials` Gaussian Hermitian `Z`.
pub fn check_upper_bound(vectors: &[ComplexVec], trials: usize, seed: u64) -> Result<bool> {
    let d = match vectors.first() {
        Some(a) => a.dim(),
        None => return Ok(true),
    };
    let mut rng = stream(seed, &[0x5550_5052]);
    for _ in 0..trials {
        let z = gaussian_hermitian(d, &mut rng);
        let y = apply_a(vectors, &z)?;
        let lhs = y.iter().map(|v| v * v).sum::<f64>() / vectors.len() as f64;
        let rhs = z.frobenius_norm().powi(2);
        if lhs > rhs * (1.0 + 1e-12) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `Y = R X − tr(X) Id`.
pub fn oneshot_certificate(x: &ComplexVec, vectors: &[ComplexVec]) -> Result<HermMat> {
    x.ensure_unit()?;
    let big_x = lift(x);
    let rx = apply_r(vectors, &big_x)?;
    Ok(&rx - &HermMat::identity(x.dim()).scale(big_x.trace()))
}

/// Def.-3 bound values for a candidate `Y`.
pub fn verify_certificate(y: &HermMat, x: &ComplexVec) -> Result<CertificateReport> {
    x.ensure_unit()?;
    let big_x = lift(x);
    let yt = tangent_project(x, y)?;
    let tangent_error = (&yt - &big_x).frobenius_norm();
    let complement_norm = tangent_complement_project(x, y)?.operator_norm();
    let d = x.dim() as f64;
    Ok(CertificateReport {
        y: y.clone(),
        tangent_error,
        complement_norm,
        legs_used: 0,
        success_flags: Vec::new(),
        is_valid: tangent_error <= 1.0 / (4.0 * d) && complement_norm <= 0.5,
    })
}

/// Least-squares distance (Frobenius) from `y` to `span(Id, A₁, …, A_m)`.
pub fn span_residual(y: &HermMat, vectors: &[ComplexVec]) -> f64 {
    let d = y.dim();
    let n = d * d;
    let mut gram = DMatrix::<f64>::zeros(n, n);
    let id = herm_to_coords(&HermMat::identity(d));
    gram.ger(1.0, &id, &id, 1.0);
    for a in vectors {
        let c = lift_coords(a);
        gram.ger(1.0, &c, &c, 1.0);
    }
    let eig = SymmetricEigen::new(gram);
    let max = eig.eigenvalues.amax();
    let target = herm_to_coords(y);
    let mut projected = DVector::<f64>::zeros(n);
    for (k, &l) in eig.eigenvalues.iter().enumerate() {
        if l > 1e-12 * max {
            let v = eig.eigenvectors.column(k);
            projected += v * v.dot(&target);
        }
    }
    (target - projected).norm()
}

/// Outcome of the combined check.
#[derive(Clone, Debug, Serialize)]
pub struct GuaranteeOutcome {
    pub lambda_min: f64,
    pub injective: bool,
    pub tangent_error: f64,
    pub complement_norm: f64,
    pub certificate_valid: bool,
    pub span_residual: f64,
    pub in_span: bool,
    pub holds: bool,
}

/// Injectivity at `δ = 1/2`, Def.-3 validity and span membership together.
pub fn guarantee_details(x: &ComplexVec, vectors: &[ComplexVec], y: &HermMat) -> Result<GuaranteeOutcome> {
    let inj = injectivity_spectrum(x, vectors)?;
    let cert = verify_certificate(y, x)?;
    let span_residual = span_residual(y, vectors);
    let injective = inj.lambda_min > -0.5;
    let in_span = span_residual <= SPAN_TOL;
    Ok(GuaranteeOutcome {
        lambda_min: inj.lambda_min,
        injective,
        tangent_error: cert.tangent_error,
        complement_norm: cert.complement_norm,
        certificate_valid: cert.is_valid,
        span_residual,
        in_span,
        holds: injective && cert.is_valid && in_span,
    })
}

pub fn guarantee_check(x: &ComplexVec, vectors: &[ComplexVec], y: &HermMat) -> Result<bool> {
    Ok(guarantee_details(x, vectors, y)?.holds)
}

/// `Q = ζ (x z* + z x*)` for `Q ∈ T`: with `v = Qx − ½(x*Qx) x` one has
/// `Q = x v* + v x*`, so `ζ = ‖v‖` and `z = v/ζ` (`z = x` when `v = 0`).
pub fn tangent_direction(x: &ComplexVec, q: &HermMat) -> (f64, ComplexVec) {
    let qx = q.apply(x);
    let half = 0.5 * q.quadratic_form(x);
    let v = ComplexVec::from_dvector(qx.as_dvector() - x.as_dvector() * nalgebra::Complex::new(half, 0.0));
    let zeta = v.norm();
    if zeta <= 1e-14 {
        (zeta, x.clone())
    } else {
        (zeta, v.scale((1.0 / zeta).into()))
    }
}

/// Per-leg record of a golfing run.
#[derive(Clone, Debug, Serialize)]
pub struct LegRecord {
    pub index: usize,
    pub samples: usize,
    /// Vectors dropped by the two-fold truncation.
    pub truncated: usize,
    /// `‖P_T^⊥(R_Q Q − tr(Q) Id)‖_∞ / ‖Q‖₂`.
    pub golf1_ratio: f64,
    /// `‖P_T(R_Q Q − Q − tr(Q) Id)‖₂ / ‖Q‖₂`.
    pub golf2_ratio: f64,
    pub success: bool,
}

#[derive(Clone, Debug)]
pub struct GolfingRun {
    pub report: CertificateReport,
    pub succeeded: bool,
    /// `[X, Q₁, …]`, one entry per successful leg after the first.
    pub q_sequence: Vec<HermMat>,
    pub legs: Vec<LegRecord>,
    /// Every vector sampled, across all legs.
    pub vectors: Vec<ComplexVec>,
    pub params: GolfingParams,
}

/// Randomised golfing scheme. Legs run while fewer than `r` have succeeded
/// and at most `l` have been tried.
pub fn golfing_certificate(x: &ComplexVec, ensemble: &DesignEnsemble, params: &GolfingParams) -> Result<GolfingRun> {
    params.validate()?;
    x.ensure_unit()?;
    if x.dim() != ensemble.dim() {
        return Err(Error::DimensionMismatch {
            expected: ensemble.dim(),
            found: x.dim(),
        });
    }
    if !params.allow_out_of_scope {
        require_design(ensemble, params.t_order)?;
    }
    let d = x.dim();
    let big_x = lift(x);
    let id = HermMat::identity(d);
    let mut y = HermMat::zeros(d);
    let mut q = big_x.clone();
    let mut q_sequence = vec![q.clone()];
    let mut legs = Vec::new();
    let mut flags = Vec::new();
    let mut all_vectors = Vec::new();
    let mut successes = 0;

    let mut i = 0;
    while i < params.l && successes < params.r {
        let mut rng = stream(params.seed, &[0x474f_4c46, d as u64, i as u64]);
        let vs = sample_vectors_with(ensemble, params.m_per_leg, &mut rng);
        let (_, z) = tangent_direction(x, &q);
        let trunc = truncation_flags(x, &z, &vs, params.gamma, params.t_order)?;
        let truncated = (0..vs.len()).filter(|&k| !trunc.kept(k)).count();
        let rq = apply_r_truncated(&vs, &trunc, &q)?;
        let step = &rq - &id.scale(q.trace());
        let qn = q.frobenius_norm();
        let golf1 = tangent_complement_project(x, &step)?.operator_norm();
        let golf2 = tangent_project(x, &(&step - &q))?.frobenius_norm();
        let success = golf1 <= params.b * qn && golf2 <= params.c * qn;
        if success {
            successes += 1;
            y = &step + &y;
            q = &big_x - &tangent_project(x, &y)?;
            q_sequence.push(q.clone());
        }
        legs.push(LegRecord {
            index: i,
            samples: vs.len(),
            truncated,
            golf1_ratio: golf1 / qn,
            golf2_ratio: golf2 / qn,
            success,
        });
        flags.push(success);
        all_vectors.extend(vs);
        i += 1;
    }

    let mut report = verify_certificate(&y, x)?;
    report.legs_used = legs.len();
    report.success_flags = flags;
    Ok(GolfingRun {
        report,
        succeeded: successes == params.r,
        q_sequence,
        legs,
        vectors: all_vectors,
        params: params.clone(),
    })
}

/// `4^{1−t} d^{2−t(1−γ)}`, the bound on `‖E[R_Z − R]‖`.
pub fn truncation_bias_bound(d: usize, t_order: usize, gamma: f64) -> f64 {
    let t = t_order as f64;
    4f64.powf(1.0 - t) * (d as f64).powf(2.0 - t * (1.0 - gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{mub_maximal, projected_stabilizer_design, stabilizer_states};
    use crate::linalg::C64;
    use crate::measurement::{measure, sample_vectors, sampling_energy, truncation_bias_sampled};
    use crate::rng::haar_vector;
    use crate::solver::{extract_signal, phase_distance, recover, SolverConfig};

    fn random_unit(d: usize, seed: u64) -> ComplexVec {
        haar_vector(d, &mut stream(seed, &[7]))
    }

    #[test]
    fn params_defaults_and_validation() {
        let p = GolfingParams::for_dim(8, 3, 0);
        assert_eq!(p.r, 5);
        assert_eq!(p.l, 50);
        assert!((p.gamma - 1.0 / 3.0).abs() < 1e-15);
        assert!(p.validate().is_ok());
        assert_eq!(GolfingParams::default_r(2), 3);
        assert_eq!(GolfingParams::default_r(5), 5);

        let mut bad = p.clone();
        bad.c = 0.1;
        assert!(bad.validate().is_err());
        let mut bad = p.clone();
        bad.gamma = 0.5;
        assert!(bad.validate().is_err());
        bad.allow_out_of_scope = true;
        assert!(bad.validate().is_ok());
        let mut bad = p.clone();
        bad.r = bad.l + 1;
        assert!(bad.validate().is_err());
        let mut bad = p;
        bad.t_order = 2;
        bad.gamma = 0.0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn full_design_is_exactly_isotropic_on_tangent() {
        let e = mub_maximal(2).unwrap();
        for s in 0..5 {
            let x = random_unit(2, s);
            let inj = injectivity_spectrum(&x, e.vectors()).unwrap();
            assert!(inj.lambda_min.abs() < 1e-10, "{}", inj.lambda_min);
            assert!(inj.spectrum.iter().all(|l| l.abs() < 1e-10));
            let y = oneshot_certificate(&x, e.vectors()).unwrap();
            assert!(y.max_abs_diff(&lift(&x)) < 1e-12);
            assert!(guarantee_check(&x, e.vectors(), &y).unwrap());
        }
    }

    #[test]
    fn single_measurement_is_not_injective() {
        let e = mub_maximal(3).unwrap();
        let x = random_unit(3, 1);
        let vs = vec![e.vectors()[4].clone()];
        let inj = injectivity_spectrum(&x, &vs).unwrap();
        assert!(inj.lambda_min <= -1.0 + 1e-10);
        let y = oneshot_certificate(&x, &vs).unwrap();
        assert!(!guarantee_check(&x, &vs, &y).unwrap());
    }

    #[test]
    fn injectivity_matrix_is_symmetric() {
        let e = stabilizer_states(2).unwrap();
        let x = random_unit(4, 3);
        let vs = sample_vectors(&e, 30, 5);
        let inj = injectivity_spectrum(&x, &vs).unwrap();
        assert_eq!(inj.matrix.nrows(), 7);
        assert!((&inj.matrix - inj.matrix.transpose()).amax() < 1e-10);
    }

    #[test]
    fn injectivity_implies_lower_frame_bound() {
        let e = stabilizer_states(2).unwrap();
        let d = 4;
        let x = random_unit(d, 11);
        let vs = sample_vectors(&e, 800, 2);
        let inj = injectivity_spectrum(&x, &vs).unwrap();
        assert!(inj.lambda_min > -0.5, "{}", inj.lambda_min);
        let mut rng = stream(4, &[1]);
        for _ in 0..100 {
            let z = tangent_project(&x, &gaussian_hermitian(d, &mut rng)).unwrap();
            let energy = sampling_energy(&vs, &z).unwrap();
            assert!(energy > 0.25 / (d * d) as f64 * z.frobenius_norm().powi(2));
        }
    }

    #[test]
    fn injectivity_improves_with_samples() {
        let e = stabilizer_states(2).unwrap();
        let x = random_unit(4, 5);
        let mean = |m: usize| -> f64 {
            (0..8)
                .map(|s| injectivity_spectrum(&x, &sample_vectors(&e, m, 100 + s)).unwrap().lambda_min)
                .sum::<f64>()
                / 8.0
        };
        let (a, b, c) = (mean(10), mean(40), mean(160));
        assert!(a < b && b < c, "{a} {b} {c}");
        assert!(c < 0.0);
    }

    #[test]
    fn upper_bound_always_holds() {
        let e = stabilizer_states(2).unwrap();
        let vs = sample_vectors(&e, 25, 9);
        assert!(check_upper_bound(&vs, 100, 1).unwrap());
        assert!(check_upper_bound(&[], 10, 1).unwrap());
        let id = HermMat::identity(4);
        assert!((sampling_energy(&vs, &id).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(sampling_energy(&vs, &HermMat::zeros(4)).unwrap(), 0.0);
    }

    #[test]
    fn oneshot_is_phase_invariant_and_in_span() {
        let e = stabilizer_states(2).unwrap();
        let x = random_unit(4, 8);
        let vs = sample_vectors(&e, 20, 3);
        let y1 = oneshot_certificate(&x, &vs).unwrap();
        let y2 = oneshot_certificate(&x.scale(C64::from_polar(1.0, 0.9)), &vs).unwrap();
        assert!(y1.max_abs_diff(&y2) < 1e-13);
        assert!(span_residual(&y1, &vs) < SPAN_TOL);
        assert!(span_residual(&lift(&random_unit(4, 99)), &vs[..2]) > 1e-3);
    }

    #[test]
    fn verify_examples() {
        let d = 4;
        let x = ComplexVec::basis(d, 0);
        let r = verify_certificate(&lift(&x), &x).unwrap();
        assert!(r.tangent_error < 1e-15 && r.complement_norm < 1e-15 && r.is_valid);

        let z = ComplexVec::basis(d, 2);
        let r = verify_certificate(&(&lift(&x) + &lift(&z)), &x).unwrap();
        assert!((r.complement_norm - 1.0).abs() < 1e-12);
        assert!(!r.is_valid);

        let mut b = tangent_project(&x, &gaussian_hermitian(d, &mut stream(2, &[0]))).unwrap();
        b = b.scale(1.0 / b.frobenius_norm());
        let y = &lift(&x) + &b.scale(1.0 / (8.0 * d as f64));
        let r = verify_certificate(&y, &x).unwrap();
        assert!((r.tangent_error - 1.0 / (8.0 * d as f64)).abs() < 1e-12);
        assert!(r.complement_norm < 1e-12);
        assert!(r.is_valid);
    }

    #[test]
    fn tangent_direction_reconstructs() {
        let d = 5;
        let x = random_unit(d, 4);
        let mut rng = stream(6, &[0]);
        for _ in 0..20 {
            let q = tangent_project(&x, &gaussian_hermitian(d, &mut rng)).unwrap();
            let (zeta, z) = tangent_direction(&x, &q);
            assert!(z.is_unit());
            let xz = x.as_dvector() * z.as_dvector().adjoint();
            let rebuilt = HermMat::from_matrix(&xz + xz.adjoint()).scale(zeta);
            assert!(rebuilt.max_abs_diff(&q) < 1e-12);
        }
        let (_, z) = tangent_direction(&x, &lift(&x));
        assert!((z.inner(&x).norm() - 1.0).abs() < 1e-12);
        let (zeta, z) = tangent_direction(&x, &HermMat::zeros(d));
        assert_eq!(zeta, 0.0);
        assert_eq!(z, x);
    }

    #[test]
    fn golfing_run_properties() {
        let e = stabilizer_states(3).unwrap();
        let x = random_unit(8, 21);
        let params = GolfingParams::for_dim(8, 3, 17);
        let run = golfing_certificate(&x, &e, &params).unwrap();
        assert_eq!(run.report.legs_used, run.legs.len());
        assert!(span_residual(&run.report.y, &run.vectors) <= SPAN_TOL);
        for q in &run.q_sequence {
            assert!(tangent_project(&x, q).unwrap().max_abs_diff(q) < 1e-10);
        }
        for w in run.q_sequence.windows(2) {
            assert!(w[1].frobenius_norm() <= 0.5 * w[0].frobenius_norm() + 1e-12);
        }
        assert!(run.succeeded, "{:?}", run.legs);
        let bound = 0.5f64.powi(params.r as i32);
        assert!(run.report.tangent_error <= bound + 1e-12);
        assert!(run.report.tangent_error <= 1.0 / 32.0);
        assert!(run.report.complement_norm <= 0.25 + 1e-12);
        assert!(run.report.is_valid);
    }

    #[test]
    fn golfing_requires_design_unless_overridden() {
        let e = mub_maximal(3).unwrap();
        let x = random_unit(3, 2);
        let mut p = GolfingParams::for_dim(3, 3, 1);
        assert!(matches!(golfing_certificate(&x, &e, &p), Err(Error::NotADesign { .. })));
        p.allow_out_of_scope = true;
        assert!(golfing_certificate(&x, &e, &p).is_ok());
    }

    #[test]
    fn guarantee_implies_recovery() {
        let e = projected_stabilizer_design(5).unwrap();
        let x = random_unit(5, 12);
        let run = golfing_certificate(&x, &e, &GolfingParams::for_dim(5, 3, 4)).unwrap();
        if guarantee_check(&x, &run.vectors, &run.report.y).unwrap() {
            let rec = measure(&x, &run.vectors).unwrap();
            let res = recover(&rec, &SolverConfig::default()).unwrap();
            let (xh, _) = extract_signal(&res);
            assert!(phase_distance(&xh, &x).unwrap() <= 1e-5);
        } else {
            panic!("guarantee did not hold: {:?}", run.legs);
        }
    }

    #[test]
    fn truncation_bias_under_bound() {
        // The threshold 5t d^{−γ} only drops below 1 once d > (5t)^{1/γ}, so at
        // this size nothing is truncated and the estimate is exactly zero.
        let e = stabilizer_states(2).unwrap();
        let x = ComplexVec::basis(4, 0);
        let z = ComplexVec::basis(4, 1);
        for &gamma in &[1.0 / 3.0, 1.0] {
            let (est, sigma) = truncation_bias_sampled(&e, &x, &z, gamma, 3, 20_000, 3).unwrap();
            let bound = truncation_bias_bound(4, 3, gamma);
            assert!(est <= bound + 5.0 * sigma, "{gamma}: {est} {bound} {sigma}");
        }
    }
}
