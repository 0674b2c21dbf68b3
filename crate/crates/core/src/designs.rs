//! Complex projective t-designs: construction and certification.
//!
//! A [`DesignEnsemble`] is a finite, weighted set of unit vectors. The exact
//! constructions are maximal sets of mutually unbiased bases in prime
//! dimension (2-designs), the multi-qubit stabilizer states (3-designs) and
//! weighted 3-designs obtained by truncating stabilizer states to `d < 2^n`
//! coordinates. Haar ensembles serve as an approximate baseline.

use std::collections::HashSet;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{ComplexVec, HermMat, C64};
use crate::rng::{haar_vector, stream};
use crate::tensor::{binomial, dim_sym, TENSOR_GUARD};

/// Finite weighted set of unit vectors in `C^d` claiming design order `t`.
#[derive(Clone, Debug)]
pub struct DesignEnsemble {
    dim: usize,
    order_claim: usize,
    vectors: Vec<ComplexVec>,
    weights: Vec<f64>,
    label: String,
}

impl DesignEnsemble {
    /// Validates unit norms, dimensions and normalised nonnegative weights.
    pub fn new(
        order_claim: usize,
        vectors: Vec<ComplexVec>,
        weights: Vec<f64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let label = label.into();
        let Some(first) = vectors.first() else {
            return Err(Error::InvalidEnsemble(format!("'{label}' has no vectors")));
        };
        let dim = first.dim();
        if dim == 0 {
            return Err(Error::InvalidEnsemble("dimension must be positive".into()));
        }
        if weights.len() != vectors.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} weights for {} vectors",
                weights.len(),
                vectors.len()
            )));
        }
        for (k, v) in vectors.iter().enumerate() {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
            if !v.is_unit() {
                return Err(Error::InvalidEnsemble(format!(
                    "vector {k} has norm {}",
                    v.norm()
                )));
            }
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidEnsemble("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        Ok(Self {
            dim,
            order_claim,
            vectors,
            weights,
            label,
        })
    }

    /// Uniform weights `1/N`.
    pub fn uniform(vectors: Vec<ComplexVec>, order_claim: usize, label: impl Into<String>) -> Result<Self> {
        let n = vectors.len().max(1);
        let w = 1.0 / n as f64;
        Self::new(order_claim, vectors, vec![w; n], label)
    }

    /// Weights proportional to `raw` (normalised here).
    pub fn weighted(
        vectors: Vec<ComplexVec>,
        raw: &[f64],
        order_claim: usize,
        label: impl Into<String>,
    ) -> Result<Self> {
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidEnsemble("weights sum to zero".into()));
        }
        let weights = raw.iter().map(|w| w / total).collect();
        Self::new(order_claim, vectors, weights, label)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order_claim(&self) -> usize {
        self.order_claim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[ComplexVec] {
        &self.vectors
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Weighted first-moment-style average `Σ_i p_i f(w_i)`.
    pub fn expectation<F: Fn(&ComplexVec) -> f64>(&self, f: F) -> f64 {
        self.vectors
            .iter()
            .zip(&self.weights)
            .map(|(v, p)| p * f(v))
            .sum()
    }
}

/// Outcome of a design check.
#[derive(Clone, Debug, Serialize)]
pub struct DesignReport {
    pub order_tested: usize,
    pub frame_potential: f64,
    pub target_potential: f64,
    /// `‖Σ p_i (w_i w_i*)^{⊗t} − P_{Sym^t}/dim Sym^t‖_∞`, absent above the
    /// tensor guard.
    pub operator_deviation: Option<f64>,
    pub passed: bool,
    pub tolerance: f64,
}

/// Trial division; adequate for the small dimensions used here.
pub fn is_prime(n: usize) -> bool {
    if n < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= n {
        if n.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// A maximal set of `d + 1` mutually unbiased bases for prime `d`.
///
/// For `d = 2` these are the eigenbases of the three Pauli operators. For odd
/// `d`, basis `a` has vectors `d^{-1/2} ω^{a j² + b j}` (`ω = e^{2πi/d}`), and the
/// standard basis completes the set. Vectors are grouped basis by basis, the
/// standard basis first.
pub fn mub_maximal(d: usize) -> Result<DesignEnsemble> {
    if !is_prime(d) {
        return Err(Error::NotPrime(d));
    }
    let mut vectors: Vec<ComplexVec> = (0..d).map(|k| ComplexVec::basis(d, k)).collect();
    if d == 2 {
        let h = FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| C64::new(re, im);
        vectors.push(ComplexVec::from_vec(vec![c(h, 0.0), c(h, 0.0)]));
        vectors.push(ComplexVec::from_vec(vec![c(h, 0.0), c(-h, 0.0)]));
        vectors.push(ComplexVec::from_vec(vec![c(h, 0.0), c(0.0, h)]));
        vectors.push(ComplexVec::from_vec(vec![c(h, 0.0), c(0.0, -h)]));
    } else {
        let amp = 1.0 / (d as f64).sqrt();
        for a in 0..d {
            for b in 0..d {
                let entries = (0..d)
                    .map(|j| {
                        let exponent = (a * j * j + b * j) % d;
                        C64::from_polar(amp, 2.0 * PI * exponent as f64 / d as f64)
                    })
                    .collect();
                vectors.push(ComplexVec::from_vec(entries));
            }
        }
    }
    DesignEnsemble::uniform(vectors, 2, format!("mub(d={d})"))
}

/// Number of `n`-qubit stabilizer states, `2^n Π_{k=1}^{n} (2^k + 1)`.
pub fn stabilizer_count(n: usize) -> usize {
    (1..=n).fold(1usize << n, |acc, k| acc * ((1usize << k) + 1))
}

enum Gate {
    H(usize),
    S(usize),
    Cnot(usize, usize),
}

fn apply_gate(state: &[C64], gate: &Gate, n: usize) -> Vec<C64> {
    // Qubit 0 is the most significant bit of the basis index.
    let bit = |q: usize| 1usize << (n - 1 - q);
    let mut out = vec![C64::new(0.0, 0.0); state.len()];
    match *gate {
        Gate::H(q) => {
            let m = bit(q);
            for (i, &amp) in state.iter().enumerate() {
                let i0 = i & !m;
                let i1 = i | m;
                let s = amp * FRAC_1_SQRT_2;
                out[i0] += s;
                out[i1] += if i & m == 0 { s } else { -s };
            }
        }
        Gate::S(q) => {
            let m = bit(q);
            for (i, &amp) in state.iter().enumerate() {
                out[i] = if i & m == 0 { amp } else { amp * C64::new(0.0, 1.0) };
            }
        }
        Gate::Cnot(c, t) => {
            let (mc, mt) = (bit(c), bit(t));
            for (i, &amp) in state.iter().enumerate() {
                let j = if i & mc != 0 { i ^ mt } else { i };
                out[j] = amp;
            }
        }
    }
    out
}

/// Key identifying a state up to global phase.
fn phase_key(state: &[C64]) -> Vec<i64> {
    let pivot = state
        .iter()
        .position(|z| z.norm() > 1e-9)
        .expect("stabilizer states are nonzero");
    let phase = state[pivot].conj() / state[pivot].norm();
    state
        .iter()
        .flat_map(|z| {
            let w = z * phase;
            [(w.re * 1e8).round() as i64, (w.im * 1e8).round() as i64]
        })
        .collect()
}

/// All `n`-qubit stabilizer states (`1 ≤ n ≤ 3`), enumerated as the orbit of
/// `|0…0⟩` under Hadamard, phase and CNOT gates, deduplicated up to global
/// phase. Breadth-first order, so the output is deterministic.
pub fn stabilizer_states(n: usize) -> Result<DesignEnsemble> {
    if !(1..=3).contains(&n) {
        return Err(Error::out_of_range("qubits", n, "1..=3"));
    }
    enumerate_stabilizers(n)
}

/// Largest qubit count [`stabilizer_states_large`] will enumerate.
pub const MAX_ENUMERATED_QUBITS: usize = 4;

/// As [`stabilizer_states`] but up to [`MAX_ENUMERATED_QUBITS`] qubits
/// (36720 states at `n = 4`), for sampling experiments at `d = 16`.
pub fn stabilizer_states_large(n: usize) -> Result<DesignEnsemble> {
    if !(1..=MAX_ENUMERATED_QUBITS).contains(&n) {
        return Err(Error::out_of_range("qubits", n, "1..=4"));
    }
    enumerate_stabilizers(n)
}

fn enumerate_stabilizers(n: usize) -> Result<DesignEnsemble> {
    let d = 1usize << n;
    let mut gates = Vec::new();
    for q in 0..n {
        gates.push(Gate::H(q));
        gates.push(Gate::S(q));
    }
    for c in 0..n {
        for t in 0..n {
            if c != t {
                gates.push(Gate::Cnot(c, t));
            }
        }
    }

    let mut start = vec![C64::new(0.0, 0.0); d];
    start[0] = C64::new(1.0, 0.0);
    let mut seen = HashSet::new();
    seen.insert(phase_key(&start));
    let mut states = vec![start.clone()];
    let mut frontier = vec![start];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for s in &frontier {
            for g in &gates {
                let t = apply_gate(s, g, n);
                if seen.insert(phase_key(&t)) {
                    states.push(t.clone());
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    let vectors = states.into_iter().map(ComplexVec::from_vec).collect();
    DesignEnsemble::uniform(vectors, 3, format!("stabilizer(n={n})"))
}

/// Weighted 3-design in dimension `2 ≤ d ≤ 8` from stabilizer states of the
/// next power of two.
///
/// Each state is truncated to its first `d` coordinates, zero vectors are
/// dropped, and the rest are renormalised with weight `‖P v‖^6`. Since
/// `P^{⊗3} P_{Sym³}(2^n) P^{⊗3} = P_{Sym³}(d)`, those weights reproduce the third
/// moment exactly (and hence the first and second).
pub fn projected_stabilizer_design(d: usize) -> Result<DesignEnsemble> {
    if !(2..=8).contains(&d) {
        return Err(Error::out_of_range("d", d, "2..=8"));
    }
    let n = d.next_power_of_two().trailing_zeros() as usize;
    if d == 1 << n {
        return stabilizer_states(n);
    }
    let parent = stabilizer_states(n)?;
    let mut vectors = Vec::new();
    let mut raw = Vec::new();
    for v in parent.vectors() {
        let truncated = ComplexVec::from_vec(v.entries()[..d].to_vec());
        let norm_sq = truncated.norm_sqr();
        if norm_sq < 1e-12 {
            continue;
        }
        raw.push(norm_sq.powi(3));
        vectors.push(truncated.normalized().expect("nonzero"));
    }
    DesignEnsemble::weighted(vectors, &raw, 3, format!("projected_stabilizer(d={d})"))
}

/// `N` Haar-random unit vectors; an approximate design (`order_claim = 0`).
pub fn haar_ensemble(d: usize, n: usize, seed: u64) -> Result<DesignEnsemble> {
    if n == 0 {
        return Err(Error::out_of_range("N", n, ">= 1"));
    }
    let mut rng = stream(seed, &[0x4841_4152, d as u64]);
    let vectors = (0..n).map(|_| haar_vector(d, &mut rng)).collect();
    DesignEnsemble::uniform(vectors, 0, format!("haar(d={d},N={n},seed={seed})"))
}

/// `Σ_{i,j} p_i p_j |⟨w_i, w_j⟩|^{2t}`.
pub fn frame_potential(e: &DesignEnsemble, t: usize) -> f64 {
    let vs = e.vectors();
    let ps = e.weights();
    let exp = t as i32;
    let rows: Vec<f64> = (0..vs.len())
        .into_par_iter()
        .map(|i| {
            let row: f64 = vs
                .iter()
                .zip(ps)
                .map(|(w, p)| p * vs[i].inner(w).norm_sqr().powi(exp))
                .sum();
            ps[i] * row
        })
        .collect();
    rows.iter().sum()
}

/// Multisets of size `t` over `0..d`, as sorted index tuples.
fn multisets(d: usize, t: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i, d, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, t, &mut Vec::new(), &mut out);
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `‖Σ p_i (w_i w_i*)^{⊗t} − P_{Sym^t}/dim Sym^t‖_∞`.
///
/// Both operators are supported on `Sym^t`, so the norm is evaluated on the
/// orthonormal basis of symmetrized multiset states: there `w^{⊗t}` has
/// coordinates `√(#arrangements) Π_j w_{s_j}` and the symmetrizer is the
/// identity.
pub fn moment_operator_deviation(e: &DesignEnsemble, t: usize) -> f64 {
    let d = e.dim();
    let sets = multisets(d, t);
    let dsym = sets.len();
    let coeffs: Vec<f64> = sets
        .iter()
        .map(|s| {
            let mut counts = vec![0usize; d];
            for &i in s {
                counts[i] += 1;
            }
            let arrangements = factorial(t) / counts.iter().map(|&c| factorial(c)).product::<f64>();
            arrangements.sqrt()
        })
        .collect();
    let mut acc = nalgebra::DMatrix::<C64>::zeros(dsym, dsym);
    let mut u = nalgebra::DVector::<C64>::zeros(dsym);
    for (w, &p) in e.vectors().iter().zip(e.weights()) {
        let entries = w.entries();
        for (k, s) in sets.iter().enumerate() {
            u[k] = s.iter().fold(C64::new(coeffs[k], 0.0), |a, &i| a * entries[i]);
        }
        acc.ger(C64::new(p, 0.0), &u, &u.conjugate(), C64::new(1.0, 0.0));
    }
    for k in 0..dsym {
        acc[(k, k)] -= C64::new(1.0 / dsym as f64, 0.0);
    }
    HermMat::from_matrix(acc).operator_norm()
}

fn tensor_space_fits(d: usize, t: usize) -> bool {
    (0..t)
        .try_fold(1usize, |n, _| n.checked_mul(d).filter(|&n| n <= TENSOR_GUARD))
        .is_some()
}

/// Frame-potential (and, within the tensor guard, operator) check of the
/// `t`-design property.
pub fn verify_design(e: &DesignEnsemble, t: usize, tol: f64) -> Result<DesignReport> {
    if t == 0 {
        return Err(Error::out_of_range("t", t, ">= 1"));
    }
    let frame = frame_potential(e, t);
    let target = 1.0 / dim_sym(e.dim(), t) as f64;
    let operator_deviation = tensor_space_fits(e.dim(), t).then(|| moment_operator_deviation(e, t));
    let passed = (frame - target).abs() <= tol && operator_deviation.is_none_or(|dev| dev <= tol);
    Ok(DesignReport {
        order_tested: t,
        frame_potential: frame,
        target_potential: target,
        operator_deviation,
        passed,
        tolerance: tol,
    })
}

/// Lower bound on the size of a `t`-design in `C^d`:
/// `binom(d + ⌈t/2⌉ − 1, ⌈t/2⌉) · binom(d + ⌊t/2⌋ − 1, ⌊t/2⌋)`.
pub fn min_design_size(d: usize, t: usize) -> usize {
    let hi = t.div_ceil(2);
    let lo = t / 2;
    binomial(d + hi - 1, hi) * binomial(d + lo - 1, lo)
}
