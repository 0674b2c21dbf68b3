//! Brute-force tensor-power constructions and the closed-form partial traces
//! they cross-check.
//!
//! Tensor indices are flattened row-major in mixed radix: the basis state
//! `|i_1 … i_k⟩` of `(C^d)^{⊗k}` sits at `Σ_j i_j d^{k−j}`. Dense tensors are
//! only built when `d^k ≤ 4096`; everything larger goes through the closed
//! forms.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::designs::DesignEnsemble;
use crate::error::{Error, Result};
use crate::linalg::{frobenius_inner_unchecked, HermMat, C64};
use crate::rng::gaussian_hermitian;

/// Largest tensor-space dimension the oracle will materialise.
pub const TENSOR_GUARD: usize = 4096;

/// An operator on `(C^d)^{⊗k}`.
#[derive(Clone, Debug)]
pub struct TensorMat {
    dim: usize,
    order: usize,
    mat: DMatrix<C64>,
}

fn guarded_size(d: usize, k: usize) -> Result<usize> {
    let mut n: usize = 1;
    for _ in 0..k {
        n = n
            .checked_mul(d)
            .filter(|&n| n <= TENSOR_GUARD)
            .ok_or(Error::ResourceGuard { dim: d, order: k })?;
    }
    Ok(n)
}

impl TensorMat {
    pub fn zeros(d: usize, k: usize) -> Result<Self> {
        let n = guarded_size(d, k)?;
        Ok(Self {
            dim: d,
            order: k,
            mat: DMatrix::zeros(n, n),
        })
    }

    pub fn identity(d: usize, k: usize) -> Result<Self> {
        let n = guarded_size(d, k)?;
        Ok(Self {
            dim: d,
            order: k,
            mat: DMatrix::identity(n, n),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            mat: &self.mat * C64::new(s, 0.0),
            ..self.clone()
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat - &other.mat,
            ..self.clone()
        }
    }

    /// Largest eigenvalue magnitude; the operator must be Hermitian.
    pub fn hermitian_operator_norm(&self) -> f64 {
        let h = HermMat::from_matrix(self.mat.clone());
        h.operator_norm()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat)
            .iter()
            .fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// `‖P² − P‖_max` and `‖P − P*‖_max`.
    pub fn projector_defects(&self) -> (f64, f64) {
        let sq = &self.mat * &self.mat;
        let idem = (&sq - &self.mat).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        let herm = (&self.mat - self.mat.adjoint())
            .iter()
            .fold(0.0_f64, |a, z| a.max(z.norm()));
        (idem, herm)
    }

    /// `tr_{2..k}`: trace out every factor but the first.
    pub fn partial_trace_rest(&self) -> HermMat {
        let d = self.dim;
        let rest = self.mat.nrows() / d;
        let mut out = DMatrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                let mut s = C64::new(0.0, 0.0);
                for r in 0..rest {
                    s += self.mat[(a * rest + r, b * rest + r)];
                }
                out[(a, b)] = s;
            }
        }
        HermMat::from_matrix(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            mat: &self.mat * &other.mat,
            ..self.clone()
        }
    }
}

/// `binom(d + k − 1, k)`.
pub fn dim_sym(d: usize, k: usize) -> usize {
    binomial(d + k - 1, k)
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n.saturating_sub(k));
    (0..k).fold(1usize, |acc, j| acc * (n - j) / (j + 1))
}

fn digits(mut index: usize, d: usize, k: usize) -> Vec<usize> {
    let mut out = vec![0; k];
    for slot in (0..k).rev() {
        out[slot] = index % d;
        index /= d;
    }
    out
}

fn flatten(digits: &[usize], d: usize) -> usize {
    digits.iter().fold(0, |acc, &i| acc * d + i)
}

/// The operator sending `|i_1 … i_k⟩` to `|i_{perm[0]} … i_{perm[k−1]}⟩`.
pub fn permutation_operator(d: usize, perm: &[usize]) -> Result<TensorMat> {
    let k = perm.len();
    let mut t = TensorMat::zeros(d, k)?;
    let n = t.mat.nrows();
    for col in 0..n {
        let src = digits(col, d, k);
        let dst: Vec<usize> = perm.iter().map(|&p| src[p]).collect();
        t.mat[(flatten(&dst, d), col)] = C64::new(1.0, 0.0);
    }
    Ok(t)
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// `P_{Sym^k} = (1/k!) Σ_π σ_π`.
pub fn symmetrizer(d: usize, k: usize) -> Result<TensorMat> {
    let mut acc = TensorMat::zeros(d, k)?;
    let perms = permutations(k);
    let w = 1.0 / perms.len() as f64;
    for p in &perms {
        let sigma = permutation_operator(d, p)?;
        acc.mat += sigma.mat * C64::new(w, 0.0);
    }
    Ok(acc)
}

/// `A_1 ⊗ … ⊗ A_k`.
pub fn tensor_product(factors: &[&HermMat]) -> Result<TensorMat> {
    let d = factors.first().map(|f| f.dim()).unwrap_or(1);
    for f in factors {
        if f.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: f.dim(),
            });
        }
    }
    guarded_size(d, factors.len())?;
    let mut mat = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    for f in factors {
        mat = mat.kronecker(f.as_matrix());
    }
    Ok(TensorMat {
        dim: d,
        order: factors.len(),
        mat,
    })
}

fn check_same_dim(ms: &[&HermMat]) -> Result<()> {
    let d = ms[0].dim();
    match ms.iter().find(|m| m.dim() != d) {
        Some(m) => Err(Error::DimensionMismatch {
            expected: d,
            found: m.dim(),
        }),
        None => Ok(()),
    }
}

fn product(a: &HermMat, b: &HermMat) -> DMatrix<C64> {
    a.as_matrix() * b.as_matrix()
}

/// `tr_2(P_{Sym²} A ⊗ B) = ½ (tr(B) A + BA)`.
///
/// `BA` is not Hermitian in general, so the result is a plain matrix.
pub fn ptrace_sym2_closed(a: &HermMat, b: &HermMat) -> Result<DMatrix<C64>> {
    check_same_dim(&[a, b])?;
    let tb = C64::new(b.trace(), 0.0);
    Ok((a.as_matrix() * tb + product(b, a)) * C64::new(0.5, 0.0))
}

/// `tr_{2,3}(P_{Sym³} A ⊗ B ⊗ C)`
/// `= (1/6)(A tr B tr C + BA tr C + CA tr B + A tr(BC) + CBA + BCA)`.
pub fn ptrace_sym3_closed(a: &HermMat, b: &HermMat, c: &HermMat) -> Result<DMatrix<C64>> {
    check_same_dim(&[a, b, c])?;
    let tb = C64::new(b.trace(), 0.0);
    let tc = C64::new(c.trace(), 0.0);
    let tbc = C64::new(frobenius_inner_unchecked(b, c), 0.0);
    let am = a.as_matrix();
    let ba = product(b, a);
    let ca = product(c, a);
    let cba = c.as_matrix() * &ba;
    let bca = b.as_matrix() * &ca;
    let sum = am * (tb * tc) + ba * tc + ca * tb + am * tbc + cba + bca;
    Ok(sum * C64::new(1.0 / 6.0, 0.0))
}

/// Brute-force `tr_{2..k}(P_{Sym^k} F_1 ⊗ … ⊗ F_k)`.
pub fn ptrace_sym_bruteforce(factors: &[&HermMat]) -> Result<DMatrix<C64>> {
    let d = factors[0].dim();
    let t = tensor_product(factors)?;
    let p = symmetrizer(d, factors.len())?;
    let prod = p.mul(&t);
    // Not Hermitian in general; trace out by hand.
    let rest = prod.mat.nrows() / d;
    Ok(DMatrix::from_fn(d, d, |a, b| {
        (0..rest).map(|r| prod.mat[(a * rest + r, b * rest + r)]).sum()
    }))
}

/// `Σ_i p_i (w_i w_i*)^{⊗k}`.
pub fn design_moment_lhs(ensemble: &DesignEnsemble, k: usize) -> Result<TensorMat> {
    let d = ensemble.dim();
    let mut acc = TensorMat::zeros(d, k)?;
    let n = acc.mat.nrows();
    let mut power = vec![C64::new(0.0, 0.0); n];
    for (w, &p) in ensemble.vectors().iter().zip(ensemble.weights()) {
        let e = w.entries();
        for (idx, slot) in power.iter_mut().enumerate() {
            *slot = digits(idx, d, k)
                .iter()
                .fold(C64::new(1.0, 0.0), |acc, &i| acc * e[i]);
        }
        for col in 0..n {
            let c = power[col].conj() * p;
            if c == C64::new(0.0, 0.0) {
                continue;
            }
            for row in 0..n {
                acc.mat[(row, col)] += power[row] * c;
            }
        }
    }
    Ok(acc)
}

/// Checks the `Π_Id` identities on random inputs: `(d⁻¹Π_Id)² = d⁻¹Π_Id` and
/// `0 ≤ (Z, Π_Id Z) ≤ d (Z, Z)`.
pub fn pi_id_check(d: usize) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5049_4944 ^ d as u64);
    let inv_d = 1.0 / d as f64;
    (0..32).all(|_| {
        let z = gaussian_hermitian(d, &mut rng);
        let once = z.pi_id().scale(inv_d);
        let twice = once.pi_id().scale(inv_d);
        let scale = 1.0 + z.frobenius_norm();
        let idempotent = twice.max_abs_diff(&once) <= 1e-12 * scale;
        let form = frobenius_inner_unchecked(&z, &z.pi_id());
        let norm_sq = frobenius_inner_unchecked(&z, &z);
        let ordered = form >= -1e-12 * scale && form <= d as f64 * norm_sq + 1e-12 * scale;
        idempotent && ordered
    })
}
