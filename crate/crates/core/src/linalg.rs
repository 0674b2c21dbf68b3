//! Complex vectors, Hermitian matrices and the tangent space of rank-one
//! projectors.
//!
//! `HermMat` is the lifted variable space: every constructor symmetrizes via
//! `(M + M*) / 2`, so downstream eigensolvers always see an exactly Hermitian
//! array. Norms are Schatten norms computed from the spectrum.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerance on `| ‖v‖ − 1 |` for a vector to count as unit.
pub const UNIT_TOL: f64 = 1e-12;

/// Relative tolerance for spectral computations.
pub const EIG_TOL: f64 = 1e-10;

/// A vector in `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexVec(DVector<C64>);

impl ComplexVec {
    pub fn from_dvector(v: DVector<C64>) -> Self {
        Self(v)
    }

    pub fn from_vec(entries: Vec<C64>) -> Self {
        Self(DVector::from_vec(entries))
    }

    pub fn from_reals(entries: &[f64]) -> Self {
        Self(DVector::from_iterator(
            entries.len(),
            entries.iter().map(|&r| C64::new(r, 0.0)),
        ))
    }

    pub fn zeros(d: usize) -> Self {
        Self(DVector::zeros(d))
    }

    /// The standard basis vector `e_k` of `C^d`.
    pub fn basis(d: usize, k: usize) -> Self {
        let mut v = DVector::zeros(d);
        v[k] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_dvector(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn entries(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn is_unit(&self) -> bool {
        (self.norm() - 1.0).abs() <= UNIT_TOL
    }

    pub fn ensure_unit(&self) -> Result<()> {
        if self.is_unit() {
            Ok(())
        } else {
            Err(Error::NotUnit { norm: self.norm() })
        }
    }

    /// `self / ‖self‖`; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| Self(&self.0 / C64::new(n, 0.0)))
    }

    /// Inner product `⟨self, other⟩ = self* other` (antilinear in `self`).
    pub fn inner(&self, other: &Self) -> C64 {
        self.0.dotc(&other.0)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    /// Rotate the global phase so the largest-magnitude entry is real and
    /// nonnegative. Ties go to the lowest index.
    pub fn phase_canonical(&self) -> Self {
        let mut best = 0;
        let mut best_abs = -1.0;
        for (k, z) in self.0.iter().enumerate() {
            let a = z.norm();
            if a > best_abs * (1.0 + 1e-12) {
                best = k;
                best_abs = a;
            }
        }
        if best_abs <= 0.0 {
            return self.clone();
        }
        let phase = self.0[best].conj() / best_abs;
        Self(&self.0 * phase)
    }
}

impl fmt::Display for ComplexVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, z) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:.6}{:+.6}i", z.re, z.im)?;
        }
        write!(f, "]")
    }
}

/// Which Schatten norm to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchattenOrder {
    /// Sum of singular values.
    Trace,
    /// `√tr(M²)`.
    Frobenius,
    /// Largest singular value.
    Operator,
}

/// A `d × d` Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermMat(DMatrix<C64>);

impl HermMat {
    /// Symmetrizes `m` as `(m + m*) / 2`. Panics if `m` is not square.
    pub fn from_matrix(m: DMatrix<C64>) -> Self {
        assert!(m.is_square(), "HermMat requires a square matrix");
        let adj = m.adjoint();
        Self((m + adj) * C64::new(0.5, 0.0))
    }

    pub fn zeros(d: usize) -> Self {
        Self(DMatrix::zeros(d, d))
    }

    pub fn identity(d: usize) -> Self {
        Self(DMatrix::identity(d, d))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut m = DMatrix::zeros(d, d);
        for (k, &v) in diag.iter().enumerate() {
            m[(k, k)] = C64::new(v, 0.0);
        }
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|k| self.0[(k, k)].re).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * C64::new(s, 0.0))
    }

    /// `self · v`.
    pub fn apply(&self, v: &ComplexVec) -> ComplexVec {
        ComplexVec(&self.0 * v.as_dvector())
    }

    /// `v* self v` (real for Hermitian `self`).
    pub fn quadratic_form(&self, v: &ComplexVec) -> f64 {
        v.as_dvector().dotc(&(&self.0 * v.as_dvector())).re
    }

    /// Frobenius norm `‖M‖₂`, computed entrywise.
    pub fn frobenius_norm(&self) -> f64 {
        self.0.norm()
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermiticity_defect(&self) -> f64 {
        let adj = self.0.adjoint();
        (&self.0 - adj).iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Eigen-decomposition with eigenvalues sorted in descending order and
    /// eigenvectors as matching columns. The sort is stable, so degenerate
    /// eigenvalues keep the solver's column order.
    pub fn eigh(&self) -> (Vec<f64>, DMatrix<C64>) {
        let d = self.dim();
        let eig = SymmetricEigen::new(self.0.clone());
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let vectors = DMatrix::from_fn(d, d, |i, j| eig.eigenvectors[(i, order[j])]);
        (values, vectors)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.0.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().last().copied().unwrap_or(0.0)
    }

    /// Rebuilds `Σ_k λ_k v_k v_k*` from a spectrum and eigenvector columns.
    pub fn from_spectrum(values: &[f64], vectors: &DMatrix<C64>) -> Self {
        let scaled = DMatrix::from_fn(vectors.nrows(), vectors.ncols(), |i, j| {
            vectors[(i, j)] * values[j]
        });
        Self::from_matrix(scaled * vectors.adjoint())
    }

    pub fn schatten_norm(&self, order: SchattenOrder) -> f64 {
        match order {
            SchattenOrder::Frobenius => self.frobenius_norm(),
            SchattenOrder::Trace => self.eigenvalues().iter().map(|l| l.abs()).sum(),
            SchattenOrder::Operator => self
                .eigenvalues()
                .iter()
                .fold(0.0_f64, |acc, l| acc.max(l.abs())),
        }
    }

    pub fn trace_norm(&self) -> f64 {
        self.schatten_norm(SchattenOrder::Trace)
    }

    pub fn operator_norm(&self) -> f64 {
        self.schatten_norm(SchattenOrder::Operator)
    }

    /// `Π_Id Z = Id · tr(Z)`.
    pub fn pi_id(&self) -> Self {
        Self::identity(self.dim()).scale(self.trace())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            })
        }
    }
}

impl Add for &HermMat {
    type Output = HermMat;
    fn add(self, rhs: &HermMat) -> HermMat {
        HermMat(&self.0 + &rhs.0)
    }
}

impl Sub for &HermMat {
    type Output = HermMat;
    fn sub(self, rhs: &HermMat) -> HermMat {
        HermMat(&self.0 - &rhs.0)
    }
}

impl Add for HermMat {
    type Output = HermMat;
    fn add(self, rhs: HermMat) -> HermMat {
        HermMat(self.0 + rhs.0)
    }
}

impl Sub for HermMat {
    type Output = HermMat;
    fn sub(self, rhs: HermMat) -> HermMat {
        HermMat(self.0 - rhs.0)
    }
}

impl AddAssign<&HermMat> for HermMat {
    fn add_assign(&mut self, rhs: &HermMat) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&HermMat> for HermMat {
    fn sub_assign(&mut self, rhs: &HermMat) {
        self.0 -= &rhs.0;
    }
}

impl Mul<f64> for &HermMat {
    type Output = HermMat;
    fn mul(self, s: f64) -> HermMat {
        self.scale(s)
    }
}

impl Mul<f64> for HermMat {
    type Output = HermMat;
    fn mul(self, s: f64) -> HermMat {
        HermMat(self.0 * C64::new(s, 0.0))
    }
}

impl Neg for HermMat {
    type Output = HermMat;
    fn neg(self) -> HermMat {
        HermMat(-self.0)
    }
}

/// `v v*`.
pub fn lift(v: &ComplexVec) -> HermMat {
    let col = v.as_dvector();
    HermMat::from_matrix(col * col.adjoint())
}

pub fn schatten_norm(m: &HermMat, order: SchattenOrder) -> f64 {
    m.schatten_norm(order)
}

/// Frobenius inner product `(A, B) = tr(AB)`.
pub fn frobenius_inner(a: &HermMat, b: &HermMat) -> Result<f64> {
    a.check_dim(b)?;
    Ok(frobenius_inner_unchecked(a, b))
}

pub(crate) fn frobenius_inner_unchecked(a: &HermMat, b: &HermMat) -> f64 {
    // tr(AB) = Σ_ij A_ij B_ji = Σ_ij A_ij conj(B_ij) for Hermitian B.
    a.0.iter()
        .zip(b.0.iter())
        .map(|(x, y)| (x * y.conj()).re)
        .sum()
}

/// `P_T Z = XZ + ZX − tr(XZ) X` with `X = x x*`.
pub fn tangent_project(x: &ComplexVec, z: &HermMat) -> Result<HermMat> {
    x.ensure_unit()?;
    if x.dim() != z.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: z.dim(),
        });
    }
    Ok(tangent_project_unchecked(x, z))
}

pub(crate) fn tangent_project_unchecked(x: &ComplexVec, z: &HermMat) -> HermMat {
    // XZ = x (Zx)*, ZX = (Zx) x*, tr(XZ) = x* Z x.
    let xv = x.as_dvector();
    let w = z.as_matrix() * xv;
    let s = xv.dotc(&w).re;
    let m = xv * w.adjoint() + &w * xv.adjoint() - xv * xv.adjoint() * C64::new(s, 0.0);
    HermMat::from_matrix(m)
}

/// `P_T^⊥ Z = Z − P_T Z`.
pub fn tangent_complement_project(x: &ComplexVec, z: &HermMat) -> Result<HermMat> {
    Ok(z - &tangent_project(x, z)?)
}

/// An orthonormal (Frobenius) basis of the tangent space at `x x*`.
#[derive(Clone, Debug)]
pub struct TangentBasis {
    pub anchor: ComplexVec,
    pub basis: Vec<HermMat>,
}

impl TangentBasis {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Coordinates of `z` in the basis (`(B_k, z)`).
    pub fn coordinates(&self, z: &HermMat) -> Vec<f64> {
        self.basis
            .iter()
            .map(|b| frobenius_inner_unchecked(b, z))
            .collect()
    }

    /// `Σ_k c_k B_k`.
    pub fn combine(&self, coeffs: &[f64]) -> HermMat {
        let d = self.anchor.dim();
        coeffs
            .iter()
            .zip(&self.basis)
            .fold(HermMat::zeros(d), |acc, (&c, b)| acc + b.scale(c))
    }
}

/// Gram–Schmidt in Frobenius geometry over the generators `X`,
/// `x e_k* + e_k x*` and `i(x e_k* − e_k x*)`, keeping `2d − 1` elements.
pub fn tangent_basis(x: &ComplexVec) -> Result<TangentBasis> {
    x.ensure_unit()?;
    let d = x.dim();
    let xv = x.as_dvector();
    let i = C64::new(0.0, 1.0);

    let mut generators = vec![lift(x)];
    for k in 0..d {
        let ek = ComplexVec::basis(d, k);
        let outer = xv * ek.as_dvector().adjoint();
        let outer_adj = outer.adjoint();
        generators.push(HermMat::from_matrix(&outer + &outer_adj));
        generators.push(HermMat::from_matrix((&outer - &outer_adj) * i));
    }

    let mut basis: Vec<HermMat> = Vec::with_capacity(2 * d - 1);
    for g in generators {
        if basis.len() == 2 * d - 1 {
            break;
        }
        let mut v = g;
        // Two passes of classical Gram–Schmidt for stability.
        for _ in 0..2 {
            for b in &basis {
                let c = frobenius_inner_unchecked(b, &v);
                v -= &b.scale(c);
            }
        }
        let n = v.frobenius_norm();
        if n > 1e-8 {
            basis.push(v.scale(1.0 / n));
        }
    }
    Ok(TangentBasis {
        anchor: x.clone(),
        basis,
    })
}

/// Largest eigenvalue and a unit, phase-canonical eigenvector.
pub fn leading_eigpair(m: &HermMat) -> (f64, ComplexVec) {
    let (values, vectors) = m.eigh();
    let v = ComplexVec::from_dvector(vectors.column(0).into_owned());
    (values[0], v.phase_canonical())
}

/// Euclidean projection of `values` onto `{λ ≥ 0, Σ λ = target}`.
pub fn simplex_project(values: &[f64], target: f64) -> Vec<f64> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (k, &v) in sorted.iter().enumerate() {
        cumulative += v;
        let t = (cumulative - target) / (k + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    values.iter().map(|&v| (v - theta).max(0.0)).collect()
}

/// Frobenius-nearest PSD matrix with trace exactly `target_trace`.
pub fn psd_trace_project(m: &HermMat, target_trace: f64) -> HermMat {
    let (values, vectors) = m.eigh();
    let projected = simplex_project(&values, target_trace.max(0.0));
    HermMat::from_spectrum(&projected, &vectors)
}

/// Frobenius-nearest PSD matrix (negative eigenvalues clipped).
pub fn psd_project(m: &HermMat) -> HermMat {
    let (values, vectors) = m.eigh();
    let clipped: Vec<f64> = values.iter().map(|&v| v.max(0.0)).collect();
    HermMat::from_spectrum(&clipped, &vectors)
}

/// Orthonormal real coordinates for `H^d`: diagonal entries, then
/// `√2·Re` and `√2·Im` of the strict upper triangle. The Frobenius inner
/// product becomes the Euclidean dot product.
pub fn herm_to_coords(m: &HermMat) -> DVector<f64> {
    let d = m.dim();
    let s2 = std::f64::consts::SQRT_2;
    let mut out = DVector::zeros(d * d);
    let mut k = 0;
    for i in 0..d {
        out[k] = m.0[(i, i)].re;
        k += 1;
    }
    for i in 0..d {
        for j in (i + 1)..d {
            out[k] = s2 * m.0[(i, j)].re;
            out[k + 1] = s2 * m.0[(i, j)].im;
            k += 2;
        }
    }
    out
}

/// Inverse of [`herm_to_coords`].
pub fn coords_to_herm(c: &DVector<f64>, d: usize) -> HermMat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = DMatrix::zeros(d, d);
    let mut k = 0;
    for i in 0..d {
        m[(i, i)] = C64::new(c[k], 0.0);
        k += 1;
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let z = C64::new(h * c[k], h * c[k + 1]);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    HermMat(m)
}

/// Coordinates of `a a*` without forming the matrix.
pub fn lift_coords(a: &ComplexVec) -> DVector<f64> {
    let d = a.dim();
    let e = a.entries();
    let s2 = std::f64::consts::SQRT_2;
    let mut out = DVector::zeros(d * d);
    let mut k = 0;
    for z in e {
        out[k] = z.norm_sqr();
        k += 1;
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let z = e[i] * e[j].conj();
            out[k] = s2 * z.re;
            out[k + 1] = s2 * z.im;
            k += 2;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian_hermitian, haar_vector, stream};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn lift_of_basis_vectors() {
        let x = lift(&ComplexVec::basis(2, 0));
        assert_eq!(x, HermMat::from_real_diagonal(&[1.0, 0.0]));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = lift(&ComplexVec::from_reals(&[s, s]));
        for z in p.as_matrix().iter() {
            assert!((z - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn lift_trace_rank_and_positivity() {
        let mut rng = stream(7, &[1]);
        for d in 1..6 {
            let v = haar_vector(d, &mut rng).scale(c(1.7, -0.3));
            let l = lift(&v);
            assert!((l.trace() - v.norm_sqr()).abs() < 1e-12);
            let ev = l.eigenvalues();
            assert!(ev.iter().skip(1).all(|x| x.abs() < 1e-12));
            assert!(ev[d - 1] > -1e-12);
        }
    }

    #[test]
    fn schatten_norm_examples() {
        assert!((HermMat::identity(3).schatten_norm(SchattenOrder::Trace) - 3.0).abs() < 1e-14);
        let m = HermMat::from_real_diagonal(&[2.0, -1.0]);
        assert!((m.schatten_norm(SchattenOrder::Operator) - 2.0).abs() < 1e-14);
        assert!((m.schatten_norm(SchattenOrder::Trace) - 3.0).abs() < 1e-14);
        assert!((m.schatten_norm(SchattenOrder::Frobenius) - 5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn frobenius_inner_matches_entrywise_sum() {
        let mut rng = stream(3, &[]);
        assert_eq!(
            frobenius_inner(&HermMat::identity(4), &HermMat::identity(4)).unwrap(),
            4.0
        );
        for d in 1..6 {
            let a = gaussian_hermitian(d, &mut rng);
            let b = gaussian_hermitian(d, &mut rng);
            let mut oracle = 0.0;
            for i in 0..d {
                for j in 0..d {
                    oracle += (a.as_matrix()[(i, j)].conj() * b.as_matrix()[(i, j)]).re;
                }
            }
            let got = frobenius_inner(&a, &b).unwrap();
            assert!((got - oracle).abs() < 1e-12 * (1.0 + oracle.abs()));
            let sym = frobenius_inner(&b, &a).unwrap();
            assert!((got - sym).abs() < 1e-12 * (1.0 + oracle.abs()));
        }
        assert!(matches!(
            frobenius_inner(&HermMat::identity(2), &HermMat::identity(3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn orthogonal_projectors_have_zero_inner_product() {
        let x = lift(&ComplexVec::basis(3, 0));
        let z = lift(&ComplexVec::basis(3, 2));
        assert_eq!(frobenius_inner(&x, &z).unwrap(), 0.0);
    }

    #[test]
    fn tangent_projection_examples() {
        let mut rng = stream(11, &[]);
        let x = haar_vector(4, &mut rng);
        let xx = lift(&x);
        assert!(tangent_project(&x, &xx).unwrap().max_abs_diff(&xx) < 1e-14);

        let e0 = ComplexVec::basis(3, 0);
        let e2 = ComplexVec::basis(3, 2);
        let zz = lift(&e2);
        assert!(tangent_project(&e0, &zz).unwrap().frobenius_norm() < 1e-15);
        assert!(tangent_complement_project(&e0, &zz).unwrap().max_abs_diff(&zz) < 1e-15);
        assert!(
            tangent_complement_project(&e0, &lift(&e0))
                .unwrap()
                .frobenius_norm()
                < 1e-15
        );

        let bad = ComplexVec::from_reals(&[1.0, 1.0]);
        assert!(matches!(
            tangent_project(&bad, &HermMat::identity(2)),
            Err(Error::NotUnit { .. })
        ));
    }

    #[test]
    fn tangent_projector_is_idempotent_and_self_adjoint() {
        let mut rng = stream(12, &[]);
        for trial in 0..100 {
            let d = 2 + trial % 4;
            let x = haar_vector(d, &mut rng);
            let a = gaussian_hermitian(d, &mut rng);
            let b = gaussian_hermitian(d, &mut rng);
            let pa = tangent_project(&x, &a).unwrap();
            let ppa = tangent_project(&x, &pa).unwrap();
            assert!(pa.max_abs_diff(&ppa) < 1e-10);
            let pb = tangent_project(&x, &b).unwrap();
            let lhs = frobenius_inner(&pa, &b).unwrap();
            let rhs = frobenius_inner(&a, &pb).unwrap();
            assert!((lhs - rhs).abs() < 1e-10);
            let sum = &pa + &tangent_complement_project(&x, &a).unwrap();
            assert!(sum.max_abs_diff(&a) < 1e-12);
        }
    }

    #[test]
    fn tangent_pi_id_tangent_equals_pi_x() {
        // P_T Π_Id P_T Z = X tr(XZ).
        let mut rng = stream(13, &[]);
        for trial in 0..100 {
            let d = 2 + trial % 5;
            let x = haar_vector(d, &mut rng);
            let z = gaussian_hermitian(d, &mut rng);
            let xx = lift(&x);
            let pz = tangent_project(&x, &z).unwrap();
            let lhs = tangent_project(&x, &pz.pi_id()).unwrap();
            let rhs = xx.scale(frobenius_inner(&xx, &z).unwrap());
            assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        }
    }

    #[test]
    fn tangent_basis_dimension_and_orthonormality() {
        let mut rng = stream(14, &[]);
        assert_eq!(tangent_basis(&ComplexVec::basis(2, 0)).unwrap().len(), 3);
        for d in 1..7 {
            let x = haar_vector(d, &mut rng);
            let tb = tangent_basis(&x).unwrap();
            assert_eq!(tb.len(), 2 * d - 1);
            assert!(tb.basis[0].max_abs_diff(&lift(&x)) < 1e-12);
            for (j, bj) in tb.basis.iter().enumerate() {
                assert!(tangent_project(&x, bj).unwrap().max_abs_diff(bj) < 1e-10);
                for (k, bk) in tb.basis.iter().enumerate() {
                    let g = frobenius_inner(bj, bk).unwrap();
                    let want = if j == k { 1.0 } else { 0.0 };
                    assert!((g - want).abs() < 1e-10);
                }
            }
            // Elements of T satisfy tr(Z) = tr(XZ).
            let coeffs: Vec<f64> = (0..tb.len()).map(|k| (k as f64 * 0.37).sin()).collect();
            let z = tb.combine(&coeffs);
            let xx = lift(&x);
            assert!((z.trace() - frobenius_inner(&xx, &z).unwrap()).abs() < 1e-10);
        }
        assert_eq!(tangent_basis(&haar_vector(4, &mut rng)).unwrap().len(), 7);
    }

    #[test]
    fn norm_chain_holds_for_random_matrices() {
        let mut rng = stream(15, &[]);
        for trial in 0..100 {
            let d = 1 + trial % 7;
            let z = gaussian_hermitian(d, &mut rng);
            let n1 = z.trace_norm();
            let n2 = z.frobenius_norm();
            let ninf = z.operator_norm();
            let sd = (d as f64).sqrt();
            let eps = 1e-10 * (1.0 + n1);
            assert!(n2 <= n1 + eps && n1 <= sd * n2 + eps);
            assert!(ninf <= n2 + eps && n2 <= sd * ninf + eps);
        }
    }

    #[test]
    fn leading_eigpair_examples() {
        let (l, v) = leading_eigpair(&HermMat::from_real_diagonal(&[3.0, 1.0, 1.0]));
        assert!((l - 3.0).abs() < 1e-14);
        assert!((v.entries()[0] - c(1.0, 0.0)).norm() < 1e-12);

        let mut rng = stream(16, &[]);
        let x = haar_vector(5, &mut rng).scale(c(0.0, 2.0));
        let (l, v) = leading_eigpair(&lift(&x));
        assert!((l - 4.0).abs() < 1e-12);
        assert!((v.inner(&x).norm() - 2.0).abs() < 1e-12);

        for d in 2..8 {
            let g = gaussian_hermitian(d, &mut rng);
            let psd = HermMat::from_matrix(g.as_matrix() * g.as_matrix());
            let (l, v) = leading_eigpair(&psd);
            let opn = psd.operator_norm();
            assert!((l - opn).abs() < 1e-10 * opn);
            let resid = (psd.as_matrix() * v.as_dvector() - v.as_dvector() * C64::new(l, 0.0)).norm();
            assert!(resid <= 1e-10 * opn);
            assert!(v.is_unit());
        }
    }

    #[test]
    fn phase_canonical_rotates_largest_entry_real() {
        let v = ComplexVec::from_vec(vec![c(0.1, 0.0), c(0.0, -0.9)]);
        let w = v.phase_canonical();
        assert!((w.entries()[1] - c(0.9, 0.0)).norm() < 1e-15);
        assert!((w.entries()[0] - c(0.0, 0.1)).norm() < 1e-15);
    }

    /// Exhaustive simplex projection: try every support set.
    fn simplex_oracle(values: &[f64], target: f64) -> Vec<f64> {
        let n = values.len();
        let mut best: Option<(f64, Vec<f64>)> = None;
        for mask in 1u32..(1 << n) {
            let support: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
            let s: f64 = support.iter().map(|&k| values[k]).sum();
            let theta = (s - target) / support.len() as f64;
            let mut cand = vec![0.0; n];
            let mut ok = true;
            for &k in &support {
                cand[k] = values[k] - theta;
                if cand[k] < -1e-15 {
                    ok = false;
                }
            }
            if !ok {
                continue;
            }
            let dist: f64 = cand.iter().zip(values).map(|(a, b)| (a - b).powi(2)).sum();
            if best.as_ref().is_none_or(|(bd, _)| dist < *bd) {
                best = Some((dist, cand));
            }
        }
        best.unwrap().1
    }

    #[test]
    fn psd_trace_projection_examples() {
        let m = HermMat::from_real_diagonal(&[2.0, -1.0]);
        let p = psd_trace_project(&m, 1.0);
        assert!(p.max_abs_diff(&HermMat::from_real_diagonal(&[1.0, 0.0])) < 1e-14);

        let x = lift(&ComplexVec::from_reals(&[0.6, 0.8]));
        assert!(psd_trace_project(&x, 1.0).max_abs_diff(&x) < 1e-12);

        let mut rng = stream(17, &[]);
        for trial in 0..50 {
            let d = 1 + trial % 4;
            let z = gaussian_hermitian(d, &mut rng);
            let target = 0.5 + trial as f64 * 0.1;
            let p = psd_trace_project(&z, target);
            assert!((p.trace() - target).abs() < 1e-10);
            assert!(p.min_eigenvalue() >= -1e-10);

            let (values, _) = z.eigh();
            let fast = simplex_project(&values, target);
            let oracle = simplex_oracle(&values, target);
            for (a, b) in fast.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coordinates_are_an_isometry() {
        let mut rng = stream(18, &[]);
        for d in 1..6 {
            let a = gaussian_hermitian(d, &mut rng);
            let b = gaussian_hermitian(d, &mut rng);
            let ca = herm_to_coords(&a);
            let cb = herm_to_coords(&b);
            assert!((ca.dot(&cb) - frobenius_inner(&a, &b).unwrap()).abs() < 1e-12);
            assert!(coords_to_herm(&ca, d).max_abs_diff(&a) < 1e-14);
            let v = haar_vector(d, &mut rng);
            assert!((lift_coords(&v) - herm_to_coords(&lift(&v))).norm() < 1e-14);
        }
    }

    #[test]
    fn constructors_symmetrize() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 1.0), c(0.0, 0.0), c(3.0, 0.0)]);
        let h = HermMat::from_matrix(m);
        assert!(h.hermiticity_defect() <= 1e-12);
        assert_eq!(h.as_matrix()[(0, 1)], c(1.0, 0.5));
    }
}
