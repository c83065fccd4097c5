//! Small dense linear-algebra helpers shared by the whole crate.
//!
//! Everything here operates on `nalgebra` dynamic matrices with `Complex64`
//! entries (or plain `f64` for real symmetric problems). Matrices in this
//! crate never exceed a few dozen rows, so clarity wins over cleverness.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Complex scalar shorthand.
pub type C64 = Complex64;

/// Convenience constructor for a complex scalar.
#[inline]
pub fn cx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Complex identity matrix of size `d`.
pub fn identity_c(d: usize) -> DMatrix<C64> {
    DMatrix::identity(d, d)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// Conjugate transpose.
pub fn dagger(m: &DMatrix<C64>) -> DMatrix<C64> {
    m.adjoint()
}

/// Outer product `v w†` of two complex vectors.
pub fn outer(v: &DVector<C64>, w: &DVector<C64>) -> DMatrix<C64> {
    v * w.adjoint()
}

/// Maximum absolute entry of `m − m†`.
pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let d = m - m.adjoint();
    d.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Squared Frobenius (Hilbert-Schmidt) norm `Tr(m† m)`.
pub fn frobenius_sq(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Maximum absolute entry of `a − b`.
pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Real part of the trace.
pub fn trace_re(m: &DMatrix<C64>) -> f64 {
    m.trace().re
}

fn sort_desc_c(vals: Vec<f64>, vecs: DMatrix<C64>) -> (Vec<f64>, Vec<DVector<C64>>) {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
    let sorted_vals: Vec<f64> = idx.iter().map(|&i| vals[i]).collect();
    let sorted_vecs: Vec<DVector<C64>> = idx
        .iter()
        .map(|&i| canonical_phase(vecs.column(i).into_owned()))
        .collect();
    (sorted_vals, sorted_vecs)
}

/// Fix the global phase of an eigenvector so that its largest-magnitude
/// entry (lowest index on ties) is real and positive.
pub fn canonical_phase(mut v: DVector<C64>) -> DVector<C64> {
    let mut best = 0usize;
    let mut best_norm = 0.0;
    for (i, z) in v.iter().enumerate() {
        let n = z.norm();
        if n > best_norm + 1e-14 {
            best = i;
            best_norm = n;
        }
    }
    if best_norm > 0.0 {
        let phase = v[best] / best_norm;
        let correction = phase.conj();
        for z in v.iter_mut() {
            *z *= correction;
        }
    }
    v
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted in
/// non-increasing order and eigenvectors phase-canonicalized.
///
/// The input is symmetrized as `(m + m†)/2` first so that rounding noise in
/// the caller cannot leak into complex eigenvalues.
pub fn eigh(m: &DMatrix<C64>) -> (Vec<f64>, Vec<DVector<C64>>) {
    let h = (m + m.adjoint()) * cx(0.5, 0.0);
    let se = h.symmetric_eigen();
    let vals: Vec<f64> = se.eigenvalues.iter().copied().collect();
    sort_desc_c(vals, se.eigenvectors)
}

/// Eigenvalues only, non-increasing.
pub fn eigh_values(m: &DMatrix<C64>) -> Vec<f64> {
    let h = (m + m.adjoint()) * cx(0.5, 0.0);
    let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    vals
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    *eigh_values(m).last().expect("non-empty matrix")
}

/// Eigendecomposition of a real symmetric matrix, eigenvalues sorted in
/// non-increasing order, eigenvectors sign-canonicalized.
pub fn eigh_sym(m: &DMatrix<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
    let h = (m + m.transpose()) * 0.5;
    let se = h.symmetric_eigen();
    let vals: Vec<f64> = se.eigenvalues.iter().copied().collect();
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap());
    let sorted_vals: Vec<f64> = idx.iter().map(|&i| vals[i]).collect();
    let sorted_vecs: Vec<DVector<f64>> = idx
        .iter()
        .map(|&i| canonical_sign(se.eigenvectors.column(i).into_owned()))
        .collect();
    (sorted_vals, sorted_vecs)
}

/// Sign-canonicalize a real eigenvector (largest-|entry| positive).
pub fn canonical_sign(mut v: DVector<f64>) -> DVector<f64> {
    let mut best = 0usize;
    let mut best_abs = 0.0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > best_abs + 1e-14 {
            best = i;
            best_abs = x.abs();
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
    v
}

/// One (near-)degenerate eigenvalue cluster of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigCluster {
    /// Mean eigenvalue of the cluster.
    pub value: f64,
    /// Orthonormal basis of the cluster eigenspace, in canonical form.
    pub basis: Vec<DVector<C64>>,
}

impl EigCluster {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Group consecutive sorted eigenvalues into clusters whose internal gaps
/// stay below `tol · max(1, |λ|_max)`.
pub fn cluster_ranges(vals_desc: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let scale = vals_desc
        .iter()
        .map(|v| v.abs())
        .fold(1.0_f64, f64::max);
    let mut ranges = Vec::new();
    let mut start = 0;
    for i in 1..=vals_desc.len() {
        if i == vals_desc.len() || (vals_desc[i - 1] - vals_desc[i]).abs() > tol * scale {
            ranges.push(start..i);
            start = i;
        }
    }
    ranges
}

/// Hermitian eigendecomposition with degenerate eigenspaces resolved into a
/// canonical basis.
///
/// Inside each cluster the raw eigenvectors are replaced by the basis
/// obtained by greedily projecting coordinate axes onto the eigenspace
/// (largest residual first, lowest index on ties). When an eigenspace is
/// spanned by coordinate axes this reproduces those axes exactly, which
/// keeps downstream projector constructions reproducible across runs and
/// eigensolver implementations.
pub fn eigh_clustered(m: &DMatrix<C64>, tol: f64) -> Vec<EigCluster> {
    let (vals, vecs) = eigh(m);
    let d = m.nrows();
    cluster_ranges(&vals, tol)
        .into_iter()
        .map(|r| {
            let value = vals[r.clone()].iter().sum::<f64>() / r.len() as f64;
            let basis = if r.len() == 1 {
                vec![vecs[r.start].clone()]
            } else {
                canonical_subspace_basis(&vecs[r.clone()], d)
            };
            EigCluster { value, basis }
        })
        .collect()
}

fn canonical_subspace_basis(raw: &[DVector<C64>], dim: usize) -> Vec<DVector<C64>> {
    // Projector onto the eigenspace; deflated as axes are extracted.
    let mut proj = DMatrix::<C64>::zeros(dim, dim);
    for v in raw {
        proj += outer(v, v);
    }
    let mut basis = Vec::with_capacity(raw.len());
    for _ in 0..raw.len() {
        let mut best_j = 0usize;
        let mut best_norm = -1.0;
        for j in 0..dim {
            let n = proj.column(j).norm();
            if n > best_norm + 1e-12 {
                best_j = j;
                best_norm = n;
            }
        }
        let u = canonical_phase(proj.column(best_j).into_owned() / cx(best_norm, 0.0));
        proj -= outer(&u, &u);
        basis.push(u);
    }
    basis
}

/// Real-symmetric analogue of [`eigh_clustered`].
pub struct EigClusterReal {
    pub value: f64,
    pub basis: Vec<DVector<f64>>,
}

pub fn eigh_sym_clustered(m: &DMatrix<f64>, tol: f64) -> Vec<EigClusterReal> {
    let (vals, vecs) = eigh_sym(m);
    let d = m.nrows();
    cluster_ranges(&vals, tol)
        .into_iter()
        .map(|r| {
            let value = vals[r.clone()].iter().sum::<f64>() / r.len() as f64;
            let basis = if r.len() == 1 {
                vec![vecs[r.start].clone()]
            } else {
                canonical_subspace_basis_real(&vecs[r.clone()], d)
            };
            EigClusterReal { value, basis }
        })
        .collect()
}

fn canonical_subspace_basis_real(raw: &[DVector<f64>], dim: usize) -> Vec<DVector<f64>> {
    let mut proj = DMatrix::<f64>::zeros(dim, dim);
    for v in raw {
        proj += v * v.transpose();
    }
    let mut basis = Vec::with_capacity(raw.len());
    for _ in 0..raw.len() {
        let mut best_j = 0usize;
        let mut best_norm = -1.0;
        for j in 0..dim {
            let n = proj.column(j).norm();
            if n > best_norm + 1e-12 {
                best_j = j;
                best_norm = n;
            }
        }
        let u = canonical_sign(proj.column(best_j).into_owned() / best_norm);
        proj -= &u * u.transpose();
        basis.push(u);
    }
    basis
}
