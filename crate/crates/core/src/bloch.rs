//! Bloch (generator-basis) decomposition of bipartite density matrices.
//!
//! A state on `m⊗n` is expanded as
//!
//! ```text
//! ρ = (1/mn) [ I⊗I + xᵗμ ⊗ Iₙ + Iₘ ⊗ yᵗν + Σᵢⱼ Tᵢⱼ μᵢ⊗νⱼ ]
//! ```
//!
//! with μ, ν the generalized Gell-Mann generators of SU(m), SU(n)
//! normalized to `Tr(μᵢμⱼ) = 2δᵢⱼ`. The extraction coefficients below
//! follow from that trace convention and are frozen here; all bound
//! formulas assume exactly this normalization.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{cx, kron, C64};
use crate::states::DensityMatrix;

/// Imaginary residue above which a decomposition input is rejected as
/// non-Hermitian.
const TOL_IMAG: f64 = 1e-9;

/// An orthogonal Hermitian traceless basis of su(d), `Tr(μᵢμⱼ) = 2δᵢⱼ`.
///
/// Fixed order: symmetric pair generators for `j < k` (lexicographic),
/// then antisymmetric pairs, then the `d−1` diagonal generators. For
/// `d = 2` this is exactly σ_x, σ_y, σ_z.
#[derive(Debug, Clone)]
pub struct GeneratorBasis {
    dim: usize,
    matrices: Vec<DMatrix<C64>>,
}

impl GeneratorBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[DMatrix<C64>] {
        &self.matrices
    }

    /// Real linear combination `Σ cᵢ μᵢ`.
    pub fn combine(&self, coeffs: &[f64]) -> DMatrix<C64> {
        assert_eq!(coeffs.len(), self.matrices.len());
        let mut out = DMatrix::<C64>::zeros(self.dim, self.dim);
        for (c, mu) in coeffs.iter().zip(&self.matrices) {
            if *c != 0.0 {
                out += mu * cx(*c, 0.0);
            }
        }
        out
    }
}

fn build_generators(d: usize) -> GeneratorBasis {
    let mut matrices = Vec::with_capacity(d * d - 1);
    // symmetric: E_jk + E_kj
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = DMatrix::<C64>::zeros(d, d);
            m[(j, k)] = cx(1.0, 0.0);
            m[(k, j)] = cx(1.0, 0.0);
            matrices.push(m);
        }
    }
    // antisymmetric: −i E_jk + i E_kj
    for j in 0..d {
        for k in (j + 1)..d {
            let mut m = DMatrix::<C64>::zeros(d, d);
            m[(j, k)] = cx(0.0, -1.0);
            m[(k, j)] = cx(0.0, 1.0);
            matrices.push(m);
        }
    }
    // diagonal: √(2/(l(l+1))) (Σ_{j<l} E_jj − l E_ll)
    for l in 1..d {
        let norm = (2.0 / (l as f64 * (l as f64 + 1.0))).sqrt();
        let mut m = DMatrix::<C64>::zeros(d, d);
        for j in 0..l {
            m[(j, j)] = cx(norm, 0.0);
        }
        m[(l, l)] = cx(-norm * l as f64, 0.0);
        matrices.push(m);
    }
    GeneratorBasis { dim: d, matrices }
}

/// The generalized Gell-Mann basis for SU(d). Cached per dimension;
/// the cache is initialize-once, read-many.
pub fn generators(d: usize) -> Arc<GeneratorBasis> {
    assert!(d >= 2, "generators need d >= 2");
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GeneratorBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("generator cache poisoned");
    guard
        .entry(d)
        .or_insert_with(|| Arc::new(build_generators(d)))
        .clone()
}

/// Local Bloch vectors and correlation matrix of a bipartite state.
#[derive(Debug, Clone)]
pub struct BlochForm {
    pub dim_a: usize,
    pub dim_b: usize,
    /// Length `m²−1`.
    pub x: DVector<f64>,
    /// Length `n²−1`.
    pub y: DVector<f64>,
    /// `(m²−1) × (n²−1)`.
    pub t: DMatrix<f64>,
}

impl BlochForm {
    pub fn x_norm_sq(&self) -> f64 {
        self.x.norm_squared()
    }

    pub fn y_norm_sq(&self) -> f64 {
        self.y.norm_squared()
    }

    pub fn t_norm_sq(&self) -> f64 {
        self.t.iter().map(|v| v * v).sum()
    }
}

/// `Tr(block · g)` for every generator `g`, as real coefficients.
/// Returns the worst imaginary residue alongside.
fn real_traces(block: &DMatrix<C64>, basis: &GeneratorBasis) -> (Vec<f64>, f64) {
    let mut residue = 0.0_f64;
    let coeffs = basis
        .matrices()
        .iter()
        .map(|g| {
            let tr: C64 = (block * g).trace();
            residue = residue.max(tr.im.abs());
            tr.re
        })
        .collect();
    (coeffs, residue)
}

/// Extract the Bloch form of a state:
/// `xᵢ = (m/2)·Tr(ρ (μᵢ⊗Iₙ))`, `yⱼ = (n/2)·Tr(ρ (Iₘ⊗νⱼ))`,
/// `Tᵢⱼ = (mn/4)·Tr(ρ (μᵢ⊗νⱼ))`.
pub fn decompose(rho: &DensityMatrix) -> Result<BlochForm> {
    let (m, n) = rho.dims();
    let gen_a = generators(m);
    let gen_b = generators(n);
    let mf = m as f64;
    let nf = n as f64;

    let mut residue = 0.0_f64;

    // marginals from the block structure
    let mut rho_b = DMatrix::<C64>::zeros(n, n);
    for a in 0..m {
        rho_b += rho.block(a, a);
    }
    let mut rho_a = DMatrix::<C64>::zeros(m, m);
    for a in 0..m {
        for b in 0..m {
            rho_a[(a, b)] = rho.block(a, b).trace();
        }
    }

    let (x, rx) = real_traces(&rho_a, &gen_a);
    let (y, ry) = real_traces(&rho_b, &gen_b);
    residue = residue.max(rx).max(ry);

    // T_ij = (mn/4) Σ_{a,b} μ_i[b,a] · Tr(block(a,b) ν_j)
    let mut t = DMatrix::<f64>::zeros(gen_a.len(), gen_b.len());
    let blocks: Vec<Vec<DMatrix<C64>>> = (0..m)
        .map(|a| (0..m).map(|b| rho.block(a, b)).collect())
        .collect();
    for (j, nu) in gen_b.matrices().iter().enumerate() {
        let mut contracted = DMatrix::<C64>::zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                contracted[(a, b)] = (&blocks[a][b] * nu).trace();
            }
        }
        for (i, mu) in gen_a.matrices().iter().enumerate() {
            let tr: C64 = (mu * &contracted).trace();
            residue = residue.max(tr.im.abs());
            t[(i, j)] = mf * nf / 4.0 * tr.re;
        }
    }

    if residue > TOL_IMAG {
        return Err(Error::NonHermitian { residue });
    }

    Ok(BlochForm {
        dim_a: m,
        dim_b: n,
        x: DVector::from_vec(x.into_iter().map(|v| mf / 2.0 * v).collect()),
        y: DVector::from_vec(y.into_iter().map(|v| nf / 2.0 * v).collect()),
        t,
    })
}

/// Assemble the matrix of a Bloch form. The output is Hermitian with unit
/// trace but need not be positive semidefinite.
pub fn reconstruct(bf: &BlochForm) -> DMatrix<C64> {
    let (m, n) = (bf.dim_a, bf.dim_b);
    let gen_a = generators(m);
    let gen_b = generators(n);
    let id_a = DMatrix::<C64>::identity(m, m);
    let id_b = DMatrix::<C64>::identity(n, n);

    let mut out = kron(&id_a, &id_b);
    out += kron(&gen_a.combine(bf.x.as_slice()), &id_b);
    out += kron(&id_a, &gen_b.combine(bf.y.as_slice()));
    for i in 0..gen_a.len() {
        for j in 0..gen_b.len() {
            let c = bf.t[(i, j)];
            if c != 0.0 {
                out += kron(&gen_a.matrices()[i], &gen_b.matrices()[j]) * cx(c, 0.0);
            }
        }
    }
    out / cx((m * n) as f64, 0.0)
}

/// The correlation Gram matrix `G = x xᵗ + (2/n) T Tᵗ`, symmetrized to
/// remove rounding asymmetry.
pub fn gram(bf: &BlochForm) -> DMatrix<f64> {
    let g = &bf.x * bf.x.transpose() + (&bf.t * bf.t.transpose()) * (2.0 / bf.dim_b as f64);
    (&g + g.transpose()) * 0.5
}
