//! Construction, validation and re-bipartition of the catalogued states.
//!
//! All factories return matrices in the row-major computational product
//! basis `|i⟩⊗|j⟩ ↦ i·n + j`, which pins every matrix entry bit-for-bit.
//! Irrational constants are evaluated in double precision.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{cx, eigh_values, hermiticity_defect, outer, C64};

/// Hermiticity tolerance for a valid density matrix.
pub const TOL_HERM: f64 = 1e-12;
/// Trace tolerance for a valid density matrix.
pub const TOL_TRACE: f64 = 1e-12;
/// Eigenvalues may undershoot zero by at most this much.
pub const TOL_PSD: f64 = 1e-10;

/// A bipartite density matrix with a declared `(dim_a, dim_b)` split.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    data: DMatrix<C64>,
    dim_a: usize,
    dim_b: usize,
}

/// Diagnostic defects of a candidate density matrix. The caller decides
/// pass/fail so that sweeps over boundary parameters never abort mid-run.
#[derive(Debug, Clone, Copy)]
pub struct ValidationReport {
    /// Max absolute entry of `ρ − ρ†`.
    pub hermiticity_defect: f64,
    /// `|Tr ρ − 1|`.
    pub trace_defect: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
}

impl ValidationReport {
    /// All three defects within the standard tolerances.
    pub fn is_valid(&self) -> bool {
        self.hermiticity_defect <= TOL_HERM
            && self.trace_defect <= TOL_TRACE
            && self.min_eigenvalue >= -TOL_PSD
    }
}

/// Compute the validation defects of an arbitrary square complex matrix.
pub fn validate_matrix(data: &DMatrix<C64>) -> ValidationReport {
    ValidationReport {
        hermiticity_defect: hermiticity_defect(data),
        trace_defect: (data.trace().re - 1.0).hypot(data.trace().im),
        min_eigenvalue: *eigh_values(data).last().expect("non-empty"),
    }
}

impl DensityMatrix {
    /// Wrap a matrix after checking dimensions and the density-matrix
    /// invariants (Hermitian, unit trace, positive semidefinite).
    pub fn new(data: DMatrix<C64>, dim_a: usize, dim_b: usize) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() != dim_a * dim_b {
            return Err(Error::DimensionMismatch {
                context: "density matrix size vs bipartition",
                expected: dim_a * dim_b,
                actual: data.nrows(),
            });
        }
        let report = validate_matrix(&data);
        if !report.is_valid() {
            return Err(Error::InvalidState {
                herm: report.hermiticity_defect,
                trace: report.trace_defect,
                min_eig: report.min_eigenvalue,
            });
        }
        Ok(Self { data, dim_a, dim_b })
    }

    /// Wrap without checking. For diagnostics and tests.
    pub fn new_unchecked(data: DMatrix<C64>, dim_a: usize, dim_b: usize) -> Self {
        Self { data, dim_a, dim_b }
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    pub fn total_dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    /// The `(a, b)` block of size `n×n`: entries `ρ[(a,c),(b,d)]`.
    pub fn block(&self, a: usize, b: usize) -> DMatrix<C64> {
        let n = self.dim_b;
        self.data.view((a * n, b * n), (n, n)).into_owned()
    }

    /// Same matrix data under a new bipartition.
    pub fn reinterpret(&self, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a * dim_b != self.total_dim() {
            return Err(Error::DimensionMismatch {
                context: "reinterpret bipartition",
                expected: self.total_dim(),
                actual: dim_a * dim_b,
            });
        }
        Ok(Self {
            data: self.data.clone(),
            dim_a,
            dim_b,
        })
    }

    /// Diagnostic defects; see [`validate_matrix`].
    pub fn validate(&self) -> ValidationReport {
        validate_matrix(&self.data)
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

fn product_ket(a: &DVector<C64>, b: &DVector<C64>) -> DVector<C64> {
    let mut v = DVector::zeros(a.len() * b.len());
    for i in 0..a.len() {
        for j in 0..b.len() {
            v[i * b.len() + j] = a[i] * b[j];
        }
    }
    v
}

fn real_ket(coeffs: &[f64]) -> DVector<C64> {
    DVector::from_iterator(coeffs.len(), coeffs.iter().map(|&x| cx(x, 0.0)))
}

fn check_range(family: &'static str, param: &'static str, value: f64, min: f64, max: f64) -> Result<()> {
    if !(min..=max).contains(&value) || !value.is_finite() {
        return Err(Error::ParamOutOfRange {
            family,
            param,
            value,
            min,
            max,
        });
    }
    Ok(())
}

/// P. Horodecki's 2⊗4 bound entangled state `ρ_a`, `a ∈ [0, 1]`.
pub fn horodecki_2x4(a: f64) -> Result<DensityMatrix> {
    check_range("horodecki2x4", "a", a, 0.0, 1.0)?;
    let n = 4;
    // |ψ_i⟩ = (|0,i−1⟩ + |1,i⟩)/√2, i = 1..3
    let mut rho_ent = DMatrix::<C64>::zeros(8, 8);
    for i in 1..=3 {
        let mut psi = DVector::<C64>::zeros(8);
        psi[i - 1] = cx(1.0 / 2f64.sqrt(), 0.0);
        psi[n + i] = cx(1.0 / 2f64.sqrt(), 0.0);
        rho_ent += outer(&psi, &psi) * cx(2.0 / 7.0, 0.0);
    }
    rho_ent[(3, 3)] += cx(1.0 / 7.0, 0.0);

    // |φ⟩ = |1⟩ ⊗ (√((1+a)/2)|0⟩ + √((1−a)/2)|3⟩): the coherence pairing
    // |10⟩ with |13⟩ that keeps the partial transpose positive for all a
    let mut phi = DVector::<C64>::zeros(8);
    phi[n] = cx(((1.0 + a) / 2.0).sqrt(), 0.0);
    phi[n + 3] = cx(((1.0 - a) / 2.0).sqrt(), 0.0);

    let w = 7.0 * a + 1.0;
    let rho = rho_ent * cx(7.0 * a / w, 0.0) + outer(&phi, &phi) * cx(1.0 / w, 0.0);
    DensityMatrix::new(rho, 2, 4)
}

/// Horodeckis' 3⊗3 one-parameter family `ρ_β`, `β ∈ [0, 5]`.
pub fn horodecki_3x3(beta: f64) -> Result<DensityMatrix> {
    check_range("horodecki3x3", "beta", beta, 0.0, 5.0)?;
    let mut phi = DVector::<C64>::zeros(9);
    for k in 0..3 {
        phi[k * 3 + k] = cx(1.0 / 3f64.sqrt(), 0.0);
    }
    let mut rho = outer(&phi, &phi) * cx(2.0 / 7.0, 0.0);
    // σ₊ lives on |01⟩,|12⟩,|20⟩ and σ₋ on the transposed triple
    for (i, j) in [(0usize, 1usize), (1, 2), (2, 0)] {
        rho[(i * 3 + j, i * 3 + j)] += cx(beta / 21.0, 0.0);
        rho[(j * 3 + i, j * 3 + i)] += cx((5.0 - beta) / 21.0, 0.0);
    }
    DensityMatrix::new(rho, 3, 3)
}

/// Horodecki's 4⊗4 bound entangled state with a positive distillable
/// secret-key rate, written in the computational basis.
pub fn horodecki_4x4_key() -> DensityMatrix {
    let p = 2f64.sqrt() / (1.0 + 2f64.sqrt());
    let s = p / 8.0;
    let t = p / (4.0 * 2f64.sqrt());

    let mut rho = DMatrix::<C64>::zeros(16, 16);
    for i in [0usize, 1, 4, 5, 10, 11, 14, 15] {
        rho[(i, i)] = cx(s, 0.0);
    }
    for i in [2usize, 7, 8, 13] {
        rho[(i, i)] = cx(t, 0.0);
    }
    let pairs: [(usize, usize, f64); 8] = [
        (0, 10, s),
        (1, 14, s),
        (2, 8, s),
        (2, 13, s),
        (4, 11, s),
        (5, 15, -s),
        (7, 8, s),
        (7, 13, -s),
    ];
    for (i, j, v) in pairs {
        rho[(i, j)] = cx(v, 0.0);
        rho[(j, i)] = cx(v, 0.0);
    }
    DensityMatrix::new(rho, 4, 4).expect("fixed matrix is a valid state")
}

fn upb_state(vectors: [DVector<C64>; 5]) -> DensityMatrix {
    let mut rho = DMatrix::<C64>::identity(9, 9);
    for psi in &vectors {
        rho -= outer(psi, psi);
    }
    DensityMatrix::new(rho * cx(0.25, 0.0), 3, 3).expect("UPB complement is a valid state")
}

/// Bennett et al.'s Pyramid UPB bound entangled state in 3⊗3.
pub fn upb_pyramid() -> DensityMatrix {
    let norm = 2.0 / (5.0 + 5f64.sqrt()).sqrt();
    let h = (1.0 + 5f64.sqrt()).sqrt() / 2.0;
    let v = |i: usize| {
        let angle = 2.0 * std::f64::consts::PI * i as f64 / 5.0;
        real_ket(&[norm * angle.cos(), norm * angle.sin(), norm * h])
    };
    let psis = std::array::from_fn(|i| product_ket(&v(i), &v((2 * i) % 5)));
    upb_state(psis)
}

/// Bennett et al.'s Tiles UPB bound entangled state in 3⊗3.
pub fn upb_tiles() -> DensityMatrix {
    let r = 1.0 / 2f64.sqrt();
    let third: f64 = 1.0 / 3.0;
    let psis = [
        product_ket(&real_ket(&[1.0, 0.0, 0.0]), &real_ket(&[r, -r, 0.0])),
        product_ket(&real_ket(&[r, -r, 0.0]), &real_ket(&[0.0, 0.0, 1.0])),
        product_ket(&real_ket(&[0.0, 0.0, 1.0]), &real_ket(&[0.0, r, -r])),
        product_ket(&real_ket(&[0.0, r, -r]), &real_ket(&[1.0, 0.0, 0.0])),
        product_ket(
            &real_ket(&[third.sqrt(); 3]),
            &real_ket(&[third.sqrt(); 3]),
        ),
    ];
    upb_state(psis)
}

/// Benatti et al.'s 4⊗4 bound entangled state, `(1/24)` times a fixed
/// pattern of ±1 and 3 entries.
pub fn benatti_4x4() -> DensityMatrix {
    let mut rho = DMatrix::<C64>::zeros(16, 16);
    let diag = [1, 3, 1, 1, 3, 1, 1, 1, 1, 1, 1, 3, 1, 1, 3, 1];
    for (i, &d) in diag.iter().enumerate() {
        rho[(i, i)] = cx(d as f64, 0.0);
    }
    let pairs: [(usize, usize, i32); 24] = [
        (0, 5, -1),
        (0, 10, -1),
        (0, 15, 1),
        (1, 4, -1),
        (1, 11, -1),
        (1, 14, -1),
        (2, 7, -1),
        (2, 8, -1),
        (2, 13, 1),
        (3, 6, 1),
        (3, 9, 1),
        (3, 12, 1),
        (4, 11, -1),
        (4, 14, -1),
        (5, 10, 1),
        (5, 15, -1),
        (6, 9, 1),
        (6, 12, 1),
        (7, 8, 1),
        (7, 13, -1),
        (8, 13, -1),
        (9, 12, 1),
        (10, 15, -1),
        (11, 14, -1),
    ];
    for (i, j, v) in pairs {
        rho[(i, j)] = cx(v as f64, 0.0);
        rho[(j, i)] = cx(v as f64, 0.0);
    }
    DensityMatrix::new(rho / cx(24.0, 0.0), 4, 4).expect("fixed matrix is a valid state")
}

/// m⊗m Werner state, `z ∈ [−1, 1]`.
pub fn werner(m: usize, z: f64) -> Result<DensityMatrix> {
    if m < 2 {
        return Err(Error::ParamOutOfRange {
            family: "werner",
            param: "m",
            value: m as f64,
            min: 2.0,
            max: f64::INFINITY,
        });
    }
    check_range("werner", "z", z, -1.0, 1.0)?;
    let d = m * m;
    let mf = m as f64;
    let denom = mf.powi(3) - mf;
    let mut rho = DMatrix::<C64>::identity(d, d) * cx((mf - z) / denom, 0.0);
    // flip operator F = Σ |kl⟩⟨lk|
    let fw = (mf * z - 1.0) / denom;
    for k in 0..m {
        for l in 0..m {
            rho[(k * m + l, l * m + k)] += cx(fw, 0.0);
        }
    }
    DensityMatrix::new(rho, m, m)
}

/// m⊗m isotropic state, `z ∈ [0, 1]`.
pub fn isotropic(m: usize, z: f64) -> Result<DensityMatrix> {
    if m < 2 {
        return Err(Error::ParamOutOfRange {
            family: "isotropic",
            param: "m",
            value: m as f64,
            min: 2.0,
            max: f64::INFINITY,
        });
    }
    check_range("isotropic", "z", z, 0.0, 1.0)?;
    let d = m * m;
    let mf = m as f64;
    let mut psi = DVector::<C64>::zeros(d);
    for k in 0..m {
        psi[k * m + k] = cx(1.0 / mf.sqrt(), 0.0);
    }
    let rho = DMatrix::<C64>::identity(d, d) * cx((1.0 - z) / (mf * mf - 1.0), 0.0)
        + outer(&psi, &psi) * cx((mf * mf * z - 1.0) / (mf * mf - 1.0), 0.0);
    DensityMatrix::new(rho, m, m)
}

/// The state families the crate can build by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateFamily {
    Horodecki2x4,
    Horodecki3x3,
    Horodecki4x4Key,
    Pyramid,
    Tiles,
    Benatti,
    Werner,
    Isotropic,
}

impl StateFamily {
    /// Parameter names the family accepts, in parse order.
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            StateFamily::Horodecki2x4 => &["a"],
            StateFamily::Horodecki3x3 => &["beta"],
            StateFamily::Werner | StateFamily::Isotropic => &["m", "z"],
            _ => &[],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            StateFamily::Horodecki2x4 => "horodecki2x4",
            StateFamily::Horodecki3x3 => "horodecki3x3",
            StateFamily::Horodecki4x4Key => "horodecki4x4key",
            StateFamily::Pyramid => "pyramid",
            StateFamily::Tiles => "tiles",
            StateFamily::Benatti => "benatti",
            StateFamily::Werner => "werner",
            StateFamily::Isotropic => "isotropic",
        }
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StateFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "horodecki2x4" => Ok(StateFamily::Horodecki2x4),
            "horodecki3x3" => Ok(StateFamily::Horodecki3x3),
            "horodecki4x4key" => Ok(StateFamily::Horodecki4x4Key),
            "pyramid" => Ok(StateFamily::Pyramid),
            "tiles" => Ok(StateFamily::Tiles),
            "benatti" => Ok(StateFamily::Benatti),
            "werner" => Ok(StateFamily::Werner),
            "isotropic" => Ok(StateFamily::Isotropic),
            _ => Err(Error::Parse {
                token: s.to_string(),
                reason: "unknown state family".into(),
            }),
        }
    }
}

/// A named family plus parameters, parseable from
/// `"<family>:<key>=<value>[,<key>=<value>...]"`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpec {
    pub family: StateFamily,
    pub params: BTreeMap<String, f64>,
}

impl StateSpec {
    pub fn new(family: StateFamily) -> Self {
        Self {
            family,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn required(&self, key: &str) -> Result<f64> {
        self.params.get(key).copied().ok_or_else(|| Error::Parse {
            token: key.to_string(),
            reason: format!("missing parameter for {}", self.family),
        })
    }

    fn required_int(&self, key: &str) -> Result<usize> {
        let v = self.required(key)?;
        if v.fract() != 0.0 || v < 0.0 {
            return Err(Error::Parse {
                token: format!("{key}={v}"),
                reason: "expected a non-negative integer".into(),
            });
        }
        Ok(v as usize)
    }

    /// Build the density matrix this spec describes.
    pub fn build(&self) -> Result<DensityMatrix> {
        match self.family {
            StateFamily::Horodecki2x4 => horodecki_2x4(self.required("a")?),
            StateFamily::Horodecki3x3 => horodecki_3x3(self.required("beta")?),
            StateFamily::Horodecki4x4Key => Ok(horodecki_4x4_key()),
            StateFamily::Pyramid => Ok(upb_pyramid()),
            StateFamily::Tiles => Ok(upb_tiles()),
            StateFamily::Benatti => Ok(benatti_4x4()),
            StateFamily::Werner => werner(self.required_int("m")?, self.required("z")?),
            StateFamily::Isotropic => isotropic(self.required_int("m")?, self.required("z")?),
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.family)?;
        for (i, (k, v)) in self.params.iter().enumerate() {
            write!(f, "{}{k}={v}", if i == 0 { ":" } else { "," })?;
        }
        Ok(())
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family_str, rest) = match s.split_once(':') {
            Some((f, r)) => (f, Some(r)),
            None => (s, None),
        };
        let family = StateFamily::from_str(family_str)?;
        let mut params = BTreeMap::new();
        if let Some(rest) = rest {
            if rest.is_empty() {
                return Err(Error::Parse {
                    token: s.to_string(),
                    reason: "empty parameter list".into(),
                });
            }
            for item in rest.split(',') {
                let (key, value) = item.split_once('=').ok_or_else(|| Error::Parse {
                    token: item.to_string(),
                    reason: "expected key=value".into(),
                })?;
                if !family.param_names().contains(&key) {
                    return Err(Error::Parse {
                        token: key.to_string(),
                        reason: format!("unknown parameter for {family}"),
                    });
                }
                let value: f64 = value.parse().map_err(|_| Error::Parse {
                    token: value.to_string(),
                    reason: "not a number".into(),
                })?;
                params.insert(key.to_string(), value);
            }
        }
        Ok(StateSpec { family, params })
    }
}
