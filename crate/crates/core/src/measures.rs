//! Geometric discord (GD) and measurement-induced nonlocality (MIN).
//!
//! Both measures compare a state to its image under a von Neumann
//! measurement on subsystem A, normalized by `m/(m−1)` so the maximum is 1:
//!
//! * GD minimizes the squared Hilbert-Schmidt disturbance over all
//!   measurements;
//! * MIN maximizes it over measurements that leave the marginal of A
//!   untouched.
//!
//! Exact optimizers are known in three situations handled here: every
//! `2⊗n` state (GD), a non-degenerate marginal (MIN), and a marginal with
//! a single two-fold degenerate eigenvalue (MIN, reduced to a quadratic
//! form over the Bloch sphere of the degenerate plane). Everything else
//! gets eigenvalue bounds from the Bloch correlation data.

use nalgebra::{DMatrix, DVector};

use crate::bloch::{decompose, generators, gram};
use crate::error::{Error, Result};
use crate::linalg::{
    cx, eigh_clustered, eigh_sym, eigh_sym_clustered, frobenius_sq, kron, max_abs_diff, outer, C64,
};
use crate::states::{DensityMatrix, StateFamily, StateSpec};

/// Marginal eigenvalue gaps below this (relative to scale 1) count as
/// degenerate. Well above eigensolver noise on the ≤16×16 matrices used
/// here and below every gap appearing in the catalogued states.
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Tolerance on the measurement invariants (idempotence, orthogonality,
/// completeness).
pub const MEASUREMENT_TOL: f64 = 1e-10;

/// Looser validity tolerance for the analytically constructed 3⊗3
/// candidate projectors: strict enough to reject genuinely non-projector
/// operators, loose enough to accept numerically built basis projectors.
pub const CANDIDATE_TOL: f64 = 1e-8;

/// Tolerance for `preserves_marginal`.
pub const MARGINAL_TOL: f64 = 1e-9;

/// A complete von Neumann measurement on an `m`-dimensional subsystem:
/// `m` mutually orthogonal rank-1 projectors summing to the identity.
#[derive(Debug, Clone)]
pub struct Measurement {
    dim: usize,
    projectors: Vec<DMatrix<C64>>,
}

/// Worst violation of the measurement invariants over a projector list:
/// hermiticity, idempotence, unit trace (rank 1), mutual orthogonality
/// and completeness.
pub fn measurement_defect(projectors: &[DMatrix<C64>]) -> f64 {
    let dim = projectors[0].nrows();
    let mut defect = 0.0_f64;
    let mut sum = DMatrix::<C64>::zeros(dim, dim);
    for p in projectors {
        defect = defect.max(crate::linalg::hermiticity_defect(p));
        defect = defect.max(max_abs_diff(&(p * p), p));
        let tr = p.trace();
        defect = defect.max((tr.re - 1.0).hypot(tr.im));
        sum += p;
    }
    defect = defect.max(max_abs_diff(&sum, &DMatrix::identity(dim, dim)));
    for (j, p) in projectors.iter().enumerate() {
        for q in projectors.iter().skip(j + 1) {
            let prod = p * q;
            defect = defect.max(prod.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
    }
    defect
}

impl Measurement {
    /// Validate a projector list at the default tolerance.
    pub fn new(projectors: Vec<DMatrix<C64>>) -> Result<Self> {
        Self::with_tolerance(projectors, MEASUREMENT_TOL)
    }

    /// Validate a projector list at a caller-chosen tolerance.
    pub fn with_tolerance(projectors: Vec<DMatrix<C64>>, tol: f64) -> Result<Self> {
        let dim = projectors
            .first()
            .ok_or(Error::EmptyInput {
                context: "measurement needs at least one projector",
            })?
            .nrows();
        if projectors.len() != dim || projectors.iter().any(|p| p.nrows() != dim || p.ncols() != dim)
        {
            return Err(Error::DimensionMismatch {
                context: "measurement projector count vs dimension",
                expected: dim,
                actual: projectors.len(),
            });
        }
        let defect = measurement_defect(&projectors);
        if defect > tol {
            return Err(Error::InvalidMeasurement { defect, tol });
        }
        Ok(Self { dim, projectors })
    }

    /// The computational-basis measurement `{|k⟩⟨k|}`.
    pub fn computational(dim: usize) -> Self {
        let projectors = (0..dim)
            .map(|k| {
                let mut p = DMatrix::<C64>::zeros(dim, dim);
                p[(k, k)] = cx(1.0, 0.0);
                p
            })
            .collect();
        Self { dim, projectors }
    }

    /// Measurement whose projectors are the columns of a unitary.
    pub fn from_unitary(u: &DMatrix<C64>) -> Result<Self> {
        let kets: Vec<DVector<C64>> = (0..u.ncols()).map(|j| u.column(j).into_owned()).collect();
        Self::from_kets(&kets)
    }

    /// Measurement from unit kets. With `dim − 1` kets the last projector
    /// is completed as `I − ΣΠ`; with `dim` kets the list is used as is.
    pub fn from_kets(kets: &[DVector<C64>]) -> Result<Self> {
        let dim = kets
            .first()
            .ok_or(Error::EmptyInput {
                context: "measurement needs at least one ket",
            })?
            .len();
        let mut projectors: Vec<DMatrix<C64>> = kets.iter().map(|k| outer(k, k)).collect();
        if projectors.len() + 1 == dim {
            let sum: DMatrix<C64> = projectors
                .iter()
                .fold(DMatrix::zeros(dim, dim), |acc, p| acc + p);
            projectors.push(DMatrix::identity(dim, dim) - sum);
        }
        Self::new(projectors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn projectors(&self) -> &[DMatrix<C64>] {
        &self.projectors
    }
}

/// Which side of an estimate a value sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    Exact,
    LowerBound,
    UpperBound,
    Sampled,
}

impl std::fmt::Display for EstimateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EstimateKind::Exact => "exact",
            EstimateKind::LowerBound => "lower-bound",
            EstimateKind::UpperBound => "upper-bound",
            EstimateKind::Sampled => "sampled",
        })
    }
}

/// A measure value tagged with its status and, when known, the measurement
/// achieving it.
#[derive(Debug, Clone)]
pub struct MeasureEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub witness: Option<Measurement>,
}

impl MeasureEstimate {
    pub fn new(value: f64, kind: EstimateKind) -> Self {
        Self {
            value,
            kind,
            witness: None,
        }
    }

    pub fn with_witness(mut self, witness: Measurement) -> Self {
        self.witness = Some(witness);
        self
    }

    /// Value clamped to [0, 1] for reporting. Internal comparisons use the
    /// raw `value` so bound violations stay visible.
    pub fn clamped_value(&self) -> f64 {
        self.value.clamp(0.0, 1.0)
    }
}

fn require_ordered(rho: &DensityMatrix) -> Result<()> {
    let (m, n) = rho.dims();
    if m > n {
        return Err(Error::SubsystemOrder { dim_a: m, dim_b: n });
    }
    Ok(())
}

fn require_meas_dim(rho: &DensityMatrix, meas: &Measurement) -> Result<()> {
    if meas.dim() != rho.dim_a() {
        return Err(Error::DimensionMismatch {
            context: "measurement dimension vs subsystem A",
            expected: rho.dim_a(),
            actual: meas.dim(),
        });
    }
    Ok(())
}

fn pinch(rho: &DensityMatrix, meas: &Measurement) -> DMatrix<C64> {
    let id_b = DMatrix::<C64>::identity(rho.dim_b(), rho.dim_b());
    let mut out = DMatrix::<C64>::zeros(rho.total_dim(), rho.total_dim());
    for p in meas.projectors() {
        let full = kron(p, &id_b);
        out += &full * rho.matrix() * &full;
    }
    out
}

/// `Π^A(ρ) = Σₖ (Πₖ⊗I) ρ (Πₖ⊗I)` — the post-measurement (dephased) state.
pub fn apply_measurement(rho: &DensityMatrix, meas: &Measurement) -> Result<DensityMatrix> {
    require_meas_dim(rho, meas)?;
    DensityMatrix::new(pinch(rho, meas), rho.dim_a(), rho.dim_b())
}

/// `(m/(m−1)) · ‖ρ − Π^A(ρ)‖²` for a concrete measurement.
pub fn normalized_distance(rho: &DensityMatrix, meas: &Measurement) -> Result<f64> {
    require_ordered(rho)?;
    require_meas_dim(rho, meas)?;
    let m = rho.dim_a() as f64;
    let diff = rho.matrix() - pinch(rho, meas);
    Ok(m / (m - 1.0) * frobenius_sq(&diff))
}

/// Partial trace over subsystem B.
pub fn marginal(rho: &DensityMatrix) -> DMatrix<C64> {
    let m = rho.dim_a();
    DMatrix::from_fn(m, m, |a, b| rho.block(a, b).trace())
}

/// Does the pinched marginal equal the marginal itself?
pub fn preserves_marginal(meas: &Measurement, rho_a: &DMatrix<C64>) -> bool {
    if meas.dim() != rho_a.nrows() {
        return false;
    }
    let mut pinched = DMatrix::<C64>::zeros(meas.dim(), meas.dim());
    for p in meas.projectors() {
        pinched += p * rho_a * p;
    }
    max_abs_diff(&pinched, rho_a) <= MARGINAL_TOL
}

/// Eigenvalue lower bound on GD:
/// `(2/(m(m−1)n)) [ ‖x‖² + (2/n)‖T‖² − Σ_{k=1}^{m−1} λₖ↓(G) ]`.
pub fn gd_lower_bound(rho: &DensityMatrix) -> Result<MeasureEstimate> {
    require_ordered(rho)?;
    let (m, n) = rho.dims();
    let bf = decompose(rho)?;
    let g = gram(&bf);
    let vals = eigh_sym(&g).0;
    let top: f64 = vals.iter().take(m - 1).sum();
    let total = bf.x_norm_sq() + 2.0 / n as f64 * bf.t_norm_sq();
    let value = 2.0 / (m as f64 * (m as f64 - 1.0) * n as f64) * (total - top);
    Ok(MeasureEstimate::new(value, EstimateKind::LowerBound))
}

/// Eigenvalue upper bound on MIN:
/// `(4/(m(m−1)n²)) Σ_{k=1}^{m²−m} λₖ↓(TTᵗ)`.
pub fn min_upper_bound(rho: &DensityMatrix) -> Result<MeasureEstimate> {
    require_ordered(rho)?;
    let (m, n) = rho.dims();
    let bf = decompose(rho)?;
    let tt = &bf.t * bf.t.transpose();
    let tt = (&tt + tt.transpose()) * 0.5;
    let vals = eigh_sym(&tt).0;
    let top: f64 = vals.iter().take(m * m - m).sum();
    let value = 4.0 / (m as f64 * (m as f64 - 1.0) * (n * n) as f64) * top;
    Ok(MeasureEstimate::new(value, EstimateKind::UpperBound))
}

/// Exact GD for `2⊗n` states, where the lower bound is always saturated.
/// The optimal projectors are `(I ± e·σ)/2` with `e` the top eigenvector
/// of `G`.
pub fn gd_exact_2xn(rho: &DensityMatrix) -> Result<MeasureEstimate> {
    if rho.dim_a() != 2 {
        return Err(Error::UnsupportedDimension {
            op: "gd_exact_2xn",
            required: 2,
            actual: rho.dim_a(),
        });
    }
    require_ordered(rho)?;
    let bf = decompose(rho)?;
    let g = gram(&bf);
    let clusters = eigh_sym_clustered(&g, DEGENERACY_TOL);
    let e = &clusters[0].basis[0];
    let pauli = generators(2);
    let x = pauli.combine(e.as_slice());
    let id = DMatrix::<C64>::identity(2, 2);
    let plus = (&id + &x) * cx(0.5, 0.0);
    let minus = (&id - &x) * cx(0.5, 0.0);
    let witness = Measurement::new(vec![plus, minus])?;
    let value = gd_lower_bound(rho)?.value;
    Ok(MeasureEstimate::new(value, EstimateKind::Exact).with_witness(witness))
}

/// Candidate exact GD for 3⊗3 states. Builds
/// `Π₁,₂ = I/3 + (±e₁ + e₂/√3)·μ/2`, `Π₃ = I − Π₁ − Π₂` from top
/// eigenvectors of `G` and accepts when all three are legitimate
/// projectors, in which case the lower bound is attained.
///
/// Within degenerate top eigenspaces the eigenvector pair is not unique,
/// so every ordered pair from the relevant clusters (and both signs of
/// `e₂`) is tried; the first valid projector triple wins.
pub fn gd_candidate_3x3(rho: &DensityMatrix) -> Result<Option<MeasureEstimate>> {
    if rho.dim_a() != 3 {
        return Err(Error::UnsupportedDimension {
            op: "gd_candidate_3x3",
            required: 3,
            actual: rho.dim_a(),
        });
    }
    require_ordered(rho)?;
    let bf = decompose(rho)?;
    let g = gram(&bf);
    let clusters = eigh_sym_clustered(&g, DEGENERACY_TOL);

    let c1 = &clusters[0];
    let c2 = if c1.basis.len() >= 2 {
        c1
    } else {
        &clusters[1]
    };
    let same = std::ptr::eq(c1, c2);

    let basis = generators(3);
    let id = DMatrix::<C64>::identity(3, 3);
    for (i, e1) in c1.basis.iter().enumerate() {
        for (j, e2) in c2.basis.iter().enumerate() {
            if same && i == j {
                continue;
            }
            for sign in [1.0, -1.0] {
                let dir: Vec<f64> = e1
                    .iter()
                    .zip(e2.iter())
                    .map(|(a, b)| (a + sign * b / 3f64.sqrt()) / 2.0)
                    .collect();
                let anti: Vec<f64> = e1
                    .iter()
                    .zip(e2.iter())
                    .map(|(a, b)| (-a + sign * b / 3f64.sqrt()) / 2.0)
                    .collect();
                let p1 = &id * cx(1.0 / 3.0, 0.0) + basis.combine(&dir);
                let p2 = &id * cx(1.0 / 3.0, 0.0) + basis.combine(&anti);
                let p3 = &id - &p1 - &p2;
                let projectors = vec![p1, p2, p3];
                if measurement_defect(&projectors) <= CANDIDATE_TOL {
                    let witness = Measurement::with_tolerance(projectors, CANDIDATE_TOL)?;
                    let value = gd_lower_bound(rho)?.value;
                    return Ok(Some(
                        MeasureEstimate::new(value, EstimateKind::Exact).with_witness(witness),
                    ));
                }
            }
        }
    }
    Ok(None)
}

fn marginal_min_gap(vals_desc: &[f64]) -> f64 {
    vals_desc
        .windows(2)
        .map(|w| (w[0] - w[1]).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Exact MIN when the marginal of A is non-degenerate: its eigenprojectors
/// form the unique admissible measurement.
pub fn min_exact_nondegenerate(rho: &DensityMatrix) -> Result<MeasureEstimate> {
    require_ordered(rho)?;
    let rho_a = marginal(rho);
    let clusters = eigh_clustered(&rho_a, DEGENERACY_TOL);
    if clusters.iter().any(|c| c.dim() > 1) {
        let vals: Vec<f64> = crate::linalg::eigh_values(&rho_a);
        return Err(Error::DegenerateMarginal {
            gap: marginal_min_gap(&vals),
        });
    }
    let projectors: Vec<DMatrix<C64>> = clusters
        .iter()
        .map(|c| outer(&c.basis[0], &c.basis[0]))
        .collect();
    let witness = Measurement::new(projectors)?;
    let value = normalized_distance(rho, &witness)?;
    Ok(MeasureEstimate::new(value, EstimateKind::Exact).with_witness(witness))
}

/// The single two-fold degenerate eigenspace of a marginal, with every
/// other eigenvalue simple. Admissible MIN measurements keep the simple
/// eigenprojectors fixed and choose an orthonormal pair inside the plane,
/// parametrized by a unit vector on the Bloch sphere of the plane.
#[derive(Debug, Clone)]
pub struct DegenerateBlock {
    dim: usize,
    fixed: Vec<DVector<C64>>,
    plane: [DVector<C64>; 2],
}

impl DegenerateBlock {
    pub fn from_state(rho: &DensityMatrix) -> Result<Self> {
        require_ordered(rho)?;
        let rho_a = marginal(rho);
        let clusters = eigh_clustered(&rho_a, DEGENERACY_TOL);
        let mut fixed = Vec::new();
        let mut planes = Vec::new();
        for c in &clusters {
            match c.dim() {
                1 => fixed.push(c.basis[0].clone()),
                2 => planes.push([c.basis[0].clone(), c.basis[1].clone()]),
                _ => {
                    return Err(Error::DegeneracyPattern {
                        required: "one 2-fold degenerate eigenvalue, rest simple",
                        found: format!(
                            "cluster dimensions {:?}",
                            clusters.iter().map(|c| c.dim()).collect::<Vec<_>>()
                        ),
                    })
                }
            }
        }
        if planes.len() != 1 {
            return Err(Error::DegeneracyPattern {
                required: "one 2-fold degenerate eigenvalue, rest simple",
                found: format!(
                    "cluster dimensions {:?}",
                    clusters.iter().map(|c| c.dim()).collect::<Vec<_>>()
                ),
            });
        }
        Ok(Self {
            dim: rho.dim_a(),
            fixed,
            plane: planes.into_iter().next().unwrap(),
        })
    }

    /// The admissible measurement at Bloch direction `x` (normalized
    /// internally): `Π± = (E ± x·σ)/2` inside the plane plus the fixed
    /// eigenprojectors.
    pub fn measurement(&self, x: &[f64; 3]) -> Result<Measurement> {
        let norm = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if norm <= 1e-12 || !norm.is_finite() {
            return Err(Error::InvalidArgument {
                context: "block direction must be a nonzero finite vector",
            });
        }
        let (x0, x1, x2) = (x[0] / norm, x[1] / norm, x[2] / norm);
        let u = &self.plane[0];
        let w = &self.plane[1];
        let uw = outer(u, w);
        let wu = outer(w, u);
        let uu = outer(u, u);
        let ww = outer(w, w);
        let sigma = &uw * cx(x0, -x1) + &wu * cx(x0, x1) + (&uu - &ww) * cx(x2, 0.0);
        let plane_id = &uu + &ww;
        let plus = (&plane_id + &sigma) * cx(0.5, 0.0);
        let minus = (&plane_id - &sigma) * cx(0.5, 0.0);
        let mut projectors: Vec<DMatrix<C64>> =
            self.fixed.iter().map(|v| outer(v, v)).collect();
        projectors.push(plus);
        projectors.push(minus);
        Measurement::new(projectors)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// The normalized disturbance over the block's admissible measurements as
/// a quadratic form `x ↦ xᵗ Q x` on unit Bloch vectors, built by a
/// polarization identity from nine evaluations (±eᵢ and (eᵢ+eⱼ)/√2).
pub fn min_2d_quadratic_form(rho: &DensityMatrix) -> Result<DMatrix<f64>> {
    let block = DegenerateBlock::from_state(rho)?;
    quadratic_form(rho, &block)
}

fn quadratic_form(rho: &DensityMatrix, block: &DegenerateBlock) -> Result<DMatrix<f64>> {
    let axes = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let eval = |x: [f64; 3]| -> Result<f64> { normalized_distance(rho, &block.measurement(&x)?) };
    let mut q = DMatrix::<f64>::zeros(3, 3);
    for (i, axis) in axes.iter().enumerate() {
        let neg = [-axis[0], -axis[1], -axis[2]];
        q[(i, i)] = (eval(*axis)? + eval(neg)?) / 2.0;
    }
    for i in 0..3 {
        for j in (i + 1)..3 {
            let mixed = [
                (axes[i][0] + axes[j][0]) / 2f64.sqrt(),
                (axes[i][1] + axes[j][1]) / 2f64.sqrt(),
                (axes[i][2] + axes[j][2]) / 2f64.sqrt(),
            ];
            let off = eval(mixed)? - (q[(i, i)] + q[(j, j)]) / 2.0;
            q[(i, j)] = off;
            q[(j, i)] = off;
        }
    }
    Ok(q)
}

/// Exact MIN for a marginal with a single 2-fold degenerate eigenvalue.
/// On unit vectors the disturbance is the quadratic form above, so the
/// maximum is its largest eigenvalue, attained at the top eigenvector.
pub fn min_exact_2d_block(rho: &DensityMatrix) -> Result<MeasureEstimate> {
    let block = DegenerateBlock::from_state(rho)?;
    let q = quadratic_form(rho, &block)?;
    let (vals, vecs) = eigh_sym(&q);
    let top = &vecs[0];
    let witness = block.measurement(&[top[0], top[1], top[2]])?;
    Ok(MeasureEstimate::new(vals[0], EstimateKind::Exact).with_witness(witness))
}

/// Closed-form GD and MIN for the families where they are known; `None`
/// for families only covered by bounds and sampling. Kept as a lookup,
/// separate from the general machinery, so the two can be regression
/// tested against each other.
pub fn closed_forms(spec: &StateSpec) -> Result<Option<(MeasureEstimate, MeasureEstimate)>> {
    let exact = |v: f64| MeasureEstimate::new(v, EstimateKind::Exact);
    let get = |key: &str| -> Result<f64> {
        spec.params.get(key).copied().ok_or_else(|| Error::Parse {
            token: key.to_string(),
            reason: format!("missing parameter for {}", spec.family),
        })
    };
    Ok(match spec.family {
        StateFamily::Horodecki2x4 => {
            let a = get("a")?;
            let denom = (1.0 + 7.0 * a).powi(2);
            let gd = if a <= 1.0 / 3.0 {
                12.0 * a * a / denom
            } else {
                (1.0 + a * (6.0 * a - 1.0)) / denom
            };
            let min = 12.0 * a * a / denom;
            Some((exact(gd), exact(min)))
        }
        StateFamily::Werner => {
            let m = get("m")?;
            let z = get("z")?;
            let v = ((m * z - 1.0) / (m * m - 1.0)).powi(2);
            Some((exact(v), exact(v)))
        }
        StateFamily::Isotropic => {
            let m = get("m")?;
            let z = get("z")?;
            let v = ((m * m * z - 1.0) / (m * m - 1.0)).powi(2);
            Some((exact(v), exact(v)))
        }
        StateFamily::Benatti => Some((exact(1.0 / 9.0), exact(1.0 / 9.0))),
        _ => None,
    })
}

/// Precomputed block data for fast repeated disturbance evaluation against
/// rank-1 measurements given as kets. Used by the Monte Carlo samplers.
///
/// For rank-1 projectors `Πₖ = uₖuₖ†` the pinching is a conditional
/// expectation, so `‖ρ − Π(ρ)‖² = Tr ρ² − Σₖ Tr Bₖ²` with
/// `Bₖ = Σᵢⱼ ūₖᵢ uₖⱼ ρ_blocks[i][j]`.
pub struct DistanceEngine {
    blocks: Vec<DMatrix<C64>>,
    purity: f64,
    dim_a: usize,
    dim_b: usize,
    prefactor: f64,
}

impl DistanceEngine {
    pub fn new(rho: &DensityMatrix) -> Result<Self> {
        require_ordered(rho)?;
        let (m, n) = rho.dims();
        let blocks = (0..m * m)
            .map(|idx| rho.block(idx / m, idx % m))
            .collect();
        Ok(Self {
            blocks,
            purity: rho.purity(),
            dim_a: m,
            dim_b: n,
            prefactor: m as f64 / (m as f64 - 1.0),
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    /// `(m/(m−1))·‖ρ − Π(ρ)‖²` for the measurement `{uu† : u ∈ kets}`.
    pub fn normalized_disturbance(&self, kets: &[DVector<C64>]) -> f64 {
        let n = self.dim_b;
        let m = self.dim_a;
        let mut kept = 0.0;
        let mut b = DMatrix::<C64>::zeros(n, n);
        for u in kets {
            b.fill(cx(0.0, 0.0));
            for i in 0..m {
                for j in 0..m {
                    let w = u[i].conj() * u[j];
                    if w.norm_sqr() > 0.0 {
                        let block = &self.blocks[i * m + j];
                        for (dst, src) in b.iter_mut().zip(block.iter()) {
                            *dst += src * w;
                        }
                    }
                }
            }
            kept += b.iter().map(|z| z.norm_sqr()).sum::<f64>();
        }
        self.prefactor * (self.purity - kept)
    }
}
