//! Deterministic Monte Carlo search over von Neumann measurements.
//!
//! GD is minimized over all measurements on A; MIN is maximized over the
//! marginal-preserving ones. Measurements are sampled from the Haar
//! distribution (per eigenspace of the marginal in the MIN case, which
//! enforces marginal preservation by construction).
//!
//! Trial `k` draws from a counter-derived stream of `(seed, k)`, so the
//! set of sampled measurements — and hence every report — is independent
//! of thread count and scheduling. Ties are broken by the lowest trial
//! index.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{cx, eigh_clustered, C64};
use crate::measures::{marginal, DistanceEngine, Measurement, DEGENERACY_TOL};
use crate::states::DensityMatrix;

/// Stream index reserved for the refinement walk.
const REFINE_STREAM: u64 = u64::MAX;

/// Refinement schedule: rounds, initial rotation angle, and the stall
/// length after which the angle halves.
const REFINE_ROUNDS: usize = 200;
const REFINE_ANGLE: f64 = 0.05;
const REFINE_STALL: usize = 20;

/// Monte Carlo configuration.
#[derive(Debug, Clone, Copy)]
pub struct SamplerConfig {
    /// Number of Haar samples.
    pub trials: usize,
    /// Base seed; trial `k` uses the stream derived from `(seed, k)`.
    pub seed: u64,
    /// Local perturbation refinement around the best raw candidate.
    /// Disabled by default so raw-sampling statistics stay untouched.
    pub refine: bool,
}

impl SamplerConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            refine: false,
        }
    }

    pub fn with_refine(mut self, refine: bool) -> Self {
        self.refine = refine;
        self
    }
}

/// Outcome of a sampling run. `values` holds the raw per-trial results in
/// trial order; refinement only updates the best candidate.
#[derive(Debug, Clone)]
pub struct SampleReport {
    pub best_value: f64,
    pub best_measurement: Measurement,
    /// Index of the raw trial the best candidate originated from.
    pub best_trial: usize,
    pub values: Vec<f64>,
}

impl SampleReport {
    /// Equal-width histogram of the raw sampled values.
    pub fn histogram(&self, bins: usize) -> Result<Vec<(f64, u64)>> {
        histogram(&self.values, bins)
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn ginibre(d: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    DMatrix::from_fn(d, d, |_, _| {
        cx(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Phase-corrected QR of an arbitrary matrix: the unique unitary factor
/// with the triangular factor's diagonal rotated to the positive real
/// axis. For Ginibre input this samples the Haar measure.
fn unitarize(m: DMatrix<C64>) -> DMatrix<C64> {
    let d = m.nrows();
    let (q, r) = m.qr().unpack();
    let mut u = q;
    for j in 0..d {
        let rjj = r[(j, j)];
        let norm = rjj.norm();
        let phase = if norm > 0.0 { rjj / norm } else { cx(1.0, 0.0) };
        for i in 0..d {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Haar-distributed `d×d` unitary drawn from `rng`.
pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> DMatrix<C64> {
    unitarize(ginibre(d, rng))
}

/// Admissible measurement structure: one orthonormal frame per marginal
/// eigenspace. The unconstrained (GD) case is a single full-space frame.
struct Constraint {
    dim: usize,
    clusters: Vec<Vec<DVector<C64>>>,
}

impl Constraint {
    fn unconstrained(dim: usize) -> Self {
        let basis = (0..dim)
            .map(|i| {
                let mut v = DVector::<C64>::zeros(dim);
                v[i] = cx(1.0, 0.0);
                v
            })
            .collect();
        Self {
            dim,
            clusters: vec![basis],
        }
    }

    fn marginal_preserving(rho: &DensityMatrix) -> Self {
        let rho_a = marginal(rho);
        let clusters = eigh_clustered(&rho_a, DEGENERACY_TOL)
            .into_iter()
            .map(|c| c.basis)
            .collect();
        Self {
            dim: rho.dim_a(),
            clusters,
        }
    }

    fn draw_unitaries(&self, rng: &mut impl Rng) -> Vec<DMatrix<C64>> {
        self.clusters
            .iter()
            .map(|basis| haar_unitary(basis.len(), rng))
            .collect()
    }

    /// Measurement kets from per-cluster unitaries: each eigenspace frame
    /// rotated by its unitary.
    fn kets(&self, unitaries: &[DMatrix<C64>]) -> Vec<DVector<C64>> {
        let mut kets = Vec::with_capacity(self.dim);
        for (basis, u) in self.clusters.iter().zip(unitaries) {
            let dc = basis.len();
            for j in 0..dc {
                let mut ket = DVector::<C64>::zeros(self.dim);
                for (i, b) in basis.iter().enumerate() {
                    let w = u[(i, j)];
                    if w.norm_sqr() > 0.0 {
                        ket.axpy(w, b, cx(1.0, 0.0));
                    }
                }
                kets.push(ket);
            }
        }
        kets
    }
}

fn perturb(unitaries: &[DMatrix<C64>], angle: f64, rng: &mut impl Rng) -> Vec<DMatrix<C64>> {
    unitaries
        .iter()
        .map(|u| {
            let d = u.nrows();
            if d == 1 {
                return u.clone();
            }
            let g = ginibre(d, rng);
            let skew = (&g - g.adjoint()) * cx(0.5 * angle, 0.0);
            unitarize(u * (DMatrix::identity(d, d) + skew))
        })
        .collect()
}

fn run_sampling(
    rho: &DensityMatrix,
    constraint: Constraint,
    minimize: bool,
    cfg: &SamplerConfig,
) -> Result<SampleReport> {
    if cfg.trials == 0 {
        return Err(Error::InvalidArgument {
            context: "sampler needs at least one trial",
        });
    }
    let engine = DistanceEngine::new(rho)?;

    let values: Vec<f64> = (0..cfg.trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(cfg.seed, k as u64);
            let unitaries = constraint.draw_unitaries(&mut rng);
            engine.normalized_disturbance(&constraint.kets(&unitaries))
        })
        .collect();

    let mut best_trial = 0usize;
    for (k, &v) in values.iter().enumerate() {
        let better = if minimize {
            v < values[best_trial]
        } else {
            v > values[best_trial]
        };
        if better {
            best_trial = k;
        }
    }

    let mut rng = stream_rng(cfg.seed, best_trial as u64);
    let mut unitaries = constraint.draw_unitaries(&mut rng);
    let mut best_value = engine.normalized_disturbance(&constraint.kets(&unitaries));

    if cfg.refine {
        let mut refine_rng = stream_rng(cfg.seed, REFINE_STREAM);
        let mut angle = REFINE_ANGLE;
        let mut stall = 0usize;
        for _ in 0..REFINE_ROUNDS {
            let candidate = perturb(&unitaries, angle, &mut refine_rng);
            let v = engine.normalized_disturbance(&constraint.kets(&candidate));
            let better = if minimize {
                v < best_value
            } else {
                v > best_value
            };
            if better {
                best_value = v;
                unitaries = candidate;
                stall = 0;
            } else {
                stall += 1;
                if stall >= REFINE_STALL {
                    angle *= 0.5;
                    stall = 0;
                }
            }
        }
    }

    let best_measurement = Measurement::from_kets(&constraint.kets(&unitaries))?;
    Ok(SampleReport {
        best_value,
        best_measurement,
        best_trial,
        values,
    })
}

/// Minimize the normalized disturbance over Haar-random measurements on A.
pub fn sample_gd(rho: &DensityMatrix, cfg: &SamplerConfig) -> Result<SampleReport> {
    let constraint = Constraint::unconstrained(rho.dim_a());
    run_sampling(rho, constraint, true, cfg)
}

/// Maximize the normalized disturbance over marginal-preserving
/// measurements: Haar frames drawn independently inside each eigenspace
/// of the marginal. A fully non-degenerate marginal admits exactly one
/// measurement; a fully degenerate one reduces to unconstrained sampling.
pub fn sample_min(rho: &DensityMatrix, cfg: &SamplerConfig) -> Result<SampleReport> {
    let constraint = Constraint::marginal_preserving(rho);
    run_sampling(rho, constraint, false, cfg)
}

/// Equal-width histogram over `[min, max]` of the input; counts sum to the
/// number of values.
pub fn histogram(values: &[f64], bins: usize) -> Result<Vec<(f64, u64)>> {
    if values.is_empty() {
        return Err(Error::EmptyInput {
            context: "histogram of no values",
        });
    }
    if bins == 0 {
        return Err(Error::InvalidArgument {
            context: "histogram needs at least one bin",
        });
    }
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &v in values {
        let idx = if width == 0.0 {
            0
        } else {
            (((v - lo) / width) as usize).min(bins - 1)
        };
        counts[idx] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (lo + i as f64 * width, c))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::measures::{
        gd_exact_2xn, gd_lower_bound, min_upper_bound, normalized_distance, preserves_marginal,
    };
    use crate::states::{horodecki_2x4, horodecki_3x3, upb_pyramid, upb_tiles};
    use approx::assert_abs_diff_eq;

    #[test]
    fn haar_unitary_is_unitary_and_deterministic() {
        let mut rng = stream_rng(7, 0);
        let u = haar_unitary(3, &mut rng);
        let id = DMatrix::<C64>::identity(3, 3);
        assert!(max_abs_diff(&(u.adjoint() * &u), &id) < 1e-10);

        let mut rng2 = stream_rng(7, 0);
        let u2 = haar_unitary(3, &mut rng2);
        assert!(max_abs_diff(&u, &u2) == 0.0);

        let mut rng3 = stream_rng(8, 0);
        let u3 = haar_unitary(3, &mut rng3);
        assert!(max_abs_diff(&u, &u3) > 1e-3);
    }

    #[test]
    fn haar_unitary_dim_one_is_a_phase() {
        let mut rng = stream_rng(3, 1);
        let u = haar_unitary(1, &mut rng);
        assert_abs_diff_eq!(u[(0, 0)].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn haar_first_entry_moment() {
        let mut sum = 0.0;
        let n = 10_000;
        for k in 0..n {
            let mut rng = stream_rng(42, k);
            let u = haar_unitary(2, &mut rng);
            sum += u[(0, 0)].norm_sqr();
        }
        let mean = sum / n as f64;
        assert!((mean - 0.5).abs() < 0.02, "mean |U00|^2 = {mean}");
    }

    #[test]
    fn reports_are_thread_count_independent() {
        let rho = upb_tiles();
        let cfg = SamplerConfig::new(200, 11).with_refine(true);
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| sample_gd(&rho, &cfg).unwrap())
        };
        let a = run(1);
        let b = run(2);
        assert_eq!(a.best_trial, b.best_trial);
        assert_eq!(a.best_value.to_bits(), b.best_value.to_bits());
        assert_eq!(a.values.len(), b.values.len());
        for (x, y) in a.values.iter().zip(&b.values) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn nested_trials_are_monotone() {
        let rho = horodecki_3x3(2.0).unwrap();
        let small = sample_gd(&rho, &SamplerConfig::new(50, 5)).unwrap();
        let large = sample_gd(&rho, &SamplerConfig::new(500, 5)).unwrap();
        assert!(large.best_value <= small.best_value);
        // prefix of values identical: trial k depends only on (seed, k)
        for (x, y) in small.values.iter().zip(&large.values) {
            assert_eq!(x.to_bits(), y.to_bits());
        }

        let small = sample_min(&rho, &SamplerConfig::new(50, 5)).unwrap();
        let large = sample_min(&rho, &SamplerConfig::new(500, 5)).unwrap();
        assert!(large.best_value >= small.best_value);
    }

    #[test]
    fn sampled_min_measurements_preserve_the_marginal() {
        let rho = upb_pyramid();
        let report = sample_min(&rho, &SamplerConfig::new(20, 9)).unwrap();
        let rho_a = marginal(&rho);
        assert!(preserves_marginal(&report.best_measurement, &rho_a));
        assert_abs_diff_eq!(
            normalized_distance(&rho, &report.best_measurement).unwrap(),
            report.best_value,
            epsilon = 1e-12
        );
    }

    #[test]
    fn tiles_min_sampling_is_exact_for_any_trial_count() {
        // non-degenerate marginal: the admissible measurement is unique
        let rho = upb_tiles();
        let report = sample_min(&rho, &SamplerConfig::new(3, 1)).unwrap();
        assert_abs_diff_eq!(report.best_value, 95.0 / 704.0, epsilon = 1e-12);
        assert!(report.values.iter().all(|v| (v - 95.0 / 704.0).abs() < 1e-12));
    }

    #[test]
    fn pyramid_min_sampling_converges() {
        let rho = upb_pyramid();
        let report = sample_min(&rho, &SamplerConfig::new(10_000, 2)).unwrap();
        let exact = 0.75 * (5f64.sqrt() - 2.0);
        assert!(report.best_value <= exact + 1e-12);
        assert!(
            (report.best_value - exact).abs() < 1e-4,
            "best {} vs exact {}",
            report.best_value,
            exact
        );
    }

    #[test]
    fn gd_sampling_matches_2xn_exact_value() {
        let rho = horodecki_2x4(0.2).unwrap();
        let exact = gd_exact_2xn(&rho).unwrap().value;
        let report = sample_gd(&rho, &SamplerConfig::new(10_000, 3)).unwrap();
        assert!(report.best_value >= exact - 1e-12);
        assert!(
            (report.best_value - exact).abs() < 1e-4,
            "best {} vs exact {}",
            report.best_value,
            exact
        );
    }

    #[test]
    fn sampling_respects_the_eigenvalue_bounds() {
        for rho in [
            horodecki_2x4(0.6).unwrap(),
            horodecki_3x3(1.0).unwrap(),
            upb_pyramid(),
            upb_tiles(),
        ] {
            let cfg = SamplerConfig::new(300, 17);
            let gd = sample_gd(&rho, &cfg).unwrap();
            assert!(gd.best_value >= gd_lower_bound(&rho).unwrap().value - 1e-9);
            let min = sample_min(&rho, &cfg).unwrap();
            assert!(min.best_value <= min_upper_bound(&rho).unwrap().value + 1e-9);
        }
    }

    #[test]
    fn refinement_only_improves() {
        let rho = horodecki_3x3(2.5).unwrap();
        let raw = sample_gd(&rho, &SamplerConfig::new(100, 23)).unwrap();
        let refined = sample_gd(&rho, &SamplerConfig::new(100, 23).with_refine(true)).unwrap();
        assert!(refined.best_value <= raw.best_value);
        assert_eq!(raw.best_trial, refined.best_trial);
        // raw values untouched by refinement
        for (x, y) in raw.values.iter().zip(&refined.values) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn histogram_edges() {
        let h = histogram(&[0.5; 10], 1).unwrap();
        assert_eq!(h, vec![(0.5, 10)]);

        let h = histogram(&[0.0, 1.0], 2).unwrap();
        assert_eq!(h.len(), 2);
        assert_eq!(h[0], (0.0, 1));
        assert_eq!(h[1].1, 1);
        assert_abs_diff_eq!(h[1].0, 0.5, epsilon = 1e-15);

        assert!(histogram(&[], 4).is_err());
        assert!(histogram(&[1.0], 0).is_err());

        let h = histogram(&[0.1, 0.2, 0.3, 0.4], 4).unwrap();
        assert_eq!(h.iter().map(|(_, c)| c).sum::<u64>(), 4);
    }
}
