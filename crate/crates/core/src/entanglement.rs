//! PPT/NPT classification and negativity.
//!
//! Used to reproduce the entanglement regimes of the 3⊗3 family and to
//! confirm that negativity vanishes on every bound entangled state in the
//! catalogue (which is exactly why it cannot quantify their quantumness).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{eigh_values, C64};
use crate::states::DensityMatrix;

/// PPT tolerance matches the density-matrix PSD tolerance so boundary
/// states classify stably.
pub const PPT_TOL: f64 = 1e-10;

/// Which subsystem to transpose.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Partial transpose of the chosen subsystem. Hermitian with unit trace,
/// but in general not positive.
pub fn partial_transpose(rho: &DensityMatrix, side: Side) -> DMatrix<C64> {
    let (m, n) = rho.dims();
    let d = m * n;
    let mut out = DMatrix::<C64>::zeros(d, d);
    for a in 0..m {
        for b in 0..m {
            for c in 0..n {
                for e in 0..n {
                    let v = rho.matrix()[(a * n + c, b * n + e)];
                    match side {
                        Side::B => out[(a * n + e, b * n + c)] = v,
                        Side::A => out[(b * n + c, a * n + e)] = v,
                    }
                }
            }
        }
    }
    out
}

/// Positive partial transpose within tolerance.
pub fn is_ppt(rho: &DensityMatrix) -> bool {
    let pt = partial_transpose(rho, Side::B);
    *eigh_values(&pt).last().unwrap() >= -PPT_TOL
}

/// Sum of the absolute values of negative eigenvalues of the partial
/// transpose; zero on every PPT state.
pub fn negativity(rho: &DensityMatrix) -> f64 {
    let pt = partial_transpose(rho, Side::B);
    let sum: f64 = eigh_values(&pt)
        .iter()
        .filter(|&&v| v < 0.0)
        .map(|v| -v)
        .sum();
    // kill the sign bit of a −0.0 from all-zero rounding
    if sum <= 0.0 {
        0.0
    } else {
        sum
    }
}

/// Entanglement regime of the 3⊗3 family as a function of β.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Horodecki3x3Regime {
    /// β ∈ [0, 1): NPT, hence entangled.
    NptEntangled,
    /// β ∈ [1, 2): PPT but unknown whether separable or entangled.
    PptUnknown,
    /// β ∈ [2, 3].
    Separable,
    /// β ∈ (3, 4].
    BoundEntangled,
    /// β ∈ (4, 5]: NPT and distillable.
    FreeEntangled,
}

impl Horodecki3x3Regime {
    /// Whether states in this regime have a positive partial transpose.
    pub fn is_ppt(&self) -> bool {
        !matches!(
            self,
            Horodecki3x3Regime::NptEntangled | Horodecki3x3Regime::FreeEntangled
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            Horodecki3x3Regime::NptEntangled => "npt-entangled",
            Horodecki3x3Regime::PptUnknown => "ppt-unknown",
            Horodecki3x3Regime::Separable => "separable",
            Horodecki3x3Regime::BoundEntangled => "bound-entangled",
            Horodecki3x3Regime::FreeEntangled => "free-entangled",
        }
    }
}

impl std::fmt::Display for Horodecki3x3Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Regime lookup for `ρ_β`. Separability labels come from the literature
/// on this family; the PPT/NPT component is independently checkable via
/// [`is_ppt`].
pub fn classify_horodecki_3x3(beta: f64) -> Result<Horodecki3x3Regime> {
    if !(0.0..=5.0).contains(&beta) || !beta.is_finite() {
        return Err(Error::ParamOutOfRange {
            family: "horodecki3x3",
            param: "beta",
            value: beta,
            min: 0.0,
            max: 5.0,
        });
    }
    Ok(if beta < 1.0 {
        Horodecki3x3Regime::NptEntangled
    } else if beta < 2.0 {
        Horodecki3x3Regime::PptUnknown
    } else if beta <= 3.0 {
        Horodecki3x3Regime::Separable
    } else if beta <= 4.0 {
        Horodecki3x3Regime::BoundEntangled
    } else {
        Horodecki3x3Regime::FreeEntangled
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cx, max_abs_diff, outer};
    use crate::states::{
        benatti_4x4, horodecki_2x4, horodecki_3x3, horodecki_4x4_key, isotropic, upb_pyramid,
        upb_tiles,
    };
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    #[test]
    fn product_state_partial_transpose_stays_positive() {
        // |+⟩⟨+| ⊗ |0⟩⟨0|
        let plus = DVector::from_vec(vec![cx(0.5f64.sqrt(), 0.0), cx(0.5f64.sqrt(), 0.0)]);
        let rho_a = outer(&plus, &plus);
        let mut full = DMatrix::<C64>::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                full[(i * 2, j * 2)] = rho_a[(i, j)];
            }
        }
        let rho = DensityMatrix::new(full, 2, 2).unwrap();
        assert!(is_ppt(&rho));
        assert_abs_diff_eq!(negativity(&rho), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn double_partial_transpose_is_identity() {
        let rho = upb_tiles();
        let pt = partial_transpose(&rho, Side::B);
        let ptpt = partial_transpose(
            &DensityMatrix::new_unchecked(pt, 3, 3),
            Side::B,
        );
        assert!(max_abs_diff(&ptpt, rho.matrix()) < 1e-15);
    }

    #[test]
    fn horodecki_3x3_regimes_match_ppt() {
        assert!(!is_ppt(&horodecki_3x3(0.0).unwrap()));
        assert!(!is_ppt(&horodecki_3x3(4.5).unwrap()));
        assert!(is_ppt(&horodecki_3x3(3.5).unwrap()));
        assert!(is_ppt(&horodecki_3x3(1.0).unwrap()));
        assert!(is_ppt(&horodecki_3x3(4.0).unwrap()));
        assert!(negativity(&horodecki_3x3(5.0).unwrap()) > 0.0);
    }

    #[test]
    fn horodecki_2x4_is_ppt_throughout() {
        for a in [0.0, 0.25, 0.5, 0.75, 1.0] {
            assert!(is_ppt(&horodecki_2x4(a).unwrap()), "a = {a}");
        }
    }

    #[test]
    fn bound_entangled_states_have_zero_negativity() {
        let states = [
            horodecki_2x4(0.5).unwrap(),
            horodecki_3x3(3.5).unwrap(),
            horodecki_4x4_key(),
            upb_pyramid(),
            upb_tiles(),
            benatti_4x4(),
            benatti_4x4().reinterpret(2, 8).unwrap(),
        ];
        for rho in &states {
            assert!(is_ppt(rho));
            assert!(negativity(rho) < 1e-9);
        }
    }

    #[test]
    fn maximally_entangled_qubit_pair_negativity() {
        let rho = isotropic(2, 1.0).unwrap();
        assert_abs_diff_eq!(negativity(&rho), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn classification_lookup() {
        use Horodecki3x3Regime::*;
        assert_eq!(classify_horodecki_3x3(2.5).unwrap(), Separable);
        assert_eq!(classify_horodecki_3x3(3.5).unwrap(), BoundEntangled);
        assert_eq!(classify_horodecki_3x3(1.5).unwrap(), PptUnknown);
        assert_eq!(classify_horodecki_3x3(0.2).unwrap(), NptEntangled);
        assert_eq!(classify_horodecki_3x3(5.0).unwrap(), FreeEntangled);
        assert!(classify_horodecki_3x3(5.1).is_err());
    }

    #[test]
    fn classification_agrees_with_ppt_on_grid() {
        for i in 0..=500 {
            let beta = i as f64 / 100.0;
            let regime = classify_horodecki_3x3(beta).unwrap();
            let computed = is_ppt(&horodecki_3x3(beta).unwrap());
            assert_eq!(regime.is_ppt(), computed, "beta = {beta}");
        }
    }

    #[test]
    fn negativity_is_convex_under_mixing() {
        for (z1, z2) in [(0.4, 0.9), (0.0, 1.0), (0.6, 0.7)] {
            let r1 = isotropic(3, z1).unwrap();
            let r2 = isotropic(3, z2).unwrap();
            let mix = DensityMatrix::new(
                (r1.matrix() + r2.matrix()) * cx(0.5, 0.0),
                3,
                3,
            )
            .unwrap();
            assert!(negativity(&mix) <= 0.5 * (negativity(&r1) + negativity(&r2)) + 1e-9);
        }
    }
}
