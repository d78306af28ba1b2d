//! Coherence and imaginarity measures.
//!
//! Coherence is measured against the diagonal (incoherent) states of the
//! reference basis, imaginarity against the real states. Every measure is
//! nonnegative; round-off below `-1e-12` is never produced, anything above
//! is clamped to zero.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    conj, dephase, real_projection, shannon_entropy, spectral_power, trace, von_neumann_entropy,
    DensityMatrix, LogBase, Spectrum, SUPPORT_EPS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasureKind {
    TsallisCoherence,
    RelEntCoherence,
    SkewCoherence,
    TsallisImaginarity,
    RelEntImaginarity,
}

impl MeasureKind {
    pub fn is_coherence(self) -> bool {
        matches!(
            self,
            MeasureKind::TsallisCoherence | MeasureKind::RelEntCoherence | MeasureKind::SkewCoherence
        )
    }
}

/// A fully parameterized measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Measure {
    TsallisCoherence { alpha: f64 },
    RelEntCoherence { base: LogBase },
    SkewCoherence,
    TsallisImaginarity { alpha: f64 },
    RelEntImaginarity { base: LogBase },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasureValue {
    pub kind: MeasureKind,
    pub value: f64,
    pub alpha: Option<f64>,
    pub log_base: Option<LogBase>,
}

pub(crate) fn check_coherence_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 && alpha != 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange { alpha, range: "(0,1)∪(1,2]" })
    }
}

pub(crate) fn check_imaginarity_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange { alpha, range: "(0,1)" })
    }
}

#[inline]
fn clamp_nonneg(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        x
    }
}

impl Measure {
    pub fn kind(&self) -> MeasureKind {
        match self {
            Measure::TsallisCoherence { .. } => MeasureKind::TsallisCoherence,
            Measure::RelEntCoherence { .. } => MeasureKind::RelEntCoherence,
            Measure::SkewCoherence => MeasureKind::SkewCoherence,
            Measure::TsallisImaginarity { .. } => MeasureKind::TsallisImaginarity,
            Measure::RelEntImaginarity { .. } => MeasureKind::RelEntImaginarity,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            Measure::TsallisCoherence { alpha } | Measure::TsallisImaginarity { alpha } => Some(alpha),
            _ => None,
        }
    }

    pub fn log_base(&self) -> Option<LogBase> {
        match *self {
            Measure::RelEntCoherence { base } | Measure::RelEntImaginarity { base } => Some(base),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Measure::TsallisCoherence { alpha } => check_coherence_alpha(alpha),
            Measure::TsallisImaginarity { alpha } => check_imaginarity_alpha(alpha),
            _ => Ok(()),
        }
    }

    pub fn evaluate(&self, rho: &DensityMatrix) -> Result<f64> {
        Ok(match *self {
            Measure::TsallisCoherence { alpha } => tsallis_coherence(rho, alpha)?.value,
            Measure::RelEntCoherence { base } => rel_ent_coherence(rho, base).value,
            Measure::SkewCoherence => skew_coherence(rho).value,
            Measure::TsallisImaginarity { alpha } => tsallis_imaginarity(rho, alpha)?.value,
            Measure::RelEntImaginarity { base } => rel_ent_imaginarity(rho, base).value,
        })
    }

    /// Closed-form value on a normalized pure state `|ψ⟩`, without any
    /// eigendecomposition.
    pub fn evaluate_pure(&self, psi: &[Complex64]) -> f64 {
        match *self {
            Measure::TsallisCoherence { alpha } => {
                let s: f64 = psi
                    .iter()
                    .map(|z| z.norm_sqr())
                    .filter(|&p| p > SUPPORT_EPS)
                    .map(|p| p.powf(1.0 / alpha))
                    .sum();
                clamp_nonneg((s - 1.0) / (alpha - 1.0))
            }
            Measure::RelEntCoherence { base } => {
                clamp_nonneg(shannon_entropy(psi.iter().map(|z| z.norm_sqr()), base))
            }
            Measure::SkewCoherence => clamp_nonneg(1.0 - psi.iter().map(|z| z.norm_sqr().powi(2)).sum::<f64>()),
            Measure::TsallisImaginarity { .. } => {
                let overlap: Complex64 = psi.iter().map(|z| z * z).sum();
                (1.0 - overlap.norm_sqr()).clamp(0.0, 1.0)
            }
            Measure::RelEntImaginarity { base } => {
                let overlap: Complex64 = psi.iter().map(|z| z * z).sum();
                let c = overlap.norm().min(1.0);
                clamp_nonneg(binary_entropy_unchecked(0.5 * (1.0 + c), base))
            }
        }
    }
}

/// `(1/(α-1)) [Σ_j ⟨j|ρ^α|j⟩^{1/α} - 1]` for `α ∈ (0,1)∪(1,2]`.
pub fn tsallis_coherence(rho: &DensityMatrix, alpha: f64) -> Result<MeasureValue> {
    check_coherence_alpha(alpha)?;
    let pa = spectral_power(&rho.spectrum(), alpha);
    let s: f64 = pa
        .diagonal()
        .iter()
        .map(|z| z.re)
        .filter(|&p| p > SUPPORT_EPS)
        .map(|p| p.powf(1.0 / alpha))
        .sum();
    Ok(MeasureValue {
        kind: MeasureKind::TsallisCoherence,
        value: clamp_nonneg((s - 1.0) / (alpha - 1.0)),
        alpha: Some(alpha),
        log_base: None,
    })
}

/// `S(Δ(ρ)) - S(ρ)`.
pub fn rel_ent_coherence(rho: &DensityMatrix, base: LogBase) -> MeasureValue {
    let diag = shannon_entropy(rho.diagonal_probs(), base);
    let value = diag - von_neumann_entropy(rho, base);
    debug_assert!((diag - von_neumann_entropy(&dephase(rho), base)).abs() < 1e-12);
    MeasureValue {
        kind: MeasureKind::RelEntCoherence,
        value: clamp_nonneg(value),
        alpha: None,
        log_base: Some(base),
    }
}

/// `1 - Σ_j ⟨j|√ρ|j⟩²`.
pub fn skew_coherence(rho: &DensityMatrix) -> MeasureValue {
    let root = spectral_power(&rho.spectrum(), 0.5);
    let s: f64 = root.diagonal().iter().map(|z| z.re * z.re).sum();
    MeasureValue {
        kind: MeasureKind::SkewCoherence,
        value: clamp_nonneg(1.0 - s),
        alpha: None,
        log_base: None,
    }
}

/// `1 - Tr[ρ^α (ρ*)^{1-α}]` for `α ∈ (0,1)`, clamped to `[0,1]`.
pub fn tsallis_imaginarity(rho: &DensityMatrix, alpha: f64) -> Result<MeasureValue> {
    check_imaginarity_alpha(alpha)?;
    let spec = rho.spectrum();
    let pa = spectral_power(&spec, alpha);
    // (ρ*)^β = (ρ^β)*
    let pb = conj(&spectral_power(&spec, 1.0 - alpha));
    let f = trace(&(pa * pb)).re;
    Ok(MeasureValue {
        kind: MeasureKind::TsallisImaginarity,
        value: (1.0 - f).clamp(0.0, 1.0),
        alpha: Some(alpha),
        log_base: None,
    })
}

/// `S(Δ₁(ρ)) - S(ρ)`.
pub fn rel_ent_imaginarity(rho: &DensityMatrix, base: LogBase) -> MeasureValue {
    let real = real_projection(rho);
    let value = von_neumann_entropy(&real, base) - von_neumann_entropy(rho, base);
    MeasureValue {
        kind: MeasureKind::RelEntImaginarity,
        value: clamp_nonneg(value),
        alpha: None,
        log_base: Some(base),
    }
}

fn binary_entropy_unchecked(t: f64, base: LogBase) -> f64 {
    shannon_entropy([t, 1.0 - t], base)
}

/// `g(t) = -t log t - (1-t) log(1-t)`.
pub fn binary_entropy(t: f64, base: LogBase) -> Result<f64> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange { value: t });
    }
    Ok(binary_entropy_unchecked(t, base))
}

/// `Tr(ρ^α)` for the rate bounds.
pub(crate) fn trace_power(spec: &Spectrum, alpha: f64) -> f64 {
    spec.eigenvalues
        .iter()
        .filter(|&&x| x > SUPPORT_EPS)
        .map(|&x| x.powf(alpha))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, CMatrix};
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, LN_2};

    fn plus() -> DensityMatrix {
        DensityMatrix::pure(&[c64(FRAC_1_SQRT_2, 0.), c64(FRAC_1_SQRT_2, 0.)], 2, 1).unwrap()
    }

    fn t_plus() -> DensityMatrix {
        let s = FRAC_1_SQRT_2;
        DensityMatrix::pure(&[c64(s, 0.), Complex64::from_polar(s, FRAC_PI_4)], 2, 1).unwrap()
    }

    fn y_plus() -> DensityMatrix {
        DensityMatrix::pure(&[c64(FRAC_1_SQRT_2, 0.), c64(0., FRAC_1_SQRT_2)], 2, 1).unwrap()
    }

    /// Random full-rank state `G G† / Tr` from a seeded Ginibre draw.
    fn random_state(dim: usize, seed: u64) -> DensityMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = CMatrix::from_fn(dim, dim, |_, _| c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let m = &g * g.adjoint();
        let t = trace(&m).re;
        let n = (dim as f64).log2() as usize;
        DensityMatrix::new(m.unscale(t), 2, n).unwrap()
    }

    #[test]
    fn diagonal_states_have_no_coherence() {
        let rho = DensityMatrix::diagonal(&[0.2, 0.5, 0.3, 0.0], 2, 2).unwrap();
        for alpha in [0.3, 0.5, 1.5, 2.0] {
            assert_abs_diff_eq!(tsallis_coherence(&rho, alpha).unwrap().value, 0.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(rel_ent_coherence(&rho, LogBase::Two).value, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(skew_coherence(&rho).value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn plus_state_coherence_values() {
        assert_abs_diff_eq!(tsallis_coherence(&plus(), 0.5).unwrap().value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rel_ent_coherence(&plus(), LogBase::Two).value, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(skew_coherence(&plus()).value, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn alpha_range_is_enforced() {
        assert!(tsallis_coherence(&plus(), 1.0).is_err());
        assert!(tsallis_coherence(&plus(), 2.5).is_err());
        assert!(tsallis_imaginarity(&plus(), 1.2).is_err());
        assert!(tsallis_imaginarity(&plus(), 0.0).is_err());
    }

    #[test]
    fn imaginarity_examples() {
        for alpha in [0.1, 0.5, 0.9] {
            assert_abs_diff_eq!(tsallis_imaginarity(&plus(), alpha).unwrap().value, 0.0, epsilon = 1e-12);
            assert_abs_diff_eq!(tsallis_imaginarity(&t_plus(), alpha).unwrap().value, 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(tsallis_imaginarity(&y_plus(), alpha).unwrap().value, 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(rel_ent_imaginarity(&plus(), LogBase::Two).value, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rel_ent_imaginarity(&t_plus(), LogBase::Two).value, 0.6009, epsilon = 5e-5);
        assert_abs_diff_eq!(rel_ent_imaginarity(&y_plus(), LogBase::Two).value, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.0, LogBase::Two).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0, LogBase::Two).unwrap(), 0.0);
        assert_abs_diff_eq!(binary_entropy(0.5, LogBase::Two).unwrap(), 1.0, epsilon = 1e-15);
        // 0.8536 is a rounded argument; the exact one is 1/2 + √2/4.
        assert_abs_diff_eq!(binary_entropy(0.8536, LogBase::Two).unwrap(), 0.6009, epsilon = 2e-4);
        let exact = 0.5 + 2f64.sqrt() / 4.0;
        assert_abs_diff_eq!(binary_entropy(exact, LogBase::Two).unwrap(), 0.6009, epsilon = 5e-5);
        assert!(matches!(binary_entropy(1.1, LogBase::Two), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn qft_one_state_tsallis_two() {
        let dim = 32usize;
        let psi: Vec<Complex64> = (0..dim)
            .map(|j| Complex64::from_polar(1.0 / (dim as f64).sqrt(), 2.0 * std::f64::consts::PI * j as f64 / dim as f64))
            .collect();
        let rho = DensityMatrix::pure(&psi, 2, 5).unwrap();
        let v = tsallis_coherence(&rho, 2.0).unwrap().value;
        assert_abs_diff_eq!(v, 32f64.sqrt() - 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(v, 4.6569, epsilon = 1e-4);
    }

    #[test]
    fn relative_entropy_is_the_alpha_to_one_limit() {
        for seed in 0..5 {
            let rho = random_state(2, seed);
            let target = LN_2 * rel_ent_coherence(&rho, LogBase::Two).value;
            let lo = tsallis_coherence(&rho, 1.0 - 1e-3).unwrap().value;
            let hi = tsallis_coherence(&rho, 1.0 + 1e-3).unwrap().value;
            // One-sided values carry an O(α-1) term; the symmetric mean cancels it.
            assert!((lo - target).abs() <= 1e-3 && (hi - target).abs() <= 1e-3);
            assert!((0.5 * (lo + hi) - target).abs() <= 1e-4, "{lo} {hi} {target}");
        }
    }

    #[test]
    fn half_tsallis_is_twice_skew() {
        for seed in 0..10 {
            let rho = random_state(4, 100 + seed);
            let c_half = tsallis_coherence(&rho, 0.5).unwrap().value;
            assert_abs_diff_eq!(c_half, 2.0 * skew_coherence(&rho).value, epsilon = 1e-10);
        }
    }

    #[test]
    fn dephased_state_has_zero_tsallis_coherence() {
        let rho = random_state(4, 7);
        let d = dephase(&rho);
        assert_abs_diff_eq!(trace(d.matrix()).re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(tsallis_coherence(&d, 0.7).unwrap().value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pure_fast_path_matches_general_evaluation() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let measures = [
            Measure::TsallisCoherence { alpha: 0.3 },
            Measure::TsallisCoherence { alpha: 1.7 },
            Measure::RelEntCoherence { base: LogBase::Two },
            Measure::SkewCoherence,
            Measure::TsallisImaginarity { alpha: 0.4 },
            Measure::RelEntImaginarity { base: LogBase::E },
        ];
        for _ in 0..20 {
            let psi: Vec<Complex64> = (0..4).map(|_| c64(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
            let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let psi: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
            let rho = DensityMatrix::pure(&psi, 2, 2).unwrap();
            for m in &measures {
                assert_abs_diff_eq!(m.evaluate_pure(&psi), m.evaluate(&rho).unwrap(), epsilon = 1e-10);
            }
        }
    }

    fn arb_state() -> impl Strategy<Value = DensityMatrix> {
        prop::collection::vec(-1.0f64..1.0, 32).prop_map(|v| {
            let g = CMatrix::from_fn(4, 4, |i, j| c64(v[4 * i + j], v[16 + 4 * i + j]));
            let m = &g * g.adjoint() + CMatrix::identity(4, 4).scale(1e-3);
            let t = trace(&m).re;
            DensityMatrix::new(m.unscale(t), 2, 2).unwrap()
        })
    }

    fn arb_phase_permutation() -> impl Strategy<Value = CMatrix> {
        (Just([0usize, 1, 2, 3]).prop_shuffle(), prop::collection::vec(0.0f64..6.3, 4)).prop_map(|(perm, ph)| {
            let mut p = CMatrix::zeros(4, 4);
            for (col, &row) in perm.iter().enumerate() {
                p[(row, col)] = Complex64::from_polar(1.0, ph[col]);
            }
            p
        })
    }

    fn arb_rotation() -> impl Strategy<Value = CMatrix> {
        prop::collection::vec(-1.0f64..1.0, 16).prop_map(|v| {
            let a = nalgebra::DMatrix::from_row_slice(4, 4, &v);
            let q = a.qr().q();
            q.map(|x| c64(x, 0.0))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn measures_are_nonnegative_and_imaginarity_bounded(rho in arb_state()) {
            for m in [0.3, 0.7, 1.5, 2.0] {
                prop_assert!(tsallis_coherence(&rho, m).unwrap().value >= 0.0);
            }
            let mi = tsallis_imaginarity(&rho, 0.5).unwrap().value;
            prop_assert!((0.0..=1.0).contains(&mi));
            prop_assert!(rel_ent_imaginarity(&rho, LogBase::Two).value >= 0.0);
            prop_assert!(rel_ent_coherence(&rho, LogBase::Two).value >= 0.0);
        }

        #[test]
        fn coherence_is_invariant_under_phase_permutations(rho in arb_state(), p in arb_phase_permutation()) {
            let moved = rho.conjugate_by(&p);
            for alpha in [0.4, 1.6] {
                let a = tsallis_coherence(&rho, alpha).unwrap().value;
                let b = tsallis_coherence(&moved, alpha).unwrap().value;
                prop_assert!((a - b).abs() <= 1e-10);
            }
        }

        #[test]
        fn imaginarity_is_invariant_under_real_rotations(rho in arb_state(), o in arb_rotation()) {
            let moved = rho.conjugate_by(&o);
            let a = tsallis_imaginarity(&rho, 0.3).unwrap().value;
            let b = tsallis_imaginarity(&moved, 0.3).unwrap().value;
            prop_assert!((a - b).abs() <= 1e-10);
            let a = rel_ent_imaginarity(&rho, LogBase::Two).value;
            let b = rel_ent_imaginarity(&moved, LogBase::Two).value;
            prop_assert!((a - b).abs() <= 1e-10);
        }

        #[test]
        fn real_states_have_unit_fidelity_with_conjugate(rho in arb_state()) {
            let real = real_projection(&rho);
            let spec = real.spectrum();
            let f = trace(&(spectral_power(&spec, 0.35) * conj(&spectral_power(&spec, 0.65)))).re;
            prop_assert!((f - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn maps_are_idempotent_and_trace_preserving(rho in arb_state()) {
            let d1 = dephase(&rho);
            let dd = dephase(&d1);
            prop_assert_eq!(dd.matrix(), d1.matrix());
            let r1 = real_projection(&rho);
            let rr = real_projection(&r1);
            prop_assert_eq!(rr.matrix(), r1.matrix());
            prop_assert!((trace(d1.matrix()).re - 1.0).abs() <= 1e-12);
            prop_assert!((trace(r1.matrix()).re - 1.0).abs() <= 1e-12);
            prop_assert!(r1.spectrum().min() >= -1e-10);
        }
    }

    #[test]
    fn power_round_trip_on_support() {
        let rho = random_state(4, 11);
        let a = crate::linalg::hermitian_power(rho.matrix(), 1.0).unwrap();
        assert!(crate::linalg::max_abs(&(a - rho.matrix())) < 1e-12);
        let p = crate::linalg::hermitian_power(rho.matrix(), 0.37).unwrap();
        let back = crate::linalg::hermitian_power(&p, 1.0 / 0.37).unwrap();
        assert!(crate::linalg::max_abs(&(back - rho.matrix())) < 1e-9);
        let _ = DVector::<f64>::zeros(1);
    }
}
