//! Certified lower bounds on cohering and imaginaring powers.
//!
//! The power of `U` is a maximum of `|m(UρU†) - m(ρ)|` over states; any
//! feasible state certifies a lower bound. The search runs a derivative-free
//! coordinate ascent on the complex unit sphere from a deterministic set of
//! starts and reports the best witness found.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::Unitary;
use crate::linalg::{c64, shannon_entropy, CMatrix, DensityMatrix, LogBase};
use crate::measures::{Measure, MeasureKind};

const ACCEPT_TOL: f64 = 1e-13;
const INITIAL_STEP: f64 = 0.5;
const FINAL_STEP: f64 = 1e-8;
const MIX_WEIGHTS: [f64; 3] = [0.25, 0.5, 0.75];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PowerConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    pub pure_only: bool,
}

impl Default for PowerConfig {
    fn default() -> Self {
        PowerConfig { restarts: 16, max_iters: 200, seed: 0, pure_only: false }
    }
}

impl PowerConfig {
    fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::ConfigInvalid("max_iters must be positive".into()));
        }
        if self.restarts > 100_000 {
            return Err(Error::ConfigInvalid(format!("restarts = {} exceeds 100000", self.restarts)));
        }
        Ok(())
    }
}

/// A feasible state together with the measure change it achieves.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerCertificate {
    pub kind: MeasureKind,
    pub alpha: Option<f64>,
    pub log_base: Option<LogBase>,
    pub value: f64,
    pub witness: DensityMatrix,
    pub restarts: usize,
    pub converged: bool,
    pub delta: Option<f64>,
    /// Index of the start the witness was reached from.
    pub start_index: usize,
}

/// What is being maximized.
#[derive(Debug, Clone, Copy)]
enum Objective {
    Power(Measure),
    /// Relative-entropy coherence power (bits) over states with all
    /// diagonal entries at least `delta`.
    Restricted { delta: f64 },
}

impl Objective {
    /// Mixing weight toward the identity that lifts the smallest diagonal
    /// entry of `|ψ⟩⟨ψ|` to `delta`.
    fn restricted_mix(delta: f64, psi: &[Complex64]) -> f64 {
        let dim = psi.len() as f64;
        let pmin = psi.iter().map(|z| z.norm_sqr()).fold(f64::INFINITY, f64::min);
        if pmin >= delta {
            0.0
        } else {
            ((delta - pmin) / (1.0 - dim * pmin)).clamp(0.0, 1.0 / dim)
        }
    }

    /// Objective on a pure input `ψ` with output `φ = Uψ`.
    fn pure_value(&self, psi: &[Complex64], phi: &[Complex64]) -> f64 {
        match self {
            Objective::Power(m) => (m.evaluate_pure(phi) - m.evaluate_pure(psi)).abs(),
            Objective::Restricted { delta } => {
                // ρ' = (1 - Dε)|ψ⟩⟨ψ| + ε I has the same spectrum before and after
                // conjugation, so only the diagonal entropies differ.
                let eps = Self::restricted_mix(*delta, psi);
                let scale = 1.0 - psi.len() as f64 * eps;
                let h = |v: &[Complex64]| shannon_entropy(v.iter().map(|z| scale * z.norm_sqr() + eps), LogBase::Two);
                (h(phi) - h(psi)).abs()
            }
        }
    }

    /// The state a pure iterate represents.
    fn state(&self, psi: &[Complex64], d: usize, n: usize) -> DensityMatrix {
        let rho = DensityMatrix::pure(psi, d, n).expect("normalized iterate");
        match self {
            Objective::Power(_) => rho,
            Objective::Restricted { delta } => rho.mix_with_identity(psi.len() as f64 * Self::restricted_mix(*delta, psi)),
        }
    }

    fn general_value(&self, u: &Unitary, rho: &DensityMatrix) -> Result<f64> {
        let out = u.apply(rho);
        let m = match self {
            Objective::Power(m) => *m,
            Objective::Restricted { .. } => Measure::RelEntCoherence { base: LogBase::Two },
        };
        Ok((m.evaluate(&out)? - m.evaluate(rho)?).abs())
    }
}

struct Ascent {
    psi: Vec<Complex64>,
    value: f64,
    converged: bool,
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
}

fn apply_vec(u: &CMatrix, psi: &[Complex64]) -> Vec<Complex64> {
    (u * DVector::from_column_slice(psi)).iter().copied().collect()
}

/// Coordinate-wise complex-sphere ascent with a halving step.
fn ascend(u: &CMatrix, objective: &Objective, start: Vec<Complex64>, max_iters: usize) -> Ascent {
    let dim = start.len();
    let mut psi = start;
    normalize(&mut psi);
    let mut phi = apply_vec(u, &psi);
    let mut value = objective.pure_value(&psi, &phi);
    let mut step = INITIAL_STEP;
    let dirs = [c64(1.0, 0.0), c64(-1.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0)];
    let mut cand_psi = vec![c64(0.0, 0.0); dim];
    let mut cand_phi = vec![c64(0.0, 0.0); dim];
    let mut converged = false;
    for _ in 0..max_iters {
        let mut improved = false;
        for j in 0..dim {
            for dir in dirs {
                let delta = dir * step;
                // ‖ψ + δ e_j‖² = 1 + 2 Re(ψ_j* δ) + |δ|²
                let norm2 = 1.0 + 2.0 * (psi[j].conj() * delta).re + delta.norm_sqr();
                if norm2 <= 1e-24 {
                    continue;
                }
                let inv = 1.0 / norm2.sqrt();
                for k in 0..dim {
                    cand_psi[k] = psi[k] * inv;
                    cand_phi[k] = (phi[k] + delta * u[(k, j)]) * inv;
                }
                cand_psi[j] = (psi[j] + delta) * inv;
                let v = objective.pure_value(&cand_psi, &cand_phi);
                if v > value + ACCEPT_TOL {
                    value = v;
                    psi.copy_from_slice(&cand_psi);
                    phi.copy_from_slice(&cand_phi);
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < FINAL_STEP {
                converged = true;
                break;
            }
        }
    }
    Ascent { psi, value, converged }
}

fn haar_state(seed: u64, stream: u64, dim: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| c64(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
        .collect();
    normalize(&mut v);
    v
}

/// Deterministic start set: basis states, the uniform superposition, then
/// `restarts` Haar-random states.
fn starts(dim: usize, config: &PowerConfig) -> Vec<Vec<Complex64>> {
    let mut out = Vec::with_capacity(dim + 1 + config.restarts);
    for i in 0..dim {
        let mut e = vec![c64(0.0, 0.0); dim];
        e[i] = c64(1.0, 0.0);
        out.push(e);
    }
    out.push(vec![c64(1.0 / (dim as f64).sqrt(), 0.0); dim]);
    for r in 0..config.restarts {
        out.push(haar_state(config.seed, r as u64, dim));
    }
    out
}

struct Candidate {
    value: f64,
    index: usize,
    witness: DensityMatrix,
    converged: bool,
}

/// Highest value wins; ties go to the lowest start index.
fn better(a: &Candidate, b: &Candidate) -> bool {
    a.value > b.value || (a.value == b.value && a.index < b.index)
}

fn search(u: &Unitary, objective: Objective, config: &PowerConfig, mix: bool) -> Result<Candidate> {
    config.validate()?;
    let (d, n, dim) = (u.qudit_dim(), u.num_qudits(), u.dim());
    let m = u.matrix();
    let ascents: Vec<Ascent> = starts(dim, config)
        .into_par_iter()
        .map(|s| ascend(m, &objective, s, config.max_iters))
        .collect();

    let mut candidates: Vec<Candidate> = ascents
        .iter()
        .enumerate()
        .map(|(index, a)| {
            let witness = objective.state(&a.psi, d, n);
            Candidate { value: a.value, index, witness, converged: a.converged }
        })
        .collect();

    if mix && ascents.len() > 1 {
        let base = ascents.len();
        let pairs: Vec<(usize, f64)> = (0..ascents.len() - 1)
            .flat_map(|i| MIX_WEIGHTS.iter().map(move |&w| (i, w)))
            .collect();
        let mixed: Vec<Result<Candidate>> = pairs
            .into_par_iter()
            .enumerate()
            .map(|(k, (i, w))| {
                let rho = candidates_state(&ascents, i, w, d, n)?;
                let value = objective.general_value(u, &rho)?;
                Ok(Candidate { value, index: base + k, witness: rho, converged: true })
            })
            .collect();
        for c in mixed {
            candidates.push(c?);
        }
    }

    let mut best: Option<Candidate> = None;
    for c in candidates {
        match &best {
            Some(b) if !better(&c, b) => {}
            _ => best = Some(c),
        }
    }
    let mut best = best.expect("nonempty start set");
    best.value = objective.general_value(u, &best.witness)?;
    Ok(best)
}

fn candidates_state(ascents: &[Ascent], i: usize, w: f64, d: usize, n: usize) -> Result<DensityMatrix> {
    let a = DensityMatrix::pure(&ascents[i].psi, d, n)?;
    let b = DensityMatrix::pure(&ascents[i + 1].psi, d, n)?;
    a.convex_mix(&b, w)
}

/// Multistart lower-bound search for the power of `U` under `measure`.
pub fn power_search(u: &Unitary, measure: Measure, config: &PowerConfig) -> Result<PowerCertificate> {
    measure.validate()?;
    let best = search(u, Objective::Power(measure), config, !config.pure_only)?;
    Ok(PowerCertificate {
        kind: measure.kind(),
        alpha: measure.alpha(),
        log_base: measure.log_base(),
        value: best.value,
        witness: best.witness,
        restarts: config.restarts,
        converged: best.converged,
        delta: None,
        start_index: best.index,
    })
}

/// Lower bound on the relative-entropy coherence power (bits) restricted to
/// states whose diagonal entries are all at least `delta ≤ 1/D`.
pub fn restricted_coherence_power(u: &Unitary, delta: f64, config: &PowerConfig) -> Result<PowerCertificate> {
    let max = 1.0 / u.dim() as f64;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::ParamOutOfRange(format!("delta = {delta} outside (0,1)")));
    }
    if delta > max * (1.0 + 1e-12) {
        return Err(Error::DeltaInfeasible { delta, max });
    }
    let delta = delta.min(max);
    let best = search(u, Objective::Restricted { delta }, config, false)?;
    debug_assert!(best.witness.diagonal_probs().iter().all(|&p| p >= delta - 1e-9));
    Ok(PowerCertificate {
        kind: MeasureKind::RelEntCoherence,
        alpha: None,
        log_base: Some(LogBase::Two),
        value: best.value,
        witness: best.witness,
        restarts: config.restarts,
        converged: best.converged,
        delta: Some(delta),
        start_index: best.index,
    })
}

/// Recomputes `|m(UρU†) - m(ρ)|` for a certificate's witness.
pub fn certificate_objective(u: &Unitary, cert: &PowerCertificate) -> Result<f64> {
    let measure = match cert.kind {
        MeasureKind::TsallisCoherence => Measure::TsallisCoherence { alpha: cert.alpha.ok_or(Error::MissingParameter("alpha"))? },
        MeasureKind::RelEntCoherence => Measure::RelEntCoherence { base: cert.log_base.unwrap_or_default() },
        MeasureKind::SkewCoherence => Measure::SkewCoherence,
        MeasureKind::TsallisImaginarity => {
            Measure::TsallisImaginarity { alpha: cert.alpha.ok_or(Error::MissingParameter("alpha"))? }
        }
        MeasureKind::RelEntImaginarity => Measure::RelEntImaginarity { base: cert.log_base.unwrap_or_default() },
    };
    Objective::Power(measure).general_value(u, &cert.witness)
}

/// `|m(UρU†) - m(ρ)|` for an explicit state.
pub fn power_objective(u: &Unitary, measure: &Measure, rho: &DensityMatrix) -> Result<f64> {
    Objective::Power(*measure).general_value(u, rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{standard_gate, GateName};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn cfg(restarts: usize) -> PowerConfig {
        PowerConfig { restarts, max_iters: 200, seed: 1, pure_only: false }
    }

    #[test]
    fn identity_has_zero_power() {
        let u = standard_gate(GateName::I).unwrap();
        for m in [Measure::TsallisCoherence { alpha: 0.5 }, Measure::SkewCoherence, Measure::TsallisImaginarity { alpha: 0.5 }] {
            let c = power_search(&u, m, &cfg(4)).unwrap();
            assert_abs_diff_eq!(c.value, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn t_gate_imaginaring_power_at_least_half() {
        let u = standard_gate(GateName::T).unwrap();
        for alpha in [0.3, 0.5, 0.7] {
            let m = Measure::TsallisImaginarity { alpha };
            let c = power_search(&u, m, &cfg(8)).unwrap();
            assert!(c.value >= 0.5 - 1e-9 && c.value <= 1.0);
            assert_abs_diff_eq!(certificate_objective(&u, &c).unwrap(), c.value, epsilon = 1e-9);
            let plus = DensityMatrix::pure(&[c64(FRAC_1_SQRT_2, 0.), c64(FRAC_1_SQRT_2, 0.)], 2, 1).unwrap();
            assert_abs_diff_eq!(power_objective(&u, &m, &plus).unwrap(), 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn hadamard_cohering_power_from_basis_state() {
        let u = standard_gate(GateName::H).unwrap();
        let c = power_search(&u, Measure::TsallisCoherence { alpha: 0.5 }, &cfg(4)).unwrap();
        assert!(c.value >= 1.0 - 1e-9);
    }

    #[test]
    fn qft_imaginaring_power_is_one() {
        for n in [2, 3] {
            let u = standard_gate(GateName::Qft(n)).unwrap();
            for m in [Measure::TsallisImaginarity { alpha: 0.5 }, Measure::RelEntImaginarity { base: LogBase::Two }] {
                let c = power_search(&u, m, &cfg(4)).unwrap();
                assert!(c.value >= 1.0 - 1e-9, "n={n} {m:?}: {}", c.value);
            }
        }
    }

    #[test]
    fn nullity_for_diagonal_and_real_gates() {
        for g in [GateName::T, GateName::Z] {
            let u = standard_gate(g).unwrap();
            let c = power_search(&u, Measure::TsallisCoherence { alpha: 0.7 }, &cfg(20)).unwrap();
            assert!(c.value <= 1e-10);
        }
        for g in [GateName::X, GateName::H, GateName::Cnot] {
            let u = standard_gate(g).unwrap();
            let c = power_search(&u, Measure::TsallisImaginarity { alpha: 0.5 }, &cfg(20)).unwrap();
            assert!(c.value <= 1e-10);
            let c = power_search(&u, Measure::RelEntImaginarity { base: LogBase::Two }, &cfg(20)).unwrap();
            assert!(c.value <= 1e-10);
        }
    }

    #[test]
    fn more_restarts_never_lower_the_certificate() {
        let u = standard_gate(GateName::Utheta(0.4)).unwrap();
        let m = Measure::TsallisCoherence { alpha: 1.5 };
        let mut last = 0.0;
        for r in [0, 2, 5, 9] {
            let c = power_search(&u, m, &cfg(r)).unwrap();
            assert!(c.value >= last - 1e-15);
            last = c.value;
        }
    }

    #[test]
    fn restricted_power_examples() {
        let i = standard_gate(GateName::I).unwrap();
        assert_abs_diff_eq!(restricted_coherence_power(&i, 0.2, &cfg(4)).unwrap().value, 0.0, epsilon = 1e-12);
        let h = standard_gate(GateName::H).unwrap();
        let r = restricted_coherence_power(&h, 0.1, &cfg(4)).unwrap();
        let free = power_search(&h, Measure::RelEntCoherence { base: LogBase::Two }, &cfg(4)).unwrap();
        assert!(r.value <= free.value + 1e-12);
        assert!(r.value > 0.0);
        assert!(r.witness.diagonal_probs().iter().all(|&p| p >= 0.1 - 1e-12));
        assert_eq!(r.delta, Some(0.1));
        // δ = 1/D still admits coherent states with a flat diagonal such as |+⟩.
        let tight = restricted_coherence_power(&h, 0.5, &cfg(4)).unwrap();
        assert_abs_diff_eq!(tight.value, 1.0, epsilon = 1e-9);
        assert!(tight.witness.diagonal_probs().iter().all(|&p| (p - 0.5).abs() < 1e-9));
        let id_tight = restricted_coherence_power(&i, 0.5, &cfg(4)).unwrap();
        assert_abs_diff_eq!(id_tight.value, 0.0, epsilon = 1e-12);
        assert!(matches!(restricted_coherence_power(&h, 0.6, &cfg(4)), Err(Error::DeltaInfeasible { .. })));
    }

    #[test]
    fn search_is_deterministic() {
        let u = standard_gate(GateName::Qft(2)).unwrap();
        let m = Measure::SkewCoherence;
        let a = power_search(&u, m, &cfg(6)).unwrap();
        let b = power_search(&u, m, &cfg(6)).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.witness, b.witness);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let u = standard_gate(GateName::H).unwrap();
        let bad = PowerConfig { max_iters: 0, ..cfg(1) };
        assert!(matches!(power_search(&u, Measure::SkewCoherence, &bad), Err(Error::ConfigInvalid(_))));
        assert!(power_search(&u, Measure::TsallisImaginarity { alpha: 1.5 }, &cfg(1)).is_err());
    }
}
