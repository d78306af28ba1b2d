//! Instantaneous resource rates under `ρ_t = e^{-itH} ρ e^{itH}` and their
//! upper bounds.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    commutator, conj, dephase_matrix, real_part_matrix, spectral_power, trace, CMatrix,
    DensityMatrix, HermitianOperator, LogBase, Spectrum, SUPPORT_EPS,
};
use crate::measures::{
    binary_entropy, check_coherence_alpha, check_imaginarity_alpha, trace_power, Measure, MeasureKind,
};

/// Regularization weight used by [`coherence_rate_regularized`].
pub const REGULARIZATION_EPS: f64 = 1e-8;
/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-5;
const RESIDUE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateValue {
    pub value: f64,
    pub kind: MeasureKind,
    pub alpha: Option<f64>,
    pub log_base: Option<LogBase>,
}

/// Returns `i·z` as a real number, rejecting a non-negligible imaginary part.
fn i_times_real(z: Complex64) -> Result<f64> {
    let w = Complex64::i() * z;
    if w.im.abs() > RESIDUE_TOL * w.re.abs().max(1.0) {
        return Err(Error::ImaginaryResidue { residue: w.im.abs() });
    }
    Ok(w.re)
}

fn check_dims(h: &HermitianOperator, rho: &DensityMatrix) -> Result<()> {
    if h.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), actual: h.dim() });
    }
    Ok(())
}

/// `p_j = ⟨j|ρ^α|j⟩` together with `ρ^α`.
fn alpha_diagonal(rho: &DensityMatrix, alpha: f64) -> (CMatrix, Vec<f64>) {
    let pa = spectral_power(&rho.spectrum(), alpha);
    let p = pa.diagonal().iter().map(|z| z.re).collect();
    (pa, p)
}

fn min_positive_check(p: &[f64]) -> Result<f64> {
    min_above(p, SUPPORT_EPS)
}

fn min_above(p: &[f64], threshold: f64) -> Result<f64> {
    let pmin = p.iter().copied().fold(f64::INFINITY, f64::min);
    if pmin <= threshold {
        return Err(Error::DiagonalNotPositive { value: pmin });
    }
    Ok(pmin)
}

/// `dC_α(ρ_t)/dt` at `t = 0`:
/// `i/(α(1-α)) Tr([ρ^α, Δ(ρ^α)^{1/α-1}] H)`.
pub fn coherence_rate(h: &HermitianOperator, rho: &DensityMatrix, alpha: f64) -> Result<RateValue> {
    coherence_rate_with_floor(h, rho, alpha, SUPPORT_EPS)
}

fn coherence_rate_with_floor(h: &HermitianOperator, rho: &DensityMatrix, alpha: f64, floor: f64) -> Result<RateValue> {
    check_coherence_alpha(alpha)?;
    check_dims(h, rho)?;
    let (pa, p) = alpha_diagonal(rho, alpha);
    if alpha > 1.0 {
        min_above(&p, floor)?;
    }
    let expo = 1.0 / alpha - 1.0;
    let dpow = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        p.len(),
        p.iter().map(|&x| Complex64::new(if x > floor { x.powf(expo) } else { 0.0 }, 0.0)),
    ));
    let tr = trace(&(commutator(&pa, &dpow) * h.matrix()));
    let value = i_times_real(tr)? / (alpha * (1.0 - alpha));
    Ok(RateValue { value, kind: MeasureKind::TsallisCoherence, alpha: Some(alpha), log_base: None })
}

/// [`coherence_rate`] evaluated on `(1-ε)ρ + ε I/D` with `ε = 1e-8`, for
/// rank-deficient inputs at `α > 1`. Positivity of `p_j` is checked strictly
/// since the regularized diagonal can fall below the usual support cutoff.
pub fn coherence_rate_regularized(h: &HermitianOperator, rho: &DensityMatrix, alpha: f64) -> Result<RateValue> {
    coherence_rate_with_floor(h, &rho.mix_with_identity(REGULARIZATION_EPS), alpha, 0.0)
}

/// `i Tr([ρ, log σ] H)` with the log on the support of `σ`.
fn relent_rate(h: &HermitianOperator, rho: &DensityMatrix, sigma: &CMatrix, base: LogBase) -> Result<f64> {
    let spec = Spectrum::of(sigma);
    let kernel = spec.map(|x| if x < SUPPORT_EPS { 1.0 } else { 0.0 });
    let leak = trace(&(&kernel * rho.matrix())).re;
    if leak > 1e-9 {
        return Err(Error::SupportMismatch { leak });
    }
    let log = spec.map(|x| if x < SUPPORT_EPS { 0.0 } else { base.log(x) });
    i_times_real(trace(&(commutator(rho.matrix(), &log) * h.matrix())))
}

/// `dC_r(ρ_t)/dt` at `t = 0`: `i Tr([ρ, log Δ(ρ)] H)`.
pub fn coherence_rate_relent(h: &HermitianOperator, rho: &DensityMatrix, base: LogBase) -> Result<RateValue> {
    check_dims(h, rho)?;
    let value = relent_rate(h, rho, &dephase_matrix(rho.matrix()), base)?;
    Ok(RateValue { value, kind: MeasureKind::RelEntCoherence, alpha: None, log_base: Some(base) })
}

/// `dM_α(ρ_t)/dt` at `t = 0`: `i Tr([ρ^α, (ρ*)^{1-α}](H + H*))`.
pub fn imaginarity_rate_tsallis(h: &HermitianOperator, rho: &DensityMatrix, alpha: f64) -> Result<RateValue> {
    check_imaginarity_alpha(alpha)?;
    check_dims(h, rho)?;
    let spec = rho.spectrum();
    let pa = spectral_power(&spec, alpha);
    let pb = conj(&spectral_power(&spec, 1.0 - alpha));
    let hh = h.matrix() + conj(h.matrix());
    let value = i_times_real(trace(&(commutator(&pa, &pb) * hh)))?;
    Ok(RateValue { value, kind: MeasureKind::TsallisImaginarity, alpha: Some(alpha), log_base: None })
}

/// `dM_r(ρ_t)/dt` at `t = 0`: `i Tr([ρ, log Δ₁(ρ)] H)`.
pub fn imaginarity_rate_relent(h: &HermitianOperator, rho: &DensityMatrix, base: LogBase) -> Result<RateValue> {
    check_dims(h, rho)?;
    let value = relent_rate(h, rho, &real_part_matrix(rho.matrix()), base)?;
    Ok(RateValue { value, kind: MeasureKind::RelEntImaginarity, alpha: None, log_base: Some(base) })
}

/// Closed-form rate for any measure.
pub fn closed_form_rate(measure: &Measure, h: &HermitianOperator, rho: &DensityMatrix) -> Result<RateValue> {
    match *measure {
        Measure::TsallisCoherence { alpha } => coherence_rate(h, rho, alpha),
        Measure::RelEntCoherence { base } => coherence_rate_relent(h, rho, base),
        Measure::SkewCoherence => {
            let r = coherence_rate(h, rho, 0.5)?;
            Ok(RateValue { value: 0.5 * r.value, kind: MeasureKind::SkewCoherence, alpha: None, log_base: None })
        }
        Measure::TsallisImaginarity { alpha } => imaginarity_rate_tsallis(h, rho, alpha),
        Measure::RelEntImaginarity { base } => imaginarity_rate_relent(h, rho, base),
    }
}

fn evolve(h: &HermitianOperator, rho: &DensityMatrix, t: f64) -> DensityMatrix {
    rho.conjugate_by(&h.evolution(t))
}

fn central_difference(measure: &Measure, h: &HermitianOperator, rho: &DensityMatrix, step: f64) -> Result<f64> {
    let plus = measure.evaluate(&evolve(h, rho, step))?;
    let minus = measure.evaluate(&evolve(h, rho, -step))?;
    Ok((plus - minus) / (2.0 * step))
}

/// Central finite difference `[m(ρ_h) - m(ρ_{-h})]/(2h)` for `h ∈ [1e-7, 1e-3]`.
pub fn numeric_rate(measure: &Measure, h: &HermitianOperator, rho: &DensityMatrix, step: f64) -> Result<RateValue> {
    if !(1e-7..=1e-3).contains(&step) {
        return Err(Error::ParamOutOfRange(format!("finite-difference step {step} outside [1e-7, 1e-3]")));
    }
    measure.validate()?;
    check_dims(h, rho)?;
    let value = central_difference(measure, h, rho, step)?;
    Ok(RateValue { value, kind: measure.kind(), alpha: measure.alpha(), log_base: measure.log_base() })
}

/// Central differences at `h` and `h/2` and their Richardson combination.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RichardsonCheck {
    pub coarse: f64,
    pub fine: f64,
    pub extrapolated: f64,
    pub change: f64,
}

pub fn numeric_rate_richardson(
    measure: &Measure,
    h: &HermitianOperator,
    rho: &DensityMatrix,
    step: f64,
) -> Result<RichardsonCheck> {
    let coarse = numeric_rate(measure, h, rho, step)?.value;
    let fine = numeric_rate(measure, h, rho, 0.5 * step)?.value;
    Ok(RichardsonCheck { coarse, fine, extrapolated: (4.0 * fine - coarse) / 3.0, change: (fine - coarse).abs() })
}

/// `t_* = sup{t ∈ (0,1] : tρ ≤ Δ₁(ρ)}`, clamped to `[1/2, 1]`.
pub fn t_star(rho: &DensityMatrix) -> f64 {
    let real = real_part_matrix(rho.matrix());
    let spec = Spectrum::of(&real);
    let support: Vec<usize> = (0..spec.dim()).filter(|&i| spec.eigenvalues[i] > SUPPORT_EPS).collect();
    if support.is_empty() {
        return 1.0;
    }
    // Whitened ρ on the support: W† ρ W with W = V_s Λ_s^{-1/2}.
    let dim = spec.dim();
    let mut w = CMatrix::zeros(dim, support.len());
    for (c, &i) in support.iter().enumerate() {
        let s = 1.0 / spec.eigenvalues[i].sqrt();
        w.set_column(c, &spec.eigenvectors.column(i).scale(s));
    }
    let m = w.adjoint() * rho.matrix() * &w;
    let lmax = Spectrum::of(&m).max();
    if lmax <= 0.0 {
        return 1.0;
    }
    (1.0 / lmax).clamp(0.5, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RateBoundSource {
    Lemma2a,
    Lemma2b,
    Thm1a,
    Thm1b,
    Remark1,
    Remark2Pure,
    Remark2Delta,
    Eq19Skew,
    Eq21Mixed,
    Thm3,
    Thm5,
    Thm5Uniform,
}

impl RateBoundSource {
    pub const ALL: [RateBoundSource; 12] = [
        RateBoundSource::Lemma2a,
        RateBoundSource::Lemma2b,
        RateBoundSource::Thm1a,
        RateBoundSource::Thm1b,
        RateBoundSource::Remark1,
        RateBoundSource::Remark2Pure,
        RateBoundSource::Remark2Delta,
        RateBoundSource::Eq19Skew,
        RateBoundSource::Eq21Mixed,
        RateBoundSource::Thm3,
        RateBoundSource::Thm5,
        RateBoundSource::Thm5Uniform,
    ];

    /// The measure whose rate this source bounds, for a given `α` and base.
    pub fn bounded_measure(self, alpha: Option<f64>, base: LogBase) -> Option<Measure> {
        use RateBoundSource::*;
        match self {
            Lemma2a | Lemma2b | Thm1a | Thm1b | Remark2Pure | Eq21Mixed => {
                alpha.map(|alpha| Measure::TsallisCoherence { alpha })
            }
            Remark1 | Remark2Delta => Some(Measure::RelEntCoherence { base: LogBase::Two }),
            Eq19Skew => Some(Measure::SkewCoherence),
            Thm3 => alpha.map(|alpha| Measure::TsallisImaginarity { alpha }),
            Thm5 | Thm5Uniform => Some(Measure::RelEntImaginarity { base }),
        }
    }
}

/// The parameters a rate bound was evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct RateBoundParams {
    pub alpha: Option<f64>,
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub p_min: Option<f64>,
    pub p_max: Option<f64>,
    pub t_star: Option<f64>,
    pub delta: Option<f64>,
    pub h_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateBound {
    pub value: f64,
    pub source: RateBoundSource,
    pub parameters: RateBoundParams,
}

/// Inputs to [`rate_bound`]. `d`, `n` default to those of `rho`; `k` defaults
/// to the support size of `h`.
#[derive(Debug, Clone, Copy)]
pub struct RateBoundRequest<'a> {
    pub h: &'a HermitianOperator,
    pub rho: Option<&'a DensityMatrix>,
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub base: LogBase,
}

impl<'a> RateBoundRequest<'a> {
    pub fn new(h: &'a HermitianOperator) -> Self {
        RateBoundRequest { h, rho: None, alpha: None, delta: None, d: None, n: None, k: None, base: LogBase::Two }
    }

    pub fn with_state(mut self, rho: &'a DensityMatrix) -> Self {
        self.rho = Some(rho);
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn with_dims(mut self, d: usize, n: usize) -> Self {
        self.d = Some(d);
        self.n = Some(n);
        self
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn with_base(mut self, base: LogBase) -> Self {
        self.base = base;
        self
    }

    fn rho(&self) -> Result<&'a DensityMatrix> {
        self.rho.ok_or(Error::MissingParameter("rho"))
    }

    fn alpha(&self) -> Result<f64> {
        self.alpha.ok_or(Error::MissingParameter("alpha"))
    }

    fn d(&self) -> Result<usize> {
        self.d
            .or(self.rho.map(|r| r.qudit_dim()))
            .or(self.h.support().map(|s| s.qudit_dim))
            .ok_or(Error::MissingParameter("d"))
    }

    fn n(&self) -> Result<usize> {
        self.n
            .or(self.rho.map(|r| r.num_qudits()))
            .or(self.h.support().map(|s| s.num_qudits))
            .ok_or(Error::MissingParameter("n"))
    }

    fn k(&self) -> Result<usize> {
        self.k.or(self.h.support().map(|s| s.k())).ok_or(Error::MissingParameter("k"))
    }
}

fn alpha_below_one(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange { alpha, range: "(0,1)" })
    }
}

fn alpha_above_one(alpha: f64) -> Result<()> {
    if alpha > 1.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange { alpha, range: "(1,2]" })
    }
}

/// Evaluates the upper bound named by `source` on the corresponding rate.
pub fn rate_bound(source: RateBoundSource, req: &RateBoundRequest<'_>) -> Result<RateBound> {
    use RateBoundSource::*;
    let h_norm = req.h.operator_norm();
    let mut params = RateBoundParams { h_norm, ..Default::default() };
    let value = match source {
        Lemma2a => {
            let alpha = req.alpha()?;
            alpha_below_one(alpha)?;
            params.alpha = Some(alpha);
            trace_power(&req.rho()?.spectrum(), alpha) * h_norm / (alpha * (1.0 - alpha))
        }
        Lemma2b => {
            let alpha = req.alpha()?;
            alpha_above_one(alpha)?;
            let rho = req.rho()?;
            let (_, p) = alpha_diagonal(rho, alpha);
            let pmin = min_positive_check(&p)?;
            params.alpha = Some(alpha);
            params.p_min = Some(pmin);
            trace_power(&rho.spectrum(), alpha) * pmin.powf(1.0 / alpha - 1.0) * h_norm / (alpha * (alpha - 1.0))
        }
        Thm1a => {
            let alpha = req.alpha()?;
            alpha_below_one(alpha)?;
            let (d, k) = (req.d()?, req.k()?);
            params.alpha = Some(alpha);
            params.d = Some(d);
            params.k = Some(k);
            (d as f64).powf(k as f64 * (1.0 / alpha - 1.0)) * h_norm / (alpha * (1.0 - alpha))
        }
        Thm1b => {
            let alpha = req.alpha()?;
            alpha_above_one(alpha)?;
            let (_, p) = alpha_diagonal(req.rho()?, alpha);
            params.p_min = Some(min_positive_check(&p)?);
            let (d, n) = (req.d()?, req.n()?);
            params.alpha = Some(alpha);
            params.d = Some(d);
            params.n = Some(n);
            thm1b_value(alpha, d, n, h_norm)
        }
        Remark1 => {
            let p = req.rho()?.diagonal_probs();
            let pmin = min_positive_check(&p)?;
            let pmax = p.iter().copied().fold(0.0, f64::max);
            params.p_min = Some(pmin);
            params.p_max = Some(pmax);
            (pmax / pmin).log2() * h_norm
        }
        Remark2Pure => {
            let rho = req.rho()?;
            if !rho.is_pure(1e-9) {
                return Err(Error::HypothesisViolated(format!(
                    "state is not pure (purity {})",
                    rho.purity()
                )));
            }
            let alpha = req.alpha()?;
            check_coherence_alpha(alpha)?;
            params.alpha = Some(alpha);
            if alpha < 1.0 {
                h_norm / (alpha * (1.0 - alpha))
            } else {
                let (d, n) = (req.d()?, req.n()?);
                params.d = Some(d);
                params.n = Some(n);
                thm1b_value(alpha, d, n, h_norm)
            }
        }
        Remark2Delta => {
            let delta = req.delta.ok_or(Error::MissingParameter("delta"))?;
            if !(delta > 0.0 && delta < 1.0) {
                return Err(Error::ParamOutOfRange(format!("delta = {delta} outside (0,1)")));
            }
            if let Some(rho) = req.rho {
                let pmin = rho.diagonal_probs().into_iter().fold(f64::INFINITY, f64::min);
                params.p_min = Some(pmin);
                if pmin < delta {
                    return Err(Error::HypothesisViolated(format!("p_min = {pmin} < delta = {delta}")));
                }
            }
            params.delta = Some(delta);
            -delta.ln() / std::f64::consts::LN_2 * h_norm
        }
        Eq19Skew => {
            let (d, k) = (req.d()?, req.k()?);
            params.d = Some(d);
            params.k = Some(k);
            2.0 * (d as f64).powi(k as i32) * h_norm
        }
        Eq21Mixed => {
            let alpha = req.alpha()?;
            alpha_below_one(alpha)?;
            let (d, n) = (req.d()?, req.n()?);
            params.alpha = Some(alpha);
            params.d = Some(d);
            params.n = Some(n);
            (d as f64).powf(n as f64 * (1.0 - alpha)) * h_norm / (alpha * (1.0 - alpha))
        }
        Thm3 => 4.0 * h_norm,
        Thm5 => {
            let ts = t_star(req.rho()?);
            params.t_star = Some(ts);
            2.0 * binary_entropy(ts, req.base)? / ts * h_norm
        }
        Thm5Uniform => 4.0 * req.base.from_ln(std::f64::consts::LN_2) * h_norm,
    };
    Ok(RateBound { value: value.max(0.0), source, parameters: params })
}

fn thm1b_value(alpha: f64, d: usize, n: usize, h_norm: f64) -> f64 {
    2.0 * (d as f64).powf(n as f64 * (1.0 - 1.0 / alpha)) * h_norm / (alpha * (alpha - 1.0))
}
