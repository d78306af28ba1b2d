//! Circuit-cost lower bounds from resource powers and CGP.

mod schedule;

pub use schedule::{
    propagate_schedule, propagate_with_steps, schedule_cost, ControlSchedule, PiecewiseLinear, Segment, DEFAULT_STEPS, fixture_schedules,
    MAX_STEPS,
};

use std::f64::consts::LN_2;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cgp::{cgp_estimate, CgpKind, EnsembleEstimate};
use crate::error::{Error, Result};
use crate::gates::Unitary;
use crate::linalg::{conj, schatten_norm, HermitianOperator, LogBase, Schatten};
use crate::measures::{check_coherence_alpha, Measure, MeasureKind};
use crate::powers::{power_search, restricted_coherence_power, PowerCertificate, PowerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CostSource {
    Thm2a,
    Thm2b,
    Rem3Pure,
    Rem3Mixed,
    Eq25Skew,
    Eq26Restricted,
    Cor1Skew,
    Cor1RelEnt,
    Thm4,
    Thm4Kappa,
    Thm6,
}

/// The quantities a cost bound is computed from. `resource` is the power
/// certificate or CGP value the source needs (relative-entropy values in
/// bits).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct CostInputs {
    pub resource: f64,
    pub d: usize,
    pub n: usize,
    pub alpha: Option<f64>,
    pub delta: Option<f64>,
    pub kappa_max: Option<f64>,
    /// Whether the certificate's witness is a pure state.
    pub witness_pure: Option<bool>,
    /// Short description of where `resource` came from.
    pub witness: Option<String>,
    /// Monte Carlo standard error of `resource`, when estimated.
    pub std_error: Option<f64>,
}

impl CostInputs {
    pub fn new(resource: f64, d: usize, n: usize) -> Self {
        CostInputs { resource, d, n, ..Default::default() }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    pub fn with_kappa(mut self, kappa: f64) -> Self {
        self.kappa_max = Some(kappa);
        self
    }

    pub fn with_witness_pure(mut self, pure: bool) -> Self {
        self.witness_pure = Some(pure);
        self
    }

    pub fn with_witness(mut self, w: impl Into<String>) -> Self {
        self.witness = Some(w.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBound {
    pub value: f64,
    pub source: CostSource,
    pub inputs: CostInputs,
    /// Set when the supplied resource value is zero.
    pub vacuous: bool,
}

impl CostBound {
    pub fn recompute(&self) -> Result<f64> {
        bound_value(self.source, &self.inputs)
    }
}

fn need_alpha(inputs: &CostInputs) -> Result<f64> {
    inputs.alpha.ok_or(Error::MissingParameter("alpha"))
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

fn thm2b(alpha: f64, d: f64, n: f64) -> f64 {
    0.5 * d.powf(n * (1.0 / alpha - 1.0)) * (alpha - 1.0) * alpha
}

fn bound_value(source: CostSource, inputs: &CostInputs) -> Result<f64> {
    let c = inputs.resource;
    if !(c.is_finite() && c >= 0.0) {
        return Err(Error::ParamOutOfRange(format!("resource value {c} must be finite and nonnegative")));
    }
    if inputs.d < 2 || inputs.n < 1 {
        return Err(Error::ParamOutOfRange(format!("d = {}, n = {}", inputs.d, inputs.n)));
    }
    Ok(coefficient(source, inputs)? * c)
}

fn coefficient(source: CostSource, inputs: &CostInputs) -> Result<f64> {
    let (d, n) = (inputs.d as f64, inputs.n as f64);
    Ok(match source {
        CostSource::Thm2a => {
            let a = need_alpha(inputs)?;
            alpha_below_one(a)?;
            d.powf(2.0 * (1.0 - 1.0 / a)) * (1.0 - a) * a
        }
        CostSource::Thm2b => {
            let a = need_alpha(inputs)?;
            alpha_above_one(a)?;
            thm2b(a, d, n)
        }
        CostSource::Rem3Pure => {
            let a = need_alpha(inputs)?;
            check_coherence_alpha(a)?;
            match inputs.witness_pure {
                Some(true) => {}
                Some(false) => return Err(Error::HypothesisViolated("witness state is not pure".into())),
                None => return Err(Error::MissingParameter("witness_pure")),
            }
            if a < 1.0 {
                (1.0 - a) * a
            } else {
                thm2b(a, d, n)
            }
        }
        CostSource::Rem3Mixed => {
            let a = need_alpha(inputs)?;
            alpha_below_one(a)?;
            d.powf(n * (a - 1.0)) * (1.0 - a) * a
        }
        CostSource::Eq25Skew | CostSource::Cor1Skew => 1.0 / (2.0 * d * d),
        CostSource::Eq26Restricted => {
            let delta = inputs.delta.ok_or(Error::MissingParameter("delta"))?;
            if !(delta > 0.0 && delta < 1.0) {
                return Err(Error::ParamOutOfRange(format!("delta = {delta} outside (0,1)")));
            }
            -LN_2 / delta.ln()
        }
        CostSource::Cor1RelEnt => 1.0 / (8.0 * d.log2()),
        CostSource::Thm4 => 0.25,
        CostSource::Thm4Kappa => {
            let k = inputs.kappa_max.ok_or(Error::MissingParameter("kappa_max"))?;
            if k <= 0.0 {
                return Err(Error::KappaZero);
            }
            if k > 2.0 + 1e-10 {
                return Err(Error::ParamOutOfRange(format!("kappa_max = {k} exceeds 2")));
            }
            1.0 / (2.0 * k)
        }
        CostSource::Thm6 => 0.25,
    })
}

/// Evaluates one cost lower bound.
pub fn cost_bound(source: CostSource, inputs: CostInputs) -> Result<CostBound> {
    let value = bound_value(source, &inputs)?;
    Ok(CostBound { value, source, vacuous: inputs.resource == 0.0, inputs })
}

/// `κ_max = max_j ‖o_j + o_j*‖∞`.
pub fn kappa_max(generators: &[HermitianOperator]) -> f64 {
    generators
        .iter()
        .map(|o| schatten_norm(&(o.matrix() + conj(o.matrix())), Schatten::Inf))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundConfig {
    pub alphas: Vec<f64>,
    pub power: PowerConfig,
    pub samples: usize,
    pub seed: u64,
    /// δ for the restricted relative-entropy bound; skipped when absent.
    pub delta: Option<f64>,
    /// κ_max of the generator set; the κ-refined imaginarity bound is
    /// skipped when absent.
    pub kappa_max: Option<f64>,
    pub include_cgp: bool,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            alphas: vec![0.3, 0.5, 0.7, 1.5, 2.0],
            power: PowerConfig::default(),
            samples: 20_000,
            seed: 0,
            delta: None,
            kappa_max: None,
            include_cgp: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// Sorted by value, largest first.
    pub bounds: Vec<CostBound>,
    pub certificates: Vec<PowerCertificate>,
    pub cgp: Vec<EnsembleEstimate>,
}

impl BoundReport {
    pub fn best(&self) -> Option<&CostBound> {
        self.bounds.first()
    }
}

fn witness_label(cert: &PowerCertificate) -> String {
    let mut s = format!("{:?}", cert.kind);
    if let Some(a) = cert.alpha {
        s.push_str(&format!("(alpha={a})"));
    }
    if let Some(d) = cert.delta {
        s.push_str(&format!("(delta={d})"));
    }
    s.push_str(&format!(" start {}", cert.start_index));
    s
}

enum Job {
    Power(Measure),
    Restricted(f64),
    Cgp(CgpKind),
}

/// Runs every applicable search and estimate for `U` and collects all bounds.
pub fn best_bound(u: &Unitary, config: &BoundConfig) -> Result<BoundReport> {
    let (d, n) = (u.qudit_dim(), u.num_qudits());
    let mut jobs = Vec::new();
    for &a in &config.alphas {
        check_coherence_alpha(a)?;
        jobs.push(Job::Power(Measure::TsallisCoherence { alpha: a }));
    }
    jobs.push(Job::Power(Measure::SkewCoherence));
    for &a in config.alphas.iter().filter(|&&a| a < 1.0) {
        jobs.push(Job::Power(Measure::TsallisImaginarity { alpha: a }));
    }
    jobs.push(Job::Power(Measure::RelEntImaginarity { base: LogBase::Two }));
    if let Some(delta) = config.delta {
        jobs.push(Job::Restricted(delta));
    }
    if config.include_cgp {
        jobs.push(Job::Cgp(CgpKind::Skew));
        jobs.push(Job::Cgp(CgpKind::RelEnt));
    }

    enum Outcome {
        Cert(PowerCertificate),
        Est(EnsembleEstimate),
    }
    let outcomes: Vec<Outcome> = jobs
        .into_par_iter()
        .map(|job| -> Result<Outcome> {
            Ok(match job {
                Job::Power(m) => Outcome::Cert(power_search(u, m, &config.power)?),
                Job::Restricted(delta) => Outcome::Cert(restricted_coherence_power(u, delta, &config.power)?),
                Job::Cgp(k) => Outcome::Est(cgp_estimate(u, k, config.samples, config.seed, LogBase::Two)?),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut bounds = Vec::new();
    let mut certificates = Vec::new();
    let mut cgp = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Cert(c) => {
                let pure = c.witness.is_pure(1e-9);
                let base = CostInputs::new(c.value, d, n).with_witness(witness_label(&c)).with_witness_pure(pure);
                match c.kind {
                    MeasureKind::TsallisCoherence => {
                        let a = c.alpha.expect("alpha recorded");
                        let inp = base.with_alpha(a);
                        if a < 1.0 {
                            bounds.push(cost_bound(CostSource::Thm2a, inp.clone())?);
                            bounds.push(cost_bound(CostSource::Rem3Mixed, inp.clone())?);
                        } else {
                            bounds.push(cost_bound(CostSource::Thm2b, inp.clone())?);
                        }
                        if pure {
                            bounds.push(cost_bound(CostSource::Rem3Pure, inp)?);
                        }
                    }
                    MeasureKind::SkewCoherence => bounds.push(cost_bound(CostSource::Eq25Skew, base)?),
                    MeasureKind::RelEntCoherence => {
                        let delta = c.delta.expect("restricted certificate records delta");
                        bounds.push(cost_bound(CostSource::Eq26Restricted, base.with_delta(delta))?);
                    }
                    MeasureKind::TsallisImaginarity => {
                        let inp = base.with_alpha(c.alpha.expect("alpha recorded"));
                        bounds.push(cost_bound(CostSource::Thm4, inp.clone())?);
                        if let Some(k) = config.kappa_max {
                            bounds.push(cost_bound(CostSource::Thm4Kappa, inp.with_kappa(k))?);
                        }
                    }
                    MeasureKind::RelEntImaginarity => bounds.push(cost_bound(CostSource::Thm6, base)?),
                }
                certificates.push(c);
            }
            Outcome::Est(e) => {
                let mut inp = CostInputs::new(e.mean, d, n).with_witness(format!("{:?} Monte Carlo", e.kind));
                inp.std_error = Some(e.std_error);
                let source = match e.kind {
                    CgpKind::Skew => CostSource::Cor1Skew,
                    CgpKind::RelEnt => CostSource::Cor1RelEnt,
                };
                bounds.push(cost_bound(source, inp)?);
                cgp.push(e);
            }
        }
    }
    bounds.sort_by(|a, b| b.value.total_cmp(&a.value));
    Ok(BoundReport { bounds, certificates, cgp })
}
