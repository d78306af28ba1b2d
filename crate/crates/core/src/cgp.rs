//! Coherence-generating power: the average coherence `U` produces from
//! random incoherent inputs.
//!
//! Two ensembles of diagonal states are available. `Flat` draws the diagonal
//! uniformly from the probability simplex. `HilbertSchmidt` draws it as the
//! unordered spectrum of `GG†/Tr(GG†)` for a complex Ginibre matrix `G`.
//! The skew-information closed forms match the Hilbert-Schmidt ensemble and
//! the relative-entropy closed forms match the flat one, so `cgp_estimate`
//! uses those pairings by default.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::gates::Unitary;
use crate::linalg::{c64, register_dim, DensityMatrix, LogBase, Spectrum};

pub const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CgpKind {
    #[serde(rename = "CGP_S")]
    Skew,
    #[serde(rename = "CGP_R")]
    RelEnt,
}

impl CgpKind {
    pub fn default_ensemble(self) -> Ensemble {
        match self {
            CgpKind::Skew => Ensemble::HilbertSchmidt,
            CgpKind::RelEnt => Ensemble::Flat,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ensemble {
    Flat,
    HilbertSchmidt,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    pub seed: u64,
    pub kind: CgpKind,
    pub ensemble: Ensemble,
    pub log_base: LogBase,
}

/// Uniform point of the `(dim-1)`-simplex from normalized unit exponentials.
pub fn sample_simplex<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= s;
    }
    v
}

/// Unordered spectrum of a Hilbert-Schmidt random density matrix.
pub fn sample_hs_spectrum<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| c64(StandardNormal.sample(rng), StandardNormal.sample(rng)));
    let w = &g * g.adjoint();
    let spec = Spectrum::of(&w);
    let mut v: Vec<f64> = spec.eigenvalues.iter().map(|&x| x.max(0.0)).collect();
    let s: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= s;
    }
    v.shuffle(rng);
    v
}

fn sample_probs<R: Rng + ?Sized>(ensemble: Ensemble, dim: usize, rng: &mut R) -> Vec<f64> {
    match ensemble {
        Ensemble::Flat => sample_simplex(dim, rng),
        Ensemble::HilbertSchmidt => sample_hs_spectrum(dim, rng),
    }
}

/// Diagonal state with a flat-Dirichlet probability vector.
pub fn sample_incoherent<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<DensityMatrix> {
    let dim = register_dim(d, n).ok_or(Error::DimNotPower { dim: 0, d })?;
    if dim < 2 {
        return Err(Error::ParamOutOfRange(format!("dimension {dim} < 2")));
    }
    DensityMatrix::diagonal(&sample_simplex(dim, rng), d, n)
}

/// Diagonal state drawn from the Hilbert-Schmidt spectrum ensemble.
pub fn sample_incoherent_hs<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Result<DensityMatrix> {
    let dim = register_dim(d, n).ok_or(Error::DimNotPower { dim: 0, d })?;
    if dim < 2 {
        return Err(Error::ParamOutOfRange(format!("dimension {dim} < 2")));
    }
    DensityMatrix::diagonal(&sample_hs_spectrum(dim, rng), d, n)
}

/// Sparse rows of `w_jk = |U_jk|²`, each normalized to sum to one.
struct Weights {
    rows: Vec<Vec<(usize, f64)>>,
}

impl Weights {
    fn of(u: &Unitary) -> Weights {
        let m = u.matrix();
        let rows = (0..m.nrows())
            .map(|j| {
                let row: Vec<(usize, f64)> =
                    (0..m.ncols()).map(|k| (k, m[(j, k)].norm_sqr())).filter(|&(_, w)| w > 0.0).collect();
                let s: f64 = row.iter().map(|&(_, w)| w).sum();
                row.into_iter().map(|(k, w)| (k, w / s)).collect()
            })
            .collect();
        Weights { rows }
    }

    /// `C_s(U diag(p) U†) = Σ_j Σ_k w_jk (√p_k - m_j)²` with `m_j = Σ_k w_jk √p_k`.
    fn skew(&self, p: &[f64]) -> f64 {
        let sq: Vec<f64> = p.iter().map(|x| x.sqrt()).collect();
        self.rows
            .iter()
            .map(|row| {
                let m: f64 = row.iter().map(|&(k, w)| w * sq[k]).sum();
                row.iter().map(|&(k, w)| w * (sq[k] - m).powi(2)).sum::<f64>()
            })
            .sum()
    }

    /// `C_r(U diag(p) U†) = Σ_{j,k} w_jk p_k ln(p_k / q_j)` with `q_j = Σ_k w_jk p_k`, in nats.
    fn relent_nats(&self, p: &[f64]) -> f64 {
        self.rows
            .iter()
            .map(|row| {
                let q: f64 = row.iter().map(|&(k, w)| w * p[k]).sum();
                row.iter()
                    .filter(|&&(k, _)| p[k] > 0.0)
                    .map(|&(k, w)| w * p[k] * (p[k] / q).ln())
                    .sum::<f64>()
            })
            .sum::<f64>()
            .max(0.0)
    }
}

/// Sum in a fixed binary-tree order.
fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

use crate::random::stream_rng as per_sample_rng;

/// Monte Carlo CGP with the default ensemble for `kind`.
pub fn cgp_estimate(u: &Unitary, kind: CgpKind, samples: usize, seed: u64, log_base: LogBase) -> Result<EnsembleEstimate> {
    cgp_estimate_with(u, kind, kind.default_ensemble(), samples, seed, log_base)
}

/// Monte Carlo CGP over an explicit ensemble. Sample `i` uses the ChaCha
/// stream `i` of `seed`, so the result does not depend on scheduling.
pub fn cgp_estimate_with(
    u: &Unitary,
    kind: CgpKind,
    ensemble: Ensemble,
    samples: usize,
    seed: u64,
    log_base: LogBase,
) -> Result<EnsembleEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::ConfigInvalid(format!("samples = {samples} < {MIN_SAMPLES}")));
    }
    let dim = u.dim();
    let weights = Weights::of(u);
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = per_sample_rng(seed, i);
            let p = sample_probs(ensemble, dim, &mut rng);
            match kind {
                CgpKind::Skew => weights.skew(&p),
                CgpKind::RelEnt => log_base.from_ln(weights.relent_nats(&p)),
            }
        })
        .collect();
    let n = samples as f64;
    let mean = pairwise_sum(&values) / n;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    Ok(EnsembleEstimate { mean, std_error: (var / n).sqrt(), samples, seed, kind, ensemble, log_base })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CgpFamily {
    Hadamard,
    SqrtSwap,
    Utheta(f64),
    Ut(f64),
}

/// `1 - 54545π/262144`.
fn two_qubit_factor() -> f64 {
    1.0 - 54545.0 * PI / 262144.0
}

fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Evaluates `f` near a removable singularity `x0` with known limit by
/// quadratic interpolation through `x0 ± H` and the limit.
fn fill_singularity(x: f64, x0: f64, limit: f64, f: impl Fn(f64) -> f64) -> f64 {
    const H: f64 = 1e-3;
    let dx = x - x0;
    if dx.abs() >= H {
        return f(x);
    }
    let (fm, fp) = (f(x0 - H), f(x0 + H));
    let b = (fp - fm) / (2.0 * H);
    let c = (fp + fm - 2.0 * limit) / (2.0 * H * H);
    limit + b * dx + c * dx * dx
}

/// Relative-entropy CGP of `U_θ` in nats.
fn utheta_relent(theta: f64) -> f64 {
    let raw = |th: f64| {
        let (s, c) = th.sin_cos();
        let (s2, c2) = (s * s, c * c);
        (s2 * xlnx(s2) - c2 * xlnx(c2)) / (2.0 * th).cos()
    };
    let limit = LN_2 - 0.5;
    let near = if theta < PI / 2.0 { PI / 4.0 } else { 3.0 * PI / 4.0 };
    fill_singularity(theta, near, limit, raw).max(0.0)
}

/// Relative-entropy CGP of `U_t` in nats.
fn ut_relent(t: f64) -> f64 {
    let raw = |t: f64| (t * xlnx(t) - (1.0 - t) * xlnx(1.0 - t)) / (2.0 * (1.0 - 2.0 * t));
    fill_singularity(t, 0.5, (2.0 * LN_2 - 1.0) / 4.0, raw).max(0.0)
}

/// The tabulated analytic CGP values; relative-entropy values in nats.
pub fn cgp_closed_form(family: CgpFamily, kind: CgpKind) -> Result<f64> {
    let skew_h = 0.5 * (1.0 - 3.0 * PI / 16.0);
    Ok(match (family, kind) {
        (CgpFamily::Hadamard, CgpKind::Skew) => skew_h,
        (CgpFamily::Hadamard, CgpKind::RelEnt) => LN_2 - 0.5,
        (CgpFamily::SqrtSwap, CgpKind::Skew) => 0.25 * two_qubit_factor(),
        (CgpFamily::SqrtSwap, CgpKind::RelEnt) => 0.5 * LN_2,
        (CgpFamily::Utheta(th), k) => {
            if !(0.0..=PI).contains(&th) {
                return Err(Error::ParamOutOfRange(format!("theta = {th} outside [0, pi]")));
            }
            match k {
                CgpKind::Skew => skew_h * (2.0 * th).sin().powi(2),
                CgpKind::RelEnt => utheta_relent(th),
            }
        }
        (CgpFamily::Ut(t), k) => {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::ParamOutOfRange(format!("t = {t} outside [0, 1]")));
            }
            match k {
                CgpKind::Skew => t * (1.0 - t) * two_qubit_factor(),
                CgpKind::RelEnt => ut_relent(t),
            }
        }
    })
}

/// The two branches of the `U_θ` cost bound: `CGP_S/8` and `CGP_R(bits)/8`.
pub fn utheta_bound_branches(theta: f64) -> Result<(f64, f64)> {
    let s = cgp_closed_form(CgpFamily::Utheta(theta), CgpKind::Skew)? / 8.0;
    let r = cgp_closed_form(CgpFamily::Utheta(theta), CgpKind::RelEnt)? / (8.0 * LN_2);
    Ok((s, r))
}

/// `f(θ)`, the larger of the two `U_θ` branches.
pub fn utheta_bound(theta: f64) -> Result<f64> {
    let (s, r) = utheta_bound_branches(theta)?;
    Ok(s.max(r))
}

/// `g(t) = CGP_R(U_t)/(8 ln 2)`.
pub fn ut_bound(t: f64) -> Result<f64> {
    Ok(cgp_closed_form(CgpFamily::Ut(t), CgpKind::RelEnt)? / (8.0 * LN_2))
}

/// Branches `(CGP_S/8, CGP_R(bits)/8)` for `U_t`.
pub fn ut_bound_branches(t: f64) -> Result<(f64, f64)> {
    let s = cgp_closed_form(CgpFamily::Ut(t), CgpKind::Skew)? / 8.0;
    Ok((s, ut_bound(t)?))
}
