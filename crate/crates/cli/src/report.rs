use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use qrc_core::bounds::{best_bound, BoundConfig, CostBound};
use qrc_core::cgp::EnsembleEstimate;
use qrc_core::gates::Unitary;
use qrc_core::linalg::LogBase;
use qrc_core::measures::MeasureKind;
use qrc_core::powers::{PowerCertificate, PowerConfig};

use crate::format::float;

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub alphas: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    pub delta: Option<f64>,
    pub kappa_max: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    #[serde(flatten)]
    pub bound: CostBound,
    pub max: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateView {
    pub kind: MeasureKind,
    pub alpha: Option<f64>,
    pub log_base: Option<LogBase>,
    pub delta: Option<f64>,
    pub value: f64,
    pub restarts: usize,
    pub converged: bool,
    pub start_index: usize,
    pub witness_purity: f64,
    pub witness_re: Vec<Vec<f64>>,
    pub witness_im: Vec<Vec<f64>>,
}

impl From<&PowerCertificate> for CertificateView {
    fn from(c: &PowerCertificate) -> Self {
        let m = c.witness.matrix();
        let rows = |im: bool| -> Vec<Vec<f64>> {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| if im { m[(i, j)].im } else { m[(i, j)].re }).collect())
                .collect()
        };
        CertificateView {
            kind: c.kind,
            alpha: c.alpha,
            log_base: c.log_base,
            delta: c.delta,
            value: c.value,
            restarts: c.restarts,
            converged: c.converged,
            start_index: c.start_index,
            witness_purity: c.witness.purity(),
            witness_re: rows(false),
            witness_im: rows(true),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub gate: String,
    pub d: usize,
    pub n: usize,
    pub config: ConfigEcho,
    pub bounds: Vec<BoundEntry>,
    pub certificates: Vec<CertificateView>,
    pub cgp: Vec<EnsembleEstimate>,
    pub wall_time_seconds: f64,
}

impl ReportDocument {
    pub fn max_bound(&self) -> Option<&CostBound> {
        self.bounds.iter().find(|b| b.max).map(|b| &b.bound)
    }
}

pub fn bound_config(alphas: Vec<f64>, samples: usize, seed: u64, restarts: usize) -> BoundConfig {
    BoundConfig {
        alphas,
        power: PowerConfig { restarts, seed, ..PowerConfig::default() },
        samples,
        seed,
        ..BoundConfig::default()
    }
}

pub fn build_report(u: &Unitary, config: &BoundConfig) -> qrc_core::Result<ReportDocument> {
    let start = Instant::now();
    let r = best_bound(u, config)?;
    let bounds = r.bounds.into_iter().enumerate().map(|(i, bound)| BoundEntry { bound, max: i == 0 }).collect();
    Ok(ReportDocument {
        gate: u.label().to_string(),
        d: u.qudit_dim(),
        n: u.num_qudits(),
        config: ConfigEcho {
            alphas: config.alphas.clone(),
            samples: config.samples,
            seed: config.seed,
            restarts: config.power.restarts,
            max_iters: config.power.max_iters,
            delta: config.delta,
            kappa_max: config.kappa_max,
        },
        bounds,
        certificates: r.certificates.iter().map(CertificateView::from).collect(),
        cgp: r.cgp,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x}"))
}

pub fn render_text(doc: &ReportDocument) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "gate {} (d = {}, n = {})", doc.gate, doc.d, doc.n);
    let _ = writeln!(
        s,
        "alphas {:?}, samples {}, seed {}, restarts {}",
        doc.config.alphas, doc.config.samples, doc.config.seed, doc.config.restarts
    );
    let _ = writeln!(s, "\n{:<16} {:>8} {:>24} {:>24}  flags", "source", "alpha", "resource", "bound");
    for b in &doc.bounds {
        let mut flags = Vec::new();
        if b.max {
            flags.push("max");
        }
        if b.bound.vacuous {
            flags.push("vacuous");
        }
        let _ = writeln!(
            s,
            "{:<16} {:>8} {:>24} {:>24}  {}",
            format!("{:?}", b.bound.source),
            opt(b.bound.inputs.alpha),
            float(b.bound.inputs.resource),
            float(b.bound.value),
            flags.join(",")
        );
    }
    let _ = writeln!(s, "\ncertificates");
    for c in &doc.certificates {
        let _ = writeln!(
            s,
            "  {:<20} alpha {:>5} value {}  purity {:.6}",
            format!("{:?}", c.kind),
            opt(c.alpha),
            float(c.value),
            c.witness_purity
        );
    }
    let _ = writeln!(s, "\nCGP estimates (bits)");
    for e in &doc.cgp {
        let _ = writeln!(
            s,
            "  {:?} {:?}: {} ± {} ({} samples)",
            e.kind,
            e.ensemble,
            float(e.mean),
            float(e.std_error),
            e.samples
        );
    }
    let _ = writeln!(s, "\nwall time {:.3} s", doc.wall_time_seconds);
    s
}
