use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gates::{GateName, Unitary};
use crate::linalg::{c64, schatten_norm, trace, CMatrix, HermitianOperator, Schatten, expm_i_hermitian};

pub const DEFAULT_STEPS: usize = 4096;
pub const MAX_STEPS: usize = 1 << 20;
const NORM_TOL: f64 = 1e-10;
const CONVERGENCE_TOL: f64 = 1e-6;

/// One linear piece of a control, from `(s0, v0)` to `(s1, v1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub s0: f64,
    pub s1: f64,
    pub v0: f64,
    pub v1: f64,
}

impl Segment {
    /// `∫ |r(s)| ds` over the segment.
    pub fn abs_integral(&self) -> f64 {
        let len = self.s1 - self.s0;
        let (a, b) = (self.v0, self.v1);
        if a * b >= 0.0 {
            0.5 * (a.abs() + b.abs()) * len
        } else {
            0.5 * (a * a + b * b) / (a.abs() + b.abs()) * len
        }
    }
}

/// Continuous piecewise-linear control on `[0, 1]` from a breakpoint table.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    points: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidSchedule("need at least two breakpoints".into()));
        }
        if points[0].0 != 0.0 || points[points.len() - 1].0 != 1.0 {
            return Err(Error::InvalidSchedule("breakpoints must start at 0 and end at 1".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidSchedule("breakpoints must be strictly increasing".into()));
        }
        if points.iter().any(|p| !p.1.is_finite()) {
            return Err(Error::InvalidSchedule("control values must be finite".into()));
        }
        Ok(PiecewiseLinear { points })
    }

    pub fn constant(v: f64) -> Self {
        PiecewiseLinear { points: vec![(0.0, v), (1.0, v)] }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.points.windows(2).map(|w| Segment { s0: w[0].0, s1: w[1].0, v0: w[0].1, v1: w[1].1 })
    }

    pub fn eval(&self, s: f64) -> f64 {
        let i = self.points.partition_point(|p| p.0 <= s).clamp(1, self.points.len() - 1);
        let ((s0, v0), (s1, v1)) = (self.points[i - 1], self.points[i]);
        v0 + (v1 - v0) * (s - s0) / (s1 - s0)
    }

    pub fn abs_integral(&self) -> f64 {
        self.segments().map(|g| g.abs_integral()).sum()
    }
}

/// Generators `o_j` with controls `r_j`, defining `H(s) = Σ r_j(s) o_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule {
    generators: Vec<HermitianOperator>,
    controls: Vec<PiecewiseLinear>,
    steps: usize,
    d: usize,
    n: usize,
}

impl ControlSchedule {
    /// Generators must be traceless, have unit operator norm and act on at
    /// most two qudits of a common register.
    pub fn new(generators: Vec<HermitianOperator>, controls: Vec<PiecewiseLinear>, steps: usize) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidSchedule("no generators".into()));
        }
        if generators.len() != controls.len() {
            return Err(Error::InvalidSchedule(format!(
                "{} generators but {} controls",
                generators.len(),
                controls.len()
            )));
        }
        if steps == 0 {
            return Err(Error::InvalidSchedule("steps must be at least 1".into()));
        }
        let first = generators[0]
            .support()
            .ok_or_else(|| Error::InvalidSchedule("generator without support information".into()))?;
        let (d, n) = (first.qudit_dim, first.num_qudits);
        for (j, g) in generators.iter().enumerate() {
            let sup = g
                .support()
                .ok_or_else(|| Error::InvalidSchedule(format!("generator {j} has no support information")))?;
            if sup.qudit_dim != d || sup.num_qudits != n {
                return Err(Error::InvalidSchedule(format!("generator {j} acts on a different register")));
            }
            if sup.k() > 2 {
                return Err(Error::InvalidSchedule(format!("generator {j} acts on {} qudits", sup.k())));
            }
            let tr = trace(g.matrix()).norm();
            if tr > NORM_TOL {
                return Err(Error::InvalidSchedule(format!("generator {j} has trace {tr:e}")));
            }
            let norm = g.operator_norm();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidSchedule(format!("generator {j} has operator norm {norm}")));
            }
        }
        Ok(ControlSchedule { generators, controls, steps, d, n })
    }

    pub fn generators(&self) -> &[HermitianOperator] {
        &self.generators
    }

    pub fn controls(&self) -> &[PiecewiseLinear] {
        &self.controls
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn qudit_dim(&self) -> usize {
        self.d
    }

    pub fn num_qudits(&self) -> usize {
        self.n
    }

    pub fn hamiltonian(&self, s: f64) -> CMatrix {
        let dim = self.generators[0].dim();
        let mut h = CMatrix::zeros(dim, dim);
        for (g, r) in self.generators.iter().zip(&self.controls) {
            let v = r.eval(s);
            if v != 0.0 {
                h += g.matrix().scale(v);
            }
        }
        h
    }
}

/// `∫₀¹ Σ_j |r_j(s)| ds`, exact.
pub fn schedule_cost(sched: &ControlSchedule) -> f64 {
    sched.controls.iter().map(PiecewiseLinear::abs_integral).sum()
}

/// Ordered product of `N` short-time propagators with `H` sampled at
/// step midpoints; later times act on the left.
pub fn propagate_with_steps(sched: &ControlSchedule, steps: usize) -> CMatrix {
    let dim = sched.generators[0].dim();
    let mut u = CMatrix::identity(dim, dim);
    let dt = 1.0 / steps as f64;
    for t in 0..steps {
        let h = sched.hamiltonian((t as f64 + 0.5) * dt);
        if h.iter().all(|z| *z == c64(0.0, 0.0)) {
            continue;
        }
        u = expm_i_hermitian(&h, dt) * u;
    }
    u
}

/// Propagates with `N = steps`, doubling until successive results agree to
/// 1e-6 in operator norm.
pub fn propagate_schedule(sched: &ControlSchedule) -> Result<Unitary> {
    let mut n_steps = sched.steps;
    let mut prev = propagate_with_steps(sched, n_steps);
    loop {
        let next_n = n_steps * 2;
        let next = propagate_with_steps(sched, next_n);
        let change = schatten_norm(&(&next - &prev), Schatten::Inf);
        if change <= CONVERGENCE_TOL {
            return Unitary::new(next, sched.d, sched.n, "schedule");
        }
        if next_n >= MAX_STEPS {
            return Err(Error::ConvergenceNotReached { steps: next_n, change });
        }
        n_steps = next_n;
        prev = next;
    }
}

fn pauli(name: char) -> CMatrix {
    let (o, l, i) = (c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 1.0));
    let e = match name {
        'x' => [o, l, l, o],
        'y' => [o, -i, i, o],
        'z' => [l, o, o, -l],
        _ => [l, o, o, l],
    };
    CMatrix::from_row_slice(2, 2, &e)
}

fn tent(lo: f64, hi: f64, area: f64) -> Result<PiecewiseLinear> {
    let peak = 2.0 * area / (hi - lo);
    let mut pts = Vec::new();
    if lo > 0.0 {
        pts.push((0.0, 0.0));
    }
    pts.push((lo, 0.0));
    pts.push((0.5 * (lo + hi), peak));
    pts.push((hi, 0.0));
    if hi < 1.0 {
        pts.push((1.0, 0.0));
    }
    PiecewiseLinear::new(pts)
}

/// Rotations `exp(-i θ_k P_k)` applied in order, each on its own
/// consecutive time window with a tent-shaped control.
fn sequential(rotations: &[(char, f64)]) -> Result<ControlSchedule> {
    let m = rotations.len() as f64;
    let mut gens = Vec::new();
    let mut ctrls = Vec::new();
    for (k, &(p, theta)) in rotations.iter().enumerate() {
        gens.push(HermitianOperator::local(&pauli(p), &[0], 2, 1)?);
        ctrls.push(tent(k as f64 / m, (k + 1) as f64 / m, theta)?);
    }
    ControlSchedule::new(gens, ctrls, DEFAULT_STEPS)
}

/// Known schedules implementing `gate` up to global phase, with normalized
/// generators. Empty for gates without a stored decomposition.
pub fn fixture_schedules(gate: &GateName) -> Result<Vec<ControlSchedule>> {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    Ok(match gate {
        GateName::H => {
            let axis = (pauli('x') + pauli('z')).scale(s2);
            vec![
                ControlSchedule::new(
                    vec![HermitianOperator::local(&axis, &[0], 2, 1)?],
                    vec![PiecewiseLinear::constant(PI / 2.0)],
                    DEFAULT_STEPS,
                )?,
                sequential(&[('z', PI / 2.0), ('y', PI / 4.0)])?,
                sequential(&[('z', PI / 4.0), ('x', PI / 4.0), ('z', PI / 4.0)])?,
            ]
        }
        GateName::T => vec![ControlSchedule::new(
            vec![HermitianOperator::local(&pauli('z'), &[0], 2, 1)?],
            vec![PiecewiseLinear::constant(PI / 8.0)],
            DEFAULT_STEPS,
        )?],
        GateName::X => vec![ControlSchedule::new(
            vec![HermitianOperator::local(&pauli('x'), &[0], 2, 1)?],
            vec![PiecewiseLinear::constant(PI / 2.0)],
            DEFAULT_STEPS,
        )?],
        GateName::Cnot => {
            let zx = pauli('z').kronecker(&pauli('x'));
            vec![ControlSchedule::new(
                vec![
                    HermitianOperator::local(&pauli('z'), &[0], 2, 2)?,
                    HermitianOperator::local(&pauli('x'), &[1], 2, 2)?,
                    HermitianOperator::local(&zx, &[0, 1], 2, 2)?,
                ],
                vec![
                    PiecewiseLinear::constant(PI / 4.0),
                    PiecewiseLinear::constant(PI / 4.0),
                    PiecewiseLinear::constant(-PI / 4.0),
                ],
                DEFAULT_STEPS,
            )?]
        }
        _ => Vec::new(),
    })
}
