//! Dense complex matrix algebra: validated density matrices, Hermitian
//! spectral calculus, the dephasing and real-projection maps, entropies,
//! Schatten norms and the local-to-register embedding.
//!
//! All matrices are expressed in the computational product basis. Qudit 0 is
//! the most significant digit of a basis index, so an operator placed on
//! position 0 of a two-qubit register is `A ⊗ I`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Tolerance for Hermiticity, PSD and trace checks on unit-scale matrices.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues below this are treated as exactly zero when taking powers,
/// logarithms and entropies.
pub const SUPPORT_EPS: f64 = 1e-12;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Logarithm base used by entropy-based quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum LogBase {
    #[default]
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "e")]
    E,
}

impl LogBase {
    /// Converts a natural logarithm into this base.
    #[inline]
    pub fn from_ln(self, ln_value: f64) -> f64 {
        match self {
            LogBase::Two => ln_value / std::f64::consts::LN_2,
            LogBase::E => ln_value,
        }
    }

    #[inline]
    pub fn log(self, x: f64) -> f64 {
        self.from_ln(x.ln())
    }
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: CMatrix,
}

impl Spectrum {
    pub fn of(a: &CMatrix) -> Spectrum {
        let herm = hermitize(a);
        let eig = SymmetricEigen::new(herm);
        let dim = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let eigenvalues = DVector::from_iterator(dim, order.iter().map(|&i| eig.eigenvalues[i]));
        let mut eigenvectors = CMatrix::zeros(dim, dim);
        for (col, &i) in order.iter().enumerate() {
            eigenvectors.set_column(col, &eig.eigenvectors.column(i));
        }
        Spectrum { eigenvalues, eigenvectors }
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.dim() - 1]
    }

    /// `V f(Λ) V†`.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> CMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            scaled.column_mut(j).scale_mut(w);
        }
        &scaled * v.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|x| x)
    }
}

/// `(A + A†)/2`.
pub fn hermitize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

pub fn max_abs(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn hermitian_deviation(a: &CMatrix) -> f64 {
    max_abs(&(a - a.adjoint()))
}

pub fn trace(a: &CMatrix) -> Complex64 {
    a.diagonal().iter().sum()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Entrywise complex conjugate `A*` in the reference basis.
pub fn conj(a: &CMatrix) -> CMatrix {
    a.map(|z| z.conj())
}

/// `A ⊗ B` with `A` on the more significant digits.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// `d^n`, or `None` on overflow.
pub fn register_dim(d: usize, n: usize) -> Option<usize> {
    d.checked_pow(u32::try_from(n).ok()?)
}

/// A validated density operator on `n` qudits of dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    d: usize,
    n: usize,
    entries: CMatrix,
}

/// Checks the density-matrix invariants and returns a validated state.
///
/// Slightly negative eigenvalues (within tolerance) are clamped to zero and
/// the result renormalized; larger violations are errors.
pub fn validate_density(m: &CMatrix, d: usize, n: usize) -> Result<DensityMatrix> {
    let dim = register_dim(d, n).ok_or(Error::DimNotPower { dim: m.nrows(), d })?;
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), actual: m.ncols() });
    }
    if m.nrows() != dim {
        return Err(Error::DimensionMismatch { expected: dim, actual: m.nrows() });
    }
    let herm_dev = hermitian_deviation(m);
    if herm_dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: herm_dev });
    }
    let mut entries = hermitize(m);
    let tr = trace(&entries).re;
    if (tr - 1.0).abs() > HERMITIAN_TOL {
        return Err(Error::TraceNotOne { deviation: (tr - 1.0).abs() });
    }
    let spec = Spectrum::of(&entries);
    if spec.min() < -HERMITIAN_TOL {
        return Err(Error::NotPsd { min_eigenvalue: spec.min() });
    }
    if spec.min() < 0.0 || spec.max() > 1.0 {
        let clamped = spec.map(|x| x.clamp(0.0, 1.0));
        let t = trace(&clamped).re;
        entries = clamped.unscale(t);
    }
    Ok(DensityMatrix { d, n, entries })
}

impl DensityMatrix {
    pub fn new(m: CMatrix, d: usize, n: usize) -> Result<Self> {
        validate_density(&m, d, n)
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &[Complex64], d: usize, n: usize) -> Result<Self> {
        let v = DVector::from_column_slice(psi);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::ParamOutOfRange("zero state vector".into()));
        }
        let v = v.unscale(norm);
        validate_density(&(&v * v.adjoint()), d, n)
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[f64], d: usize, n: usize) -> Result<Self> {
        let m = CMatrix::from_diagonal(&DVector::from_iterator(
            probs.len(),
            probs.iter().map(|&p| c64(p, 0.0)),
        ));
        validate_density(&m, d, n)
    }

    pub fn maximally_mixed(d: usize, n: usize) -> Result<Self> {
        let dim = register_dim(d, n).ok_or(Error::DimNotPower { dim: 0, d })?;
        Self::new(identity(dim).unscale(dim as f64), d, n)
    }

    /// Computational basis state `|index⟩⟨index|`.
    pub fn basis(index: usize, d: usize, n: usize) -> Result<Self> {
        let dim = register_dim(d, n).ok_or(Error::DimNotPower { dim: 0, d })?;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, num_qudits: n });
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(index, index)] = c64(1.0, 0.0);
        Ok(DensityMatrix { d, n, entries: m })
    }

    /// Wraps a matrix already known to satisfy the invariants (internal use
    /// for outputs of trace- and positivity-preserving maps).
    pub(crate) fn from_trusted(entries: CMatrix, d: usize, n: usize) -> Self {
        DensityMatrix { d, n, entries }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_matrix(self) -> CMatrix {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn qudit_dim(&self) -> usize {
        self.d
    }

    pub fn num_qudits(&self) -> usize {
        self.n
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::of(&self.entries)
    }

    /// Real parts of the diagonal entries.
    pub fn diagonal_probs(&self) -> Vec<f64> {
        self.entries.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn purity(&self) -> f64 {
        trace(&(&self.entries * &self.entries)).re
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> DensityMatrix {
        let out = hermitize(&(u * &self.entries * u.adjoint()));
        DensityMatrix { d: self.d, n: self.n, entries: out }
    }

    /// `(1-ε)ρ + ε I/dim`.
    pub fn mix_with_identity(&self, eps: f64) -> DensityMatrix {
        let dim = self.dim();
        let out = self.entries.scale(1.0 - eps) + identity(dim).scale(eps / dim as f64);
        DensityMatrix { d: self.d, n: self.n, entries: out }
    }

    /// `w ρ + (1-w) σ`.
    pub fn convex_mix(&self, other: &DensityMatrix, w: f64) -> Result<DensityMatrix> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: other.dim() });
        }
        let out = self.entries.scale(w) + other.entries.scale(1.0 - w);
        Ok(DensityMatrix { d: self.d, n: self.n, entries: out })
    }
}

/// A Hermitian operator on the full register, optionally remembering the
/// qudit subset it acts on nontrivially.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    entries: CMatrix,
    support: Option<Support>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Support {
    pub positions: Vec<usize>,
    pub qudit_dim: usize,
    pub num_qudits: usize,
}

impl Support {
    pub fn k(&self) -> usize {
        self.positions.len()
    }
}

impl HermitianOperator {
    /// A full-register operator without support metadata.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch { expected: m.nrows(), actual: m.ncols() });
        }
        let dev = hermitian_deviation(&m);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(HermitianOperator { entries: hermitize(&m), support: None })
    }

    /// Embeds a `k`-qudit operator at `positions` of an `n`-qudit register.
    pub fn local(op: &CMatrix, positions: &[usize], d: usize, n: usize) -> Result<Self> {
        let dev = hermitian_deviation(op);
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let entries = embed_local(&hermitize(op), positions, d, n)?;
        Ok(HermitianOperator {
            entries,
            support: Some(Support { positions: positions.to_vec(), qudit_dim: d, num_qudits: n }),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn support(&self) -> Option<&Support> {
        self.support.as_ref()
    }

    pub fn operator_norm(&self) -> f64 {
        let s = Spectrum::of(&self.entries);
        s.min().abs().max(s.max().abs())
    }

    /// `exp(-i t H)`.
    pub fn evolution(&self, t: f64) -> CMatrix {
        expm_i_hermitian(&self.entries, t)
    }
}

/// `exp(-i t H)` for Hermitian `H` via its spectral decomposition.
pub fn expm_i_hermitian(h: &CMatrix, t: f64) -> CMatrix {
    let s = Spectrum::of(h);
    let v = &s.eigenvectors;
    let mut scaled = v.clone();
    for (j, &lam) in s.eigenvalues.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -t * lam);
        for z in scaled.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    &scaled * v.adjoint()
}

fn check_psd(s: &Spectrum) -> Result<()> {
    if s.min() < -HERMITIAN_TOL {
        return Err(Error::NegativeEigenvalue { value: s.min() });
    }
    Ok(())
}

/// `A^α` for positive semidefinite `A`, taken on the support of `A`
/// (eigenvalues below [`SUPPORT_EPS`] are zero). Nonpositive exponents give
/// the Moore-Penrose convention: zero on the kernel.
pub fn hermitian_power(a: &CMatrix, alpha: f64) -> Result<CMatrix> {
    let s = Spectrum::of(a);
    check_psd(&s)?;
    Ok(spectral_power(&s, alpha))
}

pub(crate) fn spectral_power(s: &Spectrum, alpha: f64) -> CMatrix {
    s.map(|x| if x < SUPPORT_EPS { 0.0 } else { x.powf(alpha) })
}

/// `log A` on the support of a PSD matrix, in the given base.
pub fn hermitian_log(a: &CMatrix, base: LogBase) -> Result<CMatrix> {
    let s = Spectrum::of(a);
    check_psd(&s)?;
    Ok(s.map(|x| if x < SUPPORT_EPS { 0.0 } else { base.log(x) }))
}

/// Zeroes the off-diagonal entries.
pub fn dephase_matrix(a: &CMatrix) -> CMatrix {
    CMatrix::from_diagonal(&a.diagonal())
}

/// `(A + A^T)/2` with the transpose taken entrywise.
pub fn real_part_matrix(a: &CMatrix) -> CMatrix {
    (a + a.transpose()).scale(0.5)
}

/// Completely dephasing channel in the reference basis.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    let mut m = dephase_matrix(rho.matrix());
    for i in 0..m.nrows() {
        m[(i, i)].im = 0.0;
    }
    DensityMatrix::from_trusted(m, rho.d, rho.n)
}

/// `Δ₁(ρ) = (ρ + ρ^T)/2`, the real part of `ρ`.
pub fn real_projection(rho: &DensityMatrix) -> DensityMatrix {
    let m = rho.matrix().map(|z| c64(z.re, 0.0));
    DensityMatrix::from_trusted(m, rho.d, rho.n)
}

/// Shannon entropy of a probability vector; entries below [`SUPPORT_EPS`]
/// contribute zero.
pub fn shannon_entropy(probs: impl IntoIterator<Item = f64>, base: LogBase) -> f64 {
    let ln: f64 = probs
        .into_iter()
        .filter(|&p| p > SUPPORT_EPS)
        .map(|p| -p * p.ln())
        .sum();
    base.from_ln(ln)
}

pub fn von_neumann_entropy(rho: &DensityMatrix, base: LogBase) -> f64 {
    let s = rho.spectrum();
    shannon_entropy(s.eigenvalues.iter().copied(), base).max(0.0)
}

/// Schatten exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schatten {
    One,
    Two,
    Inf,
}

pub fn schatten_norm(a: &CMatrix, p: Schatten) -> f64 {
    match p {
        Schatten::Two => a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt(),
        Schatten::One => a.clone().singular_values().iter().sum(),
        Schatten::Inf => a.clone().singular_values().iter().fold(0.0, |m: f64, &x| m.max(x)),
    }
}

/// Digit of qudit `pos` in basis index `z` (qudit 0 most significant).
#[inline]
fn digit(z: usize, pos: usize, d: usize, n: usize) -> usize {
    (z / d.pow((n - 1 - pos) as u32)) % d
}

/// Places a `k`-qudit operator on `positions` of an `n`-qudit register with
/// identity on the complement. `positions[0]` is the most significant digit
/// of the local operator.
pub fn embed_local(op: &CMatrix, positions: &[usize], d: usize, n: usize) -> Result<CMatrix> {
    let k = positions.len();
    for (i, &p) in positions.iter().enumerate() {
        if p >= n {
            return Err(Error::IndexOutOfRange { index: p, num_qudits: n });
        }
        if positions[..i].contains(&p) {
            return Err(Error::ParamOutOfRange(format!("duplicate qudit position {p}")));
        }
    }
    let local_dim = register_dim(d, k).ok_or(Error::DimNotPower { dim: op.nrows(), d })?;
    if op.nrows() != local_dim || op.ncols() != local_dim {
        return Err(Error::DimensionMismatch { expected: local_dim, actual: op.nrows() });
    }
    let dim = register_dim(d, n).ok_or(Error::DimNotPower { dim: 0, d })?;
    let place = |pos: usize| d.pow((n - 1 - pos) as u32);
    let mut out = CMatrix::zeros(dim, dim);
    for row in 0..dim {
        let mut x = 0usize;
        let mut base = row;
        for &p in positions {
            let dg = digit(row, p, d, n);
            x = x * d + dg;
            base -= dg * place(p);
        }
        for xp in 0..local_dim {
            let val = op[(x, xp)];
            if val == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut col = base;
            let mut rem = xp;
            for &p in positions.iter().rev() {
                col += (rem % d) * place(p);
                rem /= d;
            }
            out[(row, col)] = val;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pauli_x() -> CMatrix {
        CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
    }

    fn plus() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[c64(s, 0.), c64(s, 0.)], 2, 1).unwrap()
    }

    #[test]
    fn maximally_mixed_qubit_is_valid() {
        let rho = DensityMatrix::new(identity(2).scale(0.5), 2, 1).unwrap();
        let s = rho.spectrum();
        assert_abs_diff_eq!(s.eigenvalues[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], 0.5, epsilon = 1e-14);
    }

    #[test]
    fn plus_state_is_rank_one() {
        let s = plus().spectrum();
        assert_abs_diff_eq!(s.eigenvalues[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.eigenvalues[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn trace_violation_reports_deviation() {
        let m = identity(2).scale(0.6);
        match validate_density(&m, 2, 1) {
            Err(Error::TraceNotOne { deviation }) => assert_abs_diff_eq!(deviation, 0.2, epsilon = 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_non_hermitian_and_non_psd() {
        let mut m = identity(2).scale(0.5);
        m[(0, 1)] = c64(0.1, 0.0);
        assert!(matches!(validate_density(&m, 2, 1), Err(Error::NotHermitian { .. })));
        let m = CMatrix::from_diagonal(&DVector::from_vec(vec![c64(1.5, 0.), c64(-0.5, 0.)]));
        assert!(matches!(validate_density(&m, 2, 1), Err(Error::NotPsd { .. })));
        assert!(matches!(
            validate_density(&identity(3).unscale(3.0), 2, 1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tiny_negative_eigenvalue_is_clamped() {
        let m = CMatrix::from_diagonal(&DVector::from_vec(vec![c64(1.0 + 5e-11, 0.), c64(-5e-11, 0.)]));
        let rho = validate_density(&m, 2, 1).unwrap();
        assert!(rho.spectrum().min() >= 0.0);
        assert_abs_diff_eq!(trace(rho.matrix()).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn power_examples() {
        let half = hermitian_power(&identity(2).scale(0.5), 0.5).unwrap();
        assert!(max_abs(&(half - identity(2).scale(std::f64::consts::FRAC_1_SQRT_2))) < 1e-14);

        let p = plus();
        for alpha in [0.3, 0.5, 1.7, 2.0] {
            let pa = hermitian_power(p.matrix(), alpha).unwrap();
            assert!(max_abs(&(pa - p.matrix())) < 1e-12);
        }

        let d = CMatrix::from_diagonal(&DVector::from_vec(vec![c64(0.9, 0.), c64(0.1, 0.)]));
        let r = hermitian_power(&d, 0.5).unwrap();
        assert_abs_diff_eq!(r[(0, 0)].re, 0.9f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(r[(1, 1)].re, 0.1f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(r[(0, 0)].re, 0.94868, epsilon = 1e-5);
        assert_abs_diff_eq!(r[(1, 1)].re, 0.31623, epsilon = 1e-5);
    }

    #[test]
    fn negative_power_is_pseudo_inverse_on_support() {
        let d = CMatrix::from_diagonal(&DVector::from_vec(vec![c64(0.25, 0.), c64(0.0, 0.)]));
        let inv = hermitian_power(&d, -1.0).unwrap();
        assert_abs_diff_eq!(inv[(0, 0)].re, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(inv[(1, 1)].re, 0.0, epsilon = 1e-12);
        let bad = CMatrix::from_diagonal(&DVector::from_vec(vec![c64(1.0, 0.), c64(-0.1, 0.)]));
        assert!(matches!(hermitian_power(&bad, 0.5), Err(Error::NegativeEigenvalue { .. })));
    }

    #[test]
    fn dephase_and_real_projection_examples() {
        let d = dephase(&plus());
        assert!(max_abs(&(d.matrix() - identity(2).scale(0.5))) < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let y_plus = DensityMatrix::pure(&[c64(s, 0.), c64(0., s)], 2, 1).unwrap();
        let r = real_projection(&y_plus);
        assert!(max_abs(&(r.matrix() - identity(2).scale(0.5))) < 1e-15);

        let t = CMatrix::from_diagonal(&DVector::from_vec(vec![
            c64(1., 0.),
            Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
        ]));
        let tp = plus().conjugate_by(&t);
        let r = real_projection(&tp);
        assert_abs_diff_eq!(r.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.matrix()[(0, 1)].re, 2f64.sqrt() / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.matrix()[(0, 1)].im, 0.0, epsilon = 0.0);
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(von_neumann_entropy(&plus(), LogBase::Two), 0.0, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2, 1).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&mixed, LogBase::Two), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(von_neumann_entropy(&mixed, LogBase::E), std::f64::consts::LN_2, epsilon = 1e-14);
        let q = 0.5 + 2f64.sqrt() / 4.0;
        let rho = DensityMatrix::diagonal(&[q, 1.0 - q], 2, 1).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&rho, LogBase::Two), 0.6009, epsilon = 5e-5);
    }

    #[test]
    fn schatten_examples() {
        assert_abs_diff_eq!(schatten_norm(&identity(3), Schatten::One), 3.0, epsilon = 1e-12);
        let d = CMatrix::from_diagonal(&DVector::from_vec(vec![c64(3., 0.), c64(-4., 0.)]));
        assert_abs_diff_eq!(schatten_norm(&d, Schatten::Inf), 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(schatten_norm(&d, Schatten::Two), 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(schatten_norm(plus().matrix(), Schatten::One), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn embedding_examples() {
        let x = pauli_x();
        let i2 = identity(2);
        assert_eq!(embed_local(&x, &[0], 2, 2).unwrap(), kron(&x, &i2));
        assert_eq!(embed_local(&x, &[1], 2, 2).unwrap(), kron(&i2, &x));
        assert!(matches!(embed_local(&x, &[2], 2, 2), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(embed_local(&x, &[0, 1], 2, 2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn cnot_embedding_matches_basis_action() {
        // control on qubit 2, target on qubit 0 of three qubits
        let mut cnot = CMatrix::zeros(4, 4);
        for (r, c) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            cnot[(r, c)] = c64(1.0, 0.0);
        }
        let full = embed_local(&cnot, &[2, 0], 2, 3).unwrap();
        for z in 0..8usize {
            let bits = [(z >> 2) & 1, (z >> 1) & 1, z & 1];
            let mut out = bits;
            if bits[2] == 1 {
                out[0] ^= 1;
            }
            let target = (out[0] << 2) | (out[1] << 1) | out[2];
            for row in 0..8 {
                let expected = if row == target { 1.0 } else { 0.0 };
                assert_eq!(full[(row, z)], c64(expected, 0.0));
            }
        }
    }

    #[test]
    fn evolution_of_pauli_x() {
        let h = HermitianOperator::new(pauli_x()).unwrap();
        let u = h.evolution(std::f64::consts::FRAC_PI_2);
        let expected = pauli_x().map(|z| z * c64(0.0, -1.0));
        assert!(max_abs(&(u - expected)) < 1e-14);
    }
}
