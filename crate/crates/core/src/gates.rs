//! Gate library and unitary file I/O.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c64, embed_local, identity, register_dim, schatten_norm, trace, CMatrix, DensityMatrix, Schatten};

pub const UNITARY_TOL: f64 = 1e-10;

/// A validated unitary on `n` qudits of dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    d: usize,
    n: usize,
    entries: CMatrix,
    label: String,
}

/// `‖U†U - I‖∞`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    schatten_norm(&(u.adjoint() * u - identity(u.nrows())), Schatten::Inf)
}

impl Unitary {
    pub fn new(entries: CMatrix, d: usize, n: usize, label: impl Into<String>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch { expected: entries.nrows(), actual: entries.ncols() });
        }
        if register_dim(d, n) != Some(entries.nrows()) {
            return Err(Error::DimNotPower { dim: entries.nrows(), d });
        }
        let deviation = unitarity_deviation(&entries);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Unitary { d, n, entries, label: label.into() })
    }

    /// Infers `n` from the dimension for a given qudit dimension.
    pub fn from_matrix(entries: CMatrix, d: usize, label: impl Into<String>) -> Result<Self> {
        let n = infer_qudits(entries.nrows(), d)?;
        Self::new(entries, d, n, label)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
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

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// `U ρ U†`.
    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        rho.conjugate_by(&self.entries)
    }

    /// `e^{iφ} U`.
    pub fn with_phase(&self, phi: f64) -> Unitary {
        let mut out = self.clone();
        out.entries *= Complex64::from_polar(1.0, phi);
        out
    }

    /// `U` placed on `positions` of an `n`-qudit register.
    pub fn embed(&self, positions: &[usize], n: usize) -> Result<Unitary> {
        let m = embed_local(&self.entries, positions, self.d, n)?;
        Ok(Unitary { d: self.d, n, entries: m, label: self.label.clone() })
    }

    /// Every entry has zero imaginary part.
    pub fn is_real(&self, tol: f64) -> bool {
        self.entries.iter().all(|z| z.im.abs() <= tol)
    }

    /// At most one nonzero entry per row.
    pub fn is_monomial(&self, tol: f64) -> bool {
        self.entries.row_iter().all(|r| r.iter().filter(|z| z.norm() > tol).count() <= 1)
    }
}

/// `min_φ ‖U - e^{iφ} V‖∞`, with `φ` aligned by the phase of `Tr(V†U)`.
pub fn phase_distance(u: &CMatrix, v: &CMatrix) -> f64 {
    let t = trace(&(v.adjoint() * u));
    let phase = if t.norm() > 0.0 { t / t.norm() } else { c64(1.0, 0.0) };
    schatten_norm(&(u - v * phase), Schatten::Inf)
}

fn infer_qudits(dim: usize, d: usize) -> Result<usize> {
    if d < 2 || dim == 0 {
        return Err(Error::DimNotPower { dim, d });
    }
    let mut n = 0;
    let mut p = 1usize;
    while p < dim {
        p = p.checked_mul(d).ok_or(Error::DimNotPower { dim, d })?;
        n += 1;
    }
    if p != dim {
        return Err(Error::DimNotPower { dim, d });
    }
    Ok(n)
}

/// Named gates of the fixture library.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum GateName {
    I,
    X,
    Y,
    Z,
    H,
    T,
    Cnot,
    Toffoli,
    SqrtSwap,
    Utheta(f64),
    Ut(f64),
    Qft(usize),
    /// Marked state defaults to `2^n - 1`.
    Grover { n: usize, marked: Option<usize> },
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateName::I => write!(f, "i"),
            GateName::X => write!(f, "x"),
            GateName::Y => write!(f, "y"),
            GateName::Z => write!(f, "z"),
            GateName::H => write!(f, "h"),
            GateName::T => write!(f, "t"),
            GateName::Cnot => write!(f, "cnot"),
            GateName::Toffoli => write!(f, "toffoli"),
            GateName::SqrtSwap => write!(f, "sqrtswap"),
            GateName::Utheta(th) => write!(f, "utheta:{th}"),
            GateName::Ut(t) => write!(f, "ut:{t}"),
            GateName::Qft(n) => write!(f, "qft:{n}"),
            GateName::Grover { n, marked: None } => write!(f, "grover:{n}"),
            GateName::Grover { n, marked: Some(m) } => write!(f, "grover:{n}:{m}"),
        }
    }
}

impl FromStr for GateName {
    type Err = Error;

    /// Grammar: `NAME`, `NAME:int`, `NAME:float`, and `grover:n:marked`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let name = parts.next().unwrap_or_default().to_ascii_lowercase();
        let args: Vec<&str> = parts.collect();
        let bad = |msg: &str| Error::Parse(format!("gate spec `{s}`: {msg}"));
        let no_args = |g: GateName| if args.is_empty() { Ok(g) } else { Err(bad("takes no parameter")) };
        let float = || -> Result<f64> {
            match args.as_slice() {
                [a] => a.parse::<f64>().map_err(|_| bad("parameter is not a number")),
                _ => Err(bad("expects exactly one parameter")),
            }
        };
        let int = |a: &str| a.parse::<usize>().map_err(|_| bad("parameter is not a nonnegative integer"));
        match name.as_str() {
            "i" | "id" | "identity" => no_args(GateName::I),
            "x" => no_args(GateName::X),
            "y" => no_args(GateName::Y),
            "z" => no_args(GateName::Z),
            "h" | "hadamard" => no_args(GateName::H),
            "t" => no_args(GateName::T),
            "cnot" | "cx" => no_args(GateName::Cnot),
            "toffoli" | "ccx" => no_args(GateName::Toffoli),
            "sqrtswap" => no_args(GateName::SqrtSwap),
            "utheta" => Ok(GateName::Utheta(float()?)),
            "ut" => Ok(GateName::Ut(float()?)),
            "qft" => match args.as_slice() {
                [a] => Ok(GateName::Qft(int(a)?)),
                _ => Err(bad("expects qft:n")),
            },
            "grover" => match args.as_slice() {
                [a] => Ok(GateName::Grover { n: int(a)?, marked: None }),
                [a, m] => Ok(GateName::Grover { n: int(a)?, marked: Some(int(m)?) }),
                _ => Err(bad("expects grover:n or grover:n:marked")),
            },
            _ => Err(bad("unknown gate name")),
        }
    }
}

fn m2(a: [Complex64; 4]) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &a)
}

fn permutation(dim: usize, map: impl Fn(usize) -> usize) -> CMatrix {
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        m[(map(col), col)] = c64(1.0, 0.0);
    }
    m
}

pub fn qft_matrix(n: usize) -> CMatrix {
    let dim = 1usize << n;
    let scale = 1.0 / (dim as f64).sqrt();
    CMatrix::from_fn(dim, dim, |j, k| {
        let phase = 2.0 * PI * ((j * k) % dim) as f64 / dim as f64;
        Complex64::from_polar(scale, phase)
    })
}

/// Builds a gate from the fixture library.
pub fn standard_gate(name: GateName) -> Result<Unitary> {
    let o = c64(0.0, 0.0);
    let l = c64(1.0, 0.0);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let (m, n) = match name {
        GateName::I => (identity(2), 1),
        GateName::X => (m2([o, l, l, o]), 1),
        GateName::Y => (m2([o, c64(0., -1.), c64(0., 1.), o]), 1),
        GateName::Z => (m2([l, o, o, -l]), 1),
        GateName::H => (m2([c64(s, 0.), c64(s, 0.), c64(s, 0.), c64(-s, 0.)]), 1),
        GateName::T => (m2([l, o, o, Complex64::from_polar(1.0, PI / 4.0)]), 1),
        GateName::Cnot => (permutation(4, |c| if c >= 2 { c ^ 1 } else { c }), 2),
        GateName::Toffoli => (permutation(8, |c| if c >= 6 { c ^ 1 } else { c }), 3),
        GateName::SqrtSwap => {
            let a = c64(0.5, 0.5);
            let b = c64(0.5, -0.5);
            (CMatrix::from_row_slice(4, 4, &[l, o, o, o, o, a, b, o, o, b, a, o, o, o, o, l]), 2)
        }
        GateName::Utheta(th) => {
            if !(0.0..=PI).contains(&th) {
                return Err(Error::ParamOutOfRange(format!("theta = {th} outside [0, pi]")));
            }
            let (sn, cs) = th.sin_cos();
            (m2([c64(cs, 0.), c64(sn, 0.), c64(-sn, 0.), c64(cs, 0.)]), 1)
        }
        GateName::Ut(t) => {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::ParamOutOfRange(format!("t = {t} outside [0, 1]")));
            }
            let a = c64(t.sqrt(), 0.0);
            let b = c64(0.0, (1.0 - t).sqrt());
            let c = a + b;
            (CMatrix::from_row_slice(4, 4, &[c, o, o, o, o, a, b, o, o, b, a, o, o, o, o, c]), 2)
        }
        GateName::Qft(n) => {
            if n == 0 || n > 10 {
                return Err(Error::ParamOutOfRange(format!("qft size n = {n} outside [1, 10]")));
            }
            (qft_matrix(n), n)
        }
        GateName::Grover { n, marked } => {
            if n == 0 || n > 10 {
                return Err(Error::ParamOutOfRange(format!("grover size n = {n} outside [1, 10]")));
            }
            let dim = 1usize << n;
            let m = marked.unwrap_or(dim - 1);
            if m >= dim {
                return Err(Error::ParamOutOfRange(format!("marked state {m} outside [0, {dim})")));
            }
            let mut oracle = identity(dim);
            oracle[(m, m)] = -l;
            let diffusion = CMatrix::from_element(dim, dim, c64(2.0 / dim as f64, 0.0)) - identity(dim);
            (diffusion * oracle, n)
        }
    };
    Unitary::new(m, 2, n, name.to_string())
}

/// Parses a gate spec such as `qft:5` and builds it.
pub fn gate_from_spec(spec: &str) -> Result<Unitary> {
    standard_gate(spec.parse()?)
}

#[derive(Debug, Serialize, Deserialize)]
struct UnitaryFile {
    d: usize,
    n: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
    #[serde(default)]
    label: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvEntry {
    row: usize,
    col: usize,
    re: f64,
    im: f64,
}

fn is_csv(path: &Path) -> bool {
    path.extension().and_then(|e| e.to_str()).is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads a unitary from JSON (`{"d","n","re","im","label"}`) or, for a
/// `.csv` extension, from `row,col,re,im` quadruples on qubits.
pub fn load_unitary(path: impl AsRef<Path>) -> Result<Unitary> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    if is_csv(path) {
        let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("unitary").to_string();
        return parse_csv(&text, label);
    }
    let file: UnitaryFile = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    let rows = file.re.len();
    if file.im.len() != rows || file.re.iter().chain(file.im.iter()).any(|r| r.len() != rows) {
        return Err(Error::Parse("re and im must be square matrices of equal size".into()));
    }
    let m = CMatrix::from_fn(rows, rows, |i, j| c64(file.re[i][j], file.im[i][j]));
    Unitary::new(m, file.d, file.n, file.label)
}

fn parse_csv(text: &str, label: String) -> Result<Unitary> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut entries = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if i == 0 && record.get(0).is_some_and(|f| f.eq_ignore_ascii_case("row")) {
            continue;
        }
        let e: CsvEntry = record.deserialize(None).map_err(|e| Error::Parse(e.to_string()))?;
        entries.push(e);
    }
    let dim = entries.iter().map(|e| e.row.max(e.col) + 1).max().unwrap_or(0);
    if dim == 0 {
        return Err(Error::Parse("empty unitary file".into()));
    }
    let mut m = CMatrix::zeros(dim, dim);
    for e in entries {
        m[(e.row, e.col)] = c64(e.re, e.im);
    }
    Unitary::from_matrix(m, 2, label)
}

/// Writes a unitary in the format chosen by the path extension.
pub fn save_unitary(u: &Unitary, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if is_csv(path) {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
        for row in 0..u.dim() {
            for col in 0..u.dim() {
                let z = u.entries[(row, col)];
                w.serialize(CsvEntry { row, col, re: z.re, im: z.im }).map_err(|e| Error::Io(e.to_string()))?;
            }
        }
        w.flush()?;
        return Ok(());
    }
    let dim = u.dim();
    let file = UnitaryFile {
        d: u.d,
        n: u.n,
        re: (0..dim).map(|i| (0..dim).map(|j| u.entries[(i, j)].re).collect()).collect(),
        im: (0..dim).map(|i| (0..dim).map(|j| u.entries[(i, j)].im).collect()).collect(),
        label: u.label.clone(),
    };
    let text = serde_json::to_string_pretty(&file).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn every_standard_gate_is_unitary() {
        for spec in [
            "i", "x", "y", "z", "h", "t", "cnot", "toffoli", "sqrtswap", "utheta:0.3", "ut:0.4", "qft:1", "qft:3",
            "grover:2", "grover:3:1",
        ] {
            let u = gate_from_spec(spec).unwrap();
            assert!(unitarity_deviation(u.matrix()) < 1e-12, "{spec}");
            assert_eq!(u.label(), spec);
        }
    }

    #[test]
    fn parameter_examples() {
        let u0 = standard_gate(GateName::Utheta(0.0)).unwrap();
        assert!(max_abs(&(u0.matrix() - identity(2))) < 1e-15);
        let u1 = standard_gate(GateName::Ut(1.0)).unwrap();
        assert!(max_abs(&(u1.matrix() - identity(4))) < 1e-15);
        let q1 = standard_gate(GateName::Qft(1)).unwrap();
        let h = standard_gate(GateName::H).unwrap();
        assert!(max_abs(&(q1.matrix() - h.matrix())) < 1e-15);
        assert!(standard_gate(GateName::Utheta(4.0)).is_err());
        assert!(standard_gate(GateName::Ut(-0.1)).is_err());
        assert!(standard_gate(GateName::Grover { n: 2, marked: Some(4) }).is_err());
    }

    #[test]
    fn grover_is_real_and_marks_last_state_by_default() {
        let g = standard_gate(GateName::Grover { n: 3, marked: None }).unwrap();
        assert!(g.is_real(0.0));
        let g7 = standard_gate(GateName::Grover { n: 3, marked: Some(7) }).unwrap();
        assert_eq!(g.matrix(), g7.matrix());
    }

    #[test]
    fn cnot_and_toffoli_flip_the_target() {
        let c = standard_gate(GateName::Cnot).unwrap();
        assert_eq!(c.matrix()[(3, 2)], c64(1.0, 0.0));
        let t = standard_gate(GateName::Toffoli).unwrap();
        assert_eq!(t.matrix()[(7, 6)], c64(1.0, 0.0));
        assert!(c.is_monomial(0.0) && t.is_monomial(0.0));
    }

    #[test]
    fn spec_parsing() {
        assert_eq!("QFT:5".parse::<GateName>().unwrap(), GateName::Qft(5));
        assert_eq!(
            "utheta:0.7853981633974483".parse::<GateName>().unwrap(),
            GateName::Utheta(std::f64::consts::FRAC_PI_4)
        );
        assert_eq!("grover:5:3".parse::<GateName>().unwrap(), GateName::Grover { n: 5, marked: Some(3) });
        for bad in ["", "foo", "qft", "qft:x", "h:1", "ut:1:2"] {
            assert!(matches!(bad.parse::<GateName>(), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn json_and_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for (gate, file) in [("h", "h.json"), ("qft:3", "f.json"), ("t", "t.csv"), ("sqrtswap", "s.csv")] {
            let u = gate_from_spec(gate).unwrap();
            let path = dir.path().join(file);
            save_unitary(&u, &path).unwrap();
            let back = load_unitary(&path).unwrap();
            assert!(max_abs(&(back.matrix() - u.matrix())) <= 1e-15);
            if file.ends_with(".json") {
                assert_eq!(back.label(), gate);
            }
        }
    }

    #[test]
    fn malformed_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.json");
        std::fs::write(&p, r#"{"d":2,"n":1,"re":[[1,0],[0,2]],"im":[[0,0],[0,0]],"label":"x"}"#).unwrap();
        assert!(matches!(load_unitary(&p), Err(Error::NotUnitary { .. })));
        std::fs::write(&p, r#"{"d":2,"n":2,"re":[[1,0],[0,1]],"im":[[0,0],[0,0]]}"#).unwrap();
        assert!(matches!(load_unitary(&p), Err(Error::DimNotPower { .. })));
        std::fs::write(&p, "not json").unwrap();
        assert!(matches!(load_unitary(&p), Err(Error::Parse(_))));
        let c = dir.path().join("bad.csv");
        std::fs::write(&c, "0,0,1,0\n1,1,1,0\n2,2,1,0\n").unwrap();
        assert!(matches!(load_unitary(&c), Err(Error::DimNotPower { .. })));
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let h = standard_gate(GateName::H).unwrap();
        let hp = h.with_phase(1.234);
        assert!(phase_distance(hp.matrix(), h.matrix()) < 1e-14);
        let x = standard_gate(GateName::X).unwrap();
        assert!(phase_distance(x.matrix(), h.matrix()) > 0.1);
    }
}
