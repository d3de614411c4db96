//! Gates and ordered gate programs with named angle slots.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::Pauli;

/// Named angle table in radians.
pub type Angles = BTreeMap<String, f64>;

/// Gate angle: either a literal or a named slot resolved at execution time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Angle {
    Fixed(f64),
    Param(String),
}

impl Angle {
    pub fn param(name: &str) -> Self {
        Angle::Param(name.to_string())
    }

    pub fn resolve(&self, bindings: &Angles) -> Result<f64> {
        match self {
            Angle::Fixed(v) => Ok(*v),
            Angle::Param(name) => bindings
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnboundParameter(name.clone())),
        }
    }
}

impl From<f64> for Angle {
    fn from(v: f64) -> Self {
        Angle::Fixed(v)
    }
}

impl From<&str> for Angle {
    fn from(name: &str) -> Self {
        Angle::param(name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    /// `X_{π/2} = RX(π/2)`.
    XHalf,
    Rx(Angle),
    Ry(Angle),
    Rz(Angle),
    /// `diag(1, e^{iθ})`.
    Phase(Angle),
    /// Targets `(control, target)`.
    Cnot,
    Cz,
    /// Acts on the `{|01⟩, |10⟩}` block as `[[1, i], [i, 1]] / √2`.
    SqrtISwap,
    SqrtISwapDag,
    /// Targets `(control, t_1, …, t_k)`; applies the word to `t_1…t_k` when the
    /// control is `|1⟩`.
    ControlledPauli(Vec<Pauli>),
}

impl GateKind {
    fn arity(&self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz | GateKind::SqrtISwap | GateKind::SqrtISwapDag => 2,
            GateKind::ControlledPauli(word) => word.len() + 1,
            _ => 1,
        }
    }

    fn angle(&self) -> Option<&Angle> {
        match self {
            GateKind::Rx(a) | GateKind::Ry(a) | GateKind::Rz(a) | GateKind::Phase(a) => Some(a),
            _ => None,
        }
    }

    fn mnemonic(&self) -> String {
        match self {
            GateKind::X => "X".into(),
            GateKind::Y => "Y".into(),
            GateKind::Z => "Z".into(),
            GateKind::H => "H".into(),
            GateKind::XHalf => "XHALF".into(),
            GateKind::Rx(_) => "RX".into(),
            GateKind::Ry(_) => "RY".into(),
            GateKind::Rz(_) => "RZ".into(),
            GateKind::Phase(_) => "PHASE".into(),
            GateKind::Cnot => "CNOT".into(),
            GateKind::Cz => "CZ".into(),
            GateKind::SqrtISwap => "SQISWAP".into(),
            GateKind::SqrtISwapDag => "SQISWAPDG".into(),
            GateKind::ControlledPauli(w) => {
                format!("CPAULI:{}", w.iter().map(|p| p.symbol()).collect::<String>())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Self {
        Self { kind, targets }
    }

    pub fn x(q: usize) -> Self {
        Self::new(GateKind::X, vec![q])
    }
    pub fn h(q: usize) -> Self {
        Self::new(GateKind::H, vec![q])
    }
    pub fn x_half(q: usize) -> Self {
        Self::new(GateKind::XHalf, vec![q])
    }
    pub fn rx(q: usize, a: impl Into<Angle>) -> Self {
        Self::new(GateKind::Rx(a.into()), vec![q])
    }
    pub fn ry(q: usize, a: impl Into<Angle>) -> Self {
        Self::new(GateKind::Ry(a.into()), vec![q])
    }
    pub fn rz(q: usize, a: impl Into<Angle>) -> Self {
        Self::new(GateKind::Rz(a.into()), vec![q])
    }
    pub fn phase(q: usize, a: impl Into<Angle>) -> Self {
        Self::new(GateKind::Phase(a.into()), vec![q])
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::new(GateKind::Cnot, vec![control, target])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::new(GateKind::Cz, vec![a, b])
    }
    pub fn sqrt_iswap(a: usize, b: usize) -> Self {
        Self::new(GateKind::SqrtISwap, vec![a, b])
    }
    pub fn controlled_pauli(control: usize, targets: &[usize], word: Vec<Pauli>) -> Self {
        let mut t = vec![control];
        t.extend_from_slice(targets);
        Self::new(GateKind::ControlledPauli(word), t)
    }

    pub fn check(&self, n: usize) -> Result<()> {
        let bad = || Error::InvalidTarget { targets: self.targets.clone(), n };
        if self.targets.len() != self.kind.arity() {
            return Err(bad());
        }
        for (i, &t) in self.targets.iter().enumerate() {
            if t >= n || self.targets[..i].contains(&t) {
                return Err(bad());
            }
        }
        Ok(())
    }

    /// Parameter slot referenced by this gate, if any.
    pub fn slot(&self) -> Option<&str> {
        match self.kind.angle() {
            Some(Angle::Param(name)) => Some(name),
            _ => None,
        }
    }

    /// Local unitary on the gate's targets; `targets[0]` is the most significant
    /// factor.
    pub fn matrix(&self, bindings: &Angles) -> Result<DMatrix<Complex64>> {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let m2 = |a: [[Complex64; 2]; 2]| DMatrix::from_fn(2, 2, |r, col| a[r][col]);
        let rx = |t: f64| {
            let (s, co) = (t / 2.0).sin_cos();
            m2([[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]])
        };
        Ok(match &self.kind {
            GateKind::X => m2(Pauli::X.matrix()),
            GateKind::Y => m2(Pauli::Y.matrix()),
            GateKind::Z => m2(Pauli::Z.matrix()),
            GateKind::H => {
                let h = c(FRAC_1_SQRT_2, 0.0);
                m2([[h, h], [h, -h]])
            }
            GateKind::XHalf => rx(FRAC_PI_2),
            GateKind::Rx(a) => rx(a.resolve(bindings)?),
            GateKind::Ry(a) => {
                let (s, co) = (a.resolve(bindings)? / 2.0).sin_cos();
                m2([[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]])
            }
            GateKind::Rz(a) => {
                let t = a.resolve(bindings)?;
                m2([[Complex64::from_polar(1.0, -t / 2.0), z], [z, Complex64::from_polar(1.0, t / 2.0)]])
            }
            GateKind::Phase(a) => {
                let t = a.resolve(bindings)?;
                m2([[one, z], [z, Complex64::from_polar(1.0, t)]])
            }
            GateKind::Cnot => {
                let mut m = DMatrix::identity(4, 4);
                m[(2, 2)] = z;
                m[(3, 3)] = z;
                m[(2, 3)] = one;
                m[(3, 2)] = one;
                m
            }
            GateKind::Cz => {
                let mut m = DMatrix::identity(4, 4);
                m[(3, 3)] = -one;
                m
            }
            GateKind::SqrtISwap | GateKind::SqrtISwapDag => {
                let sign = if self.kind == GateKind::SqrtISwap { 1.0 } else { -1.0 };
                let mut m = DMatrix::identity(4, 4);
                m[(1, 1)] = c(FRAC_1_SQRT_2, 0.0);
                m[(2, 2)] = c(FRAC_1_SQRT_2, 0.0);
                m[(1, 2)] = c(0.0, sign * FRAC_1_SQRT_2);
                m[(2, 1)] = c(0.0, sign * FRAC_1_SQRT_2);
                m
            }
            GateKind::ControlledPauli(word) => {
                let mut p = DMatrix::from_element(1, 1, one);
                for q in word {
                    p = p.kronecker(&m2(q.matrix()));
                }
                let d = p.nrows();
                let mut m = DMatrix::identity(2 * d, 2 * d);
                m.view_mut((d, d), (d, d)).copy_from(&p);
                m
            }
        })
    }

    /// Adjoint gate; angle slots must already be bound.
    pub fn inverse(&self) -> Result<Gate> {
        let neg = |a: &Angle| match a {
            Angle::Fixed(v) => Ok(Angle::Fixed(-v)),
            Angle::Param(name) => Err(Error::UnboundParameter(name.clone())),
        };
        let kind = match &self.kind {
            GateKind::XHalf => GateKind::Rx(Angle::Fixed(-FRAC_PI_2)),
            GateKind::Rx(a) => GateKind::Rx(neg(a)?),
            GateKind::Ry(a) => GateKind::Ry(neg(a)?),
            GateKind::Rz(a) => GateKind::Rz(neg(a)?),
            GateKind::Phase(a) => GateKind::Phase(neg(a)?),
            GateKind::SqrtISwap => GateKind::SqrtISwapDag,
            GateKind::SqrtISwapDag => GateKind::SqrtISwap,
            other => other.clone(),
        };
        Ok(Gate { kind, targets: self.targets.clone() })
    }

    fn bind(&self, bindings: &Angles) -> Result<Gate> {
        let fix = |a: &Angle| a.resolve(bindings).map(Angle::Fixed);
        let kind = match &self.kind {
            GateKind::Rx(a) => GateKind::Rx(fix(a)?),
            GateKind::Ry(a) => GateKind::Ry(fix(a)?),
            GateKind::Rz(a) => GateKind::Rz(fix(a)?),
            GateKind::Phase(a) => GateKind::Phase(fix(a)?),
            other => other.clone(),
        };
        Ok(Gate { kind, targets: self.targets.clone() })
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.mnemonic())?;
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        match self.kind.angle() {
            Some(Angle::Fixed(v)) => write!(f, " {v:e}"),
            Some(Angle::Param(name)) => write!(f, " {name}"),
            None => Ok(()),
        }
    }
}

/// Ordered gate list over `n` qubits with its declared parameter names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
    parameters: Vec<String>,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "circuit needs at least one qubit");
        Self { n, gates: Vec::new(), parameters: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Declared parameter names in first-use order.
    pub fn parameters(&self) -> &[String] {
        &self.parameters
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.check(self.n)?;
        if let Some(name) = gate.slot() {
            if !self.parameters.iter().any(|p| p == name) {
                self.parameters.push(name.to_string());
            }
        }
        self.gates.push(gate);
        Ok(self)
    }

    pub fn with(mut self, gate: Gate) -> Result<Self> {
        self.push(gate)?;
        Ok(self)
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        for g in &other.gates {
            self.push(g.clone())?;
        }
        Ok(())
    }

    /// Fails with the first declared parameter absent from `bindings`.
    pub fn check_bound(&self, bindings: &Angles) -> Result<()> {
        match self.parameters.iter().find(|p| !bindings.contains_key(*p)) {
            Some(p) => Err(Error::UnboundParameter(p.clone())),
            None => Ok(()),
        }
    }

    /// Copy with every slot replaced by its bound value.
    pub fn bind(&self, bindings: &Angles) -> Result<Circuit> {
        self.check_bound(bindings)?;
        Ok(Circuit {
            n: self.n,
            gates: self.gates.iter().map(|g| g.bind(bindings)).collect::<Result<_>>()?,
            parameters: Vec::new(),
        })
    }

    /// `U†` of a fully bound circuit.
    pub fn inverse(&self) -> Result<Circuit> {
        Ok(Circuit {
            n: self.n,
            gates: self.gates.iter().rev().map(Gate::inverse).collect::<Result<_>>()?,
            parameters: Vec::new(),
        })
    }

    /// Same gates on a larger register (new qubits appended on the right).
    pub fn widen(&self, n: usize) -> Result<Circuit> {
        if n < self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: n });
        }
        Ok(Circuit { n, gates: self.gates.clone(), parameters: self.parameters.clone() })
    }

    /// Debug dump, one `KIND targets... [param]` line per gate.
    pub fn to_text(&self) -> String {
        let mut s = format!("# qubits {}\n", self.n);
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }
}
