//! Ansatz library.
//!
//! Qubit 0 is the leftmost tensor factor everywhere, so on two qubits `|01⟩`
//! means qubit 0 in `|0⟩` and qubit 1 in `|1⟩`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{Circuit, Gate};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AnsatzKind {
    /// `layers` RY layers on every qubit with linear √iSWAP chains between them.
    HardwareEfficient { layers: usize },
    /// Fixed circuit preparing `(|01⟩ + |10⟩)/√2` on qubits 0 and 1.
    SingletPair,
    /// One-angle family `sin(θ/2)|01⟩ − cos(θ/2)|10⟩` (global phase aside) on
    /// qubits 0 and 1, built from two √iSWAPs around an RZ.
    SingletRotation,
    /// Real one-angle family `cos(φ/2)(|00⟩+|11⟩)/√2 + sin(φ/2)(|01⟩+|10⟩)/√2`
    /// on qubits 0 and 1, symmetric under exchange and under `X⊗X`.
    SymmetricPair,
    /// `cos(θ/2)|a⟩ + e^{iφ} sin(θ/2)|b⟩` over two basis states.
    TwoAngleCo { a: Vec<bool>, b: Vec<bool> },
    /// Computational basis state with the listed qubits set.
    Reference { occupied: Vec<usize> },
    Custom(Circuit),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    pub n: usize,
}

fn bits_text(b: &[bool]) -> String {
    b.iter().map(|&x| if x { '1' } else { '0' }).collect()
}

/// Parses a bitstring like `0110` (qubit 0 first).
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::InvalidSpec(format!("`{s}` is not a bitstring"))),
        })
        .collect()
}

impl fmt::Display for AnsatzSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            AnsatzKind::HardwareEfficient { layers } => write!(f, "hardware_efficient({layers})"),
            AnsatzKind::SingletPair => write!(f, "singlet_pair"),
            AnsatzKind::SingletRotation => write!(f, "singlet_rotation"),
            AnsatzKind::SymmetricPair => write!(f, "symmetric_pair"),
            AnsatzKind::TwoAngleCo { a, b } => write!(f, "two_angle({},{})", bits_text(a), bits_text(b)),
            AnsatzKind::Reference { occupied } => {
                let idx: Vec<String> = occupied.iter().map(|q| q.to_string()).collect();
                write!(f, "reference({})", idx.join(","))
            }
            AnsatzKind::Custom(c) => write!(f, "custom({} gates)", c.gates().len()),
        }
    }
}

impl AnsatzSpec {
    pub fn new(kind: AnsatzKind, n: usize) -> Self {
        Self { kind, n }
    }

    pub fn hardware_efficient(n: usize, layers: usize) -> Self {
        Self::new(AnsatzKind::HardwareEfficient { layers }, n)
    }

    pub fn singlet_pair() -> Self {
        Self::new(AnsatzKind::SingletPair, 2)
    }

    pub fn singlet_rotation() -> Self {
        Self::new(AnsatzKind::SingletRotation, 2)
    }

    pub fn symmetric_pair() -> Self {
        Self::new(AnsatzKind::SymmetricPair, 2)
    }

    pub fn two_angle(a: &str, b: &str) -> Result<Self> {
        let (a, b) = (parse_bits(a)?, parse_bits(b)?);
        let n = a.len();
        Ok(Self::new(AnsatzKind::TwoAngleCo { a, b }, n))
    }

    pub fn reference(n: usize, occupied: &[usize]) -> Self {
        Self::new(AnsatzKind::Reference { occupied: occupied.to_vec() }, n)
    }

    pub fn custom(c: Circuit) -> Self {
        let n = c.n();
        Self::new(AnsatzKind::Custom(c), n)
    }

    /// Parses the textual form produced by `Display` (without `custom`).
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let t = text.trim();
        let (head, args) = match t.find('(') {
            Some(i) if t.ends_with(')') => (&t[..i], Some(&t[i + 1..t.len() - 1])),
            _ => (t, None),
        };
        let args: Vec<&str> = args
            .map(|a| a.split(',').map(str::trim).filter(|s| !s.is_empty()).collect())
            .unwrap_or_default();
        let bad = || Error::InvalidSpec(format!("unrecognized ansatz `{t}`"));
        let spec = match (head.trim(), args.as_slice()) {
            ("hardware_efficient", [l]) => {
                let layers = l.parse().map_err(|_| bad())?;
                Self::hardware_efficient(n, layers)
            }
            ("singlet_pair", []) => Self::new(AnsatzKind::SingletPair, n),
            ("singlet_rotation", []) => Self::new(AnsatzKind::SingletRotation, n),
            ("symmetric_pair", []) => Self::new(AnsatzKind::SymmetricPair, n),
            ("two_angle", [a, b]) => Self::new(AnsatzKind::TwoAngleCo { a: parse_bits(a)?, b: parse_bits(b)? }, n),
            ("reference", idx) => {
                let occupied: Vec<usize> = idx.iter().map(|s| s.parse().map_err(|_| bad())).collect::<Result<_>>()?;
                Self::reference(n, &occupied)
            }
            _ => return Err(bad()),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.n == 0 {
            return bad("ansatz needs at least one qubit".into());
        }
        match &self.kind {
            AnsatzKind::HardwareEfficient { layers } if *layers == 0 => bad("hardware-efficient ansatz needs ≥ 1 layer".into()),
            AnsatzKind::SingletPair | AnsatzKind::SingletRotation | AnsatzKind::SymmetricPair if self.n < 2 => {
                bad(format!("{self} needs at least 2 qubits, register has {}", self.n))
            }
            AnsatzKind::TwoAngleCo { a, b } => {
                if a.len() != self.n || b.len() != self.n {
                    bad(format!("two-angle bitstrings must have {} bits", self.n))
                } else if a == b {
                    bad("two-angle ansatz needs two distinct basis states".into())
                } else {
                    Ok(())
                }
            }
            AnsatzKind::Reference { occupied } => match occupied.iter().find(|&&q| q >= self.n) {
                Some(&q) => Err(Error::InvalidTarget { targets: vec![q], n: self.n }),
                None => Ok(()),
            },
            AnsatzKind::Custom(c) if c.n() != self.n => Err(Error::DimensionMismatch { expected: self.n, found: c.n() }),
            _ => Ok(()),
        }
    }

    /// Parameter names in the order optimizers see them.
    pub fn parameter_names(&self) -> Result<Vec<String>> {
        Ok(self.build()?.parameters().to_vec())
    }

    pub fn build(&self) -> Result<Circuit> {
        build_ansatz(self)
    }
}

pub fn build_ansatz(spec: &AnsatzSpec) -> Result<Circuit> {
    spec.validate()?;
    let n = spec.n;
    let mut c = Circuit::new(n);
    match &spec.kind {
        AnsatzKind::HardwareEfficient { layers } => {
            for l in 0..*layers {
                if l > 0 {
                    for q in 0..n.saturating_sub(1) {
                        c.push(Gate::sqrt_iswap(q, q + 1))?;
                    }
                }
                for q in 0..n {
                    c.push(Gate::ry(q, format!("t{l}_{q}").as_str()))?;
                }
            }
        }
        AnsatzKind::SingletPair => {
            c.push(Gate::x(1))?;
            c.push(Gate::sqrt_iswap(0, 1))?;
            c.push(Gate::phase(0, -FRAC_PI_2))?;
        }
        AnsatzKind::SingletRotation => {
            c.push(Gate::x(1))?;
            c.push(Gate::sqrt_iswap(0, 1))?;
            c.push(Gate::rz(0, "theta"))?;
            c.push(Gate::sqrt_iswap(0, 1))?;
        }
        AnsatzKind::SymmetricPair => {
            c.push(Gate::h(0))?;
            c.push(Gate::ry(1, "phi"))?;
            c.push(Gate::cnot(0, 1))?;
        }
        AnsatzKind::TwoAngleCo { a, b } => {
            let p = (0..n).find(|&q| a[q] != b[q]).expect("validated distinct");
            c.push(Gate::ry(p, "theta"))?;
            c.push(Gate::phase(p, "phi"))?;
            for q in (0..n).filter(|&q| q != p) {
                if a[q] {
                    c.push(Gate::x(q))?;
                }
                if a[q] != b[q] {
                    c.push(Gate::cnot(p, q))?;
                }
            }
            if a[p] {
                c.push(Gate::x(p))?;
            }
        }
        AnsatzKind::Reference { occupied } => return hf_reference(n, occupied),
        AnsatzKind::Custom(custom) => return Ok(custom.clone()),
    }
    Ok(c)
}

/// X gates on the occupied qubits.
pub fn hf_reference(n: usize, occupied: &[usize]) -> Result<Circuit> {
    let mut c = Circuit::new(n);
    for &q in occupied {
        if q >= n {
            return Err(Error::InvalidTarget { targets: vec![q], n });
        }
        c.push(Gate::x(q))?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{run_circuit, Angles};
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn angles(pairs: &[(&str, f64)]) -> Angles {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn close(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn singlet_pair_amplitudes() {
        let c = build_ansatz(&AnsatzSpec::singlet_pair()).unwrap();
        let sv = run_circuit(&c, &Angles::new()).unwrap();
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        assert!(close(sv.amplitudes(), &[z, h, h, z], 1e-15));
    }

    #[test]
    fn singlet_rotation_family() {
        let c = build_ansatz(&AnsatzSpec::singlet_rotation()).unwrap();
        assert_eq!(c.parameters(), &["theta".to_string()]);
        for theta in [0.0, 0.4, 2.0, 5.5] {
            let sv = run_circuit(&c, &angles(&[("theta", theta)])).unwrap();
            let (s, co) = (theta / 2.0).sin_cos();
            let mi = Complex64::new(0.0, -1.0);
            let want = [Complex64::new(0.0, 0.0), mi * s, -mi * co, Complex64::new(0.0, 0.0)];
            assert!(close(sv.amplitudes(), &want, 1e-14));
        }
    }

    #[test]
    fn symmetric_pair_family() {
        let c = AnsatzSpec::symmetric_pair().build().unwrap();
        let sv = run_circuit(&c, &angles(&[("phi", 1.1)])).unwrap();
        let (co, s) = ((1.1f64 / 2.0).cos() * FRAC_1_SQRT_2, (1.1f64 / 2.0).sin() * FRAC_1_SQRT_2);
        let want = [co, s, s, co].map(|v| Complex64::new(v, 0.0));
        assert!(close(sv.amplitudes(), &want, 1e-14));
    }

    #[test]
    fn two_angle_endpoints() {
        let spec = AnsatzSpec::two_angle("1100", "1010").unwrap();
        let c = spec.build().unwrap();
        assert_eq!(c.parameters(), &["theta".to_string(), "phi".to_string()]);
        let sv = run_circuit(&c, &angles(&[("theta", 0.0), ("phi", 1.3)])).unwrap();
        assert!((sv.amplitudes()[0b1100].norm() - 1.0).abs() < 1e-15);

        let sv = run_circuit(&c, &angles(&[("theta", PI / 2.0), ("phi", PI / 2.0)])).unwrap();
        let mut want = vec![Complex64::new(0.0, 0.0); 16];
        want[0b1100] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        want[0b1010] = Complex64::new(0.0, FRAC_1_SQRT_2);
        assert!(close(sv.amplitudes(), &want, 1e-15));
    }

    #[test]
    fn two_angle_with_first_difference_set_in_a() {
        let spec = AnsatzSpec::two_angle("101", "011").unwrap();
        let sv = run_circuit(&spec.build().unwrap(), &angles(&[("theta", 1.0), ("phi", -0.7)])).unwrap();
        let a = sv.amplitudes()[0b101];
        let b = sv.amplitudes()[0b011];
        assert!((a - Complex64::new(0.5f64.cos(), 0.0)).norm() < 1e-15);
        assert!((b - Complex64::from_polar(0.5f64.sin(), -0.7)).norm() < 1e-15);
    }

    #[test]
    fn hardware_efficient_parameter_count() {
        for (n, l) in [(1, 1), (2, 3), (4, 2)] {
            let c = AnsatzSpec::hardware_efficient(n, l).build().unwrap();
            assert_eq!(c.parameters().len(), n * l);
        }
        assert!(AnsatzSpec::hardware_efficient(2, 0).build().is_err());
    }

    #[test]
    fn references() {
        let sv = run_circuit(&hf_reference(4, &[0, 1, 2, 3]).unwrap(), &Angles::new()).unwrap();
        assert_eq!(sv.amplitudes()[15], Complex64::new(1.0, 0.0));
        let sv = run_circuit(&hf_reference(2, &[]).unwrap(), &Angles::new()).unwrap();
        assert_eq!(sv.amplitudes()[0], Complex64::new(1.0, 0.0));
        let sv = run_circuit(&hf_reference(2, &[1]).unwrap(), &Angles::new()).unwrap();
        assert_eq!(sv.amplitudes()[0b01], Complex64::new(1.0, 0.0));
        assert!(hf_reference(2, &[2]).is_err());
    }

    #[test]
    fn text_round_trip() {
        for t in ["hardware_efficient(2)", "singlet_pair", "singlet_rotation", "symmetric_pair", "two_angle(0011,0101)", "reference(0,2)"] {
            let spec = AnsatzSpec::parse(t, 4).unwrap();
            assert_eq!(spec.to_string(), t);
        }
        assert!(AnsatzSpec::parse("two_angle(01,01)", 2).is_err());
        assert!(AnsatzSpec::parse("two_angle(011,01)", 3).is_err());
        assert!(AnsatzSpec::parse("ucc", 2).is_err());
    }
}
