//! Pauli strings and their complex linear combinations.
//!
//! Qubit 0 is the leftmost tensor factor: in a basis index of an `n`-qubit
//! register, qubit `q` is stored in bit `n - 1 - q`. The word `XZ` therefore
//! means `X ⊗ Z` with `X` on qubit 0.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients with magnitude below this are dropped from a [`PauliSum`].
pub const PRUNE_TOL: f64 = 1e-12;

/// Default largest register that [`PauliSum::to_dense`] will materialize.
pub const DENSE_CAP: usize = 14;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `i^k` for `k` taken mod 4.
pub(crate) fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// Product `self · other` as `(i^k, pauli)`.
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    /// 2×2 matrix of the operator.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[ONE, ZERO], [ZERO, ONE]],
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -i], [i, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }
}

/// Tensor product of single-qubit Paulis; the phase lives with the owner.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PauliTerm {
    word: Vec<Pauli>,
}

impl PauliTerm {
    pub fn new(word: Vec<Pauli>) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::InvalidSpec("Pauli word must cover at least one qubit".into()));
        }
        Ok(Self { word })
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "Pauli word must cover at least one qubit");
        Self { word: vec![Pauli::I; n] }
    }

    /// A single Pauli on qubit `q` of an `n`-qubit register.
    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut t = Self::identity(n);
        t.word[q] = p;
        t
    }

    pub fn n(&self) -> usize {
        self.word.len()
    }

    pub fn word(&self) -> &[Pauli] {
        &self.word
    }

    pub fn is_identity(&self) -> bool {
        self.word.iter().all(|&p| p == Pauli::I)
    }

    /// Qubits carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        self.word
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    pub fn mul(&self, other: &PauliTerm) -> Result<(Complex64, PauliTerm)> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: other.n() });
        }
        let mut k = 0u8;
        let word = self
            .word
            .iter()
            .zip(&other.word)
            .map(|(&a, &b)| {
                let (ph, p) = a.mul(b);
                k += ph;
                p
            })
            .collect();
        Ok((i_pow(k), PauliTerm { word }))
    }

    pub fn commutes_with(&self, other: &PauliTerm) -> bool {
        let anti = self
            .word
            .iter()
            .zip(&other.word)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Bit masks `(x, z, y_count)` such that `P|j⟩ = i^y (-1)^{|j & z|} |j ^ x⟩`.
    pub(crate) fn masks(&self) -> (usize, usize, u8) {
        let n = self.n();
        let mut x = 0usize;
        let mut z = 0usize;
        let mut y = 0u8;
        for (q, &p) in self.word.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    y += 1;
                }
            }
        }
        (x, z, y % 4)
    }

    /// `P|ψ⟩` for a full amplitude vector.
    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(amps.len(), 1usize << self.n());
        let (x, z, y) = self.masks();
        let base = i_pow(y);
        let mut out = vec![ZERO; amps.len()];
        for (j, &a) in amps.iter().enumerate() {
            let sign = if (j & z).count_ones() % 2 == 0 { base } else { -base };
            out[j ^ x] = sign * a;
        }
        out
    }

    /// `⟨φ|P|ψ⟩`.
    pub fn matrix_element(&self, bra: &[Complex64], ket: &[Complex64]) -> Complex64 {
        let (x, z, y) = self.masks();
        let base = i_pow(y);
        let mut acc = ZERO;
        for (j, &a) in ket.iter().enumerate() {
            let v = bra[j ^ x].conj() * a;
            if (j & z).count_ones() % 2 == 0 {
                acc += v;
            } else {
                acc -= v;
            }
        }
        acc * base
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.word {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for PauliTerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let word = s
            .chars()
            .map(|c| {
                Pauli::from_symbol(c.to_ascii_uppercase())
                    .ok_or_else(|| Error::InvalidSpec(format!("invalid Pauli symbol `{c}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        PauliTerm::new(word)
    }
}

/// Phase-tracked product of two Pauli words.
pub fn pauli_mul(a: &PauliTerm, b: &PauliTerm) -> Result<(Complex64, PauliTerm)> {
    a.mul(b)
}

/// Sparse complex combination of Pauli words on a fixed register.
///
/// Terms are kept in lexicographic word order and coefficients smaller than
/// [`PRUNE_TOL`] are dropped on every mutation.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliTerm, Complex64>,
}

impl PauliSum {
    /// The zero operator.
    pub fn zero(n: usize) -> Self {
        assert!(n >= 1, "register must hold at least one qubit");
        Self { n, terms: BTreeMap::new() }
    }

    pub fn identity(n: usize, coeff: impl Into<Complex64>) -> Self {
        Self::from_term(PauliTerm::identity(n), coeff)
    }

    pub fn from_term(term: PauliTerm, coeff: impl Into<Complex64>) -> Self {
        let mut s = Self::zero(term.n());
        s.accumulate(term, coeff.into());
        s
    }

    pub fn from_terms<I, C>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (PauliTerm, C)>,
        C: Into<Complex64>,
    {
        let mut s = Self::zero(n);
        for (t, c) in terms {
            s.add_term(t, c)?;
        }
        Ok(s)
    }

    /// Convenience constructor from `(coefficient, word)` pairs.
    pub fn from_words<C: Into<Complex64> + Copy>(pairs: &[(C, &str)]) -> Result<Self> {
        let first = pairs
            .first()
            .ok_or_else(|| Error::InvalidSpec("empty term list".into()))?;
        let n = first.1.len();
        Self::from_terms(
            n,
            pairs
                .iter()
                .map(|(c, w)| w.parse::<PauliTerm>().map(|t| (t, *c)))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliTerm, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, term: &PauliTerm) -> Complex64 {
        self.terms.get(term).copied().unwrap_or(ZERO)
    }

    pub fn add_term(&mut self, term: PauliTerm, coeff: impl Into<Complex64>) -> Result<()> {
        if term.n() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: term.n() });
        }
        self.accumulate(term, coeff.into());
        Ok(())
    }

    fn accumulate(&mut self, term: PauliTerm, coeff: Complex64) {
        match self.terms.entry(term) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().norm() < PRUNE_TOL {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if coeff.norm() >= PRUNE_TOL {
                    e.insert(coeff);
                }
            }
        }
    }

    fn check_n(&self, other: &PauliSum) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> PauliSum {
        let c = c.into();
        let mut out = PauliSum::zero(self.n);
        for (t, &v) in &self.terms {
            out.accumulate(t.clone(), v * c);
        }
        out
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_n(other)?;
        let mut out = self.clone();
        for (t, &v) in &other.terms {
            out.accumulate(t.clone(), v);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(-1.0))
    }

    /// Operator product `self · other` with like terms merged.
    pub fn mul(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_n(other)?;
        let mut acc: BTreeMap<PauliTerm, Complex64> = BTreeMap::new();
        for (ta, &ca) in &self.terms {
            for (tb, &cb) in &other.terms {
                let (ph, t) = ta.mul(tb)?;
                *acc.entry(t).or_insert(ZERO) += ph * ca * cb;
            }
        }
        acc.retain(|_, c| c.norm() >= PRUNE_TOL);
        Ok(PauliSum { n: self.n, terms: acc })
    }

    /// Hermitian adjoint; Pauli words are self-adjoint so only coefficients change.
    pub fn adjoint(&self) -> PauliSum {
        PauliSum {
            n: self.n,
            terms: self.terms.iter().map(|(t, c)| (t.clone(), c.conj())).collect(),
        }
    }

    /// Largest imaginary part among the coefficients.
    pub fn hermitian_residual(&self) -> f64 {
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_residual() < PRUNE_TOL
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &PauliSum) -> Result<PauliSum> {
        self.mul(other)?.sub(&other.mul(self)?)
    }

    /// Normalized Hilbert–Schmidt norm `sqrt(tr(A†A) / 2^n) = sqrt(Σ|c|²)`.
    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Coefficient of the identity word.
    pub fn identity_coefficient(&self) -> Complex64 {
        self.coefficient(&PauliTerm::identity(self.n))
    }

    /// `A|ψ⟩` on a full amplitude vector.
    pub fn apply(&self, amps: &[Complex64]) -> Result<Vec<Complex64>> {
        if amps.len() != 1usize << self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: amps.len().trailing_zeros() as usize,
            });
        }
        let mut out = vec![ZERO; amps.len()];
        for (t, &c) in &self.terms {
            let (x, z, y) = t.masks();
            let base = i_pow(y) * c;
            for (j, &a) in amps.iter().enumerate() {
                let v = base * a;
                if (j & z).count_ones() % 2 == 0 {
                    out[j ^ x] += v;
                } else {
                    out[j ^ x] -= v;
                }
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        self.to_dense_with_cap(DENSE_CAP)
    }

    pub fn to_dense_with_cap(&self, cap: usize) -> Result<DMatrix<Complex64>> {
        if self.n > cap {
            return Err(Error::Capacity { what: "dense materialization", n: self.n, cap });
        }
        let dim = 1usize << self.n;
        let mut m = DMatrix::from_element(dim, dim, ZERO);
        for (t, &c) in &self.terms {
            let (x, z, y) = t.masks();
            let base = i_pow(y) * c;
            for j in 0..dim {
                let v = if (j & z).count_ones() % 2 == 0 { base } else { -base };
                m[(j ^ x, j)] += v;
            }
        }
        Ok(m)
    }

    /// Pauli decomposition `c_P = tr(P M) / 2^n` of a dense operator.
    pub fn from_dense(m: &DMatrix<Complex64>) -> Result<PauliSum> {
        let dim = m.nrows();
        if dim != m.ncols() || !dim.is_power_of_two() || dim < 2 {
            return Err(Error::InvalidSpec(format!(
                "matrix of shape {}x{} is not a qubit operator",
                m.nrows(),
                m.ncols()
            )));
        }
        let n = dim.trailing_zeros() as usize;
        if n > DENSE_CAP {
            return Err(Error::Capacity { what: "Pauli decomposition", n, cap: DENSE_CAP });
        }
        let mut out = PauliSum::zero(n);
        let mut word = vec![Pauli::I; n];
        let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        for code in 0..(1usize << (2 * n)) {
            for (q, slot) in word.iter_mut().enumerate() {
                *slot = all[(code >> (2 * (n - 1 - q))) & 3];
            }
            let t = PauliTerm { word: word.clone() };
            let (x, z, y) = t.masks();
            let base = i_pow(y);
            // tr(P M) = Σ_j ⟨j|P M|j⟩ = Σ_j conj-free P[j, j^x] M[j^x, j]
            let mut tr = ZERO;
            for j in 0..dim {
                // P|j^x⟩ = phase(j^x) |j⟩
                let k = j ^ x;
                let ph = if (k & z).count_ones() % 2 == 0 { base } else { -base };
                tr += ph * m[(k, j)];
            }
            out.accumulate(t, tr / dim as f64);
        }
        Ok(out)
    }

    /// Parse the plain-text operator format: one `<re> <im> <word>` per line,
    /// `#` comments and blank lines ignored.
    pub fn parse_text(text: &str) -> Result<PauliSum> {
        let mut out: Option<PauliSum> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected `<re> <im> <word>`, got {} fields", fields.len()),
                });
            }
            let num = |s: &str| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line: line_no,
                    message: format!("bad number `{s}`: {e}"),
                })
            };
            let (re, im) = (num(fields[0])?, num(fields[1])?);
            let term: PauliTerm = fields[2].parse().map_err(|e: Error| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
            let sum = out.get_or_insert_with(|| PauliSum::zero(term.n()));
            if term.n() != sum.n {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("word length {} differs from {}", term.n(), sum.n),
                });
            }
            sum.accumulate(term, Complex64::new(re, im));
        }
        out.ok_or(Error::Parse { line: 0, message: "no operator terms found".into() })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (t, c) in &self.terms {
            s.push_str(&format!("{:e} {:e} {}\n", c.re, c.im, t));
        }
        s
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (t, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i) {}", c.re, c.im, t)?;
        }
        Ok(())
    }
}

/// Creation or annihilation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ladder {
    Create,
    Annihilate,
}

/// Product of ladder operators with a complex weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FermionTerm {
    pub ops: Vec<(usize, Ladder)>,
    pub coefficient: Complex64,
}

impl FermionTerm {
    pub fn new(ops: Vec<(usize, Ladder)>, coefficient: impl Into<Complex64>) -> Self {
        Self { ops, coefficient: coefficient.into() }
    }

    /// `c · a†_p a_q`.
    pub fn hopping(p: usize, q: usize, coefficient: impl Into<Complex64>) -> Self {
        Self::new(vec![(p, Ladder::Create), (q, Ladder::Annihilate)], coefficient)
    }
}

fn ladder_operator(mode: usize, kind: Ladder, n: usize) -> PauliSum {
    // a_p = Z_0…Z_{p-1} (X_p + iY_p)/2, a†_p = Z_0…Z_{p-1} (X_p − iY_p)/2
    let mut wx = vec![Pauli::I; n];
    for w in wx.iter_mut().take(mode) {
        *w = Pauli::Z;
    }
    let mut wy = wx.clone();
    wx[mode] = Pauli::X;
    wy[mode] = Pauli::Y;
    let sy = match kind {
        Ladder::Annihilate => Complex64::new(0.0, 0.5),
        Ladder::Create => Complex64::new(0.0, -0.5),
    };
    let mut s = PauliSum::zero(n);
    s.accumulate(PauliTerm { word: wx }, Complex64::new(0.5, 0.0));
    s.accumulate(PauliTerm { word: wy }, sy);
    s
}

/// Jordan–Wigner image of a sum of fermionic monomials on `n_modes` modes.
pub fn jordan_wigner(terms: &[FermionTerm], n_modes: usize) -> Result<PauliSum> {
    if n_modes == 0 {
        return Err(Error::InvalidSpec("at least one fermionic mode is required".into()));
    }
    let mut out = PauliSum::zero(n_modes);
    for term in terms {
        let mut prod = PauliSum::identity(n_modes, term.coefficient);
        for &(mode, kind) in &term.ops {
            if mode >= n_modes {
                return Err(Error::InvalidMode { mode, n_modes });
            }
            prod = prod.mul(&ladder_operator(mode, kind, n_modes))?;
        }
        out = out.add(&prod)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn term(s: &str) -> PauliTerm {
        s.parse().unwrap()
    }

    fn close(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>, tol: f64) -> bool {
        (a - b).iter().all(|v| v.norm() < tol)
    }

    /// Kronecker product of single-qubit matrices, built independently of the
    /// bit-mask path.
    fn kron_word(word: &str) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(1, 1, ONE);
        for ch in word.chars() {
            let p = Pauli::from_symbol(ch).unwrap().matrix();
            let pm = DMatrix::from_fn(2, 2, |r, c| p[r][c]);
            m = m.kronecker(&pm);
        }
        m
    }

    #[test]
    fn single_qubit_products() {
        assert_eq!(pauli_mul(&term("X"), &term("Y")).unwrap(), (c(0.0, 1.0), term("Z")));
        assert_eq!(pauli_mul(&term("Z"), &term("Z")).unwrap(), (c(1.0, 0.0), term("I")));
    }

    #[test]
    fn two_qubit_product_matches_dense() {
        let (ph, p) = pauli_mul(&term("XZ"), &term("YI")).unwrap();
        let lhs = kron_word("XZ") * kron_word("YI");
        let rhs = kron_word(&p.to_string()) * ph;
        assert!(close(&lhs, &rhs, 1e-14));
        assert_eq!(p, term("ZZ"));
        assert_eq!(ph, c(0.0, 1.0));
    }

    #[test]
    fn size_mismatch_is_an_error() {
        assert!(matches!(
            pauli_mul(&term("X"), &term("XX")),
            Err(Error::DimensionMismatch { .. })
        ));
        let a = PauliSum::identity(1, 1.0);
        let b = PauliSum::identity(2, 1.0);
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn sum_products() {
        let x = PauliSum::from_words(&[(1.0, "X")]).unwrap();
        let xx = x.mul(&x).unwrap();
        assert_eq!(xx, PauliSum::identity(1, 1.0));

        let a = PauliSum::from_words(&[(1.0, "X"), (1.0, "Z")]).unwrap();
        let b = PauliSum::from_words(&[(1.0, "X"), (-1.0, "Z")]).unwrap();
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab.len(), 1);
        // XZ = -iY and ZX = iY, so (X+Z)(X-Z) = ZX - XZ = +2iY
        assert!((ab.coefficient(&term("Y")) - c(0.0, 2.0)).norm() < 1e-15);
        let dense = a.to_dense().unwrap() * b.to_dense().unwrap();
        assert!(close(&ab.to_dense().unwrap(), &dense, 1e-14));
    }

    #[test]
    fn adjoint_examples() {
        let a = PauliSum::from_words(&[(c(0.0, 1.0), "X")]).unwrap();
        assert_eq!(a.adjoint(), PauliSum::from_words(&[(c(0.0, -1.0), "X")]).unwrap());
        let h = PauliSum::from_words(&[(0.5, "ZI"), (-0.25, "XX")]).unwrap();
        assert_eq!(h.adjoint(), h);
        assert!(h.is_hermitian());
        assert!(!a.is_hermitian());
    }

    #[test]
    fn dense_examples() {
        let i = PauliSum::identity(1, 1.0).to_dense().unwrap();
        assert!(close(&i, &DMatrix::identity(2, 2), 0.0 + 1e-15));
        let zz = PauliSum::from_words(&[(1.0, "ZZ")]).unwrap().to_dense().unwrap();
        let diag = [1.0, -1.0, -1.0, 1.0];
        for r in 0..4 {
            for col in 0..4 {
                let want = if r == col { diag[r] } else { 0.0 };
                assert_eq!(zz[(r, col)], c(want, 0.0));
            }
        }
    }

    #[test]
    fn dense_cap_is_enforced() {
        let big = PauliSum::identity(15, 1.0);
        assert!(matches!(big.to_dense(), Err(Error::Capacity { .. })));
        assert!(PauliSum::identity(3, 1.0).to_dense_with_cap(2).is_err());
    }

    #[test]
    fn qubit_zero_is_leftmost() {
        // X on qubit 0 of 2 flips the high bit: |00⟩ (index 0) → |10⟩ (index 2)
        let x0 = PauliSum::from_words(&[(1.0, "XI")]).unwrap();
        let out = x0.apply(&[ONE, ZERO, ZERO, ZERO]).unwrap();
        assert_eq!(out[2], ONE);
    }

    #[test]
    fn pruning_drops_cancelled_terms() {
        let mut s = PauliSum::from_words(&[(1.0, "XY"), (2.0, "ZZ")]).unwrap();
        s.add_term(term("XY"), -1.0 + 1e-14).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.coefficient(&term("XY")).norm() == 0.0);
    }

    #[test]
    fn text_round_trip_and_errors() {
        let text = "# a comment\n0.25 0.0 XXYY\n\n-0.5 0 ZIIZ  # trailing\n";
        let s = PauliSum::parse_text(text).unwrap();
        assert_eq!(s.n(), 4);
        assert_eq!(s.coefficient(&term("XXYY")), c(0.25, 0.0));
        assert_eq!(PauliSum::parse_text(&s.to_text()).unwrap(), s);

        assert!(matches!(
            PauliSum::parse_text("1 0 XX\n1 0 XXX\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(PauliSum::parse_text("1 0 XQ"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(PauliSum::parse_text("1 XX"), Err(Error::Parse { .. })));
        assert!(PauliSum::parse_text("# nothing\n").is_err());
    }

    #[test]
    fn decomposition_inverts_dense() {
        let s = PauliSum::from_words(&[
            (c(0.3, 0.0), "XY"),
            (c(-1.1, 0.2), "ZI"),
            (c(0.0, 0.7), "YY"),
            (c(2.0, 0.0), "II"),
        ])
        .unwrap();
        let back = PauliSum::from_dense(&s.to_dense().unwrap()).unwrap();
        assert!(back.sub(&s).unwrap().norm() < 1e-14);
    }

    #[test]
    fn jordan_wigner_number_operator() {
        let n0 = jordan_wigner(&[FermionTerm::hopping(0, 0, 1.0)], 1).unwrap();
        assert_eq!(n0, PauliSum::from_words(&[(0.5, "I"), (-0.5, "Z")]).unwrap());
    }

    #[test]
    fn jordan_wigner_hopping() {
        let h = jordan_wigner(
            &[FermionTerm::hopping(0, 1, 1.0), FermionTerm::hopping(1, 0, 1.0)],
            2,
        )
        .unwrap();
        let want = PauliSum::from_words(&[(0.5, "XX"), (0.5, "YY")]).unwrap();
        assert!(h.sub(&want).unwrap().norm() < 1e-15);
        // matrix elements: |01⟩ ↔ |10⟩ with amplitude 1
        let d = h.to_dense().unwrap();
        assert!((d[(1, 2)] - ONE).norm() < 1e-15 && (d[(2, 1)] - ONE).norm() < 1e-15);
    }

    #[test]
    fn jordan_wigner_anticommutator() {
        let ops = [
            FermionTerm::new(vec![(0, Ladder::Annihilate), (0, Ladder::Create)], 1.0),
            FermionTerm::new(vec![(0, Ladder::Create), (0, Ladder::Annihilate)], 1.0),
        ];
        assert_eq!(jordan_wigner(&ops, 3).unwrap(), PauliSum::identity(3, 1.0));
    }

    #[test]
    fn jordan_wigner_rejects_bad_mode() {
        let err = jordan_wigner(&[FermionTerm::hopping(0, 3, 1.0)], 2).unwrap_err();
        assert_eq!(err, Error::InvalidMode { mode: 3, n_modes: 2 });
    }
}
