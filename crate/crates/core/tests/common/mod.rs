//! Random instance generators shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng as _;

use respq_core::circuits::{hf_reference, AnsatzSpec};
use respq_core::oracle::exact_diag;
use respq_core::pauli::{Pauli, PauliSum, PauliTerm};
use respq_core::rng::{stream, Rng};
use respq_core::sim::{Angles, Circuit, Gate, Statevector};
use respq_core::solvers::ResponseProblem;

pub fn rng(seed: u64) -> Rng {
    stream(seed, &[0xC0FFEE])
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn random_word(n: usize, rng: &mut Rng) -> PauliTerm {
    let ps = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    PauliTerm::new((0..n).map(|_| ps[rng.random_range(0..4)]).collect()).unwrap()
}

/// Real combination of random Pauli words, hence Hermitian.
pub fn random_hermitian(n: usize, terms: usize, rng: &mut Rng) -> PauliSum {
    let mut h = PauliSum::zero(n);
    for _ in 0..terms {
        h.add_term(random_word(n, rng), rng.random_range(-1.0..1.0)).unwrap();
    }
    h
}

pub fn random_state(n: usize, rng: &mut Rng) -> Statevector {
    let amps = (0..1usize << n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    Statevector::from_amplitudes(amps).unwrap()
}

pub fn random_hermitian_dense(d: usize, rng: &mut Rng) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(d, d, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    (&m + m.adjoint()) * c(0.5, 0.0)
}

pub fn bits(n: usize, j: usize) -> String {
    format!("{j:0n$b}")
}

/// Random circuit drawing from every gate kind with fixed angles.
pub fn random_circuit(n: usize, depth: usize, rng: &mut Rng) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..depth {
        let q = rng.random_range(0..n);
        let r = (q + 1 + rng.random_range(0..n.max(2) - 1)) % n.max(2);
        let t = rng.random_range(0.0..TAU);
        let g = match rng.random_range(0..10) {
            0 => Gate::x(q),
            1 => Gate::h(q),
            2 => Gate::x_half(q),
            3 => Gate::rx(q, t),
            4 => Gate::ry(q, t),
            5 => Gate::rz(q, t),
            6 => Gate::phase(q, t),
            _ if n < 2 => Gate::ry(q, t),
            7 => Gate::cnot(q, r),
            8 => Gate::cz(q, r),
            _ => Gate::sqrt_iswap(q, r),
        };
        c.push(g).unwrap();
    }
    c
}

/// Random problem whose exact response state lies in a two-dimensional span
/// `{|a⟩, |b⟩}` out of a basis ground state `|g⟩`, so that the two-angle
/// ansatz has exact capacity.
pub struct Structured {
    pub h0: PauliSum,
    pub v: PauliSum,
    pub g: usize,
    pub a: usize,
    pub b: usize,
    pub e0: f64,
}

pub fn structured(n: usize, rng: &mut Rng) -> Structured {
    let d = 1usize << n;
    let mut idx: Vec<usize> = (0..d).collect();
    for i in (1..d).rev() {
        idx.swap(i, rng.random_range(0..=i));
    }
    let (g, a, b) = (idx[0], idx[1], idx[2]);
    let rest: Vec<usize> = idx[3..].to_vec();

    let e0 = rng.random_range(-2.0..-1.0);
    let mut h = DMatrix::<Complex64>::zeros(d, d);
    h[(g, g)] = c(e0, 0.0);
    // excited blocks get eigenvalues strictly above e0
    let place = |h: &mut DMatrix<Complex64>, block: &[usize], rng: &mut Rng| {
        let k = block.len();
        if k == 0 {
            return;
        }
        let m = random_hermitian_dense(k, rng);
        let lo = m.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        let lift = e0 + rng.random_range(0.2..1.0) - lo;
        for (i, &r) in block.iter().enumerate() {
            for (j, &s) in block.iter().enumerate() {
                h[(r, s)] = m[(i, j)] + if i == j { c(lift, 0.0) } else { c(0.0, 0.0) };
            }
        }
    };
    place(&mut h, &[a, b], rng);
    place(&mut h, &rest, rng);

    let mut v = random_hermitian_dense(d, rng);
    for j in 0..d {
        if j != a && j != b {
            v[(j, g)] = c(0.0, 0.0);
            v[(g, j)] = c(0.0, 0.0);
        }
    }
    Structured {
        h0: PauliSum::from_dense(&h).unwrap(),
        v: PauliSum::from_dense(&v).unwrap(),
        g,
        a,
        b,
        e0,
    }
}

impl Structured {
    pub fn n(&self) -> usize {
        self.h0.n()
    }

    pub fn ground_circuit(&self) -> Circuit {
        let n = self.n();
        let occ: Vec<usize> = (0..n).filter(|&q| self.g & (1 << (n - 1 - q)) != 0).collect();
        hf_reference(n, &occ).unwrap()
    }

    pub fn problem(&self, omega_grid: Vec<f64>, gamma: f64) -> ResponseProblem {
        let n = self.n();
        ResponseProblem {
            h0: self.h0.clone(),
            v: self.v.clone(),
            e0: exact_diag(&self.h0).unwrap().ground_energy(),
            omega_grid,
            gamma,
            ground_circuit: self.ground_circuit(),
            ground_angles: Angles::new(),
            response_ansatz: AnsatzSpec::two_angle(&bits(n, self.a), &bits(n, self.b)).unwrap(),
        }
    }
}

/// Random generic problem with a hardware-efficient response ansatz and the
/// exact ground energy.
pub fn generic_problem(n: usize, rng: &mut Rng) -> ResponseProblem {
    let h0 = random_hermitian(n, 3 * n + 2, rng);
    let v = random_hermitian(n, n + 1, rng);
    let layers = 2;
    let ground = AnsatzSpec::hardware_efficient(n, layers).build().unwrap();
    let ground_angles = ground.parameters().iter().map(|p| (p.clone(), rng.random_range(0.0..TAU))).collect();
    ResponseProblem {
        e0: exact_diag(&h0).unwrap().ground_energy(),
        h0,
        v,
        omega_grid: vec![0.5],
        gamma: 0.1,
        ground_circuit: ground,
        ground_angles,
        response_ansatz: AnsatzSpec::hardware_efficient(n, layers),
    }
}

pub fn random_angles(names: &[String], rng: &mut Rng) -> Angles {
    names.iter().map(|p| (p.clone(), rng.random_range(0.0..TAU))).collect()
}
