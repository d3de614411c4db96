mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use common::{random_hermitian, rng};
use respq_core::oracle::{chi_solve, chi_sos, chi_timedomain, exact_diag, Quadrature, Transitions};
use respq_core::pauli::PauliSum;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sum_over_states_matches_direct_solve(seed in any::<u64>(), n in 1usize..5, omega in -1.0..3.0f64, gamma in 0.01..1.0f64) {
        let mut r = rng(seed);
        let h0 = random_hermitian(n, 2 * n + 2, &mut r);
        let v = random_hermitian(n, n + 1, &mut r);
        let eig = exact_diag(&h0).unwrap();
        let sos = chi_sos(&eig, &v, omega, gamma).unwrap();
        let solve = chi_solve(&h0, eig.ground_energy(), &v, &eig.ground_state(), omega, gamma).unwrap();
        prop_assert!((sos - solve).norm() < 1e-10 * (1.0 + sos.norm()), "{} vs {}", sos, solve);
        prop_assert!(sos.im >= 0.0);
    }

    #[test]
    fn spectrum_accounts_for_the_trace(seed in any::<u64>(), n in 1usize..5) {
        let h0 = random_hermitian(n, 3 * n, &mut rng(seed));
        let eig = exact_diag(&h0).unwrap();
        let trace: f64 = eig.energies.iter().sum();
        prop_assert!((trace - (1 << n) as f64 * h0.identity_coefficient().re).abs() < 1e-10);
        prop_assert!(eig.max_residual(&h0.to_dense().unwrap()) < 1e-10);
        prop_assert!(eig.energies.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn weights_sum_to_perturbation_norm(seed in any::<u64>(), n in 1usize..4) {
        let mut r = rng(seed);
        let h0 = random_hermitian(n, 2 * n + 2, &mut r);
        let v = random_hermitian(n, n + 1, &mut r);
        let eig = exact_diag(&h0).unwrap();
        let tr = Transitions::from_ground(&eig, &v).unwrap();
        let vv = respq_core::sim::expect(&eig.ground_state(), &v.mul(&v).unwrap()).unwrap().re;
        prop_assert!((tr.total_weight() - vv).abs() < 1e-10);
    }
}

#[test]
fn lorentzian_width_is_twice_gamma() {
    // H = ½(I − Z), V = X: one transition at ω = 1 with unit weight
    let h0 = PauliSum::from_words(&[(0.5, "I"), (-0.5, "Z")]).unwrap();
    let v = PauliSum::from_words(&[(1.0, "X")]).unwrap();
    let eig = exact_diag(&h0).unwrap();
    for gamma in [0.02, 0.05, 0.1] {
        let step = 1e-3;
        let grid: Vec<f64> = (0..=1000).map(|k| 0.5 + k as f64 * step).collect();
        let im: Vec<f64> = grid.iter().map(|&w| chi_sos(&eig, &v, w, gamma).unwrap().im).collect();
        let peak = im.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // half-maximum crossings by linear interpolation between grid points
        let half = 0.5 * peak;
        let crossings: Vec<f64> = (1..grid.len())
            .filter(|&k| (im[k - 1] - half) * (im[k] - half) < 0.0)
            .map(|k| grid[k - 1] + step * (half - im[k - 1]) / (im[k] - im[k - 1]))
            .collect();
        assert_eq!(crossings.len(), 2);
        let fwhm = crossings[1] - crossings[0];
        assert!((fwhm - 2.0 * gamma).abs() <= step + 1e-12, "gamma {gamma}: fwhm {fwhm}");
    }
}

fn timedomain_error(h0: &PauliSum, v: &PauliSum, grid: &[f64], gamma: f64, dt: f64, q: Quadrature) -> f64 {
    let eig = exact_diag(h0).unwrap();
    let td = chi_timedomain(h0, eig.ground_energy(), v, &eig.ground_state(), grid, gamma, 60.0, dt, q).unwrap();
    grid.iter()
        .zip(&td)
        .map(|(&w, z)| (z - chi_sos(&eig, v, w, gamma).unwrap()).norm())
        .fold(0.0, f64::max)
}

#[test]
fn time_domain_convergence_orders() {
    let mut r = rng(5);
    let h0 = random_hermitian(2, 6, &mut r);
    let v = random_hermitian(2, 3, &mut r);
    let grid = [0.0, 0.4, 1.1, 2.0];
    let gamma = 0.6;
    for (q, order) in [(Quadrature::Trapezoid, 2.0), (Quadrature::TrapezoidEndCorrected, 4.0)] {
        let coarse = timedomain_error(&h0, &v, &grid, gamma, 0.04, q);
        let fine = timedomain_error(&h0, &v, &grid, gamma, 0.02, q);
        let observed = (coarse / fine).log2();
        assert!((observed - order).abs() < 0.3, "{q:?}: observed order {observed} ({coarse:e} -> {fine:e})");
    }
}

#[test]
fn time_domain_agrees_on_two_qubits() {
    let mut r = rng(6);
    for _ in 0..5 {
        let h0 = random_hermitian(2, 6, &mut r);
        let v = random_hermitian(2, 3, &mut r);
        let grid: Vec<f64> = (0..21).map(|k| -0.5 + 0.2 * k as f64).collect();
        let err = timedomain_error(&h0, &v, &grid, 0.5, 0.01, Quadrature::default());
        assert!(err < 1e-5, "max error {err:e}");
    }
}

#[test]
fn response_is_zero_without_coupling() {
    let h0 = PauliSum::from_words(&[(1.0, "ZI"), (0.3, "XX")]).unwrap();
    let v = PauliSum::zero(2);
    let eig = exact_diag(&h0).unwrap();
    assert_eq!(chi_sos(&eig, &v, 0.3, 0.1).unwrap(), Complex64::new(0.0, 0.0));
}
