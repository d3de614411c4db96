//! Isotropic averaging, absorption cross-sections and rigid energy shifts.
//!
//! Everything is in hartree atomic units; electronvolts appear only through
//! [`HARTREE_EV`] at the boundary.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in atomic units.
pub const SPEED_OF_LIGHT_AU: f64 = 137.035999;
/// Electronvolts per hartree.
pub const HARTREE_EV: f64 = 27.211386;

pub fn ev_to_hartree(ev: f64) -> f64 {
    ev / HARTREE_EV
}

pub fn hartree_to_ev(ha: f64) -> f64 {
    ha * HARTREE_EV
}

/// How a component list was turned into `χ̄`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Averaging {
    /// Mean over the supplied axes.
    Isotropic,
    /// A single axis taken as already averaged.
    AlreadyAveraged,
}

/// Pointwise mean of 1–3 component lists. One list is returned unchanged and
/// reported as [`Averaging::AlreadyAveraged`]; pad with zero lists to get
/// the one-third convention for a single active axis.
pub fn isotropic_average(components: &[Vec<Complex64>]) -> Result<(Vec<Complex64>, Averaging)> {
    if components.is_empty() || components.len() > 3 {
        return Err(Error::InvalidSpec(format!("expected 1-3 components, got {}", components.len())));
    }
    let len = components[0].len();
    if let Some(bad) = components.iter().find(|c| c.len() != len) {
        return Err(Error::InvalidSpec(format!("component lengths differ ({len} vs {})", bad.len())));
    }
    if components.len() == 1 {
        log::info!("single response component treated as already averaged");
        return Ok((components[0].clone(), Averaging::AlreadyAveraged));
    }
    let k = components.len() as f64;
    let avg = (0..len).map(|i| components.iter().map(|c| c[i]).sum::<Complex64>() / k).collect();
    Ok((avg, Averaging::Isotropic))
}

/// `σ(ω) = 4π ω Im χ̄(ω) / c`.
pub fn absorption(chi_bar: &[Complex64], omega: &[f64]) -> Result<Vec<f64>> {
    if chi_bar.len() != omega.len() {
        return Err(Error::InvalidSpec(format!("{} χ values for {} frequencies", chi_bar.len(), omega.len())));
    }
    Ok(chi_bar
        .iter()
        .zip(omega)
        .map(|(c, &w)| 4.0 * PI * w * c.im / SPEED_OF_LIGHT_AU)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub chi_components: Vec<Vec<Complex64>>,
    pub chi_bar: Vec<Complex64>,
    pub averaging: Averaging,
    pub sigma_abs: Vec<f64>,
    /// Accumulated rigid shift in hartree.
    pub shift: f64,
    /// Same shift in electronvolts.
    pub shift_ev: f64,
}

impl Spectrum {
    pub fn new(omega: Vec<f64>, chi_components: Vec<Vec<Complex64>>) -> Result<Self> {
        if omega.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidSpec("frequency grid must be strictly increasing".into()));
        }
        let (chi_bar, averaging) = isotropic_average(&chi_components)?;
        let sigma_abs = absorption(&chi_bar, &omega)?;
        Ok(Self { omega, chi_components, chi_bar, averaging, sigma_abs, shift: 0.0, shift_ev: 0.0 })
    }
}

/// Translates the grid by `delta` hartree; values are carried unchanged.
pub fn apply_shift(s: &Spectrum, delta: f64) -> Spectrum {
    let shift = s.shift + delta;
    Spectrum {
        omega: s.omega.iter().map(|w| w + delta).collect(),
        shift,
        shift_ev: hartree_to_ev(shift),
        ..s.clone()
    }
}

/// Trapezoid integral of `y` over `x`.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1])).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn averaging_conventions() {
        let chi = vec![c(1.0, 2.0), c(-0.5, 0.25)];
        let (avg, how) = isotropic_average(&[chi.clone(), chi.clone(), chi.clone()]).unwrap();
        assert_eq!(how, Averaging::Isotropic);
        assert!(avg.iter().zip(&chi).all(|(a, b)| (a - b).norm() < 1e-15));
        let zero = vec![c(0.0, 0.0); 2];
        let (avg, _) = isotropic_average(&[chi.clone(), zero.clone(), zero]).unwrap();
        assert!(avg.iter().zip(&chi).all(|(a, b)| (a - b / 3.0).norm() < 1e-15));
        let (avg, how) = isotropic_average(&[chi.clone()]).unwrap();
        assert_eq!((avg, how), (chi.clone(), Averaging::AlreadyAveraged));
        assert!(isotropic_average(&[chi, vec![c(0.0, 0.0)]]).is_err());
    }

    #[test]
    fn absorption_constant() {
        let s = absorption(&[c(0.0, 1.0)], &[1.0]).unwrap();
        assert!((s[0] - 0.09170).abs() < 1e-5);
        assert_eq!(absorption(&[c(3.0, 0.0); 3], &[0.1, 0.2, 0.3]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn shifts() {
        let s = Spectrum::new(vec![0.1, 0.2, 0.3], vec![vec![c(0.0, 1.0); 3]]).unwrap();
        assert_eq!(apply_shift(&s, 0.0), s);
        let d = ev_to_hartree(-1.9);
        assert!((d + 0.06983).abs() < 1e-4);
        let t = apply_shift(&s, d);
        assert!((t.shift_ev + 1.9).abs() < 1e-12);
        assert_eq!(t.sigma_abs, s.sigma_abs);
        let back = apply_shift(&t, -d);
        assert!(back.omega.iter().zip(&s.omega).all(|(a, b)| (a - b).abs() < 1e-15));
        assert!(Spectrum::new(vec![0.2, 0.1], vec![vec![c(0.0, 0.0); 2]]).is_err());
    }

    #[test]
    fn lorentzian_peak_area() {
        // single transition of weight t² at ω₁: ∫ σ/ω dω = (4π/c) ∫ Im χ = 4π² t²/c
        let (w1, t2, gamma) = (0.5, 0.8, 0.01);
        let omega: Vec<f64> = (0..400_000).map(|i| -50.000_125 + i as f64 * 2.5e-4).collect();
        let chi: Vec<Complex64> = omega.iter().map(|&w| t2 / c(w1 - w, -gamma)).collect();
        let sigma = absorption(&chi, &omega).unwrap();
        let per_omega: Vec<f64> = sigma.iter().zip(&omega).map(|(s, w)| s / w).collect();
        let area = trapezoid(&omega, &per_omega);
        let want = 4.0 * PI * PI * t2 / SPEED_OF_LIGHT_AU;
        assert!((area - want).abs() / want < 0.01, "{area} vs {want}");
    }
}
