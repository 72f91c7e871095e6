//! Fixed constants of the eV/nm convention and the light-matter prefactor.
//!
//! The combination that multiplies every reduced density of states is
//!
//! $$ P_0\rho_0 = \frac{2}{3\pi}\,\alpha\left(\frac{a}{\hbar c}\right)^2 , $$
//!
//! in eV$^{-2}$; $P_0\rho_0 U^2$ is the dimensionless coupling scale.

use crate::error::{domain, Result};
use std::f64::consts::PI;

/// $\hbar c$ in eV nm.
pub const HBAR_C: f64 = 197.326_980_4;
/// $k_e e^2 = e^2/4\pi\varepsilon_0$ in eV nm.
pub const COULOMB_E2: f64 = 1.439_964_54;
/// Fine-structure constant.
pub const FINE_STRUCTURE: f64 = 1.0 / 137.035_999;
/// Photon energy of one THz, in eV.
pub const EV_PER_THZ: f64 = 4.135_667_696e-3;

pub fn thz_to_ev(f_thz: f64) -> f64 {
    f_thz * EV_PER_THZ
}

/// $P_0\rho_0$ in eV$^{-2}$ for a bond of length `a` (nm).
pub fn p0_rho0(bond_length: f64) -> Result<f64> {
    if !(bond_length >= 0.0) || !bond_length.is_finite() {
        return domain(format!("bond length must be non-negative, got {bond_length}"));
    }
    let r = bond_length / HBAR_C;
    Ok(2.0 / (3.0 * PI) * FINE_STRUCTURE * r * r)
}

/// $\hbar\omega_c = \pi\hbar c/d$ for mirror distance `d` in nm.
pub fn fundamental_fp_energy(mirror_distance: f64) -> Result<f64> {
    if !(mirror_distance > 0.0) {
        return domain(format!("mirror distance must be positive, got {mirror_distance}"));
    }
    Ok(PI * HBAR_C / mirror_distance)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Logarithmic,
}

/// Ordered sample of energies (eV).
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyGrid {
    points: Vec<f64>,
    spacing: Spacing,
}

impl EnergyGrid {
    pub fn linear(start: f64, stop: f64, n: usize) -> Result<Self> {
        Ok(Self { points: spaced(start, stop, n, Spacing::Linear)?, spacing: Spacing::Linear })
    }

    pub fn logarithmic(start: f64, stop: f64, n: usize) -> Result<Self> {
        Ok(Self {
            points: spaced(start, stop, n, Spacing::Logarithmic)?,
            spacing: Spacing::Logarithmic,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// `n` points from `start` to `stop` inclusive. A single point returns `start`.
pub fn spaced(start: f64, stop: f64, n: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if n == 0 {
        return domain("grid needs at least one point");
    }
    if !(start.is_finite() && stop.is_finite()) || (n > 1 && !(start < stop)) {
        return domain(format!("grid bounds must satisfy start < stop, got [{start}, {stop}]"));
    }
    if spacing == Spacing::Logarithmic && !(start > 0.0) {
        return domain("logarithmic grid needs positive bounds");
    }
    if n == 1 {
        return Ok(vec![start]);
    }
    let last = (n - 1) as f64;
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                return stop;
            }
            let t = i as f64 / last;
            match spacing {
                Spacing::Linear => start + (stop - start) * t,
                Spacing::Logarithmic => (start.ln() + (stop.ln() - start.ln()) * t).exp(),
            }
        })
        .collect())
}
