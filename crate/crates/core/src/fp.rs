//! Ideal two-mirror Fabry-Pérot cavity.
//!
//! With $\omega_c = \pi c/d$ and the emitter at height $z$, the reduced
//! in-plane and out-of-plane densities are
//!
//! $$ \hat\rho_\parallel = \tfrac32\,\omega_c\omega \sum_{n=1}^{\lfloor\omega/\omega_c\rfloor}
//!    \Big[1 + \Big(\frac{n\omega_c}{\omega}\Big)^2\Big]\sin^2\frac{n\pi z}{d}, $$
//!
//! $$ \hat\rho_\perp = 3\,\omega_c\omega\Big[\tfrac12 + \sum_{n=1}^{\lfloor\omega/\omega_c\rfloor}
//!    \Big(1 - \Big(\frac{n\omega_c}{\omega}\Big)^2\Big)\cos^2\frac{n\pi z}{d}\Big]. $$
//!
//! The prefactors are fixed by requiring that the running average over
//! resonance intervals tends to the free-space value $\omega^2$.

use crate::error::{domain, Result};
use crate::kernel::{Kernel, KernelNodes, Regularizer};
use crate::quad::push_mapped;
use crate::units::{fundamental_fp_energy, HBAR_C};
use std::f64::consts::PI;

/// Above this cavity energy (eV) real mirrors stop behaving like perfect conductors.
pub const PERFECT_MIRROR_LIMIT_EV: f64 = 12.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FabryPerot {
    d: f64,
    z: f64,
    omega_c: f64,
}

impl FabryPerot {
    pub fn new(mirror_distance: f64, probe_height: f64) -> Result<Self> {
        let omega_c = fundamental_fp_energy(mirror_distance)?;
        if !(probe_height > 0.0 && probe_height < mirror_distance) {
            return domain(format!(
                "probe height must lie strictly between the mirrors, got z = {probe_height} for d = {mirror_distance}"
            ));
        }
        Ok(Self { d: mirror_distance, z: probe_height, omega_c })
    }

    pub fn centered(mirror_distance: f64) -> Result<Self> {
        Self::new(mirror_distance, 0.5 * mirror_distance)
    }

    pub fn mirror_distance(&self) -> f64 {
        self.d
    }
    pub fn probe_height(&self) -> f64 {
        self.z
    }
    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn outside_model_validity(&self) -> bool {
        self.omega_c > PERFECT_MIRROR_LIMIT_EV
    }

    /// $\omega(n, k_\parallel) = \sqrt{(n\omega_c)^2 + (\hbar c k_\parallel)^2}$.
    pub fn dispersion(&self, branch: u32, k_par: f64) -> Result<f64> {
        if branch < 1 {
            return domain("Fabry-Pérot branch index starts at 1");
        }
        if !(k_par >= 0.0) {
            return domain(format!("in-plane momentum must be >= 0, got {k_par}"));
        }
        Ok((branch as f64 * self.omega_c).hypot(HBAR_C * k_par))
    }

    fn sin2(&self, n: u64) -> f64 {
        (n as f64 * PI * self.z / self.d).sin().powi(2)
    }

    fn branches(&self, omega: f64) -> u64 {
        if omega <= 0.0 {
            0
        } else {
            (omega / self.omega_c).floor() as u64
        }
    }

    pub fn pdos_parallel(&self, omega: f64) -> f64 {
        let wc = self.omega_c;
        let mut s = 0.0;
        for n in 1..=self.branches(omega) {
            let r = n as f64 * wc / omega;
            s += (1.0 + r * r) * self.sin2(n);
        }
        1.5 * wc * omega * s
    }

    pub fn pdos_perp(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        let wc = self.omega_c;
        let mut s = 0.5;
        for n in 1..=self.branches(omega) {
            let r = n as f64 * wc / omega;
            s += (1.0 - r * r) * (1.0 - self.sin2(n));
        }
        3.0 * wc * omega * s
    }

    /// $\Delta\hat\rho$ along an in-plane bond.
    pub fn delta_pdos(&self, omega: f64) -> f64 {
        self.pdos_parallel(omega) - omega * omega
    }

    pub fn kernel(&self, p0_rho0: f64, reg: Regularizer) -> Result<FpKernel> {
        if reg.eta <= 0.0 {
            return domain("the Fabry-Pérot kernel has an oscillatory UV tail and needs eta > 0");
        }
        Ok(FpKernel { cavity: *self, p0_rho0, reg })
    }
}

/// Fabry-Pérot kernel, integrated resonance interval by resonance interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpKernel {
    cavity: FabryPerot,
    p0_rho0: f64,
    reg: Regularizer,
}

const NODES_PER_INTERVAL: usize = 16;

impl FpKernel {
    pub fn cavity(&self) -> &FabryPerot {
        &self.cavity
    }
}

impl Kernel for FpKernel {
    fn nodes(&self) -> Result<KernelNodes> {
        let wc = self.cavity.omega_c;
        let end = self.reg.support_end().expect("eta > 0 checked at construction");
        let intervals = (end / wc).ceil() as u64;
        if intervals > 50_000_000 {
            return domain(format!("{intervals} resonance intervals below the cutoff; mirror distance too large"));
        }
        let mut pairs = Vec::with_capacity(intervals as usize * NODES_PER_INTERVAL);
        let (mut s0, mut s2) = (0.0f64, 0.0f64);
        for n in 0..intervals {
            if n > 0 {
                let s = self.cavity.sin2(n);
                s0 += s;
                s2 += (n * n) as f64 * s;
            }
            let a = n as f64 * wc;
            let b = a + wc;
            push_mapped(NODES_PER_INTERVAL, a, b, &mut pairs, |w| {
                let drho = 1.5 * wc * w * s0 + 1.5 * wc * wc * wc * s2 / w - w * w;
                self.p0_rho0 * drho / w * self.reg.weight(w)
            });
        }
        Ok(KernelNodes::from_pairs(pairs))
    }

    fn characteristic_energy(&self) -> Result<f64> {
        Ok(self.cavity.omega_c)
    }

    fn p0_rho0(&self) -> f64 {
        self.p0_rho0
    }
}
