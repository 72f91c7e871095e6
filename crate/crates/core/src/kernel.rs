//! The cavity enters the exchange only through the kernel
//!
//! $$ \kappa(\omega) = P_0\rho_0\,\frac{\Delta\hat\rho(\omega)}{\omega}\,g_\eta(\omega),
//!    \qquad g_\eta(\omega) = e^{-\eta^2\omega^2}. $$
//!
//! Every cavity discretizes $\kappa(\omega)\,d\omega$ into a weighted node set in
//! whatever parameterization suits it (resonance intervals for Fabry-Pérot, the
//! in-plane momentum for surface polaritons), so downstream integrals are plain
//! weighted sums.

use crate::error::{domain, Result};
use crate::quad::{compensated_sum, Neumaier};

/// Discrete measure with $\sum_i w_i F(\omega_i) \approx \int d\omega\,\kappa(\omega)F(\omega)$.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KernelNodes {
    pub omega: Vec<f64>,
    pub weight: Vec<f64>,
}

impl KernelNodes {
    pub fn from_pairs(pairs: Vec<(f64, f64)>) -> Self {
        let (omega, weight) = pairs.into_iter().unzip();
        Self { omega, weight }
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        compensated_sum(self.omega.iter().zip(&self.weight).map(|(&w, &c)| c * f(w)))
    }

    /// $M(x) = \int d\omega\,\kappa(\omega)\,(e^{-\omega x/U} - 1)$.
    pub fn modification(&self, x: f64, u: f64) -> f64 {
        let s = -x / u;
        let mut acc = Neumaier::default();
        for (&w, &c) in self.omega.iter().zip(&self.weight) {
            acc.add(c * (w * s).exp_m1());
        }
        acc.sum()
    }

    /// $M(\infty) = -\int\kappa$.
    pub fn m_infinity(&self) -> f64 {
        -compensated_sum(self.weight.iter().copied())
    }

    /// $\sum_i w_i\,\omega_i^p$.
    pub fn moment(&self, p: i32) -> f64 {
        self.integrate(|w| w.powi(p))
    }

    pub fn merged(mut self, other: KernelNodes) -> Self {
        self.omega.extend(other.omega);
        self.weight.extend(other.weight);
        self
    }
}

/// A cavity description that can be reduced to kernel nodes.
pub trait Kernel: Send + Sync {
    fn nodes(&self) -> Result<KernelNodes>;

    /// Natural photon energy scale used for $\theta = \Omega_\star/U$.
    fn characteristic_energy(&self) -> Result<f64>;

    /// $P_0\rho_0$ of the bond the kernel was built for (eV$^{-2}$).
    fn p0_rho0(&self) -> f64;
}

/// Gaussian UV regularizer; `eta = 0` disables it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularizer {
    pub eta: f64,
}

impl Regularizer {
    pub const NONE: Regularizer = Regularizer { eta: 0.0 };

    pub fn new(eta: f64) -> Result<Self> {
        if !(eta >= 0.0) || !eta.is_finite() {
            return domain(format!("regularizer eta must be >= 0, got {eta}"));
        }
        Ok(Self { eta })
    }

    /// From the cutoff energy $1/\eta$ in eV.
    pub fn from_cutoff(cutoff_ev: f64) -> Result<Self> {
        if !(cutoff_ev > 0.0) {
            return domain(format!("regularizer cutoff must be positive, got {cutoff_ev}"));
        }
        Self::new(1.0 / cutoff_ev)
    }

    pub fn weight(&self, omega: f64) -> f64 {
        let t = self.eta * omega;
        (-t * t).exp()
    }

    /// Energy beyond which $g_\eta < e^{-50}$.
    pub fn support_end(&self) -> Option<f64> {
        (self.eta > 0.0).then(|| 50f64.sqrt() / self.eta)
    }
}

/// Sum of single modes, $\kappa = \sum_\lambda \bar g_\lambda^2\,\delta(\omega - \Omega_\lambda)$,
/// so that $M(x) = \sum_\lambda \bar g_\lambda^2 (e^{-x\Omega_\lambda/U} - 1)$.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaComb {
    modes: Vec<(f64, f64)>,
    p0_rho0: f64,
}

impl DeltaComb {
    /// `modes` are `(Omega, g2)` pairs.
    pub fn new(modes: Vec<(f64, f64)>, p0_rho0: f64) -> Result<Self> {
        if modes.is_empty() {
            return domain("delta comb needs at least one mode");
        }
        for &(w, g2) in &modes {
            if !(w > 0.0) || !g2.is_finite() {
                return domain(format!("invalid mode (Omega = {w}, g2 = {g2})"));
            }
        }
        Ok(Self { modes, p0_rho0 })
    }

    pub fn single(omega: f64, g2: f64) -> Result<Self> {
        Self::new(vec![(omega, g2)], 0.0)
    }

    pub fn modes(&self) -> &[(f64, f64)] {
        &self.modes
    }
}

impl Kernel for DeltaComb {
    fn nodes(&self) -> Result<KernelNodes> {
        Ok(KernelNodes::from_pairs(self.modes.clone()))
    }

    fn characteristic_energy(&self) -> Result<f64> {
        let n = self.nodes()?;
        if n.moment(0) == 0.0 {
            // uncoupled comb: fall back to the bare mode energies
            return Ok(n.omega.iter().sum::<f64>() / n.len() as f64);
        }
        centroid(&n)
    }

    fn p0_rho0(&self) -> f64 {
        self.p0_rho0
    }
}

/// $\Delta\hat\rho$ tabulated on an energy grid, integrated by the trapezoid rule.
#[derive(Debug, Clone, PartialEq)]
pub struct TableKernel {
    omega: Vec<f64>,
    delta_rho: Vec<f64>,
    p0_rho0: f64,
    reg: Regularizer,
}

impl TableKernel {
    pub fn new(omega: Vec<f64>, delta_rho: Vec<f64>, p0_rho0: f64, reg: Regularizer) -> Result<Self> {
        if omega.len() != delta_rho.len() || omega.len() < 2 {
            return domain("table kernel needs matching grids with at least two points");
        }
        if !(omega[0] > 0.0) || omega.windows(2).any(|w| !(w[1] > w[0])) {
            return domain("table kernel grid must be positive and strictly increasing");
        }
        Ok(Self { omega, delta_rho, p0_rho0, reg })
    }
}

impl Kernel for TableKernel {
    fn nodes(&self) -> Result<KernelNodes> {
        let n = self.omega.len();
        let mut pairs = Vec::with_capacity(n);
        for i in 0..n {
            let left = if i > 0 { self.omega[i] - self.omega[i - 1] } else { 0.0 };
            let right = if i + 1 < n { self.omega[i + 1] - self.omega[i] } else { 0.0 };
            let w = self.omega[i];
            let k = self.p0_rho0 * self.delta_rho[i] / w * self.reg.weight(w);
            pairs.push((w, 0.5 * (left + right) * k));
        }
        Ok(KernelNodes::from_pairs(pairs))
    }

    fn characteristic_energy(&self) -> Result<f64> {
        centroid(&self.nodes()?)
    }

    fn p0_rho0(&self) -> f64 {
        self.p0_rho0
    }
}

/// Spectral centroid $\int\Delta\hat\rho\,d\omega / \int(\Delta\hat\rho/\omega)\,d\omega$.
pub fn centroid(nodes: &KernelNodes) -> Result<f64> {
    let num = nodes.moment(1);
    let den = nodes.moment(0);
    let c = num / den;
    if !(c.is_finite() && c > 0.0) {
        return domain(format!("kernel has no positive spectral centroid ({num:e}/{den:e})"));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn delta_comb_modification() {
        let k = DeltaComb::single(2.0, 0.1).unwrap();
        let n = k.nodes().unwrap();
        assert_eq!(n.modification(0.0, 5.0), 0.0);
        let x = 1.7;
        assert_relative_eq!(n.modification(x, 5.0), 0.1 * ((-x * 2.0 / 5.0f64).exp() - 1.0), max_relative = 1e-14);
        assert_relative_eq!(n.m_infinity(), -0.1);
        assert_relative_eq!(k.characteristic_energy().unwrap(), 2.0);
    }

    #[test]
    fn table_trapezoid() {
        let w: Vec<f64> = (1..=101).map(|i| i as f64 * 0.01).collect();
        let d: Vec<f64> = w.iter().map(|x| x * x).collect();
        let t = TableKernel::new(w, d, 1.0, Regularizer::NONE).unwrap();
        // kernel = omega, integral over [0.01, 1.01]
        let exact = 0.5 * (1.01f64.powi(2) - 0.01f64.powi(2));
        assert_relative_eq!(-t.nodes().unwrap().m_infinity(), exact, max_relative = 1e-12);
    }

    #[test]
    fn regularizer() {
        let r = Regularizer::from_cutoff(20.0).unwrap();
        assert_relative_eq!(r.weight(20.0), (-1.0f64).exp());
        assert!(r.support_end().unwrap() > 140.0);
        assert!(Regularizer::NONE.support_end().is_none());
        assert!(Regularizer::new(-1.0).is_err());
    }
}
