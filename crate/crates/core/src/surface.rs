//! Surface polaritons of a single vacuum-dielectric interface.
//!
//! The bound branch exists where $\varepsilon(\omega) < -1$, i.e. on
//! $(\omega_{TO}, \omega_\infty)$ with
//! $\omega_\infty^2 = (\varepsilon_\infty\omega_{LO}^2 + \omega_{TO}^2)/(1+\varepsilon_\infty)$.
//! Along an in-plane bond at height $z$,
//!
//! $$ \hat\rho_{\rm surf}(\omega) = \omega^2\,\frac{3\pi/2}
//!    {\sqrt{|\varepsilon|}\,(1+|\varepsilon|)\,(1-|\varepsilon|^{-1})^{5/2}}
//!    \exp\!\Big(-\frac{2z\omega}{\hbar c\sqrt{|\varepsilon|-1}}\Big). $$
//!
//! Close to $\omega_\infty$ this is a steep, narrow peak. Integrals are
//! therefore taken over the in-plane momentum $q$, where on the branch
//! $|\varepsilon| = q^2/(q^2-k^2)$ and the integrand is a smooth
//! $q^2 e^{-2qz}$-type function.

use crate::dielectric::DielectricModel;
use crate::error::{domain, Error, Result};
use crate::kernel::{centroid, Kernel, KernelNodes, Regularizer};
use crate::quad::{self, push_mapped, Tolerance};
use crate::units::{COULOMB_E2, HBAR_C};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceCavity {
    substrate: DielectricModel,
    z: f64,
}

/// A point on the surface-polariton branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub q: f64,
    pub omega: f64,
    /// $d\omega/dq$ in eV nm.
    pub group: f64,
    /// $|\varepsilon(\omega)|$ at the branch point.
    pub abs_eps: f64,
}

pub fn limit_frequency(m: &DielectricModel) -> f64 {
    let e = m.eps_inf();
    ((e * m.omega_lo().powi(2) + m.omega_to().powi(2)) / (1.0 + e)).sqrt()
}

/// Closed-form surface dispersion $\omega_q$ (the lower root of the
/// biquadratic). It is defined for every $q \ge 0$, but only
/// $\hbar c q > \omega_{TO}$ belongs to the bound branch.
pub fn dispersion(m: &DielectricModel, q: f64) -> f64 {
    branch_terms(m, q).omega2.sqrt()
}

struct Terms {
    omega2: f64,
    sqrt_d: f64,
    qq: f64,
}

fn branch_terms(m: &DielectricModel, q: f64) -> Terms {
    let e = m.eps_inf();
    let l = m.omega_lo().powi(2);
    let t = m.omega_to().powi(2);
    let qq = (HBAR_C * q).powi(2);
    let b = e * l + qq * (1.0 + e);
    let disc = (b * b - 4.0 * e * qq * (t + e * l)).max(0.0);
    let sqrt_d = disc.sqrt();
    // product of the two roots is qq (t + e l)/e; take the small one stably
    let omega2 = if b + sqrt_d > 0.0 { 2.0 * qq * (t + e * l) / (b + sqrt_d) } else { 0.0 };
    Terms { omega2, sqrt_d, qq }
}

impl SurfaceCavity {
    pub fn new(substrate: DielectricModel, probe_height: f64) -> Result<Self> {
        if !(probe_height > 0.0) || !probe_height.is_finite() {
            return domain(format!("probe height must be positive, got {probe_height}"));
        }
        Ok(Self { substrate, z: probe_height })
    }

    pub fn substrate(&self) -> &DielectricModel {
        &self.substrate
    }
    pub fn probe_height(&self) -> f64 {
        self.z
    }
    pub fn limit_frequency(&self) -> f64 {
        limit_frequency(&self.substrate)
    }

    /// Smallest in-plane momentum on the bound branch, $\omega_{TO}/\hbar c$.
    pub fn branch_start(&self) -> f64 {
        self.substrate.omega_to() / HBAR_C
    }

    pub fn branch_point(&self, q: f64) -> Result<BranchPoint> {
        let q0 = self.branch_start();
        if !(q > q0) {
            return domain(format!("q = {q} nm^-1 is not on the bound branch (q > {q0})"));
        }
        let m = &self.substrate;
        let e = m.eps_inf();
        let l = m.omega_lo().powi(2);
        let t = m.omega_to().powi(2);
        let Terms { omega2, sqrt_d, qq } = branch_terms(m, q);
        let b = e * l + qq * (1.0 + e);
        // qq - omega2 without cancellation: qq * 4(el+t)(qq-t) / ((b+sqrt_d)(sqrt_d+c))
        let c = e * l + 2.0 * t - qq * (1.0 + e);
        let gap = if c > 0.0 {
            qq * 4.0 * (e * l + t) * (qq - t) / ((b + sqrt_d) * (sqrt_d + c))
        } else {
            qq - omega2
        };
        let abs_eps = qq / gap;
        let omega = omega2.sqrt();
        let dw2 = (1.0 + e) * (limit_frequency(m).powi(2) - omega2) / sqrt_d;
        let group = dw2 * HBAR_C * HBAR_C * q / omega;
        Ok(BranchPoint { q, omega, group, abs_eps })
    }

    /// Reduced surface PDOS $\hat\rho_{\rm surf}(\omega)$ (eV$^2$).
    pub fn pdos(&self, omega: f64) -> f64 {
        let m = &self.substrate;
        if !(omega > m.omega_to() && omega < self.limit_frequency()) {
            return 0.0;
        }
        let abs_eps = -m.epsilon_unchecked(omega);
        if !(abs_eps > 1.0) {
            return 0.0;
        }
        let excess = abs_eps - 1.0;
        let shape = 1.5 * PI / (abs_eps.sqrt() * (1.0 + abs_eps) * (excess / abs_eps).powf(2.5));
        let decay = (-2.0 * self.z * omega / (HBAR_C * excess.sqrt())).exp();
        if decay == 0.0 {
            return 0.0;
        }
        omega * omega * shape * decay
    }

    /// $\hat\rho_{\rm surf}(\omega_q)\,d\omega_q/dq$ written in terms of $q$.
    fn pdos_q(&self, p: &BranchPoint) -> f64 {
        let k = p.omega / HBAR_C;
        let e = p.abs_eps;
        let ratio5 = (p.q / k).powi(5);
        let decay = (-2.0 * self.z * p.q / e.sqrt()).exp();
        if decay == 0.0 || !ratio5.is_finite() {
            return 0.0;
        }
        p.omega * p.omega * 1.5 * PI * ratio5 / (e.sqrt() * (1.0 + e)) * decay * p.group
    }

    /// Surface-mode normalization $N_S^2 = \frac{1+|\varepsilon|}{2q\sqrt{|\varepsilon|}}(|\varepsilon| + \mathcal V/|\varepsilon|)$.
    pub fn mode_normalization(&self, q: f64) -> Result<f64> {
        let p = self.branch_point(q)?;
        let v = self.substrate.hopfield_factor(p.omega)?;
        let e = p.abs_eps;
        Ok((1.0 + e) / (2.0 * q * e.sqrt()) * (e + v / e))
    }

    fn q_panels(&self) -> Vec<f64> {
        let q0 = self.branch_start();
        let k_inf = self.limit_frequency() / HBAR_C;
        let decay_len = 1.0 / (2.0 * self.z);
        let span = 45.0 * decay_len + 4.0 * k_inf;
        let first = 1e-4 * k_inf.min(decay_len);
        let mut breaks = vec![q0];
        let mut h = first;
        let mut s = 0.0;
        while s < span {
            s = (s + h).min(span);
            breaks.push(q0 + s);
            h *= 1.35;
        }
        breaks
    }

    /// $\int d\omega\,(\hat\rho_{\rm surf}/\omega)\,F(\omega)$ evaluated over $q$.
    pub fn q_space_integral(&self, f: impl Fn(f64) -> f64, tol: Tolerance) -> Result<f64> {
        let breaks = self.q_panels();
        quad::adaptive(
            |q| match self.branch_point(q) {
                Ok(p) => self.pdos_q(&p) / p.omega * f(p.omega),
                Err(_) => 0.0,
            },
            &breaks,
            tol,
        )
    }

    /// The same integral taken directly over $\omega$ with tanh-sinh panels
    /// clustered toward $\omega_\infty$.
    pub fn omega_space_integral(&self, f: impl Fn(f64) -> f64, rel_tol: f64) -> Result<f64> {
        let lo = self.substrate.omega_to();
        let hi = self.limit_frequency();
        let g = |w: f64| self.pdos(w) / w * f(w);
        let mut breaks = vec![lo];
        for j in (1..=12).rev() {
            breaks.push(hi - (hi - lo) * 10f64.powi(-j));
        }
        breaks.push(hi);
        breaks.dedup();
        let mut total = 0.0;
        let mut pieces = Vec::new();
        for w in breaks.windows(2) {
            let rough = quadrature::integrate(g, w[0], w[1], 1e-30).integral;
            pieces.push((w[0], w[1], rough));
            total += rough.abs();
        }
        let target = (rel_tol * total).max(1e-300);
        let mut acc = 0.0;
        for (a, b, _) in pieces {
            let out = quadrature::integrate(g, a, b, target / 16.0);
            if !(out.error_estimate <= target) {
                return Err(Error::Convergence(format!(
                    "omega-space surface integral on [{a}, {b}] reached error {:e}",
                    out.error_estimate
                )));
            }
            acc += out.integral;
        }
        Ok(acc)
    }

    pub fn kernel(&self, p0_rho0: f64, reg: Regularizer) -> SurfaceKernel {
        SurfaceKernel { cavity: *self, p0_rho0, reg }
    }

    /// Static screening from the deep-subwavelength surface modes,
    /// $\Delta U = -\sum_q \omega_q |g_{q,L}|^2$, as an explicit momentum integral.
    pub fn delta_u_mode_sum(&self, bond_length: f64) -> Result<f64> {
        if !(bond_length >= 0.0) {
            return domain(format!("bond length must be >= 0, got {bond_length}"));
        }
        let strength = mode_sum_strength(&self.substrate);
        let z = self.z;
        // sum_q w|g|^2 = (k_e e^2 a^2 / 4) * strength * int q^2 e^{-2qz} dq
        let tail = 60.0 / (2.0 * z);
        let integral = quad::adaptive(
            |q| q * q * (-2.0 * q * z).exp(),
            &[0.0, 0.25 * tail, tail],
            Tolerance { rel: 1e-13, ..Default::default() },
        )?;
        Ok(-0.25 * COULOMB_E2 * bond_length * bond_length * strength * integral)
    }
}

/// Oscillator strength of the polariton surface mode, $\eta(\varepsilon(0)) - \eta(\varepsilon_\infty)$
/// with $\eta(\varepsilon) = (\varepsilon-1)/(\varepsilon+1)$; equals 1 for a Drude metal.
pub fn mode_sum_strength(m: &DielectricModel) -> f64 {
    let e = m.eps_inf();
    m.image_charge_factor() - (e - 1.0) / (e + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceKernel {
    cavity: SurfaceCavity,
    p0_rho0: f64,
    reg: Regularizer,
}

const NODES_PER_PANEL: usize = 16;

impl SurfaceKernel {
    pub fn cavity(&self) -> &SurfaceCavity {
        &self.cavity
    }
}

impl Kernel for SurfaceKernel {
    fn nodes(&self) -> Result<KernelNodes> {
        let c = &self.cavity;
        let breaks = c.q_panels();
        let mut raw = Vec::with_capacity(breaks.len() * NODES_PER_PANEL);
        for w in breaks.windows(2) {
            push_mapped(NODES_PER_PANEL, w[0], w[1], &mut raw, |_| 1.0);
        }
        let mut pairs = Vec::with_capacity(raw.len());
        for (q, wq) in raw {
            let p = c.branch_point(q)?;
            let val = c.pdos_q(&p) / p.omega;
            if val != 0.0 {
                pairs.push((p.omega, wq * self.p0_rho0 * val * self.reg.weight(p.omega)));
            }
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::thz_to_ev;
    use approx::assert_relative_eq;

    fn gold() -> DielectricModel {
        DielectricModel::drude(9.45).unwrap()
    }

    fn sto() -> DielectricModel {
        DielectricModel::lorentzian(1.0, thz_to_ev(7.92), thz_to_ev(32.04)).unwrap()
    }

    #[test]
    fn limit_frequencies() {
        assert_relative_eq!(limit_frequency(&gold()), 9.45 / 2f64.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(limit_frequency(&sto()), thz_to_ev(23.34), max_relative = 1e-3);
        for m in [gold(), sto()] {
            assert_relative_eq!(m.epsilon(limit_frequency(&m)).unwrap(), -1.0, epsilon = 1e-10);
        }
        let degenerate = DielectricModel::lorentzian(2.0, 1.0, 1.0 + 1e-9).unwrap();
        assert_relative_eq!(limit_frequency(&degenerate), 1.0, max_relative = 1e-8);
    }

    #[test]
    fn dispersion_branch() {
        let m = sto();
        let c = SurfaceCavity::new(m, 10.0).unwrap();
        let q0 = c.branch_start();
        assert_relative_eq!(dispersion(&m, q0), m.omega_to(), max_relative = 1e-9);
        assert_eq!(dispersion(&gold(), 0.0), 0.0);
        let big = dispersion(&gold(), 1e4);
        assert_relative_eq!(big, limit_frequency(&gold()), max_relative = 1e-9);
        let q = limit_frequency(&gold()) / HBAR_C;
        let p = SurfaceCavity::new(gold(), 1.0).unwrap().branch_point(q).unwrap();
        assert!(p.omega < HBAR_C * q && p.omega < limit_frequency(&gold()));
        // bound-mode condition q^2 = k^2 eps/(1+eps)
        let eps = gold().epsilon(p.omega).unwrap();
        let k = p.omega / HBAR_C;
        assert_relative_eq!(q * q, k * k * eps / (1.0 + eps), max_relative = 1e-10);
        assert_relative_eq!(p.abs_eps, -eps, max_relative = 1e-10);
    }

    #[test]
    fn group_velocity_matches_difference_quotient() {
        let c = SurfaceCavity::new(sto(), 5.0).unwrap();
        for q in [c.branch_start() * 1.5, 0.01, 0.3] {
            let h = 1e-3 * q;
            let d = (dispersion(&sto(), q + h) - dispersion(&sto(), q - h)) / (2.0 * h);
            assert_relative_eq!(c.branch_point(q).unwrap().group, d, max_relative = 1e-5);
        }
    }

    #[test]
    fn pdos_support_and_localization() {
        let c = SurfaceCavity::new(gold(), 10.0).unwrap();
        let winf = c.limit_frequency();
        assert_eq!(c.pdos(winf + 0.01), 0.0);
        assert_eq!(c.pdos(0.0), 0.0);
        let w = 6.5;
        assert!(c.pdos(w) > 10.0 * w * w);
        let far = SurfaceCavity::new(gold(), 11.0).unwrap();
        let slope = (far.pdos(w).ln() - c.pdos(w).ln()) / 1.0;
        let eps = -gold().epsilon(w).unwrap();
        assert_relative_eq!(slope, -2.0 * w / (HBAR_C * (eps - 1.0).sqrt()), max_relative = 1e-10);
    }

    #[test]
    fn q_and_omega_parameterizations_agree() {
        for (m, z) in [(gold(), 10.0), (gold(), 1.0), (sto(), 50.0)] {
            let c = SurfaceCavity::new(m, z).unwrap();
            let tol = Tolerance { rel: 1e-10, ..Default::default() };
            let a = c.q_space_integral(|_| 1.0, tol).unwrap();
            let b = c.omega_space_integral(|_| 1.0, 1e-10).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-7);
            let n = c.kernel(1.0, Regularizer::NONE).nodes().unwrap();
            assert_relative_eq!(-n.m_infinity(), a, max_relative = 1e-7);
        }
    }

    #[test]
    fn normalization_positive() {
        let c = SurfaceCavity::new(sto(), 5.0).unwrap();
        let q0 = c.branch_start();
        for f in [1.001, 1.5, 10.0, 1e3, 1e5] {
            assert!(c.mode_normalization(q0 * f).unwrap() > 0.0);
        }
    }

    #[test]
    fn quasi_static_sum_rule() {
        // sum_q |g|^2 over the bound branch approaches k_e e^2 a^2 / (16 hbar w_s z^3)
        let z = 1.0;
        let a = 0.6;
        let c = SurfaceCavity::new(gold(), z).unwrap();
        let p = crate::units::p0_rho0(a).unwrap();
        let g2 = -c.kernel(p, Regularizer::NONE).nodes().unwrap().m_infinity();
        let ws = c.limit_frequency();
        let estimate = COULOMB_E2 * a * a / (16.0 * ws * z.powi(3));
        assert_relative_eq!(g2, estimate, max_relative = 0.01);
    }

    #[test]
    fn dipole_mode_sum_scaling() {
        let c1 = SurfaceCavity::new(gold(), 6.0).unwrap();
        let c2 = SurfaceCavity::new(gold(), 12.0).unwrap();
        let u1 = c1.delta_u_mode_sum(0.6).unwrap();
        let u2 = c2.delta_u_mode_sum(0.6).unwrap();
        assert_relative_eq!(u1 / u2, 8.0, max_relative = 1e-10);
        assert_relative_eq!(u1, -COULOMB_E2 * 0.36 / (16.0 * 216.0), max_relative = 1e-10);
        assert_eq!(c1.delta_u_mode_sum(0.0).unwrap(), 0.0);
    }
}
