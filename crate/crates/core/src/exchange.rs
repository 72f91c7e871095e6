//! Resummed superexchange of a half-filled bond dressed by cavity photons.
//!
//! $$ \frac{J}{J_0} = \frac{U_0}{U_0 + \Delta U}\int_0^\infty dx\, e^{-x} e^{M(x)}, \qquad
//!    M(x) = \int d\omega\,\kappa(\omega)\,(e^{-\omega x/U} - 1), $$
//!
//! with $U = U_0 + \Delta U$ inside $M$. Cavity shifts of $J$ are often below
//! $10^{-12}$, so the deviation $J/\tilde J - 1 = \int e^{-x}\,\mathrm{expm1}(M)\,dx$
//! is integrated directly instead of being formed as a difference.

use crate::dielectric::DielectricModel;
use crate::error::{domain, Error, Result};
use crate::kernel::{Kernel, KernelNodes};
use crate::quad::{self, Neumaier, Tolerance};
use crate::surface::SurfaceCavity;
use crate::units::COULOMB_E2;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HubbardBond {
    t: f64,
    u0: f64,
    a: f64,
}

impl HubbardBond {
    pub fn new(hopping: f64, bare_u: f64, bond_length: f64) -> Result<Self> {
        if !(hopping > 0.0 && bare_u > 0.0 && bond_length > 0.0) {
            return domain(format!(
                "need t > 0, U0 > 0, a > 0; got t = {hopping}, U0 = {bare_u}, a = {bond_length}"
            ));
        }
        if hopping / bare_u >= 0.25 {
            log::warn!("t/U0 = {:.3} is outside the strong-coupling regime", hopping / bare_u);
        }
        Ok(Self { t: hopping, u0: bare_u, a: bond_length })
    }

    pub fn hopping(&self) -> f64 {
        self.t
    }
    pub fn bare_u(&self) -> f64 {
        self.u0
    }
    pub fn bond_length(&self) -> f64 {
        self.a
    }

    /// $J_0 = 4t^2/U_0$.
    pub fn j0(&self) -> f64 {
        4.0 * self.t * self.t / self.u0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScreeningMethod {
    None,
    ImageCharge,
    DipoleModeSum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Screening {
    pub delta_u: f64,
    pub method: ScreeningMethod,
}

impl Screening {
    pub const NONE: Screening = Screening { delta_u: 0.0, method: ScreeningMethod::None };
}

fn checked(bond: &HubbardBond, delta_u: f64, method: ScreeningMethod) -> Result<Screening> {
    if !(bond.u0 + delta_u > 0.0) {
        return Err(Error::Breakdown(format!(
            "screened interaction U0 + dU = {} is not positive",
            bond.u0 + delta_u
        )));
    }
    Ok(Screening { delta_u, method })
}

/// Mirror-charge shift of the on-site repulsion,
/// $\Delta U = -\eta_{ic}\,k_e e^2\,\big(\tfrac{1}{2z} - (4z^2 + a^2)^{-1/2}\big)$.
pub fn delta_u_image_charge(bond: &HubbardBond, substrate: &DielectricModel, z: f64) -> Result<Screening> {
    if !(z > 0.0) {
        return domain(format!("probe height must be positive, got {z}"));
    }
    let a = bond.a;
    let s = 4.0 * z * z + a * a;
    // 1/(2z) - 1/sqrt(s) = (sqrt(s) - 2z)/(2z sqrt(s)) = a^2 / (2z sqrt(s) (sqrt(s) + 2z))
    let diff = a * a / (2.0 * z * s.sqrt() * (s.sqrt() + 2.0 * z));
    checked(bond, -substrate.image_charge_factor() * COULOMB_E2 * diff, ScreeningMethod::ImageCharge)
}

/// Leading large-$z$ term of [`delta_u_image_charge`], $-\eta_{ic}k_e e^2 a^2/16z^3$.
pub fn image_charge_leading_term(bond: &HubbardBond, substrate: &DielectricModel, z: f64) -> f64 {
    -substrate.image_charge_factor() * COULOMB_E2 * bond.a * bond.a / (16.0 * z.powi(3))
}

pub fn delta_u_dipole_mode_sum(bond: &HubbardBond, cavity: &SurfaceCavity) -> Result<Screening> {
    let du = cavity.delta_u_mode_sum(bond.a)?;
    checked(bond, du, ScreeningMethod::DipoleModeSum)
}

/// Which interaction enters the modification function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InteractionInM {
    #[default]
    Screened,
    Bare,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExchangeOptions {
    pub interaction_in_m: InteractionInM,
    pub rel_tol: f64,
}

impl Default for ExchangeOptions {
    fn default() -> Self {
        Self { interaction_in_m: InteractionInM::Screened, rel_tol: 1e-11 }
    }
}

/// $\int_0^\infty e^{-x}e^{M(x)}dx$ and its deviation from one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dynamical {
    pub ratio: f64,
    pub deviation: f64,
}

fn x_breaks(m_inf: f64) -> Vec<f64> {
    let x_max = 40.0 + 10.0 * m_inf.abs();
    let mut b = vec![0.0];
    let mut x = 0.25;
    while x < x_max {
        b.push(x);
        x *= 2.0;
    }
    b.push(x_max);
    b
}

/// Laplace-resummed dynamical factor for kernel nodes at interaction `u`.
pub fn dynamical(nodes: &KernelNodes, u: f64, rel_tol: f64) -> Result<Dynamical> {
    if !(u > 0.0) {
        return domain(format!("interaction must be positive, got {u}"));
    }
    if nodes.weight.iter().all(|&w| w == 0.0) {
        return Ok(Dynamical { ratio: 1.0, deviation: 0.0 });
    }
    let m_inf = nodes.m_infinity();
    let breaks = x_breaks(m_inf);
    let x_max = *breaks.last().expect("non-empty");
    let scale: f64 = nodes.weight.iter().map(|w| w.abs()).sum();
    let tol = Tolerance { abs: 1e-15 * scale, rel: rel_tol, max_intervals: 20_000 };
    let body = quad::adaptive(|x| (-x).exp() * nodes.modification(x, u).exp_m1(), &breaks, tol)?;
    let tail = (-x_max).exp() * m_inf.exp_m1();
    let deviation = body + tail;
    Ok(Dynamical { ratio: 1.0 + deviation, deviation })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExchangeResult {
    pub j_over_j0: f64,
    /// $J/J_0 - 1$ without cancellation.
    pub delta_j_over_j0: f64,
    pub contribution_dynamical: f64,
    pub delta_dynamical: f64,
    pub contribution_screening: f64,
    pub delta_u: f64,
    pub omega_star: f64,
    pub theta: f64,
    pub g_eff_sq: f64,
    /// Leading-order closed form $1/(1 + \theta\tilde g^2)$ at the same interaction.
    pub j_perturbative: f64,
    pub delta_j_perturbative: f64,
}

pub fn exchange_resummed(
    bond: &HubbardBond,
    kernel: &dyn Kernel,
    screening: Screening,
    opts: ExchangeOptions,
) -> Result<ExchangeResult> {
    let nodes = kernel.nodes()?;
    let omega_star = kernel.characteristic_energy()?;
    exchange_from_nodes(bond, &nodes, omega_star, screening, opts)
}

pub fn exchange_from_nodes(
    bond: &HubbardBond,
    nodes: &KernelNodes,
    omega_star: f64,
    screening: Screening,
    opts: ExchangeOptions,
) -> Result<ExchangeResult> {
    let screening = checked(bond, screening.delta_u, screening.method)?;
    let u0 = bond.u0;
    let u = u0 + screening.delta_u;
    let u_m = match opts.interaction_in_m {
        InteractionInM::Screened => u,
        InteractionInM::Bare => u0,
    };
    let prefactor = u0 / u;
    let prefactor_dev = -screening.delta_u / u;
    let dyn_bare = dynamical(nodes, u0, opts.rel_tol)?;
    let dyn_total = if u_m == u0 { dyn_bare } else { dynamical(nodes, u_m, opts.rel_tol)? };
    let j = prefactor * dyn_total.ratio;
    let dj = prefactor_dev + prefactor * dyn_total.deviation;

    let g2 = effective_coupling_g2(nodes, omega_star);
    let s = nodes.moment(1) / u_m;
    let theta = omega_star / u_m;
    if (theta * g2).abs() > 0.5 {
        log::warn!("theta * g2 = {:.3}; the perturbative form is unreliable", theta * g2);
    }
    check_resonance(nodes, u);
    Ok(ExchangeResult {
        j_over_j0: j,
        delta_j_over_j0: dj,
        contribution_dynamical: dyn_bare.ratio,
        delta_dynamical: dyn_bare.deviation,
        contribution_screening: prefactor,
        delta_u: screening.delta_u,
        omega_star,
        theta,
        g_eff_sq: g2,
        j_perturbative: prefactor / (1.0 + s),
        delta_j_perturbative: prefactor_dev - prefactor * s / (1.0 + s),
    })
}

fn check_resonance(nodes: &KernelNodes, u: f64) {
    if nodes.len() > 8 {
        return;
    }
    for &w in &nodes.omega {
        let r = u / w;
        if r >= 0.5 && (r - r.round()).abs() < 1e-3 * r {
            log::warn!("U = {u} eV is within 1e-3 of {} x {w} eV; the expansion is unreliable near resonances", r.round());
        }
    }
}

/// $\tilde g^2 = \Omega_\star^{-1}P_0\rho_0\int d\omega\,\Delta\hat\rho\,g_\eta$.
pub fn effective_coupling_g2(nodes: &KernelNodes, omega_star: f64) -> f64 {
    nodes.moment(1) / omega_star
}

/// Leading-order closed form $J/\tilde J = 1/(1 + \theta\tilde g^2)$, $\theta = \Omega_\star/U$.
pub fn exchange_perturbative(g2: f64, omega_star: f64, u: f64) -> f64 {
    let x = omega_star / u * g2;
    if x.abs() > 0.5 {
        log::warn!("theta * g2 = {x:.3}; outside the perturbative regime");
    }
    1.0 / (1.0 + x)
}

/// Single-mode weight $\bar K^{(n)} = \int d\omega\,\omega^n\Delta\hat\rho/\omega_\star^{n+3}$.
pub fn single_mode_weight(nodes: &KernelNodes, n: u32, omega_star: f64, p0_rho0: f64) -> f64 {
    nodes.moment(n as i32 + 1) / (p0_rho0 * omega_star.powi(n as i32 + 3))
}

/// One photon mode: energy, total and longitudinal squared coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub omega: f64,
    pub g2: f64,
    #[serde(default)]
    pub g2_long: f64,
}

impl Mode {
    pub fn new(omega: f64, g2: f64, g2_long: f64) -> Result<Self> {
        if !(omega > 0.0) || !(g2 >= g2_long && g2_long >= 0.0) || !g2.is_finite() {
            return domain(format!("invalid mode: Omega = {omega}, g2 = {g2}, g2_L = {g2_long}"));
        }
        Ok(Self { omega, g2, g2_long })
    }
}

pub const ORACLE_MODE_LIMIT: usize = 4;

/// Brute-force occupation sum
/// $J/\tilde J = e^{-\sum g^2}\sum_{\mathbf k}\prod_\lambda\frac{g_\lambda^{2k_\lambda}}{k_\lambda!}\,\frac{U}{U + \boldsymbol\Omega\cdot\mathbf k}$.
///
/// Each occupation is truncated where the Poisson tail drops below `1e-15`
/// unless `k_max` is given.
pub fn multinomial_oracle(modes: &[Mode], u: f64, k_max: Option<usize>) -> Result<f64> {
    if modes.len() > ORACLE_MODE_LIMIT {
        return Err(Error::TooManyModes { modes: modes.len(), limit: ORACLE_MODE_LIMIT });
    }
    if !(u > 0.0) {
        return domain(format!("interaction must be positive, got {u}"));
    }
    let tables: Vec<Vec<f64>> = modes
        .iter()
        .map(|m| poisson_table(m.g2, k_max))
        .collect();
    let mut idx = vec![0usize; modes.len()];
    let mut acc = Neumaier::default();
    loop {
        let mut p = 1.0;
        let mut e = 0.0;
        for (l, &k) in idx.iter().enumerate() {
            p *= tables[l][k];
            e += modes[l].omega * k as f64;
        }
        acc.add(p * u / (u + e));
        // odometer
        let mut l = 0;
        loop {
            if l == idx.len() {
                return Ok(acc.sum());
            }
            idx[l] += 1;
            if idx[l] < tables[l].len() {
                break;
            }
            idx[l] = 0;
            l += 1;
        }
    }
}

fn poisson_table(g2: f64, k_max: Option<usize>) -> Vec<f64> {
    let mut out = vec![(-g2).exp()];
    let mut tail = 1.0 - out[0];
    let mut k = 0usize;
    loop {
        if let Some(m) = k_max {
            if k >= m {
                break;
            }
        } else if (tail < 1e-15 && k as f64 > g2) || k > 10_000 {
            break;
        }
        k += 1;
        let next = out[k - 1] * g2 / k as f64;
        tail -= next;
        out.push(next);
    }
    out
}

/// Model-regularized scheme: $\langle e^{M}\rangle$ under the measure $e^{Z}$,
/// $Z(x) = -x + \alpha/(x + U\eta)^2$, $\alpha = P_0\rho_0 U^2$.
pub fn exchange_model_regularized(nodes: &KernelNodes, u: f64, eta: f64, p0_rho0: f64) -> Result<f64> {
    if !(eta > 0.0) {
        return domain("the model-regularized measure has an essential singularity at eta = 0");
    }
    if !(u > 0.0) {
        return domain(format!("interaction must be positive, got {u}"));
    }
    let alpha = p0_rho0 * u * u;
    let ue = u * eta;
    let z = |x: f64| -x + alpha / ((x + ue) * (x + ue));
    let breaks = x_breaks(nodes.m_infinity());
    let tol = Tolerance { abs: 1e-300, rel: 1e-12, max_intervals: 20_000 };
    let den = quad::adaptive(|x| z(x).exp(), &breaks, tol)?;
    let scale: f64 = nodes.weight.iter().map(|w| w.abs()).sum();
    let num = quad::adaptive(
        |x| z(x).exp() * nodes.modification(x, u).exp_m1(),
        &breaks,
        Tolerance { abs: 1e-15 * scale.max(1e-300), ..tol },
    )?;
    Ok(1.0 + num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Variational {
    pub j_over_j0: f64,
    pub s: f64,
    /// Value of the trial bound at $s = 1$.
    pub bound_s1_over_j0: f64,
    pub delta_u: f64,
    /// $|dJ/ds|/J_0$ at the returned `s`.
    pub residual: f64,
}

/// $J \approx \max_{s\in[0,1.5]} 4t^2 e^{-\frac12(1-s)^2\sum g^2}/(U + \tfrac12 s^2\sum\omega g^2)$
/// with $U = U_0 - \tfrac12\sum\omega g_L^2$.
pub fn variational_exchange(bond: &HubbardBond, modes: &[Mode]) -> Result<Variational> {
    let g: f64 = modes.iter().map(|m| m.g2).sum();
    let w: f64 = modes.iter().map(|m| m.omega * m.g2).sum();
    let wl: f64 = modes.iter().map(|m| m.omega * m.g2_long).sum();
    let du = -0.5 * wl;
    let u = bond.u0 + du;
    if !(u > 0.0) {
        return Err(Error::Breakdown(format!("screened interaction {u} eV is not positive")));
    }
    let value = |s: f64| bond.u0 * (-0.5 * (1.0 - s).powi(2) * g).exp() / (u + 0.5 * s * s * w);
    let dlog = |s: f64| (1.0 - s) * g - s * w / (u + 0.5 * s * s * w);
    // dlog(0) = g >= 0 and dlog(s) < 0 for s >= 1 unless g = w = 0
    let s = if g == 0.0 && w == 0.0 {
        1.0
    } else {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if dlog(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if dlog(lo).abs() < dlog(hi).abs() { lo } else { hi }
    };
    let j = value(s);
    Ok(Variational {
        j_over_j0: j,
        s,
        bound_s1_over_j0: value(1.0),
        delta_u: du,
        residual: (j * dlog(s)).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::DeltaComb;
    use approx::assert_relative_eq;

    fn bond() -> HubbardBond {
        HubbardBond::new(0.5, 5.0, 0.6).unwrap()
    }

    #[test]
    fn image_charge_spot_value() {
        let gold = DielectricModel::drude(9.45).unwrap();
        let s = delta_u_image_charge(&bond(), &gold, 1.0).unwrap();
        assert_relative_eq!(s.delta_u, -0.0304, epsilon = 1e-4);
        let far = delta_u_image_charge(&bond(), &gold, 200.0).unwrap();
        assert_relative_eq!(far.delta_u, image_charge_leading_term(&bond(), &gold, 200.0), max_relative = 1e-5);
        let vac = DielectricModel::lorentzian(1.0, 1.0, 1.0 + 1e-12).unwrap();
        assert!(delta_u_image_charge(&bond(), &vac, 1.0).unwrap().delta_u.abs() < 1e-11);
    }

    #[test]
    fn breakdown_when_screening_exceeds_u() {
        let gold = DielectricModel::drude(9.45).unwrap();
        let b = HubbardBond::new(0.01, 0.02, 0.6).unwrap();
        assert!(matches!(delta_u_image_charge(&b, &gold, 1.0), Err(Error::Breakdown(_))));
    }

    #[test]
    fn trivial_kernel_gives_unity() {
        let k = DeltaComb::single(1.0, 0.0).unwrap();
        let r = exchange_resummed(&bond(), &k, Screening::NONE, Default::default()).unwrap();
        assert_eq!(r.j_over_j0, 1.0);
        assert_eq!(r.delta_j_over_j0, 0.0);
    }

    #[test]
    fn screening_prefactor_only() {
        let k = DeltaComb::single(1.0, 0.0).unwrap();
        let s = Screening { delta_u: -0.0304, method: ScreeningMethod::ImageCharge };
        let r = exchange_resummed(&bond(), &k, s, Default::default()).unwrap();
        assert_relative_eq!(r.j_over_j0, 5.0 / 4.9696, max_relative = 1e-14);
        assert_relative_eq!(r.j_over_j0 - 1.0, r.delta_j_over_j0, max_relative = 1e-10);
    }

    #[test]
    fn single_mode_spot_value() {
        let modes = [Mode::new(5.0, 0.1, 0.0).unwrap()];
        let o = multinomial_oracle(&modes, 5.0, None).unwrap();
        assert_relative_eq!(o, 0.951625, epsilon = 1e-6);
        let k = DeltaComb::single(5.0, 0.1).unwrap();
        let d = dynamical(&k.nodes().unwrap(), 5.0, 1e-12).unwrap();
        assert_relative_eq!(d.ratio, o, max_relative = 1e-10);
        assert_relative_eq!(o, (1.0 - (-0.1f64).exp()) / 0.1, max_relative = 1e-13);
    }

    #[test]
    fn oracle_refuses_many_modes() {
        let m = Mode::new(1.0, 0.1, 0.0).unwrap();
        assert!(matches!(multinomial_oracle(&[m; 5], 5.0, None), Err(Error::TooManyModes { .. })));
        assert_eq!(multinomial_oracle(&[Mode::new(1.0, 0.0, 0.0).unwrap()], 5.0, None).unwrap(), 1.0);
    }

    #[test]
    fn three_mode_oracle_matches_laplace() {
        let u = 5.0;
        let spec = [(0.5, 0.05), (1.0, 0.1), (2.0, 0.2)];
        let modes: Vec<Mode> = spec.iter().map(|&(r, g)| Mode::new(r * u, g, 0.0).unwrap()).collect();
        let o = multinomial_oracle(&modes, u, None).unwrap();
        let k = DeltaComb::new(spec.iter().map(|&(r, g)| (r * u, g)).collect(), 0.0).unwrap();
        let d = dynamical(&k.nodes().unwrap(), u, 1e-12).unwrap();
        assert_relative_eq!(d.ratio, o, max_relative = 1e-10);
    }

    #[test]
    fn model_regularized_trivial() {
        let k = DeltaComb::single(1.0, 0.0).unwrap();
        let r = exchange_model_regularized(&k.nodes().unwrap(), 5.0, 0.05, 1e-8).unwrap();
        assert_eq!(r, 1.0);
        assert!(exchange_model_regularized(&k.nodes().unwrap(), 5.0, 0.0, 1e-8).is_err());
    }

    #[test]
    fn variational_cases() {
        let b = bond();
        let none = variational_exchange(&b, &[Mode::new(1.0, 0.0, 0.0).unwrap()]).unwrap();
        assert_relative_eq!(none.j_over_j0, 1.0, max_relative = 1e-15);
        let t = variational_exchange(&b, &[Mode::new(5.0, 0.1, 0.0).unwrap()]).unwrap();
        assert!(t.j_over_j0 < 1.0);
        assert!(t.residual < 1e-8);
        let l = variational_exchange(&b, &[Mode::new(5.0, 0.1, 0.1).unwrap()]).unwrap();
        assert!(l.j_over_j0 > 1.0);
        assert_relative_eq!(l.bound_s1_over_j0, 1.0, max_relative = 1e-14);
        assert!(l.residual < 1e-8);
    }
}
