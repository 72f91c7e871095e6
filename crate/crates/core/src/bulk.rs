//! Bulk (non-surface) modes of a single vacuum/substrate interface inside a
//! box with perfectly conducting walls at $z = \pm h$, $h = L_\perp/2$.
//!
//! At fixed $\omega$ the out-of-plane momenta obey
//! $k_>^2 - k_<^2 = D = k_0^2(1 - \varepsilon)$, $k_0 = \omega/\hbar c$, so a mode is fixed
//! by one scalar. Each solution class is scanned in a variable in which both
//! phases $k_\gtrless h$ are monotone, sign changes of the interface determinant
//! are bracketed and then bisected to machine precision.
//!
//! Profiles are stored scaled: a real momentum $k$ contributes $\sin(k y)$, an
//! imaginary one $k = i\kappa$ contributes $\sinh(\kappa y)/\cosh(\kappa h)$, so
//! nothing overflows for $\kappa h \gg 1$.

use crate::dielectric::DielectricModel;
use crate::error::{domain, Error, Result};
use crate::quad::Neumaier;
use crate::units::HBAR_C;
use num_dual::{Dual64, DualNum};
use serde::Serialize;
use std::f64::consts::PI;

pub const DEFAULT_L_PERP_M: f64 = 10.0;
const NM_PER_M: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    Te,
    Tm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeClass {
    Propagating,
    Evanescent,
    Revanescent,
    Surface,
}

/// One allowed out-of-plane solution. Imaginary momenta carry their modulus
/// and are flagged by the class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BulkRoot {
    pub class: ModeClass,
    pub polarization: Polarization,
    /// $k_>^2$ (negative for evanescent modes).
    pub k_gt_sq: f64,
    /// $k_<^2$ (negative for revanescent modes).
    pub k_lt_sq: f64,
    /// Normalized interface determinant at the root.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BulkPdos {
    pub te: f64,
    pub tm: f64,
    pub modes: usize,
}

impl BulkPdos {
    pub fn total(&self) -> f64 {
        self.te + self.tm
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BulkCavity {
    substrate: DielectricModel,
    z: f64,
    h: f64,
}

#[derive(Clone, Copy)]
struct Side<D> {
    k2: D,
    mag: D,
    /// $\phi(h)$
    val: D,
    /// $\phi'(h)$, equal to $|k|\tilde c$
    der: D,
    cos_scaled: D,
}

fn tanh_stable<D: DualNum<Primitive = f64> + Copy>(x: D) -> D {
    if x.re() > 20.0 {
        D::one()
    } else {
        x.tanh()
    }
}

fn side<D: DualNum<Primitive = f64> + Copy>(k2: D, h: f64) -> Side<D> {
    if k2.re() > 0.0 {
        let k = k2.sqrt();
        let ph = k * h;
        let c = ph.cos();
        Side { k2, mag: k, val: ph.sin(), der: k * c, cos_scaled: c }
    } else {
        let kap = (-k2).sqrt();
        Side { k2, mag: kap, val: tanh_stable(kap * h), der: kap, cos_scaled: D::one() }
    }
}

fn sign<D: DualNum<Primitive = f64>>(x: &D) -> f64 {
    if x.re() >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Interface determinant (unnormalized) and its natural scale.
fn determinant<D: DualNum<Primitive = f64> + Copy>(
    gt: &Side<D>,
    lt: &Side<D>,
    eps: D,
    pol: Polarization,
) -> (D, D) {
    match pol {
        Polarization::Te => (
            -(gt.mag * gt.cos_scaled * lt.val) - lt.mag * lt.cos_scaled * gt.val,
            gt.mag + lt.mag,
        ),
        Polarization::Tm => (
            -(lt.mag * lt.val * gt.cos_scaled * sign(&lt.k2))
                - eps * gt.mag * gt.val * lt.cos_scaled * sign(&gt.k2),
            lt.mag + eps.abs() * gt.mag,
        ),
    }
}

/// $\int_0^h \phi^2$ and $\int_0^h \phi'^2$ for one scaled profile.
fn profile_integrals(k2: f64, h: f64) -> (f64, f64) {
    if k2 > 0.0 {
        let k = k2.sqrt();
        let x = k * h;
        if x < 1e-3 {
            return (k2 * h.powi(3) / 3.0, k2 * h);
        }
        let s = (2.0 * x).sin() / (4.0 * k);
        (h / 2.0 - s, k2 * (h / 2.0 + s))
    } else {
        let kap = (-k2).sqrt();
        let x = kap * h;
        if x < 1e-3 {
            return (-k2 * h.powi(3) / 3.0, -k2 * h);
        }
        let e = (-2.0 * x).exp();
        let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
        let t = x.tanh() / (2.0 * kap);
        (t - h * sech2 / 2.0, -k2 * (t + h * sech2 / 2.0))
    }
}

/// Scaled profile $\phi(y)$ at distance `y` from the wall.
fn profile(k2: f64, h: f64, y: f64) -> f64 {
    if k2 > 0.0 {
        (k2.sqrt() * y).sin()
    } else {
        let kap = (-k2).sqrt();
        // sinh(kap y)/cosh(kap h)
        (-kap * (h - y)).exp() * (1.0 - (-2.0 * kap * y).exp()) / (1.0 + (-2.0 * kap * h).exp())
    }
}

impl BulkCavity {
    /// `l_perp_m` is the wall separation in metres.
    pub fn new(substrate: DielectricModel, probe_height: f64, l_perp_m: f64) -> Result<Self> {
        if !(probe_height > 0.0) {
            return domain(format!("probe height must be positive, got {probe_height}"));
        }
        if !(l_perp_m > 0.0) {
            return domain(format!("L_perp must be positive, got {l_perp_m} m"));
        }
        let h = 0.5 * l_perp_m * NM_PER_M;
        if probe_height >= h {
            return domain("probe height must lie inside the box");
        }
        if l_perp_m < 1.0 {
            log::warn!("L_perp = {l_perp_m} m is below 1 m; check convergence");
        }
        Ok(Self { substrate, z: probe_height, h })
    }

    pub fn half_height(&self) -> f64 {
        self.h
    }

    pub fn probe_height(&self) -> f64 {
        self.z
    }

    pub fn with_l_perp(&self, l_perp_m: f64) -> Result<Self> {
        Self::new(self.substrate, self.z, l_perp_m)
    }

    fn k_lt_sq(&self, k_gt_sq: f64, omega: f64, eps: f64) -> f64 {
        let k0 = omega / HBAR_C;
        k_gt_sq + (eps - 1.0) * k0 * k0
    }

    fn normalized_det(&self, k_gt_sq: f64, omega: f64, eps: f64, pol: Polarization) -> f64 {
        let gt = side(k_gt_sq, self.h);
        let lt = side(self.k_lt_sq(k_gt_sq, omega, eps), self.h);
        let (d, s) = determinant(&gt, &lt, eps, pol);
        d / s
    }

    /// Class intervals with the map from scan variable to $k_>^2$.
    fn classes(&self, omega: f64, eps: f64) -> Vec<(ModeClass, f64, f64)> {
        let k0 = omega / HBAR_C;
        let d = k0 * k0 * (1.0 - eps);
        let mut out = Vec::new();
        if eps > 0.0 {
            out.push((ModeClass::Propagating, d.abs().sqrt(), k0 * (1.0 + eps.sqrt())));
        }
        if d > 0.0 {
            out.push((ModeClass::Revanescent, 0.0, d.sqrt().min(k0)));
        }
        if d < 0.0 {
            out.push((ModeClass::Evanescent, 0.0, (-d).sqrt()));
        }
        out
    }

    fn k_gt_sq_of(&self, class: ModeClass, v: f64, omega: f64, eps: f64) -> f64 {
        let k0 = omega / HBAR_C;
        let d = k0 * k0 * (1.0 - eps);
        match class {
            ModeClass::Propagating => {
                let k = 0.5 * (v + d / v);
                k * k
            }
            ModeClass::Revanescent => v * v,
            ModeClass::Evanescent => v * v + d,
            ModeClass::Surface => unreachable!("surface modes are handled analytically"),
        }
    }

    /// All bulk solutions at `omega` for one polarization, ordered by class and scan variable.
    pub fn roots(&self, omega: f64, pol: Polarization) -> Result<Vec<BulkRoot>> {
        if !(omega > 0.0) {
            return domain(format!("frequency must be positive, got {omega}"));
        }
        let eps = self.substrate.epsilon(omega)?;
        let step = PI / (8.0 * self.h);
        let mut out = Vec::new();
        for (class, lo, hi) in self.classes(omega, eps) {
            if !(hi > lo) {
                continue;
            }
            let nudge = 1e-9 * (hi - lo);
            let (a, b) = (lo + nudge, hi - nudge);
            let n = (((b - a) / step).ceil() as usize).max(16);
            let f = |v: f64| self.normalized_det(self.k_gt_sq_of(class, v, omega, eps), omega, eps, pol);
            let mut x0 = a;
            let mut f0 = f(x0);
            for i in 1..=n {
                let x1 = a + (b - a) * i as f64 / n as f64;
                let f1 = f(x1);
                if !f1.is_finite() {
                    return Err(Error::Bracketing {
                        lo: x0,
                        hi: x1,
                        reason: format!("non-finite interface determinant for {class:?} {pol:?} at omega = {omega}"),
                    });
                }
                if f1 == 0.0 || f0 * f1 < 0.0 {
                    let v = if f1 == 0.0 { x1 } else { bisect(&f, x0, x1, f0) };
                    let k_gt_sq = self.k_gt_sq_of(class, v, omega, eps);
                    out.push(BulkRoot {
                        class,
                        polarization: pol,
                        k_gt_sq,
                        k_lt_sq: self.k_lt_sq(k_gt_sq, omega, eps),
                        residual: f(v).abs(),
                    });
                }
                x0 = x1;
                f0 = f1;
            }
        }
        Ok(out)
    }

    /// $d(k_>^2)/d\omega$ along the root by implicit differentiation of the
    /// interface determinant with dual numbers.
    fn dk_gt_sq_domega(&self, root: &BulkRoot, omega: f64) -> f64 {
        let eval = |q: Dual64, w: Dual64| {
            let eps = self.substrate.epsilon_dual(w);
            let k0 = w / HBAR_C;
            let gt = side(q, self.h);
            let lt = side(q + (eps - 1.0) * k0 * k0, self.h);
            determinant(&gt, &lt, eps, root.polarization).0
        };
        let fq = eval(Dual64::new(root.k_gt_sq, 1.0), Dual64::from_re(omega)).eps;
        let fw = eval(Dual64::from_re(root.k_gt_sq), Dual64::new(omega, 1.0)).eps;
        -fw / fq
    }

    /// Squared in-plane mode amplitude at the probe per unit area and
    /// $k_\parallel\,\partial_\omega k_\parallel$ for one root.
    fn mode_weight(&self, root: &BulkRoot, omega: f64, eps: f64, hopfield: f64) -> f64 {
        let gt = side(root.k_gt_sq, self.h);
        let lt = side(root.k_lt_sq, self.h);
        let (v0, v1, u0, u1) = (gt.val, -gt.der, lt.val, lt.der);
        // null vector of [[v0, -u0], [r1, r2]], taken from the better-conditioned row
        let (r1, r2, scale) = match root.polarization {
            Polarization::Te => (v1, -u1, 1.0 / gt.mag.max(lt.mag)),
            Polarization::Tm => (
                v1 / root.k_gt_sq,
                -eps * u1 / root.k_lt_sq,
                1.0 / (1.0 / gt.mag).max(eps.abs() / lt.mag),
            ),
        };
        let (a, b) = if v0.hypot(u0) >= scale * r1.hypot(r2) { (u0, v0) } else { (-r2, r1) };
        let k0 = omega / HBAR_C;
        let kpar2 = k0 * k0 - root.k_gt_sq;
        let (i_gt, d_gt) = profile_integrals(root.k_gt_sq, self.h);
        let (i_lt, d_lt) = profile_integrals(root.k_lt_sq, self.h);
        let mut norm = a * a * i_gt + hopfield * b * b * i_lt;
        if root.polarization == Polarization::Tm {
            norm += kpar2
                * (a * a * d_gt / root.k_gt_sq.powi(2) + hopfield * b * b * d_lt / root.k_lt_sq.powi(2));
        }
        let amp = a * profile(root.k_gt_sq, self.h, self.h - self.z);
        let jac = (omega / (HBAR_C * HBAR_C) - 0.5 * self.dk_gt_sq_domega(root, omega)).abs();
        amp * amp / norm * jac
    }

    /// Reduced bulk PDOS (free space gives $\omega^2$) for an in-plane bond.
    pub fn pdos(&self, omega: f64) -> Result<BulkPdos> {
        let eps = self.substrate.epsilon(omega)?;
        let hop = self.substrate.hopfield_factor(omega)?;
        // 3 pi^2 (hbar c)^3 / (2 pi)^2 times the angular integral pi
        let pref = 0.75 * PI * HBAR_C.powi(3);
        let mut parts = [0.0; 2];
        let mut modes = 0;
        for (i, pol) in [Polarization::Te, Polarization::Tm].into_iter().enumerate() {
            let roots = self.roots(omega, pol)?;
            modes += roots.len();
            let acc: Neumaier = roots.iter().map(|r| self.mode_weight(r, omega, eps, hop)).collect();
            parts[i] = pref * acc.sum();
        }
        Ok(BulkPdos { te: parts[0], tm: parts[1], modes })
    }

    /// Relative change of the bulk PDOS when $L_\perp$ is doubled.
    pub fn convergence_check(&self, omega: f64) -> Result<f64> {
        let here = self.pdos(omega)?.total();
        let doubled = Self { h: 2.0 * self.h, ..self.clone() }.pdos(omega)?.total();
        Ok((doubled - here).abs() / here.abs().max(f64::MIN_POSITIVE))
    }
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut flo: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return if flo.abs() < f(hi).abs() { lo } else { hi };
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
}
