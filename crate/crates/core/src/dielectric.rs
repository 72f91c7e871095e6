//! Lossless substrate dielectric functions.
//!
//! $$ \varepsilon(\omega) = \varepsilon_\infty\left(1 + \frac{\omega_{TO}^2 - \omega_{LO}^2}{\omega^2 - \omega_{TO}^2}\right) $$
//!
//! The Drude metal is the special case $\omega_{TO} = 0$, $\varepsilon_\infty = 1$,
//! $\omega_{LO} = \omega_p$. The Hopfield factor
//! $\mathcal V = \varepsilon + \tfrac{\omega}{2}\partial_\omega\varepsilon$ weights the
//! field energy inside the medium.

use crate::error::{domain, Error, Result};
use crate::units::thz_to_ev;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DielectricKind {
    Lorentzian,
    Drude,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DielectricModel {
    eps_inf: f64,
    omega_to: f64,
    omega_lo: f64,
    kind: DielectricKind,
}

/// Static permittivity; a Drude metal screens perfectly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StaticPermittivity {
    Finite(f64),
    Infinite,
}

impl DielectricModel {
    pub fn lorentzian(eps_inf: f64, omega_to: f64, omega_lo: f64) -> Result<Self> {
        if !(eps_inf >= 1.0) || !eps_inf.is_finite() {
            return domain(format!("eps_inf must be >= 1, got {eps_inf}"));
        }
        if !(omega_to >= 0.0 && omega_to < omega_lo) || !omega_lo.is_finite() {
            return domain(format!(
                "need 0 <= omega_TO < omega_LO, got omega_TO = {omega_to}, omega_LO = {omega_lo}"
            ));
        }
        Ok(Self { eps_inf, omega_to, omega_lo, kind: DielectricKind::Lorentzian })
    }

    pub fn drude(plasma: f64) -> Result<Self> {
        if !(plasma > 0.0) || !plasma.is_finite() {
            return domain(format!("plasma energy must be positive, got {plasma}"));
        }
        Ok(Self { eps_inf: 1.0, omega_to: 0.0, omega_lo: plasma, kind: DielectricKind::Drude })
    }

    pub fn eps_inf(&self) -> f64 {
        self.eps_inf
    }
    pub fn omega_to(&self) -> f64 {
        self.omega_to
    }
    pub fn omega_lo(&self) -> f64 {
        self.omega_lo
    }
    pub fn kind(&self) -> DielectricKind {
        self.kind
    }

    pub fn epsilon(&self, omega: f64) -> Result<f64> {
        let den = omega * omega - self.omega_to * self.omega_to;
        if den == 0.0 {
            return Err(Error::Singular { omega });
        }
        Ok(self.epsilon_unchecked(omega))
    }

    pub(crate) fn epsilon_unchecked(&self, omega: f64) -> f64 {
        let t2 = self.omega_to * self.omega_to;
        let l2 = self.omega_lo * self.omega_lo;
        self.eps_inf * (1.0 + (t2 - l2) / (omega * omega - t2))
    }

    /// Generic form used for automatic differentiation.
    pub(crate) fn epsilon_dual<D: num_dual::DualNum<Primitive = f64> + Copy>(&self, omega: D) -> D {
        let t2 = self.omega_to * self.omega_to;
        let l2 = self.omega_lo * self.omega_lo;
        ((omega * omega - t2).recip() * (t2 - l2) + 1.0) * self.eps_inf
    }

    pub fn epsilon_static(&self) -> StaticPermittivity {
        match self.kind {
            DielectricKind::Drude => StaticPermittivity::Infinite,
            DielectricKind::Lorentzian if self.omega_to == 0.0 => StaticPermittivity::Infinite,
            DielectricKind::Lorentzian => StaticPermittivity::Finite(
                self.eps_inf * (self.omega_lo / self.omega_to).powi(2),
            ),
        }
    }

    /// $\mathcal V(\omega) = \varepsilon + \frac{\omega}{2}\varepsilon'$ in closed form.
    pub fn hopfield_factor(&self, omega: f64) -> Result<f64> {
        let t2 = self.omega_to * self.omega_to;
        let l2 = self.omega_lo * self.omega_lo;
        let den = omega * omega - t2;
        if den == 0.0 {
            return Err(Error::Singular { omega });
        }
        Ok(self.eps_inf * (1.0 - t2 * (t2 - l2) / (den * den)))
    }

    /// Mirror-charge strength $(\varepsilon(0) - 1)/(\varepsilon(0) + 1)$.
    pub fn image_charge_factor(&self) -> f64 {
        match self.epsilon_static() {
            StaticPermittivity::Infinite => 1.0,
            StaticPermittivity::Finite(e) => (e - 1.0) / (e + 1.0),
        }
    }

    /// Energy where $\varepsilon = 0$; the model factorizes as
    /// $\varepsilon_\infty(\omega^2 - \omega_{LO}^2)/(\omega^2 - \omega_{TO}^2)$.
    pub fn zero_crossing(&self) -> f64 {
        self.omega_lo
    }

    /// Parse a substrate preset.
    pub fn from_preset_json(text: &str) -> Result<Self> {
        let p: Preset = serde_json::from_str(text).map_err(|e| Error::Domain(format!("substrate preset: {e}")))?;
        p.into_model()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Preset {
    kind: DielectricKind,
    #[serde(default)]
    eps_inf: Option<f64>,
    #[serde(default, rename = "omega_TO_eV")]
    omega_to_ev: Option<f64>,
    #[serde(default, rename = "omega_TO_THz")]
    omega_to_thz: Option<f64>,
    #[serde(default, rename = "omega_LO_eV")]
    omega_lo_ev: Option<f64>,
    #[serde(default, rename = "omega_LO_THz")]
    omega_lo_thz: Option<f64>,
    #[serde(default, rename = "plasma_eV")]
    plasma_ev: Option<f64>,
    #[serde(default)]
    #[allow(dead_code)]
    name: Option<String>,
    #[serde(default)]
    #[allow(dead_code)]
    note: Option<String>,
}

impl Preset {
    fn into_model(self) -> Result<DielectricModel> {
        fn pick(ev: Option<f64>, thz: Option<f64>, key: &str) -> Result<Option<f64>> {
            match (ev, thz) {
                (Some(_), Some(_)) => domain(format!("give {key} in eV or THz, not both")),
                (Some(e), None) => Ok(Some(e)),
                (None, Some(f)) => Ok(Some(thz_to_ev(f))),
                (None, None) => Ok(None),
            }
        }
        match self.kind {
            DielectricKind::Drude => {
                if let Some(e) = self.eps_inf {
                    if e != 1.0 {
                        return domain("drude preset requires eps_inf = 1");
                    }
                }
                let plasma = match (self.plasma_ev, pick(self.omega_lo_ev, self.omega_lo_thz, "omega_LO")?) {
                    (Some(p), None) | (None, Some(p)) => p,
                    _ => return domain("drude preset needs exactly one of plasma_eV / omega_LO"),
                };
                DielectricModel::drude(plasma)
            }
            DielectricKind::Lorentzian => {
                let to = pick(self.omega_to_ev, self.omega_to_thz, "omega_TO")?
                    .ok_or_else(|| Error::Domain("lorentzian preset needs omega_TO".into()))?;
                let lo = pick(self.omega_lo_ev, self.omega_lo_thz, "omega_LO")?
                    .ok_or_else(|| Error::Domain("lorentzian preset needs omega_LO".into()))?;
                if self.plasma_ev.is_some() {
                    return domain("plasma_eV is only valid for drude presets");
                }
                DielectricModel::lorentzian(self.eps_inf.unwrap_or(1.0), to, lo)
            }
        }
    }
}
