//! Linear spin waves of the two-sublattice square-lattice antiferromagnet
//! with nearest ($J$) and next-nearest ($K$) neighbour exchange.
//!
//! Momenta are in units of the inverse lattice constant. Per $k$,
//! $h_0 = 4S(J - K + K\cos k_x\cos k_y)$, $h_x = 2JS(\cos k_x + \cos k_y)$ and
//! $\varepsilon_k = \sqrt{h_0^2 - h_x^2}$.

use crate::error::{domain, Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinWaveModel {
    j: f64,
    k: f64,
    s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bogoliubov {
    pub u11: f64,
    pub u12: f64,
    pub u21: f64,
    pub u22: f64,
    pub energy: f64,
}

impl Bogoliubov {
    /// $|U_{11}^2 - U_{12}^2 - 1|$.
    pub fn para_unitarity_residual(&self) -> f64 {
        (self.u11 * self.u11 - self.u12 * self.u12 - 1.0).abs()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Broadening {
    #[default]
    Lorentzian,
    Gaussian,
}

impl Broadening {
    /// Unit-area line shape; `hwhm` is the half width at half maximum.
    pub fn eval(self, x: f64, hwhm: f64) -> f64 {
        match self {
            Broadening::Lorentzian => hwhm / PI / (x * x + hwhm * hwhm),
            Broadening::Gaussian => {
                let sigma = hwhm / (2.0 * std::f64::consts::LN_2).sqrt();
                (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt())
            }
        }
    }
}

impl SpinWaveModel {
    pub fn new(j: f64, k: f64, spin: f64) -> Result<Self> {
        if !(j > 0.0 && spin > 0.0 && k.is_finite()) {
            return domain(format!("need J > 0 and S > 0, got J = {j}, S = {spin}"));
        }
        let m = Self { j, k, s: spin };
        m.check_stability()?;
        Ok(m)
    }

    pub fn j(&self) -> f64 {
        self.j
    }
    pub fn k(&self) -> f64 {
        self.k
    }
    pub fn spin(&self) -> f64 {
        self.s
    }

    /// Same couplings with $J$ replaced.
    pub fn with_j(&self, j: f64) -> Result<Self> {
        Self::new(j, self.k, self.s)
    }

    // h0 and |hx| depend on k only through (cos kx, cos ky) in [-1, 1]^2,
    // so stability is checked on that square instead of the zone.
    fn check_stability(&self) -> Result<()> {
        let n = 200;
        for i in 0..=n {
            for l in 0..=n {
                let a = -1.0 + 2.0 * i as f64 / n as f64;
                let b = -1.0 + 2.0 * l as f64 / n as f64;
                let h0 = 4.0 * self.s * (self.j - self.k + self.k * a * b);
                let hx = 2.0 * self.j * self.s * (a + b);
                if h0 < hx.abs() * (1.0 - 1e-12) {
                    return Err(Error::Instability(format!(
                        "Neel state unstable at (cos kx, cos ky) = ({a}, {b}): h0 = {h0}, hx = {hx}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn hamiltonian(&self, kx: f64, ky: f64) -> (f64, f64) {
        let h0 = 4.0 * self.s * (self.j - self.k + self.k * kx.cos() * ky.cos());
        let hx = 2.0 * self.j * self.s * (kx.cos() + ky.cos());
        (h0, hx)
    }

    /// Magnon energy; both branches are degenerate.
    pub fn dispersion(&self, kx: f64, ky: f64) -> Result<f64> {
        let (h0, hx) = self.hamiltonian(kx, ky);
        let d = (h0 - hx) * (h0 + hx);
        if d < -1e-12 * h0 * h0 {
            return Err(Error::Instability(format!("negative discriminant at k = ({kx}, {ky})")));
        }
        Ok(d.max(0.0).sqrt())
    }

    /// Para-unitary rotation with $\cosh\theta = h_0/\varepsilon$, $\sinh\theta = -h_x/\varepsilon$.
    pub fn bogoliubov(&self, kx: f64, ky: f64) -> Result<Bogoliubov> {
        let (h0, hx) = self.hamiltonian(kx, ky);
        let e = self.dispersion(kx, ky)?;
        if e == 0.0 {
            return domain(format!("Goldstone point k = ({kx}, {ky}) has no Bogoliubov rotation"));
        }
        let c = ((h0 + e) / (2.0 * e)).sqrt();
        let s = -hx / (2.0 * e * (h0 + e)).sqrt();
        Ok(Bogoliubov { u11: c, u12: s, u21: s, u22: c, energy: e })
    }

    /// Off-diagonal element of the rotated $2\times2$ Hamiltonian relative to $\varepsilon_k$.
    pub fn diagonalization_residual(&self, kx: f64, ky: f64) -> Result<f64> {
        let (h0, hx) = self.hamiltonian(kx, ky);
        let b = self.bogoliubov(kx, ky)?;
        let off = b.u11 * b.u12 * h0 * 2.0 + (b.u11 * b.u11 + b.u12 * b.u12) * hx;
        let diag = (b.u11 * b.u11 + b.u12 * b.u12) * h0 + 2.0 * b.u11 * b.u12 * hx;
        Ok((off / b.energy).abs().max((diag - b.energy).abs() / b.energy))
    }

    /// Spectral weight $2S(U_{11} + U_{12})^2 = 2S\sqrt{(h_0 - h_x)/(h_0 + h_x)}$ of $S^{+-}$
    /// (identical for $S^{-+}$); finite (zero) at $\Gamma$.
    pub fn structure_factor_weight(&self, kx: f64, ky: f64) -> f64 {
        let (h0, hx) = self.hamiltonian(kx, ky);
        2.0 * self.s * ((h0 - hx) / (h0 + hx)).sqrt()
    }

    pub fn structure_factor(&self, kx: f64, ky: f64, omegas: &[f64], hwhm: f64, shape: Broadening) -> Result<Vec<f64>> {
        let e = self.dispersion(kx, ky)?;
        let w = self.structure_factor_weight(kx, ky);
        Ok(omegas.iter().map(|&o| w * shape.eval(o - e, hwhm)).collect())
    }

    /// Pair-creation amplitude $r_x = (-f_0 h_x + f_x h_0)/\varepsilon_k$ for in-plane
    /// polarizations `e_in`, `e_out`.
    pub fn raman_vertex(&self, kx: f64, ky: f64, e_in: [f64; 2], e_out: [f64; 2]) -> Result<f64> {
        let (h0, hx) = self.hamiltonian(kx, ky);
        let e = self.dispersion(kx, ky)?;
        let proj = |v: [f64; 2]| (e_in[0] * v[0] + e_in[1] * v[1]) * (e_out[0] * v[0] + e_out[1] * v[1]);
        let f0 = 2.0 * self.k * self.s
            * (proj([1.0, 1.0]) * (kx + ky).cos() + proj([1.0, -1.0]) * (kx - ky).cos());
        let fx = 2.0 * self.j * self.s * (proj([1.0, 0.0]) * kx.cos() + proj([0.0, 1.0]) * ky.cos());
        Ok((fx * h0 - f0 * hx) / e)
    }

    /// Two-magnon Raman intensity on an `n` x `n` shifted Monkhorst-Pack grid.
    /// Rows are summed in parallel and combined in row order.
    pub fn raman_spectrum(
        &self,
        e_in: [f64; 2],
        e_out: [f64; 2],
        omegas: &[f64],
        hwhm: f64,
        shape: Broadening,
        n: usize,
    ) -> Result<Vec<f64>> {
        if n == 0 || !(hwhm > 0.0) {
            return domain(format!("need n > 0 and a positive linewidth, got n = {n}, hwhm = {hwhm}"));
        }
        let kval = |i: usize| 2.0 * PI * (i as f64 + 0.5) / n as f64 - PI;
        let rows: Result<Vec<Vec<f64>>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let kx = kval(i);
                let mut acc = vec![0.0; omegas.len()];
                for l in 0..n {
                    let ky = kval(l);
                    let r = self.raman_vertex(kx, ky, e_in, e_out)?;
                    let w = r * r;
                    if w == 0.0 {
                        continue;
                    }
                    let e2 = 2.0 * self.dispersion(kx, ky)?;
                    for (a, &o) in acc.iter_mut().zip(omegas) {
                        *a += w * shape.eval(o - e2, hwhm);
                    }
                }
                Ok(acc)
            })
            .collect();
        let mut total = vec![0.0; omegas.len()];
        for row in rows? {
            for (t, r) in total.iter_mut().zip(row) {
                *t += r;
            }
        }
        let norm = (n * n) as f64;
        Ok(total.into_iter().map(|x| x / norm).collect())
    }
}

/// Position of the largest sample with `omega >= min_omega`, refined by a
/// parabola through the neighbouring samples.
pub fn peak_position(omegas: &[f64], values: &[f64], min_omega: f64) -> Option<f64> {
    let (i, _) = omegas
        .iter()
        .zip(values)
        .enumerate()
        .filter(|(_, (o, _))| **o >= min_omega)
        .max_by(|a, b| a.1 .1.total_cmp(b.1 .1))?;
    if i == 0 || i + 1 >= omegas.len() || omegas[i - 1] < min_omega {
        return Some(omegas[i]);
    }
    let (x0, x1, x2) = (omegas[i - 1], omegas[i], omegas[i + 1]);
    let (y0, y1, y2) = (values[i - 1], values[i], values[i + 1]);
    let d1 = (y1 - y0) / (x1 - x0);
    let d2 = (y2 - y1) / (x2 - x1);
    let curv = (d2 - d1) / (0.5 * (x2 - x0));
    if curv >= 0.0 {
        return Some(x1);
    }
    // vertex of the parabola through the three points
    let slope_mid = (d1 * (x2 - x1) + d2 * (x1 - x0)) / (x2 - x0);
    Some((x1 - slope_mid / curv).clamp(x0, x2))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathPoint {
    pub kx: f64,
    pub ky: f64,
    /// Cumulative path length.
    pub distance: f64,
    /// Label of a high-symmetry vertex, empty elsewhere.
    pub label: String,
}

pub fn high_symmetry_point(label: &str) -> Result<[f64; 2]> {
    Ok(match label.trim() {
        "G" => [0.0, 0.0],
        "M" => [PI, 0.0],
        "X" => [PI / 2.0, PI / 2.0],
        "Y" => [0.0, PI],
        "S" => [PI, PI],
        other => return domain(format!("unknown high-symmetry point '{other}' (use G, M, X, Y, S)")),
    })
}

/// Straight segments between labelled vertices, e.g. `"G,M,X,G"`, with
/// `per_segment` steps each.
pub fn bz_path(spec: &str, per_segment: usize) -> Result<Vec<PathPoint>> {
    let labels: Vec<&str> = spec.split(',').map(str::trim).collect();
    if labels.len() < 2 || per_segment == 0 {
        return domain(format!("path '{spec}' needs at least two points and a positive resolution"));
    }
    let pts: Vec<[f64; 2]> = labels.iter().map(|l| high_symmetry_point(l)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut dist = 0.0;
    for (s, pair) in pts.windows(2).enumerate() {
        let [a, b] = [pair[0], pair[1]];
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let start = if s == 0 { 0 } else { 1 };
        for i in start..=per_segment {
            let t = i as f64 / per_segment as f64;
            let label = match i {
                0 => labels[s],
                i if i == per_segment => labels[s + 1],
                _ => "",
            };
            out.push(PathPoint {
                kx: a[0] + t * (b[0] - a[0]),
                ky: a[1] + t * (b[1] - a[1]),
                distance: dist + t * len,
                label: label.to_string(),
            });
        }
        dist += len;
    }
    Ok(out)
}
