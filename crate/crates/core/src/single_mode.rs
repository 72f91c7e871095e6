//! Closed forms for a single photon mode of energy $\Omega$ and squared
//! coupling $\bar g^2$, with $\theta = \Omega/U$:
//!
//! $$ J/\tilde J = e^{-\bar g^2}\sum_n \frac{\bar g^{2n}}{n!\,(1 + n\theta)}. $$

use crate::error::{domain, Result};
use crate::quad::Neumaier;

fn validate(g2: f64, theta: f64) -> Result<()> {
    if !(g2 >= 0.0 && g2.is_finite() && theta > 0.0 && theta.is_finite()) {
        return domain(format!("need g2 >= 0 and theta > 0, got g2 = {g2}, theta = {theta}"));
    }
    Ok(())
}

/// $e^{-\bar g^2}\,\gamma(1/\theta, -\bar g^2)\,/\,(\theta(-\bar g^2)^{1/\theta})$.
///
/// The incomplete gamma at negative argument is evaluated through the
/// Kummer series $\gamma(a,x)/x^a = \sum_n (-x)^n/(n!(a+n))$, which has
/// positive terms here. The Poisson factors are built in log space so
/// large $\bar g^2$ does not overflow.
pub fn closed_form(g2: f64, theta: f64) -> Result<f64> {
    validate(g2, theta)?;
    if g2 == 0.0 {
        return Ok(1.0);
    }
    let a = 1.0 / theta;
    let lg = g2.ln();
    let mut acc = Neumaier::default();
    let mut log_p = -g2;
    let mut n = 0u64;
    loop {
        let term = log_p.exp() / (a + n as f64);
        acc.add(term);
        if n as f64 > g2 && term < 1e-18 * acc.sum() {
            break;
        }
        n += 1;
        log_p += lg - (n as f64).ln();
    }
    Ok(acc.sum() * a)
}

/// Alternating form $\sum_n (-\bar g^2)^n\,\Gamma(1+a)/\Gamma(1+a+n)$, $a = 1/\theta$.
/// Accurate for $\bar g^2 \lesssim 1$.
pub fn coupling_series(g2: f64, theta: f64) -> Result<f64> {
    validate(g2, theta)?;
    if g2 > 10.0 {
        log::warn!("coupling series at g2 = {g2} suffers from cancellation");
    }
    let a = 1.0 / theta;
    let mut acc = Neumaier::default();
    let mut term = 1.0;
    let mut n = 0u32;
    while term != 0.0 {
        acc.add(term);
        n += 1;
        term *= -g2 / (a + n as f64);
        if term.abs() < 1e-18 * acc.sum().abs() && n as f64 > g2 {
            break;
        }
    }
    Ok(acc.sum())
}

/// Leading small-$\theta$ form $1/(1 + \bar g^2\theta)$.
pub fn theta_leading(g2: f64, theta: f64) -> f64 {
    1.0 / (1.0 + g2 * theta)
}

/// Touchard polynomials $T_k(x) = \sum_j S(k,j)\,x^j$ for $k = 0..=kmax$.
pub fn touchard(x: f64, kmax: usize) -> Vec<f64> {
    // Stirling numbers of the second kind, one row at a time
    let mut row = vec![1.0f64];
    let mut out = Vec::with_capacity(kmax + 1);
    out.push(1.0);
    for k in 1..=kmax {
        let mut next = vec![0.0; k + 1];
        for j in 1..=k {
            let carry = if j < row.len() { j as f64 * row[j] } else { 0.0 };
            next[j] = carry + row[j - 1];
        }
        row = next;
        out.push(row.iter().rev().fold(0.0, |acc, &c| acc * x + c));
    }
    out
}

/// Systematic expansion $\sum_k (-\theta)^k T_k(\bar g^2)$, truncated at the
/// smallest term (the series is asymptotic in $\theta$).
///
/// Returns the value and the number of terms kept.
pub fn theta_series(g2: f64, theta: f64, max_terms: usize) -> Result<(f64, usize)> {
    validate(g2, theta)?;
    let t = touchard(g2, max_terms);
    let mut acc = Neumaier::default();
    let mut prev = f64::INFINITY;
    let mut pow = 1.0;
    let mut kept = 0;
    for (k, tk) in t.iter().enumerate() {
        let term = pow * tk;
        if k > 1 && term.abs() > prev {
            break;
        }
        acc.add(term);
        kept = k + 1;
        prev = term.abs();
        if term.abs() < 1e-17 {
            break;
        }
        pow *= -theta;
    }
    Ok((acc.sum(), kept))
}
