//! Quadrature helpers: cached Gauss-Legendre rules, a globally adaptive
//! bisection integrator, and compensated summation.

use crate::error::{Error, Result};
use gauss_quad::GaussLegendre;
use std::collections::BinaryHeap;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

/// Nodes and weights of the `n`-point Gauss-Legendre rule on $[-1, 1]$.
pub fn gauss_legendre(n: usize) -> &'static [(f64, f64)] {
    static RULES: OnceLock<Vec<Vec<(f64, f64)>>> = OnceLock::new();
    const MAX: usize = 64;
    assert!((1..=MAX).contains(&n), "Gauss-Legendre order {n} not cached");
    let rules = RULES.get_or_init(|| {
        (0..=MAX)
            .map(|k| match NonZeroUsize::new(k) {
                None => Vec::new(),
                Some(k) => {
                    let mut pairs = GaussLegendre::new(k).as_node_weight_pairs().to_vec();
                    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
                    pairs
                }
            })
            .collect()
    });
    &rules[n]
}

/// Append the `n`-point rule mapped to $[a, b]$ to `out`, with weights scaled by `w(x)`.
pub fn push_mapped(n: usize, a: f64, b: f64, out: &mut Vec<(f64, f64)>, mut w: impl FnMut(f64) -> f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    for &(t, wt) in gauss_legendre(n) {
        let x = mid + half * t;
        out.push((x, half * wt * w(x)));
    }
}

pub fn fixed(n: usize, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = Neumaier::default();
    for &(t, wt) in gauss_legendre(n) {
        acc.add(wt * f(mid + half * t));
    }
    half * acc.sum()
}

/// Kahan-Babuska-Neumaier running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::default();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().collect::<Neumaier>().sum()
}

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-14, rel: 1e-11, max_intervals: 4000 }
    }
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

const ORDER: usize = 10;

fn estimate(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Piece {
    let m = 0.5 * (a + b);
    let whole = fixed(ORDER, a, b, &mut *f);
    let split = fixed(ORDER, a, m, &mut *f) + fixed(ORDER, m, b, &mut *f);
    Piece { a, b, value: split, error: (split - whole).abs() }
}

/// Globally adaptive integration of `f` over each sub-interval between consecutive `breaks`.
///
/// The interval with the largest error estimate is bisected until the total
/// estimated error falls below `max(abs, rel*|I|)`.
pub fn adaptive(mut f: impl FnMut(f64) -> f64, breaks: &[f64], tol: Tolerance) -> Result<f64> {
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            heap.push(estimate(&mut f, w[0], w[1]));
        }
    }
    loop {
        let total: f64 = compensated_sum(heap.iter().map(|p| p.value));
        let err: f64 = heap.iter().map(|p| p.error).sum();
        if err <= tol.abs.max(tol.rel * total.abs()) {
            // deterministic order for the final sum
            let mut pieces: Vec<&Piece> = heap.iter().collect();
            pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
            return Ok(compensated_sum(pieces.iter().map(|p| p.value)));
        }
        if heap.len() >= tol.max_intervals {
            return Err(Error::Convergence(format!(
                "adaptive quadrature on [{}, {}] stalled at error {err:e} (value {total:e})",
                breaks[0],
                breaks[breaks.len() - 1]
            )));
        }
        let worst = heap.pop().expect("non-empty");
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            return Err(Error::Convergence(format!(
                "interval [{}, {}] cannot be bisected further",
                worst.a, worst.b
            )));
        }
        heap.push(estimate(&mut f, worst.a, m));
        heap.push(estimate(&mut f, m, worst.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rules_integrate_polynomials_exactly() {
        let v = fixed(8, -1.0, 2.0, |x| x.powi(15) - 3.0 * x.powi(4));
        let exact = (2f64.powi(16) - 1.0) / 16.0 - 3.0 * (32.0 + 1.0) / 5.0;
        assert_relative_eq!(v, exact, max_relative = 1e-13);
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let v = adaptive(|x: f64| x.sqrt().recip(), &[0.0, 1.0], Tolerance { rel: 1e-9, ..Default::default() })
            .unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-8);
    }

    #[test]
    fn neumaier_recovers_cancelled_terms() {
        let s = compensated_sum([1.0, 1e100, 1.0, -1e100]);
        assert_eq!(s, 2.0);
    }
}
