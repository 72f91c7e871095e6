//! Cavity-vacuum modification of the superexchange $J$ of a half-filled
//! Hubbard bond.
//!
//! Energies are in eV and lengths in nm throughout; wavevectors are
//! $k = E/\hbar c$ in nm$^{-1}$. Photonic densities of states are reduced by
//! the free-space prefactor, $\hat\rho = \rho/\rho_0$, so the free-space value
//! is simply $\omega^2$ (units eV$^2$).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bulk;
pub mod dielectric;
pub mod error;
pub mod exchange;
pub mod fp;
pub mod kernel;
pub mod quad;
pub mod single_mode;
pub mod spinwave;
pub mod surface;
pub mod units;

pub use error::{Error, Result};
