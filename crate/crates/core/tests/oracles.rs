//! Reference values worked out independently of the implementation.

use approx::assert_relative_eq;
use cavityj::dielectric::DielectricModel;
use cavityj::exchange::*;
use cavityj::fp::FabryPerot;
use cavityj::kernel::{DeltaComb, Kernel, Regularizer};
use cavityj::single_mode;
use cavityj::spinwave::{Broadening, SpinWaveModel};
use cavityj::surface::{self, SurfaceCavity};
use cavityj::units::{p0_rho0, thz_to_ev, HBAR_C};
use std::f64::consts::PI;

fn gold() -> DielectricModel {
    DielectricModel::drude(9.45).unwrap()
}

fn srtio3() -> DielectricModel {
    DielectricModel::lorentzian(1.0, thz_to_ev(7.92), thz_to_ev(32.04)).unwrap()
}

#[test]
fn coupling_prefactor_at_six_angstrom() {
    let by_hand = 2.0 / (3.0 * PI) / 137.036 * (0.6f64 / 197.327).powi(2);
    assert_relative_eq!(p0_rho0(0.6).unwrap(), by_hand, max_relative = 1e-5);
    assert_relative_eq!(p0_rho0(0.6).unwrap(), 1.432e-8, max_relative = 1e-3);
}

#[test]
fn cavity_fundamental_scales_inversely() {
    let a = FabryPerot::centered(1000.0).unwrap().omega_c();
    let b = FabryPerot::centered(100.0).unwrap().omega_c();
    assert_relative_eq!(a, PI * 197.327 / 1000.0, max_relative = 1e-5);
    assert_relative_eq!(b, 10.0 * a, max_relative = 1e-14);
    let fp = FabryPerot::centered(1000.0).unwrap();
    assert_relative_eq!(fp.dispersion(1, 0.0).unwrap(), a, max_relative = 1e-14);
    assert_relative_eq!(fp.dispersion(1, a / HBAR_C).unwrap(), 2f64.sqrt() * a, max_relative = 1e-14);
}

#[test]
fn permittivity_values() {
    assert_relative_eq!(gold().epsilon(18.90).unwrap(), 0.75, max_relative = 1e-12);
    let m = DielectricModel::lorentzian(1.0, 1.0, 2.0).unwrap();
    assert_relative_eq!(m.epsilon(0.0).unwrap(), 4.0, max_relative = 1e-14);
    assert_relative_eq!(srtio3().epsilon(0.0).unwrap(), (32.04f64 / 7.92).powi(2), max_relative = 1e-12);
    assert_relative_eq!(srtio3().epsilon(0.0).unwrap(), 16.36, max_relative = 1e-3);
}

#[test]
fn hopfield_factor_values() {
    for w in [0.3, 1.0, 7.0, 30.0] {
        assert_relative_eq!(gold().hopfield_factor(w).unwrap(), 1.0, max_relative = 1e-13);
    }
    let m = DielectricModel::lorentzian(1.0, 1.0, 2.0).unwrap();
    assert_relative_eq!(m.hopfield_factor(2.0).unwrap(), 4.0 / 3.0, max_relative = 1e-13);
}

#[test]
fn image_charge_factor_for_srtio3() {
    let e0 = (32.04f64 / 7.92).powi(2);
    assert_relative_eq!(srtio3().image_charge_factor(), (e0 - 1.0) / (e0 + 1.0), max_relative = 1e-12);
    assert_relative_eq!(srtio3().image_charge_factor(), 0.8848, epsilon = 1e-4);
    assert_eq!(gold().image_charge_factor(), 1.0);
}

#[test]
fn negative_permittivity_window() {
    let m = srtio3();
    let (to, lo) = (m.omega_to(), m.omega_lo());
    assert!(m.epsilon(0.99 * to).unwrap() > 0.0);
    assert!(m.epsilon(1.01 * to).unwrap() < 0.0);
    assert!(m.epsilon(0.99 * lo).unwrap() < 0.0);
    assert!(m.epsilon(1.01 * lo).unwrap() > 0.0);
    assert!(m.epsilon(lo).unwrap().abs() < 1e-12);
}

#[test]
fn midpoint_fp_pdos() {
    let fp = FabryPerot::centered(1000.0).unwrap();
    let wc = fp.omega_c();
    let w = 1.5 * wc;
    assert_relative_eq!(fp.pdos_parallel(w), 1.5 * wc * w * (1.0 + (wc / w).powi(2)), max_relative = 1e-13);
    // n = 2 has a node at the midpoint, so nothing switches on at 2 omega_c
    let (lo, hi) = (fp.pdos_parallel(2.0 * wc * (1.0 - 1e-9)), fp.pdos_parallel(2.0 * wc * (1.0 + 1e-9)));
    assert_relative_eq!(lo, hi, max_relative = 1e-8);
    // below the fundamental only the uniform out-of-plane mode survives
    let w = 0.4 * wc;
    assert_eq!(fp.pdos_parallel(w), 0.0);
    assert_relative_eq!(fp.pdos_perp(w), 1.5 * wc * w, max_relative = 1e-14);
    assert_relative_eq!(fp.delta_pdos(1.5 * wc), fp.pdos_parallel(1.5 * wc) - 2.25 * wc * wc, max_relative = 1e-14);
}

#[test]
fn fp_interval_average_tends_to_free_space() {
    let fp = FabryPerot::centered(1000.0).unwrap();
    let wc = fp.omega_c();
    let avg = |n: u32| {
        let (lo, hi) = ((2 * n + 1) as f64 * wc, (2 * n + 3) as f64 * wc);
        let m = 4000;
        let h = (hi - lo) / m as f64;
        let (mut p, mut f) = (0.0, 0.0);
        for i in 0..m {
            let w = lo + (i as f64 + 0.5) * h;
            p += fp.pdos_parallel(w);
            f += w * w;
        }
        p / f
    };
    let a5 = (avg(5) - 1.0).abs();
    let a40 = (avg(40) - 1.0).abs();
    assert!(a5 < 0.1);
    assert!(a40 < a5);
}

#[test]
fn surface_limit_frequencies() {
    assert_relative_eq!(surface::limit_frequency(&gold()), 9.45 / 2f64.sqrt(), max_relative = 1e-14);
    assert_relative_eq!(surface::limit_frequency(&gold()), 6.682, epsilon = 1e-3);
    let thz = ((32.04f64.powi(2) + 7.92f64.powi(2)) / 2.0).sqrt();
    assert_relative_eq!(surface::limit_frequency(&srtio3()), thz_to_ev(thz), max_relative = 1e-12);
    assert_relative_eq!(surface::limit_frequency(&srtio3()), 0.0965, epsilon = 2e-4);
}

#[test]
fn surface_dispersion_values() {
    assert_eq!(surface::dispersion(&gold(), 0.0), 0.0);
    // the bound branch of a polar crystal starts on the light line at omega_TO
    let to = srtio3().omega_to();
    assert_relative_eq!(surface::dispersion(&srtio3(), to / HBAR_C), to, max_relative = 1e-12);
    let q = 6.682 / HBAR_C;
    let w = surface::dispersion(&gold(), q);
    assert!(w < HBAR_C * q && w < surface::limit_frequency(&gold()));
    // bound-mode condition eps * k_out + k_in = 0 with both decay constants real
    let eps = gold().epsilon(w).unwrap();
    let k0 = w / HBAR_C;
    let k_out = (q * q - k0 * k0).sqrt();
    let k_in = (q * q - eps * k0 * k0).sqrt();
    assert_relative_eq!(eps * k_out + k_in, 0.0, epsilon = 1e-12 * k_in);
}

#[test]
fn surface_pdos_decay_in_z() {
    let m = gold();
    let w = 5.0;
    let eps = m.epsilon(w).unwrap();
    let (z1, z2) = (5.0, 7.0);
    let r = SurfaceCavity::new(m, z2).unwrap().pdos(w) / SurfaceCavity::new(m, z1).unwrap().pdos(w);
    let slope = r.ln() / (z2 - z1);
    assert_relative_eq!(slope, -2.0 * w / (HBAR_C * (eps.abs() - 1.0).sqrt()), max_relative = 1e-10);
}

#[test]
fn surface_integral_shrinks_with_height() {
    let one = |_: f64| 1.0;
    let tol = Default::default();
    let a = SurfaceCavity::new(gold(), 5.0).unwrap().q_space_integral(one, tol).unwrap();
    let b = SurfaceCavity::new(gold(), 10.0).unwrap().q_space_integral(one, tol).unwrap();
    assert!(b < a && b > 0.0);
}

fn bond() -> HubbardBond {
    HubbardBond::new(0.5, 5.0, 0.6).unwrap()
}

#[test]
fn image_charge_by_hand() {
    // -k e^2 * (1/(2z) - 1/sqrt(4z^2 + a^2)) at z = 1 nm, a = 0.6 nm
    let by_hand = -1.44 * (0.5 - 1.0 / (4.0f64 + 0.36).sqrt());
    assert_relative_eq!(by_hand, -1.44 * (0.5 - 0.4789), epsilon = 1e-4);
    let s = delta_u_image_charge(&bond(), &gold(), 1.0).unwrap();
    assert_relative_eq!(s.delta_u, by_hand, max_relative = 3e-3);
    assert_relative_eq!(s.delta_u, -0.0304, epsilon = 1e-4);
}

#[test]
fn image_charge_far_field() {
    let z: f64 = 500.0;
    let lead = -1.439_964_54 * 0.36 / (16.0 * z.powi(3));
    assert_relative_eq!(image_charge_leading_term(&bond(), &gold(), z), lead, max_relative = 1e-12);
    let s = delta_u_image_charge(&bond(), &gold(), z).unwrap();
    assert_relative_eq!(s.delta_u, lead, max_relative = 1e-5);
}

#[test]
fn dipole_mode_sum_is_inverse_cube() {
    let a = SurfaceCavity::new(gold(), 3.0).unwrap().delta_u_mode_sum(0.6).unwrap();
    let b = SurfaceCavity::new(gold(), 6.0).unwrap().delta_u_mode_sum(0.6).unwrap();
    assert_relative_eq!(a / b, 8.0, max_relative = 1e-10);
    let s = delta_u_dipole_mode_sum(&bond(), &SurfaceCavity::new(gold(), 6.0).unwrap()).unwrap();
    assert_relative_eq!(s.delta_u, image_charge_leading_term(&bond(), &gold(), 6.0), max_relative = 0.05);
}

#[test]
fn fp_modification_saturates() {
    let p0 = p0_rho0(0.6).unwrap();
    let k = FabryPerot::centered(1000.0).unwrap().kernel(p0, Regularizer::from_cutoff(20.0).unwrap()).unwrap();
    let n = k.nodes().unwrap();
    let minf = n.m_infinity();
    assert_relative_eq!(n.modification(1e8, 5.0), minf, max_relative = 1e-9);
    assert!((n.modification(1.0, 5.0) - minf).abs() > 1e-3 * minf.abs());
}

#[test]
fn prefactor_only_exchange() {
    let k = DeltaComb::single(1.0, 0.0).unwrap();
    let s = Screening { delta_u: -0.0304, method: ScreeningMethod::ImageCharge };
    let r = exchange_resummed(&bond(), &k, s, Default::default()).unwrap();
    assert_relative_eq!(r.j_over_j0, 1.00612, epsilon = 1e-5);
}

#[test]
fn single_mode_sum_by_hand() {
    let mut by_hand = 0.0;
    let mut term = 1.0;
    for k in 0..=10 {
        by_hand += term / (1.0 + k as f64);
        term *= 0.1 / (k + 1) as f64;
    }
    by_hand *= (-0.1f64).exp();
    assert_relative_eq!(by_hand, 0.951625, epsilon = 1e-6);
    let o = multinomial_oracle(&[Mode::new(5.0, 0.1, 0.0).unwrap()], 5.0, None).unwrap();
    assert_relative_eq!(o, by_hand, max_relative = 1e-12);
    let alt: f64 = (0..20).map(|n| (-0.1f64).powi(n) / (1..=n + 1).map(f64::from).product::<f64>()).sum();
    assert_relative_eq!(single_mode::closed_form(0.1, 1.0).unwrap(), alt, max_relative = 1e-13);
}

#[test]
fn three_mode_oracle_equals_laplace() {
    let u = 5.0;
    let spec = [(0.5, 0.05), (1.0, 0.1), (2.0, 0.2)];
    let modes: Vec<Mode> = spec.iter().map(|&(r, g)| Mode::new(r * u, g, 0.0).unwrap()).collect();
    let k = DeltaComb::new(spec.iter().map(|&(r, g)| (r * u, g)).collect(), 0.0).unwrap();
    let via_kernel = exchange_resummed(&HubbardBond::new(0.5, u, 0.6).unwrap(), &k, Screening::NONE, Default::default())
        .unwrap()
        .j_over_j0;
    assert_relative_eq!(via_kernel, multinomial_oracle(&modes, u, None).unwrap(), max_relative = 1e-8);
}

#[test]
fn small_theta_branch() {
    assert_relative_eq!(single_mode::theta_leading(0.1, 0.01), 1.0 / 1.001, max_relative = 1e-14);
    assert_relative_eq!(single_mode::theta_leading(0.1, 0.01), 0.999001, epsilon = 1e-6);
    // the full expansion carries the O(theta^2) correction the leading form drops
    let cf = single_mode::closed_form(0.1, 0.01).unwrap();
    let (ts, _) = single_mode::theta_series(0.1, 0.01, 40).unwrap();
    assert_relative_eq!(cf, ts, max_relative = 1e-12);
    assert!((cf - 0.999001).abs() < 2e-5);
}

#[test]
fn fp_dynamical_slope_is_minus_three() {
    let p0 = p0_rho0(0.6).unwrap();
    let reg = Regularizer::from_cutoff(20.0).unwrap();
    let d = [2000.0, 4000.0, 8000.0, 16000.0];
    let v: Vec<f64> = d
        .iter()
        .map(|&d| {
            let k = FabryPerot::centered(d).unwrap().kernel(p0, reg).unwrap();
            -exchange_resummed(&bond(), &k, Screening::NONE, Default::default()).unwrap().delta_j_over_j0
        })
        .collect();
    for w in v.windows(2) {
        assert_relative_eq!((w[1] / w[0]).log2(), -3.0, epsilon = 0.05);
    }
}

#[test]
fn surface_moments_are_flat() {
    let p0 = p0_rho0(0.6).unwrap();
    let k = SurfaceCavity::new(gold(), 10.0).unwrap().kernel(p0, Regularizer::NONE);
    let n = k.nodes().unwrap();
    let ws = k.characteristic_energy().unwrap();
    let m0 = single_mode_weight(&n, 0, ws, p0);
    for i in 1..=4 {
        assert!((single_mode_weight(&n, i, ws, p0) / m0 - 1.0).abs() < 0.2);
    }
}

#[test]
fn model_regularization_tracks_eta_weakly() {
    let p0 = p0_rho0(0.6).unwrap();
    let u = 5.0;
    let alpha = p0 * u * u;
    let n = SurfaceCavity::new(gold(), 2.0).unwrap().kernel(p0, Regularizer::NONE).nodes().unwrap();
    let ab = dynamical(&n, u, 1e-12).unwrap().ratio;
    for cutoff in [10.0, 20.0, 40.0] {
        let eta = 1.0 / cutoff;
        let m = exchange_model_regularized(&n, u, eta, p0).unwrap();
        assert!((m - ab).abs() < 10.0 * alpha / (eta * u));
    }
}

#[test]
fn transverse_instance_suppresses() {
    // sum g^2 = 0.1 and sum omega g^2 = 0.5 eV split over two modes
    let modes = [Mode::new(2.5, 0.05, 0.0).unwrap(), Mode::new(7.5, 0.05, 0.0).unwrap()];
    let v = variational_exchange(&bond(), &modes).unwrap();
    assert!(v.j_over_j0 < 1.0);
    assert!(v.s > 0.0 && v.s < 1.0);
    assert!(v.j_over_j0 >= v.bound_s1_over_j0);
}

#[test]
fn magnon_energies_at_zone_boundary() {
    let m = SpinWaveModel::new(0.1, 0.0, 0.5).unwrap();
    assert_relative_eq!(m.dispersion(PI, 0.0).unwrap(), 0.2, max_relative = 1e-14);
    assert_relative_eq!(m.dispersion(PI / 2.0, PI / 2.0).unwrap(), 0.2, max_relative = 1e-14);
    let (h0, hx) = m.hamiltonian(PI, 0.0);
    assert_relative_eq!(h0, 0.2, max_relative = 1e-14);
    assert!(hx.abs() < 1e-15);
    for f in [0.1, 0.37, 0.8] {
        let (kx, ky) = (PI - f * PI / 2.0, f * PI / 2.0);
        assert_relative_eq!(m.dispersion(kx, ky).unwrap(), 0.2, max_relative = 1e-12);
    }
}

#[test]
fn structure_factor_sum_rule() {
    let m = SpinWaveModel::new(0.1, 0.02, 0.5).unwrap();
    let (kx, ky) = (1.1, 0.4);
    let e = m.dispersion(kx, ky).unwrap();
    let hw = 2e-3;
    let n = 20001;
    let (lo, hi) = (e - 0.05, e + 0.05);
    let h = (hi - lo) / (n - 1) as f64;
    let omegas: Vec<f64> = (0..n).map(|i| lo + i as f64 * h).collect();
    let s = m.structure_factor(kx, ky, &omegas, hw, Broadening::Gaussian).unwrap();
    let integral = h * (s.iter().sum::<f64>() - 0.5 * (s[0] + s[n - 1]));
    assert_relative_eq!(integral, m.structure_factor_weight(kx, ky), max_relative = 1e-6);
}
