use cavityj::dielectric::DielectricModel;
use cavityj::exchange::*;
use cavityj::fp::FabryPerot;
use cavityj::kernel::{DeltaComb, Kernel, Regularizer};
use cavityj::single_mode;
use cavityj::spinwave::SpinWaveModel;
use cavityj::surface::{self, SurfaceCavity};
use cavityj::units::HBAR_C;
use proptest::prelude::*;

const U: f64 = 5.0;

fn laplace(modes: &[(f64, f64)]) -> f64 {
    let k = DeltaComb::new(modes.to_vec(), 0.0).unwrap();
    dynamical(&k.nodes().unwrap(), U, 1e-12).unwrap().ratio
}

fn substrate() -> impl Strategy<Value = DielectricModel> {
    prop_oneof![
        (1.0..20.0f64).prop_map(|wp| DielectricModel::drude(wp).unwrap()),
        (1.0..10.0f64, 0.01..0.2f64, 1.2..5.0f64)
            .prop_map(|(e, to, r)| DielectricModel::lorentzian(e, to, to * r).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn oracle_matches_laplace(spec in prop::collection::vec((0.2..3.0f64, 0.01..0.3f64), 1..=3)) {
        let modes: Vec<Mode> = spec.iter().map(|&(r, g)| Mode::new(r * U, g, 0.0).unwrap()).collect();
        let o = multinomial_oracle(&modes, U, None).unwrap();
        let l = laplace(&spec.iter().map(|&(r, g)| (r * U, g)).collect::<Vec<_>>());
        prop_assert!((o / l - 1.0).abs() < 1e-8, "oracle {o} vs laplace {l}");
    }

    #[test]
    fn single_mode_triangle(g2 in 0.0..0.3f64, theta in 0.05..5.0f64) {
        let cf = single_mode::closed_form(g2, theta).unwrap();
        let cs = single_mode::coupling_series(g2, theta).unwrap();
        let q = laplace(&[(theta * U, g2)]);
        prop_assert!((cf - cs).abs() < 1e-8);
        prop_assert!((cf - q).abs() < 1e-8);
    }

    #[test]
    fn dressing_only_suppresses(g2 in 0.0..2.0f64, dg in 0.001..0.5f64, theta in 0.01..5.0f64, dt in 0.01..1.0f64) {
        let j = single_mode::closed_form(g2, theta).unwrap();
        prop_assert!(j <= 1.0 && j > 0.0);
        prop_assert!(single_mode::closed_form(g2 + dg, theta).unwrap() < j);
        if g2 > 0.0 {
            prop_assert!(single_mode::closed_form(g2, theta + dt).unwrap() < j);
        }
    }

    #[test]
    fn kernel_linear_in_prefactor(z in 1.0..50.0f64, p0 in 1e-9..1e-6f64) {
        let c = SurfaceCavity::new(DielectricModel::drude(9.45).unwrap(), z).unwrap();
        let a = c.kernel(p0, Regularizer::NONE).nodes().unwrap();
        let b = c.kernel(2.0 * p0, Regularizer::NONE).nodes().unwrap();
        for p in 0..3 {
            prop_assert!((b.moment(p) / a.moment(p) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fp_gap_below_fundamental(d in 200.0..100_000.0f64, f in 0.0..0.999f64, zf in 0.05..0.95f64) {
        let fp = FabryPerot::new(d, zf * d).unwrap();
        let w = f * fp.omega_c();
        prop_assert_eq!(fp.pdos_parallel(w), 0.0);
        prop_assert!(fp.pdos_perp(w) >= 0.0);
    }

    #[test]
    fn fp_suppresses_exchange(d in 300.0..30_000.0f64) {
        let p0 = cavityj::units::p0_rho0(0.6).unwrap();
        let k = FabryPerot::centered(d).unwrap().kernel(p0, Regularizer::from_cutoff(20.0).unwrap()).unwrap();
        let r = exchange_resummed(&HubbardBond::new(0.5, U, 0.6).unwrap(), &k, Screening::NONE, Default::default()).unwrap();
        prop_assert!(r.delta_j_over_j0 < 0.0);
    }

    #[test]
    fn surface_dispersion_monotone(m in substrate(), a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let q0 = m.omega_to() / HBAR_C;
        let qmax = 50.0 * surface::limit_frequency(&m) / HBAR_C + q0;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-6);
        let (q1, q2) = (q0 + lo * (qmax - q0), q0 + hi * (qmax - q0));
        let (w1, w2) = (surface::dispersion(&m, q1), surface::dispersion(&m, q2));
        prop_assert!(w1 <= w2);
        prop_assert!(w2 < surface::limit_frequency(&m));
        prop_assert!(w2 < HBAR_C * q2);
    }

    #[test]
    fn image_charge_weakens_with_height(m in substrate(), z in 0.5..50.0f64, dz in 0.1..10.0f64) {
        let b = HubbardBond::new(0.5, U, 0.6).unwrap();
        let near = delta_u_image_charge(&b, &m, z).unwrap().delta_u;
        let far = delta_u_image_charge(&b, &m, z + dz).unwrap().delta_u;
        prop_assert!(near < far && far <= 0.0);
    }

    #[test]
    fn bogoliubov_para_unitary(
        j in 0.01..0.2f64,
        kr in 0.0..0.2f64,
        spin in prop_oneof![Just(0.5), Just(1.0), Just(1.5)],
        kx in -3.0..3.0f64,
        ky in -3.0..3.0f64,
    ) {
        let m = SpinWaveModel::new(j, kr * j, spin).unwrap();
        let b = m.bogoliubov(kx, ky).unwrap();
        prop_assert!(b.para_unitarity_residual() < 1e-10);
        prop_assert!(m.diagonalization_residual(kx, ky).unwrap() < 1e-10);
        prop_assert!(m.dispersion(kx, ky).unwrap() >= 0.0);
    }

    #[test]
    fn variational_optimum(spec in prop::collection::vec((0.01..10.0f64, 0.0..0.5f64, 0.0..1.0f64), 1..=4)) {
        let bond = HubbardBond::new(0.5, U, 0.6).unwrap();
        let modes: Vec<Mode> = spec.iter().map(|&(w, g, f)| Mode::new(w, g, f * g).unwrap()).collect();
        let v = variational_exchange(&bond, &modes).unwrap();
        prop_assert!(v.residual < 1e-8);
        prop_assert!(v.j_over_j0 >= v.bound_s1_over_j0 * (1.0 - 1e-14));
        let g: f64 = modes.iter().map(|m| m.g2).sum();
        let s0 = (-0.5 * g).exp() * U / (U + v.delta_u);
        prop_assert!(v.j_over_j0 >= s0 * (1.0 - 1e-14));
    }
}
