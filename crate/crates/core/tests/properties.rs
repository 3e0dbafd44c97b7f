mod common;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use proptest::prelude::*;
use quenchcorr_core::oracle::mode_oracle;
use quenchcorr_core::{
    concurrence, correlators, dispersion, evolution_coeffs, local_state, mode_observables, quantum_discord,
    quantum_discord_with, thermal_mode_coeffs, two_site_state, von_neumann_entropy, Beta, CorrelatorSet,
    DiscordOptions, Grid, ModelParams, Site, Time,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn beta() -> impl Strategy<Value = Beta> {
    prop_oneof![Just(Beta::Infinite), (0.0..8.0f64).prop_map(Beta::Finite)]
}

fn params() -> impl Strategy<Value = ModelParams> {
    (0.0..3.0f64, 0.0..3.0f64, 0.0..=1.0f64, 0.3..2.0f64, beta())
        .prop_map(|(j1, j2, g, h, b)| ModelParams::new(j1, j2, g).with_h(h).with_beta(b))
}

fn phi() -> impl Strategy<Value = f64> {
    1e-6..(PI - 1e-6)
}

fn entropy2(m: &nalgebra::Matrix2<num_complex::Complex64>) -> f64 {
    von_neumann_entropy(&DMatrix::from_fn(2, 2, |i, j| m[(i, j)]))
}

proptest! {
    #[test]
    fn evolution_is_unitary(p in params(), phi in phi(), t in 0.0..50.0f64) {
        let v = evolution_coeffs(&p, phi, t).unwrap();
        prop_assert!((v.v11.norm_sqr() + v.v12 * v.v12 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thermal_block_is_positive(p in params(), phi in phi()) {
        let k = thermal_mode_coeffs(&p, phi).unwrap();
        prop_assert!(k.k11 >= 0.0 && k.k22 >= 0.0 && k.k33 >= 0.0 && k.k33 == k.k44);
        prop_assert!(k.k11 * k.k22 - k.k12.norm_sqr() >= -1e-12 * k.e0 * k.e0);
        prop_assert!((k.e0 - (k.k11 + k.k22 + k.k33 + k.k44)).abs() < 1e-12 * k.e0);
        prop_assert_eq!(k.k12.re, 0.0);
    }

    #[test]
    fn large_beta_approaches_ground_state(p in params(), phi in phi()) {
        let lambda = dispersion(p.j1, p.gamma, p.h, phi);
        prop_assume!(lambda > 1e-3);
        let cold = thermal_mode_coeffs(&p.with_beta(Beta::Infinite), phi).unwrap();
        let warm = thermal_mode_coeffs(&p.with_beta(Beta::Finite(1e6)), phi).unwrap();
        let pairs = [(cold.k11, warm.k11), (cold.k22, warm.k22), (cold.k33, warm.k33), (cold.k12.im, warm.k12.im)];
        for (a, b) in pairs {
            prop_assert!((a / cold.e0 - b / warm.e0).abs() < 1e-9);
        }
    }

    #[test]
    fn dispersion_vanishes_only_at_the_gap_closing(j in 0.0..3.0f64, g in 0.0..=1.0f64, h in 0.1..2.0f64, phi in 0.0..=PI) {
        let lambda = dispersion(j, g, h, phi);
        prop_assert!(lambda >= 0.0);
        let closed = j * phi.cos() == h && j * g * phi.sin() == 0.0;
        prop_assert_eq!(lambda == 0.0, closed);
        prop_assert_eq!(dispersion(h, g, h, 0.0), 0.0);
    }

    #[test]
    fn mode_oracle_agrees_with_closed_form(p in params(), phi in phi(), t in 0.0..20.0f64) {
        let o = mode_oracle(&p, phi, t).unwrap();
        let a = mode_observables(&p, phi, Time::At(t));
        prop_assert!((o.occupation - a.occupation).abs() < 1e-10);
        prop_assert!((o.pairing - a.pairing).norm() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn correlators_are_bounded_and_physical(p in params(), t in prop_oneof![Just(f64::INFINITY), 0.0..10.0f64]) {
        let c = correlators(&p.with_time(Time::from_value(t)), Grid::Thermodynamic).unwrap();
        for v in c.values() {
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&v));
        }
        let s = two_site_state(&c).unwrap();
        prop_assert!((local_state(&s, Site::A) - local_state(&s, Site::B)).iter().all(|z| z.norm() < 1e-15));
    }
}

proptest! {
    #[test]
    fn assembly_round_trips(m in -0.2..0.2f64, xx in -0.2..0.2f64, yy in -0.2..0.2f64, zz in -0.2..0.2f64, xy in -0.2..0.2f64) {
        let corr = CorrelatorSet::from_values(m, xx, yy, zz, xy, ModelParams::new(0.0, 0.0, 0.5), Grid::Thermodynamic);
        let s = two_site_state(&corr).unwrap();
        prop_assert!(s.eig_floor > 0.0);
        let (a, b, t) = s.correlation_tensor();
        let tol = 1e-15;
        prop_assert!(a[0].abs() < tol && a[1].abs() < tol && (a[2] - m).abs() < tol);
        prop_assert!(b[0].abs() < tol && b[1].abs() < tol && (b[2] - m).abs() < tol);
        prop_assert!((t[0][0] - xx).abs() < tol && (t[1][1] - yy).abs() < tol && (t[2][2] - zz).abs() < tol);
        prop_assert!((t[0][1] - xy).abs() < tol && (t[1][0] - xy).abs() < tol);
        prop_assert!(t[0][2].abs() < tol && t[2][0].abs() < tol && t[1][2].abs() < tol && t[2][1].abs() < tol);
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = mix_with_identity(&random_pure(&mut rng), 0.3);
        let c0 = concurrence(&s);
        prop_assert!((0.0..=1.0).contains(&c0));
        for _ in 0..20 {
            let r = local_rotation(&s, &random_unitary(&mut rng), &random_unitary(&mut rng));
            prop_assert!((concurrence(&r) - c0).abs() < 1e-9);
        }
    }

    #[test]
    fn mixing_with_noise_never_adds_entanglement(seed in any::<u64>(), w in 0.0..1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_pure(&mut rng);
        let mixed = mix_with_identity(&s, w);
        prop_assert!(concurrence(&mixed) <= (1.0 - w) * concurrence(&s) + 1e-12);
        prop_assert!(concurrence(&mix_with_identity(&s, w.max(2.0 / 3.0))) == 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn discord_of_pure_states_is_marginal_entropy(seed in any::<u64>()) {
        let s = random_pure(&mut ChaCha8Rng::seed_from_u64(seed));
        let sa = entropy2(&local_state(&s, Site::A));
        prop_assert!((quantum_discord(&s).discord - sa).abs() < 1e-6);
    }

    #[test]
    fn discord_of_product_states_vanishes(seed in any::<u64>()) {
        let s = random_product(&mut ChaCha8Rng::seed_from_u64(seed));
        let q = quantum_discord(&s);
        prop_assert!(q.discord.abs() < 1e-7);
        prop_assert!(q.mutual_info.abs() < 1e-9);
    }

    #[test]
    fn discord_bookkeeping(seed in any::<u64>(), w in 0.0..0.9f64) {
        let s = mix_with_identity(&random_pure(&mut ChaCha8Rng::seed_from_u64(seed)), w);
        let q = quantum_discord(&s);
        let cert = q.opt_certificate;
        prop_assert!(cert.refined_min <= cert.grid_min);
        prop_assert!(q.discord >= 0.0);
        if q.discord > 0.0 {
            prop_assert!((q.discord - (q.mutual_info - q.classical_corr)).abs() < 1e-9);
        }
        let bound = entropy2(&local_state(&s, Site::A)).min(entropy2(&local_state(&s, Site::B)));
        prop_assert!(q.discord <= bound + 1e-6);
        prop_assert!((0.0..=2.0 + 1e-12).contains(&q.mutual_info));
    }

    #[test]
    fn discord_is_insensitive_to_grid_density(seed in any::<u64>(), w in 0.0..0.9f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_pure(&mut rng);
        let b = random_pure(&mut rng);
        let rho = (a.rho + b.rho) * c(0.5);
        let s = mix_with_identity(&quenchcorr_core::TwoSiteState::from_density(rho).unwrap(), w);
        let coarse = quantum_discord(&s).discord;
        let fine = quantum_discord_with(&s, &DiscordOptions { theta_points: 121, phi_points: 241, ..DiscordOptions::default() }).discord;
        prop_assert!((coarse - fine).abs() < 1e-6, "{} vs {}", coarse, fine);
    }
}
