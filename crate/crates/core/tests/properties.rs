mod common;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

use common::{random_units, random_wave, rel};
use zcwell_core::analysis::{envelope_constant, kinetic_expectation, momentum_density, potential_expectation};
use zcwell_core::design::{critical_strengths, DesignOptions};
use zcwell_core::PiecewiseLinearWave;

fn design_inputs() -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), 3usize..=20)
}

fn wave_from(seed: u64, knots: usize) -> (PiecewiseLinearWave, zcwell_core::UnitSystem) {
    let mut rng = StdRng::seed_from_u64(seed);
    let w = random_wave(&mut rng, knots);
    (w, random_units(&mut rng))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn scaling_multiplies_norm((seed, n) in design_inputs(), lambda in -10.0f64..10.0) {
        let (w, _) = wave_from(seed, n);
        let s = w.scale(lambda);
        prop_assert!(rel(s.norm_squared(), lambda * lambda * w.norm_squared()) < 1e-13);
        for (a, b) in s.knots().iter().zip(w.knots()) {
            prop_assert_eq!(a.x, b.x);
        }
    }

    #[test]
    fn normalized_has_unit_norm((seed, n) in design_inputs()) {
        let (w, _) = wave_from(seed, n);
        let u = w.normalize().unwrap();
        prop_assert!((u.norm_squared() - 1.0).abs() < 1e-14);
        prop_assert_eq!(u.normalize().unwrap(), u);
    }

    #[test]
    fn strengths_ignore_amplitude((seed, n) in design_inputs(), lambda in -10.0f64..10.0) {
        prop_assume!(lambda.abs() > 1e-3);
        let (w, units) = wave_from(seed, n);
        let g = critical_strengths(&w, &units, DesignOptions::default()).unwrap().strengths();
        let gs = critical_strengths(&w.scale(lambda), &units, DesignOptions::default()).unwrap().strengths();
        prop_assert_eq!(g.len(), gs.len());
        for (a, b) in g.iter().zip(&gs) {
            prop_assert!(rel(*a, *b) < 1e-12, "{} vs {}", a, b);
        }
        let g2 = critical_strengths(&w.scale(2.0), &units, DesignOptions::default()).unwrap().strengths();
        prop_assert_eq!(&g, &g2);
    }

    #[test]
    fn mirror_reverses_spikes((seed, n) in design_inputs()) {
        let (w, units) = wave_from(seed, n);
        let d = critical_strengths(&w, &units, DesignOptions::default()).unwrap();
        let m = critical_strengths(&w.reflect(), &units, DesignOptions::default()).unwrap();
        let a = w.width();
        let fwd = d.potential().spikes();
        let rev = m.potential().spikes();
        prop_assert_eq!(fwd.len(), rev.len());
        for (s, r) in fwd.iter().zip(rev.iter().rev()) {
            prop_assert!((s.position - (a - r.position)).abs() < 1e-14 * a);
            prop_assert!(rel(s.strength, r.strength) < 1e-11);
        }
    }

    #[test]
    fn designs_have_zero_energy((seed, n) in design_inputs()) {
        let (w, units) = wave_from(seed, n);
        let d = critical_strengths(&w, &units, DesignOptions::default()).unwrap();
        let e = kinetic_expectation(&d);
        let scale = e.kinetic_gradient.abs().max(1.0);
        prop_assert!(e.total.abs() < 1e-13 * scale * n as f64, "total {}", e.total);
        prop_assert!(rel(e.kinetic_gradient, e.kinetic_distributional) < 1e-12);
        prop_assert!(rel(e.potential, potential_expectation(&d)) == 0.0);
        prop_assert!(e.kinetic_gradient > 0.0);
    }

    #[test]
    fn momentum_density_under_envelope((seed, n) in design_inputs(), p in 0.5f64..500.0) {
        let (w, units) = wave_from(seed, n);
        let d = critical_strengths(&w, &units, DesignOptions::default()).unwrap();
        let c = envelope_constant(&d);
        let rho = momentum_density(&d, p);
        prop_assert!(rho >= 0.0);
        prop_assert!(rho * p.powi(4) <= c * (1.0 + 1e-12), "{} > {}", rho * p.powi(4), c);
        // density is even in p for a real wave
        prop_assert!(rel(rho, momentum_density(&d, -p)) < 1e-12);
    }
}

#[test]
fn kinetic_forms_for_hand_built_wave() {
    // psi = (0,0) (0.2,1) (0.6,-0.5) (1,0): slopes 5, -3.75, 1.25
    let w = PiecewiseLinearWave::dirichlet_from_interior(1.0, &[(0.2, 1.0), (0.6, -0.5)]).unwrap();
    let units = zcwell_core::UnitSystem::new(1.0, 1.0).unwrap();
    let d = critical_strengths(&w, &units, DesignOptions::default()).unwrap();
    let n2 = w.norm_squared();
    let grad = (25.0 * 0.2 + 3.75f64.powi(2) * 0.4 + 1.25f64.powi(2) * 0.4) / n2 / 2.0;
    let e = kinetic_expectation(&d);
    assert!(rel(e.kinetic_gradient, grad) < 1e-14);
    assert!(rel(e.potential, -grad) < 1e-14);
}
