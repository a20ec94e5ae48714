#![allow(dead_code)]

use rand::Rng;
use zcwell_core::{Knot, PiecewiseLinearWave, UnitSystem, WellDomain};

/// Dirichlet wave with `knots` knots in total (walls included). Interior
/// knots are at least `width / 100` apart and their amplitudes stay at
/// least 0.05 away from zero.
pub fn random_wave(rng: &mut impl Rng, knots: usize) -> PiecewiseLinearWave {
    let width = rng.gen_range(0.5..3.0);
    let interior = knots - 2;
    let min_gap = width / 100.0;
    let free = width - min_gap * (interior + 1) as f64;
    let mut cuts: Vec<f64> = (0..interior).map(|_| rng.gen_range(0.0..free)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut pts = vec![Knot::new(0.0, 0.0)];
    for (i, c) in cuts.iter().enumerate() {
        let x = c + min_gap * (i + 1) as f64;
        let mag = rng.gen_range(0.05..1.0);
        let psi = if rng.gen_bool(0.8) { mag } else { -mag };
        pts.push(Knot::new(x, psi));
    }
    pts.push(Knot::new(width, 0.0));
    PiecewiseLinearWave::new(WellDomain::dirichlet(width).unwrap(), pts).unwrap()
}

pub fn random_units(rng: &mut impl Rng) -> UnitSystem {
    UnitSystem::new(rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0)).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// `∫_0^a psi(x) e^{-i p x / hbar} dx / sqrt(2 pi hbar)` by composite
/// Simpson on every linear segment.
pub fn phi_by_quadrature(wave: &PiecewiseLinearWave, hbar: f64, p: f64, panels: usize) -> (f64, f64) {
    let (mut re, mut im) = (0.0, 0.0);
    for seg in wave.knots().windows(2) {
        let (x0, x1) = (seg[0].x, seg[1].x);
        let h = (x1 - x0) / (2 * panels) as f64;
        for i in 0..=2 * panels {
            let x = x0 + i as f64 * h;
            let t = (x - x0) / (x1 - x0);
            let psi = seg[0].psi + t * (seg[1].psi - seg[0].psi);
            let w = if i == 0 || i == 2 * panels {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let ph = p * x / hbar;
            re += w * psi * ph.cos() * h / 3.0;
            im -= w * psi * ph.sin() * h / 3.0;
        }
    }
    let norm = 1.0 / (2.0 * std::f64::consts::PI * hbar).sqrt();
    (re * norm, im * norm)
}
