//! Closed-form observables of a zero-curvature design.
//!
//! Everything here works on segment data of the piecewise-linear wave.
//! Because `psi''` is a sum of delta functions at the knots, the Fourier
//! transform of the wave reduces to a finite sum over slope jumps:
//!
//! ```text
//! phi(p) = (2 pi hbar)^(-1/2) [ (hbar/p)^2 sum_j (-jump_j) e^{-i p x_j / hbar}
//!                               + (i hbar/p) (psi(a) e^{-i p a/hbar} - psi(0)) ]
//! ```
//!
//! where the jumps include the walls (slope `0` outside the well). The
//! second line vanishes for waves that are zero at both ends.

use serde::Serialize;

use crate::design::{kinks, ZcDesign};
use crate::error::{Result, ZcError};
use crate::model::PiecewiseLinearWave;
use crate::quad::{cosine_over_square_tail, paneled_simpson};

/// Below this value of `|p| a / hbar` the transform is evaluated from its
/// Taylor series in position moments.
pub const SMALL_MOMENTUM: f64 = 0.5;
const TAYLOR_TERMS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub potential: f64,
    /// `(hbar^2/2m) ∫ |psi'|^2`
    pub kinetic_gradient: f64,
    /// `-(hbar^2/2m) ∫ psi psi''` with `psi''` a sum of deltas
    pub kinetic_distributional: f64,
    pub total: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumSample {
    pub p: f64,
    pub phi_re: f64,
    pub phi_im: f64,
    pub density: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentumMoments {
    /// Zero for any real wave.
    pub mean_p: f64,
    /// `2m <T>`, exact.
    pub p2_analytic: f64,
    /// `∫ p^2 |phi|^2 dp` by adaptive quadrature on `[-P, P]` plus the
    /// closed-form tail beyond `P`.
    pub p2_quadrature: f64,
    /// Closed-form contribution of `|p| > P` included in `p2_quadrature`.
    pub p2_tail: f64,
    pub delta_p: f64,
    /// `∫ |phi|^2 dp` over `[-P, P]`.
    pub norm_quadrature: f64,
    /// Envelope bound on the probability beyond `|p| > P`.
    pub norm_tail_bound: f64,
    pub cutoff: f64,
    /// Accumulated quadrature error estimate.
    pub quadrature_error: f64,
}

/// `sum_i g_i |psi(c_i)|^2`.
pub fn potential_expectation(design: &ZcDesign) -> f64 {
    let wave = design.wave();
    design
        .potential()
        .spikes()
        .iter()
        .map(|s| {
            let psi = wave.eval_unchecked(s.position);
            s.strength * psi * psi
        })
        .sum()
}

/// Kinetic energy by both routes, plus the potential term and their sum.
pub fn kinetic_expectation(design: &ZcDesign) -> EnergyBreakdown {
    let wave = design.wave();
    let pre = design.units().kinetic_prefactor();
    let gradient: f64 = wave
        .knots()
        .windows(2)
        .map(|p| {
            let dx = p[1].x - p[0].x;
            let s = (p[1].psi - p[0].psi) / dx;
            s * s * dx
        })
        .sum();
    let distributional: f64 = kinks(wave).iter().map(|k| k.jump * k.psi).sum();
    let potential = potential_expectation(design);
    let kinetic_gradient = pre * gradient;
    EnergyBreakdown {
        potential,
        kinetic_gradient,
        kinetic_distributional: -pre * distributional,
        total: potential + kinetic_gradient,
    }
}

/// Slope jumps of the wave viewed as a function on the whole line (zero
/// outside the well), walls included.
fn line_kinks(wave: &PiecewiseLinearWave) -> Vec<(f64, f64)> {
    let knots = wave.knots();
    let slopes = wave.slopes();
    let n = knots.len();
    let mut out = Vec::with_capacity(n);
    out.push((knots[0].x, slopes[0]));
    for i in 1..n - 1 {
        out.push((knots[i].x, slopes[i] - slopes[i - 1]));
    }
    out.push((knots[n - 1].x, -slopes[n - 2]));
    out
}

/// `∫_0^a psi(x) x^n dx / a^(n+1)` for `n < TAYLOR_TERMS`, expanded about
/// each segment midpoint so steep segments do not cancel.
fn scaled_moments(wave: &PiecewiseLinearWave) -> [f64; TAYLOR_TERMS] {
    let a = wave.width();
    let mut binom = [[0.0f64; TAYLOR_TERMS]; TAYLOR_TERMS];
    for n in 0..TAYLOR_TERMS {
        binom[n][0] = 1.0;
        for j in 1..=n {
            binom[n][j] = binom[n - 1][j - 1] + if j < n { binom[n - 1][j] } else { 0.0 };
        }
    }
    let mut m = [0.0; TAYLOR_TERMS];
    for seg in wave.knots().windows(2) {
        let (x0, x1) = (seg[0].x / a, seg[1].x / a);
        let half = 0.5 * (x1 - x0);
        let mid = 0.5 * (x0 + x1);
        let mean = 0.5 * (seg[0].psi + seg[1].psi);
        let beta = (seg[1].psi - seg[0].psi) / (x1 - x0);
        // s_j = ∫_{-half}^{half} s^j ds
        let mut s = [0.0; TAYLOR_TERMS + 1];
        for (j, sj) in s.iter_mut().enumerate() {
            if j % 2 == 0 {
                *sj = 2.0 * half.powi(j as i32 + 1) / (j as f64 + 1.0);
            }
        }
        for n in 0..TAYLOR_TERMS {
            let mut acc = 0.0;
            for j in 0..=n {
                acc += binom[n][j] * mid.powi((n - j) as i32) * (mean * s[j] + beta * s[j + 1]);
            }
            m[n] += acc;
        }
    }
    m
}

/// `∫_0^a psi(x) e^{-i k x} dx` as `(re, im)`.
pub(crate) fn wave_transform(wave: &PiecewiseLinearWave, k: f64) -> (f64, f64) {
    let a = wave.width();
    if (k * a).abs() < SMALL_MOMENTUM {
        let m = scaled_moments(wave);
        let ka = k * a;
        // sum (-i ka)^n m_n / n!
        let (mut re, mut im) = (0.0, 0.0);
        let mut coef = 1.0;
        for (n, mn) in m.iter().enumerate() {
            if n > 0 {
                coef *= ka / n as f64;
            }
            let t = coef * mn;
            match n % 4 {
                0 => re += t,
                1 => im -= t,
                2 => re -= t,
                _ => im += t,
            }
        }
        return (a * re, a * im);
    }
    let (mut re, mut im) = (0.0, 0.0);
    for (x, jump) in line_kinks(wave) {
        let phase = k * x;
        re -= jump * phase.cos();
        im += jump * phase.sin();
    }
    let inv2 = 1.0 / (k * k);
    let (mut bre, mut bim) = (0.0, 0.0);
    let knots = wave.knots();
    let (psi0, psia) = (knots[0].psi, knots[knots.len() - 1].psi);
    if psi0 != 0.0 || psia != 0.0 {
        // (i/k) (psi(a) e^{-i k a} - psi(0))
        let (cr, ci) = (psia * (k * a).cos() - psi0, -psia * (k * a).sin());
        bre = -ci / k;
        bim = cr / k;
    }
    (re * inv2 + bre, im * inv2 + bim)
}

/// Momentum-space wavefunction at momentum `p`.
pub fn momentum_wavefunction(design: &ZcDesign, p: f64) -> MomentumSample {
    let hbar = design.units().hbar;
    let (re, im) = wave_transform(design.wave(), p / hbar);
    let norm = 1.0 / (2.0 * std::f64::consts::PI * hbar).sqrt();
    let (phi_re, phi_im) = (re * norm, im * norm);
    MomentumSample {
        p,
        phi_re,
        phi_im,
        density: phi_re * phi_re + phi_im * phi_im,
    }
}

pub fn momentum_density(design: &ZcDesign, p: f64) -> f64 {
    momentum_wavefunction(design, p).density
}

/// `(hbar^3 / 2 pi) (sum_j |jump_j|)^2`, so that `|phi(p)|^2 p^4` never
/// exceeds it for waves vanishing at both ends.
pub fn envelope_constant(design: &ZcDesign) -> f64 {
    let hbar = design.units().hbar;
    let total: f64 = line_kinks(design.wave()).iter().map(|(_, j)| j.abs()).sum();
    hbar.powi(3) * total * total / (2.0 * std::f64::consts::PI)
}

/// Momentum moments, analytic and by quadrature.
///
/// The cutoff `P` is chosen so the envelope bound on the probability beyond
/// `|p| > P` is below `tail_tolerance`. The `p^2` integrand only decays as
/// `1/p^2`, so its contribution beyond `P` is added in closed form from the
/// cusp-sum representation.
pub fn momentum_moments(design: &ZcDesign, tail_tolerance: f64) -> Result<MomentumMoments> {
    if !(tail_tolerance > 0.0) {
        return Err(ZcError::Domain(format!(
            "tail tolerance must be positive, got {tail_tolerance}"
        )));
    }
    let wave = design.wave();
    let knots = wave.knots();
    if knots[0].psi != 0.0 || knots[knots.len() - 1].psi != 0.0 {
        return Err(ZcError::Domain(
            "momentum moments need a wave that vanishes at both ends of the well".into(),
        ));
    }
    let units = design.units();
    let hbar = units.hbar;
    let a = wave.width();
    let p2_analytic = 2.0 * units.mass * kinetic_expectation(design).kinetic_gradient;

    let c = envelope_constant(design);
    let cutoff = ((2.0 * c / (3.0 * tail_tolerance)).cbrt() * (1.0 + 1e-9)).max(10.0 * hbar / a);
    let norm_tail_bound = 2.0 * c / (3.0 * cutoff.powi(3));
    let panel = 0.25 * std::f64::consts::PI * hbar / a;

    let density = |p: f64| momentum_density(design, p);
    let norm = paneled_simpson(&density, 0.0, cutoff, panel, 1e-11)?;

    let second = |p: f64| p * p * momentum_density(design, p);
    // tolerance relative to a coarse pass
    let coarse = paneled_simpson(&second, 0.0, cutoff, panel, f64::INFINITY)?.value.abs();
    let p2 = paneled_simpson(&second, 0.0, cutoff, panel, 1e-10 * coarse.max(f64::MIN_POSITIVE))?;

    let kinks = line_kinks(wave);
    let mut tail = 0.0;
    for &(xj, gj) in &kinks {
        for &(xl, gl) in &kinks {
            tail += gj * gl * cosine_over_square_tail((xj - xl) / hbar, cutoff);
        }
    }
    // both signs of p, and the (2 pi hbar)^-1 hbar^4 prefactor of |phi|^2 p^2
    let p2_tail = 2.0 * hbar.powi(3) / (2.0 * std::f64::consts::PI) * tail;

    let p2_quadrature = 2.0 * p2.value + p2_tail;
    Ok(MomentumMoments {
        mean_p: 0.0,
        p2_analytic,
        p2_quadrature,
        p2_tail,
        delta_p: p2_analytic.sqrt(),
        norm_quadrature: 2.0 * norm.value,
        norm_tail_bound,
        cutoff,
        quadrature_error: 2.0 * (norm.error + p2.error),
    })
}

/// Samples of the wave on `count` evenly spaced points across the well.
pub fn position_samples(design: &ZcDesign, count: usize) -> Vec<(f64, f64)> {
    let wave = design.wave();
    let a = wave.width();
    if count < 2 {
        return vec![(0.0, wave.eval_unchecked(0.0))];
    }
    (0..count)
        .map(|i| {
            let x = if i + 1 == count { a } else { a * i as f64 / (count - 1) as f64 };
            (x, wave.eval_unchecked(x))
        })
        .collect()
}
