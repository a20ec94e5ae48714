//! Asymmetric infinite square well: `V = 0` on a region of width `a`, a step
//! `V0` on the adjoining region of width `b`, hard walls outside.
//!
//! Internally the well occupies `[0, a + b]` with the step at `x = a`.
//!
//! The eigenvalue conditions are used in a pole-free, continuously
//! normalized form. With `k`, `q`, `kappa` the wavenumbers in the two regions,
//!
//! ```text
//! E > V0:  F = sin(ka) cos(qb)       + k cos(ka) sin(qb)/q
//! E < V0:  F = sin(ka)               + k cos(ka) tanh(kappa b)/kappa
//! E = V0:  F = sin(chi a)            + chi b cos(chi a)
//! ```
//!
//! which are the tangent conditions multiplied through by positive factors,
//! so the roots are unchanged and `F` is smooth through `E = V0`.

use serde::Serialize;

use crate::error::{Result, ZcError};
use crate::model::UnitSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymmetricWell {
    pub a: f64,
    pub b: f64,
    pub v0: f64,
}

impl AsymmetricWell {
    pub fn new(a: f64, b: f64, v0: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
            return Err(ZcError::Domain(format!(
                "region widths must be positive (a = {a}, b = {b})"
            )));
        }
        if !(v0 >= 0.0 && v0.is_finite()) {
            return Err(ZcError::Domain(format!("step height must be non-negative, got {v0}")));
        }
        Ok(AsymmetricWell { a, b, v0 })
    }

    pub fn width(&self) -> f64 {
        self.a + self.b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    #[serde(rename = "above")]
    AboveStep,
    #[serde(rename = "below")]
    BelowStep,
    Threshold,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::AboveStep => "above",
            Regime::BelowStep => "below",
            Regime::Threshold => "threshold",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyLevel {
    pub index: usize,
    pub energy: f64,
    pub regime: Regime,
}

/// `|E - V0|` below which a level is classified as a threshold state.
pub fn threshold_tolerance(well: &AsymmetricWell, units: &UnitSystem) -> f64 {
    1e-9 * well.v0.max(units.kinetic_prefactor() / (well.a * well.a))
}

pub fn classify(well: &AsymmetricWell, units: &UnitSystem, energy: f64) -> Regime {
    if (energy - well.v0).abs() <= threshold_tolerance(well, units) {
        Regime::Threshold
    } else if energy > well.v0 {
        Regime::AboveStep
    } else {
        Regime::BelowStep
    }
}

/// `sin(q b) / q`, finite at `q = 0`.
fn sin_over(q: f64, b: f64) -> f64 {
    let x = q * b;
    if x.abs() < 1e-4 {
        let x2 = x * x;
        b * (1.0 - x2 / 6.0 + x2 * x2 / 120.0)
    } else {
        (q * b).sin() / q
    }
}

/// `tanh(kappa b) / kappa`, finite at `kappa = 0`.
fn tanh_over(kappa: f64, b: f64) -> f64 {
    let x = kappa * b;
    if x.abs() < 1e-4 {
        let x2 = x * x;
        b * (1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0)
    } else {
        (kappa * b).tanh() / kappa
    }
}

/// Zero-curvature condition `sin(chi a) + chi b cos(chi a)`.
pub fn zc_condition(a: f64, b: f64, chi: f64) -> f64 {
    (chi * a).sin() + chi * b * (chi * a).cos()
}

/// Normalized eigenvalue residual at energy `E > 0`.
pub fn residual(well: &AsymmetricWell, units: &UnitSystem, energy: f64) -> Result<f64> {
    if !(energy > 0.0) {
        return Err(ZcError::Domain(format!("energy must be positive, got {energy}")));
    }
    Ok(residual_unchecked(well, units, energy))
}

fn residual_unchecked(well: &AsymmetricWell, units: &UnitSystem, energy: f64) -> f64 {
    let k = units.wavenumber(energy);
    let (ka, b) = (k * well.a, well.b);
    if energy >= well.v0 {
        let q = units.wavenumber(energy - well.v0);
        ka.sin() * (q * b).cos() + k * ka.cos() * sin_over(q, b)
    } else {
        let kappa = units.wavenumber(well.v0 - energy);
        ka.sin() + k * ka.cos() * tanh_over(kappa, b)
    }
}

/// Bisection on a sign change, to relative tolerance `rel_tol` in `x`.
pub(crate) fn bisect(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
) -> f64 {
    let mut flo = f(lo);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || (hi - lo) <= rel_tol * mid.abs() {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Scan points in wavenumber `k`: a uniform grid, the same grid mapped
/// from the step-region wavenumber above the step, and the threshold itself.
fn scan_wavenumbers(well: &AsymmetricWell, units: &UnitSystem, k_max: f64) -> Vec<f64> {
    let step = std::f64::consts::PI / (16.0 * well.width());
    let chi = units.wavenumber(well.v0);
    let mut ks: Vec<f64> = (1..)
        .map(|j| j as f64 * step)
        .take_while(|&k| k <= k_max)
        .collect();
    if chi > 0.0 && chi < k_max {
        ks.push(chi);
        ks.extend(
            (1..)
                .map(|j| (chi * chi + (j as f64 * step).powi(2)).sqrt())
                .take_while(|&k| k <= k_max),
        );
    }
    ks.push(k_max);
    ks.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ks.dedup();
    ks
}

/// Lowest `count` eigenvalues, bracketed on a phase-resolved scan and
/// refined by bisection to relative tolerance `1e-12`.
pub fn solve_levels(well: &AsymmetricWell, units: &UnitSystem, count: usize) -> Result<Vec<EnergyLevel>> {
    if count == 0 {
        return Err(ZcError::Domain("level count must be at least 1".into()));
    }
    // the n-th level lies below the n-th level of a hard-walled well of width a
    let k_max = (count as f64 + 1.0) * std::f64::consts::PI / well.a;
    let energy = |k: f64| k * k / (2.0 * units.mass) * units.hbar * units.hbar;
    let f = |e: f64| residual_unchecked(well, units, e);

    let ks = scan_wavenumbers(well, units, k_max);
    let mut roots = Vec::with_capacity(count);
    let mut prev_e = energy(ks[0]);
    let mut prev_f = f(prev_e);
    if prev_f == 0.0 {
        roots.push(prev_e);
    }
    for &k in &ks[1..] {
        if roots.len() >= count {
            break;
        }
        let e = energy(k);
        let fe = f(e);
        if fe == 0.0 {
            roots.push(e);
        } else if prev_f != 0.0 && (fe > 0.0) != (prev_f > 0.0) {
            roots.push(bisect(f, prev_e, e, 1e-12));
        }
        prev_e = e;
        prev_f = fe;
    }
    if roots.len() < count {
        return Err(ZcError::BracketExhausted { ceiling: energy(k_max) });
    }
    roots.truncate(count);
    Ok(roots
        .into_iter()
        .enumerate()
        .map(|(i, e)| EnergyLevel {
            index: i + 1,
            energy: e,
            regime: classify(well, units, e),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZcTuning {
    pub branch: usize,
    pub chi: f64,
    pub v0: f64,
}

/// Step height for which `E = V0` is an eigenvalue, on branch `n`.
///
/// The root `chi_n` of `sin(chi a) + chi b cos(chi a)` lies strictly inside
/// `((2n+1) pi / 2a, (n+1) pi / a)`, where the function changes sign.
pub fn solve_zc_v0(a: f64, b: f64, branch: usize, units: &UnitSystem) -> Result<ZcTuning> {
    AsymmetricWell::new(a, b, 0.0)?;
    let (lo, hi) = zc_bracket(a, branch);
    let chi = bisect(|chi| zc_condition(a, b, chi), lo, hi, 0.0);
    let v0 = units.hbar * units.hbar * chi * chi / (2.0 * units.mass);
    Ok(ZcTuning { branch, chi, v0 })
}

pub fn zc_bracket(a: f64, branch: usize) -> (f64, f64) {
    use std::f64::consts::PI;
    let n = branch as f64;
    ((2.0 * n + 1.0) * PI / (2.0 * a), (n + 1.0) * PI / a)
}

/// Threshold eigenstate of a tuned well: a sine in the free region joined
/// smoothly to a straight line that reaches zero at the far wall.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymZcWave {
    pub well: AsymmetricWell,
    pub chi: f64,
    /// Amplitude of the sine part.
    pub amplitude: f64,
    /// Value at the step.
    pub step_value: f64,
}

impl AsymZcWave {
    pub fn eval(&self, x: f64) -> f64 {
        let AsymmetricWell { a, b, .. } = self.well;
        if x <= a {
            self.amplitude * (self.chi * x).sin()
        } else {
            self.step_value * (1.0 - (x - a) / b)
        }
    }

    pub fn slope(&self, x: f64) -> f64 {
        let AsymmetricWell { a, b, .. } = self.well;
        if x < a {
            self.amplitude * self.chi * (self.chi * x).cos()
        } else {
            -self.step_value / b
        }
    }

    /// Value and slope mismatch between the two sides of the step.
    pub fn step_mismatch(&self) -> (f64, f64) {
        let AsymmetricWell { a, b, .. } = self.well;
        let value = self.amplitude * (self.chi * a).sin() - self.step_value;
        let slope = self.amplitude * self.chi * (self.chi * a).cos() + self.step_value / b;
        (value, slope)
    }

    /// Probabilities of the free region and the step region.
    pub fn region_probabilities(&self) -> (f64, f64) {
        self.region_integrals()
    }

    fn region_integrals(&self) -> (f64, f64) {
        let AsymmetricWell { a, b, .. } = self.well;
        let chi = self.chi;
        let left = self.amplitude.powi(2) * (0.5 * a - (2.0 * chi * a).sin() / (4.0 * chi));
        let right = self.step_value.powi(2) * b / 3.0;
        (left, right)
    }
}

/// Normalized threshold wave of a well whose `V0` satisfies the
/// zero-curvature condition.
pub fn zc_wave(well: &AsymmetricWell, units: &UnitSystem) -> Result<AsymZcWave> {
    let chi = units.wavenumber(well.v0);
    let g = zc_condition(well.a, well.b, chi);
    if chi == 0.0 || g.abs() > 1e-9 * (1.0 + chi * well.b) {
        return Err(ZcError::NotTuned { residual: g });
    }
    let s = (chi * well.a).sin();
    let unnorm = AsymZcWave { well: *well, chi, amplitude: 1.0, step_value: s };
    let (l, r) = unnorm.region_integrals();
    let amp = 1.0 / (l + r).sqrt();
    Ok(AsymZcWave { well: *well, chi, amplitude: amp, step_value: amp * s })
}

/// Large-`chi` limits `(3a, 2b) / (3a + 2b)` of the region probabilities.
pub fn limiting_probabilities(a: f64, b: f64) -> (f64, f64) {
    (3.0 * a / (3.0 * a + 2.0 * b), 2.0 * b / (3.0 * a + 2.0 * b))
}
