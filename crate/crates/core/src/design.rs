//! Critical delta strengths that turn a straight-line waveform into an exact
//! zero-energy eigenstate.
//!
//! Between knots a straight line has zero curvature, so it solves the free
//! Schrödinger equation at `E = 0`. At a knot where the slope jumps, a spike
//! `g delta(x - c)` supplies the jump through the cusp condition
//!
//! ```text
//! psi'(c+) - psi'(c-) = (2 m g / hbar^2) psi(c)
//! ```
//!
//! which fixes `g` uniquely whenever `psi(c) != 0`.

use serde::Serialize;

use crate::error::{Result, ZcError};
use crate::model::{
    Boundary, DeltaArrayPotential, DeltaSpike, Knot, PiecewiseLinearWave, UnitSystem, WellDomain,
};

/// Relative size below which a slope jump counts as float noise.
pub const SLOPE_JUMP_TOLERANCE: f64 = 1e-12;

/// Relative amplitude below which a knot value counts as a node.
pub const NODE_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DesignOptions {
    /// Permit a spike on the periodic seam `x = 0 ≡ a`.
    pub allow_seam_spike: bool,
}

/// A normalized wave together with the spikes that make it a zero mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ZcDesign {
    units: UnitSystem,
    wave: PiecewiseLinearWave,
    potential: DeltaArrayPotential,
}

impl ZcDesign {
    pub fn units(&self) -> &UnitSystem {
        &self.units
    }

    pub fn wave(&self) -> &PiecewiseLinearWave {
        &self.wave
    }

    pub fn potential(&self) -> &DeltaArrayPotential {
        &self.potential
    }

    pub fn domain(&self) -> &WellDomain {
        self.wave.domain()
    }

    pub fn strengths(&self) -> Vec<f64> {
        self.potential.spikes().iter().map(|s| s.strength).collect()
    }
}

/// Slope jump at one knot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Kink {
    pub index: usize,
    pub x: f64,
    pub psi: f64,
    /// slope to the right minus slope to the left
    pub jump: f64,
}

/// Slope jumps at every knot where one is defined under the wave's own
/// boundary condition.
///
/// Dirichlet waves get the wall kinks too (the slope outside the well is
/// zero). Periodic waves get the seam kink at `x = 0` instead of the two
/// endpoint entries.
pub(crate) fn kinks(wave: &PiecewiseLinearWave) -> Vec<Kink> {
    let knots = wave.knots();
    let slopes = wave.slopes();
    let n = knots.len();
    let mut out = Vec::with_capacity(n);
    match wave.domain().boundary {
        Boundary::Dirichlet => {
            out.push(Kink { index: 0, x: knots[0].x, psi: knots[0].psi, jump: slopes[0] });
            for i in 1..n - 1 {
                out.push(Kink {
                    index: i,
                    x: knots[i].x,
                    psi: knots[i].psi,
                    jump: slopes[i] - slopes[i - 1],
                });
            }
            out.push(Kink {
                index: n - 1,
                x: knots[n - 1].x,
                psi: knots[n - 1].psi,
                jump: -slopes[n - 2],
            });
        }
        Boundary::Periodic => {
            out.push(Kink {
                index: 0,
                x: 0.0,
                psi: knots[0].psi,
                jump: slopes[0] - slopes[n - 2],
            });
            for i in 1..n - 1 {
                out.push(Kink {
                    index: i,
                    x: knots[i].x,
                    psi: knots[i].psi,
                    jump: slopes[i] - slopes[i - 1],
                });
            }
        }
    }
    out
}

fn max_abs_slope(wave: &PiecewiseLinearWave) -> f64 {
    wave.slopes().iter().fold(0.0, |m, s| m.max(s.abs()))
}

/// `(slope_right - slope_left) / psi(c)` written in ratio form, which makes
/// the result independent of the overall amplitude up to rounding.
fn jump_over_psi(knots: &[Knot], left: usize, centre: usize, right: usize, width: f64) -> f64 {
    let c = knots[centre];
    let (l, r) = (knots[left], knots[right]);
    let dx_right = if right > centre { r.x - c.x } else { r.x + width - c.x };
    let dx_left = if left < centre { c.x - l.x } else { c.x + width - l.x };
    (r.psi / c.psi - 1.0) / dx_right - (1.0 - l.psi / c.psi) / dx_left
}

/// Computes the spikes that make `wave` an exact zero-energy eigenstate.
///
/// One spike is emitted per knot with a genuine slope jump; smooth knots
/// get none. Strengths come from the knots as given; the returned design
/// carries the normalized wave.
pub fn critical_strengths(
    wave: &PiecewiseLinearWave,
    units: &UnitSystem,
    options: DesignOptions,
) -> Result<ZcDesign> {
    let normalized = wave.normalize()?;
    let domain = *wave.domain();
    let knots = wave.knots();
    let n = knots.len();
    let slope_tol = SLOPE_JUMP_TOLERANCE * max_abs_slope(wave);
    let node_tol = NODE_TOLERANCE * wave.max_abs_psi();
    let pre = units.kinetic_prefactor();

    let mut spikes = Vec::new();
    for kink in kinks(wave) {
        let is_wall = domain.boundary == Boundary::Dirichlet && (kink.index == 0 || kink.index == n - 1);
        if is_wall || kink.jump.abs() <= slope_tol {
            continue;
        }
        let is_seam = domain.boundary == Boundary::Periodic && kink.index == 0;
        if is_seam && !options.allow_seam_spike {
            return Err(ZcError::PeriodicInfeasible(format!(
                "slopes differ across the seam ({} vs {}) and no seam spike is allowed",
                wave.slope(0),
                wave.slope(n - 2)
            )));
        }
        if kink.psi.abs() <= node_tol {
            return Err(ZcError::CuspAtNode { x: kink.x });
        }
        let ratio = if is_seam {
            jump_over_psi(knots, n - 2, 0, 1, domain.width)
        } else {
            jump_over_psi(knots, kink.index - 1, kink.index, kink.index + 1, domain.width)
        };
        spikes.push(DeltaSpike { position: kink.x, strength: pre * ratio });
    }
    if domain.boundary == Boundary::Periodic && spikes.len() == 1 {
        return Err(ZcError::PeriodicInfeasible(
            "a single spike cannot support a continuous periodic zero mode".into(),
        ));
    }
    // the seam spike (x = 0) is pushed first, so positions stay sorted
    let potential = DeltaArrayPotential::new(domain, spikes)?;
    Ok(ZcDesign {
        units: *units,
        wave: normalized,
        potential,
    })
}

/// Single-spike triangle with its peak at `c`.
pub fn triangle_design(c: f64, width: f64, units: &UnitSystem) -> Result<ZcDesign> {
    WellDomain::dirichlet(width)?;
    if !(c > 0.0 && c < width) {
        return Err(ZcError::Domain(format!(
            "peak position c = {c} must lie strictly inside (0, {width}); \
             the critical strength diverges as c -> 0 or c -> a"
        )));
    }
    let amp = (3.0 / width).sqrt();
    let wave = PiecewiseLinearWave::dirichlet_from_interior(width, &[(c, amp)])?;
    critical_strengths(&wave, units, DesignOptions::default())
}

/// The symmetric (plateau) and antisymmetric twin-spike designs with spikes
/// at `a/3` and `2a/3`.
pub fn twin_designs(width: f64, units: &UnitSystem) -> Result<(ZcDesign, ZcDesign)> {
    let (c1, c2) = (width / 3.0, 2.0 * width / 3.0);
    let a_sym = (9.0 / (5.0 * width)).sqrt();
    let b_anti = (3.0 / width).sqrt();
    let sym = PiecewiseLinearWave::dirichlet_from_interior(width, &[(c1, a_sym), (c2, a_sym)])?;
    let anti = PiecewiseLinearWave::dirichlet_from_interior(width, &[(c1, b_anti), (c2, -b_anti)])?;
    Ok((
        critical_strengths(&sym, units, DesignOptions::default())?,
        critical_strengths(&anti, units, DesignOptions::default())?,
    ))
}

/// Piecewise-linear interpolant through interior samples of a smooth
/// Dirichlet waveform, with the exact critical strength at every sample.
///
/// As the sampling is refined the spike density `g_i / h` tends to the
/// potential `(hbar^2/2m) psi''/psi` that holds the smooth wave at zero energy.
pub fn discretize_smooth(samples: &[(f64, f64)], width: f64, units: &UnitSystem) -> Result<ZcDesign> {
    if samples.len() < 2 {
        return Err(ZcError::Domain(format!(
            "need at least two interior samples, got {}",
            samples.len()
        )));
    }
    let wave = PiecewiseLinearWave::dirichlet_from_interior(width, samples)?;
    critical_strengths(&wave, units, DesignOptions::default())
}

/// Samples `f` on the uniform interior grid `x_i = i a / (n + 1)` and
/// discretizes it.
pub fn discretize_fn(
    f: impl Fn(f64) -> f64,
    n: usize,
    width: f64,
    units: &UnitSystem,
) -> Result<ZcDesign> {
    let h = width / (n as f64 + 1.0);
    let samples: Vec<(f64, f64)> = (1..=n).map(|i| (i as f64 * h, f(i as f64 * h))).collect();
    discretize_smooth(&samples, width, units)
}

/// Outcome of checking a wave against a boundary condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BcReport {
    pub boundary: Boundary,
    pub feasible: bool,
    /// Slope discontinuities that would need a spike, seam included.
    pub cusp_count: usize,
    pub seam_spike_required: bool,
    pub issues: Vec<String>,
}

/// Checks whether `wave` can be a zero mode under `boundary`. Never fails;
/// problems are listed in the report.
pub fn validate_bc(wave: &PiecewiseLinearWave, boundary: Boundary, allow_seam_spike: bool) -> BcReport {
    let knots = wave.knots();
    let n = knots.len();
    let (first, last) = (knots[0].psi, knots[n - 1].psi);
    let slope_tol = SLOPE_JUMP_TOLERANCE * max_abs_slope(wave);
    let node_tol = NODE_TOLERANCE * wave.max_abs_psi();
    let interior_cusps = (1..n - 1)
        .filter(|&i| (wave.slope(i) - wave.slope(i - 1)).abs() > slope_tol)
        .count();
    let mut issues = Vec::new();
    let mut seam_spike_required = false;
    let mut cusp_count = interior_cusps;

    match boundary {
        Boundary::Dirichlet => {
            if first != 0.0 || last != 0.0 {
                issues.push(format!("wave does not vanish at the walls (psi(0) = {first}, psi(a) = {last})"));
            }
        }
        Boundary::Periodic => {
            if first != last {
                issues.push(format!("psi(0) = {first} differs from psi(a) = {last}"));
            }
            let seam_jump = wave.slope(0) - wave.slope(n - 2);
            if seam_jump.abs() > slope_tol {
                seam_spike_required = true;
                cusp_count += 1;
                if !allow_seam_spike {
                    issues.push(format!(
                        "slopes differ across the seam ({} vs {}) and no seam spike is allowed",
                        wave.slope(0),
                        wave.slope(n - 2)
                    ));
                } else if first.abs() <= node_tol {
                    issues.push("seam spike would sit on a node of the wave".into());
                }
            }
            if cusp_count == 1 {
                issues.push("a single spike cannot support a continuous periodic zero mode".into());
            }
        }
    }
    BcReport {
        boundary,
        feasible: issues.is_empty(),
        cusp_count,
        seam_spike_required,
        issues,
    }
}

/// Re-targets a wave to another boundary condition after validating it.
pub fn with_boundary(wave: &PiecewiseLinearWave, boundary: Boundary) -> Result<PiecewiseLinearWave> {
    let domain = WellDomain::new(wave.width(), boundary)?;
    PiecewiseLinearWave::new(domain, wave.knots().to_vec())
}
