//! Superpotential and supersymmetric partner of a nodeless zero mode.
//!
//! With `s = hbar / sqrt(2m)` and `W = -s psi'/psi`, the pair
//! `V_(+/-) = W^2 +/- s W'` shares its spectrum except for the zero mode of
//! `V_-`. For a straight-line `psi` everything is done on segment data:
//! on a segment `psi = beta (x - x0)`, so `W = -s / (x - x0)` and
//!
//! ```text
//! V_- = 0,   V_+ = 2 s^2 / (x - x0)^2 = (hbar^2/m) / (x - x0)^2
//! ```
//!
//! while each jump of `W` at a knot contributes `+/- s (W(c+) - W(c-))` to
//! the delta part.

use serde::Serialize;

use crate::design::{ZcDesign, NODE_TOLERANCE, SLOPE_JUMP_TOLERANCE};
use crate::error::{Result, ZcError};
use crate::model::{Boundary, DeltaArrayPotential, DeltaSpike, UnitSystem, WellDomain};

/// One straight piece of the ground state, `psi = alpha + beta x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuperpotentialSegment {
    pub interval: (f64, f64),
    pub alpha: f64,
    pub beta: f64,
    /// Where the affine piece extrapolates to zero; `None` when flat.
    pub pole: Option<f64>,
}

impl SuperpotentialSegment {
    /// `W(x)` with the given scale `hbar / sqrt(2m)`.
    pub fn eval(&self, scale: f64, x: f64) -> f64 {
        match self.pole {
            Some(x0) => -scale / (x - x0),
            None => 0.0,
        }
    }
}

/// `psi'/psi` on either side of a knot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogDerivativeJump {
    pub x: f64,
    pub left: f64,
    pub right: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Superpotential {
    pub scale: f64,
    pub segments: Vec<SuperpotentialSegment>,
    /// Knots where `W` jumps; the only places the delta part lives.
    pub jumps: Vec<LogDerivativeJump>,
}

impl Superpotential {
    pub fn eval(&self, x: f64) -> f64 {
        let idx = self
            .segments
            .partition_point(|s| s.interval.1 < x)
            .min(self.segments.len() - 1);
        self.segments[idx].eval(self.scale, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SmoothPart {
    Zero,
    /// `k / (x - pole)^2`
    InverseSquare { pole: f64, k: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothSegment {
    pub interval: (f64, f64),
    pub part: SmoothPart,
}

impl SmoothSegment {
    pub fn eval(&self, x: f64) -> f64 {
        match self.part {
            SmoothPart::Zero => 0.0,
            SmoothPart::InverseSquare { pole, k } => k / ((x - pole) * (x - pole)),
        }
    }
}

/// Delta spikes plus a piecewise inverse-square smooth part.
#[derive(Debug, Clone, PartialEq)]
pub struct PartnerPotential {
    pub domain: WellDomain,
    pub spikes: Vec<DeltaSpike>,
    pub smooth: Vec<SmoothSegment>,
}

impl PartnerPotential {
    /// Smooth part at `x`. On a boundary shared by two segments the mean of
    /// the one-sided limits is returned.
    pub fn smooth_at(&self, x: f64) -> f64 {
        let idx = self.smooth.partition_point(|s| s.interval.1 < x);
        let Some(seg) = self.smooth.get(idx) else {
            return self.smooth.last().map_or(0.0, |s| s.eval(x));
        };
        if x == seg.interval.1 {
            if let Some(next) = self.smooth.get(idx + 1) {
                return 0.5 * (seg.eval(x) + next.eval(x));
            }
        }
        seg.eval(x)
    }

    pub fn delta_part(&self) -> Result<DeltaArrayPotential> {
        DeltaArrayPotential::new(self.domain, self.spikes.clone())
    }
}

/// Original potential and its partner, ready for the eigensolver.
#[derive(Debug, Clone, PartialEq)]
pub struct SusyPair {
    pub units: UnitSystem,
    pub original: DeltaArrayPotential,
    pub partner: PartnerPotential,
}

fn check_nodeless(design: &ZcDesign) -> Result<()> {
    let wave = design.wave();
    let knots = wave.knots();
    let tol = NODE_TOLERANCE * wave.max_abs_psi();
    let interior = match wave.domain().boundary {
        Boundary::Dirichlet => &knots[1..knots.len() - 1],
        Boundary::Periodic => &knots[..knots.len() - 1],
    };
    let sign = interior.first().map_or(1.0, |k| k.psi.signum());
    for k in interior {
        if k.psi.abs() <= tol || k.psi.signum() != sign {
            // report the first zero of the interpolant
            let x = interior
                .windows(2)
                .find(|p| p[0].psi.signum() != p[1].psi.signum() || p[0].psi.abs() <= tol)
                .map(|p| {
                    if p[0].psi.abs() <= tol {
                        p[0].x
                    } else {
                        p[0].x - p[0].psi * (p[1].x - p[0].x) / (p[1].psi - p[0].psi)
                    }
                })
                .unwrap_or(k.x);
            return Err(ZcError::NodeInInterior { x });
        }
    }
    Ok(())
}

/// Per-segment superpotential of a nodeless design.
pub fn superpotential(design: &ZcDesign) -> Result<Superpotential> {
    check_nodeless(design)?;
    let wave = design.wave();
    let knots = wave.knots();
    let n = knots.len();
    let width = wave.width();
    let scale = design.units().superpotential_scale();

    let segments = knots
        .windows(2)
        .map(|p| {
            let (l, r) = (p[0], p[1]);
            let beta = (r.psi - l.psi) / (r.x - l.x);
            let alpha = l.psi - beta * l.x;
            let pole = if beta == 0.0 {
                None
            } else if r.psi.abs() < l.psi.abs() {
                Some(r.x - r.psi / beta)
            } else {
                Some(l.x - l.psi / beta)
            };
            SuperpotentialSegment { interval: (l.x, r.x), alpha, beta, pole }
        })
        .collect();

    let max_slope = wave.slopes().iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let slope_tol = SLOPE_JUMP_TOLERANCE * max_slope;
    let mut jumps = Vec::new();
    let mut push = |left: usize, centre: usize, right: usize| {
        let c = knots[centre];
        let (l, r) = (knots[left], knots[right]);
        let dx_r = if right > centre { r.x - c.x } else { r.x + width - c.x };
        let dx_l = if left < centre { c.x - l.x } else { c.x + width - l.x };
        if ((r.psi - c.psi) / dx_r - (c.psi - l.psi) / dx_l).abs() <= slope_tol {
            return;
        }
        jumps.push(LogDerivativeJump {
            x: c.x,
            left: (1.0 - l.psi / c.psi) / dx_l,
            right: (r.psi / c.psi - 1.0) / dx_r,
        });
    };
    if wave.domain().boundary == Boundary::Periodic {
        push(n - 2, 0, 1);
    }
    for i in 1..n - 1 {
        push(i - 1, i, i + 1);
    }
    Ok(Superpotential { scale, segments, jumps })
}

/// `W^2 + sign * s W'` assembled symbolically; `sign = +1` gives the
/// partner, `sign = -1` reconstructs the original potential.
pub fn potential_from_superpotential(
    sp: &Superpotential,
    domain: WellDomain,
    units: &UnitSystem,
    sign: f64,
) -> PartnerPotential {
    let s2 = units.kinetic_prefactor();
    let spikes = sp
        .jumps
        .iter()
        .map(|j| DeltaSpike {
            position: j.x,
            // s (W(c+) - W(c-)) = -s^2 (right - left)
            strength: -sign * s2 * (j.right - j.left),
        })
        .collect();
    let smooth = sp
        .segments
        .iter()
        .map(|seg| {
            // W^2 = s^2/(x-x0)^2, s W' = s^2/(x-x0)^2
            let k = s2 + sign * s2;
            let part = match seg.pole {
                Some(pole) if k != 0.0 => SmoothPart::InverseSquare { pole, k },
                _ => SmoothPart::Zero,
            };
            SmoothSegment { interval: seg.interval, part }
        })
        .collect();
    PartnerPotential { domain, spikes, smooth }
}

/// Supersymmetric partner `V_+` of the design's delta potential.
pub fn partner_potential(design: &ZcDesign) -> Result<PartnerPotential> {
    let sp = superpotential(design)?;
    Ok(potential_from_superpotential(&sp, *design.domain(), design.units(), 1.0))
}

/// The original delta array and its partner, for spectral comparison.
pub fn isospectral_pair(design: &ZcDesign) -> Result<SusyPair> {
    if design.domain().boundary != Boundary::Dirichlet {
        return Err(ZcError::Domain(
            "isospectral pairs are only defined for Dirichlet wells".into(),
        ));
    }
    Ok(SusyPair {
        units: *design.units(),
        original: design.potential().clone(),
        partner: partner_potential(design)?,
    })
}
