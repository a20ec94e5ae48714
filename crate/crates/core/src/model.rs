//! Units, well domains and the piecewise-linear waveform algebra.
//!
//! A [`PiecewiseLinearWave`] is a list of knots `(x, psi)` spanning the whole
//! well, first knot at `x = 0` and last at `x = width`. Between knots the
//! wave is the straight line joining them, so it is continuous by
//! construction and all of its integrals have closed forms.

use serde::{Deserialize, Serialize};

use crate::error::{Result, ZcError};

/// Physical constants `hbar` and particle mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub hbar: f64,
    pub mass: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem {
            hbar: 1.0,
            mass: 1.0,
        }
    }
}

impl UnitSystem {
    pub fn new(hbar: f64, mass: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(ZcError::Domain(format!("hbar must be positive, got {hbar}")));
        }
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(ZcError::Domain(format!("mass must be positive, got {mass}")));
        }
        Ok(UnitSystem { hbar, mass })
    }

    /// `hbar^2 / 2m`, the coefficient of `-d^2/dx^2` in the Hamiltonian.
    pub fn kinetic_prefactor(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mass)
    }

    /// `hbar / sqrt(2m)`, the scale of the superpotential.
    pub fn superpotential_scale(&self) -> f64 {
        self.hbar / (2.0 * self.mass).sqrt()
    }

    /// Wavenumber `sqrt(2m|E|)/hbar`.
    pub fn wavenumber(&self, energy: f64) -> f64 {
        (2.0 * self.mass * energy.abs()).sqrt() / self.hbar
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Dirichlet,
    Periodic,
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Boundary::Dirichlet => f.write_str("dirichlet"),
            Boundary::Periodic => f.write_str("periodic"),
        }
    }
}

/// The interval `[0, width]` together with its boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellDomain {
    pub width: f64,
    pub boundary: Boundary,
}

impl WellDomain {
    pub fn new(width: f64, boundary: Boundary) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(ZcError::Domain(format!("well width must be positive, got {width}")));
        }
        Ok(WellDomain { width, boundary })
    }

    pub fn dirichlet(width: f64) -> Result<Self> {
        Self::new(width, Boundary::Dirichlet)
    }

    pub fn periodic(width: f64) -> Result<Self> {
        Self::new(width, Boundary::Periodic)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Knot {
    pub x: f64,
    pub psi: f64,
}

impl Knot {
    pub fn new(x: f64, psi: f64) -> Self {
        Knot { x, psi }
    }
}

impl From<(f64, f64)> for Knot {
    fn from((x, psi): (f64, f64)) -> Self {
        Knot { x, psi }
    }
}

/// Continuous straight-line waveform on a well domain.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinearWave {
    domain: WellDomain,
    knots: Vec<Knot>,
}

impl PiecewiseLinearWave {
    /// Builds a wave from explicit knots, endpoints included.
    ///
    /// Knots must start at `x = 0`, end at `x = width` and be strictly
    /// increasing; they are never reordered. Dirichlet waves must vanish at
    /// both endpoints and periodic waves must take the same value there.
    pub fn new(domain: WellDomain, knots: Vec<Knot>) -> Result<Self> {
        let wave = Self::from_knots_unchecked_bc(domain, knots)?;
        let (first, last) = (wave.knots[0].psi, wave.knots[wave.knots.len() - 1].psi);
        match domain.boundary {
            Boundary::Dirichlet if first != 0.0 || last != 0.0 => {
                return Err(ZcError::InvalidWave(format!(
                    "Dirichlet wave must vanish at both walls (psi(0) = {first}, psi(a) = {last})"
                )))
            }
            Boundary::Periodic if first != last => {
                return Err(ZcError::InvalidWave(format!(
                    "periodic wave must satisfy psi(0) = psi(a) (got {first} and {last})"
                )))
            }
            _ => {}
        }
        Ok(wave)
    }

    /// Geometry checks only; boundary values are left to the caller.
    pub(crate) fn from_knots_unchecked_bc(domain: WellDomain, knots: Vec<Knot>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(ZcError::InvalidWave("need at least two knots".into()));
        }
        if let Some(k) = knots.iter().find(|k| !k.x.is_finite() || !k.psi.is_finite()) {
            return Err(ZcError::InvalidWave(format!("non-finite knot ({}, {})", k.x, k.psi)));
        }
        if knots[0].x != 0.0 {
            return Err(ZcError::InvalidWave(format!(
                "first knot must sit at x = 0, got {}",
                knots[0].x
            )));
        }
        let last = knots[knots.len() - 1].x;
        if last != domain.width {
            return Err(ZcError::InvalidWave(format!(
                "last knot must sit at x = {}, got {last}",
                domain.width
            )));
        }
        for pair in knots.windows(2) {
            if pair[1].x <= pair[0].x {
                return Err(ZcError::InvalidWave(format!(
                    "knot positions must be strictly increasing ({} followed by {})",
                    pair[0].x, pair[1].x
                )));
            }
        }
        Ok(PiecewiseLinearWave { domain, knots })
    }

    /// Builds a Dirichlet wave from interior knots, adding the zero endpoints.
    pub fn dirichlet_from_interior(width: f64, interior: &[(f64, f64)]) -> Result<Self> {
        let domain = WellDomain::dirichlet(width)?;
        let mut knots = Vec::with_capacity(interior.len() + 2);
        knots.push(Knot::new(0.0, 0.0));
        knots.extend(interior.iter().map(|&p| Knot::from(p)));
        knots.push(Knot::new(width, 0.0));
        Self::new(domain, knots)
    }

    pub fn domain(&self) -> &WellDomain {
        &self.domain
    }

    pub fn width(&self) -> f64 {
        self.domain.width
    }

    pub fn knots(&self) -> &[Knot] {
        &self.knots
    }

    pub fn segment_count(&self) -> usize {
        self.knots.len() - 1
    }

    /// Slope of segment `i` (between knots `i` and `i + 1`).
    pub fn slope(&self, i: usize) -> f64 {
        let (l, r) = (self.knots[i], self.knots[i + 1]);
        (r.psi - l.psi) / (r.x - l.x)
    }

    pub fn slopes(&self) -> Vec<f64> {
        (0..self.segment_count()).map(|i| self.slope(i)).collect()
    }

    pub fn max_abs_psi(&self) -> f64 {
        self.knots.iter().fold(0.0, |m, k| m.max(k.psi.abs()))
    }

    /// Linear interpolation between the bracketing knots.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=self.domain.width).contains(&x) {
            return Err(ZcError::Domain(format!(
                "x = {x} lies outside the well [0, {}]",
                self.domain.width
            )));
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        // index of the first knot strictly to the right of x
        let idx = self.knots.partition_point(|k| k.x <= x);
        if idx == 0 {
            return self.knots[0].psi;
        }
        if idx == self.knots.len() {
            return self.knots[idx - 1].psi;
        }
        let (l, r) = (self.knots[idx - 1], self.knots[idx]);
        if x == l.x {
            return l.psi;
        }
        let t = (x - l.x) / (r.x - l.x);
        l.psi + t * (r.psi - l.psi)
    }

    /// `∫ |psi|^2 dx` over the well, summed segment by segment in closed form.
    pub fn norm_squared(&self) -> f64 {
        self.knots
            .windows(2)
            .map(|p| {
                let (l, r) = (p[0], p[1]);
                (r.x - l.x) * (l.psi * l.psi + l.psi * r.psi + r.psi * r.psi) / 3.0
            })
            .sum()
    }

    /// `∫ psi dx`.
    pub fn integral(&self) -> f64 {
        self.knots
            .windows(2)
            .map(|p| 0.5 * (p[1].x - p[0].x) * (p[0].psi + p[1].psi))
            .sum()
    }

    pub fn scale(&self, factor: f64) -> PiecewiseLinearWave {
        PiecewiseLinearWave {
            domain: self.domain,
            knots: self
                .knots
                .iter()
                .map(|k| Knot::new(k.x, k.psi * factor))
                .collect(),
        }
    }

    /// Rescales to unit norm. Knot positions and amplitude ratios are kept.
    /// A wave already normalized to within a few ulps is returned as is, so
    /// normalizing twice gives the same knots.
    pub fn normalize(&self) -> Result<PiecewiseLinearWave> {
        let n2 = self.norm_squared();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(ZcError::ZeroNorm);
        }
        if (n2 - 1.0).abs() <= 8.0 * f64::EPSILON {
            return Ok(self.clone());
        }
        Ok(self.scale(1.0 / n2.sqrt()))
    }

    /// Mirror image about the centre of the well.
    pub fn reflect(&self) -> PiecewiseLinearWave {
        let a = self.domain.width;
        let mut knots: Vec<Knot> = self
            .knots
            .iter()
            .rev()
            .map(|k| Knot::new(a - k.x, k.psi))
            .collect();
        // a - a is exactly 0, a - 0 exactly a
        knots[0].x = 0.0;
        let n = knots.len();
        knots[n - 1].x = a;
        PiecewiseLinearWave {
            domain: self.domain,
            knots,
        }
    }
}

/// Point interaction `strength * delta(x - position)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaSpike {
    pub position: f64,
    pub strength: f64,
}

/// Sum of delta spikes inside a well.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaArrayPotential {
    domain: WellDomain,
    spikes: Vec<DeltaSpike>,
}

impl DeltaArrayPotential {
    pub fn new(domain: WellDomain, spikes: Vec<DeltaSpike>) -> Result<Self> {
        for s in &spikes {
            let inside = match domain.boundary {
                Boundary::Dirichlet => s.position > 0.0 && s.position < domain.width,
                Boundary::Periodic => s.position >= 0.0 && s.position < domain.width,
            };
            if !inside || !s.strength.is_finite() {
                return Err(ZcError::Domain(format!(
                    "spike at x = {} (strength {}) is not allowed in a {} well of width {}",
                    s.position, s.strength, domain.boundary, domain.width
                )));
            }
        }
        for pair in spikes.windows(2) {
            if pair[1].position <= pair[0].position {
                return Err(ZcError::Domain(format!(
                    "spike positions must be strictly increasing ({} followed by {})",
                    pair[0].position, pair[1].position
                )));
            }
        }
        Ok(DeltaArrayPotential { domain, spikes })
    }

    pub fn empty(domain: WellDomain) -> Self {
        DeltaArrayPotential {
            domain,
            spikes: Vec::new(),
        }
    }

    pub fn domain(&self) -> &WellDomain {
        &self.domain
    }

    pub fn spikes(&self) -> &[DeltaSpike] {
        &self.spikes
    }

    pub fn len(&self) -> usize {
        self.spikes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spikes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(c: f64) -> PiecewiseLinearWave {
        PiecewiseLinearWave::dirichlet_from_interior(1.0, &[(c, 3f64.sqrt())]).unwrap()
    }

    #[test]
    fn eval_at_peak_and_midpoint() {
        let w = triangle(0.5);
        let amp = 3f64.sqrt();
        assert_eq!(w.eval(0.5).unwrap(), amp);
        assert_eq!(w.eval(0.0).unwrap(), 0.0);
        assert_eq!(w.eval(1.0).unwrap(), 0.0);
        assert!((w.eval(0.25).unwrap() - amp / 2.0).abs() < 1e-15);
    }

    #[test]
    fn eval_outside_domain_fails() {
        let w = triangle(0.5);
        assert!(matches!(w.eval(-0.1), Err(ZcError::Domain(_))));
        assert!(matches!(w.eval(1.0001), Err(ZcError::Domain(_))));
    }

    #[test]
    fn triangle_is_normalized_for_any_peak() {
        for c in [0.01, 0.1, 0.37, 0.5, 0.9, 0.99] {
            assert!((triangle(c).norm_squared() - 1.0).abs() < 1e-14, "c = {c}");
        }
    }

    #[test]
    fn twin_symmetric_norm() {
        let amp = (9.0f64 / 5.0).sqrt();
        let w = PiecewiseLinearWave::dirichlet_from_interior(1.0, &[(1.0 / 3.0, amp), (2.0 / 3.0, amp)])
            .unwrap();
        assert!((w.norm_squared() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_wave_has_zero_norm_and_cannot_be_normalized() {
        let w = PiecewiseLinearWave::dirichlet_from_interior(1.0, &[(0.5, 0.0)]).unwrap();
        assert_eq!(w.norm_squared(), 0.0);
        assert_eq!(w.normalize(), Err(ZcError::ZeroNorm));
    }

    #[test]
    fn normalize_antisymmetric_recovers_amplitude() {
        let b = 7.0;
        let w = PiecewiseLinearWave::dirichlet_from_interior(1.0, &[(1.0 / 3.0, b), (2.0 / 3.0, -b)])
            .unwrap()
            .normalize()
            .unwrap();
        assert!((w.knots()[1].psi - 3f64.sqrt()).abs() < 1e-14);
        assert!((w.knots()[2].psi + 3f64.sqrt()).abs() < 1e-14);
        let again = w.normalize().unwrap();
        for (p, q) in w.knots().iter().zip(again.knots()) {
            assert!((p.psi - q.psi).abs() <= 1e-14 * p.psi.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_bad_knot_lists() {
        let d = WellDomain::dirichlet(1.0).unwrap();
        let dup = vec![
            Knot::new(0.0, 0.0),
            Knot::new(0.5, 1.0),
            Knot::new(0.5, 1.0),
            Knot::new(1.0, 0.0),
        ];
        assert!(matches!(PiecewiseLinearWave::new(d, dup), Err(ZcError::InvalidWave(_))));
        let unsorted = vec![
            Knot::new(0.0, 0.0),
            Knot::new(0.6, 1.0),
            Knot::new(0.4, 1.0),
            Knot::new(1.0, 0.0),
        ];
        assert!(PiecewiseLinearWave::new(d, unsorted).is_err());
        let short = vec![Knot::new(0.0, 0.0), Knot::new(0.9, 0.0)];
        assert!(PiecewiseLinearWave::new(d, short).is_err());
        let nonzero_wall = vec![Knot::new(0.0, 0.1), Knot::new(1.0, 0.0)];
        assert!(PiecewiseLinearWave::new(d, nonzero_wall).is_err());
        let p = WellDomain::periodic(1.0).unwrap();
        let mismatch = vec![Knot::new(0.0, 1.0), Knot::new(0.5, 2.0), Knot::new(1.0, 1.5)];
        assert!(PiecewiseLinearWave::new(p, mismatch).is_err());
    }

    #[test]
    fn reflect_is_an_involution() {
        let w = PiecewiseLinearWave::dirichlet_from_interior(1.0, &[(0.2, 1.0), (0.7, -0.3)]).unwrap();
        let r = w.reflect();
        assert!((r.eval(0.8).unwrap() - 1.0).abs() < 1e-15);
        let rr = r.reflect();
        for (p, q) in w.knots().iter().zip(rr.knots()) {
            assert!((p.x - q.x).abs() < 1e-15 && p.psi == q.psi);
        }
    }

    #[test]
    fn invalid_units_and_domains() {
        assert!(UnitSystem::new(0.0, 1.0).is_err());
        assert!(UnitSystem::new(1.0, -1.0).is_err());
        assert!(WellDomain::dirichlet(0.0).is_err());
        assert_eq!(UnitSystem::default().kinetic_prefactor(), 0.5);
    }

    #[test]
    fn spikes_must_be_interior_and_sorted() {
        let d = WellDomain::dirichlet(1.0).unwrap();
        let at_wall = vec![DeltaSpike { position: 0.0, strength: -1.0 }];
        assert!(DeltaArrayPotential::new(d, at_wall.clone()).is_err());
        let p = WellDomain::periodic(1.0).unwrap();
        assert!(DeltaArrayPotential::new(p, at_wall).is_ok());
        let unsorted = vec![
            DeltaSpike { position: 0.6, strength: -1.0 },
            DeltaSpike { position: 0.3, strength: -1.0 },
        ];
        assert!(DeltaArrayPotential::new(d, unsorted).is_err());
    }
}
