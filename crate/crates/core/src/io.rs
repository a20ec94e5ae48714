//! JSON and CSV file formats.
//!
//! Floats are written in shortest round-trip form, which reproduces every
//! `f64` bit-exactly on reading.

use serde::{Deserialize, Serialize};

use crate::design::{critical_strengths, DesignOptions, ZcDesign};
use crate::error::{Result, ZcError};
use crate::model::{Boundary, DeltaArrayPotential, DeltaSpike, Knot, PiecewiseLinearWave, UnitSystem, WellDomain};
use crate::oracle::{IsospectralReport, SpectralReport};
use crate::susy::{PartnerPotential, SmoothPart, SmoothSegment};

pub const FORMAT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpikeEntry {
    pub position: f64,
    pub strength: f64,
}

/// Design file. `spikes` is present only in the full form written by the
/// designer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFile {
    pub a: f64,
    pub hbar: f64,
    pub mass: f64,
    pub boundary: Boundary,
    pub knots: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spikes: Option<Vec<SpikeEntry>>,
}

/// Global override of units and well width, e.g. from the environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitOverride {
    pub hbar: f64,
    pub mass: f64,
    pub a: f64,
}

impl UnitOverride {
    /// Parse `"hbar,mass,a"`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || ZcError::Domain(format!("unit override must be 'hbar,mass,a', got {s:?}"));
        let [hbar, mass, a] = parts[..] else {
            return Err(bad());
        };
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
        let o = UnitOverride { hbar: num(hbar)?, mass: num(mass)?, a: num(a)? };
        UnitSystem::new(o.hbar, o.mass)?;
        WellDomain::dirichlet(o.a)?;
        Ok(o)
    }

    pub fn units(&self) -> UnitSystem {
        UnitSystem { hbar: self.hbar, mass: self.mass }
    }
}

impl DesignFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ZcError::InvalidWave(format!("bad design file: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("design file serializes");
        s.push('\n');
        s
    }

    /// Full design file: wave plus computed spikes.
    pub fn from_design(design: &ZcDesign) -> Self {
        let domain = design.domain();
        DesignFile {
            a: domain.width,
            hbar: design.units().hbar,
            mass: design.units().mass,
            boundary: domain.boundary,
            knots: design.wave().knots().iter().map(|k| [k.x, k.psi]).collect(),
            spikes: Some(
                design
                    .potential()
                    .spikes()
                    .iter()
                    .map(|s| SpikeEntry { position: s.position, strength: s.strength })
                    .collect(),
            ),
        }
    }

    /// Rescale to the override: units replaced, knot positions stretched to
    /// the new width. Listed spikes are dropped since they no longer apply.
    pub fn with_override(&self, o: &UnitOverride) -> Self {
        let stretch = o.a / self.a;
        DesignFile {
            a: o.a,
            hbar: o.hbar,
            mass: o.mass,
            boundary: self.boundary,
            knots: self
                .knots
                .iter()
                .map(|&[x, psi]| if x == self.a { [o.a, psi] } else { [x * stretch, psi] })
                .collect(),
            spikes: None,
        }
    }

    pub fn units(&self) -> Result<UnitSystem> {
        UnitSystem::new(self.hbar, self.mass)
    }

    pub fn wave(&self) -> Result<PiecewiseLinearWave> {
        let domain = WellDomain::new(self.a, self.boundary)?;
        let knots = self.knots.iter().map(|&[x, psi]| Knot::new(x, psi)).collect();
        PiecewiseLinearWave::new(domain, knots)
    }

    /// Spikes as listed in the file, if any.
    pub fn listed_potential(&self) -> Result<Option<DeltaArrayPotential>> {
        let Some(spikes) = &self.spikes else {
            return Ok(None);
        };
        let domain = WellDomain::new(self.a, self.boundary)?;
        let spikes = spikes
            .iter()
            .map(|s| DeltaSpike { position: s.position, strength: s.strength })
            .collect();
        DeltaArrayPotential::new(domain, spikes).map(Some)
    }

    /// Recompute the design from the knots. A listed seam spike counts as
    /// permission for one.
    pub fn design(&self, mut options: DesignOptions) -> Result<ZcDesign> {
        if let Some(spikes) = &self.spikes {
            options.allow_seam_spike |= self.boundary == Boundary::Periodic && spikes.iter().any(|s| s.position == 0.0);
        }
        critical_strengths(&self.wave()?, &self.units()?, options)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SmoothEntry {
    InverseSquare {
        interval: [f64; 2],
        pole: f64,
        #[serde(rename = "K")]
        k: f64,
    },
    Zero {
        interval: [f64; 2],
        zero: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartnerFile {
    pub spikes: Vec<[f64; 2]>,
    pub smooth: Vec<SmoothEntry>,
}

impl PartnerFile {
    pub fn from_partner(p: &PartnerPotential) -> Self {
        PartnerFile {
            spikes: p.spikes.iter().map(|s| [s.position, s.strength]).collect(),
            smooth: p
                .smooth
                .iter()
                .map(|seg| {
                    let interval = [seg.interval.0, seg.interval.1];
                    match seg.part {
                        SmoothPart::Zero => SmoothEntry::Zero { interval, zero: true },
                        SmoothPart::InverseSquare { pole, k } => SmoothEntry::InverseSquare { interval, pole, k },
                    }
                })
                .collect(),
        }
    }

    /// Rebuild the partner on `domain`.
    pub fn partner(&self, domain: WellDomain) -> Result<PartnerPotential> {
        let spikes: Vec<DeltaSpike> = self
            .spikes
            .iter()
            .map(|&[position, strength]| DeltaSpike { position, strength })
            .collect();
        DeltaArrayPotential::new(domain, spikes.clone())?;
        let smooth = self
            .smooth
            .iter()
            .map(|e| match *e {
                SmoothEntry::InverseSquare { interval, pole, k } => SmoothSegment {
                    interval: (interval[0], interval[1]),
                    part: SmoothPart::InverseSquare { pole, k },
                },
                SmoothEntry::Zero { interval, .. } => SmoothSegment {
                    interval: (interval[0], interval[1]),
                    part: SmoothPart::Zero,
                },
            })
            .collect();
        Ok(PartnerPotential { domain, spikes, smooth })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ZcError::Domain(format!("bad partner file: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("partner file serializes");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub version: &'static str,
}

#[derive(Serialize)]
struct WithMeta<'a, T: Serialize> {
    #[serde(flatten)]
    body: &'a T,
    meta: Meta,
}

fn with_meta<T: Serialize>(body: &T) -> String {
    let wrapped = WithMeta { body, meta: Meta { version: FORMAT_VERSION } };
    let mut s = serde_json::to_string_pretty(&wrapped).expect("report serializes");
    s.push('\n');
    s
}

pub fn spectral_report_json(report: &SpectralReport) -> String {
    with_meta(report)
}

pub fn isospectral_report_json(report: &IsospectralReport) -> String {
    with_meta(report)
}

/// Comma-separated table with a header row and Unix newlines.
pub fn csv<R, I>(header: &[&str], rows: R) -> String
where
    R: IntoIterator<Item = I>,
    I: IntoIterator<Item = String>,
{
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.into_iter().collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Shortest round-trip text of a float, with an exponent for very small or
/// large magnitudes.
pub fn float(v: f64) -> String {
    format!("{v:?}")
}

pub fn xy_csv(header: [&str; 2], points: &[(f64, f64)]) -> String {
    csv(&header, points.iter().map(|&(x, y)| [float(x), float(y)]))
}
