//! Finite-difference oracle.
//!
//! Potentials are sampled on a uniform grid, with every delta spike sitting
//! on a node as a `g / h` diagonal entry. The resulting tridiagonal
//! Hamiltonian is solved with the in-crate Sturm/inverse-iteration solver.

mod tridiag;

pub use tridiag::{Eigenpair, TridiagonalHamiltonian};

use serde::Serialize;

use crate::asym::AsymmetricWell;
use crate::design::ZcDesign;
use crate::error::{Result, ZcError};
use crate::model::{Boundary, DeltaArrayPotential, DeltaSpike, PiecewiseLinearWave, UnitSystem, WellDomain};
use crate::susy::{PartnerPotential, SusyPair};

/// Relative distance (in units of h) below which a position counts as a node.
const ON_NODE_TOLERANCE: f64 = 1e-8;
const MAX_SUGGESTED_INTERIOR: usize = 1 << 22;
/// Multiple of `eps * |H|` below which a zero-mode estimate is roundoff.
const ROUNDOFF_FACTOR: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub n_interior: usize,
    pub h: f64,
    pub width: f64,
    pub boundary: Boundary,
}

impl Grid {
    pub const MIN_INTERIOR: usize = 15;

    /// Dirichlet grids carry nodes `j h` for `j = 1..=n`; periodic grids
    /// add the seam node `j = 0` (the node at `width` is identified with it).
    pub fn new(domain: &WellDomain, n_interior: usize) -> Result<Self> {
        if n_interior < Self::MIN_INTERIOR {
            return Err(ZcError::Domain(format!(
                "grid needs at least {} interior nodes, got {n_interior}",
                Self::MIN_INTERIOR
            )));
        }
        Ok(Grid {
            n_interior,
            h: domain.width / (n_interior + 1) as f64,
            width: domain.width,
            boundary: domain.boundary,
        })
    }

    pub fn node_count(&self) -> usize {
        match self.boundary {
            Boundary::Dirichlet => self.n_interior,
            Boundary::Periodic => self.n_interior + 1,
        }
    }

    fn first_index(&self) -> usize {
        match self.boundary {
            Boundary::Dirichlet => 1,
            Boundary::Periodic => 0,
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        let j0 = self.first_index();
        (0..self.node_count()).map(|i| (i + j0) as f64 * self.h).collect()
    }

    /// Row of the node at `x`, if `x` is a node.
    pub fn node_index(&self, x: f64) -> Option<usize> {
        let t = x / self.h;
        let j = t.round();
        if (t - j).abs() > ON_NODE_TOLERANCE || j < 0.0 {
            return None;
        }
        let j = j as usize;
        let j0 = self.first_index();
        (j >= j0 && j < j0 + self.node_count()).then(|| j - j0)
    }
}

/// Smallest `n_interior >= 15` whose grid puts every position on a node.
pub fn compatible_grid_size(positions: &[f64], width: f64) -> Option<usize> {
    (Grid::MIN_INTERIOR + 1..=MAX_SUGGESTED_INTERIOR + 1)
        .find(|&cells| {
            positions.iter().all(|&x| {
                let t = x / width * cells as f64;
                (t - t.round()).abs() <= ON_NODE_TOLERANCE
            })
        })
        .map(|cells| cells - 1)
}

/// Anything the oracle can discretize.
#[derive(Debug, Clone, Copy)]
pub enum OraclePotential<'a> {
    Delta(&'a DeltaArrayPotential),
    Partner(&'a PartnerPotential),
    Asymmetric(&'a AsymmetricWell),
}

impl<'a> From<&'a DeltaArrayPotential> for OraclePotential<'a> {
    fn from(p: &'a DeltaArrayPotential) -> Self {
        OraclePotential::Delta(p)
    }
}

impl<'a> From<&'a PartnerPotential> for OraclePotential<'a> {
    fn from(p: &'a PartnerPotential) -> Self {
        OraclePotential::Partner(p)
    }
}

impl<'a> From<&'a AsymmetricWell> for OraclePotential<'a> {
    fn from(p: &'a AsymmetricWell) -> Self {
        OraclePotential::Asymmetric(p)
    }
}

impl OraclePotential<'_> {
    fn domain(&self) -> WellDomain {
        match self {
            OraclePotential::Delta(p) => *p.domain(),
            OraclePotential::Partner(p) => p.domain,
            OraclePotential::Asymmetric(w) => WellDomain {
                width: w.width(),
                boundary: Boundary::Dirichlet,
            },
        }
    }

    fn spikes(&self) -> &[DeltaSpike] {
        match self {
            OraclePotential::Delta(p) => p.spikes(),
            OraclePotential::Partner(p) => &p.spikes,
            OraclePotential::Asymmetric(_) => &[],
        }
    }

    fn smooth(&self, x: f64, h: f64) -> f64 {
        match self {
            OraclePotential::Delta(_) => 0.0,
            OraclePotential::Partner(p) => {
                if p.domain.boundary == Boundary::Periodic && x == 0.0 {
                    let (Some(first), Some(last)) = (p.smooth.first(), p.smooth.last()) else {
                        return 0.0;
                    };
                    0.5 * (first.eval(0.0) + last.eval(p.domain.width))
                } else {
                    p.smooth_at(x)
                }
            }
            OraclePotential::Asymmetric(w) => {
                if (x - w.a).abs() <= ON_NODE_TOLERANCE * h {
                    0.5 * w.v0
                } else if x > w.a {
                    w.v0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Assemble the grid Hamiltonian of `potential`.
pub fn build_hamiltonian<'a>(
    potential: impl Into<OraclePotential<'a>>,
    grid: &Grid,
    units: &UnitSystem,
) -> Result<TridiagonalHamiltonian> {
    let potential = potential.into();
    let domain = potential.domain();
    if domain.boundary != grid.boundary || (domain.width - grid.width).abs() > 1e-12 * domain.width {
        return Err(ZcError::Domain(format!(
            "grid ({} well of width {}) does not match the potential ({} well of width {})",
            grid.boundary, grid.width, domain.boundary, domain.width
        )));
    }
    let h = grid.h;
    let hop = units.hbar * units.hbar / (units.mass * h * h);
    let mut diag: Vec<f64> = grid.nodes().iter().map(|&x| hop + potential.smooth(x, h)).collect();
    for spike in potential.spikes() {
        let Some(j) = grid.node_index(spike.position) else {
            let positions: Vec<f64> = potential.spikes().iter().map(|s| s.position).collect();
            return Err(ZcError::SpikeOffGrid {
                position: spike.position,
                suggestion: compatible_grid_size(&positions, grid.width),
            });
        };
        diag[j] += spike.strength / h;
    }
    let n = diag.len();
    let corner = (grid.boundary == Boundary::Periodic).then_some(-0.5 * hop);
    TridiagonalHamiltonian::new(diag, vec![-0.5 * hop; n - 1], corner, h)
}

pub fn lowest_eigenpairs(hamiltonian: &TridiagonalHamiltonian, k: usize) -> Result<Vec<Eigenpair>> {
    hamiltonian.lowest_eigenpairs(k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralReport {
    pub ladder: Vec<usize>,
    /// Lowest eigenvalues, one row per rung.
    pub eigenvalues: Vec<Vec<f64>>,
    /// Eigenvalue of smallest magnitude at each rung.
    pub zero_mode: Vec<f64>,
    pub zero_mode_index: Vec<usize>,
    /// `|<psi_num, psi_design>|` in the grid inner product, both unit norm.
    pub overlaps: Vec<f64>,
    /// `|E|` below this is indistinguishable from zero at that rung.
    pub roundoff_floor: Vec<f64>,
    /// Order `p` in `|E_0| ~ h^p` from the two finest rungs above roundoff.
    pub convergence_order: Option<f64>,
    /// `|E_0|` shrinks along the ladder (or sits at the roundoff floor).
    pub decreasing: bool,
    pub passed: bool,
}

fn check_ladder(ladder: &[usize]) -> Result<()> {
    if ladder.is_empty() {
        return Err(ZcError::Domain("empty grid ladder".into()));
    }
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ZcError::Domain(format!("ladder sizes must increase strictly: {ladder:?}")));
    }
    Ok(())
}

/// Run every rung, in parallel.
fn run_ladder<T: Send>(ladder: &[usize], rung: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    let rung = &rung;
    std::thread::scope(|s| {
        let handles: Vec<_> = ladder.iter().map(|&n| s.spawn(move || rung(n))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("oracle rung panicked"))
            .collect()
    })
}

/// Check that `design` is a zero mode of its own potential.
pub fn verify_design(design: &ZcDesign, ladder: &[usize], k: usize) -> Result<SpectralReport> {
    verify_potential(design.wave(), design.potential(), design.units(), ladder, k)
}

/// Check how close `potential` comes to having `wave` as a zero mode.
pub fn verify_potential(
    wave: &PiecewiseLinearWave,
    potential: &DeltaArrayPotential,
    units: &UnitSystem,
    ladder: &[usize],
    k: usize,
) -> Result<SpectralReport> {
    check_ladder(ladder)?;
    if wave.domain() != potential.domain() {
        return Err(ZcError::Domain("wave and potential live on different wells".into()));
    }
    let wave = wave.normalize()?;
    struct Rung {
        values: Vec<f64>,
        index: usize,
        overlap: f64,
        floor: f64,
    }
    let rungs = run_ladder(ladder, |n| {
        let grid = Grid::new(potential.domain(), n)?;
        let ham = build_hamiltonian(potential, &grid, units)?;
        let pairs = ham.lowest_eigenpairs(k.min(ham.dim()))?;
        let index = (0..pairs.len())
            .min_by(|&i, &j| pairs[i].value.abs().total_cmp(&pairs[j].value.abs()))
            .unwrap_or(0);
        let mut sample: Vec<f64> = grid.nodes().iter().map(|&x| wave.eval_unchecked(x)).collect();
        let snorm = (sample.iter().map(|v| v * v).sum::<f64>() * grid.h).sqrt();
        sample.iter_mut().for_each(|v| *v /= snorm);
        let dot: f64 = pairs[index].vector.iter().zip(&sample).map(|(a, b)| a * b).sum();
        Ok(Rung {
            values: pairs.iter().map(|p| p.value).collect(),
            index,
            overlap: (dot * grid.h).abs().min(1.0),
            floor: ROUNDOFF_FACTOR * f64::EPSILON * ham.norm_inf(),
        })
    })?;

    let zero_mode: Vec<f64> = rungs.iter().map(|r| r.values[r.index]).collect();
    let floor: Vec<f64> = rungs.iter().map(|r| r.floor).collect();
    let at_floor = |i: usize| zero_mode[i].abs() <= floor[i];
    let decreasing = (1..ladder.len()).all(|i| {
        at_floor(i) || zero_mode[i].abs() < zero_mode[i - 1].abs()
    });
    let resolved: Vec<usize> = (0..ladder.len()).filter(|&i| !at_floor(i)).collect();
    let convergence_order = match resolved[..] {
        [.., i, j] => {
            let hi = 1.0 / (ladder[i] + 1) as f64;
            let hj = 1.0 / (ladder[j] + 1) as f64;
            Some((zero_mode[i].abs() / zero_mode[j].abs()).ln() / (hi / hj).ln())
        }
        _ => None,
    };
    Ok(SpectralReport {
        ladder: ladder.to_vec(),
        eigenvalues: rungs.iter().map(|r| r.values.clone()).collect(),
        zero_mode,
        zero_mode_index: rungs.iter().map(|r| r.index).collect(),
        overlaps: rungs.iter().map(|r| r.overlap).collect(),
        roundoff_floor: floor,
        convergence_order,
        decreasing,
        passed: decreasing,
    })
}

/// Two-point Richardson extrapolation along a ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Extrapolation {
    pub value: f64,
    /// Order used for the extrapolation.
    pub order: f64,
    /// False when the order could not be measured and the default was used.
    pub measured: bool,
}

pub const DEFAULT_ORDER: f64 = 2.0;

/// Extrapolate `values` (one per spacing in `h`, coarse to fine) to `h = 0`.
///
/// With three or more rungs the order is measured from the last three;
/// otherwise, or when the measurement is degenerate, `DEFAULT_ORDER` is used.
pub fn richardson(h: &[f64], values: &[f64]) -> Extrapolation {
    let m = values.len();
    if m == 1 {
        return Extrapolation { value: values[0], order: DEFAULT_ORDER, measured: false };
    }
    let mut order = DEFAULT_ORDER;
    let mut measured = false;
    if m >= 3 {
        if let Some(p) = measure_order(&h[m - 3..], &values[m - 3..]) {
            order = p;
            measured = true;
        }
    }
    let (h1, h2) = (h[m - 2], h[m - 1]);
    let (e1, e2) = (values[m - 2], values[m - 1]);
    let w = h2.powf(order) / (h1.powf(order) - h2.powf(order));
    Extrapolation { value: e2 + (e2 - e1) * w, order, measured }
}

fn measure_order(h: &[f64], e: &[f64]) -> Option<f64> {
    let d1 = e[0] - e[1];
    let d2 = e[1] - e[2];
    if d1 == 0.0 || d2 == 0.0 || d1.signum() != d2.signum() {
        return None;
    }
    let target = d1 / d2;
    let ratio = |p: f64| (h[0].powf(p) - h[1].powf(p)) / (h[1].powf(p) - h[2].powf(p));
    let (mut lo, mut hi) = (0.25, 8.0);
    if (ratio(lo) - target) * (ratio(hi) - target) > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (ratio(lo) - target) * (ratio(mid) - target) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelGap {
    /// Level index in the partner spectrum.
    pub n: usize,
    pub partner: Extrapolation,
    /// Matching level `n + 1` of the original potential.
    pub original: Extrapolation,
    pub relative_gap: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsospectralReport {
    pub ladder: Vec<usize>,
    /// `k + 1` lowest levels of the original potential per rung.
    pub original: Vec<Vec<f64>>,
    /// `k` lowest levels of the partner per rung.
    pub partner: Vec<Vec<f64>>,
    pub gaps: Vec<LevelGap>,
    /// Extrapolated ground level of the original potential.
    pub zero_mode: Extrapolation,
    /// No partner level lies within tolerance of the original zero mode.
    pub zero_mode_unmatched: bool,
    pub relative_tolerance: f64,
    pub passed: bool,
}

/// Compare the spectra of a partner pair level by level.
pub fn isospectral_check(pair: &SusyPair, k: usize, ladder: &[usize], rel_tol: f64) -> Result<IsospectralReport> {
    check_ladder(ladder)?;
    if k == 0 {
        return Err(ZcError::Domain("need at least one level to compare".into()));
    }
    let domain = *pair.original.domain();
    let rungs = run_ladder(ladder, |n| {
        let grid = Grid::new(&domain, n)?;
        let minus = build_hamiltonian(&pair.original, &grid, &pair.units)?.lowest_eigenvalues(k + 1)?;
        let plus = build_hamiltonian(&pair.partner, &grid, &pair.units)?.lowest_eigenvalues(k)?;
        Ok((minus, plus))
    })?;
    let h: Vec<f64> = ladder.iter().map(|&n| domain.width / (n + 1) as f64).collect();
    let column = |rows: &dyn Fn(usize) -> f64| -> Vec<f64> { (0..ladder.len()).map(rows).collect() };
    let minus_at = |level: usize| column(&|r| rungs[r].0[level]);
    let plus_at = |level: usize| column(&|r| rungs[r].1[level]);

    let gaps: Vec<LevelGap> = (0..k)
        .map(|n| {
            let partner = richardson(&h, &plus_at(n));
            let original = richardson(&h, &minus_at(n + 1));
            let relative_gap = (partner.value - original.value).abs() / original.value.abs();
            LevelGap { n, partner, original, relative_gap, passed: relative_gap <= rel_tol }
        })
        .collect();
    let zero_mode = richardson(&h, &minus_at(0));
    let scale = gaps[0].original.value.abs();
    let zero_mode_unmatched = gaps
        .iter()
        .all(|g| (g.partner.value - zero_mode.value).abs() > rel_tol * scale);
    let passed = zero_mode_unmatched && gaps.iter().all(|g| g.passed);
    Ok(IsospectralReport {
        ladder: ladder.to_vec(),
        original: rungs.iter().map(|r| r.0.clone()).collect(),
        partner: rungs.iter().map(|r| r.1.clone()).collect(),
        gaps,
        zero_mode,
        zero_mode_unmatched,
        relative_tolerance: rel_tol,
        passed,
    })
}
