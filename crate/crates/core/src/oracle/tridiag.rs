//! Symmetric tridiagonal eigensolver: Sturm bisection plus inverse iteration.
//!
//! Matrices may carry a single corner coupling between the first and last
//! rows, which is how periodic grids are represented.

use crate::error::{Result, ZcError};

const MAX_INVERSE_ITERATIONS: usize = 8;
const MAX_RETRIES: usize = 3;

/// Symmetric tridiagonal matrix with an optional periodic corner entry.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalHamiltonian {
    pub diag: Vec<f64>,
    /// `offdiag[i]` couples rows `i` and `i + 1`.
    pub offdiag: Vec<f64>,
    /// Coupling between the first and last rows.
    pub periodic_corner: Option<f64>,
    /// Grid spacing used for the inner product `sum(psi_j^2) * h`.
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    /// Normalized so that `sum(v_j^2) * h = 1`, first nonzero entry positive.
    pub vector: Vec<f64>,
}

impl TridiagonalHamiltonian {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>, periodic_corner: Option<f64>, h: f64) -> Result<Self> {
        let n = diag.len();
        if n == 0 || offdiag.len() + 1 != n {
            return Err(ZcError::Domain(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal entries",
                n,
                offdiag.len()
            )));
        }
        if periodic_corner.is_some() && n < 3 {
            return Err(ZcError::Domain("a periodic matrix needs at least 3 rows".into()));
        }
        if !(h > 0.0) {
            return Err(ZcError::Domain(format!("grid spacing must be positive, got {h}")));
        }
        Ok(TridiagonalHamiltonian { diag, offdiag, periodic_corner, h })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.dim();
        let corner = self.periodic_corner.unwrap_or(0.0).abs();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.offdiag[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.offdiag[i].abs();
                }
                if i == 0 || i == n - 1 {
                    s += corner;
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let corner = self.periodic_corner.unwrap_or(0.0).abs();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.offdiag[i - 1].abs();
            }
            if i + 1 < n {
                r += self.offdiag[i].abs();
            }
            if i == 0 || i == n - 1 {
                r += corner;
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y: Vec<f64> = (0..n).map(|i| self.diag[i] * x[i]).collect();
        for i in 0..n - 1 {
            y[i] += self.offdiag[i] * x[i + 1];
            y[i + 1] += self.offdiag[i] * x[i];
        }
        if let Some(c) = self.periodic_corner {
            y[0] += c * x[n - 1];
            y[n - 1] += c * x[0];
        }
        y
    }

    fn pivmin(&self) -> f64 {
        let emax = self
            .offdiag
            .iter()
            .chain(self.periodic_corner.iter())
            .map(|e| e * e)
            .fold(1.0, f64::max);
        f64::MIN_POSITIVE * emax
    }

    /// Number of eigenvalues strictly below `lambda`, from the inertia of
    /// `H - lambda`.
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let chain = self.chain_count(lambda);
        let c = match self.periodic_corner {
            Some(c) if c != 0.0 => c,
            _ => return chain,
        };
        // H = T + U C U^T with C = [[0, c], [c, 0]] on the end rows. By
        // Haynsworth, neg(H - l) = neg(T - l) + neg(S) - neg(-C^-1), where
        // S = -C^-1 - U^T (T - l)^-1 U and -C^-1 has one negative eigenvalue.
        let n = self.dim();
        let d: Vec<f64> = self.diag.iter().map(|x| x - lambda).collect();
        let tiny = f64::EPSILON * self.norm_inf();
        let mut e0 = vec![0.0; n];
        e0[0] = 1.0;
        let mut en = vec![0.0; n];
        en[n - 1] = 1.0;
        let x = solve_tridiagonal(&self.offdiag, &d, &self.offdiag, &e0, tiny);
        let y = solve_tridiagonal(&self.offdiag, &d, &self.offdiag, &en, tiny);
        let s00 = -x[0];
        let s11 = -y[n - 1];
        let s01 = -1.0 / c - 0.5 * (x[n - 1] + y[0]);
        let det = s00 * s11 - s01 * s01;
        let trace = s00 + s11;
        let neg_s = if det < 0.0 {
            1
        } else if det > 0.0 {
            if trace < 0.0 { 2 } else { 0 }
        } else {
            usize::from(trace < 0.0)
        };
        (chain + neg_s).saturating_sub(1)
    }

    /// Sturm count of the matrix with the corner dropped.
    fn chain_count(&self, lambda: f64) -> usize {
        let pivmin = self.pivmin();
        let guard = |q: f64| if q.abs() < pivmin { -pivmin } else { q };
        let mut count = 0;
        let mut q = guard(self.diag[0] - lambda);
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.dim() {
            let e = self.offdiag[i - 1];
            q = guard(self.diag[i] - lambda - e * e / q);
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k` smallest eigenvalues, ascending, by Sturm bisection.
    pub fn lowest_eigenvalues(&self, k: usize) -> Result<Vec<f64>> {
        self.check_k(k)?;
        let (glo, ghi) = self.gershgorin();
        let spread = (ghi - glo).max(f64::MIN_POSITIVE);
        let lo0 = glo - 1e-12 * spread - self.pivmin();
        let hi0 = ghi + 1e-12 * spread + self.pivmin();
        let atol = f64::EPSILON * glo.abs().max(ghi.abs());
        let mut out = Vec::with_capacity(k);
        for j in 0..k {
            let mut lo = out.last().copied().unwrap_or(lo0).min(hi0);
            // Previous eigenvalue is a valid lower bracket, nudged down so that
            // a degenerate pair is found again.
            if j > 0 {
                lo -= 4.0 * f64::EPSILON * lo.abs().max(spread * f64::EPSILON);
                if self.sturm_count(lo) > j {
                    lo = lo0;
                }
            }
            let mut hi = hi0;
            loop {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let width = hi - lo;
                if width <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + atol {
                    break;
                }
                if self.sturm_count(mid) > j {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        Ok(out)
    }

    /// The `k` lowest eigenpairs; eigenvectors by inverse iteration.
    pub fn lowest_eigenpairs(&self, k: usize) -> Result<Vec<Eigenpair>> {
        let values = self.lowest_eigenvalues(k)?;
        let n = self.dim();
        let anorm = self.norm_inf().max(f64::MIN_POSITIVE);
        let cluster_gap = 1e-3 * anorm;
        let tol = 16.0 * (n as f64).sqrt() * f64::EPSILON * anorm;
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut cluster_start = 0;
        for (j, &lambda) in values.iter().enumerate() {
            if j > 0 && lambda - values[j - 1] > cluster_gap {
                cluster_start = j;
            }
            let mut found = None;
            for attempt in 0..MAX_RETRIES {
                let sigma = lambda + attempt as f64 * 1e3 * f64::EPSILON * anorm;
                let mut x = start_vector(n, j + attempt * k);
                orthogonalize(&mut x, &vectors[cluster_start..]);
                normalize2(&mut x);
                for _ in 0..MAX_INVERSE_ITERATIONS {
                    let mut y = self.shifted_solve(sigma, &x, anorm);
                    orthogonalize(&mut y, &vectors[cluster_start..]);
                    if !normalize2(&mut y) {
                        break;
                    }
                    x = y;
                    let hx = self.apply(&x);
                    let r = hx
                        .iter()
                        .zip(&x)
                        .map(|(a, b)| (a - lambda * b).powi(2))
                        .sum::<f64>()
                        .sqrt();
                    if r <= tol {
                        found = Some(x.clone());
                        break;
                    }
                }
                if found.is_some() {
                    break;
                }
            }
            match found {
                Some(v) => vectors.push(v),
                None => {
                    return Err(ZcError::EigenNonConvergence(format!(
                        "inverse iteration for eigenvalue {j} ({lambda:e}) did not converge"
                    )))
                }
            }
        }
        let scale = self.h.sqrt().recip();
        Ok(values
            .into_iter()
            .zip(vectors)
            .map(|(value, mut v)| {
                let vmax = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let first = v.iter().find(|x| x.abs() > 1e-8 * vmax).copied().unwrap_or(1.0);
                let s = scale.copysign(first);
                v.iter_mut().for_each(|x| *x *= s);
                Eigenpair { value, vector: v }
            })
            .collect())
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.dim() {
            return Err(ZcError::Domain(format!(
                "requested {k} eigenvalues from a matrix of dimension {}",
                self.dim()
            )));
        }
        Ok(())
    }

    /// Solve `(H - sigma) x = b`, Sherman-Morrison for the corner.
    fn shifted_solve(&self, sigma: f64, b: &[f64], anorm: f64) -> Vec<f64> {
        let n = self.dim();
        let tiny = f64::EPSILON * anorm;
        let mut d: Vec<f64> = self.diag.iter().map(|x| x - sigma).collect();
        let Some(c) = self.periodic_corner else {
            return solve_tridiagonal(&self.offdiag, &d, &self.offdiag, b, tiny);
        };
        let gamma = if d[0].abs() > tiny { -d[0] } else { -1.0 };
        d[0] -= gamma;
        d[n - 1] -= c * c / gamma;
        let z = solve_tridiagonal(&self.offdiag, &d, &self.offdiag, b, tiny);
        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = c;
        let q = solve_tridiagonal(&self.offdiag, &d, &self.offdiag, &u, tiny);
        let vz = z[0] + c / gamma * z[n - 1];
        let vq = q[0] + c / gamma * q[n - 1];
        let mut denom = 1.0 + vq;
        if denom.abs() < f64::EPSILON {
            denom = f64::EPSILON.copysign(denom);
        }
        let f = vz / denom;
        z.iter().zip(&q).map(|(zi, qi)| zi - f * qi).collect()
    }
}

/// Gaussian elimination with partial pivoting for a general tridiagonal
/// system. Zero pivots are replaced by `tiny`.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64], tiny: f64) -> Vec<f64> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut b = rhs.to_vec();
    if n == 1 {
        if d[0] == 0.0 {
            d[0] = tiny;
        }
        return vec![b[0] / d[0]];
    }
    let mut dl = sub.to_vec();
    let mut du = sup.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            du[i] = temp;
            let bt = b[i];
            b[i] = b[i + 1];
            b[i + 1] = bt - fact * b[i];
        }
        dl[i] = 0.0;
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    b[n - 1] /= d[n - 1];
    b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
    b
}

fn start_vector(n: usize, seed: usize) -> Vec<f64> {
    // splitmix64, deterministic
    let mut state = 0x9E37_79B9_7F4A_7C15u64.wrapping_mul(seed as u64 + 1);
    (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for v in basis {
        let dot: f64 = x.iter().zip(v).map(|(a, b)| a * b).sum();
        x.iter_mut().zip(v).for_each(|(a, b)| *a -= dot * b);
    }
}

fn normalize2(x: &mut [f64]) -> bool {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return false;
    }
    x.iter_mut().for_each(|v| *v /= norm);
    true
}
