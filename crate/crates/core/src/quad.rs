//! Adaptive Simpson quadrature and the sine integral.

use crate::error::{Result, ZcError};

const MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Accumulated Richardson error estimate over all accepted intervals.
    pub error: f64,
}

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<Quadrature> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut acc = Quadrature { value: 0.0, error: 0.0 };
    let mut unresolved = false;
    step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut acc, &mut unresolved);
    if unresolved && acc.error > tol {
        return Err(ZcError::QuadratureNonConvergence { bound: acc.error });
    }
    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
fn step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    acc: &mut Quadrature,
    unresolved: &mut bool,
) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || depth == 0 {
        if depth == 0 && delta.abs() > 15.0 * tol {
            *unresolved = true;
        }
        acc.value += left + right + delta / 15.0;
        acc.error += delta.abs() / 15.0;
        return;
    }
    step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, acc, unresolved);
    step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, acc, unresolved);
}

/// Splits `[a, b]` into panels no wider than `panel` and integrates each
/// adaptively, sharing `tol` in proportion to panel width.
pub fn paneled_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    panel: f64,
    tol: f64,
) -> Result<Quadrature> {
    let count = ((b - a) / panel).ceil().max(1.0) as usize;
    let width = (b - a) / count as f64;
    let mut total = Quadrature { value: 0.0, error: 0.0 };
    for i in 0..count {
        let lo = a + i as f64 * width;
        let hi = if i + 1 == count { b } else { lo + width };
        let q = adaptive_simpson(f, lo, hi, tol * width / (b - a))?;
        total.value += q.value;
        total.error += q.error;
    }
    Ok(total)
}

/// Sine integral `Si(x) = ∫_0^x sin(t)/t dt`.
///
/// Power series for small arguments, continued fraction for `E1(ix)`
/// beyond that.
pub fn sine_integral(x: f64) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    let t = x.abs();
    let sign = x.signum();
    if t == 0.0 {
        return 0.0;
    }
    if t <= 2.0 {
        // Si(t) = sum (-1)^k t^(2k+1) / ((2k+1) (2k+1)!)
        let mut term = t;
        let mut sum = t;
        let mut k = 0.0;
        loop {
            k += 1.0;
            let n = 2.0 * k + 1.0;
            term *= -t * t / ((n - 1.0) * n);
            let add = term / n;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        return sign * sum;
    }
    // modified Lentz on E1(i t)
    let tiny = 1e-300;
    let mut b = (1.0, t);
    let mut c = (1.0 / tiny, 0.0);
    let mut d = cdiv((1.0, 0.0), b);
    let mut h = d;
    for i in 2..1000 {
        let an = -((i - 1) as f64).powi(2);
        b.0 += 2.0;
        // d = 1 / (an d + b)
        d = cdiv((1.0, 0.0), (an * d.0 + b.0, an * d.1 + b.1));
        let ac = cdiv((an, 0.0), c);
        c = (b.0 + ac.0, b.1 + ac.1);
        let del = cmul(c, d);
        h = cmul(h, del);
        if (del.0 - 1.0).abs() + del.1.abs() < 1e-16 {
            break;
        }
    }
    let h = cmul((t.cos(), -t.sin()), h);
    sign * (FRAC_PI_2 + h.1)
}

fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let den = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / den, (a.1 * b.0 - a.0 * b.1) / den)
}

/// `∫_P^∞ cos(w p) / p^2 dp` for `w >= 0`, `P > 0`.
pub fn cosine_over_square_tail(w: f64, p: f64) -> f64 {
    let w = w.abs();
    if w == 0.0 {
        return 1.0 / p;
    }
    (w * p).cos() / p - w * (std::f64::consts::FRAC_PI_2 - sine_integral(w * p))
}
