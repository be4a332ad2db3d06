//! Bracketed root finding (Brent's method) and monotone inversion.

use super::quad::Bracket;
use crate::error::{Error, Result};

/// Default relative tolerance for root finding across the crate.
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;
const MAX_ITER: usize = 300;

/// Solve `g(x) = target` on `bracket` for monotone `g`.
///
/// Terminates when `|g(x) - target| <= tol·(1 + |target|)` or the bracket has
/// shrunk below `tol` (or to floating-point resolution).
pub fn invert_monotone<G: Fn(f64) -> f64>(g: G, target: f64, bracket: Bracket, tol: f64) -> Result<f64> {
    brent(|x| g(x) - target, bracket, tol, tol * (1.0 + target.abs()))
}

/// Brent's method for a root of `h` in `bracket`.
///
/// `xtol` is an absolute bracket tolerance, `ftol` an absolute residual tolerance.
pub fn brent<H: Fn(f64) -> f64>(h: H, bracket: Bracket, xtol: f64, ftol: f64) -> Result<f64> {
    let (mut a, mut b) = (bracket.lo, bracket.hi);
    let (mut fa, mut fb) = (h(a), h(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || fa.signum() == fb.signum() {
        return Err(Error::Bracket(format!(
            "target not straddled on [{a}, {b}] (residuals {fa:.3e}, {fb:.3e})"
        )));
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..MAX_ITER {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb.abs() <= ftol {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * xm * q - (tol1 * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = h(b);
        if fb.is_nan() {
            return Err(Error::NonConvergence(format!("residual became NaN at x = {b}")));
        }
    }
    Err(Error::NonConvergence("Brent iteration budget exhausted".into()))
}

/// Grow `[lo, hi]` geometrically away from `lo` until `h(hi)` changes sign relative to `h(lo)`.
pub fn expand_upper<H: Fn(f64) -> f64>(h: H, lo: f64, mut hi: f64, max_doublings: usize) -> Result<Bracket> {
    let f_lo = h(lo);
    let width0 = hi - lo;
    let mut width = width0;
    for _ in 0..max_doublings {
        let f_hi = h(hi);
        if f_hi == 0.0 || f_hi.signum() != f_lo.signum() {
            return Bracket::new(lo, hi);
        }
        width *= 2.0;
        hi = lo + width;
        if !hi.is_finite() {
            break;
        }
    }
    Err(Error::Bracket(format!("no sign change found in [{lo}, {}]", lo + width)))
}
