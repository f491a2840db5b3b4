use super::Tolerance;
use crate::error::{Error, Result};

/// Bracketed root finding (Brent: bisection safeguarding secant and inverse
/// quadratic steps).
///
/// Requires `f(lo) * f(hi) <= 0`. Terminates once the bracket is narrower than
/// `2 * max(tol.abs, tol.rel * |x|)` (floored at a few ulps) or `f` vanishes.
pub fn find_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: &Tolerance) -> Result<f64> {
    tol.validate()?;
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() || fb.is_nan() || fa * fb > 0.0 {
        return Err(Error::InvalidBracket {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;

    for _ in 0..tol.max_iter {
        if fb * fc > 0.0 {
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
        let half_tol = tol.bound(b).max(2.0 * f64::EPSILON * b.abs()).max(f64::MIN_POSITIVE);
        let m = 0.5 * (c - b);
        if m.abs() <= half_tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= half_tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q) = if a == c {
                (2.0 * m * s, 1.0 - s)
            } else {
                let q0 = fa / fc;
                let r = fb / fc;
                (
                    s * (2.0 * m * q0 * (q0 - r) - (b - a) * (r - 1.0)),
                    (q0 - 1.0) * (r - 1.0) * (s - 1.0),
                )
            };
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (half_tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > half_tol {
            d
        } else {
            half_tol.copysign(m)
        };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::Domain {
                func: "find_root",
                detail: format!("function returned NaN at {b}"),
            });
        }
    }
    Err(Error::NonConvergence {
        what: "bracketed root finding",
        iterations: tol.max_iter,
    })
}

/// Solves `f(x) = target` for a continuous non-decreasing `f` on `[lo, hi]`.
pub fn invert_monotone<F: FnMut(f64) -> f64>(
    mut f: F,
    target: f64,
    lo: f64,
    hi: f64,
    tol: &Tolerance,
) -> Result<f64> {
    find_root(|x| f(x) - target, lo, hi, tol)
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
/// Returns `(argmin, min)`; the endpoints are included as candidates.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: &Tolerance) -> (f64, f64) {
    let (fa, fb) = (f(a), f(b));
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..tol.max_iter {
        if (hi - lo).abs() <= tol.bound(0.5 * (lo + hi)).max(4.0 * f64::EPSILON * lo.abs().max(hi.abs())) {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    [(a, fa), (b, fb), (x1, f1), (x2, f2)]
        .into_iter()
        .fold((a, fa), |best, cand| if cand.1 < best.1 { cand } else { best })
}

/// Golden-section search for a maximum; see [`golden_section_min`].
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: &Tolerance) -> (f64, f64) {
    let (x, v) = golden_section_min(|x| -f(x), a, b, tol);
    (x, -v)
}
