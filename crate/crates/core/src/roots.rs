//! One-dimensional solvers shared by the touchpoint and quantile code.

use crate::error::{Error, Result};

pub(crate) const MAX_ITER: usize = 200;

/// Root of `f` on `[lo, hi]` where `f(lo)` and `f(hi)` differ in sign.
///
/// `f` returns the value and the derivative. Newton steps are taken when they
/// stay inside the current bracket and shrink it fast enough, bisection
/// otherwise. Stops once the bracket (or the Newton step) is below `tol`.
pub(crate) fn newton_bisect<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Numeric(format!(
            "no sign change on [{lo}, {hi}]: f = {flo}, {fhi}"
        )));
    }
    // orient so that f(neg) < 0 < f(pos)
    let (mut neg, mut pos) = if flo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    let mut step_old = (hi - lo).abs();
    let mut step = step_old;
    let (mut fx, mut dfx) = f(x);
    for _ in 0..MAX_ITER {
        let newton_ok = dfx != 0.0 && {
            let nx = x - fx / dfx;
            (nx - neg) * (nx - pos) < 0.0 && (2.0 * fx).abs() <= (step_old * dfx).abs()
        };
        step_old = step;
        if newton_ok {
            step = fx / dfx;
            x -= step;
        } else {
            step = 0.5 * (pos - neg);
            x = neg + step;
        }
        if step.abs() <= tol || (pos - neg).abs() <= tol {
            return Ok(x);
        }
        (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            neg = x;
        } else {
            pos = x;
        }
    }
    Err(Error::Numeric(format!(
        "root not converged after {MAX_ITER} iterations on [{lo}, {hi}]"
    )))
}

/// Maximizer of a unimodal `f` on `[a, b]` by golden-section search.
pub(crate) fn golden_max<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let (fa, fb) = (f(a), f(b));
    for _ in 0..MAX_ITER {
        if (b - a).abs() <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    // the endpoints are candidates too: the maximum may sit on the bracket edge
    [(c, fc), (d, fd), (a, fa), (b, fb)]
        .into_iter()
        .fold((c, f64::NEG_INFINITY), |best, cand| if cand.1 > best.1 { cand } else { best })
}
