//! Bracketing root finders on the real line.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum RootError {
    #[error("no sign change on [{a}, {b}] (f(a) = {fa:e}, f(b) = {fb:e})")]
    NotBracketed { a: f64, b: f64, fa: f64, fb: f64 },
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
}

/// Bisection on the sign of `f` until the bracket is shorter than `xtol`.
/// An exact zero of `f` at a probe point is returned immediately.
pub fn bisect<F>(f: F, a: f64, b: f64, xtol: f64) -> Result<f64, RootError>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = if a < b { (a, b) } else { (b, a) };
    let (flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(RootError::NotBracketed { a: lo, b: hi, fa: flo, fb: fhi });
    }
    let lo_sign = flo.signum();
    for _ in 0..200 {
        if hi - lo <= xtol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(RootError::NoConvergence(200))
}

/// Newton's method kept inside a sign-change bracket: any step that leaves
/// the bracket, or fails to halve the residual, is replaced by bisection.
///
/// `f` returns the value and the derivative. Stops when `|f| <= ftol` or the
/// Newton step is below `xtol`.
pub fn newton_bisect<F>(f: F, a: f64, b: f64, x0: f64, ftol: f64, xtol: f64) -> Result<f64, RootError>
where
    F: Fn(f64) -> (f64, f64),
{
    const MAX_ITER: usize = 100;
    let (mut lo, mut hi) = if a < b { (a, b) } else { (b, a) };
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo.signum() == fhi.signum() && flo != 0.0 && fhi != 0.0 {
        return Err(RootError::NotBracketed { a: lo, b: hi, fa: flo, fb: fhi });
    }
    let lo_sign = flo.signum();
    let mut x = x0.clamp(lo, hi);
    let (mut fx, mut dfx) = f(x);
    let mut last_abs = f64::INFINITY;
    for _ in 0..MAX_ITER {
        if fx.abs() <= ftol {
            return Ok(x);
        }
        if fx.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let newton = if dfx != 0.0 { x - fx / dfx } else { f64::NAN };
        let next = if newton.is_finite() && newton > lo && newton < hi && fx.abs() < 0.5 * last_abs {
            newton
        } else {
            0.5 * (lo + hi)
        };
        last_abs = fx.abs();
        let step = (next - x).abs();
        x = next;
        (fx, dfx) = f(x);
        if step <= xtol {
            return Ok(x);
        }
    }
    Err(RootError::NoConvergence(MAX_ITER))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_sqrt2() {
        let x = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((x - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisect_requires_bracket() {
        assert!(matches!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12), Err(RootError::NotBracketed { .. })));
    }

    #[test]
    fn newton_converges_quadratically_inside_bracket() {
        let x = newton_bisect(|x| (x.cos() - x, -x.sin() - 1.0), 0.0, 1.0, 0.0, 1e-15, 1e-16).unwrap();
        assert!((x.cos() - x).abs() <= 1e-15);
    }

    #[test]
    fn newton_falls_back_to_bisection() {
        // Flat derivative at the start point sends pure Newton far outside.
        let f = |x: f64| (x.powi(3) - 0.001, 3.0 * x * x);
        let x = newton_bisect(f, -1.0, 1.0, 0.0, 1e-15, 1e-16).unwrap();
        assert!((x - 0.1).abs() < 1e-12);
    }
}
