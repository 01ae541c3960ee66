//! Bracketed scalar root finding: bisection down to a target bracket width,
//! then Newton steps that are rejected whenever they leave the bracket.

/// Finds a root of `f` in `[lo, hi]` where `f(lo)` and `f(hi)` differ in sign.
/// `f` returns `(value, derivative)`.
///
/// Bisection runs until the bracket is narrower than `switch_width`; Newton
/// then takes over, falling back to bisection on any step that escapes.
pub fn bracketed_newton<F>(f: F, mut lo: f64, mut hi: f64, switch_width: f64, rel_tol: f64) -> Option<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (mut flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return None;
    }
    for _ in 0..200 {
        if hi - lo <= switch_width {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (fm, _) = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Some(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let step = fx / dfx;
        let mut next = x - step;
        if !(next > lo && next < hi) || !step.is_finite() {
            next = 0.5 * (lo + hi);
        }
        let converged = (next - x).abs() <= rel_tol * x.abs().max(f64::MIN_POSITIVE);
        x = next;
        if converged || hi - lo <= rel_tol * x.abs() {
            break;
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_cube_root() {
        let r = bracketed_newton(|x| (x * x * x - 2.0, 3.0 * x * x), 0.0, 2.0, 1e-3, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_bracket() {
        assert!(bracketed_newton(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, 1e-3, 1e-14).is_none());
    }

    #[test]
    fn survives_flat_derivative_near_fold() {
        // f has a double-root-like flat spot next to the bracket end.
        let f = |x: f64| ((x - 1.0).powi(3) + 1e-9, 3.0 * (x - 1.0).powi(2));
        let r = bracketed_newton(f, 0.0, 1.0, 1e-3, 1e-15).unwrap();
        assert!(f(r).0.abs() < 1e-15);
    }
}
