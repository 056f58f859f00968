//! Scalar special functions and bracketed root finding.

use std::f64::consts::E;

use crate::error::{Error, Result};

const LAMBERT_MAX_ITER: usize = 100;
const BISECTION_MAX_ITER: usize = 2200;

/// Slack below the branch point `-1/e` that is still mapped to `W = -1`.
const BRANCH_SLACK: f64 = 1e-15;

/// Principal branch `W0` of the Lambert function: the `w >= -1` solving
/// `w * exp(w) = x`.
///
/// Halley iteration seeded with `ln(1 + x)` (and with the branch-point series
/// close to `-1/e`).
pub fn lambert_w0(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain("lambert_w0 of NaN".into()));
    }
    let branch = -1.0 / E;
    if x < branch - BRANCH_SLACK {
        return Err(Error::Domain(format!("lambert_w0 requires x >= -1/e, got {x}")));
    }
    if x <= branch {
        return Ok(-1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if x > 1e300 {
        // w*e^w overflows near the top of the f64 range
        return lambert_w0_exp(x.ln());
    }

    let mut w = if x < -0.3 {
        let p = (2.0 * (E * x + 1.0)).max(0.0).sqrt();
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else {
        x.ln_1p()
    };

    for _ in 0..LAMBERT_MAX_ITER {
        let ew = w.exp();
        let f = w * ew - x;
        if f == 0.0 {
            break;
        }
        let wp1 = w + 1.0;
        if wp1 <= 0.0 {
            w = -1.0 + 1e-12;
            continue;
        }
        let denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        let step = f / denom;
        let next = (w - step).max(-1.0);
        if (next - w).abs() <= 4.0 * f64::EPSILON * (1.0 + next.abs()) {
            w = next;
            break;
        }
        w = next;
    }
    Ok(w)
}

/// `W0(exp(log_x))`, stable for arguments whose exponential overflows.
///
/// Solves `w + ln(w) = log_x` by Newton iteration once `log_x > 1`.
pub fn lambert_w0_exp(log_x: f64) -> Result<f64> {
    if log_x.is_nan() {
        return Err(Error::Domain("lambert_w0_exp of NaN".into()));
    }
    if log_x == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    if log_x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if log_x <= 1.0 {
        return lambert_w0(log_x.exp());
    }
    let mut w = log_x - log_x.ln();
    for _ in 0..LAMBERT_MAX_ITER {
        let g = w + w.ln() - log_x;
        let next = w - g / (1.0 + 1.0 / w);
        if (next - w).abs() <= 4.0 * f64::EPSILON * next.abs() {
            return Ok(next);
        }
        w = next;
    }
    Ok(w)
}

/// A continuous function together with an interval that brackets a root.
#[derive(Clone, Copy)]
pub struct BracketedFunction<F> {
    pub f: F,
    pub a: f64,
    pub b: f64,
}

impl<F: Fn(f64) -> f64> BracketedFunction<F> {
    pub fn new(f: F, a: f64, b: f64) -> Self {
        Self { f, a, b }
    }
}

/// Bisection on a sign-changing bracket.
///
/// Returns as soon as `|f(r)| <= tol` or the bracket is narrower than `tol`.
/// Deterministic: the sequence of evaluations depends only on the inputs.
pub fn find_root<F: Fn(f64) -> f64>(bf: &BracketedFunction<F>, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let (mut lo, mut hi) = if bf.a <= bf.b { (bf.a, bf.b) } else { (bf.b, bf.a) };
    let mut flo = (bf.f)(lo);
    let fhi = (bf.f)(hi);
    if flo.is_nan() || fhi.is_nan() {
        return Err(Error::Domain("function is NaN at a bracket end".into()));
    }
    if flo.abs() <= tol {
        return Ok(lo);
    }
    if fhi.abs() <= tol {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoSignChange { a: lo, b: hi, fa: flo, fb: fhi });
    }

    for _ in 0..BISECTION_MAX_ITER {
        let mid = lo + 0.5 * (hi - lo);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fmid = (bf.f)(mid);
        if fmid.is_nan() {
            return Err(Error::Domain(format!("function is NaN at {mid}")));
        }
        if fmid.abs() <= tol {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence { iterations: BISECTION_MAX_ITER })
}

/// Bisection that only looks at the sign of `f`, for functions whose jump
/// discontinuities make `|f| <= tol` meaningless. Returns the bracket end
/// on the positive side once the bracket is narrower than `tol`.
pub(crate) fn bisect_sign<F: Fn(f64) -> bool>(pred: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    // invariant: !pred(lo) && pred(hi)
    for _ in 0..BISECTION_MAX_ITER {
        let mid = lo + 0.5 * (hi - lo);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Fixed-point/Halley iteration from w0 = 0.5, run to machine precision.
    fn omega_oracle() -> f64 {
        let mut w: f64 = 0.5;
        for _ in 0..200 {
            w -= (w * w.exp() - 1.0) / (w.exp() * (w + 1.0));
        }
        w
    }

    #[test]
    fn lambert_trivial_points() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert_relative_eq!(lambert_w0(E).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(lambert_w0(-1.0 / E).unwrap(), -1.0);
    }

    #[test]
    fn omega_constant() {
        let oracle = omega_oracle();
        assert_relative_eq!(oracle, 0.567_143_290_409_783_8, epsilon = 1e-15);
        assert_relative_eq!(lambert_w0(1.0).unwrap(), oracle, epsilon = 1e-15);
    }

    #[test]
    fn lambert_rejects_below_branch_point() {
        assert!(matches!(lambert_w0(-0.5), Err(Error::Domain(_))));
        assert!(lambert_w0(-1.0 / E - 1e-16).is_ok());
    }

    #[test]
    fn lambert_exp_form_matches_direct() {
        for &l in &[-30.0, -1.0, 0.0, 0.5, 1.0, 2.0, 10.0, 300.0] {
            let direct = lambert_w0(f64::exp(l)).unwrap();
            assert_relative_eq!(lambert_w0_exp(l).unwrap(), direct, max_relative = 1e-14);
        }
        // far beyond exp overflow: w + ln w = l
        let w = lambert_w0_exp(5000.0).unwrap();
        assert_relative_eq!(w + w.ln(), 5000.0, max_relative = 1e-15);
    }

    #[test]
    fn lambert_strictly_increasing_on_grid() {
        let lo = -1.0 / E + 1e-9;
        let mut prev = lambert_w0(lo).unwrap();
        for i in 1..10_000 {
            let x = lo + (1e3 - lo) * (i as f64 / 9_999.0).powi(3);
            let w = lambert_w0(x).unwrap();
            assert!(w > prev, "not increasing at x = {x}");
            prev = w;
        }
    }

    #[test]
    fn find_root_examples() {
        let r = find_root(&BracketedFunction::new(|x| x - 2.0, 0.0, 5.0), 1e-12).unwrap();
        assert_relative_eq!(r, 2.0, epsilon = 1e-12);

        let f = |x: f64| 1000.0 * (1.0 - (-0.1 * x).exp()) - 500.0;
        let r = find_root(&BracketedFunction::new(f, 0.0, 100.0), 1e-12).unwrap();
        // forward substitution of ln 2 / 0.1
        assert!(f(r).abs() <= 1e-9);
        assert_relative_eq!(r, std::f64::consts::LN_2 / 0.1, max_relative = 1e-12);

        let r = find_root(&BracketedFunction::new(|x| x, -1.0, 1.0), 1e-12).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn find_root_errors() {
        let err = find_root(&BracketedFunction::new(|x| x * x + 1.0, -1.0, 1.0), 1e-12);
        assert!(matches!(err, Err(Error::NoSignChange { .. })));
        let err = find_root(&BracketedFunction::new(|x| x, -1.0, 1.0), 0.0);
        assert!(matches!(err, Err(Error::Domain(_))));
    }

    proptest::proptest! {
        #[test]
        fn lambert_residual(u in 0.0f64..1.0) {
            let lo = -1.0 / E + 1e-9;
            let x = lo + (1e6 - lo) * u * u * u;
            let w = lambert_w0(x).unwrap();
            proptest::prop_assert!(w >= -1.0);
            proptest::prop_assert!((w * w.exp() - x).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }
}
