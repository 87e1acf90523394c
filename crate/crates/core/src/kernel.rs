//! The piecewise-quadratic kernel behind the single-interval rule, the rule
//! itself, and the adaptive-Simpson reference integrator used as the oracle
//! throughout the crate.
//!
//! For an interval `[a, b]`, a perturbation parameter `h in [0, 1]`, and an
//! evaluation point `x`, the kernel is
//!
//! ```text
//! K(x, t) = (t - (a + h(b-a)/2))^2 / 2   for t in [a, x]
//!           (t - (b - h(b-a)/2))^2 / 2   for t in (x, b]
//! ```
//!
//! and the rule `Q` extracted from the exactness identity
//! `int_a^b f = Q + int_a^b K(x, t) f''(t) dt` is
//!
//! ```text
//! Q = (b-a)(1-h) f(x) - (b-a)(1-h)(x - (a+b)/2) f'(x)
//!     + h(b-a)/2 (f(a) + f(b)) - h^2 (b-a)^2 / 8 (f'(b) - f'(a))
//! ```
//!
//! `identity_defect` measures how far numerics drift from that identity and
//! is the core self-consistency oracle of the test suite.

use thiserror::Error;

use crate::expr::{DifferentiableFunction, EvalError};

/// Relative slack when checking admissibility of `x`; points within this
/// distance of the admissible interval are snapped onto it. At `h = 1` the
/// interval degenerates to the midpoint, so the snap is what makes the
/// degenerate configuration constructible at all.
pub const ADMISSIBLE_SNAP: f64 = 1e-12;

/// Single-interval rule parameters `(a, b, h, x)`.
///
/// Invariants enforced at construction: `a < b`, `h in [0, 1]`, and
/// `x in [a + h(b-a)/2, b - h(b-a)/2]` up to the snap tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RulePoint {
    a: f64,
    b: f64,
    h: f64,
    x: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RuleError {
    #[error("invalid interval: require finite a < b, got a = {a}, b = {b}")]
    InvalidInterval { a: f64, b: f64 },
    #[error("perturbation parameter must lie in [0, 1], got {h}")]
    InvalidPerturbation { h: f64 },
    #[error("x = {x} outside the admissible interval [{lo}, {hi}]")]
    InadmissiblePoint { x: f64, lo: f64, hi: f64 },
    #[error("t = {t} outside the interval [{a}, {b}]")]
    PointOutsideInterval { t: f64, a: f64, b: f64 },
    #[error("norm must be non-negative, got {norm}")]
    InvalidNorm { norm: f64 },
}

impl RulePoint {
    /// Validates and builds a rule point, snapping `x` onto the admissible
    /// interval when it is within `ADMISSIBLE_SNAP * (b - a)` of it.
    pub fn new(a: f64, b: f64, h: f64, x: f64) -> Result<Self, RuleError> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(RuleError::InvalidInterval { a, b });
        }
        if !(0.0..=1.0).contains(&h) {
            return Err(RuleError::InvalidPerturbation { h });
        }
        let (lo, hi) = Self::admissible_interval(a, b, h);
        let slack = ADMISSIBLE_SNAP * (b - a);
        if !x.is_finite() || x < lo - slack || x > hi + slack {
            return Err(RuleError::InadmissiblePoint { x, lo, hi });
        }
        let x = x.clamp(lo.min(hi), hi.max(lo));
        Ok(Self { a, b, h, x })
    }

    /// The admissible interval `[a + h(b-a)/2, b - h(b-a)/2]` for `x`.
    pub fn admissible_interval(a: f64, b: f64, h: f64) -> (f64, f64) {
        (a + h * (b - a) / 2.0, b - h * (b - a) / 2.0)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn midpoint(&self) -> f64 {
        (self.a + self.b) / 2.0
    }
}

/// Evaluates the kernel `K(x, t)`.
///
/// The boundary `t = x` belongs to the left branch.
pub fn peano_kernel(rp: &RulePoint, t: f64) -> Result<f64, RuleError> {
    if t < rp.a || t > rp.b {
        return Err(RuleError::PointOutsideInterval { t, a: rp.a, b: rp.b });
    }
    let left_root = rp.a + rp.h * (rp.b - rp.a) / 2.0;
    let right_root = rp.b - rp.h * (rp.b - rp.a) / 2.0;
    if t <= rp.x {
        Ok(0.5 * (t - left_root) * (t - left_root))
    } else {
        Ok(0.5 * (t - right_root) * (t - right_root))
    }
}

// Shared by `single_rule` and the averaged-endpoint verification, which
// deliberately places x at the interval ends where admissibility does not
// hold but the exactness identity still does.
pub(crate) fn single_rule_at(
    f: &DifferentiableFunction,
    a: f64,
    b: f64,
    h: f64,
    x: f64,
) -> Result<f64, EvalError> {
    let width = b - a;
    let mid = (a + b) / 2.0;
    let t1 = width * (1.0 - h) * f.f(x)?;
    let t2 = width * (1.0 - h) * (x - mid) * f.df(x)?;
    let t3 = h * width / 2.0 * (f.f(a)? + f.f(b)?);
    let t4 = h * h * width * width / 8.0 * (f.df(b)? - f.df(a)?);
    Ok(t1 - t2 + t3 - t4)
}

/// The single-interval rule `Q` for `rp`.
///
/// At `h = 0` the endpoint terms vanish exactly; at `h = 1` the `f(x)` and
/// `f'(x)` terms carry a factor of exactly zero, so `Q` is independent of
/// the (snapped) evaluation point.
pub fn single_rule(f: &DifferentiableFunction, rp: &RulePoint) -> Result<f64, EvalError> {
    single_rule_at(f, rp.a, rp.b, rp.h, rp.x)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrateError {
    #[error("invalid interval: require a <= b, got a = {a}, b = {b}")]
    InvalidInterval { a: f64, b: f64 },
    #[error("tolerance must be positive, got {tol}")]
    InvalidTolerance { tol: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("adaptive bisection hit the depth limit; best estimate {best} for requested tolerance {tol}")]
    DepthExceeded { best: f64, tol: f64 },
}

const MAX_DEPTH: u32 = 48;

fn simpson(fa: f64, fm: f64, fb: f64, width: f64) -> f64 {
    width / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<G>(
    g: &G,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    converged: &mut bool,
) -> Result<f64, EvalError>
where
    G: Fn(f64) -> Result<f64, EvalError>,
{
    let m = (a + b) / 2.0;
    let lm = (a + m) / 2.0;
    let rm = (m + b) / 2.0;
    let flm = eval_finite(g, lm)?;
    let frm = eval_finite(g, rm)?;
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        *converged = false;
        return Ok(left + right + delta / 15.0);
    }
    let half_tol = tol / 2.0;
    let l = simpson_recurse(g, a, m, fa, flm, fm, left, half_tol, depth - 1, converged)?;
    let r = simpson_recurse(g, m, b, fm, frm, fb, right, half_tol, depth - 1, converged)?;
    Ok(l + r)
}

fn eval_finite<G>(g: &G, t: f64) -> Result<f64, EvalError>
where
    G: Fn(f64) -> Result<f64, EvalError>,
{
    let v = g(t)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite { x: t })
    }
}

/// Adaptive-bisection Simpson integration of `g` over `[a, b]` to absolute
/// tolerance `tol`. Deterministic for fixed inputs; this is the oracle every
/// certificate in the crate is checked against.
pub fn reference_integrate<G>(g: G, a: f64, b: f64, tol: f64) -> Result<f64, IntegrateError>
where
    G: Fn(f64) -> Result<f64, EvalError>,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(IntegrateError::InvalidInterval { a, b });
    }
    if !(tol > 0.0) {
        return Err(IntegrateError::InvalidTolerance { tol });
    }
    if a == b {
        return Ok(0.0);
    }
    let m = (a + b) / 2.0;
    let fa = eval_finite(&g, a)?;
    let fm = eval_finite(&g, m)?;
    let fb = eval_finite(&g, b)?;
    let whole = simpson(fa, fm, fb, b - a);
    let mut converged = true;
    let value = simpson_recurse(&g, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut converged)?;
    if converged {
        Ok(value)
    } else {
        Err(IntegrateError::DepthExceeded { best: value, tol })
    }
}

/// Integrates `K(x, .) * f''` over `[a, x]` and `(x, b]` separately.
///
/// The kernel has a kink (or jump) at `t = x`, so each branch is integrated
/// on its own side to keep the integrands smooth.
pub fn residual_via_kernel(
    f: &DifferentiableFunction,
    rp: &RulePoint,
    tol: f64,
) -> Result<f64, IntegrateError> {
    let left_root = rp.a + rp.h * (rp.b - rp.a) / 2.0;
    let right_root = rp.b - rp.h * (rp.b - rp.a) / 2.0;
    let left = reference_integrate(
        |t| Ok(0.5 * (t - left_root) * (t - left_root) * f.d2f(t)?),
        rp.a,
        rp.x,
        tol,
    )?;
    let right = reference_integrate(
        |t| Ok(0.5 * (t - right_root) * (t - right_root) * f.d2f(t)?),
        rp.x,
        rp.b,
        tol,
    )?;
    Ok(left + right)
}

/// `|(int f - Q) - int K f''|`, the numerical defect of the exactness
/// identity. Stays below roughly `10 * tol` when everything is consistent.
pub fn identity_defect(
    f: &DifferentiableFunction,
    rp: &RulePoint,
    tol: f64,
) -> Result<f64, IntegrateError> {
    let integral = reference_integrate(|t| f.f(t), rp.a, rp.b, tol)?;
    let rule = single_rule(f, rp)?;
    let residual = residual_via_kernel(f, rp, tol)?;
    Ok(((integral - rule) - residual).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn func(text: &str) -> DifferentiableFunction {
        DifferentiableFunction::from_expr(&parse(text).unwrap())
    }

    #[test]
    fn rule_point_validation() {
        assert!(matches!(
            RulePoint::new(1.0, 0.0, 0.0, 0.5),
            Err(RuleError::InvalidInterval { .. })
        ));
        assert!(matches!(
            RulePoint::new(0.0, 1.0, 1.5, 0.5),
            Err(RuleError::InvalidPerturbation { .. })
        ));
        assert!(matches!(
            RulePoint::new(0.0, 1.0, 0.5, 0.1),
            Err(RuleError::InadmissiblePoint { .. })
        ));
        assert!(RulePoint::new(0.0, 1.0, 0.5, 0.25).is_ok());
    }

    #[test]
    fn rule_point_snaps_at_degenerate_interval() {
        // At h = 1 the admissible interval collapses to the midpoint.
        let rp = RulePoint::new(0.0, 1.0, 1.0, 0.5 + 1e-13).unwrap();
        let (lo, hi) = RulePoint::admissible_interval(0.0, 1.0, 1.0);
        assert!(rp.x() >= lo.min(hi) && rp.x() <= hi.max(lo));
        assert!(RulePoint::new(0.0, 1.0, 1.0, 0.6).is_err());
    }

    #[test]
    fn kernel_values() {
        let rp = RulePoint::new(0.0, 1.0, 0.0, 0.5).unwrap();
        assert_eq!(peano_kernel(&rp, 0.25).unwrap(), 0.03125);
        assert_eq!(peano_kernel(&rp, 0.75).unwrap(), 0.03125);
        let rp = RulePoint::new(0.0, 1.0, 1.0, 0.5).unwrap();
        assert_eq!(peano_kernel(&rp, 0.5).unwrap(), 0.0);
        assert!(peano_kernel(&rp, 1.5).is_err());
    }

    #[test]
    fn kernel_non_negative_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let a = rng.gen::<f64>() * 2.0 - 1.0;
            let b = a + 0.1 + rng.gen::<f64>() * 2.0;
            let h = rng.gen::<f64>();
            let (lo, hi) = RulePoint::admissible_interval(a, b, h);
            let x = lo + rng.gen::<f64>() * (hi - lo);
            let rp = RulePoint::new(a, b, h, x).unwrap();
            let t = a + rng.gen::<f64>() * (b - a);
            assert!(peano_kernel(&rp, t).unwrap() >= 0.0);
        }
    }

    #[test]
    fn kernel_branches_match_at_midpoint() {
        // When x is the midpoint the two branch values at t = x agree by
        // symmetry for any h.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = rng.gen::<f64>() * 2.0 - 1.0;
            let b = a + 0.1 + rng.gen::<f64>() * 2.0;
            let h = rng.gen::<f64>();
            let x = (a + b) / 2.0;
            let left_root = a + h * (b - a) / 2.0;
            let right_root = b - h * (b - a) / 2.0;
            let left = 0.5 * (x - left_root) * (x - left_root);
            let right = 0.5 * (x - right_root) * (x - right_root);
            assert!((left - right).abs() <= 1e-14 * (1.0 + left.abs()));
        }
        // Dyadic endpoints make the symmetry exact in floating point.
        for h in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let (a, b, x) = (0.0, 1.0, 0.5);
            let left = 0.5 * (x - (a + h * (b - a) / 2.0)).powi(2);
            let right = 0.5 * ((b - h * (b - a) / 2.0) - x).powi(2);
            assert_eq!(left.to_bits(), right.to_bits());
        }
    }

    #[test]
    fn single_rule_examples() {
        // f = t^2, h = 1: (f(0)+f(1))/2 - (f'(1)-f'(0))/8 = 0.5 - 0.25.
        let f = func("x^2");
        let rp = RulePoint::new(0.0, 1.0, 1.0, 0.5).unwrap();
        assert_eq!(single_rule(&f, &rp).unwrap(), 0.25);

        // f = t^3, h = 0, x = 1/2: the midpoint value.
        let f = func("x^3");
        let rp = RulePoint::new(0.0, 1.0, 0.0, 0.5).unwrap();
        assert_eq!(single_rule(&f, &rp).unwrap(), 0.125);
    }

    #[test]
    fn single_rule_exact_for_linear() {
        let f = func("3*x - 2");
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let a = rng.gen::<f64>() * 2.0 - 1.0;
            let b = a + 0.1 + rng.gen::<f64>() * 2.0;
            let h = rng.gen::<f64>();
            let (lo, hi) = RulePoint::admissible_interval(a, b, h);
            let x = lo + rng.gen::<f64>() * (hi - lo);
            let rp = RulePoint::new(a, b, h, x).unwrap();
            let q = single_rule(&f, &rp).unwrap();
            let exact = 1.5 * (b * b - a * a) - 2.0 * (b - a);
            assert!((q - exact).abs() <= 1e-12 * (1.0 + exact.abs()));
        }
    }

    #[test]
    fn h0_reduction_is_exact() {
        let f = func("exp(x)");
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let a = rng.gen::<f64>() * 2.0 - 1.0;
            let b = a + 0.1 + rng.gen::<f64>() * 2.0;
            let x = a + rng.gen::<f64>() * (b - a);
            let rp = RulePoint::new(a, b, 0.0, x).unwrap();
            let q = single_rule(&f, &rp).unwrap();
            let mid = (a + b) / 2.0;
            let reduced =
                (b - a) * f.f(x).unwrap() - (b - a) * (x - mid) * f.df(x).unwrap();
            assert_eq!(q.to_bits(), reduced.to_bits());
        }
    }

    #[test]
    fn h1_rule_is_x_independent() {
        let f = func("sin(x)");
        let rp1 = RulePoint::new(0.0, 2.0, 1.0, 1.0).unwrap();
        let rp2 = RulePoint::new(0.0, 2.0, 1.0, 1.0 + 1e-13).unwrap();
        let q1 = single_rule(&f, &rp1).unwrap();
        let q2 = single_rule(&f, &rp2).unwrap();
        assert_eq!(q1.to_bits(), q2.to_bits());
        let reduced = (2.0 / 2.0) * (f.f(0.0).unwrap() + f.f(2.0).unwrap())
            - (4.0 / 8.0) * (f.df(2.0).unwrap() - f.df(0.0).unwrap());
        assert!((q1 - reduced).abs() <= 1e-15 * (1.0 + reduced.abs()));
    }

    #[test]
    fn reference_integrator_examples() {
        let v = reference_integrate(|t| Ok(t * t), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - 1.0 / 3.0).abs() <= 1e-12);
        let v = reference_integrate(|t| Ok(t.exp()), 0.0, 1.0, 1e-12).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() <= 1e-12);
        assert_eq!(reference_integrate(|_| Ok(1.0), 3.0, 3.0, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn reference_integrator_rejects_bad_input() {
        assert!(matches!(
            reference_integrate(|t| Ok(t), 1.0, 0.0, 1e-9),
            Err(IntegrateError::InvalidInterval { .. })
        ));
        assert!(matches!(
            reference_integrate(|t| Ok(t), 0.0, 1.0, 0.0),
            Err(IntegrateError::InvalidTolerance { .. })
        ));
        assert!(matches!(
            reference_integrate(|t| Ok(1.0 / t), -1.0, 1.0, 1e-9),
            Err(_)
        ));
    }

    #[test]
    fn residual_examples() {
        let f = func("x^2");
        let rp = RulePoint::new(0.0, 1.0, 1.0, 0.5).unwrap();
        let r = residual_via_kernel(&f, &rp, 1e-12).unwrap();
        assert!((r - 1.0 / 12.0).abs() <= 1e-11);

        let f = func("x^3");
        let rp = RulePoint::new(0.0, 1.0, 0.0, 0.5).unwrap();
        let r = residual_via_kernel(&f, &rp, 1e-12).unwrap();
        assert!((r - 0.125).abs() <= 1e-11);

        let f = func("2*x + 1");
        let rp = RulePoint::new(0.0, 1.0, 0.5, 0.5).unwrap();
        assert_eq!(residual_via_kernel(&f, &rp, 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn identity_defect_small() {
        let tol = 1e-10;
        for (text, a, b, h, x) in [
            ("exp(x)", 0.0, 1.0, 0.5, 0.5),
            ("x^2", 0.0, 1.0, 1.0, 0.5),
            ("3*x - 1", -1.0, 2.0, 0.3, 0.8),
        ] {
            let f = func(text);
            let rp = RulePoint::new(a, b, h, x).unwrap();
            let defect = identity_defect(&f, &rp, tol).unwrap();
            assert!(defect <= 10.0 * tol, "{text}: defect {defect}");
        }
    }
}
