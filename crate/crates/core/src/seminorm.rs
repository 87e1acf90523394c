//! Norm estimators for the quantities the bounds consume: the L1 norm
//! `int_a^b |g|` (with sign-change splitting so the integrand stays smooth)
//! and a best-effort sup norm.

use serde::Serialize;

use crate::expr::EvalError;
use crate::kernel::{reference_integrate, IntegrateError};

/// Default absolute tolerance for L1 norm estimates.
pub const DEFAULT_L1_TOL: f64 = 1e-10;

/// Grid resolution used to locate sign changes for the public estimator.
const L1_GRID: usize = 1025;

/// Grid resolution for the sup-norm scan.
const SUP_GRID: usize = 4097;

/// Relative width to which each sign-change bracket is bisected.
const ROOT_WIDTH_REL: f64 = 1e-12;

/// Which norm an estimate stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NormKind {
    L1OfFirst,
    L1OfSecond,
    SupOfFirst,
    SupOfSecond,
}

/// A computed norm together with the interval and tolerance it was
/// computed at.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub kind: NormKind,
    pub interval: (f64, f64),
    pub achieved_tolerance: f64,
}

/// `int_a^b |g(t)| dt` to absolute tolerance `tol`.
///
/// `g` is sampled on a uniform grid to locate sign changes, each change is
/// bracketed by bisection down to `1e-12 * (b - a)`, and `|g|` is then
/// integrated piecewise between the roots so every piece is smooth.
pub fn l1_norm<G>(
    g: G,
    a: f64,
    b: f64,
    tol: f64,
    kind: NormKind,
) -> Result<NormEstimate, IntegrateError>
where
    G: Fn(f64) -> Result<f64, EvalError>,
{
    l1_norm_with_grid(g, a, b, tol, kind, L1_GRID)
}

// The composite-rule modules estimate many norms over tiny subintervals; a
// coarser scan grid is enough there and keeps refinement loops fast.
pub(crate) fn l1_norm_with_grid<G>(
    g: G,
    a: f64,
    b: f64,
    tol: f64,
    kind: NormKind,
    grid: usize,
) -> Result<NormEstimate, IntegrateError>
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
        return Ok(NormEstimate { value: 0.0, kind, interval: (a, b), achieved_tolerance: tol });
    }

    let n = grid.max(3);
    let step = (b - a) / (n - 1) as f64;
    let mut prev_t = a;
    let mut prev_v = g(a)?;
    let mut roots = Vec::new();
    for i in 1..n {
        let t = if i == n - 1 { b } else { a + step * i as f64 };
        let v = g(t)?;
        if prev_v * v < 0.0 {
            roots.push(bisect_root(&g, prev_t, prev_v, t, (b - a) * ROOT_WIDTH_REL)?);
        }
        prev_t = t;
        prev_v = v;
    }

    let mut cuts = Vec::with_capacity(roots.len() + 2);
    cuts.push(a);
    cuts.extend(roots);
    cuts.push(b);
    let piece_tol = tol / (cuts.len() - 1) as f64;
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        total += reference_integrate(|t| Ok(g(t)?.abs()), pair[0], pair[1], piece_tol)?;
    }
    Ok(NormEstimate { value: total.max(0.0), kind, interval: (a, b), achieved_tolerance: tol })
}

fn bisect_root<G>(g: &G, mut lo: f64, mut flo: f64, mut hi: f64, width: f64) -> Result<f64, IntegrateError>
where
    G: Fn(f64) -> Result<f64, EvalError>,
{
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fmid = g(mid)?;
        if flo * fmid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Best-effort `sup_{[a,b]} |g|`: a dense grid scan refined by
/// golden-section search around the strongest local maxima.
///
/// The result can undershoot by at most the local modulus of continuity
/// over one grid cell; it is used for baseline comparisons only, never for
/// the primary certificates.
pub fn sup_norm<G>(g: G, a: f64, b: f64, kind: NormKind) -> Result<NormEstimate, IntegrateError>
where
    G: Fn(f64) -> Result<f64, EvalError>,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(IntegrateError::InvalidInterval { a, b });
    }
    let xtol = ((b - a) * 1e-10).max(f64::MIN_POSITIVE);
    if a == b {
        let v = g(a)?.abs();
        return Ok(NormEstimate { value: v, kind, interval: (a, b), achieved_tolerance: xtol });
    }

    let n = SUP_GRID;
    let step = (b - a) / (n - 1) as f64;
    let mut vals = Vec::with_capacity(n);
    for i in 0..n {
        let t = if i == n - 1 { b } else { a + step * i as f64 };
        vals.push(g(t)?.abs());
    }
    let mut best = vals.iter().cloned().fold(0.0, f64::max);

    // Candidates: grid-local maxima (endpoints included), strongest first.
    let mut candidates: Vec<usize> = (0..n)
        .filter(|&i| {
            let left_ok = i == 0 || vals[i] >= vals[i - 1];
            let right_ok = i == n - 1 || vals[i] >= vals[i + 1];
            left_ok && right_ok
        })
        .collect();
    candidates.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]).then(i.cmp(&j)));
    for &i in candidates.iter().take(3) {
        let lo = if i == 0 { a } else { a + step * (i - 1) as f64 };
        let hi = if i + 1 >= n - 1 { b } else { a + step * (i + 1) as f64 };
        best = best.max(golden_section_max(&g, lo, hi, xtol)?);
    }
    Ok(NormEstimate { value: best, kind, interval: (a, b), achieved_tolerance: xtol })
}

fn golden_section_max<G>(g: &G, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64, IntegrateError>
where
    G: Fn(f64) -> Result<f64, EvalError>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = g(x1)?.abs();
    let mut f2 = g(x2)?.abs();
    let mut best = f1.max(f2);
    while hi - lo > xtol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = g(x2)?.abs();
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = g(x1)?.abs();
        }
        best = best.max(f1.max(f2));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn l1_of_second_derivative_of_cube() {
        // g(t) = 6t on [0, 1].
        let est = l1_norm(|t| Ok(6.0 * t), 0.0, 1.0, 1e-10, NormKind::L1OfSecond).unwrap();
        assert!((est.value - 3.0).abs() <= 1e-10);
    }

    #[test]
    fn l1_of_negative_sine() {
        let est = l1_norm(|t: f64| Ok(-t.sin()), 0.0, std::f64::consts::PI, 1e-10, NormKind::L1OfSecond)
            .unwrap();
        assert!((est.value - 2.0).abs() <= 1e-9);
    }

    #[test]
    fn l1_of_zero_function() {
        let est = l1_norm(|_| Ok(0.0), -1.0, 4.0, 1e-10, NormKind::L1OfSecond).unwrap();
        assert_eq!(est.value, 0.0);
    }

    #[test]
    fn l1_with_interior_sign_changes() {
        // sin over [0, 2*pi] crosses zero at pi: integral of |sin| is 4.
        let two_pi = 2.0 * std::f64::consts::PI;
        let est = l1_norm(|t: f64| Ok(t.sin()), 0.0, two_pi, 1e-10, NormKind::L1OfFirst).unwrap();
        assert!((est.value - 4.0).abs() <= 1e-9, "{}", est.value);
        // (t - 1)(t + 1) over [-2, 2]: int |t^2 - 1| = 4.
        let est = l1_norm(|t: f64| Ok(t * t - 1.0), -2.0, 2.0, 1e-10, NormKind::L1OfFirst).unwrap();
        assert!((est.value - 4.0).abs() <= 1e-9, "{}", est.value);
    }

    #[test]
    fn l1_additivity_and_homogeneity() {
        let g = |t: f64| Ok((3.0 * t).sin() - 0.3);
        let tol = 1e-10;
        let whole = l1_norm(g, -1.0, 2.0, tol, NormKind::L1OfFirst).unwrap().value;
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let cut = -1.0 + rng.gen::<f64>() * 3.0;
            let left = l1_norm(g, -1.0, cut, tol, NormKind::L1OfFirst).unwrap().value;
            let right = l1_norm(g, cut, 2.0, tol, NormKind::L1OfFirst).unwrap().value;
            assert!((left + right - whole).abs() <= 2.0 * tol + 1e-12);
        }
        let lambda = -2.5;
        let scaled =
            l1_norm(|t| Ok(lambda * ((3.0 * t).sin() - 0.3)), -1.0, 2.0, tol, NormKind::L1OfFirst)
                .unwrap()
                .value;
        assert!((scaled - lambda.abs() * whole).abs() <= 2.0 * tol + 1e-9 * whole);
    }

    #[test]
    fn partition_norms_sum_to_global() {
        let g = |t: f64| Ok(t.cos() * t);
        let tol = 1e-11;
        let whole = l1_norm(g, 0.0, 3.0, tol, NormKind::L1OfSecond).unwrap().value;
        let n = 7;
        let mut sum = 0.0;
        for i in 0..n {
            let lo = 3.0 * i as f64 / n as f64;
            let hi = 3.0 * (i + 1) as f64 / n as f64;
            sum += l1_norm(g, lo, hi, tol, NormKind::L1OfSecond).unwrap().value;
        }
        assert!((sum - whole).abs() <= n as f64 * tol + 1e-12);
    }

    #[test]
    fn sup_norm_examples() {
        let est = sup_norm(|t: f64| Ok(t.cos()), 0.0, std::f64::consts::PI, NormKind::SupOfFirst)
            .unwrap();
        assert!((est.value - 1.0).abs() <= 1e-9);
        let est = sup_norm(|t: f64| Ok(t), 0.0, 2.0, NormKind::SupOfFirst).unwrap();
        assert!((est.value - 2.0).abs() <= 1e-9);
        // Interior maximum.
        let est = sup_norm(|t: f64| Ok(t.sin()), 0.0, std::f64::consts::PI, NormKind::SupOfFirst)
            .unwrap();
        assert!((est.value - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(l1_norm(|t| Ok(t), 1.0, 0.0, 1e-9, NormKind::L1OfFirst).is_err());
        assert!(l1_norm(|t| Ok(t), 0.0, 1.0, -1.0, NormKind::L1OfFirst).is_err());
        assert!(sup_norm(|t| Ok(t), 1.0, 0.0, NormKind::SupOfFirst).is_err());
    }
}
