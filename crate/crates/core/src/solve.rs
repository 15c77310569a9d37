//! Safeguarded bracketing root finder used by the characteristic-equation
//! solvers.
//!
//! The callers isolate each root between a pole of the characteristic
//! function and a wall (the next pole or a domain boundary), expand a
//! geometric bracket until the sign changes, then refine with bisection
//! safeguarded Newton steps until the iterate stalls at machine precision.

pub(crate) struct Solved {
    pub root: f64,
    pub residual: f64,
}

pub(crate) const MAX_EXPAND: usize = 200;
pub(crate) const MAX_REFINE: usize = 200;

/// Expand a bracket geometrically from `start` (where `f(start)` has the
/// sign of `f_start_sign`) in the direction of `wall`, until the sign of
/// `f` flips. Returns `(lo, hi)` ordered so that `f(lo)` and `f(hi)` have
/// opposite signs, or `None` if the wall is reached first.
pub(crate) fn expand_bracket(
    f: &dyn Fn(f64) -> f64,
    start: f64,
    wall: f64,
    mut step: f64,
) -> Option<(f64, f64)> {
    debug_assert!(step != 0.0);
    let f_start = f(start);
    if f_start == 0.0 {
        return Some((start, start));
    }
    let mut prev = start;
    for _ in 0..MAX_EXPAND {
        let mut next = prev + step;
        let overshoot = if step > 0.0 { next >= wall } else { next <= wall };
        if overshoot {
            // Approach the wall without crossing it.
            next = prev + 0.5 * (wall - prev);
            if next == prev {
                return None;
            }
        }
        let f_next = f(next);
        if f_next == 0.0 {
            return Some((next, next));
        }
        if !f_next.is_finite() {
            // Walked into a pole; no usable sign change on this side.
            return None;
        }
        if f_next.signum() != f_start.signum() {
            return if prev <= next { Some((prev, next)) } else { Some((next, prev)) };
        }
        prev = next;
        if !overshoot {
            step *= 2.0;
        }
    }
    None
}

/// Refine a sign-change bracket with Newton steps safeguarded by bisection.
///
/// `df` is the analytic derivative. Terminates when the step stalls below a
/// few ulps of the iterate or the function evaluates to exactly zero.
pub(crate) fn refine(
    f: &dyn Fn(f64) -> f64,
    df: &dyn Fn(f64) -> f64,
    bracket: (f64, f64),
) -> Solved {
    let (mut lo, mut hi) = bracket;
    if lo == hi {
        return Solved { root: lo, residual: f(lo).abs() };
    }
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return Solved { root: lo, residual: 0.0 };
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_REFINE {
        let fx = f(x);
        if fx == 0.0 {
            return Solved { root: x, residual: 0.0 };
        }
        // Maintain the sign-change bracket.
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
        }
        let d = df(x);
        let mut next = if d != 0.0 { x - fx / d } else { x };
        let (bl, bh) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        if !(next > bl && next < bh) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if next == x || (next - x).abs() <= 2.0 * f64::EPSILON * x.abs() {
            let r = f(next).abs();
            return Solved { root: next, residual: r };
        }
        x = next;
    }
    Solved { root: x, residual: f(x).abs() }
}
