//! Scalar root finding for monotone functions.

/// Finds `x` in `[lo, hi]` with `g(x) ≈ 0` for a non-decreasing `g` with
/// `g(lo) <= 0 <= g(hi)`. Illinois-modified regula falsi with a bisection
/// fallback when the interpolated point stalls.
pub(crate) fn root_nondecreasing<F>(mut g: F, mut lo: f64, mut hi: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    let mut g_lo = g(lo);
    if g_lo >= 0.0 {
        return lo;
    }
    let mut g_hi = g(hi);
    if g_hi <= 0.0 {
        return hi;
    }
    let mut side = 0i8;
    let mut slow_steps = 0u8;
    for _ in 0..300 {
        let width = hi - lo;
        if width <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1e-300) {
            break;
        }
        let mut x = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
        if slow_steps >= 3 || !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
            slow_steps = 0;
        }
        let gx = g(x);
        if gx == 0.0 {
            return x;
        }
        if gx < 0.0 {
            lo = x;
            g_lo = gx;
            if side == -1 {
                g_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            g_hi = gx;
            if side == 1 {
                g_lo *= 0.5;
            }
            side = 1;
        }
        if hi - lo > 0.5 * width {
            slow_steps += 1;
        } else {
            slow_steps = 0;
        }
    }
    if g_lo.abs() <= g_hi.abs() {
        lo
    } else {
        hi
    }
}
