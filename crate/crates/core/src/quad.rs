//! Adaptive Simpson quadrature.
//!
//! Integrands in this crate are piecewise smooth: spectral densities with
//! compact support have jumps at their band edges and the aliasing sums move
//! those jumps around inside the folding interval. Callers pass the known
//! discontinuities as breakpoints so every panel sees a smooth function.

/// Panels each breakpoint segment is split into before adaptation starts.
/// Keeps narrow peaks from slipping between the first five Simpson nodes.
const INITIAL_PANELS: usize = 16;

const MAX_DEPTH: u32 = 48;

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    integrate_with_breaks(f, a, b, &[], tol)
}

/// Integrate `f` over `[a, b]`, splitting at every breakpoint strictly inside
/// the interval. The tolerance budget is shared in proportion to length.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, breaks: &[f64], tol: f64) -> f64 {
    if b == a {
        return 0.0;
    }
    if b < a {
        return -integrate_with_breaks(f, b, a, breaks, tol);
    }
    let mut nodes: Vec<f64> = Vec::with_capacity(breaks.len() + 2);
    nodes.push(a);
    nodes.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    nodes.push(b);
    nodes.sort_by(|x, y| x.total_cmp(y));
    nodes.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (x.abs() + y.abs()));

    let width = b - a;
    let mut total = 0.0;
    for seg in nodes.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        if hi <= lo {
            continue;
        }
        let seg_tol = tol * (hi - lo) / width;
        let h = (hi - lo) / INITIAL_PANELS as f64;
        for i in 0..INITIAL_PANELS {
            let x0 = lo + h * i as f64;
            let x1 = if i + 1 == INITIAL_PANELS { hi } else { x0 + h };
            total += simpson_panel(f, x0, x1, seg_tol / INITIAL_PANELS as f64);
        }
    }
    total
}

fn simpson_panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(&|x: f64| 3.0 * x * x - x + 2.0, -1.0, 2.0, 1e-12);
        // x^3 - x^2/2 + 2x on [-1, 2] = (8 - 2 + 4) - (-1 - 0.5 - 2) = 13.5
        assert!((v - 13.5).abs() < 1e-12);
    }

    #[test]
    fn gaussian_matches_erf_value() {
        let s = 0.3;
        let g = |x: f64| (-x * x / (2.0 * s * s)).exp() / (2.0 * std::f64::consts::PI * s * s).sqrt();
        let v = integrate(&g, -10.0 * s, 10.0 * s, 1e-13);
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn step_function_with_breaks() {
        let step = |x: f64| if x.abs() <= 0.37 { 1.0 } else { 0.0 };
        let v = integrate_with_breaks(&step, -1.0, 1.0, &[-0.37, 0.37], 1e-12);
        assert!((v - 0.74).abs() < 1e-12);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let v = integrate(&|x: f64| x, 1.0, 0.0, 1e-12);
        assert!((v + 0.5).abs() < 1e-14);
    }
}
