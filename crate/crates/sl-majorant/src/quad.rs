//! Small quadrature toolbox: composite Simpson on stored samples and an
//! adaptive Simpson rule with Richardson correction for function handles.

/// Composite Simpson over uniformly spaced samples. `values.len()` must be
/// odd (an even number of intervals); `h` is the spacing.
pub fn composite_simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    debug_assert!(n >= 3 && n % 2 == 1, "need an even number of intervals");
    let mut sum = values[0] + values[n - 1];
    let mut four = 0.0;
    let mut two = 0.0;
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            four += v;
        } else {
            two += v;
        }
    }
    sum += 4.0 * four + 2.0 * two;
    sum * h / 3.0
}

/// Trapezoid over uniformly spaced samples.
pub fn composite_trapezoid(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    debug_assert!(n >= 2);
    let inner: f64 = values[1..n - 1].iter().sum();
    h * (0.5 * (values[0] + values[n - 1]) + inner)
}

/// Adaptive Simpson with the standard Richardson termination test and
/// one-level error correction. Tolerances combine as
/// |err| ⩽ abs_tol + rel_tol·|integral|.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // First coarse estimate sets the scale for the relative test.
    let scale = whole.abs().max(1e-300);
    let tol = (abs_tol + rel_tol * scale).max(1e-300);
    simpson_recurse(&f, a, b, fa, fm, fb, whole, tol, 52)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F: Fn(f64) -> f64>(
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
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn simpson_exact_on_cubics() {
        let xs: Vec<f64> = (0..=8).map(|i| i as f64 / 8.0).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| 3.0 * x * x * x - x + 2.0).collect();
        let exact = 3.0 / 4.0 - 0.5 + 2.0;
        assert!((composite_simpson(&vals, 1.0 / 8.0) - exact).abs() < 1e-15);
    }

    #[test]
    fn adaptive_simpson_smooth() {
        let v = adaptive_simpson(|x| (x).sin(), 0.0, PI, 1e-12, 1e-14);
        assert!((v - 2.0).abs() < 1e-11);
    }

    #[test]
    fn adaptive_simpson_endpoint_power() {
        // ∫₀¹ x^{0.6} dx = 1/1.6; the integrand has unbounded slope at 0.
        let v = adaptive_simpson(|x| x.powf(0.6), 0.0, 1.0, 1e-11, 1e-13);
        assert!((v - 1.0 / 1.6).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn trapezoid_linear_exact() {
        let vals = [1.0, 2.0, 3.0, 4.0];
        assert!((composite_trapezoid(&vals, 0.5) - 3.75).abs() < 1e-15);
    }
}
