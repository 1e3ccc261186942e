//! Small scalar root finding helpers.

/// Bisection on a sign change of `f` over `[a, b]`, down to adjacent doubles or `tol`.
pub fn bisect(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Option<f64> {
    let (mut lo, mut hi) = (a, b);
    let mut flo = f(lo);
    let fhi = f(hi);
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
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) || (hi - lo).abs() <= tol {
            break;
        }
        let fm = f(mid);
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
    Some(0.5 * (lo + hi))
}

/// Newton polish with a central-difference derivative; keeps the input if a
/// step does not reduce |f|.
pub fn newton_polish(mut f: impl FnMut(f64) -> f64, x0: f64, steps: usize) -> f64 {
    let mut x = x0;
    let mut fx = f(x);
    for _ in 0..steps {
        let h = 1e-7 * x.abs().max(1.0);
        let d = (f(x + h) - f(x - h)) / (2.0 * h);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let y = x - fx / d;
        let fy = f(y);
        if fy.abs() >= fx.abs() {
            break;
        }
        x = y;
        fx = fy;
    }
    x
}

/// Newton for a square 2x2 system with a central-difference Jacobian. Returns
/// the iterate once the residual norm drops below `tol`.
pub fn newton2(
    f: impl Fn([f64; 2]) -> [f64; 2],
    x0: [f64; 2],
    tol: f64,
    max_iter: usize,
) -> Option<[f64; 2]> {
    let mut x = x0;
    for _ in 0..max_iter {
        let fx = f(x);
        if fx[0].hypot(fx[1]) < tol {
            return Some(x);
        }
        let mut j = [[0.0; 2]; 2];
        for col in 0..2 {
            let h = 1e-7 * x[col].abs().max(1.0);
            let mut a = x;
            let mut c = x;
            a[col] += h;
            c[col] -= h;
            let (fa, fc) = (f(a), f(c));
            for row in 0..2 {
                j[row][col] = (fa[row] - fc[row]) / (2.0 * h);
            }
        }
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        x[0] -= (j[1][1] * fx[0] - j[0][1] * fx[1]) / det;
        x[1] -= (-j[1][0] * fx[0] + j[0][0] * fx[1]) / det;
    }
    let fx = f(x);
    (fx[0].hypot(fx[1]) < tol).then_some(x)
}
