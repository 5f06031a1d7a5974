//! Small one- and two-dimensional numerical routines used by the solvers.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximises a unimodal `f` on `[lo, hi]` by golden-section search.
///
/// Returns the arg-max; the bracket is shrunk until it is narrower than `tol`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    // the endpoints of the original bracket are never probed by the search
    let mut best = (mid, f(mid));
    for x in [lo, hi] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best.0
}

/// Maximises a unimodal `f` on `[lo, hi]` by bisecting on the sign of a symmetric difference.
///
/// Unlike golden section, which stalls once function differences drown in rounding (about
/// √ε relative), the difference quotient of a smooth peak keeps its sign down to ~ε/h.
pub fn slope_bisection_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    const H: f64 = 1e-6;
    let slope = |x: f64| f(x + H) - f(x - H);
    let (mut a, mut b) = (lo, hi);
    if slope(a) <= 0.0 {
        return a;
    }
    if slope(b) >= 0.0 {
        return b;
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        let s = slope(m);
        if s == 0.0 {
            return m;
        }
        if s > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Exhaustive arg-max of `f` over `lo, lo + step, ...` up to `hi`.
///
/// Ties go to the smallest grid point.
pub fn grid_argmax<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, step: f64) -> f64 {
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut best_x = lo;
    let mut best_f = f64::NEG_INFINITY;
    for k in 0..=n {
        let x = lo + k as f64 * step;
        let fx = f(x);
        if fx > best_f {
            best_f = fx;
            best_x = x;
        }
    }
    best_x
}

/// Root of `f` on `[lo, hi]` by bisection. The endpoints must bracket a sign change.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() || !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Numeric(format!(
            "bisection bracket [{lo}, {hi}] has no sign change ({fa}, {fb})"
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= tol {
            return Ok(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Bisection on a predicate: `pred(lo)` is false, `pred(hi)` is true; returns the
/// switch point to within `tol`.
pub fn bisect_switch<F: FnMut(f64) -> Result<bool>>(
    mut pred: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if pred(m)? {
            b = m;
        } else {
            a = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Five-point central difference (see `r5` rule); `h` is the outer step.
pub fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let r3 = 0.5 * (f(x + h) - f(x - h));
    let r5 = (4.0 / 3.0) * (f(x + h / 2.0) - f(x - h / 2.0)) - r3 / 3.0;
    r5 / h
}

/// Nelder–Mead simplex minimiser in two dimensions.
///
/// Returns the best vertex and its value. Used only to polish already-good starting points,
/// so a fixed iteration budget is enough.
pub fn nelder_mead_2d<F: Fn([f64; 2]) -> f64>(
    f: F,
    start: [f64; 2],
    scale: [f64; 2],
    f_tol: f64,
    max_iters: usize,
) -> ([f64; 2], f64) {
    let mut simplex = [
        start,
        [start[0] + scale[0], start[1]],
        [start[0], start[1] + scale[1]],
    ];
    let mut values = simplex.map(&f);
    for _ in 0..max_iters {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = idx.map(|i| simplex[i]);
        values = idx.map(|i| values[i]);
        if (values[2] - values[0]).abs() <= f_tol {
            break;
        }
        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let along = |t: f64| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };
        let xr = along(-1.0);
        let fr = f(xr);
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(xe);
            if fe < fr {
                simplex[2] = xe;
                values[2] = fe;
            } else {
                simplex[2] = xr;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = xr;
            values[2] = fr;
        } else {
            let xc = if fr < values[2] { along(-0.5) } else { along(0.5) };
            let fc = f(xc);
            if fc < values[2].min(fr) {
                simplex[2] = xc;
                values[2] = fc;
            } else {
                for k in 1..3 {
                    simplex[k] = [
                        0.5 * (simplex[0][0] + simplex[k][0]),
                        0.5 * (simplex[0][1] + simplex[k][1]),
                    ];
                    values[k] = f(simplex[k]);
                }
            }
        }
    }
    let best = (0..3)
        .min_by(|&i, &j| values[i].total_cmp(&values[j]))
        .unwrap_or(0);
    (simplex[best], values[best])
}
