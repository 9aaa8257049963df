//! Finite-difference weights, cumulative quadrature and cubic Hermite
//! interpolation on (possibly non-uniform) one-dimensional grids.

/// Number of nodes in every differentiation stencil.
pub const STENCIL_WIDTH: usize = 5;

/// Fornberg's recursion: `w[m][j]` is the weight of `f(x[j])` in the
/// approximation of the `m`-th derivative at `z`, for `m ≤ max_order`.
pub fn fornberg_weights(z: f64, x: &[f64], max_order: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; max_order + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(max_order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// First index of the stencil used at node `i` of an `n`-node grid:
/// centred in the interior, shifted inward at the ends.
pub fn stencil_start(i: usize, n: usize) -> usize {
    let half = STENCIL_WIDTH / 2;
    i.saturating_sub(half).min(n - STENCIL_WIDTH)
}

/// Derivatives of orders `1..=max_order` of sampled data at every node.
///
/// `values` may be any type closed under addition and scaling; the closure
/// `axpy(acc, w, v)` returns `acc + w·v`.
pub fn differentiate<T: Copy>(
    grid: &[f64],
    values: &[T],
    max_order: usize,
    zero: T,
    axpy: impl Fn(T, f64, T) -> T,
) -> Vec<Vec<T>> {
    let n = grid.len();
    let mut out = vec![vec![zero; n]; max_order];
    for i in 0..n {
        let s = stencil_start(i, n);
        let w = fornberg_weights(grid[i], &grid[s..s + STENCIL_WIDTH], max_order);
        for m in 1..=max_order {
            let mut acc = zero;
            for (j, wj) in w[m].iter().enumerate() {
                acc = axpy(acc, *wj, values[s + j]);
            }
            out[m - 1][i] = acc;
        }
    }
    out
}

pub fn differentiate_scalar(grid: &[f64], values: &[f64], order: usize) -> Vec<f64> {
    differentiate(grid, values, order, 0.0, |a, w, v| a + w * v)
        .pop()
        .unwrap_or_default()
}

pub fn is_uniform(grid: &[f64], rel_tol: f64) -> bool {
    if grid.len() < 2 {
        return true;
    }
    let h = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
    grid.windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= rel_tol * h.abs())
}

/// Cumulative integral of sampled `values`, starting at 0.
///
/// Each interval is integrated exactly against the cubic through the four
/// surrounding nodes (two-point Gauss–Legendre on the interpolant), which is
/// fourth-order accurate on uniform and non-uniform grids alike. Grids with
/// fewer than four nodes fall back to the trapezoid rule.
pub fn cumulative_integral(grid: &[f64], values: &[f64]) -> Vec<f64> {
    let n = grid.len();
    let mut out = vec![0.0; n];
    if n < 4 {
        for i in 1..n {
            out[i] = out[i - 1] + 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
        }
        return out;
    }
    let g = 0.5 / 3f64.sqrt();
    for i in 0..n - 1 {
        let s = i.saturating_sub(1).min(n - 4);
        let xs = &grid[s..s + 4];
        let ys = &values[s..s + 4];
        let (a, b) = (grid[i], grid[i + 1]);
        let mid = 0.5 * (a + b);
        let h = b - a;
        let p = |x: f64| lagrange_eval(xs, ys, x);
        out[i + 1] = out[i] + 0.5 * h * (p(mid - g * h) + p(mid + g * h));
    }
    out
}

/// Local cubic interpolation through the four nodes around `x`.
pub fn cubic_interp(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let n = grid.len();
    if n < 4 {
        let i = locate(grid, x);
        let t = (x - grid[i]) / (grid[i + 1] - grid[i]);
        return values[i] * (1.0 - t) + values[i + 1] * t;
    }
    let s = locate(grid, x).saturating_sub(1).min(n - 4);
    lagrange_eval(&grid[s..s + 4], &values[s..s + 4], x)
}

fn lagrange_eval(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let mut sum = 0.0;
    for (j, (&xj, &yj)) in xs.iter().zip(ys).enumerate() {
        let mut l = 1.0;
        for (k, &xk) in xs.iter().enumerate() {
            if k != j {
                l *= (x - xk) / (xj - xk);
            }
        }
        sum += l * yj;
    }
    sum
}

/// Index `i` with `grid[i] ≤ x ≤ grid[i + 1]`, clamped to the grid.
pub fn locate(grid: &[f64], x: f64) -> usize {
    let n = grid.len();
    match grid.binary_search_by(|g| g.total_cmp(&x)) {
        Ok(i) => i.min(n - 2),
        Err(i) => i.saturating_sub(1).min(n - 2),
    }
}

/// Cubic Hermite basis on `[x0, x1]` evaluated at `x`: weights for
/// `(y0, d0, y1, d1)`.
pub fn hermite_weights(x0: f64, x1: f64, x: f64) -> [f64; 4] {
    let h = x1 - x0;
    let t = (x - x0) / h;
    let t2 = t * t;
    let t3 = t2 * t;
    [
        2.0 * t3 - 3.0 * t2 + 1.0,
        (t3 - 2.0 * t2 + t) * h,
        -2.0 * t3 + 3.0 * t2,
        (t3 - t2) * h,
    ]
}

pub fn hermite_scalar(grid: &[f64], y: &[f64], dy: &[f64], x: f64) -> f64 {
    let i = locate(grid, x);
    let w = hermite_weights(grid[i], grid[i + 1], x);
    w[0] * y[i] + w[1] * dy[i] + w[2] * y[i + 1] + w[3] * dy[i + 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_reproduces_classical_central_weights() {
        let x = [-2.0, -1.0, 0.0, 1.0, 2.0];
        let w = fornberg_weights(0.0, &x, 3);
        let d1 = [1.0 / 12.0, -2.0 / 3.0, 0.0, 2.0 / 3.0, -1.0 / 12.0];
        let d2 = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        let d3 = [-0.5, 1.0, 0.0, -1.0, 0.5];
        for j in 0..5 {
            assert!((w[1][j] - d1[j]).abs() < 1e-14);
            assert!((w[2][j] - d2[j]).abs() < 1e-14);
            assert!((w[3][j] - d3[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn exact_on_quartics_nonuniform() {
        let grid: Vec<f64> = (0..12)
            .map(|i| i as f64 * 0.1 + 0.01 * (i as f64).sin())
            .collect();
        let f = |x: f64| 1.0 + 2.0 * x - x * x + 0.5 * x.powi(3) - 0.25 * x.powi(4);
        let df = |x: f64| 2.0 - 2.0 * x + 1.5 * x * x - x.powi(3);
        let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        let d = differentiate_scalar(&grid, &vals, 1);
        for (x, dv) in grid.iter().zip(&d) {
            assert!((dv - df(*x)).abs() < 1e-9);
        }
    }

    #[test]
    fn cumulative_integral_is_exact_for_cubics() {
        let grid: Vec<f64> = (0..9).map(|i| (i as f64 * 0.3).powf(1.2)).collect();
        let vals: Vec<f64> = grid.iter().map(|&x| 3.0 * x * x - x.powi(3)).collect();
        let integ = cumulative_integral(&grid, &vals);
        let anti = |x: f64| x.powi(3) - x.powi(4) / 4.0;
        for (x, v) in grid.iter().zip(&integ) {
            assert!((v - (anti(*x) - anti(grid[0]))).abs() < 1e-12);
        }
    }

    #[test]
    fn hermite_interpolates_cubics_exactly() {
        let grid = [0.0, 0.5, 1.3, 2.0];
        let f = |x: f64| x.powi(3) - 2.0 * x;
        let df = |x: f64| 3.0 * x * x - 2.0;
        let y: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        let dy: Vec<f64> = grid.iter().map(|&x| df(x)).collect();
        for x in [0.1, 0.7, 1.9, 2.0, 0.0] {
            assert!((hermite_scalar(&grid, &y, &dy, x) - f(x)).abs() < 1e-12);
        }
    }
}
