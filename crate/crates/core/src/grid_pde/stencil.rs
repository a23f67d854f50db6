//! Finite-difference weights on arbitrary nodes.

/// Fornberg's recursion: weights `w[k][j]` such that
/// `f^(k)(x0) ≈ Σ_j w[k][j] f(xs[j])` for `k = 0..=order`.
pub fn fornberg_weights(x0: f64, xs: &[f64], order: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; order + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
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

/// Three-point central weights `(left, centre, right)` for the first and
/// second derivative at an interior node with neighbour gaps `hl`, `hr`.
#[inline]
pub fn central_weights(hl: f64, hr: f64) -> ([f64; 3], [f64; 3]) {
    let d1 = [
        -hr / (hl * (hl + hr)),
        (hr - hl) / (hl * hr),
        hl / (hr * (hl + hr)),
    ];
    let d2 = [
        2.0 / (hl * (hl + hr)),
        -2.0 / (hl * hr),
        2.0 / (hr * (hl + hr)),
    ];
    (d1, d2)
}

/// First and second derivatives at every node of `xs`: three-point central
/// stencils inside, second-order one-sided stencils at both ends (three
/// points for the first derivative, four for the second).
///
/// Needs at least 4 nodes so the end stencils exist.
pub fn derivatives(xs: &[f64], ys: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = xs.len();
    debug_assert!(n >= 4 && ys.len() == n);
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in 1..n - 1 {
        let (w1, w2) = central_weights(xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
        d1[i] = w1[0] * ys[i - 1] + w1[1] * ys[i] + w1[2] * ys[i + 1];
        d2[i] = w2[0] * ys[i - 1] + w2[1] * ys[i] + w2[2] * ys[i + 1];
    }
    let ends = first_derivative_ends(xs, ys);
    d1[0] = ends.0;
    d1[n - 1] = ends.1;
    for (node, range) in [(0, 0..4), (n - 1, n - 4..n)] {
        let w = fornberg_weights(xs[node], &xs[range.clone()], 2);
        d2[node] = w[2].iter().zip(&ys[range]).map(|(a, b)| a * b).sum();
    }
    (d1, d2)
}

/// First derivative only (needs at least 3 nodes).
pub fn first_derivative(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let n = xs.len();
    debug_assert!(n >= 3 && ys.len() == n);
    let mut d1 = vec![0.0; n];
    for i in 1..n - 1 {
        let (w1, _) = central_weights(xs[i] - xs[i - 1], xs[i + 1] - xs[i]);
        d1[i] = w1[0] * ys[i - 1] + w1[1] * ys[i] + w1[2] * ys[i + 1];
    }
    let ends = first_derivative_ends(xs, ys);
    d1[0] = ends.0;
    d1[n - 1] = ends.1;
    d1
}

fn first_derivative_ends(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let w = fornberg_weights(xs[0], &xs[..3], 1);
    let left = w[1].iter().zip(&ys[..3]).map(|(a, b)| a * b).sum();
    let w = fornberg_weights(xs[n - 1], &xs[n - 3..], 1);
    let right = w[1].iter().zip(&ys[n - 3..]).map(|(a, b)| a * b).sum();
    (left, right)
}

/// Trapezoid rule over the nodes.
pub fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
    xs.windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

/// Trapezoid weights (the `i`-th weight multiplies `f(xs[i])`).
pub fn trapezoid_weights(xs: &[f64]) -> Vec<f64> {
    let n = xs.len();
    let mut w = vec![0.0; n];
    for i in 0..n - 1 {
        let h = 0.5 * (xs[i + 1] - xs[i]);
        w[i] += h;
        w[i + 1] += h;
    }
    w
}
