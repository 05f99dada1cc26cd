//! Dense symmetric positive-definite solves.

/// In-place Cholesky factorisation of a row-major `n x n` matrix. On success
/// the lower triangle holds `L` with `A = L L^T`.
pub(crate) fn cholesky(a: &mut [f64], n: usize) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if !(d > 0.0) || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            let (ri, rj) = (i * n, j * n);
            for k in 0..j {
                s -= a[ri + k] * a[rj + k];
            }
            a[i * n + j] = s / d;
        }
    }
    true
}

/// Solves `L L^T x = b` given the factor from [`cholesky`].
pub(crate) fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = b.to_vec();
    for i in 0..n {
        let mut s = y[i];
        for k in 0..i {
            s -= l[i * n + k] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[k * n + i] * y[k];
        }
        y[i] = s / l[i * n + i];
    }
    y
}

/// Factorises `a + jitter * I`, multiplying the jitter by 10 after each
/// failure until `max_jitter` is exceeded. Returns the factor and the jitter
/// that worked.
pub(crate) fn cholesky_with_jitter(a: &[f64], n: usize, jitter: f64, max_jitter: f64) -> Option<(Vec<f64>, f64)> {
    let mut jitter = jitter;
    loop {
        let mut m = a.to_vec();
        for i in 0..n {
            m[i * n + i] += jitter;
        }
        if cholesky(&mut m, n) {
            return Some((m, jitter));
        }
        jitter *= 10.0;
        if jitter > max_jitter * (1.0 + 1e-9) {
            return None;
        }
    }
}
