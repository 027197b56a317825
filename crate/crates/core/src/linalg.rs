//! Perron pairs of small nonnegative matrices.

/// Result of a Perron computation on an irreducible nonnegative matrix.
#[derive(Clone, Debug)]
pub struct PerronPair {
    pub eigenvalue: f64,
    /// Right eigenvector normalized to unit maximum.
    pub vector: Vec<f64>,
}

const MAX_ITERS: usize = 200_000;

/// Power iteration on `I + M` with Collatz-Wielandt stopping.
///
/// `M` must be irreducible; the shift by the identity makes it primitive so the
/// iteration converges even for periodic graphs. Stops once the relative gap
/// between the Collatz-Wielandt bounds falls below `tol`.
pub fn perron(m: &[Vec<f64>], tol: f64) -> PerronPair {
    let n = m.len();
    assert!(n > 0, "empty matrix");
    let mut v = vec![1.0f64; n];
    let mut next = vec![0.0f64; n];
    let mut best = (0.0f64, f64::INFINITY);
    for _ in 0..MAX_ITERS {
        for (i, row) in m.iter().enumerate() {
            let mut s = v[i];
            for (j, &a) in row.iter().enumerate() {
                if a != 0.0 {
                    s += a * v[j];
                }
            }
            next[i] = s;
        }
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..n {
            let r = next[i] / v[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let scale = next.iter().cloned().fold(0.0f64, f64::max);
        for i in 0..n {
            v[i] = next[i] / scale;
        }
        best = (lo, hi);
        if hi - lo <= tol * hi {
            break;
        }
    }
    let rho = 0.5 * (best.0 + best.1) - 1.0;
    PerronPair { eigenvalue: rho.max(0.0), vector: v }
}

pub fn transpose(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    (0..n).map(|j| (0..n).map(|i| m[i][j]).collect()).collect()
}

/// Solves `x P = x`, `sum x = 1` for a row-stochastic `P` by power iteration
/// on the lazy chain `(I + P) / 2` started from the uniform vector.
pub fn stationary(p: &[Vec<f64>], tol: f64) -> Vec<f64> {
    let n = p.len();
    let mut x = vec![1.0 / n as f64; n];
    let mut next = vec![0.0; n];
    for _ in 0..MAX_ITERS {
        for v in next.iter_mut() {
            *v = 0.0;
        }
        for i in 0..n {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            next[i] += 0.5 * xi;
            for j in 0..n {
                next[j] += 0.5 * xi * p[i][j];
            }
        }
        let s: f64 = next.iter().sum();
        let mut diff = 0.0f64;
        for i in 0..n {
            let v = next[i] / s;
            diff = diff.max((v - x[i]).abs());
            x[i] = v;
        }
        if diff < tol {
            break;
        }
    }
    x
}
