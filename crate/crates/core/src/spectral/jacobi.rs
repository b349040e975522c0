//! Cyclic Jacobi rotations for dense symmetric matrices (eigenvalues only).

/// Runs cyclic sweeps over the upper triangle of the `n × n` row-major symmetric matrix `a`
/// until the off-diagonal Frobenius norm drops below `tol · ‖a‖_F` or `max_sweeps` is spent.
///
/// On return the diagonal of `a` holds the eigenvalue estimates. Returns
/// `(converged, sweeps_used)`.
pub(crate) fn diagonalize(a: &mut [f64], n: usize, tol: f64, max_sweeps: usize) -> (bool, usize) {
    let total: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let threshold = tol * total;

    let mut sweeps = 0;
    loop {
        if off_diagonal_norm(a, n) <= threshold {
            return (true, sweeps);
        }
        if sweeps == max_sweeps {
            return (false, sweeps);
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(a, n, p, q);
            }
        }
    }
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[i * n + j] * a[i * n + j];
            }
        }
    }
    sum.sqrt()
}

/// Annihilates `a[p][q]` with one plane rotation.
fn rotate(a: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;
    let tau = s / (1.0 + c);

    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let g = a[r * n + p];
        let h = a[r * n + q];
        let rp = g - s * (h + g * tau);
        let rq = h + s * (g - h * tau);
        a[r * n + p] = rp;
        a[p * n + r] = rp;
        a[r * n + q] = rq;
        a[q * n + r] = rq;
    }
}
