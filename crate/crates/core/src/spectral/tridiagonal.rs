//! Householder reduction to tridiagonal form followed by implicit QL with Wilkinson shifts.
//!
//! Eigenvalues only. The reduction keeps both triangles of the trailing block up to date so
//! every inner loop walks a contiguous row.

/// Reduces the `n × n` symmetric matrix `a` in place and returns `(diagonal, subdiagonal)`,
/// where `subdiagonal[i]` couples rows `i - 1` and `i` (`subdiagonal[0]` is zero).
pub(crate) fn reduce(a: &mut [f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut diag = vec![0.0; n];
    let mut sub = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];

    for k in (1..n).rev() {
        // The active block is rows/cols 0..k; row k's entries left of the diagonal are
        // folded onto column k-1.
        let len = k;
        let x = &a[k * n..k * n + len];
        let scale: f64 = x.iter().map(|v| v.abs()).sum();
        diag[k] = a[k * n + k];
        if len == 1 || scale == 0.0 || x[..len - 1].iter().all(|&v| v == 0.0) {
            sub[k] = a[k * n + k - 1];
            continue;
        }

        for (vi, &xi) in v[..len].iter_mut().zip(x) {
            *vi = xi / scale;
        }
        let h: f64 = v[..len].iter().map(|x| x * x).sum();
        let last = v[len - 1];
        let alpha = if last >= 0.0 { -h.sqrt() } else { h.sqrt() };
        sub[k] = scale * alpha;
        v[len - 1] = last - alpha;
        // vᵀv = h - 2·alpha·last + alpha² = 2(h - alpha·last)
        let beta = 1.0 / (h - alpha * last);

        // p = β·B·v, K = β·(vᵀp)/2, w = p - K·v
        let mut vp = 0.0;
        for i in 0..len {
            let row = &a[i * n..i * n + len];
            let p: f64 = row.iter().zip(&v[..len]).map(|(b, vj)| b * vj).sum::<f64>() * beta;
            w[i] = p;
            vp += v[i] * p;
        }
        let kk = 0.5 * beta * vp;
        for i in 0..len {
            w[i] -= kk * v[i];
        }
        // B ← B - v·wᵀ - w·vᵀ
        for i in 0..len {
            let (vi, wi) = (v[i], w[i]);
            let row = &mut a[i * n..i * n + len];
            for ((b, &vj), &wj) in row.iter_mut().zip(&v[..len]).zip(&w[..len]) {
                *b -= vi * wj + wi * vj;
            }
        }
    }
    if n > 0 {
        diag[0] = a[0];
    }
    (diag, sub)
}

/// Implicit QL on a symmetric tridiagonal matrix. Overwrites `diag` with the eigenvalues.
///
/// Returns `(converged, iterations)`; gives up when one eigenvalue needs more than
/// `max_iter` iterations.
pub(crate) fn ql_implicit(diag: &mut [f64], sub: &mut [f64], max_iter: usize) -> (bool, usize) {
    let n = diag.len();
    if n == 0 {
        return (true, 0);
    }
    for i in 1..n {
        sub[i - 1] = sub[i];
    }
    sub[n - 1] = 0.0;

    let mut total = 0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if sub[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter == max_iter {
                return (false, total);
            }
            iter += 1;
            total += 1;

            let mut g = (diag[l + 1] - diag[l]) / (2.0 * sub[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + sub[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * sub[i];
                let b = c * sub[i];
                r = f.hypot(g);
                sub[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    sub[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            sub[l] = g;
            sub[m] = 0.0;
        }
    }
    (true, total)
}
