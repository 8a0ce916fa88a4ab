//! Shared numerical kernels: composite trapezoid quadrature, bracketed
//! bisection, and dense eigenvalue/linear-solve routines for the tiny (2x2,
//! 4x4) matrices this crate needs. All routines are deterministic.

use num_complex::Complex64;

/// Composite trapezoid of node values on a uniform grid with spacing `dx`.
pub(crate) fn trapezoid(values: &[f64], dx: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..n - 1].iter().sum();
    dx * (0.5 * values[0] + interior + 0.5 * values[n - 1])
}

/// Cumulative trapezoid: `out[k]` approximates the integral from node 0 to
/// node k. `out[0] = 0`.
pub(crate) fn cumulative_trapezoid(values: &[f64], dx: f64) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for k in 1..values.len() {
        out[k] = out[k - 1] + 0.5 * dx * (values[k - 1] + values[k]);
    }
    out
}

pub(crate) const BISECT_TOL: f64 = 1e-12;
pub(crate) const BISECT_MAX_ITER: usize = 200;

/// Bisection on a bracket `[lo, hi]` with `f(lo)` and `f(hi)` of opposite
/// sign. Interval tolerance 1e-12, at most 200 iterations.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..BISECT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (flo < 0.0) == (fm < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo < BISECT_TOL {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Eigenvalues of a real 2x2 matrix, in closed form, sorted by
/// (real part, imaginary part).
pub(crate) fn eigenvalues_2x2(m: &[[f64; 2]; 2]) -> [Complex64; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = tr * tr - 4.0 * det;
    let mut eigs = if disc >= 0.0 {
        let s = disc.sqrt();
        [
            Complex64::new(0.5 * (tr - s), 0.0),
            Complex64::new(0.5 * (tr + s), 0.0),
        ]
    } else {
        let s = (-disc).sqrt();
        [
            Complex64::new(0.5 * tr, -0.5 * s),
            Complex64::new(0.5 * tr, 0.5 * s),
        ]
    };
    sort_eigs(&mut eigs);
    eigs
}

fn sort_eigs(eigs: &mut [Complex64]) {
    eigs.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

/// Characteristic polynomial of a 4x4 matrix by the Faddeev-LeVerrier
/// recurrence. Returns monic coefficients `[c3, c2, c1, c0]` for
/// `l^4 + c3 l^3 + c2 l^2 + c1 l + c0`.
fn char_poly_4x4(a: &[[f64; 4]; 4]) -> [f64; 4] {
    let mut m = *a;
    let mut coeffs = [0.0; 4];
    let mut c_prev;
    // k = 1
    c_prev = -trace4(&m);
    coeffs[0] = c_prev;
    for k in 2..=4 {
        // M <- A (M + c_prev I)
        let mut shifted = m;
        #[allow(clippy::needless_range_loop)] // diagonal shift
        for i in 0..4 {
            shifted[i][i] += c_prev;
        }
        m = mat_mul4(a, &shifted);
        c_prev = -trace4(&m) / k as f64;
        coeffs[k - 1] = c_prev;
    }
    coeffs
}

fn trace4(m: &[[f64; 4]; 4]) -> f64 {
    m[0][0] + m[1][1] + m[2][2] + m[3][3]
}

fn mat_mul4(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut s = 0.0;
            for (k, bk) in b.iter().enumerate() {
                s += a[i][k] * bk[j];
            }
            out[i][j] = s;
        }
    }
    out
}

/// All four eigenvalues of a real 4x4 matrix: characteristic polynomial via
/// Faddeev-LeVerrier, then Durand-Kerner simultaneous iteration from fixed
/// starting points, sorted by (real part, imaginary part).
pub(crate) fn eigenvalues_4x4(a: &[[f64; 4]; 4]) -> [Complex64; 4] {
    let c = char_poly_4x4(a);
    let p = |z: Complex64| ((z + c[0]) * z + c[1]) * z * z + c[2] * z + c[3];
    // scale-aware convergence threshold
    let scale = 1.0 + c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z = [
        seed,
        seed * seed,
        seed * seed * seed,
        seed * seed * seed * seed,
    ];
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for k in 0..4 {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..4 {
                if j != k {
                    denom *= z[k] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                // coincident iterates: nudge deterministically
                z[k] += Complex64::new(1e-8, 1e-8);
                continue;
            }
            let step = p(z[k]) / denom;
            z[k] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-15 * scale {
            break;
        }
    }
    // real matrices have conjugate-paired spectra: damp rounding noise
    for zk in z.iter_mut() {
        if zk.im.abs() < 1e-12 * (1.0 + zk.re.abs()) {
            zk.im = 0.0;
        }
    }
    sort_eigs(&mut z);
    z
}

/// Solve a 4x4 linear system by Gaussian elimination with partial pivoting.
/// Returns `None` when the matrix is numerically singular.
pub(crate) fn solve_linear_4x4(a: &[[f64; 4]; 4], b: &[f64; 4]) -> Option<[f64; 4]> {
    let mut m = [[0.0; 5]; 4];
    for i in 0..4 {
        m[i][..4].copy_from_slice(&a[i]);
        m[i][4] = b[i];
    }
    for col in 0..4 {
        let mut piv = col;
        for row in col + 1..4 {
            if m[row][col].abs() > m[piv][col].abs() {
                piv = row;
            }
        }
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            #[allow(clippy::needless_range_loop)] // in-place row update
            for k in col..5 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    let mut x = [0.0; 4];
    for i in (0..4).rev() {
        let mut s = m[i][4];
        for k in i + 1..4 {
            s -= m[i][k] * x[k];
        }
        x[i] = s / m[i][i];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}

/// Determinant of a 4x4 matrix by direct cofactor expansion along row 0.
pub(crate) fn det_4x4(m: &[[f64; 4]; 4]) -> f64 {
    let mut det = 0.0;
    for col in 0..4 {
        if m[0][col] == 0.0 {
            continue;
        }
        let minor = det_3x3_minor(m, col);
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        det += sign * m[0][col] * minor;
    }
    det
}

fn det_3x3_minor(m: &[[f64; 4]; 4], skip_col: usize) -> f64 {
    let mut sub = [[0.0; 3]; 3];
    for (si, row) in m[1..4].iter().enumerate() {
        let mut sj = 0;
        for (j, &v) in row.iter().enumerate() {
            if j != skip_col {
                sub[si][sj] = v;
                sj += 1;
            }
        }
    }
    sub[0][0] * (sub[1][1] * sub[2][2] - sub[1][2] * sub[2][1])
        - sub[0][1] * (sub[1][0] * sub[2][2] - sub[1][2] * sub[2][0])
        + sub[0][2] * (sub[1][0] * sub[2][1] - sub[1][1] * sub[2][0])
}
