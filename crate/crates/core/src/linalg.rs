//! Small dense complex linear algebra.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

/// Singular values of a row-major `rows × cols` complex matrix, descending.
///
/// One-sided (Hestenes) Jacobi on the columns of `A` or `Aᴴ`, whichever has
/// fewer columns. Accurate to a few ulps relative to the largest singular
/// value, which is what the rank checks need.
pub fn singular_values(data: &[Complex64], rows: usize, cols: usize) -> Vec<f64> {
    assert_eq!(data.len(), rows * cols);
    // Column-major copy of the matrix whose column count is min(rows, cols).
    let (n_cols, n_rows, mut cols_buf) = if cols <= rows {
        let mut buf = vec![Complex64::new(0.0, 0.0); rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                buf[j * rows + i] = data[i * cols + j];
            }
        }
        (cols, rows, buf)
    } else {
        // columns of Aᴴ are conjugated rows of A
        let buf = data.iter().map(|v| v.conj()).collect();
        (rows, cols, buf)
    };

    let eps = f64::EPSILON;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n_cols {
            for q in (p + 1)..n_cols {
                let (alpha, beta, gamma) = {
                    let cp = &cols_buf[p * n_rows..(p + 1) * n_rows];
                    let cq = &cols_buf[q * n_rows..(q + 1) * n_rows];
                    let mut a = 0.0;
                    let mut b = 0.0;
                    let mut g = Complex64::new(0.0, 0.0);
                    for (x, y) in cp.iter().zip(cq) {
                        a += x.norm_sqr();
                        b += y.norm_sqr();
                        g += x.conj() * y;
                    }
                    (a, b, g)
                };
                let g_abs = gamma.norm();
                if g_abs == 0.0 || g_abs <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotate (a_p, e^{-i arg γ} a_q), which has a real inner product.
                let phase = gamma.conj() / g_abs;
                let zeta = (beta - alpha) / (2.0 * g_abs);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..n_rows {
                    let x = cols_buf[p * n_rows + i];
                    let y = cols_buf[q * n_rows + i] * phase;
                    cols_buf[p * n_rows + i] = x * c - y * s;
                    cols_buf[q * n_rows + i] = x * s + y * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = (0..n_cols)
        .map(|j| {
            cols_buf[j * n_rows..(j + 1) * n_rows]
                .iter()
                .map(|v| v.norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}
