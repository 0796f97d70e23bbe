//! Small dense helpers shared by the analysis and decoding code.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

/// Determinant of an n×n complex matrix stored row-major; `a` is clobbered.
pub fn det_in_place(a: &mut [C64], n: usize) -> C64 {
    let mut det = C64::new(1.0, 0.0);
    for c in 0..n {
        let mut piv = c;
        let mut best = a[c * n + c].norm_sqr();
        for r in c + 1..n {
            let v = a[r * n + c].norm_sqr();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if piv != c {
            for j in 0..n {
                a.swap(c * n + j, piv * n + j);
            }
            det = -det;
        }
        let d = a[c * n + c];
        det *= d;
        let inv = 1.0 / d;
        for r in c + 1..n {
            let f = a[r * n + c] * inv;
            if f.norm_sqr() == 0.0 {
                continue;
            }
            for j in c + 1..n {
                let v = a[c * n + j];
                a[r * n + j] -= f * v;
            }
        }
    }
    det
}

pub fn det(m: &DMatrix<C64>) -> C64 {
    assert_eq!(m.nrows(), m.ncols(), "det of non-square matrix");
    let n = m.nrows();
    let mut buf: Vec<C64> = (0..n * n).map(|i| m[(i / n, i % n)]).collect();
    det_in_place(&mut buf, n)
}

/// Numerical rank: singular values below `rel_tol` times the largest count as zero.
pub fn rank_c(m: &DMatrix<C64>, rel_tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

pub fn rank_r(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * max).count()
}

/// Thin QR with the diagonal of R made nonnegative. Returns (Q, R) with R square k×k.
pub fn qr_pos(b: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let qr = b.clone().qr();
    let mut q = qr.q();
    let mut r = qr.r();
    for i in 0..r.nrows().min(r.ncols()) {
        if r[(i, i)] < 0.0 {
            r.row_mut(i).neg_mut();
            q.column_mut(i).neg_mut();
        }
    }
    (q, r)
}

pub fn frob2(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, &v| a.max(v.abs()))
}
