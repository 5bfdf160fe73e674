use num_complex::Complex64;

use super::matrix::CMatrix;

/// Singular values and right singular vectors from one-sided Jacobi.
#[derive(Debug, Clone)]
pub struct Svd {
    /// Singular values, ascending.
    pub values: Vec<f64>,
    /// Right singular vectors as columns, ordered like `values`.
    pub v: CMatrix,
}

pub fn svd(m: &CMatrix) -> Svd {
    let rows = m.rows();
    let n = m.cols();
    let mut u = m.clone();
    let mut v = CMatrix::identity(n);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = Complex64::new(0.0, 0.0);
                for i in 0..rows {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    alpha += up.norm_sqr();
                    beta += uq.norm_sqr();
                    gamma += up.conj() * uq;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let ph = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                for i in 0..rows {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    u[(i, p)] = up * cs - uq * ph * sn;
                    u[(i, q)] = up * sn + uq * ph * cs;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * cs - vq * ph * sn;
                    v[(i, q)] = vp * sn + vq * ph * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..rows).map(|i| u[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| norms[a].total_cmp(&norms[b]));
    let mut vs = CMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        vs.set_column(new, &v.column(old));
    }
    let values = order.iter().map(|&j| norms[j]).collect();
    Svd { values, v: vs }
}

pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    svd(m).values
}

pub fn min_singular(m: &CMatrix) -> f64 {
    svd(m).values[0]
}

pub fn max_singular(m: &CMatrix) -> f64 {
    *svd(m).values.last().unwrap()
}

/// Spectral norm.
pub fn norm2(m: &CMatrix) -> f64 {
    max_singular(m)
}

/// Right singular vector of the smallest singular value.
pub fn null_vector(m: &CMatrix) -> (f64, Vec<Complex64>) {
    let s = svd(m);
    (s.values[0], s.v.column(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::c;

    #[test]
    fn identity_has_unit_singular_values() {
        assert!((min_singular(&CMatrix::identity(3)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diag_with_zero() {
        assert_eq!(min_singular(&CMatrix::diag(&[c(5., 0.), c(0., 0.)])), 0.0);
        assert!((max_singular(&CMatrix::diag(&[c(5., 0.), c(0., 0.)])) - 5.0).abs() < 1e-15);
    }

    #[test]
    fn rank_one() {
        let m = CMatrix::from_real_rows(&[&[1., 1.], &[1., 1.]]).unwrap();
        assert!(min_singular(&m) < 1e-12);
        let (s, v) = null_vector(&m);
        assert!(s < 1e-12);
        let r = m.mul_vec(&v);
        assert!(r.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn complex_matrix_singular_values() {
        // [[1, i], [0, 1]] has singular values (√5 ± 1)/2
        let m = CMatrix::from_rows(&[vec![c(1., 0.), c(0., 1.)], vec![c(0., 0.), c(1., 0.)]]).unwrap();
        let s = singular_values(&m);
        let r5 = 5f64.sqrt();
        assert!((s[0] - (r5 - 1.0) / 2.0).abs() < 1e-14);
        assert!((s[1] - (r5 + 1.0) / 2.0).abs() < 1e-14);
    }

    #[test]
    fn rectangular_tall() {
        let m = CMatrix::from_real_rows(&[&[3., 0.], &[0., 4.], &[0., 0.]]).unwrap();
        let s = singular_values(&m);
        assert!((s[0] - 3.0).abs() < 1e-15 && (s[1] - 4.0).abs() < 1e-15);
    }
}
