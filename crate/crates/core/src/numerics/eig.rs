use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{BecError, Result};

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the matching eigenvectors.
    pub vectors: CMatrix,
}

#[derive(Debug, Clone)]
pub struct EigPair {
    pub value: Complex64,
    pub vector: Vec<Complex64>,
}

/// Cyclic Jacobi diagonalisation of a Hermitian matrix.
pub fn herm_eig(m: &CMatrix) -> Result<HermEig> {
    if !m.is_square() {
        return Err(BecError::ContractViolation("herm_eig: matrix is not square".into()));
    }
    if !m.is_hermitian() {
        return Err(BecError::ContractViolation(format!(
            "herm_eig: matrix is not Hermitian (defect {:.3e})",
            m.hermitian_defect()
        )));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = CMatrix::identity(n);
    let scale = a.norm_fro().max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-300 || r <= 1e-18 * scale {
                    continue;
                }
                let phase = apq / r;
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                let ph = phase.conj();
                // columns: p' = c p − s e^{−iφ} q, q' = s p + c e^{−iφ} q
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * cs - aiq * ph * sn;
                    a[(i, q)] = aip * sn + aiq * ph * cs;
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * cs - viq * ph * sn;
                    v[(i, q)] = vip * sn + viq * ph * cs;
                }
                // rows: p' = c p − s e^{iφ} q, q' = s p + c e^{iφ} q
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * cs - aqj * phase * sn;
                    a[(q, j)] = apj * sn + aqj * phase * cs;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (newj, &oldj) in order.iter().enumerate() {
        vectors.set_column(newj, &v.column(oldj));
    }
    Ok(HermEig { values, vectors })
}

/// Givens rotation `[[c, s], [−s̄, c]]` mapping `(x, y)` to `(r, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let ax = x.norm();
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let norm = ax.hypot(ay);
    (ax / norm, (x / ax) * y.conj() / norm)
}

fn hessenberg(a: &mut CMatrix, z: &mut CMatrix) {
    let n = a.rows();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let alpha_abs = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if alpha_abs == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let mut u = x.clone();
        u[0] += phase * alpha_abs;
        let unorm2: f64 = u.iter().map(|v| v.norm_sqr()).sum();
        if unorm2 == 0.0 {
            continue;
        }
        // H = I − 2 u u†/‖u‖², applied as a ← H a H, z ← z H
        for j in 0..n {
            let s: Complex64 = (0..u.len()).map(|t| u[t].conj() * a[(k + 1 + t, j)]).sum();
            let f = s * (2.0 / unorm2);
            for t in 0..u.len() {
                a[(k + 1 + t, j)] -= u[t] * f;
            }
        }
        for i in 0..n {
            let s: Complex64 = (0..u.len()).map(|t| a[(i, k + 1 + t)] * u[t]).sum();
            let f = s * (2.0 / unorm2);
            for t in 0..u.len() {
                a[(i, k + 1 + t)] -= f * u[t].conj();
            }
            let s: Complex64 = (0..u.len()).map(|t| z[(i, k + 1 + t)] * u[t]).sum();
            let f = s * (2.0 / unorm2);
            for t in 0..u.len() {
                z[(i, k + 1 + t)] -= f * u[t].conj();
            }
        }
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Complex Schur form `M = Z T Z†` by Hessenberg reduction and single-shift QR.
pub fn schur(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    schur_impl(m, true)
}

fn schur_impl(m: &CMatrix, accumulate: bool) -> Result<(CMatrix, CMatrix)> {
    if !m.is_square() {
        return Err(BecError::ContractViolation("schur: matrix is not square".into()));
    }
    let n = m.rows();
    let mut h = m.clone();
    let mut z = CMatrix::identity(n);
    hessenberg(&mut h, &mut z);
    let eps = f64::EPSILON;
    let budget = 100 * n.max(1);
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == 0.0 { h.norm_inf() } else { s };
            if h[(lo, lo - 1)].norm() <= eps * s {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            its = 0;
            continue;
        }
        total += 1;
        its += 1;
        if total > budget {
            return Err(BecError::NumericalFailure(format!(
                "complex_eig: QR iteration did not converge within {budget} sweeps for {m:?}"
            )));
        }
        let a = h[(hi - 1, hi - 1)];
        let b = h[(hi - 1, hi)];
        let cc = h[(hi, hi - 1)];
        let d = h[(hi, hi)];
        let mu = if its % 11 == 10 {
            d + Complex64::new(0.75 * cc.norm(), 0.25 * cc.norm())
        } else {
            let half = (a - d) * 0.5;
            let disc = (half * half + b * cc).sqrt();
            let m1 = (a + d) * 0.5 + disc;
            let m2 = (a + d) * 0.5 - disc;
            if (m1 - d).norm() < (m2 - d).norm() {
                m1
            } else {
                m2
            }
        };
        let mut x = h[(lo, lo)] - mu;
        let mut y = h[(lo + 1, lo)];
        for k in lo..hi {
            let (cs, sn) = givens(x, y);
            let c = Complex64::new(cs, 0.0);
            let jstart = if k > lo { k - 1 } else { lo };
            for j in jstart..n {
                let t1 = h[(k, j)];
                let t2 = h[(k + 1, j)];
                h[(k, j)] = c * t1 + sn * t2;
                h[(k + 1, j)] = -sn.conj() * t1 + c * t2;
            }
            let iend = (k + 2).min(hi);
            for i in 0..=iend {
                let t1 = h[(i, k)];
                let t2 = h[(i, k + 1)];
                h[(i, k)] = c * t1 + sn.conj() * t2;
                h[(i, k + 1)] = -sn * t1 + c * t2;
            }
            if accumulate {
                for i in 0..n {
                    let t1 = z[(i, k)];
                    let t2 = z[(i, k + 1)];
                    z[(i, k)] = c * t1 + sn.conj() * t2;
                    z[(i, k + 1)] = -sn * t1 + c * t2;
                }
            }
            if k > lo {
                h[(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
            }
            if k + 1 < hi {
                x = h[(k + 1, k)];
                y = h[(k + 2, k)];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok((h, z))
}

/// Eigenpairs of a general square complex matrix, with unit-norm vectors.
pub fn complex_eig(m: &CMatrix) -> Result<Vec<EigPair>> {
    let (t, z) = schur(m)?;
    let n = m.rows();
    let small = f64::EPSILON * t.norm_inf().max(f64::MIN_POSITIVE);
    let mut pairs = Vec::with_capacity(n);
    for k in 0..n {
        let lam = t[(k, k)];
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        y[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let s: Complex64 = (i + 1..=k).map(|j| t[(i, j)] * y[j]).sum();
            let mut den = t[(i, i)] - lam;
            if den.norm() < small {
                den = Complex64::new(small, 0.0);
            }
            y[i] = -s / den;
        }
        let mut v = z.mul_vec(&y);
        let nv = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in v.iter_mut() {
            *c /= nv;
        }
        pairs.push(EigPair { value: lam, vector: v });
    }
    Ok(pairs)
}

pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    let (t, _) = schur_impl(m, false)?;
    Ok((0..m.rows()).map(|i| t[(i, i)]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::{c, pauli};

    fn check_herm(m: &CMatrix) -> HermEig {
        let e = herm_eig(m).unwrap();
        let n = m.rows();
        let lam = CMatrix::diag(&e.values.iter().map(|&x| c(x, 0.)).collect::<Vec<_>>());
        let res = &(m * &e.vectors) - &(&e.vectors * &lam);
        assert!(res.norm_inf() < 1e-10 * m.norm_inf().max(1e-300), "residual {}", res.norm_inf());
        let orth = &(&e.vectors.adjoint() * &e.vectors) - &CMatrix::identity(n);
        assert!(orth.max_abs() < 1e-10);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        e
    }

    #[test]
    fn herm_diagonal() {
        let m = CMatrix::diag(&[c(2., 0.), c(-1., 0.)]);
        let e = check_herm(&m);
        assert_eq!(e.values, vec![-1.0, 2.0]);
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn herm_pauli_x() {
        let e = check_herm(&pauli::sx());
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn herm_dirac_symbol() {
        let m = &(&pauli::sx() + &pauli::sy()) + &pauli::sz();
        let e = check_herm(&m);
        let r3 = 3f64.sqrt();
        assert!((e.values[0] + r3).abs() < 1e-13 && (e.values[1] - r3).abs() < 1e-13);
    }

    #[test]
    fn herm_rejects_non_hermitian() {
        assert!(matches!(herm_eig(&pauli::y()), Err(BecError::ContractViolation(_))));
    }

    fn check_eig(m: &CMatrix) -> Vec<EigPair> {
        let p = complex_eig(m).unwrap();
        assert_eq!(p.len(), m.rows());
        for pair in &p {
            let mv = m.mul_vec(&pair.vector);
            let r: f64 = mv
                .iter()
                .zip(&pair.vector)
                .map(|(a, b)| (a - pair.value * b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(r < 1e-9 * m.norm_inf().max(1e-300), "eig residual {r}");
        }
        p
    }

    #[test]
    fn nilpotent() {
        let m = CMatrix::from_real_rows(&[&[0., 1.], &[0., 0.]]).unwrap();
        let p = check_eig(&m);
        assert!(p.iter().all(|e| e.value.norm() < 1e-12));
    }

    #[test]
    fn companion_z2_plus_1() {
        let m = CMatrix::from_real_rows(&[&[0., -1.], &[1., 0.]]).unwrap();
        let mut v: Vec<_> = check_eig(&m).iter().map(|e| e.value).collect();
        v.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((v[0] - c(0., -1.)).norm() < 1e-12);
        assert!((v[1] - c(0., 1.)).norm() < 1e-12);
    }

    #[test]
    fn companion_laplacian_exponent() {
        // μ² − (k² − z), k = 1, z = i
        let q = c(1., -1.);
        let m = CMatrix::from_rows(&[vec![c(0., 0.), q], vec![c(1., 0.), c(0., 0.)]]).unwrap();
        let r = q.sqrt();
        let vals: Vec<_> = check_eig(&m).iter().map(|e| e.value).collect();
        assert!(vals.iter().any(|v| (v - r).norm() < 1e-12));
        assert!(vals.iter().any(|v| (v + r).norm() < 1e-12));
    }

    #[test]
    fn larger_random_like_matrix() {
        let n = 9;
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let x = ((i * 7 + j * 13) % 17) as f64 / 17.0 - 0.4;
                let y = ((i * 5 + j * 3) % 11) as f64 / 11.0 - 0.5;
                m[(i, j)] = c(x, y);
            }
        }
        check_eig(&m);
    }
}
