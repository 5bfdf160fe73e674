use num_complex::Complex64;

use super::eig::eigenvalues;
use super::matrix::CMatrix;
use crate::error::{BecError, Result};

pub const TRIM_TOL: f64 = 1e-12;

/// Complex polynomial with coefficients indexed by degree.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarPolynomial {
    coeffs: Vec<Complex64>,
}

impl ScalarPolynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        ScalarPolynomial { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (i, &a) in c.iter().enumerate() {
                next[i + 1] += a;
                next[i] -= a * r;
            }
            c = next;
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Drops leading coefficients below `TRIM_TOL` relative to the largest one.
    pub fn trimmed(&self) -> Self {
        let cmax = self.max_coeff();
        let mut c = self.coeffs.clone();
        while c.len() > 1 && c.last().unwrap().norm() <= TRIM_TOL * cmax {
            c.pop();
        }
        Self::new(c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a)
    }

    /// Value and first derivative by Horner's scheme.
    pub fn eval_with_derivative(&self, x: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &a in self.coeffs.iter().rev() {
            dp = dp * x + p;
            p = p * x + a;
        }
        (p, dp)
    }
}

/// Roots of the trimmed polynomial from the eigenvalues of a scaled companion matrix,
/// followed by Newton polishing.
pub fn poly_roots(p: &ScalarPolynomial) -> Result<Vec<Complex64>> {
    let cmax = p.max_coeff();
    if cmax == 0.0 {
        return Err(BecError::Domain("poly_roots: zero polynomial".into()));
    }
    let t = p.trimmed();
    let d = t.degree();
    if d == 0 {
        return Err(BecError::Domain("poly_roots: constant polynomial has no roots".into()));
    }
    let lead = t.coeffs[d];
    let monic: Vec<Complex64> = t.coeffs.iter().map(|&a| a / lead).collect();
    // Fujiwara-type scale so the scaled companion entries are O(1).
    let rho = (0..d)
        .map(|j| monic[j].norm().powf(1.0 / (d - j) as f64))
        .fold(0.0, f64::max);
    let roots = if rho == 0.0 {
        vec![Complex64::new(0.0, 0.0); d]
    } else if d == 1 {
        vec![-monic[0]]
    } else if d == 2 {
        // x² + bx + c with the cancellation-free quadratic formula
        let (b, c) = (monic[1], monic[0]);
        let disc = (b * b - c * 4.0).sqrt();
        let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) * 0.5 } else { -(b - disc) * 0.5 };
        if q.norm() == 0.0 {
            vec![q, q]
        } else {
            vec![q, c / q]
        }
    } else {
        let mut comp = CMatrix::zeros(d, d);
        for j in 0..d {
            comp[(0, j)] = -monic[d - 1 - j] / rho.powi((j + 1) as i32);
        }
        for i in 1..d {
            comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        eigenvalues(&comp)?.into_iter().map(|x| x * rho).collect()
    };
    let polished: Vec<Complex64> = roots.into_iter().map(|r| polish(&t, r)).collect();
    for &r in &polished {
        let bound = 1e-8 * t.max_coeff() * (1.0 + r.norm()).powi(d as i32);
        if !(t.eval(r).norm() < bound) {
            return Err(BecError::NumericalFailure(format!(
                "poly_roots: residual {:.3e} at root {r} exceeds {bound:.3e}",
                t.eval(r).norm()
            )));
        }
    }
    Ok(polished)
}

fn polish(p: &ScalarPolynomial, mut x: Complex64) -> Complex64 {
    let mut best = p.eval(x).norm();
    for _ in 0..8 {
        let (v, dv) = p.eval_with_derivative(x);
        if dv.norm() == 0.0 || v.norm() == 0.0 {
            break;
        }
        let nx = x - v / dv;
        let nv = p.eval(nx).norm();
        if !(nv < best) {
            break;
        }
        x = nx;
        best = nv;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::c;

    fn contains(roots: &[Complex64], r: Complex64, tol: f64) -> bool {
        roots.iter().any(|x| (x - r).norm() < tol)
    }

    #[test]
    fn quadratic() {
        let r = poly_roots(&ScalarPolynomial::from_real(&[-4., 0., 1.])).unwrap();
        assert!(contains(&r, c(2., 0.), 1e-12) && contains(&r, c(-2., 0.), 1e-12));
    }

    #[test]
    fn laplacian_exponent_at_minus_one() {
        // μ² − (k² − z) with k = 0, z = −1
        let r = poly_roots(&ScalarPolynomial::from_real(&[-1., 0., 1.])).unwrap();
        assert!(contains(&r, c(1., 0.), 1e-12) && contains(&r, c(-1., 0.), 1e-12));
    }

    #[test]
    fn zero_polynomial_is_domain_error() {
        assert!(matches!(
            poly_roots(&ScalarPolynomial::from_real(&[0., 0.])),
            Err(BecError::Domain(_))
        ));
    }

    #[test]
    fn structurally_singular_leading_coefficient_is_trimmed() {
        let p = ScalarPolynomial::new(vec![c(-1., 0.), c(0., 0.), c(1., 0.), c(1e-17, 0.)]);
        let r = poly_roots(&p).unwrap();
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn regularized_dirac_quartic() {
        // det of the regularized Dirac fiber at k = 0: ε²μ⁴ − (1 + 2mε)μ² + m² − z²
        let (m, eps, z) = (1.0, 0.1, c(0., 1.));
        let p = ScalarPolynomial::new(vec![
            c(m * m, 0.) - z * z,
            c(0., 0.),
            c(-(1.0 + 2.0 * m * eps), 0.),
            c(0., 0.),
            c(eps * eps, 0.),
        ]);
        let r = poly_roots(&p).unwrap();
        let disc = (c(1.0 + 4.0 * m * eps, 0.) + z * z * 4.0 * eps * eps).sqrt();
        let zp = (c(1.0 + 2.0 * m * eps, 0.) + disc) / (2.0 * eps * eps);
        let zm = (c(1.0 + 2.0 * m * eps, 0.) - disc) / (2.0 * eps * eps);
        for x in [zp.sqrt(), -zp.sqrt(), zm.sqrt(), -zm.sqrt()] {
            assert!(contains(&r, x, 1e-9), "missing {x}");
        }
    }

    #[test]
    fn from_roots_round_trip() {
        let roots = [c(1., 2.), c(-3., 0.5), c(0.2, -1.), c(4., 0.)];
        let r = poly_roots(&ScalarPolynomial::from_roots(&roots)).unwrap();
        for x in roots {
            assert!(contains(&r, x, 1e-9));
        }
    }
}
