use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{BecError, Result};
use crate::numerics::poly::{poly_roots, ScalarPolynomial};
use crate::numerics::svd::{min_singular, null_vector};
use crate::numerics::CMatrix;
use crate::symbol::FiberOperator;

pub const SIDE_MARGIN: f64 = 1e-8;
pub const CLUSTER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `Re μ > 0`: decays on `y > 0`.
    Right,
    /// `Re μ < 0`: decays on `y < 0`.
    Left,
}

/// Exponential solution `φ e^{−μy}` of `(H(k) − z)Ψ = 0`.
#[derive(Debug, Clone)]
pub struct DeficiencyEntry {
    pub mu: Complex64,
    /// Amplitude with unit Euclidean norm.
    pub phi: Vec<Complex64>,
}

impl DeficiencyEntry {
    /// `L²` norm of `φ e^{−μy}` on the half-line where it decays.
    pub fn l2_norm(&self) -> f64 {
        (0.5 / self.mu.re.abs()).sqrt()
    }

    /// Jet `(Ψ(0), Ψ′(0), …, Ψ^{(order−1)}(0))` stacked into one vector.
    pub fn jet(&self, order: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(order * self.phi.len());
        let mut p = Complex64::new(1.0, 0.0);
        for _ in 0..order {
            out.extend(self.phi.iter().map(|x| x * p));
            p *= -self.mu;
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct DeficiencyBasis {
    pub k: f64,
    pub z: Complex64,
    pub side: Side,
    pub entries: Vec<DeficiencyEntry>,
}

impl DeficiencyBasis {
    /// Jet matrix with one column per entry.
    pub fn jet_matrix(&self, order: usize, n: usize) -> Option<CMatrix> {
        if self.entries.is_empty() {
            return None;
        }
        let mut j = CMatrix::zeros(order * n, self.entries.len());
        for (col, e) in self.entries.iter().enumerate() {
            j.set_column(col, &e.jet(order));
        }
        Some(j)
    }
}

fn char_poly_value(f: &FiberOperator, mu: Complex64, z: Complex64) -> Complex64 {
    f.matrix_at(mu, z).det()
}

/// Interpolates `x ↦ det M(R x)` at Chebyshev nodes and returns its monomial coefficients.
fn interpolated_char_poly(f: &FiberOperator, z: Complex64, radius: f64) -> Result<ScalarPolynomial> {
    let d = f.order() * f.n;
    let m = d + 1;
    let nodes: Vec<f64> = (0..m).map(|i| (PI * (i as f64 + 0.5) / m as f64).cos()).collect();
    let mut v = CMatrix::zeros(m, m);
    let mut rhs = CMatrix::zeros(m, 1);
    for (i, &x) in nodes.iter().enumerate() {
        let mut p = 1.0;
        for j in 0..m {
            v[(i, j)] = Complex64::new(p, 0.0);
            p *= x;
        }
        rhs[(i, 0)] = char_poly_value(f, Complex64::new(radius * x, 0.0), z);
    }
    let coeffs = v.solve(&rhs)?;
    Ok(ScalarPolynomial::new(coeffs.column(0)))
}

fn polish_root(f: &FiberOperator, z: Complex64, mut mu: Complex64) -> Complex64 {
    let g = |x: Complex64| char_poly_value(f, x, z);
    let mut value = g(mu);
    for _ in 0..12 {
        if value.norm() == 0.0 {
            break;
        }
        let h = 1e-7 * (1.0 + mu.norm());
        let dg = (g(mu + h) - g(mu - h)) / (2.0 * h);
        if dg.norm() == 0.0 {
            break;
        }
        let next = mu - value / dg;
        let next_value = g(next);
        if !(next_value.norm() < value.norm()) {
            break;
        }
        let step = (next - mu).norm();
        mu = next;
        value = next_value;
        if step <= 1e-15 * (1.0 + mu.norm()) {
            break;
        }
    }
    mu
}

/// All decay exponents of the fiber at `z`, polished against the determinant.
pub fn decay_exponents(f: &FiberOperator, z: Complex64) -> Result<Vec<Complex64>> {
    if f.order() == 0 {
        return Err(BecError::Domain("fiber operator has order 0".into()));
    }
    let scale: f64 = f.d.iter().map(|d| d.max_abs()).fold(0.0, f64::max).max(1e-300);
    let mut radius = 1.0 + f.k.abs() + z.norm().sqrt() + (scale / f.d.last().unwrap().max_abs().max(1e-300)).sqrt();
    let mut roots = Vec::new();
    for _pass in 0..3 {
        let p = interpolated_char_poly(f, z, radius)?;
        let xs = poly_roots(&p)?;
        let rmax = xs.iter().map(|x| x.norm()).fold(0.0, f64::max);
        roots = xs.into_iter().map(|x| x * radius).collect();
        if rmax > 0.25 && rmax < 4.0 {
            break;
        }
        if rmax == 0.0 {
            break;
        }
        radius *= rmax;
    }
    Ok(roots.into_iter().map(|mu| polish_root(f, z, mu)).collect())
}

fn build(f: &FiberOperator, z: Complex64, side: Side, real_axis: bool) -> Result<DeficiencyBasis> {
    let roots = decay_exponents(f, z)?;
    let mut chosen = Vec::new();
    for mu in roots {
        if mu.re.abs() <= SIDE_MARGIN {
            return Err(if real_axis {
                BecError::BandEdge { k: f.k, lambda: z.re }
            } else {
                BecError::BoundaryOfRegularity { mu: format!("{mu}") }
            });
        }
        let on_side = match side {
            Side::Right => mu.re > 0.0,
            Side::Left => mu.re < 0.0,
        };
        if on_side {
            chosen.push(mu);
        }
    }
    for i in 0..chosen.len() {
        for j in i + 1..chosen.len() {
            if (chosen[i] - chosen[j]).norm() < CLUSTER_TOL {
                return Err(BecError::DegenerateExponent { a: format!("{}", chosen[i]), b: format!("{}", chosen[j]) });
            }
        }
    }
    chosen.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut entries = Vec::with_capacity(chosen.len());
    for mu in chosen {
        let m = f.matrix_at(mu, z);
        let (_, phi) = null_vector(&m);
        let r: f64 = m.mul_vec(&phi).iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let bound = 1e-9 * (1.0 + m.norm_inf() + mu.norm() * f.matrix_derivative(mu).norm_inf());
        if !(r < bound) {
            return Err(BecError::NumericalFailure(format!(
                "deficiency residual {r:.3e} exceeds {bound:.3e} at k = {}, mu = {mu}",
                f.k
            )));
        }
        entries.push(DeficiencyEntry { mu, phi });
    }
    let basis = DeficiencyBasis { k: f.k, z, side, entries };
    if let Some(j) = basis.jet_matrix(f.order(), f.n) {
        let jn = normalized_columns(&j);
        if min_singular(&jn) <= 1e-10 {
            return Err(BecError::NumericalFailure(format!(
                "deficiency jets are linearly dependent at k = {}",
                f.k
            )));
        }
    }
    Ok(basis)
}

pub(crate) fn normalized_columns(j: &CMatrix) -> CMatrix {
    let mut out = j.clone();
    for c in 0..j.cols() {
        let col = j.column(c);
        let n = col.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if n > 0.0 {
            out.set_column(c, &col.iter().map(|x| x / n).collect::<Vec<_>>());
        }
    }
    out
}

/// Exponential solutions of `(H(k) − z)Ψ = 0` decaying on the given side, `Im z ≠ 0`.
pub fn deficiency_basis(f: &FiberOperator, z: Complex64, side: Side) -> Result<DeficiencyBasis> {
    if z.im == 0.0 {
        return Err(BecError::ContractViolation("deficiency_basis requires Im z != 0".into()));
    }
    build(f, z, side, false)
}

/// Decaying solutions at a real energy inside the fiber gap.
pub fn decaying_basis_real(f: &FiberOperator, lambda: f64, side: Side) -> Result<DeficiencyBasis> {
    build(f, Complex64::new(lambda, 0.0), side, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::symbols;
    use crate::numerics::c;
    use crate::symbol::fiberize;

    #[test]
    fn laplacian_fiber() {
        let f = fiberize(&symbols::laplacian(), 1.0);
        let b = deficiency_basis(&f, c(0., 1.), Side::Right).unwrap();
        assert_eq!(b.entries.len(), 1);
        assert!((b.entries[0].mu - c(1., -1.).sqrt()).norm() < 1e-12);
        assert!((b.entries[0].phi[0].norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dirac_fiber() {
        let f = fiberize(&symbols::dirac(1.0), 0.0);
        let b = deficiency_basis(&f, c(0., 1.), Side::Right).unwrap();
        assert_eq!(b.entries.len(), 1);
        let e = &b.entries[0];
        assert!((e.mu - c(2f64.sqrt(), 0.)).norm() < 1e-12);
        // φ ∝ (1+i, √2)
        let ratio = e.phi[0] / e.phi[1];
        assert!((ratio - c(1., 1.) / 2f64.sqrt()).norm() < 1e-12);
        let l = deficiency_basis(&f, c(0., 1.), Side::Left).unwrap();
        assert!((l.entries[0].mu + c(2f64.sqrt(), 0.)).norm() < 1e-12);
    }

    #[test]
    fn regularized_fiber() {
        let (m, eps, z) = (1.0, 0.1, c(0., 1.));
        let f = fiberize(&symbols::regularized_dirac(m, eps), 0.0);
        let b = deficiency_basis(&f, z, Side::Right).unwrap();
        let disc = (c(1.0 + 4.0 * m * eps, 0.) + z * z * 4.0 * eps * eps).sqrt();
        let zp = (c(1.0 + 2.0 * m * eps, 0.) + disc) / (2.0 * eps * eps);
        let zm = (c(1.0 + 2.0 * m * eps, 0.) - disc) / (2.0 * eps * eps);
        let want = [zp.sqrt(), zm.sqrt()];
        assert_eq!(b.entries.len(), 2);
        for w in want {
            let w = if w.re < 0.0 { -w } else { w };
            assert!(b.entries.iter().any(|e| (e.mu - w).norm() < 1e-10), "missing {w}");
        }
    }

    #[test]
    fn regularized_fiber_at_large_momentum() {
        let f = fiberize(&symbols::regularized_dirac(-1.0, 0.1), 1e4);
        for z in [c(0., 1.), c(0., -1.)] {
            let b = deficiency_basis(&f, z, Side::Right).unwrap();
            assert_eq!(b.entries.len(), 2);
        }
    }

    #[test]
    fn real_energy_in_gap_and_at_edge() {
        let f = fiberize(&symbols::dirac(1.0), 0.0);
        let b = decaying_basis_real(&f, 0.3, Side::Right).unwrap();
        assert!((b.entries[0].mu.re - (1.0f64 - 0.09).sqrt()).abs() < 1e-12);
        assert!(matches!(decaying_basis_real(&f, 1.0, Side::Right), Err(BecError::BandEdge { .. })));
    }

    #[test]
    fn requires_non_real_z() {
        let f = fiberize(&symbols::dirac(1.0), 0.0);
        assert!(deficiency_basis(&f, c(0.5, 0.), Side::Right).is_err());
    }
}
