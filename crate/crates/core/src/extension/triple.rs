use num_complex::Complex64;

use crate::error::{BecError, Result};
use crate::numerics::{pauli, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripleKind {
    /// Acts on the jet at `0`.
    Halfline,
    /// Acts on `(jet at 0⁺, jet at 0⁻)`.
    Interface,
}

/// Trace maps `Γ1, Γ2` on boundary jets, polynomial in the boundary momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTriple {
    pub kind: TripleKind,
    /// Matrix size of the symbol.
    pub n: usize,
    /// Order of the fiber operator.
    pub order: usize,
    pub dim_v: usize,
    g1: Vec<CMatrix>,
    g2: Vec<CMatrix>,
}

impl BoundaryTriple {
    pub fn new(
        kind: TripleKind,
        n: usize,
        order: usize,
        g1: Vec<CMatrix>,
        g2: Vec<CMatrix>,
    ) -> Result<Self> {
        let jet_dim = order * n * if kind == TripleKind::Interface { 2 } else { 1 };
        let dim_v = g1.first().map(|g| g.rows()).unwrap_or(0);
        if g1.is_empty() || g2.is_empty() {
            return Err(BecError::Input("triple needs at least one coefficient for each trace".into()));
        }
        for g in g1.iter().chain(&g2) {
            if g.rows() != dim_v || g.cols() != jet_dim {
                return Err(BecError::Input(format!(
                    "trace coefficient has shape {}x{}, expected {dim_v}x{jet_dim}",
                    g.rows(),
                    g.cols()
                )));
            }
        }
        Ok(BoundaryTriple { kind, n, order, dim_v, g1, g2 })
    }

    pub fn jet_dim(&self) -> usize {
        self.order * self.n * if self.kind == TripleKind::Interface { 2 } else { 1 }
    }

    fn eval(coeffs: &[CMatrix], k: f64) -> CMatrix {
        let mut out = coeffs[0].clone();
        let mut p = 1.0;
        for c in &coeffs[1..] {
            p *= k;
            out = &out + &c.scale_re(p);
        }
        out
    }

    pub fn g1(&self, k: f64) -> CMatrix {
        Self::eval(&self.g1, k)
    }

    pub fn g2(&self, k: f64) -> CMatrix {
        Self::eval(&self.g2, k)
    }

    pub fn g1_coeffs(&self) -> &[CMatrix] {
        &self.g1
    }

    pub fn g2_coeffs(&self) -> &[CMatrix] {
        &self.g2
    }

    /// Copy with `Γ2` multiplied by `factor`; used as a negative control.
    pub fn with_scaled_g2(&self, factor: f64) -> Self {
        let mut t = self.clone();
        t.g2 = t.g2.iter().map(|g| g.scale_re(factor)).collect();
        t
    }
}

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `Γ1Ψ = Ψ(0)`, `Γ2Ψ = Ψ′(0)`.
pub fn laplacian_triple() -> BoundaryTriple {
    let g1 = CMatrix::from_rows(&[vec![r(1.), r(0.)]]).unwrap();
    let g2 = CMatrix::from_rows(&[vec![r(0.), r(1.)]]).unwrap();
    BoundaryTriple::new(TripleKind::Halfline, 1, 2, vec![g1], vec![g2]).unwrap()
}

/// Half-line Dirac traces `Γ1ψ = ψ1(0) − ψ2(0)`, `Γ2ψ = −(ψ1(0) + ψ2(0))/2`.
pub fn dirac_halfline_triple() -> BoundaryTriple {
    let g1 = CMatrix::from_rows(&[vec![r(1.), r(-1.)]]).unwrap();
    let g2 = CMatrix::from_rows(&[vec![r(-0.5), r(-0.5)]]).unwrap();
    BoundaryTriple::new(TripleKind::Halfline, 2, 1, vec![g1], vec![g2]).unwrap()
}

/// Jump and average traces `Γ1 = −Ψ(0⁺) + Ψ(0⁻)`, `Γ2 = ½Y(Ψ(0⁺) + Ψ(0⁻))`.
pub fn dirac_interface_triple() -> BoundaryTriple {
    let id = CMatrix::identity(2);
    let g1 = CMatrix::hstack(&[&id.scale_re(-1.0), &id]);
    let hy = pauli::y().scale_re(0.5);
    let g2 = CMatrix::hstack(&[&hy, &hy]);
    BoundaryTriple::new(TripleKind::Interface, 2, 1, vec![g1], vec![g2]).unwrap()
}

/// `Γ1Ψ = Ψ(0)`, `Γ2Ψ = −½YΨ(0) + εσ_zΨ′(0)`.
pub fn regularized_dirac_triple(eps: f64) -> BoundaryTriple {
    let id = CMatrix::identity(2);
    let zero = CMatrix::zeros(2, 2);
    let g1 = CMatrix::hstack(&[&id, &zero]);
    let g2 = CMatrix::hstack(&[&pauli::y().scale_re(-0.5), &pauli::sz().scale_re(eps)]);
    BoundaryTriple::new(TripleKind::Halfline, 2, 2, vec![g1], vec![g2]).unwrap()
}
