use num_complex::Complex64;

use crate::error::{BecError, Result};
use crate::numerics::svd::min_singular;
use crate::numerics::{pauli, CMatrix};

/// Local boundary data `KΨ + L∂_xΨ + M∂_yΨ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Klm {
    pub k: CMatrix,
    pub l: CMatrix,
    pub m: CMatrix,
}

/// How a model's triple turns `(K, L, M)` into `(A, B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Converter {
    /// `A = K + ikL`, `B = −M`.
    Laplacian,
    /// `B = −ε⁻¹Mσ_z`, `A = K + ikL − ½BY`.
    RegularizedDirac { eps: f64 },
}

/// Boundary condition `A(k)Γ1ψ = B(k)Γ2ψ` with `A`, `B` polynomial in `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCondition {
    pub label: String,
    a: Vec<CMatrix>,
    b: Vec<CMatrix>,
    pub klm: Option<Klm>,
}

fn eval_poly(coeffs: &[CMatrix], k: f64) -> CMatrix {
    let mut out = coeffs[0].clone();
    let mut p = 1.0;
    for c in &coeffs[1..] {
        p *= k;
        out = &out + &c.scale_re(p);
    }
    out
}

impl BoundaryCondition {
    pub fn direct(label: impl Into<String>, a: Vec<CMatrix>, b: Vec<CMatrix>) -> Result<Self> {
        let label = label.into();
        let d = a.first().map(|m| m.rows()).unwrap_or(0);
        if a.is_empty() || b.is_empty() {
            return Err(BecError::Input(format!("{label}: A and B need at least one coefficient")));
        }
        if a.iter().chain(&b).any(|m| m.rows() != d || m.cols() != d) {
            return Err(BecError::Input(format!("{label}: A and B coefficients must be {d}x{d}")));
        }
        Ok(BoundaryCondition { label, a, b, klm: None })
    }

    pub fn constant(label: impl Into<String>, a: CMatrix, b: CMatrix) -> Result<Self> {
        Self::direct(label, vec![a], vec![b])
    }

    /// The reference extension `(A, B) = (1, 0)`.
    pub fn reference(dim_v: usize) -> Self {
        Self::constant("reference", CMatrix::identity(dim_v), CMatrix::zeros(dim_v, dim_v)).unwrap()
    }

    pub fn from_klm(label: impl Into<String>, conv: Converter, klm: Klm) -> Result<Self> {
        let (a, b) = klm_to_ab_coeffs(conv, &klm)?;
        let mut bc = Self::direct(label, a, b)?;
        bc.klm = Some(klm);
        Ok(bc)
    }

    pub fn dim_v(&self) -> usize {
        self.a[0].rows()
    }

    pub fn a_coeffs(&self) -> &[CMatrix] {
        &self.a
    }

    pub fn b_coeffs(&self) -> &[CMatrix] {
        &self.b
    }

    pub fn ab(&self, k: f64) -> (CMatrix, CMatrix) {
        (eval_poly(&self.a, k), eval_poly(&self.b, k))
    }

    /// `(CA, CB)` for an invertible `C`; describes the same extension.
    pub fn left_multiplied(&self, c: &CMatrix) -> Self {
        BoundaryCondition {
            label: format!("{} (rescaled)", self.label),
            a: self.a.iter().map(|m| c * m).collect(),
            b: self.b.iter().map(|m| c * m).collect(),
            klm: None,
        }
    }

    /// Checks that `iA + B` is invertible and `AB*` is Hermitian at `k`.
    pub fn check_admissible(&self, k: f64) -> Result<()> {
        let (a, b) = self.ab(k);
        let scale = 1.0 + a.max_abs() * b.max_abs();
        let iab = &a.scale(Complex64::new(0.0, 1.0)) + &b;
        let norm = 1.0 + a.max_abs() + b.max_abs();
        let smin = min_singular(&iab);
        if smin <= 1e-10 * norm {
            return Err(BecError::Inadmissible(format!(
                "{}: iA+B is singular at k = {k} (min singular value {smin:.2e})",
                self.label
            )));
        }
        let abs = &a * &b.adjoint();
        let defect = (&abs - &abs.adjoint()).max_abs();
        if defect > 1e-10 * scale {
            return Err(BecError::Inadmissible(format!(
                "{}: AB* is not Hermitian at k = {k} (defect {defect:.2e})",
                self.label
            )));
        }
        Ok(())
    }
}

fn klm_to_ab_coeffs(conv: Converter, klm: &Klm) -> Result<(Vec<CMatrix>, Vec<CMatrix>)> {
    let i = Complex64::new(0.0, 1.0);
    let d = klm.k.rows();
    if [&klm.k, &klm.l, &klm.m].iter().any(|m| m.rows() != d || m.cols() != d) {
        return Err(BecError::Input("K, L, M must be square of equal size".into()));
    }
    match conv {
        Converter::Laplacian => {
            if d != 1 {
                return Err(BecError::Input("Laplacian boundary data must be scalar".into()));
            }
            Ok((vec![klm.k.clone(), klm.l.scale(i)], vec![klm.m.scale_re(-1.0)]))
        }
        Converter::RegularizedDirac { eps } => {
            if d != 2 {
                return Err(BecError::Input("regularized Dirac boundary data must be 2x2".into()));
            }
            if eps == 0.0 {
                return Err(BecError::Domain("regularized Dirac converter needs eps != 0".into()));
            }
            let b = (&klm.m * &pauli::sz()).scale_re(-1.0 / eps);
            let a0 = &klm.k - &(&b * &pauli::y()).scale_re(0.5);
            Ok((vec![a0, klm.l.scale(i)], vec![b]))
        }
    }
}

/// `(A(k), B(k))` for local data under the model's converter.
pub fn klm_to_ab(conv: Option<Converter>, klm: &Klm, k: f64) -> Result<(CMatrix, CMatrix)> {
    let conv = conv.ok_or_else(|| BecError::UnsupportedConversion("model ships no (K, L, M) converter".into()))?;
    let (a, b) = klm_to_ab_coeffs(conv, klm)?;
    Ok((eval_poly(&a, k), eval_poly(&b, k)))
}
