use num_complex::Complex64;

use super::condition::BoundaryCondition;
use super::deficiency::{decaying_basis_real, deficiency_basis, normalized_columns, DeficiencyBasis, Side};
use super::triple::{BoundaryTriple, TripleKind};
use crate::error::{BecError, Result};
use crate::numerics::svd::{min_singular, norm2};
use crate::numerics::CMatrix;
use crate::symbol::{fiberize, Symbol};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The boundary operator at a fixed boundary momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryOperator {
    pub k: f64,
    pub op: CMatrix,
    pub scale: f64,
}

/// A half-space or interface problem: bulk symbol(s) plus a boundary triple.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeProblem {
    /// Symbol on `y > 0`.
    pub plus: Symbol,
    /// Symbol on `y < 0` for interface problems.
    pub minus: Option<Symbol>,
    pub triple: BoundaryTriple,
}

impl EdgeProblem {
    pub fn halfline(symbol: Symbol, triple: BoundaryTriple) -> Result<Self> {
        if triple.kind != TripleKind::Halfline {
            return Err(BecError::Input("half-line problem needs a half-line triple".into()));
        }
        check_shape(&symbol, &triple)?;
        Ok(EdgeProblem { plus: symbol, minus: None, triple })
    }

    pub fn interface(plus: Symbol, minus: Symbol, triple: BoundaryTriple) -> Result<Self> {
        if triple.kind != TripleKind::Interface {
            return Err(BecError::Input("interface problem needs an interface triple".into()));
        }
        check_shape(&plus, &triple)?;
        check_shape(&minus, &triple)?;
        Ok(EdgeProblem { plus, minus: Some(minus), triple })
    }

    pub fn dim_v(&self) -> usize {
        self.triple.dim_v
    }

    pub fn is_interface(&self) -> bool {
        self.minus.is_some()
    }

    /// Decaying solutions at `z`: right-decaying on the plus side and, for interfaces,
    /// left-decaying on the minus side.
    pub fn bases(&self, k: f64, z: Complex64) -> Result<Vec<DeficiencyBasis>> {
        let mut out = vec![deficiency_basis(&fiberize(&self.plus, k), z, Side::Right)?];
        if let Some(m) = &self.minus {
            out.push(deficiency_basis(&fiberize(m, k), z, Side::Left)?);
        }
        Ok(out)
    }

    fn real_bases(&self, k: f64, lambda: f64) -> Result<Vec<DeficiencyBasis>> {
        let mut out = vec![decaying_basis_real(&fiberize(&self.plus, k), lambda, Side::Right)?];
        if let Some(m) = &self.minus {
            out.push(decaying_basis_real(&fiberize(m, k), lambda, Side::Left)?);
        }
        Ok(out)
    }

    /// Jet matrix of the given bases in the triple's jet space.
    pub fn jet_matrix(&self, bases: &[DeficiencyBasis]) -> Result<CMatrix> {
        let t = &self.triple;
        let block = t.order * t.n;
        let cols: usize = bases.iter().map(|b| b.entries.len()).sum();
        if cols != t.dim_v {
            return Err(BecError::NumericalFailure(format!(
                "found {cols} decaying solutions, expected deficiency index {}",
                t.dim_v
            )));
        }
        let mut j = CMatrix::zeros(t.jet_dim(), cols);
        let mut col = 0;
        for b in bases {
            let offset = if b.side == Side::Left && t.kind == TripleKind::Interface { block } else { 0 };
            for e in &b.entries {
                let jet = e.jet(t.order);
                for (r, v) in jet.into_iter().enumerate() {
                    j[(offset + r, col)] = v;
                }
                col += 1;
            }
        }
        Ok(j)
    }

    pub fn jets(&self, k: f64, z: Complex64) -> Result<CMatrix> {
        self.jet_matrix(&self.bases(k, z)?)
    }

    pub fn krein_q(&self, k: f64, z: Complex64) -> Result<CMatrix> {
        krein_q(&self.triple, k, &self.jets(k, z)?)
    }

    pub fn weyl_w(&self, bc: &BoundaryCondition, k: f64, z: Complex64) -> Result<CMatrix> {
        check_dim(self, bc)?;
        bc.check_admissible(k)?;
        let q = self.krein_q(k, z)?;
        weyl_w(bc, &q, k)
    }

    /// `U = W(i)⁻¹ W(−i)`.
    pub fn vn_unitary(&self, bc: &BoundaryCondition, k: f64) -> Result<CMatrix> {
        let wp = self.weyl_w(bc, k, I)?;
        let wm = self.weyl_w(bc, k, -I)?;
        wp.solve(&wm)
            .map_err(|_| BecError::Inadmissible(format!("{}: W(i) is singular at k = {k}", bc.label)))
    }

    /// `A(k) Γ1(k) − B(k) Γ2(k)` together with its spectral norm.
    pub fn boundary_operator(&self, bc: &BoundaryCondition, k: f64) -> Result<BoundaryOperator> {
        check_dim(self, bc)?;
        let (a, b) = bc.ab(k);
        let t = &self.triple;
        let op = &(&a * &t.g1(k)) - &(&b * &t.g2(k));
        let scale = norm2(&op);
        if scale == 0.0 {
            return Err(BecError::Inadmissible(format!("{}: A Γ1 − B Γ2 vanishes at k = {k}", bc.label)));
        }
        Ok(BoundaryOperator { k, op, scale })
    }

    /// `(A Γ1 − B Γ2) J(k, λ)` with unit jet columns; singular exactly at edge eigenvalues.
    pub fn boundary_matrix(&self, bc: &BoundaryCondition, k: f64, lambda: f64) -> Result<CMatrix> {
        self.boundary_matrix_with(&self.boundary_operator(bc, k)?, lambda)
    }

    pub fn boundary_matrix_with(&self, op: &BoundaryOperator, lambda: f64) -> Result<CMatrix> {
        let j = normalized_columns(&self.jet_matrix(&self.real_bases(op.k, lambda)?)?);
        Ok(&op.op * &j)
    }

    /// `σ_min(boundary matrix) / ‖A Γ1 − B Γ2‖`, a scale-free measure that vanishes at edge eigenvalues.
    pub fn boundary_singularity(&self, bc: &BoundaryCondition, k: f64, lambda: f64) -> Result<f64> {
        self.singularity_with(&self.boundary_operator(bc, k)?, lambda)
    }

    pub fn singularity_with(&self, op: &BoundaryOperator, lambda: f64) -> Result<f64> {
        Ok(min_singular(&self.boundary_matrix_with(op, lambda)?) / op.scale)
    }

    /// Largest relative defect of the abstract Green identity over deficiency elements at `±i`.
    pub fn green_identity_residual(&self, k: f64) -> Result<f64> {
        green_identity_residual(self, &self.triple, k)
    }

    /// Number of decaying solutions at `z = i` and `z = −i`.
    pub fn deficiency_indices(&self, k: f64) -> Result<(usize, usize)> {
        let count = |z| -> Result<usize> { Ok(self.bases(k, z)?.iter().map(|b| b.entries.len()).sum()) };
        Ok((count(I)?, count(-I)?))
    }
}

fn check_shape(s: &Symbol, t: &BoundaryTriple) -> Result<()> {
    if s.dim() != t.n || s.order() != t.order {
        return Err(BecError::Input(format!(
            "triple expects N = {}, order {}; symbol has N = {}, order {}",
            t.n,
            t.order,
            s.dim(),
            s.order()
        )));
    }
    Ok(())
}

fn check_dim(p: &EdgeProblem, bc: &BoundaryCondition) -> Result<()> {
    if bc.dim_v() != p.dim_v() {
        return Err(BecError::Input(format!(
            "{}: condition acts on dimension {}, triple has {}",
            bc.label,
            bc.dim_v(),
            p.dim_v()
        )));
    }
    Ok(())
}

/// `Q = Γ2 J (Γ1 J)⁻¹` for a jet matrix `J` spanning the deficiency space.
pub fn krein_q(t: &BoundaryTriple, k: f64, jets: &CMatrix) -> Result<CMatrix> {
    let jn = normalized_columns(jets);
    let g1j = &t.g1(k) * &jn;
    let g2j = &t.g2(k) * &jn;
    if min_singular(&g1j) <= 1e-10 {
        return Err(BecError::TripleDegeneracy);
    }
    let x = g1j.adjoint().solve(&g2j.adjoint())?;
    Ok(x.adjoint())
}

/// `W = A(k) − B(k) Q`.
pub fn weyl_w(bc: &BoundaryCondition, q: &CMatrix, k: f64) -> Result<CMatrix> {
    let (a, b) = bc.ab(k);
    let w = &a - &(&b * q);
    if min_singular(&w) <= 1e-12 {
        return Err(BecError::Inadmissible(format!("{}: W is singular at k = {k}", bc.label)));
    }
    Ok(w)
}

pub fn green_identity_residual(p: &EdgeProblem, t: &BoundaryTriple, k: f64) -> Result<f64> {
    struct Element {
        z: Complex64,
        mu: Complex64,
        phi: Vec<Complex64>,
        side: Side,
        jet: Vec<Complex64>,
    }
    let block = t.order * t.n;
    let mut elements = Vec::new();
    for z in [I, -I] {
        for b in p.bases(k, z)? {
            let off = if b.side == Side::Left && t.kind == TripleKind::Interface { block } else { 0 };
            for e in &b.entries {
                let scale = 1.0 / e.l2_norm();
                let mut jet = vec![Complex64::new(0.0, 0.0); t.jet_dim()];
                for (r, v) in e.jet(t.order).into_iter().enumerate() {
                    jet[off + r] = v * scale;
                }
                let phi = e.phi.iter().map(|x| x * scale).collect();
                elements.push(Element { z, mu: e.mu, phi, side: b.side, jet });
            }
        }
    }
    let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 { a.iter().zip(b).map(|(x, y)| x.conj() * y).sum() };
    let g1 = t.g1(k);
    let g2 = t.g2(k);
    let mut worst: f64 = 0.0;
    for psi in elements.iter().filter(|e| e.z == I) {
        for phi in &elements {
            let inner = if psi.side != phi.side {
                Complex64::new(0.0, 0.0)
            } else {
                let s = dot(&psi.phi, &phi.phi) / (psi.mu.conj() + phi.mu);
                if psi.side == Side::Right {
                    s
                } else {
                    -s
                }
            };
            let lhs = (phi.z - psi.z.conj()) * inner;
            let t1 = dot(&g1.mul_vec(&psi.jet), &g2.mul_vec(&phi.jet));
            let t2 = dot(&g2.mul_vec(&psi.jet), &g1.mul_vec(&phi.jet));
            let denom = 1.0f64.max(t1.norm() + t2.norm()).max(lhs.norm());
            worst = worst.max((lhs - (t1 - t2)).norm() / denom);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Affiliated,
    NotAffiliated(Direction),
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Affiliated => write!(f, "affiliated"),
            Verdict::NotAffiliated(Direction::Plus) => write!(f, "not-affiliated(+)"),
            Verdict::NotAffiliated(Direction::Minus) => write!(f, "not-affiliated(-)"),
            Verdict::NotAffiliated(Direction::Both) => write!(f, "not-affiliated(+/-)"),
            Verdict::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

pub const AFFILIATION_RADII: [f64; 3] = [1e2, 1e3, 1e4];

/// `‖U(±κ) − 1‖` at the three probe radii for each direction.
#[derive(Debug, Clone)]
pub struct AffiliationReport {
    pub verdict: Verdict,
    pub plus: [f64; 3],
    pub minus: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SideVerdict {
    Yes,
    No,
    Unknown,
}

fn side_verdict(r: &[f64; 3]) -> SideVerdict {
    let non_increasing = r[1] <= r[0] * (1.0 + 1e-6) + 1e-12 && r[2] <= r[1] * (1.0 + 1e-6) + 1e-12;
    if r[2] < 0.05 && non_increasing {
        SideVerdict::Yes
    } else if r[2] >= 0.05 && ((r[2] - r[1]).abs() < 0.1 * r[2] || r[2] > 0.5) {
        SideVerdict::No
    } else {
        SideVerdict::Unknown
    }
}

/// Classifies whether `U(k) → 1` as `k → ±∞`.
pub fn affiliation_check(p: &EdgeProblem, bc: &BoundaryCondition) -> Result<AffiliationReport> {
    let id = CMatrix::identity(p.dim_v());
    let probe = |k: f64| -> Result<f64> { Ok(norm2(&(&p.vn_unitary(bc, k)? - &id))) };
    let mut plus = [0.0; 3];
    let mut minus = [0.0; 3];
    for (i, &kappa) in AFFILIATION_RADII.iter().enumerate() {
        plus[i] = probe(kappa)?;
        minus[i] = probe(-kappa)?;
    }
    let (vp, vm) = (side_verdict(&plus), side_verdict(&minus));
    let verdict = match (vp, vm) {
        (SideVerdict::Yes, SideVerdict::Yes) => Verdict::Affiliated,
        (SideVerdict::No, SideVerdict::No) => Verdict::NotAffiliated(Direction::Both),
        (SideVerdict::No, _) => Verdict::NotAffiliated(Direction::Plus),
        (_, SideVerdict::No) => Verdict::NotAffiliated(Direction::Minus),
        _ => Verdict::Inconclusive,
    };
    Ok(AffiliationReport { verdict, plus, minus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::triple::{
        dirac_halfline_triple, dirac_interface_triple, laplacian_triple, regularized_dirac_triple,
    };
    use crate::models::symbols;
    use crate::numerics::c;

    fn problems() -> Vec<EdgeProblem> {
        vec![
            EdgeProblem::halfline(symbols::laplacian(), laplacian_triple()).unwrap(),
            EdgeProblem::halfline(symbols::dirac(1.0), dirac_halfline_triple()).unwrap(),
            EdgeProblem::interface(symbols::dirac(1.0), symbols::dirac(-0.5), dirac_interface_triple()).unwrap(),
            EdgeProblem::halfline(symbols::regularized_dirac(-1.0, 0.1), regularized_dirac_triple(0.1)).unwrap(),
        ]
    }

    fn dirac_a(a: f64) -> BoundaryCondition {
        BoundaryCondition::constant("a", CMatrix::scalar(c((1.0 + a) / 2.0, 0.)), CMatrix::scalar(c(1.0 - a, 0.)))
            .unwrap()
    }

    #[test]
    fn green_identity_holds_for_shipped_triples() {
        for p in problems() {
            for k in [-7.0, -0.4, 0.0, 1.3, 250.0] {
                let r = p.green_identity_residual(k).unwrap();
                assert!(r < 1e-10, "residual {r} at k = {k}");
            }
        }
    }

    #[test]
    fn rescaled_trace_breaks_green_identity() {
        for p in problems() {
            let r = green_identity_residual(&p, &p.triple.with_scaled_g2(2.0), 0.8).unwrap();
            assert!(r > 0.1, "residual {r}");
        }
    }

    #[test]
    fn deficiency_indices_match_triple() {
        for p in problems() {
            assert_eq!(p.deficiency_indices(0.3).unwrap(), (p.dim_v(), p.dim_v()));
        }
    }

    #[test]
    fn laplacian_krein_function() {
        let p = &problems()[0];
        let q = p.krein_q(1.0, c(0., 1.)).unwrap();
        assert!((q[(0, 0)] + c(1., -1.).sqrt()).norm() < 1e-12);
    }

    #[test]
    fn krein_function_ignores_basis_choice() {
        for p in problems() {
            let z = c(0.3, 1.0);
            let j = p.jets(0.7, z).unwrap();
            let d = j.cols();
            let mut mix = CMatrix::identity(d);
            for r in 0..d {
                for s in 0..d {
                    mix[(r, s)] += c(0.3 * (r as f64 - s as f64), 0.2 * (r + s) as f64);
                }
            }
            let q1 = krein_q(&p.triple, 0.7, &j).unwrap();
            let q2 = krein_q(&p.triple, 0.7, &(&j * &mix)).unwrap();
            assert!((&q1 - &q2).max_abs() < 1e-10 * (1.0 + q1.max_abs()));
        }
    }

    #[test]
    fn unitary_is_unitary() {
        let p = &problems()[1];
        for a in [2.0, 0.5, -0.5, -3.0] {
            for k in [-5.0, 0.0, 0.9, 40.0] {
                let u = p.vn_unitary(&dirac_a(a), k).unwrap();
                assert!((&(&u * &u.adjoint()) - &CMatrix::identity(1)).max_abs() < 1e-10);
            }
        }
        let r = &problems()[3];
        let u = r.vn_unitary(&BoundaryCondition::reference(2), 3.0).unwrap();
        assert!((&u - &CMatrix::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn dirac_affiliation_verdicts() {
        let p = &problems()[1];
        assert_eq!(affiliation_check(p, &dirac_a(2.0)).unwrap().verdict, Verdict::Affiliated);
        assert_eq!(affiliation_check(p, &dirac_a(-0.5)).unwrap().verdict, Verdict::Affiliated);
        // ψ1 = 0 and ψ2 = 0
        let zero = BoundaryCondition::constant("a=0", CMatrix::scalar(c(0.5, 0.)), CMatrix::scalar(c(1.0, 0.))).unwrap();
        let inf = BoundaryCondition::constant("a=inf", CMatrix::scalar(c(0.5, 0.)), CMatrix::scalar(c(-1.0, 0.))).unwrap();
        assert_eq!(affiliation_check(p, &zero).unwrap().verdict, Verdict::NotAffiliated(Direction::Plus));
        assert_eq!(affiliation_check(p, &inf).unwrap().verdict, Verdict::NotAffiliated(Direction::Minus));
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        assert!(EdgeProblem::halfline(symbols::dirac(1.0), laplacian_triple()).is_err());
        assert!(EdgeProblem::halfline(symbols::dirac(1.0), dirac_interface_triple()).is_err());
        let p = &problems()[1];
        assert!(matches!(p.vn_unitary(&BoundaryCondition::reference(2), 0.0), Err(BecError::Input(_))));
    }

    #[test]
    fn dirac_edge_eigenvalue_is_a_zero() {
        let p = &problems()[1];
        // t = ln 2 gives λ(0) = tanh(ln 2) = 0.6
        assert!(p.boundary_singularity(&dirac_a(2.0), 0.0, 0.6).unwrap() < 1e-12);
        assert!(p.boundary_singularity(&dirac_a(2.0), 0.0, 0.1).unwrap() > 1e-3);
    }
}
