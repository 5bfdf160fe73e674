use std::collections::BTreeMap;

use num_complex::Complex64;

use super::symbols;
use crate::edge::EdgeOptions;
use crate::error::{BecError, Result};
use crate::extension::{
    dirac_halfline_triple, dirac_interface_triple, laplacian_triple, regularized_dirac_triple, BoundaryCondition,
    BoundaryTriple, Converter, EdgeProblem, Klm,
};
use crate::numerics::{c, CMatrix};
use crate::symbol::{GapWindow, Symbol};

/// Parameters of a model or a boundary-condition family, keyed by name.
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    Laplacian,
    Dirac { m: f64 },
    DiracInterface { m_plus: f64, m_minus: f64 },
    RegularizedDirac { m: f64, eps_reg: f64 },
    ShallowWater { f: f64, nu: f64 },
    /// A symbol supplied by the user.
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Halfline,
    Interface,
}

/// A named, parametrized generator of boundary conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct BcFamily {
    pub name: &'static str,
    pub params: &'static [&'static str],
    pub geometry: Geometry,
    pub description: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceData {
    pub minus: Symbol,
    pub triple: BoundaryTriple,
}

/// A shipped model with its traces, condition families and fiducial data.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDescriptor {
    pub name: String,
    pub kind: ModelKind,
    pub symbol: Symbol,
    pub halfline: Option<BoundaryTriple>,
    pub interface: Option<InterfaceData>,
    pub converter: Option<Converter>,
    pub bc_families: Vec<BcFamily>,
    pub declared_gap: Option<GapWindow>,
    pub fiducial_e: f64,
    /// Energy scale of the bulk gap; sets the default momentum window.
    pub gap_scale: f64,
}

const LAPLACIAN_FAMILIES: &[BcFamily] = &[
    BcFamily { name: "dirichlet", params: &[], geometry: Geometry::Halfline, description: "psi(0) = 0" },
    BcFamily { name: "neumann", params: &[], geometry: Geometry::Halfline, description: "psi'(0) = 0" },
    BcFamily {
        name: "klm",
        params: &["K", "l", "M"],
        geometry: Geometry::Halfline,
        description: "K psi + L d_x psi + M d_y psi = 0 with real l = iL",
    },
];

const DIRAC_FAMILIES: &[BcFamily] = &[
    BcFamily { name: "reference", params: &[], geometry: Geometry::Halfline, description: "psi_1(0) = psi_2(0)" },
    BcFamily { name: "a", params: &["a"], geometry: Geometry::Halfline, description: "psi_1(0) = a psi_2(0)" },
    BcFamily {
        name: "transparent",
        params: &[],
        geometry: Geometry::Interface,
        description: "psi(0+) = psi(0-)",
    },
    BcFamily {
        name: "decoupled",
        params: &["a_plus", "a_minus"],
        geometry: Geometry::Interface,
        description: "psi_1(0+) = a_plus psi_2(0+), psi_1(0-) = a_minus psi_2(0-)",
    },
];

const REGULARIZED_FAMILIES: &[BcFamily] = &[
    BcFamily { name: "dirichlet", params: &[], geometry: Geometry::Halfline, description: "psi(0) = 0" },
    BcFamily {
        name: "a",
        params: &["a"],
        geometry: Geometry::Halfline,
        description: "psi_1(0) = 0, i a d_x psi_2(0) = d_y psi_2(0)",
    },
];

fn require_param(params: &Params, key: &str) -> Result<f64> {
    let v = *params.get(key).ok_or_else(|| BecError::Input(format!("missing parameter `{key}`")))?;
    if v.is_nan() {
        return Err(BecError::Input(format!("parameter `{key}` is NaN")));
    }
    Ok(v)
}

fn reject_unknown(params: &Params, allowed: &[&str], what: &str) -> Result<()> {
    for key in params.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(BecError::Input(format!("unknown parameter `{key}` for {what}")));
        }
    }
    Ok(())
}

fn finite(v: f64, key: &str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(BecError::Input(format!("parameter `{key}` must be finite")))
    }
}

fn r(x: f64) -> Complex64 {
    c(x, 0.0)
}

/// `−Δ` on the plane.
pub fn laplacian() -> ModelDescriptor {
    let opts = EdgeOptions::default();
    ModelDescriptor {
        name: "laplacian".into(),
        kind: ModelKind::Laplacian,
        symbol: symbols::laplacian(),
        halfline: Some(laplacian_triple()),
        interface: None,
        converter: Some(Converter::Laplacian),
        bc_families: LAPLACIAN_FAMILIES.to_vec(),
        declared_gap: Some(GapWindow::declared(-opts.far_cutoff(), 0.0).expect("nonempty")),
        fiducial_e: -1.0,
        gap_scale: 1.0,
    }
}

/// Massive Dirac operator with half-line and interface traces; both sides carry mass `m`.
pub fn dirac(m: f64) -> Result<ModelDescriptor> {
    let mut d = dirac_interface(m, m)?;
    d.name = "dirac".into();
    d.kind = ModelKind::Dirac { m };
    d.halfline = Some(dirac_halfline_triple());
    d.bc_families = DIRAC_FAMILIES.to_vec();
    Ok(d)
}

/// Dirac operator with mass `m_plus` on `y > 0` and `m_minus` on `y < 0`.
pub fn dirac_interface(m_plus: f64, m_minus: f64) -> Result<ModelDescriptor> {
    for (m, key) in [(m_plus, "m_plus"), (m_minus, "m_minus")] {
        if m == 0.0 || !m.is_finite() {
            return Err(BecError::Domain(format!("Dirac mass {key} must be finite and nonzero, got {m}")));
        }
    }
    let g = m_plus.abs().min(m_minus.abs());
    Ok(ModelDescriptor {
        name: "dirac-interface".into(),
        kind: ModelKind::DiracInterface { m_plus, m_minus },
        symbol: symbols::dirac(m_plus),
        halfline: None,
        interface: Some(InterfaceData { minus: symbols::dirac(m_minus), triple: dirac_interface_triple() }),
        converter: None,
        bc_families: DIRAC_FAMILIES.iter().filter(|f| f.geometry == Geometry::Interface).cloned().collect(),
        declared_gap: Some(GapWindow::declared(-g, g)?),
        fiducial_e: 0.0,
        gap_scale: g,
    })
}

/// Dirac operator with the `ε|k|²σ_z` regularization, `0 < |ε| < |m|/2`.
pub fn regularized_dirac(m: f64, eps_reg: f64) -> Result<ModelDescriptor> {
    if !(m.is_finite() && eps_reg.is_finite()) || m == 0.0 {
        return Err(BecError::Domain(format!("regularized Dirac needs finite m != 0, got m = {m}")));
    }
    if eps_reg == 0.0 || eps_reg.abs() >= 0.5 * m.abs() {
        return Err(BecError::Domain(format!(
            "regularized Dirac needs 0 < |eps_reg| < |m|/2, got eps_reg = {eps_reg}, m = {m}"
        )));
    }
    Ok(ModelDescriptor {
        name: "regdirac".into(),
        kind: ModelKind::RegularizedDirac { m, eps_reg },
        symbol: symbols::regularized_dirac(m, eps_reg),
        halfline: Some(regularized_dirac_triple(eps_reg)),
        interface: None,
        converter: Some(Converter::RegularizedDirac { eps: eps_reg }),
        bc_families: REGULARIZED_FAMILIES.to_vec(),
        declared_gap: Some(GapWindow::declared(-m.abs(), m.abs())?),
        fiducial_e: 0.0,
        gap_scale: m.abs(),
    })
}

/// Rotating shallow water with odd viscosity; bulk computations only.
pub fn shallow_water(f: f64, nu: f64) -> Result<ModelDescriptor> {
    if f == 0.0 || !f.is_finite() || !nu.is_finite() {
        return Err(BecError::Domain(format!("shallow water needs finite f != 0 and finite nu, got f = {f}, nu = {nu}")));
    }
    Ok(ModelDescriptor {
        name: "shallow-water".into(),
        kind: ModelKind::ShallowWater { f, nu },
        symbol: symbols::shallow_water(f, nu),
        halfline: None,
        interface: None,
        converter: None,
        bc_families: Vec::new(),
        declared_gap: Some(GapWindow::declared(0.0, f.abs())?),
        fiducial_e: 0.5 * f.abs(),
        gap_scale: f.abs(),
    })
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: &[&str] = &["laplacian", "dirac", "dirac-interface", "regdirac", "shallow-water"];

/// Looks up a shipped model by name.
pub fn builtin(name: &str, params: &Params) -> Result<ModelDescriptor> {
    match name {
        "laplacian" => {
            reject_unknown(params, &[], name)?;
            Ok(laplacian())
        }
        "dirac" => {
            reject_unknown(params, &["m"], name)?;
            dirac(require_param(params, "m")?)
        }
        "dirac-interface" => {
            reject_unknown(params, &["m_plus", "m_minus"], name)?;
            dirac_interface(require_param(params, "m_plus")?, require_param(params, "m_minus")?)
        }
        "regdirac" => {
            reject_unknown(params, &["m", "eps_reg"], name)?;
            regularized_dirac(require_param(params, "m")?, require_param(params, "eps_reg")?)
        }
        "shallow-water" => {
            reject_unknown(params, &["f", "nu"], name)?;
            shallow_water(require_param(params, "f")?, require_param(params, "nu")?)
        }
        other => Err(BecError::Input(format!(
            "unknown model `{other}`; expected one of {}",
            BUILTIN_NAMES.join(", ")
        ))),
    }
}

/// `ψ1(0) = aψ2(0)` in the half-line Dirac traces; `a = ±∞` gives `ψ2(0) = 0`.
pub fn dirac_a_condition(a: f64) -> Result<BoundaryCondition> {
    if a.is_nan() {
        return Err(BecError::Input("a is NaN".into()));
    }
    let (ca, cb) = if a.is_infinite() { (0.5, -1.0) } else { (0.5 * (1.0 + a), 1.0 - a) };
    BoundaryCondition::constant(format!("a={a}"), CMatrix::scalar(r(ca)), CMatrix::scalar(r(cb)))
}

/// Independent half-line conditions on both sides of a Dirac interface.
pub fn dirac_decoupled_condition(a_plus: f64, a_minus: f64) -> Result<BoundaryCondition> {
    let a_plus = finite(a_plus, "a_plus")?;
    let a_minus = finite(a_minus, "a_minus")?;
    let a = CMatrix::from_real_rows(&[&[-0.5, 0.5 * a_plus], &[0.5, -0.5 * a_minus]])?;
    let b = CMatrix::from_real_rows(&[&[a_plus, 1.0], &[a_minus, 1.0]])?;
    BoundaryCondition::constant(format!("decoupled(a+={a_plus}, a-={a_minus})"), a, b)
}

/// Laplacian condition `Kψ(0) + ℓkψ(0) + Mψ′(0) = 0` from real `(K, ℓ = iL, M)`.
pub fn laplacian_klm_condition(k: f64, l: f64, m: f64) -> Result<BoundaryCondition> {
    let klm = Klm { k: CMatrix::scalar(r(k)), l: CMatrix::scalar(c(0.0, -l)), m: CMatrix::scalar(r(m)) };
    BoundaryCondition::from_klm(format!("klm(K={k}, l={l}, M={m})"), Converter::Laplacian, klm)
}

/// The regularized Dirac family `ψ1(0) = 0`, `ia∂_xψ2(0) = ∂_yψ2(0)`.
pub fn regularized_a_condition(eps_reg: f64, a: f64) -> Result<BoundaryCondition> {
    let a = finite(a, "a")?;
    let klm = Klm {
        k: CMatrix::diag(&[r(1.0), r(0.0)]),
        l: CMatrix::diag(&[r(0.0), c(0.0, a)]),
        m: CMatrix::diag(&[r(0.0), r(1.0)]),
    };
    BoundaryCondition::from_klm(format!("a={a}"), Converter::RegularizedDirac { eps: eps_reg }, klm)
}

impl ModelDescriptor {
    pub fn family(&self, name: &str) -> Result<&BcFamily> {
        self.bc_families.iter().find(|f| f.name == name).ok_or_else(|| {
            let names: Vec<_> = self.bc_families.iter().map(|f| f.name).collect();
            BecError::Input(format!(
                "model `{}` has no boundary family `{name}`; available: {}",
                self.name,
                if names.is_empty() { "none".to_string() } else { names.join(", ") }
            ))
        })
    }

    /// Instantiates a member of one of the model's families.
    pub fn boundary_condition(&self, family: &str, params: &Params) -> Result<BoundaryCondition> {
        let fam = self.family(family)?;
        reject_unknown(params, fam.params, &format!("boundary family `{family}`"))?;
        let get = |k: &str| require_param(params, k);
        match (self.kind, family) {
            (ModelKind::Laplacian, "dirichlet") => laplacian_klm_condition(1.0, 0.0, 0.0),
            (ModelKind::Laplacian, "neumann") => laplacian_klm_condition(0.0, 0.0, 1.0),
            (ModelKind::Laplacian, "klm") => {
                laplacian_klm_condition(finite(get("K")?, "K")?, finite(get("l")?, "l")?, finite(get("M")?, "M")?)
            }
            (ModelKind::Dirac { .. }, "reference") => dirac_a_condition(1.0),
            (ModelKind::Dirac { .. }, "a") => dirac_a_condition(get("a")?),
            (_, "transparent") => Ok(BoundaryCondition::reference(2)),
            (_, "decoupled") => dirac_decoupled_condition(get("a_plus")?, get("a_minus")?),
            (ModelKind::RegularizedDirac { .. }, "dirichlet") => Ok(BoundaryCondition::reference(2)),
            (ModelKind::RegularizedDirac { eps_reg, .. }, "a") => regularized_a_condition(eps_reg, get("a")?),
            _ => Err(BecError::Input(format!("family `{family}` is not available for `{}`", self.name))),
        }
    }

    /// Local `(K, L, M)` data through the model's converter.
    pub fn klm_condition(&self, label: &str, klm: Klm) -> Result<BoundaryCondition> {
        let conv = self.converter.ok_or_else(|| {
            BecError::UnsupportedConversion(format!("model `{}` ships no (K, L, M) converter", self.name))
        })?;
        BoundaryCondition::from_klm(label, conv, klm)
    }

    /// The extension `(A, B) = (1, 0)` of the given geometry.
    pub fn reference_condition(&self, geometry: Geometry) -> Result<BoundaryCondition> {
        let p = self.problem(geometry)?;
        let mut bc = BoundaryCondition::reference(p.dim_v());
        bc.label = match (self.kind, geometry) {
            (ModelKind::Laplacian | ModelKind::RegularizedDirac { .. }, _) => "dirichlet".into(),
            (_, Geometry::Interface) => "transparent".into(),
            _ => "reference".into(),
        };
        Ok(bc)
    }

    pub fn geometry_of(&self, family: &str) -> Result<Geometry> {
        Ok(self.family(family)?.geometry)
    }

    pub fn problem(&self, geometry: Geometry) -> Result<EdgeProblem> {
        match geometry {
            Geometry::Halfline => {
                let t = self.halfline.clone().ok_or_else(|| {
                    BecError::Input(format!("model `{}` ships no half-line boundary triple", self.name))
                })?;
                EdgeProblem::halfline(self.symbol.clone(), t)
            }
            Geometry::Interface => {
                let d = self.interface.clone().ok_or_else(|| {
                    BecError::Input(format!("model `{}` ships no interface triple", self.name))
                })?;
                EdgeProblem::interface(self.symbol.clone(), d.minus, d.triple)
            }
        }
    }

    /// Default sampling: a momentum window of `20·max(1, gap scale)`.
    pub fn edge_options(&self) -> EdgeOptions {
        EdgeOptions { k_window: 20.0 * self.gap_scale.max(1.0), ..EdgeOptions::default() }
    }
}
