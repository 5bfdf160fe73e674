use std::fmt;

use super::descriptor::{Geometry, ModelDescriptor, ModelKind};
use crate::edge::{relative_winding, spectral_flow_direct, EdgeOptions};
use crate::error::Result;
use crate::extension::{affiliation_check, BoundaryCondition, Verdict};
use crate::symbol::{chern, relative_chern};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped(String),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => write!(f, "PASS"),
            Status::Fail => write!(f, "FAIL"),
            Status::Skipped(why) => write!(f, "SKIPPED({why})"),
        }
    }
}

/// Bulk side of the corrected correspondence: `SF(bc) = bulk + wind(bc, reference)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BulkCheck {
    /// Chern number or relative Chern number of the bulk symbols.
    pub value: f64,
    pub residual: f64,
    /// Winding of the condition relative to the model's reference extension.
    pub wind_to_reference: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correspondence {
    pub condition: String,
    pub reference: String,
    pub verdicts: (Verdict, Verdict),
    pub sf: Option<i64>,
    pub sf_ref: Option<i64>,
    pub wind: Option<i64>,
    pub wind_residual: Option<f64>,
    pub bulk: Option<BulkCheck>,
    pub warnings: Vec<String>,
    pub status: Status,
}

/// Checks `SF(bc) − SF(bc_ref) = wind(U_bc U_ref⁻¹)`, and optionally the bulk-corrected identity.
#[allow(clippy::too_many_arguments)]
pub fn verify_pair(
    model: &ModelDescriptor,
    geometry: Geometry,
    bc: &BoundaryCondition,
    bc_ref: &BoundaryCondition,
    energy: f64,
    opts: &EdgeOptions,
    with_bulk: bool,
    tol: f64,
) -> Result<Correspondence> {
    let prob = model.problem(geometry)?;
    let verdicts = (affiliation_check(&prob, bc)?.verdict, affiliation_check(&prob, bc_ref)?.verdict);
    let mut out = Correspondence {
        condition: bc.label.clone(),
        reference: bc_ref.label.clone(),
        verdicts,
        sf: None,
        sf_ref: None,
        wind: None,
        wind_residual: None,
        bulk: None,
        warnings: Vec::new(),
        status: Status::Fail,
    };
    for (v, label) in [(verdicts.0, &bc.label), (verdicts.1, &bc_ref.label)] {
        if v != Verdict::Affiliated {
            out.status = Status::Skipped(format!("{label} is {v}"));
            return Ok(out);
        }
    }
    let f1 = spectral_flow_direct(&prob, bc, energy, opts)?;
    let f2 = spectral_flow_direct(&prob, bc_ref, energy, opts)?;
    let w = relative_winding(&prob, bc, bc_ref)?;
    out.warnings.extend(f1.warnings.iter().chain(&f2.warnings).cloned());
    out.sf = Some(f1.value);
    out.sf_ref = Some(f2.value);
    out.wind = Some(w.value);
    out.wind_residual = Some(w.residual);
    let mut ok = !f1.flagged && !f2.flagged && f1.value - f2.value == w.value;
    if with_bulk {
        let bulk = match (model.kind, geometry) {
            (ModelKind::DiracInterface { .. } | ModelKind::Dirac { .. }, Geometry::Interface) => {
                let minus = &model.interface.as_ref().expect("interface geometry").minus;
                Some(relative_chern(&model.symbol, minus, energy, tol)?)
            }
            (ModelKind::RegularizedDirac { .. }, Geometry::Halfline) => Some(chern(&model.symbol, energy, tol)?),
            _ => None,
        };
        match bulk {
            Some(b) => {
                let reference = model.reference_condition(geometry)?;
                let wr = relative_winding(&prob, bc, &reference)?.value;
                let holds = b.residual < tol.max(1e-3) && f1.value == b.nearest_integer() + wr;
                out.warnings.extend(b.warnings.iter().cloned());
                out.bulk = Some(BulkCheck { value: b.value, residual: b.residual, wind_to_reference: wr, holds });
                ok &= holds;
            }
            None => out.warnings.push(format!("no bulk invariant is defined for {} in this geometry", model.name)),
        }
    }
    out.status = if ok { Status::Pass } else { Status::Fail };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{dirac, dirac_interface, laplacian, Params};

    fn p(pairs: &[(&str, f64)]) -> Params {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn not_affiliated_pairs_are_skipped() {
        let lap = laplacian();
        let bc = lap.boundary_condition("klm", &p(&[("K", 0.0), ("l", 1.0), ("M", 1.0)])).unwrap();
        let d = lap.reference_condition(Geometry::Halfline).unwrap();
        let r = verify_pair(&lap, Geometry::Halfline, &bc, &d, -1.0, &lap.edge_options(), false, 1e-6).unwrap();
        assert!(matches!(r.status, Status::Skipped(_)), "{:?}", r.status);
    }

    #[test]
    fn dirac_half_line_pair() {
        let d = dirac(1.0).unwrap();
        let bc = d.boundary_condition("a", &p(&[("a", -2.0)])).unwrap();
        let bc_ref = d.boundary_condition("a", &p(&[("a", 0.5)])).unwrap();
        let opts = EdgeOptions { k_window: 10.0, k_resolution: 401, ..EdgeOptions::default() };
        let r = verify_pair(&d, Geometry::Halfline, &bc, &bc_ref, 0.0, &opts, false, 1e-6).unwrap();
        assert_eq!((r.sf, r.sf_ref, r.wind), (Some(0), Some(1), Some(-1)));
        assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn transparent_interface_with_bulk_term() {
        let d = dirac_interface(1.0, -1.0).unwrap();
        let t = d.reference_condition(Geometry::Interface).unwrap();
        let bc = d.boundary_condition("decoupled", &p(&[("a_plus", 2.0), ("a_minus", 0.5)])).unwrap();
        let opts = EdgeOptions { k_window: 10.0, k_resolution: 401, ..EdgeOptions::default() };
        let r = verify_pair(&d, Geometry::Interface, &bc, &t, 0.0, &opts, true, 1e-4).unwrap();
        assert_eq!(r.sf_ref, Some(1));
        assert_eq!(r.status, Status::Pass, "{r:?}");
    }
}
