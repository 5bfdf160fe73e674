use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{BecError, Result};
use crate::extension::{BoundaryCondition, EdgeProblem};
use crate::numerics::phase::phase_increment;
use crate::numerics::svd::norm2;
use crate::numerics::CMatrix;

/// Largest boundary momentum sampled.
pub const K_CAP: f64 = 1e4;
/// Phase steps above this are bisected.
const MAX_STEP: f64 = PI / 4.0;
/// A winding is accepted when the raw phase count is this close to an integer.
pub const INTEGER_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindingResult {
    /// Calibrated integer, equal to the spectral-flow difference it represents.
    pub value: i64,
    /// Phase winding of the determinant over `[−K_CAP, K_CAP]` in units of `2π`.
    pub raw: f64,
    pub residual: f64,
    pub samples: usize,
}

fn k_of(s: f64) -> f64 {
    (0.5 * PI * s).tan()
}

/// Phase winding of a unimodular `f` over `[−cap, cap]`, sampled adaptively in a compactified variable.
pub fn phase_winding<F>(f: &F, cap: f64) -> Result<(f64, usize)>
where
    F: Fn(f64) -> Result<Complex64> + Sync,
{
    let s_max = 2.0 / PI * cap.atan();
    const BASE: usize = 257;
    let nodes: Vec<f64> = (0..BASE).map(|i| -s_max + 2.0 * s_max * i as f64 / (BASE - 1) as f64).collect();
    let unit = |s: f64| -> Result<Complex64> {
        let z = f(k_of(s))?;
        if !z.is_finite() || z.norm() == 0.0 {
            return Err(BecError::NumericalFailure(format!("determinant vanished at k = {}", k_of(s))));
        }
        Ok(z / z.norm())
    };
    let values: Vec<Complex64> = nodes.par_iter().map(|&s| unit(s)).collect::<Result<_>>()?;
    let mut total = 0.0;
    let mut count = BASE;
    for i in 0..BASE - 1 {
        // depth-first bisection of each base interval
        let mut stack = vec![(nodes[i], values[i], nodes[i + 1], values[i + 1], 0u32)];
        while let Some((a, za, b, zb, depth)) = stack.pop() {
            let d = phase_increment(za, zb);
            if d.abs() < MAX_STEP {
                total += d;
                continue;
            }
            if depth >= 40 {
                return Err(BecError::InsufficientResolution { index: i, jump: d.abs() });
            }
            let m = 0.5 * (a + b);
            let zm = unit(m)?;
            count += 1;
            stack.push((m, zm, b, zb, depth + 1));
            stack.push((a, za, m, zm, depth + 1));
        }
    }
    Ok((total / (2.0 * PI), count))
}

fn calibrate(raw: f64, samples: usize) -> Result<WindingResult> {
    let nearest = raw.round();
    let residual = (raw - nearest).abs();
    if residual >= INTEGER_TOL {
        return Err(BecError::NumericalFailure(format!(
            "phase winding {raw:.4} is not close to an integer; the condition may not be affiliated"
        )));
    }
    Ok(WindingResult { value: -(nearest as i64), raw, residual, samples })
}

fn unimodular_det(u: &CMatrix, k: f64) -> Result<Complex64> {
    let d = u.det();
    if (d.norm() - 1.0).abs() > 1e-6 {
        return Err(BecError::ContractViolation(format!("|det U| = {:.8} at k = {k} is not 1", d.norm())));
    }
    Ok(d)
}

/// Winding of `det U` relative to the reference extension `(A, B) = (1, 0)`.
pub fn winding(p: &EdgeProblem, bc: &BoundaryCondition) -> Result<WindingResult> {
    let ends = (p.vn_unitary(bc, -K_CAP)?, p.vn_unitary(bc, K_CAP)?);
    let spread = norm2(&(&ends.1 - &ends.0));
    if spread > INTEGER_TOL {
        return Err(BecError::NotComparable(format!(
            "{}: U(-{K_CAP:e}) and U({K_CAP:e}) differ by {spread:.3}; the condition is not affiliated",
            bc.label
        )));
    }
    let f = |k: f64| -> Result<Complex64> { unimodular_det(&p.vn_unitary(bc, k)?, k) };
    let (raw, samples) = phase_winding(&f, K_CAP)?;
    calibrate(raw, samples)
}

/// Winding of `det(U1 U2⁻¹)`; equals `SF(bc1) − SF(bc2)`.
pub fn relative_winding(p: &EdgeProblem, bc1: &BoundaryCondition, bc2: &BoundaryCondition) -> Result<WindingResult> {
    let id = CMatrix::identity(p.dim_v());
    for k in [-K_CAP, K_CAP] {
        let rel = &p.vn_unitary(bc1, k)? * &p.vn_unitary(bc2, k)?.inverse()?;
        let dist = norm2(&(&rel - &id));
        if dist > INTEGER_TOL {
            return Err(BecError::NotComparable(format!(
                "{} and {} differ at k = {k}: |U1 U2^-1 - 1| = {dist:.3}",
                bc1.label, bc2.label
            )));
        }
    }
    let f = |k: f64| -> Result<Complex64> {
        let d1 = unimodular_det(&p.vn_unitary(bc1, k)?, k)?;
        let d2 = unimodular_det(&p.vn_unitary(bc2, k)?, k)?;
        Ok(d1 * d2.conj())
    };
    let (raw, samples) = phase_winding(&f, K_CAP)?;
    calibrate(raw, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    #[test]
    fn winding_of_moebius_phase() {
        // (k − i)/(k + i) winds once counterclockwise as k runs over the real line
        let f = |k: f64| -> Result<Complex64> { Ok((c(k, -1.0)) / c(k, 1.0)) };
        let (raw, _) = phase_winding(&f, 1e8).unwrap();
        assert!((raw - 1.0).abs() < 1e-6, "{raw}");
    }

    #[test]
    fn fast_oscillation_is_resolved() {
        let f = |k: f64| -> Result<Complex64> { Ok(Complex64::from_polar(1.0, 100.0 * (k / (1.0 + k * k).sqrt()))) };
        let (raw, n) = phase_winding(&f, 1e4).unwrap();
        assert!((raw - 200.0 * (1e4 / (1e8f64 + 1.0).sqrt()) / (2.0 * PI)).abs() < 1e-9, "{raw}");
        assert!(n > 257);
    }

    #[test]
    fn non_integer_is_rejected() {
        assert!(calibrate(0.3, 10).is_err());
        assert_eq!(calibrate(-1.01, 10).unwrap().value, 1);
    }
}
