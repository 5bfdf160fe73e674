use std::f64::consts::PI;

use crate::error::{BecError, Result};
use crate::extension::{BoundaryCondition, BoundaryOperator, EdgeProblem};
use crate::numerics::herm_eig;
use crate::symbol::Symbol;

/// Singularity level below which a refined minimum counts as an edge eigenvalue.
pub const ACCEPT: f64 = 1e-6;

/// Accuracy of refined edge eigenvalues, relative to `1 + |λ|`.
pub const REFINE_TOL: f64 = 1e-10;

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Maximizes `f` on `[a, b]`; non-finite values count as `−∞`.
fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let g = |x: f64| {
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (g(x1), g(x2));
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = g(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = g(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Minimizes `f` on `[a, b]`; non-finite values count as `+∞`.
pub(crate) fn golden_min(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_max(&|x| -f(x), a, b, tol);
    (x, -v)
}

fn symbol_side_gap(s: &Symbol, k: f64, around: f64) -> Result<(Option<f64>, Option<f64>)> {
    const SAMPLES: usize = 129;
    let scale = 1.0 + k.abs();
    let ky_of = |theta: f64| scale * theta.tan();
    let thetas: Vec<f64> = (0..SAMPLES).map(|i| -PI / 2.0 + PI * (i as f64 + 0.5) / SAMPLES as f64).collect();
    let tol = 1e-12 * (1.0 + around.abs());
    let mut below: Option<(f64, usize)> = None;
    let mut above: Option<(f64, usize)> = None;
    let mut sides = vec![(false, false); s.dim()];
    for (i, &t) in thetas.iter().enumerate() {
        let e = herm_eig(&s.eval(k, ky_of(t)))?;
        for (b, &v) in e.values.iter().enumerate() {
            if (v - around).abs() <= tol {
                return Err(BecError::NoGap { around });
            }
            if v < around {
                sides[b].0 = true;
                if below.is_none_or(|(x, _)| v > x) {
                    below = Some((v, i));
                }
            } else {
                sides[b].1 = true;
                if above.is_none_or(|(x, _)| v < x) {
                    above = Some((v, i));
                }
            }
        }
    }
    if sides.iter().any(|&(lo, hi)| lo && hi) {
        return Err(BecError::NoGap { around });
    }
    let bracket = |i: usize| {
        let a = if i == 0 { -PI / 2.0 + 1e-9 } else { thetas[i - 1] };
        let b = if i + 1 == SAMPLES { PI / 2.0 - 1e-9 } else { thetas[i + 1] };
        (a, b)
    };
    let top_below = |t: f64| -> f64 {
        match herm_eig(&s.eval(k, ky_of(t))) {
            Ok(e) => e.values.into_iter().filter(|&v| v < around).fold(f64::NEG_INFINITY, f64::max),
            Err(_) => f64::NAN,
        }
    };
    let bottom_above = |t: f64| -> f64 {
        match herm_eig(&s.eval(k, ky_of(t))) {
            Ok(e) => e.values.into_iter().filter(|&v| v >= around).fold(f64::INFINITY, f64::min),
            Err(_) => f64::NAN,
        }
    };
    let lo = below.map(|(v, i)| {
        let (a, b) = bracket(i);
        v.max(golden_max(&top_below, a, b, 1e-12).1)
    });
    let hi = above.map(|(v, i)| {
        let (a, b) = bracket(i);
        v.min(golden_min(&bottom_above, a, b, 1e-12).1)
    });
    Ok((lo, hi))
}

/// Interval around `around` free of bulk spectrum of every half-space symbol at boundary momentum `k`.
///
/// A side without spectrum is cut off at distance `far`.
pub fn fiber_gap(p: &EdgeProblem, k: f64, around: f64, far: f64) -> Result<(f64, f64)> {
    let mut lo = around - far;
    let mut hi = around + far;
    for s in std::iter::once(&p.plus).chain(p.minus.as_ref()) {
        let (l, h) = symbol_side_gap(s, k, around)?;
        if let Some(l) = l {
            lo = lo.max(l);
        }
        if let Some(h) = h {
            hi = hi.min(h);
        }
    }
    Ok((lo, hi))
}

pub(crate) fn singularity(p: &EdgeProblem, op: &BoundaryOperator, lambda: f64) -> Result<f64> {
    match p.singularity_with(op, lambda) {
        Ok(v) => Ok(v),
        Err(
            BecError::BandEdge { .. }
            | BecError::BoundaryOfRegularity { .. }
            | BecError::DegenerateExponent { .. }
            | BecError::NumericalFailure(_),
        ) => Ok(f64::NAN),
        Err(e) => Err(e),
    }
}

/// Chebyshev nodes on `(lo, hi)` in increasing order.
fn chebyshev_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (c, h) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
    (0..n).rev().map(|i| c + h * (PI * (i as f64 + 0.5) / n as f64).cos()).collect()
}

/// Indices of local minima of a sampled function; `NaN` counts as `+∞`.
pub(crate) fn local_minima(values: &[f64]) -> Vec<usize> {
    let at = |i: isize| -> f64 {
        match usize::try_from(i).ok().and_then(|i| values.get(i)) {
            Some(v) if !v.is_nan() => *v,
            _ => f64::INFINITY,
        }
    };
    (0..values.len())
        .filter(|&i| {
            let v = at(i as isize);
            v.is_finite() && v < at(i as isize - 1) && v <= at(i as isize + 1)
        })
        .collect()
}

/// Edge eigenvalues at boundary momentum `k` inside `gap`, found as zeros of the boundary matrix.
pub fn edge_eigenvalues(
    p: &EdgeProblem,
    bc: &BoundaryCondition,
    k: f64,
    gap: (f64, f64),
    resolution: usize,
) -> Result<Vec<f64>> {
    if resolution < 8 {
        return Err(BecError::Input(format!("energy resolution {resolution} below 8")));
    }
    bc.check_admissible(k)?;
    let op = p.boundary_operator(bc, k)?;
    let nodes = chebyshev_nodes(gap.0, gap.1, resolution);
    let values = nodes.iter().map(|&l| singularity(p, &op, l)).collect::<Result<Vec<_>>>()?;
    let mut out: Vec<f64> = Vec::new();
    for i in local_minima(&values) {
        let a = if i == 0 { gap.0 } else { nodes[i - 1] };
        let b = if i + 1 == nodes.len() { gap.1 } else { nodes[i + 1] };
        let f = |l: f64| singularity(p, &op, l).unwrap_or(f64::NAN);
        let (x, v) = golden_min(&f, a, b, REFINE_TOL * (1.0 + nodes[i].abs()));
        if v < ACCEPT {
            out.push(x);
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-8 * (1.0 + b.abs()));
    Ok(out)
}

/// Touch point `(k*, λ*)` where the half-line Dirac edge band for `ψ1 = aψ2` meets the bulk.
///
/// `None` when `a = ±1`, whose band never meets the bulk.
pub fn dirac_touch_point(m: f64, a: f64) -> Result<Option<(f64, f64)>> {
    if m == 0.0 || a == 0.0 || !a.is_finite() || !m.is_finite() {
        return Err(BecError::Domain(format!("touch point needs m != 0 and finite a != 0, got m = {m}, a = {a}")));
    }
    let t = a.abs().ln();
    if t == 0.0 {
        return Ok(None);
    }
    let k = m * a.signum() / t.sinh();
    Ok(Some((k, m / t.tanh())))
}

/// Closed-form half-line Dirac edge band `λ(k) = m tanh t + k sgn(a) / cosh t` with `t = ln|a|`.
pub fn dirac_edge_band(m: f64, a: f64, k: f64) -> f64 {
    let t = a.abs().ln();
    m * t.tanh() + k * a.signum() / t.cosh()
}
