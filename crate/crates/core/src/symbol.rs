//! Matrix polynomial symbols, their fibers along the boundary, bulk gaps, and Chern pairings.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{BecError, Result};
use crate::numerics::quad::{quad_2d, QuadOptions, QuadResult};
use crate::numerics::{herm_eig, CMatrix};

pub const MAX_DEGREE: u32 = 4;

/// Matrix-valued polynomial `H(k1, k2) = Σ c_ab k1^a k2^b` with Hermitian coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    n: usize,
    terms: BTreeMap<(u32, u32), CMatrix>,
}

impl Symbol {
    pub fn new(n: usize) -> Self {
        Symbol { n, terms: BTreeMap::new() }
    }

    /// Adds `coeff · k1^a k2^b`, accumulating onto an existing term.
    pub fn add_term(&mut self, a: u32, b: u32, coeff: CMatrix) -> Result<()> {
        if coeff.rows() != self.n || coeff.cols() != self.n {
            return Err(BecError::Domain(format!(
                "term ({a},{b}) has shape {}x{}, expected {}x{}",
                coeff.rows(),
                coeff.cols(),
                self.n,
                self.n
            )));
        }
        if a + b > MAX_DEGREE {
            return Err(BecError::Domain(format!("term ({a},{b}) exceeds total degree {MAX_DEGREE}")));
        }
        if !coeff.is_hermitian() {
            return Err(BecError::Domain(format!("coefficient of ({a},{b}) is not Hermitian")));
        }
        let entry = self.terms.entry((a, b)).or_insert_with(|| CMatrix::zeros(self.n, self.n));
        *entry = &*entry + &coeff;
        if entry.max_abs() == 0.0 {
            self.terms.remove(&(a, b));
        }
        Ok(())
    }

    pub fn with_term(mut self, a: u32, b: u32, coeff: CMatrix) -> Result<Self> {
        self.add_term(a, b, coeff)?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<(u32, u32), CMatrix> {
        &self.terms
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    /// Highest power of `k2` present, i.e. the order of the fiber operator.
    pub fn order(&self) -> usize {
        self.terms.keys().map(|&(_, b)| b as usize).max().unwrap_or(0)
    }

    /// The same symbol shifted by `delta` times the identity.
    pub fn shifted(&self, delta: f64) -> Symbol {
        let mut s = self.clone();
        s.add_term(0, 0, CMatrix::identity(self.n).scale_re(delta)).expect("identity shift is Hermitian");
        s
    }

    pub fn eval(&self, k1: f64, k2: f64) -> CMatrix {
        let mut h = CMatrix::zeros(self.n, self.n);
        for (&(a, b), c) in &self.terms {
            let w = k1.powi(a as i32) * k2.powi(b as i32);
            h = &h + &c.scale_re(w);
        }
        h
    }

    /// Largest coefficient magnitude, used as an energy scale.
    pub fn scale(&self) -> f64 {
        self.terms.values().map(|c| c.max_abs()).fold(0.0, f64::max)
    }
}

pub fn eval_symbol(s: &Symbol, k1: f64, k2: f64) -> CMatrix {
    s.eval(k1, k2)
}

/// One-dimensional matrix ODE `Σ_j D_j ∂_y^j` at fixed boundary momentum `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberOperator {
    pub k: f64,
    pub n: usize,
    /// Coefficients `D_0 … D_order`.
    pub d: Vec<CMatrix>,
}

impl FiberOperator {
    pub fn order(&self) -> usize {
        self.d.len() - 1
    }

    /// `Σ_j D_j (−μ)^j − z`, the matrix acting on the amplitude of `e^{−μy}`.
    pub fn matrix_at(&self, mu: Complex64, z: Complex64) -> CMatrix {
        let n = self.n;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        let mut p = Complex64::new(1.0, 0.0);
        for dj in &self.d {
            for (x, y) in data.iter_mut().zip(dj.data()) {
                *x += y * p;
            }
            p *= -mu;
        }
        for i in 0..n {
            data[i * n + i] -= z;
        }
        CMatrix::from_raw(n, n, data)
    }

    /// Derivative of `matrix_at` with respect to `μ`.
    pub fn matrix_derivative(&self, mu: Complex64) -> CMatrix {
        let mut m = CMatrix::zeros(self.n, self.n);
        for (j, dj) in self.d.iter().enumerate().skip(1) {
            let f = (-1.0f64).powi(j as i32) * j as f64;
            m = &m + &dj.scale(mu.powi(j as i32 - 1) * f);
        }
        m
    }
}

/// Substitutes `k1 → k`, `k2 → −i∂_y`.
pub fn fiberize(s: &Symbol, k: f64) -> FiberOperator {
    let order = s.order();
    let mut d = vec![CMatrix::zeros(s.n, s.n); order + 1];
    let mi = Complex64::new(0.0, -1.0);
    for (&(a, b), c) in &s.terms {
        let w = mi.powi(b as i32) * k.powi(a as i32);
        d[b as usize] = &d[b as usize] + &c.scale(w);
    }
    FiberOperator { k, n: s.n, d }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapProvenance {
    Declared,
    Computed,
}

/// Energy interval free of bulk spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapWindow {
    pub lo: f64,
    pub hi: f64,
    pub provenance: GapProvenance,
}

impl GapWindow {
    pub fn declared(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(BecError::Input(format!("gap ({lo}, {hi}) is empty")));
        }
        Ok(GapWindow { lo, hi, provenance: GapProvenance::Declared })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, e: f64) -> bool {
        e > self.lo && e < self.hi
    }
}

/// Eigenvalues of `H(k, k_y)` along `ky_grid`, one sorted array per band.
pub fn bulk_bands(s: &Symbol, k: f64, ky_grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    let mut bands = vec![Vec::with_capacity(ky_grid.len()); s.n];
    for &ky in ky_grid {
        let e = herm_eig(&s.eval(k, ky))?;
        for (b, v) in e.values.into_iter().enumerate() {
            bands[b].push(v);
        }
    }
    Ok(bands)
}

/// Largest band-free interval containing `around`, sampled over `[−w, w]²`.
pub fn find_gap(s: &Symbol, around: f64, k_window: f64, resolution: usize) -> Result<GapWindow> {
    if resolution < 64 {
        return Err(BecError::Input(format!("gap resolution {resolution} below 64")));
    }
    let grid: Vec<f64> =
        (0..resolution).map(|i| -k_window + 2.0 * k_window * i as f64 / (resolution - 1) as f64).collect();
    let per_k: Vec<Vec<Vec<f64>>> =
        grid.par_iter().map(|&k| bulk_bands(s, k, &grid)).collect::<Result<Vec<_>>>()?;
    let tol = 1e-9 * (1.0 + s.scale());
    let mut below = f64::NEG_INFINITY;
    let mut above = f64::INFINITY;
    let mut extreme: f64 = 0.0;
    for b in 0..s.n {
        let mut bmin = f64::INFINITY;
        let mut bmax = f64::NEG_INFINITY;
        for bands in &per_k {
            for &v in &bands[b] {
                bmin = bmin.min(v);
                bmax = bmax.max(v);
                extreme = extreme.max(v.abs());
                if (v - around).abs() <= tol {
                    return Err(BecError::NoGap { around });
                }
                if v < around {
                    below = below.max(v);
                } else {
                    above = above.min(v);
                }
            }
        }
        if bmin < around && bmax > around {
            return Err(BecError::NoGap { around });
        }
    }
    let span = extreme.max(1.0);
    let lo = if below.is_finite() { below } else { around - span };
    let hi = if above.is_finite() { above } else { around + span };
    Ok(GapWindow { lo, hi, provenance: GapProvenance::Computed })
}

/// Spectral projection of `H(k1, k2)` onto eigenvalues below `level`.
pub fn fermi_projection(s: &Symbol, k1: f64, k2: f64, level: f64) -> Result<CMatrix> {
    let e = herm_eig(&s.eval(k1, k2))?;
    let n = s.n;
    let mut p = CMatrix::zeros(n, n);
    for (j, &lam) in e.values.iter().enumerate() {
        if (lam - level).abs() < 1e-8 {
            return Err(BecError::GaplessPoint { k1, k2, level });
        }
        if lam < level {
            let v = e.vectors.column(j);
            for a in 0..n {
                for b in 0..n {
                    p[(a, b)] += v[a] * v[b].conj();
                }
            }
        }
    }
    Ok(p)
}

/// `Tr(P [∂1P, ∂2P])` with Richardson-extrapolated central differences.
pub fn chern_integrand(s: &Symbol, k1: f64, k2: f64, level: f64) -> Result<Complex64> {
    let p = fermi_projection(s, k1, k2, level)?;
    let d = |dir: usize, h: f64| -> Result<CMatrix> {
        let (dx, dy) = if dir == 1 { (h, 0.0) } else { (0.0, h) };
        let plus = fermi_projection(s, k1 + dx, k2 + dy, level)?;
        let minus = fermi_projection(s, k1 - dx, k2 - dy, level)?;
        Ok((&plus - &minus).scale_re(0.5 / h))
    };
    let deriv = |dir: usize, k: f64| -> Result<CMatrix> {
        let h = 1e-4 * (1.0 + k.abs());
        let coarse = d(dir, h)?;
        let fine = d(dir, 0.5 * h)?;
        Ok((&fine.scale_re(4.0) - &coarse).scale_re(1.0 / 3.0))
    };
    let d1 = deriv(1, k1)?;
    let d2 = deriv(2, k2)?;
    let comm = &(&d1 * &d2) - &(&d2 * &d1);
    Ok((&p * &comm).trace())
}

/// Chern-type pairing: value, distance to the nearest integer, and diagnostics.
#[derive(Debug, Clone)]
pub struct ChernResult {
    pub value: f64,
    pub residual: f64,
    pub imag_part: f64,
    pub quad: QuadResult,
    pub warnings: Vec<String>,
    /// Largest distance between Fermi projections in different directions at large `|k|`.
    /// A strongly affiliated symbol has a projection with a limit at infinity, so this is small.
    pub far_variation: f64,
}

/// Threshold on [`ChernResult::far_variation`].
pub const FAR_VARIATION_TOL: f64 = 0.05;

impl ChernResult {
    pub fn nearest_integer(&self) -> i64 {
        self.value.round() as i64
    }

    pub fn strongly_affiliated(&self) -> bool {
        self.far_variation < FAR_VARIATION_TOL && self.residual < 1e-3
    }
}

/// Spread of `P(R e^{iθ})` over 16 directions at `R = 1e4`.
fn far_variation(s: &Symbol, level: f64) -> Result<f64> {
    let r = 1e4 * s.scale().max(1.0);
    let p0 = fermi_projection(s, r, 0.0, level)?;
    let mut worst = 0.0f64;
    for j in 1..16 {
        let th = PI * j as f64 / 8.0;
        let p = fermi_projection(s, r * th.cos(), r * th.sin(), level)?;
        worst = worst.max((&p - &p0).max_abs());
    }
    Ok(worst)
}

fn integrate_pairing<F>(integrand: F, tol: f64) -> Result<ChernResult>
where
    F: Fn(f64, f64) -> Result<Complex64> + Sync,
{
    let failure = std::sync::Mutex::new(None::<BecError>);
    let f = |x: f64, y: f64| match integrand(x, y) {
        Ok(v) => v,
        Err(e) => {
            let mut g = failure.lock().unwrap();
            if g.is_none() {
                *g = Some(e);
            }
            Complex64::new(0.0, 0.0)
        }
    };
    let q = quad_2d(&f, QuadOptions::with_tol(2.0 * PI * tol));
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    let v = q.value / Complex64::new(0.0, 2.0 * PI);
    let value = v.re;
    let residual = (value - value.round()).abs();
    let mut warnings = Vec::new();
    if !q.converged {
        warnings.push(format!(
            "quadrature did not reach tolerance (error estimate {:.2e} after {} cells)",
            q.error / (2.0 * PI),
            q.cells
        ));
    }
    if residual >= tol.max(1e-3) {
        warnings.push(format!("non-integer value {value:.4} (residual {residual:.2e}): not strongly affiliated"));
    }
    Ok(ChernResult { value, residual, imag_part: v.im, quad: q, warnings, far_variation: 0.0 })
}

/// `(1/2πi) ∫ Tr(P [∂1P, ∂2P]) dk` for the Fermi projection below `level`.
pub fn chern(s: &Symbol, level: f64, tol: f64) -> Result<ChernResult> {
    let mut r = integrate_pairing(|x, y| chern_integrand(s, x, y, level), tol)?;
    r.far_variation = far_variation(s, level)?;
    if r.far_variation >= FAR_VARIATION_TOL && r.residual < tol.max(1e-3) {
        r.warnings.push(format!(
            "Fermi projection has no limit at infinity (variation {:.3}): not strongly affiliated, value is not a bulk invariant",
            r.far_variation
        ));
    }
    Ok(r)
}

/// Integrates the pointwise difference of the Chern integrands of two symbols.
pub fn relative_chern(s1: &Symbol, s2: &Symbol, level: f64, tol: f64) -> Result<ChernResult> {
    if s1.n != s2.n {
        return Err(BecError::Domain(format!("relative_chern: dimensions {} and {} differ", s1.n, s2.n)));
    }
    if s1 == s2 {
        let q = QuadResult { value: Complex64::new(0.0, 0.0), error: 0.0, converged: true, cells: 0 };
        return Ok(ChernResult { value: 0.0, residual: 0.0, imag_part: 0.0, quad: q, warnings: vec![], far_variation: 0.0 });
    }
    let mut far = 0.0f64;
    for j in 0..8 {
        let th = PI * j as f64 / 4.0;
        let (x, y) = (1e3 * th.cos(), 1e3 * th.sin());
        let d = &fermi_projection(s1, x, y, level)? - &fermi_projection(s2, x, y, level)?;
        far = far.max(d.max_abs());
    }
    let mut r = integrate_pairing(
        |x, y| Ok(chern_integrand(s1, x, y, level)? - chern_integrand(s2, x, y, level)?),
        tol,
    )?;
    if far > 0.05 {
        r.warnings.push(format!("projections differ by {far:.3} at |k| = 1e3: pair may not be comparable"));
    }
    Ok(r)
}
