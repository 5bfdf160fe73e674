use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

const LOW_ORDER: usize = 6;
const HIGH_ORDER: usize = 12;

/// Outcome of an adaptive 2D integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: Complex64,
    pub error: f64,
    pub converged: bool,
    pub cells: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub tol: f64,
    pub max_cells: usize,
    /// Number of cells per side in the initial uniform partition.
    pub initial_split: usize,
}

impl QuadOptions {
    pub fn with_tol(tol: f64) -> Self {
        QuadOptions { tol, max_cells: 40_000, initial_split: 4 }
    }
}

/// Gauss–Legendre nodes and weights on (−1, 1).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    value: Complex64,
    error: f64,
}

struct Rules {
    low: (Vec<f64>, Vec<f64>),
    high: (Vec<f64>, Vec<f64>),
}

fn tensor<G: Fn(f64, f64) -> Complex64>(g: &G, rule: &(Vec<f64>, Vec<f64>), c: &Cell) -> Complex64 {
    let hx = 0.5 * (c.x1 - c.x0);
    let hy = 0.5 * (c.y1 - c.y0);
    let mx = 0.5 * (c.x1 + c.x0);
    let my = 0.5 * (c.y1 + c.y0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (xi, wi) in rule.0.iter().zip(&rule.1) {
        let mut row = Complex64::new(0.0, 0.0);
        for (yj, wj) in rule.0.iter().zip(&rule.1) {
            row += g(mx + hx * xi, my + hy * yj) * *wj;
        }
        acc += row * *wi;
    }
    acc * (hx * hy)
}

fn evaluate<G: Fn(f64, f64) -> Complex64>(g: &G, rules: &Rules, x0: f64, x1: f64, y0: f64, y1: f64) -> Cell {
    let mut c = Cell { x0, x1, y0, y1, value: Complex64::new(0.0, 0.0), error: 0.0 };
    let hi = tensor(g, &rules.high, &c);
    let lo = tensor(g, &rules.low, &c);
    c.value = hi;
    c.error = (hi - lo).norm();
    if !c.error.is_finite() || !c.value.re.is_finite() || !c.value.im.is_finite() {
        c.error = f64::INFINITY;
    }
    c
}

/// Adaptive tensor Gauss–Legendre integration over the rectangle `[x0,x1]×[y0,y1]`.
pub fn quad_rect<G>(g: &G, bounds: (f64, f64, f64, f64), opts: QuadOptions) -> QuadResult
where
    G: Fn(f64, f64) -> Complex64 + Sync,
{
    let rules = Rules { low: gauss_legendre(LOW_ORDER), high: gauss_legendre(HIGH_ORDER) };
    let (ax, bx, ay, by) = bounds;
    let n0 = opts.initial_split.max(1);
    let seeds: Vec<(f64, f64, f64, f64)> = (0..n0)
        .flat_map(|i| (0..n0).map(move |j| (i, j)))
        .map(|(i, j)| {
            let fx = |t: usize| ax + (bx - ax) * t as f64 / n0 as f64;
            let fy = |t: usize| ay + (by - ay) * t as f64 / n0 as f64;
            (fx(i), fx(i + 1), fy(j), fy(j + 1))
        })
        .collect();
    let mut cells: Vec<Cell> =
        seeds.par_iter().map(|&(x0, x1, y0, y1)| evaluate(g, &rules, x0, x1, y0, y1)).collect();
    let min_width = 1e-13 * (bx - ax).abs().max((by - ay).abs());
    let mut converged = false;
    loop {
        let total_err: f64 = cells.iter().map(|c| c.error).sum();
        if total_err <= opts.tol {
            converged = true;
            break;
        }
        if cells.len() >= opts.max_cells {
            break;
        }
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by(|&a, &b| cells[b].error.total_cmp(&cells[a].error).then(a.cmp(&b)));
        let batch = (cells.len() / 8).clamp(1, 256);
        let mut split = Vec::new();
        let mut keep = vec![true; cells.len()];
        for &idx in order.iter().take(batch) {
            let c = cells[idx];
            if c.error <= opts.tol * 1e-3 / (cells.len() as f64) {
                break;
            }
            if (c.x1 - c.x0) < min_width || (c.y1 - c.y0) < min_width {
                continue;
            }
            keep[idx] = false;
            let mx = 0.5 * (c.x0 + c.x1);
            let my = 0.5 * (c.y0 + c.y1);
            split.push((c.x0, mx, c.y0, my));
            split.push((mx, c.x1, c.y0, my));
            split.push((c.x0, mx, my, c.y1));
            split.push((mx, c.x1, my, c.y1));
        }
        if split.is_empty() {
            break;
        }
        let children: Vec<Cell> =
            split.par_iter().map(|&(x0, x1, y0, y1)| evaluate(g, &rules, x0, x1, y0, y1)).collect();
        let mut next: Vec<Cell> = cells.iter().zip(&keep).filter(|(_, &k)| k).map(|(c, _)| *c).collect();
        next.extend(children);
        cells = next;
    }
    cells.sort_by(|a, b| a.x0.total_cmp(&b.x0).then(a.y0.total_cmp(&b.y0)));
    let value = cells.iter().fold(Complex64::new(0.0, 0.0), |acc, c| acc + c.value);
    let error = cells.iter().map(|c| c.error).sum();
    QuadResult { value, error, converged, cells: cells.len() }
}

/// Integrates `f` over ℝ² through the compactification `k = tan(πs/2)`, `s ∈ (−1,1)²`.
pub fn quad_2d<F>(f: &F, opts: QuadOptions) -> QuadResult
where
    F: Fn(f64, f64) -> Complex64 + Sync,
{
    let half_pi = 0.5 * PI;
    let g = |s1: f64, s2: f64| {
        let (t1, t2) = (half_pi * s1, half_pi * s2);
        let (c1, c2) = (t1.cos(), t2.cos());
        let jac = half_pi * half_pi / (c1 * c1 * c2 * c2);
        f(t1.tan(), t2.tan()) * jac
    };
    quad_rect(&g, (-1.0, 1.0, -1.0, 1.0), opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_integrates_polynomials() {
        let (x, w) = gauss_legendre(6);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((s - 2.0 / 11.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn zero_integrand() {
        let r = quad_2d(&|_, _| Complex64::new(0.0, 0.0), QuadOptions::with_tol(1e-10));
        assert!(r.converged && r.value.norm() == 0.0);
    }

    #[test]
    fn gaussian() {
        let r = quad_2d(&|x: f64, y: f64| Complex64::new((-(x * x + y * y)).exp(), 0.0), QuadOptions::with_tol(1e-10));
        assert!(r.converged);
        assert!((r.value.re - PI).abs() < 1e-8, "{}", r.value);
    }

    #[test]
    fn lorentzian_tail() {
        // ∫ dk / (1 + |k|²)² = π
        let r = quad_2d(
            &|x: f64, y: f64| Complex64::new(1.0 / (1.0 + x * x + y * y).powi(2), 0.0),
            QuadOptions::with_tol(1e-10),
        );
        assert!((r.value.re - PI).abs() < 1e-8);
    }
}
