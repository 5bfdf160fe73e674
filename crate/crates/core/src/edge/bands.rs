use rayon::prelude::*;

use super::spectrum::{edge_eigenvalues, fiber_gap, golden_min, local_minima, singularity, ACCEPT};
use crate::error::{BecError, Result};
use crate::numerics::svd::singular_values;
use crate::extension::{BoundaryCondition, EdgeProblem};
use crate::symbol::{GapProvenance, GapWindow};

/// Sampling parameters for edge dispersion computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeOptions {
    /// Boundary momenta are sampled on `[−k_window, k_window]`.
    pub k_window: f64,
    pub k_resolution: usize,
    pub lambda_resolution: usize,
    /// Energy cutoff used on sides of the fiber gap without bulk spectrum.
    pub far: Option<f64>,
}

impl Default for EdgeOptions {
    fn default() -> Self {
        EdgeOptions { k_window: 20.0, k_resolution: 801, lambda_resolution: 400, far: None }
    }
}

impl EdgeOptions {
    pub fn far_cutoff(&self) -> f64 {
        self.far.unwrap_or(10.0 * (1.0 + self.k_window * self.k_window))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_window > 0.0 && self.k_window.is_finite()) {
            return Err(BecError::Input(format!("k window must be positive, got {}", self.k_window)));
        }
        if self.k_resolution < 3 {
            return Err(BecError::Input(format!("k resolution {} below 3", self.k_resolution)));
        }
        if self.lambda_resolution < 8 {
            return Err(BecError::Input(format!("energy resolution {} below 8", self.lambda_resolution)));
        }
        if let Some(f) = self.far {
            if !(f > 0.0 && f.is_finite()) {
                return Err(BecError::Input(format!("energy cutoff must be positive, got {f}")));
            }
        }
        Ok(())
    }

    fn grid(&self) -> Vec<f64> {
        let n = self.k_resolution;
        let kw = self.k_window;
        (0..n).map(|i| -kw + 2.0 * kw * i as f64 / (n - 1) as f64).collect()
    }
}

/// Edge eigenvalues and fiber gap at one boundary momentum.
#[derive(Debug, Clone, PartialEq)]
pub struct KSample {
    pub k: f64,
    pub gap: (f64, f64),
    /// Whether each side of `gap` is the artificial energy cutoff rather than bulk spectrum.
    pub cutoff: (bool, bool),
    pub eigenvalues: Vec<f64>,
}

impl KSample {
    fn width(&self) -> f64 {
        self.gap.1 - self.gap.0
    }

    /// `Some(false)` near the lower edge, `Some(true)` near the upper edge.
    fn near_edge(&self, lambda: f64) -> Option<bool> {
        let tol = self.width() / 50.0;
        if lambda - self.gap.0 < tol {
            Some(false)
        } else if self.gap.1 - lambda < tol {
            Some(true)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Endpoint {
    /// Leaves through the lower energy cutoff.
    ExitsGapLow,
    /// Leaves through the upper energy cutoff.
    ExitsGapHigh,
    /// Reaches the end of the sampled momentum window.
    ExitsKWindow,
    /// Merges with the bulk continuum at momentum `k`.
    TouchesBulk(f64),
}

impl std::fmt::Display for Endpoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Endpoint::ExitsGapLow => write!(f, "exits-gap-low"),
            Endpoint::ExitsGapHigh => write!(f, "exits-gap-high"),
            Endpoint::ExitsKWindow => write!(f, "exits-k-window"),
            Endpoint::TouchesBulk(k) => write!(f, "touches-bulk({k:.6})"),
        }
    }
}

/// One edge band `k ↦ λ(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionBand {
    /// `(k, λ)` with `k` strictly increasing.
    pub samples: Vec<(f64, f64)>,
    /// Energies free of bulk spectrum at every sampled momentum.
    pub gap: GapWindow,
    pub start: Endpoint,
    pub end: Endpoint,
    pub flat: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpectrum {
    pub samples: Vec<KSample>,
    pub bands: Vec<DispersionBand>,
    /// Energies free of bulk spectrum at every sampled momentum.
    pub gap: GapWindow,
}

pub fn sample_k(p: &EdgeProblem, bc: &BoundaryCondition, k: f64, around: f64, opts: &EdgeOptions) -> Result<KSample> {
    let far = opts.far_cutoff();
    let gap = fiber_gap(p, k, around, far)?;
    let eigenvalues = edge_eigenvalues(p, bc, k, gap, opts.lambda_resolution)?;
    let cutoff = (gap.0 == around - far, gap.1 == around + far);
    Ok(KSample { k, gap, cutoff, eigenvalues })
}

struct StepMatch {
    pairs: Vec<(usize, usize)>,
    /// Bands close together or large jumps: worth refining.
    ambiguous: bool,
    /// Eigenvalues appearing or vanishing away from the gap edges.
    lost: bool,
}

fn match_step(a: &KSample, b: &KSample) -> StepMatch {
    let width = a.width().min(b.width());
    let max_jump = width / 50.0;
    let close = |s: &KSample| s.eigenvalues.windows(2).any(|w| w[1] - w[0] < 2e-3 * width);
    let mut ambiguous = close(a) || close(b);
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, &x) in a.eigenvalues.iter().enumerate() {
        for (j, &y) in b.eigenvalues.iter().enumerate() {
            candidates.push(((x - y).abs(), i, j));
        }
    }
    candidates.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut used_a = vec![false; a.eigenvalues.len()];
    let mut used_b = vec![false; b.eigenvalues.len()];
    let mut pairs = Vec::new();
    for (d, i, j) in candidates {
        if used_a[i] || used_b[j] || d > max_jump {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        pairs.push((i, j));
    }
    let unexplained = |x: f64| a.near_edge(x).is_none() && b.near_edge(x).is_none();
    let lost = used_a.iter().zip(&a.eigenvalues).any(|(&u, &x)| !u && unexplained(x))
        || used_b.iter().zip(&b.eigenvalues).any(|(&u, &y)| !u && unexplained(y));
    ambiguous |= lost;
    StepMatch { pairs, ambiguous, lost }
}

const MAX_HALVINGS: u32 = 8;

/// Samples the edge spectrum on the momentum grid and links eigenvalues into bands by
/// continuation, halving momentum steps where bands jump or come close.
pub fn track_bands(p: &EdgeProblem, bc: &BoundaryCondition, around: f64, opts: &EdgeOptions) -> Result<EdgeSpectrum> {
    opts.validate()?;
    let grid = opts.grid();
    let base_step = grid[1] - grid[0];
    let min_step = base_step / f64::from(1u32 << MAX_HALVINGS);
    let coarse: Vec<KSample> = grid.par_iter().map(|&k| sample_k(p, bc, k, around, opts)).collect::<Result<_>>()?;

    let mut samples: Vec<KSample> = vec![coarse[0].clone()];
    let mut links: Vec<Vec<(usize, usize)>> = Vec::new();
    for next in coarse.into_iter().skip(1) {
        let mut pending = vec![next];
        while let Some(b) = pending.pop() {
            let a = samples.last().unwrap();
            let m = match_step(a, &b);
            let step = b.k - a.k;
            if m.ambiguous && step > 1.5 * min_step {
                let mid = sample_k(p, bc, 0.5 * (a.k + b.k), around, opts)?;
                pending.push(b);
                pending.push(mid);
                continue;
            }
            if m.lost {
                return Err(BecError::LostBand { k: a.k });
            }
            links.push(m.pairs);
            samples.push(b);
        }
    }
    let gap = GapWindow {
        lo: samples.iter().map(|s| s.gap.0).fold(f64::NEG_INFINITY, f64::max),
        hi: samples.iter().map(|s| s.gap.1).fold(f64::INFINITY, f64::min),
        provenance: GapProvenance::Computed,
    };
    let bands = assemble(&samples, &links, gap, opts);
    Ok(EdgeSpectrum { samples, bands, gap })
}

fn classify(prev: &KSample, next: &KSample, lambda: f64) -> Endpoint {
    let s = if prev.near_edge(lambda).is_some() { prev } else { next };
    match s.near_edge(lambda) {
        Some(false) if s.cutoff.0 => Endpoint::ExitsGapLow,
        Some(true) if s.cutoff.1 => Endpoint::ExitsGapHigh,
        _ => Endpoint::TouchesBulk(0.5 * (prev.k + next.k)),
    }
}

fn assemble(samples: &[KSample], links: &[Vec<(usize, usize)>], gap: GapWindow, opts: &EdgeOptions) -> Vec<DispersionBand> {
    let mut bands: Vec<DispersionBand> = Vec::new();
    let mut owner: Vec<usize> = Vec::new();
    for (s, sample) in samples.iter().enumerate() {
        let mut next_owner = vec![usize::MAX; sample.eigenvalues.len()];
        if s > 0 {
            let prev = &samples[s - 1];
            let mut continued = vec![false; owner.len()];
            for &(i, j) in &links[s - 1] {
                next_owner[j] = owner[i];
                continued[i] = true;
            }
            for (i, &b) in owner.iter().enumerate() {
                if !continued[i] {
                    bands[b].end = classify(prev, sample, prev.eigenvalues[i]);
                }
            }
        }
        for (j, &lam) in sample.eigenvalues.iter().enumerate() {
            if next_owner[j] == usize::MAX {
                let start = if s == 0 { Endpoint::ExitsKWindow } else { classify(&samples[s - 1], sample, lam) };
                bands.push(DispersionBand { samples: Vec::new(), gap, start, end: Endpoint::ExitsKWindow, flat: false });
                next_owner[j] = bands.len() - 1;
            }
            bands[next_owner[j]].samples.push((sample.k, lam));
        }
        owner = next_owner;
    }
    for b in &mut bands {
        b.flat = is_flat(b, samples, opts);
    }
    bands
}

/// Total variation below `1e−6` of the gap width over at least a tenth of the window.
fn is_flat(b: &DispersionBand, samples: &[KSample], opts: &EdgeOptions) -> bool {
    let (k0, k1) = (b.samples[0].0, b.samples.last().unwrap().0);
    if k1 - k0 < 0.1 * 2.0 * opts.k_window {
        return false;
    }
    let width = samples
        .iter()
        .filter(|s| s.k >= k0 && s.k <= k1)
        .map(KSample::width)
        .fold(f64::INFINITY, f64::min);
    let tv: f64 = b.samples.windows(2).map(|w| (w[1].1 - w[0].1).abs()).sum();
    tv < 1e-6 * width
}

/// One passage of an edge band through the reference energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub k: f64,
    /// `+1` upward, `−1` downward as `k` increases; `0` for a flagged tangency.
    pub direction: i64,
    pub slope: f64,
    /// Number of edge bands passing through the energy together at `k`.
    pub multiplicity: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowResult {
    pub value: i64,
    pub crossings: Vec<Crossing>,
    pub flagged: bool,
    pub warnings: Vec<String>,
}

/// Crossings with `|dλ/dk|` below this are tangential.
pub const TANGENT_SLOPE: f64 = 1e-7;

/// Net number of edge bands crossing `energy` upward as the boundary momentum increases.
pub fn spectral_flow(bands: &[DispersionBand], energy: f64) -> FlowResult {
    let mut crossings = Vec::new();
    let mut warnings = Vec::new();
    for b in bands {
        let lams: Vec<f64> = b.samples.iter().map(|s| s.1).collect();
        if b.flat {
            let lo = lams.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = lams.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let tol = 1e-6 * b.gap.width().max(1.0);
            if lo - tol <= energy && energy <= hi + tol {
                warnings.push(format!("flat band at the reference energy from k = {:.4}", b.samples[0].0));
                continue;
            }
        }
        for w in b.samples.windows(2) {
            let ((k0, l0), (k1, l1)) = (w[0], w[1]);
            if (l0 < energy) == (l1 < energy) {
                continue;
            }
            let slope = (l1 - l0) / (k1 - k0);
            let k = k0 + (k1 - k0) * (energy - l0) / (l1 - l0);
            if slope.abs() < TANGENT_SLOPE {
                warnings.push(format!("tangential crossing near k = {k:.6}"));
                crossings.push(Crossing { k, direction: 0, slope, multiplicity: 1 });
            } else {
                crossings.push(Crossing { k, direction: slope.signum() as i64, slope, multiplicity: 1 });
            }
        }
    }
    crossings.sort_by(|a, b| a.k.total_cmp(&b.k));
    let value = crossings.iter().map(|c| c.direction * c.multiplicity).sum();
    FlowResult { value, crossings, flagged: !warnings.is_empty(), warnings }
}

/// Dimension of the kernel of the boundary matrix at `(k, energy)`.
fn nullity(p: &EdgeProblem, bc: &BoundaryCondition, k: f64, energy: f64) -> i64 {
    let Ok(op) = p.boundary_operator(bc, k) else { return 0 };
    match p.boundary_matrix_with(&op, energy) {
        Ok(m) => singular_values(&m).iter().filter(|&&s| s / op.scale < ACCEPT).count() as i64,
        Err(_) => 0,
    }
}

/// Spectral flow from zeros of the boundary matrix at fixed `energy` along the momentum grid.
pub fn spectral_flow_direct(
    p: &EdgeProblem,
    bc: &BoundaryCondition,
    energy: f64,
    opts: &EdgeOptions,
) -> Result<FlowResult> {
    opts.validate()?;
    let grid = opts.grid();
    let n = grid.len();
    let far = opts.far_cutoff();
    for &k in &[grid[0], grid[n - 1]] {
        fiber_gap(p, k, energy, far)?;
    }
    let g = |k: f64| -> f64 {
        match p.boundary_operator(bc, k) {
            Ok(op) => singularity(p, &op, energy).unwrap_or(f64::NAN),
            Err(_) => f64::NAN,
        }
    };
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&k| {
            bc.check_admissible(k)?;
            Ok(g(k))
        })
        .collect::<Result<_>>()?;
    let step = grid[1] - grid[0];
    let mut crossings: Vec<Crossing> = Vec::new();
    let mut warnings = Vec::new();
    for i in local_minima(&values) {
        let a = grid[i.saturating_sub(1)];
        let b = grid[(i + 1).min(n - 1)];
        let (ks, gv) = golden_min(&g, a, b, 1e-12 * (1.0 + grid[i].abs()));
        if gv >= ACCEPT {
            continue;
        }
        let multiplicity = nullity(p, bc, ks, energy).max(1);
        let delta = (1e-3 * step).max(1e-9 * (1.0 + ks.abs()));
        let nearest = |k: f64| -> Result<Option<f64>> {
            let s = sample_k(p, bc, k, energy, opts)?;
            Ok(s.eigenvalues.into_iter().min_by(|x, y| (x - energy).abs().total_cmp(&(y - energy).abs())))
        };
        match (nearest(ks - delta)?, nearest(ks + delta)?) {
            (Some(l0), Some(l1)) if (l0 < energy) != (l1 < energy) => {
                let slope = (l1 - l0) / (2.0 * delta);
                if slope.abs() < TANGENT_SLOPE {
                    warnings.push(format!("tangential crossing near k = {ks:.6}"));
                    crossings.push(Crossing { k: ks, direction: 0, slope, multiplicity });
                } else {
                    crossings.push(Crossing { k: ks, direction: slope.signum() as i64, slope, multiplicity });
                }
            }
            _ => warnings.push(format!("edge eigenvalue touches the reference energy near k = {ks:.6}")),
        }
    }
    crossings.dedup_by(|a, b| (a.k - b.k).abs() < 1e-7 * (1.0 + b.k.abs()));
    let value = crossings.iter().map(|c| c.direction * c.multiplicity).sum();
    Ok(FlowResult { value, crossings, flagged: !warnings.is_empty(), warnings })
}
