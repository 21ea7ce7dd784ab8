//! Numerical integration on S² and along great circles.
//!
//! Two independent engines check every closed form in the crate: a
//! deterministic product rule (Gauss–Legendre in cos θ, periodic trapezoid in
//! φ) and a Monte Carlo estimator that splits its samples into fixed-size
//! blocks, each drawn from its own [`RngStream`]. Blocks are reduced in index
//! order, so an estimate depends only on `(samples, seed)` and never on the
//! number of worker threads.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{cross3, rotation_to_pole, sample_uniform_sphere, Rotation, RngStream, UnitVector};

pub const MIN_GRID_THETA: usize = 8;
pub const MIN_MC_SAMPLES: usize = 1_000;
pub const MIN_LINE_STEPS: usize = 16;

/// Samples per RNG stream in Monte Carlo runs.
pub const MC_BLOCK: usize = 1 << 14;

/// A real function on the unit sphere. Indicator factors are allowed.
pub trait SphereIntegrand: Sync {
    fn evaluate(&self, lambda: UnitVector) -> f64;
}

impl<F> SphereIntegrand for F
where
    F: Fn(UnitVector) -> f64 + Sync,
{
    #[inline]
    fn evaluate(&self, lambda: UnitVector) -> f64 {
        self(lambda)
    }
}

/// Result of a numerical integration with its standard error.
///
/// Deterministic rules report `std_error = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: usize,
}

impl Estimate {
    pub fn exact(value: f64, n_samples: usize) -> Self {
        Self {
            value,
            std_error: 0.0,
            n_samples,
        }
    }

    pub fn scaled(self, k: f64) -> Self {
        Self {
            value: self.value * k,
            std_error: self.std_error * k.abs(),
            n_samples: self.n_samples,
        }
    }

    /// `|value − target| ≤ k·std_error + slack`.
    pub fn agrees_with(&self, target: f64, k_sigma: f64, slack: f64) -> bool {
        (self.value - target).abs() <= k_sigma * self.std_error + slack
    }
}

/// Sample budget and parallel layout for a Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    pub workers: usize,
}

impl McConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self {
            samples,
            seed,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }
}

/// How a surface integral is to be evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NumericMethod {
    Grid { n_theta: usize },
    MonteCarlo(McConfig),
}

impl NumericMethod {
    pub const DEFAULT_GRID: NumericMethod = NumericMethod::Grid { n_theta: 512 };

    pub fn default_mc(seed: u64) -> Self {
        NumericMethod::MonteCarlo(McConfig::new(1_000_000, seed))
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, p_prev) = legendre_pair(n, x);
            dp = nf * (x * p - p_prev) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (p, p_prev) = legendre_pair(n, x);
        if p != 0.0 {
            dp = nf * (x * p - p_prev) / (x * x - 1.0);
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// (P_n(x), P_{n−1}(x)) by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

/// Precomputed product-rule nodes on the sphere or on one hemisphere.
#[derive(Debug, Clone)]
pub struct SphereGrid {
    nodes: Vec<UnitVector>,
    weights: Vec<f64>,
}

impl SphereGrid {
    /// Full sphere around +z.
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        Self::build(n_theta, n_phi, false, None)
    }

    /// Full sphere with its polar axis along `pole`, so that an indicator
    /// Θ(λ·pole) splits the rings cleanly.
    pub fn aligned(pole: UnitVector, n_theta: usize, n_phi: usize) -> Result<Self> {
        Self::build(n_theta, n_phi, false, Some(rotation_to_pole(pole)))
    }

    /// Northern hemisphere of `pole`, all nodes strictly inside it.
    pub fn hemisphere(pole: UnitVector, n_theta: usize, n_phi: usize) -> Result<Self> {
        Self::build(n_theta, n_phi, true, Some(rotation_to_pole(pole)))
    }

    fn build(n_theta: usize, n_phi: usize, half: bool, frame: Option<Rotation>) -> Result<Self> {
        check_resolution("n_theta", n_theta, MIN_GRID_THETA)?;
        check_resolution("n_phi", n_phi, MIN_GRID_THETA)?;
        let (x, w) = gauss_legendre(n_theta);
        let dphi = 2.0 * PI / n_phi as f64;
        let rings: Vec<(f64, f64)> = x
            .iter()
            .zip(&w)
            .map(|(&x, &w)| if half { ((x + 1.0) / 2.0, w / 2.0) } else { (x, w) })
            .collect();
        let azimuths: Vec<(f64, f64)> = (0..n_phi)
            .map(|j| ((j as f64 + 0.5) * dphi).sin_cos())
            .collect();
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for &(ct, wt) in &rings {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for &(sp, cp) in &azimuths {
                let v = UnitVector::from_unit_components(st * cp, st * sp, ct);
                nodes.push(match &frame {
                    Some(r) => r.apply(v),
                    None => v,
                });
                weights.push(wt * dphi);
            }
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[UnitVector] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: SphereIntegrand + ?Sized>(&self, f: &F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&n, &w)| w * f.evaluate(n))
            .sum()
    }
}

fn check_resolution(what: &'static str, given: usize, min: usize) -> Result<()> {
    if given < min {
        return Err(Error::Resolution { what, given, min });
    }
    Ok(())
}

/// ∫ f dS over S² with the standard (z-polar) product rule.
pub fn integrate_sphere_grid<F: SphereIntegrand + ?Sized>(
    f: &F,
    n_theta: usize,
    n_phi: usize,
) -> Result<f64> {
    Ok(SphereGrid::new(n_theta, n_phi)?.integrate(f))
}

/// ∫ f dS over S² with the grid's polar axis along `pole`.
pub fn integrate_sphere_grid_aligned<F: SphereIntegrand + ?Sized>(
    f: &F,
    pole: UnitVector,
    n_theta: usize,
    n_phi: usize,
) -> Result<f64> {
    Ok(SphereGrid::aligned(pole, n_theta, n_phi)?.integrate(f))
}

/// Running mean/variance for one block (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    #[inline]
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        let (na, nb) = (self.n as f64, other.n as f64);
        Moments {
            n,
            mean: self.mean + d * nb / n as f64,
            m2: self.m2 + other.m2 + d * d * na * nb / n as f64,
        }
    }

    fn estimate(self) -> Estimate {
        let var = if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        };
        Estimate {
            value: self.mean,
            std_error: (var.max(0.0) / self.n as f64).sqrt(),
            n_samples: self.n,
        }
    }
}

/// Runs `f(block_index)` for every block, in parallel on `workers` threads,
/// returning results in block order.
pub(crate) fn map_blocks<T, F>(n_blocks: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if workers <= 1 || n_blocks <= 1 {
        return (0..n_blocks).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| (0..n_blocks).into_par_iter().map(&f).collect()),
        Err(_) => (0..n_blocks).map(f).collect(),
    }
}

/// Mean of `sample(rng)` over `config.samples` draws.
///
/// Block `k` draws from `RngStream::new(seed, k)`; the estimate is identical
/// for any worker count.
pub fn monte_carlo_mean<F>(config: McConfig, sample: F) -> Result<Estimate>
where
    F: Fn(&mut RngStream) -> f64 + Sync + Send,
{
    if config.samples == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least one sample".into()));
    }
    let n_blocks = config.samples.div_ceil(MC_BLOCK);
    let blocks = map_blocks(n_blocks, config.workers, |b| {
        let len = MC_BLOCK.min(config.samples - b * MC_BLOCK);
        let mut rng = RngStream::new(config.seed, b as u64);
        let mut m = Moments::default();
        for _ in 0..len {
            m.push(sample(&mut rng));
        }
        m
    });
    Ok(blocks
        .into_iter()
        .fold(Moments::default(), Moments::merge)
        .estimate())
}

/// 4π · mean of f over uniform points on S².
pub fn integrate_sphere_mc<F: SphereIntegrand + ?Sized>(f: &F, config: McConfig) -> Result<Estimate> {
    check_resolution("Monte Carlo samples", config.samples, MIN_MC_SAMPLES)?;
    Ok(monte_carlo_mean(config, |rng| f.evaluate(sample_uniform_sphere(rng)))?.scaled(4.0 * PI))
}

/// ∫ g(r, dr/ds) ds along a great-circle arc.
///
/// The arc starts at `start` (projected onto the equator of `pole`) and runs
/// counterclockwise as seen from `pole` for arc length `length`. Gauss–Legendre
/// with `n_steps` nodes.
pub fn line_integral_arc<G>(
    pole: UnitVector,
    start: UnitVector,
    length: f64,
    g: G,
    n_steps: usize,
) -> Result<f64>
where
    G: Fn(UnitVector, UnitVector) -> f64,
{
    check_resolution("line integral steps", n_steps, MIN_LINE_STEPS)?;
    let p = pole.to_array();
    let s = start.to_array();
    let along = pole.dot(&start);
    let e1 = UnitVector::new(s[0] - along * p[0], s[1] - along * p[1], s[2] - along * p[2])?;
    let e2 = UnitVector::from_array(cross3(p, e1.to_array()))?;
    let (x, w) = gauss_legendre(n_steps);
    let half = length / 2.0;
    let mut total = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let (sn, cs) = (half * (xi + 1.0)).sin_cos();
        let r = UnitVector::from_unit_components(
            cs * e1.x() + sn * e2.x(),
            cs * e1.y() + sn * e2.y(),
            cs * e1.z() + sn * e2.z(),
        );
        let t = UnitVector::from_unit_components(
            -sn * e1.x() + cs * e2.x(),
            -sn * e1.y() + cs * e2.y(),
            -sn * e1.z() + cs * e2.z(),
        );
        total += wi * g(r, t);
    }
    Ok(total * half)
}

/// ∮ g(r, dr/ds) ds around the equator of `pole`, counterclockwise as seen
/// from `pole`; total length 2π.
pub fn line_integral_great_circle<G>(pole: UnitVector, g: G, n_steps: usize) -> Result<f64>
where
    G: Fn(UnitVector, UnitVector) -> f64,
{
    let start = rotation_to_pole(pole).apply(UnitVector::X);
    line_integral_arc(pole, start, 2.0 * PI, g, n_steps)
}

/// (r × dr/ds)·axis, the integrand that turns a constant-field flux into a
/// contour integral.
#[inline]
pub fn bivector_component(r: UnitVector, tangent: UnitVector, axis: UnitVector) -> f64 {
    axis.dot_vec(r.cross(&tangent))
}

/// Flux of the constant field `field_axis` through the lune N_a ∩ N_b.
///
/// Integrated on the northern hemisphere of `n_a`, so Θ(λ·n_a) is exact and
/// only Θ(λ·n_b) falls on the grid. Antiparallel axes give the empty lune.
pub fn lune_flux(
    n_a: UnitVector,
    n_b: UnitVector,
    field_axis: UnitVector,
    n_theta: usize,
) -> Result<f64> {
    check_resolution("n_theta", n_theta, MIN_GRID_THETA)?;
    if n_a.dot(&n_b) <= -1.0 + 1e-12 {
        return Ok(0.0);
    }
    let grid = SphereGrid::hemisphere(n_a, n_theta, 2 * n_theta)?;
    Ok(grid.integrate(&|l: UnitVector| {
        if l.dot(&n_b) >= 0.0 {
            field_axis.dot(&l)
        } else {
            0.0
        }
    }))
}

/// ∫∫ f(λ_u, λ_v) dS_u dS_v as a full tensor-product rule, no separability
/// assumed. Outer rows are summed in parallel and reduced in order.
pub fn integrate_pair_grid<F>(f: F, grid_u: &SphereGrid, grid_v: &SphereGrid) -> f64
where
    F: Fn(UnitVector, UnitVector) -> f64 + Sync + Send,
{
    let rows: Vec<f64> = grid_u
        .nodes()
        .par_iter()
        .zip(grid_u.weights().par_iter())
        .map(|(&u, &wu)| {
            let inner: f64 = grid_v
                .nodes()
                .iter()
                .zip(grid_v.weights())
                .map(|(&v, &wv)| wv * f(u, v))
                .sum();
            wu * inner
        })
        .collect();
    rows.iter().sum()
}
