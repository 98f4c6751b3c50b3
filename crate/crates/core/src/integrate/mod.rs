//! Deterministic quadrature over `U`, over Bergman balls, and against the
//! Berezin weight `|k_z|^2 dV`.
//!
//! Every integral is pulled back to the unit ball, where nodes are laid out by
//! a [`BallRule`]. The pullbacks used here:
//!
//! * `int_U f dV = int_B f(Phi xi) J_R Phi(xi) dV(xi)`;
//! * `D(z, r) = sigma_z^{-1}(Phi(tanh(r) B))`, with constant Jacobian
//!   `rho(z)^{n+1}` for `sigma_z^{-1}`;
//! * `|k_i(Phi xi)|^2 J_R Phi(xi) = 1 / vol(B)`, so `int f |k_z|^2 dV` is the
//!   plain uniform average of `f(T(Phi xi))` for `T = sigma_z^{-1}` or `tau_z`.

pub mod rules;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    bergman_metric, cayley_jacobian, cayley_unchecked, mobius_ball_unchecked, rho, sigma_inv,
    unit_ball_volume, HPoint, C64,
};
use rules::{pairwise_sum, splitmix64};

/// Number of randomized shifts used by the quasi-random scheme.
pub const QMC_REPLICATES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// Halton points with Cranley–Patterson shifts.
    QuasiRandom,
    /// Radially stratified pseudo-random points, two per stratum.
    Stratified,
    /// Gauss–Legendre in the moduli, trapezoid in the angles.
    PolarProduct,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::QuasiRandom => "quasi-random",
            Scheme::Stratified => "stratified",
            Scheme::PolarProduct => "polar-product",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "quasi-random" | "qmc" => Ok(Scheme::QuasiRandom),
            "stratified" | "mc" => Ok(Scheme::Stratified),
            "polar-product" | "polar" => Ok(Scheme::PolarProduct),
            other => Err(Error::InvalidSpec(format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadratureSpec {
    pub scheme: Scheme,
    pub node_count: usize,
    pub seed: u64,
    pub dim: usize,
}

impl QuadratureSpec {
    pub const MIN_NODES: usize = 100;

    pub fn new(scheme: Scheme, node_count: usize, seed: u64, dim: usize) -> Result<Self> {
        let spec = Self { scheme, node_count, seed, dim };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.node_count < Self::MIN_NODES {
            return Err(Error::InvalidSpec(format!(
                "node_count {} is below the minimum {}",
                self.node_count,
                Self::MIN_NODES
            )));
        }
        if self.dim == 0 || self.dim > 8 {
            return Err(Error::InvalidSpec(format!("dimension {} not in 1..=8", self.dim)));
        }
        Ok(())
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn with_nodes(&self, node_count: usize) -> Self {
        Self { node_count, ..self.clone() }
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Self {
        Self { scheme, ..self.clone() }
    }

    /// Spec for grid point `index`, seeded by `hash(seed, index)`.
    pub fn for_point(&self, index: usize) -> Self {
        self.with_seed(splitmix64(self.seed, index as u64))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegralResult {
    pub value: C64,
    pub std_error: f64,
    pub nodes_used: usize,
}

impl IntegralResult {
    pub fn scaled(self, c: f64) -> Self {
        Self {
            value: self.value * c,
            std_error: self.std_error * c.abs(),
            nodes_used: self.nodes_used,
        }
    }

    /// `|value - target| <= k * std_error + abs_tol`.
    pub fn agrees_with(&self, target: C64, k: f64, abs_tol: f64) -> bool {
        (self.value - target).norm() <= k * self.std_error + abs_tol
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ErrorModel {
    /// Contiguous blocks of equal size, one per randomized shift.
    Replicates(usize),
    /// Adjacent pairs share a stratum.
    Pairs,
    Exact,
}

type PolarCache = Mutex<HashMap<(usize, usize), Arc<(Vec<C64>, Vec<f64>)>>>;

fn polar_cache() -> &'static PolarCache {
    static CACHE: OnceLock<PolarCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Realized nodes for uniform averages over the unit ball.
#[derive(Clone, Debug)]
pub struct BallRule {
    n: usize,
    points: Arc<Vec<C64>>,
    weights: Option<Arc<Vec<f64>>>,
    model: ErrorModel,
}

impl BallRule {
    pub fn new(spec: &QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        let n = spec.dim;
        Ok(match spec.scheme {
            Scheme::QuasiRandom => Self::quasi_random(n, spec.node_count, spec.seed),
            Scheme::Stratified => Self::stratified(n, spec.node_count, spec.seed),
            Scheme::PolarProduct => {
                let q = rules::polar_order(n, spec.node_count);
                let rule = polar_cache()
                    .lock()
                    .expect("polar cache poisoned")
                    .entry((n, q))
                    .or_insert_with(|| Arc::new(rules::polar_product(n, q)))
                    .clone();
                Self {
                    n,
                    points: Arc::new(rule.0.clone()),
                    weights: Some(Arc::new(rule.1.clone())),
                    model: ErrorModel::Exact,
                }
            }
        })
    }

    fn quasi_random(n: usize, count: usize, seed: u64) -> Self {
        let per = count / QMC_REPLICATES;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shifts: Vec<Vec<f64>> = (0..QMC_REPLICATES)
            .map(|_| (0..2 * n).map(|_| rng.random::<f64>()).collect())
            .collect();
        let mut points = vec![C64::new(0.0, 0.0); per * QMC_REPLICATES * n];
        points
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(idx, out)| {
                let (rep, i) = (idx / per, idx % per);
                let mut u = vec![0.0; 2 * n];
                rules::halton(i as u64 + 1, 2 * n, &mut u);
                for (x, s) in u.iter_mut().zip(&shifts[rep]) {
                    *x = (*x + s).fract();
                }
                rules::cube_to_ball(&u, out);
            });
        Self {
            n,
            points: Arc::new(points),
            weights: None,
            model: ErrorModel::Replicates(QMC_REPLICATES),
        }
    }

    fn stratified(n: usize, count: usize, seed: u64) -> Self {
        let strata = count / 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points = Vec::with_capacity(2 * strata * n);
        let mut dir = vec![C64::new(0.0, 0.0); n];
        for k in 0..strata {
            for _ in 0..2 {
                let v = (k as f64 + rng.random::<f64>()) / strata as f64;
                let radius = v.powf(1.0 / (2 * n) as f64);
                let mut norm2 = 0.0;
                for d in dir.iter_mut() {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    *d = C64::new(re, im);
                    norm2 += d.norm_sqr();
                }
                let scale = radius / norm2.sqrt();
                points.extend(dir.iter().map(|d| d * scale));
            }
        }
        Self {
            n,
            points: Arc::new(points),
            weights: None,
            model: ErrorModel::Pairs,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.n
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> &[C64] {
        &self.points[i * self.n..(i + 1) * self.n]
    }

    /// Weight of node `i` in the uniform average.
    pub fn weight(&self, i: usize) -> f64 {
        match &self.weights {
            Some(w) => w[i],
            None => 1.0 / self.len() as f64,
        }
    }

    /// Node permutation that respects the error model's grouping: shuffled
    /// within each replicate block, or by whole strata. `None` for product rules.
    pub fn grouped_permutation(&self, seed: u64) -> Option<Vec<usize>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = self.len();
        match self.model {
            ErrorModel::Exact => None,
            ErrorModel::Replicates(r) => {
                let mut p: Vec<usize> = (0..len).collect();
                for block in p.chunks_mut(len / r) {
                    block.shuffle(&mut rng);
                }
                Some(p)
            }
            ErrorModel::Pairs => {
                let mut strata: Vec<usize> = (0..len / 2).collect();
                strata.shuffle(&mut rng);
                Some(strata.iter().flat_map(|&b| [2 * b, 2 * b + 1]).collect())
            }
        }
    }

    /// Evaluates `g` at every node in parallel; results are in node order.
    pub fn evaluate<F>(&self, g: F) -> Result<Vec<C64>>
    where
        F: Fn(&[C64]) -> C64 + Sync,
    {
        let values: Vec<C64> = (0..self.len())
            .into_par_iter()
            .map(|i| g(self.point(i)))
            .collect();
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(self.non_finite(i));
        }
        Ok(values)
    }

    /// Evaluates a `k`-channel integrand; `data[i * k + c]` is channel `c` at node `i`.
    pub fn evaluate_channels<F>(&self, k: usize, g: F) -> Result<Channels>
    where
        F: Fn(&[C64], &mut [C64]) + Sync,
    {
        let mut data = vec![C64::new(0.0, 0.0); self.len() * k];
        data.par_chunks_mut(k)
            .enumerate()
            .for_each(|(i, out)| g(self.point(i), out));
        if let Some(j) = data.iter().position(|v| !v.is_finite()) {
            return Err(self.non_finite(j / k));
        }
        Ok(Channels { k, data })
    }

    fn non_finite(&self, i: usize) -> Error {
        let coords: Vec<String> = self
            .point(i)
            .iter()
            .map(|c| format!("{:.6e}{:+.6e}i", c.re, c.im))
            .collect();
        Error::NonFiniteIntegrand {
            node: format!("#{i} xi=({})", coords.join(", ")),
        }
    }

    /// Uniform-ball average of the node values, with the scheme's error estimate.
    pub fn estimate(&self, values: &[C64]) -> IntegralResult {
        assert_eq!(values.len(), self.len());
        let nodes_used = values.len();
        match (self.model, &self.weights) {
            (ErrorModel::Exact, Some(w)) => {
                let weighted: Vec<C64> = values.iter().zip(w.iter()).map(|(v, w)| v * w).collect();
                IntegralResult { value: pairwise_sum(&weighted), std_error: 0.0, nodes_used }
            }
            (ErrorModel::Replicates(r), _) => {
                let per = nodes_used / r;
                let means: Vec<C64> = values
                    .chunks(per)
                    .map(|c| pairwise_sum(c) / per as f64)
                    .collect();
                let value = pairwise_sum(&means) / r as f64;
                let var: f64 = means.iter().map(|m| (m - value).norm_sqr()).sum::<f64>()
                    / (r * (r - 1)) as f64;
                IntegralResult { value, std_error: var.sqrt(), nodes_used }
            }
            (ErrorModel::Pairs, _) => {
                let value = pairwise_sum(values) / nodes_used as f64;
                let ss: f64 = values.chunks(2).map(|p| (p[0] - p[1]).norm_sqr()).sum();
                IntegralResult {
                    value,
                    std_error: ss.sqrt() / nodes_used as f64,
                    nodes_used,
                }
            }
            (ErrorModel::Exact, None) => unreachable!("product rules carry weights"),
        }
    }

    /// Standard error of `mean(f)` for the nonlinear functional
    /// `mean|f|^2 - |mean f|^2`, from its influence values `|f_i - mean|^2`.
    pub fn variance_functional(&self, values: &[C64]) -> IntegralResult {
        let mean = self.estimate(values).value;
        let centered: Vec<C64> = values.iter().map(|v| C64::new((v - mean).norm_sqr(), 0.0)).collect();
        self.estimate(&centered)
    }
}

/// Multi-channel node values produced by [`BallRule::evaluate_channels`].
#[derive(Clone, Debug)]
pub struct Channels {
    k: usize,
    data: Vec<C64>,
}

impl Channels {
    pub fn channel(&self, c: usize) -> Vec<C64> {
        self.data.iter().skip(c).step_by(self.k).copied().collect()
    }

    pub fn node(&self, i: usize) -> &[C64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    pub fn width(&self) -> usize {
        self.k
    }
}

/// `int_B g dV` over the unit ball.
pub fn integrate_ball<F>(g: F, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: Fn(&[C64]) -> C64 + Sync,
{
    let rule = BallRule::new(spec)?;
    let values = rule.evaluate(g)?;
    Ok(rule.estimate(&values).scaled(unit_ball_volume(spec.dim)))
}

/// `int_U f dV`, pulled back through the Cayley transform.
pub fn integrate_halfspace<F>(f: F, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: Fn(&HPoint) -> C64 + Sync,
{
    integrate_ball(|xi| f(&cayley_unchecked(xi)) * cayley_jacobian(xi), spec)
}

/// Parameterization of `D(z, r)` by the unit ball: `xi -> sigma_z^{-1}(Phi(tanh(r) xi))`.
#[derive(Clone, Debug)]
pub struct MetricBallChart {
    center: HPoint,
    radius: f64,
    t: f64,
    scale: f64,
}

impl MetricBallChart {
    pub fn new(z: &HPoint, r: f64) -> Result<Self> {
        z.check_interior()?;
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::Domain(format!("radius must be positive, got {r}")));
        }
        let n = z.dim() as i32;
        let t = r.tanh();
        Ok(Self {
            center: z.clone(),
            radius: r,
            t,
            scale: rho(z).powi(n + 1) * t.powi(2 * n),
        })
    }

    pub fn center(&self) -> &HPoint {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Image point and the volume density relative to uniform `xi`
    /// (so that `int_D f dV = vol(B) * E[f(w) * density]`).
    pub fn map(&self, xi: &[C64]) -> (HPoint, f64) {
        let eta: Vec<C64> = xi.iter().map(|c| c * self.t).collect();
        let w = sigma_inv(&self.center, &cayley_unchecked(&eta));
        (w, self.scale * cayley_jacobian(&eta))
    }
}

/// `int_{D(z, r)} f dV`.
pub fn integrate_metric_ball<F>(
    z: &HPoint,
    r: f64,
    f: F,
    spec: &QuadratureSpec,
) -> Result<IntegralResult>
where
    F: Fn(&HPoint) -> C64 + Sync,
{
    let chart = MetricBallChart::new(z, r)?;
    integrate_ball(
        |xi| {
            let (w, d) = chart.map(xi);
            f(&w) * d
        },
        spec,
    )
}

/// Map carrying the measure `|k_i|^2 dV` onto `|k_z|^2 dV`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transport {
    /// `sigma_z^{-1}`.
    Sigma,
    /// `tau_z`, the Cayley conjugate of a ball Möbius map.
    Tau,
}

/// Chart `xi -> T(Phi(xi))` pushing the uniform ball law to `|k_z|^2 dV`.
#[derive(Clone, Debug)]
pub struct KernelChart {
    center: HPoint,
    kind: Transport,
    ball_center: Vec<C64>,
}

impl KernelChart {
    pub fn new(z: &HPoint, kind: Transport) -> Result<Self> {
        z.check_interior()?;
        let ball_center = crate::geometry::cayley_inv(z)?.into_vec();
        Ok(Self { center: z.clone(), kind, ball_center })
    }

    pub fn center(&self) -> &HPoint {
        &self.center
    }

    pub fn map(&self, xi: &[C64]) -> HPoint {
        match self.kind {
            Transport::Sigma => sigma_inv(&self.center, &cayley_unchecked(xi)),
            Transport::Tau => cayley_unchecked(&mobius_ball_unchecked(&self.ball_center, xi)),
        }
    }
}

/// `int_U f |k_z|^2 dV`, computed as a uniform ball average.
pub fn kernel_mean<F>(z: &HPoint, f: F, spec: &QuadratureSpec, kind: Transport) -> Result<IntegralResult>
where
    F: Fn(&HPoint) -> C64 + Sync,
{
    let chart = KernelChart::new(z, kind)?;
    let rule = BallRule::new(spec)?;
    let values = rule.evaluate(|xi| f(&chart.map(xi)))?;
    Ok(rule.estimate(&values))
}

/// Pseudo-random points of `D(z, r)`, uniform in the ball model, each
/// checked against `beta(z, w) < r`.
pub fn sample_metric_ball(z: &HPoint, r: f64, count: usize, seed: u64) -> Result<Vec<HPoint>> {
    if count == 0 {
        return Err(Error::InvalidSpec("sample count must be at least 1".into()));
    }
    let chart = MetricBallChart::new(z, r)?;
    let n = z.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut u = vec![0.0; 2 * n];
    let mut xi = vec![C64::new(0.0, 0.0); n];
    while out.len() < count {
        for x in u.iter_mut() {
            *x = rng.random::<f64>();
        }
        rules::cube_to_ball(&u, &mut xi);
        let (w, _) = chart.map(&xi);
        if w.is_interior() && bergman_metric(z, &w)? < r {
            out.push(w);
        }
    }
    Ok(out)
}
