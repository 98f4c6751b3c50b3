//! Berezin transform, mean oscillation, Bergman-ball averages and the
//! seminorm scans built on them.
//!
//! Integrals against `|k_z|^2 dV` are uniform ball averages through a
//! [`KernelChart`]. Symbols with a declared support are integrated instead
//! with the polar product rule laid over the support ball, which keeps the
//! values deterministic and accurate far from the support.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    bergman_metric, berezin_weight, dilation, kernel_constant, rho, rho_pair_unchecked,
    unit_ball_volume, HPoint, C64, I,
};
use crate::integrate::rules::{cube_to_ball, halton, splitmix64};
use crate::integrate::{
    BallRule, Channels, IntegralResult, KernelChart, MetricBallChart, QuadratureSpec, Scheme,
    Transport,
};
use crate::symbols::{support_in_dim, Claim, Symbol};

/// Radius used when none is given (the unit-radius oscillation `w(f)`).
pub const DEFAULT_RADIUS: f64 = 1.0;

/// Clamp level for the `atanh` argument when reading `beta` off a ball radius.
const MAX_TANH: f64 = 1.0 - 1e-16;

/// A real estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// A mean-oscillation value together with its radicand.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoEstimate {
    pub value: f64,
    pub radicand: f64,
    /// Standard error of the radicand.
    pub std_error: f64,
}

impl MoEstimate {
    fn from_radicand(radicand: f64, std_error: f64, scale: f64) -> Result<Self> {
        let tol = 3.0 * std_error + 1e-12 * scale.abs();
        let clamped = if radicand >= 0.0 {
            radicand
        } else if radicand > -tol {
            0.0
        } else {
            return Err(Error::QuadratureInconsistency { radicand, std_error });
        };
        Ok(Self { value: clamped.sqrt(), radicand, std_error })
    }
}

/// The two evaluations of one mean oscillation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoRoutes {
    /// `(mean |f|^2 - |mean f|^2)^{1/2}`.
    pub definition: MoEstimate,
    /// Single integral of `|f - c|^2` with the centre `c` estimated independently.
    pub centered: MoEstimate,
}

impl MoRoutes {
    /// `|a - b| <= k * sqrt(se_a^2 + se_b^2) + abs_tol`, compared on radicands.
    pub fn agree(&self, k: f64, abs_tol: f64) -> bool {
        let (a, b) = (self.definition, self.centered);
        (a.radicand - b.radicand).abs()
            <= k * a.std_error.hypot(b.std_error) + abs_tol
    }
}

fn supported_spec(spec: &QuadratureSpec) -> QuadratureSpec {
    spec.with_scheme(Scheme::PolarProduct)
}

/// Channels of `g * |k_z|^2` whose rule estimates are integrals over `U`.
fn kernel_channels<G>(
    f: &Symbol,
    z: &HPoint,
    spec: &QuadratureSpec,
    kind: Transport,
    k: usize,
    g: G,
) -> Result<(BallRule, Channels)>
where
    G: Fn(&HPoint, &mut [C64]) + Sync,
{
    z.check_interior()?;
    match f.support() {
        Some(s) => {
            let s = support_in_dim(s, z.dim());
            let chart = MetricBallChart::new(&s.center, s.radius)?;
            let rule = BallRule::new(&supported_spec(spec))?;
            let vol = unit_ball_volume(z.dim());
            let ch = rule.evaluate_channels(k, |xi, out| {
                let (w, d) = chart.map(xi);
                g(&w, out);
                let wt = berezin_weight(z, &w) * d * vol;
                for o in out.iter_mut() {
                    *o *= wt;
                }
            })?;
            Ok((rule, ch))
        }
        None => {
            let chart = KernelChart::new(z, kind)?;
            let rule = BallRule::new(spec)?;
            let ch = rule.evaluate_channels(k, |xi, out| g(&chart.map(xi), out))?;
            Ok((rule, ch))
        }
    }
}

/// Berezin transform `f~(z) = int f |k_z|^2 dV` through the chosen transport.
pub fn berezin_with(f: &Symbol, z: &HPoint, spec: &QuadratureSpec, kind: Transport) -> Result<IntegralResult> {
    let (rule, ch) = kernel_channels(f, z, spec, kind, 1, |w, out| out[0] = f.value(w))?;
    Ok(rule.estimate(&ch.channel(0)))
}

/// Berezin transform `f~(z)`.
pub fn berezin(f: &Symbol, z: &HPoint, spec: &QuadratureSpec) -> Result<IntegralResult> {
    berezin_with(f, z, spec, Transport::Sigma)
}

fn mo_definition(f: &Symbol, z: &HPoint, spec: &QuadratureSpec, kind: Transport) -> Result<MoEstimate> {
    let (rule, ch) = kernel_channels(f, z, spec, kind, 2, |w, out| {
        let v = f.value(w);
        out[0] = v;
        out[1] = C64::new(v.norm_sqr(), 0.0);
    })?;
    let mean = rule.estimate(&ch.channel(0)).value;
    let second = rule.estimate(&ch.channel(1)).value.re;
    let radicand = second - mean.norm_sqr();
    let std_error = if f.support().is_some() {
        0.0
    } else {
        rule.variance_functional(&ch.channel(0)).std_error
    };
    MoEstimate::from_radicand(radicand, std_error, second)
}

fn mo_centered(f: &Symbol, z: &HPoint, spec: &QuadratureSpec, kind: Transport) -> Result<MoEstimate> {
    let c = berezin_with(f, z, &spec.with_seed(spec.seed.wrapping_add(1)), kind)?.value;
    // Supported symbols only see the support, so subtract |c|^2 there and add it back.
    let offset = if f.support().is_some() { c.norm_sqr() } else { 0.0 };
    let (rule, ch) = kernel_channels(f, z, spec, kind, 1, |w, out| {
        out[0] = C64::new((f.value(w) - c).norm_sqr() - offset, 0.0);
    })?;
    let est = rule.estimate(&ch.channel(0));
    let radicand = est.value.re + offset;
    MoEstimate::from_radicand(radicand, est.std_error, radicand.abs() + offset)
}

/// `MO(f)(z)` by the definition route.
pub fn mean_oscillation(f: &Symbol, z: &HPoint, spec: &QuadratureSpec) -> Result<MoEstimate> {
    mo_definition(f, z, spec, Transport::Sigma)
}

/// `MO(f)(z)` by the definition route through a chosen transport.
pub fn mean_oscillation_with(f: &Symbol, z: &HPoint, spec: &QuadratureSpec, kind: Transport) -> Result<MoEstimate> {
    mo_definition(f, z, spec, kind)
}

/// Both routes to `MO(f)(z)`.
pub fn mean_oscillation_routes(f: &Symbol, z: &HPoint, spec: &QuadratureSpec) -> Result<MoRoutes> {
    Ok(MoRoutes {
        definition: mo_definition(f, z, spec, Transport::Sigma)?,
        centered: mo_centered(f, z, spec, Transport::Sigma)?,
    })
}

/// Ratio estimator `sum a / sum d` with a linearized standard error.
fn ratio_estimate(rule: &BallRule, a: &[C64], d: &[C64]) -> IntegralResult {
    let num = rule.estimate(a);
    let den = rule.estimate(d).value.re;
    let ratio = num.value / den;
    let influence: Vec<C64> = a.iter().zip(d).map(|(a, d)| (a - ratio * d.re) / den).collect();
    IntegralResult {
        value: ratio,
        std_error: rule.estimate(&influence).std_error,
        nodes_used: num.nodes_used,
    }
}

fn disjoint_from_support(f: &Symbol, z: &HPoint, r: f64) -> Result<bool> {
    match f.support() {
        Some(s) => {
            let s = support_in_dim(s, z.dim());
            Ok(bergman_metric(z, &s.center)? >= r + s.radius)
        }
        None => Ok(false),
    }
}

fn ball_channels(f: &Symbol, z: &HPoint, r: f64, spec: &QuadratureSpec) -> Result<(BallRule, Channels)> {
    let chart = MetricBallChart::new(z, r)?;
    let rule = BallRule::new(spec)?;
    let ch = rule.evaluate_channels(2, |xi, out| {
        let (w, d) = chart.map(xi);
        out[0] = f.value(&w);
        out[1] = C64::new(d, 0.0);
    })?;
    Ok((rule, ch))
}

fn zero_result(_spec: &QuadratureSpec) -> IntegralResult {
    IntegralResult { value: C64::new(0.0, 0.0), std_error: 0.0, nodes_used: 0 }
}

/// Average `f^_r(z)` of `f` over `D(z, r)`.
pub fn ball_average(f: &Symbol, z: &HPoint, r: f64, spec: &QuadratureSpec) -> Result<IntegralResult> {
    if disjoint_from_support(f, z, r)? {
        return Ok(zero_result(spec));
    }
    let (rule, ch) = ball_channels(f, z, r, spec)?;
    let d = ch.channel(1);
    let a: Vec<C64> = ch.channel(0).iter().zip(&d).map(|(v, d)| v * d.re).collect();
    Ok(ratio_estimate(&rule, &a, &d))
}

fn mo_r_ball(f: &Symbol, z: &HPoint, r: f64, spec: &QuadratureSpec) -> Result<MoEstimate> {
    let (rule, ch) = ball_channels(f, z, r, spec)?;
    let vals = ch.channel(0);
    let d = ch.channel(1);
    let fd: Vec<C64> = vals.iter().zip(&d).map(|(v, d)| v * d.re).collect();
    let mean = ratio_estimate(&rule, &fd, &d).value;
    let dev: Vec<C64> = vals
        .iter()
        .zip(&d)
        .map(|(v, d)| C64::new((v - mean).norm_sqr() * d.re, 0.0))
        .collect();
    let est = ratio_estimate(&rule, &dev, &d);
    let second: f64 = {
        let sq: Vec<C64> = vals.iter().zip(&d).map(|(v, d)| C64::new(v.norm_sqr() * d.re, 0.0)).collect();
        ratio_estimate(&rule, &sq, &d).value.re
    };
    MoEstimate::from_radicand(second - mean.norm_sqr(), est.std_error, second)
}

fn mo_r_pairs(f: &Symbol, z: &HPoint, r: f64, spec: &QuadratureSpec) -> Result<MoEstimate> {
    let (rule, u) = ball_channels(f, z, r, spec)?;
    let Some(perm) = rule.grouped_permutation(splitmix64(spec.seed, PAIR_SALT)) else {
        return mo_r_double_sum(f, z, r, spec, &rule, &u);
    };
    let (_, v) = ball_channels(f, z, r, &spec.with_seed(spec.seed.wrapping_add(1)))?;
    let (fu, du, fv, dv) = (u.channel(0), u.channel(1), v.channel(0), v.channel(1));
    let mu = rule.estimate(&du).value.re;
    let mv = rule.estimate(&dv).value.re;
    let h: Vec<C64> = (0..fu.len())
        .map(|i| {
            let j = perm[i];
            C64::new(0.5 * (fu[i] - fv[j]).norm_sqr() * du[i].re * dv[j].re / (mu * mv), 0.0)
        })
        .collect();
    let est = rule.estimate(&h);
    MoEstimate::from_radicand(est.value.re, est.std_error, est.value.re)
}

const PAIR_SALT: u64 = 0x5041_4952;

/// Product rules: full double sum against an independent coarser rule.
fn mo_r_double_sum(
    f: &Symbol,
    z: &HPoint,
    r: f64,
    spec: &QuadratureSpec,
    rule: &BallRule,
    u: &Channels,
) -> Result<MoEstimate> {
    let coarse = QuadratureSpec::new(spec.scheme, (spec.node_count / 4).max(QuadratureSpec::MIN_NODES), spec.seed, spec.dim)?;
    let (rv, v) = ball_channels(f, z, r, &coarse)?;
    let (fu, du, fv, dv) = (u.channel(0), u.channel(1), v.channel(0), v.channel(1));
    let wu: Vec<f64> = (0..fu.len()).map(|i| rule.weight(i) * du[i].re).collect();
    let wv: Vec<f64> = (0..fv.len()).map(|j| rv.weight(j) * dv[j].re).collect();
    let (mu, mv) = (wu.iter().sum::<f64>(), wv.iter().sum::<f64>());
    let total: f64 = (0..fu.len())
        .into_par_iter()
        .map(|i| wu[i] * fv.iter().zip(&wv).map(|(g, w)| w * (fu[i] - g).norm_sqr()).sum::<f64>())
        .sum();
    let m = 0.5 * total / (mu * mv);
    MoEstimate::from_radicand(m, 0.0, m)
}

/// Both routes to `MO_r(f)(z)`: ball moments, and the symmetric double integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoRRoutes {
    pub moments: MoEstimate,
    pub double_integral: MoEstimate,
}

impl MoRRoutes {
    pub fn agree(&self, k: f64, abs_tol: f64) -> bool {
        let (a, b) = (self.moments, self.double_integral);
        (a.radicand - b.radicand).abs() <= k * a.std_error.hypot(b.std_error) + abs_tol
    }
}

fn zero_mo() -> MoEstimate {
    MoEstimate { value: 0.0, radicand: 0.0, std_error: 0.0 }
}

/// `MO_r(f)(z)` over the Bergman ball `D(z, r)`.
pub fn mean_oscillation_r(f: &Symbol, z: &HPoint, r: f64, spec: &QuadratureSpec) -> Result<MoEstimate> {
    if disjoint_from_support(f, z, r)? {
        return Ok(zero_mo());
    }
    mo_r_ball(f, z, r, spec)
}

pub fn mean_oscillation_r_routes(f: &Symbol, z: &HPoint, r: f64, spec: &QuadratureSpec) -> Result<MoRRoutes> {
    if disjoint_from_support(f, z, r)? {
        return Ok(MoRRoutes { moments: zero_mo(), double_integral: zero_mo() });
    }
    Ok(MoRRoutes {
        moments: mo_r_ball(f, z, r, spec)?,
        double_integral: mo_r_pairs(f, z, r, spec)?,
    })
}

/// Sampled `w_r(f)(z) = sup { |f(z) - f(w)| : w in D(z, r) }`.
pub fn oscillation_sup_r(f: &Symbol, z: &HPoint, r: f64, count: usize, seed: u64) -> Result<f64> {
    if count < 100 {
        return Err(Error::InvalidSpec(format!("oscillation sup needs at least 100 samples, got {count}")));
    }
    let fz = f.value(z);
    let pts = crate::integrate::sample_metric_ball(z, r, count, seed)?;
    Ok(pts.iter().map(|w| (fz - f.value(w)).norm()).fold(0.0, f64::max))
}

fn sqrt_estimate(v: IntegralResult) -> Estimate {
    let m = v.value.re.max(0.0);
    let value = m.sqrt();
    let std_error = if value > 0.0 { v.std_error / (2.0 * value) } else { v.std_error.sqrt() };
    Estimate { value, std_error }
}

/// `((|f|^2)^_r(z))^{1/2}`.
pub fn ba_seminorm_r(f: &Symbol, z: &HPoint, r: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    Ok(sqrt_estimate(ball_average(&f.abs_sqr(), z, r, spec)?))
}

/// `((|f|^2)~(z))^{1/2}`, the Berezin form of the `BA` quantity.
pub fn ba_berezin(f: &Symbol, z: &HPoint, spec: &QuadratureSpec) -> Result<Estimate> {
    Ok(sqrt_estimate(berezin(&f.abs_sqr(), z, spec)?))
}

/// `int_U beta(z,w)^alpha rho(w)^t / |rho(z,w)|^s dV(w)`.
pub fn forelli_rudin_integral(
    z: &HPoint,
    t: f64,
    s: f64,
    alpha: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    let n = z.dim() as f64;
    if !(t > -1.0) || !(s - t > n + 1.0) || !(alpha >= 0.0) {
        return Err(Error::ParameterDomain(format!(
            "need t > -1, s - t > n + 1, alpha >= 0; got t={t}, s={s}, alpha={alpha}, n={n}"
        )));
    }
    forelli_rudin_unchecked(z, t, s, alpha, spec)
}

/// The same integral without the convergence hypotheses; useful to watch it diverge.
pub fn forelli_rudin_unchecked(
    z: &HPoint,
    t: f64,
    s: f64,
    alpha: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralResult> {
    let n = z.dim();
    let chart = KernelChart::new(z, Transport::Sigma)?;
    let rule = BallRule::new(spec)?;
    let norm = kernel_constant(n) * rho(z).powi(n as i32 + 1);
    let values = rule.evaluate(|xi| {
        let w = chart.map(xi);
        // sigma_z^{-1} is an isometry sending i to z, so beta(z, w) = atanh|xi|.
        let r = xi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let beta = r.min(MAX_TANH).atanh();
        let rzw = rho_pair_unchecked(z, &w).norm();
        let g = beta.powf(alpha) * rho(&w).powf(t) * rzw.powf(2.0 * (n as f64 + 1.0) - s) / norm;
        C64::new(g, 0.0)
    })?;
    Ok(rule.estimate(&values))
}

/// Splits `f` as `f^_r + (f - f^_r)`. Each evaluation of the first part runs
/// a ball average with `spec`, so both parts are deterministic functions.
pub fn bo_ba_decompose(f: &Symbol, r: f64, spec: &QuadratureSpec) -> Result<(Symbol, Symbol)> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("radius must be positive, got {r}")));
    }
    let (g, spec1) = (f.clone(), spec.clone());
    let part1 = Symbol::from_fn(format!("avg_{r}({})", f.id()), &[], move |z| {
        ball_average(&g, z, r, &spec1).map(|v| v.value).unwrap_or(C64::new(f64::NAN, 0.0))
    });
    let part2 = f.minus(&part1, format!("{}-avg_{r}", f.id()));
    Ok((part1, part2))
}

// ---------------------------------------------------------------------------
// Grids and scans
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    /// `dilation-up`, `dilation-down`, `horizontal` or `interior`.
    pub ray: &'static str,
    /// Dilation factor, horizontal offset, or point index.
    pub param: f64,
    pub point: HPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridPreset {
    /// `delta_t(i)` for `t = 2^0..2^8` and `2^0..2^-8`, plus `(0', x + i)` for `x = 0, 2^0..2^12`.
    RayLadder,
    /// 200 Halton points of the ball mapped through the Cayley transform.
    InteriorQmc,
    Full,
}

impl GridPreset {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "ray-ladder" => Ok(GridPreset::RayLadder),
            "interior-qmc" => Ok(GridPreset::InteriorQmc),
            "full" => Ok(GridPreset::Full),
            other => Err(Error::InvalidSpec(format!("unknown grid preset `{other}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GridPreset::RayLadder => "ray-ladder",
            GridPreset::InteriorQmc => "interior-qmc",
            GridPreset::Full => "full",
        }
    }
}

pub const INTERIOR_POINTS: usize = 200;

pub fn ray_ladder(n: usize) -> Vec<GridPoint> {
    let base = HPoint::base(n);
    let mut g = Vec::new();
    for k in 0..=8 {
        let t = 2f64.powi(k);
        g.push(GridPoint { ray: "dilation-up", param: t, point: dilation(t, &base) });
    }
    for k in 0..=8 {
        let t = 2f64.powi(-k);
        g.push(GridPoint { ray: "dilation-down", param: t, point: dilation(t, &base) });
    }
    let zero = vec![C64::new(0.0, 0.0); n - 1];
    g.push(GridPoint { ray: "horizontal", param: 0.0, point: HPoint::new(zero.clone(), I) });
    for k in 0..=12 {
        let x = 2f64.powi(k);
        g.push(GridPoint { ray: "horizontal", param: x, point: HPoint::new(zero.clone(), C64::new(x, 1.0)) });
    }
    g
}

pub fn interior_qmc(n: usize) -> Vec<GridPoint> {
    let mut u = vec![0.0; 2 * n];
    let mut xi = vec![C64::new(0.0, 0.0); n];
    (0..INTERIOR_POINTS)
        .map(|i| {
            halton(i as u64 + 1, 2 * n, &mut u);
            cube_to_ball(&u, &mut xi);
            GridPoint {
                ray: "interior",
                param: i as f64,
                point: crate::geometry::cayley_unchecked(&xi),
            }
        })
        .collect()
}

pub fn build_grid(preset: GridPreset, n: usize) -> Vec<GridPoint> {
    match preset {
        GridPreset::RayLadder => ray_ladder(n),
        GridPreset::InteriorQmc => interior_qmc(n),
        GridPreset::Full => {
            let mut g = ray_ladder(n);
            g.extend(interior_qmc(n));
            g
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Seminorm {
    /// `MO(f)(z)`.
    Bmo,
    /// `MO_r(f)(z)`.
    BmoR(f64),
    /// Sampled `w_r(f)(z)`.
    Bo(f64),
    /// `((|f|^2)~(z))^{1/2}`.
    Ba,
    /// `((|f|^2)^_r(z))^{1/2}`.
    BaR(f64),
    /// `|grad~ f(z)|`.
    Bloch,
}

impl Seminorm {
    pub fn label(self) -> String {
        match self {
            Seminorm::Bmo => "BMO".into(),
            Seminorm::BmoR(r) => format!("BMO_r(r={r})"),
            Seminorm::Bo(r) => format!("BO(r={r})"),
            Seminorm::Ba => "BA".into(),
            Seminorm::BaR(r) => format!("BA_r(r={r})"),
            Seminorm::Bloch => "Bloch".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RayProfile {
    pub ray: &'static str,
    pub params: Vec<f64>,
    pub values: Vec<f64>,
}

impl RayProfile {
    /// True when the values never increase from index `start` on, up to `slack`
    /// relative to the running value.
    pub fn nonincreasing_from(&self, start: usize, slack: f64) -> bool {
        self.values[start.min(self.values.len())..]
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + slack) + f64::MIN_POSITIVE)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeminormScan {
    pub which: String,
    pub grid: Vec<GridPoint>,
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub sup_estimate: f64,
    pub decay_profile: Vec<RayProfile>,
}

impl SeminormScan {
    pub fn from_values(which: String, grid: Vec<GridPoint>, est: Vec<Estimate>) -> Self {
        let values: Vec<f64> = est.iter().map(|e| e.value).collect();
        let std_errors = est.iter().map(|e| e.std_error).collect();
        let sup_estimate = values.iter().copied().fold(0.0, f64::max);
        let mut decay_profile: Vec<RayProfile> = Vec::new();
        for (g, v) in grid.iter().zip(&values) {
            if g.ray == "interior" {
                continue;
            }
            match decay_profile.iter_mut().find(|p| p.ray == g.ray) {
                Some(p) => {
                    p.params.push(g.param);
                    p.values.push(*v);
                }
                None => decay_profile.push(RayProfile { ray: g.ray, params: vec![g.param], values: vec![*v] }),
            }
        }
        Self { which, grid, values, std_errors, sup_estimate, decay_profile }
    }

    pub fn profile(&self, ray: &str) -> Option<&RayProfile> {
        self.decay_profile.iter().find(|p| p.ray == ray)
    }
}

/// Evaluates one seminorm quantity at a single point.
pub fn seminorm_at(f: &Symbol, which: Seminorm, z: &HPoint, spec: &QuadratureSpec) -> Result<Estimate> {
    Ok(match which {
        Seminorm::Bmo => {
            let m = mean_oscillation(f, z, spec)?;
            Estimate { value: m.value, std_error: mo_value_error(&m) }
        }
        Seminorm::BmoR(r) => {
            let m = mean_oscillation_r(f, z, r, spec)?;
            Estimate { value: m.value, std_error: mo_value_error(&m) }
        }
        Seminorm::Bo(r) => Estimate {
            value: oscillation_sup_r(f, z, r, spec.node_count, spec.seed)?,
            std_error: 0.0,
        },
        Seminorm::Ba => ba_berezin(f, z, spec)?,
        Seminorm::BaR(r) => ba_seminorm_r(f, z, r, spec)?,
        Seminorm::Bloch => {
            if !f.has(Claim::Holomorphic) {
                return Err(Error::NotHolomorphic(f.id().into()));
            }
            Estimate { value: crate::bloch::invariant_gradient(f, z)?, std_error: 0.0 }
        }
    })
}

/// Standard error of `MO` propagated from its radicand.
pub fn mo_value_error(m: &MoEstimate) -> f64 {
    if m.value > 0.0 {
        m.std_error / (2.0 * m.value)
    } else {
        m.std_error.sqrt()
    }
}

/// Scans `which` over `grid`; point `k` uses `spec.for_point(k)`.
pub fn seminorm_scan(f: &Symbol, which: Seminorm, grid: &[GridPoint], spec: &QuadratureSpec) -> Result<SeminormScan> {
    spec.validate()?;
    let est: Vec<Estimate> = grid
        .par_iter()
        .enumerate()
        .map(|(k, g)| seminorm_at(f, which, &g.point, &spec.for_point(k)))
        .collect::<Result<_>>()?;
    Ok(SeminormScan::from_values(which.label(), grid.to_vec(), est))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{make_symbol, params, Params};

    fn spec(scheme: Scheme, nodes: usize, n: usize) -> QuadratureSpec {
        QuadratureSpec::new(scheme, nodes, 11, n).unwrap()
    }

    #[test]
    fn constants() {
        let c = make_symbol("const", &params(&[("c", 3.0)])).unwrap();
        let z = HPoint::new(vec![], C64::new(2.0, 0.5));
        let s = spec(Scheme::QuasiRandom, 2000, 1);
        assert!((berezin(&c, &z, &s).unwrap().value - C64::new(3.0, 0.0)).norm() < 1e-12);
        assert_eq!(mean_oscillation(&c, &z, &s).unwrap().value, 0.0);
        assert!((ball_average(&c, &z, 1.0, &s).unwrap().value.re - 3.0).abs() < 1e-12);
        assert_eq!(mean_oscillation_r(&c, &z, 1.0, &s).unwrap().value, 0.0);
        assert_eq!(oscillation_sup_r(&c, &z, 1.0, 100, 1).unwrap(), 0.0);
        assert!((ba_seminorm_r(&c, &z, 0.5, &s).unwrap().value - 3.0).abs() < 1e-12);
    }

    #[test]
    fn beta_dist_oscillation_respects_radius() {
        let f = make_symbol("beta-dist", &Params::new()).unwrap();
        let z = HPoint::new(vec![C64::new(0.2, 0.0)], C64::new(1.0, 2.0));
        let w = oscillation_sup_r(&f, &z, 0.7, 500, 5).unwrap();
        assert!(w <= 0.7 && w > 0.3);
    }

    #[test]
    fn forelli_rudin_domain() {
        let s = spec(Scheme::PolarProduct, 1000, 1);
        let i = HPoint::base(1);
        assert!(matches!(forelli_rudin_integral(&i, 0.0, 2.0, 0.0, &s), Err(Error::ParameterDomain(_))));
        assert!(forelli_rudin_integral(&i, -1.0, 3.0, 0.0, &s).is_err());
        assert!(forelli_rudin_integral(&i, 0.0, 3.0, 0.0, &s).unwrap().value.re > 0.0);
    }

    #[test]
    fn decomposition_sums_exactly() {
        let f = make_symbol("beta-dist", &Params::new()).unwrap();
        let (p1, p2) = bo_ba_decompose(&f, 1.0, &spec(Scheme::QuasiRandom, 400, 1)).unwrap();
        for z in ray_ladder(1).iter().take(5) {
            let z = &z.point;
            assert_eq!(f.value(z) - p1.value(z) - p2.value(z), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn grid_shapes() {
        let g = ray_ladder(2);
        assert_eq!(g.len(), 9 + 9 + 14);
        assert!(g.iter().all(|p| p.point.is_interior()));
        assert_eq!(build_grid(GridPreset::Full, 2).len(), 32 + 200);
        assert!(interior_qmc(1).iter().all(|p| p.point.is_interior()));
    }

    #[test]
    fn radicand_clamp() {
        assert_eq!(MoEstimate::from_radicand(-1e-3, 1e-3, 1.0).unwrap().value, 0.0);
        assert!(MoEstimate::from_radicand(-1.0, 1e-3, 1.0).is_err());
    }
}
