//! Invariant gradients on `U` and on the ball, Bloch scans, and Lipschitz
//! estimates against the Bergman metric.
//!
//! `invariant_gradient` evaluates
//! `|grad~ f(z)|^2 = 2 rho(z) (4 rho(z) |df/dz_n|^2 + sum_j |df/dz_j + 2i conj(z_j) df/dz_n|^2)`.
//! With this normalization the Cayley transfer reads
//! `|grad~ f(z)| = sqrt(2) |grad~_B (f o Phi)(Phi^{-1} z)|`, see [`BALL_TRANSFER_FACTOR`].

use std::f64::consts::SQRT_2;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    bergman_metric, cayley_inv, cayley_unchecked, mobius_ball_unchecked, rho, BPoint, HPoint, C64, I,
};
use crate::integrate::QuadratureSpec;
use crate::oscillation::{ball_average, Estimate, GridPoint, SeminormScan};
use crate::symbols::{eval_symbol_gradient, fd_gradient, Claim, Symbol};

/// Ratio `|grad~ f(z)| / |grad~_B (f o Phi)(Phi^{-1} z)|` for the formula implemented here.
pub const BALL_TRANSFER_FACTOR: f64 = SQRT_2;

/// Number of points sampled along a geodesic in [`lipschitz_ratio`].
pub const GEODESIC_SAMPLES: usize = 65;

pub fn require_holomorphic(f: &Symbol) -> Result<()> {
    if f.has(Claim::Holomorphic) {
        Ok(())
    } else {
        Err(Error::NotHolomorphic(f.id().into()))
    }
}

/// `|grad~ f(z)|` from the holomorphic partials of `f` at `z`.
pub fn invariant_gradient_from_partials(z: &HPoint, d: &[C64]) -> f64 {
    let r = rho(z);
    let dn = d[d.len() - 1];
    let tangential: f64 = z
        .zp()
        .iter()
        .zip(d)
        .map(|(zj, dj)| (dj + 2.0 * I * zj.conj() * dn).norm_sqr())
        .sum();
    (2.0 * r * (4.0 * r * dn.norm_sqr() + tangential)).sqrt()
}

/// `|grad~ f(z)|`, analytic channel when the symbol has one.
pub fn invariant_gradient(f: &Symbol, z: &HPoint) -> Result<f64> {
    require_holomorphic(f)?;
    let d = eval_symbol_gradient(f, z)?;
    Ok(invariant_gradient_from_partials(z, &d))
}

/// `|grad~ f(z)|` from central differences.
pub fn invariant_gradient_fd(f: &Symbol, z: &HPoint) -> Result<f64> {
    require_holomorphic(f)?;
    let d = fd_gradient(f, z)?;
    Ok(invariant_gradient_from_partials(z, &d))
}

fn check_ball(xi: &BPoint) -> Result<()> {
    let norm = xi.norm();
    if norm < 1.0 {
        Ok(())
    } else {
        Err(Error::OutsideBall { norm })
    }
}

/// `|grad~_B g(xi)| = |grad (g o phi_xi)(0)|` by central differences with
/// step `1e-6 (1 - |xi|)`.
pub fn ball_invariant_gradient<G>(g: G, xi: &BPoint) -> Result<f64>
where
    G: Fn(&[C64]) -> C64,
{
    check_ball(xi)?;
    let n = xi.dim();
    let h = 1e-6 * (1.0 - xi.norm());
    let mut eta = vec![C64::new(0.0, 0.0); n];
    let mut total = 0.0;
    for k in 0..n {
        eta[k] = C64::new(h, 0.0);
        let fp = g(&mobius_ball_unchecked(xi.xi(), &eta));
        eta[k] = C64::new(-h, 0.0);
        let fm = g(&mobius_ball_unchecked(xi.xi(), &eta));
        eta[k] = C64::new(0.0, 0.0);
        let d = (fp - fm) / (2.0 * h);
        if !d.is_finite() {
            return Err(Error::Domain(format!("non-finite ball derivative at |xi| = {}", xi.norm())));
        }
        total += d.norm_sqr();
    }
    Ok(total.sqrt())
}

/// Holomorphic Jacobian of the Cayley transform at `xi`, as `out[j][k] = dPhi_j / dxi_k`.
fn cayley_derivative(xi: &[C64]) -> Vec<Vec<C64>> {
    let n = xi.len();
    let d = C64::new(1.0, 0.0) + xi[n - 1];
    let d2 = d * d;
    let mut m = vec![vec![C64::new(0.0, 0.0); n]; n];
    for j in 0..n - 1 {
        m[j][j] = d.inv();
        m[j][n - 1] = -xi[j] / d2;
    }
    m[n - 1][n - 1] = -2.0 * I / d2;
    m
}

/// `D phi_xi(0) = -(1 - |xi|^2) P_xi - sqrt(1 - |xi|^2) Q_xi`.
fn mobius_derivative_at_zero(xi: &[C64]) -> Vec<Vec<C64>> {
    let n = xi.len();
    let xi2: f64 = xi.iter().map(|c| c.norm_sqr()).sum();
    let s = (1.0 - xi2).sqrt();
    let mut m = vec![vec![C64::new(0.0, 0.0); n]; n];
    for a in 0..n {
        for b in 0..n {
            let p = if xi2 > 0.0 { xi[a] * xi[b].conj() / xi2 } else { C64::new(0.0, 0.0) };
            let id = if a == b { 1.0 } else { 0.0 };
            m[a][b] = -(1.0 - xi2) * p - s * (id - p);
        }
    }
    m
}

/// `|grad~_B (f o Phi)(xi)|` by the chain rule through the analytic channel.
pub fn ball_invariant_gradient_analytic(f: &Symbol, xi: &BPoint) -> Result<f64> {
    check_ball(xi)?;
    require_holomorphic(f)?;
    let z = cayley_unchecked(xi.xi());
    let g = eval_symbol_gradient(f, &z)?;
    let dphi = cayley_derivative(xi.xi());
    let dm = mobius_derivative_at_zero(xi.xi());
    let n = xi.dim();
    let v: Vec<C64> = (0..n).map(|k| (0..n).map(|j| g[j] * dphi[j][k]).sum()).collect();
    let w: Vec<C64> = (0..n).map(|k| (0..n).map(|m| v[m] * dm[m][k]).sum()).collect();
    Ok(w.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
}

/// Gradient at one point by three routes.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientReport {
    pub point: HPoint,
    pub invariant_gradient: f64,
    /// `BALL_TRANSFER_FACTOR * |grad~_B (f o Phi)(Phi^{-1} z)|` by finite differences.
    pub ball_transfer_value: f64,
    pub fd_gradient: f64,
    /// Relative deviations: (invariant vs transfer, invariant vs fd, transfer vs fd).
    pub residuals: [f64; 3],
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub fn gradient_report(f: &Symbol, z: &HPoint) -> Result<GradientReport> {
    let inv = invariant_gradient(f, z)?;
    let xi = cayley_inv(z)?;
    let ball = BALL_TRANSFER_FACTOR * ball_invariant_gradient(|e| f.value(&cayley_unchecked(e)), &xi)?;
    let fd = invariant_gradient_fd(f, z)?;
    Ok(GradientReport {
        point: z.clone(),
        invariant_gradient: inv,
        ball_transfer_value: ball,
        fd_gradient: fd,
        residuals: [rel(inv, ball), rel(inv, fd), rel(ball, fd)],
    })
}

/// Bloch scan of `|grad~ f|` over a grid.
pub fn bloch_seminorm_scan(f: &Symbol, grid: &[GridPoint]) -> Result<SeminormScan> {
    require_holomorphic(f)?;
    let est: Vec<Estimate> = grid
        .par_iter()
        .map(|g| invariant_gradient(f, &g.point).map(|v| Estimate { value: v, std_error: 0.0 }))
        .collect::<Result<_>>()?;
    Ok(SeminormScan::from_values("Bloch".into(), grid.to_vec(), est))
}

/// Points `gamma(t) = Phi(phi_xi(t * phi_xi(eta)))`, `t in [0, 1]`, on the
/// geodesic from `z = Phi(xi)` to `w = Phi(eta)`.
pub fn geodesic(z: &HPoint, w: &HPoint, samples: usize) -> Result<Vec<HPoint>> {
    let xi = cayley_inv(z)?;
    let eta = cayley_inv(w)?;
    let v = mobius_ball_unchecked(xi.xi(), eta.xi());
    Ok((0..samples)
        .map(|k| {
            let t = k as f64 / (samples - 1).max(1) as f64;
            let p: Vec<C64> = v.iter().map(|c| c * t).collect();
            cayley_unchecked(&mobius_ball_unchecked(xi.xi(), &p))
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct LipschitzReport {
    /// `2 |f(z) - f(w)| / beta(z, w)`.
    pub ratio: f64,
    /// Largest `|grad~ f|` sampled on the geodesic.
    pub geodesic_sup: f64,
    pub beta: f64,
}

impl LipschitzReport {
    /// `ratio <= factor * geodesic_sup * (1 + slack)`.
    pub fn within(&self, factor: f64, slack: f64) -> bool {
        self.ratio <= factor * self.geodesic_sup * (1.0 + slack)
    }
}

pub fn lipschitz_ratio(f: &Symbol, z: &HPoint, w: &HPoint) -> Result<LipschitzReport> {
    require_holomorphic(f)?;
    let beta = bergman_metric(z, w)?;
    if beta == 0.0 {
        return Err(Error::Domain("Lipschitz ratio needs distinct points".into()));
    }
    let ratio = 2.0 * (f.value(z) - f.value(w)).norm() / beta;
    let mut sup: f64 = 0.0;
    for p in geodesic(z, w, GEODESIC_SAMPLES)? {
        sup = sup.max(invariant_gradient(f, &p)?);
    }
    Ok(LipschitzReport { ratio, geodesic_sup: sup, beta })
}

/// Paired scans for the mean-oscillation / gradient equivalence.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivalenceProbe {
    pub p: f64,
    pub r: f64,
    /// `(1/|D(z,r)|) int_D |f - f(z)|^p dV`.
    pub pointwise: SeminormScan,
    /// `(1/|D(z,r)|) int_D |f - f^_r(z)|^p dV`.
    pub averaged: SeminormScan,
    /// `|grad~ f(z)|^p`.
    pub gradient: SeminormScan,
}

impl EquivalenceProbe {
    /// Range of `gradient / pointwise` over points where both are nonzero.
    pub fn ratio_range(&self) -> Option<(f64, f64)> {
        ratio_range(&self.gradient.values, &self.pointwise.values)
    }

    pub fn averaged_ratio_range(&self) -> Option<(f64, f64)> {
        ratio_range(&self.gradient.values, &self.averaged.values)
    }
}

fn ratio_range(a: &[f64], b: &[f64]) -> Option<(f64, f64)> {
    let r: Vec<f64> = a
        .iter()
        .zip(b)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| x / y)
        .collect();
    if r.is_empty() {
        return None;
    }
    Some((r.iter().copied().fold(f64::INFINITY, f64::min), r.iter().copied().fold(0.0, f64::max)))
}

fn p_oscillation(f: &Symbol, z: &HPoint, center: C64, p: f64, r: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let g = f.clone();
    let dev = Symbol::from_fn("dev", &[], move |w| C64::new((g.value(w) - center).norm().powf(p), 0.0));
    let a = ball_average(&dev, z, r, spec)?;
    Ok(Estimate { value: a.value.re, std_error: a.std_error })
}

pub fn mo_equivalence_probe(
    f: &Symbol,
    p: f64,
    r: f64,
    grid: &[GridPoint],
    spec: &QuadratureSpec,
) -> Result<EquivalenceProbe> {
    require_holomorphic(f)?;
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("p must be at least 1, got {p}")));
    }
    spec.validate()?;
    let rows: Vec<(Estimate, Estimate, Estimate)> = grid
        .par_iter()
        .enumerate()
        .map(|(k, g)| {
            let s = spec.for_point(k);
            let z = &g.point;
            let pointwise = p_oscillation(f, z, f.value(z), p, r, &s)?;
            let avg = ball_average(f, z, r, &s)?.value;
            let averaged = p_oscillation(f, z, avg, p, r, &s)?;
            let grad = invariant_gradient(f, z)?.powf(p);
            Ok((pointwise, averaged, Estimate { value: grad, std_error: 0.0 }))
        })
        .collect::<Result<_>>()?;
    let pick = |i: usize| -> Vec<Estimate> {
        rows.iter().map(|r| [r.0, r.1, r.2][i]).collect()
    };
    Ok(EquivalenceProbe {
        p,
        r,
        pointwise: SeminormScan::from_values(format!("MO_p(p={p},r={r})"), grid.to_vec(), pick(0)),
        averaged: SeminormScan::from_values(format!("MO_p_avg(p={p},r={r})"), grid.to_vec(), pick(1)),
        gradient: SeminormScan::from_values(format!("grad^p(p={p})"), grid.to_vec(), pick(2)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{make_symbol, Params};

    fn sym(id: &str) -> Symbol {
        make_symbol(id, &Params::new()).unwrap()
    }

    #[test]
    fn log_kernel_at_base() {
        let g = invariant_gradient(&sym("log-kernel"), &HPoint::base(1)).unwrap();
        assert!((g - SQRT_2).abs() < 1e-15);
        let g2 = invariant_gradient(&sym("log-kernel"), &HPoint::base(3)).unwrap();
        assert!((g2 - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn coordinate_grows_vertically() {
        let f = sym("coord");
        for y in [1.0, 4.0, 16.0] {
            let z = HPoint::new(vec![], C64::new(0.7, y));
            let g = invariant_gradient(&f, &z).unwrap();
            assert!((g * g - 8.0 * rho(&z) * y).abs() < 1e-10 * y * y);
        }
    }

    #[test]
    fn ball_gradient_at_origin_is_euclidean() {
        let g = |e: &[C64]| e[0] * 3.0 + e[1] * C64::new(0.0, 4.0);
        let v = ball_invariant_gradient(g, &BPoint::origin(2)).unwrap();
        assert!((v - 5.0).abs() < 1e-8);
        assert_eq!(ball_invariant_gradient(|_| C64::new(1.0, 0.0), &BPoint::origin(2)).unwrap(), 0.0);
    }

    #[test]
    fn transfer_with_implemented_factor() {
        let f = sym("log-kernel");
        let z = HPoint::new(vec![C64::new(0.3, -0.1)], C64::new(1.5, 2.0));
        let rep = gradient_report(&f, &z).unwrap();
        assert!(rep.residuals.iter().all(|r| *r < 1e-6), "{rep:?}");
        let xi = cayley_inv(&z).unwrap();
        let a = ball_invariant_gradient_analytic(&f, &xi).unwrap();
        assert!((BALL_TRANSFER_FACTOR * a - rep.invariant_gradient).abs() < 1e-12);
    }

    #[test]
    fn geodesic_endpoints() {
        let z = HPoint::new(vec![], C64::new(0.0, 1.0));
        let w = HPoint::new(vec![], C64::new(3.0, 0.5));
        let g = geodesic(&z, &w, 11).unwrap();
        assert!((g[0].zn() - z.zn()).norm() < 1e-12);
        assert!((g[10].zn() - w.zn()).norm() < 1e-12);
        let total = bergman_metric(&z, &w).unwrap();
        let half = bergman_metric(&z, &g[5]).unwrap();
        assert!(half < total);
    }

    #[test]
    fn lipschitz_rejects_equal_points() {
        let z = HPoint::base(1);
        assert!(lipschitz_ratio(&sym("log-kernel"), &z, &z).is_err());
        assert!(lipschitz_ratio(&sym("beta-dist"), &z, &HPoint::base(1)).is_err());
    }
}
