//! Closed-form geometry of the Siegel upper half-space
//! `U = { z in C^n : Im z_n > |z'|^2 }`.
//!
//! Points are written `z = (z', z_n)` with `z' in C^{n-1}`. Everything here is
//! explicit algebra: the sesquilinear defining form `rho(z, w)`, the Bergman
//! kernel and metric, metric-ball volumes, the automorphisms (dilations,
//! Heisenberg translations, the normalizing maps `sigma_z`, and the maps
//! `tau_z` induced from the ball), the Cayley transform and the Möbius maps
//! of the unit ball.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

/// Smallest `rho(z)` accepted for an interior point. Kernel powers
/// `rho^{-(n+1)}` overflow below this.
pub const MIN_RHO: f64 = 1e-300;

/// Largest argument handed to `atanh` when evaluating Bergman distances.
const MAX_TANH: f64 = 1.0 - 1e-16;

/// Slack allowed on the distance radicand before it counts as a domain error.
const METRIC_SLACK: f64 = 1e-12;

/// A point `(z', z_n)` of `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct HPoint {
    zp: Vec<C64>,
    zn: C64,
}

impl HPoint {
    /// Any point of `C^n`, interior or not.
    pub fn new(zp: Vec<C64>, zn: C64) -> Self {
        Self { zp, zn }
    }

    /// A point required to lie in `U`.
    pub fn interior(zp: Vec<C64>, zn: C64) -> Result<Self> {
        let p = Self::new(zp, zn);
        p.check_interior()?;
        Ok(p)
    }

    /// The base point `i = (0', i)`.
    pub fn base(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        Self::new(vec![C64::new(0.0, 0.0); n - 1], I)
    }

    /// Builds a point from its full coordinate vector `(z_1, ..., z_n)`.
    pub fn from_coords(coords: &[C64]) -> Self {
        let (last, head) = coords.split_last().expect("at least one coordinate");
        Self::new(head.to_vec(), *last)
    }

    pub fn dim(&self) -> usize {
        self.zp.len() + 1
    }

    pub fn zp(&self) -> &[C64] {
        &self.zp
    }

    pub fn zn(&self) -> C64 {
        self.zn
    }

    pub fn coords(&self) -> Vec<C64> {
        let mut v = self.zp.clone();
        v.push(self.zn);
        v
    }

    /// Coordinate `k` (0-based; `k = n-1` is `z_n`).
    pub fn coord(&self, k: usize) -> C64 {
        if k + 1 == self.dim() {
            self.zn
        } else {
            self.zp[k]
        }
    }

    /// Euclidean norm `|z|`.
    pub fn norm(&self) -> f64 {
        (self.zp.iter().map(|c| c.norm_sqr()).sum::<f64>() + self.zn.norm_sqr()).sqrt()
    }

    pub fn is_interior(&self) -> bool {
        rho(self) > MIN_RHO
    }

    pub fn check_interior(&self) -> Result<()> {
        let r = rho(self);
        if r > MIN_RHO && r.is_finite() {
            Ok(())
        } else {
            Err(Error::NotInterior { rho: r })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.zn.is_finite() && self.zp.iter().all(|c| c.is_finite())
    }
}

impl std::fmt::Display for HPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for c in &self.zp {
            write!(f, "{}{:+}i, ", c.re, c.im)?;
        }
        write!(f, "{}{:+}i)", self.zn.re, self.zn.im)
    }
}

/// A point of the unit ball of `C^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BPoint {
    xi: Vec<C64>,
}

impl BPoint {
    pub fn new(xi: Vec<C64>) -> Self {
        assert!(!xi.is_empty(), "dimension must be at least 1");
        Self { xi }
    }

    /// A point required to satisfy `|xi| < 1`.
    pub fn interior(xi: Vec<C64>) -> Result<Self> {
        let p = Self::new(xi);
        let norm = p.norm();
        if norm < 1.0 {
            Ok(p)
        } else {
            Err(Error::OutsideBall { norm })
        }
    }

    pub fn origin(n: usize) -> Self {
        Self::new(vec![C64::new(0.0, 0.0); n])
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    pub fn xi(&self) -> &[C64] {
        &self.xi
    }

    pub fn norm_sqr(&self) -> f64 {
        self.xi.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.xi
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { left: a, right: b })
    }
}

/// `sum_j a_j * conj(b_j)`.
pub(crate) fn hdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

/// `(1/z)^k` by repeated multiplication; keeps the integer power branch-free.
pub(crate) fn recip_powi(z: C64, k: usize) -> C64 {
    let r = z.inv();
    let mut acc = C64::new(1.0, 0.0);
    for _ in 0..k {
        acc *= r;
    }
    acc
}

pub(crate) fn rho_pair_unchecked(z: &HPoint, w: &HPoint) -> C64 {
    0.5 * I * (w.zn.conj() - z.zn) - hdot(&z.zp, &w.zp)
}

/// The sesquilinear form `rho(z, w) = (i/2)(conj(w_n) - z_n) - z' . conj(w')`.
pub fn rho_pair(z: &HPoint, w: &HPoint) -> Result<C64> {
    check_dims(z.dim(), w.dim())?;
    Ok(rho_pair_unchecked(z, w))
}

/// `rho(z) = Im z_n - |z'|^2`; positive exactly on `U`.
pub fn rho(z: &HPoint) -> f64 {
    z.zn.im - z.zp.iter().map(|c| c.norm_sqr()).sum::<f64>()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `n! / (4 pi^n)`, the constant in front of the Bergman kernel.
pub fn kernel_constant(n: usize) -> f64 {
    factorial(n) / (4.0 * PI.powi(n as i32))
}

/// Lebesgue volume `pi^n / n!` of the unit ball of `C^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    PI.powi(n as i32) / factorial(n)
}

pub(crate) fn bergman_kernel_unchecked(z: &HPoint, w: &HPoint) -> C64 {
    let n = z.dim();
    kernel_constant(n) * recip_powi(rho_pair_unchecked(z, w), n + 1)
}

/// Bergman kernel `K(z, w) = n!/(4 pi^n) rho(z, w)^{-(n+1)}`.
pub fn bergman_kernel(z: &HPoint, w: &HPoint) -> Result<C64> {
    check_dims(z.dim(), w.dim())?;
    z.check_interior()?;
    w.check_interior()?;
    Ok(bergman_kernel_unchecked(z, w))
}

/// Normalized kernel `k_z(w) = K(w, z) / sqrt(K(z, z))`.
pub fn normalized_kernel(z: &HPoint, w: &HPoint) -> Result<C64> {
    check_dims(z.dim(), w.dim())?;
    z.check_interior()?;
    w.check_interior()?;
    Ok(normalized_kernel_unchecked(z, w))
}

pub(crate) fn normalized_kernel_unchecked(z: &HPoint, w: &HPoint) -> C64 {
    let n = z.dim();
    let kzz = kernel_constant(n) * rho(z).powi(-(n as i32 + 1));
    bergman_kernel_unchecked(w, z) / kzz.sqrt()
}

/// `|k_z(w)|^2`, the Berezin weight.
pub(crate) fn berezin_weight(z: &HPoint, w: &HPoint) -> f64 {
    let n = z.dim() as i32;
    let ratio = rho(z) / rho_pair_unchecked(w, z).norm_sqr();
    kernel_constant(z.dim()) * ratio.powi(n + 1)
}

fn metric_from_ratio(ratio: f64) -> Result<f64> {
    let x = 1.0 - ratio;
    if !(-METRIC_SLACK..=1.0 + METRIC_SLACK).contains(&x) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "Bergman distance radicand {x} outside [0, 1]"
        )));
    }
    let t = x.clamp(0.0, 1.0).sqrt().min(MAX_TANH);
    Ok(t.atanh())
}

/// Bergman distance `beta(z, w) = atanh sqrt(1 - rho(z) rho(w) / |rho(z, w)|^2)`.
///
/// Saturates at `atanh(1 - 1e-16)` instead of returning infinity.
pub fn bergman_metric(z: &HPoint, w: &HPoint) -> Result<f64> {
    check_dims(z.dim(), w.dim())?;
    z.check_interior()?;
    w.check_interior()?;
    let ratio = rho(z) * rho(w) / rho_pair_unchecked(z, w).norm_sqr();
    metric_from_ratio(ratio)
}

/// Lebesgue volume of the Bergman ball `D(z, r)`.
pub fn ball_volume(z: &HPoint, r: f64) -> f64 {
    let n = z.dim();
    let t2 = r.tanh().powi(2);
    t2.powi(n as i32) / (1.0 - t2).powi(n as i32 + 1) * rho(z).powi(n as i32 + 1)
        / kernel_constant(n)
}

// ---------------------------------------------------------------------------
// Automorphisms
// ---------------------------------------------------------------------------

/// Elements of `Aut(U)` with explicit formulas.
#[derive(Clone, Debug, PartialEq)]
pub enum AutomorphismKind {
    /// `delta_t(u) = (t u', t^2 u_n)`.
    Dilation(f64),
    /// Heisenberg translation `h_z` moving `z` onto the imaginary axis.
    Heisenberg(HPoint),
    /// `sigma_z = delta_{rho(z)^{-1/2}} o h_z`, which sends `z` to `i`.
    Sigma(HPoint),
    SigmaInv(HPoint),
    /// `tau_z`, the ball Möbius map `phi_{Phi^{-1}(z)}` conjugated by the
    /// Cayley transform. It is an involution swapping `z` and `i`.
    Tau(HPoint),
    TauInv(HPoint),
}

impl AutomorphismKind {
    fn name(&self) -> &'static str {
        match self {
            Self::Dilation(_) => "dilation",
            Self::Heisenberg(_) => "heisenberg",
            Self::Sigma(_) => "sigma",
            Self::SigmaInv(_) => "sigma-inv",
            Self::Tau(_) => "tau",
            Self::TauInv(_) => "tau-inv",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Dilation(t) if !(*t > 0.0 && t.is_finite()) => {
                Err(Error::Domain(format!("dilation factor must be positive, got {t}")))
            }
            Self::Dilation(_) | Self::Heisenberg(_) => Ok(()),
            Self::Sigma(b) | Self::SigmaInv(b) | Self::Tau(b) | Self::TauInv(b) => {
                b.check_interior()
            }
        }
    }

    /// Applies the map to `u`. Interior points go to interior points and
    /// boundary points to boundary points.
    pub fn apply(&self, u: &HPoint) -> Result<HPoint> {
        self.validate()?;
        let base_dim = match self {
            Self::Dilation(_) => u.dim(),
            Self::Heisenberg(b) | Self::Sigma(b) | Self::SigmaInv(b) | Self::Tau(b) | Self::TauInv(b) => {
                b.dim()
            }
        };
        check_dims(base_dim, u.dim())?;
        Ok(match self {
            Self::Dilation(t) => dilation(*t, u),
            Self::Heisenberg(z) => heisenberg(z, u),
            Self::Sigma(z) => sigma(z, u),
            Self::SigmaInv(z) => sigma_inv(z, u),
            Self::Tau(z) | Self::TauInv(z) => tau(z, u)?,
        })
    }

    /// Constant real Jacobian of the map.
    pub fn jacobian(&self) -> Result<f64> {
        self.validate()?;
        match self {
            Self::Dilation(t) => {
                // n is not known from a bare dilation; callers use `jacobian_dim`.
                Err(Error::Domain(format!(
                    "dilation by {t} needs a dimension; use jacobian_dim"
                )))
            }
            Self::Heisenberg(_) => Ok(1.0),
            Self::Sigma(z) => Ok(rho(z).powi(-(z.dim() as i32 + 1))),
            Self::SigmaInv(z) => Ok(rho(z).powi(z.dim() as i32 + 1)),
            Self::Tau(_) | Self::TauInv(_) => Err(Error::NonConstantJacobian(self.name().into())),
        }
    }

    /// Constant real Jacobian in dimension `n`; needed for bare dilations.
    pub fn jacobian_dim(&self, n: usize) -> Result<f64> {
        match self {
            Self::Dilation(t) => {
                self.validate()?;
                Ok(t.powi(2 * (n as i32 + 1)))
            }
            _ => self.jacobian(),
        }
    }
}

pub fn dilation(t: f64, u: &HPoint) -> HPoint {
    HPoint::new(u.zp.iter().map(|c| c * t).collect(), u.zn * (t * t))
}

pub fn heisenberg(z: &HPoint, u: &HPoint) -> HPoint {
    let zp2: f64 = z.zp.iter().map(|c| c.norm_sqr()).sum();
    let zn = u.zn - z.zn.re - 2.0 * I * hdot(&u.zp, &z.zp) + I * zp2;
    HPoint::new(u.zp.iter().zip(&z.zp).map(|(a, b)| a - b).collect(), zn)
}

pub fn heisenberg_inv(z: &HPoint, v: &HPoint) -> HPoint {
    let zp2: f64 = z.zp.iter().map(|c| c.norm_sqr()).sum();
    let zn = v.zn + z.zn.re + 2.0 * I * hdot(&v.zp, &z.zp) + I * zp2;
    HPoint::new(v.zp.iter().zip(&z.zp).map(|(a, b)| a + b).collect(), zn)
}

pub fn sigma(z: &HPoint, u: &HPoint) -> HPoint {
    dilation(rho(z).sqrt().recip(), &heisenberg(z, u))
}

pub fn sigma_inv(z: &HPoint, u: &HPoint) -> HPoint {
    heisenberg_inv(z, &dilation(rho(z).sqrt(), u))
}

pub fn tau(z: &HPoint, u: &HPoint) -> Result<HPoint> {
    let center = cayley_inv(z)?;
    let eta = cayley_inv(u)?;
    cayley(&mobius_ball(&center, &eta)?)
}

// ---------------------------------------------------------------------------
// Cayley transform and ball Möbius maps
// ---------------------------------------------------------------------------

pub(crate) fn cayley_unchecked(xi: &[C64]) -> HPoint {
    let (last, head) = xi.split_last().expect("nonempty");
    let d = C64::new(1.0, 0.0) + last;
    HPoint::new(
        head.iter().map(|c| c / d).collect(),
        I * (C64::new(1.0, 0.0) - last) / d,
    )
}

pub(crate) fn cayley_inv_unchecked(z: &HPoint) -> Vec<C64> {
    let d = I + z.zn;
    let mut v: Vec<C64> = z.zp.iter().map(|c| 2.0 * I * c / d).collect();
    v.push((I - z.zn) / d);
    v
}

/// Cayley transform `Phi : B -> U`.
pub fn cayley(xi: &BPoint) -> Result<HPoint> {
    let norm = xi.norm();
    if norm >= 1.0 {
        return Err(Error::OutsideBall { norm });
    }
    Ok(cayley_unchecked(&xi.xi))
}

/// Inverse Cayley transform `Phi^{-1} : U -> B`.
pub fn cayley_inv(z: &HPoint) -> Result<BPoint> {
    z.check_interior()?;
    Ok(BPoint::new(cayley_inv_unchecked(z)))
}

/// Real Jacobian of `Phi` at `xi`: `4 / |1 + xi_n|^{2(n+1)}`.
pub fn cayley_jacobian(xi: &[C64]) -> f64 {
    let n = xi.len() as i32;
    4.0 / (C64::new(1.0, 0.0) + xi[xi.len() - 1]).norm_sqr().powi(n + 1)
}

/// Real Jacobian of `Phi^{-1}` at `z`: `1 / (4 |rho(z, i)|^{2(n+1)})`.
pub fn cayley_inv_jacobian(z: &HPoint) -> f64 {
    let n = z.dim();
    let r = rho_pair_unchecked(z, &HPoint::base(n));
    0.25 / r.norm_sqr().powi(n as i32 + 1)
}

pub(crate) fn mobius_ball_unchecked(xi: &[C64], eta: &[C64]) -> Vec<C64> {
    let xi2: f64 = xi.iter().map(|c| c.norm_sqr()).sum();
    if xi2 == 0.0 {
        return eta.iter().map(|c| -c).collect();
    }
    let inner = hdot(eta, xi);
    let s = (1.0 - xi2).sqrt();
    let denom = C64::new(1.0, 0.0) - inner;
    let coef = inner / xi2;
    xi.iter()
        .zip(eta)
        .map(|(x, e)| {
            let p = coef * x;
            let q = e - p;
            (x - p - s * q) / denom
        })
        .collect()
}

/// Ball automorphism `phi_xi`, the involution exchanging `xi` and `0`.
pub fn mobius_ball(xi: &BPoint, eta: &BPoint) -> Result<BPoint> {
    check_dims(xi.dim(), eta.dim())?;
    for p in [xi, eta] {
        let norm = p.norm();
        if norm >= 1.0 {
            return Err(Error::OutsideBall { norm });
        }
    }
    Ok(BPoint::new(mobius_ball_unchecked(&xi.xi, &eta.xi)))
}

/// Real Jacobian of `phi_xi` at `eta`: `((1-|xi|^2) / |1 - <eta, xi>|^2)^{n+1}`.
pub fn mobius_ball_jacobian(xi: &[C64], eta: &[C64]) -> f64 {
    let xi2: f64 = xi.iter().map(|c| c.norm_sqr()).sum();
    let d = (C64::new(1.0, 0.0) - hdot(eta, xi)).norm_sqr();
    ((1.0 - xi2) / d).powi(xi.len() as i32 + 1)
}

/// Bergman distance on the ball, `atanh |phi_xi(eta)|`.
pub fn ball_metric(xi: &BPoint, eta: &BPoint) -> Result<f64> {
    let m = mobius_ball(xi, eta)?;
    Ok(m.norm().min(MAX_TANH).atanh())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn rho_pair_examples() {
        let i1 = HPoint::base(1);
        assert!((rho_pair(&i1, &i1).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let z = HPoint::new(vec![c(1.0, 0.0)], c(0.0, 2.0));
        assert!((rho_pair(&z, &z).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
        let w = HPoint::new(vec![], c(0.0, 4.0));
        assert!((rho_pair(&i1, &w).unwrap() - c(2.5, 0.0)).norm() < 1e-15);
        assert!(matches!(
            rho_pair(&i1, &z),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho(&HPoint::base(3)), 1.0);
        assert_eq!(rho(&HPoint::new(vec![c(0.0, 0.0)], c(0.0, 0.0))), 0.0);
        for x in [-3.0, 0.0, 7.5] {
            let z = HPoint::new(vec![c(1.0, 0.0), I], c(x, 5.0));
            assert!((rho(&z) - 3.0).abs() < 1e-15);
        }
        assert!(HPoint::interior(vec![], c(0.0, -1.0)).is_err());
    }

    #[test]
    fn kernel_examples() {
        let i1 = HPoint::base(1);
        let k = bergman_kernel(&i1, &i1).unwrap();
        assert!((k.re - 0.0795774715459477).abs() < 1e-12 && k.im.abs() < 1e-15);
        let w = HPoint::new(vec![], c(0.0, 4.0));
        let k = bergman_kernel(&i1, &w).unwrap();
        assert!((k - c(1.0 / (25.0 * PI), 0.0)).norm() < 1e-15);
        let kk = normalized_kernel(&i1, &w).unwrap();
        let expected = (1.0 / (25.0 * PI)) * (4.0 * PI).sqrt();
        assert!((kk.re - expected).abs() < 1e-14);
        assert!((expected - 0.04514).abs() < 1e-5);
        for n in 1..=3 {
            let b = HPoint::base(n);
            let k = normalized_kernel(&b, &b).unwrap();
            assert!((k.re - kernel_constant(n).sqrt()).abs() < 1e-14);
        }
        let boundary = HPoint::new(vec![], c(1.0, 0.0));
        assert!(bergman_kernel(&i1, &boundary).is_err());
    }

    #[test]
    fn berezin_weight_matches_normalized_kernel() {
        let z = HPoint::new(vec![c(0.3, -0.2)], c(1.0, 2.0));
        let w = HPoint::new(vec![c(-0.5, 0.1)], c(-2.0, 1.5));
        let a = berezin_weight(&z, &w);
        let b = normalized_kernel(&z, &w).unwrap().norm_sqr();
        assert!((a - b).abs() <= 1e-14 * b);
    }

    #[test]
    fn metric_examples() {
        let i1 = HPoint::base(1);
        let w = HPoint::new(vec![], c(0.0, 4.0));
        assert_eq!(bergman_metric(&i1, &i1).unwrap(), 0.0);
        let b = bergman_metric(&i1, &w).unwrap();
        assert!((b - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn metric_saturates_near_boundary() {
        let z = HPoint::new(vec![], c(0.0, 1e-200));
        let b = bergman_metric(&HPoint::base(1), &z).unwrap();
        assert!(b.is_finite() && b > 15.0);
    }

    #[test]
    fn volume_examples() {
        let v = ball_volume(&HPoint::base(1), 0.5f64.atanh());
        assert!((v - 16.0 * PI / 9.0).abs() < 1e-12);
        let t = 1f64.tanh();
        let v2 = ball_volume(&HPoint::base(2), 1.0);
        let expected = 2.0 * PI * PI * t.powi(4) / (1.0 - t * t).powi(3);
        assert!((v2 - expected).abs() < 1e-12 * expected);
        let z = HPoint::new(vec![c(0.2, 0.1)], c(0.4, 2.0));
        let t = 0.7;
        let dz = dilation(t, &z);
        let ratio = ball_volume(&dz, 1.3) / ball_volume(&z, 1.3);
        assert!((ratio - t.powi(6)).abs() < 1e-12);
    }

    #[test]
    fn sigma_sends_base_to_i() {
        let z = HPoint::new(vec![c(0.5, -1.0), c(2.0, 0.3)], c(-3.0, 9.0));
        let s = AutomorphismKind::Sigma(z.clone()).apply(&z).unwrap();
        assert!((s.zn() - I).norm() < 1e-14);
        assert!(s.zp().iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn jacobians() {
        let i2 = HPoint::base(2);
        assert_eq!(AutomorphismKind::Sigma(i2.clone()).jacobian().unwrap(), 1.0);
        let z = HPoint::new(vec![], c(1.0, 4.0));
        assert_eq!(AutomorphismKind::Sigma(z.clone()).jacobian().unwrap(), 1.0 / 16.0);
        assert_eq!(AutomorphismKind::SigmaInv(z.clone()).jacobian().unwrap(), 16.0);
        assert_eq!(AutomorphismKind::Heisenberg(z.clone()).jacobian().unwrap(), 1.0);
        assert_eq!(AutomorphismKind::Dilation(2.0).jacobian_dim(1).unwrap(), 16.0);
        assert!(matches!(
            AutomorphismKind::Tau(z).jacobian(),
            Err(Error::NonConstantJacobian(_))
        ));
        assert!(AutomorphismKind::Dilation(-1.0).validate().is_err());
    }

    #[test]
    fn dilation_scales_rho() {
        let u = HPoint::new(vec![c(0.3, 0.4)], c(1.0, 2.0));
        let d = AutomorphismKind::Dilation(3.0).apply(&u).unwrap();
        assert!((rho(&d) - 9.0 * rho(&u)).abs() < 1e-13);
    }

    #[test]
    fn cayley_examples() {
        let i = cayley(&BPoint::origin(3)).unwrap();
        assert_eq!(i, HPoint::base(3));
        let o = cayley_inv(&HPoint::base(2)).unwrap();
        assert!(o.norm() < 1e-15);
        let p = cayley(&BPoint::new(vec![c(0.5, 0.0)])).unwrap();
        assert!((p.zn() - c(0.0, 1.0 / 3.0)).norm() < 1e-15);
        assert!(cayley(&BPoint::new(vec![c(1.0, 0.0)])).is_err());
    }

    #[test]
    fn cayley_jacobian_inverse_pair() {
        let xi = vec![c(0.1, -0.3), c(0.2, 0.4)];
        let z = cayley_unchecked(&xi);
        let prod = cayley_jacobian(&xi) * cayley_inv_jacobian(&z);
        assert!((prod - 1.0).abs() < 1e-13);
    }

    #[test]
    fn mobius_examples() {
        let xi = BPoint::new(vec![c(0.5, 0.0)]);
        let eta = BPoint::new(vec![c(0.25, 0.0)]);
        let m = mobius_ball(&xi, &eta).unwrap();
        assert!((m.xi()[0] - c(2.0 / 7.0, 0.0)).norm() < 1e-15);
        let zero = mobius_ball(&xi, &BPoint::origin(1)).unwrap();
        assert_eq!(zero, xi);
        let at0 = mobius_ball(&BPoint::origin(1), &eta).unwrap();
        assert_eq!(at0.xi()[0], c(-0.25, 0.0));
    }
}
