//! Galerkin truncation of Hankel operators `H_f = (I - P) M_f` on `A^2(U)`.
//!
//! The orthonormal basis is the ball monomial basis carried to `U` by the
//! Cayley isometry:
//! `e_alpha(z) = m_alpha(Phi^{-1} z) j(z)`, `m_alpha(xi) = xi^alpha sqrt((n+|alpha|)! / (pi^n alpha!))`,
//! `j(z) = (1/2) (2i / (z_n + i))^{n+1}`, so that `|j|^2 = J_R Phi^{-1}` and
//! `j(Phi xi) = (1 + xi_n)^{n+1} / 2`.
//!
//! Under `V g = (g o Phi) / (j o Phi)`, which is unitary `L^2(U) -> L^2(B)`,
//! `V e_alpha = m_alpha` and `V(f g) = (f o Phi) V g`. All inner products are
//! therefore computed on the ball.
//!
//! The projection `P` is truncated to an output space `W`: ball monomials up
//! to [`output_degree`], enlarged by `{F m_j}` (`F = f o Phi`) when the symbol
//! is holomorphic, since those products already lie in `A^2`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    cayley_inv_unchecked, cayley_jacobian, cayley_unchecked, kernel_constant, normalized_kernel_unchecked, rho,
    unit_ball_volume, HPoint, C64, I,
};
use crate::integrate::{BallRule, IntegralResult, KernelChart, QuadratureSpec, Scheme, Transport};
use crate::oscillation::Estimate;
use crate::symbols::{Claim, Symbol};

/// Largest admissible `max |G - Id|` at certification.
pub const GRAM_TOL: f64 = 1e-6;
/// Largest admissible reproducing-kernel deviation at certification.
pub const REPRODUCING_TOL: f64 = 1e-6;
/// Relative eigenvalue cutoff for the pseudo-inverse of the output Gram matrix.
pub const PINV_CUTOFF: f64 = 1e-10;
pub const POWER_TOL: f64 = 1e-8;
/// Absolute rounding floor for `||g||^2 - ||P_W g||^2`; the output Gram matrix has unit scale.
pub const CLAMP_FLOOR: f64 = 1e-12;
pub const POWER_MAX_ITER: usize = 10_000;

/// Default degree caps: 10 for `n = 1`, 6 otherwise.
pub fn default_degree_cap(n: usize) -> usize {
    if n == 1 {
        10
    } else {
        6
    }
}

/// Degree of the monomial part of the output space for input degree `cap`.
pub fn output_degree(n: usize, cap: usize) -> usize {
    if n == 1 {
        2 * cap
    } else {
        cap + 4
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub alpha: Vec<u32>,
}

impl BasisIndex {
    pub fn degree(&self) -> u32 {
        self.alpha.iter().sum()
    }
}

fn push_degree(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<BasisIndex>) {
    if prefix.len() == n - 1 {
        prefix.push(d);
        out.push(BasisIndex { alpha: prefix.clone() });
        prefix.pop();
        return;
    }
    for a in (0..=d).rev() {
        prefix.push(a);
        push_degree(n, d - a, prefix, out);
        prefix.pop();
    }
}

/// Multi-indices of degree `<= cap`, by degree, then lexicographically descending.
pub fn basis_indices(n: usize, cap: usize) -> Vec<BasisIndex> {
    let mut out = Vec::new();
    for d in 0..=cap as u32 {
        push_degree(n, d, &mut Vec::with_capacity(n), &mut out);
    }
    out
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `sqrt((n + |alpha|)! / (pi^n alpha!))`.
pub fn monomial_norm(alpha: &[u32]) -> f64 {
    let n = alpha.len() as i32;
    let d: u32 = alpha.iter().sum();
    let den: f64 = alpha.iter().map(|&a| factorial(a)).product();
    (factorial(d + n as u32) / (PI.powi(n) * den)).sqrt()
}

/// Normalized ball monomial `m_alpha(xi)`.
pub fn ball_monomial(idx: &BasisIndex, xi: &[C64]) -> C64 {
    let mut v = C64::new(monomial_norm(&idx.alpha), 0.0);
    for (x, &a) in xi.iter().zip(&idx.alpha) {
        v *= x.powu(a);
    }
    v
}

/// Evaluates all normalized monomials of a fixed index list at once.
struct MonomialTable {
    n: usize,
    max_deg: usize,
    indices: Vec<BasisIndex>,
    norms: Vec<f64>,
}

impl MonomialTable {
    fn new(n: usize, deg: usize) -> Self {
        let indices = basis_indices(n, deg);
        let norms = indices.iter().map(|i| monomial_norm(&i.alpha)).collect();
        Self { n, max_deg: deg, indices, norms }
    }

    fn len(&self) -> usize {
        self.indices.len()
    }

    fn fill(&self, xi: &[C64], out: &mut [C64]) {
        let stride = self.max_deg + 1;
        let mut pow = vec![C64::new(1.0, 0.0); self.n * stride];
        for (k, x) in xi.iter().enumerate() {
            for d in 1..stride {
                pow[k * stride + d] = pow[k * stride + d - 1] * x;
            }
        }
        for (o, (idx, nrm)) in out.iter_mut().zip(self.indices.iter().zip(&self.norms)) {
            let mut v = C64::new(*nrm, 0.0);
            for (k, &a) in idx.alpha.iter().enumerate() {
                v *= pow[k * stride + a as usize];
            }
            *o = v;
        }
    }
}

/// Multiplier used to carry ball functions to `U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Multiplier {
    /// The holomorphic `j`.
    Holomorphic,
    /// `|j|`: same modulus, not holomorphic. Only for fault injection.
    Modulus,
}

/// `j(z) = (1/2) (2i / (z_n + i))^{n+1}`.
pub fn multiplier(z: &HPoint) -> C64 {
    let n = z.dim() as u32;
    0.5 * (2.0 * I / (z.zn() + I)).powu(n + 1)
}

pub fn multiplier_with(z: &HPoint, kind: Multiplier) -> C64 {
    match kind {
        Multiplier::Holomorphic => multiplier(z),
        Multiplier::Modulus => C64::new(multiplier(z).norm(), 0.0),
    }
}

/// `e_idx(z) = m_idx(Phi^{-1} z) j(z)`.
pub fn basis_function(idx: &BasisIndex, z: &HPoint) -> C64 {
    basis_function_with(idx, z, Multiplier::Holomorphic)
}

pub fn basis_function_with(idx: &BasisIndex, z: &HPoint, kind: Multiplier) -> C64 {
    ball_monomial(idx, &cayley_inv_unchecked(z)) * multiplier_with(z, kind)
}

fn weight(rule: &BallRule, i: usize, vol: f64) -> f64 {
    rule.weight(i) * vol
}

/// Weighted cross products over the rule: returns
/// `(U^* W U, U^* W T, T^* W T)` where row `i` of `U` and `T` is filled by `fill`.
fn accumulate<F>(rule: &BallRule, ku: usize, kt: usize, fill: F) -> Result<(DMatrix<C64>, DMatrix<C64>, DMatrix<C64>)>
where
    F: Fn(&[C64], &mut [C64], &mut [C64]) + Sync,
{
    const CHUNK: usize = 2048;
    let vol = unit_ball_volume(rule.dim());
    let chunks = rule.len().div_ceil(CHUNK);
    let parts: Vec<Result<(DMatrix<C64>, DMatrix<C64>, DMatrix<C64>)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(rule.len());
            let rows = hi - lo;
            let mut u = DMatrix::<C64>::zeros(rows, ku);
            let mut t = DMatrix::<C64>::zeros(rows, kt);
            let mut ur = vec![C64::new(0.0, 0.0); ku];
            let mut tr = vec![C64::new(0.0, 0.0); kt];
            for r in 0..rows {
                let i = lo + r;
                fill(rule.point(i), &mut ur, &mut tr);
                if ur.iter().chain(tr.iter()).any(|v| !v.is_finite()) {
                    return Err(rule_non_finite(rule, i));
                }
                let s = weight(rule, i, vol).sqrt();
                for k in 0..ku {
                    u[(r, k)] = ur[k] * s;
                }
                for k in 0..kt {
                    t[(r, k)] = tr[k] * s;
                }
            }
            Ok((adjoint_mul(&u, &u), adjoint_mul(&u, &t), adjoint_mul(&t, &t)))
        })
        .collect();
    let mut uu = DMatrix::<C64>::zeros(ku, ku);
    let mut ut = DMatrix::<C64>::zeros(ku, kt);
    let mut tt = DMatrix::<C64>::zeros(kt, kt);
    for p in parts {
        let (a, b, c) = p?;
        uu += a;
        ut += b;
        tt += c;
    }
    Ok((uu, ut, tt))
}

/// `u^* v` through four real products, which use the fast real GEMM kernel.
fn adjoint_mul(u: &DMatrix<C64>, v: &DMatrix<C64>) -> DMatrix<C64> {
    let (xt, yt) = (u.map(|c| c.re).transpose(), u.map(|c| c.im).transpose());
    let (p, q) = (v.map(|c| c.re), v.map(|c| c.im));
    let re = &xt * &p + &yt * &q;
    let im = &xt * &q - &yt * &p;
    re.zip_map(&im, C64::new)
}

fn rule_non_finite(rule: &BallRule, i: usize) -> Error {
    let coords: Vec<String> = rule.point(i).iter().map(|c| format!("{:.6e}{:+.6e}i", c.re, c.im)).collect();
    Error::NonFiniteIntegrand { node: format!("#{i} xi=({})", coords.join(", ")) }
}

fn hermitize(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// `Lambda^{+1/2} Q^*` of the pseudo-inverse `G^+ = Q Lambda^+ Q^*`.
fn pinv_half(g: &DMatrix<C64>) -> DMatrix<C64> {
    let eig = SymmetricEigen::new(hermitize(g));
    let lmax = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    let k = g.nrows();
    let mut out = DMatrix::<C64>::zeros(k, k);
    for c in 0..k {
        let l = eig.eigenvalues[c];
        if l > PINV_CUTOFF * lmax && l > 0.0 {
            let s = 1.0 / l.sqrt();
            for r in 0..k {
                out[(c, r)] = eig.eigenvectors[(r, c)].conj() * s;
            }
        }
    }
    out
}

/// Gram matrix of the transported basis plus the reproducing-kernel check.
#[derive(Clone, Debug)]
pub struct GramReport {
    pub matrix: DMatrix<C64>,
    /// `max |G - Id|`.
    pub deviation: f64,
    /// `max |<e_i, k_z> - e_i(z) / sqrt(K(z,z))|` over the probe points.
    pub reproducing_deviation: f64,
}

impl GramReport {
    pub fn certified(&self) -> bool {
        self.deviation <= GRAM_TOL && self.reproducing_deviation <= REPRODUCING_TOL
    }
}

/// Deterministic probe points `Phi(xi)` with `|xi| <= 0.5`.
pub fn probe_points(n: usize) -> Vec<HPoint> {
    let radii = [0.0, 0.25, 0.5];
    let mut out = Vec::new();
    for (k, r) in radii.iter().enumerate() {
        let xi: Vec<C64> = (0..n)
            .map(|j| C64::from_polar(r / (n as f64).sqrt(), 0.7 + 1.3 * (j + k) as f64))
            .collect();
        out.push(cayley_unchecked(&xi));
    }
    out
}

pub fn gram_matrix(n: usize, cap: usize, spec: &QuadratureSpec) -> Result<GramReport> {
    gram_matrix_with(n, cap, spec, Multiplier::Holomorphic)
}

/// Computes `<e_j, e_i>` by pulling `U` back to the ball, evaluating each
/// `e_i` through its definition on `U`.
pub fn gram_matrix_with(n: usize, cap: usize, spec: &QuadratureSpec, kind: Multiplier) -> Result<GramReport> {
    check_spec_dim(spec, n)?;
    let basis = basis_indices(n, cap);
    let rule = BallRule::new(spec)?;
    let probes = probe_points(n);
    let kb = basis.len();
    let kp = probes.len();
    let table = MonomialTable::new(n, cap);
    let (g, cross, _) = accumulate(&rule, kb, kp, |xi, u, t| {
        let w = cayley_unchecked(xi);
        let s = cayley_jacobian(xi).sqrt();
        // e_i(w) = m_i(Phi^{-1} w) j(w), evaluated from the point of U.
        table.fill(&cayley_inv_unchecked(&w), u);
        let jm = multiplier_with(&w, kind) * s;
        for o in u.iter_mut() {
            *o *= jm;
        }
        for (o, z) in t.iter_mut().zip(&probes) {
            *o = normalized_kernel_unchecked(z, &w) * s;
        }
    })?;
    let mut deviation: f64 = 0.0;
    for i in 0..kb {
        for j in 0..kb {
            let id = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((g[(i, j)] - id).norm());
        }
    }
    // cross[(i, p)] = <k_{z_p}, e_i>; conjugate for <e_i, k_z>.
    let mut reproducing_deviation: f64 = 0.0;
    for (p, z) in probes.iter().enumerate() {
        let kzz = (kernel_constant(n) * rho(z).powi(-(n as i32 + 1))).sqrt();
        for (i, idx) in basis.iter().enumerate() {
            let exact = basis_function_with(idx, z, kind) / kzz;
            reproducing_deviation = reproducing_deviation.max((cross[(i, p)].conj() - exact).norm());
        }
    }
    Ok(GramReport { matrix: g, deviation, reproducing_deviation })
}

/// Certifies the basis with the polar product rule at the given node budget.
pub fn certify_basis(n: usize, cap: usize, spec: &QuadratureSpec, kind: Multiplier) -> Result<GramReport> {
    let rep = gram_matrix_with(n, cap, &spec.with_scheme(Scheme::PolarProduct), kind)?;
    if rep.deviation > GRAM_TOL {
        return Err(Error::Certification(format!(
            "Gram deviation {:.3e} exceeds {GRAM_TOL:e}",
            rep.deviation
        )));
    }
    if rep.reproducing_deviation > REPRODUCING_TOL {
        return Err(Error::Certification(format!(
            "Gram certification: reproducing deviation {:.3e} exceeds {REPRODUCING_TOL:e} (multiplier not holomorphic?)",
            rep.reproducing_deviation
        )));
    }
    Ok(rep)
}

fn check_spec_dim(spec: &QuadratureSpec, n: usize) -> Result<()> {
    spec.validate()?;
    if spec.dim != n {
        return Err(Error::DimensionMismatch { left: spec.dim, right: n });
    }
    Ok(())
}

/// Coefficients `c_i = <g, e_i>` and `||g||^2`.
#[derive(Clone, Debug)]
pub struct Projection {
    pub coefficients: Vec<C64>,
    pub norm_sqr: IntegralResult,
}

impl Projection {
    pub fn bessel_sum(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }
}

pub fn project_onto_span<G>(g: G, n: usize, cap: usize, spec: &QuadratureSpec) -> Result<Projection>
where
    G: Fn(&HPoint) -> C64 + Sync,
{
    check_spec_dim(spec, n)?;
    let basis = basis_indices(n, cap);
    let rule = BallRule::new(spec)?;
    let vol = unit_ball_volume(n);
    let k = basis.len();
    let ch = rule.evaluate_channels(k + 1, |xi, out| {
        let w = cayley_unchecked(xi);
        let jac = cayley_jacobian(xi);
        let gv = g(&w);
        for (o, idx) in out.iter_mut().zip(&basis) {
            *o = gv * basis_function(idx, &w).conj() * jac;
        }
        out[k] = C64::new(gv.norm_sqr() * jac, 0.0);
    })?;
    let coefficients = (0..k).map(|i| rule.estimate(&ch.channel(i)).value * vol).collect();
    let norm_sqr = rule.estimate(&ch.channel(k)).scaled(vol);
    Ok(Projection { coefficients, norm_sqr })
}

/// Quadratic form of `H_f` on the span of `e_0..e_{cap}`.
#[derive(Clone, Debug)]
pub struct HankelForm {
    /// `A_ij = <f e_j, f e_i>`.
    pub a: DMatrix<C64>,
    /// `B_ij = <f e_j, e_i>` for `i` over the input basis.
    pub b: DMatrix<C64>,
    /// Truncated Hankel Gram `A - B_W^* G_W^+ B_W`.
    pub h: DMatrix<C64>,
    pub output_dim: usize,
}

fn output_space_fill(
    table: &MonomialTable,
    enrich: bool,
    xi: &[C64],
    fval: C64,
    inputs: &[C64],
    u: &mut [C64],
) {
    let k = table.len();
    table.fill(xi, &mut u[..k]);
    if enrich {
        for (o, m) in u[k..].iter_mut().zip(inputs) {
            *o = fval * m;
        }
    }
}

pub fn hankel_quadratic_form(f: &Symbol, n: usize, cap: usize, spec: &QuadratureSpec) -> Result<HankelForm> {
    check_spec_dim(spec, n)?;
    let rule = BallRule::new(spec)?;
    let input = MonomialTable::new(n, cap);
    let output = MonomialTable::new(n, output_degree(n, cap));
    let enrich = f.has(Claim::Holomorphic);
    let ki = input.len();
    let ku = output.len() + if enrich { ki } else { 0 };
    // T holds F m_j; U holds the output space, whose leading columns are the input basis.
    let (gw, bw, a) = accumulate(&rule, ku, ki, |xi, u, t| {
        let fv = f.value(&cayley_unchecked(xi));
        let mut m = vec![C64::new(0.0, 0.0); ki];
        input.fill(xi, &mut m);
        output_space_fill(&output, enrich, xi, fv, &m, u);
        for j in 0..ki {
            t[j] = fv * m[j];
        }
    })?;
    let b = bw.rows(0, ki).into_owned();
    let half = pinv_half(&gw) * bw;
    let h = hermitize(&(&a - half.ad_mul(&half)));
    Ok(HankelForm { a, b, h, output_dim: ku })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PowerResult {
    pub eigenvalue: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Block width of the simultaneous power iteration.
pub const POWER_BLOCK: usize = 12;

/// Orthonormalizes the columns of `v` in place (modified Gram-Schmidt).
fn orthonormalize(v: &mut DMatrix<C64>) {
    for c in 0..v.ncols() {
        for p in 0..c {
            let proj = v.column(p).dotc(&v.column(c));
            let col_p = v.column(p).into_owned();
            v.column_mut(c).axpy(-proj, &col_p, C64::new(1.0, 0.0));
        }
        let nrm = v.column(c).norm();
        if nrm > 0.0 {
            v.column_mut(c).unscale_mut(nrm);
        }
    }
}

/// Largest eigenvalue of a Hermitian matrix by simultaneous power iteration
/// from a seeded block, with a Rayleigh-Ritz step on the block each sweep.
/// `residual = ||H v - theta v|| / ||H||_F` for the leading Ritz pair.
pub fn power_iteration(h: &DMatrix<C64>, seed: u64) -> Result<PowerResult> {
    let k = h.nrows();
    let fro = h.norm();
    if fro == 0.0 || k == 0 {
        return Ok(PowerResult { eigenvalue: 0.0, residual: 0.0, iterations: 0 });
    }
    let p = POWER_BLOCK.min(k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DMatrix::<C64>::from_fn(k, p, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    orthonormalize(&mut v);
    let mut residual = f64::INFINITY;
    for it in 1..=POWER_MAX_ITER {
        let hv = h * &v;
        let small = hermitize(&(v.adjoint() * &hv));
        let eig = SymmetricEigen::new(small);
        let top = eig
            .eigenvalues
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &l)| if l > acc.1 { (i, l) } else { acc });
        let y = eig.eigenvectors.column(top.0).into_owned();
        let x = &v * &y;
        let hx = &hv * &y;
        residual = (&hx - &x * C64::new(top.1, 0.0)).norm() / fro;
        if residual <= POWER_TOL {
            return Ok(PowerResult { eigenvalue: top.1, residual, iterations: it });
        }
        // Next block: H applied to the Ritz basis.
        v = &hv * &eig.eigenvectors;
        orthonormalize(&mut v);
    }
    Err(Error::NonConvergent { residual })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HankelEstimate {
    pub norm_estimate: f64,
    pub basis_degree_cap: usize,
    pub spec: QuadratureSpec,
    pub eigen_residual: f64,
    pub iterations: usize,
    pub gram_deviation: f64,
    pub output_dim: usize,
}

/// `||H_f||` on the span of degree `<= cap`, after basis certification.
pub fn truncated_hankel_norm(f: &Symbol, n: usize, cap: usize, spec: &QuadratureSpec) -> Result<HankelEstimate> {
    let gram = certify_basis(n, cap, spec, Multiplier::Holomorphic)?;
    let form = hankel_quadratic_form(f, n, cap, spec)?;
    let pw = power_iteration(&form.h, spec.seed)?;
    Ok(HankelEstimate {
        norm_estimate: pw.eigenvalue.max(0.0).sqrt(),
        basis_degree_cap: cap,
        spec: spec.clone(),
        eigen_residual: pw.residual,
        iterations: pw.iterations,
        gram_deviation: gram.deviation,
        output_dim: form.output_dim,
    })
}

/// `||g||^2 - ||P_W g||^2` for one target function given per-node values on the ball.
fn residual_norm<F>(
    rule: &BallRule,
    n: usize,
    deg: usize,
    enrich: bool,
    target: F,
) -> Result<(f64, f64)>
where
    F: Fn(&[C64]) -> C64 + Sync,
{
    let output = MonomialTable::new(n, deg);
    let ku = output.len() + usize::from(enrich);
    let (gw, ut, tt) = accumulate(rule, ku, 1, |xi, u, t| {
        let g = target(xi);
        output.fill(xi, &mut u[..output.len()]);
        if enrich {
            u[output.len()] = g;
        }
        t[0] = g;
    })?;
    let proj = (pinv_half(&gw) * ut).norm_squared();
    let total = tt[(0, 0)].re;
    Ok((total, proj))
}

fn clamp_sqrt(total: f64, proj: f64) -> Result<f64> {
    let rad = total - proj;
    if rad >= 0.0 {
        Ok(rad.sqrt())
    } else if rad > -(1e-8 * total.abs() + CLAMP_FLOOR) {
        Ok(0.0)
    } else {
        Err(Error::QuadratureInconsistency { radicand: rad, std_error: 0.0 })
    }
}

/// `||H_f k_z||` through Möbius covariance: `||H_{f o sigma_z^{-1}} e_0||`, with
/// `k_i = e_0`. Symbols with a declared support use [`hankel_on_kz_direct`].
pub fn hankel_on_kz(f: &Symbol, z: &HPoint, cap: usize, spec: &QuadratureSpec) -> Result<f64> {
    if f.support().is_some() {
        return hankel_on_kz_direct(f, z, cap, spec);
    }
    let n = z.dim();
    check_spec_dim(spec, n)?;
    let chart = KernelChart::new(z, Transport::Sigma)?;
    let rule = BallRule::new(spec)?;
    let m0 = monomial_norm(&vec![0; n]);
    let (total, proj) = residual_norm(&rule, n, output_degree(n, cap), f.has(Claim::Holomorphic), |xi| {
        f.value(&chart.map(xi)) * m0
    })?;
    clamp_sqrt(total, proj)
}

/// `||H_f k_z||` computed directly: `V(f k_z) = F * Kb` with `Kb = (k_z o Phi) / (j o Phi)`.
/// Supported symbols are integrated over their support.
pub fn hankel_on_kz_direct(f: &Symbol, z: &HPoint, cap: usize, spec: &QuadratureSpec) -> Result<f64> {
    let n = z.dim();
    check_spec_dim(spec, n)?;
    z.check_interior()?;
    let enrich = f.has(Claim::Holomorphic);
    let deg = output_degree(n, cap);
    let target = |xi: &[C64]| {
        let w = cayley_unchecked(xi);
        f.value(&w) * normalized_kernel_unchecked(z, &w) / multiplier(&w)
    };
    let (total, proj) = match f.support() {
        Some(s) => {
            let s = crate::symbols::support_in_dim(s, n);
            support_residual(f, z, &s, deg, spec)?
        }
        None => {
            let rule = BallRule::new(spec)?;
            residual_norm(&rule, n, deg, enrich, target)?
        }
    };
    clamp_sqrt(total, proj)
}

/// `||f k_z||^2` and `sum_i |<f k_z, e_i>|^2` on the support chart, with the
/// orthonormal basis of degree `<= deg`.
fn support_residual(
    f: &Symbol,
    z: &HPoint,
    s: &crate::symbols::Support,
    deg: usize,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    let n = z.dim();
    let chart = crate::integrate::MetricBallChart::new(&s.center, s.radius)?;
    let rule = BallRule::new(&spec.with_scheme(Scheme::PolarProduct))?;
    let table = MonomialTable::new(n, deg);
    let k = table.len();
    let vol = unit_ball_volume(n);
    let ch = rule.evaluate_channels(k + 1, |xi, out| {
        let (w, d) = chart.map(xi);
        let g = f.value(&w) * normalized_kernel_unchecked(z, &w);
        let mut m = vec![C64::new(0.0, 0.0); k];
        table.fill(&cayley_inv_unchecked(&w), &mut m);
        let j = multiplier(&w);
        for (o, mi) in out.iter_mut().zip(&m) {
            *o = g * (mi * j).conj() * d * vol;
        }
        out[k] = C64::new(g.norm_sqr() * d * vol, 0.0);
    })?;
    let proj: f64 = (0..k).map(|i| rule.estimate(&ch.channel(i)).value.norm_sqr()).sum();
    let total = rule.estimate(&ch.channel(k)).value.re;
    Ok((total, proj))
}

/// `||P(conj(f_z) k_z) - f~(z) k_z||` on the span of degree `<= cap`, where
/// `f_z = P(conj(f) k_z) / k_z`. Everything is carried to the ball by `V`.
pub fn berezin_reproducing_residual(f: &Symbol, z: &HPoint, cap: usize, spec: &QuadratureSpec) -> Result<f64> {
    let n = z.dim();
    check_spec_dim(spec, n)?;
    z.check_interior()?;
    let rule = BallRule::new(spec)?;
    let table = MonomialTable::new(n, cap);
    let k = table.len();
    let vol = unit_ball_volume(n);
    let len = rule.len();
    // Rows of every matrix carry sqrt(weight).
    let mut m = DMatrix::<C64>::zeros(len, k);
    let mut fv = vec![C64::new(0.0, 0.0); len];
    let mut kb = vec![C64::new(0.0, 0.0); len];
    let mut sw = vec![0.0; len];
    let mut row = vec![C64::new(0.0, 0.0); k];
    for i in 0..len {
        let xi = rule.point(i);
        let w = cayley_unchecked(xi);
        fv[i] = f.value(&w);
        kb[i] = normalized_kernel_unchecked(z, &w) / multiplier(&w);
        if !fv[i].is_finite() || !kb[i].is_finite() {
            return Err(rule_non_finite(&rule, i));
        }
        sw[i] = weight(&rule, i, vol).sqrt();
        table.fill(xi, &mut row);
        for c in 0..k {
            m[(i, c)] = row[c] * sw[i];
        }
    }
    let column = |g: &dyn Fn(usize) -> C64| DMatrix::<C64>::from_fn(len, 1, |i, _| g(i) * sw[i]);
    // a_c = <conj(F) Kb, m_c>; U = sum_c a_c m_c.
    let a = adjoint_mul(&m, &column(&|i| fv[i].conj() * kb[i]));
    let u = &m * &a;
    // u already carries sqrt(weight); divide it out before forming conj(U / Kb) Kb.
    let b = adjoint_mul(&m, &column(&|i| (u[(i, 0)] / (sw[i] * kb[i])).conj() * kb[i]));
    let ck = adjoint_mul(&m, &column(&|i| kb[i]));
    let ftilde: C64 = (0..len).map(|i| fv[i] * kb[i].norm_sqr() * sw[i] * sw[i]).sum();
    let res: f64 = (0..k).map(|c| (b[(c, 0)] - ftilde * ck[(c, 0)]).norm_sqr()).sum();
    Ok(res.sqrt())
}

/// `MO(f)(z)` against `||H_f k_z|| + ||H_{conj f} k_z||` at one point.
pub fn mo_hankel_pair(f: &Symbol, z: &HPoint, cap: usize, spec: &QuadratureSpec) -> Result<(Estimate, f64)> {
    let mo = crate::oscillation::mean_oscillation(f, z, spec)?;
    let h = hankel_on_kz(f, z, cap, spec)? + hankel_on_kz(&f.conj(), z, cap, spec)?;
    Ok((Estimate { value: mo.value, std_error: crate::oscillation::mo_value_error(&mo) }, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::{make_symbol, Params};
    use nalgebra::DVector;

    fn polar(n: usize, nodes: usize) -> QuadratureSpec {
        QuadratureSpec::new(Scheme::PolarProduct, nodes, 3, n).unwrap()
    }

    #[test]
    fn indices_graded_lex() {
        let b = basis_indices(2, 2);
        let alphas: Vec<Vec<u32>> = b.iter().map(|i| i.alpha.clone()).collect();
        assert_eq!(alphas, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
        assert_eq!(basis_indices(2, 6).len(), 28);
        assert_eq!(basis_indices(1, 10).len(), 11);
    }

    #[test]
    fn multiplier_modulus_identity() {
        let z = HPoint::new(vec![C64::new(0.2, 0.3)], C64::new(-1.0, 2.5));
        let j = multiplier(&z);
        let r = crate::geometry::rho_pair(&z, &HPoint::base(2)).unwrap();
        assert!((j.norm_sqr() * 4.0 * r.norm_sqr().powi(3) - 1.0).abs() < 1e-12);
        let xi = vec![C64::new(0.1, 0.2), C64::new(-0.3, 0.1)];
        let jp = multiplier(&cayley_unchecked(&xi));
        assert!((jp - 0.5 * (C64::new(1.0, 0.0) + xi[1]).powu(3)).norm() < 1e-14);
    }

    #[test]
    fn base_kernel_is_first_basis_vector() {
        for n in 1..=3 {
            let w = HPoint::new(vec![C64::new(0.1, 0.0); n - 1], C64::new(0.4, 1.3));
            let e0 = basis_function(&BasisIndex { alpha: vec![0; n] }, &w);
            let k = normalized_kernel_unchecked(&HPoint::base(n), &w);
            assert!((e0 - k).norm() < 1e-14);
        }
    }

    #[test]
    fn gram_small() {
        let g = gram_matrix(1, 0, &polar(1, 1000)).unwrap();
        assert!((g.matrix[(0, 0)].re - 1.0).abs() < 1e-10);
        let g = gram_matrix(1, 6, &polar(1, 5000)).unwrap();
        assert!(g.certified(), "{} {}", g.deviation, g.reproducing_deviation);
        let faulty = gram_matrix_with(1, 6, &polar(1, 5000), Multiplier::Modulus).unwrap();
        assert!(faulty.deviation < 1e-6);
        assert!(faulty.reproducing_deviation > 1e-3);
    }

    #[test]
    fn constant_symbol_has_zero_hankel() {
        let c = make_symbol("const", &Params::new()).unwrap();
        let est = truncated_hankel_norm(&c, 1, 4, &polar(1, 5000)).unwrap();
        assert!(est.norm_estimate < 1e-6, "{est:?}");
        assert!(hankel_on_kz(&c, &HPoint::base(1), 4, &polar(1, 5000)).unwrap() < 1e-6);
    }

    #[test]
    fn power_iteration_diag() {
        let h = DMatrix::<C64>::from_diagonal(&DVector::from_vec(vec![
            C64::new(3.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(-0.5, 0.0),
        ]));
        let r = power_iteration(&h, 1).unwrap();
        assert!((r.eigenvalue - 3.0).abs() < 1e-7);
        let neg = DMatrix::<C64>::from_diagonal(&DVector::from_vec(vec![C64::new(0.1, 0.0), C64::new(-2.0, 0.0)]));
        let r = power_iteration(&neg, 1).unwrap();
        assert!((r.eigenvalue - 0.1).abs() < 1e-6, "{r:?}");
    }
}
