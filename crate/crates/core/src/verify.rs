//! The `verify` suite: every invariant family run at one [`RunConfig`].
//!
//! Each [`Check`] records what was measured against which tolerance. Checks
//! marked non-gating are reported but do not affect the exit status; they
//! document known normalization conflicts.

use std::f64::consts::SQRT_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bloch::{
    ball_invariant_gradient, ball_invariant_gradient_analytic, invariant_gradient, invariant_gradient_fd,
    lipschitz_ratio, BALL_TRANSFER_FACTOR,
};
use crate::error::Result;
use crate::geometry::{
    ball_metric, ball_volume, bergman_kernel, bergman_metric, cayley, cayley_inv, mobius_ball, normalized_kernel,
    rho, rho_pair, sigma, sigma_inv, tau, BPoint, HPoint, C64,
};
use crate::hankel::{
    self, basis_indices, berezin_reproducing_residual, gram_matrix_with, hankel_on_kz, truncated_hankel_norm,
    Multiplier,
};
use crate::integrate::{integrate_halfspace, integrate_metric_ball, QuadratureSpec, Scheme, Transport};
use crate::oscillation::{
    berezin_with, build_grid, forelli_rudin_integral, mean_oscillation_r_routes, mean_oscillation_routes,
    seminorm_scan, GridPoint, GridPreset, Seminorm,
};
use crate::report::{Report, Row, RunConfig};
use crate::symbols::{make_symbol, params, Claim, Params, Symbol};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub citation: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub gating: bool,
}

impl Check {
    fn upper(suite: &'static str, name: impl Into<String>, citation: &'static str, measured: f64, tol: f64) -> Self {
        Self {
            suite,
            name: name.into(),
            citation,
            measured,
            tolerance: tol,
            pass: measured <= tol,
            gating: true,
        }
    }

    fn lower(suite: &'static str, name: impl Into<String>, citation: &'static str, measured: f64, tol: f64) -> Self {
        Self { pass: measured > tol, ..Self::upper(suite, name, citation, measured, tol) }
    }

    fn informational(mut self) -> Self {
        self.gating = false;
        self
    }

    pub fn row(&self) -> Row {
        Row::new()
            .text("suite", self.suite)
            .text("check", self.name.clone())
            .text("citation", self.citation)
            .real("measured", self.measured)
            .real("tolerance", self.tolerance)
            .text("status", if self.pass { "PASS" } else { "FAIL" })
            .flag("gating", self.gating)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

fn crel(a: C64, b: C64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 {
        0.0
    } else {
        (a - b).norm() / s
    }
}

/// Random interior point with `|z'| <= 1`, `Re z_n in [-3, 3]`, `rho in [e^-2, e^2]`.
pub fn random_point(rng: &mut ChaCha8Rng, n: usize) -> HPoint {
    let zp: Vec<C64> = (0..n - 1)
        .map(|_| C64::new(rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7)))
        .collect();
    let h: f64 = zp.iter().map(|c| c.norm_sqr()).sum::<f64>() + rng.random_range(-2.0f64..2.0).exp();
    HPoint::new(zp, C64::new(rng.random_range(-3.0..3.0), h))
}

/// Random ball point with `|xi| <= rmax`.
pub fn random_ball(rng: &mut ChaCha8Rng, n: usize, rmax: f64) -> BPoint {
    let v: Vec<C64> = (0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let nrm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let r = rmax * rng.random::<f64>();
    BPoint::new(v.iter().map(|c| c * (r / nrm)).collect())
}

const GEOMETRY_INSTANCES: usize = 2_000;

fn geometry_suite(cfg: &RunConfig) -> Result<Vec<Check>> {
    let n = cfg.n;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut s1, mut s2, mut ineq, mut bounds, mut inv, mut cay, mut trip, mut base, mut herm) =
        (0f64, 0f64, 0f64, 0f64, 0f64, 0f64, 0f64, 0f64, 0f64);
    for _ in 0..GEOMETRY_INSTANCES {
        let (z, u, v) = (random_point(&mut rng, n), random_point(&mut rng, n), random_point(&mut rng, n));
        let ruv = rho_pair(&u, &v)?;
        s1 = s1.max(crel(rho_pair(&sigma(&z, &u), &sigma(&z, &v))?, ruv / rho(&z)));
        s2 = s2.max(crel(rho_pair(&sigma_inv(&z, &u), &sigma_inv(&z, &v))?, ruv * rho(&z)));
        let m = rho(&u).max(rho(&v));
        ineq = ineq.max((m - 2.0 * ruv.norm()).max(0.0) / m);
        let t = bergman_metric(&u, &v)?.tanh();
        let ratio = rho_pair(&z, &u)?.norm() / rho_pair(&z, &v)?.norm();
        let (lo, hi) = ((1.0 - t) / (1.0 + t), (1.0 + t) / (1.0 - t));
        bounds = bounds.max(((lo - ratio).max(ratio - hi)).max(0.0) / ratio);
        let b = bergman_metric(&u, &v)?;
        inv = inv.max(rel(bergman_metric(&sigma(&z, &u), &sigma(&z, &v))?, b));
        inv = inv.max(rel(bergman_metric(&sigma_inv(&z, &u), &sigma_inv(&z, &v))?, b));
        cay = cay.max(rel(ball_metric(&cayley_inv(&u)?, &cayley_inv(&v)?)?, b));
        let back = sigma_inv(&z, &sigma(&z, &u));
        let d: f64 = back.coords().iter().zip(u.coords()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        trip = trip.max(d / u.norm().max(1.0));
        let xi = random_ball(&mut rng, n, 0.95);
        let eta = random_ball(&mut rng, n, 0.95);
        let rt = cayley_inv(&cayley(&xi)?)?;
        let mm = mobius_ball(&eta, &mobius_ball(&eta, &xi)?)?;
        for (a, b) in xi.xi().iter().zip(rt.xi()).chain(xi.xi().iter().zip(mm.xi())) {
            trip = trip.max((a - b).norm());
        }
        let sz = sigma(&z, &z);
        base = base.max(sz.coords().iter().zip(HPoint::base(n).coords()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
        herm = herm.max(crel(bergman_kernel(&z, &u)?, bergman_kernel(&u, &z)?.conj()));
    }
    const C: &str = "automorphism and kernel identities";
    Ok(vec![
        Check::upper("geometry", "rho under sigma_z", "rho-form scaling under sigma_z", s1, 1e-10),
        Check::upper("geometry", "rho under sigma_z^-1", "rho-form scaling under sigma_z inverse", s2, 1e-10),
        Check::upper("geometry", "2|rho(z,w)| >= max(rho(z), rho(w))", "rho-form lower bound", ineq, 1e-12),
        Check::upper("geometry", "rho ratio bounds on metric balls", "rho-form ratio on Bergman balls", bounds, 1e-10),
        Check::upper("geometry", "beta invariance under sigma_z^{+-1}", "Bergman metric invariance", inv, 1e-10),
        Check::upper("geometry", "beta = beta_B o Cayley", "Cayley transform is an isometry", cay, 1e-10),
        Check::upper("geometry", "round trips sigma, Cayley, ball involution", C, trip, 1e-12),
        Check::upper("geometry", "sigma_z(z) = i", C, base, 1e-12),
        Check::upper("geometry", "K(z,w) = conj K(w,z)", "Bergman kernel symmetry", herm, 1e-12),
    ])
}

fn integrate_suite(cfg: &RunConfig, spec: &QuadratureSpec) -> Result<Vec<Check>> {
    let n = cfg.n;
    let mut out = Vec::new();
    let mut worst: f64 = 0.0;
    for (k, r) in [0.5, 1.0, 2.0].iter().enumerate() {
        let z = if k == 1 { HPoint::new(vec![C64::new(0.3, -0.2); n - 1], C64::new(1.5, 2.0)) } else { HPoint::base(n) };
        let est = integrate_metric_ball(&z, *r, |_| C64::new(1.0, 0.0), &spec.for_point(k))?;
        let exact = ball_volume(&z, *r);
        worst = worst.max((est.value.re - exact).abs() / (3.0 * est.std_error + 1e-9 * exact));
    }
    out.push(Check::upper("integrate", "|D(z,r)| against closed form, r in {0.5,1,2}", "Bergman ball volume", worst, 1.0));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let (mut knorm, mut ber): (f64, f64) = (0.0, 0.0);
    let one = make_symbol("const", &Params::new())?;
    for k in 0..5 {
        let z = cayley(&random_ball(&mut rng, n, 0.5))?;
        let est = integrate_halfspace(|w| C64::new(normalized_kernel(&z, w).map_or(f64::NAN, |v| v.norm_sqr()), 0.0), &spec.for_point(k))?;
        knorm = knorm.max((est.value.re - 1.0).abs() / (3.0 * est.std_error + 1e-9));
        for kind in [Transport::Sigma, Transport::Tau] {
            let b = berezin_with(&one, &z, &spec.for_point(k), kind)?;
            ber = ber.max((b.value.re - 1.0).abs() / (3.0 * b.std_error + 1e-12));
        }
    }
    out.push(Check::upper("integrate", "||k_z||^2 = 1 (direct pullback)", "normalized reproducing kernel", knorm, 1.0));
    out.push(Check::upper("integrate", "Berezin(1) = 1 (sigma and tau routes)", "Berezin transform of constants", ber, 1.0));
    Ok(out)
}

const MO_SYMBOLS: [&str; 5] = ["log-kernel", "beta-dist", "bump", "osc-bump", "recip-kernel"];

fn oscillation_suite(cfg: &RunConfig, spec: &QuadratureSpec) -> Result<Vec<Check>> {
    let n = cfg.n;
    let mut out = Vec::new();
    let rp = make_symbol("rho-power", &params(&[("s", 1.0)]))?;
    let spread = |kind: Transport| -> Result<f64> {
        let mut ratios = Vec::new();
        for t in (-4..=4).map(|k| 2f64.powi(k)) {
            let z = crate::geometry::dilation(t, &HPoint::new(vec![C64::new(0.2, 0.1); n - 1], C64::new(0.5, 1.2)));
            ratios.push(berezin_with(&rp, &z, spec, kind)?.value.re / rho(&z));
        }
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        Ok(ratios.iter().map(|r| (r - mean).abs() / mean).fold(0.0, f64::max))
    };
    out.push(Check::upper("oscillation", "Berezin(rho)/rho constant on a dilation orbit (sigma route)", "Berezin transform dilation covariance", spread(Transport::Sigma)?, 5e-3));
    out.push(
        Check::upper("oscillation", "Berezin(rho)/rho spread, tau route", "Berezin transform dilation covariance", spread(Transport::Tau)?, 5e-2)
            .informational(),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x0dd);
    let centers: Vec<HPoint> = (0..4).map(|_| random_point(&mut rng, n)).collect();
    let (mut mo, mut mor): (f64, f64) = (0.0, 0.0);
    for (i, id) in MO_SYMBOLS.iter().enumerate() {
        let f = make_symbol(id, &Params::new())?;
        for (j, z) in centers.iter().enumerate() {
            let s = spec.for_point(10 * i + j);
            let r = mean_oscillation_routes(&f, z, &s)?;
            let (a, b) = (r.definition, r.centered);
            mo = mo.max((a.radicand - b.radicand).abs() / (3.0 * a.std_error.hypot(b.std_error) + 1e-9));
            let r = mean_oscillation_r_routes(&f, z, 1.0, &s)?;
            let (a, b) = (r.moments, r.double_integral);
            mor = mor.max((a.radicand - b.radicand).abs() / (3.0 * a.std_error.hypot(b.std_error) + 1e-9));
        }
    }
    out.push(Check::upper("oscillation", "MO: variance form = centred integral", "mean oscillation identities", mo, 1.0));
    out.push(Check::upper("oscillation", "MO_r: moments = double integral", "metric-ball mean oscillation identities", mor, 1.0));

    let fr_spec = spec.with_scheme(Scheme::PolarProduct);
    let fr_spec = QuadratureSpec { dim: 1, ..fr_spec };
    let mut fr: f64 = 0.0;
    for alpha in [0.0, 1.0] {
        let (t, s) = (0.0, 3.0);
        let vals: Vec<f64> = (-2..=2)
            .map(|k| {
                let z = crate::geometry::dilation(2f64.powi(k), &HPoint::new(vec![], C64::new(0.7, 1.3)));
                forelli_rudin_integral(&z, t, s, alpha, &fr_spec).map(|v| v.value.re * rho(&z).powf(s - t - 2.0))
            })
            .collect::<Result<_>>()?;
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        fr = fr.max(vals.iter().map(|v| (v - m).abs() / m).fold(0.0, f64::max));
    }
    out.push(Check::upper("oscillation", "Forelli-Rudin scaling, (n,t,s) = (1,0,3), alpha in {0,1}", "Forelli-Rudin type estimate", fr, 1e-2));
    Ok(out)
}

fn hankel_suite(cfg: &RunConfig, spec: &QuadratureSpec) -> Result<Vec<Check>> {
    let n = cfg.n;
    let cap = cfg.degree_cap;
    let polar = spec.with_scheme(Scheme::PolarProduct);
    let kind = if cfg.fault_injection { Multiplier::Modulus } else { Multiplier::Holomorphic };
    let mut out = Vec::new();
    let g = gram_matrix_with(n, cap.min(6), &polar, kind)?;
    out.push(Check::upper("hankel", "gram certification: Gram deviation", "orthonormal basis transported by the Cayley transform", g.deviation, hankel::GRAM_TOL));
    out.push(Check::upper("hankel", "gram certification: reproducing deviation", "reproducing property of the Bergman kernel", g.reproducing_deviation, hankel::REPRODUCING_TOL));

    // Isometry: ||p||_B in closed form against the transported norm on U.
    let idx = basis_indices(n, cap.min(6));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x150);
    let mut iso: f64 = 0.0;
    for _ in 0..10 {
        let c: Vec<C64> = idx.iter().map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let exact: f64 = idx
            .iter()
            .zip(&c)
            .map(|(i, c)| c.norm_sqr() / hankel::monomial_norm(&i.alpha).powi(2))
            .sum();
        let (idx2, c2) = (idx.clone(), c.clone());
        let est = integrate_halfspace(
            move |w| {
                let xi = crate::geometry::cayley_inv_unchecked(w);
                let p: C64 = idx2
                    .iter()
                    .zip(&c2)
                    .map(|(i, c)| c * hankel::ball_monomial(i, &xi) / hankel::monomial_norm(&i.alpha))
                    .sum();
                C64::new((p * hankel::multiplier_with(w, kind)).norm_sqr(), 0.0)
            },
            &polar,
        )?;
        iso = iso.max(rel(est.value.re.sqrt(), exact.sqrt()));
    }
    out.push(Check::upper("hankel", "isometry on 10 random polynomials", "Cayley transform unitary", iso, 1e-6));
    if cfg.fault_injection {
        return Ok(out);
    }

    for id in ["log-kernel", "recip-kernel"] {
        let f = make_symbol(id, &Params::new())?;
        let h = truncated_hankel_norm(&f, n, cap, &polar)?;
        let hb = truncated_hankel_norm(&f.conj(), n, cap, &polar)?;
        out.push(Check::upper("hankel", format!("zero Hankel law: {id}"), "Hankel operator of a holomorphic symbol vanishes", h.norm_estimate / hb.norm_estimate.max(1.0), 1e-3));
        if id == "log-kernel" {
            out.push(Check::lower("hankel", "conj(log-kernel): positive top eigenvalue", "Hankel norm and Bloch seminorm", hb.norm_estimate, 1e-3));
        }
    }

    let beta = make_symbol("beta-dist", &Params::new())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x43);
    let (mut res, mut dec): (f64, f64) = (0.0, 0.0);
    for _ in 0..5 {
        let z = cayley(&random_ball(&mut rng, n, 0.5))?;
        let r1 = berezin_reproducing_residual(&beta, &z, cap, &polar)?;
        let r2 = berezin_reproducing_residual(&beta, &z, 2 * cap, &polar)?;
        res = res.max(r1);
        if r2 > r1 && r1 > 1e-12 {
            dec = dec.max(r2 / r1 - 1.0);
        }
    }
    out.push(Check::upper("hankel", "reproducing residual for beta-dist at 5 points", "Berezin transform through the Bergman projection", res, 1e-3));
    out.push(Check::upper("hankel", "reproducing residual decreases when degree_cap doubles", "Berezin transform through the Bergman projection", dec, 0.0));

    let c1 = empirical_constant(n, cap, &polar, GridPreset::RayLadder)?;
    out.push(Check::upper("hankel", "empirical constant C (finite)", "Hankel operators bounded iff symbol in BMO", if c1.is_finite() { 0.0 } else { 1.0 }, 0.0));
    out.push(Check::upper("hankel", "empirical constant C", "Hankel operators bounded iff symbol in BMO", c1, f64::INFINITY).informational());
    if n == 1 {
        let c2 = empirical_constant(n, 2 * cap, &polar.with_nodes(2 * polar.node_count), GridPreset::RayLadder)?;
        out.push(Check::upper("hankel", "C stable under doubling degree_cap and node_count", "Hankel operators bounded iff symbol in BMO", rel(c2, c1), 0.2));
    }
    Ok(out)
}

/// Pointwise and global constants comparing `MO` with Hankel quantities over
/// the BMO members of the corpus; returns the largest of all ratios and inverses.
pub fn empirical_constant(n: usize, cap: usize, spec: &QuadratureSpec, grid: GridPreset) -> Result<f64> {
    Ok(ratio_table(n, cap, spec, grid)?.iter().map(|r| r.constant()).fold(1.0, f64::max))
}

/// Per-symbol Hankel/BMO comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioRow {
    pub symbol: String,
    pub hankel: f64,
    pub hankel_conj: f64,
    pub bmo_sup: f64,
    /// `max_z MO(f)(z) / (||H_f k_z|| + ||H_conj(f) k_z||)`.
    pub pointwise: f64,
}

impl RatioRow {
    pub fn global(&self) -> f64 {
        (self.hankel + self.hankel_conj) / self.bmo_sup
    }

    pub fn constant(&self) -> f64 {
        let g = self.global();
        g.max(1.0 / g).max(self.pointwise)
    }
}

pub fn bmo_corpus(n: usize) -> Result<Vec<Symbol>> {
    let mut out = Vec::new();
    for id in crate::symbols::CORPUS_IDS {
        let f = make_symbol(id, &Params::new())?;
        if f.expect_bmo() && f.min_dim() <= n && id != "const" {
            out.push(f);
        }
    }
    Ok(out)
}

pub fn ratio_table(n: usize, cap: usize, spec: &QuadratureSpec, grid: GridPreset) -> Result<Vec<RatioRow>> {
    let grid = build_grid(grid, n);
    let mut rows = Vec::new();
    for f in bmo_corpus(n)? {
        let h = truncated_hankel_norm(&f, n, cap, spec)?.norm_estimate;
        let hb = truncated_hankel_norm(&f.conj(), n, cap, spec)?.norm_estimate;
        rows.push(ratio_row(&f, h, hb, cap, spec, &grid)?);
    }
    Ok(rows)
}

/// Completes a [`RatioRow`] from the truncated norms `h` of `f` and `hb` of its conjugate.
pub fn ratio_row(f: &Symbol, h: f64, hb: f64, cap: usize, spec: &QuadratureSpec, grid: &[GridPoint]) -> Result<RatioRow> {
    let scan = seminorm_scan(f, Seminorm::Bmo, grid, spec)?;
    let mut pointwise: f64 = 0.0;
    for (g, mo) in grid.iter().zip(&scan.values) {
        let hk = hankel_on_kz(f, &g.point, cap, spec)? + hankel_on_kz(&f.conj(), &g.point, cap, spec)?;
        if *mo > 1e-8 && hk > 0.0 {
            pointwise = pointwise.max(mo / hk);
        }
    }
    Ok(RatioRow { symbol: f.id().into(), hankel: h, hankel_conj: hb, bmo_sup: scan.sup_estimate, pointwise })
}

fn bloch_suite(cfg: &RunConfig) -> Result<Vec<Check>> {
    let n = cfg.n;
    let mut out = Vec::new();
    let log = make_symbol("log-kernel", &Params::new())?;
    let base = HPoint::base(n);
    out.push(Check::upper("bloch", "|grad~ log(z_n + i)| at i equals sqrt 2", "invariant gradient formula", (invariant_gradient(&log, &base)? - SQRT_2).abs(), 1e-10));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0xb10c);
    let holo: Vec<Symbol> = ["log-kernel", "recip-kernel", "coord", "const"]
        .iter()
        .map(|id| make_symbol(id, &Params::new()))
        .collect::<Result<_>>()?;
    let (mut an, mut fdb, mut lit, mut fd): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for f in &holo {
        for _ in 0..50 {
            let z = cayley(&random_ball(&mut rng, n, 0.9))?;
            let g = invariant_gradient(f, &z)?;
            let xi = cayley_inv(&z)?;
            let ba = ball_invariant_gradient_analytic(f, &xi)?;
            let bf = ball_invariant_gradient(|e| f.value(&crate::geometry::cayley_unchecked(e)), &xi)?;
            let scale = g.max(1e-300);
            an = an.max((g - BALL_TRANSFER_FACTOR * ba).abs() / scale);
            fdb = fdb.max((g - BALL_TRANSFER_FACTOR * bf).abs() / scale);
            lit = lit.max((g - 2.0 * ba).abs() / scale);
            fd = fd.max((g - invariant_gradient_fd(f, &z)?).abs() / scale);
        }
    }
    const GT: &str = "invariant gradient transfer through the Cayley transform";
    out.push(Check::upper("bloch", "transfer with factor sqrt 2, analytic channel", GT, an, 1e-8));
    out.push(Check::upper("bloch", "transfer with factor sqrt 2, finite differences", GT, fdb, 1e-4));
    out.push(Check::upper("bloch", "transfer with factor 2 as displayed (normalization conflict)", GT, lit, 1e-8).informational());
    out.push(Check::upper("bloch", "finite-difference vs analytic gradient", "invariant gradient formula", fd, 1e-6));

    let mut tau_dev: f64 = 0.0;
    for _ in 0..20 {
        let a = cayley(&random_ball(&mut rng, n, 0.7))?;
        let z = cayley(&random_ball(&mut rng, n, 0.7))?;
        let a2 = a.clone();
        let comp = log
            .compose("log o tau_a", move |w| tau(&a2, w).unwrap_or_else(|_| w.clone()))
            .with_claims(&[Claim::Holomorphic]);
        tau_dev = tau_dev.max(rel(invariant_gradient(&comp, &z)?, invariant_gradient(&log, &tau(&a, &z)?)?));
    }
    out.push(Check::upper("bloch", "Moebius invariance of |grad~| under tau_a", "invariance of the Bergman metric", tau_dev, 1e-4));

    let (mut lip, mut lip_lit): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let z = random_point(&mut rng, n);
        let w = random_point(&mut rng, n);
        let l = lipschitz_ratio(&log, &z, &w)?;
        lip = lip.max(l.ratio / (BALL_TRANSFER_FACTOR * l.geodesic_sup));
        lip_lit = lip_lit.max(l.ratio / l.geodesic_sup);
    }
    const LC: &str = "Lipschitz estimate for Bloch functions";
    out.push(Check::upper("bloch", "2|f(z)-f(w)|/beta <= sqrt 2 sup |grad~ f| on 100 pairs", LC, lip, 1.0 + 1e-6));
    out.push(Check::upper("bloch", "2|f(z)-f(w)|/beta <= sup |grad~ f| as displayed (normalization conflict)", LC, lip_lit, 1.0 + 1e-6).informational());
    Ok(out)
}

/// Index from which the ball `D(z, 1)` no longer meets `D(i, radius)`.
fn exit_index(points: &[HPoint], radius: f64) -> Result<usize> {
    for (k, p) in points.iter().enumerate() {
        if bergman_metric(p, &HPoint::base(p.dim()))? > radius + 1.0 {
            return Ok(k);
        }
    }
    Ok(points.len())
}

fn decay_suite(cfg: &RunConfig, spec: &QuadratureSpec) -> Result<Vec<Check>> {
    let n = cfg.n;
    let grid = build_grid(GridPreset::RayLadder, n);
    let bump = make_symbol("bump", &Params::new())?;
    let mut out = Vec::new();
    for which in [Seminorm::Bmo, Seminorm::Ba] {
        let scan = seminorm_scan(&bump, which, &grid, spec)?;
        let mut worst: f64 = 0.0;
        for p in &scan.decay_profile {
            let pts: Vec<HPoint> = grid.iter().filter(|g| g.ray == p.ray).map(|g| g.point.clone()).collect();
            let start = exit_index(&pts, 1.0)?;
            for w in p.values[start.min(p.values.len())..].windows(2) {
                worst = worst.max((w[1] - w[0]) / w[0].max(1e-300));
            }
            let peak = p.values.iter().copied().fold(0.0, f64::max);
            worst = worst.max(p.values.last().copied().unwrap_or(0.0) / peak.max(1e-300) - 1e-2);
        }
        out.push(Check::upper("decay", format!("bump {} decays along every ray", which.label()), "vanishing oscillation of compactly supported symbols", worst.max(0.0), 1e-6));
    }
    let coord = make_symbol("coord", &Params::new())?;
    let up: Vec<_> = grid.iter().filter(|g| g.ray == "dilation-up").cloned().collect();
    let scan = seminorm_scan(&coord, Seminorm::Bmo, &up, spec)?;
    let first = scan.values[0];
    let last = *scan.values.last().unwrap_or(&0.0);
    let growth = last / first.max(1e-300);
    let increasing = scan.values.windows(2).all(|w| w[1] > w[0]);
    let mut c = Check::lower("decay", "z_1 mean oscillation unbounded along dilation ray", "coordinate functions are not in BMO", growth, 100.0);
    c.pass &= increasing;
    out.push(c);
    Ok(out)
}

/// Runs every suite; the flag is true when all gating checks pass.
pub fn run_verify(cfg: &RunConfig) -> Result<(Report, bool)> {
    let spec = cfg.spec()?;
    let mut checks = Vec::new();
    if !cfg.fault_injection {
        checks.extend(geometry_suite(cfg)?);
        checks.extend(integrate_suite(cfg, &spec)?);
        checks.extend(oscillation_suite(cfg, &spec)?);
    }
    checks.extend(hankel_suite(cfg, &spec)?);
    if !cfg.fault_injection {
        checks.extend(bloch_suite(cfg)?);
        checks.extend(decay_suite(cfg, &spec)?);
    }
    let ok = checks.iter().all(|c| c.pass || !c.gating);
    let mut report = Report::new("verify", cfg);
    for c in &checks {
        report.push(c.row());
    }
    report.push(Row::new().text("suite", "summary").text("status", if ok { "PASS" } else { "FAIL" }).int("checks", checks.len() as i64));
    Ok((report, ok))
}
