//! Acceptance criteria 1-12 plus the full `verify` runtime budget.
//!
//! Prints one `PASS`/`FAIL` line per criterion. Lines tagged `note` report
//! sub-measurements with a known normalization conflict; they never affect
//! the exit status.

use std::f64::consts::{PI, SQRT_2};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use siegel::bloch::*;
use siegel::geometry::*;
use siegel::hankel::*;
use siegel::integrate::*;
use siegel::oscillation::*;
use siegel::report::RunConfig;
use siegel::symbols::*;
use siegel::verify::{empirical_constant, random_ball, random_point, run_verify};

type R<T> = Result<T, Box<dyn std::error::Error>>;

const SEED: u64 = RunConfig::DEFAULT_SEED;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> R<Outcome> {
    Ok(Outcome { pass, detail: detail.into() })
}

fn note(label: &str, pass: bool, detail: &str) {
    println!("  note {label}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
}

fn sym(id: &str) -> Symbol {
    make_symbol(id, &Params::new()).expect("corpus symbol")
}

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 { 0.0 } else { (a - b).abs() / s }
}

fn crel(a: C64, b: C64) -> f64 {
    let s = a.norm().max(b.norm());
    if s == 0.0 { 0.0 } else { (a - b).norm() / s }
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `rho(z, w) = (i/2)(conj(w_n) - z_n) - z' . conj(w')`.
fn rho_by_hand(z: &HPoint, w: &HPoint) -> C64 {
    let mut s = C64::new(0.0, 0.5) * (w.zn().conj() - z.zn());
    for (a, b) in z.zp().iter().zip(w.zp()) {
        s -= a * b.conj();
    }
    s
}

fn beta_by_hand(z: &HPoint, w: &HPoint) -> f64 {
    let r = rho_by_hand(z, w);
    (1.0 - rho_by_hand(z, z).re * rho_by_hand(w, w).re / r.norm_sqr()).max(0.0).sqrt().atanh()
}

fn c1_identities() -> R<Outcome> {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + n as u64);
        for _ in 0..10_000 {
            let (z, u, v) = (random_point(&mut rng, n), random_point(&mut rng, n), random_point(&mut rng, n));
            let ruv = rho_by_hand(&u, &v);
            let rz = rho_by_hand(&z, &z).re;
            let mut e = crel(rho_pair(&sigma(&z, &u), &sigma(&z, &v))?, ruv / rz);
            e = e.max(crel(rho_pair(&sigma_inv(&z, &u), &sigma_inv(&z, &v))?, ruv * rz));
            let b = beta_by_hand(&u, &v);
            e = e.max(rel(bergman_metric(&sigma(&z, &u), &sigma(&z, &v))?, b));
            e = e.max(rel(ball_metric(&cayley_inv(&u)?, &cayley_inv(&v)?)?, b));
            let m = rho_by_hand(&u, &u).re.max(rho_by_hand(&v, &v).re);
            e = e.max((m - 2.0 * ruv.norm()).max(0.0) / m);
            let t = b.tanh();
            let ratio = rho_by_hand(&z, &u).norm() / rho_by_hand(&z, &v).norm();
            e = e.max(((1.0 - t) / (1.0 + t) - ratio).max(ratio - (1.0 + t) / (1.0 - t)).max(0.0) / ratio);
            e = e.max(crel(bergman_kernel(&z, &u)?, bergman_kernel(&u, &z)?.conj()));
            let direct = kernel_constant(n) / rho_by_hand(&z, &u).powi(n as i32 + 1);
            e = e.max(crel(bergman_kernel(&z, &u)?, direct));
            let base = sigma(&z, &z);
            for (a, b) in base.coords().iter().zip(HPoint::base(n).coords()) {
                e = e.max((a - b).norm());
            }
            let xi = random_ball(&mut rng, n, 0.95);
            let eta = random_ball(&mut rng, n, 0.95);
            let rt = cayley_inv(&cayley(&xi)?)?;
            let mm = mobius_ball(&eta, &mobius_ball(&eta, &xi)?)?;
            for (a, b) in xi.xi().iter().zip(rt.xi()).chain(xi.xi().iter().zip(mm.xi())) {
                e = e.max((a - b).norm());
            }
            worst = worst.max(e);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(worst <= 1e-10 && secs <= 10.0, format!("max relative error {worst:.2e} (tol 1e-10), {secs:.2} s (budget 10 s)"))
}

/// `|D(i, r)|` for n = 1: a Euclidean disc of radius 2t / (1 - t^2), t = tanh r.
fn disc_area(r: f64) -> f64 {
    let t = r.tanh();
    PI * (2.0 * t / (1.0 - t * t)).powi(2)
}

/// Monte Carlo `|D(i, r)|` for n = 2 with its standard error.
///
/// `w in D(i, r)` iff `Im w_2 - |w_1|^2 > (1 - t^2) |w_2 + i|^2 / 4`; this forces
/// `w_2` into the n = 1 disc and `|w_1|^2 < Im w_2`. Draw `w_2` uniformly in the disc
/// and `w_1` uniformly in the disc of radius `sqrt(Im w_2)`, weighting by `pi Im w_2`.
fn ball_volume_n2_mc(r: f64, samples: usize, seed: u64) -> (f64, f64) {
    let t = r.tanh();
    let radius = 2.0 * t / (1.0 - t * t);
    let centre = (1.0 + t * t) / (1.0 - t * t);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..samples {
        let (a, p): (f64, f64) = (rng.random::<f64>().sqrt() * radius, rng.random::<f64>() * 2.0 * PI);
        let w2 = C64::new(a * p.cos(), centre + a * p.sin());
        let (b, q): (f64, f64) = (rng.random::<f64>().sqrt() * w2.im.sqrt(), rng.random::<f64>() * 2.0 * PI);
        let w1 = C64::from_polar(b, q);
        let inside = w2.im - w1.norm_sqr() > (1.0 - t * t) * (w2 + C64::new(0.0, 1.0)).norm_sqr() / 4.0;
        let x = if inside { PI * w2.im } else { 0.0 };
        s += x;
        s2 += x * x;
    }
    let m = s / samples as f64;
    let area = PI * radius * radius;
    (area * m, area * ((s2 / samples as f64 - m * m) / samples as f64).sqrt())
}

fn c2_volume() -> R<Outcome> {
    let mut worst: f64 = 0.0;
    let mut oracle: f64 = 0.0;
    for n in 1..=2usize {
        let spec = QuadratureSpec::new(Scheme::QuasiRandom, 1_000_000, SEED, n)?;
        for (k, r) in [0.5, 1.0, 2.0].into_iter().enumerate() {
            let exact = if n == 1 {
                disc_area(r)
            } else {
                let (mc, se) = ball_volume_n2_mc(r, 1_000_000, SEED + k as u64);
                oracle = oracle.max((mc - ball_volume(&HPoint::base(2), r)).abs() / (4.0 * se));
                ball_volume(&HPoint::base(2), r)
            };
            if n == 1 {
                oracle = oracle.max(rel(ball_volume(&HPoint::base(1), r), exact) / 1e-12);
            }
            let z = HPoint::new(vec![C64::new(0.3, -0.2); n - 1], C64::new(1.5, 2.0));
            for (p, scale) in [(HPoint::base(n), 1.0), (z.clone(), rho(&z).powi(n as i32 + 1))] {
                let est = integrate_metric_ball(&p, r, |_| C64::new(1.0, 0.0), &spec.for_point(k))?;
                worst = worst.max((est.value.re - exact * scale).abs() / (3.0 * est.std_error));
            }
        }
    }
    outcome(
        worst <= 1.0 && oracle <= 1.0,
        format!("max |quad - exact| / (3 se) = {worst:.3}; closed form vs independent oracle {oracle:.3} (<= 1)"),
    )
}

fn c3_normalization() -> R<Outcome> {
    let one = sym("const");
    let (mut knorm, mut ber): (f64, f64) = (0.0, 0.0);
    for n in 1..=2 {
        let spec = QuadratureSpec::new(Scheme::QuasiRandom, 40_000, SEED, n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x33 ^ n as u64);
        for k in 0..20 {
            let z = cayley(&random_ball(&mut rng, n, 0.6))?;
            let s = spec.for_point(k);
            let est = integrate_halfspace(|w| C64::new(normalized_kernel(&z, w).map_or(f64::NAN, |v| v.norm_sqr()), 0.0), &s)?;
            knorm = knorm.max((est.value.re - 1.0).abs() / (3.0 * est.std_error));
            for kind in [Transport::Sigma, Transport::Tau] {
                let b = berezin_with(&one, &z, &s, kind)?;
                ber = ber.max((b.value.re - 1.0).abs() / (3.0 * b.std_error + 1e-12));
            }
        }
    }
    outcome(knorm <= 1.0 && ber <= 1.0, format!("||k_z||^2: max |dev| / (3 se) = {knorm:.3}; Berezin(1): {ber:.3}"))
}

fn c4_dilation() -> R<Outcome> {
    let f = make_symbol("rho-power", &params(&[("s", 1.0)]))?;
    let mut worst: f64 = 0.0;
    let mut tau: f64 = 0.0;
    for n in 1..=2 {
        let spec = QuadratureSpec::new(Scheme::QuasiRandom, 20_000, SEED, n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x44);
        let pts: Vec<HPoint> = (0..20).map(|_| random_point(&mut rng, n)).collect();
        for (kind, slot) in [(Transport::Sigma, &mut worst), (Transport::Tau, &mut tau)] {
            let ratios: Vec<f64> = pts
                .iter()
                .map(|z| berezin_with(&f, z, &spec, kind).map(|b| b.value.re / rho(z)))
                .collect::<Result<_, _>>()?;
            let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
            *slot = slot.max(ratios.iter().map(|r| (r - mean).abs() / mean).fold(0.0, f64::max));
        }
    }
    let mut base: f64 = 0.0;
    for (n, expected) in [(1usize, 1.0), (2, 0.5)] {
        let b = berezin(&f, &HPoint::base(n), &QuadratureSpec::new(Scheme::PolarProduct, 200_000, SEED, n)?)?;
        base = base.max(rel(b.value.re, expected));
    }
    note("tau-route spread", tau <= 5e-3, &format!("{tau:.2e} vs 5e-3"));
    note("Berezin(rho)(i) against 1 (n=1) and 1/2 (n=2), polar rule", base <= 2e-2, &format!("{base:.2e} vs 2e-2"));
    outcome(worst <= 5e-3, format!("max spread of Berezin(rho)/rho over 20 points, n in {{1,2}}: {worst:.2e} (tol 5e-3)"))
}

const MO_SIGMAS: f64 = 4.0;

fn c5_mo_routes() -> R<Outcome> {
    let (mut mo, mut mor): (f64, f64) = (0.0, 0.0);
    for n in 1..=2 {
        let spec = QuadratureSpec::new(Scheme::QuasiRandom, 20_000, SEED, n)?;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x55);
        let centers: Vec<HPoint> = (0..10).map(|_| random_point(&mut rng, n)).collect();
        for (i, id) in ["log-kernel", "beta-dist", "bump", "osc-bump", "recip-kernel"].iter().enumerate() {
            let f = sym(id);
            for (j, z) in centers.iter().enumerate() {
                let s = spec.for_point(10 * i + j);
                let r = mean_oscillation_routes(&f, z, &s)?;
                let (a, b) = (r.definition, r.centered);
                mo = mo.max((a.radicand - b.radicand).abs() / (a.std_error.hypot(b.std_error) + 1e-9));
                let r = mean_oscillation_r_routes(&f, z, 1.0, &s)?;
                let (a, b) = (r.moments, r.double_integral);
                mor = mor.max((a.radicand - b.radicand).abs() / (a.std_error.hypot(b.std_error) + 1e-9));
            }
        }
    }
    // 100 comparisons per route: 4 combined standard errors keeps the family-wise false alarm rate below 1%.
    outcome(
        mo <= MO_SIGMAS && mor <= MO_SIGMAS,
        format!("max |route difference| in combined se: MO {mo:.2}, MO_r {mor:.2} (tol {MO_SIGMAS})"),
    )
}

fn c6_forelli_rudin() -> R<Outcome> {
    let spec = QuadratureSpec::new(Scheme::PolarProduct, 200_000, SEED, 1)?;
    let mut spread: f64 = 0.0;
    for alpha in [0.0, 1.0] {
        let (t, s) = (0.0, 3.0);
        let vals: Vec<f64> = (-2..=2)
            .map(|k| {
                let z = dilation(2f64.powi(k), &HPoint::new(vec![], C64::new(0.7, 1.3)));
                forelli_rudin_integral(&z, t, s, alpha, &spec).map(|v| v.value.re * rho(&z).powf(s - t - 2.0))
            })
            .collect::<Result<_, _>>()?;
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        spread = spread.max(vals.iter().map(|v| (v - m).abs() / m).fold(0.0, f64::max));
    }
    // int_{Im w > 0} |rho(i, w)|^{-3} dA(w) = int 8 |w + i|^{-3} dA = 16.
    let v = forelli_rudin_integral(&HPoint::base(1), 0.0, 3.0, 0.0, &spec)?.value.re;
    outcome(
        spread <= 1e-2 && rel(v, 16.0) <= 1e-2,
        format!("orbit spread {spread:.2e} (tol 1e-2); value at i {v:.5} vs 16"),
    )
}

fn c7_gram() -> R<Outcome> {
    let polar = QuadratureSpec::new(Scheme::PolarProduct, 20_000, SEED, 1)?;
    let g = gram_matrix(1, 6, &polar)?;
    let idx = basis_indices(1, 6);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x77);
    let mut iso: f64 = 0.0;
    for _ in 0..10 {
        let c: Vec<C64> = idx.iter().map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        // ||xi^a||^2 over the unit disc is pi a! / (1 + a)!.
        let exact: f64 = idx
            .iter()
            .zip(&c)
            .map(|(i, c)| c.norm_sqr() * PI * factorial(i.alpha[0]) / factorial(1 + i.alpha[0]))
            .sum();
        let est = integrate_halfspace(
            |w| {
                let xi = cayley_inv(w).expect("interior point").xi()[0];
                let p: C64 = idx.iter().zip(&c).map(|(i, c)| c * xi.powu(i.alpha[0])).sum();
                let j = 0.5 * (C64::new(0.0, 2.0) / (w.zn() + C64::new(0.0, 1.0))).powu(2);
                C64::new((p * j).norm_sqr(), 0.0)
            },
            &polar,
        )?;
        iso = iso.max(rel(est.value.re.sqrt(), exact.sqrt()));
    }
    let bad = gram_matrix_with(1, 6, &polar, Multiplier::Modulus)?;
    note("fault injection |j| detected", !bad.certified(), &format!("reproducing deviation {:.2e}", bad.reproducing_deviation));
    outcome(
        g.deviation <= 1e-6 && iso <= 1e-6,
        format!("Gram deviation {:.2e} (tol 1e-6); isometry on 10 polynomials {iso:.2e} (tol 1e-6)", g.deviation),
    )
}

fn c8_zero_hankel() -> R<Outcome> {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for n in 1..=2 {
        let cap = default_degree_cap(n);
        let polar = QuadratureSpec::new(Scheme::PolarProduct, 20_000, SEED, n)?;
        for id in ["log-kernel", "recip-kernel"] {
            let f = sym(id);
            let h = truncated_hankel_norm(&f, n, cap, &polar)?.norm_estimate;
            let hb = truncated_hankel_norm(&f.conj(), n, cap, &polar)?.norm_estimate;
            let r = h / hb.max(1.0);
            worst = worst.max(r);
            parts.push(format!("n={n} {id} {r:.1e}"));
        }
    }
    outcome(worst <= 1e-3, format!("||H_f|| / max(||H_conj f||, 1): {} (tol 1e-3)", parts.join(", ")))
}

fn c9_reproducing() -> R<Outcome> {
    let polar = QuadratureSpec::new(Scheme::PolarProduct, 20_000, SEED, 1)?;
    let cap = default_degree_cap(1);
    let beta = sym("beta-dist");
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x99);
    let (mut res, mut inc): (f64, f64) = (0.0, 0.0);
    for _ in 0..5 {
        let z = cayley(&random_ball(&mut rng, 1, 0.5))?;
        let r1 = berezin_reproducing_residual(&beta, &z, cap, &polar)?;
        let r2 = berezin_reproducing_residual(&beta, &z, 2 * cap, &polar)?;
        res = res.max(r1);
        if r1 > 1e-12 {
            inc = inc.max(r2 / r1 - 1.0);
        }
    }
    outcome(res <= 1e-3 && inc <= 0.0, format!("max residual {res:.2e} (tol 1e-3); worst change on doubling {inc:+.2e} (must be <= 0)"))
}

fn c10_constant() -> R<Outcome> {
    let polar = QuadratureSpec::new(Scheme::PolarProduct, 20_000, SEED, 1)?;
    let cap = default_degree_cap(1);
    let c1 = empirical_constant(1, cap, &polar, GridPreset::RayLadder)?;
    let c2 = empirical_constant(1, 2 * cap, &polar.with_nodes(40_000), GridPreset::RayLadder)?;
    let d = rel(c2, c1);
    outcome(c1.is_finite() && d <= 0.2, format!("C = {c1:.4}, doubled C = {c2:.4}, relative change {d:.3} (tol 0.2)"))
}

/// `|grad~ f|^2 = 2 rho (4 rho |f_n|^2 + sum_j |f_j + 2i conj(z_j) f_n|^2)` from given partials.
fn gradient_by_hand(z: &HPoint, d: &[C64]) -> f64 {
    let r = rho_by_hand(z, z).re;
    let dn = *d.last().expect("n >= 1");
    let t: f64 = z.zp().iter().zip(d).map(|(zj, dj)| (dj + C64::new(0.0, 2.0) * zj.conj() * dn).norm_sqr()).sum();
    (2.0 * r * (4.0 * r * dn.norm_sqr() + t)).sqrt()
}

fn c11_bloch() -> R<Outcome> {
    let log = sym("log-kernel");
    let mut at_i: f64 = 0.0;
    let mut hand: f64 = 0.0;
    let (mut transfer, mut literal, mut fd): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let (mut lip, mut lip_lit, mut hand_ratio): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for n in 1..=3 {
        at_i = at_i.max((invariant_gradient(&log, &HPoint::base(n))? - SQRT_2).abs());
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x11 ^ n as u64);
        for id in ["log-kernel", "recip-kernel", "coord", "const"] {
            let f = sym(id);
            if f.min_dim() > n {
                continue;
            }
            for _ in 0..50 {
                let z = cayley(&random_ball(&mut rng, n, 0.9))?;
                let g = invariant_gradient(&f, &z)?;
                let ba = ball_invariant_gradient_analytic(&f, &cayley_inv(&z)?)?;
                let scale = g.max(1e-300);
                transfer = transfer.max((g - SQRT_2 * ba).abs() / scale);
                literal = literal.max((g - 2.0 * ba).abs() / scale);
                fd = fd.max((g - invariant_gradient_fd(&f, &z)?).abs() / scale);
                if id == "log-kernel" {
                    let mut d = vec![C64::new(0.0, 0.0); n];
                    d[n - 1] = 1.0 / (z.zn() + C64::new(0.0, 1.0));
                    hand = hand.max(rel(g, gradient_by_hand(&z, &d)));
                }
            }
        }
        if n <= 2 {
            for _ in 0..100 {
                let (z, w) = (random_point(&mut rng, n), random_point(&mut rng, n));
                let l = lipschitz_ratio(&log, &z, &w)?;
                lip = lip.max(l.ratio / (SQRT_2 * l.geodesic_sup));
                lip_lit = lip_lit.max(l.ratio / l.geodesic_sup);
                hand_ratio = hand_ratio.max(l.ratio);
            }
        }
    }
    note("transfer with the displayed factor 2", literal <= 1e-8, &format!("{literal:.2e} vs 1e-8"));
    note("Lipschitz bound with constant 1/2 as displayed", lip_lit <= 1.0 + 1e-6, &format!("worst ratio {lip_lit:.4} vs 1"));
    note("log-kernel ratio under the hand bound 2 sqrt 2", hand_ratio <= 2.0 * SQRT_2 * (1.0 + 1e-6), &format!("worst {hand_ratio:.4}; sqrt 2 form allows 4"));
    note("analytic channel against the written-out formula", hand <= 1e-10, &format!("{hand:.2e}"));
    outcome(
        at_i <= 1e-10 && transfer <= 1e-8 && lip <= 1.0 + 1e-6 && fd <= 1e-6,
        format!(
            "|grad~ log|(i) - sqrt 2 = {at_i:.1e}; transfer (factor sqrt 2) {transfer:.1e}; Lipschitz worst {lip:.4} (<= 1); fd {fd:.1e}"
        ),
    )
}

fn c12_decay() -> R<Outcome> {
    let mut worst: f64 = 0.0;
    for n in 1..=2 {
        let spec = QuadratureSpec::new(Scheme::QuasiRandom, 20_000, SEED, n)?;
        let grid = build_grid(GridPreset::RayLadder, n);
        let bump = sym("compact-bump");
        let supp = support_in_dim(bump.support().expect("compact support"), n);
        for which in [Seminorm::Bmo, Seminorm::Ba] {
            let scan = seminorm_scan(&bump, which, &grid, &spec)?;
            for p in &scan.decay_profile {
                let pts: Vec<&HPoint> = grid.iter().filter(|g| g.ray == p.ray).map(|g| &g.point).collect();
                let mut start = pts.len();
                for (k, z) in pts.iter().enumerate() {
                    if beta_by_hand(z, &supp.center) > supp.radius + DEFAULT_RADIUS {
                        start = k;
                        break;
                    }
                }
                for w in p.values[start..].windows(2) {
                    worst = worst.max((w[1] - w[0]) / w[0].max(1e-300));
                }
            }
        }
    }
    let spec = QuadratureSpec::new(Scheme::QuasiRandom, 20_000, SEED, 2)?;
    let up: Vec<GridPoint> = build_grid(GridPreset::RayLadder, 2).into_iter().filter(|g| g.ray == "dilation-up").collect();
    let scan = seminorm_scan(&sym("coord"), Seminorm::Bmo, &up, &spec)?;
    let growth = scan.values.last().copied().unwrap_or(0.0) / scan.values[0];
    let increasing = scan.values.windows(2).all(|w| w[1] > w[0]);
    outcome(
        worst <= 1e-6 && growth > 100.0 && increasing,
        format!("bump worst relative increase after exit {worst:.1e} (tol 1e-6); z_1 MO growth {growth:.3e} (> 100), increasing {increasing}"),
    )
}

fn verify_runtime() -> R<Outcome> {
    let start = Instant::now();
    let (_, ok) = run_verify(&RunConfig::new(1))?;
    let secs = start.elapsed().as_secs_f64();
    outcome(ok && secs <= 300.0, format!("default verify ok={ok} in {secs:.1} s (budget 300 s)"))
}

fn main() {
    let criteria: [(&str, fn() -> R<Outcome>); 13] = [
        ("1 exact identities", c1_identities),
        ("2 metric-ball volume", c2_volume),
        ("3 kernel and Berezin normalization", c3_normalization),
        ("4 Berezin dilation covariance", c4_dilation),
        ("5 mean-oscillation route equivalence", c5_mo_routes),
        ("6 Forelli-Rudin scaling", c6_forelli_rudin),
        ("7 Gram certification and isometry", c7_gram),
        ("8 zero Hankel law", c8_zero_hankel),
        ("9 reproducing residual", c9_reproducing),
        ("10 empirical constant stability", c10_constant),
        ("11 Bloch gradient", c11_bloch),
        ("12 decay diagnostics", c12_decay),
        ("runtime full verify", verify_runtime),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!pass);
        println!(
            "{} criterion {name}: {detail} [{:.1} s]",
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
