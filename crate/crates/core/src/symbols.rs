//! Corpus of symbol functions on `U`.
//!
//! A [`Symbol`] is an immutable, shareable closure with metadata: the claims
//! it is expected to satisfy and, for compactly supported members, the
//! Bergman ball outside which it vanishes. Corpus members are built by id
//! through [`make_symbol`]; the prefix `conj:` conjugates any member.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{bergman_metric, cayley_inv_unchecked, HPoint, C64, I};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Claim {
    Bounded,
    Holomorphic,
    ConjugateHolomorphic,
    ExpectBO,
    ExpectBA,
    ExpectVO,
    ExpectVA,
    ExpectBloch,
    ExpectLittleBloch,
}

impl Claim {
    pub fn name(self) -> &'static str {
        match self {
            Claim::Bounded => "Bounded",
            Claim::Holomorphic => "Holomorphic",
            Claim::ConjugateHolomorphic => "ConjugateHolomorphic",
            Claim::ExpectBO => "ExpectBO",
            Claim::ExpectBA => "ExpectBA",
            Claim::ExpectVO => "ExpectVO",
            Claim::ExpectVA => "ExpectVA",
            Claim::ExpectBloch => "ExpectBloch",
            Claim::ExpectLittleBloch => "ExpectLittleBloch",
        }
    }
}

pub type EvalFn = Arc<dyn Fn(&HPoint) -> C64 + Send + Sync>;
pub type GradFn = Arc<dyn Fn(&HPoint) -> Vec<C64> + Send + Sync>;
pub type Params = BTreeMap<String, f64>;

/// Builds a parameter map from `(name, value)` pairs.
pub fn params(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Bergman ball `D(center, radius)` outside which a symbol vanishes.
#[derive(Clone, Debug, PartialEq)]
pub struct Support {
    pub center: HPoint,
    pub radius: f64,
}

#[derive(Clone)]
pub struct Symbol {
    id: String,
    params: Params,
    eval: EvalFn,
    grad: Option<GradFn>,
    claims: BTreeSet<Claim>,
    support: Option<Support>,
    min_dim: usize,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Symbol")
            .field("id", &self.id)
            .field("params", &self.params)
            .field("claims", &self.claims)
            .field("support", &self.support)
            .finish()
    }
}

impl Symbol {
    pub fn from_fn<F>(id: impl Into<String>, claims: &[Claim], f: F) -> Self
    where
        F: Fn(&HPoint) -> C64 + Send + Sync + 'static,
    {
        Self {
            id: id.into(),
            params: Params::new(),
            eval: Arc::new(f),
            grad: None,
            claims: claims.iter().copied().collect(),
            support: None,
            min_dim: 1,
        }
    }

    pub fn with_gradient<G>(mut self, g: G) -> Self
    where
        G: Fn(&HPoint) -> Vec<C64> + Send + Sync + 'static,
    {
        self.grad = Some(Arc::new(g));
        self
    }

    /// Adds claims the caller knows to hold (e.g. holomorphy of a composition).
    pub fn with_claims(mut self, claims: &[Claim]) -> Self {
        self.claims.extend(claims.iter().copied());
        self
    }

    pub fn with_support(mut self, center: HPoint, radius: f64) -> Self {
        self.support = Some(Support { center, radius });
        self
    }

    fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    /// Members expected in BMO: bounded, or claimed in one of BO, BA, VO, VA.
    pub fn expect_bmo(&self) -> bool {
        [Claim::Bounded, Claim::ExpectBO, Claim::ExpectBA, Claim::ExpectVO, Claim::ExpectVA]
            .iter()
            .any(|c| self.claims.contains(c))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn claims(&self) -> &BTreeSet<Claim> {
        &self.claims
    }

    pub fn has(&self, claim: Claim) -> bool {
        self.claims.contains(&claim)
    }

    pub fn support(&self) -> Option<&Support> {
        self.support.as_ref()
    }

    pub fn min_dim(&self) -> usize {
        self.min_dim
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.grad.is_some()
    }

    /// Raw evaluation, no domain checks. Used inside quadrature loops.
    #[inline]
    pub fn value(&self, z: &HPoint) -> C64 {
        (self.eval)(z)
    }

    /// Pointwise complex conjugate; swaps the holomorphy claims.
    pub fn conj(&self) -> Self {
        let inner = self.eval.clone();
        let claims = self
            .claims
            .iter()
            .map(|c| match c {
                Claim::Holomorphic => Claim::ConjugateHolomorphic,
                Claim::ConjugateHolomorphic => Claim::Holomorphic,
                other => *other,
            })
            .collect();
        let id = match self.id.strip_prefix("conj:") {
            Some(rest) => rest.to_string(),
            None => format!("conj:{}", self.id),
        };
        Self {
            id,
            params: self.params.clone(),
            eval: Arc::new(move |z| inner(z).conj()),
            grad: None,
            claims,
            support: self.support.clone(),
            min_dim: self.min_dim,
        }
    }

    /// `self - other`, with no claims.
    pub fn minus(&self, other: &Symbol, id: impl Into<String>) -> Self {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let mut s = Symbol::from_fn(id, &[], move |z| a(z) - b(z));
        s.min_dim = self.min_dim.max(other.min_dim);
        s
    }

    /// `|self|^2` as a symbol (keeps the support).
    pub fn abs_sqr(&self) -> Self {
        let a = self.eval.clone();
        let mut s = Symbol::from_fn(format!("|{}|^2", self.id), &[], move |z| {
            C64::new(a(z).norm_sqr(), 0.0)
        });
        s.support = self.support.clone();
        s.min_dim = self.min_dim;
        s
    }

    /// `f o T` for a map `T` of `U`.
    pub fn compose<T>(&self, id: impl Into<String>, t: T) -> Self
    where
        T: Fn(&HPoint) -> HPoint + Send + Sync + 'static,
    {
        let a = self.eval.clone();
        let mut s = Symbol::from_fn(id, &[], move |z| a(&t(z)));
        s.min_dim = self.min_dim;
        s
    }
}

/// Ids accepted by [`make_symbol`] (each may also be prefixed with `conj:`).
pub const CORPUS_IDS: [&str; 9] = [
    "const",
    "coord",
    "log-kernel",
    "conj-log-kernel",
    "beta-dist",
    "rho-power",
    "bump",
    "osc-bump",
    "recip-kernel",
];

fn take(
    id: &str,
    given: &Params,
    allowed: &[(&str, f64)],
) -> Result<Params> {
    for k in given.keys() {
        if !allowed.iter().any(|(a, _)| a == k) {
            return Err(Error::InvalidParameter(format!("`{id}` has no parameter `{k}`")));
        }
    }
    Ok(allowed
        .iter()
        .map(|(k, d)| (k.to_string(), *given.get(*k).unwrap_or(d)))
        .collect())
}

fn log_kernel() -> Symbol {
    Symbol::from_fn(
        "log-kernel",
        &[Claim::Holomorphic, Claim::ExpectBloch, Claim::ExpectBO],
        |z| (z.zn() + I).ln(),
    )
    .with_gradient(|z| {
        let mut g = vec![C64::new(0.0, 0.0); z.dim()];
        g[z.dim() - 1] = (z.zn() + I).inv();
        g
    })
}

/// `exp(1 - 1/(1 - x^2))` for `x < 1`, else 0.
fn bump_profile(x: f64) -> f64 {
    if x < 1.0 {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

fn bump(radius: f64) -> Symbol {
    let t = radius.tanh();
    Symbol::from_fn(
        "bump",
        &[Claim::Bounded, Claim::ExpectBO, Claim::ExpectBA, Claim::ExpectVO, Claim::ExpectVA],
        move |z| {
            let xi = cayley_inv_unchecked(z);
            let r = xi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            C64::new(bump_profile(r / t), 0.0)
        },
    )
}

/// Builds corpus member `id` (`compact-bump` is accepted for `bump`).
/// Unknown parameter names are rejected; missing ones take their defaults.
pub fn make_symbol(id: &str, given: &Params) -> Result<Symbol> {
    if let Some(inner) = id.strip_prefix("conj:") {
        return Ok(make_symbol(inner, given)?.conj());
    }
    let sym = match id {
        "const" => {
            let p = take(id, given, &[("c", 1.0)])?;
            let c = p["c"];
            Symbol::from_fn(
                id,
                &[Claim::Bounded, Claim::Holomorphic, Claim::ExpectVO, Claim::ExpectBloch, Claim::ExpectLittleBloch],
                move |_| C64::new(c, 0.0),
            )
            .with_gradient(|z| vec![C64::new(0.0, 0.0); z.dim()])
            .with_params(p)
        }
        "coord" => {
            let p = take(id, given, &[("k", 1.0)])?;
            let kf = p["k"];
            if kf < 1.0 || kf.fract() != 0.0 {
                return Err(Error::InvalidParameter(format!("coord index k must be a positive integer, got {kf}")));
            }
            let k = kf as usize - 1;
            let mut s = Symbol::from_fn(id, &[Claim::Holomorphic], move |z| z.coord(k))
                .with_gradient(move |z| {
                    let mut g = vec![C64::new(0.0, 0.0); z.dim()];
                    g[k] = C64::new(1.0, 0.0);
                    g
                })
                .with_params(p);
            s.min_dim = k + 1;
            s
        }
        "log-kernel" => {
            take(id, given, &[])?;
            log_kernel()
        }
        "conj-log-kernel" => {
            take(id, given, &[])?;
            let mut s = log_kernel().conj();
            s.id = id.into();
            s
        }
        "beta-dist" => {
            take(id, given, &[])?;
            Symbol::from_fn(id, &[Claim::ExpectBO], |z| {
                C64::new(bergman_metric(z, &HPoint::base(z.dim())).unwrap_or(f64::NAN), 0.0)
            })
        }
        "rho-power" => {
            let p = take(id, given, &[("s", 0.5)])?;
            let s = p["s"];
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::InvalidParameter(format!("rho-power exponent must be positive, got {s}")));
            }
            Symbol::from_fn(id, &[], move |z| C64::new(crate::geometry::rho(z).powf(s), 0.0)).with_params(p)
        }
        "bump" | "compact-bump" => {
            let p = take(id, given, &[("radius", 1.0)])?;
            let radius = positive(id, "radius", p["radius"])?;
            let center = HPoint::base(1);
            let mut s = bump(radius).with_params(p);
            s.support = Some(Support { center, radius });
            s
        }
        "osc-bump" => {
            let p = take(id, given, &[("omega", 8.0), ("radius", 1.0)])?;
            let radius = positive(id, "radius", p["radius"])?;
            let omega = p["omega"];
            let b = bump(radius);
            let mut s = Symbol::from_fn(id, b.claims.iter().copied().collect::<Vec<_>>().as_slice(), move |z| {
                b.value(z) * (omega * z.zn().re).sin()
            })
            .with_params(p);
            s.support = Some(Support { center: HPoint::base(1), radius });
            s
        }
        "recip-kernel" => {
            take(id, given, &[])?;
            Symbol::from_fn(
                id,
                &[Claim::Bounded, Claim::Holomorphic, Claim::ExpectBloch, Claim::ExpectLittleBloch],
                |z| (z.zn() + I).inv(),
            )
            .with_gradient(|z| {
                let mut g = vec![C64::new(0.0, 0.0); z.dim()];
                let d = (z.zn() + I).inv();
                g[z.dim() - 1] = -d * d;
                g
            })
        }
        other => return Err(Error::UnknownSymbol(other.into())),
    };
    Ok(sym)
}

fn positive(id: &str, name: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("`{id}` parameter `{name}` must be positive, got {v}")))
    }
}

/// Supports are stored for the base point in dimension 1; this re-centers
/// them in dimension `n`.
pub fn support_in_dim(s: &Support, n: usize) -> Support {
    if s.center.dim() == n {
        s.clone()
    } else {
        Support { center: HPoint::base(n), radius: s.radius }
    }
}

fn check_domain(f: &Symbol, z: &HPoint) -> Result<()> {
    z.check_interior()?;
    if z.dim() < f.min_dim {
        return Err(Error::Domain(format!(
            "symbol `{}` needs dimension at least {}, got {}",
            f.id,
            f.min_dim,
            z.dim()
        )));
    }
    Ok(())
}

/// Checked evaluation at an interior point.
pub fn eval_symbol(f: &Symbol, z: &HPoint) -> Result<C64> {
    check_domain(f, z)?;
    let v = f.value(z);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Domain(format!("symbol `{}` is not finite at {z}", f.id)))
    }
}

/// Step used by the finite-difference channel at `z`.
pub fn fd_step(z: &HPoint) -> f64 {
    1e-5 * z.norm().max(1.0)
}

/// Holomorphic partials by central differences along the real axis of each coordinate.
pub fn fd_gradient(f: &Symbol, z: &HPoint) -> Result<Vec<C64>> {
    check_domain(f, z)?;
    let h = fd_step(z);
    let coords = z.coords();
    let mut g = Vec::with_capacity(coords.len());
    for k in 0..coords.len() {
        let mut plus = coords.clone();
        let mut minus = coords.clone();
        plus[k] += h;
        minus[k] -= h;
        let fp = f.value(&HPoint::from_coords(&plus));
        let fm = f.value(&HPoint::from_coords(&minus));
        g.push((fp - fm) / (2.0 * h));
    }
    Ok(g)
}

/// Holomorphic partials `(df/dz_1, ..., df/dz_n)`: analytic channel when
/// present, else finite differences.
pub fn eval_symbol_gradient(f: &Symbol, z: &HPoint) -> Result<Vec<C64>> {
    if !f.has(Claim::Holomorphic) {
        return Err(Error::NotHolomorphic(f.id.clone()));
    }
    check_domain(f, z)?;
    match &f.grad {
        Some(g) => Ok(g(z)),
        None => fd_gradient(f, z),
    }
}

/// Stable text listing of the corpus (ids, default parameters, claims).
pub fn corpus_manifest() -> String {
    let mut out = String::new();
    for id in CORPUS_IDS {
        let s = make_symbol(id, &Params::new()).expect("corpus member builds");
        let claims: Vec<&str> = s.claims.iter().map(|c| c.name()).collect();
        let ps: Vec<String> = s.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        out.push_str(&format!("{id}\t{}\t{}\n", ps.join(","), claims.join(",")));
    }
    out
}
