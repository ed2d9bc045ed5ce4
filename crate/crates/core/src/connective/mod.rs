//! Connectives: nonnegative functions with specialisations, class
//! certificates and leading-order calculus.

pub mod poly;
mod registry;

pub use poly::{Monomial, Poly};
pub use registry::{register_builtin_connectives, Registry};

use crate::asym::{Asym, GAMMA_TOL};
use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

pub type PointFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
/// Leading-order evaluator for a user connective: receives the support mask
/// and one entry per coordinate (`None` for zero inputs).
pub type AsymFn = Arc<dyn Fn(u32, &[Option<(f64, f64)>]) -> Asym + Send + Sync>;

/// Largest arity for which specialisation tables are enumerated.
pub const MAX_TABULATED_ARITY: usize = 12;

/// Whether a connective belongs to the relative-Lipschitz class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    /// Built from one of the closure recipes.
    Certified,
    /// Promoted after the sampled check failed to refute it.
    Empirical,
    Unmarked,
}

/// A specialisation is either identically zero or positive on positives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spec {
    Zero,
    Positive,
}

#[derive(Clone)]
pub enum Kind {
    Poly(Poly),
    DomDiff { plus: Poly, minus: Poly, eps: f64 },
    /// `Π x_i^{α_i}`, zero whenever a coordinate with nonzero exponent is zero.
    Mono(Vec<f64>),
    VMax,
    VMin,
    IndZero,
    Sigmoid,
    Scale(f64),
    Log1p,
    SinLog,
    Custom {
        f: PointFn,
        zero_specs: Vec<u32>,
        asym: Option<AsymFn>,
        power_degree: f64,
    },
}

#[derive(Clone)]
pub struct Connective {
    name: String,
    arity: usize,
    kind: Kind,
    rellip: Membership,
    asympoly: bool,
    absorbing: Vec<bool>,
}

impl fmt::Debug for Connective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Connective({}/{})", self.name, self.arity)
    }
}

impl PartialEq for Connective {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.arity == other.arity
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[inline]
fn power(x: f64, a: f64) -> f64 {
    if a == 1.0 {
        x
    } else if a == -1.0 {
        1.0 / x
    } else if a.fract() == 0.0 && a.abs() <= 16.0 {
        x.powi(a as i32)
    } else {
        x.powf(a)
    }
}

impl Connective {
    fn build(name: String, arity: usize, kind: Kind, rellip: Membership, asympoly: bool) -> Connective {
        let mut c = Connective {
            name,
            arity,
            kind,
            rellip,
            asympoly,
            absorbing: Vec::new(),
        };
        c.absorbing = (0..arity).map(|i| c.compute_absorbing(i)).collect();
        c
    }

    pub fn poly(p: Poly) -> Connective {
        let name = format!("poly[{p}]");
        let arity = p.arity();
        Connective::build(name, arity, Kind::Poly(p), Membership::Certified, true)
    }

    /// The sum connective `x1 + … + xm`.
    pub fn add(m: usize) -> Connective {
        Connective::build("add".into(), m, Kind::Poly(Poly::linear_sum(m)), Membership::Certified, true)
    }

    /// `plus − minus`, accepted only if `plus ≥ (1+ε)·minus` holds on a sampled box.
    pub fn domdiff(plus: Poly, minus: Poly, eps: f64) -> Result<Connective> {
        if !(eps > 0.0) {
            return Err(Error::Input("domdiff needs ε > 0".into()));
        }
        let arity = plus.arity().max(minus.arity());
        let plus = Poly::new(arity, plus.monomials().to_vec())?;
        let minus = Poly::new(arity, minus.monomials().to_vec())?;
        check_dominance(&plus, &minus, eps)?;
        let name = format!("domdiff[{plus}; {minus}; {eps}]");
        Ok(Connective::build(
            name,
            arity,
            Kind::DomDiff { plus, minus, eps },
            Membership::Certified,
            true,
        ))
    }

    pub fn mono(exps: Vec<f64>) -> Result<Connective> {
        if exps.is_empty() || exps.iter().any(|a| !a.is_finite()) {
            return Err(Error::Input("mono needs at least one finite exponent".into()));
        }
        let list: Vec<String> = exps.iter().map(|a| a.to_string()).collect();
        let name = format!("mono[{}]", list.join(","));
        let arity = exps.len();
        Ok(Connective::build(name, arity, Kind::Mono(exps), Membership::Certified, true))
    }

    /// The product `x1·…·xm`.
    pub fn mul(m: usize) -> Connective {
        Connective::build("mul".into(), m, Kind::Mono(vec![1.0; m]), Membership::Certified, true)
    }

    /// `1/x` with `inv(0) = 0`.
    pub fn inv() -> Connective {
        Connective::build("inv".into(), 1, Kind::Mono(vec![-1.0]), Membership::Certified, true)
    }

    /// `x^b` with the value 0 at 0 for `b ≠ 0`.
    pub fn pow(b: f64) -> Connective {
        Connective::build(format!("pow[{b}]"), 1, Kind::Mono(vec![b]), Membership::Certified, true)
    }

    pub fn vmax(m: usize) -> Connective {
        Connective::build("vmax".into(), m, Kind::VMax, Membership::Certified, true)
    }

    pub fn vmin(m: usize) -> Connective {
        Connective::build("vmin".into(), m, Kind::VMin, Membership::Certified, true)
    }

    /// 1 at 0 and 0 on positives.
    pub fn indz() -> Connective {
        Connective::build("indz".into(), 1, Kind::IndZero, Membership::Certified, true)
    }

    pub fn sigmoid() -> Connective {
        Connective::build("sigmoid".into(), 1, Kind::Sigmoid, Membership::Certified, true)
    }

    pub fn scale(a: f64) -> Result<Connective> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Input(format!("scale factor {a} must be positive")));
        }
        Ok(Connective::build(format!("scale[{a}]"), 1, Kind::Scale(a), Membership::Certified, true))
    }

    /// `ln(1+x)`: relative Lipschitz, not asymptotically polynomial.
    pub fn log1p() -> Connective {
        Connective::build("log1p".into(), 1, Kind::Log1p, Membership::Certified, false)
    }

    /// `2 + sin(ln(2+x))`: relative Lipschitz and bounded, with no limit.
    pub fn sinlog() -> Connective {
        Connective::build("sinlog".into(), 1, Kind::SinLog, Membership::Certified, false)
    }

    /// A user-supplied function. It starts unmarked; specialisations listed in
    /// `zero_specs` (as support masks) are declared identically zero.
    pub fn custom(name: &str, arity: usize, f: PointFn, zero_specs: Vec<u32>) -> Connective {
        Connective::build(
            name.to_string(),
            arity,
            Kind::Custom {
                f,
                zero_specs,
                asym: None,
                power_degree: 1.0,
            },
            Membership::Unmarked,
            false,
        )
    }

    /// Attaches a leading-order evaluator to a user connective.
    pub fn with_asym(mut self, asym: AsymFn) -> Connective {
        if let Kind::Custom { asym: slot, .. } = &mut self.kind {
            *slot = Some(asym);
            self.asympoly = true;
        }
        self
    }

    /// Marks a user connective as relative Lipschitz after a passing check.
    pub fn promote(mut self, report: &crate::analysis::LipReport) -> Result<Connective> {
        if self.rellip == Membership::Certified {
            return Ok(self);
        }
        if !report.passed() {
            return Err(Error::Class(format!("{} failed the relative-Lipschitz check", self.name)));
        }
        self.rellip = Membership::Empirical;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn membership(&self) -> Membership {
        self.rellip
    }

    pub fn is_rellip(&self) -> bool {
        self.rellip != Membership::Unmarked
    }

    pub fn is_asympoly(&self) -> bool {
        self.asympoly
    }

    fn full_mask(&self) -> u32 {
        if self.arity >= 32 {
            u32::MAX
        } else {
            (1u32 << self.arity) - 1
        }
    }

    /// Pointwise value on nonnegative inputs.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.arity);
        match &self.kind {
            Kind::Poly(p) => p.eval(x),
            Kind::DomDiff { plus, minus, .. } => (plus.eval(x) - minus.eval(x)).max(0.0),
            Kind::Mono(exps) => {
                let mut acc = 1.0;
                for (&a, &xi) in exps.iter().zip(x) {
                    if a != 0.0 {
                        if xi == 0.0 {
                            return 0.0;
                        }
                        acc *= power(xi, a);
                    }
                }
                acc
            }
            Kind::VMax => x.iter().copied().fold(0.0, f64::max),
            Kind::VMin => x.iter().copied().fold(f64::INFINITY, f64::min),
            Kind::IndZero => {
                if x[0] == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::Sigmoid => sigmoid(x[0]),
            Kind::Scale(a) => a * x[0],
            Kind::Log1p => x[0].ln_1p(),
            Kind::SinLog => 2.0 + (2.0 + x[0]).ln().sin(),
            Kind::Custom { f, .. } => f(x),
        }
    }

    /// Whether the specialisation on support `mask` (nonempty) is identically zero.
    pub fn spec(&self, mask: u32) -> Spec {
        let full = self.full_mask();
        let zero = match &self.kind {
            Kind::Poly(p) => p.spec_is_zero(mask),
            Kind::DomDiff { plus, .. } => plus.spec_is_zero(mask),
            Kind::Mono(exps) => exps.iter().enumerate().any(|(i, &a)| a != 0.0 && mask >> i & 1 == 0),
            Kind::VMax => false,
            Kind::VMin => mask & full != full,
            Kind::IndZero => true,
            Kind::Sigmoid | Kind::Scale(_) | Kind::Log1p | Kind::SinLog => false,
            Kind::Custom { zero_specs, .. } => zero_specs.contains(&mask),
        };
        if zero {
            Spec::Zero
        } else {
            Spec::Positive
        }
    }

    /// The specialisation on `mask` evaluated at the coordinates `y` of the
    /// support (in increasing index order).
    pub fn eval_on_support(&self, mask: u32, y: &[f64]) -> f64 {
        if self.spec(mask) == Spec::Zero {
            return 0.0;
        }
        match &self.kind {
            Kind::Poly(p) => p.eval_on_support(mask, y),
            Kind::DomDiff { plus, minus, .. } => {
                (plus.eval_on_support(mask, y) - minus.eval_on_support(mask, y)).max(0.0)
            }
            Kind::Mono(exps) => {
                let support = (0..self.arity).filter(|i| mask >> i & 1 == 1);
                support.zip(y).fold(1.0, |acc, (i, &yi)| {
                    if exps[i] == 0.0 {
                        acc
                    } else {
                        acc * power(yi, exps[i])
                    }
                })
            }
            Kind::VMax => y.iter().copied().fold(0.0, f64::max),
            Kind::VMin => y.iter().copied().fold(f64::INFINITY, f64::min),
            _ => self.eval(&poly::expand(self.arity, mask, y)),
        }
    }

    /// Whether `f(x) = 0` whenever `x_i = 0`, whatever the other inputs.
    pub fn absorbs_zero(&self, i: usize) -> bool {
        self.absorbing.get(i).copied().unwrap_or(false)
    }

    fn compute_absorbing(&self, i: usize) -> bool {
        if self.arity > MAX_TABULATED_ARITY {
            return false;
        }
        if self.eval(&vec![0.0; self.arity]) != 0.0 {
            return false;
        }
        let full = self.full_mask();
        (1..=full)
            .filter(|m| m >> i & 1 == 0)
            .all(|m| self.spec(m) == Spec::Zero)
    }

    /// Degree of a power function bounding the connective, used for the
    /// engines' exponent bookkeeping.
    pub fn power_degree(&self) -> f64 {
        match &self.kind {
            Kind::Poly(p) => p.degree() as f64,
            Kind::DomDiff { plus, .. } => plus.degree() as f64,
            Kind::Mono(exps) => exps.iter().map(|a| a.abs()).sum(),
            Kind::VMax | Kind::VMin | Kind::Scale(_) | Kind::Log1p => 1.0,
            Kind::IndZero | Kind::Sigmoid | Kind::SinLog => 0.0,
            Kind::Custom { power_degree, .. } => *power_degree,
        }
    }

    /// Leading-order value of `f` on inputs with the given asymptotics.
    pub fn asym_apply(&self, args: &[Asym]) -> Result<Asym> {
        if !self.asympoly {
            return Err(Error::Capability(format!(
                "connective {} has no asymptotic evaluator",
                self.name
            )));
        }
        if args.len() != self.arity {
            return Err(Error::Input(format!(
                "{} expects {} arguments, got {}",
                self.name,
                self.arity,
                args.len()
            )));
        }
        let pairs: Vec<Option<(f64, f64)>> = args
            .iter()
            .map(|a| match *a {
                Asym::Zero => None,
                Asym::Pow { c, gamma } => Some((c, gamma)),
            })
            .collect();
        let mask = pairs
            .iter()
            .enumerate()
            .filter(|(_, p)| p.is_some())
            .fold(0u32, |m, (i, _)| m | 1 << i);
        if mask == 0 {
            return Ok(Asym::constant(self.eval(&vec![0.0; self.arity])));
        }
        if self.spec(mask) == Spec::Zero {
            return Ok(Asym::Zero);
        }
        let present = || pairs.iter().flatten().map(|&(c, g)| Asym::pow(c, g));
        Ok(match &self.kind {
            Kind::Poly(p) => p.asym(&pairs),
            Kind::DomDiff { plus, minus, .. } => {
                let a = plus.asym(&pairs);
                let b = minus.asym(&pairs);
                match (a, b) {
                    (Asym::Pow { c: ca, gamma: ga }, Asym::Pow { c: cb, gamma: gb })
                        if (ga - gb).abs() <= GAMMA_TOL =>
                    {
                        Asym::pow(ca - cb, ga)
                    }
                    _ => a,
                }
            }
            Kind::Mono(exps) => {
                let mut c = 1.0;
                let mut g = 0.0;
                for (i, p) in pairs.iter().enumerate() {
                    if let Some((ci, gi)) = p {
                        c *= power(*ci, exps[i]);
                        g += exps[i] * gi;
                    }
                }
                Asym::pow(c, g)
            }
            Kind::VMax => present().fold(Asym::Zero, Asym::max),
            Kind::VMin => present().reduce(Asym::min).unwrap_or(Asym::Zero),
            Kind::IndZero => Asym::Zero,
            Kind::Sigmoid => {
                let (c, g) = pairs[0].expect("support is {1}");
                if g > GAMMA_TOL {
                    Asym::pow(1.0, 0.0)
                } else if g < -GAMMA_TOL {
                    Asym::pow(0.5, 0.0)
                } else {
                    Asym::pow(sigmoid(c), 0.0)
                }
            }
            Kind::Scale(a) => present().next().unwrap_or(Asym::Zero).scale(*a),
            Kind::Log1p | Kind::SinLog => unreachable!("not asymptotically polynomial"),
            Kind::Custom { asym, .. } => match asym {
                Some(f) => f(mask, &pairs),
                None => unreachable!("asympoly implies an evaluator"),
            },
        })
    }

    /// JSON descriptor for the registry catalogue.
    pub fn descriptor(&self) -> serde_json::Value {
        let kind = match &self.kind {
            Kind::Poly(_) => "poly",
            Kind::DomDiff { .. } => "domdiff",
            Kind::Mono(_) => "mono",
            Kind::VMax => "vmax",
            Kind::VMin => "vmin",
            Kind::IndZero => "indz",
            Kind::Sigmoid => "sigmoid",
            Kind::Scale(_) => "scale",
            Kind::Log1p => "log1p",
            Kind::SinLog => "sinlog",
            Kind::Custom { .. } => "custom",
        };
        serde_json::json!({
            "name": self.name,
            "arity": self.arity,
            "kind": kind,
            "rellip": self.rellip,
            "asympoly": self.asympoly,
        })
    }
}

/// Rejects `(plus, minus, ε)` unless `plus ≥ (1+ε)·minus` on sampled points of
/// `(1e-3, 1e3)^m`, including points with zeroed coordinates.
fn check_dominance(plus: &Poly, minus: &Poly, eps: f64) -> Result<()> {
    use rand::{Rng, SeedableRng};
    let m = plus.arity();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_d0d0);
    let mut x = vec![0.0; m];
    for _ in 0..20_000 {
        for xi in x.iter_mut() {
            *xi = if rng.gen_bool(0.2) {
                0.0
            } else {
                10f64.powf(rng.gen_range(-3.0..3.0))
            };
        }
        let (a, b) = (plus.eval(&x), minus.eval(&x));
        if a < (1.0 + eps) * b * (1.0 - 1e-12) {
            return Err(Error::Input(format!(
                "domdiff dominance fails at {x:?}: {a} < (1+{eps})·{b}"
            )));
        }
    }
    Ok(())
}
