use super::{Connective, Poly};
use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::sync::Arc;

type VariadicBuild = fn(usize) -> Connective;
type ParamBuild = fn(&str, usize) -> Result<Connective>;

#[derive(Clone)]
enum Family {
    Variadic { min_arity: usize, build: VariadicBuild, about: &'static str },
    Param { build: ParamBuild, syntax: &'static str, about: &'static str },
}

/// Name → connective lookup used by the parser.
///
/// Three shapes are supported: fixed connectives (`inv`), variadic families
/// whose arity follows the call site (`mul`, `add`, `vmax`, `vmin`), and
/// parametric families written with a bracket suffix (`scale[2]`).
#[derive(Clone, Default)]
pub struct Registry {
    fixed: BTreeMap<String, Arc<Connective>>,
    families: BTreeMap<String, Family>,
}

impl Registry {
    pub fn new() -> Registry {
        Registry::default()
    }

    /// The registry with every builtin installed.
    pub fn builtin() -> Registry {
        register_builtin_connectives(Registry::new())
    }

    /// Adds a fixed-arity connective, replacing any previous one of that name.
    pub fn insert(&mut self, c: Connective) {
        self.fixed.insert(c.name().to_string(), Arc::new(c));
    }

    pub fn get(&self, name: &str) -> Option<Arc<Connective>> {
        self.fixed.get(name).cloned()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.fixed.contains_key(name) || self.families.contains_key(name)
    }

    /// Resolves a call `name[params](arg1, …, argN)` with `nargs` arguments.
    pub fn resolve(&self, name: &str, params: Option<&str>, nargs: usize) -> Result<Arc<Connective>> {
        let c = match (params, self.families.get(name)) {
            (Some(p), Some(Family::Param { build, .. })) => Arc::new(build(p, nargs)?),
            (Some(_), _) => {
                return Err(Error::Input(format!("connective {name} takes no bracket parameters")))
            }
            (None, Some(Family::Variadic { min_arity, build, .. })) => {
                if nargs < *min_arity {
                    return Err(Error::Input(format!(
                        "{name} needs at least {min_arity} arguments, got {nargs}"
                    )));
                }
                Arc::new(build(nargs))
            }
            (None, Some(Family::Param { syntax, .. })) => {
                return Err(Error::Input(format!("{name} needs parameters: {syntax}")))
            }
            (None, None) => self
                .fixed
                .get(name)
                .cloned()
                .ok_or_else(|| Error::Input(format!("unknown connective {name:?}")))?,
        };
        if c.arity() != nargs {
            return Err(Error::Input(format!(
                "arity mismatch: {} expects {} arguments, got {nargs}",
                c.name(),
                c.arity()
            )));
        }
        Ok(c)
    }

    /// JSON catalogue: `{"connectives": {name: descriptor}, "families": {...}}`.
    pub fn catalog(&self) -> serde_json::Value {
        let fixed: serde_json::Map<String, serde_json::Value> = self
            .fixed
            .iter()
            .map(|(k, c)| (k.clone(), c.descriptor()))
            .collect();
        let families: serde_json::Map<String, serde_json::Value> = self
            .families
            .iter()
            .map(|(k, f)| {
                let d = match f {
                    Family::Variadic { min_arity, build, about } => {
                        let sample = build(*min_arity).descriptor();
                        serde_json::json!({
                            "shape": "variadic",
                            "min_arity": min_arity,
                            "rellip": sample["rellip"],
                            "asympoly": sample["asympoly"],
                            "about": about,
                        })
                    }
                    Family::Param { syntax, about, .. } => serde_json::json!({
                        "shape": "parametric",
                        "syntax": syntax,
                        "rellip": "certified",
                        "asympoly": true,
                        "about": about,
                    }),
                };
                (k.clone(), d)
            })
            .collect();
        serde_json::json!({ "connectives": fixed, "families": families })
    }
}

fn parse_reals(p: &str) -> Result<Vec<f64>> {
    p.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Input(format!("expected a number, found {:?}", t.trim())))
        })
        .collect()
}

fn one_real(p: &str) -> Result<f64> {
    match parse_reals(p)?.as_slice() {
        [a] => Ok(*a),
        _ => Err(Error::Input(format!("expected one number, found {p:?}"))),
    }
}

fn build_scale(p: &str, _: usize) -> Result<Connective> {
    Connective::scale(one_real(p)?)
}

fn build_pow(p: &str, _: usize) -> Result<Connective> {
    let b = one_real(p)?;
    if !b.is_finite() {
        return Err(Error::Input("pow exponent must be finite".into()));
    }
    Ok(Connective::pow(b))
}

fn build_mono(p: &str, _: usize) -> Result<Connective> {
    Connective::mono(parse_reals(p)?)
}

fn build_poly(p: &str, nargs: usize) -> Result<Connective> {
    Ok(Connective::poly(Poly::parse(p, nargs)?))
}

fn build_domdiff(p: &str, nargs: usize) -> Result<Connective> {
    let parts: Vec<&str> = p.split(';').collect();
    if parts.len() != 3 {
        return Err(Error::Input("domdiff syntax is domdiff[f; g; eps]".into()));
    }
    let f = Poly::parse(parts[0], nargs)?;
    let g = Poly::parse(parts[1], nargs)?;
    Connective::domdiff(f, g, one_real(parts[2])?)
}

/// Installs the builtin catalogue into `reg`.
pub fn register_builtin_connectives(mut reg: Registry) -> Registry {
    let variadic: [(&str, VariadicBuild, &str); 4] = [
        ("mul", Connective::mul, "product x1*...*xm"),
        ("add", Connective::add, "sum x1+...+xm"),
        ("vmax", Connective::vmax, "pointwise maximum"),
        ("vmin", Connective::vmin, "pointwise minimum"),
    ];
    for (name, build, about) in variadic {
        reg.families
            .insert(name.into(), Family::Variadic { min_arity: 1, build, about });
    }
    let param: [(&str, ParamBuild, &str, &str); 5] = [
        ("scale", build_scale, "scale[a]", "a*x for a > 0"),
        ("pow", build_pow, "pow[b]", "x^b, zero at zero"),
        ("mono", build_mono, "mono[a1,...,am]", "x1^a1*...*xm^am, zero when a used coordinate is zero"),
        ("poly", build_poly, "poly[2*x1^2 + x2]", "polynomial with nonnegative coefficients"),
        ("domdiff", build_domdiff, "domdiff[f; g; eps]", "f - g with f >= (1+eps) g checked on a sampled box"),
    ];
    for (name, build, syntax, about) in param {
        reg.families
            .insert(name.into(), Family::Param { build, syntax, about });
    }
    for c in [
        Connective::inv(),
        Connective::indz(),
        Connective::sigmoid(),
        Connective::log1p(),
        Connective::sinlog(),
    ] {
        reg.insert(c);
    }
    reg
}
