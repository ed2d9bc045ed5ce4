//! Polynomials with nonnegative coefficients and their bracket syntax,
//! e.g. `2*x1^2 + x2^2` or `x1*x2 + 3`.

use crate::asym::Asym;
use crate::error::{input, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coeff: f64,
    pub exps: Vec<u32>,
}

impl Monomial {
    fn support(&self) -> u32 {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.exps
            .iter()
            .zip(x)
            .fold(self.coeff, |acc, (&e, &xi)| if e == 0 { acc } else { acc * xi.powi(e as i32) })
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

/// A polynomial in `arity` variables with nonnegative coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    arity: usize,
    monomials: Vec<Monomial>,
}

impl Poly {
    /// Merges equal exponent vectors, drops zero coefficients and sorts
    /// monomials into a canonical order.
    pub fn new(arity: usize, monomials: Vec<Monomial>) -> Result<Poly> {
        let mut merged: Vec<Monomial> = Vec::new();
        for mut m in monomials {
            if !(m.coeff >= 0.0) || !m.coeff.is_finite() {
                return input(format!("polynomial coefficient {} is not a nonnegative real", m.coeff));
            }
            if m.exps.len() > arity {
                return input("monomial uses more variables than the polynomial arity");
            }
            m.exps.resize(arity, 0);
            if m.coeff == 0.0 {
                continue;
            }
            match merged.iter_mut().find(|o| o.exps == m.exps) {
                Some(o) => o.coeff += m.coeff,
                None => merged.push(m),
            }
        }
        merged.sort_by(|a, b| b.degree().cmp(&a.degree()).then_with(|| b.exps.cmp(&a.exps)));
        Ok(Poly {
            arity,
            monomials: merged,
        })
    }

    /// `x1 + … + xm`.
    pub fn linear_sum(m: usize) -> Poly {
        let monos = (0..m)
            .map(|i| {
                let mut exps = vec![0; m];
                exps[i] = 1;
                Monomial { coeff: 1.0, exps }
            })
            .collect();
        Poly::new(m, monos).expect("unit coefficients are valid")
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn degree(&self) -> u32 {
        self.monomials.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.monomials.iter().map(|m| m.eval(x)).sum()
    }

    /// Whether the specialisation on support `mask` is identically zero.
    pub fn spec_is_zero(&self, mask: u32) -> bool {
        !self.monomials.iter().any(|m| m.support() & !mask == 0)
    }

    /// Evaluates the specialisation on `mask` given the coordinates in `mask`.
    pub fn eval_on_support(&self, mask: u32, y: &[f64]) -> f64 {
        let full = expand(self.arity, mask, y);
        self.monomials
            .iter()
            .filter(|m| m.support() & !mask == 0)
            .map(|m| m.eval(&full))
            .sum()
    }

    /// Leading-order value on inputs `c_i n^{γ_i}`; `args` has one entry per
    /// coordinate, `None` for zero inputs.
    pub fn asym(&self, args: &[Option<(f64, f64)>]) -> Asym {
        let mut out = Asym::Zero;
        'mono: for m in &self.monomials {
            let mut c = m.coeff;
            let mut g = 0.0;
            for (i, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match args[i] {
                    None => continue 'mono,
                    Some((ci, gi)) => {
                        c *= ci.powi(e as i32);
                        g += e as f64 * gi;
                    }
                }
            }
            out = out.add(Asym::pow(c, g));
        }
        out
    }

    /// Parses the bracket syntax. Variables are `x1, x2, …`; the arity is the
    /// largest index used unless `min_arity` is larger.
    pub fn parse(text: &str, min_arity: usize) -> Result<Poly> {
        let mut monos = Vec::new();
        let mut arity = min_arity;
        for raw in text.split('+') {
            let term = raw.trim();
            if term.is_empty() {
                return input(format!("empty monomial in polynomial {text:?}"));
            }
            let mut coeff = 1.0;
            let mut exps: Vec<u32> = Vec::new();
            for factor in term.split('*').map(str::trim) {
                if let Some(var) = factor.strip_prefix('x') {
                    let (idx, pow) = match var.split_once('^') {
                        Some((i, p)) => (i.trim(), p.trim()),
                        None => (var.trim(), "1"),
                    };
                    let idx: usize = idx
                        .parse()
                        .map_err(|_| crate::Error::Input(format!("bad variable {factor:?}")))?;
                    let pow: u32 = pow
                        .parse()
                        .map_err(|_| crate::Error::Input(format!("bad exponent in {factor:?}")))?;
                    if idx == 0 {
                        return input("polynomial variables are numbered from x1");
                    }
                    if exps.len() < idx {
                        exps.resize(idx, 0);
                    }
                    exps[idx - 1] += pow;
                    arity = arity.max(idx);
                } else {
                    let v: f64 = factor
                        .parse()
                        .map_err(|_| crate::Error::Input(format!("bad coefficient {factor:?}")))?;
                    coeff *= v;
                }
            }
            monos.push(Monomial { coeff, exps });
        }
        Poly::new(arity, monos)
    }
}

/// Places the values `y` at the set bits of `mask`, zeros elsewhere.
pub(crate) fn expand(arity: usize, mask: u32, y: &[f64]) -> Vec<f64> {
    let mut full = vec![0.0; arity];
    let mut it = y.iter();
    for (i, slot) in full.iter_mut().enumerate() {
        if mask >> i & 1 == 1 {
            *slot = *it.next().expect("one value per support coordinate");
        }
    }
    full
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        for (k, m) in self.monomials.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            let factors: Vec<String> = m
                .exps
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
                .collect();
            if factors.is_empty() {
                write!(f, "{}", m.coeff)?;
            } else if m.coeff == 1.0 {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", m.coeff, factors.join("*"))?;
            }
        }
        Ok(())
    }
}
