//! Asymptotic values `(c + o(1))·n^γ` and their arithmetic.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;

/// Exponents closer than this are treated as equal.
pub const GAMMA_TOL: f64 = 1e-9;

/// Either typically zero, or `(c + o(1))·n^γ` with `c > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Asym {
    Zero,
    Pow { c: f64, gamma: f64 },
}

impl Asym {
    /// `Pow(c, γ)`, or `Zero` when `c` is not positive.
    pub fn pow(c: f64, gamma: f64) -> Asym {
        if c > 0.0 {
            Asym::Pow { c, gamma }
        } else {
            Asym::Zero
        }
    }

    /// The asymptotic value of a constant.
    pub fn constant(x: f64) -> Asym {
        Asym::pow(x, 0.0)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Asym::Zero)
    }

    pub fn c(&self) -> Option<f64> {
        match *self {
            Asym::Zero => None,
            Asym::Pow { c, .. } => Some(c),
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match *self {
            Asym::Zero => None,
            Asym::Pow { gamma, .. } => Some(gamma),
        }
    }

    /// Leading-order sum: the larger exponent wins, equal exponents add coefficients.
    pub fn add(self, other: Asym) -> Asym {
        match (self, other) {
            (Asym::Zero, x) | (x, Asym::Zero) => x,
            (Asym::Pow { c: c1, gamma: g1 }, Asym::Pow { c: c2, gamma: g2 }) => {
                if (g1 - g2).abs() <= GAMMA_TOL {
                    Asym::Pow {
                        c: c1 + c2,
                        gamma: g1.max(g2),
                    }
                } else if g1 > g2 {
                    self
                } else {
                    other
                }
            }
        }
    }

    pub fn sum<I: IntoIterator<Item = Asym>>(items: I) -> Asym {
        items.into_iter().fold(Asym::Zero, Asym::add)
    }

    pub fn mul(self, other: Asym) -> Asym {
        match (self, other) {
            (Asym::Pow { c: c1, gamma: g1 }, Asym::Pow { c: c2, gamma: g2 }) => Asym::pow(c1 * c2, g1 + g2),
            _ => Asym::Zero,
        }
    }

    /// Multiplication by `n^d`.
    pub fn shift(self, d: f64) -> Asym {
        match self {
            Asym::Zero => Asym::Zero,
            Asym::Pow { c, gamma } => Asym::Pow { c, gamma: gamma + d },
        }
    }

    pub fn scale(self, a: f64) -> Asym {
        match self {
            Asym::Zero => Asym::Zero,
            Asym::Pow { c, gamma } => Asym::pow(a * c, gamma),
        }
    }

    /// Lexicographic order by `(γ, c)` with `Zero` below everything.
    /// Exponents within [`GAMMA_TOL`] compare by coefficient.
    pub fn cmp_lex(&self, other: &Asym) -> Ordering {
        match (self, other) {
            (Asym::Zero, Asym::Zero) => Ordering::Equal,
            (Asym::Zero, _) => Ordering::Less,
            (_, Asym::Zero) => Ordering::Greater,
            (Asym::Pow { c: c1, gamma: g1 }, Asym::Pow { c: c2, gamma: g2 }) => {
                if (g1 - g2).abs() <= GAMMA_TOL {
                    c1.partial_cmp(c2).unwrap_or(Ordering::Equal)
                } else {
                    g1.partial_cmp(g2).unwrap_or(Ordering::Equal)
                }
            }
        }
    }

    /// Leading-order maximum; at equal exponents, the larger coefficient.
    pub fn max(self, other: Asym) -> Asym {
        if self.cmp_lex(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Asym) -> Asym {
        if self.cmp_lex(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    /// `c·n^γ`, or 0.
    pub fn value_at(&self, n: f64) -> f64 {
        match *self {
            Asym::Zero => 0.0,
            Asym::Pow { c, gamma } => c * n.powf(gamma),
        }
    }

    /// Approximate equality with relative tolerance on `c` and absolute on `γ`.
    pub fn approx_eq(&self, other: &Asym, tol: f64) -> bool {
        match (self, other) {
            (Asym::Zero, Asym::Zero) => true,
            (Asym::Pow { c: c1, gamma: g1 }, Asym::Pow { c: c2, gamma: g2 }) => {
                (g1 - g2).abs() <= tol && (c1 - c2).abs() <= tol * c1.abs().max(c2.abs()).max(1e-300)
            }
            _ => false,
        }
    }
}

impl fmt::Display for Asym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Asym::Zero => write!(f, "Zero"),
            Asym::Pow { c, gamma } => write!(f, "({c}, {gamma})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sum_takes_leading_exponent() {
        let a = Asym::pow(2.0, 3.0).add(Asym::pow(7.0, 3.0));
        assert_eq!(a, Asym::pow(9.0, 3.0));
        assert_eq!(Asym::pow(5.0, 1.0).add(Asym::pow(1.0, 2.0)), Asym::pow(1.0, 2.0));
        assert_eq!(Asym::Zero.add(Asym::pow(1.0, 0.0)), Asym::pow(1.0, 0.0));
    }

    #[test]
    fn max_is_lexicographic() {
        assert_eq!(Asym::pow(5.0, 1.0).max(Asym::pow(1.0, 2.0)), Asym::pow(1.0, 2.0));
        assert_eq!(Asym::pow(5.0, 2.0).max(Asym::pow(1.0, 2.0)), Asym::pow(5.0, 2.0));
        assert_eq!(Asym::Zero.max(Asym::pow(1.0, -3.0)), Asym::pow(1.0, -3.0));
        assert_eq!(Asym::Zero.min(Asym::pow(1.0, -3.0)), Asym::Zero);
    }

    #[test]
    fn shift_and_product() {
        assert_eq!(Asym::pow(0.5, 1.0).shift(1.0), Asym::pow(0.5, 2.0));
        assert_eq!(Asym::pow(2.0, 1.0).mul(Asym::pow(3.0, 2.0)), Asym::pow(6.0, 3.0));
        assert_eq!(Asym::Zero.mul(Asym::pow(3.0, 2.0)), Asym::Zero);
    }

    #[test]
    fn serde_shape() {
        let s = serde_json::to_string(&Asym::pow(1.0, 0.9)).unwrap();
        assert_eq!(s, r#"{"kind":"pow","c":1.0,"gamma":0.9}"#);
        let z: Asym = serde_json::from_str(r#"{"kind":"zero"}"#).unwrap();
        assert!(z.is_zero());
    }
}
