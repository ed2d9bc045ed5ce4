//! `(D, W)`-rapid sequences of closure parameters.

use crate::error::{capacity, input, Result};
use serde::{Deserialize, Serialize};

/// `ℓ(k, s) = (k + s)·B^s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllConfig {
    pub base: u64,
}

impl Default for EllConfig {
    fn default() -> Self {
        EllConfig { base: 4 }
    }
}

impl EllConfig {
    /// `None` on overflow.
    pub fn checked(&self, k: u64, s: u64) -> Option<u64> {
        let pow = u32::try_from(s).ok().and_then(|e| self.base.checked_pow(e))?;
        k.checked_add(s)?.checked_mul(pow)
    }

    pub fn saturating(&self, k: u64, s: u64) -> u64 {
        self.checked(k, s).unwrap_or(u64::MAX)
    }
}

/// `ℓ` with the default base.
pub fn ell(k: u64, s: u64) -> Result<u64> {
    EllConfig::default()
        .checked(k, s)
        .map_or_else(|| capacity(format!("ell({k}, {s}) overflows 64 bits")), Ok)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RapidSequence {
    pub d: u64,
    pub w: u64,
    /// `s_0 ≥ s_1 ≥ … ≥ s_D = 0`.
    pub s: Vec<u64>,
    /// Some entry was clamped at `u64::MAX`.
    pub saturated: bool,
}

impl RapidSequence {
    /// `s_{i−1} ≥ ℓ(W, s_i)` for every `i`, with saturated entries accepted.
    pub fn is_rapid(&self, cfg: &EllConfig) -> bool {
        self.s.last() == Some(&0)
            && self.s.len() as u64 == self.d + 1
            && self.s.windows(2).all(|p| p[0] >= cfg.saturating(self.w, p[1]))
    }
}

fn check(d: u64, w: u64) -> Result<()> {
    if d == 0 || w == 0 {
        return input("rapid sequences need D ≥ 1 and W ≥ 1");
    }
    Ok(())
}

/// `s_D = 0`, `s_{i−1} = ℓ(W, s_i)`; overflow is a capacity error.
pub fn rapid_sequence(d: u64, w: u64, cfg: &EllConfig) -> Result<RapidSequence> {
    check(d, w)?;
    let mut s = vec![0u64];
    for _ in 0..d {
        let next = *s.last().unwrap();
        match cfg.checked(w, next) {
            Some(v) => s.push(v),
            None => {
                return capacity(format!(
                    "rapid sequence for D={d}, W={w} overflows 64 bits after {} levels",
                    s.len() - 1
                ))
            }
        }
    }
    s.reverse();
    Ok(RapidSequence { d, w, s, saturated: false })
}

/// As [`rapid_sequence`] but clamping at `u64::MAX`. Closure searches are
/// bounded by the host size anyway, so a clamped level behaves as "unbounded".
pub fn rapid_sequence_saturating(d: u64, w: u64, cfg: &EllConfig) -> Result<RapidSequence> {
    check(d, w)?;
    let mut s = vec![0u64];
    let mut saturated = false;
    for _ in 0..d {
        let next = cfg.checked(w, *s.last().unwrap());
        saturated |= next.is_none();
        s.push(next.unwrap_or(u64::MAX));
    }
    s.reverse();
    Ok(RapidSequence { d, w, s, saturated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let cfg = EllConfig::default();
        assert_eq!(rapid_sequence(1, 3, &cfg).unwrap().s, vec![3, 0]);
        assert_eq!(rapid_sequence(2, 2, &cfg).unwrap().s, vec![64, 2, 0]);
        assert_eq!(ell(2, 2).unwrap(), 64);
        assert!(rapid_sequence(0, 2, &cfg).is_err());
        assert!(rapid_sequence(3, 2, &cfg).is_err());
        let sat = rapid_sequence_saturating(3, 2, &cfg).unwrap();
        assert!(sat.saturated && sat.s[0] == u64::MAX && sat.is_rapid(&cfg));
        assert!(rapid_sequence(2, 2, &cfg).unwrap().is_rapid(&cfg));
    }

    proptest! {
        #[test]
        fn ell_is_monotone(k in 0u64..50, s in 0u64..20, base in 2u64..6) {
            let cfg = EllConfig { base };
            let v = cfg.saturating(k, s);
            prop_assert!(v <= cfg.saturating(k + 1, s));
            prop_assert!(v <= cfg.saturating(k, s + 1));
        }
    }
}
