//! Reference eigenvalues for relative errors.
//!
//! Exact values are used where they exist: `c x²` has `E_n = √c (2n+1)` and
//! a quasi-exactly-solvable sextic has a closed-form ground state. Everything
//! else comes from a versioned cache of high-precision self-runs (op2 length,
//! both parities), each entry stored with the number of digits on which two
//! runs at different N agreed. A scaled monomial `c x^k` reuses the `x^k`
//! entries through `E → c^{2/(k+2)} E`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lengths::LengthRule;
use crate::potentials::Potential;
use crate::precision::{pow_ratio, round_to, to_decimal, BigReal, Precision};
use crate::solve::{solve, Problem};
use crate::spectrum::log10;

pub const CACHE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceEntry {
    pub potential: String,
    pub level: usize,
    /// Decimal string, truncated to `digits` significant digits.
    pub value: String,
    pub digits: u32,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCache {
    pub version: u32,
    pub entries: Vec<ReferenceEntry>,
}

impl ReferenceCache {
    pub fn parse(text: &str) -> Result<Self> {
        let cache: ReferenceCache = serde_json::from_str(text)?;
        if cache.version != CACHE_VERSION {
            return Err(Error::Parse(format!(
                "reference cache version {} (expected {CACHE_VERSION})",
                cache.version
            )));
        }
        Ok(cache)
    }

    pub fn get(&self, potential: &str, level: usize) -> Option<&ReferenceEntry> {
        self.entries
            .iter()
            .find(|e| e.potential == potential && e.level == level)
    }

    /// Replaces entries with the same (potential, level) and keeps a stable
    /// order.
    pub fn merge(&mut self, new: Vec<ReferenceEntry>) {
        let mut map: BTreeMap<(String, usize), ReferenceEntry> = self
            .entries
            .drain(..)
            .map(|e| ((e.potential.clone(), e.level), e))
            .collect();
        for e in new {
            map.insert((e.potential.clone(), e.level), e);
        }
        self.entries = map.into_values().collect();
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// The cache shipped with the crate.
pub fn builtin() -> &'static ReferenceCache {
    static CACHE: OnceLock<ReferenceCache> = OnceLock::new();
    CACHE.get_or_init(|| {
        ReferenceCache::parse(include_str!("../data/reference_spectra.json"))
            .expect("embedded reference cache is valid")
    })
}

/// Best available reference for global level `level`.
pub fn reference_value(pot: &Potential, level: usize, prec: Precision) -> Option<BigReal> {
    if pot.leading_exponent() == 2 {
        let c = prec.guarded().rational(pot.leading_coefficient()).sqrt();
        return Some(round_to(&(c * (2 * level as u64 + 1)), prec));
    }
    if level == 0 {
        if let Some(qes) = pot.qes_ground(prec) {
            return Some(qes.energy);
        }
    }
    let k = pot.leading_exponent();
    if pot.terms().len() == 1 && *pot.leading_coefficient() != 1 {
        // E(c x^k) = c^{2/(k+2)} E(x^k).
        let wp = prec.guarded();
        let base = reference_value(&Potential::monomial(k).ok()?, level, wp)?;
        let scale = pow_ratio(&wp.rational(pot.leading_coefficient()), 2, k as i64 + 2);
        return Some(round_to(&(base * scale), prec));
    }
    let entry = builtin().get(&pot.key(), level)?;
    prec.parse(&entry.value).ok()
}

/// Reference values for consecutive levels `0..count`, or `None` if any is
/// missing.
pub fn reference_levels(
    pot: &Potential,
    levels: &[usize],
    prec: Precision,
) -> Option<Vec<BigReal>> {
    levels
        .iter()
        .map(|&l| reference_value(pot, l, prec))
        .collect()
}

/// Computes cache entries for levels `0..count` of `pot` by two op2 runs at
/// `n` and `4n/5` functions per parity. Only digits on which both runs agree
/// are kept.
pub fn generate(
    pot: &Potential,
    count: usize,
    n: usize,
    prec: Precision,
) -> Result<Vec<ReferenceEntry>> {
    let coarse_n = n * 4 / 5;
    if coarse_n * 2 < count || count == 0 {
        return Err(Error::InvalidArgument(format!(
            "N={n} is too small for {count} reference levels"
        )));
    }
    let run = |n: usize| {
        let mut p = Problem::trig(pot.clone(), n, LengthRule::Op2, prec);
        p.with_reference = false;
        solve(&p)
    };
    let fine = run(n)?;
    let coarse = run(coarse_n)?;
    let max_digits = (prec.bits() as f64 * std::f64::consts::LOG10_2).floor() as u32 - 4;
    let mut out = Vec::with_capacity(count);
    for level in 0..count {
        let a = fine.level(level).expect("level in range");
        let b = coarse.level(level).expect("level in range");
        let diff = Float::with_val(prec.bits(), a - b).abs() / a;
        let digits = if diff.is_zero() {
            max_digits
        } else {
            ((-log10(&diff)).floor() as i64).clamp(1, max_digits as i64) as u32
        };
        out.push(ReferenceEntry {
            potential: pot.key(),
            level,
            value: truncate_digits(&to_decimal(a), digits as usize),
            digits,
            source: format!("trig op2 N={n} vs N={coarse_n}, {} bits", prec.bits()),
        });
    }
    Ok(out)
}

/// Keeps the first `digits` significant digits of a positive decimal string.
fn truncate_digits(s: &str, digits: usize) -> String {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    };
    let mut out = String::new();
    let mut seen = 0;
    let mut leading = true;
    for c in mantissa.chars() {
        if c.is_ascii_digit() {
            if leading && c == '0' {
                out.push(c);
                continue;
            }
            leading = false;
            if seen == digits {
                if out.contains('.') {
                    break;
                }
                out.push('0');
                continue;
            }
            seen += 1;
        }
        out.push(c);
    }
    if out.ends_with('.') {
        out.pop();
    }
    out + exponent
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(bits: u32) -> Precision {
        Precision::new(bits).unwrap()
    }

    #[test]
    fn builtin_cache_loads() {
        assert_eq!(builtin().version, CACHE_VERSION);
    }

    #[test]
    fn harmonic_references_are_exact() {
        let prec = p(128);
        let pot = Potential::monomial(2).unwrap();
        assert_eq!(reference_value(&pot, 3, prec).unwrap(), 7);
        let scaled = Potential::parse("[[2, 4]]").unwrap();
        assert_eq!(reference_value(&scaled, 1, prec).unwrap(), 6);
    }

    #[test]
    fn qes_ground_is_exact() {
        let pot = Potential::parse("[[2,-2],[4,2],[6,1]]").unwrap();
        assert_eq!(reference_value(&pot, 0, p(256)).unwrap(), 1);
    }

    #[test]
    fn scaled_monomials_reuse_the_cache() {
        let prec = p(256);
        let base = reference_value(&Potential::monomial(4).unwrap(), 2, prec).unwrap();
        let scaled = reference_value(&Potential::parse("[[4, 8]]").unwrap(), 2, prec).unwrap();
        // 8^{1/3} = 2
        let off = Float::with_val(256, scaled / base) - 2u32;
        assert!(off.abs() < 1e-70);
    }

    #[test]
    fn truncation_keeps_significant_digits() {
        assert_eq!(truncate_digits("1.0603620904", 5), "1.0603");
        assert_eq!(truncate_digits("0.00123456", 3), "0.00123");
        assert_eq!(truncate_digits("123456.75", 3), "123000");
        assert_eq!(truncate_digits("1.5e-3", 9), "1.5e-3");
    }

    #[test]
    fn merge_replaces_and_orders() {
        let entry = |pot: &str, level, value: &str| ReferenceEntry {
            potential: pot.into(),
            level,
            value: value.into(),
            digits: 3,
            source: "test".into(),
        };
        let mut cache = ReferenceCache {
            version: CACHE_VERSION,
            entries: vec![entry("x^6", 0, "1.14"), entry("x^4", 1, "3.79")],
        };
        cache.merge(vec![entry("x^4", 0, "1.06"), entry("x^6", 0, "1.15")]);
        let keys: Vec<_> = cache
            .entries
            .iter()
            .map(|e| (e.potential.as_str(), e.level))
            .collect();
        assert_eq!(keys, [("x^4", 0), ("x^4", 1), ("x^6", 0)]);
        assert_eq!(cache.get("x^6", 0).unwrap().value, "1.15");
        let back = ReferenceCache::parse(&cache.to_json().unwrap()).unwrap();
        assert_eq!(back, cache);
    }

    #[test]
    fn generated_entries_agree_with_cache() {
        let prec = p(128);
        let pot = Potential::monomial(4).unwrap();
        let fresh = generate(&pot, 2, 25, prec).unwrap();
        assert!(fresh[0].digits >= 20, "{fresh:?}");
        if let Some(cached) = reference_value(&pot, 0, p(256)) {
            let got = prec.parse(&fresh[0].value).unwrap();
            assert!(((got - &cached) / &cached).abs() < 1e-19);
        }
    }
}
