//! Box half-width selection for the trigonometric basis.
//!
//! Every closed-form rule has the shape
//!
//! ```text
//! V(L) = L^k = α(k) N² π² / L²   =>   L = (π² α)^{1/(k+2)} N^{2/(k+2)}
//! ```
//!
//! and differs only in the coefficient α(k):
//!
//! | rule        | α(k)                                   |
//! |-------------|----------------------------------------|
//! | Schwartz    | `[(k/2) sin(π/k)]^{2k/(k+2)}`           |
//! | Op          | `(π/2)^{(k-2)/2}`                       |
//! | Op1         | `(π/2)^{2(k-2)/k}`                      |
//! | Op2         | `(π/2 + π³/(12k²))^{2(k-2)/k}`          |
//! | TraceAsym   | `2(k+1)/(3k)`                           |
//!
//! The exact trace rule solves `d Tr_N H / dL = 0` in closed form and the
//! scan rule minimizes an objective numerically; both report the α implied
//! by the resulting L.

use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::eigen::{jacobi_eigen, JacobiOptions};
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::potentials::Potential;
use crate::precision::{pow_ratio, round_to, BigReal, Precision};
use crate::trigbasis::{self, Parity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LengthRule {
    Schwartz,
    Op,
    Op1,
    Op2,
    #[serde(rename = "trace")]
    TraceExact,
    #[serde(rename = "trace-asym")]
    TraceAsymptotic,
    Scan,
}

impl LengthRule {
    pub const CLOSED_FORM: [LengthRule; 6] = [
        LengthRule::Schwartz,
        LengthRule::Op,
        LengthRule::Op1,
        LengthRule::Op2,
        LengthRule::TraceExact,
        LengthRule::TraceAsymptotic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LengthRule::Schwartz => "schwartz",
            LengthRule::Op => "op",
            LengthRule::Op1 => "op1",
            LengthRule::Op2 => "op2",
            LengthRule::TraceExact => "trace",
            LengthRule::TraceAsymptotic => "trace-asym",
            LengthRule::Scan => "scan",
        }
    }
}

impl fmt::Display for LengthRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LengthRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "schwartz" | "s" => LengthRule::Schwartz,
            "op" => LengthRule::Op,
            "op1" => LengthRule::Op1,
            "op2" => LengthRule::Op2,
            "trace" | "trace-exact" | "t" => LengthRule::TraceExact,
            "trace-asym" | "trace-asymptotic" => LengthRule::TraceAsymptotic,
            "scan" => LengthRule::Scan,
            other => {
                return Err(Error::Parse(format!(
                    "unknown length rule `{other}` (expected schwartz|op|op1|op2|trace|trace-asym|scan)"
                )))
            }
        })
    }
}

#[derive(Clone, Debug)]
pub struct LengthResult {
    /// Box half-width L.
    pub length: BigReal,
    /// Proportionality coefficient α(k) with `V(L) = α N²π²/L²`.
    pub alpha: BigReal,
    pub rule: LengthRule,
    pub n: usize,
    pub k: u32,
}

fn check_kn(k: u32, n: usize) -> Result<()> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "exponent k must be an even integer >= 2, got {k}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be >= 1".into()));
    }
    Ok(())
}

/// `(π² α)^{1/(k+2)} N^{2/(k+2)}`
pub fn length_from_alpha(alpha: &BigReal, k: u32, n: usize) -> BigReal {
    let bits = alpha.prec();
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let base = Float::with_val(bits, pi.square_ref()) * alpha;
    let kk = k as i64 + 2;
    pow_ratio(&base, 1, kk) * pow_ratio(&Float::with_val(bits, n as u64), 2, kk)
}

/// `L^{k+2} / (π² N²)`
pub fn alpha_from_length(length: &BigReal, k: u32, n: usize) -> BigReal {
    let bits = length.prec();
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let nn = Float::with_val(bits, n as u64).square();
    Float::with_val(bits, length.pow(k + 2)) / (Float::with_val(bits, pi.square_ref()) * nn)
}

/// Closed-form α(k) for the rules that have one.
pub fn alpha(rule: LengthRule, k: u32, prec: Precision) -> Result<BigReal> {
    check_kn(k, 1)?;
    let wp = prec.guarded();
    let bits = wp.bits();
    let pi = wp.pi();
    let kk = k as i64;
    let half_pi = Float::with_val(bits, &pi / 2u32);
    let value = match rule {
        LengthRule::Schwartz => {
            let base = Float::with_val(bits, &pi / k).sin() * k / 2u32;
            pow_ratio(&base, 2 * kk, kk + 2)
        }
        LengthRule::Op => pow_ratio(&half_pi, kk - 2, 2),
        LengthRule::Op1 => pow_ratio(&half_pi, 2 * (kk - 2), kk),
        LengthRule::Op2 => {
            let correction = Float::with_val(bits, (&pi).pow(3u32)) / (12 * k) / k;
            pow_ratio(&(half_pi + correction), 2 * (kk - 2), kk)
        }
        LengthRule::TraceAsymptotic => Float::with_val(bits, 2 * (k + 1)) / (3 * k),
        LengthRule::TraceExact | LengthRule::Scan => {
            return Err(Error::InvalidArgument(format!(
                "rule `{rule}` has no N-independent closed-form coefficient"
            )))
        }
    };
    Ok(round_to(&value, prec))
}

fn from_alpha_rule(rule: LengthRule, k: u32, n: usize, prec: Precision) -> Result<LengthResult> {
    check_kn(k, n)?;
    let wp = prec.guarded();
    let a = alpha(rule, k, wp)?;
    let length = length_from_alpha(&a, k, n);
    Ok(LengthResult {
        length: round_to(&length, prec),
        alpha: round_to(&a, prec),
        rule,
        n,
        k,
    })
}

/// Mesh-error exponent `b = π^{(k+2)/k} (k/(k+2)) sin(π/k)` for `x^k`.
pub fn schwartz_b(k: u32, prec: Precision) -> Result<BigReal> {
    check_kn(k, 1)?;
    let wp = prec.guarded();
    let bits = wp.bits();
    let pi = wp.pi();
    let kk = k as i64;
    let value = pow_ratio(&pi, kk + 2, kk) * Float::with_val(bits, &pi / k).sin() * k / (k + 2);
    Ok(round_to(&value, prec))
}

/// Optimal mesh spacing
/// `h_S = [½ k π^{(k+2)/k} sin(π/k)]^{2k/(k+2)²} N^{-k/(k+2)}`.
pub fn schwartz_spacing(k: u32, n: usize, prec: Precision) -> Result<BigReal> {
    check_kn(k, n)?;
    let wp = prec.guarded();
    let bits = wp.bits();
    let pi = wp.pi();
    let kk = k as i64;
    let base = pow_ratio(&pi, kk + 2, kk) * Float::with_val(bits, &pi / k).sin() * k / 2u32;
    let value = pow_ratio(&base, 2 * kk, (kk + 2) * (kk + 2))
        * pow_ratio(&Float::with_val(bits, n as u64), -kk, kk + 2);
    Ok(round_to(&value, prec))
}

pub fn length_schwartz(k: u32, n: usize, prec: Precision) -> Result<LengthResult> {
    from_alpha_rule(LengthRule::Schwartz, k, n, prec)
}

pub fn length_op(k: u32, n: usize, prec: Precision) -> Result<LengthResult> {
    from_alpha_rule(LengthRule::Op, k, n, prec)
}

pub fn length_op1(k: u32, n: usize, prec: Precision) -> Result<LengthResult> {
    from_alpha_rule(LengthRule::Op1, k, n, prec)
}

pub fn length_op2(k: u32, n: usize, prec: Precision) -> Result<LengthResult> {
    from_alpha_rule(LengthRule::Op2, k, n, prec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceMode {
    Exact,
    Asymptotic,
}

/// Half-width that makes the even-block trace stationary.
pub fn length_trace(k: u32, n: usize, mode: TraceMode, prec: Precision) -> Result<LengthResult> {
    check_kn(k, n)?;
    if mode == TraceMode::Asymptotic {
        return from_alpha_rule(LengthRule::TraceAsymptotic, k, n, prec);
    }
    let wp = prec.guarded();
    let bits = wp.bits();
    let denominator = trigbasis::even_trace_potential_factor(k, n, wp)?;
    if denominator <= 0 {
        return Err(Error::NonPositiveTrace(crate::precision::to_sci(
            &denominator,
            6,
        )));
    }
    let nn = n as u64;
    let numerator = Float::with_val(bits, (4 * nn * nn - 1) * nn) / (6 * k);
    let length = pow_ratio(&(numerator / denominator), 1, k as i64 + 2) * wp.pi();
    let a = alpha_from_length(&length, k, n);
    Ok(LengthResult {
        length: round_to(&length, prec),
        alpha: round_to(&a, prec),
        rule: LengthRule::TraceExact,
        n,
        k,
    })
}

/// Any closed-form rule for `x^k`.
pub fn length_for_rule(
    rule: LengthRule,
    k: u32,
    n: usize,
    prec: Precision,
) -> Result<LengthResult> {
    match rule {
        LengthRule::TraceExact => length_trace(k, n, TraceMode::Exact, prec),
        LengthRule::Scan => Err(Error::InvalidArgument(
            "the scan rule needs a bracket; use length_scan".into(),
        )),
        _ => from_alpha_rule(rule, k, n, prec),
    }
}

/// Closed-form rule applied to a polynomial through its leading monomial
/// `β x^k`; the half-width is rescaled by `β^{-1/(k+2)}`.
pub fn length_for_potential(
    rule: LengthRule,
    pot: &Potential,
    n: usize,
    prec: Precision,
) -> Result<LengthResult> {
    let mut result = length_for_rule(rule, pot.leading_exponent(), n, prec)?;
    if *pot.leading_coefficient() != 1 {
        result.length *= pot.length_scale(prec);
    }
    Ok(result)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanObjective {
    /// Lowest eigenvalue of the even block.
    GroundEnergy,
    /// Trace of the even block.
    Trace,
}

impl FromStr for ScanObjective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ground" | "ground-energy" | "groundenergy" | "energy" => {
                Ok(ScanObjective::GroundEnergy)
            }
            "trace" => Ok(ScanObjective::Trace),
            other => Err(Error::Parse(format!("unknown scan objective `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub objective: ScanObjective,
    pub bracket: (f64, f64),
    /// Relative tolerance on L.
    pub tolerance: f64,
    pub exec: Exec,
}

pub const SCAN_GRID_POINTS: usize = 16;

/// Minimizes the objective over `L ∈ bracket` by golden-section search after
/// a uniform grid pre-scan. The golden-section minimum must fall within one
/// grid cell of the grid minimum, otherwise the objective is reported as not
/// unimodal on the bracket.
pub fn length_scan(
    pot: &Potential,
    n: usize,
    opts: &ScanOptions,
    prec: Precision,
) -> Result<LengthResult> {
    let k = pot.leading_exponent();
    check_kn(k, n)?;
    let (lo, hi) = opts.bracket;
    if !(lo > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "scan bracket must satisfy 0 < lo <= hi, got [{lo}, {hi}]"
        )));
    }
    if !(opts.tolerance > 0.0) {
        return Err(Error::InvalidArgument(
            "scan tolerance must be positive".into(),
        ));
    }
    let finish = |l: f64| {
        let length = prec.from_f64(l);
        let alpha = alpha_from_length(&length, k, n);
        LengthResult {
            length,
            alpha,
            rule: LengthRule::Scan,
            n,
            k,
        }
    };
    if lo == hi {
        return Ok(finish(lo));
    }

    let objective = |l: f64| -> Result<BigReal> {
        let length = prec.from_f64(l);
        match opts.objective {
            ScanObjective::Trace => Ok(trigbasis::diagonal_sum(pot, Parity::Even, n, &length)),
            ScanObjective::GroundEnergy => {
                let h = trigbasis::assemble(pot, Parity::Even, n, &length, Exec::Sequential)?;
                let e = jacobi_eigen(&h.matrix, &JacobiOptions::default())?;
                Ok(e.values.into_iter().next().expect("N >= 1"))
            }
        }
    };

    let step = (hi - lo) / (SCAN_GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_GRID_POINTS)
        .map(|i| lo + step * i as f64)
        .collect();
    let values = par::map_slice(opts.exec, &grid, |&l| objective(l))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    while (b - a) > opts.tolerance * (a + b) / 2.0 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d)?;
        }
    }
    let golden = (a + b) / 2.0;
    let cell_lo = grid[best.saturating_sub(1)];
    let cell_hi = grid[(best + 1).min(SCAN_GRID_POINTS - 1)];
    if golden < cell_lo - opts.tolerance * golden || golden > cell_hi + opts.tolerance * golden {
        return Err(Error::NonUnimodal {
            lo,
            hi,
            grid: grid[best],
            golden,
        });
    }
    Ok(finish(golden))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(bits: u32) -> Precision {
        Precision::new(bits).unwrap()
    }

    fn f(x: &BigReal) -> f64 {
        x.to_f64()
    }

    #[test]
    fn schwartz_b_examples() {
        let prec = p(128);
        let pi = std::f64::consts::PI;
        assert!((f(&schwartz_b(2, prec).unwrap()) - pi * pi / 2.0).abs() < 1e-14);
        let expect = pi.powf(1.5) * (2.0 / 3.0) * (pi / 4.0).sin();
        assert!((f(&schwartz_b(4, prec).unwrap()) - expect).abs() < 1e-14);
        assert!(schwartz_b(3, prec).is_err());
    }

    #[test]
    fn spacing_examples() {
        let prec = p(128);
        let pi = std::f64::consts::PI;
        assert!((f(&schwartz_spacing(2, 30, prec).unwrap()) - (pi / 30.0).sqrt()).abs() < 1e-15);
        let expect =
            (2.0 * pi.powf(1.5) * (pi / 4.0).sin()).powf(8.0 / 36.0) * 8f64.powf(-2.0 / 3.0);
        assert!((f(&schwartz_spacing(4, 8, prec).unwrap()) - expect).abs() < 1e-15);
        for k in [2, 4, 6, 10] {
            let h1 = schwartz_spacing(k, 1, prec).unwrap();
            let l1 = length_schwartz(k, 1, prec).unwrap().length;
            assert!((f(&h1) - f(&l1)).abs() < 1e-15);
        }
    }

    #[test]
    fn schwartz_length_examples() {
        let prec = p(128);
        let pi = std::f64::consts::PI;
        let r = length_schwartz(2, 30, prec).unwrap();
        assert!((f(&r.length) - (30.0 * pi).sqrt()).abs() < 1e-13);
        assert!((f(&r.alpha) - 1.0).abs() < 1e-30);
        let r = length_schwartz(4, 1, prec).unwrap();
        assert!((f(&r.length) - 1.582).abs() < 5e-4);
        assert!((f(&r.length) - 2f64.powf(1.0 / 9.0) * pi.powf(1.0 / 3.0)).abs() < 1e-14);
        // k → ∞: L → 1
        let r = length_schwartz(400, 1, prec).unwrap();
        assert!((f(&r.length) - 1.0).abs() < 2e-2);
    }

    #[test]
    fn op_length_examples() {
        let prec = p(128);
        let pi = std::f64::consts::PI;
        let r = length_op(2, 7, prec).unwrap();
        assert!((f(&r.length) - (7.0 * pi).sqrt()).abs() < 1e-13);
        assert!((f(&r.alpha) - 1.0).abs() < 1e-30);
        let r = length_op(4, 1, prec).unwrap();
        assert!((f(&r.length) - 1.579).abs() < 5e-4);
        let r = length_op(400, 1, prec).unwrap();
        assert!((f(&r.length) - 1.253).abs() < 2e-2);
        assert!((f(&r.length) - length_op(4000, 1, prec).unwrap().length.to_f64()).abs() < 5e-3);
    }

    #[test]
    fn op1_and_op2_limits() {
        let prec = p(128);
        let quarter_pi2 = std::f64::consts::PI.powi(2) / 4.0;
        assert!((f(&alpha(LengthRule::Op1, 2, prec).unwrap()) - 1.0).abs() < 1e-30);
        assert!((f(&alpha(LengthRule::Op2, 2, prec).unwrap()) - 1.0).abs() < 1e-30);
        let a = length_op1(4, 9, prec).unwrap().length;
        let b = length_op(4, 9, prec).unwrap().length;
        assert!((a - b).abs() < prec.epsilon() * 16u32);
        assert!((f(&alpha(LengthRule::Op1, 100_000, prec).unwrap()) - quarter_pi2).abs() < 1e-4);
        assert!((f(&alpha(LengthRule::Op2, 100_000, prec).unwrap()) - quarter_pi2).abs() < 1e-4);
    }

    #[test]
    fn op2_exceeds_schwartz_for_sextic() {
        let prec = p(128);
        for n in 1..=100 {
            let s = length_schwartz(6, n, prec).unwrap().length;
            let o = length_op2(6, n, prec).unwrap().length;
            assert!(o > s, "N={n}");
        }
    }

    #[test]
    fn trace_rule_examples() {
        let prec = p(128);
        let pi = std::f64::consts::PI;
        let r = length_trace(4, 10, TraceMode::Asymptotic, prec).unwrap();
        assert!((f(&r.alpha) - 5.0 / 6.0).abs() < 1e-30);
        let expect = (5.0 * pi * pi / 6.0).powf(1.0 / 6.0) * 10f64.powf(1.0 / 3.0);
        assert!((f(&r.length) - expect).abs() < 1e-13);
        let a = alpha(LengthRule::TraceAsymptotic, 1_000_000, prec).unwrap();
        assert!((f(&a) - 2.0 / 3.0).abs() < 1e-6);
        // k = 2, large N: L_T ≈ √(πN)
        let r = length_trace(2, 400, TraceMode::Exact, prec).unwrap();
        assert!((f(&r.length) / (400.0 * pi).sqrt() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn polynomial_rescaling() {
        let prec = p(128);
        let pot = Potential::parse("[[4, 16]]").unwrap();
        let plain = length_op(4, 10, prec).unwrap().length;
        let scaled = length_for_potential(LengthRule::Op, &pot, 10, prec)
            .unwrap()
            .length;
        // 16^{-1/6}
        assert!((f(&scaled) / f(&plain) - 16f64.powf(-1.0 / 6.0)).abs() < 1e-14);
    }

    #[test]
    fn rule_names_round_trip() {
        for rule in LengthRule::CLOSED_FORM
            .into_iter()
            .chain([LengthRule::Scan])
        {
            assert_eq!(rule.name().parse::<LengthRule>().unwrap(), rule);
        }
        assert!("bogus".parse::<LengthRule>().is_err());
    }

    #[test]
    fn scan_degenerate_bracket() {
        let pot = Potential::monomial(2).unwrap();
        let opts = ScanOptions {
            objective: ScanObjective::GroundEnergy,
            bracket: (3.0, 3.0),
            tolerance: 1e-6,
            exec: Exec::Sequential,
        };
        let r = length_scan(&pot, 4, &opts, p(64)).unwrap();
        assert_eq!(r.length, 3.0);
    }

    #[test]
    fn scan_trace_matches_stationary_length() {
        let prec = p(128);
        let pot = Potential::monomial(2).unwrap();
        let opts = ScanOptions {
            objective: ScanObjective::Trace,
            bracket: (2.0, 10.0),
            tolerance: 1e-8,
            exec: Exec::Parallel,
        };
        let scanned = length_scan(&pot, 10, &opts, prec).unwrap();
        let exact = length_trace(2, 10, TraceMode::Exact, prec).unwrap();
        assert!((f(&scanned.length) / f(&exact.length) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn scan_ground_energy_harmonic() {
        let prec = p(128);
        let pot = Potential::monomial(2).unwrap();
        let opts = ScanOptions {
            objective: ScanObjective::GroundEnergy,
            bracket: (3.0, 9.0),
            tolerance: 1e-6,
            exec: Exec::Parallel,
        };
        let r = length_scan(&pot, 10, &opts, prec).unwrap();
        let expect = (10.0 * std::f64::consts::PI).sqrt();
        assert!(
            (f(&r.length) / expect - 1.0).abs() < 0.05,
            "L = {}",
            f(&r.length)
        );
    }

    #[test]
    fn scan_rejects_bad_bracket() {
        let pot = Potential::monomial(2).unwrap();
        let opts = ScanOptions {
            objective: ScanObjective::Trace,
            bracket: (0.0, 1.0),
            tolerance: 1e-6,
            exec: Exec::Sequential,
        };
        assert!(length_scan(&pot, 4, &opts, p(64)).is_err());
    }
}
