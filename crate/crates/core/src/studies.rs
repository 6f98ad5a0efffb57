//! Plot-ready data for the length and frequency studies, and side-by-side
//! rule comparisons. Every generator returns CSV text; rendering is left to
//! external tools.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::hobasis;
use crate::lengths::{self, LengthRule, ScanObjective, ScanOptions};
use crate::par::{self, Exec};
use crate::potentials::Potential;
use crate::precision::{to_sci, BigReal, Precision};
use crate::reference;
use crate::solve::{solve, Problem, Sector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    /// Variational (ground-energy scan) optimal length against the op curve.
    Fig1,
    /// All closed-form lengths against N for k = 2 and 4.
    Fig2,
    /// The same for k = 6 and 16.
    Fig3,
    /// α(k) for every rule, k = 2..40.
    Fig5,
    /// PMS frequency against the total basis size 2N.
    Fig8,
    /// ε₀ against N: k = 4 with L_op and k = 6 with L_S.
    FigK,
    /// α_S, α_op1, α_op2 for k up to 100.
    FigA,
}

impl Figure {
    pub const ALL: [Figure; 7] = [
        Figure::Fig1,
        Figure::Fig2,
        Figure::Fig3,
        Figure::Fig5,
        Figure::Fig8,
        Figure::FigK,
        Figure::FigA,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig5 => "fig5",
            Figure::Fig8 => "fig8",
            Figure::FigK => "figk",
            Figure::FigA => "figa",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "unknown figure `{s}` (expected fig1|fig2|fig3|fig5|fig8|figk|figa)"
                ))
            })
    }
}

fn f64_of(x: &BigReal) -> String {
    format!("{:.12}", x.to_f64())
}

const LENGTH_COLUMNS: [LengthRule; 6] = LengthRule::CLOSED_FORM;

fn length_rows(
    out: &mut String,
    ks: &[u32],
    ns: std::ops::RangeInclusive<usize>,
    prec: Precision,
) -> Result<()> {
    out.push_str("k,N");
    for r in LENGTH_COLUMNS {
        let _ = write!(out, ",L_{}", r.name().replace('-', "_"));
    }
    out.push('\n');
    for &k in ks {
        for n in ns.clone() {
            let _ = write!(out, "{k},{n}");
            for r in LENGTH_COLUMNS {
                let _ = write!(
                    out,
                    ",{}",
                    f64_of(&lengths::length_for_rule(r, k, n, prec)?.length)
                );
            }
            out.push('\n');
        }
    }
    Ok(())
}

fn alpha_rows(
    out: &mut String,
    ks: impl Iterator<Item = u32>,
    rules: &[LengthRule],
    prec: Precision,
) -> Result<()> {
    out.push('k');
    for r in rules {
        let _ = write!(out, ",alpha_{}", r.name().replace('-', "_"));
    }
    out.push('\n');
    for k in ks {
        let _ = write!(out, "{k}");
        for &r in rules {
            let _ = write!(out, ",{}", f64_of(&lengths::alpha(r, k, prec)?));
        }
        out.push('\n');
    }
    Ok(())
}

/// CSV data for `figure`.
pub fn figure(figure: Figure, prec: Precision, exec: Exec) -> Result<String> {
    let mut out = String::new();
    match figure {
        Figure::Fig1 => {
            out.push_str("k,N,L_variational,L_op\n");
            let cases: Vec<(u32, usize)> = [2u32, 4, 6, 8]
                .iter()
                .flat_map(|&k| (1..=20).map(move |n| (k, n)))
                .collect();
            let rows = par::map_slice(exec, &cases, |&(k, n)| -> Result<String> {
                let op = lengths::length_op(k, n, prec)?.length;
                let guess = op.to_f64();
                let opts = ScanOptions {
                    objective: ScanObjective::GroundEnergy,
                    bracket: (guess / 2.0, guess * 2.0),
                    tolerance: 1e-5,
                    exec: Exec::Sequential,
                };
                let scanned = lengths::length_scan(&Potential::monomial(k)?, n, &opts, prec)?;
                Ok(format!(
                    "{k},{n},{},{}\n",
                    f64_of(&scanned.length),
                    f64_of(&op)
                ))
            });
            for r in rows {
                out.push_str(&r?);
            }
        }
        Figure::Fig2 => length_rows(&mut out, &[2, 4], 1..=40, prec)?,
        Figure::Fig3 => length_rows(&mut out, &[6, 16], 1..=40, prec)?,
        Figure::Fig5 => alpha_rows(
            &mut out,
            (2..=40).step_by(2),
            &[
                LengthRule::Schwartz,
                LengthRule::Op,
                LengthRule::Op1,
                LengthRule::Op2,
                LengthRule::TraceAsymptotic,
            ],
            prec,
        )?,
        Figure::FigA => alpha_rows(
            &mut out,
            (2..=100).step_by(2),
            &[LengthRule::Schwartz, LengthRule::Op1, LengthRule::Op2],
            prec,
        )?,
        Figure::Fig8 => {
            out.push_str("2N,omega2_0,omega2_12,omega2_20\n");
            let lambda = Rational::from(1);
            for n in 1..=50usize {
                let _ = write!(out, "{}", 2 * n);
                for w2 in [0, 12, 20] {
                    let omega = hobasis::pms_frequency(&Rational::from(w2), &lambda, n, prec)?;
                    let _ = write!(out, ",{}", f64_of(&(omega / 2u32)));
                }
                out.push('\n');
            }
        }
        Figure::FigK => {
            out.push_str("N,eps0_k4_op,eps0_k6_schwartz\n");
            let ns: Vec<usize> = (2..=40).collect();
            let series = |k: u32, rule: LengthRule| -> Result<Vec<BigReal>> {
                let pot = Potential::monomial(k)?;
                let r0 = reference::reference_value(&pot, 0, prec).ok_or_else(|| {
                    Error::InvalidArgument(format!("no reference ground state for x^{k}"))
                })?;
                par::map_slice(exec, &ns, |&n| {
                    let mut p = Problem::trig(pot.clone(), n, rule, prec).sector(Sector::Even);
                    p.exec = Exec::Sequential;
                    p.with_reference = false;
                    let e = solve(&p)?.eigenvalues.remove(0);
                    Ok((Float::with_val(prec.bits(), &e - &r0) / &r0).abs())
                })
                .into_iter()
                .collect()
            };
            let a = series(4, LengthRule::Op)?;
            let b = series(6, LengthRule::Schwartz)?;
            for (i, n) in ns.iter().enumerate() {
                let _ = writeln!(out, "{n},{},{}", to_sci(&a[i], 4), to_sci(&b[i], 4));
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct RuleComparison {
    pub rules: Vec<LengthRule>,
    pub levels: Vec<usize>,
    /// `errors[r][i]` is ε at `levels[i]` for `rules[r]`.
    pub errors: Vec<Vec<BigReal>>,
    pub lengths: Vec<BigReal>,
}

impl RuleComparison {
    pub fn error(&self, rule: LengthRule, level: usize) -> Option<&BigReal> {
        let r = self.rules.iter().position(|&x| x == rule)?;
        let i = self.levels.iter().position(|&l| l == level)?;
        Some(&self.errors[r][i])
    }

    /// `level,<rule>,...` with one row per level, plus a header row of L.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level");
        for r in &self.rules {
            let _ = write!(out, ",{}", r.name());
        }
        out.push_str("\nL");
        for l in &self.lengths {
            let _ = write!(out, ",{}", f64_of(l));
        }
        out.push('\n');
        for (i, level) in self.levels.iter().enumerate() {
            let _ = write!(out, "{level}");
            for errs in &self.errors {
                let _ = write!(out, ",{}", to_sci(&errs[i], 3));
            }
            out.push('\n');
        }
        out
    }
}

/// Relative errors of the given levels under each length rule, at fixed N
/// per parity.
pub fn compare_rules(
    pot: &Potential,
    n: usize,
    rules: &[LengthRule],
    levels: &[usize],
    prec: Precision,
    exec: Exec,
) -> Result<RuleComparison> {
    if rules.len() < 2 {
        return Err(Error::InvalidArgument(
            "comparison needs at least two rules".into(),
        ));
    }
    let refs = reference::reference_levels(pot, levels, prec).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "no reference values for {pot} at levels {levels:?}"
        ))
    })?;
    let sector = if levels.iter().all(|l| l % 2 == 0) {
        Sector::Even
    } else if levels.iter().all(|l| l % 2 == 1) {
        Sector::Odd
    } else {
        Sector::Both
    };
    let results = par::map_slice(exec, rules, |&rule| -> Result<(BigReal, Vec<BigReal>)> {
        let mut p = Problem::trig(pot.clone(), n, rule, prec).sector(sector);
        p.exec = Exec::Sequential;
        p.with_reference = false;
        let report = solve(&p)?;
        let mut errs = Vec::with_capacity(levels.len());
        for (&l, r) in levels.iter().zip(&refs) {
            let e = report.level(l).ok_or_else(|| {
                Error::InvalidArgument(format!("level {l} not available at N={n}"))
            })?;
            errs.push((Float::with_val(prec.bits(), e - r) / r).abs());
        }
        Ok((prec.parse(&report.meta.parameter)?, errs))
    });
    let mut lengths_out = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        let (l, e) = r?;
        lengths_out.push(l);
        errors.push(e);
    }
    Ok(RuleComparison {
        rules: rules.to_vec(),
        levels: levels.to_vec(),
        errors,
        lengths: lengths_out,
    })
}
