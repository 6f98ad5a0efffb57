//! One entry point for all three discretizations.
//!
//! Energies are always eigenvalues of `-d²/dx² + V(x)`. For the oscillator
//! basis the potential must be `c₂x² + c₄x⁴`; it is mapped to
//! `½(-d² + ω²x²) + λx⁴` with `ω² = c₂`, `λ = c₄/2` and the resulting
//! energies are doubled.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::eigen::{jacobi_eigen, Eigen, JacobiOptions};
use crate::error::{Error, Result};
use crate::hobasis::{self, FrequencyRule, HoBasisSpec};
use crate::lengths::{self, LengthRule, ScanObjective, ScanOptions};
use crate::par::{self, Exec};
use crate::potentials::Potential;
use crate::precision::{to_decimal, BigReal, Precision};
use crate::reference;
use crate::sinc::{self, MeshSpec};
use crate::spectrum::{ReportMeta, SpectrumReport, FLAG_NONPOSITIVE_REFERENCE};
use crate::trigbasis::{self, Parity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Trig,
    Ho,
    Sinc,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Trig => "trig",
            Method::Ho => "ho",
            Method::Sinc => "sinc",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "trig" | "box" => Ok(Method::Trig),
            "ho" | "oscillator" => Ok(Method::Ho),
            "sinc" => Ok(Method::Sinc),
            other => Err(Error::Parse(format!(
                "unknown method `{other}` (expected trig|ho|sinc)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Even,
    Odd,
    Both,
}

impl Sector {
    fn parities(self) -> Vec<Parity> {
        match self {
            Sector::Even => vec![Parity::Even],
            Sector::Odd => vec![Parity::Odd],
            Sector::Both => vec![Parity::Even, Parity::Odd],
        }
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sector::Even => "even",
            Sector::Odd => "odd",
            Sector::Both => "both",
        })
    }
}

impl FromStr for Sector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "even" => Ok(Sector::Even),
            "odd" => Ok(Sector::Odd),
            "both" => Ok(Sector::Both),
            other => Err(Error::Parse(format!(
                "unknown parity `{other}` (expected even|odd|both)"
            ))),
        }
    }
}

/// How the nonlinear basis parameter is chosen.
#[derive(Clone, Debug)]
pub enum Parameter {
    /// Trigonometric basis: closed-form rule, or `Scan` with a default
    /// bracket of `[L_op/2, 2 L_op]` on the ground energy.
    LengthRule(LengthRule),
    Length(BigReal),
    Scan(ScanOptions),
    /// Oscillator basis.
    FrequencyRule(FrequencyRule),
    Frequency(BigReal),
    /// Sinc mesh: optimal spacing `h_S` or an explicit one.
    AutoSpacing,
    Spacing(BigReal),
}

impl Parameter {
    fn compatible(&self, method: Method) -> bool {
        matches!(
            (self, method),
            (
                Parameter::LengthRule(_) | Parameter::Length(_) | Parameter::Scan(_),
                Method::Trig
            ) | (
                Parameter::FrequencyRule(_) | Parameter::Frequency(_),
                Method::Ho
            ) | (Parameter::AutoSpacing | Parameter::Spacing(_), Method::Sinc)
        )
    }

    /// Default for a method: op2 lengths, PMS frequency, optimal spacing.
    pub fn default_for(method: Method) -> Self {
        match method {
            Method::Trig => Parameter::LengthRule(LengthRule::Op2),
            Method::Ho => Parameter::FrequencyRule(FrequencyRule::Pms),
            Method::Sinc => Parameter::AutoSpacing,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Problem {
    pub potential: Potential,
    pub method: Method,
    pub sector: Sector,
    /// Functions per parity sector (trig, ho) or mesh points per half-axis
    /// (sinc).
    pub n: usize,
    pub parameter: Parameter,
    pub precision: Precision,
    pub exec: Exec,
    /// Attach relative errors from the reference tables when available.
    pub with_reference: bool,
}

impl Problem {
    pub fn trig(potential: Potential, n: usize, rule: LengthRule, precision: Precision) -> Self {
        Problem {
            potential,
            method: Method::Trig,
            sector: Sector::Both,
            n,
            parameter: Parameter::LengthRule(rule),
            precision,
            exec: Exec::default(),
            with_reference: true,
        }
    }

    pub fn sector(mut self, sector: Sector) -> Self {
        self.sector = sector;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.parameter.compatible(self.method) {
            return Err(Error::InvalidArgument(format!(
                "parameter {:?} cannot be used with the {} basis",
                self.parameter, self.method
            )));
        }
        let min_n = if self.method == Method::Sinc { 2 } else { 1 };
        if self.n < min_n {
            return Err(Error::InvalidArgument(format!(
                "N must be >= {min_n} for the {} basis, got {}",
                self.method, self.n
            )));
        }
        if self.method == Method::Ho {
            ho_couplings(&self.potential)?;
        }
        Ok(())
    }
}

/// `(ω², λ)` with `-d² + V = 2[½(-d² + ω²x²) + λx⁴]`.
pub fn ho_couplings(pot: &Potential) -> Result<(Rational, Rational)> {
    if pot.leading_exponent() != 4 {
        return Err(Error::InvalidArgument(format!(
            "the oscillator basis handles c2 x^2 + c4 x^4 only, got {pot}"
        )));
    }
    let mut omega2 = Rational::new();
    for t in pot.terms() {
        if t.exponent == 2 {
            omega2 = t.coefficient.clone();
        }
    }
    Ok((omega2, Rational::from(pot.leading_coefficient() / 2u32)))
}

struct Sectors {
    parameter: BigReal,
    rule: String,
    eigen: Vec<(Parity, Eigen)>,
}

fn trig_length(problem: &Problem) -> Result<(BigReal, String)> {
    let prec = problem.precision;
    let pot = &problem.potential;
    Ok(match &problem.parameter {
        Parameter::Length(l) => {
            if *l <= 0 {
                return Err(Error::InvalidArgument(
                    "box half-width L must be positive".into(),
                ));
            }
            (crate::precision::round_to(l, prec), "explicit".into())
        }
        Parameter::LengthRule(LengthRule::Scan) => {
            let op = lengths::length_for_potential(LengthRule::Op, pot, problem.n, prec)?
                .length
                .to_f64();
            let opts = ScanOptions {
                objective: ScanObjective::GroundEnergy,
                bracket: (op / 2.0, op * 2.0),
                tolerance: 1e-6,
                exec: problem.exec,
            };
            (
                lengths::length_scan(pot, problem.n, &opts, prec)?.length,
                "scan".into(),
            )
        }
        Parameter::Scan(opts) => (
            lengths::length_scan(pot, problem.n, opts, prec)?.length,
            "scan".into(),
        ),
        Parameter::LengthRule(rule) => (
            lengths::length_for_potential(*rule, pot, problem.n, prec)?.length,
            rule.name().into(),
        ),
        _ => unreachable!("validated"),
    })
}

fn solve_sectors(problem: &Problem) -> Result<Sectors> {
    let opts = JacobiOptions::default();
    let parities = problem.sector.parities();
    // Matrices of the two sectors are assembled and diagonalized side by
    // side; assembly inside each sector only fans out for a single sector.
    let inner = if parities.len() > 1 {
        Exec::Sequential
    } else {
        problem.exec
    };
    match problem.method {
        Method::Trig => {
            let (length, rule) = trig_length(problem)?;
            let eigen = par::map_slice(problem.exec, &parities, |&p| -> Result<(Parity, Eigen)> {
                let h = trigbasis::assemble(&problem.potential, p, problem.n, &length, inner)?;
                Ok((p, jacobi_eigen(&h.matrix, &opts)?))
            });
            Ok(Sectors {
                parameter: length,
                rule,
                eigen: eigen.into_iter().collect::<Result<_>>()?,
            })
        }
        Method::Ho => {
            let (omega2, lambda) = ho_couplings(&problem.potential)?;
            let prec = problem.precision;
            let (omega, rule) = match &problem.parameter {
                Parameter::Frequency(w) => {
                    (crate::precision::round_to(w, prec), "explicit".to_string())
                }
                Parameter::FrequencyRule(FrequencyRule::Pms) => (
                    hobasis::pms_frequency(&omega2, &lambda, problem.n, prec)?,
                    "pms".into(),
                ),
                Parameter::FrequencyRule(FrequencyRule::Op) => (
                    hobasis::op_frequency(&omega2, &lambda, problem.n, prec)?,
                    "op".into(),
                ),
                Parameter::FrequencyRule(FrequencyRule::Value) => {
                    return Err(Error::InvalidArgument(
                        "frequency rule `value` needs an explicit --omega".into(),
                    ))
                }
                _ => unreachable!("validated"),
            };
            let spec = HoBasisSpec::new(omega.clone(), problem.n, omega2, lambda)?;
            let eigen = par::map_slice(problem.exec, &parities, |&p| -> Result<(Parity, Eigen)> {
                let m = hobasis::assemble_ho(&spec, p, inner);
                let mut e = jacobi_eigen(&m, &opts)?;
                for v in &mut e.values {
                    *v *= 2u32;
                }
                Ok((p, e))
            });
            Ok(Sectors {
                parameter: omega,
                rule,
                eigen: eigen.into_iter().collect::<Result<_>>()?,
            })
        }
        Method::Sinc => {
            let (mesh, rule) = match &problem.parameter {
                Parameter::AutoSpacing => (
                    MeshSpec::auto(&problem.potential, problem.n, problem.precision)?,
                    "schwartz".to_string(),
                ),
                Parameter::Spacing(h) => (
                    MeshSpec::new(crate::precision::round_to(h, problem.precision), problem.n)?,
                    "explicit".into(),
                ),
                _ => unreachable!("validated"),
            };
            let eigen = par::map_slice(problem.exec, &parities, |&p| -> Result<(Parity, Eigen)> {
                let m = sinc::collocation_block(&problem.potential, &mesh, p, inner);
                Ok((p, jacobi_eigen(&m, &opts)?))
            });
            Ok(Sectors {
                parameter: mesh.h,
                rule,
                eigen: eigen.into_iter().collect::<Result<_>>()?,
            })
        }
    }
}

/// Solves the problem and, when requested, attaches relative errors from
/// the reference tables.
pub fn solve(problem: &Problem) -> Result<SpectrumReport> {
    problem.validate()?;
    let start = Instant::now();
    let sectors = solve_sectors(problem)?;

    let mut tagged: Vec<(BigReal, Parity, usize)> = Vec::new();
    let mut sweeps = 0;
    for (parity, eig) in sectors.eigen {
        sweeps = sweeps.max(eig.sweeps);
        for (i, v) in eig.values.into_iter().enumerate() {
            tagged.push((v, parity, i));
        }
    }
    tagged.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite eigenvalues"));
    // Global level: in one dimension the even and odd ladders interlace, so
    // the i-th state of a sector is level 2i (+1 for odd). With both sectors
    // the merged order is used instead.
    let levels: Vec<usize> = match problem.sector {
        Sector::Both => (0..tagged.len()).collect(),
        _ => tagged
            .iter()
            .map(|(_, p, i)| 2 * i + usize::from(*p == Parity::Odd))
            .collect(),
    };

    let mut report = SpectrumReport {
        eigenvalues: tagged.into_iter().map(|t| t.0).collect(),
        levels,
        relative_errors: None,
        meta: ReportMeta {
            basis: problem.method.to_string(),
            rule: sectors.rule,
            n: problem.n,
            parameter: to_decimal(&sectors.parameter),
            k: problem.potential.leading_exponent(),
            potential: problem.potential.to_string(),
            parity: problem.sector.to_string(),
            precision: problem.precision.bits(),
            sweeps,
            wall_time: 0.0,
            flags: Vec::new(),
        },
    };
    if problem.with_reference {
        if let Some(qes) = problem.potential.qes_ground(problem.precision) {
            if qes.nonpositive_energy {
                report.add_flag(FLAG_NONPOSITIVE_REFERENCE);
            }
        }
        let pot = &problem.potential;
        let prec = problem.precision;
        report.attach_reference(|level| reference::reference_value(pot, level, prec))?;
    }
    report.meta.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}
