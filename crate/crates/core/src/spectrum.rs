//! Solver output: eigenvalues with their provenance, relative errors against
//! reference spectra, and convergence series over N.
//!
//! All numbers leave this module as decimal strings carrying enough digits to
//! round-trip at the stated precision, so 40-digit errors survive JSON.

use std::fmt::Write as _;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::precision::{to_decimal, to_sci, BigReal, Precision};
use crate::solve::{solve, Problem};

pub const FLAG_REFERENCE_TRUNCATED: &str = "reference-truncated";
pub const FLAG_NONPOSITIVE_REFERENCE: &str = "nonpositive-qes-energy";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    /// `trig`, `ho` or `sinc`.
    pub basis: String,
    /// Rule that fixed the nonlinear parameter, or `explicit`.
    pub rule: String,
    pub n: usize,
    /// L, Ω or h, depending on the basis.
    pub parameter: String,
    pub k: u32,
    pub potential: String,
    pub parity: String,
    pub precision: u32,
    pub sweeps: usize,
    /// Seconds; the only field that differs between identical runs.
    pub wall_time: f64,
    #[serde(default)]
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    /// Ascending.
    pub eigenvalues: Vec<BigReal>,
    /// Global level index of each eigenvalue (even states are 0, 2, 4, ...).
    pub levels: Vec<usize>,
    pub relative_errors: Option<Vec<BigReal>>,
    pub meta: ReportMeta,
}

#[derive(Serialize, Deserialize)]
struct Wire {
    eigenvalues: Vec<String>,
    levels: Vec<usize>,
    relative_errors: Option<Vec<String>>,
    meta: ReportMeta,
}

impl SpectrumReport {
    pub fn precision(&self) -> Precision {
        Precision::bits_unchecked(self.meta.precision)
    }

    pub fn to_json(&self) -> Result<String> {
        let wire = Wire {
            eigenvalues: self.eigenvalues.iter().map(to_decimal).collect(),
            levels: self.levels.clone(),
            relative_errors: self
                .relative_errors
                .as_ref()
                .map(|e| e.iter().map(to_decimal).collect()),
            meta: self.meta.clone(),
        };
        Ok(serde_json::to_string_pretty(&wire)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: Wire = serde_json::from_str(text)?;
        let prec = Precision::new(wire.meta.precision)?;
        let parse_all = |v: &[String]| v.iter().map(|s| prec.parse(s)).collect::<Result<Vec<_>>>();
        if wire.levels.len() != wire.eigenvalues.len() {
            return Err(Error::Parse(
                "levels and eigenvalues differ in length".into(),
            ));
        }
        Ok(SpectrumReport {
            eigenvalues: parse_all(&wire.eigenvalues)?,
            levels: wire.levels,
            relative_errors: wire.relative_errors.as_deref().map(parse_all).transpose()?,
            meta: wire.meta,
        })
    }

    /// `level,eigenvalue,relative_error`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,eigenvalue,relative_error\n");
        for (i, (level, e)) in self.levels.iter().zip(&self.eigenvalues).enumerate() {
            let err = self
                .relative_errors
                .as_ref()
                .and_then(|v| v.get(i))
                .map(to_decimal)
                .unwrap_or_default();
            let _ = writeln!(out, "{level},{},{err}", to_decimal(e));
        }
        out
    }

    pub fn to_table(&self) -> String {
        let m = &self.meta;
        let mut out = format!(
            "# {} basis, rule {}, N={}, parameter={}, V={}, parity {}, {} bits, {} sweeps\n",
            m.basis, m.rule, m.n, m.parameter, m.potential, m.parity, m.precision, m.sweeps
        );
        let digits = (m.precision as f64 * std::f64::consts::LOG10_2) as usize;
        let _ = writeln!(
            out,
            "{:>5}  {:<w$}  eps_n",
            "n",
            "E_n",
            w = digits + 8
        );
        for (i, (level, e)) in self.levels.iter().zip(&self.eigenvalues).enumerate() {
            let err = self
                .relative_errors
                .as_ref()
                .and_then(|v| v.get(i))
                .map(|x| to_sci(x, 3))
                .unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "{level:>5}  {:<w$}  {err}",
                to_sci(e, digits),
                w = digits + 8
            );
        }
        for flag in &m.flags {
            let _ = writeln!(out, "# flag: {flag}");
        }
        out
    }

    /// Eigenvalue at global level `n`, if present.
    pub fn level(&self, n: usize) -> Option<&BigReal> {
        self.levels
            .iter()
            .position(|&l| l == n)
            .map(|i| &self.eigenvalues[i])
    }

    /// Relative error at global level `n`, if present.
    pub fn error_at(&self, n: usize) -> Option<&BigReal> {
        let i = self.levels.iter().position(|&l| l == n)?;
        self.relative_errors.as_ref()?.get(i)
    }

    /// Fills `relative_errors` from a per-level reference lookup. Levels
    /// without a reference end the list and set a flag.
    pub fn attach_reference(&mut self, reference: impl Fn(usize) -> Option<BigReal>) -> Result<()> {
        let refs: Vec<BigReal> = self.levels.iter().map_while(|&l| reference(l)).collect();
        if refs.is_empty() {
            return Ok(());
        }
        let rel = relative_errors(&self.eigenvalues, &refs)?;
        if rel.truncated {
            self.add_flag(FLAG_REFERENCE_TRUNCATED);
        }
        self.relative_errors = Some(rel.values);
        Ok(())
    }

    pub fn add_flag(&mut self, flag: &str) {
        if !self.meta.flags.iter().any(|f| f == flag) {
            self.meta.flags.push(flag.to_string());
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelativeErrors {
    pub values: Vec<BigReal>,
    /// The two lists differed in length and only the common prefix was used.
    pub truncated: bool,
}

/// `ε_n = |(E_n - E_n^ref) / E_n^ref|` on the common prefix.
pub fn relative_errors(computed: &[BigReal], reference: &[BigReal]) -> Result<RelativeErrors> {
    let len = computed.len().min(reference.len());
    let mut values = Vec::with_capacity(len);
    for (e, r) in computed.iter().zip(reference) {
        if r.is_zero() {
            return Err(Error::InvalidArgument(
                "reference eigenvalue is zero".into(),
            ));
        }
        let bits = e.prec().max(r.prec());
        values.push((Float::with_val(bits, e - r) / r).abs());
    }
    Ok(RelativeErrors {
        values,
        truncated: computed.len() != reference.len(),
    })
}

#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub n: usize,
    pub parameter: String,
    pub values: Vec<BigReal>,
    /// Relative errors of `values` against the reference levels.
    pub errors: Vec<BigReal>,
}

#[derive(Clone, Debug)]
pub struct ConvergenceSeries {
    pub levels: Vec<usize>,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `log10 ε` of the first level against N, in
    /// decades per unit N. Points at the roundoff floor are left out; `None`
    /// with fewer than two usable points.
    pub slope: Option<f64>,
}

impl ConvergenceSeries {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,parameter");
        for l in &self.levels {
            let _ = write!(out, ",E_{l},eps_{l}");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{},{}", row.n, row.parameter);
            for (v, e) in row.values.iter().zip(&row.errors) {
                let _ = write!(out, ",{},{}", to_decimal(v), to_sci(e, 6));
            }
            out.push('\n');
        }
        if let Some(s) = self.slope {
            let _ = writeln!(out, "# slope_log10_eps_per_N,{s}");
        }
        out
    }
}

/// Runs `problem` for each N (in parallel when allowed), compares the
/// requested global levels against `reference` and fits the decay rate.
pub fn convergence_series(
    problem: &Problem,
    ns: &[usize],
    levels: &[usize],
    reference: &[BigReal],
) -> Result<ConvergenceSeries> {
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "N list must be strictly ascending".into(),
        ));
    }
    if levels.is_empty() || levels.len() != reference.len() {
        return Err(Error::InvalidArgument(
            "need one reference value per requested level".into(),
        ));
    }
    let rows = par::map_slice(problem.exec, ns, |&n| -> Result<ConvergenceRow> {
        let mut p = problem.clone();
        p.n = n;
        p.exec = crate::par::Exec::Sequential;
        let report = solve(&p)?;
        let mut values = Vec::with_capacity(levels.len());
        for &l in levels {
            let v = report.level(l).cloned().ok_or_else(|| {
                Error::InvalidArgument(format!("level {l} is not available at N={n}"))
            })?;
            values.push(v);
        }
        let errors = relative_errors(&values, reference)?.values;
        Ok(ConvergenceRow {
            n,
            parameter: report.meta.parameter,
            values,
            errors,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let floor = problem.precision.epsilon() * 65536u32;
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.errors[0] > floor)
        .map(|r| (r.n as f64, log10(&r.errors[0])))
        .collect();
    Ok(ConvergenceSeries {
        levels: levels.to_vec(),
        rows,
        slope: fit_slope(&points),
    })
}

/// `log10 x` for tiny x without f64 underflow.
pub fn log10(x: &BigReal) -> f64 {
    Float::with_val(64, x.log10_ref()).to_f64()
}

/// Ordinary least-squares slope.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
