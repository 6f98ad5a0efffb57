//! Run configuration: command-line flags layered over an optional JSON file.
//! Flags win over file values, file values win over defaults.

use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Deserialize;

use optbasis::hobasis::{self, FrequencyRule};
use optbasis::lengths::LengthRule;
use optbasis::precision::parse_rational;
use optbasis::{Exec, Method, Parameter, Potential, Precision, Problem, Sector};

use crate::{config_error, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args, Debug, Default)]
pub struct RunArgs {
    /// JSON file with any of the options below (flags override it).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Monomial potential x^k.
    #[arg(long, conflicts_with = "potential")]
    pub k: Option<u32>,
    /// `x^k` or a JSON list of [exponent, coefficient] pairs.
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long, visible_alias = "basis")]
    pub method: Option<Method>,
    #[arg(long)]
    pub parity: Option<Sector>,
    /// Functions per parity sector.
    #[arg(long = "N")]
    pub n: Option<usize>,
    /// Sinc mesh points per half-axis (overrides --N).
    #[arg(long = "mesh-N")]
    pub mesh_n: Option<usize>,
    #[arg(long = "length-rule")]
    pub length_rule: Option<LengthRule>,
    /// Explicit box half-width L.
    #[arg(long, conflicts_with = "length_rule")]
    pub length: Option<String>,
    #[arg(long = "freq-rule")]
    pub freq_rule: Option<FrequencyRule>,
    /// Explicit oscillator frequency Ω.
    #[arg(long)]
    pub omega: Option<String>,
    /// ω² of ½(-d² + ω²x²) + λx⁴ (oscillator basis).
    #[arg(long, allow_hyphen_values = true)]
    pub omega2: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    /// Explicit sinc mesh spacing.
    #[arg(long)]
    pub h: Option<String>,
    /// Working precision in bits (default depends on N).
    #[arg(long)]
    pub precision: Option<u32>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    k: Option<u32>,
    potential: Option<Potential>,
    method: Option<Method>,
    parity: Option<Sector>,
    #[serde(rename = "N")]
    n: Option<usize>,
    #[serde(rename = "mesh_N")]
    mesh_n: Option<usize>,
    length_rule: Option<LengthRule>,
    length: Option<String>,
    freq_rule: Option<FrequencyRule>,
    omega: Option<String>,
    omega2: Option<String>,
    lambda: Option<String>,
    h: Option<String>,
    precision: Option<u32>,
    format: Option<Format>,
    output: Option<PathBuf>,
}

#[derive(Debug)]
pub struct RunConfig {
    pub potential: Potential,
    pub method: Method,
    pub sector: Sector,
    pub n: usize,
    pub parameter: Parameter,
    pub precision: Precision,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(args: &RunArgs) -> CliResult<Self> {
        let file: FileConfig = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| config_error(format!("bad config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };

        let method = args.method.or(file.method).unwrap_or(Method::Trig);
        let omega2 = args.omega2.clone().or(file.omega2);
        let lambda = args.lambda.clone().or(file.lambda);

        let k = args.k.or(file.k);
        let explicit_potential = match (&args.potential, k) {
            (Some(s), _) => Some(Potential::parse(s)?),
            (None, Some(k)) => Some(Potential::monomial(k)?),
            (None, None) => file.potential,
        };
        let potential = match (omega2, lambda) {
            (None, None) => explicit_potential.unwrap_or(Potential::monomial(4)?),
            (w2, lam) => {
                if explicit_potential.is_some() {
                    return Err(config_error(
                        "give either a potential or --omega2/--lambda, not both",
                    ));
                }
                if method != Method::Ho {
                    return Err(config_error("--omega2/--lambda describe the oscillator-basis Hamiltonian; use --method ho"));
                }
                let w2 = parse_rational(w2.as_deref().unwrap_or("0"))?;
                let lam = parse_rational(lam.as_deref().unwrap_or("1"))?;
                hobasis::equivalent_potential(&w2, &lam)?
            }
        };

        let n = match method {
            Method::Sinc => args.mesh_n.or(file.mesh_n).or(args.n).or(file.n),
            _ => args.n.or(file.n),
        }
        .unwrap_or(10);
        let precision = match args.precision.or(file.precision) {
            Some(bits) => Precision::new(bits)?,
            None => Precision::default_for_basis(n),
        };

        let length_rule = args.length_rule.or(file.length_rule);
        let length = args.length.clone().or(file.length);
        let freq_rule = args.freq_rule.or(file.freq_rule);
        let omega = args.omega.clone().or(file.omega);
        let h = args.h.clone().or(file.h);
        let trig_only = length_rule.is_some() || length.is_some();
        let ho_only = freq_rule.is_some() || omega.is_some();
        let sinc_only = h.is_some();

        let parameter = match method {
            Method::Trig => {
                if ho_only || sinc_only {
                    return Err(config_error(
                        "frequency and mesh options do not apply to the trig basis",
                    ));
                }
                match (length, length_rule) {
                    (Some(l), _) => Parameter::Length(precision.parse(&l)?),
                    (None, Some(rule)) => Parameter::LengthRule(rule),
                    (None, None) => Parameter::default_for(Method::Trig),
                }
            }
            Method::Ho => {
                if trig_only || sinc_only {
                    return Err(config_error(
                        "length and mesh options do not apply to the oscillator basis",
                    ));
                }
                match (omega, freq_rule) {
                    (Some(w), None | Some(FrequencyRule::Value)) => {
                        Parameter::Frequency(precision.parse(&w)?)
                    }
                    (Some(_), Some(_)) => {
                        return Err(config_error("--omega conflicts with --freq-rule pms|op"))
                    }
                    (None, Some(FrequencyRule::Value)) => {
                        return Err(config_error("--freq-rule value needs --omega"))
                    }
                    (None, Some(rule)) => Parameter::FrequencyRule(rule),
                    (None, None) => Parameter::default_for(Method::Ho),
                }
            }
            Method::Sinc => {
                if ho_only || length.is_some() {
                    return Err(config_error(
                        "length and frequency options do not apply to the sinc mesh",
                    ));
                }
                match (h, length_rule) {
                    (Some(h), None) => Parameter::Spacing(precision.parse(&h)?),
                    (None, None | Some(LengthRule::Schwartz)) => Parameter::AutoSpacing,
                    _ => {
                        return Err(config_error(
                            "the sinc mesh takes --h or the schwartz spacing",
                        ))
                    }
                }
            }
        };

        Ok(RunConfig {
            potential,
            method,
            sector: args.parity.or(file.parity).unwrap_or(Sector::Both),
            n,
            parameter,
            precision,
            format: args.format.or(file.format).unwrap_or(Format::Json),
            output: args.output.clone().or(file.output),
        })
    }

    pub fn problem(&self) -> CliResult<Problem> {
        let problem = Problem {
            potential: self.potential.clone(),
            method: self.method,
            sector: self.sector,
            n: self.n,
            parameter: self.parameter.clone(),
            precision: self.precision,
            exec: Exec::Parallel,
            with_reference: true,
        };
        problem.validate()?;
        Ok(problem)
    }
}
