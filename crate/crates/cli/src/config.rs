use std::path::PathBuf;
use std::str::FromStr;

use mxfreq::analysis::geometric_grid;
use mxfreq::{Complex64, Normalization, Quantity, SamplingMethod, StateSpec};

use crate::args::{Cli, CommandArgs, Common, Format, QuantityArg, SamplerArg, Switch};
use crate::error::CliError;
use crate::output::{format_float, Record, Value};

/// Particle counts to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub enum NGrid {
    Single(u64),
    /// `round(10^(log10 start + i/per_decade))` up to `stop`.
    Geometric {
        start: u64,
        stop: u64,
        per_decade: u32,
    },
}

impl NGrid {
    pub fn parse(text: &str, per_decade: u32) -> Result<Self, CliError> {
        match text.split_once(':') {
            None => Ok(NGrid::Single(parse_count(text)?)),
            Some((a, b)) => {
                let start = parse_count(a)?;
                let stop = parse_count(b)?;
                if stop < start {
                    return Err(CliError::usage(format!("grid {text}: stop is below start")));
                }
                if per_decade == 0 {
                    return Err(CliError::usage("--ppd must be at least 1"));
                }
                Ok(NGrid::Geometric {
                    start,
                    stop,
                    per_decade,
                })
            }
        }
    }

    pub fn expand(&self) -> Vec<u64> {
        match *self {
            NGrid::Single(n) => vec![n],
            NGrid::Geometric {
                start,
                stop,
                per_decade,
            } => geometric_grid(start, stop, per_decade),
        }
    }

    fn describe(&self) -> String {
        match self {
            NGrid::Single(n) => n.to_string(),
            NGrid::Geometric { start, stop, .. } => format!("{start}:{stop}"),
        }
    }
}

/// `123`, `1e6` or `2.5e3`; must be a positive integer.
fn parse_count(text: &str) -> Result<u64, CliError> {
    let text = text.trim();
    if let Ok(n) = text.parse::<u64>() {
        return check_count(n, text);
    }
    let x: f64 = text
        .parse()
        .map_err(|_| CliError::usage(format!("cannot read particle count {text:?}")))?;
    if !(x.fract() == 0.0 && (0.0..=1e18).contains(&x)) {
        return Err(CliError::usage(format!(
            "particle count {text:?} is not a whole number"
        )));
    }
    check_count(x as u64, text)
}

fn check_count(n: u64, text: &str) -> Result<u64, CliError> {
    if n == 0 {
        return Err(CliError::usage(format!(
            "particle count {text:?} must be at least 1"
        )));
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateInput {
    Probability(f64),
    Amplitudes {
        c_plus: Complex64,
        c_minus: Complex64,
    },
}

impl StateInput {
    pub fn spec(&self, n: u64) -> mxfreq::Result<StateSpec> {
        match *self {
            StateInput::Probability(p) => StateSpec::from_probability(n, p),
            StateInput::Amplitudes { c_plus, c_minus } => StateSpec::new(n, c_plus, c_minus),
        }
    }
}

fn parse_complex(flag: &str, text: &str) -> Result<Complex64, CliError> {
    Complex64::from_str(text.trim())
        .map_err(|_| CliError::usage(format!("{flag}: cannot read complex number {text:?}")))
}

fn format_complex(c: Complex64) -> String {
    format!(
        "{}{}{}i",
        format_float(c.re),
        if c.im < 0.0 { "" } else { "+" },
        format_float(c.im)
    )
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Table,
    Moments,
    Squires,
    DeltaPsi {
        k: Option<u64>,
    },
    Truncate {
        epsilon: f64,
        normalization: Normalization,
    },
    Sweep {
        quantity: Quantity,
    },
    Sample {
        shots: u64,
        seed: u64,
        method: SamplingMethod,
        epsilon: Option<f64>,
        histogram: bool,
    },
    OracleCheck {
        trials: u32,
        seed: u64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Table => "table",
            Command::Moments => "moments",
            Command::Squires => "squires",
            Command::DeltaPsi { .. } => "delta-psi",
            Command::Truncate { .. } => "truncate",
            Command::Sweep { .. } => "sweep",
            Command::Sample { .. } => "sample",
            Command::OracleCheck { .. } => "oracle-check",
        }
    }
}

pub fn quantity_name(q: &Quantity) -> &'static str {
    match q {
        Quantity::MaxOverlap => "max-overlap",
        Quantity::DeltaNorm => "delta-norm",
        Quantity::DeltaPsi => "delta-psi",
        Quantity::PeakWidth => "peak-width",
        Quantity::WindowMass { .. } => "window-mass",
    }
}

/// A fully validated invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub grid: NGrid,
    /// Absent only for `oracle-check`, which then draws random amplitudes.
    pub state: Option<StateInput>,
    pub format: Format,
    pub output: Option<PathBuf>,
}

fn positive_epsilon(eps: f64) -> Result<f64, CliError> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(CliError::usage(format!(
            "--eps must be positive, got {eps}"
        )));
    }
    Ok(eps)
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let (common, command) = match cli.command {
            CommandArgs::Table(c) => (c, Command::Table),
            CommandArgs::Moments(c) => (c, Command::Moments),
            CommandArgs::Squires(c) => (c, Command::Squires),
            CommandArgs::DeltaPsi { common, k } => (common, Command::DeltaPsi { k }),
            CommandArgs::Truncate {
                common,
                eps,
                normalize,
            } => (
                common,
                Command::Truncate {
                    epsilon: positive_epsilon(eps)?,
                    normalization: match normalize {
                        Switch::On => Normalization::Unit,
                        Switch::Off => Normalization::Raw,
                    },
                },
            ),
            CommandArgs::Sweep {
                common,
                quantity,
                eps,
            } => {
                let quantity = match quantity {
                    QuantityArg::MaxOverlap => Quantity::MaxOverlap,
                    QuantityArg::DeltaNorm => Quantity::DeltaNorm,
                    QuantityArg::DeltaPsi => Quantity::DeltaPsi,
                    QuantityArg::PeakWidth => Quantity::PeakWidth,
                    QuantityArg::WindowMass => {
                        let eps = eps.ok_or_else(|| CliError::usage("window-mass needs --eps"))?;
                        Quantity::WindowMass {
                            epsilon: positive_epsilon(eps)?,
                        }
                    }
                };
                (common, Command::Sweep { quantity })
            }
            CommandArgs::Sample {
                common,
                shots,
                seed,
                sampler,
                eps,
                histogram,
            } => {
                if shots == 0 {
                    return Err(CliError::usage("--shots must be at least 1"));
                }
                let method = match sampler {
                    SamplerArg::Sector => SamplingMethod::Sector,
                    SamplerArg::PerParticle => SamplingMethod::PerParticle,
                };
                let epsilon = eps.map(positive_epsilon).transpose()?;
                (
                    common,
                    Command::Sample {
                        shots,
                        seed,
                        method,
                        epsilon,
                        histogram,
                    },
                )
            }
            CommandArgs::OracleCheck {
                common,
                trials,
                seed,
            } => (common, Command::OracleCheck { trials, seed }),
        };
        Self::from_parts(command, common)
    }

    fn from_parts(command: Command, common: Common) -> Result<Self, CliError> {
        let grid = NGrid::parse(&common.n, common.ppd)?;
        let state = match (common.p, common.c_plus, common.c_minus) {
            (Some(p), _, _) => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(CliError::usage(format!("--p must lie in [0, 1], got {p}")));
                }
                Some(StateInput::Probability(p))
            }
            (None, Some(cp), Some(cm)) => Some(StateInput::Amplitudes {
                c_plus: parse_complex("--c-plus", &cp)?,
                c_minus: parse_complex("--c-minus", &cm)?,
            }),
            _ => None,
        };
        if state.is_none() && !matches!(command, Command::OracleCheck { .. }) {
            return Err(CliError::usage(
                "give the state with --p or --c-plus/--c-minus",
            ));
        }
        if matches!(command, Command::Table | Command::Sample { .. }) && grid.expand().len() != 1 {
            return Err(CliError::usage(format!(
                "{} takes a single --n",
                command.name()
            )));
        }
        let config = RunConfig {
            command,
            grid,
            state,
            format: common.format,
            output: common.output,
        };
        // Validates amplitudes once up front so every grid point can assume it.
        if let Some(state) = &config.state {
            state.spec(1).map_err(|e| CliError::usage(e.to_string()))?;
        }
        Ok(config)
    }

    /// Config echo written ahead of the records. The output path is left
    /// out so identical runs written to different files stay byte-identical.
    pub fn echo(&self) -> Record {
        let mut rec = Record::new()
            .with("command", self.command.name())
            .with("n", self.grid.describe());
        if let NGrid::Geometric { per_decade, .. } = self.grid {
            rec = rec.with("ppd", u64::from(per_decade));
        }
        match self.state {
            Some(StateInput::Probability(p)) => rec = rec.with("p", p),
            Some(StateInput::Amplitudes { c_plus, c_minus }) => {
                rec = rec
                    .with("c_plus", format_complex(c_plus))
                    .with("c_minus", format_complex(c_minus));
            }
            None => {}
        }
        match &self.command {
            Command::DeltaPsi { k } => rec = rec.with("k", k.map_or(Value::Null, Value::UInt)),
            Command::Truncate {
                epsilon,
                normalization,
            } => {
                rec = rec.with("eps", *epsilon).with(
                    "normalize",
                    if *normalization == Normalization::Unit {
                        "on"
                    } else {
                        "off"
                    },
                );
            }
            Command::Sweep { quantity } => {
                rec = rec.with("quantity", quantity_name(quantity));
                if let Quantity::WindowMass { epsilon } = quantity {
                    rec = rec.with("eps", *epsilon);
                }
            }
            Command::Sample {
                shots,
                seed,
                method,
                epsilon,
                histogram,
            } => {
                rec = rec
                    .with("shots", *shots)
                    .with("seed", *seed)
                    .with("sampler", sampler_name(*method))
                    .with("eps", Value::opt_float(*epsilon))
                    .with("histogram", if *histogram { "on" } else { "off" });
            }
            Command::OracleCheck { trials, seed } => {
                rec = rec.with("trials", u64::from(*trials)).with("seed", *seed);
            }
            Command::Table | Command::Moments | Command::Squires => {}
        }
        rec.with(
            "format",
            match self.format {
                Format::Csv => "csv",
                Format::Json => "json",
            },
        )
    }
}

pub fn sampler_name(method: SamplingMethod) -> &'static str {
    match method {
        SamplingMethod::Sector => "sector",
        SamplingMethod::PerParticle => "per-particle",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_count("100").unwrap(), 100);
        assert_eq!(parse_count("1e6").unwrap(), 1_000_000);
        assert_eq!(parse_count("2.5e3").unwrap(), 2500);
        assert!(parse_count("0").is_err());
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
        assert!(parse_count("many").is_err());
    }

    #[test]
    fn grids() {
        assert_eq!(NGrid::parse("4", 3).unwrap(), NGrid::Single(4));
        let g = NGrid::parse("1e2:1e4", 3).unwrap();
        assert_eq!(g.expand(), vec![100, 215, 464, 1000, 2154, 4642, 10_000]);
        assert!(NGrid::parse("1e4:1e2", 3).is_err());
        assert!(NGrid::parse("1e2:1e4", 0).is_err());
    }

    #[test]
    fn complex_echo_is_parseable() {
        let c = Complex64::new(0.8, -0.6);
        let text = format_complex(c);
        assert_eq!(Complex64::from_str(&text).unwrap(), c);
    }
}
