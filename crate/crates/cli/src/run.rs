use std::io::Write;

use rayon::prelude::*;

use mxfreq::analysis::{
    distance_from_split, fit_scaling, window_bounds, window_split, MIN_FIT_POINTS,
};
use mxfreq::oracle::{random_amplitude_pairs, verify_decomposition};
use mxfreq::sampling::{sample_per_particle, sample_sector};
use mxfreq::sector::{amplitude, eigenvalue, log_weight, sector_table};
use mxfreq::{
    concentration_report, delta_psi_norm_sq, empirical_fplus, max_eigenstate_overlap, moments,
    truncation_window, SamplingMethod, StateSpec,
};

use crate::args::Format;
use crate::config::{quantity_name, sampler_name, Command, RunConfig, StateInput};
use crate::error::CliError;
use crate::output::{FitSummary, Output, Record, Value};

/// Runs the command and writes the encoded output.
pub fn execute(config: &RunConfig) -> Result<(), CliError> {
    let output = run(config)?;
    let text = match config.format {
        Format::Csv => output.to_csv(),
        Format::Json => output.to_json(),
    };
    match &config.output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

/// Runs the command and returns its records without encoding them.
pub fn run(config: &RunConfig) -> Result<Output, CliError> {
    let grid = config.grid.expand();
    let mut fit = None;
    let records = match &config.command {
        Command::Table => table(&spec_at(config, grid[0])?)?,
        Command::Moments => per_n(config, &grid, |s| {
            let m = moments(&s);
            Ok(Record::new()
                .with("n", s.n())
                .with("mean", m.mean)
                .with("variance", m.variance)
                .with("summed_variance", Value::opt_float(m.summed_variance))
                .with("delta_norm", m.delta_norm))
        })?,
        Command::Squires => {
            let records = per_n(config, &grid, |s| {
                let peak = max_eigenstate_overlap(&s);
                Ok(Record::new()
                    .with("n", s.n())
                    .with("k_star", peak.k_star)
                    .with("overlap", peak.overlap)
                    .with("overlap_sq", peak.overlap_sq()))
            })?;
            fit = fit_column(&records, "overlap");
            records
        }
        Command::DeltaPsi { k } => per_n(config, &grid, |s| {
            let k = k.unwrap_or_else(|| max_eigenstate_overlap(&s).k_star);
            let sq = delta_psi_norm_sq(&s, k)?;
            Ok(Record::new()
                .with("n", s.n())
                .with("k", k)
                .with("overlap", (0.5 * log_weight(&s, k)?).exp())
                .with("delta_psi", sq.sqrt())
                .with("delta_psi_sq", sq))
        })?,
        Command::Truncate {
            epsilon,
            normalization,
        } => per_n(config, &grid, |s| {
            let window = truncation_window(&s, *epsilon)?;
            let split = window_split(&s, &window);
            let (low, high) = window_bounds(&s, &window);
            Ok(Record::new()
                .with("n", s.n())
                .with("eps", *epsilon)
                .with("a_minus", window.a_minus)
                .with("a_plus", window.a_plus)
                .with("mass", split.inside)
                .with("distance", distance_from_split(split, *normalization))
                .with("low", low)
                .with("high", high))
        })?,
        Command::Sweep { quantity } => {
            let records = per_n(config, &grid, |s| {
                Ok(Record::new()
                    .with("n", s.n())
                    .with("value", quantity.evaluate(&s)?))
            })?;
            fit = fit_column(&records, "value").map(|mut f| {
                f.quantity = quantity_name(quantity).to_owned();
                f
            });
            records
        }
        Command::Sample {
            shots,
            seed,
            method,
            epsilon,
            histogram,
        } => {
            let spec = spec_at(config, grid[0])?;
            let batch = match method {
                SamplingMethod::Sector => sample_sector(&spec, *shots, *seed)?,
                SamplingMethod::PerParticle => sample_per_particle(&spec, *shots, *seed)?,
            };
            if *histogram {
                let limit = mxfreq::sector::DEFAULT_TABLE_LIMIT;
                if spec.n() >= limit {
                    return Err(mxfreq::Error::TableTooLarge { n: spec.n(), limit }.into());
                }
                histogram_records(&spec, &batch.histogram())?
            } else {
                let concentration = epsilon
                    .map(|e| concentration_report(&batch, e))
                    .transpose()?;
                vec![Record::new()
                    .with("n", spec.n())
                    .with("shots", *shots)
                    .with("seed", *seed)
                    .with("sampler", sampler_name(*method))
                    .with("fplus", empirical_fplus(&batch))
                    .with("mean_outcome", batch.mean_outcome())
                    .with("concentration", Value::opt_float(concentration))]
            }
        }
        Command::OracleCheck { trials, seed } => oracle_check(config, &grid, *trials, *seed)?,
    };
    Ok(Output {
        config: config.echo(),
        records,
        fit,
    })
}

fn spec_at(config: &RunConfig, n: u64) -> Result<StateSpec, CliError> {
    let state = config.state.as_ref().expect("validated: state present");
    Ok(state.spec(n)?)
}

/// Evaluates one record per grid point in parallel; output stays sorted by
/// `n` because the grid is.
fn per_n<F>(config: &RunConfig, grid: &[u64], f: F) -> Result<Vec<Record>, CliError>
where
    F: Fn(StateSpec) -> Result<Record, CliError> + Sync,
{
    grid.par_iter()
        .map(|&n| spec_at(config, n).and_then(&f))
        .collect()
}

fn fit_column(records: &[Record], column: &'static str) -> Option<FitSummary> {
    if records.len() < MIN_FIT_POINTS {
        return None;
    }
    let samples: Vec<(u64, f64)> = records
        .iter()
        .filter_map(|r| {
            let n = r.0.iter().find_map(|(k, v)| match (k, v) {
                (&"n", Value::UInt(n)) => Some(*n),
                _ => None,
            })?;
            let v = r.0.iter().find_map(|(k, v)| match v {
                Value::Float(x) if *k == column => Some(*x),
                _ => None,
            })?;
            Some((n, v))
        })
        .collect();
    match fit_scaling(&samples) {
        Ok(fit) => Some(FitSummary {
            quantity: column.to_owned(),
            exponent: fit.exponent,
            log_prefactor: fit.log_prefactor,
            r_squared: fit.r_squared,
            points: fit.n_grid.len() as u64,
        }),
        Err(e) => {
            eprintln!("mxfreq: no power-law fit: {e}");
            None
        }
    }
}

fn table(spec: &StateSpec) -> Result<Vec<Record>, CliError> {
    Ok(sector_table(spec)?
        .into_iter()
        .map(|e| {
            Record::new()
                .with("k", e.k)
                .with("lambda", e.lambda)
                .with("log_prob", e.log_prob)
                .with("prob", e.prob())
                .with("phase", e.phase)
        })
        .collect())
}

fn histogram_records(spec: &StateSpec, counts: &[u64]) -> Result<Vec<Record>, CliError> {
    let shots: u64 = counts.iter().sum();
    counts
        .iter()
        .enumerate()
        .map(|(k, &count)| {
            let k = k as u64;
            Ok(Record::new()
                .with("k", k)
                .with("lambda", eigenvalue(spec.n(), k))
                .with("count", count)
                .with("frequency", count as f64 / shots as f64)
                .with("born_prob", amplitude(spec, k)?.norm_sqr()))
        })
        .collect()
}

fn oracle_check(
    config: &RunConfig,
    grid: &[u64],
    trials: u32,
    seed: u64,
) -> Result<Vec<Record>, CliError> {
    let cases: Vec<(u64, u64, StateInput)> = match config.state {
        Some(state) => grid.iter().map(|&n| (n, 0, state)).collect(),
        None => grid
            .iter()
            .flat_map(|&n| {
                random_amplitude_pairs(seed ^ n.rotate_left(32), trials as usize)
                    .into_iter()
                    .enumerate()
                    .map(move |(t, (c_plus, c_minus))| {
                        (n, t as u64, StateInput::Amplitudes { c_plus, c_minus })
                    })
            })
            .collect(),
    };
    cases
        .par_iter()
        .map(|&(n, trial, state)| {
            let report = verify_decomposition(&state.spec(n)?)?;
            Ok(Record::new()
                .with("n", n)
                .with("trial", trial)
                .with("amplitude_deviation", report.amplitude_deviation)
                .with("probability_deviation", report.probability_deviation)
                .with("residual_deviation", report.residual_deviation)
                .with("max_deviation", report.max_deviation))
        })
        .collect()
}
