use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::fit::{fit_damped_cosine, FitResult};
use super::stats::{wilson_interval, Z_95};
use super::trial::{TrialContext, TrialRecord};
use crate::config::{Config, ConfigError};
use crate::error::Result;

pub const INTERVAL_METHOD: &str = "wilson-95";

/// Aggregated counts at one programmed delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n: u32,
    pub t_ns: f64,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl CurvePoint {
    pub fn t(&self) -> f64 {
        self.t_ns * 1e-9
    }
}

/// Estimated P("1") against evolution time plus the damped-cosine fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityCurve {
    pub points: Vec<CurvePoint>,
    pub fit: Option<FitResult>,
    /// Set when the fit failed; the counts are still valid.
    pub fit_error: Option<String>,
    pub interval_method: &'static str,
}

impl ProbabilityCurve {
    pub fn from_counts(points: Vec<CurvePoint>, with_decay: bool) -> Self {
        let t: Vec<f64> = points.iter().map(CurvePoint::t).collect();
        let p: Vec<f64> = points.iter().map(|pt| pt.p_hat).collect();
        let w: Vec<f64> = points.iter().map(|pt| pt.trials as f64).collect();
        let (fit, fit_error) = match fit_damped_cosine(&t, &p, &w, with_decay) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        ProbabilityCurve { points, fit, fit_error, interval_method: INTERVAL_METHOD }
    }

    pub fn fitted_frequency(&self) -> Option<f64> {
        self.fit.map(|f| f.model.frequency)
    }

    pub fn fitted_decay(&self) -> Option<f64> {
        self.fit.and_then(|f| f.model.decay)
    }

    /// `n,t_ns,trials,successes,p_hat,ci_lo,ci_hi`, one row per delay.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["n", "t_ns", "trials", "successes", "p_hat", "ci_lo", "ci_hi"])?;
        for p in &self.points {
            w.write_record([
                p.n.to_string(),
                format!("{:.1}", p.t_ns),
                p.trials.to_string(),
                p.successes.to_string(),
                format!("{:.6}", p.p_hat),
                format!("{:.6}", p.ci_lo),
                format!("{:.6}", p.ci_hi),
            ])?;
        }
        w.flush()
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub curve: ProbabilityCurve,
    /// Every trial, ordered by `(n` position in the config`, index)`.
    pub records: Vec<TrialRecord>,
    /// Event trace of the first trial, when requested.
    pub first_trace: Option<String>,
}

fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
}

/// Run `trials_per_n` trials for every configured `n` and aggregate.
///
/// Results do not depend on the worker count: each trial draws from its own
/// stream and records are collected in order.
pub fn run_sweep(ctx: &TrialContext, trace_first: bool) -> Result<SweepOutput> {
    let settings = &ctx.config.experiment;
    let jobs: Vec<(u32, u64)> = settings
        .n_values
        .iter()
        .flat_map(|&n| (0..settings.trials_per_n).map(move |i| (n, i)))
        .collect();
    let records: Vec<TrialRecord> = pool(settings.workers).install(|| {
        jobs.par_iter()
            .map(|&(n, i)| ctx.run_trial(n, i))
            .collect::<Result<Vec<_>>>()
    })?;

    let mut points = Vec::with_capacity(settings.n_values.len());
    for (k, &n) in settings.n_values.iter().enumerate() {
        let chunk = &records[k * settings.trials_per_n as usize..(k + 1) * settings.trials_per_n as usize];
        let trials = chunk.len() as u64;
        let successes = chunk.iter().filter(|r| r.data_out).count() as u64;
        let (ci_lo, ci_hi) = wilson_interval(successes, trials, Z_95);
        points.push(CurvePoint {
            n,
            t_ns: ctx.scheduled_ps(n) as f64 / 1000.0,
            trials,
            successes,
            p_hat: successes as f64 / trials as f64,
            ci_lo,
            ci_hi,
        });
    }
    let curve = ProbabilityCurve::from_counts(points, settings.decoherence_enabled);
    let first_trace = match (trace_first, jobs.first()) {
        (true, Some(&(n, i))) => Some(ctx.run_trial_traced(n, i)?.1),
        _ => None,
    };
    Ok(SweepOutput { curve, records, first_trace })
}

/// Sidecar path: `out.csv` → `out.meta.toml`.
pub fn metadata_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("meta.toml")
}

/// Resolved configuration plus run results, as TOML.
pub fn write_metadata(ctx: &TrialContext, curve: &ProbabilityCurve) -> std::result::Result<String, ConfigError> {
    let mut doc: toml::Table = toml::from_str(&Config::to_toml_string(&ctx.config)?)?;
    let mut run = toml::Table::new();
    let tls = &ctx.model.two_level;
    run.insert("interval_method".into(), curve.interval_method.into());
    run.insert("jtl_delay_ps".into(), (ctx.budget.jtl_delay_ps as i64).into());
    run.insert("solved_frequency_hz".into(), tls.oscillation_frequency.into());
    run.insert("circulating_current_a".into(), tls.i_circ.into());
    if let Some(f) = curve.fitted_frequency() {
        run.insert("fitted_frequency_hz".into(), f.into());
    }
    if let Some(tau) = curve.fitted_decay().filter(|t| t.is_finite()) {
        run.insert("fitted_decay_s".into(), tau.into());
    }
    if let Some(e) = &curve.fit_error {
        run.insert("fit_error".into(), e.clone().into());
    }
    doc.insert("run".into(), run.into());
    Ok(toml::to_string(&doc)?)
}
