use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mqc_core::experiment::{self, metadata_path, TrialContext};
use mqc_core::qubit::QubitModel;
use mqc_core::{Config, Error, ProtocolError};

/// Simulate the rf-SQUID coherence experiment and its SFQ control circuit.
#[derive(Debug, Parser)]
#[command(name = "mqc", version)]
struct Cli {
    /// TOML configuration file; every key is optional.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Trials per programmed delay.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Output file for the command's CSV; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Enable exponential dephasing with the device's decoherence time.
    #[arg(long, global = true)]
    decohere: bool,
    /// Worker threads for sweeps; 0 uses every core.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the spectrum; writes `phi,V,psi0,psi1`.
    Levels,
    /// Check the operating-regime inequalities.
    Regime {
        /// Print a CSV header and row instead of text.
        #[arg(long)]
        csv: bool,
    },
    /// Run the protocol for every n and tabulate the measurement delay.
    Timing,
    /// Full experiment: P("1") against delay, with fit.
    Sweep {
        /// Write the first trial's event trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Drain the TFF chain from every starting count.
    DrainTest,
}

fn load_config(cli: &Cli) -> Result<Config, Error> {
    let mut config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let e = &mut config.experiment;
    if let Some(seed) = cli.seed {
        e.rng_seed = seed;
    }
    if let Some(trials) = cli.trials {
        e.trials_per_n = trials;
    }
    if let Some(workers) = cli.workers {
        e.workers = workers;
    }
    if cli.decohere {
        e.decoherence_enabled = true;
    }
    if cli.out.is_some() {
        e.output_path = cli.out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn levels(config: &Config, out: Option<&Path>) -> Result<(), Error> {
    let model = QubitModel::solve(config.device, config.grid.to_grid()?)?;
    let e0 = model.solution.energies[0];
    let h = mqc_core::PhysicalConstants::STANDARD.h;
    for (k, e) in model.solution.energies.iter().enumerate() {
        eprintln!("E{k} = {e:.6e} J  ({:.6} GHz above E0)", (e - e0) / h * 1e-9);
    }
    let tls = &model.two_level;
    eprintln!("deltaE/h = {:.6} GHz, (E2-E1)/deltaE = {:.2}", tls.oscillation_frequency * 1e-9, tls.separation_ratio);
    let mut w = output(out)?;
    model.write_levels_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn regime(config: &Config, csv: bool) -> Result<(), Error> {
    let summary = experiment::report_regime(config)?;
    if csv {
        println!("{}", summary.csv_header());
        println!("{}", summary.csv_row());
    } else {
        print!("{}", summary.to_text());
    }
    Ok(())
}

fn timing(config: &Config, out: Option<&Path>) -> Result<(), Error> {
    let rows = experiment::timing_table(config)?;
    let mut w = output(out)?;
    writeln!(w, "n,expected_ps,measured_ps,t_ns")?;
    for r in &rows {
        writeln!(w, "{},{},{},{:.1}", r.n, r.expected_ps, r.measured_ps, r.measured_ps as f64 / 1000.0)?;
    }
    w.flush()?;
    if let Some(bad) = rows.iter().find(|r| r.measured_ps != r.expected_ps) {
        return Err(ProtocolError::TimingViolation { measured_ps: bad.measured_ps, expected_ps: bad.expected_ps }.into());
    }
    Ok(())
}

fn sweep(config: &Config, out: Option<&Path>, trace: Option<&Path>) -> Result<(), Error> {
    let ctx = TrialContext::new(config)?;
    let result = experiment::run_sweep(&ctx, trace.is_some())?;
    let curve = &result.curve;
    let mut w = output(out)?;
    curve.write_csv(&mut w)?;
    w.flush()?;
    if let Some(path) = out {
        std::fs::write(metadata_path(path), experiment::write_metadata(&ctx, curve)?)?;
    }
    if let (Some(path), Some(text)) = (trace, &result.first_trace) {
        std::fs::write(path, text)?;
    }
    eprintln!("solved deltaE/h = {:.6} GHz", ctx.model.two_level.oscillation_frequency * 1e-9);
    match (&curve.fit, &curve.fit_error) {
        (Some(fit), _) => {
            eprintln!("fitted f = {:.6} GHz, amplitude {:.4}", fit.model.frequency * 1e-9, fit.model.amplitude);
            if let Some(tau) = fit.model.decay {
                eprintln!("fitted tau = {:.4} ns", tau * 1e9);
            }
        }
        (None, Some(e)) => eprintln!("fit failed: {e}"),
        (None, None) => {}
    }
    Ok(())
}

fn drain_test(config: &Config, out: Option<&Path>) -> Result<(), Error> {
    let rows = experiment::drain_table(config)?;
    let mut w = output(out)?;
    writeln!(w, "k,pulses")?;
    for (k, pulses) in &rows {
        writeln!(w, "{k},{pulses}")?;
    }
    w.flush()?;
    if let Some((k, pulses)) = rows.iter().find(|(k, p)| k != p) {
        return Err(ProtocolError::Hygiene(format!("drain from {} took {pulses} pulses, expected {k}", 128 - k)).into());
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Error> {
    let config = load_config(cli)?;
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Levels => levels(&config, out),
        Command::Regime { csv } => regime(&config, *csv),
        Command::Timing => timing(&config, out),
        Command::Sweep { trace } => sweep(&config, out, trace.as_deref()),
        Command::DrainTest => drain_test(&config, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let category = e.category();
            eprintln!("error [{}]: {e}", category.label());
            ExitCode::from(category.exit_code() as u8)
        }
    }
}
