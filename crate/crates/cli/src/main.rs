mod args;
mod audit_all;
mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::*;
use crate::output::{emit, Format, Provenance};

/// Pair correlations of dilated integer sets, additive energy and exact
/// audits of the bounds around them.
#[derive(Parser, Debug)]
#[command(name = "paircorr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; CSV unless the command only has a JSON form.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Additive energy of `A ∩ [1, X]`.
    Energy(EnergyArgs),
    /// Pair correlation `F(α, s, X)`.
    Corr(CorrArgs),
    /// `F` along a grid of truncations.
    Scan(ScanArgs),
    /// The gcd-restricted surrogate `F*` next to `F`.
    Fstar(FstarArgs),
    /// Moments of `1 − Φ(n)/n`.
    AuditPhi(AuditPhiArgs),
    /// Arc intersection measure against its overlap bound.
    AuditOverlap(AuditOverlapArgs),
    /// `Σ_n Σ_{m <= n} A(m, n)/n` against `X log T`.
    AuditAvgOverlap(AuditAvgOverlapArgs),
    /// Exact `∫|F − F*|`.
    AuditL1(AuditL1Args),
    /// `S1`, `S2`, `S3` and a Monte Carlo variance of `F*`.
    AuditVariance(AuditVarianceArgs),
    /// Samples from the random model.
    RandomSim(RandomArgs),
    /// Concentration of `N` and `max r(n)` for random sets.
    Concentration(ConcentrationArgs),
    /// `E (log N)(log log N)^C / N³` across a grid.
    EnergyScaling(ScalingArgs),
    /// Continued fraction expansion.
    Cf(CfArgs),
    /// Integers `M` with `‖Mα‖ < 1/(M 𝓛(M))`.
    Witnesses(WitnessArgs),
    /// Search for `F(N) > 3s` along witnesses.
    Divergence(DivergenceArgs),
    /// Every invariant check, with a pass/fail line each.
    AuditAll(audit_all::AuditAllArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Energy(_) => "energy",
            Command::Corr(_) => "corr",
            Command::Scan(_) => "scan",
            Command::Fstar(_) => "fstar",
            Command::AuditPhi(_) => "audit-phi",
            Command::AuditOverlap(_) => "audit-overlap",
            Command::AuditAvgOverlap(_) => "audit-avg-overlap",
            Command::AuditL1(_) => "audit-l1",
            Command::AuditVariance(_) => "audit-variance",
            Command::RandomSim(_) => "random-sim",
            Command::Concentration(_) => "concentration",
            Command::EnergyScaling(_) => "energy-scaling",
            Command::Cf(_) => "cf",
            Command::Witnesses(_) => "witnesses",
            Command::Divergence(_) => "divergence",
            Command::AuditAll(_) => "audit-all",
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Energy(a) => a.set.random.then_some(a.set.seed),
            Command::Corr(a) => a.set.random.then_some(a.set.seed),
            Command::Scan(a) => a.set.random.then_some(a.set.seed),
            Command::Fstar(a) => a.set.random.then_some(a.set.seed),
            Command::AuditL1(a) => a.set.random.then_some(a.set.seed),
            Command::AuditVariance(a) => Some(a.set.seed),
            Command::Divergence(a) => a.set.random.then_some(a.set.seed),
            Command::RandomSim(a) => Some(a.seed),
            Command::Concentration(a) => Some(a.seed),
            Command::EnergyScaling(a) => Some(a.seed),
            Command::AuditAll(a) => Some(a.seed),
            _ => None,
        }
    }
}

/// Status for a completed run whose audit found a failing check.
const AUDIT_FAILED: u8 = 4;

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("PAIRCORR_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| paircorr_core::Error::InvalidParameter(format!("PAIRCORR_THREADS={v:?} is not a count")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    configure_threads()?;
    let (report, ok) = match &cli.command {
        Command::Energy(a) => (energy_cmd(a)?, true),
        Command::Corr(a) => (corr_cmd(a)?, true),
        Command::Scan(a) => (scan_cmd(a)?, true),
        Command::Fstar(a) => (fstar_cmd(a)?, true),
        Command::AuditPhi(a) => (audit_phi_cmd(a)?, true),
        Command::AuditOverlap(a) => (audit_overlap_cmd(a)?, true),
        Command::AuditAvgOverlap(a) => (audit_avg_overlap_cmd(a)?, true),
        Command::AuditL1(a) => (audit_l1_cmd(a)?, true),
        Command::AuditVariance(a) => (audit_variance_cmd(a)?, true),
        Command::RandomSim(a) => (random_sim_cmd(a)?, true),
        Command::Concentration(a) => (concentration_cmd(a)?, true),
        Command::EnergyScaling(a) => (energy_scaling_cmd(a)?, true),
        Command::Cf(a) => (cf_cmd(a)?, true),
        Command::Witnesses(a) => (witnesses_cmd(a)?, true),
        Command::Divergence(a) => (divergence_cmd(a)?, true),
        Command::AuditAll(a) => audit_all::audit_all(a)?,
    };
    let format = cli.format.unwrap_or(if report.csv.is_some() { Format::Csv } else { Format::Json });
    let prov = Provenance { command: cli.command.name(), seed: cli.command.seed(), flags: format!("{:?}", cli.command) };
    emit(&report.render(&prov, format)?, cli.out.as_deref())?;
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(AUDIT_FAILED),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
