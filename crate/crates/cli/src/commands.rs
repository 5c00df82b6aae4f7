use anyhow::bail;
use clap::{Args, ValueEnum};
use paircorr_core::arith::{fmt_ratio, Rat};
use paircorr_core::diophantine::{
    cf_expand, divergence_demo, khintchine_witnesses, khintchine_witnesses_brute, DemoParams,
};
use paircorr_core::paircorr::{
    corr_scan, pair_corr_direct, pair_corr_via_r, AlphaValue, CorrelationParams, ScanRow,
};
use paircorr_core::randmodel::{
    concentration_with, energy_scaling, expected_len, len_variance, sample_model_set, Baselines, RandomModelParams,
};
use paircorr_core::rng::derive_seed;
use paircorr_core::schmidt::{
    avg_overlap_audit, f_star, l1_distance_exact, overlap_measure_audit, overlap_sweep, phi_moment_audit,
    variance_components, variance_mc, BoundAudit, SchmidtConfig,
};
use paircorr_core::setcore::{diff_rep, energy, EnergyMethod, BRUTE_MAX_LEN};
use paircorr_core::Error;
use serde_json::{json, Value};

use crate::args::{exact_alpha, parse_alpha, parse_count, parse_s, SetArgs};
use crate::output::Report;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    All,
    QuadrupleBrute,
    SumHistogram,
    DifferenceIdentity,
    Fft,
}

#[derive(Args, Debug, Clone)]
pub struct EnergyArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long = "X", value_parser = parse_count)]
    pub x: u64,
    /// `all` runs every applicable method and checks that they agree.
    #[arg(long, value_enum, default_value = "all")]
    pub method: MethodChoice,
}

pub fn energy_cmd(a: &EnergyArgs) -> anyhow::Result<Report> {
    let set = a.set.set(a.x)?;
    let methods: Vec<EnergyMethod> = match a.method {
        MethodChoice::All => EnergyMethod::ALL.into_iter().filter(|m| *m != EnergyMethod::QuadrupleBrute || set.len() <= BRUTE_MAX_LEN).collect(),
        MethodChoice::QuadrupleBrute => vec![EnergyMethod::QuadrupleBrute],
        MethodChoice::SumHistogram => vec![EnergyMethod::SumHistogram],
        MethodChoice::DifferenceIdentity => vec![EnergyMethod::DifferenceIdentity],
        MethodChoice::Fft => vec![EnergyMethod::Fft],
    };
    let reports = methods.into_iter().map(|m| energy(&set, m)).collect::<Result<Vec<_>, _>>()?;
    if reports.windows(2).any(|w| w[0].energy != w[1].energy) {
        bail!("energy methods disagree: {:?}", reports.iter().map(|r| (r.method.name(), r.energy)).collect::<Vec<_>>());
    }
    let mut csv = vec!["method,X,N,E,E_tilde".to_string()];
    csv.extend(reports.iter().map(|r| format!("{},{},{},{},{}", r.method.name(), r.bound, r.set_len, r.energy, fmt_ratio(&r.normalized))));
    Ok(Report::new(csv, Value::Array(reports.iter().map(|r| r.to_json()).collect())))
}

#[derive(Args, Debug, Clone)]
pub struct CorrArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long = "X", value_parser = parse_count)]
    pub x: u64,
    /// `p/q` for exact evaluation, or a decimal.
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: AlphaValue,
    #[arg(long, value_parser = parse_s, default_value = "1")]
    pub s: Rat,
}

fn scan_json(rows: &[ScanRow]) -> Value {
    serde_json::to_value(rows).expect("rows serialize")
}

pub fn corr_cmd(a: &CorrArgs) -> anyhow::Result<Report> {
    let set = a.set.set(a.x)?;
    let params = CorrelationParams::new(a.alpha, a.s, a.x)?;
    let v = pair_corr_direct(&set, &params)?;
    if a.alpha.is_exact() {
        let via = pair_corr_via_r(&diff_rep(&set)?, &params)?;
        if via != v {
            bail!("direct count {} and count via r(n) {} differ", v.count, via.count);
        }
    }
    let two_s = 2.0 * *a.s.numer() as f64 / *a.s.denom() as f64;
    let row = ScanRow {
        bound: a.x,
        set_len: v.set_len,
        count: v.count,
        value: fmt_ratio(&v.value()),
        value_f64: v.to_f64(),
        deviation: (v.to_f64() - two_s).abs(),
    };
    Ok(Report::new(vec![ScanRow::CSV_HEADER.into(), row.to_csv()], scan_json(&[row])))
}

#[derive(Args, Debug, Clone)]
pub struct ScanArgs {
    #[command(flatten)]
    pub set: SetArgs,
    /// Increasing truncation points, comma separated (`2^10,2^12,...`).
    #[arg(long = "X-grid", value_parser = parse_count, value_delimiter = ',', required = true)]
    pub x_grid: Vec<u64>,
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: AlphaValue,
    #[arg(long, value_parser = parse_s, default_value = "1")]
    pub s: Rat,
}

pub fn scan_cmd(a: &ScanArgs) -> anyhow::Result<Report> {
    let rows = corr_scan(&a.set.source()?, a.alpha, a.s, &a.x_grid)?;
    let mut csv = vec![ScanRow::CSV_HEADER.to_string()];
    csv.extend(rows.iter().map(ScanRow::to_csv));
    Ok(Report::new(csv, scan_json(&rows)))
}

#[derive(Args, Debug, Clone)]
pub struct FstarArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long = "X", value_parser = parse_count)]
    pub x: u64,
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: AlphaValue,
    #[arg(long, value_parser = parse_s, default_value = "1")]
    pub s: Rat,
    #[arg(long = "T")]
    pub t: f64,
}

pub fn fstar_cmd(a: &FstarArgs) -> anyhow::Result<Report> {
    let set = a.set.set(a.x)?;
    let cfg = SchmidtConfig::for_set(&set, a.t, a.s)?;
    let fs = f_star(&set, &a.alpha, &cfg)?;
    let f = pair_corr_direct(&set, &CorrelationParams::new(a.alpha, a.s, a.x)?)?;
    let csv = vec![
        "X,N,T,count_star,F_star,count,F".to_string(),
        format!("{},{},{},{},{},{},{}", a.x, fs.set_len, a.t, fs.count, fmt_ratio(&fs.value()), f.count, fmt_ratio(&f.value())),
    ];
    let json = json!({
        "X": a.x, "N": fs.set_len, "T": a.t,
        "count_star": fs.count, "F_star": fmt_ratio(&fs.value()),
        "count": f.count, "F": fmt_ratio(&f.value()),
    });
    Ok(Report::new(csv, json))
}

fn audit_report(audits: &[BoundAudit]) -> Report {
    let mut csv = vec![BoundAudit::CSV_HEADER.to_string()];
    csv.extend(audits.iter().map(BoundAudit::to_csv));
    Report::new(csv, serde_json::to_value(audits).expect("audits serialize"))
}

#[derive(Args, Debug, Clone)]
pub struct AuditPhiArgs {
    #[arg(long = "X", value_parser = parse_count)]
    pub x: u64,
    /// One or more thresholds, comma separated.
    #[arg(long = "T", value_delimiter = ',', required = true)]
    pub t: Vec<f64>,
    /// 1 or 2; both when omitted.
    #[arg(long)]
    pub order: Option<u32>,
}

pub fn audit_phi_cmd(a: &AuditPhiArgs) -> anyhow::Result<Report> {
    let orders = a.order.map_or(vec![1, 2], |o| vec![o]);
    let mut audits = Vec::new();
    for &t in &a.t {
        for &o in &orders {
            audits.push(phi_moment_audit(a.x, t, o)?);
        }
    }
    Ok(audit_report(&audits))
}

#[derive(Args, Debug, Clone)]
pub struct AuditOverlapArgs {
    /// Single case `n >= m`; without `--n`/`--m` every pair up to `--n-max`.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long = "n-max", default_value_t = 200)]
    pub n_max: u64,
    #[arg(long, value_parser = parse_s, default_value = "1")]
    pub s: Rat,
    #[arg(long = "N", default_value_t = 1000)]
    pub big_n: u64,
    #[arg(long = "T")]
    pub t: f64,
}

pub fn audit_overlap_cmd(a: &AuditOverlapArgs) -> anyhow::Result<Report> {
    let cfg = SchmidtConfig::new(a.t, a.s, a.big_n, a.n_max.max(a.n.unwrap_or(1)))?;
    match (a.n, a.m) {
        (Some(n), Some(m)) => Ok(audit_report(&[overlap_measure_audit(n, m, &cfg)?])),
        (None, None) => {
            let (cases, bad) = overlap_sweep(a.n_max, &cfg)?;
            let mut csv = vec!["n_max,s,N,T,cases,violations".to_string()];
            csv.push(format!("{},{},{},{},{},{}", a.n_max, fmt_ratio(&a.s), a.big_n, a.t, cases, bad.len()));
            csv.extend(bad.iter().map(|b| format!("# violation n={} m={} lhs={} rhs={}", b.n, b.m, b.lhs, b.rhs)));
            let json = json!({ "n_max": a.n_max, "s": fmt_ratio(&a.s), "N": a.big_n, "T": a.t, "cases": cases, "violations": bad });
            Ok(Report::new(csv, json))
        }
        _ => Err(Error::InvalidParameter("give both --n and --m, or neither".into()).into()),
    }
}

#[derive(Args, Debug, Clone)]
pub struct AuditAvgOverlapArgs {
    #[arg(long = "X", value_parser = parse_count)]
    pub x: u64,
    #[arg(long = "T", value_delimiter = ',', required = true)]
    pub t: Vec<f64>,
    /// Allow `X` above the quadratic-cost guard.
    #[arg(long)]
    pub force: bool,
}

pub fn audit_avg_overlap_cmd(a: &AuditAvgOverlapArgs) -> anyhow::Result<Report> {
    let audits = a.t.iter().map(|&t| avg_overlap_audit(a.x, t, a.force)).collect::<Result<Vec<_>, _>>()?;
    Ok(audit_report(&audits))
}

#[derive(Args, Debug, Clone)]
pub struct AuditL1Args {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long = "X", value_parser = parse_count)]
    pub x: u64,
    #[arg(long, value_parser = parse_s, default_value = "1")]
    pub s: Rat,
    #[arg(long = "T")]
    pub t: f64,
}

pub fn audit_l1_cmd(a: &AuditL1Args) -> anyhow::Result<Report> {
    let set = a.set.set(a.x)?;
    let cfg = SchmidtConfig::for_set(&set, a.t, a.s)?;
    let r = l1_distance_exact(&set, &cfg)?;
    let mut rep = audit_report(std::slice::from_ref(&r.audit));
    rep.json = json!({
        "audit": r.audit,
        "integral_F": paircorr_core::schmidt::fmt_big(&r.integral_f),
        "integral_F_star": paircorr_core::schmidt::fmt_big(&r.integral_f_star),
        "distance": paircorr_core::schmidt::fmt_big(&r.distance),
    });
    Ok(rep)
}

#[derive(Args, Debug, Clone)]
pub struct AuditVarianceArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long = "X", value_parser = parse_count)]
    pub x: u64,
    #[arg(long, value_parser = parse_s, default_value = "1")]
    pub s: Rat,
    /// Defaults to `(Ẽδ)^{−1/4} + 1`.
    #[arg(long = "T")]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// Allow supports of `r` above the quadratic-cost guard.
    #[arg(long)]
    pub force: bool,
}

pub fn audit_variance_cmd(a: &AuditVarianceArgs) -> anyhow::Result<Report> {
    let set = a.set.set(a.x)?;
    let t = match a.t {
        Some(t) => t,
        None => {
            let e = energy(&set, EnergyMethod::DifferenceIdentity)?.normalized_f64();
            let delta = set.len() as f64 / a.x as f64;
            (e * delta).powf(-0.25) + 1.0
        }
    };
    let cfg = SchmidtConfig::for_set(&set, t, a.s)?;
    let comps = variance_components(&set, &cfg, a.force)?;
    let exponent = a.set.random.then_some(a.set.c);
    let mc = variance_mc(&set, &cfg, a.samples, a.set.seed, exponent)?;
    let mut audits = vec![
        BoundAudit::exact("S1", format!("T={t}"), &comps.s1, 1.0),
        BoundAudit::approx("S2_chain", format!("T={t}"), comps.chain[2], comps.chain_shape),
    ];
    audits.extend(mc.audits(&cfg));
    let mut rep = audit_report(&audits);
    rep.csv_footer = vec![
        format!("S2: {}", comps.s2),
        format!("S2 chain: {:?}", comps.chain),
        format!("mean F: {} (exact {})", mc.f.mean, mc.mean_f_exact),
        format!("mean F*: {} (exact {})", mc.f_star.mean, mc.mean_f_star_exact),
    ];
    rep.json = json!({ "T": t, "components": comps.to_json(), "monte_carlo": mc, "audits": audits });
    Ok(rep)
}

#[derive(Args, Debug, Clone)]
pub struct RandomArgs {
    #[arg(long = "C", default_value_t = 3.0)]
    pub c: f64,
    #[arg(long = "X", value_parser = parse_count)]
    pub x: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
}

pub fn random_sim_cmd(a: &RandomArgs) -> anyhow::Result<Report> {
    let base = RandomModelParams::new(a.c, a.seed)?;
    let expected = expected_len(a.x, a.c);
    let sd = len_variance(a.x, a.c).sqrt();
    let mut csv = vec!["trial,seed,X,N,expected_N,E,E_tilde".to_string()];
    let mut rows = Vec::new();
    for t in 0..a.trials {
        let seed = derive_seed(a.seed, t);
        let set = sample_model_set(a.x, &base.with_seed(seed))?;
        let e = energy(&set, EnergyMethod::Fft)?;
        csv.push(format!("{t},{seed},{},{},{expected},{},{}", a.x, set.len(), e.energy, fmt_ratio(&e.normalized)));
        rows.push(json!({ "trial": t, "seed": seed, "X": a.x, "N": set.len(), "E": e.energy.to_string(), "E_tilde": fmt_ratio(&e.normalized) }));
    }
    let mut rep = Report::new(csv, json!({ "expected_N": expected, "sd_N": sd, "trials": rows }));
    rep.csv_footer = vec![format!("sd_N: {sd}")];
    Ok(rep)
}

#[derive(Args, Debug, Clone)]
pub struct ConcentrationArgs {
    #[arg(long = "C", default_value_t = 3.0)]
    pub c: f64,
    #[arg(long = "X", value_parser = parse_count)]
    pub x: u64,
    #[arg(long, default_value_t = 0.5)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
}

pub fn concentration_cmd(a: &ConcentrationArgs) -> anyhow::Result<Report> {
    let base = RandomModelParams::new(a.c, a.seed)?;
    let baselines = Baselines::new(a.x, a.c);
    let mut csv = vec!["trial,N,p1_ratio,p1_ok,p1_literal_ratio,p1_literal_ok,max_r,p2_bound,p2_ok,p2_literal_bound,p2_literal_ok,min_r_third,lower_bound,lower_ok".to_string()];
    let mut reports = Vec::new();
    for t in 0..a.trials {
        let set = sample_model_set(a.x, &base.with_seed(derive_seed(a.seed, t)))?;
        let r = concentration_with(&set, &baselines, a.epsilon)?;
        csv.push(format!(
            "{t},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.set_len, r.property1_ratio, r.property1_ok, r.property1_literal_ratio, r.property1_literal_ok, r.max_rep,
            r.property2_bound, r.property2_ok, r.property2_literal_bound, r.property2_literal_ok, r.min_rep_lower_third,
            r.lower_bound, r.lower_bound_ok
        ));
        reports.push(r);
    }
    let frac = |f: &dyn Fn(&paircorr_core::randmodel::ConcentrationReport) -> bool| reports.iter().filter(|r| f(r)).count() as f64 / reports.len() as f64;
    let summary = json!({
        "property1_rate": frac(&|r| r.property1_ok),
        "property2_rate": frac(&|r| r.property2_ok),
        "property1_literal_rate": frac(&|r| r.property1_literal_ok),
        "property2_literal_rate": frac(&|r| r.property2_literal_ok),
        "lower_bound_rate": frac(&|r| r.lower_bound_ok),
        "sum_psi": baselines.sum_psi,
        "sum_psi_sq": baselines.sum_psi_sq,
    });
    let mut rep = Report::new(csv, json!({ "summary": summary, "trials": reports }));
    rep.csv_footer = vec![format!("summary: {summary}")];
    Ok(rep)
}

#[derive(Args, Debug, Clone)]
pub struct ScalingArgs {
    #[arg(long = "C", default_value_t = 3.0)]
    pub c: f64,
    #[arg(long = "X-grid", value_parser = parse_count, value_delimiter = ',', required = true)]
    pub x_grid: Vec<u64>,
    #[arg(long, default_value_t = 5)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn energy_scaling_cmd(a: &ScalingArgs) -> anyhow::Result<Report> {
    let s = energy_scaling(a.c, &a.x_grid, a.trials, a.seed)?;
    let mut csv = vec!["X,trial,N,E,ratio".to_string()];
    csv.extend(s.rows.iter().map(|r| format!("{},{},{},{},{}", r.bound, r.trial, r.set_len, r.energy, r.ratio)));
    let mut rep = Report::new(csv, serde_json::to_value(&s)?);
    rep.csv_footer = vec![
        format!("min_ratio: {}", s.min_ratio),
        format!("median_ratio: {}", s.median_ratio),
        format!("max_ratio: {}", s.max_ratio),
        format!("median_drift: {}", s.median_drift),
    ];
    Ok(rep)
}

#[derive(Args, Debug, Clone)]
pub struct CfArgs {
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: AlphaValue,
    #[arg(long, default_value_t = 40)]
    pub depth: usize,
}

pub fn cf_cmd(a: &CfArgs) -> anyhow::Result<Report> {
    let cf = cf_expand(&a.alpha, a.depth)?;
    let mut csv = vec!["k,a_k,p_k,q_k".to_string()];
    csv.extend(cf.quotients.iter().zip(&cf.convergents).enumerate().map(|(k, (a, (p, q)))| format!("{k},{a},{p},{q}")));
    let mut rep = Report::new(csv, serde_json::to_value(&cf)?);
    rep.csv_footer = vec![format!("truncated: {}", cf.truncated)];
    Ok(rep)
}

#[derive(Args, Debug, Clone)]
pub struct WitnessArgs {
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: AlphaValue,
    /// Number of iterated logarithms in `𝓛`.
    #[arg(long, default_value_t = 1)]
    pub depth: u32,
    #[arg(long = "M-max", value_parser = parse_count, default_value = "100000")]
    pub m_max: u64,
    /// Also scan every `M <= min(M_max, 10^5)` and require the same list.
    #[arg(long)]
    pub check: bool,
}

pub fn witnesses_cmd(a: &WitnessArgs) -> anyhow::Result<Report> {
    let w = khintchine_witnesses(&a.alpha, a.depth, a.m_max)?;
    if a.check {
        let limit = a.m_max.min(paircorr_core::diophantine::BRUTE_LIMIT);
        let fast: Vec<_> = w.iter().filter(|x| x.m <= limit).copied().collect();
        if fast != khintchine_witnesses_brute(&a.alpha, a.depth, limit) {
            bail!("convergent search and brute-force scan disagree below {limit}");
        }
    }
    let mut csv = vec!["M,dist,L".to_string()];
    csv.extend(w.iter().map(|x| format!("{},{},{}", x.m, x.dist, x.l_value)));
    Ok(Report::new(csv, json!({ "alpha": a.alpha.to_string(), "depth": a.depth, "witnesses": w })))
}

#[derive(Args, Debug, Clone)]
pub struct DivergenceArgs {
    #[command(flatten)]
    pub set: SetArgs,
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: AlphaValue,
    #[arg(long, value_parser = parse_s, default_value = "1")]
    pub s: Rat,
    #[arg(long, default_value_t = 1)]
    pub depth: u32,
    #[arg(long = "N-max", value_parser = parse_count, default_value = "100000")]
    pub n_max: u64,
}

pub fn divergence_cmd(a: &DivergenceArgs) -> anyhow::Result<Report> {
    let alpha = exact_alpha(a.alpha)?;
    let params = DemoParams::new(a.s, a.set.c, a.depth, a.n_max)?;
    let r = divergence_demo(&a.set.source()?, &alpha, &params)?;
    Ok(Report::json_only(serde_json::to_value(&r)?))
}

/// Maps a failure to the documented exit status.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<Error>() {
        Some(Error::InvalidParameter(_) | Error::Parse(_)) => 1,
        Some(Error::ResourceGuard(_)) => 3,
        Some(_) => 2,
        None if err.downcast_ref::<std::io::Error>().is_some() => 1,
        None => 2,
    }
}

