use clap::Args;
use paircorr_core::arith::{gcd, Rat, Threshold};
use paircorr_core::diophantine::{
    cf_expand, check_witness, divergence_demo, khintchine_witnesses, khintchine_witnesses_brute, DemoParams,
};
use paircorr_core::paircorr::{
    check_sandwich, mean_corr_exact, mean_corr_mc, pair_corr_direct, pair_corr_via_r, sandwich_ratio,
    sandwich_schedule, AlphaValue, CorrelationParams,
};
use paircorr_core::randmodel::{expected_len, len_variance, psi, sample_model_set, RandomModelParams};
use paircorr_core::rng::{derive_seed, streams, CounterRng};
use paircorr_core::schmidt::{
    avg_overlap_audit, en_arcs, en_measure_formula, overlap_brute, overlap_count, overlap_sweep, phi_brute,
    phi_deficits, phi_moment_audit, phi_t, variance_components, variance_mc, FStarEvaluator, SchmidtConfig,
};
use paircorr_core::setcore::{
    diff_rep, energy, gallery, random_test_set, EnergyMethod, GalleryKind, IntegerSet, SetSource, BRUTE_MAX_LEN,
};
use serde::Serialize;
use serde_json::json;

use crate::args::parse_count;
use crate::output::Report;

#[derive(Args, Debug, Clone)]
pub struct AuditAllArgs {
    #[arg(long = "X", value_parser = parse_count, default_value = "1000")]
    pub x: u64,
    #[arg(long = "T", default_value_t = 8.0)]
    pub t: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Monte Carlo samples for the integral checks.
    #[arg(long, default_value_t = 4000)]
    pub samples: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub id: &'static str,
    pub module: &'static str,
    pub statement: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = anyhow::Result<(bool, String)>;

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn run(&mut self, id: &'static str, module: &'static str, statement: &'static str, f: impl FnOnce() -> Outcome) {
        let (passed, detail) = match f() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        self.checks.push(Check { id, module, statement, passed, detail: detail.replace(',', ";") });
    }
}

fn rng(seed: u64, tag: u64) -> CounterRng {
    CounterRng::new(derive_seed(seed, tag), streams::PARAMS)
}

/// A random reduced `p/q` with `q <= q_max`.
fn random_alpha(r: &CounterRng, index: u64, q_max: u64) -> AlphaValue {
    let q = 1 + r.below(2 * index, q_max);
    AlphaValue::rational(r.below(2 * index + 1, q), q).expect("q >= 1")
}

fn random_s(r: &CounterRng, index: u64) -> Rat {
    Rat::new(1 + r.below(index, 12), 1 + r.below(index + 1_000_000, 4))
}

fn sets(seed: u64, count: u64, max_bound: u64) -> anyhow::Result<Vec<IntegerSet>> {
    Ok((0..count).map(|i| random_test_set(seed, i, max_bound)).collect::<Result<_, _>>()?)
}

pub fn audit_all(a: &AuditAllArgs) -> anyhow::Result<(Report, bool)> {
    let (x, t, seed) = (a.x, a.t, a.seed);
    Threshold::new(t)?;
    let mut s = Suite { checks: Vec::new() };

    s.run("setcore.energy_methods", "setcore", "all energy routes agree exactly on random sets with X <= 500", || {
        let mut n = 0;
        for set in sets(seed, 40, 500)?.iter().filter(|s| !s.is_empty()) {
            let e: Vec<u128> = EnergyMethod::ALL
                .into_iter()
                .filter(|m| *m != EnergyMethod::QuadrupleBrute || set.len() <= BRUTE_MAX_LEN)
                .map(|m| energy(set, m).map(|r| r.energy))
                .collect::<Result<_, _>>()?;
            if e.windows(2).any(|w| w[0] != w[1]) {
                return Ok((false, format!("disagreement at X={}", set.bound())));
            }
            n += 1;
        }
        Ok((true, format!("{n} sets")))
    });

    s.run("setcore.identity_and_totals", "setcore", "E = N^2 + 2 sum r(n)^2 and sum r(n) = N(N-1)/2 with E/N^3 <= 1", || {
        for set in sets(seed, 40, 2000)?.iter().filter(|s| !s.is_empty()) {
            let r = diff_rep(set)?;
            let n = set.len() as u128;
            let e = energy(set, EnergyMethod::SumHistogram)?;
            let ok = r.total() as u128 == n * (n - 1) / 2 && e.energy == n * n + 2 * r.sum_of_squares()? && e.energy <= n * n * n;
            if !ok {
                return Ok((false, format!("failure at X={}", set.bound())));
            }
        }
        Ok((true, "40 sets".into()))
    });

    s.run("setcore.interval", "setcore", "the interval has r(n) = X - n and E = (2X^3 + X)/3", || {
        let xi = x.min(2000);
        let set = gallery(GalleryKind::Interval, xi)?;
        let r = diff_rep(&set)?;
        let rep_ok = (1..xi).all(|n| r.get(n) == xi - n);
        let e = energy(&set, EnergyMethod::SumHistogram)?.energy;
        let want = (2 * (xi as u128).pow(3) + xi as u128) / 3;
        Ok((rep_ok && e == want, format!("X={xi} E={e}")))
    });

    s.run("paircorr.direct_vs_r", "paircorr", "direct pair count equals the count through r(n) for rational alpha", || {
        let r = rng(seed, 1);
        let mut n = 0;
        for (i, set) in sets(derive_seed(seed, 1), 150, 2000)?.iter().enumerate().filter(|(_, s)| s.len() >= 2) {
            let p = CorrelationParams::new(random_alpha(&r, i as u64, 100_000), random_s(&r, i as u64), set.bound())?;
            if pair_corr_direct(set, &p)? != pair_corr_via_r(&diff_rep(set)?, &p)? {
                return Ok((false, format!("mismatch at case {i}")));
            }
            n += 1;
        }
        Ok((true, format!("{n} cases")))
    });

    s.run("paircorr.monotone_in_s", "paircorr", "F is nondecreasing in s and equals N - 1 once s/N >= 1/2", || {
        let r = rng(seed, 2);
        for (i, set) in sets(derive_seed(seed, 2), 40, 1000)?.iter().enumerate().filter(|(_, s)| s.len() >= 2) {
            let alpha = random_alpha(&r, i as u64, 10_000);
            let n = set.len() as u64;
            let mut prev = 0;
            for k in 1..=2 * n {
                let c = pair_corr_direct(set, &CorrelationParams::new(alpha, Rat::new(k, 4), set.bound())?)?.count;
                if c < prev {
                    return Ok((false, format!("decrease at case {i}")));
                }
                prev = c;
            }
            if prev != n * (n - 1) {
                return Ok((false, format!("wide window case {i} gave {prev}")));
            }
        }
        Ok((true, "40 sets".into()))
    });

    s.run("paircorr.mean", "paircorr", "Monte Carlo mean of F is within 3 SE of 2s(1 - 1/N)", || {
        let set = gallery(GalleryKind::Squares, x * 10)?;
        let st = mean_corr_mc(&set, Rat::from_integer(1), a.samples, seed)?;
        let exact = mean_corr_exact(set.len(), Rat::from_integer(1));
        let target = *exact.numer() as f64 / *exact.denom() as f64;
        let z = st.z_score(target);
        Ok((z <= 3.0, format!("N={} mean={:.6} target={target:.6} z={z:.3}", set.len(), st.mean)))
    });

    s.run("paircorr.sandwich", "paircorr", "sandwich inequalities hold at every sampled X", || {
        let r = rng(seed, 3);
        let mut n = 0;
        for (g, kind) in [GalleryKind::Interval, GalleryKind::Squares].into_iter().enumerate() {
            let src = SetSource::Gallery(kind);
            let sched = sandwich_schedule(&src, 0.1, 12)?;
            let top = sched.rows.last().expect("rows").bound;
            let set = src.truncate(top)?;
            for i in 0..25u64 {
                let idx = 100 * g as u64 + i;
                let xx = sched.rows[0].bound + r.below(3 * idx, top - sched.rows[0].bound);
                let c = check_sandwich(&set, &sched, random_alpha(&r, 3 * idx + 1, 50_000), random_s(&r, idx), xx)?;
                if !c.ok {
                    return Ok((false, format!("violation at X={xx}")));
                }
                n += 1;
            }
        }
        Ok((true, format!("{n} configurations")))
    });

    s.run("paircorr.ratio_monitor", "paircorr", "N_(j+1)/N_j decreases towards 1", || {
        let r: Vec<f64> = [10, 100, 1000, 10_000, 100_000].iter().map(|&j| sandwich_ratio(j, 0.1)).collect::<Result<_, _>>()?;
        let ok = r.windows(2).all(|w| w[1] < w[0]) && r.iter().all(|&v| v > 1.0);
        Ok((ok, format!("{r:?}")))
    });

    s.run("schmidt.fstar_le_f", "schmidt", "0 <= F* <= F pointwise", || {
        let r = rng(seed, 4);
        let mut n = 0;
        for (i, set) in sets(derive_seed(seed, 4), 60, 800)?.iter().enumerate().filter(|(_, s)| s.len() >= 2) {
            let tt = 2.0 + r.below(7 * i as u64, 40) as f64 / 2.0;
            let cfg = SchmidtConfig::for_set(set, tt, random_s(&r, i as u64))?;
            let ev = FStarEvaluator::new(&diff_rep(set)?, &cfg)?;
            for k in 0..10u64 {
                let alpha = random_alpha(&r, 1000 * (i as u64 + 1) + k, 100_000);
                let (f, fs) = ev.eval(&alpha)?;
                if fs.count > f.count {
                    return Ok((false, format!("F* > F at case {i}")));
                }
                n += 1;
            }
        }
        Ok((true, format!("{n} evaluations")))
    });

    s.run("schmidt.large_threshold", "schmidt", "T >= X gives F* = F away from window boundaries and S1 = 0", || {
        let set = gallery(GalleryKind::Squares, x)?;
        let cfg = SchmidtConfig::for_set(&set, x as f64, Rat::from_integer(1))?;
        let ev = FStarEvaluator::new(&diff_rep(&set)?, &cfg)?;
        let n = set.len() as u64;
        for k in 0..200u64 {
            // q coprime to N keeps ‖nα‖ away from s/N.
            let alpha = AlphaValue::rational(2 * k + 1, 2 * 7919 * n + 1)?;
            let (f, fs) = ev.eval(&alpha)?;
            if f != fs {
                return Ok((false, format!("F != F* at {alpha}")));
            }
        }
        let s1 = variance_components(&set, &cfg, false)?.s1;
        Ok((paircorr_core::schmidt::fmt_big(&s1) == "0", "200 alphas".into()))
    });

    s.run("schmidt.measure_formula", "schmidt", "exact measure of E_n equals (2s/N) Phi(n)/n when N >= 2s", || {
        let mut n = 0;
        for (sv, big_n) in [(Rat::new(1, 2), 1), (Rat::from_integer(1), 2), (Rat::from_integer(3), 100), (Rat::new(7, 3), 1000)] {
            for tt in [2.0, t] {
                let cfg = SchmidtConfig::new(tt, sv, big_n, x)?;
                for k in 1..=150 {
                    if en_arcs(k, &cfg)?.measure() != en_measure_formula(k, &cfg)? {
                        return Ok((false, format!("n={k}")));
                    }
                    n += 1;
                }
            }
        }
        Ok((true, format!("{n} cases")))
    });

    s.run("schmidt.phi_routes", "schmidt", "both Phi routes agree", || {
        for tt in [2.0, 5.0, 50.0, t] {
            let th = Threshold::new(tt)?;
            let table = phi_deficits(x, th);
            for k in 1..=x {
                let b = phi_brute(k, th);
                if b != phi_t(k, th)? || b != k - table[k as usize] {
                    return Ok((false, format!("n={k} T={tt}")));
                }
            }
        }
        Ok((true, format!("n <= {x}")))
    });

    s.run("schmidt.overlap_props", "schmidt", "A(m;n) is symmetric and at most (m;n) and vanishes unless max(m;n)/(m;n) <= T and both routes agree", || {
        for tt in [2.0, 10.0, 100.0] {
            let th = Threshold::new(tt)?;
            for k in 1..=100u64 {
                for m in 1..=100u64 {
                    let v = overlap_count(k, m, th)?;
                    let g = gcd(k, m);
                    let ok = v == overlap_count(m, k, th)? && v == overlap_brute(k, m, th) && v <= g && (v == 0 || th.admits(k.max(m) / g));
                    if !ok {
                        return Ok((false, format!("n={k} m={m} T={tt}")));
                    }
                }
            }
        }
        Ok((true, "m; n <= 100".into()))
    });

    s.run("schmidt.overlap_measure", "schmidt", "arc intersections obey the bound with constant 4", || {
        let mut cases = 0;
        for sv in [Rat::new(1, 2), Rat::from_integer(1), Rat::from_integer(3)] {
            for tt in [2.0, 10.0] {
                let (c, bad) = overlap_sweep(60, &SchmidtConfig::new(tt, sv, 1000, 1000)?)?;
                if !bad.is_empty() {
                    return Ok((false, format!("{} violations", bad.len())));
                }
                cases += c;
            }
        }
        Ok((true, format!("{cases} cases")))
    });

    s.run("schmidt.phi_moments", "schmidt", "first and second deficit moments stay within 2 X/T and 4 X log T/T^2", || {
        let a1 = phi_moment_audit(x, t, 1)?;
        let a2 = phi_moment_audit(x, t, 2)?;
        Ok((a1.ratio <= 2.0 && a2.ratio <= 4.0, format!("ratios {:.4} {:.4}", a1.ratio, a2.ratio)))
    });

    s.run("schmidt.avg_overlap", "schmidt", "average overlap sum stays within 2 X log T", || {
        let au = avg_overlap_audit(x, t, false)?;
        Ok((au.ratio <= 2.0, format!("ratio {:.4}", au.ratio)))
    });

    s.run("schmidt.integrals", "schmidt", "closed forms for the integrals of F* and |F - F*| match Monte Carlo within 3 SE", || {
        let set = gallery(GalleryKind::Squares, x)?;
        let cfg = SchmidtConfig::for_set(&set, t, Rat::from_integer(1))?;
        let mc = variance_mc(&set, &cfg, a.samples, seed, None)?;
        let z1 = mc.f_star.z_score(mc.mean_f_star_exact);
        let z2 = mc.defect.z_score(mc.l1_exact);
        Ok((z1 <= 3.0 && z2 <= 3.0, format!("z(F*)={z1:.3} z(defect)={z2:.3}")))
    });

    s.run("schmidt.variance_chain", "schmidt", "S3 <= S2 and each bound in the S2 chain dominates the previous one", || {
        for (i, set) in sets(derive_seed(seed, 5), 10, 1500)?.iter().enumerate().filter(|(_, s)| s.len() >= 2) {
            let c = variance_components(set, &SchmidtConfig::for_set(set, t, Rat::from_integer(1))?, false)?;
            let s3 = paircorr_core::arith::big_to_f64(&c.s3);
            let l = c.links();
            let tol = 1.0 + 1e-9;
            if s3 > c.s2 * tol || l.windows(2).any(|w| w[0] > w[1] * tol) {
                return Ok((false, format!("case {i}: S3={s3} links={l:?}")));
            }
        }
        Ok((true, "10 sets".into()))
    });

    s.run("randmodel.psi_monotone", "randmodel", "psi is weakly decreasing", || {
        for c in [0.0, 1.0, 3.0] {
            let mut prev = f64::INFINITY;
            for k in 1..=200_000u64 {
                let p = psi(k, c)?;
                if p > prev {
                    return Ok((false, format!("C={c} x={k}")));
                }
                prev = p;
            }
        }
        Ok((true, "x <= 200000".into()))
    });

    s.run("randmodel.mean_size", "randmodel", "mean sampled N is within 3 SE of sum psi", || {
        let xx = 100 * x;
        let p = RandomModelParams::new(3.0, seed)?;
        let ns: Vec<f64> = (0..50).map(|i| sample_model_set(xx, &p.with_seed(derive_seed(seed, i))).map(|s| s.len() as f64)).collect::<Result<_, _>>()?;
        let mean = ns.iter().sum::<f64>() / 50.0;
        let se = (len_variance(xx, 3.0) / 50.0).sqrt();
        let z = (mean - expected_len(xx, 3.0)).abs() / se;
        Ok((z <= 3.0, format!("X={xx} z={z:.3}")))
    });

    s.run("randmodel.energy_and_determinism", "randmodel", "sampled sets satisfy the energy identity and are reproducible", || {
        let p = RandomModelParams::new(3.0, seed)?;
        for i in 0..4 {
            let ps = p.with_seed(derive_seed(seed, 100 + i));
            let a1 = sample_model_set(1 << 16, &ps)?;
            let a2 = sample_model_set(1 << 16, &ps)?;
            let e1 = energy(&a1, EnergyMethod::Fft)?.energy;
            if a1 != a2 || e1 != energy(&a1, EnergyMethod::DifferenceIdentity)?.energy || e1 != energy(&a2, EnergyMethod::SumHistogram)?.energy {
                return Ok((false, format!("trial {i}")));
            }
        }
        Ok((true, "4 sets at X=65536".into()))
    });

    s.run("diophantine.convergents", "diophantine", "convergents approximate alpha within 1/(q_k q_(k+1))", || {
        let r = rng(seed, 6);
        for i in 0..50u64 {
            let AlphaValue::Rational { p, q } = random_alpha(&r, i, 1 << 40) else { unreachable!() };
            let cf = cf_expand(&AlphaValue::Rational { p, q }, 200)?;
            let last = cf.convergents.len().saturating_sub(2);
            for (k, w) in cf.convergents.windows(2).enumerate() {
                let ((pk, qk), (_, qn)) = (w[0], w[1]);
                let lhs = (p as i128 * qk as i128 - pk as i128 * q as i128).unsigned_abs() * qn;
                let ok = if k < last { lhs < q as u128 } else { lhs == q as u128 };
                if !ok {
                    return Ok((false, format!("{p}/{q} k={k}")));
                }
            }
        }
        Ok((true, "50 alphas".into()))
    });

    s.run("diophantine.witnesses", "diophantine", "every witness satisfies its inequality and the convergent search matches a full scan", || {
        let alphas = [AlphaValue::rational(670_889_731, 4_738_167_652)?, AlphaValue::rational(1, 1000)?, AlphaValue::rational(7, 1009)?];
        for al in alphas {
            for d in [1, 2] {
                let w = khintchine_witnesses(&al, d, 100_000)?;
                if w.iter().any(|v| check_witness(&al, v.m, d).is_none()) || w != khintchine_witnesses_brute(&al, d, 100_000) {
                    return Ok((false, format!("{al} depth {d}")));
                }
            }
        }
        Ok((true, "3 alphas; depth 1 and 2".into()))
    });

    s.run("diophantine.demo", "diophantine", "the lower-bound sub-sum never exceeds F(N) and the demo F matches the direct count", || {
        let al = AlphaValue::rational(670_889_731, 4_738_167_652)?;
        let src = SetSource::Gallery(GalleryKind::Interval);
        let r = divergence_demo(&src, &al, &DemoParams::new(Rat::from_integer(1), 1.0, 1, 20_000)?)?;
        if let Some(c) = &r.demo.construction {
            if c.lower_bound_f64 > c.value_f64 {
                return Ok((false, "sub-sum exceeds F".into()));
            }
        }
        let Some(sp) = &r.demo.search else { return Ok((false, "no spike found".into())) };
        let set = src.truncate(sp.bound)?;
        let v = pair_corr_direct(&set, &CorrelationParams::new(al, Rat::from_integer(1), sp.bound)?)?;
        Ok((paircorr_core::arith::fmt_ratio(&v.value()) == sp.value, format!("N={} F={:.3}", sp.set_len, sp.value_f64)))
    });

    let all = s.checks.iter().all(|c| c.passed);
    let mut csv = vec!["check,module,passed,statement,detail".to_string()];
    csv.extend(s.checks.iter().map(|c| format!("{},{},{},{},{}", c.id, c.module, c.passed, c.statement.replace(',', ";"), c.detail)));
    let mut rep = Report::new(csv, json!({ "passed": all, "checks": s.checks }));
    rep.csv_footer = vec![format!("passed: {}/{}", s.checks.iter().filter(|c| c.passed).count(), s.checks.len())];
    Ok((rep, all))
}
