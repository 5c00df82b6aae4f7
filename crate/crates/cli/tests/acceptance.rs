//! Acceptance run: one PASS/FAIL line per criterion, then the convergence
//! trend. Exits nonzero if any criterion fails.

use std::process::Command;
use std::time::Instant;

use paircorr_core::arith::{Rat, Threshold};
use paircorr_core::diophantine::{divergence_demo, DemoParams};
use paircorr_core::paircorr::{
    check_sandwich, corr_scan, mean_corr_mc, pair_corr_direct, pair_corr_via_r, sample_alpha, sandwich_schedule, AlphaValue,
    CorrelationParams,
};
use paircorr_core::randmodel::{concentration_with, energy_scaling, sample_set, Baselines, RandomModelParams};
use paircorr_core::rng::{streams, CounterRng};
use paircorr_core::schmidt::{avg_overlap_sum, overlap_sweep, phi_moment_audit, variance_mc, SchmidtConfig};
use paircorr_core::setcore::{diff_rep, energy, gallery, random_test_set, EnergyMethod, GalleryKind, SetSource, BRUTE_MAX_LEN};

type Outcome = Result<(bool, String), String>;

const SEED: u64 = 20_240_601;

fn rng(stream_offset: u64) -> CounterRng {
    CounterRng::new(SEED, streams::PARAMS + 100 * stream_offset)
}

fn c1_energy() -> Outcome {
    let mut brute_sets = 0;
    for i in 0..100 {
        let set = random_test_set(SEED, i, 500).map_err(|e| e.to_string())?;
        let mut values = Vec::new();
        for m in EnergyMethod::ALL {
            if m == EnergyMethod::QuadrupleBrute && set.len() > BRUTE_MAX_LEN {
                continue;
            }
            values.push(energy(&set, m).map_err(|e| e.to_string())?.energy);
        }
        if values.len() == 4 {
            brute_sets += 1;
        }
        if values.windows(2).any(|w| w[0] != w[1]) {
            return Ok((false, format!("set {i} disagrees: {values:?}")));
        }
    }
    Ok((true, format!("100 sets; brute included on {brute_sets}")))
}

fn c2_direct_vs_r() -> Outcome {
    let r = rng(1);
    let mut cases = 0;
    for i in 0..200u64 {
        let set = random_test_set(SEED ^ 0x5a5a, i, 2000).map_err(|e| e.to_string())?;
        if set.len() < 2 {
            continue;
        }
        let q = 1 + r.below(3 * i, 1_000_000);
        let p = r.below(3 * i + 1, q);
        let s = Rat::new(1 + r.below(3 * i + 2, 40), 4);
        let params = CorrelationParams::new(AlphaValue::rational(p, q).map_err(|e| e.to_string())?, s, set.bound())
            .map_err(|e| e.to_string())?;
        let a = pair_corr_direct(&set, &params).map_err(|e| e.to_string())?;
        let b = pair_corr_via_r(&diff_rep(&set).map_err(|e| e.to_string())?, &params).map_err(|e| e.to_string())?;
        if a != b {
            return Ok((false, format!("case {i}: {} vs {}", a.count, b.count)));
        }
        cases += 1;
    }
    Ok((cases >= 200, format!("{cases} cases")))
}

fn c3_mean() -> Outcome {
    let set = gallery(GalleryKind::Squares, 10_000).map_err(|e| e.to_string())?;
    let stats = mean_corr_mc(&set, Rat::from_integer(1), 10_000, SEED).map_err(|e| e.to_string())?;
    let n = set.len() as f64;
    let target = 2.0 * (1.0 - 1.0 / n);
    let z = stats.z_score(target);
    Ok((z <= 3.0, format!("N={n} mean={:.5} target={target:.5} SE={:.5} z={z:.3}", stats.mean, stats.std_err)))
}

fn c4_phi_moments() -> Outcome {
    let mut worst = [0f64; 2];
    for x in [1_000u64, 10_000, 100_000] {
        for t in [2.0, 8.0, 32.0] {
            for order in 1..=2u32 {
                let audit = phi_moment_audit(x, t, order).map_err(|e| e.to_string())?;
                let w = &mut worst[order as usize - 1];
                *w = w.max(audit.ratio);
            }
        }
    }
    Ok((worst[0] <= 2.0 && worst[1] <= 4.0, format!("max ratios {:.4} (<= 2) and {:.4} (<= 4)", worst[0], worst[1])))
}

fn c5_overlap() -> Outcome {
    let mut cases = 0;
    let mut violations = 0;
    for s in [Rat::new(1, 2), Rat::from_integer(1), Rat::from_integer(3)] {
        for t in [2.0, 10.0] {
            let cfg = SchmidtConfig::new(t, s, 1000, 1000).map_err(|e| e.to_string())?;
            let (c, bad) = overlap_sweep(200, &cfg).map_err(|e| e.to_string())?;
            cases += c;
            violations += bad.len();
        }
    }
    Ok((violations == 0, format!("{cases} cases, {violations} violations")))
}

fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn c6_avg_overlap() -> Outcome {
    let grid = [500u64, 1000, 2000, 4000];
    let mut ok = true;
    let mut detail = Vec::new();
    for t in [2.0f64, 8.0] {
        let th = Threshold::new(t).map_err(|e| e.to_string())?;
        let sums: Vec<f64> = grid.iter().map(|&x| paircorr_core::arith::big_to_f64(&avg_overlap_sum(x, th))).collect();
        let xs: Vec<f64> = grid.iter().map(|&x| x as f64).collect();
        let slope = ols_slope(&xs, &sums);
        let harmonic: f64 = (1..=t as u64).map(|c| 1.0 / c as f64).sum();
        let (lo, hi) = (0.5 * t.ln(), 2.0 * harmonic);
        let max_ratio = grid.iter().zip(&sums).map(|(&x, s)| s / (x as f64 * t.ln())).fold(0.0, f64::max);
        ok &= slope >= lo && slope <= hi && max_ratio <= 2.0;
        detail.push(format!("T={t}: slope {slope:.4} in [{lo:.4}, {hi:.4}], max ratio {max_ratio:.4}"));
    }
    Ok((ok, detail.join("; ")))
}

fn c7_integral() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    let mut found = 0;
    let mut i = 0;
    while found < 5 {
        let set = random_test_set(SEED ^ 0x77, i, 2000).map_err(|e| e.to_string())?;
        i += 1;
        if set.len() < 4 {
            continue;
        }
        found += 1;
        let cfg = SchmidtConfig::for_set(&set, 2.0, Rat::from_integer(1)).map_err(|e| e.to_string())?;
        let rep = variance_mc(&set, &cfg, 100_000, SEED + i, None).map_err(|e| e.to_string())?;
        let z = rep.defect.z_score(rep.l1_exact);
        ok &= z <= 3.0;
        detail.push(format!("N={} z={z:.3}", set.len()));
    }
    Ok((ok, detail.join("; ")))
}

fn c8_scaling() -> Outcome {
    let grid: Vec<u64> = (16..=22).map(|k| 1u64 << k).collect();
    let sum = energy_scaling(3.0, &grid, 5, SEED).map_err(|e| e.to_string())?;
    let ok = sum.min_ratio >= 0.05 && sum.max_ratio <= 20.0 && sum.median_drift < 3.0;
    Ok((ok, format!("ratios in [{:.4}, {:.4}], median drift {:.4}", sum.min_ratio, sum.max_ratio, sum.median_drift)))
}

fn c9_concentration() -> Outcome {
    let (bound, c, eps) = (1_000_000u64, 3.0, 0.5);
    let base = Baselines::new(bound, c);
    let mut counts = [0u32; 2];
    let mut literal = [0u32; 2];
    for seed in 0..50 {
        let params = RandomModelParams::new(c, SEED + seed).map_err(|e| e.to_string())?;
        let set = sample_set(bound, &params).map_err(|e| e.to_string())?;
        let rep = concentration_with(&set, &base, eps).map_err(|e| e.to_string())?;
        counts[0] += rep.property1_ok as u32;
        counts[1] += rep.property2_ok as u32;
        literal[0] += rep.property1_literal_ok as u32;
        literal[1] += rep.property2_literal_ok as u32;
    }
    Ok((
        counts.iter().all(|&k| k >= 45),
        format!(
            "property (1) {}/50, property (2) {}/50 (literal asymptotic baselines: {}/50, {}/50)",
            counts[0], counts[1], literal[0], literal[1]
        ),
    ))
}

fn c10_divergence() -> Outcome {
    let alpha = AlphaValue::rational(670_889_731, 4_738_167_652).map_err(|e| e.to_string())?;
    let params = DemoParams::new(Rat::from_integer(1), 1.0, 1, 100_000).map_err(|e| e.to_string())?;
    let rep = divergence_demo(&SetSource::Gallery(GalleryKind::Interval), &alpha, &params).map_err(|e| e.to_string())?;
    let detail = match &rep.demo.search {
        Some(s) => format!("alpha={alpha}: F={} ({:.4}) at N={} (M={}, c={})", s.value, s.value_f64, s.set_len, s.m, s.multiplier),
        None => format!("alpha={alpha}: no N found"),
    };
    Ok((rep.demo.passed, detail))
}

fn c11_sandwich() -> Outcome {
    let r = rng(11);
    let mut violations = 0;
    let mut total = 0;
    for (g, kind) in [GalleryKind::Interval, GalleryKind::Squares].into_iter().enumerate() {
        let source = SetSource::Gallery(kind);
        let schedule = sandwich_schedule(&source, 0.1, 9).map_err(|e| e.to_string())?;
        let first = schedule.rows[0].bound;
        let last = schedule.rows.last().unwrap().bound;
        let set = source.truncate(last).map_err(|e| e.to_string())?;
        for i in 0..50u64 {
            let k = 4 * (50 * g as u64 + i);
            let x = first + r.below(k, last - first);
            let q = 1 + r.below(k + 1, 100_000);
            let alpha = AlphaValue::rational(r.below(k + 2, q), q).map_err(|e| e.to_string())?;
            let s = Rat::new(1 + r.below(k + 3, 16), 4);
            let check = check_sandwich(&set, &schedule, alpha, s, x).map_err(|e| e.to_string())?;
            total += 1;
            violations += !check.ok as u32;
        }
    }
    Ok((violations == 0, format!("{total} configurations, {violations} violations")))
}

fn run_audit(threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_paircorr"))
        .args(["audit-all", "--seed", "7"])
        .env("PAIRCORR_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("audit-all exited with {:?}", out.status.code()));
    }
    Ok(out.stdout)
}

fn c12_determinism() -> Outcome {
    let a = run_audit("1")?;
    let b = run_audit("1")?;
    let c = run_audit("2")?;
    Ok((a == b && a == c, format!("{} bytes; same threads {}, 1 vs 2 threads {}", a.len(), a == b, a == c)))
}

fn convergence_trend() -> Outcome {
    let source = SetSource::Gallery(GalleryKind::Squares);
    let mut improved = 0;
    for i in 0..20 {
        let rows = corr_scan(&source, sample_alpha(SEED, i), Rat::from_integer(1), &[1 << 10, 1 << 20]).map_err(|e| e.to_string())?;
        improved += (rows[1].deviation < rows[0].deviation) as u32;
    }
    Ok((improved >= 14, format!("deviation at X=2^20 below X=2^10 for {improved}/20 alphas")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("1 energy routes agree", c1_energy),
        ("2 direct count equals count via r", c2_direct_vs_r),
        ("3 mean of F", c3_mean),
        ("4 deficit moments", c4_phi_moments),
        ("5 arc intersections, constant 4", c5_overlap),
        ("6 average overlap growth", c6_avg_overlap),
        ("7 L1 closed form", c7_integral),
        ("8 energy scaling", c8_scaling),
        ("9 concentration", c9_concentration),
        ("10 spike for the interval", c10_divergence),
        ("11 sandwich inequalities", c11_sandwich),
        ("12 determinism of audit-all", c12_determinism),
        ("trend convergence monitor", convergence_trend),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let (ok, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += !ok as u32;
        println!("{} criterion {name}: {detail} [{:.1}s]", if ok { "PASS" } else { "FAIL" }, start.elapsed().as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
