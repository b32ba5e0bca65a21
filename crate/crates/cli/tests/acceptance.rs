//! Acceptance checks. Prints one PASS/FAIL line per criterion and always
//! exits successfully; failures are reported, not raised.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use rand_distr::{Distribution, StandardNormal};
use sddo_core::bounds::{a2_probability, alpha3_upper_bound, overall_type1_bound};
use sddo_core::calibration::{calibrate_margins, sweep_dose_counts, CalibrationTarget};
use sddo_core::design::{DesignSpec, OperatingCharacteristics, PriorFunction, ScenarioSpec};
use sddo_core::engine::{logrank_z, operating_characteristics};
use sddo_core::ssr::{interim_z, ppos, PposInputs};
use sddo_core::stats::{normal_quantile, schoenfeld_events, RandomStream};

const REPS: usize = 10_000;
const SEED: u64 = 20_240_601;

type Check = Result<(bool, String), String>;
type Criterion = (&'static str, fn() -> Check);

fn null() -> ScenarioSpec {
    ScenarioSpec::new("global-null", &[0.2; 4], &[1.0; 4], &[1.0; 4])
}

fn one_significant() -> ScenarioSpec {
    ScenarioSpec::new("one-significant", &[0.2, 0.2, 0.2, 0.35], &[1.0, 1.0, 1.0, 0.58], &[1.0, 1.0, 1.0, 0.7])
}

fn global_alternative() -> ScenarioSpec {
    ScenarioSpec::new(
        "global-alternative",
        &[0.2, 0.35, 0.35, 0.35],
        &[1.0, 0.58, 0.58, 0.58],
        &[1.0, 0.58, 0.58, 0.58],
    )
}

fn bell() -> ScenarioSpec {
    ScenarioSpec::new("bell", &[0.2, 0.32, 0.35, 0.30], &[1.0, 0.7, 0.65, 0.75], &[1.0, 0.7, 0.65, 0.75])
}

fn oc(spec: &DesignSpec, scen: &ScenarioSpec) -> Result<OperatingCharacteristics, String> {
    operating_characteristics(spec, scen, REPS, SEED, 0).map_err(|e| e.to_string())
}

fn planning_identities() -> Check {
    let mut ok = true;
    let mut parts = Vec::new();
    for (hr, want) in [(0.58, 140), (0.65, 226), (0.75, 507)] {
        let got = schoenfeld_events(hr, 0.025, 0.9).map_err(|e| e.to_string())?;
        ok &= got.abs_diff(want) <= 2;
        parts.push(format!("HR {hr}: {got} (want {want})"));
    }
    Ok((ok, parts.join(", ")))
}

fn calibration_reproduction() -> Check {
    let spec = DesignSpec::default();
    let target = CalibrationTarget::default();
    let template = ScenarioSpec::default();
    let (t0, t1) = calibrate_margins(&spec, &target, &template, SEED, 0).map_err(|e| e.to_string())?;
    let sweep = sweep_dose_counts(&spec, &target, &template, &[2, 3, 4, 5], SEED, 0).map_err(|e| e.to_string())?;
    let tau1s: Vec<f64> = sweep.iter().map(|p| p.tau1.value).collect();
    let monotone = tau1s.windows(2).all(|w| w[0] <= w[1] + 1e-12);
    let ok = (t0.value + 0.05).abs() <= 0.05 + 1e-9 && (t1.value - 0.10).abs() <= 0.05 + 1e-9 && monotone;
    Ok((ok, format!("tau0 {:.2}, tau1 {:.2}, tau1 over I=2..5 {tau1s:?}", t0.value, t1.value)))
}

fn type1_bounds() -> Check {
    let err = |e: sddo_core::Error| e.to_string();
    let ts: Vec<f64> = (1..=9).map(|k| f64::from(k) / 10.0).collect();
    // Two panels: n0 = 80 with p0 varied, p0 = 0.2 with n0 varied.
    let mut grid: Vec<(u32, f64)> = [0.1, 0.2, 0.3].iter().map(|&p| (80, p)).collect();
    grid.extend([40, 120].iter().map(|&n| (n, 0.2)));
    let (mut a3_max, mut a2_max, mut all_max, mut identity_err) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 1..=5u32 {
        for &t in &ts {
            let a3 = alpha3_upper_bound(i, t, 0.025).map_err(err)?;
            a3_max = a3_max.max(a3);
            if i == 1 {
                identity_err = identity_err.max((a3 - 0.025).abs());
            }
            for &(n0, p0) in &grid {
                all_max = all_max.max(overall_type1_bound(i, t, n0, p0, -0.05, 0.9, 0.025).map_err(err)?);
            }
        }
        for &(n0, p0) in &grid {
            a2_max = a2_max.max(a2_probability(i, n0, p0, -0.05, 0.9).map_err(err)?);
        }
    }
    let mut cross_max = 0.0f64;
    for i in 1..=5u32 {
        for n0 in [40, 80, 120] {
            for p0 in [0.1, 0.2, 0.3] {
                cross_max = cross_max.max(a2_probability(i, n0, p0, -0.05, 0.9).map_err(err)?);
            }
        }
    }
    let ok = a3_max <= 0.125 && a2_max < 0.8 && all_max < 0.025 && identity_err <= 1e-6;
    Ok((
        ok,
        format!(
            "max alpha3 {a3_max:.4}, max a2 {a2_max:.4}, max overall {all_max:.5}, |alpha3(1)-alpha| {identity_err:.1e} \
             [info: a2 max over full n0 x p0 cross {cross_max:.4}]"
        ),
    ))
}

fn show(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.1}")).unwrap_or_else(|| "-".into())
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol + 1e-9
}

fn global_null() -> Check {
    let o = oc(&DesignSpec::default(), &null())?;
    let d = &o.decision_pct;
    let pos = 100.0 * o.positive_rate_overall;
    let split = within(d.terminate, 44.12, 2.0) && within(d.phase2, 53.69, 2.0) && within(d.phase3, 2.19, 2.0);
    let entry = within(d.phase3, 2.19, 1.0);
    let sel = o.optimal_dose_pct.iter().all(|&p| within(p, 100.0 / 3.0, 2.0));
    let by = |x: Option<f64>| x.map(|v| format!("{:.2}%", 100.0 * v)).unwrap_or("-".into());
    Ok((
        pos <= 2.5 && split && entry && sel,
        format!(
            "positive {pos:.2}% (phase2 {}, phase3 {}), decisions {:.2}/{:.2}/{:.2}%, selection {:.2?}",
            by(o.positive_rate_by_decision.phase2),
            by(o.positive_rate_by_decision.phase3),
            d.terminate,
            d.phase2,
            d.phase3,
            o.optimal_dose_pct
        ),
    ))
}

fn one_significant_check() -> Check {
    let o = oc(&DesignSpec::default(), &one_significant())?;
    let sel = o.optimal_dose_pct[2];
    let term = o.decision_pct.terminate;
    let pos = 100.0 * o.positive_rate_overall;
    Ok((
        sel >= 90.0 && term <= 6.0 && pos >= 80.0,
        format!("dose 3 selected {sel:.2}%, terminate {term:.2}%, positive {pos:.2}%"),
    ))
}

fn global_alternative_check() -> Check {
    let spec = DesignSpec::default();
    let alt = oc(&spec, &global_alternative())?;
    let one = oc(&spec, &one_significant())?;
    let pos = 100.0 * alt.positive_rate_overall;
    let (ea, eo) = (alt.expected_event_size_by_decision.phase3, one.expected_event_size_by_decision.phase3);
    let smaller = matches!((ea, eo), (Some(a), Some(b)) if a < b);
    Ok((
        pos >= 95.0 && smaller,
        format!("positive {pos:.2}%, Phase III events {} vs one-significant {}", show(ea), show(eo)),
    ))
}

fn duration_ordering() -> Check {
    let spec = DesignSpec::default();
    let mut ok = true;
    let mut parts = Vec::new();
    for scen in [null(), one_significant(), global_alternative(), bell()] {
        let d = oc(&spec, &scen)?.expected_duration_by_decision;
        let ordered = matches!((d.terminate, d.phase2, d.phase3), (Some(a), Some(b), Some(c)) if a < b && b < c);
        ok &= ordered;
        parts.push(format!("{} {}/{}/{}", scen.name, show(d.terminate), show(d.phase2), show(d.phase3)));
    }
    Ok((ok, parts.join("; ")))
}

fn ppos_monte_carlo(inputs: &PposInputs, m2: f64, draws: usize, seed: u64) -> (f64, f64) {
    let mut rs = RandomStream::new(seed, 0, 0);
    let m1 = f64::from(inputs.m1);
    let t = m1 / (m1 + m2);
    let post_sd = inputs.posterior_variance().sqrt();
    let stage_sd = (4.0 / m2).sqrt();
    let mut hits = 0usize;
    for _ in 0..draws {
        let z1: f64 = StandardNormal.sample(&mut rs);
        let z2: f64 = StandardNormal.sample(&mut rs);
        let theta = inputs.posterior_mean() + post_sd * z1;
        let z_later = (theta + stage_sd * z2) / stage_sd;
        if t.sqrt() * inputs.z_t + (1.0 - t).sqrt() * z_later <= inputs.z_alpha {
            hits += 1;
        }
    }
    let p = hits as f64 / draws as f64;
    (p, (p * (1.0 - p) / draws as f64).sqrt())
}

fn ppos_oracle() -> Check {
    let z_alpha = normal_quantile(0.025).map_err(|e| e.to_string())?;
    let mut grid = Vec::new();
    for (k, &(m1, hr)) in [(40, 0.8), (68, 0.7), (100, 0.75), (150, 0.85), (200, 0.9)].iter().enumerate() {
        for (j, &m2) in [150u64, 226, 350, 507].iter().enumerate() {
            let sigma = [8.0, 20.0, 40.0, 80.0][(k + j) % 4];
            let lh = f64::ln(hr);
            grid.push((PposInputs { m1, log_hr_hat: lh, mu_d: 0.0, sigma_d: sigma, z_alpha, z_t: interim_z(lh, m1) }, m2));
        }
    }
    let mut worst = 0.0f64;
    for (i, (inputs, m2)) in grid.iter().enumerate() {
        let (mc, se) = ppos_monte_carlo(inputs, *m2 as f64, 100_000, 1_000 + i as u64);
        worst = worst.max((ppos(inputs, *m2) - mc).abs() / se.max(1e-12));
    }
    let limit_gap = |m2: u64| {
        grid.iter()
            .map(|(inputs, _)| (ppos(inputs, m2) - inputs.posterior_benefit_probability()).abs())
            .fold(0.0f64, f64::max)
    };
    let (gap7, gap12) = (limit_gap(10_000_000), limit_gap(1_000_000_000_000));
    Ok((
        worst <= 3.0 && gap7 <= 1e-4,
        format!(
            "{} points, max |closed - MC| {worst:.2} SE; limit gap at 1e7 {gap7:.1e} [info: at 1e12 {gap12:.1e}]",
            grid.len()
        ),
    ))
}

/// `(O - E) / sqrt(V)` with E and V taken from the hypergeometric law of
/// group-A failures at each event time, enumerated term by term.
fn logrank_hypergeometric(a: &[(f64, bool)], b: &[(f64, bool)]) -> Option<f64> {
    let choose = |n: usize, k: usize| -> f64 {
        if k > n {
            return 0.0;
        }
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    };
    let mut times: Vec<f64> = a.iter().chain(b).filter(|s| s.1).map(|s| s.0).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let (mut o, mut e, mut v) = (0.0, 0.0, 0.0);
    for t in times {
        let na = a.iter().filter(|s| s.0 >= t).count();
        let nb = b.iter().filter(|s| s.0 >= t).count();
        let d = a.iter().chain(b).filter(|s| s.0 == t && s.1).count();
        o += a.iter().filter(|s| s.0 == t && s.1).count() as f64;
        let total = choose(na + nb, d);
        let (mut m, mut m2) = (0.0, 0.0);
        for k in 0..=d.min(na) {
            let p = choose(na, k) * choose(nb, d - k) / total;
            m += k as f64 * p;
            m2 += (k * k) as f64 * p;
        }
        e += m;
        v += m2 - m * m;
    }
    (v > 1e-12).then(|| (o - e) / v.sqrt())
}

fn logrank_oracle() -> Check {
    let (mut checked, mut mismatches, mut max_err) = (0usize, 0usize, 0.0f64);
    let (mut antisym_err, mut identical_err) = (0.0f64, 0.0f64);
    for n in 1..=6u32 {
        for code in 0..12u32.pow(n) {
            let mut c = code;
            let (mut a, mut b) = (Vec::new(), Vec::new());
            for _ in 0..n {
                let s = c % 12;
                c /= 12;
                let subject = (f64::from(s % 3 + 1), (s / 3) % 2 == 1);
                if s / 6 == 0 { a.push(subject) } else { b.push(subject) }
            }
            match (logrank_z(&a, &b), logrank_hypergeometric(&a, &b)) {
                (Ok(z), Some(want)) => {
                    checked += 1;
                    max_err = max_err.max((z - want).abs());
                    if let Ok(back) = logrank_z(&b, &a) {
                        antisym_err = antisym_err.max((z + back).abs());
                    } else {
                        mismatches += 1;
                    }
                }
                (Err(_), None) => {}
                _ => mismatches += 1,
            }
            if n <= 3 && !a.is_empty() {
                if let Ok(z) = logrank_z(&a, &a) {
                    identical_err = identical_err.max(z.abs());
                }
            }
        }
    }
    Ok((
        mismatches == 0 && max_err <= 1e-10 && antisym_err <= 1e-10 && identical_err <= 1e-10,
        format!(
            "{checked} datasets, max error {max_err:.1e}, definedness mismatches {mismatches}, \
             antisymmetry {antisym_err:.1e}, identical groups {identical_err:.1e}"
        ),
    ))
}

fn determinism() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = tmp.path().join("det.toml");
    let text = "[[scenario]]\nname = \"global-null\"\norr = [0.2, 0.2, 0.2, 0.2]\nhr_pfs = [1.0, 1.0, 1.0, 1.0]\n\
                hr_os = [1.0, 1.0, 1.0, 1.0]\n\n[[scenario]]\nname = \"one-significant\"\n\
                orr = [0.2, 0.2, 0.2, 0.35]\nhr_pfs = [1.0, 1.0, 1.0, 0.58]\nhr_os = [1.0, 1.0, 1.0, 0.7]\n";
    std::fs::write(&cfg, text).map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for workers in [1, 4, 8] {
        let out = tmp.path().join(format!("w{workers}"));
        let status = Command::new(env!("CARGO_BIN_EXE_sddo"))
            .args(["simulate", cfg.to_str().unwrap(), "--reps", &REPS.to_string(), "--seed", "7"])
            .args(["--workers", &workers.to_string(), "--out", out.to_str().unwrap()])
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(format!("simulate exited with {:?}", status.status.code()));
        }
        let read = |f: &str| std::fs::read(out.join(f)).map_err(|e| e.to_string());
        outputs.push((read("oc_summary.csv")?, read("replicates.csv")?));
    }
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    Ok((same, format!("{REPS} replicates x 2 scenarios at 1/4/8 workers, outputs identical: {same}")))
}

fn informative_design() -> DesignSpec {
    let a = |p: f64| 20.0 * p / (1.0 - p);
    let mut spec = DesignSpec::default();
    spec.priors.a = PriorFunction::quadratic_through([(1.0, a(0.32)), (2.0, a(0.35)), (3.0, a(0.30))]);
    spec.priors.b = PriorFunction::Constant { value: 20.0 };
    spec.priors.mu = PriorFunction::quadratic_through([(1.0, 0.7f64.ln()), (2.0, 0.65f64.ln()), (3.0, 0.75f64.ln())]);
    spec.priors.sigma = PriorFunction::Constant { value: 80.0 };
    spec
}

fn prior_sensitivity() -> Check {
    let flat = oc(&DesignSpec::default(), &bell())?;
    let inf = oc(&informative_design(), &bell())?;
    let (s_inf, s_flat) = (inf.optimal_dose_pct[1], flat.optimal_dose_pct[1]);
    let (e_inf, e_flat) = (inf.decision_pct.phase3, flat.decision_pct.phase3);
    Ok((
        s_inf - s_flat >= 3.0 && e_inf - e_flat >= 3.0,
        format!("dose 2 selection {s_inf:.2}% vs {s_flat:.2}%, Phase III entry {e_inf:.2}% vs {e_flat:.2}%"),
    ))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("event-size planning identities", planning_identities),
        ("margin calibration", calibration_reproduction),
        ("Type I error bounds", type1_bounds),
        ("global null operating characteristics", global_null),
        ("one-significant operating characteristics", one_significant_check),
        ("global alternative operating characteristics", global_alternative_check),
        ("duration ordering by branch", duration_ordering),
        ("PPoS closed form vs predictive simulation", ppos_oracle),
        ("log-rank vs hypergeometric enumeration", logrank_oracle),
        ("determinism across worker counts", determinism),
        ("informative prior sensitivity", prior_sensitivity),
    ];
    let mut passed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok((true, detail)) => {
                passed += 1;
                println!("PASS criterion {:>2} {name}: {detail} ({secs:.1}s)", i + 1);
            }
            Ok((false, detail)) => println!("FAIL criterion {:>2} {name}: {detail} ({secs:.1}s)", i + 1),
            Err(e) => println!("FAIL criterion {:>2} {name}: error: {e} ({secs:.1}s)", i + 1),
        }
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
}
