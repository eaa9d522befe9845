//! Acceptance criteria. Each test prints one PASS/FAIL line.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use spd_core::levy_model::stable_unit_scale;
use spd_core::*;

fn verdict(id: &str, ok: bool, detail: String) {
    println!("{id} {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "{id} failed: {detail}");
}

fn brownian() -> ExponentSuite {
    ExponentSuite::new(LevyModel::brownian(1.0, 0.0).unwrap()).unwrap()
}

fn stable(alpha: f64) -> ExponentSuite {
    ExponentSuite::new(LevyModel::unit_stable(alpha).unwrap()).unwrap()
}

fn tempered() -> ExponentSuite {
    let j = JumpFamily::tempered_stable(1.5, 1.0, 1.0).unwrap();
    ExponentSuite::new(LevyModel::centered(0.0, j).unwrap()).unwrap()
}

fn mixture() -> ExponentSuite {
    let c = stable_unit_scale(1.5) / 2.0;
    let j = JumpFamily::mixture(vec![
        JumpFamily::stable(1.5, c).unwrap(),
        JumpFamily::tempered_stable(1.5, 1.0, c).unwrap(),
    ])
    .unwrap();
    ExponentSuite::new(LevyModel::centered(0.0, j).unwrap()).unwrap()
}

fn fixtures() -> Vec<(&'static str, ExponentSuite)> {
    vec![
        ("brownian", brownian()),
        ("stable1.2", stable(1.2)),
        ("stable1.5", stable(1.5)),
        ("stable1.8", stable(1.8)),
        ("tempered", tempered()),
        ("mixture", mixture()),
    ]
}

fn lin(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn within(start: Instant, limit: Duration) -> (bool, String) {
    let e = start.elapsed();
    (e < limit, format!("{:.2}s/{}s", e.as_secs_f64(), limit.as_secs()))
}

#[test]
fn ac1_gaussian_exactness() {
    let start = Instant::now();
    let s = brownian();
    let cfg = OracleConfig::default();
    let (mut asym_err, mut oracle_err) = (0.0f64, 0.0f64);
    for t in [0.1, 1.0, 10.0] {
        for x in lin(-10.0, -0.1, 51) {
            let exact = (-x * x / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
            asym_err = asym_err.max(rel(asym_density(&s, t, x).unwrap().value, exact));
            oracle_err = oracle_err.max(rel(density_oracle(&s, t, x, &cfg).unwrap().value, exact));
        }
    }
    let (fast, time) = within(start, Duration::from_secs(5));
    verdict(
        "AC1",
        asym_err < 1e-12 && oracle_err < 1e-8 && fast,
        format!("asym rel err {asym_err:.2e} (<1e-12), oracle rel err {oracle_err:.2e} (<1e-8), {time}"),
    );
}

/// 20 times by 20 points z = -x t^(-1/α) spaced so that the density stays representable
/// (saddle exponent between 1e-3 and 200).
fn stable_grid(alpha: f64) -> Vec<(f64, f64)> {
    let a1 = alpha - 1.0;
    let z_of = |e: f64| alpha * (e / a1).powf(a1 / alpha);
    let (z0, z1) = (z_of(1e-3), z_of(200.0));
    let ts: Vec<f64> = (0..20).map(|i| 10f64.powf(-2.0 + 3.0 * i as f64 / 19.0)).collect();
    let zs: Vec<f64> = (0..20).map(|i| z0 * (z1 / z0).powf(i as f64 / 19.0)).collect();
    ts.iter()
        .flat_map(|&t| zs.iter().map(move |&z| (t, -z * t.powf(1.0 / alpha))))
        .collect()
}

/// Logarithm of the display as stated in the acceptance list.
fn ln_stable_display_as_stated(alpha: f64, t: f64, x: f64) -> f64 {
    let a1 = alpha - 1.0;
    let y = -x / alpha;
    -0.5 * (2.0 * PI * alpha * a1).ln() - alpha / (2.0 * a1) * y.ln() + (2.0 - alpha) / (2.0 * a1) * t.ln()
        - a1 * t.powf(-1.0 / a1) * y.powf(alpha / a1)
}

/// Logarithm of the saddle-point formula for φ(λ) = λ^α worked out in closed form:
/// w = (-x/(αt))^(1/(α-1)), so (2π t φ''(w))^(-1/2) and t(wφ'(w) - φ(w)) are explicit.
fn ln_stable_display_derived(alpha: f64, t: f64, x: f64) -> f64 {
    let a1 = alpha - 1.0;
    let y = -x / alpha;
    -0.5 * (2.0 * PI * alpha * a1).ln() + (2.0 - alpha) / (2.0 * a1) * y.ln()
        - 1.0 / (2.0 * a1) * t.ln()
        - a1 * t.powf(-1.0 / a1) * y.powf(alpha / a1)
}

fn ln_display_err(f: fn(f64, f64, f64) -> f64) -> (f64, f64) {
    let mut worst = 0.0f64;
    let mut worst_alpha = 0.0;
    for alpha in [1.2, 1.5, 1.8] {
        let s = stable(alpha);
        for (t, x) in stable_grid(alpha) {
            let d = asym_density(&s, t, x).unwrap();
            let err = ((d.ln_value - f(alpha, t, x)).exp() - 1.0).abs();
            if err > worst {
                worst = err;
                worst_alpha = alpha;
            }
        }
    }
    (worst, worst_alpha)
}

#[test]
fn ac2_stable_closed_form_as_stated() {
    let start = Instant::now();
    let (worst, alpha) = ln_display_err(ln_stable_display_as_stated);
    let (fast, time) = within(start, Duration::from_secs(10));
    verdict(
        "AC2",
        worst < 1e-10 && fast,
        format!("stated display vs asym_density: worst rel err {worst:.3e} (alpha {alpha}) (<1e-10), {time}"),
    );
}

#[test]
fn ac2_stable_closed_form_derived() {
    let start = Instant::now();
    let (worst, alpha) = ln_display_err(ln_stable_display_derived);
    let (fast, time) = within(start, Duration::from_secs(10));
    verdict(
        "AC2-derived",
        worst < 1e-10 && fast,
        format!("saddle formula worked out for λ^α vs asym_density: worst rel err {worst:.3e} (alpha {alpha}) (<1e-10), {time}"),
    );
}

#[test]
fn ac3_asymptotic_convergence() {
    let start = Instant::now();
    let cfg = OracleConfig::default();
    let mut details = Vec::new();
    let mut ok = true;
    for (name, s) in [("stable1.5", stable(1.5)), ("tempered", tempered())] {
        let pts: Vec<(f64, f64)> = [0.01, 0.1, 1.0, 10.0]
            .iter()
            .flat_map(|&t| (0..40).map(move |i| (t, -(10f64.powf(-1.0 + 4.0 * i as f64 / 39.0)))))
            .collect();
        let errs: Vec<(f64, f64)> = pts
            .par_iter()
            .filter_map(|&(t, x)| {
                let sd = saddle_w(&s, t, x).ok()?;
                if sd.hardness <= 1e3 {
                    return None;
                }
                let a = asym_density(&s, t, x).unwrap().ln_value;
                let p = density_oracle(&s, t, x, &cfg).unwrap().ln_value;
                Some((sd.hardness, ((p - a).exp() - 1.0).abs()))
            })
            .collect();
        let w3 = errs.iter().map(|e| e.1).fold(0.0, f64::max);
        let hard: Vec<f64> = errs.iter().filter(|e| e.0 > 1e5).map(|e| e.1).collect();
        let w5 = hard.iter().copied().fold(0.0, f64::max);
        ok &= w3 < 0.05 && w5 < 0.01 && !hard.is_empty();
        details.push(format!(
            "{name}: {} pts hardness>1e3 worst {w3:.2e} (<0.05), {} pts >1e5 worst {w5:.2e} (<0.01)",
            errs.len(),
            hard.len()
        ));
    }
    let (fast, time) = within(start, Duration::from_secs(120));
    verdict("AC3", ok && fast, format!("{}; {time}", details.join("; ")));
}

#[test]
fn ac4_oracle_self_certification() {
    let start = Instant::now();
    let cfg = OracleConfig::default();
    let mut worst_cross = (0.0f64, "");
    let mut worst_mass = (0.0f64, "");
    for (name, s) in fixtures() {
        for t in [0.1, 1.0] {
            let m = total_mass(&s, t, &cfg).unwrap();
            if (m.mass - 1.0).abs() >= worst_mass.0 {
                worst_mass = ((m.mass - 1.0).abs(), name);
            }
            let scale = s.big_phi_inv(1.0 / t).unwrap();
            let d = lin(-2.5, 6.0, 35)
                .par_iter()
                .map(|u| oracle_cross_contour(&s, t, u / scale, &cfg).unwrap().discrepancy)
                .reduce(|| 0.0, f64::max);
            if d >= worst_cross.0 {
                worst_cross = (d, name);
            }
        }
    }
    let (fast, time) = within(start, Duration::from_secs(120));
    verdict(
        "AC4",
        worst_cross.0 < 1e-8 && worst_mass.0 < 1e-6 && fast,
        format!(
            "cross-contour worst {:.2e} ({}) (<1e-8) on xΦ⁻¹(1/t) ∈ [-2.5, 6]; |mass-1| worst {:.2e} ({}) (<1e-6); {time}",
            worst_cross.0, worst_cross.1, worst_mass.0, worst_mass.1
        ),
    );
}

fn suite_reports(ids: &[CheckId]) -> Vec<(&'static str, CheckReport)> {
    let spec = GridSpec::default();
    let mut out = Vec::new();
    for (name, s) in fixtures() {
        for &id in ids {
            out.push((name, run_check(&s, id, &spec).unwrap()));
        }
    }
    out
}

#[test]
fn ac5_exact_constant_inequalities() {
    let start = Instant::now();
    let ids = [
        CheckId::Eq43,
        CheckId::Cor4,
        CheckId::Eq42,
        CheckId::Eq17_45_72,
        CheckId::Ineq20,
        CheckId::Prop5,
    ];
    let reports = suite_reports(&ids);
    let bad: Vec<String> = reports
        .iter()
        .filter(|(_, r)| r.status != CheckStatus::Passed)
        .map(|(n, r)| format!("{n}/{}: {:?} {}", r.check_id, r.status, r.notes))
        .collect();
    let prop5: Vec<f64> = reports
        .iter()
        .filter(|(n, r)| n.starts_with("stable") && r.check_id == CheckId::Prop5)
        .map(|(n, r)| {
            let alpha: f64 = n.trim_start_matches("stable").parse().unwrap();
            rel(r.empirical_constants["C"], alpha)
        })
        .collect();
    let prop5_worst = prop5.iter().copied().fold(0.0, f64::max);
    let (fast, time) = within(start, Duration::from_secs(180));
    verdict(
        "AC5",
        bad.is_empty() && prop5_worst < 1e-9 && fast,
        format!(
            "{} reports, {} not passed {:?}; stable PROP5 C vs alpha worst rel {prop5_worst:.1e}; {time}",
            reports.len(),
            bad.len(),
            bad
        ),
    );
}

#[test]
fn ac6_existence_constant_stability() {
    let ids = [
        CheckId::Eq44,
        CheckId::Prop7,
        CheckId::Prop8,
        CheckId::Prop10,
        CheckId::Rem2,
        CheckId::Rem5,
        CheckId::Cor2,
        CheckId::Eq63,
    ];
    let reports = suite_reports(&ids);
    let mut worst = (0.0f64, String::new());
    let mut failed = Vec::new();
    let mut skipped = Vec::new();
    for (n, r) in &reports {
        match r.status {
            CheckStatus::Failed => failed.push(format!("{n}/{}: {}", r.check_id, r.notes)),
            CheckStatus::Skipped => skipped.push(format!("{n}/{}", r.check_id)),
            CheckStatus::Passed => {}
        }
        for (k, &v) in r.empirical_constants.iter().filter(|(k, _)| k.starts_with("drift[")) {
            if !(v < 0.05) {
                failed.push(format!("{n}/{}: {k} = {v}", r.check_id));
            }
            if v >= worst.0 {
                worst = (v, format!("{n}/{}/{k}", r.check_id));
            }
        }
    }
    verdict(
        "AC6",
        failed.is_empty(),
        format!(
            "worst drift {:.2}% at {} (<5%); failed {:?}; not applicable {:?}",
            100.0 * worst.0,
            worst.1,
            failed,
            skipped
        ),
    );
}

struct EnvelopeSweep {
    /// (t, x, regime, ln p, ln envelope)
    rows: Vec<(f64, f64, RegimeTag, f64, f64)>,
}

fn envelope_sweep() -> EnvelopeSweep {
    let s = stable(1.5);
    let cfg = OracleConfig::default();
    let env = ThreeRegimeEnvelope::new(&s).unwrap();
    let pts: Vec<(f64, f64)> = [0.05, 0.2, 1.0]
        .iter()
        .flat_map(|&t| {
            let sc = s.phi_inv(1.0 / t).unwrap();
            lin(-8.0, 8.0, 121).into_iter().map(move |u| (t, u / sc))
        })
        .collect();
    let rows = pts
        .par_iter()
        .map(|&(t, x)| {
            let (r, le) = env.evaluate_ln(&s, t, x).unwrap();
            let lp = density_oracle(&s, t, x, &cfg).unwrap().ln_value;
            (t, x, r.tag, lp, le)
        })
        .collect();
    EnvelopeSweep { rows }
}

#[test]
fn ac7_three_regime_sandwich() {
    let start = Instant::now();
    let sweep = envelope_sweep();
    let mut per: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for &(_, _, tag, lp, le) in &sweep.rows {
        let q = (lp - le).exp();
        lo = lo.min(q);
        hi = hi.max(q);
        let e = per.entry(tag.name()).or_insert((f64::INFINITY, 0.0));
        e.0 = e.0.min(q);
        e.1 = e.1.max(q);
    }
    let regimes_ok = per.len() == 3 && per.values().all(|(m, big_m)| big_m / m < 20.0);
    let (fast, time) = within(start, Duration::from_secs(300));
    let parts: Vec<String> = per
        .iter()
        .map(|(k, (m, big_m))| format!("{k} M/m {:.3}", big_m / m))
        .collect();
    verdict(
        "AC7",
        hi / lo < 100.0 && regimes_ok && fast,
        format!(
            "{} points, p/envelope ∈ [{lo:.4}, {hi:.4}], M/m {:.3} (<100); {} (<20); {time}",
            sweep.rows.len(),
            hi / lo,
            parts.join(", ")
        ),
    );
}

#[test]
fn ac8_tail_law() {
    let s = stable(1.5);
    let sweep = envelope_sweep();
    let mut all_ok = true;
    let mut details = Vec::new();
    for t in [0.05, 0.2, 1.0] {
        let scale = s.big_phi_inv(1.0 / t).unwrap();
        let mut tail: Vec<(f64, f64)> = sweep
            .rows
            .iter()
            .filter(|r| r.0 == t && r.1 * scale > 4.0)
            .map(|r| (r.1 * scale, (r.3 - (tail_lower_shape(&s, t, r.1).unwrap()).ln()).exp()))
            .collect();
        tail.sort_by(|a, b| a.0.total_cmp(&b.0));
        let k = (tail.len() / 10).max(1);
        let mean = |v: &[(f64, f64)]| v.iter().map(|p| p.1).sum::<f64>() / v.len() as f64;
        let first = mean(&tail[..k]);
        let last = mean(&tail[tail.len() - k..]);
        let min = tail.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let max = tail.iter().map(|p| p.1).fold(0.0, f64::max);
        let ok = !tail.is_empty()
            && min >= 0.5
            && max <= 2.0
            && (0.8..=1.25).contains(&last)
            && (last - 1.0).abs() <= (first - 1.0).abs();
        all_ok &= ok;
        details.push(format!(
            "t={t}: {} pts, ratio ∈ [{min:.3}, {max:.3}], first-decile mean {first:.3}, last-decile mean {last:.3}",
            tail.len()
        ));
    }
    verdict("AC8", all_ok, details.join("; "));
}

#[test]
fn ac9_bulk_flatness() {
    let s = stable(1.5);
    let sweep = envelope_sweep();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut n = 0;
    for &(t, x, _, lp, _) in &sweep.rows {
        let sc = s.phi_inv(1.0 / t).unwrap();
        if (x * sc).abs() <= 1.0 + 1e-12 {
            let q = (lp - sc.ln()).exp();
            lo = lo.min(q);
            hi = hi.max(q);
            n += 1;
        }
    }
    verdict(
        "AC9",
        n > 0 && hi / lo < 10.0,
        format!("{n} points, p/φ⁻¹(1/t) ∈ [{lo:.4}, {hi:.4}], M/m {:.3} (<10)", hi / lo),
    );
}

#[test]
fn ac10_boundary_index() {
    let s = ExponentSuite::new(LevyModel::unit_boundary_stable().unwrap()).unwrap();
    let t = 1.0;
    let mut phi_err = 0.0f64;
    for lam in [0.1, 0.5, 2.0, 7.0, 40.0] {
        phi_err = phi_err.max(rel(s.phi(lam, 0).unwrap(), lam * lam.ln()));
    }
    let (mut worst, mut printed) = (0.0f64, 0.0f64);
    for x in lin(-6.0, -0.1, 60) {
        // φ'(w) = ln w + 1 = -x/t at w = e^(-x-1); φ'' = 1/w; wφ' - φ = w
        let w = (-x / t - 1.0).exp();
        let general = (2.0 * PI * t / w).powf(-0.5) * (-t * w).exp();
        let asym = asym_density(&s, t, x).unwrap().value;
        worst = worst.max(rel(asym, general));
        let display = (2.0 * PI * t).powf(-0.5) * (-(-x / t - 1.0) / 2.0 - (-x / t - 1.0).exp()).exp();
        printed = printed.max(rel(display, general));
    }
    verdict(
        "AC10",
        worst < 1e-12 && phi_err < 1e-12,
        format!(
            "φ(λ) = λ ln λ to {phi_err:.1e}; asym vs general formula at w = e^(-x-1): worst rel {worst:.2e} (<1e-12); \
             the printed α=1 display differs from the general formula by up to rel {printed:.3e}"
        ),
    );
}
