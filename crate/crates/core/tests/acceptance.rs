//! Acceptance checks, one PASS/FAIL line each. Exits nonzero if any check fails.
//!
//! Run a subset with `cargo test -p compsize --test acceptance -- 4 7`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use compsize::asymptotics::fit::{fit_slope, fit_window, flattest_window};
use compsize::asymptotics::{classify, AsymptoteModel, Case};
use compsize::conv::{conv_power, conv_power_brute};
use compsize::mc::ensemble_estimate;
use compsize::size_dist::{component_sizes, component_sizes_at, ClosedForm};
use compsize::special::bisect;
use compsize::{DegreeDistribution, Family, ThetaBranch};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn ln_choose(n: f64, k: f64) -> f64 {
    ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0)
}

fn log_points(a: f64, b: f64, count: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..count)
        .map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (count - 1) as f64).exp().round() as usize)
        .collect();
    v.dedup();
    v
}

/// Slope of the spot-evaluated `ln w` at 25 log-spaced sizes in `[a, b]`.
fn spot_slope(d: &DegreeDistribution, a: f64, b: f64) -> Result<f64, String> {
    let ns = log_points(a, b, 25);
    let ln_w = component_sizes_at(d, &ns).map_err(|e| e.to_string())?;
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    fit_slope(&xs, &ln_w).map(|f| f.slope).map_err(|e| e.to_string())
}

fn power_law_theta(beta: f64, s: f64, k_trunc: usize) -> f64 {
    Family::PowerLaw { beta, s }.materialize(k_trunc).map(|d| d.moments().theta).unwrap_or(f64::NAN)
}

fn random_pmf(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..len).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

// Light-tailed closed forms. Both excess distributions are negative binomial with
// two successes, so u1^{*n} is negative binomial with 2n successes.
fn ln_w_negative_binomial(mu1: f64, fail: f64, n: usize) -> f64 {
    let nf = n as f64;
    mu1.ln() - (nf - 1.0).ln()
        + ln_choose(3.0 * nf - 3.0, nf - 2.0)
        + 2.0 * nf * (1.0 - fail).ln()
        + (nf - 2.0) * fail.ln()
}

fn criterion_1() -> Outcome {
    let n_max = 500;
    let mut worst: f64 = 0.0;
    let mut cases = Vec::new();
    let r = (-1.05f64).exp();
    cases.push((Family::Exponential { lambda: 1.05 }, ClosedForm::Exponential { lambda: 1.05 }, r / (1.0 - r), r));
    for p in [0.3, 0.5, 0.7] {
        cases.push((Family::Geometric { p }, ClosedForm::Geometric { p }, 1.0 / p, 1.0 - p));
    }
    for (family, form, mu1, fail) in cases {
        let d = family.materialize(n_max).map_err(|e| e.to_string())?;
        let w = component_sizes(&d, n_max).map_err(|e| e.to_string())?;
        for n in 2..=n_max {
            let exact = ln_w_negative_binomial(mu1, fail, n).exp();
            if exact <= 1e-290 {
                continue;
            }
            let listed = form.value(n).map_err(|e| e.to_string())?;
            worst = worst.max(rel(w.w(n), exact)).max(rel(listed, exact));
        }
    }
    check(worst <= 1e-10, format!("max relative error {worst:.2e} over n <= {n_max}"))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let u = random_pmf(&mut rng, 5);
        let mu1: f64 = u.iter().enumerate().map(|(k, p)| k as f64 * p).sum();
        let (u1, u2, u3, u4) = (u[1], u[2], u[3], u[4]);
        let listed = [
            u1 * u1 / mu1,
            3.0 * u1 * u1 * u2 / mu1.powi(2),
            4.0 / mu1.powi(3) * u1 * u1 * (2.0 * u2 * u2 + u1 * u3),
            5.0 / mu1.powi(4) * u1 * u1 * (4.0 * u2.powi(3) + 6.0 * u1 * u2 * u3 + u1 * u1 * u4),
        ];
        let d = DegreeDistribution::from_pmf(u, None).map_err(|e| e.to_string())?;
        let w = component_sizes(&d, 5).map_err(|e| e.to_string())?;
        for (i, v) in listed.iter().enumerate() {
            worst = worst.max(rel(w.w(i + 2), *v));
        }
    }
    check(worst <= 1e-13, format!("100 PMFs, max relative error {worst:.2e} on w(2..5)"))
}

fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let len = rng.random_range(2..=8);
        let f = random_pmf(&mut rng, len);
        for n in 1..=6 {
            let fast = conv_power(&f, n, 10).to_vec();
            for (k, &v) in fast.iter().enumerate().take(11) {
                let brute = conv_power_brute(&f, n, k).map_err(|e| e.to_string())?;
                worst = worst.max(rel(v, brute));
            }
        }
    }
    check(worst <= 1e-12, format!("50 PMFs, n <= 6, k <= 10, max relative error {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let k_trunc = 60;
    let theta = |c: f64| Family::Poisson { c }.materialize(k_trunc).unwrap().moments().theta;
    let c = bisect(theta, 0.5, 1.5, 1e-15).ok_or("no critical Poisson mean")?;
    let d = Family::Poisson { c }.materialize(k_trunc).map_err(|e| e.to_string())?;
    let m = d.moments();
    if m.theta.abs() >= 1e-9 * m.mu1 {
        return Err(format!("root finding left theta = {:.2e}", m.theta));
    }
    let n_max = 10_000;
    let w = component_sizes(&d, n_max).map_err(|e| e.to_string())?;
    let fit = fit_window(w.log_values(), 1000, n_max).map_err(|e| e.to_string())?;
    // Local limit theorem for u1^{*n} at its mean: w(n) ~ mu1 / sqrt(2 pi var(u1)) n^{-3/2}.
    let u1 = d.excess().map_err(|e| e.to_string())?;
    let mean: f64 = u1.pmf().iter().enumerate().map(|(k, p)| k as f64 * p).sum();
    let var: f64 = u1.pmf().iter().enumerate().map(|(k, p)| (k as f64 - mean).powi(2) * p).sum();
    let c1 = m.mu1 / (2.0 * PI * var).sqrt();
    let ratio = w.w(n_max) / (c1 * (n_max as f64).powf(-1.5));
    let lib_c1 = AsymptoteModel::of(&d).map_err(|e| e.to_string())?.constants().get("C1").unwrap_or(f64::NAN);
    check(
        (fit.slope + 1.5).abs() <= 0.02 && (0.98..=1.02).contains(&ratio) && rel(lib_c1, c1) < 1e-9,
        format!("c = {c:.12}, slope {:.4} on [1e3, 1e4], w/(C1 n^-1.5) = {ratio:.5} at n = 1e4", fit.slope),
    )
}

fn critical_power_law_s(beta: f64, k_trunc: usize) -> Result<f64, String> {
    bisect(|s| power_law_theta(beta, s, k_trunc), 0.1, 1.0, 1e-15).ok_or_else(|| "no critical s".to_string())
}

fn criterion_5() -> Outcome {
    let k = 10_000;
    let s = critical_power_law_s(3.5, k)?;
    let d = Family::PowerLaw { beta: 3.5, s }.materialize(k).map_err(|e| e.to_string())?;
    let slope = spot_slope(&d, 1e3, 1e4)?;
    check((slope + 5.0 / 3.0).abs() <= 0.05, format!("s = {s:.6}, slope {slope:.4} on [1e3, 1e4]"))
}

fn criterion_6() -> Outcome {
    let k = 10_000;
    let s = 0.25 * critical_power_law_s(3.5, k)?;
    let d = Family::PowerLaw { beta: 3.5, s }.materialize(k).map_err(|e| e.to_string())?;
    if d.moments().branch() != ThetaBranch::Negative {
        return Err("quarter-critical s is not subcritical".into());
    }
    // A pure power-law decay does not underflow within the horizon, so the last
    // computed decade is the final one.
    let slope = spot_slope(&d, 1e3, 1e4)?;
    check((slope + 2.5).abs() <= 0.1, format!("s = {s:.6}, slope {slope:.4} on [1e3, 1e4]"))
}

fn criterion_7() -> Outcome {
    let k = 30_000;
    let s = bisect(|s| power_law_theta(6.0, s, k) + 0.1, 1.0, 9.9, 1e-14).ok_or("no s with theta = -0.1")?;
    let d = Family::PowerLaw { beta: 6.0, s }.materialize(k).map_err(|e| e.to_string())?;
    let ns = log_points(2.0, k as f64, 120);
    let ln_w = component_sizes_at(&d, &ns).map_err(|e| e.to_string())?;
    let xs: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let mid = (k as f64).sqrt();
    let early = flattest_window(&xs, &ln_w, 10.0, mid, 10).map_err(|e| e.to_string())?;
    let late = flattest_window(&xs, &ln_w, mid, k as f64, 10).map_err(|e| e.to_string())?;
    check(
        (early.fit.slope + 1.5).abs() <= 0.3 && (late.fit.slope + 5.0).abs() <= 0.3,
        format!(
            "theta = -0.1: slope {:.3} on [{}, {}], {:.3} on [{}, {}]",
            early.fit.slope, early.a, early.b, late.fit.slope, late.a, late.b
        ),
    )
}

fn criterion_8() -> Outcome {
    let k = 10_000;
    let family = Family::power_law_with_tail_scale(2.6, 8.3e-5, k).map_err(|e| e.to_string())?;
    let d = family.materialize(k).map_err(|e| e.to_string())?;
    let tail = d.tail().ok_or("no tail metadata")?;
    if rel(tail.scale(), 8.3e-5) > 1e-9 {
        return Err(format!("tail scale {} instead of 8.3e-5", tail.scale()));
    }
    let case = classify(&d.moments(), d.tail()).map_err(|e| e.to_string())?.case;
    let slope = spot_slope(&d, 1e3, 1e4)?;
    check(
        (slope + 1.6).abs() <= 0.05 && case == Case::F,
        format!("slope {slope:.4} on [1e3, 1e4], final regime case {case}"),
    )
}

fn criterion_9() -> Outcome {
    let beta = 3.3;
    let k_trunc = 100_000;
    let with_cutoff = |s: f64, k_cut: usize| -> f64 {
        let d = Family::PowerLaw { beta, s }.materialize(k_trunc).unwrap();
        d.apply_cutoff(k_cut).unwrap().distribution.moments().theta
    };
    let s = bisect(|s| with_cutoff(s, 1000), 0.05, 5.0, 1e-15).ok_or("no s with theta(k_cut = 1000) = 0")?;
    let full = Family::PowerLaw { beta, s }.materialize(k_trunc).map_err(|e| e.to_string())?;
    let cut = |k_cut| full.apply_cutoff(k_cut).map(|c| c.distribution.moments());
    let (m_full, m_1000, m_100) =
        (full.moments(), cut(1000).map_err(|e| e.to_string())?, cut(100).map_err(|e| e.to_string())?);
    check(
        m_full.theta > 0.0 && m_1000.branch() == ThetaBranch::Zero && m_100.theta < 0.0,
        format!(
            "s = {s:.6}: theta {:+.4} (k <= 1e5), {:+.1e} (cutoff 1000), {:+.4} (cutoff 100)",
            m_full.theta, m_1000.theta, m_100.theta
        ),
    )
}

fn criterion_10() -> Outcome {
    let p = 0.6;
    let d = Family::Geometric { p }.materialize(200).map_err(|e| e.to_string())?;
    let est = ensemble_estimate(&d, 100_000, 50, 10).map_err(|e| e.to_string())?;
    let (mut worst, mut worst_n): (f64, usize) = (0.0, 0);
    for n in 1..=20 {
        let exact = if n == 1 { 0.0 } else { ln_w_negative_binomial(1.0 / p, 1.0 - p, n).exp() };
        let (mean, se) = est.at(n);
        let z = if se > 0.0 {
            (mean - exact).abs() / se
        } else if mean == exact {
            0.0
        } else {
            f64::INFINITY
        };
        if z > worst {
            (worst, worst_n) = (z, n);
        }
    }
    let regular = DegreeDistribution::from_pmf(vec![0.0, 0.0, 0.0, 1.0], None).map_err(|e| e.to_string())?;
    let mc = ensemble_estimate(&regular, 10_000, 10, 10).map_err(|e| e.to_string())?;
    let w = component_sizes(&regular, 1000).map_err(|e| e.to_string())?;
    let analytic = 1.0 - w.finite_mass() - w.tail_correction().unwrap_or(0.0);
    let gap = (mc.giant_hat - analytic).abs();
    check(
        worst <= 3.0 && gap <= 0.01,
        format!(
            "geometric: max |z| {worst:.2} (n = {worst_n}) for n <= 20; 3-regular: giant {:.4} vs {analytic:.4}",
            mc.giant_hat
        ),
    )
}

fn criterion_11() -> Outcome {
    let n = 100_000;
    let small = (n as f64).powf(2.0 / 3.0);
    let mut checked = 0;
    let mut wrong = Vec::new();
    for i in 0..20 {
        let c = 0.5 + i as f64 / 19.0;
        let d = Family::Poisson { c }.materialize(60).map_err(|e| e.to_string())?;
        let theta = d.moments().theta;
        if theta.abs() <= 0.05 {
            continue;
        }
        checked += 1;
        let est = ensemble_estimate(&d, n, 2, 11).map_err(|e| e.to_string())?;
        let largest = est.largest_hat * n as f64;
        let agrees = if theta > 0.0 { largest >= 0.01 * n as f64 } else { largest <= small };
        if !agrees {
            wrong.push(format!("c = {c:.3} (theta {theta:+.3}, largest {largest:.0})"));
        }
    }
    check(
        wrong.is_empty(),
        if wrong.is_empty() {
            format!("{checked} Poisson means with |theta| > 0.05 agree with the sign of theta")
        } else {
            format!("disagreement at {}", wrong.join(", "))
        },
    )
}

fn criterion_12() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut printed_gap = f64::INFINITY;
    for k_max in [2usize, 3, 5] {
        for c in [0.2, 0.5] {
            let d = Family::Binomial { k_max, c }.materialize(0).map_err(|e| e.to_string())?;
            let w = component_sizes(&d, 100).map_err(|e| e.to_string())?;
            let km = k_max as f64;
            for n in 2..=100usize {
                let nf = n as f64;
                let trials = nf * (km - 1.0);
                if nf - 2.0 > trials {
                    continue;
                }
                // u1 is Binomial(k_max - 1, c), so u1^{*n} is Binomial(n (k_max - 1), c).
                let exact = ((km * c).ln() - (nf - 1.0).ln()
                    + ln_choose(trials, nf - 2.0)
                    + (nf - 2.0) * c.ln()
                    + (trials - nf + 2.0) * (1.0 - c).ln())
                .exp();
                if exact <= 1e-290 {
                    continue;
                }
                let derived = ClosedForm::Binomial { k_max, c }.value(n).map_err(|e| e.to_string())?;
                worst = worst.max(rel(w.w(n), exact)).max(rel(derived, exact));
            }
            let printed = ClosedForm::BinomialAsPrinted { k_max, c }.value(2).map_err(|e| e.to_string())?;
            printed_gap = printed_gap.min(rel(printed, w.w(2)));
        }
    }
    check(
        worst <= 1e-10 && printed_gap > 1e-3,
        format!("derived form max relative error {worst:.2e}; as-printed form off by >= {printed_gap:.2} at n = 2"),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("closed forms, exponential and geometric", criterion_1),
        ("small-n listing", criterion_2),
        ("brute-force convolution powers", criterion_3),
        ("critical light tail, slope -3/2", criterion_4),
        ("critical heavy tail, slope -5/3", criterion_5),
        ("subcritical heavy tail, slope -5/2", criterion_6),
        ("crossover from -3/2 to -5", criterion_7),
        ("intermediate asymptote, slope -1.6", criterion_8),
        ("cutoff sign pattern", criterion_9),
        ("Monte Carlo consistency", criterion_10),
        ("giant component criterion", criterion_11),
        ("binomial closed form", criterion_12),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    let start = Instant::now();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name}: {detail} [{secs:.1} s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {id:>2} {name}: {detail} [{secs:.1} s]");
            }
        }
    }
    let total: Duration = start.elapsed();
    println!("{failed} failed, total {:.1} s", total.as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
