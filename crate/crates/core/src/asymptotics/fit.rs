//! Least-squares slopes of `ln w` against `ln n`.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Straight-line fit `ln w = intercept + slope * ln n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope.
    pub stderr: f64,
    /// Half-width of the 95% confidence interval of the slope.
    pub ci95: f64,
    pub points: usize,
}

/// Fits the log-log slope through the points `(n, ln_w)` with finite `ln_w`.
pub fn fit_slope(ns: &[f64], ln_w: &[f64]) -> Result<SlopeFit> {
    let pts: Vec<(f64, f64)> =
        ns.iter().zip(ln_w).filter(|(n, y)| **n > 0.0 && y.is_finite()).map(|(n, y)| (n.ln(), *y)).collect();
    let k = pts.len();
    if k < 3 {
        return Err(Error::InvalidParameter(format!("slope fit needs at least 3 finite points, got {k}")));
    }
    let kf = k as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / kf;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / kf;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::InvalidParameter("slope fit needs distinct n values".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let stderr = (rss / (kf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, kf - 2.0).expect("k >= 3").inverse_cdf(0.975);
    Ok(SlopeFit { slope, intercept, stderr, ci95: t * stderr, points: k })
}

/// Fits over the integer window `a..=b`, where `ln_w[n - 1]` holds `ln w(n)`.
pub fn fit_window(ln_w: &[f64], a: usize, b: usize) -> Result<SlopeFit> {
    if a < 1 || b > ln_w.len() || a >= b {
        return Err(Error::InvalidParameter(format!(
            "window [{a}, {b}] outside the computed range 1..={}",
            ln_w.len()
        )));
    }
    let ns: Vec<f64> = (a..=b).map(|n| n as f64).collect();
    fit_slope(&ns, &ln_w[a - 1..b])
}

/// Fits over `count` points spaced evenly in `ln n` on `[a, b]`, each `ln w(n)`
/// supplied by `ln_w_at`.
pub fn fit_log_spaced<F: Fn(f64) -> f64>(ln_w_at: F, a: f64, b: f64, count: usize) -> Result<SlopeFit> {
    let count = count.max(3);
    let (la, lb) = (a.ln(), b.ln());
    let ns: Vec<f64> = (0..count).map(|i| (la + (lb - la) * i as f64 / (count - 1) as f64).exp()).collect();
    let ys: Vec<f64> = ns.iter().map(|&n| ln_w_at(n)).collect();
    fit_slope(&ns, &ys)
}

/// Local slopes `d ln w / d ln n` by a centred difference over `n / factor .. n * factor`.
pub fn local_slopes(ln_w: &[f64], ns: &[usize], factor: f64) -> Vec<f64> {
    ns.iter()
        .map(|&n| {
            let lo = ((n as f64 / factor).round() as usize).max(1);
            let hi = ((n as f64 * factor).round() as usize).min(ln_w.len());
            if hi <= lo {
                return f64::NAN;
            }
            (ln_w[hi - 1] - ln_w[lo - 1]) / ((hi as f64).ln() - (lo as f64).ln())
        })
        .collect()
}

/// A fit together with the sampled window `[a, b]` it covers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowFit {
    pub a: f64,
    pub b: f64,
    pub fit: SlopeFit,
}

/// Slides a window of `span` consecutive samples over the points with `n` in `[lo, hi]`
/// and keeps the straightest one: the fit with the smallest slope standard error.
pub fn flattest_window(ns: &[f64], ln_w: &[f64], lo: f64, hi: f64, span: usize) -> Result<WindowFit> {
    let idx: Vec<usize> =
        (0..ns.len().min(ln_w.len())).filter(|&i| ns[i] >= lo && ns[i] <= hi && ln_w[i].is_finite()).collect();
    let span = span.max(3);
    if idx.len() < span {
        return Err(Error::InvalidParameter(format!("{} samples in [{lo}, {hi}], need at least {span}", idx.len())));
    }
    let mut best: Option<WindowFit> = None;
    for w in idx.windows(span) {
        let xs: Vec<f64> = w.iter().map(|&i| ns[i]).collect();
        let ys: Vec<f64> = w.iter().map(|&i| ln_w[i]).collect();
        let fit = fit_slope(&xs, &ys)?;
        if best.is_none_or(|b| fit.stderr < b.fit.stderr) {
            best = Some(WindowFit { a: xs[0], b: xs[span - 1], fit });
        }
    }
    Ok(best.expect("at least one window"))
}
