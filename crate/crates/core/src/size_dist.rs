//! Component size distribution `w(n)` of the configuration network.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{AsymptoteModel, Case, Classification};
use crate::conv::{conv_power, diagonal_powers, diagonal_powers_at};
use crate::degree::DegreeDistribution;
use crate::error::{Error, Result};
use crate::special::{ln_binomial, ln_gamma, log_sum_exp};

/// `w(1..=N)` with log companions, the finite mass and the giant-component estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSizeResult {
    w: Vec<f64>,
    log_w: Vec<f64>,
    finite_mass: f64,
    tail_correction: Option<f64>,
    giant_fraction_estimate: Option<f64>,
    classification: Option<Classification>,
}

impl ComponentSizeResult {
    /// Horizon `N`.
    pub fn n_max(&self) -> usize {
        self.w.len()
    }

    /// `w(n)`, zero where the value underflows.
    pub fn w(&self, n: usize) -> f64 {
        self.w[n - 1]
    }

    /// `ln w(n)`, `-inf` where `w(n)` is exactly zero.
    pub fn ln_w(&self, n: usize) -> f64 {
        self.log_w[n - 1]
    }

    /// `w(1), w(2), ...` as a slice starting at `n = 1`.
    pub fn values(&self) -> &[f64] {
        &self.w
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_w
    }

    /// `sum_{n <= N} w(n)`.
    pub fn finite_mass(&self) -> f64 {
        self.finite_mass
    }

    /// Estimated `sum_{n > N} w(n)` from the asymptote; `None` when no asymptote applies.
    pub fn tail_correction(&self) -> Option<f64> {
        self.tail_correction
    }

    /// `1 - finite_mass - tail_correction`, clamped to `[0, 1]`.
    pub fn giant_fraction_estimate(&self) -> Option<f64> {
        self.giant_fraction_estimate
    }

    pub fn classification(&self) -> Option<Classification> {
        self.classification
    }
}

fn ln_or_neg_inf(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

fn linear(ln: f64) -> f64 {
    if ln == f64::NEG_INFINITY {
        0.0
    } else {
        ln.exp()
    }
}

/// `w(n)` for `n = 1..=n_max` from the excess-degree convolution powers.
///
/// The tail correction and giant estimate are attached when the distribution can
/// be classified; failures of the asymptote leave them as `None`.
pub fn component_sizes(d: &DegreeDistribution, n_max: usize) -> Result<ComponentSizeResult> {
    if n_max < 1 {
        return Err(Error::InvalidParameter("horizon N must be >= 1".into()));
    }
    let u0 = d.prob(0);
    let m = d.moments();
    let mut log_w = vec![f64::NEG_INFINITY; n_max];
    let mut w = vec![0.0; n_max];
    w[0] = u0;
    log_w[0] = ln_or_neg_inf(u0);
    if m.mu1 <= 0.0 {
        return Ok(ComponentSizeResult {
            w,
            log_w,
            finite_mass: u0,
            tail_correction: Some(0.0),
            giant_fraction_estimate: Some(0.0),
            classification: None,
        });
    }
    let excess = d.excess()?;
    let diag = diagonal_powers(&excess, n_max);
    let ln_mu1 = m.mu1.ln();
    for n in 2..=n_max {
        let ln = ln_mu1 - ((n - 1) as f64).ln() + diag.ln_value(n);
        log_w[n - 1] = ln;
        w[n - 1] = linear(ln);
    }
    let finite_mass: f64 = w.iter().sum();
    let (tail_correction, classification) = attach_tail(d, &log_w);
    let giant_fraction_estimate = tail_correction.map(|t| (1.0 - finite_mass - t).clamp(0.0, 1.0));
    Ok(ComponentSizeResult { w, log_w, finite_mass, tail_correction, giant_fraction_estimate, classification })
}

fn attach_tail(d: &DegreeDistribution, log_w: &[f64]) -> (Option<f64>, Option<Classification>) {
    let Ok(model) = AsymptoteModel::of(d) else {
        return (None, None);
    };
    // without leaves there are no finite trees beyond isolated nodes
    if d.prob(1) == 0.0 {
        return (Some(0.0), Some(model.classification()));
    }
    let period = d.excess().map_or(1, |e| lattice_period(e.pmf()));
    (matched_tail_sum(&model, log_w, period).ok(), Some(model.classification()))
}

/// Span of the lattice that carries `u1`: `w(n)` vanishes unless `n - 2` is a
/// multiple of it.
fn lattice_period(u1: &[f64]) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    u1.iter().enumerate().skip(1).filter(|(_, &p)| p > 0.0).fold(0, |g, (k, _)| gcd(g, k)).max(1)
}

/// `sum_{n > N} w(n)` from the asymptote, rescaled so that it agrees with the computed
/// `w` over the last lattice period before `N = log_w.len()`.
///
/// The rescaling removes the leading finite-size correction of the asymptote. It is
/// skipped for `beta <= 3`, where `w` near `N` still follows a transient and the
/// final regime sets in only much later.
pub fn matched_tail_sum(model: &AsymptoteModel, log_w: &[f64], period: usize) -> Result<f64> {
    let n_max = log_w.len();
    let raw = model.tail_sum(n_max)?;
    let transient = matches!(model.case(), Case::E | Case::F);
    if transient || raw == 0.0 || n_max < period + 2 {
        return Ok(raw);
    }
    let window = n_max - period + 1..=n_max;
    let computed: Vec<f64> = window.clone().map(|n| log_w[n - 1]).collect();
    let asymptote: Vec<f64> = window.map(|n| model.ln_eval(n as f64)).collect();
    let ratio = log_sum_exp(&computed) - log_sum_exp(&asymptote);
    Ok(if ratio.is_finite() { raw * ratio.exp() } else { raw })
}

/// `ln w(n)` at selected `n` (each `>= 1`), without computing the full range.
pub fn component_sizes_at(d: &DegreeDistribution, ns: &[usize]) -> Result<Vec<f64>> {
    if ns.contains(&0) {
        return Err(Error::InvalidParameter("component sizes start at n = 1".into()));
    }
    let m = d.moments();
    let ln_u0 = ln_or_neg_inf(d.prob(0));
    if m.mu1 <= 0.0 {
        return Ok(ns.iter().map(|&n| if n == 1 { ln_u0 } else { f64::NEG_INFINITY }).collect());
    }
    let excess = d.excess()?;
    let big: Vec<usize> = ns.iter().copied().filter(|&n| n >= 2).collect();
    let diag = diagonal_powers_at(excess.pmf(), &big);
    let mut it = diag.into_iter();
    Ok(ns
        .iter()
        .map(|&n| if n == 1 { ln_u0 } else { m.mu1.ln() - ((n - 1) as f64).ln() + it.next().unwrap() })
        .collect())
}

/// Independent route to `ln w(n)`, `n >= 2`, through `[k u(k)]^{*n}(2n - 2) / ((n-1) mu1^{n-1})`.
pub fn component_size_via_degree_powers(d: &DegreeDistribution, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter("this route needs n >= 2".into()));
    }
    let m = d.moments();
    if m.mu1 <= 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let weighted: Vec<f64> = d.pmf().iter().enumerate().map(|(k, &u)| k as f64 * u).collect();
    let power = conv_power(&weighted, n, 2 * n - 2);
    Ok(power.ln_get(2 * n - 2) - ((n - 1) as f64).ln() - (n - 1) as f64 * m.mu1.ln())
}

/// Families with an exact expression for `w(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClosedForm {
    Exponential {
        lambda: f64,
    },
    Geometric {
        p: f64,
    },
    /// Derived by substituting `u1^{*n} = Binomial(n (k_max - 1), c)`.
    Binomial {
        k_max: usize,
        c: f64,
    },
    /// The binomial expression in the form it circulates in the literature, which
    /// lacks the `mu1` prefactor and has a different `(1 - c)` exponent. Kept for
    /// comparison only; it is wrong already at `n = 2`.
    BinomialAsPrinted {
        k_max: usize,
        c: f64,
    },
}

impl ClosedForm {
    fn check(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match *self {
            ClosedForm::Exponential { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
                bad(format!("exponential needs lambda > 0, got {lambda}"))
            }
            ClosedForm::Geometric { p } if !(p > 0.0 && p < 1.0) => bad(format!("geometric needs 0 < p < 1, got {p}")),
            ClosedForm::Binomial { k_max, c } | ClosedForm::BinomialAsPrinted { k_max, c }
                if k_max == 0 || !(c > 0.0 && c < 1.0) =>
            {
                bad(format!("binomial needs k_max >= 1 and 0 < c < 1, got k_max={k_max}, c={c}"))
            }
            _ => Ok(()),
        }
    }

    /// `ln w(n)` for `n >= 2`.
    pub fn ln_value(&self, n: usize) -> Result<f64> {
        self.check()?;
        if n < 2 {
            return Err(Error::InvalidParameter(format!("closed forms cover n >= 2, got {n}")));
        }
        let nf = n as f64;
        let gammas = ln_gamma(3.0 * nf - 2.0) - ln_gamma(nf) - ln_gamma(2.0 * nf);
        Ok(match *self {
            ClosedForm::Exponential { lambda } => {
                (2.0 * nf - 1.0) * (-(-lambda).exp_m1()).ln() - lambda * (nf - 1.0) + gammas
            }
            ClosedForm::Geometric { p } => (nf - 2.0) * (-p).ln_1p() + (2.0 * nf - 1.0) * p.ln() + gammas,
            ClosedForm::Binomial { k_max, c } => {
                let trials = nf * (k_max as f64 - 1.0);
                if nf - 2.0 > trials {
                    return Ok(f64::NEG_INFINITY);
                }
                (k_max as f64 * c).ln() - (nf - 1.0).ln()
                    + ln_binomial(trials, nf - 2.0)
                    + (nf - 2.0) * c.ln()
                    + (trials - nf + 2.0) * (-c).ln_1p()
            }
            ClosedForm::BinomialAsPrinted { k_max, c } => {
                let km = k_max as f64;
                if nf - 2.0 > nf * km - nf {
                    return Ok(f64::NEG_INFINITY);
                }
                -(nf - 1.0).ln()
                    + ln_binomial(nf * km - nf, nf - 2.0)
                    + (nf * km - 2.0 * nf - 2.0) * (-c).ln_1p()
                    + (nf - 2.0) * c.ln()
            }
        })
    }

    pub fn value(&self, n: usize) -> Result<f64> {
        self.ln_value(n).map(linear)
    }
}

/// Giant-component fraction `1 - sum_{n<=N} w(n) - tail`, clamped to `[0, 1]`, where the
/// tail beyond `N` is summed from `model` (see [`matched_tail_sum`]).
pub fn giant_fraction(d: &DegreeDistribution, n_max: usize, model: &AsymptoteModel) -> Result<f64> {
    let sizes = component_sizes(d, n_max)?;
    let tail = if d.prob(1) == 0.0 {
        0.0
    } else {
        matched_tail_sum(model, sizes.log_values(), lattice_period(d.excess()?.pmf()))?
    };
    Ok((1.0 - sizes.finite_mass() - tail).clamp(0.0, 1.0))
}
