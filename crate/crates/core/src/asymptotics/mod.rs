//! Large-`n` behaviour of the component size distribution.
//!
//! [`classify`] picks one of six regimes from the moments and the tail metadata of
//! the degree distribution; [`AsymptoteModel`] evaluates the matching asymptote,
//! always in the log domain first. Light-tailed and `beta > 4` distributions are
//! governed by the Gaussian limit of the excess-degree convolution powers, the
//! remaining heavy-tailed cases by one-sided stable laws.

pub mod fit;

use std::f64::consts::{LN_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::degree::{density_class, DegreeDistribution, MomentSummary, TailSpec, ThetaBranch};
use crate::error::{Error, Result};
use crate::special::{gauss_legendre, hurwitz_zeta, ln_gamma};

const BETA_TOLERANCE: f64 = 1e-12;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Asymptotic regime, keyed by the tail exponent of the degree distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    /// No algebraic tail; all moments finite.
    A,
    /// Algebraic tail with `beta > 4`.
    B,
    /// `beta = 4`.
    C,
    /// `3 < beta < 4`.
    D,
    /// `beta = 3`.
    E,
    /// `2 < beta < 3`.
    F,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl fmt::Display for ThetaBranch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThetaBranch::Negative => "negative",
            ThetaBranch::Zero => "zero",
            ThetaBranch::Positive => "positive",
        })
    }
}

/// Case and branch, before any constants are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub case: Case,
    pub branch: ThetaBranch,
}

/// Selects the asymptotic regime. Moment finiteness is read from the tail flags.
pub fn classify(m: &MomentSummary, tail: Option<&TailSpec>) -> Result<Classification> {
    let Some(tail) = tail else {
        return Ok(Classification { case: Case::A, branch: m.branch() });
    };
    let beta = tail.beta();
    let near = |x: f64| (beta - x).abs() <= BETA_TOLERANCE;
    let case = if near(4.0) {
        Case::C
    } else if near(3.0) {
        Case::E
    } else if beta > 4.0 {
        Case::B
    } else if beta > 3.0 {
        Case::D
    } else if beta > 2.0 {
        Case::F
    } else {
        return Err(Error::Unclassifiable { beta, class: density_class(beta) });
    };
    let branch = match case {
        Case::E | Case::F => ThetaBranch::Positive,
        _ => m.branch(),
    };
    Ok(Classification { case, branch })
}

/// Named constants of an asymptote, stored as natural logs so that none underflows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Constants {
    entries: Vec<(&'static str, f64)>,
}

impl Constants {
    fn push(&mut self, name: &'static str, ln_value: f64) {
        self.entries.push((name, ln_value));
    }

    pub fn ln(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|(n, _)| *n == name).map(|&(_, v)| v)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.ln(name).map(f64::exp)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.iter().map(|&(n, _)| n)
    }

    /// `(name, value, ln value)` triples in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64, f64)> + '_ {
        self.entries.iter().map(|&(n, l)| (n, l.exp(), l))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn need(&self, name: &str) -> f64 {
        self.ln(name).unwrap_or_else(|| panic!("constant {name} not computed"))
    }
}

fn ln_positive(x: f64, what: &str) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x.ln())
    } else {
        Err(Error::OutOfDomain(format!("{what} = {x} must be positive")))
    }
}

fn tail_of(tail: Option<&TailSpec>) -> Result<&TailSpec> {
    tail.ok_or(Error::MissingParameter("tail scale s"))
}

/// Natural log of a single named constant: `C1`, `C2`, `C1'`, `C2'`, `C3` .. `C11`.
///
/// `alpha = beta - 2` and `s` come from `tail`; constants that need them fail with
/// [`Error::MissingParameter`] when no tail is given.
pub fn ln_constant(name: &str, m: &MomentSummary, tail: Option<&TailSpec>) -> Result<f64> {
    let var = m.excess_variance_numerator();
    let heavy = || -> Result<(f64, f64, f64)> {
        let t = tail_of(tail)?;
        Ok((t.alpha(), t.scale(), t.scale().ln()))
    };
    // ln(2 Gamma(a) sin(pi a / 2)) without the factor 2
    let stable_core = |a: f64| ln_gamma(a) + (PI * a / 2.0).sin().ln();
    Ok(match name {
        "C1" => {
            let v = ln_positive(var, "mu1*mu3 - mu2^2")?;
            2.0 * m.mu1.ln() - 0.5 * ((2.0 * PI).ln() + v)
        }
        "C2" => {
            let v = ln_positive(var, "mu1*mu3 - mu2^2")?;
            2.0 * m.theta.abs().ln() - (LN_2 + v)
        }
        "C1'" => {
            let (_, s, _) = heavy()?;
            m.mu1.ln() - 0.5 * (2.0 * PI * s).ln()
        }
        "C2'" => {
            let (_, s, ln_s) = heavy()?;
            let _ = s;
            2.0 * m.theta.abs().ln() - (LN_2 + ln_s + 2.0 * m.mu1.ln())
        }
        "C3" => {
            let (a, _, ln_s) = heavy()?;
            let gap = ln_positive(2.0 * m.mu1 - m.mu2, "2 mu1 - mu2")?;
            ln_s + (a + 2.0) * m.mu1.ln() + ln_gamma(a + 1.0) - (a + 1.0) * gap - ln_gamma(a)
        }
        "C4" => {
            let (a, _, ln_s) = heavy()?;
            let sin_inv = ln_positive((PI / a).sin(), "sin(pi/alpha)")?;
            m.mu1.ln() + ln_gamma(1.0 + 1.0 / a) + sin_inv + (LN_2 + stable_core(a) - (a + 1.0) * LN_PI - ln_s) / a
        }
        "C5" => {
            let (a, _, ln_s) = heavy()?;
            let excess = ln_positive(m.mu2 / m.mu1 - 2.0, "mu2/mu1 - 2")?;
            let inner = (2.0 - a) * LN_2 + (2.0 - a) * excess + stable_core(a) - a.ln() - a * LN_PI - ln_s;
            m.mu1.ln() - 0.5 * ln_positive(a - 1.0, "alpha - 1")? + inner / (2.0 * a - 2.0)
        }
        "C6" => {
            let (a, _, ln_s) = heavy()?;
            let excess = ln_positive(m.mu2 / m.mu1 - 2.0, "mu2/mu1 - 2")?;
            let inner = LN_2 + a * excess + stable_core(a) - a * a.ln() - LN_PI - ln_s;
            ln_positive(a - 1.0, "alpha - 1")? + inner / (a - 1.0)
        }
        "C7" => {
            let (_, _, ln_s) = heavy()?;
            0.5 * LN_2 + m.mu1.ln() - 1.5 * LN_PI - ln_s
        }
        "C8" => {
            let (_, s, _) = heavy()?;
            (1.0 / (PI * s) + 0.5).ln()
        }
        "C9" => {
            let (_, s, _) = heavy()?;
            -1.0 - 2.0 / (PI * s)
        }
        "C10" => {
            let (a, _, ln_s) = heavy()?;
            let inner = 0.5 * LN_2 + stable_core(a) - a.ln() - a * LN_PI - ln_s;
            m.mu1.ln() - 0.5 * ln_positive(2.0 - 2.0 * a, "2 - 2 alpha")? + inner / (2.0 * a - 2.0)
        }
        "C11" => {
            let (a, _, ln_s) = heavy()?;
            let inner = 0.5 * LN_2 + stable_core(a) - LN_PI - a * a.ln() - ln_s;
            ln_positive(1.0 - a, "1 - alpha")? + inner / (a - 1.0)
        }
        other => return Err(Error::InvalidParameter(format!("unknown constant {other}"))),
    })
}

/// Names of the constants used by one row of the regime table.
pub fn constant_names(c: Classification) -> &'static [&'static str] {
    use ThetaBranch::*;
    match (c.case, c.branch) {
        (Case::A, Zero) | (Case::B, Zero) => &["C1"],
        (Case::A, _) | (Case::B, Positive) => &["C1", "C2"],
        (Case::B, Negative) | (Case::C, Negative) | (Case::D, Negative) => &["C3"],
        (Case::C, Zero) => &["C1'"],
        (Case::C, Positive) => &["C1'", "C2'"],
        (Case::D, Zero) => &["C4"],
        (Case::D, Positive) => &["C5", "C6"],
        (Case::E, _) => &["C7", "C8", "C9"],
        (Case::F, _) => &["C10", "C11"],
    }
}

/// Constants needed by the regime that [`classify`] assigns.
pub fn regime_constants(m: &MomentSummary, tail: Option<&TailSpec>) -> Result<Constants> {
    let c = classify(m, tail)?;
    let mut out = Constants::default();
    for &name in constant_names(c) {
        out.push(name, ln_constant(name, m, tail)?);
    }
    Ok(out)
}

/// Asymptote of `w(n)` for one degree distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoteModel {
    case: Case,
    branch: ThetaBranch,
    constants: Constants,
    alpha: Option<f64>,
    s: Option<f64>,
    degenerate: bool,
}

impl AsymptoteModel {
    pub fn of(d: &DegreeDistribution) -> Result<Self> {
        Self::from_moments(&d.moments(), d.tail())
    }

    /// Builds the model. Distributions whose excess degree is deterministic have a
    /// zero variance in the Gaussian regimes; their asymptote is identically zero.
    pub fn from_moments(m: &MomentSummary, tail: Option<&TailSpec>) -> Result<Self> {
        let c = classify(m, tail)?;
        let gaussian = matches!(c.case, Case::A) || (c.case == Case::B && c.branch != ThetaBranch::Negative);
        let degenerate = gaussian && m.excess_variance_numerator() <= 1e-12 * m.mu1 * m.mu3;
        let constants = if degenerate { Constants::default() } else { regime_constants(m, tail)? };
        Ok(Self {
            case: c.case,
            branch: c.branch,
            constants,
            alpha: tail.map(|t| t.alpha()),
            s: tail.map(|t| t.scale()),
            degenerate,
        })
    }

    pub fn case(&self) -> Case {
        self.case
    }

    pub fn branch(&self) -> ThetaBranch {
        self.branch
    }

    pub fn classification(&self) -> Classification {
        Classification { case: self.case, branch: self.branch }
    }

    pub fn constants(&self) -> &Constants {
        &self.constants
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn s(&self) -> Option<f64> {
        self.s
    }

    /// True when the asymptote vanishes identically (deterministic excess degree).
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Exponent of the algebraic factor `n^{-eta}` multiplying the row's other factors.
    pub fn power_exponent(&self) -> f64 {
        use ThetaBranch::*;
        let a = self.alpha.unwrap_or(f64::NAN);
        match (self.case, self.branch) {
            (Case::B | Case::C | Case::D, Negative) => -a - 1.0,
            (Case::D, Zero) => -1.0 / a - 1.0,
            (Case::E, _) => 1.0 / PI - 2.0,
            _ => -1.5,
        }
    }

    /// True when the row is a pure algebraic decay, possibly with a log factor.
    pub fn is_algebraic(&self) -> bool {
        self.branch == ThetaBranch::Zero || (self.branch == ThetaBranch::Negative && self.case != Case::A)
    }

    /// `ln w(n)` according to the asymptote (`-inf` for a degenerate model).
    pub fn ln_eval(&self, n: f64) -> f64 {
        use ThetaBranch::*;
        if self.degenerate {
            return f64::NEG_INFINITY;
        }
        let c = &self.constants;
        let ln_n = n.ln();
        let power = self.power_exponent() * ln_n;
        match (self.case, self.branch) {
            (Case::A, Zero) | (Case::B, Zero) => c.need("C1") + power,
            (Case::A, _) | (Case::B, Positive) => c.need("C1") - c.get("C2").unwrap() * n + power,
            (_, Negative) => c.need("C3") + power,
            (Case::C, Zero) => c.need("C1'") + power - 0.5 * ln_n.ln(),
            (Case::C, Positive) => c.need("C1'") + power - 0.5 * ln_n.ln() - c.get("C2'").unwrap() * n / ln_n,
            (Case::D, Zero) => c.need("C4") + power,
            (Case::D, Positive) => c.need("C5") - c.get("C6").unwrap() * n + power,
            (Case::E, _) => {
                let c8 = c.get("C8").unwrap();
                let decay = (c.need("C9") + 2.0 / PI * ln_n).exp();
                c.need("C7") - c8 - decay + power
            }
            (Case::F, _) => c.need("C10") - c.get("C11").unwrap() * n + power,
        }
    }

    pub fn eval(&self, n: f64) -> f64 {
        self.ln_eval(n).exp()
    }

    /// Analytic local slope `d ln w / d ln n`.
    pub fn log_slope(&self, n: f64) -> f64 {
        use ThetaBranch::*;
        let c = &self.constants;
        let p = self.power_exponent();
        let ln_n = n.ln();
        match (self.case, self.branch) {
            (Case::A, Negative | Positive) | (Case::B, Positive) => p - c.get("C2").unwrap() * n,
            (Case::C, Zero) => p - 0.5 / ln_n,
            (Case::C, Positive) => p - 0.5 / ln_n - c.get("C2'").unwrap() * n * (ln_n - 1.0) / (ln_n * ln_n),
            (Case::D, Positive) => p - c.get("C6").unwrap() * n,
            (Case::E, _) => p - 2.0 / PI * (c.need("C9") + 2.0 / PI * ln_n).exp(),
            (Case::F, _) => p - c.get("C11").unwrap() * n,
            _ => p,
        }
    }

    /// `sum_{n > n_max} w(n)` according to the asymptote.
    ///
    /// Pure power rows use the Hurwitz zeta function; all others are summed directly
    /// for a stretch and then closed with an Euler-Maclaurin integral.
    pub fn tail_sum(&self, n_max: usize) -> Result<f64> {
        if self.degenerate {
            return Ok(0.0);
        }
        let first = n_max as f64 + 1.0;
        let log_factor = self.case == Case::C && self.branch == ThetaBranch::Zero;
        if self.is_algebraic() && !log_factor {
            let p = -self.power_exponent();
            let ln_c = self.ln_eval(1.0);
            return Ok((ln_c).exp() * hurwitz_zeta(p, first));
        }
        let first = first.max(3.0);
        let ln0 = self.ln_eval(first);
        if ln0 == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let rel = |x: f64| (self.ln_eval(x) - ln0).exp();
        const DIRECT: usize = 64;
        let mut total: f64 = (0..DIRECT).map(|i| rel(first + i as f64)).sum();
        let a = first + DIRECT as f64;
        let fa = rel(a);
        // f'(a) = f(a) g'(a) with g = ln f, g'(x) = slope / x
        let dfa = fa * self.log_slope(a) / a;
        total += 0.5 * fa - dfa / 12.0;
        let rule = gauss_legendre(16);
        let mut x = a;
        let mut converged = false;
        for _ in 0..100_000 {
            let g_prime = (self.log_slope(x) / x).abs();
            let width = if g_prime > 0.0 { x.min(4.0 / g_prime) } else { x };
            let half = 0.5 * width;
            let block: f64 = rule.iter().map(|&(t, w)| w * rel(x + half * (1.0 + t))).sum::<f64>() * half;
            total += block;
            x += width;
            if block <= 1e-15 * total || !x.is_finite() {
                converged = block <= 1e-15 * total;
                break;
            }
        }
        if !converged {
            return Err(Error::NotConverged(format!(
                "asymptote tail beyond n={n_max} for case {} ({})",
                self.case, self.branch
            )));
        }
        Ok((ln0 + total.ln()).exp())
    }
}

/// Gaussian-regime asymptote `mu1^2 n^{-3/2} exp(-theta^2 n / (2V)) / sqrt(2 pi V)`,
/// `V = mu1 mu3 - mu2^2`.
pub fn case_a_asymptote(m: &MomentSummary, n: f64) -> Result<f64> {
    let v = m.excess_variance_numerator();
    if v <= 1e-12 * m.mu1 * m.mu3 {
        return Err(Error::DegenerateVariance { value: v });
    }
    let ln = 2.0 * m.mu1.ln() - 1.5 * n.ln() - m.theta * m.theta * n / (2.0 * v) - 0.5 * (2.0 * PI * v).ln();
    Ok(ln.exp())
}

/// Location and scale of the stable law approximating `u1^{*n}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableLawParams {
    pub mu_n: f64,
    pub gamma_n: f64,
    pub alpha: f64,
}

pub fn stable_params(alpha: f64, s: f64, m: &MomentSummary, n: f64) -> Result<StableLawParams> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let mu_n = if alpha > 1.0 {
        n * (m.mu2 - m.mu1) / m.mu1
    } else if alpha == 1.0 {
        s * n * n.ln()
    } else {
        0.0
    };
    let gamma_n = if alpha == 2.0 {
        (s * n * n.ln()).sqrt()
    } else if alpha == 1.0 {
        PI * n * s / 2.0
    } else {
        (PI * s).sqrt()
            * (2.0 * crate::special::gamma(alpha) * (alpha * PI / 2.0).sin()).powf(-1.0 / alpha)
            * n.powf(1.0 / alpha)
    };
    Ok(StableLawParams { mu_n, gamma_n, alpha })
}

/// Points around which the stable density is expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StableRegime {
    /// `x -> 0`, `1 < alpha <= 2`.
    AtZero,
    /// `x -> +inf`, `1 < alpha < 2`.
    ToPlusInf,
    /// `x -> -inf`, `1 < alpha < 2`.
    ToMinusInf,
    /// `x -> 0+`, `0 < alpha < 1`.
    ZeroPlus,
    /// `alpha = 1`.
    AlphaOne,
}

/// Leading term of the one-sided stable density in the given regime.
pub fn stable_leading(x: f64, alpha: f64, regime: StableRegime) -> Result<f64> {
    let out = |msg: &str| Err(Error::OutOfDomain(format!("{msg} (x={x}, alpha={alpha})")));
    match regime {
        StableRegime::AtZero => {
            if !(alpha > 1.0 && alpha <= 2.0) {
                return out("expansion at zero needs 1 < alpha <= 2");
            }
            Ok(crate::special::gamma(1.0 + 1.0 / alpha) * (PI / alpha).sin() / PI)
        }
        StableRegime::ToPlusInf => {
            if !(alpha > 1.0 && alpha < 2.0) || x <= 0.0 {
                return out("expansion at +inf needs 1 < alpha < 2 and x > 0");
            }
            let ln = ln_gamma(alpha + 1.0) - (alpha + 1.0) * x.ln() - ln_gamma(2.0 - alpha) - ln_gamma(alpha - 1.0);
            Ok(ln.exp())
        }
        StableRegime::ToMinusInf => {
            if !(alpha > 1.0 && alpha < 2.0) || x >= 0.0 {
                return out("expansion at -inf needs 1 < alpha < 2 and x < 0");
            }
            let y = x.abs() / alpha;
            let ln = -(alpha - 1.0) * y.powf(alpha / (alpha - 1.0)) + 0.5 * (1.0 / (alpha - 1.0) - 1.0) * y.ln()
                - 0.5 * (2.0 * PI * alpha * (alpha - 1.0)).ln();
            Ok(ln.exp())
        }
        StableRegime::ZeroPlus => {
            if !(alpha > 0.0 && alpha < 1.0) || x <= 0.0 {
                return out("expansion at 0+ needs 0 < alpha < 1 and x > 0");
            }
            let y = alpha / x;
            let ln = -(1.0 - alpha) * y.powf(alpha / (1.0 - alpha)) + 0.5 * (1.0 + 1.0 / (1.0 - alpha)) * y.ln()
                - 0.5 * (2.0 * PI * alpha * (1.0 - alpha)).ln();
            Ok(ln.exp())
        }
        StableRegime::AlphaOne => {
            if alpha != 1.0 {
                return out("alpha = 1 expansion");
            }
            Ok(((x - 1.0) / 2.0 - (x - 1.0).exp()).exp() / (2.0 * PI).sqrt())
        }
    }
}

/// `ln` of the transient asymptote that heavy tails with `0 < alpha <= 1` show before
/// the exponential cutoff takes over.
pub fn ln_intermediate_asymptote(alpha: f64, s: f64, mu1: f64, n: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::OutOfDomain(format!("intermediate asymptote needs 0 < alpha <= 1, got {alpha}")));
    }
    if alpha == 1.0 {
        let d = s * n.ln() - 1.0;
        Ok(mu1.ln() + s.ln() - 2.0 * d.abs().ln() - 2.0 * n.ln())
    } else {
        Ok(mu1.ln() + s.ln() + ln_gamma(alpha + 1.0) - ln_gamma(alpha) - (alpha + 1.0) * n.ln())
    }
}

pub fn intermediate_asymptote(alpha: f64, s: f64, mu1: f64, n: f64) -> Result<f64> {
    ln_intermediate_asymptote(alpha, s, mu1, n).map(f64::exp)
}

/// Size beyond which the transient asymptote no longer describes `w(n)`.
///
/// For `alpha = 1` this is `e^{1/s}`. For `alpha < 1` it is the last crossing of
/// the transient with the exponentially cut power law of the `2 < beta < 3`
/// regime; when the transient stays above that curve throughout, the scale
/// `1/C11` of the exponential cutoff is returned.
pub fn switch_point(alpha: f64, s: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::OutOfDomain(format!("switch point needs 0 < alpha <= 1, got {alpha}")));
    }
    if alpha == 1.0 {
        return Ok((1.0 / s).exp());
    }
    // mu1 cancels between both curves
    let m = MomentSummary {
        mu1: 1.0,
        mu2: f64::INFINITY,
        mu3: f64::INFINITY,
        theta: f64::INFINITY,
        mu1_finite: true,
        mu2_finite: false,
        mu3_finite: false,
    };
    let tail = TailSpec::new(s, alpha + 2.0)?;
    let ln_c10 = ln_constant("C10", &m, Some(&tail))?;
    let c11 = ln_constant("C11", &m, Some(&tail))?.exp();
    let transient = ln_intermediate_asymptote(alpha, s, 1.0, 1.0)?;
    // gap(t) = ln transient - ln cut power law at n = e^t
    let gap = |t: f64| transient - ln_c10 + (0.5 - alpha) * t + c11 * t.exp();
    let t_min = if alpha > 0.5 { ((alpha - 0.5) / c11).ln().max(0.0) } else { 0.0 };
    if gap(t_min) >= 0.0 {
        return Ok(1.0 / c11);
    }
    let mut hi = t_min + 1.0;
    while gap(hi) < 0.0 {
        hi += 1.0;
    }
    let t = crate::special::bisect(gap, t_min, hi, 1e-12).expect("bracketed");
    Ok(t.exp())
}

/// Exponent `eta` of a heavy-tailed `w(n) ~ n^{-eta}`, or `None` when the branch has
/// a giant component and no algebraic tail.
///
/// At criticality the exponent is `3/2` for `beta >= 4` and `(beta-1)/(beta-2)` for
/// `3 <= beta < 4`, the larger of the two candidates in each range.
pub fn eta_exponent(beta: f64, branch: ThetaBranch) -> Result<Option<f64>> {
    match branch {
        ThetaBranch::Negative => {
            if beta > 3.0 + BETA_TOLERANCE {
                Ok(Some(beta - 1.0))
            } else {
                Err(Error::OutOfDomain(format!("subcritical branch needs beta > 3, got {beta}")))
            }
        }
        ThetaBranch::Zero => {
            if beta >= 4.0 - BETA_TOLERANCE {
                Ok(Some(1.5))
            } else if beta >= 3.0 - BETA_TOLERANCE {
                Ok(Some((beta - 1.0) / (beta - 2.0)))
            } else {
                Err(Error::OutOfDomain(format!("critical branch needs beta >= 3, got {beta}")))
            }
        }
        ThetaBranch::Positive => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::Family;

    fn moments(mu1: f64, mu2: f64, mu3: f64, heavy_beta: Option<f64>) -> MomentSummary {
        let b = heavy_beta;
        MomentSummary {
            mu1,
            mu2,
            mu3,
            theta: mu2 - 2.0 * mu1,
            mu1_finite: true,
            mu2_finite: b.is_none_or(|b| b > 3.0),
            mu3_finite: b.is_none_or(|b| b > 4.0),
        }
    }

    #[test]
    fn classify_examples() {
        let d = Family::Exponential { lambda: 1.05 }.materialize(400).unwrap();
        let c = classify(&d.moments(), None).unwrap();
        // theta = r (3r - 1) / (1 - r)^2 with r = e^{-1.05} > 1/3
        assert_eq!((c.case, c.branch), (Case::A, ThetaBranch::Positive));
        let d = Family::Exponential { lambda: 1.5 }.materialize(400).unwrap();
        assert_eq!(classify(&d.moments(), None).unwrap().branch, ThetaBranch::Negative);

        let m = moments(2.0, 4.0, 100.0, Some(3.5));
        let t = TailSpec::new(0.1, 3.5).unwrap();
        assert_eq!(classify(&m, Some(&t)).unwrap(), Classification { case: Case::D, branch: ThetaBranch::Zero });

        let m = moments(2.0, 3.0, 10.0, Some(6.0));
        let t = TailSpec::new(0.1, 6.0).unwrap();
        assert_eq!(classify(&m, Some(&t)).unwrap().case, Case::B);
        assert_eq!(eta_exponent(6.0, ThetaBranch::Negative).unwrap(), Some(5.0));

        for (beta, case) in [(4.0, Case::C), (3.0, Case::E), (2.6, Case::F)] {
            let t = TailSpec::new(0.1, beta).unwrap();
            let c = classify(&moments(2.0, 1.0, 1.0, Some(beta)), Some(&t)).unwrap();
            assert_eq!(c.case, case);
            if beta <= 3.0 {
                assert_eq!(c.branch, ThetaBranch::Positive);
            }
        }
        let t = TailSpec::new(0.1, 2.0).unwrap();
        assert!(matches!(classify(&moments(2.0, 1.0, 1.0, Some(2.0)), Some(&t)), Err(Error::Unclassifiable { .. })));
    }

    #[test]
    fn constant_examples() {
        let m = moments(2.0, 3.0, 7.0, Some(3.0));
        let t = TailSpec::new(0.1, 3.0).unwrap();
        let c7 = ln_constant("C7", &m, Some(&t)).unwrap().exp();
        assert!((c7 / (2.0 * 2f64.sqrt() / (PI.powf(1.5) * 0.1)) - 1.0).abs() < 1e-14);
        let t = TailSpec::new(2.0 / PI, 3.0).unwrap();
        assert!((ln_constant("C9", &m, Some(&t)).unwrap() + 2.0).abs() < 1e-15);
        let m = moments(2.0, 5.0, 17.0, None);
        let c2 = ln_constant("C2", &m, None).unwrap().exp();
        assert!((c2 - 1.0 / (2.0 * (34.0 - 25.0))).abs() < 1e-15);
        assert_eq!(ln_constant("C3", &m, None), Err(Error::MissingParameter("tail scale s")));
    }

    #[test]
    fn case_a_examples() {
        let m = moments(2.0, 4.0, 10.0, None);
        let c1 = 4.0 / (2.0 * PI * 4.0f64).sqrt();
        assert!((case_a_asymptote(&m, 100.0).unwrap() / (c1 * 1e-3) - 1.0).abs() < 1e-14);
        let m = moments(2.0, 4.0, 8.0, None);
        assert!(matches!(case_a_asymptote(&m, 10.0), Err(Error::DegenerateVariance { .. })));
    }

    #[test]
    fn stable_examples() {
        let m = moments(2.0, 3.0, 7.0, None);
        let p = stable_params(1.0, 0.1, &m, 100.0).unwrap();
        assert!((p.gamma_n - 5.0 * PI).abs() < 1e-12);
        let p = stable_params(2.0, 1.0, &m, std::f64::consts::E).unwrap();
        assert!((p.gamma_n - std::f64::consts::E.sqrt()).abs() < 1e-15);
        assert_eq!(stable_params(0.6, 0.1, &m, 10.0).unwrap().mu_n, 0.0);
        assert!(matches!(stable_params(2.5, 0.1, &m, 10.0), Err(Error::InvalidAlpha(_))));

        let at_zero: f64 = stable_leading(0.0, 2.0, StableRegime::AtZero).unwrap();
        assert!((at_zero - 1.0 / (2.0 * PI.sqrt())).abs() < 1e-15);
        let g = crate::special::gamma;
        let plus = stable_leading(10.0, 1.5, StableRegime::ToPlusInf).unwrap();
        assert!((plus / (g(2.5) * 10f64.powf(-2.5) / (g(0.5) * g(0.5))) - 1.0).abs() < 1e-13);
        let one = stable_leading(1.0, 1.0, StableRegime::AlphaOne).unwrap();
        assert!((one - (-1.0f64).exp() / (2.0 * PI).sqrt()).abs() < 1e-16);
        assert!(stable_leading(-1.0, 1.5, StableRegime::ToPlusInf).is_err());
    }

    #[test]
    fn intermediate_examples() {
        assert!((switch_point(1.0, 0.2).unwrap() - 5f64.exp()).abs() < 1e-10);
        let s: f64 = 0.2;
        let n = (2.0 / s).exp();
        let ln = ln_intermediate_asymptote(1.0, s, 3.0, n).unwrap();
        assert!((ln - (3.0 * s).ln() + 4.0 / s).abs() < 1e-12);
        let a = ln_intermediate_asymptote(0.6, 0.01, 1.0, 1e3).unwrap();
        let b = ln_intermediate_asymptote(0.6, 0.01, 1.0, 1e4).unwrap();
        assert!(((b - a) / 10f64.ln() + 1.6).abs() < 1e-12);
        assert!(matches!(intermediate_asymptote(1.5, 0.1, 1.0, 10.0), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta_exponent(3.5, ThetaBranch::Negative).unwrap(), Some(2.5));
        let eta = eta_exponent(3.5, ThetaBranch::Zero).unwrap().unwrap();
        assert!((eta - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(eta_exponent(5.0, ThetaBranch::Zero).unwrap(), Some(1.5));
        assert_eq!(eta_exponent(5.0, ThetaBranch::Positive).unwrap(), None);
        assert!(eta_exponent(2.5, ThetaBranch::Zero).is_err());
    }

    #[test]
    fn case_c_critical_value() {
        let m = moments(2.0, 4.0, 1e9, Some(4.0));
        let t = TailSpec::new(0.3, 4.0).unwrap();
        let model = AsymptoteModel::from_moments(&m, Some(&t)).unwrap();
        let n = std::f64::consts::E.powi(2);
        let c1p = model.constants().get("C1'").unwrap();
        assert!((model.eval(n) / (c1p * (-3.0f64).exp() / 2f64.sqrt()) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn tail_sum_of_power_row_matches_direct_sum() {
        let m = moments(2.0, 3.0, 1e9, Some(6.0));
        let t = TailSpec::new(0.3, 6.0).unwrap();
        let model = AsymptoteModel::from_moments(&m, Some(&t)).unwrap();
        let direct: f64 = (101..2_000_000).map(|n| model.eval(n as f64)).sum();
        let rest = model.eval(2e6) * 2e6 / 4.0;
        assert!(((direct + rest) / model.tail_sum(100).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn tail_sum_of_exponential_row_matches_direct_sum() {
        let m = moments(2.0, 3.9, 12.0, None);
        let model = AsymptoteModel::from_moments(&m, None).unwrap();
        let direct: f64 = (51..200_000).map(|n| model.eval(n as f64)).sum();
        assert!((direct / model.tail_sum(50).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn tail_sum_with_log_factor() {
        let m = moments(2.0, 4.0, 1e9, Some(4.0));
        let t = TailSpec::new(0.3, 4.0).unwrap();
        let model = AsymptoteModel::from_moments(&m, Some(&t)).unwrap();
        let direct: f64 = (11..1_000_001).map(|n| model.eval(n as f64)).sum();
        // remainder beyond 1e6 by the same numerical closure, checked for consistency
        let rest = model.tail_sum(1_000_000).unwrap();
        assert!(((direct + rest) / model.tail_sum(10).unwrap() - 1.0).abs() < 1e-9);
    }
}
