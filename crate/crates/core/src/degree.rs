//! Degree distributions of the configuration network: construction, built-in
//! families, cutoffs, moments and the excess (edge-biased) distribution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{hurwitz_zeta, ln_gamma};

/// Tolerance on the total mass of a stored distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Relative half-width of the band `|theta| <= ZERO_BAND * mu1` treated as critical.
pub const ZERO_BAND: f64 = 1e-9;

/// Algebraic tail `u1(k) ~ s k^{-alpha-1}` of the excess distribution, `alpha = beta - 2`.
///
/// `scale` is always the excess-distribution coefficient, which is what every
/// asymptotic constant consumes. For the PMF prefactor `u(k) ~ a k^{-beta}` the
/// relation is `a = scale * mu1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSpec {
    scale: f64,
    beta: f64,
    alpha: f64,
}

impl TailSpec {
    pub fn new(scale: f64, beta: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!("tail scale must be > 0, got {scale}")));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("tail exponent must be finite, got {beta}")));
        }
        Ok(Self { scale, beta, alpha: beta - 2.0 })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Probability mass function over degrees `0..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    pmf: Vec<f64>,
    tail: Option<TailSpec>,
    label: String,
    normalization: f64,
    truncated_mass: f64,
}

impl DegreeDistribution {
    /// Builds a distribution from values that must already sum to one.
    pub fn from_pmf(values: Vec<f64>, tail: Option<TailSpec>) -> Result<Self> {
        let sum = validate(&values)?;
        if (sum - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self::assemble(values, tail, 1.0))
    }

    /// Builds a distribution from nonnegative weights, dividing by their sum.
    pub fn from_weights(values: Vec<f64>, tail: Option<TailSpec>) -> Result<Self> {
        let sum = validate(&values)?;
        let pmf = if sum == 1.0 { values } else { values.into_iter().map(|v| v / sum).collect() };
        Ok(Self::assemble(pmf, tail, sum))
    }

    fn assemble(mut pmf: Vec<f64>, tail: Option<TailSpec>, normalization: f64) -> Self {
        while pmf.len() > 1 && *pmf.last().unwrap() == 0.0 {
            pmf.pop();
        }
        Self { pmf, tail, label: String::new(), normalization, truncated_mass: 0.0 }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_tail(mut self, tail: Option<TailSpec>) -> Self {
        self.tail = tail;
        self
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// `u(k)`, zero outside the stored support.
    pub fn prob(&self, k: usize) -> f64 {
        self.pmf.get(k).copied().unwrap_or(0.0)
    }

    pub fn k_max(&self) -> usize {
        self.pmf.len() - 1
    }

    pub fn tail(&self) -> Option<&TailSpec> {
        self.tail.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Sum of the raw input values that were divided out (1 when none).
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// Mass of an infinite-support family lying beyond the materialized degrees.
    pub fn truncated_mass(&self) -> f64 {
        self.truncated_mass
    }

    pub fn moments(&self) -> MomentSummary {
        MomentSummary::of(self)
    }

    pub fn excess(&self) -> Result<ExcessDistribution> {
        ExcessDistribution::of(self)
    }

    /// Zeroes `u(k)` for `k > k_cut` and renormalizes. The tail metadata is dropped
    /// because the result has finite support.
    pub fn apply_cutoff(&self, k_cut: usize) -> Result<Cutoff> {
        if k_cut < 1 {
            return Err(Error::InvalidParameter("cutoff degree must be >= 1".into()));
        }
        if self.k_max() <= k_cut {
            return Ok(Cutoff { distribution: self.clone(), removed_mass: 0.0 });
        }
        let kept: f64 = self.pmf[..=k_cut].iter().sum();
        if kept <= 0.0 {
            return Err(Error::AllMassRemoved { k_cut });
        }
        let removed_mass: f64 = self.pmf[k_cut + 1..].iter().sum();
        let pmf = self.pmf[..=k_cut].iter().map(|v| v / kept).collect();
        let mut distribution = Self::assemble(pmf, None, self.normalization);
        distribution.truncated_mass = self.truncated_mass;
        distribution.label = format!("{} cutoff={k_cut}", self.label).trim().to_string();
        Ok(Cutoff { distribution, removed_mass })
    }
}

fn validate(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if value < 0.0 {
            return Err(Error::NegativeMass { index, value });
        }
    }
    let sum: f64 = values.iter().sum();
    if sum <= 0.0 {
        return Err(Error::EmptyDistribution);
    }
    Ok(sum)
}

/// Result of [`DegreeDistribution::apply_cutoff`].
#[derive(Debug, Clone)]
pub struct Cutoff {
    pub distribution: DegreeDistribution,
    /// Probability mass (before renormalization) that sat above the cutoff.
    pub removed_mass: f64,
}

/// Built-in parametric degree distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `u(k) = (1 - e^{-lambda}) e^{-lambda k}`, `k >= 0`.
    Exponential { lambda: f64 },
    /// `u(k) = (1 - p)^{k-1} p`, `k >= 1`.
    Geometric { p: f64 },
    /// `u(k) = C(k_max, k) c^k (1 - c)^{k_max - k}`.
    Binomial { k_max: usize, c: f64 },
    /// `u(k) = e^{-c} c^k / k!`.
    Poisson { c: f64 },
    /// `u(1) = C`, `u(k) = s (beta - 2) k^{-beta}` for `k >= 2`; `s` is the PMF
    /// parameter, not the excess-tail scale.
    PowerLaw { beta: f64, s: f64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Exponential { .. } => "exponential",
            Family::Geometric { .. } => "geometric",
            Family::Binomial { .. } => "binomial",
            Family::Poisson { .. } => "poisson",
            Family::PowerLaw { .. } => "powerlaw",
        }
    }

    pub fn has_finite_support(&self) -> bool {
        matches!(self, Family::Binomial { .. })
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            Family::Exponential { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
                bad(format!("exponential needs lambda > 0, got {lambda}"))
            }
            Family::Geometric { p } if !(p > 0.0 && p < 1.0) => bad(format!("geometric needs p in (0,1), got {p}")),
            Family::Binomial { c, .. } if !(c > 0.0 && c < 1.0) => bad(format!("binomial needs c in (0,1), got {c}")),
            Family::Binomial { k_max: 0, .. } => bad("binomial needs k_max >= 1".into()),
            Family::Poisson { c } if !(c > 0.0 && c.is_finite()) => bad(format!("poisson needs c > 0, got {c}")),
            Family::PowerLaw { beta, s } => {
                if !(beta > 0.0 && beta.is_finite()) {
                    bad(format!("powerlaw needs beta > 0, got {beta}"))
                } else if !(s * (beta - 2.0) > 0.0 && s.is_finite()) {
                    bad(format!("powerlaw needs s*(beta-2) > 0, got s={s}, beta={beta}"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    /// The power-law family whose materialization on `0..=k_trunc` has excess-tail
    /// scale `tail_scale`.
    ///
    /// With `a = s (beta - 2)` the materialized mean degree is `1 + a S`,
    /// `S = sum_{k=2}^{k_trunc} (k^{1-beta} - k^{-beta})`, so `a / mu1 = tail_scale`
    /// has the explicit solution `a = tail_scale / (1 - tail_scale S)`.
    pub fn power_law_with_tail_scale(beta: f64, tail_scale: f64, k_trunc: usize) -> Result<Family> {
        if !(beta > 2.0 && tail_scale > 0.0 && tail_scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "tail scale conversion needs beta > 2 and scale > 0, got beta={beta}, scale={tail_scale}"
            )));
        }
        let sum: f64 = (2..=k_trunc).map(|k| (k as f64).powf(1.0 - beta) - (k as f64).powf(-beta)).sum();
        let denom = 1.0 - tail_scale * sum;
        if denom <= 0.0 {
            return Err(Error::InvalidParameter(format!("no power law has excess-tail scale {tail_scale}")));
        }
        Ok(Family::PowerLaw { beta, s: tail_scale / denom / (beta - 2.0) })
    }

    /// Materializes the PMF on degrees `0..=k_trunc` (ignored for the binomial
    /// family). The mass beyond `k_trunc` is recorded, not folded into the PMF.
    pub fn materialize(&self, k_trunc: usize) -> Result<DegreeDistribution> {
        self.check()?;
        if !self.has_finite_support() && k_trunc < 1 {
            return Err(Error::InvalidParameter("k_trunc must be >= 1".into()));
        }
        let (values, truncated, tail_prefactor) = match *self {
            Family::Exponential { lambda } => {
                let ln_c = (-(-lambda).exp_m1()).ln();
                let v = (0..=k_trunc).map(|k| (ln_c - lambda * k as f64).exp()).collect();
                (v, (-lambda * (k_trunc as f64 + 1.0)).exp(), None)
            }
            Family::Geometric { p } => {
                let ln_q = (-p).ln_1p();
                let mut v = vec![0.0; k_trunc + 1];
                for (k, slot) in v.iter_mut().enumerate().skip(1) {
                    *slot = (p.ln() + ln_q * (k as f64 - 1.0)).exp();
                }
                (v, (ln_q * k_trunc as f64).exp(), None)
            }
            Family::Binomial { k_max, c } => {
                let n = k_max as f64;
                let v = (0..=k_max)
                    .map(|k| {
                        let k = k as f64;
                        let ln_choose = ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0);
                        (ln_choose + k * c.ln() + (n - k) * (-c).ln_1p()).exp()
                    })
                    .collect();
                (v, 0.0, None)
            }
            Family::Poisson { c } => {
                let v: Vec<f64> =
                    (0..=k_trunc).map(|k| (k as f64 * c.ln() - c - ln_gamma(k as f64 + 1.0)).exp()).collect();
                let kept: f64 = v.iter().sum();
                (v, (1.0 - kept).max(0.0), None)
            }
            Family::PowerLaw { beta, s } => {
                let a = s * (beta - 2.0);
                let mut v = vec![0.0; k_trunc + 1];
                for (k, slot) in v.iter_mut().enumerate().skip(2) {
                    *slot = a * (k as f64).powf(-beta);
                }
                let tail_mass: f64 = v.iter().sum();
                if tail_mass >= 1.0 {
                    return Err(Error::NormalizationImpossible { tail_mass });
                }
                v[1] = 1.0 - tail_mass;
                let beyond = if beta > 1.0 { a * hurwitz_zeta(beta, k_trunc as f64 + 1.0) } else { f64::INFINITY };
                (v, beyond, Some((a, beta)))
            }
        };
        let mut d = DegreeDistribution::from_weights(values, None)?;
        d.normalization = 1.0;
        d.truncated_mass = truncated;
        if let Some((a, beta)) = tail_prefactor {
            let mu1 = d.moments().mu1;
            d.tail = Some(TailSpec::new(a / mu1, beta)?);
        }
        d.label = self.label();
        Ok(d)
    }

    fn label(&self) -> String {
        match *self {
            Family::Exponential { lambda } => format!("exponential(lambda={lambda})"),
            Family::Geometric { p } => format!("geometric(p={p})"),
            Family::Binomial { k_max, c } => format!("binomial(k_max={k_max}, c={c})"),
            Family::Poisson { c } => format!("poisson(c={c})"),
            Family::PowerLaw { beta, s } => format!("powerlaw(beta={beta}, s={s})"),
        }
    }
}

/// First three raw moments and the criticality parameter `theta = mu2 - 2 mu1`.
///
/// The finiteness flags come from the tail metadata, not from the numeric sums,
/// which are always finite on a materialized support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
    pub theta: f64,
    pub mu1_finite: bool,
    pub mu2_finite: bool,
    pub mu3_finite: bool,
}

/// Sign class of `theta` used to select an asymptotic branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaBranch {
    Negative,
    Zero,
    Positive,
}

impl MomentSummary {
    pub fn of(d: &DegreeDistribution) -> Self {
        let (mut mu1, mut mu2, mut mu3) = (0.0, 0.0, 0.0);
        for (k, &u) in d.pmf.iter().enumerate().skip(1) {
            let k = k as f64;
            mu1 += k * u;
            mu2 += k * k * u;
            mu3 += k * k * k * u;
        }
        let beta = d.tail.map(|t| t.beta);
        Self {
            mu1,
            mu2,
            mu3,
            theta: mu2 - 2.0 * mu1,
            mu1_finite: beta.is_none_or(|b| b > 2.0),
            mu2_finite: beta.is_none_or(|b| b > 3.0),
            mu3_finite: beta.is_none_or(|b| b > 4.0),
        }
    }

    /// `mu1 * mu3 - mu2^2`, which is `mu1^2` times the excess variance.
    pub fn excess_variance_numerator(&self) -> f64 {
        self.mu1 * self.mu3 - self.mu2 * self.mu2
    }

    /// Branch of `theta`, with a divergent `mu2` forcing the positive branch.
    pub fn branch(&self) -> ThetaBranch {
        if !self.mu2_finite {
            return ThetaBranch::Positive;
        }
        if self.theta.abs() <= ZERO_BAND * self.mu1 {
            ThetaBranch::Zero
        } else if self.theta < 0.0 {
            ThetaBranch::Negative
        } else {
            ThetaBranch::Positive
        }
    }
}

/// Excess degree distribution `u1(k) = (k+1) u(k+1) / mu1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcessDistribution {
    pmf: Vec<f64>,
    mean: f64,
    variance: f64,
    variance_finite: bool,
}

impl ExcessDistribution {
    pub fn of(d: &DegreeDistribution) -> Result<Self> {
        let m = d.moments();
        if m.mu1 <= 0.0 {
            return Err(Error::ZeroMeanDegree);
        }
        let pmf = if d.pmf.len() == 1 {
            vec![0.0]
        } else {
            (0..d.pmf.len() - 1).map(|k| (k + 1) as f64 * d.pmf[k + 1] / m.mu1).collect()
        };
        Ok(Self {
            pmf,
            mean: (m.mu2 - m.mu1) / m.mu1,
            variance: (m.mu3 * m.mu1 - m.mu2 * m.mu2) / (m.mu1 * m.mu1),
            variance_finite: m.mu3_finite,
        })
    }

    /// Wraps an arbitrary nonnegative sequence, computing mean and variance directly.
    pub fn from_sequence(pmf: Vec<f64>) -> Self {
        let mass: f64 = pmf.iter().sum();
        let mean = pmf.iter().enumerate().map(|(k, v)| k as f64 * v).sum::<f64>() / mass;
        let variance = pmf.iter().enumerate().map(|(k, v)| (k as f64 - mean).powi(2) * v).sum::<f64>() / mass;
        Self { pmf, mean, variance, variance_finite: true }
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// `M = (mu2 - mu1) / mu1`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `sigma^2 = (mu3 mu1 - mu2^2) / mu1^2`; see [`Self::variance_finite`].
    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn variance_finite(&self) -> bool {
        self.variance_finite
    }
}

/// Edge-density regime of a network whose degree distribution decays as `k^{-beta}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityClass {
    Sparse,
    SemiDense,
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub beta: f64,
    pub node_count: usize,
    pub class: DensityClass,
    /// Scaling form of the edge count with the constant prefactor dropped.
    pub expected_edges: f64,
}

pub fn density_class(beta: f64) -> DensityClass {
    if beta > 2.0 {
        DensityClass::Sparse
    } else if beta > 1.0 {
        DensityClass::SemiDense
    } else {
        DensityClass::Dense
    }
}

/// Expected edge count and density class for a sample of `node_count` nodes whose
/// degrees are cut off at `k = node_count`.
pub fn edge_density_class(beta: f64, node_count: usize) -> Result<DensityReport> {
    if beta.is_nan() || beta <= 0.0 || node_count < 2 {
        return Err(Error::InvalidParameter(format!(
            "edge density needs beta > 0 and N >= 2, got beta={beta}, N={node_count}"
        )));
    }
    let n = node_count as f64;
    let expected_edges = if beta == 2.0 {
        n * n.ln()
    } else {
        // |1 - N^{2-beta}| keeps the magnitude N^{3-beta} for beta < 2
        n * (1.0 - n.powf(2.0 - beta)).abs()
    };
    Ok(DensityReport { beta, node_count, class: density_class(beta), expected_edges })
}
