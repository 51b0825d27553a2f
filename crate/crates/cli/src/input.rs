use std::path::PathBuf;

use clap::{Args, ValueEnum};
use compsize::{DegreeDistribution, Error, Family, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyKind {
    Exponential,
    Geometric,
    Binomial,
    Poisson,
    Powerlaw,
}

/// Where the degree distribution comes from: a built-in family or a file.
#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Built-in degree distribution family.
    #[arg(long, value_enum, conflicts_with = "pmf_file")]
    pub family: Option<FamilyKind>,

    /// Degree distribution file: two columns "k value", or JSON when the name ends in .json.
    #[arg(long)]
    pub pmf_file: Option<PathBuf>,

    /// Tail exponent of the power-law family.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,

    /// Power-law prefactor: u(k) = s (beta - 2) k^-beta for k >= 2.
    #[arg(long, allow_negative_numbers = true, conflicts_with = "tail_scale")]
    pub s: Option<f64>,

    /// Power-law excess-tail scale: u1(k) ~ scale k^(1-beta). Converted to the prefactor.
    #[arg(long)]
    pub tail_scale: Option<f64>,

    /// Decay rate of the exponential family, u(k) ~ e^(-lambda k).
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,

    /// Success probability of the geometric family, u(k) = p (1-p)^(k-1), k >= 1.
    #[arg(long, allow_negative_numbers = true)]
    pub p: Option<f64>,

    /// Binomial success probability, or Poisson mean.
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,

    /// Number of binomial trials.
    #[arg(long)]
    pub kmax: Option<usize>,

    /// Largest materialized degree of an infinite-support family.
    #[arg(long)]
    pub k_trunc: Option<usize>,

    /// Zero the distribution above this degree and renormalize.
    #[arg(long)]
    pub cutoff: Option<usize>,
}

fn need<T>(value: Option<T>, name: &'static str) -> Result<T> {
    value.ok_or(Error::MissingParameter(name))
}

impl InputArgs {
    /// The built-in family described by the flags, if any.
    pub fn family(&self, k_trunc: usize) -> Result<Option<Family>> {
        let Some(kind) = self.family else {
            return Ok(None);
        };
        Ok(Some(match kind {
            FamilyKind::Exponential => Family::Exponential { lambda: need(self.lambda, "--lambda")? },
            FamilyKind::Geometric => Family::Geometric { p: need(self.p, "--p")? },
            FamilyKind::Binomial => Family::Binomial { k_max: need(self.kmax, "--kmax")?, c: need(self.c, "--c")? },
            FamilyKind::Poisson => Family::Poisson { c: need(self.c, "--c")? },
            FamilyKind::Powerlaw => {
                let beta = need(self.beta, "--beta")?;
                match (self.s, self.tail_scale) {
                    (Some(s), _) => Family::PowerLaw { beta, s },
                    (None, Some(scale)) => Family::power_law_with_tail_scale(beta, scale, k_trunc)?,
                    (None, None) => return Err(Error::MissingParameter("--s or --tail-scale")),
                }
            }
        }))
    }

    /// Default truncation: light tails are cut where the remaining mass is negligible.
    /// Power laws are kept far beyond the horizon: degrees above `N` never enter `w(n)`,
    /// `n <= N`, but the moments and the asymptotic tail beyond `N` depend on them.
    fn default_k_trunc(&self, horizon: usize) -> usize {
        match self.family {
            Some(FamilyKind::Exponential) => self.lambda.map_or(200, |l| ((45.0 / l).ceil() as usize).max(10)),
            Some(FamilyKind::Geometric) => {
                self.p.map_or(200, |p| ((45.0 / -(-p).ln_1p()).ceil() as usize).clamp(10, 100_000))
            }
            Some(FamilyKind::Poisson) => self.c.map_or(100, |c| (c + 12.0 * c.sqrt() + 40.0).ceil() as usize),
            _ => horizon.saturating_mul(100).clamp(100_000, 10_000_000),
        }
    }

    pub fn load(&self, horizon: usize) -> Result<DegreeDistribution> {
        let k_trunc = self.k_trunc.unwrap_or_else(|| self.default_k_trunc(horizon));
        let d = match (self.family(k_trunc)?, &self.pmf_file) {
            (Some(f), None) => f.materialize(k_trunc)?,
            (None, Some(path)) => compsize::io::read_degree_file(path)?,
            _ => return Err(Error::MissingParameter("--family or --pmf-file")),
        };
        match self.cutoff {
            Some(k) => Ok(d.apply_cutoff(k)?.distribution),
            None => Ok(d),
        }
    }
}
