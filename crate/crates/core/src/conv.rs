//! Convolution powers of nonnegative sequences.
//!
//! Everything here uses direct summation of nonnegative terms, so each output
//! entry carries a small relative error regardless of how far it sits below the
//! peak of the sequence. Transform-based convolution is deliberately absent.

use crate::degree::ExcessDistribution;
use crate::error::{Error, Result};

/// A nonnegative sequence stored as `values * exp(log_scale)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledSequence {
    values: Vec<f64>,
    log_scale: f64,
}

impl ScaledSequence {
    pub fn new(values: Vec<f64>, log_scale: f64) -> Self {
        Self { values, log_scale }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Natural log of entry `k` (`-inf` for zero or out-of-range entries).
    pub fn ln_get(&self, k: usize) -> f64 {
        match self.values.get(k) {
            Some(&v) if v > 0.0 => v.ln() + self.log_scale,
            _ => f64::NEG_INFINITY,
        }
    }

    /// Entry `k` in linear form; underflows to zero when out of range of `f64`.
    pub fn get(&self, k: usize) -> f64 {
        let ln = self.ln_get(k);
        if ln == f64::NEG_INFINITY {
            0.0
        } else {
            ln.exp()
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        (0..self.values.len()).map(|k| self.get(k)).collect()
    }

    /// Rescales so the values sum to one, folding the factor into `log_scale`.
    pub fn normalize_sum(&mut self) {
        let sum: f64 = self.values.iter().sum();
        self.rescale(sum);
    }

    /// Rescales so the largest value is one.
    pub fn normalize_max(&mut self) {
        let max = self.values.iter().copied().fold(0.0, f64::max);
        self.rescale(max);
    }

    fn rescale(&mut self, by: f64) {
        if by > 0.0 && by.is_finite() && by != 1.0 {
            let inv = 1.0 / by;
            self.values.iter_mut().for_each(|v| *v *= inv);
            self.log_scale += by.ln();
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 8];
    let chunks = a.len() / 8;
    for c in 0..chunks {
        let x = &a[c * 8..c * 8 + 8];
        let y = &b[c * 8..c * 8 + 8];
        for l in 0..8 {
            acc[l] += x[l] * y[l];
        }
    }
    let mut rest = 0.0;
    for i in chunks * 8..a.len() {
        rest += a[i] * b[i];
    }
    ((acc[0] + acc[4]) + (acc[1] + acc[5])) + ((acc[2] + acc[6]) + (acc[3] + acc[7])) + rest
}

/// Convolution against a fixed kernel whose reversed copy is cached.
struct Kernel {
    reversed: Vec<f64>,
}

impl Kernel {
    fn new(g: &[f64]) -> Self {
        Self { reversed: g.iter().rev().copied().collect() }
    }

    /// Entry `j` of `f * g`.
    #[inline]
    fn entry(&self, f: &[f64], j: usize) -> f64 {
        let lg = self.reversed.len();
        if f.is_empty() || lg == 0 || j > f.len() - 1 + lg - 1 {
            return 0.0;
        }
        let lo = j.saturating_sub(lg - 1);
        let hi = j.min(f.len() - 1);
        if lo > hi {
            return 0.0;
        }
        // g[j - i] = reversed[lg - 1 - j + i]
        let start = lg - 1 + lo - j;
        dot(&f[lo..=hi], &self.reversed[start..start + (hi - lo) + 1])
    }

    fn convolve(&self, f: &[f64], trunc: usize) -> Vec<f64> {
        if f.is_empty() || self.reversed.is_empty() {
            return Vec::new();
        }
        let full = f.len() + self.reversed.len() - 1;
        let len = full.min(trunc + 1);
        (0..len).map(|j| self.entry(f, j)).collect()
    }
}

/// `(f * g)(k) = sum_{i+j=k} f(i) g(j)` for `k <= trunc`.
pub fn convolve(f: &[f64], g: &[f64], trunc: usize) -> Vec<f64> {
    Kernel::new(g).convolve(f, trunc)
}

fn convolve_scaled(a: &ScaledSequence, b: &ScaledSequence, trunc: usize) -> ScaledSequence {
    let mut out = ScaledSequence::new(convolve(&a.values, &b.values, trunc), a.log_scale + b.log_scale);
    out.normalize_max();
    out
}

/// `f^{*n}` up to index `trunc` by repeated squaring; `n = 0` gives the unit impulse.
pub fn conv_power(f: &[f64], n: usize, trunc: usize) -> ScaledSequence {
    let mut result = ScaledSequence::new(vec![1.0], 0.0);
    if n == 0 {
        return result;
    }
    let mut base = ScaledSequence::new(f.iter().take(trunc + 1).copied().collect(), 0.0);
    base.normalize_max();
    let mut remaining = n;
    let mut first = true;
    loop {
        if remaining & 1 == 1 {
            result = if first { base.clone() } else { convolve_scaled(&result, &base, trunc) };
            first = false;
        }
        remaining >>= 1;
        if remaining == 0 {
            break;
        }
        base = convolve_scaled(&base, &base, trunc);
    }
    result
}

/// Upper bound on the number of compositions [`conv_power_brute`] will enumerate.
pub const BRUTE_FORCE_LIMIT: f64 = 1e7;

/// `f^{*n}(k)` as the explicit sum over ordered compositions `k_1 + ... + k_n = k`
/// of `prod f(k_i)`.
pub fn conv_power_brute(f: &[f64], n: usize, k: usize) -> Result<f64> {
    if n == 0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    // C(k + n - 1, n - 1)
    let count = (1..n).fold(1.0f64, |acc, i| acc * (k + i) as f64 / i as f64);
    if count > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { count });
    }
    fn walk(f: &[f64], parts_left: usize, remaining: usize, product: f64) -> f64 {
        let at = |i: usize| f.get(i).copied().unwrap_or(0.0);
        if parts_left == 1 {
            return product * at(remaining);
        }
        (0..=remaining).map(|first| walk(f, parts_left - 1, remaining - first, product * at(first))).sum()
    }
    Ok(walk(f, n, k, 1.0))
}

/// Exponential tilt `u(k) e^{tau k} / Z` chosen so the tilted mean equals `target`.
///
/// The identity `u^{*n}(j) = Z^n e^{-tau j} tilted^{*n}(j)` moves the entry of
/// interest to the bulk of the tilted sequence, so it never underflows.
#[derive(Debug, Clone)]
struct Tilt {
    tau: f64,
    ln_z: f64,
    tilted: Vec<f64>,
}

impl Tilt {
    fn identity(u: &[f64]) -> Self {
        let z: f64 = u.iter().sum();
        Self { tau: 0.0, ln_z: z.ln(), tilted: u.iter().map(|v| v / z).collect() }
    }

    fn toward_mean(u: &[f64], target: f64) -> Self {
        let ln_u: Vec<f64> = u.iter().map(|&v| if v > 0.0 { v.ln() } else { f64::NEG_INFINITY }).collect();
        let stats = |tau: f64| -> (f64, Vec<f64>) {
            let ln_w: Vec<f64> = ln_u.iter().enumerate().map(|(k, &l)| l + tau * k as f64).collect();
            let ln_z = crate::special::log_sum_exp(&ln_w);
            (ln_z, ln_w)
        };
        let mean_at = |tau: f64| -> f64 {
            let (ln_z, ln_w) = stats(tau);
            ln_w.iter().enumerate().map(|(k, &l)| k as f64 * (l - ln_z).exp()).sum()
        };
        let base_mean = mean_at(0.0);
        let tau = if (base_mean - target).abs() <= 1e-12 * target {
            0.0
        } else {
            let step = if base_mean < target { 1.0 } else { -1.0 };
            let mut far = step;
            let mut found = false;
            for _ in 0..200 {
                if (mean_at(far) - target) * step >= 0.0 {
                    found = true;
                    break;
                }
                far *= 2.0;
            }
            if !found {
                return Self::identity(u);
            }
            crate::special::bisect(|t| mean_at(t) - target, 0.0, far, 1e-13).unwrap_or(0.0)
        };
        let (ln_z, ln_w) = stats(tau);
        let tilted = ln_w.iter().map(|&l| (l - ln_z).exp()).collect();
        Self { tau, ln_z, tilted }
    }

    /// Picks the tilt for entries `u^{*n}(n-2)` with `n <= n_max`.
    fn for_diagonal(u: &[f64], n_max: usize) -> Self {
        let top = u.iter().rposition(|&v| v > 0.0).unwrap_or(0);
        if top == 0 || u[0] == 0.0 {
            return Self::identity(u);
        }
        let target = if top >= 2 { 1.0 } else { (n_max as f64 - 2.0).max(1.0) / n_max as f64 };
        Self::toward_mean(u, target)
    }

    fn ln_untilt(&self, ln_value: f64, n: usize, j: usize) -> f64 {
        ln_value + n as f64 * self.ln_z - self.tau * j as f64
    }
}

/// `ln d(n)` for `d(n) = u1^{*n}(n-2)`, `n = 2..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalPowers {
    ln_values: Vec<f64>,
}

impl DiagonalPowers {
    pub fn n_max(&self) -> usize {
        self.ln_values.len() + 1
    }

    /// `ln d(n)`, `-inf` when `d(n)` is exactly zero.
    pub fn ln_value(&self, n: usize) -> f64 {
        assert!(n >= 2 && n <= self.n_max(), "n = {n} outside 2..={}", self.n_max());
        self.ln_values[n - 2]
    }

    /// `d(n)` in linear form; zero where it underflows.
    pub fn value(&self, n: usize) -> f64 {
        let ln = self.ln_value(n);
        if ln == f64::NEG_INFINITY {
            0.0
        } else {
            ln.exp()
        }
    }

    pub fn ln_values(&self) -> &[f64] {
        &self.ln_values
    }
}

/// `u1^{*n}(n-2)` for all `n = 2..=n_max` via `p_n = p_{n-1} * u1`, truncated at
/// index `n_max - 2` and renormalized at each step.
pub fn diagonal_powers(u1: &ExcessDistribution, n_max: usize) -> DiagonalPowers {
    diagonal_powers_of(u1.pmf(), n_max)
}

/// [`diagonal_powers`] over a raw nonnegative sequence.
pub fn diagonal_powers_of(u1: &[f64], n_max: usize) -> DiagonalPowers {
    if n_max < 2 {
        return DiagonalPowers { ln_values: Vec::new() };
    }
    let top = n_max - 2;
    let u: Vec<f64> = u1.iter().take(top + 1).copied().collect();
    let count = n_max - 1;
    if u.first().is_none_or(|&u0| u0 <= 0.0) {
        return DiagonalPowers { ln_values: vec![f64::NEG_INFINITY; count] };
    }
    let tilt = Tilt::for_diagonal(&u, n_max);
    let kernel = Kernel::new(&tilt.tilted);
    let mut p = ScaledSequence::new(tilt.tilted.clone(), 0.0);
    let mut ln_values = Vec::with_capacity(count);
    for n in 2..=n_max {
        p = ScaledSequence::new(kernel.convolve(&p.values, top), p.log_scale);
        p.normalize_sum();
        ln_values.push(tilt.ln_untilt(p.ln_get(n - 2), n, n - 2));
    }
    DiagonalPowers { ln_values }
}

/// `ln u1^{*n}(n-2)` for selected `n` (each `>= 2`) by binary powering, sharing
/// the table of repeated squares across all requested points.
pub fn diagonal_powers_at(u1: &[f64], ns: &[usize]) -> Vec<f64> {
    let Some(&n_max) = ns.iter().max() else {
        return Vec::new();
    };
    assert!(ns.iter().all(|&n| n >= 2), "diagonal entries need n >= 2");
    let top = n_max - 2;
    let u: Vec<f64> = u1.iter().take(top + 1).copied().collect();
    if u.first().is_none_or(|&u0| u0 <= 0.0) {
        return vec![f64::NEG_INFINITY; ns.len()];
    }
    let tilt = Tilt::for_diagonal(&u, n_max);
    let mut squares = vec![ScaledSequence::new(tilt.tilted.clone(), 0.0)];
    while (1usize << squares.len()) <= n_max {
        let last = squares.last().unwrap();
        let mut next = ScaledSequence::new(convolve(&last.values, &last.values, top), 2.0 * last.log_scale);
        next.normalize_sum();
        squares.push(next);
    }
    ns.iter()
        .map(|&n| {
            let j = n - 2;
            let bits: Vec<usize> = (0..squares.len()).filter(|&b| n >> b & 1 == 1).collect();
            let (last, rest) = bits.split_last().unwrap();
            let mut acc: Option<ScaledSequence> = None;
            for &b in rest {
                let sq = &squares[b];
                let slice = &sq.values[..sq.values.len().min(j + 1)];
                acc = Some(match acc {
                    None => ScaledSequence::new(slice.to_vec(), sq.log_scale),
                    Some(a) => {
                        let mut next = ScaledSequence::new(convolve(&a.values, slice, j), a.log_scale + sq.log_scale);
                        next.normalize_sum();
                        next
                    }
                });
            }
            let sq = &squares[*last];
            let (entry, ln_scale) = match acc {
                None => (sq.values.get(j).copied().unwrap_or(0.0), sq.log_scale),
                Some(a) => {
                    let kernel = Kernel::new(&sq.values[..sq.values.len().min(j + 1)]);
                    (kernel.entry(&a.values, j), a.log_scale + sq.log_scale)
                }
            };
            if entry > 0.0 {
                tilt.ln_untilt(entry.ln() + ln_scale, n, j)
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            (a - b).abs() / b.abs().max(a.abs())
        }
    }

    #[test]
    fn convolve_identity_and_shift() {
        let g = [0.2, 0.3, 0.5];
        assert_eq!(convolve(&[1.0], &g, 10), g.to_vec());
        assert_eq!(convolve(&[1.0], &g, 1), vec![0.2, 0.3]);
        assert_eq!(convolve(&[0.0, 1.0], &[0.0, 1.0], 5), vec![0.0, 0.0, 1.0]);
        assert_eq!(convolve(&[0.5, 0.5], &[0.5, 0.5], 5), vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn convolve_long_matches_naive() {
        let f: Vec<f64> = (0..37).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let g: Vec<f64> = (0..23).map(|i| (0.3 * i as f64).sin().abs()).collect();
        let out = convolve(&f, &g, 100);
        assert_eq!(out.len(), 59);
        for (k, &v) in out.iter().enumerate() {
            let naive: f64 = (0..=k).filter(|&i| i < f.len() && k - i < g.len()).map(|i| f[i] * g[k - i]).sum();
            assert!(rel(v, naive) < 1e-14);
        }
    }

    #[test]
    fn conv_power_examples() {
        let mut delta1 = vec![0.0, 1.0];
        let p = conv_power(&delta1, 7, 10);
        assert_eq!(p.to_vec(), vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        delta1.push(0.0);
        let p = conv_power(&[0.5, 0.5], 2, 10).to_vec();
        assert_eq!(p, vec![0.25, 0.5, 0.25]);
        assert_eq!(conv_power(&[0.3, 0.7], 0, 5).to_vec(), vec![1.0]);
    }

    #[test]
    fn brute_force_examples() {
        let f = [0.2, 0.5, 0.3];
        assert_eq!(conv_power_brute(&f, 1, 2).unwrap(), 0.3);
        assert_eq!(conv_power_brute(&[0.5, 0.5], 3, 1).unwrap(), 0.375);
        let (a, b, c) = (0.2, 0.5, 0.3);
        assert!(rel(conv_power_brute(&f, 2, 2).unwrap(), 2.0 * a * c + b * b) < 1e-15);
        assert!(matches!(conv_power_brute(&f, 30, 40), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn diagonal_of_unit_impulse() {
        let d = diagonal_powers_of(&[1.0], 10);
        assert_eq!(d.value(2), 1.0);
        for n in 3..=10 {
            assert_eq!(d.value(n), 0.0);
        }
    }

    #[test]
    fn diagonal_without_zero_entry_vanishes() {
        let d = diagonal_powers_of(&[0.0, 0.5, 0.5], 6);
        assert!((2..=6).all(|n| d.value(n) == 0.0));
    }

    #[test]
    fn diagonal_on_two_point_support() {
        // u1 on {0,1}: u1^{*n}(n-2) = C(n,2) a^2 b^{n-2}
        let (a, b) = (0.3, 0.7);
        let d = diagonal_powers_of(&[a, b], 400);
        for n in [2usize, 3, 10, 100, 400] {
            let nf = n as f64;
            let ln_exact = (nf * (nf - 1.0) / 2.0).ln() + 2.0 * a.ln() + (nf - 2.0) * b.ln();
            assert!((d.ln_value(n) - ln_exact).abs() < 1e-12 * ln_exact.abs().max(1.0), "n={n}");
        }
    }

    #[test]
    fn diagonal_matches_brute_force_at_small_n() {
        let u1 = [0.4, 0.1, 0.3, 0.2];
        let d = diagonal_powers_of(&u1, 8);
        for n in 2..=8 {
            let brute = conv_power_brute(&u1, n, n - 2).unwrap();
            assert!(rel(d.value(n), brute) < 1e-13, "n={n}");
        }
    }

    #[test]
    fn spot_evaluation_matches_iteration() {
        let u1: Vec<f64> = {
            let w: Vec<f64> = (0..60).map(|k| (-(k as f64) * 0.7).exp() * (1.0 + (k % 3) as f64)).collect();
            let s: f64 = w.iter().sum();
            w.into_iter().map(|v| v / s).collect()
        };
        let full = diagonal_powers_of(&u1, 300);
        let ns = [2usize, 3, 4, 7, 64, 65, 127, 300];
        let spot = diagonal_powers_at(&u1, &ns);
        for (&n, &ln) in ns.iter().zip(&spot) {
            assert!((ln - full.ln_value(n)).abs() < 1e-11 * ln.abs().max(1.0), "n={n}: {ln} vs {}", full.ln_value(n));
        }
    }

    #[test]
    fn deep_tail_does_not_underflow() {
        // strongly subcritical: mean 0.2, entries at n-2 fall far below 1e-308
        let u1 = [0.85, 0.1, 0.05];
        let d = diagonal_powers_of(&u1, 2000);
        let ln = d.ln_value(2000);
        assert!(ln.is_finite() && ln < -709.0, "ln = {ln}");
        let spot = diagonal_powers_at(&u1, &[2000]);
        assert!((spot[0] - ln).abs() < 1e-10 * ln.abs());
    }
}
