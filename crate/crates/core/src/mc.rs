//! Finite configuration-model ensembles sampled by stub matching.
//!
//! Each replica draws `N` i.i.d. degrees, pairs the stubs uniformly at random
//! (self-loops and multi-edges are kept) and labels components with a disjoint-set
//! forest. Replica `r` of a run seeded with `seed` uses a ChaCha8 generator seeded
//! from `seed` with its stream set to `r`, so results do not depend on how the
//! replicas are scheduled across threads.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degree::DegreeDistribution;
use crate::error::{Error, Result};

/// Environment variable holding the worker-thread count for [`ensemble_estimate`].
pub const THREADS_ENV: &str = "COMPSIZE_THREADS";

/// Generator for replica `replica` of a run with master seed `seed`.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Sampled degree sequence and the node that received an extra stub, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeSequence {
    pub degrees: Vec<u32>,
    pub fixup_node: Option<usize>,
}

impl DegreeSequence {
    pub fn stub_count(&self) -> u64 {
        self.degrees.iter().map(|&k| k as u64).sum()
    }
}

/// Draws `n` degrees by inverse-CDF lookup; an odd stub total is made even by
/// giving one uniformly chosen node an extra stub.
pub fn sample_degree_sequence<R: Rng>(d: &DegreeDistribution, n: usize, rng: &mut R) -> DegreeSequence {
    let mut cdf = Vec::with_capacity(d.pmf().len());
    let mut acc = 0.0;
    for &p in d.pmf() {
        acc += p;
        cdf.push(acc);
    }
    let top = cdf.len() - 1;
    let total = acc;
    let mut degrees: Vec<u32> = (0..n)
        .map(|_| {
            let x = rng.random::<f64>() * total;
            cdf.partition_point(|&c| c <= x).min(top) as u32
        })
        .collect();
    let mut fixup_node = None;
    if degrees.iter().map(|&k| k as u64).sum::<u64>() % 2 == 1 {
        let i = rng.random_range(0..n);
        degrees[i] += 1;
        fixup_node = Some(i);
    }
    DegreeSequence { degrees, fixup_node }
}

/// Uniform perfect matching of the stubs, as shuffle-and-pair.
pub fn match_stubs<R: Rng>(degrees: &[u32], rng: &mut R) -> Result<Vec<(u32, u32)>> {
    let total: u64 = degrees.iter().map(|&k| k as u64).sum();
    if total % 2 == 1 {
        return Err(Error::OddStubs(total));
    }
    let mut stubs: Vec<u32> = Vec::with_capacity(total as usize);
    for (node, &k) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(node as u32, k as usize));
    }
    stubs.shuffle(rng);
    Ok(stubs.chunks_exact(2).map(|p| (p[0], p[1])).collect())
}

struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
    }
}

/// Component sizes of one graph: `counts[s]` components of size `s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentHistogram {
    pub counts: Vec<u64>,
    pub largest: usize,
}

impl ComponentHistogram {
    /// Number of components of size `size`.
    pub fn count(&self, size: usize) -> u64 {
        self.counts.get(size).copied().unwrap_or(0)
    }

    /// Total number of nodes, `sum_s s * counts[s]`.
    pub fn node_count(&self) -> u64 {
        self.counts.iter().enumerate().map(|(s, &c)| s as u64 * c).sum()
    }
}

pub fn component_histogram(edges: &[(u32, u32)], n: usize) -> ComponentHistogram {
    let mut sets = DisjointSets::new(n);
    for &(a, b) in edges {
        sets.union(a, b);
    }
    let mut counts = vec![0u64; 2];
    let mut largest = 0;
    for x in 0..n as u32 {
        if sets.find(x) == x {
            let s = sets.size[x as usize] as usize;
            if s >= counts.len() {
                counts.resize(s + 1, 0);
            }
            counts[s] += 1;
            largest = largest.max(s);
        }
    }
    ComponentHistogram { counts, largest }
}

/// One sampled graph, summarized.
#[derive(Debug, Clone, PartialEq)]
pub struct Replica {
    pub histogram: ComponentHistogram,
    pub fixup_node: Option<usize>,
}

pub fn sample_replica(d: &DegreeDistribution, n: usize, seed: u64, replica: u64) -> Replica {
    let mut rng = replica_rng(seed, replica);
    let seq = sample_degree_sequence(d, n, &mut rng);
    let edges = match_stubs(&seq.degrees, &mut rng).expect("stub total made even");
    Replica { histogram: component_histogram(&edges, n), fixup_node: seq.fixup_node }
}

/// Ensemble averages over replicas; standard errors are `sd / sqrt(R)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEstimate {
    pub node_count: usize,
    pub replicas: usize,
    pub seed: u64,
    /// `(n, mean, standard error)` of the fraction of nodes in finite components
    /// of size `n`, for every `n` observed in some replica.
    pub w_hat: Vec<(usize, f64, f64)>,
    /// Mean fraction of nodes in the giant candidate (zero when none is recognized).
    pub giant_hat: f64,
    pub giant_se: f64,
    /// Mean fraction of nodes in the largest component, giant or not.
    pub largest_hat: f64,
    pub largest_se: f64,
    /// Replicas whose degree sequence needed an extra stub.
    pub fixups: usize,
}

impl EnsembleEstimate {
    /// Mean and standard error at size `n` (zero if never observed).
    pub fn at(&self, n: usize) -> (f64, f64) {
        self.w_hat.iter().find(|e| e.0 == n).map(|e| (e.1, e.2)).unwrap_or((0.0, 0.0))
    }
}

/// Size above which, for supercritical distributions, the largest component is
/// treated as the giant rather than a finite component.
pub fn giant_threshold(n: usize) -> usize {
    (n as f64).powf(2.0 / 3.0).ceil() as usize
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let r = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / r;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (r - 1.0);
    (mean, (var / r).sqrt())
}

fn thread_pool() -> rayon::ThreadPool {
    let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).unwrap_or(0);
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool")
}

/// Samples `replicas` graphs of `n` nodes and averages their component statistics.
pub fn ensemble_estimate(d: &DegreeDistribution, n: usize, replicas: usize, seed: u64) -> Result<EnsembleEstimate> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("ensemble needs N >= 2, got {n}")));
    }
    if replicas < 1 {
        return Err(Error::InvalidParameter("ensemble needs at least one replica".into()));
    }
    let samples: Vec<Replica> =
        thread_pool().install(|| (0..replicas as u64).into_par_iter().map(|r| sample_replica(d, n, seed, r)).collect());
    let supercritical = d.moments().theta > 0.0 || !d.moments().mu2_finite;
    let threshold = giant_threshold(n);
    let nf = n as f64;
    let mut giants = Vec::with_capacity(replicas);
    let mut largest = Vec::with_capacity(replicas);
    let mut max_size = 0;
    for s in &samples {
        let l = s.histogram.largest;
        largest.push(l as f64 / nf);
        giants.push(if supercritical && l > threshold { l as f64 / nf } else { 0.0 });
        max_size = max_size.max(s.histogram.counts.len() - 1);
    }
    let mut w_hat = Vec::new();
    let mut column = vec![0.0; replicas];
    for size in 1..=max_size {
        let mut seen = false;
        for (slot, s) in column.iter_mut().zip(&samples) {
            let mut c = s.histogram.count(size);
            if supercritical && size == s.histogram.largest && size > threshold {
                c -= 1;
            }
            seen |= c > 0;
            *slot = (c * size as u64) as f64 / nf;
        }
        if seen {
            let (m, se) = mean_se(&column);
            w_hat.push((size, m, se));
        }
    }
    let (giant_hat, giant_se) = mean_se(&giants);
    let (largest_hat, largest_se) = mean_se(&largest);
    Ok(EnsembleEstimate {
        node_count: n,
        replicas,
        seed,
        w_hat,
        giant_hat,
        giant_se,
        largest_hat,
        largest_se,
        fixups: samples.iter().filter(|s| s.fixup_node.is_some()).count(),
    })
}
