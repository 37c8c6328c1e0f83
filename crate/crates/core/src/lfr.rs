//! LFR-style benchmark graphs: power-law degrees and community sizes,
//! configuration-model wiring, edge-swap repair.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::seed;

/// Exponent applied in the `tau -> 1 - 1/tau^0.7` transform.
pub const TAU_TRANSFORM_POWER: f64 = 0.7;
pub const MAX_ATTEMPTS: usize = 20;
pub const MIXING_TOLERANCE: f64 = 0.05;
pub const DEGREE_TOLERANCE: f64 = 0.10;
/// Edge swaps allowed per edge during repair.
pub const SWAPS_PER_EDGE: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LfrParams {
    pub n: usize,
    /// Degree power-law exponent.
    pub tau1: f64,
    /// Community-size power-law exponent.
    pub tau2: f64,
    /// Mixing fraction.
    pub mu: f64,
    pub avg_degree: f64,
    pub max_degree: Option<usize>,
    pub min_community: Option<usize>,
    pub max_community: Option<usize>,
}

impl LfrParams {
    pub fn new(n: usize, tau1: f64, tau2: f64, mu: f64, avg_degree: f64) -> Self {
        LfrParams {
            n,
            tau1,
            tau2,
            mu,
            avg_degree,
            max_degree: None,
            min_community: None,
            max_community: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.n < 10 {
            return bad(format!("n must be >= 10, got {}", self.n));
        }
        if !(self.tau1 > 1.0) || !(self.tau2 > 1.0) {
            return bad(format!("exponents must exceed 1, got {} and {}", self.tau1, self.tau2));
        }
        if !(0.0..=1.0).contains(&self.mu) {
            return bad(format!("mu must lie in [0, 1], got {}", self.mu));
        }
        if !(self.avg_degree >= 1.0 && self.avg_degree <= (self.n - 1) as f64) {
            return bad(format!("avg_degree {} outside [1, n-1]", self.avg_degree));
        }
        Ok(())
    }

    pub fn max_degree_or_default(&self) -> usize {
        self.max_degree.unwrap_or(self.n - 1).min(self.n - 1)
    }
}

/// `1 - 1/tau^0.7`
pub fn tilde_tau(tau: f64) -> f64 {
    1.0 - 1.0 / tau.powf(TAU_TRANSFORM_POWER)
}

/// Inverse of [`tilde_tau`].
pub fn tau_from_tilde(tilde: f64) -> f64 {
    (1.0 / (1.0 - tilde)).powf(1.0 / TAU_TRANSFORM_POWER)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledConfig {
    pub params: LfrParams,
    pub tilde_tau1: f64,
    pub tilde_tau2: f64,
    pub density: f64,
    pub seed: u64,
}

/// Samples `n` uniformly from `n_range` and the transformed exponents,
/// mixing and density uniformly from `[0, 1)`.
pub fn sample_lfr_config(n_range: std::ops::RangeInclusive<usize>, seed: u64) -> SampledConfig {
    let mut rng = seed::rng(seed);
    let n = rng.random_range(n_range);
    let tilde_tau1: f64 = rng.random();
    let tilde_tau2: f64 = rng.random();
    let mu: f64 = rng.random();
    let density: f64 = rng.random();
    let avg_degree = (density * (n - 1) as f64).max(2.0);
    SampledConfig {
        params: LfrParams::new(
            n,
            tau_from_tilde(tilde_tau1),
            tau_from_tilde(tilde_tau2),
            mu,
            avg_degree,
        ),
        tilde_tau1,
        tilde_tau2,
        density,
        seed: seed::mix(seed, 0x006c_6672),
    }
}

/// Inverse CDF of the continuous power law `p(x) ~ x^-a` on `[lo, hi]`.
fn powerlaw_quantile(a: f64, lo: f64, hi: f64, u: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    let e = 1.0 - a;
    if e.abs() < 1e-9 {
        return lo * (hi / lo).powf(u);
    }
    let tail = (hi / lo).powf(e);
    lo * (1.0 + u * (tail - 1.0)).powf(1.0 / e)
}

/// Mean of the continuous power law on `[lo, hi]`.
pub fn powerlaw_mean(a: f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    let r = hi / lo;
    if (a - 1.0).abs() < 1e-9 {
        lo * (r - 1.0) / r.ln()
    } else if (a - 2.0).abs() < 1e-9 {
        lo * r.ln() / (1.0 - 1.0 / r)
    } else {
        lo * (1.0 - a) / (2.0 - a) * (r.powf(2.0 - a) - 1.0) / (r.powf(1.0 - a) - 1.0)
    }
}

/// I.i.d. integer draws from a bounded power law on `[lo, hi]`: continuous
/// inverse-CDF sampling, then rounding.
pub fn sample_powerlaw(exponent: f64, lo: usize, hi: usize, count: usize, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed);
    sample_powerlaw_with(exponent, lo, hi, count, &mut rng)
}

fn sample_powerlaw_with(
    exponent: f64,
    lo: usize,
    hi: usize,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    (0..count)
        .map(|_| {
            let x = powerlaw_quantile(exponent, lo as f64, hi as f64, rng.random());
            (x.round() as usize).clamp(lo, hi)
        })
        .collect()
}

/// Degree sequence whose mean tracks `target`: the lower cutoff is found by
/// bisection over a fixed set of uniforms, so the realized mean is monotone
/// in the cutoff.
fn degree_sequence(p: &LfrParams, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let hi = p.max_degree_or_default().max(1);
    let us: Vec<f64> = (0..p.n).map(|_| rng.random()).collect();
    let realize = |lo: f64| -> Vec<usize> {
        us.iter()
            .map(|&u| {
                let x = powerlaw_quantile(p.tau1, lo, hi as f64, u);
                (x.round() as usize).clamp(1, hi)
            })
            .collect()
    };
    let mean = |d: &[usize]| d.iter().sum::<usize>() as f64 / d.len() as f64;

    let (mut a, mut b) = (1.0, hi as f64);
    let mut best = realize(a);
    let mut best_err = (mean(&best) - p.avg_degree).abs();
    for _ in 0..60 {
        let mid = 0.5 * (a + b);
        let seq = realize(mid);
        let m = mean(&seq);
        let err = (m - p.avg_degree).abs();
        if err < best_err {
            best_err = err;
            best = seq;
        }
        if m < p.avg_degree {
            a = mid;
        } else {
            b = mid;
        }
    }
    let end = realize(b);
    if (mean(&end) - p.avg_degree).abs() < best_err {
        best = end;
    }
    best
}

/// Community sizes drawn until they cover `n`; a short remainder is spread
/// over the existing communities.
fn community_sizes(
    p: &LfrParams,
    min_size: usize,
    max_size: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let mut sizes = Vec::new();
    let mut total = 0;
    while total < p.n {
        let s = sample_powerlaw_with(p.tau2, min_size, max_size, 1, rng)[0];
        sizes.push(s);
        total += s;
    }
    let excess = total - p.n;
    let last = sizes.len() - 1;
    sizes[last] -= excess;
    if sizes[last] < min_size && sizes.len() > 1 {
        let mut remainder = sizes.pop().unwrap_or(0);
        while remainder > 0 {
            let open: Vec<usize> = (0..sizes.len()).filter(|&c| sizes[c] < max_size).collect();
            if open.is_empty() {
                sizes.push(remainder);
                break;
            }
            let c = open[rng.random_range(0..open.len())];
            sizes[c] += 1;
            remainder -= 1;
        }
    }
    sizes
}

/// Assigns nodes so that each node's internal degree fits its community.
fn assign_communities(
    internal: &[usize],
    sizes: &[usize],
    rng: &mut ChaCha8Rng,
) -> Option<Vec<usize>> {
    let n = internal.len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); sizes.len()];
    let mut label = vec![usize::MAX; n];
    let mut queue: Vec<usize> = (0..n).collect();
    queue.shuffle(rng);
    let mut steps = 0;
    let cap = 50 * n;
    while let Some(u) = queue.pop() {
        steps += 1;
        if steps > cap {
            return None;
        }
        let fits: Vec<usize> = (0..sizes.len()).filter(|&c| sizes[c] > internal[u]).collect();
        if fits.is_empty() {
            return None;
        }
        let free: Vec<usize> = fits
            .iter()
            .copied()
            .filter(|&c| members[c].len() < sizes[c])
            .collect();
        if !free.is_empty() {
            let c = free[rng.random_range(0..free.len())];
            members[c].push(u);
            label[u] = c;
        } else {
            let c = fits[rng.random_range(0..fits.len())];
            let idx = rng.random_range(0..members[c].len());
            let evicted = members[c].swap_remove(idx);
            label[evicted] = usize::MAX;
            queue.insert(0, evicted);
            members[c].push(u);
            label[u] = c;
        }
    }
    Some(label)
}

/// Random perfect matching of stubs; an odd leftover stub is dropped.
fn match_stubs(stubs: &mut [usize], rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    stubs.shuffle(rng);
    stubs.chunks_exact(2).map(|p| (p[0], p[1])).collect()
}

struct Rewirer<'a> {
    labels: &'a [usize],
    counts: HashMap<(usize, usize), usize>,
}

impl Rewirer<'_> {
    fn key(u: usize, v: usize) -> (usize, usize) {
        (u.min(v), u.max(v))
    }

    fn is_bad(&self, e: (usize, usize), external: bool) -> bool {
        e.0 == e.1
            || self.counts.get(&Self::key(e.0, e.1)).copied().unwrap_or(0) > 1
            || (external && self.labels[e.0] == self.labels[e.1])
    }

    fn acceptable(&self, e: (usize, usize), external: bool) -> bool {
        e.0 != e.1
            && !self.counts.contains_key(&Self::key(e.0, e.1))
            && !(external && self.labels[e.0] == self.labels[e.1])
    }

    fn remove(&mut self, e: (usize, usize)) {
        let k = Self::key(e.0, e.1);
        if let Some(c) = self.counts.get_mut(&k) {
            *c -= 1;
            if *c == 0 {
                self.counts.remove(&k);
            }
        }
    }

    fn add(&mut self, e: (usize, usize)) {
        *self.counts.entry(Self::key(e.0, e.1)).or_default() += 1;
    }

    /// Degree-preserving swaps inside one pool until no bad edges remain or
    /// the budget runs out.
    fn repair(
        &mut self,
        pool: &mut [(usize, usize)],
        external: bool,
        budget: &mut usize,
        rng: &mut ChaCha8Rng,
    ) {
        if pool.len() < 2 {
            return;
        }
        // Swaps only ever add edges that were absent, so a good edge never
        // turns bad; only the current bad set needs revisiting.
        let mut bad: Vec<usize> = (0..pool.len()).filter(|&i| self.is_bad(pool[i], external)).collect();
        while !bad.is_empty() {
            let mut still_bad = Vec::new();
            // Pairing two bad edges usually fixes both, so half the partners
            // come from the bad set.
            let partners = bad.clone();
            for i in bad {
                if !self.is_bad(pool[i], external) {
                    continue;
                }
                if *budget == 0 {
                    return;
                }
                *budget -= 1;
                still_bad.push(i);
                let j = if rng.random::<bool>() {
                    partners[rng.random_range(0..partners.len())]
                } else {
                    rng.random_range(0..pool.len())
                };
                if j == i {
                    continue;
                }
                let (a, b) = pool[i];
                let (c, d) = pool[j];
                let (e1, e2) = if rng.random::<bool>() {
                    ((a, d), (c, b))
                } else {
                    ((a, c), (b, d))
                };
                self.remove(pool[i]);
                self.remove(pool[j]);
                if self.acceptable(e1, external)
                    && self.acceptable(e2, external)
                    && Self::key(e1.0, e1.1) != Self::key(e2.0, e2.1)
                {
                    self.add(e1);
                    self.add(e2);
                    pool[i] = e1;
                    pool[j] = e2;
                } else {
                    self.add(pool[i]);
                    self.add(pool[j]);
                }
            }
            bad = still_bad;
        }
    }
}

/// Result of a single wiring attempt, before acceptance checks.
#[derive(Debug, Clone)]
pub struct LfrAttempt {
    pub graph: Graph,
    pub mixing: f64,
    pub mean_degree: f64,
}

/// One construction attempt. Fails only when the planted structure cannot
/// be realized (no community fits a node's internal degree).
pub fn wire_lfr(params: &LfrParams, seed: u64) -> Result<LfrAttempt> {
    params.validate()?;
    let mut rng = seed::rng(seed);
    let n = params.n;

    let mut degrees = degree_sequence(params, &mut rng);

    let min_degree = degrees.iter().copied().min().unwrap_or(1);
    let max_size = params.max_community.unwrap_or(n).clamp(1, n);
    let min_size = params
        .min_community
        .unwrap_or_else(|| (min_degree + 1).max(3))
        .clamp(1, max_size);
    let sizes = community_sizes(params, min_size, max_size, &mut rng);
    if sizes.len() == 1 && params.mu > MIXING_TOLERANCE {
        return Err(Error::GenerationFailed {
            attempts: 1,
            reason: "a single community cannot carry the requested mixing".into(),
        });
    }

    let mut internal: Vec<usize> = degrees
        .iter()
        .map(|&d| ((1.0 - params.mu) * d as f64).round() as usize)
        .collect();
    let labels = assign_communities(&internal, &sizes, &mut rng).ok_or_else(|| {
        Error::GenerationFailed {
            attempts: 1,
            reason: "internal degrees do not fit the community sizes".into(),
        }
    })?;

    // Stub totals must be even per community and across the external pool;
    // parity fixes move internal and total degree together so the mixing
    // ratio is untouched.
    let k = sizes.len();
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (u, &c) in labels.iter().enumerate() {
        members[c].push(u);
    }
    let cap = params.max_degree_or_default();
    for (c, nodes) in members.iter().enumerate() {
        let total: usize = nodes.iter().map(|&u| internal[u]).sum();
        if total.is_multiple_of(2) {
            continue;
        }
        let room = nodes
            .iter()
            .copied()
            .find(|&u| internal[u] + 1 < sizes[c].min(nodes.len()) && degrees[u] < cap);
        if let Some(u) = room {
            internal[u] += 1;
            degrees[u] += 1;
        } else if let Some(&u) = nodes.iter().filter(|&&u| internal[u] > 0).max_by_key(|&&u| internal[u]) {
            internal[u] -= 1;
            degrees[u] -= 1;
        }
    }
    let external_total: usize = (0..n).map(|u| degrees[u] - internal[u]).sum();
    if external_total % 2 == 1 {
        if let Some(u) = (0..n).max_by_key(|&u| degrees[u] - internal[u]) {
            degrees[u] -= 1;
        }
    }

    let mut rewirer = Rewirer {
        labels: &labels,
        counts: HashMap::new(),
    };
    let mut pools: Vec<(Vec<(usize, usize)>, bool)> = Vec::with_capacity(k + 1);
    for nodes in &members {
        let mut stubs: Vec<usize> = nodes
            .iter()
            .flat_map(|&u| std::iter::repeat_n(u, internal[u]))
            .collect();
        pools.push((match_stubs(&mut stubs, &mut rng), false));
    }
    let mut external_stubs: Vec<usize> = (0..n)
        .flat_map(|u| std::iter::repeat_n(u, degrees[u].saturating_sub(internal[u])))
        .collect();
    pools.push((match_stubs(&mut external_stubs, &mut rng), true));

    for (pool, _) in &pools {
        for &e in pool {
            rewirer.add(e);
        }
    }
    // Each pool gets its share of the 10 m swap budget, so one saturated
    // community can't starve the others.
    for (pool, external) in pools.iter_mut() {
        let mut budget = SWAPS_PER_EDGE * pool.len();
        rewirer.repair(pool, *external, &mut budget, &mut rng);
    }

    let mut edges: Vec<(usize, usize)> = pools
        .into_iter()
        .flat_map(|(p, _)| p)
        .filter(|&(u, v)| u != v)
        .map(|(u, v)| (u.min(v), u.max(v)))
        .collect();
    edges.sort_unstable();
    edges.dedup();

    // Relabel communities densely; repair can't empty one, but assignment may
    // leave a sampled size unused.
    let mut remap = vec![usize::MAX; k];
    let mut next = 0;
    let dense: Vec<usize> = labels
        .iter()
        .map(|&c| {
            if remap[c] == usize::MAX {
                remap[c] = next;
                next += 1;
            }
            remap[c]
        })
        .collect();

    let graph = Graph::new(n, edges, dense)?;
    Ok(LfrAttempt {
        mixing: graph.mixing(),
        mean_degree: graph.mean_degree(),
        graph,
    })
}

/// Metadata for an accepted graph.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LfrMetadata {
    pub params: LfrParams,
    pub tilde_tau1: f64,
    pub tilde_tau2: f64,
    pub density: f64,
    pub seed: u64,
    pub realized_mixing: f64,
    pub realized_mean_degree: f64,
    pub attempts: usize,
    pub communities: usize,
    pub mixing_tolerance: f64,
    pub degree_tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct GeneratedGraph {
    pub graph: Graph,
    pub metadata: LfrMetadata,
}

/// Generates a connected graph whose realized mixing and mean degree match
/// the request, retrying with fresh sub-seeds.
pub fn generate_lfr(config: &SampledConfig) -> Result<GeneratedGraph> {
    let p = &config.params;
    p.validate()?;
    let mut last_reason = String::new();
    for attempt in 0..MAX_ATTEMPTS {
        let sub_seed = seed::mix(config.seed, attempt as u64);
        let a = match wire_lfr(p, sub_seed) {
            Ok(a) => a,
            Err(Error::GenerationFailed { reason, .. }) => {
                last_reason = reason;
                continue;
            }
            Err(e) => return Err(e),
        };
        if !a.graph.is_connected() {
            last_reason = "disconnected".into();
            continue;
        }
        if (a.mixing - p.mu).abs() > MIXING_TOLERANCE {
            last_reason = format!("mixing {:.3} vs requested {:.3}", a.mixing, p.mu);
            continue;
        }
        if (a.mean_degree - p.avg_degree).abs() > DEGREE_TOLERANCE * p.avg_degree {
            last_reason = format!("mean degree {:.2} vs requested {:.2}", a.mean_degree, p.avg_degree);
            continue;
        }
        let metadata = LfrMetadata {
            params: *p,
            tilde_tau1: config.tilde_tau1,
            tilde_tau2: config.tilde_tau2,
            density: config.density,
            seed: config.seed,
            realized_mixing: a.mixing,
            realized_mean_degree: a.mean_degree,
            attempts: attempt + 1,
            communities: a.graph.num_communities(),
            mixing_tolerance: MIXING_TOLERANCE,
            degree_tolerance: DEGREE_TOLERANCE,
        };
        return Ok(GeneratedGraph {
            graph: a.graph,
            metadata,
        });
    }
    Err(Error::GenerationFailed {
        attempts: MAX_ATTEMPTS,
        reason: last_reason,
    })
}

/// Wraps explicit parameters as a config (transformed coordinates filled in).
pub fn config_from_params(params: LfrParams, seed: u64) -> SampledConfig {
    SampledConfig {
        params,
        tilde_tau1: tilde_tau(params.tau1),
        tilde_tau2: tilde_tau(params.tau2),
        density: params.avg_degree / (params.n - 1) as f64,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn degenerate_support() {
        assert!(sample_powerlaw(2.5, 5, 5, 100, 1).iter().all(|&v| v == 5));
    }

    #[test]
    fn sampling_is_deterministic() {
        assert_eq!(sample_powerlaw(2.0, 1, 50, 64, 9), sample_powerlaw(2.0, 1, 50, 64, 9));
        assert_ne!(sample_powerlaw(2.0, 1, 50, 64, 9), sample_powerlaw(2.0, 1, 50, 64, 10));
    }

    #[test]
    fn empirical_mean_matches_bounded_mean() {
        let draws = sample_powerlaw(2.0, 1, 100, 100_000, 17);
        let mean = draws.iter().sum::<usize>() as f64 / draws.len() as f64;
        let expected = powerlaw_mean(2.0, 1.0, 100.0);
        assert!((mean - expected).abs() / expected < 0.05, "{mean} vs {expected}");
    }

    #[test]
    fn moderate_config_is_accepted() {
        let params = LfrParams::new(100, 3.0, 2.0, 0.1, 8.0);
        let g = generate_lfr(&config_from_params(params, 11)).unwrap();
        assert!((0.05..=0.15).contains(&g.metadata.realized_mixing));
        assert!((g.metadata.realized_mean_degree - 8.0).abs() <= 0.8);
        assert!(g.graph.is_connected());
    }

    #[test]
    fn powerlaw_mean_limits_are_continuous() {
        for a in [1.0, 2.0] {
            let exact = powerlaw_mean(a, 1.0, 100.0);
            let near = powerlaw_mean(a + 1e-6, 1.0, 100.0);
            assert!((exact - near).abs() / exact < 1e-4);
        }
        // Quadrature oracle at a = 2.5.
        let (a, lo, hi) = (2.5f64, 2.0f64, 40.0f64);
        let steps = 200_000;
        let h = (hi - lo) / steps as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..steps {
            let x = lo + (i as f64 + 0.5) * h;
            num += x * x.powf(-a) * h;
            den += x.powf(-a) * h;
        }
        assert_abs_diff_eq!(powerlaw_mean(a, lo, hi), num / den, epsilon = 1e-6);
    }

    #[test]
    fn tau_transform_examples() {
        assert_abs_diff_eq!(tau_from_tilde(0.5), 2f64.powf(1.0 / 0.7), epsilon = 1e-12);
        assert_abs_diff_eq!(tau_from_tilde(0.5), 2.6918, epsilon = 1e-4);
        assert!(tau_from_tilde(1e-9) > 1.0 && tau_from_tilde(1e-9) < 1.0 + 1e-6);
        assert_abs_diff_eq!(tilde_tau(tau_from_tilde(0.3)), 0.3, epsilon = 1e-12);
    }

    #[test]
    fn sampled_config_fields() {
        let c = sample_lfr_config(11..=300, 5);
        assert!((11..=300).contains(&c.params.n));
        assert_abs_diff_eq!(c.tilde_tau1, tilde_tau(c.params.tau1), epsilon = 1e-12);
        assert!(c.params.avg_degree >= 2.0);
    }

    #[test]
    fn zero_mixing_has_no_cross_edges() {
        let mut p = LfrParams::new(40, 2.5, 1.5, 0.0, 5.0);
        p.min_community = Some(20);
        p.max_community = Some(20);
        p.max_degree = Some(12);
        let a = wire_lfr(&p, 3).unwrap();
        assert_eq!(a.graph.num_communities(), 2);
        assert_eq!(a.mixing, 0.0);
    }

    #[test]
    fn validation() {
        assert!(LfrParams::new(5, 2.0, 2.0, 0.1, 2.0).validate().is_err());
        assert!(LfrParams::new(50, 1.0, 2.0, 0.1, 2.0).validate().is_err());
        assert!(LfrParams::new(50, 2.0, 2.0, 1.5, 2.0).validate().is_err());
        assert!(LfrParams::new(50, 2.0, 2.0, 0.5, 60.0).validate().is_err());
    }
}
