//! Exact optimal lists for tiny binary permutation-scheme instances.
//!
//! For each observation zⁿ the optimal list of L sequences maximizes the
//! posterior mass of the Hamming balls of radius nD₀ around its entries
//! (weighted max coverage). Sequences are indexed with s₁ as the most
//! significant bit, so index order is lexicographic order.

use serde::{Deserialize, Serialize};

use super::{check_d0, count_successes, hamming_budget, list_bits, AttackError, AttackResult};
use crate::codebook::Key;
use crate::models::{sample_source_block, transmit, Block, Receiver, SourceKind};
use crate::permute::PermutationScheme;
use crate::rd::binary_convolve;

pub const MAX_EXHAUSTIVE_N: usize = 10;
pub const MAX_EXHAUSTIVE_KEY_BITS: u64 = 16;
/// Branch-and-bound nodes allowed per observation.
pub const MAX_SEARCH_NODES: u64 = 50_000_000;
const MAX_KEY_SEQUENCE_WORK: u64 = 1 << 24;

pub fn sequence_to_index(s: &[u8]) -> u32 {
    s.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b & 1))
}

pub fn index_to_sequence(index: u32, n: usize) -> Vec<u8> {
    (0..n).map(|t| ((index >> (n - 1 - t)) & 1) as u8).collect()
}

/// The exact joint law of (Sⁿ, Zⁿ) for a binary permutation scheme, with
/// the key uniform over the codebook.
#[derive(Debug, Clone)]
pub struct BinaryInstance {
    n: usize,
    key_bits: u64,
    /// joint[z][s] = P[Sⁿ = s, Zⁿ = z].
    joint: Vec<Vec<f64>>,
}

impl BinaryInstance {
    pub fn new(scheme: &PermutationScheme) -> Result<Self, AttackError> {
        let system = scheme.system();
        let n = system.n();
        let p = match system.source.kind {
            SourceKind::Bernoulli { p } => p,
            _ => return Err(AttackError::Inapplicable("exhaustive search needs a binary source".into())),
        };
        let (p_prime, p0) = match (system.test_crossover(), system.channel.crossover(Receiver::Wiretapper)) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(AttackError::Inapplicable("exhaustive search needs a binary channel".into())),
        };
        if n > MAX_EXHAUSTIVE_N {
            return Err(AttackError::TooLarge {
                what: "n",
                size: n.to_string(),
                limit: MAX_EXHAUSTIVE_N.to_string(),
            });
        }
        let key_bits = scheme.codebook().key_bits();
        if key_bits > MAX_EXHAUSTIVE_KEY_BITS || (1u64 << key_bits) << n > MAX_KEY_SEQUENCE_WORK {
            return Err(AttackError::TooLarge {
                what: "keys x sequences",
                size: format!("2^{}", key_bits + n as u64),
                limit: format!("2^{}", MAX_KEY_SEQUENCE_WORK.trailing_zeros()),
            });
        }
        let q = binary_convolve(p_prime, p0).expect("validated crossovers");
        let size = 1usize << n;

        // images[s][x] = P[Ψ_K(s) = x].
        let keys = 1u64 << key_bits;
        let mut images = vec![vec![0.0f64; size]; size];
        for k in 0..keys {
            let psi = scheme.codebook().entry(&Key::from_index(key_bits, k)?)?;
            for (s, row) in images.iter_mut().enumerate() {
                let seq = index_to_sequence(s as u32, n);
                row[sequence_to_index(&psi.apply(&seq)?) as usize] += 1.0 / keys as f64;
            }
        }
        let channel: Vec<f64> = (0..=n)
            .map(|d| q.powi(d as i32) * (1.0 - q).powi((n - d) as i32))
            .collect();
        let mut joint = vec![vec![0.0f64; size]; size];
        for (s, row) in images.iter().enumerate() {
            let ones = (s as u32).count_ones() as i32;
            let prior = p.powi(ones) * (1.0 - p).powi(n as i32 - ones);
            for (x, &m) in row.iter().enumerate() {
                if m == 0.0 {
                    continue;
                }
                for (z, jz) in joint.iter_mut().enumerate() {
                    jz[s] += prior * m * channel[((z ^ x) as u32).count_ones() as usize];
                }
            }
        }
        Ok(BinaryInstance { n, key_bits, joint })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn key_bits(&self) -> u64 {
        self.key_bits
    }

    /// P[Sⁿ = s, Zⁿ = z] for every s.
    pub fn joint(&self, z: u32) -> &[f64] {
        &self.joint[z as usize]
    }

    /// P[Sⁿ = s | Zⁿ = z]; uniform when z has probability zero.
    pub fn posterior(&self, z: u32) -> Vec<f64> {
        let row = self.joint(z);
        let total: f64 = row.iter().sum();
        if total == 0.0 {
            return vec![1.0 / row.len() as f64; row.len()];
        }
        row.iter().map(|w| w / total).collect()
    }
}

/// A list-reconstruction code: the list announced for each observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HenchmanCode {
    pub strategy: String,
    pub n: usize,
    pub list_rate: f64,
    pub list_size: u64,
    pub d0: f64,
    /// lists[z] holds sequence indices in increasing order.
    pub lists: Vec<Vec<u32>>,
    /// P[Zⁿ = z, success] per observation.
    pub coverage: Vec<f64>,
    /// Σ_z coverage[z]: the exact success probability of the code.
    pub success: f64,
}

struct Covers {
    words: usize,
    sets: Vec<Vec<u64>>,
    members: Vec<Vec<u32>>,
}

impl Covers {
    fn new(n: usize, budget: usize) -> Self {
        let size = 1usize << n;
        let words = size.div_ceil(64);
        let mut sets = vec![vec![0u64; words]; size];
        let mut members = vec![Vec::new(); size];
        for c in 0..size {
            for s in 0..size {
                if ((c ^ s) as u32).count_ones() as usize <= budget {
                    sets[c][s / 64] |= 1 << (s % 64);
                    members[c].push(s as u32);
                }
            }
        }
        Covers { words, sets, members }
    }

    fn gain(&self, c: usize, covered: &[u64], weights: &[f64]) -> f64 {
        self.members[c]
            .iter()
            .filter(|&&s| covered[s as usize / 64] & (1 << (s % 64)) == 0)
            .map(|&s| weights[s as usize])
            .sum()
    }

    fn add(&self, c: usize, covered: &mut [u64]) {
        for (w, m) in covered.iter_mut().zip(&self.sets[c]) {
            *w |= m;
        }
    }
}

/// Greedy max coverage over `pool`; ties go to the earlier candidate.
fn greedy_list(covers: &Covers, weights: &[f64], pool: &[u32], size: usize) -> (f64, Vec<u32>) {
    let mut covered = vec![0u64; covers.words];
    let mut chosen = Vec::with_capacity(size);
    let mut value = 0.0;
    let mut available: Vec<u32> = pool.to_vec();
    while chosen.len() < size && !available.is_empty() {
        let (pos, gain) = available
            .iter()
            .enumerate()
            .map(|(i, &c)| (i, covers.gain(c as usize, &covered, weights)))
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        let c = available.remove(pos);
        covers.add(c as usize, &mut covered);
        chosen.push(c);
        value += gain;
    }
    chosen.sort_unstable();
    (value, chosen)
}

struct Search<'a> {
    covers: &'a Covers,
    weights: &'a [f64],
    size: usize,
    tie: f64,
    best: f64,
    best_list: Vec<u32>,
    nodes: u64,
}

impl Search<'_> {
    fn run(&mut self, start: usize, chosen: &mut Vec<u32>, covered: &[u64], value: f64) -> Result<(), AttackError> {
        self.nodes += 1;
        if self.nodes > MAX_SEARCH_NODES {
            return Err(AttackError::TooLarge {
                what: "search nodes",
                size: self.nodes.to_string(),
                limit: MAX_SEARCH_NODES.to_string(),
            });
        }
        if chosen.len() == self.size {
            if value > self.best + self.tie {
                self.best = value;
                self.best_list = chosen.clone();
            }
            return Ok(());
        }
        let need = self.size - chosen.len();
        let total = self.covers.sets.len();
        if total - start < need {
            return Ok(());
        }
        let mut gains: Vec<f64> = (start..total).map(|c| self.covers.gain(c, covered, self.weights)).collect();
        let mut top = gains.clone();
        top.sort_unstable_by(|a, b| b.total_cmp(a));
        let bound = value + top[..need].iter().sum::<f64>();
        if bound <= self.best + self.tie {
            return Ok(());
        }
        for c in start..=total - need {
            let gain = std::mem::take(&mut gains[c - start]);
            let mut next = covered.to_vec();
            self.covers.add(c, &mut next);
            chosen.push(c as u32);
            self.run(c + 1, chosen, &next, value + gain)?;
            chosen.pop();
        }
        Ok(())
    }
}

fn list_size(n: usize, list_rate: f64) -> Result<u64, AttackError> {
    let bits = list_bits(n, list_rate)?;
    Ok(if bits >= n as u64 { 1u64 << n } else { 1u64 << bits })
}

/// The optimal list code and its exact success probability.
///
/// Among equally good lists the lexicographically smallest (as a sorted
/// index tuple) is returned; the optimum value does not depend on this.
pub fn exhaustive_henchman(instance: &BinaryInstance, d0: f64, list_rate: f64) -> Result<HenchmanCode, AttackError> {
    check_d0(d0)?;
    let n = instance.n;
    let size = list_size(n, list_rate)? as usize;
    let covers = Covers::new(n, hamming_budget(n, d0));
    let all: Vec<u32> = (0..1u32 << n).collect();
    let mut lists = Vec::with_capacity(all.len());
    for z in 0..1u32 << n {
        let weights = instance.joint(z);
        let (greedy, greedy_list) = greedy_list(&covers, weights, &all, size);
        let tie = 1e-12 * weights.iter().sum::<f64>();
        let mut search = Search {
            covers: &covers,
            weights,
            size,
            tie,
            best: greedy - 2.0 * tie,
            best_list: greedy_list,
            nodes: 0,
        };
        search.run(0, &mut Vec::with_capacity(size), &vec![0u64; covers.words], 0.0)?;
        lists.push(search.best_list);
    }
    Ok(finish("exhaustive", instance, &covers, list_rate, size, d0, lists))
}

/// Coverage is recomputed by summing covered weights in ascending sequence
/// order, so a list covering a superset never scores lower in floating
/// point.
fn finish(
    strategy: &str,
    instance: &BinaryInstance,
    covers: &Covers,
    list_rate: f64,
    size: usize,
    d0: f64,
    lists: Vec<Vec<u32>>,
) -> HenchmanCode {
    let n = instance.n;
    let coverage: Vec<f64> = lists
        .iter()
        .enumerate()
        .map(|(z, list)| {
            let mut covered = vec![0u64; covers.words];
            for &c in list {
                covers.add(c as usize, &mut covered);
            }
            let weights = instance.joint(z as u32);
            (0..weights.len())
                .filter(|&s| covered[s / 64] & (1 << (s % 64)) != 0)
                .map(|s| weights[s])
                .sum()
        })
        .collect();
    HenchmanCode {
        strategy: strategy.to_owned(),
        n,
        list_rate,
        list_size: size as u64,
        d0,
        success: coverage.iter().sum(),
        lists,
        coverage,
    }
}

/// Candidates the greedy henchman may place on a list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "size")]
pub enum CandidatePool {
    /// Every sequence.
    All,
    /// The k sequences of largest posterior probability for each z.
    PosteriorTop(usize),
}

fn pool_for(pool: CandidatePool, weights: &[f64]) -> Result<Vec<u32>, AttackError> {
    match pool {
        CandidatePool::All => Ok((0..weights.len() as u32).collect()),
        CandidatePool::PosteriorTop(0) => Err(AttackError::EmptyPool),
        CandidatePool::PosteriorTop(k) => {
            let mut idx: Vec<u32> = (0..weights.len() as u32).collect();
            idx.sort_by(|&a, &b| weights[b as usize].total_cmp(&weights[a as usize]).then(a.cmp(&b)));
            idx.truncate(k);
            idx.sort_unstable();
            Ok(idx)
        }
    }
}

/// The greedy list code and its exact success probability.
pub fn greedy_value(
    instance: &BinaryInstance,
    d0: f64,
    list_rate: f64,
    pool: CandidatePool,
) -> Result<HenchmanCode, AttackError> {
    check_d0(d0)?;
    let n = instance.n;
    let size = list_size(n, list_rate)? as usize;
    let covers = Covers::new(n, hamming_budget(n, d0));
    let mut lists = Vec::new();
    for z in 0..1u32 << n {
        let weights = instance.joint(z);
        lists.push(greedy_list(&covers, weights, &pool_for(pool, weights)?, size).1);
    }
    Ok(finish("greedy", instance, &covers, list_rate, size, d0, lists))
}

/// Monte-Carlo success of the greedy henchman against the live scheme.
pub fn greedy_henchman(
    scheme: &PermutationScheme,
    instance: &BinaryInstance,
    d0: f64,
    list_rate: f64,
    pool: CandidatePool,
    trials: u64,
    seed: u64,
) -> Result<AttackResult, AttackError> {
    let code = greedy_value(instance, d0, list_rate, pool)?;
    simulate_list_attack(scheme, &code, trials, seed)
}

/// Runs the scheme end to end and counts how often the list announced for
/// the observed zⁿ contains a sequence within distortion D₀ of Sⁿ.
pub fn simulate_list_attack(
    scheme: &PermutationScheme,
    code: &HenchmanCode,
    trials: u64,
    seed: u64,
) -> Result<AttackResult, AttackError> {
    let system = scheme.system();
    let n = system.n();
    if code.n != n || code.lists.len() != 1 << n {
        return Err(AttackError::Inapplicable("list code and scheme blocklengths differ".into()));
    }
    let budget = hamming_budget(n, code.d0);
    let successes = count_successes(trials, seed, |rng| {
        let s = sample_source_block(&system.source, n, &mut rng.fork(0));
        let key = scheme.codebook().random_key(&mut rng.fork(1));
        let x = scheme.encode(&s, &key, &mut rng.fork(2))?;
        let out = transmit(&system.channel, &x, &rng.fork(3))?;
        let (Block::Binary(s), Block::Binary(z)) = (&s, &out.z) else {
            return Err(AttackError::Inapplicable("binary blocks expected".into()));
        };
        let s = sequence_to_index(s);
        Ok(code.lists[sequence_to_index(z) as usize]
            .iter()
            .any(|&c| ((c ^ s).count_ones() as usize) <= budget))
    })?;
    Ok(AttackResult::from_counts(&code.strategy, code.list_rate, code.d0, n, successes, trials, seed))
}
