//! Prefix codes and the bound on conceptual cross entropy.
//!
//! Encoding letters drawn from `P` with a code built for `Q` costs
//! `sum p_i len_i` bits per letter on average. With a Huffman code for `Q`
//! over `n` letters no codeword is longer than `n - 1`, so that conceptual
//! cross entropy, and the KL divergence it bounds, never exceeds `n - 1`.
//! [`worst_case_pmf`](crate::pmf::worst_case_pmf) with [`worst_case_code`] reaches
//! the bound.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::{shannon_entropy, Alphabet, Pmf};

/// One binary codeword per letter. Prefix-free with Kraft sum at most 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixCode {
    alphabet: Alphabet,
    codewords: Vec<String>,
}

impl PrefixCode {
    /// Validate that the codewords are binary, prefix-free and satisfy Kraft.
    pub fn new(alphabet: Alphabet, codewords: Vec<String>) -> Result<Self> {
        if codewords.len() != alphabet.len() {
            return Err(Error::LengthMismatch {
                letters: alphabet.len(),
                probabilities: codewords.len(),
            });
        }
        if let Some(bad) = codewords
            .iter()
            .find(|c| c.chars().any(|b| b != '0' && b != '1'))
        {
            return Err(Error::InvalidCode(format!(
                "{bad:?} is not a binary string"
            )));
        }
        let mut sorted: Vec<&str> = codewords.iter().map(String::as_str).collect();
        sorted.sort_unstable();
        // in lexicographic order a prefix sorts directly before some extension
        for w in sorted.windows(2) {
            if w[1].starts_with(w[0]) {
                return Err(Error::InvalidCode(format!(
                    "{:?} is a prefix of {:?}",
                    w[0], w[1]
                )));
            }
        }
        let code = Self {
            alphabet,
            codewords,
        };
        let kraft = code.kraft_sum();
        if kraft > 1.0 + 1e-12 {
            return Err(Error::InvalidCode(format!("Kraft sum {kraft} exceeds 1")));
        }
        Ok(code)
    }

    /// Canonical code with the given lengths: codewords assigned in order of
    /// (length, letter index), each the previous one plus one, shifted.
    pub fn canonical(alphabet: Alphabet, lengths: &[usize]) -> Result<Self> {
        if lengths.len() != alphabet.len() {
            return Err(Error::LengthMismatch {
                letters: alphabet.len(),
                probabilities: lengths.len(),
            });
        }
        let kraft: f64 = lengths.iter().map(|&l| 0.5f64.powi(l as i32)).sum();
        if kraft > 1.0 + 1e-12 {
            return Err(Error::InvalidCode(format!("Kraft sum {kraft} exceeds 1")));
        }
        let mut order: Vec<usize> = (0..lengths.len()).collect();
        order.sort_by_key(|&i| (lengths[i], i));
        let mut codewords = vec![String::new(); lengths.len()];
        let mut next: u128 = 0;
        let mut prev_len = 0usize;
        for (rank, &i) in order.iter().enumerate() {
            let len = lengths[i];
            if len > 127 {
                return Err(Error::InvalidCode(format!(
                    "codeword length {len} is too long"
                )));
            }
            if rank > 0 {
                next = (next + 1) << (len - prev_len);
            }
            codewords[i] = if len == 0 {
                String::new()
            } else {
                format!("{next:0len$b}")
            };
            prev_len = len;
        }
        Self::new(alphabet, codewords)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn codewords(&self) -> &[String] {
        &self.codewords
    }

    pub fn lengths(&self) -> Vec<usize> {
        self.codewords.iter().map(String::len).collect()
    }

    pub fn max_length(&self) -> usize {
        self.codewords.iter().map(String::len).max().unwrap_or(0)
    }

    pub fn kraft_sum(&self) -> f64 {
        self.codewords
            .iter()
            .map(|c| 0.5f64.powi(c.len() as i32))
            .sum()
    }

    /// `sum p_i len_i`.
    pub fn avg_length_under(&self, p: &Pmf) -> Result<f64> {
        CodeStats::from_lengths(self.lengths()).avg_length_under(p)
    }

    pub fn stats(&self, q: &Pmf) -> Result<CodeStats> {
        let mut s = CodeStats::from_lengths(self.lengths());
        s.average = s.avg_length_under(q)?;
        Ok(s)
    }
}

/// Codeword lengths with their maximum and average under a PMF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeStats {
    pub lengths: Vec<usize>,
    pub max_length: usize,
    /// Average length under the PMF the lengths were derived from.
    pub average: f64,
}

impl CodeStats {
    fn from_lengths(lengths: Vec<usize>) -> Self {
        let max_length = lengths.iter().copied().max().unwrap_or(0);
        Self {
            lengths,
            max_length,
            average: f64::NAN,
        }
    }

    pub fn avg_length_under(&self, p: &Pmf) -> Result<f64> {
        if p.len() != self.lengths.len() {
            return Err(Error::AlphabetMismatch);
        }
        Ok(p.probs()
            .iter()
            .zip(&self.lengths)
            .map(|(&pi, &l)| pi * l as f64)
            .sum())
    }
}

#[derive(Debug)]
struct Node {
    prob: f64,
    min_index: usize,
    id: usize,
}

// BinaryHeap is a max-heap; reverse so the lowest (prob, min_index) pops first.
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .prob
            .total_cmp(&self.prob)
            .then_with(|| other.min_index.cmp(&self.min_index))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

/// Optimal binary prefix code for `q`.
///
/// Merges the two nodes with the lowest probability, breaking ties by the
/// lowest original letter index. The heavier branch of each merge gets `0`.
/// Zero-probability letters are allowed and end up deepest. A one-letter
/// alphabet gets the empty codeword.
pub fn huffman(q: &Pmf) -> PrefixCode {
    let n = q.len();
    // children[id] for internal nodes; leaves are ids 0..n
    let mut children: Vec<(usize, usize)> = Vec::with_capacity(n.saturating_sub(1));
    let mut heap: BinaryHeap<Node> = q
        .probs()
        .iter()
        .enumerate()
        .map(|(i, &prob)| Node {
            prob,
            min_index: i,
            id: i,
        })
        .collect();
    while heap.len() > 1 {
        let light = heap.pop().expect("heap has two nodes");
        let heavy = heap.pop().expect("heap has two nodes");
        children.push((heavy.id, light.id));
        heap.push(Node {
            prob: light.prob + heavy.prob,
            min_index: light.min_index.min(heavy.min_index),
            id: n + children.len() - 1,
        });
    }
    let mut codewords = vec![String::new(); n];
    if let Some(root) = heap.pop() {
        let mut stack = vec![(root.id, String::new())];
        while let Some((id, prefix)) = stack.pop() {
            if id < n {
                codewords[id] = prefix;
            } else {
                let (zero, one) = children[id - n];
                stack.push((one, format!("{prefix}1")));
                stack.push((zero, format!("{prefix}0")));
            }
        }
    }
    PrefixCode::new(q.alphabet().clone(), codewords).expect("Huffman codes are prefix-free")
}

/// Lengths `ceil(log2(1 / q_i))`, taken literally rather than from a code
/// construction.
pub fn shannon_literal_lengths(q: &Pmf) -> Result<CodeStats> {
    let mut lengths = Vec::with_capacity(q.len());
    for (i, &qi) in q.probs().iter().enumerate() {
        if qi <= 0.0 {
            let letter = q.alphabet().letter(i).unwrap_or_default().to_string();
            return Err(Error::ZeroProbabilityLetter(letter));
        }
        // the small slack keeps exact powers of two from rounding up
        lengths.push(((1.0 / qi).log2() - 1e-12).ceil().max(0.0) as usize);
    }
    let mut s = CodeStats::from_lengths(lengths);
    s.average = s.avg_length_under(q)?;
    Ok(s)
}

/// `sum p_i len(c_i)`: the average bits per letter when letters drawn from
/// `P` are written with `code`.
pub fn conceptual_cross_entropy(p: &Pmf, code: &PrefixCode) -> Result<f64> {
    if p.alphabet() != code.alphabet() {
        return Err(Error::AlphabetMismatch);
    }
    code.avg_length_under(p)
}

/// `z1: 0, z2: 10, z3: 110, ..., z(n-1): 1..10, zn: 1..11`.
pub fn worst_case_code(n: usize) -> Result<PrefixCode> {
    if n < 2 {
        return Err(Error::AlphabetTooSmall { n, min: 2 });
    }
    let codewords = (1..=n)
        .map(|i| {
            if i < n {
                format!("{}0", "1".repeat(i - 1))
            } else {
                "1".repeat(n - 1)
            }
        })
        .collect();
    PrefixCode::new(Alphabet::indexed(n)?, codewords)
}

/// Outcome of [`bound_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    /// `n - 1`.
    pub bound: f64,
    pub max_codeword_length: usize,
    pub max_conceptual_cross_entropy: f64,
    /// Largest `conceptual CE - H(P)`, the conceptual KL divergence.
    pub max_conceptual_kl: f64,
    pub passed: bool,
}

/// Random PMF from normalized unit exponentials, with some exact zeros.
fn random_pmf<R: Rng>(rng: &mut R, alphabet: &Alphabet) -> Pmf {
    loop {
        let w: Vec<f64> = (0..alphabet.len())
            .map(|_| {
                if rng.random_bool(0.1) {
                    0.0
                } else {
                    -(1.0 - rng.random::<f64>()).ln()
                }
            })
            .collect();
        if let Ok(p) = Pmf::renormalize(alphabet.clone(), w) {
            return p;
        }
    }
}

/// Check the `n - 1` bound on `trials` random `(P, Q)` pairs.
///
/// Trial `t` draws from ChaCha8 seeded with `seed` on stream `t`, so the
/// result does not depend on how rayon schedules the trials.
pub fn bound_report(n: usize, trials: usize, seed: u64) -> Result<BoundReport> {
    if n < 2 {
        return Err(Error::AlphabetTooSmall { n, min: 2 });
    }
    let alphabet = Alphabet::indexed(n)?;
    let (max_len, max_ce, max_kl) = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let p = random_pmf(&mut rng, &alphabet);
            let q = random_pmf(&mut rng, &alphabet);
            let code = huffman(&q);
            let ce = conceptual_cross_entropy(&p, &code).expect("same alphabet");
            (code.max_length(), ce, ce - shannon_entropy(&p))
        })
        .reduce(
            || (0, f64::NEG_INFINITY, f64::NEG_INFINITY),
            |a, b| (a.0.max(b.0), a.1.max(b.1), a.2.max(b.2)),
        );
    let bound = (n - 1) as f64;
    Ok(BoundReport {
        n,
        trials,
        seed,
        bound,
        max_codeword_length: max_len,
        max_conceptual_cross_entropy: max_ce,
        max_conceptual_kl: max_kl,
        passed: max_len < n && max_ce <= bound && max_kl <= bound,
    })
}
