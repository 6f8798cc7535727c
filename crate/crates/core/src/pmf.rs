//! Alphabets, probability mass functions and entropy.
//!
//! A [`Pmf`] is always validated on construction: non-negative entries that
//! sum to one within an absolute tolerance. Nothing in this crate silently
//! renormalizes; [`Pmf::renormalize`] exists for callers that want it.
//!
//! Logarithms are base 2 throughout and `0 * log2(0)` is taken as `0`.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default absolute tolerance on `|sum(p) - 1|`.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Ordered set of distinct letter labels.
///
/// Cloning is cheap; the labels are shared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    letters: Arc<[String]>,
}

impl Alphabet {
    pub fn new<I, S>(letters: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let letters: Vec<String> = letters.into_iter().map(Into::into).collect();
        if letters.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        let mut seen = HashSet::with_capacity(letters.len());
        for l in &letters {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLetter(l.clone()));
            }
        }
        Ok(Self {
            letters: letters.into(),
        })
    }

    /// `z1, z2, ..., zn`.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("z{i}")))
    }

    /// Integer labels `1, 2, ..., n`, as used for answers in minutes.
    pub fn integers(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[String] {
        &self.letters
    }

    pub fn letter(&self, index: usize) -> Option<&str> {
        self.letters.get(index).map(String::as_str)
    }

    pub fn index_of(&self, letter: &str) -> Option<usize> {
        self.letters.iter().position(|l| l == letter)
    }

    fn same_as(&self, other: &Alphabet) -> bool {
        Arc::ptr_eq(&self.letters, &other.letters) || self.letters == other.letters
    }
}

/// Probability mass function over an [`Alphabet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PmfRecord", into = "PmfRecord")]
pub struct Pmf {
    alphabet: Alphabet,
    p: Vec<f64>,
}

/// On-disk shape: `{"letters": [...], "p": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PmfRecord {
    pub letters: Vec<String>,
    pub p: Vec<f64>,
}

impl TryFrom<PmfRecord> for Pmf {
    type Error = Error;

    fn try_from(r: PmfRecord) -> Result<Self> {
        Pmf::new(Alphabet::new(r.letters)?, r.p)
    }
}

impl From<Pmf> for PmfRecord {
    fn from(p: Pmf) -> Self {
        PmfRecord {
            letters: p.alphabet.letters().to_vec(),
            p: p.p,
        }
    }
}

impl Pmf {
    /// Validate `p` against `alphabet` with the default tolerance.
    pub fn new(alphabet: Alphabet, p: Vec<f64>) -> Result<Self> {
        Self::validate(alphabet, p, DEFAULT_TOLERANCE)
    }

    /// Check non-negativity, length and unit mass. Never renormalizes.
    pub fn validate(alphabet: Alphabet, p: Vec<f64>, tolerance: f64) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if p.len() != alphabet.len() {
            return Err(Error::LengthMismatch {
                letters: alphabet.len(),
                probabilities: p.len(),
            });
        }
        for (index, &value) in p.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteMass { index });
            }
            if value < 0.0 {
                return Err(Error::NegativeMass { index, value });
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > tolerance {
            return Err(Error::MassNotUnit { sum, tolerance });
        }
        Ok(Self { alphabet, p })
    }

    /// Validate a bare vector, labelling letters `z1..zn`.
    pub fn from_probs(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        Self::new(Alphabet::indexed(p.len())?, p)
    }

    /// Scale non-negative weights so they sum to one.
    pub fn renormalize(alphabet: Alphabet, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteMass { index });
            }
            if value < 0.0 {
                return Err(Error::NegativeMass { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 {
            return Err(Error::MassNotUnit {
                sum,
                tolerance: DEFAULT_TOLERANCE,
            });
        }
        Self::new(alphabet, weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    pub fn get(&self, letter: &str) -> Option<f64> {
        self.alphabet.index_of(letter).map(|i| self.p[i])
    }

    pub fn entropy(&self) -> f64 {
        shannon_entropy(self)
    }

    /// True if both PMFs are over the same ordered alphabet.
    pub fn same_alphabet(&self, other: &Pmf) -> bool {
        self.alphabet.same_as(&other.alphabet)
    }

    pub(crate) fn ensure_same_alphabet(&self, other: &Pmf) -> Result<()> {
        if self.same_alphabet(other) {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch)
        }
    }
}

/// `-p log2 p` with the `0 log 0 = 0` convention.
#[inline]
pub(crate) fn surprisal_term(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// H(P) in bits.
pub fn shannon_entropy(pmf: &Pmf) -> f64 {
    pmf.p.iter().copied().map(surprisal_term).sum()
}

/// log2 n.
pub fn max_entropy(alphabet: &Alphabet) -> f64 {
    (alphabet.len() as f64).log2()
}

pub fn one_hot(alphabet: &Alphabet, index: usize) -> Result<Pmf> {
    if index >= alphabet.len() {
        return Err(Error::IndexOutOfRange {
            index,
            len: alphabet.len(),
        });
    }
    let mut p = vec![0.0; alphabet.len()];
    p[index] = 1.0;
    Pmf::new(alphabet.clone(), p)
}

/// One-hot PMF placed on the letter with the given label.
pub fn one_hot_letter(alphabet: &Alphabet, letter: &str) -> Result<Pmf> {
    let index = alphabet
        .index_of(letter)
        .ok_or_else(|| Error::UnknownLetter(letter.to_string()))?;
    one_hot(alphabet, index)
}

pub fn uniform(alphabet: &Alphabet) -> Pmf {
    let n = alphabet.len();
    Pmf {
        alphabet: alphabet.clone(),
        p: vec![1.0 / n as f64; n],
    }
}

/// The least-probable-last PMF whose optimal code is the unary-style code
/// `0, 10, 110, ..., 1..10, 1..11`.
///
/// `q(z_n) = eps`, `q(z_i) = (1 - eps) 2^-i` for `2 <= i <= n-1`, and
/// `q(z_1) = (1 - eps)(2^-1 + 2^-(n-1))`. Requires `n >= 2` and
/// `0 < eps < 2^-(n-1)`.
pub fn worst_case_pmf(n: usize, epsilon: f64) -> Result<Pmf> {
    if n < 2 {
        return Err(Error::AlphabetTooSmall { n, min: 2 });
    }
    let upper = 0.5f64.powi(n as i32 - 1);
    if !(epsilon > 0.0 && epsilon < upper) {
        return Err(Error::EpsilonOutOfRange { n, epsilon });
    }
    let rest = 1.0 - epsilon;
    let mut p = Vec::with_capacity(n);
    p.push(rest * (0.5 + upper));
    for i in 2..n {
        p.push(rest * 0.5f64.powi(i as i32));
    }
    p.push(epsilon);
    Pmf::new(Alphabet::indexed(n)?, p)
}

/// Which band of the piecewise walking-time PMF a letter falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    SpotOn,
    Close,
    WildGuess,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::SpotOn, Band::Close, Band::WildGuess];

    pub fn as_str(self) -> &'static str {
        match self {
            Band::SpotOn => "spot_on",
            Band::Close => "close",
            Band::WildGuess => "wild_guess",
        }
    }

    /// Probability given to each letter of this band.
    fn mass_per_letter(self, n: usize) -> f64 {
        match self {
            Band::SpotOn => 0.12,
            Band::Close => 0.026,
            Band::WildGuess => 0.01 / (n - LONDON_BANDED) as f64,
        }
    }
}

impl std::fmt::Display for Band {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Band {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s
            .trim()
            .to_ascii_lowercase()
            .replace([' ', '-'], "_")
            .as_str()
        {
            "spot_on" | "spot" => Ok(Band::SpotOn),
            "close" => Ok(Band::Close),
            "wild_guess" | "wild" => Ok(Band::WildGuess),
            other => Err(Error::InvalidRecord(format!("unknown category {other:?}"))),
        }
    }
}

/// Letters covered by the spot-on and close bands together.
const LONDON_BANDED: usize = 20;

/// Band of letter `i` (1-based) around the estimate `xi`.
///
/// Spot on is `xi-2..=xi+2`, close is `xi-7..=xi-3` and `xi+3..=xi+12`,
/// everything else is a wild guess. Out-of-alphabet letters are not checked.
pub fn london_band(xi: usize, i: usize) -> Band {
    let (xi, i) = (xi as i64, i as i64);
    let d = i - xi;
    if (-2..=2).contains(&d) {
        Band::SpotOn
    } else if (-7..=-3).contains(&d) || (3..=12).contains(&d) {
        Band::Close
    } else {
        Band::WildGuess
    }
}

/// Check that every band around `xi` fits inside `[1, n]`.
pub(crate) fn check_london_xi(xi: usize, n: usize) -> Result<()> {
    if n <= LONDON_BANDED {
        return Err(Error::AlphabetTooSmall {
            n,
            min: LONDON_BANDED + 1,
        });
    }
    if xi < 8 || xi + 12 > n {
        return Err(Error::XiOutOfRange { xi, n });
    }
    Ok(())
}

/// Coarse walking-time PMF peaked at the estimate `xi` (letters `1..=n`).
///
/// Five spot-on letters at 0.12, fifteen close letters at 0.026 and the
/// remaining `n - 20` letters share 0.01 equally (0.01/236 for n = 256).
/// Rejects `xi` whose close bands would be clipped by the alphabet ends.
pub fn piecewise_london_pmf(xi: usize, n: usize) -> Result<Pmf> {
    check_london_xi(xi, n)?;
    let p = (1..=n)
        .map(|i| london_band(xi, i).mass_per_letter(n))
        .collect();
    Pmf::new(Alphabet::integers(n)?, p)
}

/// Joint distribution `r[i][j]` over pairs of letters of one alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct JointPmf {
    alphabet: Alphabet,
    r: Vec<f64>,
}

impl JointPmf {
    pub fn new(alphabet: Alphabet, rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::validate(alphabet, rows, DEFAULT_TOLERANCE)
    }

    pub fn validate(alphabet: Alphabet, rows: Vec<Vec<f64>>, tolerance: f64) -> Result<Self> {
        let n = alphabet.len();
        if rows.len() != n || rows.iter().any(|row| row.len() != n) {
            return Err(Error::JointShape {
                expected: n,
                rows: rows.len(),
            });
        }
        let r: Vec<f64> = rows.into_iter().flatten().collect();
        for (index, &value) in r.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteMass { index });
            }
            if value < 0.0 {
                return Err(Error::NegativeMass { index, value });
            }
        }
        let sum: f64 = r.iter().sum();
        if (sum - 1.0).abs() > tolerance {
            return Err(Error::MassNotUnit { sum, tolerance });
        }
        Ok(Self { alphabet, r })
    }

    /// Outer product `p_i q_j`.
    pub fn independent(p: &Pmf, q: &Pmf) -> Result<Self> {
        p.ensure_same_alphabet(q)?;
        let rows = p
            .probs()
            .iter()
            .map(|&pi| q.probs().iter().map(|&qj| pi * qj).collect())
            .collect();
        Self::new(p.alphabet().clone(), rows)
    }

    /// `r[i][i] = p_i`, zero elsewhere.
    pub fn diagonal(p: &Pmf) -> Self {
        let n = p.len();
        let mut r = vec![0.0; n * n];
        for (i, &pi) in p.probs().iter().enumerate() {
            r[i * n + i] = pi;
        }
        Self {
            alphabet: p.alphabet().clone(),
            r,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn n(&self) -> usize {
        self.alphabet.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.r[i * self.n() + j]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.r
            .chunks(self.n())
            .map(|row| row.iter().sum())
            .collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|j| (0..n).map(|i| self.get(i, j)).sum())
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.r.chunks(self.n()).map(<[f64]>::to_vec).collect()
    }

    /// Check that rows reproduce `p` and columns reproduce `q`.
    pub fn check_marginals(&self, p: &Pmf, q: &Pmf, tolerance: f64) -> Result<()> {
        if !self.alphabet.same_as(p.alphabet()) || !self.alphabet.same_as(q.alphabet()) {
            return Err(Error::AlphabetMismatch);
        }
        for (name, sums, target) in [
            ("row", self.row_sums(), p.probs()),
            ("column", self.column_sums(), q.probs()),
        ] {
            for (i, (s, t)) in sums.iter().zip(target).enumerate() {
                if (s - t).abs() > tolerance {
                    return Err(Error::MarginalMismatch(format!(
                        "{name} {i} sums to {s}, marginal is {t}"
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn validate_examples() {
        assert!(Pmf::from_probs(vec![0.8, 0.2]).is_ok());
        assert!(matches!(
            Pmf::from_probs(vec![0.5, 0.6]),
            Err(Error::MassNotUnit { .. })
        ));
        assert!(matches!(
            Pmf::from_probs(vec![1.0, -0.0001, 0.0001]),
            Err(Error::NegativeMass { index: 1, .. })
        ));
        assert_eq!(Pmf::from_probs(vec![]), Err(Error::EmptyAlphabet));
        assert!(matches!(
            Pmf::new(Alphabet::indexed(3).unwrap(), vec![0.5, 0.5]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            Pmf::from_probs(vec![f64::NAN, 1.0]),
            Err(Error::NonFiniteMass { index: 0 })
        ));
    }

    #[test]
    fn alphabet_rejects_duplicates_and_empty() {
        assert_eq!(
            Alphabet::new(["a", "b", "a"]),
            Err(Error::DuplicateLetter("a".into()))
        );
        assert_eq!(
            Alphabet::new(Vec::<String>::new()),
            Err(Error::EmptyAlphabet)
        );
    }

    #[test]
    fn renormalize_is_explicit() {
        let a = Alphabet::indexed(2).unwrap();
        let p = Pmf::renormalize(a.clone(), vec![3.0, 1.0]).unwrap();
        assert_eq!(p.probs(), &[0.75, 0.25]);
        assert!(Pmf::new(a, vec![3.0, 1.0]).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(
            shannon_entropy(&Pmf::from_probs(vec![0.5, 0.5]).unwrap()),
            1.0
        );
        assert_eq!(
            shannon_entropy(&Pmf::from_probs(vec![1.0, 0.0, 0.0, 0.0]).unwrap()),
            0.0
        );
        // frozen from direct summation of -p log2 p
        let q = Pmf::from_probs(vec![0.1, 0.878, 0.002, 0.02]).unwrap();
        assert!(close(shannon_entropy(&q), 0.627_808_384_054_823, 1e-12));
    }

    #[test]
    fn max_entropy_examples() {
        assert_eq!(max_entropy(&Alphabet::indexed(4).unwrap()), 2.0);
        assert_eq!(max_entropy(&Alphabet::indexed(256).unwrap()), 8.0);
        assert_eq!(max_entropy(&Alphabet::indexed(1).unwrap()), 0.0);
    }

    #[test]
    fn one_hot_and_uniform() {
        let a4 = Alphabet::indexed(4).unwrap();
        assert_eq!(one_hot(&a4, 0).unwrap().probs(), &[1.0, 0.0, 0.0, 0.0]);
        let a2 = Alphabet::indexed(2).unwrap();
        assert_eq!(one_hot(&a2, 1).unwrap().probs(), &[0.0, 1.0]);
        assert_eq!(
            one_hot(&a2, 2),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        );
        assert_eq!(one_hot(&a4, 3).unwrap().entropy(), 0.0);
        assert_eq!(uniform(&a4).probs(), &[0.25; 4]);
        assert_eq!(uniform(&a2).probs(), &[0.5; 2]);
        assert_eq!(uniform(&a4).entropy(), 2.0);
        assert_eq!(
            one_hot_letter(&a4, "z3").unwrap().probs(),
            &[0.0, 0.0, 1.0, 0.0]
        );
        assert!(matches!(
            one_hot_letter(&a4, "nope"),
            Err(Error::UnknownLetter(_))
        ));
    }

    #[test]
    fn worst_case_examples() {
        let q = worst_case_pmf(3, 0.1).unwrap();
        for (got, want) in q.probs().iter().zip([0.675, 0.225, 0.1]) {
            assert!(close(*got, want, 1e-15));
        }
        let q = worst_case_pmf(2, 0.25).unwrap();
        assert!(close(q.probs()[0], 0.75, 1e-15));
        assert!(close(q.probs()[1], 0.25, 1e-15));
        assert!(matches!(
            worst_case_pmf(3, 0.25),
            Err(Error::EpsilonOutOfRange { .. })
        ));
        assert!(matches!(
            worst_case_pmf(3, 0.0),
            Err(Error::EpsilonOutOfRange { .. })
        ));
        assert!(matches!(
            worst_case_pmf(1, 0.1),
            Err(Error::AlphabetTooSmall { .. })
        ));
    }

    #[test]
    fn london_pmf_examples() {
        let q = piecewise_london_pmf(20, 256).unwrap();
        assert_eq!(q.get("20"), Some(0.12));
        assert_eq!(q.get("15"), Some(0.026));
        assert_eq!(q.get("1"), Some(0.01 / 236.0));
        assert!(close(q.probs().iter().sum::<f64>(), 1.0, 1e-12));
        // frozen from direct summation of -p log2 p over the 256 letters
        assert!(close(q.entropy(), 4.034_085_586_766_696, 1e-9));
    }

    #[test]
    fn london_pmf_rejects_clipped_bands() {
        assert!(piecewise_london_pmf(8, 256).is_ok());
        assert!(piecewise_london_pmf(244, 256).is_ok());
        assert_eq!(
            piecewise_london_pmf(7, 256),
            Err(Error::XiOutOfRange { xi: 7, n: 256 })
        );
        assert_eq!(
            piecewise_london_pmf(245, 256),
            Err(Error::XiOutOfRange { xi: 245, n: 256 })
        );
        assert!(matches!(
            piecewise_london_pmf(8, 20),
            Err(Error::AlphabetTooSmall { .. })
        ));
    }

    #[test]
    fn london_bands_partition_with_expected_mass() {
        for xi in [8usize, 20, 32, 45, 244] {
            let q = piecewise_london_pmf(xi, 256).unwrap();
            let mut mass = std::collections::BTreeMap::new();
            let mut count = std::collections::BTreeMap::new();
            for i in 1..=256 {
                let b = london_band(xi, i);
                *mass.entry(b).or_insert(0.0) += q.probs()[i - 1];
                *count.entry(b).or_insert(0usize) += 1;
            }
            assert_eq!(count[&Band::SpotOn], 5);
            assert_eq!(count[&Band::Close], 15);
            assert_eq!(count[&Band::WildGuess], 236);
            assert!(close(mass[&Band::SpotOn], 0.60, 1e-12));
            assert!(close(mass[&Band::Close], 0.39, 1e-12));
            assert!(close(mass[&Band::WildGuess], 0.01, 1e-12));
        }
    }

    #[test]
    fn joint_marginals() {
        let p = Pmf::from_probs(vec![0.5, 0.5]).unwrap();
        let r = JointPmf::new(p.alphabet().clone(), vec![vec![0.4, 0.1], vec![0.1, 0.4]]).unwrap();
        assert!(r.check_marginals(&p, &p, 1e-12).is_ok());
        let skew = Pmf::new(p.alphabet().clone(), vec![0.3, 0.7]).unwrap();
        assert!(matches!(
            r.check_marginals(&skew, &p, 1e-9),
            Err(Error::MarginalMismatch(_))
        ));
        assert!(matches!(
            JointPmf::new(p.alphabet().clone(), vec![vec![1.0]]),
            Err(Error::JointShape { .. })
        ));
    }

    #[test]
    fn pmf_json_shape() {
        let p: Pmf = serde_json::from_str(r#"{"letters": ["A","B"], "p": [0.8, 0.2]}"#).unwrap();
        assert_eq!(p.get("A"), Some(0.8));
        let back = serde_json::to_string(&p).unwrap();
        assert_eq!(back, r#"{"letters":["A","B"],"p":[0.8,0.2]}"#);
        assert!(serde_json::from_str::<Pmf>(r#"{"letters": ["A","B"], "p": [0.5, 0.6]}"#).is_err());
    }

    fn arb_weights(max_n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], 1..=max_n)
            .prop_filter("some mass", |w| w.iter().sum::<f64>() > 1e-6)
    }

    proptest! {
        #[test]
        fn entropy_is_bounded(w in arb_weights(32)) {
            let a = Alphabet::indexed(w.len()).unwrap();
            let p = Pmf::renormalize(a.clone(), w).unwrap();
            let h = p.entropy();
            prop_assert!(h >= 0.0);
            prop_assert!(h <= max_entropy(&a) + 1e-12);
        }

        #[test]
        fn worst_case_sums_to_one_and_decreases(n in 2usize..=16, t in 0.0001f64..0.9999) {
            let eps = t * 0.5f64.powi(n as i32 - 1);
            let q = worst_case_pmf(n, eps).unwrap();
            let p = q.probs();
            prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for i in 1..n.saturating_sub(1) {
                prop_assert!(p[i - 1] > p[i]);
            }
            // the last step only decreases while eps < (1 - eps) 2^-(n-1)
            if n > 2 && eps < (1.0 - eps) * 0.5f64.powi(n as i32 - 1) {
                prop_assert!(p[n - 2] > p[n - 1]);
            }
            if n == 2 {
                prop_assert!(p[0] > p[1]);
            }
        }

        #[test]
        fn constructors_always_validate(n in 1usize..64, idx in 0usize..64) {
            let a = Alphabet::indexed(n).unwrap();
            let u = uniform(&a);
            prop_assert!(Pmf::new(a.clone(), u.probs().to_vec()).is_ok());
            if idx < n {
                let h = one_hot(&a, idx).unwrap();
                prop_assert!(Pmf::new(a.clone(), h.probs().to_vec()).is_ok());
            }
        }

        #[test]
        fn london_pmf_validates(xi in 8usize..=244) {
            let q = piecewise_london_pmf(xi, 256).unwrap();
            prop_assert!(Pmf::new(q.alphabet().clone(), q.probs().to_vec()).is_ok());
        }
    }
}
