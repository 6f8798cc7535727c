//! Divergence measures between two PMFs over the same alphabet.
//!
//! Every measure returns a [`DivergenceResult`] with the total and one
//! contribution per letter. For the entropic measures the contributions sum
//! to the total; for Minkowski they are the pre-root terms `|p_i - q_i|^k`,
//! which sum to `total^k`.
//!
//! KL and cross entropy are unbounded. When some `p_i > 0` meets `q_i = 0`
//! the total is `f64::INFINITY` rather than an error.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::pmf::{shannon_entropy, JointPmf, Pmf, DEFAULT_TOLERANCE};

/// Which divergence to compute.
///
/// Parses from and prints as `kl`, `kl*0.3`, `js`, `cond`, `dnew:k=2`,
/// `dncm:k=1` and `mink:k=200`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasureId {
    Kl,
    ScaledKl(f64),
    Js,
    CondEntropy,
    Dnew(f64),
    Dncm(f64),
    Minkowski(f64),
}

impl MeasureId {
    /// The five measures compared throughout the case studies.
    pub const CASE_STUDY: [MeasureId; 5] = [
        MeasureId::Js,
        MeasureId::Dnew(1.0),
        MeasureId::Dnew(2.0),
        MeasureId::Dncm(1.0),
        MeasureId::Dncm(2.0),
    ];

    /// True for measures whose value is confined to `[0, 1]`.
    pub fn is_unit_bounded(&self) -> bool {
        matches!(
            self,
            MeasureId::Js | MeasureId::Dnew(_) | MeasureId::Dncm(_)
        )
    }

    /// True when swapping the arguments never changes the value.
    pub fn is_symmetric(&self) -> bool {
        matches!(
            self,
            MeasureId::Js | MeasureId::Dnew(_) | MeasureId::Minkowski(_)
        )
    }

    /// Upper bound on the total, if any.
    pub fn upper_bound(&self) -> Option<f64> {
        match *self {
            MeasureId::Js | MeasureId::Dnew(_) | MeasureId::Dncm(_) => Some(1.0),
            // for k < 1 the quasi-norm can exceed 2^(1/k)
            MeasureId::Minkowski(k) if k >= 1.0 => Some(2f64.powf(1.0 / k)),
            _ => None,
        }
    }

    /// Reject non-positive `k` or scale factor.
    pub fn check(&self) -> Result<()> {
        match *self {
            MeasureId::ScaledKl(f) if !(f > 0.0 && f.is_finite()) => {
                Err(Error::NonPositiveFactor(f))
            }
            MeasureId::Dnew(k) | MeasureId::Dncm(k) | MeasureId::Minkowski(k) => check_k(k),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureId::Kl => f.write_str("kl"),
            MeasureId::ScaledKl(x) => write!(f, "kl*{x}"),
            MeasureId::Js => f.write_str("js"),
            MeasureId::CondEntropy => f.write_str("cond"),
            MeasureId::Dnew(k) => write!(f, "dnew:k={k}"),
            MeasureId::Dncm(k) => write!(f, "dncm:k={k}"),
            MeasureId::Minkowski(k) => write!(f, "mink:k={k}"),
        }
    }
}

impl FromStr for MeasureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseMeasure(s.to_string());
        let t = s.trim().to_ascii_lowercase();
        let number = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
        let m = match t.as_str() {
            "kl" => MeasureId::Kl,
            "js" => MeasureId::Js,
            "cond" => MeasureId::CondEntropy,
            _ => {
                if let Some(f) = t.strip_prefix("kl*") {
                    MeasureId::ScaledKl(number(f)?)
                } else if let Some((name, k)) = t.split_once(':') {
                    let k = number(k.trim().strip_prefix("k=").ok_or_else(bad)?)?;
                    match name.trim() {
                        "dnew" => MeasureId::Dnew(k),
                        "dncm" => MeasureId::Dncm(k),
                        "mink" => MeasureId::Minkowski(k),
                        _ => return Err(bad()),
                    }
                } else {
                    return Err(bad());
                }
            }
        };
        m.check()?;
        Ok(m)
    }
}

impl Serialize for MeasureId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MeasureId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Total divergence with its per-letter breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceResult {
    pub measure: MeasureId,
    #[serde(with = "crate::serde_f64")]
    pub total: f64,
    #[serde(with = "crate::serde_f64::vec")]
    pub per_letter: Vec<f64>,
}

impl DivergenceResult {
    pub fn is_infinite(&self) -> bool {
        self.total.is_infinite()
    }

    /// The total, or `None` when it is infinite.
    pub fn finite(&self) -> Option<f64> {
        self.total.is_finite().then_some(self.total)
    }

    fn from_terms(measure: MeasureId, per_letter: Vec<f64>) -> Self {
        let total = per_letter.iter().sum();
        Self {
            measure,
            total,
            per_letter,
        }
    }
}

fn check_k(k: f64) -> Result<()> {
    if k > 0.0 && k.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveK(k))
    }
}

/// `p log2(p / q)`, zero when `p = 0`, infinite when only `q = 0`.
#[inline]
fn kl_term(p: f64, q: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else if q <= 0.0 {
        f64::INFINITY
    } else {
        p * (p / q).log2()
    }
}

/// `log2(|p - q|^k + 1)`, accurate for tiny differences.
#[inline]
fn bounded_log(p: f64, q: f64, k: f64) -> f64 {
    (p - q).abs().powf(k).ln_1p() / std::f64::consts::LN_2
}

/// `D_KL(P || Q) = sum p_i log2(p_i / q_i)`.
pub fn kl(p: &Pmf, q: &Pmf) -> Result<DivergenceResult> {
    p.ensure_same_alphabet(q)?;
    let terms = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&a, &b)| kl_term(a, b))
        .collect();
    Ok(DivergenceResult::from_terms(MeasureId::Kl, terms))
}

/// KL after flooring every `q_i` at `floor` and renormalizing `Q`.
///
/// Always finite. Not used by any golden value; provided for exploring how
/// thresholding tames the unbounded measure.
pub fn kl_clamped(p: &Pmf, q: &Pmf, floor: f64) -> Result<DivergenceResult> {
    p.ensure_same_alphabet(q)?;
    if !(floor > 0.0 && floor.is_finite()) {
        return Err(Error::NonPositiveFactor(floor));
    }
    let floored = q.probs().iter().map(|&x| x.max(floor)).collect();
    let q = Pmf::renormalize(q.alphabet().clone(), floored)?;
    kl(p, &q)
}

/// `-sum p_i log2 q_i`, equal to `H(P) + D_KL(P || Q)`.
pub fn cross_entropy(p: &Pmf, q: &Pmf) -> Result<f64> {
    p.ensure_same_alphabet(q)?;
    Ok(p.probs()
        .iter()
        .zip(q.probs())
        .map(|(&a, &b)| match (a > 0.0, b > 0.0) {
            (false, _) => 0.0,
            (true, false) => f64::INFINITY,
            (true, true) => -a * b.log2(),
        })
        .sum())
}

/// Jensen-Shannon divergence `(D_KL(P || M) + D_KL(Q || M)) / 2` with
/// `M = (P + Q) / 2`. Lies in `[0, 1]`.
pub fn js(p: &Pmf, q: &Pmf) -> Result<DivergenceResult> {
    p.ensure_same_alphabet(q)?;
    let terms = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&a, &b)| {
            let m = 0.5 * (a + b);
            0.5 * (kl_term(a, m) + kl_term(b, m))
        })
        .collect();
    Ok(DivergenceResult::from_terms(MeasureId::Js, terms))
}

/// `H(P|Q) = H(P) - I(P; Q)` under the joint distribution `r`.
///
/// Letter `i`'s contribution is `-sum_j r_ij log2(r_ij / q_j)`, the row's
/// share of the conditional entropy.
pub fn conditional_entropy(p: &Pmf, q: &Pmf, r: &JointPmf) -> Result<DivergenceResult> {
    p.ensure_same_alphabet(q)?;
    r.check_marginals(p, q, DEFAULT_TOLERANCE.sqrt())?;
    let n = p.len();
    let qs = q.probs();
    let terms = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let rij = r.get(i, j);
                    if rij > 0.0 {
                        -rij * (rij / qs[j]).log2()
                    } else {
                        0.0
                    }
                })
                .sum::<f64>()
                .max(0.0)
        })
        .collect();
    Ok(DivergenceResult::from_terms(MeasureId::CondEntropy, terms))
}

/// `D_new = 1/2 sum (p_i + q_i) log2(|p_i - q_i|^k + 1)`. Symmetric, in `[0, 1]`.
pub fn d_new(p: &Pmf, q: &Pmf, k: f64) -> Result<DivergenceResult> {
    check_k(k)?;
    p.ensure_same_alphabet(q)?;
    let terms = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&a, &b)| 0.5 * (a + b) * bounded_log(a, b, k))
        .collect();
    Ok(DivergenceResult::from_terms(MeasureId::Dnew(k), terms))
}

/// `D_ncm = sum p_i log2(|p_i - q_i|^k + 1)`. In `[0, 1]` but not symmetric.
pub fn d_ncm(p: &Pmf, q: &Pmf, k: f64) -> Result<DivergenceResult> {
    check_k(k)?;
    p.ensure_same_alphabet(q)?;
    let terms = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&a, &b)| a * bounded_log(a, b, k))
        .collect();
    Ok(DivergenceResult::from_terms(MeasureId::Dncm(k), terms))
}

/// `(sum |p_i - q_i|^k)^(1/k)`. Per-letter values are the pre-root terms.
pub fn minkowski(p: &Pmf, q: &Pmf, k: f64) -> Result<DivergenceResult> {
    check_k(k)?;
    p.ensure_same_alphabet(q)?;
    let per_letter: Vec<f64> = p
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(&a, &b)| (a - b).abs().powf(k))
        .collect();
    let total = per_letter.iter().sum::<f64>().powf(1.0 / k);
    Ok(DivergenceResult {
        measure: MeasureId::Minkowski(k),
        total,
        per_letter,
    })
}

/// Dispatch on `measure`. `joint` is required only for [`MeasureId::CondEntropy`].
pub fn compute(
    measure: MeasureId,
    p: &Pmf,
    q: &Pmf,
    joint: Option<&JointPmf>,
) -> Result<DivergenceResult> {
    measure.check()?;
    match measure {
        MeasureId::Kl => kl(p, q),
        MeasureId::ScaledKl(f) => {
            let mut r = kl(p, q)?;
            r.total *= f;
            r.per_letter.iter_mut().for_each(|x| *x *= f);
            r.measure = measure;
            Ok(r)
        }
        MeasureId::Js => js(p, q),
        MeasureId::CondEntropy => conditional_entropy(p, q, joint.ok_or(Error::MissingJoint)?),
        MeasureId::Dnew(k) => d_new(p, q, k),
        MeasureId::Dncm(k) => d_ncm(p, q, k),
        MeasureId::Minkowski(k) => minkowski(p, q, k),
    }
}

/// `I(P; Q)` under `r`, for callers that want the mutual information itself.
pub fn mutual_information(p: &Pmf, q: &Pmf, r: &JointPmf) -> Result<f64> {
    Ok(shannon_entropy(p) - conditional_entropy(p, q, r)?.total)
}
