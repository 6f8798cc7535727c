//! Alphabet compression, potential distortion and benefit of a process.
//!
//! A process maps an input alphabet to an output alphabet. Its benefit is
//! the entropy it removes (alphabet compression) minus how far a viewer's
//! reconstruction of the input strays from the ground truth (potential
//! distortion). The original form measures the distortion with KL, which is
//! unbounded; the bounded form scales a `[0, 1]` divergence by the maximum
//! entropy of the input alphabet.

use serde::{Deserialize, Serialize};

use crate::divergence::{self, DivergenceResult, MeasureId};
use crate::error::{Error, Result};
use crate::pmf::{max_entropy, shannon_entropy, Pmf};

/// Decomposition of one benefit evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenefitBreakdown {
    pub measure: MeasureId,
    /// `H(input) - H(output)`.
    pub alphabet_compression: f64,
    /// Divergence of the reconstruction from the input, scaled by `hmax`
    /// for bounded measures.
    #[serde(with = "crate::serde_f64")]
    pub potential_distortion: f64,
    #[serde(with = "crate::serde_f64")]
    pub benefit: f64,
    pub hmax: f64,
    pub divergence: DivergenceResult,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        with = "crate::serde_f64::option"
    )]
    pub ratio: Option<f64>,
}

fn alphabet_compression(input: &Pmf, output: &Pmf) -> f64 {
    shannon_entropy(input) - shannon_entropy(output)
}

/// Original form: `H(input) - H(output) - D_KL(reconstruction || input)`.
///
/// The distortion, and hence the benefit, may be infinite.
pub fn benefit_kl(input: &Pmf, output: &Pmf, reconstruction: &Pmf) -> Result<BenefitBreakdown> {
    let divergence = divergence::kl(reconstruction, input)?;
    let ac = alphabet_compression(input, output);
    let pd = divergence.total;
    Ok(BenefitBreakdown {
        measure: MeasureId::Kl,
        alphabet_compression: ac,
        potential_distortion: pd,
        benefit: ac - pd,
        hmax: max_entropy(input.alphabet()),
        divergence,
        cost: None,
        ratio: None,
    })
}

/// Bounded form: `H(input) - H(output) - Hmax * D(reconstruction || input)`
/// with `Hmax = log2 n` of the input alphabet.
///
/// Only JS, `D_new` and `D_ncm` are accepted.
pub fn benefit_bounded(
    input: &Pmf,
    output: &Pmf,
    reconstruction: &Pmf,
    measure: MeasureId,
) -> Result<BenefitBreakdown> {
    benefit_bounded_with_hmax(input, output, reconstruction, measure, None)
}

/// [`benefit_bounded`] with an optional override for `Hmax`.
///
/// The override must be at least `H(input)`.
pub fn benefit_bounded_with_hmax(
    input: &Pmf,
    output: &Pmf,
    reconstruction: &Pmf,
    measure: MeasureId,
    hmax: Option<f64>,
) -> Result<BenefitBreakdown> {
    if !measure.is_unit_bounded() {
        return Err(Error::UnsupportedMeasure(measure.to_string()));
    }
    let h_in = shannon_entropy(input);
    let hmax = match hmax {
        Some(h) if !(h.is_finite() && h + 1e-12 >= h_in) => {
            return Err(Error::HmaxTooSmall {
                hmax: h,
                entropy: h_in,
            })
        }
        Some(h) => h,
        None => max_entropy(input.alphabet()),
    };
    let divergence = divergence::compute(measure, reconstruction, input, None)?;
    let ac = alphabet_compression(input, output);
    let pd = hmax * divergence.total;
    Ok(BenefitBreakdown {
        measure,
        alphabet_compression: ac,
        potential_distortion: pd,
        benefit: ac - pd,
        hmax,
        divergence,
        cost: None,
        ratio: None,
    })
}

/// Bounded benefit with `D_new` at `k = 2`.
pub fn benefit_final(input: &Pmf, output: &Pmf, reconstruction: &Pmf) -> Result<BenefitBreakdown> {
    benefit_bounded(input, output, reconstruction, MeasureId::Dnew(2.0))
}

/// KL goes through [`benefit_kl`]; bounded measures through
/// [`benefit_bounded_with_hmax`]. Other measures are rejected.
pub fn benefit_with(
    measure: MeasureId,
    input: &Pmf,
    output: &Pmf,
    reconstruction: &Pmf,
    hmax: Option<f64>,
) -> Result<BenefitBreakdown> {
    match measure {
        MeasureId::Kl => benefit_kl(input, output, reconstruction),
        _ => benefit_bounded_with_hmax(input, output, reconstruction, measure, hmax),
    }
}

/// Attach a cost and the ratio `benefit / cost`.
pub fn ratio(mut b: BenefitBreakdown, cost: f64) -> Result<BenefitBreakdown> {
    if !(cost > 0.0 && cost.is_finite()) {
        return Err(Error::NonPositiveCost(cost));
    }
    b.cost = Some(cost);
    b.ratio = Some(b.benefit / cost);
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pmf::{one_hot, Alphabet};
    use proptest::prelude::*;

    fn pmf(p: &[f64]) -> Pmf {
        Pmf::from_probs(p.to_vec()).unwrap()
    }

    fn assert_close(got: f64, want: f64, tol: f64) {
        assert!((got - want).abs() <= tol, "got {got}, want {want} ± {tol}");
    }

    fn arteries() -> (Pmf, Pmf) {
        let q = pmf(&[0.1, 0.878, 0.002, 0.02]);
        let f = one_hot(q.alphabet(), 2).unwrap();
        (q, f)
    }

    #[test]
    fn kl_form_examples() {
        let q = pmf(&[0.99, 0.01]);
        let out = one_hot(q.alphabet(), 0).unwrap();
        let b = benefit_kl(&q, &out, &pmf(&[0.7, 0.3])).unwrap();
        assert_close(b.potential_distortion, 1.12, 0.005);
        assert_close(
            b.benefit,
            b.alphabet_compression - b.potential_distortion,
            1e-12,
        );

        let b = benefit_kl(&q, &out, &q).unwrap();
        assert_eq!(b.potential_distortion, 0.0);
        assert_eq!(b.benefit, b.alphabet_compression);

        let q = pmf(&[0.9999, 0.0001]);
        let b = benefit_kl(&q, &out, &pmf(&[0.99, 0.01])).unwrap();
        assert_close(b.potential_distortion, 0.05, 0.005);
    }

    #[test]
    fn kl_form_propagates_infinity() {
        let q = pmf(&[1.0, 0.0]);
        let b = benefit_kl(&q, &q, &pmf(&[0.5, 0.5])).unwrap();
        assert_eq!(b.potential_distortion, f64::INFINITY);
        assert_eq!(b.benefit, f64::NEG_INFINITY);
    }

    #[test]
    fn bounded_form_arteries_row_b() {
        let (q, f) = arteries();
        let b_ans = one_hot(q.alphabet(), 1).unwrap();
        assert_close(
            benefit_bounded(&q, &f, &b_ans, MeasureId::Js)
                .unwrap()
                .benefit,
            0.500,
            0.0005,
        );
        assert_close(
            benefit_bounded(&q, &f, &b_ans, MeasureId::Dnew(2.0))
                .unwrap()
                .benefit,
            0.586,
            0.0005,
        );
        assert_close(
            benefit_bounded(&q, &f, &b_ans, MeasureId::Dncm(1.0))
                .unwrap()
                .benefit,
            0.296,
            0.0005,
        );
        let a_ans = one_hot(q.alphabet(), 0).unwrap();
        assert_close(
            benefit_bounded(&q, &f, &a_ans, MeasureId::Dnew(2.0))
                .unwrap()
                .benefit,
            -1.038,
            0.0005,
        );
        assert_close(
            benefit_final(&q, &f, &b_ans).unwrap().benefit,
            0.586,
            0.0005,
        );
    }

    #[test]
    fn bounded_form_uses_reconstruction_as_first_argument() {
        let (q, f) = arteries();
        let a_ans = one_hot(q.alphabet(), 0).unwrap();
        let b = benefit_bounded(&q, &f, &a_ans, MeasureId::Dncm(1.0)).unwrap();
        // 0.6278 - 2 * 0.926; the reverse order would give -1.155
        assert_close(b.benefit, -1.224, 0.0005);
    }

    #[test]
    fn final_form_with_alternative_ground_truth() {
        let q = pmf(&[0.30, 0.57, 0.03, 0.10]);
        assert_close(q.entropy(), 1.467, 0.0005);
        let f = one_hot(q.alphabet(), 2).unwrap();
        let c = one_hot(q.alphabet(), 2).unwrap();
        assert_close(benefit_final(&q, &f, &c).unwrap().benefit, 0.212, 0.0005);
    }

    #[test]
    fn final_form_london_spot_on() {
        let q = crate::pmf::piecewise_london_pmf(20, 256).unwrap();
        let spot = crate::pmf::one_hot_letter(q.alphabet(), "20").unwrap();
        let b = benefit_final(&q, &spot, &spot).unwrap();
        assert_eq!(b.hmax, 8.0);
        assert_close(b.benefit, 0.287, 0.01);
    }

    #[test]
    fn only_row_b_is_positive() {
        let (q, f) = arteries();
        for m in [MeasureId::Js, MeasureId::Dnew(2.0)] {
            for i in 0..4 {
                let r = one_hot(q.alphabet(), i).unwrap();
                let b = benefit_bounded(&q, &f, &r, m).unwrap().benefit;
                assert_eq!(b > 0.0, i == 1, "{m} answer {i}: {b}");
            }
        }
    }

    #[test]
    fn reconstruction_equal_to_input_gives_compression() {
        let (q, f) = arteries();
        for m in MeasureId::CASE_STUDY {
            let b = benefit_bounded(&q, &f, &q, m).unwrap();
            assert_eq!(b.potential_distortion, 0.0);
            assert_eq!(b.benefit, b.alphabet_compression);
        }
    }

    #[test]
    fn rejects_unbounded_measures_and_bad_overrides() {
        let (q, f) = arteries();
        for m in [
            MeasureId::Kl,
            MeasureId::CondEntropy,
            MeasureId::Minkowski(2.0),
        ] {
            assert!(matches!(
                benefit_bounded(&q, &f, &q, m),
                Err(Error::UnsupportedMeasure(_))
            ));
        }
        assert!(matches!(
            benefit_bounded_with_hmax(&q, &f, &q, MeasureId::Js, Some(0.1)),
            Err(Error::HmaxTooSmall { .. })
        ));
        let b = benefit_bounded_with_hmax(
            &q,
            &f,
            &one_hot(q.alphabet(), 0).unwrap(),
            MeasureId::Js,
            Some(8.0),
        )
        .unwrap();
        assert_eq!(b.hmax, 8.0);
        assert_close(b.potential_distortion, 8.0 * b.divergence.total, 1e-12);
    }

    #[test]
    fn ratio_examples() {
        let (q, f) = arteries();
        let b = benefit_final(&q, &f, &q).unwrap();
        let mut fixed = b.clone();
        fixed.benefit = 0.105;
        assert_close(
            ratio(fixed.clone(), 9.27).unwrap().ratio.unwrap(),
            0.0113,
            0.00005,
        );
        fixed.benefit = -0.005;
        assert_close(
            ratio(fixed.clone(), 14.65).unwrap().ratio.unwrap(),
            -0.0003,
            0.00005,
        );
        fixed.benefit = 0.0;
        assert_eq!(ratio(fixed.clone(), 3.0).unwrap().ratio, Some(0.0));
        assert_eq!(ratio(b.clone(), 0.0), Err(Error::NonPositiveCost(0.0)));
        assert_eq!(ratio(b, -1.0), Err(Error::NonPositiveCost(-1.0)));
    }

    #[test]
    fn breakdown_json_round_trip() {
        let (q, f) = arteries();
        let b = ratio(benefit_final(&q, &f, &q).unwrap(), 2.0).unwrap();
        let json = serde_json::to_string(&b).unwrap();
        let back: BenefitBreakdown = serde_json::from_str(&json).unwrap();
        assert_eq!(back, b);
    }

    fn arb_triple() -> impl Strategy<Value = (Pmf, Pmf, Pmf)> {
        (2usize..=8).prop_flat_map(|n| {
            let w = prop::collection::vec(0.0f64..1.0, n);
            (w.clone(), w.clone(), w).prop_filter_map("mass", move |(a, b, c)| {
                let al = Alphabet::indexed(n).unwrap();
                Some((
                    Pmf::renormalize(al.clone(), a).ok()?,
                    Pmf::renormalize(al.clone(), b).ok()?,
                    Pmf::renormalize(al, c).ok()?,
                ))
            })
        })
    }

    proptest! {
        #[test]
        fn bounded_benefit_floor((input, output, recon) in arb_triple()) {
            for m in MeasureId::CASE_STUDY {
                let b = benefit_bounded(&input, &output, &recon, m).unwrap();
                prop_assert!(b.benefit >= b.alphabet_compression - b.hmax - 1e-12);
                prop_assert!(b.potential_distortion >= 0.0 && b.potential_distortion <= b.hmax + 1e-12);
                prop_assert!((b.benefit - (b.alphabet_compression - b.potential_distortion)).abs() <= 1e-9);
            }
        }

        #[test]
        fn truthful_reconstruction_maximizes_benefit((input, output, recon) in arb_triple()) {
            for m in MeasureId::CASE_STUDY {
                let best = benefit_bounded(&input, &output, &input, m).unwrap().benefit;
                let other = benefit_bounded(&input, &output, &recon, m).unwrap().benefit;
                prop_assert!(other <= best + 1e-12);
            }
        }
    }
}
