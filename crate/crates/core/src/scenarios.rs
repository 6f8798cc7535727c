//! Scenario bundles and survey ingestion.
//!
//! A [`ScenarioBundle`] names a ground-truth PMF, the output of a process,
//! a set of users' reconstructions and the measures to evaluate them with.
//! Bundles are read from JSON where PMFs may be given explicitly or by
//! constructor ([`PmfSpec`]).
//!
//! The walking-time survey maps integer answers in minutes onto letters of
//! a 256-letter alphabet, sorts each answer into a [`Band`] around the
//! estimate `xi` and averages the benefit of each band.
//!
//! The volume-rendering survey records multiple-choice answers with their
//! judgement; only its answer tallies are computed here.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::costbenefit::{self, BenefitBreakdown};
use crate::divergence::{self, DivergenceResult, MeasureId};
use crate::error::{Error, Result};
use crate::pmf::{
    check_london_xi, london_band, one_hot, one_hot_letter, piecewise_london_pmf, shannon_entropy,
    uniform, worst_case_pmf, Alphabet, Band, Pmf,
};

/// Alphabet size of the walking-time survey.
pub const LONDON_ALPHABET: usize = 256;

/// Alphabet given by its letters or by a generated naming scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphabetSpec {
    Letters(Vec<String>),
    /// Letters `z1..zn`.
    Indexed {
        indexed: usize,
    },
    /// Letters `1..n`.
    Integers {
        integers: usize,
    },
}

impl AlphabetSpec {
    pub fn resolve(&self) -> Result<Alphabet> {
        match self {
            AlphabetSpec::Letters(l) => Alphabet::new(l.iter()),
            AlphabetSpec::Indexed { indexed } => Alphabet::indexed(*indexed),
            AlphabetSpec::Integers { integers } => Alphabet::integers(*integers),
        }
    }
}

/// Run lengths of equal probabilities, e.g. `[[5, 0.01], [1, 0.95]]`.
pub type Blocks = Vec<(usize, f64)>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LondonSpec {
    pub xi: usize,
    #[serde(default = "default_london_n")]
    pub n: usize,
}

fn default_london_n() -> usize {
    LONDON_ALPHABET
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstCaseSpec {
    pub n: usize,
    pub epsilon: f64,
}

/// A PMF inside a bundle file.
///
/// Forms without their own letters use the bundle alphabet, which is the
/// `alphabet` field if present and otherwise the ground truth's alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PmfSpec {
    Explicit { letters: Vec<String>, p: Vec<f64> },
    Probs { p: Vec<f64> },
    OneHot { one_hot: String },
    Uniform { uniform: bool },
    Blocks { blocks: Blocks },
    London { piecewise_london: LondonSpec },
    WorstCase { worst_case: WorstCaseSpec },
}

impl PmfSpec {
    /// Build the PMF, taking missing letters from `context`.
    pub fn resolve(&self, context: Option<&Alphabet>) -> Result<Pmf> {
        let need = |form: &str| {
            context
                .cloned()
                .ok_or_else(|| Error::InvalidRecord(format!("{form} PMF needs a bundle alphabet")))
        };
        match self {
            PmfSpec::Explicit { letters, p } => Pmf::new(Alphabet::new(letters.iter())?, p.clone()),
            PmfSpec::Probs { p } => Pmf::new(need("p-only")?, p.clone()),
            PmfSpec::OneHot { one_hot } => one_hot_letter(&need("one_hot")?, one_hot),
            PmfSpec::Uniform { uniform: true } => Ok(uniform(&need("uniform")?)),
            PmfSpec::Uniform { uniform: false } => {
                Err(Error::InvalidRecord("\"uniform\" must be true".into()))
            }
            PmfSpec::Blocks { blocks } => {
                let p: Vec<f64> = blocks
                    .iter()
                    .flat_map(|&(count, v)| std::iter::repeat_n(v, count))
                    .collect();
                let alphabet = match context {
                    Some(a) => a.clone(),
                    None => Alphabet::indexed(p.len())?,
                };
                Pmf::new(alphabet, p)
            }
            PmfSpec::London { piecewise_london } => {
                piecewise_london_pmf(piecewise_london.xi, piecewise_london.n)
            }
            PmfSpec::WorstCase { worst_case } => worst_case_pmf(worst_case.n, worst_case.epsilon),
        }
    }

    pub fn explicit(pmf: &Pmf) -> Self {
        PmfSpec::Explicit {
            letters: pmf.alphabet().letters().to_vec(),
            p: pmf.probs().to_vec(),
        }
    }
}

/// Quantity a golden value refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    Divergence,
    PotentialDistortion,
    Benefit,
    /// Keyed by `ground_truth` or `process_output` instead of user.
    Entropy,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::Divergence => "divergence",
            Quantity::PotentialDistortion => "potential_distortion",
            Quantity::Benefit => "benefit",
            Quantity::Entropy => "entropy",
        }
    }
}

/// How a computed value is compared with a golden one.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `|actual - expected| <= tolerance`.
    #[default]
    Approx,
    /// `actual < expected`.
    Below,
    /// `actual > expected`.
    Above,
}

/// Expected values for one quantity and measure, keyed by user label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Golden {
    pub quantity: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureId>,
    #[serde(default)]
    pub relation: Relation,
    #[serde(default)]
    pub tolerance: f64,
    pub values: BTreeMap<String, f64>,
}

/// A published value or claim that the computation does not reproduce,
/// kept for reporting. Golden entries hold the recomputed value instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Erratum {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantity: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub user: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub printed: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserSpec {
    pub label: String,
    pub pmf: PmfSpec,
}

/// On-disk form of a [`ScenarioBundle`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// The ground truth is an assumption rather than a measurement.
    #[serde(default)]
    pub ground_truth_assumed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<AlphabetSpec>,
    pub ground_truth: PmfSpec,
    pub process_output: PmfSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hmax_override: Option<f64>,
    pub users: Vec<UserSpec>,
    pub measures: Vec<MeasureId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub golden: Vec<Golden>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub errata: Vec<Erratum>,
}

/// Ground truth, process output and user reconstructions for one example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BundleFile", into = "BundleFile")]
pub struct ScenarioBundle {
    name: String,
    description: String,
    ground_truth_assumed: bool,
    ground_truth: Pmf,
    process_output: Pmf,
    hmax_override: Option<f64>,
    users: Vec<(String, Pmf)>,
    measures: Vec<MeasureId>,
    golden: Vec<Golden>,
    errata: Vec<Erratum>,
}

impl ScenarioBundle {
    /// Validate and assemble a bundle.
    ///
    /// Users must share the ground-truth alphabet and have distinct labels,
    /// measures must be evaluable without a joint PMF and `hmax_override`
    /// must be at least `H(ground_truth)`.
    pub fn new(
        name: impl Into<String>,
        ground_truth: Pmf,
        process_output: Pmf,
        hmax_override: Option<f64>,
        users: Vec<(String, Pmf)>,
        measures: Vec<MeasureId>,
    ) -> Result<Self> {
        let name = name.into();
        let invalid = |reason: String| Error::InvalidBundle {
            name: name.clone(),
            reason,
        };
        if users.is_empty() {
            return Err(invalid("no users".into()));
        }
        if measures.is_empty() {
            return Err(invalid("no measures".into()));
        }
        let mut seen = BTreeSet::new();
        for (label, pmf) in &users {
            if !seen.insert(label.as_str()) {
                return Err(invalid(format!("duplicate user {label:?}")));
            }
            if !pmf.same_alphabet(&ground_truth) {
                return Err(invalid(format!(
                    "user {label:?} does not share the ground-truth alphabet"
                )));
            }
        }
        for m in &measures {
            m.check()?;
            if *m == MeasureId::CondEntropy {
                return Err(invalid("conditional entropy needs a joint PMF".into()));
            }
        }
        if let Some(h) = hmax_override {
            let entropy = shannon_entropy(&ground_truth);
            if !(h.is_finite() && h + 1e-12 >= entropy) {
                return Err(Error::HmaxTooSmall { hmax: h, entropy });
            }
        }
        Ok(Self {
            name,
            description: String::new(),
            ground_truth_assumed: false,
            ground_truth,
            process_output,
            hmax_override,
            users,
            measures,
            golden: Vec::new(),
            errata: Vec::new(),
        })
    }

    pub fn with_description(mut self, description: impl Into<String>, assumed: bool) -> Self {
        self.description = description.into();
        self.ground_truth_assumed = assumed;
        self
    }

    pub fn with_golden(mut self, golden: Vec<Golden>, errata: Vec<Erratum>) -> Self {
        self.golden = golden;
        self.errata = errata;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn ground_truth_assumed(&self) -> bool {
        self.ground_truth_assumed
    }

    pub fn ground_truth(&self) -> &Pmf {
        &self.ground_truth
    }

    pub fn process_output(&self) -> &Pmf {
        &self.process_output
    }

    pub fn hmax_override(&self) -> Option<f64> {
        self.hmax_override
    }

    pub fn users(&self) -> &[(String, Pmf)] {
        &self.users
    }

    pub fn user(&self, label: &str) -> Option<&Pmf> {
        self.users.iter().find(|(l, _)| l == label).map(|(_, p)| p)
    }

    pub fn measures(&self) -> &[MeasureId] {
        &self.measures
    }

    pub fn golden(&self) -> &[Golden] {
        &self.golden
    }

    pub fn errata(&self) -> &[Erratum] {
        &self.errata
    }

    /// Copy with every user PMF replaced by `f(label, pmf)`.
    pub fn map_users(&self, f: impl Fn(&str, &Pmf) -> Result<Pmf>) -> Result<Self> {
        let users = self
            .users
            .iter()
            .map(|(l, p)| Ok((l.clone(), f(l, p)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut b = Self::new(
            self.name.clone(),
            self.ground_truth.clone(),
            self.process_output.clone(),
            self.hmax_override,
            users,
            self.measures.clone(),
        )?;
        b.description.clone_from(&self.description);
        b.ground_truth_assumed = self.ground_truth_assumed;
        b.golden.clone_from(&self.golden);
        b.errata.clone_from(&self.errata);
        Ok(b)
    }
}

impl TryFrom<BundleFile> for ScenarioBundle {
    type Error = Error;

    fn try_from(f: BundleFile) -> Result<Self> {
        let wrap = |e: Error| Error::InvalidBundle {
            name: f.name.clone(),
            reason: e.to_string(),
        };
        let declared = f
            .alphabet
            .as_ref()
            .map(AlphabetSpec::resolve)
            .transpose()
            .map_err(wrap)?;
        let ground_truth = f.ground_truth.resolve(declared.as_ref()).map_err(wrap)?;
        let context = declared.unwrap_or_else(|| ground_truth.alphabet().clone());
        let process_output = f.process_output.resolve(Some(&context)).map_err(wrap)?;
        let users = f
            .users
            .iter()
            .map(|u| {
                let pmf = u
                    .pmf
                    .resolve(Some(&context))
                    .map_err(|e| Error::InvalidBundle {
                        name: f.name.clone(),
                        reason: format!("user {:?}: {e}", u.label),
                    })?;
                Ok((u.label.clone(), pmf))
            })
            .collect::<Result<Vec<_>>>()?;
        let bundle = ScenarioBundle::new(
            f.name.clone(),
            ground_truth,
            process_output,
            f.hmax_override,
            users,
            f.measures,
        )?;
        Ok(bundle
            .with_description(f.description, f.ground_truth_assumed)
            .with_golden(f.golden, f.errata))
    }
}

impl From<ScenarioBundle> for BundleFile {
    fn from(b: ScenarioBundle) -> Self {
        BundleFile {
            name: b.name,
            description: b.description,
            ground_truth_assumed: b.ground_truth_assumed,
            alphabet: None,
            ground_truth: PmfSpec::explicit(&b.ground_truth),
            process_output: PmfSpec::explicit(&b.process_output),
            hmax_override: b.hmax_override,
            users: b
                .users
                .iter()
                .map(|(label, p)| UserSpec {
                    label: label.clone(),
                    pmf: PmfSpec::explicit(p),
                })
                .collect(),
            measures: b.measures,
            golden: b.golden,
            errata: b.errata,
        }
    }
}

/// One user evaluated with one measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioRow {
    pub user: String,
    pub measure: MeasureId,
    /// Divergence of the user's reconstruction from the ground truth.
    pub divergence: DivergenceResult,
    /// Absent for measures without a benefit formula (scaled KL, Minkowski).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub benefit: Option<BenefitBreakdown>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub name: String,
    pub ground_truth_entropy: f64,
    pub process_output_entropy: f64,
    /// Rows ordered by user, then by measure, as listed in the bundle.
    pub rows: Vec<ScenarioRow>,
}

impl ScenarioReport {
    pub fn row(&self, user: &str, measure: MeasureId) -> Option<&ScenarioRow> {
        self.rows
            .iter()
            .find(|r| r.user == user && r.measure == measure)
    }

    /// Look up a value by quantity; `key` is a user label, or
    /// `ground_truth`/`process_output` for [`Quantity::Entropy`].
    pub fn value(&self, quantity: Quantity, measure: Option<MeasureId>, key: &str) -> Option<f64> {
        if quantity == Quantity::Entropy {
            return match key {
                "ground_truth" => Some(self.ground_truth_entropy),
                "process_output" => Some(self.process_output_entropy),
                _ => None,
            };
        }
        let row = self.row(key, measure?)?;
        match quantity {
            Quantity::Divergence => Some(row.divergence.total),
            Quantity::PotentialDistortion => row.benefit.as_ref().map(|b| b.potential_distortion),
            Quantity::Benefit => row.benefit.as_ref().map(|b| b.benefit),
            Quantity::Entropy => unreachable!(),
        }
    }
}

/// Evaluate every user with every measure of the bundle.
///
/// KL benefits use the original formula; JS, `D_new` and `D_ncm` use the
/// bounded one with the bundle's `hmax_override`.
pub fn run_scenario(b: &ScenarioBundle) -> Result<ScenarioReport> {
    let mut rows = Vec::with_capacity(b.users.len() * b.measures.len());
    for (user, recon) in &b.users {
        for &measure in &b.measures {
            let divergence = divergence::compute(measure, recon, &b.ground_truth, None)?;
            let benefit = match measure {
                MeasureId::Kl => Some(costbenefit::benefit_kl(
                    &b.ground_truth,
                    &b.process_output,
                    recon,
                )?),
                m if m.is_unit_bounded() => Some(costbenefit::benefit_with(
                    m,
                    &b.ground_truth,
                    &b.process_output,
                    recon,
                    b.hmax_override,
                )?),
                _ => None,
            };
            rows.push(ScenarioRow {
                user: user.clone(),
                measure,
                divergence,
                benefit,
            });
        }
    }
    Ok(ScenarioReport {
        name: b.name.clone(),
        ground_truth_entropy: shannon_entropy(&b.ground_truth),
        process_output_entropy: shannon_entropy(&b.process_output),
        rows,
    })
}

/// One answer of the walking-time survey.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyRecord {
    pub surveyee: String,
    pub question: String,
    pub answer_minutes: i64,
    pub response_time_seconds: f64,
    /// Published category that takes precedence over the computed band.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<Band>,
}

impl SurveyRecord {
    pub fn new(
        surveyee: impl Into<String>,
        question: impl Into<String>,
        answer_minutes: i64,
        response_time_seconds: f64,
    ) -> Result<Self> {
        let r = Self {
            surveyee: surveyee.into(),
            question: question.into(),
            answer_minutes,
            response_time_seconds,
            category: None,
        };
        r.validate()?;
        Ok(r)
    }

    /// Answers must be at least 1 minute and response times positive.
    pub fn validate(&self) -> Result<()> {
        if self.answer_minutes < 1 {
            return Err(Error::InvalidRecord(format!(
                "{}/{}: answer {} is below 1",
                self.surveyee, self.question, self.answer_minutes
            )));
        }
        if !(self.response_time_seconds > 0.0 && self.response_time_seconds.is_finite()) {
            return Err(Error::InvalidRecord(format!(
                "{}/{}: response time {} is not positive",
                self.surveyee, self.question, self.response_time_seconds
            )));
        }
        Ok(())
    }
}

/// Bands of the walking-time PMF around the estimate `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LondonSpec", into = "LondonSpec")]
pub struct CategoryBands {
    xi: usize,
    n: usize,
}

impl CategoryBands {
    /// Bands over the 256-letter alphabet.
    pub fn new(xi: usize) -> Result<Self> {
        Self::with_alphabet(xi, LONDON_ALPHABET)
    }

    pub fn with_alphabet(xi: usize, n: usize) -> Result<Self> {
        check_london_xi(xi, n)?;
        Ok(Self { xi, n })
    }

    pub fn xi(&self) -> usize {
        self.xi
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Letter standing in for a whole band: `xi`, `xi + 3`, or the letter
    /// farthest from `xi`.
    pub fn representative(&self, band: Band) -> usize {
        match band {
            Band::SpotOn => self.xi,
            Band::Close => self.xi + 3,
            Band::WildGuess if self.xi > self.n - self.xi => 1,
            Band::WildGuess => self.n,
        }
    }

    pub fn ground_truth(&self) -> Pmf {
        piecewise_london_pmf(self.xi, self.n).expect("bands validated on construction")
    }
}

impl TryFrom<LondonSpec> for CategoryBands {
    type Error = Error;

    fn try_from(s: LondonSpec) -> Result<Self> {
        Self::with_alphabet(s.xi, s.n)
    }
}

impl From<CategoryBands> for LondonSpec {
    fn from(b: CategoryBands) -> Self {
        LondonSpec { xi: b.xi, n: b.n }
    }
}

/// Band of an answer in minutes.
pub fn categorize_answer(answer: i64, bands: &CategoryBands) -> Result<Band> {
    if answer < 1 || answer > bands.n as i64 {
        return Err(Error::AnswerOutOfRange { answer, n: bands.n });
    }
    Ok(london_band(bands.xi, answer as usize))
}

/// Bounded benefit of answering with the representative letter of `band`.
///
/// Input is the piecewise PMF around `xi`, output a one-hot at `xi` (zero
/// entropy) and `Hmax = log2 n`.
pub fn category_benefit(
    bands: &CategoryBands,
    band: Band,
    measure: MeasureId,
) -> Result<BenefitBreakdown> {
    let input = bands.ground_truth();
    let alphabet = input.alphabet().clone();
    let output = one_hot(&alphabet, bands.xi - 1)?;
    let recon = one_hot(&alphabet, bands.representative(band) - 1)?;
    costbenefit::benefit_with(measure, &input, &output, &recon, None)
}

/// One question of the walking-time survey.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurveyQuestion {
    pub id: String,
    pub xi: usize,
}

/// Question definitions shared by every survey file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionSet {
    #[serde(default = "default_london_n")]
    pub n: usize,
    pub questions: Vec<SurveyQuestion>,
}

impl QuestionSet {
    pub fn bands(&self) -> Result<Vec<(String, CategoryBands)>> {
        self.questions
            .iter()
            .map(|q| Ok((q.id.clone(), CategoryBands::with_alphabet(q.xi, self.n)?)))
            .collect()
    }
}

/// Count or value per band.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PerBand<T> {
    pub spot_on: T,
    pub close: T,
    pub wild_guess: T,
}

impl<T: Copy> PerBand<T> {
    pub fn get(&self, band: Band) -> T {
        match band {
            Band::SpotOn => self.spot_on,
            Band::Close => self.close,
            Band::WildGuess => self.wild_guess,
        }
    }

    fn get_mut(&mut self, band: Band) -> &mut T {
        match band {
            Band::SpotOn => &mut self.spot_on,
            Band::Close => &mut self.close,
            Band::WildGuess => &mut self.wild_guess,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionReport {
    pub question: String,
    pub xi: usize,
    pub measure: MeasureId,
    pub respondents: usize,
    pub counts: PerBand<usize>,
    pub category_benefits: PerBand<f64>,
    /// Count-weighted mean of the category benefits.
    pub mean_benefit: f64,
    pub mean_response_time: f64,
    /// `mean_benefit / mean_response_time` in bits per second.
    pub ratio: f64,
    /// Answers above the alphabet that were clamped to its last letter.
    pub clamped: usize,
    /// Records whose published category differs from the computed band.
    pub overridden: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SurveyReport {
    pub questions: Vec<QuestionReport>,
}

impl SurveyReport {
    pub fn question(&self, id: &str) -> Option<&QuestionReport> {
        self.questions.iter().find(|q| q.question == id)
    }
}

/// Per-question counts, mean benefit, mean response time and ratio.
///
/// Questions appear in the order of `bands` and are skipped when nobody
/// answered them. A record's own `category`, when set, overrides the band
/// computed from its answer.
pub fn analyze_survey(
    records: &[SurveyRecord],
    bands: &[(String, CategoryBands)],
    measure: MeasureId,
) -> Result<SurveyReport> {
    let mut grouped: Vec<Vec<&SurveyRecord>> = vec![Vec::new(); bands.len()];
    for r in records {
        r.validate()?;
        let i = bands
            .iter()
            .position(|(id, _)| *id == r.question)
            .ok_or_else(|| Error::UnknownQuestion(r.question.clone()))?;
        grouped[i].push(r);
    }
    let questions = bands
        .par_iter()
        .zip(grouped.par_iter())
        .filter(|(_, rs)| !rs.is_empty())
        .map(|((id, b), rs)| analyze_question(id, b, rs, measure))
        .collect::<Result<Vec<_>>>()?;
    Ok(SurveyReport { questions })
}

fn analyze_question(
    id: &str,
    bands: &CategoryBands,
    records: &[&SurveyRecord],
    measure: MeasureId,
) -> Result<QuestionReport> {
    let mut counts = PerBand::<usize>::default();
    let (mut clamped, mut overridden) = (0, 0);
    for r in records {
        let answer = if r.answer_minutes > bands.n as i64 {
            clamped += 1;
            bands.n as i64
        } else {
            r.answer_minutes
        };
        let computed = categorize_answer(answer, bands)?;
        let band = r.category.unwrap_or(computed);
        if band != computed {
            overridden += 1;
        }
        *counts.get_mut(band) += 1;
    }
    let mut category_benefits = PerBand::<f64>::default();
    for band in Band::ALL {
        *category_benefits.get_mut(band) = category_benefit(bands, band, measure)?.benefit;
    }
    let total = records.len() as f64;
    let mean_benefit = Band::ALL
        .iter()
        .map(|&b| counts.get(b) as f64 * category_benefits.get(b))
        .sum::<f64>()
        / total;
    let mut times: Vec<f64> = records.iter().map(|r| r.response_time_seconds).collect();
    times.sort_by(f64::total_cmp);
    let mean_response_time = times.iter().sum::<f64>() / total;
    Ok(QuestionReport {
        question: id.to_string(),
        xi: bands.xi,
        measure,
        respondents: records.len(),
        counts,
        category_benefits,
        mean_benefit,
        mean_response_time,
        ratio: mean_benefit / mean_response_time,
        clamped,
        overridden,
    })
}

/// How an answer of the volume-rendering survey was judged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Judgement {
    /// Written as a bracketed upper-case letter, e.g. `(D)`.
    Best,
    /// Written as a bracketed lower-case letter, e.g. `(a)`.
    Acceptable,
    /// Written without brackets.
    Incorrect,
}

/// A multiple-choice answer with its judgement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ChoiceAnswer {
    /// Upper-case choice letter.
    pub letter: char,
    pub judgement: Judgement,
}

impl FromStr for ChoiceAnswer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidRecord(format!("unreadable answer {s:?}"));
        let (inner, bracketed) = match s.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            Some(t) => (t, true),
            None => (s, false),
        };
        let mut chars = inner.chars();
        let c = chars.next().ok_or_else(bad)?;
        if chars.next().is_some() || !c.is_ascii_alphabetic() {
            return Err(bad());
        }
        let judgement = match (bracketed, c.is_ascii_uppercase()) {
            (true, true) => Judgement::Best,
            (true, false) => Judgement::Acceptable,
            (false, _) => Judgement::Incorrect,
        };
        Ok(Self {
            letter: c.to_ascii_uppercase(),
            judgement,
        })
    }
}

impl TryFrom<String> for ChoiceAnswer {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ChoiceAnswer> for String {
    fn from(a: ChoiceAnswer) -> Self {
        match a.judgement {
            Judgement::Best => format!("({})", a.letter),
            Judgement::Acceptable => format!("({})", a.letter.to_ascii_lowercase()),
            Judgement::Incorrect => a.letter.to_ascii_lowercase().to_string(),
        }
    }
}

/// One answer of the volume-rendering survey.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiceRecord {
    pub surveyee: String,
    pub question: u32,
    pub answer: ChoiceAnswer,
}

/// Number of answers per choice letter for one question.
pub fn choice_counts(records: &[ChoiceRecord], question: u32) -> BTreeMap<char, usize> {
    let mut counts = BTreeMap::new();
    for r in records.iter().filter(|r| r.question == question) {
        *counts.entry(r.answer.letter).or_insert(0) += 1;
    }
    counts
}

/// Number of answers per judgement for one question.
pub fn judgement_counts(records: &[ChoiceRecord], question: u32) -> BTreeMap<Judgement, usize> {
    let mut counts = BTreeMap::new();
    for r in records.iter().filter(|r| r.question == question) {
        *counts.entry(r.answer.judgement).or_insert(0) += 1;
    }
    counts
}
