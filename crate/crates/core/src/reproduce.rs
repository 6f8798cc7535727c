//! Golden-value checks over the fixtures directory.
//!
//! Every scenario bundle is run and compared with its `golden` entries.
//! The walking-time survey, the measure-selection table and the coding
//! examples have their own golden files. Each fixture yields one
//! [`FixtureResult`]; published values known to be wrong are listed as
//! notes, not failures.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coding::{huffman, shannon_literal_lengths};
use crate::divergence::MeasureId;
use crate::error::{Error, Result};
use crate::io;
use crate::mcda::{run_plan, stage_sums};
use crate::pmf::Pmf;
use crate::scenarios::{analyze_survey, run_scenario, Erratum, PerBand, Relation, ScenarioBundle};

/// One comparison of a computed value with an expected one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub expected: f64,
    /// `None` when the value could not be computed.
    pub actual: Option<f64>,
    pub tolerance: f64,
    pub relation: Relation,
    pub passed: bool,
}

impl Check {
    pub fn new(
        label: impl Into<String>,
        expected: f64,
        actual: Option<f64>,
        tolerance: f64,
    ) -> Self {
        Self::with_relation(label, expected, actual, tolerance, Relation::Approx)
    }

    pub fn with_relation(
        label: impl Into<String>,
        expected: f64,
        actual: Option<f64>,
        tolerance: f64,
        relation: Relation,
    ) -> Self {
        let passed = actual.is_some_and(|a| match relation {
            Relation::Approx => (a - expected).abs() <= tolerance,
            Relation::Below => a < expected,
            Relation::Above => a > expected,
        });
        Self {
            label: label.into(),
            expected,
            actual,
            tolerance,
            relation,
            passed,
        }
    }

    /// `|actual - expected|` for approximate checks.
    pub fn deviation(&self) -> Option<f64> {
        match (self.relation, self.actual) {
            (Relation::Approx, Some(a)) => Some((a - self.expected).abs()),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureResult {
    pub name: String,
    pub checks: Vec<Check>,
    /// Errata attached to the fixture.
    pub notes: Vec<String>,
    /// Set when the fixture could not be evaluated at all.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl FixtureResult {
    fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            checks: Vec::new(),
            notes: Vec::new(),
            error: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }

    pub fn max_deviation(&self) -> f64 {
        self.checks
            .iter()
            .filter_map(Check::deviation)
            .fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ReproduceReport {
    pub fixtures: Vec<FixtureResult>,
}

impl ReproduceReport {
    pub fn all_passed(&self) -> bool {
        self.fixtures.iter().all(FixtureResult::passed)
    }

    pub fn get(&self, name: &str) -> Option<&FixtureResult> {
        self.fixtures.iter().find(|f| f.name == name)
    }
}

fn erratum_note(e: &Erratum) -> String {
    let mut head = Vec::new();
    if let Some(q) = e.quantity {
        head.push(q.as_str().to_string());
    }
    if let Some(m) = e.measure {
        head.push(m.to_string());
    }
    if let Some(u) = &e.user {
        head.push(u.clone());
    }
    if let Some(p) = e.printed {
        head.push(format!("printed {p}"));
    }
    if head.is_empty() {
        e.note.clone()
    } else {
        format!("[{}] {}", head.join(" "), e.note)
    }
}

/// Compare a bundle's computed values with its golden entries.
pub fn check_bundle(b: &ScenarioBundle) -> FixtureResult {
    let mut out = FixtureResult::new(b.name());
    out.notes = b.errata().iter().map(erratum_note).collect();
    let report = match run_scenario(b) {
        Ok(r) => r,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    for g in b.golden() {
        let qname = g.quantity.as_str();
        for (key, &expected) in &g.values {
            let label = match g.measure {
                Some(m) => format!("{qname} {m} {key}"),
                None => format!("{qname} {key}"),
            };
            let actual = report.value(g.quantity, g.measure, key);
            out.checks.push(Check::with_relation(
                label,
                expected,
                actual,
                g.tolerance,
                g.relation,
            ));
        }
    }
    out
}

#[derive(Debug, Deserialize)]
struct SurveyGolden {
    survey: String,
    questions: String,
    benefit_tolerance: f64,
    time_tolerance: f64,
    ratio_tolerance: f64,
    expected: Vec<QuestionGolden>,
    #[serde(default)]
    errata: Vec<Erratum>,
}

#[derive(Debug, Deserialize)]
struct QuestionGolden {
    question: String,
    counts: PerBand<usize>,
    mean_benefit: BTreeMap<String, f64>,
    mean_response_time: f64,
    ratio: BTreeMap<String, f64>,
}

/// Golden file of the walking-time survey, relative to the fixtures dir.
pub const SURVEY_GOLDEN: &str = "survey/walking-time-golden.json";
pub const MCDA_GOLDEN: &str = "mcda/selection-golden.json";
pub const CODING_GOLDEN: &str = "coding/examples.json";

/// Per-question counts, mean benefits, mean times and ratios of the survey.
pub fn check_survey(fixtures: &Path) -> Result<FixtureResult> {
    let golden_path = fixtures.join(SURVEY_GOLDEN);
    let golden: SurveyGolden = io::read_json(&golden_path)?;
    let base = golden_path.parent().unwrap_or(fixtures);
    let records = io::load_survey(&base.join(&golden.survey))?;
    let bands = io::load_questions(&base.join(&golden.questions))?.bands()?;
    let mut out = FixtureResult::new("walking-time-survey");
    out.notes = golden.errata.iter().map(erratum_note).collect();

    let mut measures: Vec<String> = golden
        .expected
        .iter()
        .flat_map(|q| q.mean_benefit.keys().chain(q.ratio.keys()).cloned())
        .collect();
    measures.sort();
    measures.dedup();
    for name in &measures {
        let m: MeasureId = name.parse()?;
        let report = analyze_survey(&records, &bands, m)?;
        for exp in &golden.expected {
            let q = report.question(&exp.question);
            let id = &exp.question;
            if let Some(&v) = exp.mean_benefit.get(name) {
                out.checks.push(Check::new(
                    format!("{id} mean benefit {m}"),
                    v,
                    q.map(|q| q.mean_benefit),
                    golden.benefit_tolerance,
                ));
            }
            if let Some(&v) = exp.ratio.get(name) {
                out.checks.push(Check::new(
                    format!("{id} ratio {m}"),
                    v,
                    q.map(|q| q.ratio),
                    golden.ratio_tolerance,
                ));
            }
        }
        if name != &measures[0] {
            continue;
        }
        for exp in &golden.expected {
            let q = report.question(&exp.question);
            let id = &exp.question;
            out.checks.push(Check::new(
                format!("{id} mean response time"),
                exp.mean_response_time,
                q.map(|q| q.mean_response_time),
                golden.time_tolerance,
            ));
            for band in crate::pmf::Band::ALL {
                out.checks.push(Check::new(
                    format!("{id} count {band}"),
                    exp.counts.get(band) as f64,
                    q.map(|q| q.counts.get(band) as f64),
                    0.0,
                ));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Deserialize)]
struct McdaGolden {
    table: String,
    plan: String,
    stages: Vec<StageGolden>,
    winners: Vec<String>,
}

#[derive(Debug, Deserialize)]
struct StageGolden {
    label: String,
    sums: BTreeMap<String, u32>,
    #[serde(default)]
    cumulative: BTreeMap<String, u32>,
}

/// Stage sums, cumulative sums and the winner of the measure selection.
pub fn check_mcda(fixtures: &Path) -> Result<FixtureResult> {
    let golden_path = fixtures.join(MCDA_GOLDEN);
    let golden: McdaGolden = io::read_json(&golden_path)?;
    let base = golden_path.parent().unwrap_or(fixtures);
    let table = io::load_criteria(&base.join(&golden.table))?;
    let plan = io::load_plan(&base.join(&golden.plan))?;
    let report = run_plan(&table, &plan)?;
    let mut out = FixtureResult::new("measure-selection");
    for sg in &golden.stages {
        let stage = report.stages.iter().find(|s| s.label == sg.label);
        let lookup = |c: &str| stage.and_then(|s| s.sums.iter().find(|x| x.candidate == c));
        let criteria = plan
            .stages
            .iter()
            .find(|s| s.label == sg.label)
            .map(|s| s.criteria.clone())
            .unwrap_or_default();
        // Stage sums come straight from the table so that candidates
        // eliminated earlier are still checked.
        for (c, &v) in &sg.sums {
            let actual = stage_sums(&table, &criteria, std::slice::from_ref(c))
                .ok()
                .and_then(|s| s.first().map(|&(_, x)| f64::from(x)));
            out.checks.push(Check::new(
                format!("{} sum {c}", sg.label),
                f64::from(v),
                actual,
                0.0,
            ));
        }
        for (c, &v) in &sg.cumulative {
            let actual = lookup(c).map(|x| f64::from(x.cumulative));
            out.checks.push(Check::new(
                format!("{} cumulative {c}", sg.label),
                f64::from(v),
                actual,
                0.0,
            ));
        }
    }
    let winners = report.winners();
    let same = winners.len() == golden.winners.len()
        && golden.winners.iter().all(|w| winners.contains(&w.as_str()));
    out.checks.push(Check::new(
        format!("winner {}", golden.winners.join(", ")),
        1.0,
        Some(if same { 1.0 } else { 0.0 }),
        0.0,
    ));
    Ok(out)
}

#[derive(Debug, Deserialize)]
struct CodingGolden {
    tolerance: f64,
    examples: Vec<CodingExample>,
}

#[derive(Debug, Deserialize)]
struct CodingExample {
    name: String,
    q: Vec<f64>,
    entropy: f64,
    huffman_lengths: Vec<usize>,
    huffman_average: f64,
    literal_lengths: Vec<usize>,
    literal_average: f64,
    #[serde(default)]
    errata: Vec<Erratum>,
}

/// Entropy, Huffman and Shannon-literal code lengths of the examples.
pub fn check_coding(fixtures: &Path) -> Result<FixtureResult> {
    let golden: CodingGolden = io::read_json(&fixtures.join(CODING_GOLDEN))?;
    let mut out = FixtureResult::new("code-lengths");
    let tol = golden.tolerance;
    for ex in &golden.examples {
        out.notes.extend(
            ex.errata
                .iter()
                .map(|e| format!("{}: {}", ex.name, erratum_note(e))),
        );
        let q = Pmf::from_probs(ex.q.clone())?;
        let code = huffman(&q);
        let literal = shannon_literal_lengths(&q)?;
        let n = &ex.name;
        out.checks.push(Check::new(
            format!("{n} entropy"),
            ex.entropy,
            Some(q.entropy()),
            tol,
        ));
        out.checks.push(Check::new(
            format!("{n} huffman average"),
            ex.huffman_average,
            Some(code.avg_length_under(&q)?),
            tol,
        ));
        out.checks.push(Check::new(
            format!("{n} literal average"),
            ex.literal_average,
            Some(literal.average),
            tol,
        ));
        let lengths = [
            ("huffman", &ex.huffman_lengths, code.lengths()),
            ("literal", &ex.literal_lengths, literal.lengths.clone()),
        ];
        for (kind, want, got) in lengths {
            for (i, (&w, g)) in want
                .iter()
                .zip(got.iter().map(Some).chain(std::iter::repeat(None)))
                .enumerate()
            {
                out.checks.push(Check::new(
                    format!("{n} {kind} length z{}", i + 1),
                    w as f64,
                    g.map(|&g| g as f64),
                    0.0,
                ));
            }
            if got.len() != want.len() {
                out.error = Some(format!(
                    "{n}: {kind} code has {} lengths, expected {}",
                    got.len(),
                    want.len()
                ));
            }
        }
    }
    Ok(out)
}

enum Job {
    Bundle(PathBuf),
    Survey,
    Mcda,
    Coding,
}

/// Run every golden check under `fixtures`, in a fixed order: bundles by
/// file name, then the survey, the measure selection and the coding
/// examples.
///
/// A missing directory or file is an I/O error. A bundle that fails to
/// load or validate becomes a failed [`FixtureResult`] named after its file.
pub fn reproduce_all(fixtures: &Path) -> Result<ReproduceReport> {
    if !fixtures.is_dir() {
        return Err(Error::io(fixtures, "fixtures directory not found"));
    }
    let bundles = io::json_files(&fixtures.join(io::SCENARIOS_DIR))?;
    if bundles.is_empty() {
        return Err(Error::io(
            fixtures.join(io::SCENARIOS_DIR),
            "no scenario bundles",
        ));
    }
    let jobs: Vec<Job> = bundles
        .into_iter()
        .map(Job::Bundle)
        .chain([Job::Survey, Job::Mcda, Job::Coding])
        .collect();
    let fixtures_list = jobs
        .par_iter()
        .map(|job| match job {
            Job::Bundle(path) => match io::load_bundle(path) {
                Ok(b) => Ok(check_bundle(&b)),
                Err(e) if e.is_io() => Err(e),
                Err(e) => {
                    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
                    let mut r = FixtureResult::new(stem);
                    r.error = Some(e.to_string());
                    Ok(r)
                }
            },
            Job::Survey => check_survey(fixtures),
            Job::Mcda => check_mcda(fixtures),
            Job::Coding => check_coding(fixtures),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ReproduceReport {
        fixtures: fixtures_list,
    })
}
