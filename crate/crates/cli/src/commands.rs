//! One function per subcommand, each returning a [`Report`].

use std::io::Write;
use std::path::{Path, PathBuf};

use divlab::coding::{
    bound_report, conceptual_cross_entropy, huffman, shannon_literal_lengths, BoundReport,
};
use divlab::costbenefit::{benefit_with, ratio};
use divlab::curves::{near_zero_sweep, sweep, CurveSpec, CurveTable, Direction, Grid};
use divlab::divergence::compute;
use divlab::io::{self, MCDA_DIR, SURVEY_DIR};
use divlab::mcda::{run_plan, PlanReport};
use divlab::pmf::{max_entropy, one_hot, worst_case_pmf};
use divlab::reproduce::{reproduce_all, ReproduceReport};
use divlab::scenarios::{
    choice_counts, judgement_counts, run_scenario, ChoiceRecord, Judgement, ScenarioReport,
};
use divlab::{
    Alphabet, BenefitBreakdown, DivergenceResult, JointPmf, MeasureId, Pmf, ScenarioBundle,
};
use serde::{Deserialize, Serialize};

use crate::output::{Cell, Report, Section};
use crate::{BenefitArgs, Cli, CliError, Command, ScenarioCommand, Status, SurveyCommand};

pub fn run(cli: Cli, out: &mut impl Write) -> Result<Status, CliError> {
    let fixtures = cli.fixtures.clone().unwrap_or_else(io::fixtures_dir);
    let ctx = Context { fixtures };
    let (report, status) = match cli.command {
        Command::Entropy { p } => (entropy(&ctx.pmf(&p)?), Status::Ok),
        Command::Divergence {
            measures,
            p,
            q,
            joint,
            per_letter,
        } => {
            let joint = joint
                .map(|j| load_joint(&ctx.resolve_pmf(&j)))
                .transpose()?;
            let p = ctx.pmf(&p)?;
            let q = ctx.pmf(&q)?;
            (
                divergence(&measures.measure, &p, &q, joint.as_ref(), per_letter)?,
                Status::Ok,
            )
        }
        Command::Benefit(args) => (benefit(&ctx, &args, None)?, Status::Ok),
        Command::Ratio {
            benefit: args,
            cost,
        } => (benefit(&ctx, &args, Some(cost))?, Status::Ok),
        Command::Curve {
            measures,
            alpha,
            points,
            p1,
            q_first,
        } => {
            let spec = CurveSpec {
                measures: measures.measure,
                alphas: alpha,
                grid: match p1 {
                    Some(v) => Grid::Explicit(v),
                    None => Grid::Linear { count: points },
                },
                direction: if q_first {
                    Direction::QFirst
                } else {
                    Direction::PFirst
                },
            };
            (curve(&sweep(&spec)?), Status::Ok)
        }
        Command::Nearzero {
            measures,
            lo,
            hi,
            per_decade,
        } => (
            curve(&near_zero_sweep(&measures.measure, (lo, hi), per_decade)?),
            Status::Ok,
        ),
        Command::Huffman { q, stats } => (huffman_table(&ctx.pmf(&q)?, stats)?, Status::Ok),
        Command::Worstcase {
            n,
            epsilon,
            trials,
            seed,
        } => (worstcase(n, epsilon, trials, seed)?, Status::Ok),
        Command::Mcda { table, plan } => {
            let table = table.unwrap_or_else(|| ctx.fixtures.join(MCDA_DIR).join("selection.json"));
            let plan =
                plan.unwrap_or_else(|| ctx.fixtures.join(MCDA_DIR).join("selection-plan.json"));
            let report = run_plan(&io::load_criteria(&table)?, &io::load_plan(&plan)?)?;
            (mcda(&report), Status::Ok)
        }
        Command::Scenario(ScenarioCommand::List) => {
            (scenario_list(&io::load_bundles(&ctx.fixtures)?), Status::Ok)
        }
        Command::Scenario(ScenarioCommand::Run { name, measure }) => {
            let bundle = io::find_bundle(&ctx.fixtures, &name)?;
            let bundle = if measure.is_empty() {
                bundle
            } else {
                with_measures(&bundle, measure)?
            };
            (scenario_run(&run_scenario(&bundle)?), Status::Ok)
        }
        Command::Survey(SurveyCommand::Walking {
            answers,
            questions,
            measure,
        }) => {
            let answers = answers
                .unwrap_or_else(|| ctx.fixtures.join(SURVEY_DIR).join("walking-time-kcl.csv"));
            let questions = questions.unwrap_or_else(|| {
                ctx.fixtures
                    .join(SURVEY_DIR)
                    .join("walking-time-questions.json")
            });
            let records = io::load_survey(&answers)?;
            let bands = io::load_questions(&questions)?.bands()?;
            let report = divlab::scenarios::analyze_survey(&records, &bands, measure)?;
            for q in &report.questions {
                if q.clamped > 0 {
                    eprintln!(
                        "divlab: warning: {}: {} answer(s) above {} clamped to the last letter",
                        q.question,
                        q.clamped,
                        bands
                            .iter()
                            .find(|(id, _)| *id == q.question)
                            .map_or(0, |(_, b)| b.n())
                    );
                }
            }
            (survey_walking(&report), Status::Ok)
        }
        Command::Survey(SurveyCommand::Choices { answers }) => {
            let answers = answers
                .unwrap_or_else(|| ctx.fixtures.join(SURVEY_DIR).join("volume-rendering.csv"));
            (
                survey_choices(&io::load_choice_survey(&answers)?),
                Status::Ok,
            )
        }
        Command::Reproduce => {
            let report = reproduce_all(&ctx.fixtures)?;
            let status = if report.all_passed() {
                Status::Ok
            } else {
                Status::Failed
            };
            (reproduce(&report), status)
        }
    };
    report.write(out, cli.format, usize::from(cli.digits))?;
    Ok(status)
}

struct Context {
    fixtures: PathBuf,
}

impl Context {
    /// `path` itself if it exists, else the same name under `fixtures/pmf`.
    fn resolve_pmf(&self, path: &Path) -> PathBuf {
        if path.exists() {
            return path.to_path_buf();
        }
        let shipped = self.fixtures.join("pmf").join(path);
        if path.is_relative() && shipped.exists() {
            shipped
        } else {
            path.to_path_buf()
        }
    }

    fn pmf(&self, path: &Path) -> Result<Pmf, CliError> {
        Ok(io::load_pmf(&self.resolve_pmf(path))?)
    }
}

#[derive(Deserialize)]
struct JointRecord {
    letters: Vec<String>,
    r: Vec<Vec<f64>>,
}

fn load_joint(path: &Path) -> Result<JointPmf, CliError> {
    let rec: JointRecord = io::read_json(path)?;
    Ok(JointPmf::new(Alphabet::new(rec.letters)?, rec.r)?)
}

#[derive(Serialize, Deserialize)]
pub struct EntropyOutput {
    pub letters: usize,
    pub entropy: f64,
    pub max_entropy: f64,
}

fn entropy(p: &Pmf) -> Report {
    let e = EntropyOutput {
        letters: p.len(),
        entropy: p.entropy(),
        max_entropy: max_entropy(p.alphabet()),
    };
    let mut s = Section::new(["quantity", "bits"]);
    s.row(vec!["entropy".into(), e.entropy.into()]);
    s.row(vec!["max_entropy".into(), e.max_entropy.into()]);
    Report::new(vec![s], &e)
}

fn divergence(
    measures: &[MeasureId],
    p: &Pmf,
    q: &Pmf,
    joint: Option<&JointPmf>,
    per_letter: bool,
) -> Result<Report, CliError> {
    let results: Vec<DivergenceResult> = measures
        .iter()
        .map(|m| compute(*m, p, q, joint))
        .collect::<Result<_, _>>()?;
    let mut s = Section::new(["measure", "value"]);
    for r in &results {
        s.row(vec![r.measure.to_string().into(), r.total.into()]);
    }
    let mut sections = vec![s];
    if per_letter {
        let mut headers = vec!["letter".to_string()];
        headers.extend(results.iter().map(|r| r.measure.to_string()));
        let mut t = Section::new(headers).titled("per letter");
        for (i, letter) in p.alphabet().letters().iter().enumerate() {
            let mut row: Vec<Cell> = vec![letter.as_str().into()];
            row.extend(results.iter().map(|r| Cell::Num(r.per_letter[i])));
            t.row(row);
        }
        sections.push(t);
    }
    Ok(Report::new(sections, &results))
}

fn benefit(ctx: &Context, args: &BenefitArgs, cost: Option<f64>) -> Result<Report, CliError> {
    let input = ctx.pmf(&args.input)?;
    let output = ctx.pmf(&args.output)?;
    let recon = ctx.pmf(&args.recon)?;
    let results: Vec<BenefitBreakdown> = args
        .measure
        .iter()
        .map(|m| {
            let b = benefit_with(*m, &input, &output, &recon, args.hmax)?;
            match cost {
                Some(c) => ratio(b, c),
                None => Ok(b),
            }
        })
        .collect::<Result<_, _>>()?;
    let mut headers = vec![
        "measure",
        "alphabet_compression",
        "potential_distortion",
        "benefit",
    ];
    if cost.is_some() {
        headers.extend(["cost", "ratio"]);
    }
    let mut s = Section::new(headers);
    for b in &results {
        let mut row: Vec<Cell> = vec![
            b.measure.to_string().into(),
            b.alphabet_compression.into(),
            b.potential_distortion.into(),
            b.benefit.into(),
        ];
        if let (Some(c), Some(r)) = (b.cost, b.ratio) {
            row.extend([c.into(), r.into()]);
        }
        s.row(row);
    }
    Ok(Report::new(vec![s], &results))
}

fn curve(t: &CurveTable) -> Report {
    let mut headers = vec!["alpha".to_string(), "p1".into(), "q1".into()];
    headers.extend(t.measures.iter().map(ToString::to_string));
    let mut s = Section::new(headers);
    for r in &t.rows {
        let mut row: Vec<Cell> = vec![r.alpha.into(), r.p1.into(), r.q1.into()];
        row.extend(r.values.iter().map(|v| Cell::Num(*v)));
        s.row(row);
    }
    Report::new(vec![s], t)
}

#[derive(Serialize, Deserialize)]
pub struct CodewordRow {
    pub letter: String,
    pub probability: f64,
    pub codeword: String,
    pub length: usize,
}

#[derive(Serialize, Deserialize)]
pub struct CodeSummary {
    pub entropy: f64,
    pub huffman_average: f64,
    pub literal_average: f64,
    pub max_length: usize,
    /// `H <= average < H + 1` for both codes.
    pub within_entropy_bounds: bool,
}

#[derive(Serialize, Deserialize)]
pub struct HuffmanOutput {
    pub code: Vec<CodewordRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<CodeSummary>,
}

fn codeword_rows(q: &Pmf, codewords: &[String]) -> Vec<CodewordRow> {
    q.alphabet()
        .letters()
        .iter()
        .zip(q.probs())
        .zip(codewords)
        .map(|((l, &p), c)| CodewordRow {
            letter: l.clone(),
            probability: p,
            codeword: c.clone(),
            length: c.len(),
        })
        .collect()
}

fn code_section(rows: &[CodewordRow]) -> Section {
    let mut s = Section::new(["letter", "probability", "codeword", "length"]);
    for r in rows {
        s.row(vec![
            r.letter.as_str().into(),
            r.probability.into(),
            r.codeword.as_str().into(),
            r.length.into(),
        ]);
    }
    s
}

fn huffman_table(q: &Pmf, with_stats: bool) -> Result<Report, CliError> {
    let code = huffman(q);
    let rows = codeword_rows(q, code.codewords());
    let mut sections = vec![code_section(&rows)];
    let stats = if with_stats {
        let h = q.entropy();
        let huffman_average = code.avg_length_under(q)?;
        let literal_average = shannon_literal_lengths(q)?.average;
        let bounded = |avg: f64| h <= avg + 1e-12 && avg < h + 1.0;
        let st = CodeSummary {
            entropy: h,
            huffman_average,
            literal_average,
            max_length: code.max_length(),
            within_entropy_bounds: bounded(huffman_average) && bounded(literal_average),
        };
        let mut s = Section::new(["statistic", "value"]).titled("statistics");
        s.row(vec!["entropy".into(), st.entropy.into()]);
        s.row(vec!["huffman_average".into(), st.huffman_average.into()]);
        s.row(vec!["literal_average".into(), st.literal_average.into()]);
        s.row(vec!["max_length".into(), st.max_length.into()]);
        s.row(vec![
            "within_entropy_bounds".into(),
            st.within_entropy_bounds.to_string().into(),
        ]);
        sections.push(s);
        Some(st)
    } else {
        None
    };
    Ok(Report::new(sections, &HuffmanOutput { code: rows, stats }))
}

#[derive(Serialize, Deserialize)]
pub struct WorstCaseOutput {
    pub n: usize,
    pub epsilon: f64,
    pub code: Vec<CodewordRow>,
    /// Conceptual cross entropy of a one-hot PMF at the last letter.
    pub one_hot_cross_entropy: f64,
    /// `n - 1`.
    pub bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_trials: Option<BoundReport>,
}

fn worstcase(
    n: usize,
    epsilon: Option<f64>,
    trials: Option<usize>,
    seed: u64,
) -> Result<Report, CliError> {
    let epsilon = epsilon.unwrap_or_else(|| 0.5f64.powi(i32::try_from(n).unwrap_or(i32::MAX)));
    let q = worst_case_pmf(n, epsilon)?;
    let code = huffman(&q);
    let p = one_hot(q.alphabet(), n - 1)?;
    let out = WorstCaseOutput {
        n,
        epsilon,
        code: codeword_rows(&q, code.codewords()),
        one_hot_cross_entropy: conceptual_cross_entropy(&p, &code)?,
        bound: (n - 1) as f64,
        random_trials: trials.map(|t| bound_report(n, t, seed)).transpose()?,
    };
    let mut sections = vec![code_section(&out.code)];
    let mut s = Section::new(["quantity", "value"]).titled("cross entropy bound");
    s.row(vec![
        "one_hot_cross_entropy".into(),
        out.one_hot_cross_entropy.into(),
    ]);
    s.row(vec!["bound".into(), out.bound.into()]);
    if let Some(r) = &out.random_trials {
        s.row(vec!["trials".into(), r.trials.into()]);
        s.row(vec![
            "max_codeword_length".into(),
            r.max_codeword_length.into(),
        ]);
        s.row(vec![
            "max_conceptual_cross_entropy".into(),
            r.max_conceptual_cross_entropy.into(),
        ]);
        s.row(vec!["max_conceptual_kl".into(), r.max_conceptual_kl.into()]);
        s.row(vec!["passed".into(), r.passed.to_string().into()]);
    }
    sections.push(s);
    Ok(Report::new(sections, &out))
}

fn mcda(report: &PlanReport) -> Report {
    let mut sections = Vec::new();
    for stage in &report.stages {
        let mut s = Section::new(["candidate", "sum", "cumulative", "status"]).titled(&stage.label);
        for c in &stage.sums {
            let status = if stage.eliminated.contains(&c.candidate) {
                "eliminated"
            } else {
                "kept"
            };
            s.row(vec![
                c.candidate.as_str().into(),
                c.sum.into(),
                c.cumulative.into(),
                status.into(),
            ]);
        }
        sections.push(s);
    }
    let mut s = Section::new(["rank", "candidate", "sum", "cumulative"]).titled("ranking");
    for r in &report.ranking {
        s.row(vec![
            r.rank.into(),
            r.candidate.as_str().into(),
            r.sum.into(),
            r.cumulative.into(),
        ]);
    }
    sections.push(s);
    Report::new(sections, report)
}

#[derive(Serialize, Deserialize)]
pub struct ScenarioSummary {
    pub name: String,
    pub description: String,
    pub users: Vec<String>,
    pub measures: Vec<MeasureId>,
}

fn scenario_list(bundles: &[ScenarioBundle]) -> Report {
    let list: Vec<ScenarioSummary> = bundles
        .iter()
        .map(|b| ScenarioSummary {
            name: b.name().to_string(),
            description: b.description().to_string(),
            users: b.users().iter().map(|(l, _)| l.clone()).collect(),
            measures: b.measures().to_vec(),
        })
        .collect();
    let mut s = Section::new(["name", "users", "measures", "description"]);
    for b in &list {
        let measures: Vec<String> = b.measures.iter().map(ToString::to_string).collect();
        s.row(vec![
            b.name.as_str().into(),
            b.users.join(" ").into(),
            measures.join(" ").into(),
            b.description.as_str().into(),
        ]);
    }
    Report::new(vec![s], &list)
}

/// `bundle` evaluated with `measures` instead of its own list.
fn with_measures(
    bundle: &ScenarioBundle,
    measures: Vec<MeasureId>,
) -> Result<ScenarioBundle, CliError> {
    Ok(ScenarioBundle::new(
        bundle.name(),
        bundle.ground_truth().clone(),
        bundle.process_output().clone(),
        bundle.hmax_override(),
        bundle.users().to_vec(),
        measures,
    )?
    .with_description(bundle.description(), bundle.ground_truth_assumed()))
}

fn scenario_run(report: &ScenarioReport) -> Report {
    let mut s = Section::new(["user", "measure", "divergence", "benefit"]);
    for r in &report.rows {
        s.row(vec![
            r.user.as_str().into(),
            r.measure.to_string().into(),
            r.divergence.total.into(),
            r.benefit
                .as_ref()
                .map_or_else(|| Cell::from(""), |b| Cell::Num(b.benefit)),
        ]);
    }
    let mut h = Section::new(["pmf", "entropy"]).titled("entropy");
    h.row(vec![
        "ground_truth".into(),
        report.ground_truth_entropy.into(),
    ]);
    h.row(vec![
        "process_output".into(),
        report.process_output_entropy.into(),
    ]);
    Report::new(vec![s, h], report)
}

fn survey_walking(report: &divlab::scenarios::SurveyReport) -> Report {
    let mut s = Section::new([
        "question",
        "xi",
        "respondents",
        "spot_on",
        "close",
        "wild_guess",
        "mean_benefit",
        "mean_time",
        "ratio",
    ]);
    for q in &report.questions {
        s.row(vec![
            q.question.as_str().into(),
            q.xi.into(),
            q.respondents.into(),
            q.counts.spot_on.into(),
            q.counts.close.into(),
            q.counts.wild_guess.into(),
            q.mean_benefit.into(),
            q.mean_response_time.into(),
            q.ratio.into(),
        ]);
    }
    let mut b =
        Section::new(["question", "spot_on", "close", "wild_guess"]).titled("benefit per category");
    for q in &report.questions {
        b.row(vec![
            q.question.as_str().into(),
            q.category_benefits.spot_on.into(),
            q.category_benefits.close.into(),
            q.category_benefits.wild_guess.into(),
        ]);
    }
    Report::new(vec![s, b], report)
}

#[derive(Serialize, Deserialize)]
pub struct ChoiceTally {
    pub question: u32,
    pub answers: usize,
    pub choices: std::collections::BTreeMap<char, usize>,
    pub judgements: std::collections::BTreeMap<Judgement, usize>,
}

fn survey_choices(records: &[ChoiceRecord]) -> Report {
    let mut questions: Vec<u32> = records.iter().map(|r| r.question).collect();
    questions.sort_unstable();
    questions.dedup();
    let tallies: Vec<ChoiceTally> = questions
        .iter()
        .map(|&q| ChoiceTally {
            question: q,
            answers: records.iter().filter(|r| r.question == q).count(),
            choices: choice_counts(records, q),
            judgements: judgement_counts(records, q),
        })
        .collect();
    let mut s = Section::new([
        "question",
        "answers",
        "best",
        "acceptable",
        "incorrect",
        "choices",
    ]);
    for t in &tallies {
        let count = |j| t.judgements.get(&j).copied().unwrap_or(0);
        let choices: Vec<String> = t.choices.iter().map(|(c, n)| format!("{c}:{n}")).collect();
        s.row(vec![
            t.question.into(),
            t.answers.into(),
            count(Judgement::Best).into(),
            count(Judgement::Acceptable).into(),
            count(Judgement::Incorrect).into(),
            choices.join(" ").into(),
        ]);
    }
    Report::new(vec![s], &tallies)
}

fn reproduce(report: &ReproduceReport) -> Report {
    let mut s = Section::new(["fixture", "result", "checks", "max_deviation"]);
    let mut failures = Section::new(["fixture", "check", "expected", "actual", "tolerance"])
        .titled("failed checks");
    for f in &report.fixtures {
        s.row(vec![
            f.name.as_str().into(),
            if f.passed() { "PASS" } else { "FAIL" }.into(),
            f.checks.len().into(),
            f.max_deviation().into(),
        ]);
        if let Some(e) = &f.error {
            failures.row(vec![
                f.name.as_str().into(),
                e.as_str().into(),
                "".into(),
                "".into(),
                "".into(),
            ]);
        }
        for c in f.failures() {
            failures.row(vec![
                f.name.as_str().into(),
                c.label.as_str().into(),
                c.expected.into(),
                c.actual.map_or_else(|| Cell::from(""), Cell::Num),
                c.tolerance.into(),
            ]);
        }
    }
    let mut sections = vec![s];
    if !failures.rows.is_empty() {
        sections.push(failures);
    }
    Report::new(sections, report)
}
