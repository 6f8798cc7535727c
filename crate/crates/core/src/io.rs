//! Reading PMFs, bundles, surveys and tables from disk.
//!
//! Unreadable files are [`Error::Io`]; files that parse but fail to
//! deserialize are [`Error::Format`]; well-formed data that violates an
//! invariant keeps its own validation error.
//!
//! Fixture layout below the fixtures directory:
//!
//! ```text
//! scenarios/*.json          scenario bundles, one per example
//! survey/walking-time-*.csv walking-time survey answers
//! survey/walking-time-questions.json
//! survey/walking-time-golden.json
//! survey/volume-rendering.csv
//! mcda/selection*.json      criteria table, elimination plan, expected sums
//! coding/examples.json      code-length examples
//! pmf/*.json                stand-alone PMFs
//! ```

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;

use crate::error::{Error, Result};
use crate::mcda::{CriteriaTable, EliminationPlan};
use crate::pmf::{Alphabet, Pmf};
use crate::scenarios::{ChoiceRecord, PmfSpec, QuestionSet, ScenarioBundle, SurveyRecord};

/// Environment variable overriding the fixtures directory.
pub const FIXTURES_ENV: &str = "DIVLAB_FIXTURES";

pub const SCENARIOS_DIR: &str = "scenarios";
pub const SURVEY_DIR: &str = "survey";
pub const MCDA_DIR: &str = "mcda";
pub const CODING_DIR: &str = "coding";

/// `$DIVLAB_FIXTURES` if set, else the fixtures shipped with this crate.
pub fn fixtures_dir() -> PathBuf {
    match std::env::var_os(FIXTURES_ENV) {
        Some(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures"),
    }
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Parse a JSON file. Validation errors raised while deserializing (for
/// example a PMF that does not sum to 1) are reported as format errors.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::format(path, e))
}

/// Load a PMF from JSON or CSV (by extension).
///
/// JSON accepts every [`PmfSpec`] form except `one_hot` and `uniform`,
/// which need a known alphabet; `{"p": [...]}` gets letters `z1..zn`. CSV
/// needs a `letter,p` header.
pub fn load_pmf(path: &Path) -> Result<Pmf> {
    let is_csv = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        return load_pmf_csv(path);
    }
    match read_json::<PmfSpec>(path)? {
        PmfSpec::Probs { p } => Pmf::new(Alphabet::indexed(p.len())?, p),
        spec => spec.resolve(None),
    }
}

#[derive(serde::Deserialize)]
struct PmfRow {
    letter: String,
    p: f64,
}

fn load_pmf_csv(path: &Path) -> Result<Pmf> {
    let rows: Vec<PmfRow> = read_csv(path, &["letter", "p"])?;
    let (letters, p): (Vec<String>, Vec<f64>) = rows.into_iter().map(|r| (r.letter, r.p)).unzip();
    Pmf::new(Alphabet::new(letters)?, p)
}

/// Read a CSV file whose header must name every column in `required`.
fn read_csv<T: DeserializeOwned>(path: &Path, required: &[&str]) -> Result<Vec<T>> {
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::format(path, e))?;
    if let Some(missing) = required.iter().find(|c| !headers.iter().any(|h| h == **c)) {
        return Err(Error::format(
            path,
            format!("header lacks column {missing:?}"),
        ));
    }
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| Error::format(path, e))
}

pub fn load_bundle(path: &Path) -> Result<ScenarioBundle> {
    read_json(path)
}

/// JSON files directly inside `dir`, sorted by name.
pub fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Every bundle under `fixtures/scenarios`, sorted by file name.
pub fn load_bundles(fixtures: &Path) -> Result<Vec<ScenarioBundle>> {
    json_files(&fixtures.join(SCENARIOS_DIR))?
        .iter()
        .map(|p| load_bundle(p))
        .collect()
}

/// Find a bundle by its `name` field or file stem.
pub fn find_bundle(fixtures: &Path, name: &str) -> Result<ScenarioBundle> {
    let dir = fixtures.join(SCENARIOS_DIR);
    let direct = dir.join(format!("{name}.json"));
    if direct.is_file() {
        return load_bundle(&direct);
    }
    for path in json_files(&dir)? {
        let b = load_bundle(&path)?;
        if b.name() == name {
            return Ok(b);
        }
    }
    Err(Error::io(&direct, "no such scenario"))
}

/// Walking-time survey CSV with header
/// `surveyee,question,answer_minutes,response_time_seconds[,category]`.
pub fn load_survey(path: &Path) -> Result<Vec<SurveyRecord>> {
    let records: Vec<SurveyRecord> = read_csv(
        path,
        &[
            "surveyee",
            "question",
            "answer_minutes",
            "response_time_seconds",
        ],
    )?;
    for r in &records {
        r.validate()?;
    }
    Ok(records)
}

/// Multiple-choice survey CSV with header `surveyee,question,answer`.
pub fn load_choice_survey(path: &Path) -> Result<Vec<ChoiceRecord>> {
    read_csv(path, &["surveyee", "question", "answer"])
}

pub fn load_questions(path: &Path) -> Result<QuestionSet> {
    read_json(path)
}

pub fn load_criteria(path: &Path) -> Result<CriteriaTable> {
    read_json(path)
}

pub fn load_plan(path: &Path) -> Result<EliminationPlan> {
    read_json(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
        let path = dir.join(name);
        std::fs::File::create(&path)
            .unwrap()
            .write_all(body.as_bytes())
            .unwrap();
        path
    }

    #[test]
    fn pmf_formats() {
        let dir = tempfile::tempdir().unwrap();
        let json = write(
            dir.path(),
            "a.json",
            r#"{"letters": ["x", "y"], "p": [0.25, 0.75]}"#,
        );
        assert_eq!(load_pmf(&json).unwrap().get("y"), Some(0.75));
        let bare = write(dir.path(), "b.json", r#"{"p": [0.5, 0.5]}"#);
        assert_eq!(load_pmf(&bare).unwrap().alphabet().letters(), ["z1", "z2"]);
        let csv = write(dir.path(), "c.csv", "letter,p\nx, 0.25\ny,0.75\n");
        assert_eq!(load_pmf(&csv).unwrap(), load_pmf(&json).unwrap());
        let london = write(dir.path(), "d.json", r#"{"piecewise_london": {"xi": 20}}"#);
        assert_eq!(load_pmf(&london).unwrap().len(), 256);
    }

    #[test]
    fn error_kinds() {
        let dir = tempfile::tempdir().unwrap();
        assert!(load_pmf(&dir.path().join("missing.json"))
            .unwrap_err()
            .is_io());
        let broken = write(dir.path(), "broken.json", "{");
        assert!(matches!(load_pmf(&broken), Err(Error::Format { .. })));
        let bad = write(dir.path(), "bad.json", r#"{"p": [0.5, 0.6]}"#);
        assert!(matches!(load_pmf(&bad), Err(Error::MassNotUnit { .. })));
        let hot = write(dir.path(), "hot.json", r#"{"one_hot": "x"}"#);
        assert!(matches!(load_pmf(&hot), Err(Error::InvalidRecord(_))));
        assert!(json_files(&dir.path().join("nope")).unwrap_err().is_io());
    }

    #[test]
    fn survey_csv() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(
            dir.path(),
            "s.csv",
            "surveyee,question,answer_minutes,response_time_seconds,category\n\
             P1,Q1,8,6.22,\nP2,Q2,30,9.78,close\n",
        );
        let rs = load_survey(&path).unwrap();
        assert_eq!(rs.len(), 2);
        assert_eq!(rs[0].category, None);
        assert_eq!(rs[1].category, Some(crate::pmf::Band::Close));
        let plain = write(
            dir.path(),
            "p.csv",
            "surveyee,question,answer_minutes,response_time_seconds\nP1,Q1,8,6.22\n",
        );
        assert_eq!(load_survey(&plain).unwrap()[0].answer_minutes, 8);
        let neg = write(
            dir.path(),
            "n.csv",
            "surveyee,question,answer_minutes,response_time_seconds\nP1,Q1,8,-1\n",
        );
        assert!(matches!(load_survey(&neg), Err(Error::InvalidRecord(_))));
        let headless = write(dir.path(), "h.csv", "P1,Q1,8,6.22\n");
        assert!(matches!(load_survey(&headless), Err(Error::Format { .. })));
    }

    #[test]
    fn shipped_fixtures_load() {
        let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
        let bundles = load_bundles(&dir).unwrap();
        assert!(bundles.len() >= 10);
        let first = bundles[0].name().to_string();
        assert_eq!(find_bundle(&dir, &first).unwrap().name(), first);
        assert!(find_bundle(&dir, "no-such-scenario").unwrap_err().is_io());
    }
}
