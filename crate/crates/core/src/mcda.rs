//! Multi-criteria decision analysis over ordinal scores.
//!
//! Candidates are scored 0..=5 per criterion. Scores are plain data; this
//! module only sums them and applies staged elimination. Importance labels
//! are carried along but do not weight the default sums, which matches how
//! the published comparison was aggregated. [`weighted_sums`] is an opt-in
//! extension.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Importance {
    Critical,
    Important,
    Helpful,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub importance: Importance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct CriteriaTable {
    criteria: Vec<Criterion>,
    candidates: Vec<String>,
    /// `scores[criterion][candidate]`; `None` is "not assessed".
    scores: Vec<Vec<Option<u8>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawTable {
    criteria: Vec<Criterion>,
    candidates: Vec<String>,
    scores: Vec<Vec<Option<i64>>>,
}

impl TryFrom<RawTable> for CriteriaTable {
    type Error = Error;

    fn try_from(r: RawTable) -> Result<Self> {
        CriteriaTable::new(r.criteria, r.candidates, r.scores)
    }
}

impl From<CriteriaTable> for RawTable {
    fn from(t: CriteriaTable) -> Self {
        RawTable {
            criteria: t.criteria,
            candidates: t.candidates,
            scores: t
                .scores
                .into_iter()
                .map(|row| row.into_iter().map(|s| s.map(i64::from)).collect())
                .collect(),
        }
    }
}

impl CriteriaTable {
    pub fn new(
        criteria: Vec<Criterion>,
        candidates: Vec<String>,
        scores: Vec<Vec<Option<i64>>>,
    ) -> Result<Self> {
        if criteria.is_empty() || candidates.is_empty() {
            return Err(Error::MalformedTable(
                "needs at least one criterion and one candidate".into(),
            ));
        }
        check_unique(criteria.iter().map(|c| c.name.as_str()), "criterion")?;
        check_unique(candidates.iter().map(String::as_str), "candidate")?;
        if scores.len() != criteria.len() {
            return Err(Error::MalformedTable(format!(
                "{} score rows for {} criteria",
                scores.len(),
                criteria.len()
            )));
        }
        let mut out = Vec::with_capacity(scores.len());
        for (c, row) in criteria.iter().zip(scores) {
            if row.len() != candidates.len() {
                return Err(Error::MalformedTable(format!(
                    "criterion {:?} has {} scores for {} candidates",
                    c.name,
                    row.len(),
                    candidates.len()
                )));
            }
            let mut checked = Vec::with_capacity(row.len());
            for (cand, s) in candidates.iter().zip(row) {
                checked.push(match s {
                    None => None,
                    Some(v @ 0..=5) => Some(v as u8),
                    Some(v) => {
                        return Err(Error::ScoreOutOfRange {
                            criterion: c.name.clone(),
                            candidate: cand.clone(),
                            score: v,
                        })
                    }
                });
            }
            out.push(checked);
        }
        Ok(Self {
            criteria,
            candidates,
            scores: out,
        })
    }

    pub fn criteria(&self) -> &[Criterion] {
        &self.criteria
    }

    pub fn candidates(&self) -> &[String] {
        &self.candidates
    }

    pub fn criterion_index(&self, name: &str) -> Result<usize> {
        self.criteria
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| Error::UnknownCriterion(name.to_string()))
    }

    pub fn candidate_index(&self, name: &str) -> Result<usize> {
        self.candidates
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownCandidate(name.to_string()))
    }

    pub fn score(&self, criterion: usize, candidate: usize) -> Option<u8> {
        self.scores[criterion][candidate]
    }

    fn require(&self, criterion: usize, candidate: usize) -> Result<u8> {
        self.score(criterion, candidate)
            .ok_or_else(|| Error::MissingScore {
                criterion: self.criteria[criterion].name.clone(),
                candidate: self.candidates[candidate].clone(),
            })
    }

    fn resolve(&self, names: &[String]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.criterion_index(n)).collect()
    }
}

fn check_unique<'a>(names: impl Iterator<Item = &'a str>, what: &str) -> Result<()> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::MalformedTable(format!("duplicate {what} {n:?}")));
        }
    }
    Ok(())
}

/// Unweighted sum over `criteria` for each of `candidates`.
pub fn stage_sums(
    table: &CriteriaTable,
    criteria: &[String],
    candidates: &[String],
) -> Result<Vec<(String, u32)>> {
    let rows = table.resolve(criteria)?;
    candidates
        .iter()
        .map(|name| {
            let j = table.candidate_index(name)?;
            let sum = rows
                .iter()
                .map(|&i| table.require(i, j).map(u32::from))
                .sum::<Result<u32>>()?;
            Ok((name.clone(), sum))
        })
        .collect()
}

/// Weighted sum `sum w_c s_c`, one weight per criterion name in `weights`.
///
/// Not part of the standard aggregation; a convenience for sensitivity
/// checks on the importance labels.
pub fn weighted_sums(
    table: &CriteriaTable,
    weights: &[(String, f64)],
    candidates: &[String],
) -> Result<Vec<(String, f64)>> {
    let rows: Vec<(usize, f64)> = weights
        .iter()
        .map(|(n, w)| Ok((table.criterion_index(n)?, *w)))
        .collect::<Result<_>>()?;
    candidates
        .iter()
        .map(|name| {
            let j = table.candidate_index(name)?;
            let sum = rows
                .iter()
                .map(|&(i, w)| table.require(i, j).map(|s| w * f64::from(s)))
                .sum::<Result<f64>>()?;
            Ok((name.clone(), sum))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    /// Drop candidates scoring 0 on any critical criterion of the stage.
    EliminateIfZeroOnCritical,
    /// Keep candidates whose stage sum reaches the k-th highest; ties stay.
    KeepTopK {
        k: usize,
    },
    EliminateNamed {
        candidates: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub label: String,
    pub criteria: Vec<String>,
    #[serde(flatten)]
    pub rule: Rule,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EliminationPlan {
    pub stages: Vec<Stage>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Elimination {
    pub stage: String,
    pub candidate: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSums {
    pub candidate: String,
    /// Sum over this stage's criteria.
    pub sum: u32,
    /// Sum over every criterion used so far.
    pub cumulative: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageOutcome {
    pub label: String,
    /// Sums of the candidates that entered the stage.
    pub sums: Vec<CandidateSums>,
    pub eliminated: Vec<String>,
    pub survivors: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ranked {
    /// Competition rank; tied candidates share it.
    pub rank: usize,
    pub candidate: String,
    pub sum: u32,
    pub cumulative: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanReport {
    pub stages: Vec<StageOutcome>,
    pub audit: Vec<Elimination>,
    pub ranking: Vec<Ranked>,
}

impl PlanReport {
    pub fn winners(&self) -> Vec<&str> {
        self.ranking
            .iter()
            .filter(|r| r.rank == 1)
            .map(|r| r.candidate.as_str())
            .collect()
    }
}

/// Apply the stages in order and rank whoever survives.
///
/// Survivors are ranked by the last stage's sum, or by the sum over all
/// criteria when the plan is empty. Ties are reported, not broken.
pub fn run_plan(table: &CriteriaTable, plan: &EliminationPlan) -> Result<PlanReport> {
    let mut survivors: Vec<String> = table.candidates.clone();
    let mut used: BTreeSet<usize> = BTreeSet::new();
    let mut stages = Vec::with_capacity(plan.stages.len());
    let mut audit = Vec::new();
    let mut last: HashMap<String, (u32, u32)> = HashMap::new();

    for stage in &plan.stages {
        let rows = table.resolve(&stage.criteria)?;
        used.extend(rows.iter().copied());
        let used_names: Vec<String> = used
            .iter()
            .map(|&i| table.criteria[i].name.clone())
            .collect();
        let sums = stage_sums(table, &stage.criteria, &survivors)?;
        let cumulative = stage_sums(table, &used_names, &survivors)?;
        let entries: Vec<CandidateSums> = sums
            .iter()
            .zip(&cumulative)
            .map(|((c, s), (_, t))| CandidateSums {
                candidate: c.clone(),
                sum: *s,
                cumulative: *t,
            })
            .collect();

        let mut dropped: Vec<(String, String)> = Vec::new();
        match &stage.rule {
            Rule::EliminateIfZeroOnCritical => {
                for name in &survivors {
                    let j = table.candidate_index(name)?;
                    for &i in &rows {
                        if table.criteria[i].importance == Importance::Critical
                            && table.require(i, j)? == 0
                        {
                            dropped.push((
                                name.clone(),
                                format!(
                                    "scored 0 on critical criterion {:?}",
                                    table.criteria[i].name
                                ),
                            ));
                            break;
                        }
                    }
                }
            }
            Rule::KeepTopK { k } => {
                let mut ordered: Vec<u32> = entries.iter().map(|e| e.sum).collect();
                ordered.sort_unstable_by(|a, b| b.cmp(a));
                let cutoff = match k {
                    0 => u32::MAX,
                    k => ordered.get(k - 1).copied().unwrap_or(0),
                };
                for e in &entries {
                    if e.sum < cutoff {
                        dropped.push((
                            e.candidate.clone(),
                            format!("sum {} below the top-{k} cut-off {cutoff}", e.sum),
                        ));
                    }
                }
            }
            Rule::EliminateNamed { candidates } => {
                for name in candidates {
                    table.candidate_index(name)?;
                    if survivors.contains(name) {
                        dropped.push((name.clone(), "eliminated by name".into()));
                    }
                }
            }
        }

        let eliminated: Vec<String> = dropped.iter().map(|(c, _)| c.clone()).collect();
        audit.extend(dropped.into_iter().map(|(candidate, reason)| Elimination {
            stage: stage.label.clone(),
            candidate,
            reason,
        }));
        survivors.retain(|c| !eliminated.contains(c));
        last = entries
            .iter()
            .map(|e| (e.candidate.clone(), (e.sum, e.cumulative)))
            .collect();
        stages.push(StageOutcome {
            label: stage.label.clone(),
            sums: entries,
            eliminated,
            survivors: survivors.clone(),
        });
    }

    if plan.stages.is_empty() {
        let all: Vec<String> = table.criteria.iter().map(|c| c.name.clone()).collect();
        for (c, s) in stage_sums(table, &all, &survivors)? {
            last.insert(c, (s, s));
        }
    }

    let mut ranking: Vec<Ranked> = survivors
        .iter()
        .map(|c| {
            let (sum, cumulative) = last[c];
            Ranked {
                rank: 0,
                candidate: c.clone(),
                sum,
                cumulative,
            }
        })
        .collect();
    // stable sort keeps table order among ties
    ranking.sort_by_key(|r| std::cmp::Reverse(r.sum));
    for i in 0..ranking.len() {
        ranking[i].rank = if i > 0 && ranking[i].sum == ranking[i - 1].sum {
            ranking[i - 1].rank
        } else {
            i + 1
        };
    }
    Ok(PlanReport {
        stages,
        audit,
        ranking,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    const CANDIDATES: [&str; 9] = [
        "kl*0.3",
        "js",
        "cond",
        "dnew:k=1",
        "dnew:k=2",
        "dncm:k=1",
        "dncm:k=2",
        "mink:k=2",
        "mink:k=200",
    ];

    fn selection_table() -> CriteriaTable {
        use Importance::*;
        let crit = [
            ("Boundedness", Critical),
            ("Number of PMFs", Important),
            ("Entropic measures", Important),
            ("Curve shapes, full range", Helpful),
            ("Curve shapes, near zero", Helpful),
            ("Scenario: good and bad", Helpful),
            ("Scenario: A, B, C, D", Helpful),
            ("Case study 1", Important),
            ("Case study 2", Important),
        ];
        let n = None;
        let s = |v: i64| Some(v);
        let scores = vec![
            vec![s(0), s(5), s(5), s(5), s(5), s(5), s(5), s(3), s(3)],
            vec![s(5), s(5), s(2), s(5), s(5), s(5), s(5), s(5), s(5)],
            vec![s(5), s(5), s(5), s(5), s(5), s(5), s(5), s(1), s(1)],
            vec![s(5), s(5), s(1), s(2), s(4), s(2), s(4), s(3), s(3)],
            vec![s(5), s(4), s(1), s(3), s(5), s(3), s(5), s(2), s(3)],
            vec![n, s(3), n, s(5), s(4), s(5), s(4), n, n],
            vec![n, s(4), n, s(5), s(3), s(2), s(1), n, n],
            vec![n, s(5), n, s(1), s(5), s(5), s(5), n, n],
            vec![n, s(3), n, s(1), s(5), s(3), s(3), n, n],
        ];
        CriteriaTable::new(
            crit.iter()
                .map(|(name, importance)| Criterion {
                    name: name.to_string(),
                    importance: *importance,
                })
                .collect(),
            names(&CANDIDATES),
            scores,
        )
        .unwrap()
    }

    fn crit_names(t: &CriteriaTable, r: std::ops::Range<usize>) -> Vec<String> {
        t.criteria()[r].iter().map(|c| c.name.clone()).collect()
    }

    fn plan(t: &CriteriaTable) -> EliminationPlan {
        EliminationPlan {
            stages: vec![
                Stage {
                    label: "criterion 1".into(),
                    criteria: crit_names(t, 0..1),
                    rule: Rule::EliminateIfZeroOnCritical,
                },
                Stage {
                    label: "criteria 1-5".into(),
                    criteria: crit_names(t, 0..5),
                    rule: Rule::KeepTopK { k: 5 },
                },
                Stage {
                    label: "criteria 6-9".into(),
                    criteria: crit_names(t, 5..9),
                    rule: Rule::KeepTopK { k: 1 },
                },
            ],
        }
    }

    #[test]
    fn first_five_criteria_sums() {
        let t = selection_table();
        let sums = stage_sums(&t, &crit_names(&t, 0..5), &names(&CANDIDATES[1..])).unwrap();
        let got: Vec<u32> = sums.iter().map(|(_, s)| *s).collect();
        assert_eq!(got, vec![24, 14, 20, 24, 20, 24, 14, 15]);
    }

    #[test]
    fn missing_scores_are_errors() {
        let t = selection_table();
        assert_eq!(
            stage_sums(&t, &crit_names(&t, 5..6), &names(&["cond"])),
            Err(Error::MissingScore {
                criterion: "Scenario: good and bad".into(),
                candidate: "cond".into()
            })
        );
    }

    #[test]
    fn all_zero_sum() {
        let t = CriteriaTable::new(
            vec![Criterion {
                name: "c".into(),
                importance: Importance::Helpful,
            }],
            names(&["a", "b"]),
            vec![vec![Some(0), Some(0)]],
        )
        .unwrap();
        assert_eq!(
            stage_sums(&t, &names(&["c"]), &names(&["a", "b"])).unwrap(),
            vec![("a".to_string(), 0), ("b".to_string(), 0)]
        );
    }

    #[test]
    fn full_plan_reproduces_selection() {
        let t = selection_table();
        let r = run_plan(&t, &plan(&t)).unwrap();
        assert_eq!(r.stages[0].eliminated, names(&["kl*0.3"]));
        assert_eq!(
            r.stages[1].eliminated,
            names(&["cond", "mink:k=2", "mink:k=200"])
        );
        let last: Vec<(u32, u32)> = r.stages[2]
            .sums
            .iter()
            .map(|e| (e.sum, e.cumulative))
            .collect();
        assert_eq!(last, vec![(15, 39), (12, 32), (17, 41), (15, 35), (13, 37)]);
        assert_eq!(r.winners(), vec!["dnew:k=2"]);
        assert_eq!(r.ranking[0].sum, 17);
        assert_eq!(r.ranking[0].cumulative, 41);
        assert_eq!(r.audit.len(), 8);
        assert_eq!(r, run_plan(&t, &plan(&t)).unwrap());
    }

    #[test]
    fn empty_plan_and_total_elimination() {
        let t = CriteriaTable::new(
            vec![
                Criterion {
                    name: "x".into(),
                    importance: Importance::Critical,
                },
                Criterion {
                    name: "y".into(),
                    importance: Importance::Helpful,
                },
            ],
            names(&["a", "b", "c"]),
            vec![
                vec![Some(1), Some(0), Some(2)],
                vec![Some(3), Some(4), Some(1)],
            ],
        )
        .unwrap();
        let r = run_plan(&t, &EliminationPlan::default()).unwrap();
        let ranked: Vec<(usize, &str, u32)> = r
            .ranking
            .iter()
            .map(|x| (x.rank, x.candidate.as_str(), x.sum))
            .collect();
        assert_eq!(ranked, vec![(1, "a", 4), (1, "b", 4), (3, "c", 3)]);

        let all = EliminationPlan {
            stages: vec![Stage {
                label: "all".into(),
                criteria: names(&["x"]),
                rule: Rule::EliminateNamed {
                    candidates: names(&["a", "b", "c"]),
                },
            }],
        };
        let r = run_plan(&t, &all).unwrap();
        assert!(r.ranking.is_empty());
        assert_eq!(r.audit.len(), 3);

        let bad = EliminationPlan {
            stages: vec![Stage {
                label: "bad".into(),
                criteria: names(&["nope"]),
                rule: Rule::KeepTopK { k: 1 },
            }],
        };
        assert_eq!(
            run_plan(&t, &bad),
            Err(Error::UnknownCriterion("nope".into()))
        );
    }

    #[test]
    fn table_validation() {
        let c = vec![Criterion {
            name: "x".into(),
            importance: Importance::Helpful,
        }];
        assert!(matches!(
            CriteriaTable::new(c.clone(), names(&["a"]), vec![vec![Some(6)]]),
            Err(Error::ScoreOutOfRange { score: 6, .. })
        ));
        assert!(matches!(
            CriteriaTable::new(c.clone(), names(&["a", "b"]), vec![vec![Some(1)]]),
            Err(Error::MalformedTable(_))
        ));
        assert!(matches!(
            CriteriaTable::new(c, names(&["a", "a"]), vec![vec![Some(1), Some(1)]]),
            Err(Error::MalformedTable(_))
        ));
    }

    #[test]
    fn json_formats() {
        let t = selection_table();
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains("null"));
        let back: CriteriaTable = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        let p = plan(&t);
        let json = serde_json::to_string(&p).unwrap();
        assert!(json.contains(r#""rule":"keep_top_k","k":5"#), "{json}");
        assert_eq!(serde_json::from_str::<EliminationPlan>(&json).unwrap(), p);
    }

    #[test]
    fn weighted_extension() {
        let t = selection_table();
        let w = vec![
            (t.criteria()[0].name.clone(), 2.0),
            (t.criteria()[1].name.clone(), 0.5),
        ];
        let s = weighted_sums(&t, &w, &names(&["js", "cond"])).unwrap();
        assert_eq!(
            s,
            vec![("js".to_string(), 12.5), ("cond".to_string(), 11.0)]
        );
    }

    proptest! {
        #[test]
        fn sums_ignore_criterion_order(seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let t = selection_table();
            let mut order = crit_names(&t, 0..5);
            let cands = names(&CANDIDATES);
            let base = stage_sums(&t, &order, &cands).unwrap();
            order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(stage_sums(&t, &order, &cands).unwrap(), base);
        }
    }
}
