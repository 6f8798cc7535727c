//! Parameter sweeps over the two-letter PMF family.
//!
//! For `P = {p1, 1 - p1}` the family sets
//! `Q = {q1, 1 - q1}` with `q1 = (1 - alpha) p1 + alpha (1 - p1)`. At
//! `alpha = 0` the two PMFs coincide; at `alpha = 1` `Q` is `P` mirrored.
//! Rows are computed in parallel but always come out ordered by alpha and
//! then p1.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::divergence::{compute, MeasureId};
use crate::error::{Error, Result};
use crate::pmf::{Alphabet, Pmf};

/// Default number of linear samples of `p1` over `[0, 1]`.
pub const DEFAULT_LINEAR_POINTS: usize = 1001;
/// Default near-zero range and density.
pub const NEAR_ZERO_RANGE: (f64, f64) = (1e-10, 0.1);
pub const DEFAULT_POINTS_PER_DECADE: usize = 20;

/// How `p1` is sampled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grid {
    /// `count` evenly spaced points over `[0, 1]`, both ends included.
    Linear {
        count: usize,
    },
    /// Log-spaced points over `[lo, hi]`, both ends included.
    Log {
        lo: f64,
        hi: f64,
        per_decade: usize,
    },
    Explicit(Vec<f64>),
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>> {
        let pts = match *self {
            Grid::Linear { count: 0 } => return Err(Error::GridEmpty),
            Grid::Linear { count: 1 } => vec![0.5],
            Grid::Linear { count } => (0..count).map(|i| i as f64 / (count - 1) as f64).collect(),
            Grid::Log { lo, hi, per_decade } => {
                if per_decade == 0 {
                    return Err(Error::GridEmpty);
                }
                if !(lo > 0.0 && lo < hi && hi <= 1.0) {
                    return Err(Error::InvalidGrid(format!(
                        "log range [{lo}, {hi}] must satisfy 0 < lo < hi <= 1"
                    )));
                }
                let (a, b) = (lo.log10(), hi.log10());
                let steps = ((b - a) * per_decade as f64).round().max(1.0) as usize;
                let mut v: Vec<f64> = (0..=steps)
                    .map(|i| 10f64.powf(a + (b - a) * i as f64 / steps as f64))
                    .collect();
                v[0] = lo;
                v[steps] = hi;
                v
            }
            Grid::Explicit(ref v) => v.clone(),
        };
        if pts.is_empty() {
            return Err(Error::GridEmpty);
        }
        if pts.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidGrid("p1 values must lie in [0, 1]".into()));
        }
        if pts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(
                "p1 values must be strictly increasing".into(),
            ));
        }
        Ok(pts)
    }
}

/// Which PMF is passed first to the measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `measure(P, Q)`.
    #[default]
    PFirst,
    /// `measure(Q, P)`.
    QFirst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSpec {
    pub measures: Vec<MeasureId>,
    pub alphas: Vec<f64>,
    pub grid: Grid,
    #[serde(default)]
    pub direction: Direction,
}

impl CurveSpec {
    /// Linear sweep with the default 1001 points.
    pub fn linear(measures: Vec<MeasureId>, alphas: Vec<f64>) -> Self {
        Self {
            measures,
            alphas,
            grid: Grid::Linear {
                count: DEFAULT_LINEAR_POINTS,
            },
            direction: Direction::PFirst,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub alpha: f64,
    pub p1: f64,
    pub q1: f64,
    /// One value per measure, in the table's measure order.
    #[serde(with = "crate::serde_f64::vec")]
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveTable {
    pub measures: Vec<MeasureId>,
    pub rows: Vec<CurveRow>,
}

impl CurveTable {
    /// Column of values for one measure.
    pub fn column(&self, measure: MeasureId) -> Option<Vec<f64>> {
        let j = self.measures.iter().position(|m| *m == measure)?;
        Some(self.rows.iter().map(|r| r.values[j]).collect())
    }

    /// Header `alpha,p1,q1,<measure ids>`; infinity is written as `inf`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let to_err = |e: csv::Error| Error::io("<csv output>", e);
        let mut out = csv::Writer::from_writer(w);
        let mut header = vec!["alpha".to_string(), "p1".into(), "q1".into()];
        header.extend(self.measures.iter().map(ToString::to_string));
        out.write_record(&header).map_err(to_err)?;
        for r in &self.rows {
            let mut rec = vec![r.alpha.to_string(), r.p1.to_string(), r.q1.to_string()];
            rec.extend(r.values.iter().map(|&v| format_csv_value(v)));
            out.write_record(&rec).map_err(to_err)?;
        }
        out.flush().map_err(|e| Error::io("<csv output>", e))
    }
}

/// Shortest round-trip decimal, with `inf`/`-inf` for infinities.
pub fn format_csv_value(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        v.to_string()
    }
}

/// `(1 - alpha) p1 + alpha (1 - p1)`.
pub fn family_q1(alpha: f64, p1: f64) -> f64 {
    (1.0 - alpha) * p1 + alpha * (1.0 - p1)
}

fn two_letter(alphabet: &Alphabet, x: f64) -> Result<Pmf> {
    Pmf::new(alphabet.clone(), vec![x, 1.0 - x])
}

/// Evaluate every measure at every `(alpha, p1)` of the spec.
pub fn sweep(spec: &CurveSpec) -> Result<CurveTable> {
    if spec.measures.is_empty() {
        return Err(Error::InvalidGrid("no measures requested".into()));
    }
    for m in &spec.measures {
        m.check()?;
        if *m == MeasureId::CondEntropy {
            return Err(Error::UnsupportedMeasure(m.to_string()));
        }
    }
    if spec.alphas.is_empty() {
        return Err(Error::GridEmpty);
    }
    if spec.alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(Error::InvalidGrid("alpha values must lie in [0, 1]".into()));
    }
    let mut alphas = spec.alphas.clone();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();
    let p1s = spec.grid.points()?;
    let alphabet = Alphabet::indexed(2)?;

    let cells: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| p1s.iter().map(move |&p| (a, p)))
        .collect();
    let rows = cells
        .into_par_iter()
        .map(|(alpha, p1)| {
            let q1 = family_q1(alpha, p1);
            let p = two_letter(&alphabet, p1)?;
            let q = two_letter(&alphabet, q1)?;
            let (first, second) = match spec.direction {
                Direction::PFirst => (&p, &q),
                Direction::QFirst => (&q, &p),
            };
            let values = spec
                .measures
                .iter()
                .map(|&m| compute(m, first, second, None).map(|r| r.total))
                .collect::<Result<Vec<_>>>()?;
            Ok(CurveRow {
                alpha,
                p1,
                q1,
                values,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveTable {
        measures: spec.measures.clone(),
        rows,
    })
}

/// Log-spaced sweep near zero with `alpha = 1`, i.e. `q1 = 1 - p1`.
pub fn near_zero_sweep(
    measures: &[MeasureId],
    range: (f64, f64),
    points_per_decade: usize,
) -> Result<CurveTable> {
    let (lo, hi) = range;
    if !(lo > 0.0 && hi < 0.5 && lo < hi) {
        return Err(Error::InvalidGrid(format!(
            "near-zero range [{lo}, {hi}] must lie inside (0, 0.5)"
        )));
    }
    sweep(&CurveSpec {
        measures: measures.to_vec(),
        alphas: vec![1.0],
        grid: Grid::Log {
            lo,
            hi,
            per_decade: points_per_decade,
        },
        direction: Direction::PFirst,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divergence::js;
    use proptest::prelude::*;

    const BOUNDED: [MeasureId; 5] = [
        MeasureId::Js,
        MeasureId::Dnew(1.0),
        MeasureId::Dnew(2.0),
        MeasureId::Dncm(2.0),
        MeasureId::Minkowski(2.0),
    ];

    fn spec(measures: &[MeasureId], alphas: &[f64], count: usize) -> CurveSpec {
        CurveSpec {
            measures: measures.to_vec(),
            alphas: alphas.to_vec(),
            grid: Grid::Linear { count },
            direction: Direction::PFirst,
        }
    }

    #[test]
    fn zero_at_alpha_zero_and_half() {
        let mut ms = BOUNDED.to_vec();
        ms.push(MeasureId::Kl);
        let t = sweep(&spec(&ms, &[0.0, 0.3, 1.0], 101)).unwrap();
        for r in &t.rows {
            if r.alpha == 0.0 || r.p1 == 0.5 {
                assert!(r.values.iter().all(|&v| v == 0.0), "{r:?}");
            }
        }
    }

    #[test]
    fn js_endpoint_and_kl_infinity() {
        let t = sweep(&spec(&[MeasureId::Js, MeasureId::Kl], &[1.0], 11)).unwrap();
        let first = &t.rows[0];
        assert_eq!((first.p1, first.q1), (0.0, 1.0));
        assert!((first.values[0] - 1.0).abs() < 1e-15);
        assert_eq!(first.values[1], f64::INFINITY);
    }

    #[test]
    fn dnew_and_dncm_sweeps_coincide() {
        let t = sweep(&spec(
            &[MeasureId::Dnew(2.0), MeasureId::Dncm(2.0)],
            &[0.0, 0.25, 0.5, 0.75, 1.0],
            DEFAULT_LINEAR_POINTS,
        ))
        .unwrap();
        for r in &t.rows {
            assert!((r.values[0] - r.values[1]).abs() <= 1e-12);
        }
    }

    #[test]
    fn rows_satisfy_family_formula_and_order() {
        let t = sweep(&spec(&[MeasureId::Js], &[1.0, 0.0, 0.5, 0.5], 21)).unwrap();
        assert_eq!(t.rows.len(), 3 * 21);
        for r in &t.rows {
            assert_eq!(r.q1, (1.0 - r.alpha) * r.p1 + r.alpha * (1.0 - r.p1));
        }
        let keys: Vec<(f64, f64)> = t.rows.iter().map(|r| (r.alpha, r.p1)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        assert_eq!(keys, sorted);
    }

    #[test]
    fn monotone_in_alpha_and_symmetric_in_p1() {
        let alphas: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        let count = 201;
        let t = sweep(&spec(&BOUNDED, &alphas, count)).unwrap();
        for (j, m) in BOUNDED.iter().enumerate() {
            for pi in 0..count {
                if pi == count / 2 {
                    continue;
                }
                for ai in 1..alphas.len() {
                    let prev = t.rows[(ai - 1) * count + pi].values[j];
                    let cur = t.rows[ai * count + pi].values[j];
                    assert!(cur >= prev - 1e-12, "{m} at p1 index {pi}");
                }
            }
        }
        for (j, m) in BOUNDED.iter().enumerate() {
            if !m.is_symmetric() {
                continue;
            }
            for ai in 0..alphas.len() {
                for pi in 0..count {
                    let a = t.rows[ai * count + pi].values[j];
                    let b = t.rows[ai * count + (count - 1 - pi)].values[j];
                    assert!((a - b).abs() <= 1e-9, "{m}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn near_zero_examples() {
        let ms = [
            MeasureId::Dnew(2.0),
            MeasureId::ScaledKl(0.3),
            MeasureId::Js,
        ];
        let t = near_zero_sweep(&ms, NEAR_ZERO_RANGE, DEFAULT_POINTS_PER_DECADE).unwrap();
        assert_eq!(t.rows.len(), 181);
        let first = &t.rows[0];
        assert_eq!(first.p1, 1e-10);
        assert!((first.values[0] - 1.0).abs() < 1e-6);
        // closed-form two-letter KL; 1 - (1 - p) is not exactly p in binary64,
        // which moves the value by a few 1e-9
        let p = 1e-10f64;
        let kl = p * (p / (1.0 - p)).log2() + (1.0 - p) * ((1.0 - p) / p).log2();
        assert!((first.values[1] - 0.3 * kl).abs() < 1e-7);
        assert!((first.values[1] - 9.97).abs() < 0.01);
        let last = t.rows.last().unwrap();
        assert_eq!(last.p1, 0.1);
        let pmf = |x: f64| Pmf::from_probs(vec![x, 1.0 - x]).unwrap();
        assert_eq!(last.values[2], js(&pmf(0.1), &pmf(0.9)).unwrap().total);
    }

    #[test]
    fn spec_validation() {
        assert_eq!(
            sweep(&spec(&[MeasureId::Js], &[0.5], 0)),
            Err(Error::GridEmpty)
        );
        assert_eq!(
            sweep(&spec(&[MeasureId::Js], &[], 5)),
            Err(Error::GridEmpty)
        );
        assert!(matches!(
            sweep(&spec(&[MeasureId::Js], &[1.5], 5)),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            sweep(&spec(&[MeasureId::CondEntropy], &[0.5], 5)),
            Err(Error::UnsupportedMeasure(_))
        ));
        let mut s = spec(&[MeasureId::Js], &[0.5], 5);
        s.grid = Grid::Explicit(vec![0.2, 0.1]);
        assert!(matches!(sweep(&s), Err(Error::InvalidGrid(_))));
        assert!(near_zero_sweep(&[MeasureId::Js], (1e-3, 0.7), 5).is_err());
    }

    #[test]
    fn csv_output() {
        let t = sweep(&spec(&[MeasureId::Kl, MeasureId::Dnew(2.0)], &[1.0], 3)).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("alpha,p1,q1,kl,dnew:k=2"));
        assert!(lines.next().unwrap().starts_with("1,0,1,inf,"));
        assert_eq!(lines.next(), Some("1,0.5,0.5,0,0"));
    }

    #[test]
    fn parallel_output_is_stable() {
        let s = spec(&BOUNDED, &[0.1, 0.9], 501);
        assert_eq!(sweep(&s).unwrap(), sweep(&s).unwrap());
    }

    proptest! {
        #[test]
        fn q1_formula_holds(alpha in 0.0f64..=1.0, p1 in 0.0f64..=1.0) {
            let s = CurveSpec {
                measures: vec![MeasureId::Js],
                alphas: vec![alpha],
                grid: Grid::Explicit(vec![p1]),
                direction: Direction::QFirst,
            };
            let t = sweep(&s).unwrap();
            prop_assert_eq!(t.rows[0].q1, family_q1(alpha, p1));
            prop_assert!(t.rows[0].values[0] >= 0.0 && t.rows[0].values[0] <= 1.0 + 1e-12);
        }
    }
}
