use std::fmt;

use rayon::prelude::*;

use crate::moments::EngineKind;
use crate::witnesses::{evaluate, EprForm, WitnessKind, DEFAULT_THETAS};

use super::{prepare, PGrid, StateFamily};

/// Parameter grid scanned for the classification table. Points failing
/// state validation are skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Grid {
    pub ms: Vec<usize>,
    pub qs: Vec<f64>,
    pub p: PGrid,
}

impl Default for Table1Grid {
    fn default() -> Self {
        Self {
            ms: vec![10, 20],
            qs: vec![-0.01, -0.005, 0.0, 0.005, 0.01, 0.1],
            p: PGrid {
                start: 0.01,
                end: 0.99,
                steps: 99,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub criterion: &'static str,
    pub expected: bool,
    /// Nonclassical somewhere on the grid with the closed-form engine.
    pub paper_present: bool,
    /// Same with the oracle engine; reported, not compared.
    pub oracle_present: bool,
    pub paper_min: f64,
    pub oracle_min: f64,
    /// Uses a form from the wider literature.
    pub literature_form: bool,
}

impl Table1Row {
    pub fn matches(&self) -> bool {
        self.paper_present == self.expected
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table1Report {
    pub grid: Table1Grid,
    pub points: usize,
    pub rows: Vec<Table1Row>,
}

impl Table1Report {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(Table1Row::matches)
    }

    pub fn row(&self, criterion: &str) -> Option<&Table1Row> {
        self.rows.iter().find(|r| r.criterion == criterion)
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "Yes"
    } else {
        "No"
    }
}

impl fmt::Display for Table1Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<16} {:>8} {:>8} {:>8} {:>14} {:>14}  match",
            "criterion", "expected", "present", "oracle", "min (paper)", "min (oracle)"
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<16} {:>8} {:>8} {:>8} {:>14.6e} {:>14.6e}  {}{}",
                r.criterion,
                yes_no(r.expected),
                yes_no(r.paper_present),
                yes_no(r.oracle_present),
                r.paper_min,
                r.oracle_min,
                if r.matches() { "ok" } else { "MISMATCH" },
                if r.literature_form { " (literature form)" } else { "" }
            )?;
        }
        write!(f, "{} valid grid points", self.points)
    }
}

fn criteria() -> Vec<(&'static str, bool, Vec<WitnessKind>)> {
    vec![
        (
            "HOA",
            true,
            [(1, 1), (2, 1), (2, 2), (5, 1), (9, 1)]
                .into_iter()
                .map(|(l, m)| WitnessKind::Hoa { l, m })
                .collect(),
        ),
        ("Quadrature", true, vec![WitnessKind::QuadX, WitnessKind::QuadY]),
        (
            "Sum",
            true,
            DEFAULT_THETAS
                .iter()
                .map(|&theta| WitnessKind::SumSqueeze { theta })
                .collect(),
        ),
        ("SV", true, vec![WitnessKind::Sv]),
        (
            "EPR",
            false,
            vec![
                WitnessKind::Epr(EprForm::Literal),
                WitnessKind::Epr(EprForm::VarianceConsistent),
            ],
        ),
        ("SU(1,1)", false, vec![WitnessKind::Su11]),
        ("Cauchy-Schwarz", false, vec![WitnessKind::CauchySchwarz]),
    ]
}

#[derive(Clone, Copy)]
struct Acc {
    present: bool,
    min: f64,
}

impl Acc {
    const EMPTY: Acc = Acc {
        present: false,
        min: f64::INFINITY,
    };

    fn merge(self, o: Acc) -> Acc {
        Acc {
            present: self.present || o.present,
            min: self.min.min(o.min),
        }
    }
}

/// Classify every criterion over `grid`: present iff some valid grid point
/// is nonclassical.
pub fn table1_report(grid: &Table1Grid) -> Table1Report {
    let crit = criteria();
    let points: Vec<(usize, f64, f64)> = grid
        .ms
        .iter()
        .flat_map(|&m| {
            grid.qs
                .iter()
                .flat_map(move |&q| grid.p.points().into_iter().map(move |p| (m, q, p)))
        })
        .collect();

    // per point: Some([criterion][engine]) for valid points
    let per_point: Vec<Option<Vec<[Acc; 2]>>> = points
        .par_iter()
        .map(|&(m, q, p)| {
            let st = prepare(StateFamily::Ngbs, m, p, q)?;
            let engines: Vec<_> = EngineKind::ALL.iter().map(|&e| st.engine(e)).collect::<Option<_>>()?;
            Some(
                crit.iter()
                    .map(|(_, _, ws)| {
                        let mut acc = [Acc::EMPTY; 2];
                        for (slot, eng) in acc.iter_mut().zip(&engines) {
                            for &w in ws {
                                if let Ok(r) = evaluate(w, eng) {
                                    if r.value.is_finite() {
                                        *slot = slot.merge(Acc {
                                            present: r.nonclassical,
                                            min: r.value,
                                        });
                                    }
                                }
                            }
                        }
                        acc
                    })
                    .collect(),
            )
        })
        .collect();

    let valid: Vec<&Vec<[Acc; 2]>> = per_point.iter().flatten().collect();
    let rows = crit
        .iter()
        .enumerate()
        .map(|(ci, (name, expected, ws))| {
            let fold = |ei: usize| valid.iter().fold(Acc::EMPTY, |a, pt| a.merge(pt[ci][ei]));
            let (paper, oracle) = (fold(0), fold(1));
            Table1Row {
                criterion: name,
                expected: *expected,
                paper_present: paper.present,
                oracle_present: oracle.present,
                paper_min: paper.min,
                oracle_min: oracle.min,
                literature_form: ws.iter().any(WitnessKind::is_literature_form),
            }
        })
        .collect();

    Table1Report {
        grid: grid.clone(),
        points: valid.len(),
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_q_removes_hoa() {
        let grid = Table1Grid {
            ms: vec![10],
            qs: vec![0.005, 0.01],
            p: PGrid {
                start: 0.05,
                end: 0.95,
                steps: 19,
            },
        };
        let rep = table1_report(&grid);
        assert!(!rep.row("HOA").unwrap().paper_present);
        assert_eq!(rep.points, 38);
    }
}
