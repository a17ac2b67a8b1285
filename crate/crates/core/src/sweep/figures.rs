use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::fock::MomentSpec;
use crate::moments::{compare_engines, EngineKind};
use crate::witnesses::{evaluate, WitnessKind};

use super::svg::{line_chart, Series};
use super::{
    fmt12, prepare, report_line, round12, write_file, PGrid, Prepared, StateFamily, SweepError, REPORT_HEADER,
};

/// Abscissa shared by every figure panel.
pub const FIGURE_P_GRID: PGrid = PGrid {
    start: 0.01,
    end: 0.99,
    steps: 99,
};

struct Column {
    header: String,
    q: f64,
    witness: WitnessKind,
}

struct Panel {
    name: &'static str,
    title: String,
    ylabel: &'static str,
    m: usize,
    columns: Vec<Column>,
}

fn hoa_panel(name: &'static str, m: usize, q: f64) -> Panel {
    let columns = [(2, 2), (5, 1), (9, 1)]
        .into_iter()
        .map(|(l, mm)| Column {
            header: format!("hoa_{l}_{mm}"),
            q,
            witness: WitnessKind::Hoa { l, m: mm },
        })
        .collect();
    Panel {
        name,
        title: format!("higher-order antibunching, M={m}, q={}", fmt12(q)),
        ylabel: "D(l,m)",
        m,
        columns,
    }
}

fn quad_panel(name: &'static str, m: usize) -> Panel {
    let mut columns = Vec::new();
    for q in [0.01, 0.0, -0.01] {
        for (tag, w) in [("sx", WitnessKind::QuadX), ("sy", WitnessKind::QuadY)] {
            columns.push(Column {
                header: format!("{tag}_q={}", fmt12(q)),
                q,
                witness: w,
            });
        }
    }
    Panel {
        name,
        title: format!("quadrature squeezing, M={m}"),
        ylabel: "S",
        m,
        columns,
    }
}

fn ssd_panel(name: &'static str, m: usize) -> Panel {
    let q = -0.01;
    let columns = [("0", 0.0), ("pi", PI), ("pi_6", PI / 6.0), ("pi_3", PI / 3.0)]
        .into_iter()
        .map(|(tag, theta)| Column {
            header: format!("ssd_theta_{tag}"),
            q,
            witness: WitnessKind::SumSqueeze { theta },
        })
        .collect();
    Panel {
        name,
        title: format!("sum squeezing, M={m}, q={}", fmt12(q)),
        ylabel: "SSD",
        m,
        columns,
    }
}

fn sv_panel(name: &'static str, m: usize, qs: [f64; 4]) -> Panel {
    let columns = qs
        .into_iter()
        .map(|q| Column {
            header: format!("sv_q={}", fmt12(q)),
            q,
            witness: WitnessKind::Sv,
        })
        .collect();
    Panel {
        name,
        title: format!("Shchukin-Vogel criterion, M={m}"),
        ylabel: "SV",
        m,
        columns,
    }
}

fn panels() -> Vec<Panel> {
    vec![
        hoa_panel("fig2a", 10, -0.01),
        hoa_panel("fig2b", 10, -0.005),
        hoa_panel("fig2c", 20, -0.01),
        hoa_panel("fig2d", 20, -0.005),
        quad_panel("fig3a", 10),
        quad_panel("fig3b", 20),
        ssd_panel("fig4a", 10),
        ssd_panel("fig4b", 20),
        sv_panel("fig5a", 10, [0.01, -0.01, 0.0, 0.1]),
        sv_panel("fig5b", 20, [-0.005, 0.0, 0.005, 0.1]),
    ]
}

/// Values of one panel: `table[p_index][column]`.
fn panel_values(panel: &Panel, ps: &[f64]) -> Vec<Vec<Option<f64>>> {
    ps.par_iter()
        .map(|&p| {
            panel
                .columns
                .iter()
                .map(|c| {
                    let st = prepare(StateFamily::Ngbs, panel.m, p, c.q)?;
                    let eng = st.engine(EngineKind::PaperLiteral)?;
                    evaluate(c.witness, &eng)
                        .ok()
                        .map(|r| r.value)
                        .filter(|v| v.is_finite())
                        .map(round12)
                })
                .collect()
        })
        .collect()
}

fn panel_csv(panel: &Panel, ps: &[f64], values: &[Vec<Option<f64>>]) -> String {
    let mut out = String::from("p");
    for c in &panel.columns {
        out.push(',');
        out.push_str(&c.header);
    }
    out.push('\n');
    for (p, row) in ps.iter().zip(values) {
        out.push_str(&fmt12(*p));
        for v in row {
            out.push(',');
            if let Some(v) = v {
                out.push_str(&fmt12(*v));
            }
        }
        out.push('\n');
    }
    out
}

fn panel_specs(panel: &Panel) -> Vec<MomentSpec> {
    let mut specs: Vec<MomentSpec> = panel
        .columns
        .iter()
        .flat_map(|c| c.witness.required_moments())
        .collect();
    specs.sort_by_key(|s| (s.j, s.k, s.r, s.s));
    specs.dedup();
    specs
}

fn discrepancy_lines(panel: &Panel, ps: &[f64]) -> Vec<String> {
    let mut qs: Vec<f64> = panel.columns.iter().map(|c| c.q).collect();
    qs.sort_by(f64::total_cmp);
    qs.dedup();
    let specs = panel_specs(panel);
    let points: Vec<(f64, f64)> = qs.iter().flat_map(|&q| ps.iter().map(move |&p| (q, p))).collect();
    points
        .par_iter()
        .map(|&(q, p)| {
            let Some(Prepared::Fixed(st)) = prepare(StateFamily::Ngbs, panel.m, p, q) else {
                return Vec::new();
            };
            compare_engines(&st, &specs)
                .iter()
                .map(|r| {
                    format!(
                        "{},{},{},{},{}",
                        panel.name,
                        panel.m,
                        fmt12(p),
                        fmt12(q),
                        report_line(r)
                    )
                })
                .collect()
        })
        .flatten_iter()
        .collect()
}

/// Write one CSV and one SVG per figure panel, plus
/// `discrepancy_report.csv` comparing both engines on every moment the
/// panels read. Returns the written paths.
pub fn reproduce_figures(out_dir: &Path) -> Result<Vec<PathBuf>, SweepError> {
    fs::create_dir_all(out_dir).map_err(|e| SweepError::io(out_dir, e))?;
    let ps = FIGURE_P_GRID.points();
    let mut files = Vec::new();
    let mut report = format!("figure,M,p,q,{REPORT_HEADER}\n");

    for panel in panels() {
        let values = panel_values(&panel, &ps);
        let csv_path = out_dir.join(format!("{}.csv", panel.name));
        write_file(&csv_path, &panel_csv(&panel, &ps, &values))?;

        let series: Vec<Series> = panel
            .columns
            .iter()
            .enumerate()
            .map(|(ci, c)| Series {
                label: c.header.clone(),
                points: ps.iter().zip(&values).map(|(&p, row)| (p, row[ci])).collect(),
            })
            .collect();
        let svg_path = out_dir.join(format!("{}.svg", panel.name));
        write_file(&svg_path, &line_chart(&panel.title, "p", panel.ylabel, &series))?;
        files.push(csv_path);
        files.push(svg_path);

        for line in discrepancy_lines(&panel, &ps) {
            let _ = writeln!(report, "{line}");
        }
    }

    let report_path = out_dir.join("discrepancy_report.csv");
    write_file(&report_path, &report)?;
    files.push(report_path);
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panel_layout() {
        let ps = panels();
        assert_eq!(ps.len(), 10);
        let names: Vec<&str> = ps.iter().map(|p| p.name).collect();
        assert_eq!(names[0], "fig2a");
        assert_eq!(names[9], "fig5b");
        assert_eq!(
            ps[0].columns.iter().map(|c| c.header.as_str()).collect::<Vec<_>>(),
            ["hoa_2_2", "hoa_5_1", "hoa_9_1"]
        );
    }

    #[test]
    fn ssd_columns_degenerate_in_theta() {
        let panel = ssd_panel("fig4a", 10);
        let ps = FIGURE_P_GRID.points();
        let values = panel_values(&panel, &ps);
        let mut seen = 0;
        for row in &values {
            match (row[0], row[1]) {
                (Some(a), Some(b)) => {
                    assert!((a - b).abs() <= 1e-12);
                    seen += 1;
                }
                (None, None) => {}
                other => panic!("{other:?}"),
            }
        }
        assert!(seen > 50);
    }
}
