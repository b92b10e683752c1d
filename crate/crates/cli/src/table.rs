//! Error tables: a long CSV with one row per (ε, component), and a wide CSV
//! with one column per ε as in published error tables.
//!
//! Floats are written with Rust's shortest round-trip formatting, so parsing a
//! table gives back the exact values that were written.

use std::io::{self, Write};

use blpinn::metrics::ErrorReport;
use blpinn::problems::ProblemId;

use crate::CliError;

pub const LONG_COLUMNS: &str = "problem,component,epsilon,rel_l2_mean,rel_linf_mean,trials";

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTableRow {
    pub problem: ProblemId,
    pub component: usize,
    pub epsilon: f64,
    pub rel_l2_mean: f64,
    pub rel_linf_mean: f64,
    pub trials: usize,
}

/// One row per component of every cell, in grid order.
pub fn table_rows(problem: ProblemId, cells: &[(f64, ErrorReport)]) -> Vec<ErrorTableRow> {
    let mut rows = Vec::new();
    for (eps, report) in cells {
        for k in 0..report.n_components() {
            rows.push(ErrorTableRow {
                problem,
                component: k,
                epsilon: *eps,
                rel_l2_mean: report.rel_l2[k],
                rel_linf_mean: report.rel_linf[k],
                trials: report.trials,
            });
        }
    }
    rows
}

pub fn write_long<W: Write>(mut w: W, header: &str, rows: &[ErrorTableRow]) -> io::Result<()> {
    writeln!(w, "{header}")?;
    writeln!(w, "{LONG_COLUMNS}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{:e},{:e},{:e},{}",
            r.problem, r.component, r.epsilon, r.rel_l2_mean, r.rel_linf_mean, r.trials
        )?;
    }
    Ok(())
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn field<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("line {line}: bad {what} `{s}`")))
}

pub fn parse_long(text: &str) -> Result<Vec<ErrorTableRow>, CliError> {
    let mut lines = data_lines(text);
    match lines.next() {
        Some((_, h)) if h == LONG_COLUMNS => {}
        other => return Err(CliError::Parse(format!("expected column header, got {other:?}"))),
    }
    lines
        .map(|(n, l)| {
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 6 {
                return Err(CliError::Parse(format!("line {n}: expected 6 fields, got {}", f.len())));
            }
            Ok(ErrorTableRow {
                problem: field(f[0], n, "problem")?,
                component: field(f[1], n, "component")?,
                epsilon: field(f[2], n, "epsilon")?,
                rel_l2_mean: field(f[3], n, "rel_l2_mean")?,
                rel_linf_mean: field(f[4], n, "rel_linf_mean")?,
                trials: field(f[5], n, "trials")?,
            })
        })
        .collect()
}

/// Regroups rows into per-ε reports. Only the fields a table carries are
/// filled: means and trial count.
pub fn reports_from_rows(rows: &[ErrorTableRow]) -> Vec<(f64, ErrorReport)> {
    let mut out: Vec<(f64, ErrorReport)> = Vec::new();
    for r in rows {
        let idx = match out.iter().position(|(e, _)| e.to_bits() == r.epsilon.to_bits()) {
            Some(i) => i,
            None => {
                out.push((
                    r.epsilon,
                    ErrorReport {
                        rel_l2: Vec::new(),
                        rel_linf: Vec::new(),
                        n_test: 0,
                        trials: r.trials,
                        per_trial: Vec::new(),
                    },
                ));
                out.len() - 1
            }
        };
        let rep = &mut out[idx].1;
        if rep.rel_l2.len() <= r.component {
            rep.rel_l2.resize(r.component + 1, f64::NAN);
            rep.rel_linf.resize(r.component + 1, f64::NAN);
        }
        rep.rel_l2[r.component] = r.rel_l2_mean;
        rep.rel_linf[r.component] = r.rel_linf_mean;
    }
    out
}

/// Rows `(component, metric)`, columns ε.
pub fn write_wide<W: Write>(
    mut w: W,
    header: &str,
    problem: ProblemId,
    cells: &[(f64, ErrorReport)],
) -> io::Result<()> {
    writeln!(w, "{header}")?;
    write!(w, "problem,component,metric")?;
    for (eps, _) in cells {
        write!(w, ",{eps:e}")?;
    }
    writeln!(w)?;
    let n = cells.first().map_or(0, |(_, r)| r.n_components());
    for k in 0..n {
        for (metric, pick) in [("rel_l2", 0), ("rel_linf", 1)] {
            write!(w, "{problem},{k},{metric}")?;
            for (_, r) in cells {
                let v = if pick == 0 { r.rel_l2[k] } else { r.rel_linf[k] };
                write!(w, ",{v:e}")?;
            }
            writeln!(w)?;
        }
    }
    write!(w, "{problem},,trials")?;
    for (_, r) in cells {
        write!(w, ",{}", r.trials)?;
    }
    writeln!(w)
}

pub fn parse_wide(text: &str) -> Result<Vec<ErrorTableRow>, CliError> {
    let mut lines = data_lines(text);
    let (_, head) = lines.next().ok_or_else(|| CliError::Parse("empty table".into()))?;
    let cols: Vec<&str> = head.split(',').collect();
    if cols.len() < 4 || cols[..3] != ["problem", "component", "metric"] {
        return Err(CliError::Parse(format!("unexpected header `{head}`")));
    }
    let eps: Vec<f64> = cols[3..]
        .iter()
        .map(|c| field(c, 1, "epsilon"))
        .collect::<Result<_, _>>()?;
    let mut rows: Vec<ErrorTableRow> = Vec::new();
    let mut trials = vec![0usize; eps.len()];
    for (n, l) in lines {
        let f: Vec<&str> = l.split(',').collect();
        if f.len() != 3 + eps.len() {
            return Err(CliError::Parse(format!("line {n}: expected {} fields", 3 + eps.len())));
        }
        let problem: ProblemId = field(f[0], n, "problem")?;
        if f[2] == "trials" {
            for (j, v) in f[3..].iter().enumerate() {
                trials[j] = field(v, n, "trials")?;
            }
            continue;
        }
        let component: usize = field(f[1], n, "component")?;
        for (j, v) in f[3..].iter().enumerate() {
            let v: f64 = field(v, n, "value")?;
            let pos = rows
                .iter()
                .position(|r| r.component == component && r.epsilon.to_bits() == eps[j].to_bits());
            let row = match pos {
                Some(i) => &mut rows[i],
                None => {
                    rows.push(ErrorTableRow {
                        problem,
                        component,
                        epsilon: eps[j],
                        rel_l2_mean: f64::NAN,
                        rel_linf_mean: f64::NAN,
                        trials: 0,
                    });
                    rows.last_mut().unwrap()
                }
            };
            match f[2] {
                "rel_l2" => row.rel_l2_mean = v,
                "rel_linf" => row.rel_linf_mean = v,
                m => return Err(CliError::Parse(format!("line {n}: unknown metric `{m}`"))),
            }
        }
    }
    for r in &mut rows {
        r.trials = trials[eps.iter().position(|e| e.to_bits() == r.epsilon.to_bits()).unwrap()];
    }
    // grid order, then component, like the long table
    rows.sort_by_key(|r| (eps.iter().position(|e| e.to_bits() == r.epsilon.to_bits()), r.component));
    Ok(rows)
}
