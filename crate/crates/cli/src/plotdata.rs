//! Tidy `(x, series, y)` files derived from a result CSV.
//!
//! * `fig6_<workload>_<cr>.csv`: mean critical delay against request count, per strategy.
//! * `fig7_delay.csv`: mean critical delay per fixed benchmark and strategy.
//! * `fig8_depth.csv`: original, hh and twt depth per fixed benchmark.
//! * `reductions.csv`: per-group means and reduction in percent.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{CliError, Result};
use crate::experiment::{group_keys, read_csv, summarize, Row, NO_CR};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Point<X> {
    pub x: X,
    pub series: String,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionRow {
    pub workload: String,
    pub cr_mode: String,
    pub hh: f64,
    pub twt: f64,
    pub reduction: f64,
}

fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut n) = (0.0, 0usize);
    for v in values {
        sum += v;
        n += 1;
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Delay against request count for one synthetic group, x ascending within each series.
pub fn sweep_series(rows: &[Row], workload: &str, cr: &str) -> Vec<Point<usize>> {
    let mut acc: BTreeMap<(String, usize), Vec<f64>> = BTreeMap::new();
    for r in rows
        .iter()
        .filter(|r| r.workload == workload && r.cr_mode == cr)
    {
        acc.entry((r.strategy.clone(), r.num_requests))
            .or_default()
            .push(r.comm_delay_critical);
    }
    acc.into_iter()
        .map(|((series, x), ys)| Point {
            x,
            series,
            y: mean(ys),
        })
        .collect()
}

fn benchmarks(rows: &[Row]) -> Vec<String> {
    group_keys(rows)
        .into_iter()
        .filter(|(_, cr)| cr == NO_CR)
        .map(|(w, _)| w)
        .collect()
}

pub fn benchmark_delay(rows: &[Row]) -> Vec<Point<String>> {
    let mut out = Vec::new();
    for w in benchmarks(rows) {
        for s in ["hh", "twt"] {
            let ys: Vec<f64> = rows
                .iter()
                .filter(|r| r.workload == w && r.cr_mode == NO_CR && r.strategy == s)
                .map(|r| r.comm_delay_critical)
                .collect();
            if !ys.is_empty() {
                out.push(Point {
                    x: w.clone(),
                    series: s.into(),
                    y: mean(ys),
                });
            }
        }
    }
    out
}

pub fn benchmark_depth(rows: &[Row]) -> Vec<Point<String>> {
    let mut out = Vec::new();
    for w in benchmarks(rows) {
        let members: Vec<&Row> = rows
            .iter()
            .filter(|r| r.workload == w && r.cr_mode == NO_CR)
            .collect();
        out.push(Point {
            x: w.clone(),
            series: "original".into(),
            y: mean(members.iter().map(|r| r.original_depth as f64)),
        });
        for s in ["hh", "twt"] {
            let ys: Vec<f64> = members
                .iter()
                .filter(|r| r.strategy == s)
                .map(|r| r.expanded_depth as f64)
                .collect();
            if !ys.is_empty() {
                out.push(Point {
                    x: w.clone(),
                    series: s.into(),
                    y: mean(ys),
                });
            }
        }
    }
    out
}

/// Groups that ran both strategies, with the same arithmetic as the JSON summary.
pub fn reductions(rows: &[Row]) -> Vec<ReductionRow> {
    summarize("", rows)
        .groups
        .into_iter()
        .filter_map(|g| {
            let red = g.reduction?;
            Some(ReductionRow {
                hh: g.means["hh"].comm_delay_critical,
                twt: g.means["twt"].comm_delay_critical,
                reduction: red.comm_delay_critical_pct,
                workload: g.workload,
                cr_mode: g.cr_mode,
            })
        })
        .collect()
}

fn write<T: Serialize>(path: PathBuf, items: &[T], header: &[&str]) -> Result<PathBuf> {
    let mut w = csv::Writer::from_path(&path)?;
    if items.is_empty() {
        w.write_record(header)?;
    }
    for it in items {
        w.serialize(it)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(path)
}

/// File-name form of a C_r token: `fixed:3` becomes `fixed3`.
fn cr_slug(cr: &str) -> String {
    cr.chars().filter(|c| c.is_ascii_alphanumeric()).collect()
}

pub fn emit_plot_data(csv_path: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let rows = read_csv(csv_path)?;
    fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let xy = ["x", "series", "y"];
    let mut written = Vec::new();
    for (w, cr) in group_keys(&rows) {
        if cr == NO_CR {
            continue;
        }
        let name = format!("fig6_{w}_{}.csv", cr_slug(&cr));
        written.push(write(
            out_dir.join(name),
            &sweep_series(&rows, &w, &cr),
            &xy,
        )?);
    }
    if !benchmarks(&rows).is_empty() {
        written.push(write(
            out_dir.join("fig7_delay.csv"),
            &benchmark_delay(&rows),
            &xy,
        )?);
        written.push(write(
            out_dir.join("fig8_depth.csv"),
            &benchmark_depth(&rows),
            &xy,
        )?);
    }
    written.push(write(
        out_dir.join("reductions.csv"),
        &reductions(&rows),
        &["workload", "cr_mode", "hh", "twt", "reduction"],
    )?);
    Ok(written)
}
