use std::cmp::Ordering;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde_json::Value;

use crate::config::Delta;
use crate::tasks::{Outcome, Row};

/// Fixed 17-significant-digit formatting with negative zero folded to zero.
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

fn delta_cell(d: Delta) -> String {
    match d {
        Delta::Single(x) => num(x),
        Delta::Split(l, r) => format!("{};{}", num(l), num(r)),
    }
}

fn delta_key(d: Delta) -> (f64, f64) {
    match d {
        Delta::Single(x) => (x, x),
        Delta::Split(l, r) => (l, r),
    }
}

fn fold_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn row_order(a: &Row, b: &Row) -> Ordering {
    let (da, db) = (delta_key(a.delta), delta_key(b.delta));
    da.0.total_cmp(&db.0)
        .then(da.1.total_cmp(&db.1))
        .then(a.j.cmp(&b.j))
        .then(fold_zero(a.value.re).total_cmp(&fold_zero(b.value.re)))
        .then(fold_zero(a.value.im).total_cmp(&fold_zero(b.value.im)))
}

pub fn write_rows(path: &Path, rows: &[Row]) -> Result<()> {
    let mut sorted = rows.to_vec();
    sorted.sort_by(row_order);
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    w.write_record(["delta", "j", "re", "im", "provenance"])?;
    for r in &sorted {
        w.write_record([
            delta_cell(r.delta),
            r.j.map(|j| j.to_string()).unwrap_or_default(),
            num(r.value.re),
            num(r.value.im),
            r.provenance.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Writes `<stem>.csv`, `<stem>.json` and any extra tables; returns the
/// paths written.
pub fn write_outcome(dir: &Path, stem: &str, outcome: &Outcome) -> Result<Vec<String>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = vec![];
    let main = dir.join(format!("{stem}.csv"));
    write_rows(&main, &outcome.rows)?;
    written.push(main.display().to_string());
    for t in &outcome.tables {
        let p = dir.join(format!("{stem}_{}.csv", t.suffix));
        let mut w = csv::Writer::from_path(&p).with_context(|| format!("writing {}", p.display()))?;
        w.write_record(&t.header)?;
        for r in &t.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        written.push(p.display().to_string());
    }
    let side = dir.join(format!("{stem}.json"));
    write_json(&side, &Value::Object(outcome.sidecar.clone()))?;
    written.push(side.display().to_string());
    Ok(written)
}
