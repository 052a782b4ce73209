//! CSV and JSON artifacts. Every file starts from the resolved spec, so a
//! run can be repeated from any one of its outputs.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use motorcargo_core::{StationaryDensity1D, TrajectoryEnsemble};
use serde::Serialize;

use crate::config::ExperimentSpec;

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        Self::Num(v.unwrap_or(f64::NAN))
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Self::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Self::Text(v)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // Shortest round-trip form; identical inputs give identical bytes.
            Self::Num(v) => format!("{v:?}"),
            Self::Text(s) => s.clone(),
        }
    }
}

/// Comment lines carrying the resolved spec.
pub fn provenance_header(spec: &ExperimentSpec) -> Result<String> {
    let cfg = serde_json::to_string(spec)?;
    Ok(format!(
        "# motorcargo {} experiment={} seed={}\n# config: {cfg}\n",
        env!("CARGO_PKG_VERSION"),
        spec.experiment,
        spec.seed
    ))
}

/// Writes `rows` under `columns`, after the provenance header.
pub fn write_csv(path: &Path, spec: &ExperimentSpec, columns: &[&str], rows: &[Vec<Cell>]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut buf = provenance_header(spec)?.into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(columns)?;
        for row in rows {
            anyhow::ensure!(row.len() == columns.len(), "row has {} fields, expected {}", row.len(), columns.len());
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.flush()?;
    }
    fs::write(path, buf).with_context(|| format!("writing {}", path.display()))
}

/// Pretty JSON with the spec under `config`.
pub fn write_json<T: Serialize>(path: &Path, spec: &ExperimentSpec, body: &T) -> Result<()> {
    #[derive(Serialize)]
    struct Doc<'a, T> {
        tool: &'static str,
        version: &'static str,
        seed: u64,
        config: &'a ExperimentSpec,
        #[serde(flatten)]
        body: &'a T,
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let doc = Doc { tool: "motorcargo", version: env!("CARGO_PKG_VERSION"), seed: spec.seed, config: spec, body };
    let mut f = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    serde_json::to_writer_pretty(&mut f, &doc)?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Two-column `grid,density` export.
pub fn write_density(path: &Path, spec: &ExperimentSpec, pi: &StationaryDensity1D) -> Result<()> {
    let rows: Vec<Vec<Cell>> = pi.grid().into_iter().zip(pi.pdf()).map(|(x, p)| vec![x.into(), p.into()]).collect();
    write_csv(path, spec, &["grid", "density"], &rows)
}

/// Recorded path of each of the first `count` replicas, one file each,
/// with columns `t_tilde,X1..XN,Z`.
pub fn write_trajectories(
    dir: &Path,
    stem: &str,
    spec: &ExperimentSpec,
    ens: &TrajectoryEnsemble,
    count: usize,
) -> Result<Vec<PathBuf>> {
    let dim = ens.dim();
    let mut columns = vec!["t_tilde".to_string()];
    columns.extend((1..=ens.motors).map(|i| format!("X{i}")));
    columns.push("Z".into());
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut out = Vec::new();
    for r in ens.replicas.iter().take(count) {
        let rows: Vec<Vec<Cell>> = r
            .samples
            .chunks_exact(dim)
            .enumerate()
            .map(|(k, s)| std::iter::once(ens.sample_time(k)).chain(s.iter().copied()).map(Cell::Num).collect())
            .collect();
        let path = dir.join(format!("{stem}_r{}.csv", r.replica));
        write_csv(&path, spec, &cols, &rows)?;
        out.push(path);
    }
    Ok(out)
}
