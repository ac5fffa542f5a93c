//! File formats.
//!
//! JSON documents are parsed with serde and written by a small canonical
//! writer that prints every float with 17 significant digits, so
//! `parse(write(x)) == x` bit for bit and `write(parse(text)) == text` for
//! canonical text.
//!
//! | document        | layout                                                     |
//! |-----------------|------------------------------------------------------------|
//! | matrix          | `{"n": 2, "entries": [[[re, im], ...], ...]}` row-major    |
//! | GT pattern      | `{"rows": [[...], ...]}`, longest row first                |
//! | contracted point| `{"w": [...], "g": <matrix>, "blocks": [[lo, hi], ...]}`  |
//! | cotangent point | `{"k": <matrix>, "v": <matrix>}`                           |
//! | weight chain    | `[[...], [..., ...], ...]`, shortest first                 |
//! | polygon         | `{"edges": [[x, y, z], ...]}`                              |
//! | scenario        | `{"r": [...], "d": [...], "angles": [...], "bends": [...]}`|
//!
//! Block ranges are 1-based and inclusive. Trajectories are CSV with
//! columns `t, re_11, im_11, re_12, ..., det_re, det_im, mu_drift`.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use crate::contraction::{BlockPartition, ContractedPoint, CotangentPoint};
use crate::error::{Error, Result};
use crate::flow::{momentum_drift, FlowTrajectory};
use crate::gt::{GtPattern, HighestWeight};
use crate::matrix::{CMat, ComplexMatrix, HermitianMatrix, Spectrum, UnitaryMatrix};
use crate::polygon::{Diagonal, PolygonConfig, Vec3};

/// 17 significant digits in exponent form.
pub fn fmt_f64(x: f64) -> Result<String> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("cannot serialize non-finite value {x}")));
    }
    Ok(format!("{x:.16e}"))
}

fn write_list(out: &mut String, xs: &[f64]) -> Result<()> {
    out.push('[');
    for (k, &x) in xs.iter().enumerate() {
        if k > 0 {
            out.push_str(", ");
        }
        out.push_str(&fmt_f64(x)?);
    }
    out.push(']');
    Ok(())
}

fn parse_err(what: &str, e: serde_json::Error) -> Error {
    Error::Parse(format!("{what}: {e}"))
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixDoc {
    n: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

fn matrix_from_doc(doc: MatrixDoc, field: &str) -> Result<ComplexMatrix> {
    if doc.entries.len() != doc.n {
        return Err(Error::Parse(format!(
            "{field}entries has {} rows, expected n = {}",
            doc.entries.len(),
            doc.n
        )));
    }
    for (i, row) in doc.entries.iter().enumerate() {
        if row.len() != doc.n {
            return Err(Error::Parse(format!(
                "{field}entries[{i}] has {} columns, expected n = {}",
                row.len(),
                doc.n
            )));
        }
    }
    let n = doc.n;
    let m = CMat::from_fn(n, n, |i, j| Complex64::new(doc.entries[i][j][0], doc.entries[i][j][1]));
    ComplexMatrix::new(m).map_err(|e| Error::Parse(format!("{field}{e}")))
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| parse_err("matrix", e))?;
    matrix_from_doc(doc, "")
}

fn write_matrix_into(out: &mut String, m: &ComplexMatrix, indent: &str) -> Result<()> {
    let n = m.dim();
    let _ = write!(out, "{{\n{indent}  \"n\": {n},\n{indent}  \"entries\": [\n");
    for i in 0..n {
        let _ = write!(out, "{indent}    [");
        for j in 0..n {
            if j > 0 {
                out.push_str(", ");
            }
            let z = m[(i, j)];
            let _ = write!(out, "[{}, {}]", fmt_f64(z.re)?, fmt_f64(z.im)?);
        }
        out.push(']');
        if i + 1 < n {
            out.push(',');
        }
        out.push('\n');
    }
    let _ = write!(out, "{indent}  ]\n{indent}}}");
    Ok(())
}

pub fn write_matrix(m: &ComplexMatrix) -> Result<String> {
    let mut out = String::new();
    write_matrix_into(&mut out, m, "")?;
    out.push('\n');
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternDoc {
    rows: Vec<Vec<f64>>,
}

pub fn parse_pattern(text: &str) -> Result<GtPattern> {
    let doc: PatternDoc = serde_json::from_str(text).map_err(|e| parse_err("pattern", e))?;
    GtPattern::new(doc.rows).map_err(|e| Error::Parse(format!("rows: {e}")))
}

pub fn write_pattern(p: &GtPattern) -> Result<String> {
    let mut out = String::from("{\n  \"rows\": [\n");
    for (k, row) in p.rows.iter().enumerate() {
        out.push_str("    ");
        write_list(&mut out, row)?;
        if k + 1 < p.rows.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    Ok(out)
}

/// Integer patterns are written without exponent notation.
pub fn write_int_pattern(p: &GtPattern<i64>) -> String {
    let rows: Vec<String> = p
        .rows
        .iter()
        .map(|r| format!("    [{}]", r.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("{{\n  \"rows\": [\n{}\n  ]\n}}\n", rows.join(",\n"))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ContractedDoc {
    w: Vec<f64>,
    g: MatrixDoc,
    blocks: Vec<[usize; 2]>,
}

pub fn parse_contracted(text: &str) -> Result<ContractedPoint> {
    let doc: ContractedDoc = serde_json::from_str(text).map_err(|e| parse_err("contracted point", e))?;
    let w = Spectrum::new(doc.w).map_err(|e| Error::Parse(format!("w: {e}")))?;
    let g = matrix_from_doc(doc.g, "g.")?;
    let g = UnitaryMatrix::new(g).map_err(|e| Error::Parse(format!("g: {e}")))?;
    let mut blocks = Vec::with_capacity(doc.blocks.len());
    let mut next = 1;
    for [lo, hi] in doc.blocks {
        if lo != next || hi < lo {
            return Err(Error::Parse(format!(
                "blocks: [{lo}, {hi}] does not continue at {next}"
            )));
        }
        blocks.push(lo - 1..hi);
        next = hi + 1;
    }
    if next != w.len() + 1 {
        return Err(Error::Parse(format!(
            "blocks cover 1..{}, expected 1..{}",
            next - 1,
            w.len()
        )));
    }
    let block_values = blocks
        .iter()
        .map(|b| w.values()[b.clone()].iter().sum::<f64>() / b.len() as f64)
        .collect();
    Ok(ContractedPoint {
        w,
        g,
        partition: BlockPartition { blocks, block_values },
    })
}

pub fn write_contracted(c: &ContractedPoint) -> Result<String> {
    let mut out = String::from("{\n  \"w\": ");
    write_list(&mut out, c.w.values())?;
    out.push_str(",\n  \"g\": ");
    write_matrix_into(&mut out, &c.g, "  ")?;
    out.push_str(",\n  \"blocks\": [");
    let blocks: Vec<String> = c
        .partition
        .blocks
        .iter()
        .map(|b| format!("[{}, {}]", b.start + 1, b.end))
        .collect();
    out.push_str(&blocks.join(", "));
    out.push_str("]\n}\n");
    Ok(out)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CotangentDoc {
    k: MatrixDoc,
    v: MatrixDoc,
}

pub fn parse_cotangent(text: &str) -> Result<CotangentPoint> {
    let doc: CotangentDoc = serde_json::from_str(text).map_err(|e| parse_err("cotangent point", e))?;
    let k = UnitaryMatrix::new(matrix_from_doc(doc.k, "k.")?).map_err(|e| Error::Parse(format!("k: {e}")))?;
    let v = HermitianMatrix::new(matrix_from_doc(doc.v, "v.")?).map_err(|e| Error::Parse(format!("v: {e}")))?;
    CotangentPoint::new(k, v).map_err(|e| Error::Parse(e.to_string()))
}

/// Whether a JSON document is a cotangent point rather than a bare matrix.
pub fn is_cotangent(text: &str) -> bool {
    matches!(serde_json::from_str::<serde_json::Value>(text), Ok(serde_json::Value::Object(o)) if o.contains_key("k"))
}

pub fn parse_chain(text: &str) -> Result<Vec<HighestWeight>> {
    let rows: Vec<Vec<i64>> = serde_json::from_str(text).map_err(|e| parse_err("weight chain", e))?;
    rows.into_iter()
        .enumerate()
        .map(|(k, r)| HighestWeight::new(r).map_err(|e| Error::Parse(format!("[{k}]: {e}"))))
        .collect()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolygonDoc {
    edges: Vec<[f64; 3]>,
}

pub fn parse_polygon(text: &str) -> Result<PolygonConfig> {
    let doc: PolygonDoc = serde_json::from_str(text).map_err(|e| parse_err("polygon", e))?;
    let edges = doc.edges.iter().map(|e| Vec3::new(e[0], e[1], e[2])).collect();
    PolygonConfig::new(edges, true).map_err(|e| Error::Parse(format!("edges: {e}")))
}

pub fn write_polygon(p: &PolygonConfig) -> Result<String> {
    let mut out = String::from("{\n  \"edges\": [\n");
    for (k, e) in p.edges.iter().enumerate() {
        out.push_str("    ");
        write_list(&mut out, &[e.x, e.y, e.z])?;
        if k + 1 < p.edges.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str("  ]\n}\n");
    Ok(out)
}

/// One bend of a scenario: rotate edges `first..first + len` by `theta`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BendStep {
    pub first: usize,
    pub len: usize,
    pub theta: f64,
}

impl BendStep {
    pub fn diagonal(&self) -> Diagonal {
        Diagonal::new(self.first, self.len)
    }
}

/// Side lengths, fan diagonal lengths, dihedral angles and a bend schedule.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub r: Vec<f64>,
    #[serde(default)]
    pub d: Vec<f64>,
    #[serde(default)]
    pub angles: Vec<f64>,
    #[serde(default)]
    pub bends: Vec<BendStep>,
}

pub fn parse_scenario(text: &str) -> Result<Scenario> {
    serde_json::from_str(text).map_err(|e| parse_err("scenario", e))
}

/// Grid samples of a trajectory as CSV.
pub fn write_trajectory<W: std::io::Write>(traj: &FlowTrajectory, out: W) -> Result<()> {
    let n = traj.terminal.dim();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    for i in 1..=n {
        for j in 1..=n {
            header.push(format!("re_{i}{j}"));
            header.push(format!("im_{i}{j}"));
        }
    }
    header.extend(["det_re", "det_im", "mu_drift"].map(String::from));
    let io_err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(&header).map_err(io_err)?;
    let b0 = traj.initial();
    for s in traj.grid() {
        let mut rec = vec![fmt_f64(s.t)?];
        for i in 0..n {
            for j in 0..n {
                rec.push(fmt_f64(s.b[(i, j)].re)?);
                rec.push(fmt_f64(s.b[(i, j)].im)?);
            }
        }
        let det = s.b.det();
        rec.push(fmt_f64(det.re)?);
        rec.push(fmt_f64(det.im)?);
        rec.push(fmt_f64(momentum_drift(b0, &s.b))?);
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))
}
