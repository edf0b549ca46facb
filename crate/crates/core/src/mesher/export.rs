use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ExportFormat {
    Obj,
    CsvPoints,
}

/// Plain triangle mesh with one label per vertex.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
    pub labels: Vec<String>,
}

impl TriMesh {
    /// Writes the mesh; `header` lines become `#` comments at the top.
    pub fn export(&self, format: ExportFormat, path: &Path, header: &[String]) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        match format {
            ExportFormat::Obj => self.write_obj(&mut w, header)?,
            ExportFormat::CsvPoints => self.write_csv(&mut w, header)?,
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_obj<W: Write>(&self, w: &mut W, header: &[String]) -> Result<()> {
        for h in header {
            writeln!(w, "# {h}")?;
        }
        for v in &self.vertices {
            writeln!(w, "v {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2])?;
        }
        for f in &self.faces {
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::Degenerate(format!("face {f:?} repeats a vertex")));
            }
            writeln!(w, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: &mut W, header: &[String]) -> Result<()> {
        for h in header {
            writeln!(w, "# {h}")?;
        }
        writeln!(w, "x,y,z,arc_label")?;
        for (k, v) in self.vertices.iter().enumerate() {
            let label = self.labels.get(k).map_or("", String::as_str);
            writeln!(w, "{:.16e},{:.16e},{:.16e},{label}", v[0], v[1], v[2])?;
        }
        Ok(())
    }
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Io(format!("line {line}: {msg}"))
}

fn parse_f64(s: Option<&str>, line: usize) -> Result<f64> {
    s.and_then(|t| t.parse().ok()).ok_or_else(|| parse_err(line, "bad coordinate"))
}

/// Reads `v` and triangular `f` records (vertex indices only); labels are empty.
pub fn read_obj(path: &Path) -> Result<TriMesh> {
    let mut m = TriMesh::default();
    for (n, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let v = [parse_f64(it.next(), n + 1)?, parse_f64(it.next(), n + 1)?, parse_f64(it.next(), n + 1)?];
                m.vertices.push(v);
            }
            Some("f") => {
                let idx: Vec<usize> = it
                    .map(|t| t.split('/').next().and_then(|s| s.parse::<usize>().ok()))
                    .collect::<Option<_>>()
                    .ok_or_else(|| parse_err(n + 1, "bad face index"))?;
                if idx.len() != 3 || idx.iter().any(|&i| i == 0 || i > m.vertices.len()) {
                    return Err(parse_err(n + 1, "face is not a triangle over known vertices"));
                }
                m.faces.push([idx[0] - 1, idx[1] - 1, idx[2] - 1]);
            }
            _ => {}
        }
    }
    Ok(m)
}

/// Reads the x,y,z,arc_label CSV written by [`TriMesh::write_csv`].
pub fn read_points_csv(path: &Path) -> Result<TriMesh> {
    let mut m = TriMesh::default();
    let mut seen_header = false;
    for (n, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        if !seen_header {
            if line != "x,y,z,arc_label" {
                return Err(parse_err(n + 1, "missing x,y,z,arc_label header"));
            }
            seen_header = true;
            continue;
        }
        let mut it = line.split(',');
        let v = [parse_f64(it.next(), n + 1)?, parse_f64(it.next(), n + 1)?, parse_f64(it.next(), n + 1)?];
        m.vertices.push(v);
        m.labels.push(it.next().unwrap_or("").to_string());
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn obj_and_csv_round_trip() {
        let m = TriMesh {
            vertices: vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.1 + 0.2, 1.0 / 3.0, -2.5e-17]],
            faces: vec![[0, 1, 2]],
            labels: vec!["interior".into(), "V1".into(), "V1V2".into()],
        };
        let dir = tempfile::tempdir().unwrap();
        let obj = dir.path().join("m.obj");
        let csv = dir.path().join("m.csv");
        m.export(ExportFormat::Obj, &obj, &["params a=1".into()]).unwrap();
        m.export(ExportFormat::CsvPoints, &csv, &["params a=1".into()]).unwrap();
        let back = read_obj(&obj).unwrap();
        assert_eq!(back.vertices, m.vertices);
        assert_eq!(back.faces, m.faces);
        let back = read_points_csv(&csv).unwrap();
        assert_eq!(back.vertices, m.vertices);
        assert_eq!(back.labels, m.labels);
        let bad = TriMesh { faces: vec![[0, 0, 1]], ..m };
        assert!(bad.export(ExportFormat::Obj, &obj, &[]).is_err());
    }
}
