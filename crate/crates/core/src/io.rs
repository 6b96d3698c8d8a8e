//! Text formats for point sets and distance matrices.
//!
//! Point sets start with `dim=<n> count=<m> symmetric=<0|1>` and then hold one
//! point per line as `n + 1` whitespace-separated coordinates. Distance files
//! start with `labels` followed by the point labels, then give the lower
//! triangle row by row, with or without the zero diagonal.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::finite_metric::{antipodal_pairing, FiniteMetricSpace};
use crate::sphere_geom::SpherePoint;

#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    pub dim: usize,
    pub points: Vec<SpherePoint>,
    /// Set when every point's exact negation is also in the file.
    pub symmetric: bool,
}

impl PointSet {
    pub fn new(points: Vec<SpherePoint>) -> Result<Self> {
        let dim = match points.first() {
            Some(p) => p.dim(),
            None => return Err(Error::invalid("empty point set")),
        };
        if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch(dim, bad.dim()));
        }
        let symmetric = antipodal_pairing(&points).is_ok();
        Ok(PointSet { dim, points, symmetric })
    }

    /// Involution pairing each point with its antipode, when symmetric.
    pub fn involution(&self) -> Option<Vec<usize>> {
        antipodal_pairing(&self.points).ok()
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("not a number: {tok:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            msg: format!("non-finite value {tok:?}"),
        });
    }
    Ok(v)
}

fn header_field(fields: &[(&str, &str)], key: &str, line: usize) -> Result<usize> {
    let raw = fields
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::Parse {
            line,
            msg: format!("header is missing {key}="),
        })?;
    raw.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad value for {key}: {raw:?}"),
    })
}

pub fn parse_points(text: &str) -> Result<PointSet> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let mut fields = Vec::new();
    for tok in header.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| Error::Parse {
            line: hline,
            msg: format!("expected key=value, got {tok:?}"),
        })?;
        fields.push((k, v));
    }
    let dim = header_field(&fields, "dim", hline)?;
    let count = header_field(&fields, "count", hline)?;
    let symmetric = match header_field(&fields, "symmetric", hline)? {
        0 => false,
        1 => true,
        s => {
            return Err(Error::Parse {
                line: hline,
                msg: format!("symmetric must be 0 or 1, got {s}"),
            })
        }
    };
    let mut points = Vec::with_capacity(count);
    for (line, l) in lines {
        let coords = l
            .split_whitespace()
            .map(|t| parse_f64(t, line))
            .collect::<Result<Vec<f64>>>()?;
        if coords.len() != dim + 1 {
            return Err(Error::Parse {
                line,
                msg: format!("expected {} coordinates, found {}", dim + 1, coords.len()),
            });
        }
        let p = SpherePoint::new(coords).map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        points.push(p);
    }
    if points.len() != count {
        return Err(Error::Parse {
            line: hline,
            msg: format!("header says count={count}, file has {} points", points.len()),
        });
    }
    if symmetric {
        antipodal_pairing(&points).map_err(|e| Error::Parse { line: hline, msg: e.to_string() })?;
    }
    if points.is_empty() {
        return Err(Error::Parse {
            line: hline,
            msg: "no points".into(),
        });
    }
    Ok(PointSet { dim, points, symmetric })
}

/// Coordinates are printed in shortest round-trip form, so parsing the
/// output gives back the same doubles.
pub fn format_points(set: &PointSet) -> String {
    let mut out = format!(
        "dim={} count={} symmetric={}\n",
        set.dim,
        set.points.len(),
        u8::from(set.symmetric)
    );
    for p in &set.points {
        let row: Vec<String> = p.coords().iter().map(|c| c.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_distance_matrix(text: &str) -> Result<FiniteMetricSpace> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let mut toks = header.split_whitespace();
    if toks.next() != Some("labels") {
        return Err(Error::Parse {
            line: hline,
            msg: "first line must start with `labels`".into(),
        });
    }
    let labels: Vec<String> = toks.map(str::to_owned).collect();
    let n = labels.len();
    if n == 0 {
        return Err(Error::Parse {
            line: hline,
            msg: "no labels".into(),
        });
    }
    let rows: Vec<(usize, Vec<f64>)> = lines
        .map(|(line, l)| {
            l.split_whitespace()
                .map(|t| parse_f64(t, line))
                .collect::<Result<Vec<f64>>>()
                .map(|r| (line, r))
        })
        .collect::<Result<_>>()?;
    // n rows means the diagonal is present; n - 1 rows means it is not.
    let with_diag = match rows.len() {
        r if r == n => true,
        r if r + 1 == n => false,
        r => {
            return Err(Error::Parse {
                line: hline,
                msg: format!("{n} labels need {n} or {} rows, found {r}", n - 1),
            })
        }
    };
    let mut full = vec![vec![0.0; n]; n];
    for (idx, (line, row)) in rows.iter().enumerate() {
        let i = if with_diag { idx } else { idx + 1 };
        let want = if with_diag { i + 1 } else { i };
        if row.len() != want {
            return Err(Error::Parse {
                line: *line,
                msg: format!("row {i} needs {want} entries, found {}", row.len()),
            });
        }
        if with_diag && row[i] != 0.0 {
            return Err(Error::Parse {
                line: *line,
                msg: format!("diagonal entry of row {i} is {}", row[i]),
            });
        }
        for (j, &v) in row.iter().take(i).enumerate() {
            full[i][j] = v;
            full[j][i] = v;
        }
    }
    FiniteMetricSpace::new(labels, full)
}

/// Lower triangle including the zero diagonal.
pub fn format_distance_matrix(space: &FiniteMetricSpace) -> String {
    let mut out = String::from("labels");
    for l in space.labels() {
        out.push(' ');
        out.push_str(l);
    }
    out.push('\n');
    for i in 0..space.len() {
        let row: Vec<String> = (0..=i).map(|j| space.d(i, j).to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}
