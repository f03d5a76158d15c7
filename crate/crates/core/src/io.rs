//! JSON interchange formats for grids, lines and point sets.

use crate::error::{arg, Error, Result};
use crate::grid::{GridFn, LineFn, C64};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::Path;

#[derive(Debug, Serialize, Deserialize)]
struct FnDoc {
    kind: String,
    n: usize,
    #[serde(default)]
    offset: i64,
    values: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SetDoc {
    kind: String,
    n: usize,
    points: Vec<[i64; 2]>,
}

/// Anything the CLI accepts as an input function.
#[derive(Debug, Clone)]
pub enum Input {
    Grid(GridFn),
    Line(LineFn),
    Set { n: usize, points: Vec<(usize, usize)> },
}

impl Input {
    pub fn into_grid(self) -> Result<GridFn> {
        match self {
            Input::Grid(g) => Ok(g),
            Input::Set { n, points } => GridFn::indicator(n, &points),
            Input::Line(_) => arg("expected a grid or set2d input, got a line"),
        }
    }

    pub fn into_line(self) -> Result<LineFn> {
        match self {
            Input::Line(l) => Ok(l),
            _ => arg("expected a line input"),
        }
    }
}

fn to_c64(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|p| C64::new(p[0], p[1])).collect()
}

fn from_c64(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

pub fn parse_input(text: &str) -> Result<Input> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let kind = value.get("kind").and_then(|k| k.as_str()).unwrap_or("").to_string();
    match kind.as_str() {
        "grid" | "line" => {
            let doc: FnDoc = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
            let values = to_c64(&doc.values);
            if kind == "grid" {
                Ok(Input::Grid(GridFn::from_values(doc.n, values)?))
            } else {
                if values.len() != doc.n {
                    return arg(format!("line declares n={} but has {} values", doc.n, values.len()));
                }
                Ok(Input::Line(LineFn::new(doc.offset, values)?))
            }
        }
        "set2d" => {
            let doc: SetDoc = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
            let mut seen = BTreeSet::new();
            for p in &doc.points {
                let (x, y) = (p[0], p[1]);
                if x < 0 || y < 0 || x >= doc.n as i64 || y >= doc.n as i64 {
                    return arg(format!("point ({x},{y}) outside [{}]^2", doc.n));
                }
                if !seen.insert((x as usize, y as usize)) {
                    return arg(format!("duplicate point ({x},{y})"));
                }
            }
            Ok(Input::Set { n: doc.n, points: seen.into_iter().collect() })
        }
        other => Err(Error::Parse(format!("unknown kind '{other}'"))),
    }
}

pub fn read_input(path: &Path) -> Result<Input> {
    let text = std::fs::read_to_string(path)?;
    parse_input(&text)
}

pub fn grid_to_json(f: &GridFn) -> String {
    let doc = FnDoc { kind: "grid".into(), n: f.n(), offset: 0, values: from_c64(f.values()) };
    serde_json::to_string(&doc).expect("serializable")
}

pub fn line_to_json(f: &LineFn) -> String {
    let doc = FnDoc { kind: "line".into(), n: f.len(), offset: f.offset(), values: from_c64(f.values()) };
    serde_json::to_string(&doc).expect("serializable")
}

pub fn set_to_json(n: usize, points: &[(usize, usize)]) -> String {
    let doc = SetDoc {
        kind: "set2d".into(),
        n,
        points: points.iter().map(|&(x, y)| [x as i64, y as i64]).collect(),
    };
    serde_json::to_string(&doc).expect("serializable")
}
