use std::fs::File;
use std::io::{BufReader, Read, Write};
use std::path::Path;

use flate2::read::GzDecoder;

use super::WeightedGraph;
use crate::error::{MbfError, Result};

/// On-disk encoding of an edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    GzipEdgeList,
}

impl GraphFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("gz") => GraphFormat::GzipEdgeList,
            _ => GraphFormat::EdgeList,
        }
    }
}

fn io_err(path: &Path, source: std::io::Error) -> MbfError {
    MbfError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Reads `n m` followed by `u v w` lines. `#` starts a comment.
pub fn load_graph(path: &Path, format: Option<GraphFormat>) -> Result<WeightedGraph> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let reader: Box<dyn Read> = match format.unwrap_or_else(|| GraphFormat::from_path(path)) {
        GraphFormat::EdgeList => Box::new(file),
        GraphFormat::GzipEdgeList => Box::new(GzDecoder::new(file)),
    };
    let mut text = String::new();
    BufReader::new(reader)
        .read_to_string(&mut text)
        .map_err(|e| io_err(path, e))?;
    parse_graph(&text)
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| MbfError::Parse {
        line,
        message: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| MbfError::Parse {
        line,
        message: format!("cannot parse {what} from {tok:?}"),
    })
}

pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        match header {
            None => {
                let n = parse_field(toks.next(), line_no, "node count")?;
                let m = parse_field(toks.next(), line_no, "edge count")?;
                if toks.next().is_some() {
                    return Err(MbfError::Parse {
                        line: line_no,
                        message: "header must be \"n m\"".into(),
                    });
                }
                header = Some((n, m));
            }
            Some((n, _)) => {
                let u: usize = parse_field(toks.next(), line_no, "source node")?;
                let v: usize = parse_field(toks.next(), line_no, "target node")?;
                let w: f64 = parse_field(toks.next(), line_no, "weight")?;
                if toks.next().is_some() {
                    return Err(MbfError::Parse {
                        line: line_no,
                        message: "trailing tokens".into(),
                    });
                }
                if u >= n || v >= n {
                    return Err(MbfError::Parse {
                        line: line_no,
                        message: format!("node id out of range [0, {n})"),
                    });
                }
                edges.push((u, v, w));
            }
        }
    }
    let (n, m) = header.ok_or(MbfError::Parse {
        line: 0,
        message: "empty input".into(),
    })?;
    if edges.len() != m {
        return Err(MbfError::Parse {
            line: 1,
            message: format!("header declares {m} edges, found {}", edges.len()),
        });
    }
    let g = WeightedGraph::from_edges(n, &edges)?;
    g.check_weight_ratio(4.0);
    Ok(g)
}

pub fn write_graph(g: &WeightedGraph, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{} {}", g.n(), g.m())?;
    for (u, v, w) in g.edges() {
        writeln!(out, "{u} {v} {w}")?;
    }
    Ok(())
}
