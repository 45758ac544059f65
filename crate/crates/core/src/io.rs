//! Plain-text interchange formats.
//!
//! * Edge list: one `u v` pair of 0-based decimal ids per line, `u < v`,
//!   lines sorted lexicographically, LF endings.
//! * Labels: one decimal community id per line; line `i` is vertex `i`.
//! * Partition: one `0` or `1` per line.
//!
//! Edge lists do not carry the vertex count. Readers take it from the caller
//! (usually the label file length) or fall back to `max id + 1`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{Graph, Labeling};
use crate::metrics::Partition;

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = String::with_capacity(g.num_edges() * 12);
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn write_edge_list(path: &Path, g: &Graph) -> Result<()> {
    fs::write(path, format_edge_list(g)).map_err(|e| Error::io(path, e))
}

/// Parses an edge list. Blank lines and lines starting with `#` are skipped.
pub fn parse_edge_list(path: &Path, text: &str, n: Option<usize>) -> Result<Graph> {
    let mut edges = Vec::new();
    let mut max_id: Option<u32> = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg,
        };
        let mut parts = line.split_whitespace();
        let (Some(a), Some(b), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(parse_err(format!("expected two vertex ids, got {line:?}")));
        };
        let u: u32 = a.parse().map_err(|_| parse_err(format!("bad vertex id {a:?}")))?;
        let v: u32 = b.parse().map_err(|_| parse_err(format!("bad vertex id {b:?}")))?;
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v));
    }
    let inferred = max_id.map_or(0, |m| m as usize + 1);
    let n = match n {
        Some(n) if n < inferred => {
            return Err(Error::InvalidGraph(format!(
                "{}: vertex id {} exceeds n = {n}",
                path.display(),
                inferred - 1
            )))
        }
        Some(n) => n,
        None => inferred,
    };
    Graph::from_edges(n, &edges)
}

pub fn read_edge_list(path: &Path, n: Option<usize>) -> Result<Graph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(path, &text, n)
}

pub fn format_labels(labels: &[u32]) -> String {
    let mut out = String::with_capacity(labels.len() * 2);
    for c in labels {
        writeln!(out, "{c}").unwrap();
    }
    out
}

pub fn write_labels(path: &Path, labels: &Labeling) -> Result<()> {
    fs::write(path, format_labels(labels.as_slice())).map_err(|e| Error::io(path, e))
}

pub fn parse_labels(path: &Path, text: &str) -> Result<Labeling> {
    let mut sigma = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let c: u32 = line.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg: format!("bad community id {line:?}"),
        })?;
        sigma.push(c);
    }
    Ok(Labeling::from_vec(sigma))
}

pub fn read_labels(path: &Path) -> Result<Labeling> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(path, &text)
}

pub fn format_partition(p: &Partition) -> String {
    let side: Vec<u32> = p.side.iter().map(|&s| s as u32).collect();
    format_labels(&side)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::PathBuf;

    #[test]
    fn edge_list_format_is_canonical() {
        let g = Graph::from_edges(5, &[(3, 1), (0, 4), (1, 0)]).unwrap();
        assert_eq!(format_edge_list(&g), "0 1\n0 4\n1 3\n");
        let back = parse_edge_list(&PathBuf::from("x"), &format_edge_list(&g), Some(5)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn vertex_count_inference() {
        let p = PathBuf::from("x");
        assert_eq!(parse_edge_list(&p, "0 2\n", None).unwrap().n(), 3);
        assert_eq!(parse_edge_list(&p, "0 2\n", Some(10)).unwrap().n(), 10);
        assert!(parse_edge_list(&p, "0 2\n", Some(2)).is_err());
        assert!(parse_edge_list(&p, "0 x\n", None).is_err());
        assert!(parse_edge_list(&p, "0 1 2\n", None).is_err());
    }

    #[test]
    fn labels_round_trip() {
        let p = PathBuf::from("x");
        let l = parse_labels(&p, "0\n2\n1\n").unwrap();
        assert_eq!(l.k(), 3);
        assert_eq!(format_labels(l.as_slice()), "0\n2\n1\n");
    }
}
