//! Instance file formats.
//!
//! All three formats are 1-indexed on disk and 0-indexed in memory.
//!
//! * Gset: `N M` on the first line, then `M` lines of `u v w`. The weight
//!   column is accepted but not kept; benchmark cuts are edge counts.
//! * DIMACS CNF: `c` comment lines, a `p cnf <vars> <clauses>` header, then
//!   signed literals with each clause terminated by `0`. A `%` line ends the
//!   clause section (SATLIB files carry one).
//! * Hyperedge list: one hyperedge per line, whitespace separated node ids.
//!   Blank lines and `#` comments are skipped. `N` is the largest id seen.

use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;

use super::Hypergraph;
use crate::error::{Error, Result};

/// A CNF formula as read from a DIMACS file. Literals are signed, 1-indexed
/// variable numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub n_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

/// A literal over a 0-indexed variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Literal {
    pub var: usize,
    pub positive: bool,
}

impl CnfFormula {
    /// Constraint hypergraph: one hyperedge per clause over its distinct
    /// variables.
    pub fn hypergraph(&self) -> Result<Hypergraph> {
        let edges: Vec<Vec<usize>> = self
            .literal_clauses()
            .into_iter()
            .map(|clause| {
                let mut vars: Vec<usize> = Vec::with_capacity(clause.len());
                for lit in clause {
                    if !vars.contains(&lit.var) {
                        vars.push(lit.var);
                    }
                }
                vars
            })
            .collect();
        Hypergraph::new(self.n_vars, edges)
    }

    pub fn literal_clauses(&self) -> Vec<Vec<Literal>> {
        self.clauses
            .iter()
            .map(|c| {
                c.iter()
                    .map(|&l| Literal {
                        var: l.unsigned_abs() as usize - 1,
                        positive: l > 0,
                    })
                    .collect()
            })
            .collect()
    }

    /// Number of clauses left unsatisfied by a 0/1 assignment.
    pub fn unsatisfied(&self, x: &[i64]) -> usize {
        self.clauses
            .iter()
            .filter(|c| {
                !c.iter().any(|&l| {
                    let v = x[l.unsigned_abs() as usize - 1] != 0;
                    v == (l > 0)
                })
            })
            .count()
    }
}

fn open(path: &Path) -> Result<BufReader<fs::File>> {
    Ok(BufReader::new(fs::File::open(path)?))
}

pub fn load_gset(path: impl AsRef<Path>) -> Result<Hypergraph> {
    let path = path.as_ref();
    parse_gset(open(path)?, path)
}

pub fn load_dimacs_cnf(path: impl AsRef<Path>) -> Result<CnfFormula> {
    let path = path.as_ref();
    parse_dimacs_cnf(open(path)?, path)
}

pub fn load_hyperedge_list(path: impl AsRef<Path>) -> Result<Hypergraph> {
    let path = path.as_ref();
    parse_hyperedge_list(open(path)?, path)
}

fn parse_index(token: &str, path: &Path, line: usize) -> Result<usize> {
    let id: usize = token
        .parse()
        .map_err(|_| Error::parse(path, line, format!("expected a node id, found {token:?}")))?;
    if id == 0 {
        return Err(Error::parse(path, line, "node ids are 1-indexed"));
    }
    Ok(id - 1)
}

/// `origin` is only used in error messages.
pub fn parse_gset(reader: impl Read, origin: &Path) -> Result<Hypergraph> {
    let mut lines = BufReader::new(reader)
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()));

    let (line_no, header) = lines
        .next()
        .ok_or_else(|| Error::parse(origin, 1, "missing `N M` header"))?;
    let header = header?;
    let mut fields = header.split_whitespace();
    let mut count = |what: &str| -> Result<usize> {
        fields
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::parse(origin, line_no, format!("header is missing {what}")))
    };
    let n = count("the node count")?;
    let m = count("the edge count")?;

    let mut edges = Vec::with_capacity(m);
    let mut last_line = line_no;
    for (line_no, line) in lines {
        let line = line?;
        last_line = line_no;
        let mut tokens = line.split_whitespace();
        let (Some(u), Some(v)) = (tokens.next(), tokens.next()) else {
            return Err(Error::parse(origin, line_no, "expected `u v [w]`"));
        };
        let (u, v) = (
            parse_index(u, origin, line_no)?,
            parse_index(v, origin, line_no)?,
        );
        if let Some(w) = tokens.next() {
            w.parse::<f64>()
                .map_err(|_| Error::parse(origin, line_no, format!("bad weight {w:?}")))?;
        }
        if u >= n || v >= n {
            return Err(Error::parse(
                origin,
                line_no,
                format!("edge ({}, {}) exceeds {n} nodes", u + 1, v + 1),
            ));
        }
        if u == v {
            return Err(Error::parse(origin, line_no, "self-loop"));
        }
        edges.push([u, v]);
    }
    if edges.len() != m {
        return Err(Error::parse(
            origin,
            last_line,
            format!("header declares {m} edges, found {}", edges.len()),
        ));
    }
    Hypergraph::new(n, edges)
}

pub fn parse_dimacs_cnf(reader: impl Read, origin: &Path) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut last_line = 0;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if let Some(rest) = trimmed.strip_prefix('p') {
            if header.is_some() {
                return Err(Error::parse(origin, line_no, "duplicate problem line"));
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or_else(|| {
                Error::parse(origin, line_no, "expected `p cnf <vars> <clauses>`")
            })?);
            continue;
        }
        let Some((n_vars, _)) = header else {
            return Err(Error::parse(
                origin,
                line_no,
                "clause before `p cnf` header",
            ));
        };
        for token in trimmed.split_whitespace() {
            let lit: i32 = token
                .parse()
                .map_err(|_| Error::parse(origin, line_no, format!("bad literal {token:?}")))?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else if lit.unsigned_abs() as usize > n_vars {
                return Err(Error::parse(
                    origin,
                    line_no,
                    format!("literal {lit} exceeds {n_vars} variables"),
                ));
            } else {
                current.push(lit);
            }
        }
    }
    let Some((n_vars, n_clauses)) = header else {
        return Err(Error::parse(origin, last_line, "missing `p cnf` header"));
    };
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != n_clauses {
        return Err(Error::parse(
            origin,
            last_line,
            format!(
                "header declares {n_clauses} clauses, found {}",
                clauses.len()
            ),
        ));
    }
    Ok(CnfFormula { n_vars, clauses })
}

pub fn parse_hyperedge_list(reader: impl Read, origin: &Path) -> Result<Hypergraph> {
    let mut edges = Vec::new();
    let mut n = 0;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let edge = trimmed
            .split_whitespace()
            .map(|t| parse_index(t, origin, i + 1))
            .collect::<Result<Vec<_>>>()?;
        n = n.max(edge.iter().max().map_or(0, |&m| m + 1));
        edges.push(edge);
    }
    Hypergraph::new(n, edges)
}

pub fn write_hyperedge_list(h: &Hypergraph, mut out: impl Write) -> io::Result<()> {
    for edge in h.edges() {
        let line: Vec<String> = edge.iter().map(|i| (i + 1).to_string()).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Writes a graph in Gset form with unit weights.
pub fn write_gset(h: &Hypergraph, mut out: impl Write) -> Result<()> {
    h.require_graph()?;
    writeln!(out, "{} {}", h.n_nodes(), h.n_edges())?;
    for edge in h.edges() {
        writeln!(out, "{} {} 1", edge[0] + 1, edge[1] + 1)?;
    }
    Ok(())
}

pub fn write_dimacs_cnf(cnf: &CnfFormula, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "p cnf {} {}", cnf.n_vars, cnf.clauses.len())?;
    for clause in &cnf.clauses {
        let lits: Vec<String> = clause.iter().map(i32::to_string).collect();
        writeln!(out, "{} 0", lits.join(" "))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn origin() -> &'static Path {
        Path::new("test")
    }

    #[test]
    fn gset_header_and_edges() {
        let text = "4 3\n1 2 1\n2 3 1\n4 1 -1\n";
        let h = parse_gset(text.as_bytes(), origin()).unwrap();
        assert_eq!((h.n_nodes(), h.n_edges()), (4, 3));
        assert_eq!(h.edge(2), &[3, 0]);
        assert!(!h.is_weighted());
    }

    #[test]
    fn gset_edge_count_must_match_header() {
        let err = parse_gset("3 3\n1 2 1\n2 3 1\n".as_bytes(), origin()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn gset_reports_bad_line() {
        let err = parse_gset("3 2\n1 2 1\n2 x 1\n".as_bytes(), origin()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_gset("3 1\n1 4 1\n".as_bytes(), origin()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn gset_large_header() {
        let mut text = String::from("800 4694\n");
        for k in 0..4694 {
            let u = k % 800;
            let v = (k * 7 + 1 + k / 800) % 800;
            let v = if v == u { (u + 1) % 800 } else { v };
            text.push_str(&format!("{} {} 1\n", u + 1, v + 1));
        }
        let h = parse_gset(text.as_bytes(), origin()).unwrap();
        assert_eq!((h.n_nodes(), h.n_edges()), (800, 4694));
    }

    #[test]
    fn dimacs_small_formula() {
        let text = "c example\np cnf 3 2\n1 -2 0\n2 3 0\n";
        let cnf = parse_dimacs_cnf(text.as_bytes(), origin()).unwrap();
        assert_eq!(cnf.n_vars, 3);
        assert_eq!(cnf.clauses, vec![vec![1, -2], vec![2, 3]]);
        let h = cnf.hypergraph().unwrap();
        assert_eq!((h.n_nodes(), h.n_edges()), (3, 2));
        let signs: Vec<Vec<bool>> = cnf
            .literal_clauses()
            .iter()
            .map(|c| c.iter().map(|l| l.positive).collect())
            .collect();
        assert_eq!(signs, vec![vec![true, false], vec![true, true]]);
    }

    #[test]
    fn dimacs_satlib_trailer_and_multiline_clauses() {
        let text = "c uf\np cnf 4 2\n 1 -2\n 3 0\n-4 2 1 0\n%\n0\n\n";
        let cnf = parse_dimacs_cnf(text.as_bytes(), origin()).unwrap();
        assert_eq!(cnf.clauses, vec![vec![1, -2, 3], vec![-4, 2, 1]]);
    }

    #[test]
    fn dimacs_errors() {
        let err = parse_dimacs_cnf("1 2 0\n".as_bytes(), origin()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_dimacs_cnf("p cnf 2 1\n1 3 0\n".as_bytes(), origin()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_dimacs_cnf("p cnf 2 2\n1 2 0\n".as_bytes(), origin()).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn hyperedge_list_infers_node_count() {
        let h = parse_hyperedge_list("1 2 3\n2 4\n".as_bytes(), origin()).unwrap();
        assert_eq!((h.n_nodes(), h.n_edges()), (4, 2));
        assert_eq!(h.edge(1), &[1, 3]);
        let err = parse_hyperedge_list("1 2\n0 3\n".as_bytes(), origin()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn writers_round_trip() {
        let h = Hypergraph::new(5, [vec![0, 1, 4], vec![2, 3]]).unwrap();
        let mut buf = Vec::new();
        write_hyperedge_list(&h, &mut buf).unwrap();
        assert_eq!(parse_hyperedge_list(buf.as_slice(), origin()).unwrap(), h);

        let g = Hypergraph::new(3, [vec![0, 1], vec![1, 2]]).unwrap();
        let mut buf = Vec::new();
        write_gset(&g, &mut buf).unwrap();
        assert_eq!(parse_gset(buf.as_slice(), origin()).unwrap(), g);

        let cnf = CnfFormula {
            n_vars: 3,
            clauses: vec![vec![1, -3, 2], vec![-1]],
        };
        let mut buf = Vec::new();
        write_dimacs_cnf(&cnf, &mut buf).unwrap();
        assert_eq!(parse_dimacs_cnf(buf.as_slice(), origin()).unwrap(), cnf);
    }

    #[test]
    fn unsatisfied_counts_clauses() {
        let cnf = CnfFormula {
            n_vars: 2,
            clauses: vec![vec![1, -2], vec![2]],
        };
        assert_eq!(cnf.unsatisfied(&[1, 1]), 0);
        assert_eq!(cnf.unsatisfied(&[0, 1]), 1);
        assert_eq!(cnf.unsatisfied(&[0, 0]), 1);
    }
}
