//! Seeded random instance generators.

use std::collections::{HashMap, HashSet};

use rand::seq::{index, SliceRandom};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::io::CnfFormula;
use super::Hypergraph;
use crate::error::{Error, Result};
use crate::rng::seeded;

/// Erdős–Rényi `G(n, p)`: one coin flip per unordered pair.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Hypergraph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut rng = seeded(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p {
                edges.push([i, j]);
            }
        }
    }
    Hypergraph::new(n, edges)
}

/// Uniform random simple graph with exactly `m` edges.
pub fn gnm(n: usize, m: usize, seed: u64) -> Result<Hypergraph> {
    let pairs = n * n.saturating_sub(1) / 2;
    if m > pairs {
        return Err(Error::InfeasibleSpec(format!(
            "{m} edges exceed {pairs} node pairs"
        )));
    }
    let mut rng = seeded(seed);
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let key = (i.min(j), i.max(j));
        if seen.insert(key) {
            edges.push([key.0, key.1]);
        }
    }
    Hypergraph::new(n, edges)
}

/// Random `d`-regular simple graph by sequential pairing with rejection,
/// restarting when the pairing gets stuck.
pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Hypergraph> {
    if d >= n || (n * d) % 2 == 1 {
        return Err(Error::InfeasibleSpec(format!(
            "no {d}-regular graph on {n} nodes"
        )));
    }
    let mut rng = seeded(seed);
    'attempt: for _ in 0..1000 {
        let mut points: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, d)).collect();
        let mut seen = HashSet::with_capacity(n * d / 2);
        let mut edges = Vec::with_capacity(n * d / 2);
        while !points.is_empty() {
            let mut placed = false;
            for _ in 0..100 {
                let a = rng.gen_range(0..points.len());
                let b = rng.gen_range(0..points.len());
                let (u, v) = (points[a], points[b]);
                if a == b || u == v || seen.contains(&(u.min(v), u.max(v))) {
                    continue;
                }
                seen.insert((u.min(v), u.max(v)));
                edges.push([u, v]);
                let (hi, lo) = (a.max(b), a.min(b));
                points.swap_remove(hi);
                points.swap_remove(lo);
                placed = true;
                break;
            }
            if !placed {
                continue 'attempt;
            }
        }
        return Hypergraph::new(n, edges);
    }
    Err(Error::InfeasibleSpec(format!(
        "pairing for a {d}-regular graph on {n} nodes kept failing"
    )))
}

/// Configuration-model graph on a power-law degree sequence
/// `P(k) ∝ k^-exponent` for `k ≥ min_degree`. Self-loops and repeated edges
/// are erased, so realized degrees can fall slightly short.
pub fn powerlaw(n: usize, exponent: f64, min_degree: usize, seed: u64) -> Result<Hypergraph> {
    if exponent <= 1.0 || min_degree == 0 || min_degree >= n {
        return Err(Error::InvalidArgument(format!(
            "power law needs exponent > 1 and 1 ≤ min degree < n (got {exponent}, {min_degree})"
        )));
    }
    let mut rng = seeded(seed);
    let support: Vec<usize> = (min_degree..n).collect();
    let weights: Vec<f64> = support
        .iter()
        .map(|&k| (k as f64).powf(-exponent))
        .collect();
    let total: f64 = weights.iter().sum();
    let mut degrees: Vec<usize> = (0..n)
        .map(|_| {
            let mut u = rng.gen::<f64>() * total;
            for (k, w) in support.iter().zip(&weights) {
                if u < *w {
                    return *k;
                }
                u -= w;
            }
            *support.last().unwrap()
        })
        .collect();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        degrees[0] += 1;
    }
    let mut stubs: Vec<usize> = degrees
        .iter()
        .enumerate()
        .flat_map(|(i, &d)| std::iter::repeat_n(i, d))
        .collect();
    stubs.shuffle(&mut rng);
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0], pair[1]);
        if u != v && seen.insert((u.min(v), u.max(v))) {
            edges.push([u.min(v), u.max(v)]);
        }
    }
    Hypergraph::new(n, edges)
}

/// Edge density `2|E| / (n(n-1))` of a graph.
pub fn density(h: &Hypergraph) -> f64 {
    let n = h.n_nodes() as f64;
    if n < 2.0 {
        return 0.0;
    }
    2.0 * h.n_edges() as f64 / (n * (n - 1.0))
}

/// Random hypergraph with `n_edges` hyperedges whose sizes are uniform in
/// `sizes` and in which no node joins more than `max_degree` hyperedges.
pub fn random_hypergraph(
    n_nodes: usize,
    n_edges: usize,
    max_degree: usize,
    sizes: std::ops::RangeInclusive<usize>,
    seed: u64,
) -> Result<Hypergraph> {
    let (lo, hi) = (*sizes.start(), *sizes.end());
    if lo == 0 || lo > hi || hi > n_nodes {
        return Err(Error::InvalidArgument(format!(
            "hyperedge sizes {lo}..={hi} invalid for {n_nodes} nodes"
        )));
    }
    if n_edges * lo > n_nodes * max_degree {
        return Err(Error::InfeasibleSpec(format!(
            "{n_edges} hyperedges of size ≥ {lo} need more than {n_nodes} × {max_degree} memberships"
        )));
    }
    let mut rng = seeded(seed);
    let mut degree = vec![0usize; n_nodes];
    // nodes still below the cap
    let mut open: Vec<usize> = (0..n_nodes).collect();
    let mut edges = Vec::with_capacity(n_edges);
    for _ in 0..n_edges {
        let size = rng.gen_range(lo..=hi);
        if open.len() < size {
            return Err(Error::InfeasibleSpec(format!(
                "degree cap {max_degree} leaves only {} nodes for a size-{size} hyperedge",
                open.len()
            )));
        }
        let picks = index::sample(&mut rng, open.len(), size).into_vec();
        let mut edge: Vec<usize> = picks.iter().map(|&p| open[p]).collect();
        edge.sort_unstable();
        for &i in &edge {
            degree[i] += 1;
        }
        open.retain(|&i| degree[i] < max_degree);
        edges.push(edge);
    }
    Hypergraph::new(n_nodes, edges)
}

/// Random planar graph: a stacked triangulation mixed by random edge flips,
/// keeping a `keep_fraction` share of its `3n - 6` edges.
pub fn random_planar(n: usize, keep_fraction: f64, seed: u64) -> Result<Hypergraph> {
    if n < 3 {
        return Err(Error::InvalidArgument(
            "planar generator needs n ≥ 3".into(),
        ));
    }
    let mut rng = seeded(seed);
    let mut tri = Triangulation::new();
    for v in 3..n {
        let t = rng.gen_range(0..tri.faces.len());
        tri.insert(t, v);
    }
    for _ in 0..10 * tri.edges.len() {
        let e = rng.gen_range(0..tri.edges.len());
        tri.flip(e);
    }
    let mut edges = tri.edges;
    edges.shuffle(&mut rng);
    let keep = ((edges.len() as f64) * keep_fraction.clamp(0.0, 1.0)).round() as usize;
    edges.truncate(keep);
    // relabel so the stacking order is not visible in node ids
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(&mut rng);
    let mut edges: Vec<[usize; 2]> = edges.iter().map(|&(a, b)| [label[a], label[b]]).collect();
    edges.sort_unstable_by_key(|e| (e[0].min(e[1]), e[0].max(e[1])));
    Hypergraph::new(n, edges)
}

/// Union of two graphs on the same node set, keeping one copy of shared edges.
pub fn graph_union(a: &Hypergraph, b: &Hypergraph) -> Result<Hypergraph> {
    let n = a.n_nodes().max(b.n_nodes());
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for e in a.edges().chain(b.edges()) {
        let key = (e[0].min(e[1]), e[0].max(e[1]));
        if seen.insert(key) {
            edges.push([key.0, key.1]);
        }
    }
    Hypergraph::new(n, edges)
}

struct Triangulation {
    faces: Vec<[usize; 3]>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    edge_faces: HashMap<(usize, usize), Vec<usize>>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl Triangulation {
    fn new() -> Self {
        let mut tri = Self {
            faces: Vec::new(),
            edges: Vec::new(),
            edge_index: HashMap::new(),
            edge_faces: HashMap::new(),
        };
        // outer face and inner face of the initial triangle
        for face in [[0, 1, 2], [0, 2, 1]] {
            tri.add_face(face);
        }
        tri
    }

    fn add_edge(&mut self, a: usize, b: usize) {
        let k = key(a, b);
        if !self.edge_index.contains_key(&k) {
            self.edge_index.insert(k, self.edges.len());
            self.edges.push(k);
        }
    }

    fn add_face(&mut self, face: [usize; 3]) -> usize {
        let id = self.faces.len();
        self.faces.push(face);
        for (a, b) in [(face[0], face[1]), (face[1], face[2]), (face[2], face[0])] {
            self.add_edge(a, b);
            self.edge_faces.entry(key(a, b)).or_default().push(id);
        }
        id
    }

    fn relink(&mut self, a: usize, b: usize, from: usize, to: usize) {
        let list = self.edge_faces.get_mut(&key(a, b)).expect("edge exists");
        for f in list.iter_mut() {
            if *f == from {
                *f = to;
            }
        }
    }

    fn insert(&mut self, t: usize, v: usize) {
        let [a, b, c] = self.faces[t];
        self.faces[t] = [a, b, v];
        let t2 = self.faces.len();
        self.faces.push([b, c, v]);
        let t3 = self.faces.len();
        self.faces.push([c, a, v]);
        self.relink(b, c, t, t2);
        self.relink(c, a, t, t3);
        for (x, faces) in [(a, [t, t3]), (b, [t, t2]), (c, [t2, t3])] {
            self.add_edge(x, v);
            self.edge_faces.insert(key(x, v), faces.to_vec());
        }
    }

    fn flip(&mut self, e: usize) {
        let (a, b) = self.edges[e];
        let faces = self.edge_faces[&(a, b)].clone();
        let [f1, f2] = [faces[0], faces[1]];
        let apex = |face: [usize; 3]| *face.iter().find(|&&x| x != a && x != b).unwrap();
        let (c, d) = (apex(self.faces[f1]), apex(self.faces[f2]));
        if c == d || self.edge_index.contains_key(&key(c, d)) {
            return;
        }
        self.faces[f1] = [c, d, a];
        self.faces[f2] = [c, d, b];
        self.relink(b, c, f1, f2);
        self.relink(a, d, f2, f1);
        self.edge_faces.remove(&(a, b));
        self.edge_index.remove(&(a, b));
        self.edges[e] = key(c, d);
        self.edge_index.insert(key(c, d), e);
        self.edge_faces.insert(key(c, d), vec![f1, f2]);
    }
}

/// Uniform random k-SAT: each clause draws `k` distinct variables and
/// independent signs.
pub fn random_ksat(n_vars: usize, n_clauses: usize, k: usize, seed: u64) -> Result<CnfFormula> {
    if k == 0 || k > n_vars {
        return Err(Error::InvalidArgument(format!(
            "clause width {k} for {n_vars} variables"
        )));
    }
    let mut rng = seeded(seed);
    let clauses = (0..n_clauses)
        .map(|_| random_clause(&mut rng, n_vars, k))
        .collect();
    Ok(CnfFormula { n_vars, clauses })
}

fn random_clause(rng: &mut ChaCha8Rng, n_vars: usize, k: usize) -> Vec<i32> {
    index::sample(rng, n_vars, k)
        .into_iter()
        .map(|v| {
            let lit = v as i32 + 1;
            if rng.gen::<bool>() {
                lit
            } else {
                -lit
            }
        })
        .collect()
}

/// Uniform random k-SAT conditioned on satisfiability: formulas are redrawn
/// until a complete search finds a model.
pub fn random_satisfiable_ksat(
    n_vars: usize,
    n_clauses: usize,
    k: usize,
    seed: u64,
) -> Result<CnfFormula> {
    let mut rng = seeded(seed);
    for _ in 0..10_000 {
        let cnf = random_ksat(n_vars, n_clauses, k, rng.gen())?;
        if find_model(&cnf).is_some() {
            return Ok(cnf);
        }
    }
    Err(Error::InfeasibleSpec(format!(
        "no satisfiable {k}-SAT formula with {n_vars} variables and {n_clauses} clauses found"
    )))
}

/// Complete DPLL search with unit propagation. Returns a satisfying 0/1
/// assignment if one exists.
pub fn find_model(cnf: &CnfFormula) -> Option<Vec<i64>> {
    let clauses = cnf.literal_clauses();
    let mut value: Vec<Option<bool>> = vec![None; cnf.n_vars];
    if dpll(&clauses, &mut value) {
        Some(
            value
                .iter()
                .map(|v| i64::from(v.unwrap_or(false)))
                .collect(),
        )
    } else {
        None
    }
}

fn dpll(clauses: &[Vec<super::io::Literal>], value: &mut Vec<Option<bool>>) -> bool {
    let mut trail = Vec::new();
    loop {
        let mut unit = None;
        let mut all_satisfied = true;
        for clause in clauses {
            let mut open = None;
            let mut open_count = 0;
            let mut satisfied = false;
            for lit in clause {
                match value[lit.var] {
                    Some(v) if v == lit.positive => {
                        satisfied = true;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        open_count += 1;
                        open = Some(*lit);
                    }
                }
            }
            if satisfied {
                continue;
            }
            all_satisfied = false;
            match open_count {
                0 => {
                    for v in trail {
                        value[v] = None;
                    }
                    return false;
                }
                1 => {
                    unit = open;
                    break;
                }
                _ => {}
            }
        }
        if all_satisfied {
            return true;
        }
        match unit {
            Some(lit) => {
                value[lit.var] = Some(lit.positive);
                trail.push(lit.var);
            }
            None => break,
        }
    }
    let var = value
        .iter()
        .position(Option::is_none)
        .expect("open clause has a free variable");
    for choice in [true, false] {
        value[var] = Some(choice);
        if dpll(clauses, value) {
            return true;
        }
    }
    value[var] = None;
    for v in trail {
        value[v] = None;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_graph_is_simple_and_regular() {
        let h = random_regular(1000, 3, 5).unwrap();
        assert_eq!(h.n_edges(), 1500);
        assert!(h.degrees().iter().all(|&d| d == 3));
        let mut seen = HashSet::new();
        for e in h.edges() {
            assert_ne!(e[0], e[1]);
            assert!(seen.insert(key(e[0], e[1])));
        }
        assert!(random_regular(5, 3, 0).is_err());
    }

    #[test]
    fn hypergraph_respects_degree_cap() {
        let h = random_hypergraph(100, 150, 10, 2..=4, 9).unwrap();
        assert_eq!((h.n_nodes(), h.n_edges()), (100, 150));
        assert!(h.degrees().iter().all(|&d| d <= 10));
        assert!(matches!(
            random_hypergraph(10, 50, 2, 2..=3, 0),
            Err(Error::InfeasibleSpec(_))
        ));
    }

    #[test]
    fn generators_are_seeded() {
        assert_eq!(
            erdos_renyi(50, 0.1, 4).unwrap(),
            erdos_renyi(50, 0.1, 4).unwrap()
        );
        assert_ne!(
            erdos_renyi(50, 0.1, 4).unwrap(),
            erdos_renyi(50, 0.1, 5).unwrap()
        );
        assert_eq!(gnm(100, 300, 1).unwrap().n_edges(), 300);
    }

    #[test]
    fn erdos_renyi_density() {
        let h = erdos_renyi(400, 0.05, 2).unwrap();
        let d = density(&h);
        assert!((d - 0.05).abs() < 0.005, "{d}");
    }

    #[test]
    fn planar_edge_count() {
        let h = random_planar(800, 1.0, 3).unwrap();
        assert_eq!(h.n_edges(), 3 * 800 - 6);
        assert!(h.is_graph());
        let partial = random_planar(800, 0.99, 3).unwrap();
        assert_eq!(partial.n_edges(), (2394.0f64 * 0.99).round() as usize);
    }

    #[test]
    fn powerlaw_has_heavy_tail() {
        let h = powerlaw(1000, 2.5, 2, 8).unwrap();
        let max = *h.degrees().iter().max().unwrap();
        assert!(max > 20, "max degree {max}");
    }

    #[test]
    fn dpll_agrees_with_enumeration() {
        for seed in 0..30 {
            let cnf = random_ksat(8, 40, 3, seed).unwrap();
            let brute = (0..1u32 << 8).any(|mask| {
                let x: Vec<i64> = (0..8).map(|i| i64::from(mask >> i & 1)).collect();
                cnf.unsatisfied(&x) == 0
            });
            let model = find_model(&cnf);
            assert_eq!(model.is_some(), brute, "seed {seed}");
            if let Some(x) = model {
                assert_eq!(cnf.unsatisfied(&x), 0);
            }
        }
    }

    #[test]
    fn satisfiable_generator() {
        let cnf = random_satisfiable_ksat(20, 91, 3, 1).unwrap();
        assert_eq!(cnf.clauses.len(), 91);
        assert!(cnf.clauses.iter().all(|c| c.len() == 3));
        assert!(find_model(&cnf).is_some());
    }
}
