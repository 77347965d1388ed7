//! Simple undirected graphs and edge-list ingestion.
//!
//! A [`Graph`] is stored as a compressed adjacency list (CSR). It is immutable
//! after construction, so it can be shared freely between worker threads.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use crate::error::{Error, Result};

/// Immutable simple undirected graph on nodes `0..node_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    edge_count: usize,
    labels: Option<Vec<String>>,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges (in either
    /// orientation) are collapsed; self-loops and out-of-range endpoints are
    /// rejected.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if node_count == 0 {
            return Err(Error::Validation("graph has no nodes".into()));
        }
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (a, b) in edges {
            if a >= node_count || b >= node_count {
                return Err(Error::Validation(format!(
                    "edge ({a}, {b}) references a node outside 0..{node_count}"
                )));
            }
            if a == b {
                return Err(Error::Validation(format!("self-loop on node {a}")));
            }
            pairs.push((a.min(b), a.max(b)));
        }
        pairs.sort_unstable();
        pairs.dedup();

        let mut degree = vec![0usize; node_count];
        for &(a, b) in &pairs {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..node_count].to_vec();
        let mut neighbors = vec![0usize; 2 * pairs.len()];
        for &(a, b) in &pairs {
            neighbors[fill[a]] = b;
            fill[a] += 1;
            neighbors[fill[b]] = a;
            fill[b] += 1;
        }
        for v in 0..node_count {
            neighbors[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        Ok(Self {
            offsets,
            neighbors,
            edge_count: pairs.len(),
            labels: None,
        })
    }

    /// Attaches node labels (one per node), as produced by edge-list loading.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.node_count() {
            return Err(Error::Validation(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.node_count()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, node: usize) -> usize {
        self.offsets[node + 1] - self.offsets[node]
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.offsets.windows(2).map(|w| w[1] - w[0])
    }

    /// Sorted neighbor list of `node`.
    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[self.offsets[node]..self.offsets[node + 1]]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Each undirected edge once, as `(low, high)`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |a| {
            self.neighbors(a)
                .iter()
                .copied()
                .filter(move |&b| b > a)
                .map(move |b| (a, b))
        })
    }

    /// External name of a node: the edge-list token if the graph was loaded
    /// from text, otherwise the index itself.
    pub fn label(&self, node: usize) -> String {
        match &self.labels {
            Some(labels) => labels[node].clone(),
            None => node.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// `out = A · x`.
    pub fn adjacency_mul(&self, x: &[f64], out: &mut [f64]) {
        for (v, o) in out.iter_mut().enumerate() {
            *o = self.neighbors(v).iter().map(|&u| x[u]).sum();
        }
    }

    /// Number of connected components.
    pub fn component_count(&self) -> usize {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut stack = Vec::new();
        let mut count = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &u in self.neighbors(v) {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        count
    }

    /// True iff a traversal from node 0 reaches every node.
    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// Errors with [`Error::Disconnected`] unless the graph is connected.
    pub fn require_connected(&self) -> Result<()> {
        match self.component_count() {
            1 => Ok(()),
            components => Err(Error::Disconnected { components }),
        }
    }

    /// Same graph with nodes renamed by `perm` (node `v` becomes `perm[v]`).
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let n = self.node_count();
        let mut check = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut check[p], true)) {
            return Err(Error::Validation("relabeling is not a permutation".into()));
        }
        Self::from_edges(n, self.edges().map(|(a, b)| (perm[a], perm[b])))
    }
}

/// Mean degree and mean inverse degree, the inputs of the heuristics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeStats {
    /// E[d_i]
    pub mean_degree: f64,
    /// σ = (1/N) Σ 1/d_i
    pub inverse_degree_mean: f64,
    pub min_degree: usize,
    pub max_degree: usize,
}

impl DegreeStats {
    pub fn is_regular(&self) -> bool {
        self.min_degree == self.max_degree
    }
}

pub fn degree_stats(g: &Graph) -> Result<DegreeStats> {
    let n = g.node_count();
    let mut sum = 0usize;
    let mut inverse_sum = 0.0;
    let mut min_degree = usize::MAX;
    let mut max_degree = 0;
    for (v, d) in g.degrees().enumerate() {
        if d == 0 {
            return Err(Error::IsolatedNode { node: g.label(v) });
        }
        sum += d;
        inverse_sum += 1.0 / d as f64;
        min_degree = min_degree.min(d);
        max_degree = max_degree.max(d);
    }
    Ok(DegreeStats {
        mean_degree: sum as f64 / n as f64,
        inverse_degree_mean: inverse_sum / n as f64,
        min_degree,
        max_degree,
    })
}

/// Parses the edge-list text format: one edge per line as two
/// whitespace-separated tokens, `#` starts a comment, blank lines ignored.
/// Tokens become node indices in order of first appearance.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges: HashSet<(usize, usize)> = HashSet::new();
    let mut ordered: Vec<(usize, usize)> = Vec::new();

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let content = match line.find('#') {
            Some(pos) => &line[..pos],
            None => line.as_str(),
        };
        let mut tokens = content.split_whitespace();
        let (a, b) = match (tokens.next(), tokens.next(), tokens.next()) {
            (None, _, _) => continue,
            (Some(a), Some(b), None) => (a, b),
            (Some(_), None, _) => {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected two node tokens, found one".into(),
                })
            }
            (Some(_), Some(_), Some(_)) => {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected two node tokens, found more".into(),
                })
            }
        };
        if a == b {
            return Err(Error::Validation(format!("line {line_no}: self-loop on node '{a}'")));
        }
        let mut intern = |token: &str| -> usize {
            if let Some(&id) = index.get(token) {
                return id;
            }
            let id = labels.len();
            index.insert(token.to_owned(), id);
            labels.push(token.to_owned());
            id
        };
        let (u, v) = (intern(a), intern(b));
        if edges.insert((u.min(v), u.max(v))) {
            ordered.push((u, v));
        }
    }
    if labels.is_empty() {
        return Err(Error::Validation("edge list contains no edges".into()));
    }
    Graph::from_edges(labels.len(), ordered)?.with_labels(labels)
}

/// Writes `g` in the edge-list format, using node labels when present.
pub fn write_edge_list<W: std::io::Write>(g: &Graph, mut out: W) -> Result<()> {
    writeln!(out, "# nodes {} edges {}", g.node_count(), g.edge_count())?;
    for (a, b) in g.edges() {
        writeln!(out, "{} {}", g.label(a), g.label(b))?;
    }
    Ok(())
}
