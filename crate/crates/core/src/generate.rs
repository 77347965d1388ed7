//! Deterministic and seeded random topology generators.
//!
//! Random families draw from a ChaCha8 stream seeded with the caller's seed,
//! so the same spec always yields the same graph on every platform.

use std::collections::HashSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

const REGULAR_ATTEMPTS: usize = 1000;

/// Generator description for one topology family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkSpec {
    Ring {
        nodes: usize,
    },
    RandomRegular {
        nodes: usize,
        degree: usize,
        seed: u64,
    },
    CompleteBipartite {
        left: usize,
        right: usize,
    },
    Petersen,
    Grid2d {
        rows: usize,
        cols: usize,
    },
    /// Fixed edge count G(N, L).
    ErdosRenyi {
        nodes: usize,
        links: usize,
        seed: u64,
    },
    PreferentialAttachment {
        nodes: usize,
        links_target: usize,
        seed: u64,
    },
}

impl NetworkSpec {
    pub fn is_random(&self) -> bool {
        matches!(
            self,
            Self::RandomRegular { .. } | Self::ErdosRenyi { .. } | Self::PreferentialAttachment { .. }
        )
    }

    /// Same spec with the seed replaced; deterministic families are returned unchanged.
    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            Self::RandomRegular { nodes, degree, .. } => Self::RandomRegular { nodes, degree, seed },
            Self::ErdosRenyi { nodes, links, .. } => Self::ErdosRenyi { nodes, links, seed },
            Self::PreferentialAttachment {
                nodes, links_target, ..
            } => Self::PreferentialAttachment {
                nodes,
                links_target,
                seed,
            },
            other => other,
        }
    }

    /// Parses `family[:p1,p2,...]` or `family(p1,p2,...)`, e.g. `ring:1000`,
    /// `bipartite:2,8`, `grid2d(30,30)`. Random families take their seed from
    /// `seed` and fail without one.
    pub fn parse(text: &str, seed: Option<u64>) -> Result<Self> {
        let trimmed = text.trim();
        let call = trimmed.strip_suffix(')').and_then(|t| t.split_once('('));
        let (family, params) = match call.or_else(|| trimmed.split_once(':')) {
            Some((f, p)) => (f.trim(), p.trim()),
            None => (trimmed, ""),
        };
        let values: Vec<usize> = if params.is_empty() {
            Vec::new()
        } else {
            params
                .split(',')
                .map(|p| {
                    p.trim().parse::<usize>().map_err(|_| {
                        Error::Validation(format!("generator '{text}': '{p}' is not a non-negative integer"))
                    })
                })
                .collect::<Result<_>>()?
        };
        let arity = |n: usize| -> Result<()> {
            if values.len() == n {
                Ok(())
            } else {
                Err(Error::Validation(format!(
                    "generator '{family}' takes {n} parameter(s), got {}",
                    values.len()
                )))
            }
        };
        let need_seed =
            || seed.ok_or_else(|| Error::Validation(format!("generator '{family}' is random and requires a seed")));
        let spec = match family {
            "ring" | "cycle" => {
                arity(1)?;
                Self::Ring { nodes: values[0] }
            }
            "regular" | "random_regular" => {
                arity(2)?;
                Self::RandomRegular {
                    nodes: values[0],
                    degree: values[1],
                    seed: need_seed()?,
                }
            }
            "bipartite" | "complete_bipartite" => {
                arity(2)?;
                Self::CompleteBipartite {
                    left: values[0],
                    right: values[1],
                }
            }
            "petersen" => {
                arity(0)?;
                Self::Petersen
            }
            "grid" | "grid2d" => {
                arity(2)?;
                Self::Grid2d {
                    rows: values[0],
                    cols: values[1],
                }
            }
            "er" | "erdos_renyi" | "erdos_renyi_nl" => {
                arity(2)?;
                Self::ErdosRenyi {
                    nodes: values[0],
                    links: values[1],
                    seed: need_seed()?,
                }
            }
            "pa" | "ba" | "preferential_attachment" => {
                arity(2)?;
                Self::PreferentialAttachment {
                    nodes: values[0],
                    links_target: values[1],
                    seed: need_seed()?,
                }
            }
            other => return Err(Error::Validation(format!("unknown generator family '{other}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the family's feasibility constraints.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        match *self {
            Self::Ring { nodes } if nodes < 3 => fail(format!("ring needs at least 3 nodes, got {nodes}")),
            Self::RandomRegular { nodes, degree, .. } => {
                if degree == 0 || degree >= nodes {
                    fail(format!("random_regular({nodes}, {degree}) needs 1 <= k < N"))
                } else if (nodes * degree) % 2 != 0 {
                    fail(format!("random_regular({nodes}, {degree}) needs N*k even"))
                } else if degree == 1 && nodes > 2 {
                    fail("random_regular with k = 1 is a matching and cannot be connected".into())
                } else {
                    Ok(())
                }
            }
            Self::CompleteBipartite { left, right } if left == 0 || right == 0 => fail(format!(
                "complete_bipartite({left}, {right}) needs both sides non-empty"
            )),
            Self::Grid2d { rows, cols } if rows == 0 || cols == 0 || rows * cols < 2 => {
                fail(format!("grid2d({rows}, {cols}) needs at least 2 nodes"))
            }
            Self::ErdosRenyi { nodes, links, .. } => {
                let max = nodes * nodes.saturating_sub(1) / 2;
                if nodes < 2 {
                    fail("erdos_renyi needs at least 2 nodes".into())
                } else if links > max {
                    fail(format!("erdos_renyi({nodes}, {links}): L exceeds N(N-1)/2 = {max}"))
                } else if links + 1 < nodes {
                    fail(format!("erdos_renyi({nodes}, {links}): L < N-1 cannot be connected"))
                } else {
                    Ok(())
                }
            }
            Self::PreferentialAttachment {
                nodes, links_target, ..
            } => {
                let m = attachment_links(nodes, links_target);
                if nodes < m + 2 {
                    fail(format!(
                        "preferential_attachment({nodes}, {links_target}) needs N >= m + 2 with m = {m}"
                    ))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for NetworkSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Ring { nodes } => write!(f, "ring:{nodes}"),
            Self::RandomRegular { nodes, degree, .. } => write!(f, "regular:{nodes},{degree}"),
            Self::CompleteBipartite { left, right } => write!(f, "bipartite:{left},{right}"),
            Self::Petersen => write!(f, "petersen"),
            Self::Grid2d { rows, cols } => write!(f, "grid:{rows},{cols}"),
            Self::ErdosRenyi { nodes, links, .. } => write!(f, "er:{nodes},{links}"),
            Self::PreferentialAttachment {
                nodes, links_target, ..
            } => write!(f, "pa:{nodes},{links_target}"),
        }
    }
}

/// A generated graph plus bookkeeping about how it was obtained.
#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: Graph,
    /// Pairing attempts (random regular); 1 for every other family.
    pub attempts: usize,
    /// Edges moved to connect a G(N, L) sample.
    pub rewired_edges: usize,
}

pub fn generate(spec: &NetworkSpec) -> Result<Graph> {
    generate_detailed(spec).map(|g| g.graph)
}

pub fn generate_detailed(spec: &NetworkSpec) -> Result<Generated> {
    spec.validate()?;
    let simple = |graph: Graph| Generated {
        graph,
        attempts: 1,
        rewired_edges: 0,
    };
    match *spec {
        NetworkSpec::Ring { nodes } => Graph::from_edges(nodes, (0..nodes).map(|i| (i, (i + 1) % nodes))).map(simple),
        NetworkSpec::Petersen => petersen().map(simple),
        NetworkSpec::CompleteBipartite { left, right } => Graph::from_edges(
            left + right,
            (0..left).flat_map(|a| (0..right).map(move |b| (a, left + b))),
        )
        .map(simple),
        NetworkSpec::Grid2d { rows, cols } => grid2d(rows, cols).map(simple),
        NetworkSpec::RandomRegular { nodes, degree, seed } => random_regular(nodes, degree, seed),
        NetworkSpec::ErdosRenyi { nodes, links, seed } => erdos_renyi(nodes, links, seed),
        NetworkSpec::PreferentialAttachment {
            nodes,
            links_target,
            seed,
        } => preferential_attachment(nodes, links_target, seed).map(simple),
    }
}

fn petersen() -> Result<Graph> {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let spokes = (0..5).map(|i| (i, i + 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    Graph::from_edges(10, outer.chain(spokes).chain(inner))
}

/// Open-boundary lattice; node `(r, c)` has index `r * cols + c`.
fn grid2d(rows: usize, cols: usize) -> Result<Graph> {
    let mut edges = Vec::with_capacity(2 * rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    Graph::from_edges(rows * cols, edges)
}

fn random_regular(nodes: usize, degree: usize, seed: u64) -> Result<Generated> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=REGULAR_ATTEMPTS {
        if let Some(edges) = try_pairing(nodes, degree, &mut rng) {
            let graph = Graph::from_edges(nodes, edges)?;
            if graph.is_connected() {
                return Ok(Generated {
                    graph,
                    attempts: attempt,
                    rewired_edges: 0,
                });
            }
        }
    }
    Err(Error::Generation(format!(
        "random_regular({nodes}, {degree}): no simple connected pairing in {REGULAR_ATTEMPTS} attempts"
    )))
}

/// One pass of the pairing model: stubs are matched at random, re-drawing a
/// pair that would create a loop or a multi-edge. Gives up when re-draws
/// keep failing.
fn try_pairing(nodes: usize, degree: usize, rng: &mut ChaCha8Rng) -> Option<Vec<(usize, usize)>> {
    let mut stubs: Vec<usize> = (0..nodes).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
    let mut present: HashSet<(usize, usize)> = HashSet::with_capacity(nodes * degree / 2);
    let mut edges = Vec::with_capacity(nodes * degree / 2);
    while !stubs.is_empty() {
        let budget = 50 + 4 * stubs.len();
        let mut placed = false;
        for _ in 0..budget {
            let i = rng.gen_range(0..stubs.len());
            let j = rng.gen_range(0..stubs.len());
            let (u, v) = (stubs[i], stubs[j]);
            if i == j || u == v || present.contains(&(u.min(v), u.max(v))) {
                continue;
            }
            present.insert((u.min(v), u.max(v)));
            edges.push((u, v));
            let (hi, lo) = (i.max(j), i.min(j));
            stubs.swap_remove(hi);
            stubs.swap_remove(lo);
            placed = true;
            break;
        }
        if !placed {
            return None;
        }
    }
    Some(edges)
}

/// Uniform G(N, L), then connected by rewiring: while more than one
/// component remains, a random non-bridge edge `(a, b)` of the largest
/// component (any component if the largest is a tree) is replaced by
/// `(a, u)` with `u` drawn from the nodes outside that component. Node and
/// edge counts are preserved.
fn erdos_renyi(nodes: usize, links: usize, seed: u64) -> Result<Generated> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max = nodes * (nodes - 1) / 2;
    let mut edges: Vec<(usize, usize)> = if 2 * links > max {
        let mut all: Vec<(usize, usize)> = (0..nodes).flat_map(|a| (a + 1..nodes).map(move |b| (a, b))).collect();
        all.partial_shuffle(&mut rng, links);
        all.truncate(links);
        all
    } else {
        let mut chosen = HashSet::with_capacity(links);
        let mut order = Vec::with_capacity(links);
        while order.len() < links {
            let a = rng.gen_range(0..nodes);
            let b = rng.gen_range(0..nodes);
            if a == b {
                continue;
            }
            let e = (a.min(b), a.max(b));
            if chosen.insert(e) {
                order.push(e);
            }
        }
        order
    };

    let mut rewired = 0;
    loop {
        let adj = AdjacencySets::new(nodes, &edges);
        let (label, sizes) = adj.components();
        if sizes.len() == 1 {
            break;
        }
        let largest = (0..sizes.len())
            .max_by_key(|&c| (sizes[c], std::cmp::Reverse(c)))
            .unwrap();
        let bridges = adj.bridges();
        let removable: Vec<usize> = (0..edges.len()).filter(|i| !bridges.contains(&edges[*i])).collect();
        let in_largest: Vec<usize> = removable
            .iter()
            .copied()
            .filter(|&i| label[edges[i].0] == largest)
            .collect();
        let pool = if in_largest.is_empty() { &removable } else { &in_largest };
        if pool.is_empty() {
            return Err(Error::Generation(format!(
                "erdos_renyi({nodes}, {links}): no non-bridge edge left to rewire"
            )));
        }
        let slot = pool[rng.gen_range(0..pool.len())];
        let (mut a, mut b) = edges[slot];
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut a, &mut b);
        }
        let outside: Vec<usize> = (0..nodes).filter(|&v| label[v] != label[a]).collect();
        let u = outside[rng.gen_range(0..outside.len())];
        edges[slot] = (a.min(u), a.max(u));
        rewired += 1;
    }
    let graph = Graph::from_edges(nodes, edges)?;
    Ok(Generated {
        graph,
        attempts: 1,
        rewired_edges: rewired,
    })
}

fn attachment_links(nodes: usize, links_target: usize) -> usize {
    ((links_target as f64 / nodes.max(1) as f64).round() as usize).max(1)
}

/// Grows from a clique on `m + 1` nodes; each new node links to `m`
/// distinct existing nodes chosen proportionally to degree. The achieved
/// edge count is `C(m+1, 2) + (N - m - 1) m`.
fn preferential_attachment(nodes: usize, links_target: usize, seed: u64) -> Result<Graph> {
    let m = attachment_links(nodes, links_target);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    // one entry per edge endpoint, so a uniform draw is degree-proportional
    let mut endpoints = Vec::new();
    for a in 0..=m {
        for b in a + 1..=m {
            edges.push((a, b));
            endpoints.push(a);
            endpoints.push(b);
        }
    }
    for v in m + 1..nodes {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            edges.push((t, v));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    Graph::from_edges(nodes, edges)
}

/// Plain adjacency lists used while repairing G(N, L) samples.
struct AdjacencySets {
    adj: Vec<Vec<usize>>,
}

impl AdjacencySets {
    fn new(nodes: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); nodes];
        for &(a, b) in edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        Self { adj }
    }

    fn components(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.adj.len();
        let mut label = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            let c = sizes.len();
            let mut size = 0;
            let mut stack = vec![s];
            label[s] = c;
            while let Some(v) = stack.pop() {
                size += 1;
                for &u in &self.adj[v] {
                    if label[u] == usize::MAX {
                        label[u] = c;
                        stack.push(u);
                    }
                }
            }
            sizes.push(size);
        }
        (label, sizes)
    }

    /// Bridges as `(low, high)` pairs, via iterative low-link DFS.
    fn bridges(&self) -> HashSet<(usize, usize)> {
        let n = self.adj.len();
        let mut disc = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut bridges = HashSet::new();
        let mut timer = 0;
        for root in 0..n {
            if disc[root] != usize::MAX {
                continue;
            }
            // (node, parent, next neighbor position)
            let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
            disc[root] = timer;
            low[root] = timer;
            timer += 1;
            while let Some(&mut (v, parent, ref mut pos)) = stack.last_mut() {
                if *pos < self.adj[v].len() {
                    let u = self.adj[v][*pos];
                    *pos += 1;
                    if u == parent {
                        continue;
                    }
                    if disc[u] == usize::MAX {
                        disc[u] = timer;
                        low[u] = timer;
                        timer += 1;
                        stack.push((u, v, 0));
                    } else {
                        low[v] = low[v].min(disc[u]);
                    }
                } else {
                    stack.pop();
                    if parent != usize::MAX {
                        low[parent] = low[parent].min(low[v]);
                        if low[v] > disc[parent] {
                            bridges.insert((v.min(parent), v.max(parent)));
                        }
                    }
                }
            }
        }
        bridges
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::degree_stats;

    #[test]
    fn petersen_is_cubic() {
        let g = generate(&NetworkSpec::Petersen).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (10, 15));
        assert!(g.degrees().all(|d| d == 3));
        assert!(g.is_connected());
    }

    #[test]
    fn complete_bipartite_two_eight() {
        let g = generate(&NetworkSpec::CompleteBipartite { left: 2, right: 8 }).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (10, 16));
        let mut degrees: Vec<usize> = g.degrees().collect();
        degrees.sort_unstable();
        assert_eq!(degrees, vec![2, 2, 2, 2, 2, 2, 2, 2, 8, 8]);
    }

    #[test]
    fn grid_counts() {
        let g = generate(&NetworkSpec::Grid2d { rows: 30, cols: 30 }).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (900, 1740));
    }

    #[test]
    fn erdos_renyi_exact_link_count() {
        let spec = NetworkSpec::ErdosRenyi {
            nodes: 1000,
            links: 2009,
            seed: 3,
        };
        let out = generate_detailed(&spec).unwrap();
        let g = &out.graph;
        assert_eq!((g.node_count(), g.edge_count()), (1000, 2009));
        assert!(g.is_connected());
        assert!(out.rewired_edges > 0);
        let stats = degree_stats(g).unwrap();
        assert!((stats.mean_degree - 4.018).abs() < 1e-12);
    }

    #[test]
    fn erdos_renyi_dense_branch() {
        let g = generate(&NetworkSpec::ErdosRenyi {
            nodes: 8,
            links: 27,
            seed: 1,
        })
        .unwrap();
        assert_eq!(g.edge_count(), 27);
        assert!(g.is_connected());
    }

    #[test]
    fn erdos_renyi_tree_budget() {
        // L = N - 1 forces every repair to end in a spanning tree
        let g = generate(&NetworkSpec::ErdosRenyi {
            nodes: 40,
            links: 39,
            seed: 9,
        })
        .unwrap();
        assert_eq!(g.edge_count(), 39);
        assert!(g.is_connected());
    }

    #[test]
    fn seeded_families_are_reproducible() {
        for spec in [
            NetworkSpec::ErdosRenyi {
                nodes: 200,
                links: 500,
                seed: 42,
            },
            NetworkSpec::RandomRegular {
                nodes: 50,
                degree: 4,
                seed: 42,
            },
            NetworkSpec::PreferentialAttachment {
                nodes: 300,
                links_target: 600,
                seed: 42,
            },
        ] {
            assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
            assert_ne!(generate(&spec).unwrap(), generate(&spec.with_seed(43)).unwrap());
        }
    }

    #[test]
    fn random_regular_degrees() {
        let g = generate(&NetworkSpec::RandomRegular {
            nodes: 100,
            degree: 3,
            seed: 7,
        })
        .unwrap();
        assert_eq!(g.edge_count(), 150);
        assert!(g.degrees().all(|d| d == 3));
        assert!(g.is_connected());
    }

    #[test]
    fn preferential_attachment_link_count() {
        let g = generate(&NetworkSpec::PreferentialAttachment {
            nodes: 1000,
            links_target: 1049,
            seed: 5,
        })
        .unwrap();
        assert_eq!(g.edge_count(), 999);
        assert!(g.is_connected());
        let g = generate(&NetworkSpec::PreferentialAttachment {
            nodes: 100,
            links_target: 300,
            seed: 5,
        })
        .unwrap();
        assert_eq!(g.edge_count(), 6 + 96 * 3);
    }

    #[test]
    fn infeasible_parameters() {
        for text in [
            "regular:5,3",
            "regular:4,4",
            "ring:2",
            "bipartite:0,3",
            "er:10,46",
            "er:10,5",
            "grid:1,1",
        ] {
            assert!(
                matches!(NetworkSpec::parse(text, Some(1)), Err(Error::Validation(_))),
                "{text}"
            );
        }
        assert!(NetworkSpec::parse("er:100,200", None).is_err());
        assert!(NetworkSpec::parse("hypercube:3", None).is_err());
        assert!(NetworkSpec::parse("ring:x", None).is_err());
    }

    #[test]
    fn parse_and_display() {
        let spec = NetworkSpec::parse("bipartite:10,90", None).unwrap();
        assert_eq!(spec, NetworkSpec::CompleteBipartite { left: 10, right: 90 });
        assert_eq!(spec.to_string(), "bipartite:10,90");
        assert_eq!(
            NetworkSpec::parse("er:1000,2009", Some(4)).unwrap(),
            NetworkSpec::ErdosRenyi {
                nodes: 1000,
                links: 2009,
                seed: 4
            }
        );
        assert_eq!(NetworkSpec::parse("petersen", None).unwrap(), NetworkSpec::Petersen);
        assert_eq!(
            NetworkSpec::parse("grid2d(30, 30)", None).unwrap(),
            NetworkSpec::Grid2d { rows: 30, cols: 30 }
        );
        assert!(NetworkSpec::parse("ring:2", None).is_err());
        assert!(NetworkSpec::parse("er:10,20", None).is_err());
    }

    #[test]
    fn bridge_finder() {
        // triangle 0-1-2 with a pendant path 2-3-4
        let adj = AdjacencySets::new(5, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]);
        let bridges = adj.bridges();
        assert_eq!(bridges, HashSet::from([(2, 3), (3, 4)]));
    }
}
