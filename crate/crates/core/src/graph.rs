//! Undirected simple graphs on dense node indices, plus the connectivity
//! and rewiring primitives every generator builds on.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undirected simple graph on nodes `0..n`.
///
/// Neighbor lists are kept sorted, so two graphs with the same edge set
/// compare equal and serialize identically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    num_edges: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            num_edges: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting out-of-range endpoints,
    /// self-loops and duplicate edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at node {u}")));
            }
            if !g.add_edge(u, v) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(g)
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::new(n);
        for i in 1..n {
            g.add_edge(i - 1, i);
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::path(n);
        if n >= 3 {
            g.add_edge(n - 1, 0);
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Star with one hub (node 0) and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let mut g = Self::new(leaves + 1);
        for v in 1..=leaves {
            g.add_edge(0, v);
        }
        g
    }

    #[inline]
    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    #[inline]
    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    #[inline]
    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn sorted_degrees(&self) -> Vec<usize> {
        let mut d = self.degrees();
        d.sort_unstable();
        d
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Inserts `{u, v}`. Returns `false` when the edge already exists or is a
    /// self-loop.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        let Err(pos) = self.adj[u].binary_search(&v) else {
            return false;
        };
        self.adj[u].insert(pos, v);
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
        self.num_edges += 1;
        true
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        let Ok(pos) = self.adj[u].binary_search(&v) else {
            return false;
        };
        self.adj[u].remove(pos);
        let pos = self.adj[v].binary_search(&u).unwrap();
        self.adj[v].remove(pos);
        self.num_edges -= 1;
        true
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.num_edges);
        for (u, nbrs) in self.adj.iter().enumerate() {
            out.extend(nbrs.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    /// Subgraph induced by `nodes`, relabelled densely in the given order.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Graph {
        let mut index = vec![usize::MAX; self.num_nodes()];
        for (i, &v) in nodes.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::new(nodes.len());
        for (i, &u) in nodes.iter().enumerate() {
            for &v in &self.adj[u] {
                let j = index[v];
                if j != usize::MAX && i < j {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Applies the node relabelling `perm` (old index -> new index).
    pub fn permuted(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::new(self.num_nodes());
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }

    /// Disjoint union; nodes of `other` are shifted by `self.num_nodes()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let off = self.num_nodes();
        let mut g = self.clone();
        g.adj
            .extend(std::iter::repeat_n(Vec::new(), other.num_nodes()));
        for (u, v) in other.edges() {
            g.add_edge(u + off, v + off);
        }
        g
    }

    pub fn is_connected(&self) -> bool {
        connected_components(self).count <= 1
    }

    pub fn is_bipartite(&self) -> bool {
        let n = self.num_nodes();
        let mut side = vec![u8::MAX; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            if side[s] != u8::MAX {
                continue;
            }
            side[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if side[v] == u8::MAX {
                        side[v] = 1 - side[u];
                        queue.push_back(v);
                    } else if side[v] == side[u] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// All-pairs hop distances by repeated BFS; unreachable pairs are `None`.
    pub fn distance_matrix(&self) -> Vec<Vec<Option<usize>>> {
        let n = self.num_nodes();
        let mut out = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        for s in 0..n {
            let mut dist = vec![None; n];
            dist[s] = Some(0);
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                let du = dist[u].unwrap();
                for &v in &self.adj[u] {
                    if dist[v].is_none() {
                        dist[v] = Some(du + 1);
                        queue.push_back(v);
                    }
                }
            }
            out.push(dist);
        }
        out
    }
}

/// On-disk / wire form of a graph: node count plus sorted edge list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeList {
    pub num_nodes: usize,
    pub edges: Vec<[usize; 2]>,
}

impl From<&Graph> for EdgeList {
    fn from(g: &Graph) -> Self {
        Self {
            num_nodes: g.num_nodes(),
            edges: g.edges().into_iter().map(|(u, v)| [u, v]).collect(),
        }
    }
}

impl TryFrom<EdgeList> for Graph {
    type Error = Error;

    fn try_from(list: EdgeList) -> Result<Self> {
        let edges: Vec<_> = list.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_edges(list.num_nodes, &edges)
    }
}

/// Number of connected components plus a component id per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    pub count: usize,
    pub labels: Vec<usize>,
}

impl Components {
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (v, &c) in self.labels.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

/// Components are numbered in order of their smallest node.
pub fn connected_components(g: &Graph) -> Components {
    let n = g.num_nodes();
    let mut labels = vec![usize::MAX; n];
    let mut count = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if labels[s] != usize::MAX {
            continue;
        }
        labels[s] = count;
        stack.push(s);
        while let Some(u) = stack.pop() {
            for &v in g.neighbors(u) {
                if labels[v] == usize::MAX {
                    labels[v] = count;
                    stack.push(v);
                }
            }
        }
        count += 1;
    }
    Components { count, labels }
}

/// Joins components until the graph is connected. Each step picks two
/// distinct components at random and links one uniformly chosen node of
/// each. Returns the repaired graph and the number of edges added.
pub fn ensure_connected<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> (Graph, usize) {
    let mut out = g.clone();
    let mut groups = connected_components(g).members();
    let mut added = 0;
    while groups.len() > 1 {
        let a = rng.gen_range(0..groups.len());
        let mut b = rng.gen_range(0..groups.len() - 1);
        if b >= a {
            b += 1;
        }
        let u = *groups[a].choose(rng).unwrap();
        let v = *groups[b].choose(rng).unwrap();
        out.add_edge(u, v);
        added += 1;
        let (keep, drop) = (a.min(b), a.max(b));
        let merged = groups.swap_remove(drop);
        groups[keep].extend(merged);
    }
    (out, added)
}

/// Performs one successful double-edge swap: edges `(a, b)` and `(c, d)`
/// become `(a, d)` and `(c, b)`. Candidates that would create a self-loop
/// or an existing edge are rejected and redrawn, up to `max_attempts`.
pub fn double_edge_swap<R: Rng + ?Sized>(
    g: &Graph,
    rng: &mut R,
    max_attempts: usize,
) -> Result<Graph> {
    let edges = g.edges();
    if edges.len() < 2 {
        return Err(Error::InvalidGraph(
            "double-edge swap needs at least two edges".into(),
        ));
    }
    for _ in 0..max_attempts {
        if let Some((a, b, c, d)) = propose_swap(g, &edges, rng) {
            let mut out = g.clone();
            out.remove_edge(a, b);
            out.remove_edge(c, d);
            out.add_edge(a, d);
            out.add_edge(c, b);
            return Ok(out);
        }
    }
    Err(Error::Exhausted {
        what: "double-edge swap",
        attempts: max_attempts,
    })
}

/// Draws one swap candidate; `None` when it is illegal.
fn propose_swap<R: Rng + ?Sized>(
    g: &Graph,
    edges: &[(usize, usize)],
    rng: &mut R,
) -> Option<(usize, usize, usize, usize)> {
    let i = rng.gen_range(0..edges.len());
    let mut j = rng.gen_range(0..edges.len() - 1);
    if j >= i {
        j += 1;
    }
    let (a, b) = edges[i];
    let (mut c, mut d) = edges[j];
    if rng.gen_bool(0.5) {
        std::mem::swap(&mut c, &mut d);
    }
    swap_is_legal(g, a, b, c, d).then_some((a, b, c, d))
}

pub(crate) fn swap_is_legal(g: &Graph, a: usize, b: usize, c: usize, d: usize) -> bool {
    a != d && c != b && !g.has_edge(a, d) && !g.has_edge(c, b)
}

/// Applies `count` successful swaps in place, drawing at most
/// `max_attempts` candidates in total. Returns the number of attempts used.
pub fn rewire_in_place<R: Rng + ?Sized>(
    g: &mut Graph,
    count: usize,
    max_attempts: usize,
    rng: &mut R,
) -> Result<usize> {
    if count == 0 {
        return Ok(0);
    }
    if g.num_edges() < 2 {
        return Err(Error::InvalidGraph(
            "double-edge swap needs at least two edges".into(),
        ));
    }
    let mut edges = g.edges();
    let mut done = 0;
    let mut attempts = 0;
    while done < count {
        if attempts == max_attempts {
            return Err(Error::Exhausted {
                what: "rewiring swap budget",
                attempts,
            });
        }
        attempts += 1;
        let i = rng.gen_range(0..edges.len());
        let mut j = rng.gen_range(0..edges.len() - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = edges[i];
        let (mut c, mut d) = edges[j];
        if rng.gen_bool(0.5) {
            std::mem::swap(&mut c, &mut d);
        }
        if !swap_is_legal(g, a, b, c, d) {
            continue;
        }
        g.remove_edge(a, b);
        g.remove_edge(c, d);
        g.add_edge(a, d);
        g.add_edge(c, b);
        edges[i] = (a.min(d), a.max(d));
        edges[j] = (c.min(b), c.max(b));
        done += 1;
    }
    Ok(attempts)
}
