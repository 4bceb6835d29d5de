//! Base graphs for the symmetry constructions: connected subgraphs sampled
//! from real edge-list files, or synthetic random graphs when none are
//! given.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ensure_connected, Graph};

pub const MIN_BASE_SIZE: usize = 5;
pub const MAX_BASE_SIZE: usize = 50;
pub const GRAPHS_PER_SIZE: usize = 30;
pub const RESTART_PROBABILITY: f64 = 0.2;
pub const LAYER_FANOUT: usize = 5;
pub const LAYER_DEPTH: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingStrategy {
    Bfs,
    RandomWalkRestart,
    LayeredNeighborhood,
    Synthetic,
}

#[derive(Debug, Clone)]
pub struct BaseGraph {
    pub graph: Graph,
    pub source: String,
    pub strategy: SamplingStrategy,
}

/// Connected base graphs bucketed by node count.
#[derive(Debug, Clone, Default)]
pub struct BaseGraphCorpus {
    buckets: BTreeMap<usize, Vec<BaseGraph>>,
}

impl BaseGraphCorpus {
    pub fn bucket(&self, size: usize) -> &[BaseGraph] {
        self.buckets.get(&size).map_or(&[], Vec::as_slice)
    }

    pub fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.buckets
            .iter()
            .filter(|(_, v)| !v.is_empty())
            .map(|(&k, _)| k)
    }

    pub fn len(&self) -> usize {
        self.buckets.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_synthetic(&self) -> bool {
        self.buckets
            .values()
            .flatten()
            .all(|b| b.strategy == SamplingStrategy::Synthetic)
    }

    /// A uniformly chosen graph with exactly `size` nodes.
    pub fn pick<R: Rng + ?Sized>(&self, size: usize, rng: &mut R) -> Option<&BaseGraph> {
        self.bucket(size).choose(rng)
    }

    fn push(&mut self, base: BaseGraph) {
        self.buckets
            .entry(base.graph.num_nodes())
            .or_default()
            .push(base);
    }
}

/// Where base graphs come from.
#[derive(Debug, Clone)]
pub enum CorpusSource {
    EdgeLists(Vec<PathBuf>),
    Synthetic,
}

/// Parses an edge list: two whitespace-separated non-negative integer ids
/// per line, `#` comments and blank lines ignored. Ids are relabelled to
/// `0..n` in ascending id order.
pub fn parse_edge_list(text: &str, path: &Path) -> Result<Graph> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let malformed = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let mut fields = line.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(malformed(format!("expected two node ids, got `{line}`")));
        };
        let a: u64 = a
            .parse()
            .map_err(|_| malformed(format!("invalid node id `{a}`")))?;
        let b: u64 = b
            .parse()
            .map_err(|_| malformed(format!("invalid node id `{b}`")))?;
        pairs.push((a, b));
    }
    if pairs.is_empty() {
        return Err(Error::EmptySource);
    }
    let mut ids: Vec<u64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index = |id: u64| ids.binary_search(&id).unwrap();
    let mut g = Graph::new(ids.len());
    for (a, b) in pairs {
        // Self-loops and repeated edges carry no structure for our purposes.
        g.add_edge(index(a), index(b));
    }
    Ok(g)
}

pub fn load_edge_list(path: &Path) -> Result<Graph> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, path)
}

/// First `size` nodes reached by breadth-first search from `root`.
pub fn bfs_sample(g: &Graph, root: usize, size: usize) -> Option<Vec<usize>> {
    let mut seen = HashSet::from([root]);
    let mut order = vec![root];
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in g.neighbors(u) {
            if order.len() == size {
                return Some(order);
            }
            if seen.insert(v) {
                order.push(v);
                queue.push_back(v);
            }
        }
    }
    (order.len() == size).then_some(order)
}

/// Random walk that jumps back to `root` with probability `restart` per
/// step, until `size` distinct nodes are visited.
pub fn random_walk_sample<R: Rng + ?Sized>(
    g: &Graph,
    root: usize,
    size: usize,
    restart: f64,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let mut seen = HashSet::from([root]);
    let mut order = vec![root];
    let mut at = root;
    let max_steps = 200 * size;
    for _ in 0..max_steps {
        if order.len() == size {
            return Some(order);
        }
        let (next, _) = walk_step(g, root, at, restart, rng)?;
        at = next;
        if seen.insert(at) {
            order.push(at);
        }
    }
    (order.len() == size).then_some(order)
}

/// One step of a restarting walk: back to `root` with probability
/// `restart`, otherwise to a uniform neighbour. The flag reports a restart.
pub(crate) fn walk_step<R: Rng + ?Sized>(
    g: &Graph,
    root: usize,
    at: usize,
    restart: f64,
    rng: &mut R,
) -> Option<(usize, bool)> {
    if rng.gen_bool(restart) {
        return Some((root, true));
    }
    g.neighbors(at).choose(rng).map(|&v| (v, false))
}

/// Layer-by-layer expansion keeping at most `fanout` unseen neighbours per
/// node, for up to `depth` layers.
pub fn layered_sample<R: Rng + ?Sized>(
    g: &Graph,
    root: usize,
    size: usize,
    fanout: usize,
    depth: usize,
    rng: &mut R,
) -> Option<Vec<usize>> {
    let mut seen = HashSet::from([root]);
    let mut order = vec![root];
    let mut frontier = vec![root];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &u in &frontier {
            let fresh: Vec<usize> = g
                .neighbors(u)
                .iter()
                .copied()
                .filter(|v| !seen.contains(v))
                .collect();
            for &v in fresh.choose_multiple(rng, fanout) {
                if order.len() == size {
                    return Some(order);
                }
                seen.insert(v);
                order.push(v);
                next.push(v);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    (order.len() == size).then_some(order)
}

fn finish<R: Rng + ?Sized>(g: &Graph, nodes: &[usize], rng: &mut R) -> Graph {
    let sub = g.induced_subgraph(nodes);
    ensure_connected(&sub, rng).0
}

/// Builds the corpus with [`GRAPHS_PER_SIZE`] graphs per size in
/// `MIN_BASE_SIZE..=MAX_BASE_SIZE`, cycling through the three sampling
/// strategies for file sources.
pub fn sample_base_graphs<R: Rng + ?Sized>(
    source: &CorpusSource,
    rng: &mut R,
) -> Result<BaseGraphCorpus> {
    sample_base_graphs_with(source, GRAPHS_PER_SIZE, rng)
}

pub fn sample_base_graphs_with<R: Rng + ?Sized>(
    source: &CorpusSource,
    per_size: usize,
    rng: &mut R,
) -> Result<BaseGraphCorpus> {
    let mut corpus = BaseGraphCorpus::default();
    match source {
        CorpusSource::Synthetic => {
            for size in MIN_BASE_SIZE..=MAX_BASE_SIZE {
                for _ in 0..per_size {
                    corpus.push(BaseGraph {
                        graph: synthetic_base(size, rng),
                        source: "synthetic".into(),
                        strategy: SamplingStrategy::Synthetic,
                    });
                }
            }
        }
        CorpusSource::EdgeLists(paths) => {
            if paths.is_empty() {
                return Err(Error::EmptySource);
            }
            let graphs = paths
                .iter()
                .map(|p| {
                    let name = p.file_name().map_or_else(
                        || p.display().to_string(),
                        |n| n.to_string_lossy().into_owned(),
                    );
                    load_edge_list(p).map(|g| (name, g))
                })
                .collect::<Result<Vec<_>>>()?;
            for size in MIN_BASE_SIZE..=MAX_BASE_SIZE {
                for slot in 0..per_size {
                    let strategy = match slot % 3 {
                        0 => SamplingStrategy::Bfs,
                        1 => SamplingStrategy::RandomWalkRestart,
                        _ => SamplingStrategy::LayeredNeighborhood,
                    };
                    let (name, g) = &graphs[rng.gen_range(0..graphs.len())];
                    if let Some(graph) = sample_one(g, size, strategy, rng) {
                        corpus.push(BaseGraph {
                            graph,
                            source: name.clone(),
                            strategy,
                        });
                    }
                }
            }
        }
    }
    Ok(corpus)
}

const ROOT_TRIES: usize = 20;

fn sample_one<R: Rng + ?Sized>(
    g: &Graph,
    size: usize,
    strategy: SamplingStrategy,
    rng: &mut R,
) -> Option<Graph> {
    if g.num_nodes() < size {
        return None;
    }
    for _ in 0..ROOT_TRIES {
        let root = rng.gen_range(0..g.num_nodes());
        let nodes = match strategy {
            SamplingStrategy::Bfs => bfs_sample(g, root, size),
            SamplingStrategy::RandomWalkRestart => {
                random_walk_sample(g, root, size, RESTART_PROBABILITY, rng)
            }
            SamplingStrategy::LayeredNeighborhood => {
                layered_sample(g, root, size, LAYER_FANOUT, LAYER_DEPTH, rng)
            }
            SamplingStrategy::Synthetic => unreachable!(),
        };
        if let Some(nodes) = nodes {
            return Some(finish(g, &nodes, rng));
        }
    }
    None
}

/// Random graph with edge probability a little above the connectivity
/// threshold, repaired to be connected.
pub fn synthetic_base<R: Rng + ?Sized>(size: usize, rng: &mut R) -> Graph {
    let s = size as f64;
    let p = (1.2 * s.ln() / s).clamp(0.12, 0.6);
    let mut g = Graph::new(size);
    for u in 0..size {
        for v in u + 1..size {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    ensure_connected(&g, rng).0
}
