//! The six topology families. Every generator draws its own parameters
//! from the family's ranges, records them, and repairs connectivity.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::graph::{ensure_connected, Graph};

/// A generated graph together with the parameters that produced it.
#[derive(Debug, Clone)]
pub struct Generated {
    pub graph: Graph,
    pub params: Map<String, Value>,
    /// Edges added by connectivity repair.
    pub repairs: usize,
}

impl Generated {
    fn repaired<R: Rng + ?Sized>(raw: Graph, params: Map<String, Value>, rng: &mut R) -> Self {
        let (graph, repairs) = ensure_connected(&raw, rng);
        Self {
            graph,
            params,
            repairs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyFamily {
    Cyclic,
    Geometric,
    Community,
    Hierarchical,
    Bottleneck,
    Multicore,
}

impl TopologyFamily {
    pub const ALL: [TopologyFamily; 6] = [
        TopologyFamily::Cyclic,
        TopologyFamily::Geometric,
        TopologyFamily::Community,
        TopologyFamily::Hierarchical,
        TopologyFamily::Bottleneck,
        TopologyFamily::Multicore,
    ];

    /// Families used for bridge counting (everything but the annulus).
    pub const BRIDGE: [TopologyFamily; 5] = [
        TopologyFamily::Geometric,
        TopologyFamily::Community,
        TopologyFamily::Hierarchical,
        TopologyFamily::Bottleneck,
        TopologyFamily::Multicore,
    ];

    /// Class id for topology classification.
    pub fn class_id(self) -> usize {
        Self::ALL.iter().position(|&f| f == self).unwrap()
    }

    pub fn from_class_id(id: usize) -> Option<Self> {
        Self::ALL.get(id).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TopologyFamily::Cyclic => "cyclic",
            TopologyFamily::Geometric => "geometric",
            TopologyFamily::Community => "community",
            TopologyFamily::Hierarchical => "hierarchical",
            TopologyFamily::Bottleneck => "bottleneck",
            TopologyFamily::Multicore => "multicore",
        }
    }

    pub fn min_nodes(self) -> usize {
        match self {
            TopologyFamily::Cyclic | TopologyFamily::Geometric => 4,
            TopologyFamily::Community => 9,
            TopologyFamily::Hierarchical => 6,
            TopologyFamily::Bottleneck => 8,
            TopologyFamily::Multicore => 10,
        }
    }

    pub fn generate<R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> Result<Generated> {
        if n < self.min_nodes() {
            return Err(Error::InvalidParameter(format!(
                "{self} needs at least {} nodes, got {n}",
                self.min_nodes()
            )));
        }
        Ok(match self {
            TopologyFamily::Cyclic => gen_annular_geometric(n, rng),
            TopologyFamily::Geometric => gen_random_geometric(n, rng),
            TopologyFamily::Community => gen_community(n, rng),
            TopologyFamily::Hierarchical => gen_hierarchical(n, rng),
            TopologyFamily::Bottleneck => gen_bottleneck(n, None, rng),
            TopologyFamily::Multicore => gen_multicore(n, rng)?,
        })
    }
}

impl fmt::Display for TopologyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TopologyFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown topology family `{s}`")))
    }
}

/// Edges between every pair of points at Euclidean distance `<= radius`.
pub fn geometric_edges(points: &[[f64; 2]], radius: f64) -> Graph {
    let n = points.len();
    let r2 = radius * radius;
    let mut g = Graph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let dx = points[i][0] - points[j][0];
            let dy = points[i][1] - points[j][1];
            if dx * dx + dy * dy <= r2 {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Uniform points in the annulus `inner <= |p| <= outer`, by rejection
/// from the bounding square.
pub fn annulus_points<R: Rng + ?Sized>(
    n: usize,
    inner: f64,
    outer: f64,
    rng: &mut R,
) -> Vec<[f64; 2]> {
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let x = rng.gen_range(-outer..=outer);
        let y = rng.gen_range(-outer..=outer);
        let r = (x * x + y * y).sqrt();
        if r >= inner && r <= outer {
            pts.push([x, y]);
        }
    }
    pts
}

pub fn unit_square_points<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<[f64; 2]> {
    (0..n)
        .map(|_| [rng.gen::<f64>(), rng.gen::<f64>()])
        .collect()
}

pub fn gen_annular_geometric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Generated {
    let inner = rng.gen_range(0.7..=1.2);
    let outer = inner + rng.gen_range(0.05..=0.3);
    let radius = rng.gen_range(0.5..=0.8);
    let pts = annulus_points(n, inner, outer, rng);
    let params = params(json!({
        "inner_radius": inner,
        "outer_radius": outer,
        "connection_radius": radius,
    }));
    Generated::repaired(geometric_edges(&pts, radius), params, rng)
}

pub fn gen_random_geometric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Generated {
    let radius = rng.gen_range(0.15..=0.25);
    let pts = unit_square_points(n, rng);
    let params = params(json!({ "connection_radius": radius }));
    Generated::repaired(geometric_edges(&pts, radius), params, rng)
}

/// Splits `n` into `k` parts whose sizes differ by at most one, larger
/// parts first.
pub fn balanced_sizes(n: usize, k: usize) -> Vec<usize> {
    let (q, r) = (n / k, n % k);
    (0..k).map(|i| q + usize::from(i < r)).collect()
}

/// Block model on consecutive node ranges with independent Bernoulli edges.
pub fn block_model<R: Rng + ?Sized>(sizes: &[usize], p_in: f64, p_out: f64, rng: &mut R) -> Graph {
    let n: usize = sizes.iter().sum();
    let block = block_ids(sizes);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            let p = if block[u] == block[v] { p_in } else { p_out };
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

pub(crate) fn block_ids(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect()
}

fn block_starts(sizes: &[usize]) -> Vec<usize> {
    sizes
        .iter()
        .scan(0, |acc, &s| {
            let start = *acc;
            *acc += s;
            Some(start)
        })
        .collect()
}

pub fn gen_community<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Generated {
    let max_groups = (n / 3).clamp(3, 5);
    let groups = rng.gen_range(3..=max_groups);
    let p_in = rng.gen_range(0.6..=0.8);
    let p_out = rng.gen_range(0.01..=0.05);
    gen_community_with(n, groups, p_in, p_out, rng)
}

pub fn gen_community_with<R: Rng + ?Sized>(
    n: usize,
    groups: usize,
    p_in: f64,
    p_out: f64,
    rng: &mut R,
) -> Generated {
    let sizes = balanced_sizes(n, groups);
    let raw = block_model(&sizes, p_in, p_out, rng);
    let params = params(json!({
        "groups": groups,
        "group_sizes": sizes,
        "p_in": p_in,
        "p_out": p_out,
    }));
    Generated::repaired(raw, params, rng)
}

/// Level sizes from the top level down. Each level above the bottom is
/// 0.4 times the one below it (at least one node); the bottom level takes
/// the remainder.
pub fn hierarchical_level_sizes(n: usize, levels: usize) -> Vec<usize> {
    let weights: Vec<f64> = (0..levels)
        .map(|l| 0.4f64.powi((levels - 1 - l) as i32))
        .collect();
    let total: f64 = weights.iter().sum();
    let mut sizes: Vec<usize> = weights[..levels - 1]
        .iter()
        .map(|w| ((n as f64 * w / total).floor() as usize).max(1))
        .collect();
    let used: usize = sizes.iter().sum();
    sizes.push(n - used);
    sizes
}

pub fn gen_hierarchical<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Generated {
    let levels = rng.gen_range(2..=4);
    gen_hierarchical_with_levels(n, levels, rng)
}

/// Raw (pre-repair) hierarchical graph with its level sizes.
pub fn hierarchical_raw<R: Rng + ?Sized>(
    n: usize,
    levels: usize,
    rng: &mut R,
) -> (Graph, Vec<usize>, Vec<usize>) {
    let sizes = hierarchical_level_sizes(n, levels);
    let starts = block_starts(&sizes);
    let mut uplinks = Vec::with_capacity(n);
    let mut g = Graph::new(n);
    for (level, (&size, &start)) in sizes.iter().zip(&starts).enumerate() {
        let p = 0.7 * (levels - level) as f64 / levels as f64;
        for u in start..start + size {
            for v in u + 1..start + size {
                if rng.gen_bool(p) {
                    g.add_edge(u, v);
                }
            }
        }
        if level == 0 {
            uplinks.extend(std::iter::repeat_n(0, size));
            continue;
        }
        let (up_start, up_size) = (starts[level - 1], sizes[level - 1]);
        for u in start..start + size {
            let k = rng.gen_range(1..=3).min(up_size);
            for i in sample(rng, up_size, k) {
                g.add_edge(u, up_start + i);
            }
            uplinks.push(k);
        }
    }
    (g, sizes, uplinks)
}

pub fn gen_hierarchical_with_levels<R: Rng + ?Sized>(
    n: usize,
    levels: usize,
    rng: &mut R,
) -> Generated {
    let (raw, sizes, _) = hierarchical_raw(n, levels, rng);
    let params = params(json!({ "levels": levels, "level_sizes": sizes }));
    Generated::repaired(raw, params, rng)
}

/// Pre-repair bottleneck graph plus the inter-block edges added between
/// each pair of adjacent blocks.
#[derive(Debug, Clone)]
pub struct BottleneckRaw {
    pub graph: Graph,
    pub block_sizes: Vec<usize>,
    pub width: usize,
    pub p_in: f64,
    pub links: Vec<Vec<(usize, usize)>>,
}

/// `width` fixes the number of edges between adjacent blocks; `None`
/// draws it from 1..=3.
pub fn bottleneck_raw<R: Rng + ?Sized>(
    n: usize,
    width: Option<usize>,
    rng: &mut R,
) -> BottleneckRaw {
    let max_blocks = (n / 4).clamp(2, 4);
    let blocks = rng.gen_range(2..=max_blocks);
    let p_in = rng.gen_range(0.4..=0.6);
    let width = width.unwrap_or_else(|| rng.gen_range(1..=3));
    let sizes = balanced_sizes(n, blocks);
    let mut graph = block_model(&sizes, p_in, 0.0, rng);
    let starts = block_starts(&sizes);
    let mut links = Vec::with_capacity(blocks - 1);
    for b in 0..blocks - 1 {
        let (sa, na) = (starts[b], sizes[b]);
        let (sb, nb) = (starts[b + 1], sizes[b + 1]);
        let w = width.min(na * nb);
        let mut added = Vec::with_capacity(w);
        while added.len() < w {
            let u = sa + rng.gen_range(0..na);
            let v = sb + rng.gen_range(0..nb);
            if graph.add_edge(u, v) {
                added.push((u, v));
            }
        }
        links.push(added);
    }
    BottleneckRaw {
        graph,
        block_sizes: sizes,
        width,
        p_in,
        links,
    }
}

pub fn gen_bottleneck<R: Rng + ?Sized>(n: usize, width: Option<usize>, rng: &mut R) -> Generated {
    let raw = bottleneck_raw(n, width, rng);
    let params = params(json!({
        "blocks": raw.block_sizes.len(),
        "block_sizes": raw.block_sizes,
        "p_in": raw.p_in,
        "width": raw.width,
    }));
    Generated::repaired(raw.graph, params, rng)
}

/// Pre-repair multicore graph with its core membership.
#[derive(Debug, Clone)]
pub struct MulticoreRaw {
    pub graph: Graph,
    pub core_sizes: Vec<usize>,
    pub core_fraction: f64,
    pub p_core: f64,
    /// Node count of all cores; nodes `0..core_nodes` are core nodes.
    pub core_nodes: usize,
}

pub fn multicore_raw<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<MulticoreRaw> {
    let mut cores = rng.gen_range(2..=3);
    let fraction = rng.gen_range(0.5..=0.6);
    let p_core = rng.gen_range(0.6..=0.8);
    let mut core_nodes = (fraction * n as f64).round() as usize;
    while cores > 2 && core_nodes < 4 * cores {
        cores -= 1;
    }
    core_nodes = core_nodes.max(4 * cores);
    if core_nodes > n {
        return Err(Error::Infeasible(format!(
            "multicore graph with {n} nodes cannot hold {cores} cores of at least 4 nodes"
        )));
    }
    let sizes = balanced_sizes(core_nodes, cores);
    let starts = block_starts(&sizes);
    let mut graph = Graph::new(n);
    let core_graph = block_model(&sizes, p_core, 0.0, rng);
    for (u, v) in core_graph.edges() {
        graph.add_edge(u, v);
    }
    for a in 0..cores {
        for b in a + 1..cores {
            let bridging = rng.gen_range(1..=2).min(sizes[a]);
            for i in sample(rng, sizes[a], bridging) {
                let v = starts[b] + rng.gen_range(0..sizes[b]);
                graph.add_edge(starts[a] + i, v);
            }
        }
    }
    for u in core_nodes..n {
        let c = rng.gen_range(0..cores);
        let k = rng.gen_range(1..=2);
        for i in sample(rng, sizes[c], k) {
            graph.add_edge(u, starts[c] + i);
        }
    }
    Ok(MulticoreRaw {
        graph,
        core_sizes: sizes,
        core_fraction: fraction,
        p_core,
        core_nodes,
    })
}

pub fn gen_multicore<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Generated> {
    let raw = multicore_raw(n, rng)?;
    let params = params(json!({
        "cores": raw.core_sizes.len(),
        "core_sizes": raw.core_sizes,
        "core_fraction": raw.core_fraction,
        "p_core": raw.p_core,
    }));
    Ok(Generated::repaired(raw.graph, params, rng))
}

pub(crate) fn params(value: Value) -> Map<String, Value> {
    match value {
        Value::Object(map) => map,
        _ => unreachable!("parameter literals are objects"),
    }
}
