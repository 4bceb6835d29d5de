//! Symmetric and asymmetric graph constructions for symmetry
//! classification. Every label is confirmed by the automorphism search
//! before a sample is emitted.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Map, Value};

use crate::automorphism::{
    find_nontrivial_automorphism, verify_automorphism, AutomorphismWitness, SymmetryVerdict,
};
use crate::corpus::{BaseGraphCorpus, MAX_BASE_SIZE, MIN_BASE_SIZE};
use crate::error::{Error, Result};
use crate::graph::{double_edge_swap, ensure_connected, Graph};
pub use crate::sample::NodeRange;
use crate::sample::{Label, LabeledSample};
use crate::topology::{self, balanced_sizes, block_model};

/// Largest graph any product or cover may produce.
pub const MAX_PRODUCT_NODES: usize = 400;
/// Swap attempts allowed when perturbing a symmetric start.
pub const PERTURBATION_SWAPS: usize = 20;
/// Construction attempts per emitted sample.
pub const SAMPLE_RETRIES: usize = 200;

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Cayley graph of the cyclic group `Z_n` with connection set `S ∪ -S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CayleySpec {
    pub n: usize,
    pub generators: Vec<usize>,
}

pub fn gen_cayley_cyclic(spec: &CayleySpec) -> Result<Graph> {
    let n = spec.n;
    if n < 2 {
        return Err(Error::InvalidParameter(format!("Cayley graph on Z_{n}")));
    }
    let mut g = Graph::new(n);
    for &s in &spec.generators {
        if s % n == 0 || gcd(s % n, n) != 1 {
            return Err(Error::InvalidParameter(format!(
                "generator {s} is not a unit of Z_{n}"
            )));
        }
        for i in 0..n {
            g.add_edge(i, (i + s) % n);
        }
    }
    Ok(g)
}

/// Units of `Z_n` up to sign, i.e. coprime residues in `1..=n/2`.
pub fn cyclic_units(n: usize) -> Vec<usize> {
    (1..=n / 2).filter(|&g| gcd(g, n) == 1).collect()
}

/// Translation `i -> i + 1 (mod n)`, an automorphism of every Cayley graph
/// on `Z_n`.
pub fn cyclic_translation(n: usize) -> AutomorphismWitness {
    AutomorphismWitness {
        mapping: (0..n).map(|i| (i + 1) % n).collect(),
    }
}

/// Node `(v, layer)` of a cover is `layer * |V| + v`.
#[inline]
pub fn cover_node(base_nodes: usize, v: usize, layer: usize) -> usize {
    layer * base_nodes + v
}

pub fn bipartite_double_cover(base: &Graph) -> Graph {
    let m = base.num_nodes();
    let mut g = Graph::new(2 * m);
    for (u, v) in base.edges() {
        g.add_edge(cover_node(m, u, 0), cover_node(m, v, 1));
        g.add_edge(cover_node(m, u, 1), cover_node(m, v, 0));
    }
    g
}

/// Layer swap `(v, i) -> (v, 1 - i)`.
pub fn layer_swap(base_nodes: usize) -> AutomorphismWitness {
    layer_rotation(base_nodes, 2)
}

/// `k`-fold cyclic cover: for each base edge `(u, v)` and layer `i`, edges
/// `((u, i), (v, i + 1))` and `((v, i), (u, i + 1))`, layers mod `k`.
pub fn k_fold_cyclic_cover(base: &Graph, k: usize) -> Result<Graph> {
    if !(2..=5).contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "cyclic cover needs 2 <= k <= 5, got {k}"
        )));
    }
    let m = base.num_nodes();
    if k * m > MAX_PRODUCT_NODES {
        return Err(Error::InvalidParameter(format!(
            "{k}-fold cover of a {m}-node graph exceeds {MAX_PRODUCT_NODES} nodes"
        )));
    }
    let mut g = Graph::new(k * m);
    for (u, v) in base.edges() {
        for i in 0..k {
            let j = (i + 1) % k;
            g.add_edge(cover_node(m, u, i), cover_node(m, v, j));
            g.add_edge(cover_node(m, v, i), cover_node(m, u, j));
        }
    }
    Ok(g)
}

/// Layer rotation `(v, i) -> (v, i + 1 mod k)`.
pub fn layer_rotation(base_nodes: usize, k: usize) -> AutomorphismWitness {
    let m = base_nodes;
    AutomorphismWitness {
        mapping: (0..k * m)
            .map(|x| cover_node(m, x % m, (x / m + 1) % k))
            .collect(),
    }
}

/// Cartesian product; node `(u, v)` is `u * |V2| + v`.
pub fn cartesian_product(g1: &Graph, g2: &Graph) -> Result<Graph> {
    let (n1, n2) = (g1.num_nodes(), g2.num_nodes());
    if n1 == 0 || n2 == 0 {
        return Err(Error::InvalidParameter(
            "Cartesian product of an empty graph".into(),
        ));
    }
    if n1 * n2 > MAX_PRODUCT_NODES {
        return Err(Error::InvalidParameter(format!(
            "product of {n1} and {n2} nodes exceeds {MAX_PRODUCT_NODES}"
        )));
    }
    let mut g = Graph::new(n1 * n2);
    for (a, b) in g1.edges() {
        for v in 0..n2 {
            g.add_edge(a * n2 + v, b * n2 + v);
        }
    }
    for u in 0..n1 {
        for (a, b) in g2.edges() {
            g.add_edge(u * n2 + a, u * n2 + b);
        }
    }
    Ok(g)
}

/// Applies up to [`PERTURBATION_SWAPS`] double-edge swaps, undoing any
/// that disconnects the graph, and returns the first connected asymmetric
/// result.
pub fn gen_perturbed_asymmetric<R: Rng + ?Sized>(
    start: &Graph,
    rng: &mut R,
) -> Result<(Graph, usize)> {
    let mut current = start.clone();
    for attempt in 1..=PERTURBATION_SWAPS {
        let Ok(next) = double_edge_swap(&current, rng, 100) else {
            continue;
        };
        if !next.is_connected() {
            continue;
        }
        let verdict = find_nontrivial_automorphism(&next)?;
        current = next;
        if !verdict.symmetric {
            return Ok((current, attempt));
        }
    }
    Err(Error::Exhausted {
        what: "symmetry-breaking swaps",
        attempts: PERTURBATION_SWAPS,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryMethod {
    Cayley,
    DoubleCover,
    SyntheticProduct,
    RealProductSymmetric,
    CyclicCover,
    Perturbed,
    RealProductAsymmetric,
}

impl SymmetryMethod {
    pub const SYMMETRIC: [SymmetryMethod; 5] = [
        SymmetryMethod::Cayley,
        SymmetryMethod::DoubleCover,
        SymmetryMethod::SyntheticProduct,
        SymmetryMethod::RealProductSymmetric,
        SymmetryMethod::CyclicCover,
    ];
    pub const ASYMMETRIC: [SymmetryMethod; 2] = [
        SymmetryMethod::Perturbed,
        SymmetryMethod::RealProductAsymmetric,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SymmetryMethod::Cayley => "cayley",
            SymmetryMethod::DoubleCover => "double_cover",
            SymmetryMethod::SyntheticProduct => "synthetic_product",
            SymmetryMethod::RealProductSymmetric => "real_product_symmetric",
            SymmetryMethod::CyclicCover => "cyclic_cover",
            SymmetryMethod::Perturbed => "perturbed",
            SymmetryMethod::RealProductAsymmetric => "real_product_asymmetric",
        }
    }
}

impl fmt::Display for SymmetryMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A construction before label verification.
struct Candidate {
    graph: Graph,
    params: Map<String, Value>,
    /// Automorphism guaranteed by the construction, if any.
    construction_witness: Option<AutomorphismWitness>,
}

/// Generates one verified sample of the requested class. Method choice and
/// all parameters come from `rng`; failed constructions are retried.
pub fn symmetry_sample<R: Rng + ?Sized>(
    symmetric: bool,
    range: NodeRange,
    corpus: &BaseGraphCorpus,
    rng: &mut R,
) -> Result<LabeledSample> {
    let methods: &[SymmetryMethod] = if symmetric {
        &SymmetryMethod::SYMMETRIC
    } else {
        &SymmetryMethod::ASYMMETRIC
    };
    for attempt in 0..SAMPLE_RETRIES {
        let method = *methods.choose(rng).unwrap();
        let target = rng.gen_range(range.lo..=range.hi);
        let Some(candidate) = construct(method, target, range, corpus, rng)? else {
            continue;
        };
        let graph = candidate.graph;
        if !range.contains(graph.num_nodes()) || !graph.is_connected() {
            continue;
        }
        if let Some(w) = &candidate.construction_witness {
            if !verify_automorphism(&graph, &w.mapping)? || w.is_identity() {
                return Err(Error::InvalidGraph(format!(
                    "{method} construction witness failed verification"
                )));
            }
        }
        let verdict = match find_nontrivial_automorphism(&graph) {
            Ok(v) => v,
            Err(Error::Undecided { .. }) => continue,
            Err(e) => return Err(e),
        };
        if verdict.symmetric != symmetric {
            continue;
        }
        let mut metadata = Map::new();
        metadata.insert("family".into(), json!(method.as_str()));
        metadata.insert("method".into(), json!(method.as_str()));
        metadata.insert("params".into(), Value::Object(candidate.params));
        metadata.insert("construction_attempts".into(), json!(attempt + 1));
        metadata.insert("repairs".into(), json!(0));
        insert_witness(&mut metadata, &verdict);
        return Ok(LabeledSample {
            graph,
            label: Label::Symmetric(symmetric),
            metadata,
        });
    }
    Err(Error::Exhausted {
        what: "symmetry sample construction",
        attempts: SAMPLE_RETRIES,
    })
}

fn insert_witness(metadata: &mut Map<String, Value>, verdict: &SymmetryVerdict) {
    let value = match &verdict.witness {
        Some(w) => json!(w.mapping),
        None => Value::Null,
    };
    metadata.insert("witness".into(), value);
}

/// Builds `count` samples, alternating symmetric and asymmetric so the
/// classes differ by at most one.
pub fn assemble_symmetry_pool<R: Rng + ?Sized>(
    count: usize,
    range: NodeRange,
    corpus: &BaseGraphCorpus,
    rng: &mut R,
) -> Result<Vec<LabeledSample>> {
    (0..count)
        .map(|i| symmetry_sample(i % 2 == 0, range, corpus, rng))
        .collect()
}

fn construct<R: Rng + ?Sized>(
    method: SymmetryMethod,
    target: usize,
    range: NodeRange,
    corpus: &BaseGraphCorpus,
    rng: &mut R,
) -> Result<Option<Candidate>> {
    Ok(match method {
        SymmetryMethod::Cayley => Some(cayley_candidate(target, rng)?),
        SymmetryMethod::DoubleCover => double_cover_candidate(target, range, corpus, rng),
        SymmetryMethod::SyntheticProduct => synthetic_product_candidate(target, range, rng)?,
        SymmetryMethod::RealProductSymmetric | SymmetryMethod::RealProductAsymmetric => {
            real_product_candidate(target, range, corpus, rng)?
        }
        SymmetryMethod::CyclicCover => cyclic_cover_candidate(target, range, corpus, rng)?,
        SymmetryMethod::Perturbed => {
            let start_method = *[
                SymmetryMethod::Cayley,
                SymmetryMethod::DoubleCover,
                SymmetryMethod::SyntheticProduct,
                SymmetryMethod::CyclicCover,
            ]
            .choose(rng)
            .unwrap();
            let Some(start) = construct(start_method, target, range, corpus, rng)? else {
                return Ok(None);
            };
            if !start.graph.is_connected() || start.graph.num_edges() < 2 {
                return Ok(None);
            }
            match gen_perturbed_asymmetric(&start.graph, rng) {
                Ok((graph, swaps)) => {
                    let mut params = Map::new();
                    params.insert("start_method".into(), json!(start_method.as_str()));
                    params.insert("start_params".into(), Value::Object(start.params));
                    params.insert("swaps".into(), json!(swaps));
                    Some(Candidate {
                        graph,
                        params,
                        construction_witness: None,
                    })
                }
                Err(Error::Exhausted { .. } | Error::Undecided { .. }) => None,
                Err(e) => return Err(e),
            }
        }
    })
}

fn cayley_candidate<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Candidate> {
    let units = cyclic_units(n);
    let k = rng.gen_range(1..=3).min(units.len());
    let mut generators: Vec<usize> = units.choose_multiple(rng, k).copied().collect();
    generators.sort_unstable();
    let graph = gen_cayley_cyclic(&CayleySpec {
        n,
        generators: generators.clone(),
    })?;
    Ok(Candidate {
        graph,
        params: topology::params(json!({ "n": n, "generators": generators })),
        construction_witness: Some(cyclic_translation(n)),
    })
}

/// Base size for a cover with `layers` layers, as close to
/// `target / layers` as the range allows.
fn base_size_for(target: usize, layers: usize, range: NodeRange) -> Option<usize> {
    let lo = range.lo.div_ceil(layers);
    let hi = range.hi / layers;
    (lo <= hi).then(|| ((target as f64 / layers as f64).round() as usize).clamp(lo, hi))
}

fn double_cover_candidate<R: Rng + ?Sized>(
    target: usize,
    range: NodeRange,
    corpus: &BaseGraphCorpus,
    rng: &mut R,
) -> Option<Candidate> {
    let m = base_size_for(target, 2, range)?;
    let kind = *["random", "community", "bottleneck", "real"]
        .choose(rng)
        .unwrap();
    let (base, mut params) = match kind {
        "random" => {
            let p = rng.gen_range(0.15..=0.3);
            let g = block_model(&[m], p, 0.0, rng);
            (g, topology::params(json!({ "p": p })))
        }
        "community" => {
            let groups = rng.gen_range(2..=(m / 3).clamp(2, 4));
            let p_in = rng.gen_range(0.3..=0.7);
            let p_out = rng.gen_range(0.05..=0.15);
            let g = block_model(&balanced_sizes(m, groups), p_in, p_out, rng);
            (
                g,
                topology::params(json!({ "groups": groups, "p_in": p_in, "p_out": p_out })),
            )
        }
        "bottleneck" => {
            if m < 8 {
                return None;
            }
            let raw = topology::bottleneck_raw(m, None, rng);
            // The base uses the cover-specific density range.
            let p_in = rng.gen_range(0.3..=0.6);
            let sizes = raw.block_sizes.clone();
            let mut g = block_model(&sizes, p_in, 0.0, rng);
            for (u, v) in raw.links.iter().flatten() {
                g.add_edge(*u, *v);
            }
            (
                g,
                topology::params(
                    json!({ "blocks": sizes.len(), "p_in": p_in, "width": raw.width }),
                ),
            )
        }
        _ => {
            if !(MIN_BASE_SIZE..=MAX_BASE_SIZE).contains(&m) {
                return None;
            }
            let base = corpus.pick(m, rng)?;
            (
                base.graph.clone(),
                topology::params(json!({ "source": base.source })),
            )
        }
    };
    let (base, repairs) = ensure_connected(&base, rng);
    if base.is_bipartite() {
        // Double covers of bipartite graphs are disconnected.
        return None;
    }
    params.insert("base_kind".into(), json!(kind));
    params.insert("base_nodes".into(), json!(m));
    params.insert("base_repairs".into(), json!(repairs));
    Some(Candidate {
        graph: bipartite_double_cover(&base),
        params,
        construction_witness: Some(layer_swap(m)),
    })
}

#[derive(Debug, Clone, Copy)]
enum ProductKind {
    CyclePath,
    CycleCycle,
    PathStar,
}

impl ProductKind {
    fn factors(self, a: usize, b: usize) -> (Graph, Graph) {
        match self {
            ProductKind::CyclePath => (Graph::cycle(a), Graph::path(b)),
            ProductKind::CycleCycle => (Graph::cycle(a), Graph::cycle(b)),
            ProductKind::PathStar => (Graph::path(a), Graph::star(b)),
        }
    }

    /// Node count of the product for factor parameters `(a, b)`.
    fn nodes(self, a: usize, b: usize) -> usize {
        match self {
            ProductKind::PathStar => a * (b + 1),
            _ => a * b,
        }
    }

    fn min_a(self) -> usize {
        match self {
            ProductKind::PathStar => 2,
            _ => 3,
        }
    }

    fn min_b(self) -> usize {
        match self {
            ProductKind::CycleCycle => 3,
            _ => 2,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            ProductKind::CyclePath => "cycle_x_path",
            ProductKind::CycleCycle => "cycle_x_cycle",
            ProductKind::PathStar => "path_x_star",
        }
    }
}

fn synthetic_product_candidate<R: Rng + ?Sized>(
    target: usize,
    range: NodeRange,
    rng: &mut R,
) -> Result<Option<Candidate>> {
    let kind = *[
        ProductKind::CyclePath,
        ProductKind::CycleCycle,
        ProductKind::PathStar,
    ]
    .choose(rng)
    .unwrap();
    let mut best: Vec<(usize, usize)> = Vec::new();
    let mut best_gap = usize::MAX;
    for a in kind.min_a()..=range.hi {
        for b in kind.min_b()..=range.hi {
            let n = kind.nodes(a, b);
            if n > range.hi {
                break;
            }
            if n < range.lo {
                continue;
            }
            let gap = n.abs_diff(target);
            if gap < best_gap {
                best_gap = gap;
                best.clear();
            }
            if gap == best_gap {
                best.push((a, b));
            }
        }
    }
    let Some(&(a, b)) = best.choose(rng) else {
        return Ok(None);
    };
    let (g1, g2) = kind.factors(a, b);
    let graph = cartesian_product(&g1, &g2)?;
    Ok(Some(Candidate {
        graph,
        params: topology::params(json!({ "kind": kind.as_str(), "a": a, "b": b })),
        construction_witness: None,
    }))
}

fn real_product_candidate<R: Rng + ?Sized>(
    target: usize,
    range: NodeRange,
    corpus: &BaseGraphCorpus,
    rng: &mut R,
) -> Result<Option<Candidate>> {
    let max_a = MAX_BASE_SIZE.min(range.hi / MIN_BASE_SIZE);
    if max_a < MIN_BASE_SIZE {
        return Ok(None);
    }
    let a = rng.gen_range(MIN_BASE_SIZE..=max_a);
    let lo_b = range.lo.div_ceil(a).max(MIN_BASE_SIZE);
    let hi_b = (range.hi / a).min(MAX_BASE_SIZE);
    if lo_b > hi_b {
        return Ok(None);
    }
    let b = ((target as f64 / a as f64).round() as usize).clamp(lo_b, hi_b);
    let (Some(g1), Some(g2)) = (corpus.pick(a, rng), corpus.pick(b, rng)) else {
        return Ok(None);
    };
    let graph = cartesian_product(&g1.graph, &g2.graph)?;
    Ok(Some(Candidate {
        graph,
        params: topology::params(json!({
            "a": a,
            "b": b,
            "source_a": g1.source,
            "source_b": g2.source,
        })),
        construction_witness: None,
    }))
}

fn cyclic_cover_candidate<R: Rng + ?Sized>(
    target: usize,
    range: NodeRange,
    corpus: &BaseGraphCorpus,
    rng: &mut R,
) -> Result<Option<Candidate>> {
    let options: Vec<(usize, usize)> = (2..=5)
        .filter_map(|k| {
            let m = base_size_for(target, k, range)?;
            (MIN_BASE_SIZE..=MAX_BASE_SIZE)
                .contains(&m)
                .then_some((k, m))
        })
        .collect();
    let Some(&(k, m)) = options.choose(rng) else {
        return Ok(None);
    };
    let Some(base) = corpus.pick(m, rng) else {
        return Ok(None);
    };
    let graph = k_fold_cyclic_cover(&base.graph, k)?;
    Ok(Some(Candidate {
        graph,
        params: topology::params(json!({ "k": k, "base_nodes": m, "source": base.source })),
        construction_witness: Some(layer_rotation(m, k)),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{sample_base_graphs_with, CorpusSource};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn edge_set(g: &Graph) -> Vec<(usize, usize)> {
        g.edges()
    }

    #[test]
    fn cayley_small_cases() {
        let c6 = gen_cayley_cyclic(&CayleySpec {
            n: 6,
            generators: vec![1],
        })
        .unwrap();
        assert_eq!(c6, Graph::cycle(6));
        let k5 = gen_cayley_cyclic(&CayleySpec {
            n: 5,
            generators: vec![1, 2],
        })
        .unwrap();
        assert_eq!(k5, Graph::complete(5));
        assert!(gen_cayley_cyclic(&CayleySpec {
            n: 8,
            generators: vec![2]
        })
        .is_err());
    }

    #[test]
    fn double_cover_of_triangle_is_hexagon() {
        let h = bipartite_double_cover(&Graph::cycle(3));
        assert_eq!(h.num_nodes(), 6);
        assert_eq!(h.num_edges(), 6);
        assert!(h.degrees().iter().all(|&d| d == 2));
        assert!(h.is_connected());
        assert!(verify_automorphism(&h, &layer_swap(3).mapping).unwrap());
    }

    #[test]
    fn double_cover_of_an_edge_is_disconnected() {
        let h = bipartite_double_cover(&Graph::complete(2));
        assert_eq!(h.edges(), vec![(0, 3), (1, 2)]);
        assert!(!h.is_connected());
    }

    #[test]
    fn three_fold_cover_of_an_edge_is_a_hexagon() {
        // Base edge (0,1), layers 0..3, nodes (v, i) = 2i + v:
        // i=0: (0,0)-(1,1) = 0-3, (1,0)-(0,1) = 1-2
        // i=1: (0,1)-(1,2) = 2-5, (1,1)-(0,2) = 3-4
        // i=2: (0,2)-(1,0) = 4-1, (1,2)-(0,0) = 5-0
        let h = k_fold_cyclic_cover(&Graph::complete(2), 3).unwrap();
        assert_eq!(
            edge_set(&h),
            vec![(0, 3), (0, 5), (1, 2), (1, 4), (2, 5), (3, 4)]
        );
        assert!(h.is_connected());
        assert!(h.degrees().iter().all(|&d| d == 2));
    }

    #[test]
    fn two_fold_cover_equals_double_cover() {
        let base = Graph::cycle(3);
        assert_eq!(
            k_fold_cyclic_cover(&base, 2).unwrap(),
            bipartite_double_cover(&base)
        );
    }

    #[test]
    fn rotation_has_order_k() {
        for k in 2..=5 {
            let tau = layer_rotation(7, k);
            assert!(!tau.is_identity());
            assert!(tau.power(k).is_identity());
            for j in 1..k {
                assert!(!tau.power(j).is_identity());
            }
        }
    }

    #[test]
    fn product_small_cases() {
        let sq = cartesian_product(&Graph::path(2), &Graph::path(2)).unwrap();
        assert_eq!(sq.num_edges(), 4);
        assert!(sq.degrees().iter().all(|&d| d == 2));
        let prism = cartesian_product(&Graph::cycle(3), &Graph::complete(2)).unwrap();
        assert_eq!((prism.num_nodes(), prism.num_edges()), (6, 9));
        assert!(cartesian_product(&Graph::new(0), &Graph::path(2)).is_err());
        assert!(cartesian_product(&Graph::path(30), &Graph::path(30)).is_err());
    }

    #[test]
    fn perturbation_breaks_symmetry_and_keeps_degrees() {
        let start = gen_cayley_cyclic(&CayleySpec {
            n: 30,
            generators: vec![1, 7],
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (g, _) = gen_perturbed_asymmetric(&start, &mut rng).unwrap();
        assert!(!find_nontrivial_automorphism(&g).unwrap().symmetric);
        assert_eq!(g.sorted_degrees(), start.sorted_degrees());
        assert!(g.is_connected());
    }

    #[test]
    fn pool_is_balanced_verified_and_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let corpus = sample_base_graphs_with(&CorpusSource::Synthetic, 4, &mut rng).unwrap();
        let range = NodeRange { lo: 30, hi: 60 };
        let pool = assemble_symmetry_pool(21, range, &corpus, &mut rng).unwrap();
        let symmetric = pool
            .iter()
            .filter(|s| s.label == Label::Symmetric(true))
            .count();
        assert_eq!(symmetric, 11);
        for s in &pool {
            assert!(range.contains(s.graph.num_nodes()));
            assert!(s.graph.is_connected());
            let verdict = find_nontrivial_automorphism(&s.graph).unwrap();
            assert_eq!(Label::Symmetric(verdict.symmetric), s.label);
            if verdict.symmetric {
                let w: Vec<usize> = serde_json::from_value(s.metadata["witness"].clone()).unwrap();
                assert!(verify_automorphism(&s.graph, &w).unwrap());
                assert!(w.iter().enumerate().any(|(i, &j)| i != j));
            }
        }
    }
}
