//! Generators with controllable spectral gap: block models with a mixing
//! parameter, geometric graphs with random shortcuts, and degree-preserving
//! rewiring of either.

use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::graph::{ensure_connected, rewire_in_place, Graph};
use crate::sample::{Label, LabeledSample};
use crate::spectral::spectral_gap;
use crate::topology::{self, balanced_sizes, block_model, geometric_edges, unit_square_points};

/// Upper end of every mixing stratum.
pub const MU_MAX: f64 = 0.8;
/// Stratum probabilities for low, medium and high connectivity.
pub const MU_STRATA: [(f64, f64, f64); 3] = [(0.4, 0.0, 0.2), (0.3, 0.2, 0.5), (0.3, 0.5, 0.8)];
/// Rewiring budget per edge.
pub const SWAP_ATTEMPTS_PER_EDGE: usize = 50;

/// Mixing parameter in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MixingParam(f64);

impl MixingParam {
    pub fn new(mu: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&mu) {
            Ok(MixingParam(mu))
        } else {
            Err(Error::InvalidParameter(format!(
                "mixing parameter {mu} outside [0, 1]"
            )))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Index into [`MU_STRATA`].
    pub fn stratum(self) -> usize {
        if self.0 < 0.2 {
            0
        } else if self.0 <= 0.5 {
            1
        } else {
            2
        }
    }
}

pub fn sample_mu<R: Rng + ?Sized>(rng: &mut R) -> MixingParam {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut chosen = MU_STRATA[MU_STRATA.len() - 1];
    for s in MU_STRATA {
        acc += s.0;
        if u < acc {
            chosen = s;
            break;
        }
    }
    let (_, lo, hi) = chosen;
    // Low stratum is half-open at 0.2.
    let mu = if lo == 0.0 {
        rng.gen_range(lo..hi)
    } else {
        rng.gen_range(lo..=hi)
    };
    MixingParam(mu)
}

/// Between-block probability range for a mixing parameter.
pub fn p_out_range(mu: MixingParam) -> (f64, f64) {
    let m = mu.get();
    if m < 0.1 {
        (0.001, 0.02)
    } else if m < 0.3 {
        (0.02, 0.1)
    } else if m < 0.7 {
        (0.1, 0.3)
    } else {
        (0.3, m.max(0.3))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbmVariant {
    Dumbbell,
    Multi,
}

impl SbmVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            SbmVariant::Dumbbell => "sbm_dumbbell",
            SbmVariant::Multi => "sbm_multi",
        }
    }
}

/// A generated graph with its sampled parameters and repair count.
#[derive(Debug, Clone)]
pub struct SpectralGraph {
    pub graph: Graph,
    pub params: Map<String, Value>,
    pub repairs: usize,
}

fn uniform<R: Rng + ?Sized>(lo: f64, hi: f64, rng: &mut R) -> f64 {
    if hi > lo {
        rng.gen_range(lo..=hi)
    } else {
        lo
    }
}

pub fn gen_sbm_evolution<R: Rng + ?Sized>(
    n: usize,
    mu: MixingParam,
    variant: SbmVariant,
    rng: &mut R,
) -> Result<SpectralGraph> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!(
            "SBM evolution needs n >= 8, got {n}"
        )));
    }
    let blocks = match variant {
        SbmVariant::Dumbbell => 2,
        SbmVariant::Multi => rng.gen_range(3..=5),
    };
    let sizes = balanced_sizes(n, blocks);
    let p_in = rng.gen_range(0.6..=0.8);
    let (lo, hi) = p_out_range(mu);
    let p_out = uniform(lo, hi, rng);
    let raw = block_model(&sizes, p_in, p_out, rng);
    let (graph, repairs) = ensure_connected(&raw, rng);
    Ok(SpectralGraph {
        graph,
        params: topology::params(json!({
            "mu": mu.get(),
            "blocks": blocks,
            "p_in": p_in,
            "p_out": p_out,
        })),
        repairs,
    })
}

/// Radius at which a random geometric graph on the unit square is
/// connected with high probability, inflated by 10%.
pub fn connectivity_radius(n: usize) -> f64 {
    let n = n as f64;
    (1.1 * n.ln() / (PI * n)).sqrt()
}

/// Number of random shortcuts for a mixing parameter.
pub fn extra_edge_count(n: usize, mu: MixingParam) -> usize {
    let n = n as f64;
    (mu.get() * 0.1 * n * n.ln()).round() as usize
}

pub fn gen_geometric_evolution<R: Rng + ?Sized>(
    n: usize,
    mu: MixingParam,
    rng: &mut R,
) -> Result<SpectralGraph> {
    if n < 5 {
        return Err(Error::InvalidParameter(format!(
            "geometric evolution needs n >= 5, got {n}"
        )));
    }
    let radius = connectivity_radius(n);
    let points = unit_square_points(n, rng);
    let base = geometric_edges(&points, radius);
    let (mut graph, repairs) = ensure_connected(&base, rng);
    let mut missing: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| !graph.has_edge(u, v))
        .collect();
    let extra = extra_edge_count(n, mu).min(missing.len());
    let (chosen, _) = missing.partial_shuffle(rng, extra);
    for &(u, v) in chosen.iter() {
        graph.add_edge(u, v);
    }
    Ok(SpectralGraph {
        graph,
        params: topology::params(json!({ "mu": mu.get(), "radius": radius, "extra_edges": extra })),
        repairs,
    })
}

/// Rewired graph together with its base, for before/after comparison.
#[derive(Debug, Clone)]
pub struct Rewired {
    pub base: Graph,
    /// Graph right after swapping, before connectivity repair.
    pub swapped: Graph,
    pub result: SpectralGraph,
    pub swaps: usize,
}

pub fn gen_configuration_rewired<R: Rng + ?Sized>(
    n: usize,
    mu: MixingParam,
    rng: &mut R,
) -> Result<Rewired> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!(
            "configuration rewiring needs n >= 8, got {n}"
        )));
    }
    let use_sbm = rng.gen_bool(0.5);
    let start = if use_sbm {
        let variant = if rng.gen_bool(0.5) {
            SbmVariant::Dumbbell
        } else {
            SbmVariant::Multi
        };
        gen_sbm_evolution(n, mu, variant, rng)?
    } else {
        gen_geometric_evolution(n, mu, rng)?
    };
    let fraction = rng.gen_range(0.3..=0.8);
    let base = start.graph;
    let swaps = swap_target(fraction, base.num_edges());
    let mut swapped = base.clone();
    rewire_in_place(
        &mut swapped,
        swaps,
        SWAP_ATTEMPTS_PER_EDGE * base.num_edges(),
        rng,
    )?;
    let (graph, repairs) = ensure_connected(&swapped, rng);
    let mut params = topology::params(json!({
        "mu": mu.get(),
        "base": if use_sbm { "sbm" } else { "geometric" },
        "fraction": fraction,
        "swaps": swaps,
        "post_swap_repairs": repairs,
    }));
    params.insert("base_params".into(), Value::Object(start.params));
    Ok(Rewired {
        base,
        swapped,
        result: SpectralGraph {
            graph,
            params,
            repairs: start.repairs + repairs,
        },
        swaps,
    })
}

/// Successful swaps required to rewire `fraction` of `edges`.
pub fn swap_target(fraction: f64, edges: usize) -> usize {
    (fraction * edges as f64).round() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralMethod {
    SbmDumbbell,
    SbmMulti,
    Geometric,
    Configuration,
}

impl SpectralMethod {
    pub const ALL: [SpectralMethod; 4] = [
        SpectralMethod::SbmDumbbell,
        SpectralMethod::SbmMulti,
        SpectralMethod::Geometric,
        SpectralMethod::Configuration,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SpectralMethod::SbmDumbbell => "sbm_dumbbell",
            SpectralMethod::SbmMulti => "sbm_multi",
            SpectralMethod::Geometric => "geometric",
            SpectralMethod::Configuration => "configuration",
        }
    }
}

/// One spectral-gap regression sample on `n` nodes; the method is drawn
/// uniformly and the label is computed on the final graph.
pub fn spectral_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<LabeledSample> {
    let method = *SpectralMethod::ALL.choose(rng).unwrap();
    let mu = sample_mu(rng);
    let generated = match method {
        SpectralMethod::SbmDumbbell => gen_sbm_evolution(n, mu, SbmVariant::Dumbbell, rng)?,
        SpectralMethod::SbmMulti => gen_sbm_evolution(n, mu, SbmVariant::Multi, rng)?,
        SpectralMethod::Geometric => gen_geometric_evolution(n, mu, rng)?,
        SpectralMethod::Configuration => gen_configuration_rewired(n, mu, rng)?.result,
    };
    let lambda2 = spectral_gap(&generated.graph)?.lambda2;
    if !(lambda2 > 0.0 && lambda2 <= 2.0 + 1e-9) {
        return Err(Error::InvalidGraph(format!(
            "spectral gap {lambda2} outside (0, 2]"
        )));
    }
    let mut metadata = Map::new();
    metadata.insert("family".into(), json!(method.as_str()));
    metadata.insert("method".into(), json!(method.as_str()));
    metadata.insert("params".into(), Value::Object(generated.params));
    metadata.insert("repairs".into(), json!(generated.repairs));
    Ok(LabeledSample {
        graph: generated.graph,
        label: Label::SpectralGap(lambda2),
        metadata,
    })
}
