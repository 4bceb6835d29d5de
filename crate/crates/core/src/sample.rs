use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use crate::graph::Graph;

/// Task label attached to a generated graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Label {
    /// Topology class id, 0..6.
    Class(usize),
    Symmetric(bool),
    SpectralGap(f64),
    BridgeCount(usize),
}

impl Label {
    /// The label as it appears in graph files: an integer, or the spectral
    /// gap at full precision.
    pub fn to_json(self) -> Value {
        match self {
            Label::Class(c) | Label::BridgeCount(c) => Value::from(c),
            Label::Symmetric(b) => Value::from(u8::from(b)),
            Label::SpectralGap(x) => Number::from_f64(x).map_or(Value::Null, Value::Number),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Label::Class(c) | Label::BridgeCount(c) => c as f64,
            Label::Symmetric(b) => f64::from(u8::from(b)),
            Label::SpectralGap(x) => x,
        }
    }
}

/// A graph with its task label and generation metadata.
#[derive(Debug, Clone)]
pub struct LabeledSample {
    pub graph: Graph,
    pub label: Label,
    pub metadata: Map<String, Value>,
}

/// Inclusive node-count range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "[usize; 2]", from = "[usize; 2]")]
pub struct NodeRange {
    pub lo: usize,
    pub hi: usize,
}

impl NodeRange {
    pub const fn new(lo: usize, hi: usize) -> Self {
        NodeRange { lo, hi }
    }

    pub fn contains(self, n: usize) -> bool {
        (self.lo..=self.hi).contains(&n)
    }
}

impl From<NodeRange> for [usize; 2] {
    fn from(r: NodeRange) -> Self {
        [r.lo, r.hi]
    }
}

impl From<[usize; 2]> for NodeRange {
    fn from([lo, hi]: [usize; 2]) -> Self {
        NodeRange { lo, hi }
    }
}
