//! Existence of a non-identity automorphism, decided by
//! individualization-refinement search.
//!
//! Colour refinement runs to an equitable ordered partition. The search
//! then walks down the stabilizer chain: at each level it takes the first
//! non-singleton cell, fixes its first vertex `v`, and asks whether some
//! automorphism fixing everything individualized so far moves `v` to
//! another vertex `w` of the same cell. That question is answered by
//! matching a backtracking search under `w` against the leaf reached by
//! always individualizing first vertices under `v`. If no `w` works, `v`
//! is fixed by the whole stabilizer and the search descends. A discrete
//! partition at the bottom means only the identity remains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_MAX_NODES: usize = 400;
pub const DEFAULT_MAX_EXPANSIONS: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_nodes: usize,
    /// Refinements allowed before giving up with [`Error::Undecided`].
    pub max_expansions: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self {
            max_nodes: DEFAULT_MAX_NODES,
            max_expansions: DEFAULT_MAX_EXPANSIONS,
        }
    }
}

/// A vertex permutation `mapping[v] = φ(v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AutomorphismWitness {
    pub mapping: Vec<usize>,
}

impl AutomorphismWitness {
    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &AutomorphismWitness) -> AutomorphismWitness {
        AutomorphismWitness {
            mapping: other.mapping.iter().map(|&v| self.mapping[v]).collect(),
        }
    }

    pub fn power(&self, k: usize) -> AutomorphismWitness {
        let mut acc = AutomorphismWitness {
            mapping: (0..self.mapping.len()).collect(),
        };
        for _ in 0..k {
            acc = self.compose(&acc);
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryVerdict {
    pub symmetric: bool,
    /// Present exactly when `symmetric`; never the identity.
    pub witness: Option<AutomorphismWitness>,
    pub expansions: u64,
}

/// True iff `phi` is a bijection mapping the edge set onto itself.
pub fn verify_automorphism(g: &Graph, phi: &[usize]) -> Result<bool> {
    let n = g.num_nodes();
    if phi.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: phi.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in phi {
        if p >= n || seen[p] {
            return Ok(false);
        }
        seen[p] = true;
    }
    // A bijection that maps every edge to an edge maps E onto E, since both
    // sides have the same size; non-edges then map to non-edges.
    Ok(g.edges().iter().all(|&(u, v)| g.has_edge(phi[u], phi[v])))
}

pub fn find_nontrivial_automorphism(g: &Graph) -> Result<SymmetryVerdict> {
    find_nontrivial_automorphism_with(g, SearchLimits::default())
}

pub fn find_nontrivial_automorphism_with(
    g: &Graph,
    limits: SearchLimits,
) -> Result<SymmetryVerdict> {
    let n = g.num_nodes();
    if n > limits.max_nodes {
        return Err(Error::TooLarge {
            n,
            limit: limits.max_nodes,
        });
    }
    let mut search = Search {
        g,
        limit: limits.max_expansions,
        expansions: 0,
        left: Vec::new(),
    };
    let witness = search.run()?;
    Ok(SymmetryVerdict {
        symmetric: witness.is_some(),
        witness,
        expansions: search.expansions,
    })
}

/// An equitable ordered partition: `colors[v]` is the index of v's cell.
#[derive(Debug, Clone)]
struct Partition {
    colors: Vec<u32>,
    cells: usize,
    /// Cell sizes and quotient degrees; equal for partitions related by an
    /// automorphism.
    fingerprint: Vec<u32>,
}

impl Partition {
    fn is_discrete(&self) -> bool {
        self.cells == self.colors.len()
    }

    /// Vertices of the first cell with more than one member, ascending.
    fn first_nontrivial_cell(&self) -> Option<(u32, Vec<usize>)> {
        let mut sizes = vec![0u32; self.cells];
        for &c in &self.colors {
            sizes[c as usize] += 1;
        }
        let target = sizes.iter().position(|&s| s > 1)? as u32;
        let members = (0..self.colors.len())
            .filter(|&v| self.colors[v] == target)
            .collect();
        Some((target, members))
    }
}

struct Search<'a> {
    g: &'a Graph,
    limit: u64,
    expansions: u64,
    /// First-vertex path from the current `v` down to a discrete leaf.
    left: Vec<Partition>,
}

impl Search<'_> {
    fn run(&mut self) -> Result<Option<AutomorphismWitness>> {
        let n = self.g.num_nodes();
        let mut current = self.refine(vec![0; n])?;
        while let Some((_, members)) = current.first_nontrivial_cell() {
            let v = members[0];
            let fixed_v = self.individualize(&current, v)?;
            self.left.clear();
            self.left.push(fixed_v.clone());
            let mut tip = fixed_v.clone();
            while let Some((_, cell)) = tip.first_nontrivial_cell() {
                tip = self.individualize(&tip, cell[0])?;
                self.left.push(tip.clone());
            }
            for &w in &members[1..] {
                let moved = self.individualize(&current, w)?;
                if moved.fingerprint != self.left[0].fingerprint {
                    continue;
                }
                if let Some(phi) = self.match_left(&moved, 0)? {
                    return Ok(Some(phi));
                }
            }
            current = fixed_v;
        }
        Ok(None)
    }

    /// Backtracks under `part` looking for a leaf that pairs with the left
    /// leaf into an automorphism.
    fn match_left(
        &mut self,
        part: &Partition,
        depth: usize,
    ) -> Result<Option<AutomorphismWitness>> {
        if part.is_discrete() {
            let leaf = &self.left[depth];
            let n = part.colors.len();
            let mut at_color = vec![0usize; n];
            for (v, &c) in part.colors.iter().enumerate() {
                at_color[c as usize] = v;
            }
            let mapping: Vec<usize> = leaf.colors.iter().map(|&c| at_color[c as usize]).collect();
            return Ok(
                verify_automorphism(self.g, &mapping)?.then_some(AutomorphismWitness { mapping })
            );
        }
        let (target, _) = self.left[depth].first_nontrivial_cell().unwrap();
        let candidates: Vec<usize> = (0..part.colors.len())
            .filter(|&u| part.colors[u] == target)
            .collect();
        for u in candidates {
            let next = self.individualize(part, u)?;
            if next.fingerprint != self.left[depth + 1].fingerprint {
                continue;
            }
            if let Some(phi) = self.match_left(&next, depth + 1)? {
                return Ok(Some(phi));
            }
        }
        Ok(None)
    }

    /// Splits `v` off into its own cell placed just before the rest of its
    /// old cell, then refines.
    fn individualize(&mut self, part: &Partition, v: usize) -> Result<Partition> {
        let cv = part.colors[v];
        let colors = part
            .colors
            .iter()
            .enumerate()
            .map(|(u, &c)| if u == v || c < cv { c } else { c + 1 })
            .collect();
        self.refine(colors)
    }

    /// Colour refinement to the coarsest equitable partition finer than
    /// `colors`. Cells are ordered by (old cell, neighbour-colour multiset),
    /// so the result commutes with relabelling of the graph.
    fn refine(&mut self, mut colors: Vec<u32>) -> Result<Partition> {
        self.expansions += 1;
        if self.expansions > self.limit {
            return Err(Error::Undecided {
                expansions: self.expansions - 1,
            });
        }
        let g = self.g;
        let n = g.num_nodes();
        let mut cells = count_cells(&colors);
        let mut order: Vec<usize> = (0..n).collect();
        let mut signatures: Vec<Vec<u32>> = vec![Vec::new(); n];
        loop {
            for v in 0..n {
                let sig = &mut signatures[v];
                sig.clear();
                sig.extend(g.neighbors(v).iter().map(|&u| colors[u]));
                sig.sort_unstable();
            }
            order.sort_by(|&a, &b| {
                colors[a]
                    .cmp(&colors[b])
                    .then_with(|| signatures[a].cmp(&signatures[b]))
            });
            let mut next = vec![0u32; n];
            let mut rank = 0u32;
            for i in 0..n {
                if i > 0 {
                    let (a, b) = (order[i - 1], order[i]);
                    if colors[a] != colors[b] || signatures[a] != signatures[b] {
                        rank += 1;
                    }
                }
                next[order[i]] = rank;
            }
            let next_cells = if n == 0 { 0 } else { rank as usize + 1 };
            colors = next;
            if next_cells == cells {
                break;
            }
            cells = next_cells;
        }

        // The last pass split nothing, so its signatures (built from the
        // previous colours) already use the final colour numbering.
        let mut fingerprint = Vec::new();
        let mut first = 0;
        while first < n {
            let c = colors[order[first]];
            let mut last = first;
            while last < n && colors[order[last]] == c {
                last += 1;
            }
            fingerprint.push((last - first) as u32);
            let sig = &signatures[order[first]];
            fingerprint.push(sig.len() as u32);
            fingerprint.extend_from_slice(sig);
            first = last;
        }
        Ok(Partition {
            colors,
            cells,
            fingerprint,
        })
    }
}

fn count_cells(colors: &[u32]) -> usize {
    let mut seen: Vec<u32> = colors.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}
