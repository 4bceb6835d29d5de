//! Bridge detection by a single depth-first pass with low-link values.

use crate::graph::Graph;

/// The bridges of a graph, each stored as `(u, v)` with `u < v`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BridgeReport {
    pub bridges: Vec<(usize, usize)>,
}

impl BridgeReport {
    pub fn count(&self) -> usize {
        self.bridges.len()
    }
}

/// Finds every edge whose removal increases the number of connected
/// components. Runs in `O(n + m)` with an explicit stack.
pub fn find_bridges(g: &Graph) -> BridgeReport {
    let n = g.num_nodes();
    const UNSEEN: usize = usize::MAX;
    let mut disc = vec![UNSEEN; n];
    let mut low = vec![0usize; n];
    let mut time = 0;
    let mut bridges = Vec::new();
    // (node, parent, next neighbor position)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();

    for root in 0..n {
        if disc[root] != UNSEEN {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        stack.push((root, UNSEEN, 0));

        while let Some(top) = stack.last_mut() {
            let (u, parent, pos) = *top;
            if let Some(&v) = g.neighbors(u).get(pos) {
                top.2 += 1;
                if disc[v] == UNSEEN {
                    disc[v] = time;
                    low[v] = time;
                    time += 1;
                    stack.push((v, u, 0));
                } else if v != parent {
                    low[u] = low[u].min(disc[v]);
                }
            } else {
                stack.pop();
                if parent != UNSEEN {
                    low[parent] = low[parent].min(low[u]);
                    if low[u] > disc[parent] {
                        bridges.push((parent.min(u), parent.max(u)));
                    }
                }
            }
        }
    }
    bridges.sort_unstable();
    BridgeReport { bridges }
}
