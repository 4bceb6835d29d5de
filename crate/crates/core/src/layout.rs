//! 2D node placement for rendering. Every algorithm returns raw
//! coordinates which [`normalize`] fits into the unit viewport.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::spectral::{combinatorial_laplacian, jacobi_eigen};

/// Margin kept free on every side of the normalized viewport.
pub const MARGIN: f64 = 0.05;
pub const KK_GRADIENT_TOLERANCE: f64 = 1e-4;
pub const KK_MAX_SWEEPS: usize = 500;
pub const FA2_ITERATIONS: usize = 300;
pub const FA2_SCALING: f64 = 2.0;

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LayoutAlgorithm {
    KamadaKawai,
    ForceAtlas2,
    Spectral,
    Circular,
}

impl LayoutAlgorithm {
    pub const ALL: [LayoutAlgorithm; 4] = [
        LayoutAlgorithm::KamadaKawai,
        LayoutAlgorithm::ForceAtlas2,
        LayoutAlgorithm::Spectral,
        LayoutAlgorithm::Circular,
    ];
    /// Layouts rendered when none are requested explicitly.
    pub const DEFAULT: [LayoutAlgorithm; 3] = [
        LayoutAlgorithm::KamadaKawai,
        LayoutAlgorithm::ForceAtlas2,
        LayoutAlgorithm::Spectral,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LayoutAlgorithm::KamadaKawai => "kamada_kawai",
            LayoutAlgorithm::ForceAtlas2 => "forceatlas2",
            LayoutAlgorithm::Spectral => "spectral",
            LayoutAlgorithm::Circular => "circular",
        }
    }
}

impl fmt::Display for LayoutAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LayoutAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown layout '{s}'")))
    }
}

/// Normalized node positions in `[0, 1]²`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub positions: Vec<Point>,
    pub algorithm: LayoutAlgorithm,
}

/// Runs `algorithm` and normalizes the result. `seed` only affects
/// ForceAtlas2, whose starting positions are random.
pub fn compute_layout(g: &Graph, algorithm: LayoutAlgorithm, seed: u64) -> Result<Layout> {
    let raw = match algorithm {
        LayoutAlgorithm::KamadaKawai => kamada_kawai_raw(g),
        LayoutAlgorithm::ForceAtlas2 => forceatlas2_raw(g, FA2_ITERATIONS, seed),
        LayoutAlgorithm::Spectral => spectral_layout_raw(g)?,
        LayoutAlgorithm::Circular => circular_layout_raw(g),
    };
    Ok(Layout {
        positions: normalize(&raw),
        algorithm,
    })
}

/// Uniformly scales and centers points so their bounding box fits
/// `[MARGIN, 1 - MARGIN]²`. Coincident points all land at the center.
pub fn normalize(points: &[Point]) -> Vec<Point> {
    if points.is_empty() {
        return Vec::new();
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    if !extent.is_finite() || extent <= 1e-12 {
        return vec![[0.5, 0.5]; points.len()];
    }
    let scale = (1.0 - 2.0 * MARGIN) / extent;
    let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    points
        .iter()
        .map(|p| [0.5 + (p[0] - mid[0]) * scale, 0.5 + (p[1] - mid[1]) * scale])
        .collect()
}

/// Node `i` at angle `2πi/n` on the unit circle.
pub fn circular_layout_raw(g: &Graph) -> Vec<Point> {
    let n = g.num_nodes();
    (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect()
}

pub fn circular_layout(g: &Graph) -> Layout {
    Layout {
        positions: normalize(&circular_layout_raw(g)),
        algorithm: LayoutAlgorithm::Circular,
    }
}

/// Shortest-path distances as floats; unreachable pairs get one more than
/// the largest finite distance.
fn float_distances(g: &Graph) -> Vec<Vec<f64>> {
    let dist = g.distance_matrix();
    let far = dist.iter().flatten().flatten().copied().max().unwrap_or(0) + 1;
    dist.into_iter()
        .map(|row| row.into_iter().map(|d| d.unwrap_or(far) as f64).collect())
        .collect()
}

/// Weighted stress `Σ_{i<j} d⁻² (‖xᵢ − xⱼ‖ − d)²`.
pub fn stress(g: &Graph, positions: &[Point]) -> f64 {
    let d = float_distances(g);
    let n = positions.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            total += pair_stress(positions[i], positions[j], d[i][j]);
        }
    }
    total
}

#[inline]
fn pair_stress(a: Point, b: Point, d: f64) -> f64 {
    let r = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    (r - d).powi(2) / (d * d)
}

fn node_stress(x: Point, i: usize, pos: &[Point], d: &[f64]) -> f64 {
    pos.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, &p)| pair_stress(x, p, d[j]))
        .sum()
}

/// Gradient and Hessian of node `i`'s stress terms at `x`.
fn node_derivatives(x: Point, i: usize, pos: &[Point], d: &[f64]) -> ([f64; 2], [[f64; 2]; 2]) {
    let mut grad = [0.0; 2];
    let mut h = [[0.0; 2]; 2];
    for (j, p) in pos.iter().enumerate() {
        if j == i {
            continue;
        }
        let dx = x[0] - p[0];
        let dy = x[1] - p[1];
        let r = (dx * dx + dy * dy).sqrt().max(1e-9);
        let w = 2.0 / (d[j] * d[j]);
        let k = d[j] / r;
        grad[0] += w * (1.0 - k) * dx;
        grad[1] += w * (1.0 - k) * dy;
        let r3 = r * r * r;
        h[0][0] += w * (1.0 - d[j] * dy * dy / r3);
        h[1][1] += w * (1.0 - d[j] * dx * dx / r3);
        h[0][1] += w * d[j] * dx * dy / r3;
    }
    h[1][0] = h[0][1];
    (grad, h)
}

/// Starting circle for Kamada-Kawai, with diameter equal to the graph's.
pub fn kamada_kawai_initial(g: &Graph) -> Vec<Point> {
    let diameter = float_distances(g)
        .iter()
        .flatten()
        .copied()
        .fold(1.0, f64::max);
    circular_layout_raw(g)
        .into_iter()
        .map(|[x, y]| [x * diameter / 2.0, y * diameter / 2.0])
        .collect()
}

/// Kamada-Kawai by per-node Newton relaxation from a circle. A step is
/// only taken when it lowers the node's stress, so the total stress never
/// increases.
pub fn kamada_kawai_raw(g: &Graph) -> Vec<Point> {
    let n = g.num_nodes();
    if n <= 1 {
        return vec![[0.0, 0.0]; n];
    }
    let d = float_distances(g);
    let mut pos = kamada_kawai_initial(g);
    for _ in 0..KK_MAX_SWEEPS {
        let mut max_grad: f64 = 0.0;
        for i in 0..n {
            let (grad, h) = node_derivatives(pos[i], i, &pos, &d[i]);
            let norm = grad[0].hypot(grad[1]);
            max_grad = max_grad.max(norm);
            if norm < KK_GRADIENT_TOLERANCE {
                continue;
            }
            let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
            let mut step = if det > 1e-12 && h[0][0] > 0.0 {
                [
                    -(h[1][1] * grad[0] - h[0][1] * grad[1]) / det,
                    -(h[0][0] * grad[1] - h[1][0] * grad[0]) / det,
                ]
            } else {
                let scale = 0.1 / norm.max(1.0);
                [-grad[0] * scale, -grad[1] * scale]
            };
            let current = node_stress(pos[i], i, &pos, &d[i]);
            for _ in 0..20 {
                let trial = [pos[i][0] + step[0], pos[i][1] + step[1]];
                if node_stress(trial, i, &pos, &d[i]) < current {
                    pos[i] = trial;
                    break;
                }
                step = [step[0] / 2.0, step[1] / 2.0];
            }
        }
        if max_grad < KK_GRADIENT_TOLERANCE {
            break;
        }
    }
    pos
}

pub fn kamada_kawai(g: &Graph) -> Layout {
    Layout {
        positions: normalize(&kamada_kawai_raw(g)),
        algorithm: LayoutAlgorithm::KamadaKawai,
    }
}

/// ForceAtlas2 with degree-weighted repulsion, linear attraction and the
/// adaptive swing/traction speed control. Starts from uniform random
/// positions drawn from `seed`.
pub fn forceatlas2_raw(g: &Graph, iterations: usize, seed: u64) -> Vec<Point> {
    let n = g.num_nodes();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = (n as f64).sqrt().max(1.0);
    let mut pos: Vec<Point> = (0..n)
        .map(|_| [rng.gen_range(-side..side), rng.gen_range(-side..side)])
        .collect();
    if n <= 1 {
        return pos;
    }
    let mass: Vec<f64> = (0..n).map(|u| g.degree(u) as f64 + 1.0).collect();
    let mut old_force = vec![[0.0; 2]; n];
    let mut speed = 1.0;
    let mut speed_efficiency = 1.0;
    for _ in 0..iterations {
        let mut force = vec![[0.0f64; 2]; n];
        for i in 0..n {
            for j in i + 1..n {
                let dx = pos[i][0] - pos[j][0];
                let dy = pos[i][1] - pos[j][1];
                let r2 = dx * dx + dy * dy;
                if r2 > 0.0 {
                    // (kr m_i m_j / r) along the unit vector.
                    let f = FA2_SCALING * mass[i] * mass[j] / r2;
                    force[i][0] += dx * f;
                    force[i][1] += dy * f;
                    force[j][0] -= dx * f;
                    force[j][1] -= dy * f;
                }
            }
        }
        for (u, v) in g.edges() {
            let dx = pos[u][0] - pos[v][0];
            let dy = pos[u][1] - pos[v][1];
            force[u][0] -= dx;
            force[u][1] -= dy;
            force[v][0] += dx;
            force[v][1] += dy;
        }

        let mut total_swing = 0.0;
        let mut total_traction = 0.0;
        for i in 0..n {
            let sx = old_force[i][0] - force[i][0];
            let sy = old_force[i][1] - force[i][1];
            let tx = old_force[i][0] + force[i][0];
            let ty = old_force[i][1] + force[i][1];
            total_swing += mass[i] * sx.hypot(sy);
            total_traction += mass[i] * 0.5 * tx.hypot(ty);
        }
        if total_swing <= 0.0 {
            break;
        }
        let nf = n as f64;
        let estimated = 0.05 * nf.sqrt();
        let min_jt = estimated.sqrt();
        let max_jt: f64 = 10.0;
        let mut jt = min_jt.max(max_jt.min(estimated * total_traction / (nf * nf)));
        let min_efficiency = 0.05;
        if total_traction > 0.0 && total_swing / total_traction > 2.0 {
            if speed_efficiency > min_efficiency {
                speed_efficiency *= 0.5;
            }
            jt = jt.max(1.0);
        }
        let target_speed = jt * speed_efficiency * total_traction / total_swing;
        if total_swing > jt * total_traction {
            if speed_efficiency > min_efficiency {
                speed_efficiency *= 0.7;
            }
        } else if speed < 1000.0 {
            speed_efficiency *= 1.3;
        }
        let max_rise = 0.5;
        speed += (target_speed - speed).min(max_rise * speed);

        for i in 0..n {
            let sx = old_force[i][0] - force[i][0];
            let sy = old_force[i][1] - force[i][1];
            let swinging = mass[i] * sx.hypot(sy);
            let factor = speed / (1.0 + (speed * swinging).sqrt());
            pos[i][0] += force[i][0] * factor;
            pos[i][1] += force[i][1] * factor;
        }
        old_force = force;
    }
    pos
}

pub fn forceatlas2(g: &Graph, iterations: usize, seed: u64) -> Layout {
    Layout {
        positions: normalize(&forceatlas2_raw(g, iterations, seed)),
        algorithm: LayoutAlgorithm::ForceAtlas2,
    }
}

/// Coordinates from the Laplacian eigenvectors of the two smallest
/// nonzero eigenvalues (indices 1 and 2 for a connected graph). Each
/// vector's sign is fixed so its first nonzero entry is positive.
pub fn spectral_layout_raw(g: &Graph) -> Result<Vec<Point>> {
    let n = g.num_nodes();
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "spectral layout needs at least 3 nodes, got {n}"
        )));
    }
    let eigen = jacobi_eigen(&combinatorial_laplacian(g))?;
    let axis = |k: usize| -> Vec<f64> {
        let v = &eigen.vectors[k];
        let sign = v
            .iter()
            .find(|x| x.abs() > 1e-9)
            .map_or(1.0, |x| x.signum());
        v.iter().map(|x| x * sign).collect()
    };
    let (xs, ys) = (axis(1), axis(2));
    Ok(xs.into_iter().zip(ys).map(|(x, y)| [x, y]).collect())
}

pub fn spectral_layout(g: &Graph) -> Result<Layout> {
    Ok(Layout {
        positions: normalize(&spectral_layout_raw(g)?),
        algorithm: LayoutAlgorithm::Spectral,
    })
}
