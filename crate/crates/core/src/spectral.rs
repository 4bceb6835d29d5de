//! Dense symmetric eigensolver and the Laplacian spectra built on it.

use crate::error::{Error, Result};
use crate::graph::{connected_components, Graph};

/// Off-diagonal Frobenius norm at which the rotation sweeps stop.
pub const JACOBI_TOLERANCE: f64 = 1e-10;
/// Eigenvalues with magnitude below this are treated as zero.
pub const ZERO_EIGENVALUE: f64 = 1e-8;
const MAX_SWEEPS: usize = 100;

/// Row-major dense symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                self.data[i * self.n..(i + 1) * self.n]
                    .iter()
                    .zip(x)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            sum += a[i * n + j] * a[i * n + j];
        }
    }
    (2.0 * sum).sqrt()
}

/// Eigenpairs in ascending eigenvalue order; `vectors[k]` belongs to
/// `values[k]` and has unit norm.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl Eigen {
    /// `V diag(values) Vᵀ` as a dense matrix.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.values.len();
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let s = self
                    .values
                    .iter()
                    .zip(&self.vectors)
                    .map(|(&l, v)| l * v[i] * v[j])
                    .sum();
                m.set(i, j, s);
            }
        }
        m
    }
}

/// Full eigendecomposition by cyclic Jacobi rotations.
pub fn jacobi_eigen(matrix: &SymMatrix) -> Result<Eigen> {
    jacobi(matrix, true)
}

/// Eigenvalues only, ascending. The rotations are the same as in
/// [`jacobi_eigen`], so the values are bit-identical; only the
/// eigenvector accumulation is skipped.
pub fn jacobi_eigenvalues(matrix: &SymMatrix) -> Result<Vec<f64>> {
    Ok(jacobi(matrix, false)?.values)
}

fn jacobi(matrix: &SymMatrix, with_vectors: bool) -> Result<Eigen> {
    let n = matrix.dim();
    let mut a = matrix.data.clone();
    let mut v = if with_vectors {
        vec![0.0; n * n]
    } else {
        Vec::new()
    };
    if with_vectors {
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
    }
    // Entries this small are left alone; their total contribution stays
    // well below the stopping tolerance.
    let skip = JACOBI_TOLERANCE * 1e-3 / n.max(1) as f64;

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a, n);
        if off < JACOBI_TOLERANCE {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < skip {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a[p * n + p] -= t * apq;
                a[q * n + q] += t * apq;
                a[p * n + q] = 0.0;
                // Only the upper triangle is kept current.
                let rotate = |g: f64, h: f64| (g - s * (h + g * tau), h + s * (g - h * tau));
                for k in 0..p {
                    let (g, h) = rotate(a[k * n + p], a[k * n + q]);
                    a[k * n + p] = g;
                    a[k * n + q] = h;
                }
                for k in p + 1..q {
                    let (g, h) = rotate(a[p * n + k], a[k * n + q]);
                    a[p * n + k] = g;
                    a[k * n + q] = h;
                }
                for k in q + 1..n {
                    let (g, h) = rotate(a[p * n + k], a[q * n + k]);
                    a[p * n + k] = g;
                    a[q * n + k] = h;
                }
                if !with_vectors {
                    continue;
                }
                // Eigenvectors are stored as rows of `v`.
                let (head, tail) = v.split_at_mut(q * n);
                let vp = &mut head[p * n..(p + 1) * n];
                let vq = &mut tail[..n];
                for (g, h) in vp.iter_mut().zip(vq.iter_mut()) {
                    let (g0, h0) = (*g, *h);
                    *g = g0 - s * (h0 + g0 * tau);
                    *h = h0 + s * (g0 - h0 * tau);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors = if with_vectors {
        order
            .iter()
            .map(|&row| v[row * n..(row + 1) * n].to_vec())
            .collect()
    } else {
        Vec::new()
    };
    Ok(Eigen { values, vectors })
}

/// `I - D^{-1/2} A D^{-1/2}`.
pub fn normalized_laplacian(g: &Graph) -> Result<SymMatrix> {
    let n = g.num_nodes();
    let mut inv_sqrt = Vec::with_capacity(n);
    for u in 0..n {
        let d = g.degree(u);
        if d == 0 {
            return Err(Error::IsolatedNode(u));
        }
        inv_sqrt.push(1.0 / (d as f64).sqrt());
    }
    let mut m = SymMatrix::zeros(n);
    for u in 0..n {
        m.set(u, u, 1.0);
    }
    for (u, v) in g.edges() {
        m.set(u, v, -inv_sqrt[u] * inv_sqrt[v]);
    }
    Ok(m)
}

/// Combinatorial Laplacian `D - A`.
pub fn combinatorial_laplacian(g: &Graph) -> SymMatrix {
    let n = g.num_nodes();
    let mut m = SymMatrix::zeros(n);
    for u in 0..n {
        m.set(u, u, g.degree(u) as f64);
    }
    for (u, v) in g.edges() {
        m.set(u, v, -1.0);
    }
    m
}

#[derive(Debug, Clone)]
pub struct SpectralSummary {
    /// Second-smallest eigenvalue of the normalized Laplacian.
    pub lambda2: f64,
    /// All eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
}

/// Spectral gap of a connected graph with at least two nodes.
pub fn spectral_gap(g: &Graph) -> Result<SpectralSummary> {
    if g.num_nodes() < 2 {
        return Err(Error::InvalidGraph(
            "spectral gap needs at least two nodes".into(),
        ));
    }
    let comps = connected_components(g).count;
    if comps != 1 {
        return Err(Error::Disconnected { components: comps });
    }
    let eigenvalues = jacobi_eigenvalues(&normalized_laplacian(g)?)?;
    Ok(SpectralSummary {
        lambda2: eigenvalues[1],
        eigenvalues,
    })
}
