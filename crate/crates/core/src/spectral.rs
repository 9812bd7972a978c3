//! Dense symmetric eigensolver and Laplacian spectra.
//!
//! Every matrix in this crate is at most a few dozen rows, so a cyclic Jacobi
//! solver is used throughout: it is unconditionally convergent on symmetric
//! input and yields orthonormal eigenvectors to working precision.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Off-diagonal Frobenius norm at which a Jacobi run is declared converged,
/// relative to `max(1, ||A||_F)`.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Eigenvalues below this are treated as zero when testing connectivity.
pub const ZERO_EIGENVALUE: f64 = 1e-9;

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Column-major eigenvectors, column `k` paired with `values[k]`; empty
    /// when vectors were not requested.
    pub vectors: Vec<f64>,
    pub sweeps: usize,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> &[f64] {
        let n = self.values.len();
        &self.vectors[k * n..(k + 1) * n]
    }
}

/// Cyclic Jacobi eigen-decomposition of the row-major symmetric `n × n` matrix.
pub fn symmetric_eigen(matrix: &[f64], n: usize, with_vectors: bool) -> Result<SymmetricEigen> {
    assert_eq!(matrix.len(), n * n, "matrix must be n × n");
    let mut a = matrix.to_vec();
    let mut v = if with_vectors {
        let mut id = vec![0.0; n * n];
        for i in 0..n {
            id[i * n + i] = 1.0;
        }
        id
    } else {
        Vec::new()
    };

    let scale = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
    let threshold = JACOBI_TOLERANCE * scale;
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a, n);
        if off <= threshold {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Numeric {
                message: format!("Jacobi did not converge (off-diagonal norm {off:e})"),
                iterations: sweeps,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }

    // v holds eigenvectors as columns of a row-major matrix (v[r * n + k]).
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x * n + x].total_cmp(&a[y * n + y]));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let vectors = if with_vectors {
        order
            .iter()
            .flat_map(|&k| (0..n).map(move |r| (r, k)))
            .map(|(r, k)| v[r * n + k])
            .collect()
    } else {
        Vec::new()
    };
    Ok(SymmetricEigen {
        values,
        vectors,
        sweeps,
    })
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                sum += a[i * n + j] * a[i * n + j];
            }
        }
    }
    sum.sqrt()
}

fn rotate(a: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    a[p * n + p] -= t * apq;
    a[q * n + q] += t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = a[r * n + p];
        let arq = a[r * n + q];
        let new_rp = c * arp - s * arq;
        let new_rq = s * arp + c * arq;
        a[r * n + p] = new_rp;
        a[p * n + r] = new_rp;
        a[r * n + q] = new_rq;
        a[q * n + r] = new_rq;
    }
    if !v.is_empty() {
        for r in 0..n {
            let vrp = v[r * n + p];
            let vrq = v[r * n + q];
            v[r * n + p] = c * vrp - s * vrq;
            v[r * n + q] = s * vrp + c * vrq;
        }
    }
}

/// Dense Laplacian `L = D - A` of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianView {
    n: usize,
    data: Vec<f64>,
}

impl LaplacianView {
    pub fn new(graph: &Graph) -> Self {
        Self {
            n: graph.n_v(),
            data: graph.laplacian(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        let eig = symmetric_eigen(&self.data, self.n, false)?;
        Ok(Spectrum {
            values: eig.values,
        })
    }
}

/// Ascending Laplacian eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
}

impl Spectrum {
    /// `λ_2`, zero for a single vertex.
    pub fn algebraic_connectivity(&self) -> f64 {
        self.values.get(1).copied().unwrap_or(0.0)
    }

    pub fn largest(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// Eigenratio `λ_n / λ_2`; infinite for disconnected graphs.
    pub fn eigenratio(&self) -> f64 {
        let l2 = self.algebraic_connectivity();
        if l2 > ZERO_EIGENVALUE {
            self.largest() / l2
        } else {
            f64::INFINITY
        }
    }
}

/// Sorted Laplacian eigenvalues of `graph`.
pub fn spectrum(graph: &Graph) -> Result<Spectrum> {
    LaplacianView::new(graph).spectrum()
}
