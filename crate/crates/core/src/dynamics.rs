//! Synchronization objectives for diffusively coupled scalar nodes.
//!
//! Both objectives map a graph to `J ∈ [0, 1]`, larger meaning faster
//! synchronization. The network state evolves as `ẋ = f(x) − L x`, i.e. each
//! node is pulled towards its neighbours by `Σ_{j ∈ N(i)} (x_j − x_i)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, param, Error, Result};
use crate::graph::Graph;
use crate::spectral::symmetric_eigen;

/// Linear stable nodes `ẋ_i = a_i x_i`, `a_i < 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearNodeDynamics {
    pub a: Vec<f64>,
}

/// Bistable nodes `ẋ_i = a_i (x_i − x_i³)`, `a_i > 0`, started from `x0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonlinearNodeDynamics {
    pub a: Vec<f64>,
    pub x0: Vec<f64>,
    pub e_thres: f64,
    pub t_max: f64,
    pub dt: f64,
}

pub const DEFAULT_DT: f64 = 1e-3;

/// Any state above this magnitude is reported as divergence.
pub const DIVERGENCE_BOUND: f64 = 1e6;

/// Node dynamics hidden behind a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "lowercase")]
pub enum NodeDynamics {
    Linear(LinearNodeDynamics),
    Nonlinear(NonlinearNodeDynamics),
}

impl NodeDynamics {
    pub fn n_v(&self) -> usize {
        match self {
            Self::Linear(d) => d.a.len(),
            Self::Nonlinear(d) => d.a.len(),
        }
    }

    pub fn objective(&self, g: &Graph) -> Result<SyncResult> {
        match self {
            Self::Linear(d) => linear_objective(d, g),
            Self::Nonlinear(d) => nonlinear_objective(d, g),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "lowercase")]
pub enum SyncDetail {
    /// Slowest uncoupled mode, slowest coupled mode, and the lower bound on
    /// the latter reached by the complete graph.
    Linear {
        lambda_u: f64,
        lambda_c: f64,
        beta: f64,
    },
    Nonlinear {
        t_sync: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyncResult {
    pub j: f64,
    #[serde(flatten)]
    pub detail: SyncDetail,
}

fn check_graph(g: &Graph, n_v: usize) -> Result<()> {
    if g.n_v() != n_v {
        return Err(param(format!(
            "graph has {} vertices but dynamics describe {n_v} nodes",
            g.n_v()
        )));
    }
    if !g.is_connected() {
        return Err(domain("synchronization objectives need a connected graph"));
    }
    Ok(())
}

/// Normalized gain of the slowest coupled mode over the slowest node.
pub fn linear_objective(dyn_: &LinearNodeDynamics, g: &Graph) -> Result<SyncResult> {
    let n = dyn_.a.len();
    if n == 0 {
        return Err(param("empty node dynamics"));
    }
    if let Some(&bad) = dyn_.a.iter().find(|&&a| !(a < 0.0)) {
        return Err(param(format!("linear nodes must be stable, got a = {bad}")));
    }
    check_graph(g, n)?;

    let mut m = g.laplacian();
    m.iter_mut().for_each(|x| *x = -*x);
    for (i, a) in dyn_.a.iter().enumerate() {
        m[i * n + i] += a;
    }
    let eig = symmetric_eigen(&m, n, false)?;
    let lambda_c = eig.values[n - 1];
    let lambda_u = dyn_.a.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let nf = n as f64;
    let beta = (dyn_.a.iter().sum::<f64>() - nf * (nf - 1.0)) / nf;
    let raw = -(lambda_c - lambda_u) / (beta - lambda_u).abs();
    Ok(SyncResult {
        j: raw.clamp(0.0, 1.0),
        detail: SyncDetail::Linear {
            lambda_u,
            lambda_c,
            beta,
        },
    })
}

/// States on a uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Row-major `(times.len()) × n_v`.
    pub states: Vec<f64>,
    pub n_v: usize,
}

impl Trajectory {
    pub fn state(&self, step: usize) -> &[f64] {
        &self.states[step * self.n_v..(step + 1) * self.n_v]
    }
}

impl NonlinearNodeDynamics {
    fn validate(&self) -> Result<usize> {
        let n = self.a.len();
        if n == 0 || self.x0.len() != n {
            return Err(param(format!(
                "a has {} entries but x0 has {}",
                n,
                self.x0.len()
            )));
        }
        if let Some(&bad) = self.a.iter().find(|&&a| !(a > 0.0)) {
            return Err(param(format!("bistable nodes need a > 0, got {bad}")));
        }
        if !(self.dt > 0.0 && self.t_max > 0.0 && self.e_thres > 0.0) {
            return Err(param("dt, t_max and e_thres must be positive"));
        }
        let steps = (self.t_max / self.dt).round();
        if (steps * self.dt - self.t_max).abs() > 1e-9 * self.t_max {
            return Err(param(format!(
                "dt = {} does not divide t_max = {}",
                self.dt, self.t_max
            )));
        }
        Ok(steps as usize)
    }
}

fn rhs(a: &[f64], g: &Graph, x: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let xi = x[i];
        let coupling: f64 = g.neighbors(i).iter().map(|&j| x[j] - xi).sum();
        *o = a[i] * (xi - xi * xi * xi) + coupling;
    }
}

/// Fixed-step RK4, calling `visit(step, state)` on every grid point
/// including the initial one.
fn integrate<F>(dyn_: &NonlinearNodeDynamics, g: &Graph, mut visit: F) -> Result<()>
where
    F: FnMut(usize, &[f64]),
{
    let steps = dyn_.validate()?;
    let n = dyn_.a.len();
    check_graph(g, n)?;
    let h = dyn_.dt;
    let mut x = dyn_.x0.clone();
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut tmp = vec![0.0; n];
    visit(0, &x);
    for step in 1..=steps {
        rhs(&dyn_.a, g, &x, &mut k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k1[i];
        }
        rhs(&dyn_.a, g, &tmp, &mut k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * h * k2[i];
        }
        rhs(&dyn_.a, g, &tmp, &mut k3);
        for i in 0..n {
            tmp[i] = x[i] + h * k3[i];
        }
        rhs(&dyn_.a, g, &tmp, &mut k4);
        for i in 0..n {
            x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if x.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_BOUND) {
            return Err(Error::Numeric {
                message: "node state diverged".into(),
                iterations: step,
            });
        }
        visit(step, &x);
    }
    Ok(())
}

pub fn simulate_nonlinear(dyn_: &NonlinearNodeDynamics, g: &Graph) -> Result<Trajectory> {
    let n = dyn_.a.len();
    let mut times = Vec::new();
    let mut states = Vec::new();
    integrate(dyn_, g, |step, x| {
        times.push(step as f64 * dyn_.dt);
        states.extend_from_slice(x);
    })?;
    Ok(Trajectory {
        times,
        states,
        n_v: n,
    })
}

/// Total absolute deviation from the mean state, `Σ_i |x_i − mean(x)|`.
pub fn total_error(x: &[f64]) -> f64 {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter().map(|v| (v - mean).abs()).sum()
}

/// `J = 1 − t_sync / t_max`, with `t_sync` the first grid time after which the
/// total error never again exceeds `e_thres`.
pub fn nonlinear_objective(dyn_: &NonlinearNodeDynamics, g: &Graph) -> Result<SyncResult> {
    let mut last_violation: Option<usize> = None;
    let mut final_step = 0;
    integrate(dyn_, g, |step, x| {
        if total_error(x) > dyn_.e_thres {
            last_violation = Some(step);
        }
        final_step = step;
    })?;
    let t_sync = match last_violation {
        None => 0.0,
        Some(s) if s == final_step => dyn_.t_max,
        Some(s) => (s + 1) as f64 * dyn_.dt,
    };
    Ok(SyncResult {
        j: (1.0 - t_sync / dyn_.t_max).clamp(0.0, 1.0),
        detail: SyncDetail::Nonlinear { t_sync },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::all_pairs;

    fn complete(n: usize) -> Graph {
        Graph::new(n, all_pairs(n)).unwrap()
    }
    fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }
    fn lin(a: &[f64]) -> LinearNodeDynamics {
        LinearNodeDynamics { a: a.to_vec() }
    }
    fn bistable(a: Vec<f64>, x0: Vec<f64>) -> NonlinearNodeDynamics {
        NonlinearNodeDynamics {
            a,
            x0,
            e_thres: 0.01,
            t_max: 1.0,
            dt: DEFAULT_DT,
        }
    }

    #[test]
    fn homogeneous_linear_nodes_gain_nothing() {
        let r = linear_objective(&lin(&[-1.0, -1.0]), &complete(2)).unwrap();
        assert_eq!(r.j, 0.0);
        let SyncDetail::Linear { lambda_u, lambda_c, .. } = r.detail else {
            panic!()
        };
        assert_eq!(lambda_u, -1.0);
        assert!((lambda_c + 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_node_closed_form() {
        let r = linear_objective(&lin(&[-1.0, -3.0]), &complete(2)).unwrap();
        // A − L = [[-2, 1], [1, -4]]: eigenvalues −3 ± √2
        let SyncDetail::Linear { lambda_c, beta, .. } = r.detail else {
            panic!()
        };
        assert!((lambda_c - (-3.0 + 2f64.sqrt())).abs() < 1e-12);
        assert_eq!(beta, -3.0);
        assert!((r.j - (2.0 - 2f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn beta_is_graph_independent() {
        let d = lin(&[-1.0, -2.0, -3.0]);
        for g in [complete(3), path(3)] {
            let SyncDetail::Linear { beta, .. } = linear_objective(&d, &g).unwrap().detail else {
                panic!()
            };
            assert_eq!(beta, -4.0);
        }
    }

    #[test]
    fn linear_errors() {
        assert!(linear_objective(&lin(&[-1.0, 0.0]), &complete(2)).is_err());
        let disconnected = Graph::new(3, [(0, 1)]).unwrap();
        assert!(matches!(
            linear_objective(&lin(&[-1.0, -2.0, -3.0]), &disconnected),
            Err(Error::Domain(_))
        ));
        assert!(linear_objective(&lin(&[-1.0, -2.0]), &complete(3)).is_err());
    }

    #[test]
    fn synchronized_start_stays_synchronized() {
        // heterogeneous a leaves the sync manifold unless every node starts
        // at a common equilibrium
        let d = bistable(vec![1.0, 2.0, 3.0], vec![1.0; 3]);
        let d_eq = bistable(vec![1.5; 3], vec![0.3; 3]);
        let traj = simulate_nonlinear(&d_eq, &path(3)).unwrap();
        for s in 0..traj.times.len() {
            let x = traj.state(s);
            assert!(x.iter().all(|&v| v == x[0]));
        }
        let r = nonlinear_objective(&d_eq, &path(3)).unwrap();
        assert_eq!(r.j, 1.0);
        assert_eq!(nonlinear_objective(&d, &path(3)).unwrap().j, 1.0);
    }

    #[test]
    fn equilibrium_at_one() {
        let d = bistable(vec![1.0], vec![1.0]);
        let traj = simulate_nonlinear(&d, &Graph::new(1, []).unwrap()).unwrap();
        assert!(traj.states.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn two_nodes_approach_one_monotonically() {
        let d = bistable(vec![1.0, 1.0], vec![0.5, 0.5]);
        let traj = simulate_nonlinear(&d, &complete(2)).unwrap();
        let xs: Vec<f64> = (0..traj.times.len()).map(|s| traj.state(s)[0]).collect();
        assert!(xs.windows(2).all(|w| w[1] > w[0] && w[1] < 1.0));
        // scalar solution x(t) = 1 / sqrt(1 + 3 e^{-2t}) at t = 1
        let exact = 1.0 / (1.0 + 3.0 * (-2.0f64).exp()).sqrt();
        assert!((xs.last().unwrap() - exact).abs() < 1e-10);
    }

    #[test]
    fn denser_coupling_synchronizes_faster() {
        let a: Vec<f64> = (1..=10).map(|i| 1.0 + 0.2 * i as f64).collect();
        let x0 = vec![-1.0, -2.0, -3.0, -4.0, -5.0, 2.0, 4.0, 6.0, 8.0, 10.0];
        let mut d = bistable(a, x0);
        d.t_max = 5.0;
        let jc = nonlinear_objective(&d, &complete(10)).unwrap().j;
        let jp = nonlinear_objective(&d, &path(10)).unwrap().j;
        assert!(jc > jp, "complete {jc} vs path {jp}");
    }

    #[test]
    fn loose_threshold_is_met_immediately() {
        let mut d = bistable(vec![1.0, 1.0], vec![0.4, 0.6]);
        d.e_thres = 1.0;
        let r = nonlinear_objective(&d, &complete(2)).unwrap();
        assert_eq!(r.detail, SyncDetail::Nonlinear { t_sync: 0.0 });
        assert_eq!(r.j, 1.0);
    }

    #[test]
    fn nonlinear_parameter_errors() {
        let mut d = bistable(vec![1.0, 1.0], vec![0.0, 1.0]);
        d.dt = 0.3;
        assert!(nonlinear_objective(&d, &complete(2)).is_err());
        let d = bistable(vec![1.0, -1.0], vec![0.0, 1.0]);
        assert!(nonlinear_objective(&d, &complete(2)).is_err());
        let d = bistable(vec![1.0, 1.0], vec![0.0]);
        assert!(nonlinear_objective(&d, &complete(2)).is_err());
    }

    #[test]
    fn dynamics_json_shape() {
        let d = NodeDynamics::Linear(lin(&[-1.0]));
        assert_eq!(
            serde_json::to_string(&d).unwrap(),
            r#"{"case":"linear","a":[-1.0]}"#
        );
    }
}
