//! Complementarity solver and the two auxiliary programs built on it.
//!
//! [`solve_mixed`] splits the free variables `π = π⁺ − π⁻`, which turns the
//! mixed problem into a standard LCP with matrix
//!
//! ```text
//! [  M   N  −N ]
//! [ −Nᵀ −S   S ]
//! [  Nᵀ  S  −S ]
//! ```
//!
//! and right-hand side `(q, r, −r)`. When `[[M, N], [−Nᵀ, −S]]` is monotone this
//! matrix is positive semidefinite, so Lemke's method either finds a
//! solution or ends on a ray that certifies infeasibility.

mod dispatch;
mod feasibility;
mod lemke;
mod problem;

use serde::Serialize;

pub use dispatch::{least_cost_dispatch, DispatchResult};
pub use feasibility::{check_batch_feasibility, throughput_limit, FeasibilityVerdict};
pub use problem::{MixedLcp, Residual};

use crate::error::{Error, Result};
use crate::sparse::Csr;
use lemke::{lemke, LemkeParams, Termination};

/// Order in which the LCP variables are presented to the pivoting rule.
/// Different orders can select different solutions of degenerate problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum PivotOrdering {
    #[default]
    Natural,
    Reversed,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub enum Covering {
    #[default]
    Ones,
    /// Strictly positive vector over the split LCP variables, in natural
    /// order (`z`, then `π⁺`, then `π⁻`).
    Vector(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    pub pivot_tolerance: f64,
    pub complementarity_tolerance: f64,
    /// Defaults to 50 times the split LCP dimension.
    pub max_pivots: Option<usize>,
    pub lexicographic: bool,
    pub covering: Covering,
    pub ordering: PivotOrdering,
    /// Symmetric max-norm equilibration before pivoting.
    pub scaling: bool,
    /// Record one line per pivot: `<count> enter=<var> leave=<var> t=<value>`,
    /// where `t` is the covering variable and `w<i>`/`z<i>` index the split LCP.
    pub trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            pivot_tolerance: 1e-9,
            complementarity_tolerance: 1e-8,
            max_pivots: None,
            lexicographic: true,
            covering: Covering::Ones,
            ordering: PivotOrdering::Natural,
            scaling: true,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SolveStatus {
    Solved,
    /// Ray termination with a Farkas certificate: no point satisfies the
    /// constraints.
    Infeasible,
    /// Ray termination without a certificate.
    RayTermination,
    IterLimit,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumSolution {
    pub z: Vec<f64>,
    pub pi: Vec<f64>,
    pub residual: Residual,
    pub pivots: usize,
    pub status: SolveStatus,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<String>,
}

impl EquilibriumSolution {
    pub fn is_solved(&self) -> bool {
        self.status == SolveStatus::Solved
    }

    /// Turns every status but `Solved` into an error.
    pub fn into_solved(self) -> Result<EquilibriumSolution> {
        if self.is_solved() {
            Ok(self)
        } else {
            Err(Error::Solver {
                status: self.status,
                pivots: self.pivots,
            })
        }
    }
}

fn split_matrix(p: &MixedLcp) -> (Csr, Vec<f64>) {
    let (nz, np) = (p.n_z(), p.n_pi());
    let dim = nz + 2 * np;
    let (a, b) = (nz, nz + np);
    let mut t = Vec::with_capacity(p.m.nnz() + 4 * p.n.nnz() + 4 * p.s.nnz());
    t.extend(p.m.triplets());
    for (r, c, v) in p.n.triplets() {
        t.push((r, a + c, v));
        t.push((r, b + c, -v));
        t.push((a + c, r, -v));
        t.push((b + c, r, v));
    }
    for (r, c, v) in p.s.triplets() {
        t.push((a + r, a + c, -v));
        t.push((a + r, b + c, v));
        t.push((b + r, a + c, v));
        t.push((b + r, b + c, -v));
    }
    let mut rhs = p.q.clone();
    rhs.extend(p.r.iter().copied());
    rhs.extend(p.r.iter().map(|v| -v));
    (Csr::from_triplets(dim, dim, &t), rhs)
}

/// Symmetric equilibration `D A D` with `D` from a few max-norm sweeps.
fn equilibrate(a: &Csr) -> Vec<f64> {
    let n = a.nrows();
    // round-off entries (e.g. PTDF differences of 1e-17) would otherwise
    // blow the scale of an otherwise empty row up to ~1e8
    let amax = a.triplets().iter().fold(0.0f64, |m, t| m.max(t.2.abs()));
    let trip: Vec<_> = a.triplets().into_iter().filter(|t| t.2.abs() > 1e-12 * amax).collect();
    let mut d = vec![1.0; n];
    for _ in 0..8 {
        let mut big = vec![0.0f64; n];
        for &(r, c, v) in &trip {
            let s = (v * d[r] * d[c]).abs();
            big[r] = big[r].max(s);
            big[c] = big[c].max(s);
        }
        let mut done = true;
        for i in 0..n {
            if big[i] > 0.0 {
                if (big[i] - 1.0).abs() > 0.1 {
                    done = false;
                }
                d[i] /= big[i].sqrt();
            }
        }
        if done {
            break;
        }
    }
    d
}

/// Solves a mixed LCP with Lemke's method.
pub fn solve_mixed(p: &MixedLcp, cfg: &SolverConfig) -> Result<EquilibriumSolution> {
    let (nz, np) = (p.n_z(), p.n_pi());
    let (a, b) = split_matrix(p);
    let dim = b.len();

    let d = if cfg.scaling { equilibrate(&a) } else { vec![1.0; dim] };
    let perm: Vec<usize> = match cfg.ordering {
        PivotOrdering::Natural => (0..dim).collect(),
        PivotOrdering::Reversed => (0..dim).rev().collect(),
    };
    // position k of the permuted problem holds original variable perm[k]
    let mut inv = vec![0; dim];
    for (k, &o) in perm.iter().enumerate() {
        inv[o] = k;
    }
    let scaled: Vec<(usize, usize, f64)> = a
        .triplets()
        .into_iter()
        .map(|(r, c, v)| (inv[r], inv[c], v * d[r] * d[c]))
        .collect();
    let ap = Csr::from_triplets(dim, dim, &scaled);
    let bp: Vec<f64> = perm.iter().map(|&o| b[o] * d[o]).collect();
    let covering: Vec<f64> = match &cfg.covering {
        Covering::Ones => vec![1.0; dim],
        Covering::Vector(v) => {
            if v.len() != dim || v.iter().any(|x| !(*x > 0.0)) {
                return Err(Error::Numerical(format!(
                    "covering vector must have {dim} strictly positive entries"
                )));
            }
            perm.iter().map(|&o| v[o]).collect()
        }
    };

    let out = lemke(
        &ap,
        &bp,
        &LemkeParams {
            pivot_tol: cfg.pivot_tolerance,
            max_pivots: cfg.max_pivots.unwrap_or(50 * dim.max(1)),
            lexicographic: cfg.lexicographic,
            covering: &covering,
            trace: cfg.trace,
        },
    )?;

    let mut x = vec![0.0; dim];
    for (k, &o) in perm.iter().enumerate() {
        x[o] = out.x[k] * d[o];
    }
    let z = x[..nz].to_vec();
    let pi: Vec<f64> = (0..np).map(|i| x[nz + i] - x[nz + np + i]).collect();
    let residual = p.residual(&z, &pi);

    let status = match out.termination {
        Termination::Solved => {
            let scale = p.data_scale();
            let zmax = z.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            let tol = cfg.complementarity_tolerance * scale;
            if residual.equality > tol || residual.nonneg > tol || residual.complementarity > tol * zmax {
                let w = p.w(&z, &pi);
                let eq = p.equality_gap(&z, &pi);
                let row = (0..nz)
                    .map(|i| (i, (z[i] * w[i]).abs().max(-w[i])))
                    .chain((0..np).map(|i| (nz + i, eq[i].abs())))
                    .max_by(|a, b| a.1.total_cmp(&b.1))
                    .map_or(0, |x| x.0);
                return Err(Error::PivotBreakdown { row });
            }
            SolveStatus::Solved
        }
        Termination::IterLimit => SolveStatus::IterLimit,
        Termination::Ray => {
            let dir = out.ray.as_deref().unwrap_or(&[]);
            let mut y = vec![0.0; dim];
            for (k, &o) in perm.iter().enumerate() {
                y[o] = dir[k] * d[o];
            }
            if out.ray_x0.abs() < 1e-12 && farkas_certificate(&a, &b, &y) {
                SolveStatus::Infeasible
            } else {
                SolveStatus::RayTermination
            }
        }
    };
    Ok(EquilibriumSolution {
        z,
        pi,
        residual,
        pivots: out.pivots,
        status,
        trace: out.trace,
    })
}

/// `y >= 0`, `Aᵀy <= 0`, `bᵀy < 0` proves `{x >= 0 : Ax + b >= 0}` empty.
fn farkas_certificate(a: &Csr, b: &[f64], y: &[f64]) -> bool {
    let ymax = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if ymax == 0.0 {
        return false;
    }
    let y: Vec<f64> = y.iter().map(|v| v / ymax).collect();
    if y.iter().any(|&v| v < -1e-9) {
        return false;
    }
    let amax = a.triplets().iter().fold(1.0f64, |m, t| m.max(t.2.abs()));
    let mut aty = vec![0.0; y.len()];
    a.mul_add_t(&y, &mut aty);
    let by: f64 = b.iter().zip(&y).map(|(p, q)| p * q).sum();
    let bmax = b.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    aty.iter().all(|&v| v <= 1e-7 * amax) && by < -1e-9 * bmax
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcp(m: &[&[f64]], q: &[f64]) -> MixedLcp {
        let n = q.len();
        let mut t = Vec::new();
        for (r, row) in m.iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                t.push((r, c, v));
            }
        }
        MixedLcp::lcp(Csr::from_triplets(n, n, &t), q.to_vec())
    }

    #[test]
    fn separable_lcp() {
        let s = solve_mixed(&lcp(&[&[1.0, 0.0], &[0.0, 1.0]], &[-1.0, 2.0]), &SolverConfig::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Solved);
        assert!((s.z[0] - 1.0).abs() < 1e-12 && s.z[1].abs() < 1e-12);
    }

    #[test]
    fn coupled_lcp() {
        let s = solve_mixed(&lcp(&[&[2.0, 1.0], &[1.0, 2.0]], &[-5.0, -6.0]), &SolverConfig::default()).unwrap();
        assert!((s.z[0] - 4.0 / 3.0).abs() < 1e-12);
        assert!((s.z[1] - 7.0 / 3.0).abs() < 1e-12);
        assert!(s.residual.max() < 1e-12);
    }

    #[test]
    fn trivial_lcp_needs_no_pivots() {
        let s = solve_mixed(&lcp(&[&[1.0]], &[3.0]), &SolverConfig::default()).unwrap();
        assert_eq!(s.pivots, 0);
        assert_eq!(s.z, vec![0.0]);
    }

    #[test]
    fn infeasible_lcp_is_certified() {
        // w = -x - 1 can never be nonnegative
        let s = solve_mixed(&lcp(&[&[0.0, 1.0], &[-1.0, 0.0]], &[-1.0, -1.0]), &SolverConfig::default()).unwrap();
        assert_eq!(s.status, SolveStatus::Infeasible);
    }

    #[test]
    fn free_variable_system() {
        // min ½ z² - 3z s.t. z + π-coupled equality z = 2 (π its multiplier)
        let p = MixedLcp {
            m: Csr::from_triplets(1, 1, &[(0, 0, 1.0)]),
            n: Csr::from_triplets(1, 1, &[(0, 0, 1.0)]),
            s: Csr::zeros(1, 1),
            q: vec![-3.0],
            r: vec![2.0],
        };
        for ordering in [PivotOrdering::Natural, PivotOrdering::Reversed] {
            let cfg = SolverConfig {
                ordering,
                trace: true,
                ..Default::default()
            };
            let s = solve_mixed(&p, &cfg).unwrap();
            assert!((s.z[0] - 2.0).abs() < 1e-12);
            assert!((s.pi[0] - 1.0).abs() < 1e-12);
            assert_eq!(s.trace.len(), s.pivots);
        }
    }

    #[test]
    fn iteration_cap() {
        let cfg = SolverConfig {
            max_pivots: Some(1),
            ..Default::default()
        };
        let s = solve_mixed(&lcp(&[&[2.0, 1.0], &[1.0, 2.0]], &[-5.0, -6.0]), &cfg).unwrap();
        assert_eq!(s.status, SolveStatus::IterLimit);
        assert!(s.into_solved().is_err());
    }

    #[test]
    fn round_off_entries_do_not_drive_the_scaling() {
        let a = Csr::from_triplets(2, 2, &[(0, 0, 4.0), (0, 1, 1e-17), (1, 0, -1e-17)]);
        let d = equilibrate(&a);
        assert_eq!(d[1], 1.0);
        assert!((d[0] - 0.5).abs() < 1e-12);
    }
}
