use serde::Serialize;

use crate::sparse::Csr;

/// Mixed LCP in the form
///
/// ```text
/// 0 <= z ⊥ M z + N π + q >= 0
///          Nᵀ z + S π = r,   π free
/// ```
///
/// `S` is square over the free variables and may be empty.
#[derive(Debug, Clone)]
pub struct MixedLcp {
    pub m: Csr,
    pub n: Csr,
    pub s: Csr,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Residual {
    /// `max_i |z_i w_i|`
    pub complementarity: f64,
    /// `‖Nᵀz + Sπ − r‖∞`
    pub equality: f64,
    /// `max(0, −min z, −min w)`
    pub nonneg: f64,
}

impl Residual {
    pub fn max(&self) -> f64 {
        self.complementarity.max(self.equality).max(self.nonneg)
    }
}

impl MixedLcp {
    /// Pure LCP `0 <= z ⊥ M z + q >= 0`.
    pub fn lcp(m: Csr, q: Vec<f64>) -> MixedLcp {
        let n = m.nrows();
        MixedLcp {
            m,
            n: Csr::zeros(n, 0),
            s: Csr::zeros(0, 0),
            q,
            r: Vec::new(),
        }
    }

    pub fn n_z(&self) -> usize {
        self.q.len()
    }

    pub fn n_pi(&self) -> usize {
        self.r.len()
    }

    /// `w = M z + N π + q`
    pub fn w(&self, z: &[f64], pi: &[f64]) -> Vec<f64> {
        let mut w = self.q.clone();
        self.m.mul_add(z, &mut w);
        self.n.mul_add(pi, &mut w);
        w
    }

    /// `Nᵀ z + S π − r`
    pub fn equality_gap(&self, z: &[f64], pi: &[f64]) -> Vec<f64> {
        let mut e: Vec<f64> = self.r.iter().map(|v| -v).collect();
        self.n.mul_add_t(z, &mut e);
        self.s.mul_add(pi, &mut e);
        e
    }

    pub fn residual(&self, z: &[f64], pi: &[f64]) -> Residual {
        let w = self.w(z, pi);
        let eq = self.equality_gap(z, pi);
        let min_z = z.iter().copied().fold(f64::INFINITY, f64::min);
        let min_w = w.iter().copied().fold(f64::INFINITY, f64::min);
        Residual {
            complementarity: z.iter().zip(&w).map(|(a, b)| (a * b).abs()).fold(0.0, f64::max),
            equality: eq.iter().map(|v| v.abs()).fold(0.0, f64::max),
            nonneg: 0.0f64.max(-min_z).max(-min_w),
        }
    }

    /// Scale used to make tolerances relative: `max(1, ‖q‖∞, ‖r‖∞)`.
    pub fn data_scale(&self) -> f64 {
        self.q.iter().chain(&self.r).map(|v| v.abs()).fold(1.0, f64::max)
    }
}
