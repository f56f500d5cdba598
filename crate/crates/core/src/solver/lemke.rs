//! Lemke's complementary pivoting method for `w = A x + b, 0 <= x ⊥ w >= 0`.
//!
//! The basis inverse is kept dense (column-major) and updated by rank-one
//! eliminations; columns of `A` are read sparsely. Ties in the ratio test
//! are broken lexicographically on the rows of `(B⁻¹b, B⁻¹)`, which rules
//! out cycling on degenerate instances.

use crate::error::{Error, Result};
use crate::sparse::Csr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Termination {
    Solved,
    Ray,
    IterLimit,
}

pub(crate) struct LemkeParams<'a> {
    pub pivot_tol: f64,
    pub max_pivots: usize,
    pub lexicographic: bool,
    pub covering: &'a [f64],
    pub trace: bool,
}

pub(crate) struct LemkeOutcome {
    pub x: Vec<f64>,
    pub termination: Termination,
    pub pivots: usize,
    /// Direction in `x` of the terminal ray, if any.
    pub ray: Option<Vec<f64>>,
    /// Component of the covering variable along the ray.
    pub ray_x0: f64,
    pub trace: Vec<String>,
}

struct Tableau<'a> {
    n: usize,
    cols: &'a [Vec<(usize, f64)>],
    d: &'a [f64],
    b: &'a [f64],
    binv: Vec<f64>,
    beta: Vec<f64>,
    basis: Vec<usize>,
    row_of: Vec<Option<usize>>,
    /// Basic values below this are treated as zero.
    zero_tol: f64,
}

// variable numbering: w_i = i, x_j = n + j, x0 = 2n
impl<'a> Tableau<'a> {
    fn x0(&self) -> usize {
        2 * self.n
    }

    fn name(&self, v: usize) -> String {
        if v < self.n {
            format!("w{v}")
        } else if v < 2 * self.n {
            format!("z{}", v - self.n)
        } else {
            "t".into()
        }
    }

    /// Column of variable `v` in `[I | -A | -d]`, as sparse pairs.
    fn column(&self, v: usize) -> Vec<(usize, f64)> {
        if v < self.n {
            vec![(v, 1.0)]
        } else if v < 2 * self.n {
            self.cols[v - self.n].iter().map(|&(r, a)| (r, -a)).collect()
        } else {
            self.d.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(r, v)| (r, -v)).collect()
        }
    }

    /// `B⁻¹ a` for a sparse column `a`.
    fn ftran(&self, a: &[(usize, f64)]) -> Vec<f64> {
        let n = self.n;
        let mut u = vec![0.0; n];
        for &(r, v) in a {
            let col = &self.binv[r * n..(r + 1) * n];
            for (ui, ci) in u.iter_mut().zip(col) {
                *ui += v * ci;
            }
        }
        u
    }

    fn pivot(&mut self, row: usize, u: &[f64], entering: usize) -> usize {
        let n = self.n;
        let p = u[row];
        for c in 0..n {
            let col = &mut self.binv[c * n..(c + 1) * n];
            let v = col[row] / p;
            if v != 0.0 {
                for (ci, ui) in col.iter_mut().zip(u) {
                    *ci -= ui * v;
                }
            }
            col[row] = v;
        }
        let v = self.beta[row] / p;
        for (bi, ui) in self.beta.iter_mut().zip(u) {
            *bi -= ui * v;
        }
        self.beta[row] = v;
        let leaving = self.basis[row];
        self.row_of[leaving] = None;
        self.row_of[entering] = Some(row);
        self.basis[row] = entering;
        leaving
    }

    /// One round of iterative refinement of the basic solution.
    fn refine(&mut self) {
        let n = self.n;
        let mut res = self.b.to_vec();
        for (row, &v) in self.basis.iter().enumerate() {
            for (r, a) in self.column(v) {
                res[r] -= a * self.beta[row];
            }
        }
        let pairs: Vec<(usize, f64)> = res.iter().copied().enumerate().filter(|(_, v)| *v != 0.0).collect();
        if pairs.is_empty() {
            return;
        }
        let corr = self.ftran(&pairs);
        for i in 0..n {
            self.beta[i] += corr[i];
        }
    }

    /// Value of the covering variable, zero when it is nonbasic.
    fn x0_value(&self) -> f64 {
        self.row_of[self.x0()].map_or(0.0, |r| self.beta[r])
    }

    /// Row leaving the basis when `u` enters, or `None` on a ray.
    fn ratio_test(&self, u: &[f64], tol: f64, lexicographic: bool) -> Option<usize> {
        // a covering variable that is numerically zero leaves as soon as it can
        if let Some(r) = self.row_of[self.x0()] {
            if u[r] > tol && self.beta[r] <= self.zero_tol {
                return Some(r);
            }
        }
        let mut best = f64::INFINITY;
        for i in 0..self.n {
            if u[i] > tol {
                best = best.min(self.beta[i].max(0.0) / u[i]);
            }
        }
        if !best.is_finite() {
            return None;
        }
        let slack = 1e-11 * best.abs().max(1.0);
        let mut ties: Vec<usize> = (0..self.n)
            .filter(|&i| u[i] > tol && self.beta[i].max(0.0) / u[i] <= best + slack)
            .collect();
        if ties.len() == 1 {
            return Some(ties[0]);
        }
        if let Some(&r) = ties.iter().find(|&&i| self.basis[i] == self.x0()) {
            return Some(r);
        }
        if !lexicographic {
            return ties.into_iter().min_by(|&a, &b| u[b].partial_cmp(&u[a]).unwrap());
        }
        let n = self.n;
        for c in 0..n {
            let col = &self.binv[c * n..(c + 1) * n];
            let lo = ties.iter().map(|&i| col[i] / u[i]).fold(f64::INFINITY, f64::min);
            let eps = 1e-11 * lo.abs().max(1.0);
            ties.retain(|&i| col[i] / u[i] <= lo + eps);
            if ties.len() == 1 {
                break;
            }
        }
        // numerically indistinguishable rows: take the largest pivot
        ties.into_iter().max_by(|&a, &b| u[a].partial_cmp(&u[b]).unwrap())
    }
}

/// Runs Lemke's method with covering vector `p.covering`.
pub(crate) fn lemke(a: &Csr, b: &[f64], p: &LemkeParams) -> Result<LemkeOutcome> {
    let n = b.len();
    assert_eq!(a.nrows(), n);
    assert_eq!(p.covering.len(), n);
    let at = a.transpose();
    let cols: Vec<Vec<(usize, f64)>> = (0..n).map(|j| at.row(j).collect()).collect();

    let mut binv = vec![0.0; n * n];
    for i in 0..n {
        binv[i * n + i] = 1.0;
    }
    let mut t = Tableau {
        n,
        cols: &cols,
        d: p.covering,
        b,
        binv,
        beta: b.to_vec(),
        basis: (0..n).collect(),
        row_of: (0..=2 * n).map(|v| if v < n { Some(v) } else { None }).collect(),
        zero_tol: 1e-12 * b.iter().fold(1.0f64, |m, v| m.max(v.abs())),
    };
    let mut trace = Vec::new();

    if b.iter().all(|&v| v >= 0.0) {
        return Ok(LemkeOutcome {
            x: vec![0.0; n],
            termination: Termination::Solved,
            pivots: 0,
            ray: None,
            ray_x0: 0.0,
            trace,
        });
    }

    // x0 enters at the row where b_i / d_i is most negative
    let mut row = 0;
    let mut worst = f64::INFINITY;
    for i in 0..n {
        if p.covering[i] > 0.0 {
            let r = b[i] / p.covering[i];
            if !worst.is_finite() || r < worst - 1e-12 * worst.abs().max(1.0) {
                worst = r;
                row = i;
            }
        }
    }
    let x0 = t.x0();
    let u = t.ftran(&t.column(x0));
    let mut leaving = t.pivot(row, &u, x0);
    let mut pivots = 1;
    if p.trace {
        trace.push(format!("{pivots} enter=t leave={} t={:e}", t.name(leaving), t.beta[row]));
    }

    loop {
        let entering = if leaving < n { leaving + n } else { leaving - n };
        if pivots >= p.max_pivots {
            return Ok(finish(t, Termination::IterLimit, pivots, None, 0.0, trace));
        }
        let u = t.ftran(&t.column(entering));
        let Some(r) = t.ratio_test(&u, p.pivot_tol, p.lexicographic) else {
            if t.x0_value() <= t.zero_tol {
                // degenerate end: the basic point is complementary with x0 = 0
                return Ok(finish(t, Termination::Solved, pivots, None, 0.0, trace));
            }
            // ray: entering grows by τ, basics move by -u τ
            let mut dir = vec![0.0; n];
            let mut dx0 = 0.0;
            if entering >= n {
                dir[entering - n] = 1.0;
            }
            for (i, &v) in t.basis.iter().enumerate() {
                if v >= n && v < 2 * n {
                    dir[v - n] = -u[i];
                } else if v == x0 {
                    dx0 = -u[i];
                }
            }
            return Ok(finish(t, Termination::Ray, pivots, Some(dir), dx0, trace));
        };
        leaving = t.pivot(r, &u, entering);
        pivots += 1;
        if !t.beta[r].is_finite() {
            return Err(Error::PivotBreakdown { row: r });
        }
        if p.trace {
            let x0v = t.x0_value();
            trace.push(format!(
                "{pivots} enter={} leave={} t={x0v:e}",
                t.name(entering),
                t.name(leaving)
            ));
        }
        if leaving == x0 {
            return Ok(finish(t, Termination::Solved, pivots, None, 0.0, trace));
        }
        if pivots % 100 == 0 {
            t.refine();
        }
    }
}

fn finish(
    mut t: Tableau,
    termination: Termination,
    pivots: usize,
    ray: Option<Vec<f64>>,
    ray_x0: f64,
    trace: Vec<String>,
) -> LemkeOutcome {
    if termination == Termination::Solved {
        t.refine();
        t.refine();
    }
    let n = t.n;
    let mut x = vec![0.0; n];
    for (i, &v) in t.basis.iter().enumerate() {
        if v >= n && v < 2 * n {
            x[v - n] = t.beta[i].max(0.0);
        }
    }
    LemkeOutcome {
        x,
        termination,
        pivots,
        ray,
        ray_x0,
        trace,
    }
}
