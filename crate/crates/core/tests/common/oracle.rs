//! Random monotone mixed LCPs with a planted solution, and an extragradient
//! projection method used as an independent reference solver.

use gridlease::solver::MixedLcp;
use gridlease::sparse::Csr;
use nalgebra::{DMatrix, DVector};
use rand::Rng;

pub struct Planted {
    pub lcp: MixedLcp,
    pub z: Vec<f64>,
    pub pi: Vec<f64>,
}

fn gauss<R: Rng>(rng: &mut R) -> f64 {
    // sum of uniforms is close enough to normal for test data
    (0..4).map(|_| rng.gen_range(-1.0..1.0)).sum::<f64>() * 0.5
}

/// `M = AᵀA / n + c I + K` with `K` skew, `N` dense with full column rank
/// (almost surely), `S = -s I` with `s` possibly zero. A complementary
/// point `(z*, w*)` with random support is planted through `q` and `r`.
pub fn planted<R: Rng>(rng: &mut R, nz: usize, np: usize, s: f64) -> Planted {
    let a = DMatrix::from_fn(nz, nz, |_, _| gauss(rng));
    let k = DMatrix::from_fn(nz, nz, |_, _| gauss(rng));
    let skew = (&k - k.transpose()) * 0.5;
    let c = rng.gen_range(0.2..1.0);
    let m = a.transpose() * &a / nz as f64 + DMatrix::identity(nz, nz) * c + skew * 0.5;
    let n = DMatrix::from_fn(nz, np, |_, _| gauss(rng));
    let sm = DMatrix::identity(np, np) * -s;

    let mut z = vec![0.0; nz];
    let mut w = vec![0.0; nz];
    for i in 0..nz {
        match rng.gen_range(0..3) {
            0 => z[i] = rng.gen_range(0.1..5.0),
            1 => w[i] = rng.gen_range(0.1..5.0),
            _ => {} // degenerate: both zero
        }
    }
    let pi: Vec<f64> = (0..np).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let zv = DVector::from_vec(z.clone());
    let pv = DVector::from_vec(pi.clone());
    let q = DVector::from_vec(w) - &m * &zv - &n * &pv;
    let r = n.transpose() * &zv + &sm * &pv;
    Planted {
        lcp: MixedLcp {
            m: Csr::from_dense(&m),
            n: Csr::from_dense(&n),
            s: Csr::from_dense(&sm),
            q: q.as_slice().to_vec(),
            r: r.as_slice().to_vec(),
        },
        z,
        pi,
    }
}

/// Extragradient iterations on `F(z, π) = (Mz + Nπ + q, r − Nᵀz − Sπ)` over
/// `z >= 0`. Returns `(z, π, natural-map residual)`.
pub fn extragradient(p: &MixedLcp, max_iter: usize, tol: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let (nz, np) = (p.n_z(), p.n_pi());
    let m = p.m.to_dense();
    let n = p.n.to_dense();
    let s = p.s.to_dense();
    let mut j = DMatrix::zeros(nz + np, nz + np);
    j.view_mut((0, 0), (nz, nz)).copy_from(&m);
    j.view_mut((0, nz), (nz, np)).copy_from(&n);
    j.view_mut((nz, 0), (np, nz)).copy_from(&(-n.transpose()));
    j.view_mut((nz, nz), (np, np)).copy_from(&(-&s));
    let mut c = DVector::zeros(nz + np);
    c.rows_mut(0, nz).copy_from(&DVector::from_column_slice(&p.q));
    c.rows_mut(nz, np).copy_from(&DVector::from_column_slice(&p.r));

    let lip = j.clone().svd(false, false).singular_values.max().max(1e-12);
    let tau = 0.9 / lip;
    let project = |v: &mut DVector<f64>| {
        for i in 0..nz {
            v[i] = v[i].max(0.0);
        }
    };
    let residual = |x: &DVector<f64>| {
        let mut y = x - (&j * x + &c);
        project(&mut y);
        (x - y).amax()
    };

    let mut x = DVector::zeros(nz + np);
    let mut res = residual(&x);
    for it in 0..max_iter {
        let mut y = &x - (&j * &x + &c) * tau;
        project(&mut y);
        let mut nx = &x - (&j * &y + &c) * tau;
        project(&mut nx);
        x = nx;
        if it % 50 == 0 {
            res = residual(&x);
            if res <= tol {
                break;
            }
        }
    }
    res = res.min(residual(&x));
    (x.rows(0, nz).iter().copied().collect(), x.rows(nz, np).iter().copied().collect(), res)
}
