//! Minimal sparse storage: a triplet builder and compressed sparse rows.

use nalgebra::DMatrix;

#[derive(Debug, Clone, Default)]
pub struct Triplets {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Triplets {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, v: f64) {
        debug_assert!(row < self.nrows && col < self.ncols, "({row},{col}) outside {}x{}", self.nrows, self.ncols);
        if v != 0.0 {
            self.entries.push((row, col, v));
        }
    }

    pub fn to_csr(&self) -> Csr {
        Csr::from_triplets(self.nrows, self.ncols, &self.entries)
    }
}

/// Row-compressed matrix with duplicates summed and explicit zeros dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl Csr {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Csr {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_triplets(nrows: usize, ncols: usize, entries: &[(usize, usize, f64)]) -> Self {
        let mut sorted: Vec<_> = entries.to_vec();
        sorted.sort_by_key(|e| (e.0, e.1));
        let mut indptr = vec![0; nrows + 1];
        let mut indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in sorted {
            assert!(r < nrows && c < ncols, "entry ({r},{c}) outside {nrows}x{ncols}");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        let mut m = Csr {
            nrows,
            ncols,
            indptr,
            indices,
            values,
        };
        m.prune();
        m
    }

    fn prune(&mut self) {
        if self.values.iter().all(|v| *v != 0.0) {
            return;
        }
        let t = self.triplets();
        *self = Csr::from_triplets(self.nrows, self.ncols, &t);
    }

    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut t = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)] != 0.0 {
                    t.push((r, c, m[(r, c)]));
                }
            }
        }
        Csr::from_triplets(m.nrows(), m.ncols(), &t)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.row(r).find(|(j, _)| *j == c).map_or(0.0, |(_, v)| v)
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.nrows)
            .flat_map(|r| self.row(r).filter(|(_, v)| *v != 0.0).map(move |(c, v)| (r, c, v)))
            .collect()
    }

    /// `y += A x`
    pub fn mul_add(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (r, yr) in y.iter_mut().enumerate() {
            *yr += self.row(r).map(|(c, v)| v * x[c]).sum::<f64>();
        }
    }

    /// `y += Aᵀ x`
    pub fn mul_add_t(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.nrows);
        assert_eq!(y.len(), self.ncols);
        for (r, &xr) in x.iter().enumerate() {
            if xr != 0.0 {
                for (c, v) in self.row(r) {
                    y[c] += v * xr;
                }
            }
        }
    }

    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_add(x, &mut y);
        y
    }

    pub fn transpose(&self) -> Csr {
        let t: Vec<_> = self.triplets().into_iter().map(|(r, c, v)| (c, r, v)).collect();
        Csr::from_triplets(self.ncols, self.nrows, &t)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Rebuilds the matrix with a larger shape; existing entries keep their
    /// positions.
    pub fn resized(&self, nrows: usize, ncols: usize, extra: &[(usize, usize, f64)]) -> Csr {
        assert!(nrows >= self.nrows && ncols >= self.ncols);
        let mut t = self.triplets();
        t.extend_from_slice(extra);
        Csr::from_triplets(nrows, ncols, &t)
    }
}
