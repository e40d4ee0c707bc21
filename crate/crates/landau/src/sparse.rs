//! Column-compressed complex matrices, just enough for operator products.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    /// Per column, `(row, value)` sorted by row.
    cols: Vec<Vec<(u32, C64)>>,
}

impl SparseMatrix {
    pub fn zeros(n: usize) -> Self {
        SparseMatrix {
            n,
            cols: vec![Vec::new(); n],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n,
            cols: (0..n).map(|j| vec![(j as u32, C64::new(1.0, 0.0))]).collect(),
        }
    }

    /// Builds from unsorted column lists; duplicate rows are summed.
    pub fn from_columns(n: usize, cols: Vec<Vec<(u32, C64)>>) -> Self {
        assert_eq!(cols.len(), n, "one list per column");
        let cols = cols.into_iter().map(canonical).collect();
        SparseMatrix { n, cols }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn column(&self, j: usize) -> &[(u32, C64)] {
        &self.cols[j]
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.cols[j]
            .binary_search_by_key(&(i as u32), |e| e.0)
            .map(|p| self.cols[j][p].1)
            .unwrap_or_default()
    }

    pub fn scale(&self, z: C64) -> Self {
        SparseMatrix {
            n: self.n,
            cols: self
                .cols
                .iter()
                .map(|c| c.iter().map(|&(i, v)| (i, v * z)).collect())
                .collect(),
        }
    }

    /// `self + z·other`.
    pub fn axpy(&self, z: C64, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimensions differ");
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| merge(a, b, z))
            .collect();
        SparseMatrix { n: self.n, cols }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(C64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "dimensions differ");
        let n = self.n;
        let cols = other
            .cols
            .par_iter()
            .map_init(
                || (vec![C64::default(); n], vec![false; n], Vec::<u32>::new()),
                |(acc, seen, touched), bcol| {
                    for &(l, bl) in bcol {
                        for &(i, a) in &self.cols[l as usize] {
                            let iu = i as usize;
                            if !seen[iu] {
                                seen[iu] = true;
                                touched.push(i);
                            }
                            acc[iu] += a * bl;
                        }
                    }
                    touched.sort_unstable();
                    let out: Vec<(u32, C64)> = touched
                        .iter()
                        .filter_map(|&i| {
                            let v = acc[i as usize];
                            acc[i as usize] = C64::default();
                            seen[i as usize] = false;
                            (v != C64::default()).then_some((i, v))
                        })
                        .collect();
                    touched.clear();
                    out
                },
            )
            .collect();
        SparseMatrix { n, cols }
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::default(); self.n];
        for (j, col) in self.cols.iter().enumerate() {
            let xj = x[j];
            if xj == C64::default() {
                continue;
            }
            for &(i, v) in col {
                y[i as usize] += v * xj;
            }
        }
        y
    }

    /// `self^H · y`.
    pub fn adjoint_matvec(&self, y: &[C64]) -> Vec<C64> {
        self.cols
            .iter()
            .map(|col| col.iter().map(|&(i, v)| v.conj() * y[i as usize]).sum())
            .collect()
    }

    /// Largest singular value of the restriction to the columns in `support`,
    /// by power iteration on `AᴴA`.
    pub fn spectral_norm_on(&self, support: &[usize]) -> f64 {
        if support.is_empty() {
            return 0.0;
        }
        let mut mask = vec![false; self.n];
        for &j in support {
            mask[j] = true;
        }
        let restrict = |v: &mut Vec<C64>| {
            for (j, x) in v.iter_mut().enumerate() {
                if !mask[j] {
                    *x = C64::default();
                }
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut x: Vec<C64> = (0..self.n)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        restrict(&mut x);
        let mut estimate = 0.0;
        for _ in 0..300 {
            let nx = norm(&x);
            if nx == 0.0 {
                return 0.0;
            }
            x.iter_mut().for_each(|v| *v /= nx);
            let y = self.matvec(&x);
            let ny = norm(&y);
            let mut z = self.adjoint_matvec(&y);
            restrict(&mut z);
            x = z;
            if (ny - estimate).abs() <= 1e-10 * ny {
                return ny;
            }
            estimate = ny;
        }
        estimate
    }

    /// Frobenius norm of the restriction to the columns in `support`.
    pub fn frobenius_on(&self, support: &[usize]) -> f64 {
        support
            .iter()
            .flat_map(|&j| self.cols[j].iter())
            .map(|(_, v)| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius inner product `⟨self, other⟩` on the columns in `support`.
    pub fn inner_on(&self, other: &Self, support: &[usize]) -> C64 {
        support
            .iter()
            .map(|&j| {
                let a = &self.cols[j];
                let b = &other.cols[j];
                let (mut p, mut q, mut s) = (0, 0, C64::default());
                while p < a.len() && q < b.len() {
                    match a[p].0.cmp(&b[q].0) {
                        std::cmp::Ordering::Less => p += 1,
                        std::cmp::Ordering::Greater => q += 1,
                        std::cmp::Ordering::Equal => {
                            s += a[p].1.conj() * b[q].1;
                            p += 1;
                            q += 1;
                        }
                    }
                }
                s
            })
            .sum()
    }
}

pub fn norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

fn canonical(mut col: Vec<(u32, C64)>) -> Vec<(u32, C64)> {
    col.sort_by_key(|e| e.0);
    let mut out: Vec<(u32, C64)> = Vec::with_capacity(col.len());
    for (i, v) in col {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += v,
            _ => out.push((i, v)),
        }
    }
    out.retain(|e| e.1 != C64::default());
    out
}

fn merge(a: &[(u32, C64)], b: &[(u32, C64)], z: C64) -> Vec<(u32, C64)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut p, mut q) = (0, 0);
    while p < a.len() || q < b.len() {
        let take_a = q >= b.len() || (p < a.len() && a[p].0 < b[q].0);
        let take_b = p >= a.len() || (q < b.len() && b[q].0 < a[p].0);
        let (i, v) = if take_a {
            p += 1;
            a[p - 1]
        } else if take_b {
            q += 1;
            (b[q - 1].0, z * b[q - 1].1)
        } else {
            p += 1;
            q += 1;
            (a[p - 1].0, a[p - 1].1 + z * b[q - 1].1)
        };
        if v != C64::default() {
            out.push((i, v));
        }
    }
    out
}
