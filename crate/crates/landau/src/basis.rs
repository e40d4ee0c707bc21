//! Truncated two-dimensional Hermite basis `|m, n⟩`, `m + n ≤ N`.

use num_complex::Complex64 as C64;

use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteBasis {
    cutoff: u32,
    states: Vec<(u32, u32)>,
}

impl HermiteBasis {
    /// States ordered by total degree, then by the `x` quantum number.
    pub fn new(cutoff: u32) -> Self {
        let states = (0..=cutoff)
            .flat_map(|d| (0..=d).rev().map(move |m| (m, d - m)))
            .collect();
        HermiteBasis { cutoff, states }
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn state(&self, idx: usize) -> (u32, u32) {
        self.states[idx]
    }

    pub fn degree(&self, idx: usize) -> u32 {
        let (m, n) = self.states[idx];
        m + n
    }

    pub fn index(&self, m: u32, n: u32) -> Option<usize> {
        let d = m + n;
        (d <= self.cutoff).then(|| (d * (d + 1) / 2 + (d - m)) as usize)
    }

    /// Indices of states with degree at most `N − halo`.
    pub fn halo_support(&self, halo: u32) -> Vec<usize> {
        match self.cutoff.checked_sub(halo) {
            Some(top) => (0..self.dim()).filter(|&i| self.degree(i) <= top).collect(),
            None => Vec::new(),
        }
    }

    /// `x` (`axis = 0`) or `y` (`axis = 1`) as a multiplication operator.
    pub fn position(&self, axis: usize) -> SparseMatrix {
        self.ladder(axis, 1.0)
    }

    /// `∂_x` or `∂_y`.
    pub fn derivative(&self, axis: usize) -> SparseMatrix {
        self.ladder(axis, -1.0)
    }

    /// `(a + ε a†)/√2` along one axis; states pushed past the cutoff are dropped.
    fn ladder(&self, axis: usize, eps: f64) -> SparseMatrix {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let cols = (0..self.dim())
            .map(|j| {
                let (m, n) = self.states[j];
                let q = if axis == 0 { m } else { n };
                let shift = |up: bool| {
                    let q2 = if up { q + 1 } else { q - 1 };
                    if axis == 0 {
                        self.index(q2, n)
                    } else {
                        self.index(m, q2)
                    }
                };
                let mut col = Vec::with_capacity(2);
                if q > 0 {
                    let i = shift(false).expect("lower degree");
                    col.push((i as u32, C64::new(r * (q as f64).sqrt(), 0.0)));
                }
                if let Some(i) = shift(true) {
                    col.push((i as u32, C64::new(eps * r * ((q + 1) as f64).sqrt(), 0.0)));
                }
                col
            })
            .collect();
        SparseMatrix::from_columns(self.dim(), cols)
    }

    /// The unit vector `|m, n⟩`.
    pub fn unit(&self, m: u32, n: u32) -> Option<Vec<C64>> {
        let i = self.index(m, n)?;
        let mut v = vec![C64::default(); self.dim()];
        v[i] = C64::new(1.0, 0.0);
        Some(v)
    }
}
