//! Constant Kähler structures on the plane parametrized by the upper half-plane.
//!
//! With `ω = dx∧dy` and `σ = σ₁ + iσ₂`, `dx + σ dy` spans the `(1,0)`-forms and
//!
//! `J = (1/σ₂)[[−σ₁, −|σ|²], [1, σ₁]]`, `g = (1/σ₂)[[1, σ₁], [σ₁, |σ|²]]`,
//! `g̃ = g⁻¹ = (1/σ₂)[[|σ|², −σ₁], [−σ₁, 1]]`.
//!
//! A tangent direction `V ∈ ℂ` stands for `Re V ∂_{σ₁} + Im V ∂_{σ₂}`.
//! `G̃(V) = −V[g̃]` splits into its `(2,0)` part `G(V) = P G̃ Pᵀ`,
//! `P = (1 − iJ)/2`, and the conjugate `Ḡ(V)`.

use num_complex::Complex64 as C64;

pub type Real2 = [[f64; 2]; 2];
pub type Complex2 = [[C64; 2]; 2];

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum GeometryError {
    #[error("sigma = {0} is not in the upper half-plane")]
    NotInUpperHalfPlane(C64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryData {
    sigma: C64,
}

impl GeometryData {
    pub fn new(sigma: C64) -> Result<Self, GeometryError> {
        if sigma.im > 0.0 && sigma.re.is_finite() && sigma.im.is_finite() {
            Ok(GeometryData { sigma })
        } else {
            Err(GeometryError::NotInUpperHalfPlane(sigma))
        }
    }

    pub fn sigma(&self) -> C64 {
        self.sigma
    }

    /// The structure at `σ + hV`.
    pub fn shifted(&self, v: C64, h: f64) -> Result<Self, GeometryError> {
        Self::new(self.sigma + v * h)
    }

    pub fn j(&self) -> Real2 {
        let (a, b) = (self.sigma.re, self.sigma.im);
        let n = self.sigma.norm_sqr();
        [[-a / b, -n / b], [1.0 / b, a / b]]
    }

    pub fn g(&self) -> Real2 {
        let (a, b) = (self.sigma.re, self.sigma.im);
        let n = self.sigma.norm_sqr();
        [[1.0 / b, a / b], [a / b, n / b]]
    }

    pub fn g_tilde(&self) -> Real2 {
        let (a, b) = (self.sigma.re, self.sigma.im);
        let n = self.sigma.norm_sqr();
        [[n / b, -a / b], [-a / b, 1.0 / b]]
    }

    /// `V[g̃]`, exact.
    pub fn g_tilde_derivative(&self, v: C64) -> Real2 {
        let (a, b) = (self.sigma.re, self.sigma.im);
        let d1 = [[2.0 * a / b, -1.0 / b], [-1.0 / b, 0.0]];
        let d2 = [
            [1.0 - a * a / (b * b), a / (b * b)],
            [a / (b * b), -1.0 / (b * b)],
        ];
        let mut out = [[0.0; 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                out[r][c] = v.re * d1[r][c] + v.im * d2[r][c];
            }
        }
        out
    }

    /// `G̃(V) = −V[g̃]`.
    pub fn big_g_tilde(&self, v: C64) -> Real2 {
        let d = self.g_tilde_derivative(v);
        [[-d[0][0], -d[0][1]], [-d[1][0], -d[1][1]]]
    }

    /// `P = (1 − iJ)/2`, the projector onto `(1,0)` vectors.
    pub fn projector(&self) -> Complex2 {
        let j = self.j();
        let mut p = [[C64::default(); 2]; 2];
        for r in 0..2 {
            for c in 0..2 {
                let id = if r == c { 1.0 } else { 0.0 };
                p[r][c] = C64::new(id, -j[r][c]) * 0.5;
            }
        }
        p
    }

    pub fn big_g(&self, v: C64) -> Complex2 {
        let p = self.projector();
        let gt = self.big_g_tilde(v);
        let mut out = [[C64::default(); 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        out[a][b] += p[a][c] * gt[c][d] * p[b][d];
                    }
                }
            }
        }
        out
    }

    pub fn big_g_bar(&self, v: C64) -> Complex2 {
        let g = self.big_g(v);
        [[g[0][0].conj(), g[0][1].conj()], [g[1][0].conj(), g[1][1].conj()]]
    }
}

pub fn real_to_complex(m: &Real2) -> Complex2 {
    [
        [C64::new(m[0][0], 0.0), C64::new(m[0][1], 0.0)],
        [C64::new(m[1][0], 0.0), C64::new(m[1][1], 0.0)],
    ]
}

pub fn max_abs(m: &Complex2) -> f64 {
    m.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn geo(re: f64, im: f64) -> GeometryData {
        GeometryData::new(C64::new(re, im)).unwrap()
    }

    #[test]
    fn euclidean_at_i() {
        let g = geo(0.0, 1.0);
        assert_eq!(g.g(), [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(g.g_tilde(), [[1.0, 0.0], [0.0, 1.0]]);
        let big = g.big_g(C64::new(1.0, 0.0));
        let expect = [[C64::new(0.0, 0.5), C64::new(0.5, 0.0)], [C64::new(0.5, 0.0), C64::new(0.0, -0.5)]];
        for r in 0..2 {
            for c in 0..2 {
                assert!((big[r][c] - expect[r][c]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(GeometryData::new(C64::new(1.0, 0.0)).is_err());
        assert!(GeometryData::new(C64::new(0.0, -2.0)).is_err());
    }

    #[test]
    fn split_matches_finite_difference() {
        let g = geo(0.0, 1.0);
        let v = C64::new(1.0, 0.0);
        let h = 1e-5;
        let (p, m) = (g.shifted(v, h).unwrap().g_tilde(), g.shifted(v, -h).unwrap().g_tilde());
        let (big, bar) = (g.big_g(v), g.big_g_bar(v));
        for r in 0..2 {
            for c in 0..2 {
                let fd = -(p[r][c] - m[r][c]) / (2.0 * h);
                assert!(((big[r][c] + bar[r][c]).re - fd).abs() < 1e-8);
            }
        }
    }

    proptest! {
        #[test]
        fn invariants(re in -3.0f64..3.0, im in 0.2f64..4.0, vr in -2.0f64..2.0, vi in -2.0f64..2.0) {
            let g = geo(re, im);
            let j = g.j();
            let (gm, gt) = (g.g(), g.g_tilde());
            for r in 0..2 {
                for c in 0..2 {
                    let jj: f64 = (0..2).map(|t| j[r][t] * j[t][c]).sum();
                    let id = if r == c { 1.0 } else { 0.0 };
                    prop_assert!((jj + id).abs() < 1e-12);
                    let inv: f64 = (0..2).map(|t| gm[r][t] * gt[t][c]).sum();
                    prop_assert!((inv - id).abs() < 1e-12);
                    // g = ω·J with ω = [[0, 1], [−1, 0]]
                    let omega_j = if r == 0 { j[1][c] } else { -j[0][c] };
                    prop_assert!((omega_j - gm[r][c]).abs() < 1e-12);
                }
            }
            prop_assert!(gm[0][0] > 0.0 && gm[0][0] * gm[1][1] - gm[0][1] * gm[1][0] > 0.0);
            let v = C64::new(vr, vi);
            let (big, bar, gtv) = (g.big_g(v), g.big_g_bar(v), g.big_g_tilde(v));
            let jmax = j.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
            let tol = 1e-12 * jmax * jmax * (1.0 + max_abs(&real_to_complex(&gtv)));
            let pbar: Complex2 = {
                let p = g.projector();
                [[C64::new(1.0, 0.0) - p[0][0], -p[0][1]], [-p[1][0], C64::new(1.0, 0.0) - p[1][1]]]
            };
            for r in 0..2 {
                for c in 0..2 {
                    prop_assert!(((big[r][c] + bar[r][c]).re - gtv[r][c]).abs() < tol);
                    prop_assert!((big[r][c] - big[c][r]).norm() < tol);
                    let kill: C64 = (0..2).map(|t| pbar[r][t] * big[t][c]).sum();
                    prop_assert!(kill.norm() < tol * jmax);
                }
            }
        }
    }
}
