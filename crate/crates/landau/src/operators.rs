//! Truncated-basis matrices for the prequantum connection and its descendants.
//!
//! Symmetric gauge with curvature `−ikω`:
//! `∇_x = ∂_x + (ik/2) y`, `∇_y = ∂_y − (ik/2) x`, so `[∇_x, ∇_y] = −ik`.
//! Then `Δ = g̃^{ab}∇_a∇_b`, `b(V) = G(V)^{ab}∇_a∇_b`, `b̄(V) = Ḡ(V)^{ab}∇_a∇_b`.

use std::sync::Arc;

use hwconn_core::Level;
use num_complex::Complex64 as C64;

use crate::basis::HermiteBasis;
use crate::geometry::{real_to_complex, Complex2, GeometryData};
use crate::poly::{Poly2, PolyError};
use crate::sparse::SparseMatrix;

/// Highest total degree accepted for curve-operator functions.
pub const MAX_CURVE_DEGREE: u32 = 4;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum OperatorError {
    #[error("operators live on different truncations or levels")]
    Mismatched,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A matrix on the degree-`≤ N` Hermite space together with the largest
/// degree shift of the exact operator it truncates.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    k: Level,
    basis: Arc<HermiteBasis>,
    mat: SparseMatrix,
    order: u32,
}

impl OperatorMatrix {
    pub fn new(k: Level, basis: Arc<HermiteBasis>, mat: SparseMatrix, order: u32) -> Self {
        assert_eq!(basis.dim(), mat.dim(), "matrix does not fit the basis");
        OperatorMatrix { k, basis, mat, order }
    }

    pub fn identity(k: Level, basis: Arc<HermiteBasis>) -> Self {
        let mat = SparseMatrix::identity(basis.dim());
        Self::new(k, basis, mat, 0)
    }

    pub fn zero(k: Level, basis: Arc<HermiteBasis>) -> Self {
        let mat = SparseMatrix::zeros(basis.dim());
        Self::new(k, basis, mat, 0)
    }

    pub fn level(&self) -> Level {
        self.k
    }

    pub fn cutoff(&self) -> u32 {
        self.basis.cutoff()
    }

    pub fn basis(&self) -> &Arc<HermiteBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.mat
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    fn check(&self, other: &Self) {
        assert!(
            self.k == other.k && self.basis.cutoff() == other.basis.cutoff(),
            "{}",
            OperatorError::Mismatched
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(C64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    /// `self + z·other`.
    pub fn axpy(&self, z: C64, other: &Self) -> Self {
        self.check(other);
        OperatorMatrix {
            mat: self.mat.axpy(z, &other.mat),
            order: self.order.max(other.order),
            ..self.clone()
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        OperatorMatrix {
            mat: self.mat.scale(z),
            ..self.clone()
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        OperatorMatrix {
            mat: self.mat.mul(&other.mat),
            order: self.order + other.order,
            ..self.clone()
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.mat.matvec(v)
    }

    /// Largest singular value on the degree-`≤ N − halo` subspace.
    pub fn norm_on_halo(&self, halo: u32) -> f64 {
        self.mat.spectral_norm_on(&self.basis.halo_support(halo))
    }

    /// Largest singular value on the subspace where this operator is exact.
    pub fn norm(&self) -> f64 {
        self.norm_on_halo(self.order)
    }
}

/// `‖a − b‖ / max(‖a‖, ‖b‖)` on the halo subspace of the larger order;
/// absolute when both sides vanish.
pub fn relative_residual(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
    let halo = a.order().max(b.order());
    let diff = a.sub(b).norm_on_halo(halo);
    let scale = a.norm_on_halo(halo).max(b.norm_on_halo(halo));
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

/// Everything needed to assemble operators at any `σ` for fixed `k` and `N`.
#[derive(Debug, Clone)]
pub struct Model {
    k: Level,
    basis: Arc<HermiteBasis>,
    nabla: [OperatorMatrix; 2],
    /// `∇_a∇_b`.
    nabla2: [[OperatorMatrix; 2]; 2],
    position: [OperatorMatrix; 2],
}

impl Model {
    pub fn new(k: Level, cutoff: u32) -> Self {
        let basis = Arc::new(HermiteBasis::new(cutoff));
        let op = |m: SparseMatrix| OperatorMatrix::new(k, basis.clone(), m, 1);
        let position = [op(basis.position(0)), op(basis.position(1))];
        let half_ik = C64::new(0.0, k.as_i64() as f64 / 2.0);
        let nabla = [
            op(basis.derivative(0)).axpy(half_ik, &position[1]),
            op(basis.derivative(1)).axpy(-half_ik, &position[0]),
        ];
        let nabla2 = [
            [nabla[0].mul(&nabla[0]), nabla[0].mul(&nabla[1])],
            [nabla[1].mul(&nabla[0]), nabla[1].mul(&nabla[1])],
        ];
        Model {
            k,
            basis,
            nabla,
            nabla2,
            position,
        }
    }

    pub fn level(&self) -> Level {
        self.k
    }

    pub fn basis(&self) -> &Arc<HermiteBasis> {
        &self.basis
    }

    pub fn cutoff(&self) -> u32 {
        self.basis.cutoff()
    }

    pub fn identity(&self) -> OperatorMatrix {
        OperatorMatrix::identity(self.k, self.basis.clone())
    }

    /// `∇_x` (`axis = 0`) or `∇_y`.
    pub fn nabla(&self, axis: usize) -> &OperatorMatrix {
        &self.nabla[axis]
    }

    /// `T^{ab}∇_a∇_b` for a constant tensor `T`.
    pub fn second_order(&self, t: &Complex2) -> OperatorMatrix {
        let mut out = OperatorMatrix::zero(self.k, self.basis.clone());
        for a in 0..2 {
            for b in 0..2 {
                out = out.axpy(t[a][b], &self.nabla2[a][b]);
            }
        }
        out
    }

    /// `T^a ∇_a` with polynomial coefficients placed on the left.
    pub fn first_order(&self, t: &[Poly2<C64>; 2]) -> Result<OperatorMatrix, OperatorError> {
        let mut out = OperatorMatrix::zero(self.k, self.basis.clone());
        for a in 0..2 {
            out = out.add(&self.curve(&t[a])?.mul(&self.nabla[a]));
        }
        Ok(out)
    }

    pub fn delta(&self, geom: &GeometryData) -> OperatorMatrix {
        self.second_order(&real_to_complex(&geom.g_tilde()))
    }

    pub fn b(&self, geom: &GeometryData, v: C64) -> OperatorMatrix {
        self.second_order(&geom.big_g(v))
    }

    pub fn bbar(&self, geom: &GeometryData, v: C64) -> OperatorMatrix {
        self.second_order(&geom.big_g_bar(v))
    }

    /// `(1/2t) b(V) − (1/2t̄) b̄(V)`.
    pub fn beta(&self, geom: &GeometryData, v: C64, t: C64) -> OperatorMatrix {
        let half = C64::new(0.5, 0.0);
        self.b(geom, v)
            .scale(half / t)
            .axpy(-half / t.conj(), &self.bbar(geom, v))
    }

    /// Multiplication by the polynomial `f`, of degree at most [`MAX_CURVE_DEGREE`].
    pub fn curve(&self, f: &Poly2<C64>) -> Result<OperatorMatrix, OperatorError> {
        let degree = f.degree().unwrap_or(0);
        if degree > MAX_CURVE_DEGREE {
            return Err(PolyError::DegreeTooLarge {
                degree,
                max: MAX_CURVE_DEGREE,
            }
            .into());
        }
        let power = |axis: usize, n: u32| {
            (0..n).fold(self.identity(), |acc, _| acc.mul(&self.position[axis]))
        };
        let mut out = OperatorMatrix::zero(self.k, self.basis.clone());
        for (&(i, j), c) in f.terms() {
            out = out.axpy(*c, &power(0, i).mul(&power(1, j)));
        }
        Ok(out)
    }
}

/// The operator bundle at one point and direction.
#[derive(Debug, Clone)]
pub struct Operators {
    pub nabla_x: OperatorMatrix,
    pub nabla_y: OperatorMatrix,
    pub delta: OperatorMatrix,
    pub b: OperatorMatrix,
    pub bbar: OperatorMatrix,
    pub curve: OperatorMatrix,
}

pub fn build_operators(
    geom: &GeometryData,
    v: C64,
    k: Level,
    cutoff: u32,
    f: &Poly2<C64>,
) -> Result<Operators, OperatorError> {
    let model = Model::new(k, cutoff);
    Ok(Operators {
        nabla_x: model.nabla(0).clone(),
        nabla_y: model.nabla(1).clone(),
        delta: model.delta(geom),
        b: model.b(geom, v),
        bbar: model.bbar(geom, v),
        curve: model.curve(f)?,
    })
}
