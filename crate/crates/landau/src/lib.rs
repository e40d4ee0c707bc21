//! Numerical realization on the plane: constant complex structures over the
//! upper half-plane, a prequantum connection of curvature `−ikω`, and
//! truncated Hermite-basis matrices for `∇`, `Δ`, `b`, `b̄` and curve operators.

pub mod basis;
pub mod experiments;
pub mod geometry;
pub mod operators;
pub mod poly;
pub mod sparse;
pub mod symbols;

pub use basis::HermiteBasis;
pub use geometry::{GeometryData, GeometryError};
pub use operators::{build_operators, Model, OperatorError, OperatorMatrix, Operators};
pub use poly::{Poly2, PolyError};
pub use sparse::SparseMatrix;
pub use symbols::{from_symbols, symbol_decompose, symbol_norm, DiffOp, PolyOp, SymTensor};
