//! Exact machinery for the formal Hitchin-Witten connection at a fixed level `k`:
//! truncated series in `1/s`, the genus-1 operator algebra, the coefficient
//! recursion for its trivialisations, and operator-valued forms.
//!
//! Everything is generic over [`Scalar`]; exact work uses [`GaussianRational`].

pub mod algebra;
pub mod formal_curvature;
pub mod forms;
pub mod recursion;
pub mod scalar;
pub mod series;

pub use algebra::{AlgebraElement, AlgebraError, Mono, Word};
pub use forms::{DenseMatrix, OperatorForm, Poly};
pub use recursion::{CoeffTable, RecursionError, TriangularSystem};
pub use scalar::{Level, LevelError, Module, Ring, Scalar};
pub use series::{FormalSeries, SeriesError};

/// Complex numbers with rational real and imaginary parts.
pub type GaussianRational = num_complex::Complex<num_rational::BigRational>;

pub type ExactSeries = FormalSeries<GaussianRational>;
pub type FloatSeries = FormalSeries<num_complex::Complex64>;
pub type ExactAlgebraElement = AlgebraElement<GaussianRational>;
pub type ExactCoeffTable = CoeffTable<GaussianRational>;
pub type FloatCoeffTable = CoeffTable<num_complex::Complex64>;
pub type ExactMatrix = DenseMatrix<GaussianRational>;
