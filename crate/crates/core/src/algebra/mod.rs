//! Exact scalars, exponent vectors, sparse polynomials, truncated series in
//! conjugate variable pairs, and dense rational matrices.

pub mod linalg;
pub mod multi_index;
pub mod poly;
pub mod rational;
pub mod series;

pub use linalg::QMatrix;
pub use multi_index::MultiIndex;
pub use poly::Poly;
pub use rational::{factorial, parse_rational, pochhammer, Rational};
pub use series::{SeriesLog, SeriesMatrix, TruncSeries};
