//! Finite-field Gelfand-model verification for Klyachko models, the
//! multisegment and highest-derivative calculus for unitary representations
//! of `GL_n`, and the Weyl-group bookkeeping behind explicit period formulas.

pub mod field;
pub mod gl;
pub mod matrix;
pub mod parallel;
pub mod poly;
pub mod arena;
pub mod cache;
pub mod character;
pub mod gelfand;
pub mod klyachko;
pub mod param;
pub mod period;
pub mod segment;
pub mod weyl;
