//! Inductive valuations on `Q[x]` over the p-adic valuation: key polynomials,
//! residual polynomials, residue fields and augmentations.

pub mod augment;
pub mod base;
pub mod chain;
pub mod error;
pub mod ff;
pub mod json;
pub mod keys;
pub mod poly;
pub mod residue;
pub mod value;

pub use augment::{ContinuousChain, LimitValuation, Stability};
pub use base::BaseValuation;
pub use chain::{ExpansionReport, InductiveValuation, Monomial};
pub use error::{Error, Result};
pub use ff::{ResPoly, TowerElem, TowerField};
pub use keys::GradedFactorization;
pub use poly::Poly;
pub use residue::{Decomposition, HomogeneousUnit, ResidualIdeal, TransformCheck};
pub use value::{Embedding, GroupGens, Value, Q};
