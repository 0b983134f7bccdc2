//! Moment sequences `M_n(f) = ∫₀¹ f(x)^n dx` of complex polynomials and the
//! analytic continuation of their generating function `F(t) = Σ t^n M_n`.
//!
//! * [`poly`] and [`number`]: exact complex-rational polynomial arithmetic.
//! * [`moments`]: exact moment sequences.
//! * [`spectrum`]: the singular set (critical values plus endpoint values) and the sup norm.
//! * [`continuation`]: three evaluators of `F`, path planning, root tracking with lifted logarithms.
//! * [`growth`]: estimators of `limsup |M_n|^{1/n}` and the bound checks built on them.
//! * [`lab`]: seeded corpora and sweep reports.

pub mod continuation;
pub mod error;
pub mod growth;
pub mod lab;
pub mod moments;
pub mod number;
pub mod poly;
pub mod quadrature;
pub mod registry;
pub mod roots;
pub mod spectrum;

pub use error::{Error, Result};
pub use growth::{estimate_growth, GrowthEstimate, GrowthMethod};
pub use moments::{moment, moment_sequence, MomentSequence};
pub use number::{ComplexRational, Rational};
pub use poly::{parse_poly, Polynomial};
pub use spectrum::{critical_set, sup_norm, CriticalSet};
