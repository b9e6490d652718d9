//! Exact computation in the universal C*-algebra generated by unitaries
//! `u_g` (g ∈ G) and an isometry `s` with `s u_g = u_{φ(g)} s` and
//! `Σ_{g ∈ G/φ(G)} u_g s s* u_{-g} = 1`, for an injective endomorphism `φ`
//! with finite cokernel on a finitely generated abelian group `G`.
//!
//! The crate is organised bottom-up:
//!
//! * [`group`]: the group, the endomorphism, coset transversals, valuations.
//! * [`word`]: monomial normal forms, products, equality, the conditional
//!   expectation and diagonal norms.
//! * [`oracle`]: the concrete representation on `ℓ²(G)`.
//! * [`ortho`]: orthogonalizing projections for positive presentations.
//! * [`dynamics`]: the enveloping group, the profinite partial action and
//!   its freeness and minimality witnesses.
//! * [`expr`]: the text syntax for elements.

pub mod coeff;
pub mod dynamics;
pub mod config;
pub mod error;
pub mod expr;
pub mod group;
pub mod lattice;
mod ser;
pub mod oracle;
pub mod relations;
pub mod ortho;
pub mod word;

pub use coeff::Coeff;
pub use config::EndoConfig;
pub use error::{Error, Result};
pub use group::{CosetHandle, EndoContext, GroupElement, PurityVerdict, Valuation};
pub use word::{format_word, Algebra, AlgebraElement, Letter, Monomial};
pub use oracle::{FiniteVector, L2Oracle};
pub use ortho::{critical_exponent, OrthoReport, OrthoResult, Orthogonalizer, QTerm};
pub use dynamics::{Cylinder, DomainStatus, Dynamics, FreenessVerdict, LimitElement, ProfinitePoint, SemidirectElement};
pub use relations::{RelationBounds, RelationChecker, RelationsReport};
pub use expr::{parse, parse_element, Expr};
