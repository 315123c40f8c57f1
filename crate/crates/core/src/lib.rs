//! Session types with speculative selection and orchestrated compliance.
//!
//! The crate covers the whole pipeline: abstract syntax ([`syntax`]), the
//! compliance relation and orchestrator synthesis ([`compliance`]), type
//! reconstruction ([`typecheck`]), structural congruence ([`congruence`]),
//! the reduction engine ([`semantics`]), the text syntax ([`surface`]) and
//! random generators for property testing ([`propgen`]).

pub mod compliance;
pub mod congruence;
pub mod surface;
pub mod syntax;
pub mod semantics;
pub mod typecheck;
pub mod propgen;
