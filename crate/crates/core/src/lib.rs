//! Exact computational classification of Galois objects and biGalois groups
//! over non-semisimple monomial Hopf algebras.
//!
//! A monomial Hopf algebra is presented by a finite group `G`, a central
//! element `g`, a character `chi` with `chi(g) != 1` and a scalar `mu`; the
//! algebra is generated over the group algebra by a skew-primitive `x` with
//! `x h = chi(h) h x` and `x^d = mu (1 - g^d)`.  This crate constructs these
//! algebras with exact structure constants over cyclotomic fields, computes
//! the modified second cohomology groups that index their Galois objects,
//! classifies group data into six types, enumerates Galois objects, and
//! computes biGalois groups, cross-checking closed-form descriptions against
//! independent linear-algebra and brute-force oracles.
//!
//! Coefficient surrogate: the multiplicative group of the (infinite) base
//! field is replaced by the finite group of M-th roots of unity, handled
//! additively as exponents mod M.  Quotients `k*/k*^t` instantiate as
//! `Z/gcd(M,t)`.  Every report states this rule.

pub mod arith;
pub mod bigalois;
pub mod cohomology;
pub mod comodule;
pub mod config;
pub mod datum;
pub mod error;
pub mod galois;
pub mod groups;
pub mod linalg;
pub mod pipeline;
pub mod report;
pub mod special;

pub use error::{Error, Result};
