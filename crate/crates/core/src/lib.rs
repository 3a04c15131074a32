//! Unitary 3-design sampling over the symplectic group `Sp(2m, F_2)` via
//! random transvections composed with a Kerdock-set `PSL(2, 2^m)` action.

pub mod bitmat;
pub mod error;
pub mod gf2m;
pub mod graph;
pub mod kerdock;
pub mod markov;
pub mod pauli;
pub mod sampler;
pub mod unitary;

pub use error::{Error, Result};
pub use gf2m::{FieldContext, FieldElement};
