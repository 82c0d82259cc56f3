pub mod deformed;
pub mod entropy;
pub mod error;
pub mod gf2;
pub mod lattice;
pub mod models;
pub mod pauli;
pub mod regions;

pub use error::{Error, Result};
pub use gf2::{BinaryMatrix, BitVec, Echelon};
pub use lattice::{Lattice, Site};
pub use models::{build_model, CircuitPattern, ModelId, StabilizerModel, SymmetryLine, ValidationReport};
pub use pauli::{conjugate_by_gate, supported_subgroup_dim, symplectic_product, Gate, GateKind, Pauli, PauliString};
