//! Congruence theory of finite bounded distributive lattices.

pub mod congruence;
pub mod io;
mod iso;
pub mod lattice;
pub mod mfamily;
#[cfg(feature = "mutation-hooks")]
pub mod mutation;
pub mod poset;
pub mod verify;

pub use congruence::{
    enumerate_congruences, is_d_reduced, oracle_enumerate_congruences, Congruence, CongruenceError,
    CongruenceFrame, Congruences, QuotientMap, Tags,
};
pub use lattice::{build_lattice, find_isomorphism, is_isomorphic, BuiltLattice, Downset, Lattice, LatticeError, Limits};
pub use poset::{enumerate_posets, enumerate_posets_up_to, Poset};
