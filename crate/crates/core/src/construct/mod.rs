//! Explicit constructions and their verifiers.

pub mod bj;
pub mod indep;
pub mod noncover;
pub mod shelah;

pub use bj::{build_bj_level, choose_k, choose_k_with, evade, BjLevel, BjOptions};
pub use indep::{build_indep, IndepFamily};
pub use noncover::{assemble_noncover_witness, partition_cover, LevelSpec, NoncoverOptions};
pub use shelah::{build_shelah_tree, counting_bound, localization_h_check, Capacity, Packing};
