//! Partial information, partial entropy and integrated information
//! decompositions.

pub mod lattice;
pub mod ped;
pub mod phiid;
pub mod redundancy;
pub mod te_decomp;

pub use lattice::{build_lattice, moebius, Antichain, DecompositionResult, Poset, RedundancyLattice, SourceSet};
pub use ped::{ped_decompose, redundant_entropy, PedFunction};
pub use phiid::{
    classify_dynamics, double_redundancy, phi_r, phiid_decompose, phiid_decompose_dist, DynamicsLabel, PhiAtom,
    PhiFunction, PhiResult, ProductLattice,
};
pub use redundancy::{
    expected_redundancy_pm, expected_redundancy_sx, local_pid_decompose, pid_decompose, redundancy, redundancy_mmi,
    redundancy_pm, redundancy_sx, redundancy_sx_components, redundancy_wb, RedundancyFunction,
};
pub use te_decomp::{dynamic_pid, information_modification, te_decompose, TeDecomposition};
