//! Two-session simple multicast network coding: region decompositions,
//! feasibility labeling, finite-field codes and minimal region graphs.

pub mod assoc;
pub mod codes;
pub mod error;
pub mod export;
pub mod fixtures;
pub mod gf;
pub mod instances;
pub mod labeling;
pub mod minimize;
pub mod network;
pub mod pipeline;
pub mod region;

pub use assoc::{AssociatedGraph, Coloring};
pub use codes::{NetworkSolution, RegionCode};
pub use error::{Error, Result};
pub use gf::{Elem, Field, Kernel};
pub use instances::{GenParams, RegionGraphSpec};
pub use labeling::{LabeledRegionGraph, RegionKind};
pub use minimize::{Edit, MinimalityReport};
pub use network::{load_network, InstanceDoc, LinkId, LinkKind, Network, NetworkConfig, Session};
pub use pipeline::{BenchRow, RunReport, SolveOptions, Verdict};
pub use region::{Region, RegionDecomposition, RegionGraph, RegionState, Roles};
