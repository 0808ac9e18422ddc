//! Index coding with single-uniprior side information: instance handling,
//! graph analysis, single- and multi-sender bounds and codes, and code
//! verification.

pub mod classify;
pub mod cli;
pub mod code;
pub mod error;
pub mod gf2;
pub mod graph;
pub mod instance;
pub mod multi;
pub mod oracle;
pub mod single;

pub use classify::{classify_leaf_scc, find_degeneracy_witness, DegeneracyWitness, LeafSccClass, LeafSccKind};
pub use code::{verify_exhaustive, verify_linear, LinearIndexCode, Symbol, VerifyReport};
pub use error::{Error, Result};
pub use graph::{is_grounded, leaf_sccs, scc_partition, WorkGraph};
pub use instance::{derive_message_graph, parse_instance, validate, Instance, MessageGraph};
pub use multi::{
    append_degenerated, append_disconnected, bound_multi, encode_multi, exhaustive_lower_bound,
    find_connecting_trees, prune_leaf_scc, run_append_prune, BoundReport, LowerBoundReport, SearchCaps,
};
pub use oracle::{oracle_min_linear, OracleCaps, OracleResult};
pub use single::{encode_single, prune_all, solve_single, SingleSolution};
