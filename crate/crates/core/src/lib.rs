//! Induced-subgraph detection laboratory: exact oracles, lower-bound graph
//! families, a CONGEST simulator, two-party protocols and distributed
//! induced diamond listing.

pub mod bits;
pub mod bitset;
pub mod congest;
pub mod diamond_listing;
pub mod error;
pub mod families;
pub mod graph;
pub mod search;
pub mod twoparty;

pub use bits::{id_bits, BitString};
pub use error::{Error, Result};
pub use graph::{
    diameter, disj, induced_edge_count, is_induced_cycle, is_induced_diamond, Diameter, Graph, VertexSubset,
};
