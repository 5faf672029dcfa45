//! Cheminformatics and graph analysis used by workbench actions.

pub mod cluster;
pub mod elements;
pub mod error;
pub mod fingerprint;
pub mod graph;
pub mod heatmap;
pub mod mst;
pub mod pchembl;
pub mod properties;
pub mod similarity;
pub mod smiles;

pub use cluster::{hcluster, Dendrogram, DistanceMatrix, Linkage, Merge};
pub use error::{AnalysisError, Result};
pub use fingerprint::{fingerprint, tanimoto, Fingerprint, DEFAULT_WIDTH};
pub use graph::{parse_edge_list, WeightedEdge, WeightedGraph};
pub use heatmap::{heatmap_normalize, normalize_dense, ramp};
pub use mst::{mst, total_weight, UnionFind};
pub use pchembl::{pchembl, Unit};
pub use properties::{calc_properties, Properties};
pub use similarity::{chord_pairs, similarity_matrix};
pub use smiles::{parse_smiles, Atom, Bond, BondOrder, Molecule, SmilesError, SmilesErrorKind};
