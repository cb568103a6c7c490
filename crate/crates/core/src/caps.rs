use serde::{Deserialize, Serialize};

/// Size limits shared by every enumeration routine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest group order accepted by automorphism and subgroup enumeration.
    pub group_order: usize,
    /// Largest number of automorphisms, subgroups or holomorph elements listed.
    pub listing: usize,
    /// Largest permutation group whose elements get enumerated.
    pub perm_elements: usize,
    /// Largest graph handled by the automorphism search.
    pub graph_vertices: usize,
    /// Largest c(G) (log2 of the number of sets) for exhaustive runs.
    pub exhaustive_c: u32,
    /// Node budget for the bijection search in `triples_equivalent`.
    pub search_nodes: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            group_order: 512,
            listing: 1_000_000,
            perm_elements: 20_000,
            graph_vertices: 2000,
            exhaustive_c: 30,
            search_nodes: 2_000_000,
        }
    }
}
