//! Geodesic lengths and geodesic words in restricted wreath products
//! `A ≀ ℤʳ` (abelian `A`) and in free metabelian groups `F/F″`.
//!
//! Both problems reduce to combinatorial optimization on the lattice ℤʳ:
//! a minimum walk through the lit lamps for wreath products, and a group
//! Steiner tree joining the components of a word's edge flow for metabelian
//! groups. Every solver has a brute-force oracle next to it.

pub mod bfs;
pub mod error;
pub mod lattice;
pub mod lattice_tsp;
pub mod metabelian;
pub mod sample;
pub mod schema;
pub mod steiner;
mod union_find;
pub mod words;
pub mod wreath;

pub use bfs::{OracleCaps, OracleDistance};
pub use error::{Error, Result};
pub use lattice::{manhattan, LatticeEdge, LatticePoint};
pub use lattice_tsp::{ApproxVariant, WalkInstance, WalkSolution};
pub use metabelian::{Flow, SupportGraph};
pub use steiner::{GroupSteinerInstance, SteinerInstance, TreeResult};
pub use words::{Alphabet, Generator, GeneratorKind, Letter, Sign, Word};
pub use wreath::{AElement, GroupSpec, WalkSolver, WreathElement};

/// Size limits for the exact solvers.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Caps {
    /// Held–Karp target count.
    pub walk_targets: usize,
    /// Terminals (or groups) handed to Dreyfus–Wagner.
    pub steiner_terminals: usize,
    /// Vertices of the candidate graph a Steiner solver may build.
    pub grid_vertices: usize,
    /// How far group Steiner search may leave the groups' bounding box.
    pub box_margin: i64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            walk_targets: lattice_tsp::DEFAULT_HELD_KARP_CAP,
            steiner_terminals: steiner::DEFAULT_TERMINAL_CAP,
            grid_vertices: steiner::DEFAULT_GRID_VERTEX_CAP,
            box_margin: steiner::DEFAULT_BOX_MARGIN,
        }
    }
}

impl Caps {
    /// One limit for every exact solver's point count.
    pub fn with_max_exact(mut self, n: usize) -> Self {
        self.walk_targets = n;
        self.steiner_terminals = n;
        self
    }
}
