// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Current-flow closeness centrality on undirected graphs.
//!
//! The crate computes effective resistances by solving Laplacian systems
//! with a multigrid solver and builds three current-flow closeness scores on
//! top of them: the exact score, a pivot-sampling estimate and a random
//! projection estimate. Shortest-path closeness, a degree-based surrogate and
//! ranking metrics are included for comparison.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod centrality;
pub mod error;
pub mod eval;
pub mod generators;
pub mod graph;
pub mod par;
pub mod resistance;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use graph::{Graph, LoadOptions};
pub use par::Exec;
pub use solver::{MultigridHierarchy, PotentialVector, SolverConfig};

/// Derives an independent stream seed from a base seed (SplitMix64 mix).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
