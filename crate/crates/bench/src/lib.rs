//! Shared inputs for the benchmarks.

use lastjump_core::gf::field_of_order;
use lastjump_core::witt::{all_vectors, WittVector};

/// Every vector of `W_n(F_q)`.
pub fn witt_vectors(q: u64, n: usize) -> Vec<WittVector> {
    let desc = field_of_order(q).expect("benchmark fields are valid");
    all_vectors(&desc, n).collect()
}
