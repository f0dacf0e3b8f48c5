pub mod asw_abelian;
pub mod counterexample_h3;
pub mod d4_heisenberg;
pub mod error;
pub mod gf;
pub mod serde_str;
pub mod global_euler;
pub mod witt;

pub use error::{Error, Result};
