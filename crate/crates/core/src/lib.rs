//! Combinatorics of Joyal's category `Θ_n`: level-trees, the iterated wreath
//! product of the simplex category, Segal's category `Γ`, and the cellular
//! Eilenberg-MacLane objects `K(π, n) = γ_n^*(Hπ)`.

pub mod counting;
pub mod error;
pub mod gamma;
pub mod presheaf;
pub mod simplex;
pub mod theta;
pub mod trees;
pub mod verify;

pub use error::{Result, ThetaError};
pub use gamma::{FiniteAbelianGroup, GammaOperator, GroupElement};
pub use simplex::SimplicialOperator;
pub use theta::ThetaOperator;
pub use trees::LevelTree;
