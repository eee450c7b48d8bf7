//! Rigid-body superposition, RMSD, neighbour grids and binding-site region selection.

mod grid;
mod linalg;
mod pocket;
mod superpose;

pub use grid::{within, NeighborGrid};
pub use linalg::{svd3, Mat3, SignedSvd, Vec3};
pub use pocket::{
    select_pocket_and_shell, select_pocket_and_shell_brute_force, select_regions, RegionSelection, POCKET_CUTOFF,
    SHELL_CUTOFF,
};
pub use superpose::{kabsch, rmsd, sum_squared_deviation, RigidTransform, Superposition};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point sets differ in length ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("invalid grid cell size {0}")]
    InvalidCellSize(f64),
    #[error("non-finite coordinate")]
    NonFinite,
    #[error("query radius {radius} exceeds grid cell size {cell}")]
    RadiusExceedsCell { radius: f64, cell: f64 },
    #[error("structure has no ligand heavy atoms")]
    NoLigand,
    #[error("structure has no polymer residues")]
    NoPolymer,
    #[error("cutoffs must satisfy 0 < pocket ({pocket}) < shell ({shell})")]
    InvalidCutoffs { pocket: f64, shell: f64 },
}
