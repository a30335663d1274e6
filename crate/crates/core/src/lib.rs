pub mod trees;
pub mod cube_maps;
pub mod points;
pub mod sample;
pub mod chain_operad;
pub mod homology;
pub mod cli;
