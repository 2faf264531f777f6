pub mod exactmath;
pub mod genus;
pub mod oracle;
pub mod potential;
pub mod qseries;
pub mod symmetry;
pub mod theta;
pub mod verify;
