//! Numerical laboratory for Schottky groups: Möbius maps, limit sets,
//! Hausdorff dimension estimates, quasi-circles, classical domains and the
//! deformation toward classical groups.

pub mod classicality;
pub mod cli;
pub mod curves;
pub mod dimension;
pub mod fixtures;
pub mod moebius;
pub mod schottky;
