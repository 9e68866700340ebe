pub mod bench;
pub mod curvature;
pub mod diagnose;
pub mod gen;
pub mod rewire;
