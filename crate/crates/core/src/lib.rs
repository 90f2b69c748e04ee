pub mod analysis;
pub mod config;
pub mod construction;
pub mod lp;
pub mod measure;
pub mod rational;
pub mod report;
pub mod subspace;
pub mod suites;
