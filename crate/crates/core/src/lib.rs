pub mod analysis;
pub mod error;
pub mod interplay;
pub mod lattice;
pub mod params;
pub mod scenario;
pub mod sim;
