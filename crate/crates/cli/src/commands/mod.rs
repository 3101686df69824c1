pub mod analyze;
pub mod coarsen;
pub mod quench;
pub mod shim;
