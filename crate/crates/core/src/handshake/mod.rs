//! Handshake cost model: algorithm catalogs and the flight simulator.

pub mod catalog;
pub mod sim;

pub use catalog::{hybrid, kem_catalog, sig_catalog, Catalog, KemSpec, SigSpec};
pub use sim::{
    build_flights, simulate, simulate_traced, ttfb_decompose, AmpEvent, BaseSizes, EndpointPolicy,
    Flights, HandshakeProfile, Outcome, SimReport, TtfbParts,
};
