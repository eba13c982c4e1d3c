//! Command-line surface for the rdwalk library.
//!
//! Three entry points, shared between the binary and the integration tests:
//! single-point evaluation ([`point`]), CSV curve sweeps ([`curve`]), and
//! the validation suite ([`validate`]).

pub mod curve;
pub mod point;
pub mod validate;
