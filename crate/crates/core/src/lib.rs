//! Simulation and statistical verification of scaling limits for linear
//! SDEs `L s = w` driven by symmetric Lévy white noise.
//!
//! | Module        | Contents                                                        |
//! |---------------|-----------------------------------------------------------------|
//! | [`exponent`]  | Lévy exponents, (β₀, β∞) indices, admissibility certificates     |
//! | [`sampler`]   | Cell-increment samplers for every noise family                  |
//! | [`synth`]     | Lévy processes, sheets, fractional processes; `a^H s(·/a)`      |
//! | [`verify`]    | Empirical CFs, scaling-limit and degeneration checks, Hurst fit |
//! | [`io`]        | CSV and binary sample/path formats                              |

pub mod error;
pub mod exponent;
pub mod io;
pub mod quadrature;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod synth;
pub mod verify;

pub use error::{Error, Result};
pub use exponent::{Family, IndexEnd, IndexPair, JumpLaw, LevyExponent};
pub use sampler::{LayeredSamplerConfig, NoiseSpec};
pub use synth::{GridSpec, Operator, PathGrid, RescaleSpec};
