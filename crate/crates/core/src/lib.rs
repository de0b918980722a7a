//! Era adjustment of season statistics through order-statistic talent
//! extraction and projection.

pub mod batting;
pub mod career;
pub mod config;
pub mod distributions;
pub mod engine;
pub mod error;
pub mod io;
pub mod mapping;
pub mod pitching;
pub mod population;
pub mod regression;
pub mod report;
pub mod simulation;
pub mod special;
pub mod spline;
pub mod synth;
pub mod tail_ecdf;
pub mod transform;

pub use error::{Error, Result, ValidationCode};
