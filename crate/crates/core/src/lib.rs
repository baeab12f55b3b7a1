//! Closed-form latency–security bounds for longest-chain proof-of-work
//! consensus under a bounded network delay, together with a Monte Carlo
//! simulator of the mining race that serves as an independent check.
//!
//! The crate is organised bottom-up:
//!
//! * [`distributions`] — log-domain Poisson, Erlang, Skellam and geometric
//!   laws plus truncated power-series arithmetic.
//! * [`bounds`] — the achievable (upper) and unachievable (lower) security
//!   levels as functions of confirmation latency, the general
//!   renewal-versus-Poisson race bound, growth and liveness bounds, and
//!   depth/time conversion.
//! * [`simulator`] — mining traces, block species classification, the
//!   private attack, and empirical race-loss estimates.
//! * [`protocols`] — block-size delay model, throughput, fault tolerance and
//!   the cross-protocol comparison table.
//!
//! All times at the public boundary are in seconds and all rates in blocks
//! per second.
//!
//! ```
//! use nakamoto_bounds::bounds::{invert_latency, ProtocolParams, UpperBound};
//!
//! // 10% adversarial share of one block per 600 s, 10 s delay bound.
//! let params = ProtocolParams::from_total_rate(1.0 / 600.0, 0.1, 10.0).unwrap();
//! let t = invert_latency(UpperBound::Delay, &params, 1e-3).unwrap();
//! assert!((3.5 * 3600.0..4.5 * 3600.0).contains(&(t as f64)));
//! ```

pub mod bounds;
pub mod distributions;
mod error;
pub mod protocols;
pub mod roots;
pub mod simulator;

pub use error::{Error, Result};
