//! Steady-state port behavior of one-port circuits by operator splitting.
//!
//! Circuit elements are relations on the space of periodic sampled signals
//! (see [`signal`]). Monotone elements are solved with forward/backward and
//! Douglas–Rachford splitting ([`splitting`]); series/parallel trees of
//! elements use an interleaved nested iteration ([`circuit`]); parallel
//! interconnections of monotone and anti-monotone paths, such as the van der
//! Pol oscillator, use the mixed-monotone Douglas–Rachford iteration
//! ([`mixed`]). Netlists in the `.msn` text format are handled by
//! [`netlist`].
//!
//! ```
//! use portsolve::operators::OperatorSpec;
//! use portsolve::signal::Signal;
//! use portsolve::splitting::{douglas_rachford, SolverConfig};
//!
//! // x + x³ = 2 has the root x = 1.
//! let drive = Signal::constant(8, 1.0, 2.0).unwrap();
//! let cfg = SolverConfig::new(0.5, 1e-10, 1000);
//! let r = douglas_rachford(&OperatorSpec::cubic(3.0), &OperatorSpec::Gain(1.0), &drive, &cfg).unwrap();
//! assert!(r.converged);
//! assert!((r.solution.samples()[0] - 1.0).abs() < 1e-8);
//! ```

pub mod circuit;
pub mod error;
pub mod mixed;
pub mod netlist;
pub mod operators;
pub mod signal;
pub mod splitting;

pub use error::{Error, Result};
