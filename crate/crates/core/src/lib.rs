//! Fixed-point analysis on finite metric spaces and a successive
//! approximation solver for Volterra-type Hammerstein integral equations.
//!
//! * [`metric`]: finite metric spaces, self-maps, α tables.
//! * [`functions`]: simulation functions ζ, C-class functions G, Geraghty β.
//! * [`verifier`]: exhaustive contraction checks with per-pair margins.
//! * [`picard`]: Picard orbits and their convergence diagnostics.
//! * [`hammerstein`]: discretized integral operator and its fixed point.
//! * [`problem`]: the JSON problem schema.
//! * [`sweep`]: seeded random sweeps of the convergence properties.

pub mod expr;
pub mod functions;
pub mod hammerstein;
pub mod metric;
pub mod picard;
pub mod problem;
pub mod slack;
pub mod sweep;
pub mod verifier;

pub use slack::Slack;
