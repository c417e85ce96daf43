//! soscert: sum-of-squares synthesis of low-level tracking controllers and
//! simulation-function error certificates for polynomial control-affine
//! systems tracking low-dimensional continuous abstractions.
//!
//! The pipeline: build the error dynamics between a concrete system and its
//! abstraction ([`errsys`]), pose the certificate conditions as
//! sum-of-squares programs ([`sosbuild`]) over exact polynomial arithmetic
//! ([`polyalg`]), solve them with a dense primal-dual interior-point method
//! ([`sdpsolve`]), alternate the γ-step / V-step to shrink the certified
//! invariant sublevel set ([`synth`]), and check the result by sampling and
//! closed-loop simulation ([`simrun`]).
//!
//! Everything is generic over the scalar type (`f32` or `f64`); the aliases
//! below fix `f64`, which is what the CLI and the bundled models use.

pub mod bundled;
pub mod errsys;
pub mod polyalg;
pub mod scalar;
pub mod sdpsolve;
pub mod simrun;
pub mod sosbuild;
pub mod synth;

pub use scalar::Scalar;

/// `f64` polynomial.
pub type Poly = polyalg::Polynomial<f64>;
/// `f64` polynomial matrix.
pub type PolyMat = polyalg::PolyMatrix<f64>;
/// `f64` semidefinite program.
pub type Sdp = sdpsolve::SdpProblem<f64>;
/// `f64` SOS program.
pub type SosProg = sosbuild::SosProgram<f64>;
/// `f64` error system.
pub type ErrSys = errsys::ErrorSystem<f64>;
/// `f64` synthesis certificate.
pub type Cert = synth::Certificate<f64>;
