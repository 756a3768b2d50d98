//! Collective Lamb shift and cooperative linewidth of a weakly driven, dense gas of
//! two-level atoms.
//!
//! Rates are in units of the free-space linewidth γ₀, lengths in units of the
//! transition wavelength λ. The numerical core is generic over `f32`/`f64`
//! through [`Real`]; the aliases below fix it to `f64`.

pub mod cli;
pub mod config;
pub mod ensemble;
pub mod greens;
pub mod linalg;
pub mod model;
pub mod ode;
pub mod output;
pub mod scalar;
pub mod solver;
pub mod twoatom;
pub mod validation;

pub use scalar::{ComplexRate, Real};

pub type Complex = num_complex::Complex64;
pub type Params = model::ModelParams<f64>;
pub type Physical = model::PhysicalInput<f64>;
pub type Solution = solver::SelfConsistentSolution<f64>;
pub type Config = solver::SolverConfig<f64>;
pub type Pair = greens::PairTerms<f64>;
pub type TwoAtom = twoatom::TwoAtomParams<f64>;
pub type State = twoatom::TwoAtomState<f64>;
