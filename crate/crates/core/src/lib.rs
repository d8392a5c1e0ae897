//! Modified fractional hedonic games on weighted graphs.
//!
//! Agents are graph nodes; an agent's utility in coalition `C` is the total
//! weight of its edges into `C` divided by `|C| - 1` (0 when alone). The
//! crate provides exact utility and welfare computations, exhaustive
//! stability checkers with replayable witnesses, improvement dynamics,
//! constructive solvers and an experiment layer for measuring
//! price-of-anarchy style ratios.
//!
//! The core is generic over [`Scalar`]; [`Rational`] is the exact type used by
//! the file formats, the experiments and the CLI.
//!
//! ```
//! use mfhg::{game, stability, CoalitionStructure, Graph};
//!
//! let g = Graph::parse("3 2\n0 1 1\n1 2 1\n").unwrap();
//! let c = CoalitionStructure::from_coalitions(3, &[vec![0, 1], vec![2]]).unwrap();
//! assert_eq!(game::social_welfare(&g, &c).unwrap().to_string(), "2");
//! // agent 2 gains 1/2 by joining {0, 1}
//! let w = stability::is_nash(&g, &c).unwrap().into_witness().unwrap();
//! assert_eq!((w.agents, w.after[0].to_string()), (vec![2], "1/2".to_string()));
//! assert!(stability::is_nash(&g, &CoalitionStructure::grand(3)).unwrap().is_stable());
//! ```

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod game;
pub mod graph;
pub mod partitions;
pub mod scalar;
pub mod solvers;
pub mod stability;
pub mod structure;

pub use error::{Error, Result};
pub use graph::WeightedGraph;
pub use scalar::Scalar;
pub use stability::{
    BlockingMode, CheckOptions, Checker, DeviationMode, DeviationWitness, Stability, StabilityKind,
};
pub use structure::CoalitionStructure;

/// Arbitrary-precision rational.
pub type Rational = num_rational::BigRational;
/// Graph with exact rational weights.
pub type Graph = WeightedGraph<Rational>;
/// Witness with exact rational utilities.
pub type Witness = DeviationWitness<Rational>;
/// Solver output with exact rational welfare.
pub type Report = solvers::SolverReport<Rational>;
/// Dynamics trace with exact rational utilities.
pub type Trace = dynamics::DynamicsTrace<Rational>;
