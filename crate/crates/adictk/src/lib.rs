//! Exact-arithmetic toolkit for adic dynamics.
//!
//! The crate works with finite windows of digit expansions and keeps every
//! measure computation in exact rational arithmetic. The pieces fit together
//! like this:
//!
//! * [`word`] — least-significant-first digit words, the odometer `x ↦ x+1`
//!   with carry, cylinder measures (Haar and Bernoulli), seeded sampling.
//! * [`pascal`] — the Pascal adic rewrite `0^m 1^k 1 0 → 1^k 0^m 0 1` on
//!   binary words, its inverse, and the jump function `n(x) = 2^m + 2^k − 1`
//!   with `Px = x + n(x)`.
//! * [`graph`] — graded (Bratteli-style) graphs, the lexicographic adic
//!   successor, the Pascal graph, and the check that an adic map is a
//!   generalized induced map over a p-odometer.
//! * [`induced`] — generalized induced maps `x ↦ T^{n(x)} x`, classical
//!   first-return maps, and orbit-refinement checks.
//! * [`tower`] — the Hajian–Kakutani sigma-finite skyscraper over the Pascal
//!   map with ceiling `n(x)`: fiber steps, inverses, first returns, and exact
//!   level measures.
//! * [`stats`] — fixed-composition rank statistics via the combinatorial
//!   number system, seeded Monte Carlo empirical CDFs, a Takagi-function
//!   evaluator, and exact truncated jump expectations.
//! * [`walk`] — two-sided random-walk trajectory spaces over `Z^d`, free, and
//!   cyclic groups: increments factorization, the shift, cylinder measures
//!   on `S^Z × G`, and exact Laplace-operator adjointness.
//! * [`spectral`] — Dirichlet truncations of Laplace operators to Cayley
//!   balls and power-iteration estimates of their top singular value.
//!
//! Maps defined on infinite expansions act here on finite windows, so any
//! operation whose outcome the window does not decide returns
//! [`Windowed::Undetermined`] rather than guessing; undetermined points are
//! data, not errors.

pub mod error;
pub mod graph;
pub mod induced;
pub mod pascal;
pub mod ratio;
pub mod spectral;
pub mod stats;
pub mod tower;
pub mod walk;
pub mod word;

pub use error::Error;
pub use word::{DigitWord, MeasureSpec, StepResult, Windowed};
