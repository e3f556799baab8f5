//! Three-dimensional topological loops realized as sharply transitive
//! sections in the four-dimensional solvable Lie groups `G(a)`.
//!
//! `G(a)` is the matrix group
//!
//! ```text
//! | e^{a x4}  0        0           x1 |
//! | 0         e^{x4}   x4 e^{x4}   x2 |
//! | 0         0        e^{x4}      x3 |
//! | 0         0        0           1  |
//! ```
//!
//! with Lie algebra `[e1,e4] = a e1`, `[e2,e4] = e2`, `[e3,e4] = e2 + e3`.
//! A continuous section `σ: G/H → G` over one of the one-parameter subgroups
//! `H1`, `H2`, `H3` whose image acts sharply transitively on `G/H` turns
//! `G/H ≅ ℝ³` into a loop via `xH ∗ yH = σ(xH) y H`.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod expr;
pub mod group;
pub mod loops;
pub mod matrix;
pub mod multgroup;
pub mod numerics;
pub mod report;
pub mod sampling;
pub mod sections;
pub mod subgroups;

pub use error::{Error, Result};
pub use group::{GroupElement, GroupParam};
pub use loops::{LoopCase, LoopPoint};
pub use sections::{Preset, SectionCase, SectionSpec};
