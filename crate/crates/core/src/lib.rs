//! Numerical toolkit for differences of composition operators `C_φ − C_ψ`
//! acting from the Bloch space of the unit polydisc `U^n` into `H^∞`.
//!
//! Given two holomorphic self-maps written in a small expression language,
//! the crate estimates the two-sided essential-norm bounds
//!
//! ```text
//! ¼·lim_{δ→0} sup_{E_δ} |||φ_{φ(z)}(ψ(z))|||  ≤  ‖C_φ − C_ψ‖_e  ≤  2n²·lim_{δ→0} sup_{E_δ} k(φ(z), ψ(z))
//! ```
//!
//! and renders a three-valued compactness verdict. Alongside the estimator
//! it ships randomized checks of the supporting inequalities (the Lipschitz
//! estimate in the Kobayashi distance, the dilation limit, the Bloch norm
//! equivalence chain and the extremal test functions).
//!
//! Module map:
//!
//! * [`geometry`]: sup norm, pseudo-hyperbolic distance, Möbius automorphisms,
//!   Kobayashi distance, Bergman metric.
//! * [`symbols`]: expression parser, evaluator and forward-mode jets.
//! * [`bloch`]: `Q_f`, `G_f`, radial derivative and sampled Bloch norms.
//! * [`essential`]: regions `E_δ`, supremum estimation and the verdict.
//! * [`verify`]: curated functions and inequality suites.
//! * [`report`] / [`job`]: report serialization and the analysis pipeline.
//!
//! Parallelism is provided by rayon behind the default `parallel` feature.
//! Every parallel loop maps over point indices and reduces in index order,
//! so results do not depend on the number of worker threads.

pub mod bloch;
pub mod essential;
pub mod geometry;
pub mod job;
pub mod par;
pub mod report;
pub mod sampling;
pub mod search;
pub mod symbols;
pub mod verify;

pub use num_complex::Complex64;

pub use bloch::{estimate_bloch_norms, g_f, q_f, radial_derivative, BlochNormEstimate};
pub use essential::{
    estimate_sups, extrapolate_and_verdict, BoundReport, DeltaLadder, SymbolPair, Verdict,
};
pub use geometry::{kobayashi, moebius, rho, sup_norm, Direction, PolydiscPoint};
pub use symbols::{parse_expr, parse_map, Jet, MapExpr, SymbolMap};
