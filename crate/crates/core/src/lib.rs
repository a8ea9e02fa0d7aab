//! Exact arithmetic and statistics for hyperelliptic curves `y^2 = F(x)`
//! over odd prime fields.
//!
//! The crate is organised around the pipeline
//!
//! ```text
//! ffield  -> quadchar -> lfunc -> bounds
//!                          |
//!                        family  (sweeps over all monic squarefree F)
//! moments (analytic side: prime sums, limiting moments H(s), phi(t))
//! ```
//!
//! * [`ffield`] — arithmetic in `F_q[X]`, enumeration of monic /
//!   squarefree / irreducible polynomials, residue rings of extensions.
//! * [`quadchar`] — quadratic residue symbols `(F/P)` and Λ-weighted
//!   character sums.
//! * [`lfunc`] — the L-polynomial of a curve by three independent
//!   methods, class numbers and the fluctuation statistic `N_F`.
//! * [`bounds`] — closed-form Weil and Galois-extension bounds plus the
//!   per-curve verifier.
//! * [`family`] — exhaustive and sampled sweeps over the family of monic
//!   squarefree polynomials with streaming statistics.
//! * [`moments`] — the limiting moments `H(s)`, per-prime log weights,
//!   certified inequality checks and the truncated characteristic
//!   function.

pub mod bounds;
pub mod family;
pub mod ffield;
pub mod lfunc;
pub mod moments;
pub mod numeric;
pub mod quadchar;
